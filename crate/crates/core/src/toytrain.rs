//! Desk-scale training harness on synthetic frequency-discrimination data.
//!
//! A [`ToyModel`] is a spatial mixer (any [`Mixer`]: the wavelet layer or a
//! plain depth-wise convolution), global average pooling, and a linear
//! two-class head trained with softmax cross-entropy and plain SGD. The
//! mixer is the only part that differs between compared models, so accuracy
//! differences isolate the spatial-mixing operator.
//!
//! Datasets are synthesized, balanced, and deterministic per seed. The
//! separable task opposes smooth positive blobs to zero-mean high-frequency
//! textures; the long-wavelength task opposes two smooth gratings whose
//! wavelengths differ by one octave, a deliberately constructed stand-in
//! for low-frequency discrimination at desk scale.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::grad::{Mixer, PlainDepthwise};
use crate::rng::Rng64;
use crate::tensor::{Element, Tensor4};
use crate::wtconv::WtConvParams;

/// Which synthetic discrimination task to generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskKind {
    /// Class 0: smooth Gaussian blobs. Class 1: high-frequency textures
    /// (checkerboards/stripes, period <= 4 px). Separable by smoothness.
    FreqSeparable,
    /// Both classes smooth sinusoidal gratings: class 0 wavelength 32 px,
    /// class 1 wavelength 16 px, with small spatial jitter.
    LongWavelength,
}

/// Generator settings for one dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetSpec {
    pub task: TaskKind,
    /// Total images; must be even (classes stay balanced).
    pub count: usize,
    pub h: usize,
    pub w: usize,
    /// Additive uniform noise amplitude.
    pub noise: f64,
    pub seed: u64,
}

/// Labeled single-channel image set with pixel values in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqDataset<T: Element> {
    pub images: Tensor4<T>,
    pub labels: Vec<usize>,
}

impl<T: Element> FreqDataset<T> {
    pub fn len(&self) -> usize {
        self.labels.len()
    }
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

fn blob_image(grid: &mut [f64], h: usize, w: usize, rng: &mut Rng64) {
    let cy = rng.uniform(h as f64 * 0.25, h as f64 * 0.75);
    let cx = rng.uniform(w as f64 * 0.25, w as f64 * 0.75);
    let sigma = rng.uniform(h as f64 / 8.0, h as f64 / 4.0);
    let amp = rng.uniform(0.5, 1.0);
    for y in 0..h {
        for x in 0..w {
            let dy = y as f64 - cy;
            let dx = x as f64 - cx;
            grid[y * w + x] = amp * (-(dy * dy + dx * dx) / (2.0 * sigma * sigma)).exp();
        }
    }
}

fn texture_image(grid: &mut [f64], h: usize, w: usize, rng: &mut Rng64) {
    let amp = rng.uniform(0.5, 1.0);
    let half_period = if rng.below(2) == 0 { 1usize } else { 2 };
    let pattern = rng.below(3);
    for y in 0..h {
        for x in 0..w {
            let cell = match pattern {
                0 => y / half_period + x / half_period, // checkerboard
                1 => x / half_period,                   // vertical stripes
                _ => y / half_period,                   // horizontal stripes
            };
            grid[y * w + x] = if cell % 2 == 0 { amp } else { -amp };
        }
    }
}

fn grating_image(grid: &mut [f64], h: usize, w: usize, wavelength: f64, rng: &mut Rng64) {
    let amp = rng.uniform(0.7, 1.0);
    let jitter = rng.below(3) as f64 - 1.0; // integer shift in [-1, 1]
    for y in 0..h {
        for x in 0..w {
            let phase = 2.0 * std::f64::consts::PI * (x as f64 + jitter) / wavelength;
            grid[y * w + x] = amp * phase.sin();
        }
    }
}

/// Synthesize a dataset. Image `i` draws from its own generator stream
/// (seeded from `seed` and `i`), labels alternate `0, 1, 0, 1, ...`.
pub fn generate_dataset<T: Element>(spec: &DatasetSpec) -> Result<FreqDataset<T>> {
    if spec.count == 0 {
        return Err(Error::Param("dataset needs at least one image".into()));
    }
    if !spec.count.is_multiple_of(2) {
        return Err(Error::Param(format!(
            "dataset count must be even to stay balanced, got {}",
            spec.count
        )));
    }
    if spec.noise < 0.0 {
        return Err(Error::Param(format!("noise amplitude must be >= 0, got {}", spec.noise)));
    }
    let (h, w) = (spec.h, spec.w);
    let mut data = Vec::with_capacity(spec.count * h * w);
    let mut labels = Vec::with_capacity(spec.count);
    let mut grid = vec![0.0f64; h * w];
    for i in 0..spec.count {
        let label = i % 2;
        let mut rng = Rng64::new(
            spec.seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        );
        match (spec.task, label) {
            (TaskKind::FreqSeparable, 0) => blob_image(&mut grid, h, w, &mut rng),
            (TaskKind::FreqSeparable, _) => texture_image(&mut grid, h, w, &mut rng),
            (TaskKind::LongWavelength, 0) => grating_image(&mut grid, h, w, 32.0, &mut rng),
            (TaskKind::LongWavelength, _) => grating_image(&mut grid, h, w, 16.0, &mut rng),
        }
        for v in &grid {
            let noisy = if spec.noise > 0.0 {
                v + rng.uniform(-spec.noise, spec.noise)
            } else {
                *v
            };
            data.push(T::from_f64(noisy.clamp(-1.0, 1.0)));
        }
        labels.push(label);
    }
    Ok(FreqDataset {
        images: Tensor4::from_vec(spec.count, 1, h, w, data)?,
        labels,
    })
}

/// Mean absolute 5-point Laplacian over interior pixels: a smoothness
/// statistic that separates the noiseless classes of the separable task.
pub fn mean_abs_laplacian<T: Element>(images: &Tensor4<T>, index: usize) -> f64 {
    let (_, _, h, w) = images.shape();
    let mut sum = 0.0;
    let mut count = 0usize;
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let v = |yy: usize, xx: usize| images.get(index, 0, yy, xx).to_f64();
            let lap = 4.0 * v(y, x) - v(y - 1, x) - v(y + 1, x) - v(y, x - 1) - v(y, x + 1);
            sum += lap.abs();
            count += 1;
        }
    }
    sum / count as f64
}

/// Mixer + global average pooling + linear two-class head.
pub struct ToyModel<T: Element> {
    mixer: Box<dyn Mixer<T>>,
    /// `(channel, class)` row-major, `channels x 2`.
    head_weight: Vec<T>,
    head_bias: [T; 2],
}

impl<T: Element> ToyModel<T> {
    /// Head weights draw uniform over `(-1/sqrt(c), 1/sqrt(c))` from their
    /// own stream; biases start at zero.
    pub fn new(mixer: Box<dyn Mixer<T>>, head_seed: u64) -> Self {
        let c = mixer.channels();
        let mut rng = Rng64::new(head_seed);
        let bound = 1.0 / (c as f64).sqrt();
        let head_weight = (0..c * 2)
            .map(|_| T::from_f64(rng.uniform(-bound, bound)))
            .collect();
        ToyModel { mixer, head_weight, head_bias: [T::zero(); 2] }
    }

    pub fn channels(&self) -> usize {
        self.mixer.channels()
    }

    pub fn mixer(&self) -> &dyn Mixer<T> {
        self.mixer.as_ref()
    }

    /// Replicate the single input channel across the mixer's channels.
    fn expand_channels(&self, images: &Tensor4<T>) -> Result<Tensor4<T>> {
        let (n, c_in, h, w) = images.shape();
        if c_in != 1 {
            return Err(Error::Shape(format!(
                "expected single-channel images, got {c_in} channels"
            )));
        }
        let c = self.channels();
        let plane = h * w;
        let mut out = Tensor4::zeros(n, c, h, w)?;
        for bn in 0..n {
            let src = &images.data()[bn * plane..][..plane];
            for ch in 0..c {
                out.data_mut()[(bn * c + ch) * plane..][..plane].copy_from_slice(src);
            }
        }
        Ok(out)
    }

    /// Global average pool per (batch, channel).
    fn pool(mixed: &Tensor4<T>) -> Vec<T> {
        let (n, c, h, w) = mixed.shape();
        let plane = h * w;
        let norm = T::from_f64(1.0 / plane as f64);
        let mut pooled = vec![T::zero(); n * c];
        for (i, slot) in pooled.iter_mut().enumerate() {
            let mut acc = T::zero();
            for &v in &mixed.data()[i * plane..][..plane] {
                acc = acc + v;
            }
            *slot = acc * norm;
        }
        pooled
    }

    fn logits_from_pooled(&self, pooled: &[T], n: usize) -> Vec<T> {
        let c = self.channels();
        let mut logits = vec![T::zero(); n * 2];
        for bn in 0..n {
            for class in 0..2 {
                let mut acc = self.head_bias[class];
                for ch in 0..c {
                    acc = acc + pooled[bn * c + ch] * self.head_weight[ch * 2 + class];
                }
                logits[bn * 2 + class] = acc;
            }
        }
        logits
    }

    /// Class scores for a batch of single-channel images.
    pub fn logits(&self, images: &Tensor4<T>) -> Result<Vec<T>> {
        let expanded = self.expand_channels(images)?;
        let mixed = self.mixer.forward(&expanded)?;
        let pooled = Self::pool(&mixed);
        Ok(self.logits_from_pooled(&pooled, images.batch()))
    }

    pub fn predict(&self, images: &Tensor4<T>) -> Result<Vec<usize>> {
        let logits = self.logits(images)?;
        Ok(logits
            .chunks_exact(2)
            .map(|pair| usize::from(pair[1] > pair[0]))
            .collect())
    }

    pub fn accuracy(&self, data: &FreqDataset<T>) -> Result<f64> {
        let predictions = self.predict(&data.images)?;
        let hits = predictions
            .iter()
            .zip(&data.labels)
            .filter(|(p, l)| p == l)
            .count();
        Ok(hits as f64 / data.len() as f64)
    }

    /// Checkpoint: the mixer's canonical parameter block, then a `HEAD` tag,
    /// the head extents (`c`, 2, little-endian u32), the head weights, and
    /// the two biases, all little-endian.
    pub fn write_to(&self, out: &mut impl Write) -> Result<()> {
        self.mixer.export_params()?.write_to(out)?;
        let mut buf = Vec::new();
        buf.extend_from_slice(b"HEAD");
        buf.extend_from_slice(&(self.channels() as u32).to_le_bytes());
        buf.extend_from_slice(&2u32.to_le_bytes());
        for &v in &self.head_weight {
            v.write_le(&mut buf);
        }
        for &v in &self.head_bias {
            v.write_le(&mut buf);
        }
        out.write_all(&buf)?;
        Ok(())
    }

    /// Restore a checkpoint. A zero-level parameter block comes back as a
    /// plain depth-wise mixer.
    pub fn read_from(input: &mut impl Read) -> Result<Self> {
        let params = WtConvParams::<T>::read_from(input)?;
        let mixer: Box<dyn Mixer<T>> = if params.levels() == 0 {
            Box::new(PlainDepthwise::new(
                params.base_kernel().clone(),
                params.base_scale().clone(),
            )?)
        } else {
            Box::new(params)
        };
        let mut tag = [0u8; 4];
        input.read_exact(&mut tag)?;
        if &tag != b"HEAD" {
            return Err(Error::Format("missing HEAD block in checkpoint".into()));
        }
        let mut dims = [0u8; 8];
        input.read_exact(&mut dims)?;
        let c = u32::from_le_bytes(dims[0..4].try_into().unwrap()) as usize;
        let classes = u32::from_le_bytes(dims[4..8].try_into().unwrap()) as usize;
        if c != mixer.channels() || classes != 2 {
            return Err(Error::Format(format!(
                "head block is {c}x{classes}, mixer has {} channels",
                mixer.channels()
            )));
        }
        let mut bytes = vec![0u8; (c * 2 + 2) * T::BYTE_WIDTH];
        input.read_exact(&mut bytes)?;
        let values: Vec<T> = bytes.chunks_exact(T::BYTE_WIDTH).map(T::read_le).collect();
        let head_weight = values[..c * 2].to_vec();
        let head_bias = [values[c * 2], values[c * 2 + 1]];
        Ok(ToyModel { mixer, head_weight, head_bias })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainOptions {
    pub epochs: usize,
    pub lr: f64,
    pub batch: usize,
    /// Seed for the per-epoch shuffle.
    pub shuffle_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub loss: f64,
    pub train_acc: f64,
    pub test_acc: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainLog {
    pub epochs: Vec<EpochStats>,
}

impl TrainLog {
    /// `epoch,loss,train_acc,test_acc` rows with a header line.
    pub fn write_csv(&self, out: &mut impl Write) -> Result<()> {
        let mut text = String::from("epoch,loss,train_acc,test_acc\n");
        for e in &self.epochs {
            text.push_str(&format!(
                "{},{},{},{}\n",
                e.epoch, e.loss, e.train_acc, e.test_acc
            ));
        }
        out.write_all(text.as_bytes())?;
        Ok(())
    }
}

/// Training abort: the loss left the finite regime. Carries everything
/// finite that happened before the failure.
#[derive(Debug, Clone)]
pub struct Diverged {
    pub epoch: usize,
    pub completed: TrainLog,
}

impl std::fmt::Display for Diverged {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let last = self
            .completed
            .epochs
            .last()
            .map(|e| format!("last finite loss {} at epoch {}", e.loss, e.epoch))
            .unwrap_or_else(|| "no finite epoch completed".into());
        write!(f, "loss became non-finite in epoch {}; {last}", self.epoch)
    }
}

impl From<Diverged> for Error {
    fn from(d: Diverged) -> Self {
        Error::Training(d.to_string())
    }
}

fn gather_batch<T: Element>(
    data: &FreqDataset<T>,
    indices: &[usize],
) -> Result<(Tensor4<T>, Vec<usize>)> {
    let (_, _, h, w) = data.images.shape();
    let mut buf = Vec::with_capacity(indices.len() * h * w);
    let mut labels = Vec::with_capacity(indices.len());
    for &i in indices {
        let start = data.images.index_of(i, 0, 0, 0);
        buf.extend_from_slice(&data.images.data()[start..start + h * w]);
        labels.push(data.labels[i]);
    }
    Ok((Tensor4::from_vec(indices.len(), 1, h, w, buf)?, labels))
}

/// Softmax cross-entropy over two classes; returns per-batch mean loss,
/// gradient with respect to the logits (already divided by batch size), and
/// the hit count.
fn softmax_ce<T: Element>(logits: &[T], labels: &[usize]) -> (f64, Vec<T>, usize) {
    let n = labels.len();
    let mut d_logits = vec![T::zero(); n * 2];
    let mut loss = 0.0f64;
    let mut hits = 0usize;
    let inv_n = T::from_f64(1.0 / n as f64);
    for (bn, &label) in labels.iter().enumerate() {
        let l0 = logits[bn * 2].to_f64();
        let l1 = logits[bn * 2 + 1].to_f64();
        let m = l0.max(l1);
        let e0 = (l0 - m).exp();
        let e1 = (l1 - m).exp();
        let z = e0 + e1;
        let (p0, p1) = (e0 / z, e1 / z);
        loss -= if label == 0 { p0.ln() } else { p1.ln() };
        if (l1 > l0) == (label == 1) {
            hits += 1;
        }
        d_logits[bn * 2] = T::from_f64(p0 - if label == 0 { 1.0 } else { 0.0 }) * inv_n;
        d_logits[bn * 2 + 1] = T::from_f64(p1 - if label == 1 { 1.0 } else { 0.0 }) * inv_n;
    }
    (loss / n as f64, d_logits, hits)
}

/// SGD training loop. Single-threaded and deterministic: the only
/// randomness is the per-epoch index shuffle drawn from `shuffle_seed`.
/// Per-epoch `loss` and `train_acc` are running statistics over the
/// training batches; `test_acc` is evaluated after each epoch.
pub fn train<T: Element>(
    model: &mut ToyModel<T>,
    train_data: &FreqDataset<T>,
    test_data: &FreqDataset<T>,
    opts: &TrainOptions,
) -> std::result::Result<TrainLog, Diverged> {
    assert!(opts.batch >= 1, "batch size must be >= 1");
    let n = train_data.len();
    let c = model.channels();
    let mut log = TrainLog::default();
    let mut shuffle_rng = Rng64::new(opts.shuffle_seed);
    let lr = T::from_f64(opts.lr);

    for epoch in 0..opts.epochs {
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = shuffle_rng.below(i as u64 + 1) as usize;
            order.swap(i, j);
        }

        let mut epoch_loss = 0.0f64;
        let mut epoch_hits = 0usize;
        for chunk in order.chunks(opts.batch) {
            let (images, labels) = gather_batch(train_data, chunk).expect("batch gather");
            let expanded = model.expand_channels(&images).expect("channel expand");
            let mixed = model.mixer.forward(&expanded).expect("mixer forward");
            let pooled = ToyModel::<T>::pool(&mixed);
            let logits = model.logits_from_pooled(&pooled, chunk.len());
            let (loss, d_logits, hits) = softmax_ce(&logits, &labels);
            if !loss.is_finite() {
                return Err(Diverged { epoch, completed: log });
            }
            epoch_loss += loss * chunk.len() as f64;
            epoch_hits += hits;

            // head backward + update
            let (_, _, h, w) = mixed.shape();
            let mut d_pooled = vec![T::zero(); chunk.len() * c];
            for bn in 0..chunk.len() {
                for ch in 0..c {
                    let mut acc = T::zero();
                    for class in 0..2 {
                        acc = acc + d_logits[bn * 2 + class] * model.head_weight[ch * 2 + class];
                    }
                    d_pooled[bn * c + ch] = acc;
                }
            }
            for ch in 0..c {
                for class in 0..2 {
                    let mut acc = T::zero();
                    for bn in 0..chunk.len() {
                        acc = acc + pooled[bn * c + ch] * d_logits[bn * 2 + class];
                    }
                    model.head_weight[ch * 2 + class] =
                        model.head_weight[ch * 2 + class] - lr * acc;
                }
            }
            for class in 0..2 {
                let mut acc = T::zero();
                for bn in 0..chunk.len() {
                    acc = acc + d_logits[bn * 2 + class];
                }
                model.head_bias[class] = model.head_bias[class] - lr * acc;
            }

            // mixer backward + update through the pooling broadcast
            let plane = h * w;
            let spread = T::from_f64(1.0 / plane as f64);
            let mut d_mixed = Tensor4::zeros(chunk.len(), c, h, w).expect("gradient alloc");
            for (i, &g) in d_pooled.iter().enumerate() {
                d_mixed.data_mut()[i * plane..][..plane].fill(g * spread);
            }
            model
                .mixer
                .train_step(&expanded, &d_mixed, lr)
                .expect("mixer train step");
        }

        let test_acc = model.accuracy(test_data).expect("test evaluation");
        log.epochs.push(EpochStats {
            epoch,
            loss: epoch_loss / n as f64,
            train_acc: epoch_hits as f64 / n as f64,
            test_acc,
        });
    }
    Ok(log)
}
