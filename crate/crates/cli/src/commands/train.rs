//! `wtconv train`: train the toy frequency classifier, write the CSV log
//! and a checkpoint, print final accuracies.
//!
//! The test split draws from `seed + 1`. On divergence the partial log is
//! still written before the command exits nonzero.

use std::fs::File;
use std::io::BufWriter;

use wtconv_core::grad::{Mixer, PlainDepthwise};
use wtconv_core::tensor::Element;
use wtconv_core::toytrain::{
    generate_dataset, train, DatasetSpec, TaskKind, ToyModel, TrainLog, TrainOptions,
};
use wtconv_core::wtconv::WtConvParams;

use crate::common::{
    read_config, run_err, usage, validate_output_path, CliError, CliResult,
};
use crate::config::{ConfigDoc, LayerConfig, Precision, Section};

struct ModelConfig {
    plain_mixer: bool,
    head_seed: u64,
}

struct DataConfig {
    task: TaskKind,
    train: usize,
    test: usize,
    size: usize,
    noise: f64,
    seed: u64,
}

struct TrainConfig {
    epochs: usize,
    lr: f64,
    batch: usize,
    shuffle_seed: u64,
}

fn model_config(mut section: Section, layer: &LayerConfig) -> CliResult<ModelConfig> {
    let plain_mixer = match section.take("mixer").as_deref() {
        None | Some("wtconv") => false,
        Some("plain") => true,
        Some(other) => {
            return Err(usage(format!(
                "[model] `mixer = {other}` must be `wtconv` or `plain`"
            )))
        }
    };
    let head_seed = match section.take("head-seed") {
        None => layer.seed + 1,
        Some(raw) => raw
            .parse()
            .map_err(|_| usage(format!("[model] `head-seed = {raw}` is not an integer")))?,
    };
    section.ensure_consumed()?;
    Ok(ModelConfig { plain_mixer, head_seed })
}

fn data_config(mut section: Section) -> CliResult<DataConfig> {
    let task = match section.require("task")?.as_str() {
        "freq-separable" => TaskKind::FreqSeparable,
        "long-wavelength" => TaskKind::LongWavelength,
        other => {
            return Err(usage(format!(
                "[data] `task = {other}` must be `freq-separable` or `long-wavelength`"
            )))
        }
    };
    let train = section.require_usize("train")?;
    let test = section.require_usize("test")?;
    let size = section.require_usize("size")?;
    let noise = section.f64_or("noise", 0.0)?;
    let seed = section.require_u64("seed")?;
    section.ensure_consumed()?;
    Ok(DataConfig { task, train, test, size, noise, seed })
}

fn train_config(mut section: Section) -> CliResult<TrainConfig> {
    let epochs = section.require_usize("epochs")?;
    let lr = section.require_f64("lr")?;
    let batch = section.usize_or("batch", 32)?;
    let shuffle_seed = section.require_u64("shuffle-seed")?;
    section.ensure_consumed()?;
    if batch == 0 || epochs == 0 {
        return Err(usage("[train] epochs and batch must be >= 1"));
    }
    Ok(TrainConfig { epochs, lr, batch, shuffle_seed })
}

pub fn run(config_path: &str) -> CliResult<()> {
    let text = read_config(config_path)?;
    let mut doc = ConfigDoc::parse(&text)?;
    let layer = LayerConfig::from_doc(&mut doc)?;
    let model = model_config(doc.take_section("model")?, &layer)?;
    let data = data_config(doc.take_section("data")?)?;
    let hyper = train_config(doc.take_section("train")?)?;
    let mut output = doc.take_section("output")?;
    let log_path = output.require("log")?;
    let checkpoint_path = output.require("checkpoint")?;
    output.ensure_consumed()?;
    doc.ensure_consumed()?;

    validate_output_path(&log_path)?;
    validate_output_path(&checkpoint_path)?;
    if layer.params_file.is_some() {
        return Err(usage("training always starts from seeded initialization; drop params-file"));
    }

    match layer.precision {
        Precision::F64 => run_typed::<f64>(&layer, &model, &data, &hyper, &log_path, &checkpoint_path),
        Precision::F32 => run_typed::<f32>(&layer, &model, &data, &hyper, &log_path, &checkpoint_path),
    }
}

fn write_log(path: &str, log: &TrainLog) -> CliResult<()> {
    let mut writer = BufWriter::new(File::create(path).map_err(run_err)?);
    log.write_csv(&mut writer).map_err(run_err)
}

fn run_typed<T: Element>(
    layer: &LayerConfig,
    model_cfg: &ModelConfig,
    data: &DataConfig,
    hyper: &TrainConfig,
    log_path: &str,
    checkpoint_path: &str,
) -> CliResult<()> {
    let train_set = generate_dataset::<T>(&DatasetSpec {
        task: data.task,
        count: data.train,
        h: data.size,
        w: data.size,
        noise: data.noise,
        seed: data.seed,
    })?;
    let test_set = generate_dataset::<T>(&DatasetSpec {
        task: data.task,
        count: data.test,
        h: data.size,
        w: data.size,
        noise: data.noise,
        seed: data.seed + 1,
    })?;

    let mixer: Box<dyn Mixer<T>> = if model_cfg.plain_mixer {
        Box::new(
            PlainDepthwise::init(layer.channels, layer.kernel, layer.seed, layer.init)
                .map_err(usage)?,
        )
    } else {
        Box::new(
            WtConvParams::init(layer.channels, layer.kernel, layer.levels, layer.seed, layer.init)
                .map_err(usage)?,
        )
    };
    let mut model = ToyModel::new(mixer, model_cfg.head_seed);

    let opts = TrainOptions {
        epochs: hyper.epochs,
        lr: hyper.lr,
        batch: hyper.batch,
        shuffle_seed: hyper.shuffle_seed,
    };
    let log = match train(&mut model, &train_set, &test_set, &opts) {
        Ok(log) => log,
        Err(diverged) => {
            write_log(log_path, &diverged.completed)?;
            return Err(CliError::Run(diverged.to_string()));
        }
    };

    write_log(log_path, &log)?;
    let mut ckpt = BufWriter::new(File::create(checkpoint_path).map_err(run_err)?);
    model.write_to(&mut ckpt).map_err(run_err)?;

    let last = log.epochs.last().expect("at least one epoch");
    println!(
        "mixer        : {}",
        if model_cfg.plain_mixer { "plain depth-wise" } else { "wavelet layer" }
    );
    println!("epochs       : {} -> {log_path}", log.epochs.len());
    println!("final loss   : {}", last.loss);
    println!("train acc    : {}", last.train_acc);
    println!("test acc     : {}", last.test_acc);
    println!("checkpoint   : {checkpoint_path}");
    Ok(())
}
