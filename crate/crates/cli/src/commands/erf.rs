//! `wtconv erf`: probe the effective receptive field of a layer stack and
//! write the map as binary PGM and CSV.
//!
//! Probe images are uniform random in `[-1, 1)` with seeds `image-seed + i`.
//! A stack deeper than one layer re-initializes each layer with seed
//! `seed + layer_index`.

use std::fs::File;
use std::io::BufWriter;

use wtconv_core::analysis::{erf_map, ErfMap};
use wtconv_core::grad::{Mixer, PlainDepthwise};
use wtconv_core::tensor::{Element, Tensor4};
use wtconv_core::wtconv::WtConvParams;

use crate::common::{
    load_params, read_config, run_err, usage, validate_output_path, CliResult,
};
use crate::config::{ConfigDoc, LayerConfig, Precision, Section};

struct ErfConfig {
    images: usize,
    image_size: usize,
    stack: usize,
    image_seed: u64,
    plain_mixer: bool,
}

impl ErfConfig {
    fn from_section(mut section: Section, layer: &LayerConfig) -> CliResult<Self> {
        let images = section.usize_or("images", 8)?;
        let image_size = section.usize_or("image-size", 128)?;
        let stack = section.usize_or("stack", 1)?;
        let image_seed = match section.take("image-seed") {
            None => layer.seed + 1,
            Some(raw) => raw
                .parse()
                .map_err(|_| usage(format!("[erf] `image-seed = {raw}` is not an integer")))?,
        };
        let plain_mixer = match section.take("mixer").as_deref() {
            None | Some("wtconv") => false,
            Some("plain") => true,
            Some(other) => {
                return Err(usage(format!(
                    "[erf] `mixer = {other}` must be `wtconv` or `plain`"
                )))
            }
        };
        section.ensure_consumed()?;
        if images == 0 || image_size == 0 || stack == 0 {
            return Err(usage("[erf] images, image-size, and stack must be >= 1"));
        }
        Ok(ErfConfig { images, image_size, stack, image_seed, plain_mixer })
    }
}

pub fn run(config_path: &str) -> CliResult<()> {
    let text = read_config(config_path)?;
    let mut doc = ConfigDoc::parse(&text)?;
    let layer = LayerConfig::from_doc(&mut doc)?;
    let erf = ErfConfig::from_section(doc.take_section("erf")?, &layer)?;
    let mut output = doc.take_section("output")?;
    let pgm_path = output.require("pgm")?;
    let csv_path = output.require("csv")?;
    output.ensure_consumed()?;
    doc.ensure_consumed()?;

    validate_output_path(&pgm_path)?;
    validate_output_path(&csv_path)?;
    if erf.stack > 1 && layer.params_file.is_some() {
        return Err(usage("params-file cannot seed a stack deeper than one layer"));
    }

    let map = match layer.precision {
        Precision::F64 => probe::<f64>(&layer, &erf)?,
        Precision::F32 => probe::<f32>(&layer, &erf)?,
    };

    let mut pgm = BufWriter::new(File::create(&pgm_path).map_err(run_err)?);
    map.write_pgm(&mut pgm).map_err(run_err)?;
    let mut csv = BufWriter::new(File::create(&csv_path).map_err(run_err)?);
    map.write_csv(&mut csv).map_err(run_err)?;

    let (h, w) = map.extents();
    println!("map extents  : {h}x{w} -> {pgm_path}, {csv_path}");
    match map.support_bbox() {
        Some((y0, x0, y1, x1)) => println!(
            "support box  : rows {y0}..={y1}, cols {x0}..={x1} ({}x{})",
            y1 - y0 + 1,
            x1 - x0 + 1
        ),
        None => println!("support box  : empty"),
    }
    Ok(())
}

fn probe<T: Element>(layer: &LayerConfig, erf: &ErfConfig) -> CliResult<ErfMap> {
    let mut wavelet_layers: Vec<WtConvParams<T>> = Vec::new();
    let mut plain_layers: Vec<PlainDepthwise<T>> = Vec::new();
    if erf.plain_mixer {
        for i in 0..erf.stack {
            plain_layers.push(
                PlainDepthwise::init(layer.channels, layer.kernel, layer.seed + i as u64, layer.init)
                    .map_err(usage)?,
            );
        }
    } else if erf.stack == 1 {
        wavelet_layers.push(load_params::<T>(layer)?);
    } else {
        for i in 0..erf.stack {
            let mut cfg = layer.clone();
            cfg.seed += i as u64;
            wavelet_layers.push(load_params::<T>(&cfg)?);
        }
    }
    let stack: Vec<&dyn Mixer<T>> = if erf.plain_mixer {
        plain_layers.iter().map(|l| l as &dyn Mixer<T>).collect()
    } else {
        wavelet_layers.iter().map(|l| l as &dyn Mixer<T>).collect()
    };

    let images: Vec<Tensor4<T>> = (0..erf.images)
        .map(|i| {
            Tensor4::random_uniform(
                1,
                layer.channels,
                erf.image_size,
                erf.image_size,
                T::from_f64(-1.0),
                T::from_f64(1.0),
                erf.image_seed + i as u64,
            )
        })
        .collect::<Result<_, _>>()
        .map_err(run_err)?;

    erf_map(&stack, &images).map_err(|e| e.into())
}
