//! `wtconv forward`: run one layer forward pass over a tensor dump.
//!
//! Inputs whose extents are not divisible by `2^levels` are mirror-padded
//! at ingestion and the output is cropped back, so the written dump always
//! matches the input shape.

use wtconv_core::tensor::Element;
use wtconv_core::wtconv::{self, param_count, receptive_field};

use crate::common::{
    load_params, read_config, read_tensor, run_err, validate_dump_suffix, validate_input_path,
    validate_output_path, write_tensor, CliResult,
};
use crate::config::{ConfigDoc, LayerConfig, Precision};
use crate::ingest::{crop, reflect_pad_to_multiple};

pub fn run(config_path: &str, input: &str, output: &str) -> CliResult<()> {
    let text = read_config(config_path)?;
    let mut doc = ConfigDoc::parse(&text)?;
    let layer = LayerConfig::from_doc(&mut doc)?;
    doc.ensure_consumed()?;

    validate_input_path(input)?;
    validate_output_path(output)?;
    validate_dump_suffix(input, layer.precision)?;
    validate_dump_suffix(output, layer.precision)?;

    match layer.precision {
        Precision::F64 => run_typed::<f64>(&layer, input, output),
        Precision::F32 => run_typed::<f32>(&layer, input, output),
    }
}

fn run_typed<T: Element>(layer: &LayerConfig, input: &str, output: &str) -> CliResult<()> {
    let params = load_params::<T>(layer)?;
    let x = read_tensor::<T>(input)?;
    let (n, c, h, w) = x.shape();
    if c != layer.channels {
        return Err(run_err(format!(
            "input has {c} channels, the layer expects {}",
            layer.channels
        )));
    }

    let padded = reflect_pad_to_multiple(&x, 1usize << layer.levels)?;
    let y = wtconv::forward(&padded, &params)?;
    let y = crop(&y, h, w)?;
    write_tensor(output, &y)?;

    let count = param_count(&params);
    println!("input shape   : {n}x{c}x{h}x{w} ({})", T::DTYPE);
    let (on, oc, oh, ow) = y.shape();
    println!("output shape  : {on}x{oc}x{oh}x{ow} -> {output}");
    println!(
        "receptive field: {rf}x{rf}",
        rf = receptive_field(&params)
    );
    println!(
        "parameters    : {} (base kernel {}, level kernels {}, scales {})",
        count.total(),
        count.base_kernel,
        count.level_kernels,
        count.base_scale + count.level_scales
    );
    Ok(())
}
