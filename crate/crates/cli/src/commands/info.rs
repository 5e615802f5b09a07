//! `wtconv info`: describe a layer configuration or a parameter file.

use std::fs::File;
use std::io::{BufReader, Read};

use wtconv_core::analysis::{approx_millions, flop_report};
use wtconv_core::wtconv::{param_count, receptive_field, ParamCount, WtConvParams};

use crate::common::{
    load_params, read_config, usage, validate_input_path, CliResult,
};
use crate::config::{ConfigDoc, LayerConfig, Precision};

pub fn run(config_path: Option<&str>, params_path: Option<&str>, size: Option<u64>) -> CliResult<()> {
    let summary = match (config_path, params_path) {
        (Some(path), None) => {
            let text = read_config(path)?;
            let mut doc = ConfigDoc::parse(&text)?;
            let layer = LayerConfig::from_doc(&mut doc)?;
            doc.ensure_consumed()?;
            match layer.precision {
                Precision::F64 => describe(&load_params::<f64>(&layer)?, "f64"),
                Precision::F32 => describe(&load_params::<f32>(&layer)?, "f32"),
            }
        }
        (None, Some(path)) => {
            validate_input_path(path)?;
            describe_file(path)?
        }
        _ => return Err(usage("pass exactly one of --config or --params")),
    };

    println!("channels       : {}", summary.channels);
    println!("kernel         : {k}x{k}", k = summary.kernel);
    println!("levels         : {}", summary.levels);
    println!("element type   : {}", summary.dtype);
    println!(
        "receptive field: {rf}x{rf} (kernel x 2^levels)",
        rf = summary.receptive_field
    );
    let c = summary.count;
    println!(
        "parameters     : {} = base kernel {} + level kernels {} + scales {}",
        c.total(),
        c.base_kernel,
        c.level_kernels,
        c.base_scale + c.level_scales
    );
    if let Some(n) = size {
        if summary.levels > 0 && !n.is_multiple_of(1u64 << summary.levels) {
            return Err(usage(format!(
                "size {n} is not divisible by 2^{}",
                summary.levels
            )));
        }
        let report = flop_report(
            summary.channels as u64,
            summary.kernel as u64,
            n,
            n,
            summary.levels as u32,
        );
        println!(
            "cost at {n}x{n} : conv {} + wt/iwt {} = {} MACs ({})",
            report.conv_flops,
            report.wt_flops + report.iwt_flops,
            report.total,
            approx_millions(report.total)
        );
    }
    Ok(())
}

struct Summary {
    channels: usize,
    kernel: usize,
    levels: usize,
    dtype: &'static str,
    receptive_field: u64,
    count: ParamCount,
}

fn describe<T: wtconv_core::Element>(params: &WtConvParams<T>, dtype: &'static str) -> Summary {
    Summary {
        channels: params.channels(),
        kernel: params.kernel_extent(),
        levels: params.levels(),
        dtype,
        receptive_field: receptive_field(params),
        count: param_count(params),
    }
}

/// Sniff the element width from the header, then parse at that type.
fn describe_file(path: &str) -> CliResult<Summary> {
    let mut header = [0u8; 24];
    let mut file = File::open(path).map_err(usage)?;
    file.read_exact(&mut header)
        .map_err(|e| usage(format!("`{path}` is not a parameter file: {e}")))?;
    let width = u32::from_le_bytes(header[20..24].try_into().unwrap());

    let mut reader = BufReader::new(File::open(path).map_err(usage)?);
    match width {
        4 => Ok(describe(
            &WtConvParams::<f32>::read_from(&mut reader).map_err(usage)?,
            "f32",
        )),
        8 => Ok(describe(
            &WtConvParams::<f64>::read_from(&mut reader).map_err(usage)?,
            "f64",
        )),
        other => Err(usage(format!(
            "`{path}` declares unsupported element width {other}"
        ))),
    }
}
