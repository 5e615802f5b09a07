//! Shared command plumbing: exit-code buckets, parameter loading, tensor
//! file I/O with suffix checks.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use wtconv_core::tensor::{Element, Tensor4};
use wtconv_core::wtconv::WtConvParams;
use wtconv_core::Error;

use crate::config::{LayerConfig, Precision};

/// Failures bucketed by exit code: usage/config problems exit 2,
/// suite/assertion/runtime problems exit 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Run(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Run(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(msg) | CliError::Run(msg) => msg,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Config/validation-stage failure (before any work or writes).
pub fn usage(err: impl std::fmt::Display) -> CliError {
    CliError::Usage(err.to_string())
}

/// Work-stage failure.
pub fn run_err(err: impl std::fmt::Display) -> CliError {
    CliError::Run(err.to_string())
}

/// Pre-work path checks: inputs must exist, output directories must exist.
pub fn validate_input_path(path: &str) -> CliResult<()> {
    if !Path::new(path).is_file() {
        return Err(usage(format!("input file `{path}` does not exist")));
    }
    Ok(())
}

pub fn validate_output_path(path: &str) -> CliResult<()> {
    let parent = Path::new(path).parent().unwrap_or_else(|| Path::new("."));
    if !(parent.as_os_str().is_empty() || parent.is_dir()) {
        return Err(usage(format!(
            "output directory `{}` does not exist",
            parent.display()
        )));
    }
    Ok(())
}

/// Tensor dumps carry their element width in the file suffix.
pub fn validate_dump_suffix(path: &str, precision: Precision) -> CliResult<()> {
    let want = precision.dump_suffix();
    if !path.ends_with(&format!(".{want}")) {
        return Err(usage(format!(
            "`{path}` does not end in .{want}; tensor dumps carry the element width in their suffix"
        )));
    }
    Ok(())
}

pub fn read_config(path: &str) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config `{path}`: {e}")))
}

/// Initialize from the config, or load the configured parameter file and
/// cross-check its geometry against the config.
pub fn load_params<T: Element>(layer: &LayerConfig) -> CliResult<WtConvParams<T>> {
    match &layer.params_file {
        None => WtConvParams::init(layer.channels, layer.kernel, layer.levels, layer.seed, layer.init)
            .map_err(usage),
        Some(path) => {
            validate_input_path(path)?;
            let mut reader = BufReader::new(File::open(path).map_err(usage)?);
            let params = WtConvParams::<T>::read_from(&mut reader).map_err(usage)?;
            if params.channels() != layer.channels
                || params.kernel_extent() != layer.kernel
                || params.levels() != layer.levels
            {
                return Err(usage(format!(
                    "parameter file `{path}` holds c={} k={} levels={}, config says c={} k={} levels={}",
                    params.channels(),
                    params.kernel_extent(),
                    params.levels(),
                    layer.channels,
                    layer.kernel,
                    layer.levels
                )));
            }
            Ok(params)
        }
    }
}

pub fn read_tensor<T: Element>(path: &str) -> CliResult<Tensor4<T>> {
    let mut reader = BufReader::new(File::open(path).map_err(run_err)?);
    Tensor4::read_from(&mut reader).map_err(|e| run_err(format!("reading `{path}`: {e}")))
}

pub fn write_tensor<T: Element>(path: &str, tensor: &Tensor4<T>) -> CliResult<()> {
    let mut writer = BufWriter::new(File::create(path).map_err(run_err)?);
    tensor
        .write_to(&mut writer)
        .map_err(|e| run_err(format!("writing `{path}`: {e}")))
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        match err {
            Error::Format(_) | Error::Param(_) => CliError::Usage(err.to_string()),
            other => CliError::Run(other.to_string()),
        }
    }
}
