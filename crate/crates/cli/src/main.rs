//! Command-line surface for the wavelet-domain depth-wise convolution
//! layer. Exit codes: 0 on success, 1 on suite/assertion/runtime failure,
//! 2 on usage or config errors.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wtconv_cli::commands;
use wtconv_cli::common::CliResult;

// the training loop and the dense oracles churn through large short-lived
// tensors; the system allocator spends more time faulting pages in and out
// than the kernels spend computing
#[global_allocator]
static ALLOC: mimalloc::MiMalloc = mimalloc::MiMalloc;

#[derive(Parser)]
#[command(name = "wtconv", version, about = "Depth-wise convolution in a cascaded Haar-wavelet domain: run, verify, analyze, train")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suites and print a pass/fail line per suite
    Check {
        /// Only run suites whose name starts with this prefix (e.g. `wavelet`)
        #[arg(long)]
        suite: Option<String>,
        /// Flip one sign in the Haar bank to demonstrate fault detection
        #[arg(long, hide = true)]
        fault_haar_sign: bool,
    },
    /// Print the multiply-accumulate cost model for one configuration
    Flops {
        #[arg(short, long, default_value_t = 1)]
        channels: u64,
        /// Spatial kernel extent
        #[arg(short, long)]
        kernel: u64,
        /// Square input extent
        #[arg(short = 'n', long)]
        size: u64,
        #[arg(short, long, default_value_t = 0)]
        levels: u32,
        /// Stride for the plain depth-wise cost (levels must be 0)
        #[arg(short, long, default_value_t = 1)]
        stride: u64,
    },
    /// Run one layer forward pass over a tensor dump
    Forward {
        #[arg(long)]
        config: String,
        /// Input tensor dump (.f32t / .f64t per the config's precision)
        #[arg(long)]
        input: String,
        /// Output tensor dump path
        #[arg(long)]
        output: String,
    },
    /// Probe the effective receptive field; writes PGM and CSV maps
    Erf {
        #[arg(long)]
        config: String,
    },
    /// Train the toy frequency classifier; writes CSV log and checkpoint
    Train {
        #[arg(long)]
        config: String,
    },
    /// Describe a layer configuration or parameter file
    Info {
        #[arg(long)]
        config: Option<String>,
        /// Existing parameter file to describe instead of a config
        #[arg(long)]
        params: Option<String>,
        /// Also print the cost model at this square input extent
        #[arg(long)]
        size: Option<u64>,
    },
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Check { suite, fault_haar_sign } => {
            commands::check::run(suite.as_deref(), fault_haar_sign)
        }
        Command::Flops { channels, kernel, size, levels, stride } => {
            commands::flops::run(channels, kernel, size, levels, stride)
        }
        Command::Forward { config, input, output } => {
            commands::forward::run(&config, &input, &output)
        }
        Command::Erf { config } => commands::erf::run(&config),
        Command::Train { config } => commands::train::run(&config),
        Command::Info { config, params, size } => {
            commands::info::run(config.as_deref(), params.as_deref(), size)
        }
    }
}

fn main() -> ExitCode {
    // die quietly when the read end of a pipe closes (e.g. `wtconv info | head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}
