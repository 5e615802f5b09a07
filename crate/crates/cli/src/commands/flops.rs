//! `wtconv flops`: print the multiply-accumulate cost model.

use wtconv_core::analysis::{approx_millions, flop_report, flops_depthwise};

use crate::common::{usage, CliResult};

pub fn run(channels: u64, kernel: u64, size: u64, levels: u32, stride: u64) -> CliResult<()> {
    if channels == 0 || kernel == 0 || size == 0 || stride == 0 {
        return Err(usage("channels, kernel, size, and stride must be >= 1"));
    }
    if stride > 1 && levels > 0 {
        return Err(usage(
            "stride > 1 applies to the plain depth-wise cost only; the layer itself is stride 1 (set levels = 0)",
        ));
    }
    if levels > 0 && !size.is_multiple_of(1 << levels) {
        return Err(usage(format!(
            "size {size} is not divisible by 2^{levels}"
        )));
    }

    println!("channels={channels} kernel={kernel}x{kernel} input={size}x{size} levels={levels} stride={stride}");
    if stride > 1 {
        let macs = flops_depthwise(channels, kernel, kernel, size, size, stride, stride);
        println!("conv MACs  : {macs} ({})", approx_millions(macs));
        return Ok(());
    }

    let report = flop_report(channels, kernel, size, size, levels);
    println!(
        "conv MACs  : {} ({})",
        report.conv_flops,
        approx_millions(report.conv_flops)
    );
    println!("  base     : {}", report.base_conv_flops());
    for (i, macs) in report.per_level.iter().enumerate() {
        println!("  level {}  : {macs}", i + 1);
    }
    println!("wt MACs    : {}", report.wt_flops);
    println!("iwt MACs   : {}", report.iwt_flops);
    println!(
        "wt+iwt     : {} ({})",
        report.wt_flops + report.iwt_flops,
        approx_millions(report.wt_flops + report.iwt_flops)
    );
    println!(
        "total      : {} ({})",
        report.total,
        approx_millions(report.total)
    );
    Ok(())
}
