//! `wtconv check`: run the verification suites and print one line each.

use wtconv_checks::{suites, CheckConfig};
use wtconv_core::wavelet::HaarFilterBank;

use crate::common::{usage, CliError, CliResult};

pub fn run(suite_filter: Option<&str>, fault_haar_sign: bool) -> CliResult<()> {
    let mut bank = HaarFilterBank::<f64>::haar();
    if fault_haar_sign {
        bank.hh[0][0] = -bank.hh[0][0];
    }
    let cfg = CheckConfig { bank, ..CheckConfig::default() };

    let selected: Vec<&'static str> = suites::suite_names()
        .into_iter()
        .filter(|name| match suite_filter {
            None => true,
            Some(prefix) => name.starts_with(prefix),
        })
        .collect();
    if selected.is_empty() {
        return Err(usage(format!(
            "no suite matches `{}`; available: {}",
            suite_filter.unwrap_or_default(),
            suites::suite_names().join(", ")
        )));
    }

    let mut failed = 0usize;
    for name in &selected {
        let outcome = suites::run_suite(name, &cfg).expect("registered suite");
        let status = if outcome.passed { "PASS" } else { "FAIL" };
        println!(
            "{status}  {:<24} {:>5} cases  {}",
            outcome.name, outcome.cases, outcome.detail
        );
        if !outcome.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(CliError::Run(format!(
            "{failed} of {} suites failed",
            selected.len()
        )));
    }
    println!("all {} suites passed", selected.len());
    Ok(())
}
