//! Runs a selection of checks through the batch driver with a persistent
//! cache and prints the report summary.

use hurwitz_toda::config::{Overrides, RunConfig};
use hurwitz_toda::suite::run_suite;

fn main() -> hurwitz_toda::Result<()> {
    let cache_dir = std::env::temp_dir().join("hurwitz-toda-example-cache");
    let overrides = Overrides {
        checks: Some("exact,toda-field,reduction-numeric".into()),
        cache_dir: Some(cache_dir),
        reproducible: true,
        ..Default::default()
    };
    let config = RunConfig::load(None, &overrides).map_err(|e| hurwitz_toda::Error::Config(e.to_string()))?;
    let run = run_suite(&config)?;
    for check in &run.report.checks {
        println!("{:<14} {}", format!("{:?}", check.verdict), check.id);
    }
    let s = &run.report.summary;
    println!("\n{} checks, {} passed, {} failed, {} inconclusive; exit code {}", s.total, s.passed, s.failed, s.inconclusive, run.report.exit_code());
    if let Some(stats) = run.cache {
        println!("cache: {} hits, {} misses, {} writes", stats.hits, stats.misses, stats.writes);
    }
    Ok(())
}
