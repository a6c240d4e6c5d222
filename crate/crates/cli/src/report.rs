//! `report <DIR>`: summarize a finished run and emit gnuplot-ready data.

use anyhow::{bail, Context, Result};
use std::path::Path;

pub fn report(dir: &Path) -> Result<bool> {
    let report_path = dir.join("report.json");
    let series_path = dir.join("series.csv");
    let mut missing = Vec::new();
    if !report_path.is_file() {
        missing.push("report.json");
    }
    if !series_path.is_file() {
        missing.push("series.csv");
    }
    if !missing.is_empty() {
        bail!(
            "{} is missing {}; run `subdiff run <config> --out {}` first",
            dir.display(),
            missing.join(" and "),
            dir.display()
        );
    }

    let text = std::fs::read_to_string(&report_path)?;
    let doc: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", report_path.display()))?;
    let name = doc["name"].as_str().unwrap_or("?");
    let claims = doc["claims"]
        .as_array()
        .context("report.json has no claims array")?;

    println!("{name}");
    println!("{:-<78}", "");
    println!("{:<40} {:>12} {:>12} {:>6}", "claim", "target", "measured", "pass");
    let mut all_pass = true;
    for c in claims {
        let pass = c["pass"].as_bool().unwrap_or(false);
        all_pass &= pass;
        println!(
            "{:<40} {:>12.4e} {:>12.4e} {:>6}",
            c["name"].as_str().unwrap_or("?"),
            c["target"].as_f64().unwrap_or(f64::NAN),
            c["measured"].as_f64().unwrap_or(f64::NAN),
            if pass { "ok" } else { "FAIL" }
        );
    }
    println!("{:-<78}", "");
    println!("overall: {}", if all_pass { "pass" } else { "FAIL" });

    // gnuplot data: strip the header, turn commas into whitespace
    let csv = std::fs::read_to_string(&series_path)?;
    let mut plot = String::new();
    for line in csv.lines().skip(1) {
        plot.push_str(&line.replace(',', " "));
        plot.push('\n');
    }
    let plot_path = dir.join("plot.dat");
    std::fs::write(&plot_path, plot)?;
    println!("wrote {} (plot with: plot '{}' using 1:2)", plot_path.display(), plot_path.display());
    Ok(all_pass)
}
