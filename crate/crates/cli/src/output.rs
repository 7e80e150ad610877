//! Result files: CSV curves, JSON metadata, and a gnuplot recipe.
//!
//! The CSV is byte-deterministic for a given (config, seed): one row per
//! (method, SNR point), methods in configuration order, SNR ascending in
//! grid order, floats in Rust's shortest round-trip form.

use crate::config::ConfigFile;
use hermit_core::montecarlo::BerCurve;
use std::fmt::Write as _;

/// Renders the sweep results as CSV with the columns
/// `method,snr_db,bits,bit_errors,ber,ci_low,ci_high`.
pub fn render_csv(curves: &[BerCurve]) -> String {
    let mut out = String::from("method,snr_db,bits,bit_errors,ber,ci_low,ci_high\n");
    for curve in curves {
        for p in &curve.points {
            let (lo, hi) = p.wilson_ci();
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                curve.method.label(),
                p.snr_db,
                p.bits_total,
                p.bit_errors,
                p.ber(),
                lo,
                hi
            )
            .expect("string writes cannot fail");
        }
    }
    out
}

/// Sidecar metadata: resolved config, ADC statistics for the configured
/// resolution, crate versions, parallelism, and wall time.
pub fn render_metadata(
    config: &ConfigFile,
    jobs: usize,
    wall_time_s: f64,
) -> Result<String, crate::CliError> {
    let step = hermit_core::converter::optimal_step_size(config.adc_bits)?;
    let (gamma, distortion) = hermit_core::converter::bussgang_characterize(config.adc_bits, step);
    let doc = serde_json::json!({
        "config": config,
        "adc": {
            "bits": config.adc_bits,
            "step": step,
            "bussgang_gain": gamma,
            "distortion_var": distortion,
        },
        "versions": {
            "hermit-core": hermit_core_version(),
            "hermit-cli": env!("CARGO_PKG_VERSION"),
        },
        "jobs": jobs,
        "wall_time_s": wall_time_s,
    });
    serde_json::to_string_pretty(&doc)
        .map_err(|e| crate::CliError::Io(format!("metadata serialization: {e}")))
}

fn hermit_core_version() -> &'static str {
    // The workspace pins both crates to one version.
    env!("CARGO_PKG_VERSION")
}

/// Data-only plotting recipe (gnuplot) for the results CSV.
pub fn render_plot_recipe(curves: &[BerCurve]) -> String {
    let mut out = String::from(
        "# BER vs SNR from results.csv; render with: gnuplot plot.gp\n\
         set datafile separator ','\n\
         set logscale y\n\
         set xlabel 'SNR [dB]'\n\
         set ylabel 'uncoded BER'\n\
         set grid\n\
         set key bottom left\n\
         set terminal pngcairo size 900,650\n\
         set output 'ber.png'\n",
    );
    let clauses: Vec<String> = curves
        .iter()
        .map(|c| {
            format!(
                "'results.csv' using 2:(strcol(1) eq '{m}' ? column(5) : NaN) \
                 with linespoints title '{m}'",
                m = c.method.label()
            )
        })
        .collect();
    let _ = writeln!(out, "plot {}", clauses.join(", \\\n     "));
    out
}

/// Fixed-width BER table for stdout.
pub fn render_table(curves: &[BerCurve]) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:<12}", "method");
    if let Some(first) = curves.first() {
        for p in &first.points {
            let _ = write!(out, "{:>12}", format!("{} dB", p.snr_db));
        }
    }
    out.push('\n');
    for curve in curves {
        let _ = write!(out, "{:<12}", curve.method.label());
        for p in &curve.points {
            let _ = write!(out, "{:>12.3e}", p.ber());
        }
        out.push('\n');
    }
    out
}
