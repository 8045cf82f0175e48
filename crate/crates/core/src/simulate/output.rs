//! CSV and JSON emission for experiment results. All numeric output is
//! printed with 6 significant digits so repeated runs are byte-stable.

use std::io::Write;

use crate::simulate::ExperimentResult;

/// Formats with 6 significant digits in plain decimal notation.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn sig6_value(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(sig6(x).parse().expect("sig6 emits valid floats"))
        .map(serde_json::Value::Number)
        .unwrap_or(serde_json::Value::Null)
}

/// Per-frame rows (`replication, frame, mechanism, welfare, utilization,
/// jain_running`) followed by one summary row per replication and
/// mechanism, with `frame = "summary"`.
pub fn write_frames_csv<W: Write>(
    result: &ExperimentResult,
    writer: W,
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "replication",
        "frame",
        "mechanism",
        "welfare",
        "utilization",
        "jain_running",
    ])?;
    for rep in &result.replications {
        for frame in 0..result.frames {
            for run in &rep.mechanisms {
                let report = &run.frames[frame];
                w.write_record([
                    rep.replication.to_string(),
                    frame.to_string(),
                    run.mechanism.to_string(),
                    sig6(report.social_welfare),
                    report.utilization.to_string(),
                    sig6(report.jain_index),
                ])?;
            }
        }
        for run in &rep.mechanisms {
            let s = &run.summary;
            w.write_record([
                rep.replication.to_string(),
                "summary".to_string(),
                run.mechanism.to_string(),
                sig6(s.mean_welfare),
                sig6(s.mean_utilization),
                sig6(s.jain_index),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Experiment-level summary with per-user price/utility means when the
/// topology is shared across replications.
pub fn summary_json(result: &ExperimentResult) -> serde_json::Value {
    let per_user = |values: &Option<Vec<f64>>| match values {
        Some(v) => serde_json::Value::Array(v.iter().map(|&x| sig6_value(x)).collect()),
        None => serde_json::Value::Null,
    };
    let mechanisms: Vec<serde_json::Value> = result
        .summary
        .per_mechanism
        .iter()
        .map(|m| {
            serde_json::json!({
                "mechanism": m.mechanism.as_str(),
                "mean_welfare": sig6_value(m.mean_welfare),
                "mean_utilization": sig6_value(m.mean_utilization),
                "mean_jain": sig6_value(m.mean_jain),
                "per_user_mean_price": per_user(&m.per_user_mean_price),
                "per_user_mean_utility": per_user(&m.per_user_mean_utility),
            })
        })
        .collect();
    serde_json::json!({
        "master_seed": result.master_seed,
        "frames": result.frames,
        "replications": result.replications.len(),
        "mechanisms": mechanisms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig6_formats_six_significant_digits() {
        assert_eq!(sig6(25.0), "25.0000");
        assert_eq!(sig6(0.9), "0.900000");
        assert_eq!(sig6(123456.7), "123457");
        assert_eq!(sig6(19.000001), "19.0000");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(-3.25), "-3.25000");
        assert_eq!(sig6(1.0), "1.00000");
    }

    #[test]
    fn sig6_round_trips_through_f64() {
        for &x in &[25.0, 0.9, 1.0 / 3.0, 19.123456789, 1e-3] {
            let s = sig6(x);
            let parsed: f64 = s.parse().unwrap();
            assert!((parsed - x).abs() <= x.abs() * 1e-5 + 1e-12, "{x} -> {s}");
        }
    }
}
