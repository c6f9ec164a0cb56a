//! CSV emission.
//!
//! Floats are written with Rust's shortest round-trip formatting, flags as
//! `0`/`1`, and absent values as empty fields.

use std::io::Write;

use crate::scenario::{AggregateStats, TrialRecord};

pub const SWEEP_HEADER: [&str; 8] = [
    "sweep_value",
    "scheme",
    "mean_sum_rate",
    "mean_rate_user1",
    "mean_rate_user2",
    "outage_prob_user1",
    "outage_prob_user2",
    "trials",
];

pub const OUTAGE_HEADER: [&str; 5] = [
    "sweep_value",
    "scheme",
    "outage_prob_user1",
    "outage_prob_user2",
    "trials",
];

pub const SINGLE_HEADER: [&str; 15] = [
    "trial",
    "scheme",
    "user1_x",
    "user1_y",
    "user2_x",
    "user2_y",
    "gain_user1",
    "gain_user2",
    "case",
    "alpha_s",
    "rate_user1",
    "rate_user2",
    "sum_rate",
    "outage_user1",
    "outage_user2",
];

fn num(v: f64) -> String {
    format!("{v}")
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

/// One row per (sweep value, scheme), sweep values in input order.
pub fn write_sweep_csv<W: Write>(out: W, rows: &[(f64, AggregateStats)]) -> crate::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for (value, stats) in rows {
        for s in &stats.schemes {
            w.write_record([
                num(*value),
                s.scheme.name().to_string(),
                num(s.mean_sum_rate),
                num(s.mean_rate_user1),
                num(s.mean_rate_user2),
                num(s.outage_prob_user1),
                num(s.outage_prob_user2),
                s.trials.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_outage_csv<W: Write>(out: W, rows: &[(f64, AggregateStats)]) -> crate::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(OUTAGE_HEADER)?;
    for (value, stats) in rows {
        for s in &stats.schemes {
            w.write_record([
                num(*value),
                s.scheme.name().to_string(),
                num(s.outage_prob_user1),
                num(s.outage_prob_user2),
                s.trials.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Full per-scheme dump of one trial.
pub fn write_single_csv<W: Write>(out: W, record: &TrialRecord) -> crate::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SINGLE_HEADER)?;
    for r in &record.results {
        w.write_record([
            record.trial_index.to_string(),
            r.scheme.name().to_string(),
            num(r.positions[0].x),
            num(r.positions[0].y),
            num(r.positions[1].x),
            num(r.positions[1].y),
            num(r.gains[0]),
            num(r.gains[1]),
            r.case_label
                .map(|c| c.label().to_string())
                .unwrap_or_default(),
            r.alpha_s.map(num).unwrap_or_default(),
            num(r.rate_user1),
            num(r.rate_user2),
            num(r.sum_rate),
            flag(r.outage_user1).to_string(),
            flag(r.outage_user2).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
