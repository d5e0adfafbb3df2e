//! CSV writers. Rates and probabilities are written with 9 significant
//! digits, `.` as decimal separator and a header row.

use std::io::Write;

use pacdmc_core::RatePmf;

use crate::montecarlo::{SweepRow, TrialRecord};

pub const EXACT_CDF_HEADER: [&str; 3] = ["rate_bits", "prob", "cdf"];
pub const ALPHA_SWEEP_HEADER: [&str; 5] =
    ["alpha", "success_prob", "std_error", "uncertified", "method"];
pub const VSEE_MC_HEADER: [&str; 5] = ["trial", "lm_rate_bits", "R_bits", "success", "status"];

/// `x` rounded to 9 significant digits, in plain or scientific notation.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if (-5..15).contains(&magnitude) {
        let decimals = (8 - magnitude).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // A carry such as 9.999999999 -> 10.00000000 adds a digit; that is
        // still 9 significant digits of the rounded value.
        trim_zeros(s)
    } else {
        format!("{x:.8e}")
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".to_owned()
    } else {
        t.to_owned()
    }
}

pub fn write_exact_cdf<W: Write>(out: W, pmf: &RatePmf) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(EXACT_CDF_HEADER)?;
    for (atom, (_, cum)) in pmf.atoms().iter().zip(pmf.cdf()) {
        w.write_record([sig9(atom.rate), sig9(atom.prob), sig9(cum)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_alpha_sweep<W: Write>(out: W, rows: &[SweepRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ALPHA_SWEEP_HEADER)?;
    for r in rows {
        w.write_record([
            sig9(r.alpha),
            sig9(r.success_prob),
            sig9(r.std_error),
            sig9(r.uncertified),
            r.method.as_str().to_owned(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_vsee_trials<W: Write>(out: W, records: &[TrialRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(VSEE_MC_HEADER)?;
    for r in records {
        w.write_record([
            r.trial.to_string(),
            sig9(r.lm_rate),
            r.rate.map(sig9).unwrap_or_default(),
            match r.success {
                Some(true) => "1".to_owned(),
                Some(false) => "0".to_owned(),
                None => String::new(),
            },
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
