//! Least-squares exponential rate from sampled energies.

use core::ops::Range;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    /// Negated slope of `ln E` against `t`.
    pub rate: f64,
    /// `ln E` at `t = 0` on the fitted line.
    pub intercept: f64,
    pub r_squared: f64,
}

/// Fits `ln E ≈ intercept − rate·t` on `window`.
pub fn fit_decay_rate(times: &[f64], energies: &[f64], window: Range<usize>) -> Result<DecayFit> {
    if times.len() != energies.len() {
        return Err(Error::DimensionMismatch {
            what: "energy samples",
            expected: times.len(),
            found: energies.len(),
        });
    }
    let end = window.end.min(times.len());
    let start = window.start.min(end);
    let len = end - start;
    if len < 3 {
        return Err(Error::WindowTooShort { len });
    }
    if let Some(i) = (start..end).find(|&i| !(energies[i] > 0.0)) {
        return Err(Error::NonPositiveEnergy { index: i });
    }
    let n = len as f64;
    let (mut st, mut sy) = (0.0, 0.0);
    for i in start..end {
        st += times[i];
        sy += libm::log(energies[i]);
    }
    let (tm, ym) = (st / n, sy / n);
    let (mut stt, mut sty, mut syy) = (0.0, 0.0, 0.0);
    for i in start..end {
        let dt = times[i] - tm;
        let dy = libm::log(energies[i]) - ym;
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    if !(stt > 0.0) {
        return Err(Error::WindowTooShort { len });
    }
    let slope = sty / stt;
    let r_squared = if syy > 0.0 { (sty * sty) / (stt * syy) } else { 1.0 };
    Ok(DecayFit {
        rate: -slope,
        intercept: ym - slope * tm,
        r_squared,
    })
}
