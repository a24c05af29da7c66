//! Check of `E₀(t_n) ≤ C′·e^{−c′(t_n − t_m)}·E₀(t_m)` over all pairs `m ≤ n`.
//!
//! With `Φ_k = ln E₀(t_k) + c′ t_k`, the worst pair ending at `n` is the one
//! minimizing `Φ_m`, so a running minimum gives the check in one pass.

use crate::spectral::Certificate;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub passed: bool,
    /// Number of samples `n` with a violating partner `m`.
    pub violations: usize,
    /// `max E₀(t_n) / (C′e^{−c′(t_n−t_m)}E₀(t_m))` over all pairs.
    pub worst_ratio: f64,
    pub worst_step: usize,
    pub worst_reference: usize,
    /// Samples too small to be represented with full precision.
    pub unresolved: usize,
}

/// Checks sampled energies. Zero samples are exact; subnormal samples carry
/// too little precision to be checked and are only counted in `unresolved`.
pub fn check_decay_bound(times: &[f64], e0: &[f64], cert: &Certificate, slack: f64) -> BoundCheck {
    let mut unresolved = 0;
    let ln: alloc::vec::Vec<f64> = e0
        .iter()
        .map(|&e| {
            if e == 0.0 {
                f64::NEG_INFINITY
            } else if e < f64::MIN_POSITIVE {
                unresolved += 1;
                f64::NAN
            } else {
                libm::log(e)
            }
        })
        .collect();
    let mut c = check_decay_bound_log(times, &ln, cert, slack);
    c.unresolved = unresolved;
    c
}

/// Same check on `ln E₀`; `−∞` marks an exactly vanishing energy and `NaN`
/// a sample to skip.
pub fn check_decay_bound_log(times: &[f64], ln_e0: &[f64], cert: &Certificate, slack: f64) -> BoundCheck {
    let ln_c = libm::log(cert.prefactor);
    let mut best = BoundCheck {
        passed: true,
        violations: 0,
        worst_ratio: 0.0,
        worst_step: 0,
        worst_reference: 0,
        unresolved: 0,
    };
    let mut min_phi = f64::INFINITY;
    let mut argmin = 0;
    let mut zero_seen: Option<usize> = None;
    for (n, (&t, &ln_e)) in times.iter().zip(ln_e0).enumerate() {
        if ln_e.is_nan() {
            continue;
        }
        if ln_e == f64::NEG_INFINITY {
            zero_seen.get_or_insert(n);
            continue;
        }
        let phi = ln_e + cert.rate * t;
        let (ratio, reference) = match zero_seen {
            // energy reappeared after vanishing exactly
            Some(m) => (f64::INFINITY, m),
            None => {
                if phi < min_phi {
                    min_phi = phi;
                    argmin = n;
                }
                (libm::exp(phi - min_phi - ln_c), argmin)
            }
        };
        if !(ratio <= 1.0 + slack) {
            best.violations += 1;
            best.passed = false;
        }
        if ratio > best.worst_ratio || ratio.is_nan() {
            best.worst_ratio = ratio;
            best.worst_step = n;
            best.worst_reference = reference;
        }
    }
    best
}
