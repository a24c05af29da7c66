//! Backward-Euler trajectories with the energy ledger and the certified
//! bound check.

use alloc::vec::Vec;

use super::bound::{check_decay_bound_log, BoundCheck};
use super::compat::{CompatibilityAnalysis, CompatibilityReport};
use super::primitives::PrimitiveSolver;
use super::stepper::BackwardEuler;
use crate::complex::{damping_power, energy, modified_energy, ComplexSegment, PrimitivePair, State};
use crate::error::{Error, Result};
use crate::linalg::Tolerances;
use crate::spectral::Certificate;

/// How `(w_n, w*_n)` are advanced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PrimitiveUpdate {
    /// Re-solve the saddle system for `(u_n, u*_n)` at every step. The
    /// summed primitives satisfy that system exactly, so both updates agree
    /// in exact arithmetic, but this one stays accurate relative to the
    /// decaying state.
    #[default]
    Resolve,
    /// `w_n = w_{n−1} + τu_n`, `w*_n = w*_{n−1} + τu*_n` literally. The
    /// running sums keep an absolute roundoff error of order `ε‖w₀‖`.
    Recursion,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulateOptions {
    /// `δ` in `E_δ`; defaults to `δ**`. Must lie in `(0, δ*]`.
    pub delta: Option<f64>,
    /// Run incompatible initial data without `E_δ` and bound diagnostics
    /// instead of failing.
    pub allow_incompatible: bool,
    /// For compatible runs, project `u*_n` back onto the compatible subspace
    /// after each step. The exact iterates stay compatible, so this only
    /// removes roundoff that would otherwise accumulate in the conserved
    /// incompatible directions.
    pub reproject: bool,
    pub primitives: PrimitiveUpdate,
    pub tolerances: Tolerances,
}

impl Default for SimulateOptions {
    fn default() -> Self {
        Self {
            delta: None,
            allow_incompatible: false,
            reproject: true,
            primitives: PrimitiveUpdate::Resolve,
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub tau: f64,
    pub times: Vec<f64>,
    pub states: Vec<State>,
    /// Empty when the initial data is incompatible.
    pub primitives: Vec<PrimitivePair>,
    pub e0: Vec<f64>,
    /// `ln E₀`, evaluated on rescaled vectors so that it stays accurate
    /// after `E₀` itself underflows.
    pub log_e0: Vec<f64>,
    /// Empty when the initial data is incompatible.
    pub edelta: Vec<f64>,
    /// `E_δ / E₀`, scale invariant; `NaN` where `E₀ = 0`. Empty when the
    /// initial data is incompatible.
    pub edelta_ratio: Vec<f64>,
    pub damping: Vec<f64>,
    /// `C′e^{−c′t_n}E₀(0)`; empty when the initial data is incompatible.
    pub bound: Vec<f64>,
    /// `δ` used for `E_δ`, zero when not applicable.
    pub delta: f64,
    pub compatibility: CompatibilityReport,
    /// `None` when the certificate does not apply.
    pub bound_check: Option<BoundCheck>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn certificate_applicable(&self) -> bool {
        self.bound_check.is_some()
    }
}

/// Factorizations shared by many runs on one segment with one step size.
#[derive(Debug, Clone)]
pub struct Simulator {
    seg: ComplexSegment,
    stepper: BackwardEuler,
    analysis: CompatibilityAnalysis,
    primitives: PrimitiveSolver,
}

impl Simulator {
    pub fn new(seg: &ComplexSegment, tau: f64, tol: &Tolerances) -> Result<Self> {
        let analysis = CompatibilityAnalysis::new(seg, tol.kernel)?;
        Ok(Self {
            seg: seg.clone(),
            stepper: BackwardEuler::new(seg, tau)?,
            primitives: PrimitiveSolver::new(seg, analysis.kernel())?,
            analysis,
        })
    }

    pub fn analysis(&mut self) -> &mut CompatibilityAnalysis {
        &mut self.analysis
    }

    pub fn run(
        &mut self,
        s0: &State,
        n_steps: usize,
        cert: &Certificate,
        opts: &SimulateOptions,
    ) -> Result<Trajectory> {
        let seg = &self.seg;
        seg.check_state(s0)?;
        let tau = self.stepper.tau();
        let tol = &opts.tolerances;
        let compatibility = self.analysis.check(&s0.ustar)?;
        let compatible = compatibility.is_compatible(tol.compatibility);
        if !compatible && !opts.allow_incompatible {
            return Err(Error::IncompatibleInitialData {
                residual: compatibility.residual_norm,
                threshold: tol.compatibility * compatibility.ustar_norm,
            });
        }
        let delta = if compatible {
            let d = opts.delta.unwrap_or(cert.delta_double_star);
            if !(d > 0.0 && d <= cert.delta_star) {
                return Err(Error::InvalidDelta {
                    delta: d,
                    delta_star: cert.delta_star,
                });
            }
            d
        } else {
            0.0
        };

        let cap = n_steps + 1;
        let mut times = Vec::with_capacity(cap);
        let mut states = Vec::with_capacity(cap);
        let mut primitives = Vec::with_capacity(if compatible { cap } else { 0 });
        let mut e0 = Vec::with_capacity(cap);
        let mut log_e0 = Vec::with_capacity(cap);
        let mut edelta = Vec::with_capacity(if compatible { cap } else { 0 });
        let mut edelta_ratio = Vec::with_capacity(if compatible { cap } else { 0 });
        let mut damping = Vec::with_capacity(cap);

        let mut record = |n: usize, s: State, p: Option<PrimitivePair>| -> Result<()> {
            times.push(n as f64 * tau);
            let mut parts: Vec<&[f64]> = alloc::vec![&s.u, &s.ustar];
            if let Some(p) = &p {
                parts.push(&p.w);
                parts.push(&p.wstar);
            }
            let k = binary_exponent(&parts);
            let sc = libm::ldexp(1.0, -k);
            let ss = s.scaled(sc);
            let e0s = energy(seg, &ss)?;
            e0.push(libm::ldexp(e0s, 2 * k));
            log_e0.push(libm::log(e0s) + f64::from(2 * k) * core::f64::consts::LN_2);
            damping.push(libm::ldexp(damping_power(seg, &ss)?, 2 * k));
            if let Some(p) = p {
                let ps = PrimitivePair {
                    w: p.w.iter().map(|v| v * sc).collect(),
                    wstar: p.wstar.iter().map(|v| v * sc).collect(),
                };
                let eds = modified_energy(seg, &ss, &ps, delta)?;
                edelta.push(libm::ldexp(eds, 2 * k));
                edelta_ratio.push(if e0s > 0.0 { eds / e0s } else { f64::NAN });
                primitives.push(p);
            }
            states.push(s);
            Ok(())
        };

        let p0 = if compatible {
            Some(self.primitives.solve(s0)?)
        } else {
            None
        };
        let mut s = s0.clone();
        let mut p = p0.clone();
        record(0, s0.clone(), p0)?;
        for n in 1..=n_steps {
            let mut next = self.stepper.step(&s)?;
            if compatible && opts.reproject {
                next.ustar = self.analysis.project(&next.ustar)?;
            }
            if let Some(p) = p.as_mut() {
                match opts.primitives {
                    PrimitiveUpdate::Resolve => *p = self.primitives.solve(&next)?,
                    PrimitiveUpdate::Recursion => {
                        for (w, u) in p.w.iter_mut().zip(&next.u) {
                            *w += tau * u;
                        }
                        for (w, u) in p.wstar.iter_mut().zip(&next.ustar) {
                            *w += tau * u;
                        }
                    }
                }
            }
            s = next;
            record(n, s.clone(), p.clone())?;
        }

        let (bound, bound_check) = if compatible {
            let b = times.iter().map(|&t| cert.bound_factor(t) * e0[0]).collect();
            (b, Some(check_decay_bound_log(&times, &log_e0, cert, tol.bound_slack)))
        } else {
            (Vec::new(), None)
        };
        Ok(Trajectory {
            tau,
            times,
            states,
            primitives,
            e0,
            log_e0,
            edelta,
            edelta_ratio,
            damping,
            bound,
            delta,
            compatibility,
            bound_check,
        })
    }
}

/// Power-of-two exponent of the largest entry, 0 for all-zero input.
fn binary_exponent(parts: &[&[f64]]) -> i32 {
    let m = parts
        .iter()
        .flat_map(|p| p.iter())
        .fold(0.0f64, |m, v| m.max(libm::fabs(*v)));
    if m == 0.0 || !m.is_finite() {
        0
    } else {
        libm::frexp(m).1
    }
}

pub fn simulate(
    seg: &ComplexSegment,
    s0: &State,
    tau: f64,
    n_steps: usize,
    cert: &Certificate,
    opts: &SimulateOptions,
) -> Result<Trajectory> {
    Simulator::new(seg, tau, &opts.tolerances)?.run(s0, n_steps, cert, opts)
}
