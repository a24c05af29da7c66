//! JSON documents written by the runner.

use dampwave_core::evolution::{BoundCheck, CompatibilityReport, DecayFit};
use dampwave_core::ConstantsReport;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsJson {
    pub c_beta: f64,
    #[serde(rename = "C_beta")]
    pub big_c_beta: f64,
    #[serde(rename = "C_P")]
    pub c_p: f64,
    pub delta_star: f64,
    pub delta_double_star: f64,
    #[serde(rename = "C_prime")]
    pub c_prime_factor: f64,
    pub c_prime: f64,
    pub kernel_dim: usize,
    pub poincare_variant_dhd: f64,
}

impl From<&ConstantsReport> for ConstantsJson {
    fn from(r: &ConstantsReport) -> Self {
        Self {
            c_beta: r.beta_lower,
            big_c_beta: r.beta_upper,
            c_p: r.poincare,
            delta_star: r.delta_star(),
            delta_double_star: r.delta_double_star(),
            c_prime_factor: r.prefactor(),
            c_prime: r.rate(),
            kernel_dim: r.kernel_dim,
            poincare_variant_dhd: r.poincare_dhd,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelJson {
    pub kind: String,
    pub n1: usize,
    pub n2: usize,
}

/// Output of the `constants` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsDocument {
    pub model: ModelJson,
    pub constants: ConstantsJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunJson {
    pub tau: f64,
    pub steps: usize,
    pub t_final: f64,
    pub initial: String,
    pub project_initial: bool,
    pub delta: f64,
    pub tolerances: TolerancesJson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TolerancesJson {
    pub kernel: f64,
    pub compatibility: f64,
    pub bound_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompatibilityJson {
    pub residual_norm: f64,
    pub ustar_norm: f64,
    pub compatible: bool,
    pub conserved_moments: Vec<f64>,
    pub persistent_energy: f64,
}

impl CompatibilityJson {
    pub fn new(r: &CompatibilityReport, tol: f64) -> Self {
        Self {
            residual_norm: r.residual_norm,
            ustar_norm: r.ustar_norm,
            compatible: r.is_compatible(tol),
            conserved_moments: r.conserved_moments.clone(),
            persistent_energy: r.persistent_energy(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitJson {
    pub rate: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Sample indices `[start, end)`.
    pub window: [usize; 2],
}

impl FitJson {
    pub fn new(f: &DecayFit, window: [usize; 2]) -> Self {
        Self {
            rate: f.rate,
            intercept: f.intercept,
            r_squared: f.r_squared,
            window,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

impl Verdict {
    pub fn exit_code(self) -> u8 {
        match self {
            Self::Fail => 2,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundJson {
    pub violations: usize,
    /// Largest `E0(t_n) / (C'·exp(−c'(t_n − t_m))·E0(t_m))` over `m ≤ n`.
    pub worst_ratio: f64,
    pub worst_step: usize,
    pub worst_reference: usize,
    pub unresolved: usize,
    pub slack: f64,
}

impl BoundJson {
    pub fn new(b: &BoundCheck, slack: f64) -> Self {
        Self {
            violations: b.violations,
            worst_ratio: b.worst_ratio,
            worst_step: b.worst_step,
            worst_reference: b.worst_reference,
            unresolved: b.unresolved,
            slack,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleJson {
    pub t: f64,
    /// Energy norm `sqrt(2 E0)` of the reference state.
    pub reference_norm: f64,
    /// Energy norm of the difference to the last backward-Euler state.
    pub error_norm: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyJson {
    pub initial: f64,
    #[serde(rename = "final")]
    pub last: f64,
    pub ln_final: f64,
}

/// Output of the `simulate` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub model: ModelJson,
    pub constants: ConstantsJson,
    pub run: RunJson,
    pub compatibility: CompatibilityJson,
    pub energy: EnergyJson,
    pub fit: Option<FitJson>,
    pub certificate: Verdict,
    pub bound_check: Option<BoundJson>,
    pub oracle: Option<OracleJson>,
}

/// Output of the `check-decay` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub samples: usize,
    pub certificate: Verdict,
    pub bound_check: Option<BoundJson>,
}
