//! JSON report types for `--json` output. Field order is fixed by struct
//! order, so identical runs serialize byte-identically.

use pvzeta_core::arith::{LaurentRat, RatPoly};
use pvzeta_core::Rat;
use serde::Serialize;

pub fn rat_string(r: &Rat) -> String {
    if r.denom() == &pvzeta_core::Int::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn poly_strings(p: &RatPoly) -> Vec<String> {
    p.coeffs().iter().map(rat_string).collect()
}

#[derive(Serialize)]
pub struct CatalogEntryJson {
    pub id: String,
    pub dim: usize,
    pub invariant_degree: u32,
    pub density_shift: String,
    pub basic_invariant_terms: usize,
}

#[derive(Serialize)]
pub struct CatalogJson {
    pub spaces: Vec<CatalogEntryJson>,
}

#[derive(Serialize)]
pub struct EigencharJson {
    pub space: String,
    pub trials: u64,
    pub failures: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample_point: Option<Vec<String>>,
}

#[derive(Serialize)]
pub struct InvariantEvalJson {
    pub space: String,
    pub point: Vec<String>,
    pub value: String,
}

#[derive(Serialize)]
pub struct OrbitClassifyJson {
    pub space: String,
    pub field: String,
    pub point: Vec<i64>,
    pub label: String,
}

#[derive(Serialize)]
pub struct LfeRowJson {
    pub row: String,
    pub trials: u64,
    pub failures: u64,
}

#[derive(Serialize)]
pub struct LfeJson {
    pub rows: Vec<LfeRowJson>,
    pub total_failures: u64,
}

#[derive(Serialize)]
pub struct SweepJson {
    pub representative: Vec<i64>,
    pub field: String,
    pub trials: u64,
    pub base_label: String,
    pub label_changes: u64,
}

/// A rational function in t as coefficient lists (ascending degree), with a
/// possible power of t in front.
#[derive(Serialize)]
pub struct RationalFunctionJson {
    pub t_power: i64,
    pub num: Vec<String>,
    pub den: Vec<String>,
}

impl RationalFunctionJson {
    pub fn from_laurent(l: &LaurentRat) -> Self {
        RationalFunctionJson {
            t_power: l.shift,
            num: poly_strings(l.fun.num()),
            den: poly_strings(l.fun.den()),
        }
    }
}

#[derive(Serialize)]
pub struct ZetaJson {
    pub space: String,
    pub p: u64,
    pub zeta: RationalFunctionJson,
    pub holdout_verified: bool,
    pub validated_extras: usize,
    pub poles: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ansatz: Option<String>,
}

#[derive(Serialize)]
pub struct GammaJson {
    pub space: String,
    pub p: u64,
    pub gamma_t_power: i64,
    pub gamma_num: Vec<String>,
    pub gamma_den: Vec<String>,
    pub residual: f64,
    pub test_functions: usize,
    pub unconfirmed: bool,
    pub dual_shift: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_density_shift: Option<String>,
    pub half_density_folded: bool,
}

#[derive(Serialize)]
pub struct FourierCheckJson {
    pub trials: u64,
    pub seed: u64,
    pub max_involution_error: f64,
    pub max_plancherel_drift: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct ZetaRealJson {
    pub space: String,
    pub s: f64,
    pub sigma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orbit_filter: Option<String>,
    pub value: f64,
    pub est_error: f64,
    pub evals: u64,
}

#[derive(Serialize)]
pub struct GammaProbeJson {
    pub p: u64,
    pub signatures: Vec<String>,
    pub lambda_samples: Vec<f64>,
    pub residuals: Vec<f64>,
    pub skipped_samples: usize,
    pub truncation_bound: f64,
    pub test_functions: usize,
    pub m_trunc: u32,
}
