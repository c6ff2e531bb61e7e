use std::collections::BTreeMap;

use geolen_core::family::GardinerReport;
use geolen_core::geodesic_ops::FormBoundsReport;
use geolen_core::resolvent::PdeResidual;
use geolen_core::variation::{SumLogReport, VariationReport};
use geolen_core::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

/// Bumped whenever the report or the table columns change.
pub const SCHEMA_VERSION: u32 = 1;

/// One audited check; `pass` iff `margin > budget`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub group: String,
    /// Geodesic word, empty for surface-wide checks.
    pub word: String,
    pub check: String,
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
    pub budget: f64,
    pub pass: bool,
}

impl CheckRow {
    /// `value ≤ bound`, with the margin `bound − value`.
    pub fn at_most(group: &str, word: &str, check: &str, value: f64, bound: f64) -> Self {
        Self::with_budget(group, word, check, value, bound, bound - value, 0.0)
    }

    pub fn with_budget(
        group: &str,
        word: &str,
        check: &str,
        value: f64,
        bound: f64,
        margin: f64,
        budget: f64,
    ) -> Self {
        Self {
            group: group.into(),
            word: word.into(),
            check: check.into(),
            value,
            bound,
            margin,
            budget,
            pass: margin > budget,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSummary {
    pub name: String,
    pub a: [f64; 4],
    pub b: [f64; 4],
    pub fn_params: Option<(f64, f64)>,
    pub cusp_width: f64,
    pub mesh_nodes: usize,
    pub mesh_area: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthRow {
    pub word: String,
    pub trace: f64,
    pub l_classical: f64,
    pub l_convention: f64,
    pub l_arclength: f64,
}

/// Samples along a geodesic for plotting.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub t: Vec<f64>,
    pub phi: Vec<f64>,
    pub a_abs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicResult {
    pub word: String,
    pub l_classical: f64,
    pub l_convention: f64,
    pub first_variation: Complex64,
    pub h: Option<Complex64>,
    pub h_alt: Option<Complex64>,
    pub h_uncertainty: Option<f64>,
    pub variation: Option<VariationReport>,
    pub profile: Option<Profile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorResults {
    pub identity_max_error: f64,
    pub line_resolvent_max_error: f64,
    pub form_bounds: Vec<FormBoundsReport>,
    pub form_constant_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolventResults {
    pub constant_max_error: f64,
    pub pde: PdeResidual,
    pub phi_integral: Complex64,
    pub wp_norm: Complex64,
    pub phi_max: f64,
    pub sup_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyResults {
    pub l_alpha: f64,
    pub tau: f64,
    pub checks: Vec<GardinerReport>,
    pub collar_coefficients: Vec<Complex64>,
    pub cocycle_coefficient: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config: RunConfig,
    pub surface: SurfaceSummary,
    pub lengths: Vec<LengthRow>,
    pub geodesics: Vec<GeodesicResult>,
    pub operators: Option<OperatorResults>,
    pub resolvent: Option<ResolventResults>,
    pub family: Option<FamilyResults>,
    pub sum_log: Option<SumLogReport>,
    pub checks: Vec<CheckRow>,
    /// Failures that stopped a group early.
    pub errors: Vec<String>,
    /// Wall-clock seconds per group; the only non-deterministic field.
    pub timings: BTreeMap<String, f64>,
    pub pass: bool,
}

impl RunReport {
    pub fn geodesic(&self, word: &str) -> Option<&GeodesicResult> {
        self.geodesics.iter().find(|g| g.word == word)
    }

    pub fn failed(&self) -> Vec<&CheckRow> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    /// The report with timings cleared, for reproducibility comparisons.
    pub fn without_timings(&self) -> Self {
        let mut r = self.clone();
        r.timings.clear();
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}
