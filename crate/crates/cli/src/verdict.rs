use containment_core::{Assumption1Report, Assumption3Report, HullMargins, ValidationReport};
use serde::{Deserialize, Serialize};

pub const GAIN_CONDITION_LABEL: &str = "gain condition g4 ≥ n·η̄_c";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GainCondition {
    pub label: String,
    pub passed: bool,
    pub positive: bool,
    pub g4: f64,
    pub n: usize,
    pub eta_bar: f64,
    pub required_g4: f64,
    pub slack: f64,
}

/// Machine-readable outcome of `validate` and `run`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Verdict {
    pub assumption1: Assumption1Report,
    pub l1_positive_definite: bool,
    pub assumption2: bool,
    pub assumption3: Option<Assumption3Report>,
    pub gain_condition: GainCondition,
    pub margins: Option<HullMargins<f64>>,
    pub validation_passed: bool,
    pub validation_overridden: bool,
    pub failures: Vec<String>,
    pub simulated: bool,
    pub tol: Option<f64>,
    pub convergence_time: Option<f64>,
    pub final_xi_norm: Option<f64>,
    pub containment_final: Option<bool>,
    pub envelope_violations: Option<usize>,
    pub max_identity_residual: Option<f64>,
    pub diverged_at: Option<f64>,
    pub passed: bool,
}

impl Verdict {
    pub fn from_validation(report: &ValidationReport<f64>, g4: f64, n: usize, margins: Option<HullMargins<f64>>) -> Self {
        let failures = report.failures();
        let validation_passed = failures.is_empty();
        Self {
            assumption1: report.assumption1,
            l1_positive_definite: report.l1_positive_definite,
            assumption2: report.assumption2,
            assumption3: report.assumption3,
            gain_condition: GainCondition {
                label: GAIN_CONDITION_LABEL.to_string(),
                passed: report.gain_condition.passed,
                positive: report.gain_condition.positive,
                g4,
                n,
                eta_bar: report.eta_bar,
                required_g4: report.gain_condition.required_g4,
                slack: report.gain_condition.slack,
            },
            margins,
            validation_passed,
            validation_overridden: false,
            failures,
            simulated: false,
            tol: None,
            convergence_time: None,
            final_xi_norm: None,
            containment_final: None,
            envelope_violations: None,
            max_identity_residual: None,
            diverged_at: None,
            passed: validation_passed,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict serializes")
    }
}
