//! `report.json`: one summary per run. Everything that varies between
//! otherwise identical runs lives under `timestamp`.

use std::collections::BTreeMap;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use trapchain_core::approx::{PolyApproximant, Synthesis};
use trapchain_core::scaffold::ConstraintCheck;
use trapchain_core::verify::{CertStatus, InclusionCertificate};

use crate::error::CliError;
use crate::pipeline::{OrbitCheck, RunConfig, ScaffoldChecks};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timestamp {
    pub unix_seconds: u64,
    /// Wall time per stage.
    pub stage_seconds: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaffoldSummary {
    pub valid: bool,
    pub nersesjan: bool,
    /// Failing checks of either kind.
    pub failures: Vec<ConstraintCheck>,
}

impl ScaffoldSummary {
    pub fn new(c: &ScaffoldChecks) -> Self {
        ScaffoldSummary {
            valid: c.validation.passed(),
            nersesjan: c.nersesjan.passed(),
            failures: c.validation.failures().chain(c.nersesjan.failures()).cloned().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthesisSummary {
    pub degree: usize,
    pub worst_ratio: f64,
    pub errors: BTreeMap<String, f64>,
    pub degrees_tried: Vec<usize>,
    /// Proven bound on |f2| over the w-range in use.
    pub f2_bound: f64,
}

impl SynthesisSummary {
    pub fn new(s: &Synthesis, f2: &PolyApproximant) -> Self {
        SynthesisSummary {
            degree: s.approximant.degree,
            worst_ratio: s.attempts.last().map_or(f64::NAN, |a| a.worst_ratio),
            errors: s.approximant.errors.clone(),
            degrees_tried: s.attempts.iter().map(|a| a.degree).collect(),
            f2_bound: f2.errors.get("R").copied().unwrap_or(0.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateSummary {
    pub source: String,
    pub target: String,
    pub status: CertStatus,
    pub boxes_examined: u64,
    pub max_depth: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub exit_code: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<RunConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaffold: Option<ScaffoldSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthesis: Option<SynthesisSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub certificates: Vec<CertificateSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub all_certified: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub graph: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub orbits: Vec<OrbitCheck>,
    pub timestamp: Timestamp,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.into(),
            timestamp: Timestamp {
                unix_seconds: SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map_or(0, |d| d.as_secs()),
                stage_seconds: BTreeMap::new(),
            },
            ..Default::default()
        }
    }

    pub fn set_certificates(&mut self, certs: &[InclusionCertificate]) {
        self.certificates = certs
            .iter()
            .map(|c| CertificateSummary {
                source: c.source.clone(),
                target: c.target.clone(),
                status: c.status,
                boxes_examined: c.boxes_examined,
                max_depth: c.max_depth,
            })
            .collect();
        self.all_certified = Some(certs.iter().all(|c| c.status == CertStatus::Certified));
    }

    pub fn finish(&mut self, err: Option<&CliError>) {
        match err {
            None => {
                self.exit_code = 0;
                self.error = None;
            }
            Some(e) => {
                self.exit_code = e.exit_code();
                self.error = Some(e.to_string());
            }
        }
    }

    /// The report with the volatile fields cleared.
    pub fn stable(&self) -> Report {
        Report {
            timestamp: Timestamp::default(),
            ..self.clone()
        }
    }
}
