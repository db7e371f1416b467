//! JSON report written by every command.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::construct::chain::Ratio;
use crate::construct::profile::{ProfileParams, ProfileStatus};
use crate::levelset::{LevelSetReport, LevelSpreads};
use crate::soliton::{MParam, ResidualReport, SolitonInstance};

/// Whether the checks of a run make a pass/fail claim.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Verify,
    /// Quantities are reported but nothing is claimed; the exit code is 0.
    Informational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceInfo {
    pub name: String,
    pub dim: usize,
    pub m: MParam,
    pub rho: f64,
    pub metric: String,
    pub potential: String,
}

impl InstanceInfo {
    pub fn of(inst: &SolitonInstance) -> Self {
        Self {
            name: inst.name.clone(),
            dim: inst.dim(),
            m: inst.params.m,
            rho: inst.params.rho,
            metric: inst.metric.describe(),
            potential: inst.potential.describe(),
        }
    }
}

/// A point where evaluation failed for a reason other than a critical point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointError {
    pub point: Vec<f64>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    /// `null` in informational mode
    pub pass: Option<bool>,
    pub mode: Mode,
    pub checks: usize,
    pub failed: usize,
    /// names of the failing checks, each listed once
    pub failing: Vec<String>,
    /// sample points skipped because `∇f` vanishes there
    pub skipped_critical: usize,
    pub errors: Vec<PointError>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileInfo {
    pub params: ProfileParams,
    pub status: ProfileStatus,
    pub nodes: usize,
    pub r_end: f64,
    pub min_sectional_curvature: f64,
    pub chain_coefficient: Ratio,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
}

/// One sampled level surface.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelEntry {
    pub value: f64,
    pub anchor: Vec<f64>,
    pub spreads: LevelSpreads,
    pub points: Vec<LevelSetReport>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Timings {
    pub total_ms: f64,
    pub phases_ms: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub version: String,
    pub command: String,
    pub instance: InstanceInfo,
    pub checks: Vec<ResidualReport>,
    pub summary: Summary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<LevelEntry>>,
    /// wall-clock only; excluded from the determinism guarantee
    pub timings: Timings,
}

impl Report {
    pub fn new(
        command: &str,
        instance: InstanceInfo,
        mode: Mode,
        checks: Vec<ResidualReport>,
        skipped_critical: usize,
        errors: Vec<PointError>,
    ) -> Self {
        let mut failing: Vec<String> = Vec::new();
        for c in checks.iter().filter(|c| !c.pass) {
            if !failing.contains(&c.name) {
                failing.push(c.name.clone());
            }
        }
        let failed = checks.iter().filter(|c| !c.pass).count();
        let pass = match mode {
            Mode::Verify => Some(failed == 0 && errors.is_empty()),
            Mode::Informational => None,
        };
        Self {
            version: crate::VERSION.to_string(),
            command: command.to_string(),
            instance,
            summary: Summary {
                pass,
                mode,
                checks: checks.len(),
                failed,
                failing,
                skipped_critical,
                errors,
            },
            checks,
            profile: None,
            levels: None,
            timings: Timings::default(),
        }
    }

    /// 0 on pass or in informational mode, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self.summary.pass {
            Some(false) => 1,
            _ => 0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}
