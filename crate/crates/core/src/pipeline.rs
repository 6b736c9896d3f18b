//! End-to-end runs shared by the command line and the acceptance suite.

use serde::Serialize;

use crate::certificate::{Certificate, Horizon, Status};
use crate::error::Result;
use crate::lambda_graph::{
    build_canonical_system, build_from_tables, build_lambda_sync_system, build_with_stability_recheck, check_lambda_condition_i,
    check_lambda_irreducible, structural_checks, verify_axioms, verify_presents, AxiomReport, LambdaGraphSystem, PresentsReport,
    StructuralReport,
};
use crate::language::Language;
use crate::matrix::{extract_matrix_systems, invariant_report, InvariantReport};
use crate::synchronization::{
    check_lambda_synchronizing, check_property_d, check_sync_condition_i, check_synchronized_irreducible, sync_tables,
};

/// Condition checks run on a build this many levels deeper than the
/// reported one.
pub const CONDITION_EXTRA_LEVELS: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub max_level: usize,
    pub max_word_len: usize,
    pub follower_horizon: usize,
    pub tail_len: usize,
    pub stability_recheck: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            max_level: 4,
            max_word_len: 8,
            follower_horizon: 8,
            tail_len: 8,
            stability_recheck: false,
        }
    }
}

impl RunConfig {
    pub fn horizon(&self) -> Horizon {
        Horizon::new(self.max_word_len, self.follower_horizon)
    }

    pub fn condition_level(&self) -> usize {
        self.max_level + CONDITION_EXTRA_LEVELS
    }
}

/// Worst status, ranking `Refuted` above `Inconclusive`.
pub fn overall_status<'a>(certs: impl IntoIterator<Item = &'a Certificate>) -> Status {
    let mut status = Status::Verified;
    for c in certs {
        match c.status {
            Status::Refuted => return Status::Refuted,
            Status::Inconclusive => status = Status::Inconclusive,
            Status::Verified => {}
        }
    }
    status
}

/// Property (D) and λ-synchronization.
pub fn check(oracle: &dyn Language, cfg: &RunConfig) -> Vec<Certificate> {
    let h = cfg.horizon();
    vec![check_property_d(oracle, h), check_lambda_synchronizing(oracle, h)]
}

#[derive(Clone, Debug, Serialize)]
pub struct BuildReport {
    #[serde(skip)]
    pub system: LambdaGraphSystem,
    pub axioms: AxiomReport,
    pub structure: StructuralReport,
    pub presents: PresentsReport,
}

impl BuildReport {
    /// Axioms, structure, presentation and (when requested) stability all hold.
    pub fn status(&self) -> Status {
        let sound = self.axioms.passed()
            && self.structure.failures.is_empty()
            && self.structure.embeds_in_canonical != Some(false)
            && self.presents.missing.is_empty()
            && self.presents.extra.is_empty();
        match (sound, self.system.provenance.stable) {
            (false, _) => Status::Refuted,
            (true, Some(false)) => Status::Inconclusive,
            _ => Status::Verified,
        }
    }
}

pub fn build(oracle: &dyn Language, cfg: &RunConfig) -> Result<BuildReport> {
    let system = if cfg.stability_recheck {
        build_with_stability_recheck(oracle, cfg.max_level, cfg.max_word_len, cfg.follower_horizon)?
    } else {
        build_lambda_sync_system(oracle, cfg.max_level, cfg.max_word_len, cfg.follower_horizon)?
    };
    let canonical = build_canonical_system(oracle, cfg.max_level, cfg.tail_len)?;
    Ok(BuildReport {
        axioms: verify_axioms(&system),
        structure: structural_checks(&system, Some(&canonical)),
        presents: verify_presents(&system, oracle, cfg.max_level)?,
        system,
    })
}

/// The four condition certificates of the simplicity theorem, from one
/// deeper build: λ-condition (I), λ-irreducibility, synchronizing condition
/// (I) and synchronized irreducibility.
pub fn conditions(oracle: &dyn Language, cfg: &RunConfig) -> Result<[Certificate; 4]> {
    let tables = sync_tables(oracle, cfg.condition_level(), cfg.max_word_len, cfg.follower_horizon)?;
    let g = build_from_tables(oracle, &tables)?;
    Ok([
        check_lambda_condition_i(&g),
        check_lambda_irreducible(&g),
        check_sync_condition_i(oracle, &tables),
        check_synchronized_irreducible(oracle, &tables),
    ])
}

pub fn invariants(oracle: &dyn Language, label: &str, cfg: &RunConfig) -> Result<InvariantReport> {
    let built = build(oracle, cfg)?;
    let (_, ms) = extract_matrix_systems(&built.system)?;
    let lambda_sync = check_lambda_synchronizing(oracle, cfg.horizon());
    let [cond_i, irreducible, sync_cond_i, sync_irreducible] = conditions(oracle, cfg)?;
    invariant_report(
        label,
        &built.system,
        &ms,
        vec![lambda_sync, cond_i, irreducible, sync_cond_i, sync_irreducible],
    )
}

/// Volume-entropy estimates closer than this count as equal.
pub const ENTROPY_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Match,
    Mismatch,
    /// A group sequence did not stabilize on one side.
    Unstable,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonRow {
    pub invariant: String,
    pub left: String,
    pub right: String,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct Comparison {
    pub left: String,
    pub right: String,
    pub rows: Vec<ComparisonRow>,
}

impl Comparison {
    pub fn verdict(&self) -> Verdict {
        let vs = self.rows.iter().map(|r| r.verdict);
        if vs.clone().any(|v| v == Verdict::Mismatch) {
            Verdict::Mismatch
        } else if vs.clone().any(|v| v == Verdict::Unstable) {
            Verdict::Unstable
        } else {
            Verdict::Match
        }
    }
}

pub fn compare_reports(a: &InvariantReport, b: &InvariantReport) -> Comparison {
    let mut rows = Vec::new();
    for ((name, x), (_, y)) in a.groups.named().into_iter().zip(b.groups.named()) {
        let verdict = match (x.stable(), y.stable()) {
            (Some(p), Some(q)) if p == q => Verdict::Match,
            (Some(_), Some(_)) => Verdict::Mismatch,
            _ => Verdict::Unstable,
        };
        rows.push(ComparisonRow {
            invariant: name.to_string(),
            left: x.render(),
            right: y.render(),
            verdict,
        });
    }
    let (x, y) = (a.volume_entropy.estimate(), b.volume_entropy.estimate());
    rows.push(ComparisonRow {
        invariant: "volume entropy".into(),
        left: format!("{x:.9}"),
        right: format!("{y:.9}"),
        verdict: if (x - y).abs() < ENTROPY_TOLERANCE {
            Verdict::Match
        } else {
            Verdict::Mismatch
        },
    });
    Comparison {
        left: a.oracle.clone(),
        right: b.oracle.clone(),
        rows,
    }
}
