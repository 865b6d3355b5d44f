//! Seeded batch verification of the algebra, every family and every
//! rank-3 variant.
//!
//! [`run_suite`] returns one [`CheckRecord`] per configured check. A check
//! whose numbers contradict the published rank of a family is reported as
//! [`Status::Discrepancy`] rather than a failure; [`Status::Fail`] is
//! reserved for violated algebraic properties.

use serde::Serialize;

use crate::algebra::{assemble, compose, disassemble, is_real_conditions, numeric_rank, scale_of};
use crate::document::params_json;
use crate::error::Error;
use crate::families::{
    closure_check_with, construct_with, membership_with, rank1_restrict, rank_profile_with,
    ConstraintDescriptor, DescriptorTable, FamilyConstants, FamilyInstance, FamilyTag,
};
use crate::rank3::{
    random_variant, table_consistency, variant_constraints, variant_residual, VariantId,
};
use crate::sampling::{random_constant, random_params, rng_from_seed, sub_seed, SampleRng};
use crate::types::{Mat4, ParamSet};

/// Bound on the relative error of the multiplication law.
pub const HOMOMORPHISM_TOL: f64 = 1e-10;
/// Bound on `‖disassemble(assemble(p)) − p‖ / ‖p‖`.
pub const BIJECTION_TOL: f64 = 1e-14;
/// Bound on relative imaginary parts of real-mode products.
pub const REALITY_TOL: f64 = 1e-10;
/// Bound on recovered-constant errors in the round-trip check.
pub const ROUNDTRIP_TOL: f64 = 1e-8;
/// Bound on the zero pattern of products of rank-3 members.
pub const VARIANT_CLOSURE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Default)]
pub enum Selection<T> {
    #[default]
    All,
    Only(Vec<T>),
}

impl<T: PartialEq> Selection<T> {
    pub fn includes(&self, x: &T) -> bool {
        match self {
            Selection::All => true,
            Selection::Only(v) => v.contains(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub samples: usize,
    /// Membership and rank tolerance.
    pub tol: f64,
    pub families: Selection<FamilyTag>,
    pub variants: Selection<VariantId>,
    /// Real constants and reality-conditioned bases.
    pub real_mode: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 42,
            samples: 100,
            tol: crate::algebra::DEFAULT_TOL,
            families: Selection::All,
            variants: Selection::All,
            real_mode: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Discrepancy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subject: Option<String>,
    pub status: Status,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed_rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claimed_rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    fn new(check: &'static str, subject: Option<String>, samples: usize) -> Self {
        CheckRecord {
            check,
            subject,
            status: Status::Pass,
            samples,
            worst_residual: None,
            observed_rank: None,
            claimed_rank: None,
            counterexample: None,
            note: None,
        }
    }

    fn bounded(mut self, worst: f64, bound: f64) -> Self {
        self.worst_residual = Some(worst);
        if !(worst <= bound) {
            self.status = Status::Fail;
        }
        self
    }

    fn fail(mut self, note: impl Into<String>) -> Self {
        self.status = Status::Fail;
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FindingsReport {
    pub records: Vec<CheckRecord>,
}

impl FindingsReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.with_status(Status::Fail)
    }

    pub fn discrepancies(&self) -> impl Iterator<Item = &CheckRecord> {
        self.with_status(Status::Discrepancy)
    }

    fn with_status(&self, s: Status) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(move |r| r.status == s)
    }

    /// No check failed. Discrepancies count as passing.
    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn find(&self, check: &str, subject: Option<&str>) -> Option<&CheckRecord> {
        self.records
            .iter()
            .find(|r| r.check == check && r.subject.as_deref() == subject)
    }

    /// One JSON object per line.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("plain data serializes"));
            out.push('\n');
        }
        out
    }

    /// `"N checks: P pass, D discrepancy, F fail"`.
    pub fn summary(&self) -> String {
        let count = |s| self.with_status(s).count();
        format!(
            "{} checks: {} pass, {} discrepancy, {} fail",
            self.records.len(),
            count(Status::Pass),
            count(Status::Discrepancy),
            count(Status::Fail)
        )
    }
}

/// Runs the suite against the standard descriptor tables.
pub fn run_suite(cfg: &SuiteConfig) -> FindingsReport {
    run_suite_with(cfg, DescriptorTable::standard())
}

/// Runs the suite against `table`, which may have been altered with
/// [`DescriptorTable::with_fault`].
pub fn run_suite_with(cfg: &SuiteConfig, table: &DescriptorTable) -> FindingsReport {
    let samples = cfg.samples.max(1);
    let rng = |label: &str| rng_from_seed(sub_seed(cfg.seed, label));
    let mut records = vec![
        homomorphism(samples, &mut rng("homomorphism"), cfg.real_mode),
        bijection(samples, &mut rng("bijection"), cfg.real_mode),
        reality_closure(samples, &mut rng("reality_closure")),
    ];

    for tag in FamilyTag::ALL.into_iter().filter(|t| cfg.families.includes(t)) {
        let desc = table.get(tag);
        let label = |check: &str| format!("{check}/{tag}");
        records.push(family_closure(desc, cfg, samples, &mut rng(&label("family_closure"))));
        records.push(family_roundtrip(desc, cfg, samples, &mut rng(&label("family_roundtrip"))));
        records.push(rank_record(desc, cfg, samples, &mut rng(&label("rank_profile"))));
        if tag.generic_rank() == 2 {
            records.push(rank_one(desc, cfg, samples, &mut rng(&label("rank1_restriction"))));
        }
    }

    for id in VariantId::all().filter(|v| cfg.variants.includes(v)) {
        let label = |check: &str| format!("{check}/{id}");
        records.extend(variant_checks(id, cfg, samples, &label, &rng));
    }

    FindingsReport { records }
}

fn homomorphism(samples: usize, rng: &mut SampleRng, real: bool) -> CheckRecord {
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let left = random_params(rng, real);
        let right = random_params(rng, real);
        let dense = assemble(&left) * assemble(&right);
        let law = assemble(&compose(&left, &right));
        worst = worst.max((law - dense).norm() / scale_of(dense.norm()));
    }
    CheckRecord::new("homomorphism", None, samples).bounded(worst, HOMOMORPHISM_TOL)
}

fn bijection(samples: usize, rng: &mut SampleRng, real: bool) -> CheckRecord {
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let p = random_params(rng, real);
        let back = disassemble(&assemble(&p));
        worst = worst.max((back - p).norm() / scale_of(p.norm()));
    }
    CheckRecord::new("bijection", None, samples).bounded(worst, BIJECTION_TOL)
}

fn relative_imag(g: &Mat4) -> f64 {
    g.max_imag() / scale_of(g.norm())
}

fn reality_closure(samples: usize, rng: &mut SampleRng) -> CheckRecord {
    let mut worst = 0.0f64;
    let mut rec = CheckRecord::new("reality_closure", None, samples);
    for _ in 0..samples {
        let left = random_params(rng, true);
        let right = random_params(rng, true);
        let product = compose(&left, &right);
        worst = worst.max(relative_imag(&assemble(&product)));
        if !is_real_conditions(&product, REALITY_TOL) {
            rec.counterexample = Some(pair_json(&left, &right));
            return rec.fail("product violates the reality conditions");
        }
    }
    rec.bounded(worst, REALITY_TOL)
}

fn pair_json(left: &ParamSet, right: &ParamSet) -> serde_json::Value {
    serde_json::json!({ "left": params_json(left), "right": params_json(right) })
}

fn constants_for(desc: &ConstraintDescriptor, rng: &mut SampleRng, real: bool) -> FamilyConstants {
    let mut out = FamilyConstants::new();
    for &c in &desc.constants {
        out.set(c, random_constant(rng, real));
    }
    out
}

fn family_closure(
    desc: &ConstraintDescriptor,
    cfg: &SuiteConfig,
    samples: usize,
    rng: &mut SampleRng,
) -> CheckRecord {
    let rec = CheckRecord::new("family_closure", Some(desc.tag.to_string()), samples);
    let constants = constants_for(desc, rng, cfg.real_mode);
    match closure_check_with(desc, &constants, samples, rng, cfg.tol, cfg.real_mode) {
        Ok(report) => {
            let rec = rec.bounded(report.worst_residual, cfg.tol);
            if cfg.real_mode && report.worst_imag > REALITY_TOL {
                return rec.fail(format!(
                    "real-mode matrix with imaginary part {:.3e}",
                    report.worst_imag
                ));
            }
            rec
        }
        Err(Error::ClosureViolation {
            residual,
            left,
            right,
            ..
        }) => {
            let mut rec = rec.fail("product left the family");
            rec.worst_residual = Some(residual);
            rec.counterexample = Some(pair_json(&left, &right));
            rec
        }
        Err(e) => rec.fail(e.to_string()),
    }
}

fn family_roundtrip(
    desc: &ConstraintDescriptor,
    cfg: &SuiteConfig,
    samples: usize,
    rng: &mut SampleRng,
) -> CheckRecord {
    let rec = CheckRecord::new("family_roundtrip", Some(desc.tag.to_string()), samples);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let constants = constants_for(desc, rng, cfg.real_mode);
        let inst = FamilyInstance::random_with(desc.tag, constants, rng, cfg.real_mode);
        let p = match construct_with(desc, &constants, &inst.base) {
            Ok(p) => p,
            Err(e) => return rec.fail(e.to_string()),
        };
        let Some(m) = membership_with(desc, &p, cfg.tol) else {
            return rec.fail("constructed member not recognized");
        };
        worst = worst.max(m.residual);
        for (c, v) in constants.iter() {
            let err = match m.recovered.get(c) {
                Some(r) => (r - v).norm() / v.norm(),
                None => f64::INFINITY,
            };
            worst = worst.max(err);
        }
    }
    rec.bounded(worst, ROUNDTRIP_TOL.max(cfg.tol))
}

fn rank_record(
    desc: &ConstraintDescriptor,
    cfg: &SuiteConfig,
    samples: usize,
    rng: &mut SampleRng,
) -> CheckRecord {
    let tag = desc.tag;
    let mut rec = CheckRecord::new("rank_profile", Some(tag.to_string()), samples);
    let observed = rank_profile_with(desc, samples, rng, cfg.real_mode);
    rec.observed_rank = Some(observed);
    rec.claimed_rank = Some(tag.paper_rank());
    if observed != tag.generic_rank() {
        return rec.fail(format!("expected generic rank {}", tag.generic_rank()));
    }
    if observed != tag.paper_rank() {
        rec.status = Status::Discrepancy;
        rec.note = Some(format!(
            "published rank {} contradicts observed rank {observed}",
            tag.paper_rank()
        ));
    }
    rec
}

fn rank_one(
    desc: &ConstraintDescriptor,
    cfg: &SuiteConfig,
    samples: usize,
    rng: &mut SampleRng,
) -> CheckRecord {
    let mut rec = CheckRecord::new("rank1_restriction", Some(desc.tag.to_string()), samples);
    let mut worst_rank = 0;
    let mut worst_imag = 0.0f64;
    for _ in 0..samples {
        let constants = constants_for(desc, rng, cfg.real_mode);
        let inst = FamilyInstance::random_with(desc.tag, constants, rng, cfg.real_mode);
        let restricted = match rank1_restrict(&inst) {
            Ok(r) => r,
            Err(e) => return rec.fail(e.to_string()),
        };
        let g = match construct_with(desc, &restricted.constants, &restricted.base) {
            Ok(p) => assemble(&p),
            Err(e) => return rec.fail(e.to_string()),
        };
        worst_rank = worst_rank.max(numeric_rank(&g, cfg.tol));
        worst_imag = worst_imag.max(relative_imag(&g));
    }
    rec.observed_rank = Some(worst_rank);
    if worst_rank > 1 {
        return rec.fail("restricted member has rank above 1");
    }
    if cfg.real_mode && worst_imag > REALITY_TOL {
        return rec.fail(format!("real-mode matrix with imaginary part {worst_imag:.3e}"));
    }
    rec
}

fn variant_checks(
    id: VariantId,
    cfg: &SuiteConfig,
    samples: usize,
    label: &dyn Fn(&str) -> String,
    rng: &dyn Fn(&str) -> SampleRng,
) -> Vec<CheckRecord> {
    let subject = Some(id.to_string());
    let constraints = variant_constraints(id);

    let mut r = rng(&label("variant_zero_pattern"));
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let g = assemble(&random_variant(id, &mut r, cfg.real_mode));
        worst = worst.max(variant_residual(id, &g));
        if cfg.real_mode {
            worst = worst.max(relative_imag(&g));
        }
    }
    let zero_pattern = CheckRecord::new("variant_zero_pattern", subject.clone(), samples)
        .bounded(worst, f64::EPSILON);

    let mut r = rng(&label("variant_closure"));
    let mut worst = 0.0f64;
    let mut counterexample = None;
    for _ in 0..samples {
        let left = random_variant(id, &mut r, cfg.real_mode);
        let right = random_variant(id, &mut r, cfg.real_mode);
        let product = compose(&left, &right);
        let g = assemble(&product);
        let mut res = variant_residual(id, &g).max(constraints.residual(&product));
        if cfg.real_mode {
            res = res.max(relative_imag(&g));
        }
        if res > worst {
            worst = res;
            if res > VARIANT_CLOSURE_TOL && counterexample.is_none() {
                counterexample = Some(pair_json(&left, &right));
            }
        }
    }
    let mut closure =
        CheckRecord::new("variant_closure", subject.clone(), samples).bounded(worst, VARIANT_CLOSURE_TOL);
    closure.counterexample = counterexample;

    let mut r = rng(&label("variant_rank"));
    let observed = (0..samples)
        .map(|_| numeric_rank(&assemble(&random_variant(id, &mut r, cfg.real_mode)), cfg.tol))
        .max()
        .unwrap_or(0);
    let mut rank = CheckRecord::new("variant_rank", subject.clone(), samples);
    rank.observed_rank = Some(observed);
    rank.claimed_rank = Some(3);
    if observed != 3 {
        rank = rank.fail("generic rank differs from 3");
    }

    let check = table_consistency(id, &mut rng(&label("variant_table")));
    let mut table = CheckRecord::new("variant_table", subject, 20).bounded(check.residual, f64::EPSILON);
    if !check.equivalent {
        table = table.fail("published equations differ from the zero-pattern definition");
    }

    vec![zero_pattern, closure, rank, table]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(families: Vec<FamilyTag>) -> SuiteConfig {
        SuiteConfig {
            samples: 5,
            families: Selection::Only(families),
            variants: Selection::Only(vec![VariantId::new(1, 2).unwrap()]),
            ..SuiteConfig::default()
        }
    }

    #[test]
    fn record_count_matches_configuration() {
        let report = run_suite(&small(vec![FamilyTag::K3, FamilyTag::K2]));
        // 3 global, K-3: 4, K-2: 3 (no rank-1 check), one variant: 4
        assert_eq!(report.records.len(), 14);
        assert!(report.passed(), "{}", report.to_json_lines());
    }

    #[test]
    fn discrepancy_does_not_fail() {
        let report = run_suite(&small(vec![FamilyTag::KN1]));
        let rec = report.find("rank_profile", Some("KN-1")).unwrap();
        assert_eq!(rec.status, Status::Discrepancy);
        assert_eq!(rec.observed_rank, Some(2));
        assert_eq!(rec.claimed_rank, Some(4));
        assert!(report.passed());
    }

    #[test]
    fn fault_injection_fails() {
        let table = DescriptorTable::standard().with_fault(FamilyTag::K3);
        let report = run_suite_with(&small(vec![FamilyTag::K3]), &table);
        let rec = report.find("family_closure", Some("K-3")).unwrap();
        assert_eq!(rec.status, Status::Fail);
        assert!(rec.counterexample.is_some());
        assert!(!report.passed());
    }

    #[test]
    fn reproducible() {
        let cfg = small(vec![FamilyTag::K6, FamilyTag::LN2]);
        assert_eq!(run_suite(&cfg).to_json_lines(), run_suite(&cfg).to_json_lines());
    }
}
