//! Report bundles: deterministic JSON output of a CLI command.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::cohomology::{induced_action, CohomologyGroup, GModule};
use crate::crossed::{build_crossed_product, zeta_backward, FactorMap};
use crate::instance::Instance;
use crate::ring::RingData;
use crate::sequence::{exactness_check, Check, SequenceReport, Verdict};
use crate::{Caps, Result};

pub const SCHEMA: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Validate,
    Cohomology,
    CrossedProduct,
    SequenceCheck,
    Report,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Cohomology => "cohomology",
            Command::CrossedProduct => "crossed-product",
            Command::SequenceCheck => "sequence-check",
            Command::Report => "report",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub instance_sha256: String,
    pub tool_version: String,
    pub seed: u64,
}

/// One cocycle as a map from comma-separated group tuples to exponent vectors.
#[derive(Clone, Debug, Serialize)]
pub struct CocycleTable {
    pub class: Vec<u64>,
    pub values: BTreeMap<String, Vec<u64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CohomologyTable {
    pub degree: usize,
    pub invariant_factors: Vec<u64>,
    pub order: u64,
    pub representatives: Vec<CocycleTable>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CohomologyTables {
    /// Invariant factors of the coefficient group `U(Z)`.
    pub coefficients: Vec<u64>,
    /// `action[x][k]`: image of the `k`-th generator under `x`.
    pub action: Vec<Vec<Vec<u64>>>,
    pub degrees: Vec<CohomologyTable>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossedProductRing {
    pub label: String,
    /// Offsets of the homogeneous components in the basis.
    pub offsets: Vec<usize>,
    pub ring: RingData,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportBundle {
    pub schema: u32,
    pub command: Command,
    pub instance: String,
    pub provenance: Provenance,
    pub caps: Caps,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cohomology: Option<CohomologyTables>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub crossed_products: Vec<CrossedProductRing>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sequence: Option<SequenceReport>,
    pub verdict: Verdict,
}

impl ReportBundle {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("bundle serializes");
        s.push('\n');
        s
    }

    /// Process exit code: 0 pass, 2 undecided, 1 failure.
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Pass => 0,
            Verdict::Undecided => 2,
            Verdict::Fail => 1,
        }
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "lucp {} on {}: {}", self.command.name(), self.instance, verdict_word(self.verdict));
        let _ = writeln!(out, "instance sha256 {} seed {}", self.provenance.instance_sha256, self.provenance.seed);
        if let Some(c) = &self.cohomology {
            for d in &c.degrees {
                let _ = writeln!(out, "  H{} order {} invariant factors {:?}", d.degree, d.order, d.invariant_factors);
            }
        }
        for r in &self.crossed_products {
            let _ = writeln!(out, "  crossed product {} of dimension {}", r.label, r.ring.dim);
        }
        for c in &self.checks {
            let _ = writeln!(out, "  {:<9} {}", verdict_word(c.verdict), c.name);
        }
        if let Some(s) = &self.sequence {
            let _ = writeln!(out, "  {}", s.scope);
            for g in &s.groups {
                let _ = writeln!(out, "    |{}| = {}", g.name, g.order);
            }
            for j in &s.junctions {
                let _ = writeln!(out, "  {:<9} {} at {}: {}", verdict_word(j.verdict), j.name, j.at, j.detail);
            }
            for c in &s.checks {
                let _ = writeln!(out, "  {:<9} {}", verdict_word(c.verdict), c.name);
            }
        }
        out
    }
}

fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
        Verdict::Undecided => "UNDECIDED",
    }
}

pub fn instance_hash(inst: &Instance) -> String {
    hex::encode(Sha256::digest(inst.file.to_json().as_bytes()))
}

fn tuple_key(args: &[usize]) -> String {
    args.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn cohomology_tables(gm: &GModule, groups: &[CohomologyGroup]) -> CohomologyTables {
    let order = gm.group.order();
    let degrees = groups
        .iter()
        .map(|h| {
            let representatives = h
                .group
                .elements()
                .map(|class| {
                    let c = h.representative(gm, &class);
                    let values = (0..order.pow(h.degree as u32))
                        .map(|i| {
                            let args = crate::cohomology::Cochain::args(order, h.degree, i);
                            (tuple_key(&args), c.at(order, &args).to_vec())
                        })
                        .collect();
                    CocycleTable { class, values }
                })
                .collect();
            CohomologyTable { degree: h.degree, invariant_factors: h.group.invariant_factors.clone(), order: h.order(), representatives }
        })
        .collect();
    CohomologyTables { coefficients: gm.module.invariant_factors.clone(), action: gm.action.clone(), degrees }
}

fn crossed_ring(label: String, fm: &FactorMap) -> Result<CrossedProductRing> {
    let cp = build_crossed_product(fm)?;
    Ok(CrossedProductRing { label, offsets: cp.offsets.clone(), ring: cp.ring.data() })
}

/// Runs `command` on a validated instance with the given caps.
pub fn run(command: Command, inst: &Instance, caps: &Caps) -> Result<ReportBundle> {
    let mut checks = Vec::new();
    let mut cohomology = None;
    let mut crossed_products = Vec::new();
    let mut sequence = None;
    let fm = &inst.fm;
    checks.push(Check { name: "instance validates".into(), verdict: Verdict::Pass, detail: String::new() });

    let wants = |c: Command| command == c || command == Command::Report;
    if wants(Command::Cohomology) || wants(Command::CrossedProduct) {
        let gm = induced_action(&inst.group, fm.thetas(), &inst.center)?;
        let groups = (1..=3).map(|n| CohomologyGroup::compute(&gm, n)).collect::<Result<Vec<_>>>()?;
        if wants(Command::Cohomology) {
            cohomology = Some(cohomology_tables(&gm, &groups));
        }
        if wants(Command::CrossedProduct) {
            crossed_products.push(crossed_ring("Delta(Theta)".into(), fm)?);
            let h2 = &groups[1];
            for class in h2.group.elements() {
                if class.iter().all(|&c| c == 0) {
                    continue;
                }
                let twisted = zeta_backward(fm, &inst.center, &gm, h2, &class)?;
                crossed_products.push(crossed_ring(format!("twist by H2 class {class:?}"), &twisted)?);
            }
            checks.push(Check {
                name: "factor map is associative".into(),
                verdict: Verdict::from_bool(fm.is_associative()),
                detail: format!("{} crossed products", crossed_products.len()),
            });
        }
    }
    if wants(Command::SequenceCheck) {
        sequence = Some(exactness_check(fm, &inst.center, &inst.extra_pic, caps)?);
    }
    let verdict = checks.iter().map(|c| c.verdict).chain(sequence.iter().map(|s| s.verdict)).fold(Verdict::Pass, Verdict::and);
    Ok(ReportBundle {
        schema: SCHEMA,
        command,
        instance: inst.name().to_string(),
        provenance: Provenance { instance_sha256: instance_hash(inst), tool_version: TOOL_VERSION.to_string(), seed: caps.seed },
        caps: caps.clone(),
        checks,
        cohomology,
        crossed_products,
        sequence,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FiniteGroupTable;
    use crate::instance::{galois, twisted};

    #[test]
    fn twisted_f3_h2_table() {
        let inst = twisted(3, &FiniteGroupTable::cyclic(2), &[vec![1, 1], vec![1, 1]]).unwrap().validate().unwrap();
        let bundle = run(Command::Cohomology, &inst, &inst.caps).unwrap();
        let h = bundle.cohomology.unwrap();
        assert_eq!(h.degrees[1].invariant_factors, vec![2]);
        assert_eq!(h.degrees[1].representatives.len(), 2);
        assert_eq!(bundle.verdict, Verdict::Pass);
    }

    #[test]
    fn bundles_are_deterministic() {
        let inst = galois(2, 2).unwrap().validate().unwrap();
        let a = run(Command::Report, &inst, &inst.caps).unwrap().to_json();
        let b = run(Command::Report, &inst, &inst.caps).unwrap().to_json();
        assert_eq!(a, b);
        assert!(a.contains("\"schema\": 1"));
    }
}
