//! Shared fixtures and an independent brute-force cohomology oracle.
#![allow(dead_code)]

use std::collections::HashMap;

use lucp_core::algebra::{AbelianGroupPresentation, FiniteGroupTable};
use lucp_core::cohomology::{induced_action, Cochain, GModule};
use lucp_core::instance::{galois, minus_one_cocycle, twisted, Instance, InstanceFile};

/// The builtin instances used across the suites, by name.
pub fn builtin_fixtures() -> Vec<(String, InstanceFile)> {
    let c2 = FiniteGroupTable::cyclic(2);
    vec![
        ("galois(2,2)".into(), galois(2, 2).unwrap()),
        ("galois(3,2)".into(), galois(3, 2).unwrap()),
        ("twisted(3,C2,+)".into(), twisted(3, &c2, &[vec![1, 1], vec![1, 1]]).unwrap()),
        ("twisted(3,C2,-)".into(), twisted(3, &c2, &minus_one_cocycle(3)).unwrap()),
    ]
}

pub fn load(file: &InstanceFile) -> Instance {
    file.validate().unwrap()
}

pub fn instance_gmodule(inst: &Instance) -> GModule {
    induced_action(&inst.group, inst.fm.thetas(), &inst.center).unwrap()
}

/// Coefficient modules for the oracle comparison: instance-induced ones plus hand-built actions.
pub fn gmodule_fixtures() -> Vec<(String, GModule)> {
    let mut out = Vec::new();
    for (name, file) in [("galois(2,2)", galois(2, 2).unwrap()), ("galois(3,2)", galois(3, 2).unwrap()), ("galois(2,3)", galois(2, 3).unwrap())] {
        out.push((format!("U(Z) of {name}"), instance_gmodule(&load(&file))));
    }
    let c2 = FiniteGroupTable::cyclic(2);
    let c3 = FiniteGroupTable::cyclic(3);
    let c4 = FiniteGroupTable::cyclic(4);
    let z2 = AbelianGroupPresentation::new(vec![2]).unwrap();
    let z3 = AbelianGroupPresentation::new(vec![3]).unwrap();
    let z22 = AbelianGroupPresentation::new(vec![2, 2]).unwrap();
    out.push(("C2 on C2, trivial".into(), GModule::trivial(c2.clone(), z2.clone())));
    out.push(("C3 on C3, trivial".into(), GModule::trivial(c3.clone(), z3.clone())));
    out.push(("C4 on C2, trivial".into(), GModule::trivial(c4, z2)));
    out.push(("C2 on C3, inversion".into(), GModule::new(c2.clone(), z3, vec![vec![vec![1]], vec![vec![2]]]).unwrap()));
    let swap = vec![vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![1, 0]]];
    out.push(("C2 on C2xC2, swap".into(), GModule::new(c2, z22, swap).unwrap()));
    out
}

/// Plain data of a coefficient module, read once so the oracle never calls library arithmetic.
pub struct OracleModule {
    order: usize,
    identity: usize,
    table: Vec<Vec<usize>>,
    factors: Vec<u64>,
    action: Vec<Vec<Vec<u64>>>,
}

impl OracleModule {
    pub fn new(gm: &GModule) -> Self {
        let g = &gm.group;
        OracleModule {
            order: g.order(),
            identity: g.identity(),
            table: g.table().to_vec(),
            factors: gm.module.invariant_factors.clone(),
            action: gm.action.clone(),
        }
    }

    pub fn size(&self) -> u64 {
        self.factors.iter().product()
    }

    fn decode(&self, mut idx: u64) -> Vec<u64> {
        self.factors
            .iter()
            .map(|d| {
                let v = idx % d;
                idx /= d;
                v
            })
            .collect()
    }

    fn encode(&self, v: &[u64]) -> u64 {
        let mut idx = 0;
        for (d, x) in self.factors.iter().zip(v).rev() {
            idx = idx * d + x;
        }
        idx
    }

    fn act(&self, x: usize, v: &[u64]) -> Vec<u64> {
        let mut out = vec![0; self.factors.len()];
        for (k, &c) in v.iter().enumerate() {
            for (i, &a) in self.action[x][k].iter().enumerate() {
                out[i] = (out[i] + c * a) % self.factors[i];
            }
        }
        out
    }

    fn combine(&self, a: &[u64], b: &[u64], sign: i64) -> Vec<u64> {
        a.iter()
            .zip(b)
            .zip(&self.factors)
            .map(|((&x, &y), &d)| if sign > 0 { (x + y) % d } else { (x + d - y % d) % d })
            .collect()
    }

    fn tuples(&self, n: usize, normalized: bool) -> Vec<Vec<usize>> {
        let alphabet: Vec<usize> = (0..self.order).filter(|&g| !normalized || g != self.identity).collect();
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out.into_iter().flat_map(|t| alphabet.iter().map(move |&g| [t.clone(), vec![g]].concat())).collect();
        }
        out
    }

    /// `(d c)` for a cochain given as a map on all tuples.
    pub fn differential(&self, n: usize, c: &dyn Fn(&[usize]) -> Vec<u64>) -> HashMap<Vec<usize>, Vec<u64>> {
        let mut out = HashMap::new();
        for g in self.tuples(n + 1, false) {
            let mut acc = self.act(g[0], &c(&g[1..]));
            for i in 0..n {
                let mut merged = g[..i].to_vec();
                merged.push(self.table[g[i]][g[i + 1]]);
                merged.extend_from_slice(&g[i + 2..]);
                acc = self.combine(&acc, &c(&merged), if (i + 1) % 2 == 0 { 1 } else { -1 });
            }
            acc = self.combine(&acc, &c(&g[..n]), if (n + 1).is_multiple_of(2) { 1 } else { -1 });
            out.insert(g, acc);
        }
        out
    }

    /// Brute-force `H^n` over normalized cochains; `None` when more than `limit` cochains.
    pub fn brute_force(&self, n: usize, limit: u64) -> Option<OracleCohomology> {
        let positions = self.tuples(n, true);
        let size = self.size();
        let count = size.checked_pow(positions.len() as u32).filter(|&c| c <= limit)?;
        let to_fn = |values: &[u64], pos: &[Vec<usize>]| {
            let map: HashMap<Vec<usize>, Vec<u64>> = pos.iter().cloned().zip(values.iter().map(|&v| self.decode(v))).collect();
            let zero = vec![0; self.factors.len()];
            move |args: &[usize]| map.get(args).cloned().unwrap_or_else(|| zero.clone())
        };
        let digits = |mut idx: u64, len: usize| -> Vec<u64> {
            (0..len)
                .map(|_| {
                    let v = idx % size;
                    idx /= size;
                    v
                })
                .collect()
        };
        let mut cocycles = Vec::new();
        for idx in 0..count {
            let values = digits(idx, positions.len());
            let f = to_fn(&values, &positions);
            let d = self.differential(n, &f);
            if d.values().all(|v| v.iter().all(|&c| c == 0)) {
                cocycles.push(values);
            }
        }
        // coboundaries of normalized (n-1)-cochains; degree 0 cochains are constants
        let lower = if n == 1 { vec![vec![]] } else { self.tuples(n - 1, true) };
        let lower_count = size.checked_pow(lower.len() as u32).filter(|&c| c <= limit)?;
        let mut boundaries: Vec<Vec<u64>> = Vec::new();
        for idx in 0..lower_count {
            let values = digits(idx, lower.len());
            let d = if n == 1 {
                let a = self.decode(values[0]);
                positions.iter().map(|t| self.encode(&self.combine(&self.act(t[0], &a), &a, -1))).collect()
            } else {
                let f = to_fn(&values, &lower);
                let d = self.differential(n - 1, &f);
                positions.iter().map(|t| self.encode(&d[t])).collect()
            };
            boundaries.push(d);
        }
        boundaries.sort();
        boundaries.dedup();
        let mut class: HashMap<Vec<u64>, usize> = HashMap::new();
        let mut next = 0;
        for z in &cocycles {
            if class.contains_key(z) {
                continue;
            }
            for b in &boundaries {
                let shifted: Vec<u64> = z.iter().zip(b).map(|(&x, &y)| self.encode(&self.combine(&self.decode(x), &self.decode(y), 1))).collect();
                class.insert(shifted, next);
            }
            next += 1;
        }
        Some(OracleCohomology { degree: n, positions, order: cocycles.len() / boundaries.len(), cocycles, class, factors: self.factors.clone() })
    }
}

pub struct OracleCohomology {
    pub degree: usize,
    positions: Vec<Vec<usize>>,
    pub order: usize,
    /// Every normalized cocycle as value indices on `positions`.
    pub cocycles: Vec<Vec<u64>>,
    /// Class id of every cocycle.
    pub class: HashMap<Vec<u64>, usize>,
    factors: Vec<u64>,
}

impl OracleCohomology {
    /// The cocycle as a library cochain on all of `G^n`.
    pub fn to_cochain(&self, gm: &GModule, values: &[u64]) -> Cochain {
        let order = gm.group.order();
        let mut c = Cochain::identity(gm, self.degree);
        for (t, &v) in self.positions.iter().zip(values) {
            let mut idx = v;
            let coords = self
                .factors
                .iter()
                .map(|d| {
                    let x = idx % d;
                    idx /= d;
                    x
                })
                .collect();
            c.values[Cochain::index(order, t)] = coords;
        }
        c
    }
}
