//! Finite abelian groups in invariant-factor form.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::integer::{smith_normal_form, to_u64_mod, IntegerMatrix};
use super::AlgebraError;

/// `Z/d_1 x ... x Z/d_k` with `d_1 | d_2 | ... | d_k`, each `d_i >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroupPresentation {
    pub invariant_factors: Vec<u64>,
}

impl AbelianGroupPresentation {
    pub fn new(invariant_factors: Vec<u64>) -> Result<Self, AlgebraError> {
        if invariant_factors.iter().any(|&d| d < 2) {
            return Err(AlgebraError::InvalidGroup("invariant factor below 2".into()));
        }
        if invariant_factors.windows(2).any(|w| w[1] % w[0] != 0) {
            return Err(AlgebraError::InvalidGroup("invariant factors do not form a divisibility chain".into()));
        }
        Ok(AbelianGroupPresentation { invariant_factors })
    }

    pub fn trivial() -> Self {
        AbelianGroupPresentation { invariant_factors: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    pub fn order(&self) -> u64 {
        self.invariant_factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.rank()]
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        self.invariant_factors.iter().zip(a.iter().zip(b)).map(|(d, (x, y))| (x + y) % d).collect()
    }

    pub fn neg(&self, a: &[u64]) -> Vec<u64> {
        self.invariant_factors.iter().zip(a).map(|(d, x)| (d - x % d) % d).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &[u64], k: i64) -> Vec<u64> {
        self.invariant_factors
            .iter()
            .zip(a)
            .map(|(&d, &x)| ((x as i128 * k as i128).rem_euclid(d as i128)) as u64)
            .collect()
    }

    pub fn reduce(&self, v: &[BigInt]) -> Vec<u64> {
        self.invariant_factors.iter().zip(v).map(|(&d, x)| to_u64_mod(x, d)).collect()
    }

    /// Mixed-radix index, first coordinate least significant.
    pub fn index_of(&self, a: &[u64]) -> u64 {
        let mut idx = 0;
        for (d, x) in self.invariant_factors.iter().zip(a).rev() {
            idx = idx * d + x;
        }
        idx
    }

    pub fn element_at(&self, mut idx: u64) -> Vec<u64> {
        self.invariant_factors
            .iter()
            .map(|d| {
                let x = idx % d;
                idx /= d;
                x
            })
            .collect()
    }

    pub fn elements(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        (0..self.order()).map(move |i| self.element_at(i))
    }

    pub fn element_order(&self, a: &[u64]) -> u64 {
        self.invariant_factors
            .iter()
            .zip(a)
            .map(|(&d, &x)| d / num_integer::gcd(d, x))
            .fold(1, num_integer::lcm)
    }
}

/// `Z^gens / rowspan(rels)` together with the coordinate change to invariant-factor form.
#[derive(Clone, Debug)]
pub struct RelationQuotient {
    pub group: AbelianGroupPresentation,
    gens: usize,
    v: IntegerMatrix,
    v_inv: IntegerMatrix,
    kept: Vec<usize>,
}

impl RelationQuotient {
    pub fn gens(&self) -> usize {
        self.gens
    }

    /// Exponent vector in `Z^gens` to invariant-factor coordinates.
    pub fn to_coords(&self, x: &[BigInt]) -> Vec<u64> {
        assert_eq!(x.len(), self.gens);
        let y = self.v.left_mul_vec(x);
        self.kept.iter().zip(&self.group.invariant_factors).map(|(&j, &d)| to_u64_mod(&y[j], d)).collect()
    }

    pub fn to_coords_i64(&self, x: &[i64]) -> Vec<u64> {
        let big: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        self.to_coords(&big)
    }

    /// A preimage in `Z^gens` of the given coordinates.
    pub fn lift(&self, coords: &[u64]) -> Vec<BigInt> {
        let mut y = vec![BigInt::zero(); self.gens];
        for (&j, &c) in self.kept.iter().zip(coords) {
            y[j] = BigInt::from(c);
        }
        self.v_inv.left_mul_vec(&y)
    }
}

/// Present `Z^gens / rowspan(rels)`; the quotient must be finite.
pub fn group_from_relations(gens: usize, rels: &IntegerMatrix) -> Result<RelationQuotient, AlgebraError> {
    if rels.cols() != gens {
        return Err(AlgebraError::ShapeMismatch { expected: gens, found: rels.cols() });
    }
    let snf = smith_normal_form(rels);
    let free = gens - snf.rank;
    if free > 0 {
        return Err(AlgebraError::FreeRank(free));
    }
    let mut kept = Vec::new();
    let mut factors = Vec::new();
    for (j, d) in snf.diagonal().iter().enumerate().take(snf.rank) {
        let d = d.to_u64().expect("invariant factor fits in u64");
        if d > 1 {
            kept.push(j);
            factors.push(d);
        }
    }
    Ok(RelationQuotient {
        group: AbelianGroupPresentation { invariant_factors: factors },
        gens,
        v: snf.v,
        v_inv: snf.v_inv,
        kept,
    })
}

/// An explicitly enumerated finite abelian group with its presentation and discrete logs.
#[derive(Clone, Debug)]
pub struct EnumeratedAbelian {
    pub group: AbelianGroupPresentation,
    coords: Vec<Vec<u64>>,
    by_coords: HashMap<Vec<u64>, usize>,
    /// Element indices chosen as generators, in order.
    pub generators: Vec<usize>,
}

impl EnumeratedAbelian {
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self, element: usize) -> &[u64] {
        &self.coords[element]
    }

    pub fn element(&self, coords: &[u64]) -> usize {
        self.by_coords[coords]
    }
}

/// Present a finite abelian group given by `n` elements, an identity and a product.
///
/// Generators are picked greedily (smallest index outside the current subgroup);
/// each new generator contributes one relation `m g_k = (word in earlier generators)`.
pub fn present_enumerated(
    n: usize,
    identity: usize,
    mul: impl Fn(usize, usize) -> usize,
) -> Result<EnumeratedAbelian, AlgebraError> {
    let mut words: Vec<Option<Vec<i64>>> = vec![None; n];
    let mut members = vec![identity];
    words[identity] = Some(Vec::new());
    let mut generators = Vec::new();
    let mut rel_rows: Vec<Vec<i64>> = Vec::new();
    while members.len() < n {
        let g = (0..n).find(|&i| words[i].is_none()).expect("element outside subgroup");
        let k = generators.len();
        generators.push(g);
        for w in words.iter_mut().flatten() {
            w.push(0);
        }
        let base = members.clone();
        let mut power = g;
        let mut m = 1i64;
        loop {
            if let Some(w) = &words[power] {
                let mut rel = w.clone();
                for r in rel.iter_mut() {
                    *r = -*r;
                }
                rel[k] += m;
                rel_rows.push(rel);
                break;
            }
            for &h in &base {
                let prod = mul(power, h);
                if words[prod].is_some() {
                    return Err(AlgebraError::InvalidGroup("product table is not a group".into()));
                }
                let mut w = words[h].clone().expect("member has a word");
                w[k] += m;
                words[prod] = Some(w);
                members.push(prod);
            }
            power = mul(power, g);
            m += 1;
        }
    }
    let gens = generators.len();
    let mut rels = IntegerMatrix::with_cols(gens);
    for row in rel_rows {
        let mut padded = row;
        padded.resize(gens, 0);
        rels.push_row(padded.into_iter().map(BigInt::from).collect());
    }
    let quotient = group_from_relations(gens, &rels)?;
    let mut coords = Vec::with_capacity(n);
    let mut by_coords = HashMap::with_capacity(n);
    for (i, w) in words.into_iter().enumerate() {
        let mut w = w.expect("every element reached");
        w.resize(gens, 0);
        let c = quotient.to_coords_i64(&w);
        if by_coords.insert(c.clone(), i).is_some() {
            return Err(AlgebraError::InvalidGroup("discrete logarithm collision".into()));
        }
        coords.push(c);
    }
    Ok(EnumeratedAbelian { group: quotient.group, coords, by_coords, generators })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_relation() {
        let q = group_from_relations(1, &IntegerMatrix::from_rows(&[vec![3]])).unwrap();
        assert_eq!(q.group.invariant_factors, vec![3]);
    }

    #[test]
    fn klein_four() {
        let q = group_from_relations(2, &IntegerMatrix::from_rows(&[vec![2, 0], vec![0, 2]])).unwrap();
        assert_eq!(q.group.invariant_factors, vec![2, 2]);
    }

    #[test]
    fn snf_driven_relations() {
        let q = group_from_relations(2, &IntegerMatrix::from_rows(&[vec![2, 4], vec![6, 8]])).unwrap();
        assert_eq!(q.group.invariant_factors, vec![2, 4]);
    }

    #[test]
    fn free_rank_is_an_error() {
        let err = group_from_relations(2, &IntegerMatrix::from_rows(&[vec![2, 0]])).unwrap_err();
        assert_eq!(err, AlgebraError::FreeRank(1));
    }

    #[test]
    fn lift_round_trip() {
        let q = group_from_relations(2, &IntegerMatrix::from_rows(&[vec![2, 4], vec![6, 8]])).unwrap();
        for c in q.group.elements().collect::<Vec<_>>() {
            assert_eq!(q.to_coords(&q.lift(&c)), c);
        }
    }

    #[test]
    fn enumerated_units_mod_nine() {
        let units: Vec<u64> = (1..9).filter(|x| x % 3 != 0).collect();
        let idx = |v: u64| units.iter().position(|&u| u == v).unwrap();
        let e = present_enumerated(units.len(), idx(1), |a, b| idx(units[a] * units[b] % 9)).unwrap();
        assert_eq!(e.group.invariant_factors, vec![6]);
        for a in 0..units.len() {
            for b in 0..units.len() {
                let prod = idx(units[a] * units[b] % 9);
                assert_eq!(e.group.add(e.coords(a), e.coords(b)), e.coords(prod));
            }
        }
    }
}
