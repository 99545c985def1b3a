//! Finite-dimensional algebras over `F_p` with an ordered set of local units.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::fp::{unit_vector, vec_add, vec_scale};
use crate::algebra::{is_prime, AlgebraError, FpMatrix};
use crate::{Error, Result};

/// Raw ring data as it appears in instance files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingData {
    pub dim: usize,
    /// `mult[i][j]` is the coordinate vector of `b_i * b_j`.
    pub mult: Vec<Vec<Vec<u64>>>,
    #[serde(rename = "E")]
    pub units: Vec<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalUnitRing {
    p: u64,
    dim: usize,
    mult: Vec<Vec<Vec<u64>>>,
    units: Vec<Vec<u64>>,
    labels: Option<Vec<String>>,
    left: Vec<FpMatrix>,
    right: Vec<FpMatrix>,
}

impl LocalUnitRing {
    pub fn new(p: u64, data: RingData) -> Result<Self> {
        if !is_prime(p) {
            return Err(AlgebraError::NotPrime(p).into());
        }
        let RingData { dim, mult, units, labels } = data;
        if mult.len() != dim || mult.iter().any(|row| row.len() != dim || row.iter().any(|v| v.len() != dim)) {
            return Err(Error::Shape(format!("structure constants must be {dim} x {dim} x {dim}")));
        }
        if units.is_empty() {
            return Err(Error::Shape("no local units given".into()));
        }
        if let Some(i) = units.iter().position(|e| e.len() != dim) {
            return Err(Error::Shape(format!("local unit {i} has wrong length")));
        }
        if labels.as_ref().is_some_and(|l| l.len() != dim) {
            return Err(Error::Shape("label count differs from dimension".into()));
        }
        let mult: Vec<Vec<Vec<u64>>> =
            mult.into_iter().map(|row| row.into_iter().map(|v| v.into_iter().map(|c| c % p).collect()).collect()).collect();
        let units: Vec<Vec<u64>> = units.into_iter().map(|e| e.into_iter().map(|c| c % p).collect()).collect();
        let mut left = Vec::with_capacity(dim);
        let mut right = Vec::with_capacity(dim);
        for i in 0..dim {
            left.push(FpMatrix::from_columns(p, dim, &(0..dim).map(|j| mult[i][j].clone()).collect::<Vec<_>>()));
            right.push(FpMatrix::from_columns(p, dim, &(0..dim).map(|j| mult[j][i].clone()).collect::<Vec<_>>()));
        }
        let ring = LocalUnitRing { p, dim, mult, units, labels, left, right };
        ring.check_associative()?;
        ring.check_units()?;
        Ok(ring)
    }

    fn check_associative(&self) -> Result<()> {
        for i in 0..self.dim {
            for j in 0..self.dim {
                let ij = &self.mult[i][j];
                for k in 0..self.dim {
                    let lhs = self.right_matrix(&unit_vector(self.dim, k, self.p)).mul_vec(ij);
                    let rhs = self.left[i].mul_vec(&self.mult[j][k]);
                    if lhs != rhs {
                        return Err(Error::NonAssociative(i, j, k));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_units(&self) -> Result<()> {
        for (index, e) in self.units.iter().enumerate() {
            if self.mul(e, e) != *e {
                return Err(Error::NotIdempotent { index });
            }
        }
        for b in 0..self.dim {
            let v = unit_vector(self.dim, b, self.p);
            if !self.units.iter().any(|e| self.absorbs(e, &v)) {
                return Err(Error::NoLocalUnit { basis: b });
            }
        }
        for first in 0..self.units.len() {
            for second in first + 1..self.units.len() {
                let pair = [self.units[first].clone(), self.units[second].clone()];
                if self.unit_index_for(&pair).is_err() {
                    return Err(Error::UnitClosure { first, second });
                }
            }
        }
        Ok(())
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn units(&self) -> &[Vec<u64>] {
        &self.units
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn structure_constants(&self) -> &[Vec<Vec<u64>>] {
        &self.mult
    }

    pub fn data(&self) -> RingData {
        RingData { dim: self.dim, mult: self.mult.clone(), units: self.units.clone(), labels: self.labels.clone() }
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.dim]
    }

    pub fn basis(&self, i: usize) -> Vec<u64> {
        unit_vector(self.dim, i, self.p)
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        self.left_matrix(a).mul_vec(b)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        vec_add(a, b, self.p)
    }

    /// Matrices of `v -> b_i v`.
    pub fn left_basis_matrices(&self) -> &[FpMatrix] {
        &self.left
    }

    /// Matrices of `v -> v b_i`.
    pub fn right_basis_matrices(&self) -> &[FpMatrix] {
        &self.right
    }

    pub fn left_matrix(&self, a: &[u64]) -> FpMatrix {
        combine(self.p, self.dim, &self.left, a)
    }

    pub fn right_matrix(&self, a: &[u64]) -> FpMatrix {
        combine(self.p, self.dim, &self.right, a)
    }

    pub fn absorbs(&self, e: &[u64], r: &[u64]) -> bool {
        self.mul(e, r) == r && self.mul(r, e) == r
    }

    /// Index in `E` of the first local unit absorbing every element on both sides.
    pub fn unit_index_for(&self, elems: &[Vec<u64>]) -> Result<usize> {
        self.units
            .iter()
            .position(|e| elems.iter().all(|r| self.absorbs(e, r)))
            .ok_or(Error::NoCommonUnit)
    }

    pub fn unit_for(&self, elems: &[Vec<u64>]) -> Result<Vec<u64>> {
        Ok(self.units[self.unit_index_for(elems)?].clone())
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| self.mult[i][j] == self.mult[j][i]))
    }

    /// Every element of the ring, in mixed-radix order; `None` above `cap` elements.
    pub fn elements(&self, cap: u64) -> Option<Vec<Vec<u64>>> {
        let total = (self.p as u128).checked_pow(self.dim as u32)?;
        if total > cap as u128 {
            return None;
        }
        Some(enumerate_vectors(self.p, self.dim, total as u64))
    }
}

fn combine(p: u64, dim: usize, mats: &[FpMatrix], coeffs: &[u64]) -> FpMatrix {
    let mut out = FpMatrix::zeros(p, dim, dim);
    for (m, &c) in mats.iter().zip(coeffs) {
        if c != 0 {
            out = out.add(&m.scale(c));
        }
    }
    out
}

/// All vectors of `F_p^n`, first coordinate least significant.
pub fn enumerate_vectors(p: u64, n: usize, total: u64) -> Vec<Vec<u64>> {
    (0..total)
        .map(|mut idx| {
            (0..n)
                .map(|_| {
                    let c = idx % p;
                    idx /= p;
                    c
                })
                .collect()
        })
        .collect()
}

/// An injective multiplicative map `R -> S` carrying `E_R` onto `E_S`.
#[derive(Clone, Debug)]
pub struct RingExtension {
    pub base: Arc<LocalUnitRing>,
    pub top: Arc<LocalUnitRing>,
    /// `top.dim x base.dim`.
    pub emb: FpMatrix,
}

impl RingExtension {
    pub fn new(base: Arc<LocalUnitRing>, top: Arc<LocalUnitRing>, emb: FpMatrix) -> Result<Self> {
        if emb.rows() != top.dim() || emb.cols() != base.dim() {
            return Err(Error::Shape("embedding has wrong shape".into()));
        }
        if emb.rank() != base.dim() {
            return Err(Error::NotInjective);
        }
        for i in 0..base.dim() {
            for j in 0..base.dim() {
                let lhs = emb.mul_vec(&base.mul(&base.basis(i), &base.basis(j)));
                let rhs = top.mul(&emb.column(i), &emb.column(j));
                if lhs != rhs {
                    return Err(Error::NotMultiplicative(i, j));
                }
            }
        }
        let mut image: Vec<Vec<u64>> = base.units().iter().map(|e| emb.mul_vec(e)).collect();
        let mut target = top.units().to_vec();
        image.sort();
        image.dedup();
        target.sort();
        target.dedup();
        if image != target {
            return Err(Error::UnitSetMismatch);
        }
        Ok(RingExtension { base, top, emb })
    }

    pub fn embed(&self, r: &[u64]) -> Vec<u64> {
        self.emb.mul_vec(r)
    }

    /// Coordinates in `R` of an element of `emb(R)`.
    pub fn pull_back(&self, s: &[u64]) -> Option<Vec<u64>> {
        self.emb.solve(s).ok()?.map(|sol| sol.particular)
    }
}

/// `F_{p^n}` in the power basis of a monic irreducible polynomial, with `E = {1}`.
///
/// Returns the ring and the matrix of the Frobenius `a -> a^p`.
pub fn finite_field(p: u64, n: usize) -> Result<(LocalUnitRing, FpMatrix)> {
    let modulus = irreducible_polynomial(p, n);
    // w^k for k < 2n - 1 reduced modulo the chosen polynomial
    let mut powers: Vec<Vec<u64>> = Vec::with_capacity(2 * n);
    let mut cur = unit_vector(n, 0, p);
    for _ in 0..2 * n - 1 {
        powers.push(cur.clone());
        let mut next = vec![0u64; n];
        for k in 0..n - 1 {
            next[k + 1] = cur[k];
        }
        let top = cur[n - 1];
        for k in 0..n {
            next[k] = (next[k] + p - top * modulus[k] % p) % p;
        }
        cur = next;
    }
    let mult: Vec<Vec<Vec<u64>>> = (0..n).map(|i| (0..n).map(|j| powers[i + j].clone()).collect()).collect();
    let labels = (0..n).map(|k| if k == 0 { "1".to_string() } else { format!("w^{k}") }).collect();
    let ring = LocalUnitRing::new(p, RingData { dim: n, mult, units: vec![unit_vector(n, 0, p)], labels: Some(labels) })?;
    let mut frob_cols = Vec::with_capacity(n);
    for i in 0..n {
        let b = ring.basis(i);
        let mut acc = unit_vector(n, 0, p);
        for _ in 0..p {
            acc = ring.mul(&acc, &b);
        }
        frob_cols.push(acc);
    }
    Ok((ring, FpMatrix::from_columns(p, n, &frob_cols)))
}

/// Lexicographically first monic irreducible polynomial of degree `n` over `F_p`.
/// Coefficients `c_0..c_{n-1}` of `x^n + c_{n-1} x^{n-1} + ... + c_0`.
fn irreducible_polynomial(p: u64, n: usize) -> Vec<u64> {
    let total = p.pow(n as u32);
    for coeffs in enumerate_vectors(p, n, total) {
        let mut poly = coeffs.clone();
        poly.push(1);
        if is_irreducible(&poly, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn is_irreducible(poly: &[u64], p: u64) -> bool {
    let n = poly.len() - 1;
    if n == 1 {
        return true;
    }
    for d in 1..=n / 2 {
        let count = p.pow(d as u32);
        for low in enumerate_vectors(p, d, count) {
            let mut divisor = low;
            divisor.push(1);
            if poly_rem(poly, &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn poly_rem(a: &[u64], monic: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let d = monic.len() - 1;
    while r.len() > d {
        let lead = *r.last().expect("nonempty");
        let shift = r.len() - 1 - d;
        for (k, &c) in monic.iter().enumerate() {
            r[shift + k] = (r[shift + k] + p - lead * c % p) % p;
        }
        r.pop();
    }
    r
}

/// `F_p^k` with componentwise product and the given local units.
pub fn product_of_prime_fields(p: u64, k: usize, units: Vec<Vec<u64>>) -> Result<LocalUnitRing> {
    let mult = (0..k)
        .map(|i| (0..k).map(|j| if i == j { unit_vector(k, i, p) } else { vec![0; k] }).collect())
        .collect();
    LocalUnitRing::new(p, RingData { dim: k, mult, units, labels: None })
}

/// `M_n(F_p)` with the matrix unit `E_ij` at index `i n + j` and `E = {1}`.
pub fn matrix_algebra(p: u64, n: usize) -> Result<LocalUnitRing> {
    let d = n * n;
    let mut mult = vec![vec![vec![0u64; d]; d]; d];
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                mult[i * n + j][j * n + l][i * n + l] = 1;
            }
        }
    }
    let one = (0..d).map(|k| u64::from(k / n == k % n)).collect();
    LocalUnitRing::new(p, RingData { dim: d, mult, units: vec![one], labels: None })
}

/// Isomorphism invariants of a small ring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingInvariants {
    pub dim: usize,
    pub zero_divisors: usize,
    pub idempotents: usize,
    pub nilpotents: usize,
}

pub fn ring_invariants(r: &LocalUnitRing, cap: u64) -> Option<RingInvariants> {
    let elems = r.elements(cap)?;
    let zero = r.zero();
    let nonzero: Vec<&Vec<u64>> = elems.iter().filter(|v| **v != zero).collect();
    let zero_divisors = nonzero.iter().filter(|a| nonzero.iter().any(|b| r.mul(a, b) == zero || r.mul(b, a) == zero)).count();
    let idempotents = elems.iter().filter(|a| r.mul(a, a) == **a).count();
    let nilpotents = elems
        .iter()
        .filter(|a| {
            let mut cur = (*a).clone();
            for _ in 0..r.dim() {
                cur = r.mul(&cur, a);
            }
            cur == zero
        })
        .count();
    Some(RingInvariants { dim: r.dim(), zero_divisors, idempotents, nilpotents })
}

/// Searches for an algebra isomorphism `a -> b` by backtracking over images of basis vectors.
pub fn find_ring_isomorphism(a: &LocalUnitRing, b: &LocalUnitRing, caps: &crate::Caps) -> crate::Decided<FpMatrix> {
    use crate::Decided;
    if a.p() != b.p() || a.dim() != b.dim() {
        return Decided::Absent;
    }
    match (ring_invariants(a, caps.enumeration), ring_invariants(b, caps.enumeration)) {
        (Some(ia), Some(ib)) if ia != ib => return Decided::Absent,
        (Some(_), Some(_)) => {}
        _ => return Decided::Undecided(format!("rings of dimension {} exceed the enumeration cap", a.dim())),
    }
    let candidates = b.elements(caps.enumeration).expect("checked by ring_invariants");
    let mut images: Vec<Vec<u64>> = Vec::with_capacity(a.dim());
    let mut budget = caps.enumeration;
    match extend_iso(a, b, &candidates, &mut images, &mut budget) {
        Some(true) => Decided::Found(FpMatrix::from_columns(a.p(), b.dim(), &images)),
        Some(false) => Decided::Absent,
        None => Decided::Undecided("ring isomorphism search exceeded its budget".into()),
    }
}

fn extend_iso(a: &LocalUnitRing, b: &LocalUnitRing, candidates: &[Vec<u64>], images: &mut Vec<Vec<u64>>, budget: &mut u64) -> Option<bool> {
    let k = images.len();
    if k == a.dim() {
        return Some(true);
    }
    let p = a.p();
    for c in candidates {
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        images.push(c.clone());
        let independent = FpMatrix::from_columns(p, b.dim(), images).rank() == k + 1;
        if independent && consistent(a, b, images) && extend_iso(a, b, candidates, images, budget)? {
            return Some(true);
        }
        images.pop();
    }
    Some(false)
}

fn consistent(a: &LocalUnitRing, b: &LocalUnitRing, images: &[Vec<u64>]) -> bool {
    let k = images.len() - 1;
    let p = a.p();
    for i in 0..=k {
        for (x, y) in [(i, k), (k, i)] {
            let prod = &a.structure_constants()[x][y];
            if prod[k + 1..].iter().any(|&c| c != 0) {
                continue;
            }
            let mut expected = vec![0u64; b.dim()];
            for (l, &c) in prod.iter().enumerate().take(k + 1) {
                if c != 0 {
                    expected = vec_add(&expected, &vec_scale(&images[l], c, p), p);
                }
            }
            if b.mul(&images[x], &images[y]) != expected {
                return false;
            }
        }
    }
    true
}

/// Scale an element; convenience for callers working in coordinates.
pub fn scale(r: &[u64], c: u64, p: u64) -> Vec<u64> {
    vec_scale(r, c, p)
}
