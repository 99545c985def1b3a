//! Unital bimodules over a [`LocalUnitRing`] and the maps between them.

use std::sync::Arc;

use crate::algebra::fp::unit_vector;
use crate::algebra::{FpMatrix, Subspace};
use crate::ring::{LocalUnitRing, RingExtension};
use crate::search::find_in_span;
use crate::{Caps, Decided, Error, Result};

#[derive(Clone, Debug)]
pub struct Bimodule {
    ring: Arc<LocalUnitRing>,
    dim: usize,
    left: Vec<FpMatrix>,
    right: Vec<FpMatrix>,
}

impl PartialEq for Bimodule {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.ring, &other.ring) && self.dim == other.dim && self.left == other.left && self.right == other.right
    }
}

impl Bimodule {
    /// `left[i]` is `m -> b_i m` and `right[i]` is `m -> m b_i`.
    pub fn new(ring: Arc<LocalUnitRing>, dim: usize, left: Vec<FpMatrix>, right: Vec<FpMatrix>) -> Result<Self> {
        let n = ring.dim();
        if left.len() != n || right.len() != n {
            return Err(Error::NotBimodule("one action matrix per ring basis element required".into()));
        }
        if left.iter().chain(&right).any(|m| m.rows() != dim || m.cols() != dim) {
            return Err(Error::NotBimodule(format!("action matrices must be {dim} x {dim}")));
        }
        let m = Bimodule { ring, dim, left, right };
        m.check()?;
        Ok(m)
    }

    fn check(&self) -> Result<()> {
        let r = &self.ring;
        let n = r.dim();
        for i in 0..n {
            for j in 0..n {
                let prod = &r.structure_constants()[i][j];
                if self.left[i].mul(&self.left[j]) != self.left_action(prod) {
                    return Err(Error::NotBimodule(format!("left action fails on ({i}, {j})")));
                }
                if self.right[j].mul(&self.right[i]) != self.right_action(prod) {
                    return Err(Error::NotBimodule(format!("right action fails on ({i}, {j})")));
                }
                if self.left[i].mul(&self.right[j]) != self.right[j].mul(&self.left[i]) {
                    return Err(Error::NotBimodule(format!("actions do not commute on ({i}, {j})")));
                }
            }
        }
        for b in 0..self.dim {
            self.unit_index_for(&[self.basis(b)]).map_err(|_| Error::NotUnital { basis: b })?;
        }
        Ok(())
    }

    pub fn regular(ring: Arc<LocalUnitRing>) -> Self {
        let dim = ring.dim();
        let left = ring.left_basis_matrices().to_vec();
        let right = ring.right_basis_matrices().to_vec();
        Bimodule { ring, dim, left, right }
    }

    /// `R^σ`: regular left action, right action `m . r = m σ(r)`.
    pub fn twisted(ring: Arc<LocalUnitRing>, sigma: &FpMatrix) -> Result<Self> {
        let dim = ring.dim();
        let left = ring.left_basis_matrices().to_vec();
        let right = (0..dim).map(|i| ring.right_matrix(&sigma.column(i))).collect();
        Bimodule::new(ring, dim, left, right)
    }

    pub fn direct_sum(&self, other: &Bimodule) -> Bimodule {
        assert!(Arc::ptr_eq(&self.ring, &other.ring), "direct sum over different rings");
        let p = self.p();
        let block = |a: &[FpMatrix], b: &[FpMatrix]| -> Vec<FpMatrix> {
            a.iter().zip(b).map(|(x, y)| FpMatrix::block_diagonal(p, &[x.clone(), y.clone()])).collect()
        };
        Bimodule {
            ring: self.ring.clone(),
            dim: self.dim + other.dim,
            left: block(&self.left, &other.left),
            right: block(&self.right, &other.right),
        }
    }

    pub fn power(&self, k: usize) -> Bimodule {
        let mut acc = Bimodule { ring: self.ring.clone(), dim: 0, left: vec![FpMatrix::zeros(self.p(), 0, 0); self.ring.dim()], right: vec![FpMatrix::zeros(self.p(), 0, 0); self.ring.dim()] };
        for _ in 0..k {
            acc = acc.direct_sum(self);
        }
        acc
    }

    /// The `R`-sub-bimodule of `S` spanned by `basis`, with `R` acting through the embedding.
    pub fn from_subspace(ext: &RingExtension, basis: &[Vec<u64>]) -> Result<Self> {
        let p = ext.top.p();
        let dim = basis.len();
        let span = FpMatrix::from_columns(p, ext.top.dim(), basis);
        if span.rank() != dim {
            return Err(Error::NotBimodule("basis vectors are linearly dependent".into()));
        }
        let coords = |v: &[u64]| -> Result<Vec<u64>> {
            span.solve(v)?
                .map(|s| s.particular)
                .ok_or_else(|| Error::NotBimodule("subspace is not closed under the ring actions".into()))
        };
        let mut left = Vec::new();
        let mut right = Vec::new();
        for i in 0..ext.base.dim() {
            let r = ext.emb.column(i);
            let mut lcols = Vec::with_capacity(dim);
            let mut rcols = Vec::with_capacity(dim);
            for x in basis {
                lcols.push(coords(&ext.top.mul(&r, x))?);
                rcols.push(coords(&ext.top.mul(x, &r))?);
            }
            left.push(FpMatrix::from_columns(p, dim, &lcols));
            right.push(FpMatrix::from_columns(p, dim, &rcols));
        }
        Bimodule::new(ext.base.clone(), dim, left, right)
    }

    /// Restriction of scalars of an `S`-bimodule along `R -> S`.
    pub fn restrict(&self, ext: &RingExtension) -> Result<Bimodule> {
        let left = (0..ext.base.dim()).map(|i| self.left_action(&ext.emb.column(i))).collect();
        let right = (0..ext.base.dim()).map(|i| self.right_action(&ext.emb.column(i))).collect();
        Bimodule::new(ext.base.clone(), self.dim, left, right)
    }

    pub fn ring(&self) -> &Arc<LocalUnitRing> {
        &self.ring
    }

    pub fn p(&self) -> u64 {
        self.ring.p()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self, i: usize) -> Vec<u64> {
        unit_vector(self.dim, i, self.p())
    }

    pub fn left_basis(&self) -> &[FpMatrix] {
        &self.left
    }

    pub fn right_basis(&self) -> &[FpMatrix] {
        &self.right
    }

    pub fn left_action(&self, r: &[u64]) -> FpMatrix {
        combine(self.p(), self.dim, &self.left, r)
    }

    pub fn right_action(&self, r: &[u64]) -> FpMatrix {
        combine(self.p(), self.dim, &self.right, r)
    }

    pub fn act_left(&self, r: &[u64], m: &[u64]) -> Vec<u64> {
        self.left_action(r).mul_vec(m)
    }

    pub fn act_right(&self, m: &[u64], r: &[u64]) -> Vec<u64> {
        self.right_action(r).mul_vec(m)
    }

    pub fn absorbs(&self, e: &[u64], m: &[u64]) -> bool {
        self.act_left(e, m) == m && self.act_right(m, e) == m
    }

    /// Index in `E` of the first local unit acting as identity on both sides of all `elems`.
    pub fn unit_index_for(&self, elems: &[Vec<u64>]) -> Result<usize> {
        self.ring
            .units()
            .iter()
            .position(|e| elems.iter().all(|m| self.absorbs(e, m)))
            .ok_or(Error::NoCommonUnit)
    }

    pub fn unit_for(&self, elems: &[Vec<u64>]) -> Result<Vec<u64>> {
        Ok(self.ring.units()[self.unit_index_for(elems)?].clone())
    }

    /// Both actions of `R` as a list suitable for [`intertwiners`].
    pub fn actions(&self) -> Vec<&FpMatrix> {
        self.left.iter().chain(&self.right).collect()
    }

    pub fn is_map_to(&self, target: &Bimodule, f: &FpMatrix) -> bool {
        f.rows() == target.dim
            && f.cols() == self.dim
            && self.left.iter().zip(&target.left).all(|(a, b)| f.mul(a) == b.mul(f))
            && self.right.iter().zip(&target.right).all(|(a, b)| f.mul(a) == b.mul(f))
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

/// Basis of `{F : F A_k = B_k F for all k}`, with `F` of shape `tgt_dim x src_dim`.
pub fn intertwiners(p: u64, src_dim: usize, tgt_dim: usize, src: &[&FpMatrix], tgt: &[&FpMatrix]) -> Vec<FpMatrix> {
    assert_eq!(src.len(), tgt.len());
    let unknowns = src_dim * tgt_dim;
    if unknowns == 0 {
        return Vec::new();
    }
    let mut system = FpMatrix::zeros(p, 0, unknowns);
    for (a, b) in src.iter().zip(tgt) {
        let mut rows = FpMatrix::zeros(p, tgt_dim * src_dim, unknowns);
        // (F A - B F)[i][c] = sum_k F[i][k] A[k][c] - sum_k B[i][k] F[k][c]
        for i in 0..tgt_dim {
            for c in 0..src_dim {
                let row = i * src_dim + c;
                for k in 0..src_dim {
                    let v = a.get(k, c);
                    if v != 0 {
                        let col = i * src_dim + k;
                        rows.set(row, col, (rows.get(row, col) + v) % p);
                    }
                }
                for k in 0..tgt_dim {
                    let v = b.get(i, k);
                    if v != 0 {
                        let col = k * src_dim + c;
                        rows.set(row, col, (rows.get(row, col) + p - v) % p);
                    }
                }
            }
        }
        let stacked = system.vstack(&rows);
        let (r, pivots) = stacked.rref();
        system = r.submatrix(0..pivots.len(), 0..unknowns);
    }
    system
        .kernel()
        .into_iter()
        .map(|v| FpMatrix::from_rows(p, &v.chunks(src_dim).map(|c| c.to_vec()).collect::<Vec<_>>()))
        .collect()
}

/// Basis of `Hom_{R-R}(M, N)`.
pub fn hom_space(m: &Bimodule, n: &Bimodule) -> Vec<FpMatrix> {
    assert!(Arc::ptr_eq(m.ring(), n.ring()), "hom space over different rings");
    intertwiners(m.p(), m.dim, n.dim, &m.actions(), &n.actions())
}

/// Searches `Hom_{R-R}(M, N)` for an isomorphism.
pub fn find_isomorphism(m: &Bimodule, n: &Bimodule, caps: &Caps) -> Decided<FpMatrix> {
    if m.dim != n.dim {
        return Decided::Absent;
    }
    let basis = hom_space(m, n);
    if basis.is_empty() {
        return if m.dim == 0 { Decided::Found(FpMatrix::zeros(m.p(), 0, 0)) } else { Decided::Absent };
    }
    // a basis element that is already invertible avoids the full search
    if let Some(b) = basis.iter().find(|b| b.is_invertible()) {
        return Decided::Found(b.clone());
    }
    find_in_span(m.p(), &basis, n.dim, m.dim, caps, |f| f.is_invertible())
}

/// Bimodule automorphisms of `M`, enumerated exhaustively up to `cap` endomorphisms.
pub fn automorphisms(m: &Bimodule, cap: u64) -> Result<Vec<FpMatrix>> {
    let basis = hom_space(m, m);
    let all = crate::search::enumerate_span(m.p(), &basis, m.dim, m.dim, cap)
        .ok_or_else(|| Error::SizeCap(format!("End(M) has dimension {} over F_{}", basis.len(), m.p())))?;
    Ok(all.into_iter().filter(|f| f.is_invertible()).collect())
}

/// The sub-bimodule spanned by images of the given vectors under both actions.
pub fn generated_subspace(m: &Bimodule, vectors: &[Vec<u64>]) -> Subspace {
    let mut span = Subspace::span(m.p(), m.dim, vectors);
    loop {
        let mut more: Vec<Vec<u64>> = span.basis().to_vec();
        for v in span.basis() {
            for a in m.left.iter().chain(&m.right) {
                more.push(a.mul_vec(v));
            }
        }
        let next = Subspace::span(m.p(), m.dim, &more);
        if next.dim() == span.dim() {
            return span;
        }
        span = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{finite_field, product_of_prime_fields};

    fn f4() -> (Arc<LocalUnitRing>, FpMatrix) {
        let (r, frob) = finite_field(2, 2).unwrap();
        (Arc::new(r), frob)
    }

    #[test]
    fn hom_space_examples() {
        let (r, frob) = f4();
        let reg = Bimodule::regular(r.clone());
        assert_eq!(hom_space(&reg, &reg).len(), 2);
        let tw = Bimodule::twisted(r, &frob).unwrap();
        assert_eq!(hom_space(&tw, &reg).len(), 0);
        let (f3, _) = finite_field(3, 1).unwrap();
        let f3 = Bimodule::regular(Arc::new(f3));
        assert_eq!(hom_space(&f3, &f3).len(), 1);
    }

    #[test]
    fn hom_space_matches_brute_force() {
        let (r, frob) = f4();
        let reg = Bimodule::regular(r.clone());
        let tw = Bimodule::twisted(r, &frob).unwrap();
        for (m, n) in [(&reg, &reg), (&tw, &tw), (&reg, &tw)] {
            let count = crate::search::enumerate_span(2, &[
                FpMatrix::from_rows(2, &[vec![1, 0], vec![0, 0]]),
                FpMatrix::from_rows(2, &[vec![0, 1], vec![0, 0]]),
                FpMatrix::from_rows(2, &[vec![0, 0], vec![1, 0]]),
                FpMatrix::from_rows(2, &[vec![0, 0], vec![0, 1]]),
            ], 2, 2, 16)
            .unwrap()
            .into_iter()
            .filter(|f| m.is_map_to(n, f))
            .count();
            assert_eq!(count, 1 << hom_space(m, n).len());
        }
    }

    #[test]
    fn twisted_regular_not_isomorphic() {
        let (r, frob) = f4();
        let reg = Bimodule::regular(r.clone());
        let tw = Bimodule::twisted(r, &frob).unwrap();
        assert_eq!(find_isomorphism(&reg, &tw, &Caps::default()), Decided::Absent);
        assert!(find_isomorphism(&tw, &tw, &Caps::default()).is_found());
    }

    #[test]
    fn non_unital_rejected() {
        let r = Arc::new(product_of_prime_fields(3, 2, vec![vec![1, 1]]).unwrap());
        let zero = FpMatrix::zeros(3, 1, 1);
        let err = Bimodule::new(r, 1, vec![zero.clone(), zero.clone()], vec![zero.clone(), zero]).unwrap_err();
        assert_eq!(err, Error::NotUnital { basis: 0 });
    }

    #[test]
    fn direct_sum_dimensions() {
        let (r, _) = f4();
        let reg = Bimodule::regular(r);
        let two = reg.power(2);
        assert_eq!(two.dim(), 4);
        assert_eq!(hom_space(&two, &two).len(), 8);
    }
}
