//! Direct-summand witnesses, similarity of bimodules and the twist isomorphism.

use crate::algebra::FpMatrix;
use crate::bimodule::{hom_space, Bimodule};
use crate::center::{invariants_functor, z_modules_isomorphic, z_tensor, CenterRing};
use crate::tensor::TensorNode;
use crate::{Caps, Decided, Error, Result};

/// `iota : M -> N^(k)` and `pi : N^(k) -> M` with `pi o iota = id_M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SummandWitness {
    pub k: usize,
    pub iota: FpMatrix,
    pub pi: FpMatrix,
}

impl SummandWitness {
    /// `i`-th component `M -> N`.
    pub fn iota_component(&self, i: usize, n_dim: usize) -> FpMatrix {
        self.iota.submatrix(i * n_dim..(i + 1) * n_dim, 0..self.iota.cols())
    }

    /// `i`-th component `N -> M`.
    pub fn pi_component(&self, i: usize, n_dim: usize) -> FpMatrix {
        self.pi.submatrix(0..self.pi.rows(), i * n_dim..(i + 1) * n_dim)
    }

    pub fn check(&self, m: &Bimodule, n: &Bimodule) -> Result<()> {
        let nk = n.power(self.k);
        if !m.is_map_to(&nk, &self.iota) || !nk.is_map_to(m, &self.pi) || !self.pi.mul(&self.iota).is_identity() {
            return Err(Error::InvalidSplitData);
        }
        Ok(())
    }
}

/// Decides whether `M | N^(k)` for some `k`.
///
/// `M` is a summand of a finite power of `N` exactly when `id_M` lies in the span of
/// the composites `pi_a o iota_b` with `iota_b : M -> N`, `pi_a : N -> M`. A solution
/// matrix `C` of rank `k` factors as `X Y`, which yields a witness with `k` copies.
pub fn summand_test(m: &Bimodule, n: &Bimodule, k_max: usize) -> Decided<SummandWitness> {
    let p = m.p();
    if m.dim() == 0 {
        return Decided::Found(SummandWitness { k: 0, iota: FpMatrix::zeros(p, 0, 0), pi: FpMatrix::zeros(p, 0, 0) });
    }
    let ins = hom_space(m, n);
    let outs = hom_space(n, m);
    if ins.is_empty() || outs.is_empty() {
        return Decided::Absent;
    }
    let (ni, no) = (ins.len(), outs.len());
    let dm = m.dim();
    let mut system = FpMatrix::zeros(p, dm * dm, no * ni);
    for (a, pa) in outs.iter().enumerate() {
        for (b, ib) in ins.iter().enumerate() {
            let comp = pa.mul(ib);
            for (row, &v) in comp.data().iter().enumerate() {
                system.set(row, a * ni + b, v);
            }
        }
    }
    let target = FpMatrix::identity(p, dm);
    let Ok(Some(sol)) = system.solve(target.data()) else {
        return Decided::Absent;
    };
    let c = FpMatrix::from_rows(p, &sol.particular.chunks(ni).map(|r| r.to_vec()).collect::<Vec<_>>());
    let (rref, pivots) = c.rref();
    let k = pivots.len();
    for smaller in 1..k.min(k_max + 1) {
        if let Some(w) = fewer_copies(m, n, &ins, &outs, smaller) {
            return Decided::Found(w);
        }
    }
    if k > k_max {
        return Decided::Undecided(format!("witness needs {k} copies, above k_max = {k_max}"));
    }
    let y = rref.submatrix(0..k, 0..ni);
    let mut iota = FpMatrix::zeros(p, 0, dm);
    let mut pi = FpMatrix::zeros(p, dm, 0);
    for j in 0..k {
        let mut iota_j = FpMatrix::zeros(p, n.dim(), dm);
        for (b, ib) in ins.iter().enumerate() {
            if y.get(j, b) != 0 {
                iota_j = iota_j.add(&ib.scale(y.get(j, b)));
            }
        }
        let mut pi_j = FpMatrix::zeros(p, dm, n.dim());
        for (a, pa) in outs.iter().enumerate() {
            let x = c.get(a, pivots[j]);
            if x != 0 {
                pi_j = pi_j.add(&pa.scale(x));
            }
        }
        iota = iota.vstack(&iota_j);
        pi = pi.hstack(&pi_j);
    }
    let w = SummandWitness { k, iota, pi };
    debug_assert!(w.check(m, n).is_ok());
    Decided::Found(w)
}

/// Exhaustive search for a witness with exactly `k` copies: each candidate
/// `iota : M -> N^(k)` leaves a linear system for the retraction.
fn fewer_copies(m: &Bimodule, n: &Bimodule, ins: &[FpMatrix], outs: &[FpMatrix], k: usize) -> Option<SummandWitness> {
    let p = m.p();
    let (dm, dn) = (m.dim(), n.dim());
    let size = crate::search::span_size(p, ins.len() * k)?;
    if size > 1 << 16 {
        return None;
    }
    let mut iota_basis = Vec::with_capacity(ins.len() * k);
    let mut pi_basis = Vec::with_capacity(outs.len() * k);
    for copy in 0..k {
        for b in ins {
            let mut big = FpMatrix::zeros(p, dn * k, dm);
            for i in 0..dn {
                for j in 0..dm {
                    big.set(copy * dn + i, j, b.get(i, j));
                }
            }
            iota_basis.push(big);
        }
        for a in outs {
            let mut big = FpMatrix::zeros(p, dm, dn * k);
            for i in 0..dm {
                for j in 0..dn {
                    big.set(i, copy * dn + j, a.get(i, j));
                }
            }
            pi_basis.push(big);
        }
    }
    let all = crate::search::enumerate_span(p, &iota_basis, dn * k, dm, size)?;
    let target = FpMatrix::identity(p, dm);
    for iota in all {
        if iota.rank() != dm {
            continue;
        }
        let mut system = FpMatrix::zeros(p, dm * dm, pi_basis.len());
        for (a, pa) in pi_basis.iter().enumerate() {
            for (row, &v) in pa.mul(&iota).data().iter().enumerate() {
                system.set(row, a, v);
            }
        }
        if let Ok(Some(sol)) = system.solve(target.data()) {
            let pi = crate::search::linear_combination(p, &pi_basis, &sol.particular, dm, dn * k);
            return Some(SummandWitness { k, iota, pi });
        }
    }
    None
}

/// `M ~ N` iff each is a summand of a finite power of the other.
pub fn is_similar(m: &Bimodule, n: &Bimodule, k_max: usize) -> Decided<(SummandWitness, SummandWitness)> {
    match (summand_test(m, n, k_max), summand_test(n, m, k_max)) {
        (Decided::Found(a), Decided::Found(b)) => Decided::Found((a, b)),
        (Decided::Absent, _) | (_, Decided::Absent) => Decided::Absent,
        (Decided::Undecided(s), _) | (_, Decided::Undecided(s)) => Decided::Undecided(s),
    }
}

/// `T_{M,N} : M (x) N -> N (x) M`, `x (x) y -> sum_i phi_i(x) y (x) psi_i(e)`,
/// from a witness of `M | R`.
pub fn twist_map_with(m: &Bimodule, n: &Bimodule, split: &SummandWitness) -> Result<(TensorNode, TensorNode, FpMatrix)> {
    let reg = Bimodule::regular(m.ring().clone());
    split.check(m, &reg)?;
    let p = m.p();
    let rd = reg.dim();
    let mn = TensorNode::pair(m, n);
    let nm = TensorNode::pair(n, m);
    let mut plain = FpMatrix::zeros(p, nm.dim(), m.dim() * n.dim());
    for a in 0..m.dim() {
        let x = m.basis(a);
        for b in 0..n.dim() {
            let y = n.basis(b);
            let e = unit_for_pair(m, &x, n, &y)?;
            let mut acc = vec![0u64; n.dim() * m.dim()];
            for i in 0..split.k {
                let phi = split.iota_component(i, rd);
                let psi = split.pi_component(i, rd);
                let r = phi.mul_vec(&x);
                let ny = n.act_left(&r, &y);
                let me = psi.mul_vec(&e);
                for (s, &u) in ny.iter().enumerate() {
                    if u == 0 {
                        continue;
                    }
                    for (t, &v) in me.iter().enumerate() {
                        let idx = s * m.dim() + t;
                        acc[idx] = (acc[idx] + u * v) % p;
                    }
                }
            }
            let image = nm.top.proj.mul_vec(&acc);
            for (row, v) in image.into_iter().enumerate() {
                plain.set(row, a * n.dim() + b, v);
            }
        }
    }
    let t = mn.descend(&plain)?;
    Ok((mn, nm, t))
}

pub fn twist_map(m: &Bimodule, n: &Bimodule, k_max: usize) -> Result<(TensorNode, TensorNode, FpMatrix)> {
    let reg = Bimodule::regular(m.ring().clone());
    let split = match summand_test(m, &reg, k_max) {
        Decided::Found(w) => w,
        Decided::Absent => return Err(Error::NotSummandOfFreeR),
        Decided::Undecided(s) => return Err(Error::Undecided(s)),
    };
    twist_map_with(m, n, &split)
}

/// First local unit acting as identity on both sides of `x` in `M` and `y` in `N`.
pub fn unit_for_pair(m: &Bimodule, x: &[u64], n: &Bimodule, y: &[u64]) -> Result<Vec<u64>> {
    m.ring()
        .units()
        .iter()
        .find(|e| m.absorbs(e, x) && n.absorbs(e, y))
        .cloned()
        .ok_or(Error::NoCommonUnit)
}

/// Compares `(M (x) N)^R` with `M^R (x)_Z N^R` as `Z`-modules.
pub fn monoidal_comparison(center: &CenterRing, m: &Bimodule, n: &Bimodule, caps: &Caps) -> Result<Decided<FpMatrix>> {
    let mn = TensorNode::pair(m, n);
    let lhs = invariants_functor(center, &mn.module)?;
    let a = invariants_functor(center, m)?;
    let b = invariants_functor(center, n)?;
    let rhs = z_tensor(m.p(), &a.module, &b.module);
    Ok(z_modules_isomorphic(m.p(), &lhs.module, &rhs, caps))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::ring::{finite_field, product_of_prime_fields};

    fn split_ring() -> Arc<crate::ring::LocalUnitRing> {
        Arc::new(product_of_prime_fields(3, 2, vec![vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap())
    }

    fn corner(r: &Arc<crate::ring::LocalUnitRing>, i: usize) -> Bimodule {
        let p = r.p();
        let one = FpMatrix::identity(p, 1);
        let zero = FpMatrix::zeros(p, 1, 1);
        let acts: Vec<FpMatrix> = (0..2).map(|j| if j == i { one.clone() } else { zero.clone() }).collect();
        Bimodule::new(r.clone(), 1, acts.clone(), acts).unwrap()
    }

    #[test]
    fn summand_examples() {
        let r = split_ring();
        let reg = Bimodule::regular(r.clone());
        let w = summand_test(&reg, &reg, 16).found().unwrap();
        assert_eq!(w.k, 1);
        let e1 = corner(&r, 0);
        assert_eq!(summand_test(&e1, &reg, 16).found().unwrap().k, 1);
        assert_eq!(summand_test(&reg, &e1, 16), Decided::Absent);
        assert_eq!(is_similar(&reg, &e1, 16), Decided::Absent);
        assert!(is_similar(&reg, &reg, 16).is_found());

        let (f4, frob) = finite_field(2, 2).unwrap();
        let f4 = Arc::new(f4);
        let tw = Bimodule::twisted(f4.clone(), &frob).unwrap();
        let reg4 = Bimodule::regular(f4);
        assert_eq!(summand_test(&tw, &reg4, 16), Decided::Absent);
        assert_eq!(is_similar(&tw, &reg4, 16), Decided::Absent);
    }

    #[test]
    fn twist_on_regular_is_identity_like() {
        let r = split_ring();
        let reg = Bimodule::regular(r);
        let (mn, nm, t) = twist_map(&reg, &reg, 16).unwrap();
        assert!(t.is_invertible());
        assert!(mn.module.is_map_to(&nm.module, &t));
        // x (x) y -> xy (x) e agrees with the identity of R (x) R
        let mult = crate::tensor::left_action_plain(&reg);
        let mu_mn = mn.descend(&mult).unwrap();
        let mu_nm = nm.descend(&mult).unwrap();
        assert_eq!(mu_nm.mul(&t), mu_mn);
    }

    #[test]
    fn twist_on_corners() {
        let r = split_ring();
        let e1 = corner(&r, 0);
        let e2 = corner(&r, 1);
        let (mn, _, t) = twist_map(&e1, &e2, 16).unwrap();
        assert_eq!(mn.dim(), 0);
        assert_eq!(t.rows(), 0);
        let (mm, _, t) = twist_map(&e1, &e1, 16).unwrap();
        assert_eq!(mm.dim(), 1);
        assert!(t.is_invertible());
    }

    #[test]
    fn monoidal_comparison_on_regular() {
        let (f4, _) = finite_field(2, 2).unwrap();
        let f4 = Arc::new(f4);
        let z = CenterRing::new(f4.clone(), 1_000_000).unwrap();
        let reg = Bimodule::regular(f4);
        let two = reg.power(2);
        assert!(monoidal_comparison(&z, &reg, &two, &Caps::default()).unwrap().is_found());
    }
}
