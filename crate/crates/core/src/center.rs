//! The commutative ring `Z = End_{R-R}(R)`, its unit group and its action on bimodules.

use std::collections::HashMap;
use std::sync::Arc;

use crate::algebra::{present_enumerated, AbelianGroupPresentation, EnumeratedAbelian, FpMatrix};
use crate::bimodule::{hom_space, intertwiners, Bimodule};
use crate::ring::LocalUnitRing;
use crate::search::enumerate_span;
use crate::tensor::Quotient;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct CenterRing {
    ring: Arc<LocalUnitRing>,
    basis: Vec<FpMatrix>,
    elements: Vec<FpMatrix>,
    units: Vec<FpMatrix>,
    unit_index: HashMap<FpMatrix, usize>,
    unit_group: EnumeratedAbelian,
    identity: usize,
}

impl CenterRing {
    pub fn new(ring: Arc<LocalUnitRing>, cap: u64) -> Result<Self> {
        let reg = Bimodule::regular(ring.clone());
        let basis = hom_space(&reg, &reg);
        let n = ring.dim();
        let elements = enumerate_span(ring.p(), &basis, n, n, cap)
            .ok_or_else(|| Error::SizeCap(format!("Z has {}^{} elements", ring.p(), basis.len())))?;
        for a in &basis {
            for b in &basis {
                if a.mul(b) != b.mul(a) {
                    return Err(Error::NotBimodule("End(R) is not commutative".into()));
                }
            }
        }
        let units: Vec<FpMatrix> = elements.iter().filter(|z| z.is_invertible()).cloned().collect();
        let unit_index: HashMap<FpMatrix, usize> = units.iter().cloned().enumerate().map(|(i, u)| (u, i)).collect();
        let identity = unit_index[&FpMatrix::identity(ring.p(), n)];
        let unit_group = present_enumerated(units.len(), identity, |a, b| unit_index[&units[a].mul(&units[b])])?;
        Ok(CenterRing { ring, basis, elements, units, unit_index, unit_group, identity })
    }

    pub fn ring(&self) -> &Arc<LocalUnitRing> {
        &self.ring
    }

    pub fn basis(&self) -> &[FpMatrix] {
        &self.basis
    }

    pub fn elements(&self) -> &[FpMatrix] {
        &self.elements
    }

    pub fn units(&self) -> &[FpMatrix] {
        &self.units
    }

    pub fn unit_group(&self) -> &AbelianGroupPresentation {
        &self.unit_group.group
    }

    pub fn identity_index(&self) -> usize {
        self.identity
    }

    pub fn unit_index(&self, z: &FpMatrix) -> Option<usize> {
        self.unit_index.get(z).copied()
    }

    /// Exponent-vector coordinates of a unit.
    pub fn log(&self, z: &FpMatrix) -> Option<Vec<u64>> {
        self.unit_index(z).map(|i| self.unit_group.coords(i).to_vec())
    }

    /// The unit with the given exponent-vector coordinates.
    pub fn exp(&self, coords: &[u64]) -> &FpMatrix {
        &self.units[self.unit_group.element(coords)]
    }

    pub fn unit_coords(&self, index: usize) -> &[u64] {
        self.unit_group.coords(index)
    }

    /// The element `z(e)` of `R` for `e` in `E`.
    pub fn at_unit(&self, z: &FpMatrix, e: &[u64]) -> Vec<u64> {
        z.mul_vec(e)
    }

    /// The action of `z` on a unital bimodule: `m -> z(e) m` with `e` a local unit of `m`.
    pub fn action_on(&self, m: &Bimodule, z: &FpMatrix) -> Result<FpMatrix> {
        let mut cols = Vec::with_capacity(m.dim());
        for b in 0..m.dim() {
            let v = m.basis(b);
            let e = m.unit_for(std::slice::from_ref(&v))?;
            cols.push(m.act_left(&z.mul_vec(&e), &v));
        }
        Ok(FpMatrix::from_columns(m.p(), m.dim(), &cols))
    }
}

/// A finite-dimensional `Z`-module: one action matrix per basis element of `Z`.
#[derive(Clone, Debug)]
pub struct ZModule {
    pub dim: usize,
    pub actions: Vec<FpMatrix>,
}

impl ZModule {
    pub fn action(&self, p: u64, coeffs: &[u64]) -> FpMatrix {
        let mut out = FpMatrix::zeros(p, self.dim, self.dim);
        for (a, &c) in self.actions.iter().zip(coeffs) {
            if c != 0 {
                out = out.add(&a.scale(c));
            }
        }
        out
    }
}

/// `Z`-module isomorphism test by exhaustive search over the intertwiner space.
pub fn z_modules_isomorphic(p: u64, a: &ZModule, b: &ZModule, caps: &crate::Caps) -> crate::Decided<FpMatrix> {
    if a.dim != b.dim {
        return crate::Decided::Absent;
    }
    let src: Vec<&FpMatrix> = a.actions.iter().collect();
    let tgt: Vec<&FpMatrix> = b.actions.iter().collect();
    let basis = intertwiners(p, a.dim, b.dim, &src, &tgt);
    if a.dim == 0 {
        return crate::Decided::Found(FpMatrix::zeros(p, 0, 0));
    }
    crate::search::find_in_span(p, &basis, b.dim, a.dim, caps, |f| f.is_invertible())
}

/// `M^R = Hom_{R-R}(R, M)` with the `Z`-action `z.f = f o z`, and the evaluation
/// isomorphism `R (x)_Z M^R -> M`.
#[derive(Clone, Debug)]
pub struct Invariants {
    /// Basis maps `R -> M`.
    pub basis: Vec<FpMatrix>,
    pub module: ZModule,
    pub tensor: Quotient,
    /// `eta : R (x)_Z M^R -> M` on the quotient.
    pub eta: FpMatrix,
}

fn coords_in(p: u64, basis: &[FpMatrix], target: &FpMatrix) -> Result<Vec<u64>> {
    let cols: Vec<Vec<u64>> = basis.iter().map(|b| b.data().to_vec()).collect();
    let a = FpMatrix::from_columns(p, target.data().len(), &cols);
    a.solve(target.data())?
        .map(|s| s.particular)
        .ok_or_else(|| Error::NoSolution("element outside the span".into()))
}

/// Computes `M^R` and checks that evaluation is an isomorphism.
pub fn invariants_functor(center: &CenterRing, m: &Bimodule) -> Result<Invariants> {
    let p = m.p();
    let r = center.ring();
    let reg = Bimodule::regular(r.clone());
    let basis = hom_space(&reg, m);
    let h = basis.len();
    let mut actions = Vec::with_capacity(center.basis().len());
    for z in center.basis() {
        let mut cols = Vec::with_capacity(h);
        for f in &basis {
            cols.push(coords_in(p, &basis, &f.mul(z))?);
        }
        actions.push(FpMatrix::from_columns(p, h, &cols));
    }
    let module = ZModule { dim: h, actions };
    let n = r.dim();
    let ambient = n * h;
    let mut rel = FpMatrix::zeros(p, 0, ambient);
    for (z, az) in center.basis().iter().zip(&module.actions) {
        // r z (x) f - r (x) z.f, with R a right Z-module through r.z = z(r)
        let gen = z.kron(&FpMatrix::identity(p, h)).sub(&FpMatrix::identity(p, n).kron(az)).transpose();
        rel = rel.vstack(&gen);
    }
    let tensor = Quotient::from_relations(p, ambient, &rel);
    let mut plain = FpMatrix::zeros(p, m.dim(), ambient);
    for i in 0..n {
        for (j, f) in basis.iter().enumerate() {
            for (row, v) in f.column(i).into_iter().enumerate() {
                plain.set(row, i * h + j, v);
            }
        }
    }
    let eta = tensor.descend(&plain)?;
    if !eta.is_invertible() {
        return Err(Error::NotSummandOfFreeR);
    }
    Ok(Invariants { basis, module, tensor, eta })
}

/// `A (x)_Z B` for two `Z`-modules.
pub fn z_tensor(p: u64, a: &ZModule, b: &ZModule) -> ZModule {
    let ambient = a.dim * b.dim;
    let ia = FpMatrix::identity(p, a.dim);
    let ib = FpMatrix::identity(p, b.dim);
    let mut rel = FpMatrix::zeros(p, 0, ambient);
    for (za, zb) in a.actions.iter().zip(&b.actions) {
        rel = rel.vstack(&za.kron(&ib).sub(&ia.kron(zb)).transpose());
    }
    let q = Quotient::from_relations(p, ambient, &rel);
    let actions = a.actions.iter().map(|za| q.proj.mul(&za.kron(&ib)).mul(&q.sect)).collect();
    ZModule { dim: q.dim(), actions }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{finite_field, product_of_prime_fields};
    use crate::Caps;

    #[test]
    fn unit_groups() {
        let (f4, _) = finite_field(2, 2).unwrap();
        let z = CenterRing::new(Arc::new(f4), 1_000_000).unwrap();
        assert_eq!(z.elements().len(), 4);
        assert_eq!(z.unit_group().invariant_factors, vec![3]);
        let (f3, _) = finite_field(3, 1).unwrap();
        let z = CenterRing::new(Arc::new(f3), 1_000_000).unwrap();
        assert_eq!(z.unit_group().invariant_factors, vec![2]);
        let r = product_of_prime_fields(3, 2, vec![vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let z = CenterRing::new(Arc::new(r), 1_000_000).unwrap();
        assert_eq!(z.unit_group().invariant_factors, vec![2, 2]);
    }

    #[test]
    fn log_exp_round_trip() {
        let (f9, _) = finite_field(3, 2).unwrap();
        let z = CenterRing::new(Arc::new(f9), 1_000_000).unwrap();
        assert_eq!(z.unit_group().invariant_factors, vec![8]);
        for u in z.units() {
            assert_eq!(z.exp(&z.log(u).unwrap()), u);
        }
    }

    #[test]
    fn invariants_of_regular_and_free() {
        let (f4, _) = finite_field(2, 2).unwrap();
        let r = Arc::new(f4);
        let z = CenterRing::new(r.clone(), 1_000_000).unwrap();
        let reg = Bimodule::regular(r);
        let inv = invariants_functor(&z, &reg).unwrap();
        assert_eq!(inv.module.dim, 2);
        let two = reg.power(2);
        let inv2 = invariants_functor(&z, &two).unwrap();
        assert_eq!(inv2.module.dim, 4);
        let free = z_tensor(2, &inv.module, &inv.module);
        assert!(z_modules_isomorphic(2, &free, &inv.module, &Caps::default()).is_found());
    }

    #[test]
    fn action_on_regular_is_z() {
        let r = Arc::new(product_of_prime_fields(3, 2, vec![vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap());
        let z = CenterRing::new(r.clone(), 1_000_000).unwrap();
        let reg = Bimodule::regular(r);
        for u in z.elements() {
            assert_eq!(&z.action_on(&reg, u).unwrap(), u);
        }
    }
}
