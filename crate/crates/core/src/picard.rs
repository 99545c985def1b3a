//! Invertible bimodules, unit decompositions, the isomorphism `Aut_{R-R}(X) -> U(Z)`
//! and the action of the Picard group on `U(Z)`.

use std::collections::HashSet;

use crate::algebra::{FpMatrix, Subspace};
use crate::bimodule::{automorphisms, find_isomorphism, hom_space, intertwiners, Bimodule};
use crate::center::CenterRing;
use crate::ring::RingExtension;
use crate::tensor::TensorNode;
use crate::{Caps, Decided, Error, Result};

/// `X` with a partner `Y` and isomorphisms `l : X (x) Y -> R`, `r : Y (x) X -> R`
/// forming a Morita context.
#[derive(Clone, Debug)]
pub struct InvertibleBimodule {
    pub x: Bimodule,
    pub y: Bimodule,
    pub xy: TensorNode,
    pub yx: TensorNode,
    /// `R.dim x xy.dim`.
    pub l: FpMatrix,
    /// `R.dim x yx.dim`.
    pub r: FpMatrix,
}

/// `e = sum l(x_i (x) y_i)` with `e x_i = x_i` and `y_i e = y_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitDecomposition {
    pub e: Vec<u64>,
    pub pairs: Vec<(Vec<u64>, Vec<u64>)>,
}

/// The right dual `Hom_{-R}(X, R)` as a bimodule, with its basis of functionals.
pub fn right_dual(x: &Bimodule) -> Result<(Bimodule, Vec<FpMatrix>)> {
    let ring = x.ring();
    let p = x.p();
    let n = ring.dim();
    let src: Vec<&FpMatrix> = x.right_basis().iter().collect();
    let tgt: Vec<&FpMatrix> = ring.right_basis_matrices().iter().collect();
    let funcs = intertwiners(p, x.dim(), n, &src, &tgt);
    let d = funcs.len();
    let cols: Vec<Vec<u64>> = funcs.iter().map(|f| f.data().to_vec()).collect();
    let span = FpMatrix::from_columns(p, n * x.dim(), &cols);
    let coords = |f: &FpMatrix| -> Result<Vec<u64>> {
        span.solve(f.data())?
            .map(|s| s.particular)
            .ok_or_else(|| Error::NotInvertible("dual is not closed under the actions".into()))
    };
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    for i in 0..n {
        // (r.f)(x) = r f(x), (f.r)(x) = f(r x)
        let lr = &ring.left_basis_matrices()[i];
        let xl = &x.left_basis()[i];
        let lcols: Result<Vec<_>> = funcs.iter().map(|f| coords(&lr.mul(f))).collect();
        let rcols: Result<Vec<_>> = funcs.iter().map(|f| coords(&f.mul(xl))).collect();
        left.push(FpMatrix::from_columns(p, d, &lcols?));
        right.push(FpMatrix::from_columns(p, d, &rcols?));
    }
    let y = Bimodule::new(ring.clone(), d, left, right).map_err(|e| Error::NotInvertible(format!("dual: {e}")))?;
    Ok((y, funcs))
}

impl InvertibleBimodule {
    /// Builds the partner as the right dual with evaluation maps.
    pub fn from_dual(x: &Bimodule) -> Result<Self> {
        let ring = x.ring().clone();
        let p = x.p();
        let n = ring.dim();
        let (y, funcs) = right_dual(x)?;
        let xy = TensorNode::pair(x, &y);
        let yx = TensorNode::pair(&y, x);
        // r(f (x) x) = f(x)
        let mut r_plain = FpMatrix::zeros(p, n, y.dim() * x.dim());
        for (j, f) in funcs.iter().enumerate() {
            for a in 0..x.dim() {
                for row in 0..n {
                    r_plain.set(row, j * x.dim() + a, f.get(row, a));
                }
            }
        }
        // l(x (x) f) is the element acting on X as x' -> x f(x')
        let lefts: Vec<Vec<u64>> = x.left_basis().iter().map(|m| m.data().to_vec()).collect();
        let left_span = FpMatrix::from_columns(p, x.dim() * x.dim(), &lefts);
        let mut l_plain = FpMatrix::zeros(p, n, x.dim() * y.dim());
        for a in 0..x.dim() {
            let xa = x.basis(a);
            for (j, f) in funcs.iter().enumerate() {
                let cols: Vec<Vec<u64>> = (0..x.dim()).map(|b| x.act_right(&xa, &f.column(b))).collect();
                let target = FpMatrix::from_columns(p, x.dim(), &cols);
                let sol = left_span
                    .solve(target.data())?
                    .ok_or_else(|| Error::NotInvertible("x f(-) is not a left multiplication".into()))?;
                for (row, v) in sol.particular.into_iter().enumerate() {
                    l_plain.set(row, a * y.dim() + j, v);
                }
            }
        }
        let l = xy.descend(&l_plain).map_err(|_| Error::NotInvertible("l is not balanced".into()))?;
        let r = yx.descend(&r_plain).map_err(|_| Error::NotInvertible("r is not balanced".into()))?;
        let inv = InvertibleBimodule { x: x.clone(), y, xy, yx, l, r };
        inv.check_isomorphisms()?;
        if !inv.is_morita() {
            return Err(Error::NotInvertible("evaluation maps are not a Morita context".into()));
        }
        Ok(inv)
    }

    /// Validates supplied data; `r` is rescaled by a unit of `Z` if needed for compatibility.
    pub fn with_partner(x: &Bimodule, y: &Bimodule, l: FpMatrix, r: FpMatrix, center: &CenterRing) -> Result<Self> {
        let xy = TensorNode::pair(x, y);
        let yx = TensorNode::pair(y, x);
        let mut inv = InvertibleBimodule { x: x.clone(), y: y.clone(), xy, yx, l, r };
        inv.check_isomorphisms()?;
        if inv.is_morita() {
            return Ok(inv);
        }
        let original = inv.r.clone();
        for z in center.units() {
            inv.r = z.mul(&original);
            if inv.is_morita() {
                return Ok(inv);
            }
        }
        Err(Error::NotInvertible("no rescaling of r gives a Morita context".into()))
    }

    fn check_isomorphisms(&self) -> Result<()> {
        let reg = Bimodule::regular(self.x.ring().clone());
        for (name, node, map) in [("l", &self.xy, &self.l), ("r", &self.yx, &self.r)] {
            if map.rows() != reg.dim() || map.cols() != node.dim() || !map.is_invertible() {
                return Err(Error::NotInvertible(format!("{name} is not bijective")));
            }
            if !node.module.is_map_to(&reg, map) {
                return Err(Error::NotInvertible(format!("{name} is not R-bilinear")));
            }
        }
        Ok(())
    }

    /// `X (x) r = l (x) X` and `Y (x) l = r (x) Y`, checked on plain triples.
    pub fn is_morita(&self) -> bool {
        let (x, y) = (&self.x, &self.y);
        let lx = |a: usize, j: usize| self.l.mul_vec(&self.xy.proj.column(a * y.dim() + j));
        let ry = |j: usize, a: usize| self.r.mul_vec(&self.yx.proj.column(j * x.dim() + a));
        for a in 0..x.dim() {
            for j in 0..y.dim() {
                let l_aj = lx(a, j);
                for b in 0..x.dim() {
                    if x.act_left(&l_aj, &x.basis(b)) != x.act_right(&x.basis(a), &ry(j, b)) {
                        return false;
                    }
                }
            }
        }
        for j in 0..y.dim() {
            for a in 0..x.dim() {
                let r_ja = ry(j, a);
                for k in 0..y.dim() {
                    if y.act_right(&y.basis(j), &lx(a, k)) != y.act_left(&r_ja, &y.basis(k)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn dim(&self) -> usize {
        self.x.dim()
    }

    /// `l` evaluated on a pair of vectors.
    pub fn l_of(&self, xv: &[u64], yv: &[u64]) -> Vec<u64> {
        let plain = kron_vec(xv, yv, self.x.p());
        self.l.mul_vec(&self.xy.proj.mul_vec(&plain))
    }

    pub fn r_of(&self, yv: &[u64], xv: &[u64]) -> Vec<u64> {
        let plain = kron_vec(yv, xv, self.x.p());
        self.r.mul_vec(&self.yx.proj.mul_vec(&plain))
    }

    /// The decomposition read off the section of `l^{-1}(e)`, then normalized by `e`.
    pub fn unit_decomposition(&self, e: &[u64]) -> Result<UnitDecomposition> {
        let linv = self.l.inverse().ok_or_else(|| Error::NotInvertible("l".into()))?;
        let t = self.xy.sect.mul_vec(&linv.mul_vec(e));
        let (dx, dy) = (self.x.dim(), self.y.dim());
        let mut pairs = Vec::new();
        for a in 0..dx {
            let yv: Vec<u64> = t[a * dy..(a + 1) * dy].to_vec();
            if yv.iter().all(|&c| c == 0) {
                continue;
            }
            let xv = self.x.act_left(e, &self.x.basis(a));
            let yv = self.y.act_right(&yv, e);
            pairs.push((xv, yv));
        }
        let dec = UnitDecomposition { e: e.to_vec(), pairs };
        let p = self.x.p();
        let mut sum = vec![0u64; e.len()];
        for (xv, yv) in &dec.pairs {
            sum = crate::algebra::fp::vec_add(&sum, &self.l_of(xv, yv), p);
        }
        if sum != e {
            return Err(Error::NoSolution("unit decomposition does not recover e".into()));
        }
        Ok(dec)
    }

    /// `sigma~(r) = sum l(sigma(x_e) (x) y_e) r` for `e` a local unit of `r`.
    pub fn tilde(&self, center: &CenterRing, sigma: &FpMatrix) -> Result<FpMatrix> {
        if !self.x.is_map_to(&self.x, sigma) || !sigma.is_invertible() {
            return Err(Error::NotAutomorphism);
        }
        let ring = center.ring();
        let p = ring.p();
        let mut cols = Vec::with_capacity(ring.dim());
        let mut cache: Vec<Option<Vec<u64>>> = vec![None; ring.units().len()];
        for i in 0..ring.dim() {
            let ri = ring.basis(i);
            let ei = ring.unit_index_for(std::slice::from_ref(&ri))?;
            if cache[ei].is_none() {
                let dec = self.unit_decomposition(&ring.units()[ei])?;
                let mut c = vec![0u64; ring.dim()];
                for (xv, yv) in &dec.pairs {
                    c = crate::algebra::fp::vec_add(&c, &self.l_of(&sigma.mul_vec(xv), yv), p);
                }
                cache[ei] = Some(c);
            }
            cols.push(ring.mul(cache[ei].as_ref().expect("cached"), &ri));
        }
        let z = FpMatrix::from_columns(p, ring.dim(), &cols);
        if center.unit_index(&z).is_none() {
            return Err(Error::NoSolution("sigma~ is not a unit of Z".into()));
        }
        for b in 0..self.x.dim() {
            let t = self.x.basis(b);
            let e = self.x.unit_for(std::slice::from_ref(&t))?;
            if sigma.mul_vec(&t) != self.x.act_left(&z.mul_vec(&e), &t) {
                return Err(Error::NoSolution("sigma(t) differs from sigma~(e) t".into()));
            }
        }
        Ok(z)
    }

    /// `sigma_u : t -> t u(e)` for `e` a local unit of `t`.
    pub fn sigma_u(&self, u: &FpMatrix) -> Result<FpMatrix> {
        let mut cols = Vec::with_capacity(self.x.dim());
        for b in 0..self.x.dim() {
            let t = self.x.basis(b);
            let e = self.x.unit_for(std::slice::from_ref(&t))?;
            cols.push(self.x.act_right(&t, &u.mul_vec(&e)));
        }
        Ok(FpMatrix::from_columns(self.x.p(), self.x.dim(), &cols))
    }

    /// `alpha_[X](u) = (sigma_u)~`.
    pub fn alpha(&self, center: &CenterRing, u: &FpMatrix) -> Result<FpMatrix> {
        self.tilde(center, &self.sigma_u(u)?)
    }

    /// `alpha_[X](u)(r) = sum r l(x_e u(e_1) (x) y_e)` with `e_1` a unit of the pair.
    pub fn alpha_by_formula(&self, center: &CenterRing, u: &FpMatrix) -> Result<FpMatrix> {
        let ring = center.ring();
        let p = ring.p();
        let mut cols = Vec::with_capacity(ring.dim());
        for i in 0..ring.dim() {
            let ri = ring.basis(i);
            let e = ring.unit_for(std::slice::from_ref(&ri))?;
            let dec = self.unit_decomposition(&e)?;
            let mut c = vec![0u64; ring.dim()];
            for (xv, yv) in &dec.pairs {
                let e1 = ring
                    .units()
                    .iter()
                    .find(|f| self.x.absorbs(f, xv) && self.y.absorbs(f, yv))
                    .ok_or(Error::NoCommonUnit)?;
                let xu = self.x.act_right(xv, &u.mul_vec(e1));
                c = crate::algebra::fp::vec_add(&c, &self.l_of(&xu, yv), p);
            }
            cols.push(ring.mul(&ri, &c));
        }
        Ok(FpMatrix::from_columns(p, ring.dim(), &cols))
    }

    /// The class of `X (x) X'`, with the partner rebuilt as a dual.
    pub fn tensor(&self, other: &InvertibleBimodule) -> Result<InvertibleBimodule> {
        let node = TensorNode::pair(&self.x, &other.x);
        InvertibleBimodule::from_dual(&node.module)
    }

    /// The class of `Y`.
    pub fn inverse(&self) -> Result<InvertibleBimodule> {
        let xy = self.yx.clone();
        let yx = self.xy.clone();
        let inv = InvertibleBimodule { x: self.y.clone(), y: self.x.clone(), xy, yx, l: self.r.clone(), r: self.l.clone() };
        inv.check_isomorphisms()?;
        Ok(inv)
    }
}

pub fn kron_vec(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &u in a {
        for &v in b {
            out.push(u * v % p);
        }
    }
    out
}

/// Exhausts `Aut_{R-R}(X)` and checks that `sigma -> sigma~` is a group isomorphism onto `U(Z)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TildeReport {
    pub automorphisms: usize,
    pub bijective: bool,
    pub multiplicative: bool,
}

pub fn check_tilde(inv: &InvertibleBimodule, center: &CenterRing, cap: u64) -> Result<TildeReport> {
    let auts = automorphisms(&inv.x, cap)?;
    let images: Vec<usize> = auts
        .iter()
        .map(|s| inv.tilde(center, s).map(|z| center.unit_index(&z).expect("tilde lands in U(Z)")))
        .collect::<Result<_>>()?;
    let distinct: HashSet<usize> = images.iter().copied().collect();
    let bijective = distinct.len() == auts.len() && auts.len() == center.units().len();
    let mut multiplicative = true;
    for (i, s) in auts.iter().enumerate() {
        for (j, t) in auts.iter().enumerate() {
            let st = inv.tilde(center, &s.mul(t))?;
            let prod = center.units()[images[i]].mul(&center.units()[images[j]]);
            if st != prod {
                multiplicative = false;
            }
        }
    }
    Ok(TildeReport { automorphisms: auts.len(), bijective, multiplicative })
}

/// Class equality in the Picard group.
pub fn pic_class_eq(a: &Bimodule, b: &Bimodule, caps: &Caps) -> Decided<FpMatrix> {
    find_isomorphism(a, b, caps)
}

/// An invertible sub-bimodule `X` of `S` with partner `Y`, `XY = R = YX` inside `S`.
#[derive(Clone, Debug)]
pub struct InvElement {
    pub x_basis: Vec<Vec<u64>>,
    pub y_basis: Vec<Vec<u64>>,
    pub inv: InvertibleBimodule,
}

fn product_span(ext: &RingExtension, a: &[Vec<u64>], b: &[Vec<u64>]) -> Subspace {
    let mut prods = Vec::with_capacity(a.len() * b.len());
    for u in a {
        for v in b {
            prods.push(ext.top.mul(u, v));
        }
    }
    Subspace::span(ext.top.p(), ext.top.dim(), &prods)
}

/// Checks `XY = emb(R) = YX` in `S` and builds `l`, `r` from the multiplication of `S`.
pub fn verify_inv_element(ext: &RingExtension, x_basis: &[Vec<u64>], y_basis: &[Vec<u64>], center: &CenterRing) -> Result<InvElement> {
    let x = Bimodule::from_subspace(ext, x_basis)?;
    let y = Bimodule::from_subspace(ext, y_basis)?;
    let image = Subspace::span(ext.top.p(), ext.top.dim(), &ext.emb.columns());
    for (side, a, b) in [("XY", x_basis, y_basis), ("YX", y_basis, x_basis)] {
        let span = product_span(ext, a, b);
        if !(span.contains_subspace(&image) && image.contains_subspace(&span)) {
            return Err(Error::ProductNotR { side, achieved: span.dim(), expected: image.dim() });
        }
    }
    let p = ext.top.p();
    let mult_map = |a: &[Vec<u64>], b: &[Vec<u64>]| -> Result<FpMatrix> {
        let mut cols = Vec::with_capacity(a.len() * b.len());
        for u in a {
            for v in b {
                cols.push(ext.pull_back(&ext.top.mul(u, v)).ok_or(Error::NoSolution("product outside R".into()))?);
            }
        }
        Ok(FpMatrix::from_columns(p, ext.base.dim(), &cols))
    };
    let xy = TensorNode::pair(&x, &y);
    let yx = TensorNode::pair(&y, &x);
    let l = xy.descend(&mult_map(x_basis, y_basis)?)?;
    let r = yx.descend(&mult_map(y_basis, x_basis)?)?;
    let inv = InvertibleBimodule::with_partner(&x, &y, l, r, center)?;
    Ok(InvElement { x_basis: x_basis.to_vec(), y_basis: y_basis.to_vec(), inv })
}

/// Dimension of `Hom_{R-R}(X, R)`; zero for nontrivial twists of commutative rings.
pub fn hom_to_base_dim(x: &Bimodule) -> usize {
    hom_space(x, &Bimodule::regular(x.ring().clone())).len()
}
