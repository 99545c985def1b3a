//! Factor maps, generalized crossed products, the obstruction 3-cocycle,
//! comparison 2-cocycles and the group of crossed-product classes.

use std::sync::Arc;

use crate::algebra::{FiniteGroupTable, FpMatrix};
use crate::bimodule::{find_isomorphism, Bimodule};
use crate::center::CenterRing;
use crate::cohomology::{differential, Cochain, CohomologyGroup, GModule};
use crate::picard::{kron_vec, InvertibleBimodule};
use crate::ring::{LocalUnitRing, RingData, RingExtension};
use crate::similarity::{summand_test, twist_map_with, SummandWitness};
use crate::tensor::{apply_kron, left_action_plain, right_action_plain, TensorNode};
use crate::{Caps, Decided, Error, Result};

/// `Theta_x` with multiplication maps `F_{x,y} : Theta_x (x) Theta_y -> Theta_xy` and `iota : R -> Theta_1`.
///
/// Unit triangles always hold; associativity is recorded in `associative`.
#[derive(Clone, Debug)]
pub struct FactorMap {
    group: FiniteGroupTable,
    theta: Vec<InvertibleBimodule>,
    pairs: Vec<TensorNode>,
    f: Vec<FpMatrix>,
    iota: FpMatrix,
    associative: bool,
}

impl FactorMap {
    /// Validates a factor map given by `F_{x,y}` on plain pairs of basis vectors, indexed `x * |G| + y`.
    pub fn validate(group: FiniteGroupTable, theta: Vec<InvertibleBimodule>, f_plain: Vec<FpMatrix>, iota: FpMatrix) -> Result<Self> {
        let fm = Self::quasi(group, theta, f_plain, iota)?;
        if let Some((x, y, z)) = fm.associativity_failure() {
            return Err(Error::AssocFail { x, y, z });
        }
        Ok(fm)
    }

    /// Like [`FactorMap::validate`] without requiring associativity.
    pub fn quasi(group: FiniteGroupTable, theta: Vec<InvertibleBimodule>, f_plain: Vec<FpMatrix>, iota: FpMatrix) -> Result<Self> {
        let n = group.order();
        if theta.len() != n || f_plain.len() != n * n {
            return Err(Error::Shape("factor map needs one Theta per element and one F per pair".into()));
        }
        let ring = theta[0].x.ring().clone();
        if theta.iter().any(|t| !Arc::ptr_eq(t.x.ring(), &ring)) {
            return Err(Error::Shape("Theta components over different rings".into()));
        }
        let mut pairs = Vec::with_capacity(n * n);
        let mut f = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let node = TensorNode::pair(&theta[x].x, &theta[y].x);
                let xy = group.mul(x, y);
                let plain = &f_plain[x * n + y];
                if plain.rows() != theta[xy].dim() || plain.cols() != node.plain_dim() {
                    return Err(Error::NotIso { x, y });
                }
                let map = node.descend(plain).map_err(|_| Error::NotIso { x, y })?;
                if !map.is_invertible() || !node.module.is_map_to(&theta[xy].x, &map) {
                    return Err(Error::NotIso { x, y });
                }
                pairs.push(node);
                f.push(map);
            }
        }
        let one = group.identity();
        let reg = Bimodule::regular(ring);
        if !iota.is_invertible() || !reg.is_map_to(&theta[one].x, &iota) {
            return Err(Error::UnitFail { x: one });
        }
        let mut fm = FactorMap { group, theta, pairs, f, iota, associative: false };
        if let Some(x) = fm.unit_failure() {
            return Err(Error::UnitFail { x });
        }
        fm.associative = fm.associativity_failure().is_none();
        Ok(fm)
    }

    /// Factor map of a family of invertible sub-bimodules of `S` with the multiplication of `S`.
    pub fn from_subbimodules(ext: &RingExtension, group: FiniteGroupTable, theta: Vec<InvertibleBimodule>, bases: &[Vec<Vec<u64>>]) -> Result<Self> {
        let n = group.order();
        let p = ext.top.p();
        let coords = |x: usize, s: &[u64]| -> Result<Vec<u64>> {
            let span = FpMatrix::from_columns(p, ext.top.dim(), &bases[x]);
            span.solve(s)?.map(|sol| sol.particular).ok_or(Error::NotInSubgroup { x })
        };
        let mut f_plain = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let xy = group.mul(x, y);
                let mut cols = Vec::with_capacity(bases[x].len() * bases[y].len());
                for u in &bases[x] {
                    for v in &bases[y] {
                        cols.push(coords(xy, &ext.top.mul(u, v))?);
                    }
                }
                f_plain.push(FpMatrix::from_columns(p, bases[xy].len(), &cols));
            }
        }
        let one = group.identity();
        let iota_cols: Result<Vec<Vec<u64>>> = (0..ext.base.dim()).map(|i| coords(one, &ext.embed(&ext.base.basis(i)))).collect();
        let iota = FpMatrix::from_columns(p, bases[one].len(), &iota_cols?);
        Self::validate(group, theta, f_plain, iota)
    }

    pub fn group(&self) -> &FiniteGroupTable {
        &self.group
    }

    pub fn ring(&self) -> &Arc<LocalUnitRing> {
        self.theta[0].x.ring()
    }

    pub fn p(&self) -> u64 {
        self.ring().p()
    }

    pub fn theta(&self, x: usize) -> &InvertibleBimodule {
        &self.theta[x]
    }

    pub fn thetas(&self) -> &[InvertibleBimodule] {
        &self.theta
    }

    pub fn pair(&self, x: usize, y: usize) -> &TensorNode {
        &self.pairs[x * self.group.order() + y]
    }

    /// `F_{x,y}` on the tensor product.
    pub fn f(&self, x: usize, y: usize) -> &FpMatrix {
        &self.f[x * self.group.order() + y]
    }

    /// `F_{x,y}` on plain pairs.
    pub fn f_plain(&self, x: usize, y: usize) -> FpMatrix {
        self.f(x, y).mul(&self.pair(x, y).proj)
    }

    pub fn iota(&self) -> &FpMatrix {
        &self.iota
    }

    pub fn is_associative(&self) -> bool {
        self.associative
    }

    fn unit_failure(&self) -> Option<usize> {
        let one = self.group.identity();
        for x in self.group.elements() {
            let m = &self.theta[x].x;
            let id = FpMatrix::identity(self.p(), m.dim());
            let left = self.f_plain(one, x).mul(&self.iota.kron(&id));
            let right = self.f_plain(x, one).mul(&id.kron(&self.iota));
            if left != left_action_plain(m) || right != right_action_plain(m) {
                return Some(x);
            }
        }
        None
    }

    /// Both sides of the associativity square on plain triples:
    /// `F_{xy,z} (F_{x,y} (x) 1)` and `F_{x,yz} (1 (x) F_{y,z})`.
    pub fn associativity_sides(&self, x: usize, y: usize, z: usize) -> (FpMatrix, FpMatrix) {
        let g = &self.group;
        let p = self.p();
        let (xy, yz) = (g.mul(x, y), g.mul(y, z));
        let ix = FpMatrix::identity(p, self.theta[x].dim());
        let iz = FpMatrix::identity(p, self.theta[z].dim());
        let lhs = self.f_plain(xy, z).mul(&self.f_plain(x, y).kron(&iz));
        let rhs = self.f_plain(x, yz).mul(&ix.kron(&self.f_plain(y, z)));
        (lhs, rhs)
    }

    fn associativity_failure(&self) -> Option<(usize, usize, usize)> {
        for x in self.group.elements() {
            for y in self.group.elements() {
                for z in self.group.elements() {
                    let (lhs, rhs) = self.associativity_sides(x, y, z);
                    if lhs != rhs {
                        return Some((x, y, z));
                    }
                }
            }
        }
        None
    }
}

/// `beta_{x,y,z} = alpha~` where `alpha (F_{xy,z} (F_{x,y} (x) 1)) = F_{x,yz} (1 (x) F_{y,z})`.
pub fn obstruction_three_cocycle(fm: &FactorMap, center: &CenterRing, gm: &GModule) -> Result<Cochain> {
    let g = fm.group();
    let order = g.order();
    let mut c = Cochain::identity(gm, 3);
    for idx in 0..order.pow(3) {
        let args = Cochain::args(order, 3, idx);
        let (x, y, z) = (args[0], args[1], args[2]);
        let (lhs, rhs) = fm.associativity_sides(x, y, z);
        let target = g.mul(g.mul(x, y), z);
        if lhs.rank() != fm.theta(target).dim() {
            return Err(Error::NoSolution(format!("associativity sides at ({x},{y},{z}) are not surjective")));
        }
        let alpha = lhs.solve_left(&rhs).ok_or_else(|| Error::NoSolution(format!("no automorphism at ({x},{y},{z})")))?;
        let beta = fm.theta(target).tilde(center, &alpha)?;
        c.values[idx] = center.log(&beta).ok_or_else(|| Error::NoSolution("obstruction outside U(Z)".into()))?;
    }
    if !c.is_normalized(gm) || !differential(gm, &c).is_identity() {
        return Err(Error::NotACocycle);
    }
    Ok(c)
}

/// `b_{xy,z,t} + b_{x,y,zt} = x b_{y,z,t} + b_{x,yz,t} + b_{x,y,z}`, evaluated directly.
pub fn three_cocycle_identity(gm: &GModule, c: &Cochain) -> bool {
    let g = &gm.group;
    let n = g.order();
    let a = &gm.module;
    let b = |x: usize, y: usize, z: usize| c.at(n, &[x, y, z]).to_vec();
    for x in g.elements() {
        for y in g.elements() {
            for z in g.elements() {
                for t in g.elements() {
                    let lhs = a.add(&b(g.mul(x, y), z, t), &b(x, y, g.mul(z, t)));
                    let rhs = a.add(&a.add(&gm.act(x, &b(y, z, t)), &b(x, g.mul(y, z), t)), &b(x, y, z));
                    if lhs != rhs {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// `F'_{x,y} = sigma_{x,y}(e) F_{x,y}`.
pub fn twist_by_two_cochain(fm: &FactorMap, center: &CenterRing, sigma: &Cochain) -> Result<FactorMap> {
    let g = fm.group();
    let n = g.order();
    let mut f_plain = Vec::with_capacity(n * n);
    for x in g.elements() {
        for y in g.elements() {
            let u = center.exp(sigma.at(n, &[x, y]));
            let scale = center.action_on(&fm.theta(g.mul(x, y)).x, u)?;
            f_plain.push(scale.mul(&fm.f_plain(x, y)));
        }
    }
    FactorMap::quasi(g.clone(), fm.theta.clone(), f_plain, fm.iota.clone())
}

/// `tau_{x,y}` with `tau F^Theta_{x,y} (a_x (x) a_y) = a_xy F^Gamma_{x,y}`, as a normalized 2-cocycle.
pub fn comparison_two_cocycle(theta: &FactorMap, gamma: &FactorMap, a: &[FpMatrix], center: &CenterRing, gm: &GModule) -> Result<Cochain> {
    let g = theta.group();
    let n = g.order();
    for x in g.elements() {
        if !a[x].is_invertible() || !gamma.theta(x).x.is_map_to(&theta.theta(x).x, &a[x]) {
            return Err(Error::NotIso { x, y: x });
        }
    }
    let mut c = Cochain::identity(gm, 2);
    for x in g.elements() {
        for y in g.elements() {
            let xy = g.mul(x, y);
            let lhs = theta.f_plain(x, y).mul(&a[x].kron(&a[y]));
            let rhs = a[xy].mul(&gamma.f_plain(x, y));
            let tau = lhs.solve_left(&rhs).ok_or(Error::NotIso { x, y })?;
            let z = theta.theta(xy).tilde(center, &tau)?;
            c.values[Cochain::index(n, &[x, y])] = center.log(&z).ok_or(Error::NotIso { x, y })?;
        }
    }
    if !c.is_normalized(gm) || !differential(gm, &c).is_identity() {
        return Err(Error::NotACocycle);
    }
    Ok(c)
}

/// `Delta(Theta) = (+)_x Theta_x` as a ring, blocks in group order.
#[derive(Clone, Debug)]
pub struct CrossedProduct {
    pub fm: FactorMap,
    pub ring: Arc<LocalUnitRing>,
    pub offsets: Vec<usize>,
    /// `R -> Delta` through `iota`.
    pub ext: RingExtension,
}

pub fn build_crossed_product(fm: &FactorMap) -> Result<CrossedProduct> {
    let g = fm.group();
    let p = fm.p();
    let mut offsets = Vec::with_capacity(g.order() + 1);
    let mut total = 0;
    for x in g.elements() {
        offsets.push(total);
        total += fm.theta(x).dim();
    }
    offsets.push(total);
    let block = |x: usize, v: &[u64]| {
        let mut out = vec![0u64; total];
        out[offsets[x]..offsets[x + 1]].copy_from_slice(v);
        out
    };
    let mut mult = vec![vec![vec![0u64; total]; total]; total];
    for x in g.elements() {
        for y in g.elements() {
            let fp = fm.f_plain(x, y);
            let (dx, dy) = (fm.theta(x).dim(), fm.theta(y).dim());
            for i in 0..dx {
                for j in 0..dy {
                    mult[offsets[x] + i][offsets[y] + j] = block(g.mul(x, y), &fp.column(i * dy + j));
                }
            }
        }
    }
    let base = fm.ring().clone();
    let one = g.identity();
    let emb_cols: Vec<Vec<u64>> = (0..base.dim()).map(|i| block(one, &fm.iota().column(i))).collect();
    let emb = FpMatrix::from_columns(p, total, &emb_cols);
    let units = base.units().iter().map(|e| emb.mul_vec(e)).collect();
    let ring = Arc::new(LocalUnitRing::new(p, RingData { dim: total, mult, units, labels: None })?);
    let ext = RingExtension::new(base, ring.clone(), emb)?;
    let cp = CrossedProduct { fm: fm.clone(), ring, offsets, ext };
    cp.check_strongly_graded()?;
    Ok(cp)
}

impl CrossedProduct {
    pub fn embed(&self, x: usize, v: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; self.ring.dim()];
        out[self.offsets[x]..self.offsets[x + 1]].copy_from_slice(v);
        out
    }

    /// Basis of `Theta_x` inside `Delta`.
    pub fn component_basis(&self, x: usize) -> Vec<Vec<u64>> {
        (0..self.fm.theta(x).dim()).map(|i| self.embed(x, &crate::algebra::fp::unit_vector(self.fm.theta(x).dim(), i, self.ring.p()))).collect()
    }

    fn check_strongly_graded(&self) -> Result<()> {
        let g = self.fm.group();
        for x in g.elements() {
            for y in g.elements() {
                let mut prods = Vec::new();
                for u in self.component_basis(x) {
                    for v in self.component_basis(y) {
                        prods.push(self.ring.mul(&u, &v));
                    }
                }
                let rank = FpMatrix::from_columns(self.ring.p(), self.ring.dim(), &prods).rank();
                if rank != self.fm.theta(g.mul(x, y)).dim() {
                    return Err(Error::NotIso { x, y });
                }
            }
        }
        Ok(())
    }
}

/// Graded isomorphisms `Delta(Gamma) -> Delta(Lambda)` fixing `R`: families `f_x` with
/// `f_1 iota = iota'` and `f_xy F_{x,y} = F'_{x,y} (f_x (x) f_y)`.
///
/// Returns the first family, or every family when `all` is set.
pub fn crossed_isomorphisms(a: &FactorMap, b: &FactorMap, center: &CenterRing, caps: &Caps, all: bool) -> Result<Decided<Vec<Vec<FpMatrix>>>> {
    let g = a.group();
    if g != b.group() || !Arc::ptr_eq(a.ring(), b.ring()) {
        return Err(Error::Shape("crossed products over different data".into()));
    }
    let mut candidates = Vec::with_capacity(g.order());
    for x in g.elements() {
        let base = match find_isomorphism(&a.theta(x).x, &b.theta(x).x, caps) {
            Decided::Found(f) => f,
            Decided::Absent => return Ok(Decided::Absent),
            Decided::Undecided(s) => return Ok(Decided::Undecided(s)),
        };
        let mut cands = Vec::with_capacity(center.units().len());
        for u in center.units() {
            cands.push(base.mul(&center.action_on(&a.theta(x).x, u)?));
        }
        candidates.push(cands);
    }
    let one = g.identity();
    let iota_a_inv = a.iota().inverse().ok_or(Error::UnitFail { x: one })?;
    let f1 = b.iota().mul(&iota_a_inv);
    let mut state: Vec<Option<FpMatrix>> = vec![None; g.order()];
    state[one] = Some(f1);
    let mut found = Vec::new();
    let mut budget = caps.enumeration;
    if !propagate(a, b, &mut state) {
        return Ok(Decided::Absent);
    }
    let complete = search_graded(a, b, &candidates, state, &mut found, all, &mut budget);
    if !complete && found.is_empty() {
        return Ok(Decided::Undecided("graded isomorphism search exceeded its budget".into()));
    }
    Ok(if found.is_empty() { Decided::Absent } else { Decided::Found(found) })
}

fn search_graded(
    a: &FactorMap,
    b: &FactorMap,
    candidates: &[Vec<FpMatrix>],
    state: Vec<Option<FpMatrix>>,
    found: &mut Vec<Vec<FpMatrix>>,
    all: bool,
    budget: &mut u64,
) -> bool {
    let Some(x) = state.iter().position(|s| s.is_none()) else {
        found.push(state.into_iter().map(|s| s.expect("complete")).collect());
        return true;
    };
    for c in &candidates[x] {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        let mut next = state.clone();
        next[x] = Some(c.clone());
        if propagate(a, b, &mut next) {
            if !search_graded(a, b, candidates, next, found, all, budget) {
                return false;
            }
            if !all && !found.is_empty() {
                return true;
            }
        }
    }
    true
}

/// Fills forced components and checks every fully assigned square.
fn propagate(a: &FactorMap, b: &FactorMap, state: &mut [Option<FpMatrix>]) -> bool {
    let g = a.group();
    loop {
        let mut changed = false;
        for x in g.elements() {
            for y in g.elements() {
                let (Some(fx), Some(fy)) = (&state[x], &state[y]) else { continue };
                let xy = g.mul(x, y);
                let rhs = b.f_plain(x, y).mul(&fx.kron(fy));
                match &state[xy] {
                    Some(fxy) => {
                        if fxy.mul(&a.f_plain(x, y)) != rhs {
                            return false;
                        }
                    }
                    None => {
                        let Some(fxy) = a.f_plain(x, y).solve_left(&rhs) else { return false };
                        if !fxy.is_invertible() {
                            return false;
                        }
                        state[xy] = Some(fxy);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return true;
        }
    }
}

pub fn crossed_iso_test(a: &FactorMap, b: &FactorMap, center: &CenterRing, caps: &Caps) -> Result<Decided<Vec<FpMatrix>>> {
    Ok(crossed_isomorphisms(a, b, center, caps, false)?.map(|mut v| v.remove(0)))
}

/// The factor map on `Omega_x = A_x (x) B_{x^-1} (x) C_x`, the middle factors exchanged by the twist.
pub fn sandwich(a: &FactorMap, b: &FactorMap, c: &FactorMap, caps: &Caps) -> Result<FactorMap> {
    let g = a.group();
    let n = g.order();
    let p = a.p();
    let reg = Bimodule::regular(a.ring().clone());
    let omega: Vec<TensorNode> =
        g.elements().map(|x| TensorNode::chain(&[&a.theta(x).x, &b.theta(g.inv(x)).x, &c.theta(x).x])).collect();
    let bc: Vec<TensorNode> = g.elements().map(|x| TensorNode::pair(&b.theta(g.inv(x)).x, &c.theta(x).x)).collect();
    let ab: Vec<TensorNode> = g.elements().map(|y| TensorNode::pair(&a.theta(y).x, &b.theta(g.inv(y)).x)).collect();
    let mut splits: Vec<SummandWitness> = Vec::with_capacity(n);
    for x in g.elements() {
        match summand_test(&bc[x].module, &reg, caps.k_max) {
            Decided::Found(w) => splits.push(w),
            Decided::Absent => return Err(Error::SimilarityWitnessMissing { x }),
            Decided::Undecided(s) => return Err(Error::Undecided(s)),
        }
    }
    let theta: Vec<InvertibleBimodule> = omega.iter().map(|o| InvertibleBimodule::from_dual(&o.module)).collect::<Result<_>>()?;
    let mut f_plain = Vec::with_capacity(n * n);
    for x in g.elements() {
        for y in g.elements() {
            let (mn, nm, t) = twist_map_with(&bc[x].module, &ab[y].module, &splits[x])?;
            // plain (b, c, a', b') -> plain (a', b', b, c)
            let mid = ab[y].sect.kron(&bc[x].sect).mul(&nm.sect).mul(&t).mul(&mn.proj).mul(&bc[x].proj.kron(&ab[y].proj));
            let (xi, yi) = (g.inv(x), g.inv(y));
            let xy = g.mul(x, y);
            let fa = a.f_plain(x, y);
            let fb = b.f_plain(yi, xi);
            let fc = c.f_plain(x, y);
            let ia = FpMatrix::identity(p, a.theta(x).dim());
            let ic = FpMatrix::identity(p, c.theta(y).dim());
            let (ox, oy) = (&omega[x], &omega[y]);
            let mut cols = Vec::with_capacity(ox.dim() * oy.dim());
            for i in 0..ox.dim() {
                for j in 0..oy.dim() {
                    let v = kron_vec(&ox.sect.column(i), &oy.sect.column(j), p);
                    let swapped = apply_kron(&[&ia, &mid, &ic], &v);
                    let multiplied = apply_kron(&[&fa, &fb, &fc], &swapped);
                    cols.push(omega[xy].proj.mul_vec(&multiplied));
                }
            }
            f_plain.push(FpMatrix::from_columns(p, omega[xy].dim(), &cols));
        }
    }
    let one = g.identity();
    let ring = a.ring();
    let mut iota_cols = Vec::with_capacity(ring.dim());
    for i in 0..ring.dim() {
        let r = ring.basis(i);
        let e = ring.unit_for(std::slice::from_ref(&r))?;
        let v = kron_vec(&kron_vec(&a.iota().mul_vec(&r), &b.iota().mul_vec(&e), p), &c.iota().mul_vec(&e), p);
        iota_cols.push(omega[one].proj.mul_vec(&v));
    }
    let iota = FpMatrix::from_columns(p, omega[one].dim(), &iota_cols);
    FactorMap::quasi(g.clone(), theta, f_plain, iota)
}

/// `[Omega] [Gamma] = [(+) Omega_x (x) Theta_{x^-1} (x) Gamma_x]`.
pub fn c_group_multiply(omega: &FactorMap, gamma: &FactorMap, base: &FactorMap, caps: &Caps) -> Result<FactorMap> {
    sandwich(omega, base, gamma, caps)
}

/// `[Omega]^{-1} = [(+) Theta_x (x) Omega_{x^-1} (x) Theta_x]`.
pub fn c_group_inverse(omega: &FactorMap, base: &FactorMap, caps: &Caps) -> Result<FactorMap> {
    sandwich(base, omega, base, caps)
}

/// Classes of crossed products over a fixed base, closed under the group law up to a cap.
#[derive(Clone, Debug)]
pub struct CrossedLedger {
    pub classes: Vec<FactorMap>,
    /// `table[i][j]` is the index of `classes[i] classes[j]`.
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
}

impl CrossedLedger {
    /// Closure of the base class and `generators`; `None` entries in the result mean the cap was hit.
    pub fn close(base: &FactorMap, generators: &[FactorMap], center: &CenterRing, caps: &Caps) -> Result<Decided<CrossedLedger>> {
        let mut classes: Vec<FactorMap> = vec![base.clone()];
        for gen in generators {
            match index_in(&classes, gen, center, caps)? {
                Decided::Found(_) => {}
                Decided::Absent => classes.push(gen.clone()),
                Decided::Undecided(s) => return Ok(Decided::Undecided(s)),
            }
        }
        let mut table: Vec<Vec<usize>> = Vec::new();
        let mut i = 0;
        while i < classes.len() {
            let mut row = Vec::with_capacity(classes.len());
            let mut j = 0;
            while j < classes.len() {
                let prod = c_group_multiply(&classes[i], &classes[j], base, caps)?;
                let k = match index_in(&classes, &prod, center, caps)? {
                    Decided::Found(k) => k,
                    Decided::Absent => {
                        if classes.len() >= caps.c_closure {
                            return Ok(Decided::Undecided(format!("more than {} crossed-product classes", caps.c_closure)));
                        }
                        classes.push(prod);
                        classes.len() - 1
                    }
                    Decided::Undecided(s) => return Ok(Decided::Undecided(s)),
                };
                row.push(k);
                j += 1;
            }
            table.push(row);
            i += 1;
        }
        // rows computed before later classes appeared are completed here
        for i in 0..classes.len() {
            while table[i].len() < classes.len() {
                let j = table[i].len();
                let prod = c_group_multiply(&classes[i], &classes[j], base, caps)?;
                match index_in(&classes, &prod, center, caps)? {
                    Decided::Found(k) => table[i].push(k),
                    Decided::Absent => return Ok(Decided::Undecided("class set not closed".into())),
                    Decided::Undecided(s) => return Ok(Decided::Undecided(s)),
                }
            }
        }
        Ok(Decided::Found(CrossedLedger { classes, table, identity: 0 }))
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn index_of(&self, fm: &FactorMap, center: &CenterRing, caps: &Caps) -> Result<Decided<usize>> {
        index_in(&self.classes, fm, center, caps)
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.len()).all(|i| (0..self.len()).all(|j| self.table[i][j] == self.table[j][i]))
    }

    pub fn is_associative(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| self.table[self.table[i][j]][k] == self.table[i][self.table[j][k]])))
    }

    pub fn inverse_of(&self, i: usize) -> Option<usize> {
        (0..self.len()).find(|&j| self.table[i][j] == self.identity)
    }
}

fn index_in(classes: &[FactorMap], fm: &FactorMap, center: &CenterRing, caps: &Caps) -> Result<Decided<usize>> {
    let mut undecided = None;
    for (i, c) in classes.iter().enumerate() {
        match crossed_iso_test(c, fm, center, caps)? {
            Decided::Found(_) => return Ok(Decided::Found(i)),
            Decided::Absent => {}
            Decided::Undecided(s) => undecided = Some(s),
        }
    }
    Ok(match undecided {
        Some(s) => Decided::Undecided(s),
        None => Decided::Absent,
    })
}

/// Whether every component of `gamma` is isomorphic to the matching component of `base`.
pub fn in_c0(gamma: &FactorMap, base: &FactorMap, caps: &Caps) -> Decided<Vec<FpMatrix>> {
    let mut isos = Vec::with_capacity(base.group().order());
    for x in base.group().elements() {
        match find_isomorphism(&gamma.theta(x).x, &base.theta(x).x, caps) {
            Decided::Found(f) => isos.push(f),
            Decided::Absent => return Decided::Absent,
            Decided::Undecided(s) => return Decided::Undecided(s),
        }
    }
    Decided::Found(isos)
}

/// Forward map `C_0 -> H^2`: the comparison cocycle for isomorphisms `a_x : Gamma_x -> Theta_x`
/// with `a_1 = iota^Theta (iota^Gamma)^{-1}`.
pub fn zeta_forward(base: &FactorMap, gamma: &FactorMap, center: &CenterRing, gm: &GModule, h2: &CohomologyGroup, caps: &Caps) -> Result<Decided<Vec<u64>>> {
    let mut a = match in_c0(gamma, base, caps) {
        Decided::Found(a) => a,
        Decided::Absent => return Err(Error::NotIso { x: 0, y: 0 }),
        Decided::Undecided(s) => return Ok(Decided::Undecided(s)),
    };
    let one = base.group().identity();
    a[one] = base.iota().mul(&gamma.iota().inverse().ok_or(Error::UnitFail { x: one })?);
    let tau = comparison_two_cocycle(base, gamma, &a, center, gm)?;
    Ok(Decided::Found(h2.class_of(gm, &tau)?))
}

/// Backward map `H^2 -> C_0`: the base twisted by a representative cocycle.
pub fn zeta_backward(base: &FactorMap, center: &CenterRing, gm: &GModule, h2: &CohomologyGroup, coords: &[u64]) -> Result<FactorMap> {
    let sigma = h2.representative(gm, coords);
    let fm = twist_by_two_cochain(base, center, &sigma)?;
    if !fm.is_associative() {
        return Err(Error::NotACocycle);
    }
    Ok(fm)
}

/// Outcome of comparing a crossed-product ledger with `H^2`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct ZetaReport {
    /// `H^2` coordinates of each ledger class.
    pub forward: Vec<Vec<u64>>,
    /// Ledger index of the twist by each `H^2` element, in enumeration order.
    pub backward: Vec<usize>,
    pub bijective: bool,
    pub multiplicative: bool,
    pub round_trips: bool,
}

pub fn zeta_h2_iso(base: &FactorMap, ledger: &CrossedLedger, center: &CenterRing, gm: &GModule, h2: &CohomologyGroup, caps: &Caps) -> Result<Decided<ZetaReport>> {
    let mut forward = Vec::with_capacity(ledger.len());
    for c in &ledger.classes {
        match zeta_forward(base, c, center, gm, h2, caps)? {
            Decided::Found(h) => forward.push(h),
            Decided::Absent => return Ok(Decided::Absent),
            Decided::Undecided(s) => return Ok(Decided::Undecided(s)),
        }
    }
    let elements: Vec<Vec<u64>> = h2.group.elements().collect();
    let mut backward = Vec::with_capacity(elements.len());
    for h in &elements {
        let fm = zeta_backward(base, center, gm, h2, h)?;
        match ledger.index_of(&fm, center, caps)? {
            Decided::Found(i) => backward.push(i),
            Decided::Absent => return Ok(Decided::Absent),
            Decided::Undecided(s) => return Ok(Decided::Undecided(s)),
        }
    }
    let mut sorted = forward.clone();
    sorted.sort();
    sorted.dedup();
    let bijective = sorted.len() == forward.len() && forward.len() == elements.len();
    let a = &h2.group;
    let multiplicative = (0..ledger.len())
        .all(|i| (0..ledger.len()).all(|j| forward[ledger.table[i][j]] == a.add(&forward[i], &forward[j])));
    let round_trips = elements.iter().zip(&backward).all(|(h, &i)| forward[i] == *h)
        && forward.iter().enumerate().all(|(i, h)| backward[a.index_of(h) as usize] == i);
    Ok(Decided::Found(ZetaReport { forward, backward, bijective, multiplicative, round_trips }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::induced_action;
    use crate::ring::{find_ring_isomorphism, finite_field, product_of_prime_fields};

    struct Setup {
        fm: FactorMap,
        center: CenterRing,
        gm: GModule,
    }

    /// Trivial factor map of `F_3` over `C_2`.
    fn trivial_f3() -> Setup {
        let (f3, _) = finite_field(3, 1).unwrap();
        let r = Arc::new(f3);
        let center = CenterRing::new(r.clone(), 1 << 20).unwrap();
        let reg = Bimodule::regular(r.clone());
        let inv = InvertibleBimodule::from_dual(&reg).unwrap();
        let g = FiniteGroupTable::cyclic(2);
        let one = FpMatrix::identity(3, 1);
        let fm = FactorMap::validate(g.clone(), vec![inv.clone(), inv.clone()], vec![one.clone(); 4], one).unwrap();
        let gm = induced_action(&g, fm.thetas(), &center).unwrap();
        Setup { fm, center, gm }
    }

    /// Skew group ring of `F_4` over the Frobenius.
    fn galois_f4() -> Setup {
        let (f4, frob) = finite_field(2, 2).unwrap();
        let r = Arc::new(f4);
        let center = CenterRing::new(r.clone(), 1 << 20).unwrap();
        let g = FiniteGroupTable::cyclic(2);
        let reg = Bimodule::regular(r.clone());
        let tw = Bimodule::twisted(r.clone(), &frob).unwrap();
        let theta = vec![InvertibleBimodule::from_dual(&reg).unwrap(), InvertibleBimodule::from_dual(&tw).unwrap()];
        // a u_x b u_y = a x(b) u_xy on the bases {w^i u_x}
        let sigma = [FpMatrix::identity(2, 2), frob.clone()];
        let mut f_plain = Vec::new();
        for x in 0..2 {
            for _y in 0..2 {
                let mut cols = Vec::new();
                for i in 0..2 {
                    for j in 0..2 {
                        cols.push(r.mul(&r.basis(i), &sigma[x].mul_vec(&r.basis(j))));
                    }
                }
                f_plain.push(FpMatrix::from_columns(2, 2, &cols));
            }
        }
        let fm = FactorMap::validate(g.clone(), theta, f_plain, FpMatrix::identity(2, 2)).unwrap();
        let gm = induced_action(&g, fm.thetas(), &center).unwrap();
        Setup { fm, center, gm }
    }

    fn minus_one(s: &Setup) -> Cochain {
        let mut sigma = Cochain::identity(&s.gm, 2);
        sigma.values[Cochain::index(2, &[1, 1])] = vec![1];
        sigma
    }

    #[test]
    fn trivial_crossed_product_is_split() {
        let s = trivial_f3();
        let cp = build_crossed_product(&s.fm).unwrap();
        let split = product_of_prime_fields(3, 2, vec![vec![1, 1]]).unwrap();
        assert!(find_ring_isomorphism(&cp.ring, &split, &Caps::default()).is_found());
    }

    #[test]
    fn minus_one_twist_is_f9() {
        let s = trivial_f3();
        let tw = twist_by_two_cochain(&s.fm, &s.center, &minus_one(&s)).unwrap();
        assert!(tw.is_associative());
        let cp = build_crossed_product(&tw).unwrap();
        let (f9, _) = finite_field(3, 2).unwrap();
        assert!(find_ring_isomorphism(&cp.ring, &f9, &Caps::default()).is_found());
        assert_eq!(crossed_iso_test(&s.fm, &tw, &s.center, &Caps::default()).unwrap(), Decided::Absent);
    }

    #[test]
    fn galois_skew_ring_is_matrix_ring() {
        let s = galois_f4();
        let cp = build_crossed_product(&s.fm).unwrap();
        let m2 = crate::ring::matrix_algebra(2, 2).unwrap();
        assert!(find_ring_isomorphism(&cp.ring, &m2, &Caps::default()).is_found());
    }

    #[test]
    fn scaled_factor_map_fails_associativity() {
        let s = galois_f4();
        let mut sigma = Cochain::identity(&s.gm, 2);
        sigma.values[Cochain::index(2, &[1, 1])] = vec![1];
        let tw = twist_by_two_cochain(&s.fm, &s.center, &sigma).unwrap();
        let f_plain = (0..4).map(|i| tw.f_plain(i / 2, i % 2)).collect();
        let err = FactorMap::validate(tw.group().clone(), tw.thetas().to_vec(), f_plain, tw.iota().clone()).unwrap_err();
        assert!(matches!(err, Error::AssocFail { .. }));
    }

    #[test]
    fn broken_unit_triangle_is_rejected() {
        let s = trivial_f3();
        let one = FpMatrix::identity(3, 1);
        let err = FactorMap::validate(s.fm.group().clone(), s.fm.thetas().to_vec(), vec![one.clone(); 4], one.scale(2)).unwrap_err();
        assert!(matches!(err, Error::UnitFail { .. }));
    }

    #[test]
    fn obstruction_of_twist_is_coboundary() {
        let s = galois_f4();
        let mut sigma = Cochain::identity(&s.gm, 2);
        sigma.values[Cochain::index(2, &[1, 1])] = vec![1];
        let tw = twist_by_two_cochain(&s.fm, &s.center, &sigma).unwrap();
        let ob = obstruction_three_cocycle(&tw, &s.center, &s.gm).unwrap();
        assert_eq!(ob, differential(&s.gm, &sigma));
        assert!(three_cocycle_identity(&s.gm, &ob));
        assert!(!ob.is_identity());
        assert!(!tw.is_associative());
    }

    #[test]
    fn comparison_recovers_twist() {
        let s = trivial_f3();
        let sigma = minus_one(&s);
        let tw = twist_by_two_cochain(&s.fm, &s.center, &sigma).unwrap();
        let ids = vec![FpMatrix::identity(3, 1); 2];
        assert_eq!(comparison_two_cocycle(&s.fm, &tw, &ids, &s.center, &s.gm).unwrap(), sigma);
        assert!(comparison_two_cocycle(&s.fm, &s.fm, &ids, &s.center, &s.gm).unwrap().is_identity());
    }

    #[test]
    fn c_group_of_f3_over_c2() {
        let s = trivial_f3();
        let caps = Caps::default();
        let tw = twist_by_two_cochain(&s.fm, &s.center, &minus_one(&s)).unwrap();
        let ledger = CrossedLedger::close(&s.fm, std::slice::from_ref(&tw), &s.center, &caps).unwrap().found().unwrap();
        assert_eq!(ledger.len(), 2);
        assert_eq!(ledger.table, vec![vec![0, 1], vec![1, 0]]);
        let inv = c_group_inverse(&tw, &s.fm, &caps).unwrap();
        assert_eq!(ledger.index_of(&inv, &s.center, &caps).unwrap(), Decided::Found(1));
        let h2 = CohomologyGroup::compute(&s.gm, 2).unwrap();
        let report = zeta_h2_iso(&s.fm, &ledger, &s.center, &s.gm, &h2, &caps).unwrap().found().unwrap();
        assert!(report.bijective && report.multiplicative && report.round_trips);
    }

    #[test]
    fn galois_graded_automorphisms_form_cocycles() {
        let s = galois_f4();
        let all = crossed_isomorphisms(&s.fm, &s.fm, &s.center, &Caps::default(), true).unwrap().found().unwrap();
        // Z^1 of C_2 acting by inversion on C_3 has 3 elements
        assert_eq!(all.len(), 3);
        let product = c_group_multiply(&s.fm, &s.fm, &s.fm, &Caps::default()).unwrap();
        assert!(product.is_associative());
        assert!(crossed_iso_test(&s.fm, &product, &s.center, &Caps::default()).unwrap().is_found());
    }
}
