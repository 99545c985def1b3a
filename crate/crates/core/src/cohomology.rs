//! `G`-modules, bar-resolution cochains and cohomology in degrees up to 3.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::integer::{integer_kernel, integer_solve};
use crate::algebra::{group_from_relations, AbelianGroupPresentation, FiniteGroupTable, IntegerMatrix, RelationQuotient};
use crate::center::CenterRing;
use crate::picard::InvertibleBimodule;
use crate::{Error, Result};

/// A finite abelian group with a left action of a finite group by automorphisms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GModule {
    pub group: FiniteGroupTable,
    pub module: AbelianGroupPresentation,
    /// `action[x][k]` is the image of the `k`-th generator under `x`.
    pub action: Vec<Vec<Vec<u64>>>,
}

impl GModule {
    pub fn new(group: FiniteGroupTable, module: AbelianGroupPresentation, action: Vec<Vec<Vec<u64>>>) -> Result<Self> {
        let k = module.rank();
        if action.len() != group.order() || action.iter().any(|a| a.len() != k || a.iter().any(|v| v.len() != k)) {
            return Err(Error::Shape("action table has wrong shape".into()));
        }
        let gm = GModule { group, module, action };
        gm.check()?;
        Ok(gm)
    }

    pub fn trivial(group: FiniteGroupTable, module: AbelianGroupPresentation) -> Self {
        let k = module.rank();
        let id: Vec<Vec<u64>> = (0..k).map(|i| (0..k).map(|j| u64::from(i == j)).collect()).collect();
        let action = vec![id; group.order()];
        GModule { group, module, action }
    }

    fn check(&self) -> Result<()> {
        let a = &self.module;
        for x in self.group.elements() {
            for (k, &d) in a.invariant_factors.iter().enumerate() {
                if a.scale(&self.action[x][k], d as i64) != a.zero() {
                    return Err(Error::NotAnAction { x, y: x });
                }
            }
        }
        let elems: Vec<Vec<u64>> = a.elements().collect();
        for x in self.group.elements() {
            let mut images: Vec<Vec<u64>> = elems.iter().map(|v| self.act(x, v)).collect();
            images.sort();
            images.dedup();
            if images.len() != elems.len() {
                return Err(Error::NotAnAction { x, y: x });
            }
        }
        for v in &elems {
            if self.act(self.group.identity(), v) != *v {
                let e = self.group.identity();
                return Err(Error::NotAnAction { x: e, y: e });
            }
        }
        for x in self.group.elements() {
            for y in self.group.elements() {
                for k in 0..a.rank() {
                    let gen = unit(a.rank(), k);
                    if self.act(x, &self.act(y, &gen)) != self.act(self.group.mul(x, y), &gen) {
                        return Err(Error::NotAnAction { x, y });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn act(&self, x: usize, v: &[u64]) -> Vec<u64> {
        let a = &self.module;
        let mut acc = a.zero();
        for (k, &c) in v.iter().enumerate() {
            if c != 0 {
                acc = a.add(&acc, &a.scale(&self.action[x][k], c as i64));
            }
        }
        acc
    }

    pub fn is_trivial_action(&self) -> bool {
        let k = self.module.rank();
        self.action.iter().all(|a| (0..k).all(|i| a[i] == unit(k, i)))
    }
}

fn unit(k: usize, i: usize) -> Vec<u64> {
    (0..k).map(|j| u64::from(i == j)).collect()
}

/// `x u = alpha_[Theta_x](u)` on `U(Z)`.
pub fn induced_action(group: &FiniteGroupTable, theta: &[InvertibleBimodule], center: &CenterRing) -> Result<GModule> {
    let a = center.unit_group().clone();
    let mut action = Vec::with_capacity(group.order());
    for x in group.elements() {
        let mut images = Vec::with_capacity(a.rank());
        for k in 0..a.rank() {
            let u = center.exp(&unit(a.rank(), k)).clone();
            let image = theta[x].alpha(center, &u)?;
            images.push(center.log(&image).ok_or_else(|| Error::NoSolution("action leaves U(Z)".into()))?);
        }
        action.push(images);
    }
    GModule::new(group.clone(), a, action)
}

/// A function `G^n -> A`, stored for every tuple with the first argument most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cochain {
    pub degree: usize,
    pub values: Vec<Vec<u64>>,
}

impl Cochain {
    pub fn constant(gm: &GModule, degree: usize, value: Vec<u64>) -> Cochain {
        let n = gm.group.order().pow(degree as u32);
        Cochain { degree, values: vec![value; n] }
    }

    pub fn identity(gm: &GModule, degree: usize) -> Cochain {
        Cochain::constant(gm, degree, gm.module.zero())
    }

    pub fn index(order: usize, args: &[usize]) -> usize {
        args.iter().fold(0, |acc, &g| acc * order + g)
    }

    pub fn args(order: usize, degree: usize, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; degree];
        for slot in out.iter_mut().rev() {
            *slot = idx % order;
            idx /= order;
        }
        out
    }

    pub fn at(&self, order: usize, args: &[usize]) -> &[u64] {
        &self.values[Cochain::index(order, args)]
    }

    pub fn is_normalized(&self, gm: &GModule) -> bool {
        let n = gm.group.order();
        let e = gm.group.identity();
        self.values
            .iter()
            .enumerate()
            .all(|(i, v)| !Cochain::args(n, self.degree, i).contains(&e) || v.iter().all(|&c| c == 0))
    }

    pub fn add(&self, gm: &GModule, other: &Cochain) -> Cochain {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| gm.module.add(a, b)).collect();
        Cochain { degree: self.degree, values }
    }

    pub fn neg(&self, gm: &GModule) -> Cochain {
        Cochain { degree: self.degree, values: self.values.iter().map(|a| gm.module.neg(a)).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.values.iter().all(|v| v.iter().all(|&c| c == 0))
    }
}

/// `d s(g_1..g_{n+1}) = g_1 s(g_2..) + sum_i (-1)^i s(.., g_i g_{i+1}, ..) + (-1)^{n+1} s(g_1..g_n)`,
/// written additively.
pub fn differential(gm: &GModule, c: &Cochain) -> Cochain {
    let n = c.degree;
    let order = gm.group.order();
    let a = &gm.module;
    let total = order.pow(n as u32 + 1);
    let mut values = Vec::with_capacity(total);
    for idx in 0..total {
        let g = Cochain::args(order, n + 1, idx);
        let mut acc = gm.act(g[0], c.at(order, &g[1..]));
        for i in 0..n {
            let mut merged: Vec<usize> = g[..i].to_vec();
            merged.push(gm.group.mul(g[i], g[i + 1]));
            merged.extend_from_slice(&g[i + 2..]);
            let term = c.at(order, &merged);
            acc = if (i + 1) % 2 == 1 { a.sub(&acc, term) } else { a.add(&acc, term) };
        }
        let last = c.at(order, &g[..n]);
        acc = if (n + 1) % 2 == 1 { a.sub(&acc, last) } else { a.add(&acc, last) };
        values.push(acc);
    }
    Cochain { degree: n + 1, values }
}

pub fn is_cocycle(gm: &GModule, c: &Cochain) -> bool {
    differential(gm, c).is_identity()
}

/// `H^n` with a decision procedure for classes of cocycles.
#[derive(Clone, Debug)]
pub struct CohomologyGroup {
    pub degree: usize,
    pub group: AbelianGroupPresentation,
    normalized: bool,
    alphabet: Vec<usize>,
    quotient: RelationQuotient,
    /// Cocycle generators in lifted coordinates.
    generators: Vec<Vec<BigInt>>,
    /// Their images in the cochain quotient, one column each.
    images: IntegerMatrix,
    classes: RelationQuotient,
}

struct Layout {
    alphabet: Vec<usize>,
    rank: usize,
}

impl Layout {
    fn tuples(&self, n: usize) -> usize {
        self.alphabet.len().pow(n as u32)
    }

    fn width(&self, n: usize) -> usize {
        self.tuples(n) * self.rank
    }

    fn tuple(&self, n: usize, mut idx: usize) -> Vec<usize> {
        let m = self.alphabet.len();
        let mut out = vec![0; n];
        for slot in out.iter_mut().rev() {
            *slot = self.alphabet[idx % m];
            idx /= m;
        }
        out
    }

    fn position(&self, args: &[usize]) -> Option<usize> {
        let m = self.alphabet.len();
        let mut idx = 0;
        for g in args {
            idx = idx * m + self.alphabet.iter().position(|a| a == g)?;
        }
        Some(idx)
    }
}

/// Integer matrix of the lifted differential `C^n -> C^{n+1}` restricted to the layout.
fn lifted_differential(gm: &GModule, layout: &Layout, n: usize) -> IntegerMatrix {
    let rank = layout.rank;
    let rows = layout.width(n + 1);
    let cols = layout.width(n);
    let mut out = vec![vec![0i64; cols]; rows];
    let sign = |i: usize| if i.is_multiple_of(2) { 1i64 } else { -1 };
    for s in 0..layout.tuples(n + 1) {
        let g = layout.tuple(n + 1, s);
        let mut add_term = |args: &[usize], coeff: i64, twist: Option<usize>| {
            let Some(t) = layout.position(args) else { return };
            for k in 0..rank {
                match twist {
                    Some(x) => {
                        for (j, &v) in gm.action[x][k].iter().enumerate() {
                            out[s * rank + j][t * rank + k] += coeff * v as i64;
                        }
                    }
                    None => out[s * rank + k][t * rank + k] += coeff,
                }
            }
        };
        add_term(&g[1..], 1, Some(g[0]));
        for i in 0..n {
            let mut merged: Vec<usize> = g[..i].to_vec();
            merged.push(gm.group.mul(g[i], g[i + 1]));
            merged.extend_from_slice(&g[i + 2..]);
            add_term(&merged, sign(i + 1), None);
        }
        add_term(&g[..n], sign(n + 1), None);
    }
    let mut m = IntegerMatrix::with_cols(cols);
    for row in out {
        m.push_row(row.into_iter().map(BigInt::from).collect());
    }
    m
}

fn diagonal_rows(module: &AbelianGroupPresentation, tuples: usize) -> Vec<Vec<BigInt>> {
    let rank = module.rank();
    let width = tuples * rank;
    let mut rows = Vec::with_capacity(width);
    for t in 0..tuples {
        for (k, &d) in module.invariant_factors.iter().enumerate() {
            let mut row = vec![BigInt::zero(); width];
            row[t * rank + k] = BigInt::from(d);
            rows.push(row);
        }
    }
    rows
}

impl CohomologyGroup {
    /// `H^n` computed on normalized cochains.
    pub fn compute(gm: &GModule, n: usize) -> Result<Self> {
        Self::compute_with(gm, n, true)
    }

    /// `H^n` computed on all cochains; used as a cross-check of the normalized complex.
    pub fn compute_full(gm: &GModule, n: usize) -> Result<Self> {
        Self::compute_with(gm, n, false)
    }

    fn compute_with(gm: &GModule, n: usize, normalized: bool) -> Result<Self> {
        if n > 3 {
            return Err(Error::SizeCap(format!("degree {n} above 3")));
        }
        let alphabet: Vec<usize> = if normalized { gm.group.non_identity().collect() } else { gm.group.elements().collect() };
        let layout = Layout { alphabet, rank: gm.module.rank() };
        let width = layout.width(n);
        if width > 4096 {
            return Err(Error::SizeCap(format!("{width} cochain coordinates in degree {n}")));
        }
        // cocycles: kernel of [d | -diag] projected to the first block
        let d_n = lifted_differential(gm, &layout, n);
        let next_diag = diagonal_rows(&gm.module, layout.tuples(n + 1));
        let mut aug = IntegerMatrix::with_cols(width + next_diag.len());
        for r in 0..d_n.rows() {
            let mut row: Vec<BigInt> = d_n.row(r).to_vec();
            row.extend(next_diag.iter().map(|drow| -drow[r].clone()));
            aug.push_row(row);
        }
        let generators: Vec<Vec<BigInt>> =
            integer_kernel(&aug).into_iter().map(|v| v[..width].to_vec()).filter(|v| v.iter().any(|c| !c.is_zero())).collect();
        // boundaries and the diagonal lattice
        let mut rels = IntegerMatrix::with_cols(width);
        for row in diagonal_rows(&gm.module, layout.tuples(n)) {
            rels.push_row(row);
        }
        if n > 0 {
            let d_prev = lifted_differential(gm, &layout, n - 1);
            for c in 0..d_prev.cols() {
                rels.push_row(d_prev.column(c));
            }
        }
        let quotient = group_from_relations(width, &rels)?;
        let qf = quotient.group.invariant_factors.clone();
        let m = generators.len();
        let mut images = IntegerMatrix::zeros(qf.len(), m);
        for (j, z) in generators.iter().enumerate() {
            for (i, c) in quotient.to_coords(z).into_iter().enumerate() {
                images.set(i, j, BigInt::from(c));
            }
        }
        let classes = subgroup_presentation(&images, &qf)?;
        Ok(CohomologyGroup { degree: n, group: classes.group.clone(), normalized, alphabet: layout.alphabet, quotient, generators, images, classes })
    }

    pub fn order(&self) -> u64 {
        self.group.order()
    }

    fn layout(&self, gm: &GModule) -> Layout {
        Layout { alphabet: self.alphabet.clone(), rank: gm.module.rank() }
    }

    fn lift(&self, gm: &GModule, c: &Cochain) -> Vec<BigInt> {
        let layout = self.layout(gm);
        let order = gm.group.order();
        let mut out = Vec::with_capacity(layout.width(self.degree));
        for t in 0..layout.tuples(self.degree) {
            let args = layout.tuple(self.degree, t);
            out.extend(c.at(order, &args).iter().map(|&v| BigInt::from(v)));
        }
        out
    }

    /// Coordinates in `H^n` of the class of a cocycle.
    pub fn class_of(&self, gm: &GModule, c: &Cochain) -> Result<Vec<u64>> {
        if c.degree != self.degree || !is_cocycle(gm, c) {
            return Err(Error::NotACocycle);
        }
        if self.normalized && !c.is_normalized(gm) {
            return Err(Error::Shape("cochain is not normalized".into()));
        }
        let q = self.quotient.to_coords(&self.lift(gm, c));
        let qf = &self.quotient.group.invariant_factors;
        let mut system = IntegerMatrix::zeros(qf.len(), self.generators.len() + qf.len());
        for i in 0..qf.len() {
            for j in 0..self.generators.len() {
                system.set(i, j, self.images.get(i, j).clone());
            }
            system.set(i, self.generators.len() + i, BigInt::from(qf[i]));
        }
        let rhs: Vec<BigInt> = q.into_iter().map(BigInt::from).collect();
        let sol = integer_solve(&system, &rhs).ok_or_else(|| Error::NoSolution("cocycle outside the cocycle lattice".into()))?;
        Ok(self.classes.to_coords(&sol[..self.generators.len()]))
    }

    /// A cocycle in the class with the given coordinates.
    pub fn representative(&self, gm: &GModule, coords: &[u64]) -> Cochain {
        let layout = self.layout(gm);
        let width = layout.width(self.degree);
        let weights = self.classes.lift(coords);
        let mut acc = vec![BigInt::zero(); width];
        for (w, z) in weights.iter().zip(&self.generators) {
            for (a, v) in acc.iter_mut().zip(z) {
                *a += w * v;
            }
        }
        let order = gm.group.order();
        let mut c = Cochain::identity(gm, self.degree);
        let rank = layout.rank;
        for t in 0..layout.tuples(self.degree) {
            let args = layout.tuple(self.degree, t);
            let value = gm.module.reduce(&acc[t * rank..(t + 1) * rank]);
            c.values[Cochain::index(order, &args)] = value;
        }
        c
    }

    /// One representative per class, in the enumeration order of the presentation.
    pub fn representatives(&self, gm: &GModule) -> Vec<Cochain> {
        self.group.elements().map(|h| self.representative(gm, &h)).collect()
    }
}

/// The subgroup of `Z/q_1 x ... x Z/q_r` generated by the columns of `images`.
fn subgroup_presentation(images: &IntegerMatrix, qf: &[u64]) -> Result<RelationQuotient> {
    let m = images.cols();
    let mut aug = IntegerMatrix::zeros(qf.len(), m + qf.len());
    for i in 0..qf.len() {
        for j in 0..m {
            aug.set(i, j, images.get(i, j).clone());
        }
        aug.set(i, m + i, BigInt::from(qf[i]));
    }
    let mut rels = IntegerMatrix::with_cols(m);
    for v in integer_kernel(&aug) {
        rels.push_row(v[..m].to_vec());
    }
    Ok(group_from_relations(m, &rels)?)
}
