//! Tensor products over the base ring as explicit quotients of plain tensor spaces.

use std::sync::Arc;

use crate::algebra::FpMatrix;
use crate::bimodule::Bimodule;
use crate::{Error, Result};

/// `F_p^ambient / span(relations)` with a projection and a section.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quotient {
    /// `dim x ambient`.
    pub proj: FpMatrix,
    /// `ambient x dim`; `proj * sect = I`.
    pub sect: FpMatrix,
}

impl Quotient {
    /// The complement is spanned by the non-pivot coordinates of the reduced relation matrix.
    pub fn from_relations(p: u64, ambient: usize, relations: &FpMatrix) -> Quotient {
        assert_eq!(relations.cols(), ambient);
        let (r, pivots) = relations.rref();
        let mut pivot_row = vec![None; ambient];
        for (k, &c) in pivots.iter().enumerate() {
            pivot_row[c] = Some(k);
        }
        let free: Vec<usize> = (0..ambient).filter(|&c| pivot_row[c].is_none()).collect();
        let dim = free.len();
        let mut proj = FpMatrix::zeros(p, dim, ambient);
        let mut sect = FpMatrix::zeros(p, ambient, dim);
        for (k, &q) in free.iter().enumerate() {
            sect.set(q, k, 1);
            for j in 0..ambient {
                let v = match pivot_row[j] {
                    None => u64::from(j == q),
                    Some(row) => (p - r.get(row, q)) % p,
                };
                proj.set(k, j, v);
            }
        }
        Quotient { proj, sect }
    }

    pub fn dim(&self) -> usize {
        self.proj.rows()
    }

    pub fn ambient(&self) -> usize {
        self.proj.cols()
    }

    /// Pushes a map defined on the ambient space through the quotient,
    /// failing if it does not vanish on the relations.
    pub fn descend(&self, phi: &FpMatrix) -> Result<FpMatrix> {
        let p = phi.p();
        let kernel_part = FpMatrix::identity(p, self.ambient()).sub(&self.sect.mul(&self.proj));
        if !phi.mul(&kernel_part).is_zero() {
            return Err(Error::NotBalanced("map does not vanish on the relations".into()));
        }
        Ok(phi.mul(&self.sect))
    }
}

/// A bracketed tensor product `M_1 (x) ... (x) M_k` over `R`.
///
/// `proj` and `sect` relate the result to the plain tensor product of the leaves,
/// indexed lexicographically with the first leaf most significant.
#[derive(Clone, Debug)]
pub struct TensorNode {
    pub module: Bimodule,
    pub leaves: Vec<usize>,
    pub proj: FpMatrix,
    pub sect: FpMatrix,
    /// Quotient relative to the plain product of the two children's modules.
    pub top: Quotient,
    pub children: Option<(usize, usize)>,
}

impl TensorNode {
    pub fn leaf(m: &Bimodule) -> TensorNode {
        let p = m.p();
        let id = FpMatrix::identity(p, m.dim());
        TensorNode {
            module: m.clone(),
            leaves: vec![m.dim()],
            proj: id.clone(),
            sect: id.clone(),
            top: Quotient { proj: id.clone(), sect: id },
            children: None,
        }
    }

    pub fn combine(a: &TensorNode, b: &TensorNode) -> TensorNode {
        let (m, n) = (&a.module, &b.module);
        assert!(Arc::ptr_eq(m.ring(), n.ring()), "tensor product over different rings");
        let p = m.p();
        let (dm, dn) = (m.dim(), n.dim());
        let im = FpMatrix::identity(p, dm);
        let inn = FpMatrix::identity(p, dn);
        let mut rel = FpMatrix::zeros(p, 0, dm * dn);
        for (rm, ln) in m.right_basis().iter().zip(n.left_basis()) {
            // columns of (R_i (x) I - I (x) L_i) span the balancing relations
            let gen = rm.kron(&inn).sub(&im.kron(ln)).transpose();
            rel = rel.vstack(&gen);
            let (r, piv) = rel.rref();
            rel = r.submatrix(0..piv.len(), 0..dm * dn);
        }
        let q = Quotient::from_relations(p, dm * dn, &rel);
        let induce = |a: &FpMatrix| q.proj.mul(a).mul(&q.sect);
        let left = m.left_basis().iter().map(|l| induce(&l.kron(&inn))).collect();
        let right = n.right_basis().iter().map(|r| induce(&im.kron(r))).collect();
        let module = Bimodule::new(m.ring().clone(), q.dim(), left, right).expect("tensor product of unital bimodules is unital");
        let mut leaves = a.leaves.clone();
        leaves.extend_from_slice(&b.leaves);
        TensorNode {
            module,
            leaves,
            proj: q.proj.mul(&a.proj.kron(&b.proj)),
            sect: a.sect.kron(&b.sect).mul(&q.sect),
            top: q,
            children: Some((dm, dn)),
        }
    }

    pub fn pair(m: &Bimodule, n: &Bimodule) -> TensorNode {
        TensorNode::combine(&TensorNode::leaf(m), &TensorNode::leaf(n))
    }

    /// Left-bracketed product `((M_1 (x) M_2) (x) ...) (x) M_k`.
    pub fn chain(ms: &[&Bimodule]) -> TensorNode {
        let mut node = TensorNode::leaf(ms[0]);
        for m in &ms[1..] {
            node = TensorNode::combine(&node, &TensorNode::leaf(m));
        }
        node
    }

    pub fn dim(&self) -> usize {
        self.module.dim()
    }

    pub fn plain_dim(&self) -> usize {
        self.leaves.iter().product()
    }

    /// Turns a map defined on plain leaf tuples into a map on the tensor product.
    pub fn descend(&self, phi: &FpMatrix) -> Result<FpMatrix> {
        assert_eq!(phi.cols(), self.plain_dim());
        let p = phi.p();
        let kernel_part = FpMatrix::identity(p, self.plain_dim()).sub(&self.sect.mul(&self.proj));
        if !phi.mul(&kernel_part).is_zero() {
            return Err(Error::NotBalanced("map is not balanced".into()));
        }
        Ok(phi.mul(&self.sect))
    }

    /// The canonical map between two bracketings of the same leaves.
    pub fn reassociate(&self, target: &TensorNode) -> FpMatrix {
        assert_eq!(self.leaves, target.leaves, "reassociation needs identical leaves");
        target.proj.mul(&self.sect)
    }
}

/// `f (x) g : M (x) N -> M' (x) N'` for two binary nodes.
pub fn tensor_maps(source: &TensorNode, target: &TensorNode, f: &FpMatrix, g: &FpMatrix) -> FpMatrix {
    let (sm, sn) = source.children.expect("binary source node");
    let (tm, tn) = target.children.expect("binary target node");
    assert_eq!((f.cols(), g.cols()), (sm, sn));
    assert_eq!((f.rows(), g.rows()), (tm, tn));
    target.top.proj.mul(&f.kron(g)).mul(&source.top.sect)
}

/// The action map `R (x) M -> M`, `r (x) m -> rm`, on plain tensors.
pub fn left_action_plain(m: &Bimodule) -> FpMatrix {
    let p = m.p();
    let n = m.ring().dim();
    let mut out = FpMatrix::zeros(p, m.dim(), n * m.dim());
    for i in 0..n {
        for a in 0..m.dim() {
            let col = m.left_basis()[i].column(a);
            for (row, v) in col.into_iter().enumerate() {
                out.set(row, i * m.dim() + a, v);
            }
        }
    }
    out
}

/// The action map `M (x) R -> M`, `m (x) r -> mr`, on plain tensors.
pub fn right_action_plain(m: &Bimodule) -> FpMatrix {
    let p = m.p();
    let n = m.ring().dim();
    let mut out = FpMatrix::zeros(p, m.dim(), m.dim() * n);
    for a in 0..m.dim() {
        for i in 0..n {
            let col = m.right_basis()[i].column(a);
            for (row, v) in col.into_iter().enumerate() {
                out.set(row, a * n + i, v);
            }
        }
    }
    out
}

/// Applies `A_1 (x) ... (x) A_k` to a plain tensor without forming the Kronecker product.
pub fn apply_kron(mats: &[&FpMatrix], v: &[u64]) -> Vec<u64> {
    let mut dims: Vec<usize> = mats.iter().map(|m| m.cols()).collect();
    assert_eq!(dims.iter().product::<usize>(), v.len(), "apply_kron shape");
    let mut cur = v.to_vec();
    for (mode, m) in mats.iter().enumerate() {
        let p = m.p();
        let outer: usize = dims[..mode].iter().product();
        let inner: usize = dims[mode + 1..].iter().product();
        let (din, dout) = (dims[mode], m.rows());
        let mut next = vec![0u64; outer * dout * inner];
        for o in 0..outer {
            for j in 0..din {
                for i in 0..inner {
                    let c = cur[(o * din + j) * inner + i];
                    if c == 0 {
                        continue;
                    }
                    for r in 0..dout {
                        let a = m.get(r, j);
                        if a != 0 {
                            let idx = (o * dout + r) * inner + i;
                            next[idx] = (next[idx] + a * c) % p;
                        }
                    }
                }
            }
        }
        dims[mode] = dout;
        cur = next;
    }
    cur
}
