//! Instance files: JSON description of `R -> S`, `G` and `Theta`, plus builtin generators.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::fp::inv_mod;
use crate::algebra::{is_prime, FiniteGroupTable, FpMatrix};
use crate::bimodule::Bimodule;
use crate::center::CenterRing;
use crate::crossed::FactorMap;
use crate::picard::{verify_inv_element, InvertibleBimodule};
use crate::ring::{finite_field, LocalUnitRing, RingData, RingExtension};
use crate::{Caps, Error, Result};

/// Largest field size accepted by [`galois`].
pub const GALOIS_MAX: u64 = 1 << 10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub p: u64,
    /// The base ring `R`.
    pub ring: RingData,
    pub extension: ExtensionBlock,
    pub group: GroupBlock,
    /// One entry per group element; `Theta_x` as a basis of a subspace of `S`.
    pub theta: Vec<ThetaBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor_map: Option<FactorMapBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ledger: Option<LedgerBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub caps: Option<Caps>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionBlock {
    #[serde(rename = "S")]
    pub top: RingData,
    /// Rows of the `dim S x dim R` matrix of `R -> S`.
    pub embedding: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupBlock {
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaBlock {
    pub element: usize,
    pub basis: Vec<Vec<u64>>,
}

/// `F_{x,y}` as rows of a matrix on plain `Theta_x (x) Theta_y` coordinates, indexed `x * |G| + y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorMapBlock {
    pub f: Vec<Vec<Vec<u64>>>,
    pub iota: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct LedgerBlock {
    /// Extra generators of the Picard ledger.
    #[serde(default)]
    pub pic: Vec<BimoduleBlock>,
}

/// An `R`-bimodule by the matrices of left and right multiplication by each basis element of `R`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BimoduleBlock {
    pub dim: usize,
    pub left: Vec<Vec<Vec<u64>>>,
    pub right: Vec<Vec<Vec<u64>>>,
}

/// A validated instance.
#[derive(Clone, Debug)]
pub struct Instance {
    pub file: InstanceFile,
    pub ext: RingExtension,
    pub center: CenterRing,
    pub group: FiniteGroupTable,
    pub fm: FactorMap,
    pub extra_pic: Vec<Bimodule>,
    pub caps: Caps,
}

fn at(pointer: impl Into<String>) -> impl FnOnce(Error) -> Error {
    let pointer = pointer.into();
    move |e| match e {
        Error::Validation { .. } => e,
        other => Error::Validation { pointer, message: other.to_string() },
    }
}

fn invalid(pointer: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Validation { pointer: pointer.into(), message: message.into() }
}

fn ring_pointer(prefix: &str, e: &Error) -> String {
    match e {
        Error::NotIdempotent { index } => format!("{prefix}/E/{index}"),
        Error::UnitClosure { first, .. } => format!("{prefix}/E/{first}"),
        Error::NoLocalUnit { basis } => format!("{prefix}/mult/{basis}"),
        Error::NonAssociative(i, ..) => format!("{prefix}/mult/{i}"),
        _ => prefix.to_string(),
    }
}

fn build_ring(p: u64, data: &RingData, prefix: &str) -> Result<Arc<LocalUnitRing>> {
    LocalUnitRing::new(p, data.clone()).map(Arc::new).map_err(|e| {
        let pointer = ring_pointer(prefix, &e);
        at(pointer)(e)
    })
}

fn matrix(p: u64, rows: &[Vec<u64>], shape: (usize, usize), pointer: &str) -> Result<FpMatrix> {
    if rows.len() != shape.0 || rows.iter().any(|r| r.len() != shape.1) {
        return Err(invalid(pointer, format!("expected a {} x {} matrix", shape.0, shape.1)));
    }
    Ok(FpMatrix::from_rows(p, rows))
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Canonical JSON: pretty-printed with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance serializes");
        s.push('\n');
        s
    }

    /// Runs every validator; the first failure is reported with its JSON pointer.
    pub fn validate(&self) -> Result<Instance> {
        let p = self.p;
        if !is_prime(p) {
            return Err(invalid("/p", format!("{p} is not prime")));
        }
        let caps = self.caps.clone().unwrap_or_default();
        let caps = Caps { seed: self.seed.unwrap_or(caps.seed), ..caps };
        let base = build_ring(p, &self.ring, "/ring")?;
        let top = build_ring(p, &self.extension.top, "/extension/S")?;
        let emb = matrix(p, &self.extension.embedding, (top.dim(), base.dim()), "/extension/embedding")?;
        let ext = RingExtension::new(base.clone(), top, emb).map_err(at("/extension/embedding"))?;
        let group = FiniteGroupTable::new(self.group.table.clone(), self.group.identity).map_err(|e| at("/group/table")(e.into()))?;
        let center = CenterRing::new(base.clone(), caps.enumeration).map_err(at("/ring"))?;

        let n = group.order();
        let mut slot: Vec<Option<usize>> = vec![None; n];
        for (i, t) in self.theta.iter().enumerate() {
            if t.element >= n {
                return Err(invalid(format!("/theta/{i}/element"), format!("no group element {}", t.element)));
            }
            if slot[t.element].replace(i).is_some() {
                return Err(invalid(format!("/theta/{i}/element"), format!("element {} listed twice", t.element)));
            }
            if let Some(j) = t.basis.iter().position(|v| v.len() != ext.top.dim()) {
                return Err(invalid(format!("/theta/{i}/basis/{j}"), "vector length differs from dim S"));
            }
        }
        for x in group.elements() {
            if slot[x].is_none() {
                let partner = (0..n).find(|&y| group.inv(y) == x && slot[y].is_some());
                let message = match partner {
                    Some(y) => format!("missing Theta for element {x}, the inverse of {y}"),
                    None => format!("missing Theta for element {x}"),
                };
                return Err(invalid("/theta", message));
            }
        }
        let slot: Vec<usize> = slot.into_iter().map(|s| s.expect("checked")).collect();
        let bases: Vec<Vec<Vec<u64>>> = slot.iter().map(|&i| self.theta[i].basis.clone()).collect();
        let mut theta: Vec<InvertibleBimodule> = Vec::with_capacity(n);
        for x in group.elements() {
            let pointer = format!("/theta/{}", slot[x]);
            let inv = verify_inv_element(&ext, &bases[x], &bases[group.inv(x)], &center).map_err(at(pointer))?;
            theta.push(inv.inv);
        }

        let fm = match &self.factor_map {
            None => FactorMap::from_subbimodules(&ext, group.clone(), theta, &bases).map_err(at("/theta"))?,
            Some(block) => {
                if block.f.len() != n * n {
                    return Err(invalid("/factor_map/f", format!("expected {} matrices", n * n)));
                }
                let mut f_plain = Vec::with_capacity(n * n);
                for x in group.elements() {
                    for y in group.elements() {
                        let shape = (theta[group.mul(x, y)].dim(), theta[x].dim() * theta[y].dim());
                        f_plain.push(matrix(p, &block.f[x * n + y], shape, &format!("/factor_map/f/{}", x * n + y))?);
                    }
                }
                let iota = matrix(p, &block.iota, (theta[group.identity()].dim(), base.dim()), "/factor_map/iota")?;
                FactorMap::validate(group.clone(), theta, f_plain, iota).map_err(|e| {
                    let pointer = match &e {
                        Error::AssocFail { x, y, .. } | Error::NotIso { x, y } => format!("/factor_map/f/{}", x * n + y),
                        Error::UnitFail { .. } => "/factor_map/iota".to_string(),
                        _ => "/factor_map".to_string(),
                    };
                    at(pointer)(e)
                })?
            }
        };

        let mut extra_pic = Vec::new();
        if let Some(ledger) = &self.ledger {
            for (i, b) in ledger.pic.iter().enumerate() {
                let pointer = format!("/ledger/pic/{i}");
                let shape = (b.dim, b.dim);
                if b.left.len() != base.dim() || b.right.len() != base.dim() {
                    return Err(invalid(&pointer, "one action matrix per basis element of R is required"));
                }
                let left = b.left.iter().map(|m| matrix(p, m, shape, &pointer)).collect::<Result<Vec<_>>>()?;
                let right = b.right.iter().map(|m| matrix(p, m, shape, &pointer)).collect::<Result<Vec<_>>>()?;
                let m = Bimodule::new(base.clone(), b.dim, left, right).map_err(at(pointer.clone()))?;
                InvertibleBimodule::from_dual(&m).map_err(at(pointer))?;
                extra_pic.push(m);
            }
        }
        Ok(Instance { file: self.clone(), ext, center, group, fm, extra_pic, caps })
    }
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    InstanceFile::from_json(&text)?.validate()
}

impl Instance {
    pub fn name(&self) -> &str {
        self.file.name.as_deref().unwrap_or("instance")
    }
}

fn bimodule_block(m: &Bimodule) -> BimoduleBlock {
    BimoduleBlock { dim: m.dim(), left: m.left_basis().iter().map(FpMatrix::to_rows).collect(), right: m.right_basis().iter().map(FpMatrix::to_rows).collect() }
}

impl From<&Bimodule> for BimoduleBlock {
    fn from(m: &Bimodule) -> Self {
        bimodule_block(m)
    }
}

fn cyclic_block(n: usize) -> GroupBlock {
    let g = FiniteGroupTable::cyclic(n);
    GroupBlock { table: g.table().to_vec(), identity: g.identity() }
}

/// `R = F_{p^n}`, `G = C_n` generated by the Frobenius, `Theta_x = R^x` inside the skew group ring.
///
/// `S` has basis `b_i u_x` at index `x * n + i` with `(a u_x)(b u_y) = a x(b) u_{xy}`.
pub fn galois(p: u64, n: usize) -> Result<InstanceFile> {
    if !is_prime(p) {
        return Err(Error::Shape(format!("{p} is not prime")));
    }
    let size = (p as u128).checked_pow(n as u32);
    if n < 2 || size.is_none_or(|s| s > GALOIS_MAX as u128) {
        return Err(Error::SizeCap(format!("galois({p},{n}) needs n >= 2 and p^n <= {GALOIS_MAX}")));
    }
    let (field, frob) = finite_field(p, n)?;
    let sigma: Vec<FpMatrix> = (0..n).map(|k| frob.pow(k as u64)).collect();
    let dim = n * n;
    let mut mult = vec![vec![vec![0u64; dim]; dim]; dim];
    for x in 0..n {
        for i in 0..n {
            for y in 0..n {
                for j in 0..n {
                    let prod = field.mul(&field.basis(i), &sigma[x].mul_vec(&field.basis(j)));
                    let xy = (x + y) % n;
                    for (k, c) in prod.into_iter().enumerate() {
                        mult[x * n + i][y * n + j][xy * n + k] = c;
                    }
                }
            }
        }
    }
    let one = field.basis(0);
    let mut unit = vec![0u64; dim];
    unit[..n].copy_from_slice(&one);
    let labels = field.labels().map(|l| (0..n).flat_map(|x| l.iter().map(move |b| format!("{b} u{x}"))).collect());
    let top = RingData { dim, mult, units: vec![unit], labels };
    let embedding = (0..dim).map(|row| (0..n).map(|col| u64::from(row == col)).collect()).collect();
    let theta = (0..n)
        .map(|x| ThetaBlock { element: x, basis: (0..n).map(|i| (0..dim).map(|k| u64::from(k == x * n + i)).collect()).collect() })
        .collect();
    Ok(InstanceFile {
        name: Some(format!("galois({p},{n})")),
        p,
        ring: field.data(),
        extension: ExtensionBlock { top, embedding },
        group: cyclic_block(n),
        theta,
        factor_map: None,
        ledger: None,
        caps: None,
        seed: None,
    })
}

/// `R = F_p` with trivial `Theta` and `S` the twisted group ring `u_x u_y = cocycle[x][y] u_{xy}`.
pub fn twisted(p: u64, group: &FiniteGroupTable, cocycle: &[Vec<u64>]) -> Result<InstanceFile> {
    if !is_prime(p) {
        return Err(Error::Shape(format!("{p} is not prime")));
    }
    let n = group.order();
    if cocycle.len() != n || cocycle.iter().any(|r| r.len() != n) {
        return Err(Error::Shape(format!("cocycle must be a {n} x {n} table")));
    }
    let c = |x: usize, y: usize| cocycle[x][y] % p;
    if (0..n).any(|x| (0..n).any(|y| c(x, y) == 0)) {
        return Err(Error::NotACocycle);
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let lhs = c(x, y) * c(group.mul(x, y), z) % p;
                let rhs = c(y, z) * c(x, group.mul(y, z)) % p;
                if lhs != rhs {
                    return Err(Error::NotACocycle);
                }
            }
        }
    }
    let one = group.identity();
    let mut mult = vec![vec![vec![0u64; n]; n]; n];
    for x in 0..n {
        for y in 0..n {
            mult[x][y][group.mul(x, y)] = c(x, y);
        }
    }
    // the identity of S is c(1,1)^{-1} u_1
    let scale = inv_mod(c(one, one), p);
    let unit: Vec<u64> = (0..n).map(|k| if k == one { scale } else { 0 }).collect();
    let labels = Some((0..n).map(|x| format!("u{x}")).collect());
    let top = RingData { dim: n, mult, units: vec![unit.clone()], labels };
    let ring = RingData { dim: 1, mult: vec![vec![vec![1]]], units: vec![vec![1]], labels: Some(vec!["1".into()]) };
    let embedding = unit.iter().map(|&v| vec![v]).collect();
    let theta = (0..n).map(|x| ThetaBlock { element: x, basis: vec![(0..n).map(|k| u64::from(k == x)).collect()] }).collect();
    let trivial = (0..n).all(|x| (0..n).all(|y| c(x, y) == 1));
    let name = if trivial { format!("twisted({p},C{n})") } else { format!("twisted({p},C{n},{})", serde_json::to_string(cocycle).expect("integer table")) };
    Ok(InstanceFile {
        name: Some(name),
        p,
        ring,
        extension: ExtensionBlock { top, embedding },
        group: GroupBlock { table: group.table().to_vec(), identity: one },
        theta,
        factor_map: None,
        ledger: None,
        caps: None,
        seed: None,
    })
}

/// The normalized 2-cocycle on `C_2` with `sigma(x, x) = -1`.
pub fn minus_one_cocycle(p: u64) -> Vec<Vec<u64>> {
    vec![vec![1, 1], vec![1, p - 1]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossed::build_crossed_product;
    use crate::ring::{find_ring_isomorphism, matrix_algebra, product_of_prime_fields};

    #[test]
    fn galois_round_trips() {
        let file = galois(2, 2).unwrap();
        let inst = file.validate().unwrap();
        let again = InstanceFile::from_json(&inst.file.to_json()).unwrap();
        assert_eq!(again, file);
        assert_eq!(again.to_json(), file.to_json());
    }

    #[test]
    fn galois_f4_is_matrix_ring() {
        let inst = galois(2, 2).unwrap().validate().unwrap();
        assert_eq!(inst.ext.base.dim(), 2);
        assert_eq!(inst.ext.top.dim(), 4);
        let m2 = matrix_algebra(2, 2).unwrap();
        assert!(find_ring_isomorphism(&inst.ext.top, &m2, &Caps::default()).is_found());
    }

    #[test]
    fn galois_size_limits() {
        assert!(matches!(galois(2, 1), Err(Error::SizeCap(_))));
        assert!(matches!(galois(2, 11), Err(Error::SizeCap(_))));
        assert!(matches!(galois(3, 7), Err(Error::SizeCap(_))));
        assert_eq!(galois(2, 3).unwrap().group.table.len(), 3);
        assert_eq!(galois(3, 2).unwrap().ring.dim, 2);
    }

    #[test]
    fn twisted_f3_c2() {
        let g = FiniteGroupTable::cyclic(2);
        let split = twisted(3, &g, &[vec![1, 1], vec![1, 1]]).unwrap().validate().unwrap();
        let f3xf3 = product_of_prime_fields(3, 2, vec![vec![1, 1]]).unwrap();
        assert!(find_ring_isomorphism(&split.ext.top, &f3xf3, &Caps::default()).is_found());
        let field = twisted(3, &g, &minus_one_cocycle(3)).unwrap().validate().unwrap();
        let (f9, _) = finite_field(3, 2).unwrap();
        assert!(find_ring_isomorphism(&field.ext.top, &f9, &Caps::default()).is_found());
        let cp = build_crossed_product(&field.fm).unwrap();
        assert!(find_ring_isomorphism(&cp.ring, &f9, &Caps::default()).is_found());
    }

    #[test]
    fn twisted_rejects_non_cocycles() {
        let g = FiniteGroupTable::cyclic(3);
        let bad = vec![vec![1, 1, 1], vec![1, 2, 1], vec![1, 1, 1]];
        assert_eq!(twisted(3, &g, &bad), Err(Error::NotACocycle));
        assert_eq!(twisted(3, &FiniteGroupTable::cyclic(2), &[vec![1, 1], vec![1, 0]]), Err(Error::NotACocycle));
    }

    #[test]
    fn non_idempotent_unit_is_located() {
        let mut file = galois(2, 2).unwrap();
        file.ring.units.push(vec![0, 1]);
        let err = file.validate().unwrap_err();
        assert!(matches!(err, Error::Validation { ref pointer, .. } if pointer == "/ring/E/1"), "{err:?}");
    }

    #[test]
    fn missing_inverse_component_is_located() {
        let mut file = galois(2, 3).unwrap();
        file.theta.remove(2);
        let err = file.validate().unwrap_err();
        match err {
            Error::Validation { pointer, message } => {
                assert_eq!(pointer, "/theta");
                assert!(message.contains("inverse of 1"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_fields_are_parse_errors() {
        let mut v: serde_json::Value = serde_json::from_str(&galois(2, 2).unwrap().to_json()).unwrap();
        v["bogus"] = serde_json::json!(1);
        assert!(matches!(InstanceFile::from_json(&v.to_string()), Err(Error::Parse(_))));
    }
}
