//! Finite groups given by multiplication tables.

use serde::{Deserialize, Serialize};

use super::AlgebraError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGroupTable {
    order: usize,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroupTable {
    /// Validates associativity, identity and inverses on the full table.
    pub fn new(table: Vec<Vec<usize>>, identity: usize) -> Result<Self, AlgebraError> {
        let n = table.len();
        if n == 0 {
            return Err(AlgebraError::InvalidGroup("empty table".into()));
        }
        if identity >= n {
            return Err(AlgebraError::InvalidGroup(format!("identity index {identity} out of range")));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n || row.iter().any(|&v| v >= n) {
                return Err(AlgebraError::InvalidGroup(format!("row {i} malformed")));
            }
        }
        for a in 0..n {
            if table[identity][a] != a || table[a][identity] != a {
                return Err(AlgebraError::InvalidGroup(format!("{identity} is not an identity for {a}")));
            }
        }
        let mut inverse = vec![0; n];
        for a in 0..n {
            let Some(b) = (0..n).find(|&b| table[a][b] == identity && table[b][a] == identity) else {
                return Err(AlgebraError::InvalidGroup(format!("element {a} has no inverse")));
            };
            inverse[a] = b;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(AlgebraError::InvalidGroup(format!("not associative on ({a}, {b}, {c})")));
                    }
                }
            }
        }
        Ok(FiniteGroupTable { order: n, table, identity, inverse })
    }

    /// `Z/n` written multiplicatively; element `k` is the `k`-th power of the generator.
    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::new(table, 0).expect("cyclic table is a group")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn non_identity(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.order).filter(move |&g| g != self.identity)
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.table[a][b] == self.table[b][a]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_inverses() {
        let g = FiniteGroupTable::cyclic(5);
        for a in g.elements() {
            assert_eq!(g.mul(a, g.inv(a)), g.identity());
        }
    }

    #[test]
    fn rejects_non_group() {
        let table = vec![vec![0, 1], vec![1, 1]];
        assert!(FiniteGroupTable::new(table, 0).is_err());
    }
}
