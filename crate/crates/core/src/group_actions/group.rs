//! Finite groups as Cayley tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::permutations;

/// A finite group on `0..order`, given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteGroup {
    pub table: Vec<Vec<usize>>,
    #[serde(default)]
    pub identity: usize,
}

impl FiniteGroup {
    /// Validates the group axioms.
    pub fn new(table: Vec<Vec<usize>>) -> Result<FiniteGroup> {
        let n = table.len();
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e].get(a) == Some(&a) && table[a].get(e) == Some(&a)))
            .ok_or_else(|| Error::InvalidTable("no identity element".into()))?;
        let g = FiniteGroup { table, identity };
        g.check()?;
        Ok(g)
    }

    pub fn from_json(s: &str) -> Result<FiniteGroup> {
        #[derive(Deserialize)]
        struct Raw {
            table: Vec<Vec<usize>>,
        }
        let raw: Raw = serde_json::from_str(s)?;
        FiniteGroup::new(raw.table)
    }

    fn check(&self) -> Result<()> {
        let n = self.order();
        if n == 0 {
            return Err(Error::InvalidTable("a group is nonempty".into()));
        }
        for row in &self.table {
            if row.len() != n || row.iter().any(|&x| x >= n) {
                return Err(Error::InvalidTable("the table is not square over 0..n".into()));
            }
        }
        for a in 0..n {
            if !(0..n).any(|b| self.mul(a, b) == self.identity) {
                return Err(Error::InvalidTable(format!("{a} has no inverse")));
            }
            for b in 0..n {
                for c in 0..n {
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return Err(Error::InvalidTable(format!("associativity fails at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        (0..self.order()).find(|&b| self.mul(a, b) == self.identity).expect("groups have inverses")
    }

    pub fn trivial() -> FiniteGroup {
        FiniteGroup { table: vec![vec![0]], identity: 0 }
    }

    pub fn cyclic(n: usize) -> FiniteGroup {
        assert!(n > 0, "cyclic groups are nonempty");
        FiniteGroup { table: (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect(), identity: 0 }
    }

    /// `a × b`, with `(x, y)` numbered `x · |b| + y`.
    pub fn product(a: &FiniteGroup, b: &FiniteGroup) -> FiniteGroup {
        let (n, m) = (a.order(), b.order());
        let table = (0..n * m)
            .map(|p| (0..n * m).map(|q| a.mul(p / m, q / m) * m + b.mul(p % m, q % m)).collect())
            .collect();
        FiniteGroup { table, identity: a.identity * m + b.identity }
    }

    /// The dihedral group of order `2n`: `r^i s^j` numbered `i + n j`.
    pub fn dihedral(n: usize) -> FiniteGroup {
        assert!(n > 0);
        let decode = |x: usize| (x % n, x / n);
        let table = (0..2 * n)
            .map(|p| {
                (0..2 * n)
                    .map(|q| {
                        let ((i, j), (k, l)) = (decode(p), decode(q));
                        // r^i s^j r^k s^l = r^(i ± k) s^(j + l)
                        let r = if j == 0 { (i + k) % n } else { (i + n - k) % n };
                        r + n * ((j + l) % 2)
                    })
                    .collect()
            })
            .collect();
        FiniteGroup { table, identity: 0 }
    }

    /// The quaternion group `{±1, ±i, ±j, ±k}`, numbered 1, i, j, k, −1, −i, −j, −k.
    pub fn quaternion() -> FiniteGroup {
        // unit products among 1, i, j, k as (sign, unit)
        let unit = |a: usize, b: usize| -> (bool, usize) {
            match (a, b) {
                (0, x) | (x, 0) => (false, x),
                (x, y) if x == y => (true, 0),
                (1, 2) => (false, 3),
                (2, 1) => (true, 3),
                (2, 3) => (false, 1),
                (3, 2) => (true, 1),
                (3, 1) => (false, 2),
                (1, 3) => (true, 2),
                _ => unreachable!(),
            }
        };
        let table = (0..8)
            .map(|p| {
                (0..8)
                    .map(|q: usize| {
                        let (neg, u) = unit(p % 4, q % 4);
                        let sign = neg ^ (p >= 4) ^ (q >= 4);
                        u + if sign { 4 } else { 0 }
                    })
                    .collect()
            })
            .collect();
        FiniteGroup { table, identity: 0 }
    }

    /// The symmetric group on `n` letters, elements in lexicographic order;
    /// the product is composition `(στ)(i) = σ(τ(i))`.
    pub fn symmetric(n: usize) -> FiniteGroup {
        let perms = permutations(n);
        let index = |p: &Vec<usize>| perms.binary_search(p).expect("permutation");
        let table = perms
            .iter()
            .map(|s| perms.iter().map(|t| index(&t.iter().map(|&i| s[i]).collect())).collect())
            .collect();
        FiniteGroup { table, identity: 0 }
    }

    /// A representative of every isomorphism class of order at most 8.
    pub fn all_up_to_8() -> Vec<(String, FiniteGroup)> {
        let c = FiniteGroup::cyclic;
        vec![
            ("1".into(), FiniteGroup::trivial()),
            ("Z2".into(), c(2)),
            ("Z3".into(), c(3)),
            ("Z4".into(), c(4)),
            ("Z2xZ2".into(), FiniteGroup::product(&c(2), &c(2))),
            ("Z5".into(), c(5)),
            ("Z6".into(), c(6)),
            ("S3".into(), FiniteGroup::symmetric(3)),
            ("Z7".into(), c(7)),
            ("Z8".into(), c(8)),
            ("Z4xZ2".into(), FiniteGroup::product(&c(4), &c(2))),
            ("Z2xZ2xZ2".into(), FiniteGroup::product(&FiniteGroup::product(&c(2), &c(2)), &c(2))),
            ("D4".into(), FiniteGroup::dihedral(4)),
            ("Q8".into(), FiniteGroup::quaternion()),
        ]
    }

    pub fn element_orders(&self) -> Vec<usize> {
        (0..self.order())
            .map(|a| {
                let mut x = a;
                let mut k = 1;
                while x != self.identity {
                    x = self.mul(x, a);
                    k += 1;
                }
                k
            })
            .collect()
    }

    /// An isomorphism `self -> other` as an element map, by backtracking over
    /// order-preserving assignments.
    pub fn isomorphism_to(&self, other: &FiniteGroup) -> Option<Vec<usize>> {
        let n = self.order();
        if n != other.order() {
            return None;
        }
        let (oa, ob) = (self.element_orders(), other.element_orders());
        let mut sa = oa.clone();
        let mut sb = ob.clone();
        sa.sort_unstable();
        sb.sort_unstable();
        if sa != sb {
            return None;
        }
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        map[self.identity] = other.identity;
        used[other.identity] = true;
        self.extend_iso(other, &oa, &ob, &mut map, &mut used, 0).then_some(map)
    }

    fn extend_iso(&self, other: &FiniteGroup, oa: &[usize], ob: &[usize], map: &mut Vec<usize>, used: &mut Vec<bool>, a: usize) -> bool {
        let n = self.order();
        if a == n {
            return (0..n).all(|x| (0..n).all(|y| map[self.mul(x, y)] == other.mul(map[x], map[y])));
        }
        if map[a] != usize::MAX {
            return self.extend_iso(other, oa, ob, map, used, a + 1);
        }
        for b in 0..n {
            if used[b] || oa[a] != ob[b] {
                continue;
            }
            map[a] = b;
            used[b] = true;
            // products with already-mapped elements must stay consistent
            let ok = (0..n).filter(|&x| map[x] != usize::MAX).all(|x| {
                let (p, q) = (self.mul(a, x), self.mul(x, a));
                (map[p] == usize::MAX || map[p] == other.mul(b, map[x])) && (map[q] == usize::MAX || map[q] == other.mul(map[x], b))
            });
            if ok && self.extend_iso(other, oa, ob, map, used, a + 1) {
                return true;
            }
            map[a] = usize::MAX;
            used[b] = false;
        }
        false
    }

    pub fn is_isomorphic(&self, other: &FiniteGroup) -> bool {
        self.isomorphism_to(other).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructions_are_groups() {
        for (name, g) in FiniteGroup::all_up_to_8() {
            let checked = FiniteGroup::new(g.table.clone()).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(checked.identity, g.identity);
        }
    }

    #[test]
    fn classes_are_distinct() {
        let all = FiniteGroup::all_up_to_8();
        for (i, (a, g)) in all.iter().enumerate() {
            for (b, h) in &all[i + 1..] {
                assert!(!g.is_isomorphic(h), "{a} ≅ {b}");
            }
            assert!(g.is_isomorphic(g));
        }
        assert!(FiniteGroup::cyclic(6).is_isomorphic(&FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(3))));
        assert!(FiniteGroup::dihedral(3).is_isomorphic(&FiniteGroup::symmetric(3)));
    }

    #[test]
    fn bad_tables() {
        assert!(FiniteGroup::new(vec![vec![0, 1], vec![1, 1]]).is_err());
        assert!(FiniteGroup::new(vec![]).is_err());
        assert!(FiniteGroup::from_json(r#"{"table":[[0,1],[1,0]]}"#).is_ok());
    }
}
