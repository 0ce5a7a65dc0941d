//! Bousfield–Segal maps on truncated simplicial sets and Hall's bracket
//! characterization of groups.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::group::FiniteGroup;
use crate::error::{Error, Result};

/// A finite monoid on `0..order` with unit `unit`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteMonoid {
    pub table: Vec<Vec<usize>>,
    pub unit: usize,
}

impl FiniteMonoid {
    pub fn new(table: Vec<Vec<usize>>, unit: usize) -> Result<FiniteMonoid> {
        let n = table.len();
        if unit >= n || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::InvalidTable("the table is not square over 0..n".into()));
        }
        let m = FiniteMonoid { table, unit };
        for a in 0..n {
            if m.mul(a, unit) != a || m.mul(unit, a) != a {
                return Err(Error::InvalidTable(format!("{unit} is not a unit at {a}")));
            }
            for b in 0..n {
                for c in 0..n {
                    if m.mul(m.mul(a, b), c) != m.mul(a, m.mul(b, c)) {
                        return Err(Error::InvalidTable(format!("associativity fails at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn of_group(g: &FiniteGroup) -> FiniteMonoid {
        FiniteMonoid { table: g.table.clone(), unit: g.identity }
    }

    /// `{1, z}` with `z² = z`.
    pub fn idempotent() -> FiniteMonoid {
        FiniteMonoid { table: vec![vec![0, 1], vec![1, 1]], unit: 0 }
    }

    pub fn point() -> FiniteMonoid {
        FiniteMonoid { table: vec![vec![0]], unit: 0 }
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }
}

/// Levels `0..=k` of a simplicial set with face and degeneracy tables:
/// `faces[n][i][x] = d_i x` for `x ∈ X_n`, `n ≥ 1`, and
/// `degeneracies[n][i][x] = s_i x` for `x ∈ X_n`, `n < k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialSetData {
    pub sizes: Vec<usize>,
    pub faces: Vec<Vec<Vec<usize>>>,
    pub degeneracies: Vec<Vec<Vec<usize>>>,
}

impl SimplicialSetData {
    pub fn top(&self) -> usize {
        self.sizes.len() - 1
    }

    /// The nerve of a monoid up to level `k`; `(g_1, …, g_n)` is numbered
    /// `Σ g_i · |M|^(i-1)`.
    pub fn nerve(m: &FiniteMonoid, k: usize) -> SimplicialSetData {
        let q = m.order();
        let sizes: Vec<usize> = (0..=k).map(|n| q.pow(n as u32)).collect();
        let decode = |n: usize, mut x: usize| -> Vec<usize> {
            (0..n)
                .map(|_| {
                    let g = x % q;
                    x /= q;
                    g
                })
                .collect()
        };
        let encode = |t: &[usize]| t.iter().rev().fold(0, |acc, &g| acc * q + g);
        let mut faces = vec![Vec::new()];
        let mut degeneracies = Vec::new();
        for n in 0..=k {
            if n >= 1 {
                faces.push(
                    (0..=n)
                        .map(|i| {
                            (0..sizes[n])
                                .map(|x| {
                                    let mut t = decode(n, x);
                                    if i == 0 {
                                        t.remove(0);
                                    } else if i == n {
                                        t.pop();
                                    } else {
                                        let g = m.mul(t[i - 1], t[i]);
                                        t[i - 1] = g;
                                        t.remove(i);
                                    }
                                    encode(&t)
                                })
                                .collect()
                        })
                        .collect(),
                );
            }
            if n < k {
                degeneracies.push(
                    (0..=n)
                        .map(|i| {
                            (0..sizes[n])
                                .map(|x| {
                                    let mut t = decode(n, x);
                                    t.insert(i, m.unit);
                                    encode(&t)
                                })
                                .collect()
                        })
                        .collect(),
                );
            }
        }
        SimplicialSetData { sizes, faces, degeneracies }
    }

    /// Checks table shapes and the simplicial identities.
    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::InvalidTable(s));
        let k = self.top();
        if self.faces.len() != k + 1 || self.degeneracies.len() != k {
            return bad("one face table per positive level and one degeneracy table per non-top level".into());
        }
        for n in 1..=k {
            if self.faces[n].len() != n + 1 || self.faces[n].iter().any(|d| d.len() != self.sizes[n] || d.iter().any(|&y| y >= self.sizes[n - 1])) {
                return bad(format!("face tables at level {n}"));
            }
        }
        for n in 0..k {
            if self.degeneracies[n].len() != n + 1
                || self.degeneracies[n].iter().any(|s| s.len() != self.sizes[n] || s.iter().any(|&y| y >= self.sizes[n + 1]))
            {
                return bad(format!("degeneracy tables at level {n}"));
            }
        }
        let d = |n: usize, i: usize, x: usize| self.faces[n][i][x];
        let s = |n: usize, i: usize, x: usize| self.degeneracies[n][i][x];
        for n in 2..=k {
            for j in 0..=n {
                for i in 0..j {
                    if (0..self.sizes[n]).any(|x| d(n - 1, i, d(n, j, x)) != d(n - 1, j - 1, d(n, i, x))) {
                        return bad(format!("d_{i} d_{j} = d_{} d_{i} fails at level {n}", j - 1));
                    }
                }
            }
        }
        for n in 0..k {
            for j in 0..=n {
                for i in 0..=n + 1 {
                    for x in 0..self.sizes[n] {
                        let lhs = d(n + 1, i, s(n, j, x));
                        let rhs = if i == j || i == j + 1 {
                            Some(x)
                        } else if i < j {
                            Some(s(n - 1, j - 1, d(n, i, x)))
                        } else if n >= 1 && i > j + 1 {
                            Some(s(n - 1, j, d(n, i - 1, x)))
                        } else {
                            None
                        };
                        if rhs.is_some_and(|r| r != lhs) {
                            return bad(format!("d_{i} s_{j} fails at level {n}"));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Restriction along the injection `[m] -> [n]` with image `keep`
    /// (increasing), by deleting the other vertices from the top down.
    pub fn restrict(&self, n: usize, keep: &[usize], x: usize) -> usize {
        let mut level = n;
        let mut y = x;
        for j in (0..=n).rev() {
            if !keep.contains(&j) {
                y = self.faces[level][j][y];
                level -= 1;
            }
        }
        y
    }

    pub fn is_reduced(&self) -> bool {
        self.sizes[0] == 1
    }
}

/// `ψ_n(x) = (γ^0* x, …, γ^{n-1}* x)` where `γ^k: [1] -> [n]` sends
/// `0 ↦ 0` and `1 ↦ k+1`.
pub fn bousfield_maps(x: &SimplicialSetData, n: usize) -> Result<Vec<Vec<usize>>> {
    if n < 1 || n > x.top() {
        return Err(Error::InvalidTable(format!("level {n} is outside 1..={}", x.top())));
    }
    Ok((0..x.sizes[n]).map(|s| (0..n).map(|k| x.restrict(n, &[0, k + 1], s)).collect()).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BousfieldReport {
    pub n: usize,
    pub domain: usize,
    pub codomain: usize,
    pub injective: bool,
    pub surjective: bool,
    pub bijective: bool,
    /// Two simplices with the same image, if any.
    pub collision: Option<(usize, usize)>,
}

pub fn check_bousfield(x: &SimplicialSetData, n: usize) -> Result<BousfieldReport> {
    let images = bousfield_maps(x, n)?;
    let codomain = x.sizes[1].pow(n as u32);
    let mut seen = std::collections::HashMap::new();
    let mut collision = None;
    for (s, img) in images.iter().enumerate() {
        if let Some(&t) = seen.get(img) {
            collision.get_or_insert((t, s));
        } else {
            seen.insert(img.clone(), s);
        }
    }
    let injective = collision.is_none();
    let surjective = seen.len() == codomain;
    Ok(BousfieldReport { n, domain: images.len(), codomain, injective, surjective, bijective: injective && surjective, collision })
}

/// A set with a binary bracket and a chosen element `e`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PointedMagma {
    pub bracket: Vec<Vec<usize>>,
    pub e: usize,
}

impl PointedMagma {
    pub fn new(bracket: Vec<Vec<usize>>, e: usize) -> Result<PointedMagma> {
        let n = bracket.len();
        if n == 0 || e >= n || bracket.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::InvalidTable("the bracket is not a total table over 0..n with e in range".into()));
        }
        Ok(PointedMagma { bracket, e })
    }

    pub fn from_json(s: &str) -> Result<PointedMagma> {
        let m: PointedMagma = serde_json::from_str(s)?;
        PointedMagma::new(m.bracket, m.e)
    }

    /// `[a, b] = a b⁻¹` with `e` the identity.
    pub fn from_group(g: &FiniteGroup) -> PointedMagma {
        let n = g.order();
        PointedMagma { bracket: (0..n).map(|a| (0..n).map(|b| g.mul(a, g.inv(b))).collect()).collect(), e: g.identity }
    }

    pub fn order(&self) -> usize {
        self.bracket.len()
    }

    pub fn br(&self, a: usize, b: usize) -> usize {
        self.bracket[a][b]
    }

    /// The first failing relation with its witness, in the order
    /// `[a,a] = e`, `[a,e] = a`, `[a,b] = [[a,c],[b,c]]`.
    pub fn first_failure(&self) -> Option<(String, Vec<usize>)> {
        let n = self.order();
        if let Some(a) = (0..n).find(|&a| self.br(a, a) != self.e) {
            return Some(("[a,a] = e".into(), vec![a]));
        }
        if let Some(a) = (0..n).find(|&a| self.br(a, self.e) != a) {
            return Some(("[a,e] = a".into(), vec![a]));
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.br(a, b) != self.br(self.br(a, c), self.br(b, c)) {
                        return Some(("[a,b] = [[a,c],[b,c]]".into(), vec![a, b, c]));
                    }
                }
            }
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HallReport {
    pub relations_hold: bool,
    pub failed_relation: Option<String>,
    pub witness: Vec<usize>,
    /// The group `a·b = [a,[e,b]]`, when the relations hold and it is one.
    pub group: Option<FiniteGroup>,
    pub group_error: Option<String>,
    /// `[a,b] = a·b⁻¹` in the extracted group.
    pub round_trip: bool,
}

pub fn hall_extract(m: &PointedMagma) -> HallReport {
    if let Some((rel, witness)) = m.first_failure() {
        return HallReport { relations_hold: false, failed_relation: Some(rel), witness, group: None, group_error: None, round_trip: false };
    }
    let n = m.order();
    let table: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| m.br(a, m.br(m.e, b))).collect()).collect();
    match FiniteGroup::new(table) {
        Ok(g) => {
            let round_trip = g.identity == m.e && (0..n).all(|a| (0..n).all(|b| m.br(a, b) == g.mul(a, g.inv(b))));
            HallReport { relations_hold: true, failed_relation: None, witness: Vec::new(), group: Some(g), group_error: None, round_trip }
        }
        Err(e) => HallReport {
            relations_hold: true,
            failed_relation: None,
            witness: Vec::new(),
            group: None,
            group_error: Some(e.to_string()),
            round_trip: false,
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HallSearchReport {
    pub order: usize,
    /// Pruned searches fix `[a,a] = e` and `[a,e] = a` up front.
    pub pruned: bool,
    pub tables_checked: u64,
    pub passing: usize,
    pub all_extract_to_groups: bool,
    pub all_round_trip: bool,
    /// Group structures on `0..order` found by a direct search.
    pub group_structures: usize,
    /// Every group structure appears as `[a,b] = ab⁻¹` among the passing tables.
    pub every_group_arises: bool,
    /// Isomorphism classes among the extracted groups.
    pub classes: Vec<String>,
    pub pass: bool,
}

fn tables_with(n: usize, fixed: &[Option<usize>]) -> impl ParallelIterator<Item = Vec<usize>> + '_ {
    let free: Vec<usize> = (0..n * n).filter(|&i| fixed[i].is_none()).collect();
    let total = (n as u64).pow(free.len() as u32);
    (0..total).into_par_iter().map(move |mut code| {
        let mut t: Vec<usize> = fixed.iter().map(|f| f.unwrap_or(0)).collect();
        for &i in &free {
            t[i] = (code % n as u64) as usize;
            code /= n as u64;
        }
        t
    })
}

fn rows(n: usize, flat: &[usize]) -> Vec<Vec<usize>> {
    flat.chunks(n).map(<[usize]>::to_vec).collect()
}

/// Group tables on `0..n` with identity `e`, by brute force.
fn group_structures(n: usize, e: usize) -> Vec<Vec<Vec<usize>>> {
    let mut fixed = vec![None; n * n];
    for a in 0..n {
        fixed[e * n + a] = Some(a);
        fixed[a * n + e] = Some(a);
    }
    tables_with(n, &fixed)
        .filter_map(|t| {
            let g = rows(n, &t);
            FiniteGroup::new(g.clone()).ok().map(|_| g)
        })
        .collect()
}

/// Enumerates bracket tables on `0..order` and every choice of `e`.
/// Exhaustive for `order ≤ 3`; order 4 fixes the entries determined by
/// `[a,a] = e` and `[a,e] = a` first.
pub fn hall_search(order: usize) -> Result<HallSearchReport> {
    if order == 0 || order > 4 {
        return Err(Error::InvalidTable(format!("hall search supports orders 1..=4, got {order}")));
    }
    let n = order;
    let pruned = n == 4;
    let mut passing: Vec<PointedMagma> = Vec::new();
    let mut tables_checked = 0u64;
    for e in 0..n {
        let mut fixed = vec![None; n * n];
        if pruned {
            for a in 0..n {
                fixed[a * n + a] = Some(e);
                fixed[a * n + e] = Some(a);
            }
        }
        let free = fixed.iter().filter(|f| f.is_none()).count();
        tables_checked += (n as u64).pow(free as u32);
        let mut found: Vec<PointedMagma> = tables_with(n, &fixed)
            .map(|t| PointedMagma { bracket: rows(n, &t), e })
            .filter(|m| m.first_failure().is_none())
            .collect();
        passing.append(&mut found);
    }
    let reports: Vec<HallReport> = passing.iter().map(hall_extract).collect();
    let all_extract_to_groups = reports.iter().all(|r| r.group.is_some());
    let all_round_trip = reports.iter().all(|r| r.round_trip);
    let mut structures = 0;
    let mut every_group_arises = true;
    for e in 0..n {
        for table in group_structures(n, e) {
            structures += 1;
            let m = PointedMagma::from_group(&FiniteGroup { table, identity: e });
            every_group_arises &= passing.contains(&m);
        }
    }
    let mut classes = Vec::new();
    for r in &reports {
        if let Some(g) = &r.group {
            let name = FiniteGroup::all_up_to_8()
                .into_iter()
                .find(|(_, h)| h.is_isomorphic(g))
                .map(|(name, _)| name)
                .unwrap_or_else(|| "?".into());
            if !classes.contains(&name) {
                classes.push(name);
            }
        }
    }
    let pass = all_extract_to_groups && all_round_trip && every_group_arises && passing.len() == structures;
    Ok(HallSearchReport {
        order,
        pruned,
        tables_checked,
        passing: passing.len(),
        all_extract_to_groups,
        all_round_trip,
        group_structures: structures,
        every_group_arises,
        classes,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nerves_are_simplicial() {
        for m in [FiniteMonoid::of_group(&FiniteGroup::symmetric(3)), FiniteMonoid::idempotent(), FiniteMonoid::point()] {
            let x = SimplicialSetData::nerve(&m, 3);
            x.validate().unwrap();
            assert!(x.is_reduced());
        }
    }

    #[test]
    fn bousfield_on_groups_and_monoids() {
        let x = SimplicialSetData::nerve(&FiniteMonoid::of_group(&FiniteGroup::cyclic(2)), 3);
        for n in [2, 3] {
            assert!(check_bousfield(&x, n).unwrap().bijective);
        }
        let y = SimplicialSetData::nerve(&FiniteMonoid::idempotent(), 3);
        let r = check_bousfield(&y, 2).unwrap();
        assert!(!r.bijective && r.collision.is_some());
        // (g_1, g_2) ↦ (g_1, g_1 g_2)
        let s3 = FiniteGroup::symmetric(3);
        let z = SimplicialSetData::nerve(&FiniteMonoid::of_group(&s3), 2);
        let psi = bousfield_maps(&z, 2).unwrap();
        for (code, img) in psi.iter().enumerate() {
            let (a, b) = (code % 6, code / 6);
            assert_eq!(img, &vec![a, s3.mul(a, b)]);
        }
    }

    #[test]
    fn hall_examples() {
        let z3 = PointedMagma { bracket: (0..3).map(|a| (0..3).map(|b| (a + 3 - b) % 3).collect()).collect(), e: 0 };
        let r = hall_extract(&z3);
        assert!(r.group.unwrap().is_isomorphic(&FiniteGroup::cyclic(3)));
        let left = PointedMagma { bracket: vec![vec![0, 0], vec![1, 1]], e: 0 };
        let r = hall_extract(&left);
        assert_eq!(r.failed_relation.as_deref(), Some("[a,a] = e"));
        assert_eq!(r.witness, vec![1]);
        assert!(hall_extract(&PointedMagma { bracket: vec![vec![0]], e: 0 }).group.is_some());
    }

    #[test]
    fn hall_search_small() {
        for (n, expected) in [(1, 1), (2, 2), (3, 3)] {
            let r = hall_search(n).unwrap();
            assert!(r.pass, "{r:?}");
            // group structures on n labelled points, over all identities
            assert_eq!(r.passing, expected);
        }
    }
}
