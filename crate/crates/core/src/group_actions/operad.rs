//! Actions of finite groups on arity-truncated operads, with no compatibility
//! with composition required.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::group::FiniteGroup;
use crate::error::{Error, Result};
use crate::free::{elements, GradedSet};
use crate::kan::QuotientSet;

/// The underlying sets `P(0), …, P(k)` of an operad, with element names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedOperad {
    pub names: Vec<Vec<String>>,
}

impl TruncatedOperad {
    pub fn sizes(&self) -> Vec<usize> {
        self.names.iter().map(Vec::len).collect()
    }

    pub fn arity_bound(&self) -> usize {
        self.names.len().saturating_sub(1)
    }

    /// `T_M(n)` for `n ≤ arity_bound`. Errors unless every level is finite
    /// within `max_vertices`.
    pub fn free(m: &GradedSet, arity_bound: usize, max_vertices: usize) -> Result<TruncatedOperad> {
        let mut names = Vec::new();
        for n in 0..=arity_bound {
            let e = elements(m, n, max_vertices);
            if !e.complete {
                return Err(Error::InvalidTerm(format!("T_M({n}) is not finite within {max_vertices} vertices")));
            }
            names.push(e.items.iter().map(|t| t.display(m).to_string()).collect());
        }
        Ok(TruncatedOperad { names })
    }
}

/// A failed axiom with the elements that witness it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: String,
    pub witness: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ActionReport {
    pub pass: bool,
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl ActionReport {
    pub(crate) fn from(checked: usize, violations: Vec<Violation>) -> ActionReport {
        ActionReport { pass: violations.is_empty(), checked, violations }
    }
}

/// `act[n][g][x] = g • x` for `x ∈ P(n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupActionOnOperad {
    pub group: FiniteGroup,
    pub sizes: Vec<usize>,
    pub act: Vec<Vec<Vec<usize>>>,
}

impl GroupActionOnOperad {
    pub fn trivial(group: &FiniteGroup, sizes: &[usize]) -> GroupActionOnOperad {
        let act = sizes.iter().map(|&s| vec![(0..s).collect(); group.order()]).collect();
        GroupActionOnOperad { group: group.clone(), sizes: sizes.to_vec(), act }
    }

    pub fn from_json(s: &str) -> Result<GroupActionOnOperad> {
        let a: GroupActionOnOperad = serde_json::from_str(s)?;
        let group = FiniteGroup::new(a.group.table.clone())?;
        Ok(GroupActionOnOperad { group, ..a })
    }

    /// Unit and associativity of the action at every arity; table shapes are
    /// checked first.
    pub fn validate(&self) -> ActionReport {
        let g = &self.group;
        let mut violations = Vec::new();
        let mut checked = 0;
        if self.act.len() != self.sizes.len() {
            violations.push(Violation { axiom: "shape".into(), witness: "one table per arity is required".into() });
            return ActionReport::from(0, violations);
        }
        for (n, (&size, table)) in self.sizes.iter().zip(&self.act).enumerate() {
            if table.len() != g.order() || table.iter().any(|row| row.len() != size || row.iter().any(|&y| y >= size)) {
                violations.push(Violation { axiom: "shape".into(), witness: format!("arity {n}") });
                continue;
            }
            for x in 0..size {
                checked += 1;
                if table[g.identity][x] != x {
                    violations.push(Violation { axiom: "unit".into(), witness: format!("arity {n}: e • {x} = {}", table[g.identity][x]) });
                }
                for a in 0..g.order() {
                    for b in 0..g.order() {
                        checked += 1;
                        if table[g.mul(a, b)][x] != table[a][table[b][x]] {
                            violations.push(Violation {
                                axiom: "associativity".into(),
                                witness: format!("arity {n}: (g, h, x) = ({a}, {b}, {x})"),
                            });
                        }
                    }
                }
            }
        }
        ActionReport::from(checked, violations)
    }

    pub fn fixed_points(&self, n: usize) -> usize {
        (0..self.sizes[n]).filter(|&x| (0..self.group.order()).all(|g| self.act[n][g][x] == x)).count()
    }
}

/// A finite `G`-set: `act[g][x]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GSet {
    pub act: Vec<Vec<usize>>,
}

impl GSet {
    pub fn regular(g: &FiniteGroup) -> GSet {
        GSet { act: (0..g.order()).map(|a| (0..g.order()).map(|x| g.mul(a, x)).collect()).collect() }
    }

    pub fn trivial(g: &FiniteGroup, size: usize) -> GSet {
        GSet { act: vec![(0..size).collect(); g.order()] }
    }

    pub fn size(&self) -> usize {
        self.act.first().map_or(0, Vec::len)
    }
}

const MAX_FUNCTIONS: usize = 1 << 20;

/// All functions `X^n -> X`, as value lists indexed by base-`|X|` tuples.
fn functions(x: usize, n: usize) -> Result<(usize, Vec<Vec<usize>>)> {
    let inputs = x.checked_pow(n as u32).ok_or_else(|| Error::InvalidTable("X^n is too large".into()))?;
    let count = x.checked_pow(inputs as u32).filter(|&c| c <= MAX_FUNCTIONS);
    let count = count.ok_or_else(|| Error::InvalidTable(format!("|X|^(|X|^{n}) exceeds {MAX_FUNCTIONS}")))?;
    let all = (0..count)
        .map(|mut k| {
            (0..inputs)
                .map(|_| {
                    let d = k % x;
                    k /= x;
                    d
                })
                .collect()
        })
        .collect();
    Ok((inputs, all))
}

/// The endomorphism operad `E_X(n) = X^(X^n)` with `(g • f)(x) = g • f(x)`.
pub fn endomorphism_action(g: &FiniteGroup, x: &GSet, arity_bound: usize) -> Result<GroupActionOnOperad> {
    let mut sizes = Vec::new();
    let mut act = Vec::new();
    for n in 0..=arity_bound {
        let (_, fs) = functions(x.size(), n)?;
        let index: BTreeMap<&Vec<usize>, usize> = fs.iter().enumerate().map(|(i, f)| (f, i)).collect();
        let table = (0..g.order())
            .map(|a| fs.iter().map(|f| index[&f.iter().map(|&v| x.act[a][v]).collect::<Vec<_>>()]).collect())
            .collect();
        sizes.push(fs.len());
        act.push(table);
    }
    Ok(GroupActionOnOperad { group: g.clone(), sizes, act })
}

/// The conjugation action `(g • f)(x) = g • f(g⁻¹ • x)` on `E_X(1)`, for
/// comparison with the postcomposition action.
pub fn conjugation_action_unary(g: &FiniteGroup, x: &GSet) -> Result<GroupActionOnOperad> {
    let (_, fs) = functions(x.size(), 1)?;
    let index: BTreeMap<&Vec<usize>, usize> = fs.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let table = (0..g.order())
        .map(|a| {
            let ai = g.inv(a);
            fs.iter()
                .map(|f| index[&(0..x.size()).map(|v| x.act[a][f[x.act[ai][v]]]).collect::<Vec<_>>()])
                .collect()
        })
        .collect();
    Ok(GroupActionOnOperad { group: g.clone(), sizes: vec![fs.len()], act: vec![table] })
}

/// `(e, P) ⨿ (G, ⋆) = (G, G × P)`: `G` acts on the left factor; `(g, x)` is
/// numbered `g · |P(n)| + x`.
pub fn goper_coproduct_special(p: &TruncatedOperad, g: &FiniteGroup) -> GroupActionOnOperad {
    let sizes: Vec<usize> = p.sizes().iter().map(|&s| g.order() * s).collect();
    let act = p
        .sizes()
        .iter()
        .map(|&s| (0..g.order()).map(|a| (0..g.order() * s).map(|i| g.mul(a, i / s.max(1)) * s + i % s.max(1)).collect()).collect())
        .collect();
    GroupActionOnOperad { group: g.clone(), sizes, act }
}

/// Classes of `H ×_G P(n)` under `(h φ(g), x) ~ (h, g • x)`, per arity.
pub fn balanced_product_classes(h: &FiniteGroup, phi: &[usize], a: &GroupActionOnOperad) -> Result<Vec<usize>> {
    let g = &a.group;
    if phi.len() != g.order() || phi.iter().any(|&y| y >= h.order()) {
        return Err(Error::InvalidTable("φ must map every element of G into H".into()));
    }
    for x in 0..g.order() {
        for y in 0..g.order() {
            if phi[g.mul(x, y)] != h.mul(phi[x], phi[y]) {
                return Err(Error::InvalidTable(format!("φ is not a homomorphism at ({x}, {y})")));
            }
        }
    }
    Ok(a.sizes
        .iter()
        .enumerate()
        .map(|(n, &s)| {
            let mut q = QuotientSet::new(&vec![s; h.order()]);
            for hh in 0..h.order() {
                for gg in 0..g.order() {
                    for x in 0..s {
                        let left = (h.mul(hh, phi[gg]), x);
                        let right = (hh, a.act[n][gg][x]);
                        q.relate(left, right).expect("indices in range");
                    }
                }
            }
            q.class_count()
        })
        .collect())
}

/// An object `(F_r, F_r × P_{n_0, …, n_k})` of the theory of operads with a
/// group action, recorded by the free group rank and the generator arities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GopObject {
    pub rank: usize,
    /// Sorted arities of the free operad generators.
    pub arities: Vec<usize>,
}

impl GopObject {
    pub fn new(rank: usize, mut arities: Vec<usize>) -> GopObject {
        arities.sort_unstable();
        GopObject { rank, arities }
    }

    /// `(e, ⋆)`, the empty coproduct.
    pub fn terminal() -> GopObject {
        GopObject::new(0, Vec::new())
    }

    /// `λ_{-1}(S) = (F_S, ⋆)`.
    pub fn lambda_group(s: usize) -> GopObject {
        GopObject::new(s, Vec::new())
    }

    /// `λ_n(S) = (e, P_{S,n})`: `|S|` free generators of arity `n`.
    pub fn lambda_arity(n: usize, s: usize) -> GopObject {
        GopObject::new(0, vec![n; s])
    }

    pub fn coproduct(parts: &[GopObject]) -> GopObject {
        GopObject::new(parts.iter().map(|p| p.rank).sum(), parts.iter().flat_map(|p| p.arities.iter().copied()).collect())
    }

    /// The image of `[n ↻ R]`: `(F_n, F_n × J(R))`.
    pub fn of_do_object(n: usize, valences: &[usize]) -> GopObject {
        GopObject::new(n, valences.to_vec())
    }

    pub fn describe(&self) -> String {
        let group = if self.rank == 0 { "e".to_string() } else { format!("F_{}", self.rank) };
        let operad = if self.arities.is_empty() {
            "⋆".to_string()
        } else {
            format!("P_{{{}}}", self.arities.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(","))
        };
        if self.rank == 0 || self.arities.is_empty() { format!("({group}, {operad})") } else { format!("({group}, {group} × {operad})") }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tx2(k: usize) -> TruncatedOperad {
        TruncatedOperad::free(&GradedSet::new([("x", 2)]), k, k.saturating_sub(1)).unwrap()
    }

    #[test]
    fn free_operad_sizes() {
        assert_eq!(tx2(3).sizes(), vec![0, 1, 2, 12]);
    }

    #[test]
    fn validation() {
        let z2 = FiniteGroup::cyclic(2);
        assert!(GroupActionOnOperad::trivial(&z2, &[0, 1, 2, 12]).validate().pass);
        let mut a = GroupActionOnOperad::trivial(&z2, &[0, 1, 2]);
        a.act[2][1] = vec![1, 0];
        assert!(a.validate().pass);
        let z3 = FiniteGroup::cyclic(3);
        let mut bad = GroupActionOnOperad::trivial(&z3, &[2]);
        bad.act[0][1] = vec![1, 0];
        let r = bad.validate();
        assert!(!r.pass);
        assert!(r.violations.iter().any(|v| v.axiom == "associativity"));
    }

    #[test]
    fn endomorphisms() {
        let z2 = FiniteGroup::cyclic(2);
        let x = GSet::regular(&z2);
        let e = endomorphism_action(&z2, &x, 2).unwrap();
        assert_eq!(e.sizes, vec![2, 4, 16]);
        assert!(e.validate().pass);
        assert_eq!(e.fixed_points(1), 0);
        let c = conjugation_action_unary(&z2, &x).unwrap();
        assert!(c.validate().pass);
        assert_eq!(c.fixed_points(0), 2);
        let triv = endomorphism_action(&FiniteGroup::trivial(), &GSet::trivial(&FiniteGroup::trivial(), 2), 1).unwrap();
        assert_eq!(triv.fixed_points(1), 4);
    }

    #[test]
    fn coproducts_and_balanced_products() {
        let p = tx2(3);
        for g in [FiniteGroup::cyclic(2), FiniteGroup::symmetric(3), FiniteGroup::trivial()] {
            let c = goper_coproduct_special(&p, &g);
            assert!(c.validate().pass);
            for (n, &s) in p.sizes().iter().enumerate() {
                assert_eq!(c.sizes[n], g.order() * s);
            }
            // G ×_G A ≅ A, and e ×_G (G × P) ≅ P
            let id: Vec<usize> = (0..g.order()).collect();
            assert_eq!(balanced_product_classes(&g, &id, &c).unwrap(), c.sizes);
            let collapse = vec![0; g.order()];
            assert_eq!(balanced_product_classes(&FiniteGroup::trivial(), &collapse, &c).unwrap(), p.sizes());
        }
    }

    #[test]
    fn theory_objects() {
        assert_eq!(GopObject::lambda_group(1).describe(), "(F_1, ⋆)");
        assert_eq!(GopObject::of_do_object(2, &[2, 3]).describe(), "(F_2, F_2 × P_{2,3})");
        assert_eq!(GopObject::lambda_arity(2, 2), GopObject::new(0, vec![2, 2]));
        assert_eq!(GopObject::coproduct(&[]), GopObject::terminal());
        assert_eq!(GopObject::coproduct(&[GopObject::lambda_group(1), GopObject::lambda_arity(2, 1)]), GopObject::new(1, vec![2]));
    }
}
