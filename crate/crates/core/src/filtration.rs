//! Primitive dendrices of `nerve(T_M)`, the spread-apart factorization and
//! the filtration `Ψ^0 ⊆ Ψ^1 ⊆ …` by number of vertices.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::colored::{replan, restrict_dendrex, Dendrex, FreeOperad};
use crate::error::{Error, Result};
use crate::free::{GradedSet, Term};
use crate::omega::{invert_map, Factorization, OmegaMorphism, StepKind};
use crate::presheaf::{external_boundary, Nerve, Presheaf, Shared, SubPresheaf};
use crate::skeleton::Skeleton;
use crate::tree::{permutations, PlanarStructure, Split, Tree};

/// A dendrex whose vertex labels are single generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimitiveDendrex {
    pub tree: Tree,
    pub labels: Vec<Term>,
    pub planar: PlanarStructure,
}

/// Primitives on one tree.
#[derive(Clone, Debug)]
pub struct Primitives {
    /// Maps `V(S) -> M` respecting valences.
    pub labelings: usize,
    /// Dendrices with every label a generator up to a permutation of inputs.
    pub elements: Vec<Dendrex<Term>>,
    /// Orbits under `Aut(S)`, as sorted indices into `elements`; each orbit is
    /// listed under its least element.
    pub orbits: Vec<Vec<usize>>,
    pub automorphisms: usize,
}

impl Primitives {
    /// Whether `Aut(S)` acts freely.
    pub fn is_free(&self) -> bool {
        self.orbits.len() * self.automorphisms == self.elements.len()
    }
}

fn operad_for(m: &GradedSet) -> FreeOperad {
    FreeOperad::new(m, 0, 0)
}

pub fn primitives(s: &Tree, m: &GradedSet) -> Primitives {
    let choices: Vec<Vec<Term>> = s
        .vertices()
        .iter()
        .map(|v| {
            let k = v.valence();
            m.gens
                .iter()
                .enumerate()
                .filter(|(_, g)| g.valence == k)
                .flat_map(|(i, _)| {
                    let bare = Term::generator(i, k);
                    permutations(k).into_iter().map(move |p| bare.act(&p).expect("permutation"))
                })
                .collect()
        })
        .collect();
    let labelings = s
        .vertices()
        .iter()
        .map(|v| m.gens.iter().filter(|g| g.valence == v.valence()).count())
        .product();
    let mut elements = vec![Vec::new()];
    for c in &choices {
        elements = elements
            .into_iter()
            .flat_map(|prefix: Vec<Term>| {
                c.iter().map(move |t| {
                    let mut p = prefix.clone();
                    p.push(t.clone());
                    p
                })
            })
            .collect();
    }
    let mut elements: Vec<Dendrex<Term>> =
        elements.into_iter().map(|ops| Dendrex { colors: vec![0; s.edge_count()], ops }).collect();
    elements.sort();
    let op = operad_for(m);
    let auts = s.automorphisms();
    let mut seen = vec![false; elements.len()];
    let mut orbits = Vec::new();
    for i in 0..elements.len() {
        if seen[i] {
            continue;
        }
        let mut orbit: BTreeSet<usize> = BTreeSet::new();
        for a in &auts {
            let y = restrict_dendrex(&op, s, s, a, &elements[i]).expect("automorphisms act");
            let j = elements.binary_search(&y).expect("primitives are closed under automorphisms");
            seen[j] = true;
            orbit.insert(j);
        }
        orbits.push(orbit.into_iter().collect());
    }
    Primitives { labelings, elements, orbits, automorphisms: auts.len() }
}

/// A chain `S -> … -> R` of cofaces, codegeneracies and a replanning
/// isomorphism, and a primitive on `R` restricting to the input along it.
#[derive(Clone, Debug)]
pub struct SpreadApart {
    pub chain: Factorization,
    pub terminal: PrimitiveDendrex,
}

impl SpreadApart {
    /// The edge map of the composite `S -> R`.
    pub fn composite_map(&self, source: &Tree) -> Vec<usize> {
        match self.chain.composite() {
            Some(m) => m.edge_map,
            None => (0..source.edge_count()).collect(),
        }
    }
}

/// Relabels a dendrex onto a tree whose vertices carry the same names.
fn by_name(old: &Tree, new: &Tree, labels: &[Term], extra: &[(String, Term)]) -> Vec<Term> {
    new.vertices()
        .iter()
        .map(|v| {
            extra
                .iter()
                .find(|(n, _)| *n == v.name)
                .map(|(_, t)| t.clone())
                .or_else(|| old.vertices().iter().position(|w| w.name == v.name).map(|i| labels[i].clone()))
                .expect("every vertex is labelled")
        })
        .collect()
}

fn relabel(t: &Term, f: &dyn Fn(usize) -> usize) -> Term {
    match t {
        Term::Leaf(l) => Term::Leaf(f(*l)),
        Term::Node { gen, args } => Term::Node { gen: *gen, args: args.iter().map(|a| relabel(a, f)).collect() },
    }
}

/// One inner coface taking `t = f ∘ g` at vertex `v` apart, where `g` is the
/// first non-trivial argument of the root generator of `t`.
fn split_label(w: &Tree, v: usize, t: &Term) -> Option<(Split, Term, Term)> {
    let Term::Node { gen, args } = t else { return None };
    let i = args.iter().position(|a| !a.is_identity())?;
    let mut upper = args[i].leaf_labels();
    upper.sort_unstable();
    let k = w.valence(v);
    let lower: Vec<usize> = (0..k).filter(|p| !upper.contains(p)).collect();
    let position = upper.first().map_or(0, |&u| lower.iter().filter(|&&p| p < u).count());
    let g = relabel(&args[i], &|l| upper.iter().position(|&u| u == l).expect("upper leaf"));
    // lower vertex inputs: `lower` with the new edge at `position`
    let lower_pos = |l: usize| {
        let j = lower.iter().position(|&p| p == l).expect("lower leaf");
        if j < position { j } else { j + 1 }
    };
    let new_args: Vec<Term> =
        args.iter().enumerate().map(|(j, a)| if j == i { Term::Leaf(position) } else { relabel(a, &lower_pos) }).collect();
    let f = Term::Node { gen: *gen, args: new_args };
    Some((Split { upper, position }, f, g))
}

/// Factors a dendrex of `nerve(T_M)` on `s` through a primitive.
pub fn spread_apart(s: &Tree, beta: &Dendrex<Term>, m: &GradedSet) -> Result<SpreadApart> {
    let op = operad_for(m);
    let mut steps = Vec::new();
    let mut w = Arc::new(s.clone());
    let mut labels = beta.ops.clone();
    let push = |steps: &mut Vec<(StepKind, OmegaMorphism)>, kind, from: &Arc<Tree>, to: &Arc<Tree>, map: Vec<usize>| {
        steps.push((kind, OmegaMorphism { source: from.clone(), target: to.clone(), edge_map: map }));
    };
    // cofaces: each strictly lowers the largest label
    while let Some(v) = labels.iter().position(|t| t.vertex_count() >= 2) {
        let (split, f, g) = split_label(&w, v, &labels[v]).ok_or(Error::InvalidTerm("label does not split".into()))?;
        let (next, e, map) = w.inner_coface(v, &split)?;
        let next = Arc::new(next);
        let lo = next.vertex(next.consumer(e).expect("inner edge").0).name.clone();
        let hi = next.vertex(next.producer(e).expect("inner edge")).name.clone();
        labels = by_name(&w, &next, &labels, &[(lo, f), (hi, g)]);
        push(&mut steps, StepKind::InnerFace, &w, &next, map);
        w = next;
    }
    // codegeneracies: each removes a vertex labelled by the unit
    while let Some(v) = labels.iter().position(Term::is_identity) {
        let (next, map) = w.codegeneracy(v)?;
        let next = Arc::new(next);
        labels = by_name(&w, &next, &labels, &[]);
        push(&mut steps, StepKind::Degeneracy, &w, &next, map);
        w = next;
    }
    let current = Dendrex { colors: vec![0; w.edge_count()], ops: labels };
    let (planar, replanned, terminal) = replan(&w, &current)?;
    let replanned = Arc::new(replanned);
    if planar.orders.iter().zip(w.vertices()).any(|(o, v)| *o != v.inputs) {
        push(&mut steps, StepKind::Isomorphism, &w, &replanned, (0..w.edge_count()).collect());
    }
    let result = SpreadApart {
        chain: Factorization { steps },
        terminal: PrimitiveDendrex { tree: (*replanned).clone(), labels: terminal.ops, planar },
    };
    // recovery
    let map = result.composite_map(s);
    let t = &result.terminal;
    let back = restrict_dendrex(&op, s, &t.tree, &map, &Dendrex { colors: vec![0; t.tree.edge_count()], ops: t.labels.clone() });
    if back.as_ref() != Some(beta) {
        return Err(Error::NotAMorphism("the chain does not recover the dendrex".into()));
    }
    Ok(result)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimitiveRow {
    pub tree: String,
    pub labelings: usize,
    pub primitives: usize,
    pub orbits: usize,
    pub automorphisms: usize,
    pub free: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PushoutRow {
    pub n: usize,
    pub tree: String,
    pub psi: usize,
    pub previous: usize,
    pub attached: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiltrationReport {
    pub bound: usize,
    pub max_valence: usize,
    pub trees: Vec<String>,
    pub nerve_sizes: Vec<usize>,
    /// `per_level_sizes[n][t] = |Ψ^n_t|`.
    pub per_level_sizes: Vec<Vec<usize>>,
    pub primitives: Vec<PrimitiveRow>,
    pub exhaustive: bool,
    pub subtree_property: bool,
    pub monotone: bool,
    pub pushout_counts_match: bool,
    /// The attaching map is a bijection onto `Ψ^n ∖ Ψ^{n−1}` at every level.
    pub pushout_bijective: bool,
    pub pushout: Vec<PushoutRow>,
    pub stabilized: bool,
    pub truncated: bool,
    pub witnesses: Vec<String>,
}

impl FiltrationReport {
    pub fn pass(&self) -> bool {
        self.exhaustive && self.subtree_property && self.monotone && self.pushout_counts_match && self.pushout_bijective
    }
}

/// The skeleton used for a filtration run: trees with at most `bound`
/// vertices, and valence at most `max_valence`, by default the largest
/// generator valence (at least 2).
pub fn filtration_skeleton(m: &GradedSet, bound: usize, max_valence: Option<usize>) -> Skeleton {
    Skeleton::new(bound, max_valence.unwrap_or(m.max_valence().max(2)))
}

/// Primitives of every skeleton tree, as nerve indices.
fn skeleton_primitives(sk: &Skeleton, nerve: &Nerve<FreeOperad>, m: &GradedSet) -> Vec<(Primitives, Vec<usize>)> {
    (0..sk.len())
        .into_par_iter()
        .map(|t| {
            let p = primitives(sk.tree(t), m);
            let idx = p.elements.iter().filter_map(|d| nerve.find(t, d)).collect();
            (p, idx)
        })
        .collect()
}

/// `Ψ^n`: generated by the primitives on trees with at most `n` vertices,
/// together with the basepoint.
pub fn psi(sk: &Arc<Skeleton>, m: &GradedSet, n: usize) -> SubPresheaf {
    let nerve = Arc::new(Nerve::free(sk, m, Some(sk.max_vertices())));
    let prims = skeleton_primitives(sk, &nerve, m);
    psi_from(sk, &nerve, &prims, n)
}

fn psi_from(sk: &Arc<Skeleton>, nerve: &Arc<Nerve<FreeOperad>>, prims: &[(Primitives, Vec<usize>)], n: usize) -> SubPresheaf {
    let eta = sk.eta();
    let mut gens: Vec<(usize, usize)> = (0..nerve.len(eta)).map(|x| (eta, x)).collect();
    for (t, (_, idx)) in prims.iter().enumerate() {
        if sk.vertex_count(t) <= n {
            gens.extend(idx.iter().map(|&x| (t, x)));
        }
    }
    let shared: Shared = nerve.clone();
    SubPresheaf::generated(shared, &gens)
}

pub fn verify_filtration(m: &GradedSet, bound: usize, max_valence: Option<usize>) -> FiltrationReport {
    verify_filtration_on(&Arc::new(filtration_skeleton(m, bound, max_valence)), m)
}

/// Checks exhaustiveness, the subtree property and the pushout counts on the
/// given skeleton, with dendrices limited to `max_vertices` label vertices.
pub fn verify_filtration_on(sk: &Arc<Skeleton>, m: &GradedSet) -> FiltrationReport {
    let bound = sk.max_vertices();
    let nerve = Arc::new(Nerve::free(sk, m, Some(bound)));
    let prims = skeleton_primitives(sk, &nerve, m);
    let psis: Vec<SubPresheaf> = (0..=bound).map(|n| psi_from(sk, &nerve, &prims, n)).collect();
    let mut witnesses = Vec::new();
    let mut truncated = nerve.truncated();

    let primitive_rows: Vec<PrimitiveRow> = prims
        .iter()
        .enumerate()
        .map(|(t, (p, idx))| PrimitiveRow {
            tree: sk.code(t).0.clone(),
            labelings: p.labelings,
            primitives: idx.len(),
            orbits: p.orbits.len(),
            automorphisms: p.automorphisms,
            free: p.is_free(),
        })
        .collect();
    for (t, (p, idx)) in prims.iter().enumerate() {
        if idx.len() != p.elements.len() {
            truncated = true;
            witnesses.push(format!("primitives on {} fall outside the nerve", sk.code(t)));
        }
    }

    // exhaustiveness through spread_apart
    let failures: Vec<String> = (0..sk.len())
        .into_par_iter()
        .flat_map_iter(|s| (0..nerve.len(s)).map(move |x| (s, x)))
        .filter_map(|(s, x)| exhaustive_at(sk, &nerve, &psis, m, s, x).err().map(|e| format!("{} #{x}: {e}", sk.code(s))))
        .collect();
    let exhaustive = failures.is_empty();
    witnesses.extend(failures.into_iter().take(5));

    // subtree property
    let mut subtree_property = true;
    'sub: for (t, (_, idx)) in prims.iter().enumerate() {
        let n = sk.vertex_count(t);
        if n == 0 {
            continue;
        }
        for (sub, emb) in sk.tree(t).subtrees() {
            if sub.vertex_count() >= n {
                continue;
            }
            let Some((r, iso)) = sk.locate(&sub) else { continue };
            let map: Vec<usize> = iso.iter().map(|&e| emb[e]).collect();
            let f = sk.hom_index(r, t, &map).expect("subtree inclusion");
            for &x in idx {
                if !psis[n - 1].contains(r, nerve.restrict(r, t, f, x)) {
                    subtree_property = false;
                    witnesses.push(format!("a face of a primitive on {} is not in Ψ^{}", sk.code(t), n - 1));
                    break 'sub;
                }
            }
        }
    }

    let monotone = psis.windows(2).all(|w| w[0].is_subset_of(&w[1]));

    // pushout: Ψ^n is Ψ^{n-1} with one Ω[T]_* attached per orbit along ∂ext
    let mut pushout = Vec::new();
    let mut pushout_counts_match = true;
    let mut pushout_bijective = true;
    let boundaries: Vec<Option<(Arc<crate::presheaf::Reduced>, SubPresheaf)>> =
        (0..sk.len()).map(|t| external_boundary(sk, t).ok()).collect();
    for n in 1..=bound {
        for s in 0..sk.len() {
            let mut attached = 0;
            let mut images: HashSet<usize> = HashSet::new();
            let mut distinct = true;
            for (t, (p, idx)) in prims.iter().enumerate() {
                if sk.vertex_count(t) != n {
                    continue;
                }
                let Some((red, dext)) = &boundaries[t] else { continue };
                for orbit in &p.orbits {
                    let Some(&alpha) = idx.get(orbit[0]) else { continue };
                    for a in 0..red.len(s) {
                        if dext.contains(s, a) {
                            continue;
                        }
                        attached += 1;
                        let f = red.representative(s, a).expect("basepoint lies in the boundary");
                        distinct &= images.insert(nerve.restrict(s, t, f, alpha));
                    }
                }
            }
            let (now, before) = (psis[n].len(s), psis[n - 1].len(s));
            if now != before + attached {
                pushout_counts_match = false;
                witnesses.push(format!("n = {n} at {}: {now} against {before} + {attached}", sk.code(s)));
            }
            let new: HashSet<usize> = psis[n].members(s).iter().copied().filter(|&x| !psis[n - 1].contains(s, x)).collect();
            if !distinct || images != new {
                pushout_bijective = false;
            }
            pushout.push(PushoutRow { n, tree: sk.code(s).0.clone(), psi: now, previous: before, attached });
        }
    }

    let stabilized = (0..sk.len()).all(|t| psis[bound].len(t) == nerve.len(t));
    FiltrationReport {
        bound,
        max_valence: sk.max_valence(),
        trees: (0..sk.len()).map(|t| sk.code(t).0.clone()).collect(),
        nerve_sizes: (0..sk.len()).map(|t| nerve.len(t)).collect(),
        per_level_sizes: psis.iter().map(|p| (0..sk.len()).map(|t| p.len(t)).collect()).collect(),
        primitives: primitive_rows,
        exhaustive,
        subtree_property,
        monotone,
        pushout_counts_match,
        pushout_bijective,
        pushout,
        stabilized,
        truncated,
        witnesses,
    }
}

/// Runs spread_apart on one dendrex and checks it lands in `Ψ^{|R|}` through
/// a skeleton morphism.
fn exhaustive_at(
    sk: &Skeleton,
    nerve: &Nerve<FreeOperad>,
    psis: &[SubPresheaf],
    m: &GradedSet,
    s: usize,
    x: usize,
) -> std::result::Result<(), String> {
    let st = sk.tree(s);
    let beta = &nerve.level(s)[x];
    let sa = spread_apart(st, beta, m).map_err(|e| e.to_string())?;
    let r_tree = &sa.terminal.tree;
    let (r, iso) = sk.locate(r_tree).ok_or("terminal tree outside the skeleton")?;
    let op = operad_for(m);
    let terminal = Dendrex { colors: vec![0; r_tree.edge_count()], ops: sa.terminal.labels.clone() };
    let on_canonical = restrict_dendrex(&op, sk.tree(r), r_tree, &iso, &terminal).ok_or("transport failed")?;
    let g = nerve.find(r, &on_canonical).ok_or("primitive outside the nerve")?;
    let inv = invert_map(&iso).ok_or("not an isomorphism")?;
    let gamma: Vec<usize> = sa.composite_map(st).iter().map(|&e| inv[e]).collect();
    let f = sk.hom_index(s, r, &gamma).ok_or("composite is not a skeleton morphism")?;
    if nerve.restrict(s, r, f, g) != x {
        return Err("restriction does not recover the dendrex".into());
    }
    let n = sk.vertex_count(r);
    if !psis.get(n).is_some_and(|p| p.contains(s, x)) {
        return Err(format!("not in Ψ^{n}"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x2() -> GradedSet {
        GradedSet::new([("x", 2)])
    }

    #[test]
    fn primitive_counts() {
        let xy = GradedSet::new([("x", 2), ("y", 2)]);
        let s22 = Tree::with_valences(&[2, 2]).unwrap();
        assert_eq!(primitives(&s22, &xy).labelings, 4);
        let c2 = primitives(&Tree::corolla(2), &x2());
        assert_eq!((c2.labelings, c2.orbits.len(), c2.elements.len()), (1, 1, 2));
        let sym = Tree::from_code("((||)(||))").unwrap();
        let p = primitives(&sym, &x2());
        assert_eq!((p.labelings, p.orbits.len(), p.automorphisms), (1, 1, 8));
        assert!(p.is_free());
    }

    #[test]
    fn spread_apart_examples() {
        let m = x2();
        let x = Term::generator(0, 2);
        let c2 = Tree::corolla(2);
        let d = Dendrex { colors: vec![0; 3], ops: vec![x.clone()] };
        assert!(spread_apart(&c2, &d, &m).unwrap().chain.steps.is_empty());

        let c3 = Tree::corolla(3);
        let t = x.gamma(&[x.clone(), Term::identity()]).unwrap();
        let d = Dendrex { colors: vec![0; 4], ops: vec![t] };
        let sa = spread_apart(&c3, &d, &m).unwrap();
        assert_eq!(sa.chain.steps.len(), 1);
        assert_eq!(sa.chain.steps[0].0, StepKind::InnerFace);
        assert_eq!(sa.terminal.labels, vec![x.clone(), x.clone()]);

        let l1 = Tree::linear(1);
        let d = Dendrex { colors: vec![0; 2], ops: vec![Term::identity()] };
        let sa = spread_apart(&l1, &d, &m).unwrap();
        assert_eq!(sa.chain.steps.len(), 1);
        assert_eq!(sa.terminal.tree.vertex_count(), 0);
    }

    #[test]
    fn spread_apart_permuted_labels() {
        let m = x2();
        let x = Term::generator(0, 2);
        let c3 = Tree::corolla(3);
        let t = x.gamma(&[Term::identity(), x.clone()]).unwrap();
        for p in permutations(3) {
            let d = Dendrex { colors: vec![0; 4], ops: vec![t.act(&p).unwrap()] };
            let sa = spread_apart(&c3, &d, &m).unwrap();
            assert_eq!(sa.terminal.tree.vertex_count(), 2);
        }
    }

    #[test]
    fn filtration_small() {
        let r = verify_filtration(&x2(), 2, Some(3));
        assert!(r.pass(), "{:?}", r.witnesses);
        assert!(r.stabilized);
        let r = verify_filtration(&GradedSet::empty(), 2, None);
        assert!(r.pass(), "{:?}", r.witnesses);
        assert!(r.per_level_sizes.windows(2).all(|w| w[0] == w[1]));
    }
}
