//! Left Kan extensions along `J`, computed as colimits over comma categories.
//!
//! Objects of the comma category are pairs `(R, g)` with `g: T_N -> J(R)`; a
//! morphism `(R, g) -> (R', g')` is a tree map `b` with `J(b) ∘ g = g'`. The
//! colimit of a presheaf `F` over it is the disjoint union of the `F(R)`,
//! one copy per object, modulo `(g', x') ~ (g, b* x')`.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::colored::{i_inverse, i_map};
use crate::error::{Error, Result};
use crate::free::{hom_free, hom_free_with, j_map, ElementTable, FreeMap, GradedSet, Term};
use crate::omega::OmegaMorphism;
use crate::presheaf::{segal_core, Nerve, Presheaf, Reduced, Representable, Shared};
use crate::skeleton::Skeleton;
use crate::tree::Tree;

/// A partition of a disjoint union of finite sets, built by merging pairs.
#[derive(Clone, Debug)]
pub struct QuotientSet {
    offsets: Vec<usize>,
    parent: Vec<usize>,
    rank: Vec<u8>,
    classes: usize,
}

impl QuotientSet {
    pub fn new(component_sizes: &[usize]) -> QuotientSet {
        let mut offsets = Vec::with_capacity(component_sizes.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for &n in component_sizes {
            acc += n;
            offsets.push(acc);
        }
        QuotientSet { offsets, parent: (0..acc).collect(), rank: vec![0; acc], classes: acc }
    }

    pub fn carrier_len(&self) -> usize {
        self.parent.len()
    }

    pub fn flat(&self, component: usize, x: usize) -> Result<usize> {
        let lo = *self.offsets.get(component).ok_or_else(|| Error::Dangling(format!("component {component}")))?;
        let hi = self.offsets[component + 1];
        if lo + x >= hi {
            return Err(Error::Dangling(format!("element {x} of component {component}")));
        }
        Ok(lo + x)
    }

    pub fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        let (a, b) = if self.rank[a] < self.rank[b] { (b, a) } else { (a, b) };
        self.parent[b] = a;
        if self.rank[a] == self.rank[b] {
            self.rank[a] += 1;
        }
        self.classes -= 1;
        true
    }

    pub fn relate(&mut self, a: (usize, usize), b: (usize, usize)) -> Result<()> {
        let (a, b) = (self.flat(a.0, a.1)?, self.flat(b.0, b.1)?);
        self.union(a, b);
        Ok(())
    }

    pub fn class_count(&self) -> usize {
        self.classes
    }

    /// Class labels `0..class_count()` for every carrier element, numbered in
    /// order of first appearance.
    pub fn labels(&mut self) -> Vec<usize> {
        let mut ids = HashMap::new();
        (0..self.parent.len())
            .map(|i| {
                let r = self.find(i);
                let n = ids.len();
                *ids.entry(r).or_insert(n)
            })
            .collect()
    }
}

/// The colimit `(∐ F(c)) / ~` of a family of finite sets.
pub fn colim_quotient(component_sizes: &[usize], relations: &[((usize, usize), (usize, usize))]) -> Result<QuotientSet> {
    let mut q = QuotientSet::new(component_sizes);
    for &(a, b) in relations {
        q.relate(a, b)?;
    }
    Ok(q)
}

/// Objects `(R, g: T_N -> J(R))` of the comma category, for skeleton trees.
#[derive(Clone, Debug)]
pub struct CommaObjects {
    pub maps: Vec<Vec<FreeMap>>,
    index: Vec<HashMap<FreeMap, usize>>,
    /// `(tree, map)` for each object, in a flat numbering.
    pub flat: Vec<(usize, usize)>,
    /// Whether every `Hom(T_N, J(R))` was enumerated completely.
    pub complete: bool,
}

impl CommaObjects {
    pub fn find(&self, r: usize, g: &FreeMap) -> Option<usize> {
        self.index[r].get(g).copied()
    }

    pub fn len(&self) -> usize {
        self.flat.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }
}

pub fn comma_objects(n: &GradedSet, sk: &Skeleton, elt_bound: usize) -> CommaObjects {
    let per_tree: Vec<(Vec<FreeMap>, bool)> = sk
        .trees()
        .par_iter()
        .map(|t| {
            let h = hom_free(n, &GradedSet::of_tree(t), elt_bound);
            (h.items, h.complete)
        })
        .collect();
    let complete = per_tree.iter().all(|(_, c)| *c);
    let maps: Vec<Vec<FreeMap>> = per_tree.into_iter().map(|(m, _)| m).collect();
    let index = maps.iter().map(|m| m.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect()).collect();
    let flat = maps.iter().enumerate().flat_map(|(r, m)| (0..m.len()).map(move |i| (r, i))).collect();
    CommaObjects { maps, index, flat, complete }
}

fn omega(sk: &Skeleton, r: usize, s: usize, f: usize) -> OmegaMorphism {
    OmegaMorphism { source: sk.tree(r).clone(), target: sk.tree(s).clone(), edge_map: sk.hom(r, s)[f].clone() }
}

/// `J` of every skeleton morphism out of each tree: `[r][s][f]`.
fn j_table(sk: &Skeleton) -> Vec<Vec<Vec<FreeMap>>> {
    (0..sk.len())
        .into_par_iter()
        .map(|r| (0..sk.len()).map(|s| (0..sk.hom(r, s).len()).map(|f| j_map(&omega(sk, r, s, f))).collect()).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KanReport {
    pub proposition: String,
    pub comma_objects: usize,
    pub carrier: usize,
    pub relations: usize,
    /// Comma morphisms whose target lies beyond the element bound.
    pub dropped_relations: usize,
    pub classes: usize,
    pub hom_count: usize,
    /// `Υ̃` is constant on every generating relation.
    pub descends: bool,
    pub injective: bool,
    pub surjective: bool,
    pub bijective: bool,
    pub truncated: bool,
    pub witnesses: Vec<String>,
}

struct Colimit {
    quotient: QuotientSet,
    values: Vec<Option<FreeMap>>,
    relations: usize,
    dropped: usize,
    descends: bool,
    witnesses: Vec<String>,
}

/// Builds the colimit of a presheaf `x` over the comma category and evaluates
/// `upsilon` on every carrier element.
fn colimit(
    sk: &Skeleton,
    objects: &CommaObjects,
    jt: &[Vec<Vec<FreeMap>>],
    x: &dyn Presheaf,
    upsilon: &(dyn Fn(usize, &FreeMap, usize) -> Option<FreeMap> + Sync),
) -> Colimit {
    let sizes: Vec<usize> = objects.flat.iter().map(|&(r, _)| x.len(r)).collect();
    let mut quotient = QuotientSet::new(&sizes);
    let offsets = &quotient.offsets;
    let values: Vec<Option<FreeMap>> = objects
        .flat
        .par_iter()
        .flat_map_iter(|&(r, gi)| {
            let g = &objects.maps[r][gi];
            (0..x.len(r)).map(move |e| upsilon(r, g, e))
        })
        .collect();
    // generating relations, one batch per source object
    let batches: Vec<(Vec<(usize, usize)>, usize)> = (0..objects.len())
        .into_par_iter()
        .map(|c| {
            let (r, gi) = objects.flat[c];
            let g = &objects.maps[r][gi];
            let mut pairs = Vec::new();
            let mut dropped = 0;
            for r2 in 0..sk.len() {
                for b in 0..sk.hom(r, r2).len() {
                    let g2 = jt[r][r2][b].after(g).expect("composable");
                    let Some(gi2) = objects.find(r2, &g2) else {
                        dropped += 1;
                        continue;
                    };
                    let c2 = objects.flat.binary_search(&(r2, gi2)).expect("object listed");
                    for e2 in 0..x.len(r2) {
                        pairs.push((offsets[c2] + e2, offsets[c] + x.restrict(r, r2, b, e2)));
                    }
                }
            }
            (pairs, dropped)
        })
        .collect();
    let mut relations = 0;
    let mut dropped = 0;
    let mut descends = true;
    let mut witnesses = Vec::new();
    for (pairs, d) in batches {
        dropped += d;
        relations += pairs.len();
        for (a, b) in pairs {
            if values[a] != values[b] {
                if descends {
                    witnesses.push(format!("relation between carrier elements {a} and {b} changes the value"));
                }
                descends = false;
            }
            quotient.union(a, b);
        }
    }
    Colimit { quotient, values, relations, dropped, descends, witnesses }
}

/// Compares the classes of a colimit with a target hom-set through the values.
fn judge(
    name: &str,
    objects: &CommaObjects,
    mut col: Colimit,
    hom: &[FreeMap],
    hom_complete: bool,
    base_truncated: bool,
    surjective_witness: &dyn Fn(&FreeMap) -> Option<usize>,
) -> KanReport {
    let labels = col.quotient.labels();
    let classes = col.quotient.class_count();
    let mut class_value: Vec<Option<&FreeMap>> = vec![None; classes];
    for (i, &l) in labels.iter().enumerate() {
        if class_value[l].is_none() {
            class_value[l] = col.values[i].as_ref();
        }
    }
    let hom_index: HashMap<&FreeMap, usize> = hom.iter().enumerate().map(|(i, h)| (h, i)).collect();
    let mut by_value: HashMap<&FreeMap, usize> = HashMap::new();
    let mut injective = true;
    let mut witnesses = std::mem::take(&mut col.witnesses);
    for (cls, v) in class_value.iter().enumerate() {
        match v {
            None => {
                injective = false;
                witnesses.push(format!("class {cls} has no value"));
            }
            Some(v) => {
                if !hom_index.contains_key(v) {
                    witnesses.push(format!("class {cls} maps outside the enumerated hom-set"));
                    injective = false;
                }
                if let Some(prev) = by_value.insert(v, cls) {
                    injective = false;
                    witnesses.push(format!("classes {prev} and {cls} have the same value"));
                }
            }
        }
    }
    let mut surjective = true;
    for h in hom {
        match surjective_witness(h) {
            Some(i) if col.values[i].as_ref() == Some(h) => {}
            _ => {
                surjective = false;
                witnesses.push("a map has no preimage of the expected form".to_string());
                break;
            }
        }
    }
    let bijective = col.descends && injective && surjective && classes == hom.len();
    KanReport {
        proposition: name.to_string(),
        comma_objects: objects.len(),
        carrier: col.quotient.carrier_len(),
        relations: col.relations,
        dropped_relations: col.dropped,
        classes,
        hom_count: hom.len(),
        descends: col.descends,
        injective,
        surjective,
        bijective,
        truncated: base_truncated || !hom_complete,
        witnesses,
    }
}

/// Whether the comma category needs trees beyond any bound. Objects `(R, g)`
/// cut off by the element bound do not matter: each element over them is
/// related to `(S, h, id)`, which is present whenever `h` is.
fn unbounded(n: &GradedSet) -> bool {
    n.gens.iter().any(|g| g.valence <= 1)
}

fn carrier_index(objects: &CommaObjects, x: &dyn Presheaf, r: usize, g: &FreeMap, e: usize) -> Option<usize> {
    let gi = objects.find(r, g)?;
    let c = objects.flat.binary_search(&(r, gi)).ok()?;
    let before: usize = objects.flat[..c].iter().map(|&(t, _)| x.len(t)).sum();
    Some(before + e)
}

/// The left Kan extension of `Ω[S]_*` along `J`, evaluated at `T_N`, against
/// `Hom(T_N, J(S))`.
pub fn verify_lke(sk: &Arc<Skeleton>, s: usize, n: &GradedSet, elt_bound: usize) -> KanReport {
    let objects = comma_objects(n, sk, elt_bound);
    let jt = j_table(sk);
    let rep: Shared = Arc::new(Representable::new(sk, s));
    let red = Reduced::new(rep);
    let units = FreeMap { images: vec![Term::identity(); n.len()] };
    let upsilon = |r: usize, g: &FreeMap, e: usize| -> Option<FreeMap> {
        match red.representative(r, e) {
            None => Some(units.clone()),
            Some(a) => jt[r][s][a].after(g).ok(),
        }
    };
    let col = colimit(sk, &objects, &jt, &red, &upsilon);
    let hom = hom_free(n, &GradedSet::of_tree(sk.tree(s)), elt_bound);
    let id = sk.identity(s);
    let witness = |h: &FreeMap| carrier_index(&objects, &red, s, h, red.class_of(s, id));
    judge("lke", &objects, col, &hom.items, hom.complete, unbounded(n), &witness)
}

/// The left Kan extension of `nerve(T_M)` along `J` at `T_N`, against
/// `Hom(T_N, T_M)`.
pub fn verify_lknerve(sk: &Arc<Skeleton>, m: &GradedSet, n: &GradedSet, elt_bound: usize) -> KanReport {
    let objects = comma_objects(n, sk, elt_bound);
    let jt = j_table(sk);
    let nerve = Nerve::free(sk, m, None);
    let upsilon = |r: usize, g: &FreeMap, e: usize| -> Option<FreeMap> { i_map(&nerve.level(r)[e]).after(g).ok() };
    let col = colimit(sk, &objects, &jt, &nerve, &upsilon);
    let hom = hom_free(n, m, elt_bound);
    // a tree S with V(S) ≅ N, the comma object (S, φ) with φ(n_i) = the
    // matching vertex, and a = I⁻¹(h ∘ φ⁻¹)
    let shape = Tree::with_valences(&n.valences()).and_then(|t| sk.locate(&t));
    let witness = |h: &FreeMap| -> Option<usize> {
        let (s, _) = shape.as_ref()?;
        let st = sk.tree(*s);
        let mut used = vec![false; st.vertex_count()];
        let mut phi_images = Vec::with_capacity(n.len());
        let mut inv_images = vec![Term::identity(); st.vertex_count()];
        for (i, g) in n.gens.iter().enumerate() {
            let v = (0..st.vertex_count()).find(|&v| !used[v] && st.valence(v) == g.valence)?;
            used[v] = true;
            phi_images.push(Term::generator(v, g.valence));
            inv_images[v] = h.images[i].clone();
        }
        let phi = FreeMap { images: phi_images };
        let a = i_inverse(st, &FreeMap { images: inv_images }).ok()?;
        let e = nerve.find(*s, &a)?;
        carrier_index(&objects, &nerve, *s, &phi, e)
    };
    let mut report = judge("lknerve", &objects, col, &hom.items, hom.complete, unbounded(n) || nerve.truncated(), &witness);
    if shape.is_none() && !hom.items.is_empty() {
        report.witnesses.push("no skeleton tree has the valences of N; surjectivity witness unavailable".into());
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PullbackLevel {
    pub tree: String,
    pub nerve: usize,
    pub hom: usize,
    pub bijective: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PullbackReport {
    pub levels: Vec<PullbackLevel>,
    pub natural: bool,
    pub pass: bool,
    pub truncated: bool,
    pub witnesses: Vec<String>,
}

/// `nerve(T_M)_S ≅ Hom(J(S), T_M)` through `I`, naturally in `S`.
pub fn verify_pullback_hom(sk: &Arc<Skeleton>, m: &GradedSet, elt_bound: Option<usize>) -> PullbackReport {
    let nerve = Nerve::free(sk, m, elt_bound);
    let bound = elt_bound.unwrap_or_else(|| {
        (0..sk.len()).map(|t| (0..nerve.level(t).len()).map(|e| i_map(&nerve.level(t)[e]).max_vertices()).max().unwrap_or(0)).max().unwrap_or(0)
    });
    let table = ElementTable::new(m, sk.max_valence(), bound);
    let mut witnesses = Vec::new();
    let mut truncated = nerve.truncated();
    let levels: Vec<PullbackLevel> = (0..sk.len())
        .map(|t| {
            let tree = sk.tree(t);
            let hom = hom_free_with(&GradedSet::of_tree(tree), &table);
            truncated |= !hom.complete;
            let images: std::collections::HashSet<FreeMap> = nerve.level(t).iter().map(i_map).collect();
            let homset: std::collections::HashSet<&FreeMap> = hom.items.iter().collect();
            let round_trip = nerve.level(t).iter().all(|d| i_inverse(tree, &i_map(d)).as_ref() == Ok(d));
            let bijective = images.len() == nerve.level(t).len()
                && images.iter().all(|i| homset.contains(i))
                && images.len() == hom.items.len()
                && round_trip;
            PullbackLevel { tree: sk.code(t).0.clone(), nerve: nerve.len(t), hom: hom.items.len(), bijective }
        })
        .collect();
    let jt = j_table(sk);
    // both sides are functorial, so naturality on generators suffices
    let failures: Vec<String> = sk
        .generators()
        .into_par_iter()
        .filter_map(|(r, s, b)| {
            (0..nerve.len(s)).find_map(|e| {
                let lhs = i_map(&nerve.level(r)[nerve.restrict(r, s, b, e)]);
                let rhs = i_map(&nerve.level(s)[e]).after(&jt[r][s][b]).expect("composable");
                (lhs != rhs).then(|| format!("I is not natural along {:?}: {} -> {}", sk.hom(r, s)[b], sk.code(r), sk.code(s)))
            })
        })
        .collect();
    let natural = failures.is_empty();
    witnesses.extend(failures.into_iter().take(1));
    for l in levels.iter().filter(|l| !l.bijective) {
        witnesses.push(format!("I is not a bijection at {}: {} vs {}", l.tree, l.nerve, l.hom));
    }
    let pass = natural && levels.iter().all(|l| l.bijective);
    PullbackReport { levels, natural, pass, truncated, witnesses }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitReport {
    pub classes: usize,
    pub summands: Vec<usize>,
    pub expected: usize,
    pub descends: bool,
    pub pass: bool,
    pub truncated: bool,
    pub witnesses: Vec<String>,
}

/// `J_! Sc[S]_*` at `T_N` against the coproduct of `Hom(T_N, J(C_v))` over
/// vertices. Summands share the basepoint whenever `Hom(T_N, ⋆)` is a point,
/// which happens exactly when every generator of `N` is unary.
pub fn verify_splitsc(sk: &Arc<Skeleton>, s: usize, n: &GradedSet, elt_bound: usize) -> SplitReport {
    let objects = comma_objects(n, sk, elt_bound);
    let jt = j_table(sk);
    let core_sub = Arc::new(segal_core(sk, s));
    let red = Reduced::new(core_sub.clone());
    let units = FreeMap { images: vec![Term::identity(); n.len()] };
    let upsilon = |r: usize, g: &FreeMap, e: usize| -> Option<FreeMap> {
        match red.representative(r, e) {
            None => Some(units.clone()),
            Some(a) => jt[r][s][core_sub.members(r)[a]].after(g).ok(),
        }
    };
    let col = colimit(sk, &objects, &jt, &red, &upsilon);
    let tree = sk.tree(s);
    let mut hom_complete = true;
    let summands: Vec<usize> = tree
        .vertices()
        .iter()
        .map(|v| {
            let h = hom_free(n, &GradedSet::new([(v.name.clone(), v.valence())]), elt_bound);
            hom_complete &= h.complete;
            h.items.len()
        })
        .collect();
    let pointed = n.gens.iter().all(|g| g.valence == 1);
    let expected = if pointed {
        1 + summands.iter().map(|h| h - 1).sum::<usize>()
    } else {
        summands.iter().sum()
    };
    let classes = col.quotient.class_count();
    let mut witnesses = col.witnesses;
    if classes != expected {
        witnesses.push(format!("{classes} classes against {expected} in the coproduct"));
    }
    SplitReport {
        classes,
        summands,
        expected,
        descends: col.descends,
        pass: col.descends && classes == expected,
        truncated: unbounded(n) || !hom_complete,
        witnesses,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sk(v: usize, k: usize) -> Arc<Skeleton> {
        Arc::new(Skeleton::new(v, k))
    }

    fn idx(sk: &Skeleton, t: &Tree) -> usize {
        sk.find(&t.canonical_form()).unwrap()
    }

    #[test]
    fn quotients() {
        let q = colim_quotient(&[2, 1], &[]).unwrap();
        assert_eq!(q.class_count(), 3);
        let q = colim_quotient(&[3], &[((0, 0), (0, 1)), ((0, 1), (0, 2))]).unwrap();
        assert_eq!(q.class_count(), 1);
        let q = colim_quotient(&[1, 1, 1], &[((0, 0), (1, 0)), ((1, 0), (2, 0))]).unwrap();
        assert_eq!(q.class_count(), 1);
        assert!(colim_quotient(&[1], &[((0, 0), (0, 1))]).is_err());
        assert!(colim_quotient(&[1], &[((0, 0), (3, 0))]).is_err());
    }

    #[test]
    fn comma_object_counts() {
        let sk = sk(2, 2);
        let empty = comma_objects(&GradedSet::empty(), &sk, 2);
        assert_eq!(empty.len(), sk.len());
        let v2 = GradedSet::new([("v", 2)]);
        let objs = comma_objects(&v2, &sk, 1);
        assert_eq!(objs.maps[idx(&sk, &Tree::corolla(2))].len(), 2);
        let c = GradedSet::new([("c", 0)]);
        assert!(comma_objects(&c, &sk, 3).maps[sk.eta()].is_empty());
    }

    #[test]
    fn lke_small_cases() {
        let sk = sk(2, 2);
        let r = verify_lke(&sk, sk.eta(), &GradedSet::empty(), 1);
        assert!(r.bijective, "{r:?}");
        assert_eq!((r.classes, r.hom_count), (1, 1));
        let r = verify_lke(&sk, idx(&sk, &Tree::corolla(2)), &GradedSet::new([("v", 2)]), 1);
        assert!(r.bijective, "{r:?}");
        assert_eq!(r.classes, 2);
        assert!(!r.truncated);
    }

    #[test]
    fn lknerve_small_cases() {
        let sk = sk(2, 2);
        let x2 = GradedSet::new([("x", 2)]);
        let r = verify_lknerve(&sk, &x2, &GradedSet::new([("v", 2)]), 1);
        assert!(r.bijective, "{r:?}");
        assert_eq!(r.classes, 2);
        let r = verify_lknerve(&sk, &x2, &GradedSet::empty(), 1);
        assert!(r.bijective, "{r:?}");
        assert_eq!(r.classes, 1);
    }

    #[test]
    fn pullback_small() {
        let sk = sk(2, 3);
        let r = verify_pullback_hom(&sk, &GradedSet::new([("x", 2)]), None);
        assert!(r.pass, "{r:?}");
        let c3 = idx(&sk, &Tree::corolla(3));
        assert_eq!((r.levels[c3].nerve, r.levels[c3].hom), (12, 12));
        let r = verify_pullback_hom(&sk, &GradedSet::empty(), None);
        assert!(r.pass);
        assert_eq!(r.levels[c3].nerve, 0);
    }

    #[test]
    fn splitsc_two_corollas() {
        let sk = sk(2, 2);
        let s = idx(&sk, &Tree::from_named("r", &[("a", "r", vec!["x", "l"]), ("b", "x", vec!["p", "q"])]).unwrap());
        let r = verify_splitsc(&sk, s, &GradedSet::new([("v", 2)]), 1);
        assert!(r.pass, "{r:?}");
        assert_eq!(r.classes, 4);
        let r = verify_splitsc(&sk, sk.eta(), &GradedSet::new([("v", 2)]), 1);
        assert!(r.pass, "{r:?}");
        assert_eq!(r.classes, 0);
    }
}
