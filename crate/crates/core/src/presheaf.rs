//! Dendroidal sets on a bounded skeleton.
//!
//! A presheaf exposes the size of each level and restriction along every
//! skeleton morphism. Elements are indices `0..len(t)`. Constructions are
//! lazy where that is cheap (restriction is computed on demand) and
//! precomputed where the structure needs it (reductions, sub-presheaves).

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::colored::{hom_co, restrict_dendrex, ColoredOperad, Dendrex, FreeOperad};
use crate::error::{Error, Result};
use crate::free::GradedSet;
use crate::skeleton::Skeleton;
use crate::tree::{CanonicalCode, Tree};

pub trait Presheaf: Sync + Send {
    fn skeleton(&self) -> &Arc<Skeleton>;

    fn len(&self, t: usize) -> usize;

    /// `f* x` for `f` the `f`-th morphism `r -> s` and `x` in level `s`.
    fn restrict(&self, r: usize, s: usize, f: usize, x: usize) -> usize;

    /// The distinguished point of a linear level, if the presheaf has one.
    fn basepoint(&self, _t: usize) -> Option<usize> {
        None
    }

    /// Whether the levels are a bounded part of something larger.
    fn truncated(&self) -> bool {
        false
    }

    fn describe(&self, _t: usize, x: usize) -> String {
        format!("#{x}")
    }
}

pub type Shared = Arc<dyn Presheaf>;

pub fn sizes(x: &dyn Presheaf) -> Vec<usize> {
    (0..x.skeleton().len()).map(|t| x.len(t)).collect()
}

pub fn total_size(x: &dyn Presheaf) -> usize {
    sizes(x).iter().sum()
}

/// `Ω[S] = Hom(-, S)`.
pub struct Representable {
    sk: Arc<Skeleton>,
    s: usize,
}

impl Representable {
    pub fn new(sk: &Arc<Skeleton>, s: usize) -> Representable {
        Representable { sk: sk.clone(), s }
    }

    pub fn of_tree(sk: &Arc<Skeleton>, t: &Tree) -> Result<Representable> {
        let (s, _) = sk.locate(t).ok_or_else(|| Error::NotInSkeleton(t.canonical_form().0))?;
        Ok(Representable::new(sk, s))
    }

    pub fn tree(&self) -> usize {
        self.s
    }
}

impl Presheaf for Representable {
    fn skeleton(&self) -> &Arc<Skeleton> {
        &self.sk
    }

    fn len(&self, t: usize) -> usize {
        self.sk.hom(t, self.s).len()
    }

    fn restrict(&self, r: usize, s: usize, f: usize, x: usize) -> usize {
        self.sk.compose(r, s, self.s, f, x)
    }

    fn describe(&self, t: usize, x: usize) -> String {
        format!("{:?}", self.sk.hom(t, self.s)[x])
    }
}

/// The nerve of a coloured operad, optionally cut down to a sub-presheaf by
/// a filter that is stable under restriction.
pub struct Nerve<P: ColoredOperad> {
    sk: Arc<Skeleton>,
    operad: P,
    levels: Vec<Vec<Dendrex<P::Op>>>,
    index: Vec<HashMap<Dendrex<P::Op>, usize>>,
    truncated: bool,
}

impl<P: ColoredOperad> Nerve<P> {
    pub fn new(sk: &Arc<Skeleton>, operad: P) -> Nerve<P> {
        Nerve::with_filter(sk, operad, |_| true, false)
    }

    pub fn with_filter(
        sk: &Arc<Skeleton>,
        operad: P,
        keep: impl Fn(&Dendrex<P::Op>) -> bool + Sync,
        truncated: bool,
    ) -> Nerve<P> {
        use rayon::prelude::*;
        let levels: Vec<Vec<Dendrex<P::Op>>> = sk
            .trees()
            .par_iter()
            .map(|t| {
                let mut l: Vec<_> = hom_co(&operad, t).into_iter().filter(|d| keep(d)).collect();
                l.sort();
                l
            })
            .collect();
        let index = levels
            .iter()
            .map(|l| l.iter().cloned().enumerate().map(|(i, d)| (d, i)).collect())
            .collect();
        let truncated = truncated || !operad.complete_up_to(sk.max_valence());
        Nerve { sk: sk.clone(), operad, levels, index, truncated }
    }

    pub fn operad(&self) -> &P {
        &self.operad
    }

    pub fn level(&self, t: usize) -> &[Dendrex<P::Op>] {
        &self.levels[t]
    }

    pub fn find(&self, t: usize, d: &Dendrex<P::Op>) -> Option<usize> {
        self.index[t].get(d).copied()
    }
}

impl Nerve<FreeOperad> {
    /// The nerve of `T_M`. Dendrices are limited to at most `bound` vertices
    /// in total across their labels; restriction never increases that total,
    /// so this is a sub-presheaf. With no bound, a bound large enough for
    /// every skeleton tree is used when `T_M` is finitary.
    pub fn free(sk: &Arc<Skeleton>, m: &GradedSet, bound: Option<usize>) -> Nerve<FreeOperad> {
        let needed = sk
            .trees()
            .iter()
            .map(|t| t.vertices().iter().map(|v| m.max_vertices(v.valence()).unwrap_or(usize::MAX)).fold(0usize, usize::saturating_add))
            .max()
            .unwrap_or(0);
        let bound = bound.unwrap_or(if needed == usize::MAX { sk.max_vertices() } else { needed });
        let operad = FreeOperad::new(m, sk.max_valence(), bound);
        let truncated = needed > bound;
        Nerve::with_filter(sk, operad, move |d| d.ops.iter().map(|t| t.vertex_count()).sum::<usize>() <= bound, truncated)
    }
}

impl<P: ColoredOperad> Presheaf for Nerve<P> {
    fn skeleton(&self) -> &Arc<Skeleton> {
        &self.sk
    }

    fn len(&self, t: usize) -> usize {
        self.levels[t].len()
    }

    fn restrict(&self, r: usize, s: usize, f: usize, x: usize) -> usize {
        let d = restrict_dendrex(
            &self.operad,
            self.sk.tree(r),
            self.sk.tree(s),
            &self.sk.hom(r, s)[f],
            &self.levels[s][x],
        )
        .expect("operad composition is defined on nerve elements");
        self.find(r, &d).expect("restriction stays inside the nerve")
    }

    fn truncated(&self) -> bool {
        self.truncated
    }

    fn describe(&self, t: usize, x: usize) -> String {
        format!("{:?}", self.levels[t][x])
    }
}

/// The empty dendroidal set.
pub struct Empty {
    sk: Arc<Skeleton>,
}

impl Empty {
    pub fn new(sk: &Arc<Skeleton>) -> Empty {
        Empty { sk: sk.clone() }
    }
}

impl Presheaf for Empty {
    fn skeleton(&self) -> &Arc<Skeleton> {
        &self.sk
    }

    fn len(&self, _t: usize) -> usize {
        0
    }

    fn restrict(&self, _r: usize, _s: usize, _f: usize, _x: usize) -> usize {
        unreachable!("the empty presheaf has no elements")
    }
}

/// The reduction: at linear trees, everything degenerate from `η` is
/// collapsed to one basepoint (index 0), which is added if absent.
pub struct Reduced {
    parent: Shared,
    reps: Vec<Vec<Option<usize>>>,
    to_reduced: Vec<Vec<usize>>,
}

impl Reduced {
    pub fn new(parent: Shared) -> Reduced {
        let sk = parent.skeleton().clone();
        let eta = sk.eta();
        let mut reps = Vec::with_capacity(sk.len());
        let mut to_reduced = Vec::with_capacity(sk.len());
        for t in 0..sk.len() {
            if sk.is_linear(t) {
                let collapse: HashSet<usize> = (0..parent.len(eta)).map(|y| parent.restrict(t, eta, 0, y)).collect();
                let mut r = vec![None];
                let mut m = vec![0; parent.len(t)];
                for (x, slot) in m.iter_mut().enumerate() {
                    if !collapse.contains(&x) {
                        *slot = r.len();
                        r.push(Some(x));
                    }
                }
                reps.push(r);
                to_reduced.push(m);
            } else {
                reps.push((0..parent.len(t)).map(Some).collect());
                to_reduced.push((0..parent.len(t)).collect());
            }
        }
        Reduced { parent, reps, to_reduced }
    }

    /// The parent element represented by `x`, or `None` for the basepoint.
    pub fn representative(&self, t: usize, x: usize) -> Option<usize> {
        self.reps[t][x]
    }

    /// The class of a parent element.
    pub fn class_of(&self, t: usize, x: usize) -> usize {
        self.to_reduced[t][x]
    }

    pub fn parent(&self) -> &Shared {
        &self.parent
    }
}

impl Presheaf for Reduced {
    fn skeleton(&self) -> &Arc<Skeleton> {
        self.parent.skeleton()
    }

    fn len(&self, t: usize) -> usize {
        self.reps[t].len()
    }

    fn restrict(&self, r: usize, s: usize, f: usize, x: usize) -> usize {
        match self.reps[s][x] {
            None => 0,
            Some(y) => self.to_reduced[r][self.parent.restrict(r, s, f, y)],
        }
    }

    fn basepoint(&self, t: usize) -> Option<usize> {
        self.skeleton().is_linear(t).then_some(0)
    }

    fn truncated(&self) -> bool {
        self.parent.truncated()
    }

    fn describe(&self, t: usize, x: usize) -> String {
        match self.reps[t][x] {
            None => "*".into(),
            Some(y) => self.parent.describe(t, y),
        }
    }
}

/// `X × K` for a finite set `K`, with no basepoints.
pub struct Product {
    parent: Shared,
    k: usize,
}

impl Product {
    pub fn new(parent: Shared, k: usize) -> Product {
        Product { parent, k }
    }
}

impl Presheaf for Product {
    fn skeleton(&self) -> &Arc<Skeleton> {
        self.parent.skeleton()
    }

    fn len(&self, t: usize) -> usize {
        self.parent.len(t) * self.k
    }

    fn restrict(&self, r: usize, s: usize, f: usize, x: usize) -> usize {
        let (y, c) = (x / self.k, x % self.k);
        self.parent.restrict(r, s, f, y) * self.k + c
    }

    fn truncated(&self) -> bool {
        self.parent.truncated()
    }
}

/// `X ⊗ K` for reduced `X` and a constant finite set `K`: `X × K` at
/// nonlinear trees and the smash `X ∧ K_+` at linear ones.
pub struct TensorDiscrete {
    parent: Shared,
    k: usize,
}

impl TensorDiscrete {
    pub fn new(parent: Shared, k: usize) -> Result<TensorDiscrete> {
        let sk = parent.skeleton();
        for t in 0..sk.len() {
            if sk.is_linear(t) && parent.basepoint(t).is_none() {
                return Err(Error::InvalidPresheaf("tensoring needs basepoints at linear trees".into()));
            }
        }
        Ok(TensorDiscrete { parent, k })
    }

    /// The element for `(x, c)`; basepoint pairs go to the basepoint.
    pub fn pair(&self, t: usize, x: usize, c: usize) -> usize {
        match self.parent.basepoint(t) {
            None => x * self.k + c,
            Some(b) if x == b => 0,
            Some(b) => 1 + (if x > b { x - 1 } else { x }) * self.k + c,
        }
    }

    fn unpair(&self, t: usize, e: usize) -> Option<(usize, usize)> {
        match self.parent.basepoint(t) {
            None => Some((e / self.k, e % self.k)),
            Some(_) if e == 0 => None,
            Some(b) => {
                let (i, c) = ((e - 1) / self.k, (e - 1) % self.k);
                Some((if i >= b { i + 1 } else { i }, c))
            }
        }
    }
}

impl Presheaf for TensorDiscrete {
    fn skeleton(&self) -> &Arc<Skeleton> {
        self.parent.skeleton()
    }

    fn len(&self, t: usize) -> usize {
        let a = self.parent.len(t);
        match self.parent.basepoint(t) {
            None => a * self.k,
            Some(_) => (a - 1) * self.k + 1,
        }
    }

    fn restrict(&self, r: usize, s: usize, f: usize, x: usize) -> usize {
        match self.unpair(s, x) {
            None => 0,
            Some((y, c)) => self.pair(r, self.parent.restrict(r, s, f, y), c),
        }
    }

    fn basepoint(&self, t: usize) -> Option<usize> {
        self.parent.basepoint(t).map(|_| 0)
    }

    fn truncated(&self) -> bool {
        self.parent.truncated()
    }
}

/// Coproduct of reduced presheaves: disjoint union at nonlinear trees, wedge
/// at linear ones.
pub struct ReducedCoproduct {
    parts: Vec<Shared>,
}

impl ReducedCoproduct {
    pub fn new(parts: Vec<Shared>) -> Result<ReducedCoproduct> {
        let sk = parts.first().map(|p| p.skeleton().clone());
        if let Some(sk) = sk {
            for p in &parts {
                for t in (0..sk.len()).filter(|&t| sk.is_linear(t)) {
                    if p.basepoint(t) != Some(0) {
                        return Err(Error::InvalidPresheaf("coproduct parts must be reduced".into()));
                    }
                }
            }
        }
        Ok(ReducedCoproduct { parts })
    }

    fn offset(&self, t: usize, part: usize) -> usize {
        let lin = self.skeleton().is_linear(t);
        let base = usize::from(lin);
        base + self.parts[..part].iter().map(|p| p.len(t) - base).sum::<usize>()
    }

    fn split(&self, t: usize, x: usize) -> Option<(usize, usize)> {
        let lin = self.skeleton().is_linear(t);
        if lin && x == 0 {
            return None;
        }
        let base = usize::from(lin);
        let mut rest = x - base;
        for (i, p) in self.parts.iter().enumerate() {
            let n = p.len(t) - base;
            if rest < n {
                return Some((i, rest + base));
            }
            rest -= n;
        }
        unreachable!("index in range")
    }
}

impl Presheaf for ReducedCoproduct {
    fn skeleton(&self) -> &Arc<Skeleton> {
        self.parts[0].skeleton()
    }

    fn len(&self, t: usize) -> usize {
        self.offset(t, self.parts.len())
    }

    fn restrict(&self, r: usize, s: usize, f: usize, x: usize) -> usize {
        match self.split(s, x) {
            None => 0,
            Some((i, y)) => {
                let z = self.parts[i].restrict(r, s, f, y);
                if self.skeleton().is_linear(r) {
                    if z == 0 {
                        0
                    } else {
                        self.offset(r, i) + z - 1
                    }
                } else {
                    self.offset(r, i) + z
                }
            }
        }
    }

    fn basepoint(&self, t: usize) -> Option<usize> {
        self.skeleton().is_linear(t).then_some(0)
    }
}

/// A sub-presheaf, stored as a mask on each level of its parent.
pub struct SubPresheaf {
    parent: Shared,
    members: Vec<Vec<usize>>,
    position: Vec<HashMap<usize, usize>>,
}

impl SubPresheaf {
    /// Checks closure under every restriction.
    pub fn from_members(parent: Shared, mut members: Vec<Vec<usize>>) -> Result<SubPresheaf> {
        let sk = parent.skeleton().clone();
        let sets: Vec<HashSet<usize>> = members.iter().map(|m| m.iter().copied().collect()).collect();
        for s in 0..sk.len() {
            for &x in &members[s] {
                for r in 0..sk.len() {
                    for f in 0..sk.hom(r, s).len() {
                        if !sets[r].contains(&parent.restrict(r, s, f, x)) {
                            return Err(Error::InvalidPresheaf(format!(
                                "not closed: an element at `{}` restricts outside along a map from `{}`",
                                sk.code(s),
                                sk.code(r)
                            )));
                        }
                    }
                }
            }
        }
        members.iter_mut().for_each(|m| {
            m.sort_unstable();
            m.dedup()
        });
        Ok(SubPresheaf::unchecked(parent, members))
    }

    fn unchecked(parent: Shared, members: Vec<Vec<usize>>) -> SubPresheaf {
        let position = members.iter().map(|m| m.iter().enumerate().map(|(i, &x)| (x, i)).collect()).collect();
        SubPresheaf { parent, members, position }
    }

    /// The sub-presheaf generated by the given `(level, element)` pairs.
    pub fn generated(parent: Shared, gens: &[(usize, usize)]) -> SubPresheaf {
        let sk = parent.skeleton().clone();
        let mut sets: Vec<HashSet<usize>> = vec![HashSet::new(); sk.len()];
        for &(s, x) in gens {
            if sets[s].contains(&x) {
                continue;
            }
            // restrictions of a generator already contain all further restrictions
            for r in 0..sk.len() {
                for f in 0..sk.hom(r, s).len() {
                    sets[r].insert(parent.restrict(r, s, f, x));
                }
            }
        }
        let members = sets
            .into_iter()
            .map(|s| {
                let mut v: Vec<usize> = s.into_iter().collect();
                v.sort_unstable();
                v
            })
            .collect();
        SubPresheaf::unchecked(parent, members)
    }

    pub fn empty(parent: Shared) -> SubPresheaf {
        let n = parent.skeleton().len();
        SubPresheaf::unchecked(parent, vec![Vec::new(); n])
    }

    pub fn union(&self, other: &SubPresheaf) -> SubPresheaf {
        let members = self
            .members
            .iter()
            .zip(&other.members)
            .map(|(a, b)| {
                let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect();
        SubPresheaf::unchecked(self.parent.clone(), members)
    }

    pub fn members(&self, t: usize) -> &[usize] {
        &self.members[t]
    }

    pub fn contains(&self, t: usize, x: usize) -> bool {
        self.position[t].contains_key(&x)
    }

    pub fn is_subset_of(&self, other: &SubPresheaf) -> bool {
        (0..self.members.len()).all(|t| self.members[t].iter().all(|&x| other.contains(t, x)))
    }

    pub fn parent(&self) -> &Shared {
        &self.parent
    }
}

impl Presheaf for SubPresheaf {
    fn skeleton(&self) -> &Arc<Skeleton> {
        self.parent.skeleton()
    }

    fn len(&self, t: usize) -> usize {
        self.members[t].len()
    }

    fn restrict(&self, r: usize, s: usize, f: usize, x: usize) -> usize {
        let y = self.parent.restrict(r, s, f, self.members[s][x]);
        self.position[r][&y]
    }

    fn basepoint(&self, t: usize) -> Option<usize> {
        self.parent.basepoint(t).and_then(|b| self.position[t].get(&b).copied())
    }

    fn truncated(&self) -> bool {
        self.parent.truncated()
    }
}

/// A presheaf given by explicit tables for every morphism.
pub struct Tabulated {
    sk: Arc<Skeleton>,
    names: Vec<Vec<String>>,
    /// `action[s][r][f][x]`.
    action: Vec<Vec<Vec<Vec<usize>>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelJson {
    pub tree: CanonicalCode,
    pub elements: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionJson {
    pub source: CanonicalCode,
    pub target: CanonicalCode,
    pub edge_map: Vec<usize>,
    /// For each element of the target level, the index of its restriction.
    pub action: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresheafJson {
    pub max_vertices: usize,
    pub max_valence: usize,
    pub levels: Vec<LevelJson>,
    pub generators: Vec<ActionJson>,
}

impl Tabulated {
    /// Copies every level and every restriction of `x`.
    pub fn from_presheaf(x: &dyn Presheaf) -> Tabulated {
        let sk = x.skeleton().clone();
        let n = sk.len();
        let action = (0..n)
            .map(|s| {
                (0..n)
                    .map(|r| {
                        (0..sk.hom(r, s).len())
                            .map(|f| (0..x.len(s)).map(|e| x.restrict(r, s, f, e)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let names = (0..n).map(|t| (0..x.len(t)).map(|e| x.describe(t, e)).collect()).collect();
        Tabulated { sk, names, action }
    }

    /// Tables on generating morphisms only.
    pub fn to_json(&self) -> PresheafJson {
        let levels = (0..self.sk.len())
            .filter(|&t| !self.names[t].is_empty())
            .map(|t| LevelJson { tree: self.sk.code(t).clone(), elements: self.names[t].clone() })
            .collect();
        let generators = self
            .sk
            .generators()
            .into_iter()
            .map(|(r, s, f)| ActionJson {
                source: self.sk.code(r).clone(),
                target: self.sk.code(s).clone(),
                edge_map: self.sk.hom(r, s)[f].clone(),
                action: self.action[s][r][f].clone(),
            })
            .collect();
        PresheafJson {
            max_vertices: self.sk.max_vertices(),
            max_valence: self.sk.max_valence(),
            levels,
            generators,
        }
    }

    /// Loads generator tables and extends them to all morphisms by
    /// composition, rejecting inconsistent or missing data.
    pub fn from_json(json: &PresheafJson) -> Result<Tabulated> {
        let sk = Arc::new(Skeleton::new(json.max_vertices, json.max_valence));
        let n = sk.len();
        let mut names = vec![Vec::new(); n];
        for l in &json.levels {
            let t = sk.find(&l.tree).ok_or_else(|| Error::NotInSkeleton(l.tree.0.clone()))?;
            names[t] = l.elements.clone();
        }
        let mut known: Vec<Vec<Vec<Option<Vec<usize>>>>> =
            (0..n).map(|s| (0..n).map(|r| vec![None; sk.hom(r, s).len()]).collect()).collect();
        let mut gens_from: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for g in &json.generators {
            let r = sk.find(&g.source).ok_or_else(|| Error::NotInSkeleton(g.source.0.clone()))?;
            let s = sk.find(&g.target).ok_or_else(|| Error::NotInSkeleton(g.target.0.clone()))?;
            let f = sk.hom_index(r, s, &g.edge_map).ok_or_else(|| {
                Error::InvalidPresheaf(format!("{:?} is not a morphism {} -> {}", g.edge_map, g.source, g.target))
            })?;
            if g.action.len() != names[s].len() || g.action.iter().any(|&y| y >= names[r].len()) {
                return Err(Error::InvalidPresheaf(format!(
                    "table for {} -> {} {:?} has the wrong size or range",
                    g.source, g.target, g.edge_map
                )));
            }
            if known[s][r][f].replace(g.action.clone()).is_some_and(|old| old != g.action) {
                return Err(Error::InvalidPresheaf("two different tables for one morphism".into()));
            }
            gens_from[r].push((s, f));
        }
        for (r, s, f) in sk.generators() {
            if known[s][r][f].is_none() {
                return Err(Error::InvalidPresheaf(format!(
                    "missing table for generator {} -> {} {:?}",
                    sk.code(r),
                    sk.code(s),
                    sk.hom(r, s)[f]
                )));
            }
        }
        // breadth-first closure: (k ∘ h)* = h* ∘ k*
        let generator_tables = known.clone();
        let mut reached: Vec<Vec<Vec<bool>>> =
            (0..n).map(|s| (0..n).map(|r| vec![false; sk.hom(r, s).len()]).collect()).collect();
        let mut queue = VecDeque::new();
        for t in 0..n {
            let id = sk.identity(t);
            let table: Vec<usize> = (0..names[t].len()).collect();
            if known[t][t][id].replace(table.clone()).is_some_and(|old| old != table) {
                return Err(Error::InvalidPresheaf(format!("identity of {} does not act trivially", sk.code(t))));
            }
            reached[t][t][id] = true;
            queue.push_back((t, t, id));
        }
        while let Some((a, b, h)) = queue.pop_front() {
            let hstar = known[b][a][h].clone().expect("queued morphisms are known");
            for &(c, k) in &gens_from[b] {
                let kstar = generator_tables[c][b][k].as_ref().expect("generator table");
                let kh = sk.compose(a, b, c, h, k);
                let table: Vec<usize> = kstar.iter().map(|&y| hstar[y]).collect();
                match &known[c][a][kh] {
                    Some(old) if *old != table => {
                        return Err(Error::InvalidPresheaf(format!(
                            "tables are not functorial on {} -> {} {:?}",
                            sk.code(a),
                            sk.code(c),
                            sk.hom(a, c)[kh]
                        )))
                    }
                    Some(_) => {}
                    None => known[c][a][kh] = Some(table),
                }
                if !std::mem::replace(&mut reached[c][a][kh], true) {
                    queue.push_back((a, c, kh));
                }
            }
        }
        let mut action = Vec::with_capacity(n);
        for (s, row) in known.into_iter().enumerate() {
            let mut out_row = Vec::with_capacity(n);
            for (r, tables) in row.into_iter().enumerate() {
                let mut v = Vec::with_capacity(tables.len());
                for (f, t) in tables.into_iter().enumerate() {
                    v.push(t.ok_or_else(|| {
                        Error::InvalidPresheaf(format!(
                            "generators do not reach {} -> {} {:?}",
                            sk.code(r),
                            sk.code(s),
                            sk.hom(r, s)[f]
                        ))
                    })?);
                }
                out_row.push(v);
            }
            action.push(out_row);
        }
        Ok(Tabulated { sk, names, action })
    }

    pub fn element_names(&self, t: usize) -> &[String] {
        &self.names[t]
    }
}

impl Presheaf for Tabulated {
    fn skeleton(&self) -> &Arc<Skeleton> {
        &self.sk
    }

    fn len(&self, t: usize) -> usize {
        self.names[t].len()
    }

    fn restrict(&self, r: usize, s: usize, f: usize, x: usize) -> usize {
        self.action[s][r][f][x]
    }

    fn describe(&self, t: usize, x: usize) -> String {
        self.names[t][x].clone()
    }
}

/// Natural transformations as levelwise maps.
pub type NatTrans = Vec<Vec<usize>>;

/// Natural transformations `x -> y`, at most `limit` of them.
pub fn hom_presheaf(x: &dyn Presheaf, y: &dyn Presheaf, limit: Option<usize>) -> Vec<NatTrans> {
    let sk = x.skeleton().clone();
    let mut order: Vec<(usize, usize)> = (0..sk.len()).flat_map(|t| (0..x.len(t)).map(move |e| (t, e))).collect();
    order.sort_by_key(|&(t, _)| std::cmp::Reverse((sk.vertex_count(t), sk.tree(t).edge_count())));
    let mut alpha: Vec<Vec<Option<usize>>> = (0..sk.len()).map(|t| vec![None; x.len(t)]).collect();
    let mut out = Vec::new();
    nat_search(&sk, x, y, &order, 0, &mut alpha, &mut out, limit.unwrap_or(usize::MAX));
    out
}

#[allow(clippy::too_many_arguments)]
fn nat_search(
    sk: &Skeleton,
    x: &dyn Presheaf,
    y: &dyn Presheaf,
    order: &[(usize, usize)],
    i: usize,
    alpha: &mut Vec<Vec<Option<usize>>>,
    out: &mut Vec<NatTrans>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    let Some(&(t, e)) = order.get(i) else {
        out.push(alpha.iter().map(|l| l.iter().map(|v| v.expect("assigned")).collect()).collect());
        return;
    };
    let choices: Vec<usize> = match alpha[t][e] {
        Some(v) => vec![v],
        None => (0..y.len(t)).collect(),
    };
    let preset = alpha[t][e].is_some();
    for c in choices {
        let mut trail = Vec::new();
        if !preset {
            alpha[t][e] = Some(c);
            trail.push((t, e));
        }
        let mut ok = true;
        'prop: for r in 0..sk.len() {
            for f in 0..sk.hom(r, t).len() {
                let xe = x.restrict(r, t, f, e);
                let yc = y.restrict(r, t, f, c);
                match alpha[r][xe] {
                    Some(v) if v != yc => {
                        ok = false;
                        break 'prop;
                    }
                    Some(_) => {}
                    None => {
                        alpha[r][xe] = Some(yc);
                        trail.push((r, xe));
                    }
                }
            }
        }
        if ok {
            nat_search(sk, x, y, order, i + 1, alpha, out, limit);
        }
        for (a, b) in trail {
            alpha[a][b] = None;
        }
    }
}

/// Where a levelwise map fails to be a natural isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum IsoFailure {
    Size { tree: String, left: usize, right: usize },
    NotBijective { tree: String },
    NotNatural { source: String, target: String, edge_map: Vec<usize>, element: usize },
}

/// Checks that `maps` is a natural bijection `x -> y`.
pub fn check_iso(x: &dyn Presheaf, y: &dyn Presheaf, maps: &NatTrans) -> std::result::Result<(), IsoFailure> {
    let sk = x.skeleton();
    for t in 0..sk.len() {
        let tree = sk.code(t).0.clone();
        if x.len(t) != y.len(t) || maps[t].len() != x.len(t) {
            return Err(IsoFailure::Size { tree, left: x.len(t), right: y.len(t) });
        }
        let img: HashSet<usize> = maps[t].iter().copied().collect();
        if img.len() != x.len(t) || img.iter().any(|&v| v >= y.len(t)) {
            return Err(IsoFailure::NotBijective { tree });
        }
    }
    for s in 0..sk.len() {
        for r in 0..sk.len() {
            for f in 0..sk.hom(r, s).len() {
                for e in 0..x.len(s) {
                    if maps[r][x.restrict(r, s, f, e)] != y.restrict(r, s, f, maps[s][e]) {
                        return Err(IsoFailure::NotNatural {
                            source: sk.code(r).0.clone(),
                            target: sk.code(s).0.clone(),
                            edge_map: sk.hom(r, s)[f].clone(),
                            element: e,
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

/// The inclusion of a corolla onto vertex `v` of skeleton tree `s`:
/// `(corolla index, morphism index)`.
pub fn corolla_inclusion(sk: &Skeleton, s: usize, v: usize) -> Option<(usize, usize)> {
    let t = sk.tree(s);
    let vert = t.vertex(v);
    let c = sk.find(&Tree::corolla(vert.valence()).canonical_form())?;
    let mut map = vec![vert.output];
    map.extend(vert.inputs.iter().copied());
    Some((c, sk.hom_index(c, s, &map)?))
}

/// The Segal core `Sc[S] ⊆ Ω[S]`.
pub fn segal_core(sk: &Arc<Skeleton>, s: usize) -> SubPresheaf {
    let rep: Shared = Arc::new(Representable::new(sk, s));
    let gens: Vec<(usize, usize)> = (0..sk.vertex_count(s))
        .map(|v| corolla_inclusion(sk, s, v).expect("corollas of skeleton trees are in the skeleton"))
        .collect();
    SubPresheaf::generated(rep, &gens)
}

/// `Ω[S]_*` and its external boundary: the images of the faces of `S` with
/// one vertex fewer.
pub fn external_boundary(sk: &Arc<Skeleton>, s: usize) -> Result<(Arc<Reduced>, SubPresheaf)> {
    let t = sk.tree(s);
    if t.vertex_count() == 0 {
        return Err(Error::InvalidTree("the unit tree has no external boundary".into()));
    }
    let red = Arc::new(Reduced::new(Arc::new(Representable::new(sk, s))));
    let mut gens = Vec::new();
    for (sub, emb) in t.subtrees() {
        if sub.vertex_count() + 1 != t.vertex_count() {
            continue;
        }
        let (r, iso) = sk.locate(&sub).ok_or_else(|| Error::NotInSkeleton(sub.canonical_form().0))?;
        let map: Vec<usize> = iso.iter().map(|&e| emb[e]).collect();
        let f = sk.hom_index(r, s, &map).expect("subtree inclusion is a morphism");
        gens.push((r, red.class_of(r, f)));
    }
    let shared: Shared = red.clone();
    Ok((red, SubPresheaf::generated(shared, &gens)))
}

/// Whether `Aut(S)` acts freely on `y_S` minus the sub-presheaf, at every
/// level. Returns a witness `(tree, element, automorphism edge map)` on failure.
pub fn is_normal(y: &dyn Presheaf, sub: Option<&SubPresheaf>) -> std::result::Result<(), (String, usize, Vec<usize>)> {
    let sk = y.skeleton();
    for t in 0..sk.len() {
        let id = sk.identity(t);
        for e in 0..y.len(t) {
            if sub.is_some_and(|s| s.contains(t, e)) {
                continue;
            }
            for &a in sk.automorphisms(t) {
                if a != id && y.restrict(t, t, a, e) == e {
                    return Err((sk.code(t).0.clone(), e, sk.hom(t, t)[a].clone()));
                }
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SegalLevel {
    pub tree: String,
    pub elements: usize,
    pub compatible_tuples: usize,
    pub injective: bool,
    pub surjective: bool,
    /// Set at the unit tree, whose core is empty.
    pub empty_core: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SegalReport {
    pub levels: Vec<SegalLevel>,
    /// All levels with a nonempty core are bijective.
    pub pass: bool,
    pub truncated: bool,
}

/// Compares each level `X_S` with the compatible families on the Segal core.
pub fn check_strict_segal(x: &dyn Presheaf) -> SegalReport {
    use rayon::prelude::*;
    let sk = x.skeleton().clone();
    let levels: Vec<SegalLevel> = (0..sk.len()).into_par_iter().map(|s| segal_level(&sk, x, s)).collect();
    let pass = levels.iter().all(|l| l.empty_core || (l.injective && l.surjective));
    SegalReport { levels, pass, truncated: x.truncated() }
}

fn segal_level(sk: &Arc<Skeleton>, x: &dyn Presheaf, s: usize) -> SegalLevel {
    let k = sk.vertex_count(s);
    let incl: Vec<(usize, usize)> = (0..k).map(|v| corolla_inclusion(sk, s, v).expect("corolla in skeleton")).collect();
    // pairs of core elements that coincide in Ω[S]
    let mut constraints: Vec<(usize, usize, usize, usize, usize)> = Vec::new();
    for j in 0..k {
        for i in 0..j {
            let (ci, gi) = incl[i];
            let (cj, gj) = incl[j];
            for r in 0..sk.len() {
                for a in 0..sk.hom(r, ci).len() {
                    let ga = sk.compose(r, ci, s, a, gi);
                    for b in 0..sk.hom(r, cj).len() {
                        if sk.compose(r, cj, s, b, gj) == ga {
                            constraints.push((i, j, r, a, b));
                        }
                    }
                }
            }
        }
    }
    let image: Vec<Vec<usize>> = (0..x.len(s))
        .map(|e| incl.iter().map(|&(c, g)| x.restrict(c, s, g, e)).collect())
        .collect();
    let mut seen = HashMap::new();
    let mut witness = None;
    let mut injective = true;
    for (e, tup) in image.iter().enumerate() {
        if let Some(prev) = seen.insert(tup.clone(), e) {
            injective = false;
            witness.get_or_insert(format!(
                "{} and {} have the same core restrictions",
                x.describe(s, prev),
                x.describe(s, e)
            ));
        }
    }
    let mut count = 0usize;
    let mut missing = None;
    let mut tuple = Vec::with_capacity(k);
    core_tuples(x, &incl, &constraints, &mut tuple, &mut |t: &[usize]| {
        count += 1;
        if missing.is_none() && !seen.contains_key(t) {
            missing = Some(t.to_vec());
        }
    });
    let surjective = missing.is_none();
    if let Some(m) = missing {
        witness.get_or_insert(format!("compatible core family {m:?} has no filler"));
    }
    SegalLevel {
        tree: sk.code(s).0.clone(),
        elements: x.len(s),
        compatible_tuples: count,
        injective,
        surjective,
        empty_core: k == 0,
        witness,
    }
}

fn core_tuples(
    x: &dyn Presheaf,
    incl: &[(usize, usize)],
    constraints: &[(usize, usize, usize, usize, usize)],
    tuple: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]),
) {
    let j = tuple.len();
    if j == incl.len() {
        emit(tuple);
        return;
    }
    let cj = incl[j].0;
    for e in 0..x.len(cj) {
        let ok = constraints.iter().filter(|c| c.1 == j).all(|&(i, _, r, a, b)| {
            x.restrict(r, incl[i].0, a, tuple[i]) == x.restrict(r, cj, b, e)
        });
        if ok {
            tuple.push(e);
            core_tuples(x, incl, constraints, tuple, emit);
            tuple.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colored::{FiniteColoredOperad, OpSig, TreeOperad};

    fn sk(v: usize, k: usize) -> Arc<Skeleton> {
        Arc::new(Skeleton::new(v, k))
    }

    fn idx(sk: &Skeleton, t: &Tree) -> usize {
        sk.find(&t.canonical_form()).unwrap()
    }

    #[test]
    fn representables() {
        let sk = sk(2, 2);
        let eta = Representable::new(&sk, sk.eta());
        assert_eq!(eta.len(sk.eta()), 1);
        let c2 = idx(&sk, &Tree::corolla(2));
        assert_eq!(eta.len(c2), 0);
        let rep = Representable::new(&sk, c2);
        assert_eq!(rep.len(sk.eta()), 3);
        assert!(rep.len(c2) >= 1);
    }

    #[test]
    fn yoneda() {
        let sk = sk(2, 2);
        let y = Nerve::free(&sk, &GradedSet::new([("x", 2)]), None);
        for s in 0..sk.len() {
            let rep = Representable::new(&sk, s);
            assert_eq!(hom_presheaf(&rep, &y, None).len(), y.len(s));
        }
        assert_eq!(hom_presheaf(&Empty::new(&sk), &y, None).len(), 1);
    }

    #[test]
    fn reduction() {
        let sk = sk(2, 2);
        let c2 = idx(&sk, &Tree::corolla(2));
        let rep: Shared = Arc::new(Representable::new(&sk, c2));
        let red = Reduced::new(rep.clone());
        assert_eq!(red.len(sk.eta()), 1);
        assert_eq!(red.len(c2), rep.len(c2));
        let again = Reduced::new(Arc::new(Reduced::new(rep)));
        assert_eq!(sizes(&again), sizes(&red));
    }

    #[test]
    fn segal_for_nerves_and_reduced_representables() {
        let sk = sk(2, 2);
        let nerve = Nerve::free(&sk, &GradedSet::new([("x", 2)]), None);
        assert!(check_strict_segal(&nerve).pass);
        let c1 = idx(&sk, &Tree::linear(1));
        let red = Reduced::new(Arc::new(Representable::new(&sk, c1)));
        let report = check_strict_segal(&red);
        assert!(!report.pass);
        let l2 = idx(&sk, &Tree::linear(2));
        let lvl = &report.levels[l2];
        assert_eq!((lvl.elements, lvl.compatible_tuples), (3, 4));
    }

    #[test]
    fn segal_core_sizes() {
        let sk = sk(2, 2);
        let s = idx(&sk, &Tree::from_named("r", &[("a", "r", vec!["x", "l"]), ("b", "x", vec!["p", "q"])]).unwrap());
        let core = segal_core(&sk, s);
        assert_eq!(core.len(s), 0);
        let c2 = idx(&sk, &Tree::corolla(2));
        // two faces, each up to the swap of its inputs
        assert_eq!(core.len(c2), 4);
        assert_eq!(sizes(&segal_core(&sk, c2)), sizes(&Representable::new(&sk, c2)));
        assert_eq!(total_size(&segal_core(&sk, sk.eta())), 0);
    }

    #[test]
    fn boundaries() {
        let sk = sk(2, 2);
        let c2 = idx(&sk, &Tree::corolla(2));
        let (red, b) = external_boundary(&sk, c2).unwrap();
        for t in 0..sk.len() {
            let want = usize::from(sk.is_linear(t));
            assert_eq!(b.len(t), want.min(red.len(t)));
        }
        assert!(external_boundary(&sk, sk.eta()).is_err());
    }

    #[test]
    fn tensor_smash_counts() {
        let sk = sk(2, 2);
        let l1 = idx(&sk, &Tree::linear(1));
        let l2 = idx(&sk, &Tree::linear(2));
        let x: Shared = Arc::new(Reduced::new(Arc::new(Representable::new(&sk, l2))));
        let a = x.len(l1);
        for k in 1..=3 {
            let t = TensorDiscrete::new(x.clone(), k).unwrap();
            assert_eq!(t.len(l1), a * k - k + 1);
        }
    }

    #[test]
    fn normality() {
        let sk = sk(2, 2);
        for s in 0..sk.len() {
            assert!(is_normal(&Representable::new(&sk, s), None).is_ok());
        }
        // a commutative binary operation is fixed by the transposition
        let com = FiniteColoredOperad {
            colors: vec!["*".into()],
            ops: vec![
                OpSig { name: "id".into(), output: 0, inputs: vec![0] },
                OpSig { name: "m".into(), output: 0, inputs: vec![0, 0] },
            ],
            identities: vec![0],
            composition: HashMap::new(),
            permutation: HashMap::from([((1, vec![1, 0]), 1)]),
            max_arity: 2,
        };
        com.validate().unwrap();
        let n = Nerve::new(&sk, com);
        let (tree, _, _) = is_normal(&n, None).unwrap_err();
        assert_eq!(tree, "(||)");
    }

    #[test]
    fn tree_operad_nerve_is_representable() {
        let sk = sk(2, 2);
        for s in 0..sk.len() {
            let n = Nerve::new(&sk, TreeOperad::new(sk.tree(s)));
            let rep = Representable::new(&sk, s);
            let maps: NatTrans = (0..sk.len())
                .map(|t| n.level(t).iter().map(|d| sk.hom_index(t, s, &d.colors).unwrap()).collect())
                .collect();
            assert_eq!(check_iso(&n, &rep, &maps), Ok(()));
        }
    }

    #[test]
    fn tabulated_round_trip() {
        let sk = sk(2, 2);
        let n = Nerve::free(&sk, &GradedSet::new([("x", 2)]), None);
        let tab = Tabulated::from_presheaf(&n);
        let json = tab.to_json();
        let back = Tabulated::from_json(&json).unwrap();
        let ident: NatTrans = (0..sk.len()).map(|t| (0..n.len(t)).collect()).collect();
        assert_eq!(check_iso(&n, &back, &ident), Ok(()));
        let mut broken = json.clone();
        broken.generators.pop();
        assert!(Tabulated::from_json(&broken).is_err());
    }

    #[test]
    fn reduced_coproduct_wedges() {
        let sk = sk(2, 2);
        let c2 = idx(&sk, &Tree::corolla(2));
        let l1 = idx(&sk, &Tree::linear(1));
        let a: Shared = Arc::new(Reduced::new(Arc::new(Representable::new(&sk, c2))));
        let b: Shared = Arc::new(Reduced::new(Arc::new(Representable::new(&sk, l1))));
        let co = ReducedCoproduct::new(vec![a.clone(), b.clone()]).unwrap();
        for t in 0..sk.len() {
            if sk.is_linear(t) {
                assert_eq!(co.len(t), a.len(t) + b.len(t) - 1);
            } else {
                assert_eq!(co.len(t), a.len(t) + b.len(t));
            }
        }
        let ident: NatTrans = (0..sk.len()).map(|t| (0..co.len(t)).collect()).collect();
        let tab = Tabulated::from_presheaf(&co);
        assert_eq!(check_iso(&co, &tab, &ident), Ok(()));
    }
}
