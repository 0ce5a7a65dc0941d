//! Free single-coloured symmetric operads on graded sets.
//!
//! An element of `T_M(n)` is a planar tree whose vertices carry generators of
//! matching valence and whose `n` leaves carry the labels `0..n` bijectively.
//! No quotient is needed: the leaf labels break every symmetry, so distinct
//! labelled planar trees are distinct elements.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::omega::{OmegaMorphism, VertexImage};
use crate::tree::{permutations, Tree};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub valence: usize,
}

/// A set with valences.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GradedSet {
    pub gens: Vec<Generator>,
}

impl GradedSet {
    pub fn new<S: Into<String>>(gens: impl IntoIterator<Item = (S, usize)>) -> GradedSet {
        GradedSet {
            gens: gens.into_iter().map(|(n, v)| Generator { name: n.into(), valence: v }).collect(),
        }
    }

    pub fn empty() -> GradedSet {
        GradedSet::default()
    }

    pub fn from_json(s: &str) -> Result<GradedSet> {
        let g: GradedSet = serde_json::from_str(s)?;
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for g in &self.gens {
            if !seen.insert(&g.name) {
                return Err(Error::InvalidTerm(format!("duplicate generator `{}`", g.name)));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn valence(&self, i: usize) -> usize {
        self.gens[i].valence
    }

    pub fn valences(&self) -> Vec<usize> {
        self.gens.iter().map(|g| g.valence).collect()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    pub fn max_valence(&self) -> usize {
        self.gens.iter().map(|g| g.valence).max().unwrap_or(0)
    }

    /// Whether every `T_M(n)` is finite, so that bounded enumeration can be
    /// complete.
    pub fn is_finitary(&self) -> bool {
        let unary = self.gens.iter().any(|g| g.valence == 1);
        let nullary = self.gens.iter().any(|g| g.valence == 0);
        let big = self.gens.iter().any(|g| g.valence >= 2);
        !unary && !(nullary && big)
    }

    /// Largest vertex count of an element of arity `n`, when finite.
    pub fn max_vertices(&self, n: usize) -> Option<usize> {
        if !self.is_finitary() {
            return None;
        }
        if self.gens.iter().all(|g| g.valence == 0) {
            return Some(usize::from(n == 0 && !self.gens.is_empty()));
        }
        Some(n.saturating_sub(1))
    }

    /// The graded set of vertices of a tree, `J(S)`.
    pub fn of_tree(t: &Tree) -> GradedSet {
        GradedSet::new(t.vertices().iter().map(|v| (v.name.clone(), v.valence())))
    }
}

/// A planar labelled tree; leaves carry 0-based labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Leaf(usize),
    Node { gen: usize, args: Vec<Term> },
}

impl Term {
    pub fn identity() -> Term {
        Term::Leaf(0)
    }

    /// The bare generator `gen` with leaves in order.
    pub fn generator(gen: usize, valence: usize) -> Term {
        Term::Node { gen, args: (0..valence).map(Term::Leaf).collect() }
    }

    pub fn arity(&self) -> usize {
        match self {
            Term::Leaf(_) => 1,
            Term::Node { args, .. } => args.iter().map(Term::arity).sum(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            Term::Leaf(_) => 0,
            Term::Node { args, .. } => 1 + args.iter().map(Term::vertex_count).sum::<usize>(),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Term::Leaf(_))
    }

    /// Leaf labels from left to right.
    pub fn leaf_labels(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            Term::Leaf(l) => out.push(*l),
            Term::Node { args, .. } => args.iter().for_each(|a| a.collect_leaves(out)),
        }
    }

    /// Checks generator valences and that leaves are labelled bijectively.
    pub fn validate(&self, m: &GradedSet) -> Result<()> {
        self.check_nodes(m)?;
        let mut labels = self.leaf_labels();
        labels.sort_unstable();
        if labels.iter().enumerate().any(|(i, &l)| i != l) {
            return Err(Error::InvalidTerm("leaf labels are not a bijection onto 1..n".into()));
        }
        Ok(())
    }

    fn check_nodes(&self, m: &GradedSet) -> Result<()> {
        if let Term::Node { gen, args } = self {
            let g = m.gens.get(*gen).ok_or_else(|| Error::InvalidTerm(format!("unknown generator {gen}")))?;
            if g.valence != args.len() {
                return Err(Error::InvalidTerm(format!(
                    "generator `{}` has valence {} but {} arguments",
                    g.name,
                    g.valence,
                    args.len()
                )));
            }
            args.iter().try_for_each(|a| a.check_nodes(m))?;
        }
        Ok(())
    }

    fn map_leaves(&self, f: &dyn Fn(usize) -> usize) -> Term {
        match self {
            Term::Leaf(l) => Term::Leaf(f(*l)),
            Term::Node { gen, args } => Term::Node { gen: *gen, args: args.iter().map(|a| a.map_leaves(f)).collect() },
        }
    }

    fn replace_leaves(&self, f: &dyn Fn(usize) -> Term) -> Term {
        match self {
            Term::Leaf(l) => f(*l),
            Term::Node { gen, args } => Term::Node { gen: *gen, args: args.iter().map(|a| a.replace_leaves(f)).collect() },
        }
    }

    /// Renames generators.
    pub fn map_gens(&self, f: &dyn Fn(usize) -> usize) -> Term {
        match self {
            Term::Leaf(l) => Term::Leaf(*l),
            Term::Node { gen, args } => Term::Node { gen: f(*gen), args: args.iter().map(|a| a.map_gens(f)).collect() },
        }
    }

    /// Operadic composition with the block convention: the inputs of the
    /// `i`-th argument follow those of the earlier arguments.
    pub fn gamma(&self, args: &[Term]) -> Result<Term> {
        let n = self.arity();
        if args.len() != n {
            return Err(Error::ArityMismatch { expected: n, got: args.len() });
        }
        let mut offsets = Vec::with_capacity(n);
        let mut acc = 0;
        for a in args {
            offsets.push(acc);
            acc += a.arity();
        }
        Ok(self.replace_leaves(&|l| {
            let off = offsets[l];
            args[l].map_leaves(&|x| x + off)
        }))
    }

    /// Partial composition `self ∘_i other` (0-based `i`).
    pub fn compose_at(&self, i: usize, other: &Term) -> Result<Term> {
        let n = self.arity();
        if i >= n {
            return Err(Error::ArityMismatch { expected: n, got: i + 1 });
        }
        let args: Vec<Term> = (0..n).map(|j| if j == i { other.clone() } else { Term::identity() }).collect();
        self.gamma(&args)
    }

    /// The right action of a permutation: leaf `l` becomes `σ⁻¹(l)`, so that
    /// `(f·σ)·τ = f·(σ∘τ)`.
    pub fn act(&self, sigma: &[usize]) -> Result<Term> {
        let n = self.arity();
        let inv = invert_perm(sigma).filter(|_| sigma.len() == n).ok_or(Error::NotAPermutation(n))?;
        Ok(self.map_leaves(&|l| inv[l]))
    }

    /// Replaces every generator `g` by `images[g]`.
    pub fn substitute(&self, images: &[Term]) -> Result<Term> {
        match self {
            Term::Leaf(l) => Ok(Term::Leaf(*l)),
            Term::Node { gen, args } => {
                let img = images.get(*gen).ok_or_else(|| Error::InvalidTerm(format!("no image for generator {gen}")))?;
                let args = args.iter().map(|a| a.substitute(images)).collect::<Result<Vec<_>>>()?;
                if img.arity() != args.len() {
                    return Err(Error::ArityMismatch { expected: args.len(), got: img.arity() });
                }
                // subterms keep their global leaf labels, so no shifting
                Ok(img.replace_leaves(&|l| args[l].clone()))
            }
        }
    }

    pub fn to_json(&self, m: &GradedSet) -> Value {
        match self {
            Term::Leaf(l) => json!({ "leaf": l + 1 }),
            Term::Node { gen, args } => json!({
                "op": m.gens[*gen].name,
                "args": args.iter().map(|a| a.to_json(m)).collect::<Vec<_>>(),
            }),
        }
    }

    pub fn from_json(v: &Value, m: &GradedSet) -> Result<Term> {
        if let Some(l) = v.get("leaf") {
            let l = l.as_u64().filter(|&l| l >= 1).ok_or_else(|| Error::InvalidTerm("leaf labels start at 1".into()))?;
            return Ok(Term::Leaf(l as usize - 1));
        }
        let op = v
            .get("op")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::InvalidTerm("expected `op` or `leaf`".into()))?;
        let gen = m.index(op).ok_or_else(|| Error::InvalidTerm(format!("unknown generator `{op}`")))?;
        let args = match v.get("args") {
            None => Vec::new(),
            Some(a) => a
                .as_array()
                .ok_or_else(|| Error::InvalidTerm("`args` must be a list".into()))?
                .iter()
                .map(|x| Term::from_json(x, m))
                .collect::<Result<_>>()?,
        };
        Ok(Term::Node { gen, args })
    }

    pub fn display<'a>(&'a self, m: &'a GradedSet) -> TermDisplay<'a> {
        TermDisplay { term: self, gens: m }
    }
}

pub struct TermDisplay<'a> {
    term: &'a Term,
    gens: &'a GradedSet,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term {
            Term::Leaf(l) => write!(f, "{}", l + 1),
            Term::Node { gen, args } => {
                write!(f, "{}(", self.gens.gens[*gen].name)?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", a.display(self.gens))?;
                }
                write!(f, ")")
            }
        }
    }
}

pub fn invert_perm(p: &[usize]) -> Option<Vec<usize>> {
    let mut inv = vec![usize::MAX; p.len()];
    for (i, &x) in p.iter().enumerate() {
        if x >= p.len() || inv[x] != usize::MAX {
            return None;
        }
        inv[x] = i;
    }
    Some(inv)
}

/// A bounded enumeration together with whether it is provably everything.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration<T> {
    pub items: Vec<T>,
    pub complete: bool,
}

/// Unlabelled planar shapes (leaves all `Leaf(0)`) with exactly `k` leaves
/// and `v` vertices.
fn shapes(m: &GradedSet, k: usize, v: usize, memo: &mut HashMap<(usize, usize), Vec<Term>>) -> Vec<Term> {
    if let Some(s) = memo.get(&(k, v)) {
        return s.clone();
    }
    let mut out = Vec::new();
    if v == 0 {
        if k == 1 {
            out.push(Term::Leaf(0));
        }
    } else {
        for (gi, g) in m.gens.iter().enumerate() {
            let mut partial = vec![Vec::new()];
            distribute(m, g.valence, k, v - 1, &mut partial, memo);
            for args in partial.into_iter().filter(|a| a.len() == g.valence) {
                out.push(Term::Node { gen: gi, args });
            }
        }
    }
    memo.insert((k, v), out.clone());
    out
}

/// All ways to fill `slots` children using exactly `k` leaves and `v` vertices.
fn distribute(
    m: &GradedSet,
    slots: usize,
    k: usize,
    v: usize,
    out: &mut Vec<Vec<Term>>,
    memo: &mut HashMap<(usize, usize), Vec<Term>>,
) {
    // dynamic programme over slots: states are (prefix, leaves used, vertices used)
    let mut states: Vec<(Vec<Term>, usize, usize)> = vec![(Vec::new(), 0, 0)];
    for slot in 0..slots {
        let last = slot + 1 == slots;
        let mut next = Vec::new();
        for (prefix, ku, vu) in states {
            let (kr, vr) = (k - ku, v - vu);
            let k_range: Vec<usize> = if last { vec![kr] } else { (0..=kr).collect() };
            for ki in k_range {
                let v_range: Vec<usize> = if last { vec![vr] } else { (0..=vr).collect() };
                for vi in v_range {
                    for s in shapes(m, ki, vi, memo) {
                        let mut p = prefix.clone();
                        p.push(s);
                        next.push((p, ku + ki, vu + vi));
                    }
                }
            }
        }
        states = next;
    }
    out.clear();
    for (prefix, ku, vu) in states {
        if ku == k && vu == v {
            out.push(prefix);
        }
    }
}

fn label(shape: &Term, labels: &[usize], next: &mut usize) -> Term {
    match shape {
        Term::Leaf(_) => {
            let l = labels[*next];
            *next += 1;
            Term::Leaf(l)
        }
        Term::Node { gen, args } => Term::Node { gen: *gen, args: args.iter().map(|a| label(a, labels, next)).collect() },
    }
}

/// Elements of `T_M(arity)` with at most `max_vertices` vertices.
pub fn elements(m: &GradedSet, arity: usize, max_vertices: usize) -> Enumeration<Term> {
    let mut memo = HashMap::new();
    elements_memo(m, arity, max_vertices, &mut memo)
}

fn elements_memo(
    m: &GradedSet,
    arity: usize,
    max_vertices: usize,
    memo: &mut HashMap<(usize, usize), Vec<Term>>,
) -> Enumeration<Term> {
    let perms = permutations(arity);
    let mut items = Vec::new();
    for v in 0..=max_vertices {
        for s in shapes(m, arity, v, memo) {
            for p in &perms {
                items.push(label(&s, p, &mut 0));
            }
        }
    }
    let complete = m.max_vertices(arity).is_some_and(|mv| mv <= max_vertices);
    Enumeration { items, complete }
}

/// Precomputed elements of `T_M(n)` for `n <= max_arity` at a vertex bound.
#[derive(Clone, Debug)]
pub struct ElementTable {
    pub gens: GradedSet,
    pub max_vertices: usize,
    by_arity: Vec<Enumeration<Term>>,
}

impl ElementTable {
    pub fn new(m: &GradedSet, max_arity: usize, max_vertices: usize) -> ElementTable {
        let mut memo = HashMap::new();
        let by_arity = (0..=max_arity).map(|n| elements_memo(m, n, max_vertices, &mut memo)).collect();
        ElementTable { gens: m.clone(), max_vertices, by_arity }
    }

    pub fn max_arity(&self) -> usize {
        self.by_arity.len() - 1
    }

    pub fn get(&self, arity: usize) -> &Enumeration<Term> {
        &self.by_arity[arity]
    }
}

/// An operad map `T_N -> T_M`, given by the images of the generators of `N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeMap {
    pub images: Vec<Term>,
}

impl FreeMap {
    pub fn validate(&self, n: &GradedSet, m: &GradedSet) -> Result<()> {
        if self.images.len() != n.len() {
            return Err(Error::ArityMismatch { expected: n.len(), got: self.images.len() });
        }
        for (g, t) in n.gens.iter().zip(&self.images) {
            t.validate(m)?;
            if t.arity() != g.valence {
                return Err(Error::ArityMismatch { expected: g.valence, got: t.arity() });
            }
        }
        Ok(())
    }

    pub fn identity(n: &GradedSet) -> FreeMap {
        FreeMap { images: n.gens.iter().enumerate().map(|(i, g)| Term::generator(i, g.valence)).collect() }
    }

    /// `self ∘ first`, where `first: T_A -> T_B` and `self: T_B -> T_C`.
    pub fn after(&self, first: &FreeMap) -> Result<FreeMap> {
        let images = first.images.iter().map(|t| t.substitute(&self.images)).collect::<Result<_>>()?;
        Ok(FreeMap { images })
    }

    /// Applies the map to an element.
    pub fn apply(&self, t: &Term) -> Result<Term> {
        t.substitute(&self.images)
    }

    pub fn max_vertices(&self) -> usize {
        self.images.iter().map(Term::vertex_count).max().unwrap_or(0)
    }

    pub fn to_json(&self, n: &GradedSet, m: &GradedSet) -> Value {
        Value::Object(
            n.gens
                .iter()
                .zip(&self.images)
                .map(|(g, t)| (g.name.clone(), t.to_json(m)))
                .collect(),
        )
    }
}

/// All maps `T_N -> T_M` whose generator images have at most `max_vertices`
/// vertices.
pub fn hom_free(n: &GradedSet, m: &GradedSet, max_vertices: usize) -> Enumeration<FreeMap> {
    let table = ElementTable::new(m, n.max_valence(), max_vertices);
    hom_free_with(n, &table)
}

pub fn hom_free_with(n: &GradedSet, table: &ElementTable) -> Enumeration<FreeMap> {
    let factors: Vec<&Enumeration<Term>> = n.gens.iter().map(|g| table.get(g.valence)).collect();
    let empty_complete = factors.iter().any(|f| f.items.is_empty() && f.complete);
    let complete = empty_complete || factors.iter().all(|f| f.complete);
    let mut items = vec![Vec::new()];
    for f in &factors {
        let mut next = Vec::with_capacity(items.len() * f.items.len());
        for prefix in &items {
            for t in &f.items {
                let mut p: Vec<Term> = prefix.clone();
                p.push(t.clone());
                next.push(p);
            }
        }
        items = next;
    }
    Enumeration { items: items.into_iter().map(|images| FreeMap { images }).collect(), complete }
}

/// The element of `J(S)` read off an operation of `Ω(S)`: the subtree above
/// `root`, with leaf `ins[j]` labelled `j`.
pub fn operation_term(s: &Tree, root: usize, ins: &[usize]) -> Term {
    if let Some(j) = ins.iter().position(|&e| e == root) {
        return Term::Leaf(j);
    }
    let w = s.producer(root).expect("operation is a subtree");
    Term::Node { gen: w, args: s.vertex(w).inputs.iter().map(|&e| operation_term(s, e, ins)).collect() }
}

/// `J(f): J(R) -> J(S)`.
pub fn j_map(f: &OmegaMorphism) -> FreeMap {
    let r = &f.source;
    let images = (0..r.vertex_count())
        .map(|v| match f.vertex_image(v) {
            VertexImage::Identity(_) => Term::identity(),
            VertexImage::Subtree { root, .. } => {
                let ins: Vec<usize> = r.vertex(v).inputs.iter().map(|&e| f.edge_map[e]).collect();
                operation_term(&f.target, root, &ins)
            }
        })
        .collect();
    FreeMap { images }
}
