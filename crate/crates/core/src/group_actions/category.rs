//! Actions of finite categories on coloured operads and the category `Δ↻Ω`.
//!
//! The moment map `μ` is given on operations; on a colour `c` it is taken to
//! be `μ(id_c)`.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::group::FiniteGroup;
use super::operad::{ActionReport, Violation};
use crate::colored::{hom_co, Dendrex, FiniteColoredOperad, FiniteOperadJson, OpSig};
use crate::error::{Error, Result};
use crate::tree::Tree;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismSig {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionEntry {
    /// Applied second.
    pub after: usize,
    pub first: usize,
    pub result: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryJson {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismSig>,
    pub identities: Vec<usize>,
    #[serde(default)]
    pub composition: Vec<CompositionEntry>,
}

/// A finite category; `g ∘ f` is looked up when `s(g) = t(f)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteCategory {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismSig>,
    pub identities: Vec<usize>,
    composition: HashMap<(usize, usize), usize>,
}

impl FiniteCategory {
    pub fn from_json(json: &CategoryJson) -> Result<FiniteCategory> {
        let c = FiniteCategory {
            objects: json.objects.clone(),
            morphisms: json.morphisms.clone(),
            identities: json.identities.clone(),
            composition: json.composition.iter().map(|e| ((e.after, e.first), e.result)).collect(),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> CategoryJson {
        let mut composition: Vec<CompositionEntry> =
            self.composition.iter().map(|(&(after, first), &result)| CompositionEntry { after, first, result }).collect();
        composition.sort_by_key(|e| (e.after, e.first));
        CategoryJson { objects: self.objects.clone(), morphisms: self.morphisms.clone(), identities: self.identities.clone(), composition }
    }

    /// A group as a one-object category.
    pub fn from_group(g: &FiniteGroup) -> FiniteCategory {
        let morphisms = (0..g.order()).map(|a| MorphismSig { name: format!("g{a}"), source: 0, target: 0 }).collect();
        let composition = (0..g.order()).flat_map(|a| (0..g.order()).map(move |b| ((a, b), g.mul(a, b)))).collect();
        FiniteCategory { objects: vec!["*".into()], morphisms, identities: vec![g.identity], composition }
    }

    /// Two objects and one isomorphism `u: 0 -> 1` between them.
    pub fn two_object_groupoid() -> FiniteCategory {
        let m = |name: &str, source, target| MorphismSig { name: name.into(), source, target };
        let morphisms = vec![m("id0", 0, 0), m("id1", 1, 1), m("u", 0, 1), m("u⁻¹", 1, 0)];
        let composition = [((3, 2), 0), ((2, 3), 1)].into_iter().collect();
        FiniteCategory { objects: vec!["0".into(), "1".into()], morphisms, identities: vec![0, 1], composition }
    }

    pub fn source(&self, f: usize) -> usize {
        self.morphisms[f].source
    }

    pub fn target(&self, f: usize) -> usize {
        self.morphisms[f].target
    }

    /// `g ∘ f`, when `s(g) = t(f)`.
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        if self.source(g) != self.target(f) {
            return None;
        }
        if g == self.identities[self.target(f)] {
            return Some(f);
        }
        if f == self.identities[self.source(g)] {
            return Some(g);
        }
        self.composition.get(&(g, f)).copied()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::InvalidTable(s));
        let (no, nm) = (self.objects.len(), self.morphisms.len());
        if self.identities.len() != no {
            return bad("one identity per object is required".into());
        }
        if self.morphisms.iter().any(|m| m.source >= no || m.target >= no) {
            return Err(Error::Dangling("object of a morphism".into()));
        }
        for (o, &i) in self.identities.iter().enumerate() {
            if i >= nm || self.source(i) != o || self.target(i) != o {
                return bad(format!("identity of object {o} has the wrong signature"));
            }
        }
        for g in 0..nm {
            for f in 0..nm {
                if self.source(g) != self.target(f) {
                    continue;
                }
                let Some(h) = self.compose(g, f) else {
                    return bad(format!("composite of {} after {} is missing", self.morphisms[g].name, self.morphisms[f].name));
                };
                if h >= nm || self.source(h) != self.source(f) || self.target(h) != self.target(g) {
                    return bad(format!("composite of {} after {} has the wrong signature", self.morphisms[g].name, self.morphisms[f].name));
                }
            }
        }
        for h in 0..nm {
            for g in 0..nm {
                for f in 0..nm {
                    let (Some(hg), Some(gf)) = (self.compose(h, g), self.compose(g, f)) else { continue };
                    if self.compose(hg, f) != self.compose(h, gf) {
                        return bad(format!("associativity fails at ({h}, {g}, {f})"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_groupoid(&self) -> bool {
        (0..self.morphisms.len()).all(|f| {
            (0..self.morphisms.len()).any(|g| {
                self.compose(g, f) == Some(self.identities[self.source(f)]) && self.compose(f, g) == Some(self.identities[self.target(f)])
            })
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActEntry {
    pub f: usize,
    pub g: usize,
    pub result: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatActionJson {
    pub category: CategoryJson,
    pub operad: FiniteOperadJson,
    pub mu: Vec<usize>,
    pub act: Vec<ActEntry>,
}

/// An action `f • g` of a category on the operations of a coloured operad,
/// defined when `s(f) = μ(g)`.
#[derive(Clone, Debug)]
pub struct CatAction {
    pub category: FiniteCategory,
    pub operad: FiniteColoredOperad,
    pub mu: Vec<usize>,
    pub act: HashMap<(usize, usize), usize>,
}

impl CatAction {
    pub fn from_json(json: &CatActionJson) -> Result<CatAction> {
        let category = FiniteCategory::from_json(&json.category)?;
        let operad = FiniteColoredOperad::from_json(&json.operad)?;
        if json.mu.len() != operad.ops.len() || json.mu.iter().any(|&o| o >= category.objects.len()) {
            return Err(Error::InvalidTable("μ must send every operation to an object".into()));
        }
        Ok(CatAction { category, operad, mu: json.mu.clone(), act: json.act.iter().map(|e| ((e.f, e.g), e.result)).collect() })
    }

    pub fn to_json(&self) -> CatActionJson {
        let mut act: Vec<ActEntry> = self.act.iter().map(|(&(f, g), &result)| ActEntry { f, g, result }).collect();
        act.sort_by_key(|e| (e.f, e.g));
        CatActionJson { category: self.category.to_json(), operad: self.operad.to_json(), mu: self.mu.clone(), act }
    }

    /// `μ` on colours, through identities.
    pub fn mu_color(&self, c: usize) -> usize {
        self.mu[self.operad.identities[c]]
    }

    /// The trivial action of the one-object category on any operad with `μ`
    /// constant.
    pub fn trivial(operad: FiniteColoredOperad) -> CatAction {
        let category = FiniteCategory::from_group(&FiniteGroup::trivial());
        let act = (0..operad.ops.len()).map(|g| ((0, g), g)).collect();
        CatAction { category, mu: vec![0; operad.ops.len()], operad, act }
    }

    /// The test instance: the groupoid `0 ≅ 1` acting on a two-colour operad
    /// with an isomorphism `f: a -> b`, inverse `h`, and constants `c`, `fc`.
    pub fn groupoid_example() -> CatAction {
        let op = |name: &str, output, inputs: Vec<usize>| OpSig { name: name.into(), output, inputs };
        // 0 id_a, 1 id_b, 2 f: a -> b, 3 h: b -> a, 4 c: () -> a, 5 fc: () -> b
        let ops = vec![op("id_a", 0, vec![0]), op("id_b", 1, vec![1]), op("f", 1, vec![0]), op("h", 0, vec![1]), op("c", 0, vec![]), op("fc", 1, vec![])];
        let composition = [((2, vec![4]), 5), ((3, vec![5]), 4), ((3, vec![2]), 0), ((2, vec![3]), 1)].into_iter().collect();
        let operad = FiniteColoredOperad {
            colors: vec!["a".into(), "b".into()],
            ops,
            identities: vec![0, 1],
            composition,
            permutation: HashMap::new(),
            max_arity: usize::MAX,
        };
        let mu = vec![0, 1, 1, 0, 0, 1];
        // identities act trivially; u = 2 moves from 0 to 1, u⁻¹ = 3 back
        let mut act: HashMap<(usize, usize), usize> = HashMap::new();
        for (g, &m) in mu.iter().enumerate() {
            act.insert((m, g), g);
        }
        for (g, r) in [(0, 2), (4, 5), (3, 1)] {
            act.insert((2, g), r);
        }
        for (g, r) in [(2, 0), (5, 4), (1, 3)] {
            act.insert((3, g), r);
        }
        CatAction { category: FiniteCategory::two_object_groupoid(), operad, mu, act }
    }

    fn get(&self, f: usize, g: usize) -> Option<usize> {
        self.act.get(&(f, g)).copied()
    }

    /// Checks totality and the six action axioms exhaustively.
    pub fn validate(&self) -> ActionReport {
        let c = &self.category;
        let p = &self.operad;
        let mut v = Vec::new();
        let mut checked = 0;
        let mut push = |axiom: &str, witness: String| v.push(Violation { axiom: axiom.into(), witness });
        let name_f = |f: usize| c.morphisms[f].name.clone();
        let name_g = |g: usize| p.ops[g].name.clone();
        for f in 0..c.morphisms.len() {
            for g in 0..p.ops.len() {
                if c.source(f) != self.mu[g] {
                    continue;
                }
                checked += 1;
                let Some(fg) = self.get(f, g) else {
                    push("totality", format!("{} • {} is undefined", name_f(f), name_g(g)));
                    continue;
                };
                if self.mu[fg] != c.target(f) {
                    push("μ(f•g) = t(f)", format!("{} • {}", name_f(f), name_g(g)));
                }
                if p.ops[fg].inputs != p.ops[g].inputs {
                    push("s(f•g) = s(g)", format!("{} • {}", name_f(f), name_g(g)));
                }
                if f == c.identities[self.mu[g]] && fg != g {
                    push("id•g = g", name_g(g));
                }
                for f2 in 0..c.morphisms.len() {
                    let Some(comp) = c.compose(f2, f) else { continue };
                    checked += 1;
                    let lhs = self.get(comp, g);
                    let rhs = if self.mu[fg] == c.source(f2) { self.get(f2, fg) } else { None };
                    if lhs != rhs {
                        push("(f'∘f)•g = f'•(f•g)", format!("({} ∘ {}) • {}", name_f(f2), name_f(f), name_g(g)));
                    }
                }
                for ((g0, pick), &g2) in &p.permutation {
                    if *g0 != g {
                        continue;
                    }
                    checked += 1;
                    let lhs = p.permutation.get(&(fg, pick.clone())).copied();
                    let rhs = if self.mu[g2] == c.source(f) { self.get(f, g2) } else { None };
                    if lhs.is_none() || lhs != rhs {
                        push("σ*(f•g) = f•(σ*g)", format!("{} • {} under {:?}", name_f(f), name_g(g), pick));
                    }
                }
            }
        }
        // composites: explicit tables and the implicit unit laws
        let mut composites: Vec<(usize, Vec<usize>, usize)> =
            p.composition.iter().map(|((g, args), &r)| (*g, args.clone(), r)).collect();
        for g in 0..p.ops.len() {
            let ids: Vec<usize> = p.ops[g].inputs.iter().map(|&c| p.identities[c]).collect();
            composites.push((g, ids, g));
        }
        for (g, args, r) in composites {
            checked += 1;
            if self.mu[r] != self.mu[g] {
                push("μ(γ(g; g_1, …, g_k)) = μ(g)", format!("γ({}; {:?})", name_g(g), args.iter().map(|&a| name_g(a)).collect::<Vec<_>>()));
            }
        }
        ActionReport::from(checked, v)
    }
}

/// `[n ↻ R]`, with `R = None` for the empty marker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DOObject {
    pub n: usize,
    pub tree: Option<Tree>,
}

/// An element of `Hom([n ↻ R], (C ↻ P))`: a functor `[n] -> C` given by its
/// start object and `n` composable morphisms, and a map `Ω(R) -> P`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DOElement {
    pub start: usize,
    pub chain: Vec<usize>,
    pub beta: Option<Dendrex<usize>>,
}

fn chains_from(c: &FiniteCategory, start: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut ends = vec![start];
    for _ in 0..n {
        let mut next = Vec::new();
        let mut next_ends = Vec::new();
        for (chain, &end) in out.iter().zip(&ends) {
            for f in 0..c.morphisms.len() {
                if c.source(f) == end {
                    let mut ch = chain.clone();
                    ch.push(f);
                    next.push(ch);
                    next_ends.push(c.target(f));
                }
            }
        }
        out = next;
        ends = next_ends;
    }
    out
}

/// All pairs `(α, β)` with `α(0) = μ(β(r))` for the root edge `r`.
pub fn do_hom(obj: &DOObject, a: &CatAction) -> Vec<DOElement> {
    let c = &a.category;
    match &obj.tree {
        None => (0..c.objects.len())
            .flat_map(|s| chains_from(c, s, obj.n).into_iter().map(move |chain| DOElement { start: s, chain, beta: None }))
            .collect(),
        Some(r) => hom_co(&a.operad, r)
            .into_iter()
            .flat_map(|beta| {
                let s = a.mu_color(beta.colors[r.root()]);
                chains_from(c, s, obj.n).into_iter().map(move |chain| DOElement { start: s, chain, beta: Some(beta.clone()) })
            })
            .collect(),
    }
}

/// Maps `Ω(R) -> P` by brute force over operation assignments.
fn operad_maps_oracle(p: &FiniteColoredOperad, r: &Tree) -> Vec<Vec<usize>> {
    if r.vertex_count() == 0 {
        return (0..p.colors.len()).map(|c| vec![c]).collect();
    }
    let k = r.vertex_count();
    let n = p.ops.len();
    let mut out = Vec::new();
    let mut assign = vec![0; k];
    'outer: loop {
        let ok = r.vertices().iter().enumerate().all(|(v, vert)| {
            let sig = &p.ops[assign[v]];
            sig.inputs.len() == vert.inputs.len()
                && vert.inputs.iter().zip(&sig.inputs).all(|(&e, &col)| r.producer(e).is_none_or(|w| p.ops[assign[w]].output == col))
        });
        if ok {
            out.push(assign.clone());
        }
        for slot in assign.iter_mut() {
            *slot += 1;
            if *slot < n {
                continue 'outer;
            }
            *slot = 0;
        }
        break;
    }
    out
}

/// `|Hom([n ↻ R], (C ↻ P))|` by a double loop over all morphism tuples and
/// all operation assignments, independent of `do_hom`.
pub fn do_hom_oracle(obj: &DOObject, a: &CatAction) -> usize {
    let c = &a.category;
    let nm = c.morphisms.len();
    let mut alphas: Vec<usize> = Vec::new(); // start objects of valid functors
    if obj.n == 0 {
        alphas.extend(0..c.objects.len());
    } else {
        let total = nm.pow(obj.n as u32);
        for mut code in 0..total {
            let fs: Vec<usize> = (0..obj.n)
                .map(|_| {
                    let f = code % nm;
                    code /= nm;
                    f
                })
                .collect();
            if fs.windows(2).all(|w| c.target(w[0]) == c.source(w[1])) {
                alphas.push(c.source(fs[0]));
            }
        }
    }
    let Some(r) = &obj.tree else { return alphas.len() };
    let root_objects: Vec<usize> = operad_maps_oracle(&a.operad, r)
        .into_iter()
        .map(|assign| {
            let color = if r.vertex_count() == 0 { assign[0] } else { a.operad.ops[assign[r.producer(r.root()).expect("root vertex")]].output };
            a.mu_color(color)
        })
        .collect();
    let mut count = 0;
    for &s in &alphas {
        for &o in &root_objects {
            if s == o {
                count += 1;
            }
        }
    }
    count
}

/// The covering family of `[n ↻ R]`: `γ^k` for `k < n` (`0 ↦ 0`, `1 ↦ k+1`)
/// and `ζ^v` for every vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoreFamily {
    pub gammas: Vec<(usize, usize)>,
    pub zetas: Vec<String>,
}

pub fn do_segal_core(obj: &DOObject) -> CoreFamily {
    CoreFamily {
        gammas: (0..obj.n).map(|k| (0, k + 1)).collect(),
        zetas: obj.tree.as_ref().map(|t| t.vertices().iter().map(|v| v.name.clone()).collect()).unwrap_or_default(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoreCheck {
    pub elements: usize,
    pub compatible: usize,
    pub injective: bool,
    pub surjective: bool,
    /// The family is empty (`n = 0` and no vertices).
    pub empty_core: bool,
}

/// Compares `Hom([n ↻ R], (C ↻ P))` with the compatible families of core
/// restrictions: a morphism `α(0) -> α(k+1)` for each `γ^k`, an operation
/// for each vertex, matching colours on inner edges, and the root operation
/// lying over `α(0)`.
pub fn check_core(obj: &DOObject, a: &CatAction) -> CoreCheck {
    let c = &a.category;
    let p = &a.operad;
    let elements = do_hom(obj, a);
    let has_vertices = obj.tree.as_ref().is_some_and(|t| t.vertex_count() > 0);
    if obj.n == 0 && !has_vertices {
        return CoreCheck { elements: elements.len(), compatible: 0, injective: false, surjective: false, empty_core: true };
    }
    type Tuple = (Vec<usize>, Vec<usize>);
    let restrict = |e: &DOElement| -> Tuple {
        let mut acc = None;
        let ms = e
            .chain
            .iter()
            .map(|&f| {
                let m = match acc {
                    None => f,
                    Some(prev) => c.compose(f, prev).expect("chains compose"),
                };
                acc = Some(m);
                m
            })
            .collect();
        let ops = if has_vertices { e.beta.as_ref().map(|b| b.ops.clone()).unwrap_or_default() } else { Vec::new() };
        (ms, ops)
    };
    let images: Vec<Tuple> = elements.iter().map(restrict).collect();
    let distinct: HashSet<&Tuple> = images.iter().collect();
    let injective = distinct.len() == images.len();

    let op_families: Vec<Vec<usize>> = match &obj.tree {
        Some(r) if has_vertices => operad_maps_oracle(p, r),
        _ => vec![Vec::new()],
    };
    let mut compatible: HashSet<Tuple> = HashSet::new();
    let starts: Vec<usize> = (0..c.objects.len()).collect();
    for ops in &op_families {
        let root_obj = obj.tree.as_ref().filter(|_| has_vertices).map(|r| a.mu_color(p.ops[ops[r.producer(r.root()).expect("root vertex")]].output));
        for &s in &starts {
            if root_obj.is_some_and(|o| o != s) {
                continue;
            }
            let from_s: Vec<usize> = (0..c.morphisms.len()).filter(|&f| c.source(f) == s).collect();
            let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
            for _ in 0..obj.n {
                tuples = tuples.into_iter().flat_map(|t| from_s.iter().map(move |&f| [t.clone(), vec![f]].concat())).collect();
            }
            if obj.n == 0 && root_obj.is_none() {
                continue;
            }
            for t in tuples {
                compatible.insert((t, ops.clone()));
            }
            if obj.n == 0 {
                break;
            }
        }
    }
    let image_set: HashSet<Tuple> = images.into_iter().collect();
    CoreCheck {
        elements: elements.len(),
        compatible: compatible.len(),
        injective,
        surjective: compatible.is_subset(&image_set),
        empty_core: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn categories() {
        let g = FiniteCategory::two_object_groupoid();
        assert!(g.validate().is_ok());
        assert!(g.is_groupoid());
        let json = g.to_json();
        assert_eq!(FiniteCategory::from_json(&json).unwrap(), g);
        assert!(FiniteCategory::from_group(&FiniteGroup::symmetric(3)).validate().is_ok());
    }

    #[test]
    fn example_action_is_valid() {
        let a = CatAction::groupoid_example();
        assert!(a.operad.validate().is_ok());
        let r = a.validate();
        assert!(r.pass, "{:?}", r.violations);
        let back = CatAction::from_json(&a.to_json()).unwrap();
        assert!(back.validate().pass);
    }

    #[test]
    fn broken_moment_map_is_caught() {
        let mut a = CatAction::groupoid_example();
        a.mu[5] = 0;
        let r = a.validate();
        assert!(r.violations.iter().any(|v| v.axiom.starts_with("μ(γ")));
    }

    #[test]
    fn do_hom_small_objects() {
        let a = CatAction::groupoid_example();
        let obj = |n, tree| DOObject { n, tree };
        assert_eq!(do_hom(&obj(0, None), &a).len(), 2);
        assert_eq!(do_hom(&obj(1, None), &a).len(), 4);
        assert_eq!(do_hom(&obj(0, Some(Tree::eta())), &a).len(), 2);
        for n in 0..=2 {
            for t in [None, Some(Tree::eta()), Some(Tree::linear(1)), Some(Tree::linear(2)), Some(Tree::corolla(0))] {
                let o = obj(n, t);
                assert_eq!(do_hom(&o, &a).len(), do_hom_oracle(&o, &a));
            }
        }
    }

    #[test]
    fn core_family() {
        let f = do_segal_core(&DOObject { n: 3, tree: None });
        assert_eq!(f.gammas, vec![(0, 1), (0, 2), (0, 3)]);
        let f = do_segal_core(&DOObject { n: 0, tree: Some(Tree::corolla(2)) });
        assert_eq!((f.gammas.len(), f.zetas.len()), (0, 1));
    }

    #[test]
    fn core_check_on_groupoid_example() {
        let a = CatAction::groupoid_example();
        for n in 0..=3 {
            for t in [None, Some(Tree::linear(1)), Some(Tree::linear(2)), Some(Tree::corolla(0))] {
                let r = check_core(&DOObject { n, tree: t.clone() }, &a);
                if !r.empty_core {
                    assert!(r.injective && r.surjective, "{n} {t:?} {r:?}");
                }
            }
        }
    }
}
