//! Morphisms of the tree category.
//!
//! Colours of a tree operad are its edges and all of them are distinct, so a
//! map `Ω(R) -> Ω(S)` is determined by where it sends edges. Each vertex of
//! `R` goes either to an identity (a unary vertex whose two edges land on the
//! same edge) or to the unique subtree of `S` with the prescribed root and
//! leaves.

use std::collections::HashSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::tree::{permutations, Tree};

/// Where a vertex of the source goes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum VertexImage {
    /// The identity on a colour of the target.
    Identity(usize),
    /// A subtree of the target: its root edge and its vertices.
    Subtree { root: usize, vertices: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OmegaMorphism {
    pub source: Arc<Tree>,
    pub target: Arc<Tree>,
    pub edge_map: Vec<usize>,
}

/// The operation of `s` with output colour `out` and inputs `ins`, if any.
pub fn operation(s: &Tree, out: usize, ins: &[usize]) -> Option<VertexImage> {
    if ins.len() == 1 && ins[0] == out {
        return Some(VertexImage::Identity(out));
    }
    let wanted: HashSet<usize> = ins.iter().copied().collect();
    if wanted.len() != ins.len() {
        return None;
    }
    let mut vertices = Vec::new();
    let mut hit = 0;
    let mut stack = vec![out];
    while let Some(e) = stack.pop() {
        if wanted.contains(&e) {
            if e == out {
                return None;
            }
            hit += 1;
            continue;
        }
        let v = s.producer(e)?;
        vertices.push(v);
        stack.extend(s.vertex(v).inputs.iter().copied());
    }
    (hit == ins.len()).then_some(VertexImage::Subtree { root: out, vertices })
}

/// Checks that `edge_map` defines a morphism `r -> s`.
pub fn is_morphism(r: &Tree, s: &Tree, edge_map: &[usize]) -> bool {
    edge_map.len() == r.edge_count()
        && edge_map.iter().all(|&e| e < s.edge_count())
        && r.vertices().iter().all(|v| {
            let ins: Vec<usize> = v.inputs.iter().map(|&e| edge_map[e]).collect();
            operation(s, edge_map[v.output], &ins).is_some()
        })
}

/// Leaf lists of all subtrees of `s` with at least one vertex, per root edge.
fn subtree_leaves(s: &Tree) -> Vec<Vec<Vec<usize>>> {
    let mut out = vec![Vec::new(); s.edge_count()];
    for (sub, emb) in s.subtrees() {
        if sub.vertex_count() > 0 {
            let leaves = sub.leaves().into_iter().map(|e| emb[e]).collect();
            out[emb[sub.root()]].push(leaves);
        }
    }
    out
}

/// Edge maps of all morphisms `r -> s`, in a deterministic order.
pub fn hom_edge_maps(r: &Tree, s: &Tree) -> Vec<Vec<usize>> {
    let subs = subtree_leaves(s);
    let order = r.preorder_vertices();
    let mut out = Vec::new();
    let mut map = vec![usize::MAX; r.edge_count()];
    for e in 0..s.edge_count() {
        map[r.root()] = e;
        extend(r, &order, 0, &subs, &mut map, &mut out);
    }
    out
}

fn extend(
    r: &Tree,
    order: &[usize],
    i: usize,
    subs: &[Vec<Vec<usize>>],
    map: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let Some(&v) = order.get(i) else {
        out.push(map.clone());
        return;
    };
    let vert = r.vertex(v);
    let target = map[vert.output];
    if vert.inputs.len() == 1 {
        map[vert.inputs[0]] = target;
        extend(r, order, i + 1, subs, map, out);
    }
    for leaves in &subs[target] {
        if leaves.len() != vert.inputs.len() {
            continue;
        }
        for perm in permutations(leaves.len()) {
            for (j, &e) in vert.inputs.iter().enumerate() {
                map[e] = leaves[perm[j]];
            }
            extend(r, order, i + 1, subs, map, out);
        }
    }
}

/// All morphisms `r -> s`.
pub fn hom_omega(r: &Tree, s: &Tree) -> Vec<OmegaMorphism> {
    let (r, s) = (Arc::new(r.clone()), Arc::new(s.clone()));
    hom_edge_maps(&r, &s)
        .into_iter()
        .map(|edge_map| OmegaMorphism { source: r.clone(), target: s.clone(), edge_map })
        .collect()
}

/// Composite `g ∘ f` of raw edge maps.
pub fn compose_maps(g: &[usize], f: &[usize]) -> Vec<usize> {
    f.iter().map(|&e| g[e]).collect()
}

/// Inverse of a bijective edge map.
pub fn invert_map(f: &[usize]) -> Option<Vec<usize>> {
    let mut inv = vec![usize::MAX; f.len()];
    for (i, &e) in f.iter().enumerate() {
        if e >= f.len() || inv[e] != usize::MAX {
            return None;
        }
        inv[e] = i;
    }
    Some(inv)
}

impl OmegaMorphism {
    pub fn new(source: Arc<Tree>, target: Arc<Tree>, edge_map: Vec<usize>) -> Result<OmegaMorphism> {
        if !is_morphism(&source, &target, &edge_map) {
            return Err(Error::NotAMorphism(format!("{edge_map:?}")));
        }
        Ok(OmegaMorphism { source, target, edge_map })
    }

    pub fn identity(t: Arc<Tree>) -> OmegaMorphism {
        let edge_map = (0..t.edge_count()).collect();
        OmegaMorphism { source: t.clone(), target: t, edge_map }
    }

    pub fn vertex_image(&self, v: usize) -> VertexImage {
        let vert = self.source.vertex(v);
        let ins: Vec<usize> = vert.inputs.iter().map(|&e| self.edge_map[e]).collect();
        operation(&self.target, self.edge_map[vert.output], &ins).expect("valid morphism")
    }

    /// `self ∘ f`.
    pub fn after(&self, f: &OmegaMorphism) -> Result<OmegaMorphism> {
        if f.target != self.source {
            return Err(Error::NotComposable);
        }
        Ok(OmegaMorphism {
            source: f.source.clone(),
            target: self.target.clone(),
            edge_map: compose_maps(&self.edge_map, &f.edge_map),
        })
    }

    pub fn is_injective(&self) -> bool {
        let set: HashSet<_> = self.edge_map.iter().collect();
        set.len() == self.edge_map.len()
    }

    pub fn is_iso(&self) -> bool {
        self.source.edge_count() == self.target.edge_count()
            && self.source.vertex_count() == self.target.vertex_count()
            && self.is_injective()
    }

    /// Factors the morphism into elementary steps.
    pub fn factor(&self) -> Factorization {
        factor(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    Degeneracy,
    InnerFace,
    Isomorphism,
    OuterFace,
}

#[derive(Clone, Debug)]
pub struct Factorization {
    pub steps: Vec<(StepKind, OmegaMorphism)>,
}

impl Factorization {
    /// Composite of all steps; `None` for an empty chain.
    pub fn composite(&self) -> Option<OmegaMorphism> {
        let mut it = self.steps.iter().map(|(_, m)| m.clone());
        let first = it.next()?;
        Some(it.fold(first, |acc, m| m.after(&acc).expect("steps are composable")))
    }
}

/// Decomposes `f` as codegeneracies, then inner cofaces, then an isomorphism,
/// then outer cofaces. Each step is elementary.
pub fn factor(f: &OmegaMorphism) -> Factorization {
    let mut steps = Vec::new();

    // collapse every vertex sent to an identity
    let mut cur = f.source.clone();
    let mut to_cur: Vec<usize> = (0..cur.edge_count()).collect();
    loop {
        let pos = cur.vertices().iter().position(|v| {
            let orig = |e: usize| to_cur.iter().position(|&x| x == e).map(|i| f.edge_map[i]);
            v.inputs.len() == 1 && orig(v.inputs[0]) == orig(v.output)
        });
        let Some(v) = pos else { break };
        let (next, map) = cur.codegeneracy(v).expect("unary vertex");
        let next = Arc::new(next);
        steps.push((StepKind::Degeneracy, OmegaMorphism { source: cur.clone(), target: next.clone(), edge_map: map.clone() }));
        to_cur = compose_maps(&map, &to_cur);
        cur = next;
    }
    // f restricted to the collapsed tree is injective on edges
    let mut g = vec![usize::MAX; cur.edge_count()];
    for (e, &c) in to_cur.iter().enumerate() {
        g[c] = f.edge_map[e];
    }
    let s = &f.target;

    // image subtree of s
    let image_vertices: Vec<usize> = (0..cur.vertex_count())
        .flat_map(|v| {
            let vert = cur.vertex(v);
            let ins: Vec<usize> = vert.inputs.iter().map(|&e| g[e]).collect();
            match operation(s, g[vert.output], &ins).expect("valid morphism") {
                VertexImage::Subtree { vertices, .. } => vertices,
                VertexImage::Identity(_) => unreachable!("identities were collapsed"),
            }
        })
        .collect();
    let (image, emb) = s.subtree(g[cur.root()], &image_vertices).expect("image is a subtree");

    // the image renamed so that edges hit by g carry the collapsed tree's names
    let mut names: Vec<String> = Vec::with_capacity(image.edge_count());
    let taken: HashSet<&str> = cur.edge_names().iter().map(String::as_str).collect();
    let mut fresh = 0;
    let mut new_edges = Vec::new();
    for (i, &e) in emb.iter().enumerate() {
        match g.iter().position(|&x| x == e) {
            Some(c) => names.push(cur.edge_name(c).to_string()),
            None => {
                let mut n = format!("i{fresh}");
                while taken.contains(n.as_str()) {
                    fresh += 1;
                    n = format!("i{fresh}");
                }
                fresh += 1;
                names.push(n);
                new_edges.push(i);
            }
        }
    }
    let full = Arc::new(
        Tree::from_parts(names, image.vertices().to_vec(), image.root()).expect("renamed image"),
    );

    // inner cofaces: contract the new edges one at a time, then reverse
    let mut chain = vec![full.clone()];
    let mut t = full.clone();
    for name in new_edges.iter().map(|&i| full.edge_name(i).to_string()) {
        let e = t.edge_index(&name).expect("edge present");
        t = Arc::new(t.contract_edge(e).expect("new edges are inner"));
        chain.push(t.clone());
    }
    chain.reverse();
    let by_name = |a: &Tree, b: &Tree| -> Vec<usize> {
        a.edge_names().iter().map(|n| b.edge_index(n).expect("edge kept")).collect()
    };
    let bottom = chain[0].clone();
    let to_bottom = by_name(&cur, &bottom);
    // renaming cur as the bottom of the chain, folded into the next step
    let pre = (to_bottom != (0..cur.edge_count()).collect::<Vec<_>>() || *bottom != *cur)
        .then(|| OmegaMorphism { source: cur.clone(), target: bottom.clone(), edge_map: to_bottom });
    let mut inner: Vec<OmegaMorphism> = chain
        .windows(2)
        .map(|w| OmegaMorphism { source: w[0].clone(), target: w[1].clone(), edge_map: by_name(&w[0], &w[1]) })
        .collect();

    // identify the renamed image with the actual subtree of s
    let image = Arc::new(image);
    let mut mid = OmegaMorphism { source: full.clone(), target: image.clone(), edge_map: (0..full.edge_count()).collect() };
    if let Some(p) = pre {
        match inner.first_mut() {
            Some(first) => *first = first.after(&p).expect("composable"),
            None => mid = mid.after(&p).expect("composable"),
        }
    }

    // outer cofaces: grow the image one vertex at a time
    let mut inside: Vec<usize> = image_vertices.clone();
    let mut outer: Vec<OmegaMorphism> = Vec::new();
    let mut cur_tree = image;
    let mut cur_emb = emb;
    while cur_tree.vertex_count() < s.vertex_count() {
        let root = s.edge_index(cur_tree.edge_name(cur_tree.root())).expect("edge of s");
        let grow_down = s.consumer(root).map(|(w, _)| w);
        let grow_up = cur_tree.leaves().into_iter().find_map(|l| s.producer(cur_emb[l]));
        let (new_root, added) = match grow_up {
            Some(u) => (root, u),
            None => {
                let w = grow_down.expect("s is connected");
                (s.vertex(w).output, w)
            }
        };
        inside.push(added);
        let (next, next_emb) = s.subtree(new_root, &inside).expect("connected");
        let next = Arc::new(next);
        let map = cur_emb.iter().map(|e| next_emb.iter().position(|x| x == e).expect("contained")).collect();
        outer.push(OmegaMorphism { source: cur_tree.clone(), target: next.clone(), edge_map: map });
        cur_tree = next;
        cur_emb = next_emb;
    }
    let final_map: Vec<usize> = cur_emb.clone();
    if final_map != (0..s.edge_count()).collect::<Vec<_>>() || *cur_tree != **s {
        let post = OmegaMorphism { source: cur_tree.clone(), target: s.clone(), edge_map: final_map };
        match outer.last_mut() {
            Some(last) => *last = post.after(last).expect("composable"),
            None => mid = post.after(&mid).expect("composable"),
        }
    }
    // a pure renaming is absorbed by a neighbouring face
    let renaming = mid.edge_map == (0..mid.source.edge_count()).collect::<Vec<_>>();
    let mut keep_mid = !renaming || *mid.source != *mid.target;
    if renaming {
        if let Some(last) = inner.last_mut() {
            *last = mid.after(last).expect("composable");
            keep_mid = false;
        } else if let Some(first) = outer.first_mut() {
            *first = first.after(&mid).expect("composable");
            keep_mid = false;
        }
    }
    steps.extend(inner.into_iter().map(|m| (StepKind::InnerFace, m)));
    if keep_mid {
        steps.push((StepKind::Isomorphism, mid));
    }
    steps.extend(outer.into_iter().map(|m| (StepKind::OuterFace, m)));
    Factorization { steps }
}

/// Number of monotone maps `{0..m} -> {0..n}`.
pub fn monotone_count(m: usize, n: usize) -> usize {
    // C(n + m + 1, m + 1)
    let (top, k) = (n + m + 1, m + 1);
    (0..k).fold(1usize, |acc, i| acc * (top - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_hom_counts() {
        assert_eq!(hom_omega(&Tree::linear(1), &Tree::linear(1)).len(), 3);
        assert_eq!(hom_omega(&Tree::linear(1), &Tree::linear(2)).len(), 6);
        for n in 0..5 {
            assert_eq!(hom_omega(&Tree::eta(), &Tree::corolla(n)).len(), n + 1);
        }
        assert_eq!(hom_omega(&Tree::corolla(2), &Tree::corolla(2)).len(), 2);
        assert!(hom_omega(&Tree::corolla(2), &Tree::linear(3)).is_empty());
        assert_eq!(hom_omega(&Tree::corolla(0), &Tree::eta()).len(), 0);
    }

    #[test]
    fn monotone_formula() {
        assert_eq!(monotone_count(0, 0), 1);
        assert_eq!(monotone_count(1, 1), 3);
        assert_eq!(monotone_count(1, 2), 6);
    }

    #[test]
    fn vertex_images() {
        let s = Tree::from_named("r", &[("a", "r", vec!["x", "l"]), ("b", "x", vec!["p", "q"])]).unwrap();
        let r = Arc::new(Tree::corolla(3));
        let s = Arc::new(s);
        let homs = hom_edge_maps(&r, &s);
        // the whole of s, with its three leaves in any order
        assert_eq!(homs.len(), 6);
        let f = OmegaMorphism::new(r, s, homs[0].clone()).unwrap();
        assert!(matches!(f.vertex_image(0), VertexImage::Subtree { ref vertices, .. } if vertices.len() == 2));
    }

    #[test]
    fn composition_and_identity() {
        let a = Arc::new(Tree::linear(1));
        let b = Arc::new(Tree::linear(2));
        for f in hom_edge_maps(&a, &b) {
            let f = OmegaMorphism::new(a.clone(), b.clone(), f).unwrap();
            assert_eq!(OmegaMorphism::identity(b.clone()).after(&f).unwrap(), f);
            assert_eq!(f.after(&OmegaMorphism::identity(a.clone())).unwrap(), f);
        }
        let f = OmegaMorphism::identity(a.clone());
        assert_eq!(f.after(&OmegaMorphism::identity(b)), Err(Error::NotComposable));
        assert!(OmegaMorphism::new(a.clone(), a, vec![1, 0]).is_err());
    }

    #[test]
    fn factorization_recomposes() {
        let s = Arc::new(Tree::from_named("r", &[("a", "r", vec!["x", "l"]), ("b", "x", vec!["p", "q"])]).unwrap());
        let r = Arc::new(Tree::linear(2));
        for m in hom_edge_maps(&r, &s) {
            let f = OmegaMorphism::new(r.clone(), s.clone(), m).unwrap();
            let fac = f.factor();
            assert_eq!(fac.composite().unwrap().edge_map, f.edge_map);
        }
    }
}
