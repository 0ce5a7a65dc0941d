//! Finite rooted non-planar trees.
//!
//! A [`Tree`] stores its edges and vertices with opaque names. Each vertex
//! keeps its incoming edges in a list; that order is a planar structure used
//! only as scaffolding (for labelling vertices by free-operad elements). Two
//! trees are the same object of the tree category exactly when their
//! [`CanonicalCode`]s agree.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub name: String,
    pub output: usize,
    pub inputs: Vec<usize>,
}

impl Vertex {
    pub fn valence(&self) -> usize {
        self.inputs.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tree {
    edges: Vec<String>,
    vertices: Vec<Vertex>,
    root: usize,
    producer: Vec<Option<usize>>,
    consumer: Vec<Option<(usize, usize)>>,
}

/// Isomorphism-invariant encoding of a tree: a leaf is `|`, a vertex is its
/// sorted child codes in parentheses.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalCode(pub String);

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// For each vertex, an ordering of its incoming edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanarStructure {
    pub orders: Vec<Vec<usize>>,
}

/// How to split a vertex into two: the inputs at positions `upper` move to a
/// new upper vertex whose output edge is grafted into the lower vertex at
/// `position` among the remaining inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub upper: Vec<usize>,
    pub position: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: String,
    pub out: String,
    #[serde(rename = "in")]
    pub inputs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeJson {
    pub root: String,
    pub vertices: Vec<VertexJson>,
}

impl Tree {
    pub fn from_parts(edges: Vec<String>, vertices: Vec<Vertex>, root: usize) -> Result<Tree> {
        let n = edges.len();
        if n == 0 {
            return Err(Error::InvalidTree("a tree needs at least one edge".into()));
        }
        if root >= n {
            return Err(Error::InvalidTree(format!("root index {root} out of range")));
        }
        let mut seen = HashSet::new();
        for e in &edges {
            if !seen.insert(e.as_str()) {
                return Err(Error::InvalidTree(format!("duplicate edge name `{e}`")));
            }
        }
        let mut seen = HashSet::new();
        for v in &vertices {
            if !seen.insert(v.name.as_str()) {
                return Err(Error::InvalidTree(format!("duplicate vertex name `{}`", v.name)));
            }
        }
        let mut producer = vec![None; n];
        let mut consumer = vec![None; n];
        for (vi, v) in vertices.iter().enumerate() {
            if v.output >= n || v.inputs.iter().any(|&e| e >= n) {
                return Err(Error::InvalidTree(format!("vertex `{}` has an edge out of range", v.name)));
            }
            if producer[v.output].replace(vi).is_some() {
                return Err(Error::InvalidTree(format!(
                    "edge `{}` is the output of two vertices",
                    edges[v.output]
                )));
            }
            for (pos, &e) in v.inputs.iter().enumerate() {
                if consumer[e].replace((vi, pos)).is_some() {
                    return Err(Error::InvalidTree(format!("edge `{}` is an input twice", edges[e])));
                }
            }
        }
        if consumer[root].is_some() {
            return Err(Error::InvalidTree("the root edge is an input of a vertex".into()));
        }
        for e in 0..n {
            if e != root && consumer[e].is_none() {
                return Err(Error::InvalidTree(format!(
                    "edge `{}` is neither the root nor an input",
                    edges[e]
                )));
            }
        }
        let tree = Tree { edges, vertices, root, producer, consumer };
        // every edge and vertex must be reached exactly once going up from the root
        let mut seen_e = vec![false; n];
        let mut seen_v = vec![false; tree.vertices.len()];
        let mut stack = vec![root];
        while let Some(e) = stack.pop() {
            if std::mem::replace(&mut seen_e[e], true) {
                return Err(Error::InvalidTree("the graph has a cycle".into()));
            }
            if let Some(v) = tree.producer[e] {
                if std::mem::replace(&mut seen_v[v], true) {
                    return Err(Error::InvalidTree("the graph has a cycle".into()));
                }
                stack.extend(tree.vertices[v].inputs.iter().copied());
            }
        }
        if seen_e.iter().any(|s| !s) || seen_v.iter().any(|s| !s) {
            return Err(Error::InvalidTree("the graph is not connected".into()));
        }
        Ok(tree)
    }

    /// Builds a tree from edge names. Edges are the root plus everything a
    /// vertex mentions, in order of first appearance.
    pub fn from_named<S: AsRef<str>>(root: &str, vertices: &[(S, S, Vec<S>)]) -> Result<Tree> {
        let mut edges: Vec<String> = vec![root.to_string()];
        let mut index: HashMap<String, usize> = HashMap::from([(root.to_string(), 0)]);
        let mut intern = |name: &str, edges: &mut Vec<String>| -> usize {
            if let Some(&i) = index.get(name) {
                return i;
            }
            edges.push(name.to_string());
            index.insert(name.to_string(), edges.len() - 1);
            edges.len() - 1
        };
        let mut vs = Vec::with_capacity(vertices.len());
        for (name, out, ins) in vertices {
            let output = intern(out.as_ref(), &mut edges);
            let inputs = ins.iter().map(|e| intern(e.as_ref(), &mut edges)).collect();
            vs.push(Vertex { name: name.as_ref().to_string(), output, inputs });
        }
        Tree::from_parts(edges, vs, 0)
    }

    pub fn from_json(json: &TreeJson) -> Result<Tree> {
        let vs: Vec<(&str, &str, Vec<&str>)> = json
            .vertices
            .iter()
            .map(|v| (v.id.as_str(), v.out.as_str(), v.inputs.iter().map(String::as_str).collect()))
            .collect();
        Tree::from_named(&json.root, &vs)
    }

    pub fn to_json(&self) -> TreeJson {
        TreeJson {
            root: self.edges[self.root].clone(),
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexJson {
                    id: v.name.clone(),
                    out: self.edges[v.output].clone(),
                    inputs: v.inputs.iter().map(|&e| self.edges[e].clone()).collect(),
                })
                .collect(),
        }
    }

    /// The corolla with `n` leaves.
    pub fn corolla(n: usize) -> Tree {
        let edges = (0..=n).map(|i| format!("e{i}")).collect();
        let v = Vertex { name: "v0".into(), output: 0, inputs: (1..=n).collect() };
        Tree::from_parts(edges, vec![v], 0).expect("corolla is a tree")
    }

    /// The linear tree with `n` unary vertices; `linear(0)` is the unit tree.
    pub fn linear(n: usize) -> Tree {
        let edges = (0..=n).map(|i| format!("e{i}")).collect();
        let vs = (0..n)
            .map(|i| Vertex { name: format!("v{i}"), output: i, inputs: vec![i + 1] })
            .collect();
        Tree::from_parts(edges, vs, 0).expect("linear tree is a tree")
    }

    pub fn eta() -> Tree {
        Tree::linear(0)
    }

    /// Some tree whose vertex valences are exactly `valences`, if one exists.
    pub fn with_valences(valences: &[usize]) -> Option<Tree> {
        if valences.is_empty() {
            return Some(Tree::eta());
        }
        let mut order: Vec<usize> = (0..valences.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(valences[i]));
        let mut edges = vec!["e0".to_string()];
        let mut vertices = Vec::new();
        let mut open: Vec<usize> = vec![0];
        for &i in &order {
            let output = if vertices.is_empty() { 0 } else { open.pop()? };
            let mut inputs = Vec::new();
            for _ in 0..valences[i] {
                edges.push(format!("e{}", edges.len()));
                inputs.push(edges.len() - 1);
            }
            open.extend(inputs.iter().rev());
            vertices.push(Vertex { name: format!("v{}", vertices.len()), output, inputs });
            if vertices.len() == 1 {
                open.retain(|&e| e != 0);
            }
        }
        Tree::from_parts(edges, vertices, 0).ok()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn edge_name(&self, e: usize) -> &str {
        &self.edges[e]
    }

    pub fn edge_names(&self) -> &[String] {
        &self.edges
    }

    pub fn edge_index(&self, name: &str) -> Option<usize> {
        self.edges.iter().position(|e| e == name)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn valence(&self, v: usize) -> usize {
        self.vertices[v].inputs.len()
    }

    pub fn valences(&self) -> Vec<usize> {
        self.vertices.iter().map(Vertex::valence).collect()
    }

    pub fn producer(&self, e: usize) -> Option<usize> {
        self.producer[e]
    }

    pub fn consumer(&self, e: usize) -> Option<(usize, usize)> {
        self.consumer[e]
    }

    pub fn is_leaf(&self, e: usize) -> bool {
        self.producer[e].is_none() && (e != self.root || self.vertices.is_empty())
    }

    pub fn is_inner(&self, e: usize) -> bool {
        self.producer[e].is_some() && self.consumer[e].is_some()
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.producer[e].is_none()).collect()
    }

    pub fn is_linear(&self) -> bool {
        self.vertices.iter().all(|v| v.inputs.len() == 1)
    }

    /// Vertices ordered so that each vertex comes before the vertices above it.
    pub fn preorder_vertices(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.vertices.len());
        let mut stack = vec![self.root];
        while let Some(e) = stack.pop() {
            if let Some(v) = self.producer[e] {
                out.push(v);
                stack.extend(self.vertices[v].inputs.iter().rev());
            }
        }
        out
    }

    pub fn planar_structure(&self) -> PlanarStructure {
        PlanarStructure { orders: self.vertices.iter().map(|v| v.inputs.clone()).collect() }
    }

    /// The same tree with inputs reordered according to `p`.
    pub fn with_planar(&self, p: &PlanarStructure) -> Result<Tree> {
        if p.orders.len() != self.vertices.len() {
            return Err(Error::InvalidTree("planar structure has the wrong number of vertices".into()));
        }
        let mut t = self.clone();
        for (v, order) in p.orders.iter().enumerate() {
            let a: BTreeSet<_> = order.iter().collect();
            let b: BTreeSet<_> = self.vertices[v].inputs.iter().collect();
            if a != b || order.len() != self.vertices[v].inputs.len() {
                return Err(Error::InvalidTree(format!(
                    "order for vertex `{}` is not a permutation of its inputs",
                    self.vertices[v].name
                )));
            }
            t.vertices[v].inputs = order.clone();
            for (pos, &e) in order.iter().enumerate() {
                t.consumer[e] = Some((v, pos));
            }
        }
        Ok(t)
    }

    /// Codes of the subtrees above every edge.
    pub fn edge_codes(&self) -> Vec<String> {
        let mut codes = vec![String::new(); self.edges.len()];
        let mut order = Vec::new();
        let mut stack = vec![self.root];
        while let Some(e) = stack.pop() {
            order.push(e);
            if let Some(v) = self.producer[e] {
                stack.extend(self.vertices[v].inputs.iter());
            }
        }
        for &e in order.iter().rev() {
            codes[e] = match self.producer[e] {
                None => "|".to_string(),
                Some(v) => {
                    let mut kids: Vec<&str> =
                        self.vertices[v].inputs.iter().map(|&i| codes[i].as_str()).collect();
                    kids.sort_unstable();
                    format!("({})", kids.concat())
                }
            };
        }
        codes
    }

    pub fn canonical_form(&self) -> CanonicalCode {
        CanonicalCode(self.edge_codes().swap_remove(self.root))
    }

    /// The canonical representative of this tree's isomorphism class,
    /// together with an isomorphism given as `iso[canonical edge] = edge of self`.
    pub fn canonicalize(&self) -> (Tree, Vec<usize>) {
        let codes = self.edge_codes();
        let mut iso = Vec::with_capacity(self.edges.len());
        let mut vertices: Vec<Vertex> = Vec::with_capacity(self.vertices.len());
        self.canon_visit(self.root, &codes, &mut iso, &mut vertices);
        let edges = (0..iso.len()).map(|i| format!("e{i}")).collect();
        let tree = Tree::from_parts(edges, vertices, 0).expect("canonical tree is valid");
        (tree, iso)
    }

    fn canon_visit(&self, e: usize, codes: &[String], iso: &mut Vec<usize>, vs: &mut Vec<Vertex>) -> usize {
        let me = iso.len();
        iso.push(e);
        if let Some(v) = self.producer[e] {
            let slot = vs.len();
            vs.push(Vertex { name: format!("v{slot}"), output: me, inputs: Vec::new() });
            let mut kids = self.vertices[v].inputs.clone();
            kids.sort_by(|a, b| codes[*a].cmp(&codes[*b]));
            let inputs = kids.iter().map(|&k| self.canon_visit(k, codes, iso, vs)).collect();
            vs[slot].inputs = inputs;
        }
        me
    }

    /// Parses a canonical code back into the canonical tree it names.
    pub fn from_code(code: &str) -> Result<Tree> {
        fn parse(
            s: &[u8],
            pos: &mut usize,
            edges: &mut usize,
            vs: &mut Vec<Vertex>,
        ) -> Result<usize> {
            let me = *edges;
            *edges += 1;
            match s.get(*pos) {
                Some(b'|') => {
                    *pos += 1;
                    Ok(me)
                }
                Some(b'(') => {
                    *pos += 1;
                    let slot = vs.len();
                    vs.push(Vertex { name: format!("v{slot}"), output: me, inputs: Vec::new() });
                    let mut inputs = Vec::new();
                    while s.get(*pos) != Some(&b')') {
                        if *pos >= s.len() {
                            return Err(Error::InvalidTree("unterminated code".into()));
                        }
                        inputs.push(parse(s, pos, edges, vs)?);
                    }
                    *pos += 1;
                    vs[slot].inputs = inputs;
                    Ok(me)
                }
                _ => Err(Error::InvalidTree(format!("malformed tree code at byte {}", *pos))),
            }
        }
        let bytes = code.as_bytes();
        let mut pos = 0;
        let mut edges = 0;
        let mut vs = Vec::new();
        parse(bytes, &mut pos, &mut edges, &mut vs)?;
        if pos != bytes.len() {
            return Err(Error::InvalidTree(format!("trailing characters in code `{code}`")));
        }
        let t = Tree::from_parts((0..edges).map(|i| format!("e{i}")).collect(), vs, 0)?;
        if t.canonical_form().0 != code {
            return Err(Error::InvalidTree(format!("`{code}` is not in canonical order")));
        }
        Ok(t)
    }

    /// All root-preserving automorphisms, as edge permutations.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let codes = self.edge_codes();
        let mut out = Vec::new();
        let mut map = vec![usize::MAX; self.edges.len()];
        self.aut_search(vec![(self.root, self.root)], &codes, &mut map, &mut out);
        out.sort();
        out
    }

    fn aut_search(
        &self,
        mut pending: Vec<(usize, usize)>,
        codes: &[String],
        map: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let Some((e, f)) = pending.pop() else {
            out.push(map.clone());
            return;
        };
        map[e] = f;
        match (self.producer[e], self.producer[f]) {
            (Some(v), Some(w)) => {
                let ins = &self.vertices[v].inputs;
                let targets = &self.vertices[w].inputs;
                for perm in permutations(ins.len()) {
                    if ins.iter().zip(&perm).all(|(&a, &p)| codes[a] == codes[targets[p]]) {
                        let mut next = pending.clone();
                        next.extend(ins.iter().zip(&perm).map(|(&a, &p)| (a, targets[p])));
                        self.aut_search(next, codes, map, out);
                    }
                }
            }
            _ => self.aut_search(pending, codes, map, out),
        }
    }

    /// The subtree with root edge `root` spanned by `vertices`, keeping edge
    /// and vertex names. Returns the tree and its edge embedding into `self`.
    pub fn subtree(&self, root: usize, vertices: &[usize]) -> Result<(Tree, Vec<usize>)> {
        let set: HashSet<usize> = vertices.iter().copied().collect();
        let mut edges = Vec::new();
        let mut vs = Vec::new();
        let mut stack = vec![root];
        let mut index = HashMap::new();
        while let Some(e) = stack.pop() {
            index.insert(e, edges.len());
            edges.push(e);
            if let Some(v) = self.producer[e].filter(|v| set.contains(v)) {
                vs.push(v);
                stack.extend(self.vertices[v].inputs.iter().rev());
            }
        }
        if vs.len() != set.len() {
            return Err(Error::InvalidTree("vertex set is not a connected subtree".into()));
        }
        let vertices = vs
            .iter()
            .map(|&v| Vertex {
                name: self.vertices[v].name.clone(),
                output: index[&self.vertices[v].output],
                inputs: self.vertices[v].inputs.iter().map(|e| index[e]).collect(),
            })
            .collect();
        let names = edges.iter().map(|&e| self.edges[e].clone()).collect();
        Ok((Tree::from_parts(names, vertices, 0)?, edges))
    }

    /// All connected subtrees with at least one edge, with their embeddings.
    pub fn subtrees(&self) -> Vec<(Tree, Vec<usize>)> {
        let mut out = Vec::new();
        for e in 0..self.edges.len() {
            out.push(self.subtree(e, &[]).expect("single edge"));
        }
        for v in 0..self.vertices.len() {
            let mut sets = Vec::new();
            self.grow(vec![v], self.vertices[v].inputs.clone(), &mut sets);
            for set in sets {
                out.push(self.subtree(self.vertices[v].output, &set).expect("connected"));
            }
        }
        out
    }

    fn grow(&self, current: Vec<usize>, mut frontier: Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let Some(e) = frontier.pop() else {
            out.push(current);
            return;
        };
        self.grow(current.clone(), frontier.clone(), out);
        if let Some(u) = self.producer[e] {
            let mut with = current;
            with.push(u);
            frontier.extend(self.vertices[u].inputs.iter().copied());
            self.grow(with, frontier, out);
        }
    }

    fn fresh_name(&self, base: &str, taken: &dyn Fn(&str) -> bool) -> String {
        let mut name = base.to_string();
        let mut i = 1;
        while taken(&name) {
            name = format!("{base}{i}");
            i += 1;
        }
        name
    }

    fn rebuild(&self, root: String, vertices: Vec<(String, String, Vec<String>)>) -> Result<Tree> {
        Tree::from_named(&root, &vertices)
    }

    fn named_vertices(&self) -> Vec<(String, String, Vec<String>)> {
        self.vertices
            .iter()
            .map(|v| {
                (
                    v.name.clone(),
                    self.edges[v.output].clone(),
                    v.inputs.iter().map(|&e| self.edges[e].clone()).collect(),
                )
            })
            .collect()
    }

    /// Splits vertex `v` in two along a new inner edge. Returns the new tree,
    /// the new edge, and the edge map of the face `self -> new tree`.
    pub fn inner_coface(&self, v: usize, split: &Split) -> Result<(Tree, usize, Vec<usize>)> {
        let vert = self.vertices.get(v).ok_or(Error::UnknownVertex(v))?;
        let k = vert.inputs.len();
        let bad = |reason: &str| Error::InvalidSplit { vertex: v, reason: reason.to_string() };
        let mut seen = HashSet::new();
        for &p in &split.upper {
            if p >= k {
                return Err(bad("input position out of range"));
            }
            if !seen.insert(p) {
                return Err(bad("repeated input position"));
            }
        }
        let lower: Vec<usize> = (0..k).filter(|p| !seen.contains(p)).collect();
        if split.position > lower.len() {
            return Err(bad("graft position out of range"));
        }
        let taken_e = |n: &str| self.edges.iter().any(|e| e == n);
        let taken_v = |n: &str| self.vertices.iter().any(|x| x.name == n);
        let new_edge = self.fresh_name(&format!("{}_e", vert.name), &taken_e);
        let lo = self.fresh_name(&format!("{}_1", vert.name), &taken_v);
        let hi = self.fresh_name(&format!("{}_2", vert.name), &taken_v);
        let name = |p: usize| self.edges[vert.inputs[p]].clone();
        let mut lower_inputs: Vec<String> = lower.iter().map(|&p| name(p)).collect();
        lower_inputs.insert(split.position, new_edge.clone());
        let upper_inputs: Vec<String> = split.upper.iter().map(|&p| name(p)).collect();
        let mut vs = Vec::new();
        for (i, x) in self.named_vertices().into_iter().enumerate() {
            if i == v {
                vs.push((lo.clone(), x.1.clone(), lower_inputs.clone()));
                vs.push((hi.clone(), new_edge.clone(), upper_inputs.clone()));
            } else {
                vs.push(x);
            }
        }
        let t = self.rebuild(self.edges[self.root].clone(), vs)?;
        let map = self.edges.iter().map(|n| t.edge_index(n).expect("edge kept")).collect();
        let e = t.edge_index(&new_edge).expect("new edge");
        Ok((t, e, map))
    }

    /// Contracts an inner edge, merging the two adjacent vertices.
    pub fn contract_edge(&self, e: usize) -> Result<Tree> {
        let (Some(upper), Some((lower, pos))) = (self.producer.get(e).copied().flatten(), self.consumer.get(e).copied().flatten()) else {
            return Err(Error::NotInnerEdge(e));
        };
        let mut vs = Vec::new();
        for (i, x) in self.named_vertices().into_iter().enumerate() {
            if i == upper {
                continue;
            }
            if i == lower {
                let up: Vec<String> =
                    self.vertices[upper].inputs.iter().map(|&a| self.edges[a].clone()).collect();
                let mut inputs = x.2.clone();
                inputs.splice(pos..pos + 1, up);
                vs.push((x.0, x.1, inputs));
            } else {
                vs.push(x);
            }
        }
        self.rebuild(self.edges[self.root].clone(), vs)
    }

    /// Removes a unary vertex, identifying its two edges. Returns the new tree
    /// and the edge map of the degeneracy `self -> new tree`.
    pub fn codegeneracy(&self, v: usize) -> Result<(Tree, Vec<usize>)> {
        let vert = self.vertices.get(v).ok_or(Error::UnknownVertex(v))?;
        if vert.inputs.len() != 1 {
            return Err(Error::NotUnary { vertex: v, valence: vert.inputs.len() });
        }
        let input = vert.inputs[0];
        let output = vert.output;
        let rename = |e: usize| if e == input { self.edges[output].clone() } else { self.edges[e].clone() };
        let vs = self
            .vertices
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != v)
            .map(|(_, x)| (x.name.clone(), rename(x.output), x.inputs.iter().map(|&e| rename(e)).collect()))
            .collect();
        let t = self.rebuild(self.edges[self.root].clone(), vs)?;
        let map = (0..self.edges.len()).map(|e| t.edge_index(&rename(e)).expect("edge kept")).collect();
        Ok((t, map))
    }

    /// Graphviz rendering, root at the bottom.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph tree {\n  rankdir=BT;\n");
        for v in &self.vertices {
            s.push_str(&format!("  \"{}\" [shape=circle];\n", v.name));
        }
        for e in 0..self.edges.len() {
            let src = match self.producer[e] {
                Some(v) => format!("\"{}\"", self.vertices[v].name),
                None => {
                    s.push_str(&format!("  \"top_{}\" [shape=point];\n", self.edges[e]));
                    format!("\"top_{}\"", self.edges[e])
                }
            };
            let dst = match self.consumer[e] {
                Some((v, _)) => format!("\"{}\"", self.vertices[v].name),
                None => {
                    s.push_str(&format!("  \"bottom_{}\" [shape=point];\n", self.edges[e]));
                    format!("\"bottom_{}\"", self.edges[e])
                }
            };
            s.push_str(&format!("  {src} -> {dst} [label=\"{}\"];\n", self.edges[e]));
        }
        s.push_str("}\n");
        s
    }
}

/// All permutations of `0..n`, as images `p[i]`.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    fn heap(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(cur.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, cur, out);
            if k.is_multiple_of(2) {
                cur.swap(i, k - 1);
            } else {
                cur.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut cur, &mut out);
    out.sort();
    out
}

/// Canonical codes of all trees with at most `max_vertices` vertices, each of
/// valence at most `max_valence`, ordered by size then code.
pub fn enumerate_codes(max_vertices: usize, max_valence: usize) -> Vec<CanonicalCode> {
    let mut by_size: Vec<Vec<String>> = vec![vec!["|".to_string()]];
    for n in 1..=max_vertices {
        let mut pool: Vec<(String, usize)> = by_size
            .iter()
            .enumerate()
            .flat_map(|(size, codes)| codes.iter().map(move |c| (c.clone(), size)))
            .collect();
        pool.sort();
        let mut level = Vec::new();
        for k in 0..=max_valence {
            let mut chosen = Vec::new();
            multisets(&pool, 0, k, n - 1, &mut chosen, &mut level);
        }
        level.sort();
        level.dedup();
        by_size.push(level);
    }
    let mut all: Vec<(usize, usize, String)> = by_size
        .into_iter()
        .enumerate()
        .flat_map(|(n, codes)| codes.into_iter().map(move |c| (n, c.matches('|').count() + c.matches('(').count(), c)))
        .collect();
    all.sort();
    all.into_iter().map(|(_, _, c)| CanonicalCode(c)).collect()
}

fn multisets(
    pool: &[(String, usize)],
    start: usize,
    remaining: usize,
    budget: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<String>,
) {
    if remaining == 0 {
        if budget == 0 {
            let inner: String = chosen.iter().map(|&i| pool[i].0.as_str()).collect();
            out.push(format!("({inner})"));
        }
        return;
    }
    for i in start..pool.len() {
        if pool[i].1 <= budget {
            chosen.push(i);
            multisets(pool, i, remaining - 1, budget - pool[i].1, chosen, out);
            chosen.pop();
        }
    }
}
