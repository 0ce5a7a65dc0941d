//! Coloured operads that can be enumerated, and maps out of tree operads.
//!
//! A map `Ω(R) -> P` (a dendrex of the nerve of `P`) is a colour for every
//! edge of `R` and an operation for every vertex, with matching signatures.
//! Since `Ω(R)` is free, nothing else needs checking.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::free::{ElementTable, FreeMap, GradedSet, Term};
use crate::omega::{operation, VertexImage};
use crate::tree::{permutations, PlanarStructure, Tree};

pub trait ColoredOperad: Sync + Send {
    type Op: Clone + Eq + Hash + Ord + Debug + Send + Sync;

    fn color_count(&self) -> usize;

    /// Operations with the given output colour and arity, with their input colours.
    fn ops_with_output(&self, out: usize, arity: usize) -> Vec<(Self::Op, Vec<usize>)>;

    fn identity(&self, color: usize) -> Self::Op;

    /// `γ(op; args)`; inputs of later arguments follow those of earlier ones.
    fn compose(&self, op: &Self::Op, args: &[Self::Op]) -> Option<Self::Op>;

    /// The operation whose `j`-th input is input `pick[j]` of `op`.
    fn reorder(&self, op: &Self::Op, pick: &[usize]) -> Self::Op;

    /// Whether `ops_with_output` is exhaustive up to the given arity.
    fn complete_up_to(&self, arity: usize) -> bool;
}

/// A map `Ω(R) -> P`: colours of edges and operations of vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dendrex<Op> {
    pub colors: Vec<usize>,
    pub ops: Vec<Op>,
}

/// All maps `Ω(r) -> p`.
pub fn hom_co<P: ColoredOperad>(p: &P, r: &Tree) -> Vec<Dendrex<P::Op>> {
    let order = r.preorder_vertices();
    let mut out = Vec::new();
    let mut colors = vec![usize::MAX; r.edge_count()];
    let mut ops: Vec<Option<P::Op>> = vec![None; r.vertex_count()];
    for c in 0..p.color_count() {
        colors[r.root()] = c;
        hom_co_extend(p, r, &order, 0, &mut colors, &mut ops, &mut out);
    }
    out
}

fn hom_co_extend<P: ColoredOperad>(
    p: &P,
    r: &Tree,
    order: &[usize],
    i: usize,
    colors: &mut Vec<usize>,
    ops: &mut Vec<Option<P::Op>>,
    out: &mut Vec<Dendrex<P::Op>>,
) {
    let Some(&v) = order.get(i) else {
        out.push(Dendrex { colors: colors.clone(), ops: ops.iter().map(|o| o.clone().expect("assigned")).collect() });
        return;
    };
    let vert = r.vertex(v);
    for (op, ins) in p.ops_with_output(colors[vert.output], vert.inputs.len()) {
        for (&e, &c) in vert.inputs.iter().zip(&ins) {
            colors[e] = c;
        }
        ops[v] = Some(op);
        hom_co_extend(p, r, order, i + 1, colors, ops, out);
    }
}

/// Composite of the operations of `s` along the subtree above `root` whose
/// leaves are `leaves`, with inputs in left-to-right planar order. Returns
/// the operation and that leaf order.
fn compose_subtree<P: ColoredOperad>(
    p: &P,
    s: &Tree,
    x: &Dendrex<P::Op>,
    root: usize,
    leaves: &[usize],
) -> Option<(P::Op, Vec<usize>)> {
    if leaves.contains(&root) {
        return Some((p.identity(x.colors[root]), vec![root]));
    }
    let w = s.producer(root)?;
    let mut args = Vec::new();
    let mut order = Vec::new();
    for &e in &s.vertex(w).inputs {
        let (op, o) = compose_subtree(p, s, x, e, leaves)?;
        args.push(op);
        order.extend(o);
    }
    Some((p.compose(&x.ops[w], &args)?, order))
}

/// Restriction of a dendrex on `s` along the edge map `f: r -> s`.
pub fn restrict_dendrex<P: ColoredOperad>(
    p: &P,
    r: &Tree,
    s: &Tree,
    f: &[usize],
    x: &Dendrex<P::Op>,
) -> Option<Dendrex<P::Op>> {
    let colors: Vec<usize> = f.iter().map(|&e| x.colors[e]).collect();
    let mut ops = Vec::with_capacity(r.vertex_count());
    for v in r.vertices() {
        let ins: Vec<usize> = v.inputs.iter().map(|&e| f[e]).collect();
        match operation(s, f[v.output], &ins)? {
            VertexImage::Identity(e) => ops.push(p.identity(x.colors[e])),
            VertexImage::Subtree { root, .. } => {
                let (op, order) = compose_subtree(p, s, x, root, &ins)?;
                let pick: Vec<usize> =
                    ins.iter().map(|e| order.iter().position(|o| o == e).expect("leaf")).collect();
                ops.push(p.reorder(&op, &pick));
            }
        }
    }
    Some(Dendrex { colors, ops })
}

/// The free coloured operad `Ω(S)`. An operation is a root edge together with
/// an ordering of the leaves of a subtree above it.
#[derive(Clone, Debug)]
pub struct TreeOperad {
    tree: Tree,
    subtrees: Vec<Vec<Vec<usize>>>,
}

impl TreeOperad {
    pub fn new(tree: &Tree) -> TreeOperad {
        let mut subtrees = vec![Vec::new(); tree.edge_count()];
        for (sub, emb) in tree.subtrees() {
            if sub.vertex_count() > 0 {
                subtrees[emb[sub.root()]].push(sub.leaves().into_iter().map(|e| emb[e]).collect());
            }
        }
        TreeOperad { tree: tree.clone(), subtrees }
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }
}

impl ColoredOperad for TreeOperad {
    type Op = (usize, Vec<usize>);

    fn color_count(&self) -> usize {
        self.tree.edge_count()
    }

    fn ops_with_output(&self, out: usize, arity: usize) -> Vec<(Self::Op, Vec<usize>)> {
        let mut res = Vec::new();
        if arity == 1 {
            res.push(((out, vec![out]), vec![out]));
        }
        for leaves in self.subtrees[out].iter().filter(|l| l.len() == arity) {
            for perm in permutations(arity) {
                let ins: Vec<usize> = perm.iter().map(|&i| leaves[i]).collect();
                res.push(((out, ins.clone()), ins));
            }
        }
        res
    }

    fn identity(&self, color: usize) -> Self::Op {
        (color, vec![color])
    }

    fn compose(&self, op: &Self::Op, args: &[Self::Op]) -> Option<Self::Op> {
        if args.len() != op.1.len() || args.iter().zip(&op.1).any(|(a, &c)| a.0 != c) {
            return None;
        }
        Some((op.0, args.iter().flat_map(|a| a.1.iter().copied()).collect()))
    }

    fn reorder(&self, op: &Self::Op, pick: &[usize]) -> Self::Op {
        (op.0, pick.iter().map(|&i| op.1[i]).collect())
    }

    fn complete_up_to(&self, _arity: usize) -> bool {
        true
    }
}

/// The free operad `T_M`, with one colour and elements up to a vertex bound.
#[derive(Clone, Debug)]
pub struct FreeOperad {
    table: ElementTable,
}

impl FreeOperad {
    pub fn new(m: &GradedSet, max_arity: usize, max_vertices: usize) -> FreeOperad {
        FreeOperad { table: ElementTable::new(m, max_arity, max_vertices) }
    }

    pub fn gens(&self) -> &GradedSet {
        &self.table.gens
    }

    pub fn table(&self) -> &ElementTable {
        &self.table
    }
}

impl ColoredOperad for FreeOperad {
    type Op = Term;

    fn color_count(&self) -> usize {
        1
    }

    fn ops_with_output(&self, _out: usize, arity: usize) -> Vec<(Term, Vec<usize>)> {
        if arity > self.table.max_arity() {
            return Vec::new();
        }
        self.table.get(arity).items.iter().map(|t| (t.clone(), vec![0; arity])).collect()
    }

    fn identity(&self, _color: usize) -> Term {
        Term::identity()
    }

    fn compose(&self, op: &Term, args: &[Term]) -> Option<Term> {
        op.gamma(args).ok()
    }

    fn reorder(&self, op: &Term, pick: &[usize]) -> Term {
        op.act(pick).expect("pick is a permutation")
    }

    fn complete_up_to(&self, arity: usize) -> bool {
        arity <= self.table.max_arity() && (0..=arity).all(|n| self.table.get(n).complete)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpSig {
    pub name: String,
    pub output: usize,
    pub inputs: Vec<usize>,
}

/// A finite coloured operad given by tables. Compositions and permutation
/// actions are looked up; missing entries mean "undefined".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteColoredOperad {
    pub colors: Vec<String>,
    pub ops: Vec<OpSig>,
    pub identities: Vec<usize>,
    pub composition: HashMap<(usize, Vec<usize>), usize>,
    pub permutation: HashMap<(usize, Vec<usize>), usize>,
    pub max_arity: usize,
}

impl FiniteColoredOperad {
    /// Checks identity signatures, signature compatibility of every table
    /// entry, and the unit laws wherever the composites are defined.
    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::InvalidTable(s));
        if self.identities.len() != self.colors.len() {
            return bad("one identity per colour is required".into());
        }
        for (c, &i) in self.identities.iter().enumerate() {
            let sig = self.ops.get(i).ok_or_else(|| Error::Dangling(format!("identity {i}")))?;
            if sig.output != c || sig.inputs != vec![c] {
                return bad(format!("`{}` is not an identity of colour {c}", sig.name));
            }
        }
        for op in &self.ops {
            if op.output >= self.colors.len() || op.inputs.iter().any(|&c| c >= self.colors.len()) {
                return Err(Error::Dangling(format!("colour of `{}`", op.name)));
            }
        }
        for ((op, args), &res) in &self.composition {
            let sig = self.ops.get(*op).ok_or_else(|| Error::Dangling(format!("operation {op}")))?;
            if args.len() != sig.inputs.len() || res >= self.ops.len() {
                return bad(format!("composition entry for `{}` has the wrong shape", sig.name));
            }
            let mut ins = Vec::new();
            for (&a, &c) in args.iter().zip(&sig.inputs) {
                let s = self.ops.get(a).ok_or_else(|| Error::Dangling(format!("operation {a}")))?;
                if s.output != c {
                    return bad(format!("composing `{}` into `{}` mismatches colours", s.name, sig.name));
                }
                ins.extend(s.inputs.iter().copied());
            }
            if self.ops[res].output != sig.output || self.ops[res].inputs != ins {
                return bad(format!("composite of `{}` has the wrong signature", sig.name));
            }
        }
        for (i, sig) in self.ops.iter().enumerate() {
            let ids: Vec<usize> = sig.inputs.iter().map(|&c| self.identities[c]).collect();
            if let Some(&r) = self.composition.get(&(i, ids)) {
                if r != i {
                    return bad(format!("right unit law fails for `{}`", sig.name));
                }
            }
            if let Some(&r) = self.composition.get(&(self.identities[sig.output], vec![i])) {
                if r != i {
                    return bad(format!("left unit law fails for `{}`", sig.name));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub op: usize,
    pub args: Vec<usize>,
    pub result: usize,
}

/// JSON form of a finite coloured operad; tables are lists of entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteOperadJson {
    pub colors: Vec<String>,
    pub ops: Vec<OpSig>,
    pub identities: Vec<usize>,
    #[serde(default)]
    pub composition: Vec<TableEntry>,
    #[serde(default)]
    pub permutation: Vec<TableEntry>,
}

impl FiniteColoredOperad {
    pub fn from_json(json: &FiniteOperadJson) -> Result<FiniteColoredOperad> {
        let table = |t: &[TableEntry]| t.iter().map(|e| ((e.op, e.args.clone()), e.result)).collect();
        let p = FiniteColoredOperad {
            colors: json.colors.clone(),
            ops: json.ops.clone(),
            identities: json.identities.clone(),
            composition: table(&json.composition),
            permutation: table(&json.permutation),
            // the tables list every operation, so no arity is cut off
            max_arity: usize::MAX,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> FiniteOperadJson {
        let table = |t: &HashMap<(usize, Vec<usize>), usize>| {
            let mut v: Vec<TableEntry> = t.iter().map(|((op, args), &result)| TableEntry { op: *op, args: args.clone(), result }).collect();
            v.sort_by(|a, b| (a.op, &a.args).cmp(&(b.op, &b.args)));
            v
        };
        FiniteOperadJson {
            colors: self.colors.clone(),
            ops: self.ops.clone(),
            identities: self.identities.clone(),
            composition: table(&self.composition),
            permutation: table(&self.permutation),
        }
    }
}

impl ColoredOperad for FiniteColoredOperad {
    type Op = usize;

    fn color_count(&self) -> usize {
        self.colors.len()
    }

    fn ops_with_output(&self, out: usize, arity: usize) -> Vec<(usize, Vec<usize>)> {
        self.ops
            .iter()
            .enumerate()
            .filter(|(_, s)| s.output == out && s.inputs.len() == arity)
            .map(|(i, s)| (i, s.inputs.clone()))
            .collect()
    }

    fn identity(&self, color: usize) -> usize {
        self.identities[color]
    }

    fn compose(&self, op: &usize, args: &[usize]) -> Option<usize> {
        let ids: Vec<usize> = self.ops[*op].inputs.iter().map(|&c| self.identities[c]).collect();
        if args == ids.as_slice() {
            return Some(*op);
        }
        if args.len() == 1 && *op == self.identities[self.ops[args[0]].output] {
            return Some(args[0]);
        }
        self.composition.get(&(*op, args.to_vec())).copied()
    }

    fn reorder(&self, op: &usize, pick: &[usize]) -> usize {
        if pick.iter().enumerate().all(|(i, &p)| i == p) {
            return *op;
        }
        *self.permutation.get(&(*op, pick.to_vec())).expect("permutation table covers the operation")
    }

    fn complete_up_to(&self, arity: usize) -> bool {
        arity <= self.max_arity
    }
}

/// `I`: a map `Ω(R) -> T_M` read as a map `J(R) -> T_M`.
pub fn i_map(x: &Dendrex<Term>) -> FreeMap {
    FreeMap { images: x.ops.clone() }
}

/// `I⁻¹`: the map `Ω(R) -> T_M` with the given values on vertices.
pub fn i_inverse(r: &Tree, m: &FreeMap) -> Result<Dendrex<Term>> {
    if m.images.len() != r.vertex_count() {
        return Err(Error::ArityMismatch { expected: r.vertex_count(), got: m.images.len() });
    }
    for (v, t) in r.vertices().iter().zip(&m.images) {
        if t.arity() != v.valence() {
            return Err(Error::ArityMismatch { expected: v.valence(), got: t.arity() });
        }
    }
    Ok(Dendrex { colors: vec![0; r.edge_count()], ops: m.images.clone() })
}

/// Adjusts the planar structure of `r` so that every vertex is sent to a
/// bare generator. Each label must be a generator up to a permutation.
/// Returns the new tree and the relabelled dendrex.
pub fn replan(r: &Tree, x: &Dendrex<Term>) -> Result<(PlanarStructure, Tree, Dendrex<Term>)> {
    let mut orders = Vec::with_capacity(r.vertex_count());
    let mut ops = Vec::with_capacity(r.vertex_count());
    for (v, t) in x.ops.iter().enumerate() {
        let Term::Node { gen, args } = t else {
            return Err(Error::NotPermutedGenerator { vertex: v });
        };
        let mut pi = Vec::with_capacity(args.len());
        for a in args {
            match a {
                Term::Leaf(l) => pi.push(*l),
                _ => return Err(Error::NotPermutedGenerator { vertex: v }),
            }
        }
        let inputs = &r.vertex(v).inputs;
        orders.push(pi.iter().map(|&l| inputs[l]).collect());
        ops.push(Term::generator(*gen, args.len()));
    }
    let p = PlanarStructure { orders };
    let t = r.with_planar(&p)?;
    Ok((p, t, Dendrex { colors: x.colors.clone(), ops }))
}
