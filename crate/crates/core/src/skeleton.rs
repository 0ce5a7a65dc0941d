//! A finite skeleton of the tree category: canonical trees up to a vertex and
//! valence bound, with every hom-set precomputed.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::omega::{compose_maps, hom_edge_maps, invert_map};
use crate::tree::{enumerate_codes, CanonicalCode, Tree};

pub type EdgeMap = Vec<usize>;

#[derive(Debug)]
pub struct Skeleton {
    max_vertices: usize,
    max_valence: usize,
    trees: Vec<Arc<Tree>>,
    codes: Vec<CanonicalCode>,
    index: HashMap<CanonicalCode, usize>,
    homs: Vec<Vec<Vec<EdgeMap>>>,
    lookup: Vec<Vec<HashMap<EdgeMap, usize>>>,
    auts: Vec<Vec<usize>>,
}

impl Skeleton {
    pub fn new(max_vertices: usize, max_valence: usize) -> Skeleton {
        let codes = enumerate_codes(max_vertices, max_valence);
        let trees: Vec<Arc<Tree>> = codes
            .iter()
            .map(|c| Arc::new(Tree::from_code(&c.0).expect("generated code parses")))
            .collect();
        let index = codes.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect();
        let homs: Vec<Vec<Vec<EdgeMap>>> = trees
            .par_iter()
            .map(|r| trees.iter().map(|s| hom_edge_maps(r, s)).collect())
            .collect();
        let lookup = homs
            .iter()
            .map(|row| {
                row.iter()
                    .map(|maps| maps.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect())
                    .collect()
            })
            .collect();
        let auts = (0..trees.len())
            .map(|t| {
                homs[t][t]
                    .iter()
                    .enumerate()
                    .filter(|(_, m)| invert_map(m).is_some())
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        Skeleton { max_vertices, max_valence, trees, codes, index, homs, lookup, auts }
    }

    pub fn max_vertices(&self) -> usize {
        self.max_vertices
    }

    pub fn max_valence(&self) -> usize {
        self.max_valence
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn tree(&self, i: usize) -> &Arc<Tree> {
        &self.trees[i]
    }

    pub fn trees(&self) -> &[Arc<Tree>] {
        &self.trees
    }

    pub fn code(&self, i: usize) -> &CanonicalCode {
        &self.codes[i]
    }

    pub fn find(&self, code: &CanonicalCode) -> Option<usize> {
        self.index.get(code).copied()
    }

    /// The skeleton index of `t` and an isomorphism `iso[canonical edge] = edge of t`.
    pub fn locate(&self, t: &Tree) -> Option<(usize, Vec<usize>)> {
        let (canon, iso) = t.canonicalize();
        self.find(&canon.canonical_form()).map(|i| (i, iso))
    }

    pub fn hom(&self, r: usize, s: usize) -> &[EdgeMap] {
        &self.homs[r][s]
    }

    pub fn hom_index(&self, r: usize, s: usize, map: &[usize]) -> Option<usize> {
        self.lookup[r][s].get(map).copied()
    }

    pub fn identity(&self, t: usize) -> usize {
        let id: Vec<usize> = (0..self.trees[t].edge_count()).collect();
        self.hom_index(t, t, &id).expect("identity exists")
    }

    /// Index of `g ∘ f` for `f` in hom(r, s) and `g` in hom(s, t).
    pub fn compose(&self, r: usize, s: usize, t: usize, f: usize, g: usize) -> usize {
        let m = compose_maps(&self.homs[s][t][g], &self.homs[r][s][f]);
        self.hom_index(r, t, &m).expect("hom-sets are closed under composition")
    }

    /// Automorphisms of tree `t`, as indices into hom(t, t).
    pub fn automorphisms(&self, t: usize) -> &[usize] {
        &self.auts[t]
    }

    pub fn vertex_count(&self, t: usize) -> usize {
        self.trees[t].vertex_count()
    }

    pub fn is_linear(&self, t: usize) -> bool {
        self.trees[t].is_linear()
    }

    pub fn eta(&self) -> usize {
        self.find(&CanonicalCode("|".into())).expect("η is always present")
    }

    /// Whether hom(r, s)[f] is one of the generating morphisms: an
    /// automorphism, an elementary face or an elementary degeneracy.
    pub fn is_generator(&self, r: usize, s: usize, f: usize) -> bool {
        let m = &self.homs[r][s][f];
        let (vr, vs) = (self.trees[r].vertex_count(), self.trees[s].vertex_count());
        let injective = {
            let mut seen = vec![false; self.trees[s].edge_count()];
            m.iter().all(|&e| !std::mem::replace(&mut seen[e], true))
        };
        if r == s {
            return injective;
        }
        let surjective = {
            let mut seen = vec![false; self.trees[s].edge_count()];
            m.iter().for_each(|&e| seen[e] = true);
            seen.into_iter().all(|x| x)
        };
        (injective && vs == vr + 1) || (surjective && vr == vs + 1)
    }

    /// All generating morphisms as `(r, s, index)`.
    pub fn generators(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for r in 0..self.len() {
            for s in 0..self.len() {
                for f in 0..self.homs[r][s].len() {
                    if self.is_generator(r, s, f) {
                        out.push((r, s, f));
                    }
                }
            }
        }
        out
    }

    pub fn total_morphisms(&self) -> usize {
        self.homs.iter().flatten().map(Vec::len).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::omega::monotone_count;

    #[test]
    fn small_skeleton() {
        let sk = Skeleton::new(1, 2);
        assert_eq!(sk.len(), 4);
        assert_eq!(sk.tree(sk.eta()).vertex_count(), 0);
        let c2 = sk.find(&Tree::corolla(2).canonical_form()).unwrap();
        assert_eq!(sk.automorphisms(c2).len(), 2);
        assert_eq!(sk.hom(sk.eta(), c2).len(), 3);
    }

    #[test]
    fn linear_homs_are_monotone_maps() {
        let sk = Skeleton::new(3, 1);
        for m in 0..=3 {
            for n in 0..=3 {
                let a = sk.find(&Tree::linear(m).canonical_form()).unwrap();
                let b = sk.find(&Tree::linear(n).canonical_form()).unwrap();
                assert_eq!(sk.hom(a, b).len(), monotone_count(m, n));
            }
        }
    }

    #[test]
    fn composition_closed_and_generated() {
        let sk = Skeleton::new(2, 2);
        for r in 0..sk.len() {
            for s in 0..sk.len() {
                for t in 0..sk.len() {
                    for f in 0..sk.hom(r, s).len() {
                        for g in 0..sk.hom(s, t).len() {
                            sk.compose(r, s, t, f, g);
                        }
                    }
                }
            }
        }
        assert!(!sk.generators().is_empty());
    }

    #[test]
    fn locate_returns_an_isomorphism() {
        let sk = Skeleton::new(2, 2);
        let t = Tree::from_named("r", &[("a", "r", vec!["x", "l"]), ("b", "x", vec![])]).unwrap();
        let (i, iso) = sk.locate(&t).unwrap();
        let canon = sk.tree(i);
        assert_eq!(iso.len(), canon.edge_count());
        assert_eq!(iso[canon.root()], t.root());
    }
}
