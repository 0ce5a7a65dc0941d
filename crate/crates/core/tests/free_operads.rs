use std::sync::Arc;

use dendro::free::{elements, hom_free, invert_perm, j_map, FreeMap, GradedSet, Term};
use dendro::omega::OmegaMorphism;
use dendro::skeleton::Skeleton;
use proptest::prelude::*;
use proptest::test_runner::Config;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

fn config() -> Config {
    Config { cases: 128, failure_persistence: None, ..Config::default() }
}

fn gens() -> GradedSet {
    GradedSet::new([("c", 0), ("u", 1), ("x", 2), ("y", 3)])
}

/// A random term with at most `budget` vertices and leaves labelled by a
/// random permutation.
fn random_term(m: &GradedSet, budget: usize, rng: &mut StdRng) -> Term {
    fn shape(m: &GradedSet, budget: &mut usize, rng: &mut StdRng, next: &mut usize) -> Term {
        if *budget == 0 || rng.gen_bool(0.35) {
            *next += 1;
            return Term::Leaf(*next - 1);
        }
        *budget -= 1;
        let gen = rng.gen_range(0..m.len());
        let args = (0..m.valence(gen)).map(|_| shape(m, budget, rng, next)).collect();
        Term::Node { gen, args }
    }
    let mut b = budget;
    let mut next = 0;
    let t = shape(m, &mut b, rng, &mut next);
    let mut p: Vec<usize> = (0..t.arity()).collect();
    p.shuffle(rng);
    t.act(&p).unwrap()
}

fn random_perm(n: usize, rng: &mut StdRng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Relabels leaves by `f`.
fn relabel(t: &Term, f: &dyn Fn(usize) -> usize) -> Term {
    match t {
        Term::Leaf(l) => Term::Leaf(f(*l)),
        Term::Node { gen, args } => Term::Node { gen: *gen, args: args.iter().map(|a| relabel(a, f)).collect() },
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn gamma_is_associative_and_unital(seed in any::<u64>()) {
        let m = gens();
        let mut rng = StdRng::seed_from_u64(seed);
        let f = random_term(&m, 3, &mut rng);
        let g: Vec<Term> = (0..f.arity()).map(|_| random_term(&m, 2, &mut rng)).collect();
        let fg = f.gamma(&g).unwrap();
        let h: Vec<Term> = (0..fg.arity()).map(|_| random_term(&m, 2, &mut rng)).collect();
        let left = fg.gamma(&h).unwrap();
        let mut offset = 0;
        let inner: Vec<Term> = g
            .iter()
            .map(|gi| {
                let block = &h[offset..offset + gi.arity()];
                offset += gi.arity();
                gi.gamma(block).unwrap()
            })
            .collect();
        prop_assert_eq!(&left, &f.gamma(&inner).unwrap());
        let ids = vec![Term::identity(); f.arity()];
        prop_assert_eq!(f.gamma(&ids).unwrap(), f.clone());
        prop_assert_eq!(Term::identity().gamma(std::slice::from_ref(&f)).unwrap(), f.clone());
        prop_assert!(left.validate(&m).is_ok());
    }

    #[test]
    fn right_action_composes(seed in any::<u64>()) {
        let m = gens();
        let mut rng = StdRng::seed_from_u64(seed);
        let f = random_term(&m, 4, &mut rng);
        let n = f.arity();
        let (s, t) = (random_perm(n, &mut rng), random_perm(n, &mut rng));
        let st: Vec<usize> = (0..n).map(|i| s[t[i]]).collect();
        prop_assert_eq!(f.act(&s).unwrap().act(&t).unwrap(), f.act(&st).unwrap());
        let id: Vec<usize> = (0..n).collect();
        prop_assert_eq!(f.act(&id).unwrap(), f.clone());
    }

    #[test]
    fn gamma_is_equivariant(seed in any::<u64>()) {
        let m = gens();
        let mut rng = StdRng::seed_from_u64(seed);
        let f = random_term(&m, 3, &mut rng);
        let k = f.arity();
        let g: Vec<Term> = (0..k).map(|_| random_term(&m, 2, &mut rng)).collect();
        let offsets = |args: &[Term]| -> Vec<usize> {
            args.iter().scan(0, |acc, a| { let o = *acc; *acc += a.arity(); Some(o) }).collect()
        };

        // permuting the arguments inside: γ(f; g_i·τ_i) = γ(f; g)·(τ_1 ⊕ … ⊕ τ_k)
        let taus: Vec<Vec<usize>> = g.iter().map(|gi| random_perm(gi.arity(), &mut rng)).collect();
        let acted: Vec<Term> = g.iter().zip(&taus).map(|(gi, t)| gi.act(t).unwrap()).collect();
        let off = offsets(&g);
        let mut sum = Vec::new();
        for (i, t) in taus.iter().enumerate() {
            sum.extend(t.iter().map(|&x| x + off[i]));
        }
        prop_assert_eq!(f.gamma(&acted).unwrap(), f.gamma(&g).unwrap().act(&sum).unwrap());

        // permuting f: γ(f·σ; g) is γ(f; g ∘ σ⁻¹) with its blocks moved
        let sigma = random_perm(k, &mut rng);
        let inv = invert_perm(&sigma).unwrap();
        let left = f.act(&sigma).unwrap().gamma(&g).unwrap();
        // f·σ has leaf σ⁻¹(l) where f has l, which receives g[σ⁻¹(l)]
        let moved: Vec<Term> = (0..k).map(|l| g[inv[l]].clone()).collect();
        let right = f.gamma(&moved).unwrap();
        let (off_left, off_right) = (offsets(&g), offsets(&moved));
        let block_of = |x: usize, offs: &[usize], args: &[Term]| {
            let b = (0..args.len()).rev().find(|&b| offs[b] <= x && args[b].arity() > 0).unwrap();
            (b, x - offs[b])
        };
        let relabelled = relabel(&right, &|x| {
            let (l, o) = block_of(x, &off_right, &moved);
            off_left[inv[l]] + o
        });
        prop_assert_eq!(left, relabelled);
    }

    #[test]
    fn substitution_is_functorial(seed in any::<u64>()) {
        // T_A -> T_B -> T_C -> T_D with random generator images
        let a = GradedSet::new([("p", 2), ("q", 1)]);
        let b = GradedSet::new([("x", 2), ("y", 3), ("u", 1)]);
        let c = GradedSet::new([("s", 2), ("t", 1), ("z", 0)]);
        let d = gens();
        let mut rng = StdRng::seed_from_u64(seed);
        let pick = |src: &GradedSet, dst: &GradedSet, rng: &mut StdRng| -> FreeMap {
            let images = src
                .valences()
                .iter()
                .map(|&k| {
                    let pool = elements(dst, k, 2).items;
                    pool[rng.gen_range(0..pool.len())].clone()
                })
                .collect();
            FreeMap { images }
        };
        let f = pick(&a, &b, &mut rng);
        let g = pick(&b, &c, &mut rng);
        let h = pick(&c, &d, &mut rng);
        let left = h.after(&g).unwrap().after(&f).unwrap();
        let right = h.after(&g.after(&f).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(FreeMap::identity(&b).after(&f).unwrap(), f.clone());
        prop_assert_eq!(f.after(&FreeMap::identity(&a)).unwrap(), f.clone());
        let t = random_term(&a, 3, &mut rng);
        prop_assert_eq!(left.apply(&t).unwrap(), h.apply(&g.apply(&f.apply(&t).unwrap()).unwrap()).unwrap());
    }
}

#[test]
fn j_is_a_functor() {
    let sk = Skeleton::new(3, 3);
    let mut rng = StdRng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 500 {
        let mut t: Vec<usize> = (0..3).map(|_| rng.gen_range(0..sk.len())).collect();
        // often end with an automorphism, so that leaves get permuted
        if rng.gen_bool(0.3) {
            t[2] = t[1];
        }
        let (h1, h2) = (sk.hom(t[0], t[1]), sk.hom(t[1], t[2]));
        if h1.is_empty() || h2.is_empty() {
            continue;
        }
        let f = rng.gen_range(0..h1.len());
        let g = if t[1] == t[2] {
            let auts = sk.automorphisms(t[1]);
            auts[rng.gen_range(0..auts.len())]
        } else {
            rng.gen_range(0..h2.len())
        };
        let mk = |r: usize, s: usize, i: usize| {
            OmegaMorphism::new(sk.tree(r).clone(), sk.tree(s).clone(), sk.hom(r, s)[i].clone()).unwrap()
        };
        let (mf, mg) = (mk(t[0], t[1], f), mk(t[1], t[2], g));
        let gf = mk(t[0], t[2], sk.compose(t[0], t[1], t[2], f, g));
        assert_eq!(j_map(&gf), j_map(&mg).after(&j_map(&mf)).unwrap());
        checked += 1;
    }
    for i in 0..sk.len() {
        let id = OmegaMorphism::identity(Arc::clone(sk.tree(i)));
        assert_eq!(j_map(&id), FreeMap::identity(&GradedSet::of_tree(sk.tree(i))));
    }
}

/// `n! · Catalan(n − 1)`: planar binary trees with labelled leaves.
fn binary_count(n: usize) -> usize {
    let fact: usize = (1..=n).product();
    let m = n - 1;
    let catalan = (1..=m).fold(1usize, |c, i| c * (m + i) / i) / (m + 1);
    fact * catalan
}

#[test]
fn element_counts() {
    let x2 = GradedSet::new([("x", 2)]);
    for n in 1..=5 {
        let e = elements(&x2, n, n - 1);
        assert!(e.complete);
        assert_eq!(e.items.len(), binary_count(n));
    }
    // with a unary generator the levels are infinite
    let u = GradedSet::new([("u", 1)]);
    let e = elements(&u, 1, 3);
    assert!(!e.complete);
    assert_eq!(e.items.len(), 4);
    // maps out of a corolla are elements of the right arity
    let v3 = GradedSet::new([("v", 3)]);
    assert_eq!(hom_free(&v3, &x2, 2).items.len(), binary_count(3));
}
