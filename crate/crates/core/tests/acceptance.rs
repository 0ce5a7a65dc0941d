//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every criterion prints one line; exits non-zero if any fails.

use std::collections::{HashMap, HashSet};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use dendro::colored::{i_inverse, i_map, FiniteColoredOperad, OpSig, TreeOperad};
use dendro::filtration::verify_filtration;
use dendro::free::{hom_free, GradedSet};
use dendro::group_actions::bousfield::{check_bousfield, hall_extract, hall_search, FiniteMonoid, PointedMagma, SimplicialSetData};
use dendro::group_actions::category::{do_hom, do_hom_oracle, CatAction, DOObject};
use dendro::group_actions::operad::{goper_coproduct_special, TruncatedOperad};
use dendro::group_actions::FiniteGroup;
use dendro::kan::{verify_lke, verify_lknerve, verify_pullback_hom};
use dendro::omega::hom_omega;
use dendro::presheaf::{check_iso, check_strict_segal, is_normal, NatTrans, Nerve, Presheaf, Product, Reduced, Representable, Shared, TensorDiscrete};
use dendro::skeleton::Skeleton;
use dendro::tree::{enumerate_codes, Tree};
use rayon::prelude::*;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn skeleton(v: usize, k: usize) -> Arc<Skeleton> {
    Arc::new(Skeleton::new(v, k))
}

fn index(sk: &Skeleton, t: &Tree) -> usize {
    sk.find(&t.canonical_form()).expect("tree in skeleton")
}

/// Monotone maps `[m] -> [n]` by filtering all functions.
fn monotone_oracle(m: usize, n: usize) -> usize {
    let total = (n + 1).pow(m as u32 + 1);
    (0..total)
        .filter(|&code| {
            let mut c = code;
            let f: Vec<usize> = (0..=m)
                .map(|_| {
                    let v = c % (n + 1);
                    c /= n + 1;
                    v
                })
                .collect();
            f.windows(2).all(|w| w[0] <= w[1])
        })
        .count()
}

fn c1_omega_vs_delta() -> Outcome {
    let mut pairs = 0;
    for m in 0..=4 {
        for n in 0..=4 {
            let got = hom_omega(&Tree::linear(m), &Tree::linear(n)).len();
            let want = monotone_oracle(m, n);
            ensure(got == want, || format!("Hom([{m}],[{n}]) = {got}, expected {want}"))?;
            pairs += 1;
        }
    }
    Ok(format!("{pairs} pairs (m, n) ≤ 4 agree"))
}

fn c2_nerve_is_representable() -> Outcome {
    let sk = skeleton(3, 3);
    for s in 0..sk.len() {
        let n = Nerve::new(&sk, TreeOperad::new(sk.tree(s)));
        let rep = Representable::new(&sk, s);
        let maps: NatTrans = (0..sk.len())
            .map(|t| n.level(t).iter().map(|d| sk.hom_index(t, s, &d.colors).expect("dendrices are edge maps")).collect())
            .collect();
        check_iso(&n, &rep, &maps).map_err(|e| format!("{}: {e:?}", sk.code(s).0))?;
    }
    Ok(format!("natural bijections at all {} trees", sk.len()))
}

fn c3_strict_segal() -> Outcome {
    let sk = skeleton(3, 3);
    let sets = [GradedSet::empty(), GradedSet::new([("x", 2)]), GradedSet::new([("x", 2), ("y", 3)])];
    let mut levels = 0;
    for m in &sets {
        let n = Nerve::free(&sk, m, None);
        let r = check_strict_segal(&n);
        ensure(r.pass && !r.truncated, || {
            let bad = r.levels.iter().find(|l| !l.empty_core && !(l.injective && l.surjective));
            format!("M = {m:?}: failing level {bad:?}, truncated {}", r.truncated)
        })?;
        levels += r.levels.iter().filter(|l| !l.empty_core).count();
    }
    Ok(format!("{levels} levels bijective across 3 graded sets"))
}

fn c4_i_bijection() -> Outcome {
    let sk = skeleton(3, 3);
    let m = GradedSet::new([("x", 2)]);
    let nerve = Nerve::free(&sk, &m, None);
    ensure(!nerve.truncated(), || "nerve of T_{x²} is truncated".into())?;
    let mut total = 0;
    for r in 0..sk.len() {
        let tree = sk.tree(r);
        let homs = hom_free(&GradedSet::of_tree(tree), &m, 2);
        ensure(homs.complete, || format!("{}: hom side incomplete", sk.code(r).0))?;
        let level = nerve.level(r);
        ensure(level.len() == homs.items.len(), || format!("{}: {} dendrices vs {} maps", sk.code(r).0, level.len(), homs.items.len()))?;
        let images: HashSet<_> = level.iter().map(i_map).collect();
        let targets: HashSet<_> = homs.items.iter().cloned().collect();
        ensure(images == targets, || format!("{}: I is not onto", sk.code(r).0))?;
        for d in level {
            ensure(i_inverse(tree, &i_map(d)).as_ref() == Ok(d), || format!("{}: I⁻¹ I ≠ id", sk.code(r).0))?;
        }
        for f in &homs.items {
            let back = i_inverse(tree, f).map_err(|e| e.to_string())?;
            ensure(&i_map(&back) == f, || format!("{}: I I⁻¹ ≠ id", sk.code(r).0))?;
        }
        total += level.len();
    }
    Ok(format!("{total} elements over {} trees, both round trips identities", sk.len()))
}

fn c5_lke() -> Outcome {
    let sk = skeleton(3, 3);
    let two = Tree::with_valences(&[2, 2]).expect("tree with valences (2, 2)");
    let cases = [
        (Tree::corolla(2), GradedSet::new([("v", 2)])),
        (two, GradedSet::new([("v", 2)])),
        (Tree::corolla(3), GradedSet::new([("v", 3)])),
    ];
    let mut parts = Vec::new();
    for (s, n) in &cases {
        let r = verify_lke(&sk, index(&sk, s), n, 2);
        ensure(r.bijective && r.descends && !r.truncated && r.classes == r.hom_count, || {
            format!("S = {}: {r:?}", s.canonical_form().0)
        })?;
        parts.push(format!("{} {}", s.canonical_form().0, r.classes));
    }
    Ok(format!("bijective, classes {}", parts.join(", ")))
}

fn c6_lknerve_and_pullback() -> Outcome {
    let sk = skeleton(3, 3);
    let m = GradedSet::new([("x", 2)]);
    let r = verify_lknerve(&sk, &m, &GradedSet::new([("v", 2)]), 2);
    ensure(r.bijective && r.descends && !r.truncated, || format!("lknerve: {r:?}"))?;
    let p = verify_pullback_hom(&sk, &m, None);
    ensure(p.pass && p.natural && !p.truncated, || format!("pullback: {:?}", p.witnesses))?;
    Ok(format!("lknerve {} classes; pullback bijective and natural at {} levels", r.classes, p.levels.len()))
}

fn c7_filtration() -> Outcome {
    let r = verify_filtration(&GradedSet::new([("x", 2)]), 3, Some(3));
    ensure(r.exhaustive && r.pushout_counts_match && r.pushout_bijective && r.pass(), || format!("{:?}", r.witnesses))?;
    Ok(format!("exhaustive; pushouts match for n ≤ {} on {} trees", r.bound, r.trees.len()))
}

fn c8_tensor() -> Outcome {
    let sk = skeleton(3, 3);
    let mut checks = 0;
    for s in 0..sk.len() {
        let x: Shared = Arc::new(Reduced::new(Arc::new(Representable::new(&sk, s))));
        for k in 1..=3 {
            let z = Reduced::new(Arc::new(Product::new(x.clone(), k)));
            let t = TensorDiscrete::new(x.clone(), k).map_err(|e| e.to_string())?;
            let maps: NatTrans = (0..sk.len())
                .map(|r| {
                    (0..z.len(r))
                        .map(|e| match z.representative(r, e) {
                            None => 0,
                            Some(p) => t.pair(r, p / k, p % k),
                        })
                        .collect()
                })
                .collect();
            check_iso(&z, &t, &maps).map_err(|e| format!("S = {}, |K| = {k}: {e:?}", sk.code(s).0))?;
            checks += 1;
        }
    }
    Ok(format!("(X × K)_* ≅ X ⊗ K in {checks} cases"))
}

fn commutative_operad() -> FiniteColoredOperad {
    FiniteColoredOperad {
        colors: vec!["*".into()],
        ops: vec![OpSig { name: "id".into(), output: 0, inputs: vec![0] }, OpSig { name: "m".into(), output: 0, inputs: vec![0, 0] }],
        identities: vec![0],
        composition: HashMap::new(),
        permutation: HashMap::from([((1, vec![1, 0]), 1)]),
        max_arity: 2,
    }
}

fn c9_normality() -> Outcome {
    let sk = skeleton(4, 2);
    for s in 0..sk.len() {
        let y = Reduced::new(Arc::new(Representable::new(&sk, s)));
        is_normal(&y, None).map_err(|w| format!("S = {}: {w:?}", sk.code(s).0))?;
    }
    let com = commutative_operad();
    com.validate().map_err(|e| e.to_string())?;
    let small = skeleton(2, 2);
    let (tree, element, aut) = match is_normal(&Nerve::new(&small, com), None) {
        Ok(()) => return Err("symmetric counterexample accepted".into()),
        Err(w) => w,
    };
    Ok(format!("{} representables normal; counterexample rejected at {tree} element {element} by {aut:?}", sk.len()))
}

fn c10_hall() -> Outcome {
    let start = Instant::now();
    let mut counts = Vec::new();
    for order in 1..=3 {
        let r = hall_search(order).map_err(|e| e.to_string())?;
        ensure(r.pass, || format!("order {order}: {r:?}"))?;
        counts.push(r.passing);
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("search took {elapsed:?}"))?;
    let groups = FiniteGroup::all_up_to_8();
    for (name, g) in &groups {
        let r = hall_extract(&PointedMagma::from_group(g));
        let ok = r.relations_hold && r.round_trip && r.group.as_ref().is_some_and(|h| h.is_isomorphic(g));
        ensure(ok, || format!("{name}: {r:?}"))?;
    }
    Ok(format!("passing tables {counts:?} in {:.2?}; {} groups round-trip", elapsed, groups.len()))
}

fn c11_bousfield() -> Outcome {
    let mut n = 0;
    for (name, g) in FiniteGroup::all_up_to_8().into_iter().filter(|(_, g)| g.order() <= 6) {
        let x = SimplicialSetData::nerve(&FiniteMonoid::of_group(&g), 3);
        x.validate().map_err(|e| e.to_string())?;
        for k in [2, 3] {
            let r = check_bousfield(&x, k).map_err(|e| e.to_string())?;
            ensure(r.bijective, || format!("{name}: ψ_{k} {r:?}"))?;
        }
        n += 1;
    }
    let y = SimplicialSetData::nerve(&FiniteMonoid::idempotent(), 3);
    let r = check_bousfield(&y, 2).map_err(|e| e.to_string())?;
    ensure(!r.bijective, || "ψ_2 is bijective on the idempotent monoid".into())?;
    Ok(format!("ψ_2, ψ_3 bijective for {n} groups; idempotent monoid collides at {:?}", r.collision))
}

fn c12_do_hom() -> Outcome {
    let a = CatAction::groupoid_example();
    let v = a.validate();
    ensure(v.pass, || format!("example action invalid: {:?}", v.violations))?;
    let mut trees: Vec<Option<Tree>> = vec![None];
    trees.extend(enumerate_codes(2, 3).iter().map(|c| Some(Tree::from_code(&c.0).expect("canonical code"))));
    let mut objects = 0;
    let mut elements = 0;
    for n in 0..=2 {
        for t in &trees {
            let obj = DOObject { n, tree: t.clone() };
            let got = do_hom(&obj, &a).len();
            let want = do_hom_oracle(&obj, &a);
            ensure(got == want, || format!("[{n} ↻ {t:?}]: {got} vs {want}"))?;
            objects += 1;
            elements += got;
        }
    }
    Ok(format!("{objects} objects, {elements} elements, counts agree"))
}

fn c13_goper_coproduct() -> Outcome {
    let p = TruncatedOperad::free(&GradedSet::new([("x", 2)]), 3, 2).map_err(|e| e.to_string())?;
    for (name, g) in [("Z/2", FiniteGroup::cyclic(2)), ("S3", FiniteGroup::symmetric(3))] {
        let c = goper_coproduct_special(&p, &g);
        let want: Vec<usize> = p.sizes().iter().map(|s| g.order() * s).collect();
        ensure(c.sizes == want, || format!("{name}: {:?} vs {want:?}", c.sizes))?;
        ensure(c.validate().pass, || format!("{name}: action invalid"))?;
    }
    Ok(format!("|P(n)| = {:?}, sizes scale by |G|", p.sizes()))
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("Ω and Δ agree on linear trees", c1_omega_vs_delta),
        ("nerve of Ω(S) is the representable", c2_nerve_is_representable),
        ("strict Segal condition for free nerves", c3_strict_segal),
        ("I is a bijection", c4_i_bijection),
        ("left Kan extension of representables", c5_lke),
        ("Kan extension of nerves and pullback", c6_lknerve_and_pullback),
        ("filtration by primitive dendrices", c7_filtration),
        ("reduction of products is the tensor", c8_tensor),
        ("normality of reduced representables", c9_normality),
        ("Hall characterization of groups", c10_hall),
        ("Bousfield–Segal maps", c11_bousfield),
        ("Hom in Δ↻Ω", c12_do_hom),
        ("group operad coproduct", c13_goper_coproduct),
    ];
    let results: Vec<(Outcome, Duration)> = criteria
        .par_iter()
        .map(|(_, f)| {
            let t = Instant::now();
            (f(), t.elapsed())
        })
        .collect();
    let mut failed = 0;
    for (i, ((name, _), (outcome, time))) in criteria.iter().zip(&results).enumerate() {
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{time:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{time:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
