use std::sync::Arc;

use dendro::colored::{restrict_dendrex, Dendrex};
use dendro::filtration::{filtration_skeleton, primitives, psi, spread_apart, verify_filtration};
use dendro::free::{GradedSet, Term};
use dendro::omega::{is_morphism, StepKind};
use dendro::presheaf::{Nerve, Presheaf};
use dendro::skeleton::Skeleton;
use dendro::tree::Tree;

fn is_bare_generator(t: &Term) -> bool {
    matches!(t, Term::Node { args, .. } if args.iter().enumerate().all(|(i, a)| *a == Term::Leaf(i)))
}

#[test]
fn spread_apart_recovers_every_dendrex() {
    for m in [GradedSet::new([("x", 2), ("y", 3)]), GradedSet::new([("c", 0), ("x", 2)]), GradedSet::new([("u", 1), ("x", 2)])] {
        let sk = Arc::new(Skeleton::new(2, 3));
        let nerve = Nerve::free(&sk, &m, Some(3));
        let mut checked = 0;
        for s in 0..sk.len() {
            let tree = sk.tree(s);
            for beta in nerve.level(s) {
                let sa = spread_apart(tree, beta, &m).unwrap();
                let t = &sa.terminal;
                assert!(t.labels.iter().all(is_bare_generator));
                let generators: usize = beta.ops.iter().map(Term::vertex_count).sum();
                assert_eq!(t.tree.vertex_count(), generators);
                let mut last = 0;
                for (kind, step) in &sa.chain.steps {
                    let rank = match kind {
                        StepKind::InnerFace => 0,
                        StepKind::Degeneracy => 1,
                        _ => 2,
                    };
                    assert!(rank >= last, "steps out of order");
                    last = rank;
                    assert!(is_morphism(&step.source, &step.target, &step.edge_map));
                }
                let map = sa.composite_map(tree);
                let x = Dendrex { colors: vec![0; t.tree.edge_count()], ops: t.labels.clone() };
                assert_eq!(restrict_dendrex(nerve.operad(), tree, &t.tree, &map, &x).as_ref(), Some(beta));
                checked += 1;
            }
        }
        assert!(checked > 0);
    }
}

#[test]
fn psi_is_monotone_and_exhausts_the_nerve() {
    let m = GradedSet::new([("x", 2), ("y", 3)]);
    let sk = Arc::new(filtration_skeleton(&m, 3, None));
    let nerve = Nerve::free(&sk, &m, Some(3));
    let levels: Vec<_> = (0..=3).map(|n| psi(&sk, &m, n)).collect();
    for w in levels.windows(2) {
        assert!(w[0].is_subset_of(&w[1]));
    }
    for t in 0..sk.len() {
        assert_eq!(levels[3].len(t), nerve.len(t), "{}", sk.code(t).0);
        // Ψ^0 is generated by the unit: only linear trees are hit
        if !sk.is_linear(t) {
            assert_eq!(levels[0].len(t), 0);
        }
    }
}

#[test]
fn primitives_on_symmetric_trees() {
    let x2 = GradedSet::new([("x", 2)]);
    // literal primitives on a corolla: the generator and its transpose
    let p = primitives(&Tree::corolla(2), &x2);
    assert_eq!(p.elements.len(), 2);
    assert_eq!(p.orbits.len(), 1);
    let p = primitives(&Tree::corolla(3), &x2);
    assert!(p.elements.is_empty());
}

#[test]
fn filtration_reports() {
    for m in [GradedSet::new([("x", 2), ("y", 3)]), GradedSet::new([("c", 0), ("x", 2)])] {
        let r = verify_filtration(&m, 3, None);
        assert!(r.pass(), "{:?}", r.witnesses);
        assert!(r.per_level_sizes.windows(2).all(|w| w[0].iter().zip(&w[1]).all(|(a, b)| a <= b)));
        let attached: usize = r.pushout.iter().map(|row| row.attached).sum();
        let total: usize = r.nerve_sizes.iter().sum::<usize>() - r.per_level_sizes[0].iter().sum::<usize>();
        assert_eq!(attached, total);
    }
}
