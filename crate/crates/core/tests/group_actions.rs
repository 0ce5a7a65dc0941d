use std::collections::HashMap;

use dendro::colored::{FiniteColoredOperad, OpSig};
use dendro::group_actions::bousfield::{check_bousfield, hall_extract, hall_search, FiniteMonoid, PointedMagma, SimplicialSetData};
use dendro::group_actions::category::{check_core, do_hom, do_hom_oracle, CatAction, DOObject, FiniteCategory};
use dendro::group_actions::operad::{endomorphism_action, GSet, GopObject, GroupActionOnOperad};
use dendro::group_actions::FiniteGroup;
use dendro::tree::{enumerate_codes, permutations, Tree};
use proptest::prelude::*;
use proptest::test_runner::Config;

/// The same group with elements renamed by `p`: `p(a)·p(b) = p(ab)`.
fn relabel(g: &FiniteGroup, p: &[usize]) -> FiniteGroup {
    let n = g.order();
    let mut table = vec![vec![0; n]; n];
    for a in 0..n {
        for b in 0..n {
            table[p[a]][p[b]] = p[g.mul(a, b)];
        }
    }
    FiniteGroup::new(table).unwrap()
}

proptest! {
    #![proptest_config(Config { cases: 64, failure_persistence: None, ..Config::default() })]

    #[test]
    fn relabelled_groups_stay_isomorphic_and_round_trip(index in 0usize..64, seed in any::<u64>()) {
        let groups = FiniteGroup::all_up_to_8();
        let (_, g) = &groups[index % groups.len()];
        let perms = permutations(g.order());
        let p = &perms[(seed % perms.len() as u64) as usize];
        let h = relabel(g, p);
        prop_assert!(g.is_isomorphic(&h));
        let iso = g.isomorphism_to(&h).unwrap();
        for a in 0..g.order() {
            for b in 0..g.order() {
                prop_assert_eq!(iso[g.mul(a, b)], h.mul(iso[a], iso[b]));
            }
        }
        let r = hall_extract(&PointedMagma::from_group(&h));
        prop_assert!(r.relations_hold && r.round_trip);
        prop_assert_eq!(r.group.unwrap(), h);
    }
}

#[test]
fn non_isomorphic_groups_are_distinguished() {
    let groups = FiniteGroup::all_up_to_8();
    for (i, (a, g)) in groups.iter().enumerate() {
        for (b, h) in &groups[i + 1..] {
            assert!(!g.is_isomorphic(h), "{a} and {b}");
        }
    }
}

#[test]
fn hall_search_at_order_four() {
    let r = hall_search(4).unwrap();
    assert!(r.pass, "{r:?}");
    assert!(r.pruned);
    assert_eq!(r.passing, 16);
    assert_eq!(r.group_structures, 16);
    assert_eq!(r.classes.len(), 2);
}

#[test]
fn a_magma_that_is_not_a_group_is_rejected() {
    // a constant bracket satisfies [a,a] = e only
    let m = PointedMagma::new(vec![vec![0; 3]; 3], 0).unwrap();
    let r = hall_extract(&m);
    assert!(!r.relations_hold);
    assert!(r.group.is_none());
}

#[test]
fn endomorphism_operads_have_the_expected_sizes() {
    let g = FiniteGroup::cyclic(2);
    for x in [GSet::regular(&g), GSet::trivial(&g, 3)] {
        let a = endomorphism_action(&g, &x, 2).unwrap();
        let s = x.size();
        assert_eq!(a.sizes, (0..=2).map(|n| s.pow(s.pow(n) as u32)).collect::<Vec<_>>());
        assert!(a.validate().pass);
    }
    // a trivial group acts trivially
    let t = FiniteGroup::trivial();
    let a = endomorphism_action(&t, &GSet::trivial(&t, 2), 2).unwrap();
    assert_eq!(a, GroupActionOnOperad::trivial(&t, &a.sizes));
}

#[test]
fn broken_group_actions_are_caught() {
    let g = FiniteGroup::cyclic(3);
    let mut a = GroupActionOnOperad::trivial(&g, &[2, 3]);
    a.act[1][1] = vec![1, 0, 2];
    let r = a.validate();
    assert!(!r.pass);
    assert!(r.violations.iter().any(|v| v.axiom == "associativity"));
}

/// One colour with the identity and two binary operations swapped by the
/// transposition.
fn swap_operad() -> FiniteColoredOperad {
    let op = |name: &str, inputs: Vec<usize>| OpSig { name: name.into(), output: 0, inputs };
    let permutation: HashMap<(usize, Vec<usize>), usize> =
        [((0, vec![0]), 0), ((1, vec![0, 1]), 1), ((2, vec![0, 1]), 2), ((1, vec![1, 0]), 2), ((2, vec![1, 0]), 1)].into_iter().collect();
    FiniteColoredOperad {
        colors: vec!["a".into()],
        ops: vec![op("id", vec![0]), op("m", vec![0, 0]), op("m'", vec![0, 0])],
        identities: vec![0],
        composition: HashMap::new(),
        permutation,
        max_arity: 2,
    }
}

/// An action of `Z/2` on `{id, m, m'}` is a map with `e • g = g`,
/// `s • (s • g) = g`, arities preserved and `σ*(s • g) = s • (σ* g)`.
fn z2_action_oracle(act: &[usize; 6]) -> bool {
    let at = |f: usize, g: usize| act[f * 3 + g];
    let arity = |g: usize| if g == 0 { 1 } else { 2 };
    let swap = |g: usize| match g {
        1 => 2,
        2 => 1,
        g => g,
    };
    (0..3).all(|g| at(0, g) == g && at(1, at(1, g)) == g && arity(at(1, g)) == arity(g) && (g == 0 || swap(at(1, g)) == at(1, swap(g))))
}

#[test]
fn category_action_validation_matches_the_oracle() {
    let z2 = FiniteGroup::cyclic(2);
    let category = FiniteCategory::from_group(&z2);
    assert_eq!(category.identities, vec![0]);
    let mut valid = 0;
    for code in 0..729usize {
        let mut act = [0; 6];
        let mut c = code;
        for slot in act.iter_mut() {
            *slot = c % 3;
            c /= 3;
        }
        let table = (0..6).map(|i| ((i / 3, i % 3), act[i])).collect();
        let a = CatAction { category: category.clone(), operad: swap_operad(), mu: vec![0; 3], act: table };
        let expected = z2_action_oracle(&act);
        assert_eq!(a.validate().pass, expected, "{act:?}");
        valid += usize::from(expected);
    }
    // the trivial action and the swap
    assert_eq!(valid, 2);
}

#[test]
fn do_hom_and_cores_on_the_groupoid_example() {
    let a = CatAction::groupoid_example();
    let mut objects: Vec<DOObject> = Vec::new();
    for n in 0..=3 {
        objects.push(DOObject { n, tree: None });
        for code in enumerate_codes(2, 2) {
            objects.push(DOObject { n, tree: Some(Tree::from_code(&code.0).unwrap()) });
        }
    }
    for obj in &objects {
        let elems = do_hom(obj, &a);
        assert_eq!(elems.len(), do_hom_oracle(obj, &a), "{obj:?}");
        let core = check_core(obj, &a);
        if core.empty_core {
            continue;
        }
        // a groupoid: restriction to the core is a bijection
        assert!(core.injective && core.surjective, "{obj:?}: {core:?}");
        assert_eq!(core.elements, core.compatible, "{obj:?}");
        let valences: Vec<usize> = obj.tree.as_ref().map(|t| t.vertices().iter().map(|v| v.inputs.len()).collect()).unwrap_or_default();
        let image = GopObject::of_do_object(obj.n, &valences);
        assert_eq!(image.rank, obj.n);
        assert_eq!(image.arities.len(), valences.len());
    }
}

#[test]
fn bousfield_maps_on_nerves() {
    for (name, g) in FiniteGroup::all_up_to_8() {
        let x = SimplicialSetData::nerve(&FiniteMonoid::of_group(&g), 3);
        assert!(x.validate().is_ok(), "{name}");
        assert!(x.is_reduced());
        for n in 2..=3 {
            assert!(check_bousfield(&x, n).unwrap().bijective, "{name} at {n}");
        }
    }
    let x = SimplicialSetData::nerve(&FiniteMonoid::idempotent(), 2);
    assert!(x.validate().is_ok());
    assert!(!check_bousfield(&x, 2).unwrap().bijective);
    let x = SimplicialSetData::nerve(&FiniteMonoid::point(), 3);
    assert_eq!(x.sizes, vec![1; 4]);
}
