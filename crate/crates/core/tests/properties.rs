use std::collections::BTreeSet;

use proptest::prelude::*;

use cayleyflows::flows::{flow_from_word, realize_loop, support, translate};
use cayleyflows::geodesic::{
    bfs_length_oracle, exact_length, length_exact_metabelian, steiner_connect, OracleOutcome, SteinerInstance,
};
use cayleyflows::relations::{orbit_representative, shortest_relation};
use cayleyflows::words::enumerate_irreducible;
use cayleyflows::{FreeWord, GroupSpec, Lattice, Letter, Limits, Parallelism, SolubleElement};

fn word(max_len: usize) -> impl Strategy<Value = FreeWord> {
    prop::collection::vec(0usize..4, 0..=max_len)
        .prop_map(|v| FreeWord::from_letters(&v.into_iter().map(Letter::from_ordinal).collect::<Vec<_>>(), 2).unwrap())
}

fn el(w: &FreeWord, d: usize) -> SolubleElement {
    SolubleElement::from_word(w, GroupSpec::new(2, d).unwrap()).unwrap()
}

fn point() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-4i64..=4, 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn flow_of_product_is_sum_of_translates(u in word(10), v in word(10)) {
        let z2 = Lattice::new(2);
        let (fu, end) = flow_from_word(&z2, &u);
        let (fv, _) = flow_from_word(&z2, &v);
        let (fuv, _) = flow_from_word(&z2, &u.concat(&v));
        prop_assert_eq!(fuv, fu.add(&translate(&z2, &fv, &end)));
    }

    #[test]
    fn closed_walk_flows_realize(u in word(14)) {
        let z2 = Lattice::new(2);
        let back: Vec<i64> = u.exponent_sums().iter().map(|s| -s).collect();
        let closed = u.concat(&cayleyflows::flows::lattice_path(&back, 2));
        let (mu, _) = flow_from_word(&z2, &closed);
        prop_assume!(!mu.is_zero() && support(&z2, &mu).is_connected());
        let base = mu.edges().next().unwrap().source.clone();
        let walk = realize_loop(&z2, &mu, &base).unwrap();
        prop_assert_eq!(walk.flow(&z2), mu);
    }

    #[test]
    fn tower_multiplication_matches_concatenation(u in word(12), v in word(12), d in 1usize..=3) {
        let spec = GroupSpec::new(2, d).unwrap();
        let lhs = SolubleElement::from_word(&u.concat(&v), spec).unwrap();
        let rhs = el(&u, d).multiply(&el(&v, d)).unwrap();
        prop_assert_eq!(&lhs, &rhs);
        prop_assert!(el(&u, d).multiply(&el(&u, d).invert()).unwrap().is_identity());
    }

    #[test]
    fn exact_length_matches_bfs(u in word(9)) {
        let x = el(&u, 2);
        let exact = length_exact_metabelian(&x).unwrap();
        prop_assert_eq!(bfs_length_oracle(&x, 9, &Limits::default()).unwrap(), OracleOutcome::Exact(exact.length));
        prop_assert!(exact.length <= u.len() as u64);
        prop_assert_eq!(&el(&exact.witness, 2), &x);
        prop_assert_eq!(exact.witness.len() as u64, exact.length);
    }

    #[test]
    fn length_is_a_norm(u in word(16), v in word(16)) {
        let (x, y) = (el(&u, 2), el(&v, 2));
        let (lx, ly) = (exact_length(&x).unwrap(), exact_length(&y).unwrap());
        prop_assert!(exact_length(&x.multiply(&y).unwrap()).unwrap() <= lx + ly);
        prop_assert_eq!(exact_length(&x.invert()).unwrap(), lx);
    }

    #[test]
    fn steiner_cost_grows_with_terminals(a in point(), b in point(), c in point()) {
        prop_assume!(a != b && c != a && c != b);
        let lim = Limits::default();
        let two = steiner_connect(&SteinerInstance::new(vec![vec![a.clone()], vec![b.clone()]]).unwrap(), &lim).unwrap();
        let three = steiner_connect(&SteinerInstance::new(vec![vec![a.clone()], vec![b.clone()], vec![c.clone()]]).unwrap(), &lim).unwrap();
        let l1: u64 = a.iter().zip(&b).map(|(x, y)| x.abs_diff(*y)).sum();
        prop_assert_eq!(two.cost, l1);
        prop_assert!(three.cost >= two.cost);
        prop_assert_eq!(three.edges.len() as u64, three.cost);
    }

    #[test]
    fn short_cyclically_reduced_words_are_nontrivial(u in word(13)) {
        let w = u.cyclic_reduce();
        prop_assume!(!w.is_empty());
        prop_assert!(!el(&w, 2).is_identity());
    }

    #[test]
    fn conjugated_relator_is_trivial(g in word(6)) {
        let r = FreeWord::parse("aabABAbaaBAbAB", 2).unwrap();
        prop_assert!(el(&g.concat(&r).concat(&g.inverse()), 2).is_identity());
        prop_assert!(!el(&g.concat(&r).concat(&g.inverse()), 3).is_identity());
    }
}

/// The pruned search finds every orbit that brute force finds.
#[test]
fn pruning_keeps_every_relation() {
    for (m, d) in [(2, 1), (3, 1)] {
        let spec = GroupSpec::new(m, d).unwrap();
        let search = shortest_relation(spec, 6, u64::MAX, &Parallelism::sequential()).unwrap();
        let brute: BTreeSet<FreeWord> = enumerate_irreducible(m, 4)
            .filter(|w| w.is_cyclically_reduced())
            .filter(|w| SolubleElement::from_word(w, spec).unwrap().is_identity())
            .map(|w| orbit_representative(&w))
            .collect();
        assert_eq!(search.rho, Some(4));
        assert_eq!(search.witnesses.into_iter().collect::<BTreeSet<_>>(), brute);
    }
}

#[test]
fn results_do_not_depend_on_threads() {
    let spec = GroupSpec::new(2, 2).unwrap();
    let one = shortest_relation(spec, 14, u64::MAX, &Parallelism::sequential()).unwrap();
    let four = shortest_relation(spec, 14, u64::MAX, &Parallelism::with_threads(4)).unwrap();
    assert_eq!(one, four);
}
