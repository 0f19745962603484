mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{ratings, strategy, tpg};
use prefgraph::preference::{
    agg, build_tpg, derive_preferences, sup, ItemId, Node, ObservationSet, PreferenceNode, PreferenceObservation,
    RepresentativeNode, UserId,
};
use prefgraph::Error;
use proptest::prelude::*;

fn obs(u: u32, a: u32, b: u32) -> PreferenceObservation {
    PreferenceObservation {
        user: UserId(u),
        preferred: ItemId(a),
        other: ItemId(b),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn counts_match_a_pair_scan(rows in strategy::rows(6, 8)) {
        let rs = ratings(&rows);
        let derived = derive_preferences(&rs);
        let mut by_user: BTreeMap<UserId, Vec<f64>> = BTreeMap::new();
        for r in &rs {
            by_user.entry(r.user).or_default().push(r.value);
        }
        for (u, vals) in by_user {
            let mut strict = 0;
            for i in 0..vals.len() {
                for j in i + 1..vals.len() {
                    strict += usize::from(vals[i] != vals[j]);
                }
            }
            prop_assert_eq!(derived.iter().filter(|o| o.user == u).count(), strict);
        }
        let set: BTreeSet<_> = derived.iter().map(|o| (o.user, o.preferred, o.other)).collect();
        prop_assert_eq!(set.len(), derived.len());
        for &(u, a, b) in &set {
            prop_assert!(!set.contains(&(u, b, a)));
        }
    }

    #[test]
    fn graph_degree_invariants(rows in strategy::rows(6, 6)) {
        let Some(g) = tpg(&rows) else { return Ok(()) };
        prop_assert_eq!(g.edges_pr().count(), 2 * g.pref_count());
        for p in 0..g.pref_count() {
            prop_assert!(g.degree(Node::Pref(p)) >= 3);
            let pref = g.prefs()[p];
            let [d, u] = g.reps_of_pref(p);
            prop_assert_eq!(g.representative(d), RepresentativeNode::desirable(pref.winner));
            prop_assert_eq!(g.representative(u), RepresentativeNode::undesirable(pref.loser));
        }
        for r in g.representatives() {
            let rep = g.representative(r);
            let touched = g.prefs().iter().any(|p| sup(*p, rep));
            prop_assert_eq!(g.degree(Node::Rep(r)) >= 1, touched);
        }
        for u in 0..g.user_count() {
            prop_assert_eq!(g.degree(Node::User(u)), g.prefs_of_user(u).len());
        }
        let all = g.observations();
        let set = ObservationSet::from_iter(all.iter().copied());
        for o in &all {
            prop_assert!(agg(o.user, o.node(), &set));
        }
    }

    #[test]
    fn graph_ignores_observation_order(rows in strategy::rows(5, 5)) {
        let mut o = derive_preferences(&ratings(&rows));
        if o.is_empty() {
            return Ok(());
        }
        let a = build_tpg(&o).unwrap();
        o.reverse();
        let half = o.len() / 2;
        o.rotate_left(half);
        prop_assert_eq!(a, build_tpg(&o).unwrap());
    }
}

#[test]
fn derivation_examples() {
    let d = derive_preferences(&ratings(&[(0, 0, 5), (0, 1, 3)]));
    assert_eq!(d, vec![obs(0, 0, 1)]);
    assert!(derive_preferences(&ratings(&[(0, 0, 3), (0, 1, 3)])).is_empty());
    let mut d = derive_preferences(&ratings(&[(0, 0, 5), (0, 1, 3), (0, 2, 1)]));
    d.sort_by_key(|o| (o.preferred, o.other));
    assert_eq!(d, vec![obs(0, 0, 1), obs(0, 0, 2), obs(0, 1, 2)]);
    assert!(derive_preferences(&[]).is_empty());
}

#[test]
fn agreement_and_support() {
    let (a, b, c) = (ItemId(0), ItemId(1), ItemId(2));
    let lee = UserId(0);
    let set = ObservationSet::from_iter([obs(0, 1, 0)]);
    let ba = PreferenceNode { winner: b, loser: a };
    assert!(agg(lee, ba, &set));
    assert!(!agg(lee, PreferenceNode { winner: a, loser: b }, &set));
    assert!(!agg(UserId(5), ba, &set));
    assert!(sup(ba, RepresentativeNode::desirable(b)));
    assert!(sup(ba, RepresentativeNode::undesirable(a)));
    assert!(!sup(ba, RepresentativeNode::desirable(c)));
}

#[test]
fn minimal_graph_and_empty_input() {
    let g = build_tpg(&[obs(0, 0, 1)]).unwrap();
    assert_eq!((g.user_count(), g.pref_count()), (1, 1));
    assert_eq!(g.degree(Node::Pref(0)), 3);
    assert!(matches!(build_tpg(&[]), Err(Error::NoPreferences)));
}
