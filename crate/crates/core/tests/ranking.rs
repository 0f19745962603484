mod common;

use std::collections::BTreeSet;

use common::{random_tpg, strategy, tpg};
use nalgebra::{DMatrix, DVector};
use prefgraph::io::read_pairs;
use prefgraph::preference::{Catalog, ItemId, RepresentativeNode, TripartitePreferenceGraph, UserId};
use prefgraph::projection::{build_variant, ProjectedGraph, Variant};
use prefgraph::ranking::{personalized_pagerank, rank_items, recommend, CandidateSet, PprConfig};
use prefgraph::Error;
use proptest::prelude::*;

/// Converged scores from `(I − αM'ᵀ)p = (1 − α)d`, where `M'` sends
/// dangling rows to `d`.
fn solve(g: &ProjectedGraph, user: UserId, alpha: f64) -> Vec<f64> {
    let n = g.roster().len();
    let src = g.roster().user_row(user).unwrap();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for (r, c, v) in g.adjacency().triplets() {
        m[(r, c)] = v;
    }
    for r in 0..n {
        if g.is_dangling(r) {
            m[(r, src)] = 1.0;
        }
    }
    let a = DMatrix::<f64>::identity(n, n) - m.transpose() * alpha;
    let mut d = DVector::<f64>::zeros(n);
    d[src] = 1.0 - alpha;
    a.lu().solve(&d).expect("nonsingular for alpha < 1").iter().copied().collect()
}

fn converged() -> PprConfig {
    PprConfig {
        iterations: 400,
        ..PprConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mass_is_conserved_and_deltas_shrink(rows in strategy::rows(6, 6)) {
        let Some(g) = tpg(&rows) else { return Ok(()) };
        let cfg = PprConfig::default();
        for v in Variant::EVALUATED {
            let pg = build_variant(&g, v).unwrap();
            for &u in &pg.roster().users {
                let s = personalized_pagerank(&pg, u, &cfg).unwrap();
                prop_assert!((s.total() - 1.0).abs() <= 1e-9);
                prop_assert!(s.scores.iter().all(|&x| x >= 0.0));
                prop_assert_eq!(s.iterations, 20);
                for w in s.deltas[1..].windows(2) {
                    prop_assert!(w[1] <= w[0] * (1.0 + 1e-12), "{} {:?}", v, s.deltas);
                }
                let last = *s.deltas.last().unwrap();
                prop_assert!(last < 10.0 * 0.85f64.powi(20));
                prop_assert!(last <= 2.0 * 0.85f64.powi(20) * (1.0 + 1e-9));
            }
        }
    }

    #[test]
    fn iteration_matches_the_linear_solve(rows in strategy::rows(5, 5)) {
        let Some(g) = tpg(&rows) else { return Ok(()) };
        for v in Variant::EVALUATED {
            let pg = build_variant(&g, v).unwrap();
            if pg.roster().len() > 50 {
                continue;
            }
            for &u in &pg.roster().users {
                let it = personalized_pagerank(&pg, u, &converged()).unwrap();
                let exact = solve(&pg, u, 0.85);
                for (a, b) in it.scores.iter().zip(&exact) {
                    prop_assert!((a - b).abs() <= 1e-6, "{}: {} vs {}", v, a, b);
                }
            }
        }
    }

    #[test]
    fn recommendations_ignore_input_order(rows in strategy::rows(5, 6), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut seen = BTreeSet::new();
        let rows: Vec<_> = rows.into_iter().filter(|&(u, i, _)| seen.insert((u, i))).collect();
        let mut shuffled = rows.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let (Some(a), Some(b)) = (tpg(&rows), tpg(&shuffled)) else { return Ok(()) };
        prop_assert_eq!(&a, &b);
        for v in Variant::EVALUATED {
            let (pa, pb) = (build_variant(&a, v).unwrap(), build_variant(&b, v).unwrap());
            for &u in &pa.roster().users {
                let none = BTreeSet::new();
                let la = recommend(&pa, u, 6, CandidateSet::Untrained(&none), &PprConfig::default()).unwrap();
                let lb = recommend(&pb, u, 6, CandidateSet::Untrained(&none), &PprConfig::default()).unwrap();
                prop_assert_eq!(la, lb);
            }
        }
    }
}

#[test]
fn linear_solve_on_fixed_graphs() {
    for seed in 0..30 {
        let g = random_tpg(seed);
        for v in Variant::EVALUATED {
            let pg = build_variant(&g, v).unwrap();
            if pg.roster().len() > 50 {
                continue;
            }
            let u = pg.roster().users[0];
            let it = personalized_pagerank(&pg, u, &converged()).unwrap();
            let exact = solve(&pg, u, 0.85);
            let worst = it.scores.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(worst <= 1e-6, "seed {seed} {v}: {worst}");
        }
    }
}

struct Contaminated {
    catalog: Catalog,
    g: TripartitePreferenceGraph,
}

impl Contaminated {
    fn load() -> Self {
        let (catalog, g) = read_pairs(&common::fixture("contaminated.pairs")).unwrap();
        Contaminated { catalog, g }
    }

    fn item(&self, l: &str) -> ItemId {
        self.catalog.item(l).unwrap()
    }

    fn jack(&self) -> UserId {
        self.catalog.user("Jack").unwrap()
    }

    fn score(&self, v: Variant, rep: RepresentativeNode) -> f64 {
        let pg = build_variant(&self.g, v).unwrap();
        let s = personalized_pagerank(&pg, self.jack(), &PprConfig::default()).unwrap();
        let row = pg.row_of(&self.g, prefgraph::preference::Node::Rep(self.g.rep_index(rep).unwrap()));
        row.map_or(0.0, |r| s.scores[r])
    }
}

#[test]
fn grank_scores_a_desirable_and_reliable_variants_do_not() {
    let f = Contaminated::load();
    let a_d = RepresentativeNode::desirable(f.item("A"));
    assert!(f.score(Variant::Grank, a_d) > 0.0);
    for v in [Variant::Unc, Variant::Pnc, Variant::Rnc] {
        assert_eq!(f.score(v, a_d), 0.0, "{v}");
        assert!(f.score(v, a_d) < f.score(v, RepresentativeNode::desirable(f.item("B"))));
    }
}

#[test]
fn seven_step_walk_reaches_a_desirable() {
    let f = Contaminated::load();
    let t = build_variant(&f.g, Variant::Grank).unwrap();
    let n = t.roster().len();
    let mut p = vec![0.0; n];
    p[t.roster().user_row(f.jack()).unwrap()] = 1.0;
    for _ in 0..6 {
        let mut next = vec![0.0; n];
        for (r, c, v) in t.adjacency().triplets() {
            next[c] += p[r] * v;
        }
        p = next;
    }
    let a_d = f.g.rep_index(RepresentativeNode::desirable(f.item("A"))).unwrap();
    let col = t.row_of(&f.g, prefgraph::preference::Node::Rep(a_d)).unwrap();
    assert!(p[col] > 0.0);
}

#[test]
fn jack_ranks_b_above_a_under_reliable_variants() {
    let f = Contaminated::load();
    let cfg = PprConfig::default();
    for v in [Variant::Unc, Variant::Pnc, Variant::Rnc] {
        let pg = build_variant(&f.g, v).unwrap();
        let s = personalized_pagerank(&pg, f.jack(), &cfg).unwrap();
        let ranked = rank_items(&pg, &s, [f.item("A"), f.item("B")]);
        assert_eq!(ranked[0].item, f.item("B"), "{v}");
        assert!(ranked[0].rank > ranked[1].rank);
    }
}

#[test]
fn grank_and_unc_disagree_on_the_contaminated_item() {
    let f = Contaminated::load();
    let cfg = PprConfig::default();
    let rank_a = |v| {
        let pg = build_variant(&f.g, v).unwrap();
        let s = personalized_pagerank(&pg, f.jack(), &cfg).unwrap();
        rank_items(&pg, &s, [f.item("A")])[0].rank
    };
    assert_ne!(rank_a(Variant::Grank), rank_a(Variant::Unc));
}

#[test]
fn two_node_cycle_closed_form() {
    let g = tpg(&[(0, 0, 5), (0, 1, 3)]).unwrap();
    let pg = build_variant(&g, Variant::Rnc).unwrap();
    let s = personalized_pagerank(&pg, UserId(0), &converged()).unwrap();
    // User -> {A_d, B_u} -> user: the user row solves p = 0.85 p + 0.15 over the cycle.
    let pu = 0.15 / (1.0 - 0.85 * 0.85);
    assert!((s.scores[0] - pu).abs() < 1e-12);
    assert!((s.scores[1..].iter().sum::<f64>() - 0.85 * pu).abs() < 1e-12);
}

#[test]
fn trained_items_are_filtered_before_ranking() {
    let g = tpg(&[(0, 0, 5), (0, 1, 3)]).unwrap();
    let pg = build_variant(&g, Variant::Unc).unwrap();
    let trained: BTreeSet<ItemId> = [ItemId(0), ItemId(1)].into();
    let list = recommend(&pg, UserId(0), 1, CandidateSet::Untrained(&trained), &PprConfig::default()).unwrap();
    assert!(list.items.is_empty());
    let none = BTreeSet::new();
    let list = recommend(&pg, UserId(0), 1, CandidateSet::Untrained(&none), &PprConfig::default()).unwrap();
    assert_eq!(list.items[0].item, ItemId(0));
    let all = recommend(&pg, UserId(0), 10, CandidateSet::Untrained(&none), &PprConfig::default()).unwrap();
    assert_eq!(all.items.len(), 2);
    assert!(matches!(
        recommend(&pg, UserId(7), 1, CandidateSet::Untrained(&none), &PprConfig::default()),
        Err(Error::UnknownUser(_))
    ));
}

#[test]
fn unrepresented_items_rank_zero_after_positive_ones() {
    let g = tpg(&[(0, 0, 5), (0, 1, 3), (1, 0, 4), (1, 2, 1)]).unwrap();
    let pg = build_variant(&g, Variant::Unc).unwrap();
    let s = personalized_pagerank(&pg, UserId(0), &PprConfig::default()).unwrap();
    let ranked = rank_items(&pg, &s, [ItemId(9), ItemId(0), ItemId(1)]);
    assert_eq!(ranked[0].item, ItemId(0));
    let missing = ranked.iter().find(|r| r.item == ItemId(9)).unwrap();
    assert_eq!(missing.rank, 0.0);
    assert!(ranked.iter().position(|r| r.item == ItemId(9)).unwrap() > 0);
}

#[test]
fn repeated_runs_are_identical() {
    let g = random_tpg(3);
    let pg = build_variant(&g, Variant::Rnc).unwrap();
    let none = BTreeSet::new();
    let u = pg.roster().users[0];
    let a = recommend(&pg, u, 5, CandidateSet::Untrained(&none), &PprConfig::default()).unwrap();
    let b = recommend(&pg, u, 5, CandidateSet::Untrained(&none), &PprConfig::default()).unwrap();
    assert_eq!(a, b);
}
