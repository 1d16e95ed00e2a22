use std::collections::{BTreeMap, BTreeSet};

use opaque_core::axioms::{
    negative_dominance_precondition, pareto_better, pareto_dominates, personal_good, replay_negative_dominance,
    replay_pareto, replay_personal_good, replay_stochastic_dominance, statewise_negative_dominance_precondition,
    stochastic_dominance, stochastic_dominance_certificate, stochastic_dominance_scoped, DominanceScope, ValueModel,
};
use opaque_core::constraints::{Constraint, ConstraintSet, Transitivity};
use opaque_core::explorer::supervaluational_nd_precondition;
use opaque_core::model::{Gamble, IndividualId, LifeId, Lottery, Outcome, Permutation, State};
use opaque_core::order::{enumerate_completions, upset_probability, CompletionOptions, RawPreorder};
use opaque_core::{CertVerdict, DominanceGrade, PartialPreorder, Rational, Verdict};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

fn config(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(0x5eed), failure_persistence: None, ..Config::default() }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Order built from ranks: a strict claim between different ranks, or an
/// equality within a rank, is kept when its mask bit is set. Higher rank is
/// better, so the claims are acyclic.
fn ranked_order<T: Ord + Clone + std::fmt::Debug>(carrier: &[T], ranks: &[u8], mask: &[bool]) -> PartialPreorder<T> {
    let mut raw = RawPreorder::new(carrier.to_vec());
    let n = carrier.len();
    for i in 0..n {
        for j in 0..n {
            if i == j || !mask[(i * n + j) % mask.len()] {
                continue;
            }
            if ranks[i] > ranks[j] {
                raw.strict.push((carrier[i].clone(), carrier[j].clone()));
            } else if ranks[i] == ranks[j] && i < j {
                raw.equal.push((carrier[i].clone(), carrier[j].clone()));
            }
        }
    }
    raw.close().expect("rank-respecting claims are acyclic")
}

#[derive(Clone, Debug)]
struct World {
    lives: PartialPreorder<LifeId>,
    order: PartialPreorder<Outcome>,
    l1: Lottery,
    l2: Lottery,
}

fn outcome_strategy(n_lives: u32) -> impl Strategy<Value = Outcome> {
    prop::collection::vec(0..=n_lives, 3).prop_map(|ls| {
        let mut o = Outcome::empty();
        for (k, l) in ls.into_iter().enumerate() {
            if l > 0 {
                o.set(IndividualId(k as u32 + 1), LifeId(l));
            }
        }
        o
    })
}

fn pool_strategy(n_lives: u32) -> impl Strategy<Value = Vec<Outcome>> {
    prop::collection::vec(outcome_strategy(n_lives), 1..=6)
        .prop_map(|v| v.into_iter().collect::<BTreeSet<_>>().into_iter().collect())
}

fn lottery_from(pool: &[Outcome], picks: &[(usize, u8)]) -> Lottery {
    let total: i64 = picks.iter().map(|&(_, w)| w as i64).sum();
    Lottery::new(picks.iter().map(|&(k, w)| (pool[k % pool.len()].clone(), q(w as i64, total)))).unwrap()
}

fn picks() -> impl Strategy<Value = Vec<(usize, u8)>> {
    prop::collection::vec((0usize..6, 1u8..=12), 1..=4)
}

fn world(complete: bool) -> impl Strategy<Value = World> {
    (2u32..=4).prop_flat_map(move |n| {
        (
            prop::collection::vec(0u8..4, n as usize),
            prop::collection::vec(any::<bool>(), 16),
            pool_strategy(n),
            prop::collection::vec(0u8..6, 6),
            prop::collection::vec(any::<bool>(), 36),
            picks(),
            picks(),
        )
            .prop_map(move |(lr, lm, pool, or, om, p1, p2)| {
                let lives_carrier: Vec<LifeId> = (1..=n).map(LifeId).collect();
                let lives = ranked_order(&lives_carrier, &lr, &lm);
                let om = if complete { vec![true] } else { om };
                let order = ranked_order(&pool, &or[..pool.len()], &om);
                World { lives, order, l1: lottery_from(&pool, &p1), l2: lottery_from(&pool, &p2) }
            })
    })
}

/// Same states and probabilities, independent prizes.
fn gamble_pair() -> impl Strategy<Value = (Gamble, Gamble, PartialPreorder<Outcome>)> {
    (
        pool_strategy(3),
        prop::collection::vec((1u8..=12, 0usize..6, 0usize..6), 1..=4),
        prop::collection::vec(0u8..6, 6),
        prop::collection::vec(any::<bool>(), 36),
    )
        .prop_map(|(pool, states, ranks, mask)| {
            let total: i64 = states.iter().map(|s| s.0 as i64).sum();
            let mk = |pick: fn(&(u8, usize, usize)) -> usize| {
                Gamble::new(
                    states
                        .iter()
                        .enumerate()
                        .map(|(k, s)| State {
                            id: format!("s{}", k + 1),
                            probability: q(s.0 as i64, total),
                            outcome: pool[pick(s) % pool.len()].clone(),
                        })
                        .collect(),
                )
                .unwrap()
            };
            let g1 = mk(|s| s.1);
            let g2 = mk(|s| s.2);
            let order = ranked_order(&pool, &ranks[..pool.len()], &mask);
            (g1, g2, order)
        })
}

/// Every weak order on `n` items as rank vectors (lower is better).
fn weak_orders(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; n];
    fn go(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == cur.len() {
            let used: BTreeSet<usize> = cur.iter().copied().collect();
            if used.len() == used.iter().max().map_or(0, |m| m + 1) {
                out.push(cur.clone());
            }
            return;
        }
        for r in 0..cur.len() {
            cur[k] = r;
            go(k + 1, cur, out);
        }
    }
    go(0, &mut cur, &mut out);
    out
}

proptest! {
    #![proptest_config(config(10_000))]

    #[test]
    fn strict_sd_defeats_nd_precondition(w in world(false)) {
        if stochastic_dominance(&w.l1, &w.l2, &w.order).unwrap() == DominanceGrade::Strict {
            let nd = negative_dominance_precondition(&w.l1, &w.l2, &w.order).unwrap();
            prop_assert_eq!(nd.verdict, CertVerdict::Violated);
        }
    }

    #[test]
    fn nd_precondition_implies_statewise((g1, g2, order) in gamble_pair()) {
        let nd = negative_dominance_precondition(&g1.collapse(), &g2.collapse(), &order).unwrap();
        if nd.holds() {
            let sw = statewise_negative_dominance_precondition(&g1, &g2, &order).unwrap();
            prop_assert!(sw.holds());
        }
    }

    #[test]
    fn personal_marginals_resum(w in world(false)) {
        for lottery in [&w.l1, &w.l2] {
            for i in (1..=4).map(IndividualId) {
                let pl = lottery.personal_lottery(i);
                prop_assert_eq!(pl.total(), q(1, 1));
                let mut oracle: BTreeMap<LifeId, Rational> = BTreeMap::new();
                let mut exists = q(0, 1);
                for (o, p) in lottery.iter() {
                    *oracle.entry(o.life_of(i)).or_insert_with(|| q(0, 1)) += p;
                    if o.exists(i) {
                        exists += p;
                    }
                }
                for (l, p) in &oracle {
                    prop_assert_eq!(&pl.probability(*l), p);
                }
                prop_assert_eq!(pl.lives().count(), oracle.len());
                prop_assert_eq!(lottery.existence_probability(i), exists);
            }
        }
    }

    #[test]
    fn completions_reverify(
        n in 1usize..=4,
        ranks in prop::collection::vec(0u8..4, 4),
        mask in prop::collection::vec(prop::bool::weighted(0.3), 16),
    ) {
        let carrier: Vec<i32> = (0..n as i32).collect();
        let base = ranked_order(&carrier, &ranks[..n], &mask);
        let none = ConstraintSet::new();
        let mut count = 0;
        for c in enumerate_completions(&base, &none, CompletionOptions::default()).unwrap() {
            prop_assert!(c.is_complete());
            prop_assert!(c.extends(&base));
            prop_assert!(Constraint::<i32>::admits(&Transitivity, &c));
            count += 1;
        }
        let oracle = weak_orders(n)
            .into_iter()
            .filter(|r| {
                (0..n).all(|i| (0..n).all(|j| match base.verdict_at(i, j) {
                    Verdict::Better => r[i] < r[j],
                    Verdict::Equal => r[i] == r[j],
                    Verdict::Worse => r[i] > r[j],
                    Verdict::Incomparable => true,
                }))
            })
            .count();
        prop_assert_eq!(count, oracle);
    }

    #[test]
    fn upset_is_antitone(w in world(false)) {
        let carrier = w.order.carrier().to_vec();
        let up = |x: &Outcome| upset_probability(w.l1.iter(), &w.order, x).unwrap();
        for x in &carrier {
            for y in &carrier {
                if w.order.relate(x, y).unwrap().at_least_as_good() {
                    prop_assert!(up(x) <= up(y));
                }
            }
        }
    }
}

fn relabel(l: &Lottery, pi: &Permutation) -> Lottery {
    Lottery::new(l.iter().map(|(o, p)| (pi.apply(o), p.clone()))).unwrap()
}

/// Complete personal order and an outcome order ranking by summed life
/// ranks, which respects Pareto.
fn complete_model() -> impl Strategy<Value = World> {
    (
        prop::collection::vec(0u8..4, 3),
        pool_strategy(3),
        picks(),
        picks(),
    )
        .prop_map(|(lr, pool, p1, p2)| {
            let carrier: Vec<LifeId> = (1..=3).map(LifeId).collect();
            let rank: BTreeMap<LifeId, u32> = carrier.iter().copied().zip(lr.iter().map(|&r| r as u32 + 1)).collect();
            let lives = PartialPreorder::from_key(carrier, |l| rank[l]);
            let order = PartialPreorder::from_key(pool.clone(), |o| {
                (o.existents().collect::<Vec<_>>(), o.iter().map(|(_, l)| rank[l]).sum::<u32>())
            });
            World { lives, order, l1: lottery_from(&pool, &p1), l2: lottery_from(&pool, &p2) }
        })
}

proptest! {
    #![proptest_config(config(1_000))]

    #[test]
    fn personal_good_ignores_labels(w in world(false), swap in (1u32..=3, 1u32..=3)) {
        let pi = if swap.0 == swap.1 { Permutation::identity() } else {
            Permutation::swap(IndividualId(swap.0), IndividualId(swap.1))
        };
        let before = personal_good(&w.l1, &w.l2, &w.lives);
        let after = personal_good(&relabel(&w.l1, &pi), &relabel(&w.l2, &pi), &w.lives);
        prop_assert_eq!(before.verdict, after.verdict);
        prop_assert_eq!(before.grade, after.grade);
    }

    #[test]
    fn pareto_is_asymmetric(w in world(false)) {
        for x in w.order.carrier() {
            for y in w.order.carrier() {
                if pareto_dominates(x, y, &w.lives) {
                    prop_assert!(!pareto_dominates(y, x, &w.lives));
                    prop_assert!(pareto_better(x, y, &w.lives).holds());
                }
            }
        }
    }

    #[test]
    fn closing_is_idempotent(w in world(false)) {
        prop_assert_eq!(w.order.to_raw().close().unwrap(), w.order.clone());
        prop_assert_eq!(w.lives.to_raw().close().unwrap(), w.lives.clone());
    }

    #[test]
    fn sd_scope_irrelevant_on_total_orders(w in world(true)) {
        let a = stochastic_dominance_scoped(&w.l1, &w.l2, &w.order, DominanceScope::Supports).unwrap();
        let b = stochastic_dominance_scoped(&w.l1, &w.l2, &w.order, DominanceScope::Carrier).unwrap();
        prop_assert_eq!(a.grade, b.grade);
    }

    #[test]
    fn certificates_replay(w in world(false)) {
        let nd = negative_dominance_precondition(&w.l1, &w.l2, &w.order).unwrap();
        prop_assert!(replay_negative_dominance(&nd, &w.l1, &w.l2, &w.order));
        let sd = stochastic_dominance_certificate(&w.l1, &w.l2, &w.order).unwrap();
        prop_assert!(replay_stochastic_dominance(&sd, &w.l1, &w.l2, &w.order));
        let pg = personal_good(&w.l1, &w.l2, &w.lives);
        prop_assert!(replay_personal_good(&pg, &w.l1, &w.l2, &w.lives));
        for x in w.order.carrier() {
            for y in w.order.carrier() {
                let c = pareto_better(x, y, &w.lives);
                prop_assert!(replay_pareto(&c, x, y, &w.lives));
            }
        }
    }
}

proptest! {
    #![proptest_config(config(300))]

    #[test]
    fn supervaluation_degenerates_on_complete_orders(w in complete_model()) {
        let m = ValueModel::new(w.lives.clone(), w.order.clone());
        let sv = supervaluational_nd_precondition(&m, &w.l1, &w.l2, CompletionOptions::default()).unwrap();
        let nd = negative_dominance_precondition(&w.l1, &w.l2, &w.order).unwrap();
        prop_assert_eq!(sv.verdict, nd.verdict);
    }
}

#[test]
fn sd_scope_matters_on_partial_orders() {
    let p = IndividualId(1);
    let o = |l: u32| Outcome::of(&[(p, LifeId(l))]);
    let (w, y, z, iso, low) = (o(1), o(2), o(3), o(4), o(5));
    let l1 = Lottery::new([(w.clone(), q(1, 2)), (iso.clone(), q(1, 2))]).unwrap();
    let l2 = Lottery::new([(y.clone(), q(1, 2)), (z.clone(), q(1, 2))]).unwrap();
    let base = RawPreorder::new(vec![w.clone(), y.clone(), z.clone(), iso.clone()])
        .better(w.clone(), y.clone())
        .better(w.clone(), z.clone());
    let r = base.close().unwrap();
    assert_eq!(stochastic_dominance(&l1, &l2, &r).unwrap(), DominanceGrade::Strict);
    let grown = base.better(y, low.clone()).better(z, low).close().unwrap();
    let supports = stochastic_dominance_scoped(&l1, &l2, &grown, DominanceScope::Supports).unwrap();
    let carrier = stochastic_dominance_scoped(&l1, &l2, &grown, DominanceScope::Carrier).unwrap();
    assert_eq!(supports.grade, Some(DominanceGrade::Strict));
    assert_eq!(carrier.verdict, CertVerdict::Violated);
}
