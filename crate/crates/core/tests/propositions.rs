use opaque_core::axioms::personal_good;
use opaque_core::constructions::{canonical, table6_group, two_thirds_pow, Check};
use opaque_core::explorer::{conflict_scan, ScanPair};
use opaque_core::model::LifeId;
use opaque_core::order::close_and_check;
use opaque_core::{CertVerdict, DominanceGrade, OrderError, Principle, Rational};

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn conflict_of(inst: &opaque_core::constructions::PropositionInstance, left: &str, right: &str) -> CertVerdict {
    let check = Check::JointInconsistency {
        suite: vec![Principle::NegativeDominance, Principle::PersonalGood],
        left: left.into(),
        right: right.into(),
    };
    inst.run(&check).unwrap().verdict
}

#[test]
fn lottery_two_is_required_and_forbidden() {
    for inst in [
        canonical::prop1(),
        canonical::prop1_worsening(),
        canonical::prop2(false),
        canonical::prop2(true),
        canonical::table3(),
        canonical::prop3_size1(),
        canonical::prop3(),
        canonical::prop3_leftover(),
    ] {
        let pg = inst.run(&Check::PersonalGood { left: "L2".into(), right: "L1".into() }).unwrap();
        assert_eq!(pg.grade, Some(DominanceGrade::Strict), "{}", inst.name);
        let nd = inst.run(&Check::NegativeDominance { left: "L2".into(), right: "L1".into() }).unwrap();
        assert_eq!(nd.verdict, CertVerdict::Holds, "{}", inst.name);
        assert_eq!(conflict_of(&inst, "L2", "L1"), CertVerdict::Holds, "{}", inst.name);
        assert!(inst.all_match().unwrap(), "{}", inst.name);
    }
}

#[test]
fn second_person_marginals_match() {
    let inst = canonical::table3();
    let p2 = inst.universe.individual_by_key("P2").unwrap();
    let a = inst.lottery("L1").unwrap().personal_lottery(p2);
    let b = inst.lottery("L2").unwrap().personal_lottery(p2);
    assert_eq!(a, b);
    for inst in [canonical::prop2(false), canonical::prop2(true)] {
        let p2 = inst.universe.individual_by_key("P2").unwrap();
        assert_eq!(inst.lottery("L1").unwrap().existence_probability(p2), q(1, 2));
        assert_eq!(inst.lottery("L2").unwrap().existence_probability(p2), q(1, 2));
        let pg = personal_good(inst.lottery("L2").unwrap(), inst.lottery("L1").unwrap(), &inst.model.lives);
        assert_ne!(pg.verdict, CertVerdict::PreconditionFails);
    }
}

#[test]
fn truncated_st_petersburg_pair() {
    let k = 6;
    let inst = canonical::table6(k).unwrap();
    let g1 = inst.gamble("G1").unwrap();
    let g2 = inst.gamble("G2").unwrap();
    let expected = [q(1, 3), q(2, 9), q(4, 27), q(8, 81), q(16, 243), q(32, 729)];
    for (s, p) in g1.states().iter().zip(&expected) {
        assert_eq!(&s.probability, p);
    }
    for s in 0..k as usize {
        assert_eq!(inst.universe.total_welfare(&g1.states()[s].outcome).unwrap(), q(-1, 1));
        assert_eq!(inst.universe.total_welfare(&g2.states()[s].outcome).unwrap(), q(1, 1));
    }
    let people: Vec<_> = (1..(1u32 << k)).map(|n| inst.universe.individual_by_key(&format!("P{n}")).unwrap()).collect();
    let plus = inst.universe.life_by_key("+1").unwrap();
    let (l1, l2) = (inst.lottery("L1").unwrap(), inst.lottery("L2").unwrap());
    for j in 1..=k {
        for &i in table6_group(&people, j) {
            let e = l1.existence_probability(i);
            assert_eq!(e, two_thirds_pow(j - 1));
            assert_eq!(l2.existence_probability(i), e);
            assert_eq!(l1.personal_lottery(i).probability(plus) / &e, q(2, 3));
            assert_eq!(l2.personal_lottery(i).probability(plus) / &e, q(1, 3));
        }
    }
    let pair = ScanPair {
        label: "table6".into(),
        left: l1.clone(),
        right: l2.clone(),
        dominance_view: Some((inst.lottery("L1.view").unwrap().clone(), inst.lottery("L2.view").unwrap().clone())),
    };
    let report = &conflict_scan(&inst.model, &[pair]).unwrap()[0];
    assert!(report.conflicts.iter().any(|c| {
        let (r, f) = c.conflict_parts().unwrap();
        r.principle == Principle::PersonalGood
            && r.grade == Some(DominanceGrade::Strict)
            && f.principle == Principle::Superdominance
    }));
}

#[test]
fn hare_gambles_conflict() {
    let inst = canonical::hare();
    let sw = inst.run(&Check::StatewiseNegativeDominance { left: "G1".into(), right: "G2".into() }).unwrap();
    let sd = inst.run(&Check::StochasticDominance { left: "G1".into(), right: "G2".into() }).unwrap();
    assert_eq!(sw.verdict, CertVerdict::Holds);
    assert_eq!(sd.grade, Some(DominanceGrade::Strict));
}

#[test]
fn better_for_someone_cycles() {
    let c = canonical::sweetening_cycle();
    match close_and_check(&c.raw) {
        Err(OrderError::Cycle { cycle }) => {
            assert_eq!(cycle.len(), 4);
            for k in 0..4 {
                let edge = (cycle[k].clone(), cycle[(k + 1) % 4].clone());
                assert!(c.raw.strict.contains(&edge));
            }
        }
        other => panic!("expected a cycle, got {other:?}"),
    }
    assert!(c.lives.contains(&LifeId(1)));
}
