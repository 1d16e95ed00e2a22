//! The `verify-propositions` sections.

use std::collections::BTreeSet;

use opaque_core::axioms::{negative_dominance_precondition, personal_good};
use opaque_core::constructions::{
    better_for_someone_worse_for_none, canonical, table6_group, table6_state_probability, two_thirds_pow, Check,
    PropositionInstance,
};
use opaque_core::explorer::{completion_tallies, conflict_scan, supervaluational_nd_precondition, ScanPair};
use opaque_core::model::{LifeId, Outcome};
use opaque_core::order::close_and_check;
use opaque_core::rational;
use opaque_core::{CertVerdict, CompletionOptions, DominanceGrade, OrderError, PartialPreorder, Principle, Verdict, Witness};
use serde_json::json;

use crate::prop4;
use crate::render::{certificate_json, certificate_text, Namer};
use crate::report::Section;

pub const SELECTORS: [&str; 9] = ["prop1", "prop2", "table3", "prop3", "prop4", "table6", "hare", "cycle", "supervaluation"];

#[derive(Clone, Debug)]
pub struct Options {
    pub k: u32,
    pub seed: u64,
    pub pairs: usize,
    pub guard: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { k: canonical::TABLE6_DEFAULT_K, seed: prop4::DEFAULT_SEED, pairs: prop4::RANDOM_PAIRS, guard: 8 }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SectionError {
    #[error("unknown selector {0:?}")]
    UnknownSelector(String),
    #[error("{0}")]
    Failed(String),
}

fn failed(e: impl std::fmt::Display) -> SectionError {
    SectionError::Failed(e.to_string())
}

fn expected_text(verdict: CertVerdict, grade: Option<DominanceGrade>) -> String {
    match grade {
        Some(g) => format!("{} ({})", verdict.name(), g.name()),
        None => verdict.name().to_string(),
    }
}

/// Checks every expectation an instance carries and records the conflict
/// certificates in full.
fn instance_checks(sec: &mut Section, inst: &PropositionInstance) -> Result<(), SectionError> {
    let namer = Namer::with_names(&inst.universe, &inst.outcomes);
    for r in inst.verify().map_err(failed)? {
        let e = &r.expectation;
        let got = expected_text(r.certificate.verdict, e.grade.and(r.certificate.grade));
        sec.check(format!("{}: {}", inst.name, e.check.describe()), expected_text(e.verdict, e.grade), got);
        if matches!(e.check, Check::JointInconsistency { .. }) || !r.matched {
            sec.certificates.push(certificate_json(&namer, &r.certificate));
            sec.note(certificate_text(&namer, &r.certificate, 0));
        }
    }
    Ok(())
}

fn conflict_shape(sec: &mut Section, inst: &PropositionInstance, left: &str, right: &str) -> Result<(), SectionError> {
    let check = Check::JointInconsistency {
        suite: vec![Principle::NegativeDominance, Principle::PersonalGood],
        left: left.into(),
        right: right.into(),
    };
    let cert = inst.run(&check).map_err(failed)?;
    let parts = cert.conflict_parts().map(|(r, f)| {
        format!("{} {} vs {} {}", r.principle, r.grade.map(|g| g.name()).unwrap_or("-"), f.principle, f.verdict.name())
    });
    sec.check(
        format!("{}: conflict on ({left}, {right})", inst.name),
        "PersonalGood Strict vs NegativeDominance Holds",
        parts.unwrap_or_else(|| String::from("no conflict")),
    );
    Ok(())
}

fn prop1() -> Result<Section, SectionError> {
    let mut sec = Section::new("prop1");
    for inst in [canonical::prop1(), canonical::prop1_worsening()] {
        conflict_shape(&mut sec, &inst, "L2", "L1")?;
        instance_checks(&mut sec, &inst)?;
    }
    Ok(sec)
}

fn prop2() -> Result<Section, SectionError> {
    let mut sec = Section::new("prop2");
    for inst in [canonical::prop2(false), canonical::prop2(true)] {
        conflict_shape(&mut sec, &inst, "L2", "L1")?;
        let p2 = inst.universe.individual_by_key("P2").ok_or_else(|| failed("P2 missing"))?;
        for l in ["L1", "L2"] {
            let e = inst.lottery(l).map_err(failed)?.existence_probability(p2);
            sec.check(format!("{}: P2 exists in {l} with probability", inst.name), "1/2", rational::format(&e));
        }
        let pg = personal_good(inst.lottery("L2").map_err(failed)?, inst.lottery("L1").map_err(failed)?, &inst.model.lives);
        sec.check(
            format!("{}: existence precondition of PersonalGood", inst.name),
            "met",
            if pg.verdict == CertVerdict::PreconditionFails { "fails" } else { "met" },
        );
        instance_checks(&mut sec, &inst)?;
    }
    Ok(sec)
}

fn table3() -> Result<Section, SectionError> {
    let mut sec = Section::new("table3");
    let inst = canonical::table3();
    conflict_shape(&mut sec, &inst, "L2", "L1")?;
    let p2 = inst.universe.individual_by_key("P2").ok_or_else(|| failed("P2 missing"))?;
    let a = inst.lottery("L1").map_err(failed)?.personal_lottery(p2);
    let b = inst.lottery("L2").map_err(failed)?.personal_lottery(p2);
    sec.check("table3: P2's personal lotteries under L1 and L2", "identical", if a == b { "identical" } else { "different" });
    instance_checks(&mut sec, &inst)?;
    instance_checks(&mut sec, &canonical::egalitarian())?;
    Ok(sec)
}

fn prop3() -> Result<Section, SectionError> {
    let mut sec = Section::new("prop3");
    for inst in [canonical::prop3_size1(), canonical::prop3(), canonical::prop3_leftover(), canonical::prop3_padded()] {
        conflict_shape(&mut sec, &inst, "L2", "L1")?;
        instance_checks(&mut sec, &inst)?;
        let pair = ScanPair {
            label: inst.name.clone(),
            left: inst.lottery("L2").map_err(failed)?.clone(),
            right: inst.lottery("L1").map_err(failed)?.clone(),
            dominance_view: None,
        };
        let report = conflict_scan(&inst.model, &[pair]).map_err(failed)?;
        sec.check(format!("{}: conflict scan flags the pair", inst.name), true, !report[0].conflicts.is_empty());
    }
    Ok(sec)
}

/// Groups as rows, states as columns, welfare of the group in each state.
fn table6_layout(inst: &PropositionInstance, k: u32) -> String {
    let u = &inst.universe;
    let people: Vec<_> = (1..(1u32 << k)).filter_map(|n| u.individual_by_key(&format!("P{n}"))).collect();
    let Ok(g) = inst.gamble("G1") else { return String::new() };
    let mut grid = vec![{
        let mut h = vec![String::new()];
        h.extend(g.states().iter().map(|s| format!("{} ({})", s.id, rational::Compact(&s.probability))));
        h.push(String::from("Pr(+|E)"));
        h
    }];
    let l1 = g.collapse();
    for j in 1..=k {
        let group = table6_group(&people, j);
        let (lo, hi) = (1u32 << (j - 1), (1u32 << j) - 1);
        let mut row = vec![if lo == hi { format!("P{lo}") } else { format!("P{lo}-{hi}") }];
        for s in g.states() {
            let i = group[0];
            row.push(if s.outcome.exists(i) { u.life_key(s.outcome.life_of(i)).to_string() } else { String::from("---") });
        }
        let e = l1.existence_probability(group[0]);
        let plus = u.life_by_key("+1").map(|p| l1.personal_lottery(group[0]).probability(p)).unwrap_or_default();
        row.push(rational::format(&(plus / e)));
        grid.push(row);
    }
    let width: Vec<usize> =
        (0..grid[0].len()).map(|c| grid.iter().map(|r| r[c].chars().count()).max().unwrap_or(0)).collect();
    let mut s = String::from("Lottery 1 (G1)\n");
    for row in &grid {
        let cells: Vec<String> = row.iter().enumerate().map(|(c, x)| format!("{x:<w$}", w = width[c])).collect();
        s.push_str(&format!("  {}\n", cells.join(" | ").trim_end()));
    }
    s
}

fn table6(k: u32) -> Result<Section, SectionError> {
    let mut sec = Section::new("table6");
    let inst = canonical::table6(k).map_err(failed)?;
    let g1 = inst.gamble("G1").map_err(failed)?;
    let g2 = inst.gamble("G2").map_err(failed)?;
    for (n, s) in g1.states().iter().take(k as usize).enumerate() {
        let want = table6_state_probability(n as u32 + 1);
        sec.check(format!("probability of {}", s.id), rational::format(&want), rational::format(&s.probability));
    }
    for n in 0..k as usize {
        for (name, g, want) in [("L1", g1, -1), ("L2", g2, 1)] {
            let t = inst.universe.total_welfare(&g.states()[n].outcome).map(|t| rational::format(&t));
            sec.check(
                format!("{name} total at {}", g.states()[n].id),
                rational::format(&rational::int(want)),
                t.unwrap_or_else(|| String::from("?")),
            );
        }
    }
    let total: opaque_core::Rational = g1.states().iter().map(|s| s.probability.clone()).sum();
    sec.check("state probabilities sum", "1/1", rational::format(&total));
    let people: Vec<_> = (1..(1u32 << k)).filter_map(|n| inst.universe.individual_by_key(&format!("P{n}"))).collect();
    let plus = inst.universe.life_by_key("+1").ok_or_else(|| failed("+1 missing"))?;
    let (l1, l2) = (inst.lottery("L1").map_err(failed)?, inst.lottery("L2").map_err(failed)?);
    for j in 1..=k {
        let group = table6_group(&people, j);
        sec.check(format!("group {j} size"), 1usize << (j - 1), group.len());
        let mut ok = true;
        for &i in group {
            let e1 = l1.existence_probability(i);
            ok &= e1 == two_thirds_pow(j - 1) && l2.existence_probability(i) == e1;
            ok &= l1.personal_lottery(i).probability(plus) / &e1 == rational::ratio(2, 3);
            ok &= l2.personal_lottery(i).probability(plus) / &e1 == rational::ratio(1, 3);
        }
        sec.check(format!("group {j}: existence (2/3)^{} and Pr(+|exists) 2/3 vs 1/3", j - 1), true, ok);
    }
    if let Some(last) = g1.states().last() {
        let t1 = inst.universe.total_welfare(&last.outcome).map(|t| rational::format(&t)).unwrap_or_default();
        let t2 = g2.states().last().and_then(|s| inst.universe.total_welfare(&s.outcome)).map(|t| rational::format(&t));
        sec.note(format!(
            "terminal state {} (probability {}): totals {t1} (L1) and {} (L2); the view drops it",
            last.id,
            rational::format(&last.probability),
            t2.unwrap_or_default()
        ));
    }
    instance_checks(&mut sec, &inst)?;
    let pair = ScanPair {
        label: String::from("L1 vs L2"),
        left: l1.clone(),
        right: l2.clone(),
        dominance_view: Some((inst.lottery("L1.view").map_err(failed)?.clone(), inst.lottery("L2.view").map_err(failed)?.clone())),
    };
    let report = conflict_scan(&inst.model, &[pair]).map_err(failed)?;
    let namer = Namer::with_names(&inst.universe, &inst.outcomes);
    let flagged = report[0].conflicts.iter().find(|c| {
        c.conflict_parts().is_some_and(|(r, f)| {
            r.principle == Principle::PersonalGood
                && r.grade == Some(DominanceGrade::Strict)
                && f.principle == Principle::Superdominance
        })
    });
    sec.check("conflict scan: PersonalGood Strict for L1 against Superdominance of L2", true, flagged.is_some());
    if let Some(c) = flagged {
        sec.certificates.push(certificate_json(&namer, c));
    }
    sec.note(table6_layout(&inst, k));
    sec.data = json!({"k": k, "conflicts": report[0].conflicts.len()});
    Ok(sec)
}

fn hare() -> Result<Section, SectionError> {
    let mut sec = Section::new("hare");
    let inst = canonical::hare();
    instance_checks(&mut sec, &inst)?;
    let sw = inst.run(&Check::StatewiseNegativeDominance { left: "G1".into(), right: "G2".into() }).map_err(failed)?;
    let sd = inst.run(&Check::StochasticDominance { left: "G1".into(), right: "G2".into() }).map_err(failed)?;
    sec.check("statewise NegativeDominance(G1, G2)", "Holds", sw.verdict.name());
    sec.check("StochasticDominance(collapsed G1, collapsed G2)", "Strict", sd.grade.map(|g| g.name()).unwrap_or("-"));
    let namer = Namer::with_names(&inst.universe, &inst.outcomes);
    sec.certificates.push(certificate_json(&namer, &sw));
    sec.certificates.push(certificate_json(&namer, &sd));
    Ok(sec)
}

fn cycle() -> Result<Section, SectionError> {
    let mut sec = Section::new("cycle");
    let c = canonical::sweetening_cycle();
    let namer = Namer::new(&c.universe);
    match close_and_check(&c.raw) {
        Err(OrderError::Cycle { cycle }) => {
            sec.check("closure fails with a cycle of length", 4, cycle.len());
            let names: Vec<String> = cycle.iter().map(|o| namer.outcome_text(o)).collect();
            sec.note(format!("cycle: {} > {}", names.join(" > "), names[0]));
            for k in 0..cycle.len() {
                let (x, y) = (&cycle[k], &cycle[(k + 1) % cycle.len()]);
                sec.check(
                    format!("{} better for someone, worse for no one than {}", namer.outcome_text(x), namer.outcome_text(y)),
                    true,
                    better_for_someone_worse_for_none(x, y, &c.lives) && c.raw.strict.contains(&(x.clone(), y.clone())),
                );
            }
        }
        Err(other) => {
            sec.check("closure fails with a cycle", "cycle", format!("{other}"));
        }
        Ok(_) => {
            sec.check("closure fails with a cycle", "cycle", "consistent");
        }
    }
    Ok(sec)
}

/// Counts Pareto-respecting weak orders by ranking every element with a rank
/// vector and filtering, independently of the completion enumerator.
pub fn brute_force_count(
    base: &PartialPreorder<Outcome>,
    lives: &PartialPreorder<LifeId>,
    left: &[Outcome],
    right: &[Outcome],
) -> (usize, usize) {
    let items = base.carrier().to_vec();
    let n = items.len();
    let mut seen = BTreeSet::new();
    let (mut count, mut with_pair) = (0, 0);
    let total = n.pow(n as u32);
    for code in 0..total {
        let mut rank = vec![0usize; n];
        let mut c = code;
        for r in rank.iter_mut() {
            *r = c % n;
            c /= n;
        }
        let mut used: Vec<usize> = rank.clone();
        used.sort_unstable();
        used.dedup();
        let norm: Vec<usize> = rank.iter().map(|r| used.binary_search(r).unwrap_or(0)).collect();
        if !seen.insert(norm.clone()) {
            continue;
        }
        let verdict = |i: usize, j: usize| match norm[i].cmp(&norm[j]) {
            std::cmp::Ordering::Greater => Verdict::Better,
            std::cmp::Ordering::Equal => Verdict::Equal,
            std::cmp::Ordering::Less => Verdict::Worse,
        };
        let extends = (0..n).all(|i| {
            (0..n).all(|j| match base.verdict_at(i, j) {
                Verdict::Incomparable => true,
                v => verdict(i, j) == v,
            })
        });
        let pareto = (0..n).all(|i| {
            (0..n).all(|j| i == j || !opaque_core::axioms::pareto_dominates(&items[i], &items[j], lives) || verdict(i, j) == Verdict::Better)
        });
        if extends && pareto {
            count += 1;
            let pos = |o: &Outcome| items.iter().position(|x| x == o).unwrap_or(0);
            if left.iter().any(|x| right.iter().any(|y| verdict(pos(x), pos(y)) == Verdict::Better)) {
                with_pair += 1;
            }
        }
    }
    (count, with_pair)
}

fn supervaluation(guard: usize) -> Result<Section, SectionError> {
    let mut sec = Section::new("supervaluation");
    let inst = canonical::prop1();
    let (l2, l1) = (inst.lottery("L2").map_err(failed)?, inst.lottery("L1").map_err(failed)?);
    let options = CompletionOptions { guard, ..CompletionOptions::default() };
    let cert = supervaluational_nd_precondition(&inst.model, l2, l1, options).map_err(failed)?;
    let nd = negative_dominance_precondition(l2, l1, &inst.model.outcomes).map_err(failed)?;
    sec.check("NegativeDominance(L2, L1) on the partial order", "Holds", nd.verdict.name());
    sec.check("supervaluational NegativeDominance(L2, L1)", "Violated", cert.verdict.name());
    let names = |xs: &[&str]| -> Result<Vec<Outcome>, SectionError> {
        xs.iter().map(|x| inst.outcome(x).cloned().map_err(failed)).collect()
    };
    let from = names(&["(a+,b)", "(b,a)"])?;
    let to = names(&["(a,a)", "(b,b)"])?;
    if let Witness::Supervaluation { rows } = &cert.witness {
        let ok = rows
            .iter()
            .all(|r| r.better_pair.as_ref().is_some_and(|(x, y)| from.contains(x) && to.contains(y)));
        sec.check("every lives completion yields a better pair from {(a+,b),(b,a)} to {(a,a),(b,b)}", true, ok);
    }
    let tallies = completion_tallies(&inst.model, l2, l1, options).map_err(failed)?;
    let support: Vec<Outcome> = from.iter().chain(&to).cloned().collect();
    let base = inst.model.outcomes.restrict(&support).map_err(failed)?;
    let (mut admissible, mut oracle) = (0usize, 0usize);
    for t in &tallies {
        let (count, with_pair) = brute_force_count(&base, &t.lives, &from, &to);
        sec.check("admissible completions with a better pair, per lives completion", t.admissible, t.with_better_pair);
        sec.check("admissible completions vs brute-force filter over weak orders", count, t.admissible);
        sec.check("better-pair completions vs brute force", with_pair, t.with_better_pair);
        admissible += t.admissible;
        oracle += count;
    }
    sec.check("total admissible completions vs brute force", oracle, admissible);
    let namer = Namer::with_names(&inst.universe, &inst.outcomes);
    sec.certificates.push(certificate_json(&namer, &cert));
    sec.data = json!({"lives_completions": tallies.len(), "admissible": admissible});
    Ok(sec)
}

pub fn run_section(name: &str, options: &Options) -> Result<Section, SectionError> {
    match name {
        "prop1" => prop1(),
        "prop2" => prop2(),
        "table3" => table3(),
        "prop3" => prop3(),
        "prop4" => prop4::prop4_section(options.seed, options.pairs).map_err(failed),
        "table6" => table6(options.k),
        "hare" => hare(),
        "cycle" => cycle(),
        "supervaluation" => supervaluation(options.guard),
        other => Err(SectionError::UnknownSelector(other.to_string())),
    }
}

/// Instances written by `--emit-model`, named by file stem.
pub fn emitted_instances(options: &Options) -> Vec<PropositionInstance> {
    let keys = ["prop1", "prop1-worsening", "prop2", "prop2-padded", "table3", "egalitarian"]
        .into_iter()
        .chain(["prop3-size1", "prop3", "prop3-leftover", "prop3-padded", "hare"]);
    let mut out: Vec<PropositionInstance> = keys
        .filter_map(|k| {
            let mut inst = canonical::instance(k)?;
            inst.name = k.to_string();
            Some(inst)
        })
        .collect();
    if let Ok(t) = canonical::table6(options.k) {
        out.push(t);
    }
    out
}
