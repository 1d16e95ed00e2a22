//! Searches over completions and candidate models.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::axioms::{
    incomparability_transmission_check, negative_dominance_precondition, pareto_check, personal_good,
    small_improvements_check, stochastic_dominance_certificate, superdominance, weak_anonymity_check,
    anonymity_permutations, demand, conflict, AxiomError, Demand, ValueModel,
};
use crate::certificate::{CertVerdict, Certificate, CompletionRow, DominanceGrade, Principle, Witness};
use crate::constraints::{ConstraintSet, ParetoOnOutcomes, Transitivity};
use crate::model::{LifeId, Lottery, Outcome};
use crate::order::{
    enumerate_completions, enumerate_extensions, CompletionOptions, OrderError, PartialPreorder, RawPreorder,
    Verdict, DEFAULT_GUARD,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExplorerError {
    #[error(transparent)]
    Axiom(#[from] AxiomError),
    #[error(transparent)]
    Order(#[from] OrderError<Outcome>),
    #[error("personal order: {0}")]
    Lives(OrderError<LifeId>),
    #[error("{0} cannot be used in a model search")]
    Unsupported(Principle),
}

fn support_union(l1: &Lottery, l2: &Lottery) -> Vec<Outcome> {
    l1.outcomes().chain(l2.outcomes()).cloned().collect::<BTreeSet<_>>().into_iter().collect()
}

fn first_better_pair(order: &PartialPreorder<Outcome>, l1: &Lottery, l2: &Lottery) -> Option<(Outcome, Outcome)> {
    for x in l1.outcomes() {
        for y in l2.outcomes() {
            if order.relate(x, y).ok() == Some(Verdict::Better) {
                return Some((x.clone(), y.clone()));
            }
        }
    }
    None
}

/// Total preorders on the lives that extend the model's personal order. Lives
/// that occur in the outcomes but not in the carrier join it unranked;
/// nonexistence joins only if the carrier already holds it.
pub fn lives_completions(
    lives: &PartialPreorder<LifeId>,
    outcomes: &[Outcome],
    options: CompletionOptions,
) -> Result<Vec<PartialPreorder<LifeId>>, ExplorerError> {
    let extra: BTreeSet<LifeId> = outcomes
        .iter()
        .flat_map(|o| o.iter().map(|(_, l)| *l))
        .filter(|l| !l.is_nonexistence() && !lives.contains(l))
        .collect();
    let base = lives.with_elements(extra);
    let none = ConstraintSet::new();
    Ok(enumerate_completions(&base, &none, options).map_err(ExplorerError::Lives)?.collect())
}

/// Negative Dominance read supervaluationally: the precondition holds if some
/// admissible completion of the outcome order, restricted to the two
/// supports, ranks no outcome of `l1` above any outcome of `l2`. A completion
/// is admissible when it is transitive and ranks every Pareto-better pair
/// better under some completion of the personal order.
pub fn supervaluational_nd_precondition(
    m: &ValueModel,
    l1: &Lottery,
    l2: &Lottery,
    options: CompletionOptions,
) -> Result<Certificate, ExplorerError> {
    let support = support_union(l1, l2);
    let base = m.outcomes.with_elements(support.iter().cloned()).restrict(&support)?;
    let lives = lives_completions(&m.lives, &support, options)?;
    let mut rows = Vec::new();
    let mut admissible = false;
    let mut clean = false;
    for (idx, lc) in lives.into_iter().enumerate() {
        let set = ConstraintSet::new().with(Transitivity).with(ParetoOnOutcomes { lives: lc });
        let mut pair = None;
        let mut found_clean = false;
        for completion in enumerate_completions(&base, &set, options)? {
            admissible = true;
            match first_better_pair(&completion, l1, l2) {
                None => {
                    found_clean = true;
                    break;
                }
                Some(p) => {
                    pair.get_or_insert(p);
                }
            }
        }
        if found_clean {
            clean = true;
            pair = None;
        }
        rows.push(CompletionRow { lives_completion: idx, better_pair: pair });
    }
    let (verdict, text) = if !admissible {
        (CertVerdict::PreconditionFails, String::from("no completion of the outcome order is admissible"))
    } else if clean {
        (CertVerdict::Holds, String::from("some admissible completion ranks no outcome of the left lottery above one of the right"))
    } else {
        (
            CertVerdict::Violated,
            String::from("every admissible completion ranks some outcome of the left lottery above one of the right"),
        )
    };
    Ok(Certificate::new(Principle::SupervaluationalNegativeDominance, verdict, Witness::Supervaluation { rows }, text))
}

/// Admissible completions under one completion of the personal order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletionTally {
    pub lives: PartialPreorder<LifeId>,
    pub admissible: usize,
    /// Completions ranking some outcome of the left lottery above one of the right.
    pub with_better_pair: usize,
}

/// Counts every admissible completion behind
/// [`supervaluational_nd_precondition`], one entry per personal completion.
pub fn completion_tallies(
    m: &ValueModel,
    l1: &Lottery,
    l2: &Lottery,
    options: CompletionOptions,
) -> Result<Vec<CompletionTally>, ExplorerError> {
    let support = support_union(l1, l2);
    let base = m.outcomes.with_elements(support.iter().cloned()).restrict(&support)?;
    lives_completions(&m.lives, &support, options)?
        .into_iter()
        .map(|lc| {
            let set = ConstraintSet::new().with(Transitivity).with(ParetoOnOutcomes { lives: lc.clone() });
            let mut t = CompletionTally { lives: lc, admissible: 0, with_better_pair: 0 };
            for c in enumerate_completions(&base, &set, options)? {
                t.admissible += 1;
                t.with_better_pair += usize::from(first_better_pair(&c, l1, l2).is_some());
            }
            Ok(t)
        })
        .collect()
}

/// Two lotteries whose verdict the search chooses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LotteryTemplate {
    pub label: String,
    pub left: Lottery,
    pub right: Lottery,
}

/// Inputs to an exhaustive model search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchSpec {
    pub lives: Vec<LifeId>,
    /// Strict personal claims every candidate must keep.
    pub base_lives: Vec<(LifeId, LifeId)>,
    /// Pairs of lives every candidate must leave incomparable.
    pub incomparable_lives: Vec<(LifeId, LifeId)>,
    pub outcomes: Vec<Outcome>,
    pub axioms: Vec<Principle>,
    pub lotteries: Vec<LotteryTemplate>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub guard: usize,
    pub max_candidates: u128,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { guard: DEFAULT_GUARD, max_candidates: 50_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoundModel {
    pub model: ValueModel,
    /// Chosen verdict of each template's left lottery against its right.
    pub verdicts: Vec<(String, Verdict)>,
    pub certificates: Vec<Certificate>,
    /// Index of the candidate in enumeration order.
    pub candidate: u128,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    ModelFound(FoundModel),
    Exhausted { candidates: u128, tally: BTreeMap<Principle, u128> },
    BoundsExceeded { what: String, size: u128, limit: u128 },
}

/// Axioms a search can check.
pub const SUPPORTED: [Principle; 9] = [
    Principle::IncomparabilityTransmission,
    Principle::Pareto,
    Principle::WeakAnonymity,
    Principle::Transitivity,
    Principle::PersonalGood,
    Principle::StochasticDominance,
    Principle::Superdominance,
    Principle::NegativeDominance,
    Principle::SmallImprovements,
];

const VERDICTS: [Verdict; 4] = [Verdict::Better, Verdict::Equal, Verdict::Worse, Verdict::Incomparable];

fn is_lottery_level(p: Principle) -> bool {
    matches!(
        p,
        Principle::PersonalGood | Principle::StochasticDominance | Principle::Superdominance | Principle::NegativeDominance
    )
}

fn graded_admits(forward: Option<DominanceGrade>, backward: Option<DominanceGrade>, v: Verdict) -> bool {
    let fits = |g: Option<DominanceGrade>, v: Verdict| match g {
        Some(DominanceGrade::Strict) => v == Verdict::Better,
        Some(DominanceGrade::Weak) => v.at_least_as_good(),
        _ => true,
    };
    fits(forward, v) && fits(backward, v.flip())
}

/// Forward and backward certificates of one lottery axiom on one template.
fn template_certificates(
    p: Principle,
    lives: &PartialPreorder<LifeId>,
    outcomes: &PartialPreorder<Outcome>,
    t: &LotteryTemplate,
) -> Result<[Certificate; 2], ExplorerError> {
    let run = |a: &Lottery, b: &Lottery| -> Result<Certificate, ExplorerError> {
        Ok(match p {
            Principle::PersonalGood => personal_good(a, b, lives),
            Principle::StochasticDominance => stochastic_dominance_certificate(a, b, outcomes)?,
            Principle::Superdominance => superdominance(a, b, outcomes)?,
            Principle::NegativeDominance => negative_dominance_precondition(a, b, outcomes)?,
            other => return Err(ExplorerError::Unsupported(other)),
        })
    };
    Ok([run(&t.left, &t.right)?, run(&t.right, &t.left)?])
}

/// Verdicts of the left template lottery against the right that a pair of
/// certificates admits.
pub fn admitted_verdicts(p: Principle, certs: &[Certificate; 2]) -> [bool; 4] {
    let [f, b] = certs;
    VERDICTS.map(|v| match p {
        Principle::PersonalGood | Principle::StochasticDominance => graded_admits(f.grade, b.grade, v),
        Principle::Superdominance => (!f.holds() || v == Verdict::Better) && (!b.holds() || v == Verdict::Worse),
        Principle::NegativeDominance => (!f.holds() || v != Verdict::Better) && (!b.holds() || v != Verdict::Worse),
        _ => true,
    })
}

fn model_certificate(p: Principle, m: &ValueModel) -> Result<Certificate, ExplorerError> {
    Ok(match p {
        Principle::IncomparabilityTransmission => incomparability_transmission_check(m),
        Principle::Pareto => pareto_check(m),
        Principle::SmallImprovements => small_improvements_check(m)?,
        Principle::Transitivity => Certificate::new(
            Principle::Transitivity,
            CertVerdict::Holds,
            Witness::None,
            "candidate orders are transitive by construction",
        ),
        Principle::WeakAnonymity => anonymity_permutations(m)
            .iter()
            .map(|pi| weak_anonymity_check(m, pi))
            .find(|c| c.verdict == CertVerdict::Violated)
            .unwrap_or_else(|| {
                Certificate::new(Principle::WeakAnonymity, CertVerdict::Holds, Witness::None, "no permuted pair is ranked")
            }),
        other => return Err(ExplorerError::Unsupported(other)),
    })
}

fn lives_candidates(spec: &SearchSpec, guard: usize) -> Result<Vec<PartialPreorder<LifeId>>, ExplorerError> {
    let mut raw = RawPreorder::new(spec.lives.clone());
    for &(x, y) in &spec.base_lives {
        raw = raw.better(x, y);
    }
    let base = raw.close().map_err(ExplorerError::Lives)?;
    let ext = enumerate_extensions(&base, guard).map_err(ExplorerError::Lives)?;
    Ok(ext
        .filter(|c| {
            spec.incomparable_lives
                .iter()
                .all(|(x, y)| c.relate(x, y).map(|v| v == Verdict::Incomparable).unwrap_or(true))
        })
        .collect())
}

/// Number of preorders on `n` elements, incomparability allowed.
fn preorder_count(n: usize) -> Option<u128> {
    [1u128, 1, 4, 29, 355, 6942, 209_527, 9_535_241, 642_779_354, 63_260_289_423, 8_977_053_873_043]
        .get(n)
        .copied()
}

/// Enumerates candidate models: personal orders extending the base that keep
/// the required pairs incomparable, every preorder on the registered
/// outcomes, and every verdict for each lottery template. Each candidate is
/// checked against the spec's axioms in the order listed; a rejected
/// candidate is tallied under the first axiom it fails. The first model
/// passing all of them is returned, re-verified.
pub fn find_model(spec: &SearchSpec, options: SearchOptions) -> Result<SearchOutcome, ExplorerError> {
    let guard = options.guard.min(crate::order::HARD_CEILING);
    let mut axioms: Vec<Principle> = Vec::new();
    for &p in &spec.axioms {
        if !SUPPORTED.contains(&p) {
            return Err(ExplorerError::Unsupported(p));
        }
        if !axioms.contains(&p) {
            axioms.push(p);
        }
    }
    for (what, size) in [("lives", spec.lives.len()), ("outcomes", spec.outcomes.len())] {
        if size > guard {
            return Ok(SearchOutcome::BoundsExceeded { what: String::from(what), size: size as u128, limit: guard as u128 });
        }
    }
    let outcomes: Vec<Outcome> = spec.outcomes.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let lives_list = lives_candidates(spec, guard)?;
    let per_model = 4u128.pow(spec.lotteries.len() as u32);
    let total = preorder_count(outcomes.len()).map(|c| c * lives_list.len() as u128 * per_model);
    match total {
        Some(t) if t <= options.max_candidates => {}
        other => {
            return Ok(SearchOutcome::BoundsExceeded {
                what: String::from("candidates"),
                size: other.unwrap_or(u128::MAX),
                limit: options.max_candidates,
            })
        }
    }
    let base = PartialPreorder::antichain(outcomes.iter().cloned());
    let mut tally: BTreeMap<Principle, u128> = BTreeMap::new();
    let mut candidates = 0u128;
    for lives in &lives_list {
        for order in enumerate_extensions(&base, guard)? {
            let m = ValueModel::new(lives.clone(), order);
            // Per-axiom results for this (lives, outcomes) pair, filled lazily.
            let mut model_ok: BTreeMap<Principle, bool> = BTreeMap::new();
            let mut admits: BTreeMap<Principle, Vec<[bool; 4]>> = BTreeMap::new();
            for combo in 0..per_model {
                let choice: Vec<usize> =
                    (0..spec.lotteries.len()).map(|k| ((combo >> (2 * k)) & 3) as usize).collect();
                let index = candidates;
                candidates += 1;
                let mut failed = None;
                for &p in &axioms {
                    let ok = if is_lottery_level(p) {
                        if !admits.contains_key(&p) {
                            let sets = spec
                                .lotteries
                                .iter()
                                .map(|t| Ok(admitted_verdicts(p, &template_certificates(p, &m.lives, &m.outcomes, t)?)))
                                .collect::<Result<_, ExplorerError>>()?;
                            admits.insert(p, sets);
                        }
                        admits[&p].iter().zip(&choice).all(|(s, &c)| s[c])
                    } else {
                        match model_ok.get(&p) {
                            Some(&ok) => ok,
                            None => {
                                let ok = model_certificate(p, &m)?.holds();
                                model_ok.insert(p, ok);
                                ok
                            }
                        }
                    };
                    if !ok {
                        failed = Some(p);
                        break;
                    }
                }
                if let Some(p) = failed {
                    *tally.entry(p).or_default() += 1;
                    continue;
                }
                let verdicts: Vec<(String, Verdict)> =
                    spec.lotteries.iter().zip(&choice).map(|(t, &c)| (t.label.clone(), VERDICTS[c])).collect();
                let found = FoundModel { model: m.clone(), certificates: Vec::new(), verdicts, candidate: index };
                let (ok, certificates) = verify_found(spec, &found)?;
                assert!(ok, "a candidate accepted by the search failed re-verification");
                return Ok(SearchOutcome::ModelFound(FoundModel { certificates, ..found }));
            }
        }
    }
    Ok(SearchOutcome::Exhausted { candidates, tally })
}

/// Re-checks a found model from scratch. Returns whether every axiom holds
/// together with the certificates used.
pub fn verify_found(spec: &SearchSpec, found: &FoundModel) -> Result<(bool, Vec<Certificate>), ExplorerError> {
    let m = &found.model;
    let mut ok = true;
    let mut certs = Vec::new();
    for &(x, y) in &spec.base_lives {
        ok &= m.lives.relate(&x, &y).map_err(ExplorerError::Lives)? == Verdict::Better;
    }
    for (x, y) in &spec.incomparable_lives {
        ok &= m.lives.relate(x, y).map_err(ExplorerError::Lives)? == Verdict::Incomparable;
    }
    for &p in SUPPORTED.iter().filter(|p| spec.axioms.contains(p)) {
        if is_lottery_level(p) {
            for (t, (_, v)) in spec.lotteries.iter().zip(&found.verdicts) {
                let pair = template_certificates(p, &m.lives, &m.outcomes, t)?;
                let idx = VERDICTS.iter().position(|x| x == v).expect("known verdict");
                ok &= admitted_verdicts(p, &pair)[idx];
                certs.extend(pair);
            }
        } else {
            let c = model_certificate(p, m)?;
            ok &= c.holds();
            certs.push(c);
        }
    }
    Ok((ok, certs))
}

/// A pair of lotteries to scan for conflicts. Outcome-level checks (Negative
/// Dominance, Stochastic Dominance, superdominance) use `dominance_view` when
/// given; Personal Good always uses the full lotteries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanPair {
    pub label: String,
    pub left: Lottery,
    pub right: Lottery,
    pub dominance_view: Option<(Lottery, Lottery)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanReport {
    pub label: String,
    /// Certificates for left against right, then right against left.
    pub forward: Vec<Certificate>,
    pub backward: Vec<Certificate>,
    pub conflicts: Vec<Certificate>,
}

fn direction(m: &ValueModel, full: (&Lottery, &Lottery), view: (&Lottery, &Lottery)) -> Result<Vec<Certificate>, AxiomError> {
    Ok(vec![
        personal_good(full.0, full.1, &m.lives),
        negative_dominance_precondition(view.0, view.1, &m.outcomes)?,
        stochastic_dominance_certificate(view.0, view.1, &m.outcomes)?,
        superdominance(view.0, view.1, &m.outcomes)?,
    ])
}

fn rivals(requires: &Certificate, rival: &Certificate) -> Certificate {
    let mut c = conflict(requires, rival);
    c.narrative = format!(
        "{} requires the left prospect to be better, while {} requires the right prospect to be better",
        requires.principle, rival.principle
    );
    c
}

/// Runs every lottery-level checker in both directions and pairs the
/// certificates that cannot hold together.
pub fn conflict_scan(m: &ValueModel, pairs: &[ScanPair]) -> Result<Vec<ScanReport>, AxiomError> {
    pairs
        .iter()
        .map(|p| {
            let (vl, vr) = p.dominance_view.as_ref().map(|(a, b)| (a, b)).unwrap_or((&p.left, &p.right));
            let forward = direction(m, (&p.left, &p.right), (vl, vr))?;
            let backward = direction(m, (&p.right, &p.left), (vr, vl))?;
            let by = |cs: &[Certificate], d: Demand| -> Vec<Certificate> {
                cs.iter().filter(|c| demand(c) == Some(d)).cloned().collect()
            };
            let (req_f, forb_f) = (by(&forward, Demand::Requires), by(&forward, Demand::Forbids));
            let (req_b, forb_b) = (by(&backward, Demand::Requires), by(&backward, Demand::Forbids));
            let mut conflicts = Vec::new();
            for r in &req_f {
                conflicts.extend(forb_f.iter().map(|f| conflict(r, f)));
                conflicts.extend(req_b.iter().map(|b| rivals(r, b)));
            }
            for r in &req_b {
                conflicts.extend(forb_b.iter().map(|f| conflict(r, f)));
            }
            Ok(ScanReport { label: p.label.clone(), forward, backward, conflicts })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::pareto_dominates;
    use crate::constructions::canonical;
    use alloc::vec;

    /// Every weak order on `n` items as a rank vector (lower rank is better).
    fn rank_vectors(n: usize) -> Vec<Vec<usize>> {
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

    fn lives_from_ranks(lives: &[LifeId], ranks: &[usize]) -> PartialPreorder<LifeId> {
        let pos: BTreeMap<LifeId, usize> = lives.iter().copied().zip(ranks.iter().copied()).collect();
        PartialPreorder::from_key(lives.iter().copied(), |l| core::cmp::Reverse(pos[l]))
    }

    #[test]
    fn fubini_oracle() {
        assert_eq!(rank_vectors(3).len(), 13);
        assert_eq!(rank_vectors(4).len(), 75);
    }

    #[test]
    fn supervaluation_prop1_matches_oracle() {
        let inst = canonical::prop1();
        let (l1, l2) = (inst.lottery("L1").unwrap(), inst.lottery("L2").unwrap());
        let cert = supervaluational_nd_precondition(&inst.model, l2, l1, CompletionOptions::default()).unwrap();
        assert_eq!(cert.verdict, CertVerdict::Violated);
        let Witness::Supervaluation { rows } = &cert.witness else { panic!("rows expected") };
        assert_eq!(rows.len(), 5);
        assert!(rows.iter().all(|r| r.better_pair.is_some()));

        // Oracle: rank every life and every support outcome directly.
        let life_ids: Vec<LifeId> = inst.model.lives.carrier().to_vec();
        let (a, ap) = (inst.universe.life_by_key("a").unwrap(), inst.universe.life_by_key("a+").unwrap());
        let support = support_union(l1, l2);
        let mut lives_count = 0;
        let mut oracle = Vec::new();
        for lr in rank_vectors(life_ids.len()) {
            let lc = lives_from_ranks(&life_ids, &lr);
            if lc.relate(&ap, &a).unwrap() != Verdict::Better {
                continue;
            }
            lives_count += 1;
            let mut admissible = 0;
            let mut clean = 0;
            for orank in rank_vectors(support.len()) {
                let better = |i: usize, j: usize| orank[i] < orank[j];
                let pareto_ok = (0..support.len()).all(|i| {
                    (0..support.len()).all(|j| !pareto_dominates(&support[i], &support[j], &lc) || better(i, j))
                });
                if !pareto_ok {
                    continue;
                }
                admissible += 1;
                let idx = |o: &Outcome| support.iter().position(|x| x == o).unwrap();
                if !l2.outcomes().any(|x| l1.outcomes().any(|y| better(idx(x), idx(y)))) {
                    clean += 1;
                }
            }
            assert!(admissible > 0);
            assert_eq!(clean, 0);
            oracle.push((lc, admissible));
        }
        assert_eq!(lives_count, 5);
        let tallies = completion_tallies(&inst.model, l2, l1, CompletionOptions::default()).unwrap();
        assert_eq!(tallies.len(), oracle.len());
        for t in &tallies {
            let (_, expected) = oracle.iter().find(|(lc, _)| *lc == t.lives).expect("same lives completions");
            assert_eq!(t.admissible, *expected);
            assert_eq!(t.with_better_pair, t.admissible);
        }
    }

    #[test]
    fn supervaluation_other_direction_holds() {
        let inst = canonical::prop1();
        let (l1, l2) = (inst.lottery("L1").unwrap(), inst.lottery("L2").unwrap());
        let cert = supervaluational_nd_precondition(&inst.model, l1, l2, CompletionOptions::default()).unwrap();
        assert_eq!(cert.verdict, CertVerdict::Holds);
    }

    #[test]
    fn supervaluation_without_admissible_completion() {
        let inst = canonical::prop1();
        let (l1, l2) = (inst.lottery("L1").unwrap(), inst.lottery("L2").unwrap());
        let mut m = inst.model.clone();
        // Rank (a,b) above its Pareto improvement inside the supports.
        let ab = inst.outcome("(a,b)").unwrap().clone();
        let apb = inst.outcome("(a+,b)").unwrap().clone();
        m.outcomes = RawPreorder::new(m.outcomes.carrier().to_vec()).better(ab.clone(), apb.clone()).close().unwrap();
        let l3 = Lottery::new([(ab, crate::rational::one())]).unwrap();
        let l4 = Lottery::new([(apb, crate::rational::one())]).unwrap();
        let cert = supervaluational_nd_precondition(&m, &l3, &l4, CompletionOptions::default()).unwrap();
        assert_eq!(cert.verdict, CertVerdict::PreconditionFails);
        let _ = (l1, l2);
    }

    fn prop1_spec(axioms: Vec<Principle>) -> SearchSpec {
        let inst = canonical::prop1();
        let u = &inst.universe;
        let (a, ap, b) = (u.life_by_key("a").unwrap(), u.life_by_key("a+").unwrap(), u.life_by_key("b").unwrap());
        SearchSpec {
            lives: vec![a, ap, b],
            base_lives: vec![(ap, a)],
            incomparable_lives: vec![(a, b)],
            outcomes: inst.outcomes.values().cloned().collect(),
            axioms,
            lotteries: vec![LotteryTemplate {
                label: String::from("L2 vs L1"),
                left: inst.lottery("L2").unwrap().clone(),
                right: inst.lottery("L1").unwrap().clone(),
            }],
        }
    }

    #[test]
    fn prop1_search_is_exhausted() {
        use Principle::*;
        let spec = prop1_spec(vec![IncomparabilityTransmission, PersonalGood, NegativeDominance, SmallImprovements]);
        match find_model(&spec, SearchOptions::default()).unwrap() {
            SearchOutcome::Exhausted { candidates, tally } => {
                assert_eq!(candidates, 2 * 6942 * 4);
                assert_eq!(tally.values().sum::<u128>(), candidates);
                assert!(tally[&SmallImprovements] > 0);
            }
            other => panic!("expected exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn dropping_small_improvements_finds_model() {
        use Principle::*;
        let spec = prop1_spec(vec![IncomparabilityTransmission, PersonalGood, NegativeDominance]);
        let SearchOutcome::ModelFound(found) = find_model(&spec, SearchOptions::default()).unwrap() else {
            panic!("expected a model")
        };
        assert_eq!(found.verdicts[0].1, Verdict::Better);
        let (ok, _) = verify_found(&spec, &found).unwrap();
        assert!(ok);
        let inst = canonical::prop1();
        let (ap, b) = (inst.universe.life_by_key("a+").unwrap(), inst.universe.life_by_key("b").unwrap());
        assert_eq!(found.model.lives.relate(&ap, &b).unwrap(), Verdict::Better);
    }

    #[test]
    fn search_bounds() {
        let mut spec = prop1_spec(vec![Principle::PersonalGood]);
        let opts = SearchOptions { guard: 4, ..SearchOptions::default() };
        assert!(matches!(find_model(&spec, opts).unwrap(), SearchOutcome::BoundsExceeded { .. }));
        spec.axioms.push(Principle::SupervaluationalNegativeDominance);
        assert!(find_model(&spec, SearchOptions::default()).is_err());
    }

    #[test]
    fn scan_prop1_and_table6() {
        let inst = canonical::prop1();
        let pair = ScanPair {
            label: String::from("prop1"),
            left: inst.lottery("L2").unwrap().clone(),
            right: inst.lottery("L1").unwrap().clone(),
            dominance_view: None,
        };
        let rep = &conflict_scan(&inst.model, &[pair]).unwrap()[0];
        assert_eq!(rep.conflicts.len(), 1);
        let (r, f) = rep.conflicts[0].conflict_parts().unwrap();
        assert_eq!((r.principle, f.principle), (Principle::PersonalGood, Principle::NegativeDominance));

        let t6 = canonical::table6(4).unwrap();
        let lot = |n: &str| t6.lottery(n).unwrap().clone();
        let pair = ScanPair {
            label: String::from("table6"),
            left: lot("L1"),
            right: lot("L2"),
            dominance_view: Some((lot("L1.view"), lot("L2.view"))),
        };
        let rep = &conflict_scan(&t6.model, &[pair]).unwrap()[0];
        let kinds: BTreeSet<(Principle, Principle)> = rep
            .conflicts
            .iter()
            .map(|c| {
                let (r, f) = c.conflict_parts().unwrap();
                (r.principle, f.principle)
            })
            .collect();
        assert!(kinds.contains(&(Principle::PersonalGood, Principle::Superdominance)));
        assert!(kinds.contains(&(Principle::PersonalGood, Principle::NegativeDominance)));
    }

    #[test]
    fn search_without_incomparable_pair_finds_model() {
        use Principle::*;
        let mut spec = prop1_spec(vec![IncomparabilityTransmission, PersonalGood, NegativeDominance, SmallImprovements]);
        spec.incomparable_lives.clear();
        let SearchOutcome::ModelFound(found) = find_model(&spec, SearchOptions::default()).unwrap() else {
            panic!("expected a model")
        };
        assert!(verify_found(&spec, &found).unwrap().0);
    }

    #[test]
    fn empty_axiom_set_accepts_first_candidate() {
        let spec = prop1_spec(Vec::new());
        let SearchOutcome::ModelFound(found) = find_model(&spec, SearchOptions::default()).unwrap() else {
            panic!("expected a model")
        };
        assert_eq!(found.candidate, 0);
    }

    #[test]
    fn search_is_deterministic_and_monotone() {
        use Principle::*;
        let full = prop1_spec(vec![IncomparabilityTransmission, PersonalGood, NegativeDominance, SmallImprovements]);
        let first = find_model(&full, SearchOptions::default()).unwrap();
        assert_eq!(first, find_model(&full, SearchOptions::default()).unwrap());
        let mut more = full.clone();
        more.axioms.push(Pareto);
        assert!(matches!(find_model(&more, SearchOptions::default()).unwrap(), SearchOutcome::Exhausted { .. }));
    }

    #[test]
    fn scan_identical_and_prop3() {
        let inst = canonical::prop3();
        let (l1, l2) = (inst.lottery("L1").unwrap().clone(), inst.lottery("L2").unwrap().clone());
        let same = ScanPair { label: String::from("same"), left: l1.clone(), right: l1.clone(), dominance_view: None };
        let pair = ScanPair { label: String::from("prop3"), left: l2, right: l1, dominance_view: None };
        let reps = conflict_scan(&inst.model, &[same, pair]).unwrap();
        assert!(reps[0].conflicts.is_empty());
        assert!(!reps[1].conflicts.is_empty());
    }

    #[test]
    fn antichain_supports_hold() {
        use crate::model::IndividualId;
        use crate::rational::one;
        let (a, b) = (LifeId(1), LifeId(2));
        let x = Outcome::of(&[(IndividualId(1), a)]);
        let y = Outcome::of(&[(IndividualId(1), b)]);
        let m = ValueModel::new(PartialPreorder::antichain([a, b]), PartialPreorder::antichain([x.clone(), y.clone()]));
        let l1 = Lottery::new([(x, one())]).unwrap();
        let l2 = Lottery::new([(y, one())]).unwrap();
        let cert = supervaluational_nd_precondition(&m, &l1, &l2, CompletionOptions::default()).unwrap();
        assert_eq!(cert.verdict, CertVerdict::Holds);
        // Lives completions: a > b, a = b, b > a.
        let Witness::Supervaluation { rows } = &cert.witness else { panic!() };
        assert_eq!(rows.len(), 3);
    }
}
