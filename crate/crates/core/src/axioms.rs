//! One checker per principle.
//!
//! Lottery-level checkers take the orders they need directly. Model-level
//! checkers read a [`ValueModel`]. Every checker returns a [`Certificate`];
//! the `replay_*` functions re-derive a certificate's witness from the
//! definitions without reusing the checker's code path.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::certificate::{CertVerdict, Certificate, DominanceGrade, Principle, Witness};
use crate::model::{Gamble, IndividualId, LifeId, Lottery, Outcome, Permutation, PersonalLottery};
use crate::order::{upset_probability, OrderError, PartialPreorder, Verdict};
use crate::rational::{self, Rational};

/// The personal order on lives, the impersonal order on outcomes and,
/// optionally, an order on named lotteries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueModel {
    pub lives: PartialPreorder<LifeId>,
    pub outcomes: PartialPreorder<Outcome>,
    pub lotteries: Option<PartialPreorder<String>>,
}

impl ValueModel {
    pub fn new(lives: PartialPreorder<LifeId>, outcomes: PartialPreorder<Outcome>) -> Self {
        ValueModel { lives, outcomes, lotteries: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AxiomError {
    #[error(transparent)]
    Order(#[from] OrderError<Outcome>),
    #[error("gambles do not share a state sequence (first difference at position {position})")]
    StateMismatch { position: usize },
    #[error("unknown axiom {0:?}")]
    UnknownAxiom(String),
}

/// Which outcomes the dominance quantifier ranges over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DominanceScope {
    /// The union of the two supports.
    #[default]
    Supports,
    /// Every element of the order's carrier.
    Carrier,
}

fn outcome_text(o: &Outcome) -> String {
    let mut s = String::from("{");
    for (k, (i, l)) in o.iter().enumerate() {
        if k > 0 {
            s.push_str(", ");
        }
        s.push_str(&format!("{i}:{l}"));
    }
    s.push('}');
    s
}

/// Verdict between two lives. A life missing from the carrier is incomparable
/// with every other life and equal to itself.
pub fn life_verdict(lives: &PartialPreorder<LifeId>, x: LifeId, y: LifeId) -> Verdict {
    if x == y {
        return Verdict::Equal;
    }
    lives.relate(&x, &y).unwrap_or(Verdict::Incomparable)
}

fn lottery_upset(l: &Lottery, r: &PartialPreorder<Outcome>, o: &Outcome) -> Result<Rational, OrderError<Outcome>> {
    upset_probability(l.iter(), r, o)
}

/// Mass a personal lottery places on lives at least as good as `life`.
pub fn personal_upset(p: &PersonalLottery, lives: &PartialPreorder<LifeId>, life: LifeId) -> Rational {
    p.iter()
        .filter(|(m, _)| life_verdict(lives, **m, life).at_least_as_good())
        .fold(rational::zero(), |acc, (_, q)| acc + q)
}

fn dominance_points(l1: &Lottery, l2: &Lottery, r: &PartialPreorder<Outcome>, scope: DominanceScope) -> Vec<Outcome> {
    match scope {
        DominanceScope::Supports => {
            let set: BTreeSet<&Outcome> = l1.outcomes().chain(l2.outcomes()).collect();
            set.into_iter().cloned().collect()
        }
        DominanceScope::Carrier => r.carrier().to_vec(),
    }
}

pub fn stochastic_dominance(l1: &Lottery, l2: &Lottery, r: &PartialPreorder<Outcome>) -> Result<DominanceGrade, OrderError<Outcome>> {
    Ok(stochastic_dominance_scoped(l1, l2, r, DominanceScope::Supports)?.grade.unwrap_or(DominanceGrade::None))
}

pub fn stochastic_dominance_certificate(
    l1: &Lottery,
    l2: &Lottery,
    r: &PartialPreorder<Outcome>,
) -> Result<Certificate, OrderError<Outcome>> {
    stochastic_dominance_scoped(l1, l2, r, DominanceScope::Supports)
}

/// Weak iff the left lottery's upset mass is at least the right's at every
/// point of the scope; Strict iff also greater somewhere.
pub fn stochastic_dominance_scoped(
    l1: &Lottery,
    l2: &Lottery,
    r: &PartialPreorder<Outcome>,
    scope: DominanceScope,
) -> Result<Certificate, OrderError<Outcome>> {
    for o in l1.outcomes().chain(l2.outcomes()) {
        if !r.contains(o) {
            return Err(OrderError::UnknownElement(o.clone()));
        }
    }
    let mut first_strict = None;
    for o in dominance_points(l1, l2, r, scope) {
        let u1 = lottery_upset(l1, r, &o)?;
        let u2 = lottery_upset(l2, r, &o)?;
        if u1 < u2 {
            let text = format!(
                "at {} the left lottery gives {} chance of something at least as good, the right gives {}",
                outcome_text(&o),
                rational::format(&u1),
                rational::format(&u2)
            );
            return Ok(Certificate::new(
                Principle::StochasticDominance,
                CertVerdict::Violated,
                Witness::OutcomeUpset { outcome: o, left: u1, right: u2 },
                text,
            )
            .with_grade(DominanceGrade::None));
        }
        if u1 > u2 && first_strict.is_none() {
            first_strict = Some((o, u1, u2));
        }
    }
    Ok(match first_strict {
        Some((o, u1, u2)) => {
            let text = format!(
                "upset masses never lower on the left; strictly higher at {} ({} against {})",
                outcome_text(&o),
                rational::format(&u1),
                rational::format(&u2)
            );
            Certificate::new(
                Principle::StochasticDominance,
                CertVerdict::Holds,
                Witness::OutcomeUpset { outcome: o, left: u1, right: u2 },
                text,
            )
            .with_grade(DominanceGrade::Strict)
        }
        None => Certificate::new(
            Principle::StochasticDominance,
            CertVerdict::Holds,
            Witness::None,
            "upset masses agree or favour the left lottery everywhere, never strictly",
        )
        .with_grade(DominanceGrade::Weak),
    })
}

/// Holds iff no outcome of `l1` is Better than any outcome of `l2`; when it
/// holds, ranking `l1` above `l2` is forbidden.
pub fn negative_dominance_precondition(
    l1: &Lottery,
    l2: &Lottery,
    r: &PartialPreorder<Outcome>,
) -> Result<Certificate, OrderError<Outcome>> {
    for x in l1.outcomes() {
        for y in l2.outcomes() {
            if r.relate(x, y)? == Verdict::Better {
                let text = format!("{} is better than {}", outcome_text(x), outcome_text(y));
                return Ok(Certificate::new(
                    Principle::NegativeDominance,
                    CertVerdict::Violated,
                    Witness::OutcomePair { left: x.clone(), right: y.clone(), verdict: Verdict::Better },
                    text,
                ));
            }
        }
    }
    Ok(Certificate::new(
        Principle::NegativeDominance,
        CertVerdict::Holds,
        Witness::None,
        "no possible outcome of the left lottery is better than any possible outcome of the right",
    ))
}

/// Holds iff in no state is the left gamble's prize Better than the right's.
pub fn statewise_negative_dominance_precondition(
    g1: &Gamble,
    g2: &Gamble,
    r: &PartialPreorder<Outcome>,
) -> Result<Certificate, AxiomError> {
    let (s1, s2) = (g1.states(), g2.states());
    let n = s1.len().max(s2.len());
    for k in 0..n {
        match (s1.get(k), s2.get(k)) {
            (Some(a), Some(b)) if a.id == b.id && a.probability == b.probability => {}
            _ => return Err(AxiomError::StateMismatch { position: k }),
        }
    }
    for (a, b) in s1.iter().zip(s2) {
        let v = r.relate(&a.outcome, &b.outcome)?;
        if v == Verdict::Better {
            let text = format!("in state {} the left prize is better", a.id);
            return Ok(Certificate::new(
                Principle::StatewiseNegativeDominance,
                CertVerdict::Violated,
                Witness::State { state: a.id.clone(), left: a.outcome.clone(), right: b.outcome.clone(), verdict: v },
                text,
            ));
        }
    }
    Ok(Certificate::new(
        Principle::StatewiseNegativeDominance,
        CertVerdict::Holds,
        Witness::None,
        "in no state is the left prize better than the right prize",
    ))
}

/// Same existents, everyone at least as well off, someone better off.
pub fn pareto_dominates(o1: &Outcome, o2: &Outcome, lives: &PartialPreorder<LifeId>) -> bool {
    if !o1.same_existents(o2) {
        return false;
    }
    let mut some = false;
    for i in o1.existents() {
        match life_verdict(lives, o1.life_of(i), o2.life_of(i)) {
            Verdict::Better => some = true,
            Verdict::Equal => {}
            _ => return false,
        }
    }
    some
}

pub fn pareto_better(o1: &Outcome, o2: &Outcome, lives: &PartialPreorder<LifeId>) -> Certificate {
    if !o1.same_existents(o2) {
        let (individual, left, right) = o1
            .iter()
            .chain(o2.iter())
            .map(|(i, _)| *i)
            .find(|i| o1.exists(*i) != o2.exists(*i))
            .map(|i| (i, o1.life_of(i), o2.life_of(i)))
            .expect("differing existents have a witness");
        return Certificate::new(
            Principle::Pareto,
            CertVerdict::PreconditionFails,
            Witness::Individual { individual, left, right, verdict: life_verdict(lives, left, right) },
            format!("{individual} exists in only one of the outcomes"),
        );
    }
    let mut improving = None;
    for i in o1.existents() {
        let (left, right) = (o1.life_of(i), o2.life_of(i));
        let v = life_verdict(lives, left, right);
        match v {
            Verdict::Better => {
                if improving.is_none() {
                    improving = Some(Witness::Individual { individual: i, left, right, verdict: v });
                }
            }
            Verdict::Equal => {}
            _ => {
                return Certificate::new(
                    Principle::Pareto,
                    CertVerdict::Violated,
                    Witness::Individual { individual: i, left, right, verdict: v },
                    format!("{i}'s life under the left outcome is {} relative to the right", v.name()),
                )
            }
        }
    }
    match improving {
        Some(w) => {
            let text = match &w {
                Witness::Individual { individual, .. } => {
                    format!("better for {individual} and at least as good for everyone else")
                }
                _ => String::new(),
            };
            Certificate::new(Principle::Pareto, CertVerdict::Holds, w, text)
        }
        None => Certificate::new(
            Principle::Pareto,
            CertVerdict::Violated,
            Witness::None,
            "equally good for everyone; better for no one",
        ),
    }
}

fn individuals_of(l1: &Lottery, l2: &Lottery) -> BTreeSet<IndividualId> {
    let mut set = l1.individuals();
    set.extend(l2.individuals());
    set
}

/// Personal Good. PreconditionFails if some individual's existence
/// probability differs; otherwise the grade records whether `l1` weakly or
/// strictly dominates `l2` for every individual.
pub fn personal_good(l1: &Lottery, l2: &Lottery, lives: &PartialPreorder<LifeId>) -> Certificate {
    let people = individuals_of(l1, l2);
    for &i in &people {
        let (e1, e2) = (l1.existence_probability(i), l2.existence_probability(i));
        if e1 != e2 {
            let text = format!(
                "{i} exists with probability {} on the left and {} on the right",
                rational::format(&e1),
                rational::format(&e2)
            );
            return Certificate::new(
                Principle::PersonalGood,
                CertVerdict::PreconditionFails,
                Witness::Existence { individual: i, left: e1, right: e2 },
                text,
            );
        }
    }
    let mut strict = None;
    for &i in &people {
        let (p1, p2) = (l1.personal_lottery(i), l2.personal_lottery(i));
        let points: BTreeSet<LifeId> = p1.lives().chain(p2.lives()).copied().collect();
        for life in points {
            let u1 = personal_upset(&p1, lives, life);
            let u2 = personal_upset(&p2, lives, life);
            if u1 < u2 {
                let text = format!(
                    "{i} has a {} chance of a life at least as good as {life} on the left but {} on the right",
                    rational::format(&u1),
                    rational::format(&u2)
                );
                return Certificate::new(
                    Principle::PersonalGood,
                    CertVerdict::Violated,
                    Witness::PersonalUpset { individual: i, life, left: u1, right: u2 },
                    text,
                )
                .with_grade(DominanceGrade::None);
            }
            if u1 > u2 && strict.is_none() {
                strict = Some(Witness::PersonalUpset { individual: i, life, left: u1, right: u2 });
            }
        }
    }
    match strict {
        Some(w) => {
            let text = match &w {
                Witness::PersonalUpset { individual, life, left, right } => format!(
                    "every personal lottery weakly dominates; {individual}'s strictly, at {life} ({} against {})",
                    rational::format(left),
                    rational::format(right)
                ),
                _ => String::new(),
            };
            Certificate::new(Principle::PersonalGood, CertVerdict::Holds, w, text).with_grade(DominanceGrade::Strict)
        }
        None => Certificate::new(
            Principle::PersonalGood,
            CertVerdict::Holds,
            Witness::None,
            "every personal lottery weakly dominates, none strictly",
        )
        .with_grade(DominanceGrade::Weak),
    }
}

/// The single individual in whom two outcomes differ, if exactly one.
fn single_difference(o1: &Outcome, o2: &Outcome) -> Option<IndividualId> {
    match o1.differences(o2).as_slice() {
        [i] => Some(*i),
        _ => None,
    }
}

/// Registered pairs differing in one individual whose lives are Incomparable
/// must themselves be Incomparable. Pairs involving a life outside the
/// personal carrier are skipped.
pub fn incomparability_transmission_check(m: &ValueModel) -> Certificate {
    let carrier = m.outcomes.carrier();
    for (a, x) in carrier.iter().enumerate() {
        for (b, y) in carrier.iter().enumerate().skip(a + 1) {
            let Some(i) = single_difference(x, y) else { continue };
            let (lx, ly) = (x.life_of(i), y.life_of(i));
            if !m.lives.contains(&lx) || !m.lives.contains(&ly) {
                continue;
            }
            let lives_verdict = life_verdict(&m.lives, lx, ly);
            let outcomes_verdict = m.outcomes.verdict_at(a, b);
            if lives_verdict == Verdict::Incomparable && outcomes_verdict != Verdict::Incomparable {
                let text = format!(
                    "{} and {} differ only in {i}'s incomparable lives but are ranked {}",
                    outcome_text(x),
                    outcome_text(y),
                    outcomes_verdict.name()
                );
                return Certificate::new(
                    Principle::IncomparabilityTransmission,
                    CertVerdict::Violated,
                    Witness::Transmission { left: x.clone(), right: y.clone(), individual: i, lives_verdict, outcomes_verdict },
                    text,
                );
            }
        }
    }
    Certificate::new(
        Principle::IncomparabilityTransmission,
        CertVerdict::Holds,
        Witness::None,
        "every one-person swap between incomparable lives yields incomparable outcomes",
    )
}

/// `variant` is better (or worse) than `base` for exactly one individual and
/// equally good for everyone else.
pub fn one_person_variant(base: &Outcome, variant: &Outcome, lives: &PartialPreorder<LifeId>) -> Option<(IndividualId, Verdict)> {
    if !base.same_existents(variant) || base == variant {
        return None;
    }
    let mut changed = None;
    for i in base.existents() {
        match life_verdict(lives, variant.life_of(i), base.life_of(i)) {
            Verdict::Equal => {}
            v @ (Verdict::Better | Verdict::Worse) => {
                if changed.is_some() {
                    return None;
                }
                changed = Some((i, v));
            }
            Verdict::Incomparable => return None,
        }
    }
    changed
}

/// Searches the registered outcomes for a one-person sweetening or worsening
/// of `o1` that stays incomparable with `o2` and `o3`.
pub fn small_improvements_witness(
    m: &ValueModel,
    o1: &Outcome,
    o2: &Outcome,
    o3: &Outcome,
) -> Result<Certificate, OrderError<Outcome>> {
    for rival in [o2, o3] {
        let v = m.outcomes.relate(o1, rival)?;
        if v != Verdict::Incomparable {
            return Ok(Certificate::new(
                Principle::SmallImprovements,
                CertVerdict::PreconditionFails,
                Witness::OutcomePair { left: o1.clone(), right: rival.clone(), verdict: v },
                format!("{} is {} relative to {}", outcome_text(o1), v.name(), outcome_text(rival)),
            ));
        }
    }
    for candidate in m.outcomes.carrier() {
        let Some((individual, direction)) = one_person_variant(o1, candidate, &m.lives) else { continue };
        if m.outcomes.relate(candidate, o2)? == Verdict::Incomparable
            && m.outcomes.relate(candidate, o3)? == Verdict::Incomparable
        {
            let text = format!(
                "{} is {} than {} for {individual} alone and still incomparable with both rivals",
                outcome_text(candidate),
                direction.name(),
                outcome_text(o1)
            );
            return Ok(Certificate::new(
                Principle::SmallImprovements,
                CertVerdict::Holds,
                Witness::SmallImprovement { base: o1.clone(), variant: candidate.clone(), individual, direction },
                text,
            ));
        }
    }
    Ok(Certificate::new(
        Principle::SmallImprovements,
        CertVerdict::Violated,
        Witness::Triple { base: o1.clone(), first: o2.clone(), second: o3.clone() },
        "no registered one-person variant stays incomparable with both rivals",
    ))
}

/// Model-level reading: every registered outcome that has a registered
/// one-person variant must satisfy the principle against every pair of
/// rivals it is incomparable with.
pub fn small_improvements_check(m: &ValueModel) -> Result<Certificate, OrderError<Outcome>> {
    let carrier = m.outcomes.carrier();
    for (a, o1) in carrier.iter().enumerate() {
        if !carrier.iter().any(|v| one_person_variant(o1, v, &m.lives).is_some()) {
            continue;
        }
        let rivals: Vec<usize> =
            (0..carrier.len()).filter(|&b| b != a && m.outcomes.verdict_at(a, b) == Verdict::Incomparable).collect();
        for (k, &b) in rivals.iter().enumerate() {
            for &c in &rivals[k..] {
                let cert = small_improvements_witness(m, o1, &carrier[b], &carrier[c])?;
                if cert.verdict == CertVerdict::Violated {
                    return Ok(cert);
                }
            }
        }
    }
    Ok(Certificate::new(
        Principle::SmallImprovements,
        CertVerdict::Holds,
        Witness::None,
        "every registered incomparability survives some registered one-person variant",
    ))
}

pub fn superdominance(l1: &Lottery, l2: &Lottery, r: &PartialPreorder<Outcome>) -> Result<Certificate, OrderError<Outcome>> {
    for x in l1.outcomes() {
        for y in l2.outcomes() {
            let v = r.relate(x, y)?;
            if v != Verdict::Better {
                let text = format!("{} is {} relative to {}", outcome_text(x), v.name(), outcome_text(y));
                return Ok(Certificate::new(
                    Principle::Superdominance,
                    CertVerdict::Violated,
                    Witness::OutcomePair { left: x.clone(), right: y.clone(), verdict: v },
                    text,
                ));
            }
        }
    }
    Ok(Certificate::new(
        Principle::Superdominance,
        CertVerdict::Holds,
        Witness::None,
        "every possible outcome of the left lottery is better than every possible outcome of the right",
    ))
}

pub fn weak_anonymity_check(m: &ValueModel, pi: &Permutation) -> Certificate {
    for o in m.outcomes.carrier() {
        let image = pi.apply(o);
        if let Ok(v) = m.outcomes.relate(o, &image) {
            if matches!(v, Verdict::Better | Verdict::Worse) {
                let text = format!("{} is {} than its permutation {}", outcome_text(o), v.name(), outcome_text(&image));
                return Certificate::new(
                    Principle::WeakAnonymity,
                    CertVerdict::Violated,
                    Witness::Permuted { outcome: o.clone(), image, verdict: v },
                    text,
                );
            }
        }
    }
    Certificate::new(
        Principle::WeakAnonymity,
        CertVerdict::Holds,
        Witness::None,
        "no registered outcome is better or worse than a registered permutation of itself",
    )
}

/// Up to this many individuals, every permutation is tried; beyond it, only
/// transpositions.
pub const FULL_PERMUTATION_LIMIT: usize = 6;

/// Permutations of the individuals appearing in the outcome carrier.
pub fn anonymity_permutations(m: &ValueModel) -> Vec<Permutation> {
    let people: Vec<IndividualId> =
        m.outcomes.carrier().iter().flat_map(|o| o.existents()).collect::<BTreeSet<_>>().into_iter().collect();
    let mut out = Vec::new();
    if people.len() <= FULL_PERMUTATION_LIMIT {
        let mut images = people.clone();
        permute(&mut images, 0, &mut |img| {
            let p = Permutation::new(people.iter().copied().zip(img.iter().copied())).expect("bijection");
            if !p.is_identity() {
                out.push(p);
            }
        });
    } else {
        for (a, &x) in people.iter().enumerate() {
            for &y in &people[a + 1..] {
                out.push(Permutation::swap(x, y));
            }
        }
    }
    out
}

fn permute<T: Copy>(items: &mut [T], k: usize, visit: &mut impl FnMut(&[T])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Pareto as a model-level requirement: Pareto-better registered pairs are
/// ranked Better.
pub fn pareto_check(m: &ValueModel) -> Certificate {
    let carrier = m.outcomes.carrier();
    for (a, x) in carrier.iter().enumerate() {
        for (b, y) in carrier.iter().enumerate() {
            if a != b && pareto_dominates(x, y, &m.lives) && m.outcomes.verdict_at(a, b) != Verdict::Better {
                let v = m.outcomes.verdict_at(a, b);
                return Certificate::new(
                    Principle::Pareto,
                    CertVerdict::Violated,
                    Witness::OutcomePair { left: x.clone(), right: y.clone(), verdict: v },
                    format!("{} is Pareto-better than {} but ranked {}", outcome_text(x), outcome_text(y), v.name()),
                );
            }
        }
    }
    Certificate::new(Principle::Pareto, CertVerdict::Holds, Witness::None, "every Pareto-better registered pair is ranked better")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Prospect {
    Lottery(Lottery),
    Gamble(Gamble),
}

impl Prospect {
    pub fn lottery(&self) -> Lottery {
        match self {
            Prospect::Lottery(l) => l.clone(),
            Prospect::Gamble(g) => g.collapse(),
        }
    }

    pub fn gamble(&self) -> Option<&Gamble> {
        match self {
            Prospect::Gamble(g) => Some(g),
            Prospect::Lottery(_) => None,
        }
    }
}

/// A pair of prospects to be compared, left against right, with an optional
/// claimed verdict of the left relative to the right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LotteryClaim {
    pub label: String,
    pub left: Prospect,
    pub right: Prospect,
    pub claimed: Option<Verdict>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Demand {
    /// The left prospect must be better.
    Requires,
    /// The left prospect must not be better.
    Forbids,
}

/// What a lottery-level certificate (left against right) says about
/// "left is better than right".
pub fn demand(cert: &Certificate) -> Option<Demand> {
    match cert.principle {
        Principle::PersonalGood | Principle::StochasticDominance if cert.grade == Some(DominanceGrade::Strict) => {
            Some(Demand::Requires)
        }
        Principle::Superdominance if cert.holds() => Some(Demand::Requires),
        Principle::NegativeDominance
        | Principle::StatewiseNegativeDominance
        | Principle::SupervaluationalNegativeDominance
            if cert.holds() =>
        {
            Some(Demand::Forbids)
        }
        _ => None,
    }
}

pub fn conflict(requires: &Certificate, forbids: &Certificate) -> Certificate {
    let text = format!(
        "{} requires the left prospect to be better, while {} forbids it",
        requires.principle, forbids.principle
    );
    Certificate::new(
        Principle::JointInconsistency,
        CertVerdict::Holds,
        Witness::Conflict { requires: Box::new(requires.clone()), forbids: Box::new(forbids.clone()) },
        text,
    )
}

/// Pairs every requiring certificate with every forbidding one.
pub fn joint_conflicts<'a>(certs: impl IntoIterator<Item = &'a Certificate> + Clone) -> Vec<Certificate> {
    let mut out = Vec::new();
    for r in certs.clone().into_iter().filter(|c| demand(c) == Some(Demand::Requires)) {
        for f in certs.clone().into_iter().filter(|c| demand(c) == Some(Demand::Forbids)) {
            out.push(conflict(r, f));
        }
    }
    out
}

fn claim_certificates(claimed: Verdict, certs: &[Certificate]) -> Vec<Certificate> {
    let mut out = Vec::new();
    for c in certs {
        let clash = match demand(c) {
            Some(Demand::Requires) => claimed != Verdict::Better,
            Some(Demand::Forbids) => claimed == Verdict::Better,
            None => false,
        };
        if clash {
            out.push(Certificate::new(
                Principle::ClaimConsistency,
                CertVerdict::Violated,
                Witness::Claim { claimed, by: Box::new(c.clone()) },
                format!("claimed verdict {} contradicts {}", claimed.name(), c.principle),
            ));
        }
    }
    if out.is_empty() {
        out.push(Certificate::new(
            Principle::ClaimConsistency,
            CertVerdict::Holds,
            Witness::None,
            format!("claimed verdict {} is consistent with every certificate", claimed.name()),
        ));
    }
    out
}

fn is_lottery_axiom(p: Principle) -> bool {
    matches!(
        p,
        Principle::NegativeDominance
            | Principle::StatewiseNegativeDominance
            | Principle::StochasticDominance
            | Principle::PersonalGood
            | Principle::Superdominance
    )
}

/// Runs model-level axioms once and lottery-level axioms on every claim,
/// adding joint-inconsistency certificates and claim checks per claim.
pub fn check_axiom_suite(
    m: &ValueModel,
    suite: &[Principle],
    claims: &[LotteryClaim],
) -> Result<Vec<Certificate>, AxiomError> {
    let mut out = Vec::new();
    for &p in suite {
        match p {
            Principle::IncomparabilityTransmission => out.push(incomparability_transmission_check(m)),
            Principle::SmallImprovements => out.push(small_improvements_check(m)?),
            Principle::Pareto => out.push(pareto_check(m)),
            Principle::Transitivity => {
                use crate::constraints::{Constraint, Transitivity};
                let ok = Constraint::<Outcome>::admits(&Transitivity, &m.outcomes);
                out.push(Certificate::new(
                    Principle::Transitivity,
                    if ok { CertVerdict::Holds } else { CertVerdict::Violated },
                    Witness::None,
                    "the outcome order's weak part is transitive",
                ));
            }
            Principle::WeakAnonymity => {
                let perms = anonymity_permutations(m);
                let cert = perms
                    .iter()
                    .map(|pi| weak_anonymity_check(m, pi))
                    .find(|c| c.verdict == CertVerdict::Violated)
                    .unwrap_or_else(|| weak_anonymity_check(m, &Permutation::identity()));
                out.push(cert);
            }
            p if is_lottery_axiom(p) => {}
            other => return Err(AxiomError::UnknownAxiom(String::from(other.name()))),
        }
    }
    for claim in claims {
        let (l1, l2) = (claim.left.lottery(), claim.right.lottery());
        let mut certs = Vec::new();
        for &p in suite {
            match p {
                Principle::NegativeDominance => certs.push(negative_dominance_precondition(&l1, &l2, &m.outcomes)?),
                Principle::StochasticDominance => certs.push(stochastic_dominance_certificate(&l1, &l2, &m.outcomes)?),
                Principle::PersonalGood => certs.push(personal_good(&l1, &l2, &m.lives)),
                Principle::Superdominance => certs.push(superdominance(&l1, &l2, &m.outcomes)?),
                Principle::StatewiseNegativeDominance => {
                    if let (Some(g1), Some(g2)) = (claim.left.gamble(), claim.right.gamble()) {
                        certs.push(statewise_negative_dominance_precondition(g1, g2, &m.outcomes)?);
                    }
                }
                _ => {}
            }
        }
        let conflicts = joint_conflicts(certs.iter());
        let claimed = claim.claimed.map(|v| claim_certificates(v, &certs));
        out.extend(certs);
        out.extend(conflicts);
        if let Some(c) = claimed {
            out.extend(c);
        }
    }
    Ok(out)
}

/// Re-derives a Negative Dominance certificate from its witness.
pub fn replay_negative_dominance(cert: &Certificate, l1: &Lottery, l2: &Lottery, r: &PartialPreorder<Outcome>) -> bool {
    match (&cert.verdict, &cert.witness) {
        (CertVerdict::Violated, Witness::OutcomePair { left, right, verdict: Verdict::Better }) => {
            l1.probability(left) > rational::zero()
                && l2.probability(right) > rational::zero()
                && r.relate(left, right) == Ok(Verdict::Better)
        }
        (CertVerdict::Holds, Witness::None) => l1
            .outcomes()
            .all(|x| l2.outcomes().all(|y| r.relate(x, y).map(|v| v != Verdict::Better).unwrap_or(false))),
        _ => false,
    }
}

pub fn replay_statewise(cert: &Certificate, g1: &Gamble, g2: &Gamble, r: &PartialPreorder<Outcome>) -> bool {
    match (&cert.verdict, &cert.witness) {
        (CertVerdict::Violated, Witness::State { state, left, right, verdict: Verdict::Better }) => {
            let a = g1.states().iter().find(|s| &s.id == state);
            let b = g2.states().iter().find(|s| &s.id == state);
            matches!((a, b), (Some(a), Some(b)) if &a.outcome == left && &b.outcome == right)
                && r.relate(left, right) == Ok(Verdict::Better)
        }
        (CertVerdict::Holds, Witness::None) => g1
            .states()
            .iter()
            .zip(g2.states())
            .all(|(a, b)| r.relate(&a.outcome, &b.outcome).map(|v| v != Verdict::Better).unwrap_or(false)),
        _ => false,
    }
}

pub fn replay_stochastic_dominance(cert: &Certificate, l1: &Lottery, l2: &Lottery, r: &PartialPreorder<Outcome>) -> bool {
    let mass = |l: &Lottery, o: &Outcome| -> Rational {
        l.iter()
            .filter(|(y, _)| r.relate(y, o).map(|v| v.at_least_as_good()).unwrap_or(false))
            .fold(rational::zero(), |acc, (_, p)| acc + p)
    };
    match &cert.witness {
        Witness::OutcomeUpset { outcome, left, right } => {
            let ok = &mass(l1, outcome) == left && &mass(l2, outcome) == right;
            match cert.grade {
                Some(DominanceGrade::None) => ok && left < right,
                Some(DominanceGrade::Strict) => ok && left > right,
                _ => false,
            }
        }
        Witness::None => cert.grade == Some(DominanceGrade::Weak),
        _ => false,
    }
}

pub fn replay_personal_good(cert: &Certificate, l1: &Lottery, l2: &Lottery, lives: &PartialPreorder<LifeId>) -> bool {
    match &cert.witness {
        Witness::Existence { individual, left, right } => {
            cert.verdict == CertVerdict::PreconditionFails
                && &l1.existence_probability(*individual) == left
                && &l2.existence_probability(*individual) == right
                && left != right
        }
        Witness::PersonalUpset { individual, life, left, right } => {
            let u1 = personal_upset(&l1.personal_lottery(*individual), lives, *life);
            let u2 = personal_upset(&l2.personal_lottery(*individual), lives, *life);
            let ok = &u1 == left && &u2 == right;
            match cert.grade {
                Some(DominanceGrade::None) => ok && u1 < u2,
                Some(DominanceGrade::Strict) => ok && u1 > u2,
                _ => false,
            }
        }
        Witness::None => cert.grade == Some(DominanceGrade::Weak),
        _ => false,
    }
}

pub fn replay_pareto(cert: &Certificate, o1: &Outcome, o2: &Outcome, lives: &PartialPreorder<LifeId>) -> bool {
    match (&cert.verdict, &cert.witness) {
        (CertVerdict::PreconditionFails, Witness::Individual { individual, .. }) => {
            o1.exists(*individual) != o2.exists(*individual)
        }
        (verdict, Witness::Individual { individual, left, right, verdict: v }) => {
            o1.life_of(*individual) == *left
                && o2.life_of(*individual) == *right
                && life_verdict(lives, *left, *right) == *v
                && match verdict {
                    CertVerdict::Holds => *v == Verdict::Better,
                    _ => matches!(v, Verdict::Worse | Verdict::Incomparable),
                }
        }
        (CertVerdict::Violated, Witness::None) => {
            o1.same_existents(o2) && o1.existents().all(|i| life_verdict(lives, o1.life_of(i), o2.life_of(i)) == Verdict::Equal)
        }
        _ => false,
    }
}

/// Re-derives model-level certificates from their witnesses.
pub fn replay_model(cert: &Certificate, m: &ValueModel) -> bool {
    match (&cert.principle, &cert.verdict, &cert.witness) {
        (Principle::IncomparabilityTransmission, CertVerdict::Violated, Witness::Transmission { left, right, individual, lives_verdict, outcomes_verdict }) => {
            left.differences(right) == vec![*individual]
                && life_verdict(&m.lives, left.life_of(*individual), right.life_of(*individual)) == *lives_verdict
                && *lives_verdict == Verdict::Incomparable
                && m.outcomes.relate(left, right) == Ok(*outcomes_verdict)
                && *outcomes_verdict != Verdict::Incomparable
        }
        (Principle::SmallImprovements, CertVerdict::Holds, Witness::SmallImprovement { base, variant, individual, direction }) => {
            one_person_variant(base, variant, &m.lives) == Some((*individual, *direction))
        }
        (Principle::SmallImprovements, CertVerdict::Violated, Witness::Triple { base, first, second }) => {
            m.outcomes.relate(base, first) == Ok(Verdict::Incomparable)
                && m.outcomes.relate(base, second) == Ok(Verdict::Incomparable)
                && m.outcomes.carrier().iter().all(|v| {
                    one_person_variant(base, v, &m.lives).is_none()
                        || m.outcomes.relate(v, first) != Ok(Verdict::Incomparable)
                        || m.outcomes.relate(v, second) != Ok(Verdict::Incomparable)
                })
        }
        (Principle::WeakAnonymity, CertVerdict::Violated, Witness::Permuted { outcome, image, verdict }) => {
            outcome.population_size() == image.population_size()
                && m.outcomes.relate(outcome, image) == Ok(*verdict)
                && matches!(verdict, Verdict::Better | Verdict::Worse)
        }
        (Principle::Pareto, CertVerdict::Violated, Witness::OutcomePair { left, right, verdict }) => {
            pareto_dominates(left, right, &m.lives) && m.outcomes.relate(left, right) == Ok(*verdict) && *verdict != Verdict::Better
        }
        (_, CertVerdict::Holds, _) => true,
        _ => false,
    }
}
