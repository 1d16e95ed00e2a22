//! Builders for the worked examples and proof constructions.
//!
//! Each builder returns a [`PropositionInstance`]: a universe, a value model,
//! named outcomes, lotteries and gambles, and a list of expected verdicts.
//! [`PropositionInstance::verify`] runs every expectation.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::axioms::{
    check_axiom_suite, incomparability_transmission_check, life_verdict, negative_dominance_precondition,
    pareto_better, pareto_dominates, personal_good, small_improvements_witness,
    statewise_negative_dominance_precondition, stochastic_dominance_certificate, superdominance, AxiomError,
    LotteryClaim, Prospect, ValueModel,
};
use crate::certificate::{CertVerdict, Certificate, DominanceGrade, Principle, Witness};
use crate::model::{
    merge_outcomes, realize, Distribution, Gamble, IndividualId, LifeId, Lottery, ModelError, Outcome, State,
    Universe,
};
use crate::order::{OrderError, PartialPreorder, RawPreorder, Verdict};
use crate::rational::{self, ratio, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("precondition fails: {0}")]
    Precondition(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Order(#[from] OrderError<Outcome>),
}

/// A checker applied to named parts of an instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check {
    PersonalGood { left: String, right: String },
    NegativeDominance { left: String, right: String },
    StochasticDominance { left: String, right: String },
    Superdominance { left: String, right: String },
    StatewiseNegativeDominance { left: String, right: String },
    Pareto { left: String, right: String },
    IncomparabilityTransmission,
    SmallImprovements { base: String, first: String, second: String },
    /// A conflict between two members of `suite` on the named prospects.
    JointInconsistency { suite: Vec<Principle>, left: String, right: String },
}

impl Check {
    pub fn principle(&self) -> Principle {
        match self {
            Check::PersonalGood { .. } => Principle::PersonalGood,
            Check::NegativeDominance { .. } => Principle::NegativeDominance,
            Check::StochasticDominance { .. } => Principle::StochasticDominance,
            Check::Superdominance { .. } => Principle::Superdominance,
            Check::StatewiseNegativeDominance { .. } => Principle::StatewiseNegativeDominance,
            Check::Pareto { .. } => Principle::Pareto,
            Check::IncomparabilityTransmission => Principle::IncomparabilityTransmission,
            Check::SmallImprovements { .. } => Principle::SmallImprovements,
            Check::JointInconsistency { .. } => Principle::JointInconsistency,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Check::PersonalGood { left, right }
            | Check::NegativeDominance { left, right }
            | Check::StochasticDominance { left, right }
            | Check::Superdominance { left, right }
            | Check::StatewiseNegativeDominance { left, right }
            | Check::Pareto { left, right } => format!("{}({left}, {right})", self.principle()),
            Check::IncomparabilityTransmission => String::from("IncomparabilityTransmission(model)"),
            Check::SmallImprovements { base, first, second } => format!("SmallImprovements({base}; {first}, {second})"),
            Check::JointInconsistency { suite, left, right } => {
                let names: Vec<&str> = suite.iter().map(|p| p.name()).collect();
                format!("JointInconsistency[{}]({left}, {right})", names.join(", "))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expectation {
    pub check: Check,
    pub verdict: CertVerdict,
    pub grade: Option<DominanceGrade>,
}

impl Expectation {
    fn new(check: Check, verdict: CertVerdict) -> Self {
        Expectation { check, verdict, grade: None }
    }

    fn graded(check: Check, grade: DominanceGrade) -> Self {
        let verdict = if grade.is_weak() { CertVerdict::Holds } else { CertVerdict::Violated };
        Expectation { check, verdict, grade: Some(grade) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub expectation: Expectation,
    pub certificate: Certificate,
    pub matched: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropositionInstance {
    pub name: String,
    pub universe: Universe,
    pub model: ValueModel,
    pub outcomes: BTreeMap<String, Outcome>,
    pub lotteries: BTreeMap<String, Lottery>,
    pub gambles: BTreeMap<String, Gamble>,
    pub expected: Vec<Expectation>,
}

fn missing(kind: &str, name: &str) -> AxiomError {
    AxiomError::UnknownAxiom(format!("{kind} {name:?} not in instance"))
}

impl PropositionInstance {
    pub fn lottery(&self, name: &str) -> Result<&Lottery, AxiomError> {
        self.lotteries.get(name).ok_or_else(|| missing("lottery", name))
    }

    pub fn gamble(&self, name: &str) -> Result<&Gamble, AxiomError> {
        self.gambles.get(name).ok_or_else(|| missing("gamble", name))
    }

    pub fn outcome(&self, name: &str) -> Result<&Outcome, AxiomError> {
        self.outcomes.get(name).ok_or_else(|| missing("outcome", name))
    }

    /// A gamble if one has this name, otherwise a lottery.
    pub fn prospect(&self, name: &str) -> Result<Prospect, AxiomError> {
        match self.gambles.get(name) {
            Some(g) => Ok(Prospect::Gamble(g.clone())),
            None => Ok(Prospect::Lottery(self.lottery(name)?.clone())),
        }
    }

    fn lottery_or_collapsed(&self, name: &str) -> Result<Lottery, AxiomError> {
        Ok(self.prospect(name)?.lottery())
    }

    pub fn run(&self, check: &Check) -> Result<Certificate, AxiomError> {
        let m = &self.model;
        Ok(match check {
            Check::PersonalGood { left, right } => {
                personal_good(&self.lottery_or_collapsed(left)?, &self.lottery_or_collapsed(right)?, &m.lives)
            }
            Check::NegativeDominance { left, right } => negative_dominance_precondition(
                &self.lottery_or_collapsed(left)?,
                &self.lottery_or_collapsed(right)?,
                &m.outcomes,
            )?,
            Check::StochasticDominance { left, right } => stochastic_dominance_certificate(
                &self.lottery_or_collapsed(left)?,
                &self.lottery_or_collapsed(right)?,
                &m.outcomes,
            )?,
            Check::Superdominance { left, right } => {
                superdominance(&self.lottery_or_collapsed(left)?, &self.lottery_or_collapsed(right)?, &m.outcomes)?
            }
            Check::StatewiseNegativeDominance { left, right } => {
                statewise_negative_dominance_precondition(self.gamble(left)?, self.gamble(right)?, &m.outcomes)?
            }
            Check::Pareto { left, right } => pareto_better(self.outcome(left)?, self.outcome(right)?, &m.lives),
            Check::IncomparabilityTransmission => incomparability_transmission_check(m),
            Check::SmallImprovements { base, first, second } => {
                small_improvements_witness(m, self.outcome(base)?, self.outcome(first)?, self.outcome(second)?)?
            }
            Check::JointInconsistency { suite, left, right } => {
                let claim = LotteryClaim {
                    label: format!("{left} vs {right}"),
                    left: self.prospect(left)?,
                    right: self.prospect(right)?,
                    claimed: None,
                };
                let certs = check_axiom_suite(m, suite, &[claim])?;
                certs.into_iter().find(|c| c.is_conflict()).unwrap_or_else(|| {
                    Certificate::new(
                        Principle::JointInconsistency,
                        CertVerdict::Violated,
                        Witness::None,
                        "no member of the suite requires a verdict another forbids",
                    )
                })
            }
        })
    }

    pub fn verify(&self) -> Result<Vec<CheckResult>, AxiomError> {
        self.expected
            .iter()
            .map(|e| {
                let certificate = self.run(&e.check)?;
                let matched =
                    certificate.verdict == e.verdict && (e.grade.is_none() || certificate.grade == e.grade);
                Ok(CheckResult { expectation: e.clone(), certificate, matched })
            })
            .collect()
    }

    pub fn all_match(&self) -> Result<bool, AxiomError> {
        Ok(self.verify()?.iter().all(|r| r.matched))
    }
}

fn individual(universe: &mut Universe, key: &str) -> IndividualId {
    match universe.individual_by_key(key) {
        Some(id) => id,
        None => universe.add_individual(key, None).expect("key checked absent"),
    }
}

/// Name of an outcome as a tuple of life keys over the listed individuals.
pub fn tuple_name(universe: &Universe, outcome: &Outcome, people: &[IndividualId]) -> String {
    let keys: Vec<&str> = people.iter().map(|&i| universe.life_key(outcome.life_of(i))).collect();
    format!("({})", keys.join(","))
}

/// The smallest order on `outcomes` that ranks every Pareto-better pair
/// better; everything else is incomparable.
pub fn pareto_order(outcomes: &[Outcome], lives: &PartialPreorder<LifeId>) -> Result<PartialPreorder<Outcome>, OrderError<Outcome>> {
    let mut raw = RawPreorder::new(outcomes.to_vec());
    for x in outcomes {
        for y in outcomes {
            if x != y && pareto_dominates(x, y, lives) {
                raw.strict.push((x.clone(), y.clone()));
            }
        }
    }
    raw.close()
}

/// Outcomes ranked by total welfare. `None` if some life lacks a welfare.
pub fn totalist_order(universe: &Universe, outcomes: &[Outcome]) -> Option<PartialPreorder<Outcome>> {
    let totals: BTreeMap<&Outcome, Rational> =
        outcomes.iter().map(|o| universe.total_welfare(o).map(|t| (o, t))).collect::<Option<_>>()?;
    Some(PartialPreorder::from_key(outcomes.iter().cloned(), |o| totals[o].clone()))
}

fn require(lives: &PartialPreorder<LifeId>, x: LifeId, y: LifeId, want: Verdict, what: &str) -> Result<(), BuildError> {
    let got = life_verdict(lives, x, y);
    if got == want {
        Ok(())
    } else if want == Verdict::Better && x == y {
        Err(BuildError::Degenerate(format!("{what}: the sweetened life must differ from the original")))
    } else if want == Verdict::Better {
        Err(BuildError::Degenerate(format!("{what}: expected a strict improvement, found {}", got.name())))
    } else {
        Err(BuildError::Precondition(format!("{what}: expected {}, found {}", want.name(), got.name())))
    }
}

fn half(x: &Outcome, y: &Outcome) -> Result<Lottery, ModelError> {
    Lottery::new([(x.clone(), ratio(1, 2)), (y.clone(), ratio(1, 2))])
}

fn npg(left: &str, right: &str) -> Vec<Expectation> {
    vec![
        Expectation::graded(Check::PersonalGood { left: left.into(), right: right.into() }, DominanceGrade::Strict),
        Expectation::new(Check::NegativeDominance { left: left.into(), right: right.into() }, CertVerdict::Holds),
        Expectation::new(
            Check::JointInconsistency {
                suite: vec![Principle::NegativeDominance, Principle::PersonalGood],
                left: left.into(),
                right: right.into(),
            },
            CertVerdict::Holds,
        ),
    ]
}

struct Assembly {
    name: String,
    universe: Universe,
    lives: PartialPreorder<LifeId>,
    named: Vec<(String, Outcome)>,
    lotteries: BTreeMap<String, Lottery>,
    gambles: BTreeMap<String, Gamble>,
    expected: Vec<Expectation>,
}

impl Assembly {
    fn finish_with(self, outcomes: PartialPreorder<Outcome>) -> PropositionInstance {
        PropositionInstance {
            name: self.name,
            universe: self.universe,
            model: ValueModel::new(self.lives, outcomes),
            outcomes: self.named.into_iter().collect(),
            lotteries: self.lotteries,
            gambles: self.gambles,
            expected: self.expected,
        }
    }

    fn finish(self) -> Result<PropositionInstance, BuildError> {
        let outs: Vec<Outcome> = self.named.iter().map(|(_, o)| o.clone()).collect();
        let order = pareto_order(&outs, &self.lives)?;
        Ok(self.finish_with(order))
    }
}

/// Which one-person variant of `(a,b)` the construction uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Variant {
    /// `(a⁺,b)`, better for the first individual.
    #[default]
    Sweetening,
    /// `(a⁻,b)`, worse for the first individual.
    Worsening,
}

/// Two individuals and lives `a`, `b` that are personally incomparable, with
/// `shifted` a strict improvement (or worsening) of `a` still incomparable
/// with `b`. Lottery 1 is `{(a,a), (b,b)}` and Lottery 2 is `{(a⁺,b), (b,a)}`
/// at even odds; the worsening variant uses `{(a⁻,b), (b,a)}` against
/// `{(a,a), (b,b)}`. The outcome order is the Pareto order on the registered
/// outcomes: every one-person swap between incomparable lives stays
/// incomparable, and the variant of `(a,b)` stays incomparable with both
/// `(a,a)` and `(b,b)`.
pub fn build_prop1(
    universe: Universe,
    lives: &PartialPreorder<LifeId>,
    a: LifeId,
    shifted: LifeId,
    b: LifeId,
    variant: Variant,
) -> Result<PropositionInstance, BuildError> {
    prop1_shape("prop1", universe, lives.clone(), a, shifted, b, variant, None)
}

#[allow(clippy::too_many_arguments)]
fn prop1_shape(
    name: &str,
    mut universe: Universe,
    lives: PartialPreorder<LifeId>,
    a: LifeId,
    shifted: LifeId,
    b: LifeId,
    variant: Variant,
    padding: Option<LifeId>,
) -> Result<PropositionInstance, BuildError> {
    match variant {
        Variant::Sweetening => require(&lives, shifted, a, Verdict::Better, "a⁺ against a")?,
        Variant::Worsening => require(&lives, a, shifted, Verdict::Better, "a against a⁻")?,
    }
    require(&lives, a, b, Verdict::Incomparable, "a against b")?;
    require(&lives, shifted, b, Verdict::Incomparable, "shifted life against b")?;
    let p1 = individual(&mut universe, "P1");
    let p2 = individual(&mut universe, "P2");
    let mut people = vec![p1, p2];
    let extra = padding.map(|c| (individual(&mut universe, "P3"), c));
    if let Some((p3, _)) = extra {
        people.push(p3);
    }
    let mk = |x: LifeId, y: LifeId| {
        let mut o = Outcome::of(&[(p1, x), (p2, y)]);
        if let Some((p3, c)) = extra {
            o.set(p3, c);
        }
        o
    };
    let aa = mk(a, a);
    let bb = mk(b, b);
    let ab = mk(a, b);
    let ba = mk(b, a);
    let sb = mk(shifted, b);
    let named: Vec<(String, Outcome)> = [&aa, &bb, &ab, &ba, &sb]
        .into_iter()
        .map(|o| (tuple_name(&universe, o, &people), o.clone()))
        .collect();
    let mut lotteries = BTreeMap::new();
    let (l1, l2) = match variant {
        Variant::Sweetening => (half(&aa, &bb)?, half(&sb, &ba)?),
        Variant::Worsening => (half(&sb, &ba)?, half(&aa, &bb)?),
    };
    lotteries.insert(String::from("L1"), l1);
    lotteries.insert(String::from("L2"), l2);
    let (ab_name, aa_name, bb_name) = (named[2].0.clone(), named[0].0.clone(), named[1].0.clone());
    let sb_name = named[4].0.clone();
    let mut expected = npg("L2", "L1");
    expected.push(Expectation::new(Check::IncomparabilityTransmission, CertVerdict::Holds));
    expected.push(Expectation::new(
        Check::SmallImprovements { base: ab_name.clone(), first: aa_name, second: bb_name },
        CertVerdict::Holds,
    ));
    let (better, worse) = match variant {
        Variant::Sweetening => (sb_name, ab_name),
        Variant::Worsening => (ab_name, sb_name),
    };
    expected.push(Expectation::new(Check::Pareto { left: better, right: worse }, CertVerdict::Holds));
    Assembly {
        name: String::from(name),
        universe,
        lives,
        named,
        lotteries,
        gambles: BTreeMap::new(),
        expected,
    }
    .finish()
}

/// Prop-1 shape with `b` replaced by nonexistence. Nonexistence joins the
/// personal carrier, incomparable with `a` and `a⁺`, so outcomes that differ
/// in who exists are incomparable. With `padding`, a third individual lives
/// `c` in every outcome so that no outcome is empty.
pub fn build_prop2(
    universe: Universe,
    lives: &PartialPreorder<LifeId>,
    a: LifeId,
    a_plus: LifeId,
    padding: Option<LifeId>,
) -> Result<PropositionInstance, BuildError> {
    let lives = if lives.contains(&LifeId::NONEXISTENCE) {
        lives.clone()
    } else {
        let mut extra = vec![LifeId::NONEXISTENCE];
        if let Some(c) = padding {
            if !lives.contains(&c) {
                extra.push(c);
            }
        }
        lives.with_elements(extra)
    };
    let name = if padding.is_some() { "prop2-padded" } else { "prop2" };
    prop1_shape(name, universe, lives, a, a_plus, LifeId::NONEXISTENCE, Variant::Sweetening, padding)
}

/// Four pairwise incomparable lives: Lottery 1 is `{(a,b), (c,d)}` and
/// Lottery 2 is `{(a⁺,d), (c,b)}`, so the second individual faces the same
/// personal lottery under both.
pub fn build_table3(
    mut universe: Universe,
    lives: &PartialPreorder<LifeId>,
    [a, a_plus, b, c, d]: [LifeId; 5],
) -> Result<PropositionInstance, BuildError> {
    require(lives, a_plus, a, Verdict::Better, "a⁺ against a")?;
    let four = [a, b, c, d];
    for (k, &x) in four.iter().enumerate() {
        for &y in &four[k + 1..] {
            if x != y {
                require(lives, x, y, Verdict::Incomparable, "pairwise incomparable lives")?;
            }
        }
    }
    for &y in [b, c, d].iter().filter(|&&y| y != a) {
        require(lives, a_plus, y, Verdict::Incomparable, "a⁺ against the other lives")?;
    }
    let p1 = individual(&mut universe, "P1");
    let p2 = individual(&mut universe, "P2");
    let people = [p1, p2];
    let mk = |x, y| Outcome::of(&[(p1, x), (p2, y)]);
    let (ab, cd, apd, cb, ad) = (mk(a, b), mk(c, d), mk(a_plus, d), mk(c, b), mk(a, d));
    let mut named: Vec<(String, Outcome)> = Vec::new();
    for o in [&ab, &cd, &apd, &cb, &ad] {
        if !named.iter().any(|(_, x)| x == o) {
            named.push((tuple_name(&universe, o, &people), o.clone()));
        }
    }
    let mut lotteries = BTreeMap::new();
    lotteries.insert(String::from("L1"), half(&ab, &cd)?);
    lotteries.insert(String::from("L2"), half(&apd, &cb)?);
    let mut expected = npg("L2", "L1");
    expected.push(Expectation::new(
        Check::Pareto { left: tuple_name(&universe, &apd, &people), right: tuple_name(&universe, &ad, &people) },
        CertVerdict::Holds,
    ));
    Assembly { name: String::from("table3"), universe, lives: lives.clone(), named, lotteries, gambles: BTreeMap::new(), expected }
        .finish()
}

/// Distribution-level analogue of Prop 1. `S` and `T` are fresh disjoint
/// subpopulations of size `max(|A|, |B|)`, or `pad_to` if larger. Lottery 1
/// is `{S:A T:A, S:B T:B}`, Lottery 2 is `{S:A⁺ T:B, S:B T:A}`. The outcome
/// order is the Pareto order on these outcomes and `S:A T:B`; the builder
/// checks that it leaves every outcome of one lottery incomparable with
/// every outcome of the other.
pub fn build_prop3(
    mut universe: Universe,
    lives: &PartialPreorder<LifeId>,
    a: &Distribution,
    a_plus: &Distribution,
    b: &Distribution,
    pad_to: Option<usize>,
) -> Result<PropositionInstance, BuildError> {
    if a.size() != a_plus.size() {
        return Err(BuildError::Precondition(String::from("A and A⁺ must have the same size")));
    }
    let changed: Vec<usize> = (1..=a.size()).filter(|&k| a.get(k) != a_plus.get(k)).collect();
    match changed.as_slice() {
        [k] => require(lives, a_plus.get(*k).unwrap(), a.get(*k).unwrap(), Verdict::Better, "A⁺ against A")?,
        [] => return Err(BuildError::Degenerate(String::from("A⁺ equals A"))),
        _ => return Err(BuildError::Precondition(String::from("A⁺ must differ from A at exactly one index"))),
    }
    let n = a.size().max(b.size()).max(pad_to.unwrap_or(0));
    let s = universe.fresh_individuals(n);
    let t = universe.fresh_individuals(n);
    let pair = |x: &Distribution, y: &Distribution| -> Result<Outcome, ModelError> {
        merge_outcomes(&realize(&s, x)?, &realize(&t, y)?)
    };
    let aa = pair(a, a)?;
    let bb = pair(b, b)?;
    let apb = pair(a_plus, b)?;
    let ba = pair(b, a)?;
    let ab = pair(a, b)?;
    let named: Vec<(String, Outcome)> = vec![
        (String::from("S:A T:A"), aa.clone()),
        (String::from("S:B T:B"), bb.clone()),
        (String::from("S:A+ T:B"), apb.clone()),
        (String::from("S:B T:A"), ba.clone()),
        (String::from("S:A T:B"), ab.clone()),
    ];
    let outs: Vec<Outcome> = named.iter().map(|(_, o)| o.clone()).collect();
    let order = pareto_order(&outs, lives)?;
    for x in [&apb, &ba] {
        for y in [&aa, &bb] {
            let v = order.relate(x, y)?;
            if v != Verdict::Incomparable {
                return Err(BuildError::Precondition(format!(
                    "strong incomparability fails: {} is {} relative to {}",
                    universe.describe(x),
                    v.name(),
                    universe.describe(y)
                )));
            }
        }
    }
    let mut lotteries = BTreeMap::new();
    lotteries.insert(String::from("L1"), half(&aa, &bb)?);
    lotteries.insert(String::from("L2"), half(&apb, &ba)?);
    let mut expected = npg("L2", "L1");
    expected.push(Expectation::new(
        Check::Pareto { left: String::from("S:A+ T:B"), right: String::from("S:A T:B") },
        CertVerdict::Holds,
    ));
    Ok(Assembly { name: String::from("prop3"), universe, lives: lives.clone(), named, lotteries, gambles: BTreeMap::new(), expected }
        .finish_with(order))
}

/// True iff `o1` is better than `o2` for someone and worse for no one, with
/// incomparable individual comparisons allowed.
pub fn better_for_someone_worse_for_none(o1: &Outcome, o2: &Outcome, lives: &PartialPreorder<LifeId>) -> bool {
    if !o1.same_existents(o2) {
        return false;
    }
    let mut some = false;
    for i in o1.existents() {
        match life_verdict(lives, o1.life_of(i), o2.life_of(i)) {
            Verdict::Worse => return false,
            Verdict::Better => some = true,
            _ => {}
        }
    }
    some
}

/// The four outcomes `(a,a)`, `(a⁻,b)`, `(b,b⁻)`, `(b⁻,a⁺)` and every strict
/// claim the better-for-someone-worse-for-no-one rule generates among them.
pub fn build_sweetening_cycle(
    lives: &PartialPreorder<LifeId>,
    [a, a_minus, b, b_minus, a_plus]: [LifeId; 5],
    p1: IndividualId,
    p2: IndividualId,
) -> Result<RawPreorder<Outcome>, BuildError> {
    require(lives, a_plus, a, Verdict::Better, "a⁺ against a")?;
    require(lives, a, a_minus, Verdict::Better, "a against a⁻")?;
    require(lives, b, b_minus, Verdict::Better, "b against b⁻")?;
    let mk = |x, y| Outcome::of(&[(p1, x), (p2, y)]);
    let outs = vec![mk(a, a), mk(a_minus, b), mk(b, b_minus), mk(b_minus, a_plus)];
    let mut raw = RawPreorder::new(outs.clone());
    for x in &outs {
        for y in &outs {
            if x != y && better_for_someone_worse_for_none(x, y, lives) {
                raw.strict.push((x.clone(), y.clone()));
            }
        }
    }
    Ok(raw)
}

/// Two fair states and one individual: `G1 = (a⁺, b)`, `G2 = (b, a)`.
pub fn build_hare_conflict(
    mut universe: Universe,
    lives: &PartialPreorder<LifeId>,
    a: LifeId,
    a_plus: LifeId,
    b: LifeId,
) -> Result<PropositionInstance, BuildError> {
    require(lives, a, b, Verdict::Incomparable, "a against b")?;
    require(lives, a_plus, b, Verdict::Incomparable, "a⁺ against b")?;
    let p1 = individual(&mut universe, "P1");
    let mk = |x| Outcome::of(&[(p1, x)]);
    let g1 = Gamble::uniform(vec![mk(a_plus), mk(b)])?;
    let g2 = Gamble::uniform(vec![mk(b), mk(a)])?;
    let mut named: Vec<(String, Outcome)> = Vec::new();
    for o in [mk(a_plus), mk(b), mk(a)] {
        if !named.iter().any(|(_, x)| *x == o) {
            named.push((tuple_name(&universe, &o, &[p1]), o));
        }
    }
    let grade = if life_verdict(lives, a_plus, a) == Verdict::Better { DominanceGrade::Strict } else { DominanceGrade::Weak };
    let mut expected = vec![
        Expectation::new(Check::StatewiseNegativeDominance { left: "G1".into(), right: "G2".into() }, CertVerdict::Holds),
        Expectation::graded(Check::StochasticDominance { left: "G1".into(), right: "G2".into() }, grade),
    ];
    expected.push(Expectation::new(
        Check::JointInconsistency {
            suite: vec![Principle::StochasticDominance, Principle::StatewiseNegativeDominance],
            left: "G1".into(),
            right: "G2".into(),
        },
        if grade == DominanceGrade::Strict { CertVerdict::Holds } else { CertVerdict::Violated },
    ));
    let mut gambles = BTreeMap::new();
    gambles.insert(String::from("G1"), g1);
    gambles.insert(String::from("G2"), g2);
    Assembly { name: String::from("hare"), universe, lives: lives.clone(), named, lotteries: BTreeMap::new(), gambles, expected }
        .finish()
}

/// Two people facing lives `high` and `low`. Lottery 1 gives both the same
/// life on each toss, Lottery 2 gives them opposite lives.
pub fn build_egalitarian_pair(
    mut universe: Universe,
    lives: &PartialPreorder<LifeId>,
    high: LifeId,
    low: LifeId,
) -> Result<PropositionInstance, BuildError> {
    let p1 = individual(&mut universe, "P1");
    let p2 = individual(&mut universe, "P2");
    let mk = |x, y| Outcome::of(&[(p1, x), (p2, y)]);
    let (hh, ll, hl, lh) = (mk(high, high), mk(low, low), mk(high, low), mk(low, high));
    let named: Vec<(String, Outcome)> =
        [&hh, &ll, &hl, &lh].into_iter().map(|o| (tuple_name(&universe, o, &[p1, p2]), o.clone())).collect();
    let mut lotteries = BTreeMap::new();
    lotteries.insert(String::from("L1"), half(&hh, &ll)?);
    lotteries.insert(String::from("L2"), half(&hl, &lh)?);
    let expected = vec![
        Expectation::graded(Check::PersonalGood { left: "L1".into(), right: "L2".into() }, DominanceGrade::Weak),
        Expectation::graded(Check::PersonalGood { left: "L2".into(), right: "L1".into() }, DominanceGrade::Weak),
    ];
    Assembly { name: String::from("egalitarian"), universe, lives: lives.clone(), named, lotteries, gambles: BTreeMap::new(), expected }
        .finish()
}

/// State probabilities `p_k = (1/3)(2/3)^(k-1)` for `k = 1..=K`.
pub fn table6_state_probability(k: u32) -> Rational {
    ratio(1, 3) * ratio(2, 3).pow(k as i32 - 1)
}

/// Tail mass `(2/3)^m`.
pub fn two_thirds_pow(m: u32) -> Rational {
    ratio(2, 3).pow(m as i32)
}

/// Members of group `j` (1-based): `2^(j-1)` individuals.
pub fn table6_group(people: &[IndividualId], j: u32) -> &[IndividualId] {
    let start = (1usize << (j - 1)) - 1;
    &people[start..start + (1usize << (j - 1))]
}

/// Finite truncation of the infinite-population pair. States `s1..sK` carry
/// `p_k`; a terminal state `s{K+1}` carries the residual `(2/3)^K`, in which
/// groups `1..K` have their resolved lives (`plus` under Lottery 1, `minus`
/// under Lottery 2) and later groups do not exist. `L1.view` and `L2.view`
/// condition on `s1..sK`, the states where every total is `±1`; dominance
/// checks use those views under the totalist order.
pub fn build_table6_truncation(
    mut universe: Universe,
    plus: LifeId,
    minus: LifeId,
    k: u32,
) -> Result<PropositionInstance, BuildError> {
    if k < 2 {
        return Err(BuildError::Precondition(String::from("the truncation needs K ≥ 2")));
    }
    if k > 12 {
        return Err(BuildError::Precondition(String::from("K larger than 12 is not supported")));
    }
    let lives = RawPreorder::new(vec![plus, minus, LifeId::NONEXISTENCE]).better(plus, minus).close().expect("acyclic");
    let count = (1usize << k) - 1;
    let people: Vec<IndividualId> = (1..=count).map(|n| individual(&mut universe, &format!("P{n}"))).collect();
    let mut states1 = Vec::new();
    let mut states2 = Vec::new();
    for s in 1..=k + 1 {
        let mut o1 = Outcome::empty();
        let mut o2 = Outcome::empty();
        for j in 1..=k.min(s) {
            let resolved = j < s || s == k + 1;
            let (l1, l2) = if resolved { (plus, minus) } else { (minus, plus) };
            for &i in table6_group(&people, j) {
                o1.set(i, l1);
                o2.set(i, l2);
            }
        }
        let p = if s <= k { table6_state_probability(s) } else { two_thirds_pow(k) };
        states1.push(State { id: format!("s{s}"), probability: p.clone(), outcome: o1 });
        states2.push(State { id: format!("s{s}"), probability: p, outcome: o2 });
    }
    let g1 = Gamble::new(states1)?;
    let g2 = Gamble::new(states2)?;
    let terminal = format!("s{}", k + 1);
    let v1 = g1.restrict(|st| st.id != terminal)?;
    let v2 = g2.restrict(|st| st.id != terminal)?;
    let mut named = Vec::new();
    for (tag, g) in [("L1", &g1), ("L2", &g2)] {
        for st in g.states() {
            named.push((format!("{tag}@{}", st.id), st.outcome.clone()));
        }
    }
    let outs: Vec<Outcome> = named.iter().map(|(_, o)| o.clone()).collect();
    let order = totalist_order(&universe, &outs)
        .ok_or_else(|| BuildError::Precondition(String::from("lives need welfare values")))?;
    let mut lotteries = BTreeMap::new();
    lotteries.insert(String::from("L1"), g1.collapse());
    lotteries.insert(String::from("L2"), g2.collapse());
    lotteries.insert(String::from("L1.view"), v1.collapse());
    lotteries.insert(String::from("L2.view"), v2.collapse());
    let mut gambles = BTreeMap::new();
    gambles.insert(String::from("G1"), g1);
    gambles.insert(String::from("G2"), g2);
    gambles.insert(String::from("G1.view"), v1);
    gambles.insert(String::from("G2.view"), v2);
    let expected = vec![
        Expectation::graded(Check::PersonalGood { left: "L1".into(), right: "L2".into() }, DominanceGrade::Strict),
        Expectation::new(Check::Superdominance { left: "L2.view".into(), right: "L1.view".into() }, CertVerdict::Holds),
        Expectation::new(Check::NegativeDominance { left: "L1.view".into(), right: "L2.view".into() }, CertVerdict::Holds),
        Expectation::new(Check::StatewiseNegativeDominance { left: "G1.view".into(), right: "G2.view".into() }, CertVerdict::Holds),
        // The terminal state breaks superdominance on the full lotteries.
        Expectation::new(Check::Superdominance { left: "L2".into(), right: "L1".into() }, CertVerdict::Violated),
    ];
    Ok(Assembly { name: format!("table6-K{k}"), universe, lives, named, lotteries, gambles, expected }.finish_with(order))
}

/// Baked-in inputs for every construction.
pub mod canonical {
    use super::*;

    /// Artist, artist with a small raise, banker, plus a slightly worse
    /// artist's life for the worsening variant.
    pub struct CareerLives {
        pub universe: Universe,
        pub order: PartialPreorder<LifeId>,
        pub a: LifeId,
        pub a_plus: LifeId,
        pub a_minus: LifeId,
        pub b: LifeId,
    }

    pub fn career_lives() -> CareerLives {
        let mut u = Universe::new();
        let a = u.add_life("a", Some("artist"), None).expect("fresh universe");
        let a_plus = u.add_life("a+", Some("artist, $1,000 more salary"), None).expect("fresh universe");
        let a_minus = u.add_life("a-", Some("artist, $1,000 less salary"), None).expect("fresh universe");
        let b = u.add_life("b", Some("banker"), None).expect("fresh universe");
        let order = RawPreorder::new(vec![a, a_plus, a_minus, b])
            .better(a_plus, a)
            .better(a, a_minus)
            .close()
            .expect("acyclic");
        CareerLives { universe: u, order, a, a_plus, a_minus, b }
    }

    fn restricted(c: &CareerLives, keep: &[LifeId]) -> PartialPreorder<LifeId> {
        c.order.restrict(keep).expect("subset of carrier")
    }

    pub fn prop1() -> PropositionInstance {
        let c = career_lives();
        let order = restricted(&c, &[c.a, c.a_plus, c.b]);
        build_prop1(c.universe.clone(), &order, c.a, c.a_plus, c.b, Variant::Sweetening).expect("canonical inputs")
    }

    pub fn prop1_worsening() -> PropositionInstance {
        let c = career_lives();
        let order = restricted(&c, &[c.a, c.a_minus, c.b]);
        let mut inst =
            build_prop1(c.universe.clone(), &order, c.a, c.a_minus, c.b, Variant::Worsening).expect("canonical inputs");
        inst.name = String::from("prop1-worsening");
        inst
    }

    pub fn prop2(padded: bool) -> PropositionInstance {
        let mut c = career_lives();
        let pad = padded.then(|| c.universe.add_life("c", Some("carpenter"), None).expect("fresh key"));
        let order = restricted(&c, &[c.a, c.a_plus]);
        build_prop2(c.universe, &order, c.a, c.a_plus, pad).expect("canonical inputs")
    }

    pub fn table3() -> PropositionInstance {
        let mut u = Universe::new();
        let a = u.add_life("a", Some("artist"), None).expect("fresh");
        let a_plus = u.add_life("a+", Some("artist, $1,000 more salary"), None).expect("fresh");
        let b = u.add_life("b", Some("banker"), None).expect("fresh");
        let c = u.add_life("c", Some("operative"), None).expect("fresh");
        let d = u.add_life("d", Some("farmer"), None).expect("fresh");
        let order = RawPreorder::new(vec![a, a_plus, b, c, d]).better(a_plus, a).close().expect("acyclic");
        build_table3(u, &order, [a, a_plus, b, c, d]).expect("canonical inputs")
    }

    /// Welfare-labelled lives `0 < 1 < 1⁺ < 2` with `1⁺` at welfare 3/2.
    pub struct WelfareLives {
        pub universe: Universe,
        pub order: PartialPreorder<LifeId>,
        pub zero: LifeId,
        pub one: LifeId,
        pub one_plus: LifeId,
        pub two: LifeId,
    }

    pub fn welfare_lives() -> WelfareLives {
        let mut u = Universe::new();
        let zero = u.add_life("0", None, Some(rational::int(0))).expect("fresh");
        let one = u.add_life("1", None, Some(rational::int(1))).expect("fresh");
        let one_plus = u.add_life("1+", None, Some(ratio(3, 2))).expect("fresh");
        let two = u.add_life("2", None, Some(rational::int(2))).expect("fresh");
        let welfare: BTreeMap<LifeId, Rational> =
            u.lives().filter_map(|l| l.welfare.clone().map(|w| (l.id, w))).collect();
        let order = PartialPreorder::from_key([zero, one, one_plus, two], |l| welfare[l].clone());
        WelfareLives { universe: u, order, zero, one, one_plus, two }
    }

    /// `A = (1,1)`, `B = (2,0)`, `A⁺ = (1⁺,1)`.
    pub fn prop3() -> PropositionInstance {
        let w = welfare_lives();
        let a = Distribution::new(vec![w.one, w.one]).expect("non-empty");
        let b = Distribution::new(vec![w.two, w.zero]).expect("non-empty");
        let ap = Distribution::new(vec![w.one_plus, w.one]).expect("non-empty");
        build_prop3(w.universe, &w.order, &a, &ap, &b, None).expect("canonical inputs")
    }

    /// Size-one distributions over the career lives.
    pub fn prop3_size1() -> PropositionInstance {
        let c = career_lives();
        let order = restricted(&c, &[c.a, c.a_plus, c.b]);
        let d = |l| Distribution::new(vec![l]).expect("non-empty");
        build_prop3(c.universe.clone(), &order, &d(c.a), &d(c.a_plus), &d(c.b), None).expect("canonical inputs")
    }

    /// `A = (1,1)`, `B = (2,0,1)`, so the third member of each
    /// subpopulation does not exist under `A`.
    pub fn prop3_leftover() -> PropositionInstance {
        let w = welfare_lives();
        let a = Distribution::new(vec![w.one, w.one]).expect("non-empty");
        let b = Distribution::new(vec![w.two, w.zero, w.one]).expect("non-empty");
        let ap = Distribution::new(vec![w.one_plus, w.one]).expect("non-empty");
        build_prop3(w.universe, &w.order, &a, &ap, &b, None).expect("canonical inputs")
    }

    /// The welfare example with subpopulations padded to three members.
    pub fn prop3_padded() -> PropositionInstance {
        let w = welfare_lives();
        let a = Distribution::new(vec![w.one, w.one]).expect("non-empty");
        let b = Distribution::new(vec![w.two, w.zero]).expect("non-empty");
        let ap = Distribution::new(vec![w.one_plus, w.one]).expect("non-empty");
        build_prop3(w.universe, &w.order, &a, &ap, &b, Some(3)).expect("canonical inputs")
    }

    pub struct CycleInputs {
        pub universe: Universe,
        pub lives: PartialPreorder<LifeId>,
        pub raw: RawPreorder<Outcome>,
        pub people: [IndividualId; 2],
    }

    /// `a⁺ > a > a⁻` and `b > b⁻`, with the two families incomparable.
    pub fn sweetening_cycle() -> CycleInputs {
        let mut u = Universe::new();
        let a_plus = u.add_life("a+", None, None).expect("fresh");
        let a = u.add_life("a", None, None).expect("fresh");
        let a_minus = u.add_life("a-", None, None).expect("fresh");
        let b = u.add_life("b", None, None).expect("fresh");
        let b_minus = u.add_life("b-", None, None).expect("fresh");
        let lives = RawPreorder::new(vec![a_plus, a, a_minus, b, b_minus])
            .better(a_plus, a)
            .better(a, a_minus)
            .better(b, b_minus)
            .close()
            .expect("acyclic");
        let p1 = individual(&mut u, "P1");
        let p2 = individual(&mut u, "P2");
        let raw = build_sweetening_cycle(&lives, [a, a_minus, b, b_minus, a_plus], p1, p2).expect("canonical inputs");
        CycleInputs { universe: u, lives, raw, people: [p1, p2] }
    }

    pub fn hare() -> PropositionInstance {
        let c = career_lives();
        let order = restricted(&c, &[c.a, c.a_plus, c.b]);
        build_hare_conflict(c.universe.clone(), &order, c.a, c.a_plus, c.b).expect("canonical inputs")
    }

    pub fn egalitarian() -> PropositionInstance {
        let mut u = Universe::new();
        let one = u.add_life("1", None, Some(rational::int(1))).expect("fresh");
        let zero = u.add_life("0", None, Some(rational::int(0))).expect("fresh");
        let order = RawPreorder::new(vec![one, zero]).better(one, zero).close().expect("acyclic");
        build_egalitarian_pair(u, &order, one, zero).expect("canonical inputs")
    }

    pub const TABLE6_DEFAULT_K: u32 = 6;

    pub fn table6(k: u32) -> Result<PropositionInstance, BuildError> {
        let mut u = Universe::new();
        let plus = u.add_life("+1", None, Some(rational::int(1))).expect("fresh");
        let minus = u.add_life("-1", None, Some(rational::int(-1))).expect("fresh");
        build_table6_truncation(u, plus, minus, k)
    }

    pub fn names() -> Vec<&'static str> {
        vec!["prop1", "prop1-worsening", "prop2", "prop2-padded", "table3", "prop3", "hare", "egalitarian", "table6"]
    }

    pub fn instance(name: &str) -> Option<PropositionInstance> {
        Some(match name {
            "prop1" => prop1(),
            "prop1-worsening" => prop1_worsening(),
            "prop2" => prop2(false),
            "prop2-padded" => prop2(true),
            "table3" => table3(),
            "prop3" => prop3(),
            "prop3-size1" => prop3_size1(),
            "prop3-leftover" => prop3_leftover(),
            "prop3-padded" => prop3_padded(),
            "hare" => hare(),
            "egalitarian" => egalitarian(),
            "table6" => table6(TABLE6_DEFAULT_K).ok()?,
            _ => return None,
        })
    }
}

impl core::fmt::Display for Check {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&self.describe())
    }
}

#[cfg(test)]
mod tests {
    use super::canonical::*;
    use super::*;
    use crate::order::close_and_check;
    use crate::rational::{int, one};

    fn assert_verified(inst: &PropositionInstance) {
        for r in inst.verify().unwrap() {
            assert!(r.matched, "{}: {} gave {:?}", inst.name, r.expectation.check.describe(), r.certificate);
        }
    }

    #[test]
    fn canonical_instances_verify() {
        for name in names() {
            assert_verified(&instance(name).unwrap());
        }
        for name in ["prop3-size1", "prop3-leftover", "prop3-padded"] {
            assert_verified(&instance(name).unwrap());
        }
    }

    #[test]
    fn prop1_rejects_degenerate_sweetening() {
        let c = career_lives();
        let err = build_prop1(c.universe.clone(), &c.order, c.a, c.a, c.b, Variant::Sweetening).unwrap_err();
        assert!(matches!(err, BuildError::Degenerate(_)));
        let err = build_prop1(c.universe.clone(), &c.order, c.a, c.a_minus, c.b, Variant::Sweetening).unwrap_err();
        assert!(matches!(err, BuildError::Degenerate(_)));
    }

    #[test]
    fn prop1_personal_lotteries() {
        let inst = prop1();
        let p1 = inst.universe.individual_by_key("P1").unwrap();
        let pl = inst.lottery("L1").unwrap().personal_lottery(p1);
        let c = career_lives();
        assert_eq!(pl.probability(c.a), ratio(1, 2));
        assert_eq!(pl.probability(c.b), ratio(1, 2));
        assert_eq!(inst.lottery("L1").unwrap().existence_probability(p1), one());
    }

    #[test]
    fn prop2_existence_half() {
        for padded in [false, true] {
            let inst = prop2(padded);
            let p2 = inst.universe.individual_by_key("P2").unwrap();
            for l in ["L1", "L2"] {
                assert_eq!(inst.lottery(l).unwrap().existence_probability(p2), ratio(1, 2));
            }
        }
    }

    #[test]
    fn table3_degenerates_to_prop1_shape() {
        let c = career_lives();
        let order = c.order.restrict(&[c.a, c.a_plus, c.b]).unwrap();
        let inst = build_table3(c.universe.clone(), &order, [c.a, c.a_plus, c.a, c.b, c.b]).unwrap();
        let p1 = build_prop1(c.universe.clone(), &order, c.a, c.a_plus, c.b, Variant::Sweetening).unwrap();
        // With b = a and c = d = b the lotteries coincide with Prop 1's.
        assert_eq!(inst.lottery("L1").unwrap(), p1.lottery("L1").unwrap());
        assert_eq!(inst.lottery("L2").unwrap(), p1.lottery("L2").unwrap());
    }

    #[test]
    fn prop3_leftover_nonexistence() {
        let inst = prop3_padded();
        let aa = inst.outcome("S:A T:A").unwrap();
        assert_eq!(aa.population_size(), 4);
        let bb = inst.outcome("S:B T:B").unwrap();
        assert_eq!(bb.population_size(), 4);
        assert_eq!(inst.universe.individuals().count(), 6);
    }

    #[test]
    fn sweetening_cycle_cycle() {
        let c = sweetening_cycle();
        assert_eq!(c.raw.strict.len(), 4);
        for (x, y) in &c.raw.strict {
            assert!(better_for_someone_worse_for_none(x, y, &c.lives));
        }
        match close_and_check(&c.raw) {
            Err(OrderError::Cycle { cycle }) => assert_eq!(cycle.len(), 4),
            other => panic!("expected a cycle, got {other:?}"),
        }
        let mut dropped = c.raw.clone();
        dropped.strict.pop();
        assert!(close_and_check(&dropped).is_ok());
    }

    #[test]
    fn table6_numbers() {
        let inst = table6(5).unwrap();
        let g1 = inst.gamble("G1").unwrap();
        let probs: Vec<Rational> = g1.states().iter().take(5).map(|s| s.probability.clone()).collect();
        assert_eq!(probs, vec![ratio(1, 3), ratio(2, 9), ratio(4, 27), ratio(8, 81), ratio(16, 243)]);
        let s3 = &g1.states()[2].outcome;
        assert_eq!(inst.universe.total_welfare(s3).unwrap(), int(-1));
        assert_eq!(s3.population_size(), 7);
        let total: Rational = g1.states().iter().fold(rational::zero(), |a, s| a + &s.probability);
        assert_eq!(total, one());
    }

    #[test]
    fn hare_without_sweetening() {
        let c = career_lives();
        let order = c.order.restrict(&[c.a, c.b]).unwrap();
        let inst = build_hare_conflict(c.universe.clone(), &order, c.a, c.a, c.b).unwrap();
        assert_verified(&inst);
        let sd = inst.run(&Check::StochasticDominance { left: "G1".into(), right: "G2".into() }).unwrap();
        assert_eq!(sd.grade, Some(DominanceGrade::Weak));
    }

    #[test]
    fn hare_total_order_fails_statewise() {
        let mut u = Universe::new();
        let a = u.add_life("a", None, None).unwrap();
        let ap = u.add_life("a+", None, None).unwrap();
        let b = u.add_life("b", None, None).unwrap();
        let total = RawPreorder::new(vec![ap, a, b]).better(ap, a).better(a, b).close().unwrap();
        assert!(build_hare_conflict(u.clone(), &total, a, ap, b).is_err());
        let p1 = IndividualId(1);
        let r = pareto_order(&[Outcome::of(&[(p1, ap)]), Outcome::of(&[(p1, b)]), Outcome::of(&[(p1, a)])], &total).unwrap();
        let g1 = Gamble::uniform(vec![Outcome::of(&[(p1, ap)]), Outcome::of(&[(p1, b)])]).unwrap();
        let g2 = Gamble::uniform(vec![Outcome::of(&[(p1, b)]), Outcome::of(&[(p1, a)])]).unwrap();
        let c = statewise_negative_dominance_precondition(&g1, &g2, &r).unwrap();
        assert!(matches!(&c.witness, Witness::State { state, .. } if state == "s1"));
    }

    #[test]
    fn builders_are_deterministic() {
        for name in names() {
            assert_eq!(instance(name), instance(name));
        }
    }
}
