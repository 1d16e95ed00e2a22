//! Lives, individuals, outcomes, distributions, lotteries and gambles.
//!
//! Outcomes are finite maps from individuals to lives. Nonexistence is the
//! default: an individual absent from the map does not exist, and explicit
//! [`LifeId::NONEXISTENCE`] entries are dropped on construction so that two
//! outcomes compare equal iff they agree on who exists and how they live.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LifeId(pub u32);

impl LifeId {
    /// The empty life.
    pub const NONEXISTENCE: LifeId = LifeId(0);

    pub fn is_nonexistence(self) -> bool {
        self == Self::NONEXISTENCE
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndividualId(pub u32);

impl fmt::Display for IndividualId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.0)
    }
}

impl fmt::Display for LifeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_nonexistence() {
            f.write_str("-")
        } else {
            write!(f, "l{}", self.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("duplicate key {0:?}")]
    DuplicateKey(String),
    #[error("nonexistence cannot carry a welfare value")]
    NonexistenceWelfare,
    #[error("individual {0} assigned more than once")]
    DuplicateAssignment(IndividualId),
    #[error("outcomes overlap on {0:?}")]
    Overlap(Vec<IndividualId>),
    #[error("subpopulation of size {population} cannot realize a distribution of size {distribution}")]
    SizeMismatch { population: usize, distribution: usize },
    #[error("distribution must contain at least one life")]
    EmptyDistribution,
    #[error("subpopulation lists {0} more than once")]
    DuplicateMember(IndividualId),
    #[error("probability {0} is negative")]
    NegativeProbability(String),
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(String),
    #[error("lottery has empty support")]
    EmptySupport,
    #[error("state {0:?} listed twice")]
    DuplicateState(String),
    #[error("state {0:?} has non-positive probability")]
    NonPositiveState(String),
    #[error("mapping is not a permutation: {0}")]
    NotAPermutation(String),
    #[error("unknown life {0}")]
    UnknownLife(LifeId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Life {
    pub id: LifeId,
    /// External identifier, unique within a universe.
    pub key: String,
    pub label: Option<String>,
    pub welfare: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Individual {
    pub id: IndividualId,
    pub key: String,
    pub label: Option<String>,
}

/// Registry of lives and individuals for one model.
///
/// Individuals are allocated with increasing ids, so [`Universe::fresh_individuals`]
/// always hands out ids that no registered outcome mentions. Callers that share
/// a universe across threads must serialize allocation themselves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Universe {
    lives: BTreeMap<LifeId, Life>,
    individuals: BTreeMap<IndividualId, Individual>,
    next_life: u32,
    next_individual: u32,
}

impl Default for Universe {
    fn default() -> Self {
        Self::new()
    }
}

impl Universe {
    pub const NONEXISTENCE_KEY: &'static str = "nonexistence";

    pub fn new() -> Self {
        let mut lives = BTreeMap::new();
        lives.insert(
            LifeId::NONEXISTENCE,
            Life {
                id: LifeId::NONEXISTENCE,
                key: String::from(Self::NONEXISTENCE_KEY),
                label: None,
                welfare: None,
            },
        );
        Universe { lives, individuals: BTreeMap::new(), next_life: 1, next_individual: 1 }
    }

    pub fn add_life(
        &mut self,
        key: &str,
        label: Option<&str>,
        welfare: Option<Rational>,
    ) -> Result<LifeId, ModelError> {
        if self.life_by_key(key).is_some() {
            return Err(ModelError::DuplicateKey(key.into()));
        }
        let id = LifeId(self.next_life);
        self.next_life += 1;
        self.lives.insert(
            id,
            Life { id, key: key.into(), label: label.map(Into::into), welfare },
        );
        Ok(id)
    }

    pub fn add_individual(&mut self, key: &str, label: Option<&str>) -> Result<IndividualId, ModelError> {
        if self.individual_by_key(key).is_some() {
            return Err(ModelError::DuplicateKey(key.into()));
        }
        let id = IndividualId(self.next_individual);
        self.next_individual += 1;
        self.individuals
            .insert(id, Individual { id, key: key.into(), label: label.map(Into::into) });
        Ok(id)
    }

    /// Allocates `count` individuals that appear in no outcome built so far.
    pub fn fresh_individuals(&mut self, count: usize) -> Subpopulation {
        let mut members = Vec::with_capacity(count);
        for _ in 0..count {
            let id = IndividualId(self.next_individual);
            self.next_individual += 1;
            let mut key = format!("P{}", id.0);
            while self.individual_by_key(&key).is_some() {
                key.push('\'');
            }
            self.individuals.insert(id, Individual { id, key, label: None });
            members.push(id);
        }
        Subpopulation(members)
    }

    /// Makes sure every individual the outcome mentions is registered, so that
    /// later fresh allocations avoid them.
    pub fn register_outcome(&mut self, outcome: &Outcome) {
        for (&id, _) in outcome.iter() {
            if !self.individuals.contains_key(&id) {
                self.individuals
                    .insert(id, Individual { id, key: format!("P{}", id.0), label: None });
            }
            self.next_individual = self.next_individual.max(id.0 + 1);
        }
    }

    pub fn life(&self, id: LifeId) -> Option<&Life> {
        self.lives.get(&id)
    }

    pub fn individual(&self, id: IndividualId) -> Option<&Individual> {
        self.individuals.get(&id)
    }

    pub fn life_by_key(&self, key: &str) -> Option<LifeId> {
        self.lives.values().find(|l| l.key == key).map(|l| l.id)
    }

    pub fn individual_by_key(&self, key: &str) -> Option<IndividualId> {
        self.individuals.values().find(|i| i.key == key).map(|i| i.id)
    }

    pub fn lives(&self) -> impl Iterator<Item = &Life> {
        self.lives.values()
    }

    pub fn individuals(&self) -> impl Iterator<Item = &Individual> {
        self.individuals.values()
    }

    pub fn life_key(&self, id: LifeId) -> &str {
        self.lives.get(&id).map(|l| l.key.as_str()).unwrap_or("?")
    }

    pub fn individual_key(&self, id: IndividualId) -> String {
        self.individuals
            .get(&id)
            .map(|i| i.key.clone())
            .unwrap_or_else(|| format!("P{}", id.0))
    }

    pub fn welfare(&self, id: LifeId) -> Option<&Rational> {
        self.lives.get(&id).and_then(|l| l.welfare.as_ref())
    }

    /// Sum of welfare over existing individuals; `None` if some life has no
    /// welfare value.
    pub fn total_welfare(&self, outcome: &Outcome) -> Option<Rational> {
        let mut total = Rational::zero();
        for (_, life) in outcome.iter() {
            total += self.welfare(*life)?;
        }
        Some(total)
    }

    /// Compact rendering such as `{P1:a, P2:b}`.
    pub fn describe(&self, outcome: &Outcome) -> String {
        let mut s = String::from("{");
        for (n, (i, l)) in outcome.iter().enumerate() {
            if n > 0 {
                s.push_str(", ");
            }
            s.push_str(&self.individual_key(*i));
            s.push(':');
            s.push_str(self.life_key(*l));
        }
        s.push('}');
        s
    }
}

/// A finite-population outcome.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Outcome(BTreeMap<IndividualId, LifeId>);

impl Outcome {
    pub fn empty() -> Self {
        Outcome(BTreeMap::new())
    }

    pub fn from_assignments(
        pairs: impl IntoIterator<Item = (IndividualId, LifeId)>,
    ) -> Result<Self, ModelError> {
        let mut seen = BTreeSet::new();
        let mut map = BTreeMap::new();
        for (i, l) in pairs {
            if !seen.insert(i) {
                return Err(ModelError::DuplicateAssignment(i));
            }
            if !l.is_nonexistence() {
                map.insert(i, l);
            }
        }
        Ok(Outcome(map))
    }

    /// Builds from distinct individuals; panics on a repeated individual.
    pub fn of(pairs: &[(IndividualId, LifeId)]) -> Self {
        Self::from_assignments(pairs.iter().copied()).expect("distinct individuals")
    }

    pub fn life_of(&self, individual: IndividualId) -> LifeId {
        self.0.get(&individual).copied().unwrap_or(LifeId::NONEXISTENCE)
    }

    pub fn exists(&self, individual: IndividualId) -> bool {
        self.0.contains_key(&individual)
    }

    pub fn set(&mut self, individual: IndividualId, life: LifeId) {
        if life.is_nonexistence() {
            self.0.remove(&individual);
        } else {
            self.0.insert(individual, life);
        }
    }

    pub fn with(mut self, individual: IndividualId, life: LifeId) -> Self {
        self.set(individual, life);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&IndividualId, &LifeId)> {
        self.0.iter()
    }

    pub fn existents(&self) -> impl Iterator<Item = IndividualId> + '_ {
        self.0.keys().copied()
    }

    pub fn population_size(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn same_existents(&self, other: &Outcome) -> bool {
        self.0.keys().eq(other.0.keys())
    }

    /// Individuals whose lives differ between the two outcomes, in id order.
    pub fn differences(&self, other: &Outcome) -> Vec<IndividualId> {
        let ids: BTreeSet<IndividualId> = self.existents().chain(other.existents()).collect();
        ids.into_iter().filter(|&i| self.life_of(i) != other.life_of(i)).collect()
    }

    /// Lives used, with multiplicity, in id order of the individuals.
    pub fn lives(&self) -> impl Iterator<Item = LifeId> + '_ {
        self.0.values().copied()
    }
}

/// Disjoint union of two outcomes.
pub fn merge_outcomes(left: &Outcome, right: &Outcome) -> Result<Outcome, ModelError> {
    let clash: Vec<IndividualId> = left.existents().filter(|i| right.exists(*i)).collect();
    if !clash.is_empty() {
        return Err(ModelError::Overlap(clash));
    }
    let mut merged = left.clone();
    for (i, l) in right.iter() {
        merged.set(*i, *l);
    }
    Ok(merged)
}

/// A sequence of lives indexed from 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Distribution(Vec<LifeId>);

impl Distribution {
    pub fn new(lives: Vec<LifeId>) -> Result<Self, ModelError> {
        if lives.is_empty() {
            return Err(ModelError::EmptyDistribution);
        }
        Ok(Distribution(lives))
    }

    pub fn size(&self) -> usize {
        self.0.len()
    }

    /// The life at 1-based position `k`.
    pub fn get(&self, k: usize) -> Option<LifeId> {
        k.checked_sub(1).and_then(|i| self.0.get(i).copied())
    }

    pub fn lives(&self) -> &[LifeId] {
        &self.0
    }
}

/// An indexed set of distinct individuals.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subpopulation(Vec<IndividualId>);

impl Subpopulation {
    pub fn new(members: Vec<IndividualId>) -> Result<Self, ModelError> {
        let mut seen = BTreeSet::new();
        for m in &members {
            if !seen.insert(*m) {
                return Err(ModelError::DuplicateMember(*m));
            }
        }
        Ok(Subpopulation(members))
    }

    pub fn size(&self) -> usize {
        self.0.len()
    }

    pub fn members(&self) -> &[IndividualId] {
        &self.0
    }

    /// The member at 1-based position `k`.
    pub fn member(&self, k: usize) -> Option<IndividualId> {
        k.checked_sub(1).and_then(|i| self.0.get(i).copied())
    }
}

/// Member `k` of the subpopulation lives `D(k)`; members past the end of the
/// distribution do not exist.
pub fn realize(population: &Subpopulation, distribution: &Distribution) -> Result<Outcome, ModelError> {
    if population.size() < distribution.size() {
        return Err(ModelError::SizeMismatch {
            population: population.size(),
            distribution: distribution.size(),
        });
    }
    Outcome::from_assignments(population.members().iter().copied().zip(distribution.lives().iter().copied()))
}

fn check_masses<'a>(masses: impl Iterator<Item = &'a Rational>) -> Result<(), ModelError> {
    let mut total = Rational::zero();
    for p in masses {
        if p.is_negative() {
            return Err(ModelError::NegativeProbability(rational::format(p)));
        }
        total += p;
    }
    if !total.is_one() {
        return Err(ModelError::NotNormalized(rational::format(&total)));
    }
    Ok(())
}

/// Finite-support distribution over outcomes with exact probabilities.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lottery {
    support: BTreeMap<Outcome, Rational>,
}

impl Lottery {
    /// Merges repeated outcomes, drops zero entries and requires the masses
    /// to be non-negative and sum to exactly one.
    pub fn new(entries: impl IntoIterator<Item = (Outcome, Rational)>) -> Result<Self, ModelError> {
        let mut support: BTreeMap<Outcome, Rational> = BTreeMap::new();
        let mut raw = Vec::new();
        for (o, p) in entries {
            raw.push(p.clone());
            *support.entry(o).or_insert_with(Rational::zero) += p;
        }
        check_masses(raw.iter())?;
        support.retain(|_, p| !p.is_zero());
        if support.is_empty() {
            return Err(ModelError::EmptySupport);
        }
        Ok(Lottery { support })
    }

    pub fn certain(outcome: Outcome) -> Self {
        let mut support = BTreeMap::new();
        support.insert(outcome, Rational::one());
        Lottery { support }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Outcome, &Rational)> {
        self.support.iter()
    }

    pub fn outcomes(&self) -> impl Iterator<Item = &Outcome> {
        self.support.keys()
    }

    pub fn probability(&self, outcome: &Outcome) -> Rational {
        self.support.get(outcome).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support_size(&self) -> usize {
        self.support.len()
    }

    /// Every individual who exists in some support outcome.
    pub fn individuals(&self) -> BTreeSet<IndividualId> {
        self.support.keys().flat_map(|o| o.existents()).collect()
    }

    /// Marginal distribution over lives faced by `individual`.
    pub fn personal_lottery(&self, individual: IndividualId) -> PersonalLottery {
        let mut support: BTreeMap<LifeId, Rational> = BTreeMap::new();
        for (o, p) in &self.support {
            *support.entry(o.life_of(individual)).or_insert_with(Rational::zero) += p;
        }
        PersonalLottery { support }
    }

    pub fn existence_probability(&self, individual: IndividualId) -> Rational {
        Rational::one() - self.personal_lottery(individual).probability(LifeId::NONEXISTENCE)
    }

    pub fn expected(&self, mut value: impl FnMut(&Outcome) -> Option<Rational>) -> Option<Rational> {
        let mut acc = Rational::zero();
        for (o, p) in &self.support {
            acc += value(o)? * p;
        }
        Some(acc)
    }
}

/// Free-function form of [`Lottery::personal_lottery`].
pub fn personal_lottery(lottery: &Lottery, individual: IndividualId) -> PersonalLottery {
    lottery.personal_lottery(individual)
}

pub fn existence_probability(lottery: &Lottery, individual: IndividualId) -> Rational {
    lottery.existence_probability(individual)
}

/// Distribution over lives, nonexistence included.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PersonalLottery {
    support: BTreeMap<LifeId, Rational>,
}

impl PersonalLottery {
    pub fn new(entries: impl IntoIterator<Item = (LifeId, Rational)>) -> Result<Self, ModelError> {
        let mut support: BTreeMap<LifeId, Rational> = BTreeMap::new();
        let mut raw = Vec::new();
        for (l, p) in entries {
            raw.push(p.clone());
            *support.entry(l).or_insert_with(Rational::zero) += p;
        }
        check_masses(raw.iter())?;
        support.retain(|_, p| !p.is_zero());
        Ok(PersonalLottery { support })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LifeId, &Rational)> {
        self.support.iter()
    }

    pub fn lives(&self) -> impl Iterator<Item = &LifeId> {
        self.support.keys()
    }

    pub fn probability(&self, life: LifeId) -> Rational {
        self.support.get(&life).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total(&self) -> Rational {
        self.support.values().fold(Rational::zero(), |a, p| a + p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct State {
    pub id: String,
    pub probability: Rational,
    pub outcome: Outcome,
}

/// State-indexed prizes. Unlike a lottery a gamble remembers which outcome
/// each act yields in the same state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gamble {
    states: Vec<State>,
}

impl Gamble {
    pub fn new(states: Vec<State>) -> Result<Self, ModelError> {
        let mut ids = BTreeSet::new();
        for s in &states {
            if !ids.insert(s.id.as_str()) {
                return Err(ModelError::DuplicateState(s.id.clone()));
            }
            if !s.probability.is_positive() {
                return Err(ModelError::NonPositiveState(s.id.clone()));
            }
        }
        check_masses(states.iter().map(|s| &s.probability))?;
        Ok(Gamble { states })
    }

    /// Equiprobable states named `s1..sn`.
    pub fn uniform(outcomes: Vec<Outcome>) -> Result<Self, ModelError> {
        let n = outcomes.len() as i64;
        let states = outcomes
            .into_iter()
            .enumerate()
            .map(|(k, outcome)| State {
                id: format!("s{}", k + 1),
                probability: rational::ratio(1, n.max(1)),
                outcome,
            })
            .collect();
        Self::new(states)
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    /// Marginalizes away the states.
    pub fn collapse(&self) -> Lottery {
        Lottery::new(self.states.iter().map(|s| (s.outcome.clone(), s.probability.clone())))
            .expect("a well-formed gamble induces a well-formed lottery")
    }

    /// Conditions on the named states, renormalizing their probabilities.
    pub fn restrict(&self, keep: impl Fn(&State) -> bool) -> Result<Gamble, ModelError> {
        let kept: Vec<&State> = self.states.iter().filter(|s| keep(s)).collect();
        let mass = kept.iter().fold(Rational::zero(), |a, s| a + &s.probability);
        if mass.is_zero() {
            return Err(ModelError::EmptySupport);
        }
        Gamble::new(
            kept.into_iter()
                .map(|s| State { id: s.id.clone(), probability: &s.probability / &mass, outcome: s.outcome.clone() })
                .collect(),
        )
    }
}

/// Bijection on a finite set of individuals; everyone else is fixed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    map: BTreeMap<IndividualId, IndividualId>,
}

impl Permutation {
    pub fn new(pairs: impl IntoIterator<Item = (IndividualId, IndividualId)>) -> Result<Self, ModelError> {
        let mut map = BTreeMap::new();
        for (from, to) in pairs {
            if map.insert(from, to).is_some() {
                return Err(ModelError::NotAPermutation(format!("{from} mapped twice")));
            }
        }
        let domain: BTreeSet<_> = map.keys().copied().collect();
        let range: BTreeSet<_> = map.values().copied().collect();
        if domain != range {
            return Err(ModelError::NotAPermutation(String::from("domain and image differ")));
        }
        Ok(Permutation { map })
    }

    pub fn identity() -> Self {
        Permutation { map: BTreeMap::new() }
    }

    pub fn swap(a: IndividualId, b: IndividualId) -> Self {
        Self::new([(a, b), (b, a)]).expect("a transposition is a bijection")
    }

    pub fn image(&self, i: IndividualId) -> IndividualId {
        self.map.get(&i).copied().unwrap_or(i)
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().all(|(a, b)| a == b)
    }

    /// `π(o)` with `π(o)(x) = o(π(x))`.
    pub fn apply(&self, outcome: &Outcome) -> Outcome {
        let inverse: BTreeMap<IndividualId, IndividualId> = self.map.iter().map(|(a, b)| (*b, *a)).collect();
        let mut out = Outcome::empty();
        for (y, life) in outcome.iter() {
            let x = inverse.get(y).copied().unwrap_or(*y);
            out.set(x, *life);
        }
        out
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&IndividualId, &IndividualId)> {
        self.map.iter()
    }
}
