//! Reduction of a lottery pair to a pair of outcomes.
//!
//! Stage 1 spreads each lottery over `n` equiprobable slots, `n` being the
//! least common denominator of every probability in both lotteries. Stage 2
//! replaces each slot outcome with an equally good outcome on a fresh
//! subpopulation. Stage 3 stacks every slot's population into the first slot,
//! leaving the empty outcome elsewhere.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::axioms::{personal_good, stochastic_dominance};
use crate::certificate::{DominanceGrade, Principle};
use crate::model::{merge_outcomes, Gamble, LifeId, Lottery, ModelError, Outcome, Subpopulation, Universe};
use crate::order::{OrderError, PartialPreorder, RawPreorder};
use crate::rational::{self, Rational};

/// Produces an outcome equally good as `outcome` whose existents all belong
/// to `fresh`.
pub trait SubstitutionProvider {
    /// Size of the fresh subpopulation to allocate for `outcome`.
    fn population_needed(&self, outcome: &Outcome) -> usize {
        outcome.population_size()
    }

    fn substitute(&self, outcome: &Outcome, fresh: &Subpopulation) -> Option<Outcome>;
}

/// Moves the lives of an outcome, in individual order, onto the fresh
/// members. The multiset of lives is unchanged.
#[derive(Clone, Copy, Debug, Default)]
pub struct Relocation;

impl SubstitutionProvider for Relocation {
    fn substitute(&self, outcome: &Outcome, fresh: &Subpopulation) -> Option<Outcome> {
        if fresh.size() < outcome.population_size() {
            return None;
        }
        let mut out = Outcome::empty();
        for (k, (_, life)) in outcome.iter().enumerate() {
            out.set(fresh.members()[k], *life);
        }
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReductionError {
    #[error("no substitute available for outcome {0}")]
    SubstitutionUnavailable(String),
    #[error("least common denominator {0} is too large to expand")]
    TooManySlots(BigInt),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Order(#[from] OrderError<Outcome>),
}

/// The three stages for one lottery.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LotteryStages {
    pub original: Lottery,
    /// Stage 1: slot `k` (0-based) holds `slots[k]`.
    pub slots: Gamble,
    /// Stage 2: substituted slot outcomes and the subpopulations used.
    pub substituted: Gamble,
    pub subpopulations: Vec<Subpopulation>,
    /// Stage 3: everything stacked into the first slot.
    pub stacked: Gamble,
}

impl LotteryStages {
    pub fn primed(&self) -> Lottery {
        self.substituted.collapse()
    }

    pub fn double_primed(&self) -> Lottery {
        self.stacked.collapse()
    }

    pub fn final_outcome(&self) -> &Outcome {
        &self.stacked.states()[0].outcome
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinkKind {
    /// An outcome and its substitute, compared as certain lotteries.
    Slot { slot: usize },
    /// A lottery and its substituted version.
    Substitution,
    /// A substituted lottery and its stacked version.
    Stacking,
}

/// One equal-goodness link in the chain from a lottery to its reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainLink {
    pub lottery: String,
    pub kind: LinkKind,
    pub principle: Principle,
    pub forward: DominanceGrade,
    pub backward: DominanceGrade,
    /// For stacking links: every individual's personal lottery is unchanged.
    pub marginals_identical: Option<bool>,
}

impl ChainLink {
    /// Weak both ways, strict neither way, and marginals intact if recorded.
    pub fn verifies(&self) -> bool {
        self.forward == DominanceGrade::Weak
            && self.backward == DominanceGrade::Weak
            && self.marginals_identical.unwrap_or(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionPlan {
    pub lcd: usize,
    pub left: LotteryStages,
    pub right: LotteryStages,
    /// Originals and substitutes with the registered Equal pairs.
    pub outcomes: PartialPreorder<Outcome>,
    pub chain: Vec<ChainLink>,
}

impl ReductionPlan {
    pub fn final_pair(&self) -> (&Outcome, &Outcome) {
        (self.left.final_outcome(), self.right.final_outcome())
    }

    pub fn chain_verifies(&self) -> bool {
        self.chain.iter().all(ChainLink::verifies)
    }
}

/// Slots beyond this count are refused.
pub const MAX_SLOTS: usize = 4096;

fn expand(lottery: &Lottery, n: usize) -> Result<Gamble, ReductionError> {
    let mut slots = Vec::with_capacity(n);
    let scale = Rational::from_integer(BigInt::from(n));
    for (o, p) in lottery.iter() {
        let count = (p * &scale).to_integer().to_usize().expect("slot count fits");
        for _ in 0..count {
            slots.push(o.clone());
        }
    }
    Ok(Gamble::uniform(slots)?)
}

fn stack(outcomes: &[Outcome]) -> Result<Gamble, ReductionError> {
    let mut top = Outcome::empty();
    for o in outcomes {
        top = merge_outcomes(&top, o)?;
    }
    let mut slots = Vec::with_capacity(outcomes.len());
    slots.push(top);
    slots.extend(core::iter::repeat_n(Outcome::empty(), outcomes.len().saturating_sub(1)));
    Ok(Gamble::uniform(slots)?)
}

fn substitute_all(
    universe: &mut Universe,
    slots: &Gamble,
    provider: &dyn SubstitutionProvider,
) -> Result<(Gamble, Vec<Subpopulation>), ReductionError> {
    let mut outs = Vec::new();
    let mut pops = Vec::new();
    for s in slots.states() {
        let fresh = universe.fresh_individuals(provider.population_needed(&s.outcome));
        let sub = provider
            .substitute(&s.outcome, &fresh)
            .filter(|o| o.existents().all(|i| fresh.members().contains(&i)))
            .ok_or_else(|| ReductionError::SubstitutionUnavailable(universe.describe(&s.outcome)))?;
        universe.register_outcome(&sub);
        outs.push(sub);
        pops.push(fresh);
    }
    Ok((Gamble::uniform(outs)?, pops))
}

fn stages(
    universe: &mut Universe,
    lottery: &Lottery,
    n: usize,
    provider: &dyn SubstitutionProvider,
) -> Result<LotteryStages, ReductionError> {
    let slots = expand(lottery, n)?;
    let (substituted, subpopulations) = substitute_all(universe, &slots, provider)?;
    let outs: Vec<Outcome> = substituted.states().iter().map(|s| s.outcome.clone()).collect();
    let stacked = stack(&outs)?;
    Ok(LotteryStages { original: lottery.clone(), slots, substituted, subpopulations, stacked })
}

/// Reduces `l1` and `l2` to a pair of outcomes, verifying every link of the
/// equal-goodness chain. `lives` is the personal order used for the stacking
/// links; any personal order gives the same grades since the marginals agree.
pub fn reduce_lottery_pair(
    universe: &mut Universe,
    l1: &Lottery,
    l2: &Lottery,
    lives: &PartialPreorder<LifeId>,
    provider: &dyn SubstitutionProvider,
) -> Result<ReductionPlan, ReductionError> {
    for o in l1.outcomes().chain(l2.outcomes()) {
        universe.register_outcome(o);
    }
    let lcd = rational::lcm_of_denominators(l1.iter().chain(l2.iter()).map(|(_, p)| p));
    let n = lcd.to_usize().filter(|&n| n <= MAX_SLOTS).ok_or_else(|| ReductionError::TooManySlots(lcd.clone()))?;
    let left = stages(universe, l1, n, provider)?;
    let right = stages(universe, l2, n, provider)?;

    let mut raw: RawPreorder<Outcome> = RawPreorder::default();
    for st in [&left, &right] {
        for (a, b) in st.slots.states().iter().zip(st.substituted.states()) {
            for o in [&a.outcome, &b.outcome] {
                if !raw.carrier.contains(o) {
                    raw.carrier.push(o.clone());
                }
            }
            if a.outcome != b.outcome {
                raw.equal.push((a.outcome.clone(), b.outcome.clone()));
            }
        }
    }
    let outcomes = raw.close()?;

    let mut chain = Vec::new();
    for (name, st) in [("left", &left), ("right", &right)] {
        for (k, (a, b)) in st.slots.states().iter().zip(st.substituted.states()).enumerate() {
            let x = Lottery::certain(a.outcome.clone());
            let y = Lottery::certain(b.outcome.clone());
            chain.push(ChainLink {
                lottery: String::from(name),
                kind: LinkKind::Slot { slot: k + 1 },
                principle: Principle::StochasticDominance,
                forward: stochastic_dominance(&x, &y, &outcomes)?,
                backward: stochastic_dominance(&y, &x, &outcomes)?,
                marginals_identical: None,
            });
        }
        let primed = st.primed();
        chain.push(ChainLink {
            lottery: String::from(name),
            kind: LinkKind::Substitution,
            principle: Principle::StochasticDominance,
            forward: stochastic_dominance(&st.original, &primed, &outcomes)?,
            backward: stochastic_dominance(&primed, &st.original, &outcomes)?,
            marginals_identical: None,
        });
        let stacked = st.double_primed();
        let people = {
            let mut s = primed.individuals();
            s.extend(stacked.individuals());
            s
        };
        let same = people.iter().all(|&i| primed.personal_lottery(i) == stacked.personal_lottery(i));
        chain.push(ChainLink {
            lottery: String::from(name),
            kind: LinkKind::Stacking,
            principle: Principle::PersonalGood,
            forward: personal_good(&primed, &stacked, lives).grade.unwrap_or(DominanceGrade::None),
            backward: personal_good(&stacked, &primed, lives).grade.unwrap_or(DominanceGrade::None),
            marginals_identical: Some(same),
        });
    }
    Ok(ReductionPlan { lcd: n, left, right, outcomes, chain })
}

/// Human-readable label for a link.
pub fn describe_link(link: &ChainLink) -> String {
    match link.kind {
        LinkKind::Slot { slot } => format!("{} slot s{slot}: outcome vs substitute", link.lottery),
        LinkKind::Substitution => format!("{}: L vs L'", link.lottery),
        LinkKind::Stacking => format!("{}: L' vs L''", link.lottery),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use crate::model::IndividualId;
    use crate::order::Verdict;
    use crate::rational::{int, ratio};
    use num_integer::Integer;

    fn setup() -> (Universe, Vec<LifeId>, IndividualId, IndividualId) {
        let mut u = Universe::new();
        let lives: Vec<LifeId> =
            (0..4).map(|w| u.add_life(&format!("w{w}"), None, Some(int(w - 1))).unwrap()).collect();
        let p1 = u.add_individual("P1", None).unwrap();
        let p2 = u.add_individual("P2", None).unwrap();
        (u, lives, p1, p2)
    }

    #[test]
    fn worked_example_lcd_six() {
        let (mut u, w, p1, p2) = setup();
        let ox = Outcome::of(&[(p1, w[0])]);
        let oy = Outcome::of(&[(p1, w[2]), (p2, w[3])]);
        let oz = Outcome::of(&[(p2, w[1])]);
        let ow = Outcome::of(&[(p1, w[3])]);
        let l1 = Lottery::new([(ox, ratio(1, 3)), (oy, ratio(2, 3))]).unwrap();
        let l2 = Lottery::new([(oz, ratio(1, 2)), (ow, ratio(1, 2))]).unwrap();
        let lives = PartialPreorder::antichain(w.clone());
        let plan = reduce_lottery_pair(&mut u, &l1, &l2, &lives, &Relocation).unwrap();
        // gcd oracle for the lcm
        assert_eq!(plan.lcd, 3.lcm(&2));
        assert_eq!(plan.left.slots.states().len(), 6);
        assert!(plan.chain_verifies());
        // fresh allocation: one subpopulation per slot, sized to the original
        let sizes: Vec<usize> = plan.left.subpopulations.iter().map(|s| s.size()).collect();
        assert_eq!(sizes, vec![1, 1, 2, 2, 2, 2]);
        let (o1, o2) = plan.final_pair();
        assert_eq!(o1.population_size(), 10);
        assert_eq!(o2.population_size(), 6);
        // stacked total is n times the expected total
        let e1 = l1.expected(|o| u.total_welfare(o)).unwrap();
        assert_eq!(u.total_welfare(o1).unwrap(), e1 * int(6));
    }

    #[test]
    fn identical_lotteries_reduce_to_equal_outcomes() {
        let (mut u, w, p1, _) = setup();
        let l = Lottery::new([(Outcome::of(&[(p1, w[1])]), ratio(1, 2)), (Outcome::of(&[(p1, w[2])]), ratio(1, 2))])
            .unwrap();
        let lives = PartialPreorder::from_key(w.clone(), |l| *l);
        let plan = reduce_lottery_pair(&mut u, &l, &l, &lives, &Relocation).unwrap();
        assert_eq!(plan.lcd, 2);
        let (o1, o2) = plan.final_pair();
        assert_ne!(o1, o2);
        // relocation preserves the multiset of lives
        let mut a: Vec<LifeId> = o1.lives().collect();
        let mut b: Vec<LifeId> = o2.lives().collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        let total = PartialPreorder::from_key([o1.clone(), o2.clone()], |o| u.total_welfare(o).unwrap());
        assert_eq!(total.relate(o1, o2).unwrap(), Verdict::Equal);
    }

    #[test]
    fn single_outcome_lotteries() {
        let (mut u, w, p1, _) = setup();
        let l1 = Lottery::certain(Outcome::of(&[(p1, w[1])]));
        let l2 = Lottery::certain(Outcome::empty());
        let lives = PartialPreorder::antichain(w);
        let plan = reduce_lottery_pair(&mut u, &l1, &l2, &lives, &Relocation).unwrap();
        assert_eq!(plan.lcd, 1);
        assert!(plan.chain_verifies());
        assert!(plan.final_pair().1.is_empty());
    }

    struct Refuse;
    impl SubstitutionProvider for Refuse {
        fn substitute(&self, _: &Outcome, _: &Subpopulation) -> Option<Outcome> {
            None
        }
    }

    #[test]
    fn refusing_provider_errors() {
        let (mut u, w, p1, _) = setup();
        let l = Lottery::certain(Outcome::of(&[(p1, w[1])]));
        let lives = PartialPreorder::antichain(w);
        assert!(matches!(
            reduce_lottery_pair(&mut u, &l, &l, &lives, &Refuse),
            Err(ReductionError::SubstitutionUnavailable(_))
        ));
    }
}
