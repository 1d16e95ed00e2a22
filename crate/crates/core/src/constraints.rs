//! Named predicates that a candidate completion must satisfy.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt::Debug;

use crate::axioms::pareto_dominates;
use crate::model::{LifeId, Outcome, Permutation};
use crate::order::{PartialPreorder, Verdict};

pub trait Constraint<T> {
    fn name(&self) -> &str;
    fn admits(&self, candidate: &PartialPreorder<T>) -> bool;
}

pub struct ConstraintSet<T> {
    items: Vec<Box<dyn Constraint<T>>>,
}

impl<T> Default for ConstraintSet<T> {
    fn default() -> Self {
        ConstraintSet { items: Vec::new() }
    }
}

impl<T: Ord + Clone + Debug> ConstraintSet<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, c: impl Constraint<T> + 'static) -> Self {
        self.items.push(Box::new(c));
        self
    }

    pub fn push(&mut self, c: impl Constraint<T> + 'static) {
        self.items.push(Box::new(c));
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn names(&self) -> Vec<&str> {
        self.items.iter().map(|c| c.name()).collect()
    }

    pub fn admits(&self, candidate: &PartialPreorder<T>) -> bool {
        self.first_rejecting(candidate).is_none()
    }

    pub fn first_rejecting(&self, candidate: &PartialPreorder<T>) -> Option<&str> {
        self.items.iter().find(|c| !c.admits(candidate)).map(|c| c.name())
    }
}

/// Re-checks that the weak part is transitive. Enumerated candidates satisfy
/// it by construction; the check exists for independent re-verification.
pub struct Transitivity;

impl<T: Ord + Clone + Debug> Constraint<T> for Transitivity {
    fn name(&self) -> &str {
        "Transitivity"
    }

    fn admits(&self, c: &PartialPreorder<T>) -> bool {
        let n = c.len();
        for i in 0..n {
            if c.verdict_at(i, i) != Verdict::Equal {
                return false;
            }
            for j in 0..n {
                if c.verdict_at(i, j) != c.verdict_at(j, i).flip() {
                    return false;
                }
                if !c.verdict_at(i, j).at_least_as_good() {
                    continue;
                }
                for k in 0..n {
                    if c.verdict_at(j, k).at_least_as_good() && !c.verdict_at(i, k).at_least_as_good() {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Every Pareto-better pair in the carrier, judged by a personal order, must
/// be ranked Better.
pub struct ParetoOnOutcomes {
    pub lives: PartialPreorder<LifeId>,
}

impl Constraint<Outcome> for ParetoOnOutcomes {
    fn name(&self) -> &str {
        "Pareto"
    }

    fn admits(&self, c: &PartialPreorder<Outcome>) -> bool {
        let n = c.len();
        let carrier = c.carrier();
        (0..n).all(|i| {
            (0..n).all(|j| {
                i == j
                    || c.verdict_at(i, j) == Verdict::Better
                    || !pareto_dominates(&carrier[i], &carrier[j], &self.lives)
            })
        })
    }
}

/// No outcome is Better or Worse than its image under any listed permutation.
pub struct WeakAnonymity {
    pub permutations: Vec<Permutation>,
}

impl Constraint<Outcome> for WeakAnonymity {
    fn name(&self) -> &str {
        "WeakAnonymity"
    }

    fn admits(&self, c: &PartialPreorder<Outcome>) -> bool {
        self.permutations.iter().all(|p| {
            c.carrier().iter().all(|o| {
                let image = p.apply(o);
                match c.relate(o, &image) {
                    Ok(v) => !matches!(v, Verdict::Better | Verdict::Worse),
                    Err(_) => true,
                }
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::IndividualId;
    use crate::order::{enumerate_completions, CompletionOptions, RawPreorder};
    use alloc::vec;

    const A: LifeId = LifeId(1);
    const B: LifeId = LifeId(2);
    const P1: IndividualId = IndividualId(1);
    const P2: IndividualId = IndividualId(2);

    #[test]
    fn transitivity_rejects_broken_matrix() {
        let ok = RawPreorder::new(vec![1, 2, 3]).better(1, 2).close().unwrap();
        assert!(Constraint::<i32>::admits(&Transitivity, &ok));
        let bad = PartialPreorder::from_cells(
            vec![1, 2, 3],
            vec![
                Verdict::Equal, Verdict::Better, Verdict::Incomparable,
                Verdict::Worse, Verdict::Equal, Verdict::Better,
                Verdict::Incomparable, Verdict::Worse, Verdict::Equal,
            ],
        );
        assert!(!Constraint::<i32>::admits(&Transitivity, &bad));
    }

    #[test]
    fn pareto_filters_completions() {
        let lives = RawPreorder::new(vec![A, B]).better(A, B).close().unwrap();
        let top = Outcome::of(&[(P1, A)]);
        let low = Outcome::of(&[(P1, B)]);
        let base = PartialPreorder::antichain([top.clone(), low.clone()]);
        let set = ConstraintSet::new().with(ParetoOnOutcomes { lives });
        let all: Vec<_> = enumerate_completions(&base, &set, CompletionOptions::default()).unwrap().collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].relate(&top, &low).unwrap(), Verdict::Better);
    }

    #[test]
    fn anonymity_forces_ties() {
        let ab = Outcome::of(&[(P1, A), (P2, B)]);
        let ba = Outcome::of(&[(P1, B), (P2, A)]);
        let base = PartialPreorder::antichain([ab, ba]);
        let set = ConstraintSet::new().with(WeakAnonymity { permutations: vec![Permutation::swap(P1, P2)] });
        assert_eq!(enumerate_completions(&base, &set, CompletionOptions::default()).unwrap().count(), 1);
        assert_eq!(set.names(), vec!["WeakAnonymity"]);
    }
}
