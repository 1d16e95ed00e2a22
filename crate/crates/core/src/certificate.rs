//! Replayable verdict records.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::model::{IndividualId, LifeId, Outcome};
use crate::order::Verdict;
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Principle {
    IncomparabilityTransmission,
    JointInconsistency,
    ClaimConsistency,
    NegativeDominance,
    Pareto,
    PersonalGood,
    SmallImprovements,
    StatewiseNegativeDominance,
    StochasticDominance,
    Superdominance,
    SupervaluationalNegativeDominance,
    Transitivity,
    WeakAnonymity,
}

impl Principle {
    pub const ALL: [Principle; 13] = [
        Principle::IncomparabilityTransmission,
        Principle::JointInconsistency,
        Principle::ClaimConsistency,
        Principle::NegativeDominance,
        Principle::Pareto,
        Principle::PersonalGood,
        Principle::SmallImprovements,
        Principle::StatewiseNegativeDominance,
        Principle::StochasticDominance,
        Principle::Superdominance,
        Principle::SupervaluationalNegativeDominance,
        Principle::Transitivity,
        Principle::WeakAnonymity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Principle::IncomparabilityTransmission => "IncomparabilityTransmission",
            Principle::JointInconsistency => "JointInconsistency",
            Principle::ClaimConsistency => "ClaimConsistency",
            Principle::NegativeDominance => "NegativeDominance",
            Principle::Pareto => "Pareto",
            Principle::PersonalGood => "PersonalGood",
            Principle::SmallImprovements => "SmallImprovements",
            Principle::StatewiseNegativeDominance => "StatewiseNegativeDominance",
            Principle::StochasticDominance => "StochasticDominance",
            Principle::Superdominance => "Superdominance",
            Principle::SupervaluationalNegativeDominance => "SupervaluationalNegativeDominance",
            Principle::Transitivity => "Transitivity",
            Principle::WeakAnonymity => "WeakAnonymity",
        }
    }
}

impl fmt::Display for Principle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown axiom {0:?}")]
pub struct UnknownAxiom(pub String);

impl FromStr for Principle {
    type Err = UnknownAxiom;

    /// Accepts the canonical names plus a few short forms.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim();
        let alias = match key {
            "IncompTransmission" => Some(Principle::IncomparabilityTransmission),
            "ND" => Some(Principle::NegativeDominance),
            "SD" => Some(Principle::StochasticDominance),
            "PG" => Some(Principle::PersonalGood),
            "StatewiseND" => Some(Principle::StatewiseNegativeDominance),
            _ => None,
        };
        alias
            .or_else(|| Principle::ALL.iter().copied().find(|p| p.name() == key))
            .ok_or_else(|| UnknownAxiom(String::from(key)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CertVerdict {
    Holds,
    Violated,
    PreconditionFails,
}

impl CertVerdict {
    pub fn name(self) -> &'static str {
        match self {
            CertVerdict::Holds => "Holds",
            CertVerdict::Violated => "Violated",
            CertVerdict::PreconditionFails => "PreconditionFails",
        }
    }
}

/// Grade of a dominance comparison. The derived order is None < Weak < Strict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DominanceGrade {
    None,
    Weak,
    Strict,
}

impl DominanceGrade {
    pub fn is_weak(self) -> bool {
        self >= DominanceGrade::Weak
    }

    pub fn name(self) -> &'static str {
        match self {
            DominanceGrade::None => "None",
            DominanceGrade::Weak => "Weak",
            DominanceGrade::Strict => "Strict",
        }
    }
}

/// Per-completion row of a supervaluational certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletionRow {
    /// Index of the personal-order completion this row was derived from.
    pub lives_completion: usize,
    pub better_pair: Option<(Outcome, Outcome)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    None,
    /// Two outcomes and the verdict between them.
    OutcomePair { left: Outcome, right: Outcome, verdict: Verdict },
    /// A state at which two gambles were compared.
    State { state: String, left: Outcome, right: Outcome, verdict: Verdict },
    /// One individual's lives under two outcomes.
    Individual { individual: IndividualId, left: LifeId, right: LifeId, verdict: Verdict },
    /// Existence-probability mismatch.
    Existence { individual: IndividualId, left: Rational, right: Rational },
    /// Upset masses of one individual at one life.
    PersonalUpset { individual: IndividualId, life: LifeId, left: Rational, right: Rational },
    /// Upset masses of two lotteries at one outcome.
    OutcomeUpset { outcome: Outcome, left: Rational, right: Rational },
    /// Two outcomes differing in one individual's life.
    Transmission { left: Outcome, right: Outcome, individual: IndividualId, lives_verdict: Verdict, outcomes_verdict: Verdict },
    /// A one-person variant of `base` still incomparable with both rivals.
    SmallImprovement { base: Outcome, variant: Outcome, individual: IndividualId, direction: Verdict },
    /// A base outcome and two rivals it is incomparable with.
    Triple { base: Outcome, first: Outcome, second: Outcome },
    /// An outcome, its image under a permutation, and their verdict.
    Permuted { outcome: Outcome, image: Outcome, verdict: Verdict },
    Supervaluation { rows: Vec<CompletionRow> },
    /// One certificate demands a better-verdict, another forbids it.
    Conflict { requires: Box<Certificate>, forbids: Box<Certificate> },
    /// A claimed lottery verdict contradicted by a certificate.
    Claim { claimed: Verdict, by: Box<Certificate> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub principle: Principle,
    pub verdict: CertVerdict,
    pub grade: Option<DominanceGrade>,
    pub witness: Witness,
    pub narrative: String,
}

impl Certificate {
    pub fn new(principle: Principle, verdict: CertVerdict, witness: Witness, narrative: impl Into<String>) -> Self {
        Certificate { principle, verdict, grade: None, witness, narrative: narrative.into() }
    }

    pub fn with_grade(mut self, grade: DominanceGrade) -> Self {
        self.grade = Some(grade);
        self
    }

    pub fn holds(&self) -> bool {
        self.verdict == CertVerdict::Holds
    }

    pub fn is_conflict(&self) -> bool {
        self.principle == Principle::JointInconsistency
    }

    /// The requiring and forbidding certificates of a conflict.
    pub fn conflict_parts(&self) -> Option<(&Certificate, &Certificate)> {
        match &self.witness {
            Witness::Conflict { requires, forbids } => Some((requires, forbids)),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn principle_names_round_trip() {
        for p in Principle::ALL {
            assert_eq!(p.name().parse::<Principle>().unwrap(), p);
        }
        assert_eq!("IncompTransmission".parse::<Principle>().unwrap(), Principle::IncomparabilityTransmission);
        assert!("Completeness".parse::<Principle>().is_err());
    }

    #[test]
    fn grade_order() {
        assert!(DominanceGrade::Strict.is_weak());
        assert!(DominanceGrade::Weak.is_weak());
        assert!(!DominanceGrade::None.is_weak());
    }
}
