//! JSON file formats: models, preorders, claims and search specs.
//!
//! Probabilities and welfare values are strings `"p/q"` in lowest terms.
//! Lives, individuals and outcomes are referred to by their string ids; the
//! reserved life id `nonexistence` stands for not existing.

use std::collections::BTreeMap;

use opaque_core::axioms::{LotteryClaim, Prospect, ValueModel};
use opaque_core::constructions::{Check, Expectation, PropositionInstance};
use opaque_core::explorer::{LotteryTemplate, SearchOptions, SearchSpec};
use opaque_core::model::{Gamble, LifeId, Lottery, Outcome, State, Universe};
use opaque_core::rational;
use opaque_core::{CertVerdict, DominanceGrade, OrderError, PartialPreorder, Principle, Rational, RawPreorder, Verdict};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatError {
    #[error("{0}")]
    Json(String),
    #[error("at {path}: {message}")]
    Field { path: String, message: String },
}

fn field(path: impl Into<String>, message: impl Into<String>) -> FormatError {
    FormatError::Field { path: path.into(), message: message.into() }
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, FormatError> {
    serde_json::from_str(text).map_err(|e| FormatError::Json(format!("line {} column {}: {e}", e.line(), e.column())))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct LifeEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub welfare: Option<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct StateEntry {
    pub state: String,
    pub prob: String,
    pub outcome: String,
}

#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PreorderFile {
    pub carrier: Vec<String>,
    #[serde(default)]
    pub strict: Vec<[String; 2]>,
    #[serde(default)]
    pub equal: Vec<[String; 2]>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(tag = "check")]
pub enum CheckEntry {
    PersonalGood { left: String, right: String },
    NegativeDominance { left: String, right: String },
    StochasticDominance { left: String, right: String },
    Superdominance { left: String, right: String },
    StatewiseNegativeDominance { left: String, right: String },
    Pareto { left: String, right: String },
    IncomparabilityTransmission,
    SmallImprovements { base: String, first: String, second: String },
    JointInconsistency { suite: Vec<String>, left: String, right: String },
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct ExpectationEntry {
    #[serde(flatten)]
    pub check: CheckEntry,
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grade: Option<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub lives: Vec<LifeEntry>,
    #[serde(default)]
    pub individuals: Vec<String>,
    #[serde(default)]
    pub outcomes: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    pub lotteries: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    pub gambles: BTreeMap<String, Vec<StateEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lives_order: Option<PreorderFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome_order: Option<PreorderFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub expected: Vec<ExpectationEntry>,
    /// Substitution provider for `reduce`; only `relocation` is built in.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub substitution: Option<String>,
}

impl ModelFile {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model files serialize")
    }

    pub fn digest(&self) -> String {
        sha256_hex(serde_json::to_string(self).expect("model files serialize").as_bytes())
    }
}

pub fn parse_model_file(text: &str) -> Result<ModelFile, FormatError> {
    parse_json(text)
}

pub fn parse_probability(text: &str, path: &str) -> Result<Rational, FormatError> {
    let p = rational::parse(text, true).map_err(|e| field(path, e.to_string()))?;
    if !text.contains('/') {
        return Err(field(path, format!("expected \"p/q\", found {text:?}")));
    }
    Ok(p)
}

fn parse_verdict(text: &str, path: &str) -> Result<Verdict, FormatError> {
    match text.to_ascii_lowercase().as_str() {
        "better" => Ok(Verdict::Better),
        "equal" => Ok(Verdict::Equal),
        "worse" => Ok(Verdict::Worse),
        "incomparable" => Ok(Verdict::Incomparable),
        _ => Err(field(path, format!("unknown verdict {text:?}"))),
    }
}

pub fn parse_cert_verdict(text: &str, path: &str) -> Result<CertVerdict, FormatError> {
    [CertVerdict::Holds, CertVerdict::Violated, CertVerdict::PreconditionFails]
        .into_iter()
        .find(|v| v.name() == text)
        .ok_or_else(|| field(path, format!("unknown certificate verdict {text:?}")))
}

fn parse_grade(text: &str, path: &str) -> Result<DominanceGrade, FormatError> {
    [DominanceGrade::None, DominanceGrade::Weak, DominanceGrade::Strict]
        .into_iter()
        .find(|g| g.name() == text)
        .ok_or_else(|| field(path, format!("unknown grade {text:?}")))
}

pub fn parse_principle(text: &str, path: &str) -> Result<Principle, FormatError> {
    text.parse().map_err(|e: opaque_core::certificate::UnknownAxiom| field(path, e.to_string()))
}

fn life_id(u: &Universe, key: &str, path: &str) -> Result<LifeId, FormatError> {
    u.life_by_key(key).ok_or_else(|| field(path, format!("unknown life {key:?}")))
}

fn preorder<T: Ord + Clone + std::fmt::Debug>(
    file: &PreorderFile,
    path: &str,
    resolve: impl Fn(&str, &str) -> Result<T, FormatError>,
    show: impl Fn(&T) -> String,
) -> Result<PartialPreorder<T>, FormatError> {
    let carrier = file
        .carrier
        .iter()
        .enumerate()
        .map(|(k, x)| resolve(x, &format!("{path}.carrier[{k}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let mut raw = RawPreorder::new(carrier);
    for (k, [x, y]) in file.strict.iter().enumerate() {
        let p = format!("{path}.strict[{k}]");
        raw.strict.push((resolve(x, &p)?, resolve(y, &p)?));
    }
    for (k, [x, y]) in file.equal.iter().enumerate() {
        let p = format!("{path}.equal[{k}]");
        raw.equal.push((resolve(x, &p)?, resolve(y, &p)?));
    }
    raw.close().map_err(|e| match e {
        OrderError::Cycle { cycle } => {
            let names: Vec<String> = cycle.iter().map(&show).collect();
            field(path, format!("strict claims form a cycle: {}", names.join(" > ")))
        }
        other => field(path, format!("{other:?}")),
    })
}

/// Stand-alone preorder over string elements.
pub fn load_preorder(text: &str) -> Result<PartialPreorder<String>, FormatError> {
    let file: PreorderFile = parse_json(text)?;
    preorder(&file, "$", |x, _| Ok(x.to_string()), |x| x.clone())
}

pub fn preorder_file<T: Ord + Clone + std::fmt::Debug>(order: &PartialPreorder<T>, name: impl Fn(&T) -> String) -> PreorderFile {
    PreorderFile {
        carrier: order.carrier().iter().map(&name).collect(),
        strict: order.strict_pairs().iter().map(|(x, y)| [name(x), name(y)]).collect(),
        equal: order.equal_pairs().iter().map(|(x, y)| [name(x), name(y)]).collect(),
    }
}

fn check_of(entry: &CheckEntry, path: &str) -> Result<Check, FormatError> {
    Ok(match entry.clone() {
        CheckEntry::PersonalGood { left, right } => Check::PersonalGood { left, right },
        CheckEntry::NegativeDominance { left, right } => Check::NegativeDominance { left, right },
        CheckEntry::StochasticDominance { left, right } => Check::StochasticDominance { left, right },
        CheckEntry::Superdominance { left, right } => Check::Superdominance { left, right },
        CheckEntry::StatewiseNegativeDominance { left, right } => Check::StatewiseNegativeDominance { left, right },
        CheckEntry::Pareto { left, right } => Check::Pareto { left, right },
        CheckEntry::IncomparabilityTransmission => Check::IncomparabilityTransmission,
        CheckEntry::SmallImprovements { base, first, second } => Check::SmallImprovements { base, first, second },
        CheckEntry::JointInconsistency { suite, left, right } => Check::JointInconsistency {
            suite: suite
                .iter()
                .enumerate()
                .map(|(k, s)| parse_principle(s, &format!("{path}.suite[{k}]")))
                .collect::<Result<_, _>>()?,
            left,
            right,
        },
    })
}

fn entry_of(check: &Check) -> CheckEntry {
    match check.clone() {
        Check::PersonalGood { left, right } => CheckEntry::PersonalGood { left, right },
        Check::NegativeDominance { left, right } => CheckEntry::NegativeDominance { left, right },
        Check::StochasticDominance { left, right } => CheckEntry::StochasticDominance { left, right },
        Check::Superdominance { left, right } => CheckEntry::Superdominance { left, right },
        Check::StatewiseNegativeDominance { left, right } => CheckEntry::StatewiseNegativeDominance { left, right },
        Check::Pareto { left, right } => CheckEntry::Pareto { left, right },
        Check::IncomparabilityTransmission => CheckEntry::IncomparabilityTransmission,
        Check::SmallImprovements { base, first, second } => CheckEntry::SmallImprovements { base, first, second },
        Check::JointInconsistency { suite, left, right } => CheckEntry::JointInconsistency {
            suite: suite.iter().map(|p| p.name().to_string()).collect(),
            left,
            right,
        },
    }
}

/// Builds the universe, orders and named parts a model file describes.
pub fn load_model(file: &ModelFile) -> Result<PropositionInstance, FormatError> {
    let mut u = Universe::new();
    for (k, l) in file.lives.iter().enumerate() {
        let path = format!("lives[{k}]");
        if l.id == Universe::NONEXISTENCE_KEY {
            return Err(field(path, "the id \"nonexistence\" is reserved"));
        }
        let welfare = l
            .welfare
            .as_deref()
            .map(|w| rational::parse(w, true).map_err(|e| field(format!("{path}.welfare"), e.to_string())))
            .transpose()?;
        u.add_life(&l.id, l.label.as_deref(), welfare).map_err(|e| field(path, e.to_string()))?;
    }
    for (k, i) in file.individuals.iter().enumerate() {
        u.add_individual(i, None).map_err(|e| field(format!("individuals[{k}]"), e.to_string()))?;
    }
    let mut outcomes = BTreeMap::new();
    for (name, map) in &file.outcomes {
        let mut o = Outcome::empty();
        for (ind, life) in map {
            let path = format!("outcomes.{name}.{ind}");
            let i = u.individual_by_key(ind).ok_or_else(|| field(&path, format!("unknown individual {ind:?}")))?;
            let l = life_id(&u, life, &path)?;
            if !l.is_nonexistence() {
                o.set(i, l);
            }
        }
        outcomes.insert(name.clone(), o);
    }
    let outcome = |name: &str, path: &str| -> Result<Outcome, FormatError> {
        outcomes.get(name).cloned().ok_or_else(|| field(path, format!("unknown outcome {name:?}")))
    };
    let mut lotteries = BTreeMap::new();
    for (name, entries) in &file.lotteries {
        let mut items = Vec::new();
        for (o, p) in entries {
            let path = format!("lotteries.{name}.{o}");
            items.push((outcome(o, &path)?, parse_probability(p, &path)?));
        }
        let l = Lottery::new(items).map_err(|e| field(format!("lotteries.{name}"), e.to_string()))?;
        lotteries.insert(name.clone(), l);
    }
    let mut gambles = BTreeMap::new();
    for (name, states) in &file.gambles {
        let mut out = Vec::new();
        for (k, s) in states.iter().enumerate() {
            let path = format!("gambles.{name}[{k}]");
            out.push(State {
                id: s.state.clone(),
                probability: parse_probability(&s.prob, &format!("{path}.prob"))?,
                outcome: outcome(&s.outcome, &format!("{path}.outcome"))?,
            });
        }
        let g = Gamble::new(out).map_err(|e| field(format!("gambles.{name}"), e.to_string()))?;
        gambles.insert(name.clone(), g);
    }
    let default_lives = PreorderFile {
        carrier: file.lives.iter().map(|l| l.id.clone()).collect(),
        ..PreorderFile::default()
    };
    let lives = preorder(
        file.lives_order.as_ref().unwrap_or(&default_lives),
        "lives_order",
        |x, p| life_id(&u, x, p),
        |l| u.life_key(*l).to_string(),
    )?;
    let default_outcomes = PreorderFile { carrier: file.outcomes.keys().cloned().collect(), ..PreorderFile::default() };
    let names: BTreeMap<Outcome, String> = outcomes.iter().map(|(k, v)| (v.clone(), k.clone())).collect();
    let order = preorder(
        file.outcome_order.as_ref().unwrap_or(&default_outcomes),
        "outcome_order",
        |x, p| outcome(x, p),
        |o| names.get(o).cloned().unwrap_or_else(|| u.describe(o)),
    )?;
    let expected = file
        .expected
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let path = format!("expected[{k}]");
            Ok(Expectation {
                check: check_of(&e.check, &path)?,
                verdict: parse_cert_verdict(&e.verdict, &format!("{path}.verdict"))?,
                grade: e.grade.as_deref().map(|g| parse_grade(g, &format!("{path}.grade"))).transpose()?,
            })
        })
        .collect::<Result<_, FormatError>>()?;
    Ok(PropositionInstance {
        name: file.name.clone().unwrap_or_else(|| String::from("model")),
        universe: u,
        model: ValueModel::new(lives, order),
        outcomes,
        lotteries,
        gambles,
        expected,
    })
}

/// Serializes an instance. Every outcome that a lottery, gamble or the
/// outcome order mentions must be named in `inst.outcomes`.
pub fn model_file(inst: &PropositionInstance) -> ModelFile {
    let u = &inst.universe;
    let names: BTreeMap<&Outcome, &String> = inst.outcomes.iter().map(|(k, v)| (v, k)).collect();
    let name = |o: &Outcome| names.get(o).map(|s| s.to_string()).unwrap_or_else(|| u.describe(o));
    let outcome_map = |o: &Outcome| o.iter().map(|(i, l)| (u.individual_key(*i), u.life_key(*l).to_string())).collect();
    ModelFile {
        name: Some(inst.name.clone()),
        lives: u
            .lives()
            .filter(|l| !l.id.is_nonexistence())
            .map(|l| LifeEntry {
                id: l.key.clone(),
                label: l.label.clone(),
                welfare: l.welfare.as_ref().map(rational::format),
            })
            .collect(),
        individuals: u.individuals().map(|i| i.key.clone()).collect(),
        outcomes: inst.outcomes.iter().map(|(k, o)| (k.clone(), outcome_map(o))).collect(),
        lotteries: inst
            .lotteries
            .iter()
            .map(|(k, l)| (k.clone(), l.iter().map(|(o, p)| (name(o), rational::format(p))).collect()))
            .collect(),
        gambles: inst
            .gambles
            .iter()
            .map(|(k, g)| {
                let states = g
                    .states()
                    .iter()
                    .map(|s| StateEntry { state: s.id.clone(), prob: rational::format(&s.probability), outcome: name(&s.outcome) })
                    .collect();
                (k.clone(), states)
            })
            .collect(),
        lives_order: Some(preorder_file(&inst.model.lives, |l| u.life_key(*l).to_string())),
        outcome_order: Some(preorder_file(&inst.model.outcomes, name)),
        expected: inst
            .expected
            .iter()
            .map(|e| ExpectationEntry {
                check: entry_of(&e.check),
                verdict: e.verdict.name().to_string(),
                grade: e.grade.map(|g| g.name().to_string()),
            })
            .collect(),
        substitution: None,
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ClaimEntry {
    pub label: String,
    pub left: String,
    pub right: String,
    #[serde(default)]
    pub claimed: Option<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ClaimExpectation {
    pub principle: String,
    pub verdict: String,
    #[serde(default)]
    pub claim: Option<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ClaimsFile {
    pub axioms: Vec<String>,
    #[serde(default)]
    pub claims: Vec<ClaimEntry>,
    #[serde(default)]
    pub expect: Vec<ClaimExpectation>,
}

pub struct Claims {
    pub axioms: Vec<Principle>,
    pub claims: Vec<LotteryClaim>,
    pub expect: Vec<(Principle, CertVerdict, Option<String>)>,
}

pub fn load_claims(text: &str, inst: &PropositionInstance) -> Result<Claims, FormatError> {
    let file: ClaimsFile = parse_json(text)?;
    let axioms = file
        .axioms
        .iter()
        .enumerate()
        .map(|(k, a)| parse_principle(a, &format!("axioms[{k}]")))
        .collect::<Result<_, _>>()?;
    let prospect = |name: &str, path: &str| -> Result<Prospect, FormatError> {
        if let Some(g) = inst.gambles.get(name) {
            return Ok(Prospect::Gamble(g.clone()));
        }
        inst.lotteries
            .get(name)
            .map(|l| Prospect::Lottery(l.clone()))
            .ok_or_else(|| field(path, format!("no lottery or gamble named {name:?}")))
    };
    let claims = file
        .claims
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let path = format!("claims[{k}]");
            Ok(LotteryClaim {
                label: c.label.clone(),
                left: prospect(&c.left, &format!("{path}.left"))?,
                right: prospect(&c.right, &format!("{path}.right"))?,
                claimed: c.claimed.as_deref().map(|v| parse_verdict(v, &format!("{path}.claimed"))).transpose()?,
            })
        })
        .collect::<Result<_, FormatError>>()?;
    let expect = file
        .expect
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let path = format!("expect[{k}]");
            Ok((
                parse_principle(&e.principle, &format!("{path}.principle"))?,
                parse_cert_verdict(&e.verdict, &format!("{path}.verdict"))?,
                e.claim.clone(),
            ))
        })
        .collect::<Result<_, FormatError>>()?;
    Ok(Claims { axioms, claims, expect })
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TemplateEntry {
    pub label: String,
    pub left: String,
    pub right: String,
}

#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    #[serde(default)]
    pub guard: Option<usize>,
    #[serde(default)]
    pub max_candidates: Option<u64>,
}

#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct SearchFile {
    pub lives: Vec<LifeEntry>,
    #[serde(default)]
    pub individuals: Vec<String>,
    pub outcomes: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    pub lotteries: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    pub base_lives: Vec<[String; 2]>,
    #[serde(default)]
    pub incomparable_lives: Vec<[String; 2]>,
    pub axioms: Vec<String>,
    #[serde(default)]
    pub templates: Vec<TemplateEntry>,
    #[serde(default)]
    pub bounds: Bounds,
}

pub struct LoadedSearch {
    pub universe: Universe,
    pub outcome_names: BTreeMap<Outcome, String>,
    pub spec: SearchSpec,
    pub options: SearchOptions,
}

pub fn load_search(text: &str) -> Result<LoadedSearch, FormatError> {
    let file: SearchFile = parse_json(text)?;
    let model = ModelFile {
        lives: file.lives.clone(),
        individuals: file.individuals.clone(),
        outcomes: file.outcomes.clone(),
        lotteries: file.lotteries.clone(),
        ..ModelFile::default()
    };
    let inst = load_model(&model)?;
    let u = &inst.universe;
    let pair = |p: &[String; 2], path: &str| -> Result<(LifeId, LifeId), FormatError> {
        Ok((life_id(u, &p[0], path)?, life_id(u, &p[1], path)?))
    };
    let base_lives = file
        .base_lives
        .iter()
        .enumerate()
        .map(|(k, p)| pair(p, &format!("base_lives[{k}]")))
        .collect::<Result<_, _>>()?;
    let incomparable_lives = file
        .incomparable_lives
        .iter()
        .enumerate()
        .map(|(k, p)| pair(p, &format!("incomparable_lives[{k}]")))
        .collect::<Result<_, _>>()?;
    let axioms = file
        .axioms
        .iter()
        .enumerate()
        .map(|(k, a)| parse_principle(a, &format!("axioms[{k}]")))
        .collect::<Result<_, _>>()?;
    let lottery = |name: &str, path: &str| {
        inst.lotteries.get(name).cloned().ok_or_else(|| field(path, format!("unknown lottery {name:?}")))
    };
    let templates = file
        .templates
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let path = format!("templates[{k}]");
            Ok(LotteryTemplate {
                label: t.label.clone(),
                left: lottery(&t.left, &format!("{path}.left"))?,
                right: lottery(&t.right, &format!("{path}.right"))?,
            })
        })
        .collect::<Result<_, FormatError>>()?;
    let mut options = SearchOptions::default();
    if let Some(g) = file.bounds.guard {
        options.guard = g;
    }
    if let Some(m) = file.bounds.max_candidates {
        options.max_candidates = m as u128;
    }
    let spec = SearchSpec {
        lives: inst.model.lives.carrier().to_vec(),
        base_lives,
        incomparable_lives,
        outcomes: inst.outcomes.values().cloned().collect(),
        axioms,
        lotteries: templates,
    };
    let outcome_names = inst.outcomes.iter().map(|(k, v)| (v.clone(), k.clone())).collect();
    Ok(LoadedSearch { universe: inst.universe, outcome_names, spec, options })
}
