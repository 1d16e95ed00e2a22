//! JSON and text rendering of outcomes and certificates.

use std::collections::BTreeMap;

use opaque_core::model::{IndividualId, LifeId, Outcome, Universe};
use opaque_core::rational;
use opaque_core::{Certificate, Rational, Witness};
use serde_json::{json, Map, Value};

/// Names lives, individuals and, where known, whole outcomes.
pub struct Namer<'a> {
    pub universe: &'a Universe,
    pub outcomes: BTreeMap<Outcome, String>,
}

impl<'a> Namer<'a> {
    pub fn new(universe: &'a Universe) -> Self {
        Namer { universe, outcomes: BTreeMap::new() }
    }

    pub fn with_names(universe: &'a Universe, names: &BTreeMap<String, Outcome>) -> Self {
        Namer { universe, outcomes: names.iter().map(|(k, o)| (o.clone(), k.clone())).collect() }
    }

    pub fn life(&self, l: LifeId) -> String {
        self.universe.life_key(l).to_string()
    }

    pub fn individual(&self, i: IndividualId) -> String {
        self.universe.individual_key(i)
    }

    pub fn outcome_text(&self, o: &Outcome) -> String {
        match self.outcomes.get(o) {
            Some(name) => name.clone(),
            None => self.universe.describe(o),
        }
    }

    pub fn outcome(&self, o: &Outcome) -> Value {
        let map: Map<String, Value> =
            o.iter().map(|(i, l)| (self.individual(*i), Value::String(self.life(*l)))).collect();
        Value::Object(map)
    }
}

fn q(r: &Rational) -> Value {
    Value::String(rational::format(r))
}

pub fn witness_json(n: &Namer, w: &Witness) -> Value {
    match w {
        Witness::None => json!({"kind": "None"}),
        Witness::OutcomePair { left, right, verdict } => json!({
            "kind": "OutcomePair", "left": n.outcome(left), "right": n.outcome(right), "verdict": verdict.name(),
        }),
        Witness::State { state, left, right, verdict } => json!({
            "kind": "State", "state": state, "left": n.outcome(left), "right": n.outcome(right), "verdict": verdict.name(),
        }),
        Witness::Individual { individual, left, right, verdict } => json!({
            "kind": "Individual", "individual": n.individual(*individual),
            "left": n.life(*left), "right": n.life(*right), "verdict": verdict.name(),
        }),
        Witness::Existence { individual, left, right } => json!({
            "kind": "Existence", "individual": n.individual(*individual), "left": q(left), "right": q(right),
        }),
        Witness::PersonalUpset { individual, life, left, right } => json!({
            "kind": "PersonalUpset", "individual": n.individual(*individual), "life": n.life(*life),
            "left": q(left), "right": q(right),
        }),
        Witness::OutcomeUpset { outcome, left, right } => json!({
            "kind": "OutcomeUpset", "outcome": n.outcome(outcome), "left": q(left), "right": q(right),
        }),
        Witness::Transmission { left, right, individual, lives_verdict, outcomes_verdict } => json!({
            "kind": "Transmission", "left": n.outcome(left), "right": n.outcome(right),
            "individual": n.individual(*individual), "lives_verdict": lives_verdict.name(),
            "outcomes_verdict": outcomes_verdict.name(),
        }),
        Witness::SmallImprovement { base, variant, individual, direction } => json!({
            "kind": "SmallImprovement", "base": n.outcome(base), "variant": n.outcome(variant),
            "individual": n.individual(*individual), "direction": direction.name(),
        }),
        Witness::Triple { base, first, second } => json!({
            "kind": "Triple", "base": n.outcome(base), "first": n.outcome(first), "second": n.outcome(second),
        }),
        Witness::Permuted { outcome, image, verdict } => json!({
            "kind": "Permuted", "outcome": n.outcome(outcome), "image": n.outcome(image), "verdict": verdict.name(),
        }),
        Witness::Supervaluation { rows } => json!({
            "kind": "Supervaluation",
            "rows": rows.iter().map(|r| json!({
                "lives_completion": r.lives_completion,
                "better_pair": r.better_pair.as_ref().map(|(a, b)| json!([n.outcome(a), n.outcome(b)])),
            })).collect::<Vec<_>>(),
        }),
        Witness::Conflict { requires, forbids } => json!({
            "kind": "Conflict", "requires": certificate_json(n, requires), "forbids": certificate_json(n, forbids),
        }),
        Witness::Claim { claimed, by } => json!({
            "kind": "Claim", "claimed": claimed.name(), "by": certificate_json(n, by),
        }),
    }
}

pub fn certificate_json(n: &Namer, c: &Certificate) -> Value {
    let mut m = Map::new();
    m.insert("principle".into(), Value::String(c.principle.name().into()));
    m.insert("verdict".into(), Value::String(c.verdict.name().into()));
    if let Some(g) = c.grade {
        m.insert("grade".into(), Value::String(g.name().into()));
    }
    m.insert("witness".into(), witness_json(n, &c.witness));
    m.insert("narrative".into(), Value::String(c.narrative.clone()));
    Value::Object(m)
}

fn witness_text(n: &Namer, w: &Witness) -> Option<String> {
    let o = |x: &Outcome| n.outcome_text(x);
    Some(match w {
        Witness::None => return None,
        Witness::OutcomePair { left, right, verdict } => format!("{} is {} than {}", o(left), verdict.name(), o(right)),
        Witness::State { state, left, right, verdict } => {
            format!("at {state}: {} is {} vs {}", o(left), verdict.name(), o(right))
        }
        Witness::Individual { individual, left, right, verdict } => format!(
            "{}: {} is {} vs {}",
            n.individual(*individual),
            n.life(*left),
            verdict.name(),
            n.life(*right)
        ),
        Witness::Existence { individual, left, right } => {
            format!("{} exists with {} vs {}", n.individual(*individual), rational::format(left), rational::format(right))
        }
        Witness::PersonalUpset { individual, life, left, right } => format!(
            "{} at or above {}: {} vs {}",
            n.individual(*individual),
            n.life(*life),
            rational::format(left),
            rational::format(right)
        ),
        Witness::OutcomeUpset { outcome, left, right } => {
            format!("at or above {}: {} vs {}", o(outcome), rational::format(left), rational::format(right))
        }
        Witness::Transmission { left, right, individual, lives_verdict, outcomes_verdict } => format!(
            "{} vs {} differ in {}; lives {}, outcomes {}",
            o(left),
            o(right),
            n.individual(*individual),
            lives_verdict.name(),
            outcomes_verdict.name()
        ),
        Witness::SmallImprovement { base, variant, individual, direction } => format!(
            "{} changes {} ({}) to {}",
            o(base),
            n.individual(*individual),
            direction.name(),
            o(variant)
        ),
        Witness::Triple { base, first, second } => format!("{} vs {} and {}", o(base), o(first), o(second)),
        Witness::Permuted { outcome, image, verdict } => format!("{} is {} than {}", o(outcome), verdict.name(), o(image)),
        Witness::Supervaluation { rows } => {
            let clean = rows.iter().filter(|r| r.better_pair.is_none()).count();
            format!("{} lives completions, {clean} without a better pair", rows.len())
        }
        Witness::Conflict { .. } | Witness::Claim { .. } => return None,
    })
}

/// One line per certificate, nested certificates indented below.
pub fn certificate_text(n: &Namer, c: &Certificate, indent: usize) -> String {
    let pad = " ".repeat(indent);
    let grade = c.grade.map(|g| format!(" [{}]", g.name())).unwrap_or_default();
    let mut s = format!("{pad}{} {}{}: {}", c.principle, c.verdict.name(), grade, c.narrative);
    if let Some(w) = witness_text(n, &c.witness) {
        s.push_str(&format!("\n{pad}  witness: {w}"));
    }
    match &c.witness {
        Witness::Conflict { requires, forbids } => {
            s.push('\n');
            s.push_str(&certificate_text(n, requires, indent + 2));
            s.push('\n');
            s.push_str(&certificate_text(n, forbids, indent + 2));
        }
        Witness::Claim { by, .. } => {
            s.push('\n');
            s.push_str(&certificate_text(n, by, indent + 2));
        }
        _ => {}
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use opaque_core::constructions::{canonical, Check};

    #[test]
    fn conflict_certificate_nests() {
        let inst = canonical::prop1();
        let cert = inst
            .run(&Check::JointInconsistency {
                suite: vec![opaque_core::Principle::NegativeDominance, opaque_core::Principle::PersonalGood],
                left: "L2".into(),
                right: "L1".into(),
            })
            .unwrap();
        let n = Namer::with_names(&inst.universe, &inst.outcomes);
        let v = certificate_json(&n, &cert);
        assert_eq!(v["witness"]["kind"], "Conflict");
        assert_eq!(v["witness"]["requires"]["principle"], "PersonalGood");
        assert_eq!(v["witness"]["forbids"]["principle"], "NegativeDominance");
        let text = certificate_text(&n, &cert, 0);
        assert_eq!(text.lines().filter(|l| l.starts_with("  ") && !l.trim_start().starts_with("witness")).count(), 2);
    }

    #[test]
    fn outcomes_render_as_maps() {
        let inst = canonical::prop1();
        let n = Namer::new(&inst.universe);
        let v = n.outcome(inst.outcome("(a,b)").unwrap());
        assert_eq!(v, json!({"P1": "a", "P2": "b"}));
    }
}
