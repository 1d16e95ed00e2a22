//! Subcommand implementations. Each writes its report to `out` and returns
//! the exit code; input errors surface as [`CliError`] and map to exit 2.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use opaque_core::axioms::{check_axiom_suite, LotteryClaim};
use opaque_core::constraints::{ConstraintSet, ParetoOnOutcomes, Transitivity};
use opaque_core::constructions::{totalist_order, PropositionInstance};
use opaque_core::explorer::{conflict_scan, find_model, lives_completions, verify_found, ScanPair, SearchOutcome};
use opaque_core::model::{Gamble, Lottery, Outcome};
use opaque_core::order::{enumerate_completions, HARD_CEILING};
use opaque_core::reduction::{describe_link, reduce_lottery_pair, Relocation};
use opaque_core::{CertVerdict, Certificate, CompletionOptions, OrderError, PartialPreorder, Principle};
use serde_json::{json, Value};

use crate::format::{self, load_claims, load_model, load_search, model_file, parse_model_file, preorder_file, FormatError};
use crate::prop4::render_plan;
use crate::propositions::{self, Options, SectionError, SELECTORS};
use crate::render::{certificate_json, certificate_text, Namer};
use crate::report::{InputDigest, RunReport, Section};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Format { path: String, source: FormatError },
    #[error("{0}")]
    Input(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

fn read(path: &Path) -> Result<(String, InputDigest), CliError> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    let digest = InputDigest { path: path.display().to_string(), sha256: format::sha256_hex(&bytes) };
    let text = String::from_utf8(bytes).map_err(|_| input(format!("{}: not valid UTF-8", path.display())))?;
    Ok((text, digest))
}

fn with_path<T>(path: &Path, r: Result<T, FormatError>) -> Result<T, CliError> {
    r.map_err(|source| CliError::Format { path: path.display().to_string(), source })
}

fn io(e: std::io::Error) -> CliError {
    CliError::Io { path: String::from("<stdout>"), source: e }
}

fn emit(out: &mut dyn Write, report: &RunReport, fmt: Format) -> Result<i32, CliError> {
    match fmt {
        Format::Text => out.write_all(report.to_text().as_bytes()).map_err(io)?,
        Format::Json => writeln!(out, "{}", report.to_json()).map_err(io)?,
    }
    Ok(report.exit_code())
}

pub struct VerifyArgs {
    pub selectors: Vec<String>,
    pub all: bool,
    pub options: Options,
    pub emit_model: Option<PathBuf>,
}

pub fn verify_propositions(args: &VerifyArgs, fmt: Format, out: &mut dyn Write) -> Result<i32, CliError> {
    let started = Instant::now();
    let selected: Vec<String> = if args.all {
        SELECTORS.iter().map(|s| s.to_string()).collect()
    } else {
        args.selectors.clone()
    };
    if selected.is_empty() {
        return Err(input(format!("no selector given; choose from {} or pass --all", SELECTORS.join(", "))));
    }
    if let Some(bad) = selected.iter().find(|s| !SELECTORS.contains(&s.as_str())) {
        return Err(input(format!("unknown selector {bad:?}; choose from {}", SELECTORS.join(", "))));
    }
    let mut report = RunReport::new(format!("verify-propositions {}", selected.join(" ")));
    for name in &selected {
        let sec = propositions::run_section(name, &args.options).map_err(|e| match e {
            SectionError::UnknownSelector(s) => input(format!("unknown selector {s:?}")),
            SectionError::Failed(m) => input(format!("{name}: {m}")),
        })?;
        report.sections.push(sec);
    }
    if let Some(dir) = &args.emit_model {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
        for inst in propositions::emitted_instances(&args.options) {
            let path = dir.join(format!("{}.json", inst.name));
            std::fs::write(&path, model_file(&inst).to_json() + "\n")
                .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        }
    }
    report.finish(started);
    emit(out, &report, fmt)
}

pub struct CheckArgs {
    pub model: PathBuf,
    pub claims: Option<PathBuf>,
    pub expect_holds: bool,
}

fn lottery_level(p: Principle) -> bool {
    matches!(
        p,
        Principle::NegativeDominance
            | Principle::StatewiseNegativeDominance
            | Principle::StochasticDominance
            | Principle::PersonalGood
            | Principle::Superdominance
    )
}

fn expected_block(sec: &mut Section, inst: &PropositionInstance, namer: &Namer) -> Result<(), CliError> {
    let results = inst.verify().map_err(|e| input(format!("expected block: {e}")))?;
    for r in results {
        let e = &r.expectation;
        let want = match e.grade {
            Some(g) => format!("{} ({})", e.verdict.name(), g.name()),
            None => e.verdict.name().to_string(),
        };
        let got = match (e.grade, r.certificate.grade) {
            (Some(_), Some(g)) => format!("{} ({})", r.certificate.verdict.name(), g.name()),
            _ => r.certificate.verdict.name().to_string(),
        };
        sec.check(e.check.describe(), want, got);
        sec.certificates.push(certificate_json(namer, &r.certificate));
    }
    Ok(())
}

fn record(sec: &mut Section, namer: &Namer, certs: &[Certificate]) {
    for c in certs {
        sec.certificates.push(certificate_json(namer, c));
        sec.note(certificate_text(namer, c, 0));
    }
}

pub fn check(args: &CheckArgs, fmt: Format, out: &mut dyn Write) -> Result<i32, CliError> {
    let started = Instant::now();
    let (text, digest) = read(&args.model)?;
    let file = with_path(&args.model, parse_model_file(&text))?;
    let inst = with_path(&args.model, load_model(&file))?;
    let namer = Namer::with_names(&inst.universe, &inst.outcomes);
    let mut report = RunReport::new(format!("check {}", args.model.display()));
    report.inputs.push(digest);
    let mut all_certs: Vec<Certificate> = Vec::new();

    if !inst.expected.is_empty() {
        let mut sec = Section::new("expected");
        expected_block(&mut sec, &inst, &namer)?;
        report.sections.push(sec);
    }

    if let Some(path) = &args.claims {
        let (text, digest) = read(path)?;
        report.inputs.push(digest);
        let claims = with_path(path, load_claims(&text, &inst))?;
        let model_axioms: Vec<Principle> = claims.axioms.iter().copied().filter(|p| !lottery_level(*p)).collect();
        let pair_axioms: Vec<Principle> = claims.axioms.iter().copied().filter(|p| lottery_level(*p)).collect();
        let fail = |e: opaque_core::axioms::AxiomError| input(format!("{}: {e}", path.display()));

        let mut by_claim: BTreeMap<Option<String>, Vec<Certificate>> = BTreeMap::new();
        let mut sec = Section::new("model axioms");
        let certs = check_axiom_suite(&inst.model, &model_axioms, &[]).map_err(fail)?;
        record(&mut sec, &namer, &certs);
        by_claim.insert(None, certs);
        report.sections.push(sec);

        for claim in &claims.claims {
            let mut sec = Section::new(format!("claim {}", claim.label));
            let certs = check_axiom_suite(&inst.model, &pair_axioms, std::slice::from_ref(claim)).map_err(fail)?;
            record(&mut sec, &namer, &certs);
            by_claim.insert(Some(claim.label.clone()), certs);
            report.sections.push(sec);
        }

        if !claims.expect.is_empty() {
            let mut sec = Section::new("expectations");
            for (principle, verdict, claim) in &claims.expect {
                let certs = by_claim.get(claim).map(Vec::as_slice).unwrap_or(&[]);
                let got: Vec<&str> = certs.iter().filter(|c| c.principle == *principle).map(|c| c.verdict.name()).collect();
                let got = if got.contains(&verdict.name()) {
                    verdict.name().to_string()
                } else if got.is_empty() {
                    String::from("absent")
                } else {
                    got.join(", ")
                };
                let scope = claim.as_deref().map(|c| format!(" on {c}")).unwrap_or_default();
                sec.check(format!("{principle}{scope}"), verdict.name(), got);
            }
            report.sections.push(sec);
        }

        let pairs: Vec<ScanPair> = claims
            .claims
            .iter()
            .map(|c: &LotteryClaim| ScanPair {
                label: c.label.clone(),
                left: c.left.lottery(),
                right: c.right.lottery(),
                dominance_view: None,
            })
            .collect();
        let mut sec = Section::new("conflict scan");
        let mut counts = serde_json::Map::new();
        for r in conflict_scan(&inst.model, &pairs).map_err(fail)? {
            counts.insert(r.label.clone(), json!(r.conflicts.len()));
            sec.note(format!("{}: {} conflict(s)", r.label, r.conflicts.len()));
            for c in &r.conflicts {
                sec.certificates.push(certificate_json(&namer, c));
                sec.note(certificate_text(&namer, c, 2));
            }
        }
        sec.data = Value::Object(counts);
        report.sections.push(sec);
        all_certs.extend(by_claim.into_values().flatten());
    }

    if args.expect_holds {
        let mut sec = Section::new("expect holds");
        let violated: Vec<&Certificate> = all_certs.iter().filter(|c| c.verdict == CertVerdict::Violated).collect();
        for c in &violated {
            sec.note(certificate_text(&namer, c, 0));
        }
        sec.check("Violated certificates", 0, violated.len());
        report.sections.push(sec);
    }
    report.finish(started);
    emit(out, &report, fmt)
}

pub struct ReduceArgs {
    pub file: PathBuf,
    pub left: Option<String>,
    pub right: Option<String>,
    pub provider: Option<String>,
}

fn gamble_json(namer: &Namer, g: &Gamble) -> Value {
    Value::Array(
        g.states()
            .iter()
            .map(|s| json!({"state": s.id, "prob": opaque_core::rational::format(&s.probability), "outcome": namer.outcome(&s.outcome)}))
            .collect(),
    )
}

pub fn reduce(args: &ReduceArgs, fmt: Format, out: &mut dyn Write) -> Result<i32, CliError> {
    let started = Instant::now();
    let (text, digest) = read(&args.file)?;
    let file = with_path(&args.file, parse_model_file(&text))?;
    let provider = args.provider.clone().or(file.substitution.clone()).ok_or_else(|| {
        input(format!(
            "{}: no substitution provider configured; pass --provider relocation or set \"substitution\"",
            args.file.display()
        ))
    })?;
    if provider != "relocation" {
        return Err(input(format!("unknown substitution provider {provider:?}; the built-in provider is \"relocation\"")));
    }
    let mut inst = with_path(&args.file, load_model(&file))?;
    let names: Vec<String> = inst.lotteries.keys().cloned().collect();
    let (left, right) = match (&args.left, &args.right) {
        (Some(l), Some(r)) => (l.clone(), r.clone()),
        _ if names.len() == 2 => (names[0].clone(), names[1].clone()),
        _ => return Err(input(format!("{}: name two lotteries with --left and --right", args.file.display()))),
    };
    let lottery = |n: &str| -> Result<Lottery, CliError> {
        inst.lotteries.get(n).cloned().ok_or_else(|| input(format!("{}: no lottery named {n:?}", args.file.display())))
    };
    let (l1, l2) = (lottery(&left)?, lottery(&right)?);
    let plan = reduce_lottery_pair(&mut inst.universe, &l1, &l2, &inst.model.lives, &Relocation)
        .map_err(|e| input(format!("{}: {e}", args.file.display())))?;
    let u = &inst.universe;
    let namer = Namer::new(u);
    let mut report = RunReport::new(format!("reduce {} ({left} vs {right})", args.file.display()));
    report.inputs.push(digest);
    let mut sec = Section::new("reduction");
    for link in &plan.chain {
        sec.check(describe_link(link), true, link.verifies());
    }
    let (o1, o2) = plan.final_pair();
    if let Some(order) = totalist_order(u, &[o1.clone(), o2.clone()]) {
        let e = |l: &Lottery| l.expected(|o| u.total_welfare(o));
        if let (Some(e1), Some(e2)) = (e(&l1), e(&l2)) {
            let got = order.relate(o1, o2).map_err(|e| input(e.to_string()))?;
            let want = match (e1 - e2).cmp(&opaque_core::rational::zero()) {
                std::cmp::Ordering::Greater => "better",
                std::cmp::Ordering::Equal => "equal",
                std::cmp::Ordering::Less => "worse",
            };
            sec.check("totalist verdict of o1 against o2 vs expected-total sign", want, got.name());
        }
    }
    sec.note(render_plan(u, &plan));
    sec.data = json!({
        "n": plan.lcd,
        "left": {
            "slots": gamble_json(&namer, &plan.left.slots),
            "substituted": gamble_json(&namer, &plan.left.substituted),
            "stacked": gamble_json(&namer, &plan.left.stacked),
        },
        "right": {
            "slots": gamble_json(&namer, &plan.right.slots),
            "substituted": gamble_json(&namer, &plan.right.substituted),
            "stacked": gamble_json(&namer, &plan.right.stacked),
        },
        "final": [namer.outcome(o1), namer.outcome(o2)],
        "chain": plan.chain.iter().map(|l| json!({
            "link": describe_link(l),
            "principle": l.principle.name(),
            "forward": l.forward.name(),
            "backward": l.backward.name(),
            "marginals_identical": l.marginals_identical,
            "verifies": l.verifies(),
        })).collect::<Vec<_>>(),
    });
    report.sections.push(sec);
    report.finish(started);
    emit(out, &report, fmt)
}

pub struct CompleteArgs {
    pub file: PathBuf,
    pub pareto: bool,
    pub joint: bool,
    pub linear: bool,
    pub support: Vec<String>,
    pub guard: usize,
    pub force: bool,
}

fn guard_error(size: usize, guard: usize, force: bool) -> CliError {
    if force {
        input(format!("carrier of {size} exceeds the hard ceiling of {HARD_CEILING}"))
    } else {
        input(format!("carrier of {size} exceeds the guard of {guard}; pass --force to raise it to {HARD_CEILING}"))
    }
}

fn cycle_error<T: std::fmt::Debug>(e: OrderError<T>, show: impl Fn(&T) -> String) -> CliError {
    match e {
        OrderError::Cycle { cycle } => {
            let names: Vec<String> = cycle.iter().map(show).collect();
            input(format!("CycleError: {}", names.join(" > ")))
        }
        other => input(other.to_string()),
    }
}

pub fn complete(args: &CompleteArgs, fmt: Format, out: &mut dyn Write) -> Result<i32, CliError> {
    let (text, _) = read(&args.file)?;
    let value: Value = with_path(
        &args.file,
        serde_json::from_str(&text).map_err(|e| FormatError::Json(format!("line {} column {}: {e}", e.line(), e.column()))),
    )?;
    let guard = if args.force { HARD_CEILING } else { args.guard };
    let options = CompletionOptions { guard, linear_only: args.linear };
    let mut count: u64 = 0;
    let mut per_lives: Vec<u64> = Vec::new();
    if value.get("lives").is_none() {
        if args.pareto || args.joint || !args.support.is_empty() {
            return Err(input("--pareto, --joint and --support need a model file"));
        }
        let order = with_path(&args.file, format::load_preorder(&text))?;
        if order.len() > guard {
            return Err(guard_error(order.len(), guard, args.force));
        }
        let set = ConstraintSet::new().with(Transitivity);
        for c in enumerate_completions(&order, &set, options).map_err(|e| cycle_error(e, |x| x.clone()))? {
            writeln!(out, "{}", serde_json::to_string(&preorder_file(&c, |x| x.clone())).expect("serializes")).map_err(io)?;
            count += 1;
        }
    } else {
        let file = with_path(&args.file, parse_model_file(&text))?;
        let inst = with_path(&args.file, load_model(&file))?;
        let names: BTreeMap<Outcome, String> = inst.outcomes.iter().map(|(k, v)| (v.clone(), k.clone())).collect();
        let show = |o: &Outcome| names.get(o).cloned().unwrap_or_else(|| inst.universe.describe(o));
        let mut base = inst.model.outcomes.clone();
        if !args.support.is_empty() {
            let mut keep: Vec<Outcome> = Vec::new();
            for name in &args.support {
                let p = inst.prospect(name).map_err(|e| input(format!("--support {name}: {e}")))?;
                for o in p.lottery().outcomes() {
                    if !keep.contains(o) {
                        keep.push(o.clone());
                    }
                }
            }
            base = base.with_elements(keep.iter().cloned()).restrict(&keep).map_err(|e| cycle_error(e, show))?;
        }
        if base.len() > guard {
            return Err(guard_error(base.len(), guard, args.force));
        }
        let lives_list: Vec<PartialPreorder<opaque_core::LifeId>> = if args.joint {
            lives_completions(&inst.model.lives, base.carrier(), options).map_err(|e| input(e.to_string()))?
        } else {
            vec![inst.model.lives.clone()]
        };
        for (k, lives) in lives_list.into_iter().enumerate() {
            let mut set = ConstraintSet::new().with(Transitivity);
            if args.pareto {
                set.push(ParetoOnOutcomes { lives: lives.clone() });
            }
            let mut here = 0;
            for c in enumerate_completions(&base, &set, options).map_err(|e| cycle_error(e, show))? {
                let mut line = serde_json::to_value(preorder_file(&c, show)).expect("serializes");
                if args.joint {
                    line["lives_completion"] = json!(k);
                }
                writeln!(out, "{}", serde_json::to_string(&line).expect("serializes")).map_err(io)?;
                here += 1;
            }
            per_lives.push(here);
            count += here;
        }
    }
    match fmt {
        Format::Json => {
            let mut summary = json!({"summary": {"completions": count}});
            if args.joint {
                summary["summary"]["per_lives_completion"] = json!(per_lives);
            }
            writeln!(out, "{summary}").map_err(io)?;
        }
        Format::Text => writeln!(out, "completions: {count}").map_err(io)?,
    }
    Ok(0)
}

pub struct SearchArgs {
    pub file: PathBuf,
    pub tally: bool,
    pub guard: Option<usize>,
}

pub fn search(args: &SearchArgs, fmt: Format, out: &mut dyn Write) -> Result<i32, CliError> {
    let started = Instant::now();
    let (text, digest) = read(&args.file)?;
    let mut loaded = with_path(&args.file, load_search(&text))?;
    if let Some(g) = args.guard {
        loaded.options.guard = g;
    }
    let outcome = find_model(&loaded.spec, loaded.options).map_err(|e| input(format!("{}: {e}", args.file.display())))?;
    let mut report = RunReport::new(format!("search {}", args.file.display()));
    report.inputs.push(digest);
    let mut sec = Section::new("search");
    let u = &loaded.universe;
    let show = |o: &Outcome| loaded.outcome_names.get(o).cloned().unwrap_or_else(|| u.describe(o));
    match outcome {
        SearchOutcome::BoundsExceeded { what, size, limit } => {
            return Err(input(format!("{}: BoundsExceeded: {what} of {size} exceeds {limit}", args.file.display())));
        }
        SearchOutcome::ModelFound(found) => {
            let (ok, _) = verify_found(&loaded.spec, &found).map_err(|e| input(e.to_string()))?;
            sec.check("found model re-verifies", true, ok);
            let namer = Namer { universe: u, outcomes: loaded.outcome_names.clone() };
            sec.note(format!("model found at candidate {}", found.candidate));
            let lives = preorder_file(&found.model.lives, |l| u.life_key(*l).to_string());
            let outcomes = preorder_file(&found.model.outcomes, show);
            sec.note(format!("lives order: {}", serde_json::to_string(&lives).expect("serializes")));
            sec.note(format!("outcome order: {}", serde_json::to_string(&outcomes).expect("serializes")));
            for (label, v) in &found.verdicts {
                sec.note(format!("{label}: {}", v.name()));
            }
            sec.certificates = found.certificates.iter().map(|c| certificate_json(&namer, c)).collect();
            sec.data = json!({
                "verdict": "ModelFound",
                "candidate": found.candidate.to_string(),
                "lives_order": lives,
                "outcome_order": outcomes,
                "lottery_verdicts": found.verdicts.iter().map(|(l, v)| json!({"label": l, "verdict": v.name()})).collect::<Vec<_>>(),
            });
        }
        SearchOutcome::Exhausted { candidates, tally } => {
            let sum: u128 = tally.values().sum();
            sec.check("tallies sum to the candidate count", candidates, sum);
            sec.note(format!("exhausted after {candidates} candidates"));
            let mut t = serde_json::Map::new();
            for p in &loaded.spec.axioms {
                if let Some(n) = tally.get(p) {
                    t.insert(p.name().to_string(), json!(n.to_string()));
                    if args.tally {
                        sec.note(format!("  {p}: {n}"));
                    }
                }
            }
            sec.data = json!({"verdict": "Exhausted", "candidates": candidates.to_string(), "tally": t});
        }
    }
    report.sections.push(sec);
    report.finish(started);
    emit(out, &report, fmt)
}
