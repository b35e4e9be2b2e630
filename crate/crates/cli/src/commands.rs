use std::io::Write;
use std::path::Path;

use cocked_hat::arrangement::count_regions;
use cocked_hat::distributions::ErrorModel;
use cocked_hat::estimators::{
    count_special_selections_with, endpoint_multiplicity, exact_two_ray_delta,
    exact_two_ray_unbounded_with, mc_estimate_delta, mc_estimate_unbounded, tangent_reduction,
    EstimateResult, ExactResult, Formulation, Quantity, DEFAULT_ENUMERATION_CAP,
};
use cocked_hat::geometry::{Angle, Line, Point2};
use cocked_hat::rng::substream;
use cocked_hat::scenarios::{
    classify_t, make_counterexample, random_valid_configuration, reverify, sign_pattern_table,
    CaseTag, CounterexampleId, ModelKind, Scenario,
};
use cocked_hat::Execution;
use serde::Serialize;

use crate::config::{CommandKind, ExperimentConfig, FormulationArg, QuantityArg, ScenarioSource};
use crate::error::{CliError, CliResult};
use crate::model_spec::{format_model, ModelSpec};
use crate::scenario_file::{read_scenario, scenario_hash, write_scenario};

pub const DEFAULT_TRIALS: u64 = 1_000_000;

fn say(out: &mut dyn Write, text: impl AsRef<str>) -> CliResult<()> {
    writeln!(out, "{}", text.as_ref()).map_err(|source| CliError::Write {
        path: "stdout".into(),
        source,
    })
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

fn load_scenario(config: &ExperimentConfig) -> CliResult<Scenario> {
    match &config.scenario {
        Some(ScenarioSource::File(path)) => read_scenario(path),
        Some(ScenarioSource::Inline { points, target }) => Ok(Scenario::new(
            points.iter().map(|[x, y]| Point2::new(*x, *y)).collect(),
            Point2::new(target[0], target[1]),
        )?),
        None => Err(usage(
            "a scenario is required (--scenario FILE or --points/--target)",
        )),
    }
}

fn load_model(config: &ExperimentConfig, scenario: &Scenario) -> CliResult<ErrorModel> {
    let spec = config
        .model
        .as_deref()
        .ok_or_else(|| usage("a model is required (--model SPEC)"))?;
    spec.parse::<ModelSpec>()?.resolve(scenario)
}

fn write_csv<T: Serialize>(path: Option<&Path>, rows: &[T]) -> CliResult<()> {
    let Some(path) = path else { return Ok(()) };
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

fn quantity(config: &ExperimentConfig) -> Quantity {
    config.quantity.unwrap_or(QuantityArg::Hat).into()
}

fn formulation(config: &ExperimentConfig) -> Formulation {
    config
        .formulation
        .unwrap_or(FormulationArg::Constrained)
        .into()
}

/// Run one experiment, printing a summary to `out` and the CSV report to the output path.
pub fn execute(config: &ExperimentConfig, out: &mut dyn Write) -> CliResult<()> {
    match config.command {
        CommandKind::Simulate => simulate(config, out),
        CommandKind::Exact => exact(config, out),
        CommandKind::Special => special(config, out),
        CommandKind::Counterexample => counterexample(config, out),
        CommandKind::Regions => regions(config, out),
        CommandKind::Gen => gen(config, out),
        CommandKind::Table => table(config, out),
    }
}

#[derive(Serialize)]
struct EstimateRow {
    quantity: String,
    formulation: String,
    n: usize,
    trials: u64,
    successes: u64,
    denominator: u64,
    p_hat: f64,
    ci_low: f64,
    ci_high: f64,
    conditioning_frequency: Option<f64>,
    seed: u64,
    scenario_sha256: String,
    model: String,
    closed_form: Option<String>,
    evidence: Option<&'static str>,
}

/// Closed-form value the estimate should match, and how that value is backed for this model.
fn reference(
    q: Quantity,
    f: Formulation,
    n: usize,
    model: &ErrorModel,
) -> (Option<String>, Option<&'static str>) {
    let two_ray = model.two_ray_sites().is_some();
    let evidence = if two_ray {
        "closed form holds exactly for two-ray models"
    } else {
        "closed form checked only by simulation for this model"
    };
    match (q, f) {
        (Quantity::Unbounded, _) => (Some(format!("{}/{}", 2 * n, 1u64 << n)), Some(evidence)),
        (Quantity::Hat, Formulation::Constrained) => (Some("2/8".into()), Some(evidence)),
        _ => (None, None),
    }
}

fn simulate(config: &ExperimentConfig, out: &mut dyn Write) -> CliResult<()> {
    let scenario = load_scenario(config)?;
    let model = load_model(config, &scenario)?;
    let trials = config.trials.unwrap_or(DEFAULT_TRIALS);
    let seed = config.seed.unwrap_or(0);
    let est: EstimateResult = match quantity(config) {
        Quantity::Hat => mc_estimate_delta(&scenario, &model, formulation(config), trials, seed)?,
        Quantity::Unbounded => mc_estimate_unbounded(&scenario, &model, trials, seed)?,
    };
    let mut summary = format!(
        "p_hat = {} ({}/{}), 95% CI [{:.6}, {:.6}]",
        est.p_hat, est.successes, est.denominator, est.ci_low, est.ci_high
    );
    if let Some(freq) = est.conditioning_frequency {
        summary.push_str(&format!(", hat formed in {freq} of trials"));
    }
    say(out, summary)?;
    let (closed_form, evidence) = reference(est.quantity, est.formulation, scenario.n(), &model);
    if let (Some(c), Some(e)) = (&closed_form, evidence) {
        say(out, format!("reference {c}: {e}"))?;
    }
    let row = EstimateRow {
        quantity: est.quantity.to_string(),
        formulation: est.formulation.to_string(),
        n: scenario.n(),
        trials: est.trials,
        successes: est.successes,
        denominator: est.denominator,
        p_hat: est.p_hat,
        ci_low: est.ci_low,
        ci_high: est.ci_high,
        conditioning_frequency: est.conditioning_frequency,
        seed,
        scenario_sha256: scenario_hash(&scenario),
        model: format_model(&model).unwrap_or_default(),
        closed_form,
        evidence,
    };
    write_csv(config.output.as_deref(), &[row])
}

#[derive(Serialize)]
struct ExactRow {
    quantity: String,
    formulation: String,
    n: usize,
    numerator: u64,
    denominator: u64,
    reduced: String,
    decimal: f64,
    forming: Option<u64>,
    favorable: String,
    scenario_sha256: String,
}

fn patterns_text(r: &ExactResult) -> String {
    r.favorable
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn exact(config: &ExperimentConfig, out: &mut dyn Write) -> CliResult<()> {
    let scenario = load_scenario(config)?;
    let model = load_model(config, &scenario)?;
    let q = quantity(config);
    let (f, r) = match q {
        Quantity::Hat => {
            let f = formulation(config);
            (f, exact_two_ray_delta(&scenario, &model, f)?)
        }
        Quantity::Unbounded => {
            let cap = config.cap.unwrap_or(DEFAULT_ENUMERATION_CAP);
            let r = exact_two_ray_unbounded_with(&scenario, &model, cap, Execution::default())?;
            (Formulation::Constrained, r)
        }
    };
    let hash = scenario_hash(&scenario);
    say(
        out,
        format!("{}/{} = {}", r.numerator, r.denominator, r.decimal()),
    )?;
    say(out, format!("scenario sha256 {hash}"))?;
    let row = ExactRow {
        quantity: q.to_string(),
        formulation: f.to_string(),
        n: scenario.n(),
        numerator: r.numerator,
        denominator: r.denominator,
        reduced: r.probability().to_string(),
        decimal: r.decimal(),
        forming: r.forming,
        favorable: patterns_text(&r),
        scenario_sha256: hash,
    };
    write_csv(config.output.as_deref(), &[row])
}

#[derive(Serialize)]
struct SpecialRow {
    pattern: String,
    arc_start: f64,
    arc_length: f64,
    first_endpoint: String,
    last_endpoint: String,
}

fn special(config: &ExperimentConfig, out: &mut dyn Write) -> CliResult<()> {
    let (scenario, model) = match (&config.scenario, config.n) {
        (Some(_), None) => {
            let s = load_scenario(config)?;
            let m = load_model(config, &s)?;
            (s, m)
        }
        (None, Some(n)) => {
            let mut rng = substream(config.seed.unwrap_or(0), 0);
            random_valid_configuration(n, ModelKind::TwoRay, None, &mut rng)?
        }
        _ => {
            return Err(usage(
                "special takes either a scenario and model, or --n with --seed",
            ))
        }
    };
    let cap = config.cap.unwrap_or(DEFAULT_ENUMERATION_CAP);
    let red = tangent_reduction(&scenario, &model)?;
    let (count, witnesses) = count_special_selections_with(&red, cap, Execution::default())?;
    let mult = endpoint_multiplicity(&red)?;
    say(
        out,
        format!("special selections: {count} of {}", 1u64 << scenario.n()),
    )?;
    if mult.values().all(|&v| v == 2) {
        say(out, "endpoint multiplicity: every tangent point twice")?;
    } else {
        let listed: Vec<String> = mult.iter().map(|(p, v)| format!("{p}={v}")).collect();
        say(out, format!("endpoint multiplicity: {}", listed.join(" ")))?;
    }
    let rows: Vec<SpecialRow> = witnesses
        .iter()
        .map(|w| {
            let (a, b) = w.endpoints();
            SpecialRow {
                pattern: w.pattern.to_string(),
                arc_start: w.shortest_arc.start.radians(),
                arc_length: w.shortest_arc.length,
                first_endpoint: a.to_string(),
                last_endpoint: b.to_string(),
            }
        })
        .collect();
    write_csv(config.output.as_deref(), &rows)
}

#[derive(Serialize)]
struct FactRow {
    kind: &'static str,
    name: String,
    value: String,
}

fn fact(kind: &'static str, name: impl Into<String>, value: impl Into<String>) -> FactRow {
    FactRow {
        kind,
        name: name.into(),
        value: value.into(),
    }
}

fn ratio(r: &ExactResult) -> String {
    format!("{}/{}", r.numerator, r.denominator)
}

fn counterexample(config: &ExperimentConfig, out: &mut dyn Write) -> CliResult<()> {
    let id: CounterexampleId = config
        .counterexample
        .ok_or_else(|| usage("counterexample needs an id (CE1, CE2 or CE3)"))?
        .into();
    let spec = make_counterexample(id)?;
    let props = reverify(&spec)?;
    let held = props.iter().filter(|p| p.holds).count();
    let fig = &spec.figures;
    let conditional = fig.conditional.as_ref().map_or("undefined".into(), ratio);
    let verdict = format!("properties: {held}/{} verified", props.len());
    let summary = match id {
        CounterexampleId::Ce1 => format!(
            "conjunction {}, conditional {conditional}, {verdict}",
            ratio(&fig.conjunction)
        ),
        CounterexampleId::Ce2 => format!("lines {}, {verdict}", ratio(&fig.lines)),
        CounterexampleId::Ce3 => format!(
            "lines {}, hat-forming {}/8, {verdict}",
            ratio(&fig.lines),
            fig.hat_forming_patterns
        ),
    };
    say(out, summary)?;

    let mut rows = vec![
        fact("figure", "conjunction", ratio(&fig.conjunction)),
        fact("figure", "conditional", conditional),
        fact("figure", "lines", ratio(&fig.lines)),
        fact(
            "figure",
            "hat_forming",
            format!("{}/8", fig.hat_forming_patterns),
        ),
    ];
    rows.extend(
        props
            .iter()
            .map(|p| fact("property", p.name.clone(), p.holds.to_string())),
    );
    rows.extend(
        spec.scenario
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| fact("site", format!("P{}", i + 1), format!("{} {}", p.x, p.y))),
    );
    let f = spec.scenario.target;
    rows.push(fact("site", "F", format!("{} {}", f.x, f.y)));
    rows.push(fact(
        "model",
        "spec",
        format_model(&spec.model).unwrap_or_default(),
    ));
    write_csv(config.output.as_deref(), &rows)?;
    if held != props.len() {
        return Err(cocked_hat::Error::CounterexampleUnverified {
            id: id.name(),
            detail: format!("{held} of {} properties hold", props.len()),
        }
        .into());
    }
    Ok(())
}

#[derive(Serialize)]
struct RegionsRow {
    lines: usize,
    regions: usize,
}

fn regions(config: &ExperimentConfig, out: &mut dyn Write) -> CliResult<()> {
    if config.lines.is_empty() {
        return Err(usage("regions needs at least one --line X,Y,ANGLE"));
    }
    let lines: Vec<Line> = config
        .lines
        .iter()
        .map(|[x, y, a]| Line::new(Point2::new(*x, *y), Angle::new(*a)))
        .collect();
    let regions = count_regions(&lines)?;
    say(out, format!("regions: {regions}"))?;
    write_csv(
        config.output.as_deref(),
        &[RegionsRow {
            lines: lines.len(),
            regions,
        }],
    )
}

fn case_tag(case: u8) -> CliResult<CaseTag> {
    match case {
        1 => Ok(CaseTag::Case1),
        2 => Ok(CaseTag::Case2),
        3 => Ok(CaseTag::Case3),
        other => Err(usage(format!("case must be 1, 2 or 3, got {other}"))),
    }
}

fn gen(config: &ExperimentConfig, out: &mut dyn Write) -> CliResult<()> {
    let path = config
        .output
        .as_deref()
        .ok_or_else(|| usage("gen needs an output path (--output FILE.scn)"))?;
    let n = config.n.ok_or_else(|| usage("gen needs --n"))?;
    let seed = config.seed.unwrap_or(0);
    let kind: ModelKind = config
        .kind
        .unwrap_or(crate::config::KindArg::Interval)
        .into();
    let case = config.case.map(case_tag).transpose()?;
    let mut rng = substream(seed, 0);
    let (scenario, model) = random_valid_configuration(n, kind, case, &mut rng)?;
    let spec = format_model(&model).unwrap_or_default();
    write_scenario(
        path,
        &scenario,
        &[
            format!("generated with n={n} seed={seed}"),
            format!("model: {spec}"),
        ],
    )?;
    say(out, format!("wrote {}: {n} sites", path.display()))?;
    say(out, format!("scenario sha256 {}", scenario_hash(&scenario)))?;
    say(out, format!("model: {spec}"))
}

#[derive(Serialize)]
struct TableRow {
    pattern: String,
    hat_forms: bool,
    target_in_hat: bool,
}

fn table(config: &ExperimentConfig, out: &mut dyn Write) -> CliResult<()> {
    let scenario = load_scenario(config)?;
    let model = load_model(config, &scenario)?;
    let rows = sign_pattern_table(&scenario, &model)?;
    let case = classify_t(&scenario)?;
    let favorable: Vec<String> = rows
        .iter()
        .filter(|r| r.target_in_hat)
        .map(|r| r.pattern.to_string())
        .collect();
    say(
        out,
        format!(
            "{}: favorable {} of 8: {}",
            case.tag(),
            favorable.len(),
            favorable.join(", ")
        ),
    )?;
    let rows: Vec<TableRow> = rows
        .iter()
        .map(|r| TableRow {
            pattern: r.pattern.to_string(),
            hat_forms: r.hat_forms,
            target_in_hat: r.target_in_hat,
        })
        .collect();
    write_csv(config.output.as_deref(), &rows)
}
