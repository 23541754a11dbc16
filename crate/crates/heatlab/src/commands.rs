//! The subcommands. Each returns an [`Outcome`]: the text for stdout, the
//! files for `--out`, and the exit code.

use std::time::Instant;

use heatlab_core::criteria::{
    self, check_blowup_weight, check_def2, check_h4, check_laister, critical_values, measure_c0,
    C0Source, Certificate, ClassifyOptions, Existence, LaisterDetail, Uniqueness, Verdict,
};
use heatlab_core::mild_solver::{
    admissible_horizon, blowup_probe, build_supersolution, decay_check, direct_mild_solve,
    gronwall_uniqueness_check, monotone_iterate, solve_existence, SolverSettings, TimeGrid,
    TraceStatus,
};
use heatlab_core::radial_field::{build_singular_data, DataSide, Domain, ProblemSpec};
use heatlab_core::semigroup::SemigroupEngine;
use heatlab_core::Error;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::output::{finite, pretty, radial_csv, rows_csv, trace_csv, trace_header};
use crate::verify_suite::{run_suite, Fault, SuiteOptions};
use crate::CliError;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub command: &'static str,
    pub report: Value,
    /// What goes to stdout.
    pub stdout: String,
    /// Artifacts for `--out`, as `(file name, contents)`.
    pub files: Vec<(String, String)>,
    pub exit_code: i32,
    /// One human-readable line per step, for `--explain`.
    pub explanation: Vec<String>,
}

fn spec_json(spec: &ProblemSpec) -> Value {
    json!({
        "N": spec.dimension,
        "r": spec.r,
        "rho": spec.rho,
        "K": spec.k,
        "a": spec.a,
        "f": spec.nonlinearity.label(),
        "h": spec.weight.label(),
        "side": match spec.side { DataSide::Upper => "upper", DataSide::Lower => "lower" },
        "domain": match spec.domain {
            Domain::WholeSpace => "whole".to_string(),
            Domain::DirichletBall { radius } => format!("ball:R={radius}"),
        },
    })
}

fn certificate_json(c: &Certificate) -> Value {
    json!({
        "criterion": c.criterion,
        "theorem": c.theorem,
        "value": finite(c.value),
        "threshold": finite(c.threshold),
        "pass": c.pass,
        "heuristic": c.heuristic,
        "note": c.note,
    })
}

fn existence_label(e: Existence) -> &'static str {
    match e {
        Existence::Predicted => "predicted",
        Existence::Excluded => "excluded",
        Existence::Inconclusive => "inconclusive",
    }
}

fn existence_exit(e: Existence) -> i32 {
    match e {
        Existence::Predicted => 0,
        Existence::Excluded => 1,
        Existence::Inconclusive => 2,
    }
}

fn verdict_json(v: &Verdict) -> Value {
    json!({
        "existence": existence_label(v.existence),
        "uniqueness": match v.uniqueness { Uniqueness::Predicted => "predicted", Uniqueness::Inconclusive => "inconclusive" },
        "theorem": v.applied_theorem,
        "p_star": v.p_star,
        "rho_star": v.rho_star,
        "rho_star_weighted": v.rho_star_weighted,
        "c0": v.c0,
        "c1": v.c1,
        "A": v.amplification,
    })
}

/// Work counters. Wall-clock seconds are reported only on request so that
/// default output stays byte-for-byte reproducible.
#[derive(Debug, Clone, Default)]
pub struct Timings {
    started: Option<Instant>,
    counters: serde_json::Map<String, Value>,
}

impl Timings {
    pub fn new(wall_clock: bool) -> Self {
        Timings {
            started: wall_clock.then(Instant::now),
            counters: Default::default(),
        }
    }

    fn count(&mut self, key: &str, value: impl Into<Value>) {
        self.counters.insert(key.to_string(), value.into());
    }

    fn finish(mut self) -> Value {
        if let Some(start) = self.started {
            self.counters
                .insert("wall_seconds".into(), json!(start.elapsed().as_secs_f64()));
        }
        Value::Object(self.counters)
    }
}

fn report(
    command: &str,
    spec: Value,
    result: Value,
    certificates: Vec<Value>,
    timings: Timings,
) -> Value {
    json!({
        "command": command,
        "spec": spec,
        "result": result,
        "certificates": certificates,
        "timings": timings.finish(),
    })
}

fn json_outcome(
    command: &'static str,
    report: Value,
    exit_code: i32,
    explanation: Vec<String>,
) -> Outcome {
    let text = pretty(&report);
    Outcome {
        command,
        stdout: text.clone(),
        files: vec![("report.json".into(), text)],
        report,
        exit_code,
        explanation,
    }
}

fn classify_options(cfg: &RunConfig) -> ClassifyOptions {
    ClassifyOptions {
        amplification: cfg.amplification,
        c0: cfg
            .c0
            .map_or(C0Source::Measured { count: cfg.grid_m }, C0Source::Given),
    }
}

fn settings(cfg: &RunConfig) -> SolverSettings {
    SolverSettings {
        tol: cfg.tol,
        max_iter: cfg.max_iter,
        blowup_cap: cfg.blowup_cap,
    }
}

fn c0_for(cfg: &RunConfig, spec: &ProblemSpec) -> Result<f64, CliError> {
    match cfg.c0 {
        Some(c0) => Ok(c0),
        None => Ok(measure_c0(spec.dimension, spec.rho / spec.r, cfg.grid_m)?),
    }
}

pub fn classify(cfg: &RunConfig, wall_clock: bool) -> Result<Outcome, CliError> {
    let timings = Timings::new(wall_clock);
    let spec = cfg.spec()?;
    let verdict = criteria::classify(&spec, &classify_options(cfg))?;
    let explanation = verdict
        .certificates
        .iter()
        .map(|c| {
            format!(
                "{} [{}]: value {} vs threshold {} -> {}{} {}",
                c.criterion,
                c.theorem,
                c.value,
                c.threshold,
                if c.pass { "pass" } else { "fail" },
                if c.heuristic { " (heuristic)" } else { "" },
                c.note
            )
        })
        .chain(std::iter::once(format!(
            "existence: {}",
            existence_label(verdict.existence)
        )))
        .collect();
    let certificates = verdict.certificates.iter().map(certificate_json).collect();
    let report = report(
        "classify",
        spec_json(&spec),
        verdict_json(&verdict),
        certificates,
        timings,
    );
    Ok(json_outcome(
        "classify",
        report,
        existence_exit(verdict.existence),
        explanation,
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub rho: f64,
    pub verdict: String,
    pub status: String,
    pub t_star: Option<f64>,
    pub escape_time: Option<f64>,
    pub phi_max: Option<f64>,
    pub phi_trace_max: Option<f64>,
    pub c_meas: Option<f64>,
    pub iterations: Option<usize>,
    pub note: String,
}

const SWEEP_HEADER: [&str; 10] = [
    "rho",
    "verdict",
    "status",
    "t_star",
    "escape_time",
    "phi_max",
    "phi_trace_max",
    "c_meas",
    "iterations",
    "note",
];

/// Classification, the upper-side solve and the lower-side probe at one `ρ`.
pub fn sweep_row(cfg: &RunConfig, rho: f64) -> SweepRow {
    let mut row = SweepRow {
        rho,
        verdict: "invalid".into(),
        status: "error".into(),
        t_star: None,
        escape_time: None,
        phi_max: None,
        phi_trace_max: None,
        c_meas: None,
        iterations: None,
        note: String::new(),
    };
    let mut notes = Vec::new();
    let spec = match cfg.spec_at(rho) {
        Ok(spec) => spec,
        Err(e) => {
            row.note = e.to_string();
            return row;
        }
    };
    let mut run = || -> Result<(), CliError> {
        let verdict = criteria::classify(
            &ProblemSpec {
                side: DataSide::Upper,
                ..spec.clone()
            },
            &classify_options(cfg),
        )?;
        let lower = criteria::classify(
            &ProblemSpec {
                side: DataSide::Lower,
                ..spec.clone()
            },
            &classify_options(cfg),
        )?;
        row.verdict = match (verdict.existence, lower.existence) {
            (Existence::Predicted, _) => "predicted",
            (_, Existence::Excluded) => "excluded",
            _ => "inconclusive",
        }
        .into();
        let engine = SemigroupEngine::for_problem(&spec, cfg.grid_m)?;
        let u0 = build_singular_data(&spec, engine.grid().clone())?;
        match solve_existence(
            &spec,
            &engine,
            &u0,
            verdict.c0,
            cfg.amplification,
            cfg.horizon,
            cfg.steps,
            &settings(cfg),
        ) {
            Ok((sup, trace)) => {
                row.status = trace.status.label().into();
                row.t_star = Some(sup.grid.end());
                row.iterations = Some(trace.iterations);
                if trace.status == TraceStatus::Converged {
                    row.c_meas = Some(trace.decay_constant);
                    match blowup_probe(&spec, &engine, &u0, &trace.times) {
                        Ok(p) => row.phi_trace_max = Some(p.phi_max),
                        Err(e) => notes.push(format!("trace probe: {e}")),
                    }
                }
            }
            Err(Error::NoAdmissibleTime) => {
                row.status = "no_admissible_time".into();
                let grid = TimeGrid::geometric(cfg.horizon, cfg.steps)?;
                let trace = direct_mild_solve(&spec, &engine, &u0, &grid, cfg.blowup_cap)?;
                row.escape_time = trace.escape_time;
            }
            Err(e) => notes.push(format!("solve: {e}")),
        }
        match blowup_probe(&spec, &engine, &u0, &cfg.taus) {
            Ok(p) => row.phi_max = Some(p.phi_max),
            Err(e) => notes.push(format!("probe: {e}")),
        }
        Ok(())
    };
    if let Err(e) = run() {
        notes.push(e.to_string());
    }
    row.note = notes.join("; ");
    row
}

pub fn sweep_rho(cfg: &RunConfig, wall_clock: bool) -> Result<Outcome, CliError> {
    let mut timings = Timings::new(wall_clock);
    // family-level parameters must be valid even when the list is empty
    let base = RunConfig {
        rho: 0.5 * cfg.dimension as f64,
        ..cfg.clone()
    };
    let spec = base.spec()?;
    let rows: Vec<SweepRow> = cfg
        .rho_list
        .par_iter()
        .map(|&rho| sweep_row(cfg, rho))
        .collect();
    timings.count("rows", rows.len());
    let csv = rows_csv(&rows, &SWEEP_HEADER)?;
    let mut spec_value = spec_json(&spec);
    spec_value["rho"] = json!(cfg.rho_list);
    let report = report(
        "sweep-rho",
        spec_value,
        json!({ "rows": rows }),
        Vec::new(),
        timings,
    );
    let explanation = rows
        .iter()
        .map(|r| {
            format!(
                "rho={} verdict={} status={} {}",
                r.rho, r.verdict, r.status, r.note
            )
        })
        .collect();
    Ok(Outcome {
        command: "sweep-rho",
        stdout: csv.clone(),
        files: vec![
            ("sweep.csv".into(), csv),
            ("report.json".into(), pretty(&report)),
        ],
        report,
        exit_code: 0,
        explanation,
    })
}

pub fn solve(cfg: &RunConfig, wall_clock: bool) -> Result<Outcome, CliError> {
    let mut timings = Timings::new(wall_clock);
    let spec = cfg.spec()?;
    let engine = SemigroupEngine::for_problem(&spec, cfg.grid_m)?;
    let u0 = build_singular_data(&spec, engine.grid().clone())?;
    let mut explanation = Vec::new();
    let mut certificates = Vec::new();
    let (trace, mut result) = match cfg.method.as_str() {
        "direct" => {
            let grid = TimeGrid::geometric(cfg.horizon, cfg.steps)?;
            let trace = direct_mild_solve(&spec, &engine, &u0, &grid, cfg.blowup_cap)?;
            explanation.push(format!(
                "direct sweep over {} steps: {}",
                grid.steps(),
                trace.status.label()
            ));
            (trace, json!({"method": "direct"}))
        }
        "monotone" => {
            let c0 = c0_for(cfg, &spec)?;
            let (sup, trace) = match solve_existence(
                &spec,
                &engine,
                &u0,
                c0,
                cfg.amplification,
                cfg.horizon,
                cfg.steps,
                &settings(cfg),
            ) {
                Ok(pair) => pair,
                Err(Error::NoAdmissibleTime) => {
                    let report = report(
                        "solve",
                        spec_json(&spec),
                        json!({"method": "monotone", "status": "no_admissible_time", "c0": c0}),
                        Vec::new(),
                        timings,
                    );
                    return Ok(json_outcome(
                        "solve",
                        report,
                        1,
                        vec!["no admissible time on the grid".into()],
                    ));
                }
                Err(e) => return Err(e.into()),
            };
            explanation.push(format!(
                "supersolution A={} on (0, {}]: verified={} max_defect={}",
                cfg.amplification,
                sup.grid.end(),
                sup.verified,
                sup.max_defect
            ));
            explanation.push(format!(
                "{} Picard sweeps: {}",
                trace.iterations,
                trace.status.label()
            ));
            let margins: Vec<Value> = sup
                .margin_curve
                .iter()
                .zip(&sup.discrete_margin)
                .map(|(&(t, m), &(_, d))| json!({"t": t, "margin": finite(m), "discrete_margin": finite(d)}))
                .collect();
            let mut result = json!({
                "method": "monotone",
                "c0": c0,
                "A": cfg.amplification,
                "t_star": sup.t_star,
                "t_star_discrete": sup.t_star_discrete,
                "supersolution_verified": sup.verified,
                "max_defect": sup.max_defect,
                "margin_curve": margins,
            });
            if trace.status == TraceStatus::Converged {
                let decay = decay_check(&trace, &spec, cfg.amplification, c0)?;
                certificates.push(json!({
                    "criterion": "decay", "value": decay.c_meas, "threshold": decay.bound, "pass": decay.pass,
                }));
                result["decay"] =
                    json!({"c_meas": decay.c_meas, "bound": decay.bound, "pass": decay.pass});
                if cfg.perturbation > 0.0 {
                    result["uniqueness"] =
                        uniqueness_pair(cfg, &spec, &engine, c0, &mut certificates)?;
                }
            }
            (trace, result)
        }
        other => {
            return Err(CliError::Invalid(format!(
                "method: expected 'monotone' or 'direct', got '{other}'"
            )))
        }
    };
    timings.count("snapshots", trace.times.len());
    timings.count("picard_sweeps", trace.iterations);
    result["trace"] = trace_header(&trace);
    let exit_code = match trace.status {
        TraceStatus::Converged => 0,
        TraceStatus::BlownUp => 1,
        TraceStatus::MaxIter => 2,
    };
    let report = report("solve", spec_json(&spec), result, certificates, timings);
    let mut outcome = json_outcome("solve", report, exit_code, explanation);
    outcome.files.push(("trace.csv".into(), trace_csv(&trace)?));
    outcome
        .files
        .push(("trace.json".into(), pretty(&trace_header(&trace))));
    if let (Some(last), Some(&t)) = (trace.snapshots.last(), trace.times.last()) {
        let comments = [
            ("quantity", "u(t, r)".to_string()),
            ("t", t.to_string()),
            ("N", spec.dimension.to_string()),
        ];
        outcome
            .files
            .push(("profile.csv".into(), radial_csv(last, &comments)?));
    }
    Ok(outcome)
}

/// Solve from `u_0` and `(1 + δ)u_0` on a common grid and compare with the Gronwall bound.
fn uniqueness_pair(
    cfg: &RunConfig,
    spec: &ProblemSpec,
    engine: &SemigroupEngine,
    c0: f64,
    certificates: &mut Vec<Value>,
) -> Result<Value, CliError> {
    let scale = 1.0 + cfg.perturbation;
    let c1 = cfg
        .c1
        .unwrap_or(cfg.amplification * c0 * spec.k.powf(1.0 / spec.r) * scale * 1.05);
    let def2 = check_def2(&spec.nonlinearity, &spec.weight, spec.r, spec.rho, c1)?;
    if !def2.pass {
        return Ok(json!({"status": "inapplicable", "c1": c1}));
    }
    let bigger = ProblemSpec {
        k: spec.k * scale.powf(spec.r),
        ..spec.clone()
    };
    let horizon = admissible_horizon(&bigger, c0, cfg.amplification, cfg.horizon)?;
    let grid = TimeGrid::geometric(horizon, cfg.steps)?;
    let u0 = build_singular_data(spec, engine.grid().clone())?;
    let v0 = u0.scaled(scale);
    let sv = build_supersolution(spec, engine, &v0, &grid, cfg.amplification, c0)?;
    let su = build_supersolution(spec, engine, &u0, &sv.grid, cfg.amplification, c0)?;
    let (u, v) = rayon::join(
        || monotone_iterate(spec, engine, &u0, &su, &settings(cfg)),
        || monotone_iterate(spec, engine, &v0, &sv, &settings(cfg)),
    );
    let check = match gronwall_uniqueness_check(&u?, &v?, spec, c1) {
        Ok(check) => check,
        Err(
            e @ (Error::HypothesisViolated(_) | Error::TraceStatus(_) | Error::Inapplicable(_)),
        ) => return Ok(json!({"status": "inapplicable", "c1": c1, "reason": e.to_string()})),
        Err(e) => return Err(e.into()),
    };
    let worst = check
        .lhs
        .iter()
        .zip(&check.rhs)
        .map(|(l, r)| l.1 / r.1)
        .fold(0.0, f64::max);
    certificates.push(
        json!({"criterion": "gronwall", "value": worst, "threshold": 1.0, "pass": check.pass}),
    );
    Ok(json!({
        "status": "checked",
        "c1": c1,
        "perturbation": cfg.perturbation,
        "pass": check.pass,
        "worst_ratio": worst,
        "lhs": check.lhs,
        "rhs": check.rhs,
    }))
}

pub fn probe(cfg: &RunConfig, wall_clock: bool) -> Result<Outcome, CliError> {
    let mut timings = Timings::new(wall_clock);
    let spec = cfg.spec()?;
    let engine = SemigroupEngine::for_problem(&spec, cfg.grid_m)?;
    let v0 = build_singular_data(&spec, engine.grid().clone())?;
    timings.count("taus", cfg.taus.len());
    let (result, exit_code, explanation) = match blowup_probe(&spec, &engine, &v0, &cfg.taus) {
        Ok(p) => {
            let rows: Vec<Value> = p
                .rows
                .iter()
                .map(|r| json!({"tau": r.tau, "sup_norm": r.sup_norm, "tail": r.tail, "phi": r.phi, "violated": r.violated}))
                .collect();
            let lines = p
                .rows
                .iter()
                .map(|r| format!("tau={} Phi={} violated={}", r.tau, r.phi, r.violated))
                .collect();
            let code = if p.violated_at.is_some() { 1 } else { 0 };
            (
                json!({"status": "applied", "phi_max": p.phi_max, "violated_at": p.violated_at, "rows": rows}),
                code,
                lines,
            )
        }
        Err(e @ Error::Inapplicable(_)) => (
            json!({"status": "inapplicable", "reason": e.to_string()}),
            2,
            vec![e.to_string()],
        ),
        Err(e) => return Err(e.into()),
    };
    let report = report("probe", spec_json(&spec), result, Vec::new(), timings);
    Ok(json_outcome("probe", report, exit_code, explanation))
}

pub fn verify(cfg: &RunConfig, fault: Option<&str>, wall_clock: bool) -> Result<Outcome, CliError> {
    let mut timings = Timings::new(wall_clock);
    let opts = SuiteOptions {
        only: cfg.only.clone(),
        cases: cfg.cases,
        seed: cfg.seed,
        fault: fault.map(Fault::parse).transpose()?,
    };
    let records = run_suite(&opts)?;
    timings.count("checks", records.len());
    let failed: Vec<&str> = records
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.check.as_str())
        .collect();
    let explanation = records
        .iter()
        .map(|r| {
            format!(
                "{} {}: lhs={} rhs={} ratio={}",
                if r.pass { "PASS" } else { "FAIL" },
                r.check,
                r.lhs,
                r.rhs,
                r.ratio
            )
        })
        .collect();
    let mut failed_names: Vec<&str> = failed.clone();
    failed_names.dedup();
    let result = json!({
        "pass": failed.is_empty(),
        "failed": failed_names,
        "records": records,
    });
    let report = report(
        "verify",
        json!({"only": cfg.only, "cases": cfg.cases, "seed": cfg.seed}),
        result,
        Vec::new(),
        timings,
    );
    Ok(json_outcome(
        "verify",
        report,
        if failed.is_empty() { 0 } else { 1 },
        explanation,
    ))
}

pub fn criteria_report(cfg: &RunConfig, wall_clock: bool) -> Result<Outcome, CliError> {
    let timings = Timings::new(wall_clock);
    let spec = cfg.spec()?;
    let p_star = criteria::p_star(spec.dimension, spec.r);
    let growth = spec.nonlinearity.growth_exponents(p_star)?;
    let beta = spec.weight.power_exponent().unwrap_or(0.0);
    let critical = growth
        .p_inf
        .map(|q| critical_values(spec.dimension, spec.r, q, beta))
        .transpose()?;
    let c0 = c0_for(cfg, &spec)?;
    let c1 = cfg
        .c1
        .unwrap_or(cfg.amplification * c0 * spec.k.powf(1.0 / spec.r));
    let laister = check_laister(&spec.nonlinearity, spec.r, spec.dimension)?;
    let h4 = check_h4(
        &spec.nonlinearity,
        &spec.weight,
        spec.r,
        spec.rho,
        cfg.amplification,
        c0,
        spec.k,
    )?;
    let def2 = check_def2(&spec.nonlinearity, &spec.weight, spec.r, spec.rho, c1)?;
    let blowup = growth
        .p_sup
        .filter(|p| p.is_finite())
        .map(|p| check_blowup_weight(&spec.weight, spec.r, spec.rho, p, (p - 1.0) / 1024.0))
        .transpose()?;
    let laister_detail = match laister.detail {
        LaisterDetail::Limsup { bounded, method } => {
            json!({"kind": "limsup", "bounded": bounded, "method": format!("{method:?}").to_lowercase()})
        }
        LaisterDetail::Integral(t) => {
            json!({"kind": "integral", "value": finite(t.value), "converged": t.converged, "exponent": t.exponent})
        }
    };
    let result = json!({
        "p_star": p_star,
        "growth": {
            "p_inf": growth.p_inf,
            "p_sup": growth.p_sup.map(|p| if p.is_finite() { json!(p) } else { json!("inf") }),
            "method": format!("{:?}", growth.method).to_lowercase(),
        },
        "rho_star": critical.map(|c| c.rho_star),
        "rho_star_weighted": critical.map(|c| c.rho_star_weighted),
        "c0": c0,
        "c1": c1,
        "fujita_growth": {"pass": laister.pass, "detail": laister_detail},
        "supersolution_integral": {"pass": h4.pass, "integral": finite(h4.integral.value), "converged": h4.integral.converged},
        "lipschitz_integral": {"pass": def2.pass, "integral": finite(def2.integral.value), "converged": def2.integral.converged},
        "blowup_weight": blowup.map(|b| json!({
            "holds": b.holds, "kappa": b.kappa, "exponent": b.exponent, "heuristic": b.heuristic,
        })),
    });
    let explanation = vec![
        format!("p* = {p_star}"),
        format!("fujita growth: {}", laister.pass),
        format!("supersolution integral: {}", h4.pass),
        format!("lipschitz integral: {}", def2.pass),
    ];
    let report = report("criteria", spec_json(&spec), result, Vec::new(), timings);
    Ok(json_outcome("criteria", report, 0, explanation))
}
