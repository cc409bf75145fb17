//! End-to-end runs with artifact files and a JSON report.

use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow_routing::{route, TERMINAL_FACTOR};
use crate::graph::TwoWeightDigraph;
use crate::held_karp::solve_held_karp;
use crate::io;
use crate::local::{solve_uncertified, unweighted, Branch, LcSolution, Partition, Prepared};
use crate::split::{build_split, compute_lower_bound};
use crate::tol;
use crate::verify::{verify_solution, Certificate};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct InstanceInfo {
    pub n: usize,
    pub m: usize,
    pub w0: f64,
    pub w1: f64,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateSummary {
    pub passed: bool,
    pub eulerian: bool,
    pub classes: usize,
    pub classes_crossed: usize,
    pub components: usize,
    pub max_ratio: Option<f64>,
    pub debt_audit_ok: Option<bool>,
    pub failure: Option<String>,
}

impl CertificateSummary {
    fn from_certificate(cert: &Certificate) -> Self {
        use crate::verify::Crossing;
        Self {
            passed: cert.passed,
            eulerian: cert.eulerian_ok,
            classes: cert.crossings.len(),
            classes_crossed: cert
                .crossings
                .iter()
                .filter(|c| **c != Crossing::Missing)
                .count(),
            components: cert.components.len(),
            max_ratio: cert.max_ratio,
            debt_audit_ok: cert.debt_audit.as_ref().map(|d| d.iter().all(|r| r.ok)),
            failure: (!cert.passed).then(|| cert.failure_summary()),
        }
    }
}

/// Deterministic part of a run; wall times live in [`Timings`].
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub instance: InstanceInfo,
    pub branch: Branch,
    pub lp_objective: f64,
    pub lp_rounds: usize,
    pub expensive_mass: f64,
    pub terminals: Option<Vec<usize>>,
    /// `8·x*(E₁) − |T|`.
    pub terminal_slack: Option<f64>,
    pub lb_total: f64,
    /// `lb(V) / OPT_LP`.
    pub lb_over_opt: Option<f64>,
    pub fractional_weight: f64,
    pub solution_weight: f64,
    pub certificate: CertificateSummary,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Timings {
    pub schema_version: u32,
    pub stages: Vec<StageTime>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageTime {
    pub stage: &'static str,
    pub seconds: f64,
}

impl Timings {
    fn time<T>(&mut self, stage: &'static str, run: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = run().map_err(|e| e.in_stage(stage));
        self.stages.push(StageTime {
            stage,
            seconds: start.elapsed().as_secs_f64(),
        });
        out
    }
}

#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub report: RunReport,
    pub timings: Timings,
    pub solution: LcSolution,
    pub prepared: Prepared,
    /// Artifact name and contents, in write order.
    pub artifacts: Vec<(&'static str, String)>,
}

/// Runs every stage in memory. `partition = None` means singletons.
pub fn run_pipeline(
    graph: &TwoWeightDigraph,
    partition: Option<&Partition>,
    seed: Option<u64>,
) -> Result<PipelineRun> {
    let n = graph.vertex_count();
    let singletons;
    let partition = match partition {
        Some(p) => p,
        None => {
            singletons = Partition::singletons(n);
            &singletons
        }
    };
    let mut timings = Timings {
        schema_version: SCHEMA_VERSION,
        stages: Vec::new(),
    };
    let mut artifacts = vec![
        ("graph.txt", io::write_graph(graph)),
        ("partition.txt", io::write_partition(partition)),
    ];

    let x = timings.time("solve-lp", || solve_held_karp(graph))?;
    artifacts.push(("lp.txt", io::write_lp_solution(&x)));
    let mass = x.expensive_mass(graph);

    let prepared = if mass >= 1.0 - tol::feas() {
        let sink = timings.time("find-terminals", || route(graph, &x))?;
        artifacts.push(("terminals.txt", io::write_sink_flow(&sink)));
        let (split, xsp, lower) = timings.time("split", || {
            let (split, xsp) = build_split(graph, &x, &sink)?;
            let lower = compute_lower_bound(graph, &x, &sink)?;
            Ok((split, xsp, lower))
        })?;
        artifacts.push(("split.txt", io::write_split(&split, &xsp, &lower)));
        Prepared::Weighted {
            x: x.clone(),
            sink,
            split,
            xsp,
            lower,
        }
    } else {
        let (x_prime, lower) = timings.time("six-light", || {
            let x_prime = unweighted::replace_expensive(graph, &x)?;
            let lower = unweighted::unweighted_lower_bound(graph, &x_prime);
            Ok((x_prime, lower))
        })?;
        artifacts.push(("lb.txt", io::write_lower_bound(&lower)));
        Prepared::SixLight {
            x: x.clone(),
            x_prime,
            lower,
        }
    };

    let solution = timings.time("local-connectivity", || {
        solve_uncertified(graph, &prepared, partition)
    })?;
    let solution_text = io::write_solution(&solution)?;
    artifacts.push(("solution.txt", solution_text.clone()));

    // Recompute everything reported from the written artifacts.
    let lb_text = &artifacts
        .iter()
        .find(|(name, _)| *name == "split.txt" || *name == "lb.txt")
        .expect("lower bound artifact")
        .1;
    let (lower, f, mut certificate) = timings.time("verify", || {
        let lower = io::parse_lower_bound(n, lb_text)?;
        let f = io::parse_solution(graph, &solution_text)?;
        if f != solution.f {
            return Err(Error::inconsistency(
                "solution artifact does not round-trip",
            ));
        }
        let cert = verify_solution(graph, &lower, partition, &f);
        Ok((lower, f, cert))
    })?;
    certificate.debt_audit = solution.certificate.debt_audit.clone();
    certificate.refresh_passed();

    let lb_total = lower.total_lb();
    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        instance: InstanceInfo {
            n,
            m: graph.edge_count(),
            w0: graph.w0(),
            w1: graph.w1(),
            seed,
        },
        branch: prepared.branch(),
        lp_objective: x.objective,
        lp_rounds: x.iterations,
        expensive_mass: mass,
        terminals: match &prepared {
            Prepared::Weighted { sink, .. } => Some(sink.terminals.clone()),
            Prepared::SixLight { .. } => None,
        },
        terminal_slack: match &prepared {
            Prepared::Weighted { sink, .. } => {
                Some(TERMINAL_FACTOR * mass - sink.terminals.len() as f64)
            }
            Prepared::SixLight { .. } => None,
        },
        lb_total,
        lb_over_opt: (x.objective > 0.0).then(|| lb_total / x.objective),
        fractional_weight: graph.weigh(&x.values),
        solution_weight: f.weight(graph),
        certificate: CertificateSummary::from_certificate(&certificate),
    };
    Ok(PipelineRun {
        report,
        timings,
        solution,
        prepared,
        artifacts,
    })
}

/// Writes the artifacts, `report.json` and `timings.json` into `dir`.
pub fn write_run(run: &PipelineRun, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (name, text) in &run.artifacts {
        fs::write(dir.join(name), text)?;
    }
    fs::write(dir.join("report.json"), report_json(&run.report)?)?;
    fs::write(
        dir.join("timings.json"),
        serde_json::to_string_pretty(&run.timings)? + "\n",
    )?;
    Ok(())
}

pub fn report_json(report: &RunReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)? + "\n")
}
