//! Experiment matrices: solve, certify and check bounds per instance.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cover::{check_bounds, check_eternal_bounds, check_strategy_bounds, exact_alpha, BoundCheck, BoundEntry};
use crate::error::{EvcError, Result};
use crate::evc_solver::{certify_strategy, exact_alpha_inf_with_cap, verify_safe_set, CertFailure, EVC_CAP};
use crate::grid::{build, GridKind, Topology};
use crate::ratio::{self, rat, Rational};
use crate::strategies::StrategyKind;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub kind: GridKind,
    pub h: usize,
    pub w: usize,
    #[serde(default = "finite")]
    pub topology: Topology,
    /// Strategies to certify; every applicable one when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategies: Option<Vec<StrategyKind>>,
}

fn finite() -> Topology {
    Topology::FiniteRect
}

impl Instance {
    pub fn new(kind: GridKind, h: usize, w: usize, topology: Topology) -> Self {
        Instance { kind, h, w, topology, strategies: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub instances: Vec<Instance>,
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_cap")]
    pub evc_cap: usize,
    /// Record wall-clock times. Off by default so reports are reproducible.
    #[serde(default)]
    pub timings: bool,
}

fn default_rounds() -> usize {
    10_000
}

fn default_cap() -> usize {
    EVC_CAP
}

impl ExperimentSpec {
    pub fn new(instances: Vec<Instance>) -> Self {
        ExperimentSpec { instances, rounds: default_rounds(), seed: 0, evc_cap: EVC_CAP, timings: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyResult {
    pub strategy: StrategyKind,
    pub passed: bool,
    pub guards: usize,
    pub rounds: usize,
    pub rounds_survived: usize,
    pub failures: usize,
    #[serde(with = "ratio")]
    pub rho: Rational,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub first_failure: Option<CertFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub kind: GridKind,
    pub h: usize,
    pub w: usize,
    pub topology: Topology,
    pub n_vertices: usize,
    pub n_edges: usize,
    pub alpha: Option<usize>,
    pub alpha_inf: Option<usize>,
    #[serde(with = "opt_ratio")]
    pub rho: Option<Rational>,
    #[serde(with = "opt_ratio")]
    pub rho_inf: Option<Rational>,
    pub certificate_ok: Option<bool>,
    pub strategies: Vec<StrategyResult>,
    pub bounds: BoundCheck,
    pub errors: Vec<String>,
    pub elapsed_ms: u64,
}

mod opt_ratio {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::ratio::{format, parse, Rational};

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&format(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| parse(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational `{s}`"))))
            .transpose()
    }
}

impl SolveReport {
    /// Strategy failures plus bound violations plus failed certificates.
    pub fn failure_count(&self) -> usize {
        self.strategies.iter().map(|s| s.failures).sum::<usize>()
            + self.bounds.violations()
            + usize::from(self.certificate_ok == Some(false))
    }
}

fn empty_report(inst: &Instance) -> SolveReport {
    SolveReport {
        kind: inst.kind,
        h: inst.h,
        w: inst.w,
        topology: inst.topology,
        n_vertices: 0,
        n_edges: 0,
        alpha: None,
        alpha_inf: None,
        rho: None,
        rho_inf: None,
        certificate_ok: None,
        strategies: Vec::new(),
        bounds: BoundCheck::default(),
        errors: Vec::new(),
        elapsed_ms: 0,
    }
}

fn prefixed(prefix: &str, check: BoundCheck) -> impl Iterator<Item = BoundEntry> + '_ {
    check.entries.into_iter().map(move |e| BoundEntry { name: format!("{prefix}:{}", e.name), ..e })
}

fn run_instance(spec: &ExperimentSpec, inst: &Instance) -> SolveReport {
    let start = Instant::now();
    let mut r = empty_report(inst);
    let g = match build(inst.kind, inst.h, inst.w, inst.topology) {
        Ok(g) => g,
        Err(e) => {
            r.errors.push(e.to_string());
            return r;
        }
    };
    r.n_vertices = g.n();
    r.n_edges = g.m();
    let n = g.n() as i64;

    match exact_alpha(&g) {
        Ok(a) => {
            r.alpha = Some(a.size);
            r.rho = Some(rat(a.size as i64, n));
            r.bounds.entries.extend(check_bounds(&g, a.size).entries);
        }
        Err(e) => r.errors.push(format!("alpha: {e}")),
    }

    if let Some(alpha) = r.alpha.filter(|_| g.n() <= spec.evc_cap.min(64)) {
        match exact_alpha_inf_with_cap(&g, 2 * alpha, spec.evc_cap) {
            Ok((k, safe)) => {
                r.alpha_inf = Some(k);
                r.rho_inf = Some(rat(k as i64, n));
                r.certificate_ok = Some(verify_safe_set(&g, &safe));
                r.bounds.entries.extend(check_eternal_bounds(&g, alpha, k).entries);
            }
            Err(e) => r.errors.push(format!("alpha_inf: {e}")),
        }
    }

    let strategies: Vec<StrategyKind> = match &inst.strategies {
        Some(list) => list.clone(),
        None => StrategyKind::ALL.into_iter().filter(|s| s.check_applicable(&g).is_ok()).collect(),
    };
    for s in strategies {
        match certify_strategy(&g, s, spec.rounds, spec.seed) {
            Ok(cert) => {
                if let Some(alpha) = r.alpha {
                    r.bounds.entries.extend(prefixed(s.tag(), check_strategy_bounds(&g, alpha, cert.guards)));
                }
                r.strategies.push(StrategyResult {
                    strategy: s,
                    passed: cert.passed(),
                    guards: cert.guards,
                    rounds: cert.rounds,
                    rounds_survived: cert.rounds_survived,
                    failures: cert.failures.len(),
                    rho: rat(cert.guards as i64, n),
                    first_failure: cert.failures.into_iter().next(),
                });
            }
            Err(e) => r.errors.push(format!("{s}: {e}")),
        }
    }

    if spec.timings {
        r.elapsed_ms = start.elapsed().as_millis() as u64;
    }
    r
}

/// Runs every instance (in parallel) and returns reports in spec order.
pub fn run_matrix(spec: &ExperimentSpec) -> Vec<SolveReport> {
    spec.instances.par_iter().map(|inst| run_instance(spec, inst)).collect()
}

/// One CSV line: a strategy result, or the bare instance when none applies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvRow {
    pub kind: GridKind,
    pub h: usize,
    pub w: usize,
    pub topology: Topology,
    pub n_vertices: usize,
    pub n_edges: usize,
    pub alpha: Option<usize>,
    pub alpha_inf: Option<usize>,
    pub strategy: Option<StrategyKind>,
    pub guards: Option<usize>,
    pub rounds: Option<usize>,
    pub failures: usize,
    pub rho_num: Option<i64>,
    pub rho_den: Option<i64>,
    pub elapsed_ms: u64,
}

/// The flat view of `reports`. `rho` is guards over vertices on strategy rows
/// and `alpha_inf` (else `alpha`) over vertices on bare rows.
pub fn csv_rows(reports: &[SolveReport]) -> Vec<CsvRow> {
    let mut rows = Vec::new();
    for r in reports {
        let base = |strategy: Option<StrategyKind>, guards, rounds, failures, rho: Option<Rational>| CsvRow {
            kind: r.kind,
            h: r.h,
            w: r.w,
            topology: r.topology,
            n_vertices: r.n_vertices,
            n_edges: r.n_edges,
            alpha: r.alpha,
            alpha_inf: r.alpha_inf,
            strategy,
            guards,
            rounds,
            failures,
            rho_num: rho.map(|q| *q.numer()),
            rho_den: rho.map(|q| *q.denom()),
            elapsed_ms: r.elapsed_ms,
        };
        let unattributed = r.bounds.violations() + usize::from(r.certificate_ok == Some(false));
        if r.strategies.is_empty() {
            let guards = r.alpha_inf.or(r.alpha);
            rows.push(base(None, guards, None, unattributed, r.rho_inf.or(r.rho)));
        }
        for (i, s) in r.strategies.iter().enumerate() {
            let extra = if i == 0 { unattributed } else { 0 };
            rows.push(base(Some(s.strategy), Some(s.guards), Some(s.rounds_survived), s.failures + extra, Some(s.rho)));
        }
    }
    rows
}

pub fn to_csv(reports: &[SolveReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in csv_rows(reports) {
        w.serialize(row).map_err(|e| EvcError::Format(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| EvcError::Format(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn from_csv(text: &str) -> Result<Vec<CsvRow>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<CsvRow>, _>>()
        .map_err(|e| EvcError::Format(e.to_string()))
}

pub fn to_json(reports: &[SolveReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

/// Sum of [`SolveReport::failure_count`] plus per-instance errors.
pub fn total_failures(reports: &[SolveReport]) -> usize {
    reports.iter().map(|r| r.failure_count() + r.errors.len()).sum()
}
