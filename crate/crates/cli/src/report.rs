//! Query execution and result reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use fpf_core::measure::delta_psi_diagnostic;
use fpf_core::oracle::integrator::contour_line_integral;
use fpf_core::oracle::series::SeriesPropagator;
use fpf_core::oracle::{abl_rule, standard_born};
use fpf_core::{
    abl_measure, born_measure, build_network, chain_measure, compose_check, make_history,
    propagate, Basis, Branch, Error, FixedPoint, C64,
};
use serde::Serialize;

use crate::error::CliError;
use crate::scenario::{Query, QuerySpec, Scenario};
use crate::SCHEMA_VERSION;

/// Largest accepted deviation between a closed-form measure and its oracle.
pub const ORACLE_TOLERANCE: f64 = 1e-10;

/// Steps per constant-Hamiltonian stretch for the chain line-integral oracle.
pub const LINE_INTEGRAL_STEPS: usize = 512;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub query: QuerySpec,
    pub measures: Vec<f64>,
    pub delta_psi: Vec<f64>,
    pub normalizer: Option<f64>,
    pub oracle: Option<Oracle>,
    pub max_deviation: Option<f64>,
    pub errors: Vec<ErrorEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Details>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Oracle {
    pub method: &'static str,
    /// Oracle value per reported entry, aligned with `measures` (born, abl),
    /// `delta_psi` (chain) or the residual names (validate, network).
    pub values: Vec<f64>,
    /// Per-entry acceptance bound.
    pub bounds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorEntry {
    pub code: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Details {
    Chain {
        shape: Vec<usize>,
        selection: Vec<usize>,
        selected_index: usize,
        selected_measure: f64,
        selected_delta_psi: f64,
    },
    Network {
        layer_sizes: Vec<usize>,
        edges: usize,
        channels: usize,
        lines_per_interval: Vec<usize>,
        channels_per_interval: Vec<usize>,
        channel_weights: Vec<ChannelWeight>,
    },
    Validate {
        residuals: BTreeMap<String, f64>,
    },
    /// Complex ΔΨ of each history when the measure could not be normalized.
    Diagnostics {
        complex_delta_psi: Vec<[f64; 2]>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChannelWeight {
    pub layer: usize,
    pub from: usize,
    pub to: usize,
    pub delta_psi: [f64; 2],
}

impl Report {
    fn empty(query: &QuerySpec) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            query: query.clone(),
            measures: Vec::new(),
            delta_psi: Vec::new(),
            normalizer: None,
            oracle: None,
            max_deviation: None,
            errors: Vec::new(),
            details: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned plain-text rendering.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "query: {}", self.query.kind());
        if let Some(n) = self.normalizer {
            let _ = writeln!(out, "normalizer: {n:.15e}");
        }
        if let Some(d) = self.max_deviation {
            let method = self.oracle.as_ref().map_or("", |o| o.method);
            let _ = writeln!(out, "max_deviation: {d:.3e} ({method})");
        }
        for e in &self.errors {
            let _ = writeln!(out, "error: {}: {}", e.code, e.message);
        }
        if !self.measures.is_empty() {
            let oracle = self.oracle.as_ref().map(|o| &o.values);
            let _ = writeln!(out, "{:>8}  {:>22}  {:>22}  {:>22}", "outcome", "delta_psi", "measure", "oracle");
            for (i, (d, m)) in self.delta_psi.iter().zip(&self.measures).enumerate() {
                let o = oracle.and_then(|v| v.get(i)).map_or("-".to_string(), |x| format!("{x:.15e}"));
                let _ = writeln!(out, "{i:>8}  {d:>22.15e}  {m:>22.15e}  {o:>22}");
            }
        }
        match &self.details {
            Some(Details::Validate { residuals }) => {
                let width = residuals.keys().map(String::len).max().unwrap_or(0);
                for (k, v) in residuals {
                    let _ = writeln!(out, "{k:<width$}  {v:.3e}");
                }
            }
            Some(Details::Network { layer_sizes, edges, channels, channel_weights, .. }) => {
                let _ = writeln!(out, "layers: {layer_sizes:?}  lines: {edges}  channels: {channels}");
                let _ = writeln!(out, "{:>6}  {:>5}  {:>5}  {:>22}  {:>22}", "layer", "from", "to", "re", "im");
                for w in channel_weights {
                    let _ = writeln!(
                        out,
                        "{:>6}  {:>5}  {:>5}  {:>22.15e}  {:>22.15e}",
                        w.layer, w.from, w.to, w.delta_psi[0], w.delta_psi[1]
                    );
                }
            }
            Some(Details::Chain { selection, selected_measure, .. }) => {
                let _ = writeln!(out, "selection {selection:?}: measure {selected_measure:.15e}");
            }
            Some(Details::Diagnostics { complex_delta_psi }) => {
                for (i, z) in complex_delta_psi.iter().enumerate() {
                    let _ = writeln!(out, "{i:>8}  {:>22.15e}  {:>22.15e}i", z[0], z[1]);
                }
            }
            None => {}
        }
        out
    }
}

fn core(path: &str) -> impl Fn(Error) -> CliError + '_ {
    move |e| CliError::from_core(path, e)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn check_oracle(report: &Report, what: &str) -> Result<(), CliError> {
    let (Some(oracle), Some(_)) = (&report.oracle, report.max_deviation) else {
        return Ok(());
    };
    let compared = match report.query {
        QuerySpec::Chain { .. } => &report.delta_psi,
        _ => &report.measures,
    };
    for (i, ((x, y), bound)) in compared.iter().zip(&oracle.values).zip(&oracle.bounds).enumerate() {
        let d = (x - y).abs();
        if !(d <= *bound) {
            return Err(CliError::Numerical(format!(
                "{what} entry {i} deviates from {} by {d:e} (bound {bound:e})",
                oracle.method
            )));
        }
    }
    Ok(())
}

/// Executes the scenario's query and verifies it against its oracle.
pub fn run(scenario: &Scenario) -> Result<Report, CliError> {
    let sched = &scenario.schedule;
    let tol = &scenario.tolerances;
    let mut report = Report::empty(&scenario.spec().query);
    match &scenario.query {
        Query::Born { prep, t, basis } => {
            let m = born_measure(sched, prep, *t, basis, tol).map_err(core("query"))?;
            let u = SeriesPropagator::new(sched, Branch::Forward)
                .propagate_unitary(prep.t, *t)
                .map_err(core("query.t"))?;
            let values = basis
                .iter()
                .map(|phi| standard_born(&u, &prep.state, phi))
                .collect::<Result<Vec<_>, _>>()
                .map_err(core("query"))?;
            report.max_deviation = Some(max_abs_diff(&m.measures, &values));
            report.oracle = Some(Oracle { method: "standard_born", bounds: vec![ORACLE_TOLERANCE; values.len()], values });
            report.delta_psi = m.delta_psi;
            report.measures = m.measures;
            report.normalizer = Some(m.normalizer);
        }
        Query::Abl { pre, post, t, basis } => {
            let m = abl_measure(sched, pre, *t, basis, post, tol).map_err(core("query"))?;
            let walker = SeriesPropagator::new(sched, Branch::Forward);
            let u1 = walker.propagate_unitary(pre.t, *t).map_err(core("query.t"))?;
            let u2 = walker.propagate_unitary(*t, post.t).map_err(core("query.t"))?;
            let values = abl_rule(&u1, &u2, &pre.state, basis, &post.state, tol).map_err(core("query"))?;
            report.max_deviation = Some(max_abs_diff(&m.measures, &values));
            report.oracle = Some(Oracle { method: "abl_rule", bounds: vec![ORACLE_TOLERANCE; values.len()], values });
            report.delta_psi = m.delta_psi;
            report.measures = m.measures;
            report.normalizer = Some(m.normalizer);
        }
        Query::Chain { pre, post, interior, selection } => {
            let c = chain_measure(sched, (pre, post), interior, selection, tol).map_err(core("query"))?;
            let mut values = Vec::with_capacity(c.joint.len());
            let mut bounds = Vec::with_capacity(c.joint.len());
            for k in 0..c.joint.len() {
                let sel = c.selection_of(k);
                let history = chain_history(pre, post, interior, &sel);
                let history = make_history(history, tol).map_err(core("query"))?;
                let li = contour_line_integral(sched, &history, LINE_INTEGRAL_STEPS).map_err(core("query"))?;
                values.push(li.value);
                bounds.push(li.err_estimate);
            }
            report.max_deviation = Some(max_abs_diff(&c.joint.delta_psi, &values));
            report.oracle = Some(Oracle { method: "contour_line_integral", values, bounds });
            report.details = Some(Details::Chain {
                shape: c.shape.clone(),
                selection: c.selection.clone(),
                selected_index: c.selected,
                selected_measure: c.selected_measure(),
                selected_delta_psi: c.selected_delta_psi(),
            });
            report.normalizer = Some(c.joint.normalizer);
            report.delta_psi = c.joint.delta_psi;
            report.measures = c.joint.measures;
        }
        Query::Network { times, bases } => return run_network(scenario, times, bases),
        Query::Validate => return run_validation(scenario),
    }
    check_oracle(&report, scenario.spec().query.kind())?;
    Ok(report)
}

fn chain_history(pre: &FixedPoint, post: &FixedPoint, interior: &[(f64, Basis)], sel: &[usize]) -> Vec<FixedPoint> {
    let mut points = vec![pre.clone()];
    points.extend(interior.iter().zip(sel).map(|((t, b), &i)| FixedPoint::new(*t, b[i].clone())));
    points.push(post.clone());
    points
}

/// Builds the fixed-point network and checks its line and channel counts
/// against `2·N₁·N₂` and `N₁·N₂` per interval.
pub fn run_network(scenario: &Scenario, times: &[f64], bases: &[Basis]) -> Result<Report, CliError> {
    let sched = &scenario.schedule;
    let net = build_network(times, bases.to_vec()).map_err(core("query.layers"))?;
    let sizes: Vec<usize> = net.layers().iter().map(|l| l.nodes.len()).collect();
    let intervals = sizes.len().saturating_sub(1);
    let lines: Vec<usize> = (0..intervals).map(|l| net.edges_between(l).count()).collect();
    let channels: Vec<usize> = (0..intervals).map(|l| net.channels_between(l).len()).collect();

    let mut weights = Vec::new();
    for l in 0..intervals {
        for ch in net.channels_between(l) {
            let a = FixedPoint::new(net.layers()[l].t, net.node_state(ch.earlier).clone());
            let b = FixedPoint::new(net.layers()[l + 1].t, net.node_state(ch.later).clone());
            let z = delta_psi_diagnostic(sched, &[a, b]).map_err(core("query.layers"))?;
            weights.push(ChannelWeight { layer: l, from: ch.earlier.index, to: ch.later.index, delta_psi: [z.re, z.im] });
        }
    }

    let expected_lines: Vec<f64> = sizes.windows(2).map(|w| (2 * w[0] * w[1]) as f64).collect();
    let expected_channels: Vec<f64> = sizes.windows(2).map(|w| (w[0] * w[1]) as f64).collect();
    let found: Vec<f64> = lines.iter().chain(&channels).map(|&n| n as f64).collect();
    let expected: Vec<f64> = expected_lines.into_iter().chain(expected_channels).collect();

    let mut report = Report::empty(&scenario.spec().query);
    report.max_deviation = Some(max_abs_diff(&found, &expected));
    report.oracle = Some(Oracle { method: "branch_line_count", bounds: vec![0.0; expected.len()], values: expected.clone() });
    report.details = Some(Details::Network {
        layer_sizes: sizes,
        edges: net.edges().len(),
        channels: channels.iter().sum(),
        lines_per_interval: lines,
        channels_per_interval: channels,
        channel_weights: weights,
    });
    if found != expected {
        return Err(CliError::Numerical(format!("network counts {found:?} differ from {expected:?}")));
    }
    Ok(report)
}

/// Propagator-law residuals on both branches over the schedule coverage,
/// plus the distance between the spectral and series propagators.
pub fn run_validation(scenario: &Scenario) -> Result<Report, CliError> {
    let sched = &scenario.schedule;
    let (start, end) = sched.coverage();
    let mut cuts: Vec<f64> = sched.pieces().iter().skip(1).map(|p| p.t_start).collect();
    cuts.push(0.5 * (start + end));
    cuts.sort_by(f64::total_cmp);
    let err = core("hamiltonian");

    let mut residuals = BTreeMap::new();
    for branch in Branch::BOTH {
        let label = branch.label();
        let u = propagate(sched, branch, start, end).map_err(&err)?;
        let back = propagate(sched, branch, end, start).map_err(&err)?;
        let mut composition: f64 = 0.0;
        for &mid in &cuts {
            composition = composition.max(compose_check(sched, branch, start, mid, end).map_err(&err)?);
        }
        let series = SeriesPropagator::new(sched, branch).propagate_unitary(start, end).map_err(&err)?;
        residuals.insert(format!("{label}.unitarity"), u.unitarity_residual());
        residuals.insert(format!("{label}.composition"), composition);
        residuals.insert(format!("{label}.reversal_adjoint"), back.distance(&u.adjoint()));
        residuals.insert(format!("{label}.series_distance"), u.distance(&series));
    }

    let bound = scenario.tolerances.unitarity;
    let max = residuals.values().copied().fold(0.0, f64::max);
    let mut report = Report::empty(&scenario.spec().query);
    report.max_deviation = Some(max);
    report.oracle = Some(Oracle { method: "propagator_laws", values: vec![0.0; residuals.len()], bounds: vec![bound; residuals.len()] });
    let failed: Vec<String> = residuals.iter().filter(|(_, v)| !(**v <= bound)).map(|(k, v)| format!("{k}={v:e}")).collect();
    report.details = Some(Details::Validate { residuals });
    if !failed.is_empty() {
        return Err(CliError::Numerical(format!("propagator laws violated: {}", failed.join(", "))));
    }
    Ok(report)
}

/// A report describing a failed run. For branch-dependent schedules the
/// complex ΔΨ of each history is attached.
pub fn failure_report(scenario: &Scenario, err: &CliError) -> Report {
    let mut report = Report::empty(&scenario.spec().query);
    report.errors.push(ErrorEntry { code: err.code(), message: err.to_string() });
    if matches!(err, CliError::Domain(Error::BranchDependent)) {
        if let Some(z) = complex_delta_psi(scenario) {
            report.details = Some(Details::Diagnostics { complex_delta_psi: z.iter().map(|z| [z.re, z.im]).collect() });
        }
    }
    report
}

fn complex_delta_psi(scenario: &Scenario) -> Option<Vec<C64>> {
    let sched = &scenario.schedule;
    let histories: Vec<Vec<FixedPoint>> = match &scenario.query {
        Query::Born { prep, t, basis } => {
            basis.iter().map(|phi| vec![prep.clone(), FixedPoint::new(*t, phi.clone())]).collect()
        }
        Query::Abl { pre, post, t, basis } => basis
            .iter()
            .map(|a| vec![pre.clone(), FixedPoint::new(*t, a.clone()), post.clone()])
            .collect(),
        Query::Chain { pre, post, interior, .. } => {
            let shape: Vec<usize> = interior.iter().map(|(_, b)| b.len()).collect();
            let total: usize = shape.iter().product();
            (0..total)
                .map(|mut k| {
                    let mut sel = vec![0; shape.len()];
                    for (slot, &n) in shape.iter().enumerate().rev() {
                        sel[slot] = k % n;
                        k /= n;
                    }
                    chain_history(pre, post, interior, &sel)
                })
                .collect()
        }
        _ => return None,
    };
    histories.iter().map(|h| delta_psi_diagnostic(sched, h).ok()).collect()
}
