//! Experiment drivers reproducing the downdating studies: declarative
//! configs, per-step metric streams, condition traces and golden scalars.

pub mod orders;
pub mod setups;

pub use orders::{balanced_circle_order, equidistant_downdate_order};

use crate::error::{Error, Result};
use crate::iep::{solve_hiep, HiepSolution, HpiepSolution, InnerProductSpec};
use crate::linalg::{Pole, EPS};
use crate::lsq::{
    evaluate_model, lsq_fit, slide_window, SlidePlan, WindowMethod, WindowSolution, WindowState,
};
use crate::metrics::{
    err_sup_approx, report_hiep, report_hpiep, tridiagonality_defect, unitarity_defect,
    MetricReport,
};
use crate::poly::{downdate_with, ConditionRecord, DowndateRequest, PolyMethod, RefinementConfig};
use crate::rational::{downdate_pencil, LeftVectorSource, PencilDowndateRequest, PencilMethod};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use setups::*;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    UnitCirclePoly,
    Chebyshev,
    Equidistant,
    UnitCircleRational,
    RealLineWindow,
    SlidingLsq,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::UnitCirclePoly,
        ExperimentKind::Chebyshev,
        ExperimentKind::Equidistant,
        ExperimentKind::UnitCircleRational,
        ExperimentKind::RealLineWindow,
        ExperimentKind::SlidingLsq,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::UnitCirclePoly => "unit_circle_poly",
            ExperimentKind::Chebyshev => "chebyshev",
            ExperimentKind::Equidistant => "equidistant",
            ExperimentKind::UnitCircleRational => "unit_circle_rational",
            ExperimentKind::RealLineWindow => "real_line_window",
            ExperimentKind::SlidingLsq => "sliding_lsq",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::ConfigInvalid(format!("unknown experiment '{s}'")))
    }

    fn is_pencil(&self) -> bool {
        matches!(
            self,
            ExperimentKind::UnitCircleRational | ExperimentKind::RealLineWindow
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderKind {
    Balanced,
    Unbalanced,
    PaperSequence,
}

/// Downdating method names accepted in configs. `implicit` is the RQZ method
/// for pencils; `implicit1` is accepted there as a synonym.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodName {
    Explicit1,
    Implicit1,
    Implicit2,
    Eigenvector,
    Implicit,
}

impl MethodName {
    fn poly(self) -> Result<PolyMethod> {
        match self {
            MethodName::Explicit1 => Ok(PolyMethod::Explicit1),
            MethodName::Implicit1 | MethodName::Implicit => Ok(PolyMethod::Implicit1),
            MethodName::Implicit2 => Ok(PolyMethod::Implicit2),
            MethodName::Eigenvector => Ok(PolyMethod::Eigenvector),
        }
    }

    fn pencil(self) -> Result<PencilMethod> {
        match self {
            MethodName::Implicit | MethodName::Implicit1 => Ok(PencilMethod::Implicit),
            MethodName::Eigenvector => Ok(PencilMethod::Eigenvector),
            other => Err(Error::ConfigInvalid(format!(
                "{other:?} is not available for pencils"
            ))),
        }
    }
}

/// Declarative description of one experiment. Unset fields take the values
/// used for the corresponding study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub order: Option<OrderKind>,
    #[serde(default)]
    pub methods: Vec<MethodName>,
    #[serde(default)]
    pub n_ir: Option<usize>,
    #[serde(default)]
    pub b: Option<usize>,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub ell: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Number of downdates; defaults to half the nodes (100 for the rational circle).
    #[serde(default)]
    pub steps: Option<usize>,
    /// Interval `[a, b]` of the real-line window.
    #[serde(default)]
    pub interval: Option<[f64; 2]>,
    /// Metrics are evaluated every `metric_stride` steps and at the last one.
    #[serde(default)]
    pub metric_stride: Option<usize>,
    #[serde(default)]
    pub degree_poly: Option<usize>,
    #[serde(default)]
    pub degree_rational: Option<usize>,
    /// Vector reduced by the left cores of the pencil eigenvector method.
    #[serde(default)]
    pub left_vector: Option<LeftVectorSource>,
    /// Output directory used when the CLI gets no `--out`.
    #[serde(default)]
    pub output: Option<String>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment,
            m: None,
            order: None,
            methods: vec![],
            n_ir: None,
            b: None,
            delta: None,
            alpha: None,
            ell: None,
            seed: 0,
            steps: None,
            interval: None,
            metric_stride: None,
            degree_poly: None,
            degree_rational: None,
            left_vector: None,
            output: None,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(s).map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        cfg.resolved()?;
        Ok(cfg)
    }

    /// Copy with every default filled in, validated.
    pub fn resolved(&self) -> Result<ExperimentConfig> {
        use ExperimentKind::*;
        let mut c = self.clone();
        let kind = c.experiment;
        c.m.get_or_insert(match kind {
            UnitCirclePoly | Chebyshev => 500,
            Equidistant => 250,
            UnitCircleRational | RealLineWindow | SlidingLsq => 201,
        });
        c.order.get_or_insert(match kind {
            Equidistant => OrderKind::PaperSequence,
            _ => OrderKind::Balanced,
        });
        if c.methods.is_empty() {
            c.methods = match kind {
                UnitCirclePoly | Chebyshev | Equidistant => vec![
                    MethodName::Explicit1,
                    MethodName::Implicit1,
                    MethodName::Implicit2,
                    MethodName::Eigenvector,
                ],
                UnitCircleRational | RealLineWindow => {
                    vec![MethodName::Implicit, MethodName::Eigenvector]
                }
                SlidingLsq => vec![MethodName::Eigenvector, MethodName::Implicit],
            };
        }
        c.n_ir
            .get_or_insert(if kind == Equidistant { 10 } else { 1 });
        c.b.get_or_insert(if kind == Equidistant { 5 } else { 1 });
        c.delta.get_or_insert(0.1);
        c.alpha.get_or_insert(1.0);
        c.ell.get_or_insert(100);
        c.interval.get_or_insert([0.0, 2.0 * std::f64::consts::PI]);
        c.metric_stride.get_or_insert(1);
        c.degree_poly.get_or_insert(65);
        c.degree_rational.get_or_insert(25);
        c.left_vector.get_or_insert_default();
        let m = c.m.unwrap();
        c.steps.get_or_insert(if kind == UnitCircleRational {
            100.min(m / 2)
        } else {
            m / 2
        });

        if m < 2 {
            return Err(Error::ConfigInvalid("m must be at least 2".into()));
        }
        if c.steps.unwrap() >= m {
            return Err(Error::ConfigInvalid("steps must be smaller than m".into()));
        }
        let delta = c.delta.unwrap();
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::ConfigInvalid(format!(
                "delta must lie in (0, 1), got {delta}"
            )));
        }
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // rejects NaN too
        if !(c.alpha.unwrap() > 0.0) {
            return Err(Error::ConfigInvalid("alpha must be positive".into()));
        }
        let [a, b] = c.interval.unwrap();
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(b > a) {
            return Err(Error::ConfigInvalid("interval must satisfy a < b".into()));
        }
        if c.metric_stride.unwrap() == 0 {
            return Err(Error::ConfigInvalid(
                "metric_stride must be positive".into(),
            ));
        }
        RefinementConfig {
            n_ir: c.n_ir.unwrap(),
            batch: c.b.unwrap(),
        }
        .validate()?;
        if kind == SlidingLsq {
            if c.methods.len() != 2 {
                return Err(Error::ConfigInvalid(
                    "sliding_lsq takes two methods: polynomial then pencil".into(),
                ));
            }
            c.methods[0].poly()?;
            c.methods[1].pencil()?;
            if c.degree_poly.unwrap() > m || c.degree_rational.unwrap() > m {
                return Err(Error::DegreeTooLarge {
                    n: c.degree_poly.unwrap().max(c.degree_rational.unwrap()),
                    m,
                });
            }
        } else if kind.is_pencil() {
            for meth in &c.methods {
                meth.pencil()?;
            }
        }
        Ok(c)
    }

    fn refinement(&self) -> RefinementConfig {
        RefinementConfig {
            n_ir: self.n_ir.unwrap_or(1),
            batch: self.b.unwrap_or(1),
        }
    }
}

/// Left- and right-hand sides of the eigenvector tests at one step; pencil
/// runs carry the left record first, then the right one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionTrace {
    pub k: usize,
    pub records: Vec<ConditionRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BreakdownEvent {
    pub step: usize,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GoldenValues {
    /// `‖H̃ᴴH̃ − I‖₂` of the final recurrence matrix.
    pub unitarity: Option<f64>,
    /// `‖·‖₂` of the final matrix strictly above the first superdiagonal.
    pub tridiagonality: Option<f64>,
    pub final_max_error: f64,
    pub final_err_f: Option<f64>,
}

/// Outcome of one (experiment, method) cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub label: String,
    pub pencil: bool,
    pub approx: bool,
    pub steps_completed: usize,
    pub reports: Vec<MetricReport>,
    pub conditions: Vec<ConditionTrace>,
    pub breakdown: Option<BreakdownEvent>,
    pub golden: GoldenValues,
    pub wall_time_s: f64,
}

impl CellResult {
    fn new(label: &str, pencil: bool, approx: bool) -> Self {
        CellResult {
            label: label.to_string(),
            pencil,
            approx,
            steps_completed: 0,
            reports: vec![],
            conditions: vec![],
            breakdown: None,
            golden: GoldenValues::default(),
            wall_time_s: 0.0,
        }
    }

    pub fn metrics_csv(&self) -> String {
        let mut s = MetricReport::csv_header(self.pencil, self.approx);
        s.push('\n');
        for r in &self.reports {
            s.push_str(&r.csv_row(self.pencil, self.approx));
            s.push('\n');
        }
        s
    }

    pub fn conditions_csv(&self) -> Option<String> {
        if self.conditions.is_empty() {
            return None;
        }
        let sides: &[&str] = if self.pencil {
            &["left_", "right_"]
        } else {
            &[""]
        };
        let mut s = String::from("k");
        for p in sides {
            s.push_str(&format!(
                ",{p}residual,{p}residual_bound,{p}trailing,{p}trailing_bound,{p}rounds"
            ));
        }
        s.push('\n');
        for t in &self.conditions {
            s.push_str(&t.k.to_string());
            for r in &t.records {
                s.push_str(&format!(
                    ",{:.6e},{:.6e},{:.6e},{:.6e},{}",
                    r.residual, r.residual_bound, r.trailing, r.trailing_bound, r.refinement_rounds
                ));
            }
            s.push('\n');
        }
        Some(s)
    }

    fn finish_timer(&mut self, t: Instant) {
        self.wall_time_s = t.elapsed().as_secs_f64();
    }

    fn fail(&mut self, step: usize, e: &Error) {
        self.breakdown = Some(BreakdownEvent {
            step,
            message: e.to_string(),
        });
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub label: String,
    pub steps_completed: usize,
    pub breakdown: Option<BreakdownEvent>,
    pub golden: GoldenValues,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    pub version: String,
    pub eps_mach: f64,
    pub wall_time_s: f64,
    pub clean: bool,
    pub cells: Vec<CellSummary>,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub cells: Vec<CellResult>,
    pub manifest: RunManifest,
}

impl RunOutput {
    pub fn cell(&self, label: &str) -> Option<&CellResult> {
        self.cells.iter().find(|c| c.label == label)
    }
}

fn should_report(k: usize, last: usize, stride: usize) -> bool {
    k.is_multiple_of(stride) || k == last
}

/// Runs every method cell of the experiment. Cells run on separate threads;
/// each cell is sequential and deterministic.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let cfg = cfg.resolved()?;
    let start = Instant::now();
    let cells: Vec<CellResult> = match cfg.experiment {
        ExperimentKind::SlidingLsq => {
            let (pm, rm) = (cfg.methods[0].poly()?, cfg.methods[1].pencil()?);
            let c = &cfg;
            std::thread::scope(|s| {
                let a = s.spawn(move || sliding_lsq_poly(c, pm));
                let b = s.spawn(move || sliding_lsq_rational(c, rm));
                vec![
                    a.join().expect("cell thread"),
                    b.join().expect("cell thread"),
                ]
            })
        }
        _ => {
            let c = &cfg;
            std::thread::scope(|s| {
                let handles: Vec<_> = cfg
                    .methods
                    .iter()
                    .map(|&meth| s.spawn(move || run_cell(c, meth)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("cell thread"))
                    .collect::<Result<Vec<_>>>()
            })?
        }
    };
    let manifest = RunManifest {
        config: cfg.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        eps_mach: EPS,
        wall_time_s: start.elapsed().as_secs_f64(),
        clean: cells.iter().all(|c| c.breakdown.is_none()),
        cells: cells
            .iter()
            .map(|c| CellSummary {
                label: c.label.clone(),
                steps_completed: c.steps_completed,
                breakdown: c.breakdown.clone(),
                golden: c.golden.clone(),
                wall_time_s: c.wall_time_s,
            })
            .collect(),
    };
    Ok(RunOutput { cells, manifest })
}

fn run_cell(cfg: &ExperimentConfig, method: MethodName) -> Result<CellResult> {
    use ExperimentKind::*;
    match cfg.experiment {
        UnitCirclePoly | Chebyshev | Equidistant => {
            let (nodes, weights, order) = poly_setup(cfg)?;
            Ok(poly_downdate_cell(
                cfg,
                nodes,
                weights,
                &order,
                method.poly()?,
            ))
        }
        UnitCircleRational => Ok(rational_circle_cell(cfg, method.pencil()?)),
        RealLineWindow => Ok(real_line_cell(cfg, method.pencil()?)),
        SlidingLsq => Err(Error::ConfigInvalid("sliding_lsq has its own cells".into())),
    }
}

/// Nodes, weights and the zero-based removal order of a polynomial study.
pub fn poly_setup(cfg: &ExperimentConfig) -> Result<(Vec<C64>, Vec<C64>, Vec<usize>)> {
    let cfg = cfg.resolved()?;
    let m = cfg.m.unwrap();
    let steps = cfg.steps.unwrap();
    let order = cfg.order.unwrap();
    let sequential: Vec<usize> = (0..steps).collect();
    let reverse_balanced = |m: usize| -> Vec<usize> {
        balanced_circle_order(m)
            .into_iter()
            .rev()
            .take(steps)
            .collect()
    };
    Ok(match cfg.experiment {
        ExperimentKind::UnitCirclePoly => {
            // nodes are stored in balanced order, so the reverse order is m−1, m−2, …
            let removal = match order {
                OrderKind::Unbalanced => balanced_positions_sequential(m, steps),
                _ => (0..steps).map(|i| m - 1 - i).collect(),
            };
            (
                unit_circle_balanced(m),
                uniform_weights(m, 1.0 / (m as f64).sqrt()),
                removal,
            )
        }
        ExperimentKind::Chebyshev => {
            let removal = match order {
                OrderKind::Unbalanced => sequential,
                _ => reverse_balanced(m),
            };
            (chebyshev_nodes(m), uniform_weights(m, 1.0), removal)
        }
        ExperimentKind::Equidistant => {
            let removal = match order {
                OrderKind::PaperSequence => equidistant_downdate_order(m)
                    .into_iter()
                    .take(steps)
                    .map(|i| i - 1)
                    .collect(),
                OrderKind::Unbalanced => sequential,
                OrderKind::Balanced => reverse_balanced(m),
            };
            (
                equidistant_unit_interval(m),
                uniform_weights(m, 1.0 / (m as f64).sqrt()),
                removal,
            )
        }
        _ => return Err(Error::ConfigInvalid("not a polynomial experiment".into())),
    })
}

/// Positions, within the balanced listing, of the angles 0, 1, 2, … in
/// angular order: consecutive neighbours on the circle.
fn balanced_positions_sequential(m: usize, steps: usize) -> Vec<usize> {
    let order = balanced_circle_order(m);
    let mut pos = vec![0; m];
    for (p, &o) in order.iter().enumerate() {
        pos[o] = p;
    }
    pos.into_iter().take(steps).collect()
}

fn poly_golden(cell: &mut CellResult, sol: &HiepSolution) {
    cell.golden.unitarity = Some(unitarity_defect(&sol.h));
    cell.golden.tridiagonality = Some(tridiagonality_defect(&sol.h));
    cell.golden.final_max_error = cell.reports.last().map(|r| r.max_error()).unwrap_or(0.0);
}

fn push_report(cell: &mut CellResult, r: Result<MetricReport>, step: usize) -> bool {
    match r {
        Ok(r) => {
            cell.reports.push(r);
            true
        }
        Err(e) => {
            cell.fail(step, &e);
            false
        }
    }
}

/// Downdates the nodes `initial[order[0]], initial[order[1]], …` one at a time.
pub fn poly_downdate_cell(
    cfg: &ExperimentConfig,
    nodes: Vec<C64>,
    weights: Vec<C64>,
    order: &[usize],
    method: PolyMethod,
) -> CellResult {
    let t = Instant::now();
    let stride = cfg.metric_stride.unwrap_or(1);
    let refinement = cfg.refinement();
    let mut cell = CellResult::new(method.name(), false, false);
    let spec = match InnerProductSpec::new(nodes.clone(), weights) {
        Ok(s) => s,
        Err(e) => {
            cell.fail(0, &e);
            return cell;
        }
    };
    let mut sol = match solve_hiep(&spec) {
        Ok(s) => s,
        Err(e) => {
            cell.fail(0, &e);
            return cell;
        }
    };
    if !push_report(&mut cell, report_hiep(0, &sol), 0) {
        return cell;
    }
    let last = order.len();
    for (i, &idx) in order.iter().enumerate() {
        let k = i + 1;
        let z = nodes[idx];
        let j = match sol.nodes.iter().position(|x| *x == z) {
            Some(j) => j,
            None => {
                cell.fail(
                    k,
                    &Error::IndexOutOfRange {
                        index: idx,
                        dim: sol.dim(),
                    },
                );
                break;
            }
        };
        let req = DowndateRequest::new(z).with_refinement(refinement.n_ir, refinement.batch);
        match downdate_with(method, &sol.h, sol.weights[j], &req) {
            Ok(out) => {
                if let Some(c) = out.conditions {
                    cell.conditions.push(ConditionTrace {
                        k,
                        records: vec![c],
                    });
                }
                sol = sol.apply_downdate(j, &out);
                cell.steps_completed = k;
                if should_report(k, last, stride)
                    && !push_report(&mut cell, report_hiep(k, &sol), k)
                {
                    break;
                }
            }
            Err(e) => {
                cell.fail(k, &e);
                break;
            }
        }
    }
    if cell.breakdown.is_some() && cell.reports.last().map(|r| r.k) != Some(cell.steps_completed) {
        // partial results end at the last completed step
        if let Ok(r) = report_hiep(cell.steps_completed, &sol) {
            cell.reports.push(r);
        }
    }
    poly_golden(&mut cell, &sol);
    cell.finish_timer(t);
    cell
}

/// Builds a pencil solution by successive updates: node `i` enters with pole
/// `poles[i − 1]`.
pub fn build_by_updating(nodes: &[C64], weights: &[C64], poles: &[Pole]) -> Result<HpiepSolution> {
    if poles.len() + 1 != nodes.len() {
        return Err(Error::ConfigInvalid(
            "need one pole fewer than nodes".into(),
        ));
    }
    let mut sol = HpiepSolution::empty();
    for (i, (z, w)) in nodes.iter().zip(weights).enumerate() {
        let xi = if i == 0 { Pole::Infinite } else { poles[i - 1] };
        sol = sol.update_node(*z, *w, xi)?;
    }
    Ok(sol)
}

fn pencil_golden(cell: &mut CellResult) {
    cell.golden.final_max_error = cell.reports.last().map(|r| r.max_error()).unwrap_or(0.0);
}

fn pencil_conditions(
    cell: &mut CellResult,
    k: usize,
    c: Option<crate::rational::PencilConditions>,
) {
    if let Some(c) = c {
        cell.conditions.push(ConditionTrace {
            k,
            records: vec![c.left, c.right],
        });
    }
}

fn rational_circle_cell(cfg: &ExperimentConfig, method: PencilMethod) -> CellResult {
    let t = Instant::now();
    let m = cfg.m.unwrap();
    let stride = cfg.metric_stride.unwrap();
    let steps = cfg.steps.unwrap();
    let mut cell = CellResult::new(method.name(), true, false);
    let nodes = unit_circle_balanced(m);
    let weights = uniform_weights(m, 1.0 / (m as f64).sqrt());
    let poles = circle_pole_pairs(m, cfg.delta.unwrap());
    let mut sol = match build_by_updating(&nodes, &weights, &poles) {
        Ok(s) => s,
        Err(e) => {
            cell.fail(0, &e);
            return cell;
        }
    };
    if !push_report(&mut cell, report_hpiep(0, &sol), 0) {
        return cell;
    }
    for k in 1..=steps {
        // reverse order of addition: last node together with the last pole
        let j = sol.nodes.len() - 1;
        let mut req = PencilDowndateRequest::new(sol.nodes[j], sol.dim() - 2, method);
        req.refinement = cfg.refinement();
        req.left_vector = cfg.left_vector.unwrap_or_default();
        match downdate_pencil(&sol.pencil, &sol.poles, sol.weights[j], &req) {
            Ok(out) => {
                pencil_conditions(&mut cell, k, out.conditions);
                sol = sol.apply_downdate(j, &out);
                cell.steps_completed = k;
                if should_report(k, steps, stride)
                    && !push_report(&mut cell, report_hpiep(k, &sol), k)
                {
                    break;
                }
            }
            Err(e) => {
                cell.fail(k, &e);
                break;
            }
        }
    }
    pencil_golden(&mut cell);
    cell.finish_timer(t);
    cell
}

fn real_line_cell(cfg: &ExperimentConfig, method: PencilMethod) -> CellResult {
    let t = Instant::now();
    let m = cfg.m.unwrap();
    let stride = cfg.metric_stride.unwrap();
    let ell = cfg.ell.unwrap();
    let delta = cfg.delta.unwrap();
    let [a, b] = cfg.interval.unwrap();
    let mut cell = CellResult::new(method.name(), true, false);
    let (grid, dx) = real_grid(a, b, m);
    let nodes: Vec<C64> = grid.iter().map(|&x| C64::new(x, 0.0)).collect();
    let w = 1.0 / (m as f64).sqrt();
    let weights = uniform_weights(m, w);
    let poles: Vec<Pole> = (1..m).map(|j| window_pole(a, dx, delta, j)).collect();
    let sol = match build_by_updating(&nodes, &weights, &poles) {
        Ok(s) => s,
        Err(e) => {
            cell.fail(0, &e);
            return cell;
        }
    };
    if !push_report(&mut cell, report_hpiep(0, &sol), 0) {
        return cell;
    }
    let mut state = WindowState::new(WindowSolution::Rational(sol), vec![C64::new(0.0, 0.0); m])
        .expect("consistent state");
    for k in 1..=ell {
        // one-based indices of the incoming nodes and poles
        let (n1, p1) = (m + 2 * k - 1, m + 2 * k - 2);
        let plan = SlidePlan {
            drop_count: 2,
            drop_pole_positions: vec![0, 0],
            new_nodes: (0..2)
                .map(|i| C64::new(a + (n1 - 1 + i) as f64 * dx, 0.0))
                .collect(),
            new_weights: vec![C64::new(w, 0.0); 2],
            new_values: vec![C64::new(0.0, 0.0); 2],
            new_poles: (0..2)
                .map(|i| (window_pole(a, dx, delta, p1 + i), None))
                .collect(),
        };
        match slide_window(
            &state,
            &plan,
            WindowMethod::Pencil(method),
            cfg.refinement(),
            cfg.left_vector.unwrap_or_default(),
        ) {
            Ok(next) => {
                state = next;
                cell.steps_completed = k;
                if should_report(k, ell, stride) {
                    let WindowSolution::Rational(s) = &state.solution else {
                        unreachable!()
                    };
                    if !push_report(&mut cell, report_hpiep(k, s), k) {
                        break;
                    }
                }
            }
            Err(e) => {
                cell.fail(k, &e);
                break;
            }
        }
    }
    pencil_golden(&mut cell);
    cell.finish_timer(t);
    cell
}

struct LsqWindow {
    a: f64,
    dx: f64,
    m: usize,
}

impl LsqWindow {
    fn new(cfg: &ExperimentConfig) -> Self {
        let m = cfg.m.unwrap();
        let b = cfg.alpha.unwrap() * std::f64::consts::PI;
        let (_, dx) = real_grid(0.0, b, m);
        LsqWindow { a: 0.0, dx, m }
    }

    /// Zero-based global node index to abscissa.
    fn x(&self, i: usize) -> f64 {
        self.a + i as f64 * self.dx
    }

    fn initial(&self) -> (Vec<C64>, Vec<C64>, Vec<C64>) {
        let xs: Vec<f64> = (0..self.m).map(|i| self.x(i)).collect();
        (
            xs.iter().map(|&x| C64::new(x, 0.0)).collect(),
            uniform_weights(self.m, 1.0),
            xs.iter().map(|&x| test_function(x)).collect(),
        )
    }

    /// Nodes entering at slide `k` (one-based).
    fn incoming(&self, k: usize) -> Vec<f64> {
        (0..2).map(|i| self.x(self.m + 2 * (k - 1) + i)).collect()
    }

    fn interval(&self, k: usize) -> (f64, f64) {
        (self.x(2 * k), self.x(2 * k + self.m - 1))
    }
}

fn err_f_for(model: &crate::lsq::ApproximantModel, interval: (f64, f64), m: usize) -> Result<f64> {
    err_sup_approx(
        test_function,
        |x| evaluate_model(model, C64::new(x, 0.0)),
        interval,
        m,
    )
}

fn sliding_lsq_poly(cfg: &ExperimentConfig, method: PolyMethod) -> CellResult {
    let t = Instant::now();
    let n = cfg.degree_poly.unwrap();
    let stride = cfg.metric_stride.unwrap();
    let ell = cfg.ell.unwrap();
    let win = LsqWindow::new(cfg);
    let m = win.m;
    let mut cell = CellResult::new(&format!("poly_{}", method.name()), false, true);
    let (nodes, weights, f) = win.initial();
    let sol = match InnerProductSpec::new(nodes, weights).and_then(|s| solve_hiep(&s)) {
        Ok(s) => s,
        Err(e) => {
            cell.fail(0, &e);
            return cell;
        }
    };
    let report = |k: usize, s: &HiepSolution, values: &[C64]| -> Result<MetricReport> {
        let mut r = report_hiep(k, s)?;
        let model = lsq_fit(s, values, n)?;
        r.err_f = Some(err_f_for(&model, win.interval(k), m)?);
        Ok(r)
    };
    if !push_report(&mut cell, report(0, &sol, &f), 0) {
        return cell;
    }
    let mut state = WindowState::new(WindowSolution::Poly(sol), f).expect("consistent state");
    for k in 1..=ell {
        let xs = win.incoming(k);
        let plan = SlidePlan {
            drop_count: 2,
            drop_pole_positions: vec![],
            new_nodes: xs.iter().map(|&x| C64::new(x, 0.0)).collect(),
            new_weights: uniform_weights(2, 1.0),
            new_values: xs.iter().map(|&x| test_function(x)).collect(),
            new_poles: vec![],
        };
        match slide_window(
            &state,
            &plan,
            WindowMethod::Poly(method),
            cfg.refinement(),
            cfg.left_vector.unwrap_or_default(),
        ) {
            Ok(next) => {
                state = next;
                cell.steps_completed = k;
                if should_report(k, ell, stride) {
                    let WindowSolution::Poly(s) = &state.solution else {
                        unreachable!()
                    };
                    if !push_report(&mut cell, report(k, s, &state.values), k) {
                        break;
                    }
                }
            }
            Err(e) => {
                cell.fail(k, &e);
                break;
            }
        }
    }
    cell.golden.final_max_error = cell.reports.last().map(|r| r.max_error()).unwrap_or(0.0);
    cell.golden.final_err_f = cell.reports.last().and_then(|r| r.err_f);
    cell.finish_timer(t);
    cell
}

fn sliding_lsq_rational(cfg: &ExperimentConfig, method: PencilMethod) -> CellResult {
    let t = Instant::now();
    let n = cfg.degree_rational.unwrap();
    let stride = cfg.metric_stride.unwrap();
    let ell = cfg.ell.unwrap();
    let win = LsqWindow::new(cfg);
    let m = win.m;
    let mut cell = CellResult::new(&format!("rational_{}", method.name()), true, true);
    let (nodes, weights, f) = win.initial();
    let (poles, mut next_pair) = lsq_poles(cfg.alpha.unwrap(), n, m - 1);
    let finite = poles.iter().filter(|p| !p.is_infinite()).count();
    let sol = match build_by_updating(&nodes, &weights, &poles) {
        Ok(s) => s,
        Err(e) => {
            cell.fail(0, &e);
            return cell;
        }
    };
    let report = |k: usize, s: &HpiepSolution, values: &[C64]| -> Result<MetricReport> {
        let mut r = report_hpiep(k, s)?;
        let model = lsq_fit(s, values, n)?;
        r.err_f = Some(err_f_for(&model, win.interval(k), m)?);
        Ok(r)
    };
    if !push_report(&mut cell, report(0, &sol, &f), 0) {
        return cell;
    }
    let mut state = WindowState::new(WindowSolution::Rational(sol), f).expect("consistent state");
    for k in 1..=ell {
        let xs = win.incoming(k);
        // a singularity leaves the window when its real part drops below the
        // first node that survives this slide
        let (lo, hi) = (win.x(2 * (k - 1)), win.x(2 * k));
        let slack = 1e-9 * hi.abs().max(1.0);
        let WindowSolution::Rational(cur) = &state.solution else {
            unreachable!()
        };
        let passes = cur.poles.iter().any(|p| match p {
            Pole::Finite(x) => x.re >= lo - slack && x.re < hi - slack,
            Pole::Infinite => false,
        });
        let (drop_pole_positions, new_poles) = if passes && finite >= 2 {
            // the leftmost pair leaves, the next pair on the right enters the finite block
            next_pair += 1;
            let pair = singularity_pair(next_pair);
            (
                vec![0, 0],
                vec![
                    (Pole::Finite(pair[0]), Some(finite - 2)),
                    (Pole::Finite(pair[1]), Some(finite - 1)),
                ],
            )
        } else {
            (
                vec![m - 2, m - 3],
                vec![(Pole::Infinite, None), (Pole::Infinite, None)],
            )
        };
        let plan = SlidePlan {
            drop_count: 2,
            drop_pole_positions,
            new_nodes: xs.iter().map(|&x| C64::new(x, 0.0)).collect(),
            new_weights: uniform_weights(2, 1.0),
            new_values: xs.iter().map(|&x| test_function(x)).collect(),
            new_poles,
        };
        match slide_window(
            &state,
            &plan,
            WindowMethod::Pencil(method),
            cfg.refinement(),
            cfg.left_vector.unwrap_or_default(),
        ) {
            Ok(next) => {
                state = next;
                cell.steps_completed = k;
                if should_report(k, ell, stride) {
                    let WindowSolution::Rational(s) = &state.solution else {
                        unreachable!()
                    };
                    if !push_report(&mut cell, report(k, s, &state.values), k) {
                        break;
                    }
                }
            }
            Err(e) => {
                cell.fail(k, &e);
                break;
            }
        }
    }
    cell.golden.final_max_error = cell.reports.last().map(|r| r.max_error()).unwrap_or(0.0);
    cell.golden.final_err_f = cell.reports.last().and_then(|r| r.err_f);
    cell.finish_timer(t);
    cell
}

fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(tmp, path)
}

/// Writes `<experiment>_<cell>_metrics.csv`, the condition traces and
/// `<experiment>_manifest.json` into `dir`. Returns the written paths.
pub fn write_outputs(out: &RunOutput, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let name = out.manifest.config.experiment.name();
    let mut written = vec![];
    for cell in &out.cells {
        let p = dir.join(format!("{name}_{}_metrics.csv", cell.label));
        write_atomic(&p, &cell.metrics_csv())?;
        written.push(p);
        if let Some(c) = cell.conditions_csv() {
            let p = dir.join(format!("{name}_{}_conditions.csv", cell.label));
            write_atomic(&p, &c)?;
            written.push(p);
        }
    }
    let p = dir.join(format!("{name}_manifest.json"));
    let json = serde_json::to_string_pretty(&out.manifest).map_err(std::io::Error::other)?;
    write_atomic(&p, &json)?;
    written.push(p);
    Ok(written)
}
