//! Integration of the Hamiltonian flow and Poincaré sections on P_B = 0, Ṗ_B > 0.

pub mod dop853;
pub mod emit;
mod tableau;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::model::{hamiltonian_unchecked, vector_field_unchecked, ModelState};
use dop853::{single_step, DenseStep, Dop853, StepControl, StepError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("infeasible initial condition: {0}")]
    Infeasible(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub tmax: f64,
    pub h_max: f64,
    pub escape_radius: f64,
    /// Breakdown floor on B, where the Hamiltonian is singular.
    pub b_floor: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rtol: 1e-10,
            atol: 1e-12,
            tmax: 1000.0,
            h_max: f64::INFINITY,
            escape_radius: 20.0,
            b_floor: 1e-8,
            max_steps: 50_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self, state0: &ModelState) -> Result<(), DynamicsError> {
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(DynamicsError::Config("tolerances must be positive".into()));
        }
        if !(self.tmax >= 0.0) || !(self.h_max > 0.0) {
            return Err(DynamicsError::Config("tmax must be nonnegative and h_max positive".into()));
        }
        if !(self.escape_radius > state0.max_norm()) {
            return Err(DynamicsError::Config("escape radius must exceed the initial-state norm".into()));
        }
        if !(state0.b > self.b_floor) {
            return Err(DynamicsError::Config("B must start above the breakdown floor".into()));
        }
        Ok(())
    }

    fn step_control(&self) -> StepControl {
        StepControl { rtol: self.rtol, atol: self.atol, h_max: self.h_max, max_steps: self.max_steps }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FateKind {
    RanToTmax,
    Escaped,
    Breakdown,
}

impl FateKind {
    pub fn label(&self) -> &'static str {
        match self {
            FateKind::RanToTmax => "tmax",
            FateKind::Escaped => "escaped",
            FateKind::Breakdown => "breakdown",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitFate {
    pub kind: FateKind,
    pub t: f64,
    pub detail: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SectionRecord {
    pub ic_index: usize,
    pub crossing_index: usize,
    pub t: f64,
    pub a: f64,
    pub pa: f64,
    pub b: f64,
    /// P_B and Ṗ_B re-evaluated at the recorded state.
    pub pb: f64,
    pub pb_dot: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct OrbitSummary {
    pub steps: usize,
    pub evaluations: usize,
    pub max_energy_drift: f64,
    /// Sign changes excluded as tangential or not refinable to the tolerance.
    pub ambiguous_crossings: usize,
}

/// Accepted steps with their dense polynomials.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub lambda: f64,
    pub start: ModelState,
    pub steps: Vec<DenseStep<4>>,
    pub fate: OrbitFate,
    pub summary: OrbitSummary,
}

impl Trajectory {
    pub fn t_end(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.t_new())
    }

    /// Dense state at time t.
    pub fn state_at(&self, t: f64) -> Option<ModelState> {
        let idx = self.steps.partition_point(|s| s.t_new() < t);
        let s = self.steps.get(idx)?;
        (t >= s.t_old).then(|| ModelState::from_array(s.eval(t)))
    }
}

/// Per-step data handed to observers.
pub struct StepView<'a> {
    pub t_old: f64,
    pub y_old: [f64; 4],
    pub t_new: f64,
    pub y_new: [f64; 4],
    dense: &'a mut dyn FnMut() -> DenseStep<4>,
}

impl StepView<'_> {
    pub fn dense(&mut self) -> DenseStep<4> {
        (self.dense)()
    }
}

/// Integrates from `state0`, calling `observe` after every accepted step.
pub fn integrate_with(
    state0: &ModelState,
    lambda: f64,
    cfg: &IntegratorConfig,
    mut observe: impl FnMut(&mut StepView),
) -> Result<(OrbitFate, OrbitSummary), DynamicsError> {
    cfg.validate(state0)?;
    let f = move |_t: f64, y: &[f64; 4]| vector_field_unchecked(y, lambda);
    let y0 = state0.to_array();
    let h0 = hamiltonian_unchecked(&y0, lambda);
    let mut summary = OrbitSummary::default();
    if cfg.tmax == 0.0 {
        return Ok((OrbitFate { kind: FateKind::RanToTmax, t: 0.0, detail: None }, summary));
    }
    let mut solver = Dop853::new(&f, 0.0, y0, cfg.tmax, cfg.step_control());
    let fate = loop {
        if let Err(e) = solver.step(&f, cfg.tmax) {
            let detail = match e {
                StepError::StepSizeUnderflow => "step size underflow",
                StepError::MaxSteps => "step budget exhausted",
                StepError::NonFinite => "non-finite state",
            };
            break OrbitFate { kind: FateKind::Breakdown, t: solver.t(), detail: Some(detail.into()) };
        }
        let y = *solver.y();
        let t = solver.t();
        summary.steps += 1;
        summary.max_energy_drift = summary.max_energy_drift.max((hamiltonian_unchecked(&y, lambda) - h0).abs());
        {
            let (t_old, y_old) = (solver.t_old(), *solver.y_old());
            let mut dense = || solver.dense(&f);
            let mut view = StepView { t_old, y_old, t_new: t, y_new: y, dense: &mut dense };
            observe(&mut view);
        }
        if y[1] <= cfg.b_floor {
            break OrbitFate { kind: FateKind::Breakdown, t, detail: Some("B reached the floor".into()) };
        }
        if y.iter().any(|v| v.abs() > cfg.escape_radius) {
            break OrbitFate { kind: FateKind::Escaped, t, detail: None };
        }
        if t >= cfg.tmax {
            break OrbitFate { kind: FateKind::RanToTmax, t, detail: None };
        }
    };
    summary.evaluations = solver.stats.evaluations;
    Ok((fate, summary))
}

pub fn integrate_orbit(state0: &ModelState, lambda: f64, cfg: &IntegratorConfig) -> Result<Trajectory, DynamicsError> {
    let mut steps = Vec::new();
    let (fate, summary) = integrate_with(state0, lambda, cfg, |v| steps.push(v.dense()))?;
    Ok(Trajectory { lambda, start: *state0, steps, fate, summary })
}

/// Tolerance on |P_B| at a refined crossing.
pub const CROSSING_TOL: f64 = 1e-12;
/// Crossings with |Ṗ_B| below this are tangential.
pub const TANGENTIAL_TOL: f64 = 1e-10;

pub enum Crossing {
    Found { t: f64, state: [f64; 4], pb_dot: f64 },
    Ambiguous,
}

/// Refines an upward P_B crossing inside one step. The root of the dense
/// interpolant seeds a Newton iteration in t whose states come from a fresh
/// step out of the step's start, so the returned state is an integrated one.
pub fn refine_crossing(lambda: f64, t_old: f64, y_old: &[f64; 4], dense: &DenseStep<4>) -> Crossing {
    let f = move |_t: f64, y: &[f64; 4]| vector_field_unchecked(y, lambda);
    let (mut lo, mut hi) = (t_old, dense.t_new());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if dense.eval(mid)[3] < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut t = 0.5 * (lo + hi);
    let at = |t: f64| if t == t_old { *y_old } else { single_step(&f, t_old, y_old, t - t_old) };
    let mut y = at(t);
    for _ in 0..10 {
        let pb_dot = vector_field_unchecked(&y, lambda)[3];
        if pb_dot.abs() < TANGENTIAL_TOL {
            return Crossing::Ambiguous;
        }
        if y[3].abs() <= 0.01 * CROSSING_TOL {
            break;
        }
        let next = t - y[3] / pb_dot;
        if next == t {
            break;
        }
        t = next;
        y = at(t);
    }
    let pb_dot = vector_field_unchecked(&y, lambda)[3];
    if y[3].abs() > CROSSING_TOL || !(pb_dot > TANGENTIAL_TOL) {
        return Crossing::Ambiguous;
    }
    Crossing::Found { t, state: y, pb_dot }
}

fn is_upward(y_old: &[f64; 4], y_new: &[f64; 4]) -> bool {
    y_old[3] < 0.0 && y_new[3] >= 0.0
}

pub fn detect_crossings(traj: &Trajectory, ic_index: usize) -> (Vec<SectionRecord>, usize) {
    let mut out = Vec::new();
    let mut ambiguous = 0;
    for s in &traj.steps {
        let y_old = s.eval(s.t_old);
        let y_new = s.eval(s.t_new());
        if !is_upward(&y_old, &y_new) {
            continue;
        }
        push_crossing(traj.lambda, ic_index, s.t_old, &y_old, s, &mut out, &mut ambiguous);
    }
    (out, ambiguous)
}

fn push_crossing(
    lambda: f64,
    ic_index: usize,
    t_old: f64,
    y_old: &[f64; 4],
    dense: &DenseStep<4>,
    out: &mut Vec<SectionRecord>,
    ambiguous: &mut usize,
) {
    match refine_crossing(lambda, t_old, y_old, dense) {
        Crossing::Found { t, state, pb_dot } => {
            if out.last().is_some_and(|r: &SectionRecord| r.t >= t) {
                *ambiguous += 1;
                return;
            }
            out.push(SectionRecord {
                ic_index,
                crossing_index: out.len(),
                t,
                a: state[0],
                pa: state[2],
                b: state[1],
                pb: state[3],
                pb_dot,
            });
        }
        Crossing::Ambiguous => *ambiguous += 1,
    }
}

/// Integrate and collect section records without storing the trajectory.
pub fn orbit_sections(
    state0: &ModelState,
    lambda: f64,
    cfg: &IntegratorConfig,
    ic_index: usize,
) -> Result<(Vec<SectionRecord>, OrbitFate, OrbitSummary), DynamicsError> {
    let mut out = Vec::new();
    let mut ambiguous = 0;
    let (fate, mut summary) = integrate_with(state0, lambda, cfg, |v| {
        if is_upward(&v.y_old, &v.y_new) {
            let (t_old, y_old) = (v.t_old, v.y_old);
            let d = v.dense();
            push_crossing(lambda, ic_index, t_old, &y_old, &d, &mut out, &mut ambiguous);
        }
    })?;
    summary.ambiguous_crossings = ambiguous;
    Ok((out, fate, summary))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IcSolution {
    pub state: ModelState,
    /// Number of positive B solving the constraint.
    pub positive_roots: usize,
}

/// B > 0 with H(A, B, P_A, 0) = E: with u = B² the constraint reads
/// −2λA u² + (2A − E) u − (A P_A²/8 + A³/2) = 0.
pub fn solve_ic(a: f64, pa: f64, lambda: f64, energy: f64) -> Result<IcSolution, DynamicsError> {
    let qa = -2.0 * lambda * a;
    let qb = 2.0 * a - energy;
    let qc = -(a * pa * pa / 8.0 + a * a * a / 2.0);
    let mut us: Vec<f64> = Vec::new();
    if qa == 0.0 {
        if qb != 0.0 {
            us.push(-qc / qb);
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        let scale = qb * qb + (4.0 * qa * qc).abs();
        if disc.abs() <= 4.0 * f64::EPSILON * scale {
            us.push(-qb / (2.0 * qa));
            us.push(-qb / (2.0 * qa));
        } else if disc > 0.0 {
            let sq = disc.sqrt();
            let q = -0.5 * (qb + qb.signum() * sq);
            let q = if q == 0.0 { -0.5 * sq } else { q };
            us.push(q / qa);
            if q != 0.0 {
                us.push(qc / q);
            }
        }
    }
    let mut bs: Vec<f64> = us.into_iter().filter(|u| *u > 0.0 && u.is_finite()).map(f64::sqrt).collect();
    bs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let Some(&b0) = bs.first() else {
        return Err(DynamicsError::Infeasible(format!("no B > 0 with H = {energy} at A = {a}, P_A = {pa}")));
    };
    // Newton polish on H(B) − E
    let h = |b: f64| hamiltonian_unchecked(&[a, b, pa, 0.0], lambda) - energy;
    let mut b = b0;
    for _ in 0..4 {
        let r = h(b);
        if r == 0.0 {
            break;
        }
        let db = 1e-7 * b;
        let d = (h(b + db) - h(b - db)) / (2.0 * db);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let nb = b - r / d;
        if !(nb > 0.0) || h(nb).abs() >= r.abs() {
            break;
        }
        b = nb;
    }
    Ok(IcSolution { state: ModelState::new(a, b, pa, 0.0), positive_roots: bs.len() })
}

/// lo:hi:n, with n points including both ends (n = 1 gives lo).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn value(&self, i: usize) -> f64 {
        if self.n <= 1 {
            self.lo
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (self.n - 1) as f64
        }
    }

    pub fn parse(text: &str) -> Result<Axis, DynamicsError> {
        let parts: Vec<&str> = text.split(':').collect();
        let bad = || DynamicsError::Config(format!("expected lo:hi:n, got '{text}'"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo = parts[0].trim().parse::<f64>().map_err(|_| bad())?;
        let hi = parts[1].trim().parse::<f64>().map_err(|_| bad())?;
        let n = parts[2].trim().parse::<usize>().map_err(|_| bad())?;
        if !lo.is_finite() || !hi.is_finite() {
            return Err(bad());
        }
        Ok(Axis { lo, hi, n })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub a: Axis,
    pub pa: Axis,
}

impl GridSpec {
    pub fn len(&self) -> usize {
        self.a.n * self.pa.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// (A, P_A) for ic_index = i_A · n_PA + i_PA.
    pub fn point(&self, ic: usize) -> (f64, f64) {
        (self.a.value(ic / self.pa.n), self.pa.value(ic % self.pa.n))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IcOutcome {
    pub ic_index: usize,
    pub a: f64,
    pub pa: f64,
    pub b: Option<f64>,
    pub fate: Option<OrbitFate>,
    pub crossings: usize,
    pub summary: Option<OrbitSummary>,
    pub infeasible: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BatchResult {
    pub lambda: f64,
    pub energy: f64,
    pub config: IntegratorConfig,
    pub grid: GridSpec,
    pub records: Vec<SectionRecord>,
    pub outcomes: Vec<IcOutcome>,
}

impl BatchResult {
    pub fn infeasible(&self) -> impl Iterator<Item = &IcOutcome> {
        self.outcomes.iter().filter(|o| o.infeasible.is_some())
    }

    /// Fraction of feasible ICs that ran to t_max.
    pub fn bounded_fraction(&self) -> f64 {
        let feasible: Vec<_> = self.outcomes.iter().filter(|o| o.fate.is_some()).collect();
        if feasible.is_empty() {
            return 0.0;
        }
        let bounded = feasible.iter().filter(|o| o.fate.as_ref().unwrap().kind == FateKind::RanToTmax).count();
        bounded as f64 / feasible.len() as f64
    }
}

fn run_ic(ic: usize, grid: &GridSpec, lambda: f64, energy: f64, cfg: &IntegratorConfig) -> (IcOutcome, Vec<SectionRecord>) {
    let (a, pa) = grid.point(ic);
    let mut o = IcOutcome { ic_index: ic, a, pa, b: None, fate: None, crossings: 0, summary: None, infeasible: None };
    let sol = match solve_ic(a, pa, lambda, energy) {
        Ok(s) => s,
        Err(e) => {
            o.infeasible = Some(e.to_string());
            return (o, Vec::new());
        }
    };
    o.b = Some(sol.state.b);
    match orbit_sections(&sol.state, lambda, cfg, ic) {
        Ok((recs, fate, summary)) => {
            o.crossings = recs.len();
            o.fate = Some(fate);
            o.summary = Some(summary);
            (o, recs)
        }
        Err(e) => {
            o.infeasible = Some(e.to_string());
            (o, Vec::new())
        }
    }
}

/// Runs every grid IC; output order is (ic_index, crossing_index) whatever the
/// thread count.
pub fn section_batch(lambda: f64, energy: f64, grid: &GridSpec, cfg: &IntegratorConfig) -> BatchResult {
    let results: Vec<(IcOutcome, Vec<SectionRecord>)> =
        (0..grid.len()).into_par_iter().map(|ic| run_ic(ic, grid, lambda, energy, cfg)).collect();
    let mut records = Vec::new();
    let mut outcomes = Vec::with_capacity(results.len());
    for (o, r) in results {
        outcomes.push(o);
        records.extend(r);
    }
    BatchResult { lambda, energy, config: *cfg, grid: *grid, records, outcomes }
}
