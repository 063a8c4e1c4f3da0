//! Lyapunov functions, stability classification and numerical checks of the
//! boundedness conditions for damped second α-order systems.
//!
//! Everything here works in staircase time `τ`: along a solution,
//! `D^α L = ∂τ L + ∂y L · y' + ∂z L · z'` where `(y', z')` are the rates of
//! the field. Unbounded statements (limits, divergent potentials, finite
//! integrals over `[0, ∞)`) are only ever tested on finite windows, so a
//! passing report means "consistent with", not "proved".

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{param, Error, Result};
use crate::fde::{integrate_gl, solve_classical, FdeSystem, PlanarField, Scheme, Trajectory};
use crate::staircase::StaircaseTable;

pub type LyapunovValueFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
pub type LyapunovGradientFn = Arc<dyn Fn(f64, f64, f64) -> [f64; 3] + Send + Sync>;

/// Slack below zero tolerated as rounding, relative to the size of the
/// compared terms.
const ROUNDING: f64 = 1e-12;

/// Scalar function `L(τ, y, z)` with an optional analytic gradient
/// `[∂τ L, ∂y L, ∂z L]`.
#[derive(Clone)]
pub struct LyapunovFunction {
    value: LyapunovValueFn,
    gradient: Option<LyapunovGradientFn>,
}

impl fmt::Debug for LyapunovFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LyapunovFunction")
            .field("gradient", &self.gradient.is_some())
            .finish_non_exhaustive()
    }
}

impl LyapunovFunction {
    pub fn new(value: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            value: Arc::new(value),
            gradient: None,
        }
    }

    pub fn with_gradient(mut self, gradient: impl Fn(f64, f64, f64) -> [f64; 3] + Send + Sync + 'static) -> Self {
        self.gradient = Some(Arc::new(gradient));
        self
    }

    pub fn value(&self, tau: f64, y: f64, z: f64) -> f64 {
        (self.value)(tau, y, z)
    }

    pub fn has_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    /// Analytic gradient when supplied, central differences otherwise.
    pub fn gradient(&self, tau: f64, y: f64, z: f64) -> Result<[f64; 3]> {
        match &self.gradient {
            Some(g) => Ok(g(tau, y, z)),
            None => self.numerical_gradient(tau, y, z),
        }
    }

    /// Central differences with step `∛ε · max(1, |x|)` in each argument.
    pub fn numerical_gradient(&self, tau: f64, y: f64, z: f64) -> Result<[f64; 3]> {
        let x = [tau, y, z];
        let mut out = [0.0; 3];
        for i in 0..3 {
            let step = f64::EPSILON.cbrt() * x[i].abs().max(1.0);
            let (mut hi, mut lo) = (x, x);
            hi[i] += step;
            lo[i] -= step;
            let width = hi[i] - lo[i];
            if !(width > 0.0 && width.is_finite()) {
                return Err(Error::Numerical(format!(
                    "finite-difference step underflows at argument {i} = {}",
                    x[i]
                )));
            }
            out[i] = (self.value(hi[0], hi[1], hi[2]) - self.value(lo[0], lo[1], lo[2])) / width;
        }
        Ok(out)
    }

    /// Checks `L(τ, equilibrium) = 0` and `L > 0` on `rings` circles of
    /// radius up to `radius` around it (16 points each; the `y` axis only
    /// for scalar systems).
    pub fn definiteness(&self, tau: f64, equilibrium: (f64, f64), radius: f64, rings: usize, state_dim: usize) -> CheckEntry {
        let (ye, ze) = equilibrium;
        let mut worst = Worst::default();
        let at_eq = self.value(tau, ye, ze);
        worst.record("vanishes", -at_eq.abs(), 0.0, false, &[("y", ye), ("z", ze)]);
        let dirs = directions(state_dim, 16);
        for k in 1..=rings.max(1) {
            let r = radius * k as f64 / rings.max(1) as f64;
            for &(dy, dz) in &dirs {
                let (y, z) = (ye + r * dy, ze + r * dz);
                worst.record("positive", self.value(tau, y, z), 0.0, true, &[("y", y), ("z", z)]);
            }
        }
        worst.finish("positive-definite")
    }
}

/// `D^α L = ∂τ L + ∂y L · y' + ∂z L · z'` along `field`.
pub fn lyapunov_derivative<F: PlanarField + ?Sized>(
    l: &LyapunovFunction,
    field: &F,
    tau: f64,
    y: f64,
    z: f64,
) -> Result<f64> {
    let [dt, dy, dz] = l.gradient(tau, y, z)?;
    let (ry, rz) = field.rates(tau, y, z);
    Ok(dt + dy * ry + dz * rz)
}

fn directions(state_dim: usize, n: usize) -> Vec<(f64, f64)> {
    if state_dim == 1 {
        return vec![(1.0, 0.0), (-1.0, 0.0)];
    }
    (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            (theta.cos(), theta.sin())
        })
        .collect()
}

/// Result of one check: the worst signed slack of its inequalities over
/// the tested points, and where it occurred.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub condition: String,
    pub pass: bool,
    pub worst_margin: f64,
    pub witness: BTreeMap<String, Value>,
}

/// Running minimum of slacks.
#[derive(Debug)]
struct Worst {
    margin: f64,
    failed: bool,
    witness: BTreeMap<String, Value>,
    extra: BTreeMap<String, Value>,
}

impl Default for Worst {
    fn default() -> Self {
        Self {
            margin: f64::INFINITY,
            failed: false,
            witness: BTreeMap::new(),
            extra: BTreeMap::new(),
        }
    }
}

impl Worst {
    /// Records `slack` of `label`. Non-strict inequalities accept rounding
    /// of `ROUNDING · max(1, scale)`; strict ones need `slack > 0`.
    fn record(&mut self, label: &str, slack: f64, scale: f64, strict: bool, at: &[(&str, f64)]) {
        let ok = if strict {
            slack > 0.0
        } else {
            slack >= -ROUNDING * scale.abs().max(1.0)
        };
        if !ok {
            self.failed = true;
        }
        if slack < self.margin || slack.is_nan() && !self.margin.is_nan() {
            self.margin = slack;
            self.witness.clear();
            self.witness.insert("inequality".into(), Value::from(label));
            for &(k, v) in at {
                self.witness.insert(k.into(), Value::from(v));
            }
        }
    }

    fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.extra.insert(key.into(), value.into());
    }

    fn finish(mut self, condition: &str) -> CheckEntry {
        self.witness.append(&mut self.extra);
        CheckEntry {
            condition: condition.into(),
            pass: !self.failed && !self.margin.is_nan(),
            worst_margin: self.margin,
            witness: self.witness,
        }
    }
}

/// Equilibrium classification, ordered from strongest to weakest evidence
/// of stability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    ExponentiallyStable,
    AsymptoticallyStable,
    LyapunovStable,
    Inconclusive,
    UnstableEvidence,
}

impl Classification {
    pub fn is_stable(self) -> bool {
        matches!(
            self,
            Self::LyapunovStable | Self::AsymptoticallyStable | Self::ExponentiallyStable
        )
    }

    pub fn is_asymptotic(self) -> bool {
        matches!(self, Self::AsymptoticallyStable | Self::ExponentiallyStable)
    }

    pub fn is_exponential(self) -> bool {
        self == Self::ExponentiallyStable
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ExponentiallyStable => "exponentially-stable",
            Self::AsymptoticallyStable => "asymptotically-stable",
            Self::LyapunovStable => "lyapunov-stable",
            Self::Inconclusive => "inconclusive",
            Self::UnstableEvidence => "unstable-evidence",
        })
    }
}

/// Grids and tolerances of a stability sweep. `horizon` and `dtau` are in
/// staircase time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StabilityConfig {
    pub eps_grid: Vec<f64>,
    pub delta_grid: Vec<f64>,
    pub horizon: f64,
    pub dtau: f64,
    pub scheme: Scheme,
    /// Largest `|rate|` accepted at the equilibrium.
    pub equilibrium_tol: f64,
    /// A run decays when its final distance is at most this fraction of
    /// the initial one.
    pub decay_ratio: f64,
    /// Minimum coefficient of determination of the log-distance fit.
    pub min_r_squared: f64,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        Self {
            eps_grid: vec![0.1, 0.2, 0.5, 1.0],
            delta_grid: vec![0.01, 0.05, 0.1, 0.2, 0.5],
            horizon: 20.0,
            dtau: 1e-2,
            scheme: Scheme::Rk4,
            equilibrium_tol: 1e-9,
            decay_ratio: 1e-3,
            min_r_squared: 0.99,
        }
    }
}

/// One `ε`: the largest tested `δ ≤ ε` whose runs stay below `ε^α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub eps: f64,
    /// `ε^α`.
    pub bound: f64,
    pub delta: Option<f64>,
    /// Largest distance reached from the witnessing `δ` (or from the
    /// smallest tested `δ` when there is no witness).
    pub max_distance: Option<f64>,
    pub deltas_tested: usize,
}

/// Summary of one perturbed run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Run {
    pub delta: f64,
    pub y0: f64,
    pub z0: f64,
    pub initial_distance: f64,
    pub max_distance: f64,
    pub final_distance: f64,
    pub blew_up: bool,
    pub decayed: bool,
}

/// Fit of `ln |x(τ) - x_e| ≈ c - rate · τ`.
///
/// `lambda` and `kappa` are the constants of
/// `|x(τ) - x_e| ≤ κ^α |x(0) - x_e| e^{-λ α τ}`: `λ = rate / α` and `κ^α`
/// is the smallest factor making the bound hold on every fitted run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub tau_rate: f64,
    pub lambda: f64,
    pub kappa: f64,
    pub r_squared: f64,
    pub runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub classification: Classification,
    pub alpha: f64,
    pub equilibrium: [f64; 2],
    pub state_dim: usize,
    pub horizon: f64,
    pub dtau: f64,
    pub witnesses: Vec<Witness>,
    pub fit: Option<DecayFit>,
    pub runs: Vec<Run>,
    pub notes: Vec<String>,
}

fn sorted_grid(name: &str, grid: &[f64]) -> Result<Vec<f64>> {
    if grid.is_empty() || grid.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(param(format!("{name} must be non-empty with positive finite entries")));
    }
    let mut g = grid.to_vec();
    g.sort_by(f64::total_cmp);
    g.dedup();
    Ok(g)
}

fn distance(state_dim: usize, (ye, ze): (f64, f64), y: f64, z: f64) -> f64 {
    if state_dim == 1 {
        (y - ye).abs()
    } else {
        (y - ye).hypot(z - ze)
    }
}

struct RunData {
    summary: Run,
    tau: Vec<f64>,
    dist: Vec<f64>,
}

fn fit_decay(run: &RunData, horizon: f64) -> Option<(f64, f64, f64)> {
    let pts: Vec<(f64, f64)> = run
        .tau
        .iter()
        .zip(&run.dist)
        .filter(|(t, d)| **t >= 0.5 * horizon && **d > 0.0 && d.is_finite())
        .map(|(t, d)| (*t, d.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r2 = 1.0 - ss_res / syy;
    let rate = -slope;
    let d0 = run.summary.initial_distance;
    let kappa_alpha = run
        .tau
        .iter()
        .zip(&run.dist)
        .map(|(t, d)| d / (d0 * (-rate * t).exp()))
        .fold(0.0, f64::max);
    Some((rate, r2, kappa_alpha))
}

/// Classifies the equilibrium `(y_e, z_e)` of an autonomous field from
/// perturbed simulations.
///
/// For every `δ` in the grid the field is integrated from states at
/// distance `0.99 δ^α` (both signs for scalar fields, 8 directions for
/// planar ones) up to `config.horizon` in staircase time. An `ε` is
/// witnessed when some `δ ≤ ε` keeps every run below `ε^α`. The sweep is
/// stable when every `ε` is witnessed, asymptotic when the witnessing runs
/// also decay, and exponential when a log-linear fit over the latter half
/// of each such run has `R² ≥ min_r_squared`. Any `ε` with tested but
/// failing `δ`'s gives `unstable-evidence`.
pub fn classify_stability<F: PlanarField + ?Sized>(
    field: &F,
    table: &StaircaseTable,
    equilibrium: (f64, f64),
    config: &StabilityConfig,
) -> Result<StabilityReport> {
    let alpha = table.alpha();
    let eps_grid = sorted_grid("eps_grid", &config.eps_grid)?;
    let delta_grid = sorted_grid("delta_grid", &config.delta_grid)?;
    if !(config.horizon > 0.0 && config.horizon.is_finite()) {
        return Err(param(format!("horizon must be positive, got {}", config.horizon)));
    }
    let dim = field.state_dim();
    let (ye, ze) = if dim == 1 { (equilibrium.0, 0.0) } else { equilibrium };
    let (ry, rz) = field.rates(0.0, ye, ze);
    let residual = if dim == 1 { ry.abs() } else { ry.abs().max(rz.abs()) };
    if !(residual <= config.equilibrium_tol) {
        return Err(param(format!(
            "({ye}, {ze}) is not an equilibrium: rate magnitude {residual:e}"
        )));
    }

    let mut groups: Vec<(f64, Vec<RunData>)> = Vec::with_capacity(delta_grid.len());
    for &delta in &delta_grid {
        let radius = 0.99 * delta.powf(alpha);
        let mut runs = Vec::new();
        for (dy, dz) in directions(dim, 8) {
            let (y0, z0) = (ye + radius * dy, ze + radius * dz);
            let (traj, blew_up) = match solve_classical(field, 0.0, (y0, z0), config.horizon, config.dtau, config.scheme) {
                Ok(t) => (t, false),
                Err(Error::BlowUp { partial, .. }) => (*partial, true),
                Err(e) => return Err(e),
            };
            let mut tau = Vec::with_capacity(traj.len());
            let mut dist = Vec::with_capacity(traj.len());
            for s in &traj.samples {
                tau.push(s.tau);
                dist.push(distance(dim, (ye, ze), s.y, s.z));
            }
            let initial = dist[0];
            let last = *dist.last().expect("trajectory has its initial sample");
            let max = if blew_up {
                f64::INFINITY
            } else {
                dist.iter().copied().fold(0.0, f64::max)
            };
            runs.push(RunData {
                summary: Run {
                    delta,
                    y0,
                    z0,
                    initial_distance: initial,
                    max_distance: max,
                    final_distance: if blew_up { f64::INFINITY } else { last },
                    blew_up,
                    decayed: !blew_up && last <= config.decay_ratio * initial,
                },
                tau,
                dist,
            });
        }
        groups.push((delta, runs));
    }

    let group_max = |runs: &[RunData]| runs.iter().map(|r| r.summary.max_distance).fold(0.0, f64::max);
    let mut witnesses = Vec::with_capacity(eps_grid.len());
    let mut witness_groups = Vec::new();
    let (mut failing, mut untestable) = (false, false);
    for &eps in &eps_grid {
        let bound = eps.powf(alpha);
        let candidates: Vec<usize> = (0..groups.len()).filter(|&i| groups[i].0 <= eps).collect();
        let found = candidates.iter().rev().copied().find(|&i| group_max(&groups[i].1) < bound);
        match found {
            Some(i) => witness_groups.push(i),
            None if candidates.is_empty() => untestable = true,
            None => failing = true,
        }
        witnesses.push(Witness {
            eps,
            bound,
            delta: found.map(|i| groups[i].0),
            max_distance: found.or(candidates.first().copied()).map(|i| group_max(&groups[i].1)),
            deltas_tested: candidates.len(),
        });
    }
    witness_groups.sort_unstable();
    witness_groups.dedup();

    let mut classification = if failing {
        Classification::UnstableEvidence
    } else if untestable {
        Classification::Inconclusive
    } else {
        Classification::LyapunovStable
    };
    let mut fit = None;
    if classification.is_stable() {
        let witness_runs: Vec<&RunData> = witness_groups.iter().flat_map(|&i| &groups[i].1).collect();
        if witness_runs.iter().all(|r| r.summary.decayed) {
            classification = Classification::AsymptoticallyStable;
            let fits: Option<Vec<_>> = witness_runs.iter().map(|r| fit_decay(r, config.horizon)).collect();
            if let Some(fits) = fits {
                let rate = fits.iter().map(|f| f.0).fold(f64::INFINITY, f64::min);
                let r2 = fits.iter().map(|f| f.1).fold(f64::INFINITY, f64::min);
                let kappa_alpha = fits.iter().map(|f| f.2).fold(0.0, f64::max);
                if rate > 0.0 && r2 >= config.min_r_squared {
                    classification = Classification::ExponentiallyStable;
                    fit = Some(DecayFit {
                        tau_rate: rate,
                        lambda: rate / alpha,
                        kappa: kappa_alpha.powf(1.0 / alpha),
                        r_squared: r2,
                        runs: fits.len(),
                    });
                }
            }
        }
    }

    let notes = vec![
        format!(
            "thresholds are delta^alpha and eps^alpha with alpha = {alpha}; both are monotone in their argument, so the verdict equals the one on the rescaled grids"
        ),
        format!(
            "horizon {} in staircase time: limits and containment for all later times are consistent with the runs, not proved",
            config.horizon
        ),
    ];
    Ok(StabilityReport {
        classification,
        alpha,
        equilibrium: [ye, ze],
        state_dim: dim,
        horizon: config.horizon,
        dtau: config.dtau,
        witnesses,
        fit,
        runs: groups.into_iter().flat_map(|(_, runs)| runs.into_iter().map(|r| r.summary)).collect(),
        notes,
    })
}

/// Names of the checked conditions on `FdeSystem`.
pub mod conditions {
    /// `1 ≤ u0^α ≤ u ≤ E^α` and `1 ≤ v0^α ≤ v ≤ Q^α`.
    pub const COEFFICIENT_BOUNDS: &str = "coefficient-bounds";
    /// `ε0^α ≤ f(y, z)`, with positive `λ1`, `λ2`, `ε`'s.
    pub const DAMPING_LOWER_BOUND: &str = "damping-lower-bound";
    /// `h(0) = 0`, `h(y) sgn y > 0`, `H(y) → ∞`, `0 < λ2 ≤ D h`.
    pub const RESTORING_FORCE: &str = "restoring-force";
    /// `∫ max(D v, 0) dτ < ∞` and `D v → 0`.
    pub const STIFFNESS_RATE: &str = "stiffness-rate";
    /// `|q| ≤ r1 + r2 (H + z²)^{σ^α/2} + Δ^α |z|` with integrable `r1, r2 > 0`.
    pub const FORCING_BOUND: &str = "forcing-bound";
    /// `ε0^α ≤ f - λ1 ≤ ε1^α`.
    pub const DAMPING_WINDOW: &str = "damping-window";
    /// `0 ≤ λ2 - D h ≤ ε2^α`.
    pub const RESTORING_SLOPE_WINDOW: &str = "restoring-slope-window";

    /// Required for stability of the unforced equation.
    pub const UNFORCED: [&str; 4] = [COEFFICIENT_BOUNDS, DAMPING_LOWER_BOUND, RESTORING_FORCE, STIFFNESS_RATE];

    pub const ALL: [&str; 7] = [
        COEFFICIENT_BOUNDS,
        DAMPING_LOWER_BOUND,
        RESTORING_FORCE,
        STIFFNESS_RATE,
        FORCING_BOUND,
        DAMPING_WINDOW,
        RESTORING_SLOPE_WINDOW,
    ];
}

/// Evaluation grids for `check_assumptions`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AssumptionGrids {
    pub tau: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    /// `|y|` radii at which `H` must keep growing.
    pub growth_radii: Vec<f64>,
    /// `H` at the last radius must exceed this multiple of `H` at the first.
    pub growth_factor: f64,
    /// Right ends `T` of the windows `[0, T]` for the integrability trends.
    pub tail_windows: Vec<f64>,
    /// Largest accepted last-window increment of an integral, relative to
    /// `max(1, integral)`, and largest accepted `|D v(T)|` at the last window.
    pub tail_tol: f64,
}

/// `n + 1` evenly spaced points from `lo` to `hi`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![lo];
    }
    (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect()
}

fn doubling(from: f64, to: f64) -> Vec<f64> {
    std::iter::successors(Some(from), |x| Some(2.0 * x)).take_while(|x| *x <= to).collect()
}

impl Default for AssumptionGrids {
    fn default() -> Self {
        Self {
            tau: linspace(0.0, 20.0, 200),
            y: linspace(-4.0, 4.0, 80),
            z: linspace(-4.0, 4.0, 80),
            growth_radii: doubling(1.0, 1024.0),
            growth_factor: 10.0,
            tail_windows: doubling(1.0, 256.0),
            tail_tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub alpha: f64,
    pub entries: Vec<CheckEntry>,
}

impl AssumptionReport {
    pub fn entry(&self, condition: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.condition == condition)
    }

    /// The conditions among `names` that failed (or were not checked).
    pub fn failing(&self, names: &[&str]) -> Vec<String> {
        names
            .iter()
            .filter(|n| !self.entry(n).is_some_and(|e| e.pass))
            .map(|n| n.to_string())
            .collect()
    }

    pub fn passes(&self, names: &[&str]) -> bool {
        self.failing(names).is_empty()
    }
}

/// Cumulative `∫_0^T f` at every window end and the last increment.
fn tail_integral(f: impl Fn(f64) -> f64, windows: &[f64]) -> (f64, f64) {
    let mut total = 0.0;
    let mut last = 0.0;
    let mut prev = 0.0;
    for &t in windows {
        last = integrate_gl(&f, prev, t);
        total += last;
        prev = t;
    }
    (total, last)
}

fn check_tail(worst: &mut Worst, label: &str, f: impl Fn(f64) -> f64, grids: &AssumptionGrids) {
    let (total, last) = tail_integral(f, &grids.tail_windows);
    let end = grids.tail_windows.last().copied().unwrap_or(0.0);
    let allowed = grids.tail_tol * total.abs().max(1.0);
    worst.record(label, allowed - last.abs(), 0.0, false, &[("T", end), ("integral", total)]);
    worst.note(&format!("{label}-integral"), total);
}

/// Evaluates the seven boundedness conditions of `sys` on `grids`.
///
/// Strict inequalities pass only with positive slack; the others accept
/// slack down to `-1e-12` relative to the size of the compared terms.
/// `H → ∞` is tested as strict growth of `min(H(R), H(-R))` across
/// `growth_radii` with an overall factor of at least `growth_factor`;
/// integrability on `[0, ∞)` as a last-window increment below `tail_tol`.
pub fn check_assumptions(sys: &FdeSystem, alpha: f64, grids: &AssumptionGrids) -> AssumptionReport {
    use conditions::*;

    let c = &sys.constants;
    let pw = |x: f64| x.powf(alpha);
    let mut entries = Vec::with_capacity(7);

    let mut w = Worst::default();
    w.record("u0^a >= 1", pw(c.u0) - 1.0, 1.0, false, &[]);
    w.record("v0^a >= 1", pw(c.v0) - 1.0, 1.0, false, &[]);
    for &tau in &grids.tau {
        let (u, v) = ((sys.u)(tau), (sys.v)(tau));
        w.record("u >= u0^a", u - pw(c.u0), u, false, &[("tau", tau)]);
        w.record("u <= E^a", pw(c.e) - u, u, false, &[("tau", tau)]);
        w.record("v >= v0^a", v - pw(c.v0), v, false, &[("tau", tau)]);
        w.record("v <= Q^a", pw(c.q) - v, v, false, &[("tau", tau)]);
    }
    entries.push(w.finish(COEFFICIENT_BOUNDS));

    let mut w = Worst::default();
    for (name, x) in [("lambda1", c.lambda1), ("lambda2", c.lambda2), ("eps0", c.eps0), ("eps1", c.eps1), ("eps2", c.eps2)] {
        w.record(&format!("{name} > 0"), x, 0.0, true, &[]);
    }
    for &y in &grids.y {
        for &z in &grids.z {
            let f = (sys.f)(y, z);
            w.record("f >= eps0^a", f - pw(c.eps0), f, false, &[("y", y), ("z", z)]);
        }
    }
    entries.push(w.finish(DAMPING_LOWER_BOUND));

    let mut w = Worst::default();
    w.record("h(0) = 0", -(sys.h)(0.0).abs(), 0.0, false, &[]);
    w.record("lambda2 > 0", c.lambda2, 0.0, true, &[]);
    for &y in &grids.y {
        if y != 0.0 {
            w.record("h(y) sgn(y) > 0", (sys.h)(y) * y.signum(), 0.0, true, &[("y", y)]);
        }
        let dh = sys.h_slope(y);
        w.record("Dh >= lambda2", dh - c.lambda2, dh, false, &[("y", y)]);
    }
    let growth: Vec<f64> = grids
        .growth_radii
        .iter()
        .map(|&r| sys.potential(r).min(sys.potential(-r)))
        .collect();
    for (pair, radii) in growth.windows(2).zip(grids.growth_radii.windows(2)) {
        w.record("H grows", pair[1] - pair[0], 0.0, true, &[("radius", radii[1])]);
    }
    if let (Some(first), Some(last)) = (growth.first(), growth.last()) {
        w.record(
            "H(R_last) >= factor * H(R_first)",
            last - grids.growth_factor * first,
            *last,
            false,
            &[],
        );
        w.note("potential-at-largest-radius", *last);
    }
    entries.push(w.finish(RESTORING_FORCE));

    let mut w = Worst::default();
    check_tail(&mut w, "zeta0 integrable", |t| sys.v_rate(t).max(0.0), grids);
    if let Some(&end) = grids.tail_windows.last() {
        let dv = sys.v_rate(end);
        w.record("Dv -> 0", grids.tail_tol - dv.abs(), 0.0, false, &[("T", end), ("dv", dv)]);
    }
    entries.push(w.finish(STIFFNESS_RATE));

    let mut w = Worst::default();
    match (&sys.r1, &sys.r2) {
        (Some(r1), Some(r2)) => {
            let delta = c.delta_bound();
            w.record("sigma in [0, 1]", c.sigma.min(1.0 - c.sigma), 0.0, false, &[]);
            w.record("Delta in [0, 1]", delta.min(1.0 - delta), 0.0, false, &[]);
            check_tail(&mut w, "r1 integrable", |t| r1(t), grids);
            check_tail(&mut w, "r2 integrable", |t| r2(t), grids);
            let exponent = pw(c.sigma) / 2.0;
            let delta_a = pw(delta);
            let potentials: Vec<f64> = grids.y.iter().map(|&y| sys.potential(y)).collect();
            for &tau in &grids.tau {
                let (a, b) = (r1(tau), r2(tau));
                w.record("r1 > 0", a, 0.0, true, &[("tau", tau)]);
                w.record("r2 > 0", b, 0.0, true, &[("tau", tau)]);
                for (&y, &big_h) in grids.y.iter().zip(&potentials) {
                    for &z in &grids.z {
                        let q = (sys.q)(tau, y, z).abs();
                        let rhs = a + b * (big_h + z * z).powf(exponent) + delta_a * z.abs();
                        w.record("|q| <= r1 + r2 (H + z^2)^(s/2) + D^a |z|", rhs - q, rhs + q, false, &[("tau", tau), ("y", y), ("z", z)]);
                    }
                }
            }
            w.note("delta", delta);
        }
        _ => {
            w.record("r1 and r2 supplied", f64::NEG_INFINITY, 0.0, false, &[]);
        }
    }
    entries.push(w.finish(FORCING_BOUND));

    let mut w = Worst::default();
    for &y in &grids.y {
        for &z in &grids.z {
            let excess = (sys.f)(y, z) - c.lambda1;
            let at = [("y", y), ("z", z)];
            w.record("f - lambda1 >= eps0^a", excess - pw(c.eps0), excess, false, &at);
            w.record("f - lambda1 <= eps1^a", pw(c.eps1) - excess, excess, false, &at);
        }
    }
    entries.push(w.finish(DAMPING_WINDOW));

    let mut w = Worst::default();
    for &y in &grids.y {
        let gap = c.lambda2 - sys.h_slope(y);
        w.record("lambda2 - Dh >= 0", gap, c.lambda2, false, &[("y", y)]);
        w.record("lambda2 - Dh <= eps2^a", pw(c.eps2) - gap, c.lambda2, false, &[("y", y)]);
    }
    entries.push(w.finish(RESTORING_SLOPE_WINDOW));

    AssumptionReport { alpha, entries }
}

/// Trajectory settings and tolerances for the theorem checks. Horizons are
/// in staircase time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TheoremConfig {
    /// Initial states lie on circles of these radii.
    pub radii: Vec<f64>,
    pub directions: usize,
    pub horizon: f64,
    pub dtau: f64,
    pub scheme: Scheme,
    /// Largest accepted `D^α L` along the runs.
    pub derivative_tol: f64,
    /// Largest accepted increase of `L` between accepted steps.
    pub step_drift_tol: f64,
    /// The state grid of the quadratic and sandwich bounds is
    /// `[-w, w]²` with `bound_points` points per side.
    pub bound_half_width: f64,
    pub bound_points: usize,
    /// `|y|` and `|z|` at the horizon must be at most this.
    pub convergence_tol: f64,
    pub grids: AssumptionGrids,
}

impl Default for TheoremConfig {
    fn default() -> Self {
        Self {
            radii: vec![0.5, 1.0, 2.0],
            directions: 8,
            horizon: 20.0,
            dtau: 1e-3,
            scheme: Scheme::Rk4,
            derivative_tol: 1e-10,
            step_drift_tol: 1e-8,
            bound_half_width: 2.0,
            bound_points: 50,
            convergence_tol: 1e-2,
            grids: AssumptionGrids::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    /// What was verified.
    pub claim: String,
    pub alpha: f64,
    /// Conditions required and found to hold.
    pub preconditions: Vec<String>,
    pub entries: Vec<CheckEntry>,
    pub trajectories: usize,
    pub pass: bool,
}

impl TheoremReport {
    pub fn entry(&self, name: &str) -> Option<&CheckEntry> {
        self.entries.iter().find(|e| e.condition == name)
    }
}

/// `L2 = H(y) + z² / (2 v(τ))` with its analytic gradient.
pub fn unforced_energy(sys: &FdeSystem) -> LyapunovFunction {
    let (s1, s2) = (sys.clone(), sys.clone());
    LyapunovFunction::new(move |tau, y, z| s1.potential(y) + z * z / (2.0 * (s1.v)(tau))).with_gradient(move |tau, y, z| {
        let v = (s2.v)(tau);
        [-s2.v_rate(tau) * z * z / (2.0 * v * v), (s2.h)(y), z / v]
    })
}

/// `L0 = v(τ) H(y) + z² / 2 + k` with its analytic gradient.
pub fn forced_energy(sys: &FdeSystem) -> LyapunovFunction {
    let (s1, s2) = (sys.clone(), sys.clone());
    let k = sys.constants.k;
    LyapunovFunction::new(move |tau, y, z| (s1.v)(tau) * s1.potential(y) + 0.5 * z * z + k)
        .with_gradient(move |tau, y, z| [s2.v_rate(tau) * s2.potential(y), (s2.v)(tau) * (s2.h)(y), z])
}

fn initial_states(config: &TheoremConfig) -> Vec<(f64, f64)> {
    let dirs = directions(2, config.directions.max(1));
    config
        .radii
        .iter()
        .flat_map(|&r| dirs.iter().map(move |&(c, s)| (r * c, r * s)))
        .collect()
}

/// Runs from every initial state; a blow-up keeps its partial samples.
fn simulate(sys: &FdeSystem, config: &TheoremConfig) -> Result<Vec<(Trajectory, Option<f64>)>> {
    initial_states(config)
        .into_iter()
        .map(|y0z0| match solve_classical(sys, 0.0, y0z0, config.horizon, config.dtau, config.scheme) {
            Ok(t) => Ok((t, None)),
            Err(Error::BlowUp { tau, partial }) => Ok((*partial, Some(tau))),
            Err(e) => Err(e),
        })
        .collect()
}

/// Numerical check that the zero solution of the unforced equation is
/// stable, using `L2 = H(y) + z² / (2 v)`.
///
/// Requires the first four conditions and `q ≡ 0` on the grid. Along runs
/// from `config.radii`, checks `D^α L2 ≤ derivative_tol` and step increases
/// of `L2` below `step_drift_tol`; on the state grid, checks
/// `L2 ≥ λ̄ (y² + z²)` with `λ̄ = min(λ2, 1 / (2 Q^α))` and `L2(τ, 0, 0) = 0`.
pub fn verify_unforced_stability(sys: &FdeSystem, alpha: f64, config: &TheoremConfig) -> Result<TheoremReport> {
    let report = check_assumptions(sys, alpha, &config.grids);
    let mut failing = report.failing(&conditions::UNFORCED);
    let g = &config.grids;
    let max_q = g
        .tau
        .iter()
        .flat_map(|&t| g.y.iter().flat_map(move |&y| g.z.iter().map(move |&z| (t, y, z))))
        .map(|(t, y, z)| (sys.q)(t, y, z).abs())
        .fold(0.0, f64::max);
    if max_q != 0.0 {
        failing.push(format!("unforced (max |q| = {max_q:e})"));
    }
    if !failing.is_empty() {
        return Err(Error::Precondition { failing });
    }

    let l2 = unforced_energy(sys);
    let runs = simulate(sys, config)?;
    let mut deriv = Worst::default();
    let mut drift = Worst::default();
    for (traj, blew_up) in &runs {
        if let Some(tau) = blew_up {
            deriv.record("run finished", f64::NEG_INFINITY, 0.0, false, &[("tau", *tau)]);
        }
        let mut prev: Option<f64> = None;
        for s in &traj.samples {
            let d = lyapunov_derivative(&l2, sys, s.tau, s.y, s.z)?;
            let at = [("tau", s.tau), ("y", s.y), ("z", s.z)];
            deriv.record("D L2 <= tol", config.derivative_tol - d, 0.0, false, &at);
            let value = l2.value(s.tau, s.y, s.z);
            if let Some(p) = prev {
                drift.record("L2 step increase <= tol", config.step_drift_tol - (value - p), 0.0, false, &at);
            }
            prev = Some(value);
        }
    }

    let c = &sys.constants;
    let lambda_bar = c.lambda2.min(1.0 / (2.0 * c.q.powf(alpha)));
    let side = linspace(-config.bound_half_width, config.bound_half_width, config.bound_points.max(2) - 1);
    let potentials: Vec<f64> = side.iter().map(|&y| sys.potential(y)).collect();
    let mut lower = Worst::default();
    let mut origin = Worst::default();
    for &tau in &g.tau {
        let v = (sys.v)(tau);
        for (&y, &big_h) in side.iter().zip(&potentials) {
            for &z in &side {
                let value = big_h + z * z / (2.0 * v);
                let floor = lambda_bar * (y * y + z * z);
                lower.record("L2 >= lambda_bar (y^2 + z^2)", value - floor, value, false, &[("tau", tau), ("y", y), ("z", z)]);
            }
        }
        origin.record("L2(tau, 0, 0) = 0", -l2.value(tau, 0.0, 0.0).abs(), 0.0, false, &[("tau", tau)]);
    }
    lower.note("lambda_bar", lambda_bar);

    let entries = vec![
        deriv.finish("derivative-nonpositive"),
        drift.finish("non-increasing"),
        lower.finish("quadratic-lower-bound"),
        origin.finish("vanishes-at-equilibrium"),
    ];
    Ok(TheoremReport {
        claim: "zero solution of the unforced equation is stable".into(),
        alpha,
        preconditions: conditions::UNFORCED.iter().map(|s| s.to_string()).collect(),
        pass: entries.iter().all(|e| e.pass),
        entries,
        trajectories: runs.len(),
    })
}

/// Numerical check that all solutions of the forced equation are uniformly
/// bounded and converge to 0.
///
/// Requires all seven conditions and `k ≥ 1/32`. With
/// `E1 = min(v0, 1/2)`, `E2 = max(Q, 1)`, `E3 = E (λ1 + ε0) / 2`,
/// `E4 = 1 / E1`, `L0 = v H + z²/2 + k` and
/// `ζ = E4^α max(D v, 0) + 4 (r1 + r2) / E1^α`, checks along runs and on
/// the state grid:
///
/// * `E1^{1/α} (H + z² + k) ≤ L0 ≤ E2^{1/α} (H + z² + k)`;
/// * `D L0 ≤ -E3^α z² + (r1 + r2)|z| + r2 (H + z²) + E4^α ζ0 L0`;
/// * `D L = e^{-∫ζ} (D L0 - ζ L0) ≤ 0` for `L = e^{-∫ζ} L0`, with the
///   estimate of `E5^α = min -D L / z²` reported as a witness;
/// * `H + z² ≤ e^{∫ζ} L0(0) / E1^{1/α}` (boundedness, no blow-up);
/// * `|y|, |z| ≤ convergence_tol` at the horizon.
pub fn verify_forced_boundedness(sys: &FdeSystem, alpha: f64, config: &TheoremConfig) -> Result<TheoremReport> {
    let c = sys.constants;
    if !(c.k >= 1.0 / 32.0) {
        return Err(param(format!("k must be at least 1/32, got {}", c.k)));
    }
    let report = check_assumptions(sys, alpha, &config.grids);
    let failing = report.failing(&conditions::ALL);
    if !failing.is_empty() {
        return Err(Error::Precondition { failing });
    }
    let (r1, r2) = match (&sys.r1, &sys.r2) {
        (Some(a), Some(b)) => (a.clone(), b.clone()),
        _ => return Err(Error::Precondition {
            failing: vec![conditions::FORCING_BOUND.into()],
        }),
    };

    let inv = 1.0 / alpha;
    let e1 = c.v0.min(0.5);
    let e2 = c.q.max(1.0);
    let e3a = c.e3().powf(alpha);
    let e4a = (1.0 / e1).powf(alpha);
    let (low, high) = (e1.powf(inv), e2.powf(inv));
    let zeta0 = |tau: f64| sys.v_rate(tau).max(0.0);
    let zeta = |tau: f64| e4a * zeta0(tau) + 4.0 / e1.powf(alpha) * (r1(tau) + r2(tau));
    let k = c.k;
    let l0 = forced_energy(sys);

    let mut lower = Worst::default();
    let mut upper = Worst::default();
    let mut sandwich = |tau: f64, y: f64, big_h: f64, z: f64, l: f64| {
        let base = big_h + z * z + k;
        let at = [("tau", tau), ("y", y), ("z", z)];
        lower.record("E1^(1/a) (H + z^2 + k) <= L0", l - low * base, l, false, &at);
        upper.record("L0 <= E2^(1/a) (H + z^2 + k)", high * base - l, l, false, &at);
    };
    let side = linspace(-config.bound_half_width, config.bound_half_width, config.bound_points.max(2) - 1);
    let potentials: Vec<f64> = side.iter().map(|&y| sys.potential(y)).collect();
    for &tau in &config.grids.tau {
        let v = (sys.v)(tau);
        for (&y, &big_h) in side.iter().zip(&potentials) {
            for &z in &side {
                sandwich(tau, y, big_h, z, v * big_h + 0.5 * z * z + k);
            }
        }
    }

    let runs = simulate(sys, config)?;
    // every run shares the fixed τ grid, so ∫ζ is tabulated once
    let longest = runs.iter().map(|(t, _)| t.len()).max().unwrap_or(0);
    let taus: Vec<f64> = runs
        .iter()
        .find(|(t, _)| t.len() == longest)
        .map(|(t, _)| t.samples.iter().map(|s| s.tau).collect())
        .unwrap_or_default();
    let mut big_z = Vec::with_capacity(taus.len());
    let mut acc = 0.0;
    for (i, &tau) in taus.iter().enumerate() {
        if i > 0 {
            let (a, b) = (taus[i - 1], tau);
            acc += (b - a) / 6.0 * (zeta(a) + 4.0 * zeta(0.5 * (a + b)) + zeta(b));
        }
        big_z.push(acc);
    }

    let mut rate = Worst::default();
    let mut weighted = Worst::default();
    let mut bounded = Worst::default();
    let mut convergent = Worst::default();
    let mut e5a = f64::INFINITY;
    for (traj, blew_up) in &runs {
        let first = traj.samples[0];
        let l_start = l0.value(first.tau, first.y, first.z);
        if let Some(tau) = blew_up {
            bounded.record("no blow-up", f64::NEG_INFINITY, 0.0, false, &[("tau", *tau), ("y0", first.y), ("z0", first.z)]);
        }
        for (i, s) in traj.samples.iter().enumerate() {
            let (tau, y, z) = (s.tau, s.y, s.z);
            let at = [("tau", tau), ("y", y), ("z", z)];
            let big_h = sys.potential(y);
            let l = l0.value(tau, y, z);
            sandwich(tau, y, big_h, z, l);

            let dl0 = lyapunov_derivative(&l0, sys, tau, y, z)?;
            let (a, b) = (r1(tau), r2(tau));
            let rhs = -e3a * z * z + (a + b) * z.abs() + b * (big_h + z * z) + e4a * zeta0(tau) * l;
            rate.record("D L0 <= bound", rhs - dl0, rhs.abs() + dl0.abs(), false, &at);

            let weight = (-big_z[i]).exp();
            let dl = weight * (dl0 - zeta(tau) * l);
            weighted.record("D L <= 0", -dl, weight * l, false, &at);
            if z.abs() >= 1e-8 {
                e5a = e5a.min(-dl / (z * z));
            }

            let cap = big_z[i].exp() * l_start / low;
            bounded.record("H + z^2 <= e^Z L0(0) / E1^(1/a)", cap - (big_h + z * z), cap, false, &at);
        }
        let last = traj.last().expect("non-empty trajectory");
        let reach = if blew_up.is_some() { f64::INFINITY } else { last.y.abs().max(last.z.abs()) };
        convergent.record(
            "max(|y|, |z|) at horizon <= tol",
            config.convergence_tol - reach,
            0.0,
            false,
            &[("tau", last.tau), ("y0", first.y), ("z0", first.z)],
        );
    }
    weighted.record("E5^a estimate > 0", e5a, 0.0, true, &[]);
    weighted.note("e5_alpha_estimate", e5a);
    lower.note("E1", e1);
    upper.note("E2", e2);
    rate.note("E3", c.e3());
    rate.note("E4", 1.0 / e1);

    let entries = vec![
        lower.finish("energy-lower-bound"),
        upper.finish("energy-upper-bound"),
        rate.finish("energy-rate-bound"),
        weighted.finish("weighted-decrease"),
        bounded.finish("bounded"),
        convergent.finish("convergent"),
    ];
    Ok(TheoremReport {
        claim: "solutions of the forced equation are uniformly bounded and convergent".into(),
        alpha,
        preconditions: conditions::ALL.iter().map(|s| s.to_string()).collect(),
        pass: entries.iter().all(|e| e.pass),
        entries,
        trajectories: runs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::{hausdorff_dimension, CantorSpec};
    use crate::fde::{FirstOrder, PlanarFn};
    use crate::models;
    use crate::staircase::build_staircase;
    use approx::assert_relative_eq;

    fn table() -> StaircaseTable {
        let alpha = hausdorff_dimension(0.2).unwrap();
        build_staircase(&CantorSpec::new(0.2, 8).unwrap(), alpha, 0.0).unwrap()
    }

    fn alpha() -> f64 {
        hausdorff_dimension(0.2).unwrap()
    }

    #[test]
    fn analytic_and_numerical_gradients_agree() {
        let sys = models::forced_damped_oscillator();
        for l in [forced_energy(&sys), unforced_energy(&sys), models::oscillator_energy(2.0)] {
            for &(tau, y, z) in &[(0.0, 0.3, -0.7), (1.5, -1.2, 0.4), (7.0, 2.0, 2.0)] {
                let a = l.gradient(tau, y, z).unwrap();
                let n = l.numerical_gradient(tau, y, z).unwrap();
                for i in 0..3 {
                    assert_relative_eq!(a[i], n[i], max_relative = 1e-6, epsilon = 1e-8);
                }
            }
        }
    }

    #[test]
    fn derivative_examples() {
        let decay = models::exponential_decay();
        let l = models::decay_energy();
        for z in [-1.0, 0.25, 3.0] {
            assert_relative_eq!(lyapunov_derivative(&l, &decay, 0.0, z, 0.0).unwrap(), -2.0 * z * z);
        }
        let osc = models::harmonic_oscillator(1.7);
        let e = models::oscillator_energy(1.7);
        assert_eq!(lyapunov_derivative(&e, &osc, 0.0, 0.4, -1.1).unwrap(), 0.0);
        let lien = models::cubic_lienard();
        let e = models::lienard_energy();
        let y: f64 = 0.8;
        let want = -y * y.powi(3) / 3.0;
        assert_relative_eq!(lyapunov_derivative(&e, &lien, 0.0, y, 0.3).unwrap(), want, max_relative = 1e-12);
    }

    #[test]
    fn finite_difference_fallback_fails_on_huge_arguments() {
        let l = LyapunovFunction::new(|_, y, _| y * y);
        assert!(l.numerical_gradient(0.0, f64::MAX, 0.0).is_err());
        assert!(l.numerical_gradient(0.0, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn definiteness() {
        assert!(models::oscillator_energy(1.0).definiteness(0.0, (0.0, 0.0), 1.0, 4, 2).pass);
        assert!(models::decay_energy().definiteness(0.0, (0.0, 0.0), 1.0, 4, 1).pass);
        let bad = LyapunovFunction::new(|_, y, z| y * y - z * z);
        assert!(!bad.definiteness(0.0, (0.0, 0.0), 1.0, 4, 2).pass);
    }

    #[test]
    fn decay_is_exponentially_stable_with_unit_rate() {
        let r = classify_stability(&models::exponential_decay(), &table(), (0.0, 0.0), &StabilityConfig::default()).unwrap();
        assert_eq!(r.classification, Classification::ExponentiallyStable);
        let fit = r.fit.unwrap();
        assert!((fit.tau_rate - 1.0).abs() <= 1e-2);
        assert_relative_eq!(fit.lambda, fit.tau_rate / r.alpha);
        assert!(fit.kappa >= 1.0 - 1e-9);
    }

    #[test]
    fn oscillator_is_stable_but_not_asymptotic() {
        let r = classify_stability(&models::harmonic_oscillator(1.0), &table(), (0.0, 0.0), &StabilityConfig::default()).unwrap();
        assert_eq!(r.classification, Classification::LyapunovStable);
        assert!(r.witnesses.iter().all(|w| w.delta.is_some()));
    }

    #[test]
    fn growth_is_unstable() {
        let r = classify_stability(&FirstOrder(|h: f64| h), &table(), (0.0, 0.0), &StabilityConfig::default()).unwrap();
        assert_eq!(r.classification, Classification::UnstableEvidence);
        assert!(r.witnesses.iter().all(|w| w.delta.is_none()));
    }

    #[test]
    fn untestable_grid_is_inconclusive() {
        let config = StabilityConfig {
            eps_grid: vec![0.001],
            ..StabilityConfig::default()
        };
        let r = classify_stability(&models::exponential_decay(), &table(), (0.0, 0.0), &config).unwrap();
        assert_eq!(r.classification, Classification::Inconclusive);
    }

    #[test]
    fn rejects_non_equilibrium() {
        let field = PlanarFn(|_, y: f64, z: f64| (z, 1.0 - y));
        assert!(classify_stability(&field, &table(), (0.0, 0.0), &StabilityConfig::default()).is_err());
        assert!(classify_stability(&field, &table(), (1.0, 0.0), &StabilityConfig::default()).is_ok());
    }

    #[test]
    fn unit_system_meets_every_condition() {
        let sys = models::forced_damped_oscillator();
        let r = check_assumptions(&sys, alpha(), &AssumptionGrids::default());
        for e in &r.entries {
            assert!(e.pass, "{e:?}");
        }
        assert!(r.passes(&conditions::ALL));
    }

    #[test]
    fn reversed_restoring_force_fails() {
        let sys = FdeSystem::new(|_| 1.0, |_| 1.0, |_, _| 1.0, |y| -y);
        let r = check_assumptions(&sys, alpha(), &AssumptionGrids::default());
        let e = r.entry(conditions::RESTORING_FORCE).unwrap();
        assert!(!e.pass);
        assert!(e.worst_margin < 0.0);
        assert!(r.entry(conditions::COEFFICIENT_BOUNDS).unwrap().pass);
    }

    #[test]
    fn missing_forcing_bounds_fail() {
        let sys = models::unit_damped_oscillator();
        let r = check_assumptions(&sys, alpha(), &AssumptionGrids::default());
        assert!(!r.entry(conditions::FORCING_BOUND).unwrap().pass);
        assert!(r.passes(&conditions::UNFORCED));
    }

    #[test]
    fn integrable_stiffness_rate() {
        let sys = FdeSystem::new(|_| 1.0, |t| 2.0 - (-t).exp(), |_, _| 1.0, |y| y)
            .with_v_rate(|t| (-t).exp())
            .with_constants(crate::fde::SystemConstants {
                q: 2.0f64.powf(1.0 / alpha()),
                ..Default::default()
            });
        let r = check_assumptions(&sys, alpha(), &AssumptionGrids::default());
        let e = r.entry(conditions::STIFFNESS_RATE).unwrap();
        assert!(e.pass, "{e:?}");
        // ∫_0^256 e^{-τ} dτ
        let integral = e.witness["zeta0 integrable-integral"].as_f64().unwrap();
        assert_relative_eq!(integral, 1.0, max_relative = 1e-10);
        assert!(r.entry(conditions::COEFFICIENT_BOUNDS).unwrap().pass);

        let growing = FdeSystem::new(|_| 1.0, |t| 1.0 + t, |_, _| 1.0, |y| y).with_v_rate(|_| 1.0);
        let r = check_assumptions(&growing, alpha(), &AssumptionGrids::default());
        assert!(!r.entry(conditions::STIFFNESS_RATE).unwrap().pass);
    }

    #[test]
    fn unforced_stability_on_unit_system() {
        let r = verify_unforced_stability(&models::unit_damped_oscillator(), alpha(), &TheoremConfig::default()).unwrap();
        assert!(r.pass, "{r:#?}");
        let lower = r.entry("quadratic-lower-bound").unwrap();
        assert!(lower.worst_margin >= 0.0);
        assert_eq!(r.entry("vanishes-at-equilibrium").unwrap().worst_margin, 0.0);
    }

    #[test]
    fn unforced_check_refuses_forced_systems() {
        let err = verify_unforced_stability(&models::forced_damped_oscillator(), alpha(), &TheoremConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Precondition { .. }));
        let sys = FdeSystem::new(|_| 1.0, |_| 1.0, |_, _| 1.0, |y| -y);
        match verify_unforced_stability(&sys, alpha(), &TheoremConfig::default()).unwrap_err() {
            Error::Precondition { failing } => assert_eq!(failing, vec![conditions::RESTORING_FORCE.to_string()]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn forced_boundedness_on_unit_system() {
        let r = verify_forced_boundedness(&models::forced_damped_oscillator(), alpha(), &TheoremConfig::default()).unwrap();
        assert!(r.pass, "{r:#?}");
        for e in &r.entries {
            assert!(e.worst_margin >= 0.0, "{e:?}");
        }
    }

    #[test]
    fn unforced_system_with_bounds_passes_both_checks() {
        let sys = models::unit_damped_oscillator().with_forcing_bounds(|t| (-t).exp(), |t| (-t).exp());
        let config = TheoremConfig::default();
        assert!(verify_forced_boundedness(&sys, alpha(), &config).unwrap().pass);
        assert!(verify_unforced_stability(&sys, alpha(), &config).unwrap().pass);
    }

    #[test]
    fn small_offset_is_rejected() {
        let mut sys = models::forced_damped_oscillator();
        sys.constants.k = 0.01;
        assert!(verify_forced_boundedness(&sys, alpha(), &TheoremConfig::default()).is_err());
    }

    #[test]
    fn report_serializes_with_kebab_case_labels() {
        let r = classify_stability(&models::harmonic_oscillator(1.0), &table(), (0.0, 0.0), &StabilityConfig::default()).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["classification"], "lyapunov-stable");
    }
}
