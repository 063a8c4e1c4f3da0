//! Fractal differential equations solved in staircase time.
//!
//! With `τ = S^α(t)` the fractal derivative `D^α` acts as `d/dτ` on the set
//! and as 0 on its gaps, so a fractal ODE becomes an ordinary ODE in `τ`.
//! The solvers step in `τ` with fixed-step RK4 (or explicit Euler) and map
//! every accepted step back to physical time through the inverse staircase.
//! Off the set the state is constant, so a trajectory sampled at set points
//! renders as plateaus across gaps.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::staircase::StaircaseTable;

/// `|y| + |z|` above this aborts a solve.
pub const BLOW_UP_THRESHOLD: f64 = 1e12;

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type StateFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type ForcingFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Right-hand side `(y', z')` of a planar system in staircase time.
pub trait PlanarField {
    fn rates(&self, tau: f64, y: f64, z: f64) -> (f64, f64);

    /// 1 for scalar equations embedded as `(h, 0)`.
    fn state_dim(&self) -> usize {
        2
    }
}

impl<T: PlanarField + ?Sized> PlanarField for &T {
    fn rates(&self, tau: f64, y: f64, z: f64) -> (f64, f64) {
        (**self).rates(tau, y, z)
    }

    fn state_dim(&self) -> usize {
        (**self).state_dim()
    }
}

/// Adapts a closure `(tau, y, z) -> (y', z')`.
pub struct PlanarFn<F>(pub F);

impl<F: Fn(f64, f64, f64) -> (f64, f64)> PlanarField for PlanarFn<F> {
    fn rates(&self, tau: f64, y: f64, z: f64) -> (f64, f64) {
        (self.0)(tau, y, z)
    }
}

/// Scalar equation `D^α h = g(h)`, carried in the `y` slot.
pub struct FirstOrder<G>(pub G);

impl<G: Fn(f64) -> f64> PlanarField for FirstOrder<G> {
    fn rates(&self, _tau: f64, y: f64, _z: f64) -> (f64, f64) {
        ((self.0)(y), 0.0)
    }

    fn state_dim(&self) -> usize {
        1
    }
}

/// Liénard form `y' = z - F(y)`, `z' = -h(y)` of
/// `(D^α)² y + s(y) D^α y + h(y) = 0`, with `F(y) = ∫_0^y s`.
#[derive(Clone)]
pub struct LienardSystem {
    pub friction: ScalarFn,
    pub restoring: ScalarFn,
}

impl PlanarField for LienardSystem {
    fn rates(&self, _tau: f64, y: f64, z: f64) -> (f64, f64) {
        (z - (self.friction)(y), -(self.restoring)(y))
    }
}

/// Constants of the boundedness conditions. `E` and `Q` keep their
/// single-letter names in JSON.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SystemConstants {
    pub u0: f64,
    pub v0: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub eps0: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub sigma: f64,
    /// Forcing slope bound; `None` means `E3 = E (λ1 + ε0) / 2`.
    pub delta: Option<f64>,
    /// Offset of the Lyapunov function `L0`.
    pub k: f64,
}

impl Default for SystemConstants {
    /// Values satisfied by the unit-coefficient system `u = v = f = 1`,
    /// `h(y) = y`.
    fn default() -> Self {
        Self {
            u0: 1.0,
            v0: 1.0,
            e: 1.0,
            q: 1.0,
            lambda1: 0.25,
            lambda2: 1.0,
            eps0: 0.5,
            eps1: 1.0,
            eps2: 0.1,
            sigma: 1.0,
            delta: None,
            k: 1.0 / 32.0,
        }
    }
}

impl SystemConstants {
    pub fn e3(&self) -> f64 {
        self.e * (self.lambda1 + self.eps0) / 2.0
    }

    pub fn delta_bound(&self) -> f64 {
        self.delta.unwrap_or_else(|| self.e3())
    }
}

/// Second α-order equation
/// `(D^α)² y + u(τ) f(y, D^α y) D^α y + v(τ) h(y) = q(τ, y, D^α y)`
/// in system form `y' = z`, `z' = -u f z - v h + q`.
#[derive(Clone)]
pub struct FdeSystem {
    pub u: ScalarFn,
    pub v: ScalarFn,
    pub f: StateFn,
    pub h: ScalarFn,
    pub q: ForcingFn,
    /// `dv/dτ`; central differences when absent.
    pub dv: Option<ScalarFn>,
    /// `dh/dy`; central differences when absent.
    pub dh: Option<ScalarFn>,
    /// `H(y) = ∫_0^y h`; Gauss–Legendre quadrature when absent.
    pub potential: Option<ScalarFn>,
    pub r1: Option<ScalarFn>,
    pub r2: Option<ScalarFn>,
    pub constants: SystemConstants,
}

impl fmt::Debug for FdeSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FdeSystem")
            .field("constants", &self.constants)
            .field("dv", &self.dv.is_some())
            .field("dh", &self.dh.is_some())
            .field("potential", &self.potential.is_some())
            .finish_non_exhaustive()
    }
}

impl FdeSystem {
    /// Unforced system with default constants.
    pub fn new(
        u: impl Fn(f64) -> f64 + Send + Sync + 'static,
        v: impl Fn(f64) -> f64 + Send + Sync + 'static,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        h: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            u: Arc::new(u),
            v: Arc::new(v),
            f: Arc::new(f),
            h: Arc::new(h),
            q: Arc::new(|_, _, _| 0.0),
            dv: None,
            dh: None,
            potential: None,
            r1: None,
            r2: None,
            constants: SystemConstants::default(),
        }
    }

    pub fn with_forcing(mut self, q: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.q = Arc::new(q);
        self
    }

    pub fn with_v_rate(mut self, dv: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.dv = Some(Arc::new(dv));
        self
    }

    pub fn with_h_slope(mut self, dh: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.dh = Some(Arc::new(dh));
        self
    }

    pub fn with_potential(mut self, big_h: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.potential = Some(Arc::new(big_h));
        self
    }

    pub fn with_forcing_bounds(
        mut self,
        r1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        r2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.r1 = Some(Arc::new(r1));
        self.r2 = Some(Arc::new(r2));
        self
    }

    pub fn with_constants(mut self, constants: SystemConstants) -> Self {
        self.constants = constants;
        self
    }

    /// `D^α v` in staircase time.
    pub fn v_rate(&self, tau: f64) -> f64 {
        match &self.dv {
            Some(dv) => dv(tau),
            None => central_difference(|x| (self.v)(x), tau),
        }
    }

    /// `D^α h` with respect to the state.
    pub fn h_slope(&self, y: f64) -> f64 {
        match &self.dh {
            Some(dh) => dh(y),
            None => central_difference(|x| (self.h)(x), y),
        }
    }

    /// `H(y) = ∫_0^y h(λ) dλ`.
    pub fn potential(&self, y: f64) -> f64 {
        match &self.potential {
            Some(big_h) => big_h(y),
            None => integrate_gl(|x| (self.h)(x), 0.0, y),
        }
    }
}

impl PlanarField for FdeSystem {
    fn rates(&self, tau: f64, y: f64, z: f64) -> (f64, f64) {
        let dz = -(self.u)(tau) * (self.f)(y, z) * z - (self.v)(tau) * (self.h)(y) + (self.q)(tau, y, z);
        (z, dz)
    }
}

pub(crate) fn central_difference(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    let step = f64::EPSILON.cbrt() * x.abs().max(1.0);
    (f(x + step) - f(x - step)) / (2.0 * step)
}

// 8-point Gauss-Legendre nodes and weights on [-1, 1].
const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Composite 8-point Gauss–Legendre rule on 32 panels.
pub(crate) fn integrate_gl(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    const PANELS: usize = 32;
    let width = (b - a) / PANELS as f64;
    let mut total = 0.0;
    for p in 0..PANELS {
        let mid = a + (p as f64 + 0.5) * width;
        let half = 0.5 * width;
        let mut panel = 0.0;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            panel += w * (f(mid - half * x) + f(mid + half * x));
        }
        total += panel * half;
    }
    total
}

/// Time-stepping scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    #[default]
    Rk4,
    Euler,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Rk4 => "rk4",
            Scheme::Euler => "euler",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub tau: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub scheme: Scheme,
    pub dtau: f64,
    /// Construction depth of the staircase; `None` for classical time.
    pub depth: Option<u32>,
    pub alpha: f64,
}

/// Solution samples `(t, τ, y, z)` with `τ` non-decreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    /// State `(y, z)` at staircase time `tau`, linear between samples.
    pub fn state_at_tau(&self, tau: f64) -> Option<(f64, f64)> {
        let s = &self.samples;
        let first = s.first()?;
        let last = s.last()?;
        if tau < first.tau || tau > last.tau {
            return None;
        }
        let i = s.partition_point(|p| p.tau < tau);
        if s[i].tau == tau || i == 0 {
            return Some((s[i].y, s[i].z));
        }
        let (p, q) = (s[i - 1], s[i]);
        let w = (tau - p.tau) / (q.tau - p.tau);
        Some((p.y + w * (q.y - p.y), p.z + w * (q.z - p.z)))
    }

    /// State at physical time `t`; constant across every gap of the set.
    pub fn state_at(&self, table: &StaircaseTable, t: f64) -> Option<(f64, f64)> {
        self.state_at_tau(table.eval(t).ok()?)
    }
}

enum Stepper {
    Finished,
    BlewUp(f64),
}

fn step<F: PlanarField + ?Sized>(field: &F, scheme: Scheme, tau: f64, h: f64, y: f64, z: f64) -> (f64, f64) {
    match scheme {
        Scheme::Euler => {
            let (dy, dz) = field.rates(tau, y, z);
            (y + h * dy, z + h * dz)
        }
        Scheme::Rk4 => {
            let half = 0.5 * h;
            let (k1y, k1z) = field.rates(tau, y, z);
            let (k2y, k2z) = field.rates(tau + half, y + half * k1y, z + half * k1z);
            let (k3y, k3z) = field.rates(tau + half, y + half * k2y, z + half * k2z);
            let (k4y, k4z) = field.rates(tau + h, y + h * k3y, z + h * k3z);
            (
                y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
                z + h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z),
            )
        }
    }
}

/// Number of fixed steps covering `span`, the last one possibly shorter.
pub(crate) fn step_count(span: f64, dtau: f64) -> usize {
    if span <= 0.0 {
        0
    } else {
        ((span / dtau) * (1.0 - 1e-12)).ceil().max(1.0) as usize
    }
}

fn integrate<F: PlanarField + ?Sized>(
    field: &F,
    scheme: Scheme,
    tau_start: f64,
    tau_end: f64,
    dtau: f64,
    (mut y, mut z): (f64, f64),
    mut emit: impl FnMut(f64, f64, f64) -> Result<()>,
) -> Result<Stepper> {
    emit(tau_start, y, z)?;
    let n = step_count(tau_end - tau_start, dtau);
    let mut tau = tau_start;
    for k in 1..=n {
        let next = if k == n { tau_end } else { tau_start + k as f64 * dtau };
        (y, z) = step(field, scheme, tau, next - tau, y, z);
        tau = next;
        if !(y.is_finite() && z.is_finite()) || y.abs() + z.abs() > BLOW_UP_THRESHOLD {
            return Ok(Stepper::BlewUp(tau));
        }
        emit(tau, y, z)?;
    }
    Ok(Stepper::Finished)
}

fn check_dtau(dtau: f64) -> Result<()> {
    if dtau > 0.0 && dtau.is_finite() {
        Ok(())
    } else {
        Err(param(format!("dtau must be positive and finite, got {dtau}")))
    }
}

fn check_horizon(table: &StaircaseTable, t_end: f64) -> Result<f64> {
    let (_, hi) = table.span();
    if !(table.t0() <= t_end && t_end <= hi) {
        return Err(Error::Domain {
            value: t_end,
            lo: table.t0(),
            hi,
        });
    }
    table.eval(t_end)
}

fn run_on_staircase<F: PlanarField + ?Sized>(
    field: &F,
    table: &StaircaseTable,
    scheme: Scheme,
    (y0, z0): (f64, f64),
    t_end: f64,
    dtau: f64,
    z_column: impl Fn(f64, f64, f64) -> f64,
) -> Result<Trajectory> {
    check_dtau(dtau)?;
    let tau_end = check_horizon(table, t_end)?;
    let mut traj = Trajectory {
        samples: Vec::with_capacity(step_count(tau_end, dtau) + 1),
        meta: TrajectoryMeta {
            scheme,
            dtau,
            depth: Some(table.spec().depth()),
            alpha: table.alpha(),
        },
    };
    let outcome = integrate(field, scheme, 0.0, tau_end, dtau, (y0, z0), |tau, y, z| {
        let t = table.inverse(tau)?;
        traj.samples.push(Sample {
            t,
            tau,
            y,
            z: z_column(tau, y, z),
        });
        Ok(())
    })?;
    match outcome {
        Stepper::Finished => Ok(traj),
        Stepper::BlewUp(tau) => Err(Error::BlowUp {
            tau,
            partial: Box::new(traj),
        }),
    }
}

/// `D^α h = g(h)`, `h(t0) = h0`, integrated to `t_end` with RK4 in `τ`.
///
/// The `z` column of the result holds `D^α h = g(h)`.
pub fn solve_first_order(
    g: impl Fn(f64) -> f64,
    table: &StaircaseTable,
    h0: f64,
    t_end: f64,
    dtau: f64,
) -> Result<Trajectory> {
    solve_first_order_with(g, table, h0, t_end, dtau, Scheme::Rk4)
}

pub fn solve_first_order_with(
    g: impl Fn(f64) -> f64,
    table: &StaircaseTable,
    h0: f64,
    t_end: f64,
    dtau: f64,
    scheme: Scheme,
) -> Result<Trajectory> {
    let field = FirstOrder(&g);
    run_on_staircase(&field, table, scheme, (h0, 0.0), t_end, dtau, |_, y, _| g(y))
}

/// Second α-order system integrated with RK4 in `τ` from `(y0, z0)` at `t0`.
pub fn solve_second_order<F: PlanarField + ?Sized>(
    sys: &F,
    table: &StaircaseTable,
    y0: f64,
    z0: f64,
    t_end: f64,
    dtau: f64,
) -> Result<Trajectory> {
    solve_second_order_with(sys, table, y0, z0, t_end, dtau, Scheme::Rk4)
}

pub fn solve_second_order_with<F: PlanarField + ?Sized>(
    sys: &F,
    table: &StaircaseTable,
    y0: f64,
    z0: f64,
    t_end: f64,
    dtau: f64,
    scheme: Scheme,
) -> Result<Trajectory> {
    run_on_staircase(sys, table, scheme, (y0, z0), t_end, dtau, |_, _, z| z)
}

/// Ordinary (`α = 1`, no gaps) solution: `τ = t - t0`.
///
/// Used for the classical reference curves and for stability sweeps whose
/// horizon is given directly in staircase time.
pub fn solve_classical<F: PlanarField + ?Sized>(
    field: &F,
    t0: f64,
    (y0, z0): (f64, f64),
    t_end: f64,
    dtau: f64,
    scheme: Scheme,
) -> Result<Trajectory> {
    check_dtau(dtau)?;
    if !(t_end >= t0) {
        return Err(param(format!("need t_end >= t0, got {t_end} < {t0}")));
    }
    let tau_end = t_end - t0;
    let scalar = field.state_dim() == 1;
    let mut traj = Trajectory {
        samples: Vec::with_capacity(step_count(tau_end, dtau) + 1),
        meta: TrajectoryMeta {
            scheme,
            dtau,
            depth: None,
            alpha: 1.0,
        },
    };
    let outcome = integrate(field, scheme, 0.0, tau_end, dtau, (y0, z0), |tau, y, z| {
        let z = if scalar { field.rates(tau, y, z).0 } else { z };
        traj.samples.push(Sample {
            t: t0 + tau,
            tau,
            y,
            z,
        });
        Ok(())
    })?;
    match outcome {
        Stepper::Finished => Ok(traj),
        Stepper::BlewUp(tau) => Err(Error::BlowUp {
            tau,
            partial: Box::new(traj),
        }),
    }
}

/// Inverse staircase lookup: the smallest set point `t` with `S(t) >= tau`.
pub fn warp_time(table: &StaircaseTable, tau: f64) -> Result<f64> {
    table.inverse(tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::{hausdorff_dimension, CantorSpec};
    use crate::staircase::build_staircase;
    use approx::assert_relative_eq;

    fn table(depth: u32) -> StaircaseTable {
        let alpha = hausdorff_dimension(0.2).unwrap();
        build_staircase(&CantorSpec::new(0.2, depth).unwrap(), alpha, 0.0).unwrap()
    }

    #[test]
    fn staircase_exponential() {
        let table = table(12);
        for c in [1.0, 0.5] {
            let traj = solve_first_order(|z| -z, &table, c, 1.0, 1e-3).unwrap();
            for s in &traj.samples {
                let exact = c * (-table.eval(s.t).unwrap()).exp();
                assert_relative_eq!(s.y, exact, max_relative = 1e-9);
                assert_relative_eq!(s.z, -s.y);
            }
            let last = traj.last().unwrap();
            assert_eq!(last.t, 1.0);
        }
    }

    #[test]
    fn zero_field_is_constant() {
        let traj = solve_first_order(|_| 0.0, &table(8), 0.3, 1.0, 1e-2).unwrap();
        assert!(traj.samples.iter().all(|s| s.y == 0.3));
    }

    #[test]
    fn separable_quadratic_decay() {
        let table = table(12);
        let traj = solve_first_order(|z| -z * z, &table, 1.0, 1.0, 1e-3).unwrap();
        for s in &traj.samples {
            assert_relative_eq!(s.y, 1.0 / (1.0 + s.tau), max_relative = 1e-10);
        }
    }

    #[test]
    fn samples_are_set_points_with_increasing_time() {
        let table = table(10);
        let traj = solve_first_order(|z| -z, &table, 1.0, 1.0, 1e-3).unwrap();
        assert!(traj.samples.windows(2).all(|w| w[0].t < w[1].t && w[0].tau < w[1].tau));
        assert!(traj.samples.iter().all(|s| table.set().contains(s.t)));
    }

    #[test]
    fn free_motion_is_linear_in_tau() {
        let sys = FdeSystem::new(|_| 1.0, |_| 1.0, |_, _| 0.0, |_| 0.0);
        let traj = solve_second_order(&sys, &table(10), 0.5, 2.0, 1.0, 1e-2).unwrap();
        for s in &traj.samples {
            assert_relative_eq!(s.y, 0.5 + 2.0 * s.tau, max_relative = 1e-12);
            assert_relative_eq!(s.z, 2.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn harmonic_oscillator_in_staircase_time() {
        let sys = PlanarFn(|_, y: f64, z: f64| (z, -y));
        let traj = solve_second_order(&sys, &table(12), 1.0, 0.0, 1.0, 1e-3).unwrap();
        for s in &traj.samples {
            assert!((s.y - s.tau.cos()).abs() < 1e-12);
            assert!((s.z + s.tau.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn off_set_flatness() {
        let table = table(10);
        let traj = solve_first_order(|z| -z, &table, 1.0, 1.0, 1e-3).unwrap();
        let a = traj.state_at(&table, 0.41).unwrap();
        let b = traj.state_at(&table, 0.5).unwrap();
        let c = traj.state_at(&table, 0.59).unwrap();
        assert_eq!(a, b);
        assert_eq!(b, c);
    }

    #[test]
    fn euler_is_first_order() {
        let table = table(10);
        let err = |dtau: f64| {
            let traj = solve_first_order_with(|z| -z, &table, 1.0, 1.0, dtau, Scheme::Euler).unwrap();
            let last = traj.last().unwrap();
            (last.y - (-last.tau).exp()).abs()
        };
        let ratio = err(0.01) / err(0.005);
        assert!((ratio - 2.0).abs() < 0.1, "ratio {ratio}");
    }

    #[test]
    fn blow_up_keeps_partial_trajectory() {
        let table = table(8);
        let err = solve_first_order(|z| z * z, &table, 10.0, 1.0, 1e-3).unwrap_err();
        match err {
            Error::BlowUp { tau, partial } => {
                assert!(tau < 0.11);
                assert!(!partial.is_empty());
                assert!(partial.samples.iter().all(|s| s.y.is_finite()));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let table = table(6);
        assert!(solve_first_order(|z| -z, &table, 1.0, 1.0, 0.0).is_err());
        assert!(solve_first_order(|z| -z, &table, 1.0, 1.5, 1e-2).is_err());
        assert!(warp_time(&table, -0.5).is_err());
    }

    #[test]
    fn warp_time_endpoints() {
        let table = table(8);
        assert_eq!(warp_time(&table, 0.0).unwrap(), 0.0);
        assert_eq!(warp_time(&table, table.eval(1.0).unwrap()).unwrap(), 1.0);
    }

    #[test]
    fn quadrature_and_differences() {
        assert_relative_eq!(integrate_gl(|x| x * x, 0.0, 3.0), 9.0, max_relative = 1e-14);
        assert_relative_eq!(integrate_gl(f64::cos, 0.0, 1.0), 1f64.sin(), max_relative = 1e-14);
        assert_relative_eq!(central_difference(f64::exp, 0.5), 0.5f64.exp(), max_relative = 1e-9);
    }
}
