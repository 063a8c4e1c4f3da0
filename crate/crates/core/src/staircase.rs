//! Mass function, integral staircase and γ-dimension of middle-μ sets.
//!
//! For a subdivision `Q = {t_0 < … < t_n}` the lower sum is
//!
//! ```text
//! L^α[C, Q] = Σ Γ(α + 1) (t_i - t_{i-1})^α · F(C, [t_{i-1}, t_i])
//! ```
//!
//! where the flag `F` is 1 when the subinterval meets the set. The mass
//! function `M^α(C, c1, c2)` is the fine-resolution limit of the infimum of
//! these sums, and the staircase `S^α(t)` is the signed mass between a fixed
//! anchor `t0` and `t`.
//!
//! Subdivisions anchored at the gap endpoints of one construction level are
//! the minimizing family used throughout: splitting a flagged piece only
//! increases an α-power sum, while exposing a gap removes its contribution.

use serde::{Deserialize, Serialize};

use crate::cantor::{generate, CantorSpec, Interval, IntervalSet, Location, MAX_DEPTH};
use crate::error::{param, Error, Result};

/// `Γ(α + 1)`, the weight attached to every α-power length.
pub fn gamma_factor(alpha: f64) -> f64 {
    libm::tgamma(alpha + 1.0)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(param(format!("alpha must lie in (0, 1], got {alpha}")))
    }
}

/// Flag of the closed piece `[lo, hi]`: whether its interior meets the set.
///
/// Pieces that only touch the covering at an endpoint carry no length of
/// the set and are not flagged; this is the reading under which a gap
/// `[b_i, a_{i+1}]` contributes nothing.
pub fn flag(set: &IntervalSet, lo: f64, hi: f64) -> bool {
    let ivs = set.intervals();
    let i = ivs.partition_point(|iv| iv.b <= lo);
    ivs.get(i).is_some_and(|iv| iv.a < hi)
}

/// Lower sum `L^α[C, Q]` for an explicit subdivision.
pub fn l_alpha_sum(set: &IntervalSet, alpha: f64, subdivision: &[f64]) -> Result<f64> {
    check_alpha(alpha)?;
    if subdivision.len() < 2 {
        return Err(param("a subdivision needs at least two points"));
    }
    if subdivision.iter().any(|t| !t.is_finite()) {
        return Err(param("subdivision points must be finite"));
    }
    if subdivision.windows(2).any(|w| w[0] >= w[1]) {
        return Err(param("subdivision must be strictly increasing"));
    }
    let g = gamma_factor(alpha);
    Ok(subdivision
        .windows(2)
        .filter(|w| flag(set, w[0], w[1]))
        .map(|w| g * (w[1] - w[0]).powf(alpha))
        .sum())
}

/// Approximation of `M^α_δ(C, c1, c2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassEstimate {
    pub alpha: f64,
    pub delta: f64,
    /// Construction level whose gap endpoints anchor the subdivision.
    pub level: u32,
    pub value: f64,
}

/// Lengths of the level-`m` intervals clipped to a window, grouped as a count
/// of whole intervals plus the clipped leftovers. Evaluating the α-sum from
/// this profile is `O(1 + partials)` per α.
#[derive(Debug, Clone)]
struct MassProfile {
    level: u32,
    full_count: u64,
    full_len: f64,
    partials: Vec<f64>,
}

impl MassProfile {
    fn build(spec: &CantorSpec, level: u32, c1: f64, c2: f64) -> Self {
        let mut profile = MassProfile {
            level,
            full_count: 0,
            full_len: spec.interval_length_at(level),
            partials: Vec::new(),
        };
        profile.visit(spec, spec.origin(), spec.extent(), 0, c1, c2);
        profile
    }

    fn visit(&mut self, spec: &CantorSpec, a: f64, b: f64, depth: u32, c1: f64, c2: f64) {
        if b <= c1 || a >= c2 {
            return;
        }
        if c1 <= a && b <= c2 {
            self.full_count += 1u64 << (self.level - depth);
            return;
        }
        if depth == self.level {
            let len = b.min(c2) - a.max(c1);
            if len > 0.0 {
                self.partials.push(len);
            }
            return;
        }
        let len = spec.interval_length_at(depth + 1);
        self.visit(spec, a, a + len, depth + 1, c1, c2);
        self.visit(spec, b - len, b, depth + 1, c1, c2);
    }

    fn sum(&self, alpha: f64) -> f64 {
        let whole = if self.full_count > 0 {
            self.full_count as f64 * self.full_len.powf(alpha)
        } else {
            0.0
        };
        gamma_factor(alpha) * (whole + self.partials.iter().map(|p| p.powf(alpha)).sum::<f64>())
    }
}

/// Coarsest construction level whose intervals are no longer than `delta`.
pub fn level_for_resolution(spec: &CantorSpec, delta: f64) -> Result<u32> {
    if !(delta > 0.0) {
        return Err(param(format!("delta must be positive, got {delta}")));
    }
    (0..=MAX_DEPTH)
        .find(|&m| spec.interval_length_at(m) <= delta * (1.0 + 1e-12))
        .ok_or_else(|| {
            Error::Resolution(format!(
                "delta = {delta} is finer than the depth-{MAX_DEPTH} interval length {}",
                spec.interval_length_at(MAX_DEPTH)
            ))
        })
}

/// `M^α_δ(C, c1, c2)` from the subdivision anchored at the gap endpoints of
/// the coarsest level finer than `delta`, restricted to `[c1, c2]`.
///
/// Only `mu` and the base interval of `spec` are used; the level is chosen
/// from `delta`.
pub fn estimate_mass(
    spec: &CantorSpec,
    alpha: f64,
    c1: f64,
    c2: f64,
    delta: f64,
) -> Result<MassEstimate> {
    check_alpha(alpha)?;
    if !(c1 < c2) {
        return Err(param(format!("need c1 < c2, got [{c1}, {c2}]")));
    }
    let level = level_for_resolution(spec, delta)?;
    let value = MassProfile::build(spec, level, c1, c2).sum(alpha);
    Ok(MassEstimate {
        alpha,
        delta,
        level,
        value,
    })
}

/// Mass of the whole depth-`m` covering at order `alpha`.
pub fn total_mass(spec: &CantorSpec, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(MassProfile::build(spec, spec.depth(), spec.origin(), spec.extent()).sum(alpha))
}

/// Precomputed integral staircase `S^α(t)` of a depth-`m` covering.
///
/// Every interval of the covering carries the same mass `Γ(α+1) ℓ_m^α`, so
/// the cumulative mass at the endpoints of interval `i` is `i·w` and
/// `(i+1)·w`. Inside an interval the staircase is interpolated linearly;
/// across a gap it is constant.
#[derive(Debug, Clone)]
pub struct StaircaseTable {
    alpha: f64,
    spec: CantorSpec,
    set: IntervalSet,
    gamma_factor: f64,
    mass_per_interval: f64,
    t0: f64,
    offset: f64,
}

/// Tabulates `S^α` for the covering described by `spec`, anchored at `t0`.
pub fn build_staircase(spec: &CantorSpec, alpha: f64, t0: f64) -> Result<StaircaseTable> {
    check_alpha(alpha)?;
    if !(spec.origin() <= t0 && t0 <= spec.extent()) {
        return Err(Error::Domain {
            value: t0,
            lo: spec.origin(),
            hi: spec.extent(),
        });
    }
    let set = generate(spec);
    let gamma_factor = gamma_factor(alpha);
    let mass_per_interval = gamma_factor * spec.interval_length().powf(alpha);
    let mut table = StaircaseTable {
        alpha,
        spec: *spec,
        set,
        gamma_factor,
        mass_per_interval,
        t0,
        offset: 0.0,
    };
    table.offset = table.cumulative(t0);
    Ok(table)
}

impl StaircaseTable {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn spec(&self) -> &CantorSpec {
        &self.spec
    }

    pub fn set(&self) -> &IntervalSet {
        &self.set
    }

    pub fn gamma_factor(&self) -> f64 {
        self.gamma_factor
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Mass `Γ(α+1) ℓ_m^α` carried by each interval of the covering.
    pub fn mass_per_interval(&self) -> f64 {
        self.mass_per_interval
    }

    /// `[origin, extent]` of the base interval.
    pub fn span(&self) -> (f64, f64) {
        (self.spec.origin(), self.spec.extent())
    }

    /// Staircase values at the two ends of the base interval.
    pub fn range(&self) -> (f64, f64) {
        (-self.offset, self.set.len() as f64 * self.mass_per_interval - self.offset)
    }

    /// Mass from the origin to `t` (no anchor shift).
    fn cumulative(&self, t: f64) -> f64 {
        let ivs = self.set.intervals();
        match self.set.locate(t) {
            Location::Inside(i) => {
                let iv = ivs[i];
                let frac = if iv.b > iv.a { (t - iv.a) / (iv.b - iv.a) } else { 1.0 };
                (i as f64 + frac) * self.mass_per_interval
            }
            Location::GapBefore(i) => i as f64 * self.mass_per_interval,
            Location::Outside if t < self.spec.origin() => 0.0,
            Location::Outside => ivs.len() as f64 * self.mass_per_interval,
        }
    }

    /// `S^α(t)`; exact at interval endpoints, flat on gaps.
    pub fn eval(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.span();
        if !(lo <= t && t <= hi) {
            return Err(Error::Domain { value: t, lo, hi });
        }
        Ok(self.cumulative(t) - self.offset)
    }

    /// Smallest set point `t` with `S^α(t) >= tau`.
    pub fn inverse(&self, tau: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(lo <= tau && tau <= hi) {
            return Err(Error::Domain { value: tau, lo, hi });
        }
        let ivs = self.set.intervals();
        let target = tau + self.offset;
        if target <= 0.0 {
            return Ok(ivs[0].a);
        }
        let w = self.mass_per_interval;
        let mut k = target / w;
        // a target on a plateau level must land on the left end of the gap
        if (k - k.round()).abs() <= 1e-12 * k.max(1.0) {
            k = k.round();
        }
        let i = ((k.ceil() as usize).max(1) - 1).min(ivs.len() - 1);
        let frac = ((target - i as f64 * w) / w).clamp(0.0, 1.0);
        let iv = ivs[i];
        Ok(if frac >= 1.0 { iv.b } else { iv.a + frac * iv.len() })
    }

    /// `χ(α, t)`: `1/Γ(α+1)` on the covering, 0 elsewhere.
    pub fn characteristic(&self, t: f64) -> f64 {
        characteristic(&self.set, self.alpha, t)
    }

    /// `(t, S(t))` at every interval endpoint, in increasing `t`.
    ///
    /// Consecutive breakpoints that bound a gap carry equal `s`.
    pub fn breakpoints(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let w = self.mass_per_interval;
        let off = self.offset;
        self.set.intervals().iter().enumerate().flat_map(move |(i, iv)| {
            [(iv.a, i as f64 * w - off), (iv.b, (i + 1) as f64 * w - off)]
        })
    }
}

/// `S^α(t)` looked up in a table.
pub fn eval_staircase(table: &StaircaseTable, t: f64) -> Result<f64> {
    table.eval(t)
}

/// `χ(α, t)` for a covering: `1/Γ(α+1)` on the set, 0 otherwise.
pub fn characteristic(set: &IntervalSet, alpha: f64, t: f64) -> f64 {
    if set.contains(t) {
        1.0 / gamma_factor(alpha)
    } else {
        0.0
    }
}

/// Outcome of the two-resolution mass-ratio search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    /// α at which `M_δ2 / M_δ1` crosses 1.
    pub alpha: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub level1: u32,
    pub level2: u32,
    /// `(alpha, ratio)` on the supplied grid.
    pub curve: Vec<(f64, f64)>,
}

/// `0.01, 0.02, …, 1.00`.
pub fn default_alpha_grid() -> Vec<f64> {
    (1..=100).map(|i| i as f64 / 100.0).collect()
}

/// γ-dimension estimate from the ratio `M^α_δ2 / M^α_δ1` (`δ2 < δ1`) over
/// the whole base interval.
///
/// Below the dimension the finer mass outgrows the coarser one (ratio > 1),
/// above it the finer mass collapses (ratio < 1). The first sign change of
/// `ratio - 1` on the grid is refined by bisection.
pub fn gamma_dimension(
    spec: &CantorSpec,
    delta1: f64,
    delta2: f64,
    alphas: &[f64],
) -> Result<DimensionEstimate> {
    if !(delta2 < delta1) {
        return Err(param(format!("need delta2 < delta1, got {delta2} >= {delta1}")));
    }
    if alphas.len() < 2 {
        return Err(param("alpha grid needs at least two points"));
    }
    for &a in alphas {
        check_alpha(a)?;
    }
    if alphas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(param("alpha grid must be strictly increasing"));
    }
    let level1 = level_for_resolution(spec, delta1)?;
    let level2 = level_for_resolution(spec, delta2)?;
    if level1 == level2 {
        return Err(Error::Resolution(format!(
            "delta1 = {delta1} and delta2 = {delta2} select the same level {level1}"
        )));
    }
    let coarse = MassProfile::build(spec, level1, spec.origin(), spec.extent());
    let fine = MassProfile::build(spec, level2, spec.origin(), spec.extent());
    let log_ratio = |a: f64| (fine.sum(a) / coarse.sum(a)).ln();

    let curve: Vec<(f64, f64)> = alphas.iter().map(|&a| (a, log_ratio(a).exp())).collect();
    let bracket = alphas.windows(2).find(|w| {
        let (l0, l1) = (log_ratio(w[0]), log_ratio(w[1]));
        l0 == 0.0 || l1 == 0.0 || (l0 > 0.0) != (l1 > 0.0)
    });
    let Some(w) = bracket else {
        return Err(Error::Estimation { curve });
    };
    let (mut lo, mut hi) = (w[0], w[1]);
    let lo_sign = log_ratio(lo) > 0.0;
    if log_ratio(lo) == 0.0 {
        hi = lo;
    } else if log_ratio(hi) == 0.0 {
        lo = hi;
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        let lm = log_ratio(mid);
        if lm == 0.0 {
            lo = mid;
            hi = mid;
        } else if (lm > 0.0) == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(DimensionEstimate {
        alpha: 0.5 * (lo + hi),
        delta1,
        delta2,
        level1,
        level2,
        curve,
    })
}

/// Clips the depth-`m` intervals to `[c1, c2]`; handy for tests and export.
pub fn clipped_intervals(set: &IntervalSet, c1: f64, c2: f64) -> Vec<Interval> {
    set.intervals()
        .iter()
        .filter_map(|iv| {
            let a = iv.a.max(c1);
            let b = iv.b.min(c2);
            (b > a).then_some(Interval { a, b })
        })
        .collect()
}
