//! Fractal derivative and integral with respect to the staircase.
//!
//! Functions live on the endpoints of the depth-`m` covering. Differences are
//! taken against staircase increments `S(t') - S(t)` instead of `t' - t`, so
//! for `g = φ ∘ S` the derivative approaches `φ'(S(t))` and the integral of
//! `D^α g` telescopes back to `g(b) - g(a)`.

use crate::error::{param, Error, Result};
use crate::staircase::StaircaseTable;

/// Samples of a function at set points, paired with their staircase values.
#[derive(Debug, Clone)]
pub struct GridFunction<'a> {
    table: &'a StaircaseTable,
    t: Vec<f64>,
    s: Vec<f64>,
    values: Vec<f64>,
}

impl<'a> GridFunction<'a> {
    /// Samples `f(t, S(t))` at every interval endpoint of the covering.
    pub fn sample(table: &'a StaircaseTable, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = 2 * table.set().len();
        let mut g = GridFunction {
            table,
            t: Vec::with_capacity(n),
            s: Vec::with_capacity(n),
            values: Vec::with_capacity(n),
        };
        for (t, s) in table.breakpoints() {
            g.t.push(t);
            g.s.push(s);
            g.values.push(f(t, s));
        }
        g
    }

    /// Explicit `(t, value)` samples; every `t` must lie in the covering and
    /// the times must be strictly increasing.
    pub fn new(table: &'a StaircaseTable, samples: &[(f64, f64)]) -> Result<Self> {
        if samples.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(param("sample times must be strictly increasing"));
        }
        let mut g = GridFunction {
            table,
            t: Vec::with_capacity(samples.len()),
            s: Vec::with_capacity(samples.len()),
            values: Vec::with_capacity(samples.len()),
        };
        for &(t, v) in samples {
            if !table.set().contains(t) {
                return Err(param(format!("sample time {t} is not in the set")));
            }
            g.t.push(t);
            g.s.push(table.eval(t)?);
            g.values.push(v);
        }
        Ok(g)
    }

    pub fn table(&self) -> &StaircaseTable {
        self.table
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.t.iter().copied().zip(self.values.iter().copied())
    }

    /// Pointwise linear combination `a·self + b·other` on a shared grid.
    pub fn combine(&self, a: f64, other: &GridFunction<'_>, b: f64) -> Result<GridFunction<'a>> {
        if self.t != other.t {
            return Err(param("grid functions are sampled on different grids"));
        }
        Ok(GridFunction {
            table: self.table,
            t: self.t.clone(),
            s: self.s.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }

    fn derivative_at_index(&self, i: usize) -> Result<f64> {
        let s = &self.s;
        // nearest samples with a strictly different staircase value; the two
        // ends of a gap share one value and are skipped over
        let lo = (0..i).rev().find(|&j| s[j] < s[i]);
        let hi = (i + 1..s.len()).find(|&j| s[j] > s[i]);
        let v = &self.values;
        match (lo, hi) {
            (Some(l), Some(h)) => Ok((v[h] - v[l]) / (s[h] - s[l])),
            (Some(l), None) => Ok((v[i] - v[l]) / (s[i] - s[l])),
            (None, Some(h)) => Ok((v[h] - v[i]) / (s[h] - s[i])),
            (None, None) => Err(Error::Resolution(format!(
                "sample at t = {} has no neighbour with a different staircase value",
                self.t[i]
            ))),
        }
    }
}

/// `D^α f(t)`; 0 off the set, a staircase difference quotient on it.
///
/// The stencil is centred in `S` between the nearest samples on either side
/// and one-sided at the extreme samples. `t` must be one of the sample times
/// when it lies in the set.
pub fn fractal_derivative(f: &GridFunction<'_>, t: f64) -> Result<f64> {
    if !f.table.set().contains(t) {
        return Ok(0.0);
    }
    let i = f
        .t
        .binary_search_by(|x| x.total_cmp(&t))
        .map_err(|_| param(format!("t = {t} is not a sample point")))?;
    f.derivative_at_index(i)
}

/// `D^α f` at every sample.
pub fn derivative_grid<'a>(f: &GridFunction<'a>) -> Result<GridFunction<'a>> {
    let values = (0..f.len()).map(|i| f.derivative_at_index(i)).collect::<Result<Vec<_>>>()?;
    Ok(GridFunction {
        table: f.table,
        t: f.t.clone(),
        s: f.s.clone(),
        values,
    })
}

/// `∫_a^b f d^α t ≈ Σ f(t_{j-1}) (S(t_j) - S(t_{j-1}))` over the samples in
/// `[a, b]`.
///
/// A window that carries no staircase increment (for instance one lying in
/// a gap) integrates to 0 without needing samples.
pub fn fractal_integral(f: &GridFunction<'_>, a: f64, b: f64) -> Result<f64> {
    if !(a < b) {
        return Err(param(format!("need a < b, got [{a}, {b}]")));
    }
    let table = f.table;
    if table.eval(b)? - table.eval(a)? == 0.0 {
        return Ok(0.0);
    }
    let lo = f.t.partition_point(|&x| x < a);
    let hi = f.t.partition_point(|&x| x <= b);
    if hi < lo + 2 {
        return Err(Error::Resolution(format!(
            "fewer than two samples in [{a}, {b}]"
        )));
    }
    Ok((lo + 1..hi)
        .map(|j| f.values[j - 1] * (f.s[j] - f.s[j - 1]))
        .sum())
}

/// Running integral `t ↦ ∫_{t_first}^t f d^α t` at every sample.
pub fn cumulative_integral(f: &GridFunction<'_>) -> Vec<(f64, f64)> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(f.len());
    for j in 0..f.len() {
        if j > 0 {
            acc += f.values[j - 1] * (f.s[j] - f.s[j - 1]);
        }
        out.push((f.t[j], acc));
    }
    out
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
    fn derivative_of_staircase_is_one() {
        let table = table(6);
        let f = GridFunction::sample(&table, |_, s| s);
        for &t in f.times() {
            assert_relative_eq!(fractal_derivative(&f, t).unwrap(), 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let table = table(6);
        let f = GridFunction::sample(&table, |_, _| 4.2);
        for &t in f.times() {
            assert_eq!(fractal_derivative(&f, t).unwrap(), 0.0);
        }
    }

    #[test]
    fn derivative_off_set_is_zero() {
        let table = table(6);
        let f = GridFunction::sample(&table, |_, s| s * s);
        assert_eq!(fractal_derivative(&f, 0.5).unwrap(), 0.0);
        // in the set but not a sample
        let inner = table.set().intervals()[0];
        assert!(fractal_derivative(&f, 0.5 * (inner.a + inner.b)).is_err());
    }

    #[test]
    fn derivative_of_staircase_exponential() {
        let table = table(12);
        let f = GridFunction::sample(&table, |_, s| (-s).exp());
        let ds = 2.0 * table.mass_per_interval();
        for (i, &t) in f.times().iter().enumerate().step_by(97) {
            if i == 0 || i + 1 == f.len() {
                continue;
            }
            let s = table.eval(t).unwrap();
            let d = fractal_derivative(&f, t).unwrap();
            // centred stencil of half-width ds/2: error below ds^2 · max|φ'''|
            assert!((d + (-s).exp()).abs() <= ds * ds, "t={t} d={d}");
        }
    }

    #[test]
    fn isolated_sample_is_a_resolution_error() {
        let table = table(2);
        let f = GridFunction::new(&table, &[(0.0, 1.0)]).unwrap();
        assert!(matches!(fractal_derivative(&f, 0.0), Err(Error::Resolution(_))));
    }

    #[test]
    fn explicit_samples_must_be_set_points() {
        let table = table(2);
        assert!(GridFunction::new(&table, &[(0.5, 1.0)]).is_err());
        assert!(GridFunction::new(&table, &[(0.4, 1.0), (0.0, 1.0)]).is_err());
    }

    #[test]
    fn integral_of_one_telescopes() {
        let table = table(8);
        let one = GridFunction::sample(&table, |_, _| 1.0);
        let zero = GridFunction::sample(&table, |_, _| 0.0);
        for (a, b) in [(0.0, 1.0), (0.0, 0.4), (0.1, 0.9)] {
            let want = table.eval(b).unwrap() - table.eval(a).unwrap();
            let got = fractal_integral(&one, a, b).unwrap();
            // endpoints strictly inside an interval snap inward to the samples
            assert!((got - want).abs() <= 2.0 * table.mass_per_interval());
            assert_eq!(fractal_integral(&zero, a, b).unwrap(), 0.0);
        }
        assert_relative_eq!(
            fractal_integral(&one, 0.0, 1.0).unwrap(),
            table.eval(1.0).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn integral_over_a_gap_is_zero() {
        let table = table(8);
        let f = GridFunction::sample(&table, |t, _| 1.0 + t);
        assert_eq!(fractal_integral(&f, 0.45, 0.55).unwrap(), 0.0);
        assert!(fractal_integral(&f, 0.55, 0.45).is_err());
    }

    #[test]
    fn linearity() {
        let table = table(8);
        let f = GridFunction::sample(&table, |_, s| s.sin());
        let g = GridFunction::sample(&table, |t, _| t * t);
        let h = f.combine(2.0, &g, -3.0).unwrap();
        let lhs = fractal_integral(&h, 0.0, 1.0).unwrap();
        let rhs = 2.0 * fractal_integral(&f, 0.0, 1.0).unwrap() - 3.0 * fractal_integral(&g, 0.0, 1.0).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
        for &t in f.times().iter().step_by(31) {
            let d = fractal_derivative(&h, t).unwrap();
            let want = 2.0 * fractal_derivative(&f, t).unwrap() - 3.0 * fractal_derivative(&g, t).unwrap();
            assert_relative_eq!(d, want, max_relative = 1e-9, epsilon = 1e-9);
        }
    }

    #[test]
    fn cumulative_matches_integral() {
        let table = table(6);
        let f = GridFunction::sample(&table, |_, s| s);
        let run = cumulative_integral(&f);
        assert_eq!(run[0].1, 0.0);
        assert_relative_eq!(
            run.last().unwrap().1,
            fractal_integral(&f, 0.0, 1.0).unwrap(),
            max_relative = 1e-12
        );
    }
}
