//! Finite-depth middle-μ Cantor sets.
//!
//! Starting from a base interval `I = [origin, extent]`, every construction
//! step removes the open middle fraction `μ` of each surviving closed
//! interval. After `m` steps the covering `C_m` consists of `2^m` closed
//! intervals, each of length `((1 - μ) / 2)^m · |I|`, and has Lebesgue
//! measure `(1 - μ)^m · |I|`.
//!
//! ```
//! use fractal_calc::cantor::{generate, CantorSpec};
//!
//! let set = generate(&CantorSpec::new(0.2, 1).unwrap());
//! assert_eq!(set.len(), 2);
//! assert!(set.contains(0.4));
//! assert!(!set.contains(0.5));
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

/// Deepest construction level accepted by [`CantorSpec`].
///
/// A depth-24 covering already holds 16.7M intervals (about 270 MB of
/// endpoints); deeper levels are not practical in memory.
pub const MAX_DEPTH: u32 = 24;

/// Generator parameters of a middle-μ Cantor set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CantorSpec {
    mu: f64,
    depth: u32,
    origin: f64,
    extent: f64,
}

impl CantorSpec {
    /// Middle-μ set on the unit interval.
    pub fn new(mu: f64, depth: u32) -> Result<Self> {
        Self::with_interval(mu, depth, 0.0, 1.0)
    }

    pub fn with_interval(mu: f64, depth: u32, origin: f64, extent: f64) -> Result<Self> {
        if !(mu > 0.0 && mu < 1.0) {
            return Err(param(format!("mu must lie in (0, 1), got {mu}")));
        }
        if depth > MAX_DEPTH {
            return Err(param(format!("depth {depth} exceeds the cap {MAX_DEPTH}")));
        }
        if !(origin.is_finite() && extent.is_finite() && origin < extent) {
            return Err(param(format!(
                "base interval needs origin < extent, got [{origin}, {extent}]"
            )));
        }
        Ok(Self {
            mu,
            depth,
            origin,
            extent,
        })
    }

    /// Same generator at a different construction depth.
    pub fn at_depth(&self, depth: u32) -> Result<Self> {
        Self::with_interval(self.mu, depth, self.origin, self.extent)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn width(&self) -> f64 {
        self.extent - self.origin
    }

    /// Scale factor `(1 - μ) / 2` of each child interval.
    pub fn ratio(&self) -> f64 {
        0.5 * (1.0 - self.mu)
    }

    /// Length of one interval at construction level `level`.
    pub fn interval_length_at(&self, level: u32) -> f64 {
        self.width() * self.ratio().powi(level as i32)
    }

    /// Length of one interval of the depth-`m` covering.
    pub fn interval_length(&self) -> f64 {
        self.interval_length_at(self.depth)
    }

    /// Closed-form dimension `log 2 / (log 2 - log(1 - μ))`.
    pub fn dimension(&self) -> f64 {
        dimension_of(self.mu)
    }
}

/// Closed interval `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    pub fn is_empty(&self) -> bool {
        self.b < self.a
    }

    pub fn contains(&self, t: f64) -> bool {
        self.a <= t && t <= self.b
    }
}

/// Where a point falls relative to an [`IntervalSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    /// Inside (or on an endpoint of) interval `i`.
    Inside(usize),
    /// In the open gap just before interval `i`.
    GapBefore(usize),
    /// Below the first or above the last interval.
    Outside,
}

/// Sorted, pairwise disjoint closed intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
    /// Common length of every interval when known from the construction.
    /// Rounded endpoints only resolve a depth-20 length to ~1e-8 relative.
    #[serde(skip)]
    uniform_length: Option<f64>,
}

impl IntervalSet {
    /// Validates ordering and disjointness.
    pub fn new(intervals: Vec<Interval>) -> Result<Self> {
        for iv in &intervals {
            if !(iv.a.is_finite() && iv.b.is_finite() && iv.a <= iv.b) {
                return Err(param(format!("malformed interval [{}, {}]", iv.a, iv.b)));
            }
        }
        for pair in intervals.windows(2) {
            if pair[0].b >= pair[1].a {
                return Err(param(format!(
                    "intervals [{}, {}] and [{}, {}] are not strictly ordered",
                    pair[0].a, pair[0].b, pair[1].a, pair[1].b
                )));
            }
        }
        Ok(Self {
            intervals,
            uniform_length: None,
        })
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Smallest closed interval holding the whole set.
    pub fn hull(&self) -> Option<Interval> {
        Some(Interval {
            a: self.intervals.first()?.a,
            b: self.intervals.last()?.b,
        })
    }

    pub fn locate(&self, t: f64) -> Location {
        let i = self.intervals.partition_point(|iv| iv.b < t);
        match self.intervals.get(i) {
            Some(iv) if iv.a <= t => Location::Inside(i),
            Some(_) if i > 0 => Location::GapBefore(i),
            _ => Location::Outside,
        }
    }

    /// Membership in the closed covering; endpoints count as members.
    pub fn contains(&self, t: f64) -> bool {
        matches!(self.locate(t), Location::Inside(_))
    }

    /// Total length `Σ (b - a)`.
    pub fn covering_measure(&self) -> f64 {
        if let Some(len) = self.uniform_length {
            return self.intervals.len() as f64 * len;
        }
        // Neumaier summation: depth-20 sets add a million tiny lengths.
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for iv in &self.intervals {
            let x = iv.len();
            let t = sum + x;
            if sum.abs() >= x.abs() {
                comp += (sum - t) + x;
            } else {
                comp += (x - t) + sum;
            }
            sum = t;
        }
        sum + comp
    }
}

/// Builds the depth-`m` covering by recursive replacement of each `[a, b]`
/// with its outer pieces `[a, a + r(b - a)]` and `[b - r(b - a), b]`.
pub fn generate(spec: &CantorSpec) -> IntervalSet {
    let mut current = vec![Interval {
        a: spec.origin,
        b: spec.extent,
    }];
    for level in 1..=spec.depth {
        // Child lengths come from the closed form so every interval at a
        // level shares one length; endpoints of the parent are kept verbatim.
        let len = spec.interval_length_at(level);
        let mut next = Vec::with_capacity(current.len() * 2);
        for iv in &current {
            next.push(Interval { a: iv.a, b: iv.a + len });
            next.push(Interval { a: iv.b - len, b: iv.b });
        }
        current = next;
    }
    IntervalSet {
        intervals: current,
        uniform_length: Some(spec.interval_length()),
    }
}

/// `generate` for every level `0..=spec.depth()`.
pub fn generate_levels(spec: &CantorSpec) -> Vec<IntervalSet> {
    (0..=spec.depth)
        .map(|d| generate(&spec.at_depth(d).expect("depth below the cap")))
        .collect()
}

/// Lebesgue measure of the depth-`m` covering, `Σ (b - a)`.
pub fn covering_measure(set: &IntervalSet) -> f64 {
    set.covering_measure()
}

/// Hausdorff dimension `log 2 / (log 2 - log(1 - μ))` of the middle-μ set.
pub fn hausdorff_dimension(mu: f64) -> Result<f64> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(param(format!("mu must lie in (0, 1), got {mu}")));
    }
    Ok(dimension_of(mu))
}

fn dimension_of(mu: f64) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    ln2 / (ln2 - (-mu).ln_1p())
}
