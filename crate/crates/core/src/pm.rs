//! Piecewise-linear piecewise-monotone self-maps of a compact interval.
//!
//! A [`PmFunction`] is stored as breakpoints `(xs[i], ys[i])` with linear
//! interpolation in between. Consecutive ordinates always differ, so every
//! linear piece is strictly monotone and forts (turning points) are exactly
//! the interior breakpoints where the sign of the slope flips.
//!
//! Laps are numbered from the left: lap `i` is `[c_i, c_{i+1}]` where
//! `c_0 = a`, `c_1 < ... < c_v` are the forts and `c_{v+1} = b`.

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default cap on the number of breakpoints a composition may produce.
pub const DEFAULT_BREAKPOINT_BUDGET: usize = 1_000_000;

/// Default number of iterates examined when computing the height.
pub const DEFAULT_HEIGHT_CAP: usize = 32;

/// Slack used when testing `F^m(I) ⊆ K(F^m)` on computed iterates.
pub const INCLUSION_TOL: f64 = 1e-12;

/// Raw input form, one function per JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PmInput {
    pub domain: [f64; 2],
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FortList {
    pub positions: Vec<f64>,
    /// Breakpoint index of each fort.
    pub indices: Vec<usize>,
}

impl FortList {
    pub fn count(&self) -> usize {
        self.positions.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PmFunction {
    a: f64,
    b: f64,
    xs: Vec<f64>,
    ys: Vec<f64>,
    forts: FortList,
    /// Breakpoint indices of `c_0, ..., c_{v+1}`.
    lap_bounds: Vec<usize>,
}

impl PmFunction {
    /// Validates raw breakpoint data.
    pub fn new(domain: (f64, f64), xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let (a, b) = domain;
        if xs.is_empty() || xs.len() != ys.len() {
            return Err(Error::MalformedInput { xs: xs.len(), ys: ys.len() });
        }
        if !(a.is_finite() && b.is_finite() && a < b) || xs.len() < 2 {
            return Err(Error::InvalidDomain { a, b });
        }
        if xs[0] != a || xs[xs.len() - 1] != b {
            return Err(Error::InvalidDomain { a, b });
        }
        for i in 1..xs.len() {
            if !(xs[i - 1] < xs[i]) {
                return Err(Error::UnsortedAbscissae { index: i });
            }
        }
        for (&x, &y) in xs.iter().zip(&ys) {
            if !(y >= a && y <= b) {
                return Err(Error::NonSelfMap { x, value: y, a, b });
            }
        }
        for i in 1..ys.len() {
            if ys[i - 1] == ys[i] {
                return Err(Error::FlatSegment { x0: xs[i - 1], x1: xs[i] });
            }
        }
        Ok(Self::from_checked(a, b, xs, ys))
    }

    pub fn from_input(input: &PmInput) -> Result<Self> {
        Self::new((input.domain[0], input.domain[1]), input.xs.clone(), input.ys.clone())
    }

    pub fn identity(a: f64, b: f64) -> Self {
        Self::from_checked(a, b, vec![a, b], vec![a, b])
    }

    fn from_checked(a: f64, b: f64, xs: Vec<f64>, ys: Vec<f64>) -> Self {
        let mut indices = Vec::new();
        for i in 1..xs.len() - 1 {
            let left = ys[i] > ys[i - 1];
            let right = ys[i + 1] > ys[i];
            if left != right {
                indices.push(i);
            }
        }
        let positions = indices.iter().map(|&i| xs[i]).collect();
        let mut lap_bounds = Vec::with_capacity(indices.len() + 2);
        lap_bounds.push(0);
        lap_bounds.extend(indices.iter().copied());
        lap_bounds.push(xs.len() - 1);
        PmFunction { a, b, xs, ys, forts: FortList { positions, indices }, lap_bounds }
    }

    pub fn to_input(&self) -> PmInput {
        PmInput { domain: [self.a, self.b], xs: self.xs.clone(), ys: self.ys.clone() }
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn forts(&self) -> &FortList {
        &self.forts
    }

    /// N(F).
    pub fn fort_count(&self) -> usize {
        self.forts.count()
    }

    pub fn lap_count(&self) -> usize {
        self.lap_bounds.len() - 1
    }

    /// `c_0, c_1, ..., c_{v+1}`.
    pub fn lap_endpoints(&self) -> Vec<f64> {
        self.lap_bounds.iter().map(|&i| self.xs[i]).collect()
    }

    /// `c_i`.
    pub fn c(&self, i: usize) -> f64 {
        self.xs[self.lap_bounds[i]]
    }

    /// `F(c_i)`.
    pub fn fc(&self, i: usize) -> f64 {
        self.ys[self.lap_bounds[i]]
    }

    pub fn lap(&self, lap: usize) -> (f64, f64) {
        (self.c(lap), self.c(lap + 1))
    }

    /// Breakpoint index range `[start, end]` of a lap.
    pub fn lap_breakpoints(&self, lap: usize) -> (usize, usize) {
        (self.lap_bounds[lap], self.lap_bounds[lap + 1])
    }

    pub fn lap_increasing(&self, lap: usize) -> bool {
        let (s, e) = self.lap_breakpoints(lap);
        self.ys[e] > self.ys[s]
    }

    /// `F([c_i, c_{i+1}])` as `(min, max)`.
    pub fn lap_image(&self, lap: usize) -> (f64, f64) {
        let (y0, y1) = (self.fc(lap), self.fc(lap + 1));
        (y0.min(y1), y0.max(y1))
    }

    /// Index of the lap containing `x`; points on a fort belong to the lap on the right.
    pub fn lap_index_at(&self, x: f64) -> usize {
        let ends = &self.forts.positions;
        ends.partition_point(|&c| c <= x)
    }

    /// `(min F, max F)` over the domain.
    pub fn range(&self) -> (f64, f64) {
        self.ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| (lo.min(y), hi.max(y)))
    }

    pub fn max_on(&self, from_lap_point: usize, to_lap_point: usize) -> f64 {
        let (s, e) = (self.lap_bounds[from_lap_point], self.lap_bounds[to_lap_point]);
        self.ys[s..=e].iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_on(&self, from_lap_point: usize, to_lap_point: usize) -> f64 {
        let (s, e) = (self.lap_bounds[from_lap_point], self.lap_bounds[to_lap_point]);
        self.ys[s..=e].iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x >= self.a && x <= self.b) {
            return Err(Error::OutOfDomain { x, a: self.a, b: self.b });
        }
        Ok(self.value_at(x))
    }

    /// Evaluation with `x` clamped into the domain.
    pub fn value_at(&self, x: f64) -> f64 {
        let x = x.clamp(self.a, self.b);
        let i = self.xs.partition_point(|&c| c < x);
        if i < self.xs.len() && self.xs[i] == x {
            return self.ys[i];
        }
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let (y0, y1) = (self.ys[i - 1], self.ys[i]);
        y0 + (x - x0) * (y1 - y0) / (x1 - x0)
    }

    /// The unique `x` in lap `lap` with `F(x) = y`.
    pub fn lap_inverse_eval(&self, lap: usize, y: f64) -> Result<f64> {
        let (lo, hi) = self.lap_image(lap);
        if !(y >= lo && y <= hi) {
            return Err(Error::OutOfLapRange { lap, y, lo, hi });
        }
        Ok(self.lap_inverse_clamped(lap, y))
    }

    /// Lap inverse with `y` saturated to the lap image.
    pub fn lap_inverse_clamped(&self, lap: usize, y: f64) -> f64 {
        let (lo, hi) = self.lap_image(lap);
        let y = y.clamp(lo, hi);
        let (s, e) = self.lap_breakpoints(lap);
        let ys = &self.ys[s..=e];
        let inc = ys[ys.len() - 1] > ys[0];
        let j = if inc { ys.partition_point(|&v| v < y) } else { ys.partition_point(|&v| v > y) };
        if j < ys.len() && ys[j] == y {
            return self.xs[s + j];
        }
        let (x0, x1) = (self.xs[s + j - 1], self.xs[s + j]);
        let (y0, y1) = (ys[j - 1], ys[j]);
        x0 + (y - y0) * (x1 - x0) / (y1 - y0)
    }

    /// `φ⁻¹ ∘ F ∘ φ` with `φ(x) = a + b − x`.
    pub fn mirror_conjugate(&self) -> PmFunction {
        let s = self.a + self.b;
        let xs: Vec<f64> = self.xs.iter().rev().map(|&x| s - x).collect();
        let ys: Vec<f64> = self.ys.iter().rev().map(|&y| (s - y).clamp(self.a, self.b)).collect();
        // pin the endpoints exactly
        let mut xs = xs;
        let n = xs.len();
        xs[0] = self.a;
        xs[n - 1] = self.b;
        Self::from_checked(self.a, self.b, xs, ys)
    }
}

impl Serialize for PmFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_input().serialize(serializer)
    }
}

/// Exact piecewise-linear composite `outer ∘ inner`.
pub fn compose(outer: &PmFunction, inner: &PmFunction) -> Result<PmFunction> {
    compose_with_budget(outer, inner, DEFAULT_BREAKPOINT_BUDGET)
}

pub fn compose_with_budget(outer: &PmFunction, inner: &PmFunction, budget: usize) -> Result<PmFunction> {
    let (lo, hi) = inner.range();
    if lo < outer.a || hi > outer.b {
        return Err(Error::RangeMismatch { lo, hi });
    }
    let n = inner.xs.len();
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    xs.push(inner.xs[0]);
    ys.push(outer.value_at(inner.ys[0]));
    for i in 0..n - 1 {
        let (x0, x1) = (inner.xs[i], inner.xs[i + 1]);
        let (y0, y1) = (inner.ys[i], inner.ys[i + 1]);
        let (lo, hi) = (y0.min(y1), y0.max(y1));
        let start = outer.xs.partition_point(|&c| c <= lo);
        let end = outer.xs.partition_point(|&c| c < hi);
        let cross = |j: usize| x0 + (outer.xs[j] - y0) * (x1 - x0) / (y1 - y0);
        if y1 > y0 {
            for j in start..end {
                let x = cross(j);
                if x < x1 {
                    push_point(&mut xs, &mut ys, x, outer.ys[j]);
                }
            }
        } else {
            for j in (start..end).rev() {
                let x = cross(j);
                if x < x1 {
                    push_point(&mut xs, &mut ys, x, outer.ys[j]);
                }
            }
        }
        push_point(&mut xs, &mut ys, x1, outer.value_at(y1));
        if xs.len() > budget {
            return Err(Error::BudgetExceeded { breakpoints: xs.len(), budget });
        }
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::InternalInconsistency("composition collapsed to a point".into()));
    }
    xs[0] = inner.a;
    xs[n - 1] = inner.b;
    Ok(PmFunction::from_checked(inner.a, inner.b, xs, ys))
}

fn push_point(xs: &mut Vec<f64>, ys: &mut Vec<f64>, x: f64, y: f64) {
    if x <= xs[xs.len() - 1] {
        return;
    }
    if y == ys[ys.len() - 1] {
        // rounding collapsed a piece; keep the later abscissa
        xs.pop();
        ys.pop();
        if xs.is_empty() {
            xs.push(x);
            ys.push(y);
            return;
        }
    }
    xs.push(x);
    ys.push(y);
}

/// `F^n` for `n ≥ 1`.
pub fn iterate(f: &PmFunction, n: usize) -> Result<PmFunction> {
    iterate_with_budget(f, n, DEFAULT_BREAKPOINT_BUDGET)
}

pub fn iterate_with_budget(f: &PmFunction, n: usize, budget: usize) -> Result<PmFunction> {
    if n == 0 {
        return Err(Error::PreconditionFailed("iterate requires n >= 1".into()));
    }
    let mut acc = f.clone();
    for _ in 1..n {
        acc = compose_with_budget(f, &acc, budget)?;
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeightValue {
    Finite(usize),
    Infinite { cap: usize },
}

impl HeightValue {
    pub fn finite(&self) -> Option<usize> {
        match *self {
            HeightValue::Finite(m) => Some(m),
            HeightValue::Infinite { .. } => None,
        }
    }
}

impl fmt::Display for HeightValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeightValue::Finite(m) => write!(f, "{m}"),
            HeightValue::Infinite { cap } => write!(f, "infinite(cap={cap})"),
        }
    }
}

impl Serialize for HeightValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            HeightValue::Finite(m) => serializer.serialize_u64(*m as u64),
            other => serializer.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for HeightValue {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(deserializer)?;
        if let Some(m) = v.as_u64() {
            return Ok(HeightValue::Finite(m as usize));
        }
        let s = v.as_str().ok_or_else(|| serde::de::Error::custom("expected height"))?;
        let cap = s
            .strip_prefix("infinite(cap=")
            .and_then(|r| r.strip_suffix(')'))
            .and_then(|r| r.parse().ok())
            .ok_or_else(|| serde::de::Error::custom(format!("bad height {s:?}")))?;
        Ok(HeightValue::Infinite { cap })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HeightReport {
    pub value: HeightValue,
    /// `N(F^0), N(F^1), ...`
    pub fort_counts: Vec<usize>,
    pub cap: usize,
    /// Iteration stopped because an iterate exceeded the breakpoint budget.
    pub budget_exhausted: bool,
}

pub fn height(f: &PmFunction, cap: usize) -> Result<HeightReport> {
    height_with_budget(f, cap, DEFAULT_BREAKPOINT_BUDGET)
}

/// Nonmonotonicity height by fort-count stabilization, cross-checked against
/// the range-inclusion characterization `F^m(I) ⊆ K(F^m)`.
pub fn height_with_budget(f: &PmFunction, cap: usize, budget: usize) -> Result<HeightReport> {
    let mut counts = vec![0usize];
    let mut iterates: Vec<PmFunction> = Vec::new();
    let mut current = f.clone();
    for i in 1..=cap + 1 {
        if i > 1 {
            current = match compose_with_budget(f, &current, budget) {
                Ok(g) => g,
                Err(Error::BudgetExceeded { .. }) => {
                    return Ok(HeightReport {
                        value: HeightValue::Infinite { cap },
                        fort_counts: counts,
                        cap,
                        budget_exhausted: true,
                    })
                }
                Err(e) => return Err(e),
            };
        }
        counts.push(current.fort_count());
        iterates.push(current.clone());
        if counts[i] == counts[i - 1] {
            let m = i - 1;
            if m >= 1 {
                let by_inclusion = (1..=m).find(|&j| range_in_own_lap(&iterates[j - 1], INCLUSION_TOL));
                if by_inclusion != Some(m) {
                    return Err(Error::InternalInconsistency(format!(
                        "fort-count height {m} disagrees with range-inclusion height {by_inclusion:?}"
                    )));
                }
            }
            return Ok(HeightReport { value: HeightValue::Finite(m), fort_counts: counts, cap, budget_exhausted: false });
        }
    }
    Ok(HeightReport { value: HeightValue::Infinite { cap }, fort_counts: counts, cap, budget_exhausted: false })
}

/// Whether `F(I)` lies in a single lap of `F`, up to `tol`.
pub fn range_in_own_lap(f: &PmFunction, tol: f64) -> bool {
    char_lap_with_tol(f, tol).is_some()
}

fn char_lap_with_tol(f: &PmFunction, tol: f64) -> Option<usize> {
    let (lo, hi) = f.range();
    (0..f.lap_count()).find(|&i| {
        let (c0, c1) = f.lap(i);
        lo >= c0 - tol && hi <= c1 + tol
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CharInterval {
    pub lap_index: usize,
    pub bounds: [f64; 2],
}

/// The lap covering `F(I)`. Boundary contact counts as inclusion.
pub fn characteristic_interval(f: &PmFunction) -> Result<CharInterval> {
    match char_lap_with_tol(f, 0.0) {
        Some(lap) => {
            let (c0, c1) = f.lap(lap);
            Ok(CharInterval { lap_index: lap, bounds: [c0, c1] })
        }
        None => {
            let (lo, hi) = f.range();
            Err(Error::NoCharacteristicInterval {
                reason: format!("range [{lo}, {hi}] is not contained in any lap (height >= 2)"),
            })
        }
    }
}

pub fn mirror_conjugate(f: &PmFunction) -> PmFunction {
    f.mirror_conjugate()
}
