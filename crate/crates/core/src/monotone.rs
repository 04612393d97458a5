//! Strictly monotone building blocks: lap restrictions and seed bijections.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pm::PmFunction;

/// A strictly monotone continuous piecewise-linear map on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneSegment {
    xs: Vec<f64>,
    ys: Vec<f64>,
    increasing: bool,
}

impl MonotoneSegment {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != ys.len() {
            return Err(Error::MalformedInput { xs: xs.len(), ys: ys.len() });
        }
        if let Some(i) = (1..xs.len()).find(|&i| !(xs[i - 1] < xs[i])) {
            return Err(Error::UnsortedAbscissae { index: i });
        }
        let increasing = ys[1] > ys[0];
        for i in 1..ys.len() {
            if ys[i] == ys[i - 1] {
                return Err(Error::FlatSegment { x0: xs[i - 1], x1: xs[i] });
            }
            if (ys[i] > ys[i - 1]) != increasing {
                return Err(Error::PreconditionFailed(format!(
                    "segment is not monotone at x = {}",
                    xs[i - 1]
                )));
            }
        }
        Ok(MonotoneSegment { xs, ys, increasing })
    }

    /// `F` restricted to one of its laps.
    pub fn from_lap(f: &PmFunction, lap: usize) -> Self {
        let (s, e) = f.lap_breakpoints(lap);
        MonotoneSegment {
            xs: f.xs()[s..=e].to_vec(),
            ys: f.ys()[s..=e].to_vec(),
            increasing: f.lap_increasing(lap),
        }
    }

    pub fn is_increasing(&self) -> bool {
        self.increasing
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    pub fn range(&self) -> (f64, f64) {
        let (y0, y1) = (self.ys[0], self.ys[self.ys.len() - 1]);
        (y0.min(y1), y0.max(y1))
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    /// Evaluation with `x` saturated to the domain; exact at breakpoints.
    pub fn eval(&self, x: f64) -> f64 {
        let (lo, hi) = self.domain();
        let x = x.clamp(lo, hi);
        let i = self.xs.partition_point(|&c| c < x);
        if self.xs[i] == x {
            return self.ys[i];
        }
        let (x0, x1, y0, y1) = (self.xs[i - 1], self.xs[i], self.ys[i - 1], self.ys[i]);
        y0 + (x - x0) * (y1 - y0) / (x1 - x0)
    }

    /// Inverse with `y` saturated to the range; exact at breakpoints.
    pub fn inverse(&self, y: f64) -> f64 {
        let (lo, hi) = self.range();
        let y = y.clamp(lo, hi);
        let j = if self.increasing {
            self.ys.partition_point(|&v| v < y)
        } else {
            self.ys.partition_point(|&v| v > y)
        };
        if self.ys[j] == y {
            return self.xs[j];
        }
        let (x0, x1, y0, y1) = (self.xs[j - 1], self.xs[j], self.ys[j - 1], self.ys[j]);
        x0 + (y - y0) * (x1 - x0) / (y1 - y0)
    }

    /// Fixed points, computed piece by piece from the sign of `Φ(x) − x`.
    pub fn fixed_points(&self) -> Result<Vec<f64>> {
        let mut out: Vec<f64> = Vec::new();
        let d: Vec<f64> = self.xs.iter().zip(&self.ys).map(|(x, y)| y - x).collect();
        for i in 0..self.xs.len() - 1 {
            let (d0, d1) = (d[i], d[i + 1]);
            if d0 == 0.0 && d1 == 0.0 {
                return Err(Error::NonIsolatedFixedPoints { from: self.xs[i], to: self.xs[i + 1] });
            }
            if d0 == 0.0 {
                push_unique(&mut out, self.xs[i]);
            } else if d1 != 0.0 && (d0 > 0.0) != (d1 > 0.0) {
                let (x0, x1) = (self.xs[i], self.xs[i + 1]);
                let x = x0 + d0 * (x1 - x0) / (d0 - d1);
                push_unique(&mut out, x.clamp(x0, x1));
            }
        }
        if d[d.len() - 1] == 0.0 {
            push_unique(&mut out, self.xs[self.xs.len() - 1]);
        }
        Ok(out)
    }
}

fn push_unique(v: &mut Vec<f64>, x: f64) {
    if v.last() != Some(&x) {
        v.push(x);
    }
}

/// Shape of a seed bijection on a fundamental domain, in normalized coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum SeedShape {
    #[default]
    Linear,
    /// `t ↦ t^exponent` on `[0, 1]`.
    Power { exponent: f64 },
}

impl SeedShape {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SeedShape::Linear => Ok(()),
            SeedShape::Power { exponent } if exponent.is_finite() && exponent > 0.0 => Ok(()),
            SeedShape::Power { exponent } => Err(Error::PreconditionFailed(format!(
                "seed exponent must be positive and finite, got {exponent}"
            ))),
        }
    }

    pub fn forward(&self, t: f64) -> f64 {
        match *self {
            SeedShape::Linear => t,
            SeedShape::Power { exponent } => t.powf(exponent),
        }
    }

    pub fn backward(&self, s: f64) -> f64 {
        match *self {
            SeedShape::Linear => s,
            SeedShape::Power { exponent } => s.powf(1.0 / exponent),
        }
    }
}

/// A strictly monotone bijection through prescribed knots, shaped between knots.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedFunction {
    knots: Vec<(f64, f64)>,
    shape: SeedShape,
    increasing: bool,
}

impl SeedFunction {
    pub fn new(knots: Vec<(f64, f64)>, shape: SeedShape) -> Result<Self> {
        shape.validate()?;
        if knots.len() < 2 {
            return Err(Error::PreconditionFailed("a seed needs at least two knots".into()));
        }
        let increasing = knots[1].1 > knots[0].1;
        for w in knots.windows(2) {
            if !(w[0].0 < w[1].0) || w[0].1 == w[1].1 || (w[1].1 > w[0].1) != increasing {
                return Err(Error::PreconditionFailed(format!(
                    "seed knots {:?} are not strictly monotone",
                    knots
                )));
            }
        }
        Ok(SeedFunction { knots, shape, increasing })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = &self.knots;
        let x = x.clamp(k[0].0, k[k.len() - 1].0);
        let i = k.partition_point(|p| p.0 < x);
        if k[i].0 == x {
            return k[i].1;
        }
        let ((x0, y0), (x1, y1)) = (k[i - 1], k[i]);
        y0 + self.shape.forward((x - x0) / (x1 - x0)) * (y1 - y0)
    }

    pub fn inverse(&self, y: f64) -> f64 {
        let k = &self.knots;
        let (first, last) = (k[0].1, k[k.len() - 1].1);
        let y = y.clamp(first.min(last), first.max(last));
        let i = if self.increasing {
            k.partition_point(|p| p.1 < y)
        } else {
            k.partition_point(|p| p.1 > y)
        };
        if k[i].1 == y {
            return k[i].0;
        }
        let ((x0, y0), (x1, y1)) = (k[i - 1], k[i]);
        x0 + self.shape.backward((y - y0) / (y1 - y0)) * (x1 - x0)
    }
}
