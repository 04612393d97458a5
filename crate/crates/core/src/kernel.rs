//! Monotone square roots of a strictly increasing map on the characteristic interval.
//!
//! Increasing roots are built by orbit extension: between two consecutive
//! fixed points the orbits of `Φ` march monotonically toward one end, so a
//! seed bijection on one fundamental domain determines the root everywhere
//! on that piece. Decreasing roots pair the two halves around a fixed center
//! and conjugate a seed on `[α, Φ(α)]` along the orbits.
//!
//! Evaluation is lazy and pointwise; nothing is truncated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monotone::{MonotoneSegment, SeedFunction, SeedShape};

pub const DEFAULT_ORBIT_CAP: usize = 100_000;
pub const DEFAULT_SNAP_TOL: f64 = 1e-13;

/// Tolerance for anchors that coincide with a prescribed endpoint or corner.
pub const ANCHOR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OrbitSettings {
    pub orbit_cap: usize,
    pub snap_tol: f64,
    #[serde(default)]
    pub seed: SeedShape,
}

impl Default for OrbitSettings {
    fn default() -> Self {
        OrbitSettings { orbit_cap: DEFAULT_ORBIT_CAP, snap_tol: DEFAULT_SNAP_TOL, seed: SeedShape::Linear }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Orientation {
    Increasing,
    Decreasing,
}

/// One stretch between consecutive fixed points (or a non-fixed end of the
/// interval) on which orbits move monotonically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct OrbitPiece {
    pub lo: f64,
    pub hi: f64,
    /// Orbits move toward `hi` (`Φ(x) > x` inside).
    pub toward_hi: bool,
    /// `x_0`: start of the fundamental domain `[x_0, Φ(x_0))`.
    pub base: f64,
    /// `x_1 = φ(x_0)`, strictly between `x_0` and `Φ(x_0)`.
    pub anchor: f64,
}

impl OrbitPiece {
    /// `base` is a non-fixed end of the interval rather than an interior point.
    fn is_boundary(&self) -> bool {
        if self.toward_hi {
            self.base == self.lo
        } else {
            self.base == self.hi
        }
    }

    /// Image of the piece under the root.
    fn image(&self) -> (f64, f64) {
        match (self.is_boundary(), self.toward_hi) {
            (true, true) => (self.anchor, self.hi),
            (true, false) => (self.lo, self.anchor),
            _ => (self.lo, self.hi),
        }
    }
}

fn sign(up: bool) -> f64 {
    if up {
        1.0
    } else {
        -1.0
    }
}

fn iterate_phi(phi: &MonotoneSegment, mut x: f64, i: i64) -> f64 {
    if i >= 0 {
        for _ in 0..i {
            x = phi.eval(x);
        }
    } else {
        for _ in 0..-i {
            x = phi.inverse(x);
        }
    }
    x
}

/// Strictly increasing root assembled from orbit pieces.
#[derive(Debug, Clone)]
pub struct IncreasingRoot {
    phi: MonotoneSegment,
    fixed: Vec<f64>,
    pieces: Vec<OrbitPiece>,
    seeds: Vec<SeedFunction>,
    settings: OrbitSettings,
}

impl IncreasingRoot {
    /// Rebuilds a root from explicit pieces, validating every anchor.
    pub fn from_pieces(phi: MonotoneSegment, pieces: Vec<OrbitPiece>, settings: OrbitSettings) -> Result<Self> {
        if !phi.is_increasing() {
            return Err(Error::PreconditionFailed("Φ must be strictly increasing".into()));
        }
        settings.seed.validate()?;
        let fixed = phi.fixed_points()?;
        let (a, b) = phi.domain();
        if pieces.is_empty() || pieces[0].lo != a || pieces[pieces.len() - 1].hi != b {
            return Err(Error::Recipe("orbit pieces must cover the interval".into()));
        }
        let mut seeds = Vec::with_capacity(pieces.len());
        for (n, p) in pieces.iter().enumerate() {
            if n > 0 && pieces[n - 1].hi != p.lo {
                return Err(Error::Recipe(format!("orbit pieces are not contiguous at {}", p.lo)));
            }
            let inside = |x: f64| fixed.iter().all(|&q| !(q > p.lo && q < p.hi)) && x >= p.lo && x <= p.hi;
            if !inside(p.base) {
                return Err(Error::Recipe(format!("piece [{}, {}] contains a fixed point or misplaced base", p.lo, p.hi)));
            }
            let s = sign(p.toward_hi);
            let fx0 = phi.eval(p.base);
            if !(s * (fx0 - p.base) > 0.0) {
                return Err(Error::AnchorOutOfRange {
                    what: "orbit base".into(),
                    value: p.base,
                    expected: format!("a point moved {} by Φ", if p.toward_hi { "up" } else { "down" }),
                });
            }
            if !(s * p.anchor > s * p.base && s * p.anchor < s * fx0) {
                return Err(Error::AnchorOutOfRange {
                    what: "x*".into(),
                    value: p.anchor,
                    expected: format!("strictly between {} and Φ({}) = {}", p.base, p.base, fx0),
                });
            }
            let knots = if p.toward_hi {
                vec![(p.base, p.anchor), (p.anchor, fx0)]
            } else {
                vec![(p.anchor, fx0), (p.base, p.anchor)]
            };
            seeds.push(SeedFunction::new(knots, settings.seed)?);
        }
        Ok(IncreasingRoot { phi, fixed, pieces, seeds, settings })
    }

    pub fn phi(&self) -> &MonotoneSegment {
        &self.phi
    }

    pub fn fixed_points(&self) -> &[f64] {
        &self.fixed
    }

    pub fn pieces(&self) -> &[OrbitPiece] {
        &self.pieces
    }

    pub fn settings(&self) -> &OrbitSettings {
        &self.settings
    }

    pub fn domain(&self) -> (f64, f64) {
        self.phi.domain()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.pieces[0].image().0, self.pieces[self.pieces.len() - 1].image().1)
    }

    fn snap(&self, z: f64) -> Option<f64> {
        self.fixed.iter().copied().find(|&p| (z - p).abs() <= self.settings.snap_tol)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let (a, b) = self.domain();
        let x = x.clamp(a, b);
        if let Some(p) = self.snap(x) {
            return Ok(p);
        }
        let n = self.pieces.iter().position(|p| x <= p.hi).unwrap_or(self.pieces.len() - 1);
        let (p, seed) = (&self.pieces[n], &self.seeds[n]);
        let s = sign(p.toward_hi);
        let fx0 = self.phi.eval(p.base);
        let (mut z, mut i, mut steps) = (x, 0i64, 0usize);
        while s * z >= s * fx0 {
            z = self.phi.inverse(z);
            i += 1;
            steps += 1;
            if steps > self.settings.orbit_cap {
                return Err(Error::OrbitCapExceeded { x, cap: self.settings.orbit_cap });
            }
        }
        while s * z < s * p.base {
            z = self.phi.eval(z);
            i -= 1;
            steps += 1;
            if steps > self.settings.orbit_cap {
                return Err(Error::OrbitCapExceeded { x, cap: self.settings.orbit_cap });
            }
        }
        let w = if s * z <= s * p.anchor { seed.eval(z) } else { self.phi.eval(seed.inverse(z)) };
        Ok(iterate_phi(&self.phi, w, i))
    }

    /// `φ⁻¹(y)` with `y` saturated to the image of `φ`.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        let y = y.clamp(lo, hi);
        if let Some(p) = self.snap(y) {
            return Ok(p);
        }
        let n = self.pieces.iter().position(|p| y <= p.image().1).unwrap_or(self.pieces.len() - 1);
        let (p, seed) = (&self.pieces[n], &self.seeds[n]);
        let y = y.clamp(p.image().0, p.image().1);
        let s = sign(p.toward_hi);
        let fx0 = self.phi.eval(p.base);
        let fx1 = self.phi.eval(p.anchor);
        let (mut z, mut i, mut steps) = (y, 0i64, 0usize);
        while s * z >= s * fx1 {
            z = self.phi.inverse(z);
            i += 1;
            steps += 1;
            if steps > self.settings.orbit_cap {
                return Err(Error::OrbitCapExceeded { x: y, cap: self.settings.orbit_cap });
            }
        }
        while s * z < s * p.anchor {
            z = self.phi.eval(z);
            i -= 1;
            steps += 1;
            if steps > self.settings.orbit_cap {
                return Err(Error::OrbitCapExceeded { x: y, cap: self.settings.orbit_cap });
            }
        }
        let w = if s * z < s * fx0 { seed.inverse(z) } else { seed.eval(self.phi.inverse(z)) };
        Ok(iterate_phi(&self.phi, w, i))
    }
}

/// Increasing root on a segment where `Φ` moves every non-fixed point toward
/// one fixed end, with `φ` at the other end prescribed by `anchor`.
pub fn inc_root_segment(phi: &MonotoneSegment, anchor: f64, settings: OrbitSettings) -> Result<IncreasingRoot> {
    let (a, b) = phi.domain();
    let fixed = phi.fixed_points()?;
    match fixed.as_slice() {
        [p] if *p == b || (phi.eval(b) == b && (p - b).abs() <= ANCHOR_TOL) => {
            inc_root_general(phi, Some(anchor), None, settings)
        }
        [p] if *p == a || (phi.eval(a) == a && (p - a).abs() <= ANCHOR_TOL) => {
            inc_root_general(phi, None, Some(anchor), settings)
        }
        _ => Err(Error::PreconditionFailed(format!(
            "Φ must have exactly one fixed point, at an end of [{a}, {b}]; found {fixed:?}"
        ))),
    }
}

/// Increasing root on the whole segment, split at the fixed points of `Φ`.
///
/// `left` is `φ(α)` and is required iff `Φ(α) > α`; `right` is `φ(β)` and is
/// required iff `Φ(β) < β`. An anchor equal to a fixed endpoint is accepted.
pub fn inc_root_general(
    phi: &MonotoneSegment,
    left: Option<f64>,
    right: Option<f64>,
    settings: OrbitSettings,
) -> Result<IncreasingRoot> {
    if !phi.is_increasing() {
        return Err(Error::PreconditionFailed("Φ must be strictly increasing".into()));
    }
    let (a, b) = phi.domain();
    let fixed = phi.fixed_points()?;
    let (fa, fb) = (phi.eval(a), phi.eval(b));
    check_end_anchor("φ(α)", left, a, fa)?;
    check_end_anchor("φ(β)", right, b, fb)?;

    let mut cuts = vec![a];
    cuts.extend(fixed.iter().copied().filter(|&p| p > a && p < b));
    cuts.push(b);
    let mut pieces = Vec::with_capacity(cuts.len() - 1);
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mid = 0.5 * (lo + hi);
        let toward_hi = phi.eval(mid) > mid;
        let lo_fixed = fixed.contains(&lo);
        let hi_fixed = fixed.contains(&hi);
        let piece = if !lo_fixed && lo == a {
            if !toward_hi {
                return Err(Error::InternalInconsistency("Φ(α) > α but orbits near α move down".into()));
            }
            OrbitPiece { lo, hi, toward_hi, base: a, anchor: left.unwrap_or(fa) }
        } else if !hi_fixed && hi == b {
            if toward_hi {
                return Err(Error::InternalInconsistency("Φ(β) < β but orbits near β move up".into()));
            }
            OrbitPiece { lo, hi, toward_hi, base: b, anchor: right.unwrap_or(fb) }
        } else {
            let base = mid;
            OrbitPiece { lo, hi, toward_hi, base, anchor: 0.5 * (base + phi.eval(base)) }
        };
        pieces.push(piece);
    }
    IncreasingRoot::from_pieces(phi.clone(), pieces, settings)
}

fn check_end_anchor(what: &str, anchor: Option<f64>, end: f64, image: f64) -> Result<()> {
    if image == end || (image - end).abs() <= ANCHOR_TOL {
        return match anchor {
            Some(v) if (v - end).abs() > ANCHOR_TOL => Err(Error::AnchorOutOfRange {
                what: what.into(),
                value: v,
                expected: format!("the fixed endpoint {end}"),
            }),
            _ => Ok(()),
        };
    }
    let (lo, hi) = (end.min(image), end.max(image));
    match anchor {
        Some(v) if v > lo && v < hi => Ok(()),
        Some(v) => Err(Error::AnchorOutOfRange {
            what: what.into(),
            value: v,
            expected: format!("a value strictly inside ({lo}, {hi})"),
        }),
        None => Err(Error::AnchorOutOfRange {
            what: what.into(),
            value: f64::NAN,
            expected: format!("an anchor in ({lo}, {hi}) since the endpoint is not fixed"),
        }),
    }
}

/// Which boundary case of the admissible anchor set was used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum AnchorCase {
    /// `x* ∈ (α, Φ(α))`, `y* ∈ (Φ(ξ), ξ)`.
    Interior,
    /// `(x*, y*) = (α, Φ(ξ))`.
    LowerCorner,
    /// `(x*, y*) = (Φ(α), ξ)`.
    UpperCorner,
}

/// Parameters of a decreasing root pairing `[α, β]` with `[η, ξ]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PairedAnchors {
    pub alpha: f64,
    pub beta: f64,
    pub eta: f64,
    pub xi: f64,
    /// `φ(ξ)`.
    pub x_star: f64,
    /// `φ(α)`.
    pub y_star: f64,
}

/// Strictly decreasing root: `φ = φ̂` on `[α, β]` and `φ̂⁻¹ ∘ Φ` on `[η, ξ]`.
#[derive(Debug, Clone)]
pub struct DecreasingRoot {
    phi: MonotoneSegment,
    anchors: PairedAnchors,
    case: AnchorCase,
    seed: SeedFunction,
    settings: OrbitSettings,
}

fn near(x: f64, y: f64) -> bool {
    (x - y).abs() <= ANCHOR_TOL
}

/// Decreasing root of `Φ` on `[α, β] ∪ [η, ξ]`.
pub fn dec_root_paired(phi: &MonotoneSegment, anchors: PairedAnchors, settings: OrbitSettings) -> Result<DecreasingRoot> {
    settings.seed.validate()?;
    if !phi.is_increasing() {
        return Err(Error::PreconditionFailed("Φ must be strictly increasing".into()));
    }
    let PairedAnchors { alpha, beta, eta, xi, x_star, y_star } = anchors;
    let (lo, hi) = phi.domain();
    if !(lo <= alpha && alpha < beta && beta <= eta && eta < xi && xi <= hi) {
        return Err(Error::PreconditionFailed(format!(
            "need α < β ≤ η < ξ inside the domain, got {alpha}, {beta}, {eta}, {xi}"
        )));
    }
    let (fa, fxi) = (phi.eval(alpha), phi.eval(xi));
    if !(fa > alpha) || !(fxi < xi) || !near(phi.eval(beta), beta) || !near(phi.eval(eta), eta) {
        return Err(Error::PreconditionFailed(
            "need Φ(α) > α, Φ(β) = β, Φ(η) = η and Φ(ξ) < ξ".into(),
        ));
    }
    let stray: Vec<f64> = phi
        .fixed_points()?
        .into_iter()
        .filter(|&p| (p < beta && !near(p, beta)) || (p > eta && !near(p, eta)))
        .collect();
    if !stray.is_empty() {
        return Err(Error::PreconditionFailed(format!(
            "Φ has fixed points {stray:?} outside the paired centers"
        )));
    }

    let (case, x_star, y_star) = if near(x_star, alpha) && near(y_star, fxi) {
        (AnchorCase::LowerCorner, alpha, fxi)
    } else if near(x_star, fa) && near(y_star, xi) {
        (AnchorCase::UpperCorner, fa, xi)
    } else if x_star > alpha && x_star < fa && y_star > fxi && y_star < xi {
        (AnchorCase::Interior, x_star, y_star)
    } else {
        return Err(Error::AnchorOutOfRange {
            what: "(x*, y*)".into(),
            value: f64::NAN,
            expected: format!(
                "({x_star}, {y_star}) in ({alpha}, {fa}) × ({fxi}, {xi}) or one of the corners ({alpha}, {fxi}), ({fa}, {xi})"
            ),
        });
    };
    let mut knots = vec![(alpha, y_star), (x_star, fxi), (fa, phi.eval(y_star))];
    knots.dedup_by(|b, a| a.0 == b.0);
    let seed = SeedFunction::new(knots, settings.seed)?;
    let anchors = PairedAnchors { alpha, beta, eta, xi, x_star, y_star };
    Ok(DecreasingRoot { phi: phi.clone(), anchors, case, seed, settings })
}

/// Decreasing root on the whole characteristic interval around its single
/// interior fixed point, with `φ(left end) = y_left` and `φ(right end) = x_right`.
pub fn dec_root_on_k(phi: &MonotoneSegment, y_left: f64, x_right: f64, settings: OrbitSettings) -> Result<DecreasingRoot> {
    let (a, b) = phi.domain();
    let fixed = phi.fixed_points()?;
    let interior: Vec<f64> = fixed.iter().copied().filter(|&p| p > a && p < b).collect();
    if fixed.len() != 1 || interior.len() != 1 {
        return Err(Error::MultipleInteriorFixedPoints { count: fixed.len() });
    }
    let c = interior[0];
    if !(phi.eval(a) > a && phi.eval(b) < b) {
        return Err(Error::NotReversing { detail: "endpoints must move toward the center".into() });
    }
    dec_root_paired(
        phi,
        PairedAnchors { alpha: a, beta: c, eta: c, xi: b, x_star: x_right, y_star: y_left },
        settings,
    )
}

impl DecreasingRoot {
    pub fn phi(&self) -> &MonotoneSegment {
        &self.phi
    }

    pub fn anchors(&self) -> &PairedAnchors {
        &self.anchors
    }

    pub fn anchor_case(&self) -> AnchorCase {
        self.case
    }

    pub fn settings(&self) -> &OrbitSettings {
        &self.settings
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.anchors.alpha, self.anchors.xi)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.anchors.x_star, self.anchors.y_star)
    }

    fn cap_error(&self, x: f64) -> Error {
        Error::OrbitCapExceeded { x, cap: self.settings.orbit_cap }
    }

    /// `φ̂` on `[α, β]`, commuting with `Φ`.
    pub fn conjugator(&self, x: f64) -> Result<f64> {
        let PairedAnchors { alpha, beta, eta, .. } = self.anchors;
        let x = x.clamp(alpha, beta);
        if (x - beta).abs() <= self.settings.snap_tol {
            return Ok(eta);
        }
        let fa = self.phi.eval(alpha);
        let (mut z, mut i) = (x, 0i64);
        while z >= fa {
            z = self.phi.inverse(z);
            i += 1;
            if i as usize > self.settings.orbit_cap {
                return Err(self.cap_error(x));
            }
        }
        Ok(iterate_phi(&self.phi, self.seed.eval(z), i))
    }

    /// `φ̂⁻¹` on `[η, y*]`.
    pub fn conjugator_inverse(&self, y: f64) -> Result<f64> {
        let PairedAnchors { beta, eta, y_star, .. } = self.anchors;
        let y = y.clamp(eta, y_star);
        if (y - eta).abs() <= self.settings.snap_tol {
            return Ok(beta);
        }
        let low = self.phi.eval(y_star);
        let (mut z, mut i) = (y, 0i64);
        while z < low {
            z = self.phi.inverse(z);
            i += 1;
            if i as usize > self.settings.orbit_cap {
                return Err(self.cap_error(y));
            }
        }
        Ok(iterate_phi(&self.phi, self.seed.inverse(z), i))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let PairedAnchors { alpha, beta, eta, xi, .. } = self.anchors;
        let x = x.clamp(alpha, xi);
        if x <= beta {
            self.conjugator(x)
        } else {
            self.conjugator_inverse(self.phi.eval(x.max(eta)))
        }
    }

    pub fn inverse(&self, y: f64) -> Result<f64> {
        let PairedAnchors { beta, eta, x_star, y_star, .. } = self.anchors;
        let y = y.clamp(x_star, y_star);
        if y >= eta {
            self.conjugator_inverse(y)
        } else {
            Ok(self.phi.inverse(self.conjugator(y.min(beta))?))
        }
    }
}

/// Serialized kernel data; `Φ` itself is recovered from the source map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "orientation", rename_all = "camelCase")]
pub enum KernelRecipe {
    #[serde(rename_all = "camelCase")]
    Increasing { fixed_points: Vec<f64>, pieces: Vec<OrbitPiece>, settings: OrbitSettings },
    #[serde(rename_all = "camelCase")]
    Decreasing { fixed_points: Vec<f64>, anchors: PairedAnchors, case: AnchorCase, settings: OrbitSettings },
}

#[derive(Debug, Clone)]
pub enum KernelRoot {
    Increasing(IncreasingRoot),
    Decreasing(DecreasingRoot),
}

impl KernelRoot {
    pub fn orientation(&self) -> Orientation {
        match self {
            KernelRoot::Increasing(_) => Orientation::Increasing,
            KernelRoot::Decreasing(_) => Orientation::Decreasing,
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        match self {
            KernelRoot::Increasing(r) => r.domain(),
            KernelRoot::Decreasing(r) => r.domain(),
        }
    }

    pub fn range(&self) -> (f64, f64) {
        match self {
            KernelRoot::Increasing(r) => r.range(),
            KernelRoot::Decreasing(r) => r.range(),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            KernelRoot::Increasing(r) => r.eval(x),
            KernelRoot::Decreasing(r) => r.eval(x),
        }
    }

    pub fn inverse(&self, y: f64) -> Result<f64> {
        match self {
            KernelRoot::Increasing(r) => r.inverse(y),
            KernelRoot::Decreasing(r) => r.inverse(y),
        }
    }

    pub fn recipe(&self) -> KernelRecipe {
        match self {
            KernelRoot::Increasing(r) => KernelRecipe::Increasing {
                fixed_points: r.fixed.clone(),
                pieces: r.pieces.clone(),
                settings: r.settings,
            },
            KernelRoot::Decreasing(r) => KernelRecipe::Decreasing {
                fixed_points: vec![r.anchors.beta],
                anchors: r.anchors,
                case: r.case,
                settings: r.settings,
            },
        }
    }

    /// Rebuilds a kernel from its recipe over the map `phi`.
    pub fn from_recipe(phi: MonotoneSegment, recipe: &KernelRecipe) -> Result<Self> {
        let check_fixed = |listed: &[f64], actual: &[f64]| -> Result<()> {
            let same = listed.len() == actual.len() && listed.iter().zip(actual).all(|(p, q)| near(*p, *q));
            if same {
                Ok(())
            } else {
                Err(Error::Recipe(format!("recipe fixed points {listed:?} do not match Φ ({actual:?})")))
            }
        };
        match recipe {
            KernelRecipe::Increasing { fixed_points, pieces, settings } => {
                check_fixed(fixed_points, &phi.fixed_points()?)?;
                Ok(KernelRoot::Increasing(IncreasingRoot::from_pieces(phi, pieces.clone(), *settings)?))
            }
            KernelRecipe::Decreasing { fixed_points, anchors, case, settings } => {
                let actual: Vec<f64> = phi.fixed_points()?;
                check_fixed(fixed_points, &actual)?;
                let root = dec_root_paired(&phi, *anchors, *settings)?;
                if root.case != *case {
                    return Err(Error::Recipe(format!("anchor case {:?} does not match recipe {:?}", root.case, case)));
                }
                Ok(KernelRoot::Decreasing(root))
            }
        }
    }
}
