//! Assembly of a square root on the whole interval from a kernel on `K`.
//!
//! Every lap other than `K` carries a map of the form `g⁻¹ ∘ F` where `g` is
//! the root already defined on some neighboring lap. The root is kept
//! symbolic: evaluation walks the chain of inverses back to the kernel.

use serde::{Deserialize, Serialize};

use crate::conditions::{
    match_t21, match_t22, match_t23, match_t24, ConditionReport, FortPattern, InverseChoice, PatternMode, Theorem,
    TheoremCase,
};
use crate::error::{Error, Result};
use crate::kernel::{dec_root_on_k, inc_root_general, KernelRoot, OrbitSettings, Orientation};
use crate::monotone::MonotoneSegment;
use crate::pm::{characteristic_interval, PmFunction};

/// Tolerance for range inclusion and junction continuity during assembly.
pub const ASSEMBLY_TOL: f64 = 1e-9;

/// Cap on complete pocket assignments enumerated for a decreasing kernel.
const MAX_ASSIGNMENTS: usize = 64;

/// Anything that can be sampled on a compact interval.
pub trait Evaluable {
    fn domain(&self) -> (f64, f64);
    fn eval_at(&self, x: f64) -> Result<f64>;
    /// Points where the formula changes; always included in samples.
    fn breakpoints(&self) -> Vec<f64>;
}

impl Evaluable for PmFunction {
    fn domain(&self) -> (f64, f64) {
        PmFunction::domain(self)
    }

    fn eval_at(&self, x: f64) -> Result<f64> {
        self.eval(x)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.xs().to_vec()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum Piece {
    Kernel,
    /// `f = f_j⁻¹ ∘ F` where `f_j` is the root on lap `j`.
    #[serde(rename_all = "camelCase")]
    Inverse { of_lap: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum RootClass {
    Increasing,
    Decreasing,
    #[default]
    Any,
}

impl RootClass {
    fn allows(self, t: Theorem) -> bool {
        match self {
            RootClass::Any => true,
            RootClass::Increasing => t.increasing_root(),
            RootClass::Decreasing => !t.increasing_root(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConstructOptions {
    pub mode: PatternMode,
    pub settings: OrbitSettings,
    /// When a decreasing-kernel assembly admits several pocket assignments,
    /// take the one following the mod-4 schedule (with `k-1` and `k+1`
    /// exchanged) instead of failing.
    pub prefer_schedule: bool,
}

/// Pocket assignment actually used, per side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "camelCase")]
pub struct Schedule {
    pub left: Vec<InverseChoice>,
    pub right: Vec<InverseChoice>,
}

#[derive(Debug, Clone)]
pub struct RootFunction {
    /// The map the pieces refer to: `F`, or its mirror image when `mirrored`.
    base: PmFunction,
    kernel_lap: usize,
    kernel: KernelRoot,
    pieces: Vec<Piece>,
    source: Theorem,
    case: TheoremCase,
    mirrored: bool,
    schedule: Option<Schedule>,
    report: Option<ConditionReport>,
}

impl RootFunction {
    /// Assembles and checks ranges and junctions.
    pub fn assemble(
        base: PmFunction,
        kernel_lap: usize,
        kernel: KernelRoot,
        pieces: Vec<Piece>,
        source: Theorem,
        case: TheoremCase,
    ) -> Result<Self> {
        let root = Self::unchecked(base, kernel_lap, kernel, pieces, source, case)?;
        root.check_ranges()?;
        root.check_junctions()?;
        Ok(root)
    }

    /// Structural validation only: piece count and acyclic references.
    pub fn unchecked(
        base: PmFunction,
        kernel_lap: usize,
        kernel: KernelRoot,
        pieces: Vec<Piece>,
        source: Theorem,
        case: TheoremCase,
    ) -> Result<Self> {
        let laps = base.lap_count();
        if pieces.len() != laps || kernel_lap >= laps || pieces[kernel_lap] != Piece::Kernel {
            return Err(Error::Recipe(format!("{} pieces for {laps} laps with kernel on lap {kernel_lap}", pieces.len())));
        }
        for (i, p) in pieces.iter().enumerate() {
            match *p {
                Piece::Kernel if i != kernel_lap => {
                    return Err(Error::Recipe(format!("lap {i} claims the kernel")));
                }
                Piece::Inverse { of_lap } if of_lap >= laps || of_lap == i => {
                    return Err(Error::Recipe(format!("lap {i} inverts invalid lap {of_lap}")));
                }
                _ => {}
            }
            let mut j = i;
            for _ in 0..=laps {
                match pieces[j] {
                    Piece::Kernel => break,
                    Piece::Inverse { of_lap } => j = of_lap,
                }
            }
            if pieces[j] != Piece::Kernel {
                return Err(Error::Recipe(format!("lap {i} does not reach the kernel")));
            }
        }
        let (ka, kb) = base.lap(kernel_lap);
        let (da, db) = kernel.domain();
        if da != ka || db != kb {
            return Err(Error::Recipe(format!("kernel domain [{da}, {db}] is not lap {kernel_lap}")));
        }
        Ok(RootFunction { base, kernel_lap, kernel, pieces, source, case, mirrored: false, schedule: None, report: None })
    }

    pub fn source_theorem(&self) -> Theorem {
        self.source
    }

    pub fn theorem_case(&self) -> TheoremCase {
        self.case
    }

    pub fn mirrored(&self) -> bool {
        self.mirrored
    }

    pub fn kernel(&self) -> &KernelRoot {
        &self.kernel
    }

    pub fn kernel_lap(&self) -> usize {
        self.kernel_lap
    }

    /// Pieces in the coordinates of the map they were built on.
    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn base(&self) -> &PmFunction {
        &self.base
    }

    pub fn schedule(&self) -> Option<&Schedule> {
        self.schedule.as_ref()
    }

    pub fn report(&self) -> Option<&ConditionReport> {
        self.report.as_ref()
    }

    pub fn orientation(&self) -> Orientation {
        self.kernel.orientation()
    }

    pub(crate) fn set_mirrored(&mut self, mirrored: bool) {
        self.mirrored = mirrored;
        if let Some(r) = self.report.as_mut() {
            r.mirrored = mirrored;
        }
    }

    pub(crate) fn set_schedule(&mut self, schedule: Option<Schedule>) {
        self.schedule = schedule;
    }

    fn with_report(mut self, report: ConditionReport) -> Self {
        self.report = Some(report);
        self
    }

    /// Root on lap `lap` of the base map, at `x` (saturated into the lap).
    fn eval_base_on_lap(&self, lap: usize, x: f64) -> Result<f64> {
        match self.pieces[lap] {
            Piece::Kernel => self.kernel.eval(x),
            Piece::Inverse { of_lap } => {
                let (c0, c1) = self.base.lap(lap);
                self.inverse_base_on_lap(of_lap, self.base.value_at(x.clamp(c0, c1)))
            }
        }
    }

    /// Inverse of the root restricted to lap `lap`, saturated to its image.
    fn inverse_base_on_lap(&self, lap: usize, y: f64) -> Result<f64> {
        match self.pieces[lap] {
            Piece::Kernel => self.kernel.inverse(y),
            Piece::Inverse { of_lap } => {
                // f(x) = g⁻¹(F(x)) = y  ⇔  F(x) = g(y)
                let (lo, hi) = self.lap_image_base(lap)?;
                let gy = self.eval_base_on_lap(of_lap, y.clamp(lo, hi))?;
                Ok(self.base.lap_inverse_clamped(lap, gy))
            }
        }
    }

    fn lap_image_base(&self, lap: usize) -> Result<(f64, f64)> {
        match self.pieces[lap] {
            Piece::Kernel => Ok(self.kernel.range()),
            Piece::Inverse { .. } => {
                let (c0, c1) = self.base.lap(lap);
                let (y0, y1) = (self.eval_base_on_lap(lap, c0)?, self.eval_base_on_lap(lap, c1)?);
                Ok((y0.min(y1), y0.max(y1)))
            }
        }
    }

    fn eval_base(&self, x: f64) -> Result<f64> {
        self.eval_base_on_lap(self.base.lap_index_at(x), x)
    }

    fn phi(&self, x: f64) -> f64 {
        let (a, b) = self.base.domain();
        a + b - x
    }

    fn user_lap(&self, lap: usize) -> usize {
        if self.mirrored {
            self.base.lap_count() - 1 - lap
        } else {
            lap
        }
    }

    /// `f(x)`, with `x` saturated into the domain.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let (a, b) = self.base.domain();
        let x = x.clamp(a, b);
        if self.mirrored {
            Ok(self.phi(self.eval_base(self.phi(x))?))
        } else {
            self.eval_base(x)
        }
    }

    /// Formula of lap `lap` (in the caller's coordinates) evaluated at `x`;
    /// used to measure junction gaps from both sides.
    pub fn eval_piece(&self, lap: usize, x: f64) -> Result<f64> {
        if self.mirrored {
            Ok(self.phi(self.eval_base_on_lap(self.user_lap(lap), self.phi(x))?))
        } else {
            self.eval_base_on_lap(lap, x)
        }
    }

    /// Lap endpoints `c_0 .. c_{v+1}` in the caller's coordinates.
    pub fn lap_endpoints(&self) -> Vec<f64> {
        let mut c = self.base.lap_endpoints();
        if self.mirrored {
            c = c.into_iter().rev().map(|x| self.phi(x)).collect();
            let n = c.len();
            let (a, b) = self.base.domain();
            c[0] = a;
            c[n - 1] = b;
        }
        c
    }

    /// The characteristic interval in the caller's coordinates.
    pub fn kernel_interval(&self) -> (f64, f64) {
        let (c0, c1) = self.base.lap(self.kernel_lap);
        if self.mirrored {
            (self.phi(c1), self.phi(c0))
        } else {
            (c0, c1)
        }
    }

    fn check_ranges(&self) -> Result<()> {
        for (lap, p) in self.pieces.iter().enumerate() {
            if let Piece::Inverse { of_lap } = *p {
                let (lo, hi) = self.base.lap_image(lap);
                let (rlo, rhi) = self.lap_image_base(of_lap)?;
                if lo < rlo - ASSEMBLY_TOL || hi > rhi + ASSEMBLY_TOL {
                    return Err(Error::RangeViolation {
                        lap: self.user_lap(lap),
                        source_lap: self.user_lap(of_lap),
                        image_lo: lo,
                        image_hi: hi,
                        range_lo: rlo,
                        range_hi: rhi,
                    });
                }
            }
        }
        Ok(())
    }

    /// Largest gap between neighboring piece formulas at each interior lap endpoint.
    pub fn junction_gaps(&self) -> Result<Vec<(f64, f64)>> {
        let c = self.lap_endpoints();
        (1..c.len() - 1)
            .map(|i| {
                let l = self.eval_piece(i - 1, c[i])?;
                let r = self.eval_piece(i, c[i])?;
                Ok((c[i], (l - r).abs()))
            })
            .collect()
    }

    fn check_junctions(&self) -> Result<()> {
        for (x, gap) in self.junction_gaps()? {
            if gap > ASSEMBLY_TOL {
                return Err(Error::JunctionDiscontinuity { x, gap });
            }
        }
        Ok(())
    }
}

impl Evaluable for RootFunction {
    fn domain(&self) -> (f64, f64) {
        self.base.domain()
    }

    fn eval_at(&self, x: f64) -> Result<f64> {
        self.eval(x)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.lap_endpoints()
    }
}

fn not_met(theorem: Theorem, r: &ConditionReport) -> Error {
    Error::ConditionsNotMet {
        theorem: theorem.to_string(),
        clause: r.failed_clause.clone().unwrap_or_else(|| "no endpoint condition matched".into()),
    }
}

/// Runs a matcher, turning every way of not matching into `ConditionsNotMet`.
fn matched(theorem: Theorem, result: Result<ConditionReport>) -> Result<ConditionReport> {
    match result {
        Ok(r) if r.matched() => Ok(r),
        Ok(r) => Err(not_met(theorem, &r)),
        Err(Error::NoPattern { report, .. }) => Err(not_met(theorem, &report)),
        Err(e @ (Error::WrongLap { .. } | Error::NotReversing { .. } | Error::NoCharacteristicInterval { .. })) => {
            Err(Error::ConditionsNotMet { theorem: theorem.to_string(), clause: e.to_string() })
        }
        Err(Error::EvenFixedPointCount { count }) => Err(Error::ConditionsNotMet {
            theorem: theorem.to_string(),
            clause: format!("{count} fixed points on K; no order-reversing pairing"),
        }),
        Err(e) => Err(e),
    }
}

/// Increasing root, `K` the first lap.
pub fn construct_t21(f: &PmFunction, opts: &ConstructOptions) -> Result<RootFunction> {
    let r = matched(Theorem::T21, match_t21(f))?;
    let u = r.u_index.expect("matched report carries u");
    let phi = MonotoneSegment::from_lap(f, 0);
    let kernel = inc_root_general(&phi, Some(f.fc(2)), Some(f.fc(3)), opts.settings)?;
    let v = f.lap_count() - 1;
    let pieces = (0..=v)
        .map(|i| match i {
            0 => Piece::Kernel,
            1 | 2 => Piece::Inverse { of_lap: 0 },
            i if i < u => Piece::Inverse { of_lap: 1 },
            _ => Piece::Inverse { of_lap: 2 },
        })
        .collect();
    let root = RootFunction::assemble(f.clone(), 0, KernelRoot::Increasing(kernel), pieces, Theorem::T21, r.theorem_case)?;
    Ok(root.with_report(r))
}

fn pocket_pieces(k: usize, laps: usize, pattern: &FortPattern, schedule: &Schedule) -> Vec<Piece> {
    let mut pieces = vec![Piece::Inverse { of_lap: k }; laps];
    pieces[k] = Piece::Kernel;
    for (p, c) in pattern.left_pockets.iter().zip(&schedule.left).chain(pattern.right_pockets.iter().zip(&schedule.right)) {
        for lap in p.laps() {
            pieces[lap] = Piece::Inverse { of_lap: c.lap(k) };
        }
    }
    pieces
}

/// Increasing root, `K` a middle lap.
pub fn construct_t22(f: &PmFunction, opts: &ConstructOptions) -> Result<RootFunction> {
    let r = matched(Theorem::T22, match_t22(f, opts.mode))?;
    let k = r.lap_index;
    let pattern = r.pattern.clone().expect("matched report carries a pattern");
    let phi = MonotoneSegment::from_lap(f, k);
    let kernel = inc_root_general(&phi, Some(f.fc(k + 2)), Some(f.fc(k - 1)), opts.settings)?;
    let schedule = Schedule { left: pattern.left_schedule(), right: pattern.right_schedule() };
    let pieces = pocket_pieces(k, f.lap_count(), &pattern, &schedule);
    let mut root = RootFunction::assemble(f.clone(), k, KernelRoot::Increasing(kernel), pieces, Theorem::T22, r.theorem_case)?;
    root.set_schedule(Some(schedule));
    Ok(root.with_report(r))
}

/// Decreasing root, `K` the first lap.
pub fn construct_t23(f: &PmFunction, opts: &ConstructOptions) -> Result<RootFunction> {
    let r = matched(Theorem::T23, match_t23(f))?;
    let phi = MonotoneSegment::from_lap(f, 0);
    let kernel = dec_root_on_k(&phi, f.fc(1), f.c(0), opts.settings)?;
    let pieces = (0..f.lap_count())
        .map(|i| match i {
            0 => Piece::Kernel,
            1 => Piece::Inverse { of_lap: 0 },
            _ => Piece::Inverse { of_lap: 1 },
        })
        .collect();
    let root = RootFunction::assemble(f.clone(), 0, KernelRoot::Decreasing(kernel), pieces, Theorem::T23, r.theorem_case)?;
    Ok(root.with_report(r))
}

/// Decreasing root, `K` a middle lap. Pocket maps are found by propagating
/// range inclusion and junction continuity outward from `K`.
pub fn construct_t24(f: &PmFunction, opts: &ConstructOptions) -> Result<RootFunction> {
    let r = matched(Theorem::T24, match_t24(f, opts.mode))?;
    let k = r.lap_index;
    let pattern = r.pattern.clone().expect("matched report carries a pattern");
    let phi = MonotoneSegment::from_lap(f, k);
    let kernel = dec_root_on_k(&phi, f.fc(k - 1), f.fc(k + 2), opts.settings)?;
    let mut pieces = vec![Piece::Inverse { of_lap: k }; f.lap_count()];
    pieces[k] = Piece::Kernel;
    let scaffold = RootFunction::unchecked(f.clone(), k, KernelRoot::Decreasing(kernel.clone()), pieces, Theorem::T24, r.theorem_case)?;
    let left = propagate(&scaffold, &pattern, Side::Left, opts.prefer_schedule)?;
    let right = propagate(&scaffold, &pattern, Side::Right, opts.prefer_schedule)?;
    let schedule = Schedule { left, right };
    let pieces = pocket_pieces(k, f.lap_count(), &pattern, &schedule);
    let mut root = RootFunction::assemble(f.clone(), k, KernelRoot::Decreasing(kernel), pieces, Theorem::T24, r.theorem_case)?;
    root.set_schedule(Some(schedule));
    Ok(root.with_report(r))
}

#[derive(Clone, Copy, PartialEq)]
enum Side {
    Left,
    Right,
}

const CHOICES: [InverseChoice; 3] = [InverseChoice::KMinus1, InverseChoice::K, InverseChoice::KPlus1];

/// Enumerates every pocket assignment on one side that is consistent with
/// range inclusion and junction continuity.
fn propagate(root: &RootFunction, pattern: &FortPattern, side: Side, prefer_schedule: bool) -> Result<Vec<InverseChoice>> {
    let k = root.kernel_lap;
    let f = &root.base;
    let pockets = match side {
        Side::Left => &pattern.left_pockets,
        Side::Right => &pattern.right_pockets,
    };
    if pockets.is_empty() {
        return Ok(Vec::new());
    }
    let mut ranges = [(0.0, 0.0); 3];
    for (n, c) in CHOICES.iter().enumerate() {
        ranges[n] = root.lap_image_base(c.lap(k))?;
    }
    // the junction of pocket j with the part already assembled
    let junction = |j: usize| match side {
        Side::Left => pockets[j].to,
        Side::Right => pockets[j].from,
    };
    let flank = match side {
        Side::Left => k - 1,
        Side::Right => k + 1,
    };
    let start = root.eval_base_on_lap(flank, f.c(junction(0)))?;

    let mut solutions: Vec<Vec<InverseChoice>> = Vec::new();
    let mut stack: Vec<(Vec<InverseChoice>, f64)> = vec![(Vec::new(), start)];
    let mut first_dead: Option<(usize, Vec<String>)> = None;
    while let Some((prefix, value)) = stack.pop() {
        let j = prefix.len();
        if j == pockets.len() {
            solutions.push(prefix);
            if solutions.len() >= MAX_ASSIGNMENTS {
                break;
            }
            continue;
        }
        let p = &pockets[j];
        let y = f.c(junction(j));
        let fy = f.value_at(y);
        let mut extended = false;
        for (n, c) in CHOICES.iter().enumerate().rev() {
            let (lo, hi) = ranges[n];
            if p.min < lo - ASSEMBLY_TOL || p.max > hi + ASSEMBLY_TOL {
                continue;
            }
            let here = root.inverse_base_on_lap(c.lap(k), fy)?;
            if (here - value).abs() > ASSEMBLY_TOL {
                continue;
            }
            let far = match side {
                Side::Left => f.c(p.from),
                Side::Right => f.c(p.to),
            };
            let next = root.inverse_base_on_lap(c.lap(k), f.value_at(far))?;
            let mut ext = prefix.clone();
            ext.push(*c);
            stack.push((ext, next));
            extended = true;
        }
        if !extended && first_dead.as_ref().is_none_or(|(d, _)| j < *d) {
            let why = CHOICES
                .iter()
                .zip(ranges)
                .map(|(c, (lo, hi))| format!("{c:?}: range [{lo}, {hi}] vs pocket [{}, {}]", p.min, p.max))
                .collect();
            first_dead = Some((j, why));
        }
    }
    let side_name = match side {
        Side::Left => "left",
        Side::Right => "right",
    };
    match solutions.len() {
        0 => {
            let (j, _) = first_dead.unwrap_or((0, Vec::new()));
            let p = &pockets[j];
            let lap = p.from;
            let (rlo, rhi) = ranges[1];
            Err(Error::RangeViolation { lap, source_lap: k, image_lo: p.min, image_hi: p.max, range_lo: rlo, range_hi: rhi })
        }
        1 => Ok(solutions.pop().unwrap()),
        _ => {
            let prior: Vec<InverseChoice> = pockets.iter().map(|p| p.choice.swapped()).collect();
            if prefer_schedule && solutions.contains(&prior) {
                return Ok(prior);
            }
            let pocket = (0..pockets.len()).find(|&j| solutions.iter().any(|s| s[j] != solutions[0][j])).unwrap_or(0);
            let mut candidates: Vec<String> = solutions.iter().map(|s| format!("{:?}", s[pocket])).collect();
            candidates.sort();
            candidates.dedup();
            Err(Error::AssemblyAmbiguous { side: side_name, pocket, candidates })
        }
    }
}

/// Builds the root for a named theorem, mirroring first when `K` is the last lap.
pub fn construct(f: &PmFunction, theorem: Theorem, opts: &ConstructOptions) -> Result<RootFunction> {
    let (g, mirrored) = oriented(f)?;
    let mut root = match theorem {
        Theorem::T21 => construct_t21(&g, opts),
        Theorem::T22 => construct_t22(&g, opts),
        Theorem::T23 => construct_t23(&g, opts),
        Theorem::T24 => construct_t24(&g, opts),
    }?;
    root.set_mirrored(mirrored);
    Ok(root)
}

/// `F` itself, or its mirror image when the characteristic interval is the
/// last of several laps.
fn oriented(f: &PmFunction) -> Result<(PmFunction, bool)> {
    let k = characteristic_interval(f)?;
    let laps = f.lap_count();
    if laps > 1 && k.lap_index == laps - 1 {
        Ok((f.mirror_conjugate(), true))
    } else {
        Ok((f.clone(), false))
    }
}

/// Tries every applicable construction in order and returns the first success.
pub fn construct_auto(f: &PmFunction, class: RootClass, opts: &ConstructOptions) -> Result<RootFunction> {
    let (g, mirrored) = match oriented(f) {
        Ok(x) => x,
        Err(e) => return Err(Error::NoApplicableTheorem { reason: e.to_string(), reports: Vec::new() }),
    };
    let k = characteristic_interval(&g)?.lap_index;
    if g.lap_count() == 1 {
        return Err(Error::NoApplicableTheorem { reason: "F is monotone (height 0)".into(), reports: Vec::new() });
    }
    let order: &[Theorem] = if k == 0 { &[Theorem::T21, Theorem::T23] } else { &[Theorem::T22, Theorem::T24] };
    let mut reports = Vec::new();
    let mut reasons = Vec::new();
    for &t in order.iter().filter(|t| class.allows(**t)) {
        let report = match t {
            Theorem::T21 => match_t21(&g),
            Theorem::T22 => match_t22(&g, opts.mode),
            Theorem::T23 => match_t23(&g),
            Theorem::T24 => match_t24(&g, opts.mode),
        };
        let report = match report {
            Ok(r) => r,
            Err(Error::NoPattern { report, detail }) => {
                reasons.push(format!("{t}: {detail}"));
                reports.push(*report);
                continue;
            }
            Err(e) => {
                reasons.push(format!("{t}: {e}"));
                continue;
            }
        };
        if !report.matched() {
            reasons.push(format!("{t}: {}", report.failed_clause.clone().unwrap_or_default()));
            reports.push(report);
            continue;
        }
        let mut root = match t {
            Theorem::T21 => construct_t21(&g, opts),
            Theorem::T22 => construct_t22(&g, opts),
            Theorem::T23 => construct_t23(&g, opts),
            Theorem::T24 => construct_t24(&g, opts),
        }?;
        root.set_mirrored(mirrored);
        return Ok(root);
    }
    for r in reports.iter_mut() {
        r.mirrored = mirrored;
    }
    Err(Error::NoApplicableTheorem {
        reason: if reasons.is_empty() { "no construction allowed for the requested class".into() } else { reasons.join("; ") },
        reports,
    })
}
