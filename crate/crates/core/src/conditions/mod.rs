//! Hypothesis checks deciding which square-root construction applies.

mod pattern;
mod table;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monotone::MonotoneSegment;
use crate::pm::{characteristic_interval, PmFunction};

pub use pattern::{search_pattern, FortPattern, InverseChoice, PatternMode, Pocket};
pub use table::{classify_existence, lookup_existence, ExistenceVerdict, Verdict};

/// Tolerance for equalities between computed ordinates.
pub const EQ_TOL: f64 = 1e-12;

/// Samples per interval in the sign test of condition (iii).
pub const REVERSING_SAMPLES: usize = 33;

pub(crate) fn eq(x: f64, y: f64) -> bool {
    (x - y).abs() <= EQ_TOL
}

/// `x < y` with a margin, so that near-equalities never count as strict.
pub(crate) fn lt(x: f64, y: f64) -> bool {
    y - x > EQ_TOL
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    T21,
    T22,
    T23,
    T24,
}

impl Theorem {
    pub fn parse(s: &str) -> Option<Theorem> {
        Some(match s.to_ascii_lowercase().as_str() {
            "t21" => Theorem::T21,
            "t22" => Theorem::T22,
            "t23" => Theorem::T23,
            "t24" => Theorem::T24,
            _ => return None,
        })
    }

    /// Whether the resulting root increases on the characteristic interval.
    pub fn increasing_root(self) -> bool {
        matches!(self, Theorem::T21 | Theorem::T22)
    }
}

impl std::fmt::Display for Theorem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TheoremCase {
    #[serde(rename = "T21_case1")]
    T21Case1,
    #[serde(rename = "T21_case2")]
    T21Case2,
    #[serde(rename = "T21_case3")]
    T21Case3,
    #[serde(rename = "T22_case1")]
    T22Case1,
    #[serde(rename = "T22_case2")]
    T22Case2,
    #[serde(rename = "T22_case3")]
    T22Case3,
    T23,
    #[serde(rename = "T24_case1")]
    T24Case1,
    #[serde(rename = "T24_case2")]
    T24Case2,
    #[serde(rename = "T24_case3")]
    T24Case3,
    None,
}

impl TheoremCase {
    pub fn is_none(self) -> bool {
        self == TheoremCase::None
    }

    /// 1-based index of the matched endpoint condition.
    pub fn number(self) -> Option<usize> {
        use TheoremCase::*;
        match self {
            T21Case1 | T22Case1 | T24Case1 => Some(1),
            T21Case2 | T22Case2 | T24Case2 => Some(2),
            T21Case3 | T22Case3 | T24Case3 => Some(3),
            T23 => Some(1),
            None => Option::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EndpointWitness {
    pub x: f64,
    pub value: f64,
    /// `"a'"` or `"b'"`.
    pub endpoint: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct KPlusZero {
    pub holds: bool,
    pub witnesses: Vec<EndpointWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SignWitness {
    pub left: [f64; 2],
    pub right: [f64; 2],
    pub pairs_checked: usize,
    pub max_product: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReversingReport {
    pub fixed_points: Vec<f64>,
    pub center_fixed: f64,
    /// `(p, ω(p))` for every fixed point.
    pub omega: Vec<[f64; 2]>,
    pub endpoints_agree: bool,
    pub condition_iii_witnesses: Vec<SignWitness>,
    pub is_reversing: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ConditionReport {
    pub theorem: Option<Theorem>,
    pub lap_index: usize,
    pub lap_count: usize,
    pub k_plus: bool,
    pub k_plus_zero: KPlusZero,
    pub theorem_case: TheoremCase,
    /// The matched chain of (in)equalities, with values substituted.
    pub matched_chain: Vec<String>,
    pub failed_clause: Option<String>,
    pub max_range: f64,
    pub u_index: Option<usize>,
    pub mirrored: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pattern: Option<FortPattern>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reversing: Option<ReversingReport>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl ConditionReport {
    pub fn matched(&self) -> bool {
        !self.theorem_case.is_none()
    }

    fn base(f: &PmFunction, theorem: Theorem) -> Result<Self> {
        let k = characteristic_interval(f)?;
        let k_plus = f.lap_increasing(k.lap_index);
        let mut notes = Vec::new();
        if !k_plus {
            notes.push("F decreases on its characteristic interval; no increasing-K construction applies".into());
        }
        Ok(ConditionReport {
            theorem: Some(theorem),
            lap_index: k.lap_index,
            lap_count: f.lap_count(),
            k_plus,
            k_plus_zero: check_kplus0(f)?,
            theorem_case: TheoremCase::None,
            matched_chain: Vec::new(),
            failed_clause: None,
            max_range: f.range().1,
            u_index: None,
            mirrored: false,
            pattern: None,
            reversing: None,
            notes,
        })
    }

    fn fail(mut self, clause: impl Into<String>) -> Self {
        self.theorem_case = TheoremCase::None;
        self.failed_clause = Some(clause.into());
        self
    }
}

/// Whether `F` is strictly increasing on its characteristic interval.
pub fn check_kplus(f: &PmFunction) -> Result<bool> {
    let k = characteristic_interval(f)?;
    Ok(f.lap_increasing(k.lap_index))
}

/// The characteristic endpoints condition, with every point where `F`
/// reaches a non-fixed endpoint of `K` as a witness.
pub fn check_kplus0(f: &PmFunction) -> Result<KPlusZero> {
    let k = characteristic_interval(f)?;
    let [a1, b1] = k.bounds;
    let mut witnesses = Vec::new();
    for (target, name) in [(a1, "a'"), (b1, "b'")] {
        if eq(f.value_at(target), target) {
            continue;
        }
        for (&x, &y) in f.xs().iter().zip(f.ys()) {
            if eq(y, target) {
                witnesses.push(EndpointWitness { x, value: y, endpoint: name.into() });
            }
        }
    }
    witnesses.sort_by(|p, q| p.x.total_cmp(&q.x));
    Ok(KPlusZero { holds: witnesses.is_empty(), witnesses })
}

fn require_lap(report: &ConditionReport, first: bool) -> Result<()> {
    let (lap, laps) = (report.lap_index, report.lap_count);
    let ok = if first { lap == 0 } else { lap >= 1 && lap + 2 <= laps };
    if ok {
        Ok(())
    } else {
        Err(Error::WrongLap {
            lap,
            laps,
            expected: if first { "the first lap" } else { "a middle lap (1 <= k <= v-1)" },
        })
    }
}

fn fmt_chain(parts: &[(&str, f64)], ops: &[&str]) -> String {
    let mut s = String::new();
    for (i, (name, v)) in parts.iter().enumerate() {
        if i > 0 {
            s.push_str(&format!(" {} ", ops[i - 1]));
        }
        s.push_str(&format!("{name}={v}"));
    }
    s
}

/// Increasing root, characteristic interval the first lap.
pub fn match_t21(f: &PmFunction) -> Result<ConditionReport> {
    let mut r = ConditionReport::base(f, Theorem::T21)?;
    require_lap(&r, true)?;
    if !r.k_plus {
        return Ok(r.fail("F is not strictly increasing on K"));
    }
    let v = f.lap_count() - 1;
    if v < 3 {
        return Ok(r.fail(format!("needs at least 3 forts, F has {v}")));
    }
    let c = |i: usize| f.c(i);
    let fc = |i: usize| f.fc(i);
    let m = r.max_range;
    let left_fixed = eq(fc(2), c(0)) && eq(c(0), fc(0));
    let left_free = lt(c(0), fc(2)) && lt(fc(2), fc(0));
    let right_fixed = eq(fc(3), c(1)) && eq(c(1), fc(1));
    let right_free = lt(fc(1), fc(3)) && lt(fc(3), c(1));
    let (case, chain) = if left_fixed && right_free && eq(c(1), m) {
        (
            TheoremCase::T21Case1,
            vec![
                fmt_chain(&[("F(c2)", fc(2)), ("c0", c(0)), ("F(c0)", fc(0))], &["=", "="]),
                fmt_chain(&[("F(c1)", fc(1)), ("F(c3)", fc(3)), ("c1", c(1)), ("M", m)], &["<", "<", "="]),
            ],
        )
    } else if left_free && right_fixed {
        (
            TheoremCase::T21Case2,
            vec![
                fmt_chain(&[("c0", c(0)), ("F(c2)", fc(2)), ("F(c0)", fc(0))], &["<", "<"]),
                fmt_chain(&[("F(c3)", fc(3)), ("c1", c(1)), ("F(c1)", fc(1))], &["=", "="]),
            ],
        )
    } else if left_free && right_free {
        (
            TheoremCase::T21Case3,
            vec![
                fmt_chain(&[("c0", c(0)), ("F(c2)", fc(2)), ("F(c0)", fc(0))], &["<", "<"]),
                fmt_chain(&[("F(c1)", fc(1)), ("F(c3)", fc(3)), ("c1", c(1))], &["<", "<"]),
            ],
        )
    } else {
        let clause = if !(left_fixed || left_free) {
            format!(
                "neither F(c2)=c0=F(c0) nor c0<F(c2)<F(c0) (c0={}, F(c2)={}, F(c0)={})",
                c(0),
                fc(2),
                fc(0)
            )
        } else if !(right_fixed || right_free) {
            format!(
                "neither F(c3)=c1=F(c1) nor F(c1)<F(c3)<c1 (F(c1)={}, F(c3)={}, c1={})",
                fc(1),
                fc(3),
                c(1)
            )
        } else {
            format!("F(c2)=c0=F(c0) needs F(c1)<F(c3)<c1=M (c1={}, M={m})", c(1))
        };
        return Ok(r.fail(clause));
    };
    let Some(u) = (4..=v + 1).find(|&i| eq(fc(i), c(0))) else {
        return Ok(r.fail(format!("no u in 4..={} with F(c_u) = c0 = {}", v + 1, c(0))));
    };
    r.u_index = Some(u);
    let max_u = f.max_on(0, u);
    if !eq(max_u, fc(3)) {
        return Ok(r.fail(format!("F(c3) = {} differs from max over [c0, c{u}] = {max_u}", fc(3))));
    }
    r.theorem_case = case;
    r.matched_chain = chain;
    r.matched_chain.push(format!("u={u}: F(c{u})={} = c0; max over [c0,c{u}] = {max_u} = F(c3)", fc(u)));
    Ok(r)
}

fn middle_common(f: &PmFunction, theorem: Theorem) -> Result<ConditionReport> {
    let r = ConditionReport::base(f, theorem)?;
    require_lap(&r, false)?;
    Ok(r)
}

fn attach_pattern(f: &PmFunction, mut r: ConditionReport, mode: PatternMode) -> Result<ConditionReport> {
    match search_pattern(f, r.lap_index, mode) {
        Ok(p) => {
            r.pattern = Some(p);
            Ok(r)
        }
        Err(detail) => {
            let detail_clone = detail.clone();
            let failed = r.fail(format!("fort pattern: {detail}"));
            Err(Error::NoPattern { detail: detail_clone, report: Box::new(failed) })
        }
    }
}

/// Increasing root, characteristic interval a middle lap.
pub fn match_t22(f: &PmFunction, mode: PatternMode) -> Result<ConditionReport> {
    let mut r = middle_common(f, Theorem::T22)?;
    if !r.k_plus {
        return Ok(r.fail("F is not strictly increasing on K"));
    }
    if r.k_plus_zero.holds {
        return Ok(r.fail("the characteristic endpoints condition holds; this construction targets its failure"));
    }
    let k = r.lap_index;
    let (ck, ck1) = (f.c(k), f.c(k + 1));
    let (fk, fk1, fkm, fkp2) = (f.fc(k), f.fc(k + 1), f.fc(k - 1), f.fc(k + 2));
    let left_free = lt(ck, fkp2) && lt(fkp2, fk);
    let left_fixed = eq(ck, fk) && eq(fk, fkp2);
    let right_free = lt(fk1, fkm) && lt(fkm, ck1);
    let right_fixed = eq(fkm, ck1) && eq(ck1, fk1);
    let l_free = || fmt_chain(&[("c_k", ck), ("F(c_{k+2})", fkp2), ("F(c_k)", fk)], &["<", "<"]);
    let r_free = || fmt_chain(&[("F(c_{k+1})", fk1), ("F(c_{k-1})", fkm), ("c_{k+1}", ck1)], &["<", "<"]);
    let (case, chain) = if left_free && right_fixed {
        (
            TheoremCase::T22Case1,
            vec![l_free(), fmt_chain(&[("F(c_{k-1})", fkm), ("c_{k+1}", ck1), ("F(c_{k+1})", fk1)], &["=", "="])],
        )
    } else if left_fixed && right_free {
        (
            TheoremCase::T22Case2,
            vec![fmt_chain(&[("c_k", ck), ("F(c_k)", fk), ("F(c_{k+2})", fkp2)], &["=", "="]), r_free()],
        )
    } else if left_free && right_free {
        (TheoremCase::T22Case3, vec![l_free(), r_free()])
    } else {
        let clause = if !(left_free || left_fixed) {
            format!("neither c_k<F(c_{{k+2}})<F(c_k) nor c_k=F(c_k)=F(c_{{k+2}}) (c_k={ck}, F(c_{{k+2}})={fkp2}, F(c_k)={fk})")
        } else {
            format!(
                "neither F(c_{{k+1}})<F(c_{{k-1}})<c_{{k+1}} nor F(c_{{k-1}})=c_{{k+1}}=F(c_{{k+1}}) (F(c_{{k+1}})={fk1}, F(c_{{k-1}})={fkm}, c_{{k+1}}={ck1})"
            )
        };
        return Ok(r.fail(clause));
    };
    r.theorem_case = case;
    r.matched_chain = chain;
    attach_pattern(f, r, mode)
}

/// Decreasing root, characteristic interval the first lap.
pub fn match_t23(f: &PmFunction) -> Result<ConditionReport> {
    let mut r = ConditionReport::base(f, Theorem::T23)?;
    require_lap(&r, true)?;
    if !r.k_plus {
        return Ok(r.fail("F is not strictly increasing on K"));
    }
    if f.lap_count() < 2 {
        return Ok(r.fail("F has no forts, so c2 does not exist"));
    }
    let (c0, c1) = (f.c(0), f.c(1));
    let (f0, f1, f2) = (f.fc(0), f.fc(1), f.fc(2));
    if !lt(c0, f0) {
        return Ok(r.fail(format!("F(c0) > c0 fails (F(c0)={f0}, c0={c0})")));
    }
    if !lt(f1, c1) {
        return Ok(r.fail(format!("F(c1) < c1 fails (F(c1)={f1}, c1={c1})")));
    }
    if !eq(f2, c0) {
        return Ok(r.fail(format!("F(c2) = c0 fails (F(c2)={f2}, c0={c0})")));
    }
    let rev = check_reversing_correspondence(f, r.lap_index)?;
    let reversing = rev.is_reversing;
    r.reversing = Some(rev);
    if !reversing {
        return Ok(r.fail("F is not reversing-correspondence on K"));
    }
    r.theorem_case = TheoremCase::T23;
    r.matched_chain = vec![
        format!("F(c0)={f0} > c0={c0}"),
        format!("F(c1)={f1} < c1={c1}"),
        format!("F(c2)={f2} = c0={c0}"),
    ];
    Ok(r)
}

/// Decreasing root, characteristic interval a middle lap.
pub fn match_t24(f: &PmFunction, mode: PatternMode) -> Result<ConditionReport> {
    let mut r = middle_common(f, Theorem::T24)?;
    if !r.k_plus {
        return Ok(r.fail("F is not strictly increasing on K"));
    }
    if r.k_plus_zero.holds {
        return Ok(r.fail("the characteristic endpoints condition holds; this construction targets its failure"));
    }
    let k = r.lap_index;
    let (ck, ck1) = (f.c(k), f.c(k + 1));
    let (fk, fk1, fkm, fkp2) = (f.fc(k), f.fc(k + 1), f.fc(k - 1), f.fc(k + 2));
    let names = [("c_k", ck), ("F(c_{k+2})", fkp2), ("F(c_k)", fk), ("F(c_{k+1})", fk1), ("F(c_{k-1})", fkm), ("c_{k+1}", ck1)];
    let vals: Vec<f64> = names.iter().map(|p| p.1).collect();
    let holds = |ops: &[&str]| {
        ops.iter().enumerate().all(|(i, op)| if *op == "=" { eq(vals[i], vals[i + 1]) } else { lt(vals[i], vals[i + 1]) })
    };
    let candidates = [
        (TheoremCase::T24Case1, ["=", "<", "<", "=", "<"]),
        (TheoremCase::T24Case2, ["<", "<", "<", "<", "<"]),
        (TheoremCase::T24Case3, ["<", "=", "<", "<", "="]),
    ];
    let Some((case, ops)) = candidates.iter().find(|(_, ops)| holds(ops)) else {
        return Ok(r.fail(format!(
            "no decreasing-root chain holds for {}",
            fmt_chain(&names, &["?", "?", "?", "?", "?"])
        )));
    };
    let rev = check_reversing_correspondence(f, k)?;
    if !rev.is_reversing {
        return Err(Error::NotReversing { detail: format!("fixed points {:?}", rev.fixed_points) });
    }
    r.reversing = Some(rev);
    r.theorem_case = *case;
    r.matched_chain = vec![fmt_chain(&names, ops)];
    attach_pattern(f, r, mode)
}

/// Fixed-point structure of `F` on lap `lap` and the order-reversing pairing test.
pub fn check_reversing_correspondence(f: &PmFunction, lap: usize) -> Result<ReversingReport> {
    let phi = MonotoneSegment::from_lap(f, lap);
    if !phi.is_increasing() {
        return Err(Error::PreconditionFailed(format!("F is not increasing on lap {lap}")));
    }
    reversing_for_segment(&phi)
}

pub fn reversing_for_segment(phi: &MonotoneSegment) -> Result<ReversingReport> {
    let fp = phi.fixed_points()?;
    let n = fp.len();
    if n % 2 == 0 {
        return Err(Error::EvenFixedPointCount { count: n });
    }
    let (a, b) = phi.domain();
    let center = fp[n / 2];
    let omega: Vec<[f64; 2]> = (0..n).map(|i| [fp[i], fp[n - 1 - i]]).collect();
    let a_fixed = eq(phi.eval(a), a);
    let b_fixed = eq(phi.eval(b), b);
    let endpoints_agree = a_fixed == b_fixed;
    let d = |x: f64| phi.eval(x) - x;
    let samples = |lo: f64, hi: f64| -> Vec<f64> {
        (1..=REVERSING_SAMPLES).map(|i| lo + (hi - lo) * i as f64 / (REVERSING_SAMPLES + 1) as f64).collect()
    };
    let mut witnesses = Vec::new();
    for i in 0..n / 2 {
        let (x1, x2) = (fp[i], fp[i + 1]);
        let (y1, y2) = (fp[n - 2 - i], fp[n - 1 - i]);
        let dl: Vec<f64> = samples(x1, x2).into_iter().map(d).collect();
        let dr: Vec<f64> = samples(y1, y2).into_iter().map(d).collect();
        let max_product = dl.iter().flat_map(|p| dr.iter().map(move |q| p * q)).fold(f64::NEG_INFINITY, f64::max);
        witnesses.push(SignWitness {
            left: [x1, x2],
            right: [y1, y2],
            pairs_checked: dl.len() * dr.len(),
            max_product,
            passed: max_product < 0.0,
        });
    }
    let mut notes = vec![
        "condition (iii) is checked on consecutive fixed points only; the stretches between a non-fixed endpoint and the outermost fixed points are not constrained".to_string(),
    ];
    if !a_fixed && !b_fixed {
        let left = d(0.5 * (a + fp[0]));
        let right = d(0.5 * (fp[n - 1] + b));
        notes.push(format!(
            "outer stretches move {} and {}",
            if left > 0.0 { "up" } else { "down" },
            if right > 0.0 { "up" } else { "down" }
        ));
    }
    let is_reversing = endpoints_agree && witnesses.iter().all(|w| w.passed);
    Ok(ReversingReport {
        fixed_points: fp,
        center_fixed: center,
        omega,
        endpoints_agree,
        condition_iii_witnesses: witnesses,
        is_reversing,
        notes,
    })
}
