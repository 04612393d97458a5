//! Known existence and nonexistence results for roots of maps that increase
//! on `K` but violate the characteristic endpoints condition.
//!
//! This is a lookup, not a decision procedure: any query that no row covers
//! is `Unknown`.

use serde::{Deserialize, Serialize};

use super::{check_kplus, check_kplus0};
use crate::error::{Error, Result};
use crate::kernel::Orientation;
use crate::pm::{height, HeightValue, PmFunction, DEFAULT_HEIGHT_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Verdict {
    Existence,
    Nonexistence,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ExistenceVerdict {
    pub order: usize,
    pub fort_count: usize,
    pub root_class: Orientation,
    pub root_height: usize,
    pub verdict: Verdict,
    /// The matching row, if any.
    pub row: Option<String>,
}

#[derive(Clone, Copy)]
enum OrderBucket {
    Two,
    Between,
    EqualsN,
    NPlusOne,
}

#[derive(Clone, Copy)]
enum HeightRule {
    Eq(i64),
    Le(i64),
    Lt(i64),
}

struct Row {
    bucket: OrderBucket,
    class: Orientation,
    /// Bound expressed as `n + offset`, except for `Eq` on order 2.
    rule: HeightRule,
    offset_from_n: bool,
    verdict: Verdict,
    label: &'static str,
}

use HeightRule::*;
use Orientation::{Decreasing as Dn, Increasing as Up};
use OrderBucket::*;

const ROWS: [Row; 9] = [
    Row { bucket: Two, class: Up, rule: Eq(1), offset_from_n: false, verdict: Verdict::Nonexistence, label: "n = 2, f increasing on K, H(f) = 1" },
    Row { bucket: Two, class: Dn, rule: Eq(1), offset_from_n: false, verdict: Verdict::Existence, label: "n = 2, f decreasing on K, H(f) = 1" },
    Row { bucket: Between, class: Up, rule: Lt(0), offset_from_n: true, verdict: Verdict::Nonexistence, label: "2 < n < N(F), f increasing on K, H(f) < n" },
    Row { bucket: Between, class: Dn, rule: Lt(-1), offset_from_n: true, verdict: Verdict::Nonexistence, label: "2 < n < N(F), f decreasing on K, H(f) < n - 1" },
    Row { bucket: EqualsN, class: Up, rule: Le(0), offset_from_n: true, verdict: Verdict::Nonexistence, label: "n = N(F), f increasing on K, H(f) <= n" },
    Row { bucket: EqualsN, class: Dn, rule: Lt(-1), offset_from_n: true, verdict: Verdict::Nonexistence, label: "n = N(F), f decreasing on K, H(f) < n - 1" },
    Row { bucket: EqualsN, class: Dn, rule: Eq(0), offset_from_n: true, verdict: Verdict::Existence, label: "n = N(F), f decreasing on K, H(f) = n" },
    Row { bucket: NPlusOne, class: Up, rule: Le(0), offset_from_n: true, verdict: Verdict::Nonexistence, label: "n = N(F) + 1, f increasing on K, H(f) <= n" },
    Row { bucket: NPlusOne, class: Dn, rule: Lt(-1), offset_from_n: true, verdict: Verdict::Nonexistence, label: "n = N(F) + 1, f decreasing on K, H(f) < n - 1" },
];

impl Row {
    fn matches(&self, n: usize, forts: usize, class: Orientation, h: usize) -> bool {
        let in_bucket = match self.bucket {
            Two => n == 2,
            Between => n > 2 && n < forts,
            EqualsN => n == forts,
            NPlusOne => n == forts + 1,
        };
        let base = if self.offset_from_n { n as i64 } else { 0 };
        let h = h as i64;
        let height_ok = match self.rule {
            Eq(c) => h == base + c,
            Le(c) => h <= base + c,
            Lt(c) => h < base + c,
        };
        in_bucket && self.class == class && height_ok
    }
}

/// Pure row lookup on `(n, N(F), class of f on K, H(f))`.
pub fn lookup_existence(order: usize, fort_count: usize, class: Orientation, root_height: usize) -> Result<ExistenceVerdict> {
    let hits: Vec<&Row> = ROWS.iter().filter(|r| r.matches(order, fort_count, class, root_height)).collect();
    let (verdict, row) = match hits.as_slice() {
        [] => (Verdict::Unknown, None),
        [first, rest @ ..] => {
            if rest.iter().any(|r| r.verdict != first.verdict) {
                return Err(Error::InternalInconsistency(format!(
                    "conflicting rows for n={order}, N={fort_count}: {:?}",
                    hits.iter().map(|r| r.label).collect::<Vec<_>>()
                )));
            }
            let label = hits.iter().map(|r| r.label).collect::<Vec<_>>().join("; ");
            (first.verdict, Some(label))
        }
    };
    Ok(ExistenceVerdict { order, fort_count, root_class: class, root_height, verdict, row })
}

/// Row lookup for a concrete map, after checking it is in the table's scope:
/// height 1, increasing on `K`, characteristic endpoints condition violated.
pub fn classify_existence(f: &PmFunction, order: usize, class: Orientation, root_height: usize) -> Result<ExistenceVerdict> {
    let h = height(f, DEFAULT_HEIGHT_CAP)?;
    if h.value != HeightValue::Finite(1) {
        return Err(Error::PreconditionFailed(format!("height must be 1, got {}", h.value)));
    }
    if !check_kplus(f)? {
        return Err(Error::PreconditionFailed("F must be strictly increasing on K".into()));
    }
    if check_kplus0(f)?.holds {
        return Err(Error::PreconditionFailed("the characteristic endpoints condition must fail".into()));
    }
    lookup_existence(order, f.fort_count(), class, root_height)
}
