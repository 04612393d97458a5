//! Fort-pattern search for middle-lap characteristic intervals.
//!
//! Outside `[c_{k-1}, c_{k+2}]` the domain is cut at selected forts into
//! pockets. Pocket `j` on the left is `[c_{ℓ_{j+1}}, c_{ℓ_j}]`, on the right
//! `[c_{r_j}, c_{r_{j+1}}]`; each is assigned one of the three neighbor maps
//! by `j mod 4`, and its image must fit that map's range.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{eq, EQ_TOL};
use crate::pm::PmFunction;

/// How pocket extrema are tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum PatternMode {
    /// Extremum equalities with a max on one side and a min on the other.
    #[default]
    Strict,
    /// Only the inclusions the assembly needs.
    Relaxed,
    /// Both left extrema read as maxima and both right extrema as minima.
    Literal,
}

/// Which neighbor of the kernel inverts a pocket.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum InverseChoice {
    KMinus1,
    K,
    KPlus1,
}

impl InverseChoice {
    pub fn left(j: usize) -> Self {
        match j % 4 {
            0 => InverseChoice::KPlus1,
            2 => InverseChoice::KMinus1,
            _ => InverseChoice::K,
        }
    }

    pub fn right(j: usize) -> Self {
        match j % 4 {
            0 => InverseChoice::KMinus1,
            2 => InverseChoice::KPlus1,
            _ => InverseChoice::K,
        }
    }

    /// The lap whose map is inverted, for a kernel on lap `k`.
    pub fn lap(self, k: usize) -> usize {
        match self {
            InverseChoice::KMinus1 => k - 1,
            InverseChoice::K => k,
            InverseChoice::KPlus1 => k + 1,
        }
    }

    pub fn swapped(self) -> Self {
        match self {
            InverseChoice::KMinus1 => InverseChoice::KPlus1,
            InverseChoice::K => InverseChoice::K,
            InverseChoice::KPlus1 => InverseChoice::KMinus1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Pocket {
    pub j: usize,
    /// Lap-point indices of the pocket ends, left to right.
    pub from: usize,
    pub to: usize,
    pub bounds: [f64; 2],
    pub min: f64,
    pub max: f64,
    pub choice: InverseChoice,
}

impl Pocket {
    /// Laps covered by the pocket.
    pub fn laps(&self) -> std::ops::Range<usize> {
        self.from..self.to
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FortPattern {
    pub mode: PatternMode,
    /// `ℓ_0 = k-1 > ℓ_1 > ... > ℓ_{s+1} = 0`.
    pub left_seq: Vec<usize>,
    /// `r_0 = k+2 < r_1 < ... < r_{t+1} = v+1`.
    pub right_seq: Vec<usize>,
    pub s: Option<usize>,
    pub t: Option<usize>,
    /// `F(c_{k-1})`.
    pub upper: f64,
    /// `F(c_{k+2})`.
    pub lower: f64,
    pub left_pockets: Vec<Pocket>,
    pub right_pockets: Vec<Pocket>,
}

impl FortPattern {
    pub fn left_schedule(&self) -> Vec<InverseChoice> {
        self.left_pockets.iter().map(|p| p.choice).collect()
    }

    pub fn right_schedule(&self) -> Vec<InverseChoice> {
        self.right_pockets.iter().map(|p| p.choice).collect()
    }
}

#[derive(Clone, Copy)]
enum Side {
    Left,
    Right,
}

struct Search<'a> {
    f: &'a PmFunction,
    side: Side,
    mode: PatternMode,
    p: f64,
    q: f64,
    terminal: usize,
    failed: HashSet<(usize, usize)>,
}

impl Search<'_> {
    fn junction(&self, j: usize) -> f64 {
        match (self.side, j % 4) {
            (Side::Left, 0 | 1) | (Side::Right, 2 | 3) => self.p,
            _ => self.q,
        }
    }

    fn pocket_ok(&self, j: usize, lo: f64, hi: f64) -> bool {
        let (p, q) = (self.p, self.q);
        let r = j % 4;
        match (self.mode, self.side) {
            (PatternMode::Strict, Side::Left) => (r == 2 || eq(hi, p)) && (r == 0 || eq(lo, q)),
            (PatternMode::Strict, Side::Right) => (r == 2 || eq(lo, q)) && (r == 0 || eq(hi, p)),
            (PatternMode::Literal, Side::Left) => (r == 2 || eq(hi, p)) && (r == 0 || eq(hi, q)),
            (PatternMode::Literal, Side::Right) => (r == 2 || eq(lo, q)) && (r == 0 || eq(lo, p)),
            (PatternMode::Relaxed, side) => {
                let choice = match side {
                    Side::Left => InverseChoice::left(j),
                    Side::Right => InverseChoice::right(j),
                };
                match choice {
                    InverseChoice::K => lo >= q - EQ_TOL && hi <= p + EQ_TOL,
                    InverseChoice::KPlus1 => hi <= p + EQ_TOL,
                    InverseChoice::KMinus1 => lo >= q - EQ_TOL,
                }
            }
        }
    }

    fn extrema(&self, a: usize, b: usize) -> (f64, f64) {
        let (lo, hi) = (a.min(b), a.max(b));
        (self.f.min_on(lo, hi), self.f.max_on(lo, hi))
    }

    /// Sequence of cut indices from `cur` (the `j`-th) to the terminal.
    fn run(&mut self, cur: usize, j: usize) -> Option<Vec<usize>> {
        if self.failed.contains(&(cur, j % 4)) {
            return None;
        }
        let nexts: Vec<usize> = match self.side {
            Side::Left => (1..cur).rev().chain(std::iter::once(0)).collect(),
            Side::Right => (cur + 1..self.terminal).chain(std::iter::once(self.terminal)).collect(),
        };
        for next in nexts {
            let (lo, hi) = self.extrema(cur, next);
            if !self.pocket_ok(j, lo, hi) {
                continue;
            }
            if next == self.terminal {
                return Some(vec![next]);
            }
            if !eq(self.f.fc(next), self.junction(j + 1)) {
                continue;
            }
            if let Some(mut rest) = self.run(next, j + 1) {
                rest.insert(0, next);
                return Some(rest);
            }
        }
        self.failed.insert((cur, j % 4));
        None
    }
}

/// Searches for admissible cut sequences on both sides of lap `k`.
///
/// Cuts are tried nearest-first with the terminal endpoint last;
/// dead ends are memoized on `(fort, j mod 4)`.
pub fn search_pattern(f: &PmFunction, k: usize, mode: PatternMode) -> Result<FortPattern, String> {
    let v = f.lap_count() - 1;
    let (p, q) = (f.fc(k - 1), f.fc(k + 2));
    let mut seqs = Vec::new();
    for (side, start, terminal) in [(Side::Left, k - 1, 0), (Side::Right, k + 2, v + 1)] {
        let seq = if start == terminal {
            vec![start]
        } else {
            let mut s = Search { f, side, mode, p, q, terminal, failed: HashSet::new() };
            match s.run(start, 0) {
                Some(rest) => std::iter::once(start).chain(rest).collect(),
                None => {
                    let name = match side {
                        Side::Left => "left",
                        Side::Right => "right",
                    };
                    return Err(format!(
                        "no admissible {name} fort sequence from c{start} to c{terminal} ({mode:?} mode, F(c_{{k-1}})={p}, F(c_{{k+2}})={q})"
                    ));
                }
            }
        };
        seqs.push(seq);
    }
    let pockets = |seq: &[usize], left: bool| -> Vec<Pocket> {
        seq.windows(2)
            .enumerate()
            .map(|(j, w)| {
                let (from, to) = (w[0].min(w[1]), w[0].max(w[1]));
                Pocket {
                    j,
                    from,
                    to,
                    bounds: [f.c(from), f.c(to)],
                    min: f.min_on(from, to),
                    max: f.max_on(from, to),
                    choice: if left { InverseChoice::left(j) } else { InverseChoice::right(j) },
                }
            })
            .collect()
    };
    let right_seq = seqs.pop().unwrap();
    let left_seq = seqs.pop().unwrap();
    let left_pockets = pockets(&left_seq, true);
    let right_pockets = pockets(&right_seq, false);
    Ok(FortPattern {
        mode,
        s: left_pockets.len().checked_sub(1),
        t: right_pockets.len().checked_sub(1),
        upper: p,
        lower: q,
        left_seq,
        right_seq,
        left_pockets,
        right_pockets,
    })
}
