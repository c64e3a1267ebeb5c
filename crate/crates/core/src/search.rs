//! Brute-force scan over first-order quadratic recurrences
//! `Y²X² + (A1 + A2·Y)X + (B1 + B2·Y) = 0`, keeping those whose tree from the
//! initial value stays rational down to a test depth.
//!
//! Tuples are scanned in lexicographic `(A1, A2, B1, B2)` order in fixed-size
//! chunks; each chunk is evaluated in parallel and then merged in order, so a
//! report never depends on the thread count. Between chunks the partial report
//! can be written to a checkpoint file and resumed later.

use std::fs;
use std::io;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{solve_quadratic, Rational, RootKind};
use crate::recurrence::{make_first_order, step_polynomial};
use crate::tree::build_tree;

const CHUNK: usize = 512;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid search spec: {0}")]
    InvalidSpec(String),
    #[error("checkpoint I/O: {0}")]
    Io(#[from] io::Error),
    #[error("malformed checkpoint: {0}")]
    Checkpoint(#[from] serde_json::Error),
    #[error("checkpoint was written for a different search spec")]
    SpecMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntRange {
    pub lo: i64,
    pub hi: i64,
}

impl IntRange {
    pub fn new(lo: i64, hi: i64) -> Self {
        IntRange { lo, hi }
    }

    pub fn single(v: i64) -> Self {
        IntRange { lo: v, hi: v }
    }

    fn values(self) -> impl Iterator<Item = i64> + Clone {
        self.lo..=self.hi
    }

    fn is_empty(self) -> bool {
        self.lo > self.hi
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSpec {
    pub a1: IntRange,
    pub a2: IntRange,
    pub b1: IntRange,
    /// Ignored when `enforce_a1_eq_b2` is set.
    pub b2: IntRange,
    pub enforce_a1_eq_b2: bool,
    pub initial_value: Rational,
    pub test_depth: u32,
}

impl SearchSpec {
    pub fn validate(&self) -> Result<(), SearchError> {
        let mut ranges = vec![("A1", self.a1), ("A2", self.a2), ("B1", self.b1)];
        if !self.enforce_a1_eq_b2 {
            ranges.push(("B2", self.b2));
        }
        if let Some((name, _)) = ranges.iter().find(|(_, r)| r.is_empty()) {
            return Err(SearchError::InvalidSpec(format!("{name} range is empty")));
        }
        if self.test_depth < 2 {
            return Err(SearchError::InvalidSpec(
                "test depth must be at least 2".into(),
            ));
        }
        Ok(())
    }

    /// Every tuple in scan order.
    pub fn tuples(&self) -> Vec<Coeffs> {
        let mut out = Vec::new();
        for a1 in self.a1.values() {
            for a2 in self.a2.values() {
                for b1 in self.b1.values() {
                    if self.enforce_a1_eq_b2 {
                        out.push(Coeffs { a1, a2, b1, b2: a1 });
                    } else {
                        out.extend(self.b2.values().map(|b2| Coeffs { a1, a2, b1, b2 }));
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Coeffs {
    pub a1: i64,
    pub a2: i64,
    pub b1: i64,
    pub b2: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchHit {
    pub coeffs: Coeffs,
    /// Depth to which the tree was built and found rational.
    pub verified_depth: u32,
    /// Values of the second term (children of the root).
    pub first_level_roots: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub spec: SearchSpec,
    pub hits: Vec<SearchHit>,
    pub scanned: u64,
    /// `pruned_nonsquare + pruned_degenerate`.
    pub pruned_at_level2: u64,
    /// The first step has a non-square discriminant.
    pub pruned_nonsquare: u64,
    /// The first step's polynomial has no X terms at all.
    pub pruned_degenerate: u64,
    /// Passed the first step but left ℚ deeper in the tree.
    pub failed_deeper: u64,
}

impl SearchReport {
    fn empty(spec: &SearchSpec) -> Self {
        SearchReport {
            spec: spec.clone(),
            hits: Vec::new(),
            scanned: 0,
            pruned_at_level2: 0,
            pruned_nonsquare: 0,
            pruned_degenerate: 0,
            failed_deeper: 0,
        }
    }

    fn record(&mut self, coeffs: Coeffs, outcome: Outcome) {
        self.scanned += 1;
        match outcome {
            Outcome::Hit(hit) => self.hits.push(hit),
            Outcome::NonSquare => {
                self.pruned_at_level2 += 1;
                self.pruned_nonsquare += 1;
            }
            Outcome::Degenerate => {
                self.pruned_at_level2 += 1;
                self.pruned_degenerate += 1;
            }
            Outcome::Deeper => self.failed_deeper += 1,
        }
        debug_assert!(self.hits.last().is_none_or(|h| h.coeffs <= coeffs));
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("A1,A2,B1,B2,verified_depth,level2_roots\n");
        for h in &self.hits {
            let roots: Vec<String> = h
                .first_level_roots
                .iter()
                .map(ToString::to_string)
                .collect();
            let c = h.coeffs;
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                c.a1,
                c.a2,
                c.b1,
                c.b2,
                h.verified_depth,
                roots.join(";")
            ));
        }
        out
    }
}

/// `(A1+A2)² − 4(B1+B2)`: the discriminant of the first step from `a(1) = 1`,
/// where the polynomial is `X² + (A1+A2)X + (B1+B2)`.
pub fn discriminant_at_one(a1: i64, a2: i64, b1: i64, b2: i64) -> Rational {
    let p1 = Rational::from(a1 + a2);
    p1.square() - Rational::from(4) * Rational::from(b1 + b2)
}

enum Outcome {
    Hit(SearchHit),
    NonSquare,
    Degenerate,
    Deeper,
}

fn evaluate(spec: &SearchSpec, c: Coeffs) -> Outcome {
    let r = make_first_order(c.a1, c.a2, c.b1, c.b2);
    let window = [spec.initial_value.clone()];
    let (p2, p1, p0) = step_polynomial(&r, &window).expect("first-order window");
    let first = solve_quadratic(&p2, &p1, &p0);
    match first.kind {
        RootKind::Irrational | RootKind::Complex => return Outcome::NonSquare,
        RootKind::Degenerate { .. } => return Outcome::Degenerate,
        _ => {}
    }
    let tree = build_tree(&r, &window, spec.test_depth).expect("valid first-order tree");
    if tree.has_nonrational_cutoff() {
        Outcome::Deeper
    } else {
        Outcome::Hit(SearchHit {
            coeffs: c,
            verified_depth: spec.test_depth,
            first_level_roots: first.roots,
        })
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Checkpoint {
    last_scanned: Option<Coeffs>,
    report: SearchReport,
}

pub fn run_search(spec: &SearchSpec) -> Result<SearchReport, SearchError> {
    run_search_resumable(spec, None, false)
}

/// Like [`run_search`], writing a checkpoint after each chunk when
/// `checkpoint` is given. With `resume`, an existing checkpoint for the same
/// spec is loaded and the scan continues after its last tuple.
pub fn run_search_resumable(
    spec: &SearchSpec,
    checkpoint: Option<&Path>,
    resume: bool,
) -> Result<SearchReport, SearchError> {
    spec.validate()?;
    let mut report = SearchReport::empty(spec);
    let mut last: Option<Coeffs> = None;
    if let (Some(path), true) = (checkpoint, resume) {
        if path.exists() {
            let saved: Checkpoint = serde_json::from_str(&fs::read_to_string(path)?)?;
            if saved.report.spec != *spec {
                return Err(SearchError::SpecMismatch);
            }
            report = saved.report;
            last = saved.last_scanned;
        }
    }

    let tuples = spec.tuples();
    let start = match last {
        Some(l) => tuples.partition_point(|t| *t <= l),
        None => 0,
    };
    for chunk in tuples[start..].chunks(CHUNK) {
        let outcomes: Vec<Outcome> = chunk.par_iter().map(|&c| evaluate(spec, c)).collect();
        for (&c, o) in chunk.iter().zip(outcomes) {
            report.record(c, o);
        }
        if let Some(path) = checkpoint {
            let cp = Checkpoint {
                last_scanned: chunk.last().copied(),
                report,
            };
            write_atomic(path, &serde_json::to_string(&cp)?)?;
            report = cp.report;
        }
    }
    Ok(report)
}

fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(tmp, path)
}
