//! Checks on the order-3 unfolding tree: the closed-form branch
//! `1, 1, 1, (c1+c2)^f(4), (c1+c2)^f(5), …` with `f(n) = ⌊(n−3)²/4⌋`, and a
//! bounded search expressing every tree value as a product of Somos-4 terms.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exact::{solve_quadratic, Rational};
use crate::recurrence::{make_order3_unfolding, step_polynomial, ParamPoint};
use crate::somos::{somos4, SomosError};
use crate::tree::{build_tree_with, BuildOptions, TreeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("c1 + c2 = 0, the closed-form branch is undefined")]
    ZeroParameterSum,
    #[error("depth must be at least {min}, got {got}")]
    DepthTooSmall { min: usize, got: usize },
    #[error(transparent)]
    Somos(#[from] SomosError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// `⌊(n−3)²/4⌋`.
pub fn f_exponent(n: u64) -> u64 {
    let d = n.abs_diff(3);
    d * d / 4
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosedFormReport {
    pub c: ParamPoint,
    pub depth_checked: usize,
    pub matched: bool,
    /// `s(1..=depth)` predicted by the closed form.
    pub expected: Vec<Rational>,
    /// Values actually found along the branch, up to the first miss.
    pub found_path: Vec<Rational>,
    /// For each `n ≥ 4` reached, the candidate that was not taken (`None` for a
    /// double root).
    pub alternates: Vec<Option<Rational>>,
    pub mismatch_at: Option<usize>,
    /// Candidates offered at the mismatch, if any.
    pub mismatch_candidates: Vec<Rational>,
}

/// Walks the order-3 tree from `(1, 1, 1)`, taking at each level the root equal
/// to `(c1+c2)^f(n)`.
pub fn verify_closed_form_branch(
    c: ParamPoint,
    depth: usize,
) -> Result<ClosedFormReport, AnalysisError> {
    if c.sum() == 0 {
        return Err(AnalysisError::ZeroParameterSum);
    }
    if depth < 6 {
        return Err(AnalysisError::DepthTooSmall { min: 6, got: depth });
    }
    let r = make_order3_unfolding(c);
    let base = Rational::from(c.sum());
    let mut expected = vec![Rational::one(); 3];
    expected.extend((4..=depth as u64).map(|n| base.pow(f_exponent(n) as u32)));

    let mut path = vec![Rational::one(); 3];
    let mut alternates = Vec::new();
    let mut mismatch = None;
    for n in 4..=depth {
        let (p2, p1, p0) = step_polynomial(&r, &path[n - 4..n - 1]).map_err(TreeError::from)?;
        let sol = solve_quadratic(&p2, &p1, &p0);
        let want = &expected[n - 1];
        if !sol.roots.contains(want) {
            mismatch = Some((n, sol.roots));
            break;
        }
        alternates.push(sol.roots.iter().find(|v| *v != want).cloned());
        path.push(want.clone());
    }
    let (mismatch_at, mismatch_candidates) = match mismatch {
        Some((n, roots)) => (Some(n), roots),
        None => (None, Vec::new()),
    };
    Ok(ClosedFormReport {
        c,
        depth_checked: path.len(),
        matched: mismatch_at.is_none(),
        expected,
        found_path: path,
        alternates,
        mismatch_at,
        mismatch_candidates,
    })
}

pub const CONJECTURE_CONVENTION: &str =
    "factors are terms s_c(n) with |s_c(n)| > 1 and n <= horizon; repetition allowed; \
     1 is the empty product; sign handled separately";

/// Somos indices whose terms multiply to the absolute numerator and the
/// denominator of a value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub negative: bool,
    pub numerator: Vec<usize>,
    pub denominator: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjectureReport {
    pub c: ParamPoint,
    pub depth: u32,
    pub horizon: usize,
    pub convention: &'static str,
    pub values_checked: usize,
    pub all_factorable: bool,
    /// `s_c(1..=horizon)`, so witnesses can be re-multiplied.
    pub somos_terms: Vec<Rational>,
    pub witnesses: BTreeMap<Rational, Witness>,
    /// Values with no factorization within the horizon. Inconclusive, not a
    /// refutation.
    pub failures: Vec<Rational>,
}

impl ConjectureReport {
    pub fn product(&self, indices: &[usize]) -> BigInt {
        indices.iter().fold(BigInt::one(), |acc, &i| {
            acc * BigInt::from(self.somos_terms[i - 1].numer().magnitude().clone())
        })
    }

    /// The value a witness encodes.
    pub fn witness_value(&self, w: &Witness) -> Rational {
        let v = Rational::new(self.product(&w.numerator), self.product(&w.denominator))
            .expect("somos terms in witnesses are nonzero");
        if w.negative {
            -v
        } else {
            v
        }
    }

    pub fn witnesses_consistent(&self) -> bool {
        self.witnesses
            .iter()
            .all(|(v, w)| self.witness_value(w) == *v)
    }
}

/// Factors positive integers over a fixed list of terms, largest term first,
/// with backtracking. Memoized on (remaining value, smallest term index still
/// allowed).
struct Factorizer {
    /// `(somos index, |term|)`, descending by term, distinct terms > 1.
    terms: Vec<(usize, BigInt)>,
    memo: HashMap<(BigInt, usize), Option<Vec<usize>>>,
}

impl Factorizer {
    fn new(somos: &[Rational]) -> Self {
        let mut by_value: BTreeMap<BigInt, usize> = BTreeMap::new();
        for (i, s) in somos.iter().enumerate() {
            if !s.is_integer() {
                continue;
            }
            let v = s.numer().magnitude().clone().into();
            if v > BigInt::one() {
                by_value.entry(v).or_insert(i + 1);
            }
        }
        let terms = by_value.into_iter().rev().map(|(v, i)| (i, v)).collect();
        Factorizer {
            terms,
            memo: HashMap::new(),
        }
    }

    fn factor(&mut self, target: &BigInt) -> Option<Vec<usize>> {
        if target.sign() != num_bigint::Sign::Plus {
            return None;
        }
        self.factor_from(target, 0)
    }

    fn factor_from(&mut self, target: &BigInt, start: usize) -> Option<Vec<usize>> {
        if target.is_one() {
            return Some(Vec::new());
        }
        let key = (target.clone(), start);
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let mut found = None;
        for i in start..self.terms.len() {
            let (idx, term) = &self.terms[i];
            if term > target || !(target % term).is_zero() {
                continue;
            }
            let (idx, rest) = (*idx, target / term);
            if let Some(mut tail) = self.factor_from(&rest, i) {
                tail.insert(0, idx);
                found = Some(tail);
                break;
            }
        }
        self.memo.insert(key, found.clone());
        found
    }
}

pub fn check_conjecture(
    c: ParamPoint,
    depth: u32,
    horizon: usize,
) -> Result<ConjectureReport, AnalysisError> {
    let run = somos4(c, horizon.max(4))?;
    let tree = build_tree_with(
        &make_order3_unfolding(c),
        &[Rational::one(), Rational::one(), Rational::one()],
        depth,
        BuildOptions { memoize: true },
    )?;
    let values: BTreeSet<&Rational> = tree.nodes().iter().map(|n| &n.value).collect();

    let mut factorizer = Factorizer::new(&run.s);
    let mut witnesses = BTreeMap::new();
    let mut failures = Vec::new();
    for v in &values {
        let num = factorizer.factor(&v.numer().magnitude().clone().into());
        let den = factorizer.factor(v.denom());
        match (num, den) {
            (Some(numerator), Some(denominator)) => {
                witnesses.insert(
                    (*v).clone(),
                    Witness {
                        negative: v.is_negative(),
                        numerator,
                        denominator,
                    },
                );
            }
            _ => failures.push((*v).clone()),
        }
    }
    Ok(ConjectureReport {
        c,
        depth,
        horizon,
        convention: CONJECTURE_CONVENTION,
        values_checked: values.len(),
        all_factorable: failures.is_empty(),
        somos_terms: run.s,
        witnesses,
        failures,
    })
}
