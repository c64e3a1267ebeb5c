//! The generalized Somos-4 sequence
//! `s(n)·s(n−4) = c1·s(n−1)·s(n−3) + c2·s(n−2)²` with `s(1..=4) = 1`,
//! its ratios `t(n) = s(n+1)/s(n)`, its ratios of ratios
//! `a(n) = t(n+1)/t(n)`, and exact checks of the identities `a` satisfies.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::exact::Rational;
use crate::recurrence::ParamPoint;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SomosError {
    /// Computing term `index` required dividing by zero.
    #[error("zero divisor while computing term {index}")]
    ZeroDivision { index: usize },
    #[error("need at least {min} terms, got {got}")]
    TooShort { min: usize, got: usize },
}

/// Sequences are 1-indexed in the maths; `s[0]` holds `s(1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SomosRun {
    pub c: ParamPoint,
    pub s: Vec<Rational>,
    pub t: Vec<Rational>,
    pub a: Vec<Rational>,
}

impl SomosRun {
    pub fn is_integral(&self) -> bool {
        self.s.iter().all(Rational::is_integer)
    }

    /// `s(n)` for 1-based `n`.
    pub fn term(&self, n: usize) -> &Rational {
        &self.s[n - 1]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,s,t,a\n");
        for (i, s) in self.s.iter().enumerate() {
            let cell = |v: Option<&Rational>| v.map(ToString::to_string).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{}",
                i + 1,
                s,
                cell(self.t.get(i)),
                cell(self.a.get(i))
            );
        }
        out
    }

    /// OEIS b-file lines `n value`. Only meaningful when every term is an
    /// integer; returns `None` otherwise.
    pub fn to_bfile(&self) -> Option<String> {
        if !self.is_integral() {
            return None;
        }
        let mut out = String::new();
        for (i, s) in self.s.iter().enumerate() {
            let _ = writeln!(out, "{} {}", i + 1, s);
        }
        Some(out)
    }
}

/// Generates `s(1..=n)` by direct division, then derives `t` and `a`.
pub fn somos4(c: ParamPoint, n: usize) -> Result<SomosRun, SomosError> {
    if n < 4 {
        return Err(SomosError::TooShort { min: 4, got: n });
    }
    let (c1, c2) = (c.c1(), c.c2());
    let mut s = vec![Rational::one(); 4];
    for idx in 4..n {
        let num = &c1 * &(&s[idx - 1] * &s[idx - 3]) + &c2 * &s[idx - 2].square();
        let next = num
            .checked_div(&s[idx - 4])
            .map_err(|_| SomosError::ZeroDivision { index: idx + 1 })?;
        s.push(next);
    }
    let t = ratios(&s).map_err(|i| SomosError::ZeroDivision { index: i })?;
    let a = ratios(&t).map_err(|i| SomosError::ZeroDivision { index: i })?;
    Ok(SomosRun { c, s, t, a })
}

/// `b(i+1)/b(i)`; on failure returns the 1-based index of the zero term.
fn ratios(b: &[Rational]) -> Result<Vec<Rational>, usize> {
    b.windows(2)
        .enumerate()
        .map(|(i, w)| w[1].checked_div(&w[0]).map_err(|_| i + 1))
        .collect()
}

/// `a(1..=n)` from `a(n+2) = (c1·a(n+1) + c2) / (a(n+1)²·a(n))`, `a(1)=a(2)=1`.
pub fn ac_direct(c: ParamPoint, n: usize) -> Result<Vec<Rational>, SomosError> {
    let (c1, c2) = (c.c1(), c.c2());
    let mut a = vec![Rational::one(); n.min(2)];
    for idx in 2..n {
        let (prev, last) = (&a[idx - 2], &a[idx - 1]);
        let next = (&c1 * last + c2.clone())
            .checked_div(&(last.square() * prev))
            .map_err(|_| SomosError::ZeroDivision { index: idx + 1 })?;
        a.push(next);
    }
    Ok(a)
}

/// Ratios of ratios of `s` agree with [`ac_direct`] for every index up to `n`.
pub fn check_claim1(c: ParamPoint, n: usize) -> Result<bool, SomosError> {
    if n < 3 {
        return Err(SomosError::TooShort { min: 3, got: n });
    }
    let run = somos4(c, n + 2)?;
    let direct = ac_direct(c, n)?;
    Ok(run.a.len() >= n && run.a[..n] == direct[..])
}

/// `a(k+2)·a(k+1)² + a(k+1)²·a(k) = (2c1+c2+1)·a(k+1) − c1` for all `k+2 ≤ n`.
pub fn check_claim2(c: ParamPoint, n: usize) -> Result<bool, SomosError> {
    if n < 3 {
        return Err(SomosError::TooShort { min: 3, got: n });
    }
    let a = ac_direct(c, n)?;
    let (c1, middle) = (c.c1(), c.middle());
    Ok(a.windows(3).all(|w| {
        let mid_sq = w[1].square();
        let lhs = &w[2] * &mid_sq + &mid_sq * &w[0];
        let rhs = &middle * &w[1] - c1.clone();
        lhs == rhs
    }))
}

/// `T(k) = a(k+1)²a(k)² − (2c1+c2+1)·a(k+1)a(k) + c1·a(k+1) + c1·a(k) + c2`.
pub fn t_value(c: ParamPoint, ak: &Rational, ak1: &Rational) -> Rational {
    let prod = ak1 * ak;
    prod.square() - c.middle() * &prod + c.c1() * ak1 + c.c1() * ak + c.c2()
}

/// `T(k) = 0` for every `k ≤ n−1`.
pub fn check_t_identity(c: ParamPoint, n: usize) -> Result<bool, SomosError> {
    if n < 2 {
        return Err(SomosError::TooShort { min: 2, got: n });
    }
    let a = ac_direct(c, n)?;
    Ok(a.windows(2).all(|w| t_value(c, &w[0], &w[1]).is_zero()))
}
