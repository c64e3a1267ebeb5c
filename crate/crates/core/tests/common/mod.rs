//! Test-only oracles that share no code path with the library's solvers.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use rectree::Rational;

/// Generalized Somos-4 over the integers, refusing any inexact division.
pub fn somos_integer_oracle(c1: i64, c2: i64, n: usize) -> Option<Vec<BigInt>> {
    let (c1, c2) = (BigInt::from(c1), BigInt::from(c2));
    let mut s = vec![BigInt::one(); 4.min(n)];
    for i in 4..n {
        let num = &c1 * &s[i - 1] * &s[i - 3] + &c2 * &s[i - 2] * &s[i - 2];
        if s[i - 4].is_zero() {
            return None;
        }
        let (q, r) = num.div_rem(&s[i - 4]);
        if !r.is_zero() {
            return None;
        }
        s.push(q);
    }
    Some(s)
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = if n < &BigInt::zero() { -n } else { n.clone() };
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            out.push(&n / &d);
        }
        d += 1;
    }
    out
}

/// Rational roots of `a·x² + b·x + c` (rational inputs) by the rational root
/// theorem: clear denominators, then try every ±p/q with p | c and q | a.
/// Sorted ascending and deduplicated. `None` when `a = 0` or `c = 0` cases need
/// special handling (the caller only uses this on `a, c ≠ 0`).
pub fn rational_roots_by_enumeration(
    a: &Rational,
    b: &Rational,
    c: &Rational,
) -> Option<Vec<Rational>> {
    if a.is_zero() || c.is_zero() {
        return None;
    }
    let l = a.denom().lcm(b.denom()).lcm(c.denom());
    let scale = |x: &Rational| x.numer() * (&l / x.denom());
    let (ai, bi, ci) = (scale(a), scale(b), scale(c));
    let mut roots = Vec::new();
    for p in divisors(&ci) {
        for q in divisors(&ai) {
            for sign in [1, -1] {
                let p: BigInt = &p * BigInt::from(sign);
                let val: BigInt = &ai * &p * &p + &bi * &p * &q + &ci * &q * &q;
                if val.is_zero() {
                    roots.push(Rational::new(p.clone(), q.clone()).unwrap());
                }
            }
        }
    }
    roots.sort();
    roots.dedup();
    Some(roots)
}

pub fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

pub fn qs(v: &[&str]) -> Vec<Rational> {
    v.iter().map(|s| q(s)).collect()
}
