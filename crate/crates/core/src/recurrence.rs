//! Recurrences of the form `Σᵢ Pᵢ(window)·x^i = 0`, where `x` is the next term
//! and the coefficients `Pᵢ` are evaluated on the last `order` terms.
//!
//! Only the families studied here are constructible: the general first-order
//! quadratic with linear coefficient polynomials, the quadratic satisfied by
//! the Somos-4 ratios of ratios, its order-3 unfolding for the Somos-4 terms
//! themselves, and two explicit degree-1 recurrences used for cross-checks.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::exact::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecurrenceError {
    #[error("window has {got} values but the recurrence has order {expected}")]
    BadWindow { expected: usize, got: usize },
    #[error("stepping a degree-{0} recurrence is not supported (only degree 1 and 2)")]
    Unsupported(u32),
}

/// Integer parameters `(c1, c2)` of the generalized Somos-4 family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ParamPoint {
    pub c1: i64,
    pub c2: i64,
}

impl ParamPoint {
    pub fn new(c1: i64, c2: i64) -> Self {
        ParamPoint { c1, c2 }
    }

    pub fn c1(&self) -> Rational {
        Rational::from(self.c1)
    }

    pub fn c2(&self) -> Rational {
        Rational::from(self.c2)
    }

    /// `2·c1 + c2 + 1`, the recurring middle coefficient.
    pub fn middle(&self) -> Rational {
        Rational::from(2 * self.c1 + self.c2 + 1)
    }

    pub fn sum(&self) -> i64 {
        self.c1 + self.c2
    }
}

impl fmt::Display for ParamPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.c1, self.c2)
    }
}

/// Degree-1 recurrences, solved for the next term by a single division.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExplicitKind {
    /// `s(n)·s(n-4) = c1·s(n-1)·s(n-3) + c2·s(n-2)²`, order 4.
    Somos4(ParamPoint),
    /// `a(n+2)·a(n+1)²·a(n) = c1·a(n+1) + c2`, order 2.
    RatioOfRatios(ParamPoint),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Family {
    FirstOrderQuadratic { a1: i64, a2: i64, b1: i64, b2: i64 },
    SomosRatioQuadratic(ParamPoint),
    Order3SomosUnfolding(ParamPoint),
    ExplicitM1(ExplicitKind),
    Custom(String),
}

type CoeffFn = dyn Fn(&[Rational]) -> Vec<Rational> + Send + Sync;

/// An order-k, degree-m recurrence. Immutable once built.
#[derive(Clone)]
pub struct Recurrence {
    order: usize,
    degree: u32,
    family: Family,
    custom: Option<Arc<CoeffFn>>,
}

impl fmt::Debug for Recurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Recurrence")
            .field("order", &self.order)
            .field("degree", &self.degree)
            .field("family", &self.family)
            .finish()
    }
}

/// `P2(Y)=Y²`, `P1(Y)=A1+A2·Y`, `P0(Y)=B1+B2·Y`.
pub fn make_first_order(a1: i64, a2: i64, b1: i64, b2: i64) -> Recurrence {
    Recurrence::from_family(Family::FirstOrderQuadratic { a1, a2, b1, b2 })
}

/// `P2(Y)=Y²`, `P1(Y)=c1−(2c1+c2+1)·Y`, `P0(Y)=c1·Y+c2`.
pub fn make_somos_ratio_quadratic(c: ParamPoint) -> Recurrence {
    Recurrence::from_family(Family::SomosRatioQuadratic(c))
}

/// The order-3 unfolding for the Somos-4 terms. On the window
/// `(s(n), s(n+1), s(n+2))`, with `x = s(n+3)`:
///
/// ```text
/// P2 = s(n)²
/// P1 = c1·s(n+1)³ − (2c1+c2+1)·s(n+2)·s(n+1)·s(n)
/// P0 = c1·s(n+2)³·s(n) + c2·s(n+2)²·s(n+1)²
/// ```
pub fn make_order3_unfolding(c: ParamPoint) -> Recurrence {
    Recurrence::from_family(Family::Order3SomosUnfolding(c))
}

pub fn make_explicit(kind: ExplicitKind) -> Recurrence {
    Recurrence::from_family(Family::ExplicitM1(kind))
}

impl Recurrence {
    fn from_family(family: Family) -> Self {
        let (order, degree) = match &family {
            Family::FirstOrderQuadratic { .. } | Family::SomosRatioQuadratic(_) => (1, 2),
            Family::Order3SomosUnfolding(_) => (3, 2),
            Family::ExplicitM1(ExplicitKind::Somos4(_)) => (4, 1),
            Family::ExplicitM1(ExplicitKind::RatioOfRatios(_)) => (2, 1),
            Family::Custom(_) => unreachable!("custom recurrences go through from_fn"),
        };
        Recurrence {
            order,
            degree,
            family,
            custom: None,
        }
    }

    /// A recurrence given by an arbitrary coefficient evaluator returning
    /// `degree + 1` values `(P_m, …, P_0)`. Any degree can be constructed;
    /// only degrees 1 and 2 can be stepped.
    pub fn from_fn<F>(name: impl Into<String>, order: usize, degree: u32, coeffs: F) -> Self
    where
        F: Fn(&[Rational]) -> Vec<Rational> + Send + Sync + 'static,
    {
        Recurrence {
            order,
            degree,
            family: Family::Custom(name.into()),
            custom: Some(Arc::new(coeffs)),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Coefficients `(P_m, …, P_0)` of the polynomial in the next term.
    pub fn coefficients(&self, window: &[Rational]) -> Result<Vec<Rational>, RecurrenceError> {
        if window.len() != self.order {
            return Err(RecurrenceError::BadWindow {
                expected: self.order,
                got: window.len(),
            });
        }
        let coeffs = match &self.family {
            Family::FirstOrderQuadratic { a1, a2, b1, b2 } => {
                let y = &window[0];
                vec![
                    y.square(),
                    Rational::from(*a1) + Rational::from(*a2) * y,
                    Rational::from(*b1) + Rational::from(*b2) * y,
                ]
            }
            Family::SomosRatioQuadratic(c) => {
                let y = &window[0];
                vec![y.square(), c.c1() - c.middle() * y, c.c1() * y + c.c2()]
            }
            Family::Order3SomosUnfolding(c) => {
                let (s0, s1, s2) = (&window[0], &window[1], &window[2]);
                let s1_cubed = s1.square() * s1;
                let s2_sq = s2.square();
                let p2 = s0.square();
                let p1 = c.c1() * &s1_cubed - c.middle() * s2 * s1 * s0;
                let p0 = c.c1() * &(&s2_sq * s2) * s0 + c.c2() * &s2_sq * &s1.square();
                vec![p2, p1, p0]
            }
            Family::ExplicitM1(ExplicitKind::Somos4(c)) => {
                let (w0, w1, w2, w3) = (&window[0], &window[1], &window[2], &window[3]);
                vec![w0.clone(), -(c.c1() * w3 * w1 + c.c2() * &w2.square())]
            }
            Family::ExplicitM1(ExplicitKind::RatioOfRatios(c)) => {
                let (prev, last) = (&window[0], &window[1]);
                vec![last.square() * prev, -(c.c1() * last + c.c2())]
            }
            Family::Custom(_) => {
                let f = self
                    .custom
                    .as_ref()
                    .expect("custom family carries an evaluator");
                f(window)
            }
        };
        debug_assert_eq!(coeffs.len(), self.degree as usize + 1);
        Ok(coeffs)
    }

    /// JSON form `{family, parameters, order, degree}`.
    pub fn to_json(&self) -> serde_json::Value {
        let (family, parameters) = match &self.family {
            Family::FirstOrderQuadratic { a1, a2, b1, b2 } => (
                "first-order",
                json!({"A1": a1, "A2": a2, "B1": b1, "B2": b2}),
            ),
            Family::SomosRatioQuadratic(c) => ("somos-ratio", json!({"c1": c.c1, "c2": c.c2})),
            Family::Order3SomosUnfolding(c) => ("somos-order3", json!({"c1": c.c1, "c2": c.c2})),
            Family::ExplicitM1(ExplicitKind::Somos4(c)) => {
                ("somos4", json!({"c1": c.c1, "c2": c.c2}))
            }
            Family::ExplicitM1(ExplicitKind::RatioOfRatios(c)) => {
                ("ratio-of-ratios", json!({"c1": c.c1, "c2": c.c2}))
            }
            Family::Custom(name) => ("custom", json!({"name": name})),
        };
        json!({
            "family": family,
            "parameters": parameters,
            "order": self.order,
            "degree": self.degree,
        })
    }
}

impl fmt::Display for Recurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::FirstOrderQuadratic { a1, a2, b1, b2 } => {
                write!(f, "Y^2 X^2 + ({a1} + {a2}Y) X + ({b1} + {b2}Y) = 0")
            }
            Family::SomosRatioQuadratic(c) => {
                write!(f, "Somos-4 ratio-of-ratios quadratic, c = {c}")
            }
            Family::Order3SomosUnfolding(c) => write!(f, "order-3 Somos-4 unfolding, c = {c}"),
            Family::ExplicitM1(ExplicitKind::Somos4(c)) => write!(f, "Somos-4, c = {c}"),
            Family::ExplicitM1(ExplicitKind::RatioOfRatios(c)) => {
                write!(f, "Somos-4 ratio-of-ratios (degree 1), c = {c}")
            }
            Family::Custom(name) => write!(f, "{name}"),
        }
    }
}

/// The polynomial in the next term as `(p2, p1, p0)`. Degree-1 recurrences
/// come back with `p2 = 0`.
pub fn step_polynomial(
    r: &Recurrence,
    window: &[Rational],
) -> Result<(Rational, Rational, Rational), RecurrenceError> {
    if r.degree > 2 || r.degree == 0 {
        return Err(RecurrenceError::Unsupported(r.degree));
    }
    let mut coeffs = r.coefficients(window)?;
    if r.degree == 1 {
        coeffs.insert(0, Rational::zero());
    }
    let mut it = coeffs.into_iter();
    let (p2, p1, p0) = (it.next().unwrap(), it.next().unwrap(), it.next().unwrap());
    Ok((p2, p1, p0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{eval_quadratic, solve_quadratic, RootKind};
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn qs(v: &[&str]) -> Vec<Rational> {
        v.iter().map(|s| q(s)).collect()
    }

    fn step(r: &Recurrence, w: &[&str]) -> (Rational, Rational, Rational) {
        step_polynomial(r, &qs(w)).unwrap()
    }

    fn roots(r: &Recurrence, w: &[&str]) -> Vec<Rational> {
        let (p2, p1, p0) = step(r, w);
        solve_quadratic(&p2, &p1, &p0).roots
    }

    #[test]
    fn first_order_examples() {
        let r = make_first_order(1, 5, 8, 1);
        assert_eq!((r.order(), r.degree()), (1, 2));
        // a(1) = 1 gives X² + 6X + 9.
        assert_eq!(step(&r, &["1"]), (q("1"), q("6"), q("9")));
        assert_eq!(step(&r, &["-3"]), (q("9"), q("-14"), q("5")));

        let zero = make_first_order(0, 0, 0, 0);
        assert_eq!(step(&zero, &["7/2"]), (q("49/4"), q("0"), q("0")));

        assert_eq!(
            step(&make_first_order(1, -4, 2, 1), &["1"]),
            (q("1"), q("-3"), q("3"))
        );
    }

    #[test]
    fn somos_ratio_examples() {
        let r = make_somos_ratio_quadratic(ParamPoint::new(1, 1));
        assert_eq!(step(&r, &["1"]), (q("1"), q("-3"), q("2")));
        assert_eq!(roots(&r, &["1"]), qs(&["1", "2"]));
        assert_eq!(step(&r, &["2"]), (q("4"), q("-7"), q("3")));

        let r = make_somos_ratio_quadratic(ParamPoint::new(2, 3));
        assert_eq!(step(&r, &["1"]), (q("1"), q("-6"), q("5")));
        assert_eq!(roots(&r, &["1"]), qs(&["1", "5"]));
    }

    #[test]
    fn order3_examples() {
        let r = make_order3_unfolding(ParamPoint::new(1, 1));
        assert_eq!((r.order(), r.degree()), (3, 2));
        assert_eq!(step(&r, &["1", "1", "1"]), (q("1"), q("-3"), q("2")));
        assert_eq!(roots(&r, &["1", "1", "1"]), qs(&["1", "2"]));
        assert_eq!(step(&r, &["1", "1", "2"]), (q("1"), q("-7"), q("12")));
        assert_eq!(roots(&r, &["1", "1", "2"]), qs(&["3", "4"]));

        let r = make_order3_unfolding(ParamPoint::new(0, 0));
        assert_eq!(step(&r, &["1", "1", "1"]), (q("1"), q("-1"), q("0")));
        assert_eq!(roots(&r, &["1", "1", "1"]), qs(&["0", "1"]));
    }

    #[test]
    fn bad_window_and_unsupported_degree() {
        let r = make_order3_unfolding(ParamPoint::new(1, 1));
        assert_eq!(
            step_polynomial(&r, &qs(&["1"])),
            Err(RecurrenceError::BadWindow {
                expected: 3,
                got: 1
            })
        );
        let cubic = Recurrence::from_fn("cubic", 1, 3, |w| {
            vec![
                w[0].clone(),
                Rational::zero(),
                Rational::zero(),
                Rational::one(),
            ]
        });
        assert_eq!(cubic.degree(), 3);
        assert_eq!(cubic.coefficients(&qs(&["2"])).unwrap().len(), 4);
        assert_eq!(
            step_polynomial(&cubic, &qs(&["2"])),
            Err(RecurrenceError::Unsupported(3))
        );
    }

    #[test]
    fn explicit_recurrences_reproduce_their_next_term() {
        let c = ParamPoint::new(1, 1);
        let somos = make_explicit(ExplicitKind::Somos4(c));
        let (p2, p1, p0) = step(&somos, &["1", "1", "2", "3"]);
        let sol = solve_quadratic(&p2, &p1, &p0);
        assert_eq!(sol.kind, RootKind::DegenerateLinear);
        assert_eq!(sol.roots, qs(&["7"]));

        let ratios = make_explicit(ExplicitKind::RatioOfRatios(c));
        let (p2, p1, p0) = step(&ratios, &["1", "2"]);
        assert_eq!(solve_quadratic(&p2, &p1, &p0).roots, qs(&["3/4"]));
    }

    #[test]
    fn json_shape() {
        let j = make_first_order(1, 5, 8, 1).to_json();
        assert_eq!(j["family"], "first-order");
        assert_eq!(j["parameters"]["B1"], 8);
        assert_eq!(j["order"], 1);
        assert_eq!(j["degree"], 2);
        let j = make_order3_unfolding(ParamPoint::new(2, 3)).to_json();
        assert_eq!(j["family"], "somos-order3");
        assert_eq!(j["parameters"]["c2"], 3);
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-40i64..40, 1i64..15).prop_map(|(p, q)| Rational::new(p, q).unwrap())
    }

    proptest! {
        #[test]
        fn somos_ratio_is_first_order_specialization(
            c1 in -6i64..7, c2 in -6i64..7, y in small_rational()
        ) {
            let c = ParamPoint::new(c1, c2);
            let a = make_somos_ratio_quadratic(c);
            let b = make_first_order(c1, -(2 * c1 + c2 + 1), c2, c1);
            let w = [y];
            prop_assert_eq!(step_polynomial(&a, &w).unwrap(), step_polynomial(&b, &w).unwrap());
        }

        // With A1 = B2 the two-variable form is symmetric, so a child's
        // quadratic always has the parent as a root.
        #[test]
        fn symmetric_first_order_backtracks(
            a1 in -5i64..6, a2 in -5i64..6, b1 in -5i64..6,
            y0 in small_rational(), y1 in small_rational()
        ) {
            let r = make_first_order(a1, a2, b1, a1);
            let (p2, p1, p0) = step_polynomial(&r, std::slice::from_ref(&y0)).unwrap();
            let (q2, q1, q0) = step_polynomial(&r, std::slice::from_ref(&y1)).unwrap();
            prop_assert_eq!(
                eval_quadratic(&p2, &p1, &p0, &y1),
                eval_quadratic(&q2, &q1, &q0, &y0)
            );
            let children = solve_quadratic(&p2, &p1, &p0);
            if let Some(child) = children.roots.first() {
                let (q2, q1, q0) = step_polynomial(&r, std::slice::from_ref(child)).unwrap();
                prop_assert!(eval_quadratic(&q2, &q1, &q0, &y0).is_zero());
            }
        }

        #[test]
        fn step_is_pure(c1 in -4i64..5, c2 in -4i64..5,
                        w in proptest::collection::vec(small_rational(), 3)) {
            let r = make_order3_unfolding(ParamPoint::new(c1, c2));
            prop_assert_eq!(step_polynomial(&r, &w).unwrap(), step_polynomial(&r, &w).unwrap());
        }
    }
}
