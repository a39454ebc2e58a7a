use proptest::prelude::*;
use rug::{Float, Integer, Rational};
use seqrac::poly::*;
use seqrac::schedule::first_order_coefficients;

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

/// `c_k(c₁) = 2^{k−1} c₁ (1 + Σ_{j<k} c_j(c₁)²/2)` built directly as
/// polynomials in `c₁` (index = power of `c₁`).
fn coefficient_polys(n: usize) -> Vec<RationalPolynomial> {
    let c1 = RationalPolynomial::new(vec![q(0, 1), q(1, 1)]);
    let mut out = vec![c1.clone()];
    let mut sum_sq = RationalPolynomial::constant(0);
    for k in 2..=n {
        let last = out.last().unwrap();
        sum_sq = sum_sq.add(&last.mul(last));
        let inner = RationalPolynomial::constant(1).add(&sum_sq.scale(&q(1, 2)));
        let scale = Rational::from(Integer::from(1) << (k as u32 - 1));
        out.push(c1.mul(&inner).scale(&scale));
    }
    out
}

#[test]
fn independent_recurrence_reproduces_the_expansion() {
    for (k, expected) in coefficient_polys(9).iter().enumerate() {
        assert_eq!(&leading_coefficient_polynomial(k + 1).unwrap(), expected, "k={}", k + 1);
    }
}

#[test]
fn only_odd_powers_appear() {
    for k in 1..=13 {
        let p = leading_coefficient_polynomial(k).unwrap();
        for (power, c) in p.coefficients().iter().enumerate() {
            if power % 2 == 0 {
                assert_eq!(*c, 0, "k={k} power={power}");
            } else {
                assert!(*c > 0, "k={k} power={power}");
            }
        }
        assert_eq!(p.degree(), Some((1 << k) - 1));
    }
}

#[test]
fn degree_doubles() {
    for (i, p) in small_angle_polys(14).unwrap().iter().enumerate() {
        assert_eq!(p.degree(), Some((1 << i) - 1));
        assert_eq!(p.coefficient(0), 1);
    }
}

#[test]
fn index_cap_is_enforced() {
    assert!(small_angle_poly(0).is_err());
    assert!(small_angle_poly(MAX_POLY_INDEX + 1).is_err());
    assert!(leading_coefficient(MAX_POLY_INDEX + 1, &Float::with_val(64, 0.5)).is_err());
}

#[test]
fn exact_and_float_coefficients_agree() {
    for (r, eps) in [(1.0, 1e-4), (0.5, 0.0), (0.8, 0.3)] {
        let floats = first_order_coefficients(12, r, eps);
        let c1 = base_coefficient(r, eps);
        for (k, f) in floats.iter().enumerate() {
            let exact = leading_coefficient(k + 1, &c1).unwrap();
            let rel = (Float::with_val(256, &exact - f) / &exact).to_f64().abs();
            assert!(rel < 1e-60, "k={} rel={rel:e}", k + 1);
        }
    }
}

#[test]
fn estimate_is_reciprocal_of_coefficient() {
    for k in 1..=10 {
        let w = omega_estimate(k, 0.7, 1e-3).unwrap();
        let c = leading_coefficient(k, &base_coefficient(0.7, 1e-3)).unwrap();
        let prod = Float::with_val(256, &w * &c);
        assert!((prod.to_f64() - 1.0).abs() < 1e-15);
    }
}

fn poly() -> impl Strategy<Value = RationalPolynomial> {
    prop::collection::vec((-50i64..50, 1i64..20), 0..40)
        .prop_map(|cs| RationalPolynomial::new(cs.into_iter().map(|(n, d)| q(n, d)).collect()))
}

fn positive_poly() -> impl Strategy<Value = RationalPolynomial> {
    prop::collection::vec((0i64..1_000_000_000, 1i64..1 << 20), 16..80)
        .prop_map(|cs| RationalPolynomial::new(cs.into_iter().map(|(n, d)| q(n, d)).collect()))
}

proptest! {
    #[test]
    fn product_is_commutative_and_evaluates_pointwise(a in poly(), b in poly(), xn in -20i64..20, xd in 1i64..7) {
        let x = q(xn, xd);
        let ab = a.mul(&b);
        prop_assert_eq!(&ab, &b.mul(&a));
        prop_assert_eq!(ab.evaluate(&x), a.evaluate(&x) * b.evaluate(&x));
        prop_assert_eq!(a.add(&b).evaluate(&x), a.evaluate(&x) + b.evaluate(&x));
    }

    #[test]
    fn packed_square_matches_schoolbook(a in positive_poly()) {
        prop_assert_eq!(a.square(), a.mul(&a));
    }

    #[test]
    fn shift_multiplies_by_power_of_x(a in poly(), k in 0usize..5, xn in 1i64..9) {
        let x = q(xn, 3);
        let xk = (0..k).fold(q(1, 1), |acc, _| acc * &x);
        prop_assert_eq!(a.shift(k).evaluate(&x), a.evaluate(&x) * xk);
    }
}

#[test]
fn display_is_readable() {
    assert_eq!(small_angle_poly(2).unwrap().to_string(), "1 + 1/2*x");
    let p = RationalPolynomial::new(vec![q(1, 1), q(-3, 2), q(0, 1), q(2, 1)]);
    assert_eq!(p.to_string(), "1 - 3/2*x + 2*x^3");
    assert_eq!(RationalPolynomial::new(vec![]).to_string(), "0");
}
