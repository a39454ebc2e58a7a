//! Exact rational polynomials for the small-angle expansion of the
//! unsharpness schedule.
//!
//! To first order in ω the schedule is `λ_k ≈ c_k ω` with
//! `c_k = 2^{k−1} c₁ P_k(c₁²)`, `c₁ = (1+ε)/(2r)`, where
//!
//! ```text
//! P₁ = 1,  P₂ = 1 + x/2,  P_k = P_{k−1} + 2^{2k−5} x P_{k−1}²   (k ≥ 3).
//! ```
//!
//! The degree of `P_k` doubles at every step, so squaring uses Kronecker
//! substitution on top of GMP's big-integer multiply.

use std::fmt;

use rug::{Complete, Float, Integer, Rational};

use crate::error::{Error, Result};

/// Largest `k` accepted by [`small_angle_poly`]. `P_18` already has 131072
/// coefficients of several hundred kilobits each.
pub const MAX_POLY_INDEX: usize = 17;

/// Working precision (bits) for float evaluation of exact polynomials.
pub const EVAL_PRECISION: u32 = 256;

/// Dense polynomial with exact rational coefficients; index = power of x.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPolynomial {
    coeffs: Vec<Rational>,
}

impl RationalPolynomial {
    pub fn new(coeffs: Vec<Rational>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: impl Into<Rational>) -> Self {
        Self::new(vec![c.into()])
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| *c == 0) {
            self.coeffs.pop();
        }
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `x^power` (zero beyond the degree).
    pub fn coefficient(&self, power: usize) -> Rational {
        self.coeffs.get(power).cloned().unwrap_or_default()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &RationalPolynomial) -> RationalPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coefficient(i) + other.coefficient(i)).collect();
        Self::new(coeffs)
    }

    pub fn scale(&self, factor: &Rational) -> RationalPolynomial {
        Self::new(self.coeffs.iter().map(|c| (c * factor).complete()).collect())
    }

    /// Multiplication by `x^power`.
    pub fn shift(&self, power: usize) -> RationalPolynomial {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![Rational::new(); power];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// Schoolbook product.
    pub fn mul(&self, other: &RationalPolynomial) -> RationalPolynomial {
        if self.is_zero() || other.is_zero() {
            return Self::new(Vec::new());
        }
        let mut out = vec![Rational::new(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += (a * b).complete();
            }
        }
        Self::new(out)
    }

    /// `p²`. Uses Kronecker substitution when every coefficient is
    /// non-negative, falling back to [`mul`](Self::mul) otherwise.
    pub fn square(&self) -> RationalPolynomial {
        if self.coeffs.len() < 16 || self.coeffs.iter().any(|c| *c < 0) {
            return self.mul(self);
        }
        kronecker_square(&self.coeffs)
    }

    pub fn evaluate(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// Horner evaluation in `prec`-bit floating point.
    pub fn evaluate_float(&self, x: &Float, prec: u32) -> Float {
        let mut acc = Float::with_val(prec, 0);
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += Float::with_val(prec, c);
        }
        acc
    }
}

fn kronecker_square(coeffs: &[Rational]) -> RationalPolynomial {
    let n = coeffs.len();
    let common = coeffs.iter().fold(Integer::from(1), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<Integer> = coeffs.iter().map(|c| Integer::from(c.numer() * Integer::from(&common / c.denom()))).collect();

    let max_bits = ints.iter().map(|v| v.significant_bits() as usize).max().unwrap_or(0);
    let index_bits = usize::BITS as usize - n.leading_zeros() as usize;
    let slot_limbs = (2 * max_bits + index_bits + 1).div_ceil(64);

    let mut limbs = vec![0u64; n * slot_limbs];
    for (i, v) in ints.iter().enumerate() {
        let digits = v.to_digits::<u64>(rug::integer::Order::Lsf);
        limbs[i * slot_limbs..i * slot_limbs + digits.len()].copy_from_slice(&digits);
    }
    let packed = Integer::from_digits(&limbs, rug::integer::Order::Lsf);
    drop(limbs);
    let mut product = packed.square().to_digits::<u64>(rug::integer::Order::Lsf);
    product.resize((2 * n - 1) * slot_limbs, 0);

    let denom = common.square();
    let out = product
        .chunks(slot_limbs)
        .map(|chunk| Rational::from((Integer::from_digits(chunk, rug::integer::Order::Lsf), denom.clone())))
        .collect();
    RationalPolynomial::new(out)
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (power, c) in self.coeffs.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let shown = if first {
                c.clone()
            } else if *c < 0 {
                write!(f, " - ")?;
                (-c).complete()
            } else {
                write!(f, " + ")?;
                c.clone()
            };
            first = false;
            match power {
                0 => write!(f, "{shown}")?,
                1 => write!(f, "{shown}*x")?,
                _ => write!(f, "{shown}*x^{power}")?,
            }
        }
        Ok(())
    }
}

fn check_index(k: usize) -> Result<()> {
    if k == 0 || k > MAX_POLY_INDEX {
        return Err(Error::Domain(format!("polynomial index {k} is outside 1..={MAX_POLY_INDEX}")));
    }
    Ok(())
}

/// `P₁, …, P_k`.
pub fn small_angle_polys(k: usize) -> Result<Vec<RationalPolynomial>> {
    check_index(k)?;
    let mut polys = vec![RationalPolynomial::constant(1)];
    if k >= 2 {
        polys.push(RationalPolynomial::new(vec![Rational::from(1), Rational::from((1, 2))]));
    }
    for j in 3..=k {
        let prev = polys.last().expect("at least two polynomials");
        let factor = Rational::from(Integer::from(1) << (2 * j as u32 - 5));
        let next = prev.add(&prev.square().shift(1).scale(&factor));
        polys.push(next);
    }
    Ok(polys)
}

pub fn small_angle_poly(k: usize) -> Result<RationalPolynomial> {
    Ok(small_angle_polys(k)?.pop().expect("non-empty"))
}

/// `c_k` as a polynomial in `c₁`: coefficient `2^{k−1} a_n` on `c₁^{2n+1}`,
/// zeros on every even power.
pub fn leading_coefficient_polynomial(k: usize) -> Result<RationalPolynomial> {
    let p = small_angle_poly(k)?;
    let scale = Rational::from(Integer::from(1) << (k as u32 - 1));
    let mut coeffs = vec![Rational::new(); 2 * p.coefficients().len()];
    for (n, a) in p.coefficients().iter().enumerate() {
        coeffs[2 * n + 1] = (a * &scale).complete();
    }
    Ok(RationalPolynomial::new(coeffs))
}

/// Nonzero coefficients of [`leading_coefficient_polynomial`], i.e. those on
/// `c₁, c₁³, c₁⁵, …`.
pub fn odd_power_coefficients(k: usize) -> Result<Vec<Rational>> {
    let p = small_angle_poly(k)?;
    let scale = Rational::from(Integer::from(1) << (k as u32 - 1));
    Ok(p.coefficients().iter().map(|a| (a * &scale).complete()).collect())
}

/// `c_k = 2^{k−1} c₁ P_k(c₁²)` from the exact polynomial.
pub fn leading_coefficient(k: usize, c1: &Float) -> Result<Float> {
    let p = small_angle_poly(k)?;
    let prec = c1.prec().max(EVAL_PRECISION);
    let x = Float::with_val(prec, c1 * c1);
    let value = p.evaluate_float(&x, prec) * c1;
    Ok(value << (k as u32 - 1))
}

/// `c₁ = (1+ε)/(2r)`.
pub fn base_coefficient(r: f64, epsilon: f64) -> Float {
    let one_plus = Float::with_val(EVAL_PRECISION, 1) + epsilon;
    one_plus / (Float::with_val(EVAL_PRECISION, r) * 2u32)
}

/// First-order guess `ω ≈ 1/c_k` for the angle at which `λ_k` reaches 1.
pub fn omega_estimate(k: usize, r: f64, epsilon: f64) -> Result<Float> {
    Ok(leading_coefficient(k, &base_coefficient(r, epsilon))?.recip())
}
