//! Unsharpness schedules for a chain of receivers.
//!
//! With Alice's distinguishabilities `(cos ω, r sin ω)` and every receiver
//! measuring bit 1 sharply, receiver `k` beats the classical bound iff
//! `λ_k > (2^{k−1} − cos ω · M_k)/(r sin ω)`, where
//! `M_k = Π_{l<k}(1 + √(1−λ_l²))`. Inflating that threshold by `1+ε` gives
//! the explicit schedule computed here. The schedule is feasible when every
//! `λ_k` lies in `(0, 1)`.
//!
//! The receivers' advantage margins are `ε/4 · (1 − cos ω · M_k/2^{k−1})`,
//! which for many receivers drops far below double precision, and the
//! angles needed for long chains underflow `f64` altogether (ω ≈ 10⁻¹⁵⁰ for
//! ten receivers). Everything is therefore evaluated in MPFR floats, with the
//! cancelling difference `1 − cos ω · Π(1 − u_l)` rewritten through
//! `expm1`/`ln_1p` so that relative accuracy does not depend on ω.

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};

/// Mantissa bits (≈ 77 decimal digits) used for all schedule arithmetic.
pub const SCHEDULE_PRECISION: u32 = 256;

/// Default inflation of the per-receiver thresholds.
pub const DEFAULT_EPSILON: f64 = 1e-4;

/// Halvings below the first-order estimate before [`find_omega`] gives up.
pub const MAX_HALVINGS: usize = 4096;

const BISECTION_STEPS: usize = 80;

/// `find_omega` keeps every `λ_k` at least `2^-SEARCH_GUARD_BITS` below 1, far
/// above the rounding error of the evaluation, so its answer stays feasible
/// under any more precise evaluation.
const SEARCH_GUARD_BITS: i32 = 128;

pub fn float(value: f64) -> Float {
    Float::with_val(SCHEDULE_PRECISION, value)
}

/// One receiver of a schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverRow {
    /// 1-based receiver index.
    pub k: usize,
    pub lambda: Float,
    /// `M_k`, with `M_1 = 1`.
    pub m_product: Float,
    pub delta1: Float,
    pub delta2: Float,
    /// `½ + ¼(Δ₁ + λΔ₂)`; absent when `λ_k ∉ (0, 1)`.
    pub success: Option<Float>,
    /// `success − ¾`, evaluated without cancellation.
    pub margin: Option<Float>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub omega: Float,
    pub r: f64,
    pub epsilon: f64,
    pub n: usize,
    /// Receivers up to `n`, or up to and including the first infeasible one.
    pub rows: Vec<ReceiverRow>,
}

impl Schedule {
    pub fn first_failure(&self) -> Option<usize> {
        self.rows.iter().find(|row| row.success.is_none()).map(|row| row.k)
    }

    pub fn is_feasible(&self) -> bool {
        self.rows.len() == self.n && self.first_failure().is_none()
    }

    /// Every feasible receiver has a strictly positive margin.
    pub fn all_advantaged(&self) -> bool {
        self.rows.iter().all(|row| row.margin.as_ref().is_some_and(|m| m.is_sign_positive() && !m.is_zero()))
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.rows.iter().map(|row| row.lambda.to_f64()).collect()
    }

    /// Number of leading receivers with `λ_k ∈ (0, 1)`.
    pub fn feasible_prefix(&self) -> usize {
        self.rows.iter().take_while(|row| row.success.is_some()).count()
    }
}

fn check_domain(omega: &Float, r: f64, epsilon: f64, n: usize) -> Result<()> {
    let half_pi = Float::with_val(SCHEDULE_PRECISION, Constant::Pi) / 2u32;
    if !(omega.is_sign_positive() && !omega.is_zero() && *omega < half_pi) {
        return Err(Error::Domain(format!("omega {} is outside (0, pi/2)", omega.to_f64())));
    }
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Domain(format!("r {r} is outside (0, 1]")));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Domain(format!("epsilon {epsilon} must be positive")));
    }
    if n == 0 {
        return Err(Error::Domain("at least one receiver is required".into()));
    }
    Ok(())
}

/// Computes `λ₁, …, λ_n` for the given angle, stopping at the first
/// receiver whose `λ_k` leaves `(0, 1)`.
pub fn lambda_sequence(omega: &Float, r: f64, epsilon: f64, n: usize) -> Result<Schedule> {
    check_domain(omega, r, epsilon, n)?;
    let prec = SCHEDULE_PRECISION;
    let omega = Float::with_val(prec, omega);
    let sin = Float::with_val(prec, omega.sin_ref());
    // 1 − cos ω = 2 sin²(ω/2)
    let half_sin = Float::with_val(prec, &omega / 2u32).sin();
    let versine = Float::with_val(prec, half_sin.square() * 2u32);
    let ln_cos = Float::with_val(prec, -&versine).ln_1p();
    let r_big = float(r);
    let inflation = float(1.0) + epsilon;
    let r_sin = Float::with_val(prec, &r_big * &sin);

    // Σ_{l<k} ln(1 − u_l), u_l = (1 − √(1−λ_l²))/2 = λ_l² / (2(1 + √(1−λ_l²)))
    let mut ln_halved_m = float(0.0);
    let mut rows = Vec::with_capacity(n);
    for k in 1..=n {
        let pow2 = (k - 1) as u32;
        let m_product = Float::with_val(prec, ln_halved_m.exp_ref()) << pow2;
        let deficit = -Float::with_val(prec, &ln_cos + &ln_halved_m).exp_m1();
        let lambda = Float::with_val(prec, &inflation * &deficit) << pow2;
        let lambda = lambda / &r_sin;
        let delta1 = float(1.0) - &deficit;
        let delta2 = Float::with_val(prec, &r_sin >> pow2);

        let inside = lambda.is_sign_positive() && !lambda.is_zero() && lambda < 1u32;
        let (success, margin) = if inside {
            let lambda_delta2 = Float::with_val(prec, &lambda * &delta2);
            let margin = Float::with_val(prec, &lambda_delta2 - &deficit) / 4u32;
            let success = Float::with_val(prec, &delta1 + &lambda_delta2) / 4u32 + 0.5;
            (Some(success), Some(margin))
        } else {
            (None, None)
        };

        if inside {
            let lambda_sq = Float::with_val(prec, lambda.square_ref());
            let root = (float(1.0) - &lambda_sq).sqrt();
            let u = lambda_sq / ((root + 1u32) * 2u32);
            ln_halved_m += (-u).ln_1p();
        }
        rows.push(ReceiverRow { k, lambda, m_product, delta1, delta2, success, margin });
        if !inside {
            break;
        }
    }
    Ok(Schedule { omega, r, epsilon, n, rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub feasible: bool,
    /// `λ_{k+1} > 2λ_k` for every consecutive pair present.
    pub monotone_doubling: bool,
    /// 1-based index of the first `λ_k ∉ (0, 1)`.
    pub first_failure: Option<usize>,
}

pub fn feasibility_report(s: &Schedule) -> FeasibilityReport {
    let monotone_doubling = s.rows.windows(2).all(|w| w[1].lambda > Float::with_val(SCHEDULE_PRECISION, &w[0].lambda * 2u32));
    FeasibilityReport { feasible: s.is_feasible(), monotone_doubling, first_failure: s.first_failure() }
}

/// Largest `n ≤ cap` for which the schedule at this angle is feasible.
pub fn max_feasible_receivers(omega: &Float, r: f64, epsilon: f64, cap: usize) -> Result<usize> {
    Ok(lambda_sequence(omega, r, epsilon, cap)?.feasible_prefix())
}

/// First-order coefficients `c_1..c_n` from
/// `c_k = 2^{k−1} c₁ (1 + Σ_{j<k} c_j²/2)`, in floating point.
pub fn first_order_coefficients(n: usize, r: f64, epsilon: f64) -> Vec<Float> {
    let c1 = (float(1.0) + epsilon) / (float(r) * 2u32);
    let mut out: Vec<Float> = Vec::with_capacity(n);
    let mut sum_sq = float(0.0);
    for k in 1..=n {
        let c = if k == 1 { c1.clone() } else { Float::with_val(SCHEDULE_PRECISION, &c1 * (float(1.0) + Float::with_val(SCHEDULE_PRECISION, &sum_sq / 2u32))) << (k as u32 - 1) };
        sum_sq += Float::with_val(SCHEDULE_PRECISION, c.square_ref());
        out.push(c);
    }
    out
}

fn feasible_at(omega: &Float, r: f64, epsilon: f64, n: usize) -> Result<bool> {
    let s = lambda_sequence(omega, r, epsilon, n)?;
    let ceiling = float(1.0) - Float::with_val(SCHEDULE_PRECISION, Float::i_exp(1, -SEARCH_GUARD_BITS));
    Ok(s.is_feasible() && s.all_advantaged() && s.rows.iter().all(|row| row.lambda < ceiling))
}

/// Finds an angle at which all `n` receivers are feasible.
///
/// Starts from the first-order estimate `1/c_n`, halves until feasible
/// (doubling instead, while feasible, to get an infeasible upper end), then
/// bisects the bracket and returns its feasible end. The result is the
/// same for identical arguments.
pub fn find_omega(n: usize, r: f64, epsilon: f64) -> Result<Float> {
    check_domain(&float(0.5), r, epsilon, n)?;
    let half_pi = Float::with_val(SCHEDULE_PRECISION, Constant::Pi) / 2u32;
    let ceiling = Float::with_val(SCHEDULE_PRECISION, &half_pi * 0.999_999);
    let estimate = first_order_coefficients(n, r, epsilon).pop().expect("n ≥ 1").recip();
    let start = if estimate < ceiling { estimate } else { ceiling.clone() };

    let (mut lo, mut hi);
    if feasible_at(&start, r, epsilon, n)? {
        lo = start;
        hi = None;
        while hi.is_none() {
            let up = Float::with_val(SCHEDULE_PRECISION, &lo * 2u32);
            if up >= ceiling {
                if feasible_at(&ceiling, r, epsilon, n)? {
                    return Ok(ceiling);
                }
                hi = Some(ceiling.clone());
            } else if feasible_at(&up, r, epsilon, n)? {
                lo = up;
            } else {
                hi = Some(up);
            }
        }
    } else {
        let mut upper = start;
        let mut halvings = 0;
        loop {
            let down = Float::with_val(SCHEDULE_PRECISION, &upper / 2u32);
            halvings += 1;
            if feasible_at(&down, r, epsilon, n)? {
                lo = down;
                hi = Some(upper);
                break;
            }
            if halvings >= MAX_HALVINGS {
                return Err(Error::SearchExhausted { receivers: n, halvings });
            }
            upper = down;
        }
    }

    let mut hi = hi.expect("bracket has an infeasible upper end");
    for _ in 0..BISECTION_STEPS {
        let mid = Float::with_val(SCHEDULE_PRECISION, &lo + &hi) / 2u32;
        if feasible_at(&mid, r, epsilon, n)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
