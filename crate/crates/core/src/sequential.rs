//! Propagation of Alice's preparations through a chain of receivers.
//!
//! Receiver `k` measures `b1` sharply when asked for bit 1 and `b2` at
//! unsharpness `λ_k` when asked for bit 2, then forwards the qubit. Averaged
//! over the forgotten outcome and the uniform question, the state handed to
//! receiver `k+1` is `Φ_k(ρ)` (see [`nonselective_step`]).
//!
//! Every trace carries two independent sets of distinguishabilities: exact
//! trace norms of the propagated marginals, and the closed-form contraction
//! `Δ₁ ← ½(1+√(1−λ²))Δ₁`, `Δ₂ ← ½Δ₂`, which is only valid when `b1` and `b2`
//! anticommute.

use crate::channel::{nonselective_step, SequentialChannelStep};
use crate::error::{Error, Result};
use crate::qubit::{SharpObservable, STATE_TOLERANCE};
use crate::rac::{delta_pair, marginals, DistinguishabilityPair, PreparationFamily};

/// Allowed misalignment between a marginal difference and its observable.
pub const ALIGNMENT_TOLERANCE: f64 = 1e-9;

/// What receiver `k` (1-based) sees.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverState {
    pub k: usize,
    pub family: PreparationFamily,
    pub exact: DistinguishabilityPair,
    pub recursion: DistinguishabilityPair,
    /// Unsharpness this receiver uses, if it measures.
    pub lambda: Option<f64>,
    pub success: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequentialTrace {
    pub receivers: Vec<ReceiverState>,
}

impl SequentialTrace {
    /// Largest disagreement between the two distinguishability routes.
    pub fn max_discrepancy(&self) -> f64 {
        self.receivers.iter().map(|r| r.exact.max_abs_diff(&r.recursion)).fold(0.0, f64::max)
    }
}

/// `½ + ¼(Δ₁ + λΔ₂)`: sharp Helstrom measurement for bit 1, unsharp for bit 2.
pub fn per_bob_success(dp: &DistinguishabilityPair, lambda: f64) -> f64 {
    0.5 + 0.25 * (dp.delta1 + lambda * dp.delta2)
}

/// One application of the closed-form contraction.
pub fn recursion_step(dp: &DistinguishabilityPair, lambda: f64) -> DistinguishabilityPair {
    DistinguishabilityPair::new(0.5 * (1.0 + (1.0 - lambda * lambda).sqrt()) * dp.delta1, 0.5 * dp.delta2)
}

fn alignment_residual(prep: &PreparationFamily, y: usize, b: &SharpObservable) -> f64 {
    let (rho0, rho1) = marginals(prep, y);
    let d = rho0.bloch_vector() - rho1.bloch_vector();
    let axis = b.axis();
    (d - axis * d.dot(&axis)).norm()
}

fn check_steps(prep: &PreparationFamily, steps: &[SequentialChannelStep]) -> Result<()> {
    let Some(first) = steps.first() else {
        return Ok(());
    };
    if !first.anticommuting() {
        return Err(Error::Axis { index: 0, reason: "b1 and b2 do not anticommute".into() });
    }
    for (index, step) in steps.iter().enumerate().skip(1) {
        let same = (step.b1().axis() - first.b1().axis()).amax() <= STATE_TOLERANCE
            && (step.b2().axis() - first.b2().axis()).amax() <= STATE_TOLERANCE;
        if !same {
            return Err(Error::Axis { index, reason: "axes differ from step 1".into() });
        }
    }
    for (bit, b) in [(1, first.b1()), (2, first.b2())] {
        let residual = alignment_residual(prep, bit, b);
        if residual > ALIGNMENT_TOLERANCE {
            return Err(Error::Alignment { bit, residual });
        }
    }
    Ok(())
}

fn propagate_unchecked(prep: &PreparationFamily, steps: &[SequentialChannelStep]) -> SequentialTrace {
    let mut receivers = Vec::with_capacity(steps.len() + 1);
    let mut family = *prep;
    let mut recursion = delta_pair(prep);
    for k in 1..=steps.len() + 1 {
        let exact = delta_pair(&family);
        let lambda = steps.get(k - 1).map(SequentialChannelStep::lambda);
        receivers.push(ReceiverState {
            k,
            family,
            exact,
            recursion,
            lambda,
            success: lambda.map(|l| per_bob_success(&exact, l)),
        });
        if let Some(step) = steps.get(k - 1) {
            family = family.map(|rho| nonselective_step(rho, step));
            recursion = recursion_step(&recursion, step.lambda());
        }
    }
    SequentialTrace { receivers }
}

/// Runs the family through `steps`. Entry `k` is what receiver `k` sees;
/// the trace has `steps.len() + 1` entries, the last one being the state
/// left after the final measuring receiver.
pub fn propagate(prep: &PreparationFamily, steps: &[SequentialChannelStep]) -> Result<SequentialTrace> {
    check_steps(prep, steps)?;
    Ok(propagate_unchecked(prep, steps))
}

/// Negative control: the same pipeline for axes that need not anticommute
/// (or align with the family). Returns the largest exact-vs-recursion gap.
pub fn lemma2_violation_probe(prep: &PreparationFamily, tilted_steps: &[SequentialChannelStep]) -> f64 {
    propagate_unchecked(prep, tilted_steps).max_discrepancy()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rac::{aligned_family, square_preparations};
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    fn steps(lambdas: &[f64]) -> Vec<SequentialChannelStep> {
        lambdas.iter().map(|&l| SequentialChannelStep::standard(l).unwrap()).collect()
    }

    #[test]
    fn sharp_step_halves_both() {
        let trace = propagate(&square_preparations(FRAC_PI_4, 1.0).unwrap(), &steps(&[1.0])).unwrap();
        let bob2 = &trace.receivers[1];
        assert_relative_eq!(bob2.exact.delta1, 0.5 * FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_relative_eq!(bob2.exact.delta2, 0.5 * FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_relative_eq!(bob2.exact.delta1, 0.353_553_390_593_273_8, epsilon = 1e-12);
        assert!(trace.max_discrepancy() < 1e-12);
        assert_eq!(bob2.success, None);
    }

    #[test]
    fn trivial_step_keeps_bit_one() {
        for w in [0.1, 0.7, 1.3] {
            let trace = propagate(&square_preparations(w, 0.8).unwrap(), &steps(&[0.0])).unwrap();
            let (b1, b2) = (&trace.receivers[0], &trace.receivers[1]);
            assert_relative_eq!(b2.exact.delta1, b1.exact.delta1, epsilon = 1e-12);
            assert_relative_eq!(b2.exact.delta2, 0.5 * b1.exact.delta2, epsilon = 1e-12);
        }
    }

    #[test]
    fn two_receiver_example() {
        let w = 0.3f64;
        let trace = propagate(&square_preparations(w, 1.0).unwrap(), &steps(&[0.5, 0.8])).unwrap();
        let bob2 = &trace.receivers[1];
        let d1 = 0.5 * (1.0 + 0.75f64.sqrt()) * w.cos();
        assert_relative_eq!(bob2.exact.delta1, d1, epsilon = 1e-12);
        assert_relative_eq!(bob2.exact.delta1, 0.891_341_3, epsilon = 1e-6);
        assert_relative_eq!(bob2.exact.delta2, 0.5 * w.sin(), epsilon = 1e-12);
        assert_relative_eq!(bob2.exact.delta2, 0.147_760_1, epsilon = 1e-6);
        assert!(trace.max_discrepancy() < 1e-12);

        assert_relative_eq!(trace.receivers[0].success.unwrap(), 0.775_774_2, epsilon = 1e-6);
        assert_relative_eq!(bob2.success.unwrap(), 0.752_387_3, epsilon = 1e-6);
    }

    #[test]
    fn per_bob_success_examples() {
        let opt = DistinguishabilityPair::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        assert_relative_eq!(per_bob_success(&opt, 1.0), 0.853_553_390_593_273_8, epsilon = 1e-15);
        assert_eq!(per_bob_success(&DistinguishabilityPair::new(0.0, 0.0), 0.3), 0.5);
        let dp = DistinguishabilityPair::new(0.891344, 0.147760);
        assert_relative_eq!(per_bob_success(&dp, 0.8), 0.5 + 0.25 * (0.891344 + 0.118208), epsilon = 1e-15);
    }

    #[test]
    fn rejects_misaligned_or_mixed_axes() {
        let prep = square_preparations(0.4, 1.0).unwrap();
        let swapped = SequentialChannelStep::new(SharpObservable::z(), SharpObservable::x(), 0.5).unwrap();
        assert!(matches!(propagate(&prep, &[swapped]), Err(Error::Alignment { bit: 1, .. })));

        let mut mixed = steps(&[0.2, 0.4]);
        mixed.push(SequentialChannelStep::new(SharpObservable::x(), SharpObservable::y(), 0.5).unwrap());
        assert!(matches!(propagate(&prep, &mixed), Err(Error::Axis { index: 2, .. })));

        let tilted = SequentialChannelStep::new(SharpObservable::x(), SharpObservable::in_xz_plane(1.0), 0.5).unwrap();
        assert!(matches!(propagate(&prep, &[tilted]), Err(Error::Axis { index: 0, .. })));
    }

    fn tilted_probe(angle: f64) -> f64 {
        let b1 = SharpObservable::x();
        let b2 = SharpObservable::in_xz_plane(angle);
        let w = 0.3f64;
        // Shrink so that all four Bloch vectors stay inside the ball.
        let scale = 1.0 / (1.0 + (2.0 * w).sin() * angle.cos().abs()).sqrt();
        let prep = aligned_family(&b1, &b2, scale * w.cos(), scale * w.sin()).unwrap();
        let steps: Vec<_> = (0..3).map(|_| SequentialChannelStep::new(b1, b2, 0.8).unwrap()).collect();
        lemma2_violation_probe(&prep, &steps)
    }

    #[test]
    fn probe_detects_tilted_axes() {
        assert!(tilted_probe(FRAC_PI_2) < 1e-12);
        assert!(tilted_probe(std::f64::consts::FRAC_PI_3) > 1e-6);
        let near = tilted_probe(FRAC_PI_2 - 1e-3);
        assert!(near > 0.0 && near < 1e-2);
        let grid: Vec<f64> = (1..=5).map(|i| tilted_probe(FRAC_PI_2 - i as f64 * 1e-3)).collect();
        assert!(grid.windows(2).all(|w| w[1] > w[0]), "{grid:?}");
    }
}
