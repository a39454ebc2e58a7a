//! The single-round 2→1 random access code.
//!
//! Alice encodes two bits `(x₁, x₂)` into one of four qubit states; Bob is
//! asked for bit `y` and answers with the outcome of a dichotomic
//! measurement. Bob's ability to recover bit `y` is limited by how well the
//! two marginal ensembles for that bit can be told apart.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::UnsharpBinaryMeasurement;
use crate::error::{Error, Result};
use crate::qubit::{distinguishability, DensityOp, SharpObservable, Vec3};

/// Denominators below this make a threshold degenerate.
pub const THRESHOLD_DENOMINATOR_FLOOR: f64 = 1e-15;

/// Success probability reachable with one classical bit.
pub const CLASSICAL_BOUND: f64 = 0.75;

/// Four preparations indexed by `(x₁, x₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreparationFamily {
    states: [[DensityOp; 2]; 2],
}

impl PreparationFamily {
    pub fn new(states: [[DensityOp; 2]; 2]) -> Self {
        Self { states }
    }

    /// Every preparation is `rho`.
    pub fn uniform(rho: DensityOp) -> Self {
        Self { states: [[rho; 2]; 2] }
    }

    pub fn from_bloch_vectors(vectors: [[Vec3; 2]; 2]) -> Result<Self> {
        let [[a, b], [c, d]] = vectors;
        Ok(Self::new([
            [DensityOp::from_bloch_vector(a)?, DensityOp::from_bloch_vector(b)?],
            [DensityOp::from_bloch_vector(c)?, DensityOp::from_bloch_vector(d)?],
        ]))
    }

    pub fn state(&self, x1: usize, x2: usize) -> &DensityOp {
        &self.states[x1][x2]
    }

    /// `(x₁, x₂, ρ)` in the order 00, 01, 10, 11.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &DensityOp)> + '_ {
        (0..2).flat_map(move |x1| (0..2).map(move |x2| (x1, x2, &self.states[x1][x2])))
    }

    /// Applies `f` to each preparation.
    pub fn map(&self, mut f: impl FnMut(&DensityOp) -> DensityOp) -> Self {
        let s = &self.states;
        Self::new([[f(&s[0][0]), f(&s[0][1])], [f(&s[1][0]), f(&s[1][1])]])
    }
}

/// Preparations `n_{x₁x₂} = (−1)^{x₁} a₁ b̂₁ + (−1)^{x₂} a₂ b̂₂`, whose
/// marginal differences point along the two given axes.
pub fn aligned_family(b1: &SharpObservable, b2: &SharpObservable, a1: f64, a2: f64) -> Result<PreparationFamily> {
    let n = |x1: usize, x2: usize| sign(x1) * a1 * b1.axis() + sign(x2) * a2 * b2.axis();
    PreparationFamily::from_bloch_vectors([[n(0, 0), n(0, 1)], [n(1, 0), n(1, 1)]])
}

fn sign(bit: usize) -> f64 {
    if bit == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Square (or, for `r < 1`, rectangular) family in the x–z plane realising
/// `(Δ₁, Δ₂) = (cos ω, r sin ω)`.
pub fn square_preparations(omega: f64, r: f64) -> Result<PreparationFamily> {
    if !(omega > 0.0 && omega < std::f64::consts::FRAC_PI_2) {
        return Err(Error::Domain(format!("omega {omega} is outside (0, pi/2)")));
    }
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Domain(format!("r {r} is outside (0, 1]")));
    }
    aligned_family(&SharpObservable::x(), &SharpObservable::z(), omega.cos(), r * omega.sin())
}

/// Equal-weight marginal ensembles `(ρ₀^(y), ρ₁^(y))` for bit `y ∈ {1, 2}`.
pub fn marginals(prep: &PreparationFamily, y: usize) -> (DensityOp, DensityOp) {
    let s = &prep.states;
    match y {
        1 => (s[0][0].mix(&s[0][1]), s[1][0].mix(&s[1][1])),
        2 => (s[0][0].mix(&s[1][0]), s[0][1].mix(&s[1][1])),
        _ => panic!("bit index must be 1 or 2, got {y}"),
    }
}

/// Preparation distinguishabilities of the two marginal pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistinguishabilityPair {
    pub delta1: f64,
    pub delta2: f64,
}

impl DistinguishabilityPair {
    pub fn new(delta1: f64, delta2: f64) -> Self {
        Self { delta1, delta2 }
    }

    pub fn norm_squared(&self) -> f64 {
        self.delta1 * self.delta1 + self.delta2 * self.delta2
    }

    pub fn sum(&self) -> f64 {
        self.delta1 + self.delta2
    }

    pub fn max_abs_diff(&self, other: &DistinguishabilityPair) -> f64 {
        (self.delta1 - other.delta1).abs().max((self.delta2 - other.delta2).abs())
    }
}

pub fn delta_pair(prep: &PreparationFamily) -> DistinguishabilityPair {
    let (a0, a1) = marginals(prep, 1);
    let (b0, b1) = marginals(prep, 2);
    DistinguishabilityPair::new(distinguishability(&a0, &a1), distinguishability(&b0, &b1))
}

/// Average success over uniform `x` and `y`, Bob answering `x_y = 0` on `+`.
pub fn avg_success(prep: &PreparationFamily, m1: &UnsharpBinaryMeasurement, m2: &UnsharpBinaryMeasurement) -> f64 {
    let mut total = 0.0;
    for (x1, x2, rho) in prep.iter() {
        for (m, bit) in [(m1, x1), (m2, x2)] {
            let outcome = if bit == 0 { 1 } else { -1 };
            total += rho.as_op().trace_product(&m.effect(outcome));
        }
    }
    total / 8.0
}

/// Upper bound `½ + ¼(λ₁Δ₁ + λ₂Δ₂)` on [`avg_success`], tight at the Helstrom axes.
pub fn success_bound(dp: &DistinguishabilityPair, lambda1: f64, lambda2: f64) -> f64 {
    0.5 + 0.25 * (lambda1 * dp.delta1 + lambda2 * dp.delta2)
}

/// Excess over 1 that is still treated as a tie (floating-point rounding).
pub const ADVANTAGE_TIE_TOLERANCE: f64 = 4.0 * f64::EPSILON;

/// Strict quantum advantage: `λ₁Δ₁ + λ₂Δ₂ > 1`. Sums within
/// [`ADVANTAGE_TIE_TOLERANCE`] of 1 count as equality.
pub fn advantage_predicate(dp: &DistinguishabilityPair, lambda1: f64, lambda2: f64) -> bool {
    lambda1 * dp.delta1 + lambda2 * dp.delta2 - 1.0 > ADVANTAGE_TIE_TOLERANCE
}

/// Anticommuting unsharp observables admit a joint measurement iff
/// `λ₁² + λ₂² ≤ 1`; advantage needs them to be incompatible.
pub fn incompatible(lambda1: f64, lambda2: f64) -> bool {
    lambda1 * lambda1 + lambda2 * lambda2 > 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub delta_pair: DistinguishabilityPair,
    /// Equal unsharpness must exceed `1/(Δ₁+Δ₂)`.
    pub lambda_symmetric_critical: f64,
    /// With a sharp first measurement, the second must exceed `(1−Δ₁)/Δ₂`.
    pub lambda_asymmetric_critical: f64,
    pub classical_simplex_violated: bool,
}

impl ThresholdReport {
    /// Total version of [`thresholds`] for scans: degenerate thresholds become `+∞`.
    pub fn scan(dp: DistinguishabilityPair) -> Self {
        let sum = dp.sum();
        Self {
            delta_pair: dp,
            lambda_symmetric_critical: if sum < THRESHOLD_DENOMINATOR_FLOOR { f64::INFINITY } else { 1.0 / sum },
            lambda_asymmetric_critical: if dp.delta2 < THRESHOLD_DENOMINATOR_FLOOR {
                f64::INFINITY
            } else {
                (1.0 - dp.delta1) / dp.delta2
            },
            classical_simplex_violated: sum > 1.0,
        }
    }
}

pub fn thresholds(dp: &DistinguishabilityPair) -> Result<ThresholdReport> {
    for denominator in [dp.sum(), dp.delta2] {
        if denominator < THRESHOLD_DENOMINATOR_FLOOR {
            return Err(Error::DegenerateThreshold { denominator });
        }
    }
    Ok(ThresholdReport::scan(*dp))
}

/// Sampling law for random preparation families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stratum {
    /// Bloch vectors uniform in the unit ball.
    Ball,
    /// Pure states, uniform on the sphere.
    Sphere,
}

pub fn random_bloch_vector<R: Rng + ?Sized>(rng: &mut R, stratum: Stratum) -> Vec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        let len = v.norm();
        if len <= 1.0 && len > 1e-6 {
            return match stratum {
                Stratum::Ball => v,
                Stratum::Sphere => v / len,
            };
        }
    }
}

pub fn random_family<R: Rng + ?Sized>(rng: &mut R, stratum: Stratum) -> PreparationFamily {
    let mut draw = || DensityOp::from_bloch_vector(random_bloch_vector(rng, stratum)).expect("sampled inside the ball");
    PreparationFamily::new([[draw(), draw()], [draw(), draw()]])
}

/// Largest `Δ₁² + Δ₂²` over the given families (0 for none).
pub fn max_delta_norm_squared<'a>(families: impl IntoIterator<Item = &'a PreparationFamily>) -> f64 {
    families.into_iter().map(|p| delta_pair(p).norm_squared()).fold(0.0, f64::max)
}

/// Draws `count` random families, alternating ball and sphere strata, and
/// returns the largest `Δ₁² + Δ₂²` seen.
pub fn theorem1_sampler(count: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let stratum = if i % 2 == 0 { Stratum::Ball } else { Stratum::Sphere };
            delta_pair(&random_family(&mut rng, stratum)).norm_squared()
        })
        .fold(0.0, f64::max)
}
