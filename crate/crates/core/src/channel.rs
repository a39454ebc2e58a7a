//! Unsharp dichotomic measurements, their Lüders instruments and the
//! non-selective channel that each receiver hands on to the next one.

use crate::error::{Error, Result};
use crate::qubit::{DensityOp, HermitianOp, SharpObservable};

/// Branches with probability below this have no defined post-measurement state.
pub const ZERO_BRANCH_PROBABILITY: f64 = 1e-15;

fn check_unsharpness(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!("unsharpness {lambda} is outside [0, 1]")));
    }
    Ok(())
}

/// POVM `E± = (𝟙 ± λB)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnsharpBinaryMeasurement {
    observable: SharpObservable,
    lambda: f64,
}

impl UnsharpBinaryMeasurement {
    pub fn new(observable: SharpObservable, lambda: f64) -> Result<Self> {
        check_unsharpness(lambda)?;
        Ok(Self { observable, lambda })
    }

    pub fn sharp(observable: SharpObservable) -> Self {
        Self { observable, lambda: 1.0 }
    }

    pub fn observable(&self) -> &SharpObservable {
        &self.observable
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// POVM element for outcome `sign` (+1 or −1).
    pub fn effect(&self, sign: i8) -> HermitianOp {
        let s = f64::from(sign.signum());
        HermitianOp::new(0.5, 0.5 * s * self.lambda * self.observable.axis())
    }

    pub fn kraus(&self) -> KrausPair {
        KrausPair::for_measurement(&self.observable, self.lambda)
    }
}

/// Lüders operators `K± = α𝟙 ± βB = √E±`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrausPair {
    pub k_plus: HermitianOp,
    pub k_minus: HermitianOp,
    pub alpha: f64,
    pub beta: f64,
}

impl KrausPair {
    fn for_measurement(b: &SharpObservable, lambda: f64) -> Self {
        let up = ((1.0 + lambda) / 2.0).sqrt();
        let down = ((1.0 - lambda) / 2.0).sqrt();
        let alpha = 0.5 * (up + down);
        let beta = 0.5 * (up - down);
        Self {
            k_plus: HermitianOp::new(alpha, beta * b.axis()),
            k_minus: HermitianOp::new(alpha, -beta * b.axis()),
            alpha,
            beta,
        }
    }

    pub fn get(&self, sign: i8) -> &HermitianOp {
        if sign >= 0 {
            &self.k_plus
        } else {
            &self.k_minus
        }
    }
}

pub fn kraus_pair(b: &SharpObservable, lambda: f64) -> Result<KrausPair> {
    check_unsharpness(lambda)?;
    Ok(KrausPair::for_measurement(b, lambda))
}

/// One outcome of a selective measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub probability: f64,
    pub post: Result<DensityOp>,
}

/// Born probabilities and Lüders post-measurement states for both outcomes.
/// A branch with probability below [`ZERO_BRANCH_PROBABILITY`] carries
/// [`Error::ZeroProbabilityBranch`] in place of a state.
pub fn selective_outcome(rho: &DensityOp, m: &UnsharpBinaryMeasurement) -> (Branch, Branch) {
    let kraus = m.kraus();
    let branch = |sign: i8| {
        let probability = rho.as_op().trace_product(&m.effect(sign));
        let post = if probability < ZERO_BRANCH_PROBABILITY {
            Err(Error::ZeroProbabilityBranch { probability })
        } else {
            let unnormalised = kraus.get(sign).sandwich(rho.as_op());
            DensityOp::from_operator(unnormalised * (1.0 / unnormalised.trace()))
        };
        Branch { probability, post }
    };
    (branch(1), branch(-1))
}

/// `Σ_b P_b ρ P_b` with projectors `P± = (𝟙 ± B)/2`.
pub fn projective_dephase(rho: &DensityOp, b: &SharpObservable) -> DensityOp {
    let axis = b.axis();
    DensityOp::from_bloch_vector(axis * axis.dot(&rho.bloch_vector()))
        .expect("projection of a valid Bloch vector is valid")
}

/// The channel applied by one receiver when its outcome is forgotten: with
/// probability ½ a projective measurement of `b1`, otherwise a Lüders
/// measurement of `b2` at unsharpness `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequentialChannelStep {
    b1: SharpObservable,
    b2: SharpObservable,
    lambda: f64,
}

impl SequentialChannelStep {
    pub fn new(b1: SharpObservable, b2: SharpObservable, lambda: f64) -> Result<Self> {
        check_unsharpness(lambda)?;
        Ok(Self { b1, b2, lambda })
    }

    /// `b1 = σx`, `b2 = σz`.
    pub fn standard(lambda: f64) -> Result<Self> {
        Self::new(SharpObservable::x(), SharpObservable::z(), lambda)
    }

    pub fn b1(&self) -> &SharpObservable {
        &self.b1
    }

    pub fn b2(&self) -> &SharpObservable {
        &self.b2
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn anticommuting(&self) -> bool {
        self.b1.anticommutes_with(&self.b2)
    }

    /// The measurement performed when bit `y` (1 or 2) is requested.
    pub fn measurement(&self, y: usize) -> UnsharpBinaryMeasurement {
        if y == 1 {
            UnsharpBinaryMeasurement::sharp(self.b1)
        } else {
            UnsharpBinaryMeasurement { observable: self.b2, lambda: self.lambda }
        }
    }

    /// Applies the channel to an arbitrary Hermitian operator through its
    /// Kraus operators: `½ Σ_b (P_b A P_b + K_b A K_b)`.
    pub fn apply(&self, a: &HermitianOp) -> HermitianOp {
        let p_plus = HermitianOp::new(0.5, 0.5 * self.b1.axis());
        let p_minus = HermitianOp::new(0.5, -0.5 * self.b1.axis());
        let kraus = KrausPair::for_measurement(&self.b2, self.lambda);
        (p_plus.sandwich(a) + p_minus.sandwich(a) + kraus.k_plus.sandwich(a) + kraus.k_minus.sandwich(a)) * 0.5
    }
}

pub fn nonselective_step(rho: &DensityOp, step: &SequentialChannelStep) -> DensityOp {
    let out = step.apply(rho.as_op());
    // Trace preservation is exact in the Bloch form; pin it anyway.
    DensityOp::from_bloch_vector(2.0 * out.bloch).expect("unital contraction keeps states valid")
}

/// Heisenberg image of `b` under the step (the channel is self-dual).
pub fn transport_observable(b: &SharpObservable, step: &SequentialChannelStep) -> HermitianOp {
    step.apply(b.as_op())
}
