//! Qubit operator algebra in Bloch form.
//!
//! Every operator here is a 2×2 Hermitian matrix written as
//! `A = t·𝟙 + a·σ`, where σ is the vector of Pauli matrices. Products of
//! Pauli vectors close under `(a·σ)(b·σ) = (a·b)𝟙 + i(a×b)·σ`, so all the
//! maps needed by the protocol (sandwiches, anticommutators, traces) have
//! exact closed forms on the `(t, a)` pair.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Vector3;

use crate::error::{Error, Result};

/// Slack allowed on state validity (`|n| ≤ 1`, positivity) and on `B² = 𝟙`.
pub const STATE_TOLERANCE: f64 = 1e-12;

/// Two states closer than this in Bloch distance have no Helstrom axis.
pub const DEGENERACY_TOLERANCE: f64 = 1e-12;

pub type Vec3 = Vector3<f64>;

/// `trace_part·𝟙 + bloch·σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianOp {
    pub trace_part: f64,
    pub bloch: Vec3,
}

impl HermitianOp {
    pub const fn new(trace_part: f64, bloch: Vec3) -> Self {
        Self { trace_part, bloch }
    }

    pub fn zero() -> Self {
        Self::new(0.0, Vec3::zeros())
    }

    pub fn identity() -> Self {
        Self::new(1.0, Vec3::zeros())
    }

    /// Eigenvalues `(t − |a|, t + |a|)`, smallest first.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let r = self.bloch.norm();
        (self.trace_part - r, self.trace_part + r)
    }

    pub fn trace(&self) -> f64 {
        2.0 * self.trace_part
    }

    /// Sum of absolute eigenvalues.
    pub fn trace_norm(&self) -> f64 {
        let (lo, hi) = self.eigenvalues();
        lo.abs() + hi.abs()
    }

    /// Hilbert–Schmidt inner product `tr(A·B)`.
    pub fn trace_product(&self, other: &HermitianOp) -> f64 {
        2.0 * (self.trace_part * other.trace_part + self.bloch.dot(&other.bloch))
    }

    /// `{A, B} = AB + BA`.
    pub fn anticommutator(&self, other: &HermitianOp) -> HermitianOp {
        HermitianOp::new(
            2.0 * (self.trace_part * other.trace_part + self.bloch.dot(&other.bloch)),
            2.0 * (self.trace_part * other.bloch + other.trace_part * self.bloch),
        )
    }

    /// `A·X·A` for Hermitian `A = self` and `X = inner`. The result is Hermitian.
    pub fn sandwich(&self, inner: &HermitianOp) -> HermitianOp {
        let (k0, k) = (self.trace_part, &self.bloch);
        let (r0, r) = (inner.trace_part, &inner.bloch);
        let kr = k.dot(r);
        let kk = k.norm_squared();
        HermitianOp::new(
            k0 * k0 * r0 + 2.0 * k0 * kr + r0 * kk,
            k0 * k0 * r + 2.0 * k0 * r0 * k + 2.0 * kr * k - kk * r,
        )
    }

    pub fn is_close(&self, other: &HermitianOp, tol: f64) -> bool {
        (self.trace_part - other.trace_part).abs() <= tol && (self.bloch - other.bloch).amax() <= tol
    }
}

impl Add for HermitianOp {
    type Output = HermitianOp;
    fn add(self, rhs: HermitianOp) -> HermitianOp {
        HermitianOp::new(self.trace_part + rhs.trace_part, self.bloch + rhs.bloch)
    }
}

impl Sub for HermitianOp {
    type Output = HermitianOp;
    fn sub(self, rhs: HermitianOp) -> HermitianOp {
        HermitianOp::new(self.trace_part - rhs.trace_part, self.bloch - rhs.bloch)
    }
}

impl Neg for HermitianOp {
    type Output = HermitianOp;
    fn neg(self) -> HermitianOp {
        HermitianOp::new(-self.trace_part, -self.bloch)
    }
}

impl Mul<f64> for HermitianOp {
    type Output = HermitianOp;
    fn mul(self, rhs: f64) -> HermitianOp {
        HermitianOp::new(self.trace_part * rhs, self.bloch * rhs)
    }
}

impl Mul<HermitianOp> for f64 {
    type Output = HermitianOp;
    fn mul(self, rhs: HermitianOp) -> HermitianOp {
        rhs * self
    }
}

/// A qubit density operator `(𝟙 + n·σ)/2` with `|n| ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityOp(HermitianOp);

impl DensityOp {
    /// Builds the state with Bloch vector `n`. Rejects `|n| > 1 + 1e-12`.
    pub fn from_bloch_vector(n: Vec3) -> Result<Self> {
        let len = n.norm();
        if !len.is_finite() || len > 1.0 + STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("Bloch vector length {len} exceeds 1")));
        }
        Ok(Self(HermitianOp::new(0.5, 0.5 * n)))
    }

    /// Accepts any operator with unit trace and non-negative spectrum (within tolerance).
    pub fn from_operator(op: HermitianOp) -> Result<Self> {
        if (op.trace() - 1.0).abs() > STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("trace {} is not 1", op.trace())));
        }
        let (lo, _) = op.eigenvalues();
        if lo < -STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("negative eigenvalue {lo}")));
        }
        Ok(Self(HermitianOp::new(0.5, op.bloch)))
    }

    pub fn maximally_mixed() -> Self {
        Self(HermitianOp::new(0.5, Vec3::zeros()))
    }

    pub fn bloch_vector(&self) -> Vec3 {
        2.0 * self.0.bloch
    }

    pub fn as_op(&self) -> &HermitianOp {
        &self.0
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.bloch_vector().norm() - 1.0).abs() <= tol
    }

    /// Equal-weight mixture of two states.
    pub fn mix(&self, other: &DensityOp) -> DensityOp {
        DensityOp(HermitianOp::new(0.5, 0.5 * (self.0.bloch + other.0.bloch)))
    }
}

impl From<DensityOp> for HermitianOp {
    fn from(rho: DensityOp) -> HermitianOp {
        rho.0
    }
}

/// A dichotomic observable `b·σ` with `|b| = 1`, eigenvalues ±1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpObservable(HermitianOp);

impl SharpObservable {
    /// Observable along `axis`, which is normalised. Fails on a (near) zero axis.
    pub fn along(axis: Vec3) -> Result<Self> {
        let len = axis.norm();
        if !len.is_finite() || len <= DEGENERACY_TOLERANCE {
            return Err(Error::InvalidObservable(format!("axis length {len} cannot be normalised")));
        }
        Ok(Self(HermitianOp::new(0.0, axis / len)))
    }

    pub fn x() -> Self {
        Self(HermitianOp::new(0.0, Vec3::x()))
    }

    pub fn y() -> Self {
        Self(HermitianOp::new(0.0, Vec3::y()))
    }

    pub fn z() -> Self {
        Self(HermitianOp::new(0.0, Vec3::z()))
    }

    /// Observable in the x–z plane at `angle` radians from the x axis.
    pub fn in_xz_plane(angle: f64) -> Self {
        Self(HermitianOp::new(0.0, Vec3::new(angle.cos(), 0.0, angle.sin())))
    }

    pub fn axis(&self) -> Vec3 {
        self.0.bloch
    }

    pub fn as_op(&self) -> &HermitianOp {
        &self.0
    }

    /// `{B₁, B₂} = 0`, i.e. orthogonal Bloch axes.
    pub fn anticommutes_with(&self, other: &SharpObservable) -> bool {
        self.axis().dot(&other.axis()).abs() <= STATE_TOLERANCE
    }
}

impl From<SharpObservable> for HermitianOp {
    fn from(b: SharpObservable) -> HermitianOp {
        b.0
    }
}

pub fn trace_norm(a: &HermitianOp) -> f64 {
    a.trace_norm()
}

/// `½‖ρ₀ − ρ₁‖₁`, which for qubits is half the Bloch distance.
pub fn distinguishability(rho0: &DensityOp, rho1: &DensityOp) -> f64 {
    0.5 * (*rho0.as_op() - *rho1.as_op()).trace_norm()
}

/// The optimal two-outcome measurement for telling `rho0` from `rho1`: the
/// sign of `ρ₀ − ρ₁`, i.e. the unit observable along `n₀ − n₁`.
pub fn helstrom_observable(rho0: &DensityOp, rho1: &DensityOp) -> Result<SharpObservable> {
    let diff = rho0.bloch_vector() - rho1.bloch_vector();
    let separation = diff.norm();
    if separation <= DEGENERACY_TOLERANCE {
        return Err(Error::DegeneratePair { separation });
    }
    SharpObservable::along(diff)
}

/// `½[tr(ρ₀E₊) + tr(ρ₁E₋)]` with `E± = (𝟙 ± B)/2`: guess `ρ₀` on `+`, `ρ₁` on `−`.
pub fn guessing_probability(rho0: &DensityOp, rho1: &DensityOp, b: &SharpObservable) -> f64 {
    let e_plus = HermitianOp::new(0.5, 0.5 * b.axis());
    let e_minus = HermitianOp::new(0.5, -0.5 * b.axis());
    0.5 * (rho0.as_op().trace_product(&e_plus) + rho1.as_op().trace_product(&e_minus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn pure(theta: f64) -> DensityOp {
        DensityOp::from_bloch_vector(Vec3::new(theta.cos(), 0.0, theta.sin())).unwrap()
    }

    #[test]
    fn trace_norm_examples() {
        assert_relative_eq!(trace_norm(SharpObservable::z().as_op()), 2.0);
        assert_eq!(trace_norm(&HermitianOp::zero()), 0.0);
        let a = HermitianOp::new(0.3, Vec3::new(0.0, 0.3, 0.4));
        assert_relative_eq!(trace_norm(&a), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn distinguishability_examples() {
        let up = DensityOp::from_bloch_vector(Vec3::z()).unwrap();
        let down = DensityOp::from_bloch_vector(-Vec3::z()).unwrap();
        assert_relative_eq!(distinguishability(&up, &down), 1.0);
        assert_eq!(distinguishability(&up, &up), 0.0);
        assert_relative_eq!(distinguishability(&pure(0.0), &pure(FRAC_PI_2)), FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn helstrom_axis_follows_bloch_difference() {
        let up = DensityOp::from_bloch_vector(Vec3::z()).unwrap();
        let down = DensityOp::from_bloch_vector(-Vec3::z()).unwrap();
        assert_relative_eq!(helstrom_observable(&up, &down).unwrap().axis(), Vec3::z());

        let w = 0.7f64;
        let r0 = DensityOp::from_bloch_vector(Vec3::new(w.cos(), 0.0, w.sin())).unwrap();
        let r1 = DensityOp::from_bloch_vector(Vec3::new(-w.cos(), 0.0, w.sin())).unwrap();
        assert_relative_eq!(helstrom_observable(&r0, &r1).unwrap().axis(), Vec3::x(), epsilon = 1e-15);

        assert!(matches!(helstrom_observable(&r0, &r0), Err(Error::DegeneratePair { .. })));
    }

    #[test]
    fn guessing_probability_examples() {
        let up = DensityOp::from_bloch_vector(Vec3::z()).unwrap();
        let down = DensityOp::from_bloch_vector(-Vec3::z()).unwrap();
        assert_relative_eq!(guessing_probability(&up, &down, &SharpObservable::z()), 1.0);
        let mixed = DensityOp::maximally_mixed();
        assert_relative_eq!(guessing_probability(&up, &up, &SharpObservable::x()), 0.5);
        assert_relative_eq!(guessing_probability(&mixed, &mixed, &SharpObservable::z()), 0.5);

        let (a, b) = (pure(0.0), pure(FRAC_PI_2));
        let h = helstrom_observable(&a, &b).unwrap();
        assert_relative_eq!(guessing_probability(&a, &b, &h), 0.5 * (1.0 + FRAC_1_SQRT_2), epsilon = 1e-15);
        assert_relative_eq!(guessing_probability(&a, &b, &h), 0.853_553_390_593_273_8, epsilon = 1e-15);
    }

    #[test]
    fn state_validation() {
        assert!(DensityOp::from_bloch_vector(Vec3::new(1.0 + 1e-9, 0.0, 0.0)).is_err());
        assert!(DensityOp::from_bloch_vector(Vec3::new(1.0 + 1e-13, 0.0, 0.0)).is_ok());
        let negative = HermitianOp::new(0.5, Vec3::new(0.0, 0.0, 0.6));
        assert!(DensityOp::from_operator(negative).is_err());
        assert!(DensityOp::from_operator(HermitianOp::new(0.4, Vec3::zeros())).is_err());
        assert!(SharpObservable::along(Vec3::zeros()).is_err());
    }

    #[test]
    fn pauli_algebra_identities() {
        let n = SharpObservable::along(Vec3::new(1.0, 2.0, -0.5)).unwrap();
        let m = SharpObservable::along(Vec3::new(-0.3, 0.1, 2.0)).unwrap();
        let anti = n.as_op().anticommutator(m.as_op());
        assert_relative_eq!(anti.trace_part, 2.0 * n.axis().dot(&m.axis()), epsilon = 1e-15);
        assert_relative_eq!(anti.bloch.norm(), 0.0);
        // B·𝟙·B = B² = 𝟙
        let sq = n.as_op().sandwich(&HermitianOp::identity());
        assert!(sq.is_close(&HermitianOp::identity(), 1e-12));
        assert!(SharpObservable::x().anticommutes_with(&SharpObservable::z()));
        assert!(!n.anticommutes_with(&m));
    }
}
