//! Shared oracles: explicit 2×2 complex matrices and seeded samplers.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use seqrac::channel::SequentialChannelStep;
use seqrac::qubit::{DensityOp, HermitianOp, SharpObservable, Vec3};

pub type Mat = [[C; 2]; 2];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64) -> C {
    C::new(re, 0.0)
}

pub fn matrix(a: &HermitianOp) -> Mat {
    let (t, v) = (a.trace_part, a.bloch);
    [[c(t + v.z), C::new(v.x, -v.y)], [C::new(v.x, v.y), c(t - v.z)]]
}

pub fn identity() -> Mat {
    [[c(1.0), c(0.0)], [c(0.0), c(1.0)]]
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    let mut out = [[c(0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    let mut out = *a;
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] += b[i][j];
        }
    }
    out
}

pub fn scale(a: &Mat, s: f64) -> Mat {
    let mut out = *a;
    for row in out.iter_mut() {
        for x in row.iter_mut() {
            *x *= s;
        }
    }
    out
}

pub fn trace(a: &Mat) -> C {
    a[0][0] + a[1][1]
}

pub fn max_entry_diff(a: &Mat, b: &Mat) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}

/// Eigenvalues of a Hermitian 2×2 matrix from its characteristic polynomial.
pub fn eigenvalues(a: &Mat) -> (f64, f64) {
    let mean = 0.5 * (a[0][0].re + a[1][1].re);
    let half_gap = 0.5 * (a[0][0].re - a[1][1].re);
    let radius = (half_gap * half_gap + a[0][1].norm_sqr()).sqrt();
    (mean - radius, mean + radius)
}

/// Orthonormal eigenvectors paired with eigenvalues, smallest first.
pub fn eigensystem(a: &Mat) -> [(f64, [C; 2]); 2] {
    let (lo, hi) = eigenvalues(a);
    let vector = |mu: f64| {
        // (a - mu) v = 0; pick the better-conditioned row.
        let r0 = [a[0][0] - mu, a[0][1]];
        let r1 = [a[1][0], a[1][1] - mu];
        let row = if r0[0].norm() + r0[1].norm() >= r1[0].norm() + r1[1].norm() { r0 } else { r1 };
        let v = if row[0].norm() + row[1].norm() < 1e-300 { [c(1.0), c(0.0)] } else { [row[1], -row[0]] };
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        [v[0] / n, v[1] / n]
    };
    let v_lo = vector(lo);
    // Second vector orthogonal to the first; avoids trouble at degenerate spectra.
    let v_hi = [-v_lo[1].conj(), v_lo[0].conj()];
    [(lo, v_lo), (hi, v_hi)]
}

/// Positive square root by spectral decomposition.
pub fn sqrt_psd(a: &Mat) -> Mat {
    let mut out = [[c(0.0); 2]; 2];
    for (mu, v) in eigensystem(a) {
        let s = mu.max(0.0).sqrt();
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] += v[i] * v[j].conj() * s;
            }
        }
    }
    out
}

pub fn trace_norm(a: &Mat) -> f64 {
    let (lo, hi) = eigenvalues(a);
    lo.abs() + hi.abs()
}

pub fn random_unit<R: Rng>(rng: &mut R) -> Vec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

pub fn random_state<R: Rng>(rng: &mut R) -> DensityOp {
    let len: f64 = rng.gen::<f64>().cbrt();
    DensityOp::from_bloch_vector(random_unit(rng) * len).unwrap()
}

pub fn random_pure<R: Rng>(rng: &mut R) -> DensityOp {
    DensityOp::from_bloch_vector(random_unit(rng)).unwrap()
}

pub fn random_observable<R: Rng>(rng: &mut R) -> SharpObservable {
    SharpObservable::along(random_unit(rng)).unwrap()
}

pub fn random_hermitian<R: Rng>(rng: &mut R) -> HermitianOp {
    HermitianOp::new(
        rng.gen_range(-2.0..2.0),
        Vec3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
    )
}

/// `½ Σ_b (P_b ρ P_b + K_b ρ K_b)` built from matrices, with `K_b = √E_b`
/// taken by spectral decomposition.
pub fn matrix_channel(rho: &Mat, step: &SequentialChannelStep) -> Mat {
    let b1 = matrix(step.b1().as_op());
    let b2 = matrix(step.b2().as_op());
    let mut out = [[c(0.0); 2]; 2];
    for sign in [1.0, -1.0] {
        let p = scale(&add(&identity(), &scale(&b1, sign)), 0.5);
        let k = sqrt_psd(&scale(&add(&identity(), &scale(&b2, sign * step.lambda())), 0.5));
        out = add(&out, &mul(&mul(&p, rho), &p));
        out = add(&out, &mul(&mul(&k, rho), &k));
    }
    scale(&out, 0.5)
}
