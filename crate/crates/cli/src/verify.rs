//! The invariant suite behind `seqrac verify`. Sample sizes are chosen so
//! the whole suite finishes in a few seconds.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::Float;
use serde::{Deserialize, Serialize};

use seqrac::channel::{nonselective_step, selective_outcome, transport_observable, SequentialChannelStep, UnsharpBinaryMeasurement};
use seqrac::monte_carlo::{self, marginalize_step, SimulationConfig};
use seqrac::poly::{base_coefficient, leading_coefficient, leading_coefficient_polynomial, small_angle_poly};
use seqrac::qubit::{distinguishability, guessing_probability, helstrom_observable, DensityOp, HermitianOp, SharpObservable, Vec3};
use seqrac::rac::{avg_success, delta_pair, marginals, random_bloch_vector, random_family, square_preparations, theorem1_sampler, PreparationFamily, Stratum};
use seqrac::schedule::{feasibility_report, float, lambda_sequence};
use seqrac::sequential::propagate;

use crate::emit::{flag, to_json, Table};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyDoc {
    pub schema: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
}

pub const VERIFY_SCHEMA: &str = "seqrac.verify/1";

fn check(name: &str, worst: f64, limit: f64) -> Check {
    Check { name: name.into(), passed: worst < limit, detail: format!("worst {worst:.3e} (limit {limit:.0e})") }
}

fn unit(rng: &mut ChaCha8Rng) -> Vec3 {
    random_bloch_vector(rng, Stratum::Sphere)
}

fn state(rng: &mut ChaCha8Rng) -> DensityOp {
    DensityOp::from_bloch_vector(random_bloch_vector(rng, Stratum::Ball)).expect("inside the ball")
}

fn observable(rng: &mut ChaCha8Rng) -> SharpObservable {
    SharpObservable::along(unit(rng)).expect("unit vector")
}

fn random_step(rng: &mut ChaCha8Rng) -> SequentialChannelStep {
    SequentialChannelStep::new(observable(rng), observable(rng), rng.gen()).expect("λ in [0, 1)")
}

fn helstrom(rng: &mut ChaCha8Rng) -> Vec<Check> {
    let mut equality: f64 = 0.0;
    let mut excess = f64::NEG_INFINITY;
    let mut triangle = f64::NEG_INFINITY;
    for _ in 0..10_000 {
        let (a, b, c) = (state(rng), state(rng), state(rng));
        let d = distinguishability(&a, &b);
        if let Ok(obs) = helstrom_observable(&a, &b) {
            equality = equality.max((guessing_probability(&a, &b, &obs) - 0.5 * (1.0 + d)).abs());
        }
        for _ in 0..20 {
            excess = excess.max(guessing_probability(&a, &b, &observable(rng)) - 0.5 * (1.0 + d));
        }
        triangle = triangle.max(distinguishability(&a, &c) - d - distinguishability(&b, &c));
    }
    vec![
        check("helstrom_equality", equality, 1e-12),
        check("helstrom_optimality", excess, 1e-12),
        check("triangle_inequality", triangle, 1e-12),
    ]
}

fn preparations(rng: &mut ChaCha8Rng) -> Vec<Check> {
    let bound = theorem1_sampler(100_000, rng.gen()) - 1.0;
    let mut saturation: f64 = 0.0;
    let mut tradeoff: f64 = 0.0;
    for i in 0..5_000 {
        let (u, v) = (unit(rng), unit(rng));
        let prep = PreparationFamily::from_bloch_vectors([[u, v], [-v, -u]]).expect("unit vectors");
        saturation = saturation.max((delta_pair(&prep).norm_squared() - 1.0).abs());

        let prep = random_family(rng, if i % 2 == 0 { Stratum::Ball } else { Stratum::Sphere });
        let (a0, a1) = marginals(&prep, 1);
        let (b0, b1) = marginals(&prep, 2);
        let (Ok(h1), Ok(h2)) = (helstrom_observable(&a0, &a1), helstrom_observable(&b0, &b1)) else { continue };
        let (l1, l2): (f64, f64) = (rng.gen(), rng.gen());
        let dp = delta_pair(&prep);
        let m1 = UnsharpBinaryMeasurement::new(h1, l1).expect("λ in [0, 1)");
        let m2 = UnsharpBinaryMeasurement::new(h2, l2).expect("λ in [0, 1)");
        tradeoff = tradeoff.max((avg_success(&prep, &m1, &m2) - (0.5 + 0.25 * (l1 * dp.delta1 + l2 * dp.delta2))).abs());
    }
    vec![
        check("squared_distinguishability_bound", bound, 1e-9),
        check("orthogonal_pure_saturation", saturation, 1e-12),
        check("unsharp_tradeoff_tight", tradeoff, 1e-12),
    ]
}

fn channel(rng: &mut ChaCha8Rng) -> Vec<Check> {
    let mut cptp: f64 = 0.0;
    let mut mixture: f64 = 0.0;
    let mut duality: f64 = 0.0;
    for _ in 0..10_000 {
        let rho = state(rng);
        let step = random_step(rng);
        let out = nonselective_step(&rho, &step);
        cptp = cptp.max((out.as_op().trace() - 1.0).abs()).max(-out.as_op().eigenvalues().0);
        let mut mix = HermitianOp::zero();
        for y in [1, 2] {
            let (plus, minus) = selective_outcome(&rho, &step.measurement(y));
            for branch in [plus, minus] {
                if let Ok(post) = branch.post {
                    mix = mix + *post.as_op() * (0.5 * branch.probability);
                }
            }
        }
        let gap = mix - *out.as_op();
        mixture = mixture.max(gap.trace_part.abs().max(gap.bloch.amax()));
        for b in [step.b1(), step.b2()] {
            let lhs = out.as_op().trace_product(b.as_op());
            duality = duality.max((lhs - rho.as_op().trace_product(&transport_observable(b, &step))).abs());
        }
    }
    vec![
        check("channel_trace_and_positivity", cptp, 1e-12),
        check("channel_is_branch_average", mixture, 1e-12),
        check("channel_self_duality", duality, 1e-12),
    ]
}

fn sequential(rng: &mut ChaCha8Rng) -> Vec<Check> {
    let mut discrepancy: f64 = 0.0;
    let mut success: f64 = 0.0;
    for _ in 0..1_000 {
        let omega = rng.gen_range(1e-3..1.57);
        let r = rng.gen_range(0.05..=1.0);
        let n = rng.gen_range(1..=8);
        let prep = square_preparations(omega, r).expect("valid angle");
        let steps: Vec<_> = (0..n).map(|_| SequentialChannelStep::standard(rng.gen()).expect("λ in [0, 1)")).collect();
        let trace = propagate(&prep, &steps).expect("aligned family");
        discrepancy = discrepancy.max(trace.max_discrepancy());
        for (rec, step) in trace.receivers.iter().zip(&steps) {
            let born = avg_success(
                &rec.family,
                &UnsharpBinaryMeasurement::sharp(SharpObservable::x()),
                &UnsharpBinaryMeasurement::new(SharpObservable::z(), step.lambda()).expect("λ in [0, 1)"),
            );
            success = success.max((born - rec.success.expect("measuring receiver")).abs());
        }
    }
    vec![check("recursion_matches_exact", discrepancy, 1e-12), check("success_matches_born_rule", success, 1e-12)]
}

fn schedules(rng: &mut ChaCha8Rng) -> Vec<Check> {
    let (mut feasible, mut doubling, mut advantaged) = (0, true, true);
    for _ in 0..500 {
        let omega = 10f64.powf(rng.gen_range(-6.0..0.19));
        let s = lambda_sequence(&float(omega), rng.gen_range(0.1..=1.0), 10f64.powf(rng.gen_range(-6.0..-1.0)), rng.gen_range(1..=7))
            .expect("valid domain");
        if s.is_feasible() {
            feasible += 1;
            doubling &= feasibility_report(&s).monotone_doubling;
            advantaged &= s.all_advantaged();
        }
    }
    let mut worst: f64 = 0.0;
    let c1 = base_coefficient(1.0, 1e-4);
    for omega in [1e-3, 1e-4] {
        for k in 1..=6 {
            let s = lambda_sequence(&float(omega), 1.0, 1e-4, k).expect("valid domain");
            let predicted = leading_coefficient(k, &c1).expect("k within cap") * omega;
            let lambda = &s.rows.last().expect("non-empty").lambda;
            let rel = Float::with_val(256, lambda - &predicted) / &predicted;
            worst = worst.max(rel.to_f64().abs() / (omega * omega));
        }
    }
    let mut lemma = true;
    for k in 1..=10 {
        let p = leading_coefficient_polynomial(k).expect("k within cap");
        lemma &= p.coefficients().iter().step_by(2).all(|c| *c == 0);
        lemma &= small_angle_poly(k).expect("k within cap").degree() == Some((1 << (k - 1)) - 1);
    }
    vec![
        Check {
            name: "schedule_doubling_and_advantage".into(),
            passed: doubling && advantaged && feasible > 0,
            detail: format!("{feasible} feasible schedules sampled"),
        },
        Check {
            name: "small_angle_consistency".into(),
            passed: worst < 5.0,
            detail: format!("worst relative error / omega^2 = {worst:.3e} (limit 5)"),
        },
        Check { name: "odd_powers_and_degree".into(), passed: lemma, detail: "k = 1..10".into() },
    ]
}

fn simulation(rng: &mut ChaCha8Rng) -> Vec<Check> {
    let prep = square_preparations(0.3, 1.0).expect("valid angle");
    let steps = vec![SequentialChannelStep::standard(0.5).expect("λ"), SequentialChannelStep::standard(0.8).expect("λ")];
    let config = SimulationConfig { prep, steps: steps.clone(), shots: 200_000, seed: rng.gen() };
    let a = monte_carlo::run(&config).expect("valid config");
    let b = monte_carlo::run(&config).expect("valid config");
    let trace = propagate(&prep, &steps).expect("aligned family");
    let mut worst_z: f64 = 0.0;
    for (t, rec) in a.receivers.iter().zip(&trace.receivers) {
        worst_z = worst_z.max((t.empirical_success() - rec.success.expect("measuring receiver")).abs() / t.standard_error());
    }
    let shots = 100_000;
    let rho = state(rng);
    let step = random_step(rng);
    let distance = (marginalize_step(&rho, &step, shots, rng.gen()) - nonselective_step(&rho, &step).bloch_vector()).norm();
    vec![
        Check { name: "simulation_deterministic".into(), passed: a == b, detail: "two identical runs".into() },
        check("simulation_converges_z", worst_z, 4.0),
        check("marginal_state_matches_channel", distance * (shots as f64).sqrt(), 3.0),
    ]
}

pub fn run_suite(seed: u64) -> VerifyDoc {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    checks.extend(helstrom(&mut rng));
    checks.extend(preparations(&mut rng));
    checks.extend(channel(&mut rng));
    checks.extend(sequential(&mut rng));
    checks.extend(schedules(&mut rng));
    checks.extend(simulation(&mut rng));
    let passed = checks.iter().all(|c| c.passed);
    VerifyDoc { schema: VERIFY_SCHEMA.into(), seed, passed, checks }
}

pub fn report(doc: &VerifyDoc) -> crate::reports::Report {
    let mut table = Table::new(vec!["check", "passed", "detail"]);
    for c in &doc.checks {
        table.push(vec![c.name.clone(), flag(c.passed).into(), c.detail.clone()]);
    }
    crate::reports::Report { stem: "verify", csv: table.to_csv(), json: to_json(doc), infeasible: false }
}
