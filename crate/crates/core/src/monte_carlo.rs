//! Shot-by-shot simulation of the sequential protocol.
//!
//! Each shot draws Alice's bits, then lets every receiver pick a question at
//! random, sample an outcome with the Born rule and collapse the qubit with
//! the Lüders rule before passing it on. Every shot owns its own ChaCha8
//! stream (stream id = shot index), so results do not depend on how shots are
//! split across threads.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{selective_outcome, SequentialChannelStep, UnsharpBinaryMeasurement};
use crate::error::{Error, Result};
use crate::qubit::{DensityOp, Vec3};
use crate::rac::PreparationFamily;

/// Identifies the random stream layout; recorded in run manifests.
pub const RNG_ALGORITHM: &str = "chacha8-seed_from_u64-stream_per_shot/v1";

/// Environment variable capping the worker threads used for shards.
pub const THREADS_ENV: &str = "SEQRAC_THREADS";

const SHARD_SIZE: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn sign(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }
}

/// `+ → 0`, `− → 1`, matching `E_{b} = (𝟙 + (−1)^b λB)/2`.
pub fn outcome_to_guess(outcome: Outcome) -> u8 {
    match outcome {
        Outcome::Plus => 0,
        Outcome::Minus => 1,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub prep: PreparationFamily,
    pub steps: Vec<SequentialChannelStep>,
    pub shots: u64,
    pub seed: u64,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps.is_empty() {
            return Err(Error::Domain("simulation needs at least one receiver".into()));
        }
        if self.shots == 0 {
            return Err(Error::Domain("shots must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReceiverTally {
    pub successes: u64,
    pub shots_counted: u64,
    /// Questions asked, indexed by `y − 1`.
    pub asked: [u64; 2],
    pub correct: [u64; 2],
}

impl ReceiverTally {
    pub fn empirical_success(&self) -> f64 {
        self.successes as f64 / self.shots_counted as f64
    }

    pub fn standard_error(&self) -> f64 {
        let p = self.empirical_success();
        (p * (1.0 - p) / self.shots_counted as f64).sqrt()
    }

    fn merge(&mut self, other: &ReceiverTally) {
        self.successes += other.successes;
        self.shots_counted += other.shots_counted;
        for y in 0..2 {
            self.asked[y] += other.asked[y];
            self.correct[y] += other.correct[y];
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub receivers: Vec<ReceiverTally>,
    pub seed: u64,
    pub shots: u64,
    pub rng_algorithm: &'static str,
}

/// Base generator for a seed; per-shot streams are derived from it.
fn base_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn shot_rng(base: &ChaCha8Rng, shot: u64) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(shot);
    rng.set_word_pos(0);
    rng
}

/// Samples one selective measurement and returns the outcome and the collapsed state.
pub fn measure<R: Rng + ?Sized>(rng: &mut R, rho: &DensityOp, m: &UnsharpBinaryMeasurement) -> (Outcome, DensityOp) {
    let (plus, minus) = selective_outcome(rho, m);
    let draw: f64 = rng.gen();
    let prefer_plus = draw < plus.probability;
    // A branch below the zero-probability floor is never returned.
    match (prefer_plus, plus.post, minus.post) {
        (true, Ok(post), _) | (false, Ok(post), Err(_)) => (Outcome::Plus, post),
        (_, _, Ok(post)) => (Outcome::Minus, post),
        (_, Err(_), Err(_)) => unreachable!("branch probabilities sum to one"),
    }
}

fn thread_pool() -> rayon::ThreadPool {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        builder = builder.num_threads(n);
    }
    builder.build().expect("thread pool")
}

fn shards(shots: u64) -> Vec<(u64, u64)> {
    (0..shots.div_ceil(SHARD_SIZE)).map(|i| (i * SHARD_SIZE, ((i + 1) * SHARD_SIZE).min(shots))).collect()
}

fn run_shard(config: &SimulationConfig, base: &ChaCha8Rng, range: (u64, u64)) -> Vec<ReceiverTally> {
    let mut tallies = vec![ReceiverTally::default(); config.steps.len()];
    for shot in range.0..range.1 {
        let mut rng = shot_rng(base, shot);
        let bits: u8 = rng.gen();
        let x = [(bits & 1) as usize, ((bits >> 1) & 1) as usize];
        let mut state = *config.prep.state(x[0], x[1]);
        for (step, tally) in config.steps.iter().zip(tallies.iter_mut()) {
            let y = if rng.gen::<bool>() { 2 } else { 1 };
            let (outcome, post) = measure(&mut rng, &state, &step.measurement(y));
            let hit = usize::from(outcome_to_guess(outcome)) == x[y - 1];
            tally.shots_counted += 1;
            tally.asked[y - 1] += 1;
            if hit {
                tally.successes += 1;
                tally.correct[y - 1] += 1;
            }
            state = post;
        }
    }
    tallies
}

/// Runs the configured number of shots. Identical configs give identical results.
pub fn run(config: &SimulationConfig) -> Result<SimulationResult> {
    config.validate()?;
    let base = base_rng(config.seed);
    let parts: Vec<Vec<ReceiverTally>> =
        thread_pool().install(|| shards(config.shots).into_par_iter().map(|range| run_shard(config, &base, range)).collect());
    let mut receivers = vec![ReceiverTally::default(); config.steps.len()];
    for part in &parts {
        for (total, t) in receivers.iter_mut().zip(part) {
            total.merge(t);
        }
    }
    Ok(SimulationResult { receivers, seed: config.seed, shots: config.shots, rng_algorithm: RNG_ALGORITHM })
}

/// Mean Bloch vector of the post-measurement state when one receiver
/// measures `rho` with a random question and the outcome is forgotten.
/// Converges to the Bloch vector of `nonselective_step(rho, step)`.
pub fn marginalize_step(rho: &DensityOp, step: &SequentialChannelStep, shots: u64, seed: u64) -> Vec3 {
    let base = base_rng(seed);
    let sums: Vec<Vec3> = thread_pool().install(|| {
        shards(shots)
            .into_par_iter()
            .map(|(start, end)| {
                let mut sum = Vec3::zeros();
                for shot in start..end {
                    let mut rng = shot_rng(&base, shot);
                    let y = if rng.gen::<bool>() { 2 } else { 1 };
                    let (_, post) = measure(&mut rng, rho, &step.measurement(y));
                    sum += post.bloch_vector();
                }
                sum
            })
            .collect()
    });
    sums.iter().fold(Vec3::zeros(), |acc, s| acc + s) / shots as f64
}
