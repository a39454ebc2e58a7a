//! Data reports: each builds an in-memory CSV table and a JSON document.

use std::f64::consts::FRAC_PI_2;

use rug::Float;
use serde::{Deserialize, Serialize};

use seqrac::channel::SequentialChannelStep;
use seqrac::monte_carlo::{self, SimulationConfig};
use seqrac::poly::{leading_coefficient_polynomial, odd_power_coefficients, small_angle_poly};
use seqrac::rac::{square_preparations, DistinguishabilityPair, ThresholdReport};
use seqrac::schedule::{feasibility_report, lambda_sequence, Schedule};
use seqrac::sequential::propagate;

use crate::emit::{big, flag, num, to_json, Table};

/// A finished report: the CSV table, the JSON document, and whether the
/// underlying schedule was infeasible.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub stem: &'static str,
    pub csv: Vec<u8>,
    pub json: Vec<u8>,
    pub infeasible: bool,
}

impl Report {
    fn new<T: Serialize>(stem: &'static str, table: &Table, doc: &T, infeasible: bool) -> Self {
        Self { stem, csv: table.to_csv(), json: to_json(doc), infeasible }
    }
}

// ---------------------------------------------------------------- thresholds

/// Which `(Δ₁, Δ₂)` points to tabulate.
#[derive(Debug, Clone, PartialEq)]
pub enum ThresholdGrid {
    /// `points` equally spaced angles on the unit arc `Δ₁² + Δ₂² = 1`.
    Arc { points: usize },
    /// Explicit `Δ₁` values, paired with a fixed `Δ₂` or, if absent, with
    /// `√(1−Δ₁²)` on the arc.
    Values { delta1: Vec<f64>, delta2: Option<f64> },
}

impl ThresholdGrid {
    pub fn points(&self) -> Result<Vec<DistinguishabilityPair>, String> {
        match self {
            ThresholdGrid::Arc { points } => {
                if *points < 2 {
                    return Err("an arc grid needs at least 2 points".into());
                }
                let last = points - 1;
                let angle = |i: usize| i as f64 / last as f64 * FRAC_PI_2;
                // Evaluate each coordinate from its nearer end so that the
                // grid is exactly symmetric under Δ₁ ↔ Δ₂.
                let coord = |i: usize| if 2 * i <= last { angle(i).cos() } else { angle(last - i).sin() };
                Ok((0..*points).map(|i| DistinguishabilityPair::new(coord(i), coord(last - i))).collect())
            }
            ThresholdGrid::Values { delta1, delta2 } => {
                if delta1.is_empty() {
                    return Err("no delta1 values given".into());
                }
                if let Some(d2) = delta2 {
                    if !(0.0..=1.0).contains(d2) {
                        return Err(format!("delta2 {d2} is outside [0, 1]"));
                    }
                }
                delta1
                    .iter()
                    .map(|&d1| {
                        if !(0.0..=1.0).contains(&d1) {
                            return Err(format!("delta1 {d1} is outside [0, 1]"));
                        }
                        match delta2 {
                            None => Ok(DistinguishabilityPair::new(d1, (1.0 - d1 * d1).sqrt())),
                            Some(d2) => {
                                if d1 * d1 + d2 * d2 > 1.0 + 1e-12 {
                                    return Err(format!("({d1}, {d2}) lies outside the unit disc"));
                                }
                                Ok(DistinguishabilityPair::new(d1, *d2))
                            }
                        }
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub delta1: f64,
    pub delta2: f64,
    /// `None` when the threshold does not exist (zero denominator).
    pub lambda_sym_critical: Option<f64>,
    pub lambda_asym_critical: Option<f64>,
    pub simplex_violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdDoc {
    pub schema: String,
    pub rows: Vec<ThresholdRow>,
}

pub const THRESHOLDS_SCHEMA: &str = "seqrac.thresholds/1";

pub fn thresholds(grid: &ThresholdGrid) -> Result<Report, String> {
    let mut table = Table::new(vec!["delta1", "delta2", "lambda_sym_critical", "lambda_asym_critical", "simplex_violated"]);
    let mut rows = Vec::new();
    for dp in grid.points()? {
        let t = ThresholdReport::scan(dp);
        table.push(vec![
            num(dp.delta1),
            num(dp.delta2),
            num(t.lambda_symmetric_critical),
            num(t.lambda_asymmetric_critical),
            flag(t.classical_simplex_violated).into(),
        ]);
        let finite = |x: f64| x.is_finite().then_some(x);
        rows.push(ThresholdRow {
            delta1: dp.delta1,
            delta2: dp.delta2,
            lambda_sym_critical: finite(t.lambda_symmetric_critical),
            lambda_asym_critical: finite(t.lambda_asymmetric_critical),
            simplex_violated: t.classical_simplex_violated,
        });
    }
    Ok(Report::new("thresholds", &table, &ThresholdDoc { schema: THRESHOLDS_SCHEMA.into(), rows }, false))
}

// -------------------------------------------------------------------- region

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionRow {
    pub delta1: f64,
    pub delta2: f64,
    pub inside_quantum_disc: bool,
    pub inside_classical_simplex: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionDoc {
    pub schema: String,
    pub resolution: usize,
    pub rows: Vec<RegionRow>,
}

pub const REGION_SCHEMA: &str = "seqrac.region/1";

pub fn classify(delta1: f64, delta2: f64) -> RegionRow {
    RegionRow {
        delta1,
        delta2,
        inside_quantum_disc: delta1 * delta1 + delta2 * delta2 <= 1.0 + 1e-12,
        inside_classical_simplex: delta1 + delta2 <= 1.0 + 1e-12,
    }
}

pub fn region(resolution: usize) -> Result<Report, String> {
    if resolution < 2 {
        return Err("resolution must be at least 2".into());
    }
    let step = |i: usize| i as f64 / (resolution - 1) as f64;
    let mut table = Table::new(vec!["delta1", "delta2", "inside_quantum_disc", "inside_classical_simplex"]);
    let mut rows = Vec::with_capacity(resolution * resolution);
    for i in 0..resolution {
        for j in 0..resolution {
            let row = classify(step(i), step(j));
            table.push(vec![
                num(row.delta1),
                num(row.delta2),
                flag(row.inside_quantum_disc).into(),
                flag(row.inside_classical_simplex).into(),
            ]);
            rows.push(row);
        }
    }
    Ok(Report::new("region", &table, &RegionDoc { schema: REGION_SCHEMA.into(), resolution, rows }, false))
}

// ------------------------------------------------------------------ schedule

/// An extended-precision value with its nearest double alongside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Wide {
    pub value: f64,
    pub decimal: String,
}

impl From<&Float> for Wide {
    fn from(x: &Float) -> Self {
        Self { value: x.to_f64(), decimal: big(x) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleRowDoc {
    pub k: usize,
    pub lambda: Wide,
    pub m_product: Wide,
    pub delta1: Wide,
    pub delta2: Wide,
    pub success: Option<Wide>,
    pub margin: Option<Wide>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleDoc {
    pub schema: String,
    pub omega: Wide,
    pub r: f64,
    pub epsilon: f64,
    pub n: usize,
    pub feasible: bool,
    pub monotone_doubling: bool,
    pub all_advantaged: bool,
    pub first_failure: Option<usize>,
    pub receivers: Vec<ScheduleRowDoc>,
}

pub const SCHEDULE_SCHEMA: &str = "seqrac.schedule/1";

pub fn schedule_doc(s: &Schedule) -> ScheduleDoc {
    let report = feasibility_report(s);
    ScheduleDoc {
        schema: SCHEDULE_SCHEMA.into(),
        omega: Wide::from(&s.omega),
        r: s.r,
        epsilon: s.epsilon,
        n: s.n,
        feasible: report.feasible,
        monotone_doubling: report.monotone_doubling,
        all_advantaged: report.feasible && s.all_advantaged(),
        first_failure: report.first_failure,
        receivers: s
            .rows
            .iter()
            .map(|row| ScheduleRowDoc {
                k: row.k,
                lambda: Wide::from(&row.lambda),
                m_product: Wide::from(&row.m_product),
                delta1: Wide::from(&row.delta1),
                delta2: Wide::from(&row.delta2),
                success: row.success.as_ref().map(Wide::from),
                margin: row.margin.as_ref().map(Wide::from),
            })
            .collect(),
    }
}

pub fn schedule_table(s: &Schedule) -> Table {
    let mut table = Table::new(vec!["k", "lambda", "m_product", "delta1", "delta2", "success", "margin", "advantage"]);
    for row in &s.rows {
        let advantage = row.margin.as_ref().is_some_and(|m| m.is_sign_positive() && !m.is_zero());
        table.push(vec![
            row.k.to_string(),
            big(&row.lambda),
            big(&row.m_product),
            big(&row.delta1),
            big(&row.delta2),
            row.success.as_ref().map(big).unwrap_or_default(),
            row.margin.as_ref().map(big).unwrap_or_default(),
            flag(advantage).into(),
        ]);
    }
    table
}

pub fn schedule(omega: &Float, r: f64, epsilon: f64, n: usize) -> seqrac::Result<Report> {
    let s = lambda_sequence(omega, r, epsilon, n)?;
    let doc = schedule_doc(&s);
    let infeasible = !(doc.feasible && doc.all_advantaged);
    Ok(Report::new("schedule", &schedule_table(&s), &doc, infeasible))
}

// ------------------------------------------------------------------ sequence

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceRow {
    pub k: usize,
    pub lambda: Option<f64>,
    pub delta1_exact: f64,
    pub delta2_exact: f64,
    pub delta1_recursion: f64,
    pub delta2_recursion: f64,
    pub success: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceDoc {
    pub schema: String,
    pub omega: f64,
    pub r: f64,
    pub max_discrepancy: f64,
    pub receivers: Vec<SequenceRow>,
}

pub const SEQUENCE_SCHEMA: &str = "seqrac.sequence/1";

pub fn standard_steps(lambdas: &[f64]) -> seqrac::Result<Vec<SequentialChannelStep>> {
    lambdas.iter().map(|&l| SequentialChannelStep::standard(l)).collect()
}

pub fn sequence(omega: f64, r: f64, lambdas: &[f64]) -> seqrac::Result<Report> {
    let trace = propagate(&square_preparations(omega, r)?, &standard_steps(lambdas)?)?;
    let mut table = Table::new(vec![
        "k",
        "lambda",
        "delta1_exact",
        "delta2_exact",
        "delta1_recursion",
        "delta2_recursion",
        "success",
        "advantage",
    ]);
    let mut rows = Vec::new();
    for rec in &trace.receivers {
        table.push(vec![
            rec.k.to_string(),
            rec.lambda.map(num).unwrap_or_default(),
            num(rec.exact.delta1),
            num(rec.exact.delta2),
            num(rec.recursion.delta1),
            num(rec.recursion.delta2),
            rec.success.map(num).unwrap_or_default(),
            rec.success.map(|p| flag(p > 0.75).to_string()).unwrap_or_default(),
        ]);
        rows.push(SequenceRow {
            k: rec.k,
            lambda: rec.lambda,
            delta1_exact: rec.exact.delta1,
            delta2_exact: rec.exact.delta2,
            delta1_recursion: rec.recursion.delta1,
            delta2_recursion: rec.recursion.delta2,
            success: rec.success,
        });
    }
    let doc = SequenceDoc { schema: SEQUENCE_SCHEMA.into(), omega, r, max_discrepancy: trace.max_discrepancy(), receivers: rows };
    Ok(Report::new("sequence", &table, &doc, false))
}

// ------------------------------------------------------------------ simulate

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRow {
    pub k: usize,
    pub lambda: f64,
    pub shots_counted: u64,
    pub successes: u64,
    pub empirical_success: f64,
    pub standard_error: f64,
    pub analytic_success: f64,
    pub within_4se: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationDoc {
    pub schema: String,
    pub omega: f64,
    pub r: f64,
    pub shots: u64,
    pub seed: u64,
    pub rng_algorithm: String,
    pub receivers: Vec<SimulationRow>,
}

pub const SIMULATION_SCHEMA: &str = "seqrac.simulation/1";

pub fn simulate(omega: f64, r: f64, lambdas: &[f64], shots: u64, seed: u64) -> seqrac::Result<Report> {
    let prep = square_preparations(omega, r)?;
    let steps = standard_steps(lambdas)?;
    let trace = propagate(&prep, &steps)?;
    let result = monte_carlo::run(&SimulationConfig { prep, steps, shots, seed })?;
    let mut table = Table::new(vec![
        "k",
        "lambda",
        "shots_counted",
        "successes",
        "empirical_success",
        "standard_error",
        "analytic_success",
        "within_4se",
    ]);
    let mut rows = Vec::new();
    for ((k, tally), &lambda) in result.receivers.iter().enumerate().zip(lambdas) {
        let analytic = trace.receivers[k].success.expect("measuring receiver");
        let empirical = tally.empirical_success();
        let se = tally.standard_error();
        let row = SimulationRow {
            k: k + 1,
            lambda,
            shots_counted: tally.shots_counted,
            successes: tally.successes,
            empirical_success: empirical,
            standard_error: se,
            analytic_success: analytic,
            within_4se: (empirical - analytic).abs() < 4.0 * se,
        };
        table.push(vec![
            row.k.to_string(),
            num(lambda),
            row.shots_counted.to_string(),
            row.successes.to_string(),
            num(empirical),
            num(se),
            num(analytic),
            flag(row.within_4se).into(),
        ]);
        rows.push(row);
    }
    let doc = SimulationDoc {
        schema: SIMULATION_SCHEMA.into(),
        omega,
        r,
        shots,
        seed,
        rng_algorithm: result.rng_algorithm.into(),
        receivers: rows,
    };
    Ok(Report::new("simulation", &table, &doc, false))
}

// ---------------------------------------------------------------------- poly

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyDoc {
    pub schema: String,
    pub k: usize,
    /// `P_k(x)`, ascending powers of `x`.
    pub p_coefficients: Vec<String>,
    pub p_expansion: String,
    /// Coefficients of `c_k` on `c₁, c₁³, c₁⁵, …`.
    pub c_odd_coefficients: Vec<String>,
    pub c_expansion: String,
}

pub const POLY_SCHEMA: &str = "seqrac.poly/1";

/// `2*c1 + c1^3`-style rendering of an odd-power expansion.
pub fn odd_expansion(coeffs: &[String]) -> String {
    let terms: Vec<String> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.as_str() != "0")
        .map(|(n, c)| {
            let power = 2 * n + 1;
            let var = if power == 1 { "c1".to_string() } else { format!("c1^{power}") };
            if c == "1" {
                var
            } else {
                format!("{c}*{var}")
            }
        })
        .collect();
    terms.join(" + ")
}

pub fn poly(k: usize) -> seqrac::Result<Report> {
    let p = small_angle_poly(k)?;
    let odd: Vec<String> = odd_power_coefficients(k)?.iter().map(ToString::to_string).collect();
    let c_full = leading_coefficient_polynomial(k)?;
    let mut table = Table::new(vec!["series", "power", "coefficient"]);
    for (power, c) in p.coefficients().iter().enumerate() {
        table.push(vec!["P".into(), power.to_string(), c.to_string()]);
    }
    for (power, c) in c_full.coefficients().iter().enumerate() {
        if *c != 0 {
            table.push(vec!["c".into(), power.to_string(), c.to_string()]);
        }
    }
    let doc = PolyDoc {
        schema: POLY_SCHEMA.into(),
        k,
        p_coefficients: p.coefficients().iter().map(ToString::to_string).collect(),
        p_expansion: p.to_string(),
        c_expansion: odd_expansion(&odd),
        c_odd_coefficients: odd,
    };
    Ok(Report::new("poly", &table, &doc, false))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv_text(r: &Report) -> String {
        String::from_utf8(r.csv.clone()).unwrap()
    }

    #[test]
    fn arc_grid_is_symmetric_with_exact_ends() {
        let pts = ThresholdGrid::Arc { points: 101 }.points().unwrap();
        assert_eq!((pts[0].delta1, pts[0].delta2), (1.0, 0.0));
        assert_eq!((pts[100].delta1, pts[100].delta2), (0.0, 1.0));
        assert_eq!(pts[50].delta1, pts[50].delta2);
        assert_eq!(pts[50].delta1, std::f64::consts::FRAC_1_SQRT_2);
        for (a, b) in pts.iter().zip(pts.iter().rev()) {
            assert_eq!(a.delta1, b.delta2);
        }
    }

    #[test]
    fn threshold_rows() {
        let r = thresholds(&ThresholdGrid::Values { delta1: vec![0.0, 1.0], delta2: None }).unwrap();
        let text = csv_text(&r);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "delta1,delta2,lambda_sym_critical,lambda_asym_critical,simplex_violated");
        assert_eq!(lines[1], "0.0,1.0,1.0,1.0,false");
        assert_eq!(lines[2], "1.0,0.0,1.0,inf,false");
        let doc: ThresholdDoc = serde_json::from_slice(&r.json).unwrap();
        assert_eq!(doc.rows[1].lambda_asym_critical, None);
    }

    #[test]
    fn malformed_grids_are_rejected() {
        assert!(ThresholdGrid::Arc { points: 1 }.points().is_err());
        assert!(ThresholdGrid::Values { delta1: vec![1.2], delta2: None }.points().is_err());
        assert!(ThresholdGrid::Values { delta1: vec![0.9], delta2: Some(0.9) }.points().is_err());
        assert!(ThresholdGrid::Values { delta1: vec![], delta2: None }.points().is_err());
    }

    #[test]
    fn region_classification() {
        assert_eq!(classify(0.5, 0.5), RegionRow { delta1: 0.5, delta2: 0.5, inside_quantum_disc: true, inside_classical_simplex: true });
        let far = classify(0.9, 0.9);
        assert!(!far.inside_quantum_disc && !far.inside_classical_simplex);
        let between = classify(0.8, 0.55);
        assert!(between.inside_quantum_disc && !between.inside_classical_simplex);
        assert!(region(1).is_err());
        assert_eq!(csv_text(&region(3).unwrap()).lines().count(), 10);
    }

    #[test]
    fn poly_expansions() {
        let doc: PolyDoc = serde_json::from_slice(&poly(2).unwrap().json).unwrap();
        assert_eq!(doc.c_expansion, "2*c1 + c1^3");
        assert_eq!(doc.p_expansion, "1 + 1/2*x");
        let doc: PolyDoc = serde_json::from_slice(&poly(1).unwrap().json).unwrap();
        assert_eq!(doc.c_expansion, "c1");
        let doc: PolyDoc = serde_json::from_slice(&poly(3).unwrap().json).unwrap();
        assert_eq!(doc.c_odd_coefficients, ["4", "10", "8", "2"]);
    }

    #[test]
    fn schedule_json_round_trips() {
        let omega = Float::with_val(256, 0.2);
        let r = schedule(&omega, 1.0, 1e-4, 3).unwrap();
        let doc: ScheduleDoc = serde_json::from_slice(&r.json).unwrap();
        assert_eq!(to_json(&doc), r.json);
        assert!(doc.feasible && !r.infeasible);
        assert_eq!(doc.schema, SCHEDULE_SCHEMA);
    }

    #[test]
    fn infeasible_schedule_is_flagged() {
        let r = schedule(&Float::with_val(256, 1.0), 1.0, 1e-4, 4).unwrap();
        assert!(r.infeasible);
        let doc: ScheduleDoc = serde_json::from_slice(&r.json).unwrap();
        assert_eq!(doc.first_failure, Some(2));
        assert_eq!(doc.receivers[1].success, None);
    }

    #[test]
    fn sequence_has_a_trailing_observer_row() {
        let r = sequence(0.3, 1.0, &[0.5, 0.8]).unwrap();
        let text = csv_text(&r);
        assert_eq!(text.lines().count(), 4);
        assert!(text.lines().last().unwrap().starts_with("3,,"));
    }
}
