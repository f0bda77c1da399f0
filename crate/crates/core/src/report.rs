//! Benchmark harness: run every registered solver over a shared sample
//! set with identical budgets and seeds, aggregate per-solver statistics
//! and render them as JSON plus an aligned text table.

use serde::{Deserialize, Serialize};

use crate::chain::KinematicChain;
use crate::error::{IkError, Result};
use crate::solve::{Budget, Solver};
use crate::workspace::{sha256_hex, WorkspaceSample};

/// Per-sample outcome kept in the report so every aggregate can be
/// recomputed independently.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleOutcome {
    pub sample_index: usize,
    pub position_error: f64,
    pub orientation_error: f64,
    pub success: bool,
    pub iterations: u64,
    /// Which concrete solver produced the result (differs from the row
    /// name for the race, which reports its winning branch).
    pub winner: String,
    /// Wall-clock seconds; excluded from the report digest.
    pub elapsed: f64,
}

/// Aggregates for one solver, over ALL samples — failed solves included,
/// which visibly inflates means relative to medians.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverStats {
    pub solver: String,
    pub mean_position_error: f64,
    pub median_position_error: f64,
    pub mean_orientation_error: f64,
    pub median_orientation_error: f64,
    pub grasp_accuracy_percent: f64,
    pub successes: usize,
    pub total: usize,
    /// Mean wall-clock seconds per solve; excluded from the digest.
    pub mean_elapsed: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverRun {
    pub stats: SolverStats,
    pub samples: Vec<SampleOutcome>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchmarkReport {
    /// Unix timestamp; excluded from the digest.
    pub created_unix: u64,
    pub chain: String,
    pub dataset_digest: String,
    pub budget_seconds: Option<f64>,
    pub deterministic: bool,
    /// Effective merged configuration, echoed for reproducibility.
    pub config_echo: serde_json::Value,
    pub runs: Vec<SolverRun>,
    /// SHA-256 over the deterministic report content (everything except
    /// timestamps and elapsed fields).
    pub digest: String,
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    }
}

/// Aggregate outcomes into [`SolverStats`]; public so reports can be
/// cross-checked against an independent recomputation.
pub fn aggregate(solver: &str, outcomes: &[SampleOutcome]) -> SolverStats {
    let position: Vec<f64> = outcomes.iter().map(|o| o.position_error).collect();
    let orientation: Vec<f64> = outcomes.iter().map(|o| o.orientation_error).collect();
    let successes = outcomes.iter().filter(|o| o.success).count();
    SolverStats {
        solver: solver.to_string(),
        mean_position_error: mean(&position),
        median_position_error: median(&position),
        mean_orientation_error: mean(&orientation),
        median_orientation_error: median(&orientation),
        grasp_accuracy_percent: 100.0 * successes as f64 / outcomes.len().max(1) as f64,
        successes,
        total: outcomes.len(),
        mean_elapsed: mean(&outcomes.iter().map(|o| o.elapsed).collect::<Vec<_>>()),
    }
}

fn sample_seed(base: u64, sample_index: usize) -> u64 {
    base.wrapping_mul(0xA076_1D64_78BD_642F)
        .wrapping_add((sample_index as u64).wrapping_mul(0xE703_7ED1_A0B4_28DB))
}

/// Benchmark `solvers` over the accepted samples of a dataset.
///
/// Every solver sees the identical sample sequence, the identical
/// mid-range seed configuration, the identical per-sample rng seed and
/// the identical budget.
#[allow(clippy::too_many_arguments)]
pub fn run_benchmark(
    chain: &KinematicChain,
    samples: &[WorkspaceSample],
    solver_names: &[String],
    registry: &crate::solve::SolverRegistry,
    budget: &Budget,
    rng_seed: u64,
    dataset_digest: &str,
    config_echo: serde_json::Value,
    workers: usize,
) -> Result<BenchmarkReport> {
    if samples.is_empty() {
        return Err(IkError::InvalidConfig("no samples to benchmark".into()));
    }
    let mut runs = Vec::new();
    for name in solver_names {
        let solver = registry.get(name)?;
        let outcomes = run_solver(chain, samples, solver, budget, rng_seed, workers)?;
        runs.push(SolverRun {
            stats: aggregate(name, &outcomes),
            samples: outcomes,
        });
    }

    let mut report = BenchmarkReport {
        created_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        chain: chain.name().to_string(),
        dataset_digest: dataset_digest.to_string(),
        budget_seconds: budget.limit().map(|d| d.as_secs_f64()),
        deterministic: budget.is_deterministic(),
        config_echo,
        runs,
        digest: String::new(),
    };
    report.digest = report.compute_digest();
    Ok(report)
}

fn run_solver(
    chain: &KinematicChain,
    samples: &[WorkspaceSample],
    solver: &dyn Solver,
    budget: &Budget,
    rng_seed: u64,
    workers: usize,
) -> Result<Vec<SampleOutcome>> {
    let seed_config = chain.mid_config();
    let solve_one = |index: usize| -> Result<SampleOutcome> {
        let sample = &samples[index];
        let result = solver.solve(
            chain,
            &sample.grasp_pose,
            &seed_config,
            sample_seed(rng_seed, index),
            budget,
        )?;
        Ok(SampleOutcome {
            sample_index: index,
            position_error: result.error.position_error,
            orientation_error: result.error.orientation_error_sum,
            success: result.success,
            iterations: result.iterations,
            winner: result.solver_name,
            elapsed: result.elapsed,
        })
    };

    if workers <= 1 {
        return (0..samples.len()).map(solve_one).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let mut slots: Vec<Option<Result<SampleOutcome>>> = Vec::new();
    slots.resize_with(samples.len(), || None);
    let slots = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|scope| {
        for _ in 0..workers.min(samples.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if i >= samples.len() {
                    break;
                }
                let outcome = solve_one(i);
                slots.lock().expect("no poisoned worker")[i] = Some(outcome);
            });
        }
    });
    slots
        .into_inner()
        .expect("workers joined")
        .iter_mut()
        .map(|slot| slot.take().expect("every slot filled"))
        .collect()
}

/// The digest payload: every deterministic field, no timings.
#[derive(Serialize)]
struct DigestSample {
    sample_index: usize,
    position_error_bits: u64,
    orientation_error_bits: u64,
    success: bool,
    iterations: u64,
    winner: String,
}

#[derive(Serialize)]
struct DigestRun {
    solver: String,
    grasp_accuracy_percent: f64,
    samples: Vec<DigestSample>,
}

#[derive(Serialize)]
struct DigestPayload<'a> {
    chain: &'a str,
    dataset_digest: &'a str,
    budget_seconds: Option<f64>,
    deterministic: bool,
    config_echo: &'a serde_json::Value,
    runs: Vec<DigestRun>,
}

impl BenchmarkReport {
    pub fn compute_digest(&self) -> String {
        let payload = DigestPayload {
            chain: &self.chain,
            dataset_digest: &self.dataset_digest,
            budget_seconds: self.budget_seconds,
            deterministic: self.deterministic,
            config_echo: &self.config_echo,
            runs: self
                .runs
                .iter()
                .map(|run| DigestRun {
                    solver: run.stats.solver.clone(),
                    grasp_accuracy_percent: run.stats.grasp_accuracy_percent,
                    samples: run
                        .samples
                        .iter()
                        .map(|s| DigestSample {
                            sample_index: s.sample_index,
                            position_error_bits: s.position_error.to_bits(),
                            orientation_error_bits: s.orientation_error.to_bits(),
                            success: s.success,
                            iterations: s.iterations,
                            winner: s.winner.clone(),
                        })
                        .collect(),
                })
                .collect(),
        };
        sha256_hex(
            serde_json::to_string(&payload)
                .expect("digest payload serializes")
                .as_bytes(),
        )
    }

    /// Aligned text table in the style of the result tables the harness
    /// reproduces: one row per solver, errors over all samples.
    pub fn text_table(&self) -> String {
        let headers = [
            "Solver",
            "Mean pos. error",
            "Median pos. error",
            "Mean orient. error",
            "Median orient. error",
            "Grasp accuracy",
            "Mean elapsed",
        ];
        let rows: Vec<[String; 7]> = self
            .runs
            .iter()
            .map(|run| {
                let s = &run.stats;
                [
                    s.solver.clone(),
                    format!("{:.6} m", s.mean_position_error),
                    format!("{:.6} m", s.median_position_error),
                    format!("{:.6} deg", s.mean_orientation_error),
                    format!("{:.6} deg", s.median_orientation_error),
                    format!("{:.2} %", s.grasp_accuracy_percent),
                    format!("{:.4} s", s.mean_elapsed),
                ]
            })
            .collect();
        let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row.iter()) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        let fmt_row = |cells: &[String], widths: &[usize]| -> String {
            cells
                .iter()
                .zip(widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        let header_cells: Vec<String> = headers.iter().map(|h| h.to_string()).collect();
        out.push_str(&fmt_row(&header_cells, &widths));
        out.push('\n');
        out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
        out.push('\n');
        for row in &rows {
            out.push_str(&fmt_row(row, &widths));
            out.push('\n');
        }
        out
    }
}
