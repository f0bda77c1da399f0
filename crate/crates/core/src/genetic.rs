//! Hybrid genetic IK: niched island evolution over joint-configuration
//! chromosomes with elitism, hybridized with SQP refinement of the
//! n-best individuals each generation.
//!
//! Niching is realized as fully isolated islands — one evolution per
//! worker, no migration — so each island's trajectory depends only on
//! its own derived seed. That keeps parallel and sequential execution
//! bit-identical in deterministic mode.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::chain::{JointConfig, KinematicChain};
use crate::error::{IkError, Result};
use crate::pose::{is_grasp_success, pose_error, Pose, PoseError};
use crate::solve::{
    Budget, CancelToken, SolveResult, Solver, StopWatch, SuccessCriterion, Termination,
};
use crate::sqp::{self, SqpConfig};

/// One population member: a feasible joint configuration and its cached
/// fitness (the SQP objective; lower is better).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Individual {
    pub chromosome: JointConfig,
    pub fitness: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct IslandConfig {
    pub population_size: usize,
    /// Individuals copied unchanged into the next generation.
    pub elite_count: usize,
    pub tournament_size: usize,
    /// Probability that a child is produced by uniform crossover rather
    /// than cloned from its first parent.
    pub crossover_rate: f64,
    /// Per-gene mutation probability.
    pub mutation_rate: f64,
    /// Gaussian mutation standard deviation, radians.
    pub mutation_sigma: f64,
    /// How many of the best individuals get SQP refinement per generation.
    pub n_best_refine: usize,
    /// SQP iteration cap per refinement call.
    pub refine_step_budget: u32,
    pub rng_seed: u64,
}

impl Default for IslandConfig {
    fn default() -> Self {
        Self {
            population_size: 64,
            elite_count: 4,
            tournament_size: 3,
            crossover_rate: 0.9,
            mutation_rate: 0.15,
            mutation_sigma: 0.15,
            n_best_refine: 3,
            refine_step_budget: 8,
            rng_seed: 42,
        }
    }
}

impl IslandConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(IkError::InvalidConfig("population_size must be >= 2".into()));
        }
        if self.elite_count >= self.population_size {
            return Err(IkError::InvalidConfig(
                "elite_count must be < population_size".into(),
            ));
        }
        if self.n_best_refine > self.population_size {
            return Err(IkError::InvalidConfig(
                "n_best_refine must be <= population_size".into(),
            ));
        }
        if self.tournament_size < 1 {
            return Err(IkError::InvalidConfig("tournament_size must be >= 1".into()));
        }
        for (name, rate) in [
            ("crossover_rate", self.crossover_rate),
            ("mutation_rate", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(IkError::InvalidConfig(format!("{name} must be in [0, 1]")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneticSolverConfig {
    /// Independent evolutions run concurrently; niching by isolation.
    pub islands: usize,
    /// Template for every island; per-island seeds are derived from
    /// `island.rng_seed`.
    pub island: IslandConfig,
    /// Objective weights shared between fitness and elite refinement.
    pub objective: SqpConfig,
    /// Early-exit position tolerance, meters.
    pub success_position_tol: f64,
    /// Early-exit summed-RPY orientation tolerance, degrees.
    pub success_orientation_tol: f64,
    /// Stop as soon as an individual satisfies the tolerances. Disabled
    /// by the benchmark so every solver consumes a comparable budget.
    pub early_exit: bool,
    /// Generation cap per island in deterministic mode, where wall-clock
    /// cutoffs would break reproducibility.
    pub deterministic_generations: u32,
}

impl Default for GeneticSolverConfig {
    fn default() -> Self {
        Self {
            islands: std::thread::available_parallelism().map_or(1, |n| n.get()),
            island: IslandConfig::default(),
            objective: SqpConfig::default(),
            success_position_tol: crate::pose::GRASP_POSITION_TOL,
            success_orientation_tol: crate::pose::GRASP_ORIENTATION_TOL_DEG,
            early_exit: true,
            deterministic_generations: 40,
        }
    }
}

impl GeneticSolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.islands < 1 {
            return Err(IkError::InvalidConfig("islands must be >= 1".into()));
        }
        self.island.validate()?;
        self.objective.validate()
    }
}

fn evaluate(
    chain: &KinematicChain,
    chromosome: JointConfig,
    target: &Pose,
    cfg: &SqpConfig,
) -> Result<Individual> {
    let fitness = sqp::objective(chain, &chromosome, target, cfg)?;
    Ok(Individual {
        chromosome,
        fitness,
    })
}

fn sort_population(population: &mut [Individual]) {
    population.sort_by(|a, b| a.fitness.total_cmp(&b.fitness));
}

/// Uniform random population within the joint limits, evaluated and
/// sorted ascending by fitness.
pub fn init_population<R: Rng>(
    chain: &KinematicChain,
    target: &Pose,
    cfg: &IslandConfig,
    objective_cfg: &SqpConfig,
    rng: &mut R,
) -> Result<Vec<Individual>> {
    cfg.validate()?;
    let mut population = Vec::with_capacity(cfg.population_size);
    for _ in 0..cfg.population_size {
        population.push(evaluate(
            chain,
            chain.random_config(rng),
            target,
            objective_cfg,
        )?);
    }
    sort_population(&mut population);
    Ok(population)
}

fn tournament_winner<R: Rng>(population: &[Individual], size: usize, rng: &mut R) -> usize {
    // Population is sorted, so the lowest sampled index wins.
    (0..size)
        .map(|_| rng.gen_range(0..population.len()))
        .min()
        .expect("tournament_size >= 1")
}

/// One generation: elites copied unchanged, the rest bred by tournament
/// selection, uniform crossover and clamped Gaussian mutation.
pub fn evolve_generation<R: Rng>(
    chain: &KinematicChain,
    target: &Pose,
    population: &[Individual],
    cfg: &IslandConfig,
    objective_cfg: &SqpConfig,
    rng: &mut R,
) -> Result<Vec<Individual>> {
    if population.iter().any(|ind| ind.chromosome.len() != chain.dof()) {
        return Err(IkError::DimensionMismatch {
            expected: chain.dof(),
            got: population
                .iter()
                .map(|i| i.chromosome.len())
                .find(|&l| l != chain.dof())
                .unwrap_or(0),
        });
    }
    let normal = Normal::new(0.0, cfg.mutation_sigma.max(f64::MIN_POSITIVE))
        .expect("sigma is finite and non-negative");
    let mut next: Vec<Individual> = population
        .iter()
        .take(cfg.elite_count)
        .cloned()
        .collect();

    while next.len() < cfg.population_size {
        let a = tournament_winner(population, cfg.tournament_size, rng);
        let b = tournament_winner(population, cfg.tournament_size, rng);
        let parent_a = &population[a].chromosome.values;
        let parent_b = &population[b].chromosome.values;

        let mut genes: Vec<f64> = if rng.gen_bool(cfg.crossover_rate) {
            parent_a
                .iter()
                .zip(parent_b)
                .map(|(&x, &y)| if rng.gen_bool(0.5) { y } else { x })
                .collect()
        } else {
            parent_a.clone()
        };

        for (gene, joint) in genes.iter_mut().zip(chain.joints()) {
            if cfg.mutation_rate > 0.0 && rng.gen_bool(cfg.mutation_rate) {
                *gene += normal.sample(rng);
            }
            *gene = gene.clamp(joint.limit_lower, joint.limit_upper);
        }
        next.push(evaluate(chain, JointConfig::new(genes), target, objective_cfg)?);
    }
    sort_population(&mut next);
    Ok(next)
}

/// SQP-refine the n-best individuals, replacing each only on strict
/// improvement, then re-sort.
pub fn refine_elites(
    chain: &KinematicChain,
    target: &Pose,
    mut population: Vec<Individual>,
    cfg: &IslandConfig,
    objective_cfg: &SqpConfig,
) -> Result<Vec<Individual>> {
    let n = cfg.n_best_refine.min(population.len());
    for individual in population.iter_mut().take(n) {
        let refined = sqp::refine_local(
            chain,
            target,
            &individual.chromosome,
            objective_cfg,
            cfg.refine_step_budget,
        )?;
        let fitness = sqp::objective(chain, &refined, target, objective_cfg)?;
        if fitness < individual.fitness {
            individual.chromosome = refined;
            individual.fitness = fitness;
        }
    }
    sort_population(&mut population);
    Ok(population)
}

struct IslandOutcome {
    best: Individual,
    generations: u64,
    termination: Termination,
}

fn island_seed(base: u64, island: usize) -> u64 {
    // SplitMix-style spacing keeps per-island streams well separated.
    base.wrapping_add((island as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn best_error(chain: &KinematicChain, best: &Individual, target: &Pose) -> Result<PoseError> {
    let pose = chain.forward_kinematics(&best.chromosome)?;
    Ok(pose_error(&pose, target))
}

fn run_island(
    chain: &KinematicChain,
    target: &Pose,
    cfg: &GeneticSolverConfig,
    island_idx: usize,
    watch: &StopWatch,
    stop: &CancelToken,
    deterministic: bool,
) -> Result<IslandOutcome> {
    let mut island_cfg = cfg.island.clone();
    island_cfg.rng_seed = island_seed(cfg.island.rng_seed, island_idx);
    let mut rng = ChaCha8Rng::seed_from_u64(island_cfg.rng_seed);

    let mut population = init_population(chain, target, &island_cfg, &cfg.objective, &mut rng)?;
    let mut generations = 0u64;

    let termination = loop {
        if deterministic {
            if generations >= u64::from(cfg.deterministic_generations) {
                break Termination::IterationCap;
            }
        } else if watch.expired() || stop.is_cancelled() {
            break Termination::Budget;
        }

        population =
            evolve_generation(chain, target, &population, &island_cfg, &cfg.objective, &mut rng)?;
        population = refine_elites(chain, target, population, &island_cfg, &cfg.objective)?;
        generations += 1;

        if cfg.early_exit {
            let err = best_error(chain, &population[0], target)?;
            if err.position_error < cfg.success_position_tol
                && err.orientation_error_sum < cfg.success_orientation_tol
            {
                if !deterministic {
                    stop.cancel();
                }
                break Termination::Tolerance;
            }
        }
    };

    Ok(IslandOutcome {
        best: population.into_iter().next().expect("population non-empty"),
        generations,
        termination,
    })
}

/// Run `islands` isolated evolutions concurrently and return the global
/// best as a [`SolveResult`].
pub fn solve_genetic(
    chain: &KinematicChain,
    target: &Pose,
    cfg: &GeneticSolverConfig,
    budget: &Budget,
) -> Result<SolveResult> {
    solve_genetic_impl(chain, target, cfg, budget, true)
}

/// Sequential island execution. In deterministic mode the result is
/// bit-identical to [`solve_genetic`]; exposed for reproducibility
/// studies and tests.
pub fn solve_genetic_sequential(
    chain: &KinematicChain,
    target: &Pose,
    cfg: &GeneticSolverConfig,
    budget: &Budget,
) -> Result<SolveResult> {
    solve_genetic_impl(chain, target, cfg, budget, false)
}

fn solve_genetic_impl(
    chain: &KinematicChain,
    target: &Pose,
    cfg: &GeneticSolverConfig,
    budget: &Budget,
    parallel: bool,
) -> Result<SolveResult> {
    cfg.validate()?;
    let watch = StopWatch::start(budget, CancelToken::new());
    let stop = CancelToken::new();
    let deterministic = budget.is_deterministic();

    let outcomes: Vec<Result<IslandOutcome>> = if parallel && cfg.islands > 1 {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..cfg.islands)
                .map(|idx| {
                    let watch = &watch;
                    let stop = &stop;
                    scope.spawn(move || {
                        run_island(chain, target, cfg, idx, watch, stop, deterministic)
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("island thread must not panic"))
                .collect()
        })
    } else {
        (0..cfg.islands)
            .map(|idx| run_island(chain, target, cfg, idx, &watch, &stop, deterministic))
            .collect()
    };

    let mut best: Option<IslandOutcome> = None;
    let mut total_generations = 0u64;
    for outcome in outcomes {
        let outcome = outcome?;
        total_generations += outcome.generations;
        let better = match &best {
            // Strict comparison keeps the lowest island index on ties.
            Some(current) => outcome.best.fitness < current.best.fitness,
            None => true,
        };
        if better {
            best = Some(outcome);
        }
    }
    let winner = best.expect("islands >= 1");
    let error = best_error(chain, &winner.best, target)?;
    Ok(SolveResult {
        solver_name: "genetic".to_string(),
        success: is_grasp_success(&error),
        success_criterion: SuccessCriterion::GraspSuccess,
        solution: winner.best.chromosome,
        error,
        termination: winner.termination,
        iterations: total_generations,
        elapsed: watch.elapsed_seconds(),
    })
}

/// Registry adapter; the per-call `rng_seed` replaces the configured
/// base seed so benchmark samples get independent, reproducible streams.
pub struct GeneticSolver {
    pub config: GeneticSolverConfig,
}

impl Solver for GeneticSolver {
    fn name(&self) -> &'static str {
        "genetic"
    }

    fn solve(
        &self,
        chain: &KinematicChain,
        target: &Pose,
        _seed: &JointConfig,
        rng_seed: u64,
        budget: &Budget,
    ) -> Result<SolveResult> {
        let mut cfg = self.config.clone();
        cfg.island.rng_seed = rng_seed;
        solve_genetic(chain, target, &cfg, budget)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::parse_chain;
    use rand::SeedableRng;

    fn planar_two_link() -> KinematicChain {
        parse_chain(
            r#"{
                "name": "planar2",
                "joints": [
                    {"name": "shoulder", "origin": {"xyz": [0,0,0], "rpy": [0,0,0]},
                     "axis": [0,0,1], "limits": {"lower": -3.141592653589793, "upper": 3.141592653589793}},
                    {"name": "elbow", "origin": {"xyz": [0.5,0,0], "rpy": [0,0,0]},
                     "axis": [0,0,1], "limits": {"lower": -3.141592653589793, "upper": 3.141592653589793}}
                ],
                "tool_offset": {"xyz": [0.5,0,0], "rpy": [0,0,0]}
            }"#,
            "inline",
        )
        .unwrap()
    }

    fn zero_width_chain() -> KinematicChain {
        parse_chain(
            r#"{
                "name": "fixed",
                "joints": [
                    {"name": "a", "origin": {"xyz": [0,0,0], "rpy": [0,0,0]},
                     "axis": [0,0,1], "limits": {"lower": 0.5, "upper": 0.5}},
                    {"name": "b", "origin": {"xyz": [0.5,0,0], "rpy": [0,0,0]},
                     "axis": [0,0,1], "limits": {"lower": -0.25, "upper": -0.25}}
                ],
                "tool_offset": {"xyz": [0.5,0,0], "rpy": [0,0,0]}
            }"#,
            "inline",
        )
        .unwrap()
    }

    fn target_for(chain: &KinematicChain, q: Vec<f64>) -> Pose {
        chain.forward_kinematics(&q.into()).unwrap()
    }

    #[test]
    fn init_population_is_feasible_sorted_and_cached() {
        let chain = planar_two_link();
        let target = target_for(&chain, vec![0.5, 0.5]);
        let cfg = IslandConfig {
            population_size: 50,
            ..Default::default()
        };
        let objective_cfg = SqpConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pop = init_population(&chain, &target, &cfg, &objective_cfg, &mut rng).unwrap();
        assert_eq!(pop.len(), 50);
        for pair in pop.windows(2) {
            assert!(pair[0].fitness <= pair[1].fitness);
        }
        for ind in &pop {
            assert!(chain.is_feasible(&ind.chromosome));
            let recomputed =
                sqp::objective(&chain, &ind.chromosome, &target, &objective_cfg).unwrap();
            assert!((ind.fitness - recomputed).abs() < 1e-12);
        }
    }

    #[test]
    fn init_population_deterministic_under_seed() {
        let chain = planar_two_link();
        let target = target_for(&chain, vec![0.5, 0.5]);
        let cfg = IslandConfig::default();
        let objective_cfg = SqpConfig::default();
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        let pa = init_population(&chain, &target, &cfg, &objective_cfg, &mut a).unwrap();
        let pb = init_population(&chain, &target, &cfg, &objective_cfg, &mut b).unwrap();
        for (x, y) in pa.iter().zip(&pb) {
            assert_eq!(x.chromosome, y.chromosome);
            assert_eq!(x.fitness.to_bits(), y.fitness.to_bits());
        }
    }

    #[test]
    fn zero_width_limits_collapse_population() {
        let chain = zero_width_chain();
        let target = target_for(&chain, vec![0.5, -0.25]);
        let cfg = IslandConfig {
            population_size: 10,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pop = init_population(&chain, &target, &cfg, &SqpConfig::default(), &mut rng).unwrap();
        for ind in &pop {
            assert_eq!(ind.chromosome.values, vec![0.5, -0.25]);
            assert_eq!(ind.fitness, pop[0].fitness);
        }
    }

    #[test]
    fn elitism_never_increases_best_fitness() {
        let chain = planar_two_link();
        let target = target_for(&chain, vec![1.1, -0.7]);
        let cfg = IslandConfig::default();
        let objective_cfg = SqpConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut pop = init_population(&chain, &target, &cfg, &objective_cfg, &mut rng).unwrap();
        for _ in 0..30 {
            let next =
                evolve_generation(&chain, &target, &pop, &cfg, &objective_cfg, &mut rng).unwrap();
            assert!(next[0].fitness <= pop[0].fitness);
            pop = next;
        }
    }

    #[test]
    fn no_variation_preserves_best_exactly() {
        let chain = planar_two_link();
        let target = target_for(&chain, vec![0.2, 0.9]);
        let cfg = IslandConfig {
            crossover_rate: 0.0,
            mutation_rate: 0.0,
            ..Default::default()
        };
        let objective_cfg = SqpConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pop = init_population(&chain, &target, &cfg, &objective_cfg, &mut rng).unwrap();
        let next = evolve_generation(&chain, &target, &pop, &cfg, &objective_cfg, &mut rng).unwrap();
        assert_eq!(next[0].chromosome, pop[0].chromosome);
        assert_eq!(next[0].fitness.to_bits(), pop[0].fitness.to_bits());
    }

    #[test]
    fn generation_loop_converges_on_two_link() {
        // The production generation step: evolve, then refine the elites.
        // Evolution alone plateaus at mutation-sigma resolution — the
        // hybridization exists precisely to close that gap.
        let chain = planar_two_link();
        let cfg = IslandConfig {
            population_size: 128,
            n_best_refine: 8,
            tournament_size: 2,
            mutation_rate: 0.4,
            mutation_sigma: 0.8,
            ..Default::default()
        };
        let objective_cfg = SqpConfig::default();
        let mut successes = 0;
        let trials = 40;
        for trial in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + trial);
            let truth = chain.random_config(&mut rng);
            let target = chain.forward_kinematics(&truth).unwrap();
            let mut pop =
                init_population(&chain, &target, &cfg, &objective_cfg, &mut rng).unwrap();
            for _ in 0..200 {
                pop = evolve_generation(&chain, &target, &pop, &cfg, &objective_cfg, &mut rng)
                    .unwrap();
                pop = refine_elites(&chain, &target, pop, &cfg, &objective_cfg).unwrap();
                if pop[0].fitness < 1e-6 {
                    break; // converged well past the assertion threshold
                }
            }
            if pop[0].fitness < 1e-4 {
                successes += 1;
            }
        }
        assert!(
            successes * 100 >= trials * 95,
            "only {successes}/{trials} runs converged"
        );
    }

    #[test]
    fn refine_elites_zero_is_identity() {
        let chain = planar_two_link();
        let target = target_for(&chain, vec![0.5, 0.5]);
        let cfg = IslandConfig {
            n_best_refine: 0,
            ..Default::default()
        };
        let objective_cfg = SqpConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pop = init_population(&chain, &target, &cfg, &objective_cfg, &mut rng).unwrap();
        let refined =
            refine_elites(&chain, &target, pop.clone(), &cfg, &objective_cfg).unwrap();
        for (a, b) in pop.iter().zip(&refined) {
            assert_eq!(a.chromosome, b.chromosome);
        }
    }

    #[test]
    fn refine_elites_finishes_near_solved_individuals() {
        // GA gets close, SQP finishes: a near-solved elite drops below 1e-8.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let chain = crate::chain::random_chain(&mut rng, 8);
        let truth = chain.random_config(&mut rng);
        let target = chain.forward_kinematics(&truth).unwrap();
        let objective_cfg = SqpConfig::default();
        // Perturb the truth slightly to fitness ~1e-3.
        let mut near = truth.clone();
        for v in &mut near.values {
            *v += 1e-3;
        }
        let near = chain.clamp_to_limits(&near).unwrap();
        let cfg = IslandConfig {
            population_size: 4,
            n_best_refine: 1,
            refine_step_budget: 30,
            ..Default::default()
        };
        let mut pop = vec![
            Individual {
                fitness: sqp::objective(&chain, &near, &target, &objective_cfg).unwrap(),
                chromosome: near,
            };
            4
        ];
        sort_population(&mut pop);
        let refined = refine_elites(&chain, &target, pop, &cfg, &objective_cfg).unwrap();
        assert!(
            refined[0].fitness < 1e-8,
            "refined fitness {}",
            refined[0].fitness
        );
    }

    #[test]
    fn deterministic_mode_is_reproducible_and_matches_sequential() {
        let chain = planar_two_link();
        let target = target_for(&chain, vec![0.9, 1.2]);
        let cfg = GeneticSolverConfig {
            islands: 3,
            deterministic_generations: 10,
            island: IslandConfig {
                population_size: 16,
                ..Default::default()
            },
            ..Default::default()
        };
        let a = solve_genetic(&chain, &target, &cfg, &Budget::deterministic()).unwrap();
        let b = solve_genetic(&chain, &target, &cfg, &Budget::deterministic()).unwrap();
        let c = solve_genetic_sequential(&chain, &target, &cfg, &Budget::deterministic()).unwrap();
        assert_eq!(a.solution, b.solution);
        assert_eq!(a.solution, c.solution);
        assert_eq!(a.error.position_error.to_bits(), b.error.position_error.to_bits());
        assert_eq!(a.error.position_error.to_bits(), c.error.position_error.to_bits());
        assert_eq!(a.iterations, c.iterations);
    }

    #[test]
    fn unreachable_target_fails_with_reach_bound() {
        let chain = planar_two_link();
        let target = Pose::from_xyz_rpy([2.0, 0.0, 0.0], [0.0, 0.0, 0.0]);
        let cfg = GeneticSolverConfig {
            islands: 1,
            deterministic_generations: 10,
            ..Default::default()
        };
        let result = solve_genetic(&chain, &target, &cfg, &Budget::deterministic()).unwrap();
        assert!(!result.success);
        assert!(result.error.position_error >= 1.0 - 1e-6);
    }

    #[test]
    fn invalid_island_config_rejected() {
        let chain = planar_two_link();
        let cfg = GeneticSolverConfig {
            island: IslandConfig {
                elite_count: 64,
                population_size: 64,
                ..Default::default()
            },
            ..Default::default()
        };
        let err = solve_genetic(
            &chain,
            &Pose::identity(),
            &cfg,
            &Budget::deterministic(),
        )
        .unwrap_err();
        assert!(matches!(err, IkError::InvalidConfig(_)));
    }
}
