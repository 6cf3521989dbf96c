//! Inertia-weight particle swarm optimization over flat parameter vectors.

mod fitness;

pub use fitness::{
    apply_best_position, network_fitness, optimize_network, FitnessSpec, TargetMask,
};

use rand::Rng;

use crate::rng::rng_from_seed;
use crate::{Error, Result};

/// Order in which particles are swept and the global best is refreshed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PsoLoop {
    /// One pass over all particles per iteration; gbest refreshed after
    /// every evaluation.
    #[default]
    Sync,
    /// Each particle runs all its iterations alone before the next
    /// particle starts, seeing only the gbest known so far.
    Paper,
}

/// Swarm hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmConfig {
    /// Particle count m.
    pub particles: usize,
    /// Iterations per particle n.
    pub iterations: usize,
    /// Inertia weight w.
    pub inertia: f64,
    /// Cognitive coefficient c1.
    pub cognitive: f64,
    /// Social coefficient c2.
    pub social: f64,
    /// Per-coordinate velocity cap.
    pub v_max: f64,
    /// Position interval applied to every coordinate.
    pub bounds: (f64, f64),
    pub seed: u64,
    pub loop_mode: PsoLoop,
}

impl Default for SwarmConfig {
    fn default() -> Self {
        // Constriction-equivalent coefficients.
        Self {
            particles: 20,
            iterations: 30,
            inertia: 0.729,
            cognitive: 1.49445,
            social: 1.49445,
            v_max: 0.5,
            bounds: (-1.0, 1.0),
            seed: 0,
            loop_mode: PsoLoop::Sync,
        }
    }
}

impl SwarmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.particles == 0 || self.iterations == 0 {
            return Err(Error::InvalidConfig(
                "swarm needs ≥ 1 particle and ≥ 1 iteration".into(),
            ));
        }
        if self.inertia < 0.0 || self.cognitive < 0.0 || self.social < 0.0 {
            return Err(Error::InvalidConfig(
                "swarm coefficients must be non-negative".into(),
            ));
        }
        if !self.v_max.is_finite() || self.v_max <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "v_max must be a positive number, got {}",
                self.v_max
            )));
        }
        if !self.bounds.0.is_finite() || !self.bounds.1.is_finite() || self.bounds.0 >= self.bounds.1
        {
            return Err(Error::InvalidConfig(format!(
                "bounds ({}, {}) must be finite and increasing",
                self.bounds.0, self.bounds.1
            )));
        }
        Ok(())
    }
}

/// One swarm member.
#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub pbest_position: Vec<f64>,
    /// Fitness of `pbest_position` as last evaluated; ∞ before the first
    /// evaluation.
    pub pbest_fitness: f64,
}

/// Samples `m` particles: positions uniform within bounds, velocities
/// uniform within ±v_max, personal bests at the starting positions
/// (fitness pending until the optimizer's first evaluation sweep).
pub fn init_swarm(cfg: &SwarmConfig, dim: usize) -> Result<Vec<Particle>> {
    cfg.validate()?;
    if dim == 0 {
        return Err(Error::InvalidConfig("swarm dimension must be ≥ 1".into()));
    }
    let mut rng = rng_from_seed(cfg.seed);
    let mut swarm = Vec::with_capacity(cfg.particles);
    for _ in 0..cfg.particles {
        let position: Vec<f64> = (0..dim)
            .map(|_| rng.random_range(cfg.bounds.0..cfg.bounds.1))
            .collect();
        let velocity: Vec<f64> = (0..dim)
            .map(|_| rng.random_range(-cfg.v_max..cfg.v_max))
            .collect();
        swarm.push(Particle {
            pbest_position: position.clone(),
            pbest_fitness: f64::INFINITY,
            position,
            velocity,
        });
    }
    Ok(swarm)
}

/// Velocity/position update with explicit per-coordinate random factors.
///
/// v ← w·v + c1·r1∘(pbest − x) + c2·r2∘(gbest − x), clamped to ±v_max;
/// x ← x + v, clamped to bounds with the velocity zeroed where clamping
/// bites.
pub(crate) fn update_particle_with(
    p: &mut Particle,
    gbest: &[f64],
    cfg: &SwarmConfig,
    r1: &[f64],
    r2: &[f64],
) {
    for k in 0..p.position.len() {
        let v = cfg.inertia * p.velocity[k]
            + cfg.cognitive * r1[k] * (p.pbest_position[k] - p.position[k])
            + cfg.social * r2[k] * (gbest[k] - p.position[k]);
        p.velocity[k] = v.clamp(-cfg.v_max, cfg.v_max);
        let x = p.position[k] + p.velocity[k];
        let clamped = x.clamp(cfg.bounds.0, cfg.bounds.1);
        if clamped != x {
            p.velocity[k] = 0.0;
        }
        p.position[k] = clamped;
    }
}

/// [`update_particle_with`] drawing fresh uniform factors from `rng`.
pub fn update_particle(
    p: &mut Particle,
    gbest: &[f64],
    cfg: &SwarmConfig,
    rng: &mut impl Rng,
) {
    let dim = p.position.len();
    let r1: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..1.0)).collect();
    let r2: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..1.0)).collect();
    update_particle_with(p, gbest, cfg, &r1, &r2);
}

/// One fitness evaluation record.
#[derive(Debug, Clone, PartialEq)]
pub struct PsoTraceRow {
    /// 0 for the initial sweep, then 1..=n.
    pub iteration: usize,
    pub particle: usize,
    pub fitness: f64,
    pub gbest_fitness: f64,
}

/// Swarm search outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct PsoOutcome {
    pub best_position: Vec<f64>,
    pub best_fitness: f64,
    /// One row per fitness evaluation; `gbest_fitness` is monotone
    /// non-increasing.
    pub trace: Vec<PsoTraceRow>,
}

/// Minimizes `fitness` over `dim` coordinates.
///
/// Every particle is evaluated once at its start position, then the
/// configured loop runs m×n more evaluations. Fully deterministic under
/// the config seed.
pub fn optimize<F>(fitness: F, dim: usize, cfg: &SwarmConfig) -> Result<PsoOutcome>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    // Separate stream from the one init_swarm consumed.
    const UPDATE_STREAM: u64 = 1 << 32;
    let mut swarm = init_swarm(cfg, dim)?;
    let mut rng = rng_from_seed(crate::rng::derive_seed(cfg.seed, UPDATE_STREAM));
    let mut trace = Vec::with_capacity(cfg.particles * (cfg.iterations + 1));
    let mut gbest_position = swarm[0].position.clone();
    let mut gbest_fitness = f64::INFINITY;

    let evaluate = |p: &mut Particle,
                        idx: usize,
                        iteration: usize,
                        gbest_position: &mut Vec<f64>,
                        gbest_fitness: &mut f64,
                        trace: &mut Vec<PsoTraceRow>|
     -> Result<()> {
        let fit = fitness(&p.position).map_err(|source| Error::FitnessEvaluation {
            particle: idx,
            source: Box::new(source),
        })?;
        if fit < p.pbest_fitness {
            p.pbest_fitness = fit;
            p.pbest_position.clone_from(&p.position);
        }
        if p.pbest_fitness < *gbest_fitness {
            *gbest_fitness = p.pbest_fitness;
            gbest_position.clone_from(&p.pbest_position);
        }
        trace.push(PsoTraceRow {
            iteration,
            particle: idx,
            fitness: fit,
            gbest_fitness: *gbest_fitness,
        });
        Ok(())
    };

    for (idx, p) in swarm.iter_mut().enumerate() {
        evaluate(p, idx, 0, &mut gbest_position, &mut gbest_fitness, &mut trace)?;
    }

    match cfg.loop_mode {
        PsoLoop::Sync => {
            for iteration in 1..=cfg.iterations {
                for (idx, p) in swarm.iter_mut().enumerate() {
                    update_particle(p, &gbest_position, cfg, &mut rng);
                    evaluate(
                        p,
                        idx,
                        iteration,
                        &mut gbest_position,
                        &mut gbest_fitness,
                        &mut trace,
                    )?;
                }
            }
        }
        PsoLoop::Paper => {
            for (idx, p) in swarm.iter_mut().enumerate() {
                for iteration in 1..=cfg.iterations {
                    update_particle(p, &gbest_position, cfg, &mut rng);
                    evaluate(
                        p,
                        idx,
                        iteration,
                        &mut gbest_position,
                        &mut gbest_fitness,
                        &mut trace,
                    )?;
                }
            }
        }
    }

    Ok(PsoOutcome {
        best_position: gbest_position,
        best_fitness: gbest_fitness,
        trace,
    })
}

/// Writes the evaluation trace as
/// `iteration,particle,fitness,gbest_fitness` CSV rows.
pub fn write_trace_csv<W: std::io::Write>(mut w: W, trace: &[PsoTraceRow]) -> Result<()> {
    let io_err = |source| Error::Io {
        path: "<writer>".into(),
        source,
    };
    writeln!(w, "iteration,particle,fitness,gbest_fitness").map_err(io_err)?;
    for row in trace {
        writeln!(
            w,
            "{},{},{},{}",
            row.iteration, row.particle, row.fitness, row.gbest_fitness
        )
        .map_err(io_err)?;
    }
    Ok(())
}
