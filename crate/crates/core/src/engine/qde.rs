use rand::Rng;

use crate::quaternion::{random_quaternion_uniform, random_unit_vector3, PolarDecomposition, Quaternion};
use crate::scalar::Real;

use super::genome::{decode_blocks, BlockLayout, Genome};
use super::{evaluate_point, pick_donors, BoxedError, EngineConfig, EngineError, InitMethod, RunTrace};

/// Builds `Np` genomes repaired to the bounds, fitness unset.
pub fn init_population<T: Real, R: Rng + ?Sized>(
    cfg: &EngineConfig<T>,
    rng: &mut R,
) -> Result<Vec<Genome<T>>, EngineError> {
    cfg.validate()?;
    let layout = BlockLayout::for_dimension(cfg.dimension)?;
    let (lo, hi) = cfg.bounds;
    let two_pi = T::TAU();
    let mut pop = Vec::with_capacity(cfg.population_size);
    for _ in 0..cfg.population_size {
        let blocks = (0..layout.block_count())
            .map(|_| match cfg.init {
                InitMethod::E4 => random_quaternion_uniform(rng, lo, hi).expect("bounds validated"),
                InitMethod::Polar => {
                    let angle = T::lit(rng.random_range(-two_pi.as_f64()..two_pi.as_f64()));
                    let axis = random_unit_vector3(rng);
                    Quaternion::from_polar(&PolarDecomposition { magnitude: T::one(), angle, axis })
                }
            })
            .collect();
        let mut g = Genome::new(blocks);
        g.repair(layout, cfg.bounds, cfg.bound_policy);
        pop.push(g);
    }
    Ok(pop)
}

/// Evaluates every genome whose fitness is unset; returns the number of
/// objective calls made.
pub fn evaluate_population<T, F, E>(
    pop: &mut [Genome<T>],
    cfg: &EngineConfig<T>,
    objective: &mut F,
) -> Result<usize, EngineError>
where
    T: Real,
    F: FnMut(&[T]) -> Result<T, E>,
    E: Into<BoxedError>,
{
    let layout = BlockLayout::for_dimension(cfg.dimension)?;
    let mut calls = 0;
    for g in pop.iter_mut().filter(|g| g.fitness.is_none()) {
        g.fitness = Some(evaluate_point(objective, &g.decode(layout))?);
        calls += 1;
    }
    Ok(calls)
}

/// One generation: every trial is built from the current population, then
/// each trial replaces its target when its fitness is lower or equal.
///
/// Returns the number of objective calls (`Np` for an evaluated population).
pub fn evolve_generation<T, F, E, R>(
    pop: &mut [Genome<T>],
    cfg: &EngineConfig<T>,
    objective: &mut F,
    rng: &mut R,
) -> Result<usize, EngineError>
where
    T: Real,
    F: FnMut(&[T]) -> Result<T, E>,
    E: Into<BoxedError>,
    R: Rng + ?Sized,
{
    let layout = BlockLayout::for_dimension(cfg.dimension)?;
    let np = pop.len();
    if np < 4 {
        return Err(EngineError::PopulationTooSmall(np));
    }
    let mut calls = evaluate_population(pop, cfg, objective)?;
    let nb = layout.block_count();
    let cr = cfg.crossover_rate.as_f64();
    let spec = &cfg.mutation;

    let mut trials = Vec::with_capacity(np);
    for i in 0..np {
        let [r0, r1, r2] = pick_donors(rng, np, i);
        let j_rand = rng.random_range(0..nb);
        let mut blocks = Vec::with_capacity(nb);
        if cfg.mutant_first {
            let mutant: Vec<Quaternion<T>> = (0..nb)
                .map(|j| spec.apply(pop[r0].blocks[j], pop[r1].blocks[j], pop[r2].blocks[j], rng))
                .collect();
            for (j, m) in mutant.into_iter().enumerate() {
                let u: f64 = rng.random();
                blocks.push(if u < cr || j == j_rand { m } else { pop[i].blocks[j] });
            }
        } else {
            for j in 0..nb {
                let u: f64 = rng.random();
                blocks.push(if u < cr || j == j_rand {
                    spec.apply(pop[r0].blocks[j], pop[r1].blocks[j], pop[r2].blocks[j], rng)
                } else {
                    pop[i].blocks[j]
                });
            }
        }
        let mut trial = Genome::new(blocks);
        trial.repair(layout, cfg.bounds, cfg.bound_policy);
        trials.push(trial);
    }

    for (target, mut trial) in pop.iter_mut().zip(trials) {
        let f = evaluate_point(objective, &decode_blocks(&trial.blocks, layout))?;
        calls += 1;
        trial.fitness = Some(f);
        if f <= target.fitness.expect("population evaluated") {
            *target = trial;
        }
    }
    Ok(calls)
}

/// Runs initialization plus `max_generations` generations.
pub fn run<T, F, E>(cfg: &EngineConfig<T>, mut objective: F) -> Result<RunTrace<T>, EngineError>
where
    T: Real,
    F: FnMut(&[T]) -> Result<T, E>,
    E: Into<BoxedError>,
{
    cfg.validate()?;
    let layout = BlockLayout::for_dimension(cfg.dimension)?;
    let mut rng = cfg.rng();
    let mut pop = init_population(cfg, &mut rng)?;
    let mut evaluations = evaluate_population(&mut pop, cfg, &mut objective)?;
    let mut trace = Vec::with_capacity(cfg.max_generations + 1);
    trace.push(pop[best_index(&pop)].fitness.expect("evaluated"));
    for _ in 0..cfg.max_generations {
        evaluations += evolve_generation(&mut pop, cfg, &mut objective, &mut rng)?;
        trace.push(pop[best_index(&pop)].fitness.expect("evaluated"));
    }
    let best = pop.swap_remove(best_index(&pop));
    Ok(RunTrace {
        best_fitness_per_generation: trace,
        best_solution: best.decode(layout),
        best_genome: Some(best),
        evaluations,
    })
}

fn best_index<T: Real>(pop: &[Genome<T>]) -> usize {
    let mut best = 0;
    for (k, g) in pop.iter().enumerate().skip(1) {
        if g.fitness < pop[best].fitness {
            best = k;
        }
    }
    best
}
