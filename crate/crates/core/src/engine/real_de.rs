use rand::Rng;

use crate::scalar::Real;

use super::genome::repair_scalar;
use super::{evaluate_point, pick_donors, BoxedError, EngineConfig, EngineError, RunTrace};

/// Classical DE/rand/1/bin on plain real vectors.
///
/// Uses `cfg.mutation.alpha` as `F`; the mutation strategy and initialization
/// tags are ignored. Any dimension ≥ 1 is accepted.
pub fn run_real_de<T, F, E>(cfg: &EngineConfig<T>, mut objective: F) -> Result<RunTrace<T>, EngineError>
where
    T: Real,
    F: FnMut(&[T]) -> Result<T, E>,
    E: Into<BoxedError>,
{
    cfg.validate()?;
    if cfg.dimension == 0 {
        return Err(EngineError::UnsupportedDimension(0));
    }
    let d = cfg.dimension;
    let np = cfg.population_size;
    let (lo, hi) = cfg.bounds;
    let f = cfg.mutation.alpha;
    let cr = cfg.crossover_rate.as_f64();
    let mut rng = cfg.rng();

    let mut pop: Vec<Vec<T>> = (0..np)
        .map(|_| (0..d).map(|_| T::lit(rng.random_range(lo.as_f64()..hi.as_f64()))).collect())
        .collect();
    let mut fit = Vec::with_capacity(np);
    for x in &pop {
        fit.push(evaluate_point(&mut objective, x)?);
    }
    let mut evaluations = np;
    let mut trace = Vec::with_capacity(cfg.max_generations + 1);
    trace.push(min_of(&fit));

    for _ in 0..cfg.max_generations {
        let mut trials = Vec::with_capacity(np);
        for i in 0..np {
            let [r0, r1, r2] = pick_donors(&mut rng, np, i);
            let j_rand = rng.random_range(0..d);
            let trial: Vec<T> = (0..d)
                .map(|j| {
                    let u: f64 = rng.random();
                    let v = if u < cr || j == j_rand {
                        pop[r0][j] + f * (pop[r1][j] - pop[r2][j])
                    } else {
                        pop[i][j]
                    };
                    repair_scalar(v, cfg.bounds, cfg.bound_policy)
                })
                .collect();
            trials.push(trial);
        }
        for (i, trial) in trials.into_iter().enumerate() {
            let ft = evaluate_point(&mut objective, &trial)?;
            evaluations += 1;
            if ft <= fit[i] {
                pop[i] = trial;
                fit[i] = ft;
            }
        }
        trace.push(min_of(&fit));
    }

    let best = (0..np).fold(0, |b, k| if fit[k] < fit[b] { k } else { b });
    Ok(RunTrace {
        best_fitness_per_generation: trace,
        best_genome: None,
        best_solution: pop.swap_remove(best),
        evaluations,
    })
}

fn min_of<T: Real>(v: &[T]) -> T {
    v.iter().copied().fold(T::infinity(), T::min)
}
