//! Grid seeding plus Nelder-Mead refinement over an [`AdversarySpace`].

use std::cmp::Ordering;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::protocols::StrategySpec;
use crate::qmath::random::seeded;

use super::space::AdversarySpace;

/// Weight of the detection-cap penalty.
pub const PENALTY: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Objective {
    MaxWinProb,
    MaxAdvantageAtDetectionCap(f64),
}

/// What an evaluator reports for one strategy.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Evaluation {
    pub win: f64,
    pub advantage: f64,
    pub detection: f64,
}

impl Objective {
    pub fn value(&self, e: &Evaluation) -> f64 {
        match *self {
            Objective::MaxWinProb => e.win,
            Objective::MaxAdvantageAtDetectionCap(cap) => {
                e.advantage - PENALTY * (e.detection - cap).max(0.0)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerConfig {
    pub objective: Objective,
    /// Expected number of parameters; must match the space.
    pub dimension: usize,
    /// Points per axis of the seeding grid.
    pub grid_resolution: usize,
    /// Nelder-Mead iterations per start.
    pub simplex_iterations: usize,
    pub seed: u64,
    /// Full grids larger than this are replaced by this many seeded uniform
    /// points.
    pub grid_budget: usize,
    /// Number of best seeding points refined by the simplex.
    pub starts: usize,
}

pub const MAX_ITERATIONS: usize = 100_000;

impl OptimizerConfig {
    pub fn new(objective: Objective, dimension: usize) -> Self {
        OptimizerConfig {
            objective,
            dimension,
            grid_resolution: 4,
            simplex_iterations: 200,
            seed: 0,
            grid_budget: 4096,
            starts: 3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Objective::MaxAdvantageAtDetectionCap(cap) = self.objective {
            if !(0.0..=1.0).contains(&cap) {
                return Err(Error::InvalidParameter(format!("detection cap {cap}")));
            }
        }
        if self.simplex_iterations > MAX_ITERATIONS {
            return Err(Error::InvalidParameter(format!(
                "{} simplex iterations (max {MAX_ITERATIONS})",
                self.simplex_iterations
            )));
        }
        if self.grid_resolution == 0 || self.grid_budget == 0 {
            return Err(Error::InvalidParameter("empty seeding grid".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Stage {
    Grid,
    Simplex,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEntry {
    pub stage: Stage,
    pub params: Vec<f64>,
    pub value: f64,
    pub evaluation: Evaluation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizeResult {
    pub best_params: Vec<f64>,
    pub best_value: f64,
    pub trace: Vec<TraceEntry>,
}

pub type Evaluator<'a> = dyn Fn(&StrategySpec) -> Result<Evaluation> + Sync + 'a;

fn lex(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Higher value first, then lexicographically smaller parameters.
fn rank(a: (&[f64], f64), b: (&[f64], f64)) -> Ordering {
    b.1.total_cmp(&a.1).then_with(|| lex(a.0, b.0))
}

struct Run<'a> {
    space: &'a AdversarySpace,
    objective: Objective,
    evaluator: &'a Evaluator<'a>,
    trace: Vec<TraceEntry>,
}

impl Run<'_> {
    fn eval_one(&self, p: &[f64]) -> Result<(f64, Evaluation)> {
        let spec = self.space.build(p)?;
        let e = (self.evaluator)(&spec)?;
        Ok((self.objective.value(&e), e))
    }

    fn eval(&mut self, stage: Stage, p: Vec<f64>) -> Result<f64> {
        let (value, evaluation) = self.eval_one(&p)?;
        self.trace.push(TraceEntry {
            stage,
            params: p,
            value,
            evaluation,
        });
        Ok(value)
    }

    fn eval_batch(&mut self, points: Vec<Vec<f64>>) -> Result<()> {
        let results: Vec<Result<(f64, Evaluation)>> =
            points.par_iter().map(|p| self.eval_one(p)).collect();
        for (p, r) in points.into_iter().zip(results) {
            let (value, evaluation) = r?;
            self.trace.push(TraceEntry {
                stage: Stage::Grid,
                params: p,
                value,
                evaluation,
            });
        }
        Ok(())
    }

    fn nelder_mead(&mut self, start: &[f64], iterations: usize) -> Result<()> {
        let n = start.len();
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        let v0 = self.eval(Stage::Simplex, start.to_vec())?;
        simplex.push((start.to_vec(), v0));
        for i in 0..n {
            let (lo, hi) = self.space.bounds[i];
            let mut p = start.to_vec();
            p[i] += 0.1 * (hi - lo);
            let v = self.eval(Stage::Simplex, p.clone())?;
            simplex.push((p, v));
        }
        for _ in 0..iterations {
            simplex.sort_by(|a, b| rank((&a.0, a.1), (&b.0, b.1)));
            let best = simplex[0].1;
            let worst = simplex[n].1;
            if (best - worst).abs() < 1e-13 {
                break;
            }
            let centroid: Vec<f64> = (0..n)
                .map(|k| simplex[..n].iter().map(|s| s.0[k]).sum::<f64>() / n as f64)
                .collect();
            let along = |t: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[n].0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };
            let pr = along(1.0);
            let vr = self.eval(Stage::Simplex, pr.clone())?;
            if vr > best {
                let pe = along(2.0);
                let ve = self.eval(Stage::Simplex, pe.clone())?;
                simplex[n] = if ve > vr { (pe, ve) } else { (pr, vr) };
                continue;
            }
            if vr > simplex[n - 1].1 {
                simplex[n] = (pr, vr);
                continue;
            }
            let (pc, vc) = if vr > worst {
                let p = along(0.5);
                let v = self.eval(Stage::Simplex, p.clone())?;
                (p, v)
            } else {
                let p = along(-0.5);
                let v = self.eval(Stage::Simplex, p.clone())?;
                (p, v)
            };
            if vc > worst.max(vr) {
                simplex[n] = (pc, vc);
                continue;
            }
            let top = simplex[0].0.clone();
            for s in simplex.iter_mut().skip(1) {
                let p: Vec<f64> = top.iter().zip(&s.0).map(|(a, b)| a + 0.5 * (b - a)).collect();
                let v = self.eval(Stage::Simplex, p.clone())?;
                *s = (p, v);
            }
        }
        Ok(())
    }
}

fn seeding_points(space: &AdversarySpace, config: &OptimizerConfig) -> Vec<Vec<f64>> {
    let n = space.dim();
    let r = config.grid_resolution;
    let full = (r as f64).powi(n as i32);
    let axis = |i: usize, k: usize| {
        let (lo, hi) = space.bounds[i];
        if r == 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * k as f64 / (r - 1) as f64
        }
    };
    if full <= config.grid_budget as f64 {
        let total = r.pow(n as u32);
        (0..total)
            .map(|mut idx| {
                let mut p = vec![0.0; n];
                for i in (0..n).rev() {
                    p[i] = axis(i, idx % r);
                    idx /= r;
                }
                p
            })
            .collect()
    } else {
        let mut rng = seeded(config.seed);
        (0..config.grid_budget)
            .map(|_| {
                space
                    .bounds
                    .iter()
                    .map(|&(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
                    .collect()
            })
            .collect()
    }
}

/// Maximizes the objective over `space`.
///
/// Every evaluated point is appended to the trace in a fixed order; grid
/// points are evaluated in parallel but recorded in grid order, so the result
/// depends only on the inputs.
pub fn optimize(
    space: &AdversarySpace,
    config: &OptimizerConfig,
    evaluator: &Evaluator<'_>,
) -> Result<OptimizeResult> {
    config.validate()?;
    if config.dimension != space.dim() {
        return Err(Error::BadParameterCount {
            expected: space.dim(),
            got: config.dimension,
        });
    }
    let mut run = Run {
        space,
        objective: config.objective,
        evaluator,
        trace: Vec::new(),
    };
    if space.dim() == 0 {
        run.eval(Stage::Grid, Vec::new())?;
    } else {
        run.eval_batch(seeding_points(space, config))?;
        let mut seeds: Vec<(Vec<f64>, f64)> = run
            .trace
            .iter()
            .map(|t| (t.params.clone(), t.value))
            .collect();
        seeds.sort_by(|a, b| rank((&a.0, a.1), (&b.0, b.1)));
        seeds.dedup_by(|a, b| a.0 == b.0);
        for (start, _) in seeds.into_iter().take(config.starts) {
            run.nelder_mead(&start, config.simplex_iterations)?;
        }
    }
    let best = run
        .trace
        .iter()
        .min_by(|a, b| rank((&a.params, a.value), (&b.params, b.value)))
        .expect("at least one point");
    Ok(OptimizeResult {
        best_params: best.params.clone(),
        best_value: best.value,
        trace: run.trace,
    })
}
