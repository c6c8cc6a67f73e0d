//! Derivative-free Nelder–Mead simplex minimization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Simplex coefficients and budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NelderMeadConfig {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Offset of each initial vertex from the start point, per coordinate.
    pub initial_edge: f64,
    /// Evaluation budget per parameter; the total is this times the dimension.
    pub evals_per_dim: usize,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            initial_edge: 0.1,
            evals_per_dim: 200,
        }
    }
}

/// Outcome of a simplex run.
#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub best: Vec<f64>,
    pub best_value: f64,
    pub evaluations: usize,
    /// Best value after each iteration, starting with the initial simplex.
    pub history: Vec<f64>,
}

struct Counted<'a, F> {
    f: &'a mut F,
    evals: usize,
}

impl<F: FnMut(&[f64], usize) -> Result<f64>> Counted<'_, F> {
    fn eval(&mut self, x: &[f64]) -> Result<f64> {
        let v = (self.f)(x, self.evals)?;
        self.evals += 1;
        Ok(v)
    }
}

fn affine(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    // a + t (b - a)
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

/// Minimizes `f` from `start`. The objective also receives the running
/// evaluation index, which noisy objectives use to derive per-call seeds.
pub fn minimize<F>(mut f: F, start: &[f64], cfg: &NelderMeadConfig) -> Result<NelderMeadResult>
where
    F: FnMut(&[f64], usize) -> Result<f64>,
{
    let dim = start.len();
    if dim == 0 {
        return Err(Error::invalid("simplex needs at least one parameter"));
    }
    let budget = cfg.evals_per_dim * dim;
    if budget < dim + 1 {
        return Err(Error::invalid("evaluation budget smaller than the simplex"));
    }
    let mut f = Counted { f: &mut f, evals: 0 };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((start.to_vec(), f.eval(start)?));
    for i in 0..dim {
        let mut x = start.to_vec();
        x[i] += cfg.initial_edge;
        let v = f.eval(&x)?;
        simplex.push((x, v));
    }

    let sort = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));
    sort(&mut simplex);
    let mut history = vec![simplex[0].1];

    while f.evals < budget {
        let worst = simplex[dim].clone();
        let centroid: Vec<f64> = (0..dim)
            .map(|k| simplex[..dim].iter().map(|(x, _)| x[k]).sum::<f64>() / dim as f64)
            .collect();

        let xr = affine(&centroid, &worst.0, -cfg.reflection);
        let fr = f.eval(&xr)?;

        if fr < simplex[0].1 {
            let xe = affine(&centroid, &xr, cfg.expansion);
            let fe = if f.evals < budget { f.eval(&xe)? } else { f64::INFINITY };
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
        } else {
            let (xc, limit) = if fr < worst.1 {
                (affine(&centroid, &xr, cfg.contraction), fr)
            } else {
                (affine(&centroid, &worst.0, cfg.contraction), worst.1)
            };
            let fc = if f.evals < budget { f.eval(&xc)? } else { f64::INFINITY };
            if fc < limit {
                simplex[dim] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    if f.evals >= budget {
                        break;
                    }
                    let x = affine(&best, &vertex.0, cfg.shrink);
                    let v = f.eval(&x)?;
                    *vertex = (x, v);
                }
            }
        }
        sort(&mut simplex);
        history.push(simplex[0].1);

        let spread = simplex[dim].1 - simplex[0].1;
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread <= 1e-14 && diameter <= 1e-10 {
            break;
        }
    }

    let (best, best_value) = simplex.swap_remove(0);
    Ok(NelderMeadResult {
        best,
        best_value,
        evaluations: f.evals,
        history,
    })
}
