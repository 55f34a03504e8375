//! Nelder-Mead simplex minimization.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Copy, Debug)]
pub struct NelderMeadOptions {
    /// Stop when (f_max - f_min) <= rel_tol * |f_min| + abs_tol.
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_evals: usize,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            rel_tol: 1e-6,
            abs_tol: 1e-14,
            max_evals: 20_000,
            initial_step: 0.5,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2,
/// shrink 1/2). The search is restarted from the best vertex once after the
/// first convergence to escape degenerate simplices.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    start: &[f64],
    opts: &NelderMeadOptions,
) -> Minimum {
    let first = run(&mut f, start, opts, 0);
    let again = run(&mut f, &first.point, opts, first.evals);
    if again.value <= first.value {
        again
    } else {
        Minimum {
            evals: again.evals,
            ..first
        }
    }
}

fn run<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    start: &[f64],
    opts: &NelderMeadOptions,
    evals_so_far: usize,
) -> Minimum {
    let n = start.len();
    let mut evals = evals_so_far;
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(start.to_vec());
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += opts.initial_step;
        simplex.push(p);
    }
    let mut values: Vec<f64> = simplex
        .iter()
        .map(|p| {
            evals += 1;
            f(p)
        })
        .collect();

    let mut converged = false;
    while evals < opts.max_evals {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| {
            values[a]
                .partial_cmp(&values[b])
                .unwrap_or(core::cmp::Ordering::Equal)
        });
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let best = values[0];
        let worst = values[n];
        if worst - best <= opts.rel_tol * best.abs() + opts.abs_tol {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; n];
        for p in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };

        let reflected = along(-1.0);
        let fr = f(&reflected);
        evals += 1;
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = f(&expanded);
            evals += 1;
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
        } else {
            let (candidate, fc) = if fr < values[n] {
                let p = along(-0.5);
                let v = f(&p);
                (p, v)
            } else {
                let p = along(0.5);
                let v = f(&p);
                (p, v)
            };
            evals += 1;
            if fc < values[n].min(fr) {
                simplex[n] = candidate;
                values[n] = fc;
            } else {
                let anchor = simplex[0].clone();
                for i in 1..=n {
                    for (x, a) in simplex[i].iter_mut().zip(&anchor) {
                        *x = a + 0.5 * (*x - a);
                    }
                    values[i] = f(&simplex[i]);
                    evals += 1;
                }
            }
        }
    }

    let (idx, _) =
        values.iter().enumerate().fold(
            (0, f64::INFINITY),
            |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc },
        );
    Minimum {
        point: simplex[idx].clone(),
        value: values[idx],
        evals,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_rosenbrock() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let opts = NelderMeadOptions {
            rel_tol: 0.0,
            abs_tol: 1e-20,
            ..Default::default()
        };
        let m = nelder_mead(rosen, &[-1.2, 1.0], &opts);
        assert!(m.value < 1e-12, "{m:?}");
        assert!((m.point[0] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn quadratic_bowl_in_five_dims() {
        let f = |x: &[f64]| {
            x.iter()
                .enumerate()
                .map(|(i, v)| (i + 1) as f64 * (v - 0.3).powi(2))
                .sum()
        };
        let m = nelder_mead(
            f,
            &[0.0; 5],
            &NelderMeadOptions {
                abs_tol: 1e-16,
                ..Default::default()
            },
        );
        assert!(m.value < 1e-10);
        assert!(m.converged);
    }
}
