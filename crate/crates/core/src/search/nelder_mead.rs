//! Nelder–Mead simplex minimization with dimension-adaptive coefficients
//! (reflection 1, expansion 1 + 2/d, contraction 3/4 - 1/(2d), shrink 1 - 1/d).

#[derive(Clone, Debug)]
pub struct Options {
    pub max_iters: usize,
    pub initial_step: f64,
    /// Stop once the spread of simplex values falls below this.
    pub ftol: f64,
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
}

pub fn minimize(f: impl Fn(&[f64]) -> f64, x0: &[f64], opts: &Options) -> Minimum {
    let d = x0.len();
    let df = d as f64;
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / df, 0.75 - 0.5 / df, 1.0 - 1.0 / df);

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..d {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step;
        let fx = f(&x);
        simplex.push((x, fx));
    }

    let mut iterations = 0;
    while iterations < opts.max_iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (simplex[0].1, simplex[d].1);
        if best.is_finite() && (worst - best).abs() <= opts.ftol {
            break;
        }
        iterations += 1;

        let mut c = vec![0.0; d];
        for (x, _) in &simplex[..d] {
            for (ci, xi) in c.iter_mut().zip(x) {
                *ci += xi / df;
            }
        }
        let along = |t: f64| -> Vec<f64> { c.iter().zip(&simplex[d].0).map(|(ci, wi)| ci + t * (ci - wi)).collect() };

        let xr = along(alpha);
        let fr = f(&xr);
        if fr < best {
            let xe = along(alpha * beta);
            let fe = f(&xe);
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[d - 1].1 {
            simplex[d] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst {
            let xc = along(alpha * gamma);
            let fc = f(&xc);
            (xc, fc)
        } else {
            let xc = along(-gamma);
            let fc = f(&xc);
            (xc, fc)
        };
        if fc < fr.min(worst) {
            simplex[d] = (xc, fc);
            continue;
        }
        let x_best = simplex[0].0.clone();
        for (x, fx) in simplex.iter_mut().skip(1) {
            for (xi, bi) in x.iter_mut().zip(&x_best) {
                *xi = bi + delta * (*xi - bi);
            }
            *fx = f(x);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, f) = simplex.swap_remove(0);
    Minimum { x, f, iterations }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(max_iters: usize) -> Options {
        Options {
            max_iters,
            initial_step: 0.5,
            ftol: 1e-15,
        }
    }

    #[test]
    fn quadratic_bowl() {
        let m = minimize(|x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2), &[0.0, 0.0], &opts(2000));
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] + 2.0).abs() < 1e-6, "{m:?}");
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let m = minimize(f, &[-1.2, 1.0], &opts(5000));
        assert!(m.f < 1e-8, "{m:?}");
    }

    #[test]
    fn nonsmooth_max() {
        let f = |x: &[f64]| x.iter().map(|v| (v - 0.25).abs()).fold(0.0, f64::max);
        let m = minimize(f, &[1.0, -1.0, 0.5], &opts(5000));
        assert!(m.f < 1e-6, "{m:?}");
    }

    #[test]
    fn infinite_values_shrink_towards_best() {
        let f = |x: &[f64]| if x[0] > 1.0 { f64::INFINITY } else { (x[0] - 1.0).powi(2) };
        let m = minimize(f, &[0.0], &opts(500));
        assert!(m.f < 1e-8);
    }

    #[test]
    fn respects_iteration_budget() {
        let m = minimize(|x| x[0].abs() + x[1].abs(), &[5.0, 5.0], &opts(3));
        assert!(m.iterations <= 3);
    }
}
