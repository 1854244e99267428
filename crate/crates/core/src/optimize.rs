//! Derivative-free local minimization.
//!
//! Nelder–Mead with dimension-adaptive coefficients (Gao & Han 2012). A
//! collapsed simplex is rebuilt around the incumbent, with half the previous
//! edge length, for as long as rebuilding keeps improving it.

#[derive(Clone, Debug)]
pub struct NelderMeadConfig {
    /// Objective evaluation budget.
    pub max_evals: usize,
    /// Edge length of the initial simplex along each axis.
    pub initial_step: f64,
    /// Spread of simplex values below which it counts as collapsed.
    pub ftol: f64,
    /// Simplex diameter below which it counts as collapsed.
    pub xtol: f64,
    /// Simplex rebuilds allowed after a collapse.
    pub max_rebuilds: usize,
}

impl Default for NelderMeadConfig {
    fn default() -> Self {
        Self {
            max_evals: 20_000,
            initial_step: 0.25,
            ftol: 1e-13,
            xtol: 1e-10,
            max_rebuilds: 8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub iterations: usize,
    /// Best value after each iteration; non-increasing.
    pub history: Vec<f64>,
}

struct Counted<F> {
    f: F,
    evals: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counted<F> {
    fn call(&mut self, x: &[f64]) -> f64 {
        self.evals += 1;
        let v = (self.f)(x);
        // NaN never wins a comparison
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

pub fn nelder_mead<F>(f: F, x0: &[f64], cfg: &NelderMeadConfig) -> NelderMeadResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut obj = Counted { f, evals: 0 };
    let nf = n.max(1) as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf);

    let mut best_x = x0.to_vec();
    let mut best_f = obj.call(x0);
    let mut history = Vec::new();
    let mut iterations = 0;

    if n == 0 {
        return NelderMeadResult {
            x: best_x,
            f: best_f,
            evals: obj.evals,
            iterations,
            history,
        };
    }

    let mut rebuilds = 0;
    let mut step = cfg.initial_step;
    'outer: loop {
        let mut simplex = build_simplex(&best_x, step);
        let mut values: Vec<f64> = Vec::with_capacity(n + 1);
        values.push(best_f);
        for v in simplex.iter().skip(1) {
            values.push(obj.call(v));
        }
        let start_f = best_f;

        loop {
            let mut order: Vec<usize> = (0..=n).collect();
            order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            simplex = order.iter().map(|&i| simplex[i].clone()).collect();
            values = order.iter().map(|&i| values[i]).collect();

            if values[0] < best_f {
                best_f = values[0];
                best_x.clone_from(&simplex[0]);
            }
            history.push(best_f);
            iterations += 1;

            if obj.evals >= cfg.max_evals {
                break 'outer;
            }
            let spread = values[n] - values[0];
            let diameter = simplex[1..]
                .iter()
                .map(|p| max_abs_diff(p, &simplex[0]))
                .fold(0.0, f64::max);
            if spread <= cfg.ftol * (1.0 + values[0].abs()) || diameter <= cfg.xtol {
                break;
            }

            let centroid = centroid(&simplex[..n]);
            let worst = &simplex[n];
            let xr = affine(&centroid, worst, alpha);
            let fr = obj.call(&xr);
            if fr < values[0] {
                let xe = affine(&centroid, worst, alpha * gamma);
                let fe = obj.call(&xe);
                if fe < fr {
                    simplex[n] = xe;
                    values[n] = fe;
                } else {
                    simplex[n] = xr;
                    values[n] = fr;
                }
                continue;
            }
            if fr < values[n - 1] {
                simplex[n] = xr;
                values[n] = fr;
                continue;
            }
            // contraction, outside or inside
            let (xc, fc) = if fr < values[n] {
                let xc = affine(&centroid, worst, alpha * rho);
                let fc = obj.call(&xc);
                (xc, fc)
            } else {
                let xc = affine(&centroid, worst, -rho);
                let fc = obj.call(&xc);
                (xc, fc)
            };
            if fc < fr.min(values[n]) {
                simplex[n] = xc;
                values[n] = fc;
                continue;
            }
            // shrink toward the best vertex
            for i in 1..=n {
                let shrunk: Vec<f64> = simplex[0]
                    .iter()
                    .zip(&simplex[i])
                    .map(|(b, x)| b + sigma * (x - b))
                    .collect();
                values[i] = obj.call(&shrunk);
                simplex[i] = shrunk;
            }
        }

        rebuilds += 1;
        let improved = start_f - best_f > cfg.ftol * (1.0 + best_f.abs());
        if rebuilds > cfg.max_rebuilds || (!improved && rebuilds > 1) {
            break;
        }
        step = (step * 0.5).max(cfg.xtol * 10.0);
    }

    NelderMeadResult {
        x: best_x,
        f: best_f,
        evals: obj.evals,
        iterations,
        history,
    }
}

fn build_simplex(x0: &[f64], step: f64) -> Vec<Vec<f64>> {
    let mut s = Vec::with_capacity(x0.len() + 1);
    s.push(x0.to_vec());
    for i in 0..x0.len() {
        let mut v = x0.to_vec();
        v[i] += if v[i].abs() > 1.0 { step * v[i].abs() } else { step };
        s.push(v);
    }
    s
}

fn centroid(points: &[Vec<f64>]) -> Vec<f64> {
    let k = points.len() as f64;
    let mut c = vec![0.0; points[0].len()];
    for p in points {
        for (ci, pi) in c.iter_mut().zip(p) {
            *ci += pi;
        }
    }
    c.iter_mut().for_each(|v| *v /= k);
    c
}

/// `c + t (c − w)`.
fn affine(c: &[f64], w: &[f64], t: f64) -> Vec<f64> {
    c.iter().zip(w).map(|(ci, wi)| ci + t * (ci - wi)).collect()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let r = nelder_mead(
            |x| {
                x.iter()
                    .enumerate()
                    .map(|(i, v)| (i as f64 + 1.0) * (v - 1.0).powi(2))
                    .sum()
            },
            &[0.0; 6],
            &NelderMeadConfig::default(),
        );
        assert!(r.f < 1e-12, "{}", r.f);
        assert!(r.x.iter().all(|v| (v - 1.0).abs() < 1e-5));
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = nelder_mead(f, &[-1.2, 1.0], &NelderMeadConfig::default());
        assert!(r.f < 1e-10, "{}", r.f);
    }

    #[test]
    fn history_never_increases() {
        let r = nelder_mead(
            |x| x.iter().map(|v| v.abs()).sum::<f64>() + (x[0] * 3.0).sin(),
            &[2.0, -1.0, 0.5],
            &NelderMeadConfig {
                max_evals: 2000,
                ..Default::default()
            },
        );
        assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
        assert!(r.evals <= 2000 + 10);
    }

    #[test]
    fn budget_respected() {
        let cfg = NelderMeadConfig {
            max_evals: 300,
            ..Default::default()
        };
        let r = nelder_mead(|x| x.iter().map(|v| v * v).sum(), &[1.0; 40], &cfg);
        // one iteration may overshoot by at most a shrink
        assert!(r.evals <= 300 + 41);
    }

    #[test]
    fn golden_section_finds_minimum() {
        let (x, fx) = golden_section(|t| (t - 0.3).powi(2), 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8);
        assert!(fx < 1e-15);
    }
}
