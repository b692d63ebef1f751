//! Least-squares fit of `f(x) = a * x^b + eps`.

use serde::Serialize;

use super::StatsError;

pub const MAX_ITERATIONS: usize = 500;
pub const REL_TOLERANCE: f64 = 1e-10;

const LAMBDA_INIT: f64 = 1e-3;
const LAMBDA_MAX: f64 = 1e16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub a: f64,
    pub b: f64,
    pub eps: f64,
    pub rmse: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl PowerLawFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.a * x.powf(self.b) + self.eps
    }
}

fn model(p: [f64; 3], x: f64) -> f64 {
    p[0] * x.powf(p[1]) + p[2]
}

pub fn sum_squared_residuals(points: &[(f64, f64)], a: f64, b: f64, eps: f64) -> f64 {
    points
        .iter()
        .map(|&(x, y)| {
            let r = y - model([a, b, eps], x);
            r * r
        })
        .sum()
}

fn check(points: &[(f64, f64)]) -> Result<(), StatsError> {
    if points.len() < 3 {
        return Err(StatsError::Degenerate("need at least three points".into()));
    }
    if points
        .iter()
        .any(|&(x, y)| !(x > 0.0) || !x.is_finite() || !y.is_finite())
    {
        return Err(StatsError::Degenerate(
            "x must be positive and all values finite".into(),
        ));
    }
    let x0 = points[0].0;
    if points.iter().all(|&(x, _)| x == x0) {
        return Err(StatsError::Degenerate("x is constant".into()));
    }
    Ok(())
}

/// `(a, b, 0)` from ordinary regression of `ln y` on `ln x` over points with
/// `y > 0`. Falls back to a flat curve at the mean when fewer than two
/// distinct x have positive y.
pub fn initial_guess(points: &[(f64, f64)]) -> Result<(f64, f64, f64), StatsError> {
    check(points)?;
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.1 > 0.0)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if logs.len() < 2 || sxx == 0.0 {
        let mean = points.iter().map(|p| p.1).sum::<f64>() / points.len() as f64;
        return Ok((mean, 0.0, 0.0));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let b = sxy / sxx;
    Ok(((my - b * mx).exp(), b, 0.0))
}

/// Solves the 3x3 system `m * x = v` by Gaussian elimination with partial
/// pivoting.
fn solve3(mut m: [[f64; 3]; 3], mut v: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col] == 0.0 || !m[piv][col].is_finite() {
            return None;
        }
        m.swap(col, piv);
        v.swap(col, piv);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            v[row] -= f * v[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| m[row][k] * x[k]).sum();
        x[row] = (v[row] - tail) / m[row][row];
    }
    x.iter().all(|c| c.is_finite()).then_some(x)
}

/// Levenberg-Marquardt with an analytic Jacobian and diagonal scaling.
/// Points are sorted first so the result does not depend on input order.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit, StatsError> {
    let mut pts = points.to_vec();
    pts.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
    let pts = pts;
    let (a0, b0, e0) = initial_guess(&pts)?;

    let sse = |p: [f64; 3]| sum_squared_residuals(&pts, p[0], p[1], p[2]);
    let scale: f64 = pts.iter().map(|p| p.1 * p.1).sum::<f64>().max(f64::MIN_POSITIVE);

    let mut p = [a0, b0, e0];
    let mut obj = sse(p);
    let mut lambda = LAMBDA_INIT;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut jtj = [[0.0; 3]; 3];
        let mut jtr = [0.0; 3];
        for &(x, y) in &pts {
            let xb = x.powf(p[1]);
            let j = [xb, p[0] * xb * x.ln(), 1.0];
            let r = y - (p[0] * xb + p[2]);
            for i in 0..3 {
                jtr[i] += j[i] * r;
                for k in 0..3 {
                    jtj[i][k] += j[i] * j[k];
                }
            }
        }

        let mut accepted = false;
        while lambda <= LAMBDA_MAX {
            let mut m = jtj;
            for (i, row) in m.iter_mut().enumerate() {
                row[i] += lambda * jtj[i][i].max(f64::MIN_POSITIVE);
            }
            if let Some(step) = solve3(m, jtr) {
                let trial = [p[0] + step[0], p[1] + step[1], p[2] + step[2]];
                let trial_obj = sse(trial);
                if trial_obj.is_finite() && trial_obj <= obj {
                    let change = (obj - trial_obj) / obj.max(f64::MIN_POSITIVE);
                    p = trial;
                    obj = trial_obj;
                    lambda = (lambda / 10.0).max(1e-12);
                    accepted = true;
                    if change < REL_TOLERANCE {
                        converged = true;
                    }
                    break;
                }
            }
            lambda *= 10.0;
        }
        // No downhill step at any damping: a stationary point to machine
        // precision. Also stop once the residual vanishes relative to the data.
        if !accepted || obj <= scale * 1e-30 {
            converged = true;
        }
        if converged {
            break;
        }
    }

    let fit = PowerLawFit {
        a: p[0],
        b: p[1],
        eps: p[2],
        rmse: (obj / pts.len() as f64).sqrt(),
        iterations,
        converged,
    };
    if converged {
        Ok(fit)
    } else {
        Err(StatsError::NonConvergence { best: fit })
    }
}
