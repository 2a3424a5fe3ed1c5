//! Anderson-type extrapolation over a short window of fixed-point residuals.

use std::collections::VecDeque;

use crate::scalar::Real;

/// Mixes the most recent images of the damped map so as to minimize the
/// linearized residual. The payload (what gets mixed) may carry more data than
/// the residual used to pick the coefficients.
#[derive(Debug)]
pub(crate) struct Anderson<S> {
    depth: usize,
    payloads: VecDeque<Vec<S>>,
    residuals: VecDeque<Vec<S>>,
}

impl<S: Real> Anderson<S> {
    pub fn new(depth: usize) -> Self {
        Anderson {
            depth,
            payloads: VecDeque::with_capacity(depth + 1),
            residuals: VecDeque::with_capacity(depth + 1),
        }
    }

    pub fn reset(&mut self) {
        self.payloads.clear();
        self.residuals.clear();
    }

    /// Records the image `payload = G(x)` with residual `G(x) - x`, and returns
    /// the extrapolated next iterate when at least two records are available.
    pub fn push(&mut self, payload: Vec<S>, residual: Vec<S>) -> Option<Vec<S>> {
        if self.depth == 0 {
            return None;
        }
        if self.payloads.len() == self.depth + 1 {
            self.payloads.pop_front();
            self.residuals.pop_front();
        }
        self.payloads.push_back(payload);
        self.residuals.push_back(residual);
        let cols = self.residuals.len() - 1;
        if cols == 0 {
            return None;
        }

        // ΔF columns: f_{j+1} - f_j
        let last = &self.residuals[cols];
        let diffs: Vec<Vec<S>> = (0..cols)
            .map(|j| {
                self.residuals[j + 1]
                    .iter()
                    .zip(&self.residuals[j])
                    .map(|(&a, &b)| a - b)
                    .collect()
            })
            .collect();
        let mut gram = vec![vec![S::zero(); cols]; cols];
        let mut rhs = vec![S::zero(); cols];
        for a in 0..cols {
            for b in a..cols {
                let d = dot(&diffs[a], &diffs[b]);
                gram[a][b] = d;
                gram[b][a] = d;
            }
            rhs[a] = dot(&diffs[a], last);
        }
        let trace: S = (0..cols).map(|a| gram[a][a]).sum();
        if !(trace > S::zero()) {
            return None;
        }
        let ridge = trace * S::lit(1e-12);
        for (a, row) in gram.iter_mut().enumerate() {
            row[a] += ridge;
        }
        let gamma = solve_small(gram, rhs)?;

        let mut mixed = self.payloads[cols].clone();
        for (j, &g) in gamma.iter().enumerate() {
            for ((m, &hi), &lo) in mixed
                .iter_mut()
                .zip(&self.payloads[j + 1])
                .zip(&self.payloads[j])
            {
                *m -= g * (hi - lo);
            }
        }
        if mixed.iter().all(|v| v.is_finite()) {
            Some(mixed)
        } else {
            None
        }
    }
}

fn dot<S: Real>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting on a tiny dense system.
fn solve_small<S: Real>(mut a: Vec<Vec<S>>, mut b: Vec<S>) -> Option<Vec<S>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot][col] == S::zero() {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= factor * v;
            }
            let v = b[col];
            b[row] -= factor * v;
        }
    }
    let mut x = vec![S::zero(); n];
    for row in (0..n).rev() {
        let s: S = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_solve() {
        let x = solve_small(vec![vec![2.0f64, 1.0], vec![1.0, 3.0]], vec![3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-12 && (x[1] - 1.4).abs() < 1e-12);
    }

    #[test]
    fn accelerates_linear_map() {
        // x = M x + b with spectral radius 0.95: plain iteration is slow,
        // extrapolation over two residuals solves a 2-D affine map exactly.
        let m = [[0.9, 0.05], [0.0, 0.95]];
        let b = [1.0, 0.5];
        let g = |x: &[f64]| {
            vec![
                m[0][0] * x[0] + m[0][1] * x[1] + b[0],
                m[1][0] * x[0] + m[1][1] * x[1] + b[1],
            ]
        };
        let mut acc = Anderson::new(3);
        let mut x = vec![0.0, 0.0];
        let mut iters = 0;
        loop {
            let gx = g(&x);
            let r: Vec<f64> = gx.iter().zip(&x).map(|(a, b)| a - b).collect();
            if r.iter().all(|v| v.abs() < 1e-10) {
                break;
            }
            x = acc.push(gx.clone(), r).unwrap_or(gx);
            iters += 1;
            assert!(iters < 20);
        }
        assert!(iters <= 6);
    }
}
