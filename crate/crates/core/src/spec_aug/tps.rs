//! Thin-plate splines (Bookstein principal warps).
//!
//! A spline over control points `p_i` with values `v_i` is
//! `f(p) = a0 + a_row * row + a_col * col + sum_i w_i U(|p - p_i|)` with
//! `U(r) = r^2 log r^2`. Weights and affine part solve
//! `[[K + lambda I, P], [P^T, 0]] [w; a] = [v; 0]`.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TpsError {
    #[error("thin-plate spline needs at least 3 control points, got {0}")]
    TooFewPoints(usize),
    #[error("control points {0} and {1} coincide")]
    DuplicatePoints(usize, usize),
    #[error("control points are collinear")]
    Collinear,
    #[error("spline system is singular")]
    Singular,
    #[error("expected {expected} target values, got {actual}")]
    TargetCount { expected: usize, actual: usize },
    #[error("regularization must be finite and >= 0, got {0}")]
    BadLambda(f64),
}

/// Kernel `U` as a function of the squared distance.
#[inline]
pub fn kernel(r2: f64) -> f64 {
    if r2 <= 0.0 {
        0.0
    } else {
        r2 * r2.ln()
    }
}

#[inline]
fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dr, dc) = (a[0] - b[0], a[1] - b[1]);
    dr * dr + dc * dc
}

/// One solved coordinate channel of a thin-plate spline.
#[derive(Debug, Clone, PartialEq)]
pub struct TpsSpline {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    /// `(a0, a_row, a_col)`.
    pub affine: [f64; 3],
    pub lambda: f64,
}

impl TpsSpline {
    pub fn eval(&self, p: [f64; 2]) -> f64 {
        let [a0, ar, ac] = self.affine;
        let bend: f64 = self
            .points
            .iter()
            .zip(&self.weights)
            .map(|(q, w)| w * kernel(dist2(p, *q)))
            .sum();
        a0 + ar * p[0] + ac * p[1] + bend
    }

    /// `(sum w, sum w*row, sum w*col)`; all zero for a valid spline.
    pub fn side_conditions(&self) -> [f64; 3] {
        let mut s = [0.0; 3];
        for (p, w) in self.points.iter().zip(&self.weights) {
            s[0] += w;
            s[1] += w * p[0];
            s[2] += w * p[1];
        }
        s
    }
}

/// A two-channel spline mapping `(row, col) -> (row', col')`.
#[derive(Debug, Clone, PartialEq)]
pub struct TpsWarp {
    pub row: TpsSpline,
    pub col: TpsSpline,
}

impl TpsWarp {
    pub fn map(&self, p: [f64; 2]) -> [f64; 2] {
        [self.row.eval(p), self.col.eval(p)]
    }
}

fn check_points(points: &[[f64; 2]]) -> Result<(), TpsError> {
    let n = points.len();
    if n < 3 {
        return Err(TpsError::TooFewPoints(n));
    }
    for i in 0..n {
        for j in i + 1..n {
            if points[i] == points[j] {
                return Err(TpsError::DuplicatePoints(i, j));
            }
        }
    }
    let scale = points
        .iter()
        .map(|p| dist2(*p, points[0]))
        .fold(0.0, f64::max);
    let o = points[0];
    let far = points
        .iter()
        .copied()
        .max_by(|a, b| dist2(*a, o).total_cmp(&dist2(*b, o)))
        .unwrap();
    let spread = points
        .iter()
        .map(|p| ((far[0] - o[0]) * (p[1] - o[1]) - (far[1] - o[1]) * (p[0] - o[0])).abs())
        .fold(0.0, f64::max);
    if spread <= 1e-12 * scale {
        return Err(TpsError::Collinear);
    }
    Ok(())
}

/// Gaussian elimination with partial pivoting; solves `a x = b` for each
/// right-hand side column in place. `a` is row-major `n x n`.
fn solve_in_place(a: &mut [f64], n: usize, rhs: &mut [Vec<f64>]) -> Result<(), TpsError> {
    let max_abs = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-13 * max_abs.max(1.0);
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
            .unwrap();
        if a[piv * n + k].abs() <= tol {
            return Err(TpsError::Singular);
        }
        if piv != k {
            for c in 0..n {
                a.swap(k * n + c, piv * n + c);
            }
            for b in rhs.iter_mut() {
                b.swap(k, piv);
            }
        }
        let d = a[k * n + k];
        for i in k + 1..n {
            let f = a[i * n + k] / d;
            if f == 0.0 {
                continue;
            }
            for c in k..n {
                a[i * n + c] -= f * a[k * n + c];
            }
            for b in rhs.iter_mut() {
                b[i] -= f * b[k];
            }
        }
    }
    for b in rhs.iter_mut() {
        for k in (0..n).rev() {
            let s: f64 = (k + 1..n).map(|c| a[k * n + c] * b[c]).sum();
            b[k] = (b[k] - s) / a[k * n + k];
        }
    }
    Ok(())
}

/// Solves splines sharing `points` for several target channels at once.
pub fn tps_solve_many(points: &[[f64; 2]], targets: &[&[f64]], lambda: f64) -> Result<Vec<TpsSpline>, TpsError> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(TpsError::BadLambda(lambda));
    }
    check_points(points)?;
    let n = points.len();
    for t in targets {
        if t.len() != n {
            return Err(TpsError::TargetCount {
                expected: n,
                actual: t.len(),
            });
        }
    }
    // Solve in centred, unit-radius coordinates for conditioning, then map
    // the solution back. With p' = (p - c) / s the kernel satisfies
    // U(r / s) = U(r) / s^2 - (r^2 / s^2) ln s^2, and the r^2 part is
    // annihilated by the side conditions up to a constant, so the
    // interpolant is unchanged when lambda is rescaled to lambda / s^2.
    let c = [
        points.iter().map(|p| p[0]).sum::<f64>() / n as f64,
        points.iter().map(|p| p[1]).sum::<f64>() / n as f64,
    ];
    let s = points.iter().map(|p| dist2(*p, c)).fold(0.0, f64::max).sqrt();
    let norm: Vec<[f64; 2]> = points.iter().map(|p| [(p[0] - c[0]) / s, (p[1] - c[1]) / s]).collect();
    let m = n + 3;
    let mut a = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            a[i * m + j] = kernel(dist2(norm[i], norm[j]));
        }
        a[i * m + i] += lambda / (s * s);
        let p = [1.0, norm[i][0], norm[i][1]];
        for (k, v) in p.iter().enumerate() {
            a[i * m + n + k] = *v;
            a[(n + k) * m + i] = *v;
        }
    }
    let mut rhs: Vec<Vec<f64>> = targets
        .iter()
        .map(|t| {
            let mut v = t.to_vec();
            v.extend_from_slice(&[0.0; 3]);
            v
        })
        .collect();
    solve_in_place(&mut a, m, &mut rhs)?;
    let ln_s2 = (s * s).ln();
    Ok(rhs
        .into_iter()
        .map(|x| {
            let w = &x[..n];
            let (a0, ar, ac) = (x[n], x[n + 1], x[n + 2]);
            let spread: f64 = w.iter().zip(&norm).map(|(w, p)| w * (p[0] * p[0] + p[1] * p[1])).sum();
            TpsSpline {
                points: points.to_vec(),
                weights: w.iter().map(|w| w / (s * s)).collect(),
                affine: [a0 - (ar * c[0] + ac * c[1]) / s - ln_s2 * spread, ar / s, ac / s],
                lambda,
            }
        })
        .collect())
}

/// Solves one coordinate channel.
pub fn tps_solve(points: &[[f64; 2]], targets: &[f64], lambda: f64) -> Result<TpsSpline, TpsError> {
    Ok(tps_solve_many(points, &[targets], lambda)?.swap_remove(0))
}

/// The warp taking each displaced point `p_i + d_i` back to `p_i`.
pub fn solve_inverse_warp(points: &[[f64; 2]], displacements: &[[f64; 2]], lambda: f64) -> Result<TpsWarp, TpsError> {
    if displacements.len() != points.len() {
        return Err(TpsError::TargetCount {
            expected: points.len(),
            actual: displacements.len(),
        });
    }
    let moved: Vec<[f64; 2]> = points
        .iter()
        .zip(displacements)
        .map(|(p, d)| [p[0] + d[0], p[1] + d[1]])
        .collect();
    let rows: Vec<f64> = points.iter().map(|p| p[0]).collect();
    let cols: Vec<f64> = points.iter().map(|p| p[1]).collect();
    let mut s = tps_solve_many(&moved, &[&rows, &cols], lambda)?;
    let col = s.pop().unwrap();
    let row = s.pop().unwrap();
    Ok(TpsWarp { row, col })
}
