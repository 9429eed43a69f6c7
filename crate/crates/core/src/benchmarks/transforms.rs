//! Building blocks shared by the benchmark functions: the oscillation and
//! asymmetry transforms, diagonal conditioning, the boundary penalty and
//! seeded orthonormal matrices.

use rand::Rng;
use rand_distr::StandardNormal;

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Self { n, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Self { n, data: rows.concat() }
    }

    /// Random orthonormal matrix: Gram-Schmidt on a Gaussian matrix.
    pub fn random_orthonormal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
        while cols.len() < n {
            let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            for c in &cols {
                let d: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(c).for_each(|(a, b)| *a -= d * b);
            }
            let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if norm > 1e-8 {
                v.iter_mut().for_each(|a| *a /= norm);
                cols.push(v);
            }
        }
        let mut data = vec![0.0; n * n];
        for (j, c) in cols.iter().enumerate() {
            for (i, v) in c.iter().enumerate() {
                data[i * n + j] = *v;
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.data.chunks_exact(self.n).map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn apply_transpose(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (row, &vi) in self.data.chunks_exact(self.n).zip(v) {
            out.iter_mut().zip(row).for_each(|(o, a)| *o += a * vi);
        }
        out
    }
}

/// Fraction `i / (D − 1)` used by every per-coordinate exponent.
#[inline]
pub fn ratio(i: usize, d: usize) -> f64 {
    if d > 1 {
        i as f64 / (d - 1) as f64
    } else {
        0.0
    }
}

/// Oscillation transform applied to a single value.
pub fn t_osz_scalar(v: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    let xh = v.abs().ln();
    let (c1, c2) = if v > 0.0 { (10.0, 7.9) } else { (5.5, 3.1) };
    v.signum() * (xh + 0.049 * ((c1 * xh).sin() + (c2 * xh).sin())).exp()
}

pub fn t_osz(v: &[f64]) -> Vec<f64> {
    v.iter().map(|&x| t_osz_scalar(x)).collect()
}

/// Asymmetry transform with strength `beta`.
pub fn t_asy(v: &[f64], beta: f64) -> Vec<f64> {
    let d = v.len();
    v.iter()
        .enumerate()
        .map(|(i, &x)| if x > 0.0 { x.powf(1.0 + beta * ratio(i, d) * x.sqrt()) } else { x })
        .collect()
}

/// Diagonal of the conditioning matrix with condition number `alpha`.
pub fn lambda(alpha: f64, d: usize) -> Vec<f64> {
    (0..d).map(|i| alpha.powf(0.5 * ratio(i, d))).collect()
}

pub fn scale(v: &[f64], diag: &[f64]) -> Vec<f64> {
    v.iter().zip(diag).map(|(a, b)| a * b).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Quadratic penalty outside `[-5, 5]^D`.
pub fn f_pen(x: &[f64]) -> f64 {
    x.iter().map(|&v| (v.abs() - 5.0).max(0.0).powi(2)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn orthonormal_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in [3, 4, 8] {
            let m = Matrix::random_orthonormal(n, &mut rng);
            for a in 0..n {
                for b in 0..n {
                    let d: f64 = (0..n).map(|i| m.get(i, a) * m.get(i, b)).sum();
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!((d - want).abs() < 1e-12);
                }
            }
            let v: Vec<f64> = (0..n).map(|i| i as f64 - 1.5).collect();
            let back = m.apply_transpose(&m.apply(&v));
            assert!(back.iter().zip(&v).all(|(a, b)| (a - b).abs() < 1e-12));
        }
    }

    #[test]
    fn transforms_fix_the_origin() {
        assert_eq!(t_osz(&[0.0, 0.0]), vec![0.0, 0.0]);
        assert_eq!(t_asy(&[0.0, -1.0, 0.0], 0.5), vec![0.0, -1.0, 0.0]);
        // T_osz keeps sign and is the identity at ±1.
        assert!((t_osz_scalar(1.0) - 1.0).abs() < 1e-15);
        assert!((t_osz_scalar(-1.0) + 1.0).abs() < 1e-15);
        assert!(t_osz_scalar(-0.3) < 0.0);
    }

    #[test]
    fn penalty_and_conditioning() {
        assert_eq!(f_pen(&[5.0, -5.0, 0.0]), 0.0);
        assert_eq!(f_pen(&[6.0, -7.0]), 5.0);
        let l = lambda(100.0, 3);
        assert_eq!(l[0], 1.0);
        assert!((l[1] - 100f64.powf(0.25)).abs() < 1e-12);
        assert!((l[2] - 10.0).abs() < 1e-12);
    }
}
