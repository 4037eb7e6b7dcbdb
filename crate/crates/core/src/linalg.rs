//! Small dense linear algebra for the `d x d` design matrices of the linear
//! agents. Row-major storage; `d` is expected to be tiny (tens at most).

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n, "matrix must be square");
            m.data[i * n..(i + 1) * n].copy_from_slice(r);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    /// `x^T M x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.mul_vec(x))
    }

    /// `M += w * x x^T`.
    pub fn add_outer(&mut self, w: f64, x: &[f64]) {
        let n = self.n;
        for i in 0..n {
            let wx = w * x[i];
            for (m, xj) in self.data[i * n..(i + 1) * n].iter_mut().zip(x) {
                *m += wx * xj;
            }
        }
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Lower-triangular factor was not positive definite.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("matrix lost positive definiteness at column {column}")]
pub struct NotPositiveDefinite {
    pub column: usize,
}

/// Rank-one update of a lower Cholesky factor in place: on return
/// `L L^T = L0 L0^T + v v^T`. `v` is consumed as scratch.
pub fn cholesky_rank_one_update(l: &mut Matrix, v: &mut [f64]) -> Result<(), NotPositiveDefinite> {
    let n = l.dim();
    for k in 0..n {
        let lkk = l[(k, k)];
        let r = lkk.hypot(v[k]);
        if !(r.is_finite() && r > 0.0 && lkk > 0.0) {
            return Err(NotPositiveDefinite { column: k });
        }
        let c = r / lkk;
        let s = v[k] / lkk;
        l[(k, k)] = r;
        for i in k + 1..n {
            let lik = (l[(i, k)] + s * v[i]) / c;
            v[i] = c * v[i] - s * lik;
            l[(i, k)] = lik;
        }
    }
    Ok(())
}

/// Sherman–Morrison for `(B + w x x^T)^{-1}` given `B^{-1}`, in place.
pub fn sherman_morrison_update(b_inv: &mut Matrix, w: f64, x: &[f64]) {
    let bx = b_inv.mul_vec(x);
    let denom = 1.0 + w * dot(x, &bx);
    let n = b_inv.dim();
    let scale = w / denom;
    for i in 0..n {
        for j in 0..n {
            b_inv[(i, j)] -= scale * bx[i] * bx[j];
        }
    }
    // Keep exact symmetry; the two triangles drift apart otherwise.
    for i in 0..n {
        for j in i + 1..n {
            let m = 0.5 * (b_inv[(i, j)] + b_inv[(j, i)]);
            b_inv[(i, j)] = m;
            b_inv[(j, i)] = m;
        }
    }
}

/// Solves `L y = b` for lower-triangular `L`.
pub fn solve_lower(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.dim();
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut acc = b[i];
        for k in 0..i {
            acc -= l[(i, k)] * y[k];
        }
        y[i] = acc / l[(i, i)];
    }
    y
}

/// Solves `L^T y = b` for lower-triangular `L`.
pub fn solve_lower_transpose(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.dim();
    let mut y = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = b[i];
        for k in i + 1..n {
            acc -= l[(k, i)] * y[k];
        }
        y[i] = acc / l[(i, i)];
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd3() -> Matrix {
        Matrix::from_rows(&[
            vec![4.0, 1.0, 0.5],
            vec![1.0, 3.0, 0.2],
            vec![0.5, 0.2, 2.0],
        ])
    }

    fn naive_cholesky(a: &Matrix) -> Matrix {
        let n = a.dim();
        let mut l = Matrix::zeros(n);
        for j in 0..n {
            let mut s = a[(j, j)];
            for k in 0..j {
                s -= l[(j, k)] * l[(j, k)];
            }
            l[(j, j)] = s.sqrt();
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / l[(j, j)];
            }
        }
        l
    }

    #[test]
    fn rank_one_cholesky_matches_refactorization() {
        let a = spd3();
        let mut l = naive_cholesky(&a);
        let x = [0.3, -0.7, 0.4];
        let w: f64 = 0.6;
        let mut v: Vec<f64> = x.iter().map(|xi| xi * w.sqrt()).collect();
        cholesky_rank_one_update(&mut l, &mut v).unwrap();
        let mut b = a.clone();
        b.add_outer(w, &x);
        assert!(l.max_abs_diff(&naive_cholesky(&b)) < 1e-12);
        assert!(l.mul(&l.transpose()).max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn sherman_morrison_inverts() {
        let mut b = Matrix::identity(3);
        let mut b_inv = Matrix::identity(3);
        let xs = [[0.2, 0.5, -0.1], [0.9, 0.0, 0.3], [-0.4, 0.4, 0.4]];
        for (k, x) in xs.iter().enumerate() {
            let w = 0.25 * (k + 1) as f64;
            b.add_outer(w, x);
            sherman_morrison_update(&mut b_inv, w, x);
        }
        assert!(b.mul(&b_inv).max_abs_diff(&Matrix::identity(3)) < 1e-12);
    }

    #[test]
    fn triangular_solves() {
        let l = naive_cholesky(&spd3());
        let b = [1.0, -2.0, 0.5];
        let y = solve_lower(&l, &b);
        assert!(l
            .mul_vec(&y)
            .iter()
            .zip(&b)
            .all(|(p, q)| (p - q).abs() < 1e-12));
        let z = solve_lower_transpose(&l, &b);
        let lt = l.transpose();
        assert!(lt
            .mul_vec(&z)
            .iter()
            .zip(&b)
            .all(|(p, q)| (p - q).abs() < 1e-12));
    }

    #[test]
    fn update_reports_broken_factor() {
        let mut l = Matrix::zeros(2);
        let mut v = vec![0.0, 0.0];
        assert_eq!(
            cholesky_rank_one_update(&mut l, &mut v),
            Err(NotPositiveDefinite { column: 0 })
        );
    }
}
