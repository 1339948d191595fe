//! Exact rational linear algebra.
//!
//! Polyhedral verdicts (cone duality, feasibility, the group-averaged
//! inner product) must not depend on solver tolerance, so they run over
//! arbitrary-precision rationals. Every finite `f64` converts losslessly
//! to a rational, which lets the same model data feed both the exact and
//! the floating-point paths.

use num::rational::BigRational;
use num::{BigInt, FromPrimitive, One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

/// `n/d` as a rational. Panics on `d = 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    assert!(d != 0, "zero denominator");
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Exact conversion from a finite float (every finite f64 is rational).
pub fn rat_from_f64(x: f64) -> Rat {
    Rat::from_f64(x).expect("non-finite value cannot become a rational")
}

pub fn rat_to_f64(x: &Rat) -> f64 {
    x.to_f64().expect("rational out of f64 range")
}

pub fn vec_from_f64(v: &[f64]) -> Vec<Rat> {
    v.iter().copied().map(rat_from_f64).collect()
}

pub fn vec_to_f64(v: &[Rat]) -> Vec<f64> {
    v.iter().map(rat_to_f64).collect()
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Scale a ray so its first non-zero entry has absolute value 1.
///
/// Rays are identified up to positive scaling, so this canonical form
/// makes set comparison exact. Returns `None` for the zero vector.
pub fn canonical_ray(v: &[Rat]) -> Option<Vec<Rat>> {
    let lead = v.iter().find(|x| !x.is_zero())?;
    let scale = lead.abs();
    Some(v.iter().map(|x| x / &scale).collect())
}

/// Dense rational matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct RatMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl RatMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c));
        Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_f64(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self {
            rows,
            cols,
            data: data.iter().copied().map(rat_from_f64).collect(),
        }
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col_vec(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = &self[(i, k)];
                if aik.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let add = aik * &other[(k, j)];
                    out[(i, j)] += add;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(rat_to_f64).collect()
    }

    /// Reduced row echelon form; pivots chosen left-to-right with the
    /// smallest row index, so the result is deterministic.
    /// Returns (rref, pivot column list).
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].clone();
            for j in 0..m.cols {
                m[(r, j)] = &m[(r, j)] / &inv;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in 0..m.cols {
                        let sub = &f * &m[(r, j)];
                        m[(i, j)] -= sub;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Exact solution of `self * x = b` (free variables set to zero).
    /// Returns `None` when the system is inconsistent.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Self::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // pivot in the constant column
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r[(row, self.cols)].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rat::one();
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(out)
    }

    /// Basis of the right nullspace, one vector per free column.
    pub fn nullspace(&self) -> Vec<Vec<Rat>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![Rat::zero(); self.cols];
                v[fc] = Rat::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r[(row, fc)].clone();
                }
                v
            })
            .collect()
    }

    /// Symmetric positive-definiteness by exact elimination: all pivots
    /// of the LDL^T sweep must be positive.
    pub fn is_positive_definite(&self) -> bool {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        for k in 0..n {
            if !m[(k, k)].is_positive() {
                return false;
            }
            for i in (k + 1)..n {
                let f = &m[(i, k)] / &m[(k, k)];
                for j in k..n {
                    let sub = &f * &m[(k, j)];
                    m[(i, j)] -= sub;
                }
            }
        }
        true
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for RatMat {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f64_round_trip_is_exact() {
        for x in [0.0, 1.0, 0.5, -0.375, 1.0 / 3.0, 1e-9] {
            assert_eq!(rat_to_f64(&rat_from_f64(x)), x);
        }
    }

    #[test]
    fn rref_and_rank() {
        let m = RatMat::from_rows(vec![
            vec![rat(1, 1), rat(2, 1), rat(3, 1)],
            vec![rat(2, 1), rat(4, 1), rat(6, 1)],
            vec![rat(0, 1), rat(1, 1), rat(1, 1)],
        ]);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn solve_exact() {
        let m = RatMat::from_rows(vec![
            vec![rat(2, 1), rat(1, 1)],
            vec![rat(1, 1), rat(3, 1)],
        ]);
        let x = m.solve(&[rat(5, 1), rat(10, 1)]).unwrap();
        assert_eq!(x, vec![rat(1, 1), rat(3, 1)]);
        // inconsistent system
        let s = RatMat::from_rows(vec![
            vec![rat(1, 1), rat(1, 1)],
            vec![rat(1, 1), rat(1, 1)],
        ]);
        assert!(s.solve(&[rat(1, 1), rat(2, 1)]).is_none());
    }

    #[test]
    fn inverse_round_trip() {
        let m = RatMat::from_rows(vec![
            vec![rat(2, 1), rat(1, 1), rat(0, 1)],
            vec![rat(1, 1), rat(3, 1), rat(1, 1)],
            vec![rat(0, 1), rat(1, 1), rat(1, 1)],
        ]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.matmul(&inv), RatMat::identity(3));
    }

    #[test]
    fn nullspace_orthogonal_to_rows() {
        let m = RatMat::from_rows(vec![vec![rat(1, 1), rat(1, 1), rat(-1, 1)]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(dot(m.row(0), v).is_zero());
        }
    }

    #[test]
    fn pd_check() {
        let pd = RatMat::from_rows(vec![
            vec![rat(2, 1), rat(1, 1)],
            vec![rat(1, 1), rat(2, 1)],
        ]);
        assert!(pd.is_positive_definite());
        let not_pd = RatMat::from_rows(vec![
            vec![rat(1, 1), rat(2, 1)],
            vec![rat(2, 1), rat(1, 1)],
        ]);
        assert!(!not_pd.is_positive_definite());
    }

    #[test]
    fn canonical_ray_scales_leading_entry() {
        let v = vec![rat(0, 1), rat(-3, 1), rat(6, 1)];
        let c = canonical_ray(&v).unwrap();
        assert_eq!(c, vec![rat(0, 1), rat(-1, 1), rat(2, 1)]);
        assert!(canonical_ray(&[Rat::zero()]).is_none());
    }
}
