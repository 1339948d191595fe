//! Linear feasibility in exact rational arithmetic.
//!
//! A self-contained phase-1 simplex with Bland's rule: find `x >= 0`
//! with `A x = b`, or produce a Farkas certificate `y` with
//! `y . b > 0` and `y^T A <= 0`. Bland's rule cannot cycle, and the
//! rational arithmetic makes the verdict exact. A floating-point variant
//! of the same sweep exists as a fallback for instances too large for
//! big-integer pivoting; which kernel ran is recorded by the caller.

use num::{One, Signed, Zero};

use crate::rat::{Rat, RatMat};

/// Farkas certificate of infeasibility: `y . b > 0` while `y^T A <= 0`.
#[derive(Debug, Clone)]
pub struct FarkasCertificate {
    pub y: Vec<Rat>,
}

#[derive(Debug, Clone)]
pub enum Feasibility {
    Feasible(Vec<Rat>),
    Infeasible(FarkasCertificate),
}

/// Find `x >= 0` with `a x = b`, exactly.
pub fn feasible_nonneg(a: &RatMat, b: &[Rat]) -> Feasibility {
    let m = a.rows;
    let n = a.cols;
    assert_eq!(b.len(), m);

    // Sign-normalize rows so the right-hand side is non-negative.
    let mut signs = vec![false; m]; // true = row negated
    let mut tab = RatMat::zeros(m, n + m + 1);
    for i in 0..m {
        let neg = b[i].is_negative();
        signs[i] = neg;
        for j in 0..n {
            tab[(i, j)] = if neg { -a[(i, j)].clone() } else { a[(i, j)].clone() };
        }
        tab[(i, n + i)] = Rat::one();
        tab[(i, n + m)] = if neg { -b[i].clone() } else { b[i].clone() };
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Reduced costs for minimizing the sum of artificials.
    let cost = |j: usize| -> Rat {
        if j >= n {
            Rat::one()
        } else {
            Rat::zero()
        }
    };
    let reduced = |tab: &RatMat, basis: &[usize], j: usize| -> Rat {
        let mut r = cost(j);
        for (i, &bi) in basis.iter().enumerate() {
            if bi >= n {
                r -= &tab[(i, j)] * Rat::one();
            }
            let _ = bi;
        }
        r
    };

    loop {
        // Bland: smallest column with negative reduced cost.
        let entering = (0..n + m).find(|&j| {
            !basis.contains(&j) && reduced(&tab, &basis, j).is_negative()
        });
        let Some(e) = entering else { break };
        // Ratio test with Bland tie-break (smallest basis variable).
        let mut leave: Option<(usize, Rat)> = None;
        for i in 0..m {
            if tab[(i, e)].is_positive() {
                let ratio = &tab[(i, n + m)] / &tab[(i, e)];
                match &leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < *lr || (ratio == *lr && basis[i] < basis[*li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((l, _)) = leave else {
            // Unbounded phase-1 is impossible (objective bounded below by 0);
            // a missing pivot row means the column is non-positive -> skip.
            break;
        };
        pivot(&mut tab, &mut basis, l, e);
    }

    // Objective value = sum of artificial basic variables.
    let mut obj = Rat::zero();
    for (i, &bi) in basis.iter().enumerate() {
        if bi >= n {
            obj += &tab[(i, n + m)] * Rat::one();
        }
    }
    if obj.is_positive() {
        // Farkas: y_i = 1 - r_{artificial i}, flipped back per row sign.
        let mut y = Vec::with_capacity(m);
        for i in 0..m {
            let r = reduced(&tab, &basis, n + i);
            let mut yi = Rat::one() - r;
            if signs[i] {
                yi = -yi;
            }
            y.push(yi);
        }
        return Feasibility::Infeasible(FarkasCertificate { y });
    }
    let mut x = vec![Rat::zero(); n];
    for (i, &bi) in basis.iter().enumerate() {
        if bi < n {
            x[bi] = tab[(i, n + m)].clone();
        }
    }
    Feasibility::Feasible(x)
}

fn pivot(tab: &mut RatMat, basis: &mut [usize], row: usize, col: usize) {
    let cols = tab.cols;
    let p = tab[(row, col)].clone();
    for j in 0..cols {
        tab[(row, j)] = &tab[(row, j)] / &p;
    }
    for i in 0..tab.rows {
        if i != row && !tab[(i, col)].is_zero() {
            let f = tab[(i, col)].clone();
            for j in 0..cols {
                let sub = &f * &tab[(row, j)];
                tab[(i, j)] -= sub;
            }
        }
    }
    basis[row] = col;
}

/// Floating-point fallback of the same phase-1 sweep.
pub fn feasible_nonneg_f64(a: &[Vec<f64>], b: &[f64], eps: f64) -> Option<Vec<f64>> {
    let m = a.len();
    if m == 0 {
        return Some(Vec::new());
    }
    let n = a[0].len();
    let mut tab = vec![vec![0.0; n + m + 1]; m];
    for i in 0..m {
        let s = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            tab[i][j] = s * a[i][j];
        }
        tab[i][n + i] = 1.0;
        tab[i][n + m] = s * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let reduced = |tab: &Vec<Vec<f64>>, basis: &Vec<usize>, j: usize| -> f64 {
        let c = if j >= n { 1.0 } else { 0.0 };
        let mut r = c;
        for (i, &bi) in basis.iter().enumerate() {
            if bi >= n {
                r -= tab[i][j];
            }
        }
        r
    };
    for _ in 0..20_000 {
        let entering =
            (0..n + m).find(|&j| !basis.contains(&j) && reduced(&tab, &basis, j) < -eps);
        let Some(e) = entering else { break };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if tab[i][e] > eps {
                let ratio = tab[i][n + m] / tab[i][e];
                if leave.is_none_or(|(_, lr)| ratio < lr) {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((l, _)) = leave else { break };
        let p = tab[l][e];
        for j in 0..n + m + 1 {
            tab[l][j] /= p;
        }
        for i in 0..m {
            if i != l && tab[i][e].abs() > 0.0 {
                let f = tab[i][e];
                for j in 0..n + m + 1 {
                    tab[i][j] -= f * tab[l][j];
                }
            }
        }
        basis[l] = e;
    }
    let mut obj = 0.0;
    for (i, &bi) in basis.iter().enumerate() {
        if bi >= n {
            obj += tab[i][n + m];
        }
    }
    if obj > eps * 10.0 {
        return None;
    }
    let mut x = vec![0.0; n];
    for (i, &bi) in basis.iter().enumerate() {
        if bi < n {
            x[bi] = tab[i][n + m];
        }
    }
    Some(x)
}
