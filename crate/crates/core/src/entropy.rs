//! Measurement entropy and mixing entropy.
//!
//! Measurement entropy: the minimum Shannon entropy of a state
//! restricted to a single test. Mixing entropy: the minimum Shannon
//! entropy of the weights over convex decompositions into pure states.
//! Logarithms are base 2 throughout; the choice rescales both
//! functionals identically, so the monoentropy verdict is unaffected.
//!
//! Decomposition minimization is concave, so the minimum sits at a
//! vertex of the weight polytope; vertices are enumerated exactly over
//! independent supports. Exactness is claimed only when the dimension
//! bound keeps supports at 8 or fewer; larger instances are labeled
//! upper bounds.

use nalgebra::DVector;
use serde::Serialize;
use thiserror::Error;

use crate::herm;
use crate::lp;
use crate::model::{KindTag, Model, StateVec};
use crate::rat::{self, Rat, RatMat};
use crate::tol::Tolerances;

const EXACT_SUPPORT_CAP: usize = 8;

#[derive(Debug, Error)]
pub enum EntropyError {
    #[error("state is not in the convex hull of the listed pure states")]
    NotInOmega { certificate: Vec<f64> },
    #[error("quantum state reconstruction failed (residual {0})")]
    BadGleasonState(f64),
    #[error("listed-test minimum {listed} undercuts the analytic value {analytic}")]
    Inconsistent { listed: f64, analytic: f64 },
}

/// Which measurement achieves the entropy minimum.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArgminTest {
    /// A listed test (index into the model's test list).
    Listed { test: usize },
    /// The eigenframe of the reconstructed density matrix.
    Eigenframe,
    /// The antipodal pair aligned with the state's ball direction.
    AlignedPair,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeasurementEntropy {
    pub h: f64,
    pub argmin: ArgminTest,
    /// Minimum over listed tests (equals `h` for finite models; an
    /// upper corroboration for analytic kinds).
    pub listed_min: f64,
}

/// Minimal Shannon entropy of the state over a single test.
pub fn measurement_entropy(
    model: &Model,
    alpha: &StateVec,
    tol: &Tolerances,
) -> Result<MeasurementEntropy, EntropyError> {
    let (listed_min, listed_arg) = listed_test_minimum(model, alpha);
    match model.kind {
        KindTag::Quantum => {
            let rho = density_from_values(model, &alpha.values, tol)?;
            let (eigs, _) = herm::herm_eigen(&rho);
            let h = herm::entropy_bits(eigs.as_slice());
            if listed_min < h - tol.entropy {
                return Err(EntropyError::Inconsistent {
                    listed: listed_min,
                    analytic: h,
                });
            }
            Ok(MeasurementEntropy {
                h,
                argmin: ArgminTest::Eigenframe,
                listed_min,
            })
        }
        KindTag::SpinFactor => {
            let b = ball_direction(model, &alpha.values);
            let r = b.norm().min(1.0);
            let h = herm::entropy_bits(&[(1.0 + r) / 2.0, (1.0 - r) / 2.0]);
            if listed_min < h - tol.entropy {
                return Err(EntropyError::Inconsistent {
                    listed: listed_min,
                    analytic: h,
                });
            }
            Ok(MeasurementEntropy {
                h,
                argmin: ArgminTest::AlignedPair,
                listed_min,
            })
        }
        _ => Ok(MeasurementEntropy {
            h: listed_min,
            argmin: ArgminTest::Listed { test: listed_arg },
            listed_min,
        }),
    }
}

fn listed_test_minimum(model: &Model, alpha: &StateVec) -> (f64, usize) {
    let mut best = f64::INFINITY;
    let mut arg = 0;
    for (t, test) in model.space.tests.iter().enumerate() {
        let weights: Vec<f64> = test.iter().map(|&x| alpha.values[x]).collect();
        let h = herm::entropy_bits(&weights);
        if h < best {
            best = h;
            arg = t;
        }
    }
    (best, arg)
}

/// Reconstruct the density matrix of a quantum state from its values on
/// the listed outcomes (the projector family spans, so it is unique).
pub fn density_from_values(
    model: &Model,
    values: &[f64],
    tol: &Tolerances,
) -> Result<herm::CMat, EntropyError> {
    let q = model.quantum.as_ref().expect("quantum rep");
    let n_out = model.n_outcomes();
    let d = herm::herm_dim(q.n);
    let mut e_t = nalgebra::DMatrix::zeros(n_out, d);
    for (x, p) in q.projectors.iter().enumerate() {
        let coords = herm::herm_to_coords(p);
        for j in 0..d {
            e_t[(x, j)] = coords[j];
        }
    }
    let b = DVector::from_column_slice(values);
    let svd = e_t.clone().svd(true, true);
    let c = svd
        .solve(&b, 1e-13)
        .map_err(|_| EntropyError::BadGleasonState(f64::INFINITY))?;
    let residual = (&e_t * &c - &b).norm();
    if residual > tol.sum * (1.0 + b.norm()) * 100.0 {
        return Err(EntropyError::BadGleasonState(residual));
    }
    Ok(herm::coords_to_herm(&c, q.n))
}

/// Ball direction of a spin-factor state from its outcome values.
pub fn ball_direction(model: &Model, values: &[f64]) -> DVector<f64> {
    let sp = model.spin.as_ref().expect("ball rep");
    let d = sp.d;
    let mut a = nalgebra::DMatrix::zeros(model.n_outcomes(), d);
    let mut rhs = DVector::zeros(model.n_outcomes());
    for (x, dir) in sp.outcome_dirs.iter().enumerate() {
        for k in 0..d {
            a[(x, k)] = dir[k];
        }
        rhs[x] = 2.0 * values[x] - 1.0;
    }
    a.svd(true, true)
        .solve(&rhs, 1e-13)
        .unwrap_or_else(|_| DVector::zeros(d))
}

#[derive(Debug, Clone, Serialize)]
pub struct MixingEntropy {
    pub s: f64,
    /// Indices of the pure states in the minimizing mixture (empty for
    /// analytic routes).
    pub support: Vec<usize>,
    pub weights: Vec<f64>,
    /// False when the support cap truncated the enumeration.
    pub exact: bool,
    pub analytic: bool,
}

/// Minimal Shannon entropy over convex decompositions into listed pure
/// states (exact vertex enumeration), or the spectral weights for
/// quantum and ball models.
pub fn mixing_entropy(
    model: &Model,
    alpha: &StateVec,
    tol: &Tolerances,
) -> Result<MixingEntropy, EntropyError> {
    match model.kind {
        KindTag::Quantum => {
            let rho = density_from_values(model, &alpha.values, tol)?;
            let (eigs, _) = herm::herm_eigen(&rho);
            let weights: Vec<f64> = eigs.iter().copied().filter(|&w| w > tol.zero).collect();
            Ok(MixingEntropy {
                s: herm::entropy_bits(&weights),
                support: Vec::new(),
                weights,
                exact: true,
                analytic: true,
            })
        }
        KindTag::SpinFactor => {
            let b = ball_direction(model, &alpha.values);
            let r = b.norm().min(1.0);
            let weights = vec![(1.0 + r) / 2.0, (1.0 - r) / 2.0];
            Ok(MixingEntropy {
                s: herm::entropy_bits(&weights),
                support: Vec::new(),
                weights,
                exact: true,
                analytic: true,
            })
        }
        _ => polytope_mixing_entropy(model, alpha),
    }
}

fn polytope_mixing_entropy(model: &Model, alpha: &StateVec) -> Result<MixingEntropy, EntropyError> {
    let n_states = model.pure_states.len();
    let n_out = model.n_outcomes();
    let target: Vec<Rat> = rat::vec_from_f64(&alpha.values);

    // Membership first: alpha must be a convex combination at all.
    let full = {
        let rows: Vec<Vec<Rat>> = (0..n_out)
            .map(|x| {
                (0..n_states)
                    .map(|i| rat::rat_from_f64(model.pure_states[i].values[x]))
                    .collect()
            })
            .collect();
        RatMat::from_rows(rows)
    };
    let membership = match lp::feasible_nonneg(&full, &target) {
        lp::Feasibility::Infeasible(cert) => {
            return Err(EntropyError::NotInOmega {
                certificate: rat::vec_to_f64(&cert.y),
            })
        }
        lp::Feasibility::Feasible(t) => t,
    };

    // Vertex enumeration over independent supports. The rank of the
    // state family bounds vertex supports; only supports up to the cap
    // are exhausted, larger dimensions give an upper bound.
    let rank_bound = full.rank().min(n_states);
    let exact = rank_bound <= EXACT_SUPPORT_CAP;
    let max_support = rank_bound.min(EXACT_SUPPORT_CAP);

    let mut best: Option<(f64, Vec<usize>, Vec<f64>)> = None;
    let mut stack: Vec<usize> = Vec::new();
    enumerate_supports(n_states, max_support, &mut stack, &mut |support| {
        let mut a = RatMat::zeros(n_out, support.len());
        for (j, &i) in support.iter().enumerate() {
            for x in 0..n_out {
                a[(x, j)] = rat::rat_from_f64(model.pure_states[i].values[x]);
            }
        }
        if a.rank() != support.len() {
            return; // dependent columns cannot carry a vertex
        }
        let Some(t) = a.solve(&target) else { return };
        if t.iter().any(num::Signed::is_negative) {
            return;
        }
        // solve() zero-fills free variables, so re-verify the combination.
        if a.matvec(&t) != target {
            return;
        }
        // Strip exact zeros: they carry no weight and no entropy.
        let mut sup = Vec::new();
        let mut weights = Vec::new();
        for (k, w) in t.iter().enumerate() {
            if !num::Zero::is_zero(w) {
                sup.push(support[k]);
                weights.push(rat::rat_to_f64(w));
            }
        }
        let h = herm::entropy_bits(&weights);
        let better = match &best {
            None => true,
            Some((h0, _, _)) => h < *h0,
        };
        if better {
            best = Some((h, sup, weights));
        }
    });

    // With the cap in force the enumerated supports may miss the
    // minimizer (or find nothing at all); the membership solution is a
    // further upper-bound candidate.
    if !exact {
        let mut sup = Vec::new();
        let mut weights = Vec::new();
        for (k, w) in membership.iter().enumerate() {
            if !num::Zero::is_zero(w) {
                sup.push(k);
                weights.push(rat::rat_to_f64(w));
            }
        }
        let h = herm::entropy_bits(&weights);
        if best.as_ref().is_none_or(|(h0, _, _)| h < *h0) {
            best = Some((h, sup, weights));
        }
    }
    let (s, support, weights) = best.expect("membership provides a decomposition");
    Ok(MixingEntropy {
        s,
        support,
        weights,
        exact,
        analytic: false,
    })
}

fn enumerate_supports(
    n: usize,
    max_size: usize,
    stack: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    fn rec(
        start: usize,
        n: usize,
        max_size: usize,
        stack: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize]),
    ) {
        if !stack.is_empty() {
            visit(stack);
        }
        if stack.len() == max_size {
            return;
        }
        for i in start..n {
            stack.push(i);
            rec(i + 1, n, max_size, stack, visit);
            stack.pop();
        }
    }
    rec(0, n, max_size, stack, visit);
}

#[derive(Debug, Clone, Serialize)]
pub struct StateEntropies {
    pub h: f64,
    pub s: f64,
    pub gap: f64,
    pub monoentropic: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonoentropyReport {
    pub per_state: Vec<StateEntropies>,
    pub worst_gap: f64,
    pub all_monoentropic: bool,
    /// On the sampled states: H = 0 exactly when some outcome is certain.
    pub zero_entropy_chain_ok: bool,
}

/// Evaluate |H - S| over a sample of states and check the zero-entropy
/// characterization (H = 0 iff some outcome has probability 1).
pub fn monoentropy_check(
    model: &Model,
    states: &[StateVec],
    tol: &Tolerances,
) -> Result<MonoentropyReport, EntropyError> {
    let mut per_state = Vec::with_capacity(states.len());
    let mut worst_gap = 0.0f64;
    let mut chain_ok = true;
    for alpha in states {
        let h = measurement_entropy(model, alpha, tol)?;
        let s = mixing_entropy(model, alpha, tol)?;
        let gap = (h.h - s.s).abs();
        worst_gap = worst_gap.max(gap);
        per_state.push(StateEntropies {
            h: h.h,
            s: s.s,
            gap,
            monoentropic: gap < tol.entropy,
        });
        let certain = alpha.values.iter().any(|&v| (v - 1.0).abs() <= tol.zero);
        let h_zero = h.h.abs() <= tol.entropy;
        if certain != h_zero {
            chain_ok = false;
        }
    }
    let all = per_state.iter().all(|e| e.monoentropic);
    Ok(MonoentropyReport {
        per_state,
        worst_gap,
        all_monoentropic: all,
        zero_entropy_chain_ok: chain_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn uniform_bit_has_one_bit_of_entropy() {
        let m = zoo::make_classical(2, &tols()).unwrap();
        let alpha = StateVec {
            values: vec![0.5, 0.5],
        };
        let h = measurement_entropy(&m, &alpha, &tols()).unwrap();
        assert_eq!(h.h, 1.0);
        let s = mixing_entropy(&m, &alpha, &tols()).unwrap();
        assert_eq!(s.s, 1.0);
        assert!(s.exact);
        assert_eq!(s.support, vec![0, 1]);
    }

    #[test]
    fn classical_entropies_coincide_exactly() {
        let m = zoo::make_classical(4, &tols()).unwrap();
        let alpha = StateVec {
            values: vec![0.4, 0.3, 0.2, 0.1],
        };
        let h = measurement_entropy(&m, &alpha, &tols()).unwrap();
        let s = mixing_entropy(&m, &alpha, &tols()).unwrap();
        assert_eq!(h.h, s.s);
    }

    #[test]
    fn square_bit_edge_midpoint_separates_the_entropies() {
        let m = zoo::make_square_bit(&tols()).unwrap();
        // alpha(x0) = 1, alpha(y0) = 1/2: deterministic on the first
        // test, uniform on the second.
        let alpha = StateVec {
            values: vec![1.0, 0.0, 0.5, 0.5],
        };
        let h = measurement_entropy(&m, &alpha, &tols()).unwrap();
        assert_eq!(h.h, 0.0);
        assert_eq!(h.argmin, ArgminTest::Listed { test: 0 });
        let s = mixing_entropy(&m, &alpha, &tols()).unwrap();
        assert_eq!(s.s, 1.0);
        // Unique decomposition: the two vertices of the p = 1 edge.
        assert_eq!(s.support.len(), 2);
        let report = monoentropy_check(&m, &[alpha], &tols()).unwrap();
        assert!(!report.all_monoentropic);
        assert_eq!(report.worst_gap, 1.0);
    }

    #[test]
    fn pure_states_have_zero_mixing_entropy() {
        let m = zoo::make_square_bit(&tols()).unwrap();
        for st in &m.pure_states {
            let s = mixing_entropy(&m, st, &tols()).unwrap();
            assert_eq!(s.s, 0.0);
            assert_eq!(s.support.len(), 1);
        }
    }

    #[test]
    fn state_outside_hull_is_rejected() {
        let m = zoo::make_square_bit(&tols()).unwrap();
        // Drop one vertex and ask for it back: outside the clipped hull.
        let mut clipped = m.clone();
        clipped.pure_states.truncate(3);
        let missing = &m.pure_states[3];
        let err = mixing_entropy(&clipped, missing, &tols()).unwrap_err();
        assert!(matches!(err, EntropyError::NotInOmega { .. }));
    }

    #[test]
    fn qubit_pure_state_has_zero_entropies() {
        let m = zoo::make_quantum_mub(2, &tols()).unwrap();
        let alpha = m.pure_states[0].clone();
        let h = measurement_entropy(&m, &alpha, &tols()).unwrap();
        assert!(h.h.abs() < 1e-9);
        assert_eq!(h.argmin, ArgminTest::Eigenframe);
        // The eigenframe is listed here, so the listed minimum agrees.
        assert!(h.listed_min.abs() < 1e-9);
        let s = mixing_entropy(&m, &alpha, &tols()).unwrap();
        assert!(s.s.abs() < 1e-9);
    }

    #[test]
    fn quantum_mixed_state_entropies_match_spectrum() {
        let m = zoo::make_quantum_mub(2, &tols()).unwrap();
        // 0.75 P_z0 + 0.25 P_z1: both entropies H(1/4, 3/4).
        let values: Vec<f64> = m.pure_states[0]
            .values
            .iter()
            .zip(&m.pure_states[1].values)
            .map(|(a, b)| 0.75 * a + 0.25 * b)
            .collect();
        let alpha = StateVec { values };
        let want = herm::entropy_bits(&[0.75, 0.25]);
        let h = measurement_entropy(&m, &alpha, &tols()).unwrap();
        assert!((h.h - want).abs() < 1e-10);
        // The eigenframe is the listed computational frame.
        assert!((h.listed_min - want).abs() < 1e-10);
        let s = mixing_entropy(&m, &alpha, &tols()).unwrap();
        assert!((s.s - want).abs() < 1e-10);
        let report = monoentropy_check(&m, &[alpha], &tols()).unwrap();
        assert!(report.all_monoentropic);
    }

    #[test]
    fn large_polytopes_are_labeled_upper_bounds() {
        // Nine point masses: vertex supports can reach 9 > the cap, so
        // the result is honest only as an upper bound.
        let space = crate::model::TestSpace::new(
            (0..9).map(|i| format!("o{i}")).collect(),
            vec![(0..9).collect()],
        )
        .unwrap();
        let states: Vec<Vec<f64>> = (0..9)
            .map(|i| (0..9).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let m = crate::model::Model::validate(
            space,
            states,
            None,
            crate::model::KindTag::Generic,
            &tols(),
        )
        .unwrap();
        let alpha = StateVec {
            values: vec![1.0 / 9.0; 9],
        };
        let s = mixing_entropy(&m, &alpha, &tols()).unwrap();
        assert!(!s.exact);
        // The unique decomposition here is the distribution itself, so
        // the upper bound is tight even though exactness is not claimed.
        let truth = herm::entropy_bits(&alpha.values);
        assert!(s.s >= truth - 1e-12);
        assert_eq!(s.support.len(), 9);
    }

    #[test]
    fn measurement_entropy_is_group_invariant_bit_for_bit() {
        let m = zoo::make_classical(4, &tols()).unwrap();
        let alpha = StateVec {
            values: vec![0.4, 0.3, 0.2, 0.1],
        };
        let h0 = measurement_entropy(&m, &alpha, &tols()).unwrap().h;
        let action = m.group.as_ref().unwrap();
        let crate::symmetry::GroupKind::Finite(g) = &action.kind else {
            panic!("finite group expected");
        };
        for perm in &g.elements {
            let moved = StateVec {
                values: perm.act_on_values(&alpha.values),
            };
            let h = measurement_entropy(&m, &moved, &tols()).unwrap().h;
            assert_eq!(h.to_bits(), h0.to_bits());
        }
    }
}
