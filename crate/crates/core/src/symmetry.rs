//! Group actions on models and invariant inner products.
//!
//! Finite groups are stored fully closed after a closure pass; the
//! unitary and orthogonal groups are analytic tags whose invariance
//! claims are corroborated by seeded Haar sampling. Averaging the
//! evaluation of effects over the orbit of a designated pure state
//! yields the canonical invariant inner product; for finite groups with
//! rational data this is computed in exact rational arithmetic.

use nalgebra::{DMatrix, DVector};
use num::{One, Signed, Zero};
use rand::SeedableRng;
use serde::Serialize;
use std::collections::{HashSet, VecDeque};
use thiserror::Error;

use crate::herm;
use crate::linrep::LinearRep;
use crate::model::{KindTag, Model};
use crate::rat::{self, Rat, RatMat};
use crate::tol::Tolerances;

pub const CLOSURE_BUDGET: usize = 1_000_000;
pub const FULL_SYMMETRY_BUDGET: usize = 1_000_000;
pub const ANALYTIC_INVARIANCE_SAMPLES: usize = 200;

#[derive(Debug, Error)]
pub enum SymmetryError {
    #[error("element {0} is not a permutation of the outcome set")]
    NotPermutation(usize),
    #[error("group closure exceeded budget of {0} elements")]
    ClosureBudget(usize),
    #[error("group element {element} does not map tests to tests")]
    ElementBreaksTests { element: usize },
    #[error("group element {element} does not map pure states to pure states")]
    ElementBreaksStates { element: usize },
    #[error("designated base state index {0} out of range")]
    BaseStateOutOfRange(usize),
    #[error("full-symmetry check needs {needed} bijection lookups, budget is {budget}")]
    TooLarge { needed: usize, budget: usize },
    #[error("averaged form is degenerate; kernel vector {kernel:?}")]
    Degenerate { kernel: Vec<f64> },
    #[error("model has no group action")]
    NoGroup,
    #[error("gram assembly inconsistent at outcome pair ({x}, {y})")]
    GramInconsistent { x: usize, y: usize },
    #[error("order-unit norm is {got}, expected exactly 1")]
    UnitNormMismatch { got: f64 },
    #[error("invariance defect {defect} exceeds tolerance {tol}")]
    NotInvariant { defect: f64, tol: f64 },
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("gram matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("inner-product construction not available for this model kind")]
    NoConstruction,
}

/// A permutation of the outcome set, `map[i]` = image of outcome `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Perm(pub Vec<usize>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n).collect())
    }

    pub fn is_valid(&self, n: usize) -> bool {
        if self.0.len() != n {
            return false;
        }
        let mut seen = vec![false; n];
        for &x in &self.0 {
            if x >= n || seen[x] {
                return false;
            }
            seen[x] = true;
        }
        true
    }

    /// `(self . other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&x| self.0[x]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Perm(inv)
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }

    /// Transformed state: `(g a)(x) = a(g^{-1} x)`.
    pub fn act_on_values(&self, values: &[f64]) -> Vec<f64> {
        let inv = self.inverse();
        (0..values.len()).map(|x| values[inv.apply(x)]).collect()
    }
}

/// A finite group of outcome permutations, fully closed.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    pub elements: Vec<Perm>,
}

impl FiniteGroup {
    /// Close a generator list under composition (budgeted).
    pub fn from_generators(
        generators: &[Perm],
        n_outcomes: usize,
        budget: usize,
    ) -> Result<Self, SymmetryError> {
        for (i, g) in generators.iter().enumerate() {
            if !g.is_valid(n_outcomes) {
                return Err(SymmetryError::NotPermutation(i));
            }
        }
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        let mut elements = Vec::new();
        let mut queue = VecDeque::new();
        let id = Perm::identity(n_outcomes);
        seen.insert(id.0.clone());
        elements.push(id.clone());
        queue.push_back(id);
        while let Some(p) = queue.pop_front() {
            for g in generators {
                let q = g.compose(&p);
                if seen.insert(q.0.clone()) {
                    if elements.len() >= budget {
                        return Err(SymmetryError::ClosureBudget(budget));
                    }
                    elements.push(q.clone());
                    queue.push_back(q);
                }
            }
        }
        // Deterministic element order: identity first, then sorted.
        elements[1..].sort_by(|a, b| a.0.cmp(&b.0));
        Ok(Self { elements })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

#[derive(Debug, Clone)]
pub enum GroupKind {
    Finite(FiniteGroup),
    /// Unitary group of an `n`-dimensional Hilbert space (analytic).
    Unitary { n: usize },
    /// Orthogonal group acting on ball directions in `R^d` (analytic).
    Orthogonal { d: usize },
}

#[derive(Debug, Clone)]
pub struct GroupAction {
    pub kind: GroupKind,
    /// Designated pure state for orbit constructions (first listed).
    pub base_state: usize,
    /// Seed for Haar sampling on analytic groups.
    pub seed: u64,
}

impl GroupAction {
    pub fn finite(group: FiniteGroup) -> Self {
        Self {
            kind: GroupKind::Finite(group),
            base_state: 0,
            seed: 0,
        }
    }

    pub fn is_analytic(&self) -> bool {
        !matches!(self.kind, GroupKind::Finite(_))
    }

    /// Check the action invariants against a model: every element maps
    /// tests to tests and pure states to pure states.
    pub fn verify(&self, model: &Model, tol: &Tolerances) -> Result<(), SymmetryError> {
        if self.base_state >= model.pure_states.len() {
            return Err(SymmetryError::BaseStateOutOfRange(self.base_state));
        }
        let GroupKind::Finite(group) = &self.kind else {
            return Ok(());
        };
        let tests: HashSet<Vec<usize>> = model.space.tests.iter().cloned().collect();
        for (gi, g) in group.elements.iter().enumerate() {
            if !g.is_valid(model.n_outcomes()) {
                return Err(SymmetryError::NotPermutation(gi));
            }
            for test in &model.space.tests {
                let mut image: Vec<usize> = test.iter().map(|&x| g.apply(x)).collect();
                image.sort_unstable();
                if !tests.contains(&image) {
                    return Err(SymmetryError::ElementBreaksTests { element: gi });
                }
            }
            for state in &model.pure_states {
                let moved = g.act_on_values(&state.values);
                let matched = model.pure_states.iter().any(|s| {
                    s.values
                        .iter()
                        .zip(&moved)
                        .all(|(a, b)| (a - b).abs() <= tol.zero)
                });
                if !matched {
                    return Err(SymmetryError::ElementBreaksStates { element: gi });
                }
            }
        }
        Ok(())
    }
}

/// Witness of a bijection between two tests that no group element
/// implements.
#[derive(Debug, Clone, Serialize)]
pub struct UnrealizedBijection {
    pub left_test: usize,
    pub right_test: usize,
    /// Pairs (outcome of left test, prescribed image in right test).
    pub map: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FullSymmetryOutcome {
    pub holds: bool,
    pub uniform_rank: bool,
    pub analytic: bool,
    pub witness: Option<UnrealizedBijection>,
}

/// Full symmetry: all tests share cardinality and every bijection
/// between two tests is realized by a group element.
pub fn check_full_symmetry(
    model: &Model,
    action: &GroupAction,
    budget: usize,
) -> Result<FullSymmetryOutcome, SymmetryError> {
    match &action.kind {
        GroupKind::Unitary { .. } | GroupKind::Orthogonal { .. } => Ok(FullSymmetryOutcome {
            // Any bijection between orthonormal frames extends to a
            // unitary; rotations map antipodal direction pairs onto each
            // other. Both actions are fully symmetric.
            holds: true,
            uniform_rank: model.space.rank.is_some(),
            analytic: true,
            witness: None,
        }),
        GroupKind::Finite(group) => {
            let Some(rank) = model.space.rank else {
                return Ok(FullSymmetryOutcome {
                    holds: false,
                    uniform_rank: false,
                    analytic: false,
                    witness: None,
                });
            };
            let n_tests = model.space.tests.len();
            let needed = factorial(rank).saturating_mul(n_tests * n_tests);
            if needed > budget {
                return Err(SymmetryError::TooLarge { needed, budget });
            }
            for left in &model.space.tests {
                for right in &model.space.tests {
                    for sigma in permutations(rank) {
                        let realized = group.elements.iter().any(|g| {
                            left.iter()
                                .enumerate()
                                .all(|(i, &x)| g.apply(x) == right[sigma[i]])
                        });
                        if !realized {
                            let li = model.space.tests.iter().position(|t| t == left).unwrap();
                            let ri = model.space.tests.iter().position(|t| t == right).unwrap();
                            return Ok(FullSymmetryOutcome {
                                holds: false,
                                uniform_rank: true,
                                analytic: false,
                                witness: Some(UnrealizedBijection {
                                    left_test: li,
                                    right_test: ri,
                                    map: left
                                        .iter()
                                        .enumerate()
                                        .map(|(i, &x)| (x, right[sigma[i]]))
                                        .collect(),
                                }),
                            });
                        }
                    }
                }
            }
            Ok(FullSymmetryOutcome {
                holds: true,
                uniform_rank: true,
                analytic: false,
                witness: None,
            })
        }
    }
}

/// Transitivity on pure states: the orbit of the designated base state
/// covers every listed pure state.
pub fn check_transitive_pure(model: &Model, action: &GroupAction, tol: &Tolerances) -> bool {
    match &action.kind {
        // The unitary group is transitive on rank-one projections, the
        // orthogonal group on ball boundary directions.
        GroupKind::Unitary { .. } | GroupKind::Orthogonal { .. } => true,
        GroupKind::Finite(group) => {
            let base = &model.pure_states[action.base_state];
            let mut hit = vec![false; model.pure_states.len()];
            for g in &group.elements {
                let moved = g.act_on_values(&base.values);
                for (i, s) in model.pure_states.iter().enumerate() {
                    if s.values
                        .iter()
                        .zip(&moved)
                        .all(|(a, b)| (a - b).abs() <= tol.zero)
                    {
                        hit[i] = true;
                    }
                }
            }
            hit.iter().all(|&h| h)
        }
    }
}

/// Transitivity on ordered pairs of orthogonal outcomes.
pub fn is_two_symmetric(model: &Model, action: &GroupAction) -> bool {
    match &action.kind {
        GroupKind::Unitary { .. } | GroupKind::Orthogonal { .. } => true,
        GroupKind::Finite(group) => {
            let n = model.n_outcomes();
            let mut pairs = Vec::new();
            for x in 0..n {
                for y in 0..n {
                    if model.space.orthogonal(x, y) {
                        pairs.push((x, y));
                    }
                }
            }
            let Some(&(x0, y0)) = pairs.first() else {
                return true;
            };
            pairs.iter().all(|&(x, y)| {
                group
                    .elements
                    .iter()
                    .any(|g| g.apply(x0) == x && g.apply(y0) == y)
            })
        }
    }
}

fn factorial(k: usize) -> usize {
    (1..=k).product::<usize>().max(1)
}

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // next_permutation
        let Some(i) = (0..k.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..k).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
    }
    out
}

/// Verification flags carried by an inner product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IpFlags {
    pub positive_definite: bool,
    pub positive_on_cone: bool,
    pub invariant: bool,
    pub minimizing: Option<bool>,
}

/// A symmetric bilinear form on effect coordinates.
#[derive(Debug, Clone)]
pub struct InnerProduct {
    pub gram: DMatrix<f64>,
    pub gram_exact: Option<RatMat>,
    pub flags: IpFlags,
    /// Parameter when the form is a member of the one-parameter family
    /// on Hermitian operator coordinates.
    pub lambda: Option<f64>,
}

impl InnerProduct {
    pub fn standard(dim: usize) -> Self {
        Self {
            gram: DMatrix::identity(dim, dim),
            gram_exact: Some(RatMat::identity(dim)),
            flags: IpFlags {
                positive_definite: true,
                positive_on_cone: false,
                invariant: false,
                minimizing: None,
            },
            lambda: None,
        }
    }

    pub fn from_gram(gram: DMatrix<f64>) -> Result<Self, SymmetryError> {
        let n = gram.nrows();
        for i in 0..n {
            for j in 0..n {
                if (gram[(i, j)] - gram[(j, i)]).abs() > 1e-12 {
                    return Err(SymmetryError::NotSymmetric);
                }
            }
        }
        if gram.clone().cholesky().is_none() {
            return Err(SymmetryError::NotPositiveDefinite);
        }
        Ok(Self {
            gram,
            gram_exact: None,
            flags: IpFlags {
                positive_definite: true,
                positive_on_cone: false,
                invariant: false,
                minimizing: None,
            },
            lambda: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn pair(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        (a.transpose() * &self.gram * b)[(0, 0)]
    }

    pub fn norm(&self, a: &DVector<f64>) -> f64 {
        self.pair(a, a).max(0.0).sqrt()
    }

    pub fn pair_exact(&self, a: &[Rat], b: &[Rat]) -> Rat {
        let g = self.gram_exact_or_convert();
        rat::dot(&g.matvec(b), a)
    }

    /// Exact gram: stored exact form, or the lossless conversion of the
    /// f64 entries.
    pub fn gram_exact_or_convert(&self) -> RatMat {
        match &self.gram_exact {
            Some(g) => g.clone(),
            None => RatMat::from_f64(
                self.gram.nrows(),
                self.gram.ncols(),
                self.gram.transpose().as_slice(),
            ),
        }
    }
}

/// The canonical invariant inner product. For finite groups: exact
/// orbit averaging `<a,b> = (1/|G|) sum_g a(g a0) b(g a0)` assembled on
/// effect coordinates. Analytic kinds return the closed forms of the
/// corresponding group averages.
pub fn canonical_inner_product(
    model: &Model,
    rep: &LinearRep,
    tol: &Tolerances,
    seed: u64,
) -> Result<InnerProduct, SymmetryError> {
    let action = model.group.as_ref().ok_or(SymmetryError::NoGroup)?;
    match &action.kind {
        GroupKind::Finite(group) => finite_canonical(model, rep, action, group),
        GroupKind::Unitary { n } => {
            // Closed form of the Haar average over rank-one projections:
            // the family member with lambda = 1/(n+1).
            let lam = Rat::new(1.into(), ((*n as i64) + 1).into());
            let mut ip = lambda_family_ip(*n, &lam)?;
            corroborate_invariance_unitary(&mut ip, *n, seed, tol)?;
            Ok(ip)
        }
        GroupKind::Orthogonal { d } => {
            // Average of (1 + x.gb)(1 + y.gb)/4 over the sphere:
            // 1/4 + (x.y)/(4d); gram diag(1, I/d) on (t, w) coordinates.
            let mut gram_exact = RatMat::identity(d + 1);
            for i in 1..=*d {
                gram_exact[(i, i)] = Rat::new(1.into(), (*d as i64).into());
            }
            let gram = DMatrix::from_fn(d + 1, d + 1, |i, j| {
                if i == j {
                    if i == 0 {
                        1.0
                    } else {
                        1.0 / *d as f64
                    }
                } else {
                    0.0
                }
            });
            let mut ip = InnerProduct {
                gram,
                gram_exact: Some(gram_exact),
                flags: IpFlags {
                    positive_definite: true,
                    positive_on_cone: true,
                    invariant: true,
                    minimizing: None,
                },
                lambda: None,
            };
            corroborate_invariance_orthogonal(&mut ip, *d, seed, tol)?;
            Ok(ip)
        }
    }
}

/// The inner product each model kind uses for its verification pipeline.
///
/// Finite kinds take the canonical group average. Quantum models use the
/// normalized trace form (the lambda = 1 family member) and ball models
/// the Euclidean form on (t, w) coordinates: these are the invariant,
/// minimizing choices under which the effect cone is self-dual, which is
/// what the downstream certificates ask of the model.
pub fn pipeline_inner_product(
    model: &Model,
    rep: &LinearRep,
    tol: &Tolerances,
    seed: u64,
) -> Result<InnerProduct, SymmetryError> {
    match model.kind {
        KindTag::Quantum => {
            let n = model.quantum.as_ref().expect("quantum rep").n;
            let mut ip = lambda_family_ip(n, &Rat::one())?;
            corroborate_invariance_unitary(&mut ip, n, seed, tol)?;
            Ok(ip)
        }
        KindTag::SpinFactor => {
            let d = model.spin.as_ref().expect("spin rep").d;
            let mut ip = InnerProduct::standard(d + 1);
            ip.flags.positive_on_cone = true; // Lorentz cone is self-dual under the dot product
            ip.flags.invariant = true;
            corroborate_invariance_orthogonal(&mut ip, d, seed, tol)?;
            Ok(ip)
        }
        _ => canonical_inner_product(model, rep, tol, seed),
    }
}

/// Member of the invariant family on Hermitian operator coordinates:
/// `<s1 + a0, t1 + b0> = st + (lambda/n) Tr(a0 b0)`, i.e. the gram
/// `(1/n)(e e^T + lambda P0)` with `e` the identity direction.
pub fn lambda_family_ip(n: usize, lambda: &Rat) -> Result<InnerProduct, SymmetryError> {
    let d = herm::herm_dim(n);
    let n_rat = Rat::new((n as i64).into(), 1.into());
    let inv_n = Rat::new(1.into(), (n as i64).into());
    // e e^T has entry 1/n at (i,i),(j,j) pairs of diagonal units and 0
    // elsewhere; P0 = I - e e^T. Everything stays rational.
    let mut gram_exact = RatMat::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let ee = if i < n && j < n {
                &inv_n * Rat::one()
            } else {
                Rat::zero()
            };
            let p0 = if i == j { Rat::one() - &ee } else { -ee.clone() };
            gram_exact[(i, j)] = (&ee + lambda * &p0) / &n_rat;
        }
    }
    if !gram_exact.is_positive_definite() {
        // Retain the matrix; the caller decides what a non-positive
        // member means. Flag it honestly.
        let gram = DMatrix::from_fn(d, d, |i, j| rat::rat_to_f64(&gram_exact[(i, j)]));
        return Ok(InnerProduct {
            gram,
            gram_exact: Some(gram_exact),
            flags: IpFlags {
                positive_definite: false,
                positive_on_cone: false,
                invariant: true,
                minimizing: Some(false),
            },
            lambda: Some(rat::rat_to_f64(lambda)),
        });
    }
    let gram = DMatrix::from_fn(d, d, |i, j| rat::rat_to_f64(&gram_exact[(i, j)]));
    let positive = lambda.is_positive() && *lambda <= Rat::one();
    Ok(InnerProduct {
        gram,
        gram_exact: Some(gram_exact),
        flags: IpFlags {
            positive_definite: true,
            positive_on_cone: positive,
            invariant: true,
            minimizing: Some(positive),
        },
        lambda: Some(rat::rat_to_f64(lambda)),
    })
}

fn finite_canonical(
    model: &Model,
    rep: &LinearRep,
    action: &GroupAction,
    group: &FiniteGroup,
) -> Result<InnerProduct, SymmetryError> {
    let n = model.n_outcomes();
    let base = rat::vec_from_f64(&model.pure_states[action.base_state].values);
    let order = Rat::new((group.order() as i64).into(), 1.into());

    // Pairwise averages over the orbit: s_xy = (1/|G|) sum_g a0(g^-1 x) a0(g^-1 y).
    let mut s_full = RatMat::zeros(n, n);
    for g in &group.elements {
        let inv = g.inverse();
        let moved: Vec<&Rat> = (0..n).map(|x| &base[inv.apply(x)]).collect();
        for x in 0..n {
            if moved[x].is_zero() {
                continue;
            }
            for y in 0..n {
                let add = moved[x] * moved[y];
                s_full[(x, y)] += add;
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            s_full[(x, y)] = &s_full[(x, y)] / &order;
            // Positivity on the cone is pointwise: every term of the
            // average is a product of probabilities.
            debug_assert!(!s_full[(x, y)].is_negative());
        }
    }

    // Assemble the gram on effect coordinates from a basis of outcomes.
    let eff = rep
        .effect_coords_exact
        .as_ref()
        .expect("finite models carry exact effect coordinates");
    let d = rep.dim;
    let basis = &rep.basis_outcomes;
    let e_b = {
        let rows: Vec<Vec<Rat>> = (0..d)
            .map(|i| basis.iter().map(|&x| eff[x][i].clone()).collect())
            .collect();
        RatMat::from_rows(rows) // columns are e(b_j)
    };
    let s_b = {
        let rows: Vec<Vec<Rat>> = basis
            .iter()
            .map(|&bi| basis.iter().map(|&bj| s_full[(bi, bj)].clone()).collect())
            .collect();
        RatMat::from_rows(rows)
    };
    let e_inv = e_b.inverse().ok_or_else(|| SymmetryError::Degenerate {
        kernel: Vec::new(),
    })?;
    let gram_exact = e_inv.transpose().matmul(&s_b).matmul(&e_inv);

    // The assembled form must reproduce every pairwise average.
    for x in 0..n {
        for y in 0..n {
            let got = rat::dot(&gram_exact.matvec(&eff[y]), &eff[x]);
            if got != s_full[(x, y)] {
                return Err(SymmetryError::GramInconsistent { x, y });
            }
        }
    }
    // Positive definiteness; on failure report an exact kernel vector.
    if !gram_exact.is_positive_definite() {
        let ns = gram_exact.nullspace();
        let kernel = ns.first().map(|v| rat::vec_to_f64(v)).unwrap_or_default();
        return Err(SymmetryError::Degenerate { kernel });
    }
    // <u, u> = 1, exactly.
    let unit = rep
        .unit_exact
        .as_ref()
        .expect("finite models carry the exact order unit");
    let uu = rat::dot(&gram_exact.matvec(unit), unit);
    if uu != Rat::one() {
        return Err(SymmetryError::UnitNormMismatch {
            got: rat::rat_to_f64(&uu),
        });
    }
    // Exact invariance: A_g^T M A_g = M for every element.
    for g in &group.elements {
        let a_g = effect_action_exact(rep, g)?;
        let lhs = a_g.transpose().matmul(&gram_exact).matmul(&a_g);
        if lhs != gram_exact {
            return Err(SymmetryError::NotInvariant {
                defect: f64::NAN,
                tol: 0.0,
            });
        }
    }

    let gram = DMatrix::from_fn(d, d, |i, j| rat::rat_to_f64(&gram_exact[(i, j)]));
    Ok(InnerProduct {
        gram,
        gram_exact: Some(gram_exact),
        flags: IpFlags {
            positive_definite: true,
            positive_on_cone: true,
            invariant: true,
            minimizing: None,
        },
        lambda: None,
    })
}

/// Exact matrix of the effect action `e(x) -> e(g x)` on coordinates.
pub fn effect_action_exact(rep: &LinearRep, g: &Perm) -> Result<RatMat, SymmetryError> {
    let eff = rep
        .effect_coords_exact
        .as_ref()
        .expect("exact effect coordinates required");
    let d = rep.dim;
    let basis = &rep.basis_outcomes;
    let e_b_rows: Vec<Vec<Rat>> = (0..d)
        .map(|i| basis.iter().map(|&x| eff[x][i].clone()).collect())
        .collect();
    let e_b = RatMat::from_rows(e_b_rows);
    let img_rows: Vec<Vec<Rat>> = (0..d)
        .map(|i| basis.iter().map(|&x| eff[g.apply(x)][i].clone()).collect())
        .collect();
    let img = RatMat::from_rows(img_rows);
    let e_inv = e_b.inverse().ok_or(SymmetryError::Degenerate {
        kernel: Vec::new(),
    })?;
    let a_g = img.matmul(&e_inv);
    // The linear extension must be consistent on every outcome.
    for (x, ex) in eff.iter().enumerate() {
        let got = a_g.matvec(ex);
        if got != eff[g.apply(x)] {
            return Err(SymmetryError::GramInconsistent { x, y: g.apply(x) });
        }
    }
    Ok(a_g)
}

fn corroborate_invariance_unitary(
    ip: &mut InnerProduct,
    n: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<(), SymmetryError> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..ANALYTIC_INVARIANCE_SAMPLES {
        let u = herm::haar_unitary(n, &mut rng);
        let t = herm::conj_action(&u);
        let defect = (t.transpose() * &ip.gram * &t - &ip.gram).amax();
        worst = worst.max(defect);
    }
    if worst > tol.inv {
        return Err(SymmetryError::NotInvariant {
            defect: worst,
            tol: tol.inv,
        });
    }
    ip.flags.invariant = true;
    Ok(())
}

fn corroborate_invariance_orthogonal(
    ip: &mut InnerProduct,
    d: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<(), SymmetryError> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..ANALYTIC_INVARIANCE_SAMPLES {
        let r = herm::haar_orthogonal(d, &mut rng);
        let mut t = DMatrix::identity(d + 1, d + 1);
        t.view_mut((1, 1), (d, d)).copy_from(&r);
        let defect = (t.transpose() * &ip.gram * &t - &ip.gram).amax();
        worst = worst.max(defect);
    }
    if worst > tol.inv {
        return Err(SymmetryError::NotInvariant {
            defect: worst,
            tol: tol.inv,
        });
    }
    ip.flags.invariant = true;
    Ok(())
}


#[cfg(test)]
mod degenerate_tests {
    use super::*;
    use crate::linrep::build_linear_rep;
    use crate::zoo;

    #[test]
    fn trivial_group_average_is_degenerate() {
        // The orbit of the base state under the trivial group is a
        // single point, so the averaged form has a kernel.
        let tol = Tolerances::default();
        let mut m = zoo::make_classical(3, &tol).unwrap();
        m.group = Some(GroupAction::finite(FiniteGroup {
            elements: vec![Perm::identity(3)],
        }));
        let rep = build_linear_rep(&m, &tol).unwrap();
        let err = canonical_inner_product(&m, &rep, &tol, 0).unwrap_err();
        match err {
            SymmetryError::Degenerate { kernel } => assert!(!kernel.is_empty()),
            other => panic!("expected Degenerate, got {other}"),
        }
    }
}
