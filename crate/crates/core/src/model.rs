//! Test spaces, states, and bipartite non-signaling states.
//!
//! A system is a pair: a collection of tests (finite outcome-sets, possibly
//! overlapping) together with a convex set of states given by its generating
//! pure states. Outcomes are opaque strings; tests are order-free sets kept
//! in canonical sorted form.

use serde::Serialize;
use std::collections::BTreeSet;
use thiserror::Error;

use crate::symmetry::GroupAction;
use crate::tol::Tolerances;
use crate::zoo::{QuantumRep, SpinRep};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("test {test} is empty")]
    EmptyTest { test: usize },
    #[error("outcome {outcome} belongs to no test")]
    OrphanOutcome { outcome: String },
    #[error("unknown outcome {0}")]
    UnknownOutcome(String),
    #[error("state {state} sums to {sum} on test {test} (expected 1)")]
    StateSumViolation { state: usize, test: usize, sum: f64 },
    #[error("state value {value} for outcome {outcome} outside [0,1]")]
    ValueOutOfRange { outcome: String, value: f64 },
    #[error("outcomes {x} and {y} agree on every pure state")]
    NonSeparating { x: String, y: String },
    #[error("duplicate outcome {0}")]
    DuplicateOutcome(String),
    #[error("no pure states listed")]
    NoPureStates,
    #[error(
        "marginal of outcome {outcome} differs between completing tests {test_a} and {test_b} by {deviation}"
    )]
    Signaling {
        outcome: String,
        test_a: usize,
        test_b: usize,
        deviation: f64,
    },
    #[error("product test {left}x{right} sums to {sum} (expected 1)")]
    NotNormalized { left: usize, right: usize, sum: f64 },
    #[error("negative table entry {value} at ({x},{y})")]
    NegativeEntry { x: String, y: String, value: f64 },
    #[error("underdetermined state: outcome {0} cannot be inferred")]
    Underdetermined(String),
    #[error("group action invalid: {0}")]
    Group(#[from] Box<crate::symmetry::SymmetryError>),
}

/// A finite test space: outcome names plus tests as index sets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestSpace {
    pub outcomes: Vec<String>,
    /// Each test is a sorted list of outcome indices.
    pub tests: Vec<Vec<usize>>,
    /// Common test cardinality when uniform; `None` otherwise.
    pub rank: Option<usize>,
}

impl TestSpace {
    pub fn new(outcomes: Vec<String>, tests: Vec<Vec<usize>>) -> Result<Self, ModelError> {
        let mut seen = BTreeSet::new();
        for name in &outcomes {
            if !seen.insert(name.clone()) {
                return Err(ModelError::DuplicateOutcome(name.clone()));
            }
        }
        let mut tests: Vec<Vec<usize>> = tests;
        for (t, test) in tests.iter_mut().enumerate() {
            if test.is_empty() {
                return Err(ModelError::EmptyTest { test: t });
            }
            test.sort_unstable();
            test.dedup();
        }
        let mut covered = vec![false; outcomes.len()];
        for test in &tests {
            for &x in test {
                covered[x] = true;
            }
        }
        if let Some(x) = covered.iter().position(|&c| !c) {
            return Err(ModelError::OrphanOutcome {
                outcome: outcomes[x].clone(),
            });
        }
        let rank = {
            let first = tests[0].len();
            tests.iter().all(|t| t.len() == first).then_some(first)
        };
        Ok(Self {
            outcomes,
            tests,
            rank,
        })
    }

    pub fn outcome_index(&self, name: &str) -> Result<usize, ModelError> {
        self.outcomes
            .iter()
            .position(|o| o == name)
            .ok_or_else(|| ModelError::UnknownOutcome(name.to_string()))
    }

    pub fn n_outcomes(&self) -> usize {
        self.outcomes.len()
    }

    /// Distinct outcomes lying in a common test.
    pub fn orthogonal(&self, x: usize, y: usize) -> bool {
        x != y
            && self
                .tests
                .iter()
                .any(|t| t.binary_search(&x).is_ok() && t.binary_search(&y).is_ok())
    }
}

/// A state: probabilities over outcomes, summing to 1 on every test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateVec {
    pub values: Vec<f64>,
}

impl StateVec {
    pub fn new(space: &TestSpace, values: Vec<f64>, tol: &Tolerances) -> Result<Self, ModelError> {
        assert_eq!(values.len(), space.n_outcomes());
        for (x, &v) in values.iter().enumerate() {
            if !(-tol.zero..=1.0 + tol.zero).contains(&v) {
                return Err(ModelError::ValueOutOfRange {
                    outcome: space.outcomes[x].clone(),
                    value: v,
                });
            }
        }
        let s = Self { values };
        s.check_normalized(space, usize::MAX, tol)?;
        Ok(s)
    }

    fn check_normalized(
        &self,
        space: &TestSpace,
        state_idx: usize,
        tol: &Tolerances,
    ) -> Result<(), ModelError> {
        for (t, test) in space.tests.iter().enumerate() {
            let sum: f64 = test.iter().map(|&x| self.values[x]).sum();
            if (sum - 1.0).abs() > tol.sum {
                return Err(ModelError::StateSumViolation {
                    state: state_idx,
                    test: t,
                    sum,
                });
            }
        }
        Ok(())
    }

    pub fn get(&self, x: usize) -> f64 {
        self.values[x]
    }

    pub fn approx_eq(&self, other: &StateVec, tol: f64) -> bool {
        self.values.len() == other.values.len()
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(a, b)| (a - b).abs() <= tol)
    }

    /// Complete a partially specified state by propagating test sums:
    /// any test with a single unknown outcome determines it.
    pub fn complete_from_partial(
        space: &TestSpace,
        partial: &[(usize, f64)],
        tol: &Tolerances,
    ) -> Result<Self, ModelError> {
        let n = space.n_outcomes();
        let mut values = vec![f64::NAN; n];
        for &(x, v) in partial {
            values[x] = v;
        }
        loop {
            let mut progress = false;
            for test in &space.tests {
                let unknown: Vec<usize> =
                    test.iter().copied().filter(|&x| values[x].is_nan()).collect();
                if unknown.len() == 1 {
                    let known: f64 = test
                        .iter()
                        .filter(|&&x| !values[x].is_nan())
                        .map(|&x| values[x])
                        .sum();
                    values[unknown[0]] = 1.0 - known;
                    progress = true;
                }
            }
            if !progress {
                break;
            }
        }
        if let Some(x) = values.iter().position(|v| v.is_nan()) {
            return Err(ModelError::Underdetermined(space.outcomes[x].clone()));
        }
        Self::new(space, values, tol)
    }
}

/// Analytic shortcut routing for built-in model families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KindTag {
    Generic,
    Classical,
    Quantum,
    SpinFactor,
    SquareBit,
}

/// A physical system: test space, generating pure states, optional
/// symmetry group, and optional analytic representations.
#[derive(Debug, Clone)]
pub struct Model {
    pub space: TestSpace,
    pub pure_states: Vec<StateVec>,
    pub group: Option<GroupAction>,
    pub kind: KindTag,
    pub quantum: Option<QuantumRep>,
    pub spin: Option<SpinRep>,
}

impl Model {
    /// Validate the full set of model invariants and produce a `Model`.
    pub fn validate(
        space: TestSpace,
        pure_states: Vec<Vec<f64>>,
        group: Option<GroupAction>,
        kind: KindTag,
        tol: &Tolerances,
    ) -> Result<Self, ModelError> {
        if pure_states.is_empty() {
            return Err(ModelError::NoPureStates);
        }
        let mut states = Vec::with_capacity(pure_states.len());
        for (i, values) in pure_states.into_iter().enumerate() {
            let s = StateVec { values };
            for (x, &v) in s.values.iter().enumerate() {
                if !(-tol.zero..=1.0 + tol.zero).contains(&v) {
                    return Err(ModelError::ValueOutOfRange {
                        outcome: space.outcomes[x].clone(),
                        value: v,
                    });
                }
            }
            s.check_normalized(&space, i, tol)?;
            states.push(s);
        }
        // Outcome separation: distinct outcomes must differ on some state.
        for x in 0..space.n_outcomes() {
            for y in (x + 1)..space.n_outcomes() {
                let separated = states
                    .iter()
                    .any(|s| (s.values[x] - s.values[y]).abs() > tol.zero);
                if !separated {
                    return Err(ModelError::NonSeparating {
                        x: space.outcomes[x].clone(),
                        y: space.outcomes[y].clone(),
                    });
                }
            }
        }
        let model = Self {
            space,
            pure_states: states,
            group: None,
            kind,
            quantum: None,
            spin: None,
        };
        if let Some(g) = group {
            g.verify(&model, tol).map_err(Box::new)?;
            return Ok(Self {
                group: Some(g),
                ..model
            });
        }
        Ok(model)
    }

    pub fn n_outcomes(&self) -> usize {
        self.space.n_outcomes()
    }

    /// Does the model expose a filter constructor for its cone?
    pub fn has_filter_capability(&self) -> bool {
        matches!(
            self.kind,
            KindTag::Classical | KindTag::Quantum | KindTag::SpinFactor
        )
    }
}

/// Bijection certificate for a correlating bipartite state: the support
/// inside `left x right` is the graph of `bijection`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelatingPair {
    pub left: usize,
    pub right: usize,
    /// Position-aligned with the left test: outcome `left[i]` maps to
    /// outcome `bijection[i]` of the right test.
    pub bijection: Vec<usize>,
}

/// A bipartite non-signaling state on the product of the test space with
/// itself, stored on the full outcome grid.
#[derive(Debug, Clone)]
pub struct BipartiteState {
    /// `table[x *. n + y]` = probability of the joint outcome `(x, y)`.
    pub table: Vec<f64>,
    pub n: usize,
    pub left_marginal: StateVec,
    pub right_marginal: StateVec,
    /// Conditional state of the second system given first outcome `x`,
    /// defined where the left marginal is positive.
    pub right_given_left: Vec<Option<StateVec>>,
    /// Conditional state of the first system given second outcome `y`.
    pub left_given_right: Vec<Option<StateVec>>,
}

impl BipartiteState {
    pub fn entry(&self, x: usize, y: usize) -> f64 {
        self.table[x * self.n + y]
    }
}

/// Compute marginals and conditionals of a raw joint table, verifying the
/// non-signaling property (marginals independent of the completing test)
/// and the law of total probability on every test.
pub fn marginals_and_conditionals(
    model: &Model,
    table: &[f64],
    tol: &Tolerances,
) -> Result<BipartiteState, ModelError> {
    let space = &model.space;
    let n = space.n_outcomes();
    assert_eq!(table.len(), n * n);
    for x in 0..n {
        for y in 0..n {
            let v = table[x * n + y];
            if v < -tol.zero {
                return Err(ModelError::NegativeEntry {
                    x: space.outcomes[x].clone(),
                    y: space.outcomes[y].clone(),
                    value: v,
                });
            }
        }
    }
    // Product-test normalization.
    for (ti, left) in space.tests.iter().enumerate() {
        for (tj, right) in space.tests.iter().enumerate() {
            let sum: f64 = left
                .iter()
                .flat_map(|&x| right.iter().map(move |&y| table[x * n + y]))
                .sum();
            if (sum - 1.0).abs() > tol.sum {
                return Err(ModelError::NotNormalized {
                    left: ti,
                    right: tj,
                    sum,
                });
            }
        }
    }
    // Marginals, checked across every completing test.
    let left_marginal = marginal(space, table, n, true, tol)?;
    let right_marginal = marginal(space, table, n, false, tol)?;

    let right_given_left: Vec<Option<StateVec>> = (0..n)
        .map(|x| {
            let p = left_marginal.values[x];
            (p > tol.zero).then(|| StateVec {
                values: (0..n).map(|y| table[x * n + y] / p).collect(),
            })
        })
        .collect();
    let left_given_right: Vec<Option<StateVec>> = (0..n)
        .map(|y| {
            let p = right_marginal.values[y];
            (p > tol.zero).then(|| StateVec {
                values: (0..n).map(|x| table[x * n + y] / p).collect(),
            })
        })
        .collect();

    // Law of total probability over every test on the first factor.
    for test in &space.tests {
        for y in 0..n {
            let total: f64 = test
                .iter()
                .map(|&x| match &right_given_left[x] {
                    Some(cond) => cond.values[y] * left_marginal.values[x],
                    None => table[x * n + y],
                })
                .sum();
            let dev = (total - right_marginal.values[y]).abs();
            if dev > tol.sum {
                return Err(ModelError::Signaling {
                    outcome: space.outcomes[y].clone(),
                    test_a: 0,
                    test_b: 0,
                    deviation: dev,
                });
            }
        }
    }

    Ok(BipartiteState {
        table: table.to_vec(),
        n,
        left_marginal,
        right_marginal,
        right_given_left,
        left_given_right,
    })
}

fn marginal(
    space: &TestSpace,
    table: &[f64],
    n: usize,
    left: bool,
    tol: &Tolerances,
) -> Result<StateVec, ModelError> {
    let mut values = vec![0.0; n];
    for x in 0..n {
        let mut first: Option<(usize, f64)> = None;
        for (t, test) in space.tests.iter().enumerate() {
            let sum: f64 = test
                .iter()
                .map(|&y| if left { table[x * n + y] } else { table[y * n + x] })
                .sum();
            match first {
                None => first = Some((t, sum)),
                Some((t0, s0)) => {
                    if (sum - s0).abs() > tol.sum {
                        return Err(ModelError::Signaling {
                            outcome: space.outcomes[x].clone(),
                            test_a: t0,
                            test_b: t,
                            deviation: (sum - s0).abs(),
                        });
                    }
                }
            }
        }
        values[x] = first.expect("test space has at least one test").1;
    }
    Ok(StateVec { values })
}

/// Search all test pairs for a bijection whose graph carries the whole
/// support of `omega`. Returns the first certificate in listed order.
pub fn is_correlating(
    model: &Model,
    omega: &BipartiteState,
    tol: &Tolerances,
) -> Option<CorrelatingPair> {
    let space = &model.space;
    let n = omega.n;
    for (ei, left) in space.tests.iter().enumerate() {
        for (fi, right) in space.tests.iter().enumerate() {
            if left.len() != right.len() {
                continue;
            }
            match matching_for_pair(omega, left, right, n, tol) {
                Some(bijection) => {
                    return Some(CorrelatingPair {
                        left: ei,
                        right: fi,
                        bijection,
                    })
                }
                None => continue,
            }
        }
    }
    None
}

/// Greedy construction of the support matching for one pair of tests.
fn matching_for_pair(
    omega: &BipartiteState,
    left: &[usize],
    right: &[usize],
    n: usize,
    tol: &Tolerances,
) -> Option<Vec<usize>> {
    let mut assignment: Vec<Option<usize>> = vec![None; left.len()];
    let mut used = vec![false; right.len()];
    for (i, &x) in left.iter().enumerate() {
        if omega.left_marginal.values[x] <= tol.zero {
            continue;
        }
        let support: Vec<usize> = right
            .iter()
            .enumerate()
            .filter(|&(_, &y)| omega.table[x * n + y] > tol.zero)
            .map(|(j, _)| j)
            .collect();
        match support.as_slice() {
            [j] if !used[*j] => {
                assignment[i] = Some(*j);
                used[*j] = true;
            }
            _ => return None,
        }
    }
    // Fill mass-free rows with unused columns, ascending.
    let mut free = (0..right.len()).filter(|&j| !used[j]);
    let bijection: Vec<usize> = assignment
        .into_iter()
        .map(|slot| match slot {
            Some(j) => right[j],
            None => right[free.next().expect("bijection fill")],
        })
        .collect();
    Some(bijection)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    pub(crate) fn classical_bit() -> Model {
        let space = TestSpace::new(vec!["a".into(), "b".into()], vec![vec![0, 1]]).unwrap();
        Model::validate(
            space,
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            None,
            KindTag::Classical,
            &tol(),
        )
        .unwrap()
    }

    pub(crate) fn square_bit_space() -> TestSpace {
        TestSpace::new(
            vec!["x0".into(), "x1".into(), "y0".into(), "y1".into()],
            vec![vec![0, 1], vec![2, 3]],
        )
        .unwrap()
    }

    fn square_bit() -> Model {
        // Vertices (p, q) of the square, as values on (x0, x1, y0, y1).
        let vertex = |p: f64, q: f64| vec![p, 1.0 - p, q, 1.0 - q];
        Model::validate(
            square_bit_space(),
            vec![
                vertex(0.0, 0.0),
                vertex(1.0, 0.0),
                vertex(0.0, 1.0),
                vertex(1.0, 1.0),
            ],
            None,
            KindTag::SquareBit,
            &tol(),
        )
        .unwrap()
    }

    #[test]
    fn classical_bit_validates_with_rank_two() {
        let m = classical_bit();
        assert_eq!(m.space.rank, Some(2));
    }

    #[test]
    fn bad_state_sum_rejected() {
        let space = TestSpace::new(vec!["a".into(), "b".into()], vec![vec![0, 1]]).unwrap();
        let err = Model::validate(
            space,
            vec![vec![0.6, 0.6]],
            None,
            KindTag::Generic,
            &tol(),
        )
        .unwrap_err();
        match err {
            ModelError::StateSumViolation { sum, .. } => assert!((sum - 1.2).abs() < 1e-12),
            other => panic!("expected StateSumViolation, got {other}"),
        }
    }

    #[test]
    fn square_bit_validates_with_rank_two() {
        let m = square_bit();
        assert_eq!(m.space.rank, Some(2));
        assert_eq!(m.pure_states.len(), 4);
    }

    #[test]
    fn empty_test_rejected() {
        let err = TestSpace::new(vec!["a".into()], vec![vec![]]).unwrap_err();
        assert!(matches!(err, ModelError::EmptyTest { test: 0 }));
    }

    #[test]
    fn non_separating_rejected() {
        let space = TestSpace::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![vec![0, 1, 2]],
        )
        .unwrap();
        // b and c get identical values in every listed state.
        let err = Model::validate(
            space,
            vec![vec![0.5, 0.25, 0.25], vec![0.0, 0.5, 0.5]],
            None,
            KindTag::Generic,
            &tol(),
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::NonSeparating { .. }));
    }

    #[test]
    fn orthogonality() {
        let m = classical_bit();
        assert!(m.space.orthogonal(0, 1));
        assert!(!m.space.orthogonal(0, 0));
        let sq = square_bit();
        // x0 and y0 never share a test.
        assert!(!sq.space.orthogonal(0, 2));
        assert!(sq.space.orthogonal(2, 3));
    }

    #[test]
    fn product_of_uniform_bits_has_uniform_conditionals() {
        let m = classical_bit();
        let table = vec![0.25; 4];
        let om = marginals_and_conditionals(&m, &table, &tol()).unwrap();
        assert!(om
            .left_marginal
            .approx_eq(&StateVec { values: vec![0.5, 0.5] }, 1e-12));
        let cond = om.right_given_left[0].as_ref().unwrap();
        assert!(cond.approx_eq(&StateVec { values: vec![0.5, 0.5] }, 1e-12));
        assert!(is_correlating(&m, &om, &tol()).is_none());
    }

    #[test]
    fn perfectly_correlated_bit() {
        let m = classical_bit();
        let table = vec![0.5, 0.0, 0.0, 0.5];
        let om = marginals_and_conditionals(&m, &table, &tol()).unwrap();
        let cond = om.right_given_left[0].as_ref().unwrap();
        assert!(cond.approx_eq(&StateVec { values: vec![1.0, 0.0] }, 1e-12));
        let pair = is_correlating(&m, &om, &tol()).unwrap();
        assert_eq!(pair.left, 0);
        assert_eq!(pair.right, 0);
        assert_eq!(pair.bijection, vec![0, 1]);
    }

    #[test]
    fn signaling_table_rejected() {
        let m = square_bit();
        let n = 4;
        // Every product block sums to 1, but the marginal of x0 over
        // {x0,x1} is 0.5 while over {y0,y1} it is 0.7.
        let mut table = vec![0.0; n * n];
        let mut put = |x: usize, y: usize, v: f64| table[x * n + y] = v;
        put(0, 0, 0.5);
        put(1, 1, 0.5);
        put(0, 2, 0.7);
        put(1, 3, 0.3);
        for x in [2, 3] {
            for y in 0..4 {
                put(x, y, 0.25);
            }
        }
        let err = marginals_and_conditionals(&m, &table, &tol()).unwrap_err();
        match err {
            ModelError::Signaling { deviation, .. } => {
                assert!((deviation - 0.2).abs() < 1e-12)
            }
            other => panic!("expected Signaling, got {other}"),
        }
    }

    #[test]
    fn zeroing_off_matching_entries_preserves_correlation() {
        let m = classical_bit();
        let mut table = vec![0.5, 1e-13, 0.0, 0.5 - 1e-13];
        let om = marginals_and_conditionals(&m, &table, &tol()).unwrap();
        assert!(is_correlating(&m, &om, &tol()).is_some());
        table[1] = 0.0;
        table[3] = 0.5;
        let om = marginals_and_conditionals(&m, &table, &tol()).unwrap();
        assert!(is_correlating(&m, &om, &tol()).is_some());
    }

    #[test]
    fn partial_state_completion() {
        let space = square_bit_space();
        let idx_x0 = space.outcome_index("x0").unwrap();
        let idx_y0 = space.outcome_index("y0").unwrap();
        let s =
            StateVec::complete_from_partial(&space, &[(idx_x0, 1.0), (idx_y0, 0.5)], &tol())
                .unwrap();
        assert_eq!(s.values, vec![1.0, 0.0, 0.5, 0.5]);
        let err = StateVec::complete_from_partial(&space, &[(idx_x0, 1.0)], &tol()).unwrap_err();
        assert!(matches!(err, ModelError::Underdetermined(_)));
    }
}
