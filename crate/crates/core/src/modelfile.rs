//! The model file format.
//!
//! Structured JSON with fields `outcomes` (list of strings), `tests`
//! (list of lists of outcome names), `pure_states` (list of
//! outcome-to-number maps; numbers may be JSON numbers or "p/q"
//! fraction strings), optional `group`, and optional `kind`. Unknown
//! fields are rejected. Values are held as f64; fraction strings are
//! converted on parse.
//!
//! Finite groups are given as generator permutations (outcome-to-
//! outcome maps, missing outcomes fixed) and closed on load. The
//! analytic group tags parse but are rejected semantically: analytic
//! routes need the operator or ball data that only the built-in zoo
//! constructors carry.

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use crate::model::{KindTag, Model, ModelError, TestSpace};
use crate::rat;
use crate::symmetry::{FiniteGroup, GroupAction, Perm, SymmetryError, CLOSURE_BUDGET};
use crate::tol::Tolerances;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown outcome name {0:?}")]
    UnknownOutcome(String),
    #[error("invalid fraction {0:?} (expected \"p/q\")")]
    BadFraction(String),
    #[error("group needs exactly one of `permutations` or `analytic`")]
    AmbiguousGroup,
    #[error("analytic group {0:?} requires operator or ball data; use a zoo model (quantum:n, spin:d)")]
    AnalyticGroupUnsupported(String),
    #[error("unsupported kind {0:?}; files may declare \"generic\" or \"classical\" (quantum:n, spin:d and square-bit are built in)")]
    UnsupportedKind(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    outcomes: Vec<String>,
    tests: Vec<Vec<String>>,
    pure_states: Vec<BTreeMap<String, Value>>,
    #[serde(default)]
    group: Option<GroupSpec>,
    #[serde(default)]
    kind: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Value {
    Num(f64),
    Frac(String),
}

impl Value {
    fn to_f64(&self) -> Result<f64, ParseError> {
        match self {
            Value::Num(x) => Ok(*x),
            Value::Frac(s) => {
                let (p, q) = s
                    .split_once('/')
                    .ok_or_else(|| ParseError::BadFraction(s.clone()))?;
                let p: i64 = p.trim().parse().map_err(|_| ParseError::BadFraction(s.clone()))?;
                let q: i64 = q.trim().parse().map_err(|_| ParseError::BadFraction(s.clone()))?;
                if q == 0 {
                    return Err(ParseError::BadFraction(s.clone()));
                }
                Ok(rat::rat_to_f64(&rat::rat(p, q)))
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupSpec {
    #[serde(default)]
    permutations: Option<Vec<BTreeMap<String, String>>>,
    #[serde(default)]
    analytic: Option<String>,
    #[serde(default)]
    seed: Option<u64>,
}

/// Parse a model description from JSON text and validate it.
pub fn parse_model(text: &str, tol: &Tolerances) -> Result<Model, ParseError> {
    let file: ModelFile = serde_json::from_str(text)?;
    let index = |name: &str| -> Result<usize, ParseError> {
        file.outcomes
            .iter()
            .position(|o| o == name)
            .ok_or_else(|| ParseError::UnknownOutcome(name.to_string()))
    };
    let tests: Vec<Vec<usize>> = file
        .tests
        .iter()
        .map(|t| t.iter().map(|n| index(n)).collect())
        .collect::<Result<_, _>>()?;
    let space = TestSpace::new(file.outcomes.clone(), tests)?;

    let n = space.n_outcomes();
    let mut states: Vec<Vec<f64>> = Vec::with_capacity(file.pure_states.len());
    for map in &file.pure_states {
        let mut values = vec![0.0; n];
        for (name, v) in map {
            values[index(name)?] = v.to_f64()?;
        }
        states.push(values);
    }

    let group = match &file.group {
        None => None,
        Some(spec) => match (&spec.permutations, &spec.analytic) {
            (Some(perms), None) => {
                let mut generators = Vec::with_capacity(perms.len());
                for map in perms {
                    let mut p: Vec<usize> = (0..n).collect();
                    for (from, to) in map {
                        p[index(from)?] = index(to)?;
                    }
                    generators.push(Perm(p));
                }
                let g = FiniteGroup::from_generators(&generators, n, CLOSURE_BUDGET)?;
                let mut action = GroupAction::finite(g);
                action.seed = spec.seed.unwrap_or(0);
                Some(action)
            }
            (None, Some(tag)) => {
                return Err(ParseError::AnalyticGroupUnsupported(tag.clone()))
            }
            _ => return Err(ParseError::AmbiguousGroup),
        },
    };

    let kind = match file.kind.as_deref() {
        None | Some("generic") => KindTag::Generic,
        Some("classical") => KindTag::Classical,
        Some(other) => return Err(ParseError::UnsupportedKind(other.to_string())),
    };

    Ok(Model::validate(space, states, group, kind, tol)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    const BIT: &str = r#"{
        "outcomes": ["a", "b"],
        "tests": [["a", "b"]],
        "pure_states": [{"a": 1, "b": 0}, {"a": 0, "b": 1}],
        "group": {"permutations": [{"a": "b", "b": "a"}]},
        "kind": "classical"
    }"#;

    #[test]
    fn classical_bit_parses() {
        let m = parse_model(BIT, &tols()).unwrap();
        assert_eq!(m.n_outcomes(), 2);
        assert_eq!(m.kind, KindTag::Classical);
        assert!(m.group.is_some());
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = BIT.replace("\"kind\"", "\"kinds\"");
        assert!(matches!(
            parse_model(&text, &tols()),
            Err(ParseError::Json(_))
        ));
    }

    #[test]
    fn fraction_strings_parse() {
        let text = r#"{
            "outcomes": ["a", "b", "c"],
            "tests": [["a", "b", "c"]],
            "pure_states": [
                {"a": 1}, {"b": 1}, {"c": 1},
                {"a": "1/3", "b": "1/3", "c": "1/3"}
            ]
        }"#;
        let m = parse_model(text, &tols()).unwrap();
        assert_eq!(m.pure_states.len(), 4);
        assert!((m.pure_states[3].values[0] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn bad_state_sum_is_a_model_error() {
        let text = r#"{
            "outcomes": ["a", "b"],
            "tests": [["a", "b"]],
            "pure_states": [{"a": 0.6, "b": 0.6}]
        }"#;
        assert!(matches!(
            parse_model(text, &tols()),
            Err(ParseError::Model(ModelError::StateSumViolation { .. }))
        ));
    }

    #[test]
    fn analytic_group_tags_are_rejected_with_guidance() {
        let text = r#"{
            "outcomes": ["a", "b"],
            "tests": [["a", "b"]],
            "pure_states": [{"a": 1}, {"b": 1}],
            "group": {"analytic": "unitary", "seed": 7}
        }"#;
        assert!(matches!(
            parse_model(text, &tols()),
            Err(ParseError::AnalyticGroupUnsupported(_))
        ));
    }

    #[test]
    fn group_elements_must_preserve_tests() {
        // Swapping an outcome across the two tests of a square-bit-like
        // file is not a symmetry.
        let text = r#"{
            "outcomes": ["x0", "x1", "y0", "y1"],
            "tests": [["x0", "x1"], ["y0", "y1"]],
            "pure_states": [
                {"x0": 1, "y0": 1}, {"x1": 1, "y0": 1},
                {"x0": 1, "y1": 1}, {"x1": 1, "y1": 1}
            ],
            "group": {"permutations": [{"x0": "y0", "y0": "x0"}]}
        }"#;
        let err = parse_model(text, &tols()).unwrap_err();
        match err {
            ParseError::Model(ModelError::Group(inner)) => {
                assert!(matches!(
                    *inner,
                    SymmetryError::ElementBreaksTests { .. }
                ));
            }
            other => panic!("expected a group verification error, got {other}"),
        }
    }

    #[test]
    fn unknown_zoo_kind_rejected() {
        let text = BIT.replace("\"classical\"", "\"quantum\"");
        assert!(matches!(
            parse_model(&text, &tols()),
            Err(ParseError::UnsupportedKind(_))
        ));
    }
}
