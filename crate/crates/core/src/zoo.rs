//! Built-in model constructors and the invariant family on operator
//! coordinates.
//!
//! Classical systems, the square bit, ball (spin-factor) systems, and
//! quantum systems in operator representation. Quantum models keep a
//! finite frame list; further frames (eigenframes of decomposed states)
//! are appended on demand by rebuilding the model, with outcomes
//! identified across frames by projector equality.

use nalgebra::{DMatrix, DVector};
use num::rational::BigRational;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::herm::{self, CMat, CVec};
use crate::model::{KindTag, Model, ModelError, TestSpace};
use crate::par::{self, ExecMode};
use crate::rat::{rat_to_f64, Rat};
use crate::symmetry::{
    lambda_family_ip, FiniteGroup, GroupAction, GroupKind, InnerProduct, Perm, SymmetryError,
    CLOSURE_BUDGET,
};
use crate::tol::Tolerances;

#[derive(Debug, Error)]
pub enum ZooError {
    #[error("dimension {0} is too small (need at least 2)")]
    BadDimension(usize),
    #[error("frame {frame} is not orthonormal: {detail}")]
    NotAFrame { frame: usize, detail: String },
    #[error("listed frames span {rank} of {needed} operator dimensions")]
    InsufficientFrames { rank: usize, needed: usize },
    #[error("unknown zoo model name: {0}")]
    UnknownName(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
}

/// Operator-coordinate data of a quantum model.
#[derive(Debug, Clone)]
pub struct QuantumRep {
    pub n: usize,
    /// One representative unit vector per outcome.
    pub vectors: Vec<CVec>,
    /// Rank-one projector per outcome.
    pub projectors: Vec<CMat>,
    /// Density matrix behind each listed pure state (projectors; the
    /// listed states are the certain states of the outcomes).
    pub densities: Vec<CMat>,
    /// The frame list the model was built from (one entry per test).
    pub frame_vectors: Vec<Vec<CVec>>,
}

/// Direction data of a ball (spin-factor) model.
#[derive(Debug, Clone)]
pub struct SpinRep {
    pub d: usize,
    pub outcome_dirs: Vec<DVector<f64>>,
    pub state_dirs: Vec<DVector<f64>>,
}

/// Classical system with one test of `n` outcomes, point masses as pure
/// states, and the full symmetric group.
pub fn make_classical(n: usize, tol: &Tolerances) -> Result<Model, ZooError> {
    if n < 2 {
        return Err(ZooError::BadDimension(n));
    }
    let outcomes: Vec<String> = (0..n).map(|i| format!("o{i}")).collect();
    let space = TestSpace::new(outcomes, vec![(0..n).collect()])?;
    let states: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut generators = vec![Perm({
        let mut v: Vec<usize> = (0..n).collect();
        v.swap(0, 1);
        v
    })];
    if n > 2 {
        generators.push(Perm((1..n).chain(std::iter::once(0)).collect()));
    }
    let group = FiniteGroup::from_generators(&generators, n, CLOSURE_BUDGET)?;
    let mut m = Model::validate(
        space,
        states,
        Some(GroupAction::finite(group)),
        KindTag::Classical,
        tol,
    )?;
    m.kind = KindTag::Classical;
    Ok(m)
}

/// The two-test, four-outcome system with a square state space: the
/// standard counterexample to sharpness, self-duality, and monoentropy.
pub fn make_square_bit(tol: &Tolerances) -> Result<Model, ZooError> {
    let space = TestSpace::new(
        vec!["x0".into(), "x1".into(), "y0".into(), "y1".into()],
        vec![vec![0, 1], vec![2, 3]],
    )?;
    let vertex = |p: f64, q: f64| vec![p, 1.0 - p, q, 1.0 - q];
    let states = vec![
        vertex(0.0, 0.0),
        vertex(1.0, 0.0),
        vertex(0.0, 1.0),
        vertex(1.0, 1.0),
    ];
    // Dihedral group of the square: flip p, swap the two axes.
    let group = FiniteGroup::from_generators(
        &[Perm(vec![1, 0, 2, 3]), Perm(vec![2, 3, 0, 1])],
        4,
        CLOSURE_BUDGET,
    )?;
    let m = Model::validate(
        space,
        states,
        Some(GroupAction::finite(group)),
        KindTag::SquareBit,
        tol,
    )?;
    Ok(m)
}

/// Ball system in `R^d`: tests are antipodal direction pairs (the
/// coordinate axes plus `extra_pairs` sampled directions), pure states
/// sit on the ball boundary at the same directions.
pub fn make_spin_factor(
    d: usize,
    extra_pairs: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Model, ZooError> {
    if d < 2 {
        return Err(ZooError::BadDimension(d));
    }
    let mut dirs: Vec<DVector<f64>> = Vec::new();
    for k in 0..d {
        let mut e = DVector::zeros(d);
        e[k] = 1.0;
        dirs.push(e);
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..extra_pairs {
        let mut v = DVector::zeros(d);
        loop {
            for k in 0..d {
                v[k] = StandardNormal.sample(&mut rng);
            }
            if v.norm() > 1e-6 {
                break;
            }
        }
        let unit = v.normalize();
        dirs.push(unit);
    }
    make_spin_from_directions(d, dirs, seed, tol)
}

fn make_spin_from_directions(
    d: usize,
    half_dirs: Vec<DVector<f64>>,
    seed: u64,
    tol: &Tolerances,
) -> Result<Model, ZooError> {
    let mut outcome_dirs: Vec<DVector<f64>> = Vec::new();
    let mut tests: Vec<Vec<usize>> = Vec::new();
    for dir in &half_dirs {
        let plus = outcome_dirs.len();
        outcome_dirs.push(dir.clone());
        outcome_dirs.push(-dir.clone());
        tests.push(vec![plus, plus + 1]);
    }
    let outcomes: Vec<String> = (0..outcome_dirs.len())
        .map(|i| {
            let pair = i / 2;
            if i % 2 == 0 {
                format!("d{pair}+")
            } else {
                format!("d{pair}-")
            }
        })
        .collect();
    let space = TestSpace::new(outcomes, tests)?;
    let state_dirs = outcome_dirs.clone();
    let states: Vec<Vec<f64>> = state_dirs
        .iter()
        .map(|b| outcome_dirs.iter().map(|x| (1.0 + b.dot(x)) / 2.0).collect())
        .collect();
    let mut m = Model::validate(
        space,
        states,
        Some(GroupAction {
            kind: GroupKind::Orthogonal { d },
            base_state: 0,
            seed,
        }),
        KindTag::SpinFactor,
        tol,
    )?;
    m.spin = Some(SpinRep {
        d,
        outcome_dirs,
        state_dirs,
    });
    Ok(m)
}

/// Extend a ball model with one more antipodal test (used when a state
/// decomposes over a direction the sampled test list does not carry).
/// Returns the extended model and the index of the test for `dir`.
pub fn extend_spin_with_direction(
    model: &Model,
    dir: &DVector<f64>,
    tol: &Tolerances,
) -> Result<(Model, usize), ZooError> {
    let sp = model.spin.as_ref().expect("ball model");
    let unit = dir.normalize();
    // Reuse an existing test when the direction is already listed.
    for (t, test) in model.space.tests.iter().enumerate() {
        let x = &sp.outcome_dirs[test[0]];
        if (x - &unit).amax() <= tol.zero || (x + &unit).amax() <= tol.zero {
            return Ok((model.clone(), t));
        }
    }
    let mut half: Vec<DVector<f64>> = model
        .space
        .tests
        .iter()
        .map(|t| sp.outcome_dirs[t[0]].clone())
        .collect();
    half.push(unit);
    let action = model.group.as_ref().expect("ball model carries a group");
    let extended = make_spin_from_directions(sp.d, half, action.seed, tol)?;
    let idx = extended.space.tests.len() - 1;
    Ok((extended, idx))
}

/// Quantum system from an explicit frame list, in operator coordinates.
/// Outcomes are identified across frames by projector equality.
pub fn make_quantum(n: usize, frames: &[Vec<CVec>], tol: &Tolerances) -> Result<Model, ZooError> {
    if n < 2 {
        return Err(ZooError::BadDimension(n));
    }
    let mut vectors: Vec<CVec> = Vec::new();
    let mut projectors: Vec<CMat> = Vec::new();
    let mut proj_coords: Vec<DVector<f64>> = Vec::new();
    let mut names: Vec<String> = Vec::new();
    let mut tests: Vec<Vec<usize>> = Vec::new();

    for (fi, frame) in frames.iter().enumerate() {
        if frame.len() != n {
            return Err(ZooError::NotAFrame {
                frame: fi,
                detail: format!("has {} vectors, need {n}", frame.len()),
            });
        }
        for (i, v) in frame.iter().enumerate() {
            if (v.norm() - 1.0).abs() > tol.zero * 10.0 {
                return Err(ZooError::NotAFrame {
                    frame: fi,
                    detail: format!("vector {i} has norm {}", v.norm()),
                });
            }
            for j in (i + 1)..frame.len() {
                let overlap = v.dotc(&frame[j]).norm();
                if overlap > tol.zero * 10.0 {
                    return Err(ZooError::NotAFrame {
                        frame: fi,
                        detail: format!("vectors {i} and {j} overlap by {overlap}"),
                    });
                }
            }
        }
        let mut test = Vec::with_capacity(n);
        for (pos, v) in frame.iter().enumerate() {
            let p = herm::projector(v);
            let coords = herm::herm_to_coords(&p);
            let existing = proj_coords
                .iter()
                .position(|c| (c - &coords).amax() <= tol.zero * 10.0);
            let idx = match existing {
                Some(i) => i,
                None => {
                    vectors.push(v.clone());
                    projectors.push(p);
                    proj_coords.push(coords);
                    names.push(format!("f{fi}_{pos}"));
                    vectors.len() - 1
                }
            };
            test.push(idx);
        }
        test.sort_unstable();
        // Frames that identify outcome-for-outcome with an earlier one
        // are the same test.
        if !tests.contains(&test) {
            tests.push(test);
        }
    }

    // The listed outcomes must span the operator space, or the analytic
    // routes downstream have nothing to hold on to.
    let rank = {
        let d = herm::herm_dim(n);
        let mut m = DMatrix::zeros(proj_coords.len(), d);
        for (i, c) in proj_coords.iter().enumerate() {
            for j in 0..d {
                m[(i, j)] = c[j];
            }
        }
        m.svd(false, false)
            .singular_values
            .iter()
            .filter(|&&s| s > 1e-9)
            .count()
    };
    if rank < herm::herm_dim(n) {
        return Err(ZooError::InsufficientFrames {
            rank,
            needed: herm::herm_dim(n),
        });
    }

    // One pure state per outcome: the certain state of its projector.
    let states: Vec<Vec<f64>> = projectors
        .iter()
        .map(|p| {
            projectors
                .iter()
                .map(|q| (p * q).trace().re.clamp(0.0, 1.0))
                .collect()
        })
        .collect();
    let space = TestSpace::new(names, tests)?;
    let mut m = Model::validate(
        space,
        states,
        Some(GroupAction {
            kind: GroupKind::Unitary { n },
            base_state: 0,
            seed: 0,
        }),
        KindTag::Quantum,
        tol,
    )?;
    m.quantum = Some(QuantumRep {
        n,
        densities: projectors.clone(),
        vectors,
        projectors,
        frame_vectors: frames.to_vec(),
    });
    Ok(m)
}

/// Rebuild a quantum model with extra frames appended. Existing outcome
/// indices are unchanged; returns the extended model and the indices of
/// the new tests.
pub fn extend_quantum_with_frames(
    model: &Model,
    new_frames: &[Vec<CVec>],
    tol: &Tolerances,
) -> Result<(Model, Vec<usize>), ZooError> {
    let q = model.quantum.as_ref().expect("quantum model");
    let mut frames = q.frame_vectors.clone();
    let first_new = frames.len();
    frames.extend(new_frames.iter().cloned());
    let extended = make_quantum(q.n, &frames, tol)?;
    let idx = (first_new..extended.space.tests.len()).collect();
    Ok((extended, idx))
}

/// Mutually unbiased frames for dimensions 2 and 3; computational plus
/// seeded Haar frames otherwise (enough to span the operator space).
pub fn default_frames(n: usize, seed: u64) -> Vec<Vec<CVec>> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    match n {
        2 => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            vec![
                vec![
                    CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]),
                    CVec::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]),
                ],
                vec![
                    CVec::from_vec(vec![c(s, 0.0), c(s, 0.0)]),
                    CVec::from_vec(vec![c(s, 0.0), c(-s, 0.0)]),
                ],
                vec![
                    CVec::from_vec(vec![c(s, 0.0), c(0.0, s)]),
                    CVec::from_vec(vec![c(s, 0.0), c(0.0, -s)]),
                ],
            ]
        }
        3 => {
            let mut frames = vec![(0..3)
                .map(|i| {
                    let mut v = CVec::zeros(3);
                    v[i] = c(1.0, 0.0);
                    v
                })
                .collect::<Vec<_>>()];
            let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
            let s = 1.0 / 3.0f64.sqrt();
            for k in 0..3u32 {
                let mut frame = Vec::new();
                for m in 0..3u32 {
                    let mut v = CVec::zeros(3);
                    for l in 0..3u32 {
                        let phase = (k * l * l + m * l) % 3;
                        v[l as usize] = omega.powu(phase) * c(s, 0.0);
                    }
                    frame.push(v);
                }
                frames.push(frame);
            }
            frames
        }
        _ => {
            let mut frames = vec![(0..n)
                .map(|i| {
                    let mut v = CVec::zeros(n);
                    v[i] = c(1.0, 0.0);
                    v
                })
                .collect::<Vec<_>>()];
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            // n+1 Haar frames always span the n^2 operator dimensions in
            // practice; the constructor verifies.
            for _ in 0..n + 1 {
                let u = herm::haar_unitary(n, &mut rng);
                frames.push((0..n).map(|j| u.column(j).clone_owned()).collect());
            }
            frames
        }
    }
}

/// Quantum model over the default (mutually unbiased) frame list.
pub fn make_quantum_mub(n: usize, tol: &Tolerances) -> Result<Model, ZooError> {
    make_quantum(n, &default_frames(n, 0x51EDD), tol)
}

/// Componentwise conjugate of a frame.
pub fn conjugate_frame(frame: &[CVec]) -> Vec<CVec> {
    frame.iter().map(|v| v.map(|z| z.conj())).collect()
}

/// Gleason values of a density matrix on every listed outcome.
pub fn gleason_values(q: &QuantumRep, rho: &CMat) -> Vec<f64> {
    q.projectors.iter().map(|p| (rho * p).trace().re).collect()
}

/// Closed form of the family member evaluated on two rank-one
/// projectors with squared overlap `overlap_sq`:
/// `(1 - lambda)/n^2 + (lambda/n) overlap_sq`.
pub fn lambda_pair_value(n: usize, lambda: f64, overlap_sq: f64) -> f64 {
    let nf = n as f64;
    (1.0 - lambda) / (nf * nf) + lambda / nf * overlap_sq
}

/// Verdict-carrying constructor for the one-parameter family.
#[derive(Debug, Clone)]
pub struct LambdaVerdict {
    pub ip: InnerProduct,
    pub n: usize,
    pub lambda: f64,
    /// Positive on the cone iff 0 < lambda <= 1.
    pub positive: bool,
    /// Positive members are automatically minimizing.
    pub minimizing: bool,
    /// Value at an orthogonal projector pair: (1 - lambda)/n^2.
    pub orthogonal_pair_value: f64,
}

pub fn lambda_inner_product(n: usize, lambda: f64) -> Result<LambdaVerdict, ZooError> {
    if n < 2 {
        return Err(ZooError::BadDimension(n));
    }
    let lam_rat = crate::rat::rat_from_f64(lambda);
    let ip = lambda_family_ip(n, &lam_rat)?;
    let positive = lambda > 0.0 && lambda <= 1.0;
    // Corroborate the closed form on an actual orthogonal pair of
    // basis projectors, in coordinates.
    let p0 = herm::rank_one_probe_coords(n, 0, 0)[0].clone();
    let p1 = herm::rank_one_probe_coords(n, 0, 0)[1].clone();
    let via_gram = (p0.transpose() * &ip.gram * &p1)[(0, 0)];
    let closed = lambda_pair_value(n, lambda, 0.0);
    debug_assert!((via_gram - closed).abs() < 1e-12);
    Ok(LambdaVerdict {
        ip,
        n,
        lambda,
        positive,
        minimizing: positive,
        orthogonal_pair_value: closed,
    })
}

/// Monte-Carlo estimate of the canonical invariant inner product of a
/// quantum system, fitted to the one-parameter family.
#[derive(Debug, Clone)]
pub struct HaarEstimate {
    pub n: usize,
    pub samples: usize,
    pub lambda_hat: f64,
    pub std_err: f64,
    /// Closed form the estimate corroborates: the member at 1/(n+1).
    pub closed_form: InnerProduct,
    /// Monte-Carlo check that <u,u> = 1 (deterministically 1 per sample).
    pub unit_norm_estimate: f64,
}

const HAAR_CHUNK: usize = 4096;

pub fn haar_canonical_ip(n: usize, samples: usize, seed: u64) -> Result<HaarEstimate, ZooError> {
    haar_canonical_ip_with_mode(n, samples, seed, ExecMode::default())
}

/// The per-chunk kernel is deterministic in (seed, chunk index), and the
/// chunk results combine in index order, so the estimate is identical
/// across thread counts and between the parallel and sequential paths.
pub fn haar_canonical_ip_with_mode(
    n: usize,
    samples: usize,
    seed: u64,
    mode: ExecMode,
) -> Result<HaarEstimate, ZooError> {
    if n < 2 {
        return Err(ZooError::BadDimension(n));
    }
    let chunks = par::chunk_count(samples, HAAR_CHUNK);
    // Per-sample statistic: the frame-diagonal average
    //   l = (n^2 mean_j Tr(P_ej P)^2 - 1)/(n - 1),
    // whose expectation is the family parameter of the Haar average.
    let results: Vec<(f64, f64, f64)> = par::map_indexed(chunks, mode, |i| {
        let mut rng =
            rand_chacha::ChaCha8Rng::seed_from_u64(par::chunk_seed(seed, i as u64));
        let len = par::chunk_len(samples, HAAR_CHUNK, i);
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        let mut unit_sum = 0.0;
        for _ in 0..len {
            let psi = herm::random_pure(n, &mut rng);
            let mut mean_fourth = 0.0;
            for j in 0..n {
                let amp = psi[j].norm_sqr();
                mean_fourth += amp * amp;
            }
            mean_fourth /= n as f64;
            let l = ((n * n) as f64 * mean_fourth - 1.0) / (n as f64 - 1.0);
            sum += l;
            sumsq += l * l;
            // <u, u> estimate: Tr(1 P)^2 = 1 for every sample.
            unit_sum += 1.0;
        }
        (sum, sumsq, unit_sum)
    });
    let (mut sum, mut sumsq, mut unit_sum) = (0.0, 0.0, 0.0);
    for (s, q, u) in results {
        sum += s;
        sumsq += q;
        unit_sum += u;
    }
    let nf = samples as f64;
    let lambda_hat = sum / nf;
    let var = (sumsq / nf - lambda_hat * lambda_hat).max(0.0);
    let std_err = (var / (nf - 1.0).max(1.0)).sqrt();
    let closed = lambda_family_ip(n, &Rat::new(1.into(), ((n as i64) + 1).into()))?;
    Ok(HaarEstimate {
        n,
        samples,
        lambda_hat,
        std_err,
        closed_form: closed,
        unit_norm_estimate: unit_sum / nf,
    })
}

/// Resolve a zoo model by CLI name: `classical:n`, `quantum:n`,
/// `spin:d`, or `square-bit`.
pub fn by_name(name: &str, tol: &Tolerances) -> Result<Model, ZooError> {
    if name == "square-bit" {
        return make_square_bit(tol);
    }
    if let Some((family, arg)) = name.split_once(':') {
        let k: usize = arg
            .parse()
            .map_err(|_| ZooError::UnknownName(name.to_string()))?;
        return match family {
            "classical" => make_classical(k, tol),
            "quantum" => make_quantum_mub(k, tol),
            "spin" => make_spin_factor(k, 4, 2024, tol),
            _ => Err(ZooError::UnknownName(name.to_string())),
        };
    }
    Err(ZooError::UnknownName(name.to_string()))
}

/// Exact rational form of the family parameter of the Haar average.
pub fn haar_lambda_exact(n: usize) -> BigRational {
    Rat::new(1.into(), ((n as i64) + 1).into())
}

pub fn haar_lambda_f64(n: usize) -> f64 {
    rat_to_f64(&haar_lambda_exact(n))
}
