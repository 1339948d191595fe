//! Convex cones and cone numerics.
//!
//! Cones come in two representations: finite generator rays (polyhedral)
//! and analytic tags for the positive-semidefinite and second-order
//! (Lorentz) cones. Polyhedral duality runs in exact rational arithmetic;
//! facet enumeration is brittle in floating point and the polytope
//! verdicts must be exact.

use nalgebra::{DMatrix, DVector};
use num::{One, Signed, Zero};
use std::sync::OnceLock;
use thiserror::Error;

use crate::herm;
use crate::rat::{self, canonical_ray, Rat, RatMat};
use crate::symmetry::InnerProduct;
use crate::tol::Tolerances;

#[derive(Debug, Error)]
pub enum ConeError {
    #[error("metric is not positive definite")]
    MetricNotPositiveDefinite,
    #[error("unsupported metric for this cone: {0}")]
    UnsupportedMetric(String),
    #[error("operation not supported for this cone representation: {0}")]
    UnsupportedCone(String),
    #[error("projection did not converge after {iterations} iterations (residual {residual})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("map is not invertible (condition estimate {condition:e})")]
    NotInvertible { condition: f64 },
    #[error("image of generator {index} leaves the cone ({direction} direction)")]
    ConeViolation {
        index: usize,
        direction: &'static str,
        image: Vec<f64>,
    },
    #[error("cone has no generators")]
    EmptyCone,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Cone representation.
#[derive(Debug, Clone)]
pub enum ConeClass {
    /// Finitely generated: conic hull of the listed rays.
    Rays(Vec<DVector<f64>>),
    /// Positive-semidefinite Hermitian operators on an `n`-dimensional
    /// space, in real operator coordinates (ambient `n*n`).
    Psd { n: usize },
    /// Second-order cone `{(t, w) : t >= |w|}` (ambient `dim`).
    SecondOrder { dim: usize },
    /// Preimage `{ a : map a in PSD }`; produced by duality with a
    /// non-tracial metric.
    MappedPsd { n: usize, map: DMatrix<f64> },
    /// Preimage `{ a : map a in SOC }`.
    MappedSoc { dim: usize, map: DMatrix<f64> },
}

#[derive(Debug, Clone)]
pub struct Cone {
    pub class: ConeClass,
    pub ambient: usize,
    /// Exact rays (kept when the cone came from exact data or exact
    /// enumeration; always available for `Rays` built from f64 input).
    rays_exact: Option<Vec<Vec<Rat>>>,
    facets: OnceLock<FacetData>,
}

/// Facet normals of a polyhedral cone, with the orthogonal complement of
/// its span (membership requires both half-space and span checks).
#[derive(Debug, Clone)]
struct FacetData {
    normals: Vec<DVector<f64>>,
    normals_exact: Vec<Vec<Rat>>,
    span_complement: Vec<Vec<Rat>>,
    span_complement_f64: Vec<DVector<f64>>,
}

impl Cone {
    pub fn from_rays(rays: Vec<DVector<f64>>) -> Self {
        assert!(!rays.is_empty(), "cone needs at least one generator");
        let ambient = rays[0].len();
        assert!(rays.iter().all(|r| r.len() == ambient));
        assert!(
            rays.iter().all(|r| r.iter().any(|&x| x != 0.0)),
            "zero vector is not a generator"
        );
        let exact = rays
            .iter()
            .map(|r| rat::vec_from_f64(r.as_slice()))
            .collect();
        Self {
            class: ConeClass::Rays(rays),
            ambient,
            rays_exact: Some(exact),
            facets: OnceLock::new(),
        }
    }

    pub fn from_rays_exact(rays: Vec<Vec<Rat>>) -> Self {
        assert!(!rays.is_empty());
        let ambient = rays[0].len();
        let f64_rays = rays
            .iter()
            .map(|r| DVector::from_vec(rat::vec_to_f64(r)))
            .collect();
        Self {
            class: ConeClass::Rays(f64_rays),
            ambient,
            rays_exact: Some(rays),
            facets: OnceLock::new(),
        }
    }

    pub fn psd(n: usize) -> Self {
        Self {
            class: ConeClass::Psd { n },
            ambient: n * n,
            rays_exact: None,
            facets: OnceLock::new(),
        }
    }

    pub fn second_order(dim: usize) -> Self {
        assert!(dim >= 2);
        Self {
            class: ConeClass::SecondOrder { dim },
            ambient: dim,
            rays_exact: None,
            facets: OnceLock::new(),
        }
    }

    pub fn rays(&self) -> Option<&[DVector<f64>]> {
        match &self.class {
            ConeClass::Rays(r) => Some(r),
            _ => None,
        }
    }

    pub fn rays_exact(&self) -> Option<&[Vec<Rat>]> {
        self.rays_exact.as_deref()
    }

    fn facet_data(&self) -> &FacetData {
        self.facets.get_or_init(|| {
            let rays = self
                .rays_exact
                .as_ref()
                .expect("facet normals only exist for polyhedral cones");
            let dual = dual_rays_exact(rays);
            let normals: Vec<DVector<f64>> = dual
                .rays
                .iter()
                .map(|r| DVector::from_vec(rat::vec_to_f64(r)))
                .collect();
            let span_f64 = dual
                .lineality
                .iter()
                .map(|r| DVector::from_vec(rat::vec_to_f64(r)))
                .collect();
            FacetData {
                normals,
                normals_exact: dual.rays,
                span_complement: dual.lineality,
                span_complement_f64: span_f64,
            }
        })
    }

    /// Facet normals (polyhedral cones only), computed once and cached.
    pub fn facet_normals(&self) -> &[DVector<f64>] {
        &self.facet_data().normals
    }

    /// Membership test. Polyhedral: all facet inequalities within `tol`
    /// plus span membership. Analytic: closed-form criteria.
    pub fn contains(&self, v: &DVector<f64>, tol: f64) -> bool {
        let scale = 1.0 + v.norm();
        match &self.class {
            ConeClass::Rays(_) => {
                let fd = self.facet_data();
                fd.span_complement_f64
                    .iter()
                    .all(|w| (w.dot(v)).abs() <= tol * scale * (1.0 + w.norm()))
                    && fd
                        .normals
                        .iter()
                        .all(|h| h.dot(v) >= -tol * scale * (1.0 + h.norm()))
            }
            ConeClass::Psd { n } => {
                let m = herm::coords_to_herm(v, *n);
                let (eigs, _) = herm::herm_eigen(&m);
                eigs.iter().all(|&e| e >= -tol * scale)
            }
            ConeClass::SecondOrder { .. } => {
                let t = v[0];
                let w = v.rows(1, v.len() - 1).norm();
                t >= w - tol * scale
            }
            ConeClass::MappedPsd { n, map } => {
                let image = map * v;
                Cone::psd(*n).contains(&image, tol)
            }
            ConeClass::MappedSoc { dim, map } => {
                let image = map * v;
                Cone::second_order(*dim).contains(&image, tol)
            }
        }
    }

    /// Exact membership for polyhedral cones.
    pub fn contains_exact(&self, v: &[Rat]) -> Option<bool> {
        if !matches!(self.class, ConeClass::Rays(_)) {
            return None;
        }
        let fd = self.facet_data();
        let in_span = fd
            .span_complement
            .iter()
            .all(|w| rat::dot(w, v).is_zero());
        let in_halfspaces = fd
            .normals_exact
            .iter()
            .all(|h| !rat::dot(h, v).is_negative());
        Some(in_span && in_halfspaces)
    }

    /// Canonical ray set for exact equality comparison.
    pub fn canonical_rays(&self) -> Option<Vec<Vec<Rat>>> {
        let rays = self.rays_exact.as_ref()?;
        // Reduce to extreme rays: a generator is redundant when it lies in
        // the conic hull of the others; for the comparison we instead
        // canonicalize and deduplicate, then drop rays expressible by the
        // rest via exact feasibility.
        let mut canon: Vec<Vec<Rat>> = rays
            .iter()
            .filter_map(|r| canonical_ray(r))
            .collect();
        canon.sort();
        canon.dedup();
        let mut extreme = Vec::new();
        for (i, r) in canon.iter().enumerate() {
            let others: Vec<Vec<Rat>> = canon
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, v)| v.clone())
                .collect();
            if others.is_empty() || !in_conic_hull_exact(r, &others) {
                extreme.push(r.clone());
            }
        }
        Some(extreme)
    }
}

/// Exact test whether `v` is a non-negative combination of `gens`.
pub fn in_conic_hull_exact(v: &[Rat], gens: &[Vec<Rat>]) -> bool {
    use crate::lp;
    let d = v.len();
    let mut cols: Vec<Vec<Rat>> = Vec::with_capacity(gens.len());
    for g in gens {
        cols.push(g.clone());
    }
    let mut a = RatMat::zeros(d, cols.len());
    for (j, g) in cols.iter().enumerate() {
        for i in 0..d {
            a[(i, j)] = g[i].clone();
        }
    }
    matches!(
        lp::feasible_nonneg(&a, v),
        lp::Feasibility::Feasible(_)
    )
}

/// Output of exact dual-ray enumeration.
pub struct DualRaysExact {
    /// Extreme rays of the dual within the span of the input.
    pub rays: Vec<Vec<Rat>>,
    /// Basis of the dual's lineality space (orthogonal complement of the
    /// input span); empty when the input cone is full-dimensional.
    pub lineality: Vec<Vec<Rat>>,
}

/// Enumerate the extreme rays of `{ a : g . a >= 0 for all generators g }`
/// by scanning (r-1)-subsets of active constraints, exactly.
pub fn dual_rays_exact(gens: &[Vec<Rat>]) -> DualRaysExact {
    let g = RatMat::from_rows(gens.to_vec());
    let lineality = g.nullspace();
    let (rref, pivots) = g.rref();
    let r = pivots.len();
    // Basis of the row space, as rows of `basis` (r x d).
    let basis_rows: Vec<Vec<Rat>> = (0..r).map(|i| rref.row(i).to_vec()).collect();
    let basis = RatMat::from_rows(basis_rows);
    // Constraints in span coordinates: H = G * B^T (m x r).
    let h = g.matmul(&basis.transpose());

    let mut found: Vec<Vec<Rat>> = Vec::new();
    let m = h.rows;
    if r == 1 {
        for cand in [vec![Rat::one()], vec![-Rat::one()]] {
            let ok = (0..m).all(|i| !rat::dot(h.row(i), &cand).is_negative());
            if ok {
                found.push(cand);
            }
        }
    } else {
        for subset in subsets(m, r - 1) {
            let rows: Vec<Vec<Rat>> = subset.iter().map(|&i| h.row(i).to_vec()).collect();
            let sub = RatMat::from_rows(rows);
            let ns = sub.nullspace();
            if ns.len() != 1 {
                continue;
            }
            let v = &ns[0];
            let mut pos_ok = true;
            let mut neg_ok = true;
            for i in 0..m {
                let val = rat::dot(h.row(i), v);
                if val.is_negative() {
                    pos_ok = false;
                }
                if val.is_positive() {
                    neg_ok = false;
                }
                if !pos_ok && !neg_ok {
                    break;
                }
            }
            if pos_ok {
                found.push(v.clone());
            } else if neg_ok {
                found.push(v.iter().map(|x| -x).collect());
            }
        }
    }
    // Lift back to ambient coordinates: a = B^T c.
    let bt = basis.transpose();
    let mut rays: Vec<Vec<Rat>> = found
        .iter()
        .map(|c| bt.matvec(c))
        .filter_map(|v| canonical_ray(&v))
        .collect();
    rays.sort();
    rays.dedup();
    DualRaysExact { rays, lineality }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Dual cone of `cone` with respect to the inner product `ip`:
/// `{ a : <a, g>_ip >= 0 for all g in cone }`.
pub fn dual_cone(cone: &Cone, ip: &InnerProduct, tol: &Tolerances) -> Result<Cone, ConeError> {
    match &cone.class {
        ConeClass::Rays(_) => {
            let rays = cone.rays_exact().ok_or(ConeError::EmptyCone)?;
            let gram = ip.gram_exact_or_convert();
            // {a : a^T M g >= 0} = standard dual of {M g}.
            let mapped: Vec<Vec<Rat>> = rays.iter().map(|g| gram.matvec(g)).collect();
            let dual = dual_rays_exact(&mapped);
            let mut all = dual.rays;
            for l in dual.lineality {
                let neg: Vec<Rat> = l.iter().map(|x| -x).collect();
                all.push(l);
                all.push(neg);
            }
            if all.is_empty() {
                return Err(ConeError::EmptyCone);
            }
            Ok(Cone::from_rays_exact(all))
        }
        ConeClass::Psd { n } => {
            // <a,g> = a^T M g >= 0 for all PSD g  <=>  M a in PSD*
            // = PSD under the trace pairing.
            if let Some(c) = scalar_multiple_of_identity(&ip.gram, tol.zero) {
                let _ = c;
                Ok(Cone::psd(*n))
            } else {
                Ok(Cone {
                    class: ConeClass::MappedPsd {
                        n: *n,
                        map: ip.gram.clone(),
                    },
                    ambient: cone.ambient,
                    rays_exact: None,
                    facets: OnceLock::new(),
                })
            }
        }
        ConeClass::SecondOrder { dim } => {
            if scalar_multiple_of_identity(&ip.gram, tol.zero).is_some() {
                Ok(Cone::second_order(*dim))
            } else {
                Ok(Cone {
                    class: ConeClass::MappedSoc {
                        dim: *dim,
                        map: ip.gram.clone(),
                    },
                    ambient: cone.ambient,
                    rays_exact: None,
                    facets: OnceLock::new(),
                })
            }
        }
        _ => Err(ConeError::UnsupportedCone(
            "dual of a mapped cone".to_string(),
        )),
    }
}

fn scalar_multiple_of_identity(m: &DMatrix<f64>, tol: f64) -> Option<f64> {
    let n = m.nrows();
    let c = m[(0, 0)];
    if c <= 0.0 {
        return None;
    }
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { c } else { 0.0 };
            if (m[(i, j)] - want).abs() > tol * (1.0 + c) {
                return None;
            }
        }
    }
    Some(c)
}

/// Metric projection of `a` onto the cone in the norm induced by `ip`.
pub fn cone_project(
    a: &DVector<f64>,
    cone: &Cone,
    ip: &InnerProduct,
    tol: &Tolerances,
) -> Result<DVector<f64>, ConeError> {
    if a.len() != cone.ambient {
        return Err(ConeError::DimensionMismatch {
            expected: cone.ambient,
            got: a.len(),
        });
    }
    match &cone.class {
        ConeClass::Rays(rays) => project_rays(a, rays, &ip.gram, tol),
        ConeClass::Psd { n } => {
            if scalar_multiple_of_identity(&ip.gram, tol.zero).is_none() {
                return Err(ConeError::UnsupportedMetric(
                    "PSD projection needs a trace-proportional metric".to_string(),
                ));
            }
            let m = herm::coords_to_herm(a, *n);
            let (eigs, vecs) = herm::herm_eigen(&m);
            let clipped = herm::from_eigen(&eigs.map(|e| e.max(0.0)), &vecs);
            Ok(herm::herm_to_coords(&clipped))
        }
        ConeClass::SecondOrder { .. } => {
            if scalar_multiple_of_identity(&ip.gram, tol.zero).is_none() {
                return Err(ConeError::UnsupportedMetric(
                    "second-order projection needs a Euclidean metric".to_string(),
                ));
            }
            Ok(lorentz_project(a))
        }
        _ => Err(ConeError::UnsupportedCone(
            "projection onto a mapped cone".to_string(),
        )),
    }
}

fn lorentz_project(a: &DVector<f64>) -> DVector<f64> {
    let t = a[0];
    let w = a.rows(1, a.len() - 1).clone_owned();
    let nw = w.norm();
    if nw <= t {
        a.clone()
    } else if nw <= -t {
        DVector::zeros(a.len())
    } else {
        let s = (t + nw) / 2.0;
        let mut out = DVector::zeros(a.len());
        out[0] = s;
        if nw > 0.0 {
            let scaled = w * (s / nw);
            out.rows_mut(1, a.len() - 1).copy_from(&scaled);
        }
        out
    }
}

/// Non-negative least squares over generator weights, in the metric given
/// by `gram`: minimizes (a - Gw)^T M (a - Gw) over w >= 0 with an
/// active-set sweep (deterministic start at w = 0, smallest-index ties).
fn project_rays(
    a: &DVector<f64>,
    rays: &[DVector<f64>],
    gram: &DMatrix<f64>,
    tol: &Tolerances,
) -> Result<DVector<f64>, ConeError> {
    let d = a.len();
    let m = rays.len();
    let chol = gram
        .clone()
        .cholesky()
        .ok_or(ConeError::MetricNotPositiveDefinite)?;
    let lt = chol.l().transpose();
    let mut g = DMatrix::zeros(d, m);
    for (j, r) in rays.iter().enumerate() {
        g.set_column(j, r);
    }
    let a_t = &lt * &g; // transformed design matrix
    let b_t = &lt * a;
    let w = nnls(&a_t, &b_t, tol.kkt, 50 * m + 500)?;
    Ok(&g * &w)
}

/// Lawson-Hanson NNLS: minimize |A w - b| over w >= 0.
pub fn nnls(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    tol_kkt: f64,
    max_iter: usize,
) -> Result<DVector<f64>, ConeError> {
    let m = a.ncols();
    let mut w = DVector::zeros(m);
    let mut passive: Vec<usize> = Vec::new();
    let scale = 1.0 + b.norm();
    let mut iterations = 0usize;
    loop {
        iterations += 1;
        if iterations > max_iter {
            let grad = a.transpose() * (b - a * &w);
            return Err(ConeError::NoConvergence {
                iterations,
                residual: grad.amax(),
            });
        }
        let resid = b - a * &w;
        let grad = a.transpose() * &resid;
        // Most violated KKT multiplier among the active (zero) set.
        let mut best: Option<(usize, f64)> = None;
        for j in 0..m {
            if passive.contains(&j) {
                continue;
            }
            let gj = grad[j];
            if gj > tol_kkt * scale && best.is_none_or(|(_, g0)| gj > g0) {
                best = Some((j, gj));
            }
        }
        let Some((j_star, _)) = best else {
            return Ok(w);
        };
        passive.push(j_star);
        // Inner loop: restrict to the passive set and restore feasibility.
        loop {
            iterations += 1;
            if iterations > max_iter {
                return Err(ConeError::NoConvergence {
                    iterations,
                    residual: f64::NAN,
                });
            }
            let sub = a.select_columns(passive.iter());
            let z = sub
                .clone()
                .svd(true, true)
                .solve(b, 1e-13)
                .map_err(|_| ConeError::NoConvergence {
                    iterations,
                    residual: f64::NAN,
                })?;
            if z.iter().all(|&v| v > tol_kkt * scale * 1e-3) {
                w.fill(0.0);
                for (k, &j) in passive.iter().enumerate() {
                    w[j] = z[k];
                }
                break;
            }
            // Step toward z until the first weight hits zero; drop it.
            let mut alpha = f64::INFINITY;
            for (k, &j) in passive.iter().enumerate() {
                if z[k] <= tol_kkt * scale * 1e-3 {
                    let denom = w[j] - z[k];
                    if denom > 0.0 {
                        alpha = alpha.min(w[j] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for (k, &j) in passive.iter().enumerate() {
                w[j] += alpha * (z[k] - w[j]);
            }
            let dropped: Vec<usize> = passive
                .iter()
                .copied()
                .filter(|&j| w[j] <= tol_kkt * scale * 1e-3)
                .collect();
            for j in dropped {
                w[j] = 0.0;
                passive.retain(|&p| p != j);
            }
        }
    }
}

/// Certificate of how an order-isomorphism was verified.
#[derive(Debug, Clone, serde::Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum MapCertificate {
    /// Every generator ray and its preimage checked by facet membership.
    RaysChecked { count: usize },
    /// A generating family of rank-one projectors plus seeded samples.
    RankOnesSampled { count: usize },
    /// Boundary rays of the second-order cone plus seeded samples.
    BoundarySampled { count: usize },
}

/// A certified order-automorphism of a cone.
#[derive(Debug, Clone)]
pub struct ConeMap {
    pub matrix: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
    pub condition: f64,
    pub certificate: MapCertificate,
}

impl ConeMap {
    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.matrix * v
    }
}

/// Verify that `t` maps the cone onto itself in both directions.
pub fn is_order_automorphism(
    t: &DMatrix<f64>,
    cone: &Cone,
    tol: &Tolerances,
    probe_seed: u64,
) -> Result<ConeMap, ConeError> {
    let svd = t.clone().svd(false, false);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if smin <= smax * 1e-13 {
        return Err(ConeError::NotInvertible {
            condition: if smin > 0.0 { smax / smin } else { f64::INFINITY },
        });
    }
    let condition = smax / smin;
    let inverse = t
        .clone()
        .try_inverse()
        .ok_or(ConeError::NotInvertible { condition })?;

    let membership_tol = tol.zero * condition.max(1.0) * 100.0;
    let check =
        |map: &DMatrix<f64>, probes: &[DVector<f64>], dir: &'static str| -> Result<(), ConeError> {
            for (i, p) in probes.iter().enumerate() {
                let image = map * p;
                if !cone.contains(&image, membership_tol) {
                    return Err(ConeError::ConeViolation {
                        index: i,
                        direction: dir,
                        image: image.iter().copied().collect(),
                    });
                }
            }
            Ok(())
        };

    let certificate = match &cone.class {
        ConeClass::Rays(rays) => {
            check(t, rays, "forward")?;
            check(&inverse, rays, "inverse")?;
            MapCertificate::RaysChecked { count: rays.len() }
        }
        ConeClass::Psd { n } => {
            let probes = herm::rank_one_probe_coords(*n, 40, probe_seed);
            check(t, &probes, "forward")?;
            check(&inverse, &probes, "inverse")?;
            MapCertificate::RankOnesSampled {
                count: probes.len(),
            }
        }
        ConeClass::SecondOrder { dim } => {
            let probes = soc_probes(*dim, 40, probe_seed);
            check(t, &probes, "forward")?;
            check(&inverse, &probes, "inverse")?;
            MapCertificate::BoundarySampled {
                count: probes.len(),
            }
        }
        _ => {
            return Err(ConeError::UnsupportedCone(
                "automorphism check on a mapped cone".to_string(),
            ))
        }
    };
    Ok(ConeMap {
        matrix: t.clone(),
        inverse,
        condition,
        certificate,
    })
}

/// Boundary and interior probes of the second-order cone.
fn soc_probes(dim: usize, extra: usize, seed: u64) -> Vec<DVector<f64>> {
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};
    let mut probes = Vec::new();
    let mut apex = DVector::zeros(dim);
    apex[0] = 1.0;
    probes.push(apex);
    for i in 1..dim {
        for sign in [1.0, -1.0] {
            let mut v = DVector::zeros(dim);
            v[0] = 1.0;
            v[i] = sign;
            probes.push(v);
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..extra {
        let mut w: DVector<f64> = DVector::zeros(dim - 1);
        for k in 0..dim - 1 {
            let g: f64 = StandardNormal.sample(&mut rng);
            w[k] = g;
        }
        let nw = w.norm().max(1e-12);
        let mut v = DVector::zeros(dim);
        v[0] = 1.0;
        for k in 0..dim - 1 {
            v[k + 1] = w[k] / nw;
        }
        probes.push(v);
    }
    probes
}

/// Exact equality of two polyhedral cones (ray sets up to positive
/// scaling and permutation); analytic cones compare by tag.
pub fn cone_eq_exact(a: &Cone, b: &Cone) -> Option<bool> {
    match (&a.class, &b.class) {
        (ConeClass::Rays(_), ConeClass::Rays(_)) => {
            Some(a.canonical_rays()? == b.canonical_rays()?)
        }
        (ConeClass::Psd { n: n1 }, ConeClass::Psd { n: n2 }) => Some(n1 == n2),
        (ConeClass::SecondOrder { dim: d1 }, ConeClass::SecondOrder { dim: d2 }) => {
            Some(d1 == d2)
        }
        _ => None,
    }
}
