//! Real coordinates for Hermitian operators, frames, and Haar sampling.
//!
//! Hermitian n x n operators form a real space of dimension n^2. The
//! basis used here is orthonormal under the trace form Tr(AB): diagonal
//! units first, then (E_ij + E_ji)/sqrt(2) and i(E_ij - E_ji)/sqrt(2)
//! for i < j. In these coordinates the trace pairing is the ordinary dot
//! product, so densities and effects share one coordinate system.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub fn herm_dim(n: usize) -> usize {
    n * n
}

/// Coordinates of a Hermitian matrix in the orthonormal trace basis.
pub fn herm_to_coords(m: &CMat) -> DVector<f64> {
    let n = m.nrows();
    let mut v = DVector::zeros(n * n);
    let mut k = 0;
    for i in 0..n {
        v[k] = m[(i, i)].re;
        k += 1;
    }
    let s = std::f64::consts::SQRT_2;
    for i in 0..n {
        for j in (i + 1)..n {
            v[k] = s * m[(i, j)].re;
            k += 1;
            v[k] = s * m[(i, j)].im;
            k += 1;
        }
    }
    v
}

/// Inverse of [`herm_to_coords`].
pub fn coords_to_herm(v: &DVector<f64>, n: usize) -> CMat {
    assert_eq!(v.len(), n * n);
    let mut m = CMat::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        m[(i, i)] = Complex64::new(v[k], 0.0);
        k += 1;
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in (i + 1)..n {
            let re = v[k] * s;
            k += 1;
            let im = v[k] * s;
            k += 1;
            m[(i, j)] = Complex64::new(re, im);
            m[(j, i)] = Complex64::new(re, -im);
        }
    }
    m
}

pub fn identity_coords(n: usize) -> DVector<f64> {
    herm_to_coords(&CMat::identity(n, n))
}

pub fn diag_herm(diag: &[f64]) -> CMat {
    let n = diag.len();
    let mut m = CMat::zeros(n, n);
    for (i, &d) in diag.iter().enumerate() {
        m[(i, i)] = Complex64::new(d, 0.0);
    }
    m
}

/// Rank-one projector onto the (normalized) vector.
pub fn projector(v: &CVec) -> CMat {
    let norm = v.norm();
    let u = v / Complex64::new(norm, 0.0);
    let n = u.len();
    let mut m = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = u[i] * u[j].conj();
        }
    }
    m
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues sorted in
/// descending order (deterministic).
pub fn herm_eigen(m: &CMat) -> (DVector<f64>, CMat) {
    let se = nalgebra::SymmetricEigen::new(m.clone());
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        se.eigenvalues[b]
            .partial_cmp(&se.eigenvalues[a])
            .expect("finite eigenvalues")
            .then(a.cmp(&b))
    });
    let eigs = DVector::from_iterator(n, order.iter().map(|&i| se.eigenvalues[i]));
    let mut vecs = CMat::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vecs.set_column(col, &se.eigenvectors.column(i));
    }
    (eigs, vecs)
}

/// Rebuild `V diag(e) V^H` from an eigen-decomposition.
pub fn from_eigen(eigs: &DVector<f64>, vecs: &CMat) -> CMat {
    let n = vecs.nrows();
    let mut d = CMat::zeros(n, n);
    for i in 0..n {
        d[(i, i)] = Complex64::new(eigs[i], 0.0);
    }
    vecs * d * vecs.adjoint()
}

/// Hermitian square root of a PSD matrix (negative ripple clipped).
pub fn sqrt_psd(m: &CMat) -> CMat {
    let (eigs, vecs) = herm_eigen(m);
    from_eigen(&eigs.map(|e| e.max(0.0).sqrt()), &vecs)
}

/// The real n^2 x n^2 matrix of the congruence `A -> S A S` by a
/// Hermitian `S`, in operator coordinates.
pub fn congruence_action(s: &CMat) -> DMatrix<f64> {
    let n = s.nrows();
    let d = n * n;
    let mut out = DMatrix::zeros(d, d);
    for k in 0..d {
        let mut basis = DVector::zeros(d);
        basis[k] = 1.0;
        let h = coords_to_herm(&basis, n);
        let image = s * h * s;
        out.set_column(k, &herm_to_coords(&image));
    }
    out
}

/// The real n^2 x n^2 matrix of the conjugation `A -> U A U^H` in
/// operator coordinates. Orthogonal, since conjugation preserves the
/// trace form.
pub fn conj_action(u: &CMat) -> DMatrix<f64> {
    let n = u.nrows();
    let d = n * n;
    let mut out = DMatrix::zeros(d, d);
    for k in 0..d {
        let mut basis = DVector::zeros(d);
        basis[k] = 1.0;
        let h = coords_to_herm(&basis, n);
        let image = u * h * u.adjoint();
        out.set_column(k, &herm_to_coords(&image));
    }
    out
}

/// Haar-random unitary via complex Ginibre + QR with phase fixing.
pub fn haar_unitary<R: Rng>(n: usize, rng: &mut R) -> CMat {
    let mut z = CMat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            z[(i, j)] = Complex64::new(re, im);
        }
    }
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / Complex64::new(d.norm(), 0.0)
        } else {
            Complex64::new(1.0, 0.0)
        };
        let col = q.column(j) * phase.conj();
        q.set_column(j, &col);
    }
    q
}

/// Haar-random orthogonal matrix via real Ginibre + QR with sign fixing.
pub fn haar_orthogonal<R: Rng>(d: usize, rng: &mut R) -> DMatrix<f64> {
    let mut z = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            z[(i, j)] = StandardNormal.sample(rng);
        }
    }
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            let col = -q.column(j);
            q.set_column(j, &col);
        }
    }
    q
}

/// Haar-random pure state (uniform on the unit sphere).
pub fn random_pure<R: Rng>(n: usize, rng: &mut R) -> CVec {
    loop {
        let mut v = CVec::zeros(n);
        for i in 0..n {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            v[i] = Complex64::new(re, im);
        }
        let norm = v.norm();
        if norm > 1e-6 {
            return v / Complex64::new(norm, 0.0);
        }
    }
}

/// Deterministic generating family of rank-one projectors (as operator
/// coordinates): basis kets, two-level superpositions, plus seeded
/// random pure states.
pub fn rank_one_probe_coords(n: usize, extra: usize, seed: u64) -> Vec<DVector<f64>> {
    use rand::SeedableRng;
    let mut probes = Vec::new();
    let ket = |i: usize| {
        let mut v = CVec::zeros(n);
        v[i] = Complex64::new(1.0, 0.0);
        v
    };
    for i in 0..n {
        probes.push(herm_to_coords(&projector(&ket(i))));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let mut plus = CVec::zeros(n);
            plus[i] = Complex64::new(1.0, 0.0);
            plus[j] = Complex64::new(1.0, 0.0);
            probes.push(herm_to_coords(&projector(&plus)));
            let mut imag = CVec::zeros(n);
            imag[i] = Complex64::new(1.0, 0.0);
            imag[j] = Complex64::new(0.0, 1.0);
            probes.push(herm_to_coords(&projector(&imag)));
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..extra {
        probes.push(herm_to_coords(&projector(&random_pure(n, &mut rng))));
    }
    probes
}

/// Shannon entropy in bits of a non-negative spectrum (0 log 0 = 0).
pub fn entropy_bits(weights: &[f64]) -> f64 {
    // Sorting makes the sum independent of input ordering, which keeps
    // group-invariance of entropies bit-exact.
    let mut w: Vec<f64> = weights.iter().copied().filter(|&x| x > 0.0).collect();
    w.sort_by(|a, b| a.partial_cmp(b).expect("finite weights"));
    let h = -w.iter().map(|&x| x * x.log2()).sum::<f64>();
    if h == 0.0 {
        0.0 // normalize away the negative zero
    } else {
        h
    }
}
