//! Adaptive rank-one analog transforms for jammer inhibition.
//!
//! Each cluster of `S` antennas applies `P_c = I - beta_c b_c a_c^H` to its
//! receive signal, which costs one inner product and one scaled subtraction
//! instead of a dense matrix-vector product. The vectors minimize the mean
//! squared error between `beta b a^H y` and the jammer component `h_J s_J`:
//! the objective separates into two generalized Rayleigh quotients, one for
//! `b` (maximize `|h_J^H b|^2 / ||b||^2`) and one for `a` (maximize
//! `|h_J^H a|^2 / (a^H C_y a)`), and for any fixed pair the optimal scaling
//! is
//!
//! ```text
//! beta = Ej (h_J^H a)(b^H h_J) / (||b||^2 a^H C_y a).
//! ```
//!
//! Without alphabet constraints the maximizers are `b = h_J` and
//! `a = Ej C_y^{-1} h_J` with `beta = 1`, in which case `a^H y` is the
//! LMMSE estimate of the jammer signal. With finite phase or quadrature
//! alphabets, the unconstrained solution is quantized componentwise; the
//! alphabet scale is arbitrary because `beta` absorbs it.

use crate::channel::ChannelRealization;
use crate::{CMatrix, CVector, Complex64, Error, Result};
use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::TAU;
#[allow(unused_imports)]
use num_traits::Float;

/// Entry alphabet for the transform vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alphabet {
    /// No constraint; entries are arbitrary complex numbers.
    Unconstrained,
    /// `cardinality` unit-modulus points equidistant in phase.
    Phase { cardinality: usize },
    /// Square grid of `cardinality` points with odd-integer coordinates
    /// `{+-1, +-3, ..., +-(sqrt(AC)-1)}` per axis.
    Quadrature { cardinality: usize },
}

/// Quadrature cardinalities accepted at configuration time.
pub const QUADRATURE_CARDINALITIES: [usize; 3] = [4, 16, 64];

impl Alphabet {
    pub fn is_finite(&self) -> bool {
        !matches!(self, Alphabet::Unconstrained)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Alphabet::Unconstrained => Ok(()),
            Alphabet::Phase { cardinality } if cardinality >= 2 => Ok(()),
            Alphabet::Phase { cardinality } => Err(Error::Config(format!(
                "phase alphabet needs at least 2 points, got {cardinality}"
            ))),
            Alphabet::Quadrature { cardinality }
                if QUADRATURE_CARDINALITIES.contains(&cardinality) =>
            {
                Ok(())
            }
            Alphabet::Quadrature { cardinality } => Err(Error::Config(format!(
                "quadrature alphabet cardinality must be one of {QUADRATURE_CARDINALITIES:?} \
                 (square grids), got {cardinality}"
            ))),
        }
    }

    /// The alphabet points in index order. Quadrature points are indexed
    /// row-major over (re, im) with coordinates ascending.
    pub fn points(&self) -> Vec<Complex64> {
        match *self {
            Alphabet::Unconstrained => Vec::new(),
            Alphabet::Phase { cardinality } => (0..cardinality)
                .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / cardinality as f64))
                .collect(),
            Alphabet::Quadrature { cardinality } => {
                let m = (cardinality as f64).sqrt().round() as usize;
                let level = |j: usize| (2 * j) as f64 - (m as f64 - 1.0);
                (0..cardinality)
                    .map(|k| Complex64::new(level(k / m), level(k % m)))
                    .collect()
            }
        }
    }

    /// Root-mean-square modulus of the alphabet points.
    pub fn rms(&self) -> f64 {
        match *self {
            Alphabet::Unconstrained => 1.0,
            Alphabet::Phase { .. } => 1.0,
            Alphabet::Quadrature { cardinality } => {
                let m = (cardinality as f64).sqrt().round();
                (2.0 * (m * m - 1.0) / 3.0).sqrt()
            }
        }
    }
}

/// Nearest alphabet point to `z` in Euclidean distance.
///
/// Ties go to the lowest alphabet index. Phase alphabets scan all points
/// (Euclidean-nearest equals nearest in angle for unit-modulus points);
/// quadrature alphabets round each axis independently, which is equivalent
/// because the grid is separable.
pub fn nearest_point(z: Complex64, alphabet: &Alphabet) -> Complex64 {
    match *alphabet {
        Alphabet::Unconstrained => z,
        Alphabet::Phase { .. } => {
            let pts = alphabet.points();
            pts[lowest_index_nearest(z, &pts)]
        }
        Alphabet::Quadrature { cardinality } => {
            let m = (cardinality as f64).sqrt().round() as usize;
            Complex64::new(nearest_axis_level(z.re, m), nearest_axis_level(z.im, m))
        }
    }
}

fn lowest_index_nearest(z: Complex64, points: &[Complex64]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (k, p) in points.iter().enumerate() {
        let d = (z - p).norm_sqr();
        if d < best_d {
            best_d = d;
            best = k;
        }
    }
    best
}

/// Nearest of the `m` levels `{-(m-1), ..., -1, +1, ..., +(m-1)}`; exact
/// midpoints round toward the lower level so the combined tie-break matches
/// the lowest point index.
fn nearest_axis_level(x: f64, m: usize) -> f64 {
    let t = (x + (m as f64 - 1.0)) / 2.0;
    let j = (t - 0.5).ceil().max(0.0) as usize;
    (2 * j.min(m - 1)) as f64 - (m as f64 - 1.0)
}

/// Componentwise quantization of `v` onto a finite alphabet.
///
/// The vector is first scaled by (alphabet RMS) / (vector RMS) so the grid
/// covers its dynamic range; the scale change is later absorbed by the
/// optimal `beta`. Every output entry is exactly an alphabet point.
pub fn quantize_vector(v: &CVector, alphabet: &Alphabet) -> Result<CVector> {
    if !alphabet.is_finite() {
        return Err(Error::Config(
            "componentwise quantization needs a finite alphabet".into(),
        ));
    }
    alphabet.validate()?;
    let vec_rms = (v.norm_squared() / v.len() as f64).sqrt();
    let scale = if vec_rms > 0.0 {
        alphabet.rms() / vec_rms
    } else {
        1.0
    };
    Ok(CVector::from_fn(v.len(), |k, _| {
        nearest_point(v[k] * scale, alphabet)
    }))
}

/// Hermitian positive-definite receive covariance `C_y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Covariance(CMatrix);

impl Covariance {
    pub fn new(m: CMatrix) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        Covariance(m)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    /// Checks Hermitian symmetry (relative tolerance 1e-12) and positive
    /// definiteness (Cholesky succeeds).
    pub fn validate(&self) -> Result<()> {
        let m = &self.0;
        let scale = m.iter().map(|z| z.norm()).fold(0.0f64, f64::max).max(1e-300);
        for i in 0..m.nrows() {
            for j in 0..=i {
                let asym = (m[(i, j)] - m[(j, i)].conj()).norm();
                if asym > 1e-12 * scale {
                    return Err(Error::Numerical(format!(
                        "covariance not Hermitian at ({i},{j}): asymmetry {asym:.3e}"
                    )));
                }
            }
        }
        self.cholesky().map(|_| ())
    }

    pub fn cholesky(&self) -> Result<nalgebra::Cholesky<Complex64, nalgebra::Dyn>> {
        nalgebra::Cholesky::new(self.0.clone()).ok_or_else(|| {
            let dmin = (0..self.dim())
                .map(|i| self.0[(i, i)].re)
                .fold(f64::INFINITY, f64::min);
            Error::Numerical(format!(
                "covariance ({dim}x{dim}) is not positive definite; min diagonal {dmin:.3e}",
                dim = self.dim()
            ))
        })
    }

    /// Solves `C_y x = v`.
    pub fn solve(&self, v: &CVector) -> Result<CVector> {
        Ok(self.cholesky()?.solve(v))
    }

    /// The `S x S` diagonal block for cluster `c`.
    pub fn block(&self, cluster: usize, size: usize) -> Covariance {
        Covariance(self.0.view((cluster * size, cluster * size), (size, size)).into_owned())
    }
}

/// Receive covariance `C_y = Es H H^H + Ej h_J h_J^H + N0 I`.
pub fn covariance(h: &CMatrix, h_j: &CVector, es: f64, ej: f64, n0: f64) -> Covariance {
    let b = h.nrows();
    let mut cy = h * h.adjoint() * Complex64::new(es, 0.0);
    cy += h_j * h_j.adjoint() * Complex64::new(ej, 0.0);
    for i in 0..b {
        cy[(i, i)] += Complex64::new(n0, 0.0);
    }
    Covariance(cy)
}

/// Unconstrained optimum of the jammer-nulling objective:
/// `b = h_J`, `a = Ej C_y^{-1} h_J`, `beta = 1`. The inner product `a^H y`
/// is then the LMMSE estimate of the jammer signal.
pub fn unconstrained_solution(
    cy: &Covariance,
    h_j: &CVector,
    ej: f64,
) -> Result<(CVector, CVector, Complex64)> {
    let a = cy.solve(h_j)? * Complex64::new(ej, 0.0);
    Ok((h_j.clone(), a, Complex64::new(1.0, 0.0)))
}

/// Optimal complex scaling for fixed `(b, a)`:
/// `beta = Ej (h_J^H a)(b^H h_J) / (||b||^2 a^H C_y a)`.
///
/// A zero `b` or `a` yields `beta = 0`, i.e. an identity block.
pub fn optimal_beta(
    b: &CVector,
    a: &CVector,
    cy: &Covariance,
    h_j: &CVector,
    ej: f64,
) -> Complex64 {
    let b_energy = b.norm_squared();
    let a_quad = quadratic_form(cy, a);
    if b_energy == 0.0 || a_quad <= 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let num = h_j.dotc(a) * b.dotc(h_j) * ej;
    num / (b_energy * a_quad)
}

/// Real quadratic form `a^H C_y a`.
fn quadratic_form(cy: &Covariance, a: &CVector) -> f64 {
    if a.norm_squared() == 0.0 {
        return 0.0;
    }
    a.dotc(&(cy.matrix() * a)).re
}

/// Closed-form value of the jammer-nulling objective
/// `E || beta b a^H y - h_J s_J ||^2` for arbitrary `(beta, b, a)`:
///
/// ```text
/// |beta|^2 ||b||^2 a^H C_y a + Ej ||h_J||^2
///     - 2 Re{ beta Ej (h_J^H b)(a^H h_J) }
/// ```
pub fn transform_objective(
    beta: Complex64,
    b: &CVector,
    a: &CVector,
    cy: &Covariance,
    h_j: &CVector,
    ej: f64,
) -> f64 {
    let quad = beta.norm_sqr() * b.norm_squared() * quadratic_form(cy, a);
    let cross = beta * h_j.dotc(b) * a.dotc(h_j) * ej;
    quad + ej * h_j.norm_squared() - 2.0 * cross.re
}

/// One cluster's rank-one update `P_c = I - beta b a^H`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformBlock {
    pub beta: Complex64,
    pub b: CVector,
    pub a: CVector,
    pub alphabet: Alphabet,
}

impl TransformBlock {
    pub fn size(&self) -> usize {
        self.b.len()
    }

    /// Dense `S x S` materialization of this block.
    pub fn to_dense(&self) -> CMatrix {
        let s = self.size();
        let mut m = CMatrix::identity(s, s);
        m -= (&self.b * self.a.adjoint()) * self.beta;
        m
    }
}

/// Block-diagonal analog transform of `C` clusters of size `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalogTransform {
    pub blocks: Vec<TransformBlock>,
    pub cluster_size: usize,
}

impl AnalogTransform {
    pub fn num_antennas(&self) -> usize {
        self.blocks.len() * self.cluster_size
    }

    pub fn num_clusters(&self) -> usize {
        self.blocks.len()
    }

    /// Identity transform (`beta = 0` in every cluster); the purely digital
    /// and jammerless baselines use this.
    pub fn identity(num_antennas: usize, cluster_size: usize) -> Result<Self> {
        check_cluster_size(num_antennas, cluster_size)?;
        let blocks = (0..num_antennas / cluster_size)
            .map(|_| TransformBlock {
                beta: Complex64::new(0.0, 0.0),
                b: CVector::zeros(cluster_size),
                a: CVector::zeros(cluster_size),
                alphabet: Alphabet::Unconstrained,
            })
            .collect();
        Ok(AnalogTransform {
            blocks,
            cluster_size,
        })
    }

    /// Dense `B x B` materialization: `diag(P_1, ..., P_C)`.
    pub fn to_dense(&self) -> CMatrix {
        let b = self.num_antennas();
        let s = self.cluster_size;
        let mut m = CMatrix::zeros(b, b);
        for (c, block) in self.blocks.iter().enumerate() {
            m.view_mut((c * s, c * s), (s, s)).copy_from(&block.to_dense());
        }
        m
    }
}

fn check_cluster_size(num_antennas: usize, cluster_size: usize) -> Result<()> {
    if cluster_size == 0 || !num_antennas.is_multiple_of(cluster_size) {
        return Err(Error::Config(format!(
            "cluster size {cluster_size} must divide the antenna count {num_antennas}"
        )));
    }
    Ok(())
}

/// Builds the per-cluster transform for a channel realization.
///
/// Each cluster uses only its own slice of the jammer channel and the
/// corresponding `S x S` diagonal block of `C_y`. Finite alphabets quantize
/// the unconstrained solution componentwise; `beta` is then re-optimized
/// for the quantized vectors.
pub fn build_transform(
    chan: &ChannelRealization,
    cluster_size: usize,
    alphabet: Alphabet,
) -> Result<AnalogTransform> {
    let b_ant = chan.num_antennas();
    check_cluster_size(b_ant, cluster_size)?;
    alphabet.validate()?;
    let num_clusters = b_ant / cluster_size;
    let mut blocks = Vec::with_capacity(num_clusters);
    for c in 0..num_clusters {
        let h_c = chan.h.rows(c * cluster_size, cluster_size).into_owned();
        let hj_c = chan.h_j.rows(c * cluster_size, cluster_size).into_owned();
        let cy_c = covariance(&h_c, &hj_c, chan.es, chan.ej, chan.n0);
        let (mut b, mut a, _) = unconstrained_solution(&cy_c, &hj_c, chan.ej)?;
        if alphabet.is_finite() {
            b = quantize_vector(&b, &alphabet)?;
            a = quantize_vector(&a, &alphabet)?;
        }
        let beta = optimal_beta(&b, &a, &cy_c, &hj_c, chan.ej);
        blocks.push(TransformBlock {
            beta,
            b,
            a,
            alphabet,
        });
    }
    Ok(AnalogTransform {
        blocks,
        cluster_size,
    })
}

/// Applies the transform clusterwise: `y_c - beta_c (a_c^H y_c) b_c`.
/// Never materializes a dense matrix.
pub fn apply_transform(t: &AnalogTransform, y: &CVector) -> CVector {
    assert_eq!(y.len(), t.num_antennas(), "signal length must match transform");
    let s = t.cluster_size;
    let mut out = y.clone();
    for (c, block) in t.blocks.iter().enumerate() {
        if block.beta == Complex64::new(0.0, 0.0) {
            continue;
        }
        let yc = y.rows(c * s, s);
        let inner = block.a.dotc(&yc) * block.beta;
        let mut oc = out.rows_mut(c * s, s);
        oc.axpy(-inner, &block.b, Complex64::new(1.0, 0.0));
    }
    out
}

/// Closed-form residual jammer MSE of the transform, summed over clusters:
/// for each cluster, `Ej ||h_J||^2 - Ej^2 (|h_J^H b|^2 / ||b||^2)
/// (|h_J^H a|^2 / (a^H C_y a))`, the objective value after optimizing
/// `beta` for the block's vectors. Blocks with zero vectors contribute the
/// unsuppressed `Ej ||h_J||^2`.
pub fn residual_jammer_mse(t: &AnalogTransform, chan: &ChannelRealization) -> f64 {
    let s = t.cluster_size;
    let ej = chan.ej;
    let mut total = 0.0;
    for (c, block) in t.blocks.iter().enumerate() {
        let h_c = chan.h.rows(c * s, s).into_owned();
        let hj_c = chan.h_j.rows(c * s, s).into_owned();
        let cy_c = covariance(&h_c, &hj_c, chan.es, ej, chan.n0);
        let b_energy = block.b.norm_squared();
        let a_quad = quadratic_form(&cy_c, &block.a);
        let mut suppression = 0.0;
        if b_energy > 0.0 && a_quad > 0.0 {
            let fb = hj_c.dotc(&block.b).norm_sqr() / b_energy;
            let fa = hj_c.dotc(&block.a).norm_sqr() / a_quad;
            suppression = ej * ej * fb * fa;
        }
        total += ej * hj_c.norm_squared() - suppression;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{complex_gaussian, complex_gaussian_vector, derive_rng};
    use proptest::prelude::*;

    fn random_instance(seed: u64, dim: usize, users: usize) -> (Covariance, CVector, f64) {
        let mut rng = derive_rng(seed, &[0x7a]);
        let h = CMatrix::from_fn(dim, users, |_, _| complex_gaussian(&mut rng, 1.0));
        let h_j = complex_gaussian_vector(&mut rng, dim, 1.0);
        let ej = 10.0;
        (covariance(&h, &h_j, 1.0, ej, 0.1), h_j, ej)
    }

    fn random_channel(seed: u64, b: usize, u: usize, ej: f64, n0: f64) -> ChannelRealization {
        let mut rng = derive_rng(seed, &[0x7b]);
        ChannelRealization {
            h: CMatrix::from_fn(b, u, |_, _| complex_gaussian(&mut rng, 1.0)),
            h_j: complex_gaussian_vector(&mut rng, b, 1.0),
            es: 1.0,
            ej,
            n0,
        }
    }

    #[test]
    fn covariance_reduces_to_noise_floor() {
        let h = CMatrix::zeros(3, 2);
        let h_j = CVector::zeros(3);
        let cy = covariance(&h, &h_j, 1.0, 0.0, 0.5);
        let expected = CMatrix::identity(3, 3) * Complex64::new(0.5, 0.0);
        assert_eq!(cy.matrix(), &expected);
    }

    #[test]
    fn covariance_two_by_two_hand_value() {
        // H = e1, h_J = e2, Es = Ej = N0 = 1 -> diag(2, 2).
        let mut h = CMatrix::zeros(2, 1);
        h[(0, 0)] = Complex64::new(1.0, 0.0);
        let mut h_j = CVector::zeros(2);
        h_j[1] = Complex64::new(1.0, 0.0);
        let cy = covariance(&h, &h_j, 1.0, 1.0, 1.0);
        let expected = CMatrix::identity(2, 2) * Complex64::new(2.0, 0.0);
        assert!((cy.matrix() - expected).norm() < 1e-15);
    }

    #[test]
    fn covariance_is_hermitian_positive_definite() {
        let (cy, _, _) = random_instance(5, 6, 4);
        cy.validate().unwrap();
    }

    #[test]
    fn unconstrained_solution_without_jammer_is_identity() {
        let (cy, h_j, _) = random_instance(6, 4, 2);
        let (b, a, beta) = unconstrained_solution(&cy, &h_j, 0.0).unwrap();
        assert_eq!(b, h_j);
        assert!(a.norm_squared() == 0.0);
        assert_eq!(beta, Complex64::new(1.0, 0.0));
        // With a = 0 the induced block is the identity.
        let block = TransformBlock {
            beta: optimal_beta(&b, &a, &cy, &h_j, 0.0),
            b,
            a,
            alphabet: Alphabet::Unconstrained,
        };
        assert_eq!(block.beta, Complex64::new(0.0, 0.0));
        assert!((block.to_dense() - CMatrix::identity(4, 4)).norm() == 0.0);
    }

    #[test]
    fn unconstrained_solution_diagonal_covariance() {
        let c = 2.5;
        let cy = Covariance::new(CMatrix::identity(3, 3) * Complex64::new(c, 0.0));
        let mut h_j = CVector::zeros(3);
        h_j[0] = Complex64::new(1.0, 0.0);
        let ej = 4.0;
        let (b, a, _) = unconstrained_solution(&cy, &h_j, ej).unwrap();
        assert!((b[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((a[0] - Complex64::new(ej / c, 0.0)).norm() < 1e-12);
        assert!(a[1].norm() < 1e-15 && a[2].norm() < 1e-15);
    }

    #[test]
    fn inner_product_with_a_is_the_jammer_lmmse_estimate() {
        // a^H y must equal Ej h_J^H Cy^{-1} y (scalar Wiener filter); the
        // oracle inverts Cy by LU instead of the implementation's Cholesky.
        let (cy, h_j, ej) = random_instance(7, 4, 3);
        let (_, a, _) = unconstrained_solution(&cy, &h_j, ej).unwrap();
        let cy_inv = cy.matrix().clone().try_inverse().unwrap();
        let wiener = (&cy_inv * &h_j) * Complex64::new(ej, 0.0);
        let mut rng = derive_rng(8, &[1]);
        for _ in 0..50 {
            let y = complex_gaussian_vector(&mut rng, 4, 1.0);
            let estimate = a.dotc(&y);
            let oracle = wiener.dotc(&y);
            assert!(
                (estimate - oracle).norm() < 1e-9 * (1.0 + oracle.norm()),
                "LMMSE mismatch: {estimate} vs {oracle}"
            );
        }
    }

    #[test]
    fn phase_quantization_picks_nearest_angle() {
        let alph = Alphabet::Phase { cardinality: 4 };
        let q = nearest_point(Complex64::new(1.0, 0.1), &alph);
        assert_eq!(q, Complex64::from_polar(1.0, 0.0));
    }

    #[test]
    fn exact_phase_tie_goes_to_lower_index() {
        let alph = Alphabet::Phase { cardinality: 8 };
        let pts = alph.points();
        // Midpoint of points 2 and 3 is exactly equidistant from both in
        // floating point: the differences are exact negations.
        let mid = (pts[2] + pts[3]) * Complex64::new(0.5, 0.0);
        assert_eq!(nearest_point(mid, &alph), pts[2]);
    }

    #[test]
    fn quadrature_rounding_matches_exhaustive_search() {
        let alph = Alphabet::Quadrature { cardinality: 16 };
        let pts = alph.points();
        let mut rng = derive_rng(13, &[0]);
        for _ in 0..1000 {
            let z = complex_gaussian(&mut rng, 8.0);
            let fast = nearest_point(z, &alph);
            let brute = pts[lowest_index_nearest(z, &pts)];
            assert_eq!(fast, brute, "mismatch at {z}");
        }
    }

    #[test]
    fn quadrature_tie_goes_to_lowest_index() {
        let alph = Alphabet::Quadrature { cardinality: 16 };
        // 0 is exactly between levels -1 and +1 on both axes; the lowest
        // combined index has both coordinates at -1.
        assert_eq!(
            nearest_point(Complex64::new(0.0, 0.0), &alph),
            Complex64::new(-1.0, -1.0)
        );
        // Midpoint on one axis only.
        assert_eq!(
            nearest_point(Complex64::new(2.0, 0.7), &alph),
            Complex64::new(1.0, 1.0)
        );
    }

    #[test]
    fn quantize_vector_outputs_alphabet_points() {
        let alph = Alphabet::Phase { cardinality: 16 };
        let pts = alph.points();
        let mut rng = derive_rng(14, &[0]);
        let v = complex_gaussian_vector(&mut rng, 32, 3.0);
        let q = quantize_vector(&v, &alph).unwrap();
        for k in 0..32 {
            assert!(pts.contains(&q[k]), "entry {k} is not an alphabet point");
        }
    }

    #[test]
    fn quantize_rejects_unconstrained() {
        let v = CVector::zeros(2);
        assert!(quantize_vector(&v, &Alphabet::Unconstrained).is_err());
    }

    #[test]
    fn optimal_beta_is_one_for_unconstrained_pair() {
        let (cy, h_j, ej) = random_instance(20, 5, 3);
        let (b, a, _) = unconstrained_solution(&cy, &h_j, ej).unwrap();
        let beta = optimal_beta(&b, &a, &cy, &h_j, ej);
        assert!((beta - Complex64::new(1.0, 0.0)).norm() < 1e-10, "beta = {beta}");
    }

    #[test]
    fn optimal_beta_zero_cases() {
        let (cy, h_j, _) = random_instance(21, 4, 2);
        let b = CVector::zeros(4);
        let a = CVector::zeros(4);
        assert_eq!(optimal_beta(&b, &a, &cy, &h_j, 5.0), Complex64::new(0.0, 0.0));
        let (b, a, _) = unconstrained_solution(&cy, &h_j, 1.0).unwrap();
        assert_eq!(optimal_beta(&b, &a, &cy, &h_j, 0.0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn optimal_beta_is_a_local_minimizer_for_quantized_vectors() {
        for seed in 0..20 {
            let (cy, h_j, ej) = random_instance(100 + seed, 4, 3);
            let (b_u, a_u, _) = unconstrained_solution(&cy, &h_j, ej).unwrap();
            let alph = Alphabet::Phase { cardinality: 8 };
            let b = quantize_vector(&b_u, &alph).unwrap();
            let a = quantize_vector(&a_u, &alph).unwrap();
            let beta = optimal_beta(&b, &a, &cy, &h_j, ej);
            let best = transform_objective(beta, &b, &a, &cy, &h_j, ej);
            let scale = 1.0 + best.abs();
            for perturbed in [
                beta * Complex64::new(1.0 + 1e-3, 0.0),
                beta * Complex64::new(1.0 - 1e-3, 0.0),
                beta * Complex64::from_polar(1.0, 1e-3),
                beta * Complex64::from_polar(1.0, -1e-3),
            ] {
                let val = transform_objective(perturbed, &b, &a, &cy, &h_j, ej);
                assert!(
                    val >= best - 1e-12 * scale,
                    "objective decreased: {val} < {best}"
                );
            }
        }
    }

    #[test]
    fn single_cluster_unconstrained_matches_closed_form_projector() {
        // Dense P must equal I - Ej h_J h_J^H Cy^{-1}; the oracle inverts by
        // LU rather than Cholesky.
        let chan = random_channel(30, 6, 3, 8.0, 0.2);
        let t = build_transform(&chan, 6, Alphabet::Unconstrained).unwrap();
        assert_eq!(t.num_clusters(), 1);
        let dense = t.to_dense();
        let cy = covariance(&chan.h, &chan.h_j, chan.es, chan.ej, chan.n0);
        let cy_inv = cy.matrix().clone().try_inverse().unwrap();
        let outer = &chan.h_j * chan.h_j.adjoint() * Complex64::new(chan.ej, 0.0);
        let expected = CMatrix::identity(6, 6) - outer * cy_inv;
        let rel = (&dense - &expected).norm() / expected.norm();
        assert!(rel < 1e-10, "relative deviation {rel}");
    }

    #[test]
    fn cluster_count_follows_antenna_partition() {
        let chan = random_channel(31, 256, 8, 5.0, 0.5);
        let t = build_transform(&chan, 64, Alphabet::Unconstrained).unwrap();
        assert_eq!(t.num_clusters(), 4);
        assert!(build_transform(&chan, 48, Alphabet::Unconstrained).is_err());
    }

    #[test]
    fn finite_alphabet_blocks_hold_alphabet_entries() {
        let chan = random_channel(32, 16, 4, 10.0, 0.3);
        let alph = Alphabet::Phase { cardinality: 16 };
        let t = build_transform(&chan, 8, alph).unwrap();
        let pts = alph.points();
        for block in &t.blocks {
            for k in 0..block.size() {
                assert!(pts.contains(&block.b[k]));
                assert!(pts.contains(&block.a[k]));
                assert!((block.b[k].norm() - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_beta_blocks_leave_signal_unchanged() {
        let t = AnalogTransform::identity(8, 4).unwrap();
        let mut rng = derive_rng(33, &[0]);
        let y = complex_gaussian_vector(&mut rng, 8, 1.0);
        assert_eq!(apply_transform(&t, &y), y);
    }

    #[test]
    fn rank_one_application_matches_dense_materialization() {
        let mut rng = derive_rng(34, &[0]);
        for trial in 0..1000 {
            let chan = random_channel(4000 + trial, 8, 3, 6.0, 0.2);
            let alph = if trial % 2 == 0 {
                Alphabet::Unconstrained
            } else {
                Alphabet::Quadrature { cardinality: 16 }
            };
            let t = build_transform(&chan, 4, alph).unwrap();
            let dense = t.to_dense();
            let y = complex_gaussian_vector(&mut rng, 8, 2.0);
            let fast = apply_transform(&t, &y);
            let slow = &dense * &y;
            let rel = (&fast - &slow).norm() / slow.norm().max(1e-300);
            assert!(rel < 1e-12, "trial {trial}: relative deviation {rel}");
        }
    }

    #[test]
    fn jammer_direction_is_suppressed() {
        // With no UE signal and vanishing noise, P y shrinks y = h_J by the
        // factor N0 / (Ej ||h_J||^2 + N0).
        let mut chan = random_channel(35, 8, 1, 50.0, 1e-4);
        chan.h = CMatrix::zeros(8, 1);
        let chan = ChannelRealization {
            h: chan.h,
            h_j: chan.h_j,
            es: 0.0,
            ej: chan.ej,
            n0: chan.n0,
        };
        let t = build_transform(&chan, 8, Alphabet::Unconstrained).unwrap();
        let y = chan.h_j.clone();
        let out = apply_transform(&t, &y);
        assert!(
            out.norm() < 1e-3 * y.norm(),
            "jammer energy not suppressed: {} vs {}",
            out.norm(),
            y.norm()
        );
    }

    #[test]
    fn residual_mse_without_transform_is_total_jammer_energy() {
        let chan = random_channel(36, 8, 2, 7.0, 0.4);
        let t = AnalogTransform::identity(8, 4).unwrap();
        let expected = chan.ej * chan.h_j.norm_squared();
        let got = residual_jammer_mse(&t, &chan);
        assert!((got - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn unconstrained_residual_beats_random_search() {
        let chan = random_channel(37, 6, 3, 9.0, 0.3);
        let t = build_transform(&chan, 6, Alphabet::Unconstrained).unwrap();
        let best = residual_jammer_mse(&t, &chan);
        let cy = covariance(&chan.h, &chan.h_j, chan.es, chan.ej, chan.n0);
        let mut rng = derive_rng(38, &[0]);
        for _ in 0..10_000 {
            let b = complex_gaussian_vector(&mut rng, 6, 1.0);
            let a = complex_gaussian_vector(&mut rng, 6, 1.0);
            let beta = optimal_beta(&b, &a, &cy, &chan.h_j, chan.ej);
            let val = transform_objective(beta, &b, &a, &cy, &chan.h_j, chan.ej);
            assert!(
                best <= val + 1e-9 * (1.0 + val.abs()),
                "random candidate beat the closed form: {val} < {best}"
            );
        }
    }

    #[test]
    fn residual_mse_matches_monte_carlo() {
        let chan = random_channel(39, 4, 2, 5.0, 0.5);
        let t = build_transform(&chan, 4, Alphabet::Phase { cardinality: 8 }).unwrap();
        let closed = residual_jammer_mse(&t, &chan);
        let block = &t.blocks[0];
        let mut rng = derive_rng(40, &[0]);
        let n = 100_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let s = complex_gaussian_vector(&mut rng, 2, chan.es);
            let sj = complex_gaussian(&mut rng, chan.ej);
            let noise = complex_gaussian_vector(&mut rng, 4, chan.n0);
            let y = &chan.h * s + &chan.h_j * sj + noise;
            let est = (&block.b * (block.a.dotc(&y) * block.beta)) - (&chan.h_j * sj);
            acc += est.norm_squared();
        }
        let mc = acc / n as f64;
        assert!(
            (mc - closed).abs() < 0.01 * closed,
            "Monte Carlo {mc} vs closed form {closed}"
        );
    }

    #[test]
    fn separability_on_exhaustive_small_alphabet() {
        // S = 2, AC = 4: sweep all 16 x 16 (b, a) pairs; the joint optimum
        // must factor into the independent Rayleigh-quotient maximizers.
        for seed in 0..10 {
            let (cy, h_j, ej) = random_instance(200 + seed, 2, 3);
            let alph = Alphabet::Phase { cardinality: 4 };
            let pts = alph.points();
            let mut vectors = Vec::new();
            for i in 0..4 {
                for j in 0..4 {
                    vectors.push(CVector::from_vec(alloc::vec![pts[i], pts[j]]));
                }
            }
            let mut best_joint = f64::INFINITY;
            let mut best_fb: f64 = 0.0;
            let mut best_fa: f64 = 0.0;
            for b in &vectors {
                for a in &vectors {
                    let beta = optimal_beta(b, a, &cy, &h_j, ej);
                    let val = transform_objective(beta, b, a, &cy, &h_j, ej);
                    best_joint = best_joint.min(val);
                    let fb = h_j.dotc(b).norm_sqr() / b.norm_squared();
                    let fa = h_j.dotc(a).norm_sqr() / quadratic_form(&cy, a);
                    best_fb = best_fb.max(fb);
                    best_fa = best_fa.max(fa);
                }
            }
            let factored = ej * h_j.norm_squared() - ej * ej * best_fb * best_fa;
            assert!(
                (best_joint - factored).abs() < 1e-9 * (1.0 + factored.abs()),
                "joint {best_joint} vs factored {factored}"
            );
        }
    }

    #[test]
    fn cauchy_schwarz_bounds_hold_with_equality_at_optimum() {
        let (cy, h_j, ej) = random_instance(50, 5, 3);
        let (b, a, _) = unconstrained_solution(&cy, &h_j, ej).unwrap();
        let bound_b = h_j.norm_squared();
        let bound_a = h_j.dotc(&cy.solve(&h_j).unwrap()).re;
        let mut rng = derive_rng(51, &[0]);
        for _ in 0..10_000 {
            let v = complex_gaussian_vector(&mut rng, 5, 1.0);
            let fb = h_j.dotc(&v).norm_sqr() / v.norm_squared();
            let fa = h_j.dotc(&v).norm_sqr() / quadratic_form(&cy, &v);
            assert!(fb <= bound_b * (1.0 + 1e-12));
            assert!(fa <= bound_a * (1.0 + 1e-12));
        }
        let fb_opt = h_j.dotc(&b).norm_sqr() / b.norm_squared();
        let fa_opt = h_j.dotc(&a).norm_sqr() / quadratic_form(&cy, &a);
        assert!((fb_opt - bound_b).abs() < 1e-9 * bound_b);
        assert!((fa_opt - bound_a).abs() < 1e-9 * bound_a);
    }

    #[test]
    fn alphabet_scale_is_absorbed_by_beta() {
        let chan = random_channel(52, 8, 3, 12.0, 0.2);
        let cy = covariance(&chan.h, &chan.h_j, chan.es, chan.ej, chan.n0);
        let alph = Alphabet::Quadrature { cardinality: 16 };
        let (b_u, a_u, _) = unconstrained_solution(&cy, &chan.h_j, chan.ej).unwrap();
        let b = quantize_vector(&b_u, &alph).unwrap();
        let a = quantize_vector(&a_u, &alph).unwrap();
        let beta = optimal_beta(&b, &a, &cy, &chan.h_j, chan.ej);
        let reference = CMatrix::identity(8, 8) - (&b * a.adjoint()) * beta;
        for t_scale in [0.25, 3.0, 17.5] {
            let bs = &b * Complex64::new(t_scale, 0.0);
            let as_ = &a * Complex64::new(t_scale, 0.0);
            let beta_s = optimal_beta(&bs, &as_, &cy, &chan.h_j, chan.ej);
            let scaled = CMatrix::identity(8, 8) - (&bs * as_.adjoint()) * beta_s;
            let rel = (&scaled - &reference).norm() / reference.norm();
            assert!(rel < 1e-12, "scale {t_scale}: deviation {rel}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn quantized_entries_are_always_alphabet_points(seed in 0u64..1000) {
            let mut rng = derive_rng(seed, &[0x55]);
            let v = complex_gaussian_vector(&mut rng, 6, 2.0);
            for alph in [Alphabet::Phase { cardinality: 8 }, Alphabet::Quadrature { cardinality: 16 }] {
                let pts = alph.points();
                let q = quantize_vector(&v, &alph).unwrap();
                for k in 0..6 {
                    prop_assert!(pts.contains(&q[k]));
                }
            }
        }
    }
}
