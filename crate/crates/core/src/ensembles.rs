//! Gaussian ensembles of non-Hermitian matrices in classes A, AI† and AII†.
//!
//! Every ensemble is the projection of an i.i.d. complex Gaussian matrix `G`
//! (real and imaginary parts each of variance `g/2`) onto the linear subspace
//! fixed by the class constraint:
//!
//! | class | constraint          | sample                 |
//! |-------|---------------------|------------------------|
//! | A     | none                | `G`                    |
//! | AI†   | `H = Hᵀ`            | `(G + Gᵀ)/2`           |
//! | AII†  | `Σʸ Hᵀ Σʸ = H`      | `(G + Σʸ Gᵀ Σʸ)/2`     |
//!
//! with `Σʸ = σʸ ⊗ I_N` in the `(first N, last N)` block ordering. This is the
//! density `exp[-tr(H†H)/g]` restricted to the class manifold.
//!
//! Realization `r` of a spec draws from a ChaCha8 generator keyed by the spec
//! seed with stream `r`, so any subset of realizations can be generated on any
//! thread in any order with identical results.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{param, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymmetryClass {
    A,
    AIDagger,
    AIIDagger,
}

impl SymmetryClass {
    pub const ALL: [SymmetryClass; 3] = [Self::A, Self::AIDagger, Self::AIIDagger];

    pub fn name(self) -> &'static str {
        match self {
            Self::A => "A",
            Self::AIDagger => "AIdagger",
            Self::AIIDagger => "AIIdagger",
        }
    }

    /// Matrix dimension for half-dimension `n_half` (`2N` for AII†).
    pub fn matrix_dim(self, n_half: usize) -> usize {
        match self {
            Self::AIIDagger => 2 * n_half,
            _ => n_half,
        }
    }

    /// Large-N spectral radius: `sqrt(gN/2)` for AI†, `sqrt(gN)` for A and AII†.
    pub fn spectral_radius(self, n_half: usize, width: f64) -> f64 {
        match self {
            Self::AIDagger => (width * n_half as f64 / 2.0).sqrt(),
            _ => (width * n_half as f64).sqrt(),
        }
    }

    /// Bulk density of states, eigenvalues counted with multiplicity:
    /// `2/(πg)` for AI† and AII†, `1/(πg)` for A.
    pub fn bulk_density(self, width: f64) -> f64 {
        let base = 1.0 / (std::f64::consts::PI * width);
        match self {
            Self::A => base,
            _ => 2.0 * base,
        }
    }
}

impl fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SymmetryClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '_' && *c != '-')
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "a" => Ok(Self::A),
            "aidagger" | "aid" | "ai†" | "aidag" => Ok(Self::AIDagger),
            "aiidagger" | "aiid" | "aii†" | "aiidag" => Ok(Self::AIIDagger),
            _ => param(format!("unknown symmetry class `{s}`")),
        }
    }
}

/// Everything needed to reproduce one matrix of an ensemble.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnsembleSpec {
    pub class: SymmetryClass,
    pub n_half: usize,
    pub width: f64,
    pub seed: u64,
    pub realization_index: u64,
}

impl EnsembleSpec {
    pub fn new(class: SymmetryClass, n_half: usize, width: f64, seed: u64) -> Result<Self> {
        let spec = Self {
            class,
            n_half,
            width,
            seed,
            realization_index: 0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_half == 0 {
            return param("n_half must be at least 1");
        }
        if !(self.width.is_finite() && self.width > 0.0) {
            return param(format!("width must be positive and finite, got {}", self.width));
        }
        Ok(())
    }

    pub fn with_realization(mut self, realization_index: u64) -> Self {
        self.realization_index = realization_index;
        self
    }

    pub fn dim(&self) -> usize {
        self.class.matrix_dim(self.n_half)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.class.spectral_radius(self.n_half, self.width)
    }

    /// Bulk density of states, eigenvalues counted with multiplicity.
    pub fn bulk_density(&self) -> f64 {
        self.class.bulk_density(self.width)
    }

    fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.realization_index);
        rng
    }
}

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return param("matrix rows must form a square array");
        }
        Ok(Self {
            dim,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Draws the matrix for `spec` (its `realization_index` selects the stream).
pub fn sample(spec: &EnsembleSpec) -> Result<ComplexMatrix> {
    spec.validate()?;
    let dim = spec.dim();
    let mut rng = spec.rng();
    let sigma = (spec.width / 2.0).sqrt();
    let g = ComplexMatrix::from_fn(dim, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(sigma * re, sigma * im)
    });
    Ok(match spec.class {
        SymmetryClass::A => g,
        SymmetryClass::AIDagger => project_symmetric(&g),
        SymmetryClass::AIIDagger => project_self_dual(&g, spec.n_half),
    })
}

fn project_symmetric(g: &ComplexMatrix) -> ComplexMatrix {
    let n = g.dim();
    let mut h = ComplexMatrix::zeros(n);
    for i in 0..n {
        h[(i, i)] = g[(i, i)];
        for j in i + 1..n {
            let v = (g[(i, j)] + g[(j, i)]) * 0.5;
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    h
}

// With G = [[A, B], [C, D]] one has Σʸ Gᵀ Σʸ = [[Dᵀ, -Bᵀ], [-Cᵀ, Aᵀ]], so the
// projection is H₁₁ = (A + Dᵀ)/2 = H₂₂ᵀ with antisymmetric off-diagonal blocks.
fn project_self_dual(g: &ComplexMatrix, n: usize) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(2 * n);
    for i in 0..n {
        for j in 0..n {
            let v = (g[(i, j)] + g[(n + j, n + i)]) * 0.5;
            h[(i, j)] = v;
            h[(n + j, n + i)] = v;
        }
        for j in i + 1..n {
            let b = (g[(i, n + j)] - g[(j, n + i)]) * 0.5;
            h[(i, n + j)] = b;
            h[(j, n + i)] = -b;
            let c = (g[(n + i, j)] - g[(n + j, i)]) * 0.5;
            h[(n + i, j)] = c;
            h[(n + j, i)] = -c;
        }
    }
    h
}

/// `Σʸ Hᵀ Σʸ` for even-dimensional `h`.
pub fn self_dual_image(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let dim = h.dim();
    if dim % 2 != 0 {
        return param(format!("AIIdagger constraint needs an even dimension, got {dim}"));
    }
    let n = dim / 2;
    Ok(ComplexMatrix::from_fn(dim, |i, j| {
        let (bi, ii) = (i / n, i % n);
        let (bj, jj) = (j / n, j % n);
        // block (bi, bj) of Σʸ Hᵀ Σʸ is ±(block (1-bj, 1-bi) of H)ᵀ
        let v = h[((1 - bj) * n + jj, (1 - bi) * n + ii)];
        if bi == bj {
            v
        } else {
            -v
        }
    }))
}

/// Max-norm deviation of `h` from the class constraint (0 for class A).
pub fn check_symmetry(h: &ComplexMatrix, class: SymmetryClass) -> Result<f64> {
    match class {
        SymmetryClass::A => Ok(0.0),
        SymmetryClass::AIDagger => Ok(h.max_abs_diff(&h.transpose())),
        SymmetryClass::AIIDagger => Ok(h.max_abs_diff(&self_dual_image(h)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn symmetric_sample_is_bitwise_symmetric() {
        let spec = EnsembleSpec::new(SymmetryClass::AIDagger, 3, 2.0, 7).unwrap();
        let h = sample(&spec).unwrap();
        assert_eq!(h.dim(), 3);
        assert_eq!(h, h.transpose());
        assert_eq!(check_symmetry(&h, SymmetryClass::AIDagger).unwrap(), 0.0);
    }

    #[test]
    fn self_dual_sample_is_bitwise_self_dual() {
        let spec = EnsembleSpec::new(SymmetryClass::AIIDagger, 2, 1.0, 0).unwrap();
        let h = sample(&spec).unwrap();
        assert_eq!(h.dim(), 4);
        assert_eq!(h, self_dual_image(&h).unwrap());
        assert_eq!(check_symmetry(&h, SymmetryClass::AIIDagger).unwrap(), 0.0);
    }

    #[test]
    fn self_dual_image_matches_explicit_product() {
        // Σʸ = σʸ ⊗ I_N built as a dense matrix
        let n = 3;
        let spec = EnsembleSpec::new(SymmetryClass::A, 2 * n, 1.0, 11).unwrap();
        let g = sample(&spec).unwrap();
        let sy = ComplexMatrix::from_fn(2 * n, |i, j| {
            if i % n != j % n {
                c(0.0, 0.0)
            } else if i < n && j >= n {
                c(0.0, -1.0)
            } else if i >= n && j < n {
                c(0.0, 1.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let mul = |a: &ComplexMatrix, b: &ComplexMatrix| {
            ComplexMatrix::from_fn(a.dim(), |i, j| (0..a.dim()).map(|k| a[(i, k)] * b[(k, j)]).sum())
        };
        let explicit = mul(&mul(&sy, &g.transpose()), &sy);
        assert!(explicit.max_abs_diff(&self_dual_image(&g).unwrap()) < 1e-15);
    }

    #[test]
    fn check_symmetry_examples() {
        let id = ComplexMatrix::identity(2);
        assert_eq!(check_symmetry(&id, SymmetryClass::AIDagger).unwrap(), 0.0);
        let h = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]).unwrap();
        assert_eq!(check_symmetry(&h, SymmetryClass::AIDagger).unwrap(), 1.0);
        assert_eq!(check_symmetry(&h, SymmetryClass::A).unwrap(), 0.0);
        let odd = ComplexMatrix::identity(3);
        assert!(matches!(
            check_symmetry(&odd, SymmetryClass::AIIDagger),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(EnsembleSpec::new(SymmetryClass::A, 0, 1.0, 0).is_err());
        assert!(EnsembleSpec::new(SymmetryClass::A, 2, 0.0, 0).is_err());
        assert!(EnsembleSpec::new(SymmetryClass::A, 2, -1.0, 0).is_err());
        assert!(EnsembleSpec::new(SymmetryClass::A, 2, f64::NAN, 0).is_err());
    }

    #[test]
    fn sampling_is_a_pure_function_of_the_spec() {
        let spec = EnsembleSpec::new(SymmetryClass::AIIDagger, 4, 1.5, 99).unwrap().with_realization(17);
        assert_eq!(sample(&spec).unwrap(), sample(&spec).unwrap());
        let other = spec.with_realization(18);
        assert_ne!(sample(&spec).unwrap(), sample(&other).unwrap());
    }

    #[test]
    fn class_names_round_trip() {
        for class in SymmetryClass::ALL {
            assert_eq!(class.name().parse::<SymmetryClass>().unwrap(), class);
        }
        assert_eq!("AI†".parse::<SymmetryClass>().unwrap(), SymmetryClass::AIDagger);
        assert!("BDI".parse::<SymmetryClass>().is_err());
    }

    #[test]
    fn symmetric_entry_variances() {
        // E|H₁₁|² = g and E|H₁₂|² = g/2 for the projected Gaussian
        let g = 2.0;
        let base = EnsembleSpec::new(SymmetryClass::AIDagger, 2, g, 3).unwrap();
        let count = 1_000_000u64;
        let (mut d, mut o) = (0.0, 0.0);
        for r in 0..count {
            let h = sample(&base.with_realization(r)).unwrap();
            d += h[(0, 0)].norm_sqr();
            o += h[(0, 1)].norm_sqr();
        }
        let (d, o) = (d / count as f64, o / count as f64);
        assert!((d - 2.0).abs() < 0.01, "diag {d}");
        assert!((o - 1.0).abs() < 0.005, "off-diag {o}");
    }
}
