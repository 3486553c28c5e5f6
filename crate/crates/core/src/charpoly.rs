//! Monte Carlo moments of characteristic polynomials,
//! `Zₙ⁽¹⁾(z) = E|det(z−H)|²ⁿ` and `Zₙ⁽²⁾(z₁,z₂) = E|det(z₁−H)|²ⁿ|det(z₂−H)|²ⁿ`.
//!
//! Each realization is reduced to Hessenberg form once; `ln|det(z−H)|` at
//! every grid point then costs `O(dim²)`. Aggregation stays in the log domain.

use num_complex::Complex64;

use crate::ensembles::{sample, ComplexMatrix, EnsembleSpec};
use crate::error::{param, Result};
use crate::linalg::{log_abs_det, log_det, HessenbergForm};
use crate::parallel::{try_map_indexed, Execution};
use crate::stats::{jackknife_log_mean, jackknife_log_ratio};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentEstimate {
    /// Natural log of the estimated moment.
    pub log_mean: f64,
    /// Jackknife standard error of `log_mean`, i.e. the relative error of the moment.
    pub std_error_rel: f64,
    pub n_samples: u64,
    /// Realizations dropped because `z − H` was exactly singular.
    pub dropped: u64,
}

impl MomentEstimate {
    pub fn mean(&self) -> f64 {
        self.log_mean.exp()
    }
}

/// `ln|det(z_k − H)|` for every realization (rows) and grid point (columns).
#[derive(Clone, Debug, PartialEq)]
pub struct LogDetTable {
    pub points: Vec<Complex64>,
    pub rows: Vec<Vec<f64>>,
    pub dropped: u64,
}

impl LogDetTable {
    pub fn n_samples(&self) -> u64 {
        self.rows.len() as u64
    }

    /// Per-sample `Σ_k c_k ln|det(z_k − H)|` for `terms = [(k, c_k)]`.
    pub fn combine(&self, terms: &[(usize, f64)]) -> Vec<f64> {
        self.rows.iter().map(|row| terms.iter().map(|&(k, c)| c * row[k]).sum()).collect()
    }

    /// Moment `E exp(Σ c_k ln|det(z_k − H)|)`.
    pub fn moment(&self, terms: &[(usize, f64)]) -> Result<MomentEstimate> {
        if self.rows.len() < 2 {
            return param("moment estimate needs at least two usable samples");
        }
        let (log_mean, std_error_rel) = if terms.iter().all(|&(_, c)| c == 0.0) {
            (0.0, 0.0)
        } else {
            jackknife_log_mean(&self.combine(terms))
        };
        Ok(MomentEstimate { log_mean, std_error_rel, n_samples: self.n_samples(), dropped: self.dropped })
    }

    /// Log of the ratio of two moments over the same samples, with its
    /// jackknife standard error.
    pub fn log_ratio(&self, num: &[(usize, f64)], den: &[(usize, f64)]) -> Result<(f64, f64)> {
        if self.rows.len() < 2 {
            return param("ratio estimate needs at least two usable samples");
        }
        Ok(jackknife_log_ratio(&self.combine(num), &self.combine(den)))
    }
}

/// Tabulates `ln|det(z − H)|` over `points` for realizations `0..n_samples`.
/// A realization singular at any point is dropped and counted.
pub fn log_det_table(spec: &EnsembleSpec, points: &[Complex64], n_samples: u64, exec: Execution) -> Result<LogDetTable> {
    spec.validate()?;
    let rows = try_map_indexed(0, n_samples, exec, |r| {
        let h = sample(&spec.with_realization(r))?;
        let hess = HessenbergForm::new(&h);
        let mut work = Vec::new();
        Ok(points.iter().map(|&z| hess.log_abs_det_shifted_with(z, &mut work)).collect::<Vec<f64>>())
    })?;
    let total = rows.len();
    let rows: Vec<Vec<f64>> = rows.into_iter().filter(|row| row.iter().all(|v| v.is_finite())).collect();
    let dropped = (total - rows.len()) as u64;
    Ok(LogDetTable { points: points.to_vec(), rows, dropped })
}

fn check_samples(n_samples: u64) -> Result<()> {
    if n_samples < 2 {
        return param(format!("need at least 2 samples, got {n_samples}"));
    }
    Ok(())
}

/// `Zₙ⁽¹⁾(z)`.
pub fn z1_moment_mc(spec: &EnsembleSpec, n: u32, z: Complex64, n_samples: u64, exec: Execution) -> Result<MomentEstimate> {
    check_samples(n_samples)?;
    let table = log_det_table(spec, &[z], n_samples, exec)?;
    table.moment(&[(0, 2.0 * n as f64)])
}

/// `Zₙ⁽²⁾(z₁, z₂)`.
pub fn z2_moment_mc(
    spec: &EnsembleSpec,
    n: u32,
    z1: Complex64,
    z2: Complex64,
    n_samples: u64,
    exec: Execution,
) -> Result<MomentEstimate> {
    check_samples(n_samples)?;
    let table = log_det_table(spec, &[z1, z2], n_samples, exec)?;
    let c = 2.0 * n as f64;
    table.moment(&[(0, c), (1, c)])
}

/// One point of a normalized moment curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub n: u32,
    pub abs_z: f64,
    /// `Z(z)/Z(0) · e^{−2n|z|²/g}` (one-point) or
    /// `Z⁽²⁾(0,z)/Z⁽²⁾(0,0) · e^{−2n|z|²/g}` (two-point).
    pub normalized: f64,
    /// Jackknife standard error of `ln(normalized)`.
    pub rel_std_error: f64,
    pub n_samples: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub points: Vec<CurvePoint>,
    pub dropped: u64,
}

fn grid_points(radii: &[f64]) -> Result<Vec<Complex64>> {
    if radii.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return param("curve radii must be finite and non-negative");
    }
    // z = 0 first, then each radius on the positive real axis
    Ok(std::iter::once(0.0).chain(radii.iter().cloned()).map(|r| Complex64::new(r, 0.0)).collect())
}

/// Normalized `Zₙ⁽¹⁾` curve over `|z| ∈ radii`, for every `n` in `n_list`,
/// from one shared set of realizations.
pub fn one_point_curve(
    spec: &EnsembleSpec,
    n_list: &[u32],
    radii: &[f64],
    n_samples: u64,
    exec: Execution,
) -> Result<Curve> {
    check_samples(n_samples)?;
    let table = log_det_table(spec, &grid_points(radii)?, n_samples, exec)?;
    let mut points = Vec::with_capacity(n_list.len() * radii.len());
    for &n in n_list {
        let c = 2.0 * n as f64;
        for (k, &r) in radii.iter().enumerate() {
            let (lr, se) = if n == 0 { (0.0, 0.0) } else { table.log_ratio(&[(k + 1, c)], &[(0, c)])? };
            points.push(CurvePoint {
                n,
                abs_z: r,
                normalized: (lr - c * r * r / spec.width).exp(),
                rel_std_error: se,
                n_samples: table.n_samples(),
            });
        }
    }
    Ok(Curve { points, dropped: table.dropped })
}

/// Normalized `Zₙ⁽²⁾(0, z₂)` curve over `|z₂| ∈ radii`.
pub fn two_point_curve(
    spec: &EnsembleSpec,
    n_list: &[u32],
    radii: &[f64],
    n_samples: u64,
    exec: Execution,
) -> Result<Curve> {
    check_samples(n_samples)?;
    let table = log_det_table(spec, &grid_points(radii)?, n_samples, exec)?;
    let mut points = Vec::with_capacity(n_list.len() * radii.len());
    for &n in n_list {
        let c = 2.0 * n as f64;
        for (k, &r) in radii.iter().enumerate() {
            let (lr, se) =
                if n == 0 { (0.0, 0.0) } else { table.log_ratio(&[(0, c), (k + 1, c)], &[(0, 2.0 * c)])? };
            points.push(CurvePoint {
                n,
                abs_z: r,
                normalized: (lr - c * r * r / spec.width).exp(),
                rel_std_error: se,
                n_samples: table.n_samples(),
            });
        }
    }
    Ok(Curve { points, dropped: table.dropped })
}

/// `|det(z−H)ⁿ det(z̄−H†)ⁿ / |det(z−H)|²ⁿ − 1|` for one matrix: the two
/// determinants are computed independently.
pub fn conjugation_residual(h: &ComplexMatrix, z: Complex64, n: u32) -> Result<f64> {
    let a = log_det(z, h);
    let b = log_det(z.conj(), &h.adjoint());
    let (Some(a), Some(b)) = (a, b) else {
        return param("z − H is singular");
    };
    let nf = n as f64;
    let reference = 2.0 * nf * log_abs_det(z, h);
    Ok((((a + b) * nf - reference).exp() - 1.0).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::SymmetryClass;
    use crate::nlsm::normalized_one_point;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn n_zero_is_exactly_one() {
        let spec = EnsembleSpec::new(SymmetryClass::AIDagger, 3, 2.0, 1).unwrap();
        let m = z1_moment_mc(&spec, 0, c(0.4, 0.1), 50, Execution::Sequential).unwrap();
        assert_eq!(m.log_mean, 0.0);
        let m = z2_moment_mc(&spec, 0, c(0.4, 0.1), c(-1.0, 0.0), 50, Execution::Sequential).unwrap();
        assert_eq!(m.mean(), 1.0);
    }

    #[test]
    fn one_by_one_moment() {
        // E|z − h|² = |z|² + g
        let spec = EnsembleSpec::new(SymmetryClass::AIDagger, 1, 2.0, 3).unwrap();
        let m = z1_moment_mc(&spec, 1, c(0.6, 0.8), 100_000, Execution::Parallel).unwrap();
        assert!(((m.mean() - 3.0) / 3.0).abs() < 3.0 * m.std_error_rel, "{} ± {}", m.mean(), m.std_error_rel);
    }

    #[test]
    fn coincident_points_reduce_to_one_point_moment() {
        let spec = EnsembleSpec::new(SymmetryClass::AIIDagger, 3, 2.0, 8).unwrap();
        let z = c(0.7, -0.2);
        let two = z2_moment_mc(&spec, 1, z, z, 500, Execution::Sequential).unwrap();
        let one = z1_moment_mc(&spec, 2, z, 500, Execution::Sequential).unwrap();
        assert!((two.log_mean - one.log_mean).abs() <= 1e-10 * one.log_mean.abs().max(1.0));
    }

    #[test]
    fn conjugation_identity_per_sample() {
        for class in SymmetryClass::ALL {
            let spec = EnsembleSpec::new(class, 8, 2.0, 2).unwrap();
            for r in 0..20 {
                let h = sample(&spec.with_realization(r)).unwrap();
                for n in 1..=3 {
                    assert!(conjugation_residual(&h, c(0.3, 1.1), n).unwrap() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn prefix_is_stable_when_samples_grow() {
        let spec = EnsembleSpec::new(SymmetryClass::A, 4, 1.0, 5).unwrap();
        let pts = [c(0.5, 0.0)];
        let small = log_det_table(&spec, &pts, 100, Execution::Parallel).unwrap();
        let large = log_det_table(&spec, &pts, 200, Execution::Sequential).unwrap();
        assert_eq!(small.rows[..], large.rows[..100]);
    }

    #[test]
    fn small_n_curve_tracks_quadrature() {
        let spec = EnsembleSpec::new(SymmetryClass::AIDagger, 2, 2.0, 17).unwrap();
        let radii = [0.5, 1.0, 1.5, 2.0];
        let curve = one_point_curve(&spec, &[1], &radii, 40_000, Execution::Parallel).unwrap();
        for p in &curve.points {
            let exact = normalized_one_point(SymmetryClass::AIDagger, 1, 2, 2.0, p.abs_z * p.abs_z).unwrap();
            let z = (p.normalized / exact).ln() / p.rel_std_error;
            assert!(z.abs() < 4.0, "|z|={} mc={} exact={} z={z}", p.abs_z, p.normalized, exact);
        }
    }

    #[test]
    fn singular_samples_are_dropped() {
        // a point exactly at an eigenvalue of the 1×1 matrix
        let spec = EnsembleSpec::new(SymmetryClass::A, 1, 1.0, 0).unwrap();
        let h = sample(&spec).unwrap();
        let table = log_det_table(&spec, &[h[(0, 0)]], 3, Execution::Sequential).unwrap();
        assert_eq!(table.dropped, 1);
        assert_eq!(table.n_samples(), 2);
    }
}
