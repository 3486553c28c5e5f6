//! Dense complex linear algebra: general eigenvalues, log-determinants by
//! pivoted LU, and a Hessenberg form for repeated shifted determinants.

use faer::Mat;
use num_complex::Complex64;

use crate::ensembles::ComplexMatrix;
use crate::error::{param, Error, Result};

/// All eigenvalues of a general complex matrix, with multiplicity.
pub fn eigenvalues(h: &ComplexMatrix, realization: u64) -> Result<Vec<Complex64>> {
    if !h.is_finite() {
        return param("matrix has non-finite entries");
    }
    let n = h.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let m = Mat::<Complex64>::from_fn(n, n, |i, j| h[(i, j)]);
    m.eigenvalues().map_err(|_| Error::NoConvergence { realization })
}

/// `ln|det(z − H)|`, or `-∞` when the factorization meets an exact zero pivot.
pub fn log_abs_det(z: Complex64, h: &ComplexMatrix) -> f64 {
    let n = h.dim();
    let mut a: Vec<Complex64> = h.as_slice().iter().map(|&v| -v).collect();
    for i in 0..n {
        a[i * n + i] += z;
    }
    lu_log_abs_det(&mut a, n)
}

/// `ln|det A|` by Gaussian elimination with partial pivoting; `a` is destroyed.
pub fn lu_log_abs_det(a: &mut [Complex64], n: usize) -> f64 {
    debug_assert_eq!(a.len(), n * n);
    let mut acc = 0.0;
    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|i| (i, a[i * n + k].norm()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmax == 0.0 {
            return f64::NEG_INFINITY;
        }
        if p != k {
            for j in k..n {
                a.swap(k * n + j, p * n + j);
            }
        }
        let pivot = a[k * n + k];
        acc += pmax.ln();
        let inv = pivot.inv();
        let (top, bottom) = a.split_at_mut((k + 1) * n);
        let row_k = &top[k * n..];
        for row in bottom.chunks_exact_mut(n) {
            let m = row[k] * inv;
            if m == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in k + 1..n {
                row[j] -= m * row_k[j];
            }
        }
    }
    acc
}

/// Complex `ln det(z − H)` (branch: imaginary part in `(−π, π]` after
/// accumulation), or `None` when the matrix is exactly singular.
pub fn log_det(z: Complex64, h: &ComplexMatrix) -> Option<Complex64> {
    let n = h.dim();
    let mut a: Vec<Complex64> = h.as_slice().iter().map(|&v| -v).collect();
    for i in 0..n {
        a[i * n + i] += z;
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i * n + k].norm().total_cmp(&a[j * n + k].norm()))?;
        let pivot = a[p * n + k];
        if pivot.norm() == 0.0 {
            return None;
        }
        if p != k {
            for j in k..n {
                a.swap(k * n + j, p * n + j);
            }
            acc.im += std::f64::consts::PI;
        }
        acc += pivot.ln();
        let inv = pivot.inv();
        let (top, bottom) = a.split_at_mut((k + 1) * n);
        let row_k = &top[k * n..];
        for row in bottom.chunks_exact_mut(n) {
            let m = row[k] * inv;
            for j in k + 1..n {
                row[j] -= m * row_k[j];
            }
        }
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    acc.im -= two_pi * (acc.im / two_pi).round();
    Some(acc)
}

/// Unitary reduction `Q* H Q` to upper Hessenberg form.
///
/// `det(z − H) = det(z − Q* H Q)`, and the shifted Hessenberg determinant costs
/// `O(n²)`, so a full characteristic-polynomial curve costs one `O(n³)`
/// reduction plus `O(n²)` per evaluation point.
#[derive(Clone, Debug)]
pub struct HessenbergForm {
    n: usize,
    a: Vec<Complex64>,
}

impl HessenbergForm {
    pub fn new(h: &ComplexMatrix) -> Self {
        let n = h.dim();
        let mut a = h.as_slice().to_vec();
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        for k in 0..n.saturating_sub(2) {
            let norm = (k + 1..n).map(|i| a[i * n + k].norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                continue;
            }
            let x0 = a[(k + 1) * n + k];
            let phase = if x0.norm() == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                x0 / x0.norm()
            };
            // v = x + e^{i arg x₀}‖x‖ e₁, reflector I − 2 v v*/‖v‖²
            for i in k + 1..n {
                v[i] = a[i * n + k];
            }
            v[k + 1] += phase * norm;
            let vnorm2: f64 = (k + 1..n).map(|i| v[i].norm_sqr()).sum();
            if vnorm2 == 0.0 {
                continue;
            }
            let beta = 2.0 / vnorm2;
            // left: rows k+1.., columns k..
            for j in k..n {
                let mut s = Complex64::new(0.0, 0.0);
                for i in k + 1..n {
                    s += v[i].conj() * a[i * n + j];
                }
                s *= beta;
                for i in k + 1..n {
                    a[i * n + j] -= v[i] * s;
                }
            }
            // right: all rows, columns k+1..
            for i in 0..n {
                let row = &mut a[i * n..(i + 1) * n];
                let mut s = Complex64::new(0.0, 0.0);
                for j in k + 1..n {
                    s += row[j] * v[j];
                }
                s *= beta;
                for j in k + 1..n {
                    row[j] -= s * v[j].conj();
                }
            }
            a[(k + 1) * n + k] = -phase * norm;
            for i in k + 2..n {
                a[i * n + k] = Complex64::new(0.0, 0.0);
            }
        }
        Self { n, a }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.a[i * self.n + j]
    }

    /// `ln|det(z − H)|` in `O(n²)`; `-∞` for an exactly singular shift.
    pub fn log_abs_det_shifted(&self, z: Complex64) -> f64 {
        let n = self.n;
        let mut work = Vec::with_capacity(n * n);
        self.log_abs_det_shifted_with(z, &mut work)
    }

    /// As [`Self::log_abs_det_shifted`], reusing `work` as scratch space.
    pub fn log_abs_det_shifted_with(&self, z: Complex64, work: &mut Vec<Complex64>) -> f64 {
        let n = self.n;
        work.clear();
        work.extend(self.a.iter().map(|&v| -v));
        for i in 0..n {
            work[i * n + i] += z;
        }
        let a = work.as_mut_slice();
        let mut acc = 0.0;
        for k in 0..n {
            // only row k+1 has a nonzero below the diagonal
            if k + 1 < n && a[(k + 1) * n + k].norm() > a[k * n + k].norm() {
                for j in k..n {
                    a.swap(k * n + j, (k + 1) * n + j);
                }
            }
            let pivot = a[k * n + k];
            let pabs = pivot.norm();
            if pabs == 0.0 {
                return f64::NEG_INFINITY;
            }
            acc += pabs.ln();
            if k + 1 < n {
                let m = a[(k + 1) * n + k] / pivot;
                if m != Complex64::new(0.0, 0.0) {
                    let (top, bottom) = a.split_at_mut((k + 1) * n);
                    let row_k = &top[k * n..];
                    for j in k + 1..n {
                        bottom[j] -= m * row_k[j];
                    }
                }
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{sample, EnsembleSpec, SymmetryClass};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    // Laplace expansion along the first row.
    fn cofactor_det(m: &[Vec<Complex64>]) -> Complex64 {
        let n = m.len();
        if n == 1 {
            return m[0][0];
        }
        let mut det = c(0.0, 0.0);
        for col in 0..n {
            let minor: Vec<Vec<Complex64>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, v)| *v).collect())
                .collect();
            let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
            det += m[0][col] * cofactor_det(&minor) * sign;
        }
        det
    }

    fn rows(h: &ComplexMatrix) -> Vec<Vec<Complex64>> {
        (0..h.dim()).map(|i| (0..h.dim()).map(|j| h[(i, j)]).collect()).collect()
    }

    #[test]
    fn diagonal_and_nilpotent_spectra() {
        let d = ComplexMatrix::diagonal(&[c(1.0, 1.0), c(2.0, 0.0)]);
        let ev = sorted(eigenvalues(&d, 0).unwrap());
        assert!((ev[0] - c(1.0, 1.0)).norm() < 1e-14);
        assert!((ev[1] - c(2.0, 0.0)).norm() < 1e-14);

        let nil = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]).unwrap();
        let ev = eigenvalues(&nil, 0).unwrap();
        assert_eq!(ev.len(), 2);
        assert!(ev.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn cubic_spectrum_matches_companion_roots() {
        let spec = EnsembleSpec::new(SymmetryClass::A, 3, 1.0, 5).unwrap();
        let h = sample(&spec).unwrap();
        let r = rows(&h);
        // characteristic polynomial λ³ − c₂λ² + c₁λ − c₀ from principal minors
        let tr = r[0][0] + r[1][1] + r[2][2];
        let m2 = r[0][0] * r[1][1] - r[0][1] * r[1][0] + r[0][0] * r[2][2] - r[0][2] * r[2][0] + r[1][1] * r[2][2]
            - r[1][2] * r[2][1];
        let det = cofactor_det(&r);
        // roots of the companion polynomial by Durand–Kerner iteration
        let p = |x: Complex64| x * x * x - tr * x * x + m2 * x - det;
        let mut roots = vec![c(0.4, 0.9), c(0.4, 0.9).powu(2), c(0.4, 0.9).powu(3)];
        for _ in 0..500 {
            for i in 0..3 {
                let mut denom = c(1.0, 0.0);
                for j in 0..3 {
                    if i != j {
                        denom *= roots[i] - roots[j];
                    }
                }
                let step = p(roots[i]) / denom;
                roots[i] -= step;
            }
        }
        let ev = sorted(eigenvalues(&h, 0).unwrap());
        let roots = sorted(roots);
        for (a, b) in ev.iter().zip(&roots) {
            assert!((a - b).norm() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn log_abs_det_examples() {
        let zero = ComplexMatrix::zeros(2);
        assert_eq!(log_abs_det(c(1.0, 0.0), &zero), 0.0);
        let d = ComplexMatrix::diagonal(&[c(2.0, 0.0), c(3.0, 0.0)]);
        assert!((log_abs_det(c(0.0, 0.0), &d) - 6f64.ln()).abs() < 1e-15);
        assert_eq!(log_abs_det(c(2.0, 0.0), &d), f64::NEG_INFINITY);
    }

    #[test]
    fn log_abs_det_matches_cofactor_expansion() {
        for seed in 0..20 {
            let spec = EnsembleSpec::new(SymmetryClass::A, 3, 1.0, seed).unwrap();
            let h = sample(&spec).unwrap();
            let z = c(0.3, -0.2);
            let shifted: Vec<Vec<Complex64>> = (0..3)
                .map(|i| (0..3).map(|j| if i == j { z - h[(i, j)] } else { -h[(i, j)] }).collect())
                .collect();
            let oracle = cofactor_det(&shifted).norm().ln();
            assert!((log_abs_det(z, &h) - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn hessenberg_form_is_similar_and_upper_hessenberg() {
        for class in SymmetryClass::ALL {
            let spec = EnsembleSpec::new(class, 12, 1.0, 8).unwrap();
            let h = sample(&spec).unwrap();
            let hess = HessenbergForm::new(&h);
            let n = hess.dim();
            for i in 0..n {
                for j in 0..i.saturating_sub(1) {
                    assert_eq!(hess.entry(i, j), c(0.0, 0.0));
                }
            }
            for z in [c(0.0, 0.0), c(1.5, 0.5), c(-3.0, 2.0)] {
                let direct = log_abs_det(z, &h);
                let fast = hess.log_abs_det_shifted(z);
                assert!((direct - fast).abs() < 1e-11 * direct.abs().max(1.0), "{direct} vs {fast}");
            }
        }
    }
}
