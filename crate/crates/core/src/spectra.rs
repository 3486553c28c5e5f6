//! Complex spectra and the observables built from them: radial density,
//! pair correlation and small-matrix level spacings.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::ensembles::{sample, ComplexMatrix, EnsembleSpec, SymmetryClass};
use crate::error::{param, Error, Result};
use crate::linalg;
use crate::parallel::{try_map_indexed, Execution};

/// Eigenvalues with multiplicity, plus the spec (and realization) they came from.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSpectrum {
    pub eigenvalues: Vec<Complex64>,
    pub source: Option<EnsembleSpec>,
}

impl ComplexSpectrum {
    pub fn synthetic(eigenvalues: Vec<Complex64>) -> Self {
        Self { eigenvalues, source: None }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn class(&self) -> Option<SymmetryClass> {
        self.source.map(|s| s.class)
    }
}

/// Full spectrum of a general complex matrix.
pub fn eigenvalues(h: &ComplexMatrix) -> Result<ComplexSpectrum> {
    Ok(ComplexSpectrum::synthetic(linalg::eigenvalues(h, 0)?))
}

/// Samples the matrix for `spec` and diagonalizes it.
pub fn sample_spectrum(spec: &EnsembleSpec) -> Result<ComplexSpectrum> {
    let h = sample(spec)?;
    let eigenvalues = linalg::eigenvalues(&h, spec.realization_index)?;
    Ok(ComplexSpectrum { eigenvalues, source: Some(*spec) })
}

/// Spectra for realizations `start .. start + count` of `spec`, in order.
pub fn sample_spectra(spec: &EnsembleSpec, start: u64, count: u64, exec: Execution) -> Result<Vec<ComplexSpectrum>> {
    spec.validate()?;
    try_map_indexed(start, count, exec, |r| sample_spectrum(&spec.with_realization(r)))
}

// ---------------------------------------------------------------------------
// Kramers pairs

#[derive(Clone, Debug, PartialEq)]
pub struct KramersPairs {
    /// One representative (the pair mean) per doublet.
    pub spectrum: ComplexSpectrum,
    /// Largest distance between the two members of a pair.
    pub max_residual: f64,
}

/// Pairing residual allowed, relative to the spectral radius.
pub const KRAMERS_TOLERANCE: f64 = 1e-6;

/// Collapses each twofold-degenerate pair to one representative by greedy
/// nearest-neighbour matching.
pub fn kramers_dedup(spectrum: &ComplexSpectrum) -> Result<KramersPairs> {
    if let Some(class) = spectrum.class() {
        if class != SymmetryClass::AIIDagger {
            return param(format!("Kramers pairing applies to AII† spectra, got {class}"));
        }
    }
    let n = spectrum.len();
    if n % 2 != 0 {
        return param(format!("Kramers pairing needs an even eigenvalue count, got {n}"));
    }
    let radius = match spectrum.source {
        Some(s) => s.spectral_radius(),
        None => spectrum.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0),
    };
    let threshold = KRAMERS_TOLERANCE * radius;
    let ev = &spectrum.eigenvalues;
    let mut used = vec![false; n];
    let mut reps = Vec::with_capacity(n / 2);
    let mut max_residual: f64 = 0.0;
    for i in 0..n {
        if used[i] {
            continue;
        }
        used[i] = true;
        let (j, d) = (0..n)
            .filter(|&j| !used[j])
            .map(|j| (j, (ev[j] - ev[i]).norm()))
            .fold((usize::MAX, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
        used[j] = true;
        max_residual = max_residual.max(d);
        reps.push((ev[i] + ev[j]) * 0.5);
    }
    if max_residual > threshold {
        return Err(Error::DegeneracyViolation { residual: max_residual, threshold });
    }
    Ok(KramersPairs { spectrum: ComplexSpectrum { eigenvalues: reps, source: spectrum.source }, max_residual })
}

// ---------------------------------------------------------------------------
// Binned estimates

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HistogramKind {
    RadialDensity,
    PairCorrelation,
    Spacing,
}

impl HistogramKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::RadialDensity => "radial_density",
            Self::PairCorrelation => "pair_correlation",
            Self::Spacing => "spacing",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HistogramEstimate {
    pub kind: HistogramKind,
    pub bin_edges: Vec<f64>,
    /// Normalized estimate per bin.
    pub values: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// Raw (weighted) counts per bin, summed over samples.
    pub counts: Vec<f64>,
    pub n_samples: u64,
    pub normalization: String,
}

impl HistogramEstimate {
    pub fn n_bins(&self) -> usize {
        self.values.len()
    }

    pub fn centers(&self) -> Vec<f64> {
        self.bin_edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
    }
}

fn validate_edges(edges: &[f64]) -> Result<()> {
    if edges.len() < 2 {
        return param("need at least two bin edges");
    }
    if edges[0] < 0.0 || edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[1] <= w[0]) {
        return param("bin edges must be finite, non-negative and strictly increasing");
    }
    Ok(())
}

fn find_bin(edges: &[f64], x: f64) -> Option<usize> {
    if x < edges[0] || x >= edges[edges.len() - 1] {
        return None;
    }
    Some(edges.partition_point(|&e| e <= x) - 1)
}

/// `n` equal-width bins on `[lo, hi]`.
pub fn uniform_edges(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect()
}

fn annulus_area(r0: f64, r1: f64) -> f64 {
    PI * (r1 * r1 - r0 * r0)
}

/// Per-bin sums and sums of squares of per-sample counts. Counts are
/// integers (times a fixed weight), so merging is exact in any order.
#[derive(Clone, Debug, PartialEq)]
struct BinnedSums {
    edges: Vec<f64>,
    sum: Vec<f64>,
    sumsq: Vec<f64>,
    n_samples: u64,
}

impl BinnedSums {
    fn new(edges: Vec<f64>) -> Self {
        let n = edges.len() - 1;
        Self { edges, sum: vec![0.0; n], sumsq: vec![0.0; n], n_samples: 0 }
    }

    fn push(&mut self, per_sample: &[f64]) {
        for (k, &c) in per_sample.iter().enumerate() {
            self.sum[k] += c;
            self.sumsq[k] += c * c;
        }
        self.n_samples += 1;
    }

    fn merge(&mut self, other: &Self) -> Result<()> {
        if self.edges != other.edges {
            return param("cannot merge histograms with different bins");
        }
        for k in 0..self.sum.len() {
            self.sum[k] += other.sum[k];
            self.sumsq[k] += other.sumsq[k];
        }
        self.n_samples += other.n_samples;
        Ok(())
    }

    /// Mean per-sample count divided by `norm[k]`, with its standard error.
    fn finish(&self, kind: HistogramKind, norm: &[f64], normalization: String) -> HistogramEstimate {
        let n = self.n_samples as f64;
        let mut values = Vec::with_capacity(norm.len());
        let mut std_errors = Vec::with_capacity(norm.len());
        for k in 0..norm.len() {
            let mean = self.sum[k] / n;
            let var = if self.n_samples > 1 { ((self.sumsq[k] / n - mean * mean) * n / (n - 1.0)).max(0.0) } else { 0.0 };
            values.push(mean / norm[k]);
            std_errors.push((var / n).sqrt() / norm[k]);
        }
        HistogramEstimate {
            kind,
            bin_edges: self.edges.clone(),
            values,
            std_errors,
            counts: self.sum.clone(),
            n_samples: self.n_samples,
            normalization,
        }
    }
}

/// Streaming estimator of `R₁(|z|)`: annulus counts over
/// `(samples · annulus area)`, every eigenvalue counted with multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialAccumulator {
    sums: BinnedSums,
    scratch: Vec<f64>,
}

impl RadialAccumulator {
    pub fn new(edges: Vec<f64>) -> Result<Self> {
        validate_edges(&edges)?;
        let n = edges.len() - 1;
        Ok(Self { sums: BinnedSums::new(edges), scratch: vec![0.0; n] })
    }

    pub fn push(&mut self, spectrum: &ComplexSpectrum) {
        self.push_filtered(spectrum, |_| true);
    }

    /// Counts only eigenvalues accepted by `keep` (e.g. one half-plane); the
    /// area normalization is unchanged.
    pub fn push_filtered(&mut self, spectrum: &ComplexSpectrum, keep: impl Fn(Complex64) -> bool) {
        self.scratch.iter_mut().for_each(|c| *c = 0.0);
        for &z in &spectrum.eigenvalues {
            if !keep(z) {
                continue;
            }
            if let Some(k) = find_bin(&self.sums.edges, z.norm()) {
                self.scratch[k] += 1.0;
            }
        }
        let scratch = std::mem::take(&mut self.scratch);
        self.sums.push(&scratch);
        self.scratch = scratch;
    }

    pub fn merge(&mut self, other: &Self) -> Result<()> {
        self.sums.merge(&other.sums)
    }

    pub fn n_samples(&self) -> u64 {
        self.sums.n_samples
    }

    pub fn finish(&self) -> Result<HistogramEstimate> {
        if self.sums.n_samples == 0 {
            return param("radial density of an empty stream");
        }
        let areas: Vec<f64> = self.sums.edges.windows(2).map(|w| annulus_area(w[0], w[1])).collect();
        Ok(self.sums.finish(
            HistogramKind::RadialDensity,
            &areas,
            "count / (n_samples * annulus_area); all eigenvalues with multiplicity".into(),
        ))
    }
}

/// Radial density of a finite collection of spectra.
pub fn radial_density<'a>(
    spectra: impl IntoIterator<Item = &'a ComplexSpectrum>,
    edges: Vec<f64>,
) -> Result<HistogramEstimate> {
    let mut acc = RadialAccumulator::new(edges)?;
    for s in spectra {
        acc.push(s);
    }
    acc.finish()
}

/// Streaming estimator of `π²R₂(|ω|)` in the bulk.
///
/// Reference eigenvalues are those with `|z| < window_radius`; partners range
/// over the whole spectrum, so every reference sees the full annulus of each
/// `|ω|` bin. The estimate is `π² · count / (samples · window area · annulus
/// area)`. AII† spectra are reduced to one representative per Kramers
/// doublet and each pair of distinct doublets is weighted by 4, which excludes
/// intra-doublet pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct PairAccumulator {
    window_radius: f64,
    sums: BinnedSums,
    references: u64,
    scratch: Vec<f64>,
}

impl PairAccumulator {
    pub fn new(window_radius: f64, edges: Vec<f64>) -> Result<Self> {
        validate_edges(&edges)?;
        if !(window_radius > 0.0 && window_radius.is_finite()) {
            return param(format!("window radius must be positive, got {window_radius}"));
        }
        let n = edges.len() - 1;
        Ok(Self { window_radius, sums: BinnedSums::new(edges), references: 0, scratch: vec![0.0; n] })
    }

    pub fn push(&mut self, spectrum: &ComplexSpectrum) -> Result<()> {
        let (points, weight) = if spectrum.class() == Some(SymmetryClass::AIIDagger) {
            (kramers_dedup(spectrum)?.spectrum.eigenvalues, 4.0)
        } else {
            (spectrum.eigenvalues.clone(), 1.0)
        };
        self.scratch.iter_mut().for_each(|c| *c = 0.0);
        let max_sep = *self.sums.edges.last().expect("validated");
        for (i, &zi) in points.iter().enumerate() {
            if zi.norm() >= self.window_radius {
                continue;
            }
            self.references += 1;
            for (j, &zj) in points.iter().enumerate() {
                if i == j {
                    continue;
                }
                let d = (zi - zj).norm();
                if d >= max_sep {
                    continue;
                }
                if let Some(k) = find_bin(&self.sums.edges, d) {
                    self.scratch[k] += weight;
                }
            }
        }
        let scratch = std::mem::take(&mut self.scratch);
        self.sums.push(&scratch);
        self.scratch = scratch;
        Ok(())
    }

    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if self.window_radius != other.window_radius {
            return param("cannot merge pair estimates with different windows");
        }
        self.references += other.references;
        self.sums.merge(&other.sums)
    }

    pub fn finish(&self) -> Result<HistogramEstimate> {
        if self.sums.n_samples == 0 || self.references == 0 {
            return param("pair correlation window contains no eigenvalues");
        }
        let window = PI * self.window_radius * self.window_radius;
        let norm: Vec<f64> =
            self.sums.edges.windows(2).map(|w| window * annulus_area(w[0], w[1]) / (PI * PI)).collect();
        Ok(self.sums.finish(
            HistogramKind::PairCorrelation,
            &norm,
            format!(
                "pi^2 * count / (n_samples * window_area * annulus_area); reference |z| < {}; partners unrestricted",
                self.window_radius
            ),
        ))
    }
}

/// `π²R₂` estimate of a finite collection of spectra.
pub fn pair_correlation<'a>(
    spectra: impl IntoIterator<Item = &'a ComplexSpectrum>,
    window_radius: f64,
    edges: Vec<f64>,
) -> Result<HistogramEstimate> {
    let mut acc = PairAccumulator::new(window_radius, edges)?;
    for s in spectra {
        acc.push(s)?;
    }
    acc.finish()
}

// ---------------------------------------------------------------------------
// Spacings

/// `|z₊ − z₋|` of a two-level spectrum (AII† spectra are Kramers-reduced first).
pub fn spacing(spectrum: &ComplexSpectrum) -> Result<f64> {
    let reduced;
    let ev = if spectrum.class() == Some(SymmetryClass::AIIDagger) {
        reduced = kramers_dedup(spectrum)?.spectrum.eigenvalues;
        &reduced
    } else {
        &spectrum.eigenvalues
    };
    if ev.len() != 2 || ev[0] == ev[1] {
        return param(format!("spacing needs exactly two distinct eigenvalues, got {}", ev.len()));
    }
    Ok((ev[0] - ev[1]).norm())
}

pub fn spacing_samples<'a>(spectra: impl IntoIterator<Item = &'a ComplexSpectrum>) -> Result<Vec<f64>> {
    spectra.into_iter().map(spacing).collect()
}

/// Density histogram of mean-rescaled spacings `s/⟨s⟩` (sample mean).
pub fn spacing_histogram(spacings: &[f64], edges: Vec<f64>) -> Result<HistogramEstimate> {
    validate_edges(&edges)?;
    if spacings.len() < 2 || spacings.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
        return param("need at least two finite non-negative spacings");
    }
    let mean = spacings.iter().sum::<f64>() / spacings.len() as f64;
    if mean <= 0.0 {
        return param("all spacings vanish");
    }
    let mut sums = BinnedSums::new(edges);
    for &s in spacings {
        if let Some(k) = find_bin(&sums.edges, s / mean) {
            // one indicator per sample: sum and sum of squares coincide
            sums.sum[k] += 1.0;
            sums.sumsq[k] += 1.0;
        }
    }
    sums.n_samples = spacings.len() as u64;
    let widths: Vec<f64> = sums.edges.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(sums.finish(HistogramKind::Spacing, &widths, "count / (n_samples * bin_width); spacing / sample mean".into()))
}

/// Spacings of `count` small matrices (2×2 for A/AI†, 4×4 for AII†), with
/// realizations `0..count`.
pub fn sample_spacings(class: SymmetryClass, width: f64, seed: u64, count: u64, exec: Execution) -> Result<Vec<f64>> {
    // N = 2: a 2×2 matrix, or 4×4 for AII†
    let spec = EnsembleSpec::new(class, 2, width, seed)?;
    try_map_indexed(0, count, exec, |r| {
        let spec = spec.with_realization(r);
        let h = sample(&spec)?;
        let s = ComplexSpectrum { eigenvalues: small_eigenvalues(&h, r)?, source: Some(spec) };
        spacing(&s)
    })
}

/// Closed form for 2×2, the general solver otherwise.
fn small_eigenvalues(h: &ComplexMatrix, realization: u64) -> Result<Vec<Complex64>> {
    if h.dim() == 2 {
        let (a, b, c, d) = (h[(0, 0)], h[(0, 1)], h[(1, 0)], h[(1, 1)]);
        let half_tr = (a + d) * 0.5;
        let disc = ((a - d) * (a - d) * 0.25 + b * c).sqrt();
        return Ok(vec![half_tr + disc, half_tr - disc]);
    }
    linalg::eigenvalues(h, realization)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parallel::Execution;
    use rand::{RngExt, SeedableRng};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eigenvalue_examples() {
        let s = eigenvalues(&ComplexMatrix::diagonal(&[c(1.0, 1.0), c(2.0, 0.0)])).unwrap();
        let mut ev = s.eigenvalues.clone();
        ev.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((ev[0] - c(1.0, 1.0)).norm() < 1e-14 && (ev[1] - c(2.0, 0.0)).norm() < 1e-14);
        let nil = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]).unwrap();
        assert!(eigenvalues(&nil).unwrap().eigenvalues.iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn sampled_spectra_have_full_count_and_provenance() {
        for class in SymmetryClass::ALL {
            let spec = EnsembleSpec::new(class, 6, 2.0, 1).unwrap();
            let s = sample_spectra(&spec, 3, 2, Execution::Sequential).unwrap();
            assert_eq!(s.len(), 2);
            assert_eq!(s[0].len(), spec.dim());
            assert_eq!(s[1].source.unwrap().realization_index, 4);
        }
    }

    #[test]
    fn kramers_examples() {
        let s = ComplexSpectrum::synthetic(vec![c(1.0, 1.0), c(2.0, 0.0), c(1.0, 1.0), c(2.0, 0.0)]);
        let k = kramers_dedup(&s).unwrap();
        assert_eq!(k.spectrum.eigenvalues, vec![c(1.0, 1.0), c(2.0, 0.0)]);
        assert_eq!(k.max_residual, 0.0);
        let zero = kramers_dedup(&ComplexSpectrum::synthetic(vec![c(0.0, 0.0); 2])).unwrap();
        assert_eq!(zero.spectrum.eigenvalues, vec![c(0.0, 0.0)]);
        assert!(matches!(
            kramers_dedup(&ComplexSpectrum::synthetic(vec![c(0.0, 0.0), c(1.0, 0.0)])),
            Err(Error::DegeneracyViolation { .. })
        ));
        assert!(kramers_dedup(&ComplexSpectrum::synthetic(vec![c(0.0, 0.0)])).is_err());
        let spec = EnsembleSpec::new(SymmetryClass::AIIDagger, 2, 1.0, 0).unwrap();
        let k = kramers_dedup(&sample_spectrum(&spec).unwrap()).unwrap();
        assert_eq!(k.spectrum.len(), 2);
        assert!(k.max_residual < 1e-8);
    }

    #[test]
    fn radial_density_counts_and_conservation() {
        let s = ComplexSpectrum::synthetic(vec![c(0.0, 0.0)]);
        let h = radial_density([&s, &s], vec![0.0, 1.0]).unwrap();
        assert!((h.values[0] - 1.0 / PI).abs() < 1e-15);
        assert_eq!(h.std_errors[0], 0.0);
        assert!(radial_density(std::iter::empty(), vec![0.0, 1.0]).is_err());

        let spec = EnsembleSpec::new(SymmetryClass::AIIDagger, 20, 2.0, 5).unwrap();
        let spectra = sample_spectra(&spec, 0, 10, Execution::Parallel).unwrap();
        let h = radial_density(&spectra, uniform_edges(0.0, 3.0 * spec.spectral_radius(), 60)).unwrap();
        let total: f64 = h.values.iter().zip(h.bin_edges.windows(2)).map(|(v, w)| v * annulus_area(w[0], w[1])).sum();
        assert!((total - 40.0).abs() < 1e-9 * 40.0);
    }

    #[test]
    fn merge_is_order_independent() {
        let spec = EnsembleSpec::new(SymmetryClass::AIDagger, 30, 2.0, 9).unwrap();
        let spectra = sample_spectra(&spec, 0, 6, Execution::Sequential).unwrap();
        let edges = uniform_edges(0.0, 5.0, 10);
        let mut a = RadialAccumulator::new(edges.clone()).unwrap();
        let mut b = RadialAccumulator::new(edges.clone()).unwrap();
        for s in &spectra[..3] {
            a.push(s);
        }
        for s in &spectra[3..] {
            b.push(s);
        }
        let mut ab = a.clone();
        ab.merge(&b).unwrap();
        let mut ba = b.clone();
        ba.merge(&a).unwrap();
        assert_eq!(ab.finish().unwrap(), ba.finish().unwrap());
        assert_eq!(ab.finish().unwrap(), radial_density(&spectra, edges).unwrap());
    }

    #[test]
    fn pair_correlation_single_pair() {
        let s = ComplexSpectrum::synthetic(vec![c(0.0, 0.0), c(0.35, 0.0)]);
        let edges = uniform_edges(0.0, 1.0, 10);
        let h = pair_correlation([&s], 1.0, edges).unwrap();
        for (k, v) in h.values.iter().enumerate() {
            assert_eq!(*v > 0.0, k == 3, "bin {k}");
        }
        assert_eq!(h.counts[3], 2.0);
        let far = ComplexSpectrum::synthetic(vec![c(5.0, 0.0)]);
        assert!(pair_correlation([&far], 1.0, uniform_edges(0.0, 1.0, 4)).is_err());
    }

    #[test]
    fn pair_correlation_poisson_calibration() {
        // uniform points on a disc of radius 10 at intensity ρ: π²R₂ = π²ρ²
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let (radius, per_sample) = (10.0f64, 400usize);
        let rho = per_sample as f64 / (PI * radius * radius);
        let spectra: Vec<ComplexSpectrum> = (0..200)
            .map(|_| {
                ComplexSpectrum::synthetic(
                    (0..per_sample)
                        .map(|_| {
                            let r = radius * rng.random::<f64>().sqrt();
                            let t = 2.0 * PI * rng.random::<f64>();
                            Complex64::from_polar(r, t)
                        })
                        .collect(),
                )
            })
            .collect();
        let h = pair_correlation(&spectra, 4.0, uniform_edges(0.5, 3.0, 5)).unwrap();
        let plateau = PI * PI * rho * rho;
        for (v, e) in h.values.iter().zip(&h.std_errors) {
            assert!((v - plateau).abs() < 3.0 * e + 1e-12, "{v} vs {plateau} ± {e}");
        }
    }

    #[test]
    fn spacing_examples() {
        assert_eq!(spacing(&ComplexSpectrum::synthetic(vec![c(1.0, 0.0), c(-1.0, 0.0)])).unwrap(), 2.0);
        assert_eq!(spacing(&ComplexSpectrum::synthetic(vec![c(0.0, 1.0), c(0.0, -1.0)])).unwrap(), 2.0);
        assert!(spacing(&ComplexSpectrum::synthetic(vec![c(1.0, 0.0); 3])).is_err());
        assert!(spacing(&ComplexSpectrum::synthetic(vec![c(1.0, 0.0); 2])).is_err());
    }

    #[test]
    fn small_matrix_closed_form_matches_solver() {
        let spec = EnsembleSpec::new(SymmetryClass::A, 2, 1.0, 4).unwrap();
        for r in 0..20 {
            let h = sample(&spec.with_realization(r)).unwrap();
            let mut a = small_eigenvalues(&h, r).unwrap();
            let mut b = linalg::eigenvalues(&h, r).unwrap();
            a.sort_by(|x, y| x.re.total_cmp(&y.re));
            b.sort_by(|x, y| x.re.total_cmp(&y.re));
            assert!((a[0] - b[0]).norm() < 1e-12 && (a[1] - b[1]).norm() < 1e-12);
        }
    }

    #[test]
    fn spacing_samples_follow_surmise() {
        use crate::asymptotics::surmise_cdf_rescaled;
        use crate::stats::{ks_distance, mean};
        for class in SymmetryClass::ALL {
            let s = sample_spacings(class, 1.0, 2, 20_000, Execution::Parallel).unwrap();
            let m = mean(&s);
            let x: Vec<f64> = s.iter().map(|v| v / m).collect();
            let d = ks_distance(&x, |v| surmise_cdf_rescaled(class, v).unwrap());
            assert!(d < 0.03, "{class}: KS {d}");
        }
    }

    #[test]
    fn spacing_histogram_is_a_density() {
        // deterministic quantiles of Exp(1)
        let n = 100_000;
        let s: Vec<f64> = (0..n).map(|k| -(1.0 - (k as f64 + 0.5) / n as f64).ln()).collect();
        let h = spacing_histogram(&s, uniform_edges(0.0, 3.0, 30)).unwrap();
        for (x, (v, e)) in h.centers().iter().zip(h.values.iter().zip(&h.std_errors)) {
            assert!((v - (-x).exp()).abs() < 0.01, "{x}: {v}");
            assert!(*e > 0.0 && *e < 0.01);
        }
        assert!(spacing_histogram(&[1.0], uniform_edges(0.0, 1.0, 2)).is_err());
    }
}
