use nhrmt::asymptotics::{dos_edge, surmise_cdf, surmise_spacing};
use nhrmt::charpoly::z1_moment_mc;
use nhrmt::ensembles::{check_symmetry, sample};
use nhrmt::nlsm::{normalized_one_point, normalized_two_point, selberg_laguerre};
use nhrmt::spectra::{kramers_dedup, sample_spectra};
use nhrmt::special::gamma;
use nhrmt::{Complex64, EnsembleSpec, Execution, SymmetryClass};

const CLASSES: [SymmetryClass; 3] = [SymmetryClass::A, SymmetryClass::AIDagger, SymmetryClass::AIIDagger];

#[test]
fn spectra_do_not_depend_on_execution_mode() {
    for class in CLASSES {
        let spec = EnsembleSpec::new(class, 6, 1.5, 17).unwrap();
        let seq = sample_spectra(&spec, 3, 8, Execution::Sequential).unwrap();
        let par = sample_spectra(&spec, 3, 8, Execution::Parallel).unwrap();
        assert_eq!(seq.len(), 8);
        for (a, b) in seq.iter().zip(&par) {
            assert_eq!(a.eigenvalues, b.eigenvalues);
        }
    }
}

#[test]
fn sampled_matrices_carry_their_symmetry() {
    for class in CLASSES {
        let spec = EnsembleSpec::new(class, 5, 2.0, 3).unwrap().with_realization(11);
        let h = sample(&spec).unwrap();
        assert!(check_symmetry(&h, class).unwrap() < 1e-14, "{class}");
    }
    let spec = EnsembleSpec::new(SymmetryClass::AIIDagger, 20, 1.0, 5).unwrap();
    for s in sample_spectra(&spec, 0, 4, Execution::Sequential).unwrap() {
        assert_eq!(kramers_dedup(&s).unwrap().spectrum.len(), 20);
    }
}

// one complex Gaussian entry: E|z-h|^2 = |z|^2 + g, E|z-h|^4 = |z|^4 + 4|z|^2 g + 2g^2
#[test]
fn scalar_ginibre_moments() {
    let g = 1.3;
    let spec = EnsembleSpec::new(SymmetryClass::A, 1, g, 9).unwrap();
    let z = Complex64::new(0.4, -0.7);
    let r = z.norm_sqr();
    for (n, exact) in [(1, r + g), (2, r * r + 4.0 * r * g + 2.0 * g * g)] {
        let est = z1_moment_mc(&spec, n, z, 40_000, Execution::Parallel).unwrap();
        let z_score = (est.log_mean - f64::ln(exact)) / est.std_error_rel;
        assert!(z_score.abs() < 5.0, "n={n}: {} vs {exact} (z={z_score})", est.mean());
    }
}

#[test]
fn single_variable_selberg_is_a_gamma_integral() {
    for alpha in [-0.5, 0.0, 1.0] {
        for t in [0.5f64, 1.0, 2.0] {
            let exact = gamma(alpha + 1.0) / t.powf(alpha + 1.0);
            for beta in [1, 4] {
                let v = selberg_laguerre(1, t, alpha, beta).unwrap();
                assert!((v / exact - 1.0).abs() < 1e-12, "alpha={alpha} t={t} beta={beta}");
            }
        }
    }
}

#[test]
fn surmise_cdf_integrates_the_density() {
    for class in CLASSES {
        let c = 1.0;
        let (steps, hi) = (4000, 4.0);
        let h = hi / steps as f64;
        let mut acc = 0.0;
        for k in 0..steps {
            let s = k as f64 * h;
            // Simpson on each step
            let f = |x: f64| surmise_spacing(class, x, c).unwrap();
            acc += h / 6.0 * (f(s) + 4.0 * f(s + h / 2.0) + f(s + h));
            if (k + 1) % 500 == 0 {
                let cdf = surmise_cdf(class, s + h, c).unwrap();
                assert!((acc - cdf).abs() < 1e-10, "{class} at {}: {acc} vs {cdf}", s + h);
            }
        }
        assert!((surmise_cdf(class, 50.0, c).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn normalized_moments_start_at_one() {
    for class in [SymmetryClass::AIDagger, SymmetryClass::AIIDagger] {
        assert!((normalized_one_point(class, 1, 5, 2.0, 0.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((normalized_two_point(class, 1, 2.0, 0.0).unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn edge_density_approaches_the_bulk_plateau() {
    assert!((dos_edge(SymmetryClass::AIDagger, 40.0, 500).unwrap() - 1.0).abs() < 1e-3);
    assert!((dos_edge(SymmetryClass::AIIDagger, 40.0, 500).unwrap() - 2.0).abs() < 1e-3);
}
