use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nhrmt::charpoly::one_point_curve;
use nhrmt::spectra::{pair_correlation, sample_spacings, sample_spectra, uniform_edges};
use nhrmt::{EnsembleSpec, Execution, SymmetryClass};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn spectra(c: &mut Criterion) {
    let mut group = c.benchmark_group("spectra_aidagger_n100_x32");
    group.sample_size(10);
    let spec = EnsembleSpec::new(SymmetryClass::AIDagger, 100, 1.0, 1).unwrap();
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                let s = sample_spectra(&spec, 0, 32, exec).unwrap();
                pair_correlation(&s, 3.0, uniform_edges(0.0, 3.0, 15)).unwrap()
            })
        });
    }
    group.finish();
}

fn charpoly(c: &mut Criterion) {
    let mut group = c.benchmark_group("charpoly_one_point_n10_x2000");
    group.sample_size(10);
    let spec = EnsembleSpec::new(SymmetryClass::AIIDagger, 10, 2.0, 1).unwrap();
    let radii: Vec<f64> = (0..20).map(|k| 3.0 * k as f64 / 19.0).collect();
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| one_point_curve(&spec, &[1, 2], &radii, 2000, exec).unwrap())
        });
    }
    group.finish();
}

fn spacings(c: &mut Criterion) {
    let mut group = c.benchmark_group("spacings_2x2_x20000");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| sample_spacings(SymmetryClass::AIDagger, 1.0, 1, 20_000, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, spectra, charpoly, spacings);
criterion_main!(benches);
