//! Experiment execution: Monte Carlo estimate, prediction on the same grid,
//! comparison table and manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nhrmt::asymptotics::{dos_edge_physical, r2_bulk, surmise_cdf_rescaled, EdgeCoordinate};
use nhrmt::charpoly::{one_point_curve, two_point_curve};
use nhrmt::export::{curve_table, histogram_table, quadrature_table, Field, Table};
use nhrmt::nlsm::{normalized_one_point_grid, normalized_two_point_grid, IntegralKind, ReplicaIntegralSpec};
use nhrmt::parallel::for_each_batch;
use nhrmt::spectra::{
    sample_spacings, sample_spectrum, spacing_histogram, ComplexSpectrum, HistogramEstimate, PairAccumulator, RadialAccumulator,
};
use nhrmt::stats::{ks_distance, mean};
use nhrmt::{EnsembleSpec, Execution, SymmetryClass};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::compare::{compare_tables, CompareReport, NumericTable};
use crate::config::{Experiment, ExperimentConfig, GridSpec};
use crate::error::{config_err, Result};

pub const SCHEMA_VERSION: u32 = 1;
/// z-score tolerance of the comparison table written by every run.
pub const DEFAULT_TOLERANCE: f64 = 4.0;
const SPECTRUM_BATCH: u64 = 64;
/// Reference eigenvalues for the pair correlation lie within this fraction
/// of the spectral radius.
const PAIR_WINDOW_FRACTION: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub file: String,
    pub role: String,
    pub sha256: String,
    pub rows: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub tolerance: f64,
    pub compared: usize,
    pub exceeding: usize,
    pub skipped: usize,
    pub passed: bool,
}

impl From<&CompareReport> for ComparisonSummary {
    fn from(r: &CompareReport) -> Self {
        ComparisonSummary {
            tolerance: r.tolerance,
            compared: r.compared,
            exceeding: r.exceeding,
            skipped: r.skipped,
            passed: r.passed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub toolkit: String,
    pub toolkit_version: String,
    pub command: String,
    /// Echo of the configuration or parameters of the run.
    pub config: serde_json::Value,
    pub threads: usize,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<OutputFile>,
    pub dropped_samples: u64,
    /// Estimator or prediction failures; the run continued past them.
    pub failures: Vec<String>,
    pub metrics: BTreeMap<String, f64>,
    pub comparison: Option<ComparisonSummary>,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Default)]
struct Outputs {
    tables: Vec<(String, String, Table)>,
    dropped: u64,
    failures: Vec<String>,
    metrics: BTreeMap<String, f64>,
    comparison: Option<ComparisonSummary>,
}

impl Outputs {
    fn add(&mut self, file: String, role: &str, table: Table) {
        self.tables.push((file, role.to_string(), table));
    }

    /// Writes every table, then the manifest (`<prefix>_manifest.json`).
    fn write(self, dir: &Path, prefix: &str, command: &str, config: serde_json::Value, started: Instant) -> Result<RunManifest> {
        std::fs::create_dir_all(dir)?;
        let mut outputs = Vec::with_capacity(self.tables.len());
        for (file, role, table) in &self.tables {
            let bytes = table.to_csv().into_bytes();
            std::fs::write(dir.join(file), &bytes)?;
            outputs.push(OutputFile { file: file.clone(), role: role.clone(), sha256: sha256_hex(&bytes), rows: table.rows.len() });
        }
        let manifest = RunManifest {
            schema_version: SCHEMA_VERSION,
            toolkit: "nhrmt".into(),
            toolkit_version: nhrmt::VERSION.into(),
            command: command.into(),
            config,
            threads: rayon::current_num_threads(),
            wall_clock_seconds: started.elapsed().as_secs_f64(),
            outputs,
            dropped_samples: self.dropped,
            failures: self.failures,
            metrics: self.metrics,
            comparison: self.comparison,
        };
        std::fs::write(dir.join(format!("{prefix}_manifest.json")), serde_json::to_string_pretty(&manifest)? + "\n")?;
        Ok(manifest)
    }
}

/// Runs one experiment and writes `<name>_mc.csv`, `<name>_prediction.csv`,
/// `<name>_comparison.csv` and `<name>_manifest.json` into the output
/// directory. The config is validated before anything is computed or written.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunManifest> {
    config.validate()?;
    let started = Instant::now();
    let name = config.experiment.name();
    let mut out = Outputs::default();
    let (mc, prediction) = match config.experiment {
        Experiment::Charpoly1 | Experiment::Charpoly2 => charpoly(config, &mut out)?,
        Experiment::DosEdge => dos_edge(config)?,
        Experiment::Girko => girko(config)?,
        Experiment::R2Bulk => r2(config)?,
        Experiment::SpacingSurmise => spacing(config, &mut out)?,
    };
    let report = compare_tables(&NumericTable::from_table(&mc), &NumericTable::from_table(&prediction), DEFAULT_TOLERANCE)?;
    out.comparison = Some((&report).into());
    out.add(format!("{name}_mc.csv"), "mc", mc);
    out.add(format!("{name}_prediction.csv"), "prediction", prediction);
    out.add(format!("{name}_comparison.csv"), "comparison", report.to_table());
    out.write(&config.output_dir, name, name, serde_json::to_value(config)?, started)
}

fn charpoly(config: &ExperimentConfig, out: &mut Outputs) -> Result<(Table, Table)> {
    let spec = EnsembleSpec::new(config.class, config.n_half, config.g, config.seed)?;
    let radii = config.grid.points();
    let two_point = config.experiment == Experiment::Charpoly2;
    let exec = Execution::Parallel;
    let curve = if two_point {
        two_point_curve(&spec, &config.n_list, &radii, config.n_samples, exec)?
    } else {
        one_point_curve(&spec, &config.n_list, &radii, config.n_samples, exec)?
    };
    out.dropped = curve.dropped;
    let arg = if two_point { "abs_omega" } else { "abs_z" };
    let mc = curve_table(&curve, arg, config.n_half, config.g);
    let mut pred = Table::new(&[arg, "n", "N", "g", "value"]);
    for &n in &config.n_list {
        let values = if two_point {
            normalized_two_point_grid(config.class, n as usize, config.g, &radii, exec)
        } else {
            normalized_one_point_grid(config.class, n as usize, config.n_half, config.g, &radii, exec)
        };
        let values = values.unwrap_or_else(|e| {
            out.failures.push(format!("prediction n={n}: {e}"));
            vec![f64::NAN; radii.len()]
        });
        for (&r, v) in radii.iter().zip(values) {
            pred.rows.push(vec![r.into(), (n as u64).into(), (config.n_half as u64).into(), config.g.into(), v.into()]);
        }
    }
    Ok((mc, pred))
}

fn stream_spectra(config: &ExperimentConfig, mut push: impl FnMut(&ComplexSpectrum) -> nhrmt::Result<()>) -> Result<()> {
    let spec = EnsembleSpec::new(config.class, config.n_half, config.g, config.seed)?;
    let sample = |r| sample_spectrum(&spec.with_realization(r));
    for_each_batch(0, config.n_samples, SPECTRUM_BATCH, Execution::Parallel, sample, |batch| {
        batch.iter().try_for_each(&mut push)
    })?;
    Ok(())
}

fn radial_estimate(config: &ExperimentConfig) -> Result<HistogramEstimate> {
    let mut acc = RadialAccumulator::new(config.grid.bin_edges())?;
    stream_spectra(config, |s| {
        acc.push(s);
        Ok(())
    })?;
    Ok(acc.finish()?)
}

fn bin_table(header: &[&str], grid: &GridSpec, mut row: impl FnMut(f64, f64) -> Vec<Field>) -> Table {
    let mut t = Table::new(header);
    for w in grid.bin_edges().windows(2) {
        let mut r: Vec<Field> = vec![w[0].into(), w[1].into()];
        r.extend(row(w[0], w[1]));
        t.rows.push(r);
    }
    t
}

/// `R₁` near the edge against the edge expansion, where `u ≥ 1`.
fn dos_edge(config: &ExperimentConfig) -> Result<(Table, Table)> {
    let est = radial_estimate(config)?;
    let pred = bin_table(&["bin_left", "bin_right", "u", "value"], &config.grid, |a, b| {
        let r = 0.5 * (a + b);
        let u = EdgeCoordinate::from_radius(config.class, r, config.n_half, config.g).map(|c| c.u).unwrap_or(f64::NAN);
        let v = if u >= 1.0 {
            dos_edge_physical(config.class, r, config.n_half, config.g).map(|d| d / std::f64::consts::PI).unwrap_or(f64::NAN)
        } else {
            f64::NAN
        };
        vec![u.into(), v.into()]
    });
    Ok((histogram_table(&est), pred))
}

/// `R₁` against the circular law: flat inside the radius, zero outside,
/// undefined in the bin that straddles it.
fn girko(config: &ExperimentConfig) -> Result<(Table, Table)> {
    let est = radial_estimate(config)?;
    let radius = config.class.spectral_radius(config.n_half, config.g);
    let bulk = config.class.bulk_density(config.g);
    let pred = bin_table(&["bin_left", "bin_right", "value"], &config.grid, |a, b| {
        let v = if b <= radius {
            bulk
        } else if a >= radius {
            0.0
        } else {
            f64::NAN
        };
        vec![v.into()]
    });
    Ok((histogram_table(&est), pred))
}

/// `π²R₂(|ω|)` against the leading bulk form.
fn r2(config: &ExperimentConfig) -> Result<(Table, Table)> {
    let window = PAIR_WINDOW_FRACTION * config.class.spectral_radius(config.n_half, config.g);
    let mut acc = PairAccumulator::new(window, config.grid.bin_edges())?;
    stream_spectra(config, |s| acc.push(s))?;
    let est = acc.finish()?;
    let mut failure = None;
    let pred = bin_table(&["bin_left", "bin_right", "in_regime", "value"], &config.grid, |a, b| {
        match r2_bulk(config.class, 0.5 * (a + b), config.g) {
            Ok(v) => vec![(v.in_regime as u64).into(), v.value.into()],
            Err(e) => {
                failure.get_or_insert(e);
                vec![0u64.into(), f64::NAN.into()]
            }
        }
    });
    if let Some(e) = failure {
        return Err(e.into());
    }
    Ok((histogram_table(&est), pred))
}

/// Mean-rescaled small-matrix spacings against the bin-averaged surmise.
fn spacing(config: &ExperimentConfig, out: &mut Outputs) -> Result<(Table, Table)> {
    let s = sample_spacings(config.class, config.g, config.seed, config.n_samples, Execution::Parallel)?;
    let m = mean(&s);
    let x: Vec<f64> = s.iter().map(|v| v / m).collect();
    let class = config.class;
    out.metrics.insert("ks_distance".into(), ks_distance(&x, |v| surmise_cdf_rescaled(class, v).unwrap_or(f64::NAN)));
    let est = spacing_histogram(&s, config.grid.bin_edges())?;
    let pred = bin_table(&["bin_left", "bin_right", "value"], &config.grid, |a, b| {
        let f = |v| surmise_cdf_rescaled(class, v).unwrap_or(f64::NAN);
        vec![((f(b) - f(a)) / (b - a)).into()]
    });
    Ok((histogram_table(&est), pred))
}

/// Parameters of `sample`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleParams {
    pub class: String,
    #[serde(rename = "N")]
    pub n_half: usize,
    pub g: f64,
    pub n_samples: u64,
    pub seed: u64,
    pub output_dir: PathBuf,
}

/// Eigenvalues of `n_samples` realizations: `spectra.csv` with columns
/// `realization,index,re,im`.
pub fn run_sample(class: SymmetryClass, n_half: usize, g: f64, n_samples: u64, seed: u64, dir: &Path) -> Result<RunManifest> {
    if n_samples == 0 {
        return config_err("sample needs at least one realization");
    }
    let spec = EnsembleSpec::new(class, n_half, g, seed)?;
    let started = Instant::now();
    let mut t = Table::new(&["realization", "index", "re", "im"]);
    for_each_batch(0, n_samples, SPECTRUM_BATCH, Execution::Parallel, |r| sample_spectrum(&spec.with_realization(r)), |batch| {
        for s in batch {
            let r = s.source.map(|sp| sp.realization_index).unwrap_or(0);
            for (i, z) in s.eigenvalues.iter().enumerate() {
                t.rows.push(vec![r.into(), (i as u64).into(), z.re.into(), z.im.into()]);
            }
        }
        Ok(())
    })?;
    let params = SampleParams { class: class.name().into(), n_half, g, n_samples, seed, output_dir: dir.to_path_buf() };
    let mut out = Outputs::default();
    out.add("spectra.csv".into(), "spectra", t);
    out.write(dir, "sample", "sample", serde_json::to_value(&params)?, started)
}

/// Parameters of `nlsm-eval`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NlsmParams {
    pub class: String,
    pub kind: String,
    #[serde(rename = "N")]
    pub n_half: usize,
    pub g: f64,
    pub n_list: Vec<u32>,
    pub grid: GridSpec,
    pub output_dir: PathBuf,
}

/// Raw replica integrals on a grid of `|z|` (one-point) or `|ω|` (two-point,
/// centred at 0), one file `nlsm_<kind>_n<n>.csv` per replica index.
pub fn run_nlsm_eval(
    class: SymmetryClass,
    kind: IntegralKind,
    n_half: usize,
    g: f64,
    n_list: &[u32],
    grid: &GridSpec,
    dir: &Path,
) -> Result<RunManifest> {
    grid.validate()?;
    if n_list.is_empty() {
        return config_err("nlsm-eval needs at least one replica index");
    }
    if !(g > 0.0 && g.is_finite()) {
        return config_err(format!("g must be positive, got {g}"));
    }
    let started = Instant::now();
    let (kind_name, arg) = match kind {
        IntegralKind::OnePoint => ("one_point", "abs_z"),
        IntegralKind::TwoPoint => ("two_point", "abs_omega"),
    };
    let points = grid.points();
    let mut out = Outputs::default();
    for &n in n_list {
        let mut results = Vec::with_capacity(points.len());
        for &r in &points {
            let argument = match kind {
                IntegralKind::OnePoint => r * r,
                IntegralKind::TwoPoint => r * r / g,
            };
            let spec = ReplicaIntegralSpec { class, kind, n: n as usize, n_half, g, argument, center_sq: 0.0 };
            results.push(spec.evaluate()?);
        }
        if results.iter().any(|r| r.is_approximate()) {
            out.failures.push(format!("n={n}: outside the quadrature range, Monte Carlo estimate reported"));
        }
        out.add(format!("nlsm_{kind_name}_n{n}.csv"), "quadrature", quadrature_table(arg, &points, &results)?);
    }
    let params = NlsmParams {
        class: class.name().into(),
        kind: kind_name.into(),
        n_half,
        g,
        n_list: n_list.to_vec(),
        grid: *grid,
        output_dir: dir.to_path_buf(),
    };
    out.write(dir, "nlsm", "nlsm-eval", serde_json::to_value(&params)?, started)
}
