//! Small statistics helpers: log-domain averaging, jackknife errors, KS distance.

/// Running `(max, Σ exp(x − max), count)` triple for averaging values given by
/// their logarithms. Merging is commutative and associative up to roundoff.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogSumAccumulator {
    max: f64,
    shifted_sum: f64,
    count: u64,
}

impl Default for LogSumAccumulator {
    fn default() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            shifted_sum: 0.0,
            count: 0,
        }
    }
}

impl LogSumAccumulator {
    pub fn push(&mut self, log_value: f64) {
        self.count += 1;
        if log_value == f64::NEG_INFINITY {
            return;
        }
        if log_value > self.max {
            self.shifted_sum = self.shifted_sum * (self.max - log_value).exp() + 1.0;
            self.max = log_value;
        } else {
            self.shifted_sum += (log_value - self.max).exp();
        }
    }

    pub fn merge(&mut self, other: &Self) {
        self.count += other.count;
        if other.max == f64::NEG_INFINITY {
            return;
        }
        if other.max > self.max {
            self.shifted_sum = self.shifted_sum * (self.max - other.max).exp() + other.shifted_sum;
            self.max = other.max;
        } else {
            self.shifted_sum += other.shifted_sum * (other.max - self.max).exp();
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// `ln Σ exp(xᵢ)`.
    pub fn log_sum(&self) -> f64 {
        if self.shifted_sum == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.max + self.shifted_sum.ln()
        }
    }

    /// `ln( (1/count) Σ exp(xᵢ) )`.
    pub fn log_mean(&self) -> f64 {
        self.log_sum() - (self.count as f64).ln()
    }
}

pub fn log_sum_exp(values: &[f64]) -> f64 {
    let mut acc = LogSumAccumulator::default();
    values.iter().for_each(|&v| acc.push(v));
    acc.log_sum()
}

/// Log of every leave-one-out sum `ln Σ_{j≠i} exp(x_j)`, from prefix and suffix
/// sums so that a dominant sample does not cancel against the total.
fn leave_one_out_log_sums(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut prefix = vec![LogSumAccumulator::default(); n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i];
        prefix[i + 1].push(values[i]);
    }
    let mut out = vec![0.0; n];
    let mut suffix = LogSumAccumulator::default();
    for i in (0..n).rev() {
        let mut acc = prefix[i];
        acc.merge(&suffix);
        out[i] = acc.log_sum();
        suffix.push(values[i]);
    }
    out
}

fn jackknife_spread(replicates: &[f64]) -> f64 {
    let n = replicates.len() as f64;
    let mean = replicates.iter().sum::<f64>() / n;
    let ss: f64 = replicates.iter().map(|r| (r - mean).powi(2)).sum();
    ((n - 1.0) / n * ss).sqrt()
}

/// Log of the sample mean of `exp(xᵢ)` and its delete-one jackknife standard
/// error in the log domain (≈ relative error of the mean).
pub fn jackknife_log_mean(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let log_mean = log_sum_exp(values) - (n as f64).ln();
    if n < 2 {
        return (log_mean, f64::NAN);
    }
    let norm = ((n - 1) as f64).ln();
    let reps: Vec<f64> = leave_one_out_log_sums(values).into_iter().map(|s| s - norm).collect();
    (log_mean, jackknife_spread(&reps))
}

/// Log of `mean(exp(num)) / mean(exp(den))` for paired samples, with the
/// jackknife standard error of that log ratio.
pub fn jackknife_log_ratio(num: &[f64], den: &[f64]) -> (f64, f64) {
    assert_eq!(num.len(), den.len(), "paired samples required");
    let n = num.len();
    let log_ratio = log_sum_exp(num) - log_sum_exp(den);
    if n < 2 {
        return (log_ratio, f64::NAN);
    }
    let a = leave_one_out_log_sums(num);
    let b = leave_one_out_log_sums(den);
    let reps: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
    (log_ratio, jackknife_spread(&reps))
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample mean and standard error of the mean.
pub fn mean_and_std_error(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let m = mean(values);
    if values.len() < 2 {
        return (m, f64::NAN);
    }
    let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

/// Kolmogorov–Smirnov distance `sup |F_emp − F|` between a sample and a CDF.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let lo = i as f64 / n;
            let hi = (i + 1) as f64 / n;
            (f - lo).abs().max((hi - f).abs())
        })
        .fold(0.0, f64::max)
}
