//! Gauss rules and the multidimensional drivers used by the replica integrals.
//!
//! Two drivers cover every integrand in this crate:
//!
//! * [`tensor_sum`] — a product rule over `[a,b]ⁿ` or `[0,∞)ⁿ`; exact for the
//!   polynomial-times-weight integrands that carry an even Vandermonde power.
//! * [`ordered_simplex`] — nested one-dimensional rules over
//!   `lo < y₁ < … < y_m < hi`, for integrands carrying `|Δ|`, which is a
//!   polynomial on each ordered chamber but not globally.

use crate::special::ln_gamma;

#[derive(Clone, Debug, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let terms: Vec<f64> = self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).collect();
        pairwise_sum(&terms)
    }
}

/// Gauss–Legendre rule with `m` nodes on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> GaussRule {
    assert!(m >= 1);
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..(m + 1) / 2 {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    GaussRule { nodes, weights }
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=m {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (1.0, 0.0);
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Generalized Gauss–Laguerre rule for the weight `x^α e^{−x}` on `[0, ∞)`.
pub fn gauss_laguerre(m: usize, alpha: f64) -> GaussRule {
    assert!(m >= 1 && alpha > -1.0);
    let n = m as f64;
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mut z: f64 = 0.0;
    for i in 0..m {
        // asymptotic initial guesses, then Newton on L_m^{(α)}
        z = match i {
            0 => (1.0 + alpha) * (3.0 + 0.92 * alpha) / (1.0 + 2.4 * n + 1.8 * alpha),
            1 => z + (15.0 + 6.25 * alpha) / (1.0 + 0.9 * alpha + 2.5 * n),
            _ => {
                let ai = (i - 1) as f64;
                z + ((1.0 + 2.55 * ai) / (1.9 * ai) + 1.26 * ai * alpha / (1.0 + 3.5 * ai)) * (z - nodes[i - 2])
                    / (1.0 + 0.3 * alpha)
            }
        };
        let mut pp = 0.0;
        let mut p2 = 0.0;
        for _ in 0..200 {
            let (mut p1, mut q2) = (1.0, 0.0);
            for j in 1..=m {
                let jf = j as f64;
                let p3 = q2;
                q2 = p1;
                p1 = ((2.0 * jf - 1.0 + alpha - z) * q2 - (jf - 1.0 + alpha) * p3) / jf;
            }
            p2 = q2;
            pp = (n * p1 - (n + alpha) * q2) / z;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs() {
                break;
            }
        }
        nodes[i] = z;
        weights[i] = -(ln_gamma(alpha + n) - ln_gamma(n)).exp() / (pp * n * p2);
    }
    GaussRule { nodes, weights }
}

/// `panels` equal Gauss–Legendre panels of `order` nodes covering `[a, b]`.
pub fn composite_legendre(a: f64, b: f64, panels: usize, order: usize) -> GaussRule {
    let base = gauss_legendre(order);
    composite_from(&base, a, b, panels)
}

fn composite_from(base: &GaussRule, a: f64, b: f64, panels: usize) -> GaussRule {
    let width = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * base.len());
    let mut weights = Vec::with_capacity(panels * base.len());
    for p in 0..panels {
        let lo = a + p as f64 * width;
        for (&x, &w) in base.nodes.iter().zip(&base.weights) {
            nodes.push(lo + 0.5 * width * (x + 1.0));
            weights.push(0.5 * width * w);
        }
    }
    GaussRule { nodes, weights }
}

/// Pairwise (tree) summation.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n if n <= 16 => values.iter().sum(),
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// `Σ_{i₁…i_d} ∏ w_{i_k} · f(x_{i₁}, …, x_{i_d})` over the `d`-fold product of
/// `rule`. Reduction is nested per axis, so the result is deterministic.
pub fn tensor_sum(rule: &GaussRule, dim: usize, f: &dyn Fn(&[f64]) -> f64) -> f64 {
    let mut point = vec![0.0; dim];
    tensor_level(rule, 0, &mut point, f)
}

fn tensor_level(rule: &GaussRule, level: usize, point: &mut [f64], f: &dyn Fn(&[f64]) -> f64) -> f64 {
    if level == point.len() {
        return f(point);
    }
    let mut terms = Vec::with_capacity(rule.len());
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        point[level] = x;
        terms.push(w * tensor_level(rule, level + 1, point, f));
    }
    pairwise_sum(&terms)
}

/// Same as [`tensor_sum`] for integrands that are symmetric under permutation
/// of their arguments and vanish whenever two arguments coincide: only strictly
/// increasing index tuples are visited and the sum is multiplied by `dim!`.
pub fn tensor_sum_distinct(rule: &GaussRule, dim: usize, f: &dyn Fn(&[f64]) -> f64) -> f64 {
    let mut point = vec![0.0; dim];
    let mut weight = vec![1.0; dim + 1];
    let factorial: f64 = (1..=dim).map(|k| k as f64).product();
    factorial * distinct_level(rule, 0, 0, &mut point, &mut weight, f)
}

fn distinct_level(
    rule: &GaussRule,
    level: usize,
    start: usize,
    point: &mut [f64],
    weight: &mut [f64],
    f: &dyn Fn(&[f64]) -> f64,
) -> f64 {
    if level == point.len() {
        return weight[level] * f(point);
    }
    let remaining = point.len() - level;
    let mut terms = Vec::new();
    for i in start..=rule.len().saturating_sub(remaining) {
        point[level] = rule.nodes[i];
        weight[level + 1] = weight[level] * rule.weights[i];
        terms.push(distinct_level(rule, level + 1, i + 1, point, weight, f));
    }
    pairwise_sum(&terms)
}

/// Integrand of [`ordered_simplex`]: a one-body factor and a two-body factor,
/// `∏ᵢ weight(yᵢ) · ∏_{i<j} pair(yᵢ, yⱼ)` for `y₁ < … < y_m`.
pub trait ChamberIntegrand: Sync {
    fn weight(&self, y: f64) -> f64;
    fn pair(&self, lower: f64, upper: f64) -> f64;
}

/// `∫_{lo<y₁<…<y_m<hi} ∏ weight(yᵢ) ∏_{i<j} pair(yᵢ,yⱼ) dy` by nested composite
/// Gauss–Legendre rules. The full interval gets `panels` panels of `order`
/// nodes; a nested interval `[y, hi]` gets a proportional share (at least one).
/// Returns the integral and the number of integrand evaluations.
pub fn ordered_simplex(
    m: usize,
    lo: f64,
    hi: f64,
    panels: usize,
    order: usize,
    integrand: &dyn ChamberIntegrand,
) -> (f64, u64) {
    if m == 0 {
        return (1.0, 0);
    }
    let base = gauss_legendre(order);
    let mut ys = Vec::with_capacity(m);
    let mut evals = 0u64;
    let density = panels as f64 / (hi - lo);
    let v = chamber_level(m, lo, hi, density, &base, integrand, &mut ys, 1.0, &mut evals);
    (v, evals)
}

#[allow(clippy::too_many_arguments)]
fn chamber_level(
    m: usize,
    lower: f64,
    hi: f64,
    density: f64,
    base: &GaussRule,
    integrand: &dyn ChamberIntegrand,
    ys: &mut Vec<f64>,
    carried: f64,
    evals: &mut u64,
) -> f64 {
    if lower >= hi {
        return 0.0;
    }
    let panels = ((density * (hi - lower)).ceil() as usize).max(1);
    let rule = composite_from(base, lower, hi, panels);
    let mut terms = Vec::with_capacity(rule.len());
    for (&y, &w) in rule.nodes.iter().zip(&rule.weights) {
        *evals += 1;
        let mut factor = integrand.weight(y);
        for &prev in ys.iter() {
            factor *= integrand.pair(prev, y);
        }
        let value = carried * factor;
        if ys.len() + 1 == m {
            terms.push(w * value);
        } else {
            ys.push(y);
            terms.push(w * chamber_level(m, y, hi, density, base, integrand, ys, value, evals));
            ys.pop();
        }
    }
    pairwise_sum(&terms)
}
