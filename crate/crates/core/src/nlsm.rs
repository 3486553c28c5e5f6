//! Finite-n replica integrals and the Selberg closed forms used to check them.
//!
//! Values carry a separate logarithmic scale so that large `N` does not
//! overflow: the integral equals `value · exp(log_scale)`. Overall constants
//! that the replica reduction drops are not restored, so only ratios between
//! arguments at fixed `(n, N)` are meaningful.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Uniform};

use crate::ensembles::SymmetryClass;
use crate::error::{param, Result};
use crate::parallel::{try_map_indexed, Execution};
use crate::quadrature::{
    composite_legendre, gauss_laguerre, ordered_simplex, tensor_sum_distinct, ChamberIntegrand,
};
use crate::special::ln_gamma;

/// Largest replica index evaluated deterministically, per class.
pub const MAX_N_AIDAG: usize = 4;
pub const MAX_N_AIIDAG: usize = 2;
/// Largest replica index for the AI† two-point integral.
pub const MAX_N_AIDAG_TWO_POINT: usize = 3;

const REL_TOL: f64 = 1e-10;
const LEGENDRE_ORDER: usize = 16;
const MAX_PANELS: usize = 64;
const CHAMBER_ORDER: usize = 16;
const MAX_CHAMBER_PANELS: usize = 8;
const LOG_DROP: f64 = 50.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadratureMethod {
    TensorGauss,
    OrderedSimplexAdaptive,
    /// Importance-sampled estimate; approximate.
    MonteCarlo,
}

impl QuadratureMethod {
    pub fn name(self) -> &'static str {
        match self {
            Self::TensorGauss => "tensor_gauss",
            Self::OrderedSimplexAdaptive => "ordered_simplex_adaptive",
            Self::MonteCarlo => "monte_carlo",
        }
    }
}

impl fmt::Display for QuadratureMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `value · exp(log_scale)` is the integral; `abs_error_est` is in the same
/// (scaled) units as `value`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub log_scale: f64,
    pub abs_error_est: f64,
    pub n_nodes: u64,
    pub method: QuadratureMethod,
}

impl QuadratureResult {
    fn exact_one() -> Self {
        Self { value: 1.0, log_scale: 0.0, abs_error_est: 0.0, n_nodes: 0, method: QuadratureMethod::TensorGauss }
    }

    /// The integral itself (may overflow for large `N`).
    pub fn actual(&self) -> f64 {
        self.value * self.log_scale.exp()
    }

    pub fn ln_value(&self) -> f64 {
        self.value.ln() + self.log_scale
    }

    pub fn rel_error(&self) -> f64 {
        if self.value == 0.0 {
            f64::INFINITY
        } else {
            (self.abs_error_est / self.value).abs()
        }
    }

    /// `self / other`, computed without leaving the log domain.
    pub fn ratio_to(&self, other: &Self) -> f64 {
        (self.value / other.value) * (self.log_scale - other.log_scale).exp()
    }

    pub fn is_approximate(&self) -> bool {
        self.method == QuadratureMethod::MonteCarlo
    }

    fn scaled_by(mut self, log_factor: f64) -> Self {
        self.log_scale += log_factor;
        self
    }
}

fn ln_factorial(m: usize) -> f64 {
    ln_gamma(m as f64 + 1.0)
}

fn check_n(n: usize, max: usize, what: &str) -> Result<()> {
    if n > max {
        return param(format!("{what}: replica index n={n} outside supported range 0..={max}"));
    }
    Ok(())
}

fn check_finite_nonneg(x: f64, what: &str) -> Result<()> {
    if !(x.is_finite() && x >= 0.0) {
        return param(format!("{what} must be finite and non-negative, got {x}"));
    }
    Ok(())
}

fn vandermonde_pow(x: &[f64], beta: i32) -> f64 {
    let mut prod = 1.0;
    for j in 1..x.len() {
        for i in 0..j {
            prod *= (x[j] - x[i]).abs();
        }
    }
    prod.powi(beta)
}

// ---------------------------------------------------------------------------
// Laguerre-type integrals in y = √λ

/// `∫_{[0,∞)^m} ∏ λᵢ^α e^{−tλᵢ}(λᵢ+ζ)^N |Δ(λ)|^β dλ` in the variable `y = √λ`.
struct LaguerreChamber {
    y_power: f64,
    t: f64,
    power: f64,
    zeta: f64,
    beta: i32,
    shift: f64,
}

impl LaguerreChamber {
    fn log_one_body(&self, y: f64) -> f64 {
        let mut h = -self.t * y * y;
        if self.y_power != 0.0 {
            h += self.y_power * y.ln();
        }
        if self.power != 0.0 {
            h += self.power * (y * y + self.zeta).ln();
        }
        h
    }
}

impl ChamberIntegrand for LaguerreChamber {
    fn weight(&self, y: f64) -> f64 {
        2.0 * (self.log_one_body(y) - self.shift).exp()
    }

    fn pair(&self, lower: f64, upper: f64) -> f64 {
        ((upper - lower) * (upper + lower)).powi(self.beta)
    }
}

/// Maximum of a unimodal-ish log envelope on `(0, ∞)` and the point beyond the
/// maximum where it has dropped by [`LOG_DROP`].
fn envelope_extent(h: impl Fn(f64) -> f64, scale: f64) -> (f64, f64) {
    let n = 4000;
    let top = 8.0 * scale;
    let (mut best, mut arg) = (f64::NEG_INFINITY, 0.0);
    for k in 1..=n {
        let y = top * k as f64 / n as f64;
        let v = h(y);
        if v > best {
            best = v;
            arg = y;
        }
    }
    let target = best - LOG_DROP;
    let mut hi = arg.max(scale * 1e-3);
    while h(hi) > target {
        hi *= 1.5;
    }
    let mut lo = arg;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if h(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (best, hi)
}

fn adaptive_chamber(m: usize, lo: f64, hi: f64, integrand: &dyn ChamberIntegrand) -> QuadratureResult {
    let mut evals = 0u64;
    let (mut prev, e) = ordered_simplex(m, lo, hi, 1, CHAMBER_ORDER, integrand);
    evals += e;
    let mut panels = 1;
    let mut err = f64::INFINITY;
    let mut value = prev;
    while panels < MAX_CHAMBER_PANELS {
        panels *= 2;
        let (v, e) = ordered_simplex(m, lo, hi, panels, CHAMBER_ORDER, integrand);
        evals += e;
        err = (v - prev).abs();
        value = v;
        if err <= REL_TOL * v.abs() {
            break;
        }
        prev = v;
    }
    let factorial = ln_factorial(m).exp();
    QuadratureResult {
        value: value * factorial,
        log_scale: 0.0,
        abs_error_est: err * factorial,
        n_nodes: evals,
        method: QuadratureMethod::OrderedSimplexAdaptive,
    }
}

/// Ordered-simplex evaluation of
/// `∫_{[0,∞)^m} ∏ λᵢ^α e^{−tλᵢ}(λᵢ+ζ)^N |Δ(λ)|^β dλ`.
pub fn laguerre_chamber_integral(
    m: usize,
    alpha: f64,
    beta: u32,
    t: f64,
    power: u32,
    zeta: f64,
) -> Result<QuadratureResult> {
    if !(alpha > -1.0 && t > 0.0 && t.is_finite()) {
        return param(format!("laguerre chamber: need α > −1 and t > 0, got α={alpha}, t={t}"));
    }
    check_finite_nonneg(zeta, "ζ")?;
    if m == 0 {
        return Ok(QuadratureResult::exact_one());
    }
    let mut chamber = LaguerreChamber {
        y_power: 2.0 * alpha + 1.0,
        t,
        power: power as f64,
        zeta,
        beta: beta as i32,
        shift: 0.0,
    };
    let growth = 2.0 * beta as f64 * (m as f64 - 1.0);
    let scale = ((power as f64 + 2.0 * alpha.abs() + growth + 2.0) / t + zeta).sqrt();
    let (shift, _) = envelope_extent(|y| chamber.log_one_body(y), scale);
    let (_, hi) = envelope_extent(|y| chamber.log_one_body(y) + growth * y.ln(), scale);
    chamber.shift = shift;
    let r = adaptive_chamber(m, 0.0, hi, &chamber);
    Ok(r.scaled_by(m as f64 * shift))
}

// ---------------------------------------------------------------------------
// Selberg–Laguerre closed form

fn selberg_supported(alpha: f64, beta: u32) -> bool {
    [-0.5, 0.0, 1.0].contains(&alpha) && (beta == 1 || beta == 4)
}

/// `∫_{[0,∞)^m} ∏ yᵢ^α e^{−t yᵢ} |Δ(y)|^β dy` in closed form.
///
/// Supported: `α ∈ {−1/2, 0, 1}`, `β ∈ {1, 4}`.
pub fn selberg_laguerre(m: usize, t: f64, alpha: f64, beta: u32) -> Result<f64> {
    Ok(ln_selberg_laguerre(m, t, alpha, beta)?.exp())
}

pub fn ln_selberg_laguerre(m: usize, t: f64, alpha: f64, beta: u32) -> Result<f64> {
    if !selberg_supported(alpha, beta) {
        return param(format!("selberg_laguerre: unsupported (α, β) = ({alpha}, {beta})"));
    }
    if !(t > 0.0 && t.is_finite()) {
        return param(format!("selberg_laguerre: t must be positive, got {t}"));
    }
    let gam = beta as f64 / 2.0;
    let mf = m as f64;
    let mut ln = -(mf * (alpha + 1.0) + gam * mf * (mf - 1.0)) * t.ln();
    for j in 0..m {
        let jf = j as f64;
        ln += ln_gamma(alpha + 1.0 + jf * gam) + ln_gamma(1.0 + (jf + 1.0) * gam) - ln_gamma(1.0 + gam);
    }
    Ok(ln)
}

/// The same integral by quadrature, as an independent check on the closed
/// form: ordered simplex for either β, or an exact tensor Gauss–Laguerre rule
/// when β is even and `tensor` is requested.
pub fn selberg_laguerre_quadrature(m: usize, t: f64, alpha: f64, beta: u32, tensor: bool) -> Result<QuadratureResult> {
    if !selberg_supported(alpha, beta) {
        return param(format!("selberg_laguerre: unsupported (α, β) = ({alpha}, {beta})"));
    }
    if !tensor {
        return laguerre_chamber_integral(m, alpha, beta, t, 0, 0.0);
    }
    if beta % 2 != 0 {
        return param("tensor rule requires an even Vandermonde power");
    }
    if !(t > 0.0 && t.is_finite()) {
        return param(format!("selberg_laguerre: t must be positive, got {t}"));
    }
    if m == 0 {
        return Ok(QuadratureResult::exact_one());
    }
    // y = μ/t; the remaining factor Δ(μ)^β has per-variable degree β(m−1)
    let degree = beta as usize * (m - 1);
    let rule = gauss_laguerre(degree / 2 + 2, alpha);
    let b = beta as i32;
    let value = tensor_sum_distinct(&rule, m, &|mu| vandermonde_pow(mu, b));
    let exponent = m as f64 * (alpha + 1.0) + beta as f64 * (m * (m - 1)) as f64 / 2.0;
    Ok(QuadratureResult {
        value,
        log_scale: -exponent * t.ln(),
        abs_error_est: 0.0,
        n_nodes: (rule.len() as u64).pow(m as u32),
        method: QuadratureMethod::TensorGauss,
    })
}

// ---------------------------------------------------------------------------
// AI† one-point

/// Gauss–Laguerre node count that integrates the AI† one-point polynomial
/// factor exactly.
pub fn aidag_one_point_nodes(n: usize, n_half: usize) -> usize {
    (n_half + 2 + 4 * n.saturating_sub(1)).div_ceil(2) + 2
}

/// `∫_{[0,∞)^n} ∏ e^{−2λₐ/g}(|z|²+λₐ)^N λₐ Δ(λ)⁴ dλ`, by a tensor
/// generalized Gauss–Laguerre rule after `λ = (g/2)μ`.
pub fn z1_integral_aidag(n: usize, n_half: usize, g: f64, zsq: f64) -> Result<QuadratureResult> {
    z1_integral_aidag_with_nodes(n, n_half, g, zsq, aidag_one_point_nodes(n, n_half))
}

/// [`z1_integral_aidag`] with an explicit per-axis node count.
pub fn z1_integral_aidag_with_nodes(
    n: usize,
    n_half: usize,
    g: f64,
    zsq: f64,
    nodes: usize,
) -> Result<QuadratureResult> {
    check_n(n, MAX_N_AIDAG, "z1_integral_aidag")?;
    check_width(g)?;
    check_finite_nonneg(zsq, "|z|²")?;
    if n_half == 0 {
        return param("N must be at least 1");
    }
    if n == 0 {
        return Ok(QuadratureResult::exact_one());
    }
    if nodes < n {
        return param(format!("need at least n={n} nodes per axis, got {nodes}"));
    }
    let rule = gauss_laguerre(nodes, 1.0);
    let zeta = 2.0 * zsq / g;
    let nf = n_half as f64;
    // fold the weights and one-body factors into per-node scaled weights
    let logs: Vec<f64> = rule.nodes.iter().zip(&rule.weights).map(|(&x, &w)| w.ln() + nf * (zeta + x).ln()).collect();
    let shift = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut folded = rule.clone();
    for (w, l) in folded.weights.iter_mut().zip(&logs) {
        *w = (l - shift).exp();
    }
    let value = tensor_sum_distinct(&folded, n, &|mu| vandermonde_pow(mu, 4));
    let jacobian = (n as f64 * (nf + 2.0) + 2.0 * (n * (n - 1)) as f64) * (g / 2.0).ln();
    Ok(QuadratureResult {
        value,
        log_scale: n as f64 * shift + jacobian,
        abs_error_est: value.abs() * 1e-13,
        n_nodes: (nodes as u64).pow(n as u32),
        method: QuadratureMethod::TensorGauss,
    })
}

/// The AI† one-point integral by the ordered-simplex route; used to
/// cross-check the tensor rule.
pub fn z1_integral_aidag_simplex(n: usize, n_half: usize, g: f64, zsq: f64) -> Result<QuadratureResult> {
    check_n(n, MAX_N_AIDAG, "z1_integral_aidag")?;
    check_width(g)?;
    check_finite_nonneg(zsq, "|z|²")?;
    laguerre_chamber_integral(n, 1.0, 4, 2.0 / g, n_half as u32, zsq)
}

fn check_width(g: f64) -> Result<()> {
    if !(g > 0.0 && g.is_finite()) {
        return param(format!("width g must be positive, got {g}"));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// AII† one-point

/// `∫_{[0,∞)^{2n}} ∏ e^{−λₐ}(λₐ+|z|²)^N λₐ^{−1/2} |Δ(λ)| dλ` in g = 1 units.
/// For width g pass `zsq / g` (see [`aiidag_rescale_zsq`]).
pub fn z1_integral_aiidag(n: usize, n_half: usize, zsq: f64) -> Result<QuadratureResult> {
    check_n(n, MAX_N_AIIDAG, "z1_integral_aiidag")?;
    check_finite_nonneg(zsq, "|z|²")?;
    if n_half == 0 {
        return param("N must be at least 1");
    }
    laguerre_chamber_integral(2 * n, -0.5, 1, 1.0, n_half as u32, zsq)
}

/// Maps a physical `|z|²` at width `g` onto the g = 1 argument of the AII†
/// integrals. Exact: `H → √g H` maps the width-1 ensemble onto width g.
pub fn aiidag_rescale_zsq(zsq: f64, g: f64) -> f64 {
    zsq / g
}

// ---------------------------------------------------------------------------
// Two-point integrals

struct JacobiAidag {
    t: f64,
}

impl JacobiAidag {
    fn one_body(&self, x: f64) -> f64 {
        x * (1.0 - x) * (-2.0 * self.t * x).exp()
    }
}

/// `∫_{[0,1]^n} ∏ λᵢ(1−λᵢ) e^{−2tλᵢ} Δ(λ)⁴ dλ` with panel doubling.
pub fn j_aidag(n: usize, t: f64) -> Result<QuadratureResult> {
    check_n(n, MAX_N_AIDAG_TWO_POINT, "z2_integral_aidag")?;
    check_finite_nonneg(t, "ω²")?;
    if n == 0 {
        return Ok(QuadratureResult::exact_one());
    }
    let f = JacobiAidag { t };
    let eval = |panels: usize| {
        let mut rule = composite_legendre(0.0, 1.0, panels, LEGENDRE_ORDER);
        for (w, &x) in rule.weights.iter_mut().zip(&rule.nodes) {
            *w *= f.one_body(x);
        }
        let nodes = rule.len();
        (tensor_sum_distinct(&rule, n, &|x| vandermonde_pow(x, 4)), (nodes as u64).pow(n as u32))
    };
    let (mut prev, mut evals) = eval(1);
    let (mut value, mut err) = (prev, f64::INFINITY);
    let mut panels = 1;
    while panels < MAX_PANELS {
        panels *= 2;
        let (v, e) = eval(panels);
        evals += e;
        err = (v - prev).abs();
        value = v;
        if err <= REL_TOL * v.abs() {
            break;
        }
        prev = v;
    }
    Ok(QuadratureResult { value, log_scale: 0.0, abs_error_est: err, n_nodes: evals, method: QuadratureMethod::TensorGauss })
}

/// `e^{4n|z|²} e^{nω²} ∫_{[0,1]^n} ∏ λᵢ(1−λᵢ) e^{−2ω²λᵢ} Δ(λ)⁴ dλ` (g = 1 units).
pub fn z2_integral_aidag(n: usize, omega_sq: f64, zsq: f64) -> Result<QuadratureResult> {
    check_finite_nonneg(zsq, "|z|²")?;
    let j = j_aidag(n, omega_sq)?;
    Ok(j.scaled_by(n as f64 * (4.0 * zsq + omega_sq)))
}

struct JacobiTheta {
    t: f64,
}

impl ChamberIntegrand for JacobiTheta {
    fn weight(&self, theta: f64) -> f64 {
        let s = theta.sin();
        2.0 * (-self.t * s * s).exp()
    }

    fn pair(&self, lower: f64, upper: f64) -> f64 {
        // sin²b − sin²a = sin(b−a) sin(b+a), free of cancellation
        (upper - lower).sin() * (upper + lower).sin()
    }
}

/// `I_m(t) = ∫_{[0,1]^m} ∏ (λᵢ(1−λᵢ))^{−1/2} e^{−tλᵢ} |Δ(λ)| dλ`, via
/// `λ = sin²θ` on the ordered chamber in θ.
pub fn i_m(m: usize, t: f64) -> Result<QuadratureResult> {
    check_finite_nonneg(t, "t")?;
    if m > 2 * MAX_N_AIIDAG {
        return param(format!("I_m: m={m} outside supported range 0..={}", 2 * MAX_N_AIIDAG));
    }
    if m == 0 {
        return Ok(QuadratureResult::exact_one());
    }
    Ok(adaptive_chamber(m, 0.0, FRAC_PI_2, &JacobiTheta { t }))
}

/// `e^{4n|z|²} e^{nt} I_{2n}(t)` (g = 1 units).
pub fn z2_integral_aiidag(n: usize, t: f64, zsq: f64) -> Result<QuadratureResult> {
    check_n(n, MAX_N_AIIDAG, "z2_integral_aiidag")?;
    check_finite_nonneg(zsq, "|z|²")?;
    let r = i_m(2 * n, t)?;
    Ok(r.scaled_by(n as f64 * (4.0 * zsq + t)))
}

// ---------------------------------------------------------------------------
// Figure normalizations

/// `Zₙ(z)/Zₙ(0) · e^{−2n|z|²/g}` from the replica integral at width `g`.
pub fn normalized_one_point(class: SymmetryClass, n: usize, n_half: usize, g: f64, zsq: f64) -> Result<f64> {
    check_width(g)?;
    let at_z = one_point_raw(class, n, n_half, g, zsq)?;
    let at_0 = one_point_raw(class, n, n_half, g, 0.0)?;
    Ok(at_z.ratio_to(&at_0) * (-2.0 * n as f64 * zsq / g).exp())
}

/// `Zₙ⁽²⁾(0,z₂)/Zₙ⁽²⁾(0,0) · e^{−2n|z₂|²/g}`. With `z₁ = 0` the centre and
/// separation exponentials cancel the display factor, leaving the ratio of the
/// bare integrals at `t = |z₂|²/g` and `t = 0`.
pub fn normalized_two_point(class: SymmetryClass, n: usize, g: f64, z2_abs: f64) -> Result<f64> {
    check_width(g)?;
    let t = z2_abs * z2_abs / g;
    Ok(two_point_raw(class, n, t)?.ratio_to(&two_point_raw(class, n, 0.0)?))
}

fn one_point_raw(class: SymmetryClass, n: usize, n_half: usize, g: f64, zsq: f64) -> Result<QuadratureResult> {
    match class {
        SymmetryClass::AIDagger => z1_integral_aidag(n, n_half, g, zsq),
        SymmetryClass::AIIDagger => z1_integral_aiidag(n, n_half, aiidag_rescale_zsq(zsq, g)),
        SymmetryClass::A => param("no replica integral for class A"),
    }
}

fn two_point_raw(class: SymmetryClass, n: usize, t: f64) -> Result<QuadratureResult> {
    match class {
        SymmetryClass::AIDagger => j_aidag(n, t),
        SymmetryClass::AIIDagger => {
            check_n(n, MAX_N_AIIDAG, "z2_integral_aiidag")?;
            i_m(2 * n, t)
        }
        SymmetryClass::A => param("no replica integral for class A"),
    }
}

/// [`normalized_one_point`] on a grid of `|z|`, sharing the `z = 0` reference.
pub fn normalized_one_point_grid(
    class: SymmetryClass,
    n: usize,
    n_half: usize,
    g: f64,
    radii: &[f64],
    exec: Execution,
) -> Result<Vec<f64>> {
    check_width(g)?;
    let at_0 = one_point_raw(class, n, n_half, g, 0.0)?;
    try_map_indexed(0, radii.len() as u64, exec, |k| {
        let zsq = radii[k as usize].powi(2);
        Ok(one_point_raw(class, n, n_half, g, zsq)?.ratio_to(&at_0) * (-2.0 * n as f64 * zsq / g).exp())
    })
}

/// [`normalized_two_point`] on a grid of `|z₂|`, sharing the `t = 0` reference.
pub fn normalized_two_point_grid(class: SymmetryClass, n: usize, g: f64, radii: &[f64], exec: Execution) -> Result<Vec<f64>> {
    check_width(g)?;
    let at_0 = two_point_raw(class, n, 0.0)?;
    try_map_indexed(0, radii.len() as u64, exec, |k| {
        Ok(two_point_raw(class, n, radii[k as usize].powi(2) / g)?.ratio_to(&at_0))
    })
}

// ---------------------------------------------------------------------------
// Spec-driven dispatch with a Monte Carlo fallback

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntegralKind {
    OnePoint,
    TwoPoint,
}

/// One replica integral. `argument` is `|z|²` for one-point integrals (AI†:
/// physical units at width `g`; AII†: rescaled internally by `g`) and `t` in
/// g = 1 units for two-point integrals (`2ω²` enters the AI† exponent as
/// `2t`). `center_sq` is the two-point centre `|z|²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReplicaIntegralSpec {
    pub class: SymmetryClass,
    pub kind: IntegralKind,
    pub n: usize,
    pub n_half: usize,
    pub g: f64,
    pub argument: f64,
    pub center_sq: f64,
}

impl ReplicaIntegralSpec {
    fn max_n(&self) -> usize {
        match (self.class, self.kind) {
            (SymmetryClass::AIDagger, IntegralKind::OnePoint) => MAX_N_AIDAG,
            (SymmetryClass::AIDagger, IntegralKind::TwoPoint) => MAX_N_AIDAG_TWO_POINT,
            _ => MAX_N_AIIDAG,
        }
    }

    /// Deterministic quadrature within the supported replica range, otherwise
    /// the Monte Carlo fallback (flagged via [`QuadratureResult::is_approximate`]).
    pub fn evaluate(&self) -> Result<QuadratureResult> {
        if self.class == SymmetryClass::A {
            return param("no replica integral for class A");
        }
        check_width(self.g)?;
        if self.n > self.max_n() {
            return monte_carlo_integral(self, 1 << 18, 0);
        }
        match (self.class, self.kind) {
            (SymmetryClass::AIDagger, IntegralKind::OnePoint) => {
                z1_integral_aidag(self.n, self.n_half, self.g, self.argument)
            }
            (SymmetryClass::AIIDagger, IntegralKind::OnePoint) => {
                z1_integral_aiidag(self.n, self.n_half, aiidag_rescale_zsq(self.argument, self.g))
            }
            (SymmetryClass::AIDagger, IntegralKind::TwoPoint) => {
                z2_integral_aidag(self.n, self.argument, self.center_sq)
            }
            (SymmetryClass::AIIDagger, IntegralKind::TwoPoint) => {
                z2_integral_aiidag(self.n, self.argument, self.center_sq)
            }
            (SymmetryClass::A, _) => unreachable!(),
        }
    }
}

/// Importance-sampled estimate of the same integral as
/// [`ReplicaIntegralSpec::evaluate`], for any replica index. Deterministic for
/// a given seed.
pub fn monte_carlo_integral(spec: &ReplicaIntegralSpec, samples: usize, seed: u64) -> Result<QuadratureResult> {
    if samples < 2 {
        return param("monte carlo integral needs at least 2 samples");
    }
    check_width(spec.g)?;
    check_finite_nonneg(spec.argument, "argument")?;
    if spec.n == 0 {
        return Ok(QuadratureResult::exact_one());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.n;
    let nf = spec.n_half as f64;
    let mut logs = Vec::with_capacity(samples);
    let mut prefactor = 0.0;
    match (spec.class, spec.kind) {
        (SymmetryClass::AIDagger, IntegralKind::OnePoint) => {
            // μ ~ Γ(k, 1) per axis against μ e^{−μ}(ζ+μ)^N Δ(μ)⁴
            let zeta = 2.0 * spec.argument / spec.g;
            let k = 2.0 + nf + 2.0 * (n as f64 - 1.0);
            let dist = Gamma::new(k, 1.0).expect("positive shape");
            let mut x = vec![0.0f64; n];
            for _ in 0..samples {
                let mut l = 0.0;
                for xi in x.iter_mut() {
                    *xi = dist.sample(&mut rng);
                    l += xi.ln() - *xi + nf * (zeta + *xi).ln() - gamma_log_pdf(*xi, k);
                }
                logs.push(l + vandermonde_pow(&x, 4).ln());
            }
            prefactor = (n as f64 * (nf + 2.0) + 2.0 * (n * (n - 1)) as f64) * (spec.g / 2.0).ln();
        }
        (SymmetryClass::AIIDagger, IntegralKind::OnePoint) => {
            let zeta = aiidag_rescale_zsq(spec.argument, spec.g);
            let m = 2 * n;
            let k = 0.5 + nf + (m as f64 - 1.0) / 2.0;
            let dist = Gamma::new(k, 1.0).expect("positive shape");
            let mut x = vec![0.0f64; m];
            for _ in 0..samples {
                let mut l = 0.0;
                for xi in x.iter_mut() {
                    *xi = dist.sample(&mut rng);
                    l += -0.5 * xi.ln() - *xi + nf * (zeta + *xi).ln() - gamma_log_pdf(*xi, k);
                }
                logs.push(l + vandermonde_pow(&x, 1).ln());
            }
        }
        (SymmetryClass::AIDagger, IntegralKind::TwoPoint) => {
            let t = spec.argument;
            let dist = Uniform::new(0.0, 1.0).expect("valid range");
            let mut x = vec![0.0f64; n];
            for _ in 0..samples {
                let mut l = 0.0;
                for xi in x.iter_mut() {
                    *xi = dist.sample(&mut rng);
                    l += (*xi * (1.0 - *xi)).ln() - 2.0 * t * *xi;
                }
                logs.push(l + vandermonde_pow(&x, 4).ln());
            }
            prefactor = n as f64 * (4.0 * spec.center_sq + t);
        }
        (SymmetryClass::AIIDagger, IntegralKind::TwoPoint) => {
            let t = spec.argument;
            let m = 2 * n;
            let dist = Uniform::new(0.0, FRAC_PI_2).expect("valid range");
            let mut x = vec![0.0f64; m];
            for _ in 0..samples {
                let mut l = 0.0;
                for xi in x.iter_mut() {
                    let s = dist.sample(&mut rng).sin();
                    *xi = s * s;
                    l -= t * *xi;
                }
                logs.push(l + vandermonde_pow(&x, 1).ln());
            }
            prefactor = n as f64 * (4.0 * spec.center_sq + t) + m as f64 * (2.0 * FRAC_PI_2).ln();
        }
        (SymmetryClass::A, _) => return param("no replica integral for class A"),
    }
    let shift = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logs.iter().map(|l| (l - shift).exp()).collect();
    let (mean, se) = crate::stats::mean_and_std_error(&w);
    Ok(QuadratureResult {
        value: mean,
        log_scale: shift + prefactor,
        abs_error_est: se,
        n_nodes: samples as u64,
        method: QuadratureMethod::MonteCarlo,
    })
}

fn gamma_log_pdf(x: f64, k: f64) -> f64 {
    (k - 1.0) * x.ln() - x - ln_gamma(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        ((a - b) / b).abs() < rel
    }

    #[test]
    fn aidag_one_point_examples() {
        let r = z1_integral_aidag(1, 1, 2.0, 0.0).unwrap();
        assert!(close(r.actual(), 2.0, 1e-13));
        let at1 = z1_integral_aidag(1, 1, 2.0, 1.0).unwrap();
        assert!(close(at1.ratio_to(&r), 1.5, 1e-13));
        assert_eq!(z1_integral_aidag(0, 3, 2.0, 1.0).unwrap().actual(), 1.0);
        assert!(z1_integral_aidag(5, 3, 2.0, 1.0).is_err());
    }

    #[test]
    fn aidag_one_point_is_exact_with_two_extra_nodes() {
        for n in 1..=3 {
            for n_half in [1usize, 5, 10] {
                for zsq in [0.0, 0.7, 4.5] {
                    let m = aidag_one_point_nodes(n, n_half);
                    let a = z1_integral_aidag_with_nodes(n, n_half, 2.0, zsq, m).unwrap();
                    let b = z1_integral_aidag_with_nodes(n, n_half, 2.0, zsq, m + 2).unwrap();
                    assert!(close(a.ratio_to(&b), 1.0, 1e-12), "n={n} N={n_half} zsq={zsq}");
                }
            }
        }
    }

    #[test]
    fn aidag_one_point_tensor_matches_simplex() {
        for (n, n_half, g, zsq) in [(1, 2, 2.0, 0.5), (2, 2, 2.0, 1.0), (2, 5, 1.0, 3.0), (3, 1, 2.0, 0.0)] {
            let t = z1_integral_aidag(n, n_half, g, zsq).unwrap();
            let s = z1_integral_aidag_simplex(n, n_half, g, zsq).unwrap();
            assert!(close(t.ratio_to(&s), 1.0, 1e-8), "n={n} N={n_half}: {} vs {}", t.ln_value(), s.ln_value());
        }
    }

    #[test]
    fn one_point_ratios_increase_with_zsq() {
        for class in [SymmetryClass::AIDagger, SymmetryClass::AIIDagger] {
            let mut last = 0.0;
            for k in 0..10 {
                let zsq = 0.5 * k as f64;
                let at_z = match class {
                    SymmetryClass::AIDagger => z1_integral_aidag(2, 5, 2.0, zsq),
                    _ => z1_integral_aiidag(1, 5, zsq),
                }
                .unwrap();
                let at0 = match class {
                    SymmetryClass::AIDagger => z1_integral_aidag(2, 5, 2.0, 0.0),
                    _ => z1_integral_aiidag(1, 5, 0.0),
                }
                .unwrap();
                let ratio = at_z.ratio_to(&at0);
                assert!(ratio >= last, "{class} zsq={zsq}");
                last = ratio;
            }
        }
    }

    #[test]
    fn aiidag_one_point_matches_selberg_at_n_half_zero_power() {
        // N = 0 removes the (λ+|z|²)^N factor; what is left is Selberg (m=2, α=−1/2, β=1)
        let q = laguerre_chamber_integral(2, -0.5, 1, 1.0, 0, 0.0).unwrap();
        let exact = selberg_laguerre(2, 1.0, -0.5, 1).unwrap();
        assert!(close(q.actual(), exact, 1e-10));
        assert!(close(exact, 2.0, 1e-14));
    }

    #[test]
    fn aiidag_one_point_n1_closed_form() {
        // expanding (λ₁+ζ)(λ₂+ζ) against the m=2, β=1 Laguerre measure:
        // ∫w|Δ| = 2, ∫(λ₁+λ₂)w|Δ| = −d/dt(2t⁻²)|₁ = 4, ∫λ₁λ₂w|Δ| = Selberg(α=1/2) = 1
        for zeta in [0.0, 0.8, 3.0] {
            let got = z1_integral_aiidag(1, 1, zeta).unwrap().actual();
            let exact = 1.0 + 4.0 * zeta + 2.0 * zeta * zeta;
            assert!(close(got, exact, 1e-10), "{got} vs {exact}");
        }
    }

    #[test]
    fn selberg_examples() {
        assert!(close(selberg_laguerre(1, 1.0, -0.5, 1).unwrap(), PI.sqrt(), 1e-14));
        assert!(close(selberg_laguerre(1, 1.0, 1.0, 4).unwrap(), 1.0, 1e-14));
        assert!(selberg_laguerre(2, 1.0, 0.5, 1).is_err());
        assert!(selberg_laguerre(2, 1.0, -0.5, 2).is_err());
    }

    #[test]
    fn selberg_matches_documented_half_integer_product() {
        for m in 1..=4usize {
            for t in [0.5f64, 1.0, 2.0] {
                let mut v = f64::powf(t, -((m * m) as f64) / 2.0) / gamma(1.5).powi(m as i32);
                for k in 1..=m {
                    v *= gamma(k as f64 / 2.0) * gamma(1.0 + k as f64 / 2.0);
                }
                assert!(close(selberg_laguerre(m, t, -0.5, 1).unwrap(), v, 1e-12));
            }
        }
    }

    #[test]
    fn selberg_quadrature_suite() {
        for m in 1..=3usize {
            for alpha in [-0.5, 0.0, 1.0] {
                for beta in [1u32, 4] {
                    for t in [0.5, 1.0, 2.0] {
                        let exact = selberg_laguerre(m, t, alpha, beta).unwrap();
                        let q = selberg_laguerre_quadrature(m, t, alpha, beta, false).unwrap();
                        assert!(close(q.actual(), exact, 1e-8), "m={m} α={alpha} β={beta} t={t}");
                        if beta == 4 {
                            let q = selberg_laguerre_quadrature(m, t, alpha, beta, true).unwrap();
                            assert!(close(q.actual(), exact, 1e-11));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn aidag_two_point_examples() {
        let r = z2_integral_aidag(1, 0.0, 0.0).unwrap();
        assert!(close(r.actual(), 1.0 / 6.0, 1e-13));
        assert_eq!(z2_integral_aidag(0, 2.0, 1.0).unwrap().actual(), 1.0);
        // n=1 closed form: ∫₀¹ λ(1−λ)e^{−aλ} with a = 2t
        let t: f64 = 1.3;
        let a = 2.0 * t;
        let exact = ((a - 2.0) + (a + 2.0) * (-a).exp()) / a.powi(3);
        let j = j_aidag(1, t).unwrap();
        assert!(close(j.actual(), exact, 1e-12));
    }

    #[test]
    fn i_m_examples() {
        assert!(close(i_m(1, 0.0).unwrap().actual(), PI, 1e-13));
        // m=2, t=0: ∫∫ |λ₁−λ₂| dArcsine² = π² · E|X−Y| with X,Y arcsine = π²·4/π²
        assert!(close(i_m(2, 0.0).unwrap().actual(), 4.0, 1e-10));
        assert_eq!(z2_integral_aiidag(0, 1.0, 0.0).unwrap().actual(), 1.0);
    }

    #[test]
    fn i_2_approaches_selberg_at_large_t() {
        let dev = |t: f64| {
            let i = i_m(2, t).unwrap().actual();
            (i / selberg_laguerre(2, t, -0.5, 1).unwrap() - 1.0).abs()
        };
        let (d20, d80) = (dev(20.0), dev(80.0));
        assert!(d80 < d20 && d80 < 0.02, "{d20} {d80}");
    }

    #[test]
    fn normalized_curves_start_at_one() {
        for class in [SymmetryClass::AIDagger, SymmetryClass::AIIDagger] {
            assert!((normalized_one_point(class, 1, 5, 2.0, 0.0).unwrap() - 1.0).abs() < 1e-14);
            assert!((normalized_two_point(class, 1, 2.0, 0.0).unwrap() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn monte_carlo_fallback_agrees_with_quadrature() {
        let spec = ReplicaIntegralSpec {
            class: SymmetryClass::AIDagger,
            kind: IntegralKind::OnePoint,
            n: 2,
            n_half: 3,
            g: 2.0,
            argument: 1.0,
            center_sq: 0.0,
        };
        let exact = spec.evaluate().unwrap();
        let mc = monte_carlo_integral(&spec, 200_000, 3).unwrap();
        assert!(mc.is_approximate());
        let z = (mc.actual() - exact.actual()) / (mc.abs_error_est * mc.log_scale.exp());
        assert!(z.abs() < 5.0, "z={z}");
        let high = ReplicaIntegralSpec { n: 5, ..spec };
        assert!(high.evaluate().unwrap().is_approximate());
    }
}
