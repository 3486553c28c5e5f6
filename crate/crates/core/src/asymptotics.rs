//! Closed-form predictions: edge density of states, bulk two-point functions,
//! small-n replica coefficients and small-matrix spacing surmises.

use std::f64::consts::PI;

use crate::ensembles::SymmetryClass;
use crate::error::{param, Result};
use crate::special::{bessel_k0, bessel_k1, gamma};

fn need_replica_class(class: SymmetryClass) -> Result<()> {
    if class == SymmetryClass::A {
        return param("closed form available only for AI† and AII†");
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Edge density

/// Width at which the edge formula of each class is written.
pub fn edge_formula_width(class: SymmetryClass) -> f64 {
    match class {
        SymmetryClass::AIDagger => 2.0,
        _ => 1.0,
    }
}

/// Distance from the spectral edge in the units of the edge formula.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeCoordinate {
    pub u: f64,
    pub n_half: usize,
    /// Width the formula assumes (2 for AI†, 1 for AII†).
    pub g_convention: f64,
}

impl EdgeCoordinate {
    /// `|z|` at width `g` mapped onto the formula's units: `|z|` scales as `√g`,
    /// so `u = √N − |z|·√(g_convention/g)`.
    pub fn from_radius(class: SymmetryClass, radius: f64, n_half: usize, g: f64) -> Result<Self> {
        need_replica_class(class)?;
        let g_convention = edge_formula_width(class);
        Ok(Self { u: (n_half as f64).sqrt() - radius * (g_convention / g).sqrt(), n_half, g_convention })
    }

    /// Inverse of [`EdgeCoordinate::from_radius`].
    pub fn radius(&self, g: f64) -> f64 {
        ((self.n_half as f64).sqrt() - self.u) * (g / self.g_convention).sqrt()
    }

    /// Factor taking `πR₁` in formula units to `πR₁` at width `g`
    /// (densities scale as `1/g`).
    pub fn density_factor(&self, g: f64) -> f64 {
        self.g_convention / g
    }
}

/// `πR₁` near the spectral edge, in the formula's native width
/// (g = 2 for AI†, g = 1 for AII†). Valid for `u ≫ 1/√2`.
pub fn dos_edge(class: SymmetryClass, u: f64, n_half: usize) -> Result<f64> {
    need_replica_class(class)?;
    if !(u > 0.0 && u.is_finite()) {
        return param(format!("edge distance u must be positive, got {u}"));
    }
    if n_half == 0 {
        return param("N must be at least 1");
    }
    let nf = n_half as f64;
    let e2 = (-2.0 * u * u).exp();
    Ok(match class {
        SymmetryClass::AIDagger => {
            1.0 - 1.0 / (4.0 * u * u)
                - (2.0 / (PI * nf)).sqrt() * e2 / (16.0 * u.powi(4))
                - e2 / (16.0 * (2.0 * PI).sqrt() * u.powi(5))
        }
        _ => {
            2.0 + 1.0 / (4.0 * u * u)
                - (2.0 * PI).sqrt() * e2 * (u + 1.0 / (4.0 * u) + 1.0 / (8.0 * u.powi(3)))
                - (-4.0 * u * u).exp() / (8.0 * PI.sqrt() * u.powi(3))
        }
    })
}

/// [`dos_edge`] evaluated at a physical radius and width, returned as `πR₁`
/// at that width.
pub fn dos_edge_physical(class: SymmetryClass, radius: f64, n_half: usize, g: f64) -> Result<f64> {
    let c = EdgeCoordinate::from_radius(class, radius, n_half, g)?;
    Ok(dos_edge(class, c.u, n_half)? * c.density_factor(g))
}

// ---------------------------------------------------------------------------
// Bulk two-point function

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BulkValue {
    /// `π²R₂`.
    pub value: f64,
    /// Whether `|ω|² ≥ 4g`, the working threshold for `|ω|² ≫ g`.
    pub in_regime: bool,
}

/// Leading-order `π²R₂(|ω|)` in the bulk.
pub fn r2_bulk(class: SymmetryClass, omega_abs: f64, g: f64) -> Result<BulkValue> {
    need_replica_class(class)?;
    if !(g > 0.0) {
        return param(format!("width g must be positive, got {g}"));
    }
    let nu = omega_abs * omega_abs / g;
    let value = match class {
        SymmetryClass::AIDagger => 4.0 / (g * g) * (1.0 - (-2.0 * nu).exp() / (nu * nu)),
        _ => (4.0 - PI * nu * (-nu).exp()) / (g * g),
    };
    Ok(BulkValue { value, in_regime: nu >= 4.0 })
}

// ---------------------------------------------------------------------------
// Small-n replica coefficients

/// Sign convention for the term whose sign is ambiguous after continuing the
/// sigma-model result to imaginary argument.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AmbiguousSign {
    /// The choice made on physical grounds (default).
    #[default]
    Physical,
    Alternative,
}

/// `a·ν² + b·ln ν + Σ cₖ e^{−aₖν} ν^{−pₖ}`: the shape of every `n²`
/// coefficient below.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionTerms {
    pub quadratic: f64,
    pub log: f64,
    /// `(coefficient, decay rate, inverse power)`.
    pub exponential: Vec<(f64, f64, i32)>,
}

impl ExpansionTerms {
    pub fn eval(&self, nu: f64) -> f64 {
        let mut v = self.quadratic * nu * nu + self.log * nu.ln();
        for &(c, a, p) in &self.exponential {
            v += c * (-a * nu).exp() * nu.powi(-p);
        }
        v
    }

    /// j-th derivative in ν, j ≤ 4.
    pub fn derivative(&self, nu: f64, j: u32) -> f64 {
        let poly = match j {
            0 => self.quadratic * nu * nu,
            1 => 2.0 * self.quadratic * nu,
            2 => 2.0 * self.quadratic,
            _ => 0.0,
        };
        let log = if j == 0 {
            self.log * nu.ln()
        } else {
            // d^j ln ν = (−1)^{j−1}(j−1)!/ν^j
            let fact: f64 = (1..j).map(|k| k as f64).product();
            self.log * if j % 2 == 1 { 1.0 } else { -1.0 } * fact / nu.powi(j as i32)
        };
        let mut exp_part = 0.0;
        for &(c, a, p) in &self.exponential {
            // Leibniz: Σ C(j,i) (−a)^{j−i} e^{−aν} · d^i ν^{−p}
            let mut s = 0.0;
            let mut binom = 1.0;
            for i in 0..=j {
                let mut falling = 1.0;
                for r in 0..i {
                    falling *= -(p as f64) - r as f64;
                }
                s += binom * (-a).powi((j - i) as i32) * falling * nu.powi(-p - i as i32);
                binom = binom * (j - i) as f64 / (i + 1) as f64;
            }
            exp_part += c * (-a * nu).exp() * s;
        }
        poly + log + exp_part
    }

    /// `(∂_ω∂_ω̄)² F(|ω|²)` with `∂_ω∂_ω̄ F = (νF′)′`:
    /// `2F″ + 4νF‴ + ν²F⁗`.
    pub fn bilaplacian(&self, nu: f64) -> f64 {
        2.0 * self.derivative(nu, 2) + 4.0 * nu * self.derivative(nu, 3) + nu * nu * self.derivative(nu, 4)
    }
}

/// The `n²` coefficient of the small-n expansion as a term list (g = 1 units).
pub fn yn_expansion_terms(class: SymmetryClass, sign: AmbiguousSign) -> Result<ExpansionTerms> {
    need_replica_class(class)?;
    let flip = match sign {
        AmbiguousSign::Physical => 1.0,
        AmbiguousSign::Alternative => -1.0,
    };
    Ok(match class {
        SymmetryClass::AIDagger => ExpansionTerms {
            quadratic: 0.5,
            log: -2.0,
            exponential: vec![(-0.25 * flip, 2.0, 4)],
        },
        // 4·(ν²/8 − ½ ln(ν/2) − (π/4)e^{−ν}/ν + e^{−2ν}/(16ν⁴)); the constant
        // −½ ln(1/2) is kept in the value, it drops out of every derivative
        _ => ExpansionTerms {
            quadratic: 0.5,
            log: -2.0,
            exponential: vec![(-PI * flip, 1.0, 1), (0.25, 2.0, 4)],
        },
    })
}

/// Coefficients `(c₁, c₂)` of `Y = 1 + c₁n + c₂n² + …` at `ν = |ω|²/g`.
pub fn yn_smalln(class: SymmetryClass, nu: f64, sign: AmbiguousSign) -> Result<(f64, f64)> {
    if !(nu > 0.0 && nu.is_finite()) {
        return param(format!("ν must be positive, got {nu}"));
    }
    let terms = yn_expansion_terms(class, sign)?;
    let constant = match class {
        SymmetryClass::AIIDagger => 2.0 * 2f64.ln(),
        _ => 0.0,
    };
    Ok((nu, terms.eval(nu) + constant))
}

/// `π²R₂ = 2 + (∂_ω∂_ω̄)² c₂` from the small-n coefficient, including the
/// subleading terms the leading-order [`r2_bulk`] drops.
pub fn r2_from_expansion(class: SymmetryClass, omega_abs: f64, g: f64, sign: AmbiguousSign) -> Result<f64> {
    if !(g > 0.0) {
        return param(format!("width g must be positive, got {g}"));
    }
    let nu = omega_abs * omega_abs / g;
    if !(nu > 0.0) {
        return param("|ω| must be positive");
    }
    let terms = yn_expansion_terms(class, sign)?;
    Ok((2.0 + terms.bilaplacian(nu)) / (g * g))
}

// ---------------------------------------------------------------------------
// Small-matrix surmises

fn check_c(c: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return param(format!("surmise constant C must be positive, got {c}"));
    }
    Ok(())
}

/// Radial factor `(2/π)·f(|z₁|)` of `R₂ = δ(z₁+z₂)·(2/π) f(|z₁|)` for the
/// 2×2 (A, AI†) and 4×4 (AII†) ensembles.
pub fn r2_small(class: SymmetryClass, z1_abs: f64, c: f64) -> Result<f64> {
    check_c(c)?;
    if !(z1_abs >= 0.0) {
        return param("|z₁| must be non-negative");
    }
    if z1_abs == 0.0 {
        return Ok(0.0);
    }
    let x = 4.0 * c * c * z1_abs * z1_abs;
    let pre = 16.0 * c.powi(4) * z1_abs * z1_abs;
    let f = match class {
        SymmetryClass::AIDagger => pre * bessel_k0(x),
        SymmetryClass::A => pre * (-x).exp(),
        SymmetryClass::AIIDagger => pre / 3.0 * (1.0 + x) * (-x).exp(),
    };
    Ok(2.0 / PI * f)
}

/// Spacing density `p_s(s)`, normalized to one for every `C`.
///
/// AII†: `(2C⁴/3) s³ (1 + C²s²) e^{−C²s²}`, the density that inverts the
/// small-matrix `R₂` above via `p_s(2|z₁|) = (π|z₁|/2)·r2_small`.
pub fn surmise_spacing(class: SymmetryClass, s: f64, c: f64) -> Result<f64> {
    check_c(c)?;
    if !(s >= 0.0) {
        return param("spacing must be non-negative");
    }
    if s == 0.0 {
        return Ok(0.0);
    }
    let u = c * c * s * s;
    let pre = 2.0 * c.powi(4) * s.powi(3);
    Ok(match class {
        SymmetryClass::AIDagger => pre * bessel_k0(u),
        SymmetryClass::A => pre * (-u).exp(),
        SymmetryClass::AIIDagger => pre / 3.0 * (1.0 + u) * (-u).exp(),
    })
}

/// Cumulative distribution of [`surmise_spacing`], with `U = C²S²`.
pub fn surmise_cdf(class: SymmetryClass, s: f64, c: f64) -> Result<f64> {
    check_c(c)?;
    if s <= 0.0 {
        return Ok(0.0);
    }
    let u = c * c * s * s;
    Ok(match class {
        SymmetryClass::AIDagger => 1.0 - u * bessel_k1(u),
        SymmetryClass::A => 1.0 - (1.0 + u) * (-u).exp(),
        SymmetryClass::AIIDagger => 1.0 - (1.0 + u + u * u / 3.0) * (-u).exp(),
    })
}

/// Mean spacing `⟨s⟩` of [`surmise_spacing`].
pub fn surmise_mean(class: SymmetryClass, c: f64) -> Result<f64> {
    check_c(c)?;
    let sqrt_pi = PI.sqrt();
    Ok(match class {
        SymmetryClass::AIDagger => 2f64.sqrt() * gamma(1.25).powi(2) / c,
        SymmetryClass::A => 0.75 * sqrt_pi / c,
        SymmetryClass::AIIDagger => 7.0 * sqrt_pi / (8.0 * c),
    })
}

/// CDF of the mean-rescaled spacing `x = s/⟨s⟩`; independent of `C`.
pub fn surmise_cdf_rescaled(class: SymmetryClass, x: f64) -> Result<f64> {
    surmise_cdf(class, x * surmise_mean(class, 1.0)?, 1.0)
}

/// Density of the mean-rescaled spacing `x = s/⟨s⟩`; independent of `C`.
pub fn surmise_spacing_rescaled(class: SymmetryClass, x: f64) -> Result<f64> {
    let m = surmise_mean(class, 1.0)?;
    Ok(m * surmise_spacing(class, x * m, 1.0)?)
}
