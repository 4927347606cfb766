//! Teleportation of the CV cat mode, treated in the characteristic-function
//! picture at unity gain.
//!
//! The attenuated two-mode squeezed channel acts on the teleported mode as
//! Gaussian displacement noise of variance σ (the same σ as for the DV
//! scheme at g = 1), so the output characteristic function is
//! χ_out(β) = χ_in(β) e^{−σ|β|²} and the fidelity with the pure input is
//!
//! ```text
//!   F = (1/π) ∫ d²β  χ_in(β) χ_in(−β) e^{−σ|β|²}        (per teleported mode)
//! ```
//!
//! with β = x + ip. Expanding the hybrid input over its four operator
//! terms and tracing the untouched DV mode analytically leaves, for every
//! variant, four single-mode Gaussian-type integrals. Those have closed
//! forms, implemented here; the quadrature module evaluates the same
//! integrals numerically as an independent route.
//!
//! Building blocks are the displacement matrix elements
//! X_{|L⟩⟨R|}(β) = ⟨R|D(β)|L⟩ for the label families used by the hybrid
//! variants (photon-number qubit, ±α₀ coherent, squeezed qubit), and the
//! Gaussian characteristic functions of the resource states.

pub mod quadrature;

use crate::channel::ChannelPair;
use crate::dv_teleport::TeleportParams;
use crate::fock::{cat_norm, CatParity, FockError, C64};
use crate::hybrid::{s_of_alpha, HybridVariant};
use std::f64::consts::PI;

pub use quadrature::{
    fidelity_cv_numeric, fidelity_cv_numeric_4d, fidelity_cv_numeric_small_s, gauss_hermite,
};

/// Phase of the two-mode squeezed resource. The Bell measurement used here
/// corrects displacements for this phase, which maximizes fidelity.
pub const TMSV_PHASE: f64 = PI;

#[derive(Debug, thiserror::Error)]
pub enum CvError {
    #[error("x-function labels {left:?} and {right:?} belong to different families")]
    UnsupportedPair { left: XLabel, right: XLabel },
    #[error(
        "quadrature failed to converge: |dF| = {delta:.3e} between orders {lo} and {hi}"
    )]
    QuadratureConvergence { lo: usize, hi: usize, delta: f64 },
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Fock(#[from] FockError),
}

pub type CvResult<T> = Result<T, CvError>;

/// Single-mode state labels for displacement matrix elements. Labels pair
/// only within their family: photon-number qubit ({0, 1, +, −}), coherent
/// (±α₀), or squeezed qubit (S(s)|0⟩, S(s)|1⟩).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XLabel {
    Fock0,
    Fock1,
    Plus,
    Minus,
    CoherentPlus,
    CoherentMinus,
    Squeezed0,
    Squeezed1,
}

#[derive(PartialEq, Eq)]
enum LabelFamily {
    Qubit,
    Coherent,
    Squeezed,
}

fn family(label: XLabel) -> LabelFamily {
    match label {
        XLabel::Fock0 | XLabel::Fock1 | XLabel::Plus | XLabel::Minus => LabelFamily::Qubit,
        XLabel::CoherentPlus | XLabel::CoherentMinus => LabelFamily::Coherent,
        XLabel::Squeezed0 | XLabel::Squeezed1 => LabelFamily::Squeezed,
    }
}

/// Argument transformation under squeezing: ⟨n|S†(s)D(β)S(s)|m⟩ =
/// ⟨n|D(β̃)|m⟩ with β̃ = β cosh s − β̄ sinh s.
pub fn squeezed_argument(beta: C64, s: f64) -> C64 {
    beta * s.cosh() - beta.conj() * s.sinh()
}

/// ⟨n|D(β)|m⟩ on the photon-number qubit, m, n ∈ {0, 1}.
fn fock_element(m: usize, n: usize, beta: C64) -> C64 {
    let gauss = (-0.5 * beta.norm_sqr()).exp();
    match (m, n) {
        (0, 0) => C64::new(gauss, 0.0),
        (0, 1) => beta * gauss,
        (1, 0) => -beta.conj() * gauss,
        (1, 1) => C64::new((1.0 - beta.norm_sqr()) * gauss, 0.0),
        _ => unreachable!("photon-number qubit labels are 0 or 1"),
    }
}

/// ⟨μ|D(β)|ν⟩ for real coherent amplitudes μ, ν.
fn coherent_element(mu: f64, nu: f64, beta: C64) -> C64 {
    let nu_c = C64::new(nu, 0.0);
    let shifted = nu_c + beta;
    let exponent = 0.5 * nu * (beta - beta.conj())
        - C64::new(0.5 * (mu * mu + shifted.norm_sqr()), 0.0)
        + mu * shifted;
    exponent.exp()
}

fn qubit_coefficients(label: XLabel) -> (f64, f64) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match label {
        XLabel::Fock0 => (1.0, 0.0),
        XLabel::Fock1 => (0.0, 1.0),
        XLabel::Plus => (h, h),
        XLabel::Minus => (h, -h),
        _ => unreachable!("qubit coefficients requested for a non-qubit label"),
    }
}

/// X_{|left⟩⟨right|}(β) = ⟨right|D(β)|left⟩. Coherent labels use the cat
/// amplitude `alpha0`; squeezed labels use the squeezing `s`; both are
/// ignored otherwise.
pub fn x_element(
    left: XLabel,
    right: XLabel,
    beta: C64,
    alpha0: f64,
    s: f64,
) -> CvResult<C64> {
    match (family(left), family(right)) {
        (LabelFamily::Qubit, LabelFamily::Qubit) => {
            let (l0, l1) = qubit_coefficients(left);
            let (r0, r1) = qubit_coefficients(right);
            let mut total = C64::new(0.0, 0.0);
            for (m, lc) in [(0usize, l0), (1, l1)] {
                for (n, rc) in [(0usize, r0), (1, r1)] {
                    if lc != 0.0 && rc != 0.0 {
                        total += fock_element(m, n, beta) * (lc * rc);
                    }
                }
            }
            Ok(total)
        }
        (LabelFamily::Coherent, LabelFamily::Coherent) => {
            if !(alpha0 > 0.0 && alpha0.is_finite()) {
                return Err(CvError::Domain(format!(
                    "coherent labels need a finite positive amplitude, got {alpha0}"
                )));
            }
            let sign = |l: XLabel| if l == XLabel::CoherentPlus { 1.0 } else { -1.0 };
            Ok(coherent_element(sign(right) * alpha0, sign(left) * alpha0, beta))
        }
        (LabelFamily::Squeezed, LabelFamily::Squeezed) => {
            if !s.is_finite() {
                return Err(CvError::Domain(format!(
                    "squeezed labels need a finite squeezing parameter, got {s}"
                )));
            }
            let idx = |l: XLabel| usize::from(l == XLabel::Squeezed1);
            Ok(fock_element(idx(left), idx(right), squeezed_argument(beta, s)))
        }
        _ => Err(CvError::UnsupportedPair { left, right }),
    }
}

/// χ(β) = e^{−|β|²/2} of the vacuum.
pub fn chi_vacuum(beta: C64) -> C64 {
    C64::new((-0.5 * beta.norm_sqr()).exp(), 0.0)
}

/// χ(β) of single-mode squeezed vacuum S(s)|0⟩:
/// exp{−(x² e^{−2s} + p² e^{2s})/2} with β = x + ip.
pub fn chi_smsv(s: f64, beta: C64) -> C64 {
    chi_vacuum(squeezed_argument(beta, s))
}

/// χ(β_A, β_B) of the two-mode squeezed vacuum at the fixed resource phase:
/// exp{−(e^{2r}/4)[(x_A−x_B)² + (p_A+p_B)²] − (e^{−2r}/4)[(x_A+x_B)² + (p_A−p_B)²]}.
pub fn chi_tmsv(r: f64, beta_a: C64, beta_b: C64) -> C64 {
    let (xa, pa) = (beta_a.re, beta_a.im);
    let (xb, pb) = (beta_b.re, beta_b.im);
    let anti = (xa - xb).powi(2) + (pa + pb).powi(2);
    let co = (xa + xb).powi(2) + (pa - pb).powi(2);
    C64::new(
        (-0.25 * ((2.0 * r).exp() * anti + (-2.0 * r).exp() * co)).exp(),
        0.0,
    )
}

/// χ of the two-mode squeezed vacuum after each arm passes its lossy link:
/// χ(√T_A β_A, √T_B β_B) e^{−[(1−T_A)|β_A|² + (1−T_B)|β_B|²]/2}.
pub fn chi_tmsv_attenuated(r: f64, ch: ChannelPair, beta_a: C64, beta_b: C64) -> C64 {
    let core = chi_tmsv(r, beta_a * ch.t_a().sqrt(), beta_b * ch.t_b().sqrt());
    let damping =
        -0.5 * ((1.0 - ch.t_a()) * beta_a.norm_sqr() + (1.0 - ch.t_b()) * beta_b.norm_sqr());
    core * damping.exp()
}

/// The four cat-state displacement elements at amplitude α₀, as
/// (X_{|cat₋⟩⟨cat₋|}, X_{|cat₊⟩⟨cat₊|}, X_{|cat₋⟩⟨cat₊|}, X_{|cat₊⟩⟨cat₋|}).
fn cat_x_values(alpha0: f64, beta: C64) -> (C64, C64, C64, C64) {
    let np2 = cat_norm(alpha0, CatParity::Even).powi(2);
    let nm2 = cat_norm(alpha0, CatParity::Odd).powi(2);
    // X_{|μ⟩⟨ν|}(β) = ⟨ν|D(β)|μ⟩ on the coherent pair {±α₀}
    let xpp = coherent_element(alpha0, alpha0, beta);
    let xmm = coherent_element(-alpha0, -alpha0, beta);
    let xpm = coherent_element(-alpha0, alpha0, beta); // |+α₀⟩⟨−α₀|
    let xmp = coherent_element(alpha0, -alpha0, beta); // |−α₀⟩⟨+α₀|
    let cat_mm = (xpp + xmm - xpm - xmp) / nm2;
    let cat_pp = (xpp + xmm + xpm + xmp) / np2;
    let cross_norm = (np2 * nm2).sqrt();
    let cat_mp = (xpp - xmm + xpm - xmp) / cross_norm; // |cat₋⟩⟨cat₊|
    let cat_pm = (xpp - xmm - xpm + xmp) / cross_norm; // |cat₊⟩⟨cat₋|
    (cat_mm, cat_pp, cat_mp, cat_pm)
}

/// Two-mode characteristic function of the hybrid input state,
/// χ(β_D, β_C) = Tr[ρ_h D(β_D) ⊗ D(β_C)], for the exact, large, and small
/// variants. The coherent variant is not part of the CV-teleportation
/// analysis and is rejected.
pub fn chi_hybrid(
    variant: HybridVariant,
    alpha0: f64,
    beta_d: C64,
    beta_c: C64,
) -> CvResult<C64> {
    if !(alpha0 > 0.0 && alpha0.is_finite()) {
        return Err(CvError::Domain(format!(
            "cat amplitude must be a finite positive real, got {alpha0}"
        )));
    }
    match variant {
        HybridVariant::Exact => {
            let (cat_mm, cat_pp, cat_mp, cat_pm) = cat_x_values(alpha0, beta_c);
            Ok(0.5
                * (cat_mm * fock_element(0, 0, beta_d)
                    + cat_pp * fock_element(1, 1, beta_d)
                    + cat_mp * fock_element(0, 1, beta_d)
                    + cat_pm * fock_element(1, 0, beta_d)))
        }
        HybridVariant::Large => {
            let xpp = coherent_element(alpha0, alpha0, beta_c);
            let xmm = coherent_element(-alpha0, -alpha0, beta_c);
            let xpm = coherent_element(-alpha0, alpha0, beta_c);
            let xmp = coherent_element(alpha0, -alpha0, beta_c);
            let d = |l, r| x_element(l, r, beta_d, alpha0, 0.0).expect("qubit pair");
            Ok(0.5
                * (xpp * d(XLabel::Plus, XLabel::Plus) + xmm * d(XLabel::Minus, XLabel::Minus)
                    - xpm * d(XLabel::Plus, XLabel::Minus)
                    - xmp * d(XLabel::Minus, XLabel::Plus)))
        }
        HybridVariant::Small => {
            let s = s_of_alpha(alpha0)?;
            let bt = squeezed_argument(beta_c, s);
            Ok(0.5
                * (fock_element(1, 1, bt) * fock_element(0, 0, beta_d)
                    + fock_element(0, 0, bt) * fock_element(1, 1, beta_d)
                    + fock_element(1, 0, bt) * fock_element(0, 1, beta_d)
                    + fock_element(0, 1, bt) * fock_element(1, 0, beta_d)))
        }
        HybridVariant::Coherent => Err(CvError::Domain(
            "the coherent hybrid variant has no CV-teleportation characteristic function here"
                .into(),
        )),
    }
}

/// Characteristic-function evaluators for the density operators used in the
/// analysis, with arity-checked evaluation; χ(0) = 1 for each of them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChiEvaluator {
    Vacuum,
    SqueezedVacuum { s: f64 },
    Tmsv { r: f64 },
    TmsvAttenuated { r: f64, ch: ChannelPair },
    Hybrid { variant: HybridVariant, alpha0: f64 },
}

impl ChiEvaluator {
    pub fn n_modes(&self) -> usize {
        match self {
            ChiEvaluator::Vacuum | ChiEvaluator::SqueezedVacuum { .. } => 1,
            _ => 2,
        }
    }

    pub fn eval(&self, points: &[C64]) -> CvResult<C64> {
        if points.len() != self.n_modes() {
            return Err(CvError::Domain(format!(
                "evaluator over {} modes got {} phase-space points",
                self.n_modes(),
                points.len()
            )));
        }
        match *self {
            ChiEvaluator::Vacuum => Ok(chi_vacuum(points[0])),
            ChiEvaluator::SqueezedVacuum { s } => Ok(chi_smsv(s, points[0])),
            ChiEvaluator::Tmsv { r } => Ok(chi_tmsv(r, points[0], points[1])),
            ChiEvaluator::TmsvAttenuated { r, ch } => {
                Ok(chi_tmsv_attenuated(r, ch, points[0], points[1]))
            }
            ChiEvaluator::Hybrid { variant, alpha0 } => {
                chi_hybrid(variant, alpha0, points[0], points[1])
            }
        }
    }
}

/// Reading of the α₀-dependent Gaussian exponents in the exact-cat
/// fidelity. `Quadratic` scales them with α₀², consistent with coherent
/// overlaps like ⟨α₀|−α₀⟩ = e^{−2α₀²}, and agrees with the numerical
/// quadrature; `Linear` scales them with α₀ and is kept selectable so the
/// consistency tests can discriminate between the two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExponentReading {
    #[default]
    Quadratic,
    Linear,
}

fn check_sigma(sigma: f64) -> CvResult<f64> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(CvError::Domain(format!(
            "noise variance must be a finite nonnegative real, got {sigma}"
        )));
    }
    Ok(sigma)
}

fn check_alpha0(alpha0: f64) -> CvResult<f64> {
    if !(alpha0 > 0.0 && alpha0.is_finite()) {
        return Err(CvError::Domain(format!(
            "cat amplitude must be a finite positive real, got {alpha0}"
        )));
    }
    Ok(alpha0)
}

/// Large-amplitude closed form:
/// F = [1 + e^{−4α₀²σ/(1+σ)}] / [2(1+σ)].
pub fn fidelity_cv_large_sigma(alpha0: f64, sigma: f64) -> CvResult<f64> {
    let alpha0 = check_alpha0(alpha0)?;
    let sigma = check_sigma(sigma)?;
    Ok((1.0 + (-4.0 * alpha0 * alpha0 * sigma / (1.0 + sigma)).exp()) / (2.0 * (1.0 + sigma)))
}

/// Small-amplitude closed form at squeezing s, with τ = 1 + σ² + 2σ cosh 2s:
///
/// ```text
///   F = (f₀₀ + f₁₁ + 2 f₁₀)/4
///   f₀₀ = τ^{−1/2}
///   f₁₁ = [2 + σ² + 2σ⁴ + 4σ(1+σ²) cosh 2s + 3σ² cosh 4s] / (2 τ^{5/2})
///   f₁₀ = (1 + σ cosh 2s) / τ^{3/2}
/// ```
pub fn fidelity_cv_small_sigma_s(s: f64, sigma: f64) -> CvResult<f64> {
    if !s.is_finite() {
        return Err(CvError::Domain(format!(
            "squeezing parameter must be finite, got {s}"
        )));
    }
    let sigma = check_sigma(sigma)?;
    let tau = 1.0 + sigma * sigma + 2.0 * sigma * (2.0 * s).cosh();
    let f00 = 1.0 / tau.sqrt();
    let f11 = (2.0
        + sigma * sigma
        + 2.0 * sigma.powi(4)
        + 4.0 * sigma * (1.0 + sigma * sigma) * (2.0 * s).cosh()
        + 3.0 * sigma * sigma * (4.0 * s).cosh())
        / (2.0 * tau.powf(2.5));
    let f10 = (1.0 + sigma * (2.0 * s).cosh()) / tau.powf(1.5);
    Ok((f00 + f11 + 2.0 * f10) / 4.0)
}

/// Small-amplitude closed form with s fixed by the cat amplitude.
pub fn fidelity_cv_small_sigma(alpha0: f64, sigma: f64) -> CvResult<f64> {
    fidelity_cv_small_sigma_s(s_of_alpha(check_alpha0(alpha0)?)?, sigma)
}

/// Exact-cat closed form. With E = e^{−2α₀²}, N±² = 2(1 ± E), and the five
/// Gaussian integrals
///
/// ```text
///   f₀ = 1/(1+σ)                  f₁ = e^{−4α₀²σ/(1+σ)}/(1+σ)
///   f₂ = e^{−4α₀²/(1+σ)}/(1+σ)    f₃ = e^{−4α₀²}/(1+σ)
///   f₄ = e^{−2α₀²}/(1+σ)
/// ```
///
/// the fidelity assembles as
///
/// ```text
///   F = 1/4 [ (2/N₊⁴)(f₀+f₁+f₂+f₃+4f₄) + (2/N₋⁴)(f₀+f₁+f₂+f₃−4f₄)
///           + (4/(N₊²N₋²))(f₀+f₁−f₂−f₃) ].
/// ```
///
/// The `Linear` reading replaces α₀² by α₀ inside f₁…f₄.
pub fn fidelity_cv_exact_sigma(
    alpha0: f64,
    sigma: f64,
    reading: ExponentReading,
) -> CvResult<f64> {
    let alpha0 = check_alpha0(alpha0)?;
    let sigma = check_sigma(sigma)?;
    let scale = match reading {
        ExponentReading::Quadratic => alpha0 * alpha0,
        ExponentReading::Linear => alpha0,
    };
    let e = (-2.0 * alpha0 * alpha0).exp();
    let np2 = 2.0 * (1.0 + e);
    let nm2 = 2.0 * (1.0 - e);
    let denom = 1.0 + sigma;
    let f0 = 1.0 / denom;
    let f1 = (-4.0 * scale * sigma / denom).exp() / denom;
    let f2 = (-4.0 * scale / denom).exp() / denom;
    let f3 = (-4.0 * scale).exp() / denom;
    let f4 = (-2.0 * scale).exp() / denom;
    let even = 2.0 / (np2 * np2) * (f0 + f1 + f2 + f3 + 4.0 * f4);
    let odd = 2.0 / (nm2 * nm2) * (f0 + f1 + f2 + f3 - 4.0 * f4);
    let cross = 4.0 / (np2 * nm2) * (f0 + f1 - f2 - f3);
    Ok(0.25 * (even + odd + cross))
}

fn unity_gain_sigma(params: &TeleportParams) -> CvResult<f64> {
    if params.g() != 1.0 {
        return Err(CvError::Domain(format!(
            "CV-mode teleportation is analyzed at unity gain only, got g = {}",
            params.g()
        )));
    }
    Ok(params.sigma())
}

/// Closed-form CV-teleportation fidelity from channel parameters at unity
/// gain, for the large- and small-amplitude variants.
pub fn fidelity_cv_closed(
    variant: HybridVariant,
    alpha0: f64,
    params: &TeleportParams,
) -> CvResult<f64> {
    let sigma = unity_gain_sigma(params)?;
    match variant {
        HybridVariant::Large => fidelity_cv_large_sigma(alpha0, sigma),
        HybridVariant::Small => fidelity_cv_small_sigma(alpha0, sigma),
        _ => Err(CvError::Domain(format!(
            "no limiting closed form for variant {variant:?}; use the exact form or quadrature"
        ))),
    }
}

/// Exact-cat CV-teleportation fidelity from channel parameters at unity gain.
pub fn fidelity_cv_exact(
    alpha0: f64,
    params: &TeleportParams,
    reading: ExponentReading,
) -> CvResult<f64> {
    fidelity_cv_exact_sigma(alpha0, unity_gain_sigma(params)?, reading)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dv_teleport::{dv_fidelity_transfer_form, sigma_of};
    use crate::fock::{displacement_matrix, squeezed_fock_ket, TruncationPolicy};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn single_photon_displacement_example() {
        let x = x_element(XLabel::Fock1, XLabel::Fock0, c(1.0, 0.0), 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(x.re, -(-0.5f64).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(x.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn qubit_elements_match_the_displacement_matrix() {
        let beta = c(0.35, -0.6);
        let d = displacement_matrix(beta, 24);
        for (m, n, l, r) in [
            (0, 0, XLabel::Fock0, XLabel::Fock0),
            (0, 1, XLabel::Fock0, XLabel::Fock1),
            (1, 0, XLabel::Fock1, XLabel::Fock0),
            (1, 1, XLabel::Fock1, XLabel::Fock1),
        ] {
            let x = x_element(l, r, beta, 0.0, 0.0).unwrap();
            let expect = d[(n, m)];
            assert_abs_diff_eq!(x.re, expect.re, epsilon = 1e-12);
            assert_abs_diff_eq!(x.im, expect.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn plus_minus_elements_are_qubit_combinations() {
        let beta = c(-0.2, 0.45);
        let xpm = x_element(XLabel::Plus, XLabel::Minus, beta, 0.0, 0.0).unwrap();
        let parts = [
            (XLabel::Fock0, XLabel::Fock0, 1.0),
            (XLabel::Fock1, XLabel::Fock1, -1.0),
            (XLabel::Fock0, XLabel::Fock1, -1.0),
            (XLabel::Fock1, XLabel::Fock0, 1.0),
        ];
        let mut expect = c(0.0, 0.0);
        for (l, r, w) in parts {
            expect += x_element(l, r, beta, 0.0, 0.0).unwrap() * (0.5 * w);
        }
        assert_abs_diff_eq!((xpm - expect).norm(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn coherent_cross_element_peaks_at_the_displaced_origin() {
        let alpha0 = 0.9;
        let x = x_element(
            XLabel::CoherentPlus,
            XLabel::CoherentMinus,
            c(-2.0 * alpha0, 0.0),
            alpha0,
            0.0,
        )
        .unwrap();
        assert_abs_diff_eq!(x.re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(x.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn coherent_elements_match_a_fock_space_evaluation() {
        let alpha0 = 0.8;
        let beta = c(0.3, 0.25);
        let policy = TruncationPolicy::new(42).unwrap();
        let d = displacement_matrix(beta, 42);
        let ket = |s: f64| {
            crate::fock::coherent_ket(c(s * alpha0, 0.0), policy)
                .unwrap()
                .amplitudes()
                .clone()
        };
        for (l, r, sl, sr) in [
            (XLabel::CoherentPlus, XLabel::CoherentPlus, 1.0, 1.0),
            (XLabel::CoherentPlus, XLabel::CoherentMinus, 1.0, -1.0),
            (XLabel::CoherentMinus, XLabel::CoherentPlus, -1.0, 1.0),
        ] {
            let numeric = (ket(sr).adjoint() * &d * ket(sl))[(0, 0)];
            let x = x_element(l, r, beta, alpha0, 0.0).unwrap();
            assert_abs_diff_eq!((x - numeric).norm(), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn squeezed_elements_match_a_fock_space_evaluation() {
        let s = 0.3;
        let beta = c(0.4, -0.2);
        let policy = TruncationPolicy::new(48).unwrap();
        let d = displacement_matrix(beta, 48);
        let sq0 = squeezed_fock_ket(s, 0, policy).unwrap();
        let sq1 = squeezed_fock_ket(s, 1, policy).unwrap();
        for (l, r, kl, kr) in [
            (XLabel::Squeezed0, XLabel::Squeezed0, &sq0, &sq0),
            (XLabel::Squeezed1, XLabel::Squeezed1, &sq1, &sq1),
            (XLabel::Squeezed1, XLabel::Squeezed0, &sq1, &sq0),
        ] {
            let numeric = (kr.amplitudes().adjoint() * &d * kl.amplitudes())[(0, 0)];
            let x = x_element(l, r, beta, 0.0, s).unwrap();
            assert_abs_diff_eq!((x - numeric).norm(), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn mixed_families_are_rejected() {
        let err = x_element(XLabel::Fock0, XLabel::CoherentPlus, c(0.1, 0.0), 1.0, 0.0)
            .unwrap_err();
        assert!(matches!(err, CvError::UnsupportedPair { .. }));
    }

    #[test]
    fn tmsv_at_zero_squeezing_is_two_vacuums() {
        let (ba, bb) = (c(0.3, -0.7), c(-0.1, 0.2));
        let chi = chi_tmsv(0.0, ba, bb);
        let expect = chi_vacuum(ba) * chi_vacuum(bb);
        assert_abs_diff_eq!((chi - expect).norm(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn attenuated_tmsv_collapses_to_the_noise_kernel() {
        for (r, ta, tb) in [(0.5, 0.7, 0.7), (1.5, 0.9, 0.4), (2.5, 0.5, 0.5)] {
            let ch = ChannelPair::new(ta, tb).unwrap();
            let sigma = sigma_of(1.0, r, ch);
            for beta in [c(0.4, 0.1), c(-0.9, 0.6), c(0.0, 1.1)] {
                let chi = chi_tmsv_attenuated(r, ch, -beta.conj(), -beta);
                let expect = (-sigma * beta.norm_sqr()).exp();
                assert_abs_diff_eq!(chi.re, expect, epsilon = 1e-12);
                assert_abs_diff_eq!(chi.im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn all_evaluators_are_normalized_at_the_origin() {
        let ch = ChannelPair::new(0.6, 0.8).unwrap();
        let evaluators = [
            ChiEvaluator::Vacuum,
            ChiEvaluator::SqueezedVacuum { s: 0.4 },
            ChiEvaluator::Tmsv { r: 1.2 },
            ChiEvaluator::TmsvAttenuated { r: 1.2, ch },
            ChiEvaluator::Hybrid { variant: HybridVariant::Exact, alpha0: 1.1 },
            ChiEvaluator::Hybrid { variant: HybridVariant::Large, alpha0: 1.7 },
            ChiEvaluator::Hybrid { variant: HybridVariant::Small, alpha0: 0.3 },
        ];
        for ev in evaluators {
            let zeros = vec![c(0.0, 0.0); ev.n_modes()];
            let chi = ev.eval(&zeros).unwrap();
            assert_abs_diff_eq!(chi.re, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(chi.im, 0.0, epsilon = 1e-12);
        }
        let err = ChiEvaluator::Vacuum.eval(&[c(0.0, 0.0), c(0.0, 0.0)]).unwrap_err();
        assert!(matches!(err, CvError::Domain(_)));
    }

    #[test]
    fn closed_forms_are_exact_at_zero_noise() {
        for a in [0.6, 1.0, 1.8] {
            assert_abs_diff_eq!(fidelity_cv_large_sigma(a, 0.0).unwrap(), 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(
                fidelity_cv_exact_sigma(a, 0.0, ExponentReading::Quadratic).unwrap(),
                1.0,
                epsilon = 1e-14
            );
        }
        for a in [0.2, 0.4] {
            assert_abs_diff_eq!(fidelity_cv_small_sigma(a, 0.0).unwrap(), 1.0, epsilon = 1e-14);
        }
        // the linear reading breaks the self-fidelity identity away from α₀ = 1
        let linear = fidelity_cv_exact_sigma(0.6, 0.0, ExponentReading::Linear).unwrap();
        assert!((linear - 1.0).abs() > 1e-2);
    }

    #[test]
    fn large_closed_form_spot_value() {
        let f = fidelity_cv_large_sigma(1.0, 1.0).unwrap();
        assert_abs_diff_eq!(f, (1.0 + (-2.0f64).exp()) / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f, 0.283834, epsilon = 1e-6);
    }

    #[test]
    fn zero_squeezing_small_form_equals_the_dv_fidelity() {
        for sigma in [0.2f64, 0.5, 1.0] {
            let r = -0.5 * sigma.ln(); // lossless channel with e^{−2r} = σ
            let params = TeleportParams::new(1.0, r, ChannelPair::lossless()).unwrap();
            assert_abs_diff_eq!(params.sigma(), sigma, epsilon = 1e-14);
            let f_cv = fidelity_cv_small_sigma_s(0.0, sigma).unwrap();
            let f_dv = dv_fidelity_transfer_form(&params);
            assert_abs_diff_eq!(f_cv, f_dv, epsilon = 1e-12);
        }
    }

    #[test]
    fn exact_form_approaches_the_large_form_for_big_cats() {
        for sigma in [0.1, 0.5, 1.0] {
            let exact = fidelity_cv_exact_sigma(2.0, sigma, ExponentReading::Quadratic).unwrap();
            let large = fidelity_cv_large_sigma(2.0, sigma).unwrap();
            assert!((exact - large).abs() < 1e-3, "sigma {sigma}: {exact} vs {large}");
        }
    }

    #[test]
    fn exact_fidelity_decreases_with_amplitude_in_the_crossover_window() {
        let sigma = 0.3;
        let mut last = f64::INFINITY;
        for i in 0..=10 {
            let a = 0.5 + 0.05 * i as f64;
            let f = fidelity_cv_exact_sigma(a, sigma, ExponentReading::Quadratic).unwrap();
            assert!(f < last, "not strictly decreasing at alpha0 = {a}");
            last = f;
        }
    }

    #[test]
    fn fidelity_decreases_with_noise() {
        let mut last = f64::INFINITY;
        for sigma in [0.0, 0.2, 0.5, 1.0, 2.0] {
            let f = fidelity_cv_exact_sigma(1.0, sigma, ExponentReading::Quadratic).unwrap();
            assert!(f < last + 1e-15);
            last = f;
        }
    }

    #[test]
    fn closed_form_wrappers_enforce_unity_gain() {
        let params = TeleportParams::new(1.2, 1.0, ChannelPair::lossless()).unwrap();
        assert!(matches!(
            fidelity_cv_closed(HybridVariant::Large, 1.0, &params).unwrap_err(),
            CvError::Domain(_)
        ));
        assert!(matches!(
            fidelity_cv_exact(1.0, &params, ExponentReading::Quadratic).unwrap_err(),
            CvError::Domain(_)
        ));
        let unity = TeleportParams::new(1.0, 1.0, ChannelPair::lossless()).unwrap();
        let f = fidelity_cv_closed(HybridVariant::Large, 1.0, &unity).unwrap();
        let direct = fidelity_cv_large_sigma(1.0, unity.sigma()).unwrap();
        assert_abs_diff_eq!(f, direct, epsilon = 1e-15);
    }
}
