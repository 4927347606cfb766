//! Gauss-Hermite evaluation of the CV-teleportation fidelity integrals.
//!
//! After the DV mode is traced analytically, each hybrid variant leaves
//! four surviving products of displacement matrix elements, P(β), and
//!
//! ```text
//!   F = (1/4) (1/π) ∫ d²β  P(β) e^{−σ|β|²},       β = x + ip.
//! ```
//!
//! Every P carries the universal Gaussian factor e^{−|β|²}, so with the
//! substitution u = √(1+σ) x (and likewise for p) the integrand becomes
//! the Gauss-Hermite weight e^{−u²} times the bounded-growth residual
//! R(β) = P(β) e^{|β|²}:
//!
//! ```text
//!   F = (1/4) (1/(π(1+σ))) Σ_{ij} w_i w_j R(u_i/√(1+σ) + i u_j/√(1+σ)).
//! ```
//!
//! Nodes and weights come from the Golub-Welsch eigendecomposition of the
//! Jacobi matrix. The residuals of the cat variants contain e^{±4α₀ x}
//! factors, so low orders underresolve large amplitudes; the driver
//! escalates through fixed orders and accepts the result once two
//! consecutive orders agree. Summation order is fixed and compensated,
//! making every result bit-reproducible.
//!
//! [`fidelity_cv_numeric_4d`] skips the analytic DV trace and integrates
//! the full two-mode characteristic functions over both phase-space
//! planes; it is slower and less accurate, and exists to validate the
//! reduction itself.

use super::{
    cat_x_values, chi_hybrid, coherent_element, fock_element, squeezed_argument, CvError,
    CvResult,
};
use crate::fock::C64;
use crate::hybrid::{s_of_alpha, HybridVariant};
use nalgebra::DMatrix;
use std::f64::consts::PI;

/// Agreement required between consecutive quadrature orders.
pub const CONVERGENCE_TOL: f64 = 1e-7;

/// Escalation ladder of quadrature orders.
pub const ORDERS: [usize; 3] = [20, 40, 80];

/// Nodes and weights for ∫ f(u) e^{−u²} du ≈ Σ w_i f(u_i).
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Golub-Welsch nodes: the eigenvalues of the symmetric tridiagonal Jacobi
/// matrix with off-diagonal √(k/2). Weights come from the Christoffel
/// function at each node rather than from eigenvector components, which
/// keeps their relative accuracy at the far tails.
pub fn gauss_hermite(order: usize) -> CvResult<GaussHermite> {
    if order < 2 {
        return Err(CvError::Domain(format!(
            "quadrature order must be at least 2, got {order}"
        )));
    }
    let mut jacobi = DMatrix::<f64>::zeros(order, order);
    for k in 1..order {
        let b = (k as f64 / 2.0).sqrt();
        jacobi[(k - 1, k)] = b;
        jacobi[(k, k - 1)] = b;
    }
    let eig = jacobi.symmetric_eigen();
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(f64::total_cmp);
    // Weights via the Christoffel function, w = 1 / sum_k phi_k(x)^2 over the
    // orthonormal Hermite polynomials.  Eigenvector first components lose all
    // relative accuracy at edge nodes (absolute error ~eps against true values
    // ~1e-30), and integrands that grow like exp(|x|^2) against the Gaussian
    // weight turn that into visible error; the recurrence below does not.
    let weights = nodes.iter().map(|&x| christoffel_weight(x, order)).collect();
    Ok(GaussHermite { nodes, weights })
}

/// Gauss-Hermite weight at a node: the reciprocal Christoffel sum
/// 1 / sum_{k<n} phi_k(x)^2 with phi_0 = pi^{-1/4} and
/// phi_{k+1} = x sqrt(2/(k+1)) phi_k - sqrt(k/(k+1)) phi_{k-1}.
fn christoffel_weight(x: f64, order: usize) -> f64 {
    let mut prev = 0.0f64;
    let mut cur = PI.powf(-0.25);
    let mut sum = cur * cur;
    for k in 0..order - 1 {
        let next = x * (2.0 / (k as f64 + 1.0)).sqrt() * cur
            - (k as f64 / (k as f64 + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        sum += cur * cur;
    }
    1.0 / sum
}

/// Compensated accumulator; the fixed addition order keeps quadrature
/// results bit-identical across runs.
struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    fn new() -> Self {
        Self { sum: 0.0, carry: 0.0 }
    }

    fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

/// The four surviving displacement products of the exact-cat variant.
fn pair_product_exact(alpha0: f64, beta: C64) -> C64 {
    let (mm_p, pp_p, mp_p, pm_p) = cat_x_values(alpha0, beta);
    let (mm_m, pp_m, mp_m, pm_m) = cat_x_values(alpha0, -beta);
    mm_p * mm_m + pp_p * pp_m + mp_p * pm_m + pm_p * mp_m
}

/// The four surviving displacement products of the large-amplitude variant.
fn pair_product_large(alpha0: f64, beta: C64) -> C64 {
    let diag_p = coherent_element(alpha0, alpha0, beta) * coherent_element(alpha0, alpha0, -beta);
    let diag_m =
        coherent_element(-alpha0, -alpha0, beta) * coherent_element(-alpha0, -alpha0, -beta);
    // X_{|+α⟩⟨−α|}(β) X_{|−α⟩⟨+α|}(−β) and its mirror
    let cross_a = coherent_element(-alpha0, alpha0, beta) * coherent_element(alpha0, -alpha0, -beta);
    let cross_b = coherent_element(alpha0, -alpha0, beta) * coherent_element(-alpha0, alpha0, -beta);
    diag_p + diag_m + cross_a + cross_b
}

/// The four surviving displacement products of the small-amplitude variant.
fn pair_product_small(s: f64, beta: C64) -> C64 {
    let bt = squeezed_argument(beta, s);
    fock_element(1, 1, bt) * fock_element(1, 1, -bt)
        + fock_element(0, 0, bt) * fock_element(0, 0, -bt)
        + fock_element(1, 0, bt) * fock_element(0, 1, -bt)
        + fock_element(0, 1, bt) * fock_element(1, 0, -bt)
}

/// (1/π) ∫ P(β) e^{−σ|β|²} d²β by tensor-product Gauss-Hermite.
fn integrate_plane(
    product: &dyn Fn(C64) -> C64,
    sigma: f64,
    order: usize,
) -> CvResult<f64> {
    let gh = gauss_hermite(order)?;
    let scale = (1.0 + sigma).sqrt();
    let mut acc = KahanSum::new();
    for (i, &ui) in gh.nodes.iter().enumerate() {
        let wi = gh.weights[i];
        for (j, &uj) in gh.nodes.iter().enumerate() {
            let beta = C64::new(ui / scale, uj / scale);
            let residual = product(beta) * beta.norm_sqr().exp();
            acc.add(wi * gh.weights[j] * residual.re);
        }
    }
    Ok(acc.sum / (PI * (1.0 + sigma)))
}

fn fidelity_at_order(
    product: &dyn Fn(C64) -> C64,
    sigma: f64,
    order: usize,
) -> CvResult<f64> {
    Ok(0.25 * integrate_plane(product, sigma, order)?)
}

fn escalate(product: &dyn Fn(C64) -> C64, sigma: f64) -> CvResult<f64> {
    let mut prev = fidelity_at_order(product, sigma, ORDERS[0])?;
    for idx in 1..ORDERS.len() {
        let cur = fidelity_at_order(product, sigma, ORDERS[idx])?;
        let delta = (cur - prev).abs();
        if delta <= CONVERGENCE_TOL {
            return Ok(cur);
        }
        if idx == ORDERS.len() - 1 {
            return Err(CvError::QuadratureConvergence {
                lo: ORDERS[idx - 1],
                hi: ORDERS[idx],
                delta,
            });
        }
        prev = cur;
    }
    Ok(prev)
}

fn product_for(variant: HybridVariant, alpha0: f64) -> CvResult<Box<dyn Fn(C64) -> C64>> {
    if !(alpha0 > 0.0 && alpha0.is_finite()) {
        return Err(CvError::Domain(format!(
            "cat amplitude must be a finite positive real, got {alpha0}"
        )));
    }
    match variant {
        HybridVariant::Exact => Ok(Box::new(move |b| pair_product_exact(alpha0, b))),
        HybridVariant::Large => Ok(Box::new(move |b| pair_product_large(alpha0, b))),
        HybridVariant::Small => {
            let s = s_of_alpha(alpha0)?;
            Ok(Box::new(move |b| pair_product_small(s, b)))
        }
        HybridVariant::Coherent => Err(CvError::Domain(
            "the coherent hybrid variant has no CV-teleportation integrand here".into(),
        )),
    }
}

fn check_sigma(sigma: f64) -> CvResult<f64> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(CvError::Domain(format!(
            "noise variance must be a finite nonnegative real, got {sigma}"
        )));
    }
    Ok(sigma)
}

/// Quadrature fidelity with automatic order escalation.
pub fn fidelity_cv_numeric(
    variant: HybridVariant,
    alpha0: f64,
    sigma: f64,
) -> CvResult<f64> {
    let sigma = check_sigma(sigma)?;
    escalate(product_for(variant, alpha0)?.as_ref(), sigma)
}

/// Quadrature fidelity of the small-amplitude variant at an explicit
/// squeezing, bypassing the amplitude-to-squeezing map.
pub fn fidelity_cv_numeric_small_s(s: f64, sigma: f64) -> CvResult<f64> {
    if !s.is_finite() {
        return Err(CvError::Domain(format!(
            "squeezing parameter must be finite, got {s}"
        )));
    }
    let sigma = check_sigma(sigma)?;
    escalate(&move |b| pair_product_small(s, b), sigma)
}

/// Quadrature fidelity at one fixed order, without escalation.
pub fn fidelity_cv_fixed_order(
    variant: HybridVariant,
    alpha0: f64,
    sigma: f64,
    order: usize,
) -> CvResult<f64> {
    let sigma = check_sigma(sigma)?;
    fidelity_at_order(product_for(variant, alpha0)?.as_ref(), sigma, order)
}

/// Full two-mode fidelity integral
/// F = (1/π²) ∬∬ χ(β_D, β_C) χ(−β_D, −β_C) e^{−σ|β_C|²} d²β_D d²β_C
/// without the analytic DV-mode reduction.
pub fn fidelity_cv_numeric_4d(
    variant: HybridVariant,
    alpha0: f64,
    sigma: f64,
    order: usize,
) -> CvResult<f64> {
    let sigma = check_sigma(sigma)?;
    // validate the variant/amplitude combination before the hot loop
    chi_hybrid(variant, alpha0, C64::new(0.0, 0.0), C64::new(0.0, 0.0))?;
    let gh = gauss_hermite(order)?;
    let scale = (1.0 + sigma).sqrt();
    let mut acc = KahanSum::new();
    for (i, &xi) in gh.nodes.iter().enumerate() {
        for (j, &pj) in gh.nodes.iter().enumerate() {
            let beta_d = C64::new(xi, pj);
            let w_d = gh.weights[i] * gh.weights[j];
            for (k, &xk) in gh.nodes.iter().enumerate() {
                for (l, &pl) in gh.nodes.iter().enumerate() {
                    let beta_c = C64::new(xk / scale, pl / scale);
                    let chi_fwd = chi_hybrid(variant, alpha0, beta_d, beta_c)?;
                    let chi_bwd = chi_hybrid(variant, alpha0, -beta_d, -beta_c)?;
                    let residual =
                        chi_fwd * chi_bwd * (beta_d.norm_sqr() + beta_c.norm_sqr()).exp();
                    acc.add(w_d * gh.weights[k] * gh.weights[l] * residual.re);
                }
            }
        }
    }
    Ok(acc.sum / (PI * PI * (1.0 + sigma)))
}
