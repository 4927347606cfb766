//! Integration checks for CV-mode teleportation: closed-form fidelities
//! against the quadrature oracle on the full grids, and every hybrid
//! characteristic-function evaluator against a truncated-Fock-space trace
//! oracle Tr[rho D(beta_D) (x) D(beta_C)] at seeded random phase-space
//! points.

use hybridsim_core::cv_teleport::{
    chi_hybrid, chi_tmsv, chi_tmsv_attenuated, fidelity_cv_exact_sigma, fidelity_cv_large_sigma,
    fidelity_cv_numeric, fidelity_cv_small_sigma,
};
use hybridsim_core::fock::{
    cat_ket, coherent_ket, displacement_matrix, squeezed_fock_ket, CatParity, StateVector,
    TruncationPolicy, C64,
};
use hybridsim_core::hybrid::s_of_alpha;
use hybridsim_core::{ChannelPair, ExponentReading, HybridVariant};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// χ from first principles for a pure two-mode state laid out [C, D]:
/// ⟨ψ| D_C(β_c) ⊗ D_D(β_d) |ψ⟩ evaluated as A·M·Bᵀ against the amplitude
/// matrix M[c, d].
fn chi_trace_oracle(psi: &StateVector, beta_d: C64, beta_c: C64) -> C64 {
    let (dim_c, dim_d) = (psi.dims()[0], psi.dims()[1]);
    let m = DMatrix::<C64>::from_fn(dim_c, dim_d, |c, d| psi.amplitudes()[c * dim_d + d]);
    let a = displacement_matrix(beta_c, dim_c);
    let b = displacement_matrix(beta_d, dim_d);
    let moved = &a * &m * b.transpose();
    m.iter().zip(moved.iter()).map(|(x, y)| x.conj() * y).sum()
}

fn random_beta(rng: &mut ChaCha8Rng, half_width: f64) -> C64 {
    C64::new(
        rng.gen_range(-half_width..half_width),
        rng.gen_range(-half_width..half_width),
    )
}

fn exact_state(alpha0: f64, dim_c: usize, dim_d: usize) -> StateVector {
    let policy = TruncationPolicy::new(dim_c).unwrap();
    let cat_p = cat_ket(alpha0, CatParity::Even, policy).unwrap();
    let cat_m = cat_ket(alpha0, CatParity::Odd, policy).unwrap();
    let w = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut amps = vec![C64::new(0.0, 0.0); dim_c * dim_d];
    for c in 0..dim_c {
        amps[c * dim_d] = w * cat_m.amplitudes()[c];
        amps[c * dim_d + 1] = w * cat_p.amplitudes()[c];
    }
    StateVector::from_amplitudes(amps, vec![dim_c, dim_d]).unwrap()
}

fn small_state(alpha0: f64, dim_c: usize, dim_d: usize) -> StateVector {
    let policy = TruncationPolicy::new(dim_c).unwrap();
    let s = s_of_alpha(alpha0).unwrap();
    let sq0 = squeezed_fock_ket(s, 0, policy).unwrap();
    let sq1 = squeezed_fock_ket(s, 1, policy).unwrap();
    let w = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut amps = vec![C64::new(0.0, 0.0); dim_c * dim_d];
    for c in 0..dim_c {
        amps[c * dim_d] = w * sq1.amplitudes()[c];
        amps[c * dim_d + 1] = w * sq0.amplitudes()[c];
    }
    StateVector::from_amplitudes(amps, vec![dim_c, dim_d]).unwrap()
}

fn large_state(alpha0: f64, dim_c: usize, dim_d: usize) -> StateVector {
    let policy = TruncationPolicy::new(dim_c).unwrap();
    let coh_p = coherent_ket(C64::new(alpha0, 0.0), policy).unwrap();
    let coh_m = coherent_ket(C64::new(-alpha0, 0.0), policy).unwrap();
    let half = C64::new(0.5, 0.0);
    let mut amps = vec![C64::new(0.0, 0.0); dim_c * dim_d];
    // (|α₀⟩(|0⟩+|1⟩) − |−α₀⟩(|0⟩−|1⟩)) / 2; the D-mode orthogonality makes
    // the overall norm exactly 1.
    for c in 0..dim_c {
        amps[c * dim_d] = half * (coh_p.amplitudes()[c] - coh_m.amplitudes()[c]);
        amps[c * dim_d + 1] = half * (coh_p.amplitudes()[c] + coh_m.amplitudes()[c]);
    }
    StateVector::from_amplitudes(amps, vec![dim_c, dim_d]).unwrap()
}

#[test]
fn hybrid_chi_matches_the_fock_trace_oracle_at_random_points() {
    let cases = [
        (HybridVariant::Exact, 1.2, exact_state(1.2, 35, 20)),
        (HybridVariant::Small, 0.3, small_state(0.3, 25, 20)),
        (HybridVariant::Large, 1.5, large_state(1.5, 35, 20)),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0x0c1a_11e5);
    for (variant, alpha0, psi) in &cases {
        for _ in 0..100 {
            let beta_d = random_beta(&mut rng, 1.0);
            let beta_c = random_beta(&mut rng, 1.0);
            let closed = chi_hybrid(*variant, *alpha0, beta_d, beta_c).unwrap();
            let oracle = chi_trace_oracle(psi, beta_d, beta_c);
            assert!(
                (closed - oracle).norm() < 1e-7,
                "{variant:?}: chi mismatch {closed} vs {oracle} at ({beta_d}, {beta_c})"
            );
        }
    }
}

#[test]
fn exact_and_large_chi_agree_for_big_cats() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xb16_ca7);
    for _ in 0..100 {
        let beta_d = random_beta(&mut rng, 1.0);
        let beta_c = random_beta(&mut rng, 1.0);
        let exact = chi_hybrid(HybridVariant::Exact, 2.0, beta_d, beta_c).unwrap();
        let large = chi_hybrid(HybridVariant::Large, 2.0, beta_d, beta_c).unwrap();
        assert!(
            (exact - large).norm() < 1e-3,
            "variants diverge at ({beta_d}, {beta_c}): {exact} vs {large}"
        );
    }
}

#[test]
fn attenuated_resource_without_loss_is_the_pure_resource() {
    let lossless = ChannelPair::lossless();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e1e);
    for _ in 0..100 {
        let r = rng.gen_range(0.0..2.5);
        let beta_a = random_beta(&mut rng, 1.5);
        let beta_b = random_beta(&mut rng, 1.5);
        let att = chi_tmsv_attenuated(r, lossless, beta_a, beta_b);
        let pure = chi_tmsv(r, beta_a, beta_b);
        assert!((att - pure).norm() < 1e-12);
    }
}

#[test]
fn limiting_closed_forms_match_quadrature_on_the_stated_grids() {
    for sigma in [0.1, 0.5, 1.0] {
        for alpha0 in [0.2, 0.4] {
            let closed = fidelity_cv_small_sigma(alpha0, sigma).unwrap();
            let numeric = fidelity_cv_numeric(HybridVariant::Small, alpha0, sigma).unwrap();
            assert!(
                (closed - numeric).abs() < 1e-6,
                "small mismatch at ({alpha0}, {sigma}): {closed} vs {numeric}"
            );
        }
        for alpha0 in [1.0, 1.5, 2.0] {
            let closed = fidelity_cv_large_sigma(alpha0, sigma).unwrap();
            let numeric = fidelity_cv_numeric(HybridVariant::Large, alpha0, sigma).unwrap();
            assert!(
                (closed - numeric).abs() < 1e-6,
                "large mismatch at ({alpha0}, {sigma}): {closed} vs {numeric}"
            );
        }
    }
}

#[test]
fn exact_closed_form_matches_quadrature_broadly() {
    for sigma in [0.1, 0.5, 1.0] {
        for alpha0 in [0.3, 0.7, 1.0, 1.5, 2.0] {
            let closed =
                fidelity_cv_exact_sigma(alpha0, sigma, ExponentReading::Quadratic).unwrap();
            let numeric = fidelity_cv_numeric(HybridVariant::Exact, alpha0, sigma).unwrap();
            assert!(
                (closed - numeric).abs() < 1e-6,
                "exact mismatch at ({alpha0}, {sigma}): {closed} vs {numeric}"
            );
        }
    }
}

#[test]
fn both_limiting_forms_overestimate_at_intermediate_amplitude() {
    // At a cat amplitude between the two approximation regimes the exact
    // fidelity falls below BOTH limiting forms rather than between them;
    // the quadrature oracle confirms the exact closed form here.
    let (alpha0, sigma) = (0.7, 0.4);
    let exact = fidelity_cv_exact_sigma(alpha0, sigma, ExponentReading::Quadratic).unwrap();
    let numeric = fidelity_cv_numeric(HybridVariant::Exact, alpha0, sigma).unwrap();
    assert!((exact - numeric).abs() < 1e-6);
    let small = fidelity_cv_small_sigma(alpha0, sigma).unwrap();
    let large = fidelity_cv_large_sigma(alpha0, sigma).unwrap();
    assert!(exact < small.min(large));
    // Neither approximation is wildly off at this boundary point.
    assert!(small.max(large) - exact < 0.06);
    // For a solidly large cat the exact value hugs the large-cat form.
    let exact_big = fidelity_cv_exact_sigma(1.5, 0.2, ExponentReading::Quadratic).unwrap();
    let large_big = fidelity_cv_large_sigma(1.5, 0.2).unwrap();
    assert!((exact_big - large_big).abs() < 0.02);
}

#[test]
fn exact_fidelity_decreases_with_amplitude_below_unit_cats() {
    let sigma = 0.3;
    let mut previous = f64::INFINITY;
    for alpha0 in [0.5, 0.6, 0.7, 0.8, 0.9, 1.0] {
        let f = fidelity_cv_exact_sigma(alpha0, sigma, ExponentReading::Quadratic).unwrap();
        assert!(f < previous, "fidelity rose at alpha0={alpha0}");
        previous = f;
    }
}

#[test]
fn fidelities_stay_in_the_unit_interval_and_fall_with_noise() {
    for alpha0 in [0.3, 1.0, 1.8] {
        let mut previous = f64::INFINITY;
        for sigma in [0.0, 0.2, 0.5, 1.0, 2.0] {
            let f = fidelity_cv_exact_sigma(alpha0, sigma, ExponentReading::Quadratic).unwrap();
            assert!((0.0..=1.0).contains(&f));
            assert!(f <= previous + 1e-14);
            previous = f;
        }
    }
}
