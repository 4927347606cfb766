//! Teleportation of the DV qubit mode through an attenuated two-mode
//! squeezed vacuum channel.
//!
//! Both channel arms pass lossy links (transmissivities T_A, T_B) before
//! the Bell measurement; the receiver applies a displacement scaled by a
//! gain g. The whole channel acts on the teleported mode as a Gaussian
//! random-displacement map of variance
//!
//! ```text
//!   σ = (1/4g²) [ e^{2r} (g√T_A − √T_B)²  +  e^{−2r} (g√T_A + √T_B)²
//!               + 2 g² (1−T_A)  +  2 (1−T_B) ].
//! ```
//!
//! In the photon-number basis the map has closed-form matrix elements
//! governed by γ = g²(2σ + 1) ≥ 1:
//!
//! ```text
//!   T_{0,0→k,k}     = 2 (γ−1)^k / (γ+1)^{k+1}
//!   T_{1,1→k,k}     = 2 (γ−2g²+1)(γ−1)^k / (γ+1)^{k+2}
//!                     + 8 k g² (γ−1)^{k−1} / (γ+1)^{k+2}      (second term for k ≥ 1)
//!   T_{1,0→k+1,k}   = 4 g √(k+1) (γ−1)^k / (γ+1)^{k+2}
//! ```
//!
//! Because the hybrid input is |cat₋⟩|0⟩ + |cat₊⟩|1⟩ up to normalization
//! and the cat states are exactly orthogonal, the teleported two-party
//! state lives in the basis {cat₊, cat₋} ⊗ Fock and its coefficients do
//! not depend on the cat amplitude α₀ at all: fidelity and negativity of
//! this scheme are exactly α₀-invariant.

use crate::channel::ChannelPair;
use crate::fock::{
    uhlmann_fidelity, DensityMatrix, FockError, FockResult, StateVector, C64,
};
use nalgebra::DMatrix;

/// Safe upper bound for the photon-number cutoff search.
const KMAX_SEARCH_CAP: usize = 1_000_000;

/// Gain, squeezing, and channel of the teleporter, with the derived
/// displacement variance σ and spectral parameter γ = g²(2σ+1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TeleportParams {
    g: f64,
    r: f64,
    ch: ChannelPair,
    sigma: f64,
    gamma: f64,
}

impl TeleportParams {
    pub fn new(g: f64, r: f64, ch: ChannelPair) -> FockResult<Self> {
        if !(g > 0.0 && g.is_finite()) {
            return Err(FockError::Domain(format!(
                "teleportation gain must be a finite positive real, got {g}"
            )));
        }
        if !(r >= 0.0 && r.is_finite()) {
            return Err(FockError::Domain(format!(
                "squeezing parameter must be a finite nonnegative real, got {r}"
            )));
        }
        let sigma = sigma_of(g, r, ch);
        // γ ≥ 1 analytically; clamp shields (γ−1)^k from rounding at the
        // perfect-channel point.
        let gamma = (g * g * (2.0 * sigma + 1.0)).max(1.0);
        Ok(Self { g, r, ch, sigma, gamma })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn channel(&self) -> ChannelPair {
        self.ch
    }

    /// Variance of the effective Gaussian displacement noise.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// γ = g²(2σ+1); γ = 1 exactly for the lossless unity-gain channel
    /// in the infinite-squeezing limit.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Displacement-noise variance of the attenuated-TMSV teleporter.
pub fn sigma_of(g: f64, r: f64, ch: ChannelPair) -> f64 {
    let (ta, tb) = (ch.t_a().sqrt(), ch.t_b().sqrt());
    let d_minus = g * ta - tb;
    let d_plus = g * ta + tb;
    // Skip the amplified term when its coefficient vanishes exactly so a
    // huge e^{2r} cannot turn 0·∞ into NaN.
    let amplified = if d_minus == 0.0 {
        0.0
    } else {
        (2.0 * r).exp() * d_minus * d_minus
    };
    let squeezed = (-2.0 * r).exp() * d_plus * d_plus;
    let excess = 2.0 * g * g * (1.0 - ch.t_a()) + 2.0 * (1.0 - ch.t_b());
    (amplified + squeezed + excess) / (4.0 * g * g)
}

/// Gain g = √(T_B/T_A) that removes the e^{2r}-amplified term of σ.
pub fn tuned_gain(ch: ChannelPair) -> FockResult<f64> {
    if ch.t_a() == 0.0 {
        return Err(FockError::Domain(
            "tuned gain is undefined for an opaque sender arm (T_A = 0)".into(),
        ));
    }
    Ok((ch.t_b() / ch.t_a()).sqrt())
}

/// Photon-number cutoff for the teleported state together with the trace
/// mass the cutoff is allowed to discard.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockTruncation {
    k_max: usize,
    delta: f64,
}

impl FockTruncation {
    pub fn new(k_max: usize, delta: f64) -> FockResult<Self> {
        if k_max == 0 {
            return Err(FockError::Domain(
                "photon-number cutoff must be at least 1".into(),
            ));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(FockError::Domain(format!(
                "trace-defect budget must be a finite positive real, got {delta}"
            )));
        }
        Ok(Self { k_max, delta })
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// T_{0,0→k,k}: vacuum-to-k transfer probability. Written in terms of the
/// thermal ratio q = (γ−1)/(γ+1) < 1 so that large k underflows to zero
/// instead of overflowing the separate powers of γ±1.
pub fn transfer_t00(k: usize, params: &TeleportParams) -> f64 {
    let gamma = params.gamma;
    let q = (gamma - 1.0) / (gamma + 1.0);
    2.0 * q.powi(k as i32) / (gamma + 1.0)
}

/// T_{1,1→k,k}: single-photon survival/redistribution probability. The two
/// summands are kept separate so k = 0 never touches a q^{−1} factor.
pub fn transfer_t11(k: usize, params: &TeleportParams) -> f64 {
    let (g, gamma) = (params.g, params.gamma);
    let q = (gamma - 1.0) / (gamma + 1.0);
    let base =
        2.0 * (gamma - 2.0 * g * g + 1.0) * q.powi(k as i32) / (gamma + 1.0).powi(2);
    let excited = if k == 0 {
        0.0
    } else {
        8.0 * k as f64 * g * g * q.powi(k as i32 - 1) / (gamma + 1.0).powi(3)
    };
    base + excited
}

/// T_{1,0→k+1,k}: coherence transfer amplitude.
pub fn transfer_t10(k: usize, params: &TeleportParams) -> f64 {
    let (g, gamma) = (params.g, params.gamma);
    let q = (gamma - 1.0) / (gamma + 1.0);
    4.0 * g * ((k + 1) as f64).sqrt() * q.powi(k as i32) / (gamma + 1.0).powi(2)
}

/// Coefficients (a_k, b_k, c_k) of the teleported state,
///
/// ```text
///   a_k = T_{1,1→k,k}/2        population on |cat₊, k⟩
///   b_k = T_{1,0→k+1,k}/2      coherence ⟨cat₋, k| ρ |cat₊, k+1⟩
///   c_k = T_{0,0→k+1,k+1}/2    population on |cat₋, k+1⟩
/// ```
///
/// Defined for k ≥ −1 with a₋₁ = b₋₁ = 0, so that c₋₁ is the vacuum
/// population of the cat₋ branch.
pub fn transfer_coefficients(k: i64, params: &TeleportParams) -> FockResult<(f64, f64, f64)> {
    if k < -1 {
        return Err(FockError::Domain(format!(
            "transfer coefficients are defined for k >= -1, got {k}"
        )));
    }
    let c = transfer_t00((k + 1) as usize, params) / 2.0;
    if k == -1 {
        return Ok((0.0, 0.0, c));
    }
    let a = transfer_t11(k as usize, params) / 2.0;
    let b = transfer_t10(k as usize, params) / 2.0;
    Ok((a, b, c))
}

/// Trace mass of the teleported state outside photon numbers 0..=k_max,
/// from the geometric tails of the transfer coefficients. With
/// q = (γ−1)/(γ+1) and K = k_max+1:
///
/// ```text
///   Σ_{k≥K} T_{0,0→k,k} = q^K
///   Σ_{k≥K} T_{1,1→k,k} = (γ−2g²+1)/(γ+1) q^K
///                       + (2g²/(γ+1)) q^{K−1} (2K/(γ+1) + q)
/// ```
pub fn truncated_trace_defect(k_max: usize, params: &TeleportParams) -> f64 {
    let (g, gamma) = (params.g, params.gamma);
    let q = (gamma - 1.0) / (gamma + 1.0);
    let cap = k_max as i32 + 1;
    let tail00 = q.powi(cap);
    let tail11 = (gamma - 2.0 * g * g + 1.0) / (gamma + 1.0) * q.powi(cap)
        + 2.0 * g * g / (gamma + 1.0)
            * q.powi(cap - 1)
            * (2.0 * (cap as f64) / (gamma + 1.0) + q);
    0.5 * (tail00 + tail11)
}

/// Smallest cutoff whose discarded trace mass is below `delta`.
pub fn choose_kmax(params: &TeleportParams, delta: f64) -> FockResult<usize> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(FockError::Domain(format!(
            "trace-defect budget must be a finite positive real, got {delta}"
        )));
    }
    let mut k = 30usize;
    while truncated_trace_defect(k, params) >= delta {
        k *= 2;
        if k > KMAX_SEARCH_CAP {
            return Err(FockError::Domain(format!(
                "no cutoff below {KMAX_SEARCH_CAP} reaches trace defect {delta} (gamma = {})",
                params.gamma
            )));
        }
    }
    while k > 1 && truncated_trace_defect(k - 1, params) < delta {
        k -= 1;
    }
    Ok(k)
}

/// Teleported state in the logical basis [cat (cat₊ = 0, cat₋ = 1),
/// photon number 0..=k_max+1], normalized, with the discarded trace mass
/// recorded separately.
#[derive(Debug, Clone)]
pub struct TeleportedDvState {
    pub state: DensityMatrix,
    pub trace_defect: f64,
    pub k_max: usize,
}

/// Assembles the teleported two-party state from the transfer
/// coefficients. Fails with a truncation error when the cutoff cannot meet
/// the requested trace-defect budget.
pub fn teleport_dv_state(
    params: &TeleportParams,
    trunc: FockTruncation,
) -> FockResult<TeleportedDvState> {
    let defect = truncated_trace_defect(trunc.k_max, params);
    if defect >= trunc.delta {
        return Err(FockError::Truncation {
            context: "teleported-state photon-number cutoff",
            defect,
            tol: trunc.delta,
        });
    }
    let fock_dim = trunc.k_max + 2;
    let n = 2 * fock_dim;
    let mut mat = DMatrix::<C64>::zeros(n, n);
    // layout: flat index = cat · fock_dim + photon number
    let plus = |k: usize| k;
    let minus = |k: usize| fock_dim + k;
    for k in 0..fock_dim {
        mat[(plus(k), plus(k))] = C64::new(transfer_t11(k, params) / 2.0, 0.0);
        mat[(minus(k), minus(k))] = C64::new(transfer_t00(k, params) / 2.0, 0.0);
    }
    for k in 0..=trunc.k_max {
        let b = transfer_t10(k, params) / 2.0;
        mat[(plus(k + 1), minus(k))] = C64::new(b, 0.0);
        mat[(minus(k), plus(k + 1))] = C64::new(b, 0.0);
    }
    let trace: f64 = mat.diagonal().iter().map(|z| z.re).sum();
    mat /= C64::new(trace, 0.0);
    let state = DensityMatrix::from_matrix(mat, vec![2, fock_dim])?;
    Ok(TeleportedDvState { state, trace_defect: defect, k_max: trunc.k_max })
}

/// The undamaged hybrid state written in the logical basis of
/// [`teleport_dv_state`]: (|cat₋, 0⟩ + |cat₊, 1⟩)/√2.
pub fn logical_hybrid_ket(fock_dim: usize) -> FockResult<StateVector> {
    if fock_dim < 2 {
        return Err(FockError::Domain(
            "logical hybrid ket needs at least two photon-number levels".into(),
        ));
    }
    let mut amps = vec![C64::new(0.0, 0.0); 2 * fock_dim];
    let w = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[1] = w; // |cat₊, 1⟩
    amps[fock_dim] = w; // |cat₋, 0⟩
    StateVector::from_amplitudes(amps, vec![2, fock_dim])
}

/// Fidelity (against the undamaged hybrid state) and logarithmic
/// negativity (across the cat|Fock split) of the teleported state. Both
/// are exactly independent of the cat amplitude α₀.
pub fn dv_metrics(params: &TeleportParams, trunc: FockTruncation) -> FockResult<(f64, f64)> {
    let teleported = teleport_dv_state(params, trunc)?;
    let ideal = logical_hybrid_ket(trunc.k_max + 2)?;
    let fid = uhlmann_fidelity(&teleported.state, &ideal.to_density_matrix())?;
    let ln = teleported.state.log_negativity(&[0])?;
    Ok((fid, ln))
}

/// Closed-form fidelity of the teleported state with the undamaged hybrid:
/// F = (1/4)[T_{0,0→0,0} + T_{1,1→1,1} + 2 T_{1,0→1,0}].
pub fn dv_fidelity_transfer_form(params: &TeleportParams) -> f64 {
    0.25 * (transfer_t00(0, params) + transfer_t11(1, params) + 2.0 * transfer_t10(0, params))
}

/// Logarithmic negativity from the 2x2 blocks of the partial transpose,
/// which pairs a_k with c_k through b_k:
/// E = Σ_k max(0, √((a_k−c_k)²/4 + b_k²) − (a_k+c_k)/2), then log₂(1+2E).
pub fn dv_log_negativity_transfer_form(params: &TeleportParams, k_max: usize) -> f64 {
    let mut negativity = 0.0;
    for k in 0..=k_max as i64 {
        let (a, b, c) = transfer_coefficients(k, params).expect("k >= 0");
        let min_eig = 0.5 * (a + c) - (0.25 * (a - c) * (a - c) + b * b).sqrt();
        if min_eig < 0.0 {
            negativity -= min_eig;
        }
    }
    (1.0 + 2.0 * negativity).log2()
}
