//! Constructors for the hybrid CV-DV entangled state and its limiting
//! variants.
//!
//! The reference state entangles a cat-state mode C with a qubit-like mode D:
//!
//! ```text
//!   |ψ_h⟩ = (|cat₋⟩|0⟩ + |cat₊⟩|1⟩)/√2,   |cat±⟩ = (|α₀⟩ ± |−α₀⟩)/N±,
//! ```
//!
//! with N± = √(2(1 ± e^{−2α₀²})). Two approximations bracket it:
//!
//! * large α₀: cat states become near-orthogonal coherent states and the
//!   state approaches (|α₀⟩|+⟩ − |−α₀⟩|−⟩)/√2;
//! * small α₀: the cats approach squeezed Fock states and the state
//!   approaches (S(s)|1⟩|0⟩ + S(s)|0⟩|1⟩)/√2 with the optimal squeezing
//!   s = (√(9 + 4α₀⁴) − 3)/(2α₀²).
//!
//! A fourth variant replaces the cats with bare coherent states,
//! (|α₀⟩|0⟩ + |−α₀⟩|1⟩)/√2.
//!
//! All four are exactly normalized before truncation because the D-mode
//! components are orthogonal; building one outside its accuracy regime logs
//! a warning but proceeds, since cross-regime comparisons are part of the
//! intended use. The layout is always `[dim, 2]` with the C mode slowest.

use crate::fock::{
    cat_ket, cat_norm, coherent_ket, squeezed_fock_ket, CatParity, FockError, FockResult,
    StateVector, TruncationPolicy, C64,
};

/// Which realization of the hybrid state to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HybridVariant {
    /// Exact cat-state form.
    Exact,
    /// Large-amplitude approximation (coherent ⊗ |±⟩ terms).
    Large,
    /// Small-amplitude approximation (squeezed Fock terms).
    Small,
    /// Coherent-state variant (no cat superposition on C).
    Coherent,
}

/// Parameters of a hybrid entangled state: the cat amplitude, the variant,
/// and the derived squeezing and cat normalizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridSpec {
    alpha0: f64,
    variant: HybridVariant,
    s: f64,
    n_plus: f64,
    n_minus: f64,
}

impl HybridSpec {
    /// Validates α₀ > 0 and derives s (for the small variant) and N±.
    /// Logs a warning when the variant is used outside its accuracy regime
    /// (large with α₀ ≤ 1, small with α₀ ≥ 0.5).
    pub fn new(variant: HybridVariant, alpha0: f64) -> FockResult<Self> {
        if !(alpha0 > 0.0 && alpha0.is_finite()) {
            return Err(FockError::Domain(format!(
                "hybrid cat amplitude must be a finite positive real, got {alpha0}"
            )));
        }
        match variant {
            HybridVariant::Large if alpha0 <= 1.0 => {
                log::warn!(
                    "large-cat variant requested at alpha0 = {alpha0}; its accuracy regime is alpha0 > 1"
                );
            }
            HybridVariant::Small if alpha0 >= 0.5 => {
                log::warn!(
                    "small-cat variant requested at alpha0 = {alpha0}; its accuracy regime is alpha0 < 0.5"
                );
            }
            _ => {}
        }
        let s = match variant {
            HybridVariant::Small => s_of_alpha(alpha0)?,
            _ => 0.0,
        };
        Ok(Self {
            alpha0,
            variant,
            s,
            n_plus: cat_norm(alpha0, CatParity::Even),
            n_minus: cat_norm(alpha0, CatParity::Odd),
        })
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn variant(&self) -> HybridVariant {
        self.variant
    }

    /// Squeezing of the small-cat approximation; zero for other variants.
    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn n_plus(&self) -> f64 {
        self.n_plus
    }

    pub fn n_minus(&self) -> f64 {
        self.n_minus
    }

    /// Builds the configured variant with layout `[policy.dim, 2]`.
    pub fn build(&self, policy: TruncationPolicy) -> FockResult<StateVector> {
        match self.variant {
            HybridVariant::Exact => hybrid_exact(self, policy),
            HybridVariant::Large => hybrid_large(self, policy),
            HybridVariant::Small => hybrid_small(self, policy),
            HybridVariant::Coherent => hybrid_coherent(self.alpha0, policy),
        }
    }
}

/// Squeezing that best matches a small cat of amplitude α₀:
/// s = (√(9 + 4α₀⁴) − 3)/(2α₀²), which tends to α₀²/3 as α₀ → 0.
pub fn s_of_alpha(alpha0: f64) -> FockResult<f64> {
    if !(alpha0 > 0.0 && alpha0.is_finite()) {
        return Err(FockError::Domain(format!(
            "s_of_alpha requires a finite positive amplitude, got {alpha0}"
        )));
    }
    let a2 = alpha0 * alpha0;
    Ok(((9.0 + 4.0 * a2 * a2).sqrt() - 3.0) / (2.0 * a2))
}

/// Joins two unit-norm C-mode components into (|x⟩|0⟩ + |y⟩|1⟩)/√2.
/// Exactly unit norm because the D components are orthogonal.
fn join_on_dv(x: &StateVector, y: &StateVector) -> FockResult<StateVector> {
    let dim = x.dims()[0];
    let half = C64::new(0.5_f64.sqrt(), 0.0);
    let mut amps = vec![C64::new(0.0, 0.0); 2 * dim];
    for n in 0..dim {
        amps[2 * n] = half * x.amplitudes()[n];
        amps[2 * n + 1] = half * y.amplitudes()[n];
    }
    let mut state = StateVector::from_amplitudes(amps, vec![dim, 2])?;
    state.set_renorm_defect(x.renorm_defect() + y.renorm_defect());
    Ok(state)
}

/// Exact hybrid state (|cat₋⟩|0⟩ + |cat₊⟩|1⟩)/√2.
pub fn hybrid_exact(spec: &HybridSpec, policy: TruncationPolicy) -> FockResult<StateVector> {
    let minus = cat_ket(spec.alpha0, CatParity::Odd, policy)?;
    let plus = cat_ket(spec.alpha0, CatParity::Even, policy)?;
    join_on_dv(&minus, &plus)
}

/// Large-cat approximation (|α₀⟩|+⟩ − |−α₀⟩|−⟩)/√2. Expanding |±⟩ in the
/// Fock basis of D gives the D = 0 component (|α₀⟩ − |−α₀⟩)/2 and the D = 1
/// component (|α₀⟩ + |−α₀⟩)/2, which keeps the overall norm exactly 1.
pub fn hybrid_large(spec: &HybridSpec, policy: TruncationPolicy) -> FockResult<StateVector> {
    let plus = coherent_ket(C64::new(spec.alpha0, 0.0), policy)?;
    let minus = coherent_ket(C64::new(-spec.alpha0, 0.0), policy)?;
    let dim = policy.dim;
    let mut amps = vec![C64::new(0.0, 0.0); 2 * dim];
    for n in 0..dim {
        amps[2 * n] = (plus.amplitudes()[n] - minus.amplitudes()[n]) * 0.5;
        amps[2 * n + 1] = (plus.amplitudes()[n] + minus.amplitudes()[n]) * 0.5;
    }
    let mut state = StateVector::from_amplitudes(amps, vec![dim, 2])?;
    state.set_renorm_defect(plus.renorm_defect() + minus.renorm_defect());
    Ok(state)
}

/// Small-cat approximation (S(s)|1⟩|0⟩ + S(s)|0⟩|1⟩)/√2 with
/// s = s_of_alpha(α₀).
pub fn hybrid_small(spec: &HybridSpec, policy: TruncationPolicy) -> FockResult<StateVector> {
    let s = if spec.variant == HybridVariant::Small {
        spec.s
    } else {
        s_of_alpha(spec.alpha0)?
    };
    let sq_one = squeezed_fock_ket(s, 1, policy)?;
    let sq_zero = squeezed_fock_ket(s, 0, policy)?;
    join_on_dv(&sq_one, &sq_zero)
}

/// Coherent-state variant (|α₀⟩|0⟩ + |−α₀⟩|1⟩)/√2.
pub fn hybrid_coherent(alpha0: f64, policy: TruncationPolicy) -> FockResult<StateVector> {
    if !(alpha0 > 0.0 && alpha0.is_finite()) {
        return Err(FockError::Domain(format!(
            "hybrid coherent amplitude must be a finite positive real, got {alpha0}"
        )));
    }
    let plus = coherent_ket(C64::new(alpha0, 0.0), policy)?;
    let minus = coherent_ket(C64::new(-alpha0, 0.0), policy)?;
    join_on_dv(&plus, &minus)
}
