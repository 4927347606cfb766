//! Truncated-Fock-space linear algebra: state constructors, tensor
//! operations, beam-splitter loss, and the closeness and entanglement
//! metrics that every other module builds on.
//!
//! Conventions
//!
//! * Multi-mode amplitudes are stored row-major with the *first* mode
//!   slowest: a state with layout `[d0, d1]` keeps ⟨n0, n1|ψ⟩ at flat index
//!   `n0 * d1 + n1`.
//! * Quadratures use hbar = 1/2, so x = (a + a†)/2, p = (a − a†)/(2i),
//!   [x, p] = i/2 and the vacuum variance is 1/4. All phase-space formulas
//!   in [`crate::cv_teleport`] assume this normalization.
//! * A beam splitter of transmissivity T maps creation operators as
//!   a†_i → t a†_i + r a†_j and a†_j → t a†_j − r a†_i with t = √T,
//!   r = √(1−T); the reflected second input picks up the minus sign. In
//!   particular T = 0 sends |1,0⟩ → +|0,1⟩ and |0,1⟩ → −|1,0⟩.
//! * Constructors renormalize after truncation and record the discarded
//!   weight; they fail with [`FockError::Truncation`] only when the
//!   pre-renormalization norm defect reaches the policy's `norm_tol`.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

pub use num_complex::Complex64 as C64;

/// Quadrature normalization used throughout: x = (a + a†)/2.
pub const HBAR: f64 = 0.5;

/// Default Fock levels per CV mode; adequate for cat amplitudes up to 2.
pub const DEFAULT_DIM: usize = 40;
/// Default cap on the truncation-induced norm defect of constructors.
pub const DEFAULT_NORM_TOL: f64 = 1e-12;
/// Default tolerance on negative eigenvalues of nominally positive states.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;
/// Max entrywise |M − M†| accepted when building a [`DensityMatrix`].
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Max |trace − 1| accepted when building a [`DensityMatrix`].
pub const STATE_TRACE_TOL: f64 = 1e-10;
/// Norm loss tolerated by [`beam_splitter_apply`] before it reports
/// truncation; mixing against a vacuum ancilla loses nothing, so only
/// doubly occupied mode pairs ever approach this.
pub const BEAM_SPLITTER_NORM_TOL: f64 = 1e-10;

/// Errors for state construction and Fock-space operations.
#[derive(Debug, Error)]
pub enum FockError {
    /// Truncated basis dropped more weight than the policy allows.
    #[error("{context}: truncation defect {defect:.3e} exceeds tolerance {tol:.3e}")]
    Truncation {
        context: &'static str,
        defect: f64,
        tol: f64,
    },
    /// The odd cat state has zero norm at alpha0 = 0.
    #[error("odd cat state is degenerate at alpha0 = 0")]
    DegenerateCat,
    /// A scalar argument is outside its admissible range.
    #[error("{0}")]
    Domain(String),
    /// A mode index does not exist in the layout.
    #[error("mode index {mode} out of range for {n_modes}-mode layout")]
    Index { mode: usize, n_modes: usize },
    /// Two operands carry incompatible mode layouts.
    #[error("operand layouts differ: {left:?} vs {right:?}")]
    LayoutMismatch { left: Vec<usize>, right: Vec<usize> },
    /// A matrix that must represent a state has a forbidden negative
    /// eigenvalue.
    #[error("not a physical state: min eigenvalue {min_eig:.3e} < -{tol:.3e}")]
    NonPhysical { min_eig: f64, tol: f64 },
    /// A matrix that must be Hermitian is not.
    #[error("matrix is not Hermitian: max |M - M^dagger| entry is {defect:.3e}")]
    NotHermitian { defect: f64 },
    /// A matrix that must have unit trace does not.
    #[error("trace {trace} differs from 1 by more than {tol:.1e}")]
    BadTrace { trace: f64, tol: f64 },
    /// Amplitude storage does not match the declared layout.
    #[error("amplitude length {len} does not match layout {dims:?}")]
    BadLength { len: usize, dims: Vec<usize> },
}

pub type FockResult<T> = Result<T, FockError>;

/// Truncation policy shared by all constructors.
///
/// `dim` is the number of Fock levels kept per CV mode, `norm_tol` bounds
/// the pre-renormalization weight a constructor may silently discard, and
/// `psd_tol` bounds the negative-eigenvalue mass tolerated before a matrix
/// is rejected as unphysical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    pub dim: usize,
    pub norm_tol: f64,
    pub psd_tol: f64,
}

impl TruncationPolicy {
    /// Policy with the given dimension and default tolerances.
    pub fn new(dim: usize) -> FockResult<Self> {
        Self {
            dim,
            norm_tol: DEFAULT_NORM_TOL,
            psd_tol: DEFAULT_PSD_TOL,
        }
        .validated()
    }

    pub fn with_norm_tol(mut self, norm_tol: f64) -> FockResult<Self> {
        self.norm_tol = norm_tol;
        self.validated()
    }

    pub fn with_psd_tol(mut self, psd_tol: f64) -> FockResult<Self> {
        self.psd_tol = psd_tol;
        self.validated()
    }

    fn validated(self) -> FockResult<Self> {
        if self.dim < 2 {
            return Err(FockError::Domain(format!(
                "truncation dimension must be at least 2, got {}",
                self.dim
            )));
        }
        if !(self.norm_tol > 0.0 && self.norm_tol <= 1e-6) {
            return Err(FockError::Domain(format!(
                "norm_tol must lie in (0, 1e-6], got {:e}",
                self.norm_tol
            )));
        }
        if !(self.psd_tol >= 0.0) {
            return Err(FockError::Domain(format!(
                "psd_tol must be nonnegative, got {:e}",
                self.psd_tol
            )));
        }
        Ok(self)
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            dim: DEFAULT_DIM,
            norm_tol: DEFAULT_NORM_TOL,
            psd_tol: DEFAULT_PSD_TOL,
        }
    }
}

// ---------------------------------------------------------------------------
// layout helpers

fn check_dims(dims: &[usize]) -> FockResult<()> {
    if dims.is_empty() || dims.iter().any(|&d| d == 0) {
        return Err(FockError::Domain(format!(
            "mode layout must be nonempty with positive dimensions, got {dims:?}"
        )));
    }
    Ok(())
}

fn total_dim(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// Flat-index strides, first mode slowest.
fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

/// Flat offsets of every joint index of the given modes, enumerated
/// row-major in the order the modes are listed. Offsets from disjoint mode
/// sets add up to full flat indices.
fn mode_offsets(modes: &[usize], dims: &[usize]) -> Vec<usize> {
    let s = strides(dims);
    let mut offsets = vec![0usize];
    for &m in modes {
        let mut next = Vec::with_capacity(offsets.len() * dims[m]);
        for &base in &offsets {
            for k in 0..dims[m] {
                next.push(base + k * s[m]);
            }
        }
        offsets = next;
    }
    offsets
}

fn check_mode_subset(modes: &[usize], n_modes: usize) -> FockResult<()> {
    if modes.is_empty() {
        return Err(FockError::Domain(
            "mode subset must be nonempty".to_string(),
        ));
    }
    for (i, &m) in modes.iter().enumerate() {
        if m >= n_modes {
            return Err(FockError::Index { mode: m, n_modes });
        }
        if i > 0 && modes[i - 1] >= m {
            return Err(FockError::Domain(format!(
                "mode subset must be strictly increasing, got {modes:?}"
            )));
        }
    }
    Ok(())
}

fn complement(modes: &[usize], n_modes: usize) -> Vec<usize> {
    (0..n_modes).filter(|m| !modes.contains(m)).collect()
}

// ---------------------------------------------------------------------------
// pure states

/// A normalized pure state on one or more truncated Fock modes.
#[derive(Debug, Clone)]
pub struct StateVector {
    amps: DVector<C64>,
    dims: Vec<usize>,
    renorm_defect: f64,
}

impl StateVector {
    /// Builds a state from raw amplitudes, normalizing them and recording
    /// |1 − norm²| as the renormalization defect. Fails on layout mismatch
    /// or an effectively zero vector.
    pub fn from_amplitudes(amps: Vec<C64>, dims: Vec<usize>) -> FockResult<Self> {
        check_dims(&dims)?;
        if amps.len() != total_dim(&dims) {
            return Err(FockError::BadLength {
                len: amps.len(),
                dims,
            });
        }
        let v = DVector::from_vec(amps);
        let norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq < 1e-300 {
            return Err(FockError::Domain(
                "cannot normalize an all-zero amplitude vector".to_string(),
            ));
        }
        let defect = (1.0 - norm_sq).abs();
        Ok(Self {
            amps: v.unscale(norm_sq.sqrt()),
            dims,
            renorm_defect: defect,
        })
    }

    /// Fock basis state |n⟩ on a single mode.
    pub fn fock(n: usize, dim: usize) -> FockResult<Self> {
        if dim < 1 || n >= dim {
            return Err(FockError::Domain(format!(
                "Fock level {n} does not fit in dimension {dim}"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[n] = C64::new(1.0, 0.0);
        Self::from_amplitudes(amps, vec![dim])
    }

    /// Single-mode vacuum.
    pub fn vacuum(dim: usize) -> FockResult<Self> {
        Self::fock(0, dim)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_modes(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.len() == 0
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    /// Weight discarded by truncation before the final renormalization.
    pub fn renorm_defect(&self) -> f64 {
        self.renorm_defect
    }

    /// Overrides the recorded defect; constructors use this when a better
    /// truncation estimate exists than the raw norm (e.g. ideal-state tail
    /// weight, or the combined defects of tensor factors).
    pub(crate) fn set_renorm_defect(&mut self, defect: f64) {
        self.renorm_defect = defect;
    }

    /// Amplitude at a joint Fock index, one entry per mode.
    pub fn amp(&self, multi: &[usize]) -> FockResult<C64> {
        Ok(self.amps[self.flat_index(multi)?])
    }

    fn flat_index(&self, multi: &[usize]) -> FockResult<usize> {
        if multi.len() != self.dims.len() {
            return Err(FockError::LayoutMismatch {
                left: multi.iter().map(|&x| x).collect(),
                right: self.dims.clone(),
            });
        }
        let s = strides(&self.dims);
        let mut idx = 0usize;
        for (k, (&i, &d)) in multi.iter().zip(self.dims.iter()).enumerate() {
            if i >= d {
                return Err(FockError::Domain(format!(
                    "Fock index {i} out of range for mode {k} of dimension {d}"
                )));
            }
            idx += i * s[k];
        }
        Ok(idx)
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// Inner product ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> FockResult<C64> {
        self.check_same_layout(other)?;
        Ok(self.amps.dotc(&other.amps))
    }

    /// Squared overlap |⟨self|other⟩|².
    pub fn overlap_sq(&self, other: &Self) -> FockResult<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    fn check_same_layout(&self, other: &Self) -> FockResult<()> {
        if self.dims != other.dims {
            return Err(FockError::LayoutMismatch {
                left: self.dims.clone(),
                right: other.dims.clone(),
            });
        }
        Ok(())
    }

    /// Kronecker product; the layout is the concatenation of both layouts.
    pub fn tensor(&self, other: &Self) -> Self {
        let amps = self.amps.kronecker(&other.amps);
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            amps,
            dims,
            renorm_defect: self.renorm_defect + other.renorm_defect,
        }
    }

    /// Projector |self⟩⟨self| as a density matrix.
    pub fn to_density_matrix(&self) -> DensityMatrix {
        DensityMatrix {
            mat: &self.amps * self.amps.adjoint(),
            dims: self.dims.clone(),
        }
    }

    /// Reduced density matrix on `keep` (strictly increasing mode indices),
    /// contracting the complementary modes directly from the pure state
    /// without materializing the full density matrix.
    pub fn reduced_density_matrix(&self, keep: &[usize]) -> FockResult<DensityMatrix> {
        check_mode_subset(keep, self.n_modes())?;
        let traced = complement(keep, self.n_modes());
        let keep_offsets = mode_offsets(keep, &self.dims);
        let traced_offsets = mode_offsets(&traced, &self.dims);
        let k = keep_offsets.len();
        let mut mat = DMatrix::from_element(k, k, C64::new(0.0, 0.0));
        for &ot in &traced_offsets {
            for (a, &oa) in keep_offsets.iter().enumerate() {
                let va = self.amps[oa + ot];
                if va.norm_sqr() == 0.0 {
                    continue;
                }
                for (b, &ob) in keep_offsets.iter().enumerate() {
                    mat[(a, b)] += va * self.amps[ob + ot].conj();
                }
            }
        }
        Ok(DensityMatrix {
            mat,
            dims: keep.iter().map(|&m| self.dims[m]).collect(),
        })
    }
}

// ---------------------------------------------------------------------------
// state constructors

/// Coherent state |α⟩ truncated to `policy.dim` levels.
///
/// Amplitudes follow c_n = e^{−|α|²/2} α^n/√(n!), computed by the stable
/// recurrence c_{n+1} = c_n α/√(n+1). A comfortable sizing heuristic is
/// |α|² + 5|α| + 10 ≲ dim; the hard check is on the actual discarded tail.
pub fn coherent_ket(alpha: C64, policy: TruncationPolicy) -> FockResult<StateVector> {
    let policy = policy.validated()?;
    let amps = coherent_amplitudes(alpha, policy.dim);
    let kept: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    let defect = (1.0 - kept).max(0.0);
    if defect >= policy.norm_tol {
        return Err(FockError::Truncation {
            context: "coherent_ket",
            defect,
            tol: policy.norm_tol,
        });
    }
    StateVector::from_amplitudes(amps, vec![policy.dim])
}

fn coherent_amplitudes(alpha: C64, dim: usize) -> Vec<C64> {
    let mut amps = Vec::with_capacity(dim);
    let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..dim {
        amps.push(c);
        c *= alpha / C64::new(((n + 1) as f64).sqrt(), 0.0);
    }
    amps
}

/// Cat-state parity: even is (|α⟩ + |−α⟩)/N₊, odd is (|α⟩ − |−α⟩)/N₋.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CatParity {
    Even,
    Odd,
}

/// Normalization constant N± = √(2(1 ± e^{−2α₀²})) of the cat states.
pub fn cat_norm(alpha0: f64, parity: CatParity) -> f64 {
    let overlap = (-2.0 * alpha0 * alpha0).exp();
    match parity {
        CatParity::Even => (2.0 * (1.0 + overlap)).sqrt(),
        CatParity::Odd => (2.0 * (1.0 - overlap)).sqrt(),
    }
}

/// Schrodinger cat state (|α₀⟩ ± |−α₀⟩)/N± with real α₀ ≥ 0.
///
/// The even (odd) cat populates only even (odd) Fock levels; the opposite
/// parity amplitudes are exactly zero by construction.
pub fn cat_ket(alpha0: f64, parity: CatParity, policy: TruncationPolicy) -> FockResult<StateVector> {
    let policy = policy.validated()?;
    if alpha0 < 0.0 || !alpha0.is_finite() {
        return Err(FockError::Domain(format!(
            "cat amplitude must be a finite nonnegative real, got {alpha0}"
        )));
    }
    if parity == CatParity::Odd && alpha0 == 0.0 {
        return Err(FockError::DegenerateCat);
    }
    let coh = coherent_amplitudes(C64::new(alpha0, 0.0), policy.dim);
    let keep_even = parity == CatParity::Even;
    // Exact norm of |α⟩ ± |−α⟩ restricted to the kept parity sector.
    let full_norm_sq = f64::powi(cat_norm(alpha0, parity), 2);
    let mut amps = vec![C64::new(0.0, 0.0); policy.dim];
    let mut kept = 0.0;
    for (n, &c) in coh.iter().enumerate() {
        if (n % 2 == 0) == keep_even {
            let a = 2.0 * c.re; // real α₀ makes every coherent amplitude real
            amps[n] = C64::new(a, 0.0);
            kept += a * a;
        }
    }
    let defect = (1.0 - kept / full_norm_sq).max(0.0);
    if defect >= policy.norm_tol {
        return Err(FockError::Truncation {
            context: "cat_ket",
            defect,
            tol: policy.norm_tol,
        });
    }
    StateVector::from_amplitudes(amps, vec![policy.dim])
}

/// Squeezed Fock state S(s)|n⟩ for n in {0, 1}, with the squeezing
/// operator S(s) = exp{(s/2)(a†² − a²)}.
///
/// The unitary is realized as the matrix exponential of the truncated
/// generator (exact to rounding for states supported well below `dim`);
/// the reported defect is the closed-form weight of the ideal state beyond
/// the truncation, and construction fails when it reaches `norm_tol`.
pub fn squeezed_fock_ket(s: f64, n: usize, policy: TruncationPolicy) -> FockResult<StateVector> {
    let policy = policy.validated()?;
    if n > 1 {
        return Err(FockError::Domain(format!(
            "squeezed Fock constructor supports n in {{0, 1}}, got {n}"
        )));
    }
    if !(s.is_finite() && s.abs() < 2.0) {
        return Err(FockError::Domain(format!(
            "squeezing parameter must satisfy |s| < 2 for a trustworthy truncated exponential, got {s}"
        )));
    }
    let defect = squeezed_fock_tail(s, n, policy.dim);
    if defect >= policy.norm_tol {
        return Err(FockError::Truncation {
            context: "squeezed_fock_ket",
            defect,
            tol: policy.norm_tol,
        });
    }
    let u = squeeze_matrix(s, policy.dim);
    let amps: Vec<C64> = u.column(n).iter().copied().collect();
    let mut state = StateVector::from_amplitudes(amps, vec![policy.dim])?;
    // The truncated generator exponential is exactly unitary, so the norm
    // carries no truncation signal; record the ideal-tail weight instead.
    state.renorm_defect = defect;
    Ok(state)
}

/// Ideal-state weight of S(s)|n⟩ beyond the first `dim` Fock levels.
///
/// |⟨2m|S(s)|0⟩|² = tanh^{2m}(s) C(2m, m)/4^m / cosh(s) and
/// |⟨2m+1|S(s)|1⟩|² = tanh^{2m}(s) C(2m, m)(2m + 1)/4^m / cosh³(s).
fn squeezed_fock_tail(s: f64, n: usize, dim: usize) -> f64 {
    let t2 = s.tanh() * s.tanh();
    let cosh = s.cosh();
    let mut kept = 0.0;
    // term_m = tanh^{2m} C(2m, m)/4^m
    let mut term: f64 = 1.0;
    let mut m = 0usize;
    loop {
        let level = 2 * m + n;
        if level >= dim {
            break;
        }
        kept += match n {
            0 => term / cosh,
            _ => term * (2.0 * m as f64 + 1.0) / cosh.powi(3),
        };
        term *= t2 * (2.0 * m as f64 + 1.0) / (2.0 * m as f64 + 2.0);
        m += 1;
    }
    (1.0 - kept).max(0.0)
}

/// Two-mode squeezed vacuum with Schmidt weights
/// c_n = (−e^{iφ} tanh r)^n / cosh r on |n, n⟩.
///
/// The discarded weight is exactly tanh(r)^{2 dim}.
pub fn tmsv_ket(r: f64, phi: f64, policy: TruncationPolicy) -> FockResult<StateVector> {
    let policy = policy.validated()?;
    if !(r >= 0.0 && r.is_finite()) {
        return Err(FockError::Domain(format!(
            "TMSV squeezing must be a finite nonnegative real, got {r}"
        )));
    }
    let defect = r.tanh().powi(2 * policy.dim as i32);
    if defect >= policy.norm_tol {
        return Err(FockError::Truncation {
            context: "tmsv_ket",
            defect,
            tol: policy.norm_tol,
        });
    }
    let dim = policy.dim;
    let ratio = -C64::from_polar(r.tanh(), phi);
    let mut amps = vec![C64::new(0.0, 0.0); dim * dim];
    let mut c = C64::new(1.0 / r.cosh(), 0.0);
    for n in 0..dim {
        amps[n * dim + n] = c;
        c *= ratio;
    }
    StateVector::from_amplitudes(amps, vec![dim, dim])
}

// ---------------------------------------------------------------------------
// operator helpers

/// Eigendecomposition of a (nominally) Hermitian matrix; the input is
/// symmetrized as (M + M†)/2 first. Returns ascending eigenvalues and the
/// matching eigenvector columns.
pub fn hermitian_eigensystem(m: &DMatrix<C64>) -> (DVector<f64>, DMatrix<C64>) {
    let h = (m + m.adjoint()).scale(0.5);
    let n = h.nrows();
    let fm = faer::Mat::from_fn(n, n, |i, j| h[(i, j)]);
    let evd = fm
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("self-adjoint eigendecomposition did not converge");
    let s = evd.S();
    let u = evd.U();
    let vals = DVector::from_iterator(n, (0..n).map(|i| s[i].re));
    let vecs = DMatrix::from_fn(n, n, |i, j| u[(i, j)]);
    (vals, vecs)
}

/// exp(G) for an anti-Hermitian generator G, via the eigensystem of the
/// Hermitian matrix iG.
fn unitary_from_antihermitian(g: &DMatrix<C64>) -> DMatrix<C64> {
    let h = g * C64::i();
    let (vals, vecs) = hermitian_eigensystem(&h);
    let phases = DMatrix::from_diagonal(&DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&l| C64::from_polar(1.0, -l)),
    ));
    &vecs * phases * vecs.adjoint()
}

/// Single-mode squeezing unitary S(s) = exp{(s/2)(a†² − a²)} on `dim`
/// truncated levels.
pub fn squeeze_matrix(s: f64, dim: usize) -> DMatrix<C64> {
    let mut g = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    for n in 0..dim.saturating_sub(2) {
        // ⟨n+2|a†²|n⟩ = √((n+1)(n+2))
        let v = 0.5 * s * (((n + 1) * (n + 2)) as f64).sqrt();
        g[(n + 2, n)] = C64::new(v, 0.0);
        g[(n, n + 2)] = C64::new(-v, 0.0);
    }
    unitary_from_antihermitian(&g)
}

/// Displacement operator D(β) = exp(β a† − β* a) on `dim` truncated levels,
/// assembled from the exact displaced-number matrix elements
/// ⟨m|D(β)|n⟩ = √(n!/m!) β^{m−n} e^{−|β|²/2} L_n^{(m−n)}(|β|²) for m ≥ n
/// (and the conjugate-reflected form for m < n), so each entry equals the
/// untruncated operator's element.
pub fn displacement_matrix(beta: C64, dim: usize) -> DMatrix<C64> {
    let x = beta.norm_sqr();
    let pref = (-0.5 * x).exp();
    DMatrix::from_fn(dim, dim, |m, n| {
        let (lo, hi) = (m.min(n), m.max(n));
        let k = hi - lo;
        let mut fac = 1.0;
        for j in (lo + 1)..=hi {
            fac *= j as f64;
        }
        let scale = pref * assoc_laguerre(lo, k, x) / fac.sqrt();
        let amp = if m >= n {
            beta.powu(k as u32)
        } else {
            (-beta.conj()).powu(k as u32)
        };
        amp * scale
    })
}

/// Associated Laguerre polynomial L_n^{(k)}(x) by the three-term recurrence.
fn assoc_laguerre(n: usize, k: usize, x: f64) -> f64 {
    let kf = k as f64;
    let mut prev = 1.0; // L_0
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + kf - x; // L_1
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + kf + 1.0 - x) * cur - (jf + kf) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Rows 0..=n of Pascal's triangle in f64.
fn pascal_triangle(n: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let mut row = vec![1.0; m + 1];
        for k in 1..m {
            row[k] = rows[m - 1][k - 1] + rows[m - 1][k];
        }
        rows.push(row);
    }
    rows
}

/// Single coefficient ⟨k, m+n−k|U|m, n⟩ of the beam splitter, from the
/// binomial expansion of (t a†_i + r a†_j)^m (t a†_j − r a†_i)^n acting on
/// vacuum. Accurate for the tested regime (one mode near vacuum, or photon
/// numbers up to a few tens); both modes highly excited at once costs
/// precision to the alternating sum.
fn bs_coefficient(m: usize, n: usize, k: usize, t: f64, r: f64, binom: &[Vec<f64>]) -> f64 {
    let ntot = m + n;
    let p_lo = k.saturating_sub(n);
    let p_hi = m.min(k);
    let mut sum = 0.0;
    for p in p_lo..=p_hi {
        let q = p + n - k;
        let sign = if (k - p) % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign
            * binom[m][p]
            * binom[n][q]
            * t.powi((2 * p + n - k) as i32)
            * r.powi((m + k - 2 * p) as i32);
    }
    sum * (binom[ntot][m] / binom[ntot][k]).sqrt()
}

/// Applies the beam splitter of transmissivity T between two equal-dimension
/// modes of a multi-mode pure state.
///
/// Photon pairs exceeding the shared truncation are discarded; the function
/// fails if that loss reaches [`BEAM_SPLITTER_NORM_TOL`], and otherwise
/// renormalizes, adding the loss to the state's recorded defect. Mixing any
/// state with a vacuum ancilla is exact.
pub fn beam_splitter_apply(
    state: &StateVector,
    modes: (usize, usize),
    transmissivity: f64,
) -> FockResult<StateVector> {
    let (i, j) = modes;
    let n_modes = state.n_modes();
    if i >= n_modes {
        return Err(FockError::Index {
            mode: i,
            n_modes,
        });
    }
    if j >= n_modes {
        return Err(FockError::Index {
            mode: j,
            n_modes,
        });
    }
    if i == j {
        return Err(FockError::Domain(
            "beam splitter modes must be distinct".to_string(),
        ));
    }
    if state.dims[i] != state.dims[j] {
        return Err(FockError::Domain(format!(
            "beam splitter modes must share a dimension, got {} and {}",
            state.dims[i], state.dims[j]
        )));
    }
    if !(0.0..=1.0).contains(&transmissivity) {
        return Err(FockError::Domain(format!(
            "transmissivity must lie in [0, 1], got {transmissivity}"
        )));
    }
    let d = state.dims[i];
    let s = strides(&state.dims);
    let (si, sj) = (s[i], s[j]);
    let t = transmissivity.sqrt();
    let r = (1.0 - transmissivity).sqrt();
    let binom = pascal_triangle(2 * d - 2);
    let mut out = vec![C64::new(0.0, 0.0); state.len()];
    for idx in 0..state.len() {
        let a = state.amps[idx];
        if a.norm_sqr() == 0.0 {
            continue;
        }
        let m = (idx / si) % d;
        let n = (idx / sj) % d;
        let base = idx - m * si - n * sj;
        let ntot = m + n;
        for k in 0..=ntot {
            let l = ntot - k;
            if k >= d || l >= d {
                continue; // truncated away; accounted for by the norm check
            }
            let c = bs_coefficient(m, n, k, t, r, &binom);
            out[base + k * si + l * sj] += a * C64::new(c, 0.0);
        }
    }
    let norm_sq: f64 = out.iter().map(|z| z.norm_sqr()).sum();
    let defect = (1.0 - norm_sq).max(0.0);
    if defect >= BEAM_SPLITTER_NORM_TOL {
        return Err(FockError::Truncation {
            context: "beam_splitter_apply",
            defect,
            tol: BEAM_SPLITTER_NORM_TOL,
        });
    }
    let mut result = StateVector::from_amplitudes(out, state.dims.clone())?;
    result.renorm_defect = state.renorm_defect + defect;
    Ok(result)
}

// ---------------------------------------------------------------------------
// density matrices

/// A Hermitian, unit-trace operator on a multi-mode truncated Fock space.
///
/// Positivity is not enforced at construction (partial transposes are
/// representable on purpose); [`DensityMatrix::validate_physical`] and the
/// fidelity routines check it where it matters.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: DMatrix<C64>,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates Hermiticity (entrywise, within [`HERMITICITY_TOL`]) and
    /// unit trace (within [`STATE_TRACE_TOL`]), then stores the symmetrized
    /// matrix without rescaling it.
    pub fn from_matrix(mat: DMatrix<C64>, dims: Vec<usize>) -> FockResult<Self> {
        check_dims(&dims)?;
        let n = total_dim(&dims);
        if mat.nrows() != n || mat.ncols() != n {
            return Err(FockError::BadLength {
                len: mat.nrows().max(mat.ncols()),
                dims,
            });
        }
        let herm_defect = (&mat - mat.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if herm_defect > HERMITICITY_TOL {
            return Err(FockError::NotHermitian {
                defect: herm_defect,
            });
        }
        let mat = (&mat + mat.adjoint()).scale(0.5);
        let trace = mat.trace().re;
        if (trace - 1.0).abs() > STATE_TRACE_TOL {
            return Err(FockError::BadTrace {
                trace,
                tol: STATE_TRACE_TOL,
            });
        }
        Ok(Self { mat, dims })
    }

    /// Projector onto a pure state.
    pub fn from_pure(psi: &StateVector) -> Self {
        psi.to_density_matrix()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_modes(&self) -> usize {
        self.dims.len()
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// Entry at a (row, column) pair of joint Fock indices.
    pub fn entry(&self, row: &[usize], col: &[usize]) -> FockResult<C64> {
        let probe = StateVector {
            amps: DVector::from_element(total_dim(&self.dims), C64::new(0.0, 0.0)),
            dims: self.dims.clone(),
            renorm_defect: 0.0,
        };
        let r = probe.flat_index(row)?;
        let c = probe.flat_index(col)?;
        Ok(self.mat[(r, c)])
    }

    /// Kronecker product; the layout is the concatenation of both layouts.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            mat: self.mat.kronecker(&other.mat),
            dims,
        }
    }

    /// Partial trace keeping the listed modes (strictly increasing).
    pub fn partial_trace(&self, keep: &[usize]) -> FockResult<Self> {
        check_mode_subset(keep, self.n_modes())?;
        let traced = complement(keep, self.n_modes());
        let keep_offsets = mode_offsets(keep, &self.dims);
        let traced_offsets = mode_offsets(&traced, &self.dims);
        let k = keep_offsets.len();
        let mut mat = DMatrix::from_element(k, k, C64::new(0.0, 0.0));
        for &ot in &traced_offsets {
            for (a, &oa) in keep_offsets.iter().enumerate() {
                for (b, &ob) in keep_offsets.iter().enumerate() {
                    mat[(a, b)] += self.mat[(oa + ot, ob + ot)];
                }
            }
        }
        Ok(Self {
            mat,
            dims: keep.iter().map(|&m| self.dims[m]).collect(),
        })
    }

    /// Transposes the given mode's indices, leaving the others untouched.
    /// The result stays Hermitian and unit-trace but may have negative
    /// eigenvalues; that spectrum is what [`Self::log_negativity`] reads.
    pub fn partial_transpose(&self, mode: usize) -> FockResult<Self> {
        if mode >= self.n_modes() {
            return Err(FockError::Index {
                mode,
                n_modes: self.n_modes(),
            });
        }
        let s = strides(&self.dims);
        let d = self.dims[mode];
        let st = s[mode];
        let n = self.mat.nrows();
        let mut mat = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        for row in 0..n {
            let m = (row / st) % d;
            let row_rest = row - m * st;
            for col in 0..n {
                let k = (col / st) % d;
                let col_rest = col - k * st;
                mat[(row_rest + k * st, col_rest + m * st)] = self.mat[(row, col)];
            }
        }
        Ok(Self {
            mat,
            dims: self.dims.clone(),
        })
    }

    /// Eigenvalues of the (Hermitian) matrix, ascending.
    pub fn eigenvalues(&self) -> DVector<f64> {
        hermitian_eigensystem(&self.mat).0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Confirms the smallest eigenvalue is above −psd_tol.
    pub fn validate_physical(&self, psd_tol: f64) -> FockResult<()> {
        let min_eig = self.min_eigenvalue();
        if min_eig < -psd_tol {
            return Err(FockError::NonPhysical {
                min_eig,
                tol: psd_tol,
            });
        }
        Ok(())
    }

    /// Logarithmic negativity log₂(1 + 2 E_N) across the bipartition that
    /// separates `left_modes` from the rest, where E_N is the absolute sum
    /// of the negative eigenvalues of the partial transpose.
    pub fn log_negativity(&self, left_modes: &[usize]) -> FockResult<f64> {
        check_mode_subset(left_modes, self.n_modes())?;
        if left_modes.len() == self.n_modes() {
            return Err(FockError::Domain(
                "bipartition must leave at least one mode on each side".to_string(),
            ));
        }
        let mut pt = self.clone();
        for &m in left_modes {
            pt = pt.partial_transpose(m)?;
        }
        let neg: f64 = pt
            .eigenvalues()
            .iter()
            .map(|&l| if l < 0.0 { -l } else { 0.0 })
            .sum();
        Ok((1.0 + 2.0 * neg).log2())
    }
}

// ---------------------------------------------------------------------------
// metrics

/// Uhlmann fidelity F(ρ, σ) = (Tr √(√ρ σ √ρ))² with the default
/// negative-eigenvalue tolerance.
pub fn uhlmann_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> FockResult<f64> {
    uhlmann_fidelity_with_tol(rho, sigma, DEFAULT_PSD_TOL)
}

/// Uhlmann fidelity with an explicit tolerance on negative eigenvalues.
///
/// Both arguments are eigendecomposed; eigenvalues below −psd_tol reject the
/// state, smaller negatives are clamped to zero before the square roots.
/// Equals ⟨ψ|σ|ψ⟩ when ρ = |ψ⟩⟨ψ| is pure.
pub fn uhlmann_fidelity_with_tol(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    psd_tol: f64,
) -> FockResult<f64> {
    if rho.dims != sigma.dims {
        return Err(FockError::LayoutMismatch {
            left: rho.dims.clone(),
            right: sigma.dims.clone(),
        });
    }
    // With root factors A satisfying A A† = state (columns u_i √λ_i over the
    // eigenvalues above the rank floor), Tr sqrt(sqrt(rho) sigma sqrt(rho))
    // is the nuclear norm of the small core matrix A_rho† A_sigma.  Working
    // on the floored ranks keeps the eigensolver away from the hyper
    // degenerate n×n products that derail it, and a pure reference needs no
    // solver at all (the core is a single column).
    let a_rho = psd_root_factor(&rho.mat, psd_tol)?;
    let a_sigma = psd_root_factor(&sigma.mat, psd_tol)?;
    let core = a_rho.adjoint() * a_sigma;
    let root_sum = nuclear_norm(&core);
    Ok((root_sum * root_sum).clamp(0.0, 1.0))
}

/// Factor A with A A† equal to the positive part of a PSD matrix, one
/// column u_i √λ_i per eigenvalue above the rank floor.  Eigenvalues at the
/// solver noise level (eps times the largest) are artifacts of exact rank
/// deficiency and are dropped; anything below -psd_tol is rejected.
fn psd_root_factor(m: &DMatrix<C64>, psd_tol: f64) -> FockResult<DMatrix<C64>> {
    let (vals, vecs) = hermitian_eigensystem(m);
    if vals[0] < -psd_tol {
        return Err(FockError::NonPhysical {
            min_eig: vals[0],
            tol: psd_tol,
        });
    }
    let n = m.nrows();
    let floor = vals[n - 1].max(0.0) * n as f64 * f64::EPSILON;
    let kept: Vec<usize> = (0..n).filter(|&i| vals[i] > floor).collect();
    let mut factor = DMatrix::<C64>::zeros(n, kept.len());
    for (j, &i) in kept.iter().enumerate() {
        factor
            .column_mut(j)
            .copy_from(&(vecs.column(i) * C64::new(vals[i].sqrt(), 0.0)));
    }
    Ok(factor)
}

/// Sum of singular values.  Single-column and single-row matrices reduce to
/// the Frobenius norm; otherwise the singular values come from the Hermitian
/// eigenvalues of the smaller Gram matrix, with solver noise floored.
fn nuclear_norm(c: &DMatrix<C64>) -> f64 {
    let (rows, cols) = c.shape();
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    if rows == 1 || cols == 1 {
        return c.norm();
    }
    let gram = if cols <= rows {
        c.adjoint() * c
    } else {
        c * c.adjoint()
    };
    let (vals, _) = hermitian_eigensystem(&gram);
    let floor = vals[vals.len() - 1].max(0.0) * gram.nrows() as f64 * f64::EPSILON;
    vals.iter()
        .map(|&l| if l <= floor { 0.0 } else { l.sqrt() })
        .sum()
}

/// Fidelity ⟨ψ|ρ|ψ⟩ of a state against a pure reference.
pub fn fidelity_with_pure(rho: &DensityMatrix, psi: &StateVector) -> FockResult<f64> {
    if rho.dims != psi.dims {
        return Err(FockError::LayoutMismatch {
            left: rho.dims.clone(),
            right: psi.dims.clone(),
        });
    }
    let v = (&rho.mat * &psi.amps).dotc(&psi.amps).conj();
    Ok(v.re.clamp(0.0, 1.0))
}

/// Trace distance (1/2) Σ |λ_i(ρ − σ)|.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> FockResult<f64> {
    if rho.dims != sigma.dims {
        return Err(FockError::LayoutMismatch {
            left: rho.dims.clone(),
            right: sigma.dims.clone(),
        });
    }
    let diff = &rho.mat - &sigma.mat;
    let (vals, _) = hermitian_eigensystem(&diff);
    Ok(0.5 * vals.iter().map(|l| l.abs()).sum::<f64>())
}
