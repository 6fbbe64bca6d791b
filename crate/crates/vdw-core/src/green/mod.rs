//! Retarded dyadic photon propagator in a homogeneous isotropic medium and
//! its closed-time-path components at finite temperature.
//!
//! The tensor between distinct points r ≠ r′ is
//!
//!   G(ω) = (ω²/c²)(e^{ikr}/r)[(1 + i/kr − 1/k²r²)𝟙 − (1 + 3i/kr − 3/k²r²) r̂⊗r̂],
//!
//! with k = √(εμ)·ω/c and r̂ the unit separation.  The δ(r) contact term is
//! omitted, and the divergent real part at coincidence (the unrenormalized
//! single-atom shift) is not represented — only Im G(ω, r, r), which stays
//! finite and carries the decay rates.  Small-kr evaluations switch to a
//! power series so the transverse/longitudinal scalars stay accurate deep in
//! the near zone.

mod medium;

pub use medium::{Medium, MediumModel, PermittivityTable};

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use thiserror::Error;

use crate::atom::TwoLevelAtom;

#[derive(Debug, Error)]
pub enum GreenError {
    #[error("coincident points: use the dedicated coincidence-limit operation")]
    CoincidentPoints,
    #[error("retarded propagator requires Im ω ≥ 0, got {0}")]
    LowerHalfPlaneFrequency(Complex64),
    #[error("tabulated permittivity cannot be continued to the imaginary axis")]
    UnsupportedOnImaginaryAxis,
    #[error("frequency {omega:e} outside tabulated range [{min:e}, {max:e}]")]
    OutsideTable { omega: f64, min: f64, max: f64 },
    #[error("unsupported medium model: {0}")]
    UnsupportedModel(String),
    #[error("invalid permittivity table: {0}")]
    InvalidTable(String),
    #[error("constant permittivity must be real and ≥ 1, got {0:e}")]
    InvalidPermittivity(f64),
    #[error("temperature must be ≥ 0, got {0:e}")]
    NegativeTemperature(f64),
    #[error("thermal occupation is singular at ω = 0 for T > 0")]
    ZeroFrequencySingularity,
    #[error("coincidence limit requires ω > 0, got {0:e}")]
    NonPositiveFrequency(f64),
    #[error("mode frequency hit: ω = {0:e} coincides with a field mode")]
    ModeResonance(f64),
}

/// Dyadic propagator value between two points, in units ω²/(c²·length).
/// Symmetric under simultaneous transposition and endpoint exchange
/// (reciprocity) and a function of the separation only.
pub type DyadicGreen = Matrix3<Complex64>;

/// Thermal occupation n̄(ω) = 1/(e^{βω} − 1), stable for large |βω|.
/// Negative arguments give the analytic continuation n̄(−ω) = −1 − n̄(ω).
pub fn bose_occupation(beta_omega: f64) -> f64 {
    1.0 / beta_omega.exp_m1()
}

/// coth(βω/2) through the identity coth(βω/2) = 1 + 2 n̄(ω); exact for large
/// arguments where the naive ratio of exponentials overflows.
pub fn coth_half(beta_omega: f64) -> f64 {
    1.0 + 2.0 / beta_omega.exp_m1()
}

// Transverse scalar e^{ix}(1 + i/x − 1/x²); the closed form loses the 1/x
// terms to cancellation at small |x|, so switch to the series
// −1/x² + Σ_m c_m (ix)^m, c_m = 1/m! − 1/(m+1)! + 1/(m+2)!.
fn transverse_scalar(x: Complex64) -> Complex64 {
    if x.norm_sqr() < 0.25 {
        let y = Complex64::i() * x;
        let mut sum = Complex64::default();
        let mut power = Complex64::new(1.0, 0.0);
        let mut fact = 1.0f64; // m!
        for m in 0..22u32 {
            let f1 = fact; // m!
            let f2 = f1 * (m as f64 + 1.0); // (m+1)!
            let f3 = f2 * (m as f64 + 2.0); // (m+2)!
            sum += power * (1.0 / f1 - 1.0 / f2 + 1.0 / f3);
            power *= y;
            fact = f2;
        }
        sum - 1.0 / (x * x)
    } else {
        (Complex64::i() * x).exp() * (1.0 + Complex64::i() / x - 1.0 / (x * x))
    }
}

// Longitudinal scalar e^{ix}(2/x² − 2i/x) = 2/x² + Σ_m d_m (ix)^m,
// d_m = 2[1/(m+1)! − 1/(m+2)!].
fn longitudinal_scalar(x: Complex64) -> Complex64 {
    if x.norm_sqr() < 0.25 {
        let y = Complex64::i() * x;
        let mut sum = Complex64::default();
        let mut power = Complex64::new(1.0, 0.0);
        let mut fact = 1.0f64;
        for m in 0..22u32 {
            let f2 = fact * (m as f64 + 1.0);
            let f3 = f2 * (m as f64 + 2.0);
            sum += power * 2.0 * (1.0 / f2 - 1.0 / f3);
            power *= y;
            fact = f2;
        }
        sum + 2.0 / (x * x)
    } else {
        (Complex64::i() * x).exp() * (2.0 / (x * x) - Complex64::new(0.0, 2.0) / x)
    }
}

/// Retarded dyadic propagator between distinct points.
///
/// `omega` may sit anywhere in the closed upper half plane; negative real
/// frequencies are evaluated through the reality condition G(−ω) = G(ω)*.
pub fn green_retarded(
    omega: Complex64,
    r_to: &Vector3<f64>,
    r_from: &Vector3<f64>,
    medium: &Medium,
) -> Result<DyadicGreen, GreenError> {
    if omega.im < 0.0 {
        return Err(GreenError::LowerHalfPlaneFrequency(omega));
    }
    if omega.im == 0.0 && omega.re < 0.0 {
        let g = green_retarded(-omega, r_to, r_from, medium)?;
        return Ok(g.map(|v| v.conj()));
    }
    let sep = r_to - r_from;
    let r = sep.norm();
    if r == 0.0 {
        return Err(GreenError::CoincidentPoints);
    }
    if !r.is_finite() {
        return Err(GreenError::UnsupportedModel("non-finite separation".into()));
    }
    let rhat = sep / r;
    let k = medium.wavevector(omega)?;
    let x = k * r;
    let c = medium.c();
    let prefactor = omega * omega / (c * c) / r;

    let p = transverse_scalar(x) * prefactor;
    let l = longitudinal_scalar(x) * prefactor;

    let mut g = Matrix3::from_diagonal_element(p);
    let dl = l - p;
    for i in 0..3 {
        for j in 0..3 {
            g[(i, j)] += dl * (rhat[i] * rhat[j]);
        }
    }
    Ok(g)
}

/// Imaginary part of the propagator at coincidence: (2/3)(ω³/c³)·n(ω)·𝟙.
/// Finite despite the divergent real part; lossless media only.
pub fn green_coincidence_im(omega: f64, medium: &Medium) -> Result<Matrix3<f64>, GreenError> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(GreenError::NonPositiveFrequency(omega));
    }
    let n = medium.lossless_index()?;
    let c = medium.c();
    let diag = 2.0 / 3.0 * omega.powi(3) / c.powi(3) * n;
    Ok(Matrix3::from_diagonal_element(diag))
}

/// Contract a dyadic value with real dipole vectors: d_left · G · d_right.
pub fn contract(g: &DyadicGreen, d_left: &Vector3<f64>, d_right: &Vector3<f64>) -> Complex64 {
    let mut acc = Complex64::default();
    for i in 0..3 {
        for j in 0..3 {
            acc += g[(i, j)] * (d_left[i] * d_right[j]);
        }
    }
    acc
}

/// The five dipole-contracted closed-time-path propagator components at one
/// real frequency and temperature.
#[derive(Debug, Clone, Copy)]
pub struct GreenComponents {
    pub d11: Complex64,
    pub d12: Complex64,
    pub d21: Complex64,
    pub d_r: Complex64,
    pub d_a: Complex64,
    pub frequency: f64,
    pub temperature: f64,
}

/// Build all contracted components from the retarded value:
///
///   D₁₁ = Re D_R + i·coth(βω/2)·Im D_R,
///   D₁₂ = 2i·n̄(ω)·Im D_R,   D₂₁ = −2i·n̄(−ω)·Im D_R,   D_A = D_R*.
///
/// At T = 0 the occupations collapse to n̄(±ω) → ∓θ(∓ω) exactly, with no
/// large-β rounding.
pub fn keldysh_components(
    omega: f64,
    r: &Vector3<f64>,
    r_prime: &Vector3<f64>,
    dipole_b: &Vector3<f64>,
    dipole_a: &Vector3<f64>,
    medium: &Medium,
    temperature: f64,
) -> Result<GreenComponents, GreenError> {
    if !(temperature >= 0.0) || !temperature.is_finite() {
        return Err(GreenError::NegativeTemperature(temperature));
    }
    if temperature > 0.0 && omega == 0.0 {
        return Err(GreenError::ZeroFrequencySingularity);
    }
    let g = green_retarded(Complex64::new(omega, 0.0), r, r_prime, medium)?;
    let d_r = contract(&g, dipole_b, dipole_a);
    let d_a = d_r.conj();
    let im = d_r.im;

    let (n_pos, n_neg) = if temperature == 0.0 {
        if omega > 0.0 {
            (0.0, -1.0)
        } else if omega < 0.0 {
            (-1.0, 0.0)
        } else {
            (0.0, 0.0) // static, Im D_R = 0
        }
    } else {
        let beta_omega = omega / temperature;
        (bose_occupation(beta_omega), bose_occupation(-beta_omega))
    };

    let d11 = Complex64::new(d_r.re, (1.0 + 2.0 * n_pos) * im);
    let d12 = Complex64::new(0.0, 2.0 * n_pos * im);
    let d21 = Complex64::new(0.0, -2.0 * n_neg * im);

    Ok(GreenComponents { d11, d12, d21, d_r, d_a, frequency: omega, temperature })
}

/// A dipole-contracted retarded propagator usable wherever the continuum one
/// is; the finite-mode oracle plugs in here.
pub trait RetardedGreen {
    /// Contracted value at complex frequency (Im z ≥ 0).
    fn dr(&self, z: Complex64) -> Result<Complex64, GreenError>;
    /// Value on the positive imaginary axis: real for every supported model.
    fn dr_imag(&self, xi: f64) -> Result<f64, GreenError>;
    /// Falloff rate in ξ of dr(iξ)² (sets the quadrature transform scale).
    fn falloff_rate(&self) -> f64;
}

/// How the tensor is reduced to a scalar for a pair of atoms.
#[derive(Debug, Clone, Copy)]
pub enum DipoleCoupling {
    /// d_left · G · d_right with the atoms' transition dipoles.
    Fixed { left: Vector3<f64>, right: Vector3<f64> },
    /// Orientation average: (|d_left||d_right|/3)·tr G.
    Isotropic { strength: f64 },
}

/// Contracted continuum propagator between the positions of two atoms.
#[derive(Debug, Clone)]
pub struct AtomPairGreen<'m> {
    medium: &'m Medium,
    r_to: Vector3<f64>,
    r_from: Vector3<f64>,
    coupling: DipoleCoupling,
    rate: f64,
}

impl<'m> AtomPairGreen<'m> {
    /// Propagator from donor `a` to partner `b`, contracted with their
    /// transition dipoles (d_b on the left, d_a on the right).
    pub fn between(
        a: &TwoLevelAtom,
        b: &TwoLevelAtom,
        medium: &'m Medium,
    ) -> Result<Self, GreenError> {
        Self::with_coupling(
            a,
            b,
            medium,
            DipoleCoupling::Fixed { left: b.dipole, right: a.dipole },
        )
    }

    /// Orientation-averaged variant for molecular use.
    pub fn isotropic(
        a: &TwoLevelAtom,
        b: &TwoLevelAtom,
        medium: &'m Medium,
    ) -> Result<Self, GreenError> {
        let strength = a.dipole.norm() * b.dipole.norm();
        Self::with_coupling(a, b, medium, DipoleCoupling::Isotropic { strength })
    }

    pub fn with_coupling(
        a: &TwoLevelAtom,
        b: &TwoLevelAtom,
        medium: &'m Medium,
        coupling: DipoleCoupling,
    ) -> Result<Self, GreenError> {
        let r = (b.position - a.position).norm();
        if r == 0.0 {
            return Err(GreenError::CoincidentPoints);
        }
        let rate = 2.0 * medium.static_index() * r / medium.c();
        Ok(AtomPairGreen { medium, r_to: b.position, r_from: a.position, coupling, rate })
    }

    pub fn separation(&self) -> f64 {
        (self.r_to - self.r_from).norm()
    }

    pub fn medium(&self) -> &Medium {
        self.medium
    }
}

impl RetardedGreen for AtomPairGreen<'_> {
    fn dr(&self, z: Complex64) -> Result<Complex64, GreenError> {
        let g = green_retarded(z, &self.r_to, &self.r_from, self.medium)?;
        Ok(match self.coupling {
            DipoleCoupling::Fixed { left, right } => contract(&g, &left, &right),
            DipoleCoupling::Isotropic { strength } => {
                (g[(0, 0)] + g[(1, 1)] + g[(2, 2)]) * (strength / 3.0)
            }
        })
    }

    fn dr_imag(&self, xi: f64) -> Result<f64, GreenError> {
        Ok(self.dr(Complex64::new(0.0, xi))?.re)
    }

    fn falloff_rate(&self) -> f64 {
        self.rate
    }
}
