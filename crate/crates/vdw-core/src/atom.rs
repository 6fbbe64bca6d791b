//! Two-level-atom response: the closed-time-path polarizability family.
//!
//! All response functions depend on the transition frequency alone.  Ground
//! and excited atoms are related by flipping the sign of that frequency in
//! the time-ordered form, which also flips the overall sign of the retarded
//! form.  The off-diagonal (contour-crossing) response is a pure resonance
//! line; it is carried symbolically as a weight so that downstream integrals
//! evaluate it by residue instead of chasing a near-singular Lorentzian.

use nalgebra::Vector3;
use num_complex::Complex64;
use thiserror::Error;

use crate::quadrature::Pole;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomState {
    Ground,
    Excited,
}

/// A pointlike two-level atom: position, transition frequency ω₀ > 0, real
/// transition dipole, internal state, and an optional spectral linewidth
/// (FWHM) used only when forming lineshape overlaps.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoLevelAtom {
    pub position: Vector3<f64>,
    pub omega: f64,
    pub dipole: Vector3<f64>,
    pub state: AtomState,
    pub linewidth: Option<f64>,
}

impl TwoLevelAtom {
    pub fn new(
        position: Vector3<f64>,
        omega: f64,
        dipole: Vector3<f64>,
        state: AtomState,
    ) -> Result<Self, AtomError> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(AtomError::NonPositiveFrequency(omega));
        }
        if !position.iter().all(|x| x.is_finite()) || !dipole.iter().all(|x| x.is_finite()) {
            return Err(AtomError::NonFiniteField);
        }
        Ok(TwoLevelAtom { position, omega, dipole, state, linewidth: None })
    }

    pub fn with_linewidth(mut self, gamma: f64) -> Result<Self, AtomError> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(AtomError::NegativeLinewidth(gamma));
        }
        self.linewidth = Some(gamma);
        Ok(self)
    }

    pub fn is_excited(&self) -> bool {
        self.state == AtomState::Excited
    }

    pub fn gamma(&self) -> f64 {
        self.linewidth.unwrap_or(0.0)
    }
}

#[derive(Debug, Error)]
pub enum AtomError {
    #[error("transition frequency must be positive and finite, got {0:e}")]
    NonPositiveFrequency(f64),
    #[error("position and dipole components must be finite")]
    NonFiniteField,
    #[error("linewidth must be non-negative and finite, got {0:e}")]
    NegativeLinewidth(f64),
    #[error("broadening must be positive, got {0:e}")]
    NonPositiveBroadening(f64),
}

fn check_eps(eps: f64) -> Result<(), AtomError> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(AtomError::NonPositiveBroadening(eps))
    }
}

/// Time-ordered polarizability at complex frequency with explicit pole
/// broadening.
///
/// Ground state: 1/(ω₀−z−iε) + 1/(ω₀+z−iε); the excited form follows from
/// ω₀ → −ω₀.  The excited version has a pole at z = ω₀ + iε, in the
/// upper-right quadrant.
pub fn alpha_feynman_complex(
    state: AtomState,
    omega_n: f64,
    z: Complex64,
    eps: f64,
) -> Result<Complex64, AtomError> {
    check_eps(eps)?;
    let ieps = Complex64::new(0.0, eps);
    let w = match state {
        AtomState::Ground => omega_n,
        AtomState::Excited => -omega_n,
    };
    Ok(1.0 / (w - z - ieps) + 1.0 / (w + z - ieps))
}

/// [`alpha_feynman_complex`] at real frequency.
pub fn alpha_feynman(
    state: AtomState,
    omega_n: f64,
    omega: f64,
    eps: f64,
) -> Result<Complex64, AtomError> {
    alpha_feynman_complex(state, omega_n, Complex64::new(omega, 0.0), eps)
}

/// Retarded polarizability: all poles in the lower half plane.
///
/// Excited: −[1/(ω₀+ω+iε) + 1/(ω₀−ω−iε)]; ground is the same with
/// ω₀ → −ω₀, hence excited = −ground for equal broadening.
pub fn alpha_retarded(
    state: AtomState,
    omega_n: f64,
    omega: f64,
    eps: f64,
) -> Result<Complex64, AtomError> {
    check_eps(eps)?;
    alpha_retarded_unchecked(state, omega_n, Complex64::new(omega, 0.0), eps)
}

fn alpha_retarded_unchecked(
    state: AtomState,
    omega_n: f64,
    z: Complex64,
    eps: f64,
) -> Result<Complex64, AtomError> {
    let ieps = Complex64::new(0.0, eps);
    Ok(match state {
        AtomState::Excited => -(1.0 / (omega_n + z + ieps) + 1.0 / (omega_n - z - ieps)),
        AtomState::Ground => 1.0 / (omega_n - z - ieps) + 1.0 / (omega_n + z + ieps),
    })
}

/// Sharp-line (ε → 0) polarizability at real frequency away from the poles.
///
/// In this limit the time-ordered and retarded forms coincide on the real
/// axis and the value is real: ground ±[1/(ω₀−ω) + 1/(ω₀+ω)].
pub fn alpha_sharp(state: AtomState, omega_n: f64, omega: f64) -> f64 {
    let g = 1.0 / (omega_n - omega) + 1.0 / (omega_n + omega);
    match state {
        AtomState::Ground => g,
        AtomState::Excited => -g,
    }
}

/// Sharp-line polarizability on the positive imaginary axis, z = iξ.
///
/// Ground: 2ω₀/(ω₀²+ξ²), manifestly real; excited is its negative.
pub fn alpha_imag_axis(state: AtomState, omega_n: f64, xi: f64) -> f64 {
    let g = 2.0 * omega_n / (omega_n * omega_n + xi * xi);
    match state {
        AtomState::Ground => g,
        AtomState::Excited => -g,
    }
}

/// The upper-right-quadrant pole of the excited time-ordered polarizability,
/// in the form consumed by the contour machinery.  The residue of
/// −1/(ω₀−z+iε) at z = ω₀ + iε is +1.
pub fn excited_feynman_pole(omega_n: f64, eps: f64) -> Pole {
    Pole { location: Complex64::new(omega_n, eps), residue: Complex64::new(1.0, 0.0) }
}

/// Off-diagonal polarizability: a pure resonance with no regular part.
///
/// `resonance_weight = (ω₀, w)` stands for w·2πi·δ(ω−ω₀).  Restricted to
/// positive frequencies the ground-state version vanishes identically (its
/// mirror line sits at −ω₀), so it comes back as the zero object.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polarizability {
    pub resonance_weight: Option<(f64, f64)>,
}

impl Polarizability {
    pub fn zero() -> Self {
        Polarizability { resonance_weight: None }
    }

    pub fn is_zero(&self) -> bool {
        self.resonance_weight.is_none()
    }

    /// Total weight under the line: ∫ α₁₂ dω = 2πi·w.
    pub fn delta_integral(&self) -> Complex64 {
        match self.resonance_weight {
            Some((_, w)) => Complex64::new(0.0, 2.0 * std::f64::consts::PI * w),
            None => Complex64::default(),
        }
    }

    /// Finite-ε stand-in for the line: w·2iε/((ω−ω₀)²+ε²).
    pub fn broadened(&self, omega: f64, eps: f64) -> Result<Complex64, AtomError> {
        check_eps(eps)?;
        Ok(match self.resonance_weight {
            Some((w0, w)) => {
                let d = omega - w0;
                Complex64::new(0.0, w * 2.0 * eps / (d * d + eps * eps))
            }
            None => Complex64::default(),
        })
    }
}

/// Off-diagonal polarizability of an atom in the given state.
pub fn alpha_offdiagonal(state: AtomState, omega_n: f64) -> Polarizability {
    match state {
        AtomState::Excited => Polarizability { resonance_weight: Some((omega_n, 1.0)) },
        AtomState::Ground => Polarizability::zero(),
    }
}

/// Broadened off-diagonal response including the mirror line.
///
/// This is exactly α₁₁(ω;ε) − α_R(ω;ε) as rational functions: the excited
/// line sits at +ω₀, the ground-state one at −ω₀ (and hence dies off at
/// positive frequencies as ε → 0).  Use this form when checking the
/// α₁₁ − α₁₂ = α_R identity pointwise at finite ε.
pub fn alpha_offdiagonal_broadened(
    state: AtomState,
    omega_n: f64,
    omega: f64,
    eps: f64,
) -> Result<Complex64, AtomError> {
    check_eps(eps)?;
    let center = match state {
        AtomState::Excited => omega_n,
        AtomState::Ground => -omega_n,
    };
    let d = omega - center;
    Ok(Complex64::new(0.0, 2.0 * eps / (d * d + eps * eps)))
}
