//! Observable quantities built from propagators and polarizabilities: the
//! ground–ground dispersion potential, the excited–ground self-energies in
//! both orderings, spontaneous and thermal decay rates, and resonant
//! energy-transfer rates.
//!
//! Conventions: a self-energy Σ = ΔE − iΓ/2 carries the level shift in its
//! real part and the decay width in −2·Im.  Every frequency integral
//! (i/2π)∫₀^∞ dω … is evaluated on the rotated contour,
//! −(1/2π)∫₀^∞ dξ …(iξ) − Σ residues, where the residues are known in closed
//! form from the pole structure of the excited-state response.

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

use crate::atom::{
    alpha_feynman, alpha_imag_axis, alpha_retarded, alpha_sharp, AtomError, AtomState,
    TwoLevelAtom,
};
use crate::green::{
    green_coincidence_im, AtomPairGreen, GreenError, Medium, RetardedGreen,
};
use crate::quadrature::{integrate_semi_infinite, QuadratureError, Tolerance};

#[derive(Debug, Error)]
pub enum RateError {
    #[error("operation requires atom A excited and atom B ground")]
    WrongStates,
    #[error("operation requires an excited atom")]
    NotExcited,
    #[error("operation requires a ground-state atom")]
    NotGround,
    #[error("sharp-line degeneracy ω_A = ω_B: the resonant term is a principal-value singularity; supply linewidths or detune")]
    DegenerateResonance,
    #[error("temperature must be ≥ 0, got {0:e}")]
    NegativeTemperature(f64),
    #[error("lineshape: {0}")]
    InvalidLineshape(String),
    #[error(transparent)]
    Green(#[from] GreenError),
    #[error(transparent)]
    Atom(#[from] AtomError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Complex level correction split into labelled parts; the parts sum to the
/// total by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfEnergy {
    pub nonresonant: Complex64,
    pub resonant: Complex64,
    pub oscillating: Complex64,
}

impl SelfEnergy {
    pub fn total(&self) -> Complex64 {
        self.nonresonant + self.resonant + self.oscillating
    }

    /// Energy shift ΔE = Re Σ.
    pub fn shift(&self) -> f64 {
        self.total().re
    }

    /// Width Γ = −2 Im Σ.  Non-negative for the causal (Keldysh) orderings;
    /// the time-ordered oscillating term can drive it through zero.
    pub fn width(&self) -> f64 {
        -2.0 * self.total().im
    }
}

fn require_pair(astar: &TwoLevelAtom, b: &TwoLevelAtom) -> Result<(), RateError> {
    if astar.state != AtomState::Excited || b.state != AtomState::Ground {
        return Err(RateError::WrongStates);
    }
    Ok(())
}

/// Transform scale for a double-propagator integrand between two atoms: the
/// propagator pair falls off at the green function's rate and the
/// polarizabilities cut the axis off beyond the smaller transition frequency.
fn gg_decay_rate(green: &(impl RetardedGreen + ?Sized), omega_a: f64, omega_b: f64) -> f64 {
    green.falloff_rate() + 1.0 / omega_a.min(omega_b)
}

/// Ground–ground self-energy with a pluggable propagator:
/// ΔE = −(1/2π)∫₀^∞ dξ α_A(iξ) α_B(iξ) [d_r(iξ)]², width identically zero.
pub fn sigma_gg_with(
    green: &(impl RetardedGreen + ?Sized),
    omega_a: f64,
    omega_b: f64,
    tol: Tolerance,
) -> Result<SelfEnergy, RateError> {
    // Surface medium problems before integrating.
    green.dr_imag(omega_a)?;
    let h = |xi: f64| {
        let dr = green.dr_imag(xi).unwrap_or(f64::NAN);
        Complex64::new(
            alpha_imag_axis(AtomState::Ground, omega_a, xi)
                * alpha_imag_axis(AtomState::Ground, omega_b, xi)
                * dr
                * dr,
            0.0,
        )
    };
    let quad = integrate_semi_infinite(h, gg_decay_rate(green, omega_a, omega_b), tol)?;
    // The integrand is exactly real on the axis, so the width is exactly zero.
    let shift = -quad.value.re / (2.0 * PI);
    Ok(SelfEnergy {
        nonresonant: Complex64::new(shift, 0.0),
        resonant: Complex64::default(),
        oscillating: Complex64::default(),
    })
}

/// Dispersion potential of two ground-state atoms (purely real, attractive
/// in vacuum for real dipoles).
pub fn sigma_gg(
    a: &TwoLevelAtom,
    b: &TwoLevelAtom,
    medium: &Medium,
    tol: Tolerance,
) -> Result<SelfEnergy, RateError> {
    if a.state != AtomState::Ground || b.state != AtomState::Ground {
        return Err(RateError::NotGround);
    }
    let green = AtomPairGreen::between(a, b, medium)?;
    sigma_gg_with(&green, a.omega, b.omega, tol)
}

/// Spectral-overlap broadening of the resonant term: half the combined
/// linewidth, so the induced width reproduces the lineshape-overlap rate.
fn resonant_alpha(
    omega_a: f64,
    omega_b: f64,
    gamma_a: f64,
    gamma_b: f64,
    retarded: bool,
) -> Result<Complex64, RateError> {
    let eps = 0.5 * (gamma_a + gamma_b);
    if eps > 0.0 {
        Ok(if retarded {
            alpha_retarded(AtomState::Ground, omega_b, omega_a, eps)?
        } else {
            alpha_feynman(AtomState::Ground, omega_b, omega_a, eps)?
        })
    } else {
        if omega_a == omega_b {
            return Err(RateError::DegenerateResonance);
        }
        Ok(Complex64::new(alpha_sharp(AtomState::Ground, omega_b, omega_a), 0.0))
    }
}

/// [`sigma_ge_keldysh`] with a pluggable propagator; `gamma_*` are FWHM
/// linewidths (zero for sharp lines).
pub fn sigma_ge_keldysh_with(
    green: &(impl RetardedGreen + ?Sized),
    omega_a: f64,
    omega_b: f64,
    gamma_a: f64,
    gamma_b: f64,
    tol: Tolerance,
) -> Result<SelfEnergy, RateError> {
    let gg = sigma_gg_with(green, omega_a, omega_b, tol)?;
    let dr = green.dr(Complex64::new(omega_a, 0.0))?;
    let alpha = resonant_alpha(omega_a, omega_b, gamma_a, gamma_b, true)?;
    Ok(SelfEnergy {
        nonresonant: -gg.total(),
        resonant: -alpha * dr.norm_sqr(),
        oscillating: Complex64::default(),
    })
}

/// Self-energy of the ground-state atom B next to the excited atom A, fully
/// equilibrated (closed-time-path) ordering:
///
///   Σ = −Σ^gg − α_R^{gB}(ω_A)·|d_r(ω_A)|².
///
/// The resonant part follows the squared modulus of the propagator: it never
/// oscillates in the separation, and its imaginary part (present once
/// linewidths overlap) is the energy-transfer width.
pub fn sigma_ge_keldysh(
    astar: &TwoLevelAtom,
    b: &TwoLevelAtom,
    medium: &Medium,
    tol: Tolerance,
) -> Result<SelfEnergy, RateError> {
    require_pair(astar, b)?;
    let green = AtomPairGreen::between(astar, b, medium)?;
    sigma_ge_keldysh_with(&green, astar.omega, b.omega, astar.gamma(), b.gamma(), tol)
}

/// [`sigma_ge_feynman`] with a pluggable propagator.
pub fn sigma_ge_feynman_with(
    green: &(impl RetardedGreen + ?Sized),
    omega_a: f64,
    omega_b: f64,
    gamma_a: f64,
    gamma_b: f64,
    tol: Tolerance,
) -> Result<SelfEnergy, RateError> {
    let gg = sigma_gg_with(green, omega_a, omega_b, tol)?;
    let dr = green.dr(Complex64::new(omega_a, 0.0))?;
    let alpha = resonant_alpha(omega_a, omega_b, gamma_a, gamma_b, false)?;
    Ok(SelfEnergy {
        nonresonant: -gg.total(),
        resonant: Complex64::default(),
        oscillating: -alpha * dr * dr,
    })
}

/// Same physical setup in the equilibrium (time-ordered) bookkeeping:
///
///   Σ = −Σ^gg + ΔΣ,   ΔΣ = −α^{gB}(ω_A)·[d_r(ω_A)]².
///
/// ΔΣ carries the square (not the modulus squared) of the propagator and
/// therefore oscillates at half the medium wavelength in the far zone; it is
/// exposed as the `oscillating` part.
pub fn sigma_ge_feynman(
    astar: &TwoLevelAtom,
    b: &TwoLevelAtom,
    medium: &Medium,
    tol: Tolerance,
) -> Result<SelfEnergy, RateError> {
    require_pair(astar, b)?;
    let green = AtomPairGreen::between(astar, b, medium)?;
    sigma_ge_feynman_with(&green, astar.omega, b.omega, astar.gamma(), b.gamma(), tol)
}

/// The four lines of the retarded/advanced decomposition of the Keldysh
/// excited–ground self-energy, each evaluated on its own:
///
///   1. rotated integral of α_R^{gB} α_R^{eA} d_r²  (no enclosed poles),
///   2. +α₁₂^{eA} against d_r²  (residue),
///   3. −α₁₂^{eA} against d_r²  (residue, cancels line 2),
///   4. +α₁₂^{eA} against d_r·d_a = |d_r|²  (residue).
///
/// Lines 2 and 3 cancel exactly; the sum of all four equals the two-term
/// form produced by [`sigma_ge_keldysh`].  Sharp lines only.
#[derive(Debug, Clone, Copy)]
pub struct KeldyshFourTerm {
    pub lines: [Complex64; 4],
}

impl KeldyshFourTerm {
    pub fn total(&self) -> Complex64 {
        self.lines.iter().sum()
    }
}

pub fn sigma_ge_keldysh_four_term(
    astar: &TwoLevelAtom,
    b: &TwoLevelAtom,
    medium: &Medium,
    tol: Tolerance,
) -> Result<KeldyshFourTerm, RateError> {
    require_pair(astar, b)?;
    if astar.omega == b.omega {
        return Err(RateError::DegenerateResonance);
    }
    let green = AtomPairGreen::between(astar, b, medium)?;
    green.dr_imag(astar.omega)?;

    let (omega_a, omega_b) = (astar.omega, b.omega);
    let h = |xi: f64| {
        let dr = green.dr_imag(xi).unwrap_or(f64::NAN);
        Complex64::new(
            alpha_imag_axis(AtomState::Ground, omega_b, xi)
                * alpha_imag_axis(AtomState::Excited, omega_a, xi)
                * dr
                * dr,
            0.0,
        )
    };
    let quad = integrate_semi_infinite(h, gg_decay_rate(&green, omega_a, omega_b), tol)?;
    let line1 = Complex64::new(-quad.value.re / (2.0 * PI), 0.0);

    // Residue rule for the resonance line: (i/2π)·∫ 2πi δ(ω−ω_A) F(ω) dω
    // contributes −F(ω_A).
    let dr = green.dr(Complex64::new(omega_a, 0.0))?;
    let alpha_b = alpha_sharp(AtomState::Ground, omega_b, omega_a);
    let line2 = -alpha_b * dr * dr;
    let line3 = alpha_b * dr * dr;
    let line4 = -alpha_b * dr * dr.conj();

    Ok(KeldyshFourTerm { lines: [line1, line2, line3, line4] })
}

/// Spontaneous emission rate of an excited atom:
/// Γ₀ = 2 d·Im G(ω, r, r)·d = (4/3)|d|² ω³ n(ω)/c³.
pub fn gamma_spontaneous(astar: &TwoLevelAtom, medium: &Medium) -> Result<f64, RateError> {
    if astar.state != AtomState::Excited {
        return Err(RateError::NotExcited);
    }
    let g = green_coincidence_im(astar.omega, medium)?;
    let mut rate = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            rate += 2.0 * astar.dipole[i] * g[(i, j)] * astar.dipole[j];
        }
    }
    Ok(rate)
}

/// Absorption rate of thermal photons by a ground-state atom: the residue of
/// the polarizability pole against the thermal part of the propagator gives
/// Γ_abs = n̄(ω)·Γ₀.  Identically zero at T = 0.
pub fn gamma_thermal_absorption(
    b: &TwoLevelAtom,
    medium: &Medium,
    temperature: f64,
) -> Result<f64, RateError> {
    if b.state != AtomState::Ground {
        return Err(RateError::NotGround);
    }
    if !(temperature >= 0.0) || !temperature.is_finite() {
        return Err(RateError::NegativeTemperature(temperature));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let g = green_coincidence_im(b.omega, medium)?;
    let mut gamma0 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            gamma0 += 2.0 * b.dipole[i] * g[(i, j)] * b.dipole[j];
        }
    }
    Ok(crate::green::bose_occupation(b.omega / temperature) * gamma0)
}

/// Emission/absorption line of unit area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lineshape {
    Delta { center: f64 },
    /// Lorentzian of full width at half maximum `fwhm`:
    /// L(ω) = (fwhm/2π)/((ω−center)² + (fwhm/2)²).
    Lorentzian { center: f64, fwhm: f64 },
}

impl Lineshape {
    pub fn delta(center: f64) -> Result<Self, RateError> {
        if !center.is_finite() {
            return Err(RateError::InvalidLineshape(format!("non-finite center {center:e}")));
        }
        Ok(Lineshape::Delta { center })
    }

    pub fn lorentzian(center: f64, fwhm: f64) -> Result<Self, RateError> {
        if !center.is_finite() {
            return Err(RateError::InvalidLineshape(format!("non-finite center {center:e}")));
        }
        if !(fwhm > 0.0) || !fwhm.is_finite() {
            return Err(RateError::InvalidLineshape(format!(
                "width must be positive, got {fwhm:e} (use a delta line for zero width)"
            )));
        }
        Ok(Lineshape::Lorentzian { center, fwhm })
    }

    pub fn center(&self) -> f64 {
        match *self {
            Lineshape::Delta { center } => center,
            Lineshape::Lorentzian { center, .. } => center,
        }
    }

    pub fn fwhm(&self) -> f64 {
        match *self {
            Lineshape::Delta { .. } => 0.0,
            Lineshape::Lorentzian { fwhm, .. } => fwhm,
        }
    }

    /// Spectral density; `None` for the delta line (handled analytically).
    pub fn density(&self, omega: f64) -> Option<f64> {
        match *self {
            Lineshape::Delta { .. } => None,
            Lineshape::Lorentzian { center, fwhm } => {
                let hw = 0.5 * fwhm;
                let d = omega - center;
                Some(hw / PI / (d * d + hw * hw))
            }
        }
    }

    /// Area between two frequencies (closed form).
    pub fn area(&self, lo: f64, hi: f64) -> f64 {
        match *self {
            Lineshape::Delta { center } => {
                if center >= lo && center <= hi {
                    1.0
                } else {
                    0.0
                }
            }
            Lineshape::Lorentzian { center, fwhm } => {
                let hw = 0.5 * fwhm;
                (((hi - center) / hw).atan() - ((lo - center) / hw).atan()) / PI
            }
        }
    }
}

/// Resonant energy-transfer rate.  For the matched delta–delta combination
/// the rate carries a leftover δ(0) normalization; what is returned is its
/// coefficient, flagged as a spectral density.
#[derive(Debug, Clone, Copy)]
pub struct FretRate {
    pub rate: f64,
    pub spectral_density: bool,
}

/// Golden-rule transfer rate Γ = 2π ∫ dω L_A(ω) L_B(ω) |d_r(ω; r_B, r_A)|².
pub fn fret_rate(
    astar: &TwoLevelAtom,
    b: &TwoLevelAtom,
    lineshape_a: &Lineshape,
    lineshape_b: &Lineshape,
    medium: &Medium,
    tol: Tolerance,
) -> Result<FretRate, RateError> {
    require_pair(astar, b)?;
    let green = AtomPairGreen::between(astar, b, medium)?;
    fret_rate_with(&green, lineshape_a, lineshape_b, tol)
}

/// [`fret_rate`] with a pluggable propagator.
pub fn fret_rate_with(
    green: &(impl RetardedGreen + ?Sized),
    lineshape_a: &Lineshape,
    lineshape_b: &Lineshape,
    tol: Tolerance,
) -> Result<FretRate, RateError> {
    let dr_sq = |w: f64| -> Result<f64, RateError> {
        Ok(green.dr(Complex64::new(w, 0.0))?.norm_sqr())
    };

    match (lineshape_a, lineshape_b) {
        (Lineshape::Delta { center: ca }, Lineshape::Delta { center: cb }) => {
            if ca == cb {
                Ok(FretRate { rate: 2.0 * PI * dr_sq(*ca)?, spectral_density: true })
            } else {
                Ok(FretRate { rate: 0.0, spectral_density: false })
            }
        }
        (Lineshape::Delta { center }, lor @ Lineshape::Lorentzian { .. })
        | (lor @ Lineshape::Lorentzian { .. }, Lineshape::Delta { center }) => {
            let density = lor.density(*center).expect("lorentzian density");
            Ok(FretRate { rate: 2.0 * PI * density * dr_sq(*center)?, spectral_density: false })
        }
        (la @ Lineshape::Lorentzian { .. }, lb @ Lineshape::Lorentzian { .. }) => {
            let (ca, cb) = (la.center(), lb.center());
            let widths = la.fwhm() + lb.fwhm();
            let span = 1.0e3 * widths + 10.0 * (ca - cb).abs();
            let lo = (ca.min(cb) - span).max(0.0);
            let hi = ca.max(cb) + span;
            let mut cuts = Vec::new();
            for ls in [la, lb] {
                let (c, f) = (ls.center(), ls.fwhm());
                for m in [-50.0, -5.0, -0.5, 0.0, 0.5, 5.0, 50.0] {
                    cuts.push(c + m * f);
                }
            }
            let f = |w: f64| {
                let v = la.density(w).unwrap()
                    * lb.density(w).unwrap()
                    * dr_sq(w).unwrap_or(f64::NAN);
                Complex64::new(v, 0.0)
            };
            let quad =
                crate::quadrature::integrate_finite_with_breakpoints(f, lo, hi, &cuts, tol)?;
            Ok(FretRate { rate: 2.0 * PI * quad.value.re, spectral_density: false })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::green::bose_occupation;
    use approx::assert_relative_eq;
    use nalgebra::Vector3;

    fn zhat() -> Vector3<f64> {
        Vector3::new(0.0, 0.0, 1.0)
    }
    fn xhat() -> Vector3<f64> {
        Vector3::new(1.0, 0.0, 0.0)
    }

    fn ground(omega: f64, r: f64) -> TwoLevelAtom {
        TwoLevelAtom::new(r * zhat(), omega, xhat(), AtomState::Ground).unwrap()
    }

    fn excited(omega: f64, r: f64) -> TwoLevelAtom {
        TwoLevelAtom::new(r * zhat(), omega, xhat(), AtomState::Excited).unwrap()
    }

    #[test]
    fn gg_near_zone_closed_form() {
        // kr = 1e-3, identical atoms, transverse unit dipoles: the static
        // dipole coupling is T = −1/r³·r³ = −1, and
        // ΔE → −T²/((ω_A+ω_B) r⁶) within 1%.
        let medium = Medium::vacuum();
        let r = 1e-3;
        let a = ground(1.0, 0.0);
        let b = ground(1.0, r);
        let se = sigma_gg(&a, &b, &medium, Tolerance::default()).unwrap();
        let expected = -1.0 / (2.0 * r.powi(6));
        assert!(
            (se.shift() - expected).abs() < 0.01 * expected.abs(),
            "shift {} vs {}",
            se.shift(),
            expected
        );
        assert_eq!(se.width(), 0.0);
        assert!(se.shift() < 0.0);
        // Breakdown parts sum to the total exactly.
        assert_eq!(se.total(), se.nonresonant);
    }

    #[test]
    fn gg_rejects_bad_inputs() {
        let medium = Medium::vacuum();
        let a = ground(1.0, 0.0);
        let b = excited(1.0, 1.0);
        assert!(matches!(sigma_gg(&a, &b, &medium, Tolerance::default()), Err(RateError::NotGround)));
        let b2 = ground(1.0, 0.0);
        assert!(matches!(
            sigma_gg(&a, &b2, &medium, Tolerance::default()),
            Err(RateError::Green(GreenError::CoincidentPoints))
        ));
        let table = crate::green::PermittivityTable::parse("0.5 2.0 0.1\n2.0 2.0 0.1\n").unwrap();
        let lossy = Medium::tabulated(table);
        let b3 = ground(1.0, 1.0);
        assert!(sigma_gg(&a, &b3, &lossy, Tolerance::default()).is_err());
    }

    #[test]
    fn keldysh_nonresonant_is_minus_the_ground_ground_value() {
        let medium = Medium::vacuum();
        let a = excited(1.0, 0.0);
        let b = ground(1.4, 2.0);
        let ge = sigma_ge_keldysh(&a, &b, &medium, Tolerance::default()).unwrap();
        let aa = ground(1.0, 0.0);
        let gg = sigma_gg(&aa, &b, &medium, Tolerance::default()).unwrap();
        assert_relative_eq!(ge.nonresonant.re, -gg.shift(), max_relative = 1e-10);
        assert_eq!(ge.oscillating, Complex64::default());
    }

    #[test]
    fn keldysh_resonant_sign_follows_the_polarizability() {
        // ω_A < ω_B makes α_R^{gB}(ω_A) > 0 and the resonant shift negative
        // at every separation.
        let medium = Medium::vacuum();
        for &r in &[0.05, 0.5, 5.0, 50.0] {
            let a = excited(1.0, 0.0);
            let b = ground(1.5, r);
            let ge = sigma_ge_keldysh(&a, &b, &medium, Tolerance::default()).unwrap();
            assert!(ge.resonant.re < 0.0, "r = {r}");
            assert_eq!(ge.resonant.im, 0.0); // sharp lines: no width
        }
        // ω_A > ω_B flips the sign.
        let a = excited(2.0, 0.0);
        let b = ground(1.1, 1.0);
        let ge = sigma_ge_keldysh(&a, &b, &medium, Tolerance::default()).unwrap();
        assert!(ge.resonant.re > 0.0);
    }

    #[test]
    fn resonant_part_falls_like_the_squared_far_field() {
        // |d_r|² ~ 1/r² in the radiation zone: log–log slope −2 and no sign
        // changes anywhere.
        let medium = Medium::vacuum();
        let mut lx = Vec::new();
        let mut ly = Vec::new();
        let mut signs = Vec::new();
        for i in 0..8 {
            let r = 1e2 * (1e3f64 / 1e2).powf(i as f64 / 7.0);
            let a = excited(1.0, 0.0);
            let b = ground(1.5, r);
            let se = sigma_ge_keldysh(&a, &b, &medium, Tolerance::default()).unwrap();
            lx.push(r.ln());
            ly.push(se.resonant.re.abs().ln());
            signs.push(se.resonant.re.signum());
        }
        assert!(signs.windows(2).all(|w| w[0] == w[1]));
        let n = lx.len() as f64;
        let mx = lx.iter().sum::<f64>() / n;
        let my = ly.iter().sum::<f64>() / n;
        let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
        let slope = sxy / sxx;
        assert!((slope + 2.0).abs() < 0.02, "slope {slope}");
    }

    #[test]
    fn sharp_degeneracy_is_refused() {
        let medium = Medium::vacuum();
        let a = excited(1.0, 0.0);
        let b = ground(1.0, 1.0);
        assert!(matches!(
            sigma_ge_keldysh(&a, &b, &medium, Tolerance::default()),
            Err(RateError::DegenerateResonance)
        ));
        assert!(matches!(
            sigma_ge_feynman(&a, &b, &medium, Tolerance::default()),
            Err(RateError::DegenerateResonance)
        ));
        // Linewidths resolve it.
        let aw = excited(1.0, 0.0).with_linewidth(1e-4).unwrap();
        let se = sigma_ge_keldysh(&aw, &b, &medium, Tolerance::default()).unwrap();
        assert!(se.width() > 0.0);
    }

    #[test]
    fn feynman_minus_keldysh_is_the_interference_of_orderings() {
        let medium = Medium::vacuum();
        for &r in &[0.3, 2.0, 9.0] {
            let a = excited(1.0, 0.0);
            let b = ground(1.35, r);
            let f = sigma_ge_feynman(&a, &b, &medium, Tolerance::default()).unwrap();
            let k = sigma_ge_keldysh(&a, &b, &medium, Tolerance::default()).unwrap();
            let green = AtomPairGreen::between(&a, &b, &medium).unwrap();
            let dr = green.dr(Complex64::new(1.0, 0.0)).unwrap();
            let alpha = alpha_sharp(AtomState::Ground, 1.35, 1.0);
            let expected = -alpha * (dr * dr - Complex64::new(dr.norm_sqr(), 0.0));
            let got = f.total() - k.total();
            assert!(
                (got - expected).norm() <= 1e-10 * expected.norm().max(1e-30),
                "r = {r}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn orderings_coincide_in_the_near_zone() {
        // kr → 0: [d_r]² and |d_r|² merge, so the oscillating term becomes
        // real and equal to the Keldysh resonant term.
        let medium = Medium::vacuum();
        let a = excited(1.0, 0.0);
        let mut prev = f64::INFINITY;
        for &r in &[1e-2, 1e-3, 1e-4] {
            let b = ground(1.35, r);
            let green = AtomPairGreen::between(&a, &b, &medium).unwrap();
            let dr = green.dr(Complex64::new(1.0, 0.0)).unwrap();
            let rel = (dr * dr - Complex64::new(dr.norm_sqr(), 0.0)).norm() / dr.norm_sqr();
            assert!(rel < prev, "not shrinking at r = {r}");
            prev = rel;
        }
        assert!(prev < 1e-11);
    }

    #[test]
    fn four_term_form_matches_the_two_term_form() {
        let medium = Medium::vacuum();
        let tol = Tolerance::rel(1e-12);
        for &r in &[0.4, 1.0, 6.0] {
            let a = excited(1.0, 0.0);
            let b = ground(1.45, r);
            let four = sigma_ge_keldysh_four_term(&a, &b, &medium, tol).unwrap();
            let two = sigma_ge_keldysh(&a, &b, &medium, tol).unwrap();
            assert!((four.lines[1] + four.lines[2]).norm() == 0.0, "middle lines must cancel");
            let diff = (four.total() - two.total()).norm();
            assert!(diff <= 1e-10 * two.total().norm(), "r = {r}: diff {diff}");
        }
    }

    #[test]
    fn spontaneous_rate_and_scalings() {
        let medium = Medium::vacuum();
        let a = excited(1.0, 0.0);
        let g = gamma_spontaneous(&a, &medium).unwrap();
        assert_relative_eq!(g, 4.0 / 3.0, max_relative = 1e-12);

        let a2 = excited(2.0, 0.0);
        assert_relative_eq!(
            gamma_spontaneous(&a2, &medium).unwrap() / g,
            8.0,
            max_relative = 1e-12
        );

        let m4 = Medium::constant(4.0).unwrap();
        assert_relative_eq!(gamma_spontaneous(&a, &m4).unwrap() / g, 2.0, max_relative = 1e-12);

        assert!(matches!(
            gamma_spontaneous(&ground(1.0, 0.0), &medium),
            Err(RateError::NotExcited)
        ));
    }

    #[test]
    fn thermal_absorption_ratio_is_the_occupation() {
        let medium = Medium::vacuum();
        let b = ground(1.0, 0.0);
        assert_eq!(gamma_thermal_absorption(&b, &medium, 0.0).unwrap(), 0.0);
        let gamma0 = gamma_spontaneous(&excited(1.0, 0.0), &medium).unwrap();
        for &bw in &[0.5, 1.0, 5.0] {
            let t = b.omega / bw;
            let g = gamma_thermal_absorption(&b, &medium, t).unwrap();
            assert_relative_eq!(g / gamma0, bose_occupation(bw), max_relative = 1e-12);
        }
        // Boltzmann suppression.
        assert!(gamma_thermal_absorption(&b, &medium, 1e-3).unwrap() / gamma0 < 1e-300);
        assert!(gamma_thermal_absorption(&b, &medium, -1.0).is_err());
    }

    #[test]
    fn thermal_absorption_against_direct_broadened_integration() {
        // Independent route: integrate the broadened polarizability against
        // the thermal part of the propagator on the real axis and extrapolate
        // the broadening to zero.
        let medium = Medium::vacuum();
        let b = ground(1.0, 0.0);
        let t = 2.0; // βω_B = 0.5
        let production = gamma_thermal_absorption(&b, &medium, t).unwrap();

        let beta = 1.0 / t;
        // |d| = 1 along x̂, so the contraction picks the (0,0) element.
        let im_coinc = |w: f64| green_coincidence_im(w, &medium).unwrap()[(0, 0)];
        let gamma_eps = |eps: f64| {
            let f = |w: f64| {
                let alpha = alpha_feynman(AtomState::Ground, b.omega, w, eps).unwrap();
                let thermal = 2.0 * bose_occupation(beta * w) * im_coinc(w);
                // Σ ⊃ (i/2π)·(2i n̄ Im D)·α; width = −2 Im Σ.
                Complex64::new(thermal * alpha.im / PI, 0.0)
            };
            let cuts = [b.omega - 10.0 * eps, b.omega, b.omega + 10.0 * eps];
            crate::quadrature::integrate_semi_infinite_with_breakpoints(
                f,
                beta,
                &cuts,
                Tolerance::rel(1e-11),
            )
            .unwrap()
            .value
            .re
        };
        let (e1, e2) = (4e-4, 2e-4);
        let extrapolated = 2.0 * gamma_eps(e2) - gamma_eps(e1);
        assert_relative_eq!(extrapolated, production, max_relative = 1e-6);
    }

    #[test]
    fn lineshape_validation_and_area() {
        assert!(Lineshape::lorentzian(1.0, -0.1).is_err());
        assert!(Lineshape::lorentzian(1.0, 0.0).is_err());
        assert!(Lineshape::delta(f64::NAN).is_err());
        let l = Lineshape::lorentzian(1.0, 1e-3).unwrap();
        assert_relative_eq!(l.area(-1e6, 1e6), 1.0, epsilon = 1e-9);

        // Numerical unit-area check on a wide window.
        let f = |u: f64| Complex64::new(l.density(1.0 + u).unwrap() + l.density(1.0 - u).unwrap(), 0.0);
        let quad = integrate_semi_infinite(f, 1.0 / l.fwhm(), Tolerance::rel(1e-12)).unwrap();
        assert!((quad.value.re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fret_delta_cases() {
        let medium = Medium::vacuum();
        let a = excited(1.0, 0.0);
        let b = ground(1.0, 0.5);
        let da = Lineshape::delta(1.0).unwrap();
        let db = Lineshape::delta(1.0).unwrap();
        let r = fret_rate(&a, &b, &da, &db, &medium, Tolerance::default()).unwrap();
        assert!(r.spectral_density);
        let green = AtomPairGreen::between(&a, &b, &medium).unwrap();
        let expected = 2.0 * PI * green.dr(Complex64::new(1.0, 0.0)).unwrap().norm_sqr();
        assert_relative_eq!(r.rate, expected, max_relative = 1e-14);

        let db2 = Lineshape::delta(1.2).unwrap();
        let r2 = fret_rate(&a, &b, &da, &db2, &medium, Tolerance::default()).unwrap();
        assert_eq!(r2.rate, 0.0);
        assert!(!r2.spectral_density);
    }

    #[test]
    fn fret_lorentzian_overlap_closed_forms() {
        // Near zone so |d_r|² is flat across the line.
        let medium = Medium::vacuum();
        let a = excited(1.0, 0.0);
        let r_sep = 1e-3;
        let b = ground(1.0, r_sep);
        let (ga, gb) = (2e-6, 3e-6);
        let la = Lineshape::lorentzian(1.0, ga).unwrap();
        let lb = Lineshape::lorentzian(1.0, gb).unwrap();
        let gamma_ab = 0.5 * (ga + gb);
        let green = AtomPairGreen::between(&a, &b, &medium).unwrap();
        let dr2 = green.dr(Complex64::new(1.0, 0.0)).unwrap().norm_sqr();

        let got = fret_rate(&a, &b, &la, &lb, &medium, Tolerance::rel(1e-11)).unwrap();
        let expected = 2.0 * dr2 / gamma_ab;
        assert_relative_eq!(got.rate, expected, max_relative = 1e-8);

        // Detuning curve Γ(δ)/Γ(0) = γ_AB²/(δ²+γ_AB²).
        for &delta in &[0.5 * gamma_ab, 2.0 * gamma_ab, 10.0 * gamma_ab] {
            let lb_det = Lineshape::lorentzian(1.0 + delta, gb).unwrap();
            let got_det = fret_rate(&a, &b, &la, &lb_det, &medium, Tolerance::rel(1e-11)).unwrap();
            let expected_ratio = gamma_ab * gamma_ab / (delta * delta + gamma_ab * gamma_ab);
            assert_relative_eq!(got_det.rate / got.rate, expected_ratio, max_relative = 1e-8);
        }
    }

    #[test]
    fn golden_rule_width_matches_the_lineshape_overlap() {
        // −2·Im Σ_K with broadened α equals the transfer rate with the
        // matching Lorentzian lines.
        let medium = Medium::vacuum();
        let gamma_b = 4e-6;
        let detuning = 3e-6;
        let a = excited(1.0, 0.0);
        let b = ground(1.0 + detuning, 0.8).with_linewidth(gamma_b).unwrap();
        let se = sigma_ge_keldysh(&a, &b, &medium, Tolerance::rel(1e-11)).unwrap();

        let la = Lineshape::delta(a.omega).unwrap();
        let lb = Lineshape::lorentzian(b.omega, gamma_b).unwrap();
        let fret = fret_rate(&a, &b, &la, &lb, &medium, Tolerance::rel(1e-11)).unwrap();
        assert_relative_eq!(se.width(), fret.rate, max_relative = 1e-6);
    }

    #[test]
    fn fret_requires_the_donor_excited() {
        let medium = Medium::vacuum();
        let a = ground(1.0, 0.0);
        let b = ground(1.0, 1.0);
        let d = Lineshape::delta(1.0).unwrap();
        assert!(matches!(
            fret_rate(&a, &b, &d, &d, &medium, Tolerance::default()),
            Err(RateError::WrongStates)
        ));
    }
}
