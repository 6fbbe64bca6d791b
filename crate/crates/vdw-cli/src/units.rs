//! SI ⇄ Hartree-atomic-unit conversions (CODATA 2018).

/// Atomic unit of time in seconds.
pub const ATOMIC_TIME_S: f64 = 2.418_884_326_585_7e-17;
/// Bohr radius in meters.
pub const BOHR_M: f64 = 5.291_772_109_03e-11;
/// Boltzmann constant in hartree per kelvin.
pub const KB_HARTREE_PER_K: f64 = 3.166_811_563_455_6e-6;
/// Speed of light in atomic units (inverse fine-structure constant).
pub const C_AU: f64 = 137.035_999_084;

pub fn omega_si_to_au(omega_rad_s: f64) -> f64 {
    omega_rad_s * ATOMIC_TIME_S
}

pub fn omega_au_to_si(omega_au: f64) -> f64 {
    omega_au / ATOMIC_TIME_S
}

pub fn length_si_to_au(meters: f64) -> f64 {
    meters / BOHR_M
}

pub fn temperature_k_to_au(kelvin: f64) -> f64 {
    kelvin * KB_HARTREE_PER_K
}

/// Rates (1/s) share the frequency conversion since ħ = 1.
pub fn rate_au_to_si(rate_au: f64) -> f64 {
    rate_au / ATOMIC_TIME_S
}
