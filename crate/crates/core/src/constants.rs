//! Physical constants (CODATA 2018 exact or recommended values, SI units).

use std::f64::consts::PI;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Magnetic flux quantum h/2e, Wb.
pub const FLUX_QUANTUM: f64 = PLANCK / (2.0 * ELEMENTARY_CHARGE);
/// Bohr magneton, J/T.
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
/// Vacuum permeability, N/A².
pub const MU_0: f64 = 1.256_637_062_12e-6;
/// Gyromagnetic ratio of YIG, rad/(s·T); γ₀/2π = 28 GHz/T.
pub const GYROMAGNETIC_RATIO: f64 = 2.0 * PI * 28.0e9;
/// Spin density of YIG, m⁻³.
pub const YIG_SPIN_DENSITY: f64 = 2.14e28;
/// Landé factor of the quantum-dot junction.
pub const ASQ_LANDE_FACTOR: f64 = 12.7;

/// Ordinary frequency (Hz) to angular frequency (rad/s).
#[inline]
pub fn angular(hz: f64) -> f64 {
    2.0 * PI * hz
}

/// Angular frequency (rad/s) to ordinary frequency (Hz).
#[inline]
pub fn ordinary(rad_per_s: f64) -> f64 {
    rad_per_s / (2.0 * PI)
}

/// Named constant table, used for run manifests.
pub fn table() -> Vec<(&'static str, f64)> {
    vec![
        ("hbar_J_s", HBAR),
        ("planck_J_s", PLANCK),
        ("elementary_charge_C", ELEMENTARY_CHARGE),
        ("flux_quantum_Wb", FLUX_QUANTUM),
        ("bohr_magneton_J_per_T", BOHR_MAGNETON),
        ("mu_0_N_per_A2", MU_0),
        ("gyromagnetic_ratio_rad_per_s_T", GYROMAGNETIC_RATIO),
        ("yig_spin_density_per_m3", YIG_SPIN_DENSITY),
        ("asq_lande_factor", ASQ_LANDE_FACTOR),
    ]
}
