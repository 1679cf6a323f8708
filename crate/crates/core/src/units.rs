//! Physical constants and unit conversions. Energies and momenta are in eV
//! (with ħ = c = 1), lengths in eV⁻¹ internally and nm at config boundaries.

/// ħc in eV·nm.
pub const HBAR_C_EV_NM: f64 = 197.326_980_4;
/// Bohr radius in nm.
pub const BOHR_NM: f64 = 0.052_917_7;
/// Fine-structure constant.
pub const ALPHA: f64 = 1.0 / 137.035_999_084;
/// ħ in eV·s.
pub const HBAR_EV_S: f64 = 6.582_119_569e-16;

pub fn nm_to_inv_ev(nm: f64) -> f64 {
    nm / HBAR_C_EV_NM
}

pub fn inv_ev_to_nm(len: f64) -> f64 {
    len * HBAR_C_EV_NM
}

pub fn inv_ev_to_um(len: f64) -> f64 {
    inv_ev_to_nm(len) * 1e-3
}

/// Photon momentum in eV to inverse Bohr radii.
pub fn ev_to_atomic_momentum(k_ev: f64) -> f64 {
    k_ev * BOHR_NM / HBAR_C_EV_NM
}

/// Decay rate in eV from a lifetime in seconds.
pub fn lifetime_to_width(seconds: f64) -> f64 {
    HBAR_EV_S / seconds
}
