//! Physical constants and the single natural-units-to-SI conversion
//! used by the crate.
//!
//! Everything internal works in natural units with hbar = c = 1 and all
//! energies/momenta expressed in units of the electron mass m. Cross
//! sections come out in m^-2 = lambda_C^2 (squared reduced Compton
//! wavelength). SI appears in exactly two places: the laser flux and the
//! tube length of the gain model.

/// Fine-structure constant, CODATA 2018: 1/137.035999084.
pub const ALPHA: f64 = 7.2973525693e-3;

/// Reduced Compton wavelength of the electron, hbar/(m_e c), in meters.
pub const LAMBDA_C_M: f64 = 3.8615926796e-13;

/// Electron rest energy m_e c^2 in joules (CODATA 2018).
pub const ELECTRON_REST_ENERGY_J: f64 = 8.1871057880e-14;

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT_M_S: f64 = 299792458.0;

/// Natural-units energy flux scale in W/m^2.
///
/// An energy density of 1 (electron mass per cubic reduced Compton
/// wavelength) streaming at c carries
///   (m_e c^2 / lambda_C^3) * c  ~= 4.2624e32 W/m^2.
/// The photon number density of a circular laser of amplitude a0 and
/// frequency k (both in units of m) is k * a0^2 / (4 pi alpha) per
/// lambda_C^3, each photon of energy k, so the flux is
///   FLUX_SCALE_W_M2 * (a0 * k)^2 / (4 pi alpha).
pub const FLUX_SCALE_W_M2: f64 =
    ELECTRON_REST_ENERGY_J / (LAMBDA_C_M * LAMBDA_C_M * LAMBDA_C_M) * SPEED_OF_LIGHT_M_S;
