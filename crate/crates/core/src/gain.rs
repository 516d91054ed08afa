//! Stimulated gamma-ray gain along a collision tube.
//!
//! The occupation N of the outgoing photon mode obeys
//! dN/dl = (N + 1) a / lambda_C with the gain constant
//! a = n_electrons * xsec / (N + 1); the (N + 1) stimulation factor in
//! the cross section cancels, so a is constant along the tube and
//! N(l) = e^{a l / lambda_C} - 1. The exponents of interest overflow
//! f64 by two orders of magnitude, so results are carried in log space.

use crate::error::{Error, Result};
use crate::units::LAMBDA_C_M;

/// Photon occupation in overflow-safe form: exponent = ln(N + 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonNumber {
    pub exponent: f64,
}

/// Above this exponent the plain value saturates to f64 infinity.
pub const SATURATION_EXPONENT: f64 = 700.0;

impl PhotonNumber {
    /// N itself; +inf when the exponent is past f64 range.
    pub fn value(&self) -> f64 {
        self.exponent.exp_m1()
    }

    /// log10(N + 1), finite for any exponent.
    pub fn log10_n_plus_1(&self) -> f64 {
        self.exponent / std::f64::consts::LN_10
    }

    pub fn is_saturated(&self) -> bool {
        self.exponent > SATURATION_EXPONENT
    }
}

/// A collision tube with its pumped electron population.
#[derive(Debug, Clone, Copy)]
pub struct TubeScenario {
    pub length_m: f64,
    /// electrons per burst, held constant by pumping
    pub n_electrons: f64,
    /// averaged differential cross section feeding the growth law,
    /// m^-2 per laser volume lambda_C^3, evaluated at n_occ = 0
    pub xsec_per_volume: f64,
    pub lambda_c_m: f64,
}

impl TubeScenario {
    pub fn new(length_m: f64, n_electrons: f64, xsec_per_volume: f64) -> Result<Self> {
        for (name, v) in [
            ("length_m", length_m),
            ("n_electrons", n_electrons),
            ("xsec_per_volume", xsec_per_volume),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain("TubeScenario", format!("{name} = {v} must be positive and finite")));
            }
        }
        Ok(TubeScenario {
            length_m,
            n_electrons,
            xsec_per_volume,
            lambda_c_m: LAMBDA_C_M,
        })
    }

    pub fn gain(&self) -> f64 {
        gain_parameter(self.n_electrons, self.xsec_per_volume, 0)
    }

    pub fn photon_number(&self) -> PhotonNumber {
        photon_number_closed(self.gain(), self.length_m, self.lambda_c_m)
    }
}

/// a = n * xsec / (N + 1). With xsec evaluated at occupation N the
/// stimulation factor cancels, so a is independent of n_occ.
pub fn gain_parameter(n_electrons: f64, xsec: f64, n_occ: u64) -> f64 {
    n_electrons * xsec / (n_occ as f64 + 1.0)
}

/// N(l) = e^{a l / lambda_C} - 1 in log-space form.
pub fn photon_number_closed(a: f64, l_m: f64, lambda_c_m: f64) -> PhotonNumber {
    PhotonNumber { exponent: a * l_m / lambda_c_m }
}

/// Integrates dN/dl = (N + 1) a(l) / lambda_C as the linear equation
/// d ln(N+1)/dl = a(l)/lambda_C with classical RK4, N(0) = 0. The
/// profile hook covers non-constant pumping; the constant case is
/// integrated exactly.
pub fn photon_number_ode_profile(
    a_of_l: impl Fn(f64) -> f64,
    l_m: f64,
    lambda_c_m: f64,
    step_count: u32,
) -> Result<PhotonNumber> {
    if step_count < 10 {
        return Err(Error::precondition("photon_number_ode", "step_count must be >= 10"));
    }
    if !(l_m >= 0.0) || !(lambda_c_m > 0.0) {
        return Err(Error::domain("photon_number_ode", "need l >= 0 and lambda_C > 0"));
    }
    let h = l_m / step_count as f64;
    let f = |l: f64| a_of_l(l) / lambda_c_m;
    let mut y = 0.0_f64; // ln(N + 1)
    for i in 0..step_count {
        let l = i as f64 * h;
        let k1 = f(l);
        let k23 = f(l + 0.5 * h);
        let k4 = f(l + h);
        y += h / 6.0 * (k1 + 4.0 * k23 + k4);
    }
    Ok(PhotonNumber { exponent: y })
}

/// Constant-gain integration; matches the closed form to integrator
/// accuracy.
pub fn photon_number_ode(a: f64, l_m: f64, lambda_c_m: f64, step_count: u32) -> Result<PhotonNumber> {
    if !(a >= 0.0) {
        return Err(Error::domain("photon_number_ode", format!("a = {a} must be >= 0")));
    }
    photon_number_ode_profile(|_| a, l_m, lambda_c_m, step_count)
}
