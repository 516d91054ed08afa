//! Closed-form kinematics of the scattered state.
//!
//! Geometry: laser along +z, electron head-on with p_z < 0, zero
//! incident transverse momentum. Everything is in natural units with
//! the electron mass m = 1; the laser photon energy k and all electron
//! energies are ratios to m. The intensity parameter a0 = eA/m.
//!
//! The dressed electron carries the ponderomotive shift
//! c = a0^2 / (2(E - p_z)); absorbing 𝒩 laser photons and emitting one
//! photon k' at polar angle theta fixes the final state in closed form.

use crate::error::{Error, Result};
use crate::units::{ALPHA, FLUX_SCALE_W_M2};

/// Circularly polarized plane-wave laser: dimensionless amplitude
/// a0 = eA/m and photon energy k in units of m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserParams {
    pub a0: f64,
    pub k: f64,
}

impl LaserParams {
    pub fn new(a0: f64, k: f64) -> Result<Self> {
        if !(a0.is_finite() && a0 >= 0.0) {
            return Err(Error::domain("LaserParams", format!("a0 = {a0} must be finite and >= 0")));
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::domain("LaserParams", format!("k = {k} must be finite and > 0")));
        }
        Ok(LaserParams { a0, k })
    }
}

/// Incident electron: energy E >= 1, signed longitudinal momentum p_z
/// (zero transverse momentum), spin projection sigma = +-1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectronIn {
    pub e: f64,
    pub p_z: f64,
    pub sigma: i32,
}

impl ElectronIn {
    pub fn new(e: f64, p_z: f64, sigma: i32) -> Result<Self> {
        if !(e.is_finite() && e >= 1.0) {
            return Err(Error::domain("ElectronIn", format!("E = {e} must be finite and >= 1")));
        }
        if !p_z.is_finite() || e * e - p_z * p_z < 1.0 - 1e-9 * e * e {
            return Err(Error::domain(
                "ElectronIn",
                format!("E^2 - p_z^2 = {} must be >= 1 (zero transverse momentum)", e * e - p_z * p_z),
            ));
        }
        if sigma != 1 && sigma != -1 {
            return Err(Error::domain("ElectronIn", format!("sigma = {sigma} must be +1 or -1")));
        }
        Ok(ElectronIn { e, p_z, sigma })
    }

    /// Head-on geometry: p_z = -sqrt(E^2 - 1).
    pub fn head_on(e: f64, sigma: i32) -> Result<Self> {
        if !(e.is_finite() && e >= 1.0) {
            return Err(Error::domain("ElectronIn", format!("E = {e} must be finite and >= 1")));
        }
        // for E >> 1 compute sqrt(E^2-1) = E*sqrt(1 - 1/E^2) stably
        let p = e * (1.0 - 1.0 / (e * e)).sqrt();
        ElectronIn::new(e, -p, sigma)
    }
}

/// Emission channel: harmonic number 𝒩 (photons absorbed from the
/// laser), polar angle of k', prior occupation of the outgoing photon
/// mode, and the longitude of k'.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel {
    pub harmonic: u32,
    pub theta: f64,
    pub n_occ: u64,
    pub phi_kprime: f64,
}

impl Channel {
    pub fn new(harmonic: u32, theta: f64, n_occ: u64) -> Result<Self> {
        Self::with_phi(harmonic, theta, n_occ, 0.0)
    }

    pub fn with_phi(harmonic: u32, theta: f64, n_occ: u64, phi_kprime: f64) -> Result<Self> {
        if harmonic < 1 {
            return Err(Error::domain("Channel", "harmonic must be >= 1"));
        }
        if !(theta.is_finite() && (0.0..=std::f64::consts::PI).contains(&theta)) {
            return Err(Error::domain("Channel", format!("theta = {theta} outside [0, pi]")));
        }
        if !phi_kprime.is_finite() {
            return Err(Error::domain("Channel", "phi_kprime must be finite"));
        }
        Ok(Channel { harmonic, theta, n_occ, phi_kprime })
    }
}

/// Full closed-form scattered state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterKinematics {
    /// emitted photon energy / m
    pub kprime: f64,
    pub eprime: f64,
    pub pprime_z: f64,
    pub pprime_perp: f64,
    /// a0 / (k (E - p_z)), the incident transverse-orbit radius
    pub r: f64,
    /// a0 / (k (E' - p'_z)), the scattered one
    pub rprime: f64,
    /// ponderomotive shift a0^2 / (2(E - p_z))
    pub pondero: f64,
    /// Bessel argument ratio: the order-𝒩 Bessel functions are
    /// evaluated at S * 𝒩
    pub s: f64,
}

/// E - p_z cos(theta) without the catastrophic cancellation that a
/// direct evaluation suffers for p_z < 0, E >> 1, theta near pi
/// (~8 digits lost at the Table regimes). Uses exact Sterbenz
/// subtraction E + p_z plus a positive remainder.
pub(crate) fn e_minus_pz_cos_theta(e: f64, p_z: f64, theta: f64) -> f64 {
    let h = 0.5 * theta;
    if p_z < 0.0 {
        let c = h.cos();
        (e + p_z) + (-p_z) * 2.0 * c * c
    } else {
        let s = h.sin();
        (e - p_z) + p_z * 2.0 * s * s
    }
}

/// 1 - cos(theta), accurate near theta = 0.
fn one_minus_cos(theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    2.0 * s * s
}

/// R = a0 / (k (E - p_z)): radius of the transverse circular orbit the
/// laser drives, in units of lambda_C.
pub fn r_parameter(laser: &LaserParams, e: f64, p_z: f64) -> Result<f64> {
    let u = e - p_z;
    if !(u > 0.0) {
        return Err(Error::domain("r_parameter", format!("E - p_z = {u} must be > 0")));
    }
    Ok(laser.a0 / (laser.k * u))
}

/// Ponderomotive shift c = a0^2 / (2(E - p_z)) = (a0/2) R k.
pub fn ponderomotive_shift(laser: &LaserParams, e: f64, p_z: f64) -> Result<f64> {
    let u = e - p_z;
    if !(u > 0.0) {
        return Err(Error::domain("ponderomotive_shift", format!("E - p_z = {u} must be > 0")));
    }
    Ok(laser.a0 * laser.a0 / (2.0 * u))
}

/// Emitted photon energy for harmonic 𝒩 at polar angle theta:
/// k' = 𝒩 k (E - p_z) / [E + (𝒩k + c)(1 - cos theta) - p_z cos theta].
pub fn emitted_photon_energy(
    laser: &LaserParams,
    electron: &ElectronIn,
    harmonic: u32,
    theta: f64,
) -> Result<f64> {
    if harmonic < 1 {
        return Err(Error::precondition("emitted_photon_energy", "harmonic must be >= 1"));
    }
    if !(theta.is_finite() && (0.0..=std::f64::consts::PI).contains(&theta)) {
        return Err(Error::precondition("emitted_photon_energy", format!("theta = {theta} outside [0, pi]")));
    }
    let c = ponderomotive_shift(laser, electron.e, electron.p_z)?;
    let nk = harmonic as f64 * laser.k;
    let den = e_minus_pz_cos_theta(electron.e, electron.p_z, theta) + (nk + c) * one_minus_cos(theta);
    if !(den > 0.0) {
        return Err(Error::domain("emitted_photon_energy", format!("denominator {den} <= 0")));
    }
    Ok(nk * (electron.e - electron.p_z) / den)
}

/// Bessel argument ratio S = a0 sin theta / [E + c(1-cos theta) - p_z cos theta];
/// independent of the harmonic, and S*𝒩 = p'_perp R' for every 𝒩.
pub fn bessel_argument_s(laser: &LaserParams, electron: &ElectronIn, theta: f64) -> Result<f64> {
    if !(theta.is_finite() && (0.0..=std::f64::consts::PI).contains(&theta)) {
        return Err(Error::precondition("bessel_argument_s", format!("theta = {theta} outside [0, pi]")));
    }
    let c = ponderomotive_shift(laser, electron.e, electron.p_z)?;
    let den = e_minus_pz_cos_theta(electron.e, electron.p_z, theta) + c * one_minus_cos(theta);
    if !(den > 0.0) {
        return Err(Error::domain("bessel_argument_s", format!("denominator {den} <= 0")));
    }
    Ok(laser.a0 * theta.sin() / den)
}

/// Solve the full scattered state from the selection rules.
pub fn scattered_state(
    laser: &LaserParams,
    electron: &ElectronIn,
    channel: &Channel,
) -> Result<ScatterKinematics> {
    let kprime = emitted_photon_energy(laser, electron, channel.harmonic, channel.theta)?;
    let u = electron.e - electron.p_z;
    let d = u - kprime * one_minus_cos(channel.theta);
    if !(d > 0.0) {
        return Err(Error::ClosedChannel { light_cone: d });
    }
    let pprime_perp = kprime * channel.theta.sin();
    // mass shell closes E' and p'_z from the two light-cone components
    let eplus = (pprime_perp * pprime_perp + 1.0) / d;
    let eprime = 0.5 * (d + eplus);
    let pprime_z = 0.5 * (eplus - d);
    Ok(ScatterKinematics {
        kprime,
        eprime,
        pprime_z,
        pprime_perp,
        r: laser.a0 / (laser.k * u),
        rprime: laser.a0 / (laser.k * d),
        pondero: laser.a0 * laser.a0 / (2.0 * u),
        s: bessel_argument_s(laser, electron, channel.theta)?,
    })
}

/// Laser intensity in W/m^2 for photon energy k and amplitude a0:
/// photon number density k a0^2/(4 pi alpha) per lambda_C^3 at energy
/// k streaming at c.
pub fn laser_flux_si(laser: &LaserParams) -> f64 {
    let ak = laser.a0 * laser.k;
    FLUX_SCALE_W_M2 * ak * ak / (4.0 * std::f64::consts::PI * ALPHA)
}

/// Single-photon Compton energy, written independently of
/// [`emitted_photon_energy`] as a cross-check path:
/// k' = k(E - p_z) / [E + k - (p_z + k) cos theta].
pub fn compton_limit_energy(k: f64, e: f64, p_z: f64, theta: f64) -> Result<f64> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::domain("compton_limit_energy", format!("k = {k} must be > 0")));
    }
    if !(theta.is_finite() && (0.0..=std::f64::consts::PI).contains(&theta)) {
        return Err(Error::precondition("compton_limit_energy", format!("theta = {theta} outside [0, pi]")));
    }
    let u = e - p_z;
    if !(u > 0.0) {
        return Err(Error::domain("compton_limit_energy", format!("E - p_z = {u} must be > 0")));
    }
    let den = e_minus_pz_cos_theta(e, p_z, theta) + k * one_minus_cos(theta);
    if !(den > 0.0) {
        return Err(Error::domain("compton_limit_energy", format!("denominator {den} <= 0")));
    }
    Ok(k * u / den)
}
