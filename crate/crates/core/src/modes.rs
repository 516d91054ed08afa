//! Numerical verification layer for the laser-dressed electron
//! eigenmodes: eigenvalues, spinors, pointwise mode evaluation,
//! eigen-equation residuals, reconstruction of the closed-form dressed
//! plane wave from the mode sum, and desk-scale orthonormality checks.
//!
//! Dirac matrices are in the standard representation:
//! alpha_i = offdiag(sigma_i, sigma_i), beta = diag(1, 1, -1, -1),
//! Sigma_i = diag(sigma_i, sigma_i). The anticommutation relations are
//! verified as a self-test.

use crate::bessel::bessel_j;
use crate::error::{Error, Result};
use crate::kinematics::LaserParams;
use num_complex::Complex64;

pub type Spinor = [Complex64; 4];

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// Dense complex 4x4, just enough linear algebra for this module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Matrix4(pub [[Complex64; 4]; 4]);

impl Matrix4 {
    pub const ZERO: Matrix4 = Matrix4([[C0; 4]; 4]);

    pub fn identity() -> Matrix4 {
        let mut m = Matrix4::ZERO;
        for i in 0..4 {
            m.0[i][i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn mul_vec(&self, v: &Spinor) -> Spinor {
        let mut out = [C0; 4];
        for r in 0..4 {
            for c in 0..4 {
                out[r] += self.0[r][c] * v[c];
            }
        }
        out
    }

    pub fn mul_mat(&self, other: &Matrix4) -> Matrix4 {
        let mut out = Matrix4::ZERO;
        for r in 0..4 {
            for c in 0..4 {
                for k in 0..4 {
                    out.0[r][c] += self.0[r][k] * other.0[k][c];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix4) -> Matrix4 {
        let mut out = *self;
        for r in 0..4 {
            for c in 0..4 {
                out.0[r][c] += other.0[r][c];
            }
        }
        out
    }

    pub fn scaled(&self, s: Complex64) -> Matrix4 {
        let mut out = *self;
        for r in 0..4 {
            for c in 0..4 {
                out.0[r][c] *= s;
            }
        }
        out
    }
}

fn from_blocks(d: [[f64; 2]; 2], off: bool, imag: bool) -> Matrix4 {
    // places the 2x2 block `d` either on the diagonal (Sigma, beta
    // style) or off-diagonal (alpha style); `imag` multiplies by i
    let mut m = Matrix4::ZERO;
    for r in 0..2 {
        for c in 0..2 {
            let v = if imag {
                Complex64::new(0.0, d[r][c])
            } else {
                Complex64::new(d[r][c], 0.0)
            };
            if off {
                m.0[r][c + 2] = v;
                m.0[r + 2][c] = v;
            } else {
                m.0[r][c] = v;
                m.0[r + 2][c + 2] = v;
            }
        }
    }
    m
}

pub fn alpha_x() -> Matrix4 {
    from_blocks([[0.0, 1.0], [1.0, 0.0]], true, false)
}

pub fn alpha_y() -> Matrix4 {
    from_blocks([[0.0, -1.0], [1.0, 0.0]], true, true)
}

pub fn alpha_z() -> Matrix4 {
    from_blocks([[1.0, 0.0], [0.0, -1.0]], true, false)
}

pub fn beta() -> Matrix4 {
    let mut m = Matrix4::ZERO;
    for i in 0..4 {
        m.0[i][i] = Complex64::new(if i < 2 { 1.0 } else { -1.0 }, 0.0);
    }
    m
}

pub fn sigma_big_x() -> Matrix4 {
    from_blocks([[0.0, 1.0], [1.0, 0.0]], false, false)
}

pub fn sigma_big_y() -> Matrix4 {
    from_blocks([[0.0, -1.0], [1.0, 0.0]], false, true)
}

pub fn sigma_big_z() -> Matrix4 {
    from_blocks([[1.0, 0.0], [0.0, -1.0]], false, false)
}

/// i^n with exact values (no trig rounding), any sign of n.
fn ipow(n: i64) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn spinor_add(a: &Spinor, b: &Spinor) -> Spinor {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

fn spinor_scale(a: &Spinor, s: Complex64) -> Spinor {
    [a[0] * s, a[1] * s, a[2] * s, a[3] * s]
}

pub fn spinor_norm(a: &Spinor) -> f64 {
    a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn spinor_dot_conj(a: &Spinor, b: &Spinor) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Quantum numbers of one dressed mode: radial index n, spin sigma,
/// energy sign tau (+1 for electron states), longitudinal and
/// transverse momenta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeQuantumNumbers {
    pub n: i64,
    pub sigma: i32,
    pub tau: i32,
    pub p_z: f64,
    pub p_perp: f64,
}

impl ModeQuantumNumbers {
    pub fn new(n: i64, sigma: i32, tau: i32, p_z: f64, p_perp: f64) -> Result<Self> {
        if sigma != 1 && sigma != -1 {
            return Err(Error::domain("ModeQuantumNumbers", "sigma must be +-1"));
        }
        if tau != 1 && tau != -1 {
            return Err(Error::domain("ModeQuantumNumbers", "tau must be +-1"));
        }
        if !(p_perp >= 0.0) || !p_z.is_finite() || !p_perp.is_finite() {
            return Err(Error::domain("ModeQuantumNumbers", "p_perp must be finite and >= 0"));
        }
        Ok(ModeQuantumNumbers { n, sigma, tau, p_z, p_perp })
    }

    /// tau * sqrt(p^2 + 1)
    pub fn energy(&self) -> f64 {
        self.tau as f64 * (self.p_z * self.p_z + self.p_perp * self.p_perp + 1.0).sqrt()
    }
}

/// Quasi-energy of mode n: E + a0^2/(2(E - p_z)) + (sigma/2 - n) k.
/// Strictly decreasing in n with slope -k.
pub fn eigenvalue_epsilon(q: &ModeQuantumNumbers, laser: &LaserParams) -> Result<f64> {
    let e = q.energy();
    let u = e - q.p_z;
    if !(u > 0.0) {
        return Err(Error::domain("eigenvalue_epsilon", format!("E - p_z = {u} must be > 0")));
    }
    Ok(e + laser.a0 * laser.a0 / (2.0 * u) + (q.sigma as f64 / 2.0 - q.n as f64) * laser.k)
}

/// The two Sigma_z pieces of the free spinor, both with the
/// sqrt((E+1)/2E) normalization; u = u_plus + u_minus e^{i sigma phi_p}
/// satisfies u'u = 1. m = 1.
pub fn free_spinor_parts(p_z: f64, p_perp: f64, sigma: i32) -> (Spinor, Spinor) {
    let e = (p_z * p_z + p_perp * p_perp + 1.0).sqrt();
    let nrm = ((e + 1.0) / (2.0 * e)).sqrt();
    let s = sigma as f64;
    let re = |v: f64| Complex64::new(v, 0.0);
    // chi_sigma occupies component 0 (spin up) or 1 (spin down)
    let (hi, lo) = if sigma == 1 { (0usize, 1usize) } else { (1usize, 0usize) };
    let mut up = [C0; 4];
    up[hi] = re(nrm);
    up[hi + 2] = re(nrm * p_z * s / (e + 1.0));
    let mut um = [C0; 4];
    um[lo + 2] = re(nrm * p_perp / (e + 1.0));
    (up, um)
}

/// Positive-energy free spinor u = u_plus + u_minus e^{i sigma phi_p}.
pub fn free_spinor(p_z: f64, p_perp: f64, sigma: i32, phi_p: f64) -> Spinor {
    let (up, um) = free_spinor_parts(p_z, p_perp, sigma);
    let phase = Complex64::from_polar(1.0, sigma as f64 * phi_p);
    spinor_add(&up, &spinor_scale(&um, phase))
}

/// The laser-dressing matrix factor
/// 1 - (a0/(2(p_z - E)))[alpha_x cos kz + alpha_y sin kz
///                       + i(Sigma_y cos kz - Sigma_x sin kz)].
fn dressing_matrix(z: f64, e: f64, p_z: f64, laser: &LaserParams) -> Matrix4 {
    let (skz, ckz) = (laser.k * z).sin_cos();
    let coef = Complex64::new(-laser.a0 / (2.0 * (p_z - e)), 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut m = alpha_x().scaled(ckz.into());
    m = m.add(&alpha_y().scaled(skz.into()));
    m = m.add(&sigma_big_y().scaled(i * ckz));
    m = m.add(&sigma_big_x().scaled(-i * skz));
    Matrix4::identity().add(&m.scaled(coef))
}

/// Transverse coordinates shifted to the laser-driven orbit center:
/// x' = x + R sin kz, y' = y - R cos kz. Returns (rho', phi').
fn shifted_cylindrical(pos: &[f64; 3], r_orbit: f64, k: f64) -> (f64, f64) {
    let (skz, ckz) = (k * pos[2]).sin_cos();
    let xp = pos[0] + r_orbit * skz;
    let yp = pos[1] - r_orbit * ckz;
    (xp.hypot(yp), yp.atan2(xp))
}

fn require_electron_branch(op: &'static str, tau: i32) -> Result<()> {
    if tau != 1 {
        return Err(Error::precondition(op, "only positive-energy (tau = +1) states are evaluated"));
    }
    Ok(())
}

/// Pointwise value of the dressed eigenmode U_n, with the 1/(2 pi)
/// normalization applied.
pub fn mode_u_n(pos: &[f64; 3], q: &ModeQuantumNumbers, laser: &LaserParams) -> Result<Spinor> {
    require_electron_branch("mode_u_n", q.tau)?;
    let e = q.energy();
    let u_lc = e - q.p_z;
    let r_orbit = laser.a0 / (laser.k * u_lc);
    let pondero = laser.a0 * laser.a0 / (2.0 * u_lc);
    let (rhop, phip) = shifted_cylindrical(pos, r_orbit, laser.k);
    let (up, um) = free_spinor_parts(q.p_z, q.p_perp, q.sigma);
    // projection onto the Sigma_z = +-sigma subspaces of u is exactly
    // the u_plus / u_minus split
    let ns = q.n - q.sigma as i64;
    let j_n = bessel_j(q.n, q.p_perp * rhop)?;
    let j_ns = bessel_j(ns, q.p_perp * rhop)?;
    let term_p = spinor_scale(
        &up,
        ipow(q.n) * j_n * Complex64::from_polar(1.0, -(q.n as f64) * phip),
    );
    let term_m = spinor_scale(
        &um,
        ipow(ns) * j_ns * Complex64::from_polar(1.0, -(ns as f64) * phip),
    );
    let m = dressing_matrix(pos[2], e, q.p_z, laser);
    let vec = m.mul_vec(&spinor_add(&term_p, &term_m));
    let zphase = Complex64::from_polar(1.0, (q.p_z + pondero) * pos[2])
        / (2.0 * std::f64::consts::PI);
    Ok(spinor_scale(&vec, zphase))
}

/// The closed-form dressed plane wave (rotated-frame form, global
/// phase constant set to zero).
pub fn wolkow_psi_r(
    pos: &[f64; 3],
    t: f64,
    p_z: f64,
    p_perp: f64,
    phi_p: f64,
    sigma: i32,
    laser: &LaserParams,
) -> Result<Spinor> {
    if sigma != 1 && sigma != -1 {
        return Err(Error::domain("wolkow_psi_r", "sigma must be +-1"));
    }
    let e = (p_z * p_z + p_perp * p_perp + 1.0).sqrt();
    let u_lc = e - p_z;
    let r_orbit = laser.a0 / (laser.k * u_lc);
    let pondero = laser.a0 * laser.a0 / (2.0 * u_lc);
    let (rhop, phip) = shifted_cylindrical(pos, r_orbit, laser.k);
    let (up, um) = free_spinor_parts(p_z, p_perp, sigma);
    let s = sigma as f64;
    let half_kt = 0.5 * laser.k * t;
    let spinor = spinor_add(
        &spinor_scale(&up, Complex64::from_polar(1.0, -s * half_kt)),
        &spinor_scale(&um, Complex64::from_polar(1.0, s * half_kt + s * phi_p)),
    );
    let m = dressing_matrix(pos[2], e, p_z, laser);
    let phase = Complex64::from_polar(1.0, p_z * pos[2] - e * t)
        * Complex64::from_polar(1.0, p_perp * rhop * (laser.k * t + phi_p - phip).cos())
        * Complex64::from_polar(1.0, pondero * (pos[2] - t));
    Ok(spinor_scale(&m.mul_vec(&spinor), phase))
}

/// Reconstructs the dressed plane wave from the discrete modes:
/// 2 pi sum_{|n| <= n_max} e^{i n phi_p} e^{-i eps_n t} U_n(x)
/// (the 2 pi undoes the per-mode normalization).
pub fn mode_sum_reconstruction(
    pos: &[f64; 3],
    t: f64,
    p_z: f64,
    p_perp: f64,
    phi_p: f64,
    sigma: i32,
    laser: &LaserParams,
    n_max: i64,
) -> Result<Spinor> {
    let mut acc = [C0; 4];
    for n in -n_max..=n_max {
        let q = ModeQuantumNumbers::new(n, sigma, 1, p_z, p_perp)?;
        let eps = eigenvalue_epsilon(&q, laser)?;
        let un = mode_u_n(pos, &q, laser)?;
        let w = Complex64::from_polar(1.0, n as f64 * phi_p - eps * t);
        acc = spinor_add(&acc, &spinor_scale(&un, w));
    }
    Ok(spinor_scale(&acc, (2.0 * std::f64::consts::PI).into()))
}

/// Spatial sampling / quadrature parameters.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub rho_max: f64,
    pub z_max: f64,
    /// finite-difference step / radial quadrature step
    pub h: f64,
    /// mode-sum truncation
    pub n_max: i64,
}

/// Relative residual ||(H - eps_n) U_n|| / ||eps_n U_n|| over a fixed
/// interior sample set, with the Hamiltonian
/// H = alpha.(-i grad) + a0[alpha_x cos kz + alpha_y sin kz] + beta
///     + k (-i d/dphi + Sigma_z/2)
/// applied by 2nd-order central differences (d/dphi = x d/dy - y d/dx
/// taken pointwise in Cartesian form). Converges as O(h^2).
pub fn eigen_residual(q: &ModeQuantumNumbers, laser: &LaserParams, grid: &GridSpec) -> Result<f64> {
    require_electron_branch("eigen_residual", q.tau)?;
    let p = (q.p_z * q.p_z + q.p_perp * q.p_perp).sqrt();
    let h_limit = 0.1 / p.max(laser.k).max(1.0);
    if !(grid.h > 0.0 && grid.h <= h_limit) {
        return Err(Error::precondition(
            "eigen_residual",
            format!("step {} does not resolve the wavelengths (need <= {h_limit})", grid.h),
        ));
    }
    let eps = eigenvalue_epsilon(q, laser)?;
    let h = grid.h;
    let i = Complex64::new(0.0, 1.0);
    let (ax, ay, az, b, sz) = (alpha_x(), alpha_y(), alpha_z(), beta(), sigma_big_z());
    let mut res2 = 0.0;
    let mut nrm2 = 0.0;
    // fixed interior lattice, axis rho = 0 excluded by construction
    for ir in 0..3 {
        let rho = grid.rho_max * (0.3 + 0.3 * ir as f64);
        for ip in 0..3 {
            let phi = 2.0 * std::f64::consts::PI * ip as f64 / 3.0 + 0.1;
            for iz in 0..3 {
                let z = grid.z_max * (0.15 + 0.3 * iz as f64);
                let (x, y) = (rho * phi.cos(), rho * phi.sin());
                let f = |xx: f64, yy: f64, zz: f64| mode_u_n(&[xx, yy, zz], q, laser);
                let val = f(x, y, z)?;
                let dfx = df(&f(x + h, y, z)?, &f(x - h, y, z)?, h);
                let dfy = df(&f(x, y + h, z)?, &f(x, y - h, z)?, h);
                let dfz = df(&f(x, y, z + h)?, &f(x, y, z - h)?, h);
                let (skz, ckz) = (laser.k * z).sin_cos();
                let mut hval = spinor_scale(&ax.mul_vec(&dfx), -i);
                hval = spinor_add(&hval, &spinor_scale(&ay.mul_vec(&dfy), -i));
                hval = spinor_add(&hval, &spinor_scale(&az.mul_vec(&dfz), -i));
                hval = spinor_add(&hval, &spinor_scale(&ax.mul_vec(&val), (laser.a0 * ckz).into()));
                hval = spinor_add(&hval, &spinor_scale(&ay.mul_vec(&val), (laser.a0 * skz).into()));
                hval = spinor_add(&hval, &b.mul_vec(&val));
                // j_z = -i d/dphi + Sigma_z/2 with d/dphi = x d/dy - y d/dx
                let mut dphi = spinor_scale(&dfy, x.into());
                dphi = spinor_add(&dphi, &spinor_scale(&dfx, (-y).into()));
                hval = spinor_add(&hval, &spinor_scale(&dphi, -i * laser.k));
                hval = spinor_add(&hval, &spinor_scale(&sz.mul_vec(&val), (0.5 * laser.k).into()));
                let target = spinor_scale(&val, eps.into());
                let mut diff = [C0; 4];
                for c in 0..4 {
                    diff[c] = hval[c] - target[c];
                }
                res2 += diff.iter().map(|v| v.norm_sqr()).sum::<f64>();
                nrm2 += target.iter().map(|v| v.norm_sqr()).sum::<f64>();
            }
        }
    }
    Ok((res2 / nrm2).sqrt())
}

fn df(plus: &Spinor, minus: &Spinor, h: f64) -> Spinor {
    let mut out = [C0; 4];
    for c in 0..4 {
        out[c] = (plus[c] - minus[c]) / (2.0 * h);
    }
    out
}

/// Numerical overlap integral of two modes sharing (p_z, p_perp):
/// integral of U_{q1}^dagger U_{q2} rho drho dphi dz over phi in
/// [0, 2 pi), one laser z-period, and rho in [0, rho_max]. Off-diagonal
/// labels (n or sigma differing) must vanish relative to the diagonal.
/// Trapezoid in the periodic angles (spectrally accurate), Simpson in
/// rho with step ~ quad.h.
pub fn orthonormality_check(
    q1: &ModeQuantumNumbers,
    q2: &ModeQuantumNumbers,
    laser: &LaserParams,
    quad: &GridSpec,
) -> Result<Complex64> {
    require_electron_branch("orthonormality_check", q1.tau)?;
    require_electron_branch("orthonormality_check", q2.tau)?;
    if q1.p_z != q2.p_z || q1.p_perp != q2.p_perp {
        return Err(Error::precondition(
            "orthonormality_check",
            "modes must share p_z and p_perp (continuum labels are not resolvable)",
        ));
    }
    let pp = q1.p_perp;
    if pp <= 0.0 {
        return Err(Error::precondition("orthonormality_check", "p_perp must be > 0"));
    }
    let period = 2.0 * std::f64::consts::PI / pp;
    if quad.rho_max < 8.0 * period {
        return Err(Error::precondition(
            "orthonormality_check",
            format!("rho_max {} spans under 8 radial oscillations ({})", quad.rho_max, 8.0 * period),
        ));
    }
    if quad.h > 0.125 * period {
        return Err(Error::precondition(
            "orthonormality_check",
            format!("radial step {} under-resolves the oscillation period {period}", quad.h),
        ));
    }
    let e = q1.energy();
    let r_orbit = laser.a0 / (laser.k * (e - q1.p_z));
    // azimuthal bandwidth of the integrand after the Graf expansion
    let bw_phi = (pp * (quad.rho_max + r_orbit)).ceil() as usize
        + q1.n.unsigned_abs().max(q2.n.unsigned_abs()) as usize;
    let n_phi = 2 * bw_phi + 32;
    // the z-content decays with the Bessel order at argument p_perp R
    let bw_z = (pp * r_orbit).ceil() as usize
        + (q1.n - q2.n).unsigned_abs() as usize
        + q1.n.unsigned_abs().max(q2.n.unsigned_abs()) as usize;
    let n_z = 2 * bw_z + 32;
    // odd Simpson node count
    let mut n_rho = (quad.rho_max / quad.h).ceil() as usize;
    if n_rho % 2 == 1 {
        n_rho += 1;
    }
    let drho = quad.rho_max / n_rho as f64;
    let z_period = 2.0 * std::f64::consts::PI / laser.k;
    let mut total = C0;
    for iz in 0..n_z {
        let z = z_period * iz as f64 / n_z as f64;
        for iph in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * iph as f64 / n_phi as f64;
            let (cp, sp) = (phi.cos(), phi.sin());
            // Simpson along rho
            let mut line = C0;
            for irho in 0..=n_rho {
                let rho = drho * irho as f64;
                let w = if irho == 0 || irho == n_rho {
                    1.0
                } else if irho % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                let pos = [rho * cp, rho * sp, z];
                let u1 = mode_u_n(&pos, q1, laser)?;
                let u2 = mode_u_n(&pos, q2, laser)?;
                line += spinor_dot_conj(&u1, &u2) * (w * rho);
            }
            total += line * (drho / 3.0);
        }
    }
    let dphi = 2.0 * std::f64::consts::PI / n_phi as f64;
    let dz = z_period / n_z as f64;
    Ok(total * dphi * dz)
}
