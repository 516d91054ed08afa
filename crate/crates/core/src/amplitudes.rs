//! The complex emission-amplitude layer.
//!
//! For a fixed channel (harmonic 𝒩, angle theta, spins sigma, sigma')
//! the amplitude splits over the outgoing polarization basis e'_1, e'_2
//! into twelve scalar coefficients: F_i^(nu) for the spin-keeping part
//! and G_i^(nu) for the spin-flipping part, nu labelling which of the
//! three neighboring Bessel orders (𝒩, 𝒩-sigma, 𝒩+sigma) the term
//! multiplies. Weighting by J at argument p'_perp R' and summing slots
//! gives the channel vectors 𝓕_𝒩 and 𝓖_𝒩; their outer-product sum over
//! spin is the polarization tensor 𝓩_𝒩.

use crate::bessel::bessel_j;
use crate::error::{Error, Result};
use crate::kinematics::{Channel, ElectronIn, LaserParams, ScatterKinematics};
use num_complex::Complex64;

/// A (possibly complex) polarization 3-vector, Cartesian components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolVector {
    pub components: [Complex64; 3],
}

impl PolVector {
    pub const ZERO: PolVector = PolVector {
        components: [Complex64::new(0.0, 0.0); 3],
    };

    pub fn new(x: Complex64, y: Complex64, z: Complex64) -> Self {
        PolVector { components: [x, y, z] }
    }

    pub fn real(x: f64, y: f64, z: f64) -> Self {
        PolVector {
            components: [x.into(), y.into(), z.into()],
        }
    }

    /// Hermitian inner product self* . other.
    pub fn dot_conj(&self, other: &PolVector) -> Complex64 {
        self.components
            .iter()
            .zip(other.components.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot_conj(self).re.sqrt()
    }

    pub fn scaled(&self, s: Complex64) -> PolVector {
        let mut c = self.components;
        for v in &mut c {
            *v *= s;
        }
        PolVector { components: c }
    }

    pub fn add(&self, other: &PolVector) -> PolVector {
        let mut c = self.components;
        for (v, o) in c.iter_mut().zip(other.components.iter()) {
            *v += o;
        }
        PolVector { components: c }
    }

    pub fn normalized(&self) -> Result<PolVector> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::DegenerateChannel { op: "PolVector::normalized" });
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }
}

/// Right-circular unit vector e = (x - i y)/sqrt(2).
pub fn circular_polarization() -> PolVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    PolVector::new(Complex64::new(s, 0.0), Complex64::new(0.0, -s), Complex64::new(0.0, 0.0))
}

/// Orthonormal linear basis transverse to
/// k_hat' = (sin θ cos φ, sin θ sin φ, cos θ):
/// e'_1 in the scattering plane, e'_2 azimuthal.
pub fn polarization_basis(theta: f64, phi_kprime: f64) -> (PolVector, PolVector) {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi_kprime.sin_cos();
    let e1 = PolVector::real(ct * cp, ct * sp, -st);
    let e2 = PolVector::real(-sp, cp, 0.0);
    (e1, e2)
}

/// Unit propagation direction of the emitted photon.
pub fn k_hat_prime(theta: f64, phi_kprime: f64) -> PolVector {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi_kprime.sin_cos();
    PolVector::real(st * cp, st * sp, ct)
}

/// Bessel-order slot of a coefficient: which neighbor of the harmonic
/// its Bessel weight sits at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    /// order 𝒩
    Zero = 0,
    /// order 𝒩 - sigma
    PlusSigma = 1,
    /// order 𝒩 + sigma
    MinusSigma = 2,
}

pub const SLOTS: [Slot; 3] = [Slot::Zero, Slot::PlusSigma, Slot::MinusSigma];

/// The twelve coefficients for one incident spin sigma.
/// Index layout: f[i-1][slot] with i in {1, 2}, slot per [`Slot`].
#[derive(Debug, Clone, Copy)]
pub struct AmplitudeSet {
    pub f: [[Complex64; 3]; 2],
    pub g: [[Complex64; 3]; 2],
    pub sigma: i32,
    /// kinematics the set was built from
    pub kin: ScatterKinematics,
}

impl AmplitudeSet {
    pub fn f_coeff(&self, i: usize, slot: Slot) -> Complex64 {
        self.f[i - 1][slot as usize]
    }

    pub fn g_coeff(&self, i: usize, slot: Slot) -> Complex64 {
        self.g[i - 1][slot as usize]
    }
}

/// The twelve spin-channel coefficients. i = 1 lies along e'_1
/// (in-plane), i = 2 along e'_2 (azimuthal); F keeps the spin, G flips
/// it. All mass factors carry m = 1.
pub fn fg_coefficients(
    laser: &LaserParams,
    kin: &ScatterKinematics,
    electron: &ElectronIn,
    theta: f64,
) -> AmplitudeSet {
    let m = 1.0;
    let sg = electron.sigma as f64;
    let (st, ct) = theta.sin_cos();
    let (e, pz) = (electron.e, electron.p_z);
    let (ep, ppz, pp) = (kin.eprime, kin.pprime_z, kin.pprime_perp);
    let (r, rp) = (kin.r, kin.rprime);
    let k = laser.k;
    // recurring light-cone factors
    let a = pz - e - m;
    let ap = ppz - ep - m;
    let k2rr = k * k * r * rp;
    // p_z(E'+m) - p'_z(E+m) cancels to ~1e-7 of its terms at the
    // high-energy regimes; in light-cone variables it is
    // (v D - u D')/2 + m(p_z - p'_z) with v = E + p_z (exact by
    // Sterbenz for near-head-on), D = E' - p'_z, D' = E' + p'_z
    // recovered stably from the mass shell
    let d = ep - ppz;
    let dp = (pp * pp + 1.0) / d;
    let cross = 0.5 * ((e + pz) * d - (e - pz) * dp) + m * (pz - ppz);

    let f1_0 = -ct * pp * (e + m) - st * ((ep + m) * pz + (e + m) * ppz + 0.5 * k2rr * a * ap);
    let f1_s = 0.5 * k * (ct * r * a * ap + st * pp * ((r + rp) * (e + m) - (r - rp) * pz));
    let f1_ms = 0.5 * k * ct * rp * a * ap;
    let g1_0 = sg * (ct * cross + st * pp * (0.5 * k2rr * a + e + m));
    let g1_s = -sg * 0.5 * k * (ct * r * pp * a + st * (r * a * (ppz + ep + m) - rp * (pz + e + m) * ap));
    let g1_ms = -sg * 0.5 * k * ct * rp * pp * a;

    let f2_0 = -sg * pp * (e + m);
    let f2_s = -sg * 0.5 * k * r * a * ap;
    let f2_ms = sg * 0.5 * k * rp * a * ap;
    let g2_0 = cross;
    let g2_s = 0.5 * k * r * pp * a;
    let g2_ms = -0.5 * k * rp * pp * a;

    let re = |v: f64| Complex64::new(v, 0.0);
    let im = |v: f64| Complex64::new(0.0, v);
    AmplitudeSet {
        f: [
            [re(f1_0), re(f1_s), re(f1_ms)],
            [im(f2_0), im(f2_s), im(f2_ms)],
        ],
        g: [
            [re(g1_0), re(g1_s), re(g1_ms)],
            [im(g2_0), im(g2_s), im(g2_ms)],
        ],
        sigma: electron.sigma,
        kin: *kin,
    }
}

/// The Bessel orders the three slots weight, for harmonic 𝒩 and spin
/// sigma: (0) -> 𝒩, (sigma) -> 𝒩 - sigma, (-sigma) -> 𝒩 + sigma.
pub fn slot_orders(harmonic: u32, sigma: i32) -> [i64; 3] {
    let n = harmonic as i64;
    [n, n - sigma as i64, n + sigma as i64]
}

/// Bessel weights J_order(p'_perp R') for the three slots.
pub fn slot_weights(kin: &ScatterKinematics, harmonic: u32, sigma: i32) -> Result<[f64; 3]> {
    let arg = kin.pprime_perp * kin.rprime;
    let orders = slot_orders(harmonic, sigma);
    Ok([
        bessel_j(orders[0], arg)?,
        bessel_j(orders[1], arg)?,
        bessel_j(orders[2], arg)?,
    ])
}

/// Bessel-weighted channel vectors for harmonic 𝒩.
#[derive(Debug, Clone, Copy)]
pub struct ChannelVectors {
    pub script_f: PolVector,
    pub script_g: PolVector,
    pub harmonic: u32,
    pub sigma: i32,
    /// kinematics snapshot for mismatch checks downstream
    pub kin: ScatterKinematics,
}

/// 𝓕_𝒩 = sum_i sum_nu F_i^(nu) J_{𝒩-nu} e'_i, likewise 𝓖_𝒩.
pub fn channel_vectors(
    kin: &ScatterKinematics,
    amps: &AmplitudeSet,
    channel: &Channel,
) -> Result<ChannelVectors> {
    let weights = slot_weights(kin, channel.harmonic, amps.sigma)?;
    let (e1, e2) = polarization_basis(channel.theta, channel.phi_kprime);
    let basis = [e1, e2];
    let mut script_f = PolVector::ZERO;
    let mut script_g = PolVector::ZERO;
    for i in 0..2 {
        let mut fsum = Complex64::new(0.0, 0.0);
        let mut gsum = Complex64::new(0.0, 0.0);
        for (slot, w) in weights.iter().enumerate() {
            fsum += amps.f[i][slot] * *w;
            gsum += amps.g[i][slot] * *w;
        }
        script_f = script_f.add(&basis[i].scaled(fsum));
        script_g = script_g.add(&basis[i].scaled(gsum));
    }
    Ok(ChannelVectors {
        script_f,
        script_g,
        harmonic: channel.harmonic,
        sigma: amps.sigma,
        kin: *kin,
    })
}

/// Superposition vector 𝓗_𝒩 = a1* 𝓕_𝒩 + a2* 𝓖_𝒩 e^{i sigma phi_k'}
/// for outgoing spin amplitudes (a1, a2), plus its unit direction when
/// it is nonzero: the one polarization the channel can populate.
pub fn script_h(
    vecs: &ChannelVectors,
    a1: Complex64,
    a2: Complex64,
    phi_kprime: f64,
) -> Result<(PolVector, Option<PolVector>)> {
    let norm2 = a1.norm_sqr() + a2.norm_sqr();
    if (norm2 - 1.0).abs() > 1e-10 {
        return Err(Error::precondition(
            "script_h",
            format!("|a1|^2 + |a2|^2 = {norm2} must be 1"),
        ));
    }
    let phase = Complex64::from_polar(1.0, vecs.sigma as f64 * phi_kprime);
    let h = vecs
        .script_f
        .scaled(a1.conj())
        .add(&vecs.script_g.scaled(a2.conj() * phase));
    let unit = if h.norm() > 0.0 { Some(h.normalized()?) } else { None };
    Ok((h, unit))
}

/// Hermitian polarization tensor, Cartesian 3x3.
#[derive(Debug, Clone, Copy)]
pub struct ZTensor {
    pub entries: [[Complex64; 3]; 3],
}

impl ZTensor {
    /// Sandwich a* . Z . b.
    pub fn sandwich(&self, a: &PolVector, b: &PolVector) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for r in 0..3 {
            for c in 0..3 {
                s += a.components[r].conj() * self.entries[r][c] * b.components[c];
            }
        }
        s
    }

    /// The 2x2 block in the transverse basis (e'_1, e'_2).
    pub fn transverse_block(&self, theta: f64, phi_kprime: f64) -> [[Complex64; 2]; 2] {
        let (e1, e2) = polarization_basis(theta, phi_kprime);
        let basis = [e1, e2];
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                out[r][c] = self.sandwich(&basis[r], &basis[c]);
            }
        }
        out
    }
}

fn outer_add(acc: &mut [[Complex64; 3]; 3], v: &PolVector) {
    for r in 0..3 {
        for c in 0..3 {
            acc[r][c] += v.components[r] * v.components[c].conj();
        }
    }
}

/// 𝓩_𝒩 = sum over sigma of (𝓕𝓕† + 𝓖𝓖†).
pub fn z_tensor(vecs_plus: &ChannelVectors, vecs_minus: &ChannelVectors) -> Result<ZTensor> {
    if vecs_plus.harmonic != vecs_minus.harmonic
        || vecs_plus.kin != vecs_minus.kin
        || vecs_plus.sigma == vecs_minus.sigma
    {
        return Err(Error::precondition(
            "z_tensor",
            "requires both spin channels at identical kinematics",
        ));
    }
    let mut entries = [[Complex64::new(0.0, 0.0); 3]; 3];
    for v in [vecs_plus, vecs_minus] {
        outer_add(&mut entries, &v.script_f);
        outer_add(&mut entries, &v.script_g);
    }
    Ok(ZTensor { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::scattered_state;

    fn setup(a0: f64, k: f64, e: f64, sigma: i32, n: u32, theta: f64) -> (LaserParams, ElectronIn, Channel, ScatterKinematics) {
        let laser = LaserParams::new(a0, k).unwrap();
        let el = ElectronIn::head_on(e, sigma).unwrap();
        let ch = Channel::new(n, theta, 0).unwrap();
        let kin = scattered_state(&laser, &el, &ch).unwrap();
        (laser, el, ch, kin)
    }

    #[test]
    fn basis_orthonormal_and_transverse() {
        for (theta, phi) in [(0.0, 0.0), (1.2, 0.7), (3.14, -2.0), (std::f64::consts::PI, 1.0)] {
            let (e1, e2) = polarization_basis(theta, phi);
            let kh = k_hat_prime(theta, phi);
            assert!((e1.norm() - 1.0).abs() < 1e-14);
            assert!((e2.norm() - 1.0).abs() < 1e-14);
            assert!(e1.dot_conj(&e2).norm() < 1e-14);
            assert!(e1.dot_conj(&kh).norm() < 1e-14);
            assert!(e2.dot_conj(&kh).norm() < 1e-14);
        }
        let (e1, e2) = polarization_basis(0.0, 0.0);
        assert_eq!(e1.components[0], Complex64::new(1.0, 0.0));
        assert_eq!(e2.components[1], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn circular_overlaps() {
        // |e . e'_1|^2 = cos^2(theta)/2, |e . e'_2|^2 = 1/2
        let e = circular_polarization();
        for theta in [0.3, 1.5, 2.8, 3.14] {
            let (e1, e2) = polarization_basis(theta, 0.0);
            let o1 = e1.dot_conj(&e).norm_sqr();
            let o2 = e2.dot_conj(&e).norm_sqr();
            assert!((o1 - 0.5 * theta.cos().powi(2)).abs() < 1e-14, "theta = {theta}");
            assert!((o2 - 0.5).abs() < 1e-14);
        }
        assert!((circular_polarization().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn twelve_tuple_frozen_oracle() {
        // independent extended-precision transcription at
        // a0 = 1.5e-2, k = 3.09e-6, E = 7000 head-on, harmonic 1,
        // theta = 3.14, sigma = +1
        let (laser, el, _ch, kin) = setup(1.5e-2, 3.09e-6, 7000.0, 1, 1, 3.14);
        let a = fg_coefficients(&laser, &kin, &el, 3.14);
        let f1 = [156048.42781675411, -104.94240367430122, -105.01487199187371];
        let f2 = [-53.861240646917495, -104.94253686194022, 105.01500517951272];
        let g1 = [4.9170269241735183, -5.7704277441393812e-5, -5.7744125317531362e-5];
        let g2 = [-4.8312507895140239, -5.7704350676773215e-5, 5.7744198552908137e-5];
        for s in 0..3 {
            assert!((a.f[0][s].re / f1[s] - 1.0).abs() < 1e-10, "F1[{s}] = {}", a.f[0][s].re);
            assert_eq!(a.f[0][s].im, 0.0);
            assert!((a.f[1][s].im / f2[s] - 1.0).abs() < 1e-10, "F2[{s}] = {}", a.f[1][s].im);
            assert_eq!(a.f[1][s].re, 0.0);
            assert!((a.g[0][s].re / g1[s] - 1.0).abs() < 1e-10, "G1[{s}] = {}", a.g[0][s].re);
            assert_eq!(a.g[0][s].im, 0.0);
            assert!((a.g[1][s].im / g2[s] - 1.0).abs() < 1e-10, "G2[{s}] = {}", a.g[1][s].im);
            assert_eq!(a.g[1][s].re, 0.0);
        }
    }

    #[test]
    fn twelve_tuple_generic_frozen() {
        let laser = LaserParams::new(1.5, 0.7).unwrap();
        let el = ElectronIn::new(5.0, -(24.0_f64.sqrt()), 1).unwrap();
        let ch = Channel::new(3, 2.0, 0).unwrap();
        let kin = scattered_state(&laser, &el, &ch).unwrap();
        let a = fg_coefficients(&laser, &kin, &el, 2.0);
        let f1 = [34.922787649490833, 0.70156274342018158, -4.0726347284332282];
        let f2 = [-18.604194271968236, -5.0123354794114203, 9.7865329512648299];
        let g1 = [21.852937938615071, 0.35837910174322541, -2.0804228693626786];
        let g2 = [-13.516915407203564, -2.5604499434932396, 4.999251914599144];
        for s in 0..3 {
            assert!((a.f[0][s].re / f1[s] - 1.0).abs() < 1e-12);
            assert!((a.f[1][s].im / f2[s] - 1.0).abs() < 1e-12);
            assert!((a.g[0][s].re / g1[s] - 1.0).abs() < 1e-12);
            assert!((a.g[1][s].im / g2[s] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sigma_flip_symmetry() {
        // F1 even under sigma flip; F2, G1 odd; G2 even
        let (laser, el, _ch, kin) = setup(1.5e-2, 3.09e-6, 7000.0, 1, 1, 3.14);
        let elm = ElectronIn::new(el.e, el.p_z, -1).unwrap();
        let ap = fg_coefficients(&laser, &kin, &el, 3.14);
        let am = fg_coefficients(&laser, &kin, &elm, 3.14);
        for s in 0..3 {
            assert_eq!(ap.f[0][s], am.f[0][s]);
            assert_eq!(ap.f[1][s], -am.f[1][s]);
            assert_eq!(ap.g[0][s], -am.g[0][s]);
            assert_eq!(ap.g[1][s], am.g[1][s]);
        }
    }

    #[test]
    fn slot_ratio_and_zero_amplitude() {
        let (laser, el, _ch, kin) = setup(1.5, 0.7, 5.0, 1, 3, 2.0);
        let a = fg_coefficients(&laser, &kin, &el, 2.0);
        // F2 slot ratio (+sigma)/(-sigma) = -R/R'
        let ratio = a.f_coeff(2, Slot::PlusSigma) / a.f_coeff(2, Slot::MinusSigma);
        assert!((ratio.re + kin.r / kin.rprime).abs() < 1e-13 && ratio.im.abs() < 1e-15);
        // a0 = 0 kills the sideband slots
        let laser0 = LaserParams::new(0.0, 0.7).unwrap();
        let ch = Channel::new(3, 2.0, 0).unwrap();
        let kin0 = scattered_state(&laser0, &el, &ch).unwrap();
        let a0set = fg_coefficients(&laser0, &kin0, &el, 2.0);
        for i in 0..2 {
            for s in 1..3 {
                assert_eq!(a0set.f[i][s], Complex64::new(0.0, 0.0));
                assert_eq!(a0set.g[i][s], Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn forward_elastic_all_zero() {
        // a0 = 0, theta = 0: everything vanishes
        let laser = LaserParams::new(0.0, 1e-3).unwrap();
        let el = ElectronIn::head_on(10.0, 1).unwrap();
        let ch = Channel::new(1, 0.0, 0).unwrap();
        let kin = scattered_state(&laser, &el, &ch).unwrap();
        let a = fg_coefficients(&laser, &kin, &el, 0.0);
        for i in 0..2 {
            for s in 0..3 {
                assert!(a.f[i][s].norm() < 1e-12, "F[{i}][{s}] = {}", a.f[i][s]);
                assert!(a.g[i][s].norm() < 1e-12);
            }
        }
    }

    #[test]
    fn channel_vectors_transverse() {
        let (laser, el, ch, kin) = setup(10.5, 4.43e-9, 7000.0, 1, 523, 3.14);
        let a = fg_coefficients(&laser, &kin, &el, ch.theta);
        let v = channel_vectors(&kin, &a, &ch).unwrap();
        let kh = k_hat_prime(ch.theta, ch.phi_kprime);
        let nf = v.script_f.norm();
        let ng = v.script_g.norm();
        assert!(nf.is_finite() && nf > 0.0);
        assert!(kh.dot_conj(&v.script_f).norm() <= 1e-12 * nf);
        assert!(kh.dot_conj(&v.script_g).norm() <= 1e-12 * ng);
    }

    #[test]
    fn no_laser_no_emission() {
        let laser = LaserParams::new(0.0, 3.09e-6).unwrap();
        let el = ElectronIn::head_on(300.0, 1).unwrap();
        let ch = Channel::new(1, 2.5, 0).unwrap();
        let kin = scattered_state(&laser, &el, &ch).unwrap();
        let a = fg_coefficients(&laser, &kin, &el, ch.theta);
        let v = channel_vectors(&kin, &a, &ch).unwrap();
        // arg = 0, so only the J_0 slot (order 𝒩-sigma = 0) survives,
        // and its coefficients carry R = 0
        assert!(v.script_f.norm() < 1e-12);
        assert!(v.script_g.norm() < 1e-12);
    }

    #[test]
    fn script_h_limits() {
        let (laser, el, ch, kin) = setup(1.5, 0.7, 5.0, 1, 3, 2.0);
        let a = fg_coefficients(&laser, &kin, &el, ch.theta);
        let v = channel_vectors(&kin, &a, &ch).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let (h, unit) = script_h(&v, one, zero, 0.0).unwrap();
        assert_eq!(h, v.script_f);
        let u = unit.unwrap();
        assert!((u.norm() - 1.0).abs() < 1e-14);
        let (h, _) = script_h(&v, zero, one, 0.0).unwrap();
        assert_eq!(h, v.script_g);
        // orthogonal transverse vector gets zero overlap
        let (h, _) = script_h(&v, Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8), 0.3).unwrap();
        let (e1, e2) = polarization_basis(ch.theta, ch.phi_kprime);
        let h1 = e1.dot_conj(&h);
        let h2 = e2.dot_conj(&h);
        // e_perp ~ conj components swapped with a sign is orthogonal to h
        let perp = e1.scaled(-h2.conj()).add(&e2.scaled(h1.conj()));
        assert!(perp.dot_conj(&h).norm() <= 1e-12 * perp.norm() * h.norm());
        // unnormalized pair rejected
        assert!(script_h(&v, one, one, 0.0).is_err());
    }

    #[test]
    fn z_tensor_hermitian_psd() {
        let (laser, _el, ch, kin) = setup(10.5, 4.43e-9, 7000.0, 1, 523, 3.14);
        let elp = ElectronIn::head_on(7000.0, 1).unwrap();
        let elm = ElectronIn::head_on(7000.0, -1).unwrap();
        let aplus = fg_coefficients(&laser, &kin, &elp, ch.theta);
        let aminus = fg_coefficients(&laser, &kin, &elm, ch.theta);
        let vp = channel_vectors(&kin, &aplus, &ch).unwrap();
        let vm = channel_vectors(&kin, &aminus, &ch).unwrap();
        let z = z_tensor(&vp, &vm).unwrap();
        let scale = (0..3)
            .map(|r| z.entries[r][r].norm())
            .sum::<f64>();
        for r in 0..3 {
            for c in 0..3 {
                let diff = (z.entries[r][c] - z.entries[c][r].conj()).norm();
                assert!(diff <= 1e-12 * scale);
            }
        }
        // transverse 2x2 block eigenvalues >= 0
        let t = z.transverse_block(ch.theta, ch.phi_kprime);
        let tr = (t[0][0] + t[1][1]).re;
        let det = (t[0][0] * t[1][1] - t[0][1] * t[1][0]).re;
        let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
        let lo = 0.5 * tr - disc;
        assert!(lo >= -1e-12 * tr, "lambda_min = {lo}");
        // spin mismatch rejected
        assert!(z_tensor(&vp, &vp).is_err());
    }
}
