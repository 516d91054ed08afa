//! Integer-order Bessel functions of the first kind, J_n(x), across the
//! small-, moderate-, and very-large-order regimes, plus the expansion
//! identities (Jacobi-Anger, Graf, two-term large-order asymptotic) used
//! as numerical test oracles throughout the crate.
//!
//! Two production evaluators are combined:
//! - an ascending power series (argument below [`SERIES_ARG_LIMIT`]),
//!   summed in log space so deep-evanescent orders do not underflow;
//! - Miller's downward recurrence with final normalization against
//!   J_0 + 2 sum J_{2k} = 1, with on-the-fly rescaling so intermediate
//!   values never overflow and the result is available in log form.
//!
//! The two-term large-order asymptotic is kept as a faithful
//! transcription for verification, not as a production path: its
//! accuracy degrades near sech(xi) -> 1 (order near argument).

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Default number of power-series terms.
pub const DEFAULT_SERIES_TERMS: usize = 60;

/// Power series is used below this argument, recurrence at or above it.
pub const SERIES_ARG_LIMIT: f64 = 12.0;

/// Smallest magnitude reported as a plain f64 value; below it the
/// log-scaled channel carries the result.
pub const UNDERFLOW_FLOOR: f64 = 1e-280;

/// Smallest order for which the two-term asymptotic form is accepted.
pub const ASYMPTOTIC_MIN_ORDER: i64 = 50;

/// Maximum |order| accepted by the production evaluators.
pub const MAX_ORDER: i64 = 100_000;

/// Sign and natural log of the magnitude of a value that may be far
/// outside f64 range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogScaled {
    /// -1.0, 0.0 or +1.0
    pub sign: f64,
    /// ln |value|; -inf for an exact zero
    pub ln_mag: f64,
}

impl LogScaled {
    pub const ZERO: LogScaled = LogScaled { sign: 0.0, ln_mag: f64::NEG_INFINITY };

    pub fn value(&self) -> f64 {
        self.sign * self.ln_mag.exp()
    }
}

/// One Bessel evaluation. `value` is the best-effort f64; `log_scaled`
/// is populated exactly when |value| < [`UNDERFLOW_FLOOR`] (the
/// underflow flag of the contract).
#[derive(Debug, Clone, Copy)]
pub struct BesselEval {
    pub order: i64,
    pub argument: f64,
    pub value: f64,
    pub log_scaled: Option<LogScaled>,
}

impl BesselEval {
    /// ln |J_n(x)| regardless of which channel carries it.
    pub fn ln_mag(&self) -> f64 {
        match self.log_scaled {
            Some(ls) => ls.ln_mag,
            None => self.value.abs().ln(),
        }
    }

    pub fn sign(&self) -> f64 {
        match self.log_scaled {
            Some(ls) => ls.sign,
            None => {
                if self.value == 0.0 {
                    0.0
                } else {
                    self.value.signum()
                }
            }
        }
    }
}

/// Evaluation strategy selector for the CLI debugging surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Auto,
    Series,
    Recurrence,
    Asymptotic,
}

fn check_arg(op: &'static str, order: i64, x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::domain(op, format!("non-finite argument {x}")));
    }
    if x < 0.0 {
        return Err(Error::domain(op, format!("negative argument {x}")));
    }
    if order.abs() > MAX_ORDER {
        return Err(Error::precondition(op, format!("|order| = {} exceeds {MAX_ORDER}", order.abs())));
    }
    Ok(())
}

/// ln(n!) for non-negative n.
fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    if n <= 256 {
        let mut s = 0.0;
        for k in 2..=n {
            s += (k as f64).ln();
        }
        return s;
    }
    // Stirling series; error < 1e-16 for n > 256
    let x = (n + 1) as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

/// Ascending power series for J_n(x), n >= 0, summed in log space:
/// the leading factor (x/2)^n / n! is carried as a log so arbitrarily
/// high orders at small argument stay representable.
fn series_log(n: u64, x: f64, terms: usize) -> LogScaled {
    if x == 0.0 {
        return if n == 0 {
            LogScaled { sign: 1.0, ln_mag: 0.0 }
        } else {
            LogScaled::ZERO
        };
    }
    let half = 0.5 * x;
    let lead = (n as f64) * half.ln() - ln_factorial(n);
    let q = half * half;
    // compensated summation of 1 - q/(1(n+1)) + ...
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut comp = 0.0_f64;
    for m in 1..terms {
        term *= -q / ((m as f64) * (n as f64 + m as f64));
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if term.abs() < 1e-18 * sum.abs().max(1.0) {
            break;
        }
    }
    if sum == 0.0 {
        return LogScaled::ZERO;
    }
    LogScaled { sign: sum.signum(), ln_mag: lead + sum.abs().ln() }
}

/// Start offset above max(order, argument) for downward recurrence.
///
/// The nominal offset of 40 is not sufficient near the turning point
/// (order close to argument, both large, e.g. order 523 at argument
/// 512): the evanescent decay between start and target then carries too
/// few decades to damp the arbitrary seed. The Airy-zone width grows as
/// the cube root of the order, so the offset is widened accordingly.
fn miller_offset(nm: u64) -> u64 {
    40 + (160.0 * nm as f64).sqrt().ceil() as u64
}

const RESCALE_LIMIT: f64 = 1e250;
const RESCALE_FACTOR: f64 = 1e-250;
const RESCALE_LN: f64 = 575.6462732485114; // ln(1e250)

/// Miller's algorithm: downward recurrence from a seed above the
/// turning point, normalized by J_0(x) + 2 sum_k J_{2k}(x) = 1.
/// Returns the target order in log form (always finite-safe).
fn miller_log(n: u64, x: f64, offset: Option<u64>) -> LogScaled {
    debug_assert!(x > 0.0);
    let nm = n.max(x.ceil() as u64);
    let start = nm + offset.unwrap_or_else(|| miller_offset(nm));
    let mut fp = 0.0_f64; // f_{j+1}
    let mut f = 1e-200_f64; // f_j, arbitrary seed scale
    let mut scale_ln = 0.0_f64;
    let mut norm = 0.0_f64;
    let mut cap: Option<(f64, f64)> = None; // (ln|f_n| + scale at capture, sign)
    let mut j = start;
    loop {
        if j % 2 == 0 {
            norm += if j == 0 { f } else { 2.0 * f };
        }
        if j == n {
            cap = Some((f.abs().ln() + scale_ln, if f == 0.0 { 0.0 } else { f.signum() }));
        }
        if j == 0 {
            break;
        }
        let fm = (2.0 * j as f64 / x) * f - fp;
        fp = f;
        f = fm;
        j -= 1;
        if f.abs() > RESCALE_LIMIT {
            f *= RESCALE_FACTOR;
            fp *= RESCALE_FACTOR;
            norm *= RESCALE_FACTOR;
            // the captured target is already in absolute log units
            scale_ln += RESCALE_LN;
        }
    }
    let (cap_ln, cap_sign) = cap.expect("target order within recurrence range");
    if cap_sign == 0.0 || norm == 0.0 {
        return LogScaled::ZERO;
    }
    let norm_ln = norm.abs().ln() + scale_ln;
    LogScaled { sign: cap_sign * norm.signum(), ln_mag: cap_ln - norm_ln }
}

fn eval_nonneg(n: u64, x: f64, method: Method) -> Result<LogScaled> {
    let ls = match method {
        Method::Series => series_log(n, x, DEFAULT_SERIES_TERMS),
        Method::Recurrence => {
            if x == 0.0 {
                series_log(n, x, 1)
            } else {
                miller_log(n, x, None)
            }
        }
        Method::Auto => {
            if x < SERIES_ARG_LIMIT {
                series_log(n, x, DEFAULT_SERIES_TERMS)
            } else {
                miller_log(n, x, None)
            }
        }
        Method::Asymptotic => {
            if (n as i64) < ASYMPTOTIC_MIN_ORDER {
                return Err(Error::precondition(
                    "bessel_j_two_term_asymptotic",
                    format!("order {n} below asymptotic threshold {ASYMPTOTIC_MIN_ORDER}"),
                ));
            }
            return two_term_asymptotic_log(n as i64, x / n as f64);
        }
    };
    Ok(ls)
}

fn finish(order: i64, x: f64, ls: LogScaled) -> BesselEval {
    let value = if ls.ln_mag > UNDERFLOW_FLOOR.ln() {
        ls.value()
    } else {
        // subnormal-or-zero best effort
        ls.value()
    };
    let log_scaled = if value.abs() < UNDERFLOW_FLOOR { Some(ls) } else { None };
    BesselEval { order, argument: x, value, log_scaled }
}

/// J_n(x) with method selection and full (value + log) reporting.
pub fn bessel_j_with(order: i64, argument: f64, method: Method) -> Result<BesselEval> {
    check_arg("bessel_j", order, argument)?;
    let n = order.unsigned_abs();
    let mut ls = eval_nonneg(n, argument, method)?;
    // reflection J_{-n} = (-1)^n J_n
    if order < 0 && n % 2 == 1 {
        ls.sign = -ls.sign;
    }
    Ok(finish(order, argument, ls))
}

/// J_n(x) as a plain f64 (underflows quietly to subnormal/zero;
/// use [`bessel_j_eval`] when the log channel matters).
pub fn bessel_j(order: i64, argument: f64) -> Result<f64> {
    Ok(bessel_j_with(order, argument, Method::Auto)?.value)
}

/// J_n(x) with the log-scaled underflow channel.
pub fn bessel_j_eval(order: i64, argument: f64) -> Result<BesselEval> {
    bessel_j_with(order, argument, Method::Auto)
}

/// All of J_0(x) .. J_{n_max}(x) in one pass.
pub fn bessel_j_array(n_max: i64, argument: f64) -> Result<Vec<f64>> {
    check_arg("bessel_j_array", n_max, argument)?;
    let n_max = n_max.max(0) as u64;
    let mut out = Vec::with_capacity(n_max as usize + 1);
    if argument < SERIES_ARG_LIMIT {
        for n in 0..=n_max {
            out.push(series_log(n, argument, DEFAULT_SERIES_TERMS).value());
        }
        return Ok(out);
    }
    // single downward pass capturing every order in log form
    let x = argument;
    let nm = n_max.max(x.ceil() as u64);
    let start = nm + miller_offset(nm);
    let mut caps = vec![LogScaled::ZERO; n_max as usize + 1];
    let mut fp = 0.0_f64;
    let mut f = 1e-200_f64;
    let mut scale_ln = 0.0_f64;
    let mut norm = 0.0_f64;
    let mut j = start;
    loop {
        if j % 2 == 0 {
            norm += if j == 0 { f } else { 2.0 * f };
        }
        if j <= n_max {
            caps[j as usize] = LogScaled {
                sign: if f == 0.0 { 0.0 } else { f.signum() },
                ln_mag: f.abs().ln() + scale_ln,
            };
        }
        if j == 0 {
            break;
        }
        let fm = (2.0 * j as f64 / x) * f - fp;
        fp = f;
        f = fm;
        j -= 1;
        if f.abs() > RESCALE_LIMIT {
            f *= RESCALE_FACTOR;
            fp *= RESCALE_FACTOR;
            norm *= RESCALE_FACTOR;
            scale_ln += RESCALE_LN;
        }
    }
    let norm_ln = norm.abs().ln() + scale_ln;
    let norm_sign = norm.signum();
    for cap in caps {
        let v = cap.sign * norm_sign * (cap.ln_mag - norm_ln).exp();
        out.push(v);
    }
    Ok(out)
}

/// The two-term large-order asymptotic, in log form:
/// J_N(N sech xi) ~ e^{N(tanh xi - xi)} / sqrt(2 N pi tanh xi)
///                  * [1 - (1/8 - (5/24) coth^2 xi) / (N tanh xi)].
pub fn two_term_asymptotic_log(order: i64, sech_xi: f64) -> Result<LogScaled> {
    const OP: &str = "bessel_j_two_term_asymptotic";
    if !(sech_xi > 0.0 && sech_xi < 1.0) {
        return Err(Error::domain(OP, format!("sech xi = {sech_xi} outside (0, 1)")));
    }
    if order < 1 {
        return Err(Error::precondition(OP, format!("order {order} must be >= 1")));
    }
    let n = order as f64;
    // xi = arcsech(S) = acosh(1/S)
    let xi = (1.0 / sech_xi).acosh();
    let t = xi.tanh();
    let correction = 1.0 - (1.0 / 8.0 - (5.0 / 24.0) / (t * t)) / (n * t);
    let ln_mag = n * (t - xi) - 0.5 * (2.0 * n * std::f64::consts::PI * t).ln() + correction.abs().ln();
    Ok(LogScaled { sign: correction.signum(), ln_mag })
}

/// The two-term asymptotic as a plain value (may underflow to zero for
/// deep-evanescent inputs; use the log form there).
pub fn bessel_j_two_term_asymptotic(order: i64, sech_xi: f64) -> Result<f64> {
    if order < ASYMPTOTIC_MIN_ORDER {
        return Err(Error::precondition(
            "bessel_j_two_term_asymptotic",
            format!("order {order} below asymptotic threshold {ASYMPTOTIC_MIN_ORDER}"),
        ));
    }
    Ok(two_term_asymptotic_log(order, sech_xi)?.value())
}

/// Partial Jacobi-Anger sum sum_{n=-n_max}^{n_max} i^n J_n(a) e^{i n theta};
/// converges to e^{i a cos theta}.
pub fn jacobi_anger_partial_sum(a: f64, theta: f64, n_max: i64) -> Result<Complex64> {
    if !a.is_finite() || !theta.is_finite() {
        return Err(Error::domain("jacobi_anger_partial_sum", "non-finite input"));
    }
    let n_max = n_max.max(0);
    let js = bessel_j_array(n_max, a.abs())?;
    let mut sum = Complex64::new(js[0], 0.0);
    for n in 1..=n_max {
        let jn = if a < 0.0 && n % 2 == 1 { -js[n as usize] } else { js[n as usize] };
        let i_n = Complex64::i().powu(n as u32);
        let pos = i_n * jn * Complex64::from_polar(1.0, n as f64 * theta);
        // i^{-n} J_{-n} = i^{-n} (-1)^n J_n = i^n J_n
        let neg = i_n * jn * Complex64::from_polar(1.0, -(n as f64) * theta);
        sum += pos + neg;
    }
    Ok(sum)
}

/// Partial Graf sum
/// sum_nu J_{n-nu}(p R) J_nu(p rho) e^{-i nu phi} e^{-i (n-nu)(kz - pi/2)};
/// converges to J_n(p rho') e^{-i n phi'} with the shifted transverse
/// coordinates x' = x + R sin(kz), y' = y - R cos(kz).
pub fn graf_partial_sum(
    n: i64,
    p_perp: f64,
    rho: f64,
    r_shift: f64,
    phi: f64,
    k_z_phase: f64,
    nu_max: i64,
) -> Result<Complex64> {
    for v in [p_perp, rho, r_shift, phi, k_z_phase] {
        if !v.is_finite() {
            return Err(Error::domain("graf_partial_sum", "non-finite input"));
        }
    }
    let nu_max = nu_max.max(0);
    let mut sum = Complex64::new(0.0, 0.0);
    for nu in -nu_max..=nu_max {
        let a = bessel_j(n - nu, p_perp * r_shift)?;
        let b = bessel_j(nu, p_perp * rho)?;
        if a == 0.0 || b == 0.0 {
            continue;
        }
        let phase = Complex64::from_polar(1.0, -(nu as f64) * phi)
            * Complex64::from_polar(1.0, -((n - nu) as f64) * (k_z_phase - std::f64::consts::FRAC_PI_2));
        sum += a * b * phase;
    }
    Ok(sum)
}
