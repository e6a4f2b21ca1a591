//! Bessel functions of the first kind for real order `ν ≥ 0`, their first
//! positive zeros, the Gamma function, and numerical checks of the integral
//! inequality
//!
//! ```text
//! ∫₀ˢ ((t^{-ν} J_ν(t))')² t^{2ν+1} dt ≤ ∫₀ˢ J_ν(t)² t dt,   0 ≤ s ≤ j_ν
//! ```
//!
//! that drives the Rayleigh-quotient certificate.
//!
//! `J_ν` uses the ascending series for `t ≤ 8` and Miller's backward
//! recurrence, normalized with the Neumann-type sum
//! `(t/2)^μ / Γ(μ+1) = Σ_k (μ+2k) Γ(μ+k) / (Γ(μ+1) k!) J_{μ+2k}(t)`,
//! above that.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::quadrature::adaptive_gk15;

/// Arguments at or below this use the ascending series.
pub const SERIES_LIMIT: f64 = 8.0;
/// Largest supported argument.
pub const MAX_ARGUMENT: f64 = 1.0e4;
/// Largest supported order.
pub const MAX_ORDER: f64 = 100.0;
/// Largest order accepted by [`bessel_zero`].
pub const MAX_ZERO_ORDER: f64 = 20.0;
/// Absolute tolerance for the integrals in [`lemma21_gap`].
pub const LEMMA_QUAD_TOL: f64 = 1e-10;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Γ(x) for `x > 0` (Lanczos, g = 7, nine coefficients).
pub fn gamma_fn(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!("gamma_fn requires a finite x > 0, got {x}")));
    }
    if x > 171.0 {
        return Err(Error::Domain(format!("gamma_fn({x}) overflows f64")));
    }
    if x < 0.5 {
        // Γ(x) = Γ(x+1)/x keeps the Lanczos sum on its accurate range.
        return Ok(lanczos(x + 1.0) / x);
    }
    Ok(lanczos(x))
}

fn lanczos(x: f64) -> f64 {
    let z = x - 1.0;
    let mut sum = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    // Split the power so t^{z+1/2} cannot overflow before e^{-t} is applied.
    let half = t.powf(0.5 * (z + 0.5));
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * sum
}

/// A validated Bessel order `ν ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu < 0.0 {
            return Err(Error::Domain(format!("Bessel order must be finite and ≥ 0, got {nu}")));
        }
        if nu > MAX_ORDER {
            return Err(Error::Domain(format!("Bessel order {nu} exceeds supported maximum {MAX_ORDER}")));
        }
        Ok(Self(nu))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// The first positive zero `j_ν` of `J_ν`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesselZero {
    pub nu: f64,
    pub j_nu: f64,
}

impl BesselZero {
    pub fn new(nu: f64) -> Result<Self> {
        Ok(Self { nu, j_nu: bessel_zero(nu)? })
    }
}

/// `J_ν`, `J_{ν+1}`, `J_ν'` and `J_ν''` at one argument.
#[derive(Clone, Copy, Debug)]
pub(crate) struct BesselEval {
    pub j: f64,
    pub j_next: f64,
    pub dj: f64,
    pub d2j: f64,
}

fn check_args(nu: f64, t: f64) -> Result<()> {
    BesselOrder::new(nu)?;
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Domain(format!("Bessel argument must be finite and ≥ 0, got {t}")));
    }
    if t > MAX_ARGUMENT {
        return Err(Error::Domain(format!("Bessel argument {t} exceeds supported maximum {MAX_ARGUMENT}")));
    }
    Ok(())
}

/// Returns `(J_ν(t), J_ν'(t))`.
///
/// At `t = 0` the derivative is `+∞` for `0 < ν < 1`.
pub fn bessel_j(nu: f64, t: f64) -> Result<(f64, f64)> {
    check_args(nu, t)?;
    let e = eval(nu, t);
    Ok((e.j, e.dj))
}

#[cfg(test)]
pub(crate) fn j_unchecked(nu: f64, t: f64) -> f64 {
    eval(nu, t).j
}

pub(crate) fn eval(nu: f64, t: f64) -> BesselEval {
    debug_assert!(nu >= 0.0 && t >= 0.0);
    if t == 0.0 {
        let j = if nu == 0.0 { 1.0 } else { 0.0 };
        let dj = if nu == 0.0 || nu > 1.0 {
            0.0
        } else if nu == 1.0 {
            0.5
        } else {
            f64::INFINITY
        };
        return BesselEval { j, j_next: 0.0, dj, d2j: f64::NAN };
    }
    if t <= SERIES_LIMIT {
        series(nu, t)
    } else {
        miller(nu, t)
    }
}

/// Ascending series for `J_ν`, `J_ν'`, `J_ν''` (term-by-term derivatives) and
/// `J_{ν+1}`.
pub(crate) fn series(nu: f64, t: f64) -> BesselEval {
    let half = 0.5 * t;
    let q = -half * half;
    let lead = half.powf(nu) / gamma_fn(nu + 1.0).expect("order validated");
    let (j, dj, d2j) = {
        let mut term = lead;
        let mut largest = lead.abs();
        let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
        let mut k = 0usize;
        while term != 0.0 && k <= 400 {
            let p = 2.0 * k as f64 + nu;
            s0 += term;
            s1 += term * p;
            s2 += term * p * (p - 1.0);
            k += 1;
            term *= q / (k as f64 * (k as f64 + nu));
            largest = largest.max(term.abs());
            if (k as f64) > half && term.abs() <= 1e-18 * largest {
                break;
            }
        }
        (s0, s1 / t, s2 / (t * t))
    };
    let j_next = {
        let mut term = lead * half / (nu + 1.0);
        let mut largest = term.abs();
        let mut s = 0.0;
        let mut k = 0usize;
        while term != 0.0 && k <= 400 {
            s += term;
            k += 1;
            term *= q / (k as f64 * (k as f64 + nu + 1.0));
            largest = largest.max(term.abs());
            if (k as f64) > half && term.abs() <= 1e-18 * largest {
                break;
            }
        }
        s
    };
    BesselEval { j, j_next, dj, d2j }
}

/// Miller's backward recurrence from an order well above `max(t, ν)`.
pub(crate) fn miller(nu: f64, t: f64) -> BesselEval {
    let mu = nu.fract();
    let n_nu = nu.floor() as usize;
    let m = t.max(nu);
    let mut n_start = (m + 30.0 + (60.0 * m).sqrt()).ceil() as usize;
    n_start = n_start.max(n_nu + 4);
    if n_start % 2 == 1 {
        n_start += 1;
    }

    // Normalization weights for even orders μ + 2k.
    let mut weights = Vec::with_capacity(n_start / 2 + 1);
    weights.push(1.0);
    let mut c = 1.0;
    for k in 1..=n_start / 2 {
        if k > 1 {
            c *= (mu + (k - 1) as f64) / k as f64;
        }
        weights.push((mu + 2.0 * k as f64) * c);
    }

    const BIG: f64 = 1e200;
    let mut upper = 0.0; // J_{μ+n+1}
    let mut cur = 1e-30; // J_{μ+n}
    let mut sum = 0.0;
    let mut at_nu = 0.0;
    let mut at_nu1 = 0.0;
    let mut n = n_start;
    loop {
        if n == n_nu {
            at_nu = cur;
        } else if n == n_nu + 1 {
            at_nu1 = cur;
        }
        if n.is_multiple_of(2) {
            sum += weights[n / 2] * cur;
        }
        if n == 0 {
            break;
        }
        let lower = 2.0 * (mu + n as f64) / t * cur - upper;
        upper = cur;
        cur = lower;
        n -= 1;
        if cur.abs() > BIG {
            let s = 1.0 / BIG;
            cur *= s;
            upper *= s;
            sum *= s;
            at_nu *= s;
            at_nu1 *= s;
        }
    }
    let norm = (0.5 * t).powf(mu) / gamma_fn(mu + 1.0).expect("0 ≤ μ < 1") / sum;
    let j = at_nu * norm;
    let j_next = at_nu1 * norm;
    let dj = nu / t * j - j_next;
    let d2j = ((nu * nu - nu) / (t * t) - 1.0) * j + j_next / t;
    BesselEval { j, j_next, dj, d2j }
}

/// The first positive zero of `J_ν` for `0 ≤ ν ≤ 20`, to absolute accuracy
/// well below `1e-10`.
///
/// A sign-change scan with step 0.1 from `max(ν, 1)` brackets the root,
/// bisection narrows it to `1e-6`, and Newton polishes it to `1e-12`.
pub fn bessel_zero(nu: f64) -> Result<f64> {
    BesselOrder::new(nu)?;
    if nu > MAX_ZERO_ORDER {
        return Err(Error::Domain(format!("bessel_zero supports 0 ≤ ν ≤ {MAX_ZERO_ORDER}, got {nu}")));
    }
    let j = |t: f64| eval(nu, t).j;

    let mut lo = nu.max(1.0);
    if j(lo) <= 0.0 {
        return Err(Error::Computation(format!("J_{nu} is not positive at the scan start {lo}")));
    }
    let limit = lo + 20.0;
    let mut hi = lo + 0.1;
    while j(hi) > 0.0 {
        lo = hi;
        hi += 0.1;
        if hi > limit {
            return Err(Error::Computation(format!("no sign change of J_{nu} found below {limit}")));
        }
    }

    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if j(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut x = 0.5 * (lo + hi);
    for _ in 0..50 {
        let e = eval(nu, x);
        let step = e.j / e.dj;
        let next = x - step;
        if !(lo..=hi).contains(&next) || !next.is_finite() {
            // Newton left the bracket; finish by bisection.
            while hi - lo > 1e-13 {
                let mid = 0.5 * (lo + hi);
                if j(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            x = 0.5 * (lo + hi);
            break;
        }
        x = next;
        if step.abs() <= 1e-12 {
            break;
        }
    }

    let delta = 1e-8;
    if !(j(x - delta) > 0.0 && j(x + delta) < 0.0) {
        return Err(Error::Computation(format!("J_{nu} does not change sign across {x}")));
    }
    Ok(x)
}

/// `j₀ ≈ 2.404825557695773`, computed once.
pub fn j0_zero() -> f64 {
    static J0: OnceLock<f64> = OnceLock::new();
    *J0.get_or_init(|| bessel_zero(0.0).expect("j0 is bracketed"))
}

/// `(t^{-ν} J_ν(t))'`, evaluated as `-t^{-ν} J_{ν+1}(t)`; its limit at `t = 0`
/// is `0` for `ν ≥ 0`.
pub fn scaled_derivative(nu: f64, t: f64) -> Result<f64> {
    check_args(nu, t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(-t.powf(-nu) * eval(nu, t).j_next)
}

/// `(t^{-ν} J_ν(t))' t^{2ν+1}`, the quantity whose monotone decrease on
/// `[0, j_ν]` gives the inequality.
pub fn weighted_derivative(nu: f64, t: f64) -> Result<f64> {
    Ok(scaled_derivative(nu, t)? * t.powf(2.0 * nu + 1.0))
}

/// Both sides of the integral inequality on `[0, s]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lemma21Gap {
    pub lhs: f64,
    pub rhs: f64,
}

impl Lemma21Gap {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs + tol
    }
}

/// `lhs = ∫₀ˢ ((t^{-ν}J_ν)')² t^{2ν+1} dt`, `rhs = ∫₀ˢ J_ν² t dt`, each by
/// adaptive Gauss–Kronrod to absolute tolerance [`LEMMA_QUAD_TOL`].
pub fn lemma21_gap(nu: f64, s: f64) -> Result<Lemma21Gap> {
    BesselOrder::new(nu)?;
    let j_nu = bessel_zero(nu)?;
    if !(0.0..=j_nu * (1.0 + 1e-12)).contains(&s) {
        return Err(Error::Domain(format!("s = {s} outside [0, j_{nu} = {j_nu}]")));
    }
    let lhs = adaptive_gk15(
        |t| {
            if t == 0.0 {
                return 0.0;
            }
            let g = -t.powf(-nu) * eval(nu, t).j_next;
            g * g * t.powf(2.0 * nu + 1.0)
        },
        0.0,
        s,
        LEMMA_QUAD_TOL,
    )?;
    let rhs = adaptive_gk15(
        |t| {
            let j = eval(nu, t).j;
            j * j * t
        },
        0.0,
        s,
        LEMMA_QUAD_TOL,
    )?;
    Ok(Lemma21Gap { lhs: lhs.value, rhs: rhs.value })
}

/// `|t^{ν+1}J_ν'' + t^ν J_ν' − ν² t^{ν−1} J_ν + t^{ν+1} J_ν|`, the Bessel-equation
/// residual of the expanded derivative of `(t^{-ν}J_ν)' t^{2ν+1}`.
///
/// On the series range `J_ν''` comes from term-wise differentiation, so the
/// residual tests the series rather than restating the equation.
pub fn eq22_residual(nu: f64, t: f64) -> Result<f64> {
    check_args(nu, t)?;
    if t <= 0.0 {
        return Err(Error::Domain(format!("eq22_residual requires t > 0, got {t}")));
    }
    let e = eval(nu, t);
    let tn = t.powf(nu);
    let r = tn * t * e.d2j + tn * e.dj - nu * nu * tn / t * e.j + tn * t * e.j;
    Ok(r.abs())
}
