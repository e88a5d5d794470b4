//! Modified Bessel functions of the first kind of orders 0, 1 and 2.
//!
//! Every public evaluation returns the exponentially scaled value
//! `e^{-x} I_n(x)`. The damped wave kernels always pair `I_n(omega/2)` with
//! `e^{-t/2}` where `omega <= t`, so the scaled product `e^{(omega-t)/2}` times
//! a scaled Bessel value never overflows even when both unscaled factors do.
//!
//! Two regimes are used: the power series for `x <= SERIES_SWITCH` and the
//! Hankel asymptotic expansion above it. At the seam both agree to better
//! than twelve digits.
//!
//! [`i0_integral_oracle`] evaluates `I_0` from its integral representation by
//! the trapezoidal rule and shares no code with the series path, so it can be
//! used to cross-check it.

use crate::math::{abs, cos, exp, sqrt};
use crate::{Error, Result};
use core::f64::consts::PI;

/// Series / asymptotic crossover point.
pub const SERIES_SWITCH: f64 = 20.0;

/// Largest argument accepted by the unscaled convenience wrappers.
pub const UNSCALED_MAX: f64 = 700.0;

/// Relative size at which series summation stops.
const SERIES_TOL: f64 = 1e-18;

/// Order of a modified Bessel function. Only 0, 1 and 2 are needed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BesselOrder {
    Zero,
    One,
    Two,
}

impl BesselOrder {
    pub fn new(n: u8) -> Result<Self> {
        match n {
            0 => Ok(BesselOrder::Zero),
            1 => Ok(BesselOrder::One),
            2 => Ok(BesselOrder::Two),
            _ => Err(Error::Domain {
                what: "Bessel order must be 0, 1 or 2",
                value: n as f64,
            }),
        }
    }

    pub fn index(self) -> u32 {
        match self {
            BesselOrder::Zero => 0,
            BesselOrder::One => 1,
            BesselOrder::Two => 2,
        }
    }
}

impl TryFrom<u8> for BesselOrder {
    type Error = Error;

    fn try_from(n: u8) -> Result<Self> {
        BesselOrder::new(n)
    }
}

fn check_arg(x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "Bessel argument must be finite and nonnegative",
            value: x,
        })
    }
}

fn check_unscaled(x: f64) -> Result<()> {
    check_arg(x)?;
    if x > UNSCALED_MAX {
        return Err(Error::Domain {
            what: "unscaled Bessel value overflows beyond x = 700",
            value: x,
        });
    }
    Ok(())
}

/// `sum_k (x/2)^{2k+n} / (k! (k+n)!)`, unscaled.
fn power_series(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = half * half;
    let mut term = 1.0;
    for j in 1..=n {
        term *= half / j as f64;
    }
    let mut sum = term;
    let mut k = 0.0;
    let nf = n as f64;
    while term > SERIES_TOL * sum {
        k += 1.0;
        term *= q / (k * (k + nf));
        sum += term;
    }
    sum
}

/// Hankel expansion `e^{-x} I_n(x) ~ (2 pi x)^{-1/2} sum_k (-1)^k a_k(n) x^{-k}`.
///
/// Summation stops at the smallest term of the (divergent) series.
fn hankel_scaled(n: u32, x: f64) -> f64 {
    let mu = 4.0 * (n * n) as f64;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut prev = f64::INFINITY;
    for k in 1..400u32 {
        let odd = (2 * k - 1) as f64;
        term *= -(mu - odd * odd) / (8.0 * k as f64 * x);
        let size = abs(term);
        if size >= prev {
            break;
        }
        sum += term;
        prev = size;
        if size < 1e-17 * abs(sum) {
            break;
        }
    }
    sum / sqrt(2.0 * PI * x)
}

fn scaled_unchecked(n: u32, x: f64) -> f64 {
    if x <= SERIES_SWITCH {
        power_series(n, x) * exp(-x)
    } else {
        hankel_scaled(n, x)
    }
}

/// `e^{-x} I_n(x)` for `x >= 0`.
pub fn bessel_i_scaled(order: BesselOrder, x: f64) -> Result<f64> {
    check_arg(x)?;
    Ok(scaled_unchecked(order.index(), x))
}

/// Power-series branch only, exposed so the seam between regimes can be tested.
pub fn bessel_i_scaled_series(order: BesselOrder, x: f64) -> Result<f64> {
    check_arg(x)?;
    Ok(power_series(order.index(), x) * exp(-x))
}

/// Asymptotic branch only, for `x > 0`.
pub fn bessel_i_scaled_asymptotic(order: BesselOrder, x: f64) -> Result<f64> {
    check_arg(x)?;
    if x == 0.0 {
        return Err(Error::Domain {
            what: "asymptotic expansion needs x > 0",
            value: x,
        });
    }
    Ok(hankel_scaled(order.index(), x))
}

/// Unscaled `I_n(x)`, available for `x <= 700`.
pub fn bessel_i(order: BesselOrder, x: f64) -> Result<f64> {
    check_unscaled(x)?;
    if x <= SERIES_SWITCH {
        Ok(power_series(order.index(), x))
    } else {
        Ok(hankel_scaled(order.index(), x) * exp(x))
    }
}

/// `I_1(x) / x`, continuously extended by `1/2` at the origin. Valid for `x <= 700`.
pub fn i1_over_z(x: f64) -> Result<f64> {
    check_unscaled(x)?;
    if x <= SERIES_SWITCH {
        Ok(i1_over_z_series(x))
    } else {
        Ok(hankel_scaled(1, x) * exp(x) / x)
    }
}

/// `e^{-x} I_1(x) / x`, continuously extended by `1/2` at the origin.
pub fn i1_over_z_scaled(x: f64) -> Result<f64> {
    check_arg(x)?;
    Ok(i1_over_z_scaled_unchecked(x))
}

fn i1_over_z_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 0.5;
    let mut sum = term;
    let mut k = 0.0;
    while term > SERIES_TOL * sum {
        k += 1.0;
        term *= q / (k * (k + 1.0));
        sum += term;
    }
    sum
}

pub(crate) fn i1_over_z_scaled_unchecked(x: f64) -> f64 {
    if x <= SERIES_SWITCH {
        i1_over_z_series(x) * exp(-x)
    } else {
        hankel_scaled(1, x) / x
    }
}

pub(crate) fn i0_scaled_unchecked(x: f64) -> f64 {
    scaled_unchecked(0, x)
}

pub(crate) fn i1_scaled_unchecked(x: f64) -> f64 {
    scaled_unchecked(1, x)
}

pub(crate) fn i2_scaled_unchecked(x: f64) -> f64 {
    scaled_unchecked(2, x)
}

/// `sum_j first * q^j / prod`, where consecutive terms have ratio `q / denom(j)`.
fn shifted_series(first: f64, q: f64, denom: impl Fn(f64) -> f64) -> f64 {
    let mut term = first;
    let mut sum = first;
    let mut j = 0.0;
    while term > SERIES_TOL * sum {
        term *= q / denom(j);
        sum += term;
        j += 1.0;
    }
    sum
}

/// `e^{-z} (I_0(z) - 1) / z^2`, equal to `1/4` at the origin.
///
/// Together with [`i1_reduced_scaled`] and [`i2_reduced_scaled`] this lets
/// the second-derivative kernel be written without any negative power of
/// `omega`. Below the seam the series has only positive terms, so there is no
/// cancellation anywhere.
pub fn i0_reduced_scaled(z: f64) -> Result<f64> {
    check_arg(z)?;
    Ok(i0_reduced_scaled_unchecked(z))
}

pub(crate) fn i0_reduced_scaled_unchecked(z: f64) -> f64 {
    if z <= SERIES_SWITCH {
        let q = 0.25 * z * z;
        shifted_series(0.25, q, |j| (j + 2.0) * (j + 2.0)) * exp(-z)
    } else {
        (hankel_scaled(0, z) - exp(-z)) / (z * z)
    }
}

/// `e^{-z} (I_1(z)/z - 1/2) / z^2`, equal to `1/16` at the origin.
pub fn i1_reduced_scaled(z: f64) -> Result<f64> {
    check_arg(z)?;
    Ok(i1_reduced_scaled_unchecked(z))
}

pub(crate) fn i1_reduced_scaled_unchecked(z: f64) -> f64 {
    if z <= SERIES_SWITCH {
        let q = 0.25 * z * z;
        shifted_series(1.0 / 16.0, q, |j| (j + 2.0) * (j + 3.0)) * exp(-z)
    } else {
        (hankel_scaled(1, z) / z - 0.5 * exp(-z)) / (z * z)
    }
}

/// `e^{-z} I_2(z) / z^2`, equal to `1/8` at the origin.
pub fn i2_reduced_scaled(z: f64) -> Result<f64> {
    check_arg(z)?;
    Ok(i2_reduced_scaled_unchecked(z))
}

pub(crate) fn i2_reduced_scaled_unchecked(z: f64) -> f64 {
    if z <= SERIES_SWITCH {
        let q = 0.25 * z * z;
        shifted_series(0.125, q, |j| (j + 1.0) * (j + 3.0)) * exp(-z)
    } else {
        hankel_scaled(2, z) / (z * z)
    }
}

fn check_panels(panels: usize) -> Result<()> {
    if panels < 16 {
        return Err(Error::Domain {
            what: "integral oracle needs at least 16 panels",
            value: panels as f64,
        });
    }
    Ok(())
}

/// `e^{-x} (1/pi) int_0^pi e^{x cos theta} d theta` by the composite trapezoidal rule.
///
/// The integrand extends to a smooth even periodic function, so the rule
/// converges geometrically in `panels`.
pub fn i0_integral_oracle_scaled(x: f64, panels: usize) -> Result<f64> {
    check_arg(x)?;
    check_panels(panels)?;
    let h = PI / panels as f64;
    let f = |theta: f64| exp(x * (cos(theta) - 1.0));
    let mut sum = 0.5 * (f(0.0) + f(PI));
    for k in 1..panels {
        sum += f(k as f64 * h);
    }
    Ok(sum * h / PI)
}

/// `I_0(x)` from its integral representation; `x <= 700`.
pub fn i0_integral_oracle(x: f64, panels: usize) -> Result<f64> {
    check_unscaled(x)?;
    Ok(i0_integral_oracle_scaled(x, panels)? * exp(x))
}

/// Pointwise lower bound for `e^{-x} I_0(x)`: `e^{-x}` on `(0, 1]` and
/// `5 / (6 pi sqrt(x))` on `[1, inf)`.
pub fn i0_lower_bound_scaled(x: f64) -> Result<f64> {
    check_arg(x)?;
    if x <= 1.0 {
        Ok(exp(-x))
    } else {
        Ok(5.0 / (6.0 * PI * sqrt(x)))
    }
}
