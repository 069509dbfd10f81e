//! Scaled-integer kernel shared by the scanning routines.
//!
//! A [`Window`] holds enclosures of `xi` and of a shift `alpha` as integers over
//! one denominator. Offsets `N xi + alpha - (a m + r)` are then pure integer
//! intervals. The kernel is generic so hot loops can run on `i128` when a
//! magnitude bound shows no overflow is possible, with `BigInt` otherwise.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::cf::Real;
use crate::enclosure::Enclosure;
use crate::error::Result;

/// Integer type usable by the kernel.
pub trait Scaled: Clone + Ord + Debug + Integer + Signed + Send + Sync {
    fn from_big(x: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn from_u64(x: u64) -> Self;
}

impl Scaled for i128 {
    fn from_big(x: &BigInt) -> Option<Self> {
        i128::try_from(x).ok()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn from_u64(x: u64) -> Self {
        x as i128
    }
}

impl Scaled for BigInt {
    fn from_big(x: &BigInt) -> Option<Self> {
        Some(x.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn from_u64(x: u64) -> Self {
        BigInt::from(x)
    }
}

/// Magnitudes below this bound are safe for `i128` products in the kernels.
pub fn fits_i128(bound: &BigInt) -> bool {
    bound.bits() <= 120
}

/// `xi` in `[xlo, xhi] / den` and the shift in `[slo, shi] / den`.
#[derive(Clone, Debug)]
pub struct Window<T> {
    pub xlo: T,
    pub xhi: T,
    pub slo: T,
    pub shi: T,
    pub den: T,
}

impl Window<BigInt> {
    /// Window at precision `bits`; exact when both inputs are rational.
    pub fn build<R: Real + ?Sized>(xi: &R, alpha: Option<&dyn Real>, bits: u32) -> Result<Self> {
        let ex = xi.exact_value();
        let ea = match alpha {
            None => Some(BigRational::zero()),
            Some(a) => a.exact_value(),
        };
        if let (Some(x), Some(a)) = (&ex, &ea) {
            let den = x.denom().lcm(a.denom());
            let xv = x.numer() * (&den / x.denom());
            let av = a.numer() * (&den / a.denom());
            return Ok(Window {
                xlo: xv.clone(),
                xhi: xv,
                slo: av.clone(),
                shi: av,
                den,
            });
        }
        let xe = xi.enclose(bits)?.round_out(bits);
        let ae = match alpha {
            None => Enclosure::from_int(0).round_out(bits),
            Some(a) => a.enclose(bits)?.round_out(bits),
        };
        Ok(Window {
            xlo: xe.lo_num().clone(),
            xhi: xe.hi_num().clone(),
            slo: ae.lo_num().clone(),
            shi: ae.hi_num().clone(),
            den: xe.den().clone(),
        })
    }

    /// Narrow to `i128` when every kernel product stays below `bound_factor`
    /// times the largest stored magnitude.
    pub fn narrow(&self, bound_factor: &BigInt) -> Option<Window<i128>> {
        let m = [&self.xlo, &self.xhi, &self.slo, &self.shi, &self.den].iter().map(|v| v.abs()).max()?;
        if !fits_i128(&(m * bound_factor)) {
            return None;
        }
        Some(Window {
            xlo: i128::from_big(&self.xlo)?,
            xhi: i128::from_big(&self.xhi)?,
            slo: i128::from_big(&self.slo)?,
            shi: i128::from_big(&self.shi)?,
            den: i128::from_big(&self.den)?,
        })
    }
}

impl<T: Scaled> Window<T> {
    /// Whether the window is a single exact point.
    pub fn is_exact(&self) -> bool {
        self.xlo == self.xhi && self.slo == self.shi
    }

    /// Scaled interval of `n xi + alpha - r`.
    pub fn target(&self, n: &T, r: &T) -> (T, T) {
        let rd = r.clone() * self.den.clone();
        let lo = n.clone() * self.xlo.clone() + self.slo.clone() - rd.clone();
        let hi = n.clone() * self.xhi.clone() + self.shi.clone() - rd;
        (lo, hi)
    }

    /// Calls `f(m, lo, hi)` for every `m` whose offset `n xi + alpha - (a m + r)`,
    /// enclosed in `[lo, hi] / den`, can have absolute value at most `limit / den`.
    pub fn offsets(&self, n: &T, a: &T, r: &T, limit: &T, mut f: impl FnMut(T, T, T)) {
        let (xl, xh) = self.target(n, r);
        let step = a.clone() * self.den.clone();
        let m_lo = ceil_div(&(xl.clone() - limit.clone()), &step);
        let m_hi = (xh.clone() + limit.clone()).div_floor(&step);
        let mut m = m_lo;
        while m <= m_hi {
            let base = m.clone() * step.clone();
            f(m.clone(), xl.clone() - base.clone(), xh.clone() - base);
            m = m + T::one();
        }
    }

    /// Enclosure of `dist(n xi + alpha, a Z + r)` in scaled units, with the nearest `m`.
    pub fn distance(&self, n: &T, a: &T, r: &T) -> (T, T, T) {
        let (xl, xh) = self.target(n, r);
        let step = a.clone() * self.den.clone();
        let j = xl.div_floor(&step);
        let lo_off = xl - j.clone() * step.clone();
        let hi_off = xh - j.clone() * step.clone();
        if hi_off < step {
            // Both ends in [j a, (j+1) a): distance is min(y, a - y).
            let dlo = lo_off.clone().min(step.clone() - hi_off.clone());
            let dhi = hi_off.clone().min(step.clone() - lo_off.clone());
            let m = if hi_off.clone() + lo_off.clone() <= step { j } else { j + T::one() };
            (dlo, dhi, m)
        } else {
            // Straddles (j+1) a.
            let dhi = (step.clone() - lo_off).max(hi_off - step);
            (T::zero(), dhi, j + T::one())
        }
    }
}

/// Ceiling division for a positive divisor.
pub fn ceil_div<T: Scaled>(n: &T, d: &T) -> T {
    -((-n.clone()).div_floor(d))
}

/// Absolute value of a scaled interval.
pub fn abs_interval<T: Scaled>(lo: &T, hi: &T) -> (T, T) {
    if !lo.is_negative() {
        (lo.clone(), hi.clone())
    } else if !hi.is_positive() {
        (-hi.clone(), -lo.clone())
    } else {
        (T::zero(), (-lo.clone()).max(hi.clone()))
    }
}

/// Enclosure from scaled endpoints.
pub fn enclosure<T: Scaled>(lo: &T, hi: &T, den: &T) -> Enclosure {
    Enclosure::from_scaled(lo.to_big(), hi.to_big(), den.to_big())
}
