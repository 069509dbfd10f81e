//! Closed rational intervals used as certified enclosures.
//!
//! An [`Enclosure`] stores both endpoints over one positive denominator. Exact
//! rationals are degenerate intervals; rounded results use a power-of-two
//! denominator, so endpoints are dyadic rationals.

use std::cmp::Ordering;
use std::fmt;
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Closed interval `[lo/den, hi/den]` with `den > 0` and `lo <= hi`.
#[derive(Clone, Debug)]
pub struct Enclosure {
    lo: BigInt,
    hi: BigInt,
    den: BigInt,
}

/// Equality of the intervals as sets, independent of the denominator.
impl PartialEq for Enclosure {
    fn eq(&self, other: &Self) -> bool {
        &self.lo * &other.den == &other.lo * &self.den && &self.hi * &other.den == &other.hi * &self.den
    }
}

impl Eq for Enclosure {}

/// `2^bits` as a big integer.
pub fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

/// Floor of `n / d` for `d > 0`.
pub(crate) fn floor_div(n: &BigInt, d: &BigInt) -> BigInt {
    n.div_floor(d)
}

/// Ceiling of `n / d` for `d > 0`.
pub(crate) fn ceil_div(n: &BigInt, d: &BigInt) -> BigInt {
    -((-n).div_floor(d))
}

/// Floor of a rational.
pub fn rat_floor(x: &BigRational) -> BigInt {
    floor_div(x.numer(), x.denom())
}

/// Ceiling of a rational.
pub fn rat_ceil(x: &BigRational) -> BigInt {
    ceil_div(x.numer(), x.denom())
}

impl Enclosure {
    /// Interval from scaled endpoints. Panics if `den <= 0` or `lo > hi`.
    pub fn from_scaled(lo: BigInt, hi: BigInt, den: BigInt) -> Self {
        assert!(den.is_positive(), "enclosure denominator must be positive");
        assert!(lo <= hi, "enclosure endpoints out of order");
        Enclosure { lo, hi, den }
    }

    /// Degenerate interval at an exact rational.
    pub fn exact(x: &BigRational) -> Self {
        Enclosure {
            lo: x.numer().clone(),
            hi: x.numer().clone(),
            den: x.denom().clone(),
        }
    }

    /// Degenerate interval at an integer.
    pub fn from_int(n: impl Into<BigInt>) -> Self {
        let n = n.into();
        Enclosure {
            lo: n.clone(),
            hi: n,
            den: BigInt::one(),
        }
    }

    /// Interval with rational endpoints. Panics if `lo > hi`.
    pub fn from_bounds(lo: &BigRational, hi: &BigRational) -> Self {
        let den = lo.denom().lcm(hi.denom());
        let l = lo.numer() * (&den / lo.denom());
        let h = hi.numer() * (&den / hi.denom());
        Self::from_scaled(l, h, den)
    }

    pub fn lo(&self) -> BigRational {
        BigRational::new(self.lo.clone(), self.den.clone())
    }

    pub fn hi(&self) -> BigRational {
        BigRational::new(self.hi.clone(), self.den.clone())
    }

    /// Scaled lower numerator.
    pub fn lo_num(&self) -> &BigInt {
        &self.lo
    }

    /// Scaled upper numerator.
    pub fn hi_num(&self) -> &BigInt {
        &self.hi
    }

    /// Shared denominator.
    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn width(&self) -> BigRational {
        BigRational::new(&self.hi - &self.lo, self.den.clone())
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    /// Whether the width is at most `2^-bits`.
    pub fn width_within(&self, bits: u32) -> bool {
        ((&self.hi - &self.lo) << bits as usize) <= self.den
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        let l = &self.lo * x.denom();
        let h = &self.hi * x.denom();
        let v = x.numer() * &self.den;
        l <= v && v <= h
    }

    /// Whether every point of `other` lies in `self`.
    pub fn contains_enclosure(&self, other: &Enclosure) -> bool {
        self.contains(&other.lo()) && self.contains(&other.hi())
    }

    /// Whether the two intervals share a point.
    pub fn overlaps(&self, other: &Enclosure) -> bool {
        !(self.certainly_lt(other) || other.certainly_lt(self))
    }

    /// Midpoint as a float, for reporting only.
    pub fn mid_f64(&self) -> f64 {
        let m = BigRational::new(&self.lo + &self.hi, &self.den * 2);
        rat_to_f64(&m)
    }

    /// Certified sign: `Some` only when every point of the interval has that sign.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Every point of `self` is strictly below every point of `other`.
    pub fn certainly_lt(&self, other: &Enclosure) -> bool {
        &self.hi * &other.den < &other.lo * &self.den
    }

    /// Every point of `self` is at most every point of `other`.
    pub fn certainly_le(&self, other: &Enclosure) -> bool {
        &self.hi * &other.den <= &other.lo * &self.den
    }

    /// Upper endpoint is at most `x`.
    pub fn hi_le(&self, x: &BigRational) -> bool {
        &self.hi * x.denom() <= x.numer() * &self.den
    }

    /// Upper endpoint is strictly below `x`.
    pub fn hi_lt(&self, x: &BigRational) -> bool {
        &self.hi * x.denom() < x.numer() * &self.den
    }

    /// Lower endpoint is at least `x`.
    pub fn lo_ge(&self, x: &BigRational) -> bool {
        &self.lo * x.denom() >= x.numer() * &self.den
    }

    /// Lower endpoint is strictly above `x`.
    pub fn lo_gt(&self, x: &BigRational) -> bool {
        &self.lo * x.denom() > x.numer() * &self.den
    }

    fn aligned(&self, other: &Enclosure) -> (BigInt, BigInt, BigInt, BigInt, BigInt) {
        if self.den == other.den {
            (self.lo.clone(), self.hi.clone(), other.lo.clone(), other.hi.clone(), self.den.clone())
        } else {
            (
                &self.lo * &other.den,
                &self.hi * &other.den,
                &other.lo * &self.den,
                &other.hi * &self.den,
                &self.den * &other.den,
            )
        }
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        let (al, ah, bl, bh, d) = self.aligned(other);
        Enclosure {
            lo: al + bl,
            hi: ah + bh,
            den: d,
        }
    }

    pub fn sub(&self, other: &Enclosure) -> Enclosure {
        let (al, ah, bl, bh, d) = self.aligned(other);
        Enclosure {
            lo: al - bh,
            hi: ah - bl,
            den: d,
        }
    }

    pub fn neg(&self) -> Enclosure {
        Enclosure {
            lo: -&self.hi,
            hi: -&self.lo,
            den: self.den.clone(),
        }
    }

    pub fn add_int(&self, n: &BigInt) -> Enclosure {
        let s = n * &self.den;
        Enclosure {
            lo: &self.lo + &s,
            hi: &self.hi + &s,
            den: self.den.clone(),
        }
    }

    pub fn add_rat(&self, x: &BigRational) -> Enclosure {
        self.add(&Enclosure::exact(x))
    }

    pub fn mul_int(&self, n: &BigInt) -> Enclosure {
        if n.is_negative() {
            Enclosure {
                lo: &self.hi * n,
                hi: &self.lo * n,
                den: self.den.clone(),
            }
        } else {
            Enclosure {
                lo: &self.lo * n,
                hi: &self.hi * n,
                den: self.den.clone(),
            }
        }
    }

    pub fn mul_rat(&self, x: &BigRational) -> Enclosure {
        let e = self.mul_int(x.numer());
        Enclosure {
            lo: e.lo,
            hi: e.hi,
            den: e.den * x.denom(),
        }
    }

    pub fn mul(&self, other: &Enclosure) -> Enclosure {
        let den = &self.den * &other.den;
        if !self.lo.is_negative() && !other.lo.is_negative() {
            return Enclosure {
                lo: &self.lo * &other.lo,
                hi: &self.hi * &other.hi,
                den,
            };
        }
        let c = [&self.lo * &other.lo, &self.lo * &other.hi, &self.hi * &other.lo, &self.hi * &other.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Enclosure { lo, hi, den }
    }

    /// Absolute value.
    pub fn abs(&self) -> Enclosure {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            let m = std::cmp::max(-&self.lo, self.hi.clone());
            Enclosure {
                lo: BigInt::zero(),
                hi: m,
                den: self.den.clone(),
            }
        }
    }

    pub fn min(&self, other: &Enclosure) -> Enclosure {
        let (al, ah, bl, bh, d) = self.aligned(other);
        Enclosure {
            lo: al.min(bl),
            hi: ah.min(bh),
            den: d,
        }
    }

    pub fn max(&self, other: &Enclosure) -> Enclosure {
        let (al, ah, bl, bh, d) = self.aligned(other);
        Enclosure {
            lo: al.max(bl),
            hi: ah.max(bh),
            den: d,
        }
    }

    /// Interval hull.
    pub fn hull(&self, other: &Enclosure) -> Enclosure {
        let (al, ah, bl, bh, d) = self.aligned(other);
        Enclosure {
            lo: al.min(bl),
            hi: ah.max(bh),
            den: d,
        }
    }

    /// Outward rounding to denominator `2^bits`. Exact when already representable.
    pub fn round_out(&self, bits: u32) -> Enclosure {
        let d = pow2(bits);
        if d.is_multiple_of(&self.den) {
            let k = &d / &self.den;
            return Enclosure {
                lo: &self.lo * &k,
                hi: &self.hi * &k,
                den: d,
            };
        }
        let lo = floor_div(&(&self.lo << bits as usize), &self.den);
        let hi = ceil_div(&(&self.hi << bits as usize), &self.den);
        Enclosure { lo, hi, den: d }
    }

    /// Reciprocal rounded outward to `2^-bits`. Panics if the interval contains zero.
    pub fn recip(&self, bits: u32) -> Enclosure {
        assert!(self.sign().is_some_and(|s| s != Ordering::Equal), "reciprocal of an interval containing zero");
        let d = pow2(bits);
        let num = &self.den << bits as usize;
        // 1/x is decreasing on each sign branch, so the endpoints swap.
        let lo = floor_div(&num, &self.hi);
        let hi = ceil_div(&num, &self.lo);
        Enclosure { lo, hi, den: d }
    }

    /// Quotient rounded outward to `2^-bits`.
    pub fn div(&self, other: &Enclosure, bits: u32) -> Enclosure {
        if other.is_exact() {
            let q = other.lo();
            assert!(!q.is_zero(), "division by zero");
            return self.mul_rat(&q.recip()).round_out(bits);
        }
        self.mul(&other.recip(bits + 4)).round_out(bits)
    }

    /// Square root rounded outward to `2^-bits`. Panics on a negative lower endpoint.
    pub fn sqrt(&self, bits: u32) -> Enclosure {
        assert!(!self.lo.is_negative(), "square root of a negative interval");
        let sh = 2 * bits as usize;
        let lo_s = floor_div(&(&self.lo << sh), &self.den);
        let hi_s = ceil_div(&(&self.hi << sh), &self.den);
        let lo = lo_s.sqrt();
        let mut hi = hi_s.sqrt();
        if &hi * &hi < hi_s {
            hi += 1;
        }
        Enclosure { lo, hi, den: pow2(bits) }
    }

    /// Integer power, rounded outward to `2^-bits` after each squaring.
    pub fn powi(&self, n: u64, bits: u32) -> Enclosure {
        if n == 0 {
            return Enclosure::from_int(1);
        }
        let a = self.abs();
        let mut base = a.clone();
        let mut acc: Option<Enclosure> = None;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(x) => x.mul(&base).round_out(bits),
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).round_out(bits);
            }
        }
        let p = acc.unwrap();
        if n.is_multiple_of(2) {
            if self.lo.is_negative() && self.hi.is_positive() {
                Enclosure {
                    lo: BigInt::zero(),
                    hi: p.hi,
                    den: p.den,
                }
            } else {
                p
            }
        } else if !self.lo.is_negative() {
            p
        } else if !self.hi.is_positive() {
            p.neg()
        } else {
            // Odd power is monotone: hull of the endpoint images.
            let l = Enclosure::exact(&self.lo()).powi(n, bits);
            let h = Enclosure::exact(&self.hi()).powi(n, bits);
            l.hull(&h)
        }
    }

    /// Positive rational power `x^(p/q)` of a positive interval, rounded outward.
    pub fn pow_ratio(&self, p: i64, q: u32, bits: u32) -> Enclosure {
        assert!(self.lo.is_positive(), "fractional power needs a positive interval");
        assert!(q > 0);
        let up = self.powi(p.unsigned_abs(), bits + 8);
        let up = if p < 0 { up.recip(bits + 8) } else { up };
        if q == 1 {
            return up.round_out(bits);
        }
        let sh = bits as usize * q as usize;
        let lo_s = floor_div(&(&up.lo << sh), &up.den);
        let hi_s = ceil_div(&(&up.hi << sh), &up.den);
        let lo = lo_s.nth_root(q);
        let mut hi = hi_s.nth_root(q);
        if hi.pow(q) < hi_s {
            hi += 1;
        }
        Enclosure { lo, hi, den: pow2(bits) }
    }

    /// Decimal rendering of the lower endpoint, rounded down.
    pub fn lo_decimal(&self, digits: usize) -> String {
        decimal(&self.lo, &self.den, digits, false)
    }

    /// Decimal rendering of the upper endpoint, rounded up.
    pub fn hi_decimal(&self, digits: usize) -> String {
        decimal(&self.hi, &self.den, digits, true)
    }
}

impl Enclosure {
    /// Decimal places that render the endpoints faithfully for reporting.
    pub fn report_digits(&self) -> usize {
        let d = (self.den.bits() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 2;
        d.clamp(12, 60)
    }
}

/// Serialised as `{"lo": "...", "hi": "..."}` with outward-rounded decimals.
impl Serialize for Enclosure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.report_digits();
        let mut st = s.serialize_struct("Enclosure", 2)?;
        st.serialize_field("lo", &self.lo_decimal(d))?;
        st.serialize_field("hi", &self.hi_decimal(d))?;
        st.end()
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo_decimal(12), self.hi_decimal(12))
    }
}

/// Float approximation of a rational, for reporting only.
pub fn rat_to_f64(x: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (x.numer().to_f64(), x.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let shift = x.denom().bits() as i64 - 60;
    let scaled = if shift > 0 {
        floor_div(x.numer(), &(x.denom() >> shift as usize))
    } else {
        floor_div(&(x.numer() << (-shift) as usize), x.denom())
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-60)
}

/// Fixed-point decimal of `n/d` with `digits` places, rounded down or up.
pub fn decimal(n: &BigInt, d: &BigInt, digits: usize, up: bool) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let s = &scale * n;
    let q = if up { ceil_div(&s, d) } else { floor_div(&s, d) };
    let neg = q.sign() == Sign::Minus;
    let mut t = q.abs().to_string();
    if digits == 0 {
        return if neg { format!("-{t}") } else { t };
    }
    if t.len() <= digits {
        t = "0".repeat(digits + 1 - t.len()) + &t;
    }
    let (ip, fp) = t.split_at(t.len() - digits);
    let fp = fp.trim_end_matches('0');
    let body = if fp.is_empty() { ip.to_string() } else { format!("{ip}.{fp}") };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

static PRECISION_CAP: AtomicU32 = AtomicU32::new(1 << 16);

/// Process-wide upper limit, in bits, for automatic precision doubling.
pub fn precision_cap() -> u32 {
    PRECISION_CAP.load(AtomicOrdering::Relaxed)
}

/// Set the precision cap used by [`refine_capped`].
pub fn set_precision_cap(bits: u32) {
    PRECISION_CAP.store(bits.max(16), AtomicOrdering::Relaxed);
}

/// [`refine`] with the process-wide cap.
pub fn refine_capped<T>(start: u32, f: impl FnMut(u32) -> crate::Result<Option<T>>) -> crate::Result<T> {
    let cap = precision_cap();
    refine(start.min(cap), cap, f)
}

/// Run `f` at increasing precision until it yields a value or the cap is hit.
///
/// Precision starts at `start` bits and doubles; `f` returns `None` when its
/// comparisons are still undecided.
pub fn refine<T>(start: u32, cap: u32, mut f: impl FnMut(u32) -> crate::Result<Option<T>>) -> crate::Result<T> {
    let mut bits = start.max(8);
    loop {
        if let Some(v) = f(bits)? {
            return Ok(v);
        }
        if bits >= cap {
            return Err(crate::Error::Indeterminate { cap_bits: cap });
        }
        bits = (bits * 2).min(cap);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn arithmetic_contains_true_values() {
        let a = Enclosure::from_bounds(&r(1, 3), &r(1, 2));
        let b = Enclosure::from_bounds(&r(-2, 1), &r(1, 5));
        let p = a.mul(&b);
        assert_eq!(p.lo(), r(-1, 1));
        assert_eq!(p.hi(), r(1, 10));
        let s = a.sub(&b);
        assert_eq!(s.lo(), r(2, 15));
        assert_eq!(s.hi(), r(5, 2));
    }

    #[test]
    fn sqrt_and_recip_are_outward() {
        let two = Enclosure::from_int(2);
        let s = two.sqrt(60);
        assert!(s.mul(&s).contains(&r(2, 1)));
        assert!(s.width_within(59));
        let t = Enclosure::from_int(3).recip(40);
        assert!(t.contains(&r(1, 3)));
        let u = Enclosure::from_int(-3).recip(40);
        assert!(u.contains(&r(-1, 3)));
    }

    #[test]
    fn powers() {
        let x = Enclosure::from_bounds(&r(-1, 2), &r(1, 3));
        let sq = x.powi(2, 30);
        assert!(sq.lo().is_zero());
        assert!(sq.contains(&r(1, 4)));
        let cube = x.powi(3, 30);
        assert!(cube.contains(&r(-1, 8)) && cube.contains(&r(1, 27)));
        let root = Enclosure::from_int(8).pow_ratio(1, 3, 40);
        assert!(root.contains(&r(2, 1)));
        let inv = Enclosure::from_int(4).pow_ratio(-3, 2, 40);
        assert!(inv.contains(&r(1, 8)));
    }

    #[test]
    fn decimals_round_outward() {
        let e = Enclosure::exact(&r(-1, 3));
        assert_eq!(e.lo_decimal(3), "-0.334");
        assert_eq!(e.hi_decimal(3), "-0.333");
        assert_eq!(Enclosure::exact(&r(5, 4)).lo_decimal(6), "1.25");
    }
}
