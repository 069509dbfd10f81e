//! Certified enclosures of pi, e, logarithms and sines.
//!
//! Every routine works in fixed point with `guard` extra bits, counts the
//! truncation error of each step in units of the last place, and widens the
//! result by that count before rounding outward.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::enclosure::{floor_div, pow2, Enclosure};

const GUARD: u32 = 24;

fn widen(v: BigInt, err: u64, g: u32) -> Enclosure {
    let e = BigInt::from(err);
    Enclosure::from_scaled(&v - &e, &v + &e, pow2(g))
}

/// Fixed-point `atan(1/x)` at scale `2^g`, with its error bound in ulps.
fn atan_inv(x: u64, g: u32) -> (BigInt, u64) {
    let x2 = BigInt::from(x * x);
    let mut t = floor_div(&pow2(g), &BigInt::from(x));
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !t.is_zero() {
        let term = floor_div(&t, &BigInt::from(2 * k + 1));
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        t = floor_div(&t, &x2);
        k += 1;
    }
    (sum, 3 * k + 4)
}

fn pi_fixed(g: u32) -> Enclosure {
    let (a5, e5) = atan_inv(5, g);
    let (a239, e239) = atan_inv(239, g);
    widen(a5 * 16 - a239 * 4, 16 * e5 + 4 * e239, g)
}

static PI_CACHE: Mutex<Option<(u32, Enclosure)>> = Mutex::new(None);

/// Enclosure of pi of width at most about `2^-bits`.
pub fn pi(bits: u32) -> Enclosure {
    let mut cache = PI_CACHE.lock().unwrap_or_else(|p| p.into_inner());
    if let Some((b, e)) = cache.as_ref() {
        if *b >= bits {
            return e.round_out(bits);
        }
    }
    let want = bits.max(256);
    let e = pi_fixed(want + GUARD).round_out(want);
    *cache = Some((want, e.clone()));
    e.round_out(bits)
}

/// Fixed-point `atanh(n/d)` for `|n/d| <= 1/3`, with its error bound in ulps.
fn atanh_fixed(t: &BigRational, g: u32) -> (BigInt, u64) {
    let t2 = t * t;
    let mut u = floor_div(&(t.numer() << g as usize), t.denom());
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !u.is_zero() {
        sum += floor_div(&u, &BigInt::from(2 * k + 1));
        u = floor_div(&(&u * t2.numer()), t2.denom());
        if u.is_negative() && u == BigInt::from(-1) {
            // floor of a tiny negative value; the true term is below one ulp
            u = BigInt::zero();
        }
        k += 1;
    }
    (sum, 3 * k + 6)
}

fn ln2_fixed(g: u32) -> (BigInt, u64) {
    let (v, e) = atanh_fixed(&BigRational::new(1.into(), 3.into()), g);
    (v * 2, 2 * e)
}

/// Enclosure of `ln 2`.
pub fn ln2(bits: u32) -> Enclosure {
    let g = bits + GUARD;
    let (v, e) = ln2_fixed(g);
    widen(v, e, g).round_out(bits)
}

/// Enclosure of `ln x` for a positive rational `x`.
pub fn ln(x: &BigRational, bits: u32) -> Enclosure {
    assert!(x.is_positive(), "logarithm of a non-positive number");
    let mut e: i64 = x.numer().bits() as i64 - x.denom().bits() as i64;
    let two = BigRational::from_integer(2.into());
    let scale = |e: i64| -> BigRational {
        if e >= 0 {
            x / BigRational::from_integer(pow2(e as u32))
        } else {
            x * BigRational::from_integer(pow2((-e) as u32))
        }
    };
    let lo_m = BigRational::new(2.into(), 3.into());
    let hi_m = BigRational::new(4.into(), 3.into());
    let mut m = scale(e);
    while m > hi_m {
        e += 1;
        m /= &two;
    }
    while m < lo_m {
        e -= 1;
        m *= &two;
    }
    let one = BigRational::one();
    let t = (&m - &one) / (&m + &one);
    let extra = 64 - (e.unsigned_abs() + 1).leading_zeros();
    let g = bits + GUARD + extra;
    let (a, ea) = atanh_fixed(&t, g);
    let (l2, el2) = ln2_fixed(g);
    let v = a * 2 + l2 * BigInt::from(e);
    let err = 2 * ea + el2 * (e.unsigned_abs() + 1);
    widen(v, err, g).round_out(bits)
}

/// Enclosure of `ln` over a positive interval.
pub fn ln_enclosure(x: &Enclosure, bits: u32) -> Enclosure {
    let lo = ln(&x.lo(), bits);
    if x.is_exact() {
        return lo;
    }
    let hi = ln(&x.hi(), bits);
    Enclosure::from_bounds(&lo.lo(), &hi.hi())
}

/// Enclosure of Euler's number.
pub fn e_const(bits: u32) -> Enclosure {
    let g = bits + GUARD;
    let mut t = pow2(g);
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !t.is_zero() {
        sum += &t;
        k += 1;
        t = floor_div(&t, &BigInt::from(k));
    }
    widen(sum, k + 6, g).round_out(bits)
}

/// Fixed-point Taylor sum of sin (odd = true) or cos at `y` (|y| <= 1 at scale 2^g).
fn sin_cos_fixed(y: &BigInt, g: u32, odd: bool) -> (BigInt, u64) {
    let one = pow2(g);
    let y2 = floor_div(&(y * y), &one);
    let mut term = if odd { y.clone() } else { one.clone() };
    let mut sum = BigInt::zero();
    let mut k: u64 = if odd { 1 } else { 0 };
    let mut steps = 0u64;
    while !term.is_zero() {
        sum += &term;
        let denom = BigInt::from((k + 1) * (k + 2));
        term = -floor_div(&(&term * &y2), &(&one * denom));
        if term.abs() <= BigInt::one() {
            term = BigInt::zero();
        }
        k += 2;
        steps += 1;
    }
    (sum, 3 * steps + 6)
}

/// Enclosure of `sin x` over an interval.
pub fn sin(x: &Enclosure, bits: u32) -> Enclosure {
    sin_cos(x, bits, true)
}

/// Enclosure of `cos x` over an interval.
pub fn cos(x: &Enclosure, bits: u32) -> Enclosure {
    sin_cos(x, bits, false)
}

fn sin_cos(x: &Enclosure, bits: u32, want_sin: bool) -> Enclosure {
    let g = bits + GUARD;
    let mid = BigRational::new(x.lo_num() + x.hi_num(), x.den() * 2);
    let radius = BigRational::new(x.hi_num() - x.lo_num(), x.den() * 2);
    // Quadrant index from an approximate pi; any choice keeps the result valid,
    // a good one keeps the reduced argument below one in magnitude.
    let mag = (mid.numer().bits() as i64 - mid.denom().bits() as i64).max(0) as u32;
    let approx_pi = pi(mag + 64).lo();
    let q = crate::enclosure::rat_floor(&(&mid * BigRational::from_integer(2.into()) / approx_pi + BigRational::new(1.into(), 2.into())));
    let qbits = q.bits() as u32;
    let half_pi = pi(g + qbits + 8).mul_rat(&BigRational::new(1.into(), 2.into()));
    let y = Enclosure::exact(&mid).sub(&half_pi.mul_int(&q));
    let y_mid_rat = BigRational::new(y.lo_num() + y.hi_num(), y.den() * 2);
    let y_rad = BigRational::new(y.hi_num() - y.lo_num(), y.den() * 2);
    let y_fixed = floor_div(&(y_mid_rat.numer() << g as usize), y_mid_rat.denom());
    let quadrant = q.mod_floor(&BigInt::from(4));
    let quadrant = quadrant.iter_u32_digits().next().unwrap_or(0);
    let use_sin = (quadrant % 2 == 0) == want_sin;
    let negate = if want_sin { quadrant >= 2 } else { quadrant == 1 || quadrant == 2 };
    let (v, err) = sin_cos_fixed(&y_fixed, g, use_sin);
    let core = widen(v, err + 1, g);
    // Both functions are 1-Lipschitz, so the input radii add directly.
    let slack = &radius + &y_rad;
    let lo = core.lo() - &slack;
    let hi = core.hi() + &slack;
    let one = BigRational::one();
    let lo = if lo < -&one { -one.clone() } else { lo };
    let hi = if hi > one { one } else { hi };
    let r = Enclosure::from_bounds(&lo, &hi).round_out(bits);
    if negate {
        r.neg()
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(x: f64) -> BigRational {
        BigRational::from_float(x).unwrap()
    }

    #[test]
    fn pi_digits() {
        let p = pi(200);
        assert!(p.width_within(199));
        assert!(p.lo_decimal(40).starts_with("3.141592653589793238462643383279502884197"));
    }

    #[test]
    fn ln_values() {
        let l = ln2(100);
        assert!(l.lo_decimal(25).starts_with("0.6931471805599453094172321"));
        let l10 = ln(&BigRational::from_integer(10.into()), 80);
        assert!(l10.lo_decimal(20).starts_with("2.30258509299404568401"));
        let small = ln(&BigRational::new(1.into(), 1000.into()), 80);
        assert!(small.contains(&f(-6.907755278982137)) || (small.mid_f64() + 6.907755278982137).abs() < 1e-14);
        assert!(ln(&BigRational::one(), 60).contains(&BigRational::zero()));
    }

    #[test]
    fn e_digits() {
        assert!(e_const(120).lo_decimal(30).starts_with("2.718281828459045235360287471352"));
    }

    #[test]
    fn sine_values() {
        for &x in &[0.0, 0.5, 1.0, 2.0, -3.0, 10.0, 33.0, 100000.0] {
            let s = sin(&Enclosure::exact(&f(x)), 80);
            assert!((s.mid_f64() - x.sin()).abs() < 1e-12, "sin {x}");
            assert!(s.width_within(70));
            let c = cos(&Enclosure::exact(&f(x)), 80);
            assert!((c.mid_f64() - x.cos()).abs() < 1e-12, "cos {x}");
        }
    }

    #[test]
    fn pythagorean_identity_is_enclosed() {
        for n in [1i64, 7, 355, 99999] {
            let x = Enclosure::from_int(n);
            let s = sin(&x, 100);
            let c = cos(&x, 100);
            let sum = s.mul(&s).add(&c.mul(&c));
            assert!(sum.contains(&BigRational::one()), "n = {n}");
        }
    }
}
