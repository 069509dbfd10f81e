//! Exact sums of arithmetic functions over progressions.
//!
//! Counts of integers in a progression coprime to a modulus, sums of Euler's
//! totient over a progression with the limiting constant of their growth, and
//! the count of reduced fractions used to show that constrained rationals
//! form a regular system.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::congruence::{crt, mod_inverse, Constraint};
use crate::enclosure::{rat_ceil, rat_floor, Enclosure};
use crate::error::{Error, Result};
use crate::json;
use crate::transcendental::pi;

/// Smallest prime factors with totient, Moebius and distinct-prime counts.
#[derive(Clone, Debug)]
pub struct SieveTable {
    limit: u32,
    spf: Vec<u32>,
    phi: Vec<u32>,
    mu: Vec<i8>,
    omega: Vec<u8>,
}

impl SieveTable {
    /// Linear sieve over `1..=limit`.
    pub fn new(limit: u32) -> Self {
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut phi = vec![0u32; n + 1];
        let mut mu = vec![0i8; n + 1];
        let mut omega = vec![0u8; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        if n >= 1 {
            phi[1] = 1;
            mu[1] = 1;
            spf[1] = 1;
        }
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                phi[i] = i as u32 - 1;
                mu[i] = -1;
                omega[i] = 1;
                primes.push(i as u32);
            }
            for &p in &primes {
                let j = i * p as usize;
                if p > spf[i] || j > n {
                    break;
                }
                spf[j] = p;
                if i % p as usize == 0 {
                    phi[j] = phi[i] * p;
                    mu[j] = 0;
                    omega[j] = omega[i];
                } else {
                    phi[j] = phi[i] * (p - 1);
                    mu[j] = -mu[i];
                    omega[j] = omega[i] + 1;
                }
            }
        }
        SieveTable { limit, spf, phi, mu, omega }
    }

    pub fn limit(&self) -> u32 {
        self.limit
    }

    fn check(&self, n: u32) {
        assert!(n >= 1 && n <= self.limit, "{n} outside sieve range 1..={}", self.limit);
    }

    pub fn phi(&self, n: u32) -> u32 {
        self.check(n);
        self.phi[n as usize]
    }

    pub fn mu(&self, n: u32) -> i8 {
        self.check(n);
        self.mu[n as usize]
    }

    pub fn omega(&self, n: u32) -> u8 {
        self.check(n);
        self.omega[n as usize]
    }

    /// Distinct prime factors in increasing order.
    pub fn primes_of(&self, mut n: u32) -> Vec<u32> {
        self.check(n);
        let mut out = Vec::new();
        while n > 1 {
            let p = self.spf[n as usize];
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        out
    }
}

/// Distinct prime factors by trial division.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn check_coprime_args(q: u64, a: u64, r: u64) -> Result<()> {
    if q == 0 || a == 0 {
        return Err(Error::pre("q and a must be positive"));
    }
    if a.gcd(&r).gcd(&q) != 1 {
        return Err(Error::pre("need gcd(a, r, q) = 1"));
    }
    Ok(())
}

/// Number of `m >= 0` with `0 <= a m + r <= x` and `gcd(a m + r, q) = 1`.
///
/// Inclusion-exclusion over squarefree `d | q`: each term counts the `m` in
/// range with `a m = -r (mod d)`.
pub fn coprime_progression_count(x: u64, q: u64, a: u64, r: u64) -> Result<u64> {
    check_coprime_args(q, a, r)?;
    if x < r {
        return Ok(0);
    }
    let top = (x - r) / a;
    let ps = prime_factors(q);
    let mut total: i128 = 0;
    for mask in 0u32..(1 << ps.len()) {
        let d: u64 = ps.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| p).product();
        let sign: i128 = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
        let g = a.gcd(&d);
        if !r.is_multiple_of(g) {
            continue;
        }
        let step = d / g;
        let m0 = if step == 1 {
            0
        } else {
            let inv = mod_inverse(&BigInt::from(a / g), &BigInt::from(step)).expect("coprime after dividing by the gcd");
            let neg_r = (step - (r / g) % step) % step;
            let v: BigInt = (inv * BigInt::from(neg_r)).mod_floor(&BigInt::from(step));
            u64::try_from(v).expect("residue below step")
        };
        if m0 <= top {
            total += sign * ((top - m0) / step + 1) as i128;
        }
    }
    Ok(total as u64)
}

/// `prod_{p | q, p not dividing a} (1 - 1/p)`, the density of the count.
pub fn coprime_density(q: u64, a: u64, r: u64) -> Result<BigRational> {
    check_coprime_args(q, a, r)?;
    let mut v = BigRational::one();
    for p in prime_factors(q) {
        if !a.is_multiple_of(p) {
            v *= BigRational::new(BigInt::from(p - 1), BigInt::from(p));
        }
    }
    Ok(v)
}

/// Main term `(x / a) prod_{p | q, p not dividing a} (1 - 1/p)`.
pub fn coprime_main_term(x: u64, q: u64, a: u64, r: u64) -> Result<BigRational> {
    Ok(coprime_density(q, a, r)? * BigRational::new(BigInt::from(x), BigInt::from(a)))
}

/// Closed form `x gcd(q, a) / (q a) * phi(q / gcd(q, a))`.
///
/// Equal to [`coprime_main_term`] unless a prime divides both `a` and
/// `q / gcd(q, a)`; then it undercounts, e.g. `a = 2, r = 1, q = 4`.
pub fn coprime_closed_form(x: u64, q: u64, a: u64, r: u64) -> Result<BigRational> {
    check_coprime_args(q, a, r)?;
    let g = q.gcd(&a);
    let h = q / g;
    let phi_h: u64 = prime_factors(h).iter().fold(h, |acc, p| acc / p * (p - 1));
    Ok(BigRational::new(BigInt::from(x) * g * phi_h, BigInt::from(q * a)))
}

/// Totients of `lo..hi` by a segmented sieve with the given primes (all primes `<= sqrt(hi)`).
fn totient_segment(lo: u64, hi: u64, primes: &[u64]) -> Vec<u64> {
    let len = (hi - lo) as usize;
    let mut rem: Vec<u64> = (lo..hi).collect();
    let mut phi: Vec<u64> = rem.clone();
    for &p in primes {
        if p * p >= hi {
            break;
        }
        let mut j = lo.div_ceil(p) * p;
        while j < hi {
            let i = (j - lo) as usize;
            phi[i] -= phi[i] / p;
            while rem[i].is_multiple_of(p) {
                rem[i] /= p;
            }
            j += p;
        }
    }
    for i in 0..len {
        if rem[i] > 1 {
            phi[i] -= phi[i] / rem[i];
        }
    }
    phi
}

fn small_primes(n: u64) -> Vec<u64> {
    let mut is = vec![true; n as usize + 1];
    let mut out = Vec::new();
    for i in 2..=n as usize {
        if is[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n as usize {
                is[j] = false;
                j += i;
            }
        }
    }
    out
}

const SEGMENT: u64 = 1 << 16;

/// `sum phi(u k + v)` over `k >= 0` with `1 <= u k + v <= Q`.
pub fn phi_progression_sum(u: u64, v: u64, q: u64) -> Result<u128> {
    if u == 0 {
        return Err(Error::pre("u must be positive"));
    }
    if q == 0 {
        return Ok(0);
    }
    let primes = small_primes(q.isqrt() + 1);
    let starts: Vec<u64> = (1..=q).step_by(SEGMENT as usize).collect();
    let sum = starts
        .par_iter()
        .map(|&lo| {
            let hi = (lo + SEGMENT).min(q + 1);
            let phi = totient_segment(lo, hi, &primes);
            // First n >= lo with n = v (mod u).
            let first = if lo <= v { v } else { lo + (u - (lo - v) % u) % u };
            let mut s: u128 = 0;
            let mut n = first;
            while n < hi {
                s += phi[(n - lo) as usize] as u128;
                n += u;
            }
            s
        })
        .sum();
    Ok(sum)
}

/// `phi(g)/g / (2 u zeta(2) prod_{p | u} (1 - 1/p^2))` with `g = gcd(u, v)`, `gcd(u, 0) = u`.
pub fn c_constant(u: u64, v: u64, bits: u32) -> Result<Enclosure> {
    if u == 0 {
        return Err(Error::pre("u must be positive"));
    }
    let g = u.gcd(&v);
    let phi_g: u64 = prime_factors(g).iter().fold(g, |acc, p| acc / p * (p - 1));
    // zeta(2) = pi^2 / 6, so C = 3 phi(g) / (g u pi^2 prod (1 - 1/p^2)).
    let mut r = BigRational::new(BigInt::from(3 * phi_g), BigInt::from(g * u));
    for p in prime_factors(u) {
        r *= BigRational::new(BigInt::from(p * p), BigInt::from(p * p - 1));
    }
    let g2 = bits + 8;
    let p = pi(g2);
    Ok(p.mul(&p).recip(g2).mul_rat(&r).round_out(bits))
}

/// Denominator progression `u k + v` avoiding the primes of `gcd(a, r)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Subsequence {
    pub u: u64,
    pub v: u64,
}

/// The progression `(u k + v)` inside `(b n + s)` with `gcd(u k + v, gcd(a, r)) = 1`.
///
/// For each prime `p | gcd(a, r)` pick `n_p = (1 - s) b^-1 (mod p)` when `p` does not
/// divide `b` and `n_p = 1` otherwise, combine by CRT into `n_0` modulo the product
/// `P`, and set `u = b P`, `v = b n_0 + s`.
pub fn subsequence(c: &Constraint) -> Result<Subsequence> {
    if c.content() != 1 {
        return Err(Error::pre("need gcd(a, b, r, s) = 1"));
    }
    let delta = c.a.gcd(&c.r);
    let mut n0 = BigInt::zero();
    let mut modulus = BigInt::one();
    for p in prime_factors(delta) {
        let bp = BigInt::from(p);
        let np = if !c.b.is_multiple_of(p) {
            let inv = mod_inverse(&BigInt::from(c.b), &bp).expect("p does not divide b");
            ((BigInt::one() - BigInt::from(c.s)) * inv).mod_floor(&bp)
        } else {
            BigInt::one()
        };
        let (x, m) = crt(&n0, &modulus, &np, &bp).expect("distinct primes are coprime");
        n0 = x;
        modulus = m;
    }
    let big_p = u64::try_from(modulus).expect("product of primes of gcd(a, r)");
    let n0 = u64::try_from(n0).expect("residue below the product");
    Ok(Subsequence {
        u: c.b * big_p,
        v: c.b * n0 + c.s,
    })
}

/// Reduced fractions counted for the regular-system estimate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegularCount {
    pub subsequence: Subsequence,
    #[serde(serialize_with = "json::rat")]
    pub lo: BigRational,
    #[serde(serialize_with = "json::rat")]
    pub hi: BigRational,
    pub q: u64,
    /// Denominators `N = u k + v` with `Q/2 <= N <= Q`.
    pub denominators: u64,
    /// Pairs `(m, N)` with `lo < (a m + r)/N < hi`, `m >= 0`, `gcd(a m + r, N) = 1`.
    pub count: u64,
}

/// Count of reduced `(a m + r) / N` in the open interval `(lo, hi)` with `N` in the subsequence.
pub fn regular_system_count(c: &Constraint, lo: &BigRational, hi: &BigRational, q: u64) -> Result<RegularCount> {
    let sub = subsequence(c)?;
    let zero = BigRational::zero();
    let a_r = BigRational::from_integer(BigInt::from(c.a));
    if *lo < zero || *hi > a_r {
        return Err(Error::pre("the interval must lie in [0, a]"));
    }
    let mut denominators = 0u64;
    let mut count = 0u64;
    if lo < hi {
        let half = q.div_ceil(2);
        let first = if sub.v >= half {
            sub.v
        } else {
            sub.v + (half - sub.v).div_ceil(sub.u) * sub.u
        };
        let mut n = if first == 0 { sub.u } else { first };
        while n <= q {
            denominators += 1;
            let nr = BigInt::from(n);
            // a m + r strictly between lo N and hi N.
            let t_lo = rat_floor(&(lo * &nr)) + 1;
            let t_hi = rat_ceil(&(hi * &nr)) - 1;
            let t_lo: i128 = i128::try_from(t_lo).expect("bounded by a Q");
            let t_hi: i128 = i128::try_from(t_hi).expect("bounded by a Q");
            let (a, r) = (c.a as i128, c.r as i128);
            let start = t_lo.max(r);
            let mut t = start + (r - start).rem_euclid(a);
            while t <= t_hi {
                if (t as u64).gcd(&n) == 1 {
                    count += 1;
                }
                t += a;
            }
            n += sub.u;
        }
    }
    Ok(RegularCount {
        subsequence: sub,
        lo: lo.clone(),
        hi: hi.clone(),
        q,
        denominators,
        count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_count(x: u64, q: u64, a: u64, r: u64) -> u64 {
        (0..).map(|m| a * m + r).take_while(|&t| t <= x).filter(|t| t.gcd(&q) == 1).count() as u64
    }

    fn brute_phi(n: u64) -> u64 {
        (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64
    }

    #[test]
    fn sieve_matches_trial_division() {
        let s = SieveTable::new(10_000);
        for n in 1..=10_000u32 {
            let ps = prime_factors(n as u64);
            assert_eq!(s.omega(n) as usize, ps.len());
            let phi = ps.iter().fold(n as u64, |acc, p| acc / p * (p - 1));
            assert_eq!(s.phi(n) as u64, phi);
            let squarefree = ps.iter().product::<u64>() == n as u64;
            let mu = if !squarefree {
                0
            } else if ps.len().is_multiple_of(2) {
                1
            } else {
                -1
            };
            assert_eq!(s.mu(n), mu);
            assert_eq!(s.primes_of(n).iter().map(|&p| p as u64).collect::<Vec<_>>(), ps);
        }
        for n in 1..=300u32 {
            assert_eq!(s.phi(n) as u64, brute_phi(n as u64));
        }
    }

    #[test]
    fn moebius_over_divisors_gives_totient_ratio() {
        let s = SieveTable::new(10_000);
        for q in 1..=10_000u32 {
            let mut acc = BigRational::zero();
            for d in 1..=q {
                if q % d == 0 && s.mu(d) != 0 {
                    acc += BigRational::new(BigInt::from(s.mu(d)), BigInt::from(d));
                }
            }
            assert_eq!(acc, BigRational::new(BigInt::from(s.phi(q)), BigInt::from(q)), "q = {q}");
        }
    }

    #[test]
    fn count_examples_and_brute_force() {
        assert_eq!(coprime_progression_count(10, 1, 2, 1).unwrap(), 5);
        assert_eq!(coprime_progression_count(20, 6, 2, 1).unwrap(), 7);
        assert_eq!(coprime_progression_count(0, 1, 3, 0).unwrap(), 1);
        assert_eq!(coprime_progression_count(0, 5, 3, 0).unwrap(), 0);
        assert!(coprime_progression_count(10, 4, 2, 2).is_err());
        for a in 1..=6u64 {
            for r in 0..a {
                for q in 1..=60u64 {
                    if a.gcd(&r).gcd(&q) != 1 {
                        continue;
                    }
                    for x in [0u64, 1, 7, 50, 333] {
                        assert_eq!(
                            coprime_progression_count(x, q, a, r).unwrap(),
                            brute_count(x, q, a, r),
                            "x {x} q {q} a {a} r {r}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn main_terms() {
        assert_eq!(coprime_main_term(9, 1, 3, 1).unwrap(), BigRational::from_integer(3.into()));
        assert_eq!(coprime_main_term(10_000, 6, 2, 1).unwrap(), BigRational::new(10_000.into(), 3.into()));
        assert_eq!(coprime_closed_form(10_000, 6, 2, 1).unwrap(), BigRational::new(10_000.into(), 3.into()));
        // Odd numbers are all coprime to 4: density 1/2, the closed form gives 1/4.
        assert_eq!(coprime_main_term(1000, 4, 2, 1).unwrap(), BigRational::from_integer(500.into()));
        assert_eq!(coprime_closed_form(1000, 4, 2, 1).unwrap(), BigRational::from_integer(250.into()));
    }

    #[test]
    fn full_period_shift_is_exact() {
        for (a, r) in [(2u64, 1u64), (3, 2), (4, 1), (6, 5)] {
            for q in 1..=120u64 {
                if a.gcd(&r).gcd(&q) != 1 {
                    continue;
                }
                let per_period = coprime_density(q, a, r).unwrap() * BigInt::from(q);
                for x in [0u64, 5, 97] {
                    let d = coprime_progression_count(x + a * q, q, a, r).unwrap() - coprime_progression_count(x, q, a, r).unwrap();
                    assert_eq!(BigRational::from_integer(d.into()), per_period);
                }
            }
        }
    }

    #[test]
    fn phi_sums() {
        assert_eq!(phi_progression_sum(1, 0, 10).unwrap(), 32);
        assert_eq!(phi_progression_sum(2, 1, 9).unwrap(), 19);
        assert_eq!(phi_progression_sum(5, 0, 4).unwrap(), 0);
        for (u, v) in [(1u64, 0u64), (2, 0), (2, 1), (4, 2), (6, 3), (7, 12)] {
            for q in [1u64, 30, 200_000] {
                let brute: u128 = (1..=q)
                    .filter(|n| *n >= v && n % u == v % u)
                    .map(|n| {
                        let ps = prime_factors(n);
                        ps.iter().fold(n, |acc, p| acc / p * (p - 1)) as u128
                    })
                    .sum();
                assert_eq!(phi_progression_sum(u, v, q).unwrap(), brute, "u {u} v {v} Q {q}");
            }
        }
    }

    #[test]
    fn constants() {
        let c10 = c_constant(1, 0, 64).unwrap();
        assert!(c10.contains(&BigRational::new(30396355.into(), 100_000_000.into())) || (c10.mid_f64() - 0.30396355).abs() < 1e-8);
        assert!((c_constant(2, 1, 64).unwrap().mid_f64() - 2.0 / std::f64::consts::PI.powi(2)).abs() < 1e-15);
        assert!((c_constant(2, 0, 64).unwrap().mid_f64() - 1.0 / std::f64::consts::PI.powi(2)).abs() < 1e-15);
        let q = 100_000u64;
        for (u, v) in [(1u64, 0u64), (2, 0), (2, 1), (4, 2), (6, 3)] {
            let ratio = phi_progression_sum(u, v, q).unwrap() as f64 / (q as f64 * q as f64);
            assert!((ratio - c_constant(u, v, 64).unwrap().mid_f64()).abs() < 1e-3, "u {u} v {v}");
        }
    }

    #[test]
    fn subsequences() {
        let c = Constraint::new(6, 5, 3, 1).unwrap();
        let sub = subsequence(&c).unwrap();
        assert_eq!(sub.u, 15);
        for k in 0..50 {
            assert_eq!((sub.u * k + sub.v).gcd(&3), 1);
            assert_eq!((sub.u * k + sub.v) % 5, 1);
        }
        assert_eq!(subsequence(&Constraint::new(2, 2, 1, 1).unwrap()).unwrap(), Subsequence { u: 2, v: 1 });
        assert!(subsequence(&Constraint::new(2, 2, 0, 0).unwrap()).is_err());
    }

    #[test]
    fn farey_oracle() {
        let c = Constraint::new(1, 1, 0, 0).unwrap();
        let one = BigRational::one();
        let rc = regular_system_count(&c, &BigRational::zero(), &one, 100).unwrap();
        let expect: u64 = (50..=100).map(brute_phi).sum();
        assert_eq!(rc.count, expect);
        let empty = regular_system_count(&c, &one, &one, 100).unwrap();
        assert_eq!(empty.count, 0);
    }

    #[test]
    fn regular_count_brute_force() {
        let c = Constraint::new(2, 2, 1, 1).unwrap();
        let lo = BigRational::new(1.into(), 3.into());
        let hi = BigRational::new(3.into(), 2.into());
        let rc = regular_system_count(&c, &lo, &hi, 90).unwrap();
        let mut n_count = 0;
        for n in 45..=90u64 {
            if n % 2 != 1 {
                continue;
            }
            for m in 0..200u64 {
                let t = 2 * m + 1;
                if 3 * t > n && 2 * t < 3 * n && t.gcd(&n) == 1 {
                    n_count += 1;
                }
            }
        }
        assert_eq!(rc.count, n_count);
    }
}
