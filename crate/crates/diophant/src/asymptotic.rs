//! Exhaustive search for constrained approximations `(a m + r) / (b n + s)`.
//!
//! A hit at factor `f` is a pair with `|xi - (a m + r)/N| <= f a b / N^2`,
//! where `N = b n + s >= 1`. Every admissible denominator up to the bound is
//! examined, and every numerator whose distance could meet the threshold is
//! decided with certified comparisons.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use serde::Serialize;

use crate::cf::Real;
use crate::congruence::Constraint;
use crate::enclosure::{precision_cap, Enclosure};
use crate::error::{Error, Result};
use crate::json;
use crate::scan::{abs_interval, Scaled, Window};
use crate::transcendental;

/// One approximation `numerator / denominator` meeting the threshold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hit {
    #[serde(serialize_with = "json::big")]
    pub m: BigInt,
    #[serde(serialize_with = "json::big")]
    pub n: BigInt,
    /// `N = b n + s`.
    #[serde(serialize_with = "json::big")]
    pub denominator: BigInt,
    /// `a m + r`.
    #[serde(serialize_with = "json::big")]
    pub numerator: BigInt,
    /// Enclosure of `|xi + alpha/N - numerator/N|`.
    pub error: Enclosure,
    /// Enclosure of `N^2 error / (a b)`.
    pub quality: Enclosure,
}

/// Admissible denominators `b n + s` in `[1, qmax]`.
pub fn admissible(c: &Constraint, qmax: u64) -> impl Iterator<Item = u64> {
    let first = if c.s == 0 { c.b } else { c.s };
    (first..=qmax).step_by(c.b as usize)
}

enum Outcome {
    Hit,
    Miss,
    Undecided,
}

struct Factor {
    num: BigInt,
    den: BigInt,
}

fn scan<T: Scaled>(w: &Window<T>, c: &Constraint, f: &Factor, ns: &[u64], hits: &mut Vec<Hit>, undecided: &mut Vec<u64>) {
    let a = T::from_u64(c.a);
    let r = T::from_u64(c.r);
    let fq = T::from_big(&f.den).expect("window narrowed against the factor");
    let rhs = T::from_big(&f.num).expect("window narrowed against the factor") * T::from_u64(c.ab()) * w.den.clone();
    for &nv in ns {
        let n = T::from_u64(nv);
        let scale = n.clone() * fq.clone();
        let limit = crate::scan::ceil_div(&rhs, &scale);
        let mut state = Outcome::Miss;
        let mut found = Vec::new();
        w.offsets(&n, &a, &r, &limit, |m, lo, hi| {
            let (alo, ahi) = abs_interval(&lo, &hi);
            if ahi.clone() * scale.clone() <= rhs {
                found.push((m, alo, ahi));
                if !matches!(state, Outcome::Undecided) {
                    state = Outcome::Hit;
                }
            } else if alo * scale.clone() <= rhs {
                state = Outcome::Undecided;
            }
        });
        match state {
            Outcome::Undecided => undecided.push(nv),
            Outcome::Hit => {
                for (m, alo, ahi) in found {
                    hits.push(make_hit(c, nv, &m.to_big(), &alo.to_big(), &ahi.to_big(), &w.den.to_big()));
                }
            }
            Outcome::Miss => {}
        }
    }
}

fn make_hit(c: &Constraint, nv: u64, m: &BigInt, alo: &BigInt, ahi: &BigInt, den: &BigInt) -> Hit {
    let big_n = BigInt::from(nv);
    let error = Enclosure::from_scaled(alo.clone(), ahi.clone(), den * &big_n);
    let quality = Enclosure::from_scaled(alo * &big_n, ahi * &big_n, den * BigInt::from(c.ab()));
    Hit {
        m: m.clone(),
        n: BigInt::from((nv - c.s) / c.b),
        denominator: big_n,
        numerator: m * BigInt::from(c.a) + BigInt::from(c.r),
        error,
        quality,
    }
}

fn start_bits(qmax: u64, factor: &BigRational) -> u32 {
    let qb = 64 - qmax.leading_zeros();
    (2 * qb + factor.denom().bits() as u32 + 24).max(64)
}

/// Hits of `|N xi + alpha - (a m + r)| <= factor a b / N` for admissible `N <= qmax`.
pub fn inhomogeneous_hits<R: Real + ?Sized>(xi: &R, alpha: Option<&dyn Real>, c: &Constraint, factor: &BigRational, qmax: u64) -> Result<Vec<Hit>> {
    if factor.is_negative() {
        return Err(Error::pre("factor must be nonnegative"));
    }
    let f = Factor {
        num: factor.numer().clone(),
        den: factor.denom().clone(),
    };
    let mut pending: Vec<u64> = admissible(c, qmax).collect();
    let mut hits = Vec::new();
    let mut bits = start_bits(qmax, factor);
    let cap = precision_cap();
    loop {
        let w = Window::build(xi, alpha, bits)?;
        let mut undecided = Vec::new();
        let bound = (BigInt::from(qmax) + 2u32).pow(2) * (&f.num * BigInt::from(c.ab()) + BigInt::from(c.a + 2)) * (&f.den + 1u32) * 8u32;
        match w.narrow(&bound) {
            Some(wi) => scan(&wi, c, &f, &pending, &mut hits, &mut undecided),
            None => scan(&w, c, &f, &pending, &mut hits, &mut undecided),
        }
        if undecided.is_empty() {
            break;
        }
        if w.is_exact() || bits >= cap {
            return Err(Error::Indeterminate { cap_bits: cap });
        }
        pending = undecided;
        bits = (bits * 2).min(cap);
    }
    hits.sort_by(|x, y| (&x.denominator, &x.m).cmp(&(&y.denominator, &y.m)));
    Ok(hits)
}

/// Hits with `|xi - (a m + r)/N| <= factor a b / N^2` for admissible `N <= qmax`.
pub fn brute_hits<R: Real + ?Sized>(xi: &R, c: &Constraint, factor: &BigRational, qmax: u64) -> Result<Vec<Hit>> {
    inhomogeneous_hits(xi, None, c, factor, qmax)
}

/// Number of hits with denominator at most each grid value.
pub fn hit_counts<R: Real + ?Sized>(xi: &R, c: &Constraint, factor: &BigRational, grid: &[u64]) -> Result<Vec<(u64, usize)>> {
    let Some(&top) = grid.iter().max() else { return Ok(vec![]) };
    let hits = brute_hits(xi, c, factor, top)?;
    Ok(grid
        .iter()
        .map(|&q| (q, hits.iter().filter(|h| h.denominator <= BigInt::from(q)).count()))
        .collect())
}

/// Least quality among factor-one hits up to `qmax`, or `None` without hits.
pub fn approximation_constant<R: Real + ?Sized>(xi: &R, c: &Constraint, qmax: u64) -> Result<Option<Enclosure>> {
    let hits = brute_hits(xi, c, &BigRational::from_integer(1.into()), qmax)?;
    Ok(hits.iter().map(|h| h.quality.clone()).reduce(|x, y| x.min(&y)))
}

/// Least quality among factor-one hits with `qmin <= N <= qmax`.
///
/// Restricting to a window far from the origin probes the limit inferior,
/// which early small denominators can undercut.
pub fn tail_constant<R: Real + ?Sized>(xi: &R, c: &Constraint, qmin: u64, qmax: u64) -> Result<Option<Enclosure>> {
    let hits = brute_hits(xi, c, &BigRational::from_integer(1.into()), qmax)?;
    let lo = BigInt::from(qmin);
    Ok(hits.iter().filter(|h| h.denominator >= lo).map(|h| h.quality.clone()).reduce(|x, y| x.min(&y)))
}

/// Running extrema of `sin(n xi + alpha)^n` for `n = 1..=nmax`.
#[derive(Clone, Debug, Serialize)]
pub struct TrigProbe {
    pub nmax: u64,
    /// `running_min[i]` encloses the minimum over `n <= i + 1`.
    pub running_min: Vec<Enclosure>,
    pub running_max: Vec<Enclosure>,
    /// Index whose value has the lowest upper bound.
    pub argmin: u64,
    /// Index whose value has the highest lower bound.
    pub argmax: u64,
}

impl TrigProbe {
    pub fn min(&self) -> &Enclosure {
        self.running_min.last().expect("nmax >= 1")
    }

    pub fn max(&self) -> &Enclosure {
        self.running_max.last().expect("nmax >= 1")
    }
}

/// Certified running extrema of `sin(n xi + alpha)^n`.
pub fn trig_probe<R: Real + ?Sized>(xi: &R, alpha: Option<&dyn Real>, nmax: u64) -> Result<TrigProbe> {
    if nmax == 0 {
        return Err(Error::pre("nmax must be positive"));
    }
    let bits: u32 = 96;
    let nb = 64 - nmax.leading_zeros();
    let x = xi.enclose(bits + nb + 8)?;
    let al = match alpha {
        Some(a) => a.enclose(bits + 8)?,
        None => Enclosure::from_int(0),
    };
    let mut running_min: Vec<Enclosure> = Vec::with_capacity(nmax as usize);
    let mut running_max: Vec<Enclosure> = Vec::with_capacity(nmax as usize);
    let (mut argmin, mut argmax) = (1u64, 1u64);
    let (mut best_lo_hi, mut best_hi_lo): (Option<Enclosure>, Option<Enclosure>) = (None, None);
    for n in 1..=nmax {
        let arg = x.mul_int(&BigInt::from(n)).add(&al).round_out(bits + nb + 8);
        let s = transcendental::sin(&arg, bits + nb);
        let v = s.powi(n, bits + nb);
        let (mn, mx) = match (running_min.last(), running_max.last()) {
            (Some(a), Some(b)) => (a.min(&v), b.max(&v)),
            _ => (v.clone(), v.clone()),
        };
        if best_lo_hi
            .as_ref()
            .is_none_or(|b| Enclosure::exact(&v.hi()).certainly_lt(&Enclosure::exact(&b.hi())))
        {
            argmin = n;
            best_lo_hi = Some(v.clone());
        }
        if best_hi_lo
            .as_ref()
            .is_none_or(|b| Enclosure::exact(&b.lo()).certainly_lt(&Enclosure::exact(&v.lo())))
        {
            argmax = n;
            best_hi_lo = Some(v.clone());
        }
        running_min.push(mn.round_out(bits));
        running_max.push(mx.round_out(bits));
    }
    Ok(TrigProbe {
        nmax,
        running_min,
        running_max,
        argmin,
        argmax,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::RealSpec;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn zero_factor_has_no_hits() {
        let c = Constraint::new(2, 2, 1, 1).unwrap();
        assert!(brute_hits(&RealSpec::sqrt(2).unwrap(), &c, &q(0, 1), 1000).unwrap().is_empty());
    }

    #[test]
    fn hits_respect_threshold_and_congruences() {
        let c = Constraint::new(3, 4, 1, 2).unwrap();
        let x = RealSpec::golden();
        let hits = brute_hits(&x, &c, &q(1, 4), 5000).unwrap();
        assert!(!hits.is_empty());
        for h in &hits {
            assert!(h.quality.hi_le(&q(1, 4)));
            assert_eq!(h.denominator, &h.n * 4 + 2);
            assert_eq!(h.numerator, &h.m * 3 + 1);
        }
    }

    #[test]
    fn rational_input_is_exact() {
        let c = Constraint::new(1, 1, 0, 0).unwrap();
        let x = RealSpec::rational(2, 3).unwrap();
        let hits = brute_hits(&x, &c, &q(0, 1), 9).unwrap();
        let dens: Vec<_> = hits.iter().map(|h| h.denominator.clone()).collect();
        assert_eq!(dens, [3, 6, 9].map(BigInt::from));
    }

    #[test]
    fn golden_constant() {
        let c = Constraint::new(1, 1, 0, 0).unwrap();
        let g = RealSpec::golden();
        // The global minimum sits at N = 1: |phi - 2| = 2 - phi.
        let k = approximation_constant(&g, &c, 2000).unwrap().unwrap();
        assert!((k.mid_f64() - 0.3819660112501051).abs() < 1e-12);
        let t = tail_constant(&g, &c, 200, 2000).unwrap().unwrap();
        assert!((t.mid_f64() - 0.4472135955).abs() < 1e-4);
    }

    #[test]
    fn trig_probe_small() {
        let t = trig_probe(&RealSpec::rational(1, 1).unwrap(), None, 50).unwrap();
        let direct = (1..=50).map(|n| (n as f64).sin().powi(n)).fold(f64::INFINITY, f64::min);
        assert!((t.min().mid_f64() - direct).abs() < 1e-9);
        for w in t.running_min.windows(2) {
            assert!(!w[0].certainly_lt(&w[1]));
        }
    }
}
