//! Seeded Monte-Carlo probes of the metric statements.
//!
//! Sample `i` of a trial with seed `s` is the real whose binary digits are the
//! output of ChaCha20 keyed by `s` on stream `i`, so any sample can be rebuilt
//! alone and the outcome does not depend on how samples are scheduled. Every
//! per-sample verdict is decided on certified enclosures; samples that stay
//! undecided at the precision cap are counted separately.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cf::{common_prefix, CfBody, CfExpansion, Real, RealSpec};
use crate::congruence::Constraint;
use crate::enclosure::{pow2, rat_floor, refine_capped, Enclosure};
use crate::error::{Error, Result};
use crate::scan::{abs_interval, enclosure, Window};
use crate::transcendental::{ln, ln2};
use crate::uniform::{dirichlet_scan, PsiSpec};

/// Uniform sample from `(lo, hi)` driven by a counter-addressed bit stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampledReal {
    pub seed: u64,
    pub index: u64,
    lo: BigRational,
    hi: BigRational,
}

fn stream(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// First 64 bits of sample `index`.
fn first_word(seed: u64, index: u64) -> u64 {
    stream(seed, index).next_u64()
}

/// Partial quotients shared by `n1/d1` and `n2/d2` (positive denominators).
fn shared_digits(mut n1: u128, mut d1: u128, mut n2: u128, mut d2: u128, out: &mut Vec<u64>) {
    loop {
        let f = n1 / d1;
        if f != n2 / d2 {
            return;
        }
        out.push(f as u64);
        let (r1, r2) = (n1 - f * d1, n2 - f * d2);
        if r1 == 0 || r2 == 0 {
            return;
        }
        (n1, d1, n2, d2) = (d1, r1, d2, r2);
    }
}

/// [`shared_digits`] for big integers.
fn shared_digits_big(mut n1: BigInt, mut d1: BigInt, mut n2: BigInt, mut d2: BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    loop {
        let (f, r1) = n1.div_mod_floor(&d1);
        let (g, r2) = n2.div_mod_floor(&d2);
        if f != g {
            return out;
        }
        out.push(f);
        if r1.is_zero() || r2.is_zero() {
            return out;
        }
        (n1, d1, n2, d2) = (d1, r1, d2, r2);
    }
}

impl SampledReal {
    pub fn new(seed: u64, index: u64, lo: BigRational, hi: BigRational) -> Result<Self> {
        if lo >= hi {
            return Err(Error::pre("sample interval must be nonempty"));
        }
        Ok(SampledReal { seed, index, lo, hi })
    }

    /// Sample from `(0, 1)`.
    pub fn unit(seed: u64, index: u64) -> Self {
        SampledReal {
            seed,
            index,
            lo: BigRational::zero(),
            hi: BigRational::one(),
        }
    }

    /// The first `n` bits of the stream as an integer in `[0, 2^n)`.
    pub fn prefix_bits(&self, n: u32) -> BigInt {
        let words = n.div_ceil(64);
        let mut rng = stream(self.seed, self.index);
        let mut x = BigInt::zero();
        for _ in 0..words {
            x = (x << 64usize) + BigInt::from(rng.next_u64());
        }
        x >> (words * 64 - n) as usize
    }

    /// The sample lies in this closed interval after `n` bits.
    pub fn interval(&self, n: u32) -> (BigRational, BigRational) {
        let x = self.prefix_bits(n);
        let w = &self.hi - &self.lo;
        let d = BigRational::from_integer(pow2(n));
        let lo = &self.lo + &w * BigRational::from_integer(x.clone()) / &d;
        let hi = &self.lo + &w * BigRational::from_integer(x + 1) / &d;
        (lo, hi)
    }

    /// `a0` and at least `depth` certified partial quotients.
    pub fn digits(&self, depth: usize) -> Result<(BigInt, Vec<BigInt>)> {
        let start = 64 + 4 * depth as u32;
        refine_capped(start, |n| {
            let (lo, hi) = self.interval(n);
            let mut d = shared_digits_big(lo.numer().clone(), lo.denom().clone(), hi.numer().clone(), hi.denom().clone());
            Ok((d.len() > depth).then(|| {
                let a0 = d.remove(0);
                (a0, d)
            }))
        })
    }

    /// Digit stream with at least `depth` certified partial quotients.
    pub fn to_spec(&self, depth: usize) -> Result<RealSpec> {
        let (a0, d) = self.digits(depth)?;
        RealSpec::digits(a0, d)
    }
}

impl Real for SampledReal {
    fn enclose(&self, bits: u32) -> Result<Enclosure> {
        let extra = (rat_floor(&(&self.hi - &self.lo)) + 1u32).bits() as u32;
        let (lo, hi) = self.interval(bits + extra + 2);
        Ok(Enclosure::from_bounds(&lo, &hi).round_out(bits + 2))
    }

    fn expansion(&self, depth: usize) -> Result<CfExpansion> {
        let (a0, d) = self.digits(depth.max(1))?;
        Ok(CfExpansion { a0, body: CfBody::Prefix(d) })
    }
}

/// `sample_real`: sample `index` of stream `seed` on `(lo, hi)`.
pub fn sample_real(seed: u64, index: u64, lo: &BigRational, hi: &BigRational) -> Result<SampledReal> {
    SampledReal::new(seed, index, lo.clone(), hi.clone())
}

/// Gauss measure `log((1 + hi)/(1 + lo)) / log 2` of `[lo, hi]`.
pub fn gauss_measure(lo: &BigRational, hi: &BigRational, bits: u32) -> Result<Enclosure> {
    let zero = BigRational::zero();
    let one = BigRational::one();
    if *lo < zero || lo > hi || *hi > one {
        return Err(Error::pre("need 0 <= lo <= hi <= 1"));
    }
    if lo == hi {
        return Ok(Enclosure::from_int(0));
    }
    let g = bits + 8;
    let ratio = (&one + hi) / (&one + lo);
    Ok(ln(&ratio, g).div(&ln2(g), g).round_out(bits))
}

/// Hits out of decided samples with the binomial standard error.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Proportion {
    pub label: String,
    pub hits: u64,
    pub decided: u64,
    pub fraction: f64,
    pub std_error: f64,
}

impl Proportion {
    pub fn new(label: impl Into<String>, hits: u64, decided: u64) -> Self {
        let n = decided.max(1) as f64;
        let fraction = if decided == 0 { 0.0 } else { hits as f64 / n };
        let std_error = (fraction * (1.0 - fraction) / n).sqrt();
        Proportion {
            label: label.into(),
            hits,
            decided,
            fraction,
            std_error,
        }
    }
}

/// Outcome of one Monte-Carlo experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialReport {
    pub experiment: String,
    pub seed: u64,
    pub samples: u64,
    pub parameters: BTreeMap<String, String>,
    /// Samples left undecided at the precision cap; their outcome is `u64::MAX`.
    pub undecided: u64,
    /// Per-sample outcome code; its meaning is documented by each experiment.
    pub outcomes: Vec<u64>,
    pub fractions: Vec<Proportion>,
    /// Reference values printed beside the fractions, never asserted here.
    pub reference: BTreeMap<String, f64>,
}

const UNDECIDED: u64 = u64::MAX;

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn constraint_label(c: &Constraint) -> String {
    format!("{},{},{},{}", c.a, c.b, c.r, c.s)
}

/// Blocks `[N1, N2]` as a validated list.
fn check_blocks(blocks: &[(u64, u64)]) -> Result<u64> {
    if blocks.is_empty() || blocks.len() > 32 {
        return Err(Error::pre("need between 1 and 32 blocks"));
    }
    if blocks.iter().any(|&(l, h)| l == 0 || l >= h) {
        return Err(Error::pre("every block needs 1 <= N1 < N2"));
    }
    Ok(blocks.iter().map(|b| b.1).max().expect("nonempty"))
}

fn block_mask(blocks: &[(u64, u64)], n: u64) -> u64 {
    blocks
        .iter()
        .enumerate()
        .filter(|(_, &(l, h))| l <= n && n <= h)
        .fold(0, |m, (i, _)| m | 1 << i)
}

/// Hits recorded as block masks: `(plain, with the gcd condition)`.
type Masks = (u64, u64);

struct Khintchine<'a> {
    c: &'a Constraint,
    psi: &'a PsiSpec,
    blocks: &'a [(u64, u64)],
    nmax: u64,
    content: u64,
    /// `cc` numerator, denominator and integer `mu` when `Psi` is an exact power.
    exact: Option<(i128, i128, u32)>,
    legendre: bool,
}

impl Khintchine<'_> {
    fn record(&self, masks: &mut Masks, n: u64, numer: &BigInt, gcd: u64) {
        if n % self.c.b != self.c.s || numer.is_negative() {
            return;
        }
        if numer.mod_floor(&BigInt::from(self.c.a)) != BigInt::from(self.c.r) {
            return;
        }
        let m = block_mask(self.blocks, n);
        masks.0 |= m;
        if gcd == self.content {
            masks.1 |= m;
        }
    }

    /// Legendre path on 64 bits of a unit sample; `None` when anything is undecided.
    fn fast(&self, x: u64) -> Option<Masks> {
        let (ccn, ccd, mu) = self.exact?;
        let one = 1u128 << 64;
        let mut digits = Vec::new();
        shared_digits(x as u128, one, x as u128 + 1, one, &mut digits);
        if digits.first() != Some(&0) {
            return None;
        }
        let mut masks = (0, 0);
        let (mut p0, mut q0, mut p1, mut q1) = (1i128, 0i128, 0i128, 1i128);
        let mut k = 0;
        loop {
            // Convergent (p1, q1) with index k.
            if q1 as u64 > self.nmax {
                return Some(masks);
            }
            let v1 = q1.checked_mul(x as i128)?.checked_sub(p1.checked_mul(one as i128)?)?;
            let v2 = v1 + q1;
            let (dlo, dhi) = if v1 <= 0 && v2 >= 0 {
                (0, v1.abs().max(v2.abs()))
            } else {
                (v1.abs().min(v2.abs()), v1.abs().max(v2.abs()))
            };
            let limit = q1.checked_mul(ccn)?.checked_mul(one as i128)?;
            let mut t = 1i128;
            loop {
                let n = t * q1;
                if n as u64 > self.nmax {
                    break;
                }
                let np = n.checked_pow(mu)?.checked_mul(ccd)?;
                if dhi.checked_mul(np)? < limit {
                    self.record(&mut masks, n as u64, &BigInt::from(t * p1), t as u64);
                } else if dlo.checked_mul(np)? >= limit {
                    break;
                } else {
                    return None;
                }
                t += 1;
            }
            k += 1;
            let a = *digits.get(k)? as i128;
            (p0, q0, p1, q1) = (p1, q1, a.checked_mul(p1)?.checked_add(p0)?, a.checked_mul(q1)?.checked_add(q0)?);
        }
    }

    /// Legendre path at `bits` with enclosures.
    fn legendre_at(&self, xi: &SampledReal, bits: u32) -> Result<Option<Masks>> {
        let (lo, hi) = xi.interval(bits);
        let (a0, digits) = common_prefix(&lo, &hi);
        let Some(a0) = a0 else { return Ok(None) };
        let mut masks = (0, 0);
        let (mut p0, mut q0, mut p1, mut q1) = (BigInt::one(), BigInt::zero(), a0, BigInt::one());
        let nmax = BigInt::from(self.nmax);
        let mut k = 0;
        loop {
            if q1 > nmax {
                return Ok(Some(masks));
            }
            let qr = BigRational::from_integer(q1.clone());
            let pr = BigRational::from_integer(p1.clone());
            let v1 = &qr * &lo - &pr;
            let v2 = &qr * &hi - &pr;
            let e = Enclosure::from_bounds(&v1, &v2).abs();
            let q = q1.to_u64().expect("below nmax");
            let mut t = 1u64;
            while t * q <= self.nmax {
                let n = t * q;
                let thr = self.psi.psi(&BigRational::from_integer(n.into()), bits).mul_int(&q1);
                if e.certainly_lt(&thr) {
                    self.record(&mut masks, n, &(&p1 * t), t);
                } else if thr.certainly_le(&e) {
                    break;
                } else {
                    return Ok(None);
                }
                t += 1;
            }
            k += 1;
            let Some(a) = digits.get(k - 1) else { return Ok(None) };
            let p2 = a * &p1 + &p0;
            let q2 = a * &q1 + &q0;
            (p0, q0, p1, q1) = (p1, q1, p2, q2);
        }
    }

    /// Direct scan of every admissible `N` in the blocks at `bits`.
    fn scan_at(&self, xi: &SampledReal, bits: u32) -> Result<Option<Masks>> {
        let w = Window::build(xi, None, bits)?;
        let (a, r) = (BigInt::from(self.c.a), BigInt::from(self.c.r));
        let mut masks = (0, 0);
        for n in 1..=self.nmax {
            if n % self.c.b != self.c.s || block_mask(self.blocks, n) == 0 {
                continue;
            }
            let nr = BigRational::from_integer(n.into());
            let thr = self.psi.psi(&nr, bits).mul_rat(&nr);
            let limit: BigInt = rat_floor(&(thr.hi() * BigRational::from_integer(w.den.clone()))) + 1u32;
            let mut undecided = false;
            let nb = BigInt::from(n);
            w.offsets(&nb, &a, &r, &limit, |m, lo, hi| {
                let (l, h) = abs_interval(&lo, &hi);
                let d = enclosure(&l, &h, &w.den);
                let numer = &a * &m + &r;
                if d.certainly_lt(&thr) {
                    let g = numer.gcd(&nb).to_u64().expect("divides n");
                    self.record(&mut masks, n, &numer, g);
                } else if !thr.certainly_le(&d) {
                    undecided = true;
                }
            });
            if undecided {
                return Ok(None);
            }
        }
        Ok(Some(masks))
    }

    fn outcome(&self, seed: u64, index: u64) -> Option<Masks> {
        if self.legendre {
            if let Some(m) = self.fast(first_word(seed, index)) {
                return Some(m);
            }
        }
        let xi = SampledReal::unit(seed, index);
        let start = 64 + 4 * (64 - self.nmax.leading_zeros());
        let r = if self.legendre {
            refine_capped(start, |b| self.legendre_at(&xi, b))
        } else {
            refine_capped(start, |b| self.scan_at(&xi, b))
        };
        r.ok()
    }
}

/// Whether every hit in the blocks is a multiple of a convergent.
///
/// Holds when `N^2 Psi(N) <= 1/2` on every block, which for `beta = 0`,
/// `mu >= 2` reduces to the left endpoint.
fn legendre_applies(psi: &PsiSpec, blocks: &[(u64, u64)]) -> bool {
    if !psi.beta.is_zero() || psi.mu < num_rational::Rational64::from_integer(2) {
        return false;
    }
    let half = BigRational::new(1.into(), 2.into());
    blocks.iter().all(|&(l, _)| {
        let n = BigRational::from_integer(l.into());
        psi.psi(&n, 64).mul_rat(&(&n * &n)).hi_le(&half)
    })
}

fn exact_power(psi: &PsiSpec) -> Option<(i128, i128, u32)> {
    if !psi.beta.is_zero() || *psi.mu.denom() != 1 || *psi.mu.numer() < 0 {
        return None;
    }
    Some((psi.cc.numer().to_i128()?, psi.cc.denom().to_i128()?, *psi.mu.numer() as u32))
}

/// `sum n Psi(b n + s)` over `n >= 0` with `b n + s` in the block.
fn block_sum(c: &Constraint, psi: &PsiSpec, (l, h): (u64, u64)) -> f64 {
    (l..=h)
        .filter(|n| n % c.b == c.s)
        .map(|n| {
            let k = (n - c.s) / c.b;
            k as f64 * psi.psi(&BigRational::from_integer(n.into()), 64).mid_f64()
        })
        .sum()
}

/// Fractions of unit samples with a certified hit `|xi - (a m + r)/N| < Psi(N)`,
/// `m >= 0`, `N = b n + s` in each block, with and without
/// `gcd(a m + r, N) = gcd(a, b, r, s)`.
///
/// Outcome code: bit `i` is a hit in block `i`, bit `32 + i` a hit with the gcd condition.
pub fn khintchine_trial(c: &Constraint, psi: &PsiSpec, blocks: &[(u64, u64)], samples: u64, seed: u64) -> Result<TrialReport> {
    if !psi.psi_nonincreasing {
        return Err(Error::pre("Psi must be nonincreasing"));
    }
    let nmax = check_blocks(blocks)?;
    let legendre = legendre_applies(psi, blocks);
    let k = Khintchine {
        c,
        psi,
        blocks,
        nmax,
        content: c.content(),
        exact: exact_power(psi),
        legendre,
    };
    let outcomes: Vec<u64> = (0..samples)
        .into_par_iter()
        .map(|i| match k.outcome(seed, i) {
            Some((p, g)) => p | g << 32,
            None => UNDECIDED,
        })
        .collect();
    let undecided = outcomes.iter().filter(|&&o| o == UNDECIDED).count() as u64;
    let decided = samples - undecided;
    let mut fractions = Vec::new();
    let mut reference = BTreeMap::new();
    for (i, &(l, h)) in blocks.iter().enumerate() {
        let plain = outcomes.iter().filter(|&&o| o != UNDECIDED && o >> i & 1 == 1).count() as u64;
        let gcd = outcomes.iter().filter(|&&o| o != UNDECIDED && o >> (32 + i) & 1 == 1).count() as u64;
        fractions.push(Proportion::new(format!("[{l},{h}]"), plain, decided));
        fractions.push(Proportion::new(format!("[{l},{h}] gcd"), gcd, decided));
        reference.insert(format!("block_sum [{l},{h}]"), block_sum(c, psi, (l, h)));
    }
    let blocks_s: Vec<String> = blocks.iter().map(|(l, h)| format!("[{l},{h}]")).collect();
    Ok(TrialReport {
        experiment: "khintchine".into(),
        seed,
        samples,
        parameters: params(&[
            ("constraint", constraint_label(c)),
            ("psi", psi.to_string()),
            ("blocks", blocks_s.join(" ")),
            ("path", if legendre { "convergents".into() } else { "scan".into() }),
        ]),
        undecided,
        outcomes,
        fractions,
        reference,
    })
}

/// Single-block trial; the report keeps only the requested variant.
pub fn khintchine_block_trial(c: &Constraint, psi: &PsiSpec, block: (u64, u64), samples: u64, seed: u64, require_gcd: bool) -> Result<TrialReport> {
    let mut rep = khintchine_trial(c, psi, &[block], samples, seed)?;
    let keep = if require_gcd { 1 } else { 0 };
    rep.fractions = vec![rep.fractions.swap_remove(keep)];
    let shift = if require_gcd { 32 } else { 0 };
    for o in rep.outcomes.iter_mut() {
        if *o != UNDECIDED {
            *o = *o >> shift & 1;
        }
    }
    rep.parameters.insert("require_gcd".into(), require_gcd.to_string());
    Ok(rep)
}

/// `Psi(Q)` for `Q <= qmax` as integers over `2^bits`, rounded outward.
fn scaled_psi_table(psi: &PsiSpec, qmax: u64, bits: u32) -> Vec<(i128, i128)> {
    let den = BigRational::from_integer(pow2(bits));
    (0..=qmax)
        .into_par_iter()
        .map(|q| {
            if q == 0 {
                return (0, 0);
            }
            let e = psi.psi(&BigRational::from_integer(q.into()), bits + 8);
            let lo = rat_floor(&(e.lo() * &den));
            let hi: BigInt = rat_floor(&(e.hi() * &den)) + 1u32;
            (lo.to_i128().unwrap_or(i128::MAX), hi.to_i128().unwrap_or(i128::MAX))
        })
        .collect()
}

const SURVIVAL_BITS: u32 = 64;

/// First failing `Q` in `[q0, qmax]` with the i128 kernel, `Some(0)` for none.
fn first_failure_fast(xi: &SampledReal, c: &Constraint, table: &[(i128, i128)], q0: u64, qmax: u64) -> Option<u64> {
    let w = Window::build(xi, None, SURVIVAL_BITS).ok()?;
    let wi = w.narrow(&(BigInt::from(qmax + 2) * BigInt::from(c.a + 2) * 4u32))?;
    if wi.den != 1i128 << SURVIVAL_BITS {
        return None;
    }
    let (a, r) = (c.a as i128, c.r as i128);
    let mut cur: Option<(i128, i128)> = None;
    for q in 1..=qmax {
        if q % c.b == c.s {
            let (lo, hi, _) = wi.distance(&(q as i128), &a, &r);
            cur = Some(match cur {
                None => (lo, hi),
                Some((l, h)) => (l.min(lo), h.min(hi)),
            });
        }
        if q < q0 {
            continue;
        }
        let (plo, phi) = table[q as usize];
        match cur {
            None => return Some(q),
            Some((dlo, dhi)) => {
                if phi < dlo {
                    return Some(q);
                }
                if dhi > plo {
                    return None;
                }
            }
        }
    }
    Some(0)
}

/// Fractions of unit samples with no Dirichlet failure for `q0 <= Q' <= Q`, for `Q` in the grid.
///
/// A failure at `Q'` means no admissible `1 <= N <= Q'` has
/// `dist(N xi, a Z + r) <= Psi(Q')`. Outcome code: the first failing `Q'`, or 0.
pub fn uniform_survival(c: &Constraint, psi: &PsiSpec, samples: u64, qgrid: &[u64], q0: u64, seed: u64) -> Result<TrialReport> {
    if !psi.psi_nonincreasing || !psi.tilde_nondecreasing {
        return Err(Error::pre("need Psi nonincreasing and Q Psi(Q) nondecreasing"));
    }
    let qmax = *qgrid.iter().max().ok_or_else(|| Error::pre("empty Q grid"))?;
    if q0 == 0 || q0 > qmax {
        return Err(Error::pre("need 1 <= q0 <= max of the grid"));
    }
    let table = scaled_psi_table(psi, qmax, SURVIVAL_BITS);
    let outcomes: Vec<u64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let xi = SampledReal::unit(seed, i);
            if let Some(f) = first_failure_fast(&xi, c, &table, q0, qmax) {
                return f;
            }
            match dirichlet_scan(&xi, c, psi, q0, qmax) {
                Ok(rep) => {
                    let first = rep.failing.first().copied();
                    let und = rep.undecided.first().copied();
                    match (first, und) {
                        (Some(f), Some(u)) if u < f => UNDECIDED,
                        (Some(f), _) => f,
                        (None, Some(_)) => UNDECIDED,
                        (None, None) => 0,
                    }
                }
                Err(_) => UNDECIDED,
            }
        })
        .collect();
    let undecided = outcomes.iter().filter(|&&o| o == UNDECIDED).count() as u64;
    let decided = samples - undecided;
    let mut grid = qgrid.to_vec();
    grid.sort_unstable();
    let fractions = grid
        .iter()
        .map(|&q| {
            let alive = outcomes.iter().filter(|&&o| o != UNDECIDED && (o == 0 || o > q)).count() as u64;
            Proportion::new(format!("Q={q}"), alive, decided)
        })
        .collect();
    let mut reference = BTreeMap::new();
    reference.insert(
        "series_partial_sum".into(),
        (1..=qmax)
            .map(|q| {
                let p = psi.psi(&BigRational::from_integer(q.into()), 64).mid_f64();
                1.0 / (q as f64 * q as f64 * p)
            })
            .sum(),
    );
    Ok(TrialReport {
        experiment: "uniform_survival".into(),
        seed,
        samples,
        parameters: params(&[("constraint", constraint_label(c)), ("psi", psi.to_string()), ("q0", q0.to_string())]),
        undecided,
        outcomes,
        fractions,
        reference,
    })
}

/// `phi_n = max(1, coef n^exp)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PhiSeq {
    pub coef: u64,
    pub exp: u32,
}

impl PhiSeq {
    pub fn at(&self, n: u64) -> u64 {
        self.coef.saturating_mul(n.saturating_pow(self.exp)).max(1)
    }

    /// Whether `sum 1/phi_n` diverges.
    pub fn diverges(&self) -> bool {
        self.exp <= 1
    }
}

/// How the block `f_n(xi)` is chosen.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum BlockRule {
    /// The same block at every index.
    Fixed(Vec<u64>),
    /// `d = 2`: the pair `(a_n, a_{n+1})` in `[1, b]^2` that makes `b | q_{n+1}`
    /// given `(q_{n-2}, q_{n-1}) mod b`.
    Targeting { b: u64 },
}

/// Events `(a_n, ..., a_{n+d-1}) = f_n(xi)` and `a_{n+d} >= phi_n` at `n = c k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BBTrialSpec {
    pub digit_cap: u64,
    pub d: usize,
    pub c: u64,
    pub phi: PhiSeq,
    pub rule: BlockRule,
}

/// Smallest `(i1, i2)` in `[1, b]^2` with `i2 (i1 beta + alpha) + beta = 0 (mod b)`.
pub fn targeting_pair(alpha: u64, beta: u64, b: u64) -> (u64, u64) {
    for i1 in 1..=b {
        for i2 in 1..=b {
            let u1 = (i1 * beta + alpha) % b;
            if (i2 * u1 + beta).is_multiple_of(b) {
                return (i1, i2);
            }
        }
    }
    unreachable!("a pair exists for every residue pair")
}

impl BBTrialSpec {
    pub fn validate(&self) -> Result<()> {
        if self.digit_cap == 0 {
            return Err(Error::pre("digit cap must be positive"));
        }
        if self.c < self.d as u64 + 1 {
            return Err(Error::pre("need c >= d + 1"));
        }
        match &self.rule {
            BlockRule::Fixed(v) => {
                if v.len() != self.d || v.iter().any(|&x| x == 0 || x > self.digit_cap) {
                    return Err(Error::pre("fixed block must have length d with entries in [1, A]"));
                }
            }
            BlockRule::Targeting { b } => {
                if self.d != 2 || *b == 0 || *b > self.digit_cap {
                    return Err(Error::pre("targeting rule needs d = 2 and 1 <= b <= A"));
                }
            }
        }
        Ok(())
    }

    /// `log 2 / (4 (2 (2A)^d)^4)`.
    pub fn lower_bound(&self) -> f64 {
        let inner = 2.0 * (2.0 * self.digit_cap as f64).powi(self.d as i32);
        std::f64::consts::LN_2 / (4.0 * inner.powi(4))
    }

    /// First `k` in range whose event at `n = c k` holds, given digits `a_1, a_2, ...`.
    fn first_event(&self, digits: &[BigInt], ks: (u64, u64)) -> u64 {
        let a = |n: u64| &digits[n as usize - 1];
        // q_n mod b for the targeting rule, q_{-1} = 0, q_0 = 1.
        let qmod: Vec<u64> = match &self.rule {
            BlockRule::Targeting { b } => {
                let bb = BigInt::from(*b);
                let mut v = vec![0u64, 1 % b];
                for d in digits {
                    let n = v.len();
                    let am = d.mod_floor(&bb).to_u64().expect("below b");
                    v.push((am * v[n - 1] + v[n - 2]) % b);
                }
                v
            }
            BlockRule::Fixed(_) => Vec::new(),
        };
        for k in ks.0..=ks.1 {
            let n = self.c * k;
            let block: Vec<u64> = match &self.rule {
                BlockRule::Fixed(v) => v.clone(),
                BlockRule::Targeting { b } => {
                    // qmod[j + 1] = q_j.
                    let (i1, i2) = targeting_pair(qmod[n as usize - 1], qmod[n as usize], *b);
                    vec![i1, i2]
                }
            };
            let matches = block.iter().enumerate().all(|(j, &f)| *a(n + j as u64) == BigInt::from(f));
            if matches && *a(n + self.d as u64) >= BigInt::from(self.phi.at(n)) {
                return k;
            }
        }
        0
    }
}

/// Fraction of unit samples with at least one event `E_{ck}` for `k` in `[k_lo, k_hi]`.
///
/// Outcome code: the first such `k`, or 0.
pub fn borel_bernstein_trial(spec: &BBTrialSpec, samples: u64, k_range: (u64, u64), seed: u64) -> Result<TrialReport> {
    spec.validate()?;
    let (k_lo, k_hi) = k_range;
    if k_lo == 0 || k_lo > k_hi {
        return Err(Error::pre("need 1 <= k_lo <= k_hi"));
    }
    let depth = (spec.c * k_hi) as usize + spec.d;
    let outcomes: Vec<u64> = (0..samples)
        .into_par_iter()
        .map(|i| match SampledReal::unit(seed, i).digits(depth) {
            Ok((_, digits)) => spec.first_event(&digits, k_range),
            Err(_) => UNDECIDED,
        })
        .collect();
    let undecided = outcomes.iter().filter(|&&o| o == UNDECIDED).count() as u64;
    let hits = outcomes.iter().filter(|&&o| o != UNDECIDED && o > 0).count() as u64;
    let mut reference = BTreeMap::new();
    let tail: f64 = (k_lo..=k_hi).map(|k| 1.0 / spec.phi.at(spec.c * k) as f64).sum();
    reference.insert("union_bound".into(), 2.0 * tail);
    reference.insert("limsup_lower_bound".into(), spec.lower_bound());
    Ok(TrialReport {
        experiment: "borel_bernstein".into(),
        seed,
        samples,
        parameters: params(&[
            ("spec", format!("{spec:?}")),
            ("k_range", format!("{k_lo}..={k_hi}")),
            ("regime", if spec.phi.diverges() { "divergent".into() } else { "convergent".into() }),
        ]),
        undecided,
        outcomes,
        fractions: vec![Proportion::new("events", hits, samples - undecided)],
        reference,
    })
}
