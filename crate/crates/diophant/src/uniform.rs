//! Uniform (Dirichlet-type) approximation under congruence constraints.
//!
//! For an approximating function `Psi` the question is whether every large
//! `Q` admits `(m, n)` with `1 <= b n + s <= Q` and
//! `|xi (b n + s) - (a m + r)| <= Psi(Q)`. This module scans that property
//! directly, evaluates the continued fraction classification, and builds the
//! explicit witness from convergents for any given `Q`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::cf::{eta, greedy_decompose, parse_rational, phi_ratio, ConvergentTable, Real, RealSpec};
use crate::congruence::{ext_gcd, pair_solve, uniform_conditions_met, Constraint};
use crate::enclosure::{precision_cap, rat_ceil, rat_floor, refine_capped, Enclosure};
use crate::error::{Error, Result};
use crate::json;
use crate::scan::{enclosure, Scaled, Window};
use crate::transcendental::{e_const, ln, ln_enclosure};

/// `Psi(Q) = cc * ln(Q + e)^beta * Q^(-mu)` on `Q >= 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PsiSpec {
    #[serde(serialize_with = "json::rat")]
    pub cc: BigRational,
    #[serde(serialize_with = "json::display")]
    pub mu: Rational64,
    #[serde(serialize_with = "json::display")]
    pub beta: Rational64,
    /// Sufficient condition for `Psi` to be nonincreasing.
    pub psi_nonincreasing: bool,
    /// Sufficient condition for `Q Psi(Q)` to be nondecreasing.
    pub tilde_nondecreasing: bool,
    /// Upper bound for `sup Psi~(Q) / Psi~(2Q)`, at least 1.
    #[serde(serialize_with = "json::rat")]
    pub kappa: BigRational,
    /// Lower bound for `inf Psi~`, when certified positive.
    #[serde(serialize_with = "opt_rat")]
    pub gamma: Option<BigRational>,
}

fn opt_rat<S: serde::Serializer>(x: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

// Over Q >= 1, ln(Q + e) (1 + e/Q) has minimum about 3.146 near Q = 5.85.
// The monotonicity tests below use the bound 3 for it.
const LOG_SLOPE_FLOOR: i64 = 3;

const CONST_BITS: u32 = 64;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn big_to_r64(x: &BigRational) -> Result<Rational64> {
    match (x.numer().to_i64(), x.denom().to_i64()) {
        (Some(n), Some(d)) if d <= u32::MAX as i64 => Ok(Rational64::new(n, d)),
        _ => Err(Error::pre(format!("exponent {x} is too large"))),
    }
}

/// `x^e` for a positive enclosure and rational `e`.
fn pow_r64(x: &Enclosure, e: &Rational64, bits: u32) -> Enclosure {
    if e.is_zero() {
        return Enclosure::from_int(1);
    }
    x.pow_ratio(*e.numer(), *e.denom() as u32, bits)
}

impl PsiSpec {
    pub fn power_log(cc: BigRational, mu: Rational64, beta: Rational64) -> Result<Self> {
        if !cc.is_positive() {
            return Err(Error::pre("cc must be positive"));
        }
        let three = Rational64::from_integer(LOG_SLOPE_FLOOR);
        let one = Rational64::one();
        let psi_nonincreasing = mu >= Rational64::zero() && (beta <= Rational64::zero() || beta <= three * mu);
        let tilde_nondecreasing = mu <= one && (beta >= Rational64::zero() || -beta <= three * (one - mu));
        let mut spec = PsiSpec {
            cc,
            mu,
            beta,
            psi_nonincreasing,
            tilde_nondecreasing,
            kappa: BigRational::one(),
            gamma: None,
        };
        if tilde_nondecreasing {
            spec.gamma = Some(spec.psi_tilde(&BigRational::one(), CONST_BITS).lo());
        } else {
            spec.kappa = spec.growth_bound(&BigRational::from_integer(2.into()), &BigRational::from_integer(2.into()));
        }
        Ok(spec)
    }

    /// `Psi(Q) = 1/Q`.
    pub fn reciprocal() -> Self {
        Self::power_log(BigRational::one(), Rational64::one(), Rational64::zero()).expect("valid constants")
    }

    /// Parse `cc,mu,beta`, each an integer, fraction or decimal.
    pub fn parse(t: &str) -> Result<Self> {
        let parts: Vec<&str> = t.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("expected cc,mu,beta but got {t:?}")));
        }
        let cc = parse_rational(parts[0])?;
        let mu = big_to_r64(&parse_rational(parts[1])?)?;
        let beta = big_to_r64(&parse_rational(parts[2])?)?;
        Self::power_log(cc, mu, beta)
    }

    fn exact_psi(&self, q: &BigRational) -> Option<BigRational> {
        if self.beta.is_zero() && *self.mu.denom() == 1 {
            let e = *self.mu.numer();
            let p = num_traits::pow(q.clone(), e.unsigned_abs() as usize);
            Some(if e >= 0 { &self.cc / p } else { &self.cc * p })
        } else {
            None
        }
    }

    /// Enclosure of `Psi(Q)` for `Q >= 1`, exact when no log or root is involved.
    pub fn psi(&self, q: &BigRational, bits: u32) -> Enclosure {
        if let Some(v) = self.exact_psi(q) {
            return Enclosure::exact(&v);
        }
        let g = bits + 16 + q.numer().bits() as u32;
        let qe = Enclosure::exact(q);
        let mut v = pow_r64(&qe, &-self.mu, g).mul_rat(&self.cc);
        if !self.beta.is_zero() {
            let l = ln_enclosure(&qe.add(&e_const(g)), g);
            v = v.mul(&pow_r64(&l, &self.beta, g));
        }
        v.round_out(g)
    }

    /// Enclosure of `Q Psi(Q)`.
    pub fn psi_tilde(&self, q: &BigRational, bits: u32) -> Enclosure {
        self.psi(q, bits + q.numer().bits() as u32).mul_rat(q)
    }

    /// Upper bound of `Psi~(Q) / Psi~(Q')` when `t_lo <= Q'/Q <= t_hi`.
    ///
    /// The power part is at most `t^(mu-1)` at the worse end of the range.
    /// The log part is at most `(1 + ln(t_hi)/ln(1 + e))^max(0, -beta)` because
    /// `ln(Q' + e) <= ln(t_hi) + ln(Q + e)`.
    fn growth_bound(&self, t_lo: &BigRational, t_hi: &BigRational) -> BigRational {
        let bits = CONST_BITS;
        let one = Rational64::one();
        let base = if self.mu <= one { t_lo } else { t_hi };
        let power = pow_r64(&Enclosure::exact(base), &(self.mu - one), bits);
        let log_part = if self.beta < Rational64::zero() {
            let l1 = ln_enclosure(&e_const(bits).add_int(&BigInt::one()), bits);
            let ratio = ln(t_hi, bits).div(&l1, bits).add_int(&BigInt::one());
            pow_r64(&ratio, &-self.beta, bits)
        } else {
            Enclosure::from_int(1)
        };
        let v = power.mul(&log_part).hi();
        if v < BigRational::one() {
            BigRational::one()
        } else {
            v
        }
    }

    /// Upper bound for `sup Psi~(Q) / Psi~(ab (Q + 1))`, at least 1.
    pub fn eta(&self, ab: u64) -> BigRational {
        if self.tilde_nondecreasing {
            return BigRational::one();
        }
        // Q / (ab (Q + 1)) lies in [1/(2ab), 1/ab).
        let t = BigRational::from_integer(ab.into());
        let t2 = &t * BigInt::from(2);
        self.growth_bound(&t, &t2)
    }

    /// `8 (ab)^2 kappa eta max{4M, 1/gamma}` with `M >= 1`.
    pub fn uniform_constant(&self, c: &Constraint, big_m: &BigInt) -> Result<BigRational> {
        let gamma = self
            .gamma
            .as_ref()
            .ok_or_else(|| Error::pre("no positive lower bound for Q Psi(Q) is available"))?;
        let ab = BigRational::from_integer(c.ab().into());
        let m = BigRational::from_integer(big_m.max(&BigInt::one()).clone());
        let inner = (m * BigInt::from(4)).max(gamma.recip());
        Ok(BigRational::from_integer(8.into()) * &ab * &ab * &self.kappa * self.eta(c.ab()) * inner)
    }
}

impl std::fmt::Display for PsiSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{},{}", self.cc, self.mu, self.beta)
    }
}

/// Outcome of a scan over `Q`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    /// `Q` with no admissible approximation within `Psi(Q)`.
    pub failing: Vec<u64>,
    /// `Q` whose comparison stayed undecided at the precision cap.
    pub undecided: Vec<u64>,
}

fn first_denominator(c: &Constraint) -> u64 {
    if c.s == 0 {
        c.b
    } else {
        c.s
    }
}

fn start_bits(qmax: u64) -> u32 {
    (2 * (64 - qmax.leading_zeros()) + 32).max(64)
}

/// Running minimum over admissible `1 <= N <= Q` of `dist(N xi + alpha, a Z + r)`.
///
/// Entry `Q` is `None` while no admissible `N <= Q` exists.
fn running_min<T: Scaled>(w: &Window<T>, c: &Constraint, qmax: u64) -> Vec<Option<Enclosure>> {
    let a = T::from_u64(c.a);
    let r = T::from_u64(c.r);
    let mut out = Vec::with_capacity(qmax as usize + 1);
    let mut cur: Option<(T, T)> = None;
    for q in 0..=qmax {
        if q >= 1 && q % c.b == c.s % c.b {
            let (lo, hi, _) = w.distance(&T::from_u64(q), &a, &r);
            cur = Some(match cur {
                None => (lo, hi),
                Some((l, h)) => (l.min(lo), h.min(hi)),
            });
        }
        out.push(cur.as_ref().map(|(l, h)| enclosure(l, h, &w.den)));
    }
    out
}

fn window_bound(c: &Constraint, qmax: u64) -> BigInt {
    BigInt::from(qmax + 2) * BigInt::from(c.a + 2) * 4u32
}

fn minima<R: Real + ?Sized>(xi: &R, alpha: Option<&dyn Real>, c: &Constraint, qmax: u64, bits: u32) -> Result<(Vec<Option<Enclosure>>, bool)> {
    let w = Window::build(xi, alpha, bits)?;
    let exact = w.is_exact();
    let v = match w.narrow(&window_bound(c, qmax)) {
        Some(wi) => running_min(&wi, c, qmax),
        None => running_min(&w, c, qmax),
    };
    Ok((v, exact))
}

/// `Q` in `[qmin, qmax]` for which no admissible `1 <= N <= Q` has
/// `dist(N xi, a Z + r) <= Psi(Q)`.
pub fn dirichlet_scan<R: Real + ?Sized>(xi: &R, c: &Constraint, psi: &PsiSpec, qmin: u64, qmax: u64) -> Result<ScanReport> {
    if !psi.psi_nonincreasing {
        return Err(Error::pre("Psi must be nonincreasing"));
    }
    if qmin == 0 || qmin > qmax {
        return Err(Error::pre("need 1 <= qmin <= qmax"));
    }
    let mut report = ScanReport::default();
    let mut pending: Vec<u64> = (qmin..=qmax).collect();
    let mut bits = start_bits(qmax);
    let cap = precision_cap();
    loop {
        let top = *pending.last().expect("pending is nonempty");
        let (mins, exact) = minima(xi, None, c, top, bits)?;
        let verdicts: Vec<(u64, Option<bool>)> = pending
            .par_iter()
            .map(|&q| {
                let v = match &mins[q as usize] {
                    None => Some(true),
                    Some(d) => {
                        let p = psi.psi(&BigRational::from_integer(q.into()), bits);
                        if p.certainly_lt(d) {
                            Some(true)
                        } else if d.certainly_le(&p) {
                            Some(false)
                        } else {
                            None
                        }
                    }
                };
                (q, v)
            })
            .collect();
        let mut undecided = Vec::new();
        for (q, v) in verdicts {
            match v {
                Some(true) => report.failing.push(q),
                Some(false) => {}
                None => undecided.push(q),
            }
        }
        if undecided.is_empty() {
            break;
        }
        if exact || bits >= cap {
            report.undecided = undecided;
            break;
        }
        pending = undecided;
        bits = (bits * 2).min(cap);
    }
    report.failing.sort_unstable();
    Ok(report)
}

/// Largest value of `D(Q) = Q min dist(N xi, a Z + r)` over `Q <= qmax`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExponentProbe {
    pub d_max: Enclosure,
    pub argmax: u64,
}

/// Maximum of `D(Q)` over admissible ranges `first N <= Q <= qmax`.
pub fn exponent_probe<R: Real + ?Sized>(xi: &R, c: &Constraint, qmax: u64) -> Result<ExponentProbe> {
    let first = first_denominator(c);
    if qmax < first {
        return Err(Error::pre("qmax is below the first admissible denominator"));
    }
    refine_capped(start_bits(qmax), |bits| {
        let (mins, exact) = minima(xi, None, c, qmax, bits)?;
        let values: Vec<Enclosure> = (first..=qmax)
            .map(|q| mins[q as usize].as_ref().expect("admissible").mul_int(&BigInt::from(q)))
            .collect();
        let best = (0..values.len())
            .max_by(|&i, &j| values[i].lo().cmp(&values[j].lo()).then(j.cmp(&i)))
            .expect("nonempty");
        let lo = values[best].lo();
        let clear = values.iter().enumerate().all(|(i, v)| i == best || v.hi_lt(&lo) || (exact && v.hi_le(&lo)));
        Ok(clear.then(|| ExponentProbe {
            d_max: values[best].clone(),
            argmax: first + best as u64,
        }))
    })
}

/// One index of the classification.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexReport {
    pub k: usize,
    pub conditions_met: bool,
    #[serde(serialize_with = "json::big")]
    pub a_k: BigInt,
    #[serde(serialize_with = "json::big")]
    pub q_k: BigInt,
    /// Enclosure of `a_k / Psi~(q_k)`.
    pub ratio: Enclosure,
}

/// Classification over `1 <= k <= kmax`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CnsReport {
    pub indices: Vec<IndexReport>,
    /// Ceiling of the largest ratio over indices where the conditions fail; 0 if none fail.
    #[serde(serialize_with = "json::big")]
    pub minimal_m: BigInt,
}

fn ratio_ceiling(a: &BigInt, q: &BigInt, psi: &PsiSpec) -> Result<(Enclosure, BigInt)> {
    let qr = BigRational::from_integer(q.clone());
    if let Some(p) = psi.exact_psi(&qr) {
        let v = BigRational::from_integer(a.clone()) / (p * &qr);
        return Ok((Enclosure::exact(&v), rat_ceil(&v)));
    }
    refine_capped(CONST_BITS, |bits| {
        let t = psi.psi_tilde(&qr, bits);
        if t.sign() != Some(std::cmp::Ordering::Greater) {
            return Ok(None);
        }
        let v = Enclosure::from_int(a.clone()).div(&t, bits);
        let (lo, hi) = (rat_ceil(&v.lo()), rat_ceil(&v.hi()));
        Ok((lo == hi).then_some((v, lo)))
    })
}

fn classify(table: &ConvergentTable, c: &Constraint, psi: &PsiSpec, kmax: usize) -> Result<CnsReport> {
    let mut indices = Vec::with_capacity(kmax);
    let mut minimal_m = BigInt::zero();
    for k in 1..=kmax {
        let met = uniform_conditions_met(k, table, c)?;
        let (ratio, ceil) = ratio_ceiling(table.a(k), table.q(k as i64), psi)?;
        if !met && ceil > minimal_m {
            minimal_m = ceil;
        }
        indices.push(IndexReport {
            k,
            conditions_met: met,
            a_k: table.a(k).clone(),
            q_k: table.q(k as i64).clone(),
            ratio,
        });
    }
    Ok(CnsReport { indices, minimal_m })
}

/// Conditions and ratios `a_k / Psi~(q_k)` for `1 <= k <= kmax`.
pub fn cns_report<R: Real + ?Sized>(xi: &R, c: &Constraint, psi: &PsiSpec, kmax: usize) -> Result<CnsReport> {
    let table = ConvergentTable::upto(&xi.expansion(kmax)?, kmax)?;
    classify(&table, c, psi, kmax)
}

/// Certified outcomes of the witness invariants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessChecks {
    /// `u` matches the congruence class prescribed for its branch.
    pub congruence: bool,
    /// Recomputing `(u, v)` from `(m, n)` returns the trace values, and
    /// `a m + r = u p_{k-2} + v p_{k-1}`, `b n + s = u q_{k-2} + v q_{k-1}`.
    pub reconstruction: bool,
    /// `0 <= u <= ab`.
    pub u_range: bool,
    /// `1 <= b n + s <= Q`.
    pub denominator_range: bool,
    /// `|u + v phi_{k-1}| / (2 q_{k-1}) < |xi (b n + s) - (a m + r)| <= |u + v phi_{k-1}| / q_{k-1}`,
    /// with strict upper inequality for `k >= 2`.
    pub sandwich: bool,
    /// `|u + v phi_{k-1}| < 4ab`.
    pub phi_bound: bool,
    /// `bound_value <= constant`.
    pub bound: bool,
}

impl WitnessChecks {
    pub fn all(&self) -> bool {
        self.congruence && self.reconstruction && self.u_range && self.denominator_range && self.sandwich && self.phi_bound && self.bound
    }
}

/// The explicit approximation built for one `Q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessTrace {
    #[serde(serialize_with = "json::rat")]
    pub q: BigRational,
    /// `floor(Q / ab)`.
    #[serde(serialize_with = "json::big")]
    pub q_prime: BigInt,
    /// Greedy decomposition `Q' = p q_{k-1} + q_{k-2} + w`.
    pub k: usize,
    #[serde(serialize_with = "json::big")]
    pub p: BigInt,
    #[serde(serialize_with = "json::big")]
    pub w: BigInt,
    /// Whether the congruence conditions hold at `k` (then `u = 0`).
    pub conditions_met: bool,
    /// `gcd(b p_{k-1}, a q_{k-1})`.
    #[serde(serialize_with = "json::big")]
    pub d: BigInt,
    #[serde(serialize_with = "json::big")]
    pub u: BigInt,
    #[serde(serialize_with = "json::big")]
    pub v: BigInt,
    #[serde(serialize_with = "json::big")]
    pub m: BigInt,
    #[serde(serialize_with = "json::big")]
    pub n: BigInt,
    #[serde(serialize_with = "json::big")]
    pub numerator: BigInt,
    #[serde(serialize_with = "json::big")]
    pub denominator: BigInt,
    /// `M` from the classification over indices `1..=k`.
    #[serde(serialize_with = "json::big")]
    pub minimal_m: BigInt,
    /// `8 (ab)^2 kappa eta max{4 max(M, 1), 1/gamma}`.
    #[serde(serialize_with = "json::rat")]
    pub constant: BigRational,
    /// Enclosure of `|xi (b n + s) - (a m + r)| / Psi(Q)`.
    pub bound_value: Enclosure,
    pub checks: WitnessChecks,
}

fn sign_of_k(k: usize) -> BigInt {
    // (-1)^(k-1)
    if k % 2 == 1 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// Decide a strict or non-strict comparison `x < y` / `x <= y`, `None` if undecided.
fn decide_lt(x: &Enclosure, y: &BigRational, strict: bool) -> Option<bool> {
    if x.hi_lt(y) || (!strict && x.hi_le(y)) {
        Some(true)
    } else if x.lo_gt(y) || (strict && x.lo_ge(y)) {
        Some(false)
    } else {
        None
    }
}

/// Witness for real `Q >= ab` following the convergent construction.
pub fn witness<R: Real + ?Sized>(xi: &R, c: &Constraint, q: &BigRational, psi: &PsiSpec) -> Result<WitnessTrace> {
    if !psi.psi_nonincreasing {
        return Err(Error::pre("Psi must be nonincreasing"));
    }
    let ab = BigInt::from(c.ab());
    if *q < BigRational::from_integer(ab.clone()) {
        return Err(Error::pre(format!("witness needs Q >= ab = {ab}")));
    }
    let (a, b, r, s) = (c.a_big(), c.b_big(), c.r_big(), c.s_big());
    let q_prime = rat_floor(&(q / &ab));
    let table = ConvergentTable::covering(&xi.expansion(0)?, &q_prime)?;
    let dec = greedy_decompose(&table, &q_prime)?;
    let k = dec.k;
    let ki = k as i64;
    let minimal_m = classify(&table, c, psi, k)?.minimal_m;
    let constant = psi.uniform_constant(c, &minimal_m)?;
    let (p1, q1) = (table.p(ki - 1).clone(), table.q(ki - 1).clone());
    let (p2, q2) = (table.p(ki - 2).clone(), table.q(ki - 2).clone());
    let sigma = sign_of_k(k);
    let met = uniform_conditions_met(k, &table, c)?;
    let d = (&b * &p1).gcd(&(&a * &q1));
    let target = &r * &q1 - &s * &p1;
    let (u, v, m, n) = if met {
        let (x0, modulus) = pair_solve(&p1, &r, &a, &q1, &s, &b)?.ok_or_else(|| Error::pre("conditions met but the congruence pair has no solution"))?;
        let v = if x0.is_zero() { modulus } else { x0 };
        let m = (&v * &p1 - &r) / &a;
        let n = (&v * &q1 - &s) / &b;
        (BigInt::zero(), v, m, n)
    } else {
        let u = (&sigma * &target).mod_floor(&d);
        // a q_{k-1} m - b p_{k-1} n = sigma u - (r q_{k-1} - s p_{k-1}).
        let rhs = &sigma * &u - &target;
        let (g, x, y) = ext_gcd(&(&a * &q1), &(&b * &p1));
        debug_assert_eq!(g, d);
        let t = &rhs / &g;
        let (m0, n0) = (&x * &t, -(&y * &t));
        let period_n = &a * &q1 / &g;
        let period_m = &b * &p1 / &g;
        let n = n0.mod_floor(&period_n);
        let h = (&n - &n0) / &period_n;
        let m = m0 + &period_m * h;
        let num = &a * &m + &r;
        let den = &b * &n + &s;
        let v = &sigma * (&den * &p2 - &num * &q2);
        (u, v, m, n)
    };
    let numerator = &a * &m + &r;
    let denominator = &b * &n + &s;
    let u_back = &sigma * (&numerator * &q1 - &denominator * &p1);
    let v_back = &sigma * (&denominator * &p2 - &numerator * &q2);
    let reconstruction = u_back == u
        && v_back == v
        && numerator == &u * &p2 + &v * &p1
        && denominator == &u * &q2 + &v * &q1
        && (&numerator - &r).is_multiple_of(&a)
        && (&denominator - &s).is_multiple_of(&b);
    let congruence = if met {
        u.is_zero()
    } else {
        (&u - &sigma * &target).is_multiple_of(&d) && u < d
    };
    let u_range = !u.is_negative() && u <= ab;
    let denominator_range = denominator.is_positive() && BigRational::from_integer(denominator.clone()) <= *q;

    let half = rat(1, 2);
    let four_ab = BigRational::from_integer(&ab * 4);
    let constant_c = constant.clone();
    let (sandwich, phi_bound, bound, bound_value) = refine_capped(CONST_BITS + denominator.bits() as u32, |bits| {
        // xi N - M = (q_{k-2} xi - p_{k-2})(u + v phi_{k-1}) given the integer identities,
        // so the two-sided estimate reduces to 1/2 < q_{k-1} eta_{k-2} <= 1.
        let rho = eta(xi, &table, ki - 2, bits)?.mul_int(&q1);
        let lower = decide_lt(&rho, &half, false).map(|le| !le);
        let upper = if k == 1 {
            decide_lt(&rho, &BigRational::one(), false)
        } else {
            decide_lt(&rho, &BigRational::one(), true)
        };
        let phi = phi_ratio(xi, &table, ki - 1, bits)?;
        let x = phi.mul_int(&v).add_int(&u).abs();
        let phi_ok = decide_lt(&x, &four_ab, true);
        let err = xi
            .enclose(bits + denominator.bits() as u32 + 2)?
            .mul_int(&denominator)
            .add_int(&-&numerator)
            .abs();
        let psi_q = psi.psi(q, bits);
        if psi_q.sign() != Some(std::cmp::Ordering::Greater) {
            return Ok(None);
        }
        let value = err.div(&psi_q, bits);
        let bound_ok = decide_lt(&value, &constant_c, false);
        Ok(match (lower, upper, phi_ok, bound_ok) {
            (Some(l), Some(u), Some(p), Some(bd)) => Some((l && u, p, bd, value)),
            _ => None,
        })
    })?;
    Ok(WitnessTrace {
        q: q.clone(),
        q_prime,
        k,
        p: dec.p,
        w: dec.w,
        conditions_met: met,
        d,
        u,
        v,
        m,
        n,
        numerator,
        denominator,
        minimal_m,
        constant,
        bound_value,
        checks: WitnessChecks {
            congruence,
            reconstruction,
            u_range,
            denominator_range,
            sandwich,
            phi_bound,
            bound,
        },
    })
}

/// Bound on the partial quotients `a_k`, `k >= 1`, of `b xi / a`, and whether
/// it comes from a finite prefix only.
pub fn badly_bound(xi: &RealSpec, c: &Constraint) -> Result<(BigInt, bool)> {
    if xi.exact_value().is_some() {
        return Err(Error::pre("xi must be irrational"));
    }
    let y = xi.scaled(&c.b_big(), &c.a_big())?;
    let cf = y.expansion(0)?;
    let m = cf.max_partial_quotient().unwrap_or_else(BigInt::one);
    Ok((m, matches!(y, RealSpec::DigitStream { .. })))
}

/// Best inhomogeneous approximation with `0 <= b n + s <= Q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BadlyWitness {
    #[serde(serialize_with = "json::rat")]
    pub q: BigRational,
    #[serde(serialize_with = "json::big")]
    pub m: BigInt,
    #[serde(serialize_with = "json::big")]
    pub n: BigInt,
    #[serde(serialize_with = "json::big")]
    pub numerator: BigInt,
    #[serde(serialize_with = "json::big")]
    pub denominator: BigInt,
    /// Enclosure of `Q |xi (b n + s) - (a m + r) + alpha|`.
    pub value: Enclosure,
    /// Bound `M` on the partial quotients of `b xi / a`.
    #[serde(serialize_with = "json::big")]
    pub partial_quotient_bound: BigInt,
    /// `2ab(M + 2)`.
    #[serde(serialize_with = "json::big")]
    pub constant: BigInt,
    /// Certified `value <= constant`.
    pub holds: bool,
    /// `M` was read from a finite prefix of a digit stream.
    pub surrogate: bool,
}

/// Direct minimisation of `|xi (b n + s) - (a m + r) + alpha|` over `0 <= b n + s <= Q`.
pub fn badly_witness(xi: &RealSpec, alpha: Option<&dyn Real>, c: &Constraint, q: &BigRational) -> Result<BadlyWitness> {
    if *q < BigRational::from_integer(BigInt::from(2 * c.b)) {
        return Err(Error::pre("need Q >= 2b"));
    }
    let (big_m, surrogate) = badly_bound(xi, c)?;
    let constant = BigInt::from(2 * c.ab()) * (&big_m + BigInt::from(2));
    let bound = BigRational::from_integer(constant.clone());
    let qi = rat_floor(q).to_u64().ok_or_else(|| Error::pre("Q is too large"))?;
    let ns: Vec<u64> = (0..=(qi - c.s) / c.b).map(|n| n * c.b + c.s).collect();
    let top = *ns.last().expect("Q >= 2b leaves n = 0 admissible");
    refine_capped(start_bits(top.max(2)), |bits| {
        let w = Window::build(xi, alpha, bits)?;
        let (best, min_lo) = match w.narrow(&window_bound(c, top)) {
            Some(wi) => best_offset(&wi, c, &ns),
            None => best_offset(&w, c, &ns),
        };
        let (nv, m, e) = best;
        let value = e.mul_rat(q);
        let holds = if value.hi_le(&bound) {
            true
        } else if min_lo.mul_rat(q).lo_gt(&bound) || w.is_exact() {
            false
        } else {
            return Ok(None);
        };
        let n = BigInt::from((nv - c.s) / c.b);
        Ok(Some(BadlyWitness {
            q: q.clone(),
            numerator: &m * c.a_big() + c.r_big(),
            m,
            n,
            denominator: BigInt::from(nv),
            value,
            partial_quotient_bound: big_m.clone(),
            constant: constant.clone(),
            holds,
            surrogate,
        }))
    })
}

/// Admissible `N` with the least upper distance bound, and the least lower bound overall.
fn best_offset<T: Scaled>(w: &Window<T>, c: &Constraint, ns: &[u64]) -> ((u64, BigInt, Enclosure), Enclosure) {
    let a = T::from_u64(c.a);
    let r = T::from_u64(c.r);
    let mut best: Option<(u64, T, T, T)> = None;
    let mut min_lo: Option<T> = None;
    for &nv in ns {
        let (lo, hi, m) = w.distance(&T::from_u64(nv), &a, &r);
        if min_lo.as_ref().is_none_or(|x| lo < *x) {
            min_lo = Some(lo.clone());
        }
        if best.as_ref().is_none_or(|b| hi < b.3) {
            best = Some((nv, m, lo, hi));
        }
    }
    let (nv, m, lo, hi) = best.expect("nonempty range");
    let ml = min_lo.expect("nonempty range");
    ((nv, m.to_big(), enclosure(&lo, &hi, &w.den)), enclosure(&ml, &ml, &w.den))
}

/// Expansion `[0; a_1, a_2, ...]` with `a_k = 2^k` at indices where the
/// congruence conditions fail and `a_k = 1` elsewhere.
pub fn adversarial_stream(c: &Constraint, depth: usize) -> Result<RealSpec> {
    let (mut p1, mut q1) = (BigInt::zero(), BigInt::one());
    let (mut p2, mut q2) = (BigInt::one(), BigInt::zero());
    let mut digits = Vec::with_capacity(depth);
    for k in 1..=depth {
        let met = crate::congruence::target_reachable(&p1, &q1, c);
        let ak = if met { BigInt::one() } else { BigInt::one() << k };
        let p = &ak * &p1 + &p2;
        let qn = &ak * &q1 + &q2;
        p2 = std::mem::replace(&mut p1, p);
        q2 = std::mem::replace(&mut q1, qn);
        digits.push(ak);
    }
    RealSpec::digits(0, digits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(a: u64, b: u64, r: u64, s: u64) -> Constraint {
        Constraint::new(a, b, r, s).unwrap()
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn psi_flags_and_constants() {
        let p = PsiSpec::reciprocal();
        assert!(p.psi_nonincreasing && p.tilde_nondecreasing);
        assert_eq!(p.gamma, Some(BigRational::one()));
        assert_eq!(p.psi(&q(8), 32), Enclosure::exact(&rat(1, 8)));
        let log2 = PsiSpec::parse("1,1,2").unwrap();
        assert!(log2.tilde_nondecreasing && log2.psi_nonincreasing);
        let v = log2.psi(&q(10), 60).mid_f64();
        assert!((v - (10f64 + std::f64::consts::E).ln().powi(2) / 10.0).abs() < 1e-12);
        let steep = PsiSpec::parse("1,3/2,0").unwrap();
        assert!(!steep.tilde_nondecreasing && steep.gamma.is_none());
        assert!(PsiSpec::parse("0,1,0").is_err());
    }

    #[test]
    fn log_slope_floor_holds() {
        // Minimum over Q >= 1 of ln(Q + e)(1 + e/Q), sampled finely.
        let mut min = f64::MAX;
        let mut x = 1.0f64;
        while x < 1e6 {
            min = min.min((x + std::f64::consts::E).ln() * (1.0 + std::f64::consts::E / x));
            x *= 1.0005;
        }
        assert!(min > LOG_SLOPE_FLOOR as f64 + 0.1, "{min}");
    }

    #[test]
    fn kappa_eta_bound_sampled_ratios() {
        for t in ["1,1/2,-1", "2,0,-1/2", "1,1,-1"] {
            let p = PsiSpec::parse(t).unwrap();
            let f = |x: f64| {
                let mu = *p.mu.numer() as f64 / *p.mu.denom() as f64;
                let be = *p.beta.numer() as f64 / *p.beta.denom() as f64;
                x.powf(1.0 - mu) * (x + std::f64::consts::E).ln().powf(be)
            };
            let kappa = crate::enclosure::rat_to_f64(&p.kappa);
            let eta = crate::enclosure::rat_to_f64(&p.eta(4));
            let mut x = 1.0f64;
            while x < 1e8 {
                assert!(f(x) <= kappa * f(2.0 * x) * (1.0 + 1e-12), "{t} kappa at {x}");
                assert!(f(x) <= eta * f(4.0 * (x + 1.0)) * (1.0 + 1e-12), "{t} eta at {x}");
                x *= 1.01;
            }
        }
    }

    #[test]
    fn homogeneous_dirichlet_holds() {
        for x in [RealSpec::sqrt(2).unwrap(), RealSpec::golden(), RealSpec::sqrt(7).unwrap()] {
            for cons in [c(1, 1, 0, 0), c(2, 3, 0, 0), c(3, 2, 0, 0)] {
                let psi = PsiSpec::power_log(BigRational::from_integer(cons.ab().into()), Rational64::one(), Rational64::zero()).unwrap();
                let rep = dirichlet_scan(&x, &cons, &psi, cons.b, 3000).unwrap();
                assert!(rep.failing.is_empty() && rep.undecided.is_empty(), "{x} {cons}");
            }
        }
    }

    #[test]
    fn sqrt2_scan_with_witness_constant() {
        let x = RealSpec::sqrt(2).unwrap();
        let cons = c(2, 2, 1, 1);
        let psi = PsiSpec::power_log(q(1024), Rational64::one(), Rational64::zero()).unwrap();
        let rep = dirichlet_scan(&x, &cons, &psi, 4, 10_000).unwrap();
        assert!(rep.failing.is_empty() && rep.undecided.is_empty());
    }

    #[test]
    fn scan_matches_brute_force_floats() {
        let x = RealSpec::sqrt(3).unwrap();
        let cons = c(3, 4, 1, 2);
        let psi = PsiSpec::parse("3,1,0").unwrap();
        let rep = dirichlet_scan(&x, &cons, &psi, 1, 600).unwrap();
        let xf = 3f64.sqrt();
        let mut expect = vec![];
        for qq in 1..=600u64 {
            let best = (1..=qq)
                .filter(|n| n % 4 == 2)
                .map(|n| {
                    let t = n as f64 * xf - 1.0;
                    (t - 3.0 * (t / 3.0).round()).abs()
                })
                .fold(f64::INFINITY, f64::min);
            if best > 3.0 / qq as f64 {
                expect.push(qq);
            }
        }
        assert_eq!(rep.failing, expect);
    }

    #[test]
    fn adversarial_stream_fails() {
        let cons = c(2, 2, 1, 1);
        let x = adversarial_stream(&cons, 14).unwrap();
        let t = ConvergentTable::upto(&x.expansion(0).unwrap(), 6).unwrap();
        assert_eq!(t.q(4), &BigInt::from(1193));
        let psi = PsiSpec::parse("4,1,0").unwrap();
        let good = dirichlet_scan(&RealSpec::sqrt(2).unwrap(), &cons, &psi, 4, 20_000).unwrap();
        assert!(good.failing.is_empty() && good.undecided.is_empty());
        let rep = dirichlet_scan(&x, &cons, &psi, 4, 20_000).unwrap();
        assert!(rep.undecided.is_empty());
        assert!(rep.failing.iter().any(|&f| (597..=1193).contains(&f)));
        assert!(rep.failing.contains(&19_125));
    }

    #[test]
    fn cns_examples() {
        let x = RealSpec::sqrt(2).unwrap();
        let one = PsiSpec::reciprocal();
        let rep = cns_report(&x, &c(2, 2, 1, 1), &one, 12).unwrap();
        assert_eq!(rep.minimal_m, BigInt::from(2));
        let t = ConvergentTable::upto(&x.expansion(0).unwrap(), 12).unwrap();
        for ir in &rep.indices {
            let j = ir.k as i64 - 1;
            assert_eq!(ir.conditions_met, t.p(j).is_odd() && t.q(j).is_odd());
        }
        let hom = cns_report(&RealSpec::golden(), &c(3, 5, 0, 0), &one, 10).unwrap();
        assert!(hom.indices.iter().all(|i| i.conditions_met));
        assert_eq!(hom.minimal_m, BigInt::zero());
        let bad = cns_report(&RealSpec::sqrt(3).unwrap(), &c(3, 4, 1, 2), &one, 20).unwrap();
        assert!(bad.minimal_m <= BigInt::from(2));
    }

    #[test]
    fn witness_sqrt2() {
        let x = RealSpec::sqrt(2).unwrap();
        let cons = c(2, 2, 1, 1);
        let psi = PsiSpec::reciprocal();
        for qq in [4i64, 5, 9, 17, 100, 577, 1000, 5000, 10_000] {
            let t = witness(&x, &cons, &q(qq), &psi).unwrap();
            assert!(t.checks.all(), "Q = {qq}: {:?}", t.checks);
            assert!(t.bound_value.hi_le(&q(1024)));
            assert!(t.constant <= q(1024));
        }
        assert!(witness(&x, &cons, &q(3), &psi).is_err());
    }

    #[test]
    fn witness_golden_and_homogeneous() {
        let psi = PsiSpec::reciprocal();
        for qq in (12..3000).step_by(97) {
            let t = witness(&RealSpec::golden(), &c(3, 4, 1, 2), &q(qq), &psi).unwrap();
            assert!(t.checks.all(), "Q = {qq}: {:?}", t);
        }
        for qq in (6..2000).step_by(53) {
            let t = witness(&RealSpec::sqrt(5).unwrap(), &c(2, 3, 0, 0), &q(qq), &psi).unwrap();
            assert!(t.conditions_met && t.u.is_zero() && t.checks.all());
        }
    }

    #[test]
    fn witness_real_q_and_log_psi() {
        let psi = PsiSpec::parse("1,1,2").unwrap();
        let t = witness(&RealSpec::sqrt(3).unwrap(), &c(2, 2, 1, 1), &rat(12345, 7), &psi).unwrap();
        assert!(t.checks.all(), "{t:?}");
    }

    #[test]
    fn badly_examples() {
        let x = RealSpec::sqrt(2).unwrap();
        let cons = c(2, 2, 1, 1);
        let w = badly_witness(&x, None, &cons, &q(1000)).unwrap();
        assert_eq!(w.partial_quotient_bound, BigInt::from(2));
        assert_eq!(w.constant, BigInt::from(32));
        assert!(w.holds);
        let third = RealSpec::rational(1, 3).unwrap();
        for qq in (4..1000).step_by(37) {
            let w = badly_witness(&RealSpec::golden(), Some(&third), &cons, &q(qq)).unwrap();
            assert!(w.holds, "Q = {qq}");
        }
    }

    #[test]
    fn exponent_probe_examples() {
        let hom = exponent_probe(&RealSpec::golden(), &c(2, 3, 0, 0), 5000).unwrap();
        assert!(hom.d_max.hi_le(&q(6)));
        let x = RealSpec::sqrt(2).unwrap();
        let cons = c(2, 2, 1, 1);
        let d2 = exponent_probe(&x, &cons, 100).unwrap();
        let d3 = exponent_probe(&x, &cons, 1000).unwrap();
        let d4 = exponent_probe(&x, &cons, 10_000).unwrap();
        assert!(d4.d_max.hi_le(&q(1024)));
        assert!(d2.d_max.certainly_le(&d3.d_max) || d2.d_max == d3.d_max);
        assert!((d4.d_max.mid_f64() - d3.d_max.mid_f64()).abs() < 0.5);
        let adv = adversarial_stream(&cons, 14).unwrap();
        let e2 = exponent_probe(&adv, &cons, 100).unwrap();
        let e3 = exponent_probe(&adv, &cons, 1000).unwrap();
        let e4 = exponent_probe(&adv, &cons, 10_000).unwrap();
        assert!(e2.d_max.certainly_lt(&e3.d_max) && e3.d_max.certainly_lt(&e4.d_max));
    }
}
