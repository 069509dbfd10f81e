//! Continued fractions, convergents and certified enclosures of real inputs.
//!
//! A real is one of three kinds of [`RealSpec`]: an exact rational, a
//! quadratic irrational `(P + sqrt D) / R`, or a finite prefix of partial
//! quotients. The [`Real`] trait abstracts what the scanning code needs:
//! enclosures at a requested precision and a continued fraction expansion.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::enclosure::{floor_div, pow2, rat_floor, Enclosure};
use crate::error::{Error, Result};

/// A real number given in exact form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RealSpec {
    /// Exact rational, stored reduced.
    Rational(BigRational),
    /// `(p + sqrt(d)) / r` with `d > 0` not a perfect square and `r != 0`.
    QuadraticSurd { p: BigInt, d: BigInt, r: BigInt },
    /// The real determined by `[a0; digits...]` up to its horizon `digits.len()`.
    DigitStream { a0: BigInt, digits: Vec<BigInt> },
}

/// Partial quotients after `a0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CfBody {
    /// Terminating expansion of a rational, in canonical form (no trailing 1).
    Finite(Vec<BigInt>),
    /// Eventually periodic expansion of a quadratic irrational.
    Periodic { preperiod: Vec<BigInt>, period: Vec<BigInt> },
    /// Known prefix of an expansion whose continuation is unknown.
    Prefix(Vec<BigInt>),
}

/// Continued fraction `[a0; a1, a2, ...]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfExpansion {
    pub a0: BigInt,
    pub body: CfBody,
}

/// What the scanning code needs from a real input.
pub trait Real: Sync {
    /// Enclosure of width at most `2^-bits`.
    fn enclose(&self, bits: u32) -> Result<Enclosure>;

    /// The exact value when the real is rational.
    fn exact_value(&self) -> Option<BigRational> {
        None
    }

    /// Expansion valid for at least `depth` partial quotients after `a0`, or the
    /// whole expansion when it is finite or periodic.
    fn expansion(&self, depth: usize) -> Result<CfExpansion>;
}

fn parse_int(s: &str) -> Result<BigInt> {
    s.trim().parse::<BigInt>().map_err(|_| Error::Parse(format!("not an integer: {s:?}")))
}

/// Parse `p/q`, an integer, or a terminating decimal such as `-0.25`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let q = parse_int(q)?;
        if q.is_zero() {
            return Err(Error::pre("zero denominator"));
        }
        return Ok(BigRational::new(parse_int(p)?, q));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.is_empty() || !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(Error::Parse(format!("not a decimal: {s:?}")));
        }
        let neg = ip.trim_start().starts_with('-');
        let whole = if ip.is_empty() || ip == "-" || ip == "+" {
            BigInt::zero()
        } else {
            parse_int(ip)?
        };
        let scale = BigInt::from(10u32).pow(fp.len() as u32);
        let frac = parse_int(fp)?;
        let num = whole.abs() * &scale + frac;
        return Ok(BigRational::new(if neg { -num } else { num }, scale));
    }
    Ok(BigRational::from_integer(parse_int(s)?))
}

fn is_square(d: &BigInt) -> bool {
    if d.is_negative() {
        return false;
    }
    let s = d.sqrt();
    &s * &s == *d
}

impl RealSpec {
    pub fn rational(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Self> {
        let q = q.into();
        if q.is_zero() {
            return Err(Error::pre("zero denominator"));
        }
        Ok(RealSpec::Rational(BigRational::new(p.into(), q)))
    }

    /// `(p + sqrt(d)) / r`; rejects square `d` as rational input.
    pub fn surd(p: impl Into<BigInt>, d: impl Into<BigInt>, r: impl Into<BigInt>) -> Result<Self> {
        let (p, d, r) = (p.into(), d.into(), r.into());
        if r.is_zero() {
            return Err(Error::pre("zero denominator"));
        }
        if !d.is_positive() {
            return Err(Error::pre("radicand must be positive"));
        }
        if is_square(&d) {
            return Err(Error::pre("rational input"));
        }
        Ok(RealSpec::QuadraticSurd { p, d, r })
    }

    pub fn digits(a0: impl Into<BigInt>, digits: Vec<BigInt>) -> Result<Self> {
        if digits.iter().any(|a| !a.is_positive()) {
            return Err(Error::pre("partial quotients after a0 must be positive"));
        }
        Ok(RealSpec::DigitStream { a0: a0.into(), digits })
    }

    /// `sqrt(n)`.
    pub fn sqrt(n: i64) -> Result<Self> {
        Self::surd(0, n, 1)
    }

    /// `(1 + sqrt 5) / 2`.
    pub fn golden() -> Self {
        RealSpec::QuadraticSurd {
            p: 1.into(),
            d: 5.into(),
            r: 2.into(),
        }
    }

    /// Parse `rat:p/q`, `surd:(P+sqrt(D))/R` or `digits:a0;a1,a2,...`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("rat:") {
            let (p, q) = match rest.split_once('/') {
                Some((p, q)) => (parse_int(p)?, parse_int(q)?),
                None => (parse_int(rest)?, BigInt::one()),
            };
            return Self::rational(p, q);
        }
        if let Some(rest) = s.strip_prefix("surd:") {
            return Self::parse_surd(rest);
        }
        if let Some(rest) = s.strip_prefix("digits:") {
            let (a0, tail) = rest.split_once(';').unwrap_or((rest, ""));
            let a0 = parse_int(a0)?;
            let digits = tail.split(',').filter(|t| !t.trim().is_empty()).map(parse_int).collect::<Result<Vec<_>>>()?;
            return Self::digits(a0, digits);
        }
        Err(Error::Parse(format!("unknown real format: {s:?}")))
    }

    fn parse_surd(body: &str) -> Result<Self> {
        let compact: String = body.chars().filter(|c| !c.is_whitespace()).collect();
        let (num, r) = match compact.rsplit_once(")/") {
            Some((n, r)) => (n.strip_prefix('(').unwrap_or(n).to_string(), parse_int(r)?),
            None => match compact.strip_prefix('(').and_then(|c| c.strip_suffix(')')) {
                Some(inner) if inner.contains("sqrt(") && inner.ends_with(')') => (inner.to_string(), BigInt::one()),
                _ => (compact.clone(), BigInt::one()),
            },
        };
        let idx = num.find("sqrt(").ok_or_else(|| Error::Parse(format!("missing sqrt in {body:?}")))?;
        let head = &num[..idx];
        let tail = &num[idx + 5..];
        let d = parse_int(tail.strip_suffix(')').ok_or_else(|| Error::Parse(format!("unbalanced sqrt in {body:?}")))?)?;
        let (p, neg) = match head {
            "" | "+" => (BigInt::zero(), false),
            "-" => (BigInt::zero(), true),
            h if h.ends_with('+') => (parse_int(&h[..h.len() - 1])?, false),
            h if h.ends_with('-') => (parse_int(&h[..h.len() - 1])?, true),
            h => return Err(Error::Parse(format!("cannot read surd head {h:?}"))),
        };
        if neg {
            Self::surd(-p, d, -r)
        } else {
            Self::surd(p, d, r)
        }
    }

    /// The real `x * num / den`, kept in the same family where possible.
    ///
    /// Digit streams become the certified expansion prefix of the scaled
    /// enclosure, which may be shorter than the original horizon.
    pub fn scaled(&self, num: &BigInt, den: &BigInt) -> Result<RealSpec> {
        if num.is_zero() || den.is_zero() {
            return Err(Error::pre("scale factors must be nonzero"));
        }
        let f = BigRational::new(num.clone(), den.clone());
        match self {
            RealSpec::Rational(x) => Ok(RealSpec::Rational(x * f)),
            RealSpec::QuadraticSurd { p, d, r } => {
                // (p + sqrt d) * n / (r * m) = (p n + sqrt(d n^2)) / (r m), sign kept in r.
                let n_abs = num.abs();
                let m = if num.is_negative() { -den } else { den.clone() };
                Self::surd(p * &n_abs, d * &n_abs * &n_abs, r * m)
            }
            RealSpec::DigitStream { .. } => {
                let cyl = self.cylinder_closure()?;
                let (lo, hi) = if f.is_negative() {
                    (cyl.1 * &f, cyl.0 * &f)
                } else {
                    (cyl.0 * &f, cyl.1 * &f)
                };
                let (a0, digits) = common_prefix(&lo, &hi);
                let a0 = a0.ok_or(Error::Horizon { requested: 0, available: 0 })?;
                Self::digits(a0, digits)
            }
        }
    }

    fn cylinder_closure(&self) -> Result<(BigRational, BigRational)> {
        match self {
            RealSpec::DigitStream { a0, digits } => {
                let c = cylinder(a0, digits);
                Ok((c.lo, c.hi))
            }
            _ => Err(Error::pre("not a digit stream")),
        }
    }

    /// Number of certified partial quotients after `a0` for digit streams.
    pub fn horizon(&self) -> Option<usize> {
        match self {
            RealSpec::DigitStream { digits, .. } => Some(digits.len()),
            _ => None,
        }
    }
}

impl fmt::Display for RealSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RealSpec::Rational(x) => write!(f, "rat:{}/{}", x.numer(), x.denom()),
            RealSpec::QuadraticSurd { p, d, r } => write!(f, "surd:({p}+sqrt({d}))/{r}"),
            RealSpec::DigitStream { a0, digits } => {
                let t: Vec<String> = digits.iter().map(|a| a.to_string()).collect();
                write!(f, "digits:{a0};{}", t.join(","))
            }
        }
    }
}

impl Real for RealSpec {
    fn enclose(&self, bits: u32) -> Result<Enclosure> {
        match self {
            RealSpec::Rational(x) => Ok(Enclosure::exact(x)),
            RealSpec::QuadraticSurd { p, d, r } => Ok(surd_enclosure(p, d, r, bits)),
            RealSpec::DigitStream { digits, .. } => {
                let (lo, hi) = self.cylinder_closure()?;
                let e = Enclosure::from_bounds(&lo, &hi);
                if e.width_within(bits) {
                    Ok(e)
                } else {
                    Err(Error::Horizon {
                        requested: digits.len() + 1,
                        available: digits.len(),
                    })
                }
            }
        }
    }

    fn exact_value(&self) -> Option<BigRational> {
        match self {
            RealSpec::Rational(x) => Some(x.clone()),
            _ => None,
        }
    }

    fn expansion(&self, _depth: usize) -> Result<CfExpansion> {
        match self {
            RealSpec::Rational(x) => Ok(expand_rational(x.numer(), x.denom())),
            RealSpec::QuadraticSurd { p, d, r } => expand_surd(p, d, r),
            RealSpec::DigitStream { a0, digits } => Ok(CfExpansion {
                a0: a0.clone(),
                body: CfBody::Prefix(digits.clone()),
            }),
        }
    }
}

fn surd_enclosure(p: &BigInt, d: &BigInt, r: &BigInt, bits: u32) -> Enclosure {
    let k = bits + r.bits() as u32 + 2;
    let s = (d << (2 * k as usize)).sqrt();
    let base = p << k as usize;
    let den = r.abs() << k as usize;
    let lo = &base + &s;
    let hi = &lo + BigInt::one();
    if r.is_negative() {
        Enclosure::from_scaled(-hi, -lo, den)
    } else {
        Enclosure::from_scaled(lo, hi, den)
    }
}

/// Euclidean expansion of `p/q` in canonical form.
pub fn expand_rational(p: &BigInt, q: &BigInt) -> CfExpansion {
    assert!(!q.is_zero(), "zero denominator");
    let (mut n, mut d) = if q.is_negative() { (-p, -q) } else { (p.clone(), q.clone()) };
    let a0 = floor_div(&n, &d);
    let mut digits = Vec::new();
    let mut rem = &n - &a0 * &d;
    n = d;
    d = rem.clone();
    while !d.is_zero() {
        let a = n.div_floor(&d);
        rem = &n - &a * &d;
        digits.push(a);
        n = d;
        d = rem;
    }
    CfExpansion {
        a0,
        body: CfBody::Finite(digits),
    }
}

fn floor_surd(p: &BigInt, q: &BigInt, s: &BigInt) -> BigInt {
    // floor((p + sqrt D) / q) with s = floor(sqrt D) and sqrt D irrational.
    if q.is_positive() {
        floor_div(&(p + s), q)
    } else {
        -(floor_div(&(p + s), &(-q)) + BigInt::one())
    }
}

/// Periodic expansion of `(p + sqrt d) / r`.
pub fn expand_surd(p: &BigInt, d: &BigInt, r: &BigInt) -> Result<CfExpansion> {
    if r.is_zero() {
        return Err(Error::pre("zero denominator"));
    }
    if !d.is_positive() {
        return Err(Error::pre("radicand must be positive"));
    }
    if is_square(d) {
        return Err(Error::pre("rational input"));
    }
    let (mut pp, dd, mut qq) = if (d - p * p).is_multiple_of(r) {
        (p.clone(), d.clone(), r.clone())
    } else {
        let ra = r.abs();
        (p * &ra, d * r * r, r * &ra)
    };
    let s = dd.sqrt();
    let a0 = floor_surd(&pp, &qq, &s);
    let mut digits = Vec::new();
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    let mut a = a0.clone();
    loop {
        let np = &a * &qq - &pp;
        let nq = (&dd - &np * &np) / &qq;
        pp = np;
        qq = nq;
        if let Some(&start) = seen.get(&(pp.clone(), qq.clone())) {
            let period = digits.split_off(start);
            return Ok(CfExpansion {
                a0,
                body: CfBody::Periodic { preperiod: digits, period },
            });
        }
        seen.insert((pp.clone(), qq.clone()), digits.len());
        a = floor_surd(&pp, &qq, &s);
        digits.push(a.clone());
    }
}

impl CfExpansion {
    /// Partial quotient `a_k` (`k = 0` is `a0`).
    pub fn digit(&self, k: usize) -> Result<BigInt> {
        if k == 0 {
            return Ok(self.a0.clone());
        }
        let i = k - 1;
        match &self.body {
            CfBody::Finite(v) | CfBody::Prefix(v) => v.get(i).cloned().ok_or(Error::Horizon {
                requested: k,
                available: v.len(),
            }),
            CfBody::Periodic { preperiod, period } => {
                if i < preperiod.len() {
                    Ok(preperiod[i].clone())
                } else {
                    Ok(period[(i - preperiod.len()) % period.len()].clone())
                }
            }
        }
    }

    /// Largest valid index, or `None` for periodic expansions.
    pub fn horizon(&self) -> Option<usize> {
        match &self.body {
            CfBody::Finite(v) | CfBody::Prefix(v) => Some(v.len()),
            CfBody::Periodic { .. } => None,
        }
    }

    /// Whether this expands a rational exactly.
    pub fn is_finite(&self) -> bool {
        matches!(self.body, CfBody::Finite(_))
    }

    /// Maximum of `a_k` over `1 <= k` within the periodic part or known prefix.
    pub fn max_partial_quotient(&self) -> Option<BigInt> {
        match &self.body {
            CfBody::Finite(v) | CfBody::Prefix(v) => v.iter().max().cloned(),
            CfBody::Periodic { preperiod, period } => preperiod.iter().chain(period.iter()).max().cloned(),
        }
    }
}

impl fmt::Display for CfExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[BigInt]| v.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",");
        match &self.body {
            CfBody::Finite(v) => write!(f, "[{};{}]", self.a0, join(v)),
            CfBody::Prefix(v) => write!(f, "[{};{},...]", self.a0, join(v)),
            CfBody::Periodic { preperiod, period } => {
                if preperiod.is_empty() {
                    write!(f, "[{};({})]", self.a0, join(period))
                } else {
                    write!(f, "[{};{},({})]", self.a0, join(preperiod), join(period))
                }
            }
        }
    }
}

/// Convergents `p_k / q_k` for `k = -1..=kmax`, with `p_{-1} = 1`, `q_{-1} = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvergentTable {
    a: Vec<BigInt>,
    p: Vec<BigInt>,
    q: Vec<BigInt>,
}

impl ConvergentTable {
    /// Table up to index `kmax`.
    pub fn upto(cf: &CfExpansion, kmax: usize) -> Result<Self> {
        let mut t = ConvergentTable {
            a: vec![],
            p: vec![BigInt::one()],
            q: vec![BigInt::zero()],
        };
        for k in 0..=kmax {
            t.push(cf.digit(k)?);
        }
        Ok(t)
    }

    /// Table extended until `q_k + q_{k-1} > bound` (or the expansion ends).
    pub fn covering(cf: &CfExpansion, bound: &BigInt) -> Result<Self> {
        let mut t = ConvergentTable {
            a: vec![],
            p: vec![BigInt::one()],
            q: vec![BigInt::zero()],
        };
        let mut k = 0;
        loop {
            match cf.digit(k) {
                Ok(a) => t.push(a),
                Err(e) => {
                    if cf.is_finite() && k > 0 {
                        return Ok(t);
                    }
                    return Err(e);
                }
            }
            let n = t.a.len();
            if k >= 1 && &t.q[n] + &t.q[n - 1] > *bound {
                return Ok(t);
            }
            k += 1;
        }
    }

    fn push(&mut self, a: BigInt) {
        let n = self.p.len();
        let (p1, q1) = (&self.p[n - 1], &self.q[n - 1]);
        let (p2, q2) = if n >= 2 {
            (self.p[n - 2].clone(), self.q[n - 2].clone())
        } else {
            (BigInt::zero(), BigInt::one())
        };
        let p = &a * p1 + p2;
        let q = &a * q1 + q2;
        self.a.push(a);
        self.p.push(p);
        self.q.push(q);
    }

    /// Largest index `k` with a convergent.
    pub fn kmax(&self) -> usize {
        self.a.len() - 1
    }

    /// `a_k` for `0 <= k <= kmax`.
    pub fn a(&self, k: usize) -> &BigInt {
        &self.a[k]
    }

    /// `p_k` for `-1 <= k <= kmax`.
    pub fn p(&self, k: i64) -> &BigInt {
        &self.p[(k + 1) as usize]
    }

    /// `q_k` for `-1 <= k <= kmax`.
    pub fn q(&self, k: i64) -> &BigInt {
        &self.q[(k + 1) as usize]
    }

    /// `p_k / q_k`.
    pub fn convergent(&self, k: usize) -> BigRational {
        BigRational::new(self.p(k as i64).clone(), self.q(k as i64).clone())
    }
}

/// First `n` convergents `p_0/q_0, ..., p_{n-1}/q_{n-1}`.
pub fn convergents(cf: &CfExpansion, n: usize) -> Result<ConvergentTable> {
    if n == 0 {
        return Err(Error::pre("at least one convergent is required"));
    }
    ConvergentTable::upto(cf, n - 1)
}

/// `eta_k = (-1)^k (q_k xi - p_k)`, with width at most `2^-bits`.
pub fn eta<R: Real + ?Sized>(xi: &R, table: &ConvergentTable, k: i64, bits: u32) -> Result<Enclosure> {
    if k < -1 || k > table.kmax() as i64 {
        return Err(Error::Horizon {
            requested: k.max(0) as usize,
            available: table.kmax(),
        });
    }
    let q = table.q(k);
    let x = xi.enclose(bits + q.bits() as u32 + 1)?;
    let v = x.mul_int(q).add_int(&(-table.p(k)));
    Ok(if k.rem_euclid(2) == 1 { v.neg() } else { v })
}

/// `phi_k = (q_k xi - p_k) / (q_{k-1} xi - p_{k-1}) = -eta_k / eta_{k-1}` for `k >= 0`.
pub fn phi_ratio<R: Real + ?Sized>(xi: &R, table: &ConvergentTable, k: i64, bits: u32) -> Result<Enclosure> {
    if k < 0 {
        return Err(Error::pre("phi ratio needs k >= 0"));
    }
    crate::enclosure::refine(bits + 8, bits.saturating_mul(8).max(4096), |b| {
        let num = eta(xi, table, k, b)?;
        let den = eta(xi, table, k - 1, b)?;
        if den.sign() != Some(std::cmp::Ordering::Greater) {
            return Ok(None);
        }
        let r = num.div(&den, b).neg();
        Ok(if r.width_within(bits) { Some(r) } else { None })
    })
}

/// Greedy decomposition `Q = p q_{k-1} + q_{k-2} + w`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyDecomp {
    /// Index with `q_{k-1} + q_{k-2} <= Q < q_k + q_{k-1}`.
    pub k: usize,
    /// Multiplier with `1 <= p <= a_k`.
    pub p: BigInt,
    /// Remainder with `0 <= w < q_{k-1}`.
    pub w: BigInt,
}

/// Decompose `Q >= 1` against the table.
pub fn greedy_decompose(table: &ConvergentTable, q_bound: &BigInt) -> Result<GreedyDecomp> {
    if !q_bound.is_positive() {
        return Err(Error::pre("greedy decomposition needs Q >= 1"));
    }
    for k in 1..=table.kmax() {
        let ki = k as i64;
        let lower = table.q(ki - 1) + table.q(ki - 2);
        let upper = table.q(ki) + table.q(ki - 1);
        if lower <= *q_bound && *q_bound < upper {
            let (p, w) = (q_bound - table.q(ki - 2)).div_rem(table.q(ki - 1));
            return Ok(GreedyDecomp { k, p, w });
        }
    }
    Err(Error::Horizon {
        requested: table.kmax() + 1,
        available: table.kmax(),
    })
}

/// Set of reals whose expansion begins with given digits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cylinder {
    pub lo: BigRational,
    pub hi: BigRational,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Cylinder {
    pub fn length(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        let above = if self.lo_closed { *x >= self.lo } else { *x > self.lo };
        let below = if self.hi_closed { *x <= self.hi } else { *x < self.hi };
        above && below
    }
}

/// Cylinder of `[a0; digits]`: between `p_k/q_k` and `(p_k + p_{k-1})/(q_k + q_{k-1})`.
pub fn cylinder(a0: &BigInt, digits: &[BigInt]) -> Cylinder {
    let cf = CfExpansion {
        a0: a0.clone(),
        body: CfBody::Prefix(digits.to_vec()),
    };
    let k = digits.len();
    let t = ConvergentTable::upto(&cf, k).expect("prefix covers its own length");
    let ki = k as i64;
    let a = BigRational::new(t.p(ki).clone(), t.q(ki).clone());
    let b = BigRational::new(t.p(ki) + t.p(ki - 1), t.q(ki) + t.q(ki - 1));
    if k.is_multiple_of(2) {
        Cylinder {
            lo: a,
            hi: b,
            lo_closed: true,
            hi_closed: false,
        }
    } else {
        Cylinder {
            lo: b,
            hi: a,
            lo_closed: false,
            hi_closed: true,
        }
    }
}

/// Enclosure of width at most `width`.
pub fn refine_to<R: Real + ?Sized>(xi: &R, width: &BigRational) -> Result<Enclosure> {
    if !width.is_positive() {
        return Err(Error::pre("width must be positive"));
    }
    let mut bits = 0u32;
    while BigRational::new(BigInt::one(), pow2(bits)) > *width {
        bits += 1;
    }
    xi.enclose(bits)
}

/// Partial quotients shared by every real in `[lo, hi]`.
///
/// Returns `None` for `a0` when the integer parts already differ.
pub fn common_prefix(lo: &BigRational, hi: &BigRational) -> (Option<BigInt>, Vec<BigInt>) {
    let (mut l, mut h) = (lo.clone(), hi.clone());
    let mut a0 = None;
    let mut digits = Vec::new();
    loop {
        let fl = rat_floor(&l);
        if fl != rat_floor(&h) {
            break;
        }
        let fr = BigRational::from_integer(fl.clone());
        if a0.is_none() {
            a0 = Some(fl);
        } else {
            digits.push(fl);
        }
        let dl = &l - &fr;
        let dh = &h - &fr;
        if dl.is_zero() {
            break;
        }
        l = dh.recip();
        h = dl.recip();
    }
    (a0, digits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn rational_expansions() {
        assert_eq!(expand_rational(&7.into(), &5.into()).to_string(), "[1;2,2]");
        assert_eq!(expand_rational(&355.into(), &113.into()).to_string(), "[3;7,16]");
        assert_eq!(expand_rational(&(-7).into(), &5.into()).to_string(), "[-2;1,1,2]");
        assert_eq!(expand_rational(&4.into(), &2.into()).to_string(), "[2;]");
    }

    #[test]
    fn surd_expansions() {
        assert_eq!(expand_surd(&0.into(), &2.into(), &1.into()).unwrap().to_string(), "[1;(2)]");
        assert_eq!(expand_surd(&1.into(), &5.into(), &2.into()).unwrap().to_string(), "[1;(1)]");
        assert_eq!(expand_surd(&0.into(), &3.into(), &1.into()).unwrap().to_string(), "[1;(1,2)]");
        assert_eq!(expand_surd(&0.into(), &4.into(), &1.into()), Err(Error::pre("rational input")));
        // (1 + sqrt 7) / 3 = 1.2152..., which needs normalisation first.
        let e = expand_surd(&1.into(), &7.into(), &3.into()).unwrap();
        assert_eq!(e.to_string(), "[1;(4,1,1,1)]");
        let t = ConvergentTable::upto(&e, 30).unwrap();
        let x = 1.2152504370215302;
        let c = t.convergent(30);
        assert!((crate::enclosure::rat_to_f64(&c) - x).abs() < 1e-12);
        // Negative denominators.
        let n = expand_surd(&1.into(), &5.into(), &(-2).into()).unwrap();
        assert_eq!(n.a0, BigInt::from(-2));
        assert_eq!(n.to_string(), "[-2;2,(1)]");
    }

    #[test]
    fn parse_round_trip() {
        for s in ["rat:7/5", "surd:(1+sqrt(5))/2", "digits:0;1,2,3"] {
            let r = RealSpec::parse(s).unwrap();
            assert_eq!(r.to_string(), s);
        }
        assert_eq!(RealSpec::parse("surd:sqrt(2)").unwrap(), RealSpec::sqrt(2).unwrap());
        assert_eq!(RealSpec::parse("surd:(3-sqrt(2))/5").unwrap(), RealSpec::surd(-3, 2, -5).unwrap());
        assert_eq!(RealSpec::parse("rat:6/4").unwrap(), RealSpec::rational(3, 2).unwrap());
        assert!(RealSpec::parse("surd:sqrt(9)").is_err());
        assert!(RealSpec::parse("pi").is_err());
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-0.25").unwrap(), rat(-1, 4));
        assert_eq!(parse_rational("1.5").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("7").unwrap(), rat(7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn convergent_examples() {
        let e = RealSpec::sqrt(2).unwrap().expansion(0).unwrap();
        let t = convergents(&e, 4).unwrap();
        let got: Vec<_> = (0..4).map(|k| t.convergent(k).to_string()).collect();
        assert_eq!(got, ["1", "3/2", "7/5", "17/12"]);
    }

    #[test]
    fn eta_examples() {
        let x = RealSpec::sqrt(2).unwrap();
        let t = ConvergentTable::upto(&x.expansion(0).unwrap(), 6).unwrap();
        assert_eq!(eta(&x, &t, -1, 30).unwrap(), Enclosure::from_int(1));
        let e0 = eta(&x, &t, 0, 40).unwrap();
        assert!((e0.mid_f64() - 0.41421356).abs() < 1e-8);
        let r = RealSpec::rational(7, 5).unwrap();
        let tr = ConvergentTable::upto(&r.expansion(0).unwrap(), 2).unwrap();
        assert_eq!(eta(&r, &tr, 2, 10).unwrap(), Enclosure::from_int(0));
    }

    #[test]
    fn greedy_examples() {
        let g = RealSpec::golden();
        let tg = ConvergentTable::upto(&g.expansion(0).unwrap(), 10).unwrap();
        assert_eq!(
            greedy_decompose(&tg, &10.into()).unwrap(),
            GreedyDecomp {
                k: 5,
                p: 1.into(),
                w: 2.into()
            }
        );
        let s = RealSpec::sqrt(2).unwrap();
        let ts = ConvergentTable::upto(&s.expansion(0).unwrap(), 10).unwrap();
        assert_eq!(
            greedy_decompose(&ts, &20.into()).unwrap(),
            GreedyDecomp {
                k: 4,
                p: 1.into(),
                w: 3.into()
            }
        );
        for k in 1..=9 {
            let q = ts.q(k as i64).clone();
            let d = greedy_decompose(&ts, &q).unwrap();
            assert_eq!((d.k, d.p, d.w), (k, ts.a(k).clone(), BigInt::zero()));
        }
    }

    #[test]
    fn cylinder_examples() {
        let c = cylinder(&0.into(), &b(&[1]));
        assert_eq!((c.lo.clone(), c.hi.clone(), c.lo_closed, c.hi_closed), (rat(1, 2), rat(1, 1), false, true));
        let c0 = cylinder(&3.into(), &[]);
        assert_eq!((c0.lo, c0.hi, c0.lo_closed, c0.hi_closed), (rat(3, 1), rat(4, 1), true, false));
    }

    #[test]
    fn scaled_surd() {
        let s = RealSpec::sqrt(2).unwrap().scaled(&3.into(), &2.into()).unwrap();
        let e = s.enclose(50).unwrap();
        assert!((e.mid_f64() - 1.5 * 2f64.sqrt()).abs() < 1e-12);
        let m = RealSpec::sqrt(2).unwrap().scaled(&(-1).into(), &1.into()).unwrap();
        assert!((m.enclose(40).unwrap().mid_f64() + 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn digit_stream_horizon() {
        let x = RealSpec::parse("digits:0;1,1,1").unwrap();
        assert!(matches!(x.enclose(60), Err(Error::Horizon { .. })));
        assert!(x.enclose(2).is_ok());
        let e = x.expansion(0).unwrap();
        assert!(matches!(e.digit(4), Err(Error::Horizon { requested: 4, available: 3 })));
    }

    #[test]
    fn prefix_of_interval() {
        let (a0, d) = common_prefix(&rat(1393, 985), &rat(3363, 2378));
        assert_eq!(a0, Some(BigInt::one()));
        assert!(d.len() >= 6 && d.iter().all(|x| *x == BigInt::from(2)));
    }
}
