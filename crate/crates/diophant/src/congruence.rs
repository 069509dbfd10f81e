//! Linear congruences, congruence constraints and their solvability criteria.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::cf::ConvergentTable;
use crate::error::{Error, Result};

/// Numerators restricted to `a Z + r`, denominators to `b N + s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub a: u64,
    pub b: u64,
    pub r: u64,
    pub s: u64,
}

impl Constraint {
    /// Validates `a, b >= 1`, `0 <= r < a`, `0 <= s < b`.
    pub fn new(a: u64, b: u64, r: u64, s: u64) -> Result<Self> {
        if a == 0 || b == 0 {
            return Err(Error::pre("moduli a and b must be positive"));
        }
        if r >= a || s >= b {
            return Err(Error::pre(format!("residues must satisfy 0 <= r < a and 0 <= s < b, got {a},{b},{r},{s}")));
        }
        Ok(Constraint { a, b, r, s })
    }

    /// Whether `r = s = 0`.
    pub fn is_homogeneous(&self) -> bool {
        self.r == 0 && self.s == 0
    }

    /// `ab`.
    pub fn ab(&self) -> u64 {
        self.a * self.b
    }

    /// `gcd(a, b, r, s)`.
    pub fn content(&self) -> u64 {
        self.a.gcd(&self.b).gcd(&self.r).gcd(&self.s)
    }

    pub fn a_big(&self) -> BigInt {
        BigInt::from(self.a)
    }

    pub fn b_big(&self) -> BigInt {
        BigInt::from(self.b)
    }

    pub fn r_big(&self) -> BigInt {
        BigInt::from(self.r)
    }

    pub fn s_big(&self) -> BigInt {
        BigInt::from(self.s)
    }
}

impl FromStr for Constraint {
    type Err = Error;

    /// Parses `a,b,r,s`.
    fn from_str(t: &str) -> Result<Self> {
        let parts: Vec<&str> = t.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!("expected a,b,r,s but got {t:?}")));
        }
        let mut v = [0u64; 4];
        for (slot, p) in v.iter_mut().zip(&parts) {
            *slot = p.parse().map_err(|_| Error::Parse(format!("not a nonnegative integer: {p:?}")))?;
        }
        Constraint::new(v[0], v[1], v[2], v[3])
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.a, self.b, self.r, self.s)
    }
}

impl Serialize for Constraint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Extended gcd: `(g, x, y)` with `a x + b y = g >= 0`.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Inverse of `a` modulo `m > 1`, if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let (g, x, _) = ext_gcd(&a.mod_floor(m), m);
    if g.is_one() {
        Some(x.mod_floor(m))
    } else if m.is_one() {
        Some(BigInt::zero())
    } else {
        None
    }
}

/// Solutions of `a x = b (mod m)` as `x = x0 (mod n)`.
fn solve_one(a: &BigInt, b: &BigInt, m: &BigInt) -> Option<(BigInt, BigInt)> {
    let g = a.mod_floor(m).gcd(m);
    if !b.is_multiple_of(&g) {
        return None;
    }
    let n = m / &g;
    let inv = mod_inverse(&(a / &g), &n)?;
    Some(((b / &g * inv).mod_floor(&n), n))
}

/// Combine `x = c1 (mod n1)` and `x = c2 (mod n2)`.
pub fn crt(c1: &BigInt, n1: &BigInt, c2: &BigInt, n2: &BigInt) -> Option<(BigInt, BigInt)> {
    let (g, p, _) = ext_gcd(n1, n2);
    let diff = c2 - c1;
    if !diff.is_multiple_of(&g) {
        return None;
    }
    let l = n1 / &g * n2;
    let t = (&diff / &g * p).mod_floor(&(n2 / &g));
    Some(((c1 + n1 * t).mod_floor(&l), l))
}

/// Simultaneous solution of `a1 x = b1 (mod m1)`, `a2 x = b2 (mod m2)`.
///
/// Returns the least nonnegative solution and the modulus of the solution set.
pub fn pair_solve(a1: &BigInt, b1: &BigInt, m1: &BigInt, a2: &BigInt, b2: &BigInt, m2: &BigInt) -> Result<Option<(BigInt, BigInt)>> {
    if !m1.is_positive() || !m2.is_positive() {
        return Err(Error::pre("moduli must be positive"));
    }
    let Some((c1, n1)) = solve_one(a1, b1, m1) else { return Ok(None) };
    let Some((c2, n2)) = solve_one(a2, b2, m2) else { return Ok(None) };
    Ok(crt(&c1, &n1, &c2, &n2))
}

/// Closed-form solvability of the pair: `gcd(m1,a1) | b1`, `gcd(m2,a2) | b2`
/// and `gcd(a1 m2, a2 m1) | (a1 b2 - a2 b1)`.
pub fn pair_solvable(a1: &BigInt, b1: &BigInt, m1: &BigInt, a2: &BigInt, b2: &BigInt, m2: &BigInt) -> bool {
    b1.is_multiple_of(&m1.gcd(a1)) && b2.is_multiple_of(&m2.gcd(a2)) && (a1 * b2 - a2 * b1).is_multiple_of(&(a1 * m2).gcd(&(a2 * m1)))
}

/// Whether some integer `x` has `u x = r (mod a)` and `v x = s (mod b)`.
pub fn target_reachable(u: &BigInt, v: &BigInt, c: &Constraint) -> bool {
    let (a, b, r, s) = (c.a_big(), c.b_big(), c.r_big(), c.s_big());
    r.is_multiple_of(&u.gcd(&a)) && s.is_multiple_of(&v.gcd(&b)) && (u * &s - v * &r).is_multiple_of(&(&b * u).gcd(&(&a * v)))
}

/// Solvability at index `k >= 1`, read from `p_{k-1}` and `q_{k-1}`.
pub fn uniform_conditions_met(k: usize, table: &ConvergentTable, c: &Constraint) -> Result<bool> {
    if k == 0 || k > table.kmax() + 1 {
        return Err(Error::pre("index must satisfy 1 <= k <= kmax + 1"));
    }
    let j = k as i64 - 1;
    Ok(target_reachable(table.p(j), table.q(j), c))
}

/// Digits `(i1, i2)` in `[1, b]` such that `u1 = i1 beta + alpha` and
/// `u2 = i2 u1 + beta` satisfy `u2 = 0 (mod b)`.
pub fn annihilating_pair(alpha: u64, beta: u64, b: u64) -> Result<(u64, u64)> {
    if b == 0 {
        return Err(Error::pre("modulus must be positive"));
    }
    let (alpha, beta) = (alpha % b, beta % b);
    if b == 1 {
        return Ok((1, 1));
    }
    if alpha == 0 && beta == 0 {
        return Ok((b, b));
    }
    let g = alpha.gcd(&beta);
    let (a1, b1) = (alpha / g, beta / g);
    let bb = BigInt::from(b);
    let lift = |x: u64| if x == 0 { b } else { x };
    for i in 0..b {
        let u1 = BigInt::from(a1 + i * b1);
        if let Some(inv) = mod_inverse(&u1, &bb) {
            let i2 = (-(BigInt::from(b1) * inv)).mod_floor(&bb);
            let i2: u64 = i2.try_into().expect("residue fits in u64");
            return Ok((lift(i), lift(i2)));
        }
    }
    unreachable!("coprime alpha', beta' always admit an invertible alpha' + i beta' mod b")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::{ConvergentTable, Real, RealSpec};

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn pair_example() {
        let s = pair_solve(&bi(2), &bi(2), &bi(4), &bi(3), &bi(1), &bi(5)).unwrap();
        assert_eq!(s, Some((bi(7), bi(10))));
        assert!(pair_solve(&bi(2), &bi(1), &bi(4), &bi(1), &bi(0), &bi(3)).unwrap().is_none());
        assert!(pair_solve(&bi(1), &bi(1), &bi(0), &bi(1), &bi(0), &bi(3)).is_err());
    }

    #[test]
    fn pair_matches_closed_form_and_brute_force() {
        for m1 in 1..=6i64 {
            for m2 in 1..=6i64 {
                for a1 in 0..m1 {
                    for b1 in 0..m1 {
                        for a2 in 0..m2 {
                            for b2 in 0..m2 {
                                let brute = (0..m1 * m2).find(|x| (a1 * x - b1) % m1 == 0 && (a2 * x - b2) % m2 == 0);
                                let got = pair_solve(&bi(a1), &bi(b1), &bi(m1), &bi(a2), &bi(b2), &bi(m2)).unwrap();
                                assert_eq!(got.as_ref().map(|(x, _)| x.clone()), brute.map(bi));
                                assert_eq!(pair_solvable(&bi(a1), &bi(b1), &bi(m1), &bi(a2), &bi(b2), &bi(m2)), brute.is_some());
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn reachability_examples() {
        let c = Constraint::new(2, 2, 1, 1).unwrap();
        assert!(target_reachable(&bi(1), &bi(1), &c));
        assert!(!target_reachable(&bi(2), &bi(3), &c));
    }

    #[test]
    fn conditions_for_sqrt2() {
        let c = Constraint::new(2, 2, 1, 1).unwrap();
        let x = RealSpec::sqrt(2).unwrap();
        let t = ConvergentTable::upto(&x.expansion(0).unwrap(), 8).unwrap();
        assert!(uniform_conditions_met(1, &t, &c).unwrap());
        assert!(!uniform_conditions_met(2, &t, &c).unwrap());
        for k in 1..=8 {
            let j = k as i64 - 1;
            let both_odd = t.p(j).is_odd() && t.q(j).is_odd();
            assert_eq!(uniform_conditions_met(k, &t, &c).unwrap(), both_odd);
        }
    }

    #[test]
    fn annihilating_pairs_brute_force() {
        assert_eq!(annihilating_pair(0, 3, 7).unwrap(), (1, 6));
        assert_eq!(annihilating_pair(3, 0, 7).unwrap(), (7, 7));
        for b in 1..=30u64 {
            for alpha in 0..b {
                for beta in 0..b {
                    let (i1, i2) = annihilating_pair(alpha, beta, b).unwrap();
                    assert!((1..=b).contains(&i1) && (1..=b).contains(&i2));
                    let u1 = i1 * beta + alpha;
                    let u2 = i2 * u1 + beta;
                    assert_eq!(u2 % b, 0, "alpha {alpha} beta {beta} b {b}");
                }
            }
        }
    }

    #[test]
    fn constraint_parsing() {
        assert_eq!("2,2,1,1".parse::<Constraint>().unwrap(), Constraint::new(2, 2, 1, 1).unwrap());
        assert!(matches!("2,2,5,1".parse::<Constraint>(), Err(Error::Precondition(_))));
        assert!(matches!("2,2,1".parse::<Constraint>(), Err(Error::Parse(_))));
    }
}
