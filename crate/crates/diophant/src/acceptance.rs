//! Fixed acceptance fixtures with one pass/fail report per criterion.
//!
//! Every tolerance, seed and pilot-fixed threshold is a constant of this module.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::arith_sums::{
    c_constant, coprime_closed_form, coprime_main_term, coprime_progression_count, phi_progression_sum, prime_factors, regular_system_count,
};
use crate::asymptotic::{approximation_constant, brute_hits, tail_constant, trig_probe};
use crate::cf::{cylinder, expand_rational, ConvergentTable, Real, RealSpec};
use crate::congruence::Constraint;
use crate::enclosure::{refine_capped, Enclosure};
use crate::error::{Error, Result};
use crate::metric_lab::{khintchine_trial, uniform_survival, SampledReal};
use crate::orchard::{polya_baseline, visibility, DistanceMode, OrchardScene, RadiusModel, Verdict};
use crate::three_distance::{gaps_direct, verify};
use crate::transcendental::pi;
use crate::uniform::{badly_witness, witness, PsiSpec};

/// Seed shared by every randomized fixture.
pub const SEED: u64 = 2024;

/// Survival threshold below which the `1/Q` fixture passes.
pub const SURVIVAL_T1: f64 = 0.05;
/// Survival threshold above which the `ln(Q + e)^2 / Q` fixture passes.
pub const SURVIVAL_T2: f64 = 0.80;
/// Floor for the divergent block fractions without and with the gcd condition.
pub const DIVERGENT_FLOOR: f64 = 0.12;
pub const DIVERGENT_FLOOR_GCD: f64 = 0.10;

/// One checked statement inside a criterion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Clause {
    pub name: String,
    pub pass: bool,
    /// A known conflict recorded with its analysis; it still counts as failing.
    pub documented_deviation: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: String,
    pub pass: bool,
    pub clauses: Vec<Clause>,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionReport {
    /// Whether every clause outside the documented deviations passes.
    pub fn pass_except_deviations(&self) -> bool {
        self.clauses.iter().all(|c| c.pass || c.documented_deviation)
    }

    /// Single summary line.
    pub fn line(&self) -> String {
        let failed: Vec<&str> = self.clauses.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        let tag = if self.pass { "PASS" } else { "FAIL" };
        let mut s = format!("[{tag}] criterion {:>2} {}: {} ({:.1} s)", self.id, self.title, self.detail, self.seconds);
        if !failed.is_empty() {
            s.push_str(&format!(" failing: {}", failed.join("; ")));
        }
        s
    }
}

struct Builder {
    id: u8,
    title: &'static str,
    clauses: Vec<Clause>,
    detail: Vec<String>,
    start: Instant,
}

impl Builder {
    fn new(id: u8, title: &'static str) -> Self {
        Builder {
            id,
            title,
            clauses: Vec::new(),
            detail: Vec::new(),
            start: Instant::now(),
        }
    }

    fn check(&mut self, name: impl Into<String>, pass: bool) {
        self.clauses.push(Clause {
            name: name.into(),
            pass,
            documented_deviation: false,
        });
    }

    fn deviation(&mut self, name: impl Into<String>, pass: bool) {
        self.clauses.push(Clause {
            name: name.into(),
            pass,
            documented_deviation: true,
        });
    }

    fn note(&mut self, s: impl Into<String>) {
        self.detail.push(s.into());
    }

    fn runtime(&mut self, limit: f64) {
        let t = self.start.elapsed().as_secs_f64();
        self.check(format!("runtime {t:.1} s < {limit} s"), t < limit);
    }

    fn finish(self) -> CriterionReport {
        CriterionReport {
            id: self.id,
            title: self.title.into(),
            pass: self.clauses.iter().all(|c| c.pass),
            clauses: self.clauses,
            detail: self.detail.join(", "),
            seconds: self.start.elapsed().as_secs_f64(),
        }
    }
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn ri(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn uniform_below(rng: &mut ChaCha20Rng, n: u64) -> u64 {
    rng.next_u64() % n
}

fn surd_fixtures() -> Vec<(&'static str, RealSpec)> {
    vec![
        ("sqrt2", RealSpec::sqrt(2).expect("valid")),
        ("sqrt3", RealSpec::sqrt(3).expect("valid")),
        ("golden", RealSpec::golden()),
        ("(1+sqrt7)/3", RealSpec::surd(1, 7, 3).expect("valid")),
    ]
}

/// Random digit streams of length 40 with digits in `[1, 10]`.
fn random_streams(count: usize) -> Vec<RealSpec> {
    let mut rng = ChaCha20Rng::seed_from_u64(SEED);
    (0..count)
        .map(|_| {
            let a0 = BigInt::from(uniform_below(&mut rng, 4));
            let digits = (0..40).map(|_| BigInt::from(1 + uniform_below(&mut rng, 10))).collect();
            RealSpec::digits(a0, digits).expect("positive digits")
        })
        .collect()
}

/// Identity failures for one expansion up to `kmax`, given an enclosure source for `xi`.
fn cf_identities(t: &ConvergentTable, enclose: &dyn Fn(u32) -> Result<Enclosure>, eta_kmax: i64) -> Result<Vec<String>> {
    let mut bad = Vec::new();
    let kmax = t.kmax() as i64;
    let a0 = t.a(0).clone();
    let one = BigInt::one();
    // Determinant identity.
    for k in 0..=kmax {
        let sign = if k % 2 == 0 { one.clone() } else { -one.clone() };
        if t.q(k) * t.p(k - 1) - t.p(k) * t.q(k - 1) != sign {
            bad.push(format!("determinant at k = {k}"));
        }
    }
    // Ratio bracket, with the reversed expansion as exact value.
    for k in 0..kmax {
        let a = t.a(k as usize + 1);
        let (qk, qk1, qkm) = (t.q(k), t.q(k + 1), t.q(k - 1));
        let rev: Vec<BigInt> = (1..=k as usize + 1).rev().map(|j| t.a(j).clone()).collect();
        let val = {
            let mut x = ri(0);
            for d in rev.iter().rev() {
                x = (ri(d.clone()) + x).recip();
            }
            x
        };
        if val != BigRational::new(qk.clone(), qk1.clone()) {
            bad.push(format!("reversed expansion at k = {k}"));
        }
        let upper_ok = if qkm.is_positive() { qk1 > &(a * qk) } else { qk1 == &(a * qk) };
        let lower_ok = if qkm < qk { qk1 < &((a + 1u32) * qk) } else { qk1 == &((a + 1u32) * qk) };
        if !upper_ok || !lower_ok {
            bad.push(format!("ratio bracket at k = {k}"));
        }
    }
    // Eta bracket and monotonicity, non-strict where xi is only known on a closed cylinder.
    let qbits = t.q(kmax).bits() as u32;
    let checks = refine_capped(2 * qbits + 96, |bits| {
        let x = enclose(bits)?;
        let mut failures = Vec::new();
        for k in -1..=eta_kmax {
            let s = if k.rem_euclid(2) == 0 { one.clone() } else { -one.clone() };
            let eta = x.mul_int(&(t.q(k) * &s)).add_int(&-(t.p(k) * &s));
            let prod = eta.mul_int(t.q(k + 1));
            let lower = BigRational::new(t.q(k + 1).clone(), t.q(k) + t.q(k + 1));
            if !(prod.lo_ge(&lower) && prod.hi_le(&ri(1))) {
                if prod.lo() < lower && prod.hi() >= lower || prod.hi() > ri(1) && prod.lo() <= ri(1) {
                    return Ok(None);
                }
                failures.push(format!("eta bracket at k = {k}"));
            }
            if k < eta_kmax {
                let diff = x.mul_int(&((t.q(k) + t.q(k + 1)) * &s)).add_int(&-((t.p(k) + t.p(k + 1)) * &s));
                if !diff.lo_gt(&ri(0)) {
                    if diff.hi() > ri(0) {
                        return Ok(None);
                    }
                    failures.push(format!("eta decrease at k = {k}"));
                }
            }
        }
        Ok(Some(failures))
    })?;
    bad.extend(checks);
    // Cylinder lengths and product bounds.
    let mut digits = Vec::new();
    let (mut prod_a, mut prod_a1, mut prod_a2, mut prod_a21) = (one.clone(), one.clone(), one.clone(), one.clone());
    for k in 1..=kmax {
        let ak = t.a(k as usize).clone();
        digits.push(ak.clone());
        let cy = cylinder(&a0, &digits);
        let (qk, qkm) = (t.q(k), t.q(k - 1));
        let len = cy.length();
        if len != BigRational::new(one.clone(), qk * (qk + qkm))
            || len < BigRational::new(one.clone(), qk * qk * 2u32)
            || len > BigRational::new(one.clone(), qk * qk)
        {
            bad.push(format!("cylinder length at k = {k}"));
        }
        prod_a *= &ak;
        prod_a1 *= &ak + 1u32;
        if k >= 2 {
            prod_a2 *= &ak;
            prod_a21 *= &ak + 1u32;
        }
        let two_k = BigInt::one() << k as usize;
        if !(&prod_a <= qk && qk <= &prod_a1 && prod_a1 <= &two_k * &prod_a) {
            bad.push(format!("denominator product bound at k = {k}"));
        }
        if !a0.is_negative() {
            let head = &a0 * t.a(1) + 1u32;
            let pk = t.p(k);
            let two_k1 = BigInt::one() << (k as usize - 1);
            if !(&head * &prod_a2 <= *pk && *pk <= &head * &prod_a21 && &head * &prod_a21 <= &two_k1 * &head * &prod_a2) {
                bad.push(format!("numerator product bound at k = {k}"));
            }
        }
    }
    Ok(bad)
}

/// Continued-fraction identities on quadratic surds and random digit streams.
pub fn criterion_1() -> Result<CriterionReport> {
    let mut b = Builder::new(1, "continued-fraction identities");
    let mut checked = 0;
    for (name, x) in surd_fixtures() {
        let t = ConvergentTable::upto(&x.expansion(0)?, 60)?;
        let bad = cf_identities(&t, &|bits| x.enclose(bits), 59)?;
        b.check(
            format!("{name}: {}", bad.first().cloned().unwrap_or_else(|| "all identities".into())),
            bad.is_empty(),
        );
        checked += 1;
    }
    let streams = random_streams(200);
    let mut failing = 0;
    for x in &streams {
        let RealSpec::DigitStream { a0, digits } = x else { unreachable!() };
        let t = ConvergentTable::upto(&x.expansion(0)?, digits.len())?;
        let cy = cylinder(a0, digits);
        let e = Enclosure::from_bounds(&cy.lo, &cy.hi);
        let bad = cf_identities(&t, &|_| Ok(e.clone()), digits.len() as i64 - 2)?;
        if !bad.is_empty() {
            failing += 1;
        }
        checked += 1;
    }
    b.check(format!("{failing} of 200 random streams fail"), failing == 0);
    // Rational round trip.
    let rt = [(7, 5), (355, 113), (-17, 12), (1, 1)].iter().all(|&(p, q)| {
        let cf = expand_rational(&BigInt::from(p), &BigInt::from(q));
        let n = cf.horizon().expect("finite");
        ConvergentTable::upto(&cf, n).map(|t| t.convergent(n) == rat(p, q)).unwrap_or(false)
    });
    b.check("rational expansion round trip", rt);
    b.note(format!("{checked} expansions"));
    b.runtime(30.0);
    Ok(b.finish())
}

/// Random surd `(P + sqrt D)/R` with `D` not a square.
fn random_surd(rng: &mut ChaCha20Rng) -> RealSpec {
    loop {
        let d = 2 + uniform_below(rng, 999) as i64;
        let s = (d as f64).sqrt() as i64;
        if (s - 1..=s + 1).any(|t| t * t == d) {
            continue;
        }
        let p = uniform_below(rng, 41) as i64 - 20;
        let mut r = uniform_below(rng, 21) as i64 - 10;
        if r == 0 {
            r = 1;
        }
        if let Ok(x) = RealSpec::surd(p, d, r) {
            return x;
        }
    }
}

/// Three-distance spectra against the greedy prediction.
pub fn criterion_2() -> Result<CriterionReport> {
    let mut b = Builder::new(2, "three-distance spectra");
    let conj = RealSpec::surd(-1, 5, 2)?;
    let s = gaps_direct(&conj, 4)?;
    let lengths: Vec<(f64, u64)> = s.present().map(|e| (e.length.mid_f64(), e.count)).collect();
    let worked = lengths.len() == 2
        && (lengths[0].0 - 0.145_898_033_75).abs() < 1e-9
        && lengths[0].1 == 2
        && (lengths[1].0 - 0.236_067_977_5).abs() < 1e-9
        && lengths[1].1 == 3
        && verify(&conj, 4)?.matches;
    b.check("golden conjugate at Q = 4 is {0.236 x 3, 0.146 x 2}", worked);
    let mut rng = ChaCha20Rng::seed_from_u64(SEED);
    let mut ok = 0;
    for _ in 0..300 {
        let x = random_surd(&mut rng);
        let q = 1 + uniform_below(&mut rng, 5000);
        if verify(&x, q)?.matches {
            ok += 1;
        }
    }
    b.check(format!("{ok}/300 verified"), ok == 300);
    b.note(format!("{ok}/300 random instances match"));
    b.runtime(120.0);
    Ok(b.finish())
}

fn inv_sqrt5(bits: u32) -> Enclosure {
    Enclosure::from_int(5).sqrt(bits).recip(bits)
}

/// Hit counts at factor 1/4 and the homogeneous constant for the golden ratio.
pub fn criterion_3() -> Result<CriterionReport> {
    let mut b = Builder::new(3, "asymptotic hit counts");
    let quarter = rat(1, 4);
    let xs = [("sqrt2", RealSpec::sqrt(2)?), ("golden", RealSpec::golden()), ("sqrt3", RealSpec::sqrt(3)?)];
    let cs = [Constraint::new(2, 2, 1, 1)?, Constraint::new(3, 4, 1, 2)?, Constraint::new(5, 3, 2, 1)?];
    let grid = [1_000u64, 10_000, 100_000];
    let mut counts_txt = Vec::new();
    for (name, x) in &xs {
        for c in &cs {
            let hits = brute_hits(x, c, &quarter, 100_000)?;
            let counts: Vec<usize> = grid.iter().map(|&q| hits.iter().filter(|h| h.denominator <= BigInt::from(q)).count()).collect();
            let increasing = counts.windows(2).all(|w| w[0] < w[1]) && counts[0] > 0;
            let certified = hits.iter().all(|h| h.quality.hi_le(&quarter));
            b.check(format!("{name} {c}: counts {counts:?} increase, qualities <= 1/4"), increasing && certified);
            counts_txt.push(format!("{name}/{c}:{}", counts.iter().map(|n| n.to_string()).collect::<Vec<_>>().join("<")));
        }
    }
    let golden = RealSpec::golden();
    let hom = Constraint::new(1, 1, 0, 0)?;
    let tail = tail_constant(&golden, &hom, 10_001, 100_000)?.ok_or_else(|| Error::pre("no hits"))?;
    let lit = approximation_constant(&golden, &hom, 100_000)?.ok_or_else(|| Error::pre("no hits"))?;
    let target = inv_sqrt5(80);
    let tol = rat(1, 1000);
    let within = tail.lo_ge(&(target.hi() - &tol)) && tail.hi_le(&(target.lo() + &tol));
    b.check("golden tail constant within 1e-3 of 1/sqrt5", within);
    b.note(counts_txt.join(" "));
    b.note(format!("golden tail constant {:.6} (all hits {:.6})", tail.mid_f64(), lit.mid_f64()));
    Ok(b.finish())
}

/// `n` log-spaced rationals from `lo` to `hi` with three decimals.
fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<BigRational> {
    let mut v: Vec<BigRational> = (0..n)
        .map(|i| {
            let x = lo * (hi / lo).powf(i as f64 / (n - 1) as f64);
            let milli = (x * 1000.0).round() as i64;
            rat(milli, 1000).max(ri(lo as i64)).min(ri(hi as i64))
        })
        .collect();
    v.dedup();
    v
}

/// Explicit uniform witness for `sqrt 2`, `(2, 2, 1, 1)`, `Psi = 1/Q`.
pub fn criterion_4() -> Result<CriterionReport> {
    let mut b = Builder::new(4, "uniform witness");
    let x = RealSpec::sqrt(2)?;
    let c = Constraint::new(2, 2, 1, 1)?;
    let psi = PsiSpec::reciprocal();
    let grid = log_grid(4.0, 10_000.0, 50);
    let limit = ri(1024);
    let (mut ok, mut worst) = (0, 0f64);
    let mut constants = std::collections::BTreeSet::new();
    for q in &grid {
        let t = witness(&x, &c, q, &psi)?;
        worst = worst.max(t.bound_value.mid_f64());
        constants.insert(t.constant.to_string());
        let den_ok = !t.denominator.is_negative() && ri(t.denominator.clone()) <= *q;
        if den_ok && t.bound_value.hi_le(&limit) && t.checks.all() {
            ok += 1;
        }
    }
    b.check(
        format!("{ok}/{} traces certified with bound <= 1024", grid.len()),
        ok == grid.len() && grid.len() == 50,
    );
    b.note(format!(
        "{ok}/{} traces, largest bound value {worst:.3}, constants {{{}}}",
        grid.len(),
        constants.into_iter().collect::<Vec<_>>().join(", ")
    ));
    Ok(b.finish())
}

/// Badly approximable bound `2ab(M + 2)/Q` for homogeneous and shifted targets.
pub fn criterion_5() -> Result<CriterionReport> {
    let mut b = Builder::new(5, "badly approximable bound");
    let c = Constraint::new(2, 2, 1, 1)?;
    let grid = log_grid(4.0, 1000.0, 30);
    let third = RealSpec::rational(1, 3)?;
    for (name, x) in [("sqrt2", RealSpec::sqrt(2)?), ("golden", RealSpec::golden())] {
        for (aname, alpha) in [("0", None), ("1/3", Some(&third as &dyn Real))] {
            let mut ok = 0;
            for q in &grid {
                if badly_witness(&x, alpha, &c, q)?.holds {
                    ok += 1;
                }
            }
            b.check(format!("{name}, alpha = {aname}: {ok}/{}", grid.len()), ok == grid.len() && grid.len() == 30);
        }
    }
    b.note(format!("{} grid points per case", grid.len()));
    Ok(b.finish())
}

/// Coprime counts in progressions against the main term.
pub fn criterion_6() -> Result<CriterionReport> {
    let mut b = Builder::new(6, "coprime progression counts");
    let x = 100_000u64;
    let mut notes = Vec::new();
    for (a, r) in [(2u64, 1u64), (3, 2), (4, 1)] {
        let (mut violations, mut literal, mut tested) = (0, 0, 0);
        let mut worst = 0f64;
        for q in 1..=5000u64 {
            if num_integer::gcd(num_integer::gcd(a, r), q) != 1 {
                continue;
            }
            tested += 1;
            let exact = ri(coprime_progression_count(x, q, a, r)?);
            let bound = ri(4 * a * (1u64 << prime_factors(q).len()));
            let err = (&exact - coprime_main_term(x, q, a, r)?).abs();
            if err > bound {
                violations += 1;
            }
            worst = worst.max(crate::enclosure::rat_to_f64(&(&err / &bound)));
            if (&exact - coprime_closed_form(x, q, a, r)?).abs() > bound {
                literal += 1;
            }
        }
        b.check(format!("(a, r) = ({a}, {r}): {violations} violations over {tested} q"), violations == 0);
        notes.push(format!("({a},{r}) worst {:.1}% of bound, closed form {literal} violations", 100.0 * worst));
    }
    b.note(notes.join("; "));
    Ok(b.finish())
}

/// Totient sums along progressions against `C(u, v)`.
pub fn criterion_7() -> Result<CriterionReport> {
    let mut b = Builder::new(7, "totient progression sums");
    let q = 1_000_000u64;
    let mut notes = Vec::new();
    for (u, v) in [(1u64, 0u64), (2, 0), (2, 1), (4, 2), (6, 3)] {
        let s = phi_progression_sum(u, v, q)?;
        let ratio = BigRational::new(BigInt::from(s), BigInt::from(q) * BigInt::from(q));
        let cc = c_constant(u, v, 64)?;
        let dev = (cc.sub(&Enclosure::exact(&ratio))).abs();
        b.check(format!("C({u},{v})"), dev.hi_le(&BigRational::new(1.into(), 100.into())));
        notes.push(format!("C({u},{v}) {:.6} vs {:.6}", cc.mid_f64(), crate::enclosure::rat_to_f64(&ratio)));
    }
    let c10 = c_constant(1, 0, 64)?;
    let p = pi(80);
    let three_over_pi2 = Enclosure::from_int(3).div(&p.mul(&p), 80);
    let printed = rat(30_396_355, 100_000_000);
    let printed_ok = c10.lo_ge(&(&printed - rat(1, 100_000_000))) && c10.hi_le(&(&printed + rat(1, 100_000_000)));
    b.check("C(1,0) encloses 3/pi^2 = 0.30396355", c10.overlaps(&three_over_pi2) && printed_ok);
    b.note(notes.join(", "));
    b.runtime(60.0);
    Ok(b.finish())
}

/// Regular-system counts in `(0, 1)` for `(2, 2, 1, 1)`.
pub fn criterion_8() -> Result<CriterionReport> {
    let mut b = Builder::new(8, "regular-system counts");
    let c = Constraint::new(2, 2, 1, 1)?;
    let mut counts = Vec::new();
    for q in [200u64, 400, 800] {
        let rc = regular_system_count(&c, &ri(0), &ri(1), q)?;
        b.check(format!("count {} > 0.05 Q^2 at Q = {q}", rc.count), rc.count as f64 > 0.05 * (q * q) as f64);
        counts.push(rc.count);
    }
    for w in counts.windows(2) {
        let ratio = w[1] as f64 / w[0] as f64;
        b.check(format!("doubling ratio {ratio:.3} in [3, 5]"), (3.0..=5.0).contains(&ratio));
    }
    b.note(format!("counts {counts:?}"));
    Ok(b.finish())
}

fn power_log(cc: BigRational, mu: i64, beta: i64) -> Result<PsiSpec> {
    PsiSpec::power_log(cc, Rational64::from_integer(mu), Rational64::from_integer(beta))
}

/// Survival of the uniform property at `Q = 10^4` on both sides of the dichotomy.
pub fn criterion_9() -> Result<CriterionReport> {
    let mut b = Builder::new(9, "uniform survival dichotomy");
    let c = Constraint::new(2, 2, 1, 1)?;
    let conv = uniform_survival(&c, &PsiSpec::reciprocal(), 2000, &[10_000], 1, SEED)?;
    let div = uniform_survival(&c, &power_log(ri(1), 1, 2)?, 2000, &[10_000], 1, SEED)?;
    let (s1, s2) = (conv.fractions[0].fraction, div.fractions[0].fraction);
    b.check("zero undecided", conv.undecided == 0 && div.undecided == 0);
    b.check(format!("1/Q survival {s1:.4} < T1 = {SURVIVAL_T1}"), s1 < SURVIVAL_T1);
    b.check(format!("log^2/Q survival {s2:.4} > T2 = {SURVIVAL_T2}"), s2 > SURVIVAL_T2);
    b.check("T2 - T1 >= 0.3", SURVIVAL_T2 - SURVIVAL_T1 >= 0.3);
    b.note(format!("survival {s1:.4} vs {s2:.4}"));
    Ok(b.finish())
}

/// Block hit fractions for convergent and divergent `Psi`, with and without the gcd condition.
pub fn criterion_10() -> Result<CriterionReport> {
    let mut b = Builder::new(10, "Khintchine block fractions");
    let c = Constraint::new(2, 2, 1, 1)?;
    let blocks: Vec<(u64, u64)> = (6..=12).map(|j| (1u64 << j, 1u64 << (j + 1))).collect();
    let conv = khintchine_trial(&c, &power_log(ri(1), 3, 0)?, &blocks, 1 << 20, SEED)?;
    let div = khintchine_trial(&c, &power_log(rat(1, 2), 2, 0)?, &blocks, 20_000, SEED)?;
    b.check("zero undecided", conv.undecided == 0 && div.undecided == 0);
    let pick = |rep: &crate::metric_lab::TrialReport, gcd: bool| -> Vec<(u64, f64, f64)> {
        rep.fractions
            .iter()
            .skip(gcd as usize)
            .step_by(2)
            .map(|p| (p.hits, p.fraction, p.std_error))
            .collect()
    };
    for gcd in [false, true] {
        let tag = if gcd { "gcd" } else { "plain" };
        let cv = pick(&conv, gcd);
        let hits: Vec<u64> = cv.iter().map(|x| x.0).collect();
        b.check(
            format!("convergent {tag} hits {hits:?} strictly decrease"),
            hits.windows(2).all(|w| w[0] > w[1]),
        );
        let floor = if gcd { DIVERGENT_FLOOR_GCD } else { DIVERGENT_FLOOR };
        let dv = pick(&div, gcd);
        let min = dv.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
        b.check(format!("divergent {tag} minimum {min:.4} >= {floor}"), min >= floor);
    }
    // The gcd condition removes non-primitive hits, a fixed share of every block.
    let mut worst = 0f64;
    for rep in [&conv, &div] {
        for (p, g) in pick(rep, false).iter().zip(pick(rep, true)) {
            let sigma = (p.2 * p.2 + g.2 * g.2).sqrt();
            if sigma > 0.0 {
                worst = worst.max((p.1 - g.1).abs() / sigma);
            }
        }
    }
    b.deviation(format!("gcd fractions within 3 sigma (worst {worst:.1} sigma)"), worst <= 3.0);
    let dv: Vec<String> = pick(&div, false)
        .iter()
        .zip(pick(&div, true))
        .map(|(p, g)| format!("{:.3}/{:.3}", p.1, g.1))
        .collect();
    b.note(format!("divergent plain/gcd {}", dv.join(" ")));
    Ok(b.finish())
}

/// Orchard visibility fixtures.
pub fn criterion_11() -> Result<CriterionReport> {
    let mut b = Builder::new(11, "orchard visibility");
    let c = Constraint::new(2, 2, 1, 1)?;
    let fig = OrchardScene::new(c, RadiusModel::Asymptotic, 10_000, ri(0), DistanceMode::Euclidean)?;
    let mut blocked = 0;
    let mut deepest = 0;
    for i in 0..100 {
        let slope = SampledReal::new(SEED, i, ri(0), ri(4))?;
        if let Verdict::BlockedBy { x, .. } = visibility(&fig, &slope)?.verdict {
            blocked += 1;
            deepest = deepest.max(x);
        }
    }
    b.check(format!("{blocked}/100 sampled slopes blocked"), blocked == 100);
    let two_thirds = RealSpec::rational(2, 3)?;
    for mode in [DistanceMode::Euclidean, DistanceMode::Vertical] {
        let glade = OrchardScene::new(c, RadiusModel::Asymptotic, 10_000, ri(5), mode)?;
        let v = visibility(&glade, &two_thirds)?;
        b.check(format!("slope 2/3 visible with glade 5 ({mode:?})"), v.verdict == Verdict::Visible);
    }
    let unit = Constraint::new(1, 1, 0, 0)?;
    let grid: Vec<RealSpec> = (1..=100).map(|k| RealSpec::rational(2 * k - 101, 20)).collect::<Result<_>>()?;
    let polya = polya_baseline(&unit, 10, &grid, None)?;
    b.check(format!("Polya disk blocks {}/100 slopes at radius 1/10", polya.blocked), polya.blocked == 100);
    b.note(format!(
        "first blockers at x <= {deepest}, Polya worst margin {:.4}",
        polya.worst_margin.map(|m| m.mid_f64()).unwrap_or(f64::NAN)
    ));
    Ok(b.finish())
}

/// Running extrema of `sin(n)^n`.
pub fn criterion_12() -> Result<CriterionReport> {
    let mut b = Builder::new(12, "sin(n)^n extrema");
    let one = RealSpec::rational(1, 1)?;
    let probe = trig_probe(&one, None, 100_000)?;
    b.check("running min <= -0.99", probe.min().hi_le(&rat(-99, 100)));
    b.check("running max >= 0.99", probe.max().lo_ge(&rat(99, 100)));
    b.note(format!(
        "min {:.5} at n = {}, max {:.5} at n = {}",
        probe.min().mid_f64(),
        probe.argmin,
        probe.max().mid_f64(),
        probe.argmax
    ));
    Ok(b.finish())
}

/// Criteria grouped by suite name.
pub fn suite(name: &str) -> Result<Vec<u8>> {
    Ok(match name {
        "cf" => vec![1],
        "threedist" => vec![2],
        "asymptotic" => vec![3],
        "uniform" => vec![4, 5],
        "sums" => vec![6, 7, 8],
        "metric" => vec![9, 10],
        "orchard" => vec![11],
        "trig" => vec![12],
        "all" => (1..=12).collect(),
        _ => return Err(Error::pre(format!("unknown suite {name}"))),
    })
}

pub const SUITES: [&str; 9] = ["cf", "threedist", "asymptotic", "uniform", "sums", "metric", "orchard", "trig", "all"];

pub fn criterion(id: u8) -> Result<CriterionReport> {
    match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(),
        10 => criterion_10(),
        11 => criterion_11(),
        12 => criterion_12(),
        _ => Err(Error::pre(format!("no criterion {id}"))),
    }
}

/// Run every criterion of a suite.
pub fn run(name: &str) -> Result<Vec<CriterionReport>> {
    suite(name)?.into_iter().map(criterion).collect()
}
