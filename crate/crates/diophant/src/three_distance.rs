//! Gap lengths of the points `{i xi}`, `0 <= i <= Q`, on the circle.
//!
//! Every gap between two neighbouring points has length `d xi - m` for
//! integers `d, m` read off the sorted points. Gaps are grouped by that exact
//! form, so two gaps share a class exactly when their lengths are equal. The
//! predicted spectrum from the greedy decomposition of `Q` is expressed in the
//! same forms, which makes the comparison exact.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::cf::{greedy_decompose, ConvergentTable, Real};
use crate::enclosure::{refine_capped, Enclosure};
use crate::error::{Error, Result};
use crate::json;
use crate::scan::{Scaled, Window};

/// Gaps of length `d xi - m`, `count` times.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapEntry {
    pub length: Enclosure,
    pub count: u64,
    #[serde(serialize_with = "json::big")]
    pub d: BigInt,
    #[serde(serialize_with = "json::big")]
    pub m: BigInt,
}

/// Multiset of gap lengths, sorted by increasing length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapSpectrum {
    pub q: u64,
    pub entries: Vec<GapEntry>,
}

impl GapSpectrum {
    /// Sum of the counts.
    pub fn total(&self) -> u64 {
        self.entries.iter().map(|e| e.count).sum()
    }

    /// Entries with positive count.
    pub fn present(&self) -> impl Iterator<Item = &GapEntry> {
        self.entries.iter().filter(|e| e.count > 0)
    }

    /// With three lengths present, the largest form is the sum of the other two.
    pub fn largest_is_sum(&self) -> bool {
        let v: Vec<&GapEntry> = self.present().collect();
        if v.len() != 3 {
            return true;
        }
        v[2].d == &v[0].d + &v[1].d && v[2].m == &v[0].m + &v[1].m
    }
}

/// Sorted points as `(i, floor(i xi))`, or `None` if the window cannot separate them.
fn sorted_points<T: Scaled>(w: &Window<T>, q: u64) -> Option<Vec<(u64, T)>> {
    let mut pts: Vec<(u64, T, T, T)> = Vec::with_capacity(q as usize + 1);
    for i in 0..=q {
        let it = T::from_u64(i);
        let lo = it.clone() * w.xlo.clone();
        let hi = it * w.xhi.clone();
        let f = lo.div_floor(&w.den);
        if hi.div_floor(&w.den) != f {
            return None;
        }
        let base = f.clone() * w.den.clone();
        pts.push((i, f, lo - base.clone(), hi - base));
    }
    pts.sort_by(|x, y| x.2.cmp(&y.2));
    if pts.windows(2).any(|p| p[0].3 >= p[1].2) {
        return None;
    }
    Some(pts.into_iter().map(|(i, f, _, _)| (i, f)).collect())
}

fn point_forms<R: Real + ?Sized>(xi: &R, q: u64) -> Result<(Vec<(u64, BigInt)>, u32)> {
    let start = (2 * (64 - q.leading_zeros()) + 32).max(64);
    refine_capped(start, |bits| {
        let w = Window::build(xi, None, bits)?;
        if w.is_exact() {
            return Err(Error::pre("three-distance gaps need an irrational xi"));
        }
        let bound = BigInt::from(q + 2) * 4u32;
        let pts = match w.narrow(&bound) {
            Some(wi) => sorted_points(&wi, q).map(|v| v.into_iter().map(|(i, f)| (i, f.to_big())).collect()),
            None => sorted_points(&w, q),
        };
        Ok(pts.map(|p| (p, bits)))
    })
}

/// Order entries by length with certified comparisons.
fn finish<R: Real + ?Sized>(xi: &R, q: u64, forms: BTreeMap<(BigInt, BigInt), u64>, bits: u32) -> Result<GapSpectrum> {
    let forms: Vec<((BigInt, BigInt), u64)> = forms.into_iter().collect();
    let max_d = forms.iter().map(|((d, _), _)| d.bits()).max().unwrap_or(0) as u32;
    refine_capped(bits, |b| {
        let x = xi.enclose(b + max_d + 2)?;
        let mut entries: Vec<GapEntry> = forms
            .iter()
            .map(|((d, m), count)| GapEntry {
                length: x.mul_int(d).add_int(&-m).round_out(b),
                count: *count,
                d: d.clone(),
                m: m.clone(),
            })
            .collect();
        entries.sort_by_key(|e| e.length.lo());
        let separated = entries.windows(2).all(|p| p[0].length.certainly_lt(&p[1].length));
        Ok(separated.then_some(GapSpectrum { q, entries }))
    })
}

/// Gaps of `{i xi}`, `0 <= i <= Q`, on `R/Z`, grouped by exact length.
pub fn gaps_direct<R: Real + ?Sized>(xi: &R, q: u64) -> Result<GapSpectrum> {
    if q == 0 {
        return Err(Error::pre("Q must be positive"));
    }
    let (pts, bits) = point_forms(xi, q)?;
    let mut forms: BTreeMap<(BigInt, BigInt), u64> = BTreeMap::new();
    for pair in pts.windows(2) {
        let (i, fi) = &pair[0];
        let (j, fj) = &pair[1];
        let d = BigInt::from(*j) - BigInt::from(*i);
        *forms.entry((d, fj - fi)).or_default() += 1;
    }
    // Wrap-around gap from the largest point back to 0 = 1 (mod 1).
    let (last, fl) = pts.last().expect("Q + 1 points");
    *forms.entry((-BigInt::from(*last), -(fl + BigInt::one()))).or_default() += 1;
    finish(xi, q, forms, bits)
}

/// `eta_k = (-1)^k (q_k xi - p_k)` as the form `(d, m)` of `d xi - m`.
fn eta_form(t: &ConvergentTable, k: i64) -> (BigInt, BigInt) {
    if k.rem_euclid(2) == 0 {
        (t.q(k).clone(), t.p(k).clone())
    } else {
        (-t.q(k), -t.p(k))
    }
}

/// Spectrum predicted from the greedy decomposition of `Q`, zero counts kept.
pub fn gaps_predicted<R: Real + ?Sized>(xi: &R, q: u64) -> Result<GapSpectrum> {
    if q == 0 {
        return Err(Error::pre("Q must be positive"));
    }
    if xi.exact_value().is_some() {
        return Err(Error::pre("three-distance gaps need an irrational xi"));
    }
    let bq = BigInt::from(q);
    let table = ConvergentTable::covering(&xi.expansion(0)?, &bq)?;
    let dec = greedy_decompose(&table, &bq)?;
    let k = dec.k as i64;
    let (d1, m1) = eta_form(&table, k - 1);
    let (d2, m2) = eta_form(&table, k - 2);
    let qk1 = table.q(k - 1);
    let to_u64 = |x: BigInt| -> u64 { x.try_into().expect("counts are bounded by Q + 1") };
    let small = (&d2 - &dec.p * &d1, &m2 - &dec.p * &m1);
    let large = (&small.0 + &d1, &small.1 + &m1);
    let mut forms = BTreeMap::new();
    forms.insert((d1, m1), to_u64(&bq + 1 - qk1));
    forms.insert(small, to_u64(&dec.w + 1));
    forms.insert(large, to_u64(qk1 - &dec.w - 1));
    let bits = (2 * (64 - q.leading_zeros()) + 32).max(64);
    finish(xi, q, forms, bits)
}

/// Direct and predicted spectra with the outcome of their comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verification {
    pub matches: bool,
    pub direct: GapSpectrum,
    pub predicted: GapSpectrum,
}

/// Compare present lengths and counts of both spectra.
pub fn verify<R: Real + ?Sized>(xi: &R, q: u64) -> Result<Verification> {
    let direct = gaps_direct(xi, q)?;
    let predicted = gaps_predicted(xi, q)?;
    let a: Vec<_> = direct.present().map(|e| (&e.d, &e.m, e.count)).collect();
    let b: Vec<_> = predicted.present().map(|e| (&e.d, &e.m, e.count)).collect();
    let lengths_agree = direct.present().zip(predicted.present()).all(|(x, y)| x.length.overlaps(&y.length));
    let matches = a == b && lengths_agree && direct.total() == q + 1 && direct.present().count() <= 3 && direct.largest_is_sum() && predicted.total() == q + 1;
    Ok(Verification { matches, direct, predicted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::RealSpec;
    use num_rational::BigRational;

    fn conj() -> RealSpec {
        RealSpec::surd(-1, 5, 2).unwrap()
    }

    #[test]
    fn golden_conjugate_q4() {
        let s = gaps_direct(&conj(), 4).unwrap();
        let got: Vec<(f64, u64)> = s.entries.iter().map(|e| (e.length.mid_f64(), e.count)).collect();
        assert_eq!(got.len(), 2);
        assert!((got[0].0 - 0.1458980338).abs() < 1e-9 && got[0].1 == 2);
        assert!((got[1].0 - 0.2360679775).abs() < 1e-9 && got[1].1 == 3);
        let p = gaps_predicted(&conj(), 4).unwrap();
        let counts: Vec<u64> = p.entries.iter().map(|e| e.count).collect();
        assert_eq!(counts, vec![2, 3, 0]);
        assert!(verify(&conj(), 4).unwrap().matches);
    }

    #[test]
    fn q_one_gives_two_gaps() {
        let x = RealSpec::sqrt(2).unwrap();
        let s = gaps_direct(&x, 1).unwrap();
        assert_eq!(s.entries.len(), 2);
        let f = 2f64.sqrt() - 1.0;
        assert!((s.entries[0].length.mid_f64() - f.min(1.0 - f)).abs() < 1e-12);
        assert!((s.entries[1].length.mid_f64() - f.max(1.0 - f)).abs() < 1e-12);
    }

    #[test]
    fn float_sort_oracle() {
        for (x, xf) in [
            (RealSpec::sqrt(3).unwrap(), 3f64.sqrt()),
            (RealSpec::surd(1, 7, 3).unwrap(), (1.0 + 7f64.sqrt()) / 3.0),
        ] {
            for q in [2u64, 3, 10, 57, 200] {
                let mut pts: Vec<f64> = (0..=q).map(|i| (i as f64 * xf).rem_euclid(1.0)).collect();
                pts.sort_by(f64::total_cmp);
                let mut gaps: Vec<f64> = pts.windows(2).map(|p| p[1] - p[0]).collect();
                gaps.push(1.0 - pts.last().unwrap());
                let s = gaps_direct(&x, q).unwrap();
                assert_eq!(s.total(), q + 1);
                for e in &s.entries {
                    let n = gaps.iter().filter(|g| (**g - e.length.mid_f64()).abs() < 1e-9).count() as u64;
                    assert_eq!(n, e.count, "{x} Q = {q}");
                }
                assert!(verify(&x, q).unwrap().matches);
            }
        }
    }

    #[test]
    fn boundary_zero_third_count() {
        // Q = q_k + q_{k-1} - 1 has w + 1 = q_{k-1}, so the third length is absent.
        let x = RealSpec::sqrt(2).unwrap();
        let t = ConvergentTable::upto(&x.expansion(0).unwrap(), 6).unwrap();
        for k in 2..6i64 {
            let q: u64 = (t.q(k) + t.q(k - 1) - 1u32).try_into().unwrap();
            let p = gaps_predicted(&x, q).unwrap();
            assert_eq!(p.entries.iter().filter(|e| e.count == 0).count(), 1);
            assert!(verify(&x, q).unwrap().matches);
        }
    }

    #[test]
    fn rational_is_rejected() {
        let x = RealSpec::Rational(BigRational::new(1.into(), 3.into()));
        assert!(gaps_direct(&x, 5).is_err());
    }
}
