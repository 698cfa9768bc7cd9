//! Elliptic surfaces `E(n)` and their genus-`(n-1)` fiber sums `X_n`.

use crate::error::{Error, Result};
use crate::fibersum::{
    big_binomial, chern_display, chern_poly, d_invariant, degree_violations, fibersum_genus1, fibersum_genusg,
    identity_matrix, simple_type_check, t_minus_t_inverse_power, torus_ideal_vanishing, AMonomial, ClassToken,
    ClosedInvariant,
};
use crate::groupring::LaurentSeries;
use crate::pairing::rel_inv_torus_disk;
use crate::surgery::GENUS_CAP;
use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::Signed;

/// Outcome of a demo: rendered invariant, named checks, overall verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DemoReport {
    pub name: String,
    pub n: usize,
    pub rendered: String,
    pub checks: Vec<(String, bool)>,
}

impl DemoReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|(_, ok)| *ok)
    }
}

/// `E(1)` relative to a fiber: `1/(t - 1)` on the class `K`.
pub fn e1_invariant(trunc: usize) -> ClosedInvariant {
    let mut inv = ClosedInvariant::new(1, 12, -8).expect("genus 1");
    inv.add_class(ClassToken::new("K", 0, 0)).expect("k = 0");
    inv.add_entry("K", AMonomial::one(), rel_inv_torus_disk(trunc)).expect("declared class");
    inv
}

/// `E(n) = E(n-1) #_{T²} E(1)`, starting from `E(1)`.
pub fn en_invariant(n: usize, trunc: usize) -> Result<ClosedInvariant> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let e1 = e1_invariant(trunc);
    let mut cur = e1.clone();
    for _ in 1..n {
        cur = fibersum_genus1(&cur, &e1, trunc)?;
    }
    Ok(cur)
}

/// The expected value `(T - T⁻¹)^{n-2}`.
pub fn en_closed_form(n: usize) -> LaurentSeries {
    t_minus_t_inverse_power(n.saturating_sub(2) as u32)
}

/// `OS_{E(n)}` on the classes `jF`, `|j| ≤ n - 2`, read against a genus-`(n-1)` surface meeting `F` twice.
pub fn en_genus_invariant(n: usize) -> Result<ClosedInvariant> {
    if n < 2 {
        return Err(Error::InvalidArgument("n must be at least 2".into()));
    }
    let m = n - 2;
    let mut inv = ClosedInvariant::new(n - 1, 12 * n as i64, -8 * n as i64)?;
    for i in 0..=m {
        let j = m as i64 - 2 * i as i64;
        let label = format!("{j}F");
        inv.add_class(ClassToken::new(label.clone(), j, 0))?;
        let mut c = big_binomial(m as u64, i as u64);
        if i % 2 == 1 {
            c = -c;
        }
        inv.add_entry(&label, AMonomial::one(), LaurentSeries::from_terms([(0, c)]))?;
    }
    Ok(inv)
}

/// Computes `E(n)` for `n ≥ 2` and checks it against `(T - T⁻¹)^{n-2}`.
pub fn demo_en(n: usize, trunc: usize) -> Result<DemoReport> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("en needs N >= 2, got {n}")));
    }
    let trunc = trunc.max(n);
    let inv = en_invariant(n, trunc)?;
    let rendered = chern_display(&inv)?;
    let single = inv.entries().len() == 1;
    let value = if single { chern_poly(&inv.entries()[0].series)? } else { LaurentSeries::zero() };
    let st = simple_type_check(&inv);
    let checks = vec![
        ("closed form (T-T^-1)^(n-2)".to_string(), single && value == en_closed_form(n)),
        ("topology e=12n sigma=-8n".to_string(), (inv.euler, inv.signature) == (12 * n as i64, -8 * n as i64)),
        ("simple type".to_string(), st.is_simple_type()),
        ("torus ideal vanishes".to_string(), torus_ideal_vanishing(&inv)),
        ("degree matches d".to_string(), degree_violations(&inv).is_empty()),
    ];
    Ok(DemoReport { name: "en".into(), n, rendered, checks })
}

/// Sums two copies of `E(n)` along a genus-`(n-1)` surface and checks for `±K ± K⁻¹`.
pub fn demo_xn(n: usize, trunc: usize) -> Result<DemoReport> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("xn needs N >= 3, got {n}")));
    }
    let g = n - 1;
    if g > GENUS_CAP {
        return Err(Error::GenusOutOfRange(g, GENUS_CAP));
    }
    let e = en_genus_invariant(n)?;
    let x = fibersum_genusg(&e, &e, &identity_matrix(2 * g), trunc)?;
    let kk = (g - 1) as i64;
    let mut lines = Vec::new();
    for entry in x.entries() {
        let c = x.class(&entry.token).expect("entry class");
        let name = if c.k > 0 { "K" } else { "K^-1" };
        lines.push(format!(
            "{name} [{}, k={}, sq={}] {}: {}",
            c.label,
            c.k,
            c.sq,
            entry.alpha,
            entry.series.pretty("t")
        ));
    }
    let ks: Vec<i64> = x.entries().iter().map(|en| x.class(&en.token).unwrap().k).collect();
    let mut sorted = ks.clone();
    sorted.sort();
    let units = x.entries().iter().all(|en| {
        en.alpha == AMonomial::one()
            && en.series.is_exact()
            && en.series.num_terms() == 1
            && en.series.terms().all(|(_, c)| c.abs() == BigInt::from(1))
    });
    let sq_ok = x.classes().iter().all(|c| c.sq == 8 * kk);
    let d_ok = x.classes().iter().all(|c| d_invariant(c.sq, x.signature, x.euler) == Rational64::from_integer(0));
    let checks = vec![
        ("two entries K, K^-1".to_string(), sorted == vec![-kk, kk]),
        ("coefficients are units".to_string(), units),
        ("K^2 = 8(n-2)".to_string(), sq_ok),
        ("d = 0".to_string(), d_ok),
        ("topology e=28n-8 sigma=-16n".to_string(), (x.euler, x.signature) == (28 * n as i64 - 8, -16 * n as i64)),
    ];
    Ok(DemoReport { name: "xn".into(), n, rendered: lines.join("\n"), checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupring::{eq_up_to_unit, DEFAULT_TRUNC};

    #[test]
    fn e2_is_one() {
        let e2 = en_invariant(2, DEFAULT_TRUNC).unwrap();
        assert_eq!(e2.entries().len(), 1);
        assert!(eq_up_to_unit(&e2.entries()[0].series, &LaurentSeries::one()));
        assert_eq!((e2.euler, e2.signature), (24, -16));
    }

    #[test]
    fn elliptic_family_matches_closed_form() {
        for n in 2..=8 {
            let r = demo_en(n, DEFAULT_TRUNC).unwrap();
            assert!(r.pass(), "{r:?}");
        }
        assert_eq!(demo_en(3, DEFAULT_TRUNC).unwrap().rendered, "K#K#K 1: T - T^-1");
        assert!(demo_en(1, DEFAULT_TRUNC).is_err());
    }

    #[test]
    fn genus_sums_give_two_basic_classes() {
        for n in 3..=6 {
            let r = demo_xn(n, DEFAULT_TRUNC).unwrap();
            assert!(r.pass(), "{r:?}");
        }
        assert!(demo_xn(2, DEFAULT_TRUNC).is_err());
        assert_eq!(demo_xn(8, DEFAULT_TRUNC).unwrap_err(), Error::GenusOutOfRange(7, GENUS_CAP));
    }

    #[test]
    fn genus_invariant_coefficients() {
        let e = en_genus_invariant(5).unwrap();
        let coeffs: Vec<String> = e.entries().iter().map(|x| format!("{}={}", x.token, x.series.to_text())).collect();
        assert_eq!(coeffs, ["3F=0:1", "1F=0:-3", "-1F=0:3", "-3F=0:-1"]);
    }
}
