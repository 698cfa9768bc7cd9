//! Rim-torus averaged closed invariants and the fiber-sum product formulas.

use crate::error::{Error, Result};
use crate::extalg::{wedge, ExtElem, Mono};
use crate::groupring::{canonical, Completion, LaurentSeries};
use crate::pairing::{AElem, DualBasis};
use crate::surgery::{check_spinc, Kernel};
use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

/// A rim-torus coset of spin^c structures: opaque label with `k = ½⟨c₁, [Σ]⟩` and `sq = c₁²`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ClassToken {
    pub label: String,
    pub k: i64,
    pub sq: i64,
}

impl ClassToken {
    pub fn new(label: impl Into<String>, k: i64, sq: i64) -> Self {
        ClassToken { label: label.into(), k, sq }
    }
}

/// `U^u · e_S · x₁ ⋯ x_r` with `S ⊂ H₁(Σ)` and external 1-classes `xᵢ`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Default)]
pub struct AMonomial {
    pub u: u32,
    pub sigma: Mono,
    pub ext: Vec<String>,
}

impl AMonomial {
    pub fn one() -> Self {
        AMonomial::default()
    }

    pub fn degree(&self) -> usize {
        2 * self.u as usize + self.sigma.degree() + self.ext.len()
    }

    /// Text form `<U^a|1>[*e{i}...][*X:<label>...]`.
    pub fn to_text(&self) -> String {
        let mut out = if self.u == 0 { "1".to_string() } else { format!("U^{}", self.u) };
        for i in self.sigma.indices() {
            out.push_str(&format!("*e{i}"));
        }
        for x in &self.ext {
            out.push_str(&format!("*X:{x}"));
        }
        out
    }

    pub fn parse_text(s: &str, g: usize) -> std::result::Result<Self, String> {
        let mut parts = s.split('*');
        let head = parts.next().unwrap_or_default();
        let u = if head == "1" {
            0
        } else if let Some(a) = head.strip_prefix("U^") {
            match a.parse::<u32>() {
                Ok(n) if n > 0 && n.to_string() == a => n,
                _ => return Err(format!("bad U-power `{head}`")),
            }
        } else {
            return Err(format!("alpha must start with `1` or `U^a`, got `{head}`"));
        };
        let mut idx = Vec::new();
        let mut ext = Vec::new();
        for p in parts {
            if let Some(label) = p.strip_prefix("X:") {
                if label.is_empty() {
                    return Err("empty external class label".into());
                }
                ext.push(label.to_string());
            } else if let Some(i) = p.strip_prefix('e') {
                if !ext.is_empty() {
                    return Err("surface classes must precede external classes".into());
                }
                let i: usize = i.parse().map_err(|_| format!("bad surface class `{p}`"))?;
                if i == 0 || i > 2 * g {
                    return Err(format!("surface class e{i} out of range for genus {g}"));
                }
                if idx.last().is_some_and(|&l| l >= i) {
                    return Err("surface classes must be strictly ascending".into());
                }
                idx.push(i);
            } else {
                return Err(format!("unknown factor `{p}`"));
            }
        }
        let sigma = Mono::from_indices(&idx).ok_or_else(|| "repeated surface class".to_string())?;
        Ok(AMonomial { u, sigma, ext })
    }
}

impl fmt::Display for AMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// One coefficient of a closed invariant.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Entry {
    pub token: String,
    pub alpha: AMonomial,
    pub series: LaurentSeries,
}

type ByAlpha = HashMap<(u32, Mono), LaurentSeries>;

/// Rim-torus averaged invariant of a closed four-manifold containing a marked surface of genus `g`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClosedInvariant {
    pub genus: usize,
    pub euler: i64,
    pub signature: i64,
    classes: Vec<ClassToken>,
    entries: Vec<Entry>,
}

impl ClosedInvariant {
    pub fn new(genus: usize, euler: i64, signature: i64) -> Result<Self> {
        if genus == 0 {
            return Err(Error::InvalidArgument("genus must be positive".into()));
        }
        Ok(ClosedInvariant { genus, euler, signature, classes: Vec::new(), entries: Vec::new() })
    }

    pub fn classes(&self) -> &[ClassToken] {
        &self.classes
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn class(&self, label: &str) -> Option<&ClassToken> {
        self.classes.iter().find(|c| c.label == label)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Registers a class; re-adding an identical token is a no-op.
    pub fn add_class(&mut self, c: ClassToken) -> Result<()> {
        if c.k.unsigned_abs() as usize > self.genus - 1 {
            return Err(Error::SpincOutOfRange { g: self.genus, k: c.k });
        }
        if c.label.is_empty() || c.label.chars().any(char::is_whitespace) {
            return Err(Error::InvalidArgument(format!("bad class label `{}`", c.label)));
        }
        match self.class(&c.label) {
            Some(old) if *old == c => Ok(()),
            Some(_) => Err(Error::InvalidArgument(format!("class `{}` redefined", c.label))),
            None => {
                self.classes.push(c);
                Ok(())
            }
        }
    }

    /// Adds `series` to the entry at `(token, alpha)`; zero entries are dropped.
    pub fn add_entry(&mut self, token: &str, alpha: AMonomial, series: LaurentSeries) -> Result<()> {
        if self.class(token).is_none() {
            return Err(Error::InvalidArgument(format!("unknown class `{token}`")));
        }
        if alpha.sigma.indices().last().is_some_and(|&i| i > 2 * self.genus) {
            return Err(Error::InvalidArgument(format!("{alpha} has surface classes beyond genus {}", self.genus)));
        }
        if let Some(pos) = self.entries.iter().position(|e| e.token == token && e.alpha == alpha) {
            let sum = self.entries[pos].series.checked_add(&series)?;
            if sum.is_zero() {
                self.entries.remove(pos);
            } else {
                self.entries[pos].series = sum;
            }
        } else if !series.is_zero() {
            self.entries.push(Entry { token: token.to_string(), alpha, series });
        }
        Ok(())
    }

    pub fn get(&self, token: &str, alpha: &AMonomial) -> LaurentSeries {
        self.entries
            .iter()
            .find(|e| e.token == token && e.alpha == *alpha)
            .map(|e| e.series.clone())
            .unwrap_or_default()
    }

    /// Every entry in canonical form modulo `±tⁿ`, windows clipped to `trunc`.
    pub fn normalized(&self, trunc: usize) -> Self {
        let mut out = self.clone();
        for e in &mut out.entries {
            e.series = canonical(&e.series.clip(trunc));
        }
        out
    }

    /// Entries of one class grouped by their external part, in first-seen order.
    fn groups(&self, token: &str) -> Vec<(Vec<String>, ByAlpha)> {
        let mut out: Vec<(Vec<String>, ByAlpha)> = Vec::new();
        for e in self.entries.iter().filter(|e| e.token == token) {
            let key = (e.alpha.u, e.alpha.sigma);
            match out.iter_mut().find(|(x, _)| *x == e.alpha.ext) {
                Some((_, m)) => {
                    m.insert(key, e.series.clone());
                }
                None => out.push((e.alpha.ext.clone(), HashMap::from([(key, e.series.clone())]))),
            }
        }
        out
    }
}

/// `d(𝔰) = (c₁² - 3σ - 2e) / 4`.
pub fn d_invariant(sq: i64, sigma: i64, euler: i64) -> Rational64 {
    Rational64::new(sq - 3 * sigma - 2 * euler, 4)
}

/// Euler characteristic and signature of a fiber sum along genus-`g` surfaces.
pub fn sum_topology(e1: i64, s1: i64, e2: i64, s2: i64, g: usize) -> (i64, i64) {
    (e1 + e2 + 4 * g as i64 - 4, s1 + s2)
}

/// Glues two classes with equal `k`; the square picks up `8|k|`.
pub fn patch(c1: &ClassToken, c2: &ClassToken) -> Result<ClassToken> {
    if c1.k != c2.k {
        return Err(Error::IncompatibleK(c1.k, c2.k));
    }
    Ok(ClassToken { label: format!("{}#{}", c1.label, c2.label), k: c1.k, sq: c1.sq + c2.sq + 8 * c1.k.abs() })
}

fn ensure_class(out: &mut ClosedInvariant, c: &ClassToken) -> Result<()> {
    out.add_class(c.clone()).map_err(|e| match e {
        Error::InvalidArgument(m) => Error::Internal(m),
        e => e,
    })
}

fn t_minus_one_squared() -> LaurentSeries {
    LaurentSeries::from_terms([(0, 1), (1, -2), (2, 1)])
}

/// Sum along tori: `(t - 1)² · A · B` on matched classes.
pub fn fibersum_genus1(a: &ClosedInvariant, b: &ClosedInvariant, trunc: usize) -> Result<ClosedInvariant> {
    if a.genus != 1 {
        return Err(Error::GenusMismatch(a.genus, 1));
    }
    if b.genus != 1 {
        return Err(Error::GenusMismatch(b.genus, 1));
    }
    let (e, s) = sum_topology(a.euler, a.signature, b.euler, b.signature, 1);
    let mut out = ClosedInvariant::new(1, e, s)?;
    let sq = t_minus_one_squared();
    for c1 in &a.classes {
        for c2 in &b.classes {
            let token = patch(c1, c2)?;
            for ea in a.entries.iter().filter(|x| x.token == c1.label) {
                if ea.alpha.u != 0 || ea.alpha.sigma != Mono::EMPTY {
                    continue;
                }
                for eb in b.entries.iter().filter(|x| x.token == c2.label) {
                    if eb.alpha.u != 0 || eb.alpha.sigma != Mono::EMPTY {
                        continue;
                    }
                    let v = sq.checked_mul(&ea.series.checked_mul(&eb.series)?)?;
                    if v.is_zero() {
                        continue;
                    }
                    ensure_class(&mut out, &token)?;
                    let mut ext = ea.alpha.ext.clone();
                    ext.extend(eb.alpha.ext.iter().cloned());
                    out.add_entry(&token.label, AMonomial { u: 0, sigma: Mono::EMPTY, ext }, v)?;
                }
            }
        }
    }
    Ok(out.normalized(trunc))
}

/// Standard symplectic matrix `Ω` with `ω(e_{2i-1}, e_{2i}) = 1`.
pub fn omega_matrix(g: usize) -> Vec<Vec<i64>> {
    let n = 2 * g;
    let mut m = vec![vec![0; n]; n];
    for i in 0..g {
        m[2 * i][2 * i + 1] = 1;
        m[2 * i + 1][2 * i] = -1;
    }
    m
}

pub fn identity_matrix(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

fn matmul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let (n, m, p) = (a.len(), b.len(), b.first().map_or(0, Vec::len));
    (0..n).map(|i| (0..p).map(|j| (0..m).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

fn transpose(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.first().map_or(0, Vec::len);
    (0..n).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// Inverse of a symplectic matrix, `-Ω fᵀ Ω`; errors unless `fᵀ Ω f = Ω`.
pub fn symplectic_inverse(f: &[Vec<i64>], g: usize) -> Result<Vec<Vec<i64>>> {
    let n = 2 * g;
    if f.len() != n || f.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument(format!("gluing matrix must be {n}x{n}")));
    }
    if f.iter().flatten().any(|x| x.abs() > 1 << 20) {
        return Err(Error::InvalidArgument("gluing matrix entries too large".into()));
    }
    let om = omega_matrix(g);
    if matmul(&matmul(&transpose(f), &om), f) != om {
        return Err(Error::NotSymplectic);
    }
    let inv: Vec<Vec<i64>> =
        matmul(&matmul(&om, &transpose(f)), &om).into_iter().map(|r| r.into_iter().map(|x| -x).collect()).collect();
    Ok(inv)
}

/// Image of `α` under the map induced on `Λ*H₁(Σ) ⊗ Z[U]` by the matrix `m` (columns are images).
pub fn induced_map(alpha: &AElem, m: &[Vec<i64>]) -> Result<AElem> {
    let g = alpha.genus();
    let mut out = AElem::zero(g);
    for (s, p, c) in alpha.terms() {
        let mut acc = ExtElem::one(g);
        for j in s.indices() {
            let v = ExtElem::from_terms(g, (1..=2 * g).map(|r| (Mono::single(r), m[r - 1][j - 1])));
            acc = wedge(&acc, &v)?;
        }
        for (mono, x) in acc.terms() {
            out.add_term(mono, p, c * x);
        }
    }
    Ok(out)
}

/// `Σ c · (-1)^{|E||S|} · table[(p + shift, S)]` over the terms `c e_S U^p` of `alpha`.
fn evaluate(
    alpha: &AElem,
    table: &HashMap<(u32, Mono), LaurentSeries>,
    ext_len: usize,
    shift: u32,
) -> Result<LaurentSeries> {
    let mut out = LaurentSeries::zero();
    for (s, p, c) in alpha.terms() {
        if let Some(v) = table.get(&(p + shift, s)) {
            let sign = if (ext_len * s.degree()) % 2 == 1 { -c } else { c };
            out = out.checked_add(&v.scale_i64(sign))?;
        }
    }
    Ok(out)
}

/// Sum along genus-`g` surfaces glued by the symplectic matrix `f`.
pub fn fibersum_genusg(
    a: &ClosedInvariant,
    b: &ClosedInvariant,
    f: &[Vec<i64>],
    trunc: usize,
) -> Result<ClosedInvariant> {
    if a.genus != b.genus {
        return Err(Error::GenusMismatch(a.genus, b.genus));
    }
    let g = a.genus;
    if g < 2 {
        return Err(Error::InvalidArgument("genus-one sums use the torus formula".into()));
    }
    check_spinc(g, 0)?;
    let finv = symplectic_inverse(f, g)?;
    let (e, s) = sum_topology(a.euler, a.signature, b.euler, b.signature, g);
    let mut out = ClosedInvariant::new(g, e, s)?;
    let gk = g as i64 - 1;
    for k in -gk..=gk {
        let pairs: Vec<(&ClassToken, &ClassToken)> = a
            .classes
            .iter()
            .filter(|c| c.k == k)
            .flat_map(|c1| b.classes.iter().filter(|c| c.k == k).map(move |c2| (c1, c2)))
            .collect();
        if pairs.is_empty() {
            continue;
        }
        let db = DualBasis::new(g, k)?;
        let mut kernel: Option<Kernel> = None;
        let mut units: HashMap<usize, LaurentSeries> = HashMap::new();
        let mut images: HashMap<usize, AElem> = HashMap::new();
        for (c1, c2) in pairs {
            let token = patch(c1, c2)?;
            let ga = a.groups(&c1.label);
            let gb = b.groups(&c2.label);
            for (e1, ta) in &ga {
                let deg_a: BTreeSet<usize> = ta.keys().map(|(u, m)| 2 * *u as usize + m.degree()).collect();
                for (e2, tb) in &gb {
                    let deg_b: BTreeSet<usize> = tb.keys().map(|(u, m)| 2 * *u as usize + m.degree()).collect();
                    let max_u = tb.keys().map(|(u, _)| *u).max().unwrap_or(0);
                    for a2 in 0..=max_u {
                        let mut total = LaurentSeries::zero();
                        for i in 0..db.len() {
                            if !deg_a.contains(&db.degree(i)) || !deg_b.contains(&(2 * a2 as usize + db.dual_degree(i)))
                            {
                                continue;
                            }
                            let av = evaluate(db.kron(i)?, ta, e1.len(), 0)?;
                            if av.is_zero() {
                                continue;
                            }
                            if let std::collections::hash_map::Entry::Vacant(e) = images.entry(i) {
                                e.insert(induced_map(db.kron_poin(i)?, &finv)?);
                            }
                            let bv = evaluate(&images[&i], tb, e2.len(), a2)?;
                            if bv.is_zero() {
                                continue;
                            }
                            if let std::collections::hash_map::Entry::Vacant(e) = units.entry(i) {
                                if kernel.is_none() {
                                    kernel = Some(Kernel::new(g, k, trunc)?);
                                }
                                e.insert(db.unit(i, kernel.as_ref().expect("built above"))?);
                            }
                            total = total.checked_add(&av.checked_mul(&bv)?.checked_mul(&units[&i])?)?;
                        }
                        if total.is_zero() {
                            continue;
                        }
                        ensure_class(&mut out, &token)?;
                        let mut ext = e1.clone();
                        ext.extend(e2.iter().cloned());
                        out.add_entry(&token.label, AMonomial { u: a2, sigma: Mono::EMPTY, ext }, total)?;
                    }
                }
            }
        }
    }
    Ok(out.normalized(trunc))
}

/// Dispatches on genus with the identity gluing map.
pub fn fibersum(
    a: &ClosedInvariant,
    b: &ClosedInvariant,
    f: Option<&[Vec<i64>]>,
    trunc: usize,
) -> Result<ClosedInvariant> {
    if a.genus != b.genus {
        return Err(Error::GenusMismatch(a.genus, b.genus));
    }
    if a.genus == 1 {
        if let Some(f) = f {
            symplectic_inverse(f, 1)?;
        }
        return fibersum_genus1(a, b, trunc);
    }
    let id = identity_matrix(2 * a.genus);
    fibersum_genusg(a, b, f.unwrap_or(&id), trunc)
}

/// Entries violating simple type, and entries meeting the ideal generated by `U` and `H₁(Σ)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimpleTypeReport {
    pub nonzero_degree: Vec<(String, AMonomial)>,
    pub in_surface_ideal: Vec<(String, AMonomial)>,
}

impl SimpleTypeReport {
    pub fn is_simple_type(&self) -> bool {
        self.nonzero_degree.is_empty()
    }

    pub fn is_surface_simple_type(&self) -> bool {
        self.in_surface_ideal.is_empty()
    }
}

pub fn simple_type_check(a: &ClosedInvariant) -> SimpleTypeReport {
    let mut r = SimpleTypeReport::default();
    for e in &a.entries {
        if e.alpha.degree() != 0 {
            r.nonzero_degree.push((e.token.clone(), e.alpha.clone()));
        }
        if e.alpha.u > 0 || e.alpha.sigma != Mono::EMPTY {
            r.in_surface_ideal.push((e.token.clone(), e.alpha.clone()));
        }
    }
    r
}

/// True iff every entry with a `U` or `H₁(Σ)` factor vanishes.
pub fn torus_ideal_vanishing(a: &ClosedInvariant) -> bool {
    a.entries.iter().all(|e| (e.alpha.u == 0 && e.alpha.sigma == Mono::EMPTY) || e.series.is_zero())
}

/// Entries whose degree differs from `d(𝔰)`, the class square moving by `8k` per power of `t`
/// above the lowest.
pub fn degree_violations(a: &ClosedInvariant) -> Vec<(String, AMonomial, i64)> {
    let mut out = Vec::new();
    for e in &a.entries {
        let Some(c) = a.class(&e.token) else { continue };
        let v = e.series.valuation().unwrap_or(0);
        for (m, _) in e.series.terms() {
            let d = d_invariant(c.sq + 8 * c.k * (m - v), a.signature, a.euler);
            if d != Rational64::from_integer(e.alpha.degree() as i64) {
                out.push((e.token.clone(), e.alpha.clone(), m));
            }
        }
    }
    out
}

/// Rewrites a series in `T = t^{1/2}` centred at `T⁰`, highest coefficient positive.
pub fn chern_poly(s: &LaurentSeries) -> Result<LaurentSeries> {
    let (Some(v), Some(m)) = (s.valuation(), s.degree()) else {
        return Ok(LaurentSeries::zero());
    };
    // A truncated series needs a known zero past its last term to be read as a polynomial.
    if let Some(w) = s.window() {
        let fits = match w.dir {
            Completion::Up => m + 1 < w.hi(),
            Completion::Down => v > w.lo,
        };
        if !fits {
            return Err(Error::Asymmetric);
        }
    }
    let c = |e: i64| s.coeff(e);
    let sym = (0..=m - v).all(|i| c(v + i) == c(m - i));
    let anti = (0..=m - v).all(|i| c(v + i) == -c(m - i));
    if !sym && !anti {
        return Err(Error::Asymmetric);
    }
    let out = LaurentSeries::from_terms(s.terms().map(|(e, x)| (2 * e - (v + m), x.clone())));
    if c(m).is_negative() {
        Ok(-out)
    } else {
        Ok(out)
    }
}

/// `(T - T⁻¹)^n` expanded.
pub fn t_minus_t_inverse_power(n: u32) -> LaurentSeries {
    let base = LaurentSeries::from_terms([(-1, -1), (1, 1)]);
    (0..n).fold(LaurentSeries::one(), |acc, _| &acc * &base)
}

/// One line per entry: token, monomial and the symmetrized polynomial in `T`.
pub fn chern_display(a: &ClosedInvariant) -> Result<String> {
    let mut lines = Vec::new();
    for e in &a.entries {
        let p = chern_poly(&e.series)?;
        lines.push(format!("{} {}: {}", e.token, e.alpha, p.pretty("T")));
    }
    if lines.is_empty() {
        lines.push("0".into());
    }
    Ok(lines.join("\n"))
}

/// Binomial coefficient as a big integer.
pub fn big_binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    (0..k).fold(BigInt::from(1), |acc, i| acc * (n - i) / (i + 1))
}

/// The same data as a map from `(token, alpha)` to series, for order-insensitive comparison.
pub fn entry_map(a: &ClosedInvariant) -> BTreeMap<(String, AMonomial), LaurentSeries> {
    a.entries.iter().map(|e| ((e.token.clone(), e.alpha.clone()), e.series.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demos::e1_invariant;
    use crate::groupring::{eq_up_to_unit, DEFAULT_TRUNC};
    use proptest::prelude::*;

    fn constant(
        inv_g: usize,
        e: i64,
        s: i64,
        entries: &[(&str, i64, i64, AMonomial, LaurentSeries)],
    ) -> ClosedInvariant {
        let mut inv = ClosedInvariant::new(inv_g, e, s).unwrap();
        for (label, k, sq, alpha, v) in entries {
            inv.add_class(ClassToken::new(*label, *k, *sq)).unwrap();
            inv.add_entry(label, alpha.clone(), v.clone()).unwrap();
        }
        inv
    }

    fn poly(t: &[(i64, i64)]) -> LaurentSeries {
        LaurentSeries::from_terms(t.iter().copied())
    }

    #[test]
    fn d_invariant_examples() {
        assert_eq!(d_invariant(0, -16, 24), Rational64::from_integer(0));
        assert_eq!(d_invariant(0, 0, 4), Rational64::from_integer(-2));
        assert_eq!(d_invariant(4, 0, 4) - d_invariant(0, 0, 4), Rational64::from_integer(1));
        assert_eq!(d_invariant(1, 0, 0), Rational64::new(1, 4));
    }

    #[test]
    fn topology_of_sums() {
        assert_eq!(sum_topology(12, -8, 12, -8, 1), (24, -16));
        assert_eq!(sum_topology(3, 1, 5, 2, 2), (12, 3));
    }

    #[test]
    fn patching_tokens() {
        let a = ClassToken::new("a", 2, 3);
        let b = ClassToken::new("b", 2, 5);
        let ab = patch(&a, &b).unwrap();
        assert_eq!((ab.label.as_str(), ab.k, ab.sq), ("a#b", 2, 24));
        let ba = patch(&b, &a).unwrap();
        assert_eq!((ba.k, ba.sq), (ab.k, ab.sq));
        assert_eq!(patch(&a, &ClassToken::new("c", -2, 0)).unwrap_err(), Error::IncompatibleK(2, -2));
        let z = patch(&ClassToken::new("x", 0, 0), &ClassToken::new("y", 0, 0)).unwrap();
        assert_eq!(z.sq, 0);
    }

    #[test]
    fn adjunction_is_enforced() {
        let mut inv = ClosedInvariant::new(2, 0, 0).unwrap();
        assert_eq!(inv.add_class(ClassToken::new("K", 2, 0)).unwrap_err(), Error::SpincOutOfRange { g: 2, k: 2 });
        inv.add_class(ClassToken::new("K", 1, 0)).unwrap();
        assert!(inv.add_class(ClassToken::new("K", 1, 4)).is_err());
        assert!(inv.add_entry("L", AMonomial::one(), LaurentSeries::one()).is_err());
    }

    #[test]
    fn torus_sums() {
        let e1 = e1_invariant(DEFAULT_TRUNC);
        let e2 = fibersum_genus1(&e1, &e1, DEFAULT_TRUNC).unwrap();
        assert!(eq_up_to_unit(&e2.entries()[0].series, &LaurentSeries::one()));
        let e3 = fibersum_genus1(&e2, &e1, DEFAULT_TRUNC).unwrap();
        assert!(eq_up_to_unit(&e3.entries()[0].series, &poly(&[(0, -1), (1, 1)])));
        let zero = ClosedInvariant::new(1, 12, -8).unwrap();
        assert!(fibersum_genus1(&zero, &e1, DEFAULT_TRUNC).unwrap().is_zero());
        let g2 = ClosedInvariant::new(2, 0, 0).unwrap();
        assert_eq!(fibersum_genus1(&g2, &e1, 8).unwrap_err(), Error::GenusMismatch(2, 1));
    }

    #[test]
    fn torus_sum_drops_surface_ideal_and_keeps_external_classes() {
        let a = constant(1, 12, -8, &[("K", 0, 0, AMonomial { u: 1, ..AMonomial::one() }, LaurentSeries::one())]);
        let e1 = e1_invariant(8);
        assert!(fibersum_genus1(&a, &e1, 8).unwrap().is_zero());
        let x = AMonomial { ext: vec!["x".into()], ..AMonomial::one() };
        let b = constant(1, 0, 0, &[("L", 0, 0, x.clone(), poly(&[(0, 1)]))]);
        let out = fibersum_genus1(&e1, &b, 8).unwrap();
        assert_eq!(out.entries()[0].alpha, x);
        assert!(torus_ideal_vanishing(&out));
    }

    #[test]
    fn simple_type_reports() {
        let u = AMonomial { u: 1, ..AMonomial::one() };
        let inv = constant(2, 0, 0, &[("K", 0, 0, u.clone(), LaurentSeries::one())]);
        let r = simple_type_check(&inv);
        assert!(!r.is_simple_type() && !r.is_surface_simple_type());
        assert_eq!(r.nonzero_degree, vec![("K".to_string(), u)]);
        assert!(!torus_ideal_vanishing(&inv));
        let empty = ClosedInvariant::new(1, 0, 0).unwrap();
        assert!(simple_type_check(&empty).is_simple_type());
        assert!(torus_ideal_vanishing(&empty));
    }

    #[test]
    fn chern_rendering() {
        assert_eq!(chern_poly(&LaurentSeries::one()).unwrap(), LaurentSeries::one());
        assert_eq!(chern_poly(&poly(&[(0, -1), (1, 1)])).unwrap(), poly(&[(-1, -1), (1, 1)]));
        assert_eq!(chern_poly(&poly(&[(3, 1), (4, -1)])).unwrap(), poly(&[(-1, -1), (1, 1)]));
        assert_eq!(chern_poly(&poly(&[(0, 1), (1, -2), (2, 1)])).unwrap(), poly(&[(-2, 1), (0, -2), (2, 1)]));
        assert_eq!(chern_poly(&poly(&[(0, 1), (1, 2)])).unwrap_err(), Error::Asymmetric);
        assert_eq!(chern_poly(&crate::pairing::rel_inv_torus_disk(4)).unwrap_err(), Error::Asymmetric);
        assert_eq!(t_minus_t_inverse_power(2), poly(&[(-2, 1), (0, -2), (2, 1)]));
    }

    #[test]
    fn symplectic_matrices() {
        let f = vec![vec![0, 0, 1, 0], vec![0, 0, 0, 1], vec![1, 0, 0, 0], vec![0, 1, 0, 0]];
        assert_eq!(symplectic_inverse(&f, 2).unwrap(), f);
        let shear = vec![vec![1, 1], vec![0, 1]];
        assert_eq!(symplectic_inverse(&shear, 1).unwrap(), vec![vec![1, -1], vec![0, 1]]);
        let bad = vec![vec![2, 0], vec![0, 1]];
        assert_eq!(symplectic_inverse(&bad, 1).unwrap_err(), Error::NotSymplectic);
        let a = AElem::monomial(2, Mono::from_indices(&[1, 2]).unwrap(), 1, 3);
        let img = induced_map(&a, &f).unwrap();
        assert_eq!(img, AElem::monomial(2, Mono::from_indices(&[3, 4]).unwrap(), 1, 3));
    }

    #[test]
    fn genus_sum_of_simple_type_inputs_vanishes_below_extreme_k() {
        let a = constant(
            3,
            0,
            0,
            &[("A", 0, 0, AMonomial::one(), LaurentSeries::one()), ("B", 1, 0, AMonomial::one(), LaurentSeries::one())],
        );
        let out = fibersum_genusg(&a, &a, &identity_matrix(6), 8).unwrap();
        assert!(out.is_zero());
        let c = ClosedInvariant::new(2, 0, 0).unwrap();
        assert_eq!(fibersum_genusg(&a, &c, &identity_matrix(6), 8).unwrap_err(), Error::GenusMismatch(3, 2));
        let bad = vec![vec![2; 6]; 6];
        assert_eq!(fibersum_genusg(&a, &a, &bad, 8).unwrap_err(), Error::NotSymplectic);
    }

    #[test]
    fn genus_sum_pairs_bottom_with_top() {
        let u = AMonomial { u: 1, ..AMonomial::one() };
        let a = constant(2, 4, 0, &[("A", 0, -4, AMonomial::one(), poly(&[(0, 2)]))]);
        let b = constant(2, 4, 0, &[("B", 0, -4, u, poly(&[(0, 3), (1, 1)]))]);
        let out = fibersum_genusg(&a, &b, &identity_matrix(4), 8).unwrap();
        assert_eq!(out.entries().len(), 1);
        let e = &out.entries()[0];
        assert_eq!((e.token.as_str(), &e.alpha), ("A#B", &AMonomial::one()));
        assert!(eq_up_to_unit(&e.series, &poly(&[(0, 6), (1, 2)])));
        let swap = vec![vec![0, 0, 1, 0], vec![0, 0, 0, 1], vec![1, 0, 0, 0], vec![0, 1, 0, 0]];
        assert_eq!(fibersum_genusg(&a, &b, &swap, 8).unwrap(), out);
        assert_eq!((out.euler, out.signature), (12, 0));
    }

    #[test]
    fn genus_sum_uses_surface_classes_of_the_dual_family() {
        // At d = 1 the degree-one pieces pair through β̃ = e_i and β̃° = ±e_j.
        let db = DualBasis::new(2, 0).unwrap();
        let e1 = db.index_of(&crate::plane::Slot::new(Mono::single(1), 0)).unwrap();
        let dual = induced_map(db.kron_poin(e1).unwrap(), &identity_matrix(4)).unwrap();
        let (s, p, c) = dual.terms().next().unwrap();
        assert_eq!((dual.terms().count(), s.degree(), p), (1, 1, 0));
        let alpha_a = AMonomial { sigma: Mono::single(1), ..AMonomial::one() };
        let alpha_b = AMonomial { sigma: s, ..AMonomial::one() };
        let a = constant(2, 4, 0, &[("A", 0, -4, alpha_a, LaurentSeries::one())]);
        let b = constant(2, 4, 0, &[("B", 0, -4, alpha_b, LaurentSeries::one())]);
        let out = fibersum_genusg(&a, &b, &identity_matrix(4), 8).unwrap();
        assert_eq!(out.entries().len(), 1);
        assert_eq!(out.entries()[0].series.coeff(0).abs(), BigInt::from(c.abs()));
    }

    fn genus1_strategy() -> impl Strategy<Value = ClosedInvariant> {
        proptest::collection::vec(
            ((0usize..3), proptest::collection::vec((0i64..4, -3i64..=3), 1..4), any::<bool>()),
            0..4,
        )
        .prop_map(|v| {
            let mut inv = ClosedInvariant::new(1, 12, -8).unwrap();
            for (label, terms, windowed) in v {
                let name = format!("C{label}");
                inv.add_class(ClassToken::new(name.clone(), 0, 0)).unwrap();
                let mut s = LaurentSeries::from_terms(terms);
                if windowed && !s.is_zero() {
                    s = s.windowed(8);
                }
                inv.add_entry(&name, AMonomial::one(), s).unwrap();
            }
            inv
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn torus_sum_is_symmetric(a in genus1_strategy(), b in genus1_strategy()) {
            let ab = fibersum_genus1(&a, &b, 8).unwrap();
            let ba = fibersum_genus1(&b, &a, 8).unwrap();
            prop_assert_eq!(ab.entries().len(), ba.entries().len());
            for e in ab.entries() {
                let (l, r) = e.token.split_once('#').unwrap();
                let swapped = format!("{r}#{l}");
                prop_assert!(eq_up_to_unit(&e.series, &ba.get(&swapped, &e.alpha)));
            }
            prop_assert!(torus_ideal_vanishing(&ab));
            prop_assert!(simple_type_check(&ab).is_simple_type());
            prop_assert!(degree_violations(&ab).is_empty());
        }

        #[test]
        fn normalization_is_idempotent(a in genus1_strategy()) {
            let once = a.normalized(6);
            prop_assert_eq!(once.normalized(6), once);
        }
    }
}
