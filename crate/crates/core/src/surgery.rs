//! The map `J`, the surgery maps `F₀`, `F₁`, the twisted map `F = F₀ + tF₁`,
//! its kernel `X(g, d) ⊗ Λ` under the non-standard embedding, and the
//! corrected `H₁`-action on it.

use crate::error::{Error, Result};
use crate::extalg::{angle_mono, degree_one_terms, omega_power_monos, star_mono, ExtElem, Mono};
use crate::groupring::LaurentSeries;
use crate::plane::{project, standard_action_basis, u_act, xgd_basis, Coeff, PlaneElem, Region, Slot};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

/// Largest genus accepted by the kernel and pairing routines.
pub const GENUS_CAP: usize = 6;

/// Precomputed `J` on every monomial of `Λ*`, without the `U`-power bookkeeping.
#[derive(Debug)]
pub struct JTable {
    g: usize,
    rows: Vec<Vec<(Mono, i64, i64)>>,
}

impl JTable {
    fn build(g: usize) -> Self {
        let sign = if (g - 1).is_multiple_of(2) { 1 } else { -1 };
        let omegas: Vec<Vec<Mono>> = (0..=g).map(|n| omega_power_monos(g, n)).collect();
        let rows = (0u32..(1u32 << (2 * g)))
            .map(|bits| {
                let (st, s) = star_mono(Mono::from_bits(bits), g);
                let mut acc: BTreeMap<(i64, Mono), i64> = BTreeMap::new();
                for (n, ws) in omegas.iter().enumerate() {
                    for w in ws {
                        if let Some((m, c)) = angle_mono(*w, st) {
                            *acc.entry((n as i64, m)).or_insert(0) += sign * s * c * (1i64 << n);
                        }
                    }
                }
                acc.into_iter().filter(|(_, c)| *c != 0).map(|((n, m), c)| (m, n, c)).collect()
            })
            .collect();
        JTable { g, rows }
    }

    /// Shared table for genus `g`.
    pub fn for_genus(g: usize) -> Arc<JTable> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<JTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("J table cache poisoned");
        guard.entry(g).or_insert_with(|| Arc::new(JTable::build(g))).clone()
    }

    /// `J` on an element supported in `H{i ≥ 0}`.
    pub fn apply<C: Coeff>(&self, x: &PlaneElem<C>) -> Result<PlaneElem<C>> {
        if x.genus() != self.g {
            return Err(Error::GenusMismatch(x.genus(), self.g));
        }
        let g = self.g as i64;
        let mut out = PlaneElem::zero(self.g);
        for (s, c) in x.terms() {
            let (i, j) = s.position(self.g);
            if i < 0 {
                return Err(Error::OutsideRegion(i, j));
            }
            let k = s.mono.degree() as i64;
            for &(m, n, coef) in &self.rows[s.mono.bits() as usize] {
                let ell = g + s.ell - k - n;
                if m.degree() as i64 - g - ell >= 0 {
                    out.add_term(Slot::new(m, ell), c.scaled(coef));
                }
            }
        }
        Ok(out)
    }
}

fn check_genus(g: usize) -> Result<()> {
    if g == 0 || g > GENUS_CAP {
        return Err(Error::GenusOutOfRange(g, GENUS_CAP));
    }
    Ok(())
}

/// Checks `1 ≤ g ≤ GENUS_CAP` and `|k| ≤ g - 1`.
pub fn check_spinc(g: usize, k: i64) -> Result<()> {
    check_genus(g)?;
    if k.unsigned_abs() as usize >= g {
        return Err(Error::SpincOutOfRange { g, k });
    }
    Ok(())
}

/// `J(x) = π_{j≥0} (±) exp(2ωU) ∠ star(x)`.
pub fn j_map<C: Coeff>(x: &PlaneElem<C>) -> Result<PlaneElem<C>> {
    check_genus(x.genus())?;
    JTable::for_genus(x.genus()).apply(x)
}

/// `π_k`: projection onto `H{i ≥ 0 and j ≥ k}`.
pub fn pi_k<C: Coeff>(x: &PlaneElem<C>, k: i64) -> PlaneElem<C> {
    project(x, &Region::quadrant(k))
}

fn require_i_nonneg<C: Coeff>(x: &PlaneElem<C>) -> Result<()> {
    for (s, _) in x.terms() {
        let (i, j) = s.position(x.genus());
        if i < 0 {
            return Err(Error::OutsideRegion(i, j));
        }
    }
    Ok(())
}

/// The pair `(F₀(x), F₁(x))`. For `k ≤ 0` this is `(π_k x, π_k U^{|k|} J x)`;
/// for `k > 0` the two maps are exchanged and `π_{-k}` is used.
pub fn f0_f1<C: Coeff>(x: &PlaneElem<C>, k: i64) -> Result<(PlaneElem<C>, PlaneElem<C>)> {
    require_i_nonneg(x)?;
    let a = k.abs();
    let plain = pi_k(x, -a);
    let twisted = pi_k(&u_act(&j_map(x)?, a), -a);
    Ok(if k <= 0 { (plain, twisted) } else { (twisted, plain) })
}

/// `F(x) = F₀(x) + t F₁(x)`.
pub fn twisted_f(x: &PlaneElem<LaurentSeries>, k: i64) -> Result<PlaneElem<LaurentSeries>> {
    let (f0, f1) = f0_f1(x, k)?;
    Ok(f0.add(&f1.map_coeffs(|c| c.shift(1))))
}

/// `¼(1 - (2k - (2ℓ - 1)n)² / n)`.
pub fn degree_shift(ell: i64, k: i64, n: i64) -> Result<BigRational> {
    if n <= 0 {
        return Err(Error::InvalidArgument(format!("n must be positive, got {n}")));
    }
    let n = BigInt::from(n);
    let q = BigInt::from(2 * k) - (BigInt::from(2 * ell) - 1) * &n;
    let frac = BigRational::new(&q * &q, n);
    Ok((BigRational::one() - frac) / BigRational::from_integer(BigInt::from(4)))
}

/// Element of `X(g, d) ⊗ Λ` in the monomial basis of the standard embedding.
#[derive(Clone, PartialEq, Debug)]
pub struct XgdElem {
    g: usize,
    k: i64,
    d: usize,
    coeffs: BTreeMap<Slot, LaurentSeries>,
}

impl XgdElem {
    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn coeff(&self, slot: &Slot) -> LaurentSeries {
        self.coeffs.get(slot).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Slot, &LaurentSeries)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Plane grading of a basis slot.
    pub fn height(&self, slot: &Slot) -> i64 {
        slot.grading(self.g)
    }

    fn add_term(&mut self, slot: Slot, c: LaurentSeries) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&slot) {
            Some(x) => {
                *x = &*x + &c;
                if x.is_zero() {
                    self.coeffs.remove(&slot);
                }
            }
            None => {
                self.coeffs.insert(slot, c);
            }
        }
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if (self.g, self.d) != (other.g, other.d) {
            return Err(Error::InvalidArgument(format!(
                "X({},{}) and X({},{}) differ",
                self.g, self.d, other.g, other.d
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let mut out = self.clone();
        for (s, c) in &other.coeffs {
            out.add_term(*s, c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &LaurentSeries) -> Self {
        let mut out = XgdElem { coeffs: BTreeMap::new(), ..self.clone() };
        for (s, x) in &self.coeffs {
            out.add_term(*s, x * c);
        }
        out
    }

    /// Applies `f` to every coefficient series.
    pub fn map_series(&self, f: impl Fn(&LaurentSeries) -> LaurentSeries) -> Self {
        let mut out = XgdElem { coeffs: BTreeMap::new(), ..self.clone() };
        for (s, x) in &self.coeffs {
            out.add_term(*s, f(x));
        }
        out
    }
}

impl fmt::Display for XgdElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(|(s, c)| format!("({c})·{s}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Coefficient of the bottom generator `1 ⊗ U⁰`.
pub fn lowest_height_projection(x: &XgdElem) -> LaurentSeries {
    x.coeff(&Slot::new(Mono::EMPTY, 0))
}

/// Kernel of `F` for one spin^c structure, with its embedding and action data.
#[derive(Debug)]
pub struct Kernel {
    g: usize,
    k: i64,
    d: usize,
    trunc: usize,
    basis: Vec<Slot>,
    index: HashMap<Slot, usize>,
    embeddings: Vec<PlaneElem<LaurentSeries>>,
    gen_actions: Vec<Vec<OnceLock<XgdElem>>>,
    u_actions: Vec<OnceLock<XgdElem>>,
}

/// Kernel basis of `F` for `|k| ≤ g - 1`, one element per monomial of `X(g, d)`.
pub fn kernel_basis(g: usize, k: i64, trunc: usize) -> Result<Kernel> {
    Kernel::new(g, k, trunc)
}

impl Kernel {
    pub fn new(g: usize, k: i64, trunc: usize) -> Result<Self> {
        check_spinc(g, k)?;
        if trunc == 0 {
            return Err(Error::InvalidArgument("truncation length must be positive".into()));
        }
        let a = k.abs();
        let d = g - 1 - a as usize;
        let basis = xgd_basis(g, d);
        let index = basis.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let jt = JTable::for_genus(g);
        let cap = if k == 0 { trunc } else { 4 * g + 4 };
        let mut embeddings = Vec::with_capacity(basis.len());
        for b in &basis {
            let mut layers: Vec<PlaneElem<BigInt>> = vec![PlaneElem::single(g, *b, BigInt::one())];
            loop {
                let next = pi_k(&u_act(&jt.apply(layers.last().unwrap())?, a), -a).scale(-1);
                if next.is_zero() {
                    break;
                }
                if layers.len() >= cap {
                    if k == 0 {
                        break;
                    }
                    return Err(Error::Internal(format!("correction series for k={k} did not terminate")));
                }
                layers.push(next);
            }
            let mut per_slot: BTreeMap<Slot, Vec<(i64, BigInt)>> = BTreeMap::new();
            for (m, layer) in layers.iter().enumerate() {
                let e = if k > 0 { -(m as i64) } else { m as i64 };
                for (s, c) in layer.terms() {
                    per_slot.entry(*s).or_default().push((e, c.clone()));
                }
            }
            let emb = PlaneElem::from_terms(
                g,
                per_slot.into_iter().map(|(s, cs)| {
                    let series = LaurentSeries::from_terms(cs);
                    let series =
                        if k == 0 { series.with_window(0, trunc).expect("nonnegative exponents") } else { series };
                    (s, series)
                }),
            );
            embeddings.push(emb);
        }
        let n = basis.len();
        Ok(Kernel {
            g,
            k,
            d,
            trunc,
            basis,
            index,
            embeddings,
            gen_actions: (0..2 * g).map(|_| (0..n).map(|_| OnceLock::new()).collect()).collect(),
            u_actions: (0..n).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Slot] {
        &self.basis
    }

    pub fn index_of(&self, slot: &Slot) -> Option<usize> {
        self.index.get(slot).copied()
    }

    /// The unit of the coefficient ring: windowed for `k = 0`, exact otherwise.
    pub fn unit(&self) -> LaurentSeries {
        if self.k == 0 {
            LaurentSeries::one().windowed(self.trunc)
        } else {
            LaurentSeries::one()
        }
    }

    pub fn zero(&self) -> XgdElem {
        XgdElem { g: self.g, k: self.k, d: self.d, coeffs: BTreeMap::new() }
    }

    pub fn basis_vector(&self, i: usize) -> XgdElem {
        let mut out = self.zero();
        out.add_term(self.basis[i], self.unit());
        out
    }

    /// Every basis element as an element of `X(g, d) ⊗ Λ`.
    pub fn elements(&self) -> Vec<XgdElem> {
        (0..self.rank()).map(|i| self.basis_vector(i)).collect()
    }

    /// Bottom generator `1 ⊗ U⁰`.
    pub fn bottom(&self) -> XgdElem {
        self.basis_vector(self.index[&Slot::new(Mono::EMPTY, 0)])
    }

    /// Top generator `Ξ = 1 ⊗ U^{-d}`.
    pub fn top(&self) -> XgdElem {
        self.basis_vector(self.index[&Slot::new(Mono::EMPTY, -(self.d as i64))])
    }

    /// Plane image of the `i`-th basis element under the non-standard embedding.
    pub fn embedding(&self, i: usize) -> &PlaneElem<LaurentSeries> {
        &self.embeddings[i]
    }

    /// Builds an element from basis-slot coefficients; slots outside `X(g, d)` are rejected.
    pub fn element(&self, terms: impl IntoIterator<Item = (Slot, LaurentSeries)>) -> Result<XgdElem> {
        let mut out = self.zero();
        for (s, c) in terms {
            if !self.index.contains_key(&s) {
                let (i, j) = s.position(self.g);
                return Err(Error::OutsideRegion(i, j));
            }
            out.add_term(s, c);
        }
        Ok(out)
    }

    fn check(&self, x: &XgdElem) -> Result<()> {
        if (x.g, x.d) != (self.g, self.d) {
            return Err(Error::InvalidArgument("element belongs to a different kernel".into()));
        }
        Ok(())
    }

    pub fn embed(&self, x: &XgdElem) -> Result<PlaneElem<LaurentSeries>> {
        self.check(x)?;
        let mut out = PlaneElem::zero(self.g);
        for (s, c) in x.terms() {
            for (s2, e) in self.embeddings[self.index[s]].terms() {
                out.add_term(*s2, c * e);
            }
        }
        Ok(out)
    }

    /// Projection of a plane element onto the `X(g, d)` coordinates.
    pub fn section(&self, y: &PlaneElem<LaurentSeries>) -> XgdElem {
        let mut out = self.zero();
        for (s, c) in y.terms() {
            if self.index.contains_key(s) {
                out.add_term(*s, c.clone());
            }
        }
        out
    }

    fn gen_action(&self, a: usize, b: usize) -> &XgdElem {
        self.gen_actions[a - 1][b].get_or_init(|| self.section(&standard_action_basis(a, &self.embeddings[b])))
    }

    fn u_action_basis(&self, b: usize) -> &XgdElem {
        self.u_actions[b].get_or_init(|| {
            let shifted = project(&u_act(&self.embeddings[b], 1), &Region::i_nonneg());
            self.section(&shifted)
        })
    }

    fn linear(&self, x: &XgdElem, f: impl Fn(usize) -> XgdElem) -> XgdElem {
        let mut out = self.zero();
        for (s, c) in x.terms() {
            for (s2, c2) in f(self.index[s]).terms() {
                out.add_term(*s2, c * c2);
            }
        }
        out
    }

    /// Action of the basis class `e_a` through the non-standard embedding.
    pub fn corrected_action_basis(&self, a: usize, x: &XgdElem) -> Result<XgdElem> {
        self.check(x)?;
        if a == 0 || a > 2 * self.g {
            return Err(Error::InvalidArgument(format!("basis index {a} out of range")));
        }
        Ok(self.linear(x, |b| self.gen_action(a, b).clone()))
    }

    /// `section(γ ∩ embed(x))` for a degree-1 class `γ`.
    pub fn corrected_action(&self, gamma: &ExtElem, x: &XgdElem) -> Result<XgdElem> {
        if gamma.genus() != self.g {
            return Err(Error::GenusMismatch(gamma.genus(), self.g));
        }
        let mut out = self.zero();
        for (a, c) in degree_one_terms(gamma)? {
            let y = self.corrected_action_basis(a, x)?;
            out = out.add(&y.scale(&LaurentSeries::monomial(0, c)))?;
        }
        Ok(out)
    }

    /// `U^p` acting through the embedding.
    pub fn u_action(&self, x: &XgdElem, p: u32) -> Result<XgdElem> {
        self.check(x)?;
        let mut cur = x.clone();
        for _ in 0..p {
            cur = self.linear(&cur, |b| self.u_action_basis(b).clone());
        }
        Ok(cur)
    }

    /// The class `pt × S¹` acts trivially.
    pub fn circle_action(&self, x: &XgdElem) -> Result<XgdElem> {
        self.check(x)?;
        Ok(self.zero())
    }

    /// Action of the monomial `e_S U^p`: `U^p` first, then the factors of `S` from last to first.
    pub fn corrected_monomial_action(&self, s: Mono, p: u32, x: &XgdElem) -> Result<XgdElem> {
        let mut cur = self.u_action(x, p)?;
        for a in s.indices().into_iter().rev() {
            cur = self.corrected_action_basis(a, &cur)?;
        }
        Ok(cur)
    }

    /// Standard (uncorrected) action of `e_a` on the `X(g, d)` coordinates.
    pub fn standard_action_on(&self, a: usize, x: &XgdElem) -> Result<XgdElem> {
        self.check(x)?;
        let plane = PlaneElem::from_terms(self.g, x.terms().map(|(s, c)| (*s, c.clone())));
        Ok(self.section(&standard_action_basis(a, &plane)))
    }
}

/// `x_y = Σ (-t)^ℓ y_ℓ` with `y₀ = y` and `y_{ℓ+1} = π_{i≥0} J y_ℓ`, so that `F(x_y) = y` for `k = 0`.
pub fn surjectivity_witness(y: &PlaneElem<BigInt>, trunc: usize) -> Result<PlaneElem<LaurentSeries>> {
    let g = y.genus();
    check_genus(g)?;
    let target = Region::quadrant(0);
    for (s, _) in y.terms() {
        let (i, j) = s.position(g);
        if !target.contains(i, j) {
            return Err(Error::OutsideRegion(i, j));
        }
    }
    let jt = JTable::for_genus(g);
    let mut per_slot: BTreeMap<Slot, Vec<(i64, BigInt)>> = BTreeMap::new();
    let mut cur = y.clone();
    for ell in 0..trunc {
        if cur.is_zero() {
            break;
        }
        let sign = if ell % 2 == 0 { 1 } else { -1 };
        for (s, c) in cur.terms() {
            per_slot.entry(*s).or_default().push((ell as i64, c * sign));
        }
        cur = project(&jt.apply(&cur)?, &Region::i_nonneg());
    }
    Ok(PlaneElem::from_terms(
        g,
        per_slot
            .into_iter()
            .map(|(s, cs)| (s, LaurentSeries::from_terms(cs).with_window(0, trunc).expect("nonnegative exponents"))),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane::xgd_rank;
    use num_traits::Signed;
    use proptest::prelude::*;

    fn slot(idx: &[usize], ell: i64) -> Slot {
        Slot::new(Mono::from_indices(idx).unwrap(), ell)
    }

    fn lift(x: &PlaneElem<BigInt>, trunc: usize) -> PlaneElem<LaurentSeries> {
        x.map_coeffs(|c| LaurentSeries::monomial(0, c.clone()).with_window(0, trunc).unwrap())
    }

    #[test]
    fn j_on_small_inputs() {
        assert!(j_map(&PlaneElem::<BigInt>::zero(2)).unwrap().is_zero());
        // g = 1: the n = 1 term sits at j = -1 and is cut off.
        let one = PlaneElem::single(1, slot(&[], 0), BigInt::one());
        let got = j_map(&one).unwrap();
        assert_eq!(got, PlaneElem::single(1, slot(&[1, 2], 1), BigInt::one()));
        let bad = PlaneElem::single(1, slot(&[], 1), BigInt::one());
        assert_eq!(j_map(&bad), Err(Error::OutsideRegion(-1, -2)));
    }

    #[test]
    fn j_preserves_grading_and_lands_in_upper_half() {
        for g in 1..=3 {
            for m in Mono::subsets_up_to(g, 2 * g) {
                for ell in -2..=0 {
                    let x = PlaneElem::single(g, Slot::new(m, ell), BigInt::one());
                    let gr = Slot::new(m, ell).grading(g);
                    let y = j_map(&x).unwrap();
                    assert!(y.supported_in(&Region::j_nonneg()));
                    for (s, _) in y.terms() {
                        assert_eq!(s.grading(g), gr);
                    }
                }
            }
        }
    }

    #[test]
    fn f0_f1_structure() {
        let g = 3;
        let x = PlaneElem::from_terms(g, [(slot(&[1, 2, 3], 0), BigInt::from(2)), (slot(&[], -1), BigInt::one())]);
        let (f0, _) = f0_f1(&x, -1).unwrap();
        assert_eq!(f0, project(&x, &Region::quadrant(-1)));
        let top = PlaneElem::single(g, slot(&[], -(g as i64 - 1 - 2)), BigInt::one());
        let (_, f1) = f0_f1(&top, 2).unwrap();
        assert_eq!(f1, pi_k(&top, -2));
        for k in -2i64..=2 {
            for m in Mono::subsets_up_to(g, 2 * g) {
                for ell in -3..=0 {
                    let x = PlaneElem::single(g, Slot::new(m, ell), BigInt::one());
                    let (a, b) = f0_f1(&x, k).unwrap();
                    for (s0, _) in a.terms() {
                        for (s1, _) in b.terms() {
                            assert_eq!(s0.grading(g) - s1.grading(g), -2 * k);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn degree_shift_values() {
        let q = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
        assert_eq!(degree_shift(0, 0, 4).unwrap(), q(-3, 4));
        let diff = degree_shift(0, 2, 100).unwrap() - degree_shift(1, 2, 100).unwrap();
        assert_eq!(diff, q(-4, 1));
        assert!(degree_shift(0, 1, 50).unwrap() > degree_shift(5, 1, 50).unwrap());
        assert!(degree_shift(0, 0, 0).is_err());
    }

    #[test]
    fn kernel_sizes() {
        for g in 1..=4 {
            for k in -(g as i64 - 1)..=(g as i64 - 1) {
                let ker = kernel_basis(g, k, 6).unwrap();
                assert_eq!(ker.rank() as u128, xgd_rank(g, g - 1 - k.unsigned_abs() as usize));
            }
        }
        assert_eq!(kernel_basis(3, 2, 8).unwrap().rank(), 1);
        assert_eq!(kernel_basis(2, 0, 8).unwrap().rank(), 6);
        assert_eq!(kernel_basis(2, 2, 8).unwrap_err(), Error::SpincOutOfRange { g: 2, k: 2 });
    }

    #[test]
    fn kernel_elements_are_annihilated() {
        for g in 1..=3 {
            for k in -(g as i64 - 1)..=(g as i64 - 1) {
                let ker = kernel_basis(g, k, 8).unwrap();
                for i in 0..ker.rank() {
                    let f = twisted_f(ker.embedding(i), k).unwrap();
                    assert!(f.is_zero(), "g={g} k={k} basis {}", ker.basis()[i]);
                }
            }
        }
    }

    #[test]
    fn genus_two_k_one_has_no_tail() {
        let ker = kernel_basis(2, 1, 8).unwrap();
        assert_eq!(ker.rank(), 1);
        assert_eq!(ker.embedding(0).len(), 1);
        assert!(twisted_f(ker.embedding(0), 1).unwrap().is_zero());
    }

    #[test]
    fn embed_section_round_trip() {
        for g in 1..=3 {
            for k in -(g as i64 - 1)..=(g as i64 - 1) {
                let ker = kernel_basis(g, k, 6).unwrap();
                for (i, x) in ker.elements().iter().enumerate() {
                    let e = ker.embed(x).unwrap();
                    assert_eq!(&e, ker.embedding(i));
                    assert_eq!(&ker.section(&e), x);
                }
                assert!(ker.embed(&ker.zero()).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn no_tail_when_three_k_exceeds_g_minus_two() {
        for g in 1..=5usize {
            for k in -(g as i64 - 1)..=(g as i64 - 1) {
                if 3 * k.abs() > g as i64 - 2 && k != 0 {
                    let ker = kernel_basis(g, k, 4).unwrap();
                    for i in 0..ker.rank() {
                        assert_eq!(ker.embedding(i).len(), 1, "g={g} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn corrected_action_is_standard_at_leading_order() {
        let ker = kernel_basis(4, 0, 4).unwrap();
        for x in ker.elements() {
            for a in 1..=8 {
                let c = ker.corrected_action_basis(a, &x).unwrap();
                let s = ker.standard_action_on(a, &x).unwrap();
                let diff = c.add(&s.scale(&LaurentSeries::monomial(0, -1))).unwrap();
                for (_, series) in diff.terms() {
                    assert!(series.valuation().unwrap() >= 1);
                }
            }
        }
    }

    #[test]
    fn corrected_action_module_axioms() {
        for (g, k) in [(2, 0), (3, 0), (3, 1), (3, -1), (3, 2)] {
            let ker = kernel_basis(g, k, 6).unwrap();
            for x in ker.elements() {
                for a in 1..=2 * g {
                    let once = ker.corrected_action_basis(a, &x).unwrap();
                    assert!(ker.corrected_action_basis(a, &once).unwrap().is_zero());
                    for b in a + 1..=2 * g {
                        let ab = ker.corrected_action_basis(a, &ker.corrected_action_basis(b, &x).unwrap()).unwrap();
                        let ba = ker.corrected_action_basis(b, &once).unwrap();
                        assert!(ab.add(&ba).unwrap().is_zero(), "g={g} k={k} a={a} b={b}");
                    }
                }
            }
        }
    }

    #[test]
    fn lowest_height_reads_bottom() {
        let ker = kernel_basis(3, 0, 4).unwrap();
        assert_eq!(lowest_height_projection(&ker.bottom()), ker.unit());
        assert!(lowest_height_projection(&ker.top()).is_zero());
        let two = LaurentSeries::from_terms([(0, 2), (1, 1)]).with_window(0, 4).unwrap();
        let mixed = ker.top().add(&ker.bottom().scale(&two)).unwrap();
        assert_eq!(lowest_height_projection(&mixed), two);
    }

    #[test]
    fn circle_class_acts_trivially() {
        let ker = kernel_basis(2, 0, 4).unwrap();
        assert!(ker.circle_action(&ker.top()).unwrap().is_zero());
    }

    #[test]
    fn coefficient_growth_needs_big_integers() {
        let ker = kernel_basis(5, 0, 16).unwrap();
        let max = (0..ker.rank())
            .flat_map(|i| ker.embedding(i).terms().map(|(_, c)| c.max_abs_coeff()).collect::<Vec<_>>())
            .max()
            .unwrap();
        assert!(max.abs() > BigInt::from(i64::MAX));
    }

    fn target_strategy(g: usize) -> impl Strategy<Value = PlaneElem<BigInt>> {
        prop::collection::vec((0u32..(1u32 << (2 * g)), 0i64..3, -4i64..5), 1..6).prop_map(move |ts| {
            let x = PlaneElem::from_terms(
                g,
                ts.into_iter().map(|(b, i, c)| (Slot::new(Mono::from_bits(b), -i), BigInt::from(c))),
            );
            project(&x, &Region::quadrant(0))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn witness_hits_target((_g, y) in (1usize..=3).prop_flat_map(|g| (Just(g), target_strategy(g)))) {
            let x = surjectivity_witness(&y, 8).unwrap();
            let f = twisted_f(&x, 0).unwrap();
            prop_assert_eq!(f, lift(&y, 8));
        }
    }
}
