//! The `(i, j)` plane model of `Λ* ⊗ Z[U, U⁻¹]`.
//!
//! `Λ^k ⊗ U^ℓ` sits at `(-ℓ, k - g - ℓ)`; `U` translates by `(-1, -1)`.

use crate::error::{Error, Result};
use crate::extalg::{degree_one_terms, iota_mono, pd, wedge_single, ExtElem, Mono};
use crate::groupring::LaurentSeries;
use num_bigint::BigInt;
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;

/// Coefficient ring of a plane element.
pub trait Coeff: Clone + PartialEq + fmt::Debug + fmt::Display {
    fn is_zero(&self) -> bool;
    fn add_assign_ref(&mut self, other: &Self);
    fn scaled(&self, c: i64) -> Self;
}

impl Coeff for i64 {
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn scaled(&self, c: i64) -> Self {
        self * c
    }
}

impl Coeff for BigInt {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn scaled(&self, c: i64) -> Self {
        self * c
    }
}

impl Coeff for LaurentSeries {
    fn is_zero(&self) -> bool {
        LaurentSeries::is_zero(self)
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self = &*self + other;
    }
    fn scaled(&self, c: i64) -> Self {
        self.scale_i64(c)
    }
}

/// The summand `e_S ⊗ U^ℓ`. Ordered by `ℓ` ascending, then by `S`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Slot {
    pub ell: i64,
    pub mono: Mono,
}

impl Slot {
    pub fn new(mono: Mono, ell: i64) -> Self {
        Slot { ell, mono }
    }

    pub fn position(&self, g: usize) -> (i64, i64) {
        (-self.ell, self.mono.degree() as i64 - g as i64 - self.ell)
    }

    pub fn grading(&self, g: usize) -> i64 {
        let (i, j) = self.position(g);
        i + j
    }

    pub fn shifted(&self, n: i64) -> Self {
        Slot { ell: self.ell + n, mono: self.mono }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.ell {
            0 => write!(f, "{}", self.mono),
            l => write!(f, "{}U^{}", self.mono, l),
        }
    }
}

/// Atomic membership conditions on plane positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cond {
    IGe0,
    ILt0,
    JGe(i64),
    JLt(i64),
    /// `max(i, j - k) = 0`
    MaxEq(i64),
    /// `min(i, j - k) ≥ 0`
    MinGe(i64),
    /// `min(i, j - k) = 0`
    MinEq(i64),
}

impl Cond {
    pub fn holds(&self, i: i64, j: i64) -> bool {
        match *self {
            Cond::IGe0 => i >= 0,
            Cond::ILt0 => i < 0,
            Cond::JGe(c) => j >= c,
            Cond::JLt(c) => j < c,
            Cond::MaxEq(k) => i.max(j - k) == 0,
            Cond::MinGe(k) => i.min(j - k) >= 0,
            Cond::MinEq(k) => i.min(j - k) == 0,
        }
    }

    fn param(&self) -> i64 {
        match *self {
            Cond::IGe0 | Cond::ILt0 => 0,
            Cond::JGe(c) | Cond::JLt(c) | Cond::MaxEq(c) | Cond::MinGe(c) | Cond::MinEq(c) => c,
        }
    }
}

/// Conjunction of conditions; the empty conjunction is the whole plane.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Region {
    pub conds: Vec<Cond>,
}

impl Region {
    pub fn whole() -> Self {
        Region::default()
    }

    pub fn of(conds: &[Cond]) -> Self {
        Region { conds: conds.to_vec() }
    }

    pub fn and(&self, other: &Region) -> Self {
        let mut conds = self.conds.clone();
        conds.extend_from_slice(&other.conds);
        Region { conds }
    }

    pub fn contains(&self, i: i64, j: i64) -> bool {
        self.conds.iter().all(|c| c.holds(i, j))
    }

    /// `H{i ≥ 0}`.
    pub fn i_nonneg() -> Self {
        Region::of(&[Cond::IGe0])
    }

    /// `H{j ≥ 0}`.
    pub fn j_nonneg() -> Self {
        Region::of(&[Cond::JGe(0)])
    }

    /// `H{i ≥ 0 and j ≥ k}`, the target of `π_k`.
    pub fn quadrant(k: i64) -> Self {
        Region::of(&[Cond::IGe0, Cond::JGe(k)])
    }

    /// `X(g, d) ≅ H{i ≥ 0 and j < d + 1 - g}`.
    pub fn xgd(g: usize, d: usize) -> Self {
        Region::of(&[Cond::IGe0, Cond::JLt(d as i64 + 1 - g as i64)])
    }
}

/// Named constructor for the `X(g, d)` region.
pub fn xgd_region(g: usize, d: usize) -> Region {
    Region::xgd(g, d)
}

/// Element of `Λ* ⊗ Z[U, U⁻¹]` with coefficients in `C`.
#[derive(Clone, PartialEq, Debug)]
pub struct PlaneElem<C = BigInt> {
    g: usize,
    terms: BTreeMap<Slot, C>,
}

impl<C: Coeff> PlaneElem<C> {
    pub fn zero(g: usize) -> Self {
        PlaneElem { g, terms: BTreeMap::new() }
    }

    pub fn single(g: usize, slot: Slot, c: C) -> Self {
        let mut out = Self::zero(g);
        out.add_term(slot, c);
        out
    }

    pub fn from_terms(g: usize, terms: impl IntoIterator<Item = (Slot, C)>) -> Self {
        let mut out = Self::zero(g);
        for (s, c) in terms {
            out.add_term(s, c);
        }
        out
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn add_term(&mut self, slot: Slot, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&slot) {
            Some(x) => {
                x.add_assign_ref(&c);
                if x.is_zero() {
                    self.terms.remove(&slot);
                }
            }
            None => {
                self.terms.insert(slot, c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: i64) {
        for (s, x) in &other.terms {
            self.add_term(*s, x.scaled(c));
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, 1);
        out
    }

    pub fn scale(&self, c: i64) -> Self {
        Self::from_terms(self.g, self.terms.iter().map(|(s, x)| (*s, x.scaled(c))))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Slot, &C)> {
        self.terms.iter()
    }

    pub fn get(&self, slot: &Slot) -> Option<&C> {
        self.terms.get(slot)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> PlaneElem<D> {
        PlaneElem::from_terms(self.g, self.terms.iter().map(|(s, c)| (*s, f(c))))
    }

    pub fn position(&self, slot: &Slot) -> (i64, i64) {
        slot.position(self.g)
    }

    /// True if every term lies in `r`.
    pub fn supported_in(&self, r: &Region) -> bool {
        self.terms.keys().all(|s| {
            let (i, j) = s.position(self.g);
            r.contains(i, j)
        })
    }

    /// Debug dump: one line `S ℓ (i,j) coef` per term.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (s, c) in &self.terms {
            let (i, j) = s.position(self.g);
            out.push_str(&format!("{} {} ({},{}) {}\n", s.mono, s.ell, i, j, c));
        }
        out
    }
}

/// Zeroes every term outside `r`.
pub fn project<C: Coeff>(x: &PlaneElem<C>, r: &Region) -> PlaneElem<C> {
    PlaneElem {
        g: x.g,
        terms: x
            .terms
            .iter()
            .filter(|(s, _)| {
                let (i, j) = s.position(x.g);
                r.contains(i, j)
            })
            .map(|(s, c)| (*s, c.clone()))
            .collect(),
    }
}

/// Multiplication by `Uⁿ`.
pub fn u_act<C: Coeff>(x: &PlaneElem<C>, n: i64) -> PlaneElem<C> {
    PlaneElem { g: x.g, terms: x.terms.iter().map(|(s, c)| (s.shifted(n), c.clone())).collect() }
}

/// `e_a ∩ (α ⊗ U^ℓ) = ι_a α ⊗ U^ℓ + (PD(e_a) ∧ α) ⊗ U^{ℓ+1}`.
pub fn standard_action_basis<C: Coeff>(a: usize, x: &PlaneElem<C>) -> PlaneElem<C> {
    let mut out = PlaneElem::zero(x.g);
    let (p, ps) = pd(a);
    for (s, c) in &x.terms {
        if let Some((m, sign)) = iota_mono(a, s.mono) {
            out.add_term(Slot::new(m, s.ell), c.scaled(sign));
        }
        if let Some((m, sign)) = wedge_single(p, s.mono) {
            out.add_term(Slot::new(m, s.ell + 1), c.scaled(sign * ps));
        }
    }
    out
}

/// Standard `H₁`-action of a degree-1 class.
pub fn standard_action<C: Coeff>(gamma: &ExtElem, x: &PlaneElem<C>) -> Result<PlaneElem<C>> {
    if gamma.genus() != x.g {
        return Err(Error::GenusMismatch(gamma.genus(), x.g));
    }
    let mut out = PlaneElem::zero(x.g);
    for (a, c) in degree_one_terms(gamma)? {
        out.add_scaled(&standard_action_basis(a, x), c);
    }
    Ok(out)
}

/// Rank of a region: finite count or unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rank {
    Finite(u128),
    Infinite,
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Z-rank of a region, weighting the `Λ^k` slot at each position by `C(2g, k)`.
pub fn region_rank(r: &Region, g: usize) -> Rank {
    let bound = r.conds.iter().map(|c| c.param().abs()).max().unwrap_or(0) + 2 * g as i64 + 2;
    let occupied = |i: i64| (0..=2 * g as i64).any(|k| r.contains(i, k - g as i64 + i));
    if occupied(bound + 1) || occupied(-bound - 1) {
        return Rank::Infinite;
    }
    let mut total = 0u128;
    for i in -bound..=bound {
        for k in 0..=2 * g as u64 {
            if r.contains(i, k as i64 - g as i64 + i) {
                total += binomial(2 * g as u64, k);
            }
        }
    }
    Rank::Finite(total)
}

/// `rank X(g, d) = Σ_{k ≤ d} C(2g, k)(d + 1 - k)`.
pub fn xgd_rank(g: usize, d: usize) -> u128 {
    (0..=d as u64).map(|k| binomial(2 * g as u64, k) * (d as u128 + 1 - k as u128)).sum()
}

/// Rank of knot Floer homology in Alexander grading `j`: `C(2g, g + j)`.
pub fn hfk_rank(g: usize, j: i64) -> u128 {
    if j.unsigned_abs() as usize > g {
        return 0;
    }
    binomial(2 * g as u64, (g as i64 + j) as u64)
}

/// Monomial basis of `X(g, d)`, in slot order.
pub fn xgd_basis(g: usize, d: usize) -> Vec<Slot> {
    let mut out: Vec<Slot> = (0..=d as i64)
        .flat_map(|m| Mono::subsets_up_to(g, d - m as usize).into_iter().map(move |s| Slot::new(s, -m)))
        .collect();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn slot(idx: &[usize], ell: i64) -> Slot {
        Slot::new(Mono::from_indices(idx).unwrap(), ell)
    }

    fn el(g: usize, terms: &[(&[usize], i64, i64)]) -> PlaneElem<i64> {
        PlaneElem::from_terms(g, terms.iter().map(|(m, l, c)| (slot(m, *l), *c)))
    }

    #[test]
    fn projections() {
        let x = el(2, &[(&[1], 0, 3), (&[], 1, 2)]);
        assert_eq!(project(&x, &Region::whole()), x);
        assert!(project(&el(1, &[(&[], 1, 1)]), &Region::i_nonneg()).is_zero());
        assert!(project(&el(2, &[(&[1], 0, 1)]), &Region::j_nonneg()).is_zero());
        assert_eq!(slot(&[1], 0).position(2), (0, -1));
    }

    #[test]
    fn u_shifts() {
        let x = el(2, &[(&[1, 3], 0, 3), (&[], -2, 2)]);
        assert_eq!(u_act(&x, 0), x);
        assert_eq!(u_act(&u_act(&x, 3), -3), x);
        for (s, _) in u_act(&x, 2).terms() {
            assert_eq!(s.grading(2), s.shifted(-2).grading(2) - 4);
        }
    }

    #[test]
    fn standard_action_example() {
        let x = el(1, &[(&[1], 0, 1)]);
        let gamma = ExtElem::basis(1, 1);
        let expected = el(1, &[(&[], 0, 1), (&[1, 2], 1, -1)]);
        assert_eq!(standard_action(&gamma, &x).unwrap(), expected);
        assert!(standard_action(&gamma, &PlaneElem::<i64>::zero(1)).unwrap().is_zero());
        let bad = ExtElem::monomial(1, Mono::from_indices(&[1, 2]).unwrap(), 1);
        assert_eq!(standard_action(&bad, &x), Err(Error::NotDegreeOne));
    }

    #[test]
    fn ranks() {
        for g in 1..=5 {
            assert_eq!(region_rank(&xgd_region(g, 0), g), Rank::Finite(1));
            for d in 0..g {
                assert_eq!(region_rank(&xgd_region(g, d), g), Rank::Finite(xgd_rank(g, d)));
                assert_eq!(xgd_basis(g, d).len() as u128, xgd_rank(g, d));
            }
        }
        assert_eq!(region_rank(&xgd_region(2, 1), 2), Rank::Finite(6));
        assert_eq!(xgd_rank(3, 2), 30);
        assert_eq!(region_rank(&Region::i_nonneg(), 2), Rank::Infinite);
        let slice = Region::of(&[Cond::IGe0, Cond::ILt0]);
        assert_eq!(region_rank(&slice, 2), Rank::Finite(0));
        let column = Region::of(&[Cond::MaxEq(0), Cond::MinEq(0)]);
        assert_eq!(region_rank(&column, 1), Rank::Finite(2));
    }

    #[test]
    fn knot_floer_ranks() {
        assert_eq!(hfk_rank(1, 0), 2);
        assert_eq!(hfk_rank(4, 4), 1);
        assert_eq!(hfk_rank(3, 1), 15);
        assert_eq!(hfk_rank(3, 4), 0);
        for g in 1..=6 {
            let total: u128 = (-(g as i64)..=g as i64).map(|j| hfk_rank(g, j)).sum();
            assert_eq!(total, 1u128 << (2 * g));
            let i_zero = Region::of(&[Cond::MaxEq(100)]);
            assert_eq!(region_rank(&i_zero, g), Rank::Finite(total));
        }
    }

    #[test]
    fn basis_order_is_u_power_then_subset() {
        let b = xgd_basis(2, 1);
        let names: Vec<String> = b.iter().map(|s| s.to_string()).collect();
        assert_eq!(names, ["1U^-1", "1", "e1", "e2", "e3", "e4"]);
    }

    fn plane_strategy(g: usize) -> impl Strategy<Value = PlaneElem<i64>> {
        prop::collection::vec((0u32..(1u32 << (2 * g)), -3i64..3, -5i64..6), 0..8).prop_map(move |ts| {
            PlaneElem::from_terms(g, ts.into_iter().map(|(b, l, c)| (Slot::new(Mono::from_bits(b), l), c)))
        })
    }

    proptest! {
        #[test]
        fn action_is_a_module_structure((_g, x, a, b) in (1usize..=3).prop_flat_map(|g| (Just(g), plane_strategy(g), 1..=2 * g, 1..=2 * g))) {
            let aa = standard_action_basis(a, &standard_action_basis(a, &x));
            prop_assert!(aa.is_zero());
            let ab = standard_action_basis(a, &standard_action_basis(b, &x));
            let ba = standard_action_basis(b, &standard_action_basis(a, &x));
            prop_assert!(ab.add(&ba).is_zero());
        }

        #[test]
        fn action_drops_grading_by_one((g, x, a) in (1usize..=3).prop_flat_map(|g| (Just(g), plane_strategy(g), 1..=2 * g))) {
            let y = standard_action_basis(a, &x);
            let grs: Vec<i64> = x.terms().map(|(s, _)| s.grading(g)).collect();
            for (s, _) in y.terms() {
                prop_assert!(grs.contains(&(s.grading(g) + 1)));
            }
        }

        #[test]
        fn projection_composes((_g, x, c1, c2) in (1usize..=3).prop_flat_map(|g| (Just(g), plane_strategy(g), -3i64..3, -3i64..3))) {
            let r1 = Region::quadrant(c1);
            let r2 = Region::of(&[Cond::JLt(c2)]);
            let both = r1.and(&r2);
            prop_assert_eq!(project(&project(&x, &r1), &r2), project(&x, &both));
            prop_assert_eq!(project(&project(&x, &both), &both), project(&x, &both));
        }
    }
}
