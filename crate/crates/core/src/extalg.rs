//! Exterior algebra of a rank-2g symplectic lattice.
//!
//! Basis vectors are `e1..e_{2g}` with `ω(e_{2i-1}, e_{2i}) = 1`. Monomials are
//! stored as bitmasks (bit `i-1` for `e_i`), so the genus is limited to 16.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

pub const MAX_GENUS: usize = 16;

/// Strictly increasing index subset, read as the wedge of its basis vectors.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Mono(u32);

impl Mono {
    pub const EMPTY: Mono = Mono(0);

    pub fn from_bits(bits: u32) -> Self {
        Mono(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// The basis vector `e_i`, 1-based.
    pub fn single(i: usize) -> Self {
        Mono(1 << (i - 1))
    }

    /// Sorted subset from distinct indices; `None` if an index repeats.
    pub fn from_indices(idx: &[usize]) -> Option<Self> {
        let mut bits = 0u32;
        for &i in idx {
            let b = 1u32 << (i - 1);
            if bits & b != 0 {
                return None;
            }
            bits |= b;
        }
        Some(Mono(bits))
    }

    /// `e_1 ∧ … ∧ e_{2g}`.
    pub fn top(g: usize) -> Self {
        Mono(((1u64 << (2 * g)) - 1) as u32)
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << (i - 1)) != 0
    }

    pub fn indices(self) -> Vec<usize> {
        (1..=32).filter(|&i| self.contains(i)).collect()
    }

    /// Number of elements of `self` strictly below index `i`.
    fn below(self, i: usize) -> usize {
        (self.0 & ((1u32 << (i - 1)) - 1)).count_ones() as usize
    }

    pub fn without(self, i: usize) -> Self {
        Mono(self.0 & !(1 << (i - 1)))
    }

    /// All subsets of `{1..2g}` of size `k`, in basis order.
    pub fn subsets(g: usize, k: usize) -> Vec<Mono> {
        let mut out: Vec<Mono> =
            (0u64..(1u64 << (2 * g))).filter(|b| b.count_ones() as usize == k).map(|b| Mono(b as u32)).collect();
        out.sort();
        out
    }

    /// Every subset of `{1..2g}` of size at most `k`, in basis order.
    pub fn subsets_up_to(g: usize, k: usize) -> Vec<Mono> {
        (0..=k.min(2 * g)).flat_map(|j| Mono::subsets(g, j)).collect()
    }
}

/// Ordered by degree, then lexicographically on the sorted index lists.
impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal if self.0 == other.0 => Ordering::Equal,
            Ordering::Equal => {
                let diff = self.0 ^ other.0;
                let low = diff & diff.wrapping_neg();
                if self.0 & low != 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
            o => o,
        }
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return f.write_str("1");
        }
        for i in self.indices() {
            write!(f, "e{i}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The symplectic basis of genus `g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SympBasis {
    pub g: usize,
}

impl SympBasis {
    pub fn new(g: usize) -> Result<Self> {
        if g == 0 || g > MAX_GENUS {
            return Err(Error::GenusOutOfRange(g, MAX_GENUS));
        }
        Ok(SympBasis { g })
    }

    pub fn rank(&self) -> usize {
        2 * self.g
    }

    pub fn omega(&self, a: usize, b: usize) -> i64 {
        omega(a, b)
    }
}

/// Symplectic partner of a basis index.
pub fn partner(i: usize) -> usize {
    if i % 2 == 1 {
        i + 1
    } else {
        i - 1
    }
}

/// `ω(e_a, e_b)`.
pub fn omega(a: usize, b: usize) -> i64 {
    if a % 2 == 1 && b == a + 1 {
        1
    } else if b % 2 == 1 && a == b + 1 {
        -1
    } else {
        0
    }
}

/// Poincaré duality on basis vectors: `e_{2i-1} ↦ e_{2i}`, `e_{2i} ↦ -e_{2i-1}`.
pub fn pd(i: usize) -> (usize, i64) {
    if i % 2 == 1 {
        (i + 1, 1)
    } else {
        (i - 1, -1)
    }
}

/// `e_i ∧ m` on monomials.
pub fn wedge_single(i: usize, m: Mono) -> Option<(Mono, i64)> {
    if m.contains(i) {
        return None;
    }
    let sign = if m.below(i).is_multiple_of(2) { 1 } else { -1 };
    Some((Mono(m.0 | (1 << (i - 1))), sign))
}

/// `a ∧ b` on monomials.
pub fn wedge_mono(a: Mono, b: Mono) -> Option<(Mono, i64)> {
    if a.0 & b.0 != 0 {
        return None;
    }
    let mut inversions = 0usize;
    for i in b.indices() {
        inversions += (a.0 >> i).count_ones() as usize;
    }
    let sign = if inversions.is_multiple_of(2) { 1 } else { -1 };
    Some((Mono(a.0 | b.0), sign))
}

/// `ι_{e_i} m`: removes `e_i` with sign `(-1)^{#elements before it}`.
pub fn iota_mono(i: usize, m: Mono) -> Option<(Mono, i64)> {
    if !m.contains(i) {
        return None;
    }
    let sign = if m.below(i).is_multiple_of(2) { 1 } else { -1 };
    Some((m.without(i), sign))
}

/// `e_b ∠ m = Σ_ℓ (-1)^ℓ ω(m_ℓ, e_b) · m with m_ℓ removed`.
pub fn angle_single(b: usize, m: Mono) -> Option<(Mono, i64)> {
    let p = partner(b);
    if !m.contains(p) {
        return None;
    }
    let pos = m.below(p) + 1;
    let sign = if pos.is_multiple_of(2) { 1 } else { -1 };
    Some((m.without(p), sign * omega(p, b)))
}

/// `β ∠ α` on monomials, contracting the last factor of `β` first.
pub fn angle_mono(beta: Mono, alpha: Mono) -> Option<(Mono, i64)> {
    let mut cur = alpha;
    let mut sign = 1;
    for b in beta.indices().into_iter().rev() {
        let (m, s) = angle_single(b, cur)?;
        cur = m;
        sign *= s;
    }
    Some((cur, sign))
}

/// `star(m) = m ∠ (e_1 ∧ … ∧ e_{2g})` on monomials; always a single signed monomial.
pub fn star_mono(m: Mono, g: usize) -> (Mono, i64) {
    angle_mono(m, Mono::top(g)).expect("partner map is a bijection")
}

/// Monomials of `ωⁿ/n!`: all `n`-subsets of the symplectic pairs.
pub fn omega_power_monos(g: usize, n: usize) -> Vec<Mono> {
    if n > g {
        return Vec::new();
    }
    let mut out: Vec<Mono> = (0u32..(1u32 << g))
        .filter(|p| p.count_ones() as usize == n)
        .map(|p| {
            let mut bits = 0u32;
            for i in 0..g {
                if p & (1 << i) != 0 {
                    bits |= 0b11 << (2 * i);
                }
            }
            Mono(bits)
        })
        .collect();
    out.sort();
    out
}

/// Element of `Λ*V`: sparse integer combination of monomials.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExtElem {
    g: usize,
    terms: BTreeMap<Mono, i64>,
}

impl ExtElem {
    pub fn zero(g: usize) -> Self {
        ExtElem { g, terms: BTreeMap::new() }
    }

    pub fn one(g: usize) -> Self {
        Self::monomial(g, Mono::EMPTY, 1)
    }

    /// The basis vector `e_i`, 1-based.
    pub fn basis(g: usize, i: usize) -> Self {
        Self::monomial(g, Mono::single(i), 1)
    }

    pub fn monomial(g: usize, m: Mono, c: i64) -> Self {
        let mut out = Self::zero(g);
        out.add_term(m, c);
        out
    }

    pub fn from_terms(g: usize, terms: impl IntoIterator<Item = (Mono, i64)>) -> Self {
        let mut out = Self::zero(g);
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn add_term(&mut self, m: Mono, c: i64) {
        if c == 0 {
            return;
        }
        let e = self.terms.entry(m).or_insert(0);
        *e += c;
        if *e == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (Mono, i64)> + '_ {
        self.terms.iter().map(|(m, c)| (*m, *c))
    }

    pub fn coeff(&self, m: Mono) -> i64 {
        self.terms.get(&m).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Common degree of all terms; `None` for mixed degrees, `Some(0)` for zero.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|m| m.degree());
        match it.next() {
            None => Some(0),
            Some(d) => it.all(|x| x == d).then_some(d),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_genus(self.g, other.g)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m, c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: i64) -> Self {
        Self::from_terms(self.g, self.terms().map(|(m, x)| (m, x * c)))
    }
}

impl fmt::Display for ExtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (m, c)) in self.terms().enumerate() {
            let sign = if c < 0 {
                "-"
            } else if n > 0 {
                "+"
            } else {
                ""
            };
            if n > 0 {
                f.write_str(" ")?;
            }
            f.write_str(sign)?;
            if n > 0 && !sign.is_empty() {
                f.write_str(" ")?;
            }
            match (c.abs(), m == Mono::EMPTY) {
                (1, _) => write!(f, "{m}")?,
                (a, true) => write!(f, "{a}")?,
                (a, false) => write!(f, "{a}{m}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ExtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExtElem(g={}, {})", self.g, self)
    }
}

fn check_genus(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::GenusMismatch(a, b));
    }
    Ok(())
}

fn bilinear(a: &ExtElem, b: &ExtElem, f: impl Fn(Mono, Mono) -> Option<(Mono, i64)>) -> Result<ExtElem> {
    check_genus(a.g, b.g)?;
    let mut out = ExtElem::zero(a.g);
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            if let Some((m, s)) = f(ma, mb) {
                out.add_term(m, s * ca * cb);
            }
        }
    }
    Ok(out)
}

pub fn wedge(a: &ExtElem, b: &ExtElem) -> Result<ExtElem> {
    bilinear(a, b, wedge_mono)
}

/// Degree-1 element as `(index, coefficient)` pairs.
pub fn degree_one_terms(gamma: &ExtElem) -> Result<Vec<(usize, i64)>> {
    if gamma.is_zero() {
        return Ok(Vec::new());
    }
    if gamma.homogeneous_degree() != Some(1) {
        return Err(Error::NotDegreeOne);
    }
    Ok(gamma.terms().map(|(m, c)| (m.indices()[0], c)).collect())
}

/// `ι_γ a` for a degree-1 `γ`, using `e^i(e_j) = δ_ij`.
pub fn dual_contract(gamma: &ExtElem, a: &ExtElem) -> Result<ExtElem> {
    check_genus(gamma.g, a.g)?;
    let mut out = ExtElem::zero(a.g);
    for (i, c) in degree_one_terms(gamma)? {
        for (m, x) in a.terms() {
            if let Some((m2, s)) = iota_mono(i, m) {
                out.add_term(m2, s * c * x);
            }
        }
    }
    Ok(out)
}

/// `β ∠ α`; terms with `deg β > deg α` contribute zero.
pub fn symp_contract(beta: &ExtElem, alpha: &ExtElem) -> Result<ExtElem> {
    bilinear(beta, alpha, angle_mono)
}

/// The Hodge-Lefschetz star `α ∠ (ωᵍ/g!)`.
pub fn star(alpha: &ExtElem) -> Result<ExtElem> {
    if alpha.homogeneous_degree().is_none() {
        return Err(Error::Inhomogeneous);
    }
    let g = alpha.g;
    Ok(ExtElem::from_terms(
        g,
        alpha.terms().map(|(m, c)| {
            let (s, sign) = star_mono(m, g);
            (s, sign * c)
        }),
    ))
}

/// `ωⁿ/n!`, zero when `n > g`.
pub fn omega_divided_power(g: usize, n: usize) -> ExtElem {
    ExtElem::from_terms(g, omega_power_monos(g, n).into_iter().map(|m| (m, 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(g: usize, idx: &[usize]) -> ExtElem {
        ExtElem::monomial(g, Mono::from_indices(idx).unwrap(), 1)
    }

    #[test]
    fn monomial_order() {
        let mut v = [e(2, &[2, 3]), e(2, &[1]), e(2, &[]), e(2, &[1, 4]), e(2, &[1, 2])];
        v.sort_by_key(|x| x.terms().next().unwrap().0);
        let names: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        assert_eq!(names, ["1", "e1", "e1e2", "e1e4", "e2e3"]);
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(wedge(&e(1, &[1]), &e(1, &[2])).unwrap(), e(1, &[1, 2]));
        assert!(wedge(&e(1, &[1]), &e(1, &[1])).unwrap().is_zero());
        assert_eq!(wedge(&e(1, &[2]), &e(1, &[1])).unwrap(), e(1, &[1, 2]).scale(-1));
        assert_eq!(wedge(&e(2, &[3]), &e(2, &[1, 4])).unwrap(), e(2, &[1, 3, 4]).scale(-1));
    }

    #[test]
    fn dual_contract_examples() {
        let e1 = e(1, &[1]);
        assert_eq!(dual_contract(&e1, &e1).unwrap(), ExtElem::one(1));
        assert!(dual_contract(&e1, &e(1, &[2])).unwrap().is_zero());
        assert_eq!(dual_contract(&e1, &e(1, &[1, 2])).unwrap(), e(1, &[2]));
        assert_eq!(dual_contract(&e(1, &[1, 2]), &e1), Err(Error::NotDegreeOne));
    }

    #[test]
    fn contraction_examples() {
        assert_eq!(symp_contract(&e(1, &[2]), &e(1, &[1, 2])).unwrap(), e(1, &[2]).scale(-1));
        let a = e(2, &[1, 3]);
        assert_eq!(symp_contract(&ExtElem::one(2), &a).unwrap(), a);
        assert_eq!(symp_contract(&e(1, &[1, 2]), &e(1, &[1, 2])).unwrap(), ExtElem::one(1).scale(-1));
        assert_eq!(symp_contract(&e(1, &[1]), &e(1, &[2])).unwrap(), ExtElem::one(1));
        assert!(symp_contract(&e(2, &[1, 2, 3]), &e(2, &[1])).unwrap().is_zero());
    }

    #[test]
    fn star_examples() {
        for g in 1..=4 {
            let top: Vec<usize> = (1..=2 * g).collect();
            assert_eq!(star(&ExtElem::one(g)).unwrap(), e(g, &top));
        }
        assert_eq!(star(&e(1, &[1])).unwrap(), e(1, &[1]).scale(-1));
        assert_eq!(star(&e(1, &[2])).unwrap(), e(1, &[2]).scale(-1));
        assert_eq!(star(&e(1, &[1, 2])).unwrap(), ExtElem::one(1).scale(-1));
        let mixed = ExtElem::one(1).add(&e(1, &[1])).unwrap();
        assert_eq!(star(&mixed), Err(Error::Inhomogeneous));
    }

    #[test]
    fn divided_powers() {
        assert_eq!(omega_divided_power(3, 0), ExtElem::one(3));
        assert_eq!(omega_divided_power(3, 3), e(3, &[1, 2, 3, 4, 5, 6]));
        assert_eq!(omega_divided_power(2, 1), e(2, &[1, 2]).add(&e(2, &[3, 4])).unwrap());
        assert!(omega_divided_power(2, 3).is_zero());
    }

    /// Binomial coefficient for small arguments.
    fn binom(n: usize, k: usize) -> i64 {
        (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
    }

    #[test]
    fn divided_power_products() {
        for g in 1..=4 {
            for a in 0..=g {
                for b in 0..=g - a {
                    let lhs = wedge(&omega_divided_power(g, a), &omega_divided_power(g, b)).unwrap();
                    assert_eq!(lhs, omega_divided_power(g, a + b).scale(binom(a + b, a)));
                }
            }
        }
    }

    /// Rank of an integer matrix by fraction-free elimination.
    fn int_rank(mut rows: Vec<Vec<i128>>) -> usize {
        let mut rank = 0;
        let cols = rows.first().map_or(0, |r| r.len());
        for c in 0..cols {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else { continue };
            rows.swap(rank, p);
            for r in 0..rows.len() {
                if r != rank && rows[r][c] != 0 {
                    let (a, b) = (rows[rank][c], rows[r][c]);
                    let pivot = rows[rank].clone();
                    for (x, y) in rows[r].iter_mut().zip(&pivot) {
                        *x = *x * a - y * b;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn star_is_injective() {
        for g in 1..=3 {
            for k in 0..=2 * g {
                let src = Mono::subsets(g, k);
                let dst = Mono::subsets(g, 2 * g - k);
                let rows: Vec<Vec<i128>> = src
                    .iter()
                    .map(|m| {
                        let s = star(&ExtElem::monomial(g, *m, 1)).unwrap();
                        dst.iter().map(|d| s.coeff(*d) as i128).collect()
                    })
                    .collect();
                assert_eq!(int_rank(rows), src.len());
            }
        }
    }

    /// Literal alternating-sum contraction on index lists.
    fn brute_angle(g: usize, beta: &[usize], alpha: &[usize]) -> ExtElem {
        let mut cur: Vec<(Vec<usize>, i64)> = vec![(alpha.to_vec(), 1)];
        for &b in beta.iter().rev() {
            let mut next = Vec::new();
            for (m, c) in &cur {
                for (l, &a) in m.iter().enumerate() {
                    let w = omega(a, b);
                    if w != 0 {
                        let mut rest = m.clone();
                        rest.remove(l);
                        let sign = if (l + 1) % 2 == 0 { 1 } else { -1 };
                        next.push((rest, c * sign * w));
                    }
                }
            }
            cur = next;
        }
        ExtElem::from_terms(g, cur.into_iter().map(|(m, c)| (Mono::from_indices(&m).unwrap(), c)))
    }

    fn mono_in(g: usize) -> impl Strategy<Value = Vec<usize>> {
        prop::collection::btree_set(1..=2 * g, 0..=2 * g).prop_map(|s| s.into_iter().collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn contraction_matches_alternating_sum((g, b, a) in (1usize..=3).prop_flat_map(|g| (Just(g), mono_in(g), mono_in(g)))) {
            let lhs = symp_contract(&e(g, &b), &e(g, &a)).unwrap();
            prop_assert_eq!(lhs, brute_angle(g, &b, &a));
        }
    }

    proptest! {
        #[test]
        fn iota_squares_to_zero((g, i, a) in (1usize..=3).prop_flat_map(|g| (Just(g), 1..=2 * g, mono_in(g)))) {
            let gamma = e(g, &[i]);
            let once = dual_contract(&gamma, &e(g, &a)).unwrap();
            prop_assert!(dual_contract(&gamma, &once).unwrap().is_zero());
        }

        #[test]
        fn iota_is_a_derivation((g, i, a, b) in (1usize..=3).prop_flat_map(|g| (Just(g), 1..=2 * g, mono_in(g), mono_in(g)))) {
            let gamma = e(g, &[i]);
            let (x, y) = (e(g, &a), e(g, &b));
            let lhs = dual_contract(&gamma, &wedge(&x, &y).unwrap()).unwrap();
            let sign = if a.len() % 2 == 0 { 1 } else { -1 };
            let rhs = wedge(&dual_contract(&gamma, &x).unwrap(), &y).unwrap()
                .add(&wedge(&x, &dual_contract(&gamma, &y).unwrap()).unwrap().scale(sign)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
