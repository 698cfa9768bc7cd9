//! Duality pairing on `X(g, d) ⊗ Λ`, Kronecker and Poincaré dual bases,
//! and relative invariants of the standard pieces.

use crate::error::{Error, Result};
use crate::extalg::Mono;
use crate::groupring::{canonical, novikov_invert, GroupRingElem, LaurentSeries};
use crate::linalg::invert_unimodular;
use crate::plane::{project, standard_action_basis, u_act, xgd_basis, Coeff, PlaneElem, Region, Slot};
use crate::surgery::{lowest_height_projection, Kernel, XgdElem};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::OnceLock;

/// Element of `Λ*H₁(Σ) ⊗ Z[U]`, keyed by `(U-power, monomial)`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct AElem {
    g: usize,
    terms: BTreeMap<(u32, Mono), i64>,
}

impl AElem {
    pub fn zero(g: usize) -> Self {
        AElem { g, terms: BTreeMap::new() }
    }

    pub fn one(g: usize) -> Self {
        Self::monomial(g, Mono::EMPTY, 0, 1)
    }

    pub fn monomial(g: usize, s: Mono, p: u32, c: i64) -> Self {
        let mut out = Self::zero(g);
        out.add_term(s, p, c);
        out
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn add_term(&mut self, s: Mono, p: u32, c: i64) {
        if c == 0 {
            return;
        }
        let e = self.terms.entry((p, s)).or_insert(0);
        *e += c;
        if *e == 0 {
            self.terms.remove(&(p, s));
        }
    }

    /// Terms as `(S, p, coefficient)` for `e_S U^p`.
    pub fn terms(&self) -> impl Iterator<Item = (Mono, u32, i64)> + '_ {
        self.terms.iter().map(|(&(p, s), &c)| (s, p, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Common degree `2p + |S|` of all terms, if homogeneous.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut it = self.terms().map(|(s, p, _)| 2 * p as usize + s.degree());
        let first = it.next()?;
        it.all(|x| x == first).then_some(first)
    }
}

impl fmt::Display for AElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (s, p, c) in self.terms() {
            let mut m = String::new();
            if s != Mono::EMPTY {
                m.push_str(&s.to_string());
            }
            match p {
                0 => {}
                1 => m.push('U'),
                _ => m.push_str(&format!("U^{p}")),
            }
            let body = match (m.is_empty(), c.abs()) {
                (true, a) => a.to_string(),
                (false, 1) => m,
                (false, a) => format!("{a}{m}"),
            };
            let sign = if c < 0 {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            if first {
                write!(f, "{sign}{body}")?;
            } else {
                write!(f, " {sign} {body}")?;
            }
            first = false;
        }
        Ok(())
    }
}

/// `e_S U^p ∩ x` in the standard module structure on `H{i ≥ 0}`.
pub fn standard_monomial_action<C: Coeff>(s: Mono, p: u32, x: &PlaneElem<C>) -> PlaneElem<C> {
    let mut cur = u_act(x, p as i64);
    for a in s.indices().into_iter().rev() {
        cur = standard_action_basis(a, &cur);
    }
    project(&cur, &Region::i_nonneg())
}

pub fn standard_a_action<C: Coeff>(a: &AElem, x: &PlaneElem<C>) -> PlaneElem<C> {
    let mut out = PlaneElem::zero(x.genus());
    for (s, p, c) in a.terms() {
        out.add_scaled(&standard_monomial_action(s, p, x), c);
    }
    out
}

/// `α . x` through the corrected module structure of the kernel.
pub fn corrected_a_action(a: &AElem, x: &XgdElem, ker: &Kernel) -> Result<XgdElem> {
    if a.genus() != ker.genus() {
        return Err(Error::GenusMismatch(a.genus(), ker.genus()));
    }
    let mut out = ker.zero();
    for (s, p, c) in a.terms() {
        let y = ker.corrected_monomial_action(s, p, x)?;
        out = out.add(&y.scale(&LaurentSeries::monomial(0, c)))?;
    }
    Ok(out)
}

/// 1 iff the generators agree and the levels are complementary.
pub fn base_pair<T: PartialEq>(x: &T, i: i64, y: &T, j: i64) -> u8 {
    u8::from(x == y && j == -i - 1)
}

fn bottom_slot() -> Slot {
    Slot::new(Mono::EMPTY, 0)
}

fn pairing_entry(g: usize, d: usize, s: &Slot, s2: &Slot) -> i64 {
    let p = d as i64 - s2.mono.degree() as i64 + s2.ell;
    if p < 0 {
        return 0;
    }
    let x = PlaneElem::single(g, *s, 1i64);
    standard_monomial_action(s2.mono, p as u32, &x).get(&bottom_slot()).copied().unwrap_or(0)
}

/// Sesquilinear pairing of complementary heights; with `conj_second` the second
/// argument's coefficients are conjugated.
pub fn module_pair(xi: &XgdElem, eta: &XgdElem, conj_second: bool) -> Result<LaurentSeries> {
    if (xi.genus(), xi.d()) != (eta.genus(), eta.d()) {
        return Err(Error::InvalidArgument(format!(
            "cannot pair X({},{}) with X({},{})",
            xi.genus(),
            xi.d(),
            eta.genus(),
            eta.d()
        )));
    }
    let (g, d) = (xi.genus(), xi.d());
    let mut out = LaurentSeries::zero();
    for (s, a) in xi.terms() {
        for (s2, b) in eta.terms() {
            if s.grading(g) + s2.grading(g) != 2 * d as i64 - 2 * g as i64 {
                continue;
            }
            let p = pairing_entry(g, d, s, s2);
            if p == 0 {
                continue;
            }
            let b = if conj_second { b.conjugate() } else { b.clone() };
            out = out.checked_add(&a.checked_mul(&b)?.scale_i64(p))?;
        }
    }
    Ok(out)
}

/// Monomials `e_S U^p` of degree `deg` with `|S| + p ≤ d`.
fn tilde_monomials(g: usize, d: usize, deg: usize) -> Vec<(Mono, u32)> {
    let mut out = Vec::new();
    for p in 0..=deg / 2 {
        let s = deg - 2 * p;
        if s + p <= d && s <= 2 * g {
            out.extend(Mono::subsets(g, s).into_iter().map(|m| (m, p as u32)));
        }
    }
    out.sort_by_key(|&(m, p)| (p, m));
    out
}

/// Elements of degree `deg` dual to `family` under `α ∩ x ↦ bottom coefficient`.
fn kronecker_dual(g: usize, d: usize, deg: usize, family: &[PlaneElem<BigInt>]) -> Result<Vec<AElem>> {
    let rows = tilde_monomials(g, d, deg);
    if rows.len() != family.len() {
        return Err(Error::Internal(format!(
            "degree {deg} block has {} monomials for {} classes",
            rows.len(),
            family.len()
        )));
    }
    let m: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|&(s, p)| {
            family
                .iter()
                .map(|x| standard_monomial_action(s, p, x).get(&bottom_slot()).cloned().unwrap_or_default())
                .collect()
        })
        .collect();
    let inv = invert_unimodular(&m)?;
    let n = rows.len();
    (0..n)
        .map(|i| {
            let mut a = AElem::zero(g);
            for (r, &(s, p)) in rows.iter().enumerate() {
                let c = inv[i][r].to_i64().ok_or_else(|| Error::Internal("dual basis coefficient overflow".into()))?;
                a.add_term(s, p, c);
            }
            Ok(a)
        })
        .collect()
}

/// Dual data for the basis elements of one height.
#[derive(Clone, Debug)]
pub struct DualBlock {
    pub members: Vec<usize>,
    pub kron: Vec<AElem>,
    pub poin: Vec<PlaneElem<BigInt>>,
    pub kron_poin: Vec<AElem>,
}

/// Kronecker and Poincaré dual bases of `X(g, d)`, computed one height at a time.
#[derive(Debug)]
pub struct DualBasis {
    g: usize,
    k: i64,
    d: usize,
    basis: Vec<Slot>,
    degree: Vec<usize>,
    position: HashMap<Slot, usize>,
    blocks: Vec<OnceLock<Result<DualBlock>>>,
}

impl DualBasis {
    pub fn new(g: usize, k: i64) -> Result<Self> {
        crate::surgery::check_spinc(g, k)?;
        let d = g - 1 - k.unsigned_abs() as usize;
        let basis = xgd_basis(g, d);
        let degree = basis.iter().map(|s| s.mono.degree() + 2 * (-s.ell) as usize).collect();
        let position = basis.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let blocks = (0..=2 * d).map(|_| OnceLock::new()).collect();
        Ok(DualBasis { g, k, d, basis, degree, position, blocks })
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

    pub fn basis(&self) -> &[Slot] {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Degree of `β̃_i`, the height of `β_i` above the bottom.
    pub fn degree(&self, i: usize) -> usize {
        self.degree[i]
    }

    /// Degree of `β̃°_i`.
    pub fn dual_degree(&self, i: usize) -> usize {
        2 * self.d - self.degree[i]
    }

    pub fn block(&self, deg: usize) -> Result<&DualBlock> {
        let cell =
            self.blocks.get(deg).ok_or_else(|| Error::InvalidArgument(format!("no basis elements in degree {deg}")))?;
        cell.get_or_init(|| self.compute_block(deg)).as_ref().map_err(Clone::clone)
    }

    fn compute_block(&self, deg: usize) -> Result<DualBlock> {
        let (g, d) = (self.g, self.d);
        let members: Vec<usize> = (0..self.len()).filter(|&i| self.degree[i] == deg).collect();
        let family: Vec<PlaneElem<BigInt>> =
            members.iter().map(|&i| PlaneElem::single(g, self.basis[i], BigInt::from(1))).collect();
        let kron = kronecker_dual(g, d, deg, &family)?;
        let top = PlaneElem::single(g, Slot::new(Mono::EMPTY, -(d as i64)), BigInt::from(1));
        let poin: Vec<PlaneElem<BigInt>> = kron.iter().map(|a| standard_a_action(a, &top)).collect();
        let kron_poin = kronecker_dual(g, d, 2 * d - deg, &poin)?;
        Ok(DualBlock { members, kron, poin, kron_poin })
    }

    fn locate(&self, i: usize) -> Result<(&DualBlock, usize)> {
        if i >= self.len() {
            return Err(Error::InvalidArgument(format!("basis index {i} out of range")));
        }
        let b = self.block(self.degree[i])?;
        let j = b.members.iter().position(|&m| m == i).expect("member of its own block");
        Ok((b, j))
    }

    /// `β̃_i`.
    pub fn kron(&self, i: usize) -> Result<&AElem> {
        self.locate(i).map(|(b, j)| &b.kron[j])
    }

    /// `β°_i = β̃_i ∩ Ξ`.
    pub fn poin(&self, i: usize) -> Result<&PlaneElem<BigInt>> {
        self.locate(i).map(|(b, j)| &b.poin[j])
    }

    /// `β̃°_i`, dual to the family `β°`.
    pub fn kron_poin(&self, i: usize) -> Result<&AElem> {
        self.locate(i).map(|(b, j)| &b.kron_poin[j])
    }

    pub fn index_of(&self, s: &Slot) -> Option<usize> {
        self.position.get(s).copied()
    }

    /// `u_i`, the bottom coefficient of `β̃_i . β_i` in the corrected structure.
    pub fn unit(&self, i: usize, ker: &Kernel) -> Result<LaurentSeries> {
        if (ker.genus(), ker.k()) != (self.g, self.k) {
            return Err(Error::InvalidArgument("kernel does not match the dual basis".into()));
        }
        if self.k != 0 {
            return Ok(LaurentSeries::one());
        }
        let b = ker.index_of(&self.basis[i]).ok_or_else(|| Error::Internal("basis slot missing from kernel".into()))?;
        let y = corrected_a_action(self.kron(i)?, &ker.basis_vector(b), ker)?;
        Ok(lowest_height_projection(&y))
    }
}

/// Fully evaluated dual basis data in basis order.
#[derive(Clone, Debug)]
pub struct DualBasisData {
    pub g: usize,
    pub k: i64,
    pub d: usize,
    pub basis: Vec<Slot>,
    pub kron: Vec<AElem>,
    pub poin: Vec<PlaneElem<BigInt>>,
    pub kron_poin: Vec<AElem>,
    pub units: Vec<LaurentSeries>,
}

pub fn dual_basis(g: usize, k: i64, trunc: usize) -> Result<DualBasisData> {
    let db = DualBasis::new(g, k)?;
    let ker = Kernel::new(g, k, trunc)?;
    let n = db.len();
    let mut data = DualBasisData {
        g,
        k,
        d: db.d(),
        basis: db.basis().to_vec(),
        kron: Vec::with_capacity(n),
        poin: Vec::with_capacity(n),
        kron_poin: Vec::with_capacity(n),
        units: Vec::with_capacity(n),
    };
    for i in 0..n {
        data.kron.push(db.kron(i)?.clone());
        data.poin.push(db.poin(i)?.clone());
        data.kron_poin.push(db.kron_poin(i)?.clone());
        data.units.push(db.unit(i, &ker)?);
    }
    Ok(data)
}

/// Relative invariant of `T² × D²`: `1/(t - 1)` to `trunc` terms, canonically normalized.
pub fn rel_inv_torus_disk(trunc: usize) -> LaurentSeries {
    let s = LaurentSeries::from_terms([(0, -1), (1, 1)]).windowed(trunc);
    canonical(&novikov_invert(&s).expect("t - 1 has unit leading coefficient"))
}

/// The same invariant on an element of degree `deg`: zero unless `deg = 0`.
pub fn rel_inv_torus_disk_at(deg: usize, trunc: usize) -> LaurentSeries {
    if deg == 0 {
        rel_inv_torus_disk(trunc)
    } else {
        LaurentSeries::zero()
    }
}

/// Relative invariant of `Σ × D²` on `α`: `α . Ξ`.
pub fn rel_inv_sigma_disk(alpha: &AElem, ker: &Kernel) -> Result<XgdElem> {
    corrected_a_action(alpha, &ker.top(), ker)
}

/// `a(r, s, t) ↦ a(1, 1, t) / (t - 1)` on the augmentation kernel of `Z[H¹(T³)]`.
pub fn t3_reduce(a: &GroupRingElem) -> Result<LaurentSeries> {
    if a.rank() != 3 {
        return Err(Error::RankMismatch { expected: 3, got: a.rank() });
    }
    if !Zero::is_zero(&a.augmentation()) {
        return Err(Error::NotInAugmentationKernel);
    }
    let mut p: BTreeMap<i64, BigInt> = BTreeMap::new();
    for (e, c) in a.terms() {
        *p.entry(e[2]).or_default() += c;
    }
    p.retain(|_, c| !Zero::is_zero(c));
    let Some((&lo, _)) = p.iter().next() else {
        return Ok(LaurentSeries::zero());
    };
    let hi = *p.keys().next_back().expect("nonempty");
    // Synthetic division from the top: q_{e-1} = p_e + q_e.
    let mut q = BTreeMap::new();
    let mut carry = BigInt::zero();
    for e in (lo..=hi).rev() {
        carry += p.get(&e).cloned().unwrap_or_default();
        if e > lo {
            q.insert(e - 1, carry.clone());
        }
    }
    if !Zero::is_zero(&carry) {
        return Err(Error::NonzeroRemainder);
    }
    Ok(LaurentSeries::from_terms(q))
}
