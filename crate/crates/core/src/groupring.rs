//! Sparse integer Laurent series in `t` (optionally truncated, i.e. Novikov
//! completed), multivariable group rings with their involution, and spin^c
//! gradings on monomials.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Default number of coefficients kept by truncated series.
pub const DEFAULT_TRUNC: usize = 16;

/// Direction of the completion: `Up` allows infinitely many positive powers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Completion {
    Up,
    Down,
}

/// Range `[lo, lo + len)` of known exponents.
///
/// For `Up` series every coefficient below `lo` is zero and coefficients from
/// `lo + len` on are unknown. `Down` is the mirror image: zero from
/// `lo + len` on, unknown below `lo`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Window {
    pub lo: i64,
    pub len: usize,
    pub dir: Completion,
}

impl Window {
    pub fn up(lo: i64, len: usize) -> Self {
        Window { lo, len, dir: Completion::Up }
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.len as i64
    }

    pub fn contains(&self, e: i64) -> bool {
        e >= self.lo && e < self.hi()
    }

    fn mirrored(&self) -> Window {
        Window {
            lo: 1 - self.hi(),
            len: self.len,
            dir: match self.dir {
                Completion::Up => Completion::Down,
                Completion::Down => Completion::Up,
            },
        }
    }
}

/// Sparse Laurent series with integer coefficients.
///
/// Without a window the value is an exact Laurent polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct LaurentSeries {
    coeffs: BTreeMap<i64, BigInt>,
    trunc: Option<Window>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Mul,
}

impl LaurentSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 1)
    }

    pub fn t() -> Self {
        Self::monomial(1, 1)
    }

    pub fn monomial(exp: i64, coef: impl Into<BigInt>) -> Self {
        Self::from_terms([(exp, coef)])
    }

    /// Exact series from `(exponent, coefficient)` pairs; repeated exponents add up.
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let mut coeffs: BTreeMap<i64, BigInt> = BTreeMap::new();
        for (e, c) in terms {
            *coeffs.entry(e).or_default() += c.into();
        }
        coeffs.retain(|_, c| !c.is_zero());
        LaurentSeries { coeffs, trunc: None }
    }

    /// Attaches the upward window `[lo, lo + len)`, discarding terms at or above `lo + len`.
    pub fn with_window(mut self, lo: i64, len: usize) -> Result<Self> {
        if let Some(v) = self.valuation() {
            if v < lo {
                return Err(Error::InvalidArgument(format!("term t^{v} lies below window start {lo}")));
            }
        }
        let w = Window::up(lo, len);
        self.coeffs.retain(|e, _| w.contains(*e));
        self.trunc = Some(w);
        Ok(self)
    }

    /// Attaches an upward window of length `len` starting at the valuation (or 0).
    pub fn windowed(self, len: usize) -> Self {
        let lo = self.valuation().unwrap_or(0);
        self.with_window(lo, len).expect("window starts at the valuation")
    }

    /// Shrinks a longer window to `len` coefficients; exact series are unchanged.
    pub fn clip(&self, len: usize) -> Self {
        match self.trunc {
            Some(w) if w.len > len => {
                let mut out = if w.dir == Completion::Down { self.conjugate() } else { self.clone() };
                let mut nw = out.trunc.unwrap();
                nw.len = len;
                out.restrict(Some(nw));
                if w.dir == Completion::Down {
                    out.conjugate()
                } else {
                    out
                }
            }
            _ => self.clone(),
        }
    }

    pub fn window(&self) -> Option<Window> {
        self.trunc
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        self.coeffs.get(&e).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Highest stored exponent.
    pub fn degree(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Largest absolute value among the coefficients.
    pub fn max_abs_coeff(&self) -> BigInt {
        self.coeffs.values().map(|c| c.abs()).max().unwrap_or_default()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return LaurentSeries { coeffs: BTreeMap::new(), trunc: self.trunc };
        }
        LaurentSeries { coeffs: self.coeffs.iter().map(|(e, x)| (*e, x * c)).collect(), trunc: self.trunc }
    }

    pub fn scale_i64(&self, c: i64) -> Self {
        self.scale(&BigInt::from(c))
    }

    /// Multiplication by `t^n`.
    pub fn shift(&self, n: i64) -> Self {
        LaurentSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (e + n, c.clone())).collect(),
            trunc: self.trunc.map(|w| Window { lo: w.lo + n, ..w }),
        }
    }

    /// Negates every exponent (`t ↦ t⁻¹`); truncated series flip completion.
    pub fn conjugate(&self) -> Self {
        LaurentSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (-e, c.clone())).collect(),
            trunc: self.trunc.map(|w| w.mirrored()),
        }
    }

    fn dir(&self) -> Option<Completion> {
        self.trunc.map(|w| w.dir)
    }

    fn restrict(&mut self, w: Option<Window>) {
        if let Some(w) = w {
            self.coeffs.retain(|e, _| w.contains(*e));
        }
        self.trunc = w;
    }

    fn needs_mirror(a: &Self, b: &Self) -> Result<bool> {
        match (a.dir(), b.dir()) {
            (Some(Completion::Up), Some(Completion::Down)) | (Some(Completion::Down), Some(Completion::Up)) => {
                Err(Error::MismatchedCompletion)
            }
            (Some(Completion::Down), _) | (_, Some(Completion::Down)) => Ok(true),
            _ => Ok(false),
        }
    }

    fn add_up(&self, other: &Self) -> Result<Self> {
        let window = match (self.trunc, other.trunc) {
            (Some(wa), Some(wb)) => {
                if wa.len != wb.len {
                    return Err(Error::MismatchedTruncation(wa.len, wb.len));
                }
                Some(Window::up(wa.lo.min(wb.lo), wa.len))
            }
            (Some(w), None) => Some(Window::up(other.valuation().map_or(w.lo, |v| v.min(w.lo)), w.len)),
            (None, Some(w)) => Some(Window::up(self.valuation().map_or(w.lo, |v| v.min(w.lo)), w.len)),
            (None, None) => None,
        };
        let mut coeffs = self.coeffs.clone();
        for (e, c) in &other.coeffs {
            *coeffs.entry(*e).or_default() += c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        let mut out = LaurentSeries { coeffs, trunc: None };
        out.restrict(window);
        Ok(out)
    }

    fn mul_up(&self, other: &Self) -> Result<Self> {
        let window = match (self.trunc, other.trunc) {
            (Some(wa), Some(wb)) => {
                if wa.len != wb.len {
                    return Err(Error::MismatchedTruncation(wa.len, wb.len));
                }
                Some(Window::up(wa.lo + wb.lo, wa.len))
            }
            (Some(w), None) => match other.valuation() {
                Some(v) => Some(Window::up(w.lo + v, w.len)),
                None => return Ok(LaurentSeries::zero()),
            },
            (None, Some(w)) => match self.valuation() {
                Some(v) => Some(Window::up(w.lo + v, w.len)),
                None => return Ok(LaurentSeries::zero()),
            },
            (None, None) => None,
        };
        let hi = window.map_or(i64::MAX, |w| w.hi());
        let mut coeffs: BTreeMap<i64, BigInt> = BTreeMap::new();
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &other.coeffs {
                let e = ea + eb;
                if e >= hi {
                    break;
                }
                *coeffs.entry(e).or_default() += ca * cb;
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        let mut out = LaurentSeries { coeffs, trunc: None };
        out.restrict(window);
        Ok(out)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if Self::needs_mirror(self, other)? {
            return Ok(self.conjugate().add_up(&other.conjugate())?.conjugate());
        }
        self.add_up(other)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if Self::needs_mirror(self, other)? {
            return Ok(self.conjugate().mul_up(&other.conjugate())?.conjugate());
        }
        self.mul_up(other)
    }

    /// Highest exponent (exclusive) up to which the coefficients are known.
    fn known_hi(&self) -> i64 {
        match self.trunc {
            Some(w) if w.dir == Completion::Up => w.hi(),
            _ => i64::MAX,
        }
    }

    fn known_lo(&self) -> i64 {
        match self.trunc {
            Some(w) if w.dir == Completion::Down => w.lo,
            _ => i64::MIN,
        }
    }

    /// Coefficientwise equality on the exponents known to both operands.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let lo = self.known_lo().max(other.known_lo());
        let hi = self.known_hi().min(other.known_hi());
        let pick = |s: &Self| -> Vec<(i64, BigInt)> { s.coeffs.range(lo..hi).map(|(e, c)| (*e, c.clone())).collect() };
        if lo >= hi {
            return true;
        }
        pick(self) == pick(other)
    }

    /// Space-separated `exp:coef` pairs in ascending exponent order.
    pub fn to_text(&self) -> String {
        self.coeffs.iter().map(|(e, c)| format!("{e}:{c}")).collect::<Vec<_>>().join(" ")
    }

    /// Parses the `exp:coef` text form into an exact series.
    pub fn parse_text(s: &str) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        let mut last: Option<i64> = None;
        for tok in s.split_whitespace() {
            let (e, c) = tok.split_once(':').ok_or_else(|| Error::InvalidArgument(format!("bad term `{tok}`")))?;
            let e: i64 = e.parse().map_err(|_| Error::InvalidArgument(format!("bad exponent `{e}`")))?;
            let c: BigInt = c.parse().map_err(|_| Error::InvalidArgument(format!("bad coefficient `{c}`")))?;
            if c.is_zero() {
                return Err(Error::InvalidArgument(format!("zero coefficient at t^{e}")));
            }
            if last.is_some_and(|l| l >= e) {
                return Err(Error::InvalidArgument("exponents must be strictly ascending".into()));
            }
            last = Some(e);
            coeffs.insert(e, c);
        }
        Ok(LaurentSeries { coeffs, trunc: None })
    }

    /// Human-readable rendering in the variable `var`, highest power first.
    pub fn pretty(&self, var: &str) -> String {
        let mut out = String::new();
        for (e, c) in self.coeffs.iter().rev() {
            let neg = c.is_negative();
            let a = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match *e {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{e}"),
            };
            if mono.is_empty() {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{a}{mono}"));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        if let Some(w) = self.trunc {
            match w.dir {
                Completion::Up => out.push_str(&format!(" + O({var}^{})", w.hi())),
                Completion::Down => out.push_str(&format!(" + O({var}^{})", w.lo - 1)),
            }
        }
        out
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty("t"))
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        LaurentSeries { coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(), trunc: self.trunc }
    }
}

impl Neg for LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        -&self
    }
}

/// Panics on incompatible windows; use [`LaurentSeries::checked_add`] to handle that case.
impl Add for &LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, rhs: &LaurentSeries) -> LaurentSeries {
        self.checked_add(rhs).expect("incompatible series windows")
    }
}

impl Sub for &LaurentSeries {
    type Output = LaurentSeries;
    fn sub(self, rhs: &LaurentSeries) -> LaurentSeries {
        self.checked_sub(rhs).expect("incompatible series windows")
    }
}

/// Panics on incompatible windows; use [`LaurentSeries::checked_mul`] to handle that case.
impl Mul for &LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, rhs: &LaurentSeries) -> LaurentSeries {
        self.checked_mul(rhs).expect("incompatible series windows")
    }
}

pub fn series_arith(a: &LaurentSeries, b: &LaurentSeries, op: SeriesOp) -> Result<LaurentSeries> {
    match op {
        SeriesOp::Add => a.checked_add(b),
        SeriesOp::Mul => a.checked_mul(b),
    }
}

/// Inverse in the Novikov ring, to the precision of the input window.
pub fn novikov_invert(s: &LaurentSeries) -> Result<LaurentSeries> {
    let w = s.trunc.ok_or(Error::MissingWindow)?;
    if w.dir == Completion::Down {
        return Ok(novikov_invert(&s.conjugate())?.conjugate());
    }
    let v = s.valuation().ok_or(Error::NonUnit)?;
    if v != w.lo {
        return Err(Error::InsufficientPrecision);
    }
    let c0 = s.coeff(v);
    if !c0.abs().is_one() {
        return Err(Error::NonUnit);
    }
    let n = w.len;
    let a: Vec<BigInt> = (0..n as i64).map(|i| s.coeff(v + i)).collect();
    let mut u: Vec<BigInt> = Vec::with_capacity(n);
    u.push(c0.clone());
    for m in 1..n {
        let mut acc = BigInt::zero();
        for i in 1..=m {
            if !a[i].is_zero() {
                acc += &a[i] * &u[m - i];
            }
        }
        u.push(-(&c0 * acc));
    }
    let out = LaurentSeries::from_terms(u.into_iter().enumerate().map(|(m, c)| (m as i64 - v, c)));
    out.with_window(-v, n)
}

/// Normal form modulo `±tⁿ`: lowest exponent 0 with a positive coefficient.
pub fn canonical(s: &LaurentSeries) -> LaurentSeries {
    match s.valuation() {
        None => s.clone(),
        Some(v) => {
            let shifted = s.shift(-v);
            if s.coeff(v).is_negative() {
                -shifted
            } else {
                shifted
            }
        }
    }
}

/// True iff `a = ±tⁿ b` on the coefficients known to both.
pub fn eq_up_to_unit(a: &LaurentSeries, b: &LaurentSeries) -> bool {
    if a.is_zero() || b.is_zero() {
        return a.is_zero() && b.is_zero();
    }
    let mirror = matches!(LaurentSeries::needs_mirror(a, b), Ok(true));
    let (a, b) = if mirror { (a.conjugate(), b.conjugate()) } else { (a.clone(), b.clone()) };
    let (ca, cb) = (canonical(&a), canonical(&b));
    let hi = ca.known_hi().min(cb.known_hi());
    let pick =
        |s: &LaurentSeries| -> Vec<(i64, BigInt)> { s.coeffs.range(..hi).map(|(e, c)| (*e, c.clone())).collect() };
    pick(&ca) == pick(&cb)
}

/// Alias of [`LaurentSeries::conjugate`].
pub fn conjugate(s: &LaurentSeries) -> LaurentSeries {
    s.conjugate()
}

/// Element of the group ring `Z[Z^r]` with sparse integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupRingElem {
    rank: usize,
    coeffs: BTreeMap<Vec<i64>, BigInt>,
}

impl GroupRingElem {
    pub fn zero(rank: usize) -> Self {
        GroupRingElem { rank, coeffs: BTreeMap::new() }
    }

    pub fn one(rank: usize) -> Self {
        Self::monomial(vec![0; rank], 1)
    }

    pub fn monomial(exps: Vec<i64>, coef: impl Into<BigInt>) -> Self {
        let rank = exps.len();
        let mut out = Self::zero(rank);
        let c = coef.into();
        if !c.is_zero() {
            out.coeffs.insert(exps, c);
        }
        out
    }

    /// The `i`-th generator (0-based).
    pub fn generator(rank: usize, i: usize) -> Self {
        let mut e = vec![0; rank];
        e[i] = 1;
        Self::monomial(e, 1)
    }

    pub fn from_terms<I, C>(rank: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, C)>,
        C: Into<BigInt>,
    {
        let mut out = Self::zero(rank);
        for (e, c) in terms {
            if e.len() != rank {
                return Err(Error::RankMismatch { expected: rank, got: e.len() });
            }
            *out.coeffs.entry(e).or_default() += c.into();
        }
        out.coeffs.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i64], &BigInt)> {
        self.coeffs.iter().map(|(e, c)| (e.as_slice(), c))
    }

    fn check_rank(&self, other: &Self) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch { expected: self.rank, got: other.rank });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_rank(other)?;
        let mut out = self.clone();
        for (e, c) in &other.coeffs {
            *out.coeffs.entry(e.clone()).or_default() += c;
        }
        out.coeffs.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        GroupRingElem { rank: self.rank, coeffs: self.coeffs.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_rank(other)?;
        let mut out = Self::zero(self.rank);
        for (ea, ca) in &self.coeffs {
            for (eb, cb) in &other.coeffs {
                let e: Vec<i64> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                *out.coeffs.entry(e).or_default() += ca * cb;
            }
        }
        out.coeffs.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    /// Negates every exponent vector.
    pub fn conjugate(&self) -> Self {
        GroupRingElem {
            rank: self.rank,
            coeffs: self.coeffs.iter().map(|(e, c)| (e.iter().map(|x| -x).collect(), c.clone())).collect(),
        }
    }

    /// Augmentation: the sum of all coefficients.
    pub fn augmentation(&self) -> BigInt {
        self.coeffs.values().sum()
    }
}

/// Linear functional on exponent vectors given by one weight per generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpincGrading {
    pub weights: Vec<i64>,
}

pub fn graded_degree(m: &[i64], g: &SpincGrading) -> Result<i64> {
    if m.len() != g.weights.len() {
        return Err(Error::RankMismatch { expected: g.weights.len(), got: m.len() });
    }
    Ok(m.iter().zip(&g.weights).map(|(a, b)| a * b).sum())
}
