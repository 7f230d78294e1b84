//! Sparse multivariate Laurent polynomials with exact coefficients.
//!
//! Coefficients live either in the integers or in `Z/pZ`; the ring is fixed
//! when a polynomial is built and checked whenever two polynomials meet.
//! Terms are kept in a `BTreeMap` keyed by exponent vectors, so iteration
//! order is lexicographic and the leading term is the last entry.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::ctengine::{SymIndex, SymPoly};
use crate::modarith::{inv_mod, Prime};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaurentError {
    #[error("variable count mismatch: {left} vs {right}")]
    VarCountMismatch { left: usize, right: usize },
    #[error("coefficient ring mismatch: {left} vs {right}")]
    RingMismatch { left: Ring, right: Ring },
    #[error("division is not exact")]
    NonExactDivision,
    #[error("division by zero polynomial")]
    DivisionByZero,
    #[error("operation needs a univariate polynomial, got {0} variables")]
    NotUnivariate(usize),
    #[error("operation needs coefficients mod {expected}, polynomial is over {found}")]
    WrongRing { expected: Prime, found: Ring },
    #[error("exponent overflow")]
    ExponentOverflow,
}

/// Coefficient domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ring {
    Integer,
    Mod(Prime),
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integer => write!(f, "Z"),
            Ring::Mod(p) => write!(f, "Z/{p}Z"),
        }
    }
}

impl Ring {
    fn normalize(self, c: BigInt) -> BigInt {
        match self {
            Ring::Integer => c,
            Ring::Mod(p) => c.mod_floor(&BigInt::from(p.get())),
        }
    }

    /// `a / b` if it exists in the ring.
    fn divide(self, a: &BigInt, b: &BigInt) -> Option<BigInt> {
        match self {
            Ring::Integer => {
                let (q, r) = a.div_rem(b);
                r.is_zero().then_some(q)
            }
            Ring::Mod(p) => {
                let m = BigInt::from(p.get());
                let bi = inv_mod(b.mod_floor(&m).to_u64()?, p)?;
                Some((a * BigInt::from(bi)).mod_floor(&m))
            }
        }
    }
}

/// Exponent vector; ordering is lexicographic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExpVec(Vec<i64>);

impl ExpVec {
    pub fn new(exponents: Vec<i64>) -> Self {
        ExpVec(exponents)
    }

    pub fn zero(nvars: usize) -> Self {
        ExpVec(vec![0; nvars])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    fn checked_add(&self, other: &ExpVec) -> Option<ExpVec> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_add(*b))
            .collect::<Option<Vec<_>>>()
            .map(ExpVec)
    }

    fn sub(&self, other: &ExpVec) -> ExpVec {
        ExpVec(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    fn dominates(&self, other: &ExpVec) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    fn abs_degree(&self) -> i64 {
        self.0.iter().map(|e| e.abs()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    ring: Ring,
    nvars: usize,
    terms: BTreeMap<ExpVec, BigInt>,
}

impl LaurentPoly {
    pub fn zero(ring: Ring, nvars: usize) -> Self {
        LaurentPoly { ring, nvars, terms: BTreeMap::new() }
    }

    pub fn one(ring: Ring, nvars: usize) -> Self {
        Self::constant(ring, nvars, 1)
    }

    pub fn constant(ring: Ring, nvars: usize, c: impl Into<BigInt>) -> Self {
        Self::monomial(ring, vec![0; nvars], c)
    }

    pub fn monomial(ring: Ring, exponents: Vec<i64>, c: impl Into<BigInt>) -> Self {
        let nvars = exponents.len();
        let mut p = Self::zero(ring, nvars);
        p.add_term(ExpVec(exponents), c.into());
        p
    }

    /// The `i`-th variable.
    pub fn var(ring: Ring, nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(ring, e, 1)
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs; repeated
    /// exponents accumulate.
    ///
    /// # Panics
    /// If an exponent vector does not have `nvars` entries.
    pub fn from_terms<I, C>(ring: Ring, nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<i64>, C)>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero(ring, nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(ExpVec(e), c.into());
        }
        p
    }

    /// Univariate shorthand: `[(e, c), ...]` ↦ `Σ c·x^e`.
    pub fn univariate(ring: Ring, terms: &[(i64, i64)]) -> Self {
        Self::from_terms(ring, 1, terms.iter().map(|&(e, c)| (vec![e], c)))
    }

    fn add_term(&mut self, e: ExpVec, c: BigInt) {
        let ring = self.ring;
        let c = ring.normalize(c);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                let sum = ring.normalize(slot.get() + c);
                if sum.is_zero() {
                    slot.remove();
                } else {
                    *slot.get_mut() = sum;
                }
            }
        }
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms.get(&ExpVec::zero(self.nvars)).is_some_and(|c| c.is_one())
    }

    /// Number of stored (nonzero) terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&ExpVec, &BigInt)> {
        self.terms.iter()
    }

    /// Lexicographically largest term.
    pub fn leading_term(&self) -> Option<(&ExpVec, &BigInt)> {
        self.terms.iter().next_back()
    }

    fn check_compatible(&self, other: &Self) -> Result<(), LaurentError> {
        if self.nvars != other.nvars {
            return Err(LaurentError::VarCountMismatch { left: self.nvars, right: other.nvars });
        }
        if self.ring != other.ring {
            return Err(LaurentError::RingMismatch { left: self.ring, right: other.ring });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, LaurentError> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, LaurentError> {
        self.check_compatible(other)?;
        let mut acc: BTreeMap<ExpVec, BigInt> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.checked_add(eb).ok_or(LaurentError::ExponentOverflow)?;
                *acc.entry(e).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        Ok(self.with_terms(acc))
    }

    fn with_terms(&self, raw: BTreeMap<ExpVec, BigInt>) -> Self {
        let ring = self.ring;
        let terms = raw
            .into_iter()
            .map(|(e, c)| (e, ring.normalize(c)))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        LaurentPoly { ring, nvars: self.nvars, terms }
    }

    pub fn scale(&self, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        self.with_terms(self.terms.iter().map(|(e, v)| (e.clone(), v * &c)).collect())
    }

    /// Multiplies by the monomial `x^shift`.
    pub fn shift(&self, shift: &[i64]) -> Result<Self, LaurentError> {
        if shift.len() != self.nvars {
            return Err(LaurentError::VarCountMismatch { left: self.nvars, right: shift.len() });
        }
        let s = ExpVec(shift.to_vec());
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| e.checked_add(&s).map(|e| (e, c.clone())))
            .collect::<Option<BTreeMap<_, _>>>()
            .ok_or(LaurentError::ExponentOverflow)?;
        Ok(LaurentPoly { ring: self.ring, nvars: self.nvars, terms })
    }

    pub fn pow(&self, mut n: u64) -> Self {
        let mut result = Self::one(self.ring, self.nvars);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Constant term.
    pub fn ct(&self) -> BigInt {
        self.terms.get(&ExpVec::zero(self.nvars)).cloned().unwrap_or_default()
    }

    /// Coefficient of `x^e`.
    pub fn coeff(&self, e: &[i64]) -> Result<BigInt, LaurentError> {
        if e.len() != self.nvars {
            return Err(LaurentError::VarCountMismatch { left: self.nvars, right: e.len() });
        }
        Ok(self.terms.get(&ExpVec(e.to_vec())).cloned().unwrap_or_default())
    }

    /// Reduces integer coefficients modulo `p`; a polynomial already over
    /// `Z/pZ` must use the same prime.
    pub fn reduce_mod(&self, p: Prime) -> Result<Self, LaurentError> {
        match self.ring {
            Ring::Mod(q) if q != p => {
                Err(LaurentError::RingMismatch { left: self.ring, right: Ring::Mod(p) })
            }
            _ => {
                let out = LaurentPoly { ring: Ring::Mod(p), nvars: self.nvars, terms: BTreeMap::new() };
                Ok(out.with_terms(self.terms.clone()))
            }
        }
    }

    /// Componentwise minimum exponent (zero vector for the zero polynomial).
    pub fn min_exponents(&self) -> Vec<i64> {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else { return vec![0; self.nvars] };
        let mut m = first.0.clone();
        for e in it {
            for (a, b) in m.iter_mut().zip(&e.0) {
                *a = (*a).min(*b);
            }
        }
        m
    }

    /// Exact quotient `N / D` in the Laurent ring.
    ///
    /// Both operands are shifted to genuine polynomials without monomial
    /// content; since monomials are coprime to such a divisor, Laurent
    /// divisibility reduces to polynomial divisibility, decided by reduction
    /// against the single divisor under lex order.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self, LaurentError> {
        self.check_compatible(divisor)?;
        if divisor.is_zero() {
            return Err(LaurentError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let mn = self.min_exponents();
        let md = divisor.min_exponents();
        let neg = |v: &[i64]| v.iter().map(|x| -x).collect::<Vec<_>>();
        let mut rem = self.shift(&neg(&mn))?;
        let d = divisor.shift(&neg(&md))?;
        let (lead_e, lead_c) = d.leading_term().map(|(e, c)| (e.clone(), c.clone())).unwrap();

        let mut quotient: BTreeMap<ExpVec, BigInt> = BTreeMap::new();
        while let Some((e, c)) = rem.leading_term() {
            if !e.dominates(&lead_e) {
                return Err(LaurentError::NonExactDivision);
            }
            let qc = self.ring.divide(c, &lead_c).ok_or(LaurentError::NonExactDivision)?;
            let qe = e.sub(&lead_e);
            let step = d.shift(qe.as_slice())?.scale(qc.clone());
            rem = rem.checked_sub(&step)?;
            quotient.insert(qe, qc);
        }
        let q = LaurentPoly { ring: self.ring, nvars: self.nvars, terms: quotient };
        let back: Vec<i64> = mn.iter().zip(&md).map(|(a, b)| a - b).collect();
        q.shift(&back)
    }

    /// Frobenius lift: `c·x^e ↦ c·x^{e·p^a}` with the exponent kept symbolic.
    ///
    /// Over `Z/pZ` this is `P^{p^a}`, since `(u+v)^p = u^p + v^p` and
    /// `c^p = c` for residues.
    pub fn frobenius_lift(&self, p: Prime, a: u32) -> Result<SymPoly, LaurentError> {
        if self.nvars != 1 {
            return Err(LaurentError::NotUnivariate(self.nvars));
        }
        if self.ring != Ring::Mod(p) {
            return Err(LaurentError::WrongRing { expected: p, found: self.ring });
        }
        let mut out = SymPoly::zero(p, a);
        for (e, c) in &self.terms {
            let idx = SymIndex::new(e.0[0], 0).map_err(|_| LaurentError::ExponentOverflow)?;
            out.add_term(idx, c.to_u64().expect("canonical residue"));
        }
        Ok(out)
    }

    fn var_name(&self, i: usize) -> String {
        match (self.nvars, i) {
            (n, 0) if n <= 3 => "x".into(),
            (n, 1) if n <= 3 => "y".into(),
            (n, 2) if n <= 3 => "z".into(),
            _ => format!("x{}", i + 1),
        }
    }

    fn monomial_text(&self, e: &ExpVec) -> String {
        e.0.iter()
            .enumerate()
            .filter(|(_, &k)| k != 0)
            .map(|(i, &k)| match k {
                1 => self.var_name(i),
                _ => format!("{}^{}", self.var_name(i), k),
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

impl fmt::Display for LaurentPoly {
    /// Renders as e.g. `2 + x + x^-1`: terms by absolute degree, positive
    /// exponents first within a degree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut order: Vec<(&ExpVec, &BigInt)> = self.terms.iter().collect();
        order.sort_by(|a, b| a.0.abs_degree().cmp(&b.0.abs_degree()).then(b.0.cmp(a.0)));
        for (i, (e, c)) in order.into_iter().enumerate() {
            let mono = self.monomial_text(e);
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            match (mono.is_empty(), mag.is_one()) {
                (true, _) => write!(f, "{mag}")?,
                (false, true) => write!(f, "{mono}")?,
                (false, false) => write!(f, "{mag}*{mono}")?,
            }
        }
        Ok(())
    }
}

// Operator sugar for code that already knows the operands are compatible.
// Mismatched shapes are programming errors here, hence the panics.

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_add(rhs).expect("incompatible Laurent polynomials")
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_sub(rhs).expect("incompatible Laurent polynomials")
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_mul(rhs).expect("incompatible Laurent polynomials")
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(-1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const Z: Ring = Ring::Integer;

    fn uni(terms: &[(i64, i64)]) -> LaurentPoly {
        LaurentPoly::univariate(Z, terms)
    }

    fn bi(terms: &[((i64, i64), i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(Z, 2, terms.iter().map(|&((a, b), c)| (vec![a, b], c)))
    }

    fn example1() -> LaurentPoly {
        // 1/(xy) + 3 + 5xy - x^3 + 6y^2
        bi(&[((-1, -1), 1), ((0, 0), 3), ((1, 1), 5), ((3, 0), -1), ((0, 2), 6)])
    }

    #[test]
    fn add_examples() {
        assert!((&uni(&[(1, 1), (0, 1)]) + &uni(&[(1, -1)])).is_one());
        let lhs = bi(&[((-1, -1), 1), ((0, 0), 3)]);
        let sum = &lhs + &bi(&[((1, 1), 5)]);
        assert_eq!(sum, bi(&[((-1, -1), 1), ((0, 0), 3), ((1, 1), 5)]));
        let p = example1();
        assert_eq!(&LaurentPoly::zero(Z, 2) + &p, p);
    }

    #[test]
    fn mismatched_shapes_are_errors() {
        let a = uni(&[(1, 1)]);
        let b = bi(&[((1, 0), 1)]);
        assert_eq!(
            a.checked_add(&b),
            Err(LaurentError::VarCountMismatch { left: 1, right: 2 })
        );
        let p5 = Prime::new(5).unwrap();
        let m = a.reduce_mod(p5).unwrap();
        assert!(matches!(a.checked_mul(&m), Err(LaurentError::RingMismatch { .. })));
        assert!(a.coeff(&[0, 0]).is_err());
    }

    #[test]
    fn mul_examples() {
        let one_x = uni(&[(0, 1), (1, 1)]);
        assert_eq!(&one_x * &one_x, uni(&[(0, 1), (1, 2), (2, 1)]));
        let b = uni(&[(0, 2), (1, 1), (-1, 1)]);
        assert_eq!(&b * &uni(&[(1, 1)]), uni(&[(1, 2), (2, 1), (0, 1)]));
        let lhs = uni(&[(0, 1), (1, -1)]);
        let rhs = uni(&[(0, 1), (1, 1), (2, 1)]);
        assert_eq!(&lhs * &rhs, uni(&[(0, 1), (3, -1)]));
    }

    #[test]
    fn pow_examples() {
        let b = uni(&[(0, 2), (1, 1), (-1, 1)]);
        assert_eq!(b.pow(2), uni(&[(0, 6), (1, 4), (-1, 4), (2, 1), (-2, 1)]));
        assert!(b.pow(0).is_one());
        let m = uni(&[(0, 1), (1, 1), (-1, 1)]).pow(3);
        assert_eq!(
            m,
            uni(&[(-3, 1), (-2, 3), (-1, 6), (0, 7), (1, 6), (2, 3), (3, 1)])
        );
        // Motzkin M_3 = CT - [x^2] = 7 - 3.
        assert_eq!(m.ct() - m.coeff(&[2]).unwrap(), BigInt::from(4));
    }

    #[test]
    fn ct_and_coeff_examples() {
        assert_eq!(example1().ct(), BigInt::from(3));
        assert_eq!(LaurentPoly::zero(Z, 3).ct(), BigInt::zero());
        assert_eq!(uni(&[(0, 2), (1, 1), (-1, 1)]).pow(2).ct(), BigInt::from(6));
        let p = bi(&[((-1, -1), 1), ((0, 0), 3), ((1, 1), 5), ((3, 0), 1), ((0, 2), 6)]);
        assert_eq!(p.coeff(&[1, 1]).unwrap(), BigInt::from(5));
        assert_eq!(uni(&[(0, 1), (1, 1)]).coeff(&[5]).unwrap(), BigInt::zero());
        assert_eq!(uni(&[(0, 2), (1, 1), (-1, 1)]).coeff(&[-1]).unwrap(), BigInt::one());
    }

    #[test]
    fn exact_div_examples() {
        let yz = |a: i64, b: i64, c: i64| ((a, b), c);
        let num = bi(&[yz(3, 0, 1), yz(0, 3, 1)]);
        let den = bi(&[yz(1, 0, 1), yz(0, 1, 1)]);
        assert_eq!(
            num.exact_div(&den).unwrap(),
            bi(&[yz(2, 0, 1), yz(1, 1, -1), yz(0, 2, 1)])
        );
        let cube = uni(&[(0, 1), (3, -1)]);
        assert_eq!(cube.exact_div(&uni(&[(0, 1), (1, -1)])).unwrap(), uni(&[(0, 1), (1, 1), (2, 1)]));
        assert_eq!(
            cube.exact_div(&uni(&[(0, 1), (1, 1)])),
            Err(LaurentError::NonExactDivision)
        );
        assert_eq!(cube.exact_div(&LaurentPoly::zero(Z, 1)), Err(LaurentError::DivisionByZero));
    }

    #[test]
    fn exact_div_with_negative_exponents() {
        // (x + 1/x)^2 - 1 over (x + 1/x - 1) = x + 1/x + 1.
        let b = uni(&[(1, 1), (-1, 1)]);
        let num = &b.pow(2) - &LaurentPoly::one(Z, 1);
        let den = &b - &LaurentPoly::one(Z, 1);
        assert_eq!(num.exact_div(&den).unwrap(), uni(&[(1, 1), (-1, 1), (0, 1)]));
    }

    #[test]
    fn exact_div_needs_coefficient_divisibility_over_z() {
        let num = uni(&[(0, 1), (1, 1)]);
        assert_eq!(num.exact_div(&uni(&[(0, 2), (1, 2)])), Err(LaurentError::NonExactDivision));
        let p3 = Prime::new(3).unwrap();
        let q = num
            .reduce_mod(p3)
            .unwrap()
            .exact_div(&uni(&[(0, 2), (1, 2)]).reduce_mod(p3).unwrap())
            .unwrap();
        assert_eq!(q, LaurentPoly::constant(Ring::Mod(p3), 1, 2));
    }

    #[test]
    fn reduce_mod_normalizes() {
        let p5 = Prime::new(5).unwrap();
        let r = uni(&[(0, 6), (1, 5), (2, -1)]).reduce_mod(p5).unwrap();
        assert_eq!(r.coeff(&[0]).unwrap(), BigInt::one());
        assert_eq!(r.coeff(&[2]).unwrap(), BigInt::from(4));
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn display() {
        assert_eq!(uni(&[(0, 2), (1, 1), (-1, 1)]).to_string(), "2 + x + x^-1");
        assert_eq!(example1().to_string(), "3 + 5*x*y + 6*y^2 + x^-1*y^-1 - x^3");
        assert_eq!(uni(&[(1, -1)]).to_string(), "-x");
        assert_eq!(LaurentPoly::zero(Z, 2).to_string(), "0");
        assert_eq!(LaurentPoly::var(Z, 4, 3).to_string(), "x4");
    }

    #[test]
    fn frobenius_lift_requires_matching_prime() {
        let p5 = Prime::new(5).unwrap();
        let p7 = Prime::new(7).unwrap();
        let b = uni(&[(0, 2), (1, 1), (-1, 1)]);
        assert!(matches!(b.frobenius_lift(p5, 1), Err(LaurentError::WrongRing { .. })));
        let b7 = b.reduce_mod(p7).unwrap();
        assert!(matches!(b7.frobenius_lift(p5, 1), Err(LaurentError::WrongRing { .. })));
        assert!(b7.frobenius_lift(p7, 2).is_ok());
    }
}
