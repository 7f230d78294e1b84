//! Exact arithmetic modulo a prime and brute-force term oracles.
//!
//! Residues are canonical `u64` values in `[0, p)` internally. At API
//! boundaries they are reported as [`SymResidue`], the representative in
//! `(-p/2, p/2]`.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModArithError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("negative net valuation {valuation} for super Catalan term T({m}, {n}) mod {p}")]
    NegativeValuation { m: u64, n: u64, p: u64, valuation: i64 },
}

/// A prime modulus, validated at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Prime(u64);

impl Prime {
    pub fn new(value: u64) -> Result<Self, ModArithError> {
        if is_prime(value) {
            Ok(Prime(value))
        } else {
            Err(ModArithError::NotPrime(value))
        }
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    /// `p^a`, or `None` when it does not fit in a `u64`.
    pub fn checked_pow(self, a: u32) -> Option<u64> {
        self.0.checked_pow(a)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Symmetric representative of a residue class: `-p/2 < value <= p/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SymResidue {
    value: i64,
    modulus: u64,
}

impl SymResidue {
    /// Builds the symmetric representative from a canonical residue in `[0, p)`.
    pub fn from_canonical(r: u64, p: Prime) -> Self {
        let m = p.get();
        let r = r % m;
        let value = if r > m / 2 { r as i64 - m as i64 } else { r as i64 };
        SymResidue { value, modulus: m }
    }

    #[inline]
    pub fn value(self) -> i64 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> u64 {
        self.modulus
    }

    /// Canonical representative in `[0, p)`.
    pub fn canonical(self) -> u64 {
        self.value.rem_euclid(self.modulus as i64) as u64
    }

    /// True when `self ≡ v (mod p)`.
    pub fn congruent_to(self, v: i64) -> bool {
        (self.value - v).rem_euclid(self.modulus as i64) == 0
    }
}

impl fmt::Display for SymResidue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}

pub fn symmetric_rep(x: i128, p: Prime) -> SymResidue {
    SymResidue::from_canonical(reduce_signed(x, p.get()), p)
}

/// `x mod m` in `[0, m)` for signed `x`.
#[inline]
pub fn reduce_signed(x: i128, m: u64) -> u64 {
    x.rem_euclid(m as i128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    let (a, b) = (a % m, b % m);
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `b^e mod m` by square-and-multiply; `m = 1` yields 0.
pub fn modpow(b: i128, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut base = reduce_signed(b, m);
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    acc
}

/// Inverse modulo a prime; `None` for multiples of `p`.
pub fn inv_mod(a: u64, p: Prime) -> Option<u64> {
    let a = a % p.get();
    if a == 0 {
        None
    } else {
        Some(modpow(a as i128, p.get() - 2, p.get()))
    }
}

/// Deterministic Miller–Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &q in &BASES {
        if n % q == 0 {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &b in &BASES {
        let mut x = modpow(b as i128, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes in `lo..=hi`, ascending.
pub fn primes_between(lo: u64, hi: u64) -> impl Iterator<Item = Prime> {
    (lo..=hi).filter_map(|n| Prime::new(n).ok())
}

/// Small-factorial table mod `p`, enough for digit-level Lucas arithmetic.
#[derive(Debug, Clone)]
pub struct FactorialTable {
    p: Prime,
    fact: Vec<u64>,
    inv_fact: Vec<u64>,
}

impl FactorialTable {
    pub fn new(p: Prime) -> Self {
        let m = p.get();
        let len = m as usize;
        let mut fact = vec![1u64; len];
        for i in 1..len {
            fact[i] = mul_mod(fact[i - 1], i as u64, m);
        }
        let mut inv_fact = vec![1u64; len];
        inv_fact[len - 1] = inv_mod(fact[len - 1], p).expect("(p-1)! is a unit");
        for i in (1..len).rev() {
            inv_fact[i - 1] = mul_mod(inv_fact[i], i as u64, m);
        }
        FactorialTable { p, fact, inv_fact }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    /// `C(n, k) mod p` for digits `0 <= k, n < p`.
    #[inline]
    fn small_binom(&self, n: u64, k: u64) -> u64 {
        if k > n {
            return 0;
        }
        let m = self.p.get();
        mul_mod(
            self.fact[n as usize],
            mul_mod(self.inv_fact[k as usize], self.inv_fact[(n - k) as usize], m),
            m,
        )
    }

    /// Lucas' theorem, digit by digit in base `p`.
    pub fn binom(&self, mut n: u128, k: i128) -> u64 {
        if k < 0 || k as u128 > n {
            return 0;
        }
        let mut k = k as u128;
        let m = self.p.get();
        let pm = m as u128;
        let mut acc = 1u64;
        while k > 0 {
            let (nd, kd) = ((n % pm) as u64, (k % pm) as u64);
            if kd > nd {
                return 0;
            }
            acc = mul_mod(acc, self.small_binom(nd, kd), m);
            n /= pm;
            k /= pm;
        }
        acc
    }

    /// Multinomial coefficient by the digit-wise generalisation of Lucas:
    /// zero as soon as a base-`p` digit column carries.
    pub fn multinom(&self, parts: &[u64]) -> u64 {
        let m = self.p.get();
        let mut rest: Vec<u64> = parts.to_vec();
        let mut acc = 1u64;
        while rest.iter().any(|&x| x > 0) {
            let mut column = 0u64;
            let mut denom = 1u64;
            for x in rest.iter_mut() {
                let digit = *x % m;
                column += digit;
                if column >= m {
                    return 0;
                }
                denom = mul_mod(denom, self.inv_fact[digit as usize], m);
                *x /= m;
            }
            acc = mul_mod(acc, mul_mod(self.fact[column as usize], denom, m), m);
        }
        acc
    }

    /// `n! = p^valuation · u` with `u ≡ unit (mod p)`.
    ///
    /// Uses `n! = p^⌊n/p⌋ · ⌊n/p⌋! · ∏_{k ≤ n, p ∤ k} k` and Wilson's theorem
    /// for the coprime block products.
    pub fn decomp(&self, mut n: u64) -> FactorialDecomp {
        let m = self.p.get();
        let mut unit = 1u64;
        let mut valuation = 0u64;
        while n > 0 {
            let q = n / m;
            if q % 2 == 1 {
                unit = sub_mod(0, unit, m);
            }
            unit = mul_mod(unit, self.fact[(n % m) as usize], m);
            valuation += q;
            n = q;
        }
        FactorialDecomp { unit, valuation }
    }
}

pub fn binom_mod(n: u128, k: i128, p: Prime) -> u64 {
    // The digit loop needs only the small table, which is cheap for desk-scale p.
    FactorialTable::new(p).binom(n, k)
}

pub fn multinom_mod(parts: &[u64], p: Prime) -> u64 {
    FactorialTable::new(p).multinom(parts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorialDecomp {
    pub unit: u64,
    pub valuation: u64,
}

pub fn factorial_decomp(n: u64, p: Prime) -> FactorialDecomp {
    FactorialTable::new(p).decomp(n)
}

/// Residues of super Catalan numbers `T(m,n) = C(2m,m)·C(2n,n)/C(m+n,n)`
/// through factorial decompositions, so that `p`-divisible denominators cancel
/// by valuation instead of hitting a zero divisor.
#[derive(Debug, Clone)]
pub struct SuperCatalan {
    table: FactorialTable,
}

impl SuperCatalan {
    pub fn new(p: Prime) -> Self {
        SuperCatalan { table: FactorialTable::new(p) }
    }

    /// Canonical residue of `T(m, n)`.
    pub fn residue(&self, m: u64, n: u64) -> Result<u64, ModArithError> {
        let t = &self.table;
        let p = t.prime();
        let (f2m, f2n) = (t.decomp(2 * m), t.decomp(2 * n));
        let (fm, fn_, fmn) = (t.decomp(m), t.decomp(n), t.decomp(m + n));
        let valuation = (f2m.valuation + f2n.valuation) as i64
            - (fm.valuation + fn_.valuation + fmn.valuation) as i64;
        if valuation < 0 {
            return Err(ModArithError::NegativeValuation { m, n, p: p.get(), valuation });
        }
        if valuation > 0 {
            return Ok(0);
        }
        let md = p.get();
        let num = mul_mod(f2m.unit, f2n.unit, md);
        let den = mul_mod(mul_mod(fm.unit, fn_.unit, md), fmn.unit, md);
        let inv = inv_mod(den, p).expect("factorial units are coprime to p");
        Ok(mul_mod(num, inv, md))
    }

    /// Net `p`-adic valuation of `T(m, n)`.
    pub fn valuation(&self, m: u64, n: u64) -> i64 {
        let t = &self.table;
        (t.decomp(2 * m).valuation + t.decomp(2 * n).valuation) as i64
            - (t.decomp(m).valuation + t.decomp(n).valuation + t.decomp(m + n).valuation) as i64
    }
}

pub fn super_catalan_mod(m: u64, n: u64, p: Prime) -> Result<SymResidue, ModArithError> {
    SuperCatalan::new(p).residue(m, n).map(|r| SymResidue::from_canonical(r, p))
}
