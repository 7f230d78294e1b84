//! Constant-term evaluation of partial sums modulo a prime.
//!
//! For a kernel `(F, B, r, d)` the engine evaluates
//!
//! ```text
//! S = Σ_{n=0}^{r·p^a − 1} CT[ F · Bⁿ · x^{−d} ]  (mod p)
//! ```
//!
//! without ever materializing `p^a`:
//!
//! 1. geometric closure: `S = CT[ F·x^{−d}·(B^{r·p^a} − 1) / (B − 1) ]`;
//! 2. Frobenius: `B^{r·p^a} ≡ lift(B^r)` where `lift` sends `x^e` to
//!    `x^{e·p^a}`; exponents become [`SymIndex`] values `α·p^a + β`;
//! 3. denominator clearing: `B − 1 = x^{−t}·D` with `D(0) ≠ 0`, so that
//!    `S = Σ c·[x^{−(α·p^a + β + t)}] 1/D` over the numerator monomials;
//! 4. `1/D mod p` is eventually periodic, so coefficients at indices of size
//!    `p^a` are read off after reducing the index with `p^a mod period`.
//!
//! Monomials with `α > 0` land at negative indices and contribute nothing;
//! the guard in [`extract_numerator`] checks that this sign rule agrees with
//! the materialized index whenever `p^a` fits in a machine word.
//!
//! The module also holds the special-purpose pieces for the diagonal of
//! `1/((1+y+xy)(1+x+xy))` and the alternating-sum coefficient identity behind
//! the multinomial sums.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::laurent::{LaurentError, LaurentPoly, Ring};
use crate::modarith::{modpow, mul_mod, symmetric_rep, add_mod, inv_mod, Prime, SymResidue};

/// Largest `|α|` a [`SymIndex`] may carry.
pub const SYM_ALPHA_MAX: i64 = 64;
/// Largest `|β|` a [`SymIndex`] may carry.
pub const SYM_BETA_MAX: i64 = 1 << 32;
/// Default bound on the period searched for in `1/D mod p`.
pub const DEFAULT_PERIOD_SEARCH: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("kernel base equals 1, the geometric sum has no closed form")]
    BaseIsOne,
    #[error("base − 1 = {0} cannot be cleared to a denominator with nonzero constant term")]
    NotClearable(String),
    #[error("denominator constant term vanishes mod {0}")]
    DenominatorNotUnit(Prime),
    #[error("no period ≤ {limit} found for 1/({denominator}) mod {p}")]
    NoPeriod { denominator: String, p: Prime, limit: usize },
    #[error(
        "guard violated: monomial x^({index}) with t = {t} is not decided by the sign of alpha at p = {p}, a = {a}"
    )]
    GuardViolation { index: SymIndex, t: u32, p: Prime, a: u32 },
    #[error("symbolic exponent out of range: alpha = {alpha}, beta = {beta}")]
    SymIndexRange { alpha: i64, beta: i64 },
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

/// Symbolic exponent `α·p^a + β`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SymIndex {
    alpha: i64,
    beta: i64,
}

impl SymIndex {
    pub fn new(alpha: i64, beta: i64) -> Result<Self, EngineError> {
        if alpha.abs() > SYM_ALPHA_MAX || beta.abs() > SYM_BETA_MAX {
            return Err(EngineError::SymIndexRange { alpha, beta });
        }
        Ok(SymIndex { alpha, beta })
    }

    pub fn alpha(self) -> i64 {
        self.alpha
    }

    pub fn beta(self) -> i64 {
        self.beta
    }

    pub fn checked_add(self, other: SymIndex) -> Result<Self, EngineError> {
        Self::new(self.alpha + other.alpha, self.beta + other.beta)
    }

    pub fn shift_beta(self, by: i64) -> Result<Self, EngineError> {
        Self::new(self.alpha, self.beta + by)
    }

    /// `α·p^a + β` as a concrete integer, if it fits.
    pub fn materialize(self, p: Prime, a: u32) -> Option<i128> {
        let pa = i128::from(p.checked_pow(a)?);
        (self.alpha as i128).checked_mul(pa)?.checked_add(self.beta as i128)
    }
}

impl fmt::Display for SymIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = match self.alpha {
            0 => String::new(),
            1 => "p^a".to_string(),
            -1 => "-p^a".to_string(),
            k => format!("{k}p^a"),
        };
        match (head.is_empty(), self.beta) {
            (true, b) => write!(f, "{b}"),
            (false, 0) => write!(f, "{head}"),
            (false, b) if b > 0 => write!(f, "{head}+{b}"),
            (false, b) => write!(f, "{head}{b}"),
        }
    }
}

/// One term `coef · x^exp` of a lifted numerator, `coef ∈ [1, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SymMonomial {
    pub coef: u64,
    pub exp: SymIndex,
}

/// Univariate Laurent polynomial over `Z/pZ` whose exponents are symbolic in
/// `p^a`. Terms with distinct `(α, β)` are never merged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymPoly {
    prime: Prime,
    a: u32,
    terms: BTreeMap<SymIndex, u64>,
}

impl SymPoly {
    pub fn zero(prime: Prime, a: u32) -> Self {
        SymPoly { prime, a, terms: BTreeMap::new() }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn exponent(&self) -> u32 {
        self.a
    }

    pub fn add_term(&mut self, idx: SymIndex, c: u64) {
        let m = self.prime.get();
        let slot = self.terms.entry(idx).or_insert(0);
        *slot = add_mod(*slot, c % m, m);
        if *slot == 0 {
            self.terms.remove(&idx);
        }
    }

    pub fn coeff(&self, idx: SymIndex) -> u64 {
        self.terms.get(&idx).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn monomials(&self) -> Vec<SymMonomial> {
        self.terms.iter().map(|(&exp, &coef)| SymMonomial { coef, exp }).collect()
    }

    pub fn mul(&self, other: &SymPoly) -> Result<SymPoly, EngineError> {
        if (self.prime, self.a) != (other.prime, other.a) {
            return Err(EngineError::InvalidArgument(
                "symbolic polynomials over different (p, a)".into(),
            ));
        }
        let m = self.prime.get();
        let mut out = SymPoly::zero(self.prime, self.a);
        for (&ea, &ca) in &self.terms {
            for (&eb, &cb) in &other.terms {
                out.add_term(ea.checked_add(eb)?, mul_mod(ca, cb, m));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, mut n: u64) -> Result<SymPoly, EngineError> {
        let mut acc = SymPoly::zero(self.prime, self.a);
        acc.add_term(SymIndex::new(0, 0)?, 1);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Product with an ordinary univariate polynomial over the same field;
    /// its exponents shift the `β` components.
    pub fn mul_laurent(&self, q: &LaurentPoly) -> Result<SymPoly, EngineError> {
        if q.nvars() != 1 {
            return Err(LaurentError::NotUnivariate(q.nvars()).into());
        }
        if q.ring() != Ring::Mod(self.prime) {
            return Err(LaurentError::WrongRing { expected: self.prime, found: q.ring() }.into());
        }
        let m = self.prime.get();
        let mut out = SymPoly::zero(self.prime, self.a);
        for (&idx, &c) in &self.terms {
            for (e, qc) in q.terms() {
                let qc = qc.to_u64().expect("canonical residue");
                out.add_term(idx.shift_beta(e.as_slice()[0])?, mul_mod(c, qc, m));
            }
        }
        Ok(out)
    }

    /// Expands `p^a` into concrete exponents.
    pub fn materialize(&self) -> Result<LaurentPoly, EngineError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (&idx, &c) in &self.terms {
            let e = idx
                .materialize(self.prime, self.a)
                .and_then(|e| i64::try_from(e).ok())
                .ok_or(EngineError::SymIndexRange { alpha: idx.alpha, beta: idx.beta })?;
            terms.push((vec![e], c));
        }
        Ok(LaurentPoly::from_terms(Ring::Mod(self.prime), 1, terms))
    }
}

/// Summand description `CT[F · Bⁿ · x^{−d}]` summed over `n < r·p^a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelSpec {
    prefactor: LaurentPoly,
    base: LaurentPoly,
    r: u64,
    d: i64,
}

impl KernelSpec {
    pub fn new(prefactor: LaurentPoly, base: LaurentPoly, r: u64, d: i64) -> Result<Self, EngineError> {
        for (name, poly) in [("prefactor", &prefactor), ("base", &base)] {
            if poly.nvars() != 1 || poly.ring() != Ring::Integer {
                return Err(EngineError::InvalidKernel(format!(
                    "{name} must be a univariate integer polynomial"
                )));
            }
        }
        if r == 0 {
            return Err(EngineError::InvalidKernel("r must be positive".into()));
        }
        clear_denominator(&base)?;
        Ok(KernelSpec { prefactor, base, r, d })
    }

    pub fn prefactor(&self) -> &LaurentPoly {
        &self.prefactor
    }

    pub fn base(&self) -> &LaurentPoly {
        &self.base
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    /// Same kernel with a different multiplier and shift.
    pub fn with(&self, r: u64, d: i64) -> Result<Self, EngineError> {
        KernelSpec::new(self.prefactor.clone(), self.base.clone(), r, d)
    }

    /// The summand `CT[F · Bⁿ · x^{−d}]` evaluated directly over the integers.
    pub fn summand(&self, n: u64) -> BigInt {
        let shifted = self.prefactor.shift(&[-self.d]).expect("shift fits");
        (&shifted * &self.base.pow(n)).ct()
    }
}

/// Writes `base − 1 = x^{−t}·D` with `D` a polynomial, `D(0) ≠ 0`, `t ≥ 0`
/// minimal.
pub fn clear_denominator(base: &LaurentPoly) -> Result<(u32, LaurentPoly), EngineError> {
    if base.nvars() != 1 {
        return Err(LaurentError::NotUnivariate(base.nvars()).into());
    }
    let diff = base - &LaurentPoly::one(base.ring(), 1);
    if diff.is_zero() {
        return Err(EngineError::BaseIsOne);
    }
    let low = diff.min_exponents()[0];
    if low > 0 {
        return Err(EngineError::NotClearable(diff.to_string()));
    }
    let t = u32::try_from(-low).map_err(|_| EngineError::NotClearable(diff.to_string()))?;
    Ok((t, diff.shift(&[-low])?))
}

/// Maclaurin coefficients of `1/D mod p`, stored as one preperiod and one
/// period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicSeries {
    denominator: LaurentPoly,
    prime: Prime,
    preperiod: usize,
    period: usize,
    coeffs: Vec<u64>,
}

impl PeriodicSeries {
    pub fn denominator(&self) -> &LaurentPoly {
        &self.denominator
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn preperiod(&self) -> usize {
        self.preperiod
    }

    pub fn period(&self) -> usize {
        self.period
    }

    /// The stored table, `preperiod + period` residues.
    pub fn table(&self) -> &[u64] {
        &self.coeffs
    }

    /// Coefficient of `x^i` in `1/D mod p`.
    pub fn coeff(&self, i: u64) -> u64 {
        let (pre, per) = (self.preperiod as u64, self.period as u64);
        if i < pre {
            self.coeffs[i as usize]
        } else {
            self.coeffs[(pre + (i - pre) % per) as usize]
        }
    }

    /// Coefficient at index `k·p^a + offset`, which the caller guarantees to
    /// be at least the preperiod. `p^a` is only used modulo the period.
    pub fn coeff_at_power(&self, k: u64, p: Prime, a: u32, offset: i64) -> u64 {
        let per = self.period as i128;
        let pre = self.preperiod as i128;
        let pa_mod = modpow(p.get() as i128, a as u64, self.period as u64) as i128;
        let pos = (k as i128 % per * pa_mod + offset as i128 - pre).rem_euclid(per);
        self.coeffs[(pre + pos) as usize]
    }
}

/// Coefficient stream of `1/D mod p` from the recurrence induced by `D`.
struct SeriesStream {
    p: u64,
    d: Vec<u64>,
    inv_d0: u64,
}

impl SeriesStream {
    fn new(d: Vec<u64>, p: Prime) -> Option<Self> {
        let inv_d0 = inv_mod(d[0], p)?;
        Some(SeriesStream { p: p.get(), d, inv_d0 })
    }

    fn take(&self, n: usize) -> Vec<u64> {
        let m = self.p;
        let mut c: Vec<u64> = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = if i == 0 { 1 } else { 0 };
            for j in 1..self.d.len().min(i + 1) {
                acc = add_mod(acc, m - mul_mod(self.d[j], c[i - j], m), m);
            }
            c.push(mul_mod(acc, self.inv_d0, m));
        }
        c
    }
}

/// Finds the minimal `(preperiod, period)` of `1/D mod p` with
/// `period ≤ search_limit`.
///
/// The generated window is long enough that a match over it covers more than
/// `deg D` consecutive positions past the preperiod; since the recurrence
/// state is the last `deg D` coefficients, this proves periodicity for all
/// indices, not just the window.
pub fn series_period(d: &LaurentPoly, p: Prime, search_limit: usize) -> Result<PeriodicSeries, EngineError> {
    if d.nvars() != 1 {
        return Err(LaurentError::NotUnivariate(d.nvars()).into());
    }
    if search_limit == 0 {
        return Err(EngineError::InvalidArgument("search limit must be positive".into()));
    }
    let dm = d.reduce_mod(p)?;
    if dm.min_exponents()[0] < 0 {
        return Err(EngineError::NotClearable(d.to_string()));
    }
    let deg = dm.leading_term().map(|(e, _)| e.as_slice()[0]).unwrap_or(0) as usize;
    let mut dense = vec![0u64; deg + 1];
    for (e, c) in dm.terms() {
        dense[e.as_slice()[0] as usize] = c.to_u64().expect("canonical residue");
    }
    let stream = SeriesStream::new(dense, p).ok_or(EngineError::DenominatorNotUnit(p))?;

    let window = 4 * search_limit + deg + 2;
    let c = stream.take(window);
    for period in 1..=search_limit {
        let preperiod =
            (0..=search_limit).find(|&s| (s..window - period).all(|i| c[i] == c[i + period]));
        if let Some(preperiod) = preperiod {
            return Ok(PeriodicSeries {
                denominator: dm,
                prime: p,
                preperiod,
                period,
                coeffs: c[..preperiod + period].to_vec(),
            });
        }
    }
    Err(EngineError::NoPeriod { denominator: d.to_string(), p, limit: search_limit })
}

fn finish_numerator(k: &KernelSpec, lifted: SymPoly, p: Prime) -> Result<Vec<SymMonomial>, EngineError> {
    let mut numerator = lifted;
    numerator.add_term(SymIndex::new(0, 0)?, p.get() - 1);
    let f = k.prefactor.reduce_mod(p)?.shift(&[-k.d])?;
    Ok(numerator.mul_laurent(&f)?.monomials())
}

/// Lifted numerator `F·x^{−d}·(lift(B^r) − 1)` as symbolic monomials mod `p`.
///
/// `B^r` is expanded exactly over the integers before reduction and lifting.
pub fn build_numerator(k: &KernelSpec, p: Prime, a: u32) -> Result<Vec<SymMonomial>, EngineError> {
    let base_r = k.base.pow(k.r).reduce_mod(p)?;
    finish_numerator(k, base_r.frobenius_lift(p, a)?, p)
}

/// Same numerator computed as `lift(B)^r` with symbolic multiplication.
/// Agrees with [`build_numerator`] because lifting is a ring homomorphism
/// mod `p`.
pub fn build_numerator_restructured(
    k: &KernelSpec,
    p: Prime,
    a: u32,
) -> Result<Vec<SymMonomial>, EngineError> {
    let lifted = k.base.reduce_mod(p)?.frobenius_lift(p, a)?.pow(k.r)?;
    finish_numerator(k, lifted, p)
}

/// `Σ_{n < r·p^a} CT[F·Bⁿ·x^{−d}] mod p` through the constant-term pipeline.
pub fn extract(k: &KernelSpec, p: Prime, a: u32) -> Result<SymResidue, EngineError> {
    let numerator = build_numerator(k, p, a)?;
    extract_numerator(k, &numerator, p, a)
}

/// Coefficient extraction `CT[G·x^t/D]` for a prepared numerator `G`.
pub fn extract_numerator(
    k: &KernelSpec,
    numerator: &[SymMonomial],
    p: Prime,
    a: u32,
) -> Result<SymResidue, EngineError> {
    let (t, d) = clear_denominator(&k.base)?;
    let series = series_period(&d, p, DEFAULT_PERIOD_SEARCH)?;
    check_guard(numerator, t, &series, p, a)?;

    let m = p.get();
    let mut acc = 0u64;
    for mono in numerator {
        let SymIndex { alpha, beta } = mono.exp;
        // Wanted: [x^{-(α·p^a + β + t)}] 1/D.
        let offset = -(beta + t as i64);
        let c = match alpha.signum() {
            1 => 0,
            0 if offset < 0 => 0,
            0 => series.coeff(offset as u64),
            _ => series.coeff_at_power(alpha.unsigned_abs(), p, a, offset),
        };
        acc = add_mod(acc, mul_mod(mono.coef, c, m), m);
    }
    Ok(SymResidue::from_canonical(acc, p))
}

/// Checks that the sign-of-alpha rule agrees with the concrete index for
/// every monomial. When `p^a` does not fit in 64 bits it dwarfs every `β`
/// and the rule holds trivially.
fn check_guard(
    numerator: &[SymMonomial],
    t: u32,
    series: &PeriodicSeries,
    p: Prime,
    a: u32,
) -> Result<(), EngineError> {
    let Some(pa) = p.checked_pow(a) else { return Ok(()) };
    for mono in numerator {
        let SymIndex { alpha, beta } = mono.exp;
        let index = -(alpha as i128) * pa as i128 - beta as i128 - t as i128;
        let ok = match alpha.signum() {
            1 => index < 0,
            -1 => index >= series.preperiod as i128,
            _ => true,
        };
        if !ok {
            return Err(EngineError::GuardViolation { index: mono.exp, t, p, a });
        }
    }
    Ok(())
}

/// Linear recurrence `Σ coefficients[i]·a(n+i) = 0` with initial values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecurrenceFixture {
    pub coefficients: [i64; 3],
    pub initial: [i64; 2],
}

/// Diagonal coefficients of `1/((1+y+xy)(1+x+xy))`:
/// `a(n+2) + a(n+1) + a(n) = 0`, `a(0) = 1`, `a(1) = −1`.
pub const DIAGONAL_RECURRENCE: RecurrenceFixture =
    RecurrenceFixture { coefficients: [1, 1, 1], initial: [1, -1] };

impl RecurrenceFixture {
    /// First `count` terms.
    pub fn terms(&self, count: usize) -> Vec<i64> {
        let [c0, c1, c2] = self.coefficients;
        let mut out: Vec<i64> = self.initial.iter().copied().take(count).collect();
        while out.len() < count {
            let n = out.len();
            out.push(-(c0 * out[n - 2] + c1 * out[n - 1]) / c2);
        }
        out
    }
}

/// `[x^{p^a−1} y^{p^a−1}] 1/((1+y+xy)(1+x+xy))` reduced mod `p`, read off
/// the period-3 solution of [`DIAGONAL_RECURRENCE`].
pub fn diagonal_residue(p: Prime, a: u32) -> SymResidue {
    let pattern = DIAGONAL_RECURRENCE.terms(3);
    let n_mod3 = (modpow(p.get() as i128, a as u64, 3) + 2) % 3;
    symmetric_rep(pattern[n_mod3 as usize] as i128, p)
}

/// Diagonal coefficients `a(0..=limit)` of `1/((1+y+xy)(1+x+xy))` from an
/// exact truncated bivariate series inversion.
pub fn diagonal_bruteforce(limit: usize) -> Result<Vec<i64>, EngineError> {
    if limit > 64 {
        return Err(EngineError::InvalidArgument(format!("limit {limit} exceeds 64")));
    }
    let z = Ring::Integer;
    let f1 = LaurentPoly::from_terms(z, 2, [(vec![0, 0], 1), (vec![0, 1], 1), (vec![1, 1], 1)]);
    let f2 = LaurentPoly::from_terms(z, 2, [(vec![0, 0], 1), (vec![1, 0], 1), (vec![1, 1], 1)]);
    let den = &f1 * &f2;
    let den_terms: Vec<(usize, usize, BigInt)> = den
        .terms()
        .map(|(e, c)| (e.as_slice()[0] as usize, e.as_slice()[1] as usize, c.clone()))
        .collect();
    let d00 = den.ct();

    let n = limit + 1;
    let mut q = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = if i == 0 && j == 0 { BigInt::from(1) } else { BigInt::zero() };
            for (di, dj, c) in &den_terms {
                if (*di, *dj) != (0, 0) && *di <= i && *dj <= j {
                    acc -= c * &q[i - di][j - dj];
                }
            }
            let (quot, rem) = acc.div_rem(&d00);
            debug_assert!(rem.is_zero());
            q[i][j] = quot;
        }
    }
    (0..n)
        .map(|i| {
            q[i][i]
                .to_i64()
                .ok_or_else(|| EngineError::InvalidArgument("diagonal coefficient overflow".into()))
        })
        .collect()
}

/// Coefficient of `∏ x_i^{L−1}` in `∏_i (Σ_{j≠i} x_j^L) / (Σ_{j≠i} x_j)`.
///
/// For three variables these are the pairwise factors `(y^L+z^L)/(y+z)` etc.,
/// exact over the integers for odd `L`, and the coefficient is the
/// alternating sum `Σ_i (−1)^{3i} = 1`. With two variables the factors are
/// monomials. From four variables on the complementary sums divide only
/// modulo `p` when `L = p^k`, so the product is formed over `Z/pZ` and the
/// symmetric residue is returned.
pub fn multinomial_coeff_check(l: u64, nvars: usize) -> Result<i64, EngineError> {
    if l % 2 == 0 {
        return Err(EngineError::InvalidArgument(format!("L = {l} is even; the division is not exact")));
    }
    if !(2..=5).contains(&nvars) {
        return Err(EngineError::InvalidArgument(format!("nvars = {nvars} outside 2..=5")));
    }
    if l > 31 {
        return Err(EngineError::InvalidArgument(format!("L = {l} exceeds desk-scale cap 31")));
    }
    let ring = if nvars <= 3 {
        Ring::Integer
    } else {
        let p = prime_power_base(l).ok_or_else(|| {
            EngineError::InvalidArgument(format!("L = {l} must be a prime power for {nvars} variables"))
        })?;
        Ring::Mod(p)
    };
    let l_exp = l as i64;
    let mut product = LaurentPoly::one(ring, nvars);
    for i in 0..nvars {
        let others = (0..nvars).filter(|&j| j != i);
        let num = LaurentPoly::from_terms(
            ring,
            nvars,
            others.clone().map(|j| {
                let mut e = vec![0; nvars];
                e[j] = l_exp;
                (e, 1)
            }),
        );
        let den = LaurentPoly::from_terms(
            ring,
            nvars,
            others.map(|j| {
                let mut e = vec![0; nvars];
                e[j] = 1;
                (e, 1)
            }),
        );
        product = product.checked_mul(&num.exact_div(&den)?)?;
    }
    let c = product.coeff(&vec![l_exp - 1; nvars])?;
    match ring {
        Ring::Integer => c
            .to_i64()
            .ok_or_else(|| EngineError::InvalidArgument("coefficient overflow".into())),
        Ring::Mod(p) => Ok(symmetric_rep(c.to_i128().expect("canonical residue"), p).value()),
    }
}

/// `p` when `n = p^k` for an odd prime `p` and `k ≥ 1`.
fn prime_power_base(n: u64) -> Option<Prime> {
    let p = (3..=n).step_by(2).find(|q| n % q == 0)?;
    let mut rest = n;
    while rest % p == 0 {
        rest /= p;
    }
    (rest == 1).then(|| Prime::new(p).ok()).flatten()
}
