//! Registry of sequence families with their kernels and brute-force oracles.
//!
//! Oracles never touch the constant-term engine: every summand is evaluated
//! from its defining formula with Lucas' theorem, factorial decompositions or,
//! for Motzkin numbers, a division-free row update of `(1+x+1/x)ⁿ mod p`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::ctengine::{EngineError, KernelSpec};
use crate::laurent::{LaurentPoly, Ring};
use crate::modarith::{add_mod, mul_mod, reduce_signed, FactorialTable, ModArithError, Prime, SuperCatalan, SymResidue};

/// Largest summation extent `r·p^a` for single sums.
pub const UNIVARIATE_CAP: u64 = 10_000_000;
/// Largest extent `r·p^a` for Motzkin sums; the row update is quadratic.
pub const MOTZKIN_CAP: u64 = 3 * 4096;
/// Largest `p^a` for double sums.
pub const DOUBLE_CAP: u64 = 2000;
/// Largest `p^a` for triple sums.
pub const TRIPLE_CAP: u64 = 150;
/// Largest `p^a` for sums over four or five indices.
pub const MULTI_CAP: u64 = 30;
/// Largest supported multinomial arity.
pub const MAX_NVARS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("{family}: summation extent {extent} exceeds cap {cap}")]
    CapExceeded { family: String, extent: String, cap: u64 },
    #[error("{family}: {what}")]
    Unsupported { family: String, what: String },
    #[error("{family}: expected {expected} indices, got {got}")]
    Arity { family: String, expected: usize, got: usize },
    #[error(transparent)]
    ModArith(#[from] ModArithError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyId {
    CentralBinomial,
    Catalan,
    Motzkin,
    BinomialSquare,
    Trinomial,
    Multinomial,
    WeightedCentral,
    WeightedQuartic,
    SuperCatalan,
    WeightedSuperCatalan,
}

impl FamilyId {
    pub const ALL: [FamilyId; 10] = [
        FamilyId::CentralBinomial,
        FamilyId::Catalan,
        FamilyId::Motzkin,
        FamilyId::BinomialSquare,
        FamilyId::Trinomial,
        FamilyId::Multinomial,
        FamilyId::WeightedCentral,
        FamilyId::WeightedQuartic,
        FamilyId::SuperCatalan,
        FamilyId::WeightedSuperCatalan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::CentralBinomial => "central_binomial",
            FamilyId::Catalan => "catalan",
            FamilyId::Motzkin => "motzkin",
            FamilyId::BinomialSquare => "binomial_square",
            FamilyId::Trinomial => "trinomial",
            FamilyId::Multinomial => "multinomial",
            FamilyId::WeightedCentral => "weighted_central",
            FamilyId::WeightedQuartic => "weighted_quartic",
            FamilyId::SuperCatalan => "super_catalan",
            FamilyId::WeightedSuperCatalan => "weighted_super_catalan",
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyId {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FamilyId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| FamilyError::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    UnivariateKernel,
    DoubleSum,
    TripleSum,
    MultiSum,
    Weighted,
    SuperCatalan,
}

/// One registered family.
///
/// `weight = (c1, c0)` multiplies each summand by `c1·n + c0`, or by
/// `c1·(m+n) + c0` for double sums. `cap` bounds `r·p^a` for single sums and
/// `p^a` otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySpec {
    id: FamilyId,
    kind: FamilyKind,
    kernel: Option<KernelSpec>,
    weight: Option<(i64, i64)>,
    nvars: usize,
    cap: u64,
}

fn uni(terms: &[(i64, i64)]) -> LaurentPoly {
    LaurentPoly::univariate(Ring::Integer, terms)
}

fn kernel(prefactor: &[(i64, i64)], base: &[(i64, i64)]) -> KernelSpec {
    KernelSpec::new(uni(prefactor), uni(base), 1, 0).expect("registered kernels are valid")
}

impl FamilySpec {
    /// The family `id`; `multinomial` gets four variables.
    pub fn get(id: FamilyId) -> FamilySpec {
        let central = [(0, 2), (1, 1), (-1, 1)];
        let (kind, kernel, weight, nvars, cap) = match id {
            FamilyId::CentralBinomial => {
                (FamilyKind::UnivariateKernel, Some(kernel(&[(0, 1)], &central)), None, 1, UNIVARIATE_CAP)
            }
            FamilyId::Catalan => (
                FamilyKind::UnivariateKernel,
                Some(kernel(&[(0, 1), (1, -1)], &central)),
                None,
                1,
                UNIVARIATE_CAP,
            ),
            FamilyId::Motzkin => (
                FamilyKind::UnivariateKernel,
                Some(kernel(&[(0, 1), (2, -1)], &[(0, 1), (1, 1), (-1, 1)])),
                None,
                1,
                MOTZKIN_CAP,
            ),
            FamilyId::BinomialSquare => (FamilyKind::DoubleSum, None, None, 2, DOUBLE_CAP),
            FamilyId::Trinomial => (FamilyKind::TripleSum, None, None, 3, TRIPLE_CAP),
            FamilyId::Multinomial => return FamilySpec::multinomial(4).expect("4 is a valid arity"),
            FamilyId::WeightedCentral => (FamilyKind::Weighted, None, Some((3, 1)), 1, UNIVARIATE_CAP),
            FamilyId::WeightedQuartic => (FamilyKind::Weighted, None, Some((5, 1)), 1, UNIVARIATE_CAP),
            FamilyId::SuperCatalan => (FamilyKind::SuperCatalan, None, None, 2, DOUBLE_CAP),
            FamilyId::WeightedSuperCatalan => (FamilyKind::SuperCatalan, None, Some((3, 1)), 2, DOUBLE_CAP),
        };
        FamilySpec { id, kind, kernel, weight, nvars, cap }
    }

    /// Multinomial sums over `nvars ∈ [2, 5]` indices.
    pub fn multinomial(nvars: usize) -> Result<FamilySpec, FamilyError> {
        let cap = match nvars {
            2 => DOUBLE_CAP,
            3 => TRIPLE_CAP,
            4 | 5 => MULTI_CAP,
            _ => {
                return Err(FamilyError::Unsupported {
                    family: FamilyId::Multinomial.name().into(),
                    what: format!("nvars = {nvars} outside 2..={MAX_NVARS}"),
                })
            }
        };
        Ok(FamilySpec {
            id: FamilyId::Multinomial,
            kind: FamilyKind::MultiSum,
            kernel: None,
            weight: None,
            nvars,
            cap,
        })
    }

    /// Looks a family up by its stable name; `nvars` only affects
    /// `multinomial`.
    pub fn by_name(name: &str, nvars: usize) -> Result<FamilySpec, FamilyError> {
        match name.parse::<FamilyId>()? {
            FamilyId::Multinomial => FamilySpec::multinomial(nvars),
            id => Ok(FamilySpec::get(id)),
        }
    }

    pub fn id(&self) -> FamilyId {
        self.id
    }

    pub fn name(&self) -> &'static str {
        self.id.name()
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    /// Kernel with `r = 1`, `d = 0`.
    pub fn kernel(&self) -> Option<&KernelSpec> {
        self.kernel.as_ref()
    }

    pub fn weight(&self) -> Option<(i64, i64)> {
        self.weight
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    /// Number of summation indices.
    pub fn arity(&self) -> usize {
        self.nvars
    }

    /// Whether the sum runs over `n < r·p^a` (single sums) rather than a box
    /// `[0, p^a)^k`.
    pub fn is_single_sum(&self) -> bool {
        self.nvars == 1
    }

    pub fn supports_shift(&self) -> bool {
        self.id == FamilyId::CentralBinomial
    }

    pub fn supports_multiplier(&self) -> bool {
        self.is_single_sum()
    }

    /// Kernel instantiated at `(r, d)`, for families that have one.
    pub fn kernel_with(&self, r: u64, d: i64) -> Option<Result<KernelSpec, EngineError>> {
        self.kernel.as_ref().map(|k| k.with(r, d))
    }

    /// Validates `(p, a, r, d)` against the family's caps and parameter
    /// support; returns the summation extent per index.
    pub fn check_point(&self, p: Prime, a: u32, r: u64, d: i64) -> Result<u64, FamilyError> {
        let unsupported = |what: String| FamilyError::Unsupported { family: self.name().into(), what };
        if r == 0 {
            return Err(unsupported("r must be positive".into()));
        }
        if r != 1 && !self.supports_multiplier() {
            return Err(unsupported(format!("r = {r} unsupported, the sum is fixed to r = 1")));
        }
        if d != 0 && !self.supports_shift() {
            return Err(unsupported(format!("d = {d} unsupported, only central_binomial is shifted")));
        }
        let extent = p.checked_pow(a).and_then(|pa| pa.checked_mul(r)).filter(|&e| e <= self.cap);
        extent.ok_or_else(|| FamilyError::CapExceeded {
            family: self.name().into(),
            extent: format!("{}·{}^{}", r, p, a),
            cap: self.cap,
        })
    }

    /// Residue in `[0, p)` of one summand (with `d = 0`).
    pub fn term(&self, indices: &[u64], p: Prime) -> Result<u64, FamilyError> {
        self.term_shifted(indices, 0, p)
    }

    /// Residue in `[0, p)` of one summand; `d` shifts `central_binomial`
    /// to `C(2n, n+d)`.
    pub fn term_shifted(&self, indices: &[u64], d: i64, p: Prime) -> Result<u64, FamilyError> {
        if indices.len() != self.arity() {
            return Err(FamilyError::Arity { family: self.name().into(), expected: self.arity(), got: indices.len() });
        }
        if d != 0 && !self.supports_shift() {
            return Err(FamilyError::Unsupported {
                family: self.name().into(),
                what: format!("d = {d} unsupported"),
            });
        }
        if self.id == FamilyId::Motzkin {
            let n = indices[0];
            let mut rows = MotzkinRows::new(p);
            return Ok(rows.nth(n as usize).expect("iterator is infinite"));
        }
        let mut ev = TermEvaluator::new(self, p);
        Ok(ev.eval(indices, d)?)
    }
}

/// All registered families, with `multinomial` at each arity `2..=5`.
pub fn registry() -> Vec<FamilySpec> {
    let mut out = Vec::new();
    for id in FamilyId::ALL {
        if id == FamilyId::Multinomial {
            out.extend((2..=MAX_NVARS).map(|k| FamilySpec::multinomial(k).expect("valid arity")));
        } else {
            out.push(FamilySpec::get(id));
        }
    }
    out
}

/// Per-prime term evaluator with precomputed factorial tables.
struct TermEvaluator<'a> {
    spec: &'a FamilySpec,
    p: Prime,
    table: FactorialTable,
    super_catalan: Option<SuperCatalan>,
}

impl<'a> TermEvaluator<'a> {
    fn new(spec: &'a FamilySpec, p: Prime) -> Self {
        let super_catalan = (spec.kind == FamilyKind::SuperCatalan).then(|| SuperCatalan::new(p));
        TermEvaluator { spec, p, table: FactorialTable::new(p), super_catalan }
    }

    fn weight(&self, index_sum: u64) -> u64 {
        match self.spec.weight {
            None => 1,
            Some((c1, c0)) => reduce_signed(c1 as i128 * index_sum as i128 + c0 as i128, self.p.get()),
        }
    }

    fn eval(&mut self, idx: &[u64], d: i64) -> Result<u64, ModArithError> {
        let m = self.p.get();
        let t = &self.table;
        let base = match self.spec.id {
            FamilyId::CentralBinomial => t.binom(2 * idx[0] as u128, idx[0] as i128 + d as i128),
            FamilyId::Catalan => {
                let n = idx[0] as u128;
                let k = idx[0] as i128;
                add_mod(t.binom(2 * n, k), m - t.binom(2 * n, k - 1), m)
            }
            FamilyId::Motzkin => unreachable!("Motzkin terms come from MotzkinRows"),
            FamilyId::BinomialSquare => {
                let c = t.binom((idx[0] + idx[1]) as u128, idx[0] as i128);
                mul_mod(c, c, m)
            }
            FamilyId::Trinomial | FamilyId::Multinomial => t.multinom(idx),
            FamilyId::WeightedCentral => t.binom(2 * idx[0] as u128, idx[0] as i128),
            FamilyId::WeightedQuartic => t.binom(4 * idx[0] as u128, 2 * idx[0] as i128),
            FamilyId::SuperCatalan | FamilyId::WeightedSuperCatalan => {
                self.super_catalan.as_ref().expect("built for super Catalan kinds").residue(idx[0], idx[1])?
            }
        };
        Ok(mul_mod(base, self.weight(idx.iter().sum()), m))
    }
}

/// Motzkin numbers `M₀, M₁, …` mod `p` from the coefficient row of
/// `(1+x+1/x)ⁿ`: `Mₙ = [x⁰] − [x²]`.
#[derive(Debug, Clone)]
pub struct MotzkinRows {
    p: u64,
    row: Vec<u64>,
    scratch: Vec<u64>,
}

impl MotzkinRows {
    pub fn new(p: Prime) -> Self {
        MotzkinRows { p: p.get(), row: vec![1 % p.get()], scratch: Vec::new() }
    }

    /// Current row, exponents `−n..=n`.
    pub fn row(&self) -> &[u64] {
        &self.row
    }

    fn current(&self) -> u64 {
        let center = self.row.len() / 2;
        let two = if center >= 2 { self.row[center - 2] } else { 0 };
        add_mod(self.row[center], self.p - two, self.p)
    }

    fn advance(&mut self) {
        let m = self.p;
        let len = self.row.len();
        self.scratch.clear();
        self.scratch.resize(len + 2, 0);
        for (i, &c) in self.row.iter().enumerate() {
            for j in i..i + 3 {
                self.scratch[j] = add_mod(self.scratch[j], c, m);
            }
        }
        std::mem::swap(&mut self.row, &mut self.scratch);
    }
}

impl Iterator for MotzkinRows {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let value = self.current();
        self.advance();
        Some(value)
    }
}

/// Full brute-force sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OracleSum {
    pub residue: SymResidue,
    /// Number of summands accumulated.
    pub terms: u64,
}

/// `Σ` of the family's summands over `n < r·p^a` (single sums) or over the
/// box `[0, p^a)^k`, reduced to a symmetric residue.
pub fn oracle_sum(f: &FamilySpec, p: Prime, a: u32, r: u64, d: i64) -> Result<OracleSum, FamilyError> {
    let extent = f.check_point(p, a, r, d)?;
    let m = p.get();
    let mut acc = 0u64;
    let mut terms = 0u64;
    if f.id == FamilyId::Motzkin {
        for value in MotzkinRows::new(p).take(extent as usize) {
            acc = add_mod(acc, value, m);
            terms += 1;
        }
    } else {
        let mut ev = TermEvaluator::new(f, p);
        let mut idx = vec![0u64; f.arity()];
        'outer: loop {
            acc = add_mod(acc, ev.eval(&idx, d)?, m);
            terms += 1;
            for slot in idx.iter_mut().rev() {
                *slot += 1;
                if *slot < extent {
                    continue 'outer;
                }
                *slot = 0;
            }
            break;
        }
    }
    Ok(OracleSum { residue: SymResidue::from_canonical(acc, p), terms })
}
