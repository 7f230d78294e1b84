//! Case-table discovery, audits of printed tables, and conjecture checks.
//!
//! A case table maps `(p mod M, d mod M, parity of a)` to a small integer `v`
//! such that the sum is `≡ v (mod p)` for every prime in the class. Residues
//! observed at individual primes are lifted to `v ∈ [−7, 7]`; a cell whose
//! witnesses admit no unique lift is left without a value and the table is
//! marked inconsistent.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ctengine::{extract, EngineError};
use crate::families::{oracle_sum, FamilyError, FamilyId, FamilyKind, FamilySpec};
use crate::modarith::{primes_between, Prime};

/// Largest `|v|` a cell value may take.
pub const LIFT_WINDOW: i64 = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(
        "{family}: engine residue {engine} differs from oracle residue {oracle} at p = {p}, a = {a}, r = {r}, d = {d}"
    )]
    EngineMismatch { family: String, p: u64, a: u32, r: u64, d: i64, engine: i64, oracle: i64 },
    #[error("table shapes differ: {0}")]
    ShapeMismatch(String),
    #[error("sweep has no admissible points")]
    EmptySweep,
    #[error("unknown table `{0}`")]
    UnknownTable(String),
    #[error("unknown conjecture `{0}`")]
    UnknownConjecture(String),
    #[error("conjecture {id} is checked only for primes p >= 5, got {p}")]
    PrimeTooSmall { id: ConjectureId, p: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(a: u32) -> Parity {
        if a % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// `None` components mean the table does not split on that dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CellKey {
    pub p_mod: u64,
    pub d_mod: Option<u64>,
    pub a_parity: Option<Parity>,
}

impl fmt::Display for CellKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p≡{}", self.p_mod)?;
        if let Some(d) = self.d_mod {
            write!(f, ", d≡{d}")?;
        }
        if let Some(par) = self.a_parity {
            write!(f, ", a {par}")?;
        }
        Ok(())
    }
}

/// One sweep point. `engine` is the constant-term residue when the family has
/// a kernel and the guard admitted the point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub p: u64,
    pub a: u32,
    pub d: i64,
    pub r: u64,
    pub residue: i64,
    pub engine: Option<i64>,
}

impl Witness {
    /// Whether the observed residue is congruent to `v` modulo `p`.
    pub fn agrees_with(&self, v: i64) -> bool {
        (self.residue - v).rem_euclid(self.p as i64) == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub p_mod: u64,
    pub d_mod: Option<u64>,
    pub a_parity: Option<Parity>,
    pub value: Option<i64>,
    pub witnesses: Vec<Witness>,
}

impl Cell {
    pub fn key(&self) -> CellKey {
        CellKey { p_mod: self.p_mod, d_mod: self.d_mod, a_parity: self.a_parity }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Discovered,
    PrintedFixture,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseTable {
    pub family: String,
    pub modulus: u64,
    pub parity: bool,
    /// Sorted by key.
    pub cells: Vec<Cell>,
    pub consistent: bool,
    #[serde(skip)]
    pub provenance: Provenance,
}

impl CaseTable {
    pub fn cell(&self, key: CellKey) -> Option<&Cell> {
        self.cells.binary_search_by(|c| c.key().cmp(&key)).ok().map(|i| &self.cells[i])
    }

    pub fn value(&self, key: CellKey) -> Option<i64> {
        self.cell(key).and_then(|c| c.value)
    }

    pub fn uses_d(&self) -> bool {
        self.cells.iter().any(|c| c.d_mod.is_some())
    }

    /// Number of witnesses whose engine residue was compared to the oracle.
    pub fn engine_checks(&self) -> usize {
        self.cells.iter().flat_map(|c| &c.witnesses).filter(|w| w.engine.is_some()).count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    /// Aligned plain-text rendering.
    pub fn render_text(&self) -> String {
        let yes_no = |b: bool| if b { "yes" } else { "no" };
        let mut out = String::new();
        let _ = writeln!(
            out,
            "family: {}  modulus: {}  parity: {}  consistent: {}",
            self.family,
            self.modulus,
            yes_no(self.parity),
            yes_no(self.consistent)
        );
        let m = self.modulus;
        let header = [format!("p mod {m}"), format!("d mod {m}"), "a".into(), "value".into(), "witnesses".into()];
        let rows: Vec<[String; 5]> = self
            .cells
            .iter()
            .map(|c| {
                [
                    c.p_mod.to_string(),
                    c.d_mod.map_or("-".into(), |d| d.to_string()),
                    c.a_parity.map_or("-".into(), |p| p.to_string()),
                    c.value.map_or("?".into(), |v| v.to_string()),
                    c.witnesses.len().to_string(),
                ]
            })
            .collect();
        render_rows(&mut out, &header, &rows);
        out
    }
}

fn render_rows<const N: usize>(out: &mut String, header: &[String; N], rows: &[[String; N]]) {
    let mut width: [usize; N] = std::array::from_fn(|i| header[i].chars().count());
    for row in rows {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    for row in std::iter::once(header).chain(rows) {
        let line: Vec<String> = row
            .iter()
            .zip(width)
            .map(|(cell, w)| format!("{cell:<w$}"))
            .collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
}

/// Grid of sweep points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sweep {
    pub primes: Vec<Prime>,
    pub a_values: Vec<u32>,
    pub d_values: Vec<i64>,
    pub r: u64,
    pub modulus: u64,
    pub use_parity: bool,
    /// Drop points beyond the family caps instead of failing.
    pub clip_to_caps: bool,
}

impl Sweep {
    /// Primes in `[lo, hi]` coprime to `modulus`.
    pub fn primes_coprime(lo: u64, hi: u64, modulus: u64) -> Vec<Prime> {
        primes_between(lo, hi).filter(|p| p.get().gcd(&modulus) == 1).collect()
    }

    fn points(&self, f: &FamilySpec) -> Result<Vec<(Prime, u32, i64)>, ClassifyError> {
        let mut out = Vec::new();
        for &p in &self.primes {
            for &a in &self.a_values {
                for &d in &self.d_values {
                    match f.check_point(p, a, self.r, d) {
                        Ok(_) => out.push((p, a, d)),
                        Err(FamilyError::CapExceeded { .. }) if self.clip_to_caps => {}
                        Err(e) => return Err(e.into()),
                    }
                }
            }
        }
        Ok(out)
    }
}

fn evaluate(f: &FamilySpec, p: Prime, a: u32, r: u64, d: i64) -> Result<Witness, ClassifyError> {
    let oracle = oracle_sum(f, p, a, r, d)?.residue.value();
    let engine = match f.kernel_with(r, d) {
        None => None,
        Some(kernel) => match extract(&kernel?, p, a) {
            Ok(res) => Some(res.value()),
            Err(EngineError::GuardViolation { .. }) => None,
            Err(e) => return Err(e.into()),
        },
    };
    if let Some(e) = engine {
        if e != oracle {
            return Err(ClassifyError::EngineMismatch {
                family: f.name().into(),
                p: p.get(),
                a,
                r,
                d,
                engine: e,
                oracle,
            });
        }
    }
    Ok(Witness { p: p.get(), a, d, r, residue: oracle, engine })
}

/// Unique `v ∈ [−7, 7]` congruent to every witness residue.
pub fn lift(witnesses: &[Witness]) -> Option<i64> {
    let mut candidates =
        (-LIFT_WINDOW..=LIFT_WINDOW).filter(|&v| witnesses.iter().all(|w| w.agrees_with(v)));
    let first = candidates.next()?;
    candidates.next().is_none().then_some(first)
}

/// Evaluates the oracle (and the engine, when the family has a kernel) at
/// every sweep point and groups the residues into cells.
pub fn discover(f: &FamilySpec, sweep: &Sweep) -> Result<CaseTable, ClassifyError> {
    if sweep.modulus == 0 {
        return Err(ClassifyError::ShapeMismatch("modulus must be positive".into()));
    }
    let points = sweep.points(f)?;
    if points.is_empty() {
        return Err(ClassifyError::EmptySweep);
    }
    let witnesses: Vec<Witness> = points
        .par_iter()
        .map(|&(p, a, d)| evaluate(f, p, a, sweep.r, d))
        .collect::<Result<_, _>>()?;

    let m = sweep.modulus;
    let mut grouped: BTreeMap<CellKey, Vec<Witness>> = BTreeMap::new();
    for w in witnesses {
        let key = CellKey {
            p_mod: w.p % m,
            d_mod: f.supports_shift().then(|| w.d.rem_euclid(m as i64) as u64),
            a_parity: sweep.use_parity.then(|| Parity::of(w.a)),
        };
        grouped.entry(key).or_default().push(w);
    }
    let cells: Vec<Cell> = grouped
        .into_iter()
        .map(|(key, witnesses)| Cell {
            p_mod: key.p_mod,
            d_mod: key.d_mod,
            a_parity: key.a_parity,
            value: lift(&witnesses),
            witnesses,
        })
        .collect();
    let consistent = cells.iter().all(|c| c.value.is_some());
    Ok(CaseTable {
        family: f.name().into(),
        modulus: m,
        parity: sweep.use_parity,
        cells,
        consistent,
        provenance: Provenance::Discovered,
    })
}

/// Published tables, encoded clause by clause as printed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum TableId {
    Prop1,
    Prop1p,
    Prop2,
    Prop2p,
    Prop3,
    Prop4,
    Prop5,
    Prop7,
    Ps0,
    Conj1,
    Conj2a,
    Conj2b,
}

impl TableId {
    pub const ALL: [TableId; 12] = [
        TableId::Prop1,
        TableId::Prop1p,
        TableId::Prop2,
        TableId::Prop2p,
        TableId::Prop3,
        TableId::Prop4,
        TableId::Prop5,
        TableId::Prop7,
        TableId::Ps0,
        TableId::Conj1,
        TableId::Conj2a,
        TableId::Conj2b,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TableId::Prop1 => "prop1",
            TableId::Prop1p => "prop1p",
            TableId::Prop2 => "prop2",
            TableId::Prop2p => "prop2p",
            TableId::Prop3 => "prop3",
            TableId::Prop4 => "prop4",
            TableId::Prop5 => "prop5",
            TableId::Prop7 => "prop7",
            TableId::Ps0 => "ps0",
            TableId::Conj1 => "conj1",
            TableId::Conj2a => "conj2a",
            TableId::Conj2b => "conj2b",
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TableId {
    type Err = ClassifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TableId::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| ClassifyError::UnknownTable(s.to_string()))
    }
}

/// `value` applies when every present condition holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Clause {
    pub value: i64,
    pub p_mod: Option<u64>,
    pub d_mod: Option<u64>,
    pub a_parity: Option<Parity>,
}

impl Clause {
    fn matches(&self, key: CellKey) -> bool {
        let dim = |want: Option<u64>, have: Option<u64>| want.is_none() || want == have;
        dim(self.p_mod, Some(key.p_mod))
            && dim(self.d_mod, key.d_mod)
            && (self.a_parity.is_none() || self.a_parity == key.a_parity)
    }
}

const fn cl(value: i64, p_mod: Option<u64>, d_mod: Option<u64>, a_parity: Option<Parity>) -> Clause {
    Clause { value, p_mod, d_mod, a_parity }
}

/// A published case table: ordered clauses, first match wins, then
/// `otherwise`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrintedTable {
    pub id: TableId,
    pub family: FamilyId,
    pub r: u64,
    pub modulus: u64,
    pub clauses: Vec<Clause>,
    pub otherwise: Option<i64>,
}

impl PrintedTable {
    pub fn get(id: TableId) -> PrintedTable {
        use Parity::{Even, Odd};
        const N: Option<u64> = None;
        let s = Some;
        let (family, r, modulus, clauses, otherwise) = match id {
            TableId::Prop1 => (
                FamilyId::CentralBinomial,
                1,
                3,
                vec![
                    cl(1, s(2), s(1), Some(Odd)),
                    cl(1, s(1), s(0), None),
                    cl(1, s(2), s(0), Some(Odd)),
                    cl(-1, s(2), s(0), Some(Odd)),
                    cl(-1, s(1), s(2), None),
                    cl(-1, s(2), s(2), Some(Even)),
                ],
                Some(0),
            ),
            TableId::Prop1p => (
                FamilyId::CentralBinomial,
                2,
                3,
                vec![
                    cl(1, s(1), s(1), None),
                    cl(-4, s(1), s(2), None),
                    cl(4, s(2), s(1), None),
                    cl(-1, s(2), s(2), None),
                    cl(3, s(1), s(0), None),
                    cl(-3, s(2), s(0), None),
                ],
                None,
            ),
            TableId::Prop2 => (
                FamilyId::Catalan,
                1,
                3,
                vec![cl(1, s(1), N, None), cl(1, s(2), N, Some(Even)), cl(-2, s(2), N, Some(Odd))],
                None,
            ),
            TableId::Prop2p => (
                FamilyId::Catalan,
                2,
                3,
                vec![cl(-7, s(2), N, Some(Even)), cl(2, s(1), N, None), cl(2, s(2), N, Some(Odd))],
                None,
            ),
            TableId::Prop3 => (
                FamilyId::Motzkin,
                1,
                4,
                vec![cl(-2, s(1), N, None), cl(-2, s(3), N, Some(Even)), cl(2, s(3), N, Some(Odd))],
                None,
            ),
            TableId::Prop4 => (
                FamilyId::BinomialSquare,
                1,
                3,
                vec![
                    cl(1, s(1), N, None),
                    cl(1, s(2), N, Some(Odd)),
                    cl(-1, s(2), N, Some(Even)),
                    cl(0, s(0), N, None),
                ],
                None,
            ),
            TableId::Prop5 => (FamilyId::Trinomial, 1, 1, vec![], Some(1)),
            TableId::Prop7 => (FamilyId::Multinomial, 1, 1, vec![], Some(1)),
            TableId::Ps0 => {
                (FamilyId::WeightedCentral, 1, 3, vec![cl(-1, s(2), N, None), cl(1, s(1), N, None)], None)
            }
            TableId::Conj1 => {
                (FamilyId::WeightedQuartic, 1, 3, vec![cl(1, s(2), N, None), cl(-1, s(1), N, None)], None)
            }
            TableId::Conj2a => {
                (FamilyId::SuperCatalan, 1, 3, vec![cl(1, s(1), N, None), cl(-1, s(2), N, None)], None)
            }
            TableId::Conj2b => (
                FamilyId::WeightedSuperCatalan,
                1,
                3,
                vec![cl(-7, s(1), N, None), cl(7, s(2), N, None)],
                None,
            ),
        };
        PrintedTable { id, family, r, modulus, clauses, otherwise }
    }

    pub fn uses_parity(&self) -> bool {
        self.clauses.iter().any(|c| c.a_parity.is_some())
    }

    pub fn uses_d(&self) -> bool {
        self.clauses.iter().any(|c| c.d_mod.is_some())
    }

    /// Value a reader gets by scanning the clauses top to bottom.
    pub fn lookup(&self, key: CellKey) -> Option<i64> {
        self.clauses.iter().find(|c| c.matches(key)).map(|c| c.value).or(self.otherwise)
    }

    /// Distinct values of every clause matching `key`, in clause order.
    pub fn matching_values(&self, key: CellKey) -> Vec<i64> {
        let mut out: Vec<i64> = Vec::new();
        for c in self.clauses.iter().filter(|c| c.matches(key)) {
            if !out.contains(&c.value) {
                out.push(c.value);
            }
        }
        out
    }

    /// The printed table laid out on the keys of `like`.
    pub fn instantiate(&self, like: &CaseTable) -> Result<CaseTable, ClassifyError> {
        if like.modulus != self.modulus {
            return Err(ClassifyError::ShapeMismatch(format!(
                "printed modulus {} vs discovered modulus {}",
                self.modulus, like.modulus
            )));
        }
        if self.uses_parity() && !like.parity {
            return Err(ClassifyError::ShapeMismatch("printed table splits on the parity of a".into()));
        }
        if self.uses_d() && !like.uses_d() {
            return Err(ClassifyError::ShapeMismatch("printed table splits on d".into()));
        }
        let cells: Vec<Cell> = like
            .cells
            .iter()
            .map(|c| Cell {
                p_mod: c.p_mod,
                d_mod: c.d_mod,
                a_parity: c.a_parity,
                value: self.lookup(c.key()),
                witnesses: Vec::new(),
            })
            .collect();
        let consistent = like.cells.iter().all(|c| self.matching_values(c.key()).len() <= 1);
        Ok(CaseTable {
            family: like.family.clone(),
            modulus: self.modulus,
            parity: like.parity,
            cells,
            consistent,
            provenance: Provenance::PrintedFixture,
        })
    }

    /// Sweep used by `table`: primes in `[3, pmax]` coprime to the modulus,
    /// `a ∈ [1, amax]`, `d ∈ [0, dmax]` for shifted families.
    pub fn default_sweep(&self, pmax: u64, amax: u32, dmax: i64) -> Sweep {
        Sweep {
            primes: Sweep::primes_coprime(3, pmax, self.modulus),
            a_values: (1..=amax).collect(),
            d_values: if self.family == FamilyId::CentralBinomial { (0..=dmax).collect() } else { vec![0] },
            r: self.r,
            modulus: self.modulus,
            use_parity: self.uses_parity() || self.family == FamilyId::CentralBinomial,
            clip_to_caps: true,
        }
    }
}

/// Default `a` bound by family kind: 3 for single sums, 2 for double sums,
/// 1 beyond.
pub fn default_amax(f: &FamilySpec) -> u32 {
    match f.kind() {
        FamilyKind::UnivariateKernel | FamilyKind::Weighted => 3,
        FamilyKind::DoubleSum | FamilyKind::SuperCatalan => 2,
        FamilyKind::TripleSum | FamilyKind::MultiSum => {
            if f.nvars() <= 2 {
                2
            } else {
                1
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub key: CellKey,
    pub printed: Option<i64>,
    pub observed: Option<i64>,
    pub witness: Witness,
}

/// Printed clauses that assign several values to one cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ambiguity {
    pub key: CellKey,
    pub values: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiscrepancyReport {
    pub table: String,
    pub entries: Vec<Discrepancy>,
    pub ambiguities: Vec<Ambiguity>,
}

impl DiscrepancyReport {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty() && self.ambiguities.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        if self.is_empty() {
            let _ = writeln!(out, "{}: printed table agrees with discovery", self.table);
            return out;
        }
        let _ = writeln!(out, "{}: {} discrepancies", self.table, self.entries.len());
        let header = ["cell".to_string(), "printed".into(), "observed".into(), "witness".into()];
        let show = |v: Option<i64>| v.map_or("-".to_string(), |v| v.to_string());
        let rows: Vec<[String; 4]> = self
            .entries
            .iter()
            .map(|e| {
                let w = e.witness;
                [
                    e.key.to_string(),
                    show(e.printed),
                    show(e.observed),
                    format!("p={} a={} d={} r={} residue={}", w.p, w.a, w.d, w.r, w.residue),
                ]
            })
            .collect();
        render_rows(&mut out, &header, &rows);
        for amb in &self.ambiguities {
            let values: Vec<String> = amb.values.iter().map(i64::to_string).collect();
            let _ = writeln!(out, "ambiguous printed cell {}: values {}", amb.key, values.join(", "));
        }
        out
    }
}

/// Cell-by-cell comparison. A cell disagrees when some witness residue is not
/// congruent to the reference value; reference cells without a value are
/// skipped, reference tables missing a discovered key disagree.
pub fn compare(discovered: &CaseTable, reference: &CaseTable) -> Result<DiscrepancyReport, ClassifyError> {
    if discovered.modulus != reference.modulus
        || discovered.parity != reference.parity
        || discovered.uses_d() != reference.uses_d()
    {
        return Err(ClassifyError::ShapeMismatch(format!(
            "modulus/parity/d differ: ({}, {}, {}) vs ({}, {}, {})",
            discovered.modulus,
            discovered.parity,
            discovered.uses_d(),
            reference.modulus,
            reference.parity,
            reference.uses_d()
        )));
    }
    let mut entries = Vec::new();
    for cell in &discovered.cells {
        let reference_cell = reference.cell(cell.key());
        let printed = reference_cell.and_then(|c| c.value);
        let witness = match (reference_cell, printed) {
            (None, _) => cell.witnesses.first(),
            (Some(_), None) => None,
            (Some(_), Some(v)) => cell.witnesses.iter().find(|w| !w.agrees_with(v)),
        };
        if let Some(&witness) = witness {
            entries.push(Discrepancy { key: cell.key(), printed, observed: cell.value, witness });
        }
    }
    Ok(DiscrepancyReport { table: discovered.family.clone(), entries, ambiguities: Vec::new() })
}

/// Compares a discovery against a published table, including clauses that
/// assign two values to one discovered cell.
pub fn audit(discovered: &CaseTable, printed: &PrintedTable) -> Result<DiscrepancyReport, ClassifyError> {
    let reference = printed.instantiate(discovered)?;
    let mut report = compare(discovered, &reference)?;
    report.table = printed.id.name().to_string();
    report.ambiguities = discovered
        .cells
        .iter()
        .filter_map(|c| {
            let values = printed.matching_values(c.key());
            (values.len() > 1).then(|| Ambiguity { key: c.key(), values })
        })
        .collect();
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ConjectureId {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2a")]
    TwoA,
    #[serde(rename = "2b")]
    TwoB,
    #[serde(rename = "ps0")]
    Ps0,
}

impl ConjectureId {
    pub const ALL: [ConjectureId; 4] = [ConjectureId::One, ConjectureId::TwoA, ConjectureId::TwoB, ConjectureId::Ps0];

    pub fn name(self) -> &'static str {
        match self {
            ConjectureId::One => "1",
            ConjectureId::TwoA => "2a",
            ConjectureId::TwoB => "2b",
            ConjectureId::Ps0 => "ps0",
        }
    }

    pub fn table(self) -> TableId {
        match self {
            ConjectureId::One => TableId::Conj1,
            ConjectureId::TwoA => TableId::Conj2a,
            ConjectureId::TwoB => TableId::Conj2b,
            ConjectureId::Ps0 => TableId::Ps0,
        }
    }

    /// Smallest prime the check accepts.
    pub fn min_prime(self) -> u64 {
        match self {
            ConjectureId::TwoA | ConjectureId::TwoB => 5,
            ConjectureId::One | ConjectureId::Ps0 => 2,
        }
    }
}

impl fmt::Display for ConjectureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConjectureId {
    type Err = ClassifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ConjectureId::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| ClassifyError::UnknownConjecture(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConjectureEntry {
    pub p: u64,
    pub observed: i64,
    pub conjectured: Option<i64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjectureReport {
    pub id: ConjectureId,
    pub family: String,
    pub entries: Vec<ConjectureEntry>,
    /// Every applicable prime fails as printed but holds with the values
    /// negated.
    pub sign_swapped: bool,
}

impl ConjectureReport {
    pub fn counterexamples(&self) -> Vec<u64> {
        self.entries.iter().filter(|e| e.verdict == Verdict::Fails).map(|e| e.p).collect()
    }

    pub fn all_hold(&self) -> bool {
        self.counterexamples().is_empty()
    }

    pub fn summary(&self) -> String {
        let checked: Vec<u64> =
            self.entries.iter().filter(|e| e.verdict != Verdict::NotApplicable).map(|e| e.p).collect();
        let range = match (checked.first(), checked.last()) {
            (Some(lo), Some(hi)) => format!("primes {lo}..{hi}"),
            _ => "no applicable primes".to_string(),
        };
        if self.all_hold() {
            return format!("all hold ({range})");
        }
        let list: Vec<String> = self.counterexamples().iter().map(u64::to_string).collect();
        let mut s = format!("counterexamples at p = {} ({range})", list.join(", "));
        if self.sign_swapped {
            s.push_str("; printed branch values are sign-swapped");
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "conjecture {} ({})", self.id, self.family);
        let header = ["p".to_string(), "observed".into(), "conjectured".into(), "verdict".into()];
        let rows: Vec<[String; 4]> = self
            .entries
            .iter()
            .map(|e| {
                [
                    e.p.to_string(),
                    e.observed.to_string(),
                    e.conjectured.map_or("-".into(), |v| v.to_string()),
                    match e.verdict {
                        Verdict::Holds => "holds",
                        Verdict::Fails => "FAILS",
                        Verdict::NotApplicable => "n/a",
                    }
                    .to_string(),
                ]
            })
            .collect();
        render_rows(&mut out, &header, &rows);
        let _ = writeln!(out, "{}", self.summary());
        out
    }
}

/// Evaluates the conjectured sum at `a = 1`, `r = 1` for each prime and
/// checks it against the printed branch for `p mod 3`.
pub fn conjecture_check(id: ConjectureId, primes: &[Prime]) -> Result<ConjectureReport, ClassifyError> {
    if let Some(p) = primes.iter().find(|p| p.get() < id.min_prime()) {
        return Err(ClassifyError::PrimeTooSmall { id, p: p.get() });
    }
    let printed = PrintedTable::get(id.table());
    let family = FamilySpec::get(printed.family);
    let entries: Vec<ConjectureEntry> = primes
        .par_iter()
        .map(|&p| -> Result<ConjectureEntry, ClassifyError> {
            let observed = oracle_sum(&family, p, 1, 1, 0)?.residue.value();
            let key = CellKey { p_mod: p.get() % printed.modulus, d_mod: None, a_parity: None };
            let conjectured = printed.lookup(key);
            let witness = Witness { p: p.get(), a: 1, d: 0, r: 1, residue: observed, engine: None };
            let verdict = match conjectured {
                None => Verdict::NotApplicable,
                Some(v) if witness.agrees_with(v) => Verdict::Holds,
                Some(_) => Verdict::Fails,
            };
            Ok(ConjectureEntry { p: p.get(), observed, conjectured, verdict })
        })
        .collect::<Result<_, _>>()?;
    let applicable: Vec<&ConjectureEntry> =
        entries.iter().filter(|e| e.verdict != Verdict::NotApplicable).collect();
    let sign_swapped = applicable.iter().any(|e| e.verdict == Verdict::Fails)
        && applicable.iter().all(|e| {
            let v = e.conjectured.expect("applicable entries have a value");
            (e.observed + v).rem_euclid(e.p as i64) == 0
        });
    Ok(ConjectureReport { id, family: family.name().into(), entries, sign_swapped })
}
