//! Alphabets, pattern encoding and query values.
//!
//! A pattern's support cells carry distinct powers of the alphabet base, so
//! every entry of the search product is a base-`b` number whose digits are the
//! text characters under the support at one alignment.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::grid::{IntGrid, Shape};

/// How user symbols map onto integer codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum AlphabetMode {
    /// Codes `1..=σ`, base `σ + 1`; code 0 marks an empty cell.
    #[default]
    Shifted,
    /// Codes `0..σ`, base `σ`; there is no empty cell.
    Paper,
}

/// The numeric side of an alphabet: its size and mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CodeSpace {
    size: u64,
    mode: AlphabetMode,
}

impl CodeSpace {
    pub fn new(size: u64, mode: AlphabetMode) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidAlphabet("alphabet is empty".into()));
        }
        if mode == AlphabetMode::Paper && size == 1 {
            // base 1 has no distinct powers
            return Err(Error::InvalidAlphabet("paper mode needs at least two symbols".into()));
        }
        Ok(Self { size, mode })
    }

    /// Recovers the code space from a stored base.
    pub fn from_base(base: u64, mode: AlphabetMode) -> Result<Self> {
        match mode {
            AlphabetMode::Shifted if base >= 2 => Self::new(base - 1, mode),
            AlphabetMode::Paper => Self::new(base, mode),
            _ => Err(Error::InvalidAlphabet(format!("base {base} is invalid in {mode:?} mode"))),
        }
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn mode(&self) -> AlphabetMode {
        self.mode
    }

    pub fn base(&self) -> u64 {
        match self.mode {
            AlphabetMode::Shifted => self.size + 1,
            AlphabetMode::Paper => self.size,
        }
    }

    /// Codes that name a character.
    pub fn symbol_codes(&self) -> std::ops::RangeInclusive<i64> {
        match self.mode {
            AlphabetMode::Shifted => 1..=self.size as i64,
            AlphabetMode::Paper => 0..=self.size as i64 - 1,
        }
    }

    /// Whether `code` may appear in a text grid (includes the empty code in shifted mode).
    pub fn is_text_code(&self, code: i64) -> bool {
        code >= 0 && (code as u64) < self.base()
    }
}

/// Ordered set of user symbols bound to a code space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, usize>,
    space: CodeSpace,
}

impl Alphabet {
    pub fn new(symbols: Vec<String>, mode: AlphabetMode) -> Result<Self> {
        let space = CodeSpace::new(symbols.len() as u64, mode)?;
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::InvalidAlphabet(format!("symbol {i} is empty")));
            }
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::InvalidAlphabet(format!("duplicate symbol {s:?}")));
            }
        }
        Ok(Self { symbols, index, space })
    }

    /// One single-character symbol per `char` of `chars`.
    pub fn from_chars(chars: &str, mode: AlphabetMode) -> Result<Self> {
        Self::new(chars.chars().map(String::from).collect(), mode)
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn space(&self) -> CodeSpace {
        self.space
    }

    pub fn mode(&self) -> AlphabetMode {
        self.space.mode
    }

    pub fn base(&self) -> u64 {
        self.space.base()
    }

    pub fn code(&self, symbol: &str) -> Result<i64> {
        let i = *self
            .index
            .get(symbol)
            .ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))?;
        Ok(i as i64 + *self.space.symbol_codes().start())
    }

    pub fn symbol(&self, code: i64) -> Option<&str> {
        let i = code - *self.space.symbol_codes().start();
        usize::try_from(i).ok().and_then(|i| self.symbols.get(i)).map(String::as_str)
    }

    /// Encodes a string of symbols into codes.
    ///
    /// Whitespace-separated tokens are used when the input contains whitespace,
    /// otherwise each `char` is one symbol (or the whole input, if it names a
    /// multi-character symbol).
    pub fn encode_str(&self, text: &str) -> Result<Vec<i64>> {
        if text.contains(char::is_whitespace) {
            text.split_whitespace().map(|t| self.code(t)).collect()
        } else if self.index.contains_key(text) && self.symbols.iter().any(|s| s.chars().count() > 1) {
            Ok(vec![self.code(text)?])
        } else {
            let mut buf = [0u8; 4];
            text.chars().map(|c| self.code(c.encode_utf8(&mut buf))).collect()
        }
    }

    pub fn decode_codes(&self, codes: &[i64]) -> Option<String> {
        let syms: Option<Vec<&str>> = codes.iter().map(|&c| self.symbol(c)).collect();
        let syms = syms?;
        let sep = if syms.iter().all(|s| s.chars().count() == 1) { "" } else { " " };
        Some(syms.join(sep))
    }
}

/// The cells holding a pattern's nonzero entries, with their exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternSupport {
    shape: Shape,
    cells: Vec<Vec<usize>>,
    exponents: Vec<u32>,
}

impl PatternSupport {
    /// Support with canonical exponents `0..r`, in the order the cells are given.
    pub fn new(shape: Shape, cells: &[Vec<i64>]) -> Result<Self> {
        let exponents = (0..cells.len() as u32).collect();
        Self::with_exponents(shape, cells, exponents)
    }

    pub fn with_exponents(shape: Shape, cells: &[Vec<i64>], exponents: Vec<u32>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::InvalidSupport("support has no cells".into()));
        }
        if exponents.len() != cells.len() {
            return Err(Error::InvalidSupport(format!(
                "{} cells but {} exponents",
                cells.len(),
                exponents.len()
            )));
        }
        if exponents.iter().collect::<BTreeSet<_>>().len() != exponents.len() {
            return Err(Error::InvalidSupport("exponents are not distinct".into()));
        }
        let mut seen = BTreeSet::new();
        let mut reduced = Vec::with_capacity(cells.len());
        for c in cells {
            let r = shape.reduce(c)?;
            if !seen.insert(r.clone()) {
                return Err(Error::InvalidSupport(format!("cell {c:?} repeats an earlier cell")));
            }
            reduced.push(r);
        }
        Ok(Self { shape, cells: reduced, exponents })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Cells reduced into `[0, s_w)` per axis.
    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// Number of support cells `r`.
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    fn is_canonical(&self) -> bool {
        self.exponents.iter().enumerate().all(|(j, &e)| e as usize == j)
    }

    /// The same cells placed in another grid of the same dimensionality.
    pub fn reshaped(&self, shape: Shape) -> Result<Self> {
        let cells: Vec<Vec<i64>> = self
            .cells
            .iter()
            .map(|c| c.iter().map(|&v| v as i64).collect())
            .collect();
        Self::with_exponents(shape, &cells, self.exponents.clone())
    }

    /// A canonical-exponent support made of the cells in `range`.
    pub fn subset(&self, range: std::ops::Range<usize>) -> Self {
        let cells = self.cells[range].to_vec();
        let exponents = (0..cells.len() as u32).collect();
        Self { shape: self.shape.clone(), cells, exponents }
    }

    /// Per-axis extent of the bounding box anchored at the origin.
    pub fn extent(&self) -> Vec<usize> {
        (0..self.shape.ndim())
            .map(|w| self.cells.iter().map(|c| c[w]).max().unwrap_or(0) + 1)
            .collect()
    }
}

/// The characters sought under each support cell, in cell order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Query {
    digits: Vec<i64>,
}

impl Query {
    pub fn new(digits: Vec<i64>) -> Self {
        Self { digits }
    }

    /// Parses and validates a query against an alphabet and a support.
    pub fn parse(text: &str, alphabet: &Alphabet, support: &PatternSupport) -> Result<Self> {
        let digits = alphabet.encode_str(text)?;
        if digits.len() != support.len() {
            return Err(Error::QueryLength { expected: support.len(), got: digits.len() });
        }
        Ok(Self { digits })
    }

    pub fn digits(&self) -> &[i64] {
        &self.digits
    }
}

fn checked_pow(base: u64, exp: u32) -> Result<i64> {
    i64::try_from(base)
        .ok()
        .and_then(|b| b.checked_pow(exp))
        .ok_or(Error::Overflow("base power"))
}

/// Pattern grid with `base^{r_j}` at each support cell and zero elsewhere.
pub fn encode_pattern(support: &PatternSupport, base: u64) -> Result<IntGrid> {
    let max_exp = *support.exponents().iter().max().expect("support is nonempty");
    match capacity_check(base, max_exp as usize + 1, support.shape().len())? {
        Capacity::Ok => {}
        Capacity::RequiredGroups(_) => {
            return Err(Error::Capacity {
                r: support.len(),
                max_r: max_cells_per_group(base, support.shape().len()),
            })
        }
    }
    encode_pattern_unchecked(support, base)
}

/// [`encode_pattern`] without the exactness budget check.
pub(crate) fn encode_pattern_unchecked(support: &PatternSupport, base: u64) -> Result<IntGrid> {
    let mut grid = IntGrid::zeros(support.shape().clone());
    for (cell, &e) in support.cells().iter().zip(support.exponents()) {
        let pos = support.shape().linear_reduced(cell);
        grid.values_mut()[pos] = checked_pow(base, e)?;
    }
    Ok(grid)
}

/// `q = Σ_j q_j · base^{r_j}`.
pub fn query_value(query: &Query, support: &PatternSupport, base: u64) -> Result<i64> {
    if query.digits().len() != support.len() {
        return Err(Error::QueryLength { expected: support.len(), got: query.digits().len() });
    }
    let mut q: i64 = 0;
    for (j, (&d, &e)) in query.digits().iter().zip(support.exponents()).enumerate() {
        if d < 0 || d as u64 >= base {
            return Err(Error::DigitOutOfRange { position: j, digit: d, base });
        }
        let term = checked_pow(base, e)?.checked_mul(d).ok_or(Error::Overflow("query value"))?;
        q = q.checked_add(term).ok_or(Error::Overflow("query value"))?;
    }
    Ok(q)
}

/// Splits a value into base-`base` digits at the support's exponents.
pub fn decode_value(value: i64, support: &PatternSupport, base: u64) -> Result<Query> {
    if !support.is_canonical() {
        return Err(Error::Unsupported("decoding needs canonical exponents 0..r".into()));
    }
    decode_digits(value, base, support.len()).map(Query::new)
}

/// Base-`base` digits of `value`, least significant first.
pub(crate) fn decode_digits(value: i64, base: u64, digits: usize) -> Result<Vec<i64>> {
    let err = || Error::Decode { value, base, digits };
    if value < 0 {
        return Err(err());
    }
    let mut rest = value as u64;
    let mut out = Vec::with_capacity(digits);
    for _ in 0..digits {
        out.push((rest % base) as i64);
        rest /= base;
    }
    if rest != 0 {
        return Err(err());
    }
    Ok(out)
}

/// Outcome of the floating-point exactness budget check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Capacity {
    Ok,
    RequiredGroups(usize),
}

/// Bits of headroom reserved for transform roundoff.
pub const FFT_MARGIN_BITS: u32 = 10;
/// Mantissa bits of an `f64`.
pub const MANTISSA_BITS: u32 = 52;

const BUDGET_LOG2: u32 = MANTISSA_BITS - FFT_MARGIN_BITS;

/// Whether `cells` digits of base `base` over `s` cells fit:
/// `cells·log2(base) + log2(s) + 10 ≤ 52`, evaluated exactly as `base^cells · s ≤ 2^42`.
fn fits(base: u64, cells: usize, s: usize) -> bool {
    let limit = 1u128 << BUDGET_LOG2;
    let mut acc = s as u128;
    if acc > limit {
        return false;
    }
    for _ in 0..cells {
        acc *= base as u128;
        if acc > limit {
            return false;
        }
    }
    true
}

/// Largest number of support cells one transform can carry exactly.
pub fn max_cells_per_group(base: u64, s: usize) -> usize {
    let mut k = 0;
    while fits(base, k + 1, s) {
        k += 1;
    }
    k
}

/// Decides whether a support of `r` cells fits the exactness budget, or how
/// many digit groups it must be split into.
pub fn capacity_check(base: u64, r: usize, s: usize) -> Result<Capacity> {
    if base < 2 || r == 0 || s == 0 {
        return Err(Error::InvalidSupport(format!(
            "capacity check needs base >= 2, r >= 1 and s >= 1 (base {base}, r {r}, s {s})"
        )));
    }
    if fits(base, r, s) {
        return Ok(Capacity::Ok);
    }
    let k = max_cells_per_group(base, s);
    if k == 0 {
        return Err(Error::Infeasible { base, s });
    }
    Ok(Capacity::RequiredGroups(r.div_ceil(k)))
}
