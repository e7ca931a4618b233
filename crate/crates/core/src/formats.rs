//! On-disk formats.
//!
//! | ext      | content                                                          |
//! |----------|------------------------------------------------------------------|
//! | `.ngt`   | text grid: `NGT1`, `n`, dims, then `s` whitespace-separated ints |
//! | `.ngb`   | binary grid: `NGB1`, u32 n, n × u64 dims, s × i64 (LE)           |
//! | `.alpha` | one symbol per line                                              |
//! | `.npt`   | pattern support: `NPT1`, `n`, one cell of n ints per line        |
//! | `.nng`   | index: `NNG1`, u32 version, u32 n, n × u64 dims, u64 base,       |
//! |          | u8 mode, s × (f64 re, f64 im), u64 digest (LE)                   |

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::codec::{Alphabet, AlphabetMode, CodeSpace};
use crate::engine::NengthIndex;
use crate::error::{Error, Result};
use crate::grid::{ComplexGrid, IntGrid, Shape};

pub const NGT_MAGIC: &str = "NGT1";
pub const NGB_MAGIC: &[u8; 4] = b"NGB1";
pub const NPT_MAGIC: &str = "NPT1";
pub const NNG_MAGIC: &[u8; 4] = b"NNG1";
pub const NNG_VERSION: u32 = 1;

fn bad(kind: &'static str, msg: impl Into<String>) -> Error {
    Error::Format { kind, msg: msg.into() }
}

fn parse_int<T: std::str::FromStr>(kind: &'static str, tok: &str) -> Result<T> {
    tok.parse().map_err(|_| bad(kind, format!("not an integer: {tok:?}")))
}

pub fn read_grid_text(src: &str) -> Result<IntGrid> {
    const K: &str = "grid text";
    let mut lines = src.lines();
    if lines.next().map(str::trim) != Some(NGT_MAGIC) {
        return Err(bad(K, "missing NGT1 header"));
    }
    let n: usize = parse_int(K, lines.next().ok_or_else(|| bad(K, "missing n"))?.trim())?;
    let dims: Vec<usize> = lines
        .next()
        .ok_or_else(|| bad(K, "missing dimensions"))?
        .split_whitespace()
        .map(|t| parse_int(K, t))
        .collect::<Result<_>>()?;
    if dims.len() != n {
        return Err(bad(K, format!("header says n = {n} but lists {} dimensions", dims.len())));
    }
    let shape = Shape::new(dims)?;
    let values: Vec<i64> = lines
        .flat_map(str::split_whitespace)
        .map(|t| parse_int(K, t))
        .collect::<Result<_>>()?;
    if values.len() != shape.len() {
        return Err(bad(K, format!("expected {} values, found {}", shape.len(), values.len())));
    }
    IntGrid::new(shape, values)
}

pub fn write_grid_text(grid: &IntGrid) -> String {
    let shape = grid.shape();
    let mut out = format!("{NGT_MAGIC}\n{}\n", shape.ndim());
    out.push_str(&join(shape.dims()));
    out.push('\n');
    let row = *shape.dims().last().unwrap();
    for chunk in grid.values().chunks(row) {
        out.push_str(&join(chunk));
        out.push('\n');
    }
    out
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

/// Little-endian cursor over a byte slice.
struct Cursor<'a> {
    kind: &'static str,
    buf: &'a [u8],
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() < n {
            return Err(bad(self.kind, "truncated input"));
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn i64(&mut self) -> Result<i64> {
        Ok(i64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn shape(&mut self) -> Result<Shape> {
        let n = self.u32()? as usize;
        if n == 0 || n > 64 {
            return Err(bad(self.kind, format!("implausible dimension count {n}")));
        }
        let dims = (0..n)
            .map(|_| {
                let d = self.u64()?;
                usize::try_from(d).map_err(|_| bad(self.kind, "dimension too large"))
            })
            .collect::<Result<Vec<_>>>()?;
        Shape::new(dims)
    }

    fn finish(&self) -> Result<()> {
        if !self.buf.is_empty() {
            return Err(bad(self.kind, format!("{} trailing bytes", self.buf.len())));
        }
        Ok(())
    }
}

fn put_shape(out: &mut Vec<u8>, shape: &Shape) {
    out.extend_from_slice(&(shape.ndim() as u32).to_le_bytes());
    for &d in shape.dims() {
        out.extend_from_slice(&(d as u64).to_le_bytes());
    }
}

pub fn read_grid_binary(buf: &[u8]) -> Result<IntGrid> {
    let mut c = Cursor { kind: "grid binary", buf };
    if c.take(4)? != NGB_MAGIC {
        return Err(bad(c.kind, "missing NGB1 magic"));
    }
    let shape = c.shape()?;
    if c.buf.len() / 8 < shape.len() {
        return Err(bad(c.kind, "truncated input"));
    }
    let values = (0..shape.len()).map(|_| c.i64()).collect::<Result<Vec<_>>>()?;
    c.finish()?;
    IntGrid::new(shape, values)
}

pub fn write_grid_binary(grid: &IntGrid) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 8 * grid.values().len());
    out.extend_from_slice(NGB_MAGIC);
    put_shape(&mut out, grid.shape());
    for v in grid.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Reads either grid format, chosen by the leading magic.
pub fn read_grid(buf: &[u8]) -> Result<IntGrid> {
    if buf.starts_with(NGB_MAGIC) {
        read_grid_binary(buf)
    } else {
        let text = std::str::from_utf8(buf).map_err(|_| bad("grid text", "not UTF-8"))?;
        read_grid_text(text)
    }
}

/// One symbol per line; a trailing newline is allowed, blank lines are not.
pub fn read_alphabet(src: &str, mode: AlphabetMode) -> Result<Alphabet> {
    let symbols: Vec<String> = src
        .strip_suffix('\n')
        .unwrap_or(src)
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l).to_string())
        .collect();
    if symbols.len() == 1 && symbols[0].is_empty() {
        return Err(bad("alphabet", "no symbols"));
    }
    Alphabet::new(symbols, mode)
}

pub fn write_alphabet(alphabet: &Alphabet) -> String {
    alphabet.symbols().iter().map(|s| format!("{s}\n")).collect()
}

/// Support cells in exponent order, not yet bound to a shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternFile {
    pub ndim: usize,
    pub cells: Vec<Vec<i64>>,
}

pub fn read_pattern(src: &str) -> Result<PatternFile> {
    const K: &str = "pattern";
    let mut lines = src.lines().filter(|l| !l.trim().is_empty());
    if lines.next().map(str::trim) != Some(NPT_MAGIC) {
        return Err(bad(K, "missing NPT1 header"));
    }
    let ndim: usize = parse_int(K, lines.next().ok_or_else(|| bad(K, "missing n"))?.trim())?;
    if ndim == 0 {
        return Err(bad(K, "n must be positive"));
    }
    let cells = lines
        .map(|l| {
            let cell: Vec<i64> = l.split_whitespace().map(|t| parse_int(K, t)).collect::<Result<_>>()?;
            if cell.len() != ndim {
                return Err(bad(K, format!("cell {l:?} does not have {ndim} coordinates")));
            }
            Ok(cell)
        })
        .collect::<Result<Vec<_>>>()?;
    if cells.is_empty() {
        return Err(bad(K, "no support cells"));
    }
    Ok(PatternFile { ndim, cells })
}

pub fn write_pattern(p: &PatternFile) -> String {
    let mut out = format!("{NPT_MAGIC}\n{}\n", p.ndim);
    for c in &p.cells {
        out.push_str(&join(c));
        out.push('\n');
    }
    out
}

fn mode_flag(mode: AlphabetMode) -> u8 {
    match mode {
        AlphabetMode::Shifted => 0,
        AlphabetMode::Paper => 1,
    }
}

/// Serializes the nength header and values, without the trailing digest.
pub fn write_nength(nength: &ComplexGrid, base: u64, mode: AlphabetMode) -> Vec<u8> {
    let mut out = Vec::with_capacity(32 + 16 * nength.values().len());
    out.extend_from_slice(NNG_MAGIC);
    out.extend_from_slice(&NNG_VERSION.to_le_bytes());
    put_shape(&mut out, nength.shape());
    out.extend_from_slice(&base.to_le_bytes());
    out.push(mode_flag(mode));
    for v in nength.values() {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

pub fn write_index(index: &NengthIndex) -> Vec<u8> {
    let mut out = write_nength(index.text_nength(), index.base(), index.space().mode());
    out.extend_from_slice(&index.source_digest().to_le_bytes());
    out
}

pub fn read_index(buf: &[u8]) -> Result<NengthIndex> {
    let mut c = Cursor { kind: "index", buf };
    if c.take(4)? != NNG_MAGIC {
        return Err(bad(c.kind, "missing NNG1 magic"));
    }
    let version = c.u32()?;
    if version != NNG_VERSION {
        return Err(bad(c.kind, format!("unsupported version {version}")));
    }
    let shape = c.shape()?;
    let base = c.u64()?;
    let mode = match c.u8()? {
        0 => AlphabetMode::Shifted,
        1 => AlphabetMode::Paper,
        f => return Err(bad(c.kind, format!("unknown mode flag {f}"))),
    };
    let space = CodeSpace::from_base(base, mode).map_err(|e| bad("index", e.to_string()))?;
    if c.buf.len() / 16 < shape.len() {
        return Err(bad(c.kind, "truncated input"));
    }
    let values = (0..shape.len())
        .map(|_| Ok(Complex64::new(c.f64()?, c.f64()?)))
        .collect::<Result<Vec<_>>>()?;
    let digest = c.u64()?;
    c.finish()?;
    Ok(NengthIndex::from_parts(space, ComplexGrid::new(shape, values)?, digest))
}

pub fn read_file(path: &std::path::Path) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut buf)?;
    Ok(buf)
}

pub fn write_file(path: &std::path::Path, bytes: &[u8]) -> Result<()> {
    std::fs::File::create(path)?.write_all(bytes)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::build_index;
    use proptest::prelude::*;

    #[test]
    fn grid_text_parses() {
        let g = read_grid_text("NGT1\n2\n2 3\n1 2 3\n4 5 6\n").unwrap();
        assert_eq!(g.shape().dims(), &[2, 3]);
        assert_eq!(g.values(), &[1, 2, 3, 4, 5, 6]);
        assert_eq!(write_grid_text(&g), "NGT1\n2\n2 3\n1 2 3\n4 5 6\n");
    }

    #[test]
    fn grid_text_errors() {
        assert!(read_grid_text("NGT2\n1\n1\n0\n").is_err());
        assert!(read_grid_text("NGT1\n2\n3\n0 0 0\n").is_err());
        assert!(read_grid_text("NGT1\n1\n3\n0 0\n").is_err());
        assert!(read_grid_text("NGT1\n1\n3\n0 0 0 0\n").is_err());
        assert!(read_grid_text("NGT1\n1\n3\n0 x 0\n").is_err());
        assert!(read_grid_text("NGT1\n1\n0\n").is_err());
    }

    #[test]
    fn grid_binary_layout() {
        let g = read_grid_text("NGT1\n1\n2\n-1 7\n").unwrap();
        let bytes = write_grid_binary(&g);
        assert_eq!(&bytes[..4], b"NGB1");
        assert_eq!(&bytes[4..8], &1u32.to_le_bytes());
        assert_eq!(&bytes[8..16], &2u64.to_le_bytes());
        assert_eq!(&bytes[16..24], &(-1i64).to_le_bytes());
        assert_eq!(bytes.len(), 32);
        assert_eq!(read_grid(&bytes).unwrap(), g);
        assert!(matches!(read_grid(&bytes[..30]), Err(Error::Format { .. })));
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(read_grid(&extra).is_err());
    }

    #[test]
    fn alphabet_lines() {
        let a = read_alphabet("a\nb\nc\n", AlphabetMode::Shifted).unwrap();
        assert_eq!(a.code("c").unwrap(), 3);
        assert_eq!(read_alphabet("x\r\ny", AlphabetMode::Shifted).unwrap().symbols(), &["x", "y"]);
        assert!(read_alphabet("", AlphabetMode::Shifted).is_err());
        assert!(read_alphabet("a\n\nb\n", AlphabetMode::Shifted).is_err());
        assert!(read_alphabet("a\na\n", AlphabetMode::Shifted).is_err());
        assert_eq!(write_alphabet(&a), "a\nb\nc\n");
    }

    #[test]
    fn pattern_file() {
        let p = read_pattern("NPT1\n2\n0 0\n1 -1\n").unwrap();
        assert_eq!(p.ndim, 2);
        assert_eq!(p.cells, vec![vec![0, 0], vec![1, -1]]);
        assert_eq!(read_pattern(&write_pattern(&p)).unwrap(), p);
        assert!(read_pattern("NPT1\n2\n0\n").is_err());
        assert!(read_pattern("NPT1\n1\n").is_err());
        assert!(read_pattern("NPX1\n1\n0\n").is_err());
    }

    #[test]
    fn index_layout_and_round_trip() {
        let text = read_grid_text("NGT1\n2\n2 2\n1 2\n2 0\n").unwrap();
        let space = CodeSpace::new(2, AlphabetMode::Shifted).unwrap();
        let idx = build_index(&text, space).unwrap();
        let bytes = write_index(&idx);
        assert_eq!(&bytes[..4], b"NNG1");
        assert_eq!(&bytes[4..8], &1u32.to_le_bytes());
        assert_eq!(&bytes[8..12], &2u32.to_le_bytes());
        assert_eq!(&bytes[28..36], &3u64.to_le_bytes());
        assert_eq!(bytes[36], 0);
        assert_eq!(bytes.len(), 37 + 4 * 16 + 8);
        let back = read_index(&bytes).unwrap();
        assert_eq!(back, idx);
        assert_eq!(back.recover_text().unwrap(), text);
        assert!(read_index(&bytes[..bytes.len() - 1]).is_err());
        let mut flag = bytes.clone();
        flag[36] = 7;
        assert!(read_index(&flag).is_err());
    }

    proptest! {
        #[test]
        fn grids_survive_both_formats(
            dims in prop::collection::vec(1usize..5, 1..4),
            seed in prop::collection::vec(any::<i64>(), 64),
        ) {
            let s = Shape::new(dims).unwrap();
            let g = IntGrid::new(s.clone(), seed[..s.len()].to_vec()).unwrap();
            prop_assert_eq!(&read_grid(write_grid_text(&g).as_bytes()).unwrap(), &g);
            prop_assert_eq!(&read_grid(&write_grid_binary(&g)).unwrap(), &g);
        }
    }
}
