//! Nengths: the eigenvalue grids of n-level circulant representations.
//!
//! The nength of a grid `g` is its unnormalized n-dimensional forward DFT
//!
//! ```text
//! G^N[k] = Σ_t g[t] · Π_w ρ_{s_w}^{k_w t_w},   ρ_q = exp(−2πi / q)
//! ```
//!
//! and the inverse carries the `1/s` factor, so a Hadamard product of two
//! nengths transforms back to their cyclic search product with no stray scale.
//! One-dimensional transforms along each axis come from `rustfft`, which
//! handles arbitrary lengths (mixed radix, Rader, Bluestein).

use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{ComplexGrid, IntGrid, Shape};
use crate::naive::MatchGrid;
use crate::par;

pub type NengthGrid = ComplexGrid;

/// Largest imaginary part or rounding residual tolerated when recovering integers.
pub const RESIDUAL_GATE: f64 = 0.25;

/// Magnitude beyond which an `f64` no longer pins down a unique integer.
const EXACT_LIMIT: f64 = 9_007_199_254_740_992.0; // 2^53

/// Plans are cached for the life of the process; rustfft plans are immutable
/// and shareable across threads.
fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    let planner = PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()));
    let mut planner = planner.lock().unwrap_or_else(|e| e.into_inner());
    planner.plan_fft(len, direction)
}

/// Transforms `values` (row-major over `shape`) in place along every axis.
fn transform(values: &mut [Complex64], shape: &Shape, direction: FftDirection) {
    for (axis, &len) in shape.dims().iter().enumerate() {
        if len == 1 {
            continue;
        }
        let fft = plan(len, direction);
        transform_axis(values, len, shape.strides()[axis], &fft);
    }
}

/// Lines along one axis: each block of `len * stride` values is a `len × stride`
/// matrix whose columns are the lines. Columns are transposed into rows,
/// transformed as one batch, and transposed back.
fn transform_axis(values: &mut [Complex64], len: usize, stride: usize, fft: &Arc<dyn Fft<f64>>) {
    if stride == 1 {
        batch(values, len, fft);
        return;
    }
    let block = len * stride;
    par::for_each_chunk_mut(values, block, |chunk| {
        let mut lines = vec![Complex64::new(0.0, 0.0); block];
        for i in 0..len {
            for j in 0..stride {
                lines[j * len + i] = chunk[i * stride + j];
            }
        }
        batch(&mut lines, len, fft);
        for i in 0..len {
            for j in 0..stride {
                chunk[i * stride + j] = lines[j * len + i];
            }
        }
    });
}

/// Transforms consecutive `len`-long lines, spreading them over the pool.
fn batch(lines: &mut [Complex64], len: usize, fft: &Arc<dyn Fft<f64>>) {
    let count = lines.len() / len;
    // keep tasks coarse: at least ~4k points each
    let per_task = (4096 / len).clamp(1, count.max(1));
    par::for_each_chunk_mut(lines, per_task * len, |chunk| {
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        fft.process_with_scratch(chunk, &mut scratch);
    });
}

/// Forward transform of an integer grid.
pub fn nengthen(g: &IntGrid) -> NengthGrid {
    let mut out = g.to_complex();
    let shape = out.shape().clone();
    transform(out.values_mut(), &shape, FftDirection::Forward);
    out
}

/// Inverse transform including the `1/s` normalization, without rounding.
pub fn unnengthen(g: &NengthGrid) -> ComplexGrid {
    let mut out = g.clone();
    let shape = out.shape().clone();
    transform(out.values_mut(), &shape, FftDirection::Inverse);
    let scale = 1.0 / shape.len() as f64;
    out.values_mut().iter_mut().for_each(|v| *v *= scale);
    out
}

/// Entrywise product.
pub fn hadamard(a: &NengthGrid, b: &NengthGrid) -> Result<NengthGrid> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            left: a.shape().dims().to_vec(),
            right: b.shape().dims().to_vec(),
        });
    }
    let values = a.values().iter().zip(b.values()).map(|(x, y)| x * y).collect();
    ComplexGrid::new(a.shape().clone(), values)
}

/// How far the inverse transform strayed from integers.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RoundingReport {
    pub max_imag: f64,
    pub max_residual: f64,
    pub max_abs: f64,
}

impl RoundingReport {
    pub fn is_exact(&self) -> bool {
        self.max_imag <= RESIDUAL_GATE
            && self.max_residual <= RESIDUAL_GATE
            && self.max_abs < EXACT_LIMIT
    }
}

/// Inverse transform followed by rounding to the nearest integer, with diagnostics.
///
/// Fails with [`Error::Precision`] when any imaginary part or rounding
/// residual exceeds [`RESIDUAL_GATE`], or when a value is too large for `f64`
/// to represent every integer around it.
pub fn unnengthen_with_report(g: &NengthGrid) -> Result<(MatchGrid, RoundingReport)> {
    let mut back = g.values().to_vec();
    transform(&mut back, g.shape(), FftDirection::Inverse);
    let scale = 1.0 / g.shape().len() as f64;
    let mut report = RoundingReport::default();
    let mut values = Vec::with_capacity(back.len());
    for v in back.iter().map(|v| v * scale) {
        let rounded = v.re.round();
        report.max_imag = report.max_imag.max(v.im.abs());
        report.max_residual = report.max_residual.max((v.re - rounded).abs());
        report.max_abs = report.max_abs.max(v.re.abs());
        if !(v.re.is_finite() && v.im.is_finite()) {
            report.max_abs = f64::INFINITY;
        }
        values.push(rounded as i64);
    }
    if !report.is_exact() {
        return Err(Error::Precision {
            max_imag: report.max_imag,
            max_residual: report.max_residual,
            max_abs: report.max_abs,
        });
    }
    Ok((IntGrid::new(g.shape().clone(), values)?, report))
}

pub fn unnengthen_to_int(g: &NengthGrid) -> Result<MatchGrid> {
    unnengthen_with_report(g).map(|(m, _)| m)
}

/// Cyclic search product through the transform domain.
pub fn fast_search_product(p: &IntGrid, t: &IntGrid) -> Result<MatchGrid> {
    unnengthen_to_int(&hadamard(&nengthen(p), &nengthen(t))?)
}
