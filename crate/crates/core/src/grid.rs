//! Dense n-dimensional grids with toroidal indexing.
//!
//! Every grid is periodic in every axis: an index tuple `(v_0, ..., v_{n-1})`
//! addresses the same cell as `(v_0 + k_0 s_0, ..., v_{n-1} + k_{n-1} s_{n-1})`
//! for any integers `k_w`. Storage is row-major with axis 0 slowest.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dimension sizes of a grid.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Shape {
    dims: Vec<usize>,
    strides: Vec<usize>,
    len: usize,
}

impl Shape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidShape("a grid needs at least one dimension".into()));
        }
        if let Some(w) = dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidShape(format!("dimension {w} has size 0")));
        }
        let len = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidShape("total size overflows usize".into()))?;
        let mut strides = vec![1usize; dims.len()];
        for w in (0..dims.len() - 1).rev() {
            strides[w] = strides[w + 1] * dims[w + 1];
        }
        Ok(Self { dims, strides, len })
    }

    /// Number of dimensions `n`.
    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    /// Total number of cells `s`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn check_arity(&self, got: usize) -> Result<()> {
        if got != self.ndim() {
            return Err(Error::Dimension { expected: self.ndim(), got });
        }
        Ok(())
    }

    /// Reduces an arbitrary integer index into `[0, s_w)` per axis.
    pub fn reduce(&self, index: &[i64]) -> Result<Vec<usize>> {
        self.check_arity(index.len())?;
        Ok(index
            .iter()
            .zip(&self.dims)
            .map(|(&v, &d)| v.rem_euclid(d as i64) as usize)
            .collect())
    }

    /// Row-major position of an arbitrary (possibly negative) index tuple.
    pub fn linear(&self, index: &[i64]) -> Result<usize> {
        self.check_arity(index.len())?;
        Ok(index
            .iter()
            .zip(&self.dims)
            .zip(&self.strides)
            .map(|((&v, &d), &st)| v.rem_euclid(d as i64) as usize * st)
            .sum())
    }

    /// Row-major position of an index already inside `[0, s_w)`.
    pub fn linear_reduced(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.ndim());
        index.iter().zip(&self.strides).map(|(&v, &st)| v * st).sum()
    }

    /// Inverse of [`Shape::linear_reduced`].
    pub fn unravel(&self, mut pos: usize) -> Vec<usize> {
        debug_assert!(pos < self.len);
        let mut out = vec![0; self.ndim()];
        for (w, &st) in self.strides.iter().enumerate() {
            out[w] = pos / st;
            pos %= st;
        }
        out
    }

    /// Position of `-index` for the cell stored at `pos`.
    pub fn negate_linear(&self, pos: usize) -> usize {
        let mut rest = pos;
        let mut out = 0;
        for (&st, &d) in self.strides.iter().zip(&self.dims) {
            let v = rest / st;
            rest %= st;
            out += ((d - v) % d) * st;
        }
        out
    }

    /// Position of `index(pos) - offset`, with `offset` already reduced.
    fn shift_linear(&self, pos: usize, offset: &[usize]) -> usize {
        let mut rest = pos;
        let mut out = 0;
        for ((&st, &d), &o) in self.strides.iter().zip(&self.dims).zip(offset) {
            let v = rest / st;
            rest %= st;
            out += ((v + d - o) % d) * st;
        }
        out
    }
}

/// Integer-valued grid (text, pattern, and match grids).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntGrid {
    shape: Shape,
    values: Vec<i64>,
}

impl IntGrid {
    pub fn new(shape: Shape, values: Vec<i64>) -> Result<Self> {
        if values.len() != shape.len() {
            return Err(Error::InvalidShape(format!(
                "expected {} values, got {}",
                shape.len(),
                values.len()
            )));
        }
        Ok(Self { shape, values })
    }

    pub fn zeros(shape: Shape) -> Self {
        let values = vec![0; shape.len()];
        Self { shape, values }
    }

    /// One at the origin, zero elsewhere: the identity of the search product.
    pub fn delta(shape: Shape) -> Self {
        let mut g = Self::zeros(shape);
        g.values[0] = 1;
        g
    }

    pub fn from_fn(shape: Shape, mut f: impl FnMut(&[usize]) -> i64) -> Self {
        let values = (0..shape.len()).map(|p| f(&shape.unravel(p))).collect();
        Self { shape, values }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [i64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<i64> {
        self.values
    }

    pub fn get(&self, index: &[i64]) -> Result<i64> {
        Ok(self.values[self.shape.linear(index)?])
    }

    /// `out[t] = self[-t]` for every index `t`.
    pub fn reverse(&self) -> Self {
        let values = (0..self.shape.len())
            .map(|p| self.values[self.shape.negate_linear(p)])
            .collect();
        Self { shape: self.shape.clone(), values }
    }

    /// `out[t] = self[t - offset]` for every index `t`.
    pub fn rotate(&self, offset: &[i64]) -> Result<Self> {
        let offset = self.shape.reduce(offset)?;
        let values = (0..self.shape.len())
            .map(|p| self.values[self.shape.shift_linear(p, &offset)])
            .collect();
        Ok(Self { shape: self.shape.clone(), values })
    }

    pub fn to_complex(&self) -> ComplexGrid {
        ComplexGrid {
            shape: self.shape.clone(),
            values: self.values.iter().map(|&v| Complex64::new(v as f64, 0.0)).collect(),
        }
    }
}

/// Complex-valued grid; carries nengths.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexGrid {
    shape: Shape,
    values: Vec<Complex64>,
}

impl ComplexGrid {
    pub fn new(shape: Shape, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != shape.len() {
            return Err(Error::InvalidShape(format!(
                "expected {} values, got {}",
                shape.len(),
                values.len()
            )));
        }
        Ok(Self { shape, values })
    }

    pub fn filled(shape: Shape, value: Complex64) -> Self {
        let values = vec![value; shape.len()];
        Self { shape, values }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn get(&self, index: &[i64]) -> Result<Complex64> {
        Ok(self.values[self.shape.linear(index)?])
    }
}
