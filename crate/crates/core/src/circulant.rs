//! Explicit n-level circulant matrices at desk scale.
//!
//! A grid `g` of `s` cells expands to an `s × s` matrix whose entry at the
//! multi-index pair `((α_w), (β_w))` is `g[β − α]`: a circulant of circulant
//! blocks, nested once per dimension. Rows and columns use the grid's own
//! row-major order, so axis 0 selects the outermost block.
//!
//! Everything here is O(s²) memory and up to O(s³) time; it exists to check
//! the transform path against dense linear algebra, not to run at scale.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{IntGrid, Shape};
use crate::naive::{search_product, MatchGrid};
use crate::spectral::nengthen;

/// Largest grid the lab will expand.
pub const LAB_LIMIT: usize = 64;

fn check_size(shape: &Shape) -> Result<()> {
    if shape.len() > LAB_LIMIT {
        return Err(Error::LabSize { s: shape.len(), limit: LAB_LIMIT });
    }
    Ok(())
}

/// Position of `cols[b] - rows[a]` given both as reduced coordinates.
fn diff_linear(shape: &Shape, from: &[usize], to: &[usize]) -> usize {
    from.iter()
        .zip(to)
        .zip(shape.dims().iter().zip(shape.strides()))
        .map(|((&a, &b), (&d, &st))| ((b + d - a) % d) * st)
        .sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelCirculant {
    shape: Shape,
    matrix: DMatrix<i64>,
}

impl LevelCirculant {
    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn matrix(&self) -> &DMatrix<i64> {
        &self.matrix
    }

    /// Entry at the multi-index pair `(alpha, beta)`, both taken modulo the shape.
    pub fn entry(&self, alpha: &[i64], beta: &[i64]) -> Result<i64> {
        Ok(self.matrix[(self.shape.linear(alpha)?, self.shape.linear(beta)?)])
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        self.matrix.map(|v| Complex64::new(v as f64, 0.0))
    }
}

pub fn expand(g: &IntGrid) -> Result<LevelCirculant> {
    let shape = g.shape();
    check_size(shape)?;
    let s = shape.len();
    let coords: Vec<Vec<usize>> = (0..s).map(|i| shape.unravel(i)).collect();
    let matrix = DMatrix::from_fn(s, s, |a, b| g.values()[diff_linear(shape, &coords[a], &coords[b])]);
    Ok(LevelCirculant { shape: shape.clone(), matrix })
}

/// The unitary n-dimensional DFT matrix `Π_w ρ_{s_w}^{α_w β_w} / √s_w`.
pub fn build_fourier(shape: &Shape) -> Result<DMatrix<Complex64>> {
    check_size(shape)?;
    let s = shape.len();
    let coords: Vec<Vec<usize>> = (0..s).map(|i| shape.unravel(i)).collect();
    Ok(DMatrix::from_fn(s, s, |a, b| {
        coords[a]
            .iter()
            .zip(&coords[b])
            .zip(shape.dims())
            .map(|((&x, &y), &d)| {
                let phase = -2.0 * std::f64::consts::PI * ((x * y) % d) as f64 / d as f64;
                Complex64::from_polar(1.0 / (d as f64).sqrt(), phase)
            })
            .product()
    }))
}

/// Largest deviations seen when conjugating an expanded grid by the DFT matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagonalizationReport {
    /// Largest off-diagonal magnitude of `F·G̃·F⁻¹`, relative to the largest entry.
    pub off_diag_max: f64,
    /// Largest gap between the diagonal and the nength, relative to the largest entry.
    pub diag_vs_nength_max: f64,
}

impl DiagonalizationReport {
    pub fn within(&self, tol: f64) -> bool {
        self.off_diag_max < tol && self.diag_vs_nength_max < tol
    }
}

fn relative_report(d: &DMatrix<Complex64>, nength_at: impl Fn(usize) -> Complex64) -> DiagonalizationReport {
    let s = d.nrows();
    let scale = d.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut off: f64 = 0.0;
    let mut diag: f64 = 0.0;
    for a in 0..s {
        for b in 0..s {
            if a == b {
                diag = diag.max((d[(a, a)] - nength_at(a)).norm());
            } else {
                off = off.max(d[(a, b)].norm());
            }
        }
    }
    DiagonalizationReport { off_diag_max: off / scale, diag_vs_nength_max: diag / scale }
}

/// Computes `F·G̃·F⁻¹` (with `F⁻¹ = F*`) and compares it with the nength.
///
/// With `F` symmetric and `ρ = exp(−2πi/q)`, the diagonal entry at row `k`
/// equals the nength at `−k`; it is compared there.
pub fn verify_diagonalization(g: &IntGrid) -> Result<DiagonalizationReport> {
    let shape = g.shape();
    let f = build_fourier(shape)?;
    let d = &f * expand(g)?.to_complex() * f.adjoint();
    let nength = nengthen(g);
    Ok(relative_report(&d, |k| nength.values()[shape.negate_linear(k)]))
}

/// Computes `F⁻¹·G̃·F`, whose diagonal is the nength in grid order.
pub fn verify_inverse_diagonalization(g: &IntGrid) -> Result<DiagonalizationReport> {
    let f = build_fourier(g.shape())?;
    let d = f.adjoint() * expand(g)?.to_complex() * &f;
    let nength = nengthen(g);
    Ok(relative_report(&d, |k| nength.values()[k]))
}

/// The m-fold search product `((g_0 ⊙ g_1) ⊙ g_2) …` by direct summation.
pub fn iterated_search_product(grids: &[IntGrid]) -> Result<MatchGrid> {
    let (first, rest) = grids
        .split_first()
        .ok_or_else(|| Error::Unsupported("empty product".into()))?;
    rest.iter().try_fold(first.clone(), |acc, g| search_product(&acc, g))
}

/// Whether the product of the expanded circulants carries the search product
/// of the grids at every entry: `[G̃_0 ⋯ G̃_{m−1}]_{(α),(β)} = S[β − α]`.
pub fn verify_product_equivalence(grids: &[IntGrid]) -> Result<bool> {
    if !(2..=3).contains(&grids.len()) {
        return Err(Error::Unsupported(format!("m = {} (lab checks m = 2 or 3)", grids.len())));
    }
    let shape = grids[0].shape();
    if let Some(g) = grids.iter().find(|g| g.shape() != shape) {
        return Err(Error::ShapeMismatch { left: shape.dims().to_vec(), right: g.shape().dims().to_vec() });
    }
    let mut product = expand(&grids[0])?.matrix;
    for g in &grids[1..] {
        product = product * expand(g)?.matrix;
    }
    let sp = iterated_search_product(grids)?;
    let coords: Vec<Vec<usize>> = (0..shape.len()).map(|i| shape.unravel(i)).collect();
    for a in 0..shape.len() {
        for b in 0..shape.len() {
            if product[(a, b)] != sp.values()[diff_linear(shape, &coords[a], &coords[b])] {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(dims: &[usize], values: &[i64]) -> IntGrid {
        IntGrid::new(Shape::new(dims.to_vec()).unwrap(), values.to_vec()).unwrap()
    }

    fn random_grid(rng: &mut ChaCha8Rng, dims: &[usize]) -> IntGrid {
        let s = Shape::new(dims.to_vec()).unwrap();
        IntGrid::from_fn(s, |_| rng.gen_range(-9..=9))
    }

    #[test]
    fn expand_examples() {
        let g = grid(&[3], &[10, 11, 12]);
        let m = expand(&g).unwrap();
        let rows: Vec<Vec<i64>> = (0..3).map(|r| m.matrix().row(r).iter().copied().collect()).collect();
        assert_eq!(rows, vec![vec![10, 11, 12], vec![12, 10, 11], vec![11, 12, 10]]);
        assert_eq!(expand(&grid(&[1], &[5])).unwrap().matrix().as_slice(), &[5]);
        let g2 = grid(&[2, 2], &[1, 2, 3, 4]);
        assert_eq!(expand(&g2).unwrap().entry(&[0, 0], &[1, 1]).unwrap(), 4);
    }

    #[test]
    fn entry_law_holds_everywhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for dims in [vec![4], vec![2, 3], vec![2, 2, 2], vec![3, 1, 5]] {
            let g = random_grid(&mut rng, &dims);
            let m = expand(&g).unwrap();
            let shape = g.shape();
            for a in 0..shape.len() {
                for b in 0..shape.len() {
                    let al: Vec<i64> = shape.unravel(a).iter().map(|&v| v as i64).collect();
                    let be: Vec<i64> = shape.unravel(b).iter().map(|&v| v as i64).collect();
                    let diff: Vec<i64> = be.iter().zip(&al).map(|(x, y)| x - y).collect();
                    assert_eq!(m.entry(&al, &be).unwrap(), g.get(&diff).unwrap());
                }
            }
        }
    }

    #[test]
    fn lab_size_is_capped() {
        let g = IntGrid::zeros(Shape::new(vec![65]).unwrap());
        assert!(matches!(expand(&g), Err(Error::LabSize { s: 65, .. })));
        assert!(build_fourier(&Shape::new(vec![8, 9]).unwrap()).is_err());
        assert!(expand(&IntGrid::zeros(Shape::new(vec![8, 8]).unwrap())).is_ok());
    }

    #[test]
    fn fourier_examples() {
        let h = 1.0 / 2f64.sqrt();
        let f2 = build_fourier(&Shape::new(vec![2]).unwrap()).unwrap();
        let want = [h, h, h, -h];
        for (v, w) in f2.iter().zip(want) {
            assert!((v - Complex64::new(w, 0.0)).norm() < 1e-15);
        }
        let f1 = build_fourier(&Shape::new(vec![1]).unwrap()).unwrap();
        assert!((f1[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let f22 = build_fourier(&Shape::new(vec![2, 2]).unwrap()).unwrap();
        let kron = f2.kronecker(&f2);
        assert!((f22 - kron).iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn fourier_is_unitary() {
        for dims in [vec![1], vec![5], vec![2, 3], vec![4, 4], vec![2, 2, 3], vec![7, 9]] {
            let f = build_fourier(&Shape::new(dims).unwrap()).unwrap();
            let id = &f * f.adjoint();
            let s = f.nrows();
            for a in 0..s {
                for b in 0..s {
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!((id[(a, b)] - Complex64::new(want, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn diagonalization_examples() {
        let delta = IntGrid::delta(Shape::new(vec![2, 3]).unwrap());
        let m = expand(&delta).unwrap();
        assert_eq!(m.matrix(), &DMatrix::<i64>::identity(6, 6));
        let r = verify_diagonalization(&delta).unwrap();
        assert!(r.off_diag_max < 1e-12 && r.diag_vs_nength_max < 1e-12);

        let ones = grid(&[4], &[1, 1, 1, 1]);
        let f = build_fourier(ones.shape()).unwrap();
        let d = &f * expand(&ones).unwrap().to_complex() * f.adjoint();
        assert!((d[(0, 0)] - Complex64::new(4.0, 0.0)).norm() < 1e-12);
        for k in 1..4 {
            assert!(d[(k, k)].norm() < 1e-12);
        }

        let g = grid(&[4], &[3, -1, 4, 1]);
        assert!(verify_diagonalization(&g).unwrap().within(1e-9));
        assert!(verify_inverse_diagonalization(&g).unwrap().within(1e-9));
    }

    #[test]
    fn diagonal_sits_at_negated_index() {
        // asymmetric grid: F·G̃·F⁻¹ and F⁻¹·G̃·F differ by k -> -k
        let g = grid(&[3], &[0, 1, 0]);
        let f = build_fourier(g.shape()).unwrap();
        let d = &f * expand(&g).unwrap().to_complex() * f.adjoint();
        let n = nengthen(&g);
        assert!((d[(1, 1)] - n.values()[2]).norm() < 1e-12);
        assert!((d[(1, 1)] - n.values()[1]).norm() > 0.5);
    }

    #[test]
    fn product_equivalence_examples() {
        let p = grid(&[3], &[1, 2, 0]);
        let t = grid(&[3], &[1, 0, 1]);
        assert!(verify_product_equivalence(&[p.clone(), t.clone()]).unwrap());
        let prod = expand(&p).unwrap().matrix() * expand(&t).unwrap().matrix();
        assert_eq!(prod.row(0).iter().copied().collect::<Vec<_>>(), vec![3, 2, 1]);
        assert!(verify_product_equivalence(&[IntGrid::zeros(p.shape().clone()), t.clone()]).unwrap());

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let gs: Vec<IntGrid> = (0..3).map(|_| random_grid(&mut rng, &[3])).collect();
        assert!(verify_product_equivalence(&gs).unwrap());
        assert!(verify_product_equivalence(&gs[..1]).is_err());
    }

    #[test]
    fn detects_a_wrong_product() {
        let p = grid(&[3], &[1, 2, 0]);
        let t = grid(&[3], &[1, 0, 1]);
        let (a, b) = (expand(&p).unwrap(), expand(&t).unwrap());
        // transposed operand represents the reversed grid; product no longer matches
        let wrong = a.matrix() * b.matrix().transpose();
        assert_ne!(wrong.row(0).iter().copied().collect::<Vec<_>>(), vec![3, 2, 1]);
    }

    #[test]
    fn triple_product_is_order_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for dims in [vec![4], vec![2, 2], vec![2, 3]] {
            let gs: Vec<IntGrid> = (0..3).map(|_| random_grid(&mut rng, &dims)).collect();
            let m: Vec<DMatrix<i64>> = gs.iter().map(|g| expand(g).unwrap().matrix).collect();
            assert_eq!((&m[0] * &m[1]) * &m[2], &m[0] * (&m[1] * &m[2]));
            let right = search_product(&gs[0], &search_product(&gs[1], &gs[2]).unwrap()).unwrap();
            assert_eq!(iterated_search_product(&gs).unwrap(), right);
            assert!(verify_product_equivalence(&gs).unwrap());
        }
    }
}
