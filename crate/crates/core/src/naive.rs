//! Direct O(s²) search product and sliding-window matching.
//!
//! Nothing here touches floating point; these are the ground truth that the
//! transform path is tested against.

use crate::codec::{PatternSupport, Query};
use crate::error::{Error, Result};
use crate::grid::IntGrid;
use crate::par;

/// The search product of pattern and text. Entries are exact integers.
pub type MatchGrid = IntGrid;

fn same_shape(a: &IntGrid, b: &IntGrid) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::ShapeMismatch {
            left: a.shape().dims().to_vec(),
            right: b.shape().dims().to_vec(),
        });
    }
    Ok(())
}

/// `M[v] = Σ_w p[w] · t[v − w]` over every cell `w`, indices taken modulo the shape.
pub fn search_product(p: &IntGrid, t: &IntGrid) -> Result<MatchGrid> {
    same_shape(p, t)?;
    let shape = p.shape();
    let s = shape.len();
    let pv = p.values();
    let tv = t.values();
    let coords: Vec<Vec<usize>> = (0..s).map(|i| shape.unravel(i)).collect();
    let entries = par::map_range(s, |v| {
        let mut acc: i64 = 0;
        for w in 0..s {
            // position of v - w
            let diff: usize = coords[v]
                .iter()
                .zip(&coords[w])
                .zip(shape.dims().iter().zip(shape.strides()))
                .map(|((&a, &b), (&d, &st))| ((a + d - b) % d) * st)
                .sum();
            let term = pv[w].checked_mul(tv[diff]).ok_or(Error::Overflow("search product"))?;
            acc = acc.checked_add(term).ok_or(Error::Overflow("search product"))?;
        }
        Ok(acc)
    });
    let values = entries.into_iter().collect::<Result<Vec<_>>>()?;
    IntGrid::new(shape.clone(), values)
}

/// Every offset `o` with `text[o + c_j] = query[j]` for all support cells.
///
/// With `wrap` off, an alignment is rejected when any `o + c_j` leaves the grid
/// before modular reduction. Offsets come back sorted lexicographically.
pub fn sliding_match(
    text: &IntGrid,
    support: &PatternSupport,
    query: &Query,
    wrap: bool,
) -> Result<Vec<Vec<usize>>> {
    let shape = text.shape();
    if support.shape().ndim() != shape.ndim() {
        return Err(Error::Dimension { expected: shape.ndim(), got: support.shape().ndim() });
    }
    if query.digits().len() != support.len() {
        return Err(Error::QueryLength { expected: support.len(), got: query.digits().len() });
    }
    let mut out = Vec::new();
    'offsets: for pos in 0..shape.len() {
        let o = shape.unravel(pos);
        for (cell, &want) in support.cells().iter().zip(query.digits()) {
            let idx: Vec<i64> = o.iter().zip(cell).map(|(&a, &b)| (a + b) as i64).collect();
            if !wrap && idx.iter().zip(shape.dims()).any(|(&i, &d)| i >= d as i64) {
                continue 'offsets;
            }
            if text.get(&idx)? != want {
                continue 'offsets;
            }
        }
        out.push(o);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Shape;
    use proptest::prelude::*;

    fn grid(dims: &[usize], values: &[i64]) -> IntGrid {
        IntGrid::new(Shape::new(dims.to_vec()).unwrap(), values.to_vec()).unwrap()
    }

    /// Second, independent evaluation of the search product: scatter each
    /// pattern entry over the text instead of gathering per output cell.
    fn scatter_product(p: &IntGrid, t: &IntGrid) -> Vec<i64> {
        let shape = p.shape();
        let mut out = vec![0i64; shape.len()];
        for w in 0..shape.len() {
            for u in 0..shape.len() {
                let wi = shape.unravel(w);
                let ui = shape.unravel(u);
                let sum: Vec<i64> = wi.iter().zip(&ui).map(|(&a, &b)| (a + b) as i64).collect();
                out[shape.linear(&sum).unwrap()] += p.values()[w] * t.values()[u];
            }
        }
        out
    }

    #[test]
    fn hand_evaluated_product() {
        // M[0] = 1·1 + 2·t[-1] = 1 + 2 = 3; M[1] = 1·0 + 2·1 = 2; M[2] = 1·1 + 2·0 = 1
        let p = grid(&[3], &[1, 2, 0]);
        let t = grid(&[3], &[1, 0, 1]);
        assert_eq!(search_product(&p, &t).unwrap().values(), &[3, 2, 1]);
        assert_eq!(scatter_product(&p, &t), vec![3, 2, 1]);
    }

    #[test]
    fn zero_and_delta() {
        let t = grid(&[2, 3], &[4, -1, 7, 0, 2, 9]);
        let z = IntGrid::zeros(t.shape().clone());
        assert_eq!(search_product(&z, &t).unwrap(), z);
        let d = IntGrid::delta(t.shape().clone());
        assert_eq!(search_product(&d, &t).unwrap(), t);
        assert_eq!(search_product(&t, &d).unwrap(), t);
    }

    #[test]
    fn shape_mismatch_and_overflow() {
        let a = grid(&[2], &[1, 1]);
        let b = grid(&[1, 2], &[1, 1]);
        assert!(matches!(search_product(&a, &b), Err(Error::ShapeMismatch { .. })));
        let big = grid(&[2], &[i64::MAX, 1]);
        assert!(matches!(search_product(&big, &grid(&[2], &[2, 0])), Err(Error::Overflow(_))));
    }

    fn abba() -> IntGrid {
        grid(&[4], &[1, 2, 2, 1])
    }

    fn sup(dims: &[usize], cells: &[&[i64]]) -> PatternSupport {
        let cells: Vec<Vec<i64>> = cells.iter().map(|c| c.to_vec()).collect();
        PatternSupport::new(Shape::new(dims.to_vec()).unwrap(), &cells).unwrap()
    }

    #[test]
    fn sliding_match_examples() {
        let s = sup(&[4], &[&[0], &[1]]);
        let ab = Query::new(vec![1, 2]);
        let ba = Query::new(vec![2, 1]);
        let aa = Query::new(vec![1, 1]);
        assert_eq!(sliding_match(&abba(), &s, &ab, true).unwrap(), vec![vec![0]]);
        assert_eq!(sliding_match(&abba(), &s, &ba, false).unwrap(), vec![vec![2]]);
        assert_eq!(sliding_match(&abba(), &s, &ba, true).unwrap(), vec![vec![2]]);
        assert_eq!(sliding_match(&abba(), &s, &aa, true).unwrap(), vec![vec![3]]);
        assert!(sliding_match(&abba(), &s, &aa, false).unwrap().is_empty());

        let text = grid(&[2, 2], &[1, 2, 2, 1]);
        let s2 = sup(&[2, 2], &[&[0, 0], &[1, 0]]);
        assert_eq!(
            sliding_match(&text, &s2, &ab, true).unwrap(),
            vec![vec![0, 0], vec![1, 1]]
        );
        assert_eq!(sliding_match(&text, &s2, &ab, false).unwrap(), vec![vec![0, 0]]);
    }

    fn pair() -> impl Strategy<Value = (IntGrid, IntGrid, IntGrid)> {
        prop::collection::vec(1usize..5, 1..4).prop_flat_map(|dims| {
            let len: usize = dims.iter().product();
            let v = || prop::collection::vec(-20i64..20, len);
            (v(), v(), v()).prop_map(move |(a, b, c)| (grid(&dims, &a), grid(&dims, &b), grid(&dims, &c)))
        })
    }

    proptest! {
        #[test]
        fn product_laws((p, q, t) in pair()) {
            let pt = search_product(&p, &t).unwrap();
            prop_assert_eq!(pt.values(), &scatter_product(&p, &t)[..]);
            prop_assert_eq!(&pt, &search_product(&t, &p).unwrap());
            let sum = IntGrid::new(
                p.shape().clone(),
                p.values().iter().zip(q.values()).map(|(a, b)| a + b).collect(),
            ).unwrap();
            let lhs = search_product(&sum, &t).unwrap();
            let qt = search_product(&q, &t).unwrap();
            let rhs: Vec<i64> = pt.values().iter().zip(qt.values()).map(|(a, b)| a + b).collect();
            prop_assert_eq!(lhs.values(), &rhs[..]);
        }
    }
}
