//! Wall-clock scaling measurements for the direct and transform paths.

use std::fmt;
use std::time::Instant;

use rand::Rng;

use crate::codec::encode_pattern;
use crate::error::{Error, Result};
use crate::grid::{IntGrid, Shape};
use crate::naive::search_product;
use crate::spectral::fast_search_product;
use crate::verify::{random_support, rng_for};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BenchEngine {
    Naive,
    Fft,
}

impl fmt::Display for BenchEngine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BenchEngine::Naive => "naive",
            BenchEngine::Fft => "fft",
        })
    }
}

impl std::str::FromStr for BenchEngine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(BenchEngine::Naive),
            "fft" => Ok(BenchEngine::Fft),
            other => Err(Error::Unsupported(format!("engine {other:?}"))),
        }
    }
}

/// One timed computation of a full match grid.
#[derive(Clone, Debug)]
pub struct BenchRecord {
    pub s: usize,
    pub shape: Shape,
    pub engine: BenchEngine,
    pub seconds: f64,
    /// Analytic count, not a measurement.
    pub op_estimate: f64,
}

impl BenchRecord {
    /// `64x64` style label.
    pub fn shape_label(&self) -> String {
        self.shape.dims().iter().map(ToString::to_string).collect::<Vec<_>>().join("x")
    }
}

/// `s²` multiply-adds for the direct product; three transforms at
/// `5 s log₂ s` each plus `s` products for the transform path.
pub fn op_estimate(engine: BenchEngine, s: usize) -> f64 {
    let s = s as f64;
    match engine {
        BenchEngine::Naive => s * s,
        BenchEngine::Fft => 3.0 * 5.0 * s * s.log2().max(1.0) + s,
    }
}

/// Splits `s` into `ndim` factors as close to `s^(1/ndim)` as divisibility allows.
pub fn balanced_shape(s: usize, ndim: usize) -> Result<Shape> {
    if s == 0 || ndim == 0 {
        return Err(Error::InvalidShape(format!("cannot split {s} cells over {ndim} axes")));
    }
    let mut rest = s;
    let mut dims = Vec::with_capacity(ndim);
    for left in (1..=ndim).rev() {
        if left == 1 {
            dims.push(rest);
            break;
        }
        let target = (rest as f64).powf(1.0 / left as f64).round() as usize;
        let d = (1..=target.max(1)).rev().find(|d| rest % d == 0).unwrap_or(1);
        dims.push(d);
        rest /= d;
    }
    dims.sort_unstable_by(|a, b| b.cmp(a));
    Shape::new(dims)
}

/// Encoded 4-cell pattern (base 5) and a reversed random text over 4 symbols.
pub fn bench_instance(shape: &Shape, seed: u64) -> Result<(IntGrid, IntGrid)> {
    let mut rng = rng_for(seed);
    let support = random_support(&mut rng, shape, 4.min(shape.len()));
    let pattern = encode_pattern(&support, 5)?;
    let text = IntGrid::from_fn(shape.clone(), |_| rng.gen_range(1..=4)).reverse();
    Ok((pattern, text))
}

/// Median wall time of `reps` runs computing the match grid.
pub fn time_engine(engine: BenchEngine, shape: &Shape, seed: u64, reps: usize) -> Result<BenchRecord> {
    let (pattern, text) = bench_instance(shape, seed)?;
    let mut times = Vec::with_capacity(reps.max(1));
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        let m = match engine {
            BenchEngine::Naive => search_product(&pattern, &text)?,
            BenchEngine::Fft => fast_search_product(&pattern, &text)?,
        };
        std::hint::black_box(&m);
        times.push(start.elapsed().as_secs_f64().max(1e-9));
    }
    times.sort_by(f64::total_cmp);
    Ok(BenchRecord {
        s: shape.len(),
        shape: shape.clone(),
        engine,
        seconds: times[times.len() / 2],
        op_estimate: op_estimate(engine, shape.len()),
    })
}

/// Least-squares `a` in `t ≈ a·s²`.
pub fn quadratic_fit(points: &[(f64, f64)]) -> f64 {
    let num: f64 = points.iter().map(|&(s, t)| s * s * t).sum();
    let den: f64 = points.iter().map(|&(s, _)| s.powi(4)).sum();
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_factor_evenly() {
        assert_eq!(balanced_shape(4096, 2).unwrap().dims(), &[64, 64]);
        assert_eq!(balanced_shape(4096, 1).unwrap().dims(), &[4096]);
        assert_eq!(balanced_shape(4096, 3).unwrap().dims(), &[16, 16, 16]);
        assert_eq!(balanced_shape(1000, 2).unwrap().len(), 1000);
        assert_eq!(balanced_shape(13, 2).unwrap().dims(), &[13, 1]);
        assert!(balanced_shape(0, 2).is_err());
    }

    #[test]
    fn fit_recovers_coefficient() {
        let pts: Vec<(f64, f64)> = [10.0, 20.0, 40.0].iter().map(|&s| (s, 3e-9 * s * s)).collect();
        assert!((quadratic_fit(&pts) - 3e-9).abs() < 1e-20);
    }

    #[test]
    fn both_engines_agree_on_the_bench_instance() {
        let shape = balanced_shape(240, 2).unwrap();
        let (p, t) = bench_instance(&shape, 9).unwrap();
        assert_eq!(search_product(&p, &t).unwrap(), fast_search_product(&p, &t).unwrap());
        let rec = time_engine(BenchEngine::Fft, &shape, 9, 3).unwrap();
        assert!(rec.seconds > 0.0);
        assert_eq!(rec.shape_label(), "16x15");
        assert!(op_estimate(BenchEngine::Naive, 4096) > op_estimate(BenchEngine::Fft, 4096));
        assert_eq!("fft".parse::<BenchEngine>().unwrap(), BenchEngine::Fft);
        assert!("gpu".parse::<BenchEngine>().is_err());
    }
}
