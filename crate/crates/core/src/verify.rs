//! Randomized equivalence trials between the transform path and the direct oracles.
//!
//! Each trial is a pure function of its seed, so a failure can be replayed
//! from the seed alone.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circulant::{verify_diagonalization, verify_product_equivalence, DiagonalizationReport};
use crate::codec::{AlphabetMode, CodeSpace, PatternSupport, Query};
use crate::engine::{build_index, find_all, lookup, match_nowrap};
use crate::error::Result;
use crate::grid::{IntGrid, Shape};
use crate::naive::{search_product, sliding_match};
use crate::spectral::{hadamard, nengthen, unnengthen_with_report};

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random shape with `1..=max_ndim` axes of `1..=max_dim` cells each.
pub fn random_shape(rng: &mut impl Rng, max_ndim: usize, max_dim: usize) -> Shape {
    let n = rng.gen_range(1..=max_ndim);
    Shape::new((0..n).map(|_| rng.gen_range(1..=max_dim)).collect()).expect("nonzero dims")
}

/// `r` distinct cells, written with random whole-period offsets so that
/// support construction has to reduce them.
pub fn random_support(rng: &mut impl Rng, shape: &Shape, r: usize) -> PatternSupport {
    let cells: Vec<Vec<i64>> = sample(rng, shape.len(), r)
        .into_iter()
        .map(|p| {
            shape
                .unravel(p)
                .iter()
                .zip(shape.dims())
                .map(|(&v, &d)| v as i64 + d as i64 * rng.gen_range(-1..=1))
                .collect()
        })
        .collect();
    PatternSupport::new(shape.clone(), &cells).expect("distinct cells")
}

/// Every digit tuple of length `r` over `codes`.
pub fn all_queries(codes: std::ops::RangeInclusive<i64>, r: usize) -> Vec<Query> {
    let mut out = vec![Vec::with_capacity(r)];
    for _ in 0..r {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                codes.clone().map(move |c| {
                    let mut next = prefix.clone();
                    next.push(c);
                    next
                })
            })
            .collect();
    }
    out.into_iter().map(Query::new).collect()
}

/// A text and support drawn for an engine-vs-oracle trial.
#[derive(Clone, Debug)]
pub struct EngineInstance {
    pub text: IntGrid,
    pub support: PatternSupport,
    pub sigma: u64,
}

impl std::fmt::Display for EngineInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "shape {:?}, sigma {}, cells {:?}, text {:?}",
            self.text.shape().dims(),
            self.sigma,
            self.support.cells(),
            self.text.values()
        )
    }
}

/// σ ≤ 4, r ≤ 4, codes 0..=σ (0 is an empty cell in shifted mode).
pub fn random_engine_instance(rng: &mut impl Rng, max_dim: usize) -> EngineInstance {
    let shape = random_shape(rng, 3, max_dim);
    let sigma = rng.gen_range(1..=4u64);
    let empty_rate = rng.gen_range(0.0..0.3);
    let text = IntGrid::from_fn(shape.clone(), |_| {
        if rng.gen_bool(empty_rate) {
            0
        } else {
            rng.gen_range(1..=sigma as i64)
        }
    });
    let r = rng.gen_range(1..=4usize.min(shape.len()));
    let support = random_support(rng, &shape, r);
    EngineInstance { text, support, sigma }
}

/// Outcome of one engine-vs-oracle trial.
#[derive(Clone, Debug)]
pub struct EngineTrial {
    pub seed: u64,
    pub queries_checked: usize,
    pub failure: Option<String>,
}

impl EngineTrial {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Compares `lookup` against `sliding_match` for every query, with and without
/// wrapping in shifted mode, and again with the empty code treated as a real
/// character in paper mode (wrapping only).
///
/// `sabotage` corrupts one engine answer, to exercise the failure path.
pub fn engine_trial(seed: u64, max_dim: usize, sabotage: bool) -> EngineTrial {
    let mut rng = rng_for(seed);
    let inst = random_engine_instance(&mut rng, max_dim);
    let mut checked = 0;
    let result = (|| -> Result<Option<String>> {
        let shifted = CodeSpace::new(inst.sigma, AlphabetMode::Shifted)?;
        let paper = CodeSpace::new(inst.sigma + 1, AlphabetMode::Paper)?;
        let wrapped = find_all(&build_index(&inst.text, shifted)?, &inst.support)?;
        let unwrapped = match_nowrap(&inst.text, &inst.support, shifted)?;
        let as_paper = find_all(&build_index(&inst.text, paper)?, &inst.support)?;
        let runs = [
            ("shifted wrap", &wrapped, shifted, true),
            ("shifted no-wrap", &unwrapped, shifted, false),
            ("paper wrap", &as_paper, paper, true),
        ];
        for (label, table, space, wrap) in runs {
            for q in all_queries(space.symbol_codes(), inst.support.len()) {
                let mut got = lookup(table, &q);
                if sabotage && checked == 0 {
                    got.push(vec![usize::MAX; inst.text.shape().ndim()]);
                }
                let want = sliding_match(&inst.text, &inst.support, &q, wrap)?;
                checked += 1;
                if got != want {
                    return Ok(Some(format!(
                        "{label}: query {:?} engine {got:?} oracle {want:?}; {inst}",
                        q.digits()
                    )));
                }
            }
        }
        Ok(None)
    })();
    let failure = match result {
        Ok(f) => f,
        Err(e) => Some(format!("error: {e}; {inst}")),
    };
    EngineTrial { seed, queries_checked: checked, failure }
}

/// Outcome of one convolution-theorem trial.
#[derive(Clone, Copy, Debug)]
pub struct ConvolutionTrial {
    pub seed: u64,
    pub exact: bool,
    pub residual: f64,
    pub max_imag: f64,
}

/// Random pattern and text within the exactness budget: a random support
/// encoded in base `b ≤ 5` (`r ≤ 4`) against text codes below `b`, or small
/// signed integers on both sides.
pub fn random_product_pair(rng: &mut impl Rng, max_dim: usize) -> (IntGrid, IntGrid) {
    let shape = random_shape(rng, 3, max_dim);
    if rng.gen_bool(0.5) {
        let base = rng.gen_range(2..=5i64);
        let r = rng.gen_range(1..=4usize.min(shape.len()));
        let support = random_support(rng, &shape, r);
        let p = crate::codec::encode_pattern(&support, base as u64).expect("within budget");
        let t = IntGrid::from_fn(shape, |_| rng.gen_range(0..base));
        (p, t)
    } else {
        let p = IntGrid::from_fn(shape.clone(), |_| rng.gen_range(-100..=100));
        let t = IntGrid::from_fn(shape, |_| rng.gen_range(-100..=100));
        (p, t)
    }
}

pub fn convolution_trial(seed: u64, max_dim: usize) -> ConvolutionTrial {
    let mut rng = rng_for(seed);
    let (p, t) = random_product_pair(&mut rng, max_dim);
    let want = search_product(&p, &t).expect("small entries");
    let product = hadamard(&nengthen(&p), &nengthen(&t)).expect("same shape");
    match unnengthen_with_report(&product) {
        Ok((got, report)) => ConvolutionTrial {
            seed,
            exact: got == want,
            residual: report.max_residual,
            max_imag: report.max_imag,
        },
        Err(_) => ConvolutionTrial { seed, exact: false, residual: f64::INFINITY, max_imag: f64::INFINITY },
    }
}

/// Outcome of one lab trial (dense circulant algebra).
#[derive(Clone, Copy, Debug)]
pub struct LabTrial {
    pub seed: u64,
    pub diagonalization: DiagonalizationReport,
    pub m: usize,
    pub product_equivalent: bool,
}

/// Random shape with at most `max_cells` cells.
pub fn random_small_shape(rng: &mut impl Rng, max_cells: usize) -> Shape {
    loop {
        let s = random_shape(rng, 3, max_cells);
        if s.len() <= max_cells {
            return s;
        }
    }
}

pub fn lab_trial(seed: u64, max_cells: usize) -> Result<LabTrial> {
    let mut rng = rng_for(seed);
    let shape = random_small_shape(&mut rng, max_cells);
    let m = rng.gen_range(2..=3);
    let grids: Vec<IntGrid> = (0..m)
        .map(|_| IntGrid::from_fn(shape.clone(), |_| rng.gen_range(-9..=9)))
        .collect();
    Ok(LabTrial {
        seed,
        diagonalization: verify_diagonalization(&grids[0])?,
        m,
        product_equivalent: verify_product_equivalence(&grids)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn query_enumeration() {
        let qs = all_queries(1..=3, 2);
        assert_eq!(qs.len(), 9);
        assert_eq!(qs[0].digits(), &[1, 1]);
        assert_eq!(qs[8].digits(), &[3, 3]);
    }

    #[test]
    fn trials_are_reproducible() {
        let a = engine_trial(42, 5, false);
        let b = engine_trial(42, 5, false);
        assert_eq!(a.queries_checked, b.queries_checked);
        assert!(a.passed(), "{:?}", a.failure);
    }

    #[test]
    fn sabotage_is_detected() {
        assert!(!engine_trial(1, 4, true).passed());
    }

    #[test]
    fn a_few_of_each() {
        for seed in 0..20 {
            assert!(engine_trial(seed, 6, false).passed());
            assert!(convolution_trial(seed, 8).exact);
            let lab = lab_trial(seed, 16).unwrap();
            assert!(lab.product_equivalent && lab.diagonalization.within(1e-9));
        }
    }
}
