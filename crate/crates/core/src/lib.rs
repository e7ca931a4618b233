//! Exact wildcard pattern matching over n-dimensional integer grids.
//!
//! A pattern's support cells are encoded as distinct powers of the alphabet
//! base; the cyclic search product of pattern and text then carries, at every
//! alignment, the characters under the support as base-`b` digits. The product
//! is computed through the n-dimensional DFT (a Hadamard product of *nengths*)
//! in O(s log s) rather than O(s²), and rounded back to exact integers.
//!
//! ```
//! use nength::{build_index, find_all, lookup, Alphabet, AlphabetMode, IntGrid, PatternSupport, Query, Shape};
//!
//! let abc = Alphabet::from_chars("ab", AlphabetMode::Shifted).unwrap();
//! let shape = Shape::new(vec![4]).unwrap();
//! let text = IntGrid::new(shape.clone(), abc.encode_str("abba").unwrap()).unwrap();
//! let index = build_index(&text, abc.space()).unwrap();
//! let support = PatternSupport::new(shape, &[vec![0], vec![1]]).unwrap();
//! let table = find_all(&index, &support).unwrap();
//! let hits = lookup(&table, &Query::parse("ba", &abc, &support).unwrap());
//! assert_eq!(hits, vec![vec![2]]);
//! ```

pub mod circulant;
pub mod codec;
pub mod engine;
pub mod error;
pub mod formats;
pub mod grid;
pub mod naive;
pub mod par;
pub mod scaling;
pub mod spectral;
pub mod verify;

pub use codec::{
    capacity_check, decode_value, encode_pattern, query_value, Alphabet, AlphabetMode, Capacity, CodeSpace,
    PatternSupport, Query,
};
pub use engine::{
    build_index, find_all, find_all_with, lookup, match_nowrap, match_nowrap_with, MatchTable, NengthIndex,
    SplitPolicy,
};
pub use error::{Error, Result};
pub use grid::{ComplexGrid, IntGrid, Shape};
pub use naive::{search_product, sliding_match, MatchGrid};
pub use spectral::{hadamard, nengthen, unnengthen_to_int, NengthGrid};
