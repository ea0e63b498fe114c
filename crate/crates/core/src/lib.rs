//! Signed-digit recodings, joint expansions and the cost of interleaved
//! multi-exponentiation.
//!
//! * [`expansions`]: digit words, values, weights, complements, stacking.
//! * [`recoding`]: NAF, simple joint sparse form, complement-then-NAF
//!   recoding, digit-2 reduction and brute-force minimal-weight oracles.
//! * [`multiexp`]: abelian groups, precomputation tables and an evaluator
//!   that counts squarings and multiplications exactly.
//! * [`transducer`]: the NAF transducer, its product with the complement
//!   recoder, and exact Markov-chain analysis over rationals.
//! * [`experiments`]: seeded statistics, verification suites and the
//!   falsification experiments behind the command-line tool.
//!
//! ```
//! use num_bigint::BigInt;
//! use recodekit::{multiexp, wllc_joint, ModGroup, RecodingScheme};
//!
//! let j = wllc_joint(&[BigInt::from(13), BigInt::from(5)])?;
//! assert_eq!(j.to_string(), "100-1-1 / 00101");
//!
//! let g = ModGroup::new(101u32.into())?;
//! let run = multiexp(&[2u32.into(), 3u32.into()], &[5.into(), 3.into()], RecodingScheme::StackedNaf, &g)?;
//! assert_eq!(run.element, 56u32.into());
//! assert_eq!((run.cost.squarings, run.cost.multiplications), (2, 1));
//! # Ok::<(), recodekit::Error>(())
//! ```

pub mod error;
pub mod expansions;
pub mod experiments;
pub mod multiexp;
pub mod recoding;
pub mod transducer;

pub use error::{Error, Result};
pub use expansions::{stack, Digit, Expansion, JointExpansion};
pub use multiexp::{
    evaluate, multiexp, precompute, square_and_multiply, AdditiveGroup, CostCounter, Group,
    ModGroup, PrecompTable, TrivialGroup,
};
pub use recoding::{naf, sjsf, wllc_joint, wllc_recode, RecodingScheme};
