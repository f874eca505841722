//! Analytic capacity lower bounds for binary channels with i.i.d. deletions
//! and insertions, under a symmetric first-order Markov input.
//!
//! The crate is organised bottom-up:
//!
//! - [`sequence`], [`source`], [`params`]: bit strings, run-length codecs,
//!   the Markov source.
//! - [`channel`]: channel realisations with the auxiliary sequences
//!   `I` (insertions), `T` (complementary insertions) and `S` (deleted runs).
//! - [`bounds`]: the limiting entropy terms and the four bounds.
//! - [`oracle`]: exhaustive enumeration at small block lengths.
//! - [`mc`]: Monte Carlo estimates of the limiting terms.
//! - [`optimize`]: maximisation over the Markov parameter and sweeps.
//! - [`verify`]: the verification suites shared by the CLI and the tests.
//!
//! All entropies are in bits.

pub mod bounds;
pub mod channel;
pub mod error;
pub mod mc;
pub mod numeric;
pub mod optimize;
pub mod oracle;
pub mod params;
pub mod sequence;
pub mod source;
pub mod verify;

pub use error::{Error, Result};
pub use numeric::binary_entropy;
pub use params::{ChannelParams, EntropyTerm, MarkovSourceParams};
pub use sequence::{from_runs, to_runs, BitSequence, RunSequence};
pub use source::{generate_markov_sequence, geometric_run_pmf};
