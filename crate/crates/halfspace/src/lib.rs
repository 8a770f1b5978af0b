//! Learning homogeneous halfspaces under Tsybakov label noise.
//!
//! The pipeline: draw samples from a noisy-halfspace oracle ([`synthetic`]),
//! search for a certificate that a candidate direction is not optimal
//! ([`certificate`], optionally seeded by [`warmstart`]), and feed the
//! certificates to projected online gradient descent ([`learner`]).

pub mod certificate;
pub mod geometry;
pub mod learner;
pub mod stats;
pub mod synthetic;
pub mod warmstart;
