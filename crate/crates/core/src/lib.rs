//! Brambles of bounded congestion in directed graphs, built constructively
//! from a well-linked path system.
//!
//! The pipeline takes a digraph together with a family of host paths whose
//! endpoint sets are well linked, threads pairs of hosts into closed walks,
//! refines or untangles those walks, and lands in one of three terminal
//! routines that each emit a verified [`scenarios::Bramble`]. Everything an
//! output claims (strong connectivity of elements, pairwise touching,
//! congestion) is rechecked by independent code in [`harness`].

pub mod bowtie;
pub mod combinatorics;
pub mod digraph;
pub mod error;
pub mod harness;
pub mod linkage;
pub mod orchestrator;
pub mod scenarios;
pub mod threading;
pub mod walk;

pub use digraph::Digraph;
pub use error::{Error, Result};
pub use linkage::{Linkage, PathSystem};
pub use scenarios::Bramble;
pub use threading::ThreadedLinkage;
pub use walk::{Path, Walk, WalkFamily};
