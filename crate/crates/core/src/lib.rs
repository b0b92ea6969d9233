//! Oddomorphisms of small multigraphs and what can be built from them:
//! clique immersions extracted by graph surgery, exact treewidth with
//! certificates, and homomorphism counts with distinguishing families.
//!
//! Every decision comes with a checkable object (a colouring, an immersion
//! witness, a tree decomposition) and a verifier for it.

pub mod canon;
pub mod cli;
pub mod colouring;
pub mod error;
pub mod extract;
pub mod graph;
pub mod homcount;
pub mod immersion;
pub mod io;
pub mod oddmorph;
pub mod twidth;
