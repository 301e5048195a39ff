//! Exact computations with conilpotent dg coproperads: cobar constructions,
//! two-colored resolutions, convolution homotopy Lie algebras and the
//! infinity-morphisms between gebras they encode.

pub mod exactlin;
pub mod graphs;
pub mod sbimod;
pub mod coproperad;
pub mod cobar;
pub mod convolution;
pub mod inftymor;
pub mod integration;
pub mod cli;
