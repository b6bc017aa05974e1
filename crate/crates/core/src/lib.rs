//! Computational toolkit for regularity questions about group actions on the
//! interval: exact PL dynamics, nesting witnesses, Hölder estimates, and the
//! nested lamplighter construction with its parameter feasibility region.

pub mod dynamics;
pub mod exact_pl;
pub mod feasibility;
pub mod io;
pub mod regularity;
pub mod stochastic;
pub mod tsuboi;
