//! Piecewise-linear order-automorphisms of the rational line.

mod descriptor;
mod finite;
mod rules;
mod support;

pub use descriptor::{
    disjoint_patch, piecewise_patch, span_hull, Breakpoints, Factor, MapDescriptor, PatchPart, Region,
    Segment,
};
pub use finite::{finite_pl_equal, FinitePl, Piece};
pub use rules::{conjugate_word, ping_pong_pair, BasisLetter, BlockRule};
pub use support::{support_probe, SupportReport, PROBE_BREAKPOINT_LIMIT};
