//! Exact rational points, intervals, frames of points and unions of frame
//! blocks.

pub mod blockset;
pub mod frame;
pub mod interval;
pub mod rational;

pub use blockset::{selector_disjoint, BlockSet, Disjointness, Selector};
pub use frame::{BlockRange, Frame, IndexKind, PointRule};
pub use interval::Interval;
pub use rational::{q, rational_cmp, Rational};
