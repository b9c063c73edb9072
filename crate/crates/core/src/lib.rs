//! Exact computations with order-automorphism groups of the rationals: free
//! subgroups built by ping-pong on block frames, almost-disjoint families,
//! and restricted direct products of finite permutation groups.

pub mod adfam;
pub mod cameron;
pub mod catalog;
pub mod dirprod;
pub mod error;
pub mod freegroup;
pub mod order;
pub mod par;
pub mod pingpong;
pub mod plmap;
pub mod transitivity;

pub use error::{Error, Result};
