//! Words over generator alphabets, their action by descriptors, free bases
//! and moved-point witnesses.

mod action;
mod basis;
mod witness;
mod word;

pub use action::{eval_word, sample_reduced_word, Action};
pub use basis::{rank2_interval_basis, rank_omega_basis, RankOmegaBasis};
pub use witness::{
    nontriviality_witness, nontriviality_witness_with, search_within, witness_corpus, Budget, Witness,
};
pub use word::{GenIndex, GeneratorId, Letter, Word};
