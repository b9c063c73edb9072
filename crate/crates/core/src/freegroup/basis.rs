use serde::{Deserialize, Serialize};

use super::word::{GeneratorId, Word};
use crate::error::{Error, Result};
use crate::order::{Frame, Interval};
use crate::plmap::{ping_pong_pair, MapDescriptor};

/// The ping-pong pair on a frame `Γ` that is coterminal in its hull, both
/// maps the identity outside the hull.
///
/// For `i = 0 mod 4` the first map carries `[a_i, a_{i+1}]` onto
/// `[a_i, a_{i+3}]` and `[a_{i+1}, a_{i+4}]` onto `[a_{i+3}, a_{i+4}]`; the
/// second is the same construction on `i = 2 mod 4`.
pub fn rank2_interval_basis(lambda: &Interval, gamma: &Frame) -> Result<(MapDescriptor, MapDescriptor)> {
    if !gamma.is_coterminal() {
        return Err(Error::NotCoterminal);
    }
    if !lambda.contains_interval(&gamma.hull()) {
        return Err(Error::Precondition(format!(
            "frame hull {} is not inside {lambda}",
            gamma.hull()
        )));
    }
    ping_pong_pair(gamma)
}

/// The free family `w_j = f^-j g f^j` of a free pair `(f, g)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankOmegaBasis {
    pub f: GeneratorId,
    pub g: GeneratorId,
}

impl RankOmegaBasis {
    pub fn word(&self, j: u64) -> Word {
        let j = j as i64;
        Word::power(&self.f, -j)
            .concat(&Word::letter(self.g.clone()))
            .concat(&Word::power(&self.f, j))
    }
}

pub fn rank_omega_basis(f: GeneratorId, g: GeneratorId) -> RankOmegaBasis {
    RankOmegaBasis { f, g }
}
