//! The two-generator example on the unit frame: `f` sends each block
//! `[4k, 4k+1)` onto `[4k, 4k + 13/4)` and `g(x) = f(x - 2) + 2`.

use crate::freegroup::{Action, GeneratorId};
use crate::order::{q, Frame, Rational};
use crate::pingpong::{quarter_table, PingPongTable};
use crate::plmap::{FinitePl, MapDescriptor};

fn periodic(knots: Vec<(Rational, Rational)>) -> MapDescriptor {
    let pattern = FinitePl::from_knots(knots).expect("valid pattern");
    MapDescriptor::periodic(q(4, 1), pattern).expect("valid periodic map")
}

/// `0 -> 0, 1 -> 13/4, 2 -> 7/2, 3 -> 15/4, 4 -> 4`, affine in between,
/// repeated with period 4.
pub fn example_f() -> MapDescriptor {
    periodic(vec![
        (q(0, 1), q(0, 1)),
        (q(1, 1), q(13, 4)),
        (q(2, 1), q(7, 2)),
        (q(3, 1), q(15, 4)),
        (q(4, 1), q(4, 1)),
    ])
}

pub fn example_g() -> MapDescriptor {
    MapDescriptor::conjugate(example_f(), q(2, 1))
}

/// `f` with the first block sent onto `[4k, 4k+2)` instead.
pub fn mutated_f() -> MapDescriptor {
    periodic(vec![(q(0, 1), q(0, 1)), (q(1, 1), q(2, 1)), (q(4, 1), q(4, 1))])
}

pub fn example_action() -> Action {
    Action::new()
        .bind(GeneratorId::named("f"), example_f())
        .bind(GeneratorId::named("g"), example_g())
}

/// `(N_0, N_3, f), (N_2, N_1, g)` on the unit frame.
pub fn example_table() -> PingPongTable {
    let (f, g) = (GeneratorId::named("f"), GeneratorId::named("g"));
    quarter_table(&Frame::unit(), f, g, example_action()).expect("valid table")
}

/// The example table with `f` replaced by [`mutated_f`].
pub fn mutated_table() -> PingPongTable {
    let (f, g) = (GeneratorId::named("f"), GeneratorId::named("g"));
    let action = example_action().bind(f.clone(), mutated_f());
    quarter_table(&Frame::unit(), f, g, action).expect("valid table")
}
