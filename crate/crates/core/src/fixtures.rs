//! Named games used throughout the tests, the docs and the CLI's `gen` examples.

use crate::game::{NormalFormGame, PayoffVector, StrategyProfile};
use crate::strategy::{NegotiationStrategy, PlannedMove, Scripted, Stationary};

fn parse(text: &str) -> NormalFormGame {
    NormalFormGame::parse(text).expect("fixture parses")
}

/// Prisoner's Dilemma with the (1,1) defection equilibrium.
pub fn pd1() -> NormalFormGame {
    NormalFormGame::from_ints(&["C", "D"], &["C", "D"], &[&[(4, 4), (0, 5)], &[(5, 0), (1, 1)]])
}

/// `pd1` after `Row -> Col : 2 / C`.
pub fn pd1_after_row_offer() -> NormalFormGame {
    NormalFormGame::from_ints(&["C", "D"], &["C", "D"], &[&[(2, 6), (0, 5)], &[(3, 2), (1, 1)]])
}

/// `pd1` after both players offer 2 on `C`.
pub fn pd1_after_both_offers() -> NormalFormGame {
    NormalFormGame::from_ints(&["C", "D"], &["C", "D"], &[&[(4, 4), (2, 3)], &[(3, 2), (1, 1)]])
}

/// Prisoner's Dilemma whose defection equilibrium pays (3,3).
pub fn pd2() -> NormalFormGame {
    NormalFormGame::from_ints(
        &["C_Row", "D_Row"],
        &["C_Col", "D_Col"],
        &[&[(4, 4), (0, 5)], &[(5, 0), (3, 3)]],
    )
}

/// Two-by-three game without pure equilibria that unconditional offers solve.
pub fn worked_example() -> NormalFormGame {
    parse("players Row Col\nrows R1 R2\ncols C1 C2 C3\npayoffs\n2 10 | 10 4 | 5 1\n6 0 | 4 4 | 6 3\n")
}

/// After `Row -> Col : 1+e / C3`.
pub fn worked_stage1() -> NormalFormGame {
    parse("players Row Col\nrows R1 R2\ncols C1 C2 C3\npayoffs\n2 10 | 10 4 | 4-e 2+e\n6 0 | 4 4 | 5-e 4+e\n")
}

/// After `Col -> Row : 4+e / R1`.
pub fn worked_stage2() -> NormalFormGame {
    parse("players Row Col\nrows R1 R2\ncols C1 C2 C3\npayoffs\n6+e 6-e | 14+e 0-e | 8 -2\n6 0 | 4 4 | 5-e 4+e\n")
}

/// After `Row -> Col : 6+e / C2`.
pub fn worked_final_row_first() -> NormalFormGame {
    parse("players Row Col\nrows R1 R2\ncols C1 C2 C3\npayoffs\n6+e 6-e | 8 6 | 8 -2\n6 0 | -2-e 10+e | 5-e 4+e\n")
}

/// Three-by-two game where moving first with an effective offer costs the mover.
pub fn disadvantage() -> NormalFormGame {
    NormalFormGame::from_ints(
        &["R1", "R2", "R3"],
        &["C1", "C2"],
        &[&[(1, 8), (10, 4)], &[(4, 10), (1, 11)], &[(4, 0), (2, 2)]],
    )
}

pub fn disadvantage_final_row_first() -> NormalFormGame {
    parse("players Row Col\nrows R1 R2 R3\ncols C1 C2\npayoffs\n1 8 | 6-e 8+e\n4 10 | -3-e 15+e\n4 0 | -2-e 6+e\n")
}

pub fn disadvantage_final_col_first() -> NormalFormGame {
    parse("players Row Col\nrows R1 R2 R3\ncols C1 C2\npayoffs\n4+e 5-e | 9 5\n4 10 | -3-e 15+e\n4 0 | -2-e 6+e\n")
}

/// Game in which non-stationary threats sustain the (3,3) split of a non-maximal outcome.
pub fn inefficiency() -> NormalFormGame {
    NormalFormGame::from_ints(&["U", "D"], &["L", "R"], &[&[(2, 2), (4, 3)], &[(3, 3), (2, 2)]])
}

/// Threat profile on `inefficiency`: agree on (3,3) at (D,L); whoever leaves
/// that path is held to 2 by a stationary split of (U,R).
pub fn inefficiency_profile() -> NegotiationStrategy {
    let v = |a: i64, b: i64| PayoffVector::new(a.into(), b.into());
    let ur = StrategyProfile::new(0, 1);
    let row_punished = Stationary {
        outcome: ur,
        split: v(2, 5),
        thresholds: v(2, 5),
        only_maximal: true,
    };
    let col_punished = Stationary {
        outcome: ur,
        split: v(5, 2),
        thresholds: v(5, 2),
        only_maximal: false,
    };
    NegotiationStrategy::Scripted(Scripted {
        path: vec![
            PlannedMove::Propose {
                outcome: StrategyProfile::new(1, 0),
                split: v(3, 3),
            },
            PlannedMove::Accept,
            PlannedMove::Pass,
            PlannedMove::Pass,
        ],
        if_row_deviates: Box::new(NegotiationStrategy::Stationary(row_punished)),
        if_col_deviates: Box::new(NegotiationStrategy::Stationary(col_punished)),
    })
}
