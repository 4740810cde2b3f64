//! Generators shared by the integration suites.
#![allow(dead_code)]

use preplay_core::numeric::{ratio, Rational};
use preplay_core::offers::{apply_offer, Offer};
use preplay_core::{NormalFormGame, PayoffVector, Player, StrategyProfile, Value};
use proptest::prelude::*;

/// Reals with denominators up to 4 and small ε parts.
pub fn value() -> impl Strategy<Value = Value> {
    (-12i64..=12, 1i64..=4, -2i64..=2).prop_map(|(n, d, e)| Value::new(ratio(n, d), ratio(e, 1)))
}

pub fn nonneg_value() -> impl Strategy<Value = Value> {
    (0i64..=12, 1i64..=4, 0i64..=2).prop_map(|(n, d, e)| Value::new(ratio(n, d), ratio(e, 1)))
}

pub fn rational_in_unit() -> impl Strategy<Value = Rational> {
    (1i64..=98, 99i64..=100).prop_map(|(n, d)| ratio(n, d))
}

pub fn game_with(rows: std::ops::RangeInclusive<usize>, cols: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = NormalFormGame> {
    (rows, cols).prop_flat_map(|(r, c)| {
        proptest::collection::vec(proptest::collection::vec((value(), value()), c), r).prop_map(move |cells| {
            NormalFormGame::new(
                ["Row".into(), "Col".into()],
                (1..=r).map(|i| format!("R{i}")).collect(),
                (1..=c).map(|j| format!("C{j}")).collect(),
                cells
                    .into_iter()
                    .map(|line| line.into_iter().map(|(a, b)| PayoffVector::new(a, b)).collect())
                    .collect(),
            )
            .unwrap()
        })
    })
}

pub fn game() -> impl Strategy<Value = NormalFormGame> {
    game_with(1..=4, 1..=4)
}

pub fn player() -> impl Strategy<Value = Player> {
    prop_oneof![Just(Player::Row), Just(Player::Col)]
}

/// Offers valid in `g`.
pub fn offers_for(g: &NormalFormGame, sizes: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<Offer>> {
    let (rows, cols) = (g.rows(), g.cols());
    proptest::collection::vec((player(), nonneg_value(), 0usize..16), sizes).prop_map(move |raw| {
        raw.into_iter()
            .map(|(p, amount, s)| {
                let n = if p == Player::Row { cols } else { rows };
                Offer::new(p, amount, s % n).unwrap()
            })
            .collect()
    })
}

pub fn game_and_offers(sizes: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (NormalFormGame, Vec<Offer>)> {
    game().prop_flat_map(move |g| {
        let offers = offers_for(&g, sizes.clone());
        (Just(g), offers)
    })
}

/// Every unconditional offer with amounts `k/8` for `k` in `0..=80`, with and
/// without an ε on top.
pub fn offer_grid(g: &NormalFormGame, proposer: Player) -> Vec<Offer> {
    let mut out = Vec::new();
    for j in 0..g.num_strategies(proposer.other()) {
        for k in 0..=80 {
            let base = Value::from(ratio(k, 8));
            for amount in [base.clone(), base.plus()] {
                out.push(Offer::new(proposer, amount, j).unwrap());
            }
        }
    }
    out
}

/// Best payoff the proposer secures with one grid offer whose contingent
/// strategy becomes the recipient's strict best response to every best
/// response of the proposer.
pub fn best_grid_value(g: &NormalFormGame, proposer: Player) -> Option<Value> {
    let recipient = proposer.other();
    let at = |i: usize, j: usize| StrategyProfile::from_player(proposer, i, j);
    offer_grid(g, proposer)
        .iter()
        .filter_map(|o| {
            let t = apply_offer(g, o).unwrap();
            let j = o.strategy();
            let own = |i: usize| t.payoff_of(proposer, at(i, j)).clone();
            let top = (0..g.num_strategies(proposer)).map(own).max().unwrap();
            let best: Vec<usize> = (0..g.num_strategies(proposer)).filter(|&i| own(i) == top).collect();
            let strict = best.iter().all(|&i| {
                (0..g.num_strategies(recipient))
                    .filter(|&k| k != j)
                    .all(|k| t.payoff_of(recipient, at(i, j)) > t.payoff_of(recipient, at(i, k)))
            });
            strict.then_some(top)
        })
        .max()
}
