mod common;

use preplay_core::bargaining::{redistribution_space, spe_strategy, stationary_strategy};
use preplay_core::fixtures;
use preplay_core::generate::{random_games, GameShape};
use preplay_core::numeric::{int, ratio, Rational};
use preplay_core::png::{
    advance, enumerate_moves, History, HistoryValue, Move, MoveGrid, OutcomeScope, PngConfig,
};
use preplay_core::solution::{expected_value, SolutionConcept};
use preplay_core::spe::{brute_force_spe, verify_spe_one_deviation, SpeCheck, SpeVerdict, DEFAULT_NODE_BUDGET};
use preplay_core::strategy::{simulate, NegotiationStrategy};
use preplay_core::transcript::{replay, Transcript};
use preplay_core::{NormalFormGame, PayoffVector, Player, Value};
use proptest::prelude::*;

fn v(a: Rational, b: Rational) -> PayoffVector {
    PayoffVector::new(a.into(), b.into())
}

fn grid(step: Rational, scope: OutcomeScope) -> MoveGrid {
    MoveGrid::new(step, scope)
}

fn suite() -> Vec<(&'static str, NormalFormGame)> {
    vec![
        ("pd1", fixtures::pd1()),
        ("pd2", fixtures::pd2()),
        ("inefficiency", fixtures::inefficiency()),
    ]
}

fn unconditional_cfg(g: NormalFormGame) -> PngConfig {
    let mut cfg = PngConfig::new(g);
    cfg.allow_conditional = false;
    cfg.allow_withdrawals = true;
    cfg.max_depth = 40;
    cfg
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_move_sequences_track_the_game(
        g in common::game_with(2..=3, 2..=3),
        picks in proptest::collection::vec(0usize..1000, 1..30),
    ) {
        let cfg = unconditional_cfg(g.clone());
        let mut grid = grid(ratio(1, 2), OutcomeScope::All);
        grid.max_amount = int(3);
        let mut h = History::new(&cfg);
        prop_assert_eq!(h.game(), &g);
        for k in picks {
            if h.is_terminal() {
                break;
            }
            let moves = enumerate_moves(&cfg, &h, &grid);
            let m = moves[k % moves.len()].clone();
            let before = h.game().clone();
            let next = advance(&cfg, &h, m.clone()).unwrap();
            if let Move::MakeOffer(_) = m {
                if !next.is_terminal() {
                    // Let the same player take it back right away.
                    let other = advance(&cfg, &next, Move::Pass).unwrap();
                    if !other.is_terminal() {
                        let undone = advance(&cfg, &other, Move::Withdraw(h.len())).unwrap();
                        prop_assert_eq!(undone.game(), &before);
                    }
                }
            }
            h = next;
        }
        let t = Transcript::from_history(&cfg, &h);
        let r = replay(&Transcript::from_json(&t.to_json()).unwrap()).unwrap();
        prop_assert!(r.matches_recorded);
        prop_assert_eq!(r.history.unwrap(), h);
    }
}

#[test]
fn simulated_plays_replay_exactly() {
    for (_, g) in suite() {
        for delta in [None, Some(ratio(1, 2))] {
            let mut cfg = PngConfig::new(g.clone());
            let strategies: Vec<NegotiationStrategy> = match &delta {
                Some(d) => {
                    cfg = cfg.with_discount(d.clone());
                    vec![spe_strategy(&cfg).unwrap()]
                }
                None => {
                    let d = redistribution_space(&g).unwrap().d;
                    let half = Value::new(d.real.clone() / int(2), d.eps.clone());
                    let target = PayoffVector::new(half.clone(), &d - &half);
                    vec![
                        stationary_strategy(&target, &cfg).unwrap(),
                        NegotiationStrategy::GreedyIra,
                        NegotiationStrategy::Passive,
                    ]
                }
            };
            for s in &strategies {
                let sim = simulate(&cfg, [s, s]).unwrap();
                let r = replay(&Transcript::from_history(&cfg, &sim.history)).unwrap();
                assert!(r.matches_recorded);
                assert_eq!(r.final_game.as_ref(), sim.history.outcome_game());
            }
        }
    }
}

#[test]
fn inefficiency_profile_verifies_under_plain_iesds() {
    let mut cfg = PngConfig::new(fixtures::inefficiency());
    cfg.concept = SolutionConcept::Iesds;
    assert_eq!(expected_value(&cfg.starting_game, cfg.concept), v(int(2), int(2)));
    let s = fixtures::inefficiency_profile();
    let verdict =
        verify_spe_one_deviation(&cfg, [&s, &s], &SpeCheck::new(grid(ratio(1, 2), OutcomeScope::All), 8))
            .unwrap();
    assert!(verdict.is_verified(), "{}", verdict.report(&cfg));
}

/// Shared stationary targets on the frontier: verified profiles are efficient
/// and, with opting out allowed, never leave anyone below the starting game.
#[test]
fn stationary_profiles_are_efficient_and_respect_the_opt_out_floor() {
    for (name, g) in suite() {
        let space = redistribution_space(&g).unwrap();
        let d = space.d.real.clone();
        let mut x = int(0);
        while x <= d {
            let target = v(x.clone(), &d - &x);
            let floor = expected_value(&g, SolutionConcept::default());
            for opt_out in [false, true] {
                let mut cfg = PngConfig::new(g.clone());
                cfg.allow_opt_out = opt_out;
                let s = stationary_strategy(&target, &cfg).unwrap();
                let check = SpeCheck::new(grid(int(1), OutcomeScope::All), 6);
                let verdict = verify_spe_one_deviation(&cfg, [&s, &s], &check).unwrap();
                if let SpeVerdict::Verified { value, .. } = &verdict {
                    let values = value.as_vector().unwrap();
                    assert_eq!(values.sum(), space.d, "{name} {}", target.human());
                    assert!(space.on_frontier(&values));
                    if opt_out {
                        for p in Player::BOTH {
                            assert!(values[p] >= floor[p], "{name} {} opt-out", target.human());
                        }
                    }
                } else {
                    assert!(opt_out, "{name} {}: {}", target.human(), verdict.report(&cfg));
                }
            }
            x += int(1);
        }
    }
}

/// Within one truncated tree, a verified profile's value is among the
/// subgame-perfect values found by backward induction.
#[test]
fn one_deviation_verdicts_agree_with_backward_induction() {
    let shape = GameShape {
        max: 3,
        ..GameShape::default()
    };
    let mut checked = 0;
    for (i, g) in random_games(11, 8, &shape).unwrap().into_iter().enumerate() {
        let Ok(space) = redistribution_space(&g) else { continue };
        for delta in [None, Some(ratio(1, 2))] {
            let mut cfg = PngConfig::new(g.clone());
            if let Some(d) = &delta {
                cfg = cfg.with_discount(d.clone());
            }
            let grid = grid(int(1), OutcomeScope::Maximal);
            let depth = 3 + i % 3;
            let spe = brute_force_spe(&cfg, &grid, depth, DEFAULT_NODE_BUDGET).unwrap();
            let mut profiles = vec![NegotiationStrategy::Passive, NegotiationStrategy::GreedyIra];
            let d = space.d.real.clone();
            let mut x = int(0);
            while x <= d {
                profiles.push(stationary_strategy(&v(x.clone(), &d - &x), &cfg).unwrap());
                x += int(1);
            }
            let mut check = SpeCheck::new(grid.clone(), depth);
            check.playout_depth = Some(depth);
            for s in &profiles {
                if let SpeVerdict::Verified { value, .. } = verify_spe_one_deviation(&cfg, [s, s], &check).unwrap() {
                    checked += 1;
                    assert!(spe.iter().any(|o| o.value == value), "game {i}: {} missing", value.human());
                }
            }
        }
    }
    assert!(checked > 0);
}

fn spe_verdict(g: NormalFormGame, delta: Rational, first: Player) -> (PngConfig, SpeVerdict) {
    let mut cfg = PngConfig::new(g).with_discount(delta);
    cfg.first_mover = first;
    let s = spe_strategy(&cfg).unwrap();
    let check = SpeCheck::new(grid(ratio(1, 4), OutcomeScope::All), 8);
    let verdict = verify_spe_one_deviation(&cfg, [&s, &s], &check).unwrap();
    (cfg, verdict)
}

/// The equilibrium strategy is beaten by rejecting and falling back on the
/// starting game when that pays the responder more than its share.
#[test]
fn spe_pair_loses_to_the_status_quo_on_pd2() {
    let (_, verdict) = spe_verdict(fixtures::pd2(), ratio(1, 2), Player::Row);
    let SpeVerdict::Deviation { history, deviator, prescribed, deviation, deviation_value, prescribed_value, .. } = verdict else {
        panic!("expected a deviation");
    };
    assert_eq!(history.len(), 1);
    assert_eq!(deviator, Player::Col);
    assert_eq!((prescribed, deviation), (Move::Accept(0), Move::Reject(0)));
    // x*_B = 8·δ/(1+δ) = 8/3 against the status quo payoff 3.
    assert_eq!(prescribed_value, HistoryValue::finite(&v(ratio(16, 3), ratio(8, 3))));
    assert_eq!(deviation_value, HistoryValue::finite(&v(int(3), int(3))));
}

/// Accepting a gift the proposer then takes back costs a period of discounting.
#[test]
fn spe_pair_loses_to_refusing_a_gift_on_pd1() {
    let (cfg, verdict) = spe_verdict(fixtures::pd1(), ratio(1, 4), Player::Row);
    let SpeVerdict::Deviation { history, deviator, deviation_value, prescribed_value, .. } = &verdict else {
        panic!("expected a deviation");
    };
    assert_eq!(*deviator, Player::Col, "{}", verdict.report(&cfg));
    assert_eq!(history.len(), 4);
    // x* = (8/(1+δ), 8δ/(1+δ)) = (32/5, 8/5); agreement again one proposal later is worth x*·δ².
    let x = v(ratio(32, 5), ratio(8, 5));
    assert_eq!(*deviation_value, HistoryValue::finite(&x));
    assert_eq!(*prescribed_value, HistoryValue::finite(&v(ratio(2, 5), ratio(1, 10))));
}

#[test]
#[ignore = "the equilibrium strategy is not subgame perfect in these negotiations; see the two spe_pair_loses tests"]
fn spe_pairs_pass_the_one_deviation_check() {
    let mut failures = vec![];
    for (name, g) in suite() {
        for delta in [ratio(1, 4), ratio(1, 2), ratio(3, 4)] {
            for first in Player::BOTH {
                let (cfg, verdict) = spe_verdict(g.clone(), delta.clone(), first);
                if !verdict.is_verified() {
                    failures.push(format!("{name} δ={delta} {first:?}: {}", verdict.report(&cfg)));
                }
            }
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}
