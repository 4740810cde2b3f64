//! Best unconditional offers and greedy alternating negotiation.
//!
//! Every player here looks only at the game an offer immediately produces.
//! Time carries no value.

use serde::{Deserialize, Serialize};

use crate::game::{NormalFormGame, Player, StrategyProfile};
use crate::numeric::Value;
use crate::offers::{apply_offer, Offer, OfferError};
use crate::solution::{expected_value, solution, SolutionConcept};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Feasibility {
    Feasible,
    WeaklyFeasible,
    Infeasible,
}

/// Compares the proposer's expected value before and after `o`.
pub fn feasible(
    g: &NormalFormGame,
    o: &Offer,
    concept: SolutionConcept,
) -> Result<Feasibility, OfferError> {
    let after = apply_offer(g, o)?;
    let p = o.proposer();
    let before = &expected_value(g, concept)[p];
    let now = &expected_value(&after, concept)[p];
    Ok(match now.cmp(before) {
        std::cmp::Ordering::Greater => Feasibility::Feasible,
        std::cmp::Ordering::Equal => Feasibility::WeaklyFeasible,
        std::cmp::Ordering::Less => Feasibility::Infeasible,
    })
}

fn recipient_choices(g: &NormalFormGame, p: Player, concept: SolutionConcept) -> Vec<usize> {
    let mut s: Vec<usize> = solution(g, concept).iter().map(|x| x.get(p)).collect();
    s.sort_unstable();
    s.dedup();
    s
}

/// An offer is effective when it changes which strategies the recipient may
/// end up playing.
pub fn is_effective(
    g: &NormalFormGame,
    o: &Offer,
    concept: SolutionConcept,
) -> Result<bool, OfferError> {
    let after = apply_offer(g, o)?;
    let r = o.recipient();
    Ok(recipient_choices(g, r, concept) != recipient_choices(&after, r, concept))
}

/// The cheapest offer on one recipient strategy that makes it the recipient's
/// unique best response to a best response of the proposer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OfferCandidate {
    pub target_strategy: usize,
    pub required_payment: Value,
    pub resulting_value: Value,
    pub induced_equilibrium: StrategyProfile,
    /// What the recipient gets at the induced equilibrium after payment.
    pub recipient_payoff: Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "offer", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Decision {
    Offer(Offer),
    VacuousOffer(Offer),
    Pass,
}

impl Decision {
    pub fn offer(&self) -> Option<&Offer> {
        match self {
            Decision::Offer(o) | Decision::VacuousOffer(o) => Some(o),
            Decision::Pass => None,
        }
    }

    pub fn is_effective(&self) -> bool {
        matches!(self, Decision::Offer(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Decision::Offer(_) => "OFFER",
            Decision::VacuousOffer(_) => "VACUOUS_OFFER",
            Decision::Pass => "PASS",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BestOfferResult {
    pub proposer: Player,
    pub decision: Decision,
    /// The best value over all candidates.
    pub value: Value,
    /// The proposer's expected value of the game as it stands.
    pub current_value: Value,
    pub candidates: Vec<OfferCandidate>,
}

fn candidate(g: &NormalFormGame, a: Player, j: usize) -> OfferCandidate {
    let b = a.other();
    let at = |i: usize, k: usize| StrategyProfile::from_player(a, i, k);
    let own = g.num_strategies(a);
    let best = (0..own)
        .map(|i| g.payoff_of(a, at(i, j)))
        .max()
        .expect("every player has a strategy")
        .clone();
    let mut chosen: Option<(usize, Value)> = None;
    for i in (0..own).filter(|&i| g.payoff_of(a, at(i, j)) == &best) {
        let here = g.payoff_of(b, at(i, j));
        let (top, tied) = (0..g.num_strategies(b))
            .filter(|&k| k != j)
            .map(|k| g.payoff_of(b, at(i, k)))
            .fold((here.clone(), false), |(top, tied), v| match v.cmp(&top) {
                std::cmp::Ordering::Greater => (v.clone(), false),
                std::cmp::Ordering::Equal => (top, true),
                std::cmp::Ordering::Less => (top, tied),
            });
        let mut delta = &top - here;
        if delta.is_positive() || (delta.is_zero() && tied) {
            delta = delta.plus();
        }
        if chosen.as_ref().map_or(true, |(_, d)| delta > *d) {
            chosen = Some((i, delta));
        }
    }
    let (i, delta) = chosen.expect("best responses are nonempty");
    OfferCandidate {
        target_strategy: j,
        resulting_value: &best - &delta,
        recipient_payoff: g.payoff_of(b, at(i, j)) + &delta,
        required_payment: delta,
        induced_equilibrium: at(i, j),
    }
}

/// Candidate order: higher value first, then lower recipient payoff, then index.
fn preference(x: &OfferCandidate, y: &OfferCandidate) -> std::cmp::Ordering {
    y.resulting_value
        .cmp(&x.resulting_value)
        .then_with(|| x.recipient_payoff.cmp(&y.recipient_payoff))
        .then_with(|| x.target_strategy.cmp(&y.target_strategy))
}

/// The proposer's best unconditional offer.
///
/// When the best value needs no payment but several recipient strategies
/// attain it, a vacuous offer marks the equilibrium the proposer will play.
/// An OFFER is only reported when applying it really raises the proposer's
/// expected value; candidates whose induced equilibrium is not the one the
/// solution concept settles on are skipped.
pub fn best_offer(g: &NormalFormGame, proposer: Player, concept: SolutionConcept) -> BestOfferResult {
    let current = expected_value(g, concept)[proposer].clone();
    let candidates: Vec<OfferCandidate> = (0..g.num_strategies(proposer.other()))
        .map(|j| candidate(g, proposer, j))
        .collect();
    let mut ranked: Vec<&OfferCandidate> = candidates.iter().collect();
    ranked.sort_by(|x, y| preference(x, y));
    let value = ranked[0].resulting_value.clone();

    let make = |c: &OfferCandidate, amount: Value| {
        Offer::new(proposer, amount, c.target_strategy).expect("payments are nonnegative")
    };
    let improving = ranked
        .iter()
        .take_while(|c| c.resulting_value > current)
        .find(|c| {
            let o = make(c, c.required_payment.clone());
            let after = apply_offer(g, &o).expect("candidate strategies exist");
            expected_value(&after, concept)[proposer] > current
        });
    let decision = if let Some(c) = improving {
        Decision::Offer(make(c, c.required_payment.clone()))
    } else if ranked[0].required_payment.is_zero()
        && ranked.iter().filter(|c| c.resulting_value == value).count() > 1
    {
        Decision::VacuousOffer(make(ranked[0], Value::zero()))
    } else {
        Decision::Pass
    };
    BestOfferResult {
        proposer,
        decision,
        value,
        current_value: current,
        candidates,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IraStep {
    pub round: usize,
    pub proposer: Player,
    pub result: BestOfferResult,
    pub value_before: Value,
    pub value_after: Value,
    pub game: NormalFormGame,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IraOutcome {
    pub first_mover: Player,
    pub steps: Vec<IraStep>,
    pub final_game: NormalFormGame,
    /// False when the round cap stopped the loop.
    pub converged: bool,
}

impl IraOutcome {
    pub fn effective_offers(&self) -> impl Iterator<Item = (&IraStep, &Offer)> {
        self.steps.iter().filter_map(|s| match &s.result.decision {
            Decision::Offer(o) => Some((s, o)),
            _ => None,
        })
    }
}

/// Players alternate best offers until two consecutive turns change nothing.
pub fn ira_negotiate(g: &NormalFormGame, first: Player, concept: SolutionConcept) -> IraOutcome {
    let cap = g.rows() * g.cols() * 4;
    let mut game = g.clone();
    let mut steps = Vec::new();
    let mut idle = 0;
    let mut proposer = first;
    for round in 1..=cap {
        let result = best_offer(&game, proposer, concept);
        let value_before = result.current_value.clone();
        if let Some(o) = result.decision.offer() {
            game = apply_offer(&game, o).expect("best offers target existing strategies");
        }
        idle = if result.decision.is_effective() { 0 } else { idle + 1 };
        steps.push(IraStep {
            round,
            proposer,
            value_after: expected_value(&game, concept)[proposer].clone(),
            value_before,
            result,
            game: game.clone(),
        });
        if idle == 2 {
            return IraOutcome {
                first_mover: first,
                steps,
                final_game: game,
                converged: true,
            };
        }
        proposer = proposer.other();
    }
    IraOutcome {
        first_mover: first,
        steps,
        final_game: game,
        converged: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::offers::{parse_offer, AnyOffer};
    use crate::solution::{classify, ClassLabel};

    const S: SolutionConcept = SolutionConcept::PureNashWithinIesds;

    fn v(s: &str) -> Value {
        s.parse().unwrap()
    }

    fn offer(g: &NormalFormGame, text: &str) -> Offer {
        match parse_offer(g, text).unwrap() {
            AnyOffer::Unconditional(o) => o,
            AnyOffer::Conditional(_) => unreachable!(),
        }
    }

    #[test]
    fn worked_example_first_offer() {
        let g = fixtures::worked_example();
        let r = best_offer(&g, Player::Row, S);
        assert_eq!(r.decision, Decision::Offer(offer(&g, "Row -> Col : 1+e / C3")));
        assert_eq!(r.value, v("5-e"));
        let values: Vec<Value> = r.candidates.iter().map(|c| c.resulting_value.clone()).collect();
        assert_eq!(values, vec![v("2-e"), v("4-e"), v("5-e")]);
    }

    #[test]
    fn worked_example_second_and_third_offers() {
        let g = fixtures::worked_stage1();
        let r = best_offer(&g, Player::Col, S);
        assert_eq!(r.decision, Decision::Offer(offer(&g, "Col -> Row : 4+e / R1")));
        assert_eq!(r.value, v("6-e"));
        assert_eq!(r.current_value, v("4+e"));

        let g = fixtures::worked_stage2();
        let r = best_offer(&g, Player::Row, S);
        assert_eq!(r.decision, Decision::Offer(offer(&g, "Row -> Col : 6+e / C2")));
        assert_eq!(r.value, v("8"));
        assert_eq!(r.current_value, v("6+e"));
    }

    #[test]
    fn worked_example_final_game_passes() {
        let g = fixtures::worked_final_row_first();
        for p in Player::BOTH {
            assert_eq!(best_offer(&g, p, S).decision, Decision::Pass);
        }
    }

    #[test]
    fn worked_example_negotiation_row_first() {
        let out = ira_negotiate(&fixtures::worked_example(), Player::Row, S);
        assert!(out.converged);
        let offers: Vec<String> = out
            .effective_offers()
            .map(|(s, o)| format!("{} {}", o.to_text(&s.game), s.result.value))
            .collect();
        assert_eq!(
            offers,
            vec![
                "Row -> Col : 1+e / C3 5-e",
                "Col -> Row : 4+e / R1 6-e",
                "Row -> Col : 6+e / C2 8"
            ]
        );
        let games: Vec<&NormalFormGame> = out.effective_offers().map(|(s, _)| &s.game).collect();
        assert_eq!(games[0], &fixtures::worked_stage1());
        assert_eq!(games[1], &fixtures::worked_stage2());
        assert_eq!(games[2], &fixtures::worked_final_row_first());
        let c = classify(&out.final_game, S);
        assert_eq!(c.label, ClassLabel::PerfectlySolved);
        assert_eq!(c.solution, vec![StrategyProfile::new(0, 1)]);
    }

    #[test]
    fn worked_example_negotiation_col_first() {
        let out = ira_negotiate(&fixtures::worked_example(), Player::Col, S);
        assert!(out.converged);
        assert_eq!(out.effective_offers().count(), 2);
        let proposers: Vec<Player> = out.effective_offers().map(|(s, _)| s.proposer).collect();
        assert_eq!(proposers, vec![Player::Col, Player::Row]);
        let c = classify(&out.final_game, S);
        assert_eq!(c.solution, vec![StrategyProfile::new(0, 1)]);
        assert_eq!(out.final_game.payoff(StrategyProfile::new(0, 1)).human(), "(8, 6)");
    }

    #[test]
    fn disadvantage_both_orders() {
        let g = fixtures::disadvantage();
        let row = ira_negotiate(&g, Player::Row, S);
        assert_eq!(row.final_game, fixtures::disadvantage_final_row_first());
        let col = ira_negotiate(&g, Player::Col, S);
        assert_eq!(col.final_game, fixtures::disadvantage_final_col_first());
        let target = StrategyProfile::new(0, 1);
        assert_eq!(crate::solution::iesds(&row.final_game).profiles(), vec![target]);
        assert_eq!(crate::solution::iesds(&col.final_game).profiles(), vec![target]);
    }

    #[test]
    fn pd1_feasibility() {
        let g = fixtures::pd1();
        assert_eq!(feasible(&g, &offer(&g, "Row -> Col : 2 / C"), S).unwrap(), Feasibility::Feasible);
        assert_eq!(
            feasible(&g, &offer(&g, "Row -> Col : 0 / C"), S).unwrap(),
            Feasibility::WeaklyFeasible
        );
    }

    #[test]
    fn pd2_first_offers_infeasible() {
        let g = fixtures::pd2();
        for p in Player::BOTH {
            let r = best_offer(&g, p, S);
            assert_eq!(r.decision, Decision::Pass);
            // Only the status quo keeps the proposer's value; flipping the opponent costs more.
            assert_eq!(r.value, r.current_value);
            assert!(r.candidates[0].resulting_value < r.current_value);
            for j in 0..2 {
                let o = Offer::new(p, v("3+e"), j).unwrap();
                if is_effective(&g, &o, S).unwrap() {
                    assert_eq!(feasible(&g, &o, S).unwrap(), Feasibility::Infeasible);
                }
            }
        }
    }

    #[test]
    fn coordination_game_signals_with_vacuous_offer() {
        let g = NormalFormGame::from_ints(&["A", "B"], &["A", "B"], &[&[(2, 2), (0, 0)], &[(0, 0), (2, 2)]]);
        let r = best_offer(&g, Player::Row, S);
        assert_eq!(r.current_value, v("0"));
        assert_eq!(r.value, v("2"));
        assert_eq!(r.decision, Decision::VacuousOffer(Offer::new(Player::Row, v("0"), 0).unwrap()));
        let out = ira_negotiate(&g, Player::Row, S);
        assert!(out.converged);
        assert_eq!(out.steps.len(), 2);
        assert_eq!(out.final_game, g);
    }
}
