//! Preplay offers and the payoff transformations they induce.
//!
//! An offer by `A` to pay `α` if `B` plays `s` moves `α` from `A` to `B` in
//! every cell of the matrix where `B` plays `s`. Sets of offers commute and
//! never change any cell's payoff sum.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{NormalFormGame, PayoffVector, Player, StrategyProfile};
use crate::numeric::Value;
use crate::solution::strictly_dominates;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OfferError {
    #[error("offer amount must be nonnegative, got {0}")]
    NegativeAmount(Value),
    #[error("{player:?} has no strategy with index {index}")]
    UnknownStrategy { player: Player, index: usize },
    #[error("a conditional offer must pair offers in opposite directions")]
    NotReciprocal,
    #[error("redistribution sums to {found} but the target outcome pays {expected} in total")]
    SumMismatch { expected: Value, found: Value },
    #[error("cannot parse offer `{text}`: {reason}")]
    Syntax { text: String, reason: String },
}

/// An unconditional offer. The recipient is always the proposer's opponent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Offer {
    proposer: Player,
    amount: Value,
    strategy: usize,
}

impl Offer {
    pub fn new(proposer: Player, amount: Value, strategy: usize) -> Result<Self, OfferError> {
        if amount.is_negative() {
            return Err(OfferError::NegativeAmount(amount));
        }
        Ok(Offer {
            proposer,
            amount,
            strategy,
        })
    }

    pub fn proposer(&self) -> Player {
        self.proposer
    }

    pub fn recipient(&self) -> Player {
        self.proposer.other()
    }

    pub fn amount(&self) -> &Value {
        &self.amount
    }

    /// The recipient's strategy the payment is contingent on.
    pub fn strategy(&self) -> usize {
        self.strategy
    }

    pub fn is_vacuous(&self) -> bool {
        self.amount.is_zero()
    }

    /// `Row -> Col : 2 / C`
    pub fn to_text(&self, g: &NormalFormGame) -> String {
        format!(
            "{} -> {} : {}",
            g.player_name(self.proposer),
            g.player_name(self.recipient()),
            self.clause(g)
        )
    }

    fn clause(&self, g: &NormalFormGame) -> String {
        format!(
            "{} / {}",
            self.amount,
            g.strategy_label(self.recipient(), self.strategy)
        )
    }

    fn check(&self, g: &NormalFormGame) -> Result<(), OfferError> {
        if self.strategy >= g.num_strategies(self.recipient()) {
            return Err(OfferError::UnknownStrategy {
                player: self.recipient(),
                index: self.strategy,
            });
        }
        Ok(())
    }
}

/// A forward offer that only takes effect together with the demanded counter-offer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConditionalOffer {
    forward: Offer,
    required: Offer,
}

impl ConditionalOffer {
    pub fn new(forward: Offer, required: Offer) -> Result<Self, OfferError> {
        if forward.recipient() != required.proposer() {
            return Err(OfferError::NotReciprocal);
        }
        Ok(ConditionalOffer { forward, required })
    }

    pub fn forward(&self) -> &Offer {
        &self.forward
    }

    pub fn required(&self) -> &Offer {
        &self.required
    }

    pub fn proposer(&self) -> Player {
        self.forward.proposer
    }

    pub fn recipient(&self) -> Player {
        self.forward.recipient()
    }

    pub fn offers(&self) -> [&Offer; 2] {
        [&self.forward, &self.required]
    }

    /// `Row -> Col : 3 / C_Col | 3 / C_Row`
    pub fn to_text(&self, g: &NormalFormGame) -> String {
        format!("{} | {}", self.forward.to_text(g), self.required.clause(g))
    }
}

/// Either kind of offer, as written in the text syntax.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum AnyOffer {
    Unconditional(Offer),
    Conditional(ConditionalOffer),
}

impl AnyOffer {
    pub fn to_text(&self, g: &NormalFormGame) -> String {
        match self {
            AnyOffer::Unconditional(o) => o.to_text(g),
            AnyOffer::Conditional(c) => c.to_text(g),
        }
    }
}

fn syntax(text: &str, reason: impl Into<String>) -> OfferError {
    OfferError::Syntax {
        text: text.to_string(),
        reason: reason.into(),
    }
}

fn parse_clause(
    g: &NormalFormGame,
    full: &str,
    clause: &str,
    proposer: Player,
) -> Result<Offer, OfferError> {
    let (amount, label) = clause
        .rsplit_once('/')
        .ok_or_else(|| syntax(full, "expected `amount / strategy`"))?;
    let amount: Value = amount
        .trim()
        .parse()
        .map_err(|e: crate::numeric::ParseValueError| syntax(full, e.to_string()))?;
    let label = label.trim();
    let recipient = proposer.other();
    let strategy = g.strategy_index(recipient, label).ok_or_else(|| {
        syntax(
            full,
            format!("`{label}` is not a strategy of {}", g.player_name(recipient)),
        )
    })?;
    Offer::new(proposer, amount, strategy)
}

/// Parses the offer syntax against the players and strategy labels of `g`.
pub fn parse_offer(g: &NormalFormGame, text: &str) -> Result<AnyOffer, OfferError> {
    let (head, body) = text
        .split_once(':')
        .ok_or_else(|| syntax(text, "expected `Proposer -> Recipient : ...`"))?;
    let (from, to) = head
        .split_once("->")
        .ok_or_else(|| syntax(text, "expected `->` between players"))?;
    let from = from.trim();
    let to = to.trim();
    let proposer = g
        .player_by_name(from)
        .ok_or_else(|| syntax(text, format!("unknown player `{from}`")))?;
    let recipient = g
        .player_by_name(to)
        .ok_or_else(|| syntax(text, format!("unknown player `{to}`")))?;
    if proposer == recipient {
        return Err(syntax(text, "a player cannot make an offer to themself"));
    }
    match body.split_once('|') {
        None => Ok(AnyOffer::Unconditional(parse_clause(g, text, body, proposer)?)),
        Some((fwd, req)) => {
            let forward = parse_clause(g, text, fwd, proposer)?;
            let required = parse_clause(g, text, req, recipient)?;
            Ok(AnyOffer::Conditional(ConditionalOffer::new(forward, required)?))
        }
    }
}

/// Moves `amount` from `proposer` to the opponent wherever the opponent plays
/// `strategy`. Negative amounts are only reachable through withdrawal.
fn transfer(g: &NormalFormGame, proposer: Player, amount: &Value, strategy: usize) -> NormalFormGame {
    let recipient = proposer.other();
    let mut out = g.clone();
    for own in 0..g.num_strategies(proposer) {
        let cell = out.payoff_mut(StrategyProfile::from_player(proposer, own, strategy));
        cell[proposer] -= amount;
        cell[recipient] += amount;
    }
    out
}

pub fn apply_offer(g: &NormalFormGame, o: &Offer) -> Result<NormalFormGame, OfferError> {
    o.check(g)?;
    Ok(transfer(g, o.proposer, &o.amount, o.strategy))
}

/// Applies every offer in order; the result does not depend on the order.
pub fn apply_offer_set(g: &NormalFormGame, offers: &[Offer]) -> Result<NormalFormGame, OfferError> {
    offers.iter().try_fold(g.clone(), |acc, o| apply_offer(&acc, o))
}

/// Reverts `o` by applying the same offer with its amount negated.
pub fn withdraw_offer(g: &NormalFormGame, o: &Offer) -> Result<NormalFormGame, OfferError> {
    o.check(g)?;
    Ok(transfer(g, o.proposer, &-o.amount.clone(), o.strategy))
}

/// The game that would result if the conditional offer were accepted.
pub fn suggested_transformation(
    g: &NormalFormGame,
    c: &ConditionalOffer,
) -> Result<NormalFormGame, OfferError> {
    apply_offer_set(g, &[c.forward.clone(), c.required.clone()])
}

/// How far any other strategy of `p` can beat `target` (maximum over all cells),
/// or `None` when `p` has no other strategy.
fn best_deviation_gain(g: &NormalFormGame, p: Player, target: usize) -> Option<Value> {
    let opponents = g.num_strategies(p.other());
    (0..g.num_strategies(p))
        .filter(|&s| s != target)
        .flat_map(|s| {
            (0..opponents).map(move |o| {
                g.payoff_of(p, StrategyProfile::from_player(p, s, o))
                    - g.payoff_of(p, StrategyProfile::from_player(p, target, o))
            })
        })
        .max()
}

/// Incentive `p`'s opponent must pay on `target` so it strictly dominates for `p`.
fn dominance_incentive(g: &NormalFormGame, p: Player, target: usize) -> Value {
    match best_deviation_gain(g, p, target) {
        Some(gain) if !gain.is_negative() => gain.plus(),
        _ => Value::zero(),
    }
}

/// An offer set after which `target` is the strict dominant-strategy
/// equilibrium and pays exactly `redistribution`.
///
/// Each player is paid, by the opponent and on the target strategy, one ε
/// more than their best deviation gain; the target cell is then corrected by
/// raising one of the two payments.
pub fn enforce_outcome(
    g: &NormalFormGame,
    target: StrategyProfile,
    redistribution: &PayoffVector,
) -> Result<Vec<Offer>, OfferError> {
    for p in Player::BOTH {
        if target.get(p) >= g.num_strategies(p) {
            return Err(OfferError::UnknownStrategy {
                player: p,
                index: target.get(p),
            });
        }
    }
    let cell = g.payoff(target);
    if cell.sum() != redistribution.sum() {
        return Err(OfferError::SumMismatch {
            expected: cell.sum(),
            found: redistribution.sum(),
        });
    }
    // `to_row`: paid by Col to Row on Row's target strategy; `to_col` likewise.
    let mut to_row = dominance_incentive(g, Player::Row, target.row);
    let mut to_col = dominance_incentive(g, Player::Col, target.col);
    let row_after = &(&cell[Player::Row] - &to_col) + &to_row;
    let shortfall = &redistribution[Player::Row] - &row_after;
    if shortfall.is_positive() {
        to_row += &shortfall;
    } else {
        to_col -= &shortfall;
    }
    let mut offers = Vec::new();
    if !to_col.is_zero() {
        offers.push(Offer::new(Player::Row, to_col, target.col)?);
    }
    if !to_row.is_zero() {
        offers.push(Offer::new(Player::Col, to_row, target.row)?);
    }
    Ok(offers)
}

/// Every other strategy of each player is strictly dominated by the target's.
pub fn is_strict_dominant_equilibrium(g: &NormalFormGame, target: StrategyProfile) -> bool {
    Player::BOTH.into_iter().all(|p| {
        let opp: Vec<usize> = (0..g.num_strategies(p.other())).collect();
        (0..g.num_strategies(p))
            .filter(|&s| s != target.get(p))
            .all(|s| strictly_dominates(g, p, target.get(p), s, &opp))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::solution::{classify, iesds, pure_nash, ClassLabel, SolutionConcept};

    fn offer(g: &NormalFormGame, text: &str) -> Offer {
        match parse_offer(g, text).unwrap() {
            AnyOffer::Unconditional(o) => o,
            AnyOffer::Conditional(_) => panic!("expected unconditional"),
        }
    }

    fn conditional(g: &NormalFormGame, text: &str) -> ConditionalOffer {
        match parse_offer(g, text).unwrap() {
            AnyOffer::Conditional(c) => c,
            AnyOffer::Unconditional(_) => panic!("expected conditional"),
        }
    }

    #[test]
    fn pd1_offers_reproduce_figures() {
        let g = fixtures::pd1();
        let fig2 = apply_offer(&g, &offer(&g, "Row -> Col : 2 / C")).unwrap();
        assert_eq!(fig2, fixtures::pd1_after_row_offer());
        let fig3 = apply_offer(&fig2, &offer(&g, "Col -> Row : 2 / C")).unwrap();
        assert_eq!(fig3, fixtures::pd1_after_both_offers());
        let ne = pure_nash(&fig3);
        assert_eq!(ne.len(), 1);
        assert_eq!(ne[0].profile, StrategyProfile::new(0, 0));
    }

    #[test]
    fn vacuous_offer_is_identity() {
        let g = fixtures::worked_example();
        assert_eq!(apply_offer(&g, &offer(&g, "Row -> Col : 0 / C2")).unwrap(), g);
    }

    #[test]
    fn offer_set_either_order() {
        let g = fixtures::pd1();
        let a = offer(&g, "Row -> Col : 2 / C");
        let b = offer(&g, "Col -> Row : 2 / C");
        let fig3 = fixtures::pd1_after_both_offers();
        assert_eq!(apply_offer_set(&g, &[a.clone(), b.clone()]).unwrap(), fig3);
        assert_eq!(apply_offer_set(&g, &[b, a]).unwrap(), fig3);
        assert_eq!(apply_offer_set(&g, &[]).unwrap(), g);
    }

    #[test]
    fn split_offers_equal_combined_offer() {
        let g = fixtures::worked_example();
        let parts = [offer(&g, "Row -> Col : 1/3 / C1"), offer(&g, "Row -> Col : 2/3+e / C1")];
        let whole = offer(&g, "Row -> Col : 1+e / C1");
        assert_eq!(apply_offer_set(&g, &parts).unwrap(), apply_offer(&g, &whole).unwrap());
    }

    #[test]
    fn withdrawal_reverts() {
        let g = fixtures::pd1();
        let first = offer(&g, "Row -> Col : 2 / C");
        let second = offer(&g, "Col -> Row : 2 / C");
        assert_eq!(withdraw_offer(&fixtures::pd1_after_row_offer(), &first).unwrap(), g);
        assert_eq!(
            withdraw_offer(&fixtures::pd1_after_both_offers(), &second).unwrap(),
            fixtures::pd1_after_row_offer()
        );
        let vacuous = offer(&g, "Col -> Row : 0 / D");
        assert_eq!(withdraw_offer(&g, &vacuous).unwrap(), g);
    }

    #[test]
    fn conditional_pd2_suggestion() {
        let g = fixtures::pd2();
        let cc = StrategyProfile::new(0, 0);
        // Exactly 3 leaves both players indifferent against defection, so
        // (D,D) stays an equilibrium next to (C,C).
        let c = conditional(&g, "Row -> Col : 3 / C_Col | 3 / C_Row");
        let t = suggested_transformation(&g, &c).unwrap();
        assert_eq!(t.payoff(cc), g.payoff(cc));
        let sol = crate::solution::solution(&t, SolutionConcept::default());
        assert_eq!(sol, vec![cc, StrategyProfile::new(1, 1)]);
        // One ε more makes cooperation the unique solution.
        let c = conditional(&g, "Row -> Col : 3+e / C_Col | 3+e / C_Row");
        let t = suggested_transformation(&g, &c).unwrap();
        assert_eq!(t.payoff(cc), g.payoff(cc));
        assert_eq!(crate::solution::solution(&t, SolutionConcept::default()), vec![cc]);
        assert_eq!(classify(&t, SolutionConcept::default()).label, ClassLabel::PerfectlySolved);
    }

    #[test]
    fn conditional_with_trivial_counter_offer_is_unconditional() {
        let g = fixtures::pd2();
        let c = conditional(&g, "Row -> Col : 3 / C_Col | 0 / D_Row");
        assert_eq!(
            suggested_transformation(&g, &c).unwrap(),
            apply_offer(&g, c.forward()).unwrap()
        );
        let zero = conditional(&g, "Row -> Col : 0 / C_Col | 0 / C_Row");
        assert_eq!(suggested_transformation(&g, &zero).unwrap(), g);
    }

    #[test]
    fn rejects_bad_offers() {
        let g = fixtures::pd1();
        assert!(Offer::new(Player::Row, Value::from_int(-1), 0).is_err());
        assert!(parse_offer(&g, "Row -> Row : 1 / C").is_err());
        assert!(parse_offer(&g, "Row -> Col : 1 / X").is_err());
        assert!(parse_offer(&g, "Row -> Col : -1 / C").is_err());
        assert!(parse_offer(&g, "Row Col 1 C").is_err());
        let stray = Offer::new(Player::Row, Value::from_int(1), 7).unwrap();
        assert!(matches!(apply_offer(&g, &stray), Err(OfferError::UnknownStrategy { .. })));
    }

    #[test]
    fn offer_text_round_trips() {
        let g = fixtures::pd2();
        for text in ["Row -> Col : 3 / C_Col | 3 / C_Row", "Col -> Row : 1+e / D_Row"] {
            assert_eq!(parse_offer(&g, text).unwrap().to_text(&g), text);
        }
    }

    #[test]
    fn enforce_pd1_cooperation() {
        let g = fixtures::pd1();
        let target = StrategyProfile::new(0, 0);
        let split = PayoffVector::new(4.into(), 4.into());
        let offers = enforce_outcome(&g, target, &split).unwrap();
        let t = apply_offer_set(&g, &offers).unwrap();
        assert!(is_strict_dominant_equilibrium(&t, target));
        assert_eq!(t.payoff(target), &split);
        // One ε over the deviation gain of 1 suffices, so the result is cheaper than 2.
        assert!(offers.iter().all(|o| o.amount() == &Value::from_int(1).plus()));
    }

    #[test]
    fn enforce_already_dominant_is_empty() {
        let g = fixtures::pd1_after_both_offers();
        let offers = enforce_outcome(&g, StrategyProfile::new(0, 0), &PayoffVector::new(4.into(), 4.into())).unwrap();
        assert!(offers.is_empty());
    }

    #[test]
    fn enforce_pd2_gives_perfectly_solved_game() {
        let g = fixtures::pd2();
        let target = StrategyProfile::new(0, 0);
        let offers = enforce_outcome(&g, target, &PayoffVector::new(4.into(), 4.into())).unwrap();
        let t = apply_offer_set(&g, &offers).unwrap();
        assert_eq!(classify(&t, SolutionConcept::default()).label, ClassLabel::PerfectlySolved);
        assert_eq!(iesds(&t).profiles(), vec![target]);
    }

    #[test]
    fn enforce_uneven_split_and_mismatch() {
        let g = fixtures::inefficiency();
        let target = StrategyProfile::new(1, 0);
        let split = PayoffVector::new(1.into(), 5.into());
        let t = apply_offer_set(&g, &enforce_outcome(&g, target, &split).unwrap()).unwrap();
        assert!(is_strict_dominant_equilibrium(&t, target));
        assert_eq!(t.payoff(target), &split);
        let bad = PayoffVector::new(4.into(), 4.into());
        assert!(matches!(enforce_outcome(&g, target, &bad), Err(OfferError::SumMismatch { .. })));
    }
}
