//! Negotiation strategies and deterministic playouts.

use serde::{Deserialize, Serialize};

use crate::game::{maximal_outcomes, PayoffVector, Player, StrategyProfile};
use crate::ira::{best_offer, Decision};
use crate::numeric::Value;
use crate::offers::suggested_transformation;
use crate::png::{
    advance, check_move, history_value_with, proposal, Evaluator, History, HistoryValue, Move,
    PngConfig, PngError,
};

/// A move described relative to the history it is played at.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PlannedMove {
    /// Propose that `outcome` be played with payoffs `split`.
    Propose {
        outcome: StrategyProfile,
        split: PayoffVector,
    },
    Accept,
    Reject,
    Pass,
    Exact { mv: Move },
}

impl PlannedMove {
    /// The concrete move at `h`, if it can be built there.
    pub fn resolve(&self, h: &History) -> Option<Move> {
        let mover = h.to_move();
        match self {
            PlannedMove::Propose { outcome, split } => proposal(h.game(), mover, *outcome, split)
                .ok()
                .map(Move::MakeConditional),
            PlannedMove::Accept => h.pending().map(|p| Move::Accept(p.id)),
            PlannedMove::Reject => h.pending().map(|p| Move::Reject(p.id)),
            PlannedMove::Pass => Some(Move::Pass),
            PlannedMove::Exact { mv } => Some(mv.clone()),
        }
    }
}

/// Proposes one fixed distribution and accepts anything at least as good.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stationary {
    pub outcome: StrategyProfile,
    pub split: PayoffVector,
    /// Minimal own value at which each player accepts a pending proposal
    /// or passes on the current game.
    pub thresholds: PayoffVector,
    /// Accept and pass only on games whose values add up to the maximal total.
    pub only_maximal: bool,
}

/// The valuable-time equilibrium strategy: propose one's own optimal split,
/// accept and pass from the acceptance share up.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RubinsteinSpe {
    pub outcome: StrategyProfile,
    pub x_star: PayoffVector,
    pub y_star: PayoffVector,
    pub first_mover: Player,
}

impl RubinsteinSpe {
    /// What `p` proposes.
    pub fn own_split(&self, p: Player) -> &PayoffVector {
        if p == self.first_mover {
            &self.x_star
        } else {
            &self.y_star
        }
    }

    /// The least value `p` accepts or passes on.
    pub fn acceptance_share(&self, p: Player) -> &Value {
        if p == self.first_mover {
            &self.y_star[p]
        } else {
            &self.x_star[p]
        }
    }
}

/// Follows a fixed path; once a player leaves it, both switch to the
/// continuation registered for that player.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scripted {
    pub path: Vec<PlannedMove>,
    pub if_row_deviates: Box<NegotiationStrategy>,
    pub if_col_deviates: Box<NegotiationStrategy>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "kebab-case")]
pub enum NegotiationStrategy {
    Stationary(Stationary),
    RubinsteinSpe(RubinsteinSpe),
    /// Plays the best unconditional offer of the current game; accepts
    /// proposals that do not lower its current value.
    GreedyIra,
    Passive,
    Scripted(Scripted),
}

impl NegotiationStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            NegotiationStrategy::Stationary(_) => "stationary",
            NegotiationStrategy::RubinsteinSpe(_) => "spe",
            NegotiationStrategy::GreedyIra => "greedy-ira",
            NegotiationStrategy::Passive => "passive",
            NegotiationStrategy::Scripted(_) => "scripted",
        }
    }

    /// The move for whoever is to move at `h`. Always legal.
    pub fn choose(&self, cfg: &PngConfig, h: &History, ev: &Evaluator) -> Move {
        let wanted = match self {
            NegotiationStrategy::Stationary(s) => stationary_move(s, cfg, h, ev),
            NegotiationStrategy::RubinsteinSpe(s) => rubinstein_move(s, h, ev),
            NegotiationStrategy::GreedyIra => greedy_move(h, ev),
            NegotiationStrategy::Passive => Move::Pass,
            NegotiationStrategy::Scripted(s) => return scripted_move(s, cfg, h, ev),
        };
        legal_or_fallback(cfg, h, wanted)
    }
}

fn legal_or_fallback(cfg: &PngConfig, h: &History, wanted: Move) -> Move {
    if check_move(cfg, h, &wanted).is_ok() {
        return wanted;
    }
    match h.pending() {
        Some(p) => Move::Reject(p.id),
        None => Move::Pass,
    }
}

/// `p`'s value of the game the pending offer suggests.
fn pending_value(h: &History, ev: &Evaluator) -> Option<PayoffVector> {
    let p = h.pending()?;
    let g = suggested_transformation(h.game(), &p.offer).ok()?;
    Some(ev.value(&g))
}

fn last_is(h: &History, p: Player, pred: impl Fn(&Move) -> bool) -> bool {
    h.last().is_some_and(|r| r.player == p && pred(&r.mv))
}

/// Whether the most recent proposal in the history was accepted.
fn last_proposal_accepted(h: &History) -> bool {
    let records = h.records();
    let Some(pos) = records.iter().rposition(|r| r.mv.is_proposal()) else {
        return false;
    };
    records[pos + 1..].iter().any(|r| r.mv == Move::Accept(pos))
}

fn stationary_move(s: &Stationary, cfg: &PngConfig, h: &History, ev: &Evaluator) -> Move {
    let me = h.to_move();
    let content = |values: &PayoffVector| {
        values[me] >= s.thresholds[me]
            && (!s.only_maximal || values.sum() == maximal_outcomes(&cfg.starting_game).sum)
    };
    let propose = || Move::MakeConditional(
        proposal(h.game(), me, s.outcome, &s.split).expect("target outcome exists"),
    );
    if let Some(p) = h.pending() {
        let values = pending_value(h, ev).expect("pending offers apply");
        return if content(&values) {
            Move::Accept(p.id)
        } else {
            Move::Reject(p.id)
        };
    }
    if last_is(h, me, |m| matches!(m, Move::Accept(_))) {
        return Move::Pass;
    }
    if last_is(h, me, |m| matches!(m, Move::Reject(_))) {
        return propose();
    }
    let settled = last_is(h, me.other(), |m| *m == Move::Pass) || last_proposal_accepted(h);
    if settled && content(&ev.value(h.game())) {
        Move::Pass
    } else {
        propose()
    }
}

fn rubinstein_move(s: &RubinsteinSpe, h: &History, ev: &Evaluator) -> Move {
    let me = h.to_move();
    let share = s.acceptance_share(me);
    let propose = || Move::MakeConditional(
        proposal(h.game(), me, s.outcome, s.own_split(me)).expect("target outcome exists"),
    );
    if let Some(p) = h.pending() {
        let values = pending_value(h, ev).expect("pending offers apply");
        return if values[me] >= *share {
            Move::Accept(p.id)
        } else {
            Move::Reject(p.id)
        };
    }
    if h.is_empty() {
        return propose();
    }
    if ev.value(h.game())[me] >= *share {
        Move::Pass
    } else {
        propose()
    }
}

fn greedy_move(h: &History, ev: &Evaluator) -> Move {
    let me = h.to_move();
    if let Some(p) = h.pending() {
        let values = pending_value(h, ev).expect("pending offers apply");
        return if values[me] >= ev.value(h.game())[me] {
            Move::Accept(p.id)
        } else {
            Move::Reject(p.id)
        };
    }
    match best_offer(h.game(), me, ev.concept()).decision {
        Decision::Offer(o) => Move::MakeOffer(o),
        Decision::VacuousOffer(o) => {
            // Signal once; repeating the same vacuous offer would stall the negotiation.
            if h.moves_of(me).any(|(_, m)| *m == Move::MakeOffer(o.clone())) {
                Move::Pass
            } else {
                Move::MakeOffer(o)
            }
        }
        Decision::Pass => Move::Pass,
    }
}

fn scripted_move(s: &Scripted, cfg: &PngConfig, h: &History, ev: &Evaluator) -> Move {
    let mut prefix = History::new(cfg);
    for r in h.records() {
        let planned = s.path.get(prefix.len()).and_then(|p| p.resolve(&prefix));
        if planned.as_ref() != Some(&r.mv) {
            let fallback = match r.player {
                Player::Row => &s.if_row_deviates,
                Player::Col => &s.if_col_deviates,
            };
            return fallback.choose(cfg, h, ev);
        }
        prefix = advance(cfg, &prefix, r.mv.clone()).expect("history moves are legal");
    }
    let wanted = s
        .path
        .get(h.len())
        .and_then(|p| p.resolve(h))
        .unwrap_or(Move::Pass);
    legal_or_fallback(cfg, h, wanted)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Simulation {
    pub history: History,
    pub value: HistoryValue,
    /// Set when the depth cap ended the play.
    pub truncated: bool,
}

/// Plays both strategies against each other from the empty history.
pub fn simulate(
    cfg: &PngConfig,
    strategies: [&NegotiationStrategy; 2],
) -> Result<Simulation, PngError> {
    cfg.validate()?;
    let ev = Evaluator::new(cfg.concept);
    let mut h = History::new(cfg);
    while !h.is_terminal() {
        let m = strategies[h.to_move().index()].choose(cfg, &h, &ev);
        h = advance(cfg, &h, m)?;
    }
    let value = history_value_with(cfg, &h, &ev)?;
    let truncated = matches!(h.ending(), Some(crate::png::Ending::Disagreement { truncated: true }));
    Ok(Simulation {
        history: h,
        value,
        truncated,
    })
}

/// Stationary strategy whose acceptance thresholds are the target shares.
pub fn stationary(outcome: StrategyProfile, split: PayoffVector) -> NegotiationStrategy {
    NegotiationStrategy::Stationary(Stationary {
        outcome,
        thresholds: split.clone(),
        split,
        only_maximal: false,
    })
}
