//! The preplay negotiation game: moves, histories and their values.
//!
//! A history is an ordered list of moves. Each history carries the game
//! that would be played if negotiation stopped there. Players alternate,
//! except that accepting or rejecting a pending conditional offer is followed
//! by another move of the same player. Two consecutive passes end the
//! negotiation in agreement.

use std::cell::RefCell;
use rustc_hash::FxHashMap as HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{NormalFormGame, PayoffVector, Player, StrategyProfile};
use crate::numeric::{rational_str, Rational, Value};
use crate::offers::{
    apply_offer, apply_offer_set, enforce_outcome, parse_offer, suggested_transformation,
    withdraw_offer, AnyOffer, ConditionalOffer, Offer, OfferError,
};
use crate::solution::{expected_value, solution, SolutionConcept};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PngError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("the negotiation is over")]
    Terminal,
    #[error("illegal move: {0}")]
    Illegal(String),
    #[error(transparent)]
    Offer(#[from] OfferError),
    #[error("search exceeded the budget of {0} nodes")]
    Budget(usize),
}

fn one_half() -> Rational {
    Rational::new(1.into(), 2.into())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PngConfig {
    pub starting_game: NormalFormGame,
    #[serde(default)]
    pub concept: SolutionConcept,
    #[serde(default = "yes")]
    pub allow_conditional: bool,
    #[serde(default)]
    pub allow_withdrawals: bool,
    #[serde(default)]
    pub allow_opt_out: bool,
    #[serde(default)]
    pub time_valuable: bool,
    /// Per-player discount factors, used only when time is valuable.
    #[serde(default = "default_discounts", with = "discounts_str")]
    pub discounts: [Rational; 2],
    #[serde(default = "row")]
    pub first_mover: Player,
    /// Histories longer than this many moves are cut off as disagreement.
    #[serde(default = "default_depth")]
    pub max_depth: usize,
}

fn yes() -> bool {
    true
}

fn row() -> Player {
    Player::Row
}

fn default_depth() -> usize {
    8
}

fn default_discounts() -> [Rational; 2] {
    [one_half(), one_half()]
}

mod discounts_str {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrapped(#[serde(with = "rational_str")] Rational);

    pub fn serialize<S: Serializer>(d: &[Rational; 2], s: S) -> Result<S::Ok, S::Error> {
        [Wrapped(d[0].clone()), Wrapped(d[1].clone())].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Rational; 2], D::Error> {
        let [Wrapped(a), Wrapped(b)] = <[Wrapped; 2]>::deserialize(d)?;
        Ok([a, b])
    }
}

impl PngConfig {
    /// Conditional offers allowed, everything else off, time not valuable.
    pub fn new(starting_game: NormalFormGame) -> Self {
        PngConfig {
            starting_game,
            concept: SolutionConcept::default(),
            allow_conditional: true,
            allow_withdrawals: false,
            allow_opt_out: false,
            time_valuable: false,
            discounts: default_discounts(),
            first_mover: Player::Row,
            max_depth: default_depth(),
        }
    }

    pub fn with_discount(mut self, delta: Rational) -> Self {
        self.time_valuable = true;
        self.discounts = [delta.clone(), delta];
        self
    }

    pub fn validate(&self) -> Result<(), PngError> {
        for (p, d) in Player::BOTH.iter().zip(&self.discounts) {
            if *d <= Rational::zero() || *d >= Rational::one() {
                return Err(PngError::Config(format!(
                    "discount of {p:?} must lie strictly between 0 and 1"
                )));
            }
        }
        if self.max_depth == 0 {
            return Err(PngError::Config("max depth must be at least 1".into()));
        }
        Ok(())
    }

    pub fn discount(&self, p: Player) -> &Rational {
        &self.discounts[p.index()]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "move", content = "arg", rename_all = "kebab-case")]
pub enum Move {
    MakeOffer(Offer),
    MakeConditional(ConditionalOffer),
    /// Accepts the pending offer made at the given ply.
    Accept(usize),
    Reject(usize),
    Pass,
    /// Withdraws the offer made (or proposed and accepted) at the given ply.
    Withdraw(usize),
    OptOut,
}

impl Move {
    pub fn is_proposal(&self) -> bool {
        matches!(self, Move::MakeOffer(_) | Move::MakeConditional(_))
    }

    /// Text form: offer syntax, `accept 3`, `reject 3`, `withdraw 0`, `pass`, `opt-out`.
    pub fn to_text(&self, g: &NormalFormGame) -> String {
        match self {
            Move::MakeOffer(o) => o.to_text(g),
            Move::MakeConditional(c) => c.to_text(g),
            Move::Accept(id) => format!("accept {id}"),
            Move::Reject(id) => format!("reject {id}"),
            Move::Pass => "pass".into(),
            Move::Withdraw(id) => format!("withdraw {id}"),
            Move::OptOut => "opt-out".into(),
        }
    }
}

/// Parses a move typed by `mover`. `accept` and `reject` without an id
/// refer to the offer pending in `h`.
pub fn parse_move(h: &History, mover: Player, text: &str) -> Result<Move, PngError> {
    let text = text.trim();
    let mut words = text.split_whitespace();
    let head = words.next().unwrap_or("");
    let id = |w: Option<&str>| -> Result<Option<usize>, PngError> {
        w.map(|s| s.parse().map_err(|_| PngError::Illegal(format!("bad move id `{s}`"))))
            .transpose()
    };
    let pending = || {
        h.pending()
            .map(|p| p.id)
            .ok_or_else(|| PngError::Illegal("there is no pending offer".into()))
    };
    let simple = match head.to_ascii_lowercase().as_str() {
        "pass" => Some(Move::Pass),
        "opt-out" | "optout" => Some(Move::OptOut),
        "accept" => Some(Move::Accept(match id(words.next())? {
            Some(i) => i,
            None => pending()?,
        })),
        "reject" => Some(Move::Reject(match id(words.next())? {
            Some(i) => i,
            None => pending()?,
        })),
        "withdraw" => Some(Move::Withdraw(
            id(words.next())?.ok_or_else(|| PngError::Illegal("withdraw needs an offer id".into()))?,
        )),
        _ => None,
    };
    if let Some(m) = simple {
        if words.next().is_some() {
            return Err(PngError::Illegal(format!("unexpected text after `{head}`")));
        }
        return Ok(m);
    }
    let offer = parse_offer(h.game(), text)?;
    let proposer = match &offer {
        AnyOffer::Unconditional(o) => o.proposer(),
        AnyOffer::Conditional(c) => c.proposer(),
    };
    if proposer != mover {
        return Err(PngError::Illegal(format!(
            "{} cannot make offers on behalf of {}",
            h.game().player_name(mover),
            h.game().player_name(proposer)
        )));
    }
    Ok(match offer {
        AnyOffer::Unconditional(o) => Move::MakeOffer(o),
        AnyOffer::Conditional(c) => Move::MakeConditional(c),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MoveRecord {
    pub player: Player,
    pub mv: Move,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PendingOffer {
    pub id: usize,
    pub offer: ConditionalOffer,
}

/// An offer currently in force that its owner may withdraw.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActiveOffer {
    pub id: usize,
    pub owner: Player,
    pub offers: Vec<Offer>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Ending {
    Agreement,
    OptOut,
    /// `truncated` is set when the depth cap, not an explicit mark, ended play.
    Disagreement { truncated: bool },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct History {
    records: Vec<MoveRecord>,
    game: NormalFormGame,
    accepted_game: NormalFormGame,
    accepted_time: usize,
    pending: Option<PendingOffer>,
    active: Vec<ActiveOffer>,
    proposals: usize,
    time: usize,
    to_move: Player,
    ending: Option<Ending>,
}

// Under one config the move records determine everything else.
impl Hash for History {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.records.hash(state);
    }
}

impl History {
    pub fn new(cfg: &PngConfig) -> Self {
        History {
            records: Vec::new(),
            game: cfg.starting_game.clone(),
            accepted_game: cfg.starting_game.clone(),
            accepted_time: 0,
            pending: None,
            active: Vec::new(),
            proposals: 0,
            time: 0,
            to_move: cfg.first_mover,
            ending: None,
        }
    }

    pub fn records(&self) -> &[MoveRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&MoveRecord> {
        self.records.last()
    }

    /// The current game `g(h)`.
    pub fn game(&self) -> &NormalFormGame {
        &self.game
    }

    /// The last game both players explicitly agreed on.
    pub fn accepted_game(&self) -> &NormalFormGame {
        &self.accepted_game
    }

    pub fn pending(&self) -> Option<&PendingOffer> {
        self.pending.as_ref()
    }

    pub fn active_offers(&self) -> &[ActiveOffer] {
        &self.active
    }

    pub fn proposal_count(&self) -> usize {
        self.proposals
    }

    /// Time index of the current game: proposals made up to its last change, minus one.
    pub fn time_index(&self) -> usize {
        self.time
    }

    pub fn to_move(&self) -> Player {
        self.to_move
    }

    pub fn ending(&self) -> Option<Ending> {
        self.ending
    }

    pub fn is_terminal(&self) -> bool {
        self.ending.is_some()
    }

    /// Ends the history as a disagreement, the stand-in for an infinite play.
    pub fn mark_disagreement(mut self) -> Self {
        self.ending = Some(Ending::Disagreement { truncated: false });
        self
    }

    /// The outcome game, if the play ended in agreement or by opting out.
    pub fn outcome_game(&self) -> Option<&NormalFormGame> {
        match self.ending? {
            Ending::Agreement => Some(&self.game),
            Ending::OptOut => Some(&self.accepted_game),
            Ending::Disagreement { .. } => None,
        }
    }

    /// Moves made by `p`, most recent last.
    pub fn moves_of(&self, p: Player) -> impl DoubleEndedIterator<Item = (usize, &Move)> {
        self.records
            .iter()
            .enumerate()
            .filter(move |(_, r)| r.player == p)
            .map(|(i, r)| (i, &r.mv))
    }

    pub fn to_texts(&self, cfg: &PngConfig) -> Vec<String> {
        let mut h = History::new(cfg);
        let mut out = Vec::with_capacity(self.records.len());
        for r in &self.records {
            out.push(r.mv.to_text(h.game()));
            h = advance(cfg, &h, r.mv.clone()).expect("recorded moves replay");
        }
        out
    }
}

fn has_negative_solution(g: &NormalFormGame, concept: SolutionConcept) -> bool {
    solution(g, concept)
        .into_iter()
        .any(|s| Player::BOTH.iter().any(|&p| g.payoff_of(p, s).is_negative()))
}

fn illegal(reason: impl Into<String>) -> PngError {
    PngError::Illegal(reason.into())
}

/// Checks `m` against the move repertoire, the flags and the pending offer.
pub fn check_move(cfg: &PngConfig, h: &History, m: &Move) -> Result<(), PngError> {
    if h.is_terminal() {
        return Err(PngError::Terminal);
    }
    let mover = h.to_move;
    if let Some(p) = &h.pending {
        return match m {
            Move::Accept(id) | Move::Reject(id) if *id == p.id => Ok(()),
            Move::Accept(_) | Move::Reject(_) => Err(illegal(format!("the pending offer is {}", p.id))),
            _ => Err(illegal("a pending offer must first be accepted or rejected")),
        };
    }
    let nonneg = |g: &NormalFormGame| {
        if cfg.time_valuable && has_negative_solution(g, cfg.concept) {
            Err(illegal("with valuable time no solution outcome may pay anyone a negative amount"))
        } else {
            Ok(())
        }
    };
    match m {
        Move::MakeOffer(o) => {
            if o.proposer() != mover {
                return Err(illegal("offers must be made by the player to move"));
            }
            nonneg(&apply_offer(&h.game, o)?)
        }
        Move::MakeConditional(c) => {
            if !cfg.allow_conditional {
                return Err(illegal("conditional offers are not allowed"));
            }
            if c.proposer() != mover {
                return Err(illegal("offers must be made by the player to move"));
            }
            nonneg(&suggested_transformation(&h.game, c)?)
        }
        Move::Accept(_) | Move::Reject(_) => Err(illegal("there is no pending offer")),
        Move::Pass => Ok(()),
        Move::Withdraw(id) => {
            if !cfg.allow_withdrawals {
                return Err(illegal("withdrawals are not allowed"));
            }
            match h.active.iter().find(|a| a.id == *id) {
                Some(a) if a.owner == mover => Ok(()),
                Some(_) => Err(illegal("only the proposer can withdraw an offer")),
                None => Err(illegal(format!("no offer in force was made at ply {id}"))),
            }
        }
        Move::OptOut => {
            if cfg.allow_opt_out {
                Ok(())
            } else {
                Err(illegal("opting out is not allowed"))
            }
        }
    }
}

/// Appends a legal move and updates the current game.
pub fn advance(cfg: &PngConfig, h: &History, m: Move) -> Result<History, PngError> {
    check_move(cfg, h, &m)?;
    let mut next = h.clone();
    let mover = h.to_move;
    let ply = h.records.len();
    let mut keep_turn = false;
    match &m {
        Move::MakeOffer(o) => {
            next.game = apply_offer(&h.game, o)?;
            next.proposals += 1;
            next.time = next.proposals - 1;
            next.active.push(ActiveOffer {
                id: ply,
                owner: mover,
                offers: vec![o.clone()],
            });
        }
        Move::MakeConditional(c) => {
            next.proposals += 1;
            next.pending = Some(PendingOffer {
                id: ply,
                offer: c.clone(),
            });
        }
        Move::Accept(_) => {
            let p = next.pending.take().expect("checked");
            let offers = vec![p.offer.forward().clone(), p.offer.required().clone()];
            next.game = apply_offer_set(&h.game, &offers)?;
            next.time = next.proposals.saturating_sub(1);
            next.accepted_game = next.game.clone();
            next.accepted_time = next.time;
            next.active.push(ActiveOffer {
                id: p.id,
                owner: p.offer.proposer(),
                offers,
            });
            keep_turn = true;
        }
        Move::Reject(_) => {
            next.pending = None;
            keep_turn = true;
        }
        Move::Pass => {}
        Move::Withdraw(id) => {
            let pos = next.active.iter().position(|a| a.id == *id).expect("checked");
            let gone = next.active.remove(pos);
            for o in &gone.offers {
                next.game = withdraw_offer(&next.game, o)?;
            }
            next.time = next.proposals.saturating_sub(1);
        }
        Move::OptOut => next.ending = Some(Ending::OptOut),
    }
    next.records.push(MoveRecord { player: mover, mv: m });
    if !keep_turn {
        next.to_move = mover.other();
    }
    if next.ending.is_none() {
        let n = next.records.len();
        if n >= 2 && next.records[n - 1].mv == Move::Pass && next.records[n - 2].mv == Move::Pass {
            next.ending = Some(Ending::Agreement);
        } else if n > cfg.max_depth {
            next.ending = Some(Ending::Disagreement { truncated: true });
        }
    }
    Ok(next)
}

/// A payoff that may be minus infinity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Payoff {
    MinusInfinity,
    Finite(Value),
}

impl Payoff {
    pub fn finite(&self) -> Option<&Value> {
        match self {
            Payoff::Finite(v) => Some(v),
            Payoff::MinusInfinity => None,
        }
    }

    pub fn human(&self) -> String {
        match self {
            Payoff::Finite(v) => v.human(),
            Payoff::MinusInfinity => "-∞".into(),
        }
    }
}

impl fmt::Display for Payoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Payoff::Finite(v) => v.fmt(f),
            Payoff::MinusInfinity => f.write_str("-inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HistoryValue(pub [Payoff; 2]);

impl HistoryValue {
    pub fn get(&self, p: Player) -> &Payoff {
        &self.0[p.index()]
    }

    pub fn finite(values: &PayoffVector) -> Self {
        HistoryValue([Payoff::Finite(values.0[0].clone()), Payoff::Finite(values.0[1].clone())])
    }

    /// The finite vector, if neither entry is minus infinity.
    pub fn as_vector(&self) -> Option<PayoffVector> {
        Some(PayoffVector::new(self.0[0].finite()?.clone(), self.0[1].finite()?.clone()))
    }

    pub fn human(&self) -> String {
        format!("({}, {})", self.0[0].human(), self.0[1].human())
    }
}

impl fmt::Display for HistoryValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0[0], self.0[1])
    }
}

/// Memoizes expected values of games under one solution concept.
#[derive(Debug, Default)]
pub struct Evaluator {
    concept: SolutionConcept,
    cache: RefCell<HashMap<NormalFormGame, PayoffVector>>,
}

impl Evaluator {
    pub fn new(concept: SolutionConcept) -> Self {
        Evaluator {
            concept,
            cache: RefCell::new(HashMap::default()),
        }
    }

    pub fn concept(&self) -> SolutionConcept {
        self.concept
    }

    pub fn value(&self, g: &NormalFormGame) -> PayoffVector {
        if let Some(v) = self.cache.borrow().get(g) {
            return v.clone();
        }
        let v = expected_value(g, self.concept);
        self.cache.borrow_mut().insert(g.clone(), v.clone());
        v
    }
}

fn discounted(cfg: &PngConfig, values: &PayoffVector, t: usize) -> HistoryValue {
    if !cfg.time_valuable {
        return HistoryValue::finite(values);
    }
    let mut out = values.clone();
    for p in Player::BOTH {
        let mut factor = Rational::one();
        for _ in 0..t {
            factor *= cfg.discount(p);
        }
        out[p] = values[p].scale(&factor);
    }
    HistoryValue::finite(&out)
}

/// The value of a terminal history for both players.
pub fn history_value(cfg: &PngConfig, z: &History) -> Result<HistoryValue, PngError> {
    history_value_with(cfg, z, &Evaluator::new(cfg.concept))
}

pub fn history_value_with(
    cfg: &PngConfig,
    z: &History,
    ev: &Evaluator,
) -> Result<HistoryValue, PngError> {
    match z.ending.ok_or_else(|| illegal("the history is not terminal"))? {
        Ending::Agreement => Ok(discounted(cfg, &ev.value(&z.game), z.time)),
        Ending::OptOut => Ok(discounted(cfg, &ev.value(&z.accepted_game), z.accepted_time)),
        Ending::Disagreement { .. } => Ok(if cfg.time_valuable {
            HistoryValue::finite(&PayoffVector::default())
        } else {
            HistoryValue([Payoff::MinusInfinity, Payoff::MinusInfinity])
        }),
    }
}

/// The conditional offer by `proposer` that, once accepted, makes `outcome`
/// the strict dominant-strategy equilibrium of `g` paying `split`.
pub fn proposal(
    g: &NormalFormGame,
    proposer: Player,
    outcome: StrategyProfile,
    split: &PayoffVector,
) -> Result<ConditionalOffer, OfferError> {
    let offers = enforce_outcome(g, outcome, split)?;
    let by = |p: Player| {
        offers
            .iter()
            .find(|o| o.proposer() == p)
            .cloned()
            .unwrap_or_else(|| {
                Offer::new(p, Value::zero(), outcome.get(p.other())).expect("zero is nonnegative")
            })
    };
    ConditionalOffer::new(by(proposer), by(proposer.other()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutcomeScope {
    All,
    Maximal,
}

/// The finite move set searched by the verifiers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveGrid {
    #[serde(with = "rational_str")]
    pub step: Rational,
    pub outcomes: OutcomeScope,
    /// Also enumerate unconditional offers (always on when conditionals are disallowed).
    pub unconditional: bool,
    #[serde(with = "rational_str")]
    pub max_amount: Rational,
}

impl MoveGrid {
    pub fn new(step: Rational, outcomes: OutcomeScope) -> Self {
        MoveGrid {
            step,
            outcomes,
            unconditional: false,
            max_amount: Rational::from_integer(10.into()),
        }
    }

    fn amounts(&self, upto: &Rational) -> Vec<Rational> {
        let mut out = Vec::new();
        let mut x = Rational::zero();
        while x <= *upto {
            out.push(x.clone());
            x += &self.step;
        }
        out
    }
}

/// All grid moves legal at `h`, in a fixed canonical order.
pub fn enumerate_moves(cfg: &PngConfig, h: &History, grid: &MoveGrid) -> Vec<Move> {
    if h.is_terminal() {
        return Vec::new();
    }
    if let Some(p) = &h.pending {
        return vec![Move::Accept(p.id), Move::Reject(p.id)];
    }
    let mover = h.to_move;
    let mut out = vec![Move::Pass];
    let push = |m: Move, out: &mut Vec<Move>| {
        if check_move(cfg, h, &m).is_ok() && !out.contains(&m) {
            out.push(m);
        }
    };
    if cfg.allow_conditional {
        let maximal = crate::game::maximal_outcomes(&cfg.starting_game);
        for outcome in h.game.profiles().collect::<Vec<_>>() {
            if grid.outcomes == OutcomeScope::Maximal && !maximal.contains(outcome) {
                continue;
            }
            let total = h.game.payoff(outcome).sum();
            for x in grid.amounts(&total.real) {
                let x = Value::from_rational(x);
                let rest = &total - &x;
                if rest.is_negative() {
                    continue;
                }
                let split = PayoffVector::from_player(mover, x, rest);
                if let Ok(c) = proposal(&h.game, mover, outcome, &split) {
                    push(Move::MakeConditional(c), &mut out);
                }
            }
        }
    }
    if grid.unconditional || !cfg.allow_conditional {
        for j in 0..h.game.num_strategies(mover.other()) {
            for a in grid.amounts(&grid.max_amount) {
                let o = Offer::new(mover, Value::from_rational(a), j).expect("grid is nonnegative");
                push(Move::MakeOffer(o), &mut out);
            }
        }
    }
    if cfg.allow_withdrawals {
        for a in h.active.iter().filter(|a| a.owner == mover) {
            out.push(Move::Withdraw(a.id));
        }
    }
    if cfg.allow_opt_out {
        out.push(Move::OptOut);
    }
    out
}

/// Human-readable description of what may be played at `h`, for error replies.
pub fn legal_move_summary(cfg: &PngConfig, h: &History) -> Vec<String> {
    if h.is_terminal() {
        return Vec::new();
    }
    if let Some(p) = &h.pending {
        return vec![format!("accept {}", p.id), format!("reject {}", p.id)];
    }
    let mover = h.to_move;
    let mut out = vec!["pass".to_string()];
    let names = h.game.player_names();
    let (me, you) = (&names[mover.index()], &names[mover.other().index()]);
    out.push(format!("{me} -> {you} : <amount> / <{you} strategy>"));
    if cfg.allow_conditional {
        out.push(format!(
            "{me} -> {you} : <amount> / <{you} strategy> | <amount> / <{me} strategy>"
        ));
    }
    if cfg.allow_withdrawals {
        for a in h.active.iter().filter(|a| a.owner == mover) {
            out.push(format!("withdraw {}", a.id));
        }
    }
    if cfg.allow_opt_out {
        out.push("opt-out".into());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::numeric::ratio;

    fn v(s: &str) -> Value {
        s.parse().unwrap()
    }

    fn play(cfg: &PngConfig, texts: &[&str]) -> History {
        let mut h = History::new(cfg);
        for t in texts {
            let m = parse_move(&h, h.to_move(), t).unwrap();
            h = advance(cfg, &h, m).unwrap();
        }
        h
    }

    #[test]
    fn empty_history_is_starting_game() {
        let cfg = PngConfig::new(fixtures::pd1());
        let h = History::new(&cfg);
        assert_eq!(h.game(), &fixtures::pd1());
        assert_eq!(h.to_move(), Player::Row);
        let moves = enumerate_moves(&cfg, &h, &MoveGrid::new(ratio(1, 1), OutcomeScope::Maximal));
        assert_eq!(moves[0], Move::Pass);
        assert!(moves[1..].iter().all(|m| matches!(m, Move::MakeConditional(_))));
    }

    #[test]
    fn unconditional_offer_transforms() {
        let cfg = PngConfig::new(fixtures::pd1());
        let h = play(&cfg, &["Row -> Col : 2 / C"]);
        assert_eq!(h.game(), &fixtures::pd1_after_row_offer());
        assert_eq!(h.to_move(), Player::Col);
    }

    #[test]
    fn pending_offer_restricts_moves() {
        let cfg = PngConfig::new(fixtures::pd2());
        let h = play(&cfg, &["Row -> Col : 3+e / C_Col | 3+e / C_Row"]);
        assert_eq!(h.game(), &fixtures::pd2());
        let moves = enumerate_moves(&cfg, &h, &MoveGrid::new(ratio(1, 1), OutcomeScope::All));
        assert_eq!(moves, vec![Move::Accept(0), Move::Reject(0)]);
        assert!(advance(&cfg, &h, Move::Pass).is_err());
        assert!(advance(&cfg, &h, Move::Accept(4)).is_err());
    }

    #[test]
    fn reject_leaves_game_and_keeps_turn() {
        let cfg = PngConfig::new(fixtures::pd2());
        let h = play(&cfg, &["Row -> Col : 3+e / C_Col | 3+e / C_Row", "reject"]);
        assert_eq!(h.game(), &fixtures::pd2());
        assert_eq!(h.to_move(), Player::Col);
        assert!(h.pending().is_none());
    }

    #[test]
    fn accept_applies_suggestion() {
        let cfg = PngConfig::new(fixtures::pd2());
        let h = play(&cfg, &["Row -> Col : 3+e / C_Col | 3+e / C_Row", "accept"]);
        let c = match parse_offer(&fixtures::pd2(), "Row -> Col : 3+e / C_Col | 3+e / C_Row").unwrap() {
            AnyOffer::Conditional(c) => c,
            _ => unreachable!(),
        };
        assert_eq!(h.game(), &suggested_transformation(&fixtures::pd2(), &c).unwrap());
        assert_eq!(h.accepted_game(), h.game());
        assert_eq!(h.to_move(), Player::Col);
    }

    #[test]
    fn withdrawal_reverts() {
        let mut cfg = PngConfig::new(fixtures::pd1());
        cfg.allow_withdrawals = true;
        let h = play(&cfg, &["Row -> Col : 2 / C", "pass", "withdraw 0"]);
        assert_eq!(h.game(), &fixtures::pd1());
        assert!(check_move(&cfg, &play(&cfg, &["Row -> Col : 2 / C"]), &Move::Withdraw(0)).is_err());
        cfg.allow_withdrawals = false;
        let h = play(&cfg, &["Row -> Col : 2 / C", "pass"]);
        assert!(check_move(&cfg, &h, &Move::Withdraw(0)).is_err());
    }

    #[test]
    fn withdrawing_accepted_conditional_reverts_both_parts() {
        let mut cfg = PngConfig::new(fixtures::pd2());
        cfg.allow_withdrawals = true;
        let h = play(
            &cfg,
            &["Row -> Col : 3+e / C_Col | 3+e / C_Row", "accept", "pass", "withdraw 0"],
        );
        assert_eq!(h.game(), &fixtures::pd2());
    }

    #[test]
    fn double_pass_ends_in_agreement() {
        let cfg = PngConfig::new(fixtures::pd1());
        let h = play(&cfg, &["pass"]);
        assert!(!h.is_terminal());
        let h = play(&cfg, &["pass", "pass"]);
        assert_eq!(h.ending(), Some(Ending::Agreement));
        assert_eq!(history_value(&cfg, &h).unwrap().as_vector().unwrap(), PayoffVector::new(1.into(), 1.into()));
        assert_eq!(advance(&cfg, &h, Move::Pass), Err(PngError::Terminal));
    }

    #[test]
    fn length_four_agreement_is_undiscounted() {
        let cfg = PngConfig::new(fixtures::pd2()).with_discount(ratio(1, 2));
        let target = StrategyProfile::new(0, 0);
        let split = PayoffVector::new(Value::from_rational(ratio(16, 3)), Value::from_rational(ratio(8, 3)));
        let c = proposal(&cfg.starting_game, Player::Row, target, &split).unwrap();
        let mut h = History::new(&cfg);
        for m in [Move::MakeConditional(c), Move::Accept(0), Move::Pass, Move::Pass] {
            h = advance(&cfg, &h, m).unwrap();
        }
        assert_eq!(h.len(), 4);
        assert_eq!(h.time_index(), 0);
        assert_eq!(history_value(&cfg, &h).unwrap().as_vector().unwrap(), split);
    }

    #[test]
    fn counter_proposal_is_discounted_once() {
        let cfg = PngConfig::new(fixtures::pd2()).with_discount(ratio(1, 2));
        let target = StrategyProfile::new(0, 0);
        let x = PayoffVector::new(Value::from_rational(ratio(16, 3)), Value::from_rational(ratio(8, 3)));
        let y = PayoffVector::new(Value::from_rational(ratio(8, 3)), Value::from_rational(ratio(16, 3)));
        let mut h = History::new(&cfg);
        let first = proposal(h.game(), Player::Row, target, &x).unwrap();
        h = advance(&cfg, &h, Move::MakeConditional(first)).unwrap();
        h = advance(&cfg, &h, Move::Reject(0)).unwrap();
        let counter = proposal(h.game(), Player::Col, target, &y).unwrap();
        h = advance(&cfg, &h, Move::MakeConditional(counter)).unwrap();
        for m in [Move::Accept(2), Move::Pass, Move::Pass] {
            h = advance(&cfg, &h, m).unwrap();
        }
        assert_eq!(h.time_index(), 1);
        let value = history_value(&cfg, &h).unwrap().as_vector().unwrap();
        assert_eq!(value, PayoffVector::new(Value::from_rational(ratio(4, 3)), Value::from_rational(ratio(8, 3))));
    }

    #[test]
    fn disagreement_values() {
        let mut cfg = PngConfig::new(fixtures::pd1());
        let z = History::new(&cfg).mark_disagreement();
        assert_eq!(history_value(&cfg, &z).unwrap(), HistoryValue([Payoff::MinusInfinity, Payoff::MinusInfinity]));
        cfg.time_valuable = true;
        assert_eq!(history_value(&cfg, &z).unwrap().as_vector().unwrap(), PayoffVector::default());
        assert!(history_value(&cfg, &History::new(&cfg)).is_err());
    }

    #[test]
    fn depth_cap_truncates() {
        let mut cfg = PngConfig::new(fixtures::pd1());
        cfg.max_depth = 2;
        let h = play(&cfg, &["Row -> Col : 1 / C", "Col -> Row : 1 / C", "Row -> Col : 1 / C"]);
        assert_eq!(h.ending(), Some(Ending::Disagreement { truncated: true }));
        cfg.max_depth = 1;
        let h = play(&cfg, &["pass", "pass"]);
        assert_eq!(h.ending(), Some(Ending::Agreement));
    }

    #[test]
    fn opt_out_returns_accepted_game() {
        let mut cfg = PngConfig::new(fixtures::pd2());
        assert!(check_move(&cfg, &History::new(&cfg), &Move::OptOut).is_err());
        cfg.allow_opt_out = true;
        let h = play(&cfg, &["Row -> Col : 1 / D_Col", "opt-out"]);
        assert_eq!(h.ending(), Some(Ending::OptOut));
        assert_eq!(h.outcome_game(), Some(&fixtures::pd2()));
        assert_eq!(history_value(&cfg, &h).unwrap().as_vector().unwrap(), PayoffVector::new(3.into(), 3.into()));
    }

    #[test]
    fn valuable_time_forbids_negative_solutions() {
        let cfg = PngConfig::new(fixtures::pd1()).with_discount(ratio(1, 2));
        let h = History::new(&cfg);
        let bad = Offer::new(Player::Row, v("2"), 1).unwrap();
        // After paying 2 on D the solution is still (D,D) where Row now gets -1.
        assert!(check_move(&cfg, &h, &Move::MakeOffer(bad)).is_err());
    }

    #[test]
    fn move_text_round_trips() {
        let mut cfg = PngConfig::new(fixtures::pd2());
        cfg.allow_withdrawals = true;
        cfg.allow_opt_out = true;
        let h = play(&cfg, &["Row -> Col : 3+e / C_Col | 3+e / C_Row", "accept 0", "pass", "withdraw 0"]);
        assert_eq!(
            h.to_texts(&cfg),
            vec!["Row -> Col : 3+e / C_Col | 3+e / C_Row", "accept 0", "pass", "withdraw 0"]
        );
        assert!(parse_move(&h, Player::Row, "Col -> Row : 1 / C_Row").is_err());
        assert!(parse_move(&h, Player::Row, "accept").is_err());
        assert!(parse_move(&h, Player::Row, "pass now").is_err());
    }

    #[test]
    fn proposals_hit_requested_split() {
        let g = fixtures::inefficiency();
        let outcome = StrategyProfile::new(1, 0);
        let split = PayoffVector::new(3.into(), 3.into());
        let c = proposal(&g, Player::Row, outcome, &split).unwrap();
        assert_eq!(c.proposer(), Player::Row);
        let t = suggested_transformation(&g, &c).unwrap();
        assert_eq!(expected_value(&t, SolutionConcept::default()), split);
        assert_eq!(solution(&t, SolutionConcept::default()), vec![outcome]);
    }

    #[test]
    fn config_validation() {
        let mut cfg = PngConfig::new(fixtures::pd1());
        assert!(cfg.validate().is_ok());
        cfg.discounts[0] = Rational::one();
        assert!(cfg.validate().is_err());
        cfg.discounts[0] = one_half();
        cfg.max_depth = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = PngConfig::new(fixtures::pd2()).with_discount(ratio(3, 4));
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(serde_json::from_str::<PngConfig>(&text).unwrap(), cfg);
    }
}
