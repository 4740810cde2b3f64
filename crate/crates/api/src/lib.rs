//! JSON payloads exchanged with the preplay service.
//!
//! Games travel inbound as text (the line format or its JSON encoding) so the
//! server reports parse errors with line numbers; outbound they are structured.
//! Exact numbers are strings in the `4+e`, `16/3` syntax.

use serde::{Deserialize, Serialize};

use preplay_core::ira::Feasibility;
use preplay_core::png::{Ending, HistoryValue, OutcomeScope, PngConfig};
use preplay_core::solution::{ClassLabel, SolutionConcept};
use preplay_core::strategy::NegotiationStrategy;
use preplay_core::transcript::{Transcript, TranscriptMove};
use preplay_core::generate::GameShape;
use preplay_core::{NormalFormGame, PayoffVector, Player, Value};

/// Body of every non-2xx response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    pub kind: ErrorKind,
    pub error: String,
    /// Present on illegal moves.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub legal_moves: Option<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    /// Malformed input: 400.
    Invalid,
    /// Unknown session: 404.
    NotFound,
    /// Out of turn or a concurrent update: 409.
    Conflict,
    /// A well-formed move the rules forbid: 422.
    IllegalMove,
    /// The computation itself failed, e.g. a search budget ran out: 422.
    Analysis,
}

impl ErrorKind {
    pub fn status(self) -> u16 {
        match self {
            ErrorKind::Invalid => 400,
            ErrorKind::NotFound => 404,
            ErrorKind::Conflict => 409,
            ErrorKind::IllegalMove | ErrorKind::Analysis => 422,
        }
    }
}

/// An outcome with its labels and payoffs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeView {
    pub profile: String,
    pub payoff: PayoffVector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveRequest {
    pub game: String,
    #[serde(default)]
    pub concept: SolutionConcept,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EliminationView {
    pub round: usize,
    pub player: Player,
    pub eliminated: String,
    pub dominated_by: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NashView {
    pub profile: String,
    pub payoff: PayoffVector,
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub game: NormalFormGame,
    pub concept: SolutionConcept,
    pub eliminations: Vec<EliminationView>,
    /// Surviving row and column labels.
    pub surviving: [Vec<String>; 2],
    pub nash: Vec<NashView>,
    pub solution: Vec<OutcomeView>,
    pub expected_values: PayoffVector,
    pub maxmin_profile: String,
    pub maximal: Vec<OutcomeView>,
    pub maximal_sum: Value,
    pub classification: ClassLabel,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformRequest {
    pub game: String,
    /// Offers in the text syntax, applied in order; a conditional offer
    /// applies its suggested transformation.
    pub offers: Vec<String>,
    #[serde(default)]
    pub concept: SolutionConcept,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformStep {
    pub offer: String,
    /// Feasibility for the proposer; absent for conditional offers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feasibility: Option<Feasibility>,
    pub game: NormalFormGame,
    pub expected_values: PayoffVector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformReport {
    pub steps: Vec<TransformStep>,
    pub game: NormalFormGame,
    pub text: String,
    pub classification: ClassLabel,
    pub solution: Vec<OutcomeView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BestOfferRequest {
    pub game: String,
    /// Player name as written in the game, or `Row` / `Col`.
    pub proposer: String,
    #[serde(default)]
    pub concept: SolutionConcept,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateView {
    pub target: String,
    pub required_payment: Value,
    pub resulting_value: Value,
    pub induced_equilibrium: String,
    pub recipient_payoff: Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BestOfferReport {
    pub proposer: Player,
    /// `OFFER`, `VACUOUS_OFFER` or `PASS`.
    pub decision: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offer: Option<String>,
    pub value: Value,
    pub current_value: Value,
    pub candidates: Vec<CandidateView>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Ira,
    Png,
}

/// A strategy by short name or spelled out in full.
///
/// Names: `spe`, `greedy`, `passive`, `stationary` (even split of the maximal
/// total) and `stationary:<row share>`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StrategyChoice {
    Named(String),
    Full(NegotiationStrategy),
}

/// PNG rule switches shared by negotiation, verification and sessions.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Rules {
    pub concept: SolutionConcept,
    /// `Row`, `Col` or a player name; Row when absent.
    pub first: Option<String>,
    pub time_valuable: bool,
    /// Common discount factor.
    pub delta: Option<String>,
    /// Per-player discounts, overriding `delta`.
    pub delta_row: Option<String>,
    pub delta_col: Option<String>,
    pub allow_conditional: Option<bool>,
    pub allow_withdrawals: bool,
    pub allow_opt_out: bool,
    pub max_depth: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NegotiateRequest {
    pub game: String,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub rules: Rules,
    /// Row's and Col's strategies; png mode only.
    #[serde(default)]
    pub strategies: Option<[StrategyChoice; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IraStepView {
    pub round: usize,
    pub proposer: Player,
    pub decision: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offer: Option<String>,
    pub value: Value,
    pub value_before: Value,
    pub value_after: Value,
    pub game: NormalFormGame,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayView {
    pub moves: Vec<TranscriptMove>,
    pub value: HistoryValue,
    pub ending: Option<Ending>,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NegotiateReport {
    pub mode: Mode,
    pub first_mover: Player,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ira_steps: Vec<IraStepView>,
    /// False when the round cap stopped an IRA run.
    pub converged: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub play: Option<PlayView>,
    pub final_game: Option<NormalFormGame>,
    pub final_values: Option<PayoffVector>,
    pub classification: Option<ClassLabel>,
    pub solution: Vec<OutcomeView>,
    pub transcript: Transcript,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BargainRequest {
    pub game: String,
    pub delta_a: String,
    pub delta_b: String,
    /// Which player is A, the first proposer; Row when absent.
    #[serde(default)]
    pub first: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BargainReport {
    pub d: Value,
    pub delta_a: String,
    pub delta_b: String,
    pub first_proposer: Player,
    pub outcome: String,
    /// Split proposed by A, in (A, B) order.
    pub x_star: [Value; 2],
    /// Split proposed by B, in (A, B) order.
    pub y_star: [Value; 2],
    pub x_star_approx: [f64; 2],
    pub y_star_approx: [f64; 2],
    /// Moves of the equilibrium play.
    pub predicted_play: Vec<TranscriptMove>,
    pub predicted_value: HistoryValue,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyRequest {
    pub game: String,
    #[serde(default)]
    pub rules: Rules,
    pub strategies: [StrategyChoice; 2],
    /// Grid step for amounts; `1/4` when absent.
    #[serde(default)]
    pub step: Option<String>,
    #[serde(default = "all_outcomes")]
    pub outcomes: OutcomeScope,
    #[serde(default = "default_verify_depth")]
    pub depth: usize,
    #[serde(default)]
    pub max_deviations: Option<usize>,
    #[serde(default)]
    pub playout_depth: Option<usize>,
}

fn all_outcomes() -> OutcomeScope {
    OutcomeScope::All
}

fn default_verify_depth() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub verified: bool,
    pub summary: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checked: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<HistoryValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deviation: Option<DeviationView>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviationView {
    pub history: Vec<String>,
    pub deviator: Player,
    pub prescribed: String,
    pub deviation: String,
    pub prescribed_value: HistoryValue,
    pub deviation_value: HistoryValue,
    /// Absent when the gain is unbounded.
    pub gain: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayRequest {
    pub transcript: Transcript,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub final_game: Option<NormalFormGame>,
    pub matches_recorded: bool,
    pub moves: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenRequest {
    /// Falls back to the server's `PREPLAY_SEED`.
    #[serde(default)]
    pub seed: Option<u64>,
    pub count: usize,
    #[serde(default)]
    pub shape: GameShape,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenReport {
    pub seed: u64,
    pub games: Vec<NormalFormGame>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CreateSession {
    /// Falls back to the game the server was started with.
    #[serde(default)]
    pub game: Option<String>,
    #[serde(default)]
    pub rules: Rules,
    /// The human's seat; Row when absent.
    #[serde(default)]
    pub human: Option<String>,
    /// The engine seat's strategy; `greedy` when absent.
    #[serde(default)]
    pub engine: Option<StrategyChoice>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PendingView {
    pub id: usize,
    pub proposer: Player,
    pub text: String,
    /// Game after acceptance.
    pub suggested: NormalFormGame,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActiveView {
    pub id: usize,
    pub owner: Player,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionState {
    pub id: String,
    pub config: PngConfig,
    pub human: Player,
    pub engine: String,
    /// Number of moves so far; echo it back in a move to guard against races.
    pub moves_made: usize,
    pub to_move: Option<Player>,
    pub game: NormalFormGame,
    pub game_text: String,
    pub accepted_game: NormalFormGame,
    pub pending: Option<PendingView>,
    pub active_offers: Vec<ActiveView>,
    pub legal_moves: Vec<String>,
    pub values: PayoffVector,
    pub time_index: usize,
    pub ending: Option<Ending>,
    /// Final value, once the negotiation is over.
    pub outcome: Option<HistoryValue>,
    pub log: Vec<TranscriptMove>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MoveRequest {
    /// The move in the text syntax: an offer, `accept 3`, `pass`, ...
    pub text: String,
    /// When set, the move is refused with 409 unless the session still has
    /// exactly this many moves.
    #[serde(default)]
    pub expect_moves: Option<usize>,
    /// Attach best-offer and bargaining hints for the resulting position.
    #[serde(default)]
    pub hints: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoveResponse {
    pub state: SessionState,
    /// The engine's replies, in order.
    pub engine_moves: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hints: Option<Hints>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hints {
    pub best_offers: Vec<BestOfferReport>,
    /// When time is valuable and the game admits a split.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bargaining: Option<BargainReport>,
}
