//! Preplay negotiation over two-player normal-form games.
//!
//! Games carry exact payoffs in `ℚ[ε]`. Players reshape a game before play
//! by committing to transfers contingent on the opponent's strategy; the
//! crate solves games, searches for improving offers, simulates alternating
//! negotiations and checks subgame perfection of negotiation strategies.

pub mod bargaining;
pub mod fixtures;
pub mod game;
pub mod generate;
pub mod ira;
pub mod numeric;
pub mod offers;
pub mod png;
pub mod solution;
pub mod spe;
pub mod strategy;
pub mod transcript;

pub use game::{NormalFormGame, PayoffVector, Player, StrategyProfile};
pub use numeric::Value;
