//! Replayable logs of negotiations, in the move and offer text syntax.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{NormalFormGame, Player};
use crate::ira::{Decision, IraOutcome};
use crate::offers::{apply_offer, parse_offer, AnyOffer, OfferError};
use crate::png::{advance, parse_move, History, PngConfig, PngError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranscriptError {
    #[error("move {index} (`{text}`): {source}")]
    Move {
        index: usize,
        text: String,
        source: PngError,
    },
    #[error("step {index} (`{text}`): {source}")]
    Offer {
        index: usize,
        text: String,
        source: OfferError,
    },
    #[error("step {index}: `{text}` is not an unconditional offer")]
    NotUnconditional { index: usize, text: String },
    #[error("unknown player `{0}`")]
    Player(String),
    #[error("invalid configuration: {0}")]
    Config(PngError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptMove {
    pub player: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Transcript {
    PngHistory {
        config: PngConfig,
        moves: Vec<TranscriptMove>,
        /// Game the negotiation ended on, if it ended with one.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        final_game: Option<NormalFormGame>,
    },
    IraTrace {
        game: NormalFormGame,
        first_mover: Player,
        /// Every turn, `pass` or the offer made.
        steps: Vec<TranscriptMove>,
        final_game: NormalFormGame,
    },
}

impl Transcript {
    pub fn from_history(cfg: &PngConfig, h: &History) -> Self {
        let g = &cfg.starting_game;
        let moves = h
            .records()
            .iter()
            .zip(h.to_texts(cfg))
            .map(|(r, text)| TranscriptMove {
                player: g.player_name(r.player).to_string(),
                text,
            })
            .collect();
        Transcript::PngHistory {
            config: cfg.clone(),
            moves,
            final_game: h.outcome_game().cloned(),
        }
    }

    pub fn from_ira(start: &NormalFormGame, outcome: &IraOutcome) -> Self {
        let mut game = start.clone();
        let mut steps = Vec::new();
        for s in &outcome.steps {
            let text = match &s.result.decision {
                Decision::Offer(o) | Decision::VacuousOffer(o) => o.to_text(&game),
                Decision::Pass => "pass".to_string(),
            };
            steps.push(TranscriptMove {
                player: game.player_name(s.proposer).to_string(),
                text,
            });
            game = s.game.clone();
        }
        Transcript::IraTrace {
            game: start.clone(),
            first_mover: outcome.first_mover,
            steps,
            final_game: outcome.final_game.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("transcripts serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replay {
    /// Game reached by replaying; `None` for a disagreement.
    pub final_game: Option<NormalFormGame>,
    pub history: Option<History>,
    /// Whether the replayed game equals the one recorded.
    pub matches_recorded: bool,
}

/// Re-executes every recorded move through the engine.
pub fn replay(t: &Transcript) -> Result<Replay, TranscriptError> {
    match t {
        Transcript::PngHistory {
            config,
            moves,
            final_game,
        } => {
            config.validate().map_err(TranscriptError::Config)?;
            let g = &config.starting_game;
            let mut h = History::new(config);
            for (index, m) in moves.iter().enumerate() {
                let player = g
                    .player_by_name(&m.player)
                    .ok_or_else(|| TranscriptError::Player(m.player.clone()))?;
                let err = |source| TranscriptError::Move {
                    index,
                    text: m.text.clone(),
                    source,
                };
                if player != h.to_move() {
                    return Err(err(PngError::Illegal(format!(
                        "it is {}'s turn",
                        g.player_name(h.to_move())
                    ))));
                }
                let mv = parse_move(&h, player, &m.text).map_err(err)?;
                h = advance(config, &h, mv).map_err(err)?;
            }
            let reached = h.outcome_game().cloned();
            Ok(Replay {
                matches_recorded: reached == *final_game,
                final_game: reached,
                history: Some(h),
            })
        }
        Transcript::IraTrace {
            game,
            steps,
            final_game,
            ..
        } => {
            let mut g = game.clone();
            for (index, s) in steps.iter().enumerate() {
                if s.text.trim() == "pass" {
                    continue;
                }
                let err = |source| TranscriptError::Offer {
                    index,
                    text: s.text.clone(),
                    source,
                };
                match parse_offer(&g, &s.text).map_err(err)? {
                    AnyOffer::Unconditional(o) => g = apply_offer(&g, &o).map_err(err)?,
                    AnyOffer::Conditional(_) => {
                        return Err(TranscriptError::NotUnconditional {
                            index,
                            text: s.text.clone(),
                        })
                    }
                }
            }
            Ok(Replay {
                matches_recorded: g == *final_game,
                final_game: Some(g),
                history: None,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::ira::ira_negotiate;
    use crate::solution::SolutionConcept;
    use crate::strategy::{simulate, stationary};
    use crate::{PayoffVector, StrategyProfile};

    #[test]
    fn png_history_round_trips() {
        let cfg = PngConfig::new(fixtures::pd2());
        let s = stationary(StrategyProfile::new(0, 0), PayoffVector::new(4.into(), 4.into()));
        let sim = simulate(&cfg, [&s, &s]).unwrap();
        let t = Transcript::from_history(&cfg, &sim.history);
        let back = Transcript::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        let r = replay(&back).unwrap();
        assert!(r.matches_recorded);
        assert_eq!(r.history.as_ref(), Some(&sim.history));
    }

    #[test]
    fn ira_trace_round_trips() {
        let g = fixtures::worked_example();
        let out = ira_negotiate(&g, Player::Row, SolutionConcept::default());
        let t = Transcript::from_ira(&g, &out);
        let r = replay(&Transcript::from_json(&t.to_json()).unwrap()).unwrap();
        assert!(r.matches_recorded);
        assert_eq!(r.final_game, Some(fixtures::worked_final_row_first()));
    }

    #[test]
    fn tampered_log_is_reported() {
        let cfg = PngConfig::new(fixtures::pd1());
        let t = Transcript::PngHistory {
            config: cfg,
            moves: vec![TranscriptMove {
                player: "Col".into(),
                text: "pass".into(),
            }],
            final_game: None,
        };
        assert!(matches!(replay(&t), Err(TranscriptError::Move { index: 0, .. })));
    }
}
