//! Interactive negotiations between a client and an engine strategy.

use preplay_api::{ActiveView, CreateSession, ErrorKind, Hints, MoveRequest, MoveResponse, PendingView, Rules, SessionState, StrategyChoice};
use preplay_core::ira::best_offer;
use preplay_core::offers::suggested_transformation;
use preplay_core::png::{advance, history_value, legal_move_summary, parse_move, Evaluator, History, PngConfig, PngError};
use preplay_core::solution::expected_value;
use preplay_core::strategy::NegotiationStrategy;
use preplay_core::transcript::{Transcript, TranscriptMove};
use preplay_core::Player;

use crate::analysis::{bargain_in, best_offer_view, config, parse_game, parse_player, strategy};
use crate::error::{AppError, AppResult};

#[derive(Debug)]
pub struct Session {
    pub id: String,
    pub cfg: PngConfig,
    pub human: Player,
    pub engine_name: String,
    pub engine: NegotiationStrategy,
    pub history: History,
}

impl Session {
    pub fn create(id: String, req: &CreateSession, default_game: Option<&str>, default_rules: &Rules) -> AppResult<(Self, Vec<String>)> {
        let text = match (&req.game, default_game) {
            (Some(g), _) => g.as_str(),
            (None, Some(g)) => g,
            (None, None) => return Err(AppError::invalid("no game given and the service has no default")),
        };
        let g = parse_game(text)?;
        let rules = if req.game.is_some() || *default_rules == Rules::default() { &req.rules } else { default_rules };
        let cfg = config(g, rules)?;
        let human = match &req.human {
            Some(h) => parse_player(&cfg.starting_game, h)?,
            None => Player::Row,
        };
        let choice = req.engine.clone().unwrap_or_else(|| StrategyChoice::Named("greedy".into()));
        let engine = strategy(&cfg, &choice)?;
        let engine_name = match &choice {
            StrategyChoice::Named(n) => n.clone(),
            StrategyChoice::Full(s) => s.name().to_string(),
        };
        let history = History::new(&cfg);
        let mut s = Session { id, cfg, human, engine_name, engine, history };
        let replies = s.engine_turns()?;
        Ok((s, replies))
    }

    /// Plays the engine's moves until it is the client's turn or the game ends.
    fn engine_turns(&mut self) -> AppResult<Vec<String>> {
        let ev = Evaluator::new(self.cfg.concept);
        let mut out = Vec::new();
        while !self.history.is_terminal() && self.history.to_move() != self.human {
            let m = self.engine.choose(&self.cfg, &self.history, &ev);
            out.push(m.to_text(self.history.game()));
            self.history = advance(&self.cfg, &self.history, m)?;
        }
        Ok(out)
    }

    pub fn play(&mut self, req: &MoveRequest) -> AppResult<MoveResponse> {
        if let Some(n) = req.expect_moves {
            if n != self.history.len() {
                return Err(AppError::new(
                    ErrorKind::Conflict,
                    format!("expected {n} moves so far but the session has {}", self.history.len()),
                ));
            }
        }
        if self.history.is_terminal() {
            return Err(AppError::new(ErrorKind::Conflict, "the negotiation is over"));
        }
        if self.history.to_move() != self.human {
            return Err(AppError::new(ErrorKind::Conflict, "it is not your turn"));
        }
        let legal = || legal_move_summary(&self.cfg, &self.history);
        let m = parse_move(&self.history, self.human, &req.text).map_err(|e| AppError::illegal(e.to_string(), legal()))?;
        self.history = match advance(&self.cfg, &self.history, m) {
            Ok(h) => h,
            Err(e @ (PngError::Illegal(_) | PngError::Offer(_))) => return Err(AppError::illegal(e.to_string(), legal())),
            Err(e) => return Err(e.into()),
        };
        let engine_moves = self.engine_turns()?;
        let hints = if req.hints { Some(self.hints()?) } else { None };
        Ok(MoveResponse { state: self.state()?, engine_moves, hints })
    }

    pub fn hints(&self) -> AppResult<Hints> {
        let g = self.history.game();
        let best_offers = Player::BOTH
            .iter()
            .map(|&p| best_offer_view(g, &best_offer(g, p, self.cfg.concept)))
            .collect();
        let bargaining = if self.cfg.time_valuable {
            let first = self.cfg.first_mover;
            let (a, b) = (self.cfg.discount(first), self.cfg.discount(first.other()));
            bargain_in(&self.cfg.starting_game, first, a, b).ok()
        } else {
            None
        };
        Ok(Hints { best_offers, bargaining })
    }

    pub fn log(&self) -> Vec<TranscriptMove> {
        match Transcript::from_history(&self.cfg, &self.history) {
            Transcript::PngHistory { moves, .. } => moves,
            Transcript::IraTrace { .. } => unreachable!("histories give PNG transcripts"),
        }
    }

    pub fn transcript(&self) -> Transcript {
        Transcript::from_history(&self.cfg, &self.history)
    }

    pub fn state(&self) -> AppResult<SessionState> {
        let h = &self.history;
        let g = h.game();
        let pending = match h.pending() {
            Some(p) => Some(PendingView {
                id: p.id,
                proposer: p.offer.proposer(),
                text: p.offer.to_text(g),
                suggested: suggested_transformation(g, &p.offer).map_err(|e| AppError::invalid(e.to_string()))?,
            }),
            None => None,
        };
        let active_offers = h
            .active_offers()
            .iter()
            .map(|a| ActiveView {
                id: a.id,
                owner: a.owner,
                text: a.offers.iter().map(|o| o.to_text(g)).collect::<Vec<_>>().join(" | "),
            })
            .collect();
        let terminal = h.is_terminal();
        Ok(SessionState {
            id: self.id.clone(),
            config: self.cfg.clone(),
            human: self.human,
            engine: self.engine_name.clone(),
            moves_made: h.len(),
            to_move: (!terminal).then(|| h.to_move()),
            game: g.clone(),
            game_text: g.to_text(),
            accepted_game: h.accepted_game().clone(),
            pending,
            active_offers,
            legal_moves: legal_move_summary(&self.cfg, h),
            values: expected_value(g, self.cfg.concept),
            time_index: h.time_index(),
            ending: h.ending(),
            outcome: if terminal { Some(history_value(&self.cfg, h)?) } else { None },
            log: self.log(),
        })
    }
}
