//! Request handling that does not touch session state. Everything here is
//! synchronous and runs on the blocking pool.

use preplay_api::*;
use preplay_core::bargaining::{redistribution_space, rubinstein_split, spe_strategy, stationary_strategy};
use preplay_core::generate::{random_games, seed_from_env};
use preplay_core::ira::{best_offer, feasible, ira_negotiate, BestOfferResult};
use preplay_core::numeric::{int, parse_rational, Rational};
use preplay_core::offers::{apply_offer, parse_offer, suggested_transformation, AnyOffer};
use preplay_core::png::{MoveGrid, PngConfig};
use preplay_core::solution::{
    classify, expected_value, iesds, maxmin_profile, pure_nash, solution, SolutionConcept,
};
use preplay_core::spe::{verify_spe_one_deviation, SpeCheck, SpeVerdict};
use preplay_core::strategy::{simulate, NegotiationStrategy};
use preplay_core::transcript::{replay, Transcript};
use preplay_core::game::maximal_outcomes;
use preplay_core::{NormalFormGame, PayoffVector, Player, StrategyProfile, Value};

use crate::error::{AppError, AppResult};

pub fn parse_game(text: &str) -> AppResult<NormalFormGame> {
    Ok(NormalFormGame::parse(text)?)
}

pub fn parse_player(g: &NormalFormGame, name: &str) -> AppResult<Player> {
    match name {
        "Row" | "row" => Ok(Player::Row),
        "Col" | "col" | "Column" | "column" => Ok(Player::Col),
        _ => g
            .player_by_name(name)
            .ok_or_else(|| AppError::invalid(format!("unknown player `{name}`"))),
    }
}

fn rational(field: &str, text: &str) -> AppResult<Rational> {
    parse_rational(text).map_err(|e| AppError::invalid(format!("{field}: {e}")))
}

fn outcome(g: &NormalFormGame, p: StrategyProfile) -> OutcomeView {
    OutcomeView {
        profile: g.profile_label(p),
        payoff: g.payoff(p).clone(),
    }
}

fn outcomes(g: &NormalFormGame, concept: SolutionConcept) -> Vec<OutcomeView> {
    solution(g, concept).into_iter().map(|p| outcome(g, p)).collect()
}

/// Builds and validates a PNG configuration from the shared rule switches.
pub fn config(g: NormalFormGame, rules: &Rules) -> AppResult<PngConfig> {
    let mut cfg = PngConfig::new(g);
    cfg.concept = rules.concept;
    if let Some(first) = &rules.first {
        cfg.first_mover = parse_player(&cfg.starting_game, first)?;
    }
    let any_delta = rules.delta.is_some() || rules.delta_row.is_some() || rules.delta_col.is_some();
    if any_delta && !rules.time_valuable {
        return Err(AppError::invalid("discount factors need valuable time"));
    }
    cfg.time_valuable = rules.time_valuable;
    if let Some(d) = &rules.delta {
        let d = rational("delta", d)?;
        cfg.discounts = [d.clone(), d];
    }
    if let Some(d) = &rules.delta_row {
        cfg.discounts[0] = rational("delta_row", d)?;
    }
    if let Some(d) = &rules.delta_col {
        cfg.discounts[1] = rational("delta_col", d)?;
    }
    if let Some(c) = rules.allow_conditional {
        cfg.allow_conditional = c;
    }
    cfg.allow_withdrawals = rules.allow_withdrawals;
    cfg.allow_opt_out = rules.allow_opt_out;
    if let Some(d) = rules.max_depth {
        cfg.max_depth = d;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Resolves a strategy name against a configuration.
pub fn strategy(cfg: &PngConfig, choice: &StrategyChoice) -> AppResult<NegotiationStrategy> {
    let name = match choice {
        StrategyChoice::Full(s) => return Ok(s.clone()),
        StrategyChoice::Named(n) => n.trim(),
    };
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    match (head, arg) {
        ("spe", None) => Ok(spe_strategy(cfg)?),
        ("greedy" | "greedy-ira", None) => Ok(NegotiationStrategy::GreedyIra),
        ("passive", None) => Ok(NegotiationStrategy::Passive),
        ("stationary", share) => {
            let d = redistribution_space(&cfg.starting_game)?.d;
            let row = match share {
                Some(s) => Value::from(rational("stationary share", s)?),
                None => Value::new(d.real.clone() / int(2), d.eps.clone() / int(2)),
            };
            let target = PayoffVector::new(row.clone(), &d - &row);
            Ok(stationary_strategy(&target, cfg)?)
        }
        _ => Err(AppError::invalid(format!(
            "unknown strategy `{name}` (expected spe, greedy, passive, stationary or stationary:<row share>)"
        ))),
    }
}

pub fn solve(req: &SolveRequest) -> AppResult<SolveReport> {
    let g = parse_game(&req.game)?;
    let reduced = iesds(&g);
    let eliminations = reduced
        .trace
        .iter()
        .map(|e| EliminationView {
            round: e.round,
            player: e.player,
            eliminated: g.strategy_label(e.player, e.eliminated).to_string(),
            dominated_by: g.strategy_label(e.player, e.dominator).to_string(),
        })
        .collect();
    let surviving = Player::BOTH.map(|p| {
        reduced
            .surviving(p)
            .iter()
            .map(|&s| g.strategy_label(p, s).to_string())
            .collect()
    });
    let nash = pure_nash(&g)
        .into_iter()
        .map(|n| NashView {
            profile: g.profile_label(n.profile),
            payoff: g.payoff(n.profile).clone(),
            strict: n.strict,
        })
        .collect();
    let maximal = maximal_outcomes(&g);
    Ok(SolveReport {
        concept: req.concept,
        eliminations,
        surviving,
        nash,
        solution: outcomes(&g, req.concept),
        expected_values: expected_value(&g, req.concept),
        maxmin_profile: g.profile_label(maxmin_profile(&g, req.concept)),
        maximal: maximal.profiles.iter().map(|&p| outcome(&g, p)).collect(),
        maximal_sum: maximal.sum,
        classification: classify(&g, req.concept).label,
        game: g,
    })
}

pub fn transform(req: &TransformRequest) -> AppResult<TransformReport> {
    let mut g = parse_game(&req.game)?;
    let mut steps = Vec::new();
    for text in &req.offers {
        let bad = |e: preplay_core::offers::OfferError| AppError::invalid(format!("`{text}`: {e}"));
        let (next, feasibility) = match parse_offer(&g, text).map_err(bad)? {
            AnyOffer::Unconditional(o) => {
                let f = feasible(&g, &o, req.concept).map_err(bad)?;
                (apply_offer(&g, &o).map_err(bad)?, Some(f))
            }
            AnyOffer::Conditional(c) => (suggested_transformation(&g, &c).map_err(bad)?, None),
        };
        g = next;
        steps.push(TransformStep {
            offer: text.trim().to_string(),
            feasibility,
            expected_values: expected_value(&g, req.concept),
            game: g.clone(),
        });
    }
    Ok(TransformReport {
        steps,
        text: g.to_text(),
        classification: classify(&g, req.concept).label,
        solution: outcomes(&g, req.concept),
        game: g,
    })
}

pub fn best_offer_view(g: &NormalFormGame, r: &BestOfferResult) -> BestOfferReport {
    let recipient = r.proposer.other();
    BestOfferReport {
        proposer: r.proposer,
        decision: r.decision.label().to_string(),
        offer: r.decision.offer().map(|o| o.to_text(g)),
        value: r.value.clone(),
        current_value: r.current_value.clone(),
        candidates: r
            .candidates
            .iter()
            .map(|c| CandidateView {
                target: g.strategy_label(recipient, c.target_strategy).to_string(),
                required_payment: c.required_payment.clone(),
                resulting_value: c.resulting_value.clone(),
                induced_equilibrium: g.profile_label(c.induced_equilibrium),
                recipient_payoff: c.recipient_payoff.clone(),
            })
            .collect(),
    }
}

pub fn best_offer_report(req: &BestOfferRequest) -> AppResult<BestOfferReport> {
    let g = parse_game(&req.game)?;
    let p = parse_player(&g, &req.proposer)?;
    Ok(best_offer_view(&g, &best_offer(&g, p, req.concept)))
}

fn check_ira_rules(req: &NegotiateRequest) -> AppResult<()> {
    let r = &req.rules;
    let mut bad = Vec::new();
    if r.time_valuable || r.delta.is_some() || r.delta_row.is_some() || r.delta_col.is_some() {
        bad.push("discounting");
    }
    if r.allow_conditional == Some(true) {
        bad.push("conditional offers");
    }
    if r.allow_withdrawals || r.allow_opt_out {
        bad.push("withdrawals and opting out");
    }
    if req.strategies.is_some() {
        bad.push("strategies");
    }
    if r.max_depth.is_some() {
        bad.push("a depth cap");
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(AppError::invalid(format!("ira mode does not take {}", bad.join(", "))))
    }
}

pub fn negotiate(req: &NegotiateRequest) -> AppResult<NegotiateReport> {
    let g = parse_game(&req.game)?;
    match req.mode {
        Mode::Ira => {
            check_ira_rules(req)?;
            let first = match &req.rules.first {
                Some(f) => parse_player(&g, f)?,
                None => Player::Row,
            };
            let concept = req.rules.concept;
            let out = ira_negotiate(&g, first, concept);
            let mut before = g.clone();
            let mut steps = Vec::new();
            for s in &out.steps {
                steps.push(IraStepView {
                    round: s.round,
                    proposer: s.proposer,
                    decision: s.result.decision.label().to_string(),
                    offer: s.result.decision.offer().map(|o| o.to_text(&before)),
                    value: s.result.value.clone(),
                    value_before: s.value_before.clone(),
                    value_after: s.value_after.clone(),
                    game: s.game.clone(),
                });
                before = s.game.clone();
            }
            let f = &out.final_game;
            Ok(NegotiateReport {
                mode: Mode::Ira,
                first_mover: first,
                ira_steps: steps,
                converged: out.converged,
                play: None,
                final_values: Some(expected_value(f, concept)),
                classification: Some(classify(f, concept).label),
                solution: outcomes(f, concept),
                transcript: Transcript::from_ira(&g, &out),
                final_game: Some(f.clone()),
            })
        }
        Mode::Png => {
            let cfg = config(g, &req.rules)?;
            let choices = req
                .strategies
                .clone()
                .unwrap_or_else(|| [StrategyChoice::Named("greedy".into()), StrategyChoice::Named("greedy".into())]);
            let s = [strategy(&cfg, &choices[0])?, strategy(&cfg, &choices[1])?];
            let sim = simulate(&cfg, [&s[0], &s[1]])?;
            let transcript = Transcript::from_history(&cfg, &sim.history);
            let Transcript::PngHistory { moves, .. } = &transcript else {
                unreachable!("histories give PNG transcripts")
            };
            let final_game = sim.history.outcome_game().cloned();
            let concept = cfg.concept;
            Ok(NegotiateReport {
                mode: Mode::Png,
                first_mover: cfg.first_mover,
                ira_steps: Vec::new(),
                converged: true,
                play: Some(PlayView {
                    moves: moves.clone(),
                    value: sim.value.clone(),
                    ending: sim.history.ending(),
                    truncated: sim.truncated,
                }),
                final_values: final_game.as_ref().map(|f| expected_value(f, concept)),
                classification: final_game.as_ref().map(|f| classify(f, concept).label),
                solution: final_game.as_ref().map(|f| outcomes(f, concept)).unwrap_or_default(),
                final_game,
                transcript,
            })
        }
    }
}

/// The equilibrium split with `first` proposing, and the play it predicts.
pub fn bargain_in(
    g: &NormalFormGame,
    first: Player,
    delta_a: &Rational,
    delta_b: &Rational,
) -> AppResult<BargainReport> {
    let space = redistribution_space(g)?;
    let split = rubinstein_split(&space.d, delta_a, delta_b)?;
    let mut cfg = PngConfig::new(g.clone());
    cfg.time_valuable = true;
    cfg.first_mover = first;
    cfg.discounts[first.index()] = delta_a.clone();
    cfg.discounts[first.other().index()] = delta_b.clone();
    cfg.validate()?;
    let s = spe_strategy(&cfg)?;
    let sim = simulate(&cfg, [&s, &s])?;
    let Transcript::PngHistory { moves, .. } = Transcript::from_history(&cfg, &sim.history) else {
        unreachable!("histories give PNG transcripts")
    };
    Ok(BargainReport {
        d: Value::from(split.d.clone()),
        delta_a: split.delta_a.to_string(),
        delta_b: split.delta_b.to_string(),
        first_proposer: first,
        outcome: g.profile_label(space.outcome),
        x_star_approx: split.x_star.clone().map(|v| v.approx()),
        y_star_approx: split.y_star.clone().map(|v| v.approx()),
        x_star: split.x_star,
        y_star: split.y_star,
        predicted_play: moves,
        predicted_value: sim.value,
    })
}

pub fn bargain(req: &BargainRequest) -> AppResult<BargainReport> {
    let g = parse_game(&req.game)?;
    let first = match &req.first {
        Some(f) => parse_player(&g, f)?,
        None => Player::Row,
    };
    let (a, b) = (rational("delta_a", &req.delta_a)?, rational("delta_b", &req.delta_b)?);
    bargain_in(&g, first, &a, &b)
}

pub fn verify(req: &VerifyRequest) -> AppResult<VerifyReport> {
    let g = parse_game(&req.game)?;
    let cfg = config(g, &req.rules)?;
    let s = [strategy(&cfg, &req.strategies[0])?, strategy(&cfg, &req.strategies[1])?];
    let step = match &req.step {
        Some(t) => rational("step", t)?,
        None => Rational::new(1.into(), 4.into()),
    };
    if step <= int(0) {
        return Err(AppError::invalid("step must be positive"));
    }
    let mut check = SpeCheck::new(MoveGrid::new(step, req.outcomes), req.depth);
    if let Some(m) = req.max_deviations {
        check.max_deviations = m;
    }
    check.playout_depth = req.playout_depth;
    let verdict = verify_spe_one_deviation(&cfg, [&s[0], &s[1]], &check)?;
    let summary = verdict.report(&cfg);
    Ok(match verdict {
        SpeVerdict::Verified { checked, value } => VerifyReport {
            verified: true,
            summary,
            checked: Some(checked),
            value: Some(value),
            deviation: None,
        },
        SpeVerdict::Deviation {
            history,
            deviator,
            prescribed,
            deviation,
            prescribed_value,
            deviation_value,
            gain,
        } => VerifyReport {
            verified: false,
            summary,
            checked: None,
            value: None,
            deviation: Some(DeviationView {
                prescribed: prescribed.to_text(history.game()),
                deviation: deviation.to_text(history.game()),
                history: history.to_texts(&cfg),
                deviator,
                prescribed_value,
                deviation_value,
                gain,
            }),
        },
    })
}

pub fn replay_report(req: &ReplayRequest) -> AppResult<ReplayReport> {
    let r = replay(&req.transcript).map_err(|e| AppError::invalid(e.to_string()))?;
    let moves = match &req.transcript {
        Transcript::PngHistory { moves, .. } => moves.len(),
        Transcript::IraTrace { steps, .. } => steps.len(),
    };
    Ok(ReplayReport {
        final_game: r.final_game,
        matches_recorded: r.matches_recorded,
        moves,
    })
}

pub const MAX_GENERATED: usize = 10_000;

pub fn generate(req: &GenRequest) -> AppResult<GenReport> {
    if req.count > MAX_GENERATED {
        return Err(AppError::invalid(format!("at most {MAX_GENERATED} games per request")));
    }
    let seed = match req.seed {
        Some(s) => s,
        None => seed_from_env().map_err(AppError::invalid)?,
    };
    let games = random_games(seed, req.count, &req.shape).map_err(AppError::invalid)?;
    Ok(GenReport { seed, games })
}
