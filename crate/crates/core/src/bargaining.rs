//! Negotiation with valuable time as alternating-offers bargaining over the
//! maximal total of the starting game.

use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::game::{maximal_outcomes, NormalFormGame, PayoffVector, Player, StrategyProfile};
use crate::numeric::{rational_str, Rational, Value};
use crate::png::PngConfig;
use crate::strategy::{NegotiationStrategy, RubinsteinSpe, Stationary};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BargainError {
    #[error("{0} must lie strictly between 0 and 1")]
    Discount(&'static str),
    #[error("the total to divide must be positive")]
    Total,
    #[error("no outcome has a nonnegative total")]
    Empty,
    #[error("the equilibrium strategy needs valuable time")]
    NotValuable,
    #[error("{0} is not a nonnegative split of the maximal total")]
    NotRedistribution(String),
    #[error("payoff {0} of the first player cannot be rescaled")]
    NonPositivePayoff(String),
}

/// Nonnegative divisions of some outcome's total.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RedistributionSpace {
    /// Maximal total.
    pub d: Value,
    /// Distinct nonnegative outcome totals, descending.
    pub totals: Vec<Value>,
    /// A maximal outcome, first in row-major order.
    pub outcome: StrategyProfile,
}

impl RedistributionSpace {
    pub fn contains(&self, v: &PayoffVector) -> bool {
        nonnegative(v) && self.totals.contains(&v.sum())
    }

    /// Member of the maximal-total segment.
    pub fn on_frontier(&self, v: &PayoffVector) -> bool {
        nonnegative(v) && v.sum() == self.d
    }

    /// The member best for `p`: everything to `p`.
    pub fn best_for(&self, p: Player) -> PayoffVector {
        PayoffVector::from_player(p, self.d.clone(), Value::zero())
    }
}

fn nonnegative(v: &PayoffVector) -> bool {
    !v[Player::Row].is_negative() && !v[Player::Col].is_negative()
}

pub fn redistribution_space(g: &NormalFormGame) -> Result<RedistributionSpace, BargainError> {
    let maximal = maximal_outcomes(g);
    if maximal.sum.is_negative() {
        return Err(BargainError::Empty);
    }
    let mut totals: Vec<Value> = g
        .profiles()
        .map(|p| g.payoff(p).sum())
        .filter(|t| !t.is_negative())
        .collect();
    totals.sort_by(|a, b| b.cmp(a));
    totals.dedup();
    Ok(RedistributionSpace {
        d: maximal.sum,
        totals,
        outcome: maximal.profiles[0],
    })
}

/// The two agreements of alternating-offers bargaining, components in the
/// order (first proposer, responder).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BargainingSolution {
    #[serde(with = "rational_str")]
    pub d: Rational,
    #[serde(with = "rational_str")]
    pub delta_a: Rational,
    #[serde(with = "rational_str")]
    pub delta_b: Rational,
    /// Agreement proposed by the first mover.
    pub x_star: [Value; 2],
    /// Agreement proposed by the responder.
    pub y_star: [Value; 2],
}

impl BargainingSolution {
    /// `(x*, y*)` indexed by seat when `first` proposes first.
    pub fn by_seat(&self, first: Player) -> (PayoffVector, PayoffVector) {
        let seat = |v: &[Value; 2]| PayoffVector::from_player(first, v[0].clone(), v[1].clone());
        (seat(&self.x_star), seat(&self.y_star))
    }
}

fn open_unit(d: &Rational, name: &'static str) -> Result<(), BargainError> {
    if d.is_positive() && *d < Rational::one() {
        Ok(())
    } else {
        Err(BargainError::Discount(name))
    }
}

/// Closed-form split; the ε part of `d` is ignored.
pub fn rubinstein_split(
    d: &Value,
    delta_a: &Rational,
    delta_b: &Rational,
) -> Result<BargainingSolution, BargainError> {
    open_unit(delta_a, "delta_a")?;
    open_unit(delta_b, "delta_b")?;
    let d = d.real.clone();
    if !d.is_positive() {
        return Err(BargainError::Total);
    }
    let one = Rational::one();
    let den = &one - delta_a * delta_b;
    let x_a = &d * (&one - delta_b) / &den;
    let y_b = &d * (&one - delta_a) / &den;
    let y_a = delta_a * &x_a;
    let x_b = delta_b * &y_b;
    Ok(BargainingSolution {
        d,
        delta_a: delta_a.clone(),
        delta_b: delta_b.clone(),
        x_star: [x_a.into(), x_b.into()],
        y_star: [y_a.into(), y_b.into()],
    })
}

/// The game with the row player's payoffs rescaled so that both players
/// discount by `delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedGame {
    pub exponent: f64,
    pub delta: f64,
    /// `payoffs[r][c] = [row, col]`.
    pub payoffs: Vec<Vec<[f64; 2]>>,
}

pub fn normalize_discounts(
    g: &NormalFormGame,
    delta_a: &Rational,
    delta_b: &Rational,
) -> Result<NormalizedGame, BargainError> {
    open_unit(delta_a, "delta_a")?;
    open_unit(delta_b, "delta_b")?;
    let (da, db) = (to_f64(delta_a), to_f64(delta_b));
    let exponent = if delta_a == delta_b { 1.0 } else { db.ln() / da.ln() };
    let mut payoffs = Vec::with_capacity(g.rows());
    for r in 0..g.rows() {
        let mut row = Vec::with_capacity(g.cols());
        for c in 0..g.cols() {
            let v = g.payoff(StrategyProfile::new(r, c));
            if !v[Player::Row].is_positive() {
                return Err(BargainError::NonPositivePayoff(v[Player::Row].human()));
            }
            row.push([v[Player::Row].approx().powf(exponent), v[Player::Col].approx()]);
        }
        payoffs.push(row);
    }
    Ok(NormalizedGame {
        exponent,
        delta: db,
        payoffs,
    })
}

fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// The equilibrium strategy of the valuable-time negotiation, for either seat.
pub fn spe_strategy(cfg: &PngConfig) -> Result<NegotiationStrategy, BargainError> {
    if !cfg.time_valuable {
        return Err(BargainError::NotValuable);
    }
    let space = redistribution_space(&cfg.starting_game)?;
    let first = cfg.first_mover;
    let split = rubinstein_split(&space.d, cfg.discount(first), cfg.discount(first.other()))?;
    let (x_star, y_star) = split.by_seat(first);
    Ok(NegotiationStrategy::RubinsteinSpe(RubinsteinSpe {
        outcome: space.outcome,
        x_star,
        y_star,
        first_mover: first,
    }))
}

/// Stationary strategy proposing and insisting on `target`.
pub fn stationary_strategy(
    target: &PayoffVector,
    cfg: &PngConfig,
) -> Result<NegotiationStrategy, BargainError> {
    let space = redistribution_space(&cfg.starting_game)?;
    if !space.on_frontier(target) {
        return Err(BargainError::NotRedistribution(target.human()));
    }
    Ok(NegotiationStrategy::Stationary(Stationary {
        outcome: space.outcome,
        split: target.clone(),
        thresholds: target.clone(),
        only_maximal: false,
    }))
}
