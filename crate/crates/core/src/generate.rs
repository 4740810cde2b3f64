//! Seeded random games for tests and the `gen` command.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::game::{NormalFormGame, PayoffVector};
use crate::numeric::{ratio, Value};

/// Environment variable holding the generator seed.
pub const SEED_VAR: &str = "PREPLAY_SEED";

/// The seed from `PREPLAY_SEED`, or 0 when unset.
pub fn seed_from_env() -> Result<u64, String> {
    match std::env::var(SEED_VAR) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| format!("{SEED_VAR} must be an unsigned integer, got `{s}`")),
        Err(_) => Ok(0),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameShape {
    pub rows: usize,
    pub cols: usize,
    /// Payoffs are drawn uniformly from `min..=max` in steps of `1/denominator`.
    pub min: i64,
    pub max: i64,
    pub denominator: i64,
}

impl Default for GameShape {
    fn default() -> Self {
        GameShape {
            rows: 2,
            cols: 2,
            min: 0,
            max: 9,
            denominator: 1,
        }
    }
}

impl GameShape {
    pub fn validate(&self) -> Result<(), String> {
        if self.rows == 0 || self.cols == 0 {
            return Err("games need at least one strategy per player".into());
        }
        if self.min > self.max {
            return Err("min must not exceed max".into());
        }
        if self.denominator < 1 {
            return Err("denominator must be positive".into());
        }
        Ok(())
    }
}

pub fn random_game(rng: &mut impl Rng, shape: &GameShape) -> NormalFormGame {
    let (lo, hi) = (shape.min * shape.denominator, shape.max * shape.denominator);
    let mut draw = || Value::from(ratio(rng.gen_range(lo..=hi), shape.denominator));
    let payoffs = (0..shape.rows)
        .map(|_| (0..shape.cols).map(|_| PayoffVector::new(draw(), draw())).collect())
        .collect();
    NormalFormGame::new(
        ["Row".into(), "Col".into()],
        (1..=shape.rows).map(|i| format!("R{i}")).collect(),
        (1..=shape.cols).map(|j| format!("C{j}")).collect(),
        payoffs,
    )
    .expect("shape is validated")
}

/// `count` games from a ChaCha8 stream seeded with `seed`.
pub fn random_games(seed: u64, count: usize, shape: &GameShape) -> Result<Vec<NormalFormGame>, String> {
    shape.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| random_game(&mut rng, shape)).collect())
}
