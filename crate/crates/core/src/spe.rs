//! Subgame perfection on the truncated, discretized negotiation tree.

use rustc_hash::FxHashMap as HashMap;

use serde::{Deserialize, Serialize};

use crate::game::Player;
use crate::numeric::Value;
use crate::png::{
    advance, enumerate_moves, history_value_with, Evaluator, History, HistoryValue, Move, MoveGrid,
    Payoff, PngConfig, PngError,
};
use crate::strategy::NegotiationStrategy;

/// Bounds of the one-deviation check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeCheck {
    pub grid: MoveGrid,
    /// Deviations are tried at every checked history of at most this length.
    pub depth: usize,
    /// How many departures from the profile may precede a checked history.
    #[serde(default = "default_deviations")]
    pub max_deviations: usize,
    /// Length cap for playouts; defaults to twice `depth`.
    #[serde(default)]
    pub playout_depth: Option<usize>,
}

fn default_deviations() -> usize {
    1
}

impl SpeCheck {
    pub fn new(grid: MoveGrid, depth: usize) -> Self {
        SpeCheck {
            grid,
            depth,
            max_deviations: default_deviations(),
            playout_depth: None,
        }
    }

    pub fn playout_depth(&self) -> usize {
        self.playout_depth.unwrap_or(2 * self.depth).max(self.depth)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum SpeVerdict {
    Verified {
        /// Histories at which every grid deviation was tried.
        checked: usize,
        value: HistoryValue,
    },
    Deviation {
        history: History,
        deviator: Player,
        prescribed: Move,
        deviation: Move,
        prescribed_value: HistoryValue,
        deviation_value: HistoryValue,
        /// `None` when the prescribed continuation is worth minus infinity.
        gain: Option<Value>,
    },
}

impl SpeVerdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, SpeVerdict::Verified { .. })
    }

    pub fn report(&self, cfg: &PngConfig) -> String {
        match self {
            SpeVerdict::Verified { checked, value } => {
                format!("VERIFIED ({checked} histories checked), value {}", value.human())
            }
            SpeVerdict::Deviation {
                history,
                deviator,
                prescribed,
                deviation,
                prescribed_value,
                deviation_value,
                gain,
            } => {
                let g = history.game();
                let path = history.to_texts(cfg).join("; ");
                let gain = gain.as_ref().map_or("unbounded".to_string(), |v| v.human());
                format!(
                    "DEVIATION after [{path}]: {} plays {} instead of {} ({} instead of {}), gain {gain}",
                    g.player_name(*deviator),
                    deviation.to_text(g),
                    prescribed.to_text(g),
                    deviation_value.human(),
                    prescribed_value.human(),
                )
            }
        }
    }
}

struct Playout<'a> {
    cfg: &'a PngConfig,
    strategies: [&'a NegotiationStrategy; 2],
    ev: Evaluator,
    memo: HashMap<History, HistoryValue>,
}

impl Playout<'_> {
    fn prescribed(&self, h: &History) -> Move {
        self.strategies[h.to_move().index()].choose(self.cfg, h, &self.ev)
    }

    /// Value of playing the profile from `h` to the end.
    fn follow(&mut self, h: &History) -> Result<HistoryValue, PngError> {
        let mut path = Vec::new();
        let mut cur = h.clone();
        let value = loop {
            if let Some(v) = self.memo.get(&cur) {
                break v.clone();
            }
            if cur.is_terminal() {
                let v = history_value_with(self.cfg, &cur, &self.ev)?;
                self.memo.insert(cur.clone(), v.clone());
                break v;
            }
            let next = advance(self.cfg, &cur, self.prescribed(&cur))?;
            path.push(cur);
            cur = next;
        };
        for node in path {
            self.memo.insert(node, value.clone());
        }
        Ok(value)
    }
}

fn gain(dev: &Payoff, base: &Payoff) -> Option<Value> {
    match (dev, base) {
        (Payoff::Finite(a), Payoff::Finite(b)) => Some(a - b),
        _ => None,
    }
}

/// Checks that no player gains by a single-move deviation at any history
/// reachable from the root with at most `check.max_deviations` departures.
///
/// Continuations are played out beyond `check.depth`, so a deviation close
/// to the search horizon is judged by where the profile actually leads.
pub fn verify_spe_one_deviation(
    cfg: &PngConfig,
    strategies: [&NegotiationStrategy; 2],
    check: &SpeCheck,
) -> Result<SpeVerdict, PngError> {
    let mut cfg = cfg.clone();
    cfg.max_depth = check.playout_depth();
    cfg.validate()?;
    let mut run = Playout {
        cfg: &cfg,
        strategies,
        ev: Evaluator::new(cfg.concept),
        memo: HashMap::default(),
    };
    let root = History::new(&cfg);
    let root_value = run.follow(&root)?;
    let mut stack = vec![(root, check.max_deviations)];
    let mut seen: HashMap<History, usize> = HashMap::default();
    let mut checked = 0;
    while let Some((h, budget)) = stack.pop() {
        if h.is_terminal() || h.len() > check.depth || seen.get(&h).is_some_and(|&b| b >= budget) {
            continue;
        }
        seen.insert(h.clone(), budget);
        checked += 1;
        let me = h.to_move();
        let prescribed = run.prescribed(&h);
        let base = run.follow(&h)?;
        let mut deviations = Vec::new();
        for m in enumerate_moves(&cfg, &h, &check.grid) {
            if m == prescribed {
                continue;
            }
            let child = advance(&cfg, &h, m.clone())?;
            let v = run.follow(&child)?;
            if v.get(me) > base.get(me) {
                return Ok(SpeVerdict::Deviation {
                    gain: gain(v.get(me), base.get(me)),
                    history: h,
                    deviator: me,
                    prescribed,
                    deviation: m,
                    prescribed_value: base,
                    deviation_value: v,
                });
            }
            if budget > 0 {
                deviations.push(child);
            }
        }
        // Pushed in reverse so the profile's own continuation is explored first.
        for child in deviations.into_iter().rev() {
            stack.push((child, budget - 1));
        }
        stack.push((advance(&cfg, &h, prescribed)?, budget));
    }
    Ok(SpeVerdict::Verified {
        checked,
        value: root_value,
    })
}

/// One subgame-perfect value of the truncated game with a play attaining it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeOutcome {
    pub value: HistoryValue,
    pub play: History,
}

pub const DEFAULT_NODE_BUDGET: usize = 10_000_000;

/// All subgame-perfect value vectors of the game truncated at `depth`,
/// with moves restricted to `grid`.
pub fn brute_force_spe(
    cfg: &PngConfig,
    grid: &MoveGrid,
    depth: usize,
    budget: usize,
) -> Result<Vec<SpeOutcome>, PngError> {
    let mut cfg = cfg.clone();
    cfg.max_depth = depth;
    cfg.validate()?;
    let mut search = Search {
        cfg: &cfg,
        grid,
        ev: Evaluator::new(cfg.concept),
        nodes: 0,
        budget,
    };
    let mut out = search.solve(History::new(&cfg))?;
    out.sort_by(|a, b| a.value.0.cmp(&b.value.0));
    Ok(out)
}

struct Search<'a> {
    cfg: &'a PngConfig,
    grid: &'a MoveGrid,
    ev: Evaluator,
    nodes: usize,
    budget: usize,
}

impl Search<'_> {
    fn solve(&mut self, h: History) -> Result<Vec<SpeOutcome>, PngError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(PngError::Budget(self.budget));
        }
        if h.is_terminal() {
            let value = history_value_with(self.cfg, &h, &self.ev)?;
            return Ok(vec![SpeOutcome { value, play: h }]);
        }
        let me = h.to_move();
        let mut children = Vec::new();
        for m in enumerate_moves(self.cfg, &h, self.grid) {
            children.push(self.solve(advance(self.cfg, &h, m)?)?);
        }
        // A continuation is sustainable when every alternative can be
        // answered with its worst equilibrium for the mover.
        let worst: Vec<&Payoff> = children
            .iter()
            .map(|c| c.iter().map(|o| o.value.get(me)).min().expect("nonempty"))
            .collect();
        let mut out: Vec<SpeOutcome> = Vec::new();
        for (k, child) in children.iter().enumerate() {
            let threat = worst
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .map(|(_, w)| *w)
                .max();
            for o in child {
                let ok = threat.is_none_or(|t| o.value.get(me) >= t);
                if ok && !out.iter().any(|x| x.value == o.value) {
                    out.push(o.clone());
                }
            }
        }
        Ok(out)
    }
}
