//! Acceptable solution concepts, risk-averse expected values and game classification.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::game::{maximal_outcomes, NormalFormGame, PayoffVector, Player, StrategyProfile};

/// Both concepts only ever return outcomes that survive iterated elimination
/// of strictly dominated strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SolutionConcept {
    /// Every surviving outcome.
    Iesds,
    /// Pure Nash equilibria of the reduced game; all survivors if there are none.
    #[default]
    PureNashWithinIesds,
}

impl fmt::Display for SolutionConcept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolutionConcept::Iesds => "iesds",
            SolutionConcept::PureNashWithinIesds => "nash",
        })
    }
}

impl FromStr for SolutionConcept {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "iesds" => Ok(SolutionConcept::Iesds),
            "nash" | "pure-nash" | "pure_nash_within_iesds" => Ok(SolutionConcept::PureNashWithinIesds),
            other => Err(format!("unknown solution concept `{other}` (expected iesds or nash)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Elimination {
    pub round: usize,
    pub player: Player,
    pub eliminated: usize,
    pub dominator: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IesdsResult {
    /// Surviving strategy indices per player, ascending.
    pub surviving: [Vec<usize>; 2],
    pub trace: Vec<Elimination>,
}

impl IesdsResult {
    pub fn surviving(&self, p: Player) -> &[usize] {
        &self.surviving[p.index()]
    }

    pub fn profiles(&self) -> Vec<StrategyProfile> {
        let mut out = Vec::new();
        for &r in &self.surviving[0] {
            for &c in &self.surviving[1] {
                out.push(StrategyProfile::new(r, c));
            }
        }
        out
    }

    /// The surviving sub-game as a game in its own right.
    pub fn reduced_game(&self, g: &NormalFormGame) -> NormalFormGame {
        let rows = &self.surviving[0];
        let cols = &self.surviving[1];
        NormalFormGame::new(
            g.player_names().clone(),
            rows.iter().map(|&r| g.strategy_label(Player::Row, r).to_string()).collect(),
            cols.iter().map(|&c| g.strategy_label(Player::Col, c).to_string()).collect(),
            rows.iter()
                .map(|&r| {
                    cols.iter()
                        .map(|&c| g.payoff(StrategyProfile::new(r, c)).clone())
                        .collect()
                })
                .collect(),
        )
        .expect("a reduction of a valid game is valid")
    }
}

/// `a` strictly beats `b` for `p` against every opponent strategy in `against`.
pub fn strictly_dominates(
    g: &NormalFormGame,
    p: Player,
    a: usize,
    b: usize,
    against: &[usize],
) -> bool {
    against.iter().all(|&o| {
        g.payoff_of(p, StrategyProfile::from_player(p, a, o))
            > g.payoff_of(p, StrategyProfile::from_player(p, b, o))
    })
}

/// `a` is at least as good as `b` everywhere in `against` and better somewhere.
pub fn weakly_dominates(
    g: &NormalFormGame,
    p: Player,
    a: usize,
    b: usize,
    against: &[usize],
) -> bool {
    let mut strict = false;
    for &o in against {
        let ua = g.payoff_of(p, StrategyProfile::from_player(p, a, o));
        let ub = g.payoff_of(p, StrategyProfile::from_player(p, b, o));
        if ua < ub {
            return false;
        }
        strict |= ua > ub;
    }
    strict
}

/// Iterated elimination of strictly dominated pure strategies.
///
/// Each round removes, for both players at once, every strategy strictly
/// dominated within the current reduced game.
pub fn iesds(g: &NormalFormGame) -> IesdsResult {
    let mut surviving: [Vec<usize>; 2] = [
        (0..g.rows()).collect(),
        (0..g.cols()).collect(),
    ];
    let mut trace = Vec::new();
    let mut round = 0;
    loop {
        round += 1;
        let mut removed: [Vec<usize>; 2] = [Vec::new(), Vec::new()];
        let mut records = Vec::new();
        for p in Player::BOTH {
            let own = &surviving[p.index()];
            let opp = &surviving[p.other().index()];
            let dominated: Vec<usize> = own
                .iter()
                .copied()
                .filter(|&b| own.iter().any(|&a| a != b && strictly_dominates(g, p, a, b, opp)))
                .collect();
            for &b in &dominated {
                // Name a dominator that itself survives this round when one exists.
                let dominators: Vec<usize> = own
                    .iter()
                    .copied()
                    .filter(|&a| a != b && strictly_dominates(g, p, a, b, opp))
                    .collect();
                let dominator = dominators
                    .iter()
                    .copied()
                    .find(|a| !dominated.contains(a))
                    .unwrap_or(dominators[0]);
                records.push(Elimination {
                    round,
                    player: p,
                    eliminated: b,
                    dominator,
                });
            }
            removed[p.index()] = dominated;
        }
        if records.is_empty() {
            break;
        }
        for p in Player::BOTH {
            surviving[p.index()].retain(|s| !removed[p.index()].contains(s));
        }
        trace.extend(records);
    }
    IesdsResult { surviving, trace }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NashEquilibrium {
    pub profile: StrategyProfile,
    /// Each player's strategy is the unique best response.
    pub strict: bool,
}

fn nash_within(g: &NormalFormGame, rows: &[usize], cols: &[usize]) -> Vec<NashEquilibrium> {
    let mut out = Vec::new();
    for &r in rows {
        for &c in cols {
            let here = g.payoff(StrategyProfile::new(r, c));
            let mut strict = true;
            let mut stable = true;
            for &r2 in rows.iter().filter(|&&x| x != r) {
                let alt = &g.payoff(StrategyProfile::new(r2, c))[Player::Row];
                if alt > &here[Player::Row] {
                    stable = false;
                } else if alt == &here[Player::Row] {
                    strict = false;
                }
            }
            for &c2 in cols.iter().filter(|&&x| x != c) {
                let alt = &g.payoff(StrategyProfile::new(r, c2))[Player::Col];
                if alt > &here[Player::Col] {
                    stable = false;
                } else if alt == &here[Player::Col] {
                    strict = false;
                }
            }
            if stable {
                out.push(NashEquilibrium {
                    profile: StrategyProfile::new(r, c),
                    strict,
                });
            }
        }
    }
    out
}

/// All pure Nash equilibria of the full game.
pub fn pure_nash(g: &NormalFormGame) -> Vec<NashEquilibrium> {
    let rows: Vec<usize> = (0..g.rows()).collect();
    let cols: Vec<usize> = (0..g.cols()).collect();
    nash_within(g, &rows, &cols)
}

/// The solution set: a nonempty list of outcomes in row-major order.
pub fn solution(g: &NormalFormGame, concept: SolutionConcept) -> Vec<StrategyProfile> {
    let reduced = iesds(g);
    match concept {
        SolutionConcept::Iesds => reduced.profiles(),
        SolutionConcept::PureNashWithinIesds => {
            let ne = nash_within(g, reduced.surviving(Player::Row), reduced.surviving(Player::Col));
            if ne.is_empty() {
                reduced.profiles()
            } else {
                ne.into_iter().map(|e| e.profile).collect()
            }
        }
    }
}

/// Risk-averse values: for each player, the best over own solution strategies
/// of the worst over the opponent's solution strategies.
pub fn expected_value(g: &NormalFormGame, concept: SolutionConcept) -> PayoffVector {
    values_of_solution(g, &solution(g, concept))
}

pub fn values_of_solution(g: &NormalFormGame, sol: &[StrategyProfile]) -> PayoffVector {
    let mut out = PayoffVector::default();
    for p in Player::BOTH {
        let mut own: Vec<usize> = sol.iter().map(|s| s.get(p)).collect();
        let mut opp: Vec<usize> = sol.iter().map(|s| s.get(p.other())).collect();
        own.sort_unstable();
        own.dedup();
        opp.sort_unstable();
        opp.dedup();
        out[p] = own
            .iter()
            .map(|&a| {
                opp.iter()
                    .map(|&o| g.payoff_of(p, StrategyProfile::from_player(p, a, o)).clone())
                    .min()
                    .expect("solution strategies are nonempty")
            })
            .max()
            .expect("solution strategies are nonempty");
    }
    out
}

/// Own solution strategy pairs attaining the maxmin, used in reports.
pub fn maxmin_profile(g: &NormalFormGame, concept: SolutionConcept) -> StrategyProfile {
    let sol = solution(g, concept);
    let values = values_of_solution(g, &sol);
    let pick = |p: Player| {
        let mut own: Vec<usize> = sol.iter().map(|s| s.get(p)).collect();
        let mut opp: Vec<usize> = sol.iter().map(|s| s.get(p.other())).collect();
        own.sort_unstable();
        own.dedup();
        opp.sort_unstable();
        opp.dedup();
        own.into_iter()
            .find(|&a| {
                opp.iter()
                    .map(|&o| g.payoff_of(p, StrategyProfile::from_player(p, a, o)))
                    .min()
                    == Some(&values[p])
            })
            .expect("maxmin is attained")
    };
    StrategyProfile::new(pick(Player::Row), pick(Player::Col))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ClassLabel {
    PerfectlySolved,
    PerfectlySolvable,
    OptimallySolvable,
    Solved,
    None,
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassLabel::PerfectlySolved => "PERFECTLY_SOLVED",
            ClassLabel::PerfectlySolvable => "PERFECTLY_SOLVABLE",
            ClassLabel::OptimallySolvable => "OPTIMALLY_SOLVABLE",
            ClassLabel::Solved => "SOLVED",
            ClassLabel::None => "NONE",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub label: ClassLabel,
    pub solved: bool,
    pub optimally_solvable: bool,
    pub perfectly_solvable: bool,
    pub solution: Vec<StrategyProfile>,
}

pub fn classify(g: &NormalFormGame, concept: SolutionConcept) -> Classification {
    let sol = solution(g, concept);
    let maximal = maximal_outcomes(g);
    let solved = sol.len() == 1;
    let optimally_solvable = sol.iter().all(|&p| maximal.contains(p));
    let perfectly_solvable =
        optimally_solvable && sol.iter().all(|&p| g.payoff(p) == g.payoff(sol[0]));
    let label = if solved && perfectly_solvable {
        ClassLabel::PerfectlySolved
    } else if perfectly_solvable {
        ClassLabel::PerfectlySolvable
    } else if optimally_solvable {
        ClassLabel::OptimallySolvable
    } else if solved {
        ClassLabel::Solved
    } else {
        ClassLabel::None
    };
    Classification {
        label,
        solved,
        optimally_solvable,
        perfectly_solvable,
        solution: sol,
    }
}
