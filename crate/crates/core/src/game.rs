//! Two-player normal-form games, their text and JSON encodings, and maximal outcomes.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::Value;

/// A seat at the table. The row player is listed first everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    Row,
    Col,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::Row, Player::Col];

    pub fn index(self) -> usize {
        match self {
            Player::Row => 0,
            Player::Col => 1,
        }
    }

    pub fn other(self) -> Player {
        match self {
            Player::Row => Player::Col,
            Player::Col => Player::Row,
        }
    }
}

/// One payoff per player.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PayoffVector(pub [Value; 2]);

impl PayoffVector {
    pub fn new(row: Value, col: Value) -> Self {
        PayoffVector([row, col])
    }

    /// `own` for `p`, `other` for the opponent.
    pub fn from_player(p: Player, own: Value, other: Value) -> Self {
        match p {
            Player::Row => PayoffVector([own, other]),
            Player::Col => PayoffVector([other, own]),
        }
    }

    pub fn sum(&self) -> Value {
        &self.0[0] + &self.0[1]
    }

    /// `self` weakly improves on `other` for both players and strictly for one.
    pub fn pareto_dominates(&self, other: &PayoffVector) -> bool {
        let weakly = self.0[0] >= other.0[0] && self.0[1] >= other.0[1];
        weakly && self != other
    }

    pub fn human(&self) -> String {
        format!("({}, {})", self.0[0].human(), self.0[1].human())
    }
}

impl Index<Player> for PayoffVector {
    type Output = Value;
    fn index(&self, p: Player) -> &Value {
        &self.0[p.index()]
    }
}

impl IndexMut<Player> for PayoffVector {
    fn index_mut(&mut self, p: Player) -> &mut Value {
        &mut self.0[p.index()]
    }
}

impl fmt::Display for PayoffVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0[0], self.0[1])
    }
}

/// A pure strategy profile, by strategy index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StrategyProfile {
    pub row: usize,
    pub col: usize,
}

impl StrategyProfile {
    pub fn new(row: usize, col: usize) -> Self {
        StrategyProfile { row, col }
    }

    pub fn get(&self, p: Player) -> usize {
        match p {
            Player::Row => self.row,
            Player::Col => self.col,
        }
    }

    /// Builds the profile where `p` plays `own` and the opponent plays `opp`.
    pub fn from_player(p: Player, own: usize, opp: usize) -> Self {
        match p {
            Player::Row => StrategyProfile::new(own, opp),
            Player::Col => StrategyProfile::new(opp, own),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{player}: at least one strategy is required")]
    NoStrategies { player: String },
    #[error("payoff matrix has {found} rows, expected {expected}")]
    RowCount { expected: usize, found: usize },
    #[error("payoff row {row} has {found} cells, expected {expected}")]
    ColCount { row: usize, expected: usize, found: usize },
    #[error("{player}: duplicate strategy label `{label}`")]
    DuplicateLabel { player: String, label: String },
    #[error("players must have distinct names, got `{0}` twice")]
    DuplicatePlayer(String),
    #[error("label `{0}` must be non-empty and free of whitespace, `|`, `/`, `:`")]
    BadLabel(String),
    #[error("cell ({row},{col}): {message}")]
    BadPayoff { row: usize, col: usize, message: String },
}

/// Every problem found while checking a game description.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid game: {}", .violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

/// The structurally equivalent JSON encoding. Payoffs are value strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawGame {
    pub players: [String; 2],
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub payoffs: Vec<Vec<[String; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGame", into = "RawGame")]
pub struct NormalFormGame {
    players: [String; 2],
    strategies: [Vec<String>; 2],
    payoffs: Vec<Vec<PayoffVector>>,
}

impl TryFrom<RawGame> for NormalFormGame {
    type Error = ValidationReport;
    fn try_from(raw: RawGame) -> Result<Self, Self::Error> {
        NormalFormGame::from_raw(&raw)
    }
}

impl From<NormalFormGame> for RawGame {
    fn from(g: NormalFormGame) -> Self {
        g.to_raw()
    }
}

fn label_ok(label: &str) -> bool {
    !label.is_empty() && !label.chars().any(|c| c.is_whitespace() || "|/:".contains(c))
}

impl NormalFormGame {
    /// Checks every structural invariant and collects all violations.
    pub fn new(
        players: [String; 2],
        rows: Vec<String>,
        cols: Vec<String>,
        payoffs: Vec<Vec<PayoffVector>>,
    ) -> Result<Self, ValidationReport> {
        let mut violations = Vec::new();
        check_structure(&players, &rows, &cols, &mut violations);
        if payoffs.len() != rows.len() {
            violations.push(Violation::RowCount {
                expected: rows.len(),
                found: payoffs.len(),
            });
        }
        for (r, line) in payoffs.iter().enumerate() {
            if line.len() != cols.len() {
                violations.push(Violation::ColCount {
                    row: r,
                    expected: cols.len(),
                    found: line.len(),
                });
            }
        }
        if !violations.is_empty() {
            return Err(ValidationReport { violations });
        }
        Ok(NormalFormGame {
            players,
            strategies: [rows, cols],
            payoffs,
        })
    }

    /// Builds a game from integer payoffs with default player names `Row`/`Col`.
    pub fn from_ints(rows: &[&str], cols: &[&str], payoffs: &[&[(i64, i64)]]) -> Self {
        let matrix = payoffs
            .iter()
            .map(|line| {
                line.iter()
                    .map(|&(a, b)| PayoffVector::new(a.into(), b.into()))
                    .collect()
            })
            .collect();
        NormalFormGame::new(
            ["Row".into(), "Col".into()],
            rows.iter().map(|s| s.to_string()).collect(),
            cols.iter().map(|s| s.to_string()).collect(),
            matrix,
        )
        .expect("well-formed literal game")
    }

    pub fn player_name(&self, p: Player) -> &str {
        &self.players[p.index()]
    }

    pub fn player_names(&self) -> &[String; 2] {
        &self.players
    }

    pub fn player_by_name(&self, name: &str) -> Option<Player> {
        Player::BOTH.into_iter().find(|&p| self.player_name(p) == name)
    }

    pub fn strategies(&self, p: Player) -> &[String] {
        &self.strategies[p.index()]
    }

    pub fn num_strategies(&self, p: Player) -> usize {
        self.strategies[p.index()].len()
    }

    pub fn rows(&self) -> usize {
        self.strategies[0].len()
    }

    pub fn cols(&self) -> usize {
        self.strategies[1].len()
    }

    pub fn strategy_index(&self, p: Player, label: &str) -> Option<usize> {
        self.strategies(p).iter().position(|s| s == label)
    }

    pub fn strategy_label(&self, p: Player, idx: usize) -> &str {
        &self.strategies(p)[idx]
    }

    pub fn payoff(&self, profile: StrategyProfile) -> &PayoffVector {
        &self.payoffs[profile.row][profile.col]
    }

    pub fn payoff_of(&self, p: Player, profile: StrategyProfile) -> &Value {
        &self.payoff(profile)[p]
    }

    pub(crate) fn payoff_mut(&mut self, profile: StrategyProfile) -> &mut PayoffVector {
        &mut self.payoffs[profile.row][profile.col]
    }

    pub fn matrix(&self) -> &[Vec<PayoffVector>] {
        &self.payoffs
    }

    /// All profiles in row-major order.
    pub fn profiles(&self) -> impl Iterator<Item = StrategyProfile> + '_ {
        let cols = self.cols();
        (0..self.rows()).flat_map(move |r| (0..cols).map(move |c| StrategyProfile::new(r, c)))
    }

    pub fn profile_label(&self, profile: StrategyProfile) -> String {
        format!(
            "({},{})",
            self.strategy_label(Player::Row, profile.row),
            self.strategy_label(Player::Col, profile.col)
        )
    }

    pub fn to_raw(&self) -> RawGame {
        RawGame {
            players: self.players.clone(),
            rows: self.strategies[0].clone(),
            cols: self.strategies[1].clone(),
            payoffs: self
                .payoffs
                .iter()
                .map(|line| {
                    line.iter()
                        .map(|p| [p.0[0].to_string(), p.0[1].to_string()])
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_raw(raw: &RawGame) -> Result<Self, ValidationReport> {
        let mut violations = Vec::new();
        let mut matrix = Vec::with_capacity(raw.payoffs.len());
        for (r, line) in raw.payoffs.iter().enumerate() {
            let mut cells = Vec::with_capacity(line.len());
            for (c, [a, b]) in line.iter().enumerate() {
                match (a.parse::<Value>(), b.parse::<Value>()) {
                    (Ok(a), Ok(b)) => cells.push(PayoffVector::new(a, b)),
                    (Err(e), _) | (_, Err(e)) => violations.push(Violation::BadPayoff {
                        row: r,
                        col: c,
                        message: e.to_string(),
                    }),
                }
            }
            matrix.push(cells);
        }
        match NormalFormGame::new(
            raw.players.clone(),
            raw.rows.clone(),
            raw.cols.clone(),
            matrix,
        ) {
            Ok(g) if violations.is_empty() => Ok(g),
            Ok(_) => Err(ValidationReport { violations }),
            Err(mut report) => {
                violations.append(&mut report.violations);
                Err(ValidationReport { violations })
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_raw()).expect("game serializes")
    }

    /// Parses either the line-oriented text format or the JSON encoding.
    pub fn parse(input: &str) -> Result<Self, ValidationReport> {
        if input.trim_start().starts_with('{') {
            let raw: RawGame = serde_json::from_str(input).map_err(|e| ValidationReport {
                violations: vec![Violation::Syntax {
                    line: e.line(),
                    message: e.to_string(),
                }],
            })?;
            return NormalFormGame::from_raw(&raw);
        }
        parse_text(input)
    }

    /// Canonical text form. Cells are padded to their column width so that
    /// columns line up; the last column is never padded.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("players {} {}\n", self.players[0], self.players[1]));
        out.push_str(&format!("rows {}\n", self.strategies[0].join(" ")));
        out.push_str(&format!("cols {}\n", self.strategies[1].join(" ")));
        out.push_str("payoffs\n");
        let cells: Vec<Vec<String>> = self
            .payoffs
            .iter()
            .map(|line| line.iter().map(|p| format!("{} {}", p.0[0], p.0[1])).collect())
            .collect();
        let widths: Vec<usize> = (0..self.cols())
            .map(|c| cells.iter().map(|l| l[c].chars().count()).max().unwrap_or(0))
            .collect();
        for line in &cells {
            let last = line.len() - 1;
            let rendered: Vec<String> = line
                .iter()
                .enumerate()
                .map(|(c, cell)| {
                    if c == last {
                        cell.clone()
                    } else {
                        format!("{cell:<width$}", width = widths[c])
                    }
                })
                .collect();
            out.push_str(&rendered.join(" | "));
            out.push('\n');
        }
        out
    }

    /// Aligned matrix with report-style ε superscripts.
    pub fn to_human(&self) -> String {
        let mut header = vec![String::new()];
        header.extend(self.strategies[1].iter().cloned());
        let mut grid = vec![header];
        for (r, line) in self.payoffs.iter().enumerate() {
            let mut row = vec![self.strategies[0][r].clone()];
            row.extend(line.iter().map(|p| format!("{}, {}", p.0[0].human(), p.0[1].human())));
            grid.push(row);
        }
        let widths: Vec<usize> = (0..grid[0].len())
            .map(|c| grid.iter().map(|l| l[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for line in grid {
            let cells: Vec<String> = line
                .iter()
                .enumerate()
                .map(|(c, s)| {
                    let pad = widths[c] - s.chars().count();
                    format!("{s}{}", " ".repeat(pad))
                })
                .collect();
            out.push_str(cells.join(" | ").trim_end());
            out.push('\n');
        }
        out
    }
}

fn check_structure(
    players: &[String; 2],
    rows: &[String],
    cols: &[String],
    violations: &mut Vec<Violation>,
) {
    for name in players {
        if !label_ok(name) {
            violations.push(Violation::BadLabel(name.clone()));
        }
    }
    if players[0] == players[1] {
        violations.push(Violation::DuplicatePlayer(players[0].clone()));
    }
    for (player, labels) in players.iter().zip([rows, cols]) {
        if labels.is_empty() {
            violations.push(Violation::NoStrategies {
                player: player.clone(),
            });
        }
        for (i, label) in labels.iter().enumerate() {
            if !label_ok(label) {
                violations.push(Violation::BadLabel(label.clone()));
            }
            if labels[..i].contains(label) {
                violations.push(Violation::DuplicateLabel {
                    player: player.clone(),
                    label: label.clone(),
                });
            }
        }
    }
}

fn parse_text(input: &str) -> Result<NormalFormGame, ValidationReport> {
    let mut violations = Vec::new();
    let mut players: Option<[String; 2]> = None;
    let mut rows: Option<Vec<String>> = None;
    let mut cols: Option<Vec<String>> = None;
    let mut matrix: Vec<Vec<PayoffVector>> = Vec::new();
    let mut in_payoffs = false;
    let syntax = |line: usize, message: String| Violation::Syntax { line, message };

    for (n, raw_line) in input.lines().enumerate() {
        let line_no = n + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if in_payoffs {
            let mut cells = Vec::new();
            for (c, cell) in line.split('|').enumerate() {
                let parts: Vec<&str> = cell.split_whitespace().collect();
                if parts.len() != 2 {
                    violations.push(syntax(
                        line_no,
                        format!("cell {} must hold exactly two values, found `{}`", c + 1, cell.trim()),
                    ));
                    continue;
                }
                match (parts[0].parse::<Value>(), parts[1].parse::<Value>()) {
                    (Ok(a), Ok(b)) => cells.push(PayoffVector::new(a, b)),
                    (Err(e), _) | (_, Err(e)) => violations.push(syntax(line_no, e.to_string())),
                }
            }
            matrix.push(cells);
            continue;
        }
        let mut words = line.split_whitespace();
        let key = words.next().unwrap_or_default();
        let rest: Vec<String> = words.map(str::to_string).collect();
        match key {
            "players" => match <[String; 2]>::try_from(rest) {
                Ok(p) => players = Some(p),
                Err(_) => violations.push(syntax(line_no, "`players` takes exactly two names".into())),
            },
            "rows" => rows = Some(rest),
            "cols" => cols = Some(rest),
            "payoffs" if rest.is_empty() => in_payoffs = true,
            other => violations.push(syntax(line_no, format!("unexpected `{other}`"))),
        }
    }
    let players = players.unwrap_or_else(|| {
        violations.push(syntax(0, "missing `players` line".into()));
        ["Row".into(), "Col".into()]
    });
    let rows = rows.unwrap_or_else(|| {
        violations.push(syntax(0, "missing `rows` line".into()));
        Vec::new()
    });
    let cols = cols.unwrap_or_else(|| {
        violations.push(syntax(0, "missing `cols` line".into()));
        Vec::new()
    });
    if !in_payoffs {
        violations.push(syntax(0, "missing `payoffs` section".into()));
    }
    match NormalFormGame::new(players, rows, cols, matrix) {
        Ok(g) if violations.is_empty() => Ok(g),
        Ok(_) => Err(ValidationReport { violations }),
        Err(mut report) => {
            // Cell-count errors are consequences of syntax errors on the same lines.
            if violations.is_empty() {
                return Err(report);
            }
            report
                .violations
                .retain(|v| !matches!(v, Violation::ColCount { .. }));
            violations.append(&mut report.violations);
            Err(ValidationReport { violations })
        }
    }
}

/// The maximal outcomes of a game together with their common payoff sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaximalOutcomes {
    pub profiles: Vec<StrategyProfile>,
    pub sum: Value,
}

impl MaximalOutcomes {
    pub fn contains(&self, p: StrategyProfile) -> bool {
        self.profiles.contains(&p)
    }
}

/// Pareto optimal outcomes whose payoff sum is the largest among Pareto optimal outcomes.
pub fn maximal_outcomes(g: &NormalFormGame) -> MaximalOutcomes {
    let pareto: Vec<StrategyProfile> = g
        .profiles()
        .filter(|&p| !g.profiles().any(|q| g.payoff(q).pareto_dominates(g.payoff(p))))
        .collect();
    let sum = pareto
        .iter()
        .map(|&p| g.payoff(p).sum())
        .max()
        .expect("a finite game has a Pareto optimal outcome");
    let profiles = pareto
        .into_iter()
        .filter(|&p| g.payoff(p).sum() == sum)
        .collect();
    MaximalOutcomes { profiles, sum }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn text_example_round_trips_bytewise() {
        let text = "players Row Col\nrows R1 R2\ncols C1 C2 C3\npayoffs\n2 10 | 10 4 | 5 1\n6 0  | 4 4  | 6 3\n";
        let g = NormalFormGame::parse(text).unwrap();
        assert_eq!(g.to_text(), text);
        assert_eq!(g, fixtures::worked_example());
    }

    #[test]
    fn json_encoding_is_equivalent() {
        let g = fixtures::pd1();
        let json = g.to_json();
        assert_eq!(NormalFormGame::parse(&json).unwrap(), g);
    }

    #[test]
    fn validate_pd1_ok() {
        assert!(NormalFormGame::parse(&fixtures::pd1().to_text()).is_ok());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let text = "players Row Col\nrows A B\ncols X Y\npayoffs\n1 1 | 2 2 | 3 3\n4 4 | 5 5 | 6 6\n";
        let err = NormalFormGame::parse(text).unwrap_err();
        assert!(err
            .violations
            .iter()
            .all(|v| matches!(v, Violation::ColCount { expected: 2, found: 3, .. })));
        assert_eq!(err.violations.len(), 2);
    }

    #[test]
    fn duplicate_labels_are_reported() {
        let text = "players Row Col\nrows C C\ncols X\npayoffs\n1 1\n2 2\n";
        let err = NormalFormGame::parse(text).unwrap_err();
        assert_eq!(
            err.violations,
            vec![Violation::DuplicateLabel {
                player: "Row".into(),
                label: "C".into()
            }]
        );
    }

    #[test]
    fn unparsable_payoff_has_line_number() {
        let text = "players Row Col\nrows A\ncols X\npayoffs\n1 zz\n";
        let err = NormalFormGame::parse(text).unwrap_err();
        assert!(matches!(err.violations[0], Violation::Syntax { line: 5, .. }));
    }

    #[test]
    fn every_violation_is_listed() {
        let raw = RawGame {
            players: ["P".into(), "P".into()],
            rows: vec!["a".into(), "a".into()],
            cols: vec![],
            payoffs: vec![vec![["1".into(), "q".into()]]],
        };
        let err = NormalFormGame::from_raw(&raw).unwrap_err();
        assert!(err.violations.len() >= 4, "{err}");
    }

    #[test]
    fn maximal_outcome_examples() {
        let m = maximal_outcomes(&fixtures::pd1());
        assert_eq!(m.profiles, vec![StrategyProfile::new(0, 0)]);
        assert_eq!(m.sum, Value::from_int(8));

        let m = maximal_outcomes(&fixtures::pd2());
        assert_eq!(m.profiles, vec![StrategyProfile::new(0, 0)]);
        assert_eq!(m.sum, Value::from_int(8));

        let single = NormalFormGame::from_ints(&["a"], &["b"], &[&[(3, 4)]]);
        let m = maximal_outcomes(&single);
        assert_eq!(m.profiles, vec![StrategyProfile::new(0, 0)]);
        assert_eq!(m.sum, Value::from_int(7));
    }

    #[test]
    fn human_matrix_uses_superscripts() {
        let g = NormalFormGame::parse(
            "players R C\nrows R1\ncols C1 C2\npayoffs\n4-e 2+e | 1 1\n",
        )
        .unwrap();
        assert!(g.to_human().contains("4⁻, 2⁺"));
    }
}
