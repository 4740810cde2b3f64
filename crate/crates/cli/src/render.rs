//! Human-readable reports. Exact values come first, decimals in parentheses.

use std::fmt::Write;

use num_traits::Zero;
use preplay_api::*;
use preplay_core::png::HistoryValue;
use preplay_core::{PayoffVector, Value};

fn value(v: &Value) -> String {
    if v.real.is_integer() {
        v.human()
    } else {
        format!("{} ({:.3})", v.human(), v.approx())
    }
}

fn vector(p: &PayoffVector) -> String {
    let exact = p.human();
    if p.0.iter().all(|v| v.real.is_integer()) {
        exact
    } else {
        format!("{exact} ({:.3}, {:.3})", p.0[0].approx(), p.0[1].approx())
    }
}

fn history_value(h: &HistoryValue) -> String {
    match h.as_vector() {
        Some(v) => vector(&v),
        None => h.human(),
    }
}

/// Renders an offer's amount with ε superscripts.
fn offer(text: &str) -> String {
    let human_part = |part: &str| match part.trim().rsplit_once('/') {
        Some((amount, target)) => match amount.trim().parse::<Value>() {
            Ok(v) => format!("{} / {}", v.human(), target.trim()),
            Err(_) => part.trim().to_string(),
        },
        None => part.trim().to_string(),
    };
    match text.split_once(':') {
        Some((head, rest)) => {
            let parts: Vec<String> = rest.split('|').map(human_part).collect();
            format!("{} : {}", head.trim(), parts.join(" | "))
        }
        None => text.to_string(),
    }
}

fn indent(block: &str) -> String {
    block.lines().map(|l| format!("    {l}\n")).collect()
}

fn outcomes(out: &mut String, label: &str, list: &[OutcomeView]) {
    let items: Vec<String> = list.iter().map(|o| format!("{} {}", o.profile, vector(&o.payoff))).collect();
    let _ = writeln!(out, "{label}: {}", if items.is_empty() { "none".into() } else { items.join(", ") });
}

pub fn solve(r: &SolveReport) -> String {
    let mut out = String::new();
    out.push_str(&r.game.to_human());
    let _ = writeln!(out, "\nconcept: {}", r.concept);
    if r.eliminations.is_empty() {
        out.push_str("elimination: nothing is strictly dominated\n");
    }
    for e in &r.eliminations {
        let _ = writeln!(
            out,
            "elimination round {}: {:?} drops {} (dominated by {})",
            e.round, e.player, e.eliminated, e.dominated_by
        );
    }
    let _ = writeln!(out, "surviving: rows {{{}}}, cols {{{}}}", r.surviving[0].join(", "), r.surviving[1].join(", "));
    let nash: Vec<String> = r
        .nash
        .iter()
        .map(|n| format!("{} {}{}", n.profile, vector(&n.payoff), if n.strict { " strict" } else { "" }))
        .collect();
    let _ = writeln!(out, "pure nash: {}", if nash.is_empty() { "none".into() } else { nash.join(", ") });
    outcomes(&mut out, "solution", &r.solution);
    let _ = writeln!(out, "expected values: {}", vector(&r.expected_values));
    let _ = writeln!(out, "maxmin: {}", r.maxmin_profile);
    outcomes(&mut out, "maximal", &r.maximal);
    let _ = writeln!(out, "maximal total: {}", value(&r.maximal_sum));
    let _ = writeln!(out, "classification: {}", r.classification);
    out
}

pub fn transform(r: &TransformReport) -> String {
    let mut out = String::new();
    for (i, s) in r.steps.iter().enumerate() {
        let _ = write!(out, "step {}: {}", i + 1, offer(&s.offer));
        if let Some(f) = s.feasibility {
            let _ = write!(out, " [{}]", serde_json::to_value(f).unwrap().as_str().unwrap_or_default());
        }
        let _ = writeln!(out, ", values {}", vector(&s.expected_values));
        out.push_str(&indent(&s.game.to_human()));
    }
    let _ = writeln!(out, "classification: {}", r.classification);
    outcomes(&mut out, "solution", &r.solution);
    out.push_str("\nfinal game:\n");
    out.push_str(&r.text);
    out
}

pub fn best_offer(r: &BestOfferReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "proposer: {:?}", r.proposer);
    let _ = writeln!(out, "decision: {}", r.decision);
    if let Some(o) = &r.offer {
        let _ = writeln!(out, "offer: {}", offer(o));
    }
    let _ = writeln!(out, "value: {} (currently {})", value(&r.value), value(&r.current_value));
    for c in &r.candidates {
        let _ = writeln!(
            out,
            "  target {}: pay {}, induced {}, value {}, recipient gets {}",
            c.target,
            value(&c.required_payment),
            c.induced_equilibrium,
            value(&c.resulting_value),
            value(&c.recipient_payoff)
        );
    }
    out
}

pub fn negotiate(r: &NegotiateReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "first mover: {:?}", r.first_mover);
    for s in &r.ira_steps {
        match &s.offer {
            Some(o) if s.decision != "PASS" => {
                let vacuous = if s.decision == "VACUOUS_OFFER" { " (vacuous)" } else { "" };
                let _ = writeln!(
                    out,
                    "round {}: {:?} offers {}{vacuous}, value {}",
                    s.round,
                    s.proposer,
                    offer(o),
                    value(&s.value_after)
                );
                out.push_str(&indent(&s.game.to_human()));
            }
            _ => {
                let _ = writeln!(out, "round {}: {:?} passes, value {}", s.round, s.proposer, value(&s.value_after));
            }
        }
    }
    if !r.converged {
        out.push_str("stopped at the round cap\n");
    }
    if let Some(p) = &r.play {
        for (i, m) in p.moves.iter().enumerate() {
            let _ = writeln!(out, "{:>3}. {}: {}", i + 1, m.player, offer(&m.text));
        }
        let ending = match p.ending {
            Some(e) => serde_json::to_value(e).unwrap().to_string(),
            None => "none".into(),
        };
        let _ = writeln!(out, "ending: {ending}{}", if p.truncated { " (depth cap)" } else { "" });
        let _ = writeln!(out, "length: {}", p.moves.len());
        let _ = writeln!(out, "value: {}", history_value(&p.value));
    }
    if let Some(g) = &r.final_game {
        out.push_str("\nfinal game:\n");
        out.push_str(&g.to_human());
        if let Some(v) = &r.final_values {
            let _ = writeln!(out, "values: {}", vector(v));
        }
        if let Some(c) = r.classification {
            let _ = writeln!(out, "classification: {c}");
        }
        outcomes(&mut out, "solution", &r.solution);
        out.push('\n');
        out.push_str(&g.to_text());
    }
    out
}

pub fn bargain(r: &BargainReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "maximal outcome: {}", r.outcome);
    let _ = writeln!(out, "d: {}", value(&r.d));
    let _ = writeln!(out, "deltaA: {}, deltaB: {} (first proposer {:?})", r.delta_a, r.delta_b, r.first_proposer);
    let pair = |v: &[Value; 2], a: &[f64; 2]| format!("({}, {}) ({:.3}, {:.3})", v[0].human(), v[1].human(), a[0], a[1]);
    let _ = writeln!(out, "x*: {}", pair(&r.x_star, &r.x_star_approx));
    let _ = writeln!(out, "y*: {}", pair(&r.y_star, &r.y_star_approx));
    out.push_str("predicted play:\n");
    for (i, m) in r.predicted_play.iter().enumerate() {
        let _ = writeln!(out, "{:>3}. {}: {}", i + 1, m.player, offer(&m.text));
    }
    let _ = writeln!(out, "predicted value: {}", history_value(&r.predicted_value));
    out
}

pub fn verify(r: &VerifyReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", if r.verified { "VERIFIED" } else { "DEVIATION" });
    if let (Some(n), Some(v)) = (r.checked, &r.value) {
        let _ = writeln!(out, "histories checked: {n}");
        let _ = writeln!(out, "value: {}", history_value(v));
    }
    if let Some(d) = &r.deviation {
        let _ = writeln!(out, "at: [{}]", d.history.join("; "));
        let _ = writeln!(out, "deviator: {:?}", d.deviator);
        let _ = writeln!(out, "prescribed: {} -> {}", d.prescribed, history_value(&d.prescribed_value));
        let _ = writeln!(out, "deviation: {} -> {}", d.deviation, history_value(&d.deviation_value));
        if let Some(g) = &d.gain {
            if !g.real.is_zero() || g.has_eps() {
                let _ = writeln!(out, "gain: {}", value(g));
            }
        }
    }
    out.push_str(&r.summary);
    if !r.summary.ends_with('\n') {
        out.push('\n');
    }
    out
}

pub fn replay(r: &ReplayReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "moves replayed: {}", r.moves);
    let _ = writeln!(out, "matches recorded: {}", if r.matches_recorded { "yes" } else { "NO" });
    match &r.final_game {
        Some(g) => {
            out.push_str(&g.to_human());
            out.push('\n');
            out.push_str(&g.to_text());
        }
        None => out.push_str("no agreement\n"),
    }
    out
}

pub fn generated(r: &GenReport) -> String {
    let mut out = format!("# seed {}\n", r.seed);
    for (i, g) in r.games.iter().enumerate() {
        let _ = writeln!(out, "\n# game {}", i + 1);
        out.push_str(&g.to_text());
    }
    out
}
