//! Plain-text tables over run records, one section per experiment kind.

use crate::config::{by_kind, ExperimentConfig, ExperimentKind};
use crate::record::RunRecord;

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn num(v: f64) -> String {
    format!("{v:.12}")
}

fn sci(v: f64) -> String {
    format!("{v:.3e}")
}

fn parameters(c: &ExperimentConfig) -> String {
    let mut parts = vec![format!("seed={}", c.seed)];
    let mut push = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            parts.push(format!("{k}={v}"));
        }
    };
    push("trials", c.trials.map(|v| v.to_string()));
    push("theta", c.theta.clone());
    push("metric", c.metric.map(|m| m.to_string()));
    push("epsilon", c.epsilon.as_ref().map(|e| e.to_string()));
    push("n", c.n.map(|v| v.to_string()));
    push("inputs", c.inputs.map(|v| v.to_string()));
    push("sites", c.sites.map(|v| v.to_string()));
    push("x", c.x.as_ref().map(|v| v.to_string()));
    push("p", c.p.as_ref().map(|v| v.to_string()));
    push("strategy", c.strategy.as_ref().map(|v| v.display().to_string()));
    parts.join(" ")
}

fn row(r: &RunRecord) -> (Vec<&'static str>, Vec<String>) {
    let a = &r.aggregate;
    let c = &r.config;
    match c.kind {
        ExperimentKind::GameOptimize => (
            vec!["n", "|X|", "max G", "n/|X|", "verdict"],
            vec![
                c.n.map_or("-".into(), |v| v.to_string()),
                c.inputs.map_or("-".into(), |v| v.to_string()),
                num(a.max),
                num(a.bound.unwrap_or(f64::NAN)),
                verdict(r.pass).into(),
            ],
        ),
        ExperimentKind::GameFinite => (
            vec![
                "parameters",
                "trials",
                "max G",
                "max excess over n/|X|",
                "verdict",
            ],
            vec![
                parameters(c),
                a.count.to_string(),
                num(a.max),
                a.extras
                    .get("max-excess")
                    .and_then(|v| v.as_f64())
                    .map_or("-".into(), sci),
                verdict(r.pass).into(),
            ],
        ),
        ExperimentKind::CcrCheck | ExperimentKind::GnsDemo => (
            vec!["parameters", "statistic", "max", "bound", "verdict"],
            vec![
                parameters(c),
                a.statistic.clone(),
                sci(a.max),
                a.bound.map_or("-".into(), sci),
                verdict(r.pass).into(),
            ],
        ),
        ExperimentKind::ChainRoundtrip => (
            vec!["parameters", "statistic", "max", "bound", "verdict"],
            vec![
                parameters(c),
                a.statistic.clone(),
                num(a.max),
                a.bound.map_or("-".into(), num),
                verdict(r.pass).into(),
            ],
        ),
        _ => (
            vec![
                "parameters",
                "statistic",
                "min",
                "expected",
                "max deviation",
                "verdict",
            ],
            vec![
                parameters(c),
                a.statistic.clone(),
                num(a.min),
                a.bound.map_or("-".into(), num),
                sci(a.max_deviation),
                verdict(r.pass).into(),
            ],
        ),
    }
}

fn render_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<String>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.iter().map(|h| h.to_string()).collect());
    out += &line(widths.iter().map(|&w| "-".repeat(w)).collect());
    for r in rows {
        out += &line(r.clone());
    }
    out
}

/// Sections in experiment-kind order, records in input order within each.
/// No records, no output.
pub fn summarize(records: &[RunRecord]) -> String {
    let groups = by_kind(records, |r| r.config.kind);
    let mut out = String::new();
    for (kind, recs) in groups {
        if !out.is_empty() {
            out.push('\n');
        }
        out += &format!("## {kind}\n\n");
        let header = row(recs[0]).0;
        let rows: Vec<Vec<String>> = recs.iter().map(|r| row(r).1).collect();
        out += &render_table(&header, &rows);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::record::{Aggregate, TrialResult};

    fn record(kind: ExperimentKind, pass: bool) -> RunRecord {
        let mut c = ExperimentConfig::new(kind).resolve().unwrap();
        c.seed = 7;
        let trials = vec![TrialResult::new(0, 0.6666666666666666, pass)];
        let mut a = Aggregate::over("G", &trials);
        a.bound = Some(2.0 / 3.0);
        RunRecord::new(c, trials, a, pass)
    }

    #[test]
    fn empty_is_empty() {
        assert_eq!(summarize(&[]), "");
    }

    #[test]
    fn optimize_row_columns() {
        let s = summarize(&[record(ExperimentKind::GameOptimize, true)]);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "## game-optimize");
        let header: Vec<&str> = lines[2]
            .split("  ")
            .filter(|c| !c.is_empty())
            .map(str::trim)
            .collect();
        assert_eq!(header, ["n", "|X|", "max G", "n/|X|", "verdict"]);
        assert_eq!(lines.len(), 5);
        assert!(lines[4].starts_with("2 "));
        assert!(lines[4].ends_with("PASS"));
    }

    #[test]
    fn sections_follow_kind_order() {
        let s = summarize(&[
            record(ExperimentKind::ChainRoundtrip, true),
            record(ExperimentKind::GameOptimize, false),
            record(ExperimentKind::CcrCheck, true),
            record(ExperimentKind::GameOptimize, true),
        ]);
        let sections: Vec<&str> = s.lines().filter(|l| l.starts_with("## ")).collect();
        assert_eq!(
            sections,
            ["## ccr-check", "## game-optimize", "## chain-roundtrip"]
        );
        assert!(s.contains("FAIL"));
    }
}
