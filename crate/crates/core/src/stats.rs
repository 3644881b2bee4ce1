//! Agreement statistics between an automatic and a human grader.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Scores within this distance count as equal.
pub const EXACT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradePair {
    pub id: String,
    pub auto: f64,
    pub human: f64,
}

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("no grade pairs")]
    Empty,
    #[error("duplicate problem id {0:?}")]
    DuplicateId(String),
    #[error("grade for {id:?} is outside [0, 1]: {value}")]
    OutOfRange { id: String, value: f64 },
    #[error("grade pairs file: {0}")]
    Csv(#[from] csv::Error),
    #[error("stats table line {line}: {message}")]
    Table { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub pct_exact: f64,
    pub avg_abs_diff: f64,
    /// Signed: positive when the automatic grader scores higher. Pairs with a
    /// human score of 0 are left out; `None` when no pair remains.
    pub avg_rel_diff_pct: Option<f64>,
    pub pct_over: f64,
    pub pct_under: f64,
    /// `None` when neither grader gave full credit anywhere.
    pub joint_full_credit_pct: Option<f64>,
    /// `None` when either grade vector is constant.
    pub spearman: Option<f64>,
}

fn check(pairs: &[GradePair]) -> Result<(), StatsError> {
    if pairs.is_empty() {
        return Err(StatsError::Empty);
    }
    let mut seen = BTreeSet::new();
    for p in pairs {
        if !seen.insert(p.id.as_str()) {
            return Err(StatsError::DuplicateId(p.id.clone()));
        }
        for v in [p.auto, p.human] {
            if !(0.0..=1.0).contains(&v) {
                return Err(StatsError::OutOfRange { id: p.id.clone(), value: v });
            }
        }
    }
    Ok(())
}

/// 1-based ranks; ties share the mean of the ranks they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    pearson(&average_ranks(x), &average_ranks(y))
}

pub fn compute_stats(pairs: &[GradePair]) -> Result<StatsReport, StatsError> {
    check(pairs)?;
    let n = pairs.len() as f64;
    let pct = |count: usize| 100.0 * count as f64 / n;

    let exact = pairs.iter().filter(|p| (p.auto - p.human).abs() <= EXACT_TOLERANCE).count();
    let over = pairs.iter().filter(|p| p.auto - p.human > EXACT_TOLERANCE).count();
    let under = pairs.len() - exact - over;

    let rel: Vec<f64> = pairs.iter().filter(|p| p.human > 0.0).map(|p| 100.0 * (p.auto - p.human) / p.human).collect();

    let full = |v: f64| (v - 1.0).abs() <= EXACT_TOLERANCE;
    let both = pairs.iter().filter(|p| full(p.auto) && full(p.human)).count();
    let either = pairs.iter().filter(|p| full(p.auto) || full(p.human)).count();

    let auto: Vec<f64> = pairs.iter().map(|p| p.auto).collect();
    let human: Vec<f64> = pairs.iter().map(|p| p.human).collect();

    Ok(StatsReport {
        pct_exact: pct(exact),
        avg_abs_diff: pairs.iter().map(|p| (p.auto - p.human).abs()).sum::<f64>() / n,
        avg_rel_diff_pct: (!rel.is_empty()).then(|| rel.iter().sum::<f64>() / rel.len() as f64),
        pct_over: pct(over),
        pct_under: pct(under),
        joint_full_credit_pct: (either > 0).then(|| 100.0 * both as f64 / either as f64),
        spearman: spearman(&auto, &human),
    })
}

/// Row labels in table order.
pub const ROWS: [&str; 7] = [
    "Exact Match (%)",
    "Avg. Abs. Diff",
    "Avg. Rel. Diff (%)",
    "LLM Overestimated (%)",
    "LLM Underestimated (%)",
    "Joint Full Credit (%)",
    "Spearman Correlation",
];

fn cell(v: Option<f64>, decimals: usize) -> String {
    match v {
        Some(v) => format!("{v:.decimals$}"),
        None => "n/a".into(),
    }
}

/// Two-column text table; percentages to 2 decimals, other values to 4.
pub fn render_stats(report: &StatsReport) -> String {
    let values = [
        cell(Some(report.pct_exact), 2),
        cell(Some(report.avg_abs_diff), 4),
        cell(report.avg_rel_diff_pct, 2),
        cell(Some(report.pct_over), 2),
        cell(Some(report.pct_under), 2),
        cell(report.joint_full_credit_pct, 2),
        cell(report.spearman, 4),
    ];
    let mut out = format!("{:<24}{:>10}\n", "Metric", "Value");
    for (label, value) in ROWS.iter().zip(values) {
        out.push_str(&format!("{label:<24}{value:>10}\n"));
    }
    out
}

/// Reads a table written by [`render_stats`]; values carry its rounding.
pub fn parse_stats(text: &str) -> Result<StatsReport, StatsError> {
    let mut values = Vec::new();
    let rows: Vec<(usize, &str)> = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()).skip(1).collect();
    for (expected, (i, line)) in ROWS.iter().zip(&rows) {
        let err = |message: String| StatsError::Table { line: i + 1, message };
        let (label, value) = line.trim_end().rsplit_once(' ').ok_or_else(|| err("missing value".into()))?;
        if label.trim() != *expected {
            return Err(err(format!("expected row {expected:?}, found {:?}", label.trim())));
        }
        let v = match value {
            "n/a" => None,
            v => Some(v.parse::<f64>().map_err(|e| err(e.to_string()))?),
        };
        values.push(v);
    }
    if values.len() != ROWS.len() || rows.len() != ROWS.len() {
        return Err(StatsError::Table { line: rows.len() + 1, message: format!("expected {} rows", ROWS.len()) });
    }
    let required = |i: usize| {
        values[i].ok_or_else(|| StatsError::Table { line: i + 2, message: format!("{} cannot be n/a", ROWS[i]) })
    };
    Ok(StatsReport {
        pct_exact: required(0)?,
        avg_abs_diff: required(1)?,
        avg_rel_diff_pct: values[2],
        pct_over: required(3)?,
        pct_under: required(4)?,
        joint_full_credit_pct: values[5],
        spearman: values[6],
    })
}

/// Loads `id,auto,human` records with a header row.
pub fn read_pairs(path: impl AsRef<Path>) -> Result<Vec<GradePair>, StatsError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let pairs = reader.deserialize().collect::<Result<Vec<GradePair>, _>>()?;
    check(&pairs)?;
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(v: &[(f64, f64)]) -> Vec<GradePair> {
        v.iter().enumerate().map(|(i, &(auto, human))| GradePair { id: format!("p{i}"), auto, human }).collect()
    }

    #[test]
    fn identical_full_credit() {
        let r = compute_stats(&pairs(&[(1.0, 1.0), (1.0, 1.0), (1.0, 1.0)])).unwrap();
        assert_eq!(r.avg_abs_diff, 0.0);
        assert_eq!(r.pct_exact, 100.0);
        assert_eq!(r.joint_full_credit_pct, Some(100.0));
        assert_eq!(r.spearman, None);
    }

    #[test]
    fn symmetric_disagreement() {
        let r = compute_stats(&pairs(&[(1.0, 0.5), (0.5, 1.0)])).unwrap();
        assert_eq!(r.avg_abs_diff, 0.5);
        assert_eq!((r.pct_over, r.pct_under, r.pct_exact), (50.0, 50.0, 0.0));
        // (+100% - 50%) / 2
        assert_eq!(r.avg_rel_diff_pct, Some(25.0));
        assert_eq!(r.joint_full_credit_pct, Some(0.0));
        assert_eq!(r.spearman, Some(-1.0));
    }

    #[test]
    fn undefined_cases() {
        let r = compute_stats(&pairs(&[(0.2, 0.0), (0.4, 0.0)])).unwrap();
        assert_eq!(r.avg_rel_diff_pct, None);
        assert_eq!(r.joint_full_credit_pct, None);
        assert_eq!(r.spearman, None);
        assert!(matches!(compute_stats(&[]), Err(StatsError::Empty)));
        let mut dup = pairs(&[(0.1, 0.2), (0.3, 0.4)]);
        dup[1].id = "p0".into();
        assert!(matches!(compute_stats(&dup), Err(StatsError::DuplicateId(_))));
        assert!(matches!(compute_stats(&pairs(&[(1.5, 0.2)])), Err(StatsError::OutOfRange { .. })));
    }

    #[test]
    fn ties_get_mean_rank() {
        assert_eq!(average_ranks(&[0.5, 0.1, 0.5, 0.9]), vec![2.5, 1.0, 2.5, 4.0]);
    }

    #[test]
    fn render_and_parse() {
        let r = compute_stats(&pairs(&[(1.0, 0.5), (0.5, 1.0), (0.25, 0.25)])).unwrap();
        let text = render_stats(&r);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 8);
        for (line, label) in lines[1..].iter().zip(ROWS) {
            assert!(line.starts_with(label));
        }
        assert!(lines[1].ends_with("33.33"));
        let back = parse_stats(&text).unwrap();
        assert!((back.pct_exact - r.pct_exact).abs() < 0.005);
        assert_eq!(render_stats(&back), text);

        let undefined = compute_stats(&pairs(&[(1.0, 1.0)])).unwrap();
        let text = render_stats(&undefined);
        assert!(text.lines().last().unwrap().ends_with("n/a"));
        assert_eq!(parse_stats(&text).unwrap().spearman, None);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_stats("Metric Value\nfoo 1\n").is_err());
        assert!(parse_stats("").is_err());
    }

    #[test]
    fn pairs_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pairs.csv");
        std::fs::write(&path, "id,auto,human\na, 1.0, 0.5\nb,0.5,1\n").unwrap();
        let p = read_pairs(&path).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p[0].human, 0.5);
        std::fs::write(&path, "id,auto,human\na,x,1\n").unwrap();
        assert!(read_pairs(&path).is_err());
    }
}
