use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use locc_lab::{
    build, build_thm4_tree, build_thm5_tree, build_thm6_tree, certify_both, expected_count, run,
    verify_orthogonality, Family, FamilyParams, ProtocolTree,
};

use crate::manifest::RunManifest;
use crate::{emit, param, pretty, CmdResult, Failure, FamilyArg, FormatArg, PASS, VERDICT_FAIL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Serialize)]
pub struct Row {
    pub n: usize,
    pub m: usize,
    pub family: Option<Family>,
    pub status: Status,
    pub count: Option<usize>,
    pub expected: Option<usize>,
    pub orthogonal: Option<bool>,
    pub solution_dim_a: Option<usize>,
    pub solution_dim_b: Option<usize>,
    pub theorem: Option<u8>,
    pub perfect: Option<bool>,
    /// Why the row was skipped or failed.
    pub note: Option<String>,
}

impl Row {
    fn skipped(n: usize, m: usize, note: String) -> Self {
        Row {
            n,
            m,
            family: None,
            status: Status::Skipped,
            count: None,
            expected: None,
            orthogonal: None,
            solution_dim_a: None,
            solution_dim_b: None,
            theorem: None,
            perfect: None,
            note: Some(note),
        }
    }
}

/// Parses `a..b` (inclusive) or a single number.
fn parse_range(s: &str) -> Result<Vec<usize>, Failure> {
    let bad = || param(format!("invalid range {s:?}; expected e.g. 4..10 or 7"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        ),
        None => {
            let v: usize = s.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(bad());
    }
    Ok((lo..=hi).collect())
}

fn tree_for(family: Family, p: FamilyParams) -> (u8, Result<ProtocolTree, locc_lab::BuildError>) {
    match family {
        Family::Thm1 | Family::Thm1N4 => (4, build_thm4_tree(p)),
        Family::Thm2 => (5, build_thm5_tree(p)),
        Family::Thm3 => (6, build_thm6_tree(p)),
    }
}

fn evaluate(n: usize, m: usize, family: FamilyArg, simulate: bool) -> Row {
    let p = FamilyParams::new(n, m);
    if m < 4 || n < m {
        return Row::skipped(n, m, "outside 4 ≤ m ≤ n".to_string());
    }
    let family = family.resolve(p);
    let s = match build(p, family) {
        Ok(s) => s,
        Err(e) => return Row::skipped(n, m, e.to_string()),
    };
    let family = s.family().unwrap_or(family);
    let expected = expected_count(p, family).ok();
    let orthogonal = verify_orthogonality(&s).is_orthogonal();
    let mut row = Row {
        n,
        m,
        family: Some(family),
        status: Status::Pass,
        count: Some(s.len()),
        expected,
        orthogonal: Some(orthogonal),
        solution_dim_a: None,
        solution_dim_b: None,
        theorem: None,
        perfect: None,
        note: None,
    };
    let mut problems = Vec::new();
    if expected != Some(s.len()) {
        problems.push("count differs from closed form".to_string());
    }
    if !orthogonal {
        problems.push("not orthogonal".to_string());
    } else if let Ok((a, b)) = certify_both(&s) {
        row.solution_dim_a = Some(a.solution_dim());
        row.solution_dim_b = Some(b.solution_dim());
        if !(a.scalar_only && b.scalar_only) {
            problems.push("not scalar-only".to_string());
        }
    }
    if simulate {
        let (theorem, tree) = tree_for(family, p);
        row.theorem = Some(theorem);
        match tree
            .map_err(|e| e.to_string())
            .and_then(|t| run(&t, &s).map_err(|e| e.to_string()))
        {
            Ok(r) => {
                row.perfect = Some(r.perfect);
                if !r.perfect {
                    problems.push("discrimination not perfect".to_string());
                }
            }
            Err(e) => problems.push(format!("protocol: {e}")),
        }
    }
    if !problems.is_empty() {
        row.status = Status::Fail;
        row.note = Some(problems.join("; "));
    }
    row
}

fn threads() -> Option<usize> {
    std::env::var("LOCC_LAB_THREADS")
        .ok()?
        .parse()
        .ok()
        .filter(|&t| t > 0)
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or("-".to_string(), |x| x.to_string())
}

fn table(rows: &[Row]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>3} {:>3}  {:<8} {:>5} {:>8} {:>6} {:>5} {:>5} {:>3} {:>7}  {:<7} note",
        "n", "m", "family", "count", "expected", "orth", "dimA", "dimB", "thm", "perfect", "status"
    );
    for r in rows {
        let status = match r.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Skipped => "skipped",
        };
        let line = format!(
            "{:>3} {:>3}  {:<8} {:>5} {:>8} {:>6} {:>5} {:>5} {:>3} {:>7}  {:<7} {}",
            r.n,
            r.m,
            opt(r.family),
            opt(r.count),
            opt(r.expected),
            opt(r.orthogonal),
            opt(r.solution_dim_a),
            opt(r.solution_dim_b),
            opt(r.theorem),
            opt(r.perfect),
            status,
            r.note.as_deref().unwrap_or("")
        );
        let _ = writeln!(out, "{}", line.trim_end());
    }
    out
}

pub fn cmd(
    n_range: &str,
    m_range: &str,
    family: FamilyArg,
    simulate: bool,
    format: FormatArg,
    out: Option<&Path>,
    started: Instant,
) -> CmdResult {
    let ns = parse_range(n_range)?;
    let ms = parse_range(m_range)?;
    let cells: Vec<(usize, usize)> = ns
        .iter()
        .flat_map(|&n| ms.iter().map(move |&m| (n, m)))
        .collect();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads() {
        pool = pool.num_threads(t);
    }
    let pool = pool
        .build()
        .map_err(|e| param(format!("thread pool: {e}")))?;
    let mut rows: Vec<Row> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(n, m)| evaluate(n, m, family, simulate))
            .collect()
    });
    rows.sort_by_key(|r| (r.n, r.m));

    let text = match format {
        FormatArg::Json => pretty(&rows),
        _ => table(&rows),
    };
    emit(&text, out)?;
    let failed = rows.iter().filter(|r| r.status == Status::Fail).count();
    let passed = rows.iter().filter(|r| r.status == Status::Pass).count();
    if let Some(out) = out {
        RunManifest::new("sweep", started)
            .output(out)
            .verdict("n_range", json!(n_range))
            .verdict("m_range", json!(m_range))
            .verdict("passed", json!(passed))
            .verdict("failed", json!(failed))
            .verdict("skipped", json!(rows.len() - passed - failed))
            .write_beside(out)?;
    }
    Ok(if failed == 0 { PASS } else { VERDICT_FAIL })
}
