//! Partitioning a corpus into classes of provably equivalent submissions.
//!
//! Each class has a representative, its first member. A new submission is
//! compared against class representatives in creation order and joins the
//! first class for which the check succeeds; otherwise it founds a class.

use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::check::{check_equiv, Verdict};
use crate::formulagen::GenConfig;
use crate::par::Execution;
use crate::smt::{Solver, SolverVerdict};
use crate::syntax::{DataEnv, Expr, Type};

#[derive(Clone, Debug)]
pub struct Submission {
    pub id: String,
    pub expr: Expr,
    pub ty: Type,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Unprocessed {
    pub id: String,
    pub error: String,
}

#[derive(Clone, Debug)]
pub struct ClusterConfig {
    pub gen: GenConfig,
    /// Compare a candidate only with each class representative. When off,
    /// a candidate not proven equivalent to a representative is also
    /// compared with the other members of that class.
    pub negative_caching: bool,
    pub execution: Execution,
    /// Comparisons run concurrently per batch on the parallel path.
    pub batch: usize,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig {
            gen: GenConfig::default(),
            negative_caching: true,
            execution: Execution::default(),
            batch: crate::smt::num_jobs(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub candidate: String,
    pub against: String,
    pub verdict: Verdict,
    pub solver: SolverVerdict,
    pub exhausted: bool,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub submissions: usize,
    pub classes: usize,
    pub p90_classes: usize,
    pub p75_classes: usize,
    pub non_singleton_classes: usize,
    pub percent_in_non_singleton: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportHeader {
    pub comparison_order: String,
    pub representative: String,
    pub negative_caching: bool,
    pub execution: Execution,
    #[serde(rename = "type")]
    pub ty: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivReport {
    pub header: ReportHeader,
    /// Submission ids per class, representative first, classes in
    /// creation order.
    pub classes: Vec<Vec<String>>,
    /// Comparisons the sequential algorithm performs.
    pub comparisons_performed: usize,
    /// Comparisons actually run, including speculative parallel ones.
    pub comparisons_executed: usize,
    pub total_wall_time: f64,
    pub mean_comparison_time: f64,
    pub stats: Stats,
    pub unprocessed: Vec<Unprocessed>,
    pub log: Vec<Comparison>,
}

/// Minimum number of largest classes whose union has at least `⌈q·n⌉`
/// members, for `q = percent / 100`.
fn percentile_classes(sorted_desc: &[usize], n: usize, percent: usize) -> usize {
    let need = (percent * n).div_ceil(100);
    let mut covered = 0;
    for (i, s) in sorted_desc.iter().enumerate() {
        if covered >= need {
            return i;
        }
        covered += s;
    }
    sorted_desc.len()
}

/// Report statistics of a partition, given as class sizes.
pub fn compute_stats(sizes: &[usize]) -> Stats {
    let mut sorted: Vec<usize> = sizes.iter().copied().filter(|s| *s > 0).collect();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let n: usize = sorted.iter().sum();
    let in_non_singleton: usize = sorted.iter().filter(|s| **s > 1).sum();
    Stats {
        submissions: n,
        classes: sorted.len(),
        p90_classes: percentile_classes(&sorted, n, 90),
        p75_classes: percentile_classes(&sorted, n, 75),
        non_singleton_classes: sorted.iter().filter(|s| **s > 1).count(),
        percent_in_non_singleton: if n == 0 { 0.0 } else { 100.0 * in_non_singleton as f64 / n as f64 },
    }
}

struct Class {
    members: Vec<usize>,
}

pub fn cluster(
    corpus: &[Submission],
    mut unprocessed: Vec<Unprocessed>,
    env: &DataEnv,
    solver: &Solver,
    cfg: &ClusterConfig,
) -> EquivReport {
    let start = Instant::now();
    let ty = corpus.first().map(|s| s.ty.clone());
    let mut accepted: Vec<usize> = Vec::new();
    for (i, s) in corpus.iter().enumerate() {
        match &ty {
            Some(t) if s.ty != *t => unprocessed
                .push(Unprocessed { id: s.id.clone(), error: format!("has type `{}`, expected `{}`", s.ty, t) }),
            _ => accepted.push(i),
        }
    }

    let mut classes: Vec<Class> = Vec::new();
    let mut log = Vec::new();
    let mut performed = 0;
    let mut executed = 0;
    let mut compare_time = 0.0;
    let batch = if cfg.execution.is_parallel() { cfg.batch.max(1) } else { 1 };

    for &i in &accepted {
        let cand = &corpus[i];
        // (class index, member) in the order the sequential algorithm visits.
        let targets: Vec<(usize, usize)> = classes
            .iter()
            .enumerate()
            .flat_map(|(k, c)| {
                let upto = if cfg.negative_caching { 1 } else { c.members.len() };
                c.members[..upto].iter().map(move |&m| (k, m))
            })
            .collect();
        let mut joined = None;
        for chunk in targets.chunks(batch) {
            let results = cfg.execution.map(chunk, |&(_, m)| {
                let other = &corpus[m];
                let out = check_equiv(&other.expr, &cand.expr, &cand.ty, env, &cfg.gen, solver);
                Comparison {
                    candidate: cand.id.clone(),
                    against: other.id.clone(),
                    verdict: out.verdict,
                    solver: out.solver,
                    exhausted: out.exhausted,
                    seconds: out.elapsed.as_secs_f64(),
                }
            });
            executed += results.len();
            let first_valid = results.iter().position(|c| c.verdict == Verdict::Equivalent);
            let logical = first_valid.map_or(results.len(), |p| p + 1);
            performed += logical;
            for c in results.into_iter().take(logical) {
                compare_time += c.seconds;
                log.push(c);
            }
            if let Some(p) = first_valid {
                joined = Some(chunk[p].0);
                break;
            }
        }
        match joined {
            Some(k) => classes[k].members.push(i),
            None => classes.push(Class { members: vec![i] }),
        }
    }

    let ids: Vec<Vec<String>> =
        classes.iter().map(|c| c.members.iter().map(|&m| corpus[m].id.clone()).collect()).collect();
    let sizes: Vec<usize> = ids.iter().map(Vec::len).collect();
    EquivReport {
        header: ReportHeader {
            comparison_order: "corpus order".into(),
            representative: "first member".into(),
            negative_caching: cfg.negative_caching,
            execution: cfg.execution,
            ty: ty.map(|t| t.to_string()),
        },
        classes: ids,
        comparisons_performed: performed,
        comparisons_executed: executed,
        total_wall_time: start.elapsed().as_secs_f64(),
        mean_comparison_time: if performed == 0 { 0.0 } else { compare_time / performed as f64 },
        stats: compute_stats(&sizes),
        unprocessed,
        log,
    }
}

impl EquivReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Plain-text tables: class statistics, then runtime.
    pub fn to_text(&self) -> String {
        let s = &self.stats;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>12}  {:>5}  {:>19}  {:>19}  {:>17}  {:>22}",
            "Submissions",
            "ECs",
            "90th Percentile ECs",
            "75th Percentile ECs",
            "Non-singleton ECs",
            "% in Non-singleton ECs"
        );
        let _ = writeln!(
            out,
            "{:>12}  {:>5}  {:>19}  {:>19}  {:>17}  {:>22.1}",
            s.submissions, s.classes, s.p90_classes, s.p75_classes, s.non_singleton_classes, s.percent_in_non_singleton
        );
        out.push('\n');
        let _ = writeln!(
            out,
            "{:>21}  {:>14}  {:>23}",
            "Number of Comparisons", "Total Time (s)", "Mean Time per Comp. (s)"
        );
        let _ = writeln!(
            out,
            "{:>21}  {:>14.3}  {:>23.4}",
            self.comparisons_performed, self.total_wall_time, self.mean_comparison_time
        );
        out.push('\n');
        for (k, c) in self.classes.iter().enumerate() {
            let _ = writeln!(out, "class {} ({}): {}", k + 1, c.len(), c.join(" "));
        }
        if !self.unprocessed.is_empty() {
            let _ = writeln!(out, "\nunprocessed ({}):", self.unprocessed.len());
            for u in &self.unprocessed {
                let _ = writeln!(out, "  {}: {}", u.id, u.error);
            }
        }
        out
    }
}
