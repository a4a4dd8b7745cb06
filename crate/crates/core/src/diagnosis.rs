//! Relaxing inconsistent preference sets by removing constraints, and the
//! cohort experiment built on top of it.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::graph::Graph;
use crate::recommender::{matching_items, solution_count, ConstraintLabel, RecommendError, RecommendationTask};

/// A set of preference labels to drop.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Diagnosis {
    pub removed: BTreeSet<ConstraintLabel>,
}

impl Diagnosis {
    pub fn new(labels: impl IntoIterator<Item = ConstraintLabel>) -> Self {
        Diagnosis { removed: labels.into_iter().collect() }
    }

    pub fn len(&self) -> usize {
        self.removed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.removed.is_empty()
    }

    pub fn is_subset(&self, other: &Diagnosis) -> bool {
        self.removed.is_subset(&other.removed)
    }
}

impl fmt::Display for Diagnosis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, l) in self.removed.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{l}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagnosisError {
    #[error("{label} is not among the preferences of {user}")]
    UnknownLabel { user: String, label: ConstraintLabel },
    #[error("preferences of {user} are already consistent")]
    AlreadyConsistent { user: String },
    #[error("no diagnosis restores consistency for {user}")]
    NoDiagnosis { user: String },
    #[error(transparent)]
    Recommend(#[from] RecommendError),
}

/// Active labels after removing `delta`. Every removed label must be one
/// the profile supplied.
pub fn apply_diagnosis(
    task: &RecommendationTask,
    delta: &Diagnosis,
) -> Result<BTreeSet<ConstraintLabel>, DiagnosisError> {
    let supplied = task.supplied();
    if let Some(&label) = delta.removed.iter().find(|l| !supplied.contains(l)) {
        return Err(DiagnosisError::UnknownLabel { user: task.profile.user_id.clone(), label });
    }
    Ok(supplied.difference(&delta.removed).copied().collect())
}

/// Active labels after removing whichever labels of `removed` the profile
/// supplied. Used for cohort-wide diagnosis sets.
pub fn relax(task: &RecommendationTask, removed: &BTreeSet<ConstraintLabel>) -> BTreeSet<ConstraintLabel> {
    task.supplied().difference(removed).copied().collect()
}

/// Drops preferences from the least important upward until at least one
/// item matches.
pub fn preferred_diagnosis(graph: &Graph, task: &RecommendationTask) -> Result<Diagnosis, DiagnosisError> {
    let user = || task.profile.user_id.clone();
    let supplied = task.supplied();
    if solution_count(graph, task, &supplied)? > 0 {
        return Err(DiagnosisError::AlreadyConsistent { user: user() });
    }
    let mut delta = Diagnosis::default();
    for &label in task.profile.rank.iter().rev() {
        delta.removed.insert(label);
        if solution_count(graph, task, &apply_diagnosis(task, &delta)?)? > 0 {
            return Ok(delta);
        }
    }
    Err(DiagnosisError::NoDiagnosis { user: user() })
}

/// Every subset-minimal diagnosis with at most `max_size` labels, smallest
/// first. Subsets are tried in order of size, so a candidate that contains
/// an earlier diagnosis is skipped without being evaluated. The search is
/// exponential in the number of supplied preferences.
pub fn enumerate_minimal_diagnoses(
    graph: &Graph,
    task: &RecommendationTask,
    max_size: usize,
) -> Result<Vec<Diagnosis>, DiagnosisError> {
    let labels: Vec<ConstraintLabel> = task.supplied().into_iter().collect();
    let n = labels.len();
    let mut subsets: Vec<Diagnosis> = (0u32..1 << n)
        .map(|mask| Diagnosis::new((0..n).filter(|i| mask & (1 << i) != 0).map(|i| labels[i])))
        .filter(|d| d.len() <= max_size)
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let mut found: Vec<Diagnosis> = Vec::new();
    for d in subsets {
        if found.iter().any(|f| f.is_subset(&d)) {
            continue;
        }
        if solution_count(graph, task, &apply_diagnosis(task, &d)?)? > 0 {
            found.push(d);
        }
    }
    Ok(found)
}

/// Half-open solution-count ranges used for histograms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bucket {
    pub low: usize,
    /// Inclusive upper bound; `None` for the last, open bucket.
    pub high: Option<usize>,
}

impl fmt::Display for Bucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.high {
            None if self.low == 0 => f.write_str(">=0"),
            None => write!(f, ">{}", self.low - 1),
            Some(h) if h == self.low => write!(f, "{h}"),
            Some(h) => write!(f, "{}-{h}", self.low),
        }
    }
}

/// Contiguous buckets covering every count from 0 upward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BucketScheme {
    buckets: Vec<Bucket>,
}

impl Default for BucketScheme {
    fn default() -> Self {
        BucketScheme::parse("0,1-5,6-10,>10").expect("valid default")
    }
}

impl BucketScheme {
    /// Parses a comma-separated list such as `0,1-5,6-10,>10`. Buckets must
    /// start at 0, be contiguous and end with an open `>n` bucket.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut buckets = Vec::new();
        let mut next = 0usize;
        let parts: Vec<&str> = text.split(',').map(str::trim).collect();
        for (i, part) in parts.iter().enumerate() {
            let num = |s: &str| s.trim().parse::<usize>().map_err(|_| format!("bad bucket bound {s:?} in {part:?}"));
            let bucket = if let Some(rest) = part.strip_prefix('>') {
                Bucket { low: num(rest)? + 1, high: None }
            } else if let Some((lo, hi)) = part.split_once('-') {
                Bucket { low: num(lo)?, high: Some(num(hi)?) }
            } else {
                let v = num(part)?;
                Bucket { low: v, high: Some(v) }
            };
            if bucket.low != next {
                return Err(format!("bucket {part:?} should start at {next}"));
            }
            match bucket.high {
                Some(h) if h < bucket.low => return Err(format!("empty bucket {part:?}")),
                Some(h) => next = h + 1,
                None if i + 1 != parts.len() => return Err(format!("open bucket {part:?} must be last")),
                None => {}
            }
            buckets.push(bucket);
        }
        if buckets.last().map_or(true, |b| b.high.is_some()) {
            return Err("the last bucket must be open, like >10".to_string());
        }
        Ok(BucketScheme { buckets })
    }

    pub fn buckets(&self) -> &[Bucket] {
        &self.buckets
    }

    pub fn len(&self) -> usize {
        self.buckets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.is_empty()
    }

    pub fn index_of(&self, count: usize) -> usize {
        self.buckets.iter().position(|b| b.high.map_or(true, |h| count <= h)).expect("buckets cover every count")
    }
}

impl fmt::Display for BucketScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.buckets.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// A named set of labels removed across a whole cohort.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaSet {
    pub name: String,
    pub removed: BTreeSet<ConstraintLabel>,
}

impl DeltaSet {
    /// `Δ1={Seats}` ... `Δ6={Price}` and `Δ7={Color, Brand}`.
    pub fn defaults() -> Vec<DeltaSet> {
        let mut out: Vec<DeltaSet> = ConstraintLabel::ALL
            .into_iter()
            .enumerate()
            .map(|(i, l)| DeltaSet { name: format!("Δ{}", i + 1), removed: [l].into_iter().collect() })
            .collect();
        out.push(DeltaSet {
            name: "Δ7".to_string(),
            removed: [ConstraintLabel::Color, ConstraintLabel::Brand].into_iter().collect(),
        });
        out
    }

    /// Parses `name=Label+Label;name=Label`. A set may be empty (`none=`).
    pub fn parse_list(text: &str) -> Result<Vec<DeltaSet>, String> {
        let mut out: Vec<DeltaSet> = Vec::new();
        for item in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, labels) = item.split_once('=').ok_or_else(|| format!("expected name=labels, got {item:?}"))?;
            let name = name.trim();
            if name.is_empty() || out.iter().any(|d| d.name == name) {
                return Err(format!("missing or duplicate diagnosis set name in {item:?}"));
            }
            let removed = labels
                .split('+')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|l| ConstraintLabel::parse(l).ok_or_else(|| format!("unknown constraint label {l:?}")))
                .collect::<Result<_, _>>()?;
            out.push(DeltaSet { name: name.to_string(), removed });
        }
        Ok(out)
    }
}

/// Histogram row for one diagnosis set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohortRow {
    pub name: String,
    pub removed: BTreeSet<ConstraintLabel>,
    /// Users per bucket.
    pub histogram: Vec<usize>,
    /// Users with at least one solution.
    pub consistent: usize,
}

impl CohortRow {
    pub fn users(&self) -> usize {
        self.histogram.iter().sum()
    }

    /// Fraction of users with at least one solution; 0 for an empty cohort.
    pub fn rate(&self) -> f64 {
        match self.users() {
            0 => 0.0,
            n => self.consistent as f64 / n as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserCounts {
    pub user_id: String,
    /// Solution count per report row.
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohortReport {
    pub buckets: BucketScheme,
    /// The unrelaxed preferences first (named `full`), then one row per
    /// diagnosis set in the order given.
    pub rows: Vec<CohortRow>,
    pub users: Vec<UserCounts>,
    /// Filter evaluation errors over all queries.
    pub filter_errors: usize,
}

/// Counts every user's solutions under the full preferences and under each
/// diagnosis set, and buckets the counts.
pub fn run_cohort_experiment(
    graph: &Graph,
    cohort: &[RecommendationTask],
    deltas: &[DeltaSet],
    buckets: &BucketScheme,
) -> Result<CohortReport, DiagnosisError> {
    let full = DeltaSet { name: "full".to_string(), removed: BTreeSet::new() };
    let sets: Vec<&DeltaSet> = core::iter::once(&full).chain(deltas).collect();
    let mut rows: Vec<CohortRow> = sets
        .iter()
        .map(|d| CohortRow {
            name: d.name.clone(),
            removed: d.removed.clone(),
            histogram: alloc::vec![0; buckets.len()],
            consistent: 0,
        })
        .collect();
    let mut users = Vec::with_capacity(cohort.len());
    let mut filter_errors = 0;
    for task in cohort {
        let mut counts = Vec::with_capacity(sets.len());
        for (row, d) in rows.iter_mut().zip(&sets) {
            let (items, diag) = matching_items(graph, task, &relax(task, &d.removed))?;
            filter_errors += diag.filter_errors;
            row.histogram[buckets.index_of(items.len())] += 1;
            row.consistent += usize::from(!items.is_empty());
            counts.push(items.len());
        }
        users.push(UserCounts { user_id: task.profile.user_id.clone(), counts });
    }
    Ok(CohortReport { buckets: buckets.clone(), rows, users, filter_errors })
}
