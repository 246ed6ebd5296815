//! Scored binary datasets and their empirical score distributions.
//!
//! Class convention: class 0 is the positive class and class 1 the negative
//! class, with scores increasing in the estimated probability of class 1.
//! A sample is predicted positive at threshold `t` when `score <= t`, so the
//! cumulative distribution `F_k(t) = P(s <= t | k)` gives the true positive
//! rate for class 0 and the false positive rate for class 1. Loaders accept a
//! [`LabelMapping`] so conventionally labelled data (1 = positive) can be
//! mapped in.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Class {
    /// Class 0.
    Positive,
    /// Class 1.
    Negative,
}

impl Class {
    pub const BOTH: [Class; 2] = [Class::Positive, Class::Negative];

    pub fn index(self) -> usize {
        match self {
            Class::Positive => 0,
            Class::Negative => 1,
        }
    }

    pub fn from_index(index: u8) -> Option<Class> {
        match index {
            0 => Some(Class::Positive),
            1 => Some(Class::Negative),
            _ => None,
        }
    }

    pub fn other(self) -> Class {
        match self {
            Class::Positive => Class::Negative,
            Class::Negative => Class::Positive,
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScoredSample {
    pub score: f64,
    pub label: Class,
}

impl ScoredSample {
    pub fn new(score: f64, label: Class) -> Self {
        ScoredSample { score, label }
    }
}

/// Half-open score interval `[lo, hi)` on which every threshold yields the
/// same crisp classifier. `lo` may be `-inf` and `hi` may be `+inf`. A
/// degenerate interval with `lo == hi` denotes the single threshold `lo`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdInterval {
    pub lo: f64,
    pub hi: f64,
}

impl ThresholdInterval {
    pub fn new(lo: f64, hi: f64) -> Self {
        ThresholdInterval { lo, hi }
    }

    pub fn point(t: f64) -> Self {
        ThresholdInterval { lo: t, hi: t }
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, t: f64) -> bool {
        if self.is_point() {
            t == self.lo
        } else {
            self.lo <= t && t < self.hi
        }
    }

    /// A threshold inside the interval: the midpoint, or one unit beyond the
    /// finite end of an outer interval.
    pub fn representative(&self) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => 0.5 * (self.lo + self.hi),
            (false, true) => self.hi - 1.0,
            (true, false) => self.lo + 1.0,
            (false, false) => 0.0,
        }
    }

    /// Smallest interval covering both.
    pub fn union(&self, other: &ThresholdInterval) -> ThresholdInterval {
        ThresholdInterval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }
}

impl fmt::Display for ThresholdInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            write!(f, "[{}]", self.lo)
        } else {
            write!(f, "[{}, {})", self.lo, self.hi)
        }
    }
}

/// All samples sharing one score, with per-class counts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreGroup {
    pub score: f64,
    pub counts: [usize; 2],
}

impl ScoreGroup {
    pub fn total(&self) -> usize {
        self.counts[0] + self.counts[1]
    }
}

/// One way of splitting the ranking between two consecutive distinct scores.
///
/// Cut `j` predicts the `j` lowest distinct score groups positive. There are
/// `n' + 1` cuts for `n'` distinct scores.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cut {
    /// Samples of each class scored at or below the threshold.
    pub counts: [usize; 2],
    pub interval: ThresholdInterval,
}

impl Cut {
    pub fn predicted_positive(&self) -> usize {
        self.counts[0] + self.counts[1]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScoredDataset {
    samples: Vec<ScoredSample>,
    groups: Vec<ScoreGroup>,
    /// Inclusive cumulative class counts, one entry per group.
    cumulative: Vec<[usize; 2]>,
    counts: [usize; 2],
}

impl ScoredDataset {
    pub fn new(samples: Vec<ScoredSample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput);
        }
        if let Some(bad) = samples.iter().find(|s| !s.score.is_finite()) {
            return Err(Error::NonFiniteScore(bad.score));
        }

        let mut sorted: Vec<ScoredSample> = samples.clone();
        sorted.sort_by(|a, b| a.score.total_cmp(&b.score));

        let mut groups: Vec<ScoreGroup> = Vec::new();
        for s in &sorted {
            match groups.last_mut() {
                // -0.0 and 0.0 are one score
                Some(g) if g.score == s.score => g.counts[s.label.index()] += 1,
                _ => {
                    let mut counts = [0, 0];
                    counts[s.label.index()] = 1;
                    groups.push(ScoreGroup { score: s.score, counts });
                }
            }
        }

        let mut running = [0usize; 2];
        let cumulative = groups
            .iter()
            .map(|g| {
                running[0] += g.counts[0];
                running[1] += g.counts[1];
                running
            })
            .collect();

        Ok(ScoredDataset {
            samples,
            groups,
            cumulative,
            counts: running,
        })
    }

    /// Builds a dataset from parallel score and label slices (labels 0 or 1).
    pub fn from_scores(scores: &[f64], labels: &[u8]) -> Result<Self> {
        if scores.len() != labels.len() {
            return Err(Error::InvalidSpec(format!(
                "{} scores but {} labels",
                scores.len(),
                labels.len()
            )));
        }
        let samples = scores
            .iter()
            .zip(labels)
            .enumerate()
            .map(|(i, (&score, &label))| {
                let label = Class::from_index(label).ok_or_else(|| Error::UnmappedLabel {
                    line: i as u64 + 1,
                    label: label.to_string(),
                })?;
                Ok(ScoredSample { score, label })
            })
            .collect::<Result<Vec<_>>>()?;
        ScoredDataset::new(samples)
    }

    pub fn samples(&self) -> &[ScoredSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false; construction rejects empty input.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn count(&self, class: Class) -> usize {
        self.counts[class.index()]
    }

    pub fn n0(&self) -> usize {
        self.counts[0]
    }

    pub fn n1(&self) -> usize {
        self.counts[1]
    }

    pub fn proportion(&self, class: Class) -> f64 {
        self.count(class) as f64 / self.len() as f64
    }

    pub fn pi0(&self) -> f64 {
        self.proportion(Class::Positive)
    }

    pub fn pi1(&self) -> f64 {
        self.proportion(Class::Negative)
    }

    /// Distinct scores in ascending order with per-class counts.
    pub fn groups(&self) -> &[ScoreGroup] {
        &self.groups
    }

    pub fn distinct_scores(&self) -> usize {
        self.groups.len()
    }

    pub fn min_score(&self) -> f64 {
        self.groups[0].score
    }

    pub fn max_score(&self) -> f64 {
        self.groups[self.groups.len() - 1].score
    }

    pub fn require_both_classes(&self) -> Result<()> {
        if self.n0() == 0 || self.n1() == 0 {
            return Err(Error::SingleClass {
                n0: self.n0(),
                n1: self.n1(),
            });
        }
        Ok(())
    }

    /// Checks that every score is a probability in `[0, 1]`.
    pub fn require_probabilities(&self) -> Result<()> {
        match self.samples.iter().find(|s| !(0.0..=1.0).contains(&s.score)) {
            Some(bad) => Err(Error::ScoreOutOfRange(bad.score)),
            None => Ok(()),
        }
    }

    /// Per-class counts of samples scored at or below `t`.
    pub fn counts_at_or_below(&self, t: f64) -> [usize; 2] {
        let groups_below = self.groups.partition_point(|g| g.score <= t);
        if groups_below == 0 {
            [0, 0]
        } else {
            self.cumulative[groups_below - 1]
        }
    }

    /// `F_k(t)`; zero for an empty class.
    pub fn cdf(&self, class: Class, t: f64) -> f64 {
        let n_k = self.count(class);
        if n_k == 0 {
            return 0.0;
        }
        self.counts_at_or_below(t)[class.index()] as f64 / n_k as f64
    }

    /// `pi0 F_0(t) + pi1 F_1(t)`, the fraction of samples scored at or below `t`.
    pub fn positive_prediction_rate(&self, t: f64) -> f64 {
        let [c0, c1] = self.counts_at_or_below(t);
        (c0 + c1) as f64 / self.len() as f64
    }

    pub fn empirical_distribution(&self, class: Class) -> Result<EmpiricalScoreDistribution> {
        EmpiricalScoreDistribution::new(self, class)
    }

    /// The `n' + 1` cuts of the ranking, from "all negative" to "all positive".
    pub fn cuts(&self) -> Vec<Cut> {
        let mut cuts = Vec::with_capacity(self.groups.len() + 1);
        cuts.push(Cut {
            counts: [0, 0],
            interval: ThresholdInterval::new(f64::NEG_INFINITY, self.groups[0].score),
        });
        for (j, g) in self.groups.iter().enumerate() {
            let hi = self
                .groups
                .get(j + 1)
                .map_or(f64::INFINITY, |next| next.score);
            cuts.push(Cut {
                counts: self.cumulative[j],
                interval: ThresholdInterval::new(g.score, hi),
            });
        }
        cuts
    }

    /// Index of the largest cut predicting at most `k` samples positive.
    pub(crate) fn last_cut_within(&self, k: usize) -> usize {
        self.cumulative.partition_point(|c| c[0] + c[1] <= k)
    }
}

/// Per-class probability mass function and step CDF over distinct scores.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalScoreDistribution {
    class: Class,
    points: Vec<f64>,
    masses: Vec<f64>,
    cumulative: Vec<f64>,
}

impl EmpiricalScoreDistribution {
    fn new(d: &ScoredDataset, class: Class) -> Result<Self> {
        let n_k = d.count(class);
        if n_k == 0 {
            return Err(Error::EmptyClass(class));
        }
        let k = class.index();
        let mut points = Vec::new();
        let mut masses = Vec::new();
        let mut cumulative = Vec::new();
        let mut running = 0usize;
        for g in d.groups().iter().filter(|g| g.counts[k] > 0) {
            running += g.counts[k];
            points.push(g.score);
            masses.push(g.counts[k] as f64 / n_k as f64);
            cumulative.push(running as f64 / n_k as f64);
        }
        Ok(EmpiricalScoreDistribution {
            class,
            points,
            masses,
            cumulative,
        })
    }

    pub fn class(&self) -> Class {
        self.class
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Probability mass at exactly `s`.
    pub fn pmf(&self, s: f64) -> f64 {
        match self.points.binary_search_by(|p| p.total_cmp(&s)) {
            Ok(i) => self.masses[i],
            Err(_) => 0.0,
        }
    }

    /// `P(s <= t)`, right-continuous.
    pub fn cdf_at(&self, t: f64) -> f64 {
        let below = self.points.partition_point(|&p| p <= t);
        if below == 0 {
            0.0
        } else {
            self.cumulative[below - 1]
        }
    }
}

/// Maps label tokens in input files to classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelMapping {
    entries: Vec<(String, Class)>,
}

impl Default for LabelMapping {
    /// `"0" -> class 0`, `"1" -> class 1`.
    fn default() -> Self {
        LabelMapping {
            entries: vec![
                ("0".to_string(), Class::Positive),
                ("1".to_string(), Class::Negative),
            ],
        }
    }
}

impl LabelMapping {
    pub fn new<S: Into<String>>(entries: impl IntoIterator<Item = (S, Class)>) -> Self {
        LabelMapping {
            entries: entries.into_iter().map(|(s, c)| (s.into(), c)).collect(),
        }
    }

    /// Maps `positive` to class 0 and `negative` to class 1. Without an
    /// explicit negative token the other of `"0"`/`"1"` is used.
    pub fn with_positive(positive: &str, negative: Option<&str>) -> Self {
        let negative = negative.unwrap_or(if positive == "1" { "0" } else { "1" });
        LabelMapping::new([(positive, Class::Positive), (negative, Class::Negative)])
    }

    pub fn class_of(&self, token: &str) -> Option<Class> {
        self.entries
            .iter()
            .find(|(t, _)| t == token)
            .map(|&(_, c)| c)
    }
}

fn is_header(record: &csv::StringRecord) -> bool {
    record.len() == 2
        && record[0].eq_ignore_ascii_case("score")
        && record[1].eq_ignore_ascii_case("label")
}

/// Reads `score,label` records. Blank lines and lines starting with `#` are
/// skipped, as is a leading `score,label` header.
pub fn read_dataset<R: Read>(reader: R, mapping: &LabelMapping) -> Result<ScoredDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);

    let mut samples = Vec::new();
    let mut first = true;
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Csv {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if first && is_header(&record) {
            first = false;
            continue;
        }
        first = false;
        if record.len() != 2 {
            return Err(Error::MalformedRecord {
                line,
                found: record.len(),
            });
        }
        let score: f64 = record[0]
            .parse()
            .ok()
            .filter(|s: &f64| s.is_finite())
            .ok_or_else(|| Error::MalformedScore {
                line,
                value: record[0].to_string(),
            })?;
        let label = mapping
            .class_of(&record[1])
            .ok_or_else(|| Error::UnmappedLabel {
                line,
                label: record[1].to_string(),
            })?;
        samples.push(ScoredSample { score, label });
    }
    ScoredDataset::new(samples)
}

pub fn load_dataset(path: impl AsRef<Path>, mapping: &LabelMapping) -> Result<ScoredDataset> {
    let file = std::fs::File::open(path)?;
    read_dataset(std::io::BufReader::new(file), mapping)
}

/// Writes the dataset with a `score,label` header using internal class
/// indices. Scores use shortest round-trip formatting, so reloading is
/// bit-identical.
pub fn write_dataset<W: Write>(mut w: W, d: &ScoredDataset) -> std::io::Result<()> {
    writeln!(w, "score,label")?;
    for s in d.samples() {
        writeln!(w, "{:?},{}", s.score, s.label)?;
    }
    Ok(())
}
