//! Operating conditions, point losses, cost lines and threshold choice
//! methods.
//!
//! Costs are normalised with `b = c0 + c1 = 2`, so losses on the cost
//! proportion axis lie in `[0, 2]` and losses on the skew axis in `[0, 1]`.
//! Skew-axis quantities are the cost-proportion ones with both class
//! proportions set to 1/2.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dataset::{Class, ScoredDataset, ThresholdInterval};
use crate::error::{Error, Result};

/// Which axis an operating condition (and a cost curve) lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionKind {
    CostProportion,
    Skew,
}

impl ConditionKind {
    pub const BOTH: [ConditionKind; 2] = [ConditionKind::CostProportion, ConditionKind::Skew];

    /// Class weights `(w0, w1)` entering the loss: the class proportions for
    /// cost proportions, `(1/2, 1/2)` for skews.
    pub fn class_weights(self, d: &ScoredDataset) -> (f64, f64) {
        match self {
            ConditionKind::CostProportion => (d.pi0(), d.pi1()),
            ConditionKind::Skew => (0.5, 0.5),
        }
    }

    /// Upper bound of the loss on this axis.
    pub fn max_loss(self) -> f64 {
        match self {
            ConditionKind::CostProportion => 2.0,
            ConditionKind::Skew => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ConditionKind::CostProportion => "cost_proportion",
            ConditionKind::Skew => "skew",
        }
    }
}

impl fmt::Display for ConditionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatingCondition {
    pub kind: ConditionKind,
    pub value: f64,
}

impl OperatingCondition {
    pub fn new(kind: ConditionKind, value: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::ConditionOutOfRange(value));
        }
        Ok(OperatingCondition { kind, value })
    }

    pub fn cost(c: f64) -> Result<Self> {
        Self::new(ConditionKind::CostProportion, c)
    }

    pub fn skew(z: f64) -> Result<Self> {
        Self::new(ConditionKind::Skew, z)
    }
}

fn check_unit(v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::ConditionOutOfRange(v))
    }
}

/// `z = c pi0 / (c pi0 + (1 - c)(1 - pi0))`.
pub fn skew_of(c: f64, pi0: f64) -> Result<f64> {
    check_unit(c)?;
    check_unit(pi0)?;
    let num = c * pi0;
    let den = num + (1.0 - c) * (1.0 - pi0);
    if den == 0.0 {
        return Err(Error::UndefinedCondition { c, pi: pi0 });
    }
    Ok(num / den)
}

/// Inverse of [`skew_of`]: `c = z pi1 / (z pi1 + (1 - z)(1 - pi1))`.
pub fn cost_of(z: f64, pi1: f64) -> Result<f64> {
    check_unit(z)?;
    check_unit(pi1)?;
    let num = z * pi1;
    let den = num + (1.0 - z) * (1.0 - pi1);
    if den == 0.0 {
        return Err(Error::UndefinedCondition { c: z, pi: pi1 });
    }
    Ok(num / den)
}

/// Loss as a linear function of the operating condition for one crisp
/// classifier (one threshold interval).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostLine {
    pub threshold: ThresholdInterval,
    /// Loss at condition 0: `2 w1 F_1(t)`.
    pub loss_at_0: f64,
    /// Loss at condition 1: `2 w0 (1 - F_0(t))`.
    pub loss_at_1: f64,
    pub kind: ConditionKind,
}

impl CostLine {
    fn from_rates(threshold: ThresholdInterval, f0: f64, f1: f64, w: (f64, f64), kind: ConditionKind) -> Self {
        CostLine {
            threshold,
            loss_at_0: 2.0 * w.1 * f1,
            loss_at_1: 2.0 * w.0 * (1.0 - f0),
            kind,
        }
    }

    pub(crate) fn from_counts(
        d: &ScoredDataset,
        threshold: ThresholdInterval,
        counts: [usize; 2],
        kind: ConditionKind,
    ) -> Self {
        let rate = |k: Class| {
            let n_k = d.count(k);
            if n_k == 0 {
                0.0
            } else {
                counts[k.index()] as f64 / n_k as f64
            }
        };
        let f0 = rate(Class::Positive);
        let f1 = rate(Class::Negative);
        CostLine::from_rates(threshold, f0, f1, kind.class_weights(d), kind)
    }

    /// Loss at condition `v`: `(1 - v) loss_at_0 + v loss_at_1`.
    pub fn eval(&self, v: f64) -> f64 {
        (1.0 - v) * self.loss_at_0 + v * self.loss_at_1
    }

    pub fn intercept(&self) -> f64 {
        self.loss_at_0
    }

    pub fn slope(&self) -> f64 {
        self.loss_at_1 - self.loss_at_0
    }
}

/// The cost line of the crisp classifier obtained by thresholding at any `t`
/// in `interval` (evaluated at `interval.lo`, or as "all negative" when that
/// is `-inf`).
pub fn cost_line(d: &ScoredDataset, interval: ThresholdInterval, kind: ConditionKind) -> CostLine {
    let counts = if interval.lo == f64::NEG_INFINITY {
        [0, 0]
    } else {
        d.counts_at_or_below(interval.lo)
    };
    CostLine::from_counts(d, interval, counts, kind)
}

/// One line per cut: `n' + 1` lines for `n'` distinct scores, ordered from
/// "all negative" to "all positive".
pub fn all_cost_lines(d: &ScoredDataset, kind: ConditionKind) -> Vec<CostLine> {
    d.cuts()
        .into_iter()
        .map(|cut| CostLine::from_counts(d, cut.interval, cut.counts, kind))
        .collect()
}

/// `Q_c(t; c) = 2 {c pi0 (1 - F_0(t)) + (1 - c) pi1 F_1(t)}`.
pub fn q_cost(d: &ScoredDataset, t: f64, c: f64) -> f64 {
    cost_line(d, ThresholdInterval::point(t), ConditionKind::CostProportion).eval(c)
}

/// `Q_sk(t; z) = z (1 - F_0(t)) + (1 - z) F_1(t)`.
pub fn q_skew(d: &ScoredDataset, t: f64, z: f64) -> f64 {
    cost_line(d, ThresholdInterval::point(t), ConditionKind::Skew).eval(z)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ThresholdChoiceMethod {
    /// The same threshold for every condition.
    ScoreFixed(f64),
    /// Predict a fixed fraction of the samples positive.
    RateFixed(f64),
    /// Predict a fraction of samples positive equal to the condition.
    RateDriven,
    /// Use the condition itself as threshold (probability scores).
    Probabilistic,
    /// Minimise the loss at the given condition.
    Optimal,
}

impl ThresholdChoiceMethod {
    pub fn is_fixed(&self) -> bool {
        matches!(
            self,
            ThresholdChoiceMethod::ScoreFixed(_) | ThresholdChoiceMethod::RateFixed(_)
        )
    }
}

impl fmt::Display for ThresholdChoiceMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdChoiceMethod::ScoreFixed(t) => write!(f, "fixed:{t}"),
            ThresholdChoiceMethod::RateFixed(r) => write!(f, "rate:{r}"),
            ThresholdChoiceMethod::RateDriven => f.write_str("rate-driven"),
            ThresholdChoiceMethod::Probabilistic => f.write_str("prob"),
            ThresholdChoiceMethod::Optimal => f.write_str("optimal"),
        }
    }
}

impl FromStr for ThresholdChoiceMethod {
    type Err = Error;

    /// Parses `fixed:<t>`, `rate:<r>`, `rate-driven`, `prob` or `optimal`.
    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownMethod(s.to_string());
        let s_trim = s.trim();
        match s_trim {
            "rate-driven" => return Ok(ThresholdChoiceMethod::RateDriven),
            "prob" => return Ok(ThresholdChoiceMethod::Probabilistic),
            "optimal" => return Ok(ThresholdChoiceMethod::Optimal),
            _ => {}
        }
        let (name, arg) = s_trim.split_once(':').ok_or_else(unknown)?;
        let value: f64 = arg.trim().parse().map_err(|_| unknown())?;
        match name {
            "fixed" if value.is_finite() => Ok(ThresholdChoiceMethod::ScoreFixed(value)),
            "rate" if (0.0..=1.0).contains(&value) => Ok(ThresholdChoiceMethod::RateFixed(value)),
            _ => Err(unknown()),
        }
    }
}

/// Index of the cut used for a rate bracket: `k = floor(r (n + 1))` capped
/// at `n`, snapped down to the nearest cut boundary so tie groups are never
/// split.
pub(crate) fn rate_cut_index(d: &ScoredDataset, rate: f64) -> usize {
    let n = d.len();
    let k = ((rate * (n + 1) as f64).floor() as usize).min(n);
    snap_down(d, k)
}

/// The cut predicting the most samples positive without exceeding `k`.
pub(crate) fn snap_down(d: &ScoredDataset, k: usize) -> usize {
    d.last_cut_within(k)
}

/// Threshold interval chosen by `method` at `cond`.
///
/// Optimal ties return the smallest interval covering every minimising cut.
pub fn choose_threshold(
    d: &ScoredDataset,
    method: &ThresholdChoiceMethod,
    cond: OperatingCondition,
) -> Result<ThresholdInterval> {
    check_unit(cond.value)?;
    match *method {
        ThresholdChoiceMethod::ScoreFixed(t) => Ok(ThresholdInterval::point(t)),
        ThresholdChoiceMethod::Probabilistic => {
            d.require_probabilities()?;
            Ok(ThresholdInterval::point(cond.value))
        }
        ThresholdChoiceMethod::RateFixed(r) => {
            check_unit(r)?;
            Ok(d.cuts()[rate_cut_index(d, r)].interval)
        }
        ThresholdChoiceMethod::RateDriven => Ok(d.cuts()[rate_cut_index(d, cond.value)].interval),
        ThresholdChoiceMethod::Optimal => Ok(optimal_interval(d, cond)),
    }
}

fn optimal_interval(d: &ScoredDataset, cond: OperatingCondition) -> ThresholdInterval {
    let lines = all_cost_lines(d, cond.kind);
    let losses: Vec<f64> = lines.iter().map(|l| l.eval(cond.value)).collect();
    let best = losses.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = 1e-12 * best.abs().max(1.0);
    lines
        .iter()
        .zip(&losses)
        .filter(|(_, &q)| q - best <= tol)
        .map(|(l, _)| l.threshold)
        .reduce(|a, b| a.union(&b))
        .expect("at least two cost lines")
}

/// Loss of `method` at `cond`.
pub fn loss_at(d: &ScoredDataset, method: &ThresholdChoiceMethod, cond: OperatingCondition) -> Result<f64> {
    let interval = choose_threshold(d, method, cond)?;
    let line = match method {
        ThresholdChoiceMethod::Optimal => all_cost_lines(d, cond.kind)
            .into_iter()
            .map(|l| l.eval(cond.value))
            .fold(f64::INFINITY, f64::min),
        _ => cost_line(d, interval, cond.kind).eval(cond.value),
    };
    Ok(line)
}
