//! Cost-space curves for each threshold choice method, their exact areas,
//! expected losses under a condition weight, and the closed forms linking
//! them to AUC and the Brier score.
//!
//! Every curve is a [`PiecewiseLinearCurve`] over the condition axis
//! `[0, 1]`. Rate-driven and Brier curves jump at bracket and score
//! boundaries; segments carry both endpoint values so areas are exact
//! trapezoid sums with no quadrature involved.

use std::io::Read;

use serde::Serialize;

use crate::cost_model::{
    all_cost_lines, choose_threshold, cost_line, snap_down, ConditionKind, CostLine,
    OperatingCondition, ThresholdChoiceMethod,
};
use crate::dataset::{Class, ScoredDataset, ScoredSample};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::roc::{auc, upper_hull_indices};

/// Default number of grid points for weighted quadrature.
pub const DEFAULT_GRID: usize = 10_001;

const RANGE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Segment {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl Segment {
    pub fn width(&self) -> f64 {
        self.x_hi - self.x_lo
    }

    pub fn area(&self) -> f64 {
        self.width() * (self.y_lo + self.y_hi) * 0.5
    }

    pub fn eval(&self, x: f64) -> f64 {
        let w = self.width();
        if w == 0.0 {
            return self.y_lo;
        }
        self.y_lo + (self.y_hi - self.y_lo) * ((x - self.x_lo) / w)
    }

    fn along(line: &CostLine, x_lo: f64, x_hi: f64) -> Segment {
        Segment {
            x_lo,
            x_hi,
            y_lo: line.eval(x_lo),
            y_hi: line.eval(x_hi),
        }
    }
}

/// Loss against operating condition, as abutting linear segments covering
/// `[0, 1]`. Jumps between segments are allowed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PiecewiseLinearCurve {
    kind: ConditionKind,
    label: String,
    segments: Vec<Segment>,
}

impl PiecewiseLinearCurve {
    pub fn new(kind: ConditionKind, label: impl Into<String>, segments: Vec<Segment>) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidCurve(msg));
        let (Some(first), Some(last)) = (segments.first(), segments.last()) else {
            return invalid("no segments".into());
        };
        if first.x_lo != 0.0 || last.x_hi != 1.0 {
            return invalid(format!("segments span [{}, {}], not [0, 1]", first.x_lo, last.x_hi));
        }
        for (i, s) in segments.iter().enumerate() {
            if s.x_lo > s.x_hi {
                return invalid(format!("segment {i} has x_lo > x_hi"));
            }
            if i > 0 && segments[i - 1].x_hi != s.x_lo {
                return invalid(format!("segment {i} does not abut its predecessor"));
            }
            for y in [s.y_lo, s.y_hi] {
                if !(y >= -RANGE_TOL && y <= kind.max_loss() + RANGE_TOL) {
                    return invalid(format!("segment {i} has loss {y} outside [0, {}]", kind.max_loss()));
                }
            }
        }
        Ok(PiecewiseLinearCurve {
            kind,
            label: label.into(),
            segments,
        })
    }

    pub fn kind(&self) -> ConditionKind {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Exact area: sum of segment trapezoids.
    pub fn area(&self) -> f64 {
        self.segments.iter().map(Segment::area).sum()
    }

    /// Value at `v`, right-continuous at jumps; `v = 1` gives the last
    /// segment's right end.
    pub fn eval(&self, v: f64) -> f64 {
        let i = self.segments.partition_point(|s| s.x_hi <= v);
        match self.segments.get(i) {
            Some(s) => s.eval(v),
            None => self.segments[self.segments.len() - 1].y_hi,
        }
    }

    /// Values at `grid` evenly spaced points `i / (grid - 1)`.
    pub fn sample(&self, grid: usize, exec: Execution) -> Vec<f64> {
        exec.map_range(grid, |i| self.eval(grid_point(i, grid)))
    }

    /// Largest `|curve(v) - f(v)|` over the grid.
    pub fn sup_distance<F>(&self, f: F, grid: usize, exec: Execution) -> f64
    where
        F: Fn(f64) -> f64 + Sync + Send,
    {
        exec.map_range(grid, |i| {
            let v = grid_point(i, grid);
            (self.eval(v) - f(v)).abs()
        })
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn grid_point(i: usize, grid: usize) -> f64 {
    if grid <= 1 {
        0.0
    } else {
        i as f64 / (grid - 1) as f64
    }
}

/// Hull cut indices and, for each hull segment, the condition at which the
/// optimal line switches to the next hull vertex.
fn envelope(d: &ScoredDataset, kind: ConditionKind) -> (Vec<usize>, Vec<f64>) {
    let cuts = d.cuts();
    let counts: Vec<[usize; 2]> = cuts.iter().map(|c| c.counts).collect();
    let hull = upper_hull_indices(&counts);
    let (w0, w1) = kind.class_weights(d);
    let rate = |class: Class, delta: usize| {
        let n_k = d.count(class);
        if n_k == 0 {
            0.0
        } else {
            delta as f64 / n_k as f64
        }
    };
    let mut switches = Vec::with_capacity(hull.len().saturating_sub(1));
    let mut prev = 0.0f64;
    for w in hull.windows(2) {
        let (a, b) = (counts[w[0]], counts[w[1]]);
        let up1 = w1 * rate(Class::Negative, b[1] - a[1]);
        let up0 = w0 * rate(Class::Positive, b[0] - a[0]);
        let c = if up0 + up1 == 0.0 { prev } else { up1 / (up0 + up1) };
        prev = c.clamp(prev, 1.0);
        switches.push(prev);
    }
    (hull, switches)
}

/// Conditions at which the optimal threshold moves along the ROC convex
/// hull, one per hull segment, ascending.
pub fn optimal_switch_points(d: &ScoredDataset, kind: ConditionKind) -> Vec<f64> {
    envelope(d, kind).1
}

/// Lower envelope of all cost lines, walked along the ROC convex hull: hull
/// vertex `j` is optimal between the switch points of its two adjacent hull
/// segments.
pub fn optimal_cost_curve(d: &ScoredDataset, kind: ConditionKind) -> PiecewiseLinearCurve {
    let (hull, switches) = envelope(d, kind);
    let lines = all_cost_lines(d, kind);
    let mut segments = Vec::with_capacity(hull.len());
    for (j, &cut) in hull.iter().enumerate() {
        let x_lo = if j == 0 { 0.0 } else { switches[j - 1] };
        let x_hi = if j == hull.len() - 1 { 1.0 } else { switches[j] };
        if x_hi > x_lo {
            segments.push(Segment::along(&lines[cut], x_lo, x_hi));
        }
    }
    PiecewiseLinearCurve::new(kind, "optimal", segments).expect("envelope covers [0, 1]")
}

/// `n + 1` segments of width `1 / (n + 1)`; segment `k` follows the cost
/// line predicting the `k` lowest-scored samples positive (or fewer, when
/// that would split a tie group).
pub fn rate_driven_curve(d: &ScoredDataset, kind: ConditionKind) -> PiecewiseLinearCurve {
    let n = d.len();
    let lines = all_cost_lines(d, kind);
    let brackets = (n + 1) as f64;
    let segments = (0..=n)
        .map(|k| {
            let line = &lines[snap_down(d, k)];
            Segment::along(line, k as f64 / brackets, (k + 1) as f64 / brackets)
        })
        .collect();
    PiecewiseLinearCurve::new(kind, "rate-driven", segments).expect("brackets cover [0, 1]")
}

/// `Q(v; v)` against `v`: the loss when the threshold equals the condition.
/// Breakpoints sit at 0, 1 and every distinct score in between; the CDFs
/// are constant between breakpoints so each piece is exactly linear.
pub fn brier_curve(d: &ScoredDataset, kind: ConditionKind) -> Result<PiecewiseLinearCurve> {
    d.require_probabilities()?;
    let mut breaks = vec![0.0];
    breaks.extend(
        d.groups()
            .iter()
            .map(|g| g.score)
            .filter(|&s| s > 0.0 && s < 1.0),
    );
    breaks.push(1.0);
    let segments = breaks
        .windows(2)
        .map(|w| {
            let counts = d.counts_at_or_below(w[0]);
            let line = CostLine::from_counts(d, crate::dataset::ThresholdInterval::point(w[0]), counts, kind);
            Segment::along(&line, w[0], w[1])
        })
        .collect();
    PiecewiseLinearCurve::new(kind, "brier", segments)
}

/// A score-fixed or rate-fixed method as a single cost line over `[0, 1]`.
pub fn fixed_method_curve(
    d: &ScoredDataset,
    method: &ThresholdChoiceMethod,
    kind: ConditionKind,
) -> Result<PiecewiseLinearCurve> {
    if !method.is_fixed() {
        return Err(Error::NotAFixedMethod(method.to_string()));
    }
    // the condition does not influence a fixed method
    let cond = OperatingCondition::new(kind, 0.0)?;
    let interval = choose_threshold(d, method, cond)?;
    let line = cost_line(d, interval, kind);
    PiecewiseLinearCurve::new(kind, method.to_string(), vec![Segment::along(&line, 0.0, 1.0)])
}

/// The cost curve `Q(T(v); v)` of any threshold choice method.
pub fn method_curve(
    d: &ScoredDataset,
    method: &ThresholdChoiceMethod,
    kind: ConditionKind,
) -> Result<PiecewiseLinearCurve> {
    match method {
        ThresholdChoiceMethod::Optimal => Ok(optimal_cost_curve(d, kind)),
        ThresholdChoiceMethod::RateDriven => Ok(rate_driven_curve(d, kind)),
        ThresholdChoiceMethod::Probabilistic => brier_curve(d, kind),
        ThresholdChoiceMethod::ScoreFixed(_) | ThresholdChoiceMethod::RateFixed(_) => {
            fixed_method_curve(d, method, kind)
        }
    }
}

pub fn area(curve: &PiecewiseLinearCurve) -> f64 {
    curve.area()
}

/// Tabulated density on `[0, 1]`, linearly interpolated and zero outside
/// the table.
#[derive(Clone, Debug, PartialEq)]
pub struct Density {
    points: Vec<(f64, f64)>,
}

impl Density {
    pub const NORMALIZATION_TOL: f64 = 1e-6;

    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidDensity("need at least two rows".into()));
        }
        for (i, &(v, w)) in points.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidDensity(format!("row {}: v = {v} outside [0, 1]", i + 1)));
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidDensity(format!("row {}: invalid weight {w}", i + 1)));
            }
            if i > 0 && points[i - 1].0 >= v {
                return Err(Error::InvalidDensity(format!("row {}: v is not ascending", i + 1)));
            }
        }
        let integral: f64 = points
            .windows(2)
            .map(|p| (p[1].0 - p[0].0) * (p[0].1 + p[1].1) * 0.5)
            .sum();
        if (integral - 1.0).abs() > Self::NORMALIZATION_TOL {
            return Err(Error::DensityNotNormalized { integral });
        }
        Ok(Density { points })
    }

    pub fn eval(&self, v: f64) -> f64 {
        let (first, last) = (self.points[0], self.points[self.points.len() - 1]);
        if v < first.0 || v > last.0 {
            return 0.0;
        }
        let i = self.points.partition_point(|p| p.0 <= v);
        if i == self.points.len() {
            return last.1;
        }
        let (a, b) = (self.points[i - 1], self.points[i]);
        a.1 + (b.1 - a.1) * (v - a.0) / (b.0 - a.0)
    }

    /// Reads `v,w` rows; an optional `v,w` header and `#` comments are
    /// skipped.
    pub fn read<R: Read>(reader: R) -> Result<Density> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);
        let mut points = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Csv {
                line: e.position().map_or(0, |p| p.line()),
                message: e.to_string(),
            })?;
            let line = record.position().map_or(0, |p| p.line());
            if i == 0 && record.len() == 2 && &record[0] == "v" && &record[1] == "w" {
                continue;
            }
            let parse = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|_| Error::InvalidDensity(format!("line {line}: cannot parse {s:?}")))
            };
            if record.len() != 2 {
                return Err(Error::MalformedRecord {
                    line,
                    found: record.len(),
                });
            }
            points.push((parse(&record[0])?, parse(&record[1])?));
        }
        Density::new(points)
    }
}

/// Distribution of operating conditions.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum Weight {
    #[default]
    Uniform,
    Density(Density),
}

impl Weight {
    pub fn name(&self) -> &'static str {
        match self {
            Weight::Uniform => "uniform",
            Weight::Density(_) => "density",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpectedLossReport {
    pub method: String,
    pub kind: ConditionKind,
    pub weight: &'static str,
    /// Expected loss; the exact curve area under the uniform weight.
    pub area: f64,
    /// Closed-form prediction, where one exists for the method.
    pub closed_form: Option<f64>,
    /// AUC entering the closed form.
    pub auc_used: Option<f64>,
}

/// Expected loss with the default grid and execution strategy.
pub fn expected_loss(
    d: &ScoredDataset,
    method: &ThresholdChoiceMethod,
    kind: ConditionKind,
    weight: &Weight,
) -> Result<ExpectedLossReport> {
    expected_loss_with(d, method, kind, weight, DEFAULT_GRID, Execution::default())
}

/// Uniform weight: exact area of the method's curve. Tabulated density:
/// composite trapezoid rule for `Q(T(v); v) w(v)` on `grid` points.
pub fn expected_loss_with(
    d: &ScoredDataset,
    method: &ThresholdChoiceMethod,
    kind: ConditionKind,
    weight: &Weight,
    grid: usize,
    exec: Execution,
) -> Result<ExpectedLossReport> {
    let curve = method_curve(d, method, kind)?;
    let area = match weight {
        Weight::Uniform => curve.area(),
        Weight::Density(density) => weighted_area(&curve, density, grid, exec)?,
    };
    let (closed_form, auc_used) = match (weight, method) {
        (Weight::Uniform, ThresholdChoiceMethod::RateDriven) if d.require_both_classes().is_ok() => {
            let a = auc(d)?;
            let cf = match kind {
                ConditionKind::CostProportion => rate_driven_closed_form(d.pi0(), d.pi1(), a),
                ConditionKind::Skew => rate_driven_skew_closed_form(a),
            };
            (Some(cf), Some(a))
        }
        (Weight::Uniform, ThresholdChoiceMethod::Probabilistic) => {
            let bs = brier_score(d)?;
            let cf = match kind {
                ConditionKind::CostProportion => bs.bs,
                ConditionKind::Skew => 0.5 * (bs.bs0 + bs.bs1),
            };
            (Some(cf), None)
        }
        _ => (None, None),
    };
    Ok(ExpectedLossReport {
        method: method.to_string(),
        kind,
        weight: weight.name(),
        area,
        closed_form,
        auc_used,
    })
}

/// Composite trapezoid rule for `curve(v) w(v)` on `grid` evenly spaced
/// points.
pub fn weighted_area(
    curve: &PiecewiseLinearCurve,
    density: &Density,
    grid: usize,
    exec: Execution,
) -> Result<f64> {
    if grid < 2 {
        return Err(Error::InvalidSpec(format!("quadrature grid needs >= 2 points, got {grid}")));
    }
    let h = 1.0 / (grid - 1) as f64;
    let f = |i: usize| {
        let v = grid_point(i, grid);
        let end_weight = if i == 0 || i == grid - 1 { 0.5 } else { 1.0 };
        end_weight * curve.eval(v) * density.eval(v)
    };
    Ok(h * exec.sum_range(grid, f))
}

/// `2 pi1 pi0 (1 - AUC) + 1/3 - pi1 pi0`, the continuous-case expected loss
/// of the rate-driven method over uniform cost proportions.
pub fn rate_driven_closed_form(pi0: f64, pi1: f64, auc: f64) -> f64 {
    2.0 * pi1 * pi0 * (1.0 - auc) + 1.0 / 3.0 - pi1 * pi0
}

/// `(1 - AUC) / 2 + 1/12`, the skew counterpart.
pub fn rate_driven_skew_closed_form(auc: f64) -> f64 {
    (1.0 - auc) / 2.0 + 1.0 / 12.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BrierScore {
    pub bs: f64,
    /// Mean of `s^2` over class 0 (zero for an empty class).
    pub bs0: f64,
    /// Mean of `(1 - s)^2` over class 1 (zero for an empty class).
    pub bs1: f64,
}

/// Mean squared difference between score and class index.
pub fn brier_score(d: &ScoredDataset) -> Result<BrierScore> {
    d.require_probabilities()?;
    let mut sums = [0.0f64; 2];
    for s in d.samples() {
        let target = s.label.index() as f64;
        sums[s.label.index()] += (s.score - target).powi(2);
    }
    let mean = |k: usize, n: usize| if n == 0 { 0.0 } else { sums[k] / n as f64 };
    Ok(BrierScore {
        bs: (sums[0] + sums[1]) / d.len() as f64,
        bs0: mean(0, d.n0()),
        bs1: mean(1, d.n1()),
    })
}

/// Replaces scores by `(i - 1) / (n - 1)` following the ascending score
/// order (ties keep input order). Row order and labels are unchanged.
pub fn evenly_spaced_rescore(d: &ScoredDataset) -> Result<ScoredDataset> {
    let n = d.len();
    if n < 2 {
        return Err(Error::TooFewSamples { n, min: 2 });
    }
    let samples = d.samples();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| samples[a].score.total_cmp(&samples[b].score));
    let mut rescored = samples.to_vec();
    for (rank, &i) in order.iter().enumerate() {
        rescored[i] = ScoredSample::new(rank as f64 / (n - 1) as f64, samples[i].label);
    }
    ScoredDataset::new(rescored)
}
