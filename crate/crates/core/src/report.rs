//! Metrics reports and multi-classifier comparisons.
//!
//! Report values keep full precision in memory; JSON output rounds them to
//! 9 significant digits on the way out. Keys appear in field order.

use serde::{Serialize, Serializer};

use crate::cost_model::{ConditionKind, ThresholdChoiceMethod};
use crate::curves::{brier_score, expected_loss_with, Weight};
use crate::dataset::ScoredDataset;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::roc::roc_curve;

/// `x` rounded to 9 significant digits.
pub fn round_sig9(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

/// `x` rounded to 9 significant digits, printed without exponent.
pub fn format_sig9(x: f64) -> String {
    format!("{}", round_sig9(x))
}

fn sig9<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(round_sig9(*x))
}

fn sig9_opt<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_f64(round_sig9(*v)),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixedArea {
    pub method: String,
    #[serde(serialize_with = "sig9")]
    pub area: f64,
}

/// Expected losses of each method under one condition kind.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KindAreas {
    #[serde(serialize_with = "sig9")]
    pub optimal: f64,
    #[serde(serialize_with = "sig9")]
    pub rate_driven: f64,
    /// Null when scores are not probabilities.
    #[serde(serialize_with = "sig9_opt")]
    pub brier: Option<f64>,
    pub fixed: Vec<FixedArea>,
    /// Closed form of the rate-driven area in terms of AUC (uniform weight
    /// only).
    #[serde(serialize_with = "sig9_opt")]
    pub rate_driven_closed_form: Option<f64>,
    #[serde(serialize_with = "sig9_opt")]
    pub rate_driven_delta: Option<f64>,
    /// Brier score the Brier-curve area should equal (uniform weight only).
    #[serde(serialize_with = "sig9_opt")]
    pub brier_closed_form: Option<f64>,
    #[serde(serialize_with = "sig9_opt")]
    pub brier_delta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsReport {
    pub n: usize,
    pub n0: usize,
    pub n1: usize,
    #[serde(serialize_with = "sig9")]
    pub pi0: f64,
    #[serde(serialize_with = "sig9")]
    pub pi1: f64,
    #[serde(serialize_with = "sig9")]
    pub auc: f64,
    #[serde(serialize_with = "sig9")]
    pub auch: f64,
    #[serde(serialize_with = "sig9_opt")]
    pub bs: Option<f64>,
    #[serde(serialize_with = "sig9_opt")]
    pub bs0: Option<f64>,
    #[serde(serialize_with = "sig9_opt")]
    pub bs1: Option<f64>,
    pub weight: &'static str,
    pub cost_proportion: KindAreas,
    pub skew: KindAreas,
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Clone, Debug)]
pub struct MetricsOptions {
    /// Fixed methods to report alongside optimal, rate-driven and Brier.
    pub methods: Vec<ThresholdChoiceMethod>,
    pub weight: Weight,
    pub grid: usize,
    pub exec: Execution,
}

impl Default for MetricsOptions {
    fn default() -> Self {
        MetricsOptions {
            methods: Vec::new(),
            weight: Weight::Uniform,
            grid: crate::curves::DEFAULT_GRID,
            exec: Execution::default(),
        }
    }
}

fn kind_areas(d: &ScoredDataset, kind: ConditionKind, opts: &MetricsOptions) -> Result<KindAreas> {
    let loss = |m: &ThresholdChoiceMethod| expected_loss_with(d, m, kind, &opts.weight, opts.grid, opts.exec);
    let optimal = loss(&ThresholdChoiceMethod::Optimal)?;
    let rate = loss(&ThresholdChoiceMethod::RateDriven)?;
    let brier = match loss(&ThresholdChoiceMethod::Probabilistic) {
        Ok(r) => Some(r),
        Err(Error::ScoreOutOfRange(_)) => None,
        Err(e) => return Err(e),
    };
    let mut fixed = Vec::new();
    for m in opts.methods.iter().filter(|m| m.is_fixed()) {
        fixed.push(FixedArea {
            method: m.to_string(),
            area: loss(m)?.area,
        });
    }
    let brier_closed_form = brier.as_ref().and_then(|r| r.closed_form);
    Ok(KindAreas {
        optimal: optimal.area,
        rate_driven: rate.area,
        brier: brier.as_ref().map(|r| r.area),
        fixed,
        rate_driven_closed_form: rate.closed_form,
        rate_driven_delta: rate.closed_form.map(|cf| rate.area - cf),
        brier_closed_form,
        brier_delta: brier
            .as_ref()
            .and_then(|r| r.closed_form.map(|cf| r.area - cf)),
    })
}

/// All metrics for one dataset. Needs both classes.
pub fn metrics(d: &ScoredDataset, opts: &MetricsOptions) -> Result<MetricsReport> {
    let roc = roc_curve(d)?;
    let bs = match brier_score(d) {
        Ok(b) => Some(b),
        Err(Error::ScoreOutOfRange(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(MetricsReport {
        n: d.len(),
        n0: d.n0(),
        n1: d.n1(),
        pi0: d.pi0(),
        pi1: d.pi1(),
        auc: roc.auc(),
        auch: roc.convex_hull().auch()?,
        bs: bs.map(|b| b.bs),
        bs0: bs.map(|b| b.bs0),
        bs1: bs.map(|b| b.bs1),
        weight: opts.weight.name(),
        cost_proportion: kind_areas(d, ConditionKind::CostProportion, opts)?,
        skew: kind_areas(d, ConditionKind::Skew, opts)?,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareRow {
    pub name: String,
    pub area: f64,
}

/// Area under one method's curve for every dataset, ascending by area.
/// Equal areas keep input order.
pub fn compare(
    inputs: &[(String, ScoredDataset)],
    method: &ThresholdChoiceMethod,
    kind: ConditionKind,
    weight: &Weight,
    grid: usize,
    exec: Execution,
) -> Result<Vec<CompareRow>> {
    let areas = exec.map(inputs, |(name, d)| {
        expected_loss_with(d, method, kind, weight, grid, Execution::Sequential).map(|r| CompareRow {
            name: name.clone(),
            area: r.area,
        })
    });
    let mut rows = areas.into_iter().collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.area.total_cmp(&b.area));
    Ok(rows)
}

/// Tab-separated `input`, `area` table with a header row.
pub fn compare_tsv(rows: &[CompareRow]) -> String {
    let mut out = String::from("input\tarea\n");
    for r in rows {
        out.push_str(&r.name);
        out.push('\t');
        out.push_str(&format_sig9(r.area));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate, Family, Fixture, GeneratorSpec};

    #[test]
    fn rounding() {
        assert_eq!(round_sig9(5.0 / 6.0), 0.833333333);
        assert_eq!(round_sig9(19.0 / 112.0), 0.169642857);
        assert_eq!(round_sig9(0.0), 0.0);
        assert_eq!(round_sig9(123456789012.0), 123456789000.0);
        assert_eq!(format_sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(format_sig9(2.0), "2");
    }

    #[test]
    fn fig2_report() {
        let d = generate(&GeneratorSpec::fixture(Fixture::Fig2)).unwrap();
        let r = metrics(&d, &MetricsOptions::default()).unwrap();
        assert!((r.auc - 5.0 / 6.0).abs() < 1e-12);
        assert!((r.cost_proportion.rate_driven - 19.0 / 112.0).abs() < 1e-12);
        assert!((r.cost_proportion.rate_driven_closed_form.unwrap() - 0.170068).abs() < 1e-6);
        let json = r.to_json();
        assert!(json.contains("\"auc\": 0.833333333"));
        let keys: Vec<usize> = ["\"n\"", "\"auc\"", "\"auch\"", "\"bs\"", "\"cost_proportion\"", "\"skew\""]
            .iter()
            .map(|k| json.find(k).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn non_probability_scores_have_no_brier() {
        let d = ScoredDataset::from_scores(&[-1.0, 2.0, 3.0], &[0, 1, 0]).unwrap();
        let r = metrics(&d, &MetricsOptions::default()).unwrap();
        assert_eq!(r.bs, None);
        assert_eq!(r.skew.brier, None);
        assert!(r.to_json().contains("\"bs\": null"));
    }

    #[test]
    fn fixed_methods_are_listed() {
        let d = generate(&GeneratorSpec::fixture(Fixture::Fig2)).unwrap();
        let opts = MetricsOptions {
            methods: vec![
                ThresholdChoiceMethod::ScoreFixed(0.5),
                ThresholdChoiceMethod::Optimal,
                ThresholdChoiceMethod::RateFixed(0.5),
            ],
            ..MetricsOptions::default()
        };
        let r = metrics(&d, &opts).unwrap();
        let names: Vec<&str> = r.skew.fixed.iter().map(|f| f.method.as_str()).collect();
        assert_eq!(names, vec!["fixed:0.5", "rate:0.5"]);
    }

    #[test]
    fn compare_orders_by_area() {
        let worst = generate(&GeneratorSpec::new(Family::Worst, 50, 50)).unwrap();
        let perfect = generate(&GeneratorSpec::new(Family::Perfect, 50, 50)).unwrap();
        let inputs = vec![("worst".to_string(), worst), ("perfect".to_string(), perfect)];
        for exec in [Execution::Sequential, Execution::Parallel] {
            let rows = compare(
                &inputs,
                &ThresholdChoiceMethod::RateDriven,
                ConditionKind::Skew,
                &Weight::Uniform,
                crate::curves::DEFAULT_GRID,
                exec,
            )
            .unwrap();
            assert_eq!(rows[0].name, "perfect");
            assert!(rows[0].area < rows[1].area);
        }
    }
}
