//! ROC curves, their convex hull, AUC and AUCH.

use serde::Serialize;

use crate::dataset::{Cut, ScoredDataset, ThresholdInterval};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RocPoint {
    /// `F_1(t)`, false positive rate.
    pub fpr: f64,
    /// `F_0(t)`, true positive rate.
    pub tpr: f64,
    pub threshold: ThresholdInterval,
    /// Samples of each class scored at or below the threshold.
    pub counts: [usize; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RocKind {
    Raw,
    Hull,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RocCurve {
    points: Vec<RocPoint>,
    kind: RocKind,
}

/// One ROC point per cut, from `(0, 0)` to `(1, 1)`. Tie groups holding both
/// classes become a single diagonal step.
pub fn roc_curve(d: &ScoredDataset) -> Result<RocCurve> {
    d.require_both_classes()?;
    let (n0, n1) = (d.n0() as f64, d.n1() as f64);
    let points = d
        .cuts()
        .into_iter()
        .map(|Cut { counts, interval }| RocPoint {
            fpr: counts[1] as f64 / n1,
            tpr: counts[0] as f64 / n0,
            threshold: interval,
            counts,
        })
        .collect();
    Ok(RocCurve {
        points,
        kind: RocKind::Raw,
    })
}

/// Twice the signed area of the triangle `a, b, c` in count space, with
/// class-1 counts on the x axis. Positive when `c` lies left of `a -> b`.
fn cross(a: [usize; 2], b: [usize; 2], c: [usize; 2]) -> i128 {
    let (ax, ay) = (a[1] as i128, a[0] as i128);
    let (bx, by) = (b[1] as i128, b[0] as i128);
    let (cx, cy) = (c[1] as i128, c[0] as i128);
    (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
}

/// Indices of the upper concave hull of cumulative count pairs given in
/// ranking order. Collinear points are dropped.
pub(crate) fn upper_hull_indices(counts: &[[usize; 2]]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(counts.len());
    for (i, &p) in counts.iter().enumerate() {
        while hull.len() >= 2
            && cross(counts[hull[hull.len() - 2]], counts[hull[hull.len() - 1]], p) >= 0
        {
            hull.pop();
        }
        hull.push(i);
    }
    hull
}

impl RocCurve {
    pub fn points(&self) -> &[RocPoint] {
        &self.points
    }

    pub fn kind(&self) -> RocKind {
        self.kind
    }

    pub fn segments(&self) -> usize {
        self.points.len() - 1
    }

    /// Trapezoidal area under the point sequence.
    pub fn area(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) * 0.5)
            .sum()
    }

    pub fn auc(&self) -> f64 {
        self.area()
    }

    /// Area under a hull curve.
    pub fn auch(&self) -> Result<f64> {
        if self.kind != RocKind::Hull {
            return Err(Error::WrongCurveKind { expected: "hull" });
        }
        Ok(self.area())
    }

    /// Upper concave envelope by monotone chain. Orientation tests run on
    /// integer class counts, so collinear points are dropped exactly.
    pub fn convex_hull(&self) -> RocCurve {
        let counts: Vec<[usize; 2]> = self.points.iter().map(|p| p.counts).collect();
        let points = upper_hull_indices(&counts)
            .into_iter()
            .map(|i| self.points[i])
            .collect();
        RocCurve {
            points,
            kind: RocKind::Hull,
        }
    }

    /// Largest tpr the curve reaches at `fpr`, interpolating linearly
    /// between points.
    pub fn tpr_at(&self, fpr: f64) -> f64 {
        let fpr = fpr.clamp(0.0, 1.0);
        let right = self.points.partition_point(|p| p.fpr <= fpr);
        if right > 0 && self.points[right - 1].fpr == fpr {
            return self.points[right - 1].tpr;
        }
        if right == self.points.len() {
            return self.points[right - 1].tpr;
        }
        let (a, b) = (&self.points[right - 1], &self.points[right]);
        a.tpr + (b.tpr - a.tpr) * (fpr - a.fpr) / (b.fpr - a.fpr)
    }

    /// `[{fpr, tpr, t_lo, t_hi}]` with infinite thresholds as null.
    pub fn export(&self) -> Vec<RocPointRecord> {
        self.points
            .iter()
            .map(|p| RocPointRecord {
                fpr: p.fpr,
                tpr: p.tpr,
                t_lo: finite(p.threshold.lo),
                t_hi: finite(p.threshold.hi),
            })
            .collect()
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RocPointRecord {
    pub fpr: f64,
    pub tpr: f64,
    pub t_lo: Option<f64>,
    pub t_hi: Option<f64>,
}

pub fn auc(d: &ScoredDataset) -> Result<f64> {
    Ok(roc_curve(d)?.auc())
}

pub fn auch(d: &ScoredDataset) -> Result<f64> {
    roc_curve(d)?.convex_hull().auch()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate, Fixture, GeneratorSpec};

    fn fixture(f: Fixture) -> ScoredDataset {
        generate(&GeneratorSpec::fixture(f)).unwrap()
    }

    #[test]
    fn fig1_has_eleven_segments_and_five_hull_segments() {
        let roc = roc_curve(&fixture(Fixture::Fig1)).unwrap();
        assert_eq!(roc.points().len(), 12);
        assert_eq!(roc.segments(), 11);
        assert_eq!(roc.convex_hull().segments(), 5);
    }

    #[test]
    fn fig2_curve_and_hull() {
        let roc = roc_curve(&fixture(Fixture::Fig2)).unwrap();
        assert_eq!(roc.points().len(), 8);
        assert!((roc.auc() - 5.0 / 6.0).abs() < 1e-12);

        let hull = roc.convex_hull();
        let vertices: Vec<(f64, f64)> = hull.points().iter().map(|p| (p.fpr, p.tpr)).collect();
        assert_eq!(
            vertices,
            vec![(0.0, 0.0), (0.0, 0.75), (2.0 / 3.0, 1.0), (1.0, 1.0)]
        );
        let auch = hull.auch().unwrap();
        assert!((auch - 11.0 / 12.0).abs() < 1e-12);
        assert!(auch > roc.auc());

        // the fifth and sixth points lie strictly under the hull
        for p in &roc.points()[4..6] {
            assert!(hull.tpr_at(p.fpr) > p.tpr);
        }
    }

    #[test]
    fn fig6_auc() {
        let a = auc(&fixture(Fixture::Fig6)).unwrap();
        assert!((a - 7.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn perfect_and_reversed_rankings() {
        let perfect = ScoredDataset::from_scores(&[0.1, 0.9], &[0, 1]).unwrap();
        let roc = roc_curve(&perfect).unwrap();
        let pts: Vec<(f64, f64)> = roc.points().iter().map(|p| (p.fpr, p.tpr)).collect();
        assert_eq!(pts, vec![(0.0, 0.0), (0.0, 1.0), (1.0, 1.0)]);
        assert_eq!(roc.auc(), 1.0);

        let reversed = ScoredDataset::from_scores(&[0.9, 0.1], &[0, 1]).unwrap();
        assert_eq!(auc(&reversed).unwrap(), 0.0);
    }

    #[test]
    fn ties_make_one_diagonal_step() {
        let d = ScoredDataset::from_scores(&[0.5, 0.5, 0.5, 0.5], &[0, 1, 0, 1]).unwrap();
        let roc = roc_curve(&d).unwrap();
        assert_eq!(roc.points().len(), 2);
        assert_eq!(roc.auc(), 0.5);
    }

    #[test]
    fn convex_curve_is_its_own_hull() {
        let d = ScoredDataset::from_scores(&[0.1, 0.2, 0.3, 0.4], &[0, 0, 1, 1]).unwrap();
        let roc = roc_curve(&d).unwrap();
        let hull = roc.convex_hull();
        assert_eq!(hull.auch().unwrap(), roc.auc());
        // collinear raw points are dropped from the hull
        assert_eq!(hull.points().len(), 3);
    }

    #[test]
    fn auch_rejects_raw_curves() {
        let roc = roc_curve(&fixture(Fixture::Fig2)).unwrap();
        assert!(matches!(roc.auch(), Err(Error::WrongCurveKind { .. })));
    }

    #[test]
    fn single_class_is_rejected() {
        let d = ScoredDataset::from_scores(&[0.1, 0.2], &[0, 0]).unwrap();
        assert!(matches!(roc_curve(&d), Err(Error::SingleClass { .. })));
    }

    #[test]
    fn export_uses_null_for_infinite_ends() {
        let roc = roc_curve(&fixture(Fixture::Fig2)).unwrap();
        let json = serde_json::to_string(&roc.export()[0]).unwrap();
        assert_eq!(json, r#"{"fpr":0.0,"tpr":0.0,"t_lo":null,"t_hi":0.05}"#);
    }
}
