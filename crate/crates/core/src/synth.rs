//! Fixture datasets and parametric synthetic rankers.

use std::fmt;
use std::str::FromStr;

use crate::dataset::{Class, ScoredDataset, ScoredSample};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Every class-0 sample ranked below every class-1 sample.
    Perfect,
    /// Every class-1 sample ranked below every class-0 sample.
    Worst,
    /// Classes interleave 1, 0, 1, 0, ... from the lowest score up.
    Alternating,
    /// Uniform scores, labels drawn independently with P(class 0) = n0 / n.
    Random,
    Fixture,
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "perfect" => Ok(Family::Perfect),
            "worst" => Ok(Family::Worst),
            "alternating" => Ok(Family::Alternating),
            "random" => Ok(Family::Random),
            "fixture" => Ok(Family::Fixture),
            other => Err(Error::InvalidSpec(format!("unknown family {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fixture {
    /// 15 samples, 11 distinct scores.
    Fig1,
    /// 7 samples, no ties.
    Fig2,
    /// 24 evenly spaced scores `j / 23`.
    Fig6,
    /// 11 samples from a perfectly calibrated classifier.
    Fig7,
}

impl Fixture {
    pub const ALL: [Fixture; 4] = [Fixture::Fig1, Fixture::Fig2, Fixture::Fig6, Fixture::Fig7];

    pub fn name(self) -> &'static str {
        match self {
            Fixture::Fig1 => "fig1",
            Fixture::Fig2 => "fig2",
            Fixture::Fig6 => "fig6",
            Fixture::Fig7 => "fig7",
        }
    }

    fn vectors(self) -> (Vec<f64>, Vec<u8>) {
        match self {
            Fixture::Fig1 => (
                vec![
                    0.95, 0.90, 0.90, 0.85, 0.70, 0.70, 0.70, 0.55, 0.45, 0.20, 0.20, 0.18, 0.16,
                    0.15, 0.05,
                ],
                vec![1, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 1, 0],
            ),
            Fixture::Fig2 => (
                vec![0.95, 0.9, 0.8, 0.3, 0.2, 0.1, 0.05],
                vec![1, 0, 1, 1, 0, 0, 0],
            ),
            // printed to three decimals as 1, 0.957, ..., 0.043, 0
            Fixture::Fig6 => (
                (0..24).map(|j| (23 - j) as f64 / 23.0).collect(),
                vec![
                    1, 1, 1, 1, 0, 1, 1, 1, 0, 1, 1, 1, 1, 0, 1, 0, 1, 1, 0, 0, 0, 0, 1, 0,
                ],
            ),
            // printed as 0.833333
            Fixture::Fig7 => {
                let mut scores = vec![1.0];
                scores.extend([5.0 / 6.0; 6]);
                scores.extend([0.25; 4]);
                (scores, vec![1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 1])
            }
        }
    }
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Fixture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Fixture::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::UnknownFixture(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n0: usize,
    pub n1: usize,
    /// Used by the random family only.
    pub seed: u64,
    /// Used by the fixture family only.
    pub fixture: Option<Fixture>,
}

impl GeneratorSpec {
    pub fn new(family: Family, n0: usize, n1: usize) -> Self {
        GeneratorSpec {
            family,
            n0,
            n1,
            seed: 0,
            fixture: None,
        }
    }

    pub fn fixture(fixture: Fixture) -> Self {
        GeneratorSpec {
            family: Family::Fixture,
            n0: 0,
            n1: 0,
            seed: 0,
            fixture: Some(fixture),
        }
    }

    pub fn random(n0: usize, n1: usize, seed: u64) -> Self {
        GeneratorSpec {
            seed,
            ..GeneratorSpec::new(Family::Random, n0, n1)
        }
    }
}

/// Knuth's MMIX linear congruential generator.
///
/// `state <- state * 6364136223846793005 + 1442695040888963407 (mod 2^64)`,
/// starting from `state = seed`. Each draw advances the state once and
/// returns it; [`Lcg::next_f64`] keeps the top 53 bits, giving a value in
/// `[0, 1)`. Simple enough to reproduce in any language.
#[derive(Clone, Debug)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub const MULTIPLIER: u64 = 6364136223846793005;
    pub const INCREMENT: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Self {
        Lcg { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(Self::MULTIPLIER)
            .wrapping_add(Self::INCREMENT);
        self.state
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

fn evenly_spaced(labels: impl IntoIterator<Item = Class>, n: usize) -> Vec<ScoredSample> {
    labels
        .into_iter()
        .enumerate()
        .map(|(i, label)| ScoredSample::new(i as f64 / (n - 1) as f64, label))
        .collect()
}

fn alternating_labels(n0: usize, n1: usize) -> Vec<Class> {
    let mut out = Vec::with_capacity(n0 + n1);
    let (mut left0, mut left1) = (n0, n1);
    let mut next = Class::Negative;
    while left0 + left1 > 0 {
        let take = match next {
            Class::Negative if left1 > 0 => Class::Negative,
            Class::Positive if left0 > 0 => Class::Positive,
            _ => next.other(),
        };
        match take {
            Class::Positive => left0 -= 1,
            Class::Negative => left1 -= 1,
        }
        out.push(take);
        next = take.other();
    }
    out
}

/// Parametric families put evenly spaced scores `i / (n - 1)` on the chosen
/// ranking, lowest score first. Fixtures reproduce the figure datasets.
pub fn generate(spec: &GeneratorSpec) -> Result<ScoredDataset> {
    if spec.family == Family::Fixture {
        let fixture = spec
            .fixture
            .ok_or_else(|| Error::InvalidSpec("fixture family needs a fixture id".into()))?;
        let (scores, labels) = fixture.vectors();
        return ScoredDataset::from_scores(&scores, &labels);
    }
    if spec.n0 == 0 || spec.n1 == 0 {
        return Err(Error::InvalidSpec(format!(
            "parametric families need n0 >= 1 and n1 >= 1 (got n0 = {}, n1 = {})",
            spec.n0, spec.n1
        )));
    }
    let (n0, n1) = (spec.n0, spec.n1);
    let n = n0 + n1;
    let samples = match spec.family {
        Family::Perfect => evenly_spaced(
            std::iter::repeat_n(Class::Positive, n0).chain(std::iter::repeat_n(Class::Negative, n1)),
            n,
        ),
        Family::Worst => evenly_spaced(
            std::iter::repeat_n(Class::Negative, n1).chain(std::iter::repeat_n(Class::Positive, n0)),
            n,
        ),
        Family::Alternating => evenly_spaced(alternating_labels(n0, n1), n),
        Family::Random => {
            let pi0 = n0 as f64 / n as f64;
            let mut rng = Lcg::new(spec.seed);
            (0..n)
                .map(|_| {
                    let score = rng.next_f64();
                    let label = if rng.next_f64() < pi0 {
                        Class::Positive
                    } else {
                        Class::Negative
                    };
                    ScoredSample::new(score, label)
                })
                .collect()
        }
        Family::Fixture => unreachable!(),
    };
    ScoredDataset::new(samples)
}

/// `2c(1 - c)`, the limit of the rate-driven cost curve of a random ranker.
pub fn gini_reference(c: f64) -> f64 {
    2.0 * c * (1.0 - c)
}
