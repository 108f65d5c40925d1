//! Expected values, difference scores, the z-score significance test and the
//! weighted-versus-classical comparison.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dataset::{SiteId, SpatialDataset, WeightParams};
use crate::error::{Error, Result};
use crate::neighborhood::{collect_factors, neighbors, Regime};
use crate::weights::{combined_weights, distance_weights, polygon_weights, WeightedNeighborhood};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Every neighbor counts equally.
    Classical,
    /// Neighbors count by their weight of effect.
    Weighted,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Classical => "classical",
            Mode::Weighted => "weighted",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "classical" => Ok(Mode::Classical),
            "weighted" => Ok(Mode::Weighted),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SiteScore {
    pub site: SiteId,
    pub actual: f64,
    pub expected: f64,
    pub diff: f64,
    pub z: f64,
    pub is_outlier: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionResult {
    pub attribute: String,
    /// One entry per scored site, ordered by site id.
    pub scores: Vec<SiteScore>,
    pub mu: f64,
    pub sigma: f64,
    pub theta: f64,
    /// Sites without neighbors; not scored.
    pub skipped: Vec<SiteId>,
}

impl DetectionResult {
    pub fn outliers(&self) -> Vec<&SiteId> {
        self.scores
            .iter()
            .filter(|s| s.is_outlier)
            .map(|s| &s.site)
            .collect()
    }

    pub fn score(&self, site: &SiteId) -> Option<&SiteScore> {
        self.scores.iter().find(|s| &s.site == site)
    }
}

/// Compensated sum in iteration order.
fn stable_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut carry = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// Arithmetic mean of the neighbor values.
///
/// Computed as the sum of `value / N`-weighted terms so that uniform weights
/// through [`expected_weighted`] give the bitwise-same result.
pub fn expected_classical(neighbor_values: &[f64]) -> Result<f64> {
    if neighbor_values.is_empty() {
        return Err(Error::NoNeighbors);
    }
    let w = 1.0 / neighbor_values.len() as f64;
    Ok(stable_sum(neighbor_values.iter().map(|v| w * v)))
}

/// Weighted sum of the neighbor values.
pub fn expected_weighted(
    weights: &WeightedNeighborhood,
    values: &BTreeMap<SiteId, f64>,
) -> Result<f64> {
    if weights.is_empty() {
        return Err(Error::NoNeighbors);
    }
    let terms = weights
        .entries
        .iter()
        .map(|(id, w)| {
            values
                .get(id)
                .map(|v| w * v)
                .ok_or_else(|| Error::UnknownSite(id.clone()))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(stable_sum(terms))
}

/// Per-site `actual - expected`.
pub fn difference_scores(
    actuals: &BTreeMap<SiteId, f64>,
    expecteds: &BTreeMap<SiteId, f64>,
) -> Result<BTreeMap<SiteId, f64>> {
    if let Some(extra) = expecteds.keys().find(|k| !actuals.contains_key(k)) {
        return Err(Error::UnknownSite(extra.clone()));
    }
    actuals
        .iter()
        .map(|(id, a)| {
            let e = expecteds
                .get(id)
                .ok_or_else(|| Error::UnknownSite(id.clone()))?;
            Ok((id.clone(), a - e))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZScore {
    pub site: SiteId,
    pub z: f64,
    pub is_outlier: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Significance {
    pub mu: f64,
    /// Population standard deviation of the differences.
    pub sigma: f64,
    pub scores: Vec<ZScore>,
}

/// Standardizes the differences and flags every site with `|z| > theta`.
pub fn significance_scores(diffs: &BTreeMap<SiteId, f64>, theta: f64) -> Result<Significance> {
    let n = diffs.len() as f64;
    if diffs.len() < 2 {
        return Err(Error::DegenerateDistribution);
    }
    let mu = stable_sum(diffs.values().copied()) / n;
    let sigma = (stable_sum(diffs.values().map(|d| (d - mu) * (d - mu))) / n).sqrt();
    let scale = diffs.values().fold(0.0_f64, |m, d| m.max(d.abs()));
    if !(sigma > 1e-12 * scale) || !sigma.is_finite() {
        return Err(Error::DegenerateDistribution);
    }
    let scores = diffs
        .iter()
        .map(|(id, d)| {
            let z = (d - mu) / sigma;
            ZScore {
                site: id.clone(),
                z,
                is_outlier: z.abs() > theta,
            }
        })
        .collect();
    Ok(Significance { mu, sigma, scores })
}

/// Weight vector for `center`, or `None` when it has no neighbors.
pub fn site_weights(
    dataset: &SpatialDataset,
    center: &SiteId,
    regime: Regime,
    params: &WeightParams,
    mode: Mode,
) -> Result<Option<WeightedNeighborhood>> {
    let found = neighbors(dataset, center, regime, params)?;
    if found.is_empty() {
        return Ok(None);
    }
    let weights = match (mode, regime) {
        (Mode::Classical, _) => WeightedNeighborhood::uniform(center.clone(), found)?,
        (Mode::Weighted, Regime::Polygon) => {
            let this = dataset
                .polygon(center)?
                .expect("polygon regime on polygon dataset");
            let others = found
                .iter()
                .map(|id| {
                    Ok(dataset
                        .polygon(id)?
                        .expect("polygon regime on polygon dataset"))
                })
                .collect::<Result<Vec<_>>>()?;
            polygon_weights(this, &others, params.gamma)?
        }
        (Mode::Weighted, Regime::Buffer) => {
            distance_weights(&collect_factors(dataset, center, &found, params)?)?
        }
        (Mode::Weighted, Regime::Graph | Regime::Combined) => {
            combined_weights(&collect_factors(dataset, center, &found, params)?, params)?
        }
    };
    Ok(Some(weights))
}

/// Full pipeline: neighbors, weights, expectations, differences, z-test.
pub fn detect_outliers(
    dataset: &SpatialDataset,
    attribute: &str,
    params: &WeightParams,
    regime: Regime,
    mode: Mode,
) -> Result<DetectionResult> {
    params.validate()?;
    if !dataset.attribute_names().iter().any(|a| a == attribute) {
        return Err(Error::UnknownAttribute(attribute.to_string()));
    }
    let mut values = BTreeMap::new();
    for id in dataset.site_ids() {
        values.insert(id.clone(), dataset.attribute(id, attribute)?);
    }

    let mut actuals = BTreeMap::new();
    let mut expecteds = BTreeMap::new();
    let mut skipped = Vec::new();
    for id in values.keys() {
        match site_weights(dataset, id, regime, params, mode)? {
            Some(w) => {
                expecteds.insert(id.clone(), expected_weighted(&w, &values)?);
                actuals.insert(id.clone(), values[id]);
            }
            None => skipped.push(id.clone()),
        }
    }

    if actuals.is_empty() {
        return Ok(DetectionResult {
            attribute: attribute.to_string(),
            scores: Vec::new(),
            mu: 0.0,
            sigma: 0.0,
            theta: params.theta,
            skipped,
        });
    }

    let diffs = difference_scores(&actuals, &expecteds)?;
    let sig = significance_scores(&diffs, params.theta)?;
    let scores = sig
        .scores
        .into_iter()
        .map(|z| SiteScore {
            actual: actuals[&z.site],
            expected: expecteds[&z.site],
            diff: diffs[&z.site],
            z: z.z,
            is_outlier: z.is_outlier,
            site: z.site,
        })
        .collect();
    Ok(DetectionResult {
        attribute: attribute.to_string(),
        scores,
        mu: sig.mu,
        sigma: sig.sigma,
        theta: params.theta,
        skipped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SiteComparison {
    pub site: SiteId,
    pub actual: f64,
    pub expected_classical: f64,
    pub expected_weighted: f64,
    pub sq_error_classical: f64,
    pub sq_error_weighted: f64,
    pub sq_error_delta: f64,
    /// `None` when the classical error is zero but the weighted one is not.
    pub improvement_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub attribute: String,
    pub per_site: Vec<SiteComparison>,
    pub mean_improvement_pct: Option<f64>,
    pub mean_sq_error_reduction_pct: Option<f64>,
    pub skipped: Vec<SiteId>,
}

/// Squared errors of the two models, their difference and the improvement
/// as a percentage of the classical squared error.
pub fn error_improvement(classical_diff: f64, weighted_diff: f64) -> (f64, f64, f64, Option<f64>) {
    let c = classical_diff * classical_diff;
    let w = weighted_diff * weighted_diff;
    let delta = c - w;
    let pct = if c > 0.0 {
        Some(100.0 * delta / c)
    } else if w == 0.0 {
        Some(0.0)
    } else {
        None
    };
    (c, w, delta, pct)
}

pub fn compare_models(
    classical: &DetectionResult,
    weighted: &DetectionResult,
) -> Result<ComparisonReport> {
    if classical.attribute != weighted.attribute {
        return Err(Error::SiteMismatch(format!(
            "attributes {:?} and {:?}",
            classical.attribute, weighted.attribute
        )));
    }
    if classical.scores.len() != weighted.scores.len() {
        return Err(Error::SiteMismatch(format!(
            "{} classical scores versus {} weighted",
            classical.scores.len(),
            weighted.scores.len()
        )));
    }
    let mut per_site = Vec::with_capacity(classical.scores.len());
    for c in &classical.scores {
        let w = weighted
            .score(&c.site)
            .ok_or_else(|| Error::UnknownSite(c.site.clone()))?;
        let (sq_c, sq_w, delta, pct) = error_improvement(c.diff, w.diff);
        per_site.push(SiteComparison {
            site: c.site.clone(),
            actual: c.actual,
            expected_classical: c.expected,
            expected_weighted: w.expected,
            sq_error_classical: sq_c,
            sq_error_weighted: sq_w,
            sq_error_delta: delta,
            improvement_pct: pct,
        });
    }

    let pcts: Vec<f64> = per_site.iter().filter_map(|s| s.improvement_pct).collect();
    let mean_improvement_pct =
        (!pcts.is_empty()).then(|| stable_sum(pcts.iter().copied()) / pcts.len() as f64);
    let mse_c = stable_sum(per_site.iter().map(|s| s.sq_error_classical));
    let mse_w = stable_sum(per_site.iter().map(|s| s.sq_error_weighted));
    let mean_sq_error_reduction_pct = (mse_c > 0.0).then(|| 100.0 * (mse_c - mse_w) / mse_c);

    let mut skipped = classical.skipped.clone();
    for s in &weighted.skipped {
        if !skipped.contains(s) {
            skipped.push(s.clone());
        }
    }
    skipped.sort();
    Ok(ComparisonReport {
        attribute: classical.attribute.clone(),
        per_site,
        mean_improvement_pct,
        mean_sq_error_reduction_pct,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(pairs: &[(&str, f64)]) -> BTreeMap<SiteId, f64> {
        pairs.iter().map(|&(k, v)| (SiteId::from(k), v)).collect()
    }

    #[test]
    fn classical_mean() {
        assert_eq!(expected_classical(&[10.0, 20.0, 30.0]).unwrap(), 20.0);
        assert_eq!(expected_classical(&[7.0]).unwrap(), 7.0);
        assert!(matches!(expected_classical(&[]), Err(Error::NoNeighbors)));
    }

    #[test]
    fn weighted_examples() {
        let values = map(&[("a", 10.0), ("b", 20.0), ("c", 30.0)]);
        let uni = WeightedNeighborhood::uniform(
            "r".into(),
            ["a", "b", "c"].into_iter().map(SiteId::from),
        )
        .unwrap();
        assert_eq!(
            expected_weighted(&uni, &values).unwrap(),
            expected_classical(&[10.0, 20.0, 30.0]).unwrap()
        );
        let single = WeightedNeighborhood {
            center: "r".into(),
            entries: vec![("b".into(), 1.0)],
        };
        assert_eq!(expected_weighted(&single, &values).unwrap(), 20.0);
        let missing = WeightedNeighborhood {
            center: "r".into(),
            entries: vec![("q".into(), 1.0)],
        };
        assert!(matches!(
            expected_weighted(&missing, &values),
            Err(Error::UnknownSite(_))
        ));
    }

    #[test]
    fn difference_examples() {
        let d = difference_scores(&map(&[("27", 26.0)]), &map(&[("27", 28.0)])).unwrap();
        assert_eq!(d[&SiteId::from("27")], -2.0);
        let d = difference_scores(&map(&[("27", 26.0)]), &map(&[("27", 45.0)])).unwrap();
        assert_eq!(d[&SiteId::from("27")], -19.0);
        let d = difference_scores(&map(&[("x", 3.5)]), &map(&[("x", 3.5)])).unwrap();
        assert_eq!(d[&SiteId::from("x")], 0.0);
        assert!(difference_scores(&map(&[("x", 1.0)]), &map(&[("y", 1.0)])).is_err());
        assert!(difference_scores(&map(&[("x", 1.0)]), &map(&[("x", 1.0), ("y", 1.0)])).is_err());
    }

    #[test]
    fn significance_basic() {
        // diffs -1, 1: mu 0, population sigma 1
        let s = significance_scores(&map(&[("a", -1.0), ("b", 1.0)]), 0.5).unwrap();
        assert_eq!(s.mu, 0.0);
        assert_eq!(s.sigma, 1.0);
        assert_eq!(s.scores[0].z, -1.0);
        assert!(s.scores.iter().all(|z| z.is_outlier));
        assert!(matches!(
            significance_scores(&map(&[("a", 3.0), ("b", 3.0)]), 2.0),
            Err(Error::DegenerateDistribution)
        ));
        assert!(matches!(
            significance_scores(&map(&[("a", 3.0)]), 2.0),
            Err(Error::DegenerateDistribution)
        ));
    }

    #[test]
    fn threshold_is_strict() {
        // population z of the last entry is exactly 2 for {0 x4, 5}
        let s = significance_scores(
            &map(&[("a", 0.0), ("b", 0.0), ("c", 0.0), ("d", 0.0), ("e", 5.0)]),
            2.0,
        )
        .unwrap();
        let e = s
            .scores
            .iter()
            .find(|z| z.site == SiteId::from("e"))
            .unwrap();
        assert!((e.z - 2.0).abs() < 1e-12);
        assert_eq!(e.is_outlier, e.z > 2.0);
    }

    #[test]
    fn improvement_examples() {
        let (c, w, d, p) = error_improvement(0.19, 0.02);
        assert!((c - 0.0361).abs() < 1e-15 && (w - 0.0004).abs() < 1e-15);
        assert!((d - 0.0357).abs() < 1e-12);
        assert!((p.unwrap() - 98.8919667590).abs() < 1e-6);
        let (_, _, d, p) = error_improvement(0.3, -0.3);
        assert_eq!(d, 0.0);
        assert_eq!(p, Some(0.0));
        assert_eq!(error_improvement(0.1, 0.0).3, Some(100.0));
        assert_eq!(error_improvement(0.0, 0.1).3, None);
    }
}
