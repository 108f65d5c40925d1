//! Weight-of-effect vectors over a site's neighbors.
//!
//! Every operation returns a [`WeightedNeighborhood`] whose weights lie in
//! `(0, 1]` and sum to one. Neighbors whose weight comes out exactly zero are
//! dropped rather than carried with a zero weight.

use crate::dataset::{polygon_area, site_distance, PolygonSite, SiteId, WeightParams};
use crate::error::{Error, Result};
use crate::neighborhood::NeighborFactors;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedNeighborhood {
    pub center: SiteId,
    pub entries: Vec<(SiteId, f64)>,
}

impl WeightedNeighborhood {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn weight_of(&self, id: &SiteId) -> Option<f64> {
        self.entries.iter().find(|(n, _)| n == id).map(|(_, w)| *w)
    }

    /// Equal weight 1/N for each neighbor.
    pub fn uniform(center: SiteId, neighbors: impl IntoIterator<Item = SiteId>) -> Result<Self> {
        let ids: Vec<SiteId> = neighbors.into_iter().collect();
        if ids.is_empty() {
            return Err(Error::NoNeighbors);
        }
        let w = 1.0 / ids.len() as f64;
        Ok(WeightedNeighborhood {
            center,
            entries: ids.into_iter().map(|id| (id, w)).collect(),
        })
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|(_, w)| w).sum()
    }

    fn from_raw(center: SiteId, ids: Vec<SiteId>, raw: Vec<f64>) -> Result<Self> {
        let sum: f64 = raw.iter().sum();
        if !(sum > 0.0 && sum.is_finite()) {
            return Err(Error::DegenerateFactor(center.to_string()));
        }
        let entries = ids
            .into_iter()
            .zip(raw)
            .filter(|(_, r)| *r > 0.0)
            .map(|(id, r)| (id, r / sum))
            .collect();
        Ok(WeightedNeighborhood { center, entries })
    }
}

/// Shares proportional to `values`, normalized to one. All-zero input gives all zeros.
fn shares(values: &[f64]) -> Vec<f64> {
    let total: f64 = values.iter().sum();
    if total > 0.0 {
        values.iter().map(|v| v / total).collect()
    } else {
        vec![0.0; values.len()]
    }
}

fn inverse_distance_shares(factors: &[NeighborFactors]) -> Vec<f64> {
    shares(&factors.iter().map(|f| 1.0 / f.distance).collect::<Vec<_>>())
}

fn connection_shares(factors: &[NeighborFactors]) -> Vec<f64> {
    shares(
        &factors
            .iter()
            .map(|f| f64::from(f.connection_count))
            .collect::<Vec<_>>(),
    )
}

/// Inverse-cost shares over reachable neighbors. A zero-cost neighbor takes
/// the whole share (split evenly when there are several).
fn cost_shares(factors: &[NeighborFactors]) -> Vec<f64> {
    let free = factors.iter().filter(|f| f.min_cost == Some(0.0)).count();
    if free > 0 {
        return factors
            .iter()
            .map(|f| {
                if f.min_cost == Some(0.0) {
                    1.0 / free as f64
                } else {
                    0.0
                }
            })
            .collect();
    }
    shares(
        &factors
            .iter()
            .map(|f| f.min_cost.map_or(0.0, |c| 1.0 / c))
            .collect::<Vec<_>>(),
    )
}

fn split(factors: &[NeighborFactors]) -> Result<(SiteId, Vec<SiteId>)> {
    let first = factors.first().ok_or(Error::NoNeighbors)?;
    Ok((
        first.center.clone(),
        factors.iter().map(|f| f.neighbor.clone()).collect(),
    ))
}

/// Weights proportional to inverse distance.
pub fn distance_weights(factors: &[NeighborFactors]) -> Result<WeightedNeighborhood> {
    let (center, ids) = split(factors)?;
    if let Some(bad) = factors.iter().find(|f| !(f.distance > 0.0)) {
        return Err(Error::DegenerateDistance(center, bad.neighbor.clone()));
    }
    WeightedNeighborhood::from_raw(center, ids, inverse_distance_shares(factors))
}

/// Weights proportional to the number of direct connections.
pub fn connection_weights(factors: &[NeighborFactors]) -> Result<WeightedNeighborhood> {
    let (center, ids) = split(factors)?;
    WeightedNeighborhood::from_raw(center, ids, connection_shares(factors))
}

/// Coefficient mix of the inverse-distance, connection and inverse-cost
/// shares, rescaled to sum to one when a factor is missing for the whole
/// neighborhood.
pub fn combined_weights(
    factors: &[NeighborFactors],
    params: &WeightParams,
) -> Result<WeightedNeighborhood> {
    let (center, ids) = split(factors)?;
    if let Some(bad) = factors.iter().find(|f| !(f.distance > 0.0)) {
        return Err(Error::DegenerateDistance(center, bad.neighbor.clone()));
    }
    let d = inverse_distance_shares(factors);
    let r = connection_shares(factors);
    let c = cost_shares(factors);
    let raw = (0..factors.len())
        .map(|i| params.alpha * d[i] + params.beta * r[i] + params.delta * c[i])
        .collect();
    WeightedNeighborhood::from_raw(center, ids, raw)
}

/// Polygon weights: `gamma` of the inverse centroid-distance share plus
/// `1 - gamma` of the neighbor-area share.
pub fn polygon_weights(
    center: &PolygonSite,
    neighbors: &[&PolygonSite],
    gamma: f64,
) -> Result<WeightedNeighborhood> {
    if neighbors.is_empty() {
        return Err(Error::NoNeighbors);
    }
    let inverse: Vec<f64> = neighbors
        .iter()
        .map(|n| site_distance(center, *n).map(|d| 1.0 / d))
        .collect::<Result<_>>()?;
    let areas: Vec<f64> = neighbors
        .iter()
        .map(|n| polygon_area(n))
        .collect::<Result<_>>()?;
    let d = shares(&inverse);
    let a = shares(&areas);
    let raw = (0..neighbors.len())
        .map(|i| gamma * d[i] + (1.0 - gamma) * a[i])
        .collect();
    WeightedNeighborhood::from_raw(
        center.id.clone(),
        neighbors.iter().map(|n| n.id.clone()).collect(),
        raw,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Attributes, Point};

    fn factor(id: &str, distance: f64, count: u32, cost: Option<f64>) -> NeighborFactors {
        NeighborFactors {
            center: "r".into(),
            neighbor: id.into(),
            distance,
            connection_count: count,
            min_cost: cost,
        }
    }

    fn by_id(w: &WeightedNeighborhood, id: &str) -> f64 {
        w.weight_of(&id.into()).unwrap()
    }

    #[test]
    fn distance_examples() {
        let w = distance_weights(&[factor("B", 2.0, 0, None), factor("C", 2.0, 0, None)]).unwrap();
        assert_eq!(by_id(&w, "B"), 0.5);
        assert_eq!(by_id(&w, "C"), 0.5);

        // 1/1 : 1/4 = 0.8 : 0.2
        let w = distance_weights(&[factor("B", 1.0, 0, None), factor("C", 4.0, 0, None)]).unwrap();
        assert!((by_id(&w, "B") - 0.8).abs() < 1e-15);
        assert!((by_id(&w, "C") - 0.2).abs() < 1e-15);

        let w = distance_weights(&[factor("B", 37.5, 0, None)]).unwrap();
        assert_eq!(by_id(&w, "B"), 1.0);

        assert!(matches!(distance_weights(&[]), Err(Error::NoNeighbors)));
    }

    #[test]
    fn connection_examples() {
        let w = connection_weights(&[
            factor("B", 1.0, 2, None),
            factor("C", 1.0, 1, None),
            factor("D", 1.0, 1, None),
        ])
        .unwrap();
        assert_eq!(by_id(&w, "B"), 0.5);
        assert_eq!(by_id(&w, "C"), 0.25);
        assert_eq!(by_id(&w, "D"), 0.25);

        let w = connection_weights(&[
            factor("B", 1.0, 3, None),
            factor("C", 1.0, 3, None),
            factor("D", 1.0, 3, None),
        ])
        .unwrap();
        assert!(w
            .entries
            .iter()
            .all(|(_, x)| (*x - 1.0 / 3.0).abs() < 1e-15));

        let w =
            connection_weights(&[factor("B", 1.0, 1, None), factor("C", 1.0, 0, None)]).unwrap();
        assert_eq!(w.entries, vec![("B".into(), 1.0)]);

        assert!(matches!(
            connection_weights(&[factor("B", 1.0, 0, None)]),
            Err(Error::DegenerateFactor(_))
        ));
    }

    #[test]
    fn combined_corners_and_symmetry() {
        let p = WeightParams::default().with_coefficients(1.0, 0.0, 0.0);
        let w =
            combined_weights(&[factor("B", 1.0, 0, None), factor("C", 4.0, 0, None)], &p).unwrap();
        assert!((by_id(&w, "B") - 0.8).abs() < 1e-15);

        let p = WeightParams::default().with_coefficients(0.0, 1.0, 0.0);
        let w = combined_weights(
            &[
                factor("B", 1.0, 2, None),
                factor("C", 5.0, 1, None),
                factor("D", 9.0, 1, None),
            ],
            &p,
        )
        .unwrap();
        assert_eq!(by_id(&w, "B"), 0.5);
        assert_eq!(by_id(&w, "D"), 0.25);

        let p = WeightParams::default();
        let w = combined_weights(
            &[
                factor("B", 2.0, 1, Some(3.0)),
                factor("C", 2.0, 1, Some(3.0)),
                factor("D", 2.0, 1, Some(3.0)),
            ],
            &p,
        )
        .unwrap();
        for (_, x) in &w.entries {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn combined_renormalizes_missing_factors() {
        // no connections, no reachable costs: only the distance share survives
        let p = WeightParams::default();
        let w =
            combined_weights(&[factor("B", 1.0, 0, None), factor("C", 4.0, 0, None)], &p).unwrap();
        assert!((by_id(&w, "B") - 0.8).abs() < 1e-15);
        assert!((w.total() - 1.0).abs() < 1e-15);

        let p = WeightParams::default().with_coefficients(0.0, 0.5, 0.5);
        assert!(matches!(
            combined_weights(&[factor("B", 1.0, 0, None)], &p),
            Err(Error::DegenerateFactor(_))
        ));
    }

    #[test]
    fn zero_cost_takes_the_cost_share() {
        let p = WeightParams::default().with_coefficients(0.0, 0.0, 1.0);
        let w = combined_weights(
            &[
                factor("B", 1.0, 0, Some(0.0)),
                factor("C", 1.0, 0, Some(0.0)),
                factor("D", 1.0, 0, Some(2.0)),
            ],
            &p,
        )
        .unwrap();
        assert_eq!(w.entries, vec![("B".into(), 0.5), ("C".into(), 0.5)]);
    }

    #[test]
    fn unreachable_neighbor_keeps_distance_share() {
        let p = WeightParams::default().with_coefficients(0.5, 0.0, 0.5);
        let w = combined_weights(
            &[factor("B", 1.0, 0, Some(1.0)), factor("C", 1.0, 0, None)],
            &p,
        )
        .unwrap();
        // raw: B = 0.5*0.5 + 0.5*1 = 0.75, C = 0.25
        assert!((by_id(&w, "B") - 0.75).abs() < 1e-15);
        assert!((by_id(&w, "C") - 0.25).abs() < 1e-15);
    }

    fn rect(id: &str, x: f64, y: f64, w: f64, h: f64) -> PolygonSite {
        PolygonSite::new(
            id,
            vec![
                Point::new(x, y),
                Point::new(x + w, y),
                Point::new(x + w, y + h),
                Point::new(x, y + h),
            ],
            vec![],
            Attributes::new(),
        )
    }

    #[test]
    fn polygon_weight_examples() {
        let c = rect("c", 0.0, 0.0, 1.0, 1.0);
        let l = rect("l", -1.0, 0.0, 1.0, 1.0);
        let r = rect("r", 1.0, 0.0, 1.0, 1.0);
        let w = polygon_weights(&c, &[&l, &r], 0.5).unwrap();
        assert_eq!(w.entries, vec![("l".into(), 0.5), ("r".into(), 0.5)]);

        // areas 4 and 1; distances do not matter at gamma = 0
        let p = rect("P", -2.0, -1.0, 1.0, 4.0);
        let q = rect("Q", 1.5, 0.0, 1.0, 1.0);
        let w = polygon_weights(&c, &[&p, &q], 0.0).unwrap();
        assert!((by_id(&w, "P") - 0.8).abs() < 1e-15);
        assert!((by_id(&w, "Q") - 0.2).abs() < 1e-15);

        let far = rect("F", 3.0, 0.0, 1.0, 1.0);
        let w = polygon_weights(&c, &[&r, &far], 1.0).unwrap();
        let d = distance_weights(&[factor("r", 1.0, 0, None), factor("F", 3.0, 0, None)]).unwrap();
        assert!((by_id(&w, "r") - by_id(&d, "r")).abs() < 1e-15);
        assert!((by_id(&w, "F") - by_id(&d, "F")).abs() < 1e-15);

        assert!(matches!(
            polygon_weights(&c, &[], 0.5),
            Err(Error::NoNeighbors)
        ));
        assert!(matches!(
            polygon_weights(&c, &[&c.clone()], 0.5),
            Err(Error::DegenerateDistance(..))
        ));
    }
}
