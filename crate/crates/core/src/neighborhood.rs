//! Neighbor discovery and the per-pair factors (distance, direct connection
//! count, minimal path cost) that feed the weight formulas.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};
use std::fmt;
use std::str::FromStr;

use crate::dataset::{
    shared_boundary_length, DatasetKind, Point, SiteId, SpatialDataset, WeightParams,
};
use crate::error::{Error, Result};

/// Boundary overlap (in length units) below which two polygons only touch.
pub const ADJACENCY_TOLERANCE: f64 = 1e-9;

/// How neighbor sets are discovered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Every site within the buffer radius.
    Buffer,
    /// Every site sharing an edge.
    Graph,
    /// Every polygon sharing a boundary segment.
    Polygon,
    /// Buffer membership, weighted with distance, connection and cost factors.
    Combined,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Buffer => "buffer",
            Regime::Graph => "graph",
            Regime::Polygon => "polygon",
            Regime::Combined => "combined",
        }
    }

    fn require(self, dataset: &SpatialDataset, kind: DatasetKind) -> Result<()> {
        if dataset.kind() == kind {
            Ok(())
        } else {
            Err(Error::RegimeMismatch {
                regime: self.name(),
                kind: dataset.kind().name(),
            })
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "buffer" => Ok(Regime::Buffer),
            "graph" => Ok(Regime::Graph),
            "polygon" => Ok(Regime::Polygon),
            "combined" => Ok(Regime::Combined),
            other => Err(format!("unknown regime {other:?}")),
        }
    }
}

/// Factors describing how `neighbor` relates to `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborFactors {
    pub center: SiteId,
    pub neighbor: SiteId,
    pub distance: f64,
    pub connection_count: u32,
    /// `None` when unreachable or beyond the cost limit.
    pub min_cost: Option<f64>,
}

/// Sites other than `center` within `radius` of it.
pub fn buffer_neighbors(
    dataset: &SpatialDataset,
    center: &SiteId,
    radius: f64,
) -> Result<BTreeSet<SiteId>> {
    Regime::Buffer.require(dataset, DatasetKind::Points)?;
    let origin = dataset.location(center)?;
    let points = dataset.points().unwrap_or_default();
    Ok(points
        .iter()
        .filter(|p| &p.id != center && origin.distance(&p.location) <= radius)
        .map(|p| p.id.clone())
        .collect())
}

/// Sites sharing at least one edge with `center`.
pub fn graph_neighbors(dataset: &SpatialDataset, center: &SiteId) -> Result<BTreeSet<SiteId>> {
    Regime::Graph.require(dataset, DatasetKind::Points)?;
    dataset.position(center)?;
    Ok(dataset
        .edges()
        .iter()
        .filter_map(|e| e.other(center))
        .filter(|id| *id != center)
        .cloned()
        .collect())
}

/// Polygons sharing a boundary of positive length with `center`.
pub fn polygon_adjacent_neighbors(
    dataset: &SpatialDataset,
    center: &SiteId,
) -> Result<BTreeSet<SiteId>> {
    Regime::Polygon.require(dataset, DatasetKind::Polygons)?;
    let polygons = dataset.polygons().unwrap_or_default();
    let this = &polygons[dataset.position(center)?];
    let bounds = Bounds::of(this.rings().flatten());
    Ok(polygons
        .iter()
        .filter(|p| p.id != this.id)
        .filter(|p| bounds.touches(&Bounds::of(p.rings().flatten())))
        .filter(|p| shared_boundary_length(this, p, ADJACENCY_TOLERANCE) > ADJACENCY_TOLERANCE)
        .map(|p| p.id.clone())
        .collect())
}

struct Bounds {
    min: Point,
    max: Point,
}

impl Bounds {
    fn of<'a>(points: impl Iterator<Item = &'a Point>) -> Self {
        let mut b = Bounds {
            min: Point::new(f64::MAX, f64::MAX),
            max: Point::new(f64::MIN, f64::MIN),
        };
        for p in points {
            b.min.x = b.min.x.min(p.x);
            b.min.y = b.min.y.min(p.y);
            b.max.x = b.max.x.max(p.x);
            b.max.y = b.max.y.max(p.y);
        }
        b
    }

    fn touches(&self, other: &Bounds) -> bool {
        let t = ADJACENCY_TOLERANCE;
        self.min.x <= other.max.x + t
            && other.min.x <= self.max.x + t
            && self.min.y <= other.max.y + t
            && other.min.y <= self.max.y + t
    }
}

/// Number of edge records joining `a` and `b` in either orientation.
pub fn direct_connection_count(dataset: &SpatialDataset, a: &SiteId, b: &SiteId) -> Result<u32> {
    dataset.position(a)?;
    dataset.position(b)?;
    Ok(dataset
        .edges()
        .iter()
        .filter(|e| (&e.from == a && &e.to == b) || (&e.from == b && &e.to == a))
        .count() as u32)
}

/// Cheapest total edge cost of any path from `a` to `b`, or `None` when no
/// path exists or the cheapest one costs more than `cost_limit`.
pub fn min_cost(
    dataset: &SpatialDataset,
    a: &SiteId,
    b: &SiteId,
    cost_limit: Option<f64>,
) -> Result<Option<f64>> {
    let target = dataset.position(b)?;
    let costs = CostGraph::new(dataset).shortest_from(dataset.position(a)?, cost_limit);
    Ok(costs[target])
}

/// Factors for each neighbor, ordered by neighbor id.
pub fn collect_factors(
    dataset: &SpatialDataset,
    center: &SiteId,
    neighbors: &BTreeSet<SiteId>,
    params: &WeightParams,
) -> Result<Vec<NeighborFactors>> {
    if neighbors.is_empty() {
        return Ok(Vec::new());
    }
    let source = dataset.position(center)?;
    let costs = CostGraph::new(dataset).shortest_from(source, params.cost_limit);
    neighbors
        .iter()
        .map(|n| {
            let pos = dataset.position(n)?;
            Ok(NeighborFactors {
                center: center.clone(),
                neighbor: n.clone(),
                distance: dataset.distance(center, n)?,
                connection_count: direct_connection_count(dataset, center, n)?,
                min_cost: costs[pos],
            })
        })
        .collect()
}

/// Neighbor set of `center` under `regime`.
pub fn neighbors(
    dataset: &SpatialDataset,
    center: &SiteId,
    regime: Regime,
    params: &WeightParams,
) -> Result<BTreeSet<SiteId>> {
    match regime {
        Regime::Buffer | Regime::Combined => {
            let radius = params.radius.ok_or_else(|| {
                Error::InvalidParams(format!("the {regime} regime needs a buffer radius"))
            })?;
            buffer_neighbors(dataset, center, radius)
        }
        Regime::Graph => graph_neighbors(dataset, center),
        Regime::Polygon => polygon_adjacent_neighbors(dataset, center),
    }
}

/// Undirected adjacency over site positions with edge costs.
struct CostGraph {
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl CostGraph {
    fn new(dataset: &SpatialDataset) -> Self {
        let mut adjacency = vec![Vec::new(); dataset.len()];
        for e in dataset.edges() {
            if let (Ok(u), Ok(v)) = (dataset.position(&e.from), dataset.position(&e.to)) {
                adjacency[u].push((v, e.cost));
                adjacency[v].push((u, e.cost));
            }
        }
        CostGraph { adjacency }
    }

    /// Dijkstra from `source`; entries above `limit` are reported unreachable.
    fn shortest_from(&self, source: usize, limit: Option<f64>) -> Vec<Option<f64>> {
        let limit = limit.unwrap_or(f64::INFINITY);
        let mut best: Vec<Option<f64>> = vec![None; self.adjacency.len()];
        let mut heap = BinaryHeap::new();
        best[source] = Some(0.0);
        heap.push(Frontier {
            cost: 0.0,
            node: source,
        });
        while let Some(Frontier { cost, node }) = heap.pop() {
            if best[node].is_some_and(|b| cost > b) {
                continue;
            }
            for &(next, w) in &self.adjacency[node] {
                let c = cost + w;
                if c > limit {
                    continue;
                }
                if best[next].is_none_or(|b| c < b) {
                    best[next] = Some(c);
                    heap.push(Frontier {
                        cost: c,
                        node: next,
                    });
                }
            }
        }
        best
    }
}

#[derive(PartialEq)]
struct Frontier {
    cost: f64,
    node: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
