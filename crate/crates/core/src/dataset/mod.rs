//! Sites, edges, attribute tables and the planar geometry they need.
//!
//! A [`SpatialDataset`] holds either point sites (optionally joined by a
//! multigraph of [`Edge`]s) or polygon sites, never both. Construction does
//! not reject bad data; call [`validate_dataset`] to get the full list of
//! problems before running anything downstream.

mod geometry;
mod validate;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use geometry::{polygon_area, polygon_centroid, site_distance, Located};
pub(crate) use geometry::{ring_problem, shared_boundary_length};
pub use validate::{validate_dataset, Violation};

/// Opaque site identifier.
///
/// Ordering is numeric when both ids are integer tokens and lexicographic
/// otherwise, so `"17" < "216"`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "RawId", into = "String")]
pub struct SiteId(String);

#[derive(Deserialize)]
#[serde(untagged)]
enum RawId {
    Int(i64),
    Text(String),
}

impl From<RawId> for SiteId {
    fn from(raw: RawId) -> Self {
        match raw {
            RawId::Int(v) => SiteId(v.to_string()),
            RawId::Text(s) => SiteId(s),
        }
    }
}

impl From<SiteId> for String {
    fn from(id: SiteId) -> Self {
        id.0
    }
}

impl SiteId {
    pub fn new(value: impl Into<String>) -> Self {
        SiteId(value.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn as_integer(&self) -> Option<i128> {
        self.0.parse().ok()
    }
}

impl From<&str> for SiteId {
    fn from(s: &str) -> Self {
        SiteId(s.to_string())
    }
}

impl From<String> for SiteId {
    fn from(s: String) -> Self {
        SiteId(s)
    }
}

impl From<u32> for SiteId {
    fn from(v: u32) -> Self {
        SiteId(v.to_string())
    }
}

impl fmt::Display for SiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Ord for SiteId {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.as_integer(), other.as_integer()) {
            (Some(a), Some(b)) => a.cmp(&b).then_with(|| self.0.cmp(&other.0)),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => self.0.cmp(&other.0),
        }
    }
}

impl PartialOrd for SiteId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Planar coordinate pair in abstract length units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

pub type Attributes = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct PointSite {
    pub id: SiteId,
    pub location: Point,
    pub attributes: Attributes,
}

impl PointSite {
    pub fn new(id: impl Into<SiteId>, x: f64, y: f64, attributes: Attributes) -> Self {
        PointSite {
            id: id.into(),
            location: Point::new(x, y),
            attributes,
        }
    }
}

/// Polygon with one exterior ring and any number of holes.
///
/// Rings are stored with implicit closure: a trailing vertex equal to the
/// first one is dropped on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonSite {
    pub id: SiteId,
    pub exterior: Vec<Point>,
    pub holes: Vec<Vec<Point>>,
    pub attributes: Attributes,
}

impl PolygonSite {
    pub fn new(
        id: impl Into<SiteId>,
        exterior: Vec<Point>,
        holes: Vec<Vec<Point>>,
        attributes: Attributes,
    ) -> Self {
        PolygonSite {
            id: id.into(),
            exterior: open_ring(exterior),
            holes: holes.into_iter().map(open_ring).collect(),
            attributes,
        }
    }

    pub fn rings(&self) -> impl Iterator<Item = &[Point]> {
        std::iter::once(self.exterior.as_slice()).chain(self.holes.iter().map(Vec::as_slice))
    }
}

fn open_ring(mut ring: Vec<Point>) -> Vec<Point> {
    if ring.len() > 1 && ring.first() == ring.last() {
        ring.pop();
    }
    ring
}

/// A direct connection between two point sites. Parallel edges are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub from: SiteId,
    pub to: SiteId,
    pub length: f64,
    pub cost: f64,
}

impl Edge {
    pub fn new(from: impl Into<SiteId>, to: impl Into<SiteId>, length: f64, cost: f64) -> Self {
        Edge {
            from: from.into(),
            to: to.into(),
            length,
            cost,
        }
    }

    /// The opposite endpoint when `id` is one end of this edge.
    pub fn other(&self, id: &SiteId) -> Option<&SiteId> {
        if &self.from == id {
            Some(&self.to)
        } else if &self.to == id {
            Some(&self.from)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    Points,
    Polygons,
}

impl DatasetKind {
    pub fn name(self) -> &'static str {
        match self {
            DatasetKind::Points => "point",
            DatasetKind::Polygons => "polygon",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sites {
    Points(Vec<PointSite>),
    Polygons(Vec<PolygonSite>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialDataset {
    sites: Sites,
    edges: Vec<Edge>,
    attribute_names: Vec<String>,
    index: HashMap<SiteId, usize>,
}

impl SpatialDataset {
    /// Point dataset. Attribute names are taken as the union over all sites.
    pub fn from_points(sites: Vec<PointSite>, edges: Vec<Edge>) -> Self {
        let names = union_names(sites.iter().map(|s| &s.attributes));
        Self::with_attributes(Sites::Points(sites), edges, names)
    }

    pub fn from_polygons(sites: Vec<PolygonSite>) -> Self {
        let names = union_names(sites.iter().map(|s| &s.attributes));
        Self::with_attributes(Sites::Polygons(sites), Vec::new(), names)
    }

    pub fn with_attributes(sites: Sites, edges: Vec<Edge>, attribute_names: Vec<String>) -> Self {
        let mut index = HashMap::new();
        let ids: Vec<&SiteId> = match &sites {
            Sites::Points(p) => p.iter().map(|s| &s.id).collect(),
            Sites::Polygons(p) => p.iter().map(|s| &s.id).collect(),
        };
        for (pos, id) in ids.into_iter().enumerate() {
            index.entry(id.clone()).or_insert(pos);
        }
        SpatialDataset {
            sites,
            edges,
            attribute_names,
            index,
        }
    }

    pub fn kind(&self) -> DatasetKind {
        match self.sites {
            Sites::Points(_) => DatasetKind::Points,
            Sites::Polygons(_) => DatasetKind::Polygons,
        }
    }

    pub fn sites(&self) -> &Sites {
        &self.sites
    }

    pub fn points(&self) -> Option<&[PointSite]> {
        match &self.sites {
            Sites::Points(p) => Some(p),
            Sites::Polygons(_) => None,
        }
    }

    pub fn polygons(&self) -> Option<&[PolygonSite]> {
        match &self.sites {
            Sites::Polygons(p) => Some(p),
            Sites::Points(_) => None,
        }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.attribute_names
    }

    pub fn len(&self) -> usize {
        match &self.sites {
            Sites::Points(p) => p.len(),
            Sites::Polygons(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Site ids in storage order.
    pub fn site_ids(&self) -> Vec<&SiteId> {
        match &self.sites {
            Sites::Points(p) => p.iter().map(|s| &s.id).collect(),
            Sites::Polygons(p) => p.iter().map(|s| &s.id).collect(),
        }
    }

    pub fn contains(&self, id: &SiteId) -> bool {
        self.index.contains_key(id)
    }

    pub(crate) fn position(&self, id: &SiteId) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownSite(id.clone()))
    }

    pub fn point(&self, id: &SiteId) -> Result<Option<&PointSite>> {
        let pos = self.position(id)?;
        Ok(self.points().map(|p| &p[pos]))
    }

    pub fn polygon(&self, id: &SiteId) -> Result<Option<&PolygonSite>> {
        let pos = self.position(id)?;
        Ok(self.polygons().map(|p| &p[pos]))
    }

    fn attributes_of(&self, pos: usize) -> &Attributes {
        match &self.sites {
            Sites::Points(p) => &p[pos].attributes,
            Sites::Polygons(p) => &p[pos].attributes,
        }
    }

    pub fn attribute(&self, id: &SiteId, name: &str) -> Result<f64> {
        let pos = self.position(id)?;
        self.attributes_of(pos)
            .get(name)
            .copied()
            .ok_or_else(|| Error::MissingAttribute {
                site: id.clone(),
                attribute: name.to_string(),
            })
    }

    /// Representative location: the point itself or the polygon centroid.
    pub fn location(&self, id: &SiteId) -> Result<Point> {
        let pos = self.position(id)?;
        match &self.sites {
            Sites::Points(p) => Ok(p[pos].location),
            Sites::Polygons(p) => polygon_centroid(&p[pos]),
        }
    }

    /// Distance between two sites' locations; zero is an error.
    pub fn distance(&self, a: &SiteId, b: &SiteId) -> Result<f64> {
        let pa = self.position(a)?;
        let pb = self.position(b)?;
        match &self.sites {
            Sites::Points(p) => site_distance(&p[pa], &p[pb]),
            Sites::Polygons(p) => site_distance(&p[pa], &p[pb]),
        }
    }
}

fn union_names<'a>(attrs: impl Iterator<Item = &'a Attributes>) -> Vec<String> {
    let names: BTreeSet<&String> = attrs.flat_map(|a| a.keys()).collect();
    names.into_iter().cloned().collect()
}

/// Coefficients and thresholds that drive neighborhood weighting and the
/// significance test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    /// Share given to inverse distance.
    pub alpha: f64,
    /// Share given to the direct-connection count.
    pub beta: f64,
    /// Share given to inverse minimal cost.
    pub delta: f64,
    /// Polygon mix: inverse centroid distance versus neighbor area.
    pub gamma: f64,
    /// Buffer radius. Required by the buffer and combined regimes.
    pub radius: Option<f64>,
    /// Paths costing more than this are treated as unreachable. `None` is unbounded.
    pub cost_limit: Option<f64>,
    /// Significance threshold on |z|.
    pub theta: f64,
}

impl Default for WeightParams {
    fn default() -> Self {
        WeightParams {
            alpha: 1.0 / 3.0,
            beta: 1.0 / 3.0,
            delta: 1.0 / 3.0,
            gamma: 0.5,
            radius: None,
            cost_limit: None,
            theta: 2.0,
        }
    }
}

impl WeightParams {
    pub const COEFFICIENT_TOLERANCE: f64 = 1e-9;

    pub fn with_coefficients(mut self, alpha: f64, beta: f64, delta: f64) -> Self {
        self.alpha = alpha;
        self.beta = beta;
        self.delta = delta;
        self
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = Some(radius);
        self
    }

    pub fn with_cost_limit(mut self, limit: f64) -> Self {
        self.cost_limit = Some(limit);
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("delta", self.delta),
            ("gamma", self.gamma),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParams(format!(
                    "{name} = {v} is outside [0, 1]"
                )));
            }
        }
        let sum = self.alpha + self.beta + self.delta;
        if (sum - 1.0).abs() > Self::COEFFICIENT_TOLERANCE {
            return Err(Error::InvalidParams(format!(
                "alpha + beta + delta = {sum}, expected 1"
            )));
        }
        if let Some(r) = self.radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidParams(format!("radius {r} must be positive")));
            }
        }
        if let Some(l) = self.cost_limit {
            if !(l > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "cost limit {l} must be positive"
                )));
            }
        }
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "theta {} must be positive",
                self.theta
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn site_ids_order_numerically() {
        let mut ids: Vec<SiteId> = ["216", "17", "30", "B", "A", "9"]
            .into_iter()
            .map(SiteId::from)
            .collect();
        ids.sort();
        let got: Vec<&str> = ids.iter().map(SiteId::as_str).collect();
        assert_eq!(got, ["9", "17", "30", "216", "A", "B"]);
    }

    #[test]
    fn closed_ring_is_normalized() {
        let sq = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
            Point::new(0.0, 0.0),
        ];
        let p = PolygonSite::new("a", sq, vec![], Attributes::new());
        assert_eq!(p.exterior.len(), 4);
    }

    #[test]
    fn params_reject_bad_coefficients() {
        let p = WeightParams::default().with_coefficients(0.5, 0.5, 0.5);
        assert!(matches!(p.validate(), Err(Error::InvalidParams(_))));
        assert!(WeightParams::default().validate().is_ok());
        assert!(WeightParams::default()
            .with_coefficients(1.0, 0.0, 0.0)
            .validate()
            .is_ok());
        assert!(WeightParams::default().with_theta(0.0).validate().is_err());
    }

    #[test]
    fn attribute_lookup_errors() {
        let mut attrs = Attributes::new();
        attrs.insert("v".into(), 1.0);
        let ds = SpatialDataset::from_points(vec![PointSite::new("a", 0.0, 0.0, attrs)], vec![]);
        assert_eq!(ds.attribute(&"a".into(), "v").unwrap(), 1.0);
        assert!(matches!(
            ds.attribute(&"a".into(), "w"),
            Err(Error::MissingAttribute { .. })
        ));
        assert!(matches!(
            ds.attribute(&"z".into(), "v"),
            Err(Error::UnknownSite(_))
        ));
    }
}
