use std::collections::HashSet;
use std::fmt;

use super::{polygon_centroid, ring_problem, SiteId, Sites, SpatialDataset};

/// One invariant violation found by [`validate_dataset`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    DuplicateId(SiteId),
    NonFiniteCoordinate(SiteId),
    CoincidentSites(SiteId, SiteId),
    MissingAttribute {
        site: SiteId,
        attribute: String,
    },
    NonFiniteAttribute {
        site: SiteId,
        attribute: String,
    },
    DegenerateRing {
        site: SiteId,
        ring: usize,
        reason: String,
    },
    DanglingEndpoint {
        edge: usize,
        id: SiteId,
    },
    SelfLoop {
        edge: usize,
        id: SiteId,
    },
    NonPositiveLength {
        edge: usize,
        length: f64,
    },
    NegativeCost {
        edge: usize,
        cost: f64,
    },
    EdgesOnPolygons {
        count: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateId(id) => write!(f, "duplicate site id {id}"),
            Violation::NonFiniteCoordinate(id) => {
                write!(f, "site {id} has a non-finite coordinate")
            }
            Violation::CoincidentSites(a, b) => write!(f, "coincident sites {a} and {b}"),
            Violation::MissingAttribute { site, attribute } => {
                write!(f, "site {site} is missing attribute {attribute}")
            }
            Violation::NonFiniteAttribute { site, attribute } => {
                write!(f, "site {site} has non-finite attribute {attribute}")
            }
            Violation::DegenerateRing { site, ring, reason } => {
                write!(f, "site {site} ring {ring} is degenerate: {reason}")
            }
            Violation::DanglingEndpoint { edge, id } => {
                write!(f, "edge {edge}: dangling endpoint {id}")
            }
            Violation::SelfLoop { edge, id } => write!(f, "edge {edge}: self loop on {id}"),
            Violation::NonPositiveLength { edge, length } => {
                write!(f, "edge {edge}: length {length} is not positive")
            }
            Violation::NegativeCost { edge, cost } => {
                write!(f, "edge {edge}: cost {cost} is negative")
            }
            Violation::EdgesOnPolygons { count } => {
                write!(f, "{count} edges given for a polygon dataset")
            }
        }
    }
}

/// Every invariant violation in the dataset; empty when it is usable.
pub fn validate_dataset(dataset: &SpatialDataset) -> Vec<Violation> {
    let mut out = Vec::new();

    let mut seen = HashSet::new();
    for id in dataset.site_ids() {
        if !seen.insert(id) {
            out.push(Violation::DuplicateId(id.clone()));
        }
    }

    // representative locations, used for the coincidence check
    let mut located = Vec::new();
    match dataset.sites() {
        Sites::Points(points) => {
            for p in points {
                if p.location.is_finite() {
                    located.push((&p.id, p.location));
                } else {
                    out.push(Violation::NonFiniteCoordinate(p.id.clone()));
                }
            }
        }
        Sites::Polygons(polygons) => {
            for p in polygons {
                let mut ok = true;
                for (i, ring) in p.rings().enumerate() {
                    if let Some(reason) = ring_problem(ring) {
                        ok = false;
                        out.push(Violation::DegenerateRing {
                            site: p.id.clone(),
                            ring: i,
                            reason,
                        });
                    }
                }
                if ok {
                    match polygon_centroid(p) {
                        Ok(c) => located.push((&p.id, c)),
                        Err(e) => out.push(Violation::DegenerateRing {
                            site: p.id.clone(),
                            ring: 0,
                            reason: e.to_string(),
                        }),
                    }
                }
            }
        }
    }
    for i in 0..located.len() {
        for j in (i + 1)..located.len() {
            if located[i].1 == located[j].1 {
                out.push(Violation::CoincidentSites(
                    located[i].0.clone(),
                    located[j].0.clone(),
                ));
            }
        }
    }

    for id in dataset.site_ids() {
        for name in dataset.attribute_names() {
            match dataset.attribute(id, name) {
                Ok(v) if !v.is_finite() => out.push(Violation::NonFiniteAttribute {
                    site: id.clone(),
                    attribute: name.clone(),
                }),
                Ok(_) => {}
                Err(_) => out.push(Violation::MissingAttribute {
                    site: id.clone(),
                    attribute: name.clone(),
                }),
            }
        }
    }

    if dataset.polygons().is_some() && !dataset.edges().is_empty() {
        out.push(Violation::EdgesOnPolygons {
            count: dataset.edges().len(),
        });
    }
    for (i, e) in dataset.edges().iter().enumerate() {
        for id in [&e.from, &e.to] {
            if !dataset.contains(id) {
                out.push(Violation::DanglingEndpoint {
                    edge: i,
                    id: id.clone(),
                });
            }
        }
        if e.from == e.to {
            out.push(Violation::SelfLoop {
                edge: i,
                id: e.from.clone(),
            });
        }
        if !(e.length > 0.0 && e.length.is_finite()) {
            out.push(Violation::NonPositiveLength {
                edge: i,
                length: e.length,
            });
        }
        if !(e.cost >= 0.0 && e.cost.is_finite()) {
            out.push(Violation::NegativeCost {
                edge: i,
                cost: e.cost,
            });
        }
    }

    out
}
