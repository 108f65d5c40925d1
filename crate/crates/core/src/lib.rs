//! Spatial outlier detection over a weighted neighborhood relationship.
//!
//! Each site's expected attribute value is the weighted mean of its
//! neighbors, where a neighbor's weight of effect combines inverse distance,
//! the number of direct connections and inverse minimal travel cost (or, for
//! polygons, inverse centroid distance and area). Sites whose standardized
//! difference between actual and expected value exceeds a threshold are
//! flagged as outliers.
//!
//! ```
//! use spatial_outlier::{detect_outliers, fixtures, Mode, Regime, WeightParams};
//!
//! let villages = fixtures::literacy_villages();
//! let result = detect_outliers(
//!     &villages,
//!     fixtures::LITERACY_ATTRIBUTE,
//!     &WeightParams::default(),
//!     Regime::Polygon,
//!     Mode::Weighted,
//! )
//! .unwrap();
//! assert_eq!(result.outliers().len(), 9);
//! ```

pub mod cli;
pub mod dataset;
pub mod detect;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod neighborhood;
pub mod weights;

pub use dataset::{
    polygon_area, polygon_centroid, site_distance, validate_dataset, Edge, Point, PointSite,
    PolygonSite, SiteId, SpatialDataset, Violation, WeightParams,
};
pub use detect::{
    compare_models, detect_outliers, difference_scores, expected_classical, expected_weighted,
    significance_scores, ComparisonReport, DetectionResult, Mode, SiteScore,
};
pub use error::{Error, Result};
pub use neighborhood::{
    buffer_neighbors, collect_factors, direct_connection_count, graph_neighbors, min_cost,
    polygon_adjacent_neighbors, NeighborFactors, Regime,
};
pub use weights::{
    combined_weights, connection_weights, distance_weights, polygon_weights, WeightedNeighborhood,
};
