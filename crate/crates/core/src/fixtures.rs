//! Bundled example datasets.
//!
//! * `network`: eleven labelled point sites (A..L, no I) joined by a small
//!   road multigraph. Around `A` a buffer of [`NETWORK_RADIUS`] holds
//!   B, H, J and K, while the sites directly connected to `A` are B, D and E.
//! * `literacy-villages`: 167 polygon villages with a female illiteracy
//!   percentage (`illit_f`). Run through the polygon regime with the
//!   default `gamma` and a threshold of 2, it reproduces a published table
//!   of village z-scores for both the weighted and the classical model.
//! * `village27`: village 27 and its seven neighbors. Inverse-distance
//!   weights range from 0.41 (village 29) down to 0.05 (village 42); the
//!   neighbors average 45 while the weighted expectation is 28, against an
//!   actual value of 26.

use std::fs;
use std::path::{Path, PathBuf};

use crate::dataset::SpatialDataset;
use crate::error::{Error, Result};
use crate::io::{read_edges, read_polygons, read_sites};

pub const NETWORK_SITES: &str = include_str!("../fixtures/network-sites.csv");
pub const NETWORK_EDGES: &str = include_str!("../fixtures/network-edges.csv");
pub const LITERACY_VILLAGES: &str = include_str!("../fixtures/literacy-villages.json");
pub const VILLAGE27_SITES: &str = include_str!("../fixtures/village27-sites.csv");

pub const NETWORK_RADIUS: f64 = 3.0;
pub const NETWORK_ATTRIBUTE: &str = "v";
pub const VILLAGE27_RADIUS: f64 = 9.0;
pub const LITERACY_ATTRIBUTE: &str = "illit_f";

pub const FILES: [(&str, &str); 4] = [
    ("network-sites.csv", NETWORK_SITES),
    ("network-edges.csv", NETWORK_EDGES),
    ("literacy-villages.json", LITERACY_VILLAGES),
    ("village27-sites.csv", VILLAGE27_SITES),
];

pub fn network() -> SpatialDataset {
    let sites = read_sites(NETWORK_SITES.as_bytes(), Path::new("network-sites.csv"))
        .expect("bundled fixture parses");
    let edges = read_edges(NETWORK_EDGES.as_bytes(), Path::new("network-edges.csv"))
        .expect("bundled fixture parses");
    SpatialDataset::from_points(sites, edges)
}

pub fn literacy_villages() -> SpatialDataset {
    let polygons = read_polygons(
        LITERACY_VILLAGES.as_bytes(),
        Path::new("literacy-villages.json"),
    )
    .expect("bundled fixture parses");
    SpatialDataset::from_polygons(polygons)
}

pub fn village27() -> SpatialDataset {
    let sites = read_sites(VILLAGE27_SITES.as_bytes(), Path::new("village27-sites.csv"))
        .expect("bundled fixture parses");
    SpatialDataset::from_points(sites, Vec::new())
}

/// Writes every bundled file into `dir`, creating it if needed.
pub fn write_fixtures(dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    FILES
        .iter()
        .map(|(name, contents)| {
            let path = dir.join(name);
            fs::write(&path, contents).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            Ok(path)
        })
        .collect()
}
