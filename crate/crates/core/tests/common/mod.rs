//! Shared generators and independent oracles for the integration tests.
#![allow(dead_code)]

use rand::Rng;
use spatial_outlier::dataset::Attributes;
use spatial_outlier::{Edge, Point, PointSite, PolygonSite, SpatialDataset};

pub fn attrs(name: &str, v: f64) -> Attributes {
    let mut a = Attributes::new();
    a.insert(name.to_string(), v);
    a
}

pub fn rect(id: &str, x: f64, y: f64, w: f64, h: f64, value: f64) -> PolygonSite {
    PolygonSite::new(
        id,
        vec![
            Point::new(x, y),
            Point::new(x + w, y),
            Point::new(x + w, y + h),
            Point::new(x, y + h),
        ],
        vec![],
        attrs("v", value),
    )
}

/// `rows x cols` grid of `size`-sided squares with attribute `v` from `value`.
pub fn square_grid(
    rows: usize,
    cols: usize,
    size: f64,
    mut value: impl FnMut(usize, usize) -> f64,
) -> SpatialDataset {
    let mut cells = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            cells.push(rect(
                &format!("r{r}c{c}"),
                c as f64 * size,
                r as f64 * size,
                size,
                size,
                value(r, c),
            ));
        }
    }
    SpatialDataset::from_polygons(cells)
}

/// Random point dataset with attribute `v` and a random multigraph.
pub fn random_points<R: Rng>(rng: &mut R, n: usize, extent: f64, edge_prob: f64) -> SpatialDataset {
    let sites: Vec<PointSite> = (0..n)
        .map(|i| {
            PointSite::new(
                format!("s{i}"),
                rng.gen_range(0.0..extent),
                rng.gen_range(0.0..extent),
                attrs("v", rng.gen_range(0.0..100.0)),
            )
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            while rng.gen_bool(edge_prob) {
                edges.push(Edge::new(
                    format!("s{i}"),
                    format!("s{j}"),
                    rng.gen_range(0.1..10.0),
                    rng.gen_range(0.0..10.0),
                ));
                if edges.len() % 3 != 0 {
                    break;
                }
            }
        }
    }
    SpatialDataset::from_points(sites, edges)
}

/// Minimum cost over every simple path from `a` to `b`, by exhaustive DFS.
pub fn brute_force_min_cost(
    n: usize,
    edges: &[(usize, usize, f64)],
    a: usize,
    b: usize,
    limit: Option<f64>,
) -> Option<f64> {
    fn dfs(
        node: usize,
        target: usize,
        cost: f64,
        visited: &mut Vec<bool>,
        edges: &[(usize, usize, f64)],
        best: &mut Option<f64>,
    ) {
        if node == target {
            if best.is_none_or(|b| cost < b) {
                *best = Some(cost);
            }
            return;
        }
        for &(u, v, c) in edges {
            let next = if u == node {
                v
            } else if v == node {
                u
            } else {
                continue;
            };
            if !visited[next] {
                visited[next] = true;
                dfs(next, target, cost + c, visited, edges, best);
                visited[next] = false;
            }
        }
    }
    let mut visited = vec![false; n];
    visited[a] = true;
    let mut best = None;
    dfs(a, b, 0.0, &mut visited, edges, &mut best);
    best.filter(|c| limit.is_none_or(|l| *c <= l))
}

/// Population mean and standard deviation, plain two-pass.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Line printed by every acceptance criterion.
pub fn verdict(name: &str, ok: bool, detail: &str) {
    println!("[{}] {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{name}: {detail}");
}
