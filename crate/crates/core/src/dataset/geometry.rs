use super::{Point, PointSite, PolygonSite, SiteId};
use crate::error::{Error, Result};

/// Anything with an id and a single representative planar location.
pub trait Located {
    fn site_id(&self) -> &SiteId;
    fn representative(&self) -> Result<Point>;
}

impl Located for PointSite {
    fn site_id(&self) -> &SiteId {
        &self.id
    }

    fn representative(&self) -> Result<Point> {
        Ok(self.location)
    }
}

impl Located for PolygonSite {
    fn site_id(&self) -> &SiteId {
        &self.id
    }

    fn representative(&self) -> Result<Point> {
        polygon_centroid(self)
    }
}

/// Euclidean distance between two sites (point coordinates or centroids).
pub fn site_distance<S: Located>(a: &S, b: &S) -> Result<f64> {
    let d = a.representative()?.distance(&b.representative()?);
    if d > 0.0 {
        Ok(d)
    } else {
        Err(Error::DegenerateDistance(
            a.site_id().clone(),
            b.site_id().clone(),
        ))
    }
}

/// Signed area and first moments of a ring, computed relative to its first
/// vertex so large translations do not cost precision.
struct RingMoments {
    area: f64,
    centroid: Point,
}

fn ring_moments(ring: &[Point]) -> RingMoments {
    let origin = ring[0];
    let mut twice_area = 0.0;
    let mut mx = 0.0;
    let mut my = 0.0;
    for i in 0..ring.len() {
        let p = ring[i];
        let q = ring[(i + 1) % ring.len()];
        let (px, py) = (p.x - origin.x, p.y - origin.y);
        let (qx, qy) = (q.x - origin.x, q.y - origin.y);
        let cross = px * qy - qx * py;
        twice_area += cross;
        mx += (px + qx) * cross;
        my += (py + qy) * cross;
    }
    let area = twice_area / 2.0;
    let centroid = if area != 0.0 {
        Point::new(origin.x + mx / (6.0 * area), origin.y + my / (6.0 * area))
    } else {
        origin
    };
    RingMoments { area, centroid }
}

fn extent(ring: &[Point]) -> f64 {
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for p in ring {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    (x1 - x0).max(y1 - y0)
}

/// Describes why a ring is unusable, or `None` when it is fine.
pub(crate) fn ring_problem(ring: &[Point]) -> Option<String> {
    if ring.iter().any(|p| !p.is_finite()) {
        return Some("non-finite vertex".into());
    }
    let mut distinct: Vec<Point> = Vec::with_capacity(ring.len());
    for p in ring {
        if !distinct.contains(p) {
            distinct.push(*p);
        }
    }
    if distinct.len() < 3 {
        return Some(format!(
            "{} distinct vertices, need at least 3",
            distinct.len()
        ));
    }
    let e = extent(ring);
    if ring_moments(ring).area.abs() <= 1e-12 * e * e {
        return Some("zero area".into());
    }
    if self_intersects(ring) {
        return Some("self-intersecting".into());
    }
    None
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

fn segments_touch(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    (o1 == 0.0 && on_segment(a, b, c))
        || (o2 == 0.0 && on_segment(a, b, d))
        || (o3 == 0.0 && on_segment(c, d, a))
        || (o4 == 0.0 && on_segment(c, d, b))
}

fn self_intersects(ring: &[Point]) -> bool {
    let n = ring.len();
    for i in 0..n {
        let (a, b) = (ring[i], ring[(i + 1) % n]);
        for j in (i + 1)..n {
            let (c, d) = (ring[j], ring[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // consecutive edges folding back onto each other
                let shared = if j == i + 1 { b } else { a };
                let (p, q) = if j == i + 1 { (a, d) } else { (b, c) };
                if orient(p, shared, q) == 0.0
                    && (p.x - shared.x) * (q.x - shared.x) + (p.y - shared.y) * (q.y - shared.y)
                        > 0.0
                {
                    return true;
                }
                continue;
            }
            if segments_touch(a, b, c, d) {
                return true;
            }
        }
    }
    false
}

fn checked_rings(polygon: &PolygonSite) -> Result<()> {
    for (i, ring) in polygon.rings().enumerate() {
        if let Some(problem) = ring_problem(ring) {
            return Err(Error::Geometry(format!(
                "polygon {} ring {i}: {problem}",
                polygon.id
            )));
        }
    }
    Ok(())
}

/// Planar area of the exterior ring minus its holes.
pub fn polygon_area(polygon: &PolygonSite) -> Result<f64> {
    checked_rings(polygon)?;
    let outer = ring_moments(&polygon.exterior).area.abs();
    let holes: f64 = polygon
        .holes
        .iter()
        .map(|h| ring_moments(h).area.abs())
        .sum();
    let area = outer - holes;
    if area > 0.0 {
        Ok(area)
    } else {
        Err(Error::Geometry(format!(
            "polygon {} has non-positive net area",
            polygon.id
        )))
    }
}

/// Area-weighted centroid with holes subtracted.
pub fn polygon_centroid(polygon: &PolygonSite) -> Result<Point> {
    let area = polygon_area(polygon)?;
    let outer = ring_moments(&polygon.exterior);
    let mut sx = outer.area.abs() * outer.centroid.x;
    let mut sy = outer.area.abs() * outer.centroid.y;
    for hole in &polygon.holes {
        let m = ring_moments(hole);
        sx -= m.area.abs() * m.centroid.x;
        sy -= m.area.abs() * m.centroid.y;
    }
    Ok(Point::new(sx / area, sy / area))
}

/// Total length of boundary the two polygons have in common.
///
/// Segments count as shared when both endpoints of one lie within
/// `tolerance` of the other's supporting line; the overlap of their
/// projections is summed. A single shared vertex contributes nothing.
pub(crate) fn shared_boundary_length(a: &PolygonSite, b: &PolygonSite, tolerance: f64) -> f64 {
    let mut total = 0.0;
    for ra in a.rings() {
        for (p0, p1) in ring_segments(ra) {
            let len = p0.distance(&p1);
            if len <= tolerance {
                continue;
            }
            let (ux, uy) = ((p1.x - p0.x) / len, (p1.y - p0.y) / len);
            for rb in b.rings() {
                for (q0, q1) in ring_segments(rb) {
                    let off0 = ux * (q0.y - p0.y) - uy * (q0.x - p0.x);
                    let off1 = ux * (q1.y - p0.y) - uy * (q1.x - p0.x);
                    if off0.abs() > tolerance || off1.abs() > tolerance {
                        continue;
                    }
                    let t0 = ux * (q0.x - p0.x) + uy * (q0.y - p0.y);
                    let t1 = ux * (q1.x - p0.x) + uy * (q1.y - p0.y);
                    let lo = t0.min(t1).max(0.0);
                    let hi = t0.max(t1).min(len);
                    if hi > lo {
                        total += hi - lo;
                    }
                }
            }
        }
    }
    total
}

fn ring_segments(ring: &[Point]) -> impl Iterator<Item = (Point, Point)> + '_ {
    (0..ring.len()).map(move |i| (ring[i], ring[(i + 1) % ring.len()]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Attributes;

    fn poly(id: &str, pts: &[(f64, f64)]) -> PolygonSite {
        PolygonSite::new(
            id,
            pts.iter().map(|&(x, y)| Point::new(x, y)).collect(),
            vec![],
            Attributes::new(),
        )
    }

    fn unit_square() -> PolygonSite {
        poly("sq", &[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
    }

    #[test]
    fn unit_square_area_and_centroid() {
        assert_eq!(polygon_area(&unit_square()).unwrap(), 1.0);
        assert_eq!(
            polygon_centroid(&unit_square()).unwrap(),
            Point::new(0.5, 0.5)
        );
    }

    #[test]
    fn triangle_area_and_centroid() {
        let t = poly("t", &[(0.0, 0.0), (2.0, 0.0), (0.0, 2.0)]);
        // shoelace: (0*0 - 2*0) + (2*2 - 0*0) + (0*0 - 0*2) = 4, halved
        assert_eq!(polygon_area(&t).unwrap(), 2.0);
        let c = polygon_centroid(&t).unwrap();
        // vertex mean equals the area centroid for triangles
        assert!((c.x - 2.0 / 3.0).abs() < 1e-15);
        assert!((c.y - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn square_with_hole() {
        let hole: Vec<Point> = [(0.25, 0.25), (0.75, 0.25), (0.75, 0.75), (0.25, 0.75)]
            .iter()
            .map(|&(x, y)| Point::new(x, y))
            .collect();
        let mut sq = unit_square();
        sq.holes.push(hole);
        assert!((polygon_area(&sq).unwrap() - 0.75).abs() < 1e-15);
        let c = polygon_centroid(&sq).unwrap();
        assert!((c.x - 0.5).abs() < 1e-15 && (c.y - 0.5).abs() < 1e-15);
    }

    #[test]
    fn off_center_hole_shifts_centroid() {
        // 2x1 rectangle minus the unit square on the right: the left square remains
        let mut r = poly("r", &[(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (0.0, 1.0)]);
        r.holes.push(
            [(1.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0)]
                .iter()
                .map(|&(x, y)| Point::new(x, y))
                .collect(),
        );
        let c = polygon_centroid(&r).unwrap();
        assert!((c.x - 0.5).abs() < 1e-12 && (c.y - 0.5).abs() < 1e-12);
    }

    #[test]
    fn translated_square_centroid() {
        let sq = poly(
            "sq",
            &[(10.0, 10.0), (11.0, 10.0), (11.0, 11.0), (10.0, 11.0)],
        );
        assert_eq!(polygon_centroid(&sq).unwrap(), Point::new(10.5, 10.5));
    }

    #[test]
    fn degenerate_rings_rejected() {
        let collinear = poly("c", &[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]);
        assert!(matches!(polygon_area(&collinear), Err(Error::Geometry(_))));
        assert!(matches!(
            polygon_centroid(&collinear),
            Err(Error::Geometry(_))
        ));
        let two = poly("c", &[(0.0, 0.0), (1.0, 1.0), (0.0, 0.0)]);
        assert!(ring_problem(&two.exterior).is_some());
        let bowtie = poly("b", &[(0.0, 0.0), (2.0, 2.0), (2.0, 0.0), (0.0, 1.0)]);
        assert_eq!(
            ring_problem(&bowtie.exterior).as_deref(),
            Some("self-intersecting")
        );
        assert!(ring_problem(&unit_square().exterior).is_none());
    }

    #[test]
    fn point_distance_and_degenerate() {
        let a = PointSite::new("a", 0.0, 0.0, Attributes::new());
        let b = PointSite::new("b", 3.0, 4.0, Attributes::new());
        assert_eq!(site_distance(&a, &b).unwrap(), 5.0);
        assert_eq!(site_distance(&b, &a).unwrap(), 5.0);
        let same = unit_square();
        assert!(matches!(
            site_distance(&same, &same.clone()),
            Err(Error::DegenerateDistance(..))
        ));
    }

    #[test]
    fn polygon_distance_between_centroids() {
        let a = unit_square();
        let b = poly("b", &[(3.0, 0.0), (4.0, 0.0), (4.0, 1.0), (3.0, 1.0)]);
        // centroids (0.5, 0.5) and (3.5, 0.5)
        assert_eq!(site_distance(&a, &b).unwrap(), 3.0);
    }

    #[test]
    fn shared_edge_versus_corner() {
        let a = unit_square();
        let right = poly("r", &[(1.0, 0.0), (2.0, 0.0), (2.0, 1.0), (1.0, 1.0)]);
        let corner = poly("c", &[(1.0, 1.0), (2.0, 1.0), (2.0, 2.0), (1.0, 2.0)]);
        assert!((shared_boundary_length(&a, &right, 1e-9) - 1.0).abs() < 1e-12);
        assert_eq!(shared_boundary_length(&a, &corner, 1e-9), 0.0);
        // partial overlap along a longer edge
        let tall = poly("t", &[(1.0, 0.5), (2.0, 0.5), (2.0, 3.0), (1.0, 3.0)]);
        assert!((shared_boundary_length(&a, &tall, 1e-9) - 0.5).abs() < 1e-12);
    }
}
