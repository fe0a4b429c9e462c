/// Boundary tolerance used by the metrics in this module.
pub const HULL_TOL: f64 = 1e-9;

/// Convex hull of a planar point set.
///
/// Vertices are in counter-clockwise order with no three collinear. A
/// single distinct input point gives a one-vertex hull and collinear input
/// gives the two segment endpoints; empty input gives an empty hull.
#[derive(Clone, Debug, PartialEq)]
pub struct Hull2D {
    vertices: Vec<[f64; 2]>,
}

impl Hull2D {
    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        if n < 3 {
            return 0.0;
        }
        0.5 * (0..n)
            .map(|i| {
                let (a, b) = (v[i], v[(i + 1) % n]);
                a[0] * b[1] - a[1] * b[0]
            })
            .sum::<f64>()
    }

    /// Vertex average. `None` for an empty hull.
    pub fn centroid(&self) -> Option<[f64; 2]> {
        if self.vertices.is_empty() {
            return None;
        }
        let n = self.vertices.len() as f64;
        let sx: f64 = self.vertices.iter().map(|p| p[0]).sum();
        let sy: f64 = self.vertices.iter().map(|p| p[1]).sum();
        Some([sx / n, sy / n])
    }

    pub fn contains(&self, p: [f64; 2], tol: f64) -> bool {
        point_in_hull(self, p, tol)
    }
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Andrew's monotone chain.
pub fn convex_hull_2d(points: &[[f64; 2]]) -> Hull2D {
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() <= 2 {
        return Hull2D { vertices: pts };
    }
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    Hull2D { vertices: hull }
}

/// Inclusive containment: points within `tol` of the hull count as inside.
pub fn point_in_hull(h: &Hull2D, p: [f64; 2], tol: f64) -> bool {
    let v = &h.vertices;
    match v.len() {
        0 => false,
        1 => dist(v[0], p) <= tol,
        2 => segment_dist(v[0], v[1], p) <= tol,
        n => (0..n).all(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            cross(a, b, p) >= -tol * dist(a, b)
        }),
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn segment_dist(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let t = (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / (dx * dx + dy * dy)).clamp(0.0, 1.0);
    dist([a[0] + t * dx, a[1] + t * dy], p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    use crate::RngStream;

    fn random_points(n: usize, rng: &mut RngStream) -> Vec<[f64; 2]> {
        (0..n)
            .map(|_| [rng.random_range(-3.0..3.0), rng.random_range(-1.0..2.0)])
            .collect()
    }

    // Crossing-number test on the closed polygon, independent of the
    // half-plane rule used by point_in_hull.
    fn crossing_oracle(v: &[[f64; 2]], p: [f64; 2]) -> bool {
        let mut inside = false;
        let n = v.len();
        for i in 0..n {
            let (a, b) = (v[i], v[(i + n - 1) % n]);
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                if p[0] < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    #[test]
    fn square_with_interior_points() {
        let mut pts = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        pts.extend([[0.5, 0.5], [0.2, 0.7], [0.5, 0.0], [0.9, 0.1]]);
        let h = convex_hull_2d(&pts);
        assert_eq!(h.vertices(), &[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        assert!((h.area() - 1.0).abs() < 1e-15);
        assert!(h.contains(h.centroid().unwrap(), HULL_TOL));
        for v in h.vertices() {
            assert!(h.contains(*v, HULL_TOL));
        }
        assert!(h.contains([1.0 + 5e-10, 0.5], HULL_TOL));
        assert!(!h.contains([1.0 + 1e-6, 0.5], HULL_TOL));
    }

    #[test]
    fn degenerate_hulls() {
        let h = convex_hull_2d(&[[1.0, 2.0]; 5]);
        assert_eq!(h.vertices(), &[[1.0, 2.0]]);
        assert!(h.contains([1.0, 2.0], HULL_TOL));
        assert!(!h.contains([1.0, 2.1], HULL_TOL));

        let h = convex_hull_2d(&[[0.0, 0.0], [2.0, 2.0], [1.0, 1.0], [3.0, 3.0]]);
        assert_eq!(h.vertices(), &[[0.0, 0.0], [3.0, 3.0]]);
        assert!(h.contains([1.5, 1.5], HULL_TOL));
        assert!(!h.contains([1.5, 1.6], HULL_TOL));
        assert!(!h.contains([4.0, 4.0], HULL_TOL));

        let h = convex_hull_2d(&[]);
        assert!(h.is_empty());
        assert!(!h.contains([0.0, 0.0], 1.0));
    }

    #[test]
    fn strictly_convex_and_ccw() {
        let mut rng = RngStream::new(1);
        let h = convex_hull_2d(&random_points(200, &mut rng));
        let v = h.vertices();
        let n = v.len();
        assert!(n >= 3);
        for i in 0..n {
            assert!(cross(v[i], v[(i + 1) % n], v[(i + 2) % n]) > 0.0);
        }
    }

    #[test]
    fn inputs_inside_and_idempotent() {
        let mut rng = RngStream::new(2);
        let pts = random_points(100, &mut rng);
        let h = convex_hull_2d(&pts);
        assert!(pts.iter().all(|p| h.contains(*p, HULL_TOL)));
        assert_eq!(convex_hull_2d(h.vertices()), h);
    }

    #[test]
    fn adding_points_never_shrinks() {
        let mut rng = RngStream::new(3);
        let mut pts = random_points(30, &mut rng);
        let mut h = convex_hull_2d(&pts);
        for _ in 0..20 {
            pts.extend(random_points(5, &mut rng).iter().map(|p| [p[0] * 1.3, p[1] * 1.3]));
            let bigger = convex_hull_2d(&pts);
            assert!(h.vertices().iter().all(|v| bigger.contains(*v, HULL_TOL)));
            assert!(bigger.area() >= h.area());
            h = bigger;
        }
    }

    #[test]
    fn agrees_with_crossing_number() {
        let mut rng = RngStream::new(4);
        let h = convex_hull_2d(&random_points(60, &mut rng));
        let mut disagreements = 0;
        for _ in 0..10_000 {
            let q = [rng.random_range(-4.0..4.0), rng.random_range(-2.0..3.0)];
            if h.contains(q, HULL_TOL) != crossing_oracle(h.vertices(), q) {
                disagreements += 1;
            }
        }
        assert_eq!(disagreements, 0);
    }
}
