//! Pushforward measures of `ω_tⁿ/n!` under velocity maps, their
//! time-invariance metrics, velocity range sets and moment images.

use crate::error::{Error, Result};
use crate::flows::{hamiltonian, HoloField};
use crate::geodesics::multi::MultiGeodesicPath;
use crate::geodesics::GeodesicPath;
use crate::grid::Manifold;

/// Weighted histogram on ℝ. Weights are normalized so the total mass equals
/// the manifold volume exactly (the pushforward of a volume form is
/// diffeomorphism-invariant); the removed quadrature defect is recorded.
#[derive(Clone, Debug)]
pub struct Measure1 {
    pub edges: Vec<f64>,
    pub weights: Vec<f64>,
    pub total_mass: f64,
    pub mass_defect: f64,
}

/// Weighted histogram on ℝ², row-major over `(x bin, y bin)`.
#[derive(Clone, Debug)]
pub struct Measure2 {
    pub x_edges: Vec<f64>,
    pub y_edges: Vec<f64>,
    pub weights: Vec<f64>,
    pub total_mass: f64,
    pub mass_defect: f64,
}

/// Histogram bin specification; `range: None` fits the data.
#[derive(Clone, Copy, Debug)]
pub struct BinSpec {
    pub count: usize,
    pub range: Option<(f64, f64)>,
}

impl BinSpec {
    pub fn auto(count: usize) -> Self {
        BinSpec { count, range: None }
    }

    pub fn fixed(count: usize, lo: f64, hi: f64) -> Self {
        BinSpec {
            count,
            range: Some((lo, hi)),
        }
    }

    fn edges(&self, values: &[f64]) -> Result<Vec<f64>> {
        if self.count == 0 {
            return Err(Error::EmptyBins);
        }
        let (lo, hi) = match self.range {
            Some(r) => r,
            None => {
                let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let pad = (hi - lo).max(1e-12) * 1e-9;
                (lo - pad, hi + pad)
            }
        };
        let step = (hi - lo) / self.count as f64;
        Ok((0..=self.count).map(|i| lo + i as f64 * step).collect())
    }
}

fn bin_index(edges: &[f64], v: f64) -> usize {
    let nbins = edges.len() - 1;
    let lo = edges[0];
    let hi = edges[nbins];
    let step = (hi - lo) / nbins as f64;
    (((v - lo) / step).floor() as isize).clamp(0, nbins as isize - 1) as usize
}

/// Pushforward of `ω_tⁿ/n!` under the velocity `u̇_t` at a path node.
pub fn pushforward(path: &GeodesicPath, i: usize, bins: &BinSpec) -> Result<Measure1> {
    let values = &path.velocities[i].data;
    let node_weights = path.manifold.node_measure(&path.metrics[i]);
    build_measure1(values, &node_weights, path.manifold.volume(), bins)
}

fn build_measure1(
    values: &[f64],
    node_weights: &[f64],
    volume: f64,
    bins: &BinSpec,
) -> Result<Measure1> {
    let edges = bins.edges(values)?;
    let mut weights = vec![0.0; edges.len() - 1];
    for (&v, &w) in values.iter().zip(node_weights) {
        weights[bin_index(&edges, v)] += w;
    }
    let raw: f64 = weights.iter().sum();
    let mass_defect = raw - volume;
    let scale = volume / raw;
    for w in weights.iter_mut() {
        *w *= scale;
    }
    Ok(Measure1 {
        edges,
        weights,
        total_mass: volume,
        mass_defect,
    })
}

/// Pushforward of `ω_t²/2!` under the time gradient at a product-path node.
pub fn pushforward_2d(
    multi: &MultiGeodesicPath,
    i: usize,
    j: usize,
    bins1: &BinSpec,
    bins2: &BinSpec,
) -> Result<Measure2> {
    let (v1, v2) = multi.velocity_pair(i, j);
    let vol = multi.volume_density(i, j);
    let node_weights = multi.manifold.node_measure(&vol);
    let x_edges = bins1.edges(&v1.data)?;
    let y_edges = bins2.edges(&v2.data)?;
    let nx = x_edges.len() - 1;
    let ny = y_edges.len() - 1;
    let n2 = v2.data.len();
    let mut weights = vec![0.0; nx * ny];
    for (k, &w) in node_weights.iter().enumerate() {
        let a = v1.data[k / n2];
        let b = v2.data[k % n2];
        weights[bin_index(&x_edges, a) * ny + bin_index(&y_edges, b)] += w;
    }
    let volume = multi.manifold.volume();
    let raw: f64 = weights.iter().sum();
    let mass_defect = raw - volume;
    let scale = volume / raw;
    for w in weights.iter_mut() {
        *w *= scale;
    }
    Ok(Measure2 {
        x_edges,
        y_edges,
        weights,
        total_mass: volume,
        mass_defect,
    })
}

fn centers(edges: &[f64]) -> Vec<f64> {
    edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

/// Sup distance of normalized CDFs of two atomized histograms (atoms at bin
/// centers); symmetric and zero iff the histograms agree.
pub fn measure_distance(a: &Measure1, b: &Measure1) -> f64 {
    let atoms_a: Vec<(f64, f64)> = centers(&a.edges)
        .into_iter()
        .zip(a.weights.iter().map(|&w| w / a.total_mass))
        .collect();
    let atoms_b: Vec<(f64, f64)> = centers(&b.edges)
        .into_iter()
        .zip(b.weights.iter().map(|&w| w / b.total_mass))
        .collect();
    cdf_sup_distance(&atoms_a, &atoms_b)
}

fn cdf_sup_distance(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let mut events: Vec<(f64, f64, f64)> = Vec::with_capacity(a.len() + b.len());
    for &(x, w) in a {
        events.push((x, w, 0.0));
    }
    for &(x, w) in b {
        events.push((x, 0.0, w));
    }
    events.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    let mut ca = 0.0;
    let mut cb = 0.0;
    let mut sup: f64 = 0.0;
    let mut k = 0;
    while k < events.len() {
        let x = events[k].0;
        while k < events.len() && events[k].0 == x {
            ca += events[k].1;
            cb += events[k].2;
            k += 1;
        }
        sup = sup.max((ca - cb).abs());
    }
    sup
}

/// Sliced sup-CDF distance over 16 fixed directions for plane measures.
pub fn measure_distance_2d(a: &Measure2, b: &Measure2) -> f64 {
    let mut worst: f64 = 0.0;
    for k in 0..16 {
        let theta = k as f64 * std::f64::consts::PI / 16.0;
        let (c, s) = (theta.cos(), theta.sin());
        let project = |m: &Measure2| -> Vec<(f64, f64)> {
            let cx = centers(&m.x_edges);
            let cy = centers(&m.y_edges);
            let ny = cy.len();
            m.weights
                .iter()
                .enumerate()
                .filter(|(_, &w)| w != 0.0)
                .map(|(idx, &w)| (cx[idx / ny] * c + cy[idx % ny] * s, w / m.total_mass))
                .collect()
        };
        worst = worst.max(cdf_sup_distance(&project(a), &project(b)));
    }
    worst
}

/// Velocity range sets: an interval for one time dimension, a point cloud
/// with convex hull for two.
#[derive(Clone, Debug)]
pub enum RangeSet {
    Interval {
        lo: f64,
        hi: f64,
    },
    Cloud {
        points: Vec<[f64; 2]>,
        hull: Vec<[f64; 2]>,
        /// Max distance of a cloud point outside its own hull (zero up to
        /// round-off, by construction).
        hull_defect: f64,
    },
}

impl RangeSet {
    pub fn interval(lo: f64, hi: f64) -> Self {
        RangeSet::Interval { lo, hi }
    }

    pub fn cloud(points: Vec<[f64; 2]>) -> Self {
        let hull = convex_hull(&points);
        let hull_defect = points
            .iter()
            .map(|p| point_polygon_distance(*p, &hull))
            .fold(0.0_f64, f64::max);
        RangeSet::Cloud {
            points,
            hull,
            hull_defect,
        }
    }
}

/// `A_t`: the velocity range over space at a fixed time node.
pub fn set_a(path: &GeodesicPath, i: usize) -> RangeSet {
    let v = &path.velocities[i];
    RangeSet::interval(v.min(), v.max())
}

/// `A_t` for two-dimensional time: cloud and hull of the gradient image.
pub fn set_a_2d(multi: &MultiGeodesicPath, i: usize, j: usize) -> RangeSet {
    let (v1, v2) = multi.velocity_pair(i, j);
    let mut points = Vec::with_capacity(v1.data.len() * v2.data.len());
    for &a in &v1.data {
        for &b in &v2.data {
            points.push([a, b]);
        }
    }
    RangeSet::cloud(points)
}

/// `B_x`: the closure of the velocity trajectory at a fixed point over a
/// time range, sampled plus endpoint limits evaluated at `±t_limit` from the
/// closed-form generator.
pub fn set_b(
    path: &GeodesicPath,
    m: f64,
    t_range: (f64, f64),
    samples: usize,
    t_limit: Option<f64>,
) -> Result<RangeSet> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut push = |v: f64| {
        lo = lo.min(v);
        hi = hi.max(v);
    };
    for k in 0..=samples {
        let t = t_range.0 + (t_range.1 - t_range.0) * k as f64 / samples as f64;
        push(path.cp1_point(t, m)?.udot);
    }
    if let Some(tl) = t_limit {
        push(path.cp1_point(tl, m)?.udot);
        push(path.cp1_point(-tl, m)?.udot);
    }
    Ok(RangeSet::interval(lo, hi))
}

/// Hausdorff distance between two range sets of the same kind.
pub fn hausdorff(a: &RangeSet, b: &RangeSet) -> Result<f64> {
    match (a, b) {
        (RangeSet::Interval { lo: a0, hi: a1 }, RangeSet::Interval { lo: b0, hi: b1 }) => {
            Ok((a0 - b0).abs().max((a1 - b1).abs()))
        }
        (RangeSet::Cloud { hull: ha, .. }, RangeSet::Cloud { hull: hb, .. }) => {
            Ok(polygon_hausdorff(ha, hb))
        }
        _ => Err(Error::precondition(
            "Hausdorff distance needs range sets of the same dimension",
        )),
    }
}

/// Image of the moment map of a commuting Hamiltonian tuple on a product,
/// before the mean-zero gauge; the per-factor gauge constants are recorded.
#[derive(Clone, Debug)]
pub struct MomentImage {
    pub set: RangeSet,
    /// Subtracted means: `H_gauged = H_raw − gauge`.
    pub gauge: [f64; 2],
    /// Max distance from hull boundary samples to the image cloud.
    pub coverage_defect: f64,
}

pub fn moment_image(manifold: &Manifold, tuple: &HoloField) -> Result<MomentImage> {
    let (f1, f2) = manifold.as_product()?;
    let HoloField::Product(v1, v2) = tuple else {
        return Err(Error::NonCommutingTuple);
    };
    let m1 = Manifold::Cp1(f1.clone());
    let m2 = Manifold::Cp1(f2.clone());
    let h1 = hamiltonian(&m1, v1, &m1.reference_metric())?;
    let h2 = hamiltonian(&m2, v2, &m2.reference_metric())?;
    // the Hamiltonians come back mean-zero; undo the gauge and record it
    let g1 = -h1.min();
    let g2 = -h2.min();
    let raw1 = h1.shift(g1);
    let raw2 = h2.shift(g2);
    let mut points = Vec::with_capacity(raw1.data.len() * raw2.data.len());
    for &a in &raw1.data {
        for &b in &raw2.data {
            points.push([a, b]);
        }
    }
    let set = RangeSet::cloud(points);
    let coverage_defect = match &set {
        RangeSet::Cloud { points, hull, .. } => coverage_defect(points, hull),
        _ => 0.0,
    };
    Ok(MomentImage {
        set,
        gauge: [g1, g2],
        coverage_defect,
    })
}

/// Monotone-chain convex hull, counter-clockwise, no repeated endpoint.
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    let n = pts.len();
    if n <= 2 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| -> f64 {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len_sq = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len_sq == 0.0 {
        0.0
    } else {
        ((ap[0] * ab[0] + ap[1] * ab[1]) / len_sq).clamp(0.0, 1.0)
    };
    let q = [a[0] + t * ab[0], a[1] + t * ab[1]];
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
}

fn point_inside_convex(p: [f64; 2], hull: &[[f64; 2]]) -> bool {
    if hull.len() < 3 {
        return false;
    }
    for k in 0..hull.len() {
        let a = hull[k];
        let b = hull[(k + 1) % hull.len()];
        let cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
        if cross < -1e-12 {
            return false;
        }
    }
    true
}

/// Distance from a point to a convex polygon (zero inside).
pub fn point_polygon_distance(p: [f64; 2], hull: &[[f64; 2]]) -> f64 {
    if hull.is_empty() {
        return f64::INFINITY;
    }
    if hull.len() == 1 {
        return ((p[0] - hull[0][0]).powi(2) + (p[1] - hull[0][1]).powi(2)).sqrt();
    }
    if point_inside_convex(p, hull) {
        return 0.0;
    }
    (0..hull.len())
        .map(|k| point_segment_distance(p, hull[k], hull[(k + 1) % hull.len()]))
        .fold(f64::INFINITY, f64::min)
}

/// Hausdorff distance between convex polygons; attained at vertices.
pub fn polygon_hausdorff(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    let d_ab = a
        .iter()
        .map(|&p| point_polygon_distance(p, b))
        .fold(0.0_f64, f64::max);
    let d_ba = b
        .iter()
        .map(|&p| point_polygon_distance(p, a))
        .fold(0.0_f64, f64::max);
    d_ab.max(d_ba)
}

/// Max distance from hull-boundary samples to the nearest cloud point;
/// measures how densely the image fills out its hull.
pub fn coverage_defect(points: &[[f64; 2]], hull: &[[f64; 2]]) -> f64 {
    if hull.len() < 2 || points.is_empty() {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    // offset samples so lattice-aligned hulls do not hide the defect
    let samples_per_edge = 37;
    for k in 0..hull.len() {
        let a = hull[k];
        let b = hull[(k + 1) % hull.len()];
        for s in 0..samples_per_edge {
            let t = (s as f64 + 0.5) / samples_per_edge as f64;
            let q = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
            let d = points
                .iter()
                .map(|p| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
        }
    }
    worst
}
