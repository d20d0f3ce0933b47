//! Meshed parameter domains: the staggered latitude/longitude sphere grid,
//! products of two such grids, and the 2-cycles used for Chern pairings.
//!
//! Nodes live at `θ_a = 2πa/n_theta`, `φ_b = π(b + ½)/n_phi`, so no node
//! sits on a pole. The quadrilaterals between neighbouring rings and the two
//! polar cap polygons close the surface. Every plaquette is listed
//! counterclockwise as seen from outside the unit sphere.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // `Float` is shadowed by inherent methods when std is linked
use num_traits::{Euclid, Float};

use crate::error::Error;

pub const MIN_N_THETA: usize = 8;
pub const MIN_N_PHI: usize = 5;

/// A point of the `(θ, φ)` chart: azimuth `θ`, polar angle `φ` from the north pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    pub theta: f64,
    pub phi: f64,
}

impl SpherePoint {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self { theta, phi }
    }

    pub fn embed(&self) -> EmbeddedPoint {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        EmbeddedPoint { x: sp * ct, y: sp * st, z: cp }
    }
}

/// Ambient coordinates on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddedPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl EmbeddedPoint {
    pub fn norm_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn to_chart(&self) -> SpherePoint {
        let phi = self.z.clamp(-1.0, 1.0).acos();
        let mut theta = self.y.atan2(self.x);
        if theta < 0.0 {
            theta += 2.0 * PI;
        }
        SpherePoint { theta, phi }
    }

    fn dot(&self, o: &Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    fn triple(a: &Self, b: &Self, c: &Self) -> f64 {
        a.x * (b.y * c.z - b.z * c.y) - a.y * (b.x * c.z - b.z * c.x) + a.z * (b.x * c.y - b.y * c.x)
    }
}

/// A point of a parameter domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Sphere(SpherePoint),
    Product(SpherePoint, SpherePoint),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaquetteKind {
    Quad,
    NorthCap,
    SouthCap,
}

/// One face of the closed surface, with vertex node indices in traversal order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plaquette {
    pub kind: PlaquetteKind,
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereGrid {
    n_theta: usize,
    n_phi: usize,
}

/// Build the staggered grid; sizes below `8 × 5` are rejected as under-resolved.
pub fn build_sphere_grid(n_theta: usize, n_phi: usize) -> Result<SphereGrid, Error> {
    SphereGrid::new(n_theta, n_phi)
}

impl SphereGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self, Error> {
        if n_theta < MIN_N_THETA || n_phi < MIN_N_PHI {
            return Err(Error::UnderResolved { n_theta, n_phi });
        }
        Ok(Self { n_theta, n_phi })
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn node_count(&self) -> usize {
        self.n_theta * self.n_phi
    }

    pub fn d_theta(&self) -> f64 {
        2.0 * PI / self.n_theta as f64
    }

    pub fn d_phi(&self) -> f64 {
        PI / self.n_phi as f64
    }

    pub fn theta_at(&self, a: usize) -> f64 {
        self.d_theta() * a as f64
    }

    pub fn phi_at(&self, b: usize) -> f64 {
        self.d_phi() * (b as f64 + 0.5)
    }

    /// Row-major `(b, a)` index; `a` wraps periodically.
    pub fn index(&self, a: usize, b: usize) -> usize {
        b * self.n_theta + a % self.n_theta
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.n_theta, idx / self.n_theta)
    }

    pub fn node(&self, idx: usize) -> SpherePoint {
        let (a, b) = self.coords(idx);
        SpherePoint::new(self.theta_at(a), self.phi_at(b))
    }

    pub fn check_node(&self, idx: usize) -> Result<(), Error> {
        if idx < self.node_count() {
            Ok(())
        } else {
            Err(Error::InvalidNode { index: idx, count: self.node_count() })
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = SpherePoint> + '_ {
        (0..self.node_count()).map(move |i| self.node(i))
    }

    /// Nearest node in the chart, with `θ` taken modulo `2π`.
    pub fn nearest_node(&self, p: &SpherePoint) -> usize {
        let t = Euclid::rem_euclid(&p.theta, &(2.0 * PI)) / self.d_theta();
        let a = (t.round() as usize) % self.n_theta;
        let bf = p.phi / self.d_phi() - 0.5;
        let b = bf.round().clamp(0.0, (self.n_phi - 1) as f64) as usize;
        self.index(a, b)
    }

    /// Quadrilaterals first (row-major by lower-left corner), then the north
    /// and south caps.
    pub fn plaquettes(&self) -> Vec<Plaquette> {
        let nt = self.n_theta;
        let mut out = Vec::with_capacity(nt * (self.n_phi - 1) + 2);
        for b in 0..self.n_phi - 1 {
            for a in 0..nt {
                out.push(Plaquette {
                    kind: PlaquetteKind::Quad,
                    vertices: alloc::vec![
                        self.index(a, b),
                        self.index(a, b + 1),
                        self.index(a + 1, b + 1),
                        self.index(a + 1, b),
                    ],
                });
            }
        }
        out.push(Plaquette {
            kind: PlaquetteKind::NorthCap,
            vertices: (0..nt).map(|a| self.index(a, 0)).collect(),
        });
        let last = self.n_phi - 1;
        out.push(Plaquette {
            kind: PlaquetteKind::SouthCap,
            vertices: (0..nt).rev().map(|a| self.index(a, last)).collect(),
        });
        out
    }

    /// Undirected grid edges: every ring edge (including the wraparound) and
    /// every meridian edge between adjacent rings.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let nt = self.n_theta;
        let mut out = Vec::with_capacity(nt * (2 * self.n_phi - 1));
        for b in 0..self.n_phi {
            for a in 0..nt {
                out.push((self.index(a, b), self.index(a + 1, b)));
                if b + 1 < self.n_phi {
                    out.push((self.index(a, b), self.index(a, b + 1)));
                }
            }
        }
        out
    }

    pub fn neighbors(&self, idx: usize) -> Vec<usize> {
        let (a, b) = self.coords(idx);
        let nt = self.n_theta;
        let mut out = alloc::vec![self.index(a + 1, b), self.index(a + nt - 1, b)];
        if b > 0 {
            out.push(self.index(a, b - 1));
        }
        if b + 1 < self.n_phi {
            out.push(self.index(a, b + 1));
        }
        out
    }

    /// Signed area of the geodesic polygon through the plaquette's vertices.
    /// Caps are fanned from their pole so the polygon closes over it.
    pub fn signed_area(&self, plaq: &Plaquette) -> f64 {
        let pts: Vec<EmbeddedPoint> = plaq.vertices.iter().map(|&i| self.node(i).embed()).collect();
        let m = pts.len();
        match plaq.kind {
            PlaquetteKind::Quad => (1..m - 1).map(|k| triangle_area(&pts[0], &pts[k], &pts[k + 1])).sum(),
            PlaquetteKind::NorthCap | PlaquetteKind::SouthCap => {
                let z = if plaq.kind == PlaquetteKind::NorthCap { 1.0 } else { -1.0 };
                let pole = EmbeddedPoint { x: 0.0, y: 0.0, z };
                (0..m).map(|k| triangle_area(&pole, &pts[k], &pts[(k + 1) % m])).sum()
            }
        }
    }

    pub fn signed_area_sum(&self) -> f64 {
        // Kahan summation keeps the total reproducible at large sizes.
        let mut sum = 0.0;
        let mut comp = 0.0;
        for p in self.plaquettes() {
            let y = self.signed_area(&p) - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        sum
    }

    /// Interior quadrilateral centres in the chart, used by midpoint quadrature.
    pub fn quad_midpoints(&self) -> impl Iterator<Item = SpherePoint> + '_ {
        let nt = self.n_theta;
        (0..(self.n_phi - 1) * nt).map(move |k| {
            let (a, b) = (k % nt, k / nt);
            SpherePoint::new(self.theta_at(a) + 0.5 * self.d_theta(), self.d_phi() * (b as f64 + 1.0))
        })
    }
}

/// Oriented spherical triangle area (Van Oosterom–Strackee).
fn triangle_area(a: &EmbeddedPoint, b: &EmbeddedPoint, c: &EmbeddedPoint) -> f64 {
    let num = EmbeddedPoint::triple(a, b, c);
    let den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    2.0 * num.atan2(den)
}

/// How the nodes of a cycle's grid sit inside the ambient domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CycleEmbedding {
    /// The cycle is the whole sphere domain.
    Sphere,
    /// `S² × {fixed}` inside a product.
    ProductFirst { fixed: SpherePoint },
    /// `{fixed} × S²` inside a product.
    ProductSecond { fixed: SpherePoint },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cycle {
    pub label: String,
    pub grid: SphereGrid,
    pub embedding: CycleEmbedding,
    /// Grid node that maps to the domain basepoint; global eigenvalue
    /// orderings on every cycle are rooted here.
    pub root: usize,
}

impl Cycle {
    pub fn point(&self, node: usize) -> Point {
        self.lift(&self.grid.node(node))
    }

    pub fn lift(&self, p: &SpherePoint) -> Point {
        match self.embedding {
            CycleEmbedding::Sphere => Point::Sphere(*p),
            CycleEmbedding::ProductFirst { fixed } => Point::Product(*p, fixed),
            CycleEmbedding::ProductSecond { fixed } => Point::Product(fixed, *p),
        }
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.grid.node_count()).map(move |i| self.point(i))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleBasis {
    cycles: Vec<Cycle>,
}

impl CycleBasis {
    pub fn new(cycles: Vec<Cycle>) -> Result<Self, Error> {
        if cycles.is_empty() {
            return Err(Error::EmptyBasis);
        }
        Ok(Self { cycles })
    }

    /// The fundamental class of a sphere domain, rooted at node 0.
    pub fn sphere(grid: &SphereGrid) -> Self {
        Self {
            cycles: alloc::vec![Cycle {
                label: String::from("S2"),
                grid: grid.clone(),
                embedding: CycleEmbedding::Sphere,
                root: 0,
            }],
        }
    }

    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }
}

/// `S² × S²` with basepoints and the two standard generators of `H₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductDomain {
    pub first: SphereGrid,
    pub second: SphereGrid,
    pub basepoint_first: usize,
    pub basepoint_second: usize,
}

pub fn build_product_domain(
    first: SphereGrid,
    second: SphereGrid,
    basepoint_first: usize,
    basepoint_second: usize,
) -> Result<ProductDomain, Error> {
    first.check_node(basepoint_first)?;
    second.check_node(basepoint_second)?;
    Ok(ProductDomain { first, second, basepoint_first, basepoint_second })
}

impl ProductDomain {
    pub fn basepoint(&self) -> Point {
        Point::Product(self.first.node(self.basepoint_first), self.second.node(self.basepoint_second))
    }

    /// `C₁ = S² × {q₀}` and `C₂ = {p₀} × S²`, both rooted at `(p₀, q₀)`.
    pub fn cycle_basis(&self) -> CycleBasis {
        let p0 = self.first.node(self.basepoint_first);
        let q0 = self.second.node(self.basepoint_second);
        CycleBasis {
            cycles: alloc::vec![
                Cycle {
                    label: String::from("S2xpt"),
                    grid: self.first.clone(),
                    embedding: CycleEmbedding::ProductFirst { fixed: q0 },
                    root: self.basepoint_first,
                },
                Cycle {
                    label: String::from("ptxS2"),
                    grid: self.second.clone(),
                    embedding: CycleEmbedding::ProductSecond { fixed: p0 },
                    root: self.basepoint_second,
                },
            ],
        }
    }
}

/// Either kind of supported domain.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Sphere(SphereGrid),
    Product(ProductDomain),
}

impl Domain {
    pub fn cycle_basis(&self) -> CycleBasis {
        match self {
            Domain::Sphere(g) => CycleBasis::sphere(g),
            Domain::Product(p) => p.cycle_basis(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid_counts() {
        let g = build_sphere_grid(8, 5).unwrap();
        assert_eq!(g.node_count(), 40);
        assert_eq!(g.plaquettes().len(), 34);
    }

    #[test]
    fn rejects_coarse_grids() {
        assert!(matches!(build_sphere_grid(4, 5), Err(Error::UnderResolved { .. })));
        assert!(build_sphere_grid(8, 4).is_err());
    }

    #[test]
    fn area_sums_to_full_sphere() {
        for (nt, np) in [(8, 5), (64, 32), (200, 100)] {
            let g = build_sphere_grid(nt, np).unwrap();
            let s = g.signed_area_sum();
            assert!((s - 4.0 * PI).abs() <= 1e-9 * 4.0 * PI, "{nt}x{np}: {s}");
        }
    }

    #[test]
    fn every_plaquette_is_positively_oriented() {
        let g = build_sphere_grid(16, 8).unwrap();
        for p in g.plaquettes() {
            assert!(g.signed_area(&p) > 0.0);
        }
    }

    #[test]
    fn nodes_avoid_poles_and_embed_on_unit_sphere() {
        let g = build_sphere_grid(12, 7).unwrap();
        for p in g.nodes() {
            assert!(p.phi > 0.0 && p.phi < PI);
            assert!((p.embed().norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn every_node_sits_on_two_or_more_plaquettes() {
        let g = build_sphere_grid(8, 5).unwrap();
        let mut count = alloc::vec![0usize; g.node_count()];
        for p in g.plaquettes() {
            for v in p.vertices {
                count[v] += 1;
            }
        }
        assert!(count.iter().all(|&c| c >= 2));
    }

    #[test]
    fn every_interior_edge_is_traversed_once_each_way() {
        let g = build_sphere_grid(9, 6).unwrap();
        let mut directed = alloc::collections::BTreeMap::new();
        for p in g.plaquettes() {
            let m = p.vertices.len();
            for k in 0..m {
                *directed.entry((p.vertices[k], p.vertices[(k + 1) % m])).or_insert(0) += 1;
            }
        }
        for (&(u, v), &c) in &directed {
            assert_eq!(c, 1);
            assert_eq!(directed.get(&(v, u)), Some(&1));
        }
        assert_eq!(directed.len(), 2 * g.edges().len());
    }

    #[test]
    fn nearest_node_is_identity_on_nodes() {
        let g = build_sphere_grid(16, 9).unwrap();
        for i in 0..g.node_count() {
            let back = g.node(i).embed().to_chart();
            assert_eq!(g.nearest_node(&back), i);
        }
    }

    #[test]
    fn theta_index_wraps() {
        let g = build_sphere_grid(8, 5).unwrap();
        assert_eq!(g.index(8, 2), g.index(0, 2));
    }

    #[test]
    fn product_basis_has_two_cycles_through_basepoint() {
        let g = build_sphere_grid(8, 5).unwrap();
        let d = build_product_domain(g.clone(), g.clone(), 3, 7).unwrap();
        let basis = d.cycle_basis();
        assert_eq!(basis.len(), 2);
        let q0 = g.node(7);
        for i in 0..g.node_count() {
            match basis.cycles()[0].point(i) {
                Point::Product(_, q) => assert_eq!(q, q0),
                _ => panic!("expected product point"),
            }
        }
        let c = &basis.cycles()[0];
        assert_eq!(c.point(c.root), d.basepoint());
        let c = &basis.cycles()[1];
        assert_eq!(c.point(c.root), d.basepoint());
    }

    #[test]
    fn product_rejects_bad_basepoint() {
        let g = build_sphere_grid(8, 5).unwrap();
        assert!(build_product_domain(g.clone(), g, 40, 0).is_err());
    }
}
