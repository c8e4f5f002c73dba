//! Continuum domains, lattice discretizations `X = Ω ∪ Γ`, and ε-ball
//! neighborhood queries.
//!
//! A [`Grid`] is the lattice `h·ℤ^N` restricted to the set of points at
//! distance `< eps0` from the closure of Ω; nodes inside the open set Ω
//! are `Interior`, the remaining ones form the fattened boundary strip Γ.
//! Nodes are stored in lexicographic order of their integer lattice
//! coordinates, so indices are stable across runs and hosts.

use alloc::vec::Vec;
use core::fmt;

use crate::math;

/// Geometric primitives with exact distance functions.
///
/// Membership is open-set membership; points on the topological boundary
/// of Ω are not contained but have distance zero.
#[derive(Clone, Debug, PartialEq)]
pub enum DomainSpec {
    /// Open interval `(a, b)` in one dimension.
    Interval { a: f64, b: f64 },
    /// Open axis-aligned box, `lo[i] < x[i] < hi[i]` in every coordinate.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Open ball `|x - center| < radius`.
    Disc { center: Vec<f64>, radius: f64 },
    /// Open ring `r_in < |x - center| < r_out`.
    Annulus {
        center: Vec<f64>,
        r_in: f64,
        r_out: f64,
    },
}

impl DomainSpec {
    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::Interval { .. } => 1,
            DomainSpec::Box { lo, .. } => lo.len(),
            DomainSpec::Disc { center, .. } => center.len(),
            DomainSpec::Annulus { center, .. } => center.len(),
        }
    }

    /// Open-set membership test.
    pub fn contains(&self, x: &[f64]) -> bool {
        debug_assert_eq!(x.len(), self.dim());
        match self {
            DomainSpec::Interval { a, b } => *a < x[0] && x[0] < *b,
            DomainSpec::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(xi, (l, u))| *l < *xi && *xi < *u),
            DomainSpec::Disc { center, radius } => math::dist2(x, center) < radius * radius,
            DomainSpec::Annulus {
                center,
                r_in,
                r_out,
            } => {
                let d2 = math::dist2(x, center);
                r_in * r_in < d2 && d2 < r_out * r_out
            }
        }
    }

    /// Exact Euclidean distance to the closure of Ω (zero on the closure).
    pub fn distance_to_domain(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        match self {
            DomainSpec::Interval { a, b } => (*a - x[0]).max(x[0] - *b).max(0.0),
            DomainSpec::Box { lo, hi } => {
                let sum: f64 = x
                    .iter()
                    .zip(lo.iter().zip(hi))
                    .map(|(xi, (l, u))| {
                        let d = (*l - *xi).max(*xi - *u).max(0.0);
                        d * d
                    })
                    .sum();
                math::sqrt(sum)
            }
            DomainSpec::Disc { center, radius } => (math::dist(x, center) - radius).max(0.0),
            DomainSpec::Annulus {
                center,
                r_in,
                r_out,
            } => {
                let r = math::dist(x, center);
                (*r_in - r).max(r - *r_out).max(0.0)
            }
        }
    }

    /// Axis-aligned bounding box of the closure of Ω.
    fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            DomainSpec::Interval { a, b } => (alloc::vec![*a], alloc::vec![*b]),
            DomainSpec::Box { lo, hi } => (lo.clone(), hi.clone()),
            DomainSpec::Disc { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            DomainSpec::Annulus { center, r_out, .. } => (
                center.iter().map(|c| c - r_out).collect(),
                center.iter().map(|c| c + r_out).collect(),
            ),
        }
    }

    fn validate(&self) {
        match self {
            DomainSpec::Interval { a, b } => assert!(a < b, "interval requires a < b"),
            DomainSpec::Box { lo, hi } => {
                assert_eq!(lo.len(), hi.len(), "box bounds must share a dimension");
                assert!(!lo.is_empty(), "box dimension must be positive");
                assert!(
                    lo.iter().zip(hi).all(|(l, u)| l < u),
                    "box requires lo < hi in every coordinate"
                );
            }
            DomainSpec::Disc { center, radius } => {
                assert!(!center.is_empty(), "disc dimension must be positive");
                assert!(*radius > 0.0, "disc radius must be positive");
            }
            DomainSpec::Annulus {
                center,
                r_in,
                r_out,
            } => {
                assert!(!center.is_empty(), "annulus dimension must be positive");
                assert!(
                    0.0 < *r_in && r_in < r_out,
                    "annulus requires 0 < r_in < r_out"
                );
            }
        }
    }
}

/// Node classification: Ω or the fattened strip Γ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeClass {
    Interior,
    Boundary,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeometryError {
    /// No lattice point lies inside Ω.
    EmptyInterior,
    /// The strip Γ is thinner than one lattice layer (`eps0 <= h`), or
    /// no lattice point landed in it.
    FatteningTooThin,
    /// Ball query with `eps > eps0`: moves could leave X.
    RadiusExceedsFattening,
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::EmptyInterior => write!(f, "no lattice point lies inside the domain"),
            GeometryError::FatteningTooThin => {
                write!(f, "fattening width eps0 must be at least 2h")
            }
            GeometryError::RadiusExceedsFattening => {
                write!(f, "ball radius eps exceeds the fattening width eps0")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GeometryError {}

/// Lattice discretization of `X = Ω ∪ Γ`.
///
/// Node `i` sits at `h · ik(i)`; nodes are lexicographically ordered by
/// integer coordinates. Immutable after construction.
#[derive(Clone, Debug)]
pub struct Grid {
    domain: DomainSpec,
    dim: usize,
    h: f64,
    eps0: f64,
    /// Integer lattice coordinates, `dim` entries per node, lex-sorted.
    iks: Vec<i64>,
    /// Real coordinates `h * ik`, `dim` entries per node.
    coords: Vec<f64>,
    class: Vec<NodeClass>,
    n_interior: usize,
}

/// Builds the lattice of spacing `h` restricted to
/// `{x : dist(x, Ω) < eps0}` and classifies nodes into Ω and Γ.
pub fn build_grid(domain: &DomainSpec, h: f64, eps0: f64) -> Result<Grid, GeometryError> {
    assert!(h > 0.0 && eps0 > 0.0, "h and eps0 must be positive");
    domain.validate();
    if eps0 <= h {
        return Err(GeometryError::FatteningTooThin);
    }

    let dim = domain.dim();
    let (lo, hi) = domain.bounding_box();
    // One extra layer on each side; the distance test does the filtering.
    let k_lo: Vec<i64> = lo
        .iter()
        .map(|l| math::floor((l - eps0) / h) as i64 - 1)
        .collect();
    let k_hi: Vec<i64> = hi
        .iter()
        .map(|u| math::ceil((u + eps0) / h) as i64 + 1)
        .collect();

    let mut iks = Vec::new();
    let mut coords = Vec::new();
    let mut class = Vec::new();
    let mut n_interior = 0usize;

    let mut k = k_lo.clone();
    let mut x = alloc::vec![0.0; dim];
    'outer: loop {
        for d in 0..dim {
            x[d] = k[d] as f64 * h;
        }
        if domain.contains(&x) {
            iks.extend_from_slice(&k);
            coords.extend_from_slice(&x);
            class.push(NodeClass::Interior);
            n_interior += 1;
        } else if domain.distance_to_domain(&x) < eps0 {
            iks.extend_from_slice(&k);
            coords.extend_from_slice(&x);
            class.push(NodeClass::Boundary);
        }

        // Odometer increment in lexicographic order (last axis fastest).
        let mut d = dim;
        loop {
            if d == 0 {
                break 'outer;
            }
            d -= 1;
            k[d] += 1;
            if k[d] <= k_hi[d] {
                break;
            }
            k[d] = k_lo[d];
        }
    }

    if n_interior == 0 {
        return Err(GeometryError::EmptyInterior);
    }
    if n_interior == class.len() {
        return Err(GeometryError::FatteningTooThin);
    }
    Ok(Grid {
        domain: domain.clone(),
        dim,
        h,
        eps0,
        iks,
        coords,
        class,
        n_interior,
    })
}

impl Grid {
    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn eps0(&self) -> f64 {
        self.eps0
    }

    /// Total node count `|X|`.
    pub fn len(&self) -> usize {
        self.class.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class.is_empty()
    }

    pub fn n_interior(&self) -> usize {
        self.n_interior
    }

    pub fn class(&self, node: usize) -> NodeClass {
        self.class[node]
    }

    pub fn is_interior(&self, node: usize) -> bool {
        self.class[node] == NodeClass::Interior
    }

    pub fn coords(&self, node: usize) -> &[f64] {
        &self.coords[node * self.dim..(node + 1) * self.dim]
    }

    pub fn ik(&self, node: usize) -> &[i64] {
        &self.iks[node * self.dim..(node + 1) * self.dim]
    }

    pub fn interior_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| self.is_interior(i))
    }

    pub fn boundary_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| !self.is_interior(i))
    }

    /// Index of the node with integer coordinates `ik`, if present.
    pub fn node_at(&self, ik: &[i64]) -> Option<usize> {
        debug_assert_eq!(ik.len(), self.dim);
        let n = self.len();
        let (mut lo, mut hi) = (0usize, n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.ik(mid).cmp(ik) {
                core::cmp::Ordering::Less => lo = mid + 1,
                core::cmp::Ordering::Greater => hi = mid,
                core::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    /// Node nearest to an arbitrary point; ties resolve to the lowest index.
    pub fn nearest_node(&self, x: &[f64]) -> usize {
        assert_eq!(x.len(), self.dim);
        let mut best = 0usize;
        let mut best_d2 = f64::INFINITY;
        for i in 0..self.len() {
            let d2 = math::dist2(self.coords(i), x);
            if d2 < best_d2 {
                best = i;
                best_d2 = d2;
            }
        }
        best
    }

    /// All nodes within strict distance `eps` of an interior node,
    /// center included, ascending node index.
    pub fn ball_neighborhood(&self, node: usize, eps: f64) -> Result<Neighborhood, GeometryError> {
        assert!(eps > 0.0, "eps must be positive");
        assert!(
            self.is_interior(node),
            "ball neighborhoods are defined at interior nodes"
        );
        if eps > self.eps0 {
            return Err(GeometryError::RadiusExceedsFattening);
        }
        let offsets = lattice_ball_offsets(self.dim, self.h, eps);
        let mut members = Vec::with_capacity(offsets.len() / self.dim);
        let center = self.ik(node).to_vec();
        let mut target = alloc::vec![0i64; self.dim];
        for off in offsets.chunks_exact(self.dim) {
            for d in 0..self.dim {
                target[d] = center[d] + off[d];
            }
            if let Some(j) = self.node_at(&target) {
                members.push(j);
            }
        }
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(members.binary_search(&node).is_ok());
        Ok(Neighborhood {
            center: node,
            eps,
            members,
        })
    }
}

/// Integer offsets `dk` with `|dk|·h < eps`, in lexicographic order.
pub(crate) fn lattice_ball_offsets(dim: usize, h: f64, eps: f64) -> Vec<i64> {
    let r = math::ceil(eps / h) as i64;
    let eps2 = eps * eps;
    let h2 = h * h;
    let mut out = Vec::new();
    let mut k = alloc::vec![-r; dim];
    'outer: loop {
        let n2: i64 = k.iter().map(|c| c * c).sum();
        if h2 * (n2 as f64) < eps2 {
            out.extend_from_slice(&k);
        }
        let mut d = dim;
        loop {
            if d == 0 {
                break 'outer;
            }
            d -= 1;
            k[d] += 1;
            if k[d] <= r {
                break;
            }
            k[d] = -r;
        }
    }
    out
}

/// `B_ε(x) ∩ X` for one interior node.
#[derive(Clone, Debug, PartialEq)]
pub struct Neighborhood {
    pub center: usize,
    pub eps: f64,
    /// Ascending node indices with `|y − x| < eps`, center included.
    pub members: Vec<usize>,
}

/// Precomputed ε-ball membership for every interior node of a grid,
/// stored in compressed-row form. Boundary rows are empty.
#[derive(Clone, Debug)]
pub struct NeighborhoodTable {
    eps: f64,
    offsets: Vec<usize>,
    members: Vec<u32>,
}

impl NeighborhoodTable {
    pub fn build(grid: &Grid, eps: f64) -> Result<Self, GeometryError> {
        assert!(eps > 0.0, "eps must be positive");
        if eps > grid.eps0() {
            return Err(GeometryError::RadiusExceedsFattening);
        }
        let dim = grid.dim();
        let ball = lattice_ball_offsets(dim, grid.h(), eps);
        let mut offsets = Vec::with_capacity(grid.len() + 1);
        let mut members: Vec<u32> = Vec::new();
        offsets.push(0);
        let mut target = alloc::vec![0i64; dim];
        for node in 0..grid.len() {
            if grid.is_interior(node) {
                let center = grid.ik(node);
                for off in ball.chunks_exact(dim) {
                    for d in 0..dim {
                        target[d] = center[d] + off[d];
                    }
                    if let Some(j) = grid.node_at(&target) {
                        members.push(j as u32);
                    }
                }
            }
            offsets.push(members.len());
        }
        Ok(NeighborhoodTable {
            eps,
            offsets,
            members,
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Ball members of `node`, ascending; empty for boundary nodes.
    pub fn members(&self, node: usize) -> &[u32] {
        &self.members[self.offsets[node]..self.offsets[node + 1]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval01() -> DomainSpec {
        DomainSpec::Interval { a: 0.0, b: 1.0 }
    }

    /// The 1D lattice used across the crate's hand-derived examples:
    /// h = 0.25, eps0 = 0.3.
    pub(crate) fn example_grid_1d() -> Grid {
        build_grid(&interval01(), 0.25, 0.3).unwrap()
    }

    #[test]
    fn interval_classification_matches_direct_distance_scan() {
        let grid = example_grid_1d();
        let xs: Vec<f64> = (0..grid.len()).map(|i| grid.coords(i)[0]).collect();
        assert_eq!(xs, vec![-0.25, 0.0, 0.25, 0.5, 0.75, 1.0, 1.25]);
        let classes: Vec<NodeClass> = (0..grid.len()).map(|i| grid.class(i)).collect();
        use NodeClass::*;
        assert_eq!(
            classes,
            vec![Boundary, Boundary, Interior, Interior, Interior, Boundary, Boundary]
        );
    }

    #[test]
    fn coarse_disc_keeps_only_the_origin_interior() {
        let domain = DomainSpec::Disc {
            center: vec![0.0, 0.0],
            radius: 1.0,
        };
        let grid = build_grid(&domain, 2.5, 5.0).unwrap();
        let interior: Vec<usize> = grid.interior_nodes().collect();
        assert_eq!(interior.len(), 1);
        assert_eq!(grid.coords(interior[0]), &[0.0, 0.0]);
    }

    #[test]
    fn fattening_thinner_than_two_layers_is_rejected() {
        let err = build_grid(&interval01(), 0.25, 0.25).unwrap_err();
        assert_eq!(err, GeometryError::FatteningTooThin);
    }

    #[test]
    fn empty_interior_is_reported() {
        let domain = DomainSpec::Interval { a: 0.1, b: 0.2 };
        let err = build_grid(&domain, 0.5, 1.5).unwrap_err();
        assert_eq!(err, GeometryError::EmptyInterior);
    }

    #[test]
    fn distances_for_primitive_shapes() {
        let disc = DomainSpec::Disc {
            center: vec![0.0, 0.0],
            radius: 1.0,
        };
        assert_eq!(disc.distance_to_domain(&[2.0, 0.0]), 1.0);
        assert_eq!(interval01().distance_to_domain(&[-0.25]), 0.25);
        let annulus = DomainSpec::Annulus {
            center: vec![0.0, 0.0],
            r_in: 1.0,
            r_out: 2.0,
        };
        assert_eq!(annulus.distance_to_domain(&[0.0, 0.0]), 1.0);
        assert_eq!(annulus.distance_to_domain(&[1.5, 0.0]), 0.0);
    }

    #[test]
    fn ball_members_match_brute_force_scan() {
        let grid = example_grid_1d();
        let node = grid.nearest_node(&[0.5]);
        let ball = grid.ball_neighborhood(node, 0.3).unwrap();
        let brute: Vec<usize> = (0..grid.len())
            .filter(|&j| math::dist(grid.coords(j), grid.coords(node)) < 0.3)
            .collect();
        assert_eq!(ball.members, brute);
        let xs: Vec<f64> = ball.members.iter().map(|&j| grid.coords(j)[0]).collect();
        assert_eq!(xs, vec![0.25, 0.5, 0.75]);
    }

    #[test]
    fn ball_near_gamma_includes_boundary_nodes() {
        let grid = example_grid_1d();
        let node = grid.nearest_node(&[0.25]);
        let ball = grid.ball_neighborhood(node, 0.3).unwrap();
        let xs: Vec<f64> = ball.members.iter().map(|&j| grid.coords(j)[0]).collect();
        assert_eq!(xs, vec![0.0, 0.25, 0.5]);
        assert_eq!(grid.class(ball.members[0]), NodeClass::Boundary);
    }

    #[test]
    fn ball_smaller_than_spacing_is_the_center_alone() {
        let grid = example_grid_1d();
        let node = grid.nearest_node(&[0.5]);
        let ball = grid.ball_neighborhood(node, grid.h() / 2.0).unwrap();
        assert_eq!(ball.members, vec![node]);
    }

    #[test]
    fn ball_radius_beyond_fattening_is_rejected() {
        let grid = example_grid_1d();
        let node = grid.nearest_node(&[0.5]);
        let err = grid.ball_neighborhood(node, 0.31).unwrap_err();
        assert_eq!(err, GeometryError::RadiusExceedsFattening);
    }

    #[test]
    fn neighborhood_symmetry_between_interior_nodes() {
        let domain = DomainSpec::Disc {
            center: vec![0.0, 0.0],
            radius: 1.0,
        };
        let grid = build_grid(&domain, 0.1, 0.35).unwrap();
        let eps = 0.3;
        let interior: Vec<usize> = grid.interior_nodes().collect();
        for &i in interior.iter().step_by(7) {
            let mi = grid.ball_neighborhood(i, eps).unwrap().members;
            for &j in &mi {
                if grid.is_interior(j) {
                    let mj = grid.ball_neighborhood(j, eps).unwrap().members;
                    assert!(mj.contains(&i), "symmetry failed for ({i}, {j})");
                }
            }
        }
    }

    #[test]
    fn member_count_grows_as_h_shrinks() {
        let eps = 0.3;
        let coarse = build_grid(&interval01(), 0.1, 0.35).unwrap();
        let fine = build_grid(&interval01(), 0.05, 0.35).unwrap();
        for i in coarse.interior_nodes() {
            let ik = coarse.ik(i)[0];
            let j = fine.node_at(&[2 * ik]).expect("shared lattice point");
            let nc = coarse.ball_neighborhood(i, eps).unwrap().members.len();
            let nf = fine.ball_neighborhood(j, eps).unwrap().members.len();
            assert!(nf >= nc);
            assert!(nc >= 3, "1D ball with h <= eps/2 has at least 3 members");
        }
    }

    #[test]
    fn member_count_lower_bound_2d() {
        let domain = DomainSpec::Disc {
            center: vec![0.0, 0.0],
            radius: 1.0,
        };
        let grid = build_grid(&domain, 0.1, 0.25).unwrap();
        for i in grid.interior_nodes() {
            let n = grid.ball_neighborhood(i, 0.2).unwrap().members.len();
            assert!(n >= 5, "2D ball with h <= eps/2 has at least 5 members");
        }
    }

    #[test]
    fn box_classification_and_balls_in_three_dimensions() {
        let domain = DomainSpec::Box {
            lo: vec![0.0, 0.0, 0.0],
            hi: vec![1.0, 0.75, 0.5],
        };
        let grid = build_grid(&domain, 0.125, 0.3).unwrap();
        assert!(grid.n_interior() > 0);
        for i in 0..grid.len() {
            let x = grid.coords(i);
            match grid.class(i) {
                NodeClass::Interior => assert!(domain.contains(x)),
                NodeClass::Boundary => {
                    assert!(!domain.contains(x));
                    assert!(domain.distance_to_domain(x) < 0.3);
                }
            }
        }
        let center = grid.nearest_node(&[0.5, 0.375, 0.25]);
        let ball = grid.ball_neighborhood(center, 0.28).unwrap();
        let brute: Vec<usize> = (0..grid.len())
            .filter(|&j| math::dist(grid.coords(j), grid.coords(center)) < 0.28)
            .collect();
        assert_eq!(ball.members, brute);
        assert!(ball.members.len() > 10);
    }

    #[test]
    fn box_corner_distance_is_euclidean() {
        let domain = DomainSpec::Box {
            lo: vec![0.0, 0.0],
            hi: vec![1.0, 1.0],
        };
        assert!((domain.distance_to_domain(&[1.3, 1.4]) - 0.5).abs() < 1e-15);
        assert_eq!(domain.distance_to_domain(&[0.5, 0.5]), 0.0);
    }

    #[test]
    fn construction_is_deterministic() {
        let domain = DomainSpec::Annulus {
            center: vec![0.25, -0.5],
            r_in: 0.7,
            r_out: 1.3,
        };
        let a = build_grid(&domain, 0.11, 0.3).unwrap();
        let b = build_grid(&domain, 0.11, 0.3).unwrap();
        assert_eq!(a.iks, b.iks);
        assert_eq!(a.class, b.class);
        assert_eq!(a.coords, b.coords);
    }

    #[test]
    fn gamma_is_reachable_past_the_nearest_boundary_point() {
        // From any interior node, a Γ node exists within one strip width
        // plus a lattice diagonal beyond the closest point of ∂Ω.
        let domain = DomainSpec::Disc {
            center: vec![0.0, 0.0],
            radius: 0.6,
        };
        let grid = build_grid(&domain, 0.05, 0.2).unwrap();
        let slack = grid.eps0() + grid.h() * math::sqrt(grid.dim() as f64);
        for i in grid.interior_nodes() {
            let to_wall = 0.6 - math::norm(grid.coords(i));
            let nearest = grid
                .boundary_nodes()
                .map(|b| math::dist(grid.coords(i), grid.coords(b)))
                .fold(f64::INFINITY, f64::min);
            assert!(
                nearest <= to_wall + slack + 1e-12,
                "interior node {i}: nearest Γ node at {nearest}, wall at {to_wall}"
            );
        }
    }

    #[test]
    fn table_agrees_with_per_node_queries() {
        let domain = DomainSpec::Disc {
            center: vec![0.0, 0.0],
            radius: 0.8,
        };
        let grid = build_grid(&domain, 0.07, 0.25).unwrap();
        let table = NeighborhoodTable::build(&grid, 0.21).unwrap();
        for node in 0..grid.len() {
            if grid.is_interior(node) {
                let ball = grid.ball_neighborhood(node, 0.21).unwrap();
                let row: Vec<usize> = table.members(node).iter().map(|&j| j as usize).collect();
                assert_eq!(row, ball.members);
            } else {
                assert!(table.members(node).is_empty());
            }
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn classification_matches_definition(
                a in -1.0f64..0.0,
                len in 0.5f64..2.0,
                h in 0.02f64..0.2,
            ) {
                let domain = DomainSpec::Interval { a, b: a + len };
                let eps0 = 2.5 * h;
                if let Ok(grid) = build_grid(&domain, h, eps0) {
                    for i in 0..grid.len() {
                        let x = grid.coords(i);
                        match grid.class(i) {
                            NodeClass::Interior => prop_assert!(domain.contains(x)),
                            NodeClass::Boundary => {
                                prop_assert!(!domain.contains(x));
                                prop_assert!(domain.distance_to_domain(x) < eps0);
                            }
                        }
                    }
                }
            }

            #[test]
            fn members_scan_agrees_with_distance(
                h in 0.05f64..0.2,
                eps_frac in 0.3f64..0.99,
            ) {
                let domain = DomainSpec::Interval { a: 0.0, b: 1.0 };
                let eps0 = 0.45;
                let eps = eps0 * eps_frac;
                let grid = build_grid(&domain, h, eps0).unwrap();
                for i in grid.interior_nodes() {
                    let ball = grid.ball_neighborhood(i, eps).unwrap();
                    let brute: Vec<usize> = (0..grid.len())
                        .filter(|&j| math::dist(grid.coords(j), grid.coords(i)) < eps)
                        .collect();
                    prop_assert_eq!(ball.members, brute);
                }
            }
        }
    }
}
