//! Instance sampling and graph construction.
//!
//! A model instance places `n` nodes uniformly at random in the unit square
//! and assigns each an independent uniform `K`-subset of the key pool. Edges
//! are decided by the geometric predicate (distance within the radius, under
//! either the square or torus metric), the key predicate (rings intersect),
//! or their conjunction.
//!
//! Sampling is reproducible and order-independent: node `i` draws from its
//! own stream of a counter-mode generator keyed by `(master seed, purpose,
//! i)`, so changing `n` or sampling order never perturbs other nodes.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::combinatorics::KeyPoolParams;

#[derive(Debug, Error, PartialEq)]
pub enum Error {
    #[error("radius must be positive and at most sqrt(2), got {0}")]
    InvalidRadius(f64),
    #[error("model requires at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("key pool size {0} exceeds the u32 key range")]
    PoolTooLarge(u64),
    #[error("expected {expected} key rings, got {got}")]
    RingCountMismatch { expected: usize, got: usize },
    #[error("key ring {node} is not a sorted {ring}-subset of the pool")]
    MalformedRing { node: usize, ring: u64 },
}

/// Metric on the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Plain Euclidean distance; border effects shrink disk areas.
    Square,
    /// Wrap-around (minimum-image) distance; disk areas are exact.
    Torus,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::Square => "square",
            Boundary::Torus => "torus",
        })
    }
}

impl FromStr for Boundary {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "square" => Ok(Boundary::Square),
            "torus" => Ok(Boundary::Torus),
            other => Err(format!("unknown boundary {other:?}, expected square or torus")),
        }
    }
}

/// Which predicate decides adjacency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeRule {
    GeometricOnly,
    KeyOnly,
    Intersection,
}

impl fmt::Display for EdgeRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeRule::GeometricOnly => "geometric_only",
            EdgeRule::KeyOnly => "key_only",
            EdgeRule::Intersection => "intersection",
        })
    }
}

impl FromStr for EdgeRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "geometric_only" => Ok(EdgeRule::GeometricOnly),
            "key_only" => Ok(EdgeRule::KeyOnly),
            "intersection" => Ok(EdgeRule::Intersection),
            other => Err(format!(
                "unknown edge rule {other:?}, expected geometric_only, key_only, or intersection"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

/// Model parameters for one instance family.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ModelParams {
    pub n: usize,
    pub pool: KeyPoolParams,
    pub radius: f64,
    pub boundary: Boundary,
}

impl ModelParams {
    pub fn new(n: usize, pool: KeyPoolParams, radius: f64, boundary: Boundary) -> Result<Self, Error> {
        if n < 2 {
            return Err(Error::TooFewNodes(n));
        }
        if !(radius > 0.0 && radius <= std::f64::consts::SQRT_2) {
            return Err(Error::InvalidRadius(radius));
        }
        Ok(Self { n, pool, radius, boundary })
    }

    /// Disk area `a = pi r^2`; exact neighborhood area on the torus for
    /// `radius <= 1/2`, a border-free approximation on the square.
    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.radius
    }
}

/// Squared distance under the given metric.
pub fn distance_squared(p: Point, q: Point, boundary: Boundary) -> f64 {
    let (dx, dy) = match boundary {
        Boundary::Square => (p.x - q.x, p.y - q.y),
        Boundary::Torus => {
            let dx = (p.x - q.x).abs();
            let dy = (p.y - q.y).abs();
            (dx.min(1.0 - dx), dy.min(1.0 - dy))
        }
    };
    dx * dx + dy * dy
}

pub fn distance(p: Point, q: Point, boundary: Boundary) -> f64 {
    distance_squared(p, q, boundary).sqrt()
}

// Purpose tags keep the position and ring streams of one master seed
// disjoint; the node index occupies the low bits.
const POSITION_STREAM: u64 = 1 << 56;
const RING_STREAM: u64 = 2 << 56;

fn substream(base: &ChaCha8Rng, tag: u64, index: usize) -> ChaCha8Rng {
    let mut rng = base.clone();
    rng.set_stream(tag | index as u64);
    rng
}

/// `n` positions drawn iid uniform on the unit square, bit-reproducible for
/// a given seed. Node `i`'s position depends only on `(seed, i)`.
pub fn sample_positions(n: usize, seed: u64) -> Vec<Point> {
    let base = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let mut rng = substream(&base, POSITION_STREAM, i);
            Point { x: rng.gen(), y: rng.gen() }
        })
        .collect()
}

/// One uniform `ring`-subset of `0..pool` via partial Fisher-Yates over an
/// implicit identity array, using O(ring) memory, returned sorted.
fn sample_ring(rng: &mut ChaCha8Rng, pool: u64, ring: u64) -> Vec<u32> {
    let mut displaced: HashMap<u64, u64> = HashMap::with_capacity(2 * ring as usize);
    let mut out = Vec::with_capacity(ring as usize);
    for j in 0..ring {
        let t = rng.gen_range(j..pool);
        let chosen = displaced.get(&t).copied().unwrap_or(t);
        let at_j = displaced.get(&j).copied().unwrap_or(j);
        displaced.insert(t, at_j);
        out.push(chosen as u32);
    }
    out.sort_unstable();
    out
}

/// `n` independent uniform key rings, each sorted. Node `i`'s ring depends
/// only on `(seed, i, pool)`.
pub fn sample_key_rings(n: usize, pool: &KeyPoolParams, seed: u64) -> Result<Vec<Vec<u32>>, Error> {
    if pool.pool > u32::MAX as u64 {
        return Err(Error::PoolTooLarge(pool.pool));
    }
    let base = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|i| {
            let mut rng = substream(&base, RING_STREAM, i);
            sample_ring(&mut rng, pool.pool, pool.ring)
        })
        .collect())
}

/// Whether two sorted key rings intersect (two-pointer merge).
pub fn shares_key(a: &[u32], b: &[u32]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// An instance with its adjacency structure (CSR, neighbor lists sorted).
#[derive(Debug, Clone, PartialEq)]
pub struct IntersectionGraph {
    pub positions: Vec<Point>,
    pub key_rings: Vec<Vec<u32>>,
    pub radius: f64,
    pub boundary: Boundary,
    pub edge_rule: EdgeRule,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl IntersectionGraph {
    pub fn n(&self) -> usize {
        self.positions.len()
    }

    /// Number of undirected edges.
    pub fn m(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.neighbors[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.neighbors(i).binary_search(&(j as u32)).is_ok()
    }

    /// Undirected edges as `(i, j)` with `i < j`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n()).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .filter(move |&&j| j as usize > i)
                .map(move |&j| (i as u32, j))
        })
    }

    fn from_edge_pairs(
        positions: Vec<Point>,
        key_rings: Vec<Vec<u32>>,
        radius: f64,
        boundary: Boundary,
        edge_rule: EdgeRule,
        edges: &[(u32, u32)],
    ) -> Self {
        let n = positions.len();
        let mut offsets = vec![0usize; n + 1];
        for &(i, j) in edges {
            offsets[i as usize + 1] += 1;
            offsets[j as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut neighbors = vec![0u32; edges.len() * 2];
        for &(i, j) in edges {
            neighbors[cursor[i as usize]] = j;
            cursor[i as usize] += 1;
            neighbors[cursor[j as usize]] = i;
            cursor[j as usize] += 1;
        }
        for i in 0..n {
            neighbors[offsets[i]..offsets[i + 1]].sort_unstable();
        }
        IntersectionGraph {
            positions,
            key_rings,
            radius,
            boundary,
            edge_rule,
            offsets,
            neighbors,
        }
    }
}

fn validate_inputs(
    positions: &[Point],
    key_rings: &[Vec<u32>],
    pool: Option<&KeyPoolParams>,
    radius: f64,
) -> Result<(), Error> {
    if !(radius > 0.0 && radius <= std::f64::consts::SQRT_2) {
        return Err(Error::InvalidRadius(radius));
    }
    if key_rings.len() != positions.len() {
        return Err(Error::RingCountMismatch {
            expected: positions.len(),
            got: key_rings.len(),
        });
    }
    if let Some(pool) = pool {
        for (node, ring) in key_rings.iter().enumerate() {
            let sorted = ring.windows(2).all(|w| w[0] < w[1]);
            let in_range = ring.last().map_or(true, |&k| (k as u64) < pool.pool);
            if ring.len() != pool.ring as usize || !sorted || !in_range {
                return Err(Error::MalformedRing { node, ring: pool.ring });
            }
        }
    }
    Ok(())
}

fn edge_test(
    positions: &[Point],
    key_rings: &[Vec<u32>],
    r2: f64,
    boundary: Boundary,
    rule: EdgeRule,
    i: usize,
    j: usize,
) -> bool {
    let geo = || distance_squared(positions[i], positions[j], boundary) <= r2;
    let key = || shares_key(&key_rings[i], &key_rings[j]);
    match rule {
        EdgeRule::GeometricOnly => geo(),
        EdgeRule::KeyOnly => key(),
        EdgeRule::Intersection => geo() && key(),
    }
}

/// Validate externally supplied instance data against its declared pool:
/// ring sizes, sortedness, key range, and radius domain.
pub fn validate_instance(
    positions: &[Point],
    key_rings: &[Vec<u32>],
    pool: &KeyPoolParams,
    radius: f64,
) -> Result<(), Error> {
    validate_inputs(positions, key_rings, Some(pool), radius)
}

/// Whether nodes `i` and `j` are adjacent under the rule, given raw instance
/// data. The same predicate the graph builders use, exposed for callers that
/// probe single pairs without materializing adjacency.
pub fn pair_adjacent(
    positions: &[Point],
    key_rings: &[Vec<u32>],
    radius: f64,
    boundary: Boundary,
    rule: EdgeRule,
    i: usize,
    j: usize,
) -> bool {
    edge_test(positions, key_rings, radius * radius, boundary, rule, i, j)
}

/// Build the graph with a uniform grid: cell side is at least the radius, so
/// candidate pairs only need the 3x3 cell neighborhood. Equivalent to the
/// all-pairs construction for every boundary mode and edge rule.
pub fn build_graph(
    positions: Vec<Point>,
    key_rings: Vec<Vec<u32>>,
    radius: f64,
    boundary: Boundary,
    edge_rule: EdgeRule,
) -> Result<IntersectionGraph, Error> {
    validate_inputs(&positions, &key_rings, None, radius)?;
    let n = positions.len();
    // Cell side must be at least the radius (so the 3x3 neighborhood covers
    // every candidate pair), but more than ~n cells only waste memory on
    // sparse instances: cap the grid near sqrt(n) cells per side.
    let cell_cap = ((n as f64).sqrt().ceil() as usize).saturating_mul(4).max(1);
    let g = ((1.0 / radius).floor().max(1.0) as usize).min(cell_cap);
    // Key-only adjacency ignores geometry; tiny torus grids cannot represent
    // distinct wrapped neighborhoods. Both cases fall back to all pairs.
    let use_grid = edge_rule != EdgeRule::KeyOnly && !(boundary == Boundary::Torus && g < 3);
    let r2 = radius * radius;
    let mut edges = Vec::new();
    if !use_grid {
        for i in 0..n {
            for j in (i + 1)..n {
                if edge_test(&positions, &key_rings, r2, boundary, edge_rule, i, j) {
                    edges.push((i as u32, j as u32));
                }
            }
        }
        return Ok(IntersectionGraph::from_edge_pairs(
            positions, key_rings, radius, boundary, edge_rule, &edges,
        ));
    }

    let cell_of = |p: Point| -> (usize, usize) {
        let cx = ((p.x * g as f64) as usize).min(g - 1);
        let cy = ((p.y * g as f64) as usize).min(g - 1);
        (cx, cy)
    };
    let mut cells: Vec<Vec<u32>> = vec![Vec::new(); g * g];
    for (i, &p) in positions.iter().enumerate() {
        let (cx, cy) = cell_of(p);
        cells[cy * g + cx].push(i as u32);
    }
    // Half neighborhood: pairing each cell with itself and four forward
    // neighbors covers every adjacent cell pair exactly once.
    const FORWARD: [(isize, isize); 4] = [(1, 0), (-1, 1), (0, 1), (1, 1)];
    for cy in 0..g {
        for cx in 0..g {
            let home = &cells[cy * g + cx];
            for (a_idx, &a) in home.iter().enumerate() {
                for &b in &home[a_idx + 1..] {
                    let (i, j) = (a.min(b) as usize, a.max(b) as usize);
                    if edge_test(&positions, &key_rings, r2, boundary, edge_rule, i, j) {
                        edges.push((i as u32, j as u32));
                    }
                }
            }
            for (dx, dy) in FORWARD {
                let (nx, ny) = match boundary {
                    Boundary::Torus => (
                        (cx as isize + dx).rem_euclid(g as isize) as usize,
                        (cy as isize + dy).rem_euclid(g as isize) as usize,
                    ),
                    Boundary::Square => {
                        let nx = cx as isize + dx;
                        let ny = cy as isize + dy;
                        if nx < 0 || ny < 0 || nx >= g as isize || ny >= g as isize {
                            continue;
                        }
                        (nx as usize, ny as usize)
                    }
                };
                for &a in home {
                    for &b in &cells[ny * g + nx] {
                        let (i, j) = (a.min(b) as usize, a.max(b) as usize);
                        if edge_test(&positions, &key_rings, r2, boundary, edge_rule, i, j) {
                            edges.push((i as u32, j as u32));
                        }
                    }
                }
            }
        }
    }
    Ok(IntersectionGraph::from_edge_pairs(
        positions, key_rings, radius, boundary, edge_rule, &edges,
    ))
}

/// Reference construction: test every pair. Used as the correctness oracle
/// for [`build_graph`] and by the self-test suite.
pub fn build_graph_all_pairs(
    positions: Vec<Point>,
    key_rings: Vec<Vec<u32>>,
    radius: f64,
    boundary: Boundary,
    edge_rule: EdgeRule,
) -> Result<IntersectionGraph, Error> {
    validate_inputs(&positions, &key_rings, None, radius)?;
    let n = positions.len();
    let r2 = radius * radius;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if edge_test(&positions, &key_rings, r2, boundary, edge_rule, i, j) {
                edges.push((i as u32, j as u32));
            }
        }
    }
    Ok(IntersectionGraph::from_edge_pairs(
        positions, key_rings, radius, boundary, edge_rule, &edges,
    ))
}

/// Sample a full instance and build its graph.
pub fn sample_graph(
    params: &ModelParams,
    edge_rule: EdgeRule,
    seed: u64,
) -> Result<IntersectionGraph, Error> {
    let positions = sample_positions(params.n, seed);
    let key_rings = sample_key_rings(params.n, &params.pool, seed)?;
    validate_inputs(&positions, &key_rings, Some(&params.pool), params.radius)?;
    build_graph(positions, key_rings, params.radius, params.boundary, edge_rule)
}
