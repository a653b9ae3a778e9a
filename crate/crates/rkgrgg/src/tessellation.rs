//! Dual offset tessellations of the unit square.
//!
//! The square is cut into `g x g` cells of side `s = 1/g` twice: once
//! aligned with the origin and once shifted by half a cell in both axes.
//! With the transmission radius set to `sqrt(2) * s`, any two nodes in the
//! same cell are automatically within range, so each cell's induced
//! subgraph is decided by key rings alone. Per-cell denseness plus per-cell
//! connectivity on both tessellations is the local certificate used to
//! conclude global connectivity.

use thiserror::Error;

use crate::connectivity::{self, UnionFind};
use crate::graph::{Boundary, EdgeRule, IntersectionGraph, Point};

#[derive(Debug, Error, PartialEq)]
pub enum Error {
    #[error("tessellation radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("denseness tolerance delta must lie in (0,1), got {0}")]
    DeltaOutOfRange(f64),
    #[error("cell-area ratio theta must lie in (0,1), got {0}")]
    ThetaOutOfRange(f64),
    #[error(
        "radius {radius} needs {cells_per_side} cells per side, beyond the supported {cap}"
    )]
    GridTooFine { radius: f64, cells_per_side: u64, cap: u32 },
}

/// Most cells per axis a tessellation may use; beyond this the per-cell
/// statistics tables would dwarf any realistic node count.
pub const CELLS_PER_SIDE_CAP: u32 = 4096;

/// One tessellation: `cells_per_side` cells per axis of side
/// `1/cells_per_side`, shifted by `offset`. Indexing multiplies by
/// `cells_per_side`, so the grid covers the unit square exactly by
/// construction; `cell_side` is the rounded representation of the side.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TessellationSpec {
    pub cells_per_side: u32,
    pub cell_side: f64,
    pub offset: (f64, f64),
}

impl TessellationSpec {
    fn aligned(g: u32) -> Self {
        Self {
            cells_per_side: g,
            cell_side: 1.0 / g as f64,
            offset: (0.0, 0.0),
        }
    }

    fn half_offset(g: u32) -> Self {
        let s = 1.0 / g as f64;
        Self {
            cells_per_side: g,
            cell_side: s,
            offset: (s / 2.0, s / 2.0),
        }
    }

    pub fn is_offset(&self) -> bool {
        self.offset != (0.0, 0.0)
    }

    /// Cells per axis under the given boundary mode. An offset tessellation
    /// on the square gains one extra row and column of half-size boundary
    /// strips; on the torus it wraps and stays at `cells_per_side`.
    pub fn cells_per_axis(&self, boundary: Boundary) -> u32 {
        if self.is_offset() && boundary == Boundary::Square {
            self.cells_per_side + 1
        } else {
            self.cells_per_side
        }
    }

    pub fn cell_count(&self, boundary: Boundary) -> usize {
        let axis = self.cells_per_axis(boundary) as usize;
        axis * axis
    }
}

/// The pair of tessellations tied to a transmission radius, along with the
/// radius the integer cell count actually certifies.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DualTessellations {
    pub first: TessellationSpec,
    pub second: TessellationSpec,
    pub requested_radius: f64,
    /// `sqrt(2) * cell_side`: the distance that same-cell membership
    /// guarantees. Callers wanting key-ring-decided cells must build the
    /// graph with at least this radius.
    pub effective_radius: f64,
}

/// Choose `cells_per_side = round(sqrt(2)/radius)` (at least 1) and return
/// both tessellations. A radius of `sqrt(2)` or more degenerates to a
/// single cell.
pub fn make_dual_tessellations(radius: f64) -> Result<DualTessellations, Error> {
    make_dual_tessellations_with_theta(radius, 0.5)
}

/// Generalized cell sizing `cell_area = theta * radius^2` (so `cell_side =
/// sqrt(theta) * radius`, rounded to an integer cell count). The default
/// `theta = 1/2` makes the cell diagonal equal the radius; smaller values
/// keep the same-cell reachability guarantee with slack.
pub fn make_dual_tessellations_with_theta(
    radius: f64,
    theta: f64,
) -> Result<DualTessellations, Error> {
    if !(radius > 0.0) {
        return Err(Error::InvalidRadius(radius));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::ThetaOutOfRange(theta));
    }
    let g_real = (1.0 / (theta.sqrt() * radius)).round().max(1.0);
    if g_real > CELLS_PER_SIDE_CAP as f64 {
        return Err(Error::GridTooFine {
            radius,
            cells_per_side: g_real as u64,
            cap: CELLS_PER_SIDE_CAP,
        });
    }
    let g = g_real as u32;
    let first = TessellationSpec::aligned(g);
    Ok(DualTessellations {
        first,
        second: TessellationSpec::half_offset(g),
        requested_radius: radius,
        effective_radius: std::f64::consts::SQRT_2 * first.cell_side,
    })
}

fn axis_cell(coord: f64, offset: f64, g: u32, boundary: Boundary, offset_mode: bool) -> u32 {
    match boundary {
        Boundary::Torus => {
            let u = (coord - offset).rem_euclid(1.0);
            ((u * g as f64) as u32).min(g - 1)
        }
        Boundary::Square => {
            if !offset_mode {
                return ((coord * g as f64) as u32).min(g - 1);
            }
            if coord < offset {
                0
            } else {
                (1 + ((coord - offset) * g as f64) as u32).min(g)
            }
        }
    }
}

/// Row-major cell index of a point. Offset tessellations wrap modulo 1 on
/// the torus; on the square the strips outside the shifted grid become
/// extra half-size boundary cells.
pub fn cell_of(p: Point, spec: &TessellationSpec, boundary: Boundary) -> usize {
    let g = spec.cells_per_side;
    let offset_mode = spec.is_offset();
    let col = axis_cell(p.x, spec.offset.0, g, boundary, offset_mode);
    let row = axis_cell(p.y, spec.offset.1, g, boundary, offset_mode);
    row as usize * spec.cells_per_axis(boundary) as usize + col as usize
}

/// Whether a cell index denotes a full-size cell (never a square-offset
/// boundary strip).
fn is_full_cell(index: usize, spec: &TessellationSpec, boundary: Boundary) -> bool {
    if !(spec.is_offset() && boundary == Boundary::Square) {
        return true;
    }
    let axis = spec.cells_per_axis(boundary) as usize;
    let (row, col) = (index / axis, index % axis);
    row >= 1 && row < axis - 1 && col >= 1 && col < axis - 1
}

/// Per-cell occupancy and induced-subgraph connectivity for one
/// tessellation of one instance.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CellStats {
    pub spec: TessellationSpec,
    pub boundary: Boundary,
    pub delta: f64,
    /// Expected occupancy `n * cell_side^2` of a full cell.
    pub expected_count: f64,
    /// Row-major node counts, one per cell.
    pub counts: Vec<u32>,
    /// Not-dense flags: `|count - n s^2| >= delta * n s^2`. Always false
    /// for square-offset boundary strips, which the denseness union bound
    /// excludes.
    pub not_dense: Vec<bool>,
    /// Whether each cell's induced subgraph is connected. Empty cells are
    /// vacuously connected here; emptiness is tracked separately.
    pub subgraph_connected: Vec<bool>,
    /// False exactly for square-offset boundary strips.
    pub full_cell: Vec<bool>,
    /// True when same-cell pairs are guaranteed within the graph's radius,
    /// i.e. the induced edges are decided by key rings alone (always true
    /// for key-only graphs).
    pub e2_decides_within_cells: bool,
}

impl CellStats {
    pub fn empty_cells(&self) -> usize {
        self.counts.iter().filter(|&&c| c == 0).count()
    }

    pub fn not_dense_cells(&self) -> usize {
        self.not_dense.iter().filter(|&&w| w).count()
    }

    pub fn full_cells(&self) -> usize {
        self.full_cell.iter().filter(|&&f| f).count()
    }

    /// `T_i`: no cell is empty and every cell's induced subgraph is
    /// connected.
    pub fn all_connected_and_nonempty(&self) -> bool {
        self.counts.iter().all(|&c| c > 0) && self.subgraph_connected.iter().all(|&c| c)
    }
}

/// Row-major per-cell node counts for raw positions. The denseness events
/// depend on positions alone, so samplers can tally cells without building
/// a graph.
pub fn cell_counts(positions: &[Point], spec: &TessellationSpec, boundary: Boundary) -> Vec<u32> {
    let mut counts = vec![0u32; spec.cell_count(boundary)];
    for &p in positions {
        counts[cell_of(p, spec, boundary)] += 1;
    }
    counts
}

/// Occupancy, denseness, and per-cell connectivity of `graph` under `spec`.
pub fn cell_stats(
    graph: &IntersectionGraph,
    spec: &TessellationSpec,
    delta: f64,
) -> Result<CellStats, Error> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    let boundary = graph.boundary;
    let n = graph.n();
    let cell_count = spec.cell_count(boundary);
    let cell_ids: Vec<usize> = graph
        .positions
        .iter()
        .map(|&p| cell_of(p, spec, boundary))
        .collect();
    let mut counts = vec![0u32; cell_count];
    for &c in &cell_ids {
        counts[c] += 1;
    }
    let expected_count = n as f64 * spec.cell_side * spec.cell_side;
    let threshold = delta * expected_count;
    let full_cell: Vec<bool> = (0..cell_count)
        .map(|i| is_full_cell(i, spec, boundary))
        .collect();
    let not_dense: Vec<bool> = counts
        .iter()
        .zip(&full_cell)
        .map(|(&c, &full)| full && (c as f64 - expected_count).abs() >= threshold)
        .collect();

    let mut uf = UnionFind::new(n);
    for (i, j) in graph.edges() {
        if cell_ids[i as usize] == cell_ids[j as usize] {
            uf.union(i, j);
        }
    }
    // A cell is connected when all its nodes share one union-find root.
    let mut root_of_cell: Vec<u32> = vec![u32::MAX; cell_count];
    let mut subgraph_connected = vec![true; cell_count];
    for i in 0..n {
        let c = cell_ids[i];
        let r = uf.find(i as u32);
        if root_of_cell[c] == u32::MAX {
            root_of_cell[c] = r;
        } else if root_of_cell[c] != r {
            subgraph_connected[c] = false;
        }
    }

    let e2_decides_within_cells = match graph.edge_rule {
        EdgeRule::KeyOnly => true,
        EdgeRule::GeometricOnly | EdgeRule::Intersection => {
            graph.radius + 1e-12 >= std::f64::consts::SQRT_2 * spec.cell_side
        }
    };

    Ok(CellStats {
        spec: *spec,
        boundary,
        delta,
        expected_count,
        counts,
        not_dense,
        subgraph_connected,
        full_cell,
        e2_decides_within_cells,
    })
}

/// Joint evaluation of both tessellations plus the global connectivity
/// check they are meant to certify.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DualConnectivity {
    pub first: CellStats,
    pub second: CellStats,
    /// `T_1`, `T_2`: every cell nonempty and internally connected.
    pub t1: bool,
    pub t2: bool,
    /// No not-dense full cell in either tessellation.
    pub all_dense: bool,
    pub graph_connected: bool,
}

impl DualConnectivity {
    /// The certificate direction: `T_1 and T_2` must only ever hold on
    /// connected graphs. Checked against the connectivity module on every
    /// instance, never assumed.
    pub fn implication_holds(&self) -> bool {
        !(self.t1 && self.t2) || self.graph_connected
    }
}

pub fn dual_tessellation_connectivity(
    graph: &IntersectionGraph,
    duals: &DualTessellations,
    delta: f64,
) -> Result<DualConnectivity, Error> {
    let first = cell_stats(graph, &duals.first, delta)?;
    let second = cell_stats(graph, &duals.second, delta)?;
    let t1 = first.all_connected_and_nonempty();
    let t2 = second.all_connected_and_nonempty();
    let all_dense = first.not_dense_cells() == 0 && second.not_dense_cells() == 0;
    let graph_connected = connectivity::analyze(graph).is_connected;
    Ok(DualConnectivity {
        first,
        second,
        t1,
        t2,
        all_dense,
        graph_connected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::KeyPoolParams;
    use crate::graph::{build_graph_all_pairs, distance, sample_key_rings, sample_positions};

    #[test]
    fn dual_tessellations_tie_cells_to_radius() {
        let d = make_dual_tessellations(std::f64::consts::SQRT_2 / 10.0).unwrap();
        assert_eq!(d.first.cells_per_side, 10);
        assert_eq!(d.second.cells_per_side, 10);
        assert!((d.effective_radius - d.requested_radius).abs() < 1e-12);
        assert_eq!(d.first.offset, (0.0, 0.0));
        assert_eq!(d.second.offset, (0.05, 0.05));
    }

    #[test]
    fn oversized_radius_degenerates_to_single_cell() {
        let d = make_dual_tessellations(std::f64::consts::SQRT_2).unwrap();
        assert_eq!(d.first.cells_per_side, 1);
        let d = make_dual_tessellations(5.0).unwrap();
        assert_eq!(d.first.cells_per_side, 1);
        assert!(make_dual_tessellations(0.0).is_err());
    }

    #[test]
    fn torus_offset_cells_wrap() {
        let spec = TessellationSpec::half_offset(4);
        // Points on either side of the wrap seam share the wrapped cell.
        let a = Point { x: 0.99, y: 0.5 };
        let b = Point { x: 0.01, y: 0.5 };
        assert_eq!(
            cell_of(a, &spec, Boundary::Torus) % 4,
            cell_of(b, &spec, Boundary::Torus) % 4
        );
        assert_eq!(spec.cell_count(Boundary::Torus), 16);
    }

    #[test]
    fn square_offset_grows_boundary_strips() {
        let spec = TessellationSpec::half_offset(4);
        assert_eq!(spec.cell_count(Boundary::Square), 25);
        // x below the first offset boundary lands in strip column 0.
        let p = Point { x: 0.05, y: 0.5 };
        let idx = cell_of(p, &spec, Boundary::Square);
        assert_eq!(idx % 5, 0);
        assert!(!is_full_cell(idx, &spec, Boundary::Square));
        // Interior point lands in a full cell.
        let q = Point { x: 0.5, y: 0.5 };
        let qi = cell_of(q, &spec, Boundary::Square);
        assert!(is_full_cell(qi, &spec, Boundary::Square));
        // Exactly (g-1)^2 full cells remain.
        let full = (0..25).filter(|&i| is_full_cell(i, &spec, Boundary::Square)).count();
        assert_eq!(full, 9);
    }

    #[test]
    fn same_cell_pairs_lie_within_effective_radius() {
        let duals = make_dual_tessellations(0.31).unwrap();
        let positions = sample_positions(400, 17);
        for boundary in [Boundary::Square, Boundary::Torus] {
            for spec in [duals.first, duals.second] {
                for (i, &p) in positions.iter().enumerate() {
                    for &q in &positions[i + 1..] {
                        if cell_of(p, &spec, boundary) == cell_of(q, &spec, boundary) {
                            assert!(
                                distance(p, q, boundary) <= duals.effective_radius + 1e-12,
                                "{boundary}: same-cell pair at distance {}",
                                distance(p, q, boundary)
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn counts_cover_all_nodes_and_denseness_flags_fire() {
        let pool = KeyPoolParams::new(8, 2).unwrap();
        let positions = sample_positions(200, 3);
        let rings = sample_key_rings(200, &pool, 4).unwrap();
        let duals = make_dual_tessellations(0.5).unwrap();
        let graph = build_graph_all_pairs(
            positions,
            rings,
            duals.effective_radius,
            Boundary::Torus,
            EdgeRule::Intersection,
        )
        .unwrap();
        let stats = cell_stats(&graph, &duals.first, 0.5).unwrap();
        assert_eq!(stats.counts.iter().sum::<u32>() as usize, 200);
        assert!(stats.e2_decides_within_cells);
        // Tight delta must flag essentially every cell as not dense.
        let tight = cell_stats(&graph, &duals.first, 1e-9).unwrap();
        assert!(tight.not_dense_cells() > 0);
        assert!(cell_stats(&graph, &duals.first, 0.0).is_err());
        assert!(cell_stats(&graph, &duals.first, 1.0).is_err());
    }

    #[test]
    fn per_cell_connectivity_follows_key_subgraph() {
        // Two nodes in one cell with disjoint rings, two in another cell
        // with a shared key.
        let positions = vec![
            Point { x: 0.1, y: 0.1 },
            Point { x: 0.2, y: 0.2 },
            Point { x: 0.7, y: 0.7 },
            Point { x: 0.8, y: 0.8 },
        ];
        let rings = vec![vec![0], vec![1], vec![2], vec![2]];
        let duals = make_dual_tessellations(std::f64::consts::SQRT_2 / 2.0).unwrap();
        let graph = build_graph_all_pairs(
            positions,
            rings,
            duals.effective_radius,
            Boundary::Square,
            EdgeRule::Intersection,
        )
        .unwrap();
        let stats = cell_stats(&graph, &duals.first, 0.9).unwrap();
        assert_eq!(stats.counts, vec![2, 0, 0, 2]);
        assert_eq!(stats.subgraph_connected, vec![false, true, true, true]);
        assert!(!stats.all_connected_and_nonempty());
    }

    #[test]
    fn dual_connectivity_certificate_checks_against_graph() {
        let pool = KeyPoolParams::new(4, 2).unwrap();
        let positions = sample_positions(300, 9);
        let rings = sample_key_rings(300, &pool, 10).unwrap();
        let duals = make_dual_tessellations(0.45).unwrap();
        let graph = build_graph_all_pairs(
            positions,
            rings,
            duals.effective_radius,
            Boundary::Torus,
            EdgeRule::Intersection,
        )
        .unwrap();
        let dual = dual_tessellation_connectivity(&graph, &duals, 0.5).unwrap();
        assert!(dual.implication_holds());
        // With beta = 1 - C(2,2)/C(4,2) = 5/6 and ~75 nodes per cell, both
        // certificates should hold and the graph must be connected.
        assert!(dual.t1 && dual.t2, "dense instance should certify");
        assert!(dual.graph_connected);
    }
}
