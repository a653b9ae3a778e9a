//! Text formats: edge lists, instance dumps, report JSON, and result CSV.
//!
//! Every emitter here is byte-deterministic for identical inputs, so golden
//! files and worker-count invariance checks can compare output verbatim.
//! Floating-point fields use Rust's shortest round-trip formatting.
//!
//! Formats:
//! - edge list: header `n m radius boundary rule`, then `m` lines `i j`
//!   with `0 <= i < j < n`, ascending, no duplicates;
//! - instance dump: one JSON document with parameters, seed, positions,
//!   and key rings (unknown fields rejected);
//! - connectivity report and cell stats: JSON mirrors of the library types,
//!   plus a per-cell CSV;
//! - sweep results: one CSV row per point with a frozen column set.

use std::fmt::Write as _;

use thiserror::Error;

use crate::combinatorics::{self, KeyPoolParams};
use crate::connectivity::ConnectivityReport;
use crate::graph::{self, Boundary, EdgeRule, IntersectionGraph, Point};
use crate::harness::SweepResult;
use crate::tessellation::CellStats;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("instance dump: {0}")]
    Inconsistent(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] graph::Error),
    #[error(transparent)]
    Combinatorics(#[from] combinatorics::Error),
}

fn malformed(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Malformed {
        line,
        message: message.into(),
    }
}

/// Render a graph as an edge list: `n m radius boundary rule` then one
/// `i j` line per edge, `i < j`, ascending.
pub fn edge_list_string(graph: &IntersectionGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} {} {} {} {}",
        graph.n(),
        graph.m(),
        graph.radius,
        graph.boundary,
        graph.edge_rule
    );
    for (i, j) in graph.edges() {
        let _ = writeln!(out, "{i} {j}");
    }
    out
}

/// A structurally validated edge list.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedEdgeList {
    pub n: usize,
    pub radius: f64,
    pub boundary: Boundary,
    pub edge_rule: EdgeRule,
    /// `i < j`, ascending, duplicate-free.
    pub edges: Vec<(u32, u32)>,
}

/// Strict edge-list parser: the header must carry exactly five fields, the
/// declared edge count must match the body, every endpoint must be in
/// range, and every line must read `i j` with `i < j` in ascending order
/// without repeats.
pub fn parse_edge_list(text: &str) -> Result<ParsedEdgeList, FormatError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| malformed(1, "empty input, expected header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 5 {
        return Err(malformed(
            1,
            format!(
                "header must be \"n m radius boundary rule\", got {} fields",
                fields.len()
            ),
        ));
    }
    let n: usize = fields[0]
        .parse()
        .map_err(|_| malformed(1, format!("bad node count {:?}", fields[0])))?;
    let m: usize = fields[1]
        .parse()
        .map_err(|_| malformed(1, format!("bad edge count {:?}", fields[1])))?;
    let radius: f64 = fields[2]
        .parse()
        .map_err(|_| malformed(1, format!("bad radius {:?}", fields[2])))?;
    if !(radius > 0.0 && radius <= std::f64::consts::SQRT_2) {
        return Err(malformed(1, format!("radius {radius} outside (0, sqrt(2)]")));
    }
    let boundary: Boundary = fields[3]
        .parse()
        .map_err(|e: String| malformed(1, e))?;
    let edge_rule: EdgeRule = fields[4]
        .parse()
        .map_err(|e: String| malformed(1, e))?;
    if n > u32::MAX as usize {
        return Err(malformed(1, format!("node count {n} exceeds u32 range")));
    }

    let mut edges = Vec::with_capacity(m.min(1 << 20));
    let mut previous: Option<(u32, u32)> = None;
    let mut body_lines = 0usize;
    for (index, line) in lines {
        let line_no = index + 1;
        if line.trim().is_empty() {
            return Err(malformed(line_no, "blank line inside edge body"));
        }
        let mut parts = line.split_whitespace();
        let (a, b) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => (a, b),
            _ => return Err(malformed(line_no, "expected exactly two endpoints")),
        };
        let i: u32 = a
            .parse()
            .map_err(|_| malformed(line_no, format!("bad endpoint {a:?}")))?;
        let j: u32 = b
            .parse()
            .map_err(|_| malformed(line_no, format!("bad endpoint {b:?}")))?;
        if i >= j {
            return Err(malformed(
                line_no,
                format!("endpoints must satisfy i < j, got {i} {j}"),
            ));
        }
        if j as usize >= n {
            return Err(malformed(
                line_no,
                format!("endpoint {j} out of range for {n} nodes"),
            ));
        }
        if let Some(prev) = previous {
            if (i, j) <= prev {
                return Err(malformed(
                    line_no,
                    format!("edges must be strictly ascending, got {i} {j} after {} {}", prev.0, prev.1),
                ));
            }
        }
        previous = Some((i, j));
        edges.push((i, j));
        body_lines += 1;
    }
    if body_lines != m {
        return Err(malformed(
            body_lines + 1,
            format!("header declared {m} edges, body has {body_lines}"),
        ));
    }
    Ok(ParsedEdgeList {
        n,
        radius,
        boundary,
        edge_rule,
        edges,
    })
}

/// Complete raw instance: everything needed to rebuild the graph
/// deterministically.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDump {
    pub n: usize,
    pub pool: u64,
    pub ring: u64,
    pub radius: f64,
    pub boundary: Boundary,
    pub edge_rule: EdgeRule,
    pub seed: u64,
    pub positions: Vec<Point>,
    pub rings: Vec<Vec<u32>>,
}

impl InstanceDump {
    pub fn from_graph(graph: &IntersectionGraph, pool: &KeyPoolParams, seed: u64) -> Self {
        Self {
            n: graph.n(),
            pool: pool.pool,
            ring: pool.ring,
            radius: graph.radius,
            boundary: graph.boundary,
            edge_rule: graph.edge_rule,
            seed,
            positions: graph.positions.clone(),
            rings: graph.key_rings.clone(),
        }
    }

    /// Rebuild the adjacency from the dumped data (the dump stores no
    /// edges; the construction is deterministic).
    pub fn to_graph(&self) -> Result<IntersectionGraph, FormatError> {
        if self.positions.len() != self.n || self.rings.len() != self.n {
            return Err(FormatError::Inconsistent(format!(
                "declared n = {}, got {} positions and {} rings",
                self.n,
                self.positions.len(),
                self.rings.len()
            )));
        }
        for (index, p) in self.positions.iter().enumerate() {
            if !((0.0..1.0).contains(&p.x) && (0.0..1.0).contains(&p.y)) {
                return Err(FormatError::Inconsistent(format!(
                    "position {index} = ({}, {}) outside the unit square",
                    p.x, p.y
                )));
            }
        }
        let pool = KeyPoolParams::new(self.pool, self.ring)?;
        graph::validate_instance(&self.positions, &self.rings, &pool, self.radius)?;
        Ok(graph::build_graph(
            self.positions.clone(),
            self.rings.clone(),
            self.radius,
            self.boundary,
            self.edge_rule,
        )?)
    }
}

pub fn instance_json(dump: &InstanceDump) -> String {
    // Serialization of these plain fields cannot fail.
    serde_json::to_string_pretty(dump).expect("instance dump serializes")
}

pub fn parse_instance(text: &str) -> Result<InstanceDump, FormatError> {
    Ok(serde_json::from_str(text)?)
}

pub fn report_json(report: &ConnectivityReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

pub const CELL_CSV_HEADER: &str = "cell_index,count,not_dense,subgraph_connected";

/// Per-cell CSV: `cell_index,count,not_dense,subgraph_connected`.
pub fn cell_stats_csv(stats: &CellStats) -> String {
    let mut out = String::from(CELL_CSV_HEADER);
    out.push('\n');
    for i in 0..stats.counts.len() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            i, stats.counts[i], stats.not_dense[i], stats.subgraph_connected[i]
        );
    }
    out
}

pub fn cell_stats_json(stats: &CellStats) -> String {
    serde_json::to_string_pretty(stats).expect("cell stats serialize")
}

/// Frozen sweep CSV column set; golden tests compare emitted bytes.
pub const SWEEP_CSV_HEADER: &str = "n,P,K,radius,boundary,regime,c1_or_margin,trials,\
freq_disconnected,wilson_lo,wilson_hi,freq_isolated,bound_floor,bound_denseness,achieved_ab";

/// One CSV row per sweep point. `bound_floor` is empty for points outside
/// the critical regime; every other field is always present.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in &result.rows {
        let solved = &row.solved;
        let floor = row
            .bound_floor
            .map(|f| f.to_string())
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            solved.params.n,
            solved.params.pool.pool,
            solved.params.pool.ring,
            solved.params.radius,
            solved.params.boundary,
            solved.spec.regime.kind(),
            solved.spec.regime.parameter(),
            row.trials,
            row.disconnected.frequency,
            row.disconnected.wilson95.0,
            row.disconnected.wilson95.1,
            row.any_isolated.frequency,
            floor,
            row.bound_denseness,
            solved.achieved_ab,
        );
    }
    out
}

pub fn sweep_json(result: &SweepResult) -> String {
    serde_json::to_string_pretty(result).expect("sweep result serializes")
}
