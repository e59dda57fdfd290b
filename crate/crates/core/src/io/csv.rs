//! Tabular output: sweep summaries, per-run records, move traces and grid
//! snapshots. Floats are written with Rust's shortest round-trip formatting,
//! so reading a file back reproduces every value bit for bit.

use ::csv::{ReaderBuilder, StringRecord, Terminator, Writer, WriterBuilder};

use crate::dynamics::Move;
use crate::error::{Error, Result};
use crate::geometry::TorusGrid;
use crate::harness::{SweepResult, NUM_OUTCOMES, OUTCOME_FIELDS};
use crate::population::{AgentId, Color, Configuration, FriendshipGraph};

/// One row of a sweep summary file.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sweep_value: f64,
    pub mean: [f64; NUM_OUTCOMES],
    pub sd: [f64; NUM_OUTCOMES],
}

impl SweepRow {
    pub fn mean_of(&self, field: &str) -> Option<f64> {
        field_index(field).map(|i| self.mean[i])
    }

    pub fn sd_of(&self, field: &str) -> Option<f64> {
        field_index(field).map(|i| self.sd[i])
    }
}

fn field_index(field: &str) -> Option<usize> {
    OUTCOME_FIELDS.iter().position(|f| *f == field)
}

pub fn sweep_header() -> Vec<String> {
    let mut header = vec!["sweep_value".to_string()];
    for field in OUTCOME_FIELDS {
        header.push(format!("{field}_mean"));
        header.push(format!("{field}_sd"));
    }
    header
}

fn writer() -> Writer<Vec<u8>> {
    WriterBuilder::new()
        .terminator(Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: Writer<Vec<u8>>) -> Result<Vec<u8>> {
    w.into_inner()
        .map_err(|e| Error::Invariant(format!("csv buffer flush failed: {e}")))
}

pub fn sweep_rows(result: &SweepResult) -> Vec<SweepRow> {
    result
        .points
        .iter()
        .map(|p| SweepRow {
            sweep_value: p.value,
            mean: p.mean.0,
            sd: p.sd.0,
        })
        .collect()
}

pub fn write_sweep_rows(rows: &[SweepRow]) -> Result<Vec<u8>> {
    let mut w = writer();
    w.write_record(sweep_header())?;
    for row in rows {
        let mut rec = vec![row.sweep_value.to_string()];
        for i in 0..NUM_OUTCOMES {
            rec.push(row.mean[i].to_string());
            rec.push(row.sd[i].to_string());
        }
        w.write_record(&rec)?;
    }
    finish(w)
}

pub fn write_sweep(result: &SweepResult) -> Result<Vec<u8>> {
    write_sweep_rows(&sweep_rows(result))
}

fn parse_f64(rec: &StringRecord, i: usize, line: u64) -> Result<f64> {
    let raw = rec.get(i).unwrap_or("");
    raw.trim().parse().map_err(|_| {
        Error::config(format!(
            "line {line}, column {}: `{raw}` is not a number",
            i + 1
        ))
    })
}

fn reader(bytes: &[u8]) -> ::csv::Reader<&[u8]> {
    ReaderBuilder::new().has_headers(true).from_reader(bytes)
}

fn check_header(rd: &mut ::csv::Reader<&[u8]>, expected: &[&str]) -> Result<()> {
    let header = rd.headers()?.clone();
    let found: Vec<&str> = header.iter().map(str::trim).collect();
    if found != expected {
        return Err(Error::config(format!(
            "unexpected header `{}`, expected `{}`",
            found.join(","),
            expected.join(",")
        )));
    }
    Ok(())
}

/// Parse a sweep summary file. The header must match [`sweep_header`].
pub fn read_sweep(bytes: &[u8]) -> Result<Vec<SweepRow>> {
    let mut rd = reader(bytes);
    let header = sweep_header();
    let expected: Vec<&str> = header.iter().map(String::as_str).collect();
    check_header(&mut rd, &expected)?;
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let mut row = SweepRow {
            sweep_value: parse_f64(&rec, 0, line)?,
            mean: [0.0; NUM_OUTCOMES],
            sd: [0.0; NUM_OUTCOMES],
        };
        for i in 0..NUM_OUTCOMES {
            row.mean[i] = parse_f64(&rec, 1 + 2 * i, line)?;
            row.sd[i] = parse_f64(&rec, 2 + 2 * i, line)?;
        }
        rows.push(row);
    }
    Ok(rows)
}

pub const RUNS_HEADER: [&str; 13] = [
    "sweep_value",
    "replicate",
    "iterations",
    "movers",
    "fsi",
    "fsi_degenerate",
    "moran",
    "geary",
    "avg_welfare",
    "total_welfare",
    "welfare_color_part",
    "welfare_friend_part",
    "stop_reason",
];

/// Every replicate of every sweep point, one row each.
pub fn write_runs(result: &SweepResult) -> Result<Vec<u8>> {
    let mut w = writer();
    w.write_record(RUNS_HEADER)?;
    for point in &result.points {
        for r in &point.records {
            w.write_record([
                point.value.to_string(),
                r.replicate.to_string(),
                r.iterations.to_string(),
                r.movers.to_string(),
                r.fsi.to_string(),
                r.fsi_degenerate.to_string(),
                r.moran.to_string(),
                r.geary.to_string(),
                r.avg_welfare.to_string(),
                r.total_welfare.to_string(),
                r.welfare_color_part.to_string(),
                r.welfare_friend_part.to_string(),
                r.stop_reason.to_string(),
            ])?;
        }
    }
    finish(w)
}

pub const TRACE_HEADER: [&str; 6] = [
    "t",
    "agent",
    "origin",
    "destination",
    "utility_before",
    "utility_after",
];

/// Executed moves; cells are written as 1-based ids.
pub fn write_trace(moves: &[Move]) -> Result<Vec<u8>> {
    let mut w = writer();
    w.write_record(TRACE_HEADER)?;
    for m in moves {
        w.write_record([
            m.t.to_string(),
            m.agent.to_string(),
            m.origin.id().to_string(),
            m.destination.id().to_string(),
            m.utility_before.to_string(),
            m.utility_after.to_string(),
        ])?;
    }
    finish(w)
}

pub const AGENTS_HEADER: [&str; 4] = ["agent_id", "color", "row", "col"];
pub const EDGES_HEADER: [&str; 2] = ["a", "b"];

/// Agent positions with 1-based rows and columns.
pub fn write_agents(config: &Configuration) -> Result<Vec<u8>> {
    let grid = config.grid();
    let mut w = writer();
    w.write_record(AGENTS_HEADER)?;
    for agent in config.agents() {
        let cell = config.cell_of(agent.id);
        w.write_record([
            agent.id.to_string(),
            agent.color.to_string(),
            grid.row(cell).to_string(),
            grid.col(cell).to_string(),
        ])?;
    }
    finish(w)
}

/// Friendship edges `a < b`.
pub fn write_edges(graph: &FriendshipGraph) -> Result<Vec<u8>> {
    let mut w = writer();
    w.write_record(EDGES_HEADER)?;
    for (a, b) in graph.edges() {
        w.write_record([a.to_string(), b.to_string()])?;
    }
    finish(w)
}

fn parse_usize(rec: &StringRecord, i: usize, line: u64) -> Result<usize> {
    let raw = rec.get(i).unwrap_or("");
    raw.trim().parse().map_err(|_| {
        Error::config(format!(
            "line {line}, column {}: `{raw}` is not a non-negative integer",
            i + 1
        ))
    })
}

/// Rebuild a configuration from an agents file. Agent ids must run 1..=A in order.
pub fn read_agents(bytes: &[u8], grid: TorusGrid) -> Result<Configuration> {
    let mut rd = reader(bytes);
    check_header(&mut rd, &AGENTS_HEADER)?;
    let mut placements = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let id = parse_usize(&rec, 0, line)?;
        if id != placements.len() + 1 {
            return Err(Error::config(format!(
                "line {line}: expected agent id {}, found {id}",
                placements.len() + 1
            )));
        }
        let color: Color = rec.get(1).unwrap_or("").trim().parse()?;
        let row = parse_usize(&rec, 2, line)?;
        let col = parse_usize(&rec, 3, line)?;
        let cell = grid
            .cell(row, col)
            .map_err(|e| Error::config(format!("line {line}: {e}")))?;
        placements.push((color, cell));
    }
    Configuration::from_placements(grid, &placements)
}

pub fn read_edges(bytes: &[u8], num_agents: usize) -> Result<FriendshipGraph> {
    let mut rd = reader(bytes);
    check_header(&mut rd, &EDGES_HEADER)?;
    let mut edges = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let a = AgentId::new(parse_usize(&rec, 0, line)?)?;
        let b = AgentId::new(parse_usize(&rec, 1, line)?)?;
        edges.push((a, b));
    }
    FriendshipGraph::from_edges(num_agents, &edges)
}
