//! Segregation and welfare measures on a configuration.
//!
//! Spatial statistics use the contiguity graph between agents: two agents
//! are linked when their cells are Moore neighbours. The attribute is
//! `z = 1` for red and `z = 0` for blue.

use crate::error::{Error, Result};
use crate::population::{AgentId, Color, Configuration, FriendshipGraph};
use crate::utility::{total_utility, UtilityParams};

/// Symmetric 0/1 adjacency between agents occupying Moore-adjacent cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContiguityGraph {
    num_agents: usize,
    /// Undirected edges `(a, b)` with `a < b`, sorted.
    edges: Vec<(AgentId, AgentId)>,
}

impl ContiguityGraph {
    pub fn num_agents(&self) -> usize {
        self.num_agents
    }

    pub fn edges(&self) -> &[(AgentId, AgentId)] {
        &self.edges
    }

    /// Undirected edge count `N_E`.
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Sum of all weights over ordered pairs, `2 N_E`.
    pub fn total_weight(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn weight(&self, a: AgentId, b: AgentId) -> u8 {
        let key = (a.min(b), a.max(b));
        u8::from(a != b && self.edges.binary_search(&key).is_ok())
    }
}

pub fn contiguity_graph(config: &Configuration) -> ContiguityGraph {
    let grid = config.grid();
    let mut edges = Vec::new();
    for agent in config.agents() {
        let mut row: Vec<AgentId> = grid
            .moore_neighborhood(config.cell_of(agent.id))
            .iter()
            .filter_map(|&nb| config.occupant(nb))
            .filter(|&other| other > agent.id)
            .collect();
        row.sort_unstable();
        edges.extend(row.into_iter().map(|b| (agent.id, b)));
    }
    ContiguityGraph {
        num_agents: config.num_agents(),
        edges,
    }
}

/// Freeman segregation index with a flag for the no-edge case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreemanIndex {
    pub value: f64,
    /// No contiguity edges at all; `value` is reported as 0.
    pub degenerate: bool,
}

fn require_both_colors(config: &Configuration) -> Result<(usize, usize)> {
    let reds = config.count(Color::Red);
    let blues = config.count(Color::Blue);
    if reds == 0 || blues == 0 {
        return Err(Error::domain(format!(
            "segregation measures need both colors, got {reds} red and {blues} blue"
        )));
    }
    Ok((reds, blues))
}

fn cross_edges(config: &Configuration, graph: &ContiguityGraph) -> usize {
    graph
        .edges()
        .iter()
        .filter(|&&(a, b)| config.color(a) != config.color(b))
        .count()
}

/// `max(0, (E[N*] − N^c) / E[N*])` with `E[N*] = N_E · 2AB / ((A+B)(A+B−1))`.
pub fn freeman_index(config: &Configuration) -> Result<FreemanIndex> {
    let (reds, blues) = require_both_colors(config)?;
    let graph = contiguity_graph(config);
    freeman_index_on(config, &graph, reds, blues)
}

fn freeman_index_on(
    config: &Configuration,
    graph: &ContiguityGraph,
    reds: usize,
    blues: usize,
) -> Result<FreemanIndex> {
    let n_e = graph.num_edges();
    if n_e == 0 {
        return Ok(FreemanIndex {
            value: 0.0,
            degenerate: true,
        });
    }
    let total = (reds + blues) as f64;
    let p = 2.0 * reds as f64 * blues as f64 / (total * (total - 1.0));
    let expected = n_e as f64 * p;
    let observed = cross_edges(config, graph) as f64;
    Ok(FreemanIndex {
        value: ((expected - observed) / expected).max(0.0),
        degenerate: false,
    })
}

struct Autocorrelation {
    n: f64,
    s0: f64,
    /// `Σ (z_i − z̄)²`.
    variance_sum: f64,
    mean: f64,
}

fn autocorrelation_setup(
    config: &Configuration,
    graph: &ContiguityGraph,
) -> Result<Autocorrelation> {
    let (reds, blues) = require_both_colors(config)
        .map_err(|_| Error::Degenerate("attribute has zero variance (one color only)".into()))?;
    if graph.num_edges() == 0 {
        return Err(Error::Degenerate("no contiguity edges".into()));
    }
    let n = (reds + blues) as f64;
    let mean = reds as f64 / n;
    // Σ (z − z̄)² for a 0/1 attribute.
    let variance_sum = reds as f64 * (1.0 - mean).powi(2) + blues as f64 * mean.powi(2);
    Ok(Autocorrelation {
        n,
        s0: graph.total_weight() as f64,
        variance_sum,
        mean,
    })
}

fn z(config: &Configuration, a: AgentId) -> f64 {
    match config.color(a) {
        Color::Red => 1.0,
        Color::Blue => 0.0,
    }
}

/// Moran's I with contiguity weights.
pub fn morans_i(config: &Configuration) -> Result<f64> {
    morans_i_on(config, &contiguity_graph(config))
}

fn morans_i_on(config: &Configuration, graph: &ContiguityGraph) -> Result<f64> {
    let s = autocorrelation_setup(config, graph)?;
    // Each undirected edge appears twice in the ordered double sum.
    let cross: f64 = graph
        .edges()
        .iter()
        .map(|&(a, b)| 2.0 * (z(config, a) - s.mean) * (z(config, b) - s.mean))
        .sum();
    Ok(s.n / s.s0 * cross / s.variance_sum)
}

/// Geary's C with contiguity weights.
pub fn gearys_c(config: &Configuration) -> Result<f64> {
    gearys_c_on(config, &contiguity_graph(config))
}

fn gearys_c_on(config: &Configuration, graph: &ContiguityGraph) -> Result<f64> {
    let s = autocorrelation_setup(config, graph)?;
    let squared_diffs = 2.0 * cross_edges(config, graph) as f64;
    Ok((s.n - 1.0) * squared_diffs / (2.0 * s.s0 * s.variance_sum))
}

/// The three spatial statistics computed from one contiguity graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segregation {
    pub fsi: FreemanIndex,
    pub moran: f64,
    pub geary: f64,
}

pub fn segregation(config: &Configuration) -> Result<Segregation> {
    let (reds, blues) = require_both_colors(config)?;
    let graph = contiguity_graph(config);
    Ok(Segregation {
        fsi: freeman_index_on(config, &graph, reds, blues)?,
        moran: morans_i_on(config, &graph)?,
        geary: gearys_c_on(config, &graph)?,
    })
}

/// Aggregate utility of all agents at their own cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Welfare {
    pub avg: f64,
    pub total: f64,
    /// `Σ βα · U_color`.
    pub color_part: f64,
    /// `Σ β(1 − α) · U_friend`.
    pub friend_part: f64,
    /// `Σ (1 − β) · U_moving`; every agent stays put, so this is `(1 − β)(A + B)`.
    pub moving_part: f64,
}

pub fn welfare(config: &Configuration, graph: &FriendshipGraph, params: &UtilityParams) -> Welfare {
    let mut w = Welfare {
        avg: 0.0,
        total: 0.0,
        color_part: 0.0,
        friend_part: 0.0,
        moving_part: 0.0,
    };
    for agent in config.agents() {
        let u = total_utility(agent.id, config.cell_of(agent.id), config, graph, params);
        w.total += u.total;
        w.color_part += u.color_part;
        w.friend_part += u.friend_part;
        w.moving_part += u.moving_part;
    }
    if config.num_agents() > 0 {
        w.avg = w.total / config.num_agents() as f64;
    }
    w
}
