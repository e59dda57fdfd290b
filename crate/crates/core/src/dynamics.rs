//! Sequential relocation process.
//!
//! At each step the least satisfied agent among those that can strictly
//! improve moves to its best empty cell. The process ends when nobody can
//! improve, when a configuration repeats, or at an iteration cap.
//!
//! Random draws happen only to break ties, in a fixed order per step: first
//! among tied movers, then among tied destinations, and each only when the
//! tie set has more than one element.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::geometry::{CellRef, TorusGrid};
use crate::population::{AgentId, Configuration, FriendshipGraph};
use crate::rng::{pick_index, rng_from_seed, SimRng};
use crate::utility::{total_utility, UtilityParams};

/// Utilities closer than this are treated as equal, both for strict
/// improvement and for tie detection.
pub const UTILITY_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StopReason {
    Converged,
    LoopDetected,
    IterationCap,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::Converged => "converged",
            StopReason::LoopDetected => "loop_detected",
            StopReason::IterationCap => "iteration_cap",
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn default_max_iter(grid: &TorusGrid) -> usize {
    10 * grid.num_cells()
}

/// The cells that would strictly improve an agent's utility.
#[derive(Debug, Clone, PartialEq)]
pub struct Improvement {
    /// Utility at the agent's current cell.
    pub current: f64,
    /// Best utility over empty cells.
    pub best: f64,
    /// Empty cells attaining `best`, in id order.
    pub cells: Vec<CellRef>,
}

/// Evaluate every empty cell for `agent`; `None` if no cell strictly beats
/// staying put.
pub fn improvement_options(
    agent: AgentId,
    config: &Configuration,
    graph: &FriendshipGraph,
    params: &UtilityParams,
) -> Option<Improvement> {
    let here = config.cell_of(agent);
    let current = total_utility(agent, here, config, graph, params).total;
    let mut best = f64::NEG_INFINITY;
    let mut cells = Vec::new();
    for cell in config.empty_cells() {
        let u = total_utility(agent, cell, config, graph, params).total;
        if u > best + UTILITY_EPS {
            best = u;
            cells.clear();
            cells.push(cell);
        } else if u >= best - UTILITY_EPS {
            cells.push(cell);
            best = best.max(u);
        }
    }
    (best > current + UTILITY_EPS).then_some(Improvement {
        current,
        best,
        cells,
    })
}

/// The destination `agent` would pick, with its utility there; ties among
/// maximising cells are broken uniformly with `rng`.
pub fn best_improvement(
    agent: AgentId,
    config: &Configuration,
    graph: &FriendshipGraph,
    params: &UtilityParams,
    rng: &mut SimRng,
) -> Option<(CellRef, f64)> {
    let imp = improvement_options(agent, config, graph, params)?;
    Some((pick_cell(&imp.cells, rng), imp.best))
}

fn pick_cell(cells: &[CellRef], rng: &mut SimRng) -> CellRef {
    if cells.len() == 1 {
        cells[0]
    } else {
        cells[pick_index(rng, cells.len())]
    }
}

/// Every agent that can strictly improve, with its options, in id order.
pub fn improvable_agents(
    config: &Configuration,
    graph: &FriendshipGraph,
    params: &UtilityParams,
) -> Vec<(AgentId, Improvement)> {
    config
        .agents()
        .filter_map(|a| improvement_options(a.id, config, graph, params).map(|imp| (a.id, imp)))
        .collect()
}

/// Indices into `candidates` of the agents with minimal current utility.
fn saddest(candidates: &[(AgentId, Improvement)]) -> Vec<usize> {
    let min = candidates
        .iter()
        .map(|(_, imp)| imp.current)
        .fold(f64::INFINITY, f64::min);
    candidates
        .iter()
        .enumerate()
        .filter(|(_, (_, imp))| imp.current <= min + UTILITY_EPS)
        .map(|(i, _)| i)
        .collect()
}

fn pick_mover(candidates: &[(AgentId, Improvement)], rng: &mut SimRng) -> Option<usize> {
    let tied = saddest(candidates);
    match tied.len() {
        0 => None,
        1 => Some(tied[0]),
        q => Some(tied[pick_index(rng, q)]),
    }
}

/// The least satisfied agent among those that can strictly improve.
pub fn select_mover(
    config: &Configuration,
    graph: &FriendshipGraph,
    params: &UtilityParams,
    rng: &mut SimRng,
) -> Option<AgentId> {
    let candidates = improvable_agents(config, graph, params);
    pick_mover(&candidates, rng).map(|i| candidates[i].0)
}

/// One executed relocation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Move {
    /// Iteration counter after the move, starting at 1.
    pub t: usize,
    pub agent: AgentId,
    pub origin: CellRef,
    pub destination: CellRef,
    /// Utility at the origin before moving.
    pub utility_before: f64,
    /// Utility of the destination as evaluated when choosing it, moving cost included.
    pub utility_after: f64,
}

/// Every configuration visited so far, for exact revisit detection.
#[derive(Debug, Clone, Default)]
struct ConfigHistory {
    by_fingerprint: HashMap<u64, Vec<usize>>,
    snapshots: Vec<Vec<CellRef>>,
}

impl ConfigHistory {
    fn fingerprint(positions: &[CellRef]) -> u64 {
        let mut h = DefaultHasher::new();
        positions.hash(&mut h);
        h.finish()
    }

    /// Record `positions`; returns true if this exact configuration was seen before.
    fn insert(&mut self, positions: &[CellRef]) -> bool {
        let slot = self
            .by_fingerprint
            .entry(Self::fingerprint(positions))
            .or_default();
        if slot
            .iter()
            .any(|&i| self.snapshots[i].as_slice() == positions)
        {
            return true;
        }
        slot.push(self.snapshots.len());
        self.snapshots.push(positions.to_vec());
        false
    }

    fn len(&self) -> usize {
        self.snapshots.len()
    }
}

/// State of a run: configuration, step counter and who has moved.
#[derive(Debug, Clone)]
pub struct SimState {
    pub config: Configuration,
    /// Number of executed relocations.
    pub t: usize,
    pub movers: BTreeSet<AgentId>,
    history: ConfigHistory,
}

impl SimState {
    pub fn new(config: Configuration) -> Self {
        let mut history = ConfigHistory::default();
        history.insert(config.positions());
        SimState {
            config,
            t: 0,
            movers: BTreeSet::new(),
            history,
        }
    }

    /// Number of distinct configurations visited, including the initial one.
    pub fn distinct_configurations(&self) -> usize {
        self.history.len()
    }
}

/// Result of a single [`Simulation::step`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub moved: Option<Move>,
    pub stop: Option<StopReason>,
}

/// A single run of the relocation process.
#[derive(Debug, Clone)]
pub struct Simulation<'g> {
    state: SimState,
    graph: &'g FriendshipGraph,
    params: UtilityParams,
    rng: SimRng,
    stopped: Option<StopReason>,
    trace: Option<Vec<Move>>,
}

impl<'g> Simulation<'g> {
    pub fn new(
        initial: Configuration,
        graph: &'g FriendshipGraph,
        params: UtilityParams,
        seed: u64,
    ) -> Result<Self> {
        if graph.num_agents() != initial.num_agents() {
            return Err(Error::domain(format!(
                "friendship graph covers {} agents, configuration has {}",
                graph.num_agents(),
                initial.num_agents()
            )));
        }
        params.validate()?;
        Ok(Simulation {
            state: SimState::new(initial),
            graph,
            params,
            rng: rng_from_seed(seed),
            stopped: None,
            trace: None,
        })
    }

    /// Keep every executed move.
    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn stop_reason(&self) -> Option<StopReason> {
        self.stopped
    }

    pub fn step(&mut self) -> Result<StepOutcome> {
        if let Some(stop) = self.stopped {
            return Ok(StepOutcome {
                moved: None,
                stop: Some(stop),
            });
        }
        let candidates = improvable_agents(&self.state.config, self.graph, &self.params);
        let Some(i) = pick_mover(&candidates, &mut self.rng) else {
            self.stopped = Some(StopReason::Converged);
            return Ok(StepOutcome {
                moved: None,
                stop: self.stopped,
            });
        };
        let (agent, imp) = &candidates[i];
        let destination = pick_cell(&imp.cells, &mut self.rng);
        let origin = self.state.config.relocate(*agent, destination)?;

        self.state.t += 1;
        self.state.movers.insert(*agent);
        let mv = Move {
            t: self.state.t,
            agent: *agent,
            origin,
            destination,
            utility_before: imp.current,
            utility_after: imp.best,
        };
        if let Some(trace) = &mut self.trace {
            trace.push(mv);
        }
        if self.state.history.insert(self.state.config.positions()) {
            self.stopped = Some(StopReason::LoopDetected);
        }
        Ok(StepOutcome {
            moved: Some(mv),
            stop: self.stopped,
        })
    }

    /// Step until the process stops or `max_iter` relocations have run.
    pub fn run_to_end(mut self, max_iter: usize) -> Result<RunOutcome> {
        let stop = loop {
            if let Some(stop) = self.stopped {
                break stop;
            }
            if self.state.t >= max_iter {
                self.stopped = Some(StopReason::IterationCap);
                break StopReason::IterationCap;
            }
            self.step()?;
        };
        Ok(RunOutcome {
            state: self.state,
            stop,
            trace: self.trace.unwrap_or_default(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: SimState,
    pub stop: StopReason,
    /// Executed moves; empty unless tracing was requested.
    pub trace: Vec<Move>,
}

/// Run the process from `initial` to completion.
pub fn run(
    initial: Configuration,
    graph: &FriendshipGraph,
    params: UtilityParams,
    max_iter: usize,
    seed: u64,
) -> Result<RunOutcome> {
    if max_iter == 0 {
        return Err(Error::domain("max_iter must be at least 1"));
    }
    Simulation::new(initial, graph, params, seed)?.run_to_end(max_iter)
}
