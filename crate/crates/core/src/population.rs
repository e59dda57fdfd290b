//! Agents, grid occupancy and nested regular friendship graphs.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::geometry::{CellRef, TorusGrid};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn opposite(self) -> Color {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Color::Red => "red",
            Color::Blue => "blue",
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Color {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "red" => Ok(Color::Red),
            "blue" => Ok(Color::Blue),
            other => Err(Error::domain(format!("unknown color `{other}`"))),
        }
    }
}

/// 1-based agent identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentId(u32);

impl AgentId {
    pub fn new(id: usize) -> Result<Self> {
        if id == 0 || id > u32::MAX as usize {
            return Err(Error::domain(format!("invalid agent id {id}")));
        }
        Ok(AgentId(id as u32))
    }

    pub(crate) fn from_index(index: usize) -> Self {
        AgentId(index as u32 + 1)
    }

    pub(crate) fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Agent {
    pub id: AgentId,
    pub color: Color,
}

/// Occupancy of the grid: which agent sits where, and which cells are empty.
///
/// Agents `1..=A` are red and `A+1..=A+B` are blue when built through
/// [`init_configuration`]; [`Configuration::from_placements`] allows any order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    grid: TorusGrid,
    colors: Vec<Color>,
    cell_of: Vec<CellRef>,
    occupant: Vec<Option<AgentId>>,
}

impl Configuration {
    /// A grid with no agents.
    pub fn empty(grid: TorusGrid) -> Self {
        Configuration {
            grid,
            colors: Vec::new(),
            cell_of: Vec::new(),
            occupant: vec![None; grid.num_cells()],
        }
    }

    /// Place agents `1..=placements.len()` in the given order.
    pub fn from_placements(grid: TorusGrid, placements: &[(Color, CellRef)]) -> Result<Self> {
        if placements.len() >= grid.num_cells() {
            return Err(Error::domain(format!(
                "{} agents do not leave an empty cell on a grid of {} cells",
                placements.len(),
                grid.num_cells()
            )));
        }
        let mut config = Configuration::empty(grid);
        for (i, &(color, cell)) in placements.iter().enumerate() {
            if !grid.contains(cell) {
                return Err(Error::domain(format!("{cell} is outside the grid")));
            }
            if let Some(other) = config.occupant[cell.index()] {
                return Err(Error::domain(format!(
                    "agents {other} and {} both placed on {cell}",
                    i + 1
                )));
            }
            let id = AgentId::from_index(i);
            config.occupant[cell.index()] = Some(id);
            config.colors.push(color);
            config.cell_of.push(cell);
        }
        Ok(config)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn num_agents(&self) -> usize {
        self.colors.len()
    }

    pub fn count(&self, color: Color) -> usize {
        self.colors.iter().filter(|&&c| c == color).count()
    }

    pub fn agents(&self) -> impl Iterator<Item = Agent> + '_ {
        self.colors.iter().enumerate().map(|(i, &color)| Agent {
            id: AgentId::from_index(i),
            color,
        })
    }

    pub fn agent(&self, id: AgentId) -> Agent {
        Agent {
            id,
            color: self.color(id),
        }
    }

    pub fn color(&self, id: AgentId) -> Color {
        self.colors[id.index()]
    }

    pub fn cell_of(&self, id: AgentId) -> CellRef {
        self.cell_of[id.index()]
    }

    pub fn occupant(&self, cell: CellRef) -> Option<AgentId> {
        self.occupant[cell.index()]
    }

    pub fn is_empty_cell(&self, cell: CellRef) -> bool {
        self.occupant[cell.index()].is_none()
    }

    /// Empty cells in id order.
    pub fn empty_cells(&self) -> impl Iterator<Item = CellRef> + '_ {
        self.occupant
            .iter()
            .enumerate()
            .filter(|(_, o)| o.is_none())
            .map(|(i, _)| CellRef::from_index(i))
    }

    pub fn empty_set(&self) -> BTreeSet<CellRef> {
        self.empty_cells().collect()
    }

    pub fn num_empty(&self) -> usize {
        self.grid.num_cells() - self.num_agents()
    }

    /// Agent positions indexed by agent; two configurations over the same
    /// roster are equal iff their position vectors are equal.
    pub fn positions(&self) -> &[CellRef] {
        &self.cell_of
    }

    /// Move `agent` to the empty cell `to`, returning the vacated cell.
    pub fn relocate(&mut self, agent: AgentId, to: CellRef) -> Result<CellRef> {
        if agent.index() >= self.num_agents() {
            return Err(Error::Invariant(format!("unknown agent {agent}")));
        }
        if !self.grid.contains(to) {
            return Err(Error::Invariant(format!("{to} is outside the grid")));
        }
        if let Some(other) = self.occupant[to.index()] {
            return Err(Error::Invariant(format!(
                "cannot move agent {agent} onto {to}, occupied by {other}"
            )));
        }
        let from = self.cell_of[agent.index()];
        if self.occupant[from.index()] != Some(agent) {
            return Err(Error::Invariant(format!(
                "occupancy maps disagree on the cell of agent {agent}"
            )));
        }
        self.occupant[from.index()] = None;
        self.occupant[to.index()] = Some(agent);
        self.cell_of[agent.index()] = to;
        Ok(from)
    }

    /// Check that the occupancy maps are mutually inverse.
    pub fn check_consistency(&self) -> Result<()> {
        let mut occupied = 0;
        for (i, o) in self.occupant.iter().enumerate() {
            if let Some(a) = o {
                occupied += 1;
                if self.cell_of.get(a.index()).map(|c| c.index()) != Some(i) {
                    return Err(Error::Invariant(format!(
                        "cell v{} lists agent {a} which is elsewhere",
                        i + 1
                    )));
                }
            }
        }
        if occupied != self.num_agents() {
            return Err(Error::Invariant(format!(
                "{occupied} occupied cells for {} agents",
                self.num_agents()
            )));
        }
        Ok(())
    }

    /// The configuration shifted by a torus translation.
    pub fn translated(&self, dr: isize, dc: isize) -> Configuration {
        let placements: Vec<_> = self
            .agents()
            .map(|a| (a.color, self.grid.translate(self.cell_of(a.id), dr, dc)))
            .collect();
        Configuration::from_placements(self.grid, &placements).expect("translation is a bijection")
    }

    /// The configuration with every agent's color swapped.
    pub fn color_swapped(&self) -> Configuration {
        let mut out = self.clone();
        for c in &mut out.colors {
            *c = c.opposite();
        }
        out
    }
}

/// Randomly place `reds` red and `blues` blue agents on distinct cells.
pub fn init_configuration(
    seed: u64,
    grid: TorusGrid,
    reds: usize,
    blues: usize,
) -> Result<Configuration> {
    let agents = reds + blues;
    if agents >= grid.num_cells() {
        return Err(Error::domain(format!(
            "{reds} red + {blues} blue agents need fewer than {} cells",
            grid.num_cells()
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut cells: Vec<CellRef> = grid.cells().collect();
    cells.shuffle(&mut rng);
    let placements: Vec<_> = cells
        .into_iter()
        .take(agents)
        .enumerate()
        .map(|(i, cell)| (if i < reds { Color::Red } else { Color::Blue }, cell))
        .collect();
    Configuration::from_placements(grid, &placements)
}

/// A perfect matching: `num_agents / 2` disjoint pairs.
pub type Matching = Vec<(AgentId, AgentId)>;

/// Partition the edges of the complete graph on `num_agents` agents into
/// `num_agents - 1` perfect matchings.
///
/// Uses the round-robin (circle) construction on a seeded random relabelling
/// of the agents: vertex `m - 1` is fixed at the centre and in round `r` it
/// meets `r`, while the remaining vertices pair up as `r ± i (mod m - 1)`.
pub fn build_one_factorization(seed: u64, num_agents: usize) -> Result<Vec<Matching>> {
    if num_agents < 2 || !num_agents.is_multiple_of(2) {
        return Err(Error::domain(format!(
            "a one-factorization needs an even number of agents >= 2, got {num_agents}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut labels: Vec<AgentId> = (0..num_agents).map(AgentId::from_index).collect();
    labels.shuffle(&mut rng);

    let m = num_agents;
    let ring = m - 1;
    let pair = |a: usize, b: usize| {
        let (a, b) = (labels[a], labels[b]);
        if a < b {
            (a, b)
        } else {
            (b, a)
        }
    };
    let rounds = (0..ring)
        .map(|r| {
            let mut matching = Vec::with_capacity(m / 2);
            matching.push(pair(r, m - 1));
            for i in 1..m / 2 {
                matching.push(pair((r + i) % ring, (r + ring - i) % ring));
            }
            matching
        })
        .collect();
    Ok(rounds)
}

/// Undirected k-regular friendship graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FriendshipGraph {
    degree: usize,
    friends: Vec<Vec<AgentId>>,
}

impl FriendshipGraph {
    /// The graph without edges.
    pub fn empty(num_agents: usize) -> Self {
        FriendshipGraph {
            degree: 0,
            friends: vec![Vec::new(); num_agents],
        }
    }

    /// Build from an explicit edge list; every agent must end up with the same degree.
    pub fn from_edges(num_agents: usize, edges: &[(AgentId, AgentId)]) -> Result<Self> {
        let mut friends = vec![Vec::new(); num_agents];
        let mut seen = BTreeSet::new();
        for &(a, b) in edges {
            if a == b {
                return Err(Error::domain(format!("self-loop on agent {a}")));
            }
            if a.index() >= num_agents || b.index() >= num_agents {
                return Err(Error::domain(format!(
                    "edge ({a}, {b}) names an unknown agent"
                )));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::domain(format!("duplicate edge ({a}, {b})")));
            }
            friends[a.index()].push(b);
            friends[b.index()].push(a);
        }
        let degree = friends.first().map_or(0, Vec::len);
        if friends.iter().any(|f| f.len() != degree) {
            return Err(Error::domain("friendship graph is not regular"));
        }
        for f in &mut friends {
            f.sort_unstable();
        }
        Ok(FriendshipGraph { degree, friends })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num_agents(&self) -> usize {
        self.friends.len()
    }

    pub fn friends(&self, agent: AgentId) -> &[AgentId] {
        &self.friends[agent.index()]
    }

    pub fn are_friends(&self, a: AgentId, b: AgentId) -> bool {
        self.friends[a.index()].binary_search(&b).is_ok()
    }

    /// Edges `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(AgentId, AgentId)> {
        let mut out = Vec::with_capacity(self.num_agents() * self.degree / 2);
        for (i, fs) in self.friends.iter().enumerate() {
            let a = AgentId::from_index(i);
            out.extend(fs.iter().filter(|&&b| a < b).map(|&b| (a, b)));
        }
        out
    }

    pub fn num_edges(&self) -> usize {
        self.num_agents() * self.degree / 2
    }
}

/// The union of the first `k` factors of [`build_one_factorization`].
///
/// For a fixed seed the graphs are nested: `graph(k) ⊂ graph(k + 1)`.
pub fn friendship_graph(seed: u64, k: usize, num_agents: usize) -> Result<FriendshipGraph> {
    if k == 0 {
        return Ok(FriendshipGraph::empty(num_agents));
    }
    if k >= num_agents.max(1) {
        return Err(Error::domain(format!(
            "degree {k} is out of range 0..={} for {num_agents} agents",
            num_agents.saturating_sub(1)
        )));
    }
    let factors = build_one_factorization(seed, num_agents)?;
    let edges: Vec<_> = factors.into_iter().take(k).flatten().collect();
    FriendshipGraph::from_edges(num_agents, &edges)
}
