//! Replicated parameter sweeps.
//!
//! An [`ExperimentSpec`] fixes the grid, population, friendship degree and
//! utility parameters, and optionally sweeps one of `x`, `beta` or `k`.
//! Every sweep point is run on `H` replicates; replicate `h` always starts
//! from the same placement and (unless re-permuted per point) the same
//! friendship factorisation, so sweep points are comparable seed by seed.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::dynamics::{self, RunOutcome, StopReason};
use crate::error::{Error, Result};
use crate::geometry::TorusGrid;
use crate::metrics;
use crate::population::{friendship_graph, init_configuration, Configuration, FriendshipGraph};
use crate::rng::{derive_seed, Stream};
use crate::utility::{ColorVariant, MovingCost, UtilityParams};

/// Number of statistics in an [`OutcomeRecord`] that get aggregated.
pub const NUM_OUTCOMES: usize = 9;

/// Names of the aggregated statistics, in CSV column order.
pub const OUTCOME_FIELDS: [&str; NUM_OUTCOMES] = [
    "iterations",
    "movers",
    "fsi",
    "moran",
    "geary",
    "avg_welfare",
    "total_welfare",
    "welfare_color_part",
    "welfare_friend_part",
];

/// Statistics of one finished run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeRecord {
    /// Replicate index `h`, from 1.
    pub replicate: usize,
    pub iterations: usize,
    pub movers: usize,
    pub fsi: f64,
    /// The final configuration had no contiguity edges.
    pub fsi_degenerate: bool,
    pub moran: f64,
    pub geary: f64,
    pub avg_welfare: f64,
    pub total_welfare: f64,
    pub welfare_color_part: f64,
    pub welfare_friend_part: f64,
    pub stop_reason: StopReason,
}

impl OutcomeRecord {
    pub fn from_run(
        replicate: usize,
        outcome: &RunOutcome,
        graph: &FriendshipGraph,
        params: &UtilityParams,
    ) -> Result<Self> {
        let config = &outcome.state.config;
        let seg = metrics::segregation(config)?;
        let w = metrics::welfare(config, graph, params);
        Ok(OutcomeRecord {
            replicate,
            iterations: outcome.state.t,
            movers: outcome.state.movers.len(),
            fsi: seg.fsi.value,
            fsi_degenerate: seg.fsi.degenerate,
            moran: seg.moran,
            geary: seg.geary,
            avg_welfare: w.avg,
            total_welfare: w.total,
            welfare_color_part: w.color_part,
            welfare_friend_part: w.friend_part,
            stop_reason: outcome.stop,
        })
    }

    /// The aggregated statistics in [`OUTCOME_FIELDS`] order.
    pub fn values(&self) -> [f64; NUM_OUTCOMES] {
        [
            self.iterations as f64,
            self.movers as f64,
            self.fsi,
            self.moran,
            self.geary,
            self.avg_welfare,
            self.total_welfare,
            self.welfare_color_part,
            self.welfare_friend_part,
        ]
    }
}

/// One value per statistic, in [`OUTCOME_FIELDS`] order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeSummary(pub [f64; NUM_OUTCOMES]);

impl OutcomeSummary {
    pub fn get(&self, field: &str) -> Option<f64> {
        OUTCOME_FIELDS
            .iter()
            .position(|&f| f == field)
            .map(|i| self.0[i])
    }

    pub fn iterations(&self) -> f64 {
        self.0[0]
    }
    pub fn movers(&self) -> f64 {
        self.0[1]
    }
    pub fn fsi(&self) -> f64 {
        self.0[2]
    }
    pub fn moran(&self) -> f64 {
        self.0[3]
    }
    pub fn geary(&self) -> f64 {
        self.0[4]
    }
    pub fn avg_welfare(&self) -> f64 {
        self.0[5]
    }
    pub fn total_welfare(&self) -> f64 {
        self.0[6]
    }
    pub fn welfare_color_part(&self) -> f64 {
        self.0[7]
    }
    pub fn welfare_friend_part(&self) -> f64 {
        self.0[8]
    }
}

/// Field-wise sample mean and standard deviation (`H − 1` denominator; 0 for a
/// single record). Records are reduced in replicate order.
pub fn aggregate(records: &[OutcomeRecord]) -> Result<(OutcomeSummary, OutcomeSummary)> {
    if records.is_empty() {
        return Err(Error::domain("cannot aggregate an empty set of records"));
    }
    let mut sorted: Vec<&OutcomeRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.replicate);
    let h = sorted.len() as f64;
    let mut mean = [0.0; NUM_OUTCOMES];
    for r in &sorted {
        for (m, v) in mean.iter_mut().zip(r.values()) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= h;
    }
    let mut sd = [0.0; NUM_OUTCOMES];
    if sorted.len() > 1 {
        for r in &sorted {
            for ((s, v), m) in sd.iter_mut().zip(r.values()).zip(mean) {
                *s += (v - m).powi(2);
            }
        }
        for s in &mut sd {
            *s = (*s / (h - 1.0)).sqrt();
        }
    }
    Ok((OutcomeSummary(mean), OutcomeSummary(sd)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    X,
    Beta,
    K,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::X => "x",
            SweepAxis::Beta => "beta",
            SweepAxis::K => "k",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "x" => Ok(SweepAxis::X),
            "beta" => Ok(SweepAxis::Beta),
            "k" => Ok(SweepAxis::K),
            other => Err(Error::config(format!(
                "unknown sweep axis `{other}` (expected x, beta or k)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

/// `{0, 1/steps, …, 1}`.
pub fn unit_grid(steps: usize) -> Vec<f64> {
    (0..=steps).map(|i| i as f64 / steps as f64).collect()
}

/// Default resolution for `x` and `beta` sweeps: 21 points.
pub fn default_unit_grid() -> Vec<f64> {
    unit_grid(20)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub grid_side: usize,
    pub reds: usize,
    pub blues: usize,
    /// Friendship degree, used unless `k` is swept.
    pub k: usize,
    /// Utility parameters; the swept field is overridden per point.
    pub params: UtilityParams,
    /// Number of seed replicates `H`.
    pub replicates: usize,
    pub base_seed: u64,
    pub max_iter: usize,
    pub sweep: Option<Sweep>,
    /// Draw a fresh friendship factorisation for every sweep point instead
    /// of once per replicate.
    pub repermute_network: bool,
}

/// Fully resolved parameters of one sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointParams {
    pub index: usize,
    pub value: f64,
    pub k: usize,
    pub params: UtilityParams,
}

impl ExperimentSpec {
    pub fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.grid_side)
    }

    pub fn num_agents(&self) -> usize {
        self.reds + self.blues
    }

    /// The axis and values actually run; without a sweep, a single point at the current `x`.
    pub fn effective_sweep(&self) -> Sweep {
        self.sweep.clone().unwrap_or(Sweep {
            axis: SweepAxis::X,
            values: vec![self.params.x],
        })
    }

    pub fn points(&self) -> Result<Vec<PointParams>> {
        let sweep = self.effective_sweep();
        sweep
            .values
            .iter()
            .enumerate()
            .map(|(index, &value)| {
                let mut params = self.params;
                let mut k = self.k;
                match sweep.axis {
                    SweepAxis::X => params.x = value,
                    SweepAxis::Beta => params.beta = value,
                    SweepAxis::K => {
                        if value < 0.0 || value.fract() != 0.0 {
                            return Err(Error::config(format!(
                                "k sweep values must be non-negative integers, got {value}"
                            )));
                        }
                        k = value as usize;
                    }
                }
                Ok(PointParams {
                    index,
                    value,
                    k,
                    params,
                })
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.grid().map_err(|e| Error::config(e.to_string()))?;
        if self.num_agents() >= grid.num_cells() {
            return Err(Error::config(format!(
                "{} agents need fewer than {} cells",
                self.num_agents(),
                grid.num_cells()
            )));
        }
        if self.replicates == 0 {
            return Err(Error::config("replicates (H) must be at least 1"));
        }
        if self.max_iter == 0 {
            return Err(Error::config("max_iter must be at least 1"));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(Error::config("sweep has no values"));
            }
        }
        for point in self.points()? {
            point.params.validate()?;
            if point.k > 0 {
                if point.k >= self.num_agents() {
                    return Err(Error::config(format!(
                        "degree k = {} needs more than {} agents",
                        point.k,
                        self.num_agents()
                    )));
                }
                if !self.num_agents().is_multiple_of(2) {
                    return Err(Error::config(format!(
                        "k-regular friendship graphs need an even population, got {}",
                        self.num_agents()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn placement_seed(&self, h: usize) -> u64 {
        derive_seed(self.base_seed, Stream::Placement, h as u64, 0)
    }

    pub fn friendship_seed(&self, h: usize, point: usize) -> u64 {
        let salt = if self.repermute_network {
            point as u64 + 1
        } else {
            0
        };
        derive_seed(self.base_seed, Stream::Friendship, h as u64, salt)
    }

    pub fn run_seed(&self, h: usize) -> u64 {
        derive_seed(self.base_seed, Stream::TieBreak, h as u64, 0)
    }

    /// Initial configuration and friendship graph of replicate `h` at `point`.
    pub fn replicate_inputs(
        &self,
        point: &PointParams,
        h: usize,
    ) -> Result<(Configuration, FriendshipGraph)> {
        let config =
            init_configuration(self.placement_seed(h), self.grid()?, self.reds, self.blues)?;
        let graph = friendship_graph(
            self.friendship_seed(h, point.index),
            point.k,
            self.num_agents(),
        )?;
        Ok((config, graph))
    }

    /// Run replicate `h` at `point` to completion.
    pub fn run_replicate(
        &self,
        point: &PointParams,
        h: usize,
    ) -> Result<(RunOutcome, FriendshipGraph)> {
        let (config, graph) = self.replicate_inputs(point, h)?;
        let outcome = dynamics::run(
            config,
            &graph,
            point.params,
            self.max_iter,
            self.run_seed(h),
        )?;
        Ok((outcome, graph))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub k: usize,
    pub params: UtilityParams,
    /// Per-replicate records in replicate order.
    pub records: Vec<OutcomeRecord>,
    pub mean: OutcomeSummary,
    pub sd: OutcomeSummary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub name: String,
    pub axis: SweepAxis,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    /// The point whose sweep value equals `value`.
    pub fn point(&self, value: f64) -> Option<&SweepPoint> {
        self.points.iter().find(|p| p.value == value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

/// Run every `(sweep point, replicate)` job and aggregate per point.
pub fn run_experiment(spec: &ExperimentSpec, execution: Execution) -> Result<SweepResult> {
    spec.validate()?;
    let points = spec.points()?;
    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (1..=spec.replicates).map(move |h| (p, h)))
        .collect();
    let run_job = |&(p, h): &(usize, usize)| -> Result<OutcomeRecord> {
        let point = &points[p];
        let (outcome, graph) = spec.run_replicate(point, h)?;
        OutcomeRecord::from_run(h, &outcome, &graph, &point.params)
    };
    let records: Vec<OutcomeRecord> = match execution {
        Execution::Serial => jobs.iter().map(run_job).collect::<Result<_>>()?,
        Execution::Parallel => jobs.par_iter().map(run_job).collect::<Result<_>>()?,
    };

    let mut out = Vec::with_capacity(points.len());
    for (point, chunk) in points.iter().zip(records.chunks(spec.replicates)) {
        let (mean, sd) = aggregate(chunk)?;
        out.push(SweepPoint {
            value: point.value,
            k: point.k,
            params: point.params,
            records: chunk.to_vec(),
            mean,
            sd,
        });
    }
    Ok(SweepResult {
        name: spec.name.clone(),
        axis: spec.effective_sweep().axis,
        points: out,
    })
}

/// Side length, population and replicate count shared by all presets.
pub const PRESET_GRID_SIDE: usize = 10;
pub const PRESET_REDS: usize = 37;
pub const PRESET_BLUES: usize = 37;
pub const PRESET_REPLICATES: usize = 100;
pub const DEFAULT_BASE_SEED: u64 = 20_190_101;

/// Names accepted by [`preset`], in documentation order.
pub const PRESET_NAMES: [&str; 21] = [
    "baseline",
    "cost-fixed-fair",
    "cost-var-fair",
    "cost-fixed-low",
    "cost-var-low",
    "cost-fixed-high",
    "cost-var-high",
    "threshold-fixed-fair",
    "threshold-var-fair",
    "threshold-fixed-low",
    "threshold-var-low",
    "threshold-fixed-high",
    "threshold-var-high",
    "net-nocost",
    "net-cost-fixed",
    "net-cost-var",
    "net-cost-fixed-low",
    "net-cost-var-low",
    "net-cost-fixed-high",
    "net-cost-var-high",
    "degree-sweep",
];

fn cost_from(kind: &str) -> Option<MovingCost> {
    match kind {
        "fixed" => Some(MovingCost::Fixed),
        "var" => Some(MovingCost::Variable),
        _ => None,
    }
}

fn c_bar_from(level: &str) -> Option<f64> {
    match level {
        "low" => Some(0.01),
        "fair" => Some(0.5),
        "high" => Some(0.99),
        _ => None,
    }
}

/// Named experiment reproducing one of the reference parameter studies.
///
/// * `baseline`: no costs, no friends (`β = α = 1`), sweep `x`.
/// * `cost-{fixed,var}-{low,fair,high}`: `x = 1`, `α = 1`, `c̄ ∈ {0.01, 0.5, 0.99}`, sweep `β`.
/// * `threshold-{fixed,var}-{low,fair,high}`: `β = 0.5`, `α = 1`, `k = 0`, sweep `x`.
/// * `net-nocost`: `β = 1`, `α = 0.5`, `k = 3`, sweep `x`.
/// * `net-cost-{fixed,var}[-low|-high]`: `β = 0.5`, `α = 0.5`, `k = 3`, sweep `x`
///   (`c̄ = 0.5` unless suffixed).
/// * `degree-sweep`: `x = 1`, `β = 1`, `α = 0.5`, sweep `k` over `0..=73`.
///
/// All use a 10×10 torus, 37 red and 37 blue agents and 100 replicates.
pub fn preset(name: &str) -> Result<ExperimentSpec> {
    let unknown = || Error::UnknownPreset {
        name: name.to_string(),
        available: PRESET_NAMES.join(", "),
    };
    let grid = TorusGrid::new(PRESET_GRID_SIDE)?;
    let mut spec = ExperimentSpec {
        name: name.to_string(),
        grid_side: PRESET_GRID_SIDE,
        reds: PRESET_REDS,
        blues: PRESET_BLUES,
        k: 0,
        params: UtilityParams {
            x: 1.0,
            alpha: 1.0,
            beta: 1.0,
            cost: MovingCost::Fixed,
            c_bar: 0.5,
            color_variant: ColorVariant::ThresholdSaturating,
        },
        replicates: PRESET_REPLICATES,
        base_seed: DEFAULT_BASE_SEED,
        max_iter: dynamics::default_max_iter(&grid),
        sweep: None,
        repermute_network: false,
    };
    let x_sweep = Some(Sweep {
        axis: SweepAxis::X,
        values: default_unit_grid(),
    });
    let parts: Vec<&str> = name.split('-').collect();
    match parts.as_slice() {
        ["baseline"] => {
            spec.sweep = x_sweep;
        }
        ["cost", kind, level] => {
            spec.params.cost = cost_from(kind).ok_or_else(unknown)?;
            spec.params.c_bar = c_bar_from(level).ok_or_else(unknown)?;
            spec.sweep = Some(Sweep {
                axis: SweepAxis::Beta,
                values: default_unit_grid(),
            });
        }
        ["threshold", kind, level] => {
            spec.params.cost = cost_from(kind).ok_or_else(unknown)?;
            spec.params.c_bar = c_bar_from(level).ok_or_else(unknown)?;
            spec.params.beta = 0.5;
            spec.sweep = x_sweep;
        }
        ["net", "nocost"] => {
            spec.params.alpha = 0.5;
            spec.k = 3;
            spec.sweep = x_sweep;
        }
        ["net", "cost", kind, rest @ ..] => {
            let level = match rest {
                [] => "fair",
                ["low"] => "low",
                ["high"] => "high",
                _ => return Err(unknown()),
            };
            spec.params.cost = cost_from(kind).ok_or_else(unknown)?;
            spec.params.c_bar = c_bar_from(level).ok_or_else(unknown)?;
            spec.params.beta = 0.5;
            spec.params.alpha = 0.5;
            spec.k = 3;
            spec.sweep = x_sweep;
        }
        ["degree", "sweep"] => {
            spec.params.alpha = 0.5;
            spec.sweep = Some(Sweep {
                axis: SweepAxis::K,
                values: (0..spec.num_agents()).map(|k| k as f64).collect(),
            });
        }
        _ => return Err(unknown()),
    }
    Ok(spec)
}
