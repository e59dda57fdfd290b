//! Independent reference implementations used by several test targets.
//! Deliberately naive: plain double loops over agent pairs, adjacency from
//! raw coordinates, no sharing of code with the library's metric module.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use schelling::geometry::TorusGrid;
use schelling::population::{AgentId, Color, Configuration};

pub struct Naive {
    pub fsi: Option<f64>,
    pub moran: Option<f64>,
    pub geary: Option<f64>,
}

fn wrapped(a: usize, b: usize, n: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(n - d)
}

/// Moore adjacency from 1-based coordinates.
pub fn touching(n: usize, (r1, c1): (usize, usize), (r2, c2): (usize, usize)) -> bool {
    (r1, c1) != (r2, c2) && wrapped(r1, r2, n) <= 1 && wrapped(c1, c2, n) <= 1
}

/// FSI, Moran's I and Geary's C straight from their defining sums;
/// `None` where the statistic is undefined.
pub fn naive_metrics(config: &Configuration) -> Naive {
    let grid = config.grid();
    let n = grid.side();
    let ids: Vec<AgentId> = config.agents().map(|a| a.id).collect();
    let coord = |a: AgentId| {
        let c = config.cell_of(a);
        (grid.row(c), grid.col(c))
    };
    let zs: Vec<f64> = ids
        .iter()
        .map(|&a| {
            if config.color(a) == Color::Red {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let m = ids.len();
    let mut w = vec![vec![0.0f64; m]; m];
    for i in 0..m {
        for j in 0..m {
            if i != j && touching(n, coord(ids[i]), coord(ids[j])) {
                w[i][j] = 1.0;
            }
        }
    }
    let s0: f64 = w.iter().flatten().sum();
    let reds = zs.iter().filter(|&&z| z == 1.0).count() as f64;
    let blues = m as f64 - reds;
    let mean = zs.iter().sum::<f64>() / m as f64;
    let var: f64 = zs.iter().map(|z| (z - mean).powi(2)).sum();

    let mut cross = 0.0;
    let mut moran_num = 0.0;
    let mut geary_num = 0.0;
    for i in 0..m {
        for j in 0..m {
            moran_num += w[i][j] * (zs[i] - mean) * (zs[j] - mean);
            geary_num += w[i][j] * (zs[i] - zs[j]).powi(2);
            if i < j && w[i][j] > 0.0 && zs[i] != zs[j] {
                cross += 1.0;
            }
        }
    }
    let both = reds > 0.0 && blues > 0.0;
    let edges = s0 / 2.0;
    let fsi = both.then(|| {
        if edges == 0.0 {
            0.0
        } else {
            let p = 2.0 * reds * blues / ((reds + blues) * (reds + blues - 1.0));
            let expected = edges * p;
            ((expected - cross) / expected).max(0.0)
        }
    });
    let defined = both && s0 > 0.0;
    Naive {
        fsi,
        moran: defined.then(|| m as f64 / s0 * moran_num / var),
        geary: defined.then(|| (m as f64 - 1.0) * geary_num / (2.0 * s0 * var)),
    }
}

/// A random placement of `agents` agents (at least one of each color) on an `n×n` torus.
pub fn random_configuration<R: Rng>(rng: &mut R, n: usize, agents: usize) -> Configuration {
    let grid = TorusGrid::new(n).unwrap();
    let mut cells: Vec<_> = grid.cells().collect();
    cells.shuffle(rng);
    let reds = rng.gen_range(1..agents);
    let placements: Vec<_> = (0..agents)
        .map(|i| (if i < reds { Color::Red } else { Color::Blue }, cells[i]))
        .collect();
    Configuration::from_placements(grid, &placements).unwrap()
}

/// Utility of `agent` if it sat at `(row, col)`, from the model's definition:
/// own-color share of the 8 surrounding cells, mean normalised torus distance
/// to friends, and the cost of leaving its current cell.
pub fn naive_utility(
    config: &Configuration,
    graph: &schelling::population::FriendshipGraph,
    params: &schelling::utility::UtilityParams,
    agent: AgentId,
    (row, col): (usize, usize),
) -> f64 {
    use schelling::utility::{ColorVariant, MovingCost};
    let grid = config.grid();
    let n = grid.side();
    let at = |a: AgentId| {
        let c = config.cell_of(a);
        (grid.row(c), grid.col(c))
    };
    let own = config.color(agent);
    let same = config
        .agents()
        .filter(|a| a.id != agent && a.color == own && touching(n, at(a.id), (row, col)))
        .count();
    let share = same as f64 / 8.0;
    let color = match params.color_variant {
        ColorVariant::ThresholdSaturating => {
            if share >= params.x {
                1.0
            } else {
                share
            }
        }
        ColorVariant::LiteralStrict => {
            if share > params.x {
                share
            } else {
                0.0
            }
        }
        ColorVariant::LiteralNonStrict => {
            if share >= params.x {
                share
            } else {
                0.0
            }
        }
    };
    let norm = if n.is_multiple_of(2) { n } else { n - 1 } as f64;
    let steps = |(r1, c1): (usize, usize), (r2, c2): (usize, usize)| {
        (wrapped(r1, r2, n) + wrapped(c1, c2, n)) as f64
    };
    let friends = graph.friends(agent);
    let friend = if friends.is_empty() {
        1.0
    } else {
        let total: f64 = friends.iter().map(|&f| steps((row, col), at(f))).sum();
        1.0 - total / (friends.len() as f64 * norm)
    };
    let here = at(agent);
    let moving = if here == (row, col) {
        1.0
    } else {
        match params.cost {
            MovingCost::Fixed => 1.0 - params.c_bar,
            MovingCost::Variable => 1.0 - params.c_bar * steps(here, (row, col)) / norm,
        }
    };
    params.beta * (params.alpha * color + (1.0 - params.alpha) * friend)
        + (1.0 - params.beta) * moving
}
