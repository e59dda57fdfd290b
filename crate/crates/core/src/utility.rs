//! Agent utility: neighbourhood color composition, distance to friends and
//! moving cost, combined as
//! `β(α·U_color + (1 − α)·U_friend) + (1 − β)·U_moving`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::CellRef;
use crate::population::{AgentId, Color, Configuration, FriendshipGraph};

/// How the color utility responds to the own-color share `ξ` given the threshold `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColorVariant {
    /// `ξ · 1{ξ > x}`.
    LiteralStrict,
    /// `ξ · 1{ξ ≥ x}`.
    LiteralNonStrict,
    /// `1` once `ξ ≥ x`, otherwise `ξ`.
    #[default]
    ThresholdSaturating,
}

impl ColorVariant {
    pub const ALL: [ColorVariant; 3] = [
        ColorVariant::LiteralStrict,
        ColorVariant::LiteralNonStrict,
        ColorVariant::ThresholdSaturating,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ColorVariant::LiteralStrict => "literal_strict",
            ColorVariant::LiteralNonStrict => "literal_non_strict",
            ColorVariant::ThresholdSaturating => "threshold_saturating",
        }
    }
}

/// Whether relocating costs the same everywhere or scales with distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MovingCost {
    /// `γ = 1`: every move costs `c̄`.
    Fixed,
    /// `γ = 0`: a move costs `c̄ · d(origin, destination)`.
    Variable,
}

impl MovingCost {
    pub fn from_gamma(gamma: u8) -> Result<Self> {
        match gamma {
            1 => Ok(MovingCost::Fixed),
            0 => Ok(MovingCost::Variable),
            other => Err(Error::config(format!("gamma must be 0 or 1, got {other}"))),
        }
    }

    pub fn gamma(self) -> u8 {
        match self {
            MovingCost::Fixed => 1,
            MovingCost::Variable => 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityParams {
    /// Schelling threshold.
    pub x: f64,
    /// Share of the location weight given to color rather than friends.
    pub alpha: f64,
    /// Share of the total weight given to location rather than moving cost.
    pub beta: f64,
    pub cost: MovingCost,
    pub c_bar: f64,
    pub color_variant: ColorVariant,
}

impl Default for UtilityParams {
    fn default() -> Self {
        UtilityParams {
            x: 0.5,
            alpha: 1.0,
            beta: 1.0,
            cost: MovingCost::Fixed,
            c_bar: 0.5,
            color_variant: ColorVariant::ThresholdSaturating,
        }
    }
}

/// Component weights `(α_c, α_f, α_d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub color: f64,
    pub friend: f64,
    pub moving: f64,
}

impl UtilityParams {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must lie in [0, 1], got {v}")))
            }
        };
        unit("x", self.x)?;
        unit("alpha", self.alpha)?;
        unit("beta", self.beta)?;
        if !(self.c_bar > 0.0 && self.c_bar < 1.0) {
            return Err(Error::config(format!(
                "c_bar must lie in (0, 1), got {}",
                self.c_bar
            )));
        }
        Ok(())
    }

    pub fn weights(&self) -> Weights {
        Weights {
            color: self.beta * self.alpha,
            friend: self.beta * (1.0 - self.alpha),
            moving: 1.0 - self.beta,
        }
    }
}

/// Shares of red (`ξ^A`) and blue (`ξ^B`) agents among the 8 Moore neighbours.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborhoodColorShares {
    pub red: f64,
    pub blue: f64,
}

impl NeighborhoodColorShares {
    pub fn of(&self, color: Color) -> f64 {
        match color {
            Color::Red => self.red,
            Color::Blue => self.blue,
        }
    }
}

/// Count colored neighbours of `cell`, ignoring `excluding` wherever it sits.
/// Empty cells count towards the denominator of 8.
pub fn color_fractions(
    config: &Configuration,
    cell: CellRef,
    excluding: Option<AgentId>,
) -> NeighborhoodColorShares {
    let (mut red, mut blue) = (0u32, 0u32);
    for nb in config.grid().moore_neighborhood(cell) {
        match config.occupant(nb) {
            Some(a) if Some(a) != excluding => match config.color(a) {
                Color::Red => red += 1,
                Color::Blue => blue += 1,
            },
            _ => {}
        }
    }
    NeighborhoodColorShares {
        red: f64::from(red) / 8.0,
        blue: f64::from(blue) / 8.0,
    }
}

/// Color utility for own-color share `share` under threshold `x`.
pub fn color_utility_from_share(share: f64, x: f64, variant: ColorVariant) -> f64 {
    match variant {
        ColorVariant::LiteralStrict => {
            if share > x {
                share
            } else {
                0.0
            }
        }
        ColorVariant::LiteralNonStrict => {
            if share >= x {
                share
            } else {
                0.0
            }
        }
        ColorVariant::ThresholdSaturating => {
            if share >= x {
                1.0
            } else {
                share
            }
        }
    }
}

/// Color utility of `agent` if it lived at `cell`.
pub fn color_utility(
    agent: AgentId,
    cell: CellRef,
    config: &Configuration,
    params: &UtilityParams,
) -> f64 {
    let share = color_fractions(config, cell, Some(agent)).of(config.color(agent));
    color_utility_from_share(share, params.x, params.color_variant)
}

/// `1 − Δ`, where `Δ` is the mean normalised distance from `cell` to the
/// agent's friends at their current cells. Agents without friends get 1.
pub fn friend_utility(
    agent: AgentId,
    cell: CellRef,
    config: &Configuration,
    graph: &FriendshipGraph,
) -> f64 {
    let friends = graph.friends(agent);
    if friends.is_empty() {
        return 1.0;
    }
    let grid = config.grid();
    // Integer step sums keep equal distances bit-identical across cells.
    let steps: usize = friends
        .iter()
        .map(|&j| grid.torus_steps(config.cell_of(j), cell))
        .sum();
    1.0 - steps as f64 / (friends.len() * grid.distance_norm()) as f64
}

/// Utility left after paying for a move to `cell`; staying put is free.
pub fn moving_utility(
    agent: AgentId,
    cell: CellRef,
    config: &Configuration,
    params: &UtilityParams,
) -> f64 {
    let origin = config.cell_of(agent);
    if cell == origin {
        return 1.0;
    }
    match params.cost {
        MovingCost::Fixed => 1.0 - params.c_bar,
        MovingCost::Variable => 1.0 - params.c_bar * config.grid().torus_distance(origin, cell),
    }
}

/// Raw component utilities and their weighted contributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityBreakdown {
    pub color: f64,
    pub friend: f64,
    pub moving: f64,
    /// `βα · U_color`.
    pub color_part: f64,
    /// `β(1 − α) · U_friend`.
    pub friend_part: f64,
    /// `(1 − β) · U_moving`.
    pub moving_part: f64,
    pub total: f64,
}

pub fn total_utility(
    agent: AgentId,
    cell: CellRef,
    config: &Configuration,
    graph: &FriendshipGraph,
    params: &UtilityParams,
) -> UtilityBreakdown {
    let w = params.weights();
    let color = color_utility(agent, cell, config, params);
    let friend = if w.friend == 0.0 {
        // Unweighted; skip the O(k) distance sum.
        1.0
    } else {
        friend_utility(agent, cell, config, graph)
    };
    let moving = moving_utility(agent, cell, config, params);
    combine(color, friend, moving, params)
}

/// Combine raw component utilities with the weights of `params`.
pub fn combine(color: f64, friend: f64, moving: f64, params: &UtilityParams) -> UtilityBreakdown {
    let w = params.weights();
    let color_part = w.color * color;
    let friend_part = w.friend * friend;
    let moving_part = w.moving * moving;
    UtilityBreakdown {
        color,
        friend,
        moving,
        color_part,
        friend_part,
        moving_part,
        total: params.beta * (params.alpha * color + (1.0 - params.alpha) * friend)
            + (1.0 - params.beta) * moving,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TorusGrid;
    use proptest::prelude::*;

    fn grid() -> TorusGrid {
        TorusGrid::new(10).unwrap()
    }

    /// Agent 1 (red) at (5,5) with the given neighbour colors filling the
    /// Moore ring in order; `None` leaves the cell empty.
    fn ring(colors: &[Option<Color>]) -> Configuration {
        let g = grid();
        let centre = g.cell(5, 5).unwrap();
        let mut placements = vec![(Color::Red, centre)];
        for (nb, c) in g.moore_neighborhood(centre).into_iter().zip(colors) {
            if let Some(c) = c {
                placements.push((*c, nb));
            }
        }
        Configuration::from_placements(g, &placements).unwrap()
    }

    fn agent(i: usize) -> AgentId {
        AgentId::new(i).unwrap()
    }

    #[test]
    fn six_reds_two_empty() {
        let r = Some(Color::Red);
        let c = ring(&[r, r, r, r, r, r, None, None]);
        let s = color_fractions(&c, c.cell_of(agent(1)), Some(agent(1)));
        assert_eq!(s.red, 0.75);
        assert_eq!(s.blue, 0.0);
    }

    #[test]
    fn four_blue_one_red_three_empty() {
        let (r, b) = (Some(Color::Red), Some(Color::Blue));
        let c = ring(&[b, b, b, b, r, None, None, None]);
        let s = color_fractions(&c, c.cell_of(agent(1)), Some(agent(1)));
        assert_eq!(s.red, 0.125);
        assert_eq!(s.blue, 0.5);
    }

    #[test]
    fn empty_neighborhood() {
        let c = ring(&[]);
        let s = color_fractions(&c, c.cell_of(agent(1)), None);
        assert_eq!((s.red, s.blue), (0.0, 0.0));
    }

    #[test]
    fn evaluating_agent_is_never_its_own_neighbor() {
        let g = grid();
        let origin = g.cell(5, 5).unwrap();
        let c = Configuration::from_placements(g, &[(Color::Red, origin)]).unwrap();
        let next_door = g.cell(5, 6).unwrap();
        assert_eq!(color_fractions(&c, next_door, Some(agent(1))).red, 0.0);
        assert_eq!(color_fractions(&c, next_door, None).red, 0.125);
    }

    #[test]
    fn color_variants() {
        use ColorVariant::*;
        for k in 0..=8 {
            let share = k as f64 / 8.0;
            assert_eq!(
                color_utility_from_share(share, 0.0, ThresholdSaturating),
                1.0
            );
        }
        assert_eq!(
            color_utility_from_share(0.25, 0.5, ThresholdSaturating),
            0.25
        );
        assert_eq!(color_utility_from_share(0.25, 0.5, LiteralStrict), 0.0);
        assert_eq!(color_utility_from_share(0.25, 0.5, LiteralNonStrict), 0.0);
        assert_eq!(
            color_utility_from_share(0.75, 1.0, ThresholdSaturating),
            0.75
        );
        assert_eq!(color_utility_from_share(0.5, 0.5, LiteralStrict), 0.0);
        assert_eq!(color_utility_from_share(0.5, 0.5, LiteralNonStrict), 0.5);
        assert_eq!(color_utility_from_share(1.0, 1.0, LiteralStrict), 0.0);
    }

    #[test]
    fn color_utility_is_monotone_in_share() {
        for variant in ColorVariant::ALL {
            for xi in 0..=100 {
                let x = xi as f64 / 100.0;
                let mut prev = f64::NEG_INFINITY;
                for k in 0..=8 {
                    let u = color_utility_from_share(k as f64 / 8.0, x, variant);
                    assert!((0.0..=1.0).contains(&u));
                    assert!(u >= prev, "{variant:?} x={x} k={k}");
                    prev = u;
                }
            }
        }
    }

    #[test]
    fn friend_utility_examples() {
        let g = grid();
        // Agent 1 at (1,1); friends 2 at (1,3) [2 steps] and 3 at (1,5) [4 steps].
        let c = Configuration::from_placements(
            g,
            &[
                (Color::Red, g.cell(1, 1).unwrap()),
                (Color::Blue, g.cell(1, 3).unwrap()),
                (Color::Blue, g.cell(1, 5).unwrap()),
                (Color::Red, g.cell(9, 9).unwrap()),
            ],
        )
        .unwrap();
        let graph = FriendshipGraph::from_edges(
            4,
            &[
                (agent(1), agent(2)),
                (agent(1), agent(3)),
                (agent(2), agent(4)),
                (agent(3), agent(4)),
            ],
        )
        .unwrap();
        let u = friend_utility(agent(1), g.cell(1, 1).unwrap(), &c, &graph);
        assert!((u - 0.7).abs() < 1e-15, "{u}");
        // Candidate (1,4) is adjacent to both friends.
        let u = friend_utility(agent(1), g.cell(1, 4).unwrap(), &c, &graph);
        assert!((u - 0.9).abs() < 1e-15, "{u}");
        assert_eq!(
            friend_utility(
                agent(1),
                g.cell(1, 1).unwrap(),
                &c,
                &FriendshipGraph::empty(4)
            ),
            1.0
        );
    }

    #[test]
    fn moving_utility_branches() {
        let g = grid();
        let origin = g.cell(1, 1).unwrap();
        let c = Configuration::from_placements(g, &[(Color::Red, origin)]).unwrap();
        let fixed = UtilityParams {
            cost: MovingCost::Fixed,
            c_bar: 0.5,
            ..UtilityParams::default()
        };
        let variable = UtilityParams {
            cost: MovingCost::Variable,
            ..fixed
        };
        assert_eq!(moving_utility(agent(1), origin, &c, &fixed), 1.0);
        assert_eq!(moving_utility(agent(1), origin, &c, &variable), 1.0);
        for cell in g.cells().filter(|&v| v != origin) {
            assert_eq!(moving_utility(agent(1), cell, &c, &fixed), 0.5);
        }
        let two_steps = g.cell(1, 3).unwrap();
        assert!((moving_utility(agent(1), two_steps, &c, &variable) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn weights_at_fair_settings() {
        let p = UtilityParams {
            alpha: 0.5,
            beta: 0.5,
            ..UtilityParams::default()
        };
        let w = p.weights();
        assert_eq!((w.color, w.friend, w.moving), (0.25, 0.25, 0.5));
    }

    #[test]
    fn baseline_weights_collapse_to_color() {
        let p = UtilityParams::default();
        let b = combine(0.375, 0.2, 0.5, &p);
        assert_eq!(b.total, 0.375);
        assert_eq!(
            combine(
                1.0,
                1.0,
                1.0,
                &UtilityParams {
                    alpha: 0.3,
                    beta: 0.6,
                    ..p
                }
            )
            .total,
            1.0
        );
    }

    #[test]
    fn validate_rejects_out_of_range() {
        let ok = UtilityParams::default();
        ok.validate().unwrap();
        assert!(UtilityParams { x: 1.1, ..ok }.validate().is_err());
        assert!(UtilityParams { alpha: -0.1, ..ok }.validate().is_err());
        assert!(UtilityParams { c_bar: 1.0, ..ok }.validate().is_err());
        assert!(UtilityParams { c_bar: 0.0, ..ok }.validate().is_err());
        assert!(MovingCost::from_gamma(2).is_err());
    }

    proptest! {
        #[test]
        fn breakdown_sums_to_total(
            color in 0.0f64..=1.0, friend in 0.0f64..=1.0, moving in 0.0f64..=1.0,
            alpha in 0.0f64..=1.0, beta in 0.0f64..=1.0,
        ) {
            let p = UtilityParams { alpha, beta, ..UtilityParams::default() };
            let b = combine(color, friend, moving, &p);
            let w = p.weights();
            prop_assert!((w.color + w.friend + w.moving - 1.0).abs() < 1e-12);
            prop_assert!(w.color >= 0.0 && w.friend >= 0.0 && w.moving >= 0.0);
            prop_assert!((b.color_part + b.friend_part + b.moving_part - b.total).abs() < 1e-12);
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&b.total));
        }

        #[test]
        fn friend_utility_drops_when_a_friend_moves_away(seed in 0u64..200) {
            let g = grid();
            let c = crate::population::init_configuration(seed, g, 37, 37).unwrap();
            let graph = crate::population::friendship_graph(seed, 3, 74).unwrap();
            let me = agent(1);
            let here = c.cell_of(me);
            let base = friend_utility(me, here, &c, &graph);
            prop_assert!((0.0..=1.0).contains(&base));
            // Move one friend to the empty cell farthest from `here`, if farther.
            let friend = graph.friends(me)[0];
            let old = g.torus_steps(c.cell_of(friend), here);
            let far = c.empty_cells().max_by_key(|&v| (g.torus_steps(v, here), std::cmp::Reverse(v))).unwrap();
            if g.torus_steps(far, here) > old {
                let mut moved = c.clone();
                moved.relocate(friend, far).unwrap();
                prop_assert!(friend_utility(me, here, &moved, &graph) < base);
            }
        }
    }
}
