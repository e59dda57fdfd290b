//! TOML run configuration.
//!
//! ```toml
//! name = "my-run"            # optional, defaults to the file stem
//!
//! [grid]
//! n = 10
//!
//! [population]
//! reds = 37
//! blues = 37
//!
//! [network]
//! k = 3
//! repermute_per_point = false
//!
//! [utility]
//! x = 0.5
//! alpha = 0.5
//! beta = 1.0
//! gamma = 1                  # 1 = fixed cost, 0 = variable cost
//! c_bar = 0.5
//! color_variant = "threshold_saturating"
//!
//! [process]
//! max_iter = 1000
//! replicates = 100           # alias: H
//! base_seed = 20190101
//!
//! [sweep]
//! axis = "x"                 # x | beta | k
//! values = [0.0, 0.5, 1.0]
//!
//! [output]
//! directory = "out"
//! formats = ["csv", "svg"]
//! ```
//!
//! Unknown keys are rejected. Missing keys fall back to the defaults of the
//! reference setup and are logged.

use std::path::{Path, PathBuf};

use log::info;
use serde::Deserialize;

use crate::dynamics::default_max_iter;
use crate::error::{Error, Result};
use crate::geometry::TorusGrid;
use crate::harness::{
    ExperimentSpec, Sweep, SweepAxis, DEFAULT_BASE_SEED, PRESET_BLUES, PRESET_GRID_SIDE,
    PRESET_REDS, PRESET_REPLICATES,
};
use crate::utility::{ColorVariant, MovingCost, UtilityParams};

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub name: Option<String>,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub population: PopulationSection,
    #[serde(default)]
    pub network: NetworkSection,
    #[serde(default)]
    pub utility: UtilitySection,
    #[serde(default)]
    pub process: ProcessSection,
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PopulationSection {
    pub reds: Option<usize>,
    pub blues: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub k: Option<usize>,
    pub repermute_per_point: Option<bool>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct UtilitySection {
    pub x: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<u8>,
    pub c_bar: Option<f64>,
    pub color_variant: Option<ColorVariant>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProcessSection {
    pub max_iter: Option<usize>,
    #[serde(alias = "H")]
    pub replicates: Option<usize>,
    pub base_seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Svg,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub directory: Option<PathBuf>,
    pub formats: Option<Vec<OutputFormat>>,
}

impl OutputSection {
    pub fn wants(&self, format: OutputFormat) -> bool {
        self.formats.as_ref().is_none_or(|f| f.contains(&format))
    }
}

fn or_default<T: std::fmt::Debug>(value: Option<T>, key: &str, default: T) -> T {
    value.unwrap_or_else(|| {
        info!("config: `{key}` not set, using {default:?}");
        default
    })
}

impl RunConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let place = e.span().map(|span| {
                let before = &text[..span.start];
                let line = before.matches('\n').count() + 1;
                let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
                format!("line {line}, column {col}: ")
            });
            Error::config(format!("{}{}", place.unwrap_or_default(), e.message()))
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Resolve defaults and build a validated experiment; `fallback_name` is
    /// used when the file has no `name`.
    pub fn to_spec(&self, fallback_name: &str) -> Result<ExperimentSpec> {
        let u = &self.utility;
        let gamma = or_default(u.gamma, "utility.gamma", 1);
        let params = UtilityParams {
            x: or_default(u.x, "utility.x", 1.0),
            alpha: or_default(u.alpha, "utility.alpha", 1.0),
            beta: or_default(u.beta, "utility.beta", 1.0),
            cost: MovingCost::from_gamma(gamma)?,
            c_bar: or_default(u.c_bar, "utility.c_bar", 0.5),
            color_variant: or_default(
                u.color_variant,
                "utility.color_variant",
                ColorVariant::default(),
            ),
        };
        let n = or_default(self.grid.n, "grid.n", PRESET_GRID_SIDE);
        let grid = TorusGrid::new(n).map_err(|e| Error::config(e.to_string()))?;
        let sweep = self
            .sweep
            .as_ref()
            .map(|s| -> Result<Sweep> {
                Ok(Sweep {
                    axis: s.axis.parse()?,
                    values: s.values.clone(),
                })
            })
            .transpose()?;
        let spec = ExperimentSpec {
            name: self
                .name
                .clone()
                .unwrap_or_else(|| fallback_name.to_string()),
            grid_side: n,
            reds: or_default(self.population.reds, "population.reds", PRESET_REDS),
            blues: or_default(self.population.blues, "population.blues", PRESET_BLUES),
            k: or_default(self.network.k, "network.k", 0),
            params,
            replicates: or_default(
                self.process.replicates,
                "process.replicates",
                PRESET_REPLICATES,
            ),
            base_seed: or_default(
                self.process.base_seed,
                "process.base_seed",
                DEFAULT_BASE_SEED,
            ),
            max_iter: or_default(
                self.process.max_iter,
                "process.max_iter",
                default_max_iter(&grid),
            ),
            sweep,
            repermute_network: or_default(
                self.network.repermute_per_point,
                "network.repermute_per_point",
                false,
            ),
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn float_list(values: &[f64]) -> String {
    let items: Vec<String> = values.iter().map(|v| format!("{v:?}")).collect();
    format!("[{}]", items.join(", "))
}

/// A fully annotated config file reproducing `spec`.
pub fn to_annotated_toml(spec: &ExperimentSpec, description: &str) -> String {
    let p = &spec.params;
    let mut out = String::new();
    for line in description.lines() {
        out.push_str(&format!("# {line}\n").replace("# \n", "#\n"));
    }
    out.push_str(&format!("name = {:?}\n\n", spec.name));
    out.push_str("[grid]\n");
    out.push_str(&format!(
        "# Side of the square torus; the grid has n*n cells.\nn = {}\n\n",
        spec.grid_side
    ));
    out.push_str("[population]\n");
    out.push_str(&format!("reds = {}\nblues = {}\n\n", spec.reds, spec.blues));
    out.push_str("[network]\n");
    out.push_str(&format!(
        "# Common friendship degree (ignored when the sweep axis is k).\nk = {}\n",
        spec.k
    ));
    out.push_str(&format!(
        "# Draw a new friendship factorisation at every sweep point instead of once per replicate.\nrepermute_per_point = {}\n\n",
        spec.repermute_network
    ));
    out.push_str("[utility]\n");
    out.push_str(&format!(
        "# Schelling threshold: own-color share needed to be satisfied.\nx = {:?}\n",
        p.x
    ));
    out.push_str(&format!(
        "# Weight of color vs friends within the location utility.\nalpha = {:?}\n",
        p.alpha
    ));
    out.push_str(&format!(
        "# Weight of location vs moving cost.\nbeta = {:?}\n",
        p.beta
    ));
    out.push_str(&format!(
        "# 1 = fixed moving cost, 0 = cost proportional to distance.\ngamma = {}\n",
        p.cost.gamma()
    ));
    out.push_str(&format!("c_bar = {:?}\n", p.c_bar));
    out.push_str(&format!(
        "# threshold_saturating | literal_strict | literal_non_strict\ncolor_variant = {:?}\n\n",
        p.color_variant.as_str()
    ));
    out.push_str("[process]\n");
    out.push_str(&format!(
        "# Relocation cap per run.\nmax_iter = {}\n",
        spec.max_iter
    ));
    out.push_str(&format!(
        "# Seed replicates per sweep point (H).\nreplicates = {}\n",
        spec.replicates
    ));
    out.push_str(&format!("base_seed = {}\n", spec.base_seed));
    if let Some(sweep) = &spec.sweep {
        out.push_str("\n[sweep]\n");
        out.push_str(&format!(
            "# x | beta | k\naxis = {:?}\n",
            sweep.axis.as_str()
        ));
        out.push_str(&format!("values = {}\n", float_list(&sweep.values)));
    }
    out.push_str("\n[output]\nformats = [\"csv\", \"svg\"]\n");
    out
}

/// One-paragraph description of a preset, used as the header of its config file.
pub fn preset_description(name: &str) -> String {
    let spec = match crate::harness::preset(name) {
        Ok(s) => s,
        Err(_) => return String::new(),
    };
    let p = spec.params;
    let axis = spec.sweep.as_ref().map_or(SweepAxis::X, |s| s.axis);
    format!(
        "Preset `{name}`: sweep {axis} with beta = {}, alpha = {}, gamma = {}, c_bar = {}, k = {}.\n\
         Reproduce with `schelling replicate {name}` or `schelling sweep configs/{name}.toml`.",
        p.beta,
        p.alpha,
        p.cost.gamma(),
        p.c_bar,
        spec.k,
    )
}
