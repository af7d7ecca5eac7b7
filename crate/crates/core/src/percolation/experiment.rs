use std::collections::BTreeMap;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::measure::MeasureSpec;
use super::rng::{TileStream, LANE_CONFIG, LANE_SWEEP};
use crate::analysis::{clusters, Connectivity};
use crate::dynamics::{fixpoint_in_place, BoundaryPolicy, Configuration, RuleSpec};
use crate::error::{Error, Result};
use crate::graph::AdjacencyGraph;
use crate::multigrid::io::{LoadedGraph, PatchFile};
use crate::multigrid::{
    generate_band_tiling, generate_fortress_grid, generate_patch, grid_with_hole, BandSpec, DirectionBasis,
    PENROSE_OFFSETS,
};

/// How to obtain the graph of an experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GraphSpec {
    Penrose {
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        offsets: Option<Vec<f64>>,
    },
    Grid {
        radius: f64,
    },
    /// `n` directions with generic offsets unless given.
    NGrid {
        n: usize,
        radius: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        offsets: Option<Vec<f64>>,
    },
    Band {
        radius: f64,
    },
    FortressGrid {
        half_size: i32,
    },
    GridHole {
        half_size: i32,
    },
    File {
        path: PathBuf,
    },
}

/// Offsets `0.1 + 0.8 * frac(j / golden ratio)`: distinct and far from
/// rational relations for small `n`.
pub fn generic_offsets(n: usize) -> Vec<f64> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    (0..n).map(|j| 0.1 + 0.8 * ((j as f64 + 1.0) * g).fract()).collect()
}

impl GraphSpec {
    pub fn basis(&self) -> Result<Option<DirectionBasis>> {
        Ok(Some(match self {
            GraphSpec::Penrose { offsets, .. } => {
                DirectionBasis::new(5, 0.0, offsets.as_deref().unwrap_or(&PENROSE_OFFSETS))?
            }
            GraphSpec::Grid { .. } => DirectionBasis::square(),
            GraphSpec::NGrid { n, offsets, .. } => {
                let gammas = offsets.clone().unwrap_or_else(|| generic_offsets(*n));
                DirectionBasis::new(*n, 0.0, &gammas)?
            }
            GraphSpec::Band { radius } => BandSpec::canonical(*radius).0,
            _ => return Ok(None),
        }))
    }

    pub fn build(&self) -> Result<LoadedGraph> {
        match self {
            GraphSpec::Penrose { radius, .. } | GraphSpec::Grid { radius } | GraphSpec::NGrid { radius, .. } => {
                let basis = self.basis()?.expect("rhombus basis");
                LoadedGraph::from_patch(generate_patch(&basis, *radius)?)
            }
            GraphSpec::Band { radius } => {
                let (basis, spec) = BandSpec::canonical(*radius);
                LoadedGraph::from_patch(generate_band_tiling(&basis, &spec)?)
            }
            GraphSpec::FortressGrid { half_size } => {
                let (graph, nodes) = generate_fortress_grid(*half_size)?;
                Ok(LoadedGraph { graph, fortress: Some(nodes), cube: None })
            }
            GraphSpec::GridHole { half_size } => {
                Ok(LoadedGraph { graph: grid_with_hole(*half_size)?, fortress: None, cube: None })
            }
            GraphSpec::File { path } => PatchFile::load(path)?.build_graph(),
        }
    }
}

/// Finite-patch stand-in for "the whole graph is invaded".
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Criterion {
    FullPatch,
    /// Every tile within `radius` of the central tile; default half the
    /// eccentricity of the central tile.
    CentralBall {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<u32>,
    },
    TargetSet {
        tiles: Vec<u32>,
    },
    /// Fortress-grid core and the central ball.
    FortressAndCentralBall {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<u32>,
    },
    /// The three cube tiles of a band tiling.
    Cube,
}

impl Default for Criterion {
    fn default() -> Self {
        Criterion::CentralBall { radius: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub graph: GraphSpec,
    pub rule: RuleSpec,
    pub measure: MeasureSpec,
    pub trials: u32,
    pub seed: u64,
    #[serde(default)]
    pub criterion: Criterion,
    #[serde(default)]
    pub boundary: BoundaryPolicy,
    /// Keep the run-length encoded final configuration of every trial.
    #[serde(default)]
    pub record_configurations: bool,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// An experiment with its graph built and criterion resolved.
pub struct Experiment {
    pub spec: ExperimentSpec,
    pub loaded: LoadedGraph,
    /// Tiles that must all be infected at the fixpoint.
    pub target: Vec<u32>,
    /// Fortress or cube tiles, when the graph has them.
    pub watched: Option<Vec<u32>>,
}

impl Experiment {
    pub fn new(spec: ExperimentSpec) -> Result<Self> {
        let loaded = spec.graph.build()?;
        Self::with_graph(spec, loaded)
    }

    pub fn with_graph(spec: ExperimentSpec, loaded: LoadedGraph) -> Result<Self> {
        if spec.trials == 0 {
            return Err(Error::InvalidInput("trials must be at least 1".into()));
        }
        spec.measure.validate()?;
        let g = &loaded.graph;
        spec.rule.validate(g)?;
        let watched = match (&loaded.fortress, &loaded.cube) {
            (Some(f), _) => Some(f.all().to_vec()),
            (None, Some(c)) => Some(c.clone()),
            _ => None,
        };
        let ball = |r: Option<u32>| {
            let c = g.central_tile();
            g.ball(c, r.unwrap_or(g.eccentricity(c) / 2))
        };
        let target = match &spec.criterion {
            Criterion::FullPatch => (0..g.len() as u32).collect(),
            Criterion::CentralBall { radius } => ball(*radius),
            Criterion::TargetSet { tiles } => {
                if tiles.is_empty() || tiles.iter().any(|&t| t as usize >= g.len()) {
                    return Err(Error::InvalidInput("target set is empty or names unknown tiles".into()));
                }
                tiles.clone()
            }
            Criterion::FortressAndCentralBall { radius } => {
                let f = loaded
                    .fortress
                    .ok_or_else(|| Error::InvalidInput("fortress criterion needs a fortress grid".into()))?;
                let mut t = ball(*radius);
                t.extend(f.all());
                t.sort_unstable();
                t.dedup();
                t
            }
            Criterion::Cube => loaded
                .cube
                .clone()
                .ok_or_else(|| Error::InvalidInput("cube criterion needs a band tiling".into()))?,
        };
        Ok(Self { spec, loaded, target, watched })
    }

    pub fn graph(&self) -> &AdjacencyGraph {
        &self.loaded.graph
    }

    fn evolve(&self, trial: u32, state: Vec<u8>) -> TrialStats {
        let g = self.graph();
        let n = g.len() as f64;
        let initial_fraction = state.iter().filter(|&&x| x != 0).count() as f64 / n;
        let watched_hit = self.watched.as_ref().map(|w| w.iter().any(|&t| state[t as usize] != 0));
        let mut state = state;
        let rounds = fixpoint_in_place(g, &mut state, self.spec.boundary, &self.spec.rule);
        let invaded = self.target.iter().all(|&t| state[t as usize] != 0);
        let config = Configuration::new(state).with_policy(self.spec.boundary);
        let mut hist: BTreeMap<usize, u32> = BTreeMap::new();
        for c in clusters(g, &config, Connectivity::Vertex) {
            *hist.entry(c.len()).or_default() += 1;
        }
        TrialStats {
            trial,
            invaded,
            rounds,
            initial_fraction,
            final_fraction: config.infected_count() as f64 / n,
            watched_hit,
            infected_clusters: hist.into_iter().collect(),
            final_configuration: self.spec.record_configurations.then(|| config.to_rle()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub trial: u32,
    pub invaded: bool,
    pub rounds: u32,
    pub initial_fraction: f64,
    pub final_fraction: f64,
    /// Whether a fortress or cube tile was infected initially.
    pub watched_hit: Option<bool>,
    /// `(size, count)` of vertex-connected infected clusters at the fixpoint.
    pub infected_clusters: Vec<(usize, u32)>,
    pub final_configuration: Option<String>,
}

/// A proportion with its 95% Wilson score interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

const Z95: f64 = 1.959_963_984_540_054;

impl Estimate {
    pub fn wilson(successes: u64, trials: u64) -> Self {
        if trials == 0 {
            return Self { successes, trials, estimate: 0.0, lower: 0.0, upper: 1.0 };
        }
        let n = trials as f64;
        let p = successes as f64 / n;
        let z2 = Z95 * Z95;
        let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
        let half = Z95 / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        Self {
            successes,
            trials,
            estimate: p,
            lower: (centre - half).clamp(0.0, p),
            upper: (centre + half).clamp(p, 1.0),
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub seed: u64,
    pub trials: u32,
    pub invasion: Estimate,
    pub mean_rounds: f64,
    pub mean_final_fraction: f64,
    /// Frequency of an initially infected fortress or cube tile.
    pub watched_hit: Option<Estimate>,
    /// `watched_hit - invasion`: the finite-size gap between the two events.
    pub correction: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarlo {
    pub summary: Summary,
    pub trials: Vec<TrialStats>,
}

/// One trial; its stream depends only on the master seed and `trial`.
pub fn run_trial(exp: &Experiment, trial: u32) -> TrialStats {
    let mut stream = TileStream::new(exp.spec.seed, trial as u64, LANE_CONFIG);
    let u = stream.fill(exp.graph().len());
    exp.evolve(trial, exp.spec.measure.from_uniforms(exp.graph(), &u))
}

pub fn monte_carlo(exp: &Experiment) -> MonteCarlo {
    let trials: Vec<TrialStats> = (0..exp.spec.trials).into_par_iter().map(|i| run_trial(exp, i)).collect();
    MonteCarlo { summary: summarize(exp.spec.seed, &trials), trials }
}

pub fn summarize(seed: u64, trials: &[TrialStats]) -> Summary {
    let n = trials.len() as u64;
    let invaded = trials.iter().filter(|t| t.invaded).count() as u64;
    let invasion = Estimate::wilson(invaded, n);
    let watched_hit = trials
        .iter()
        .map(|t| t.watched_hit)
        .collect::<Option<Vec<bool>>>()
        .filter(|v| !v.is_empty())
        .map(|v| Estimate::wilson(v.iter().filter(|&&x| x).count() as u64, n));
    let mean = |f: fn(&TrialStats) -> f64| trials.iter().map(f).sum::<f64>() / n.max(1) as f64;
    Summary {
        seed,
        trials: n as u32,
        invasion,
        mean_rounds: mean(|t| t.rounds as f64),
        mean_final_fraction: mean(|t| t.final_fraction),
        correction: watched_hit.map(|w| w.estimate - invasion.estimate),
        watched_hit,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub trial: u32,
    pub param: f64,
    pub invaded: bool,
    pub rounds: u32,
    pub final_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub param: f64,
    pub invasion: Estimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub coupled: bool,
    pub points: Vec<SweepPoint>,
    /// Trial-major, then parameter order.
    pub rows: Vec<SweepRow>,
}

/// Runs the experiment at each measure parameter in `params`.
///
/// Coupled: one uniform per tile per trial, shared by every parameter, so the
/// initial configurations (and hence the fixpoints) increase with the
/// parameter. Uncoupled: each parameter draws from its own lane.
pub fn sweep(exp: &Experiment, params: &[f64], coupled: bool) -> Result<Sweep> {
    if params.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidInput("sweep parameters must be sorted ascending".into()));
    }
    if params.len() + LANE_SWEEP as usize > u16::MAX as usize {
        return Err(Error::InvalidInput("too many sweep parameters".into()));
    }
    for &p in params {
        exp.spec.measure.with_param(p).validate()?;
    }
    let g = exp.graph();
    let rows: Vec<Vec<SweepRow>> = (0..exp.spec.trials)
        .into_par_iter()
        .map(|trial| {
            let shared = coupled.then(|| TileStream::new(exp.spec.seed, trial as u64, LANE_CONFIG).fill(g.len()));
            params
                .iter()
                .enumerate()
                .map(|(k, &p)| {
                    let u = match &shared {
                        Some(u) => u.clone(),
                        None => TileStream::new(exp.spec.seed, trial as u64, LANE_SWEEP + k as u16).fill(g.len()),
                    };
                    let s = exp.evolve(trial, exp.spec.measure.with_param(p).from_uniforms(g, &u));
                    SweepRow { trial, param: p, invaded: s.invaded, rounds: s.rounds, final_fraction: s.final_fraction }
                })
                .collect()
        })
        .collect();
    let n = exp.spec.trials as u64;
    let points = params
        .iter()
        .enumerate()
        .map(|(k, &p)| SweepPoint {
            param: p,
            invasion: Estimate::wilson(rows.iter().filter(|r| r[k].invaded).count() as u64, n),
        })
        .collect();
    Ok(Sweep { coupled, points, rows: rows.into_iter().flatten().collect() })
}
