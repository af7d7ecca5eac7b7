use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use quasiperc::dynamics::{fixpoint_trace, Configuration};
use quasiperc::multigrid::io::{LoadedGraph, PatchFile};
use quasiperc::percolation::rng::{TileStream, LANE_CONFIG};
use quasiperc::percolation::{
    self, sample, Criterion, Estimate, Experiment, ExperimentSpec, GraphSpec, MeasureSpec, Summary,
};

use crate::error::{CliError, CliResult};
use crate::svg::{render, Fill, Style};
use crate::verify::{self, VerifyOptions};
use crate::{McArgs, RunArgs, SweepArgs, TileArgs, VerifyArgs};

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &impl Serialize) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn load_patch(path: &Path) -> CliResult<LoadedGraph> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(PatchFile::from_json(&text)?.build_graph()?)
}

/// `--kind` and friends as a graph description.
pub fn tile_spec(a: &TileArgs) -> CliResult<GraphSpec> {
    let radius = a.radius;
    let no_offsets = |kind: &str| match a.offsets {
        Some(_) => Err(CliError::Usage(format!("--offsets does not apply to kind {kind}"))),
        None => Ok(()),
    };
    Ok(match a.kind.as_str() {
        "penrose" => GraphSpec::Penrose { radius, offsets: a.offsets.clone() },
        "grid" => {
            no_offsets("grid")?;
            GraphSpec::Grid { radius }
        }
        "band" => {
            no_offsets("band")?;
            GraphSpec::Band { radius }
        }
        "fortress-grid" => {
            no_offsets("fortress-grid")?;
            GraphSpec::FortressGrid { half_size: a.half_size }
        }
        "grid-hole" => {
            no_offsets("grid-hole")?;
            GraphSpec::GridHole { half_size: a.half_size }
        }
        k => match k.strip_prefix("ngrid:").map(str::parse::<usize>) {
            Some(Ok(n)) => GraphSpec::NGrid { n, radius, offsets: a.offsets.clone() },
            _ => return Err(CliError::Usage(format!("unknown tiling kind `{k}`"))),
        },
    })
}

pub fn tile(a: &TileArgs) -> CliResult<()> {
    let spec = tile_spec(a)?;
    let loaded = spec.build()?;
    let file = match (&spec, loaded.graph.patch()) {
        (GraphSpec::FortressGrid { half_size }, _) => PatchFile::FortressGrid { half_size: *half_size },
        (GraphSpec::GridHole { half_size }, _) => PatchFile::GridHole { half_size: *half_size },
        (_, Some(patch)) => PatchFile::from_patch(patch),
        (_, None) => unreachable!("multigrid kinds carry a patch"),
    };
    file.save(&a.out)?;
    if let Some(svg) = &a.svg {
        write_file(svg, &render(&loaded.graph, &Fill::Shape, &Style::default())?)?;
    }
    let g = &loaded.graph;
    let interior = (0..g.len() as u32).filter(|&t| g.is_interior(t)).count();
    let info = json!({
        "kind": a.kind,
        "tiles": g.len(),
        "interior_tiles": interior,
        "integer_offset_sum": g.patch().map(|p| p.provenance().integer_offset_sum),
        "cube": loaded.cube,
        "fortress": loaded.fortress,
    });
    print!("{}", pretty(&info)?);
    Ok(())
}

#[derive(Serialize)]
struct RunRecord {
    rule: String,
    measure: String,
    seed: u64,
    trial: u32,
    tiles: usize,
    rounds: u32,
    initial_infected: usize,
    final_infected: usize,
    surviving_zeros: usize,
    infected_per_round: Vec<usize>,
    initial: String,
    #[serde(rename = "final")]
    final_state: String,
}

pub fn run(a: &RunArgs) -> CliResult<()> {
    let loaded = load_patch(&a.patch)?;
    let g = &loaded.graph;
    let start = sample(&a.measure, g, &mut TileStream::new(a.seed, a.trial as u64, LANE_CONFIG))
        .with_policy(a.boundary.into());
    let (limit, trace) = fixpoint_trace(g, &start, &a.rule)?;

    if let Some(dir) = &a.frames {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let frame = |c: &Configuration, name: &str| -> CliResult<()> {
            write_file(&dir.join(name), &render(g, &Fill::State(c), &Style::default())?)
        };
        frame(&start, "initial.svg")?;
        if a.every_round {
            let mut cur = start.clone();
            for (k, round) in trace.iter().enumerate() {
                for &t in round {
                    cur.state[t as usize] = 1;
                }
                frame(&cur, &format!("round-{:04}.svg", k + 1))?;
            }
        }
        frame(&limit, "final.svg")?;
    }

    let record = RunRecord {
        rule: a.rule.to_string(),
        measure: a.measure.to_string(),
        seed: a.seed,
        trial: a.trial,
        tiles: g.len(),
        rounds: trace.len() as u32,
        initial_infected: start.infected_count(),
        final_infected: limit.infected_count(),
        surviving_zeros: g.len() - limit.infected_count(),
        infected_per_round: trace.iter().map(Vec::len).collect(),
        initial: start.to_rle(),
        final_state: limit.to_rle(),
    };
    emit(a.out.as_deref(), &pretty(&record)?)
}

/// Loads an experiment; relative patch paths are taken from the experiment's directory.
fn load_experiment(a: &McArgs) -> CliResult<Experiment> {
    let text = std::fs::read_to_string(&a.experiment).map_err(|e| CliError::io(&a.experiment, e))?;
    let mut spec = ExperimentSpec::from_json(&text)?;
    if let GraphSpec::File { path } = &mut spec.graph {
        if path.is_relative() {
            if let Some(dir) = a.experiment.parent() {
                *path = dir.join(&*path);
            }
        }
    }
    if let Some(t) = a.trials {
        spec.trials = t;
    }
    if let Some(s) = a.seed {
        spec.seed = s;
    }
    Ok(Experiment::new(spec)?)
}

#[derive(Serialize)]
struct Reference {
    description: &'static str,
    value: f64,
    within_interval: bool,
}

/// Limiting invasion probability where it is known in closed form: under
/// Bernoulli(p), the fortress grid and the band cube are invaded exactly when
/// one of their 5 (resp. 3) tiles starts infected.
fn reference(spec: &ExperimentSpec, est: &Estimate) -> Option<Reference> {
    let MeasureSpec::Bernoulli { p } = spec.measure else { return None };
    let (description, k) = match (&spec.graph, &spec.criterion) {
        (GraphSpec::FortressGrid { .. }, Criterion::FortressAndCentralBall { .. }) => ("1 - (1 - p)^5", 5),
        (GraphSpec::Band { .. }, Criterion::Cube) => ("1 - (1 - p)^3", 3),
        _ => return None,
    };
    let value = 1.0 - (1.0 - p).powi(k);
    Some(Reference { description, value, within_interval: est.contains(value) })
}

#[derive(Serialize)]
struct Timing {
    seconds: f64,
    threads: usize,
}

#[derive(Serialize)]
struct McOutput<'a> {
    experiment: &'a ExperimentSpec,
    summary: &'a Summary,
    #[serde(skip_serializing_if = "Option::is_none")]
    reference: Option<Reference>,
    /// `[size, count]` of infected clusters at the fixpoint, over all trials.
    infected_clusters: Vec<(usize, u64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing: Option<Timing>,
}

#[derive(Serialize)]
struct McRow {
    trial: u32,
    invaded: bool,
    rounds: u32,
    initial_fraction: f64,
    final_fraction: f64,
    watched_hit: Option<bool>,
}

fn timing(start: Instant, on: bool) -> Option<Timing> {
    on.then(|| Timing { seconds: start.elapsed().as_secs_f64(), threads: rayon::current_num_threads() })
}

fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn mc(a: &McArgs) -> CliResult<()> {
    let clock = Instant::now();
    let exp = load_experiment(a)?;
    let result = percolation::monte_carlo(&exp);
    if let Some(path) = &a.csv {
        write_csv(
            path,
            result.trials.iter().map(|t| McRow {
                trial: t.trial,
                invaded: t.invaded,
                rounds: t.rounds,
                initial_fraction: t.initial_fraction,
                final_fraction: t.final_fraction,
                watched_hit: t.watched_hit,
            }),
        )?;
    }
    let mut hist: BTreeMap<usize, u64> = BTreeMap::new();
    for t in &result.trials {
        for &(size, count) in &t.infected_clusters {
            *hist.entry(size).or_default() += count as u64;
        }
    }
    let out = McOutput {
        experiment: &exp.spec,
        summary: &result.summary,
        reference: reference(&exp.spec, &result.summary.invasion),
        infected_clusters: hist.into_iter().collect(),
        timing: timing(clock, a.timing),
    };
    emit(a.summary.as_deref(), &pretty(&out)?)
}

/// `START:STOP:STEP`, inclusive of `STOP` up to rounding.
pub fn parse_range(s: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::Usage(format!("bad range `{s}`: expected START:STOP:STEP"));
    let parts: Vec<f64> = s.split(':').map(|x| x.parse().map_err(|_| bad())).collect::<CliResult<_>>()?;
    let [start, stop, step] = parts[..] else { return Err(bad()) };
    if !(step > 0.0) || stop < start {
        return Err(bad());
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| ((start + k as f64 * step) * 1e12).round() / 1e12).collect())
}

#[derive(Serialize)]
struct SweepOutput<'a> {
    experiment: &'a ExperimentSpec,
    coupled: bool,
    points: &'a [percolation::SweepPoint],
    /// Coupled sweeps only: every trial's outcome is monotone in the parameter.
    #[serde(skip_serializing_if = "Option::is_none")]
    monotone: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing: Option<Timing>,
}

pub fn sweep(a: &SweepArgs) -> CliResult<()> {
    let clock = Instant::now();
    let exp = load_experiment(&a.mc)?;
    let params = match (&a.params, &a.range) {
        (Some(p), _) => p.clone(),
        (None, Some(r)) => parse_range(r)?,
        (None, None) => return Err(CliError::Usage("give --params or --range".into())),
    };
    let coupled = !a.uncoupled;
    let s = percolation::sweep(&exp, &params, coupled)?;
    if let Some(path) = &a.mc.csv {
        write_csv(path, &s.rows)?;
    }
    let monotone = coupled.then(|| {
        s.rows.chunks(params.len()).all(|trial| {
            trial
                .windows(2)
                .all(|w| w[0].invaded <= w[1].invaded && w[0].final_fraction <= w[1].final_fraction)
        })
    });
    let out = SweepOutput {
        experiment: &exp.spec,
        coupled,
        points: &s.points,
        monotone,
        timing: timing(clock, a.mc.timing),
    };
    emit(a.mc.summary.as_deref(), &pretty(&out)?)
}

pub fn verify(a: &VerifyArgs) -> CliResult<()> {
    let loaded = load_patch(&a.patch)?;
    let cycles: Vec<Vec<u32>> = match &a.cycles {
        Some(p) => serde_json::from_str(&std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?)?,
        None => Vec::new(),
    };
    let opts = VerifyOptions {
        kmax: a.kmax,
        seed_radius: a.seed_radius,
        samples: a.samples,
        p: a.p,
        seed: a.seed,
        n_max: a.n_max,
        count_tiles: a.count_tiles,
        cycles,
    };
    let report = verify::verify(&loaded.graph, a.suite, &opts)?;
    let mut value = serde_json::to_value(&report)?;
    value["patch"] = Value::String(a.patch.display().to_string());
    emit(a.report.as_deref(), &pretty(&value)?)?;
    if report.violations > 0 {
        return Err(CliError::Verification(report.violations));
    }
    Ok(())
}
