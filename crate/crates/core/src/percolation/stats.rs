use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::experiment::Estimate;
use super::measure::MeasureSpec;
use super::rng::{TileStream, LANE_AUX, LANE_CONFIG};
use crate::analysis::enclosing_gons;
use crate::error::{Error, Result};
use crate::graph::AdjacencyGraph;

/// Samples the measure on `tiles` only.
fn sample_on(
    graph: &AdjacencyGraph,
    measure: &MeasureSpec,
    seed: u64,
    trial: u64,
    tiles: &[u32],
) -> HashMap<u32, bool> {
    let mut s = TileStream::new(seed, trial, LANE_CONFIG);
    match *measure {
        MeasureSpec::Bernoulli { p } => tiles.iter().map(|&t| (t, s.at(t as u64) < p)).collect(),
        MeasureSpec::NeighbourhoodMax { q } => {
            let seeds: BTreeSet<u32> =
                tiles.iter().flat_map(|&t| std::iter::once(t).chain(graph.neighbours(t).iter().map(|n| n.tile))).collect();
            let y: HashMap<u32, bool> = seeds.into_iter().map(|t| (t, s.at(t as u64) < q)).collect();
            tiles
                .iter()
                .map(|&t| (t, y[&t] || graph.neighbours(t).iter().any(|n| y[&n.tile])))
                .collect()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnclosureReport {
    pub tile: u32,
    pub n: usize,
    /// Chain 2d-gons of length at most `n` around the tile.
    pub gons: usize,
    /// Samples with the tile itself healthy.
    pub trivial: Estimate,
    /// Probability that the tile is healthy or enclosed by an all-healthy gon
    /// of length at most `n`. A lower bound on the probability of enclosure by
    /// a gon of any length.
    pub enclosed: Estimate,
}

pub fn enclosure_probability(
    graph: &AdjacencyGraph,
    t: u32,
    n: usize,
    measure: &MeasureSpec,
    trials: u64,
    seed: u64,
) -> Result<EnclosureReport> {
    measure.validate()?;
    let two_d = 2 * graph.family_count();
    let gons: Vec<Vec<u32>> = enclosing_gons(graph, t, n)?
        .into_iter()
        .filter(|g| g.segment_count() <= two_d)
        .map(|g| g.tiles)
        .collect();
    let mut tiles: Vec<u32> = gons.iter().flatten().copied().chain([t]).collect();
    tiles.sort_unstable();
    tiles.dedup();
    let (trivial, enclosed) = (0..trials)
        .into_par_iter()
        .map(|i| {
            let x = sample_on(graph, measure, seed, i, &tiles);
            if !x[&t] {
                return (1u64, 1u64);
            }
            (0, gons.iter().any(|g| g.iter().all(|u| !x[u])) as u64)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(EnclosureReport {
        tile: t,
        n,
        gons: gons.len(),
        trivial: Estimate::wilson(trivial, trials),
        enclosed: Estimate::wilson(enclosed, trials),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayPoint {
    pub n: usize,
    pub trials: u64,
    pub zeros: u64,
    pub frequency: f64,
    /// Exact probability of the sampled domains, averaged over trials.
    pub expected: f64,
    /// `beta^n`.
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    /// Per-tile decay rate: `1 - p` for Bernoulli; `1 - q` for the
    /// neighbourhood maximum, whose all-zero event on `D` needs every seed in
    /// the closed neighbourhood of `D` to be zero.
    pub beta: f64,
    pub points: Vec<DecayPoint>,
    /// Least-squares fit of `ln(frequency)` against `n` over points with zeros.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    /// Chi-square of observed against expected zero counts.
    pub chi2: f64,
    pub chi2_df: usize,
    pub chi2_p_value: f64,
}

/// A random connected domain of `n` tiles, grown from a uniform start tile
/// in `starts` by adding uniformly chosen frontier tiles.
pub fn random_domain(graph: &AdjacencyGraph, starts: &[u32], n: usize, stream: &mut TileStream) -> Vec<u32> {
    if n == 0 {
        return Vec::new();
    }
    let mut k = 0u64;
    let mut draw = |len: usize| {
        let u = stream.at(k);
        k += 1;
        ((u * len as f64) as usize).min(len - 1)
    };
    let mut set = vec![starts[draw(starts.len())]];
    let mut frontier: Vec<u32> = Vec::new();
    while set.len() < n {
        frontier.clear();
        for &t in &set {
            for nb in graph.neighbours(t) {
                if !set.contains(&nb.tile) {
                    frontier.push(nb.tile);
                }
            }
        }
        frontier.sort_unstable();
        frontier.dedup();
        if frontier.is_empty() {
            break;
        }
        set.push(frontier[draw(frontier.len())]);
    }
    set
}

/// Frequencies of all-zero configurations on random connected domains of
/// each size.
pub fn zero_cylinder_decay(
    graph: &AdjacencyGraph,
    measure: &MeasureSpec,
    sizes: &[usize],
    trials: u64,
    seed: u64,
) -> Result<DecayReport> {
    measure.validate()?;
    if sizes.iter().any(|&n| n > graph.len()) {
        return Err(Error::InvalidInput("domain size exceeds the patch".into()));
    }
    // Tiles whose ball of radius n stays inside the window.
    let depth = boundary_depth(graph);
    let beta = 1.0 - measure.param();
    let mut points = Vec::new();
    for (k, &n) in sizes.iter().enumerate() {
        let starts: Vec<u32> = (0..graph.len() as u32).filter(|&t| depth[t as usize] as usize > n).collect();
        if starts.is_empty() && n > 0 {
            return Err(Error::Margin(format!("no tile has {n} tiles of room to the window edge")));
        }
        let (zeros, expected) = (0..trials)
            .into_par_iter()
            .map(|i| {
                let trial = k as u64 * trials + i;
                let domain = random_domain(graph, &starts, n, &mut TileStream::new(seed, trial, LANE_AUX));
                let x = sample_on(graph, measure, seed, trial, &domain);
                let zero = domain.iter().all(|t| !x[t]) as u64;
                (zero, exact_zero_probability(graph, measure, &domain))
            })
            .reduce(|| (0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
        points.push(DecayPoint {
            n,
            trials,
            zeros,
            frequency: zeros as f64 / trials as f64,
            expected: expected / trials as f64,
            bound: beta.powi(n as i32),
        });
    }

    let mut chi2 = 0.0;
    let mut df = 0;
    for pt in &points {
        // n p (1 - p) bounds the variance when the per-trial probabilities differ
        let e = pt.expected * pt.trials as f64;
        let var = e * (1.0 - pt.expected);
        if var > 1e-12 {
            chi2 += (pt.zeros as f64 - e).powi(2) / var;
            df += 1;
        }
    }
    let chi2_p_value = if df == 0 { 1.0 } else { ChiSquared::new(df as f64).expect("df > 0").sf(chi2) };

    let fit: Vec<(f64, f64)> =
        points.iter().filter(|p| p.zeros > 0).map(|p| (p.n as f64, p.frequency.ln())).collect();
    let (slope, intercept) = least_squares(&fit).unzip();
    Ok(DecayReport { beta, points, slope, intercept, chi2, chi2_df: df, chi2_p_value })
}

fn exact_zero_probability(graph: &AdjacencyGraph, measure: &MeasureSpec, domain: &[u32]) -> f64 {
    match *measure {
        MeasureSpec::Bernoulli { p } => (1.0 - p).powi(domain.len() as i32),
        MeasureSpec::NeighbourhoodMax { q } => {
            let closed: BTreeSet<u32> = domain
                .iter()
                .flat_map(|&t| std::iter::once(t).chain(graph.neighbours(t).iter().map(|n| n.tile)))
                .collect();
            (1.0 - q).powi(closed.len() as i32)
        }
    }
}

/// Graph distance from each tile to the nearest non-interior tile.
fn boundary_depth(graph: &AdjacencyGraph) -> Vec<u32> {
    let mut dist = vec![u32::MAX; graph.len()];
    let mut queue = std::collections::VecDeque::new();
    for t in 0..graph.len() as u32 {
        if !graph.is_interior(t) {
            dist[t as usize] = 0;
            queue.push_back(t);
        }
    }
    while let Some(t) = queue.pop_front() {
        for nb in graph.neighbours(t) {
            if dist[nb.tile as usize] == u32::MAX {
                dist[nb.tile as usize] = dist[t as usize] + 1;
                queue.push_back(nb.tile);
            }
        }
    }
    dist
}

fn least_squares(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Upward-closed events on the initial configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Event {
    AllOnes { tiles: Vec<u32> },
    AtLeast { tiles: Vec<u32>, k: usize },
}

impl Event {
    fn tiles(&self) -> &[u32] {
        match self {
            Event::AllOnes { tiles } | Event::AtLeast { tiles, .. } => tiles,
        }
    }

    fn holds(&self, x: &HashMap<u32, bool>) -> bool {
        match self {
            Event::AllOnes { tiles } => tiles.iter().all(|t| x[t]),
            Event::AtLeast { tiles, k } => tiles.iter().filter(|t| x[t]).count() >= *k,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub mu_x: f64,
    pub mu_y: f64,
    pub mu_xy: f64,
    /// `mu_xy - mu_x mu_y`.
    pub difference: f64,
    pub std_error: f64,
    pub z: f64,
    /// `z < -3`.
    pub significant_negative: bool,
}

/// Estimates `mu(X and Y) - mu(X) mu(Y)` for each event pair, with a
/// delta-method standard error.
pub fn positive_correlation_check(
    graph: &AdjacencyGraph,
    measure: &MeasureSpec,
    pairs: &[(Event, Event)],
    trials: u64,
    seed: u64,
) -> Result<Vec<CorrelationReport>> {
    measure.validate()?;
    if trials < 2 {
        return Err(Error::InvalidInput("need at least 2 trials".into()));
    }
    let mut tiles: Vec<u32> = pairs.iter().flat_map(|(a, b)| a.tiles().iter().chain(b.tiles())).copied().collect();
    tiles.sort_unstable();
    tiles.dedup();
    if tiles.iter().any(|&t| t as usize >= graph.len()) {
        return Err(Error::InvalidInput("event names an unknown tile".into()));
    }
    // per pair: (#X, #Y, #XY)
    let counts: Vec<[u64; 3]> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let x = sample_on(graph, measure, seed, i, &tiles);
            pairs
                .iter()
                .map(|(a, b)| {
                    let (ha, hb) = (a.holds(&x), b.holds(&x));
                    [ha as u64, hb as u64, (ha && hb) as u64]
                })
                .collect::<Vec<_>>()
        })
        .reduce(
            || vec![[0; 3]; pairs.len()],
            |mut a, b| {
                for (p, q) in a.iter_mut().zip(b) {
                    for k in 0..3 {
                        p[k] += q[k];
                    }
                }
                a
            },
        );
    let n = trials as f64;
    Ok(counts
        .into_iter()
        .map(|[cx, cy, cxy]| {
            let (mx, my, mxy) = (cx as f64 / n, cy as f64 / n, cxy as f64 / n);
            let difference = mxy - mx * my;
            // influence function of (X,Y) -> E[XY] - E[X]E[Y]: XY - my X - mx Y
            let (a, b) = (1.0 - my - mx, -my);
            let c = -mx;
            // outcomes: XY (both), X only, Y only, neither
            let (pxy, px, py) = (mxy, mx - mxy, my - mxy);
            let mean = a * pxy + b * px + c * py;
            let second = a * a * pxy + b * b * px + c * c * py;
            let var = (second - mean * mean).max(0.0) / n;
            let std_error = var.sqrt();
            let z = if std_error > 0.0 { difference / std_error } else { 0.0 };
            CorrelationReport { mu_x: mx, mu_y: my, mu_xy: mxy, difference, std_error, z, significant_negative: z < -3.0 }
        })
        .collect())
}
