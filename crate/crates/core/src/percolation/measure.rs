use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::rng::TileStream;
use crate::dynamics::Configuration;
use crate::error::{Error, Result};
use crate::graph::AdjacencyGraph;

/// Initial-configuration measures.
///
/// `NeighbourhoodMax(q)` draws iid Bernoulli(q) seeds `y` and sets `x_t` to the
/// maximum of `y` over `t` and its edge neighbours: a monotone factor of iid
/// seeds, hence positively correlated, 3-Markov and non-vanishing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MeasureSpec {
    Bernoulli { p: f64 },
    NeighbourhoodMax { q: f64 },
}

impl MeasureSpec {
    pub fn param(&self) -> f64 {
        match *self {
            MeasureSpec::Bernoulli { p } => p,
            MeasureSpec::NeighbourhoodMax { q } => q,
        }
    }

    pub fn with_param(&self, v: f64) -> Self {
        match self {
            MeasureSpec::Bernoulli { .. } => MeasureSpec::Bernoulli { p: v },
            MeasureSpec::NeighbourhoodMax { .. } => MeasureSpec::NeighbourhoodMax { q: v },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.param();
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidInput(format!("measure parameter {v} outside [0, 1]")));
        }
        Ok(())
    }

    /// Configuration from per-tile uniforms `u` (one per tile, in id order).
    pub fn from_uniforms(&self, graph: &AdjacencyGraph, u: &[f64]) -> Vec<u8> {
        match *self {
            MeasureSpec::Bernoulli { p } => u.iter().map(|&x| (x < p) as u8).collect(),
            MeasureSpec::NeighbourhoodMax { q } => {
                let seed: Vec<bool> = u.iter().map(|&x| x < q).collect();
                (0..graph.len() as u32)
                    .map(|t| (seed[t as usize] || graph.neighbours(t).iter().any(|n| seed[n.tile as usize])) as u8)
                    .collect()
            }
        }
    }

    /// Value at `t` alone, reading only the uniforms it depends on.
    pub fn value_at(&self, graph: &AdjacencyGraph, stream: &mut TileStream, t: u32) -> bool {
        match *self {
            MeasureSpec::Bernoulli { p } => stream.at(t as u64) < p,
            MeasureSpec::NeighbourhoodMax { q } => {
                stream.at(t as u64) < q || graph.neighbours(t).iter().any(|n| stream.at(n.tile as u64) < q)
            }
        }
    }
}

impl fmt::Display for MeasureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureSpec::Bernoulli { p } => write!(f, "bernoulli:{p}"),
            MeasureSpec::NeighbourhoodMax { q } => write!(f, "neighbourhood-max:{q}"),
        }
    }
}

impl FromStr for MeasureSpec {
    type Err = Error;

    /// `bernoulli:P` or `neighbourhood-max:Q`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, v) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidInput(format!("measure `{s}`: expected KIND:VALUE")))?;
        let v: f64 = v.parse().map_err(|_| Error::InvalidInput(format!("measure `{s}`: bad number")))?;
        let m = match kind {
            "bernoulli" => MeasureSpec::Bernoulli { p: v },
            "neighbourhood-max" | "nmax" => MeasureSpec::NeighbourhoodMax { q: v },
            _ => return Err(Error::InvalidInput(format!("unknown measure `{kind}`"))),
        };
        m.validate()?;
        Ok(m)
    }
}

/// Samples every tile from `stream`.
pub fn sample(measure: &MeasureSpec, graph: &AdjacencyGraph, stream: &mut TileStream) -> Configuration {
    let u = stream.fill(graph.len());
    Configuration::new(measure.from_uniforms(graph, &u))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigrid::grid_with_hole;

    #[test]
    fn trivial_parameters() {
        let g = grid_with_hole(4).unwrap();
        let mut s = TileStream::new(1, 0, 0);
        assert_eq!(sample(&MeasureSpec::Bernoulli { p: 0.0 }, &g, &mut s).infected_count(), 0);
        assert_eq!(sample(&MeasureSpec::Bernoulli { p: 1.0 }, &g, &mut s).infected_count(), g.len());
        assert_eq!(sample(&MeasureSpec::NeighbourhoodMax { q: 0.0 }, &g, &mut s).infected_count(), 0);
    }

    #[test]
    fn value_at_matches_full_sample() {
        let g = grid_with_hole(5).unwrap();
        for m in [MeasureSpec::Bernoulli { p: 0.3 }, MeasureSpec::NeighbourhoodMax { q: 0.2 }] {
            let c = sample(&m, &g, &mut TileStream::new(5, 2, 0));
            let mut s = TileStream::new(5, 2, 0);
            for t in (0..g.len() as u32).rev() {
                assert_eq!(m.value_at(&g, &mut s, t), c.is_infected(t));
            }
        }
    }

    #[test]
    fn parse() {
        assert_eq!("bernoulli:0.25".parse::<MeasureSpec>().unwrap(), MeasureSpec::Bernoulli { p: 0.25 });
        assert_eq!("nmax:0.5".parse::<MeasureSpec>().unwrap(), MeasureSpec::NeighbourhoodMax { q: 0.5 });
        assert!("bernoulli:1.5".parse::<MeasureSpec>().is_err());
        assert!("poisson:1".parse::<MeasureSpec>().is_err());
        let m = MeasureSpec::NeighbourhoodMax { q: 0.1 };
        assert_eq!(m.to_string().parse::<MeasureSpec>().unwrap(), m);
    }
}
