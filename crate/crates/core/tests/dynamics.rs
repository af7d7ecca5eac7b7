mod common;

use std::sync::OnceLock;

use common::*;
use proptest::prelude::*;
use quasiperc::dynamics::{fixpoint, fixpoint_oracle, fixpoint_trace, step, BoundaryPolicy, Configuration, RuleSpec};
use quasiperc::graph::AdjacencyGraph;
use quasiperc::multigrid::{generate_fortress_grid, grid_with_hole, DirectionBasis};

struct Kind {
    name: &'static str,
    graph: AdjacencyGraph,
    rules: Vec<RuleSpec>,
}

fn kinds() -> &'static [Kind] {
    static K: OnceLock<Vec<Kind>> = OnceLock::new();
    K.get_or_init(|| {
        let plain = vec![RuleSpec::new(2), RuleSpec::new(3)];
        vec![
            Kind { name: "penrose", graph: rhombus(&DirectionBasis::penrose(), 6.0), rules: plain.clone() },
            Kind { name: "square", graph: rhombus(&DirectionBasis::square(), 6.0), rules: plain.clone() },
            Kind { name: "four", graph: rhombus(&DirectionBasis::ammann_beenker(), 6.0), rules: plain.clone() },
            Kind { name: "band", graph: band(7.0), rules: vec![RuleSpec::f3(), RuleSpec::new(2)] },
            Kind { name: "fortress-grid", graph: generate_fortress_grid(5).unwrap().0, rules: plain.clone() },
            Kind { name: "grid-hole", graph: grid_with_hole(5).unwrap(), rules: plain },
        ]
    })
}

const MAX_TILES: usize = 2048;

fn instance() -> impl Strategy<Value = (usize, Vec<f64>, f64, bool)> {
    (0..2usize, prop::collection::vec(0.0f64..1.0, MAX_TILES), 0.0f64..1.0, any::<bool>())
}

fn check_kind(k: &Kind, (rule, u, density, infected): (usize, Vec<f64>, f64, bool)) -> Result<(), TestCaseError> {
    let g = &k.graph;
    assert!(g.len() <= MAX_TILES);
    let rule = &k.rules[rule % k.rules.len()];
    let policy = if infected { BoundaryPolicy::Infected } else { BoundaryPolicy::Open };
    // low densities exercise long runs; high ones are quickly full
    let p = density * density * 0.6;
    let c = Configuration::new((0..g.len()).map(|t| (u[t] < p) as u8).collect()).with_policy(policy);

    let (fast, rounds) = fixpoint(g, &c, rule).unwrap();
    let (slow, slow_rounds) = fixpoint_oracle(g, &c, rule).unwrap();
    prop_assert_eq!(&fast, &slow, "{}: worklist and oracle differ", k.name);
    prop_assert_eq!(rounds, slow_rounds, "{}: round counts differ", k.name);

    // freezing
    prop_assert!(c.le(&step(g, &c, rule).unwrap()));
    // stable limit
    prop_assert_eq!(&step(g, &fast, rule).unwrap(), &fast);

    // coupled pair: the same uniforms at a lower density give a smaller configuration
    let smaller = Configuration::new((0..g.len()).map(|t| (u[t] < p * 0.7) as u8).collect()).with_policy(policy);
    prop_assert!(smaller.le(&c));
    prop_assert!(fixpoint(g, &smaller, rule).unwrap().0.le(&fast));

    // the trace has one frontier per round and ends at the limit
    let (traced, frontiers) = fixpoint_trace(g, &c, rule).unwrap();
    prop_assert_eq!(frontiers.len() as u32, rounds);
    prop_assert_eq!(traced, fast);
    Ok(())
}

macro_rules! kind_tests {
    ($($name:ident => $idx:expr),*) => {
        proptest! {
            #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]
            $(
                #[test]
                fn $name(inst in instance()) {
                    check_kind(&kinds()[$idx], inst)?;
                }
            )*
        }
    };
}

kind_tests! {
    penrose_dynamics => 0,
    square_dynamics => 1,
    four_direction_dynamics => 2,
    band_dynamics => 3,
    fortress_grid_dynamics => 4,
    grid_hole_dynamics => 5
}

#[test]
fn vertex_star_survives_three_neighbour_rule() {
    for (name, g) in rhombus_corpus() {
        let p = patch(&g);
        let mut checked = 0;
        for v in 0..p.vertex_count() as u32 {
            let star = g.vertex_tiles(v);
            if star.len() < 3 || star.iter().any(|&t| !g.is_interior(t)) {
                continue;
            }
            let mut c = Configuration::ones(g.len());
            for &t in star {
                c.state[t as usize] = 0;
            }
            let (limit, _) = fixpoint(&g, &c, &RuleSpec::new(3)).unwrap();
            assert!(star.iter().all(|&t| !limit.is_infected(t)), "{name}: star at vertex {v} was invaded");
            checked += 1;
            if checked == 40 {
                break;
            }
        }
        assert!(checked > 0, "{name}");
    }
}
