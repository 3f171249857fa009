//! Named collections of graph specs used for batch verification.

use crate::error::{Error, Result};
use crate::graph::{GraphSpec, RandomGraphOptions};
use crate::operators::Profile;

pub const BATTERY_NAMES: [&str; 2] = ["acceptance", "small"];

pub fn battery(name: &str) -> Result<Vec<GraphSpec>> {
    match name {
        "acceptance" => Ok(acceptance_battery()),
        "small" => Ok(small_battery()),
        _ => Err(Error::invalid(format!(
            "unknown battery '{name}' (known: {})",
            BATTERY_NAMES.join(", ")
        ))),
    }
}

/// Deterministic families plus 50 seeded random graphs on 4 to 12
/// vertices, cycling through real/complex weights and zero/random 1-forms.
pub fn acceptance_battery() -> Vec<GraphSpec> {
    let mut specs = Vec::new();
    specs.extend((3..=8).map(|n| GraphSpec::Cycle { n }));
    specs.push(GraphSpec::Torus { d: 2, side: 3 });
    specs.extend((3..=6).map(|n| GraphSpec::Complete { n }));
    specs.extend((1..=3).map(|depth| GraphSpec::Tree { d: 3, depth }));
    specs.extend((0..=3).map(|level| GraphSpec::SierpinskiDouble { d: 2, level }));
    specs.push(GraphSpec::PartitionOfUnity {
        grid_points: 16,
        profile: Profile::QuarterCosine,
    });
    specs.extend(random_graphs(50));
    specs
}

pub fn random_graphs(count: usize) -> Vec<GraphSpec> {
    const PROBABILITIES: [f64; 4] = [0.3, 0.45, 0.6, 0.8];
    (0..count)
        .map(|i| {
            GraphSpec::Random(RandomGraphOptions {
                vertices: 4 + i % 9,
                edge_probability: PROBABILITIES[i % PROBABILITIES.len()],
                seed: 1000 + i as u64,
                complex_weights: i % 2 == 1,
                random_theta: (i / 2) % 2 == 1,
            })
        })
        .collect()
}

fn small_battery() -> Vec<GraphSpec> {
    vec![
        GraphSpec::Cycle { n: 5 },
        GraphSpec::Torus { d: 2, side: 3 },
        GraphSpec::Complete { n: 4 },
        GraphSpec::SierpinskiPre { d: 2, level: 1 },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn acceptance_battery_composition() {
        let b = acceptance_battery();
        assert_eq!(b.len(), 6 + 1 + 4 + 3 + 4 + 1 + 50);
        let random: Vec<_> = b
            .iter()
            .filter_map(|s| match s {
                GraphSpec::Random(o) => Some(*o),
                _ => None,
            })
            .collect();
        assert!(random.iter().all(|o| (4..=12).contains(&o.vertices)));
        for (c, t) in [(false, false), (false, true), (true, false), (true, true)] {
            assert!(random.iter().any(|o| o.complex_weights == c && o.random_theta == t));
        }
    }
}
