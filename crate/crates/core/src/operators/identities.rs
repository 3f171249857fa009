//! The thirteen algebraic identities tying the coin, the evolution, the
//! boundaries and the discriminant together.
//!
//! Dense operators are probed with the identity matrix, so a residual is the
//! exact max-entry difference between both sides. Sparse operators are
//! probed with seeded random unit vectors.

use serde::Serialize;

use super::WalkOperators;
use crate::linalg::CMatrix;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub tolerance: f64,
    /// `"exact"` for dense storage, `"random-<n>"` for sparse.
    pub probe: String,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().fold(0.0, |m, c| m.max(c.residual))
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

pub const IDENTITY_NAMES: [&str; 13] = [
    "C dA* = dA*",
    "dA C = dA",
    "C dB* = 2 dA* T - dB*",
    "dB C = 2 T dA - dB",
    "U dA* = dB*",
    "U dB* = 2 dB* T - dA*",
    "dA U dA* = T",
    "dB U dB* = T",
    "dB U dA* = I",
    "T = dA S dA* = dA dB* = dB dA*",
    "dA* T dA = PiA U PiA",
    "dB* T dB = PiB U PiB",
    "PiA S = S PiB",
];

pub fn identity_suite(ops: &WalkOperators, tolerance: f64) -> IdentityReport {
    let pk = ops.probe_k();
    let ph = ops.probe_h();
    let (da, db, s, c, u, t) = (
        ops.boundary_a(),
        ops.boundary_b(),
        ops.shift(),
        ops.coin(),
        ops.evolution(),
        ops.discriminant(),
    );
    let da_star = |x: &CMatrix| da.apply_adjoint_block(x);
    let db_star = |x: &CMatrix| db.apply_adjoint_block(x);
    let pi_a = |x: &CMatrix| da_star(&da.apply_block(x));
    let pi_b = |x: &CMatrix| db_star(&db.apply_block(x));

    let da_k = da_star(&pk);
    let db_k = db_star(&pk);
    let t_k = t.apply_block(&pk);

    let sides: [Vec<(CMatrix, CMatrix)>; 13] = [
        vec![(c.apply_block(&da_k), da_k.clone())],
        vec![(da.apply_block(&c.apply_block(&ph)), da.apply_block(&ph))],
        vec![(c.apply_block(&db_k), &da_star(&t_k).scale_real(2.0) - &db_k)],
        vec![(
            db.apply_block(&c.apply_block(&ph)),
            &t.apply_block(&da.apply_block(&ph)).scale_real(2.0) - &db.apply_block(&ph),
        )],
        vec![(u.apply_block(&da_k), db_k.clone())],
        vec![(u.apply_block(&db_k), &db_star(&t_k).scale_real(2.0) - &da_k)],
        vec![(da.apply_block(&u.apply_block(&da_k)), t_k.clone())],
        vec![(db.apply_block(&u.apply_block(&db_k)), t_k.clone())],
        vec![(db.apply_block(&u.apply_block(&da_k)), pk.clone())],
        vec![
            (t_k.clone(), da.apply_block(&s.apply_block(&da_k))),
            (t_k.clone(), da.apply_block(&db_k)),
            (t_k.clone(), db.apply_block(&da_k)),
        ],
        vec![(
            da_star(&t.apply_block(&da.apply_block(&ph))),
            pi_a(&u.apply_block(&pi_a(&ph))),
        )],
        vec![(
            db_star(&t.apply_block(&db.apply_block(&ph))),
            pi_b(&u.apply_block(&pi_b(&ph))),
        )],
        vec![(pi_a(&s.apply_block(&ph)), s.apply_block(&pi_b(&ph)))],
    ];

    let checks = IDENTITY_NAMES
        .iter()
        .zip(sides)
        .map(|(&name, pairs)| {
            let residual = pairs.iter().map(|(l, r)| l.max_abs_diff(r)).fold(0.0, f64::max);
            IdentityCheck {
                name,
                residual,
                pass: residual <= tolerance,
            }
        })
        .collect();
    IdentityReport {
        tolerance,
        probe: if ops.is_sparse() {
            format!("random-{}", pk.cols())
        } else {
            "exact".into()
        },
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_cycle, build_random_weighted, RandomGraphOptions};
    use crate::linalg::C64;
    use crate::operators::BuildOptions;

    #[test]
    fn all_hold_on_weighted_graph() {
        let g = build_random_weighted(RandomGraphOptions {
            vertices: 9,
            edge_probability: 0.5,
            seed: 11,
            complex_weights: true,
            random_theta: true,
        })
        .unwrap();
        for limit in [usize::MAX, 0] {
            let opts = BuildOptions {
                dense_limit: limit,
                ..BuildOptions::default()
            };
            let ops = WalkOperators::from_graph(&g, &opts).unwrap();
            let report = identity_suite(&ops, 1e-10);
            assert!(report.pass(), "{report:?}");
            assert_eq!(report.checks.len(), 13);
        }
    }

    #[test]
    fn corruption_is_caught() {
        let mut ops = WalkOperators::from_graph(&build_cycle(4).unwrap(), &BuildOptions::default()).unwrap();
        ops.corrupt_evolution(0, 1, C64::new(1e-3, 0.0));
        let report = identity_suite(&ops, 1e-10);
        let fifth = &report.checks[4];
        assert_eq!(fifth.name, "U dA* = dB*");
        assert!(!fifth.pass);
        assert!(fifth.residual > 1e-4);
        // Identities not involving U are untouched.
        assert!(report.checks[0].pass && report.checks[12].pass);
    }
}
