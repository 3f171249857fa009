//! Graphs with symmetric arcs, weights and 1-forms.
//!
//! Every unoriented edge is stored as two arcs that are each other's
//! inverse. A self-loop also yields two distinct, mutually inverse arcs.

mod builders;
mod io;
mod spec;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::C64;

pub use builders::{
    build_complete, build_cycle, build_random_weighted, build_sierpinski_double, build_sierpinski_double_capped,
    build_sierpinski_pre, build_sierpinski_pre_capped, build_torus, build_truncated_tree, sierpinski_vertex_count,
    RandomGraphOptions, DEFAULT_MAX_VERTICES,
};
pub use io::{load_graph, parse_graph, save_graph, write_graph};
pub use spec::GraphSpec;

/// Invariant tolerance for weight normalization and 1-form antisymmetry.
pub const GRAPH_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Arc {
    pub origin: usize,
    pub terminus: usize,
    pub inverse: usize,
    pub weight: C64,
    /// Real phase of the 1-form, radians.
    pub theta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetricArcGraph {
    vertex_count: usize,
    arcs: Vec<Arc>,
}

impl SymmetricArcGraph {
    /// Validates every invariant before returning the graph.
    pub fn new(vertex_count: usize, arcs: Vec<Arc>) -> Result<Self> {
        let g = SymmetricArcGraph { vertex_count, arcs };
        g.validate()?;
        Ok(g)
    }

    /// Arcs `2k` and `2k + 1` come from edge `k` (`u -> v` then `v -> u`),
    /// with Grover weights `1/sqrt(deg(o(e)))` and zero 1-form.
    pub fn from_edges(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut arcs = Vec::with_capacity(2 * edges.len());
        for (k, &(u, v)) in edges.iter().enumerate() {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::invalid(format!("edge ({u}, {v}) references a missing vertex")));
            }
            for (o, t, inv) in [(u, v, 2 * k + 1), (v, u, 2 * k)] {
                arcs.push(Arc {
                    origin: o,
                    terminus: t,
                    inverse: inv,
                    weight: C64::new(0.0, 0.0),
                    theta: 0.0,
                });
            }
        }
        let mut degree = vec![0usize; vertex_count];
        for a in &arcs {
            degree[a.origin] += 1;
        }
        for a in &mut arcs {
            a.weight = C64::new(1.0 / (degree[a.origin] as f64).sqrt(), 0.0);
        }
        Self::new(vertex_count, arcs)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, e: usize) -> &Arc {
        &self.arcs[e]
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for a in &self.arcs {
            deg[a.origin] += 1;
        }
        deg
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for a in &self.arcs {
            deg[a.terminus] += 1;
        }
        deg
    }

    pub fn out_arcs(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.arcs.len()).filter(move |&e| self.arcs[e].origin == v)
    }

    pub fn in_arcs(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.arcs.len()).filter(move |&e| self.arcs[e].terminus == v)
    }

    pub fn has_self_loops(&self) -> bool {
        self.arcs.iter().any(|a| a.origin == a.terminus)
    }

    pub fn is_regular(&self) -> bool {
        let deg = self.degrees();
        deg.windows(2).all(|w| w[0] == w[1])
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.arcs.len();
        if self.vertex_count == 0 {
            return Err(violation("vertex count", "graph has no vertices".into()));
        }
        for (e, a) in self.arcs.iter().enumerate() {
            if a.origin >= self.vertex_count || a.terminus >= self.vertex_count {
                return Err(violation(
                    "arc endpoints",
                    format!("arc {e} references a missing vertex"),
                ));
            }
            if a.inverse >= m || self.arcs[a.inverse].inverse != e {
                return Err(violation("inverse involution", format!("arc {e}")));
            }
            if a.inverse == e {
                return Err(violation("inverse involution", format!("arc {e} is its own inverse")));
            }
            let inv = &self.arcs[a.inverse];
            if inv.origin != a.terminus || inv.terminus != a.origin {
                return Err(violation(
                    "inverse endpoints",
                    format!("arc {e} and its inverse {}", a.inverse),
                ));
            }
            if !a.theta.is_finite() || (inv.theta + a.theta).abs() > GRAPH_TOL {
                return Err(violation(
                    "one-form antisymmetry",
                    format!("arc {e}: theta {} vs inverse theta {}", a.theta, inv.theta),
                ));
            }
        }
        let mut mass = vec![0.0; self.vertex_count];
        let mut degree = vec![0usize; self.vertex_count];
        for a in &self.arcs {
            mass[a.origin] += a.weight.norm_sqr();
            degree[a.origin] += 1;
        }
        for v in 0..self.vertex_count {
            if degree[v] == 0 {
                return Err(violation("vertex degree", format!("vertex {v} has no outgoing arc")));
            }
            if (mass[v] - 1.0).abs() > GRAPH_TOL {
                let e = self.out_arcs(v).next().unwrap_or(0);
                return Err(violation(
                    "weight normalization",
                    format!("vertex {v} (first arc {e}): sum |w|^2 = {}", mass[v]),
                ));
            }
        }
        Ok(())
    }
}

fn violation(invariant: &'static str, detail: String) -> Error {
    Error::InvariantViolation { invariant, detail }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_loop_gives_two_inverse_arcs() {
        let g = SymmetricArcGraph::from_edges(2, &[(0, 0), (0, 1)]).unwrap();
        assert_eq!(g.arc_count(), 4);
        assert_eq!(g.arc(0).inverse, 1);
        assert_eq!(g.arc(1).inverse, 0);
        assert!(g.has_self_loops());
        assert_eq!(g.degrees(), vec![3, 1]);
    }

    #[test]
    fn broken_inverse_is_rejected() {
        let mut g = build_cycle(3).unwrap();
        g.arcs[0].inverse = 2;
        let err = g.validate().unwrap_err();
        assert!(matches!(
            err,
            Error::InvariantViolation {
                invariant: "inverse involution",
                ..
            }
        ));
    }

    #[test]
    fn out_degree_equals_in_degree() {
        let g = build_truncated_tree(3, 2).unwrap();
        assert_eq!(g.degrees(), g.in_degrees());
    }
}
