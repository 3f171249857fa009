//! Time evolution `ψ_{n+1} = U ψ_n`, finding probabilities and
//! localization diagnostics.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SymmetricArcGraph;
use crate::linalg::{norm2, C64};
use crate::operators::WalkOperators;
use crate::spectral::{eig_unitary, ensure_dense_feasible};

/// Accepted deviation of `|ψ₀|` from one.
pub const NORM_TOL: f64 = 1e-9;
/// Deviation during evolution that aborts with a norm-drift error.
pub const DRIFT_LIMIT: f64 = 1e-6;
/// Default floor on the second-half return average for a localization
/// verdict. A numeric choice; the limiting criterion is only "> 0".
pub const DEFAULT_LOCALIZATION_FLOOR: f64 = 1e-3;
/// Probabilities below this do not count towards an eigenvector's support.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

/// Which endpoint of an arc collects its probability.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    #[default]
    Terminus,
    Origin,
}

impl Convention {
    fn vertex(self, graph: &SymmetricArcGraph, e: usize) -> usize {
        match self {
            Convention::Terminus => graph.arc(e).terminus,
            Convention::Origin => graph.arc(e).origin,
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Terminus => "terminus",
            Convention::Origin => "origin",
        })
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "terminus" | "t" => Ok(Convention::Terminus),
            "origin" | "o" => Ok(Convention::Origin),
            _ => Err(Error::invalid(format!("unknown convention '{s}' (terminus | origin)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WalkState {
    pub psi: Vec<C64>,
    pub step: usize,
}

impl WalkState {
    pub fn new(psi: Vec<C64>) -> Result<Self> {
        let norm = norm2(&psi);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(format!("initial state has norm {norm}, expected 1")));
        }
        Ok(WalkState { psi, step: 0 })
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.psi)
    }
}

/// Steps a state forward in place, counting multiply-adds.
pub struct Walker<'a> {
    ops: &'a WalkOperators,
    state: WalkState,
    scratch: Vec<C64>,
    operations: usize,
    max_norm_deviation: f64,
}

impl<'a> Walker<'a> {
    pub fn new(ops: &'a WalkOperators, psi0: &[C64]) -> Result<Self> {
        if psi0.len() != ops.dim_h() {
            return Err(Error::Dimension(format!(
                "state has {} entries, the arc space has {}",
                psi0.len(),
                ops.dim_h()
            )));
        }
        let state = WalkState::new(psi0.to_vec())?;
        Ok(Walker {
            ops,
            scratch: vec![C64::new(0.0, 0.0); psi0.len()],
            max_norm_deviation: (state.norm() - 1.0).abs(),
            state,
            operations: 0,
        })
    }

    pub fn step(&mut self) -> Result<()> {
        self.operations += self.ops.evolution().apply_into(&self.state.psi, &mut self.scratch);
        std::mem::swap(&mut self.state.psi, &mut self.scratch);
        self.state.step += 1;
        let norm = self.state.norm();
        let deviation = (norm - 1.0).abs();
        self.max_norm_deviation = self.max_norm_deviation.max(deviation);
        if deviation > DRIFT_LIMIT {
            return Err(Error::NormDrift {
                step: self.state.step,
                norm,
            });
        }
        Ok(())
    }

    pub fn state(&self) -> &WalkState {
        &self.state
    }

    pub fn operations(&self) -> usize {
        self.operations
    }

    pub fn max_norm_deviation(&self) -> f64 {
        self.max_norm_deviation
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    /// Step 0, every `thin`-th step, and the final step.
    pub states: Vec<WalkState>,
    pub operations: usize,
    pub max_norm_deviation: f64,
}

/// Runs `steps` applications of `U`, recording every `thin`-th state
/// (`thin = 1` keeps all).
pub fn evolve(ops: &WalkOperators, psi0: &[C64], steps: usize, thin: usize) -> Result<Trajectory> {
    if thin == 0 {
        return Err(Error::invalid("thinning interval must be at least 1"));
    }
    let mut walker = Walker::new(ops, psi0)?;
    let mut states = vec![walker.state().clone()];
    for n in 1..=steps {
        walker.step()?;
        if n % thin == 0 || n == steps {
            states.push(walker.state().clone());
        }
    }
    Ok(Trajectory {
        states,
        operations: walker.operations(),
        max_norm_deviation: walker.max_norm_deviation(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FindingDistribution {
    pub convention: Convention,
    pub probabilities: Vec<f64>,
}

impl FindingDistribution {
    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

pub fn finding_distribution(graph: &SymmetricArcGraph, psi: &[C64], convention: Convention) -> FindingDistribution {
    let mut probabilities = vec![0.0; graph.vertex_count()];
    for (e, a) in psi.iter().enumerate() {
        probabilities[convention.vertex(graph, e)] += a.norm_sqr();
    }
    FindingDistribution {
        convention,
        probabilities,
    }
}

/// Probability of finding the walker at `vertex`.
pub fn vertex_probability(graph: &SymmetricArcGraph, psi: &[C64], vertex: usize, convention: Convention) -> f64 {
    psi.iter()
        .enumerate()
        .filter(|&(e, _)| convention.vertex(graph, e) == vertex)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// A state on a single arc.
pub fn arc_state(ops: &WalkOperators, arc: usize) -> Result<Vec<C64>> {
    if arc >= ops.dim_h() {
        return Err(Error::invalid(format!("arc {arc} out of range (arcs {})", ops.dim_h())));
    }
    let mut psi = vec![C64::new(0.0, 0.0); ops.dim_h()];
    psi[arc] = C64::new(1.0, 0.0);
    Ok(psi)
}

/// Equal amplitudes on the arcs that the convention assigns to `vertex`,
/// so the walker starts there with probability one.
pub fn local_state(graph: &SymmetricArcGraph, vertex: usize, convention: Convention) -> Result<Vec<C64>> {
    let arcs = local_arcs(graph, vertex, convention)?;
    let amp = C64::new(1.0 / (arcs.len() as f64).sqrt(), 0.0);
    let mut psi = vec![C64::new(0.0, 0.0); graph.arc_count()];
    for e in arcs {
        psi[e] = amp;
    }
    Ok(psi)
}

/// A seeded random vertex with random complex amplitudes on its arcs.
pub fn random_local_state(graph: &SymmetricArcGraph, seed: u64, convention: Convention) -> Result<(usize, Vec<C64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertex = rng.random_range(0..graph.vertex_count());
    let arcs = local_arcs(graph, vertex, convention)?;
    let mut psi = vec![C64::new(0.0, 0.0); graph.arc_count()];
    for &e in &arcs {
        psi[e] = C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
    }
    let norm = norm2(&psi);
    for a in &mut psi {
        *a /= norm;
    }
    Ok((vertex, psi))
}

fn local_arcs(graph: &SymmetricArcGraph, vertex: usize, convention: Convention) -> Result<Vec<usize>> {
    if vertex >= graph.vertex_count() {
        return Err(Error::invalid(format!(
            "vertex {vertex} out of range (vertices {})",
            graph.vertex_count()
        )));
    }
    Ok((0..graph.arc_count())
        .filter(|&e| convention.vertex(graph, e) == vertex)
        .collect())
}

/// Vertex with the largest initial probability, lowest index on ties.
pub fn start_vertex(graph: &SymmetricArcGraph, psi0: &[C64], convention: Convention) -> usize {
    let mu = finding_distribution(graph, psi0, convention).probabilities;
    let mut best = 0;
    for (v, &p) in mu.iter().enumerate() {
        if p > mu[best] {
            best = v;
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReturnAverage {
    pub vertex: usize,
    pub horizon: usize,
    pub convention: Convention,
    /// `(1/N) Σ_{n=1..N} μ_n(u)`.
    pub average: f64,
    /// Same average over `n` in `(N/2, N]`.
    pub second_half_average: f64,
    /// `μ_n(u)` for `n = 1..N`.
    pub series: Vec<f64>,
    pub max_norm_deviation: f64,
    pub operations: usize,
}

pub fn time_averaged_return(
    ops: &WalkOperators,
    graph: &SymmetricArcGraph,
    psi0: &[C64],
    vertex: usize,
    horizon: usize,
    convention: Convention,
) -> Result<ReturnAverage> {
    if horizon == 0 {
        return Err(Error::invalid("horizon must be at least 1"));
    }
    if graph.arc_count() != ops.dim_h() {
        return Err(Error::Dimension("graph and operators disagree on the arc count".into()));
    }
    if vertex >= graph.vertex_count() {
        return Err(Error::invalid(format!("vertex {vertex} out of range")));
    }
    let mut walker = Walker::new(ops, psi0)?;
    let mut series = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        walker.step()?;
        series.push(vertex_probability(graph, &walker.state().psi, vertex, convention));
    }
    let half = horizon / 2;
    let tail = &series[half..];
    Ok(ReturnAverage {
        vertex,
        horizon,
        convention,
        average: series.iter().sum::<f64>() / horizon as f64,
        second_half_average: tail.iter().sum::<f64>() / tail.len() as f64,
        max_norm_deviation: walker.max_norm_deviation(),
        operations: walker.operations(),
        series,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalizationVerdict {
    pub floor: f64,
    /// The floor is a finite-scale stand-in for "bounded away from zero".
    pub floor_is_heuristic: bool,
    pub second_half_average: f64,
    pub localized: bool,
}

pub fn localization_verdict(avg: &ReturnAverage, floor: f64) -> LocalizationVerdict {
    LocalizationVerdict {
        floor,
        floor_is_heuristic: true,
        second_half_average: avg.second_half_average,
        localized: avg.second_half_average > floor,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IprEntry {
    pub eigenvalue: C64,
    /// `Σ |ψ(e)|⁴` for a unit eigenvector.
    pub ipr: f64,
    pub support_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalizationProfile {
    pub dim_h: usize,
    /// Most concentrated first.
    pub entries: Vec<IprEntry>,
}

pub fn eigenvector_localization_profile(ops: &WalkOperators, top_k: usize) -> Result<LocalizationProfile> {
    ensure_dense_feasible(ops.dim_h(), "eigenvector localization profile")?;
    let eig = eig_unitary(&ops.evolution().to_dense())?;
    let mut entries: Vec<IprEntry> = (0..eig.values.len())
        .map(|j| {
            let v = eig.vectors.column(j);
            let norm = norm2(&v);
            let probs: Vec<f64> = v.iter().map(|a| a.norm_sqr() / (norm * norm)).collect();
            IprEntry {
                eigenvalue: eig.values[j],
                ipr: probs.iter().map(|p| p * p).sum(),
                support_size: probs.iter().filter(|&&p| p > SUPPORT_THRESHOLD).count(),
            }
        })
        .collect();
    entries.sort_by(|a, b| b.ipr.total_cmp(&a.ipr));
    entries.truncate(top_k);
    Ok(LocalizationProfile {
        dim_h: ops.dim_h(),
        entries,
    })
}
