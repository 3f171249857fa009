//! Limiting spectral set of the doubled Sierpiński lattice, generated as
//! iterated preimages of `ρ(x) = -2d x² + (d + 3) x`, and comparison with
//! the discriminant spectrum of finite levels.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::build_sierpinski_double;
use crate::linalg::{C64, ONE};
use crate::operators::{BuildOptions, WalkOperators};
use crate::spectral::{eig_hermitian, ensure_dense_feasible, joukowsky_inverse};

const DISCRIMINANT_SLACK: f64 = 1e-12;
const DEDUP_TOL: f64 = 1e-12;
const RANGE_SLACK: f64 = 1e-12;
/// Preimage trees double per level; deeper requests are refused.
pub const MAX_DEPTH: usize = 22;
pub const CLOSURE_TOL: f64 = 1e-9;

pub fn rho(d: usize, x: f64) -> f64 {
    let d = d as f64;
    -2.0 * d * x * x + (d + 3.0) * x
}

/// Real solutions of `ρ(x) = y`, ascending. Uses the cancellation-free
/// form `2y / ((d+3) + √D)` for the smaller root.
pub fn rho_preimages(d: usize, y: f64) -> Vec<f64> {
    let df = d as f64;
    let b = df + 3.0;
    let disc = b * b - 8.0 * df * y;
    if disc < -DISCRIMINANT_SLACK {
        return Vec::new();
    }
    if disc.abs() <= DISCRIMINANT_SLACK {
        return vec![b / (4.0 * df)];
    }
    let q = b + disc.sqrt();
    let large = q / (4.0 * df);
    let small = 2.0 * y / q;
    vec![small, large]
}

pub fn seeds(d: usize) -> [f64; 2] {
    let df = d as f64;
    [(df + 1.0) / (2.0 * df), (df + 3.0) / (2.0 * df)]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralPoint {
    pub value: f64,
    /// Index into the seeds, or `None` for the isolated point `-1/d`.
    pub seed: Option<usize>,
    /// Number of preimage steps from the seed.
    pub level: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralSet {
    pub d: usize,
    pub depth: usize,
    pub seeds: [f64; 2],
    pub includes_minus_inverse_d: bool,
    /// Sorted ascending, deduplicated.
    pub points: Vec<SpectralPoint>,
}

impl SpectralSet {
    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `2 (2^{depth+1} - 1) + 1`.
    pub fn size_bound(&self) -> usize {
        2 * ((1usize << (self.depth + 1)) - 1) + 1
    }

    /// Distance from `x` to the nearest point of the set.
    pub fn distance_to(&self, x: f64) -> f64 {
        nearest(&self.values(), x).1
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# d={} depth={} seeds={:?},{:?}",
            self.d, self.depth, self.seeds[0], self.seeds[1]
        );
        let _ = writeln!(out, "value,seed,level");
        for p in &self.points {
            let seed = p.seed.map_or("isolated".to_string(), |s| s.to_string());
            let _ = writeln!(out, "{:?},{seed},{}", p.value, p.level);
        }
        out
    }
}

pub fn generate_spectral_set(d: usize, depth: usize) -> Result<SpectralSet> {
    if d < 2 {
        return Err(Error::invalid(format!("sierpinski dimension must be >= 2, got {d}")));
    }
    if depth > MAX_DEPTH {
        return Err(Error::invalid(format!(
            "preimage depth {depth} exceeds the limit {MAX_DEPTH}"
        )));
    }
    let seeds = seeds(d);
    let mut raw: Vec<SpectralPoint> = Vec::new();
    for (s, &seed) in seeds.iter().enumerate() {
        // Out-of-range preimages stay in the frontier: they can have
        // in-range preimages.
        let mut frontier = vec![seed];
        for level in 0..=depth {
            if level > 0 {
                frontier = frontier.iter().flat_map(|&z| rho_preimages(d, z)).collect();
            }
            raw.extend(frontier.iter().map(|&z| SpectralPoint {
                value: 1.0 - z,
                seed: Some(s),
                level,
            }));
        }
    }
    raw.retain(|p| p.value.abs() <= 1.0 + RANGE_SLACK);
    raw.push(SpectralPoint {
        value: -1.0 / d as f64,
        seed: None,
        level: 0,
    });
    raw.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.level.cmp(&b.level)));
    let mut points: Vec<SpectralPoint> = Vec::with_capacity(raw.len());
    for p in raw {
        match points.last_mut() {
            Some(last) if p.value - last.value <= DEDUP_TOL => {
                if p.level < last.level {
                    *last = p;
                }
            }
            _ => points.push(p),
        }
    }
    Ok(SpectralSet {
        d,
        depth,
        seeds,
        includes_minus_inverse_d: true,
        points,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosureReport {
    pub checked: usize,
    /// Worst over points of the best `|ρ^j(1 - x) - seed|`, `1 <= j <= level`.
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Forward iteration sends `1 - x` back to a seed for every point of
/// level at least one.
pub fn verify_closure(set: &SpectralSet, tolerance: f64) -> ClosureReport {
    let mut max_error: f64 = 0.0;
    let mut checked = 0;
    for p in set.points.iter().filter(|p| p.seed.is_some() && p.level > 0) {
        let mut z = 1.0 - p.value;
        let mut best = f64::INFINITY;
        for _ in 0..p.level {
            z = rho(set.d, z);
            for s in set.seeds {
                best = best.min((z - s).abs());
            }
        }
        max_error = max_error.max(best);
        checked += 1;
    }
    ClosureReport {
        checked,
        max_error,
        tolerance,
        pass: max_error <= tolerance,
    }
}

/// Unit-circle preimages of every point (upper branch first), followed by
/// `+1` and `-1`, which carry unbounded multiplicity on the infinite
/// lattice.
pub fn map_to_unitary_spectrum(set: &SpectralSet) -> Vec<C64> {
    let mut out = Vec::with_capacity(2 * set.len() + 2);
    for p in &set.points {
        let (up, down) = joukowsky_inverse(p.value).expect("spectral set points lie in [-1, 1]");
        out.push(up);
        out.push(down);
    }
    out.push(ONE);
    out.push(-ONE);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EigenDistance {
    pub eigenvalue: f64,
    pub nearest: f64,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverageReport {
    pub d: usize,
    pub level: usize,
    pub depth: usize,
    pub epsilon: f64,
    pub set_size: usize,
    pub covered_fraction: f64,
    pub worst_distance: f64,
    pub mean_distance: f64,
    pub eigenvalues: Vec<EigenDistance>,
}

/// Eigenvalues of the discriminant of the doubled level-`level` lattice,
/// ascending.
pub fn finite_level_spectrum(d: usize, level: usize) -> Result<Vec<f64>> {
    let g = build_sierpinski_double(d, level)?;
    ensure_dense_feasible(g.vertex_count(), "finite-level comparison")?;
    let ops = WalkOperators::from_graph(&g, &BuildOptions::default())?;
    Ok(eig_hermitian(&ops.discriminant().to_dense())?.values)
}

pub fn compare_finite_level(d: usize, level: usize, depth: usize, epsilon: f64) -> Result<CoverageReport> {
    let eig = finite_level_spectrum(d, level)?;
    coverage(d, level, depth, epsilon, &eig)
}

fn coverage(d: usize, level: usize, depth: usize, epsilon: f64, eig: &[f64]) -> Result<CoverageReport> {
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::invalid(format!("epsilon must be non-negative, got {epsilon}")));
    }
    let set = generate_spectral_set(d, depth)?;
    let mut targets = set.values();
    targets.push(1.0);
    targets.sort_by(f64::total_cmp);
    let eigenvalues: Vec<EigenDistance> = eig
        .iter()
        .map(|&x| {
            let (nearest, distance) = nearest(&targets, x);
            EigenDistance {
                eigenvalue: x,
                nearest,
                distance,
            }
        })
        .collect();
    let n = eigenvalues.len().max(1) as f64;
    Ok(CoverageReport {
        d,
        level,
        depth,
        epsilon,
        set_size: set.len(),
        covered_fraction: eigenvalues.iter().filter(|e| e.distance <= epsilon).count() as f64 / n,
        worst_distance: eigenvalues.iter().fold(0.0, |m, e| m.max(e.distance)),
        mean_distance: eigenvalues.iter().map(|e| e.distance).sum::<f64>() / n,
        eigenvalues,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepReport {
    pub reports: Vec<CoverageReport>,
    /// Per level: worst distance never increases as the depth grows.
    pub worst_non_increasing: Vec<(usize, bool)>,
}

/// Coverage for every (level, depth) pair; each level is diagonalized once.
pub fn coverage_sweep(d: usize, levels: &[usize], depths: &[usize], epsilon: f64) -> Result<SweepReport> {
    let mut depths = depths.to_vec();
    depths.sort_unstable();
    let mut reports = Vec::new();
    let mut worst_non_increasing = Vec::new();
    for &level in levels {
        let eig = finite_level_spectrum(d, level)?;
        let start = reports.len();
        for &depth in &depths {
            reports.push(coverage(d, level, depth, epsilon, &eig)?);
        }
        let monotone = reports[start..]
            .windows(2)
            .all(|w: &[CoverageReport]| w[1].worst_distance <= w[0].worst_distance);
        worst_non_increasing.push((level, monotone));
    }
    Ok(SweepReport {
        reports,
        worst_non_increasing,
    })
}

/// Nearest element of a sorted slice and its distance.
fn nearest(sorted: &[f64], x: f64) -> (f64, f64) {
    let i = sorted.partition_point(|&v| v < x);
    [i.checked_sub(1), (i < sorted.len()).then_some(i)]
        .into_iter()
        .flatten()
        .map(|j| (sorted[j], (sorted[j] - x).abs()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((f64::NAN, f64::INFINITY))
}
