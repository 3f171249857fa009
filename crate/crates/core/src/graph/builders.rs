use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{Arc, SymmetricArcGraph};
use crate::error::{Error, Result};
use crate::linalg::C64;

/// Default vertex cap for the Sierpiński builders.
pub const DEFAULT_MAX_VERTICES: usize = 1_000_000;

pub fn build_cycle(n: usize) -> Result<SymmetricArcGraph> {
    if n < 3 {
        return Err(Error::invalid(format!("cycle needs n >= 3, got {n}")));
    }
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    SymmetricArcGraph::from_edges(n, &edges)
}

/// Periodic `side^d` lattice; vertex `x` has mixed-radix digits
/// `x = Σ c_j side^j`.
pub fn build_torus(d: usize, side: usize) -> Result<SymmetricArcGraph> {
    if d < 1 {
        return Err(Error::invalid("torus needs d >= 1"));
    }
    if side < 3 {
        return Err(Error::invalid(format!("torus needs side >= 3, got {side}")));
    }
    let n = u32::try_from(d)
        .ok()
        .and_then(|d| side.checked_pow(d))
        .ok_or_else(|| Error::ResourceLimit(format!("torus {side}^{d} overflows")))?;
    let mut edges = Vec::with_capacity(n * d);
    for x in 0..n {
        let mut stride = 1;
        for _ in 0..d {
            let digit = (x / stride) % side;
            let y = x - digit * stride + ((digit + 1) % side) * stride;
            edges.push((x, y));
            stride *= side;
        }
    }
    SymmetricArcGraph::from_edges(n, &edges)
}

pub fn build_complete(n: usize) -> Result<SymmetricArcGraph> {
    if n < 2 {
        return Err(Error::invalid(format!("complete graph needs n >= 2, got {n}")));
    }
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            edges.push((i, j));
        }
    }
    SymmetricArcGraph::from_edges(n, &edges)
}

/// Ball of radius `depth` in the `d`-regular tree, vertices in BFS order.
/// Leaves keep their truncated degree 1.
pub fn build_truncated_tree(d: usize, depth: usize) -> Result<SymmetricArcGraph> {
    if d < 2 || depth < 1 {
        return Err(Error::invalid(format!(
            "tree needs d >= 2 and depth >= 1, got d={d}, depth={depth}"
        )));
    }
    let mut edges = Vec::new();
    let mut frontier = vec![0usize];
    let mut next_id = 1usize;
    for level in 0..depth {
        let children = if level == 0 { d } else { d - 1 };
        let mut next = Vec::with_capacity(frontier.len() * children);
        for &parent in &frontier {
            for _ in 0..children {
                edges.push((parent, next_id));
                next.push(next_id);
                next_id += 1;
            }
        }
        frontier = next;
    }
    SymmetricArcGraph::from_edges(next_id, &edges)
}

/// Vertex count of the level-`level` pre-lattice:
/// `v(0) = d + 1`, `v(n) = (d + 1) v(n - 1) - d(d + 1)/2`.
pub fn sierpinski_vertex_count(d: usize, level: usize) -> Option<usize> {
    let mut v = d.checked_add(1)?;
    let shared = d.checked_mul(d + 1)? / 2;
    for _ in 0..level {
        v = v.checked_mul(d + 1)?.checked_sub(shared)?;
    }
    Some(v)
}

pub fn build_sierpinski_pre(d: usize, level: usize) -> Result<SymmetricArcGraph> {
    build_sierpinski_pre_capped(d, level, DEFAULT_MAX_VERTICES)
}

/// Level-`level` pre-lattice. Vertex coordinates are integers at
/// resolution `2^level`; vertices are numbered in lexicographic order of
/// their coordinates, so the origin is vertex 0.
pub fn build_sierpinski_pre_capped(d: usize, level: usize, max_vertices: usize) -> Result<SymmetricArcGraph> {
    let (count, edges) = sierpinski_edges(d, level, max_vertices)?;
    SymmetricArcGraph::from_edges(count, &edges)
}

pub fn build_sierpinski_double(d: usize, level: usize) -> Result<SymmetricArcGraph> {
    build_sierpinski_double_capped(d, level, DEFAULT_MAX_VERTICES)
}

/// Two pre-lattices glued at the origin. The first copy keeps its
/// numbering; the second copy's non-origin vertices follow it.
pub fn build_sierpinski_double_capped(d: usize, level: usize, max_vertices: usize) -> Result<SymmetricArcGraph> {
    let (count, edges) = sierpinski_edges(d, level, max_vertices / 2 + 1)?;
    let remap = |v: usize| if v == 0 { 0 } else { count - 1 + v };
    let mut all = edges.clone();
    all.extend(edges.iter().map(|&(u, v)| (remap(u), remap(v))));
    SymmetricArcGraph::from_edges(2 * count - 1, &all)
}

fn sierpinski_edges(d: usize, level: usize, max_vertices: usize) -> Result<(usize, Vec<(usize, usize)>)> {
    if d < 2 {
        return Err(Error::invalid(format!("sierpinski lattice needs d >= 2, got {d}")));
    }
    match sierpinski_vertex_count(d, level) {
        Some(v) if v <= max_vertices => {}
        _ => {
            return Err(Error::ResourceLimit(format!(
                "sierpinski d={d} level={level} exceeds {max_vertices} vertices"
            )))
        }
    }
    let corner = |i: usize, scale: i64| -> Vec<i64> {
        let mut c = vec![0i64; d];
        if i > 0 {
            c[i - 1] = scale;
        }
        c
    };
    let mut edges: Vec<(Vec<i64>, Vec<i64>)> = Vec::new();
    for i in 0..=d {
        for j in i + 1..=d {
            edges.push((corner(i, 1), corner(j, 1)));
        }
    }
    for n in 1..=level {
        let shift = 1i64 << (n - 1);
        let mut next = Vec::with_capacity(edges.len() * (d + 1));
        for i in 0..=d {
            let offset = corner(i, shift);
            for (a, b) in &edges {
                let add = |p: &Vec<i64>| p.iter().zip(&offset).map(|(x, y)| x + y).collect::<Vec<i64>>();
                next.push((add(a), add(b)));
            }
        }
        edges = next;
    }

    let mut index: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    for (a, b) in &edges {
        index.insert(a.clone(), 0);
        index.insert(b.clone(), 0);
    }
    for (k, slot) in index.values_mut().enumerate() {
        *slot = k;
    }
    let mut pairs: Vec<(usize, usize)> = edges
        .iter()
        .map(|(a, b)| {
            let (u, v) = (index[a], index[b]);
            (u.min(v), u.max(v))
        })
        .collect();
    pairs.sort_unstable();
    Ok((index.len(), pairs))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomGraphOptions {
    pub vertices: usize,
    pub edge_probability: f64,
    pub seed: u64,
    pub complex_weights: bool,
    pub random_theta: bool,
}

/// Erdős–Rényi graph with random weights and 1-form.
///
/// Isolated vertices are joined to a uniformly chosen other vertex. Weights
/// at each vertex are a normalized Gaussian vector over its outgoing arcs.
pub fn build_random_weighted(opts: RandomGraphOptions) -> Result<SymmetricArcGraph> {
    let n = opts.vertices;
    let p = opts.edge_probability;
    if n < 2 {
        return Err(Error::invalid(format!("random graph needs >= 2 vertices, got {n}")));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::invalid(format!("edge probability must lie in (0, 1], got {p}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut edges = Vec::new();
    let mut degree = vec![0usize; n];
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
                degree[i] += 1;
                degree[j] += 1;
            }
        }
    }
    for i in 0..n {
        if degree[i] == 0 {
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            edges.push((i.min(j), i.max(j)));
            degree[i] += 1;
            degree[j] += 1;
        }
    }
    let base = SymmetricArcGraph::from_edges(n, &edges)?;
    let mut arcs: Vec<Arc> = base.arcs().to_vec();

    for v in 0..n {
        let out: Vec<usize> = base.out_arcs(v).collect();
        let raw: Vec<C64> = out
            .iter()
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = if opts.complex_weights {
                    rng.sample(StandardNormal)
                } else {
                    0.0
                };
                C64::new(re, im)
            })
            .collect();
        let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for (&e, z) in out.iter().zip(raw) {
            arcs[e].weight = z / norm;
        }
    }
    if opts.random_theta {
        for e in 0..arcs.len() {
            let inv = arcs[e].inverse;
            if e < inv {
                let theta = PI - 2.0 * PI * rng.random::<f64>();
                arcs[e].theta = theta;
                arcs[inv].theta = -theta;
            }
        }
    }
    SymmetricArcGraph::new(n, arcs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_three() {
        let g = build_cycle(3).unwrap();
        assert_eq!((g.vertex_count(), g.arc_count()), (3, 6));
        assert!(g.arcs().iter().all(|a| (a.weight.norm_sqr() - 0.5).abs() < 1e-15));
        assert!(build_cycle(2).is_err());
    }

    #[test]
    fn cycle_inverse_is_fixed_point_free_involution() {
        let g = build_cycle(4).unwrap();
        assert_eq!(g.arc_count(), 8);
        for (e, a) in g.arcs().iter().enumerate() {
            assert_ne!(a.inverse, e);
            assert_eq!(g.arc(a.inverse).inverse, e);
        }
    }

    #[test]
    fn one_dimensional_torus_is_a_cycle() {
        assert_eq!(build_torus(1, 5).unwrap(), build_cycle(5).unwrap());
    }

    #[test]
    fn torus_counts() {
        let g = build_torus(2, 3).unwrap();
        assert_eq!((g.vertex_count(), g.arc_count()), (9, 36));
        assert!(g.degrees().iter().all(|&k| k == 4));
        assert!(matches!(build_torus(2, 2), Err(Error::InvalidParameter(_))));
        assert!(build_torus(0, 3).is_err());
    }

    #[test]
    fn tree_counts() {
        let g = build_truncated_tree(3, 1).unwrap();
        assert_eq!((g.vertex_count(), g.arc_count()), (4, 6));
        assert_eq!(build_truncated_tree(3, 2).unwrap().vertex_count(), 1 + 3 + 6);
        assert!(build_truncated_tree(1, 2).is_err());
        assert!(build_truncated_tree(3, 0).is_err());
    }

    #[test]
    fn binary_tree_is_a_path() {
        for k in 1..5 {
            let g = build_truncated_tree(2, k).unwrap();
            assert_eq!(g.vertex_count(), 2 * k + 1);
            let deg = g.degrees();
            assert_eq!(deg.iter().filter(|&&x| x == 1).count(), 2);
            assert_eq!(deg.iter().filter(|&&x| x == 2).count(), 2 * k - 1);
        }
    }

    /// Independent enumeration: apply the maps x -> x + 2^(n-1) e_i to the
    /// vertex sets directly (no edges) and count distinct points.
    fn vertex_oracle(d: usize, level: usize) -> usize {
        let mut pts: std::collections::BTreeSet<Vec<i64>> = std::collections::BTreeSet::new();
        pts.insert(vec![0; d]);
        for i in 0..d {
            let mut e = vec![0; d];
            e[i] = 1;
            pts.insert(e);
        }
        for n in 1..=level {
            let s = 1i64 << (n - 1);
            let mut next = pts.clone();
            for i in 0..d {
                for p in &pts {
                    let mut q = p.clone();
                    q[i] += s;
                    next.insert(q);
                }
            }
            pts = next;
        }
        pts.len()
    }

    #[test]
    fn sierpinski_counts_match_enumeration() {
        for level in 0..5 {
            let g = build_sierpinski_pre(2, level).unwrap();
            let expected = 3 * (3usize.pow(level as u32) + 1) / 2;
            assert_eq!(g.vertex_count(), expected);
            assert_eq!(g.vertex_count(), vertex_oracle(2, level));
            assert_eq!(g.arc_count(), 2 * 3 * 3usize.pow(level as u32));
        }
        for level in 0..3 {
            assert_eq!(
                build_sierpinski_pre(3, level).unwrap().vertex_count(),
                vertex_oracle(3, level)
            );
        }
        let g = build_sierpinski_pre(2, 1).unwrap();
        assert_eq!((g.vertex_count(), g.arc_count()), (6, 18));
    }

    #[test]
    fn sierpinski_degrees() {
        let g = build_sierpinski_pre(2, 3).unwrap();
        let deg = g.degrees();
        assert_eq!(deg.iter().filter(|&&k| k == 2).count(), 3);
        assert!(deg.iter().all(|&k| k == 2 || k == 4));
        assert_eq!(deg[0], 2);
    }

    #[test]
    fn sierpinski_double_glues_origin() {
        let g0 = build_sierpinski_double(2, 0).unwrap();
        assert_eq!(g0.vertex_count(), 5);
        let g1 = build_sierpinski_double(2, 1).unwrap();
        assert_eq!(g1.vertex_count(), 11);
        assert_eq!(g1.arc_count(), 2 * build_sierpinski_pre(2, 1).unwrap().arc_count());
        assert_eq!(g1.degrees()[0], 4);
    }

    #[test]
    fn sierpinski_resource_limit() {
        assert!(matches!(
            build_sierpinski_pre_capped(2, 10, 1000),
            Err(Error::ResourceLimit(_))
        ));
        assert!(build_sierpinski_pre(1, 2).is_err());
    }

    fn opts(seed: u64) -> RandomGraphOptions {
        RandomGraphOptions {
            vertices: 5,
            edge_probability: 1.0,
            seed,
            complex_weights: true,
            random_theta: true,
        }
    }

    #[test]
    fn random_complete_and_deterministic() {
        let g = build_random_weighted(opts(7)).unwrap();
        assert_eq!(g.arc_count(), 20);
        assert_eq!(g, build_random_weighted(opts(7)).unwrap());
        assert_ne!(g, build_random_weighted(opts(8)).unwrap());
        for a in g.arcs() {
            assert_eq!(a.theta, -g.arc(a.inverse).theta);
        }
    }

    #[test]
    fn random_sparse_has_no_isolated_vertices() {
        for seed in 0..20 {
            let g = build_random_weighted(RandomGraphOptions {
                vertices: 9,
                edge_probability: 0.05,
                seed,
                complex_weights: false,
                random_theta: false,
            })
            .unwrap();
            assert!(g.degrees().iter().all(|&k| k >= 1));
            assert!(g.arcs().iter().all(|a| a.weight.im == 0.0 && a.theta == 0.0));
        }
    }

    #[test]
    fn random_rejects_bad_parameters() {
        let mut o = opts(1);
        o.edge_probability = 0.0;
        assert!(build_random_weighted(o).is_err());
        o.edge_probability = 0.5;
        o.vertices = 1;
        assert!(build_random_weighted(o).is_err());
    }
}
