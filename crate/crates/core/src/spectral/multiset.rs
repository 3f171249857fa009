//! Eigenvalue multisets: clustering into (value, multiplicity) entries and
//! tolerance-based matching of two multisets.

use serde::Serialize;

use super::unitary::angle;
use crate::linalg::C64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MultisetEntry {
    pub value: C64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenMultiset {
    entries: Vec<MultisetEntry>,
    clustering_tolerance: f64,
}

impl EigenMultiset {
    /// Clusters real values; entries ascending.
    pub fn from_real(values: &[f64], tolerance: f64) -> Self {
        let points: Vec<C64> = values.iter().map(|&v| C64::new(v, 0.0)).collect();
        let mut ms = Self::cluster(&points, tolerance);
        ms.entries.sort_by(|a, b| a.value.re.total_cmp(&b.value.re));
        ms
    }

    /// Clusters points on (or near) the unit circle; entries ordered by
    /// argument in `[0, 2π)`.
    pub fn from_unimodular(values: &[C64], tolerance: f64) -> Self {
        let mut ms = Self::cluster(values, tolerance);
        ms.entries.sort_by(|a, b| angle(a.value).total_cmp(&angle(b.value)));
        ms
    }

    /// Takes entries as given, without clustering.
    pub fn from_entries(entries: Vec<MultisetEntry>, tolerance: f64) -> Self {
        EigenMultiset {
            entries,
            clustering_tolerance: tolerance,
        }
    }

    fn cluster(points: &[C64], tolerance: f64) -> Self {
        let entries = single_linkage(points, tolerance)
            .into_iter()
            .map(|members| {
                let sum: C64 = members.iter().map(|&i| points[i]).sum();
                MultisetEntry {
                    value: sum / members.len() as f64,
                    multiplicity: members.len(),
                }
            })
            .collect();
        EigenMultiset {
            entries,
            clustering_tolerance: tolerance,
        }
    }

    pub fn entries(&self) -> &[MultisetEntry] {
        &self.entries
    }

    pub fn clustering_tolerance(&self) -> f64 {
        self.clustering_tolerance
    }

    /// Sum of multiplicities.
    pub fn total(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    pub fn multiplicity_near(&self, value: C64, tolerance: f64) -> usize {
        self.entries
            .iter()
            .filter(|e| (e.value - value).norm() <= tolerance)
            .map(|e| e.multiplicity)
            .sum()
    }
}

/// Connected components of the "within `tolerance`" relation, each sorted,
/// listed by smallest member.
pub fn single_linkage(points: &[C64], tolerance: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| points[i].re.total_cmp(&points[j].re));
    for a in 0..n {
        let i = order[a];
        for &j in &order[a + 1..] {
            if points[j].re - points[i].re > tolerance {
                break;
            }
            if (points[i] - points[j]).norm() <= tolerance {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchedPair {
    pub left: C64,
    pub right: C64,
    pub count: usize,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchReport {
    pub tolerance: f64,
    pub pairs: Vec<MatchedPair>,
    pub unmatched_left: Vec<MultisetEntry>,
    pub unmatched_right: Vec<MultisetEntry>,
    pub max_distance: f64,
}

impl MatchReport {
    pub fn is_match(&self) -> bool {
        self.unmatched_left.is_empty() && self.unmatched_right.is_empty() && self.max_distance <= self.tolerance
    }

    pub fn matched_count(&self) -> usize {
        self.pairs.iter().map(|p| p.count).sum()
    }
}

/// Pairs entries of `a` and `b` that lie within `tolerance`, closest pairs
/// first, respecting multiplicities.
pub fn multiset_compare(a: &EigenMultiset, b: &EigenMultiset, tolerance: f64) -> MatchReport {
    compare_entries(a.entries(), b.entries(), tolerance)
}

/// Convenience form of [`multiset_compare`] on raw point lists, each point
/// with multiplicity one.
pub fn compare_points(a: &[C64], b: &[C64], tolerance: f64) -> MatchReport {
    let wrap = |pts: &[C64]| -> Vec<MultisetEntry> {
        pts.iter()
            .map(|&value| MultisetEntry { value, multiplicity: 1 })
            .collect()
    };
    compare_entries(&wrap(a), &wrap(b), tolerance)
}

fn compare_entries(a: &[MultisetEntry], b: &[MultisetEntry], tolerance: f64) -> MatchReport {
    let mut b_order: Vec<usize> = (0..b.len()).collect();
    b_order.sort_by(|&i, &j| b[i].value.re.total_cmp(&b[j].value.re));
    let b_re: Vec<f64> = b_order.iter().map(|&j| b[j].value.re).collect();

    let mut candidates: Vec<(f64, f64, f64, usize, usize)> = Vec::new();
    for (i, ea) in a.iter().enumerate() {
        let lo = b_re.partition_point(|&r| r < ea.value.re - tolerance);
        for &j in &b_order[lo..] {
            let eb = &b[j];
            if eb.value.re > ea.value.re + tolerance {
                break;
            }
            let d = (ea.value - eb.value).norm();
            if d <= tolerance {
                let s = ea.value + eb.value;
                candidates.push((d, s.re, s.im, i, j));
            }
        }
    }
    // The tie-break keys are symmetric in (a, b).
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)).then(x.2.total_cmp(&y.2)));

    let mut cap_a: Vec<usize> = a.iter().map(|e| e.multiplicity).collect();
    let mut cap_b: Vec<usize> = b.iter().map(|e| e.multiplicity).collect();
    let mut pairs = Vec::new();
    let mut max_distance: f64 = 0.0;
    for (d, _, _, i, j) in candidates {
        let k = cap_a[i].min(cap_b[j]);
        if k == 0 {
            continue;
        }
        cap_a[i] -= k;
        cap_b[j] -= k;
        max_distance = max_distance.max(d);
        pairs.push(MatchedPair {
            left: a[i].value,
            right: b[j].value,
            count: k,
            distance: d,
        });
    }
    let leftover = |entries: &[MultisetEntry], caps: &[usize]| -> Vec<MultisetEntry> {
        entries
            .iter()
            .zip(caps)
            .filter(|(_, &c)| c > 0)
            .map(|(e, &c)| MultisetEntry {
                value: e.value,
                multiplicity: c,
            })
            .collect()
    };
    MatchReport {
        tolerance,
        unmatched_left: leftover(a, &cap_a),
        unmatched_right: leftover(b, &cap_b),
        pairs,
        max_distance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: f64) -> C64 {
        C64::new(v, 0.0)
    }

    fn entry(v: f64, m: usize) -> MultisetEntry {
        MultisetEntry {
            value: r(v),
            multiplicity: m,
        }
    }

    #[test]
    fn double_one_matches_two_ones() {
        let a = EigenMultiset::from_entries(vec![entry(1.0, 2)], 1e-8);
        let b = EigenMultiset::from_entries(vec![entry(1.0, 1), entry(1.0, 1)], 1e-8);
        let rep = multiset_compare(&a, &b, 1e-8);
        assert!(rep.is_match());
        assert_eq!(rep.max_distance, 0.0);
    }

    #[test]
    fn within_tolerance() {
        let rep = compare_points(&[r(0.5)], &[r(0.5 + 1e-9)], 1e-8);
        assert!(rep.is_match());
    }

    #[test]
    fn unmatched_left_entry() {
        let rep = compare_points(&[r(1.0), r(-1.0)], &[r(1.0)], 1e-8);
        assert!(!rep.is_match());
        assert_eq!(rep.unmatched_left, vec![entry(-1.0, 1)]);
        assert!(rep.unmatched_right.is_empty());
    }

    #[test]
    fn clustering_counts_multiplicity() {
        let ms = EigenMultiset::from_real(&[0.3, -0.5, 0.3 + 1e-9, 1.0, -0.5], 1e-7);
        let mults: Vec<usize> = ms.entries().iter().map(|e| e.multiplicity).collect();
        assert_eq!(mults, vec![2, 2, 1]);
        assert_eq!(ms.total(), 5);
    }

    #[test]
    fn unimodular_order_is_by_angle() {
        let pts = [
            C64::new(0.0, -1.0),
            C64::new(-1.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(1.0, 0.0),
        ];
        let ms = EigenMultiset::from_unimodular(&pts, 1e-7);
        let got: Vec<C64> = ms.entries().iter().map(|e| e.value).collect();
        assert_eq!(got, vec![pts[3], pts[2], pts[1], pts[0]]);
    }
}
