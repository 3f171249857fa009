//! Subspace dimensions and finite-scale verification that the spectrum of
//! the evolution is the Joukowsky preimage of the discriminant spectrum,
//! plus `±1` with multiplicities `M± + m±`.

mod transfer;

use serde::Serialize;

use crate::error::Result;
use crate::linalg::{CMatrix, C64, ONE};
use crate::operators::WalkOperators;
use crate::spectral::{
    angle, compare_points, eig_hermitian, eig_unitary, ensure_dense_feasible, joukowsky_inverse, kernel_basis,
    kernel_dimension, rank, single_linkage, EigenMultiset, MatchReport, Tolerances,
};

pub use transfer::{transfer_map_check, verify_l0_action, L0Branch, L0Report, TransferReport};

/// Discriminant eigenvalues this far inside `(-1, 1)` get a transfer check
/// inside a full verdict.
pub const TRANSFER_MARGIN: f64 = 1e-6;

/// Dense copies of the operators, shared by the verification routines.
pub(crate) struct DenseOps {
    pub da: CMatrix,
    pub db: CMatrix,
    pub s: CMatrix,
    pub u: CMatrix,
    pub t: CMatrix,
}

impl DenseOps {
    pub(crate) fn new(ops: &WalkOperators) -> Result<Self> {
        ensure_dense_feasible(ops.dim_h(), "spectral verification")?;
        Ok(DenseOps {
            da: ops.boundary_a().to_dense(),
            db: ops.boundary_b().to_dense(),
            s: ops.shift().to_dense(),
            u: ops.evolution().to_dense(),
            t: ops.discriminant().to_dense(),
        })
    }

    pub(crate) fn dim_h(&self) -> usize {
        self.u.rows()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SubspaceDims {
    pub dim_h: usize,
    pub dim_k: usize,
    pub dim_ker_da: usize,
    /// `dim ker(T - 1)`.
    pub m_plus: usize,
    /// `dim ker(T + 1)`.
    pub m_minus: usize,
    /// `dim(ker dA ∩ ker(S + 1))`, the extra multiplicity of `+1` in `U`.
    #[serde(rename = "M_plus")]
    pub big_m_plus: usize,
    /// `dim(ker dA ∩ ker(S - 1))`, the extra multiplicity of `-1` in `U`.
    #[serde(rename = "M_minus")]
    pub big_m_minus: usize,
    /// `dim(ker dA ∩ ker dB ∩ ker(S + 1))`; must equal `M_plus`.
    pub perp_plus: usize,
    /// `dim(ker dA ∩ ker dB ∩ ker(S - 1))`; must equal `M_minus`.
    pub perp_minus: usize,
    /// `dim(ran dA* + ran dB*)`.
    pub dim_l: usize,
    /// `dim dA* ker(T - 1)`.
    pub dim_l0_plus: usize,
    /// `dim dA* ker(T + 1)`.
    pub dim_l0_minus: usize,
    /// `dim_l - dim_l0_plus - dim_l0_minus`.
    pub dim_l1: usize,
}

impl SubspaceDims {
    /// Names of the violated structural relations; empty when consistent.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.dim_ker_da + self.dim_k != self.dim_h {
            out.push(format!(
                "dim ker dA = {} but dim H - dim K = {}",
                self.dim_ker_da,
                self.dim_h as i64 - self.dim_k as i64
            ));
        }
        if self.dim_l0_plus != self.m_plus || self.dim_l0_minus != self.m_minus {
            out.push(format!(
                "dA* is not injective on ker(T -+ 1): images ({}, {}) vs kernels ({}, {})",
                self.dim_l0_plus, self.dim_l0_minus, self.m_plus, self.m_minus
            ));
        }
        if self.big_m_plus != self.perp_plus || self.big_m_minus != self.perp_minus {
            out.push(format!(
                "M± = ({}, {}) but dim L-perp± = ({}, {})",
                self.big_m_plus, self.big_m_minus, self.perp_plus, self.perp_minus
            ));
        }
        let total = self.big_m_plus + self.big_m_minus + self.dim_l1 + self.m_plus + self.m_minus;
        if total != self.dim_h {
            out.push(format!(
                "M+ + M- + dim L1 + m+ + m- = {total} but dim H = {}",
                self.dim_h
            ));
        }
        out
    }
}

pub fn subspace_dims(ops: &WalkOperators, tol: &Tolerances) -> Result<SubspaceDims> {
    dims_dense(&DenseOps::new(ops)?, tol)
}

pub(crate) fn dims_dense(d: &DenseOps, tol: &Tolerances) -> Result<SubspaceDims> {
    let k = tol.kernel;
    let dim_h = d.dim_h();
    let dim_k = d.da.rows();
    let s_plus = d.s.shifted(-ONE);
    let s_minus = d.s.shifted(ONE);
    let ker_t_plus = kernel_basis(&d.t.shifted(ONE), k)?;
    let ker_t_minus = kernel_basis(&d.t.shifted(-ONE), k)?;
    let da_star = d.da.adjoint();
    let image_rank = |basis: &CMatrix| -> Result<usize> {
        if basis.cols() == 0 {
            Ok(0)
        } else {
            rank(&da_star.matmul(basis), k)
        }
    };
    let dim_l = rank(&CMatrix::hstack(&[&da_star, &d.db.adjoint()]), k)?;
    let dim_l0_plus = image_rank(&ker_t_plus)?;
    let dim_l0_minus = image_rank(&ker_t_minus)?;
    Ok(SubspaceDims {
        dim_h,
        dim_k,
        dim_ker_da: kernel_dimension(&d.da, k)?,
        m_plus: ker_t_plus.cols(),
        m_minus: ker_t_minus.cols(),
        big_m_plus: kernel_dimension(&CMatrix::vstack(&[&d.da, &s_plus]), k)?,
        big_m_minus: kernel_dimension(&CMatrix::vstack(&[&d.da, &s_minus]), k)?,
        perp_plus: kernel_dimension(&CMatrix::vstack(&[&d.da, &d.db, &s_plus]), k)?,
        perp_minus: kernel_dimension(&CMatrix::vstack(&[&d.da, &d.db, &s_minus]), k)?,
        dim_l,
        dim_l0_plus,
        dim_l0_minus,
        dim_l1: dim_l.saturating_sub(dim_l0_plus + dim_l0_minus),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubCheck {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplicityRow {
    pub value: C64,
    pub expected: usize,
    pub observed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetLevelReport {
    pub observed_points: usize,
    pub expected_points: usize,
    pub max_distance: f64,
    pub unmatched_observed: Vec<C64>,
    pub unmatched_expected: Vec<C64>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MappingVerdict {
    pub pass: bool,
    pub tolerances: Tolerances,
    pub dims: SubspaceDims,
    pub checks: Vec<SubCheck>,
    /// Observed against predicted eigenvalues on the closed upper half-plane.
    pub spectrum_match: MatchReport,
    /// Conjugated lower half against the open upper half, both observed.
    pub conjugate_pairing: MatchReport,
    pub multiplicity_table: Vec<MultiplicityRow>,
    pub transfer: Vec<TransferReport>,
    pub l0_action: L0Report,
    /// Present for [`full_spectrum_check`].
    pub set_level: Option<SetLevelReport>,
}

impl MappingVerdict {
    pub fn failed_checks(&self) -> impl Iterator<Item = &SubCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Eigenvalues of both operators and the subspace dimensions.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub dims: SubspaceDims,
    pub evolution: EigenMultiset,
    pub discriminant: EigenMultiset,
    pub evolution_values: Vec<C64>,
    pub discriminant_values: Vec<f64>,
    pub evolution_residual: f64,
    pub discriminant_residual: f64,
}

pub fn spectrum_report(ops: &WalkOperators, tol: &Tolerances) -> Result<SpectrumReport> {
    let d = DenseOps::new(ops)?;
    let ue = eig_unitary(&d.u)?;
    let te = eig_hermitian(&d.t)?;
    Ok(SpectrumReport {
        dims: dims_dense(&d, tol)?,
        evolution: EigenMultiset::from_unimodular(&ue.values, tol.cluster),
        discriminant: EigenMultiset::from_real(&te.values, tol.cluster),
        evolution_values: ue.values,
        discriminant_values: te.values,
        evolution_residual: ue.residual,
        discriminant_residual: te.residual,
    })
}

/// The predicted spectrum of `U` from `eig(T)` and `M±`, plus the number of
/// discriminant eigenvalues routed to `+1` and `-1`.
fn predicted_spectrum(t_values: &[f64], dims: &SubspaceDims, tol: &Tolerances) -> Result<(Vec<C64>, usize, usize)> {
    let mut expected = Vec::with_capacity(dims.dim_h);
    let (mut plus, mut minus) = (0, 0);
    for &x in t_values {
        if (x - 1.0).abs() <= tol.boundary {
            plus += 1;
            expected.push(ONE);
        } else if (x + 1.0).abs() <= tol.boundary {
            minus += 1;
            expected.push(-ONE);
        } else {
            let (up, down) = joukowsky_inverse(x)?;
            expected.push(up);
            expected.push(down);
        }
    }
    expected.extend(std::iter::repeat_n(ONE, dims.big_m_plus));
    expected.extend(std::iter::repeat_n(-ONE, dims.big_m_minus));
    Ok((expected, plus, minus))
}

fn multiplicity_table(observed: &[C64], expected: &[C64], tolerance: f64) -> Vec<MultiplicityRow> {
    let points: Vec<C64> = observed.iter().chain(expected).copied().collect();
    let split = observed.len();
    let mut rows: Vec<MultiplicityRow> = single_linkage(&points, tolerance)
        .into_iter()
        .map(|members| {
            let obs: Vec<C64> = members.iter().filter(|&&i| i < split).map(|&i| points[i]).collect();
            let exp = members.len() - obs.len();
            let value = if obs.is_empty() {
                points[members[0]]
            } else {
                obs.iter().sum::<C64>() / obs.len() as f64
            };
            MultiplicityRow {
                value,
                expected: exp,
                observed: obs.len(),
            }
        })
        .collect();
    rows.sort_by(|a, b| angle(a.value).total_cmp(&angle(b.value)));
    rows
}

fn check(name: &'static str, pass: bool, detail: String) -> SubCheck {
    SubCheck { name, pass, detail }
}

pub fn verify_point_spectrum(ops: &WalkOperators, tol: &Tolerances) -> Result<MappingVerdict> {
    let d = DenseOps::new(ops)?;
    verify_dense(&d, tol)
}

fn verify_dense(d: &DenseOps, tol: &Tolerances) -> Result<MappingVerdict> {
    let dims = dims_dense(d, tol)?;
    let ue = eig_unitary(&d.u)?;
    let te = eig_hermitian(&d.t)?;
    let observed = ue.values.clone();
    let (expected, routed_plus, routed_minus) = predicted_spectrum(&te.values, &dims, tol)?;
    let mut checks = Vec::new();

    checks.push(check(
        "eigenpair residuals",
        ue.residual <= tol.eigen_residual && te.residual <= tol.eigen_residual,
        format!("U {:e}, T {:e}", ue.residual, te.residual),
    ));
    let violations = dims.violations();
    checks.push(check(
        "subspace dimensions",
        violations.is_empty(),
        violations.join("; "),
    ));
    checks.push(check(
        "boundary routing",
        routed_plus == dims.m_plus && routed_minus == dims.m_minus,
        format!(
            "eigenvalues of T near (+1, -1): ({routed_plus}, {routed_minus}); kernels ({}, {})",
            dims.m_plus, dims.m_minus
        ),
    ));
    let interior = te.values.len() - routed_plus - routed_minus;
    let cardinality = 2 * interior + dims.m_plus + dims.big_m_plus + dims.m_minus + dims.big_m_minus;
    checks.push(check(
        "cardinality",
        cardinality == dims.dim_h && observed.len() == dims.dim_h,
        format!(
            "predicted {cardinality}, observed {}, dim H {}",
            observed.len(),
            dims.dim_h
        ),
    ));

    let tau = tol.matching;
    let upper = |pts: &[C64]| pts.iter().copied().filter(|z| z.im >= -tau).collect::<Vec<_>>();
    let spectrum_match = compare_points(&upper(&observed), &upper(&expected), tau);
    checks.push(check(
        "upper half-plane match",
        spectrum_match.is_match(),
        format!(
            "max distance {:e}, unmatched {} observed / {} predicted",
            spectrum_match.max_distance,
            spectrum_match.unmatched_left.len(),
            spectrum_match.unmatched_right.len()
        ),
    ));
    let open_upper: Vec<C64> = observed.iter().copied().filter(|z| z.im > tau).collect();
    let mirrored: Vec<C64> = observed.iter().filter(|z| z.im < -tau).map(|z| z.conj()).collect();
    let conjugate_pairing = compare_points(&mirrored, &open_upper, tau);
    checks.push(check(
        "conjugate pairing",
        conjugate_pairing.is_match(),
        format!(
            "max distance {:e}, unmatched {} / {}",
            conjugate_pairing.max_distance,
            conjugate_pairing.unmatched_left.len(),
            conjugate_pairing.unmatched_right.len()
        ),
    ));

    let table = multiplicity_table(&observed, &expected, tol.cluster);
    let mismatched = table.iter().filter(|r| r.expected != r.observed).count();
    checks.push(check(
        "multiplicity table",
        mismatched == 0,
        format!("{} clusters, {mismatched} mismatched", table.len()),
    ));
    let halved = multiplicity_table(&observed, &expected, tol.cluster / 2.0);
    let flipped = halved.iter().filter(|r| r.expected != r.observed).count();
    checks.push(check(
        "multiplicity stability",
        flipped == 0,
        format!("{} clusters at half tolerance, {flipped} mismatched", halved.len()),
    ));

    let ker_plus = kernel_dimension(&d.u.shifted(ONE), tol.kernel)?;
    let ker_minus = kernel_dimension(&d.u.shifted(-ONE), tol.kernel)?;
    checks.push(check(
        "kernel of U -+ 1",
        ker_plus == dims.big_m_plus + dims.m_plus && ker_minus == dims.big_m_minus + dims.m_minus,
        format!(
            "dim ker(U - 1) = {ker_plus} vs {}, dim ker(U + 1) = {ker_minus} vs {}",
            dims.big_m_plus + dims.m_plus,
            dims.big_m_minus + dims.m_minus
        ),
    ));

    let perp = perp_residual(d, tol)?;
    checks.push(check(
        "L-perp characterization",
        perp <= tol.eigen_residual,
        format!("max |dA psi|, |dA S psi| = {perp:e}"),
    ));

    let transfer = transfer::transfer_over_spectrum(d, &te, &observed, tol)?;
    let transfer_ok = transfer.iter().all(|r| r.pass);
    checks.push(check(
        "transfer maps",
        transfer_ok,
        format!(
            "{} eigenvalues, max eigen residual {:e}, max inverse residual {:e}",
            transfer.len(),
            transfer.iter().fold(0.0_f64, |m, r| m.max(r.eigen_residual)),
            transfer.iter().fold(0.0_f64, |m, r| m.max(r.inverse_residual))
        ),
    ));

    let l0_action = transfer::l0_dense(d, tol)?;
    checks.push(check(
        "L0 action",
        l0_action.pass,
        format!(
            "dimensions ({}, {})",
            l0_action.plus.dimension, l0_action.minus.dimension
        ),
    ));

    Ok(MappingVerdict {
        pass: checks.iter().all(|c| c.pass),
        tolerances: *tol,
        dims,
        checks,
        spectrum_match,
        conjugate_pairing,
        multiplicity_table: table,
        transfer,
        l0_action,
        set_level: None,
    })
}

/// Point-spectrum verdict plus the multiplicity-free set identity.
pub fn full_spectrum_check(ops: &WalkOperators, tol: &Tolerances) -> Result<MappingVerdict> {
    let d = DenseOps::new(ops)?;
    let mut verdict = verify_dense(&d, tol)?;
    let observed: Vec<C64> = verdict
        .multiplicity_table
        .iter()
        .filter(|r| r.observed > 0)
        .map(|r| r.value)
        .collect();
    let te = eig_hermitian(&d.t)?;
    let mut expected = Vec::new();
    for entry in EigenMultiset::from_real(&te.values, tol.cluster).entries() {
        let x = entry.value.re;
        if (x - 1.0).abs() <= tol.boundary {
            expected.push(ONE);
        } else if (x + 1.0).abs() <= tol.boundary {
            expected.push(-ONE);
        } else {
            let (up, down) = joukowsky_inverse(x)?;
            expected.extend([up, down]);
        }
    }
    if verdict.dims.big_m_plus > 0 {
        expected.push(ONE);
    }
    if verdict.dims.big_m_minus > 0 {
        expected.push(-ONE);
    }
    let report = set_compare(&observed, &expected, tol.matching);
    verdict.checks.push(check(
        "set-level identity",
        report.pass,
        format!(
            "{} observed / {} predicted points, max distance {:e}",
            report.observed_points, report.expected_points, report.max_distance
        ),
    ));
    verdict.pass = verdict.checks.iter().all(|c| c.pass);
    verdict.set_level = Some(report);
    Ok(verdict)
}

fn set_compare(observed: &[C64], expected: &[C64], tolerance: f64) -> SetLevelReport {
    let dedup = |pts: &[C64]| {
        let mut out: Vec<C64> = Vec::new();
        for &p in pts {
            if out.iter().all(|q| (p - q).norm() > tolerance) {
                out.push(p);
            }
        }
        out
    };
    let obs = dedup(observed);
    let exp = dedup(expected);
    let nearest = |p: C64, set: &[C64]| set.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min);
    let mut max_distance: f64 = 0.0;
    let mut unmatched_observed = Vec::new();
    let mut unmatched_expected = Vec::new();
    for &p in &obs {
        let dist = nearest(p, &exp);
        if dist <= tolerance {
            max_distance = max_distance.max(dist);
        } else {
            unmatched_observed.push(p);
        }
    }
    for &p in &exp {
        let dist = nearest(p, &obs);
        if dist <= tolerance {
            max_distance = max_distance.max(dist);
        } else {
            unmatched_expected.push(p);
        }
    }
    SetLevelReport {
        observed_points: obs.len(),
        expected_points: exp.len(),
        max_distance,
        pass: unmatched_observed.is_empty() && unmatched_expected.is_empty(),
        unmatched_observed,
        unmatched_expected,
    }
}

/// Largest `|dA psi|` or `|dA S psi|` over kernel bases of
/// `[dA; S ± 1]`, which should lie in `ker dA ∩ ker dB`.
fn perp_residual(d: &DenseOps, tol: &Tolerances) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for shift in [-ONE, ONE] {
        let basis = kernel_basis(&CMatrix::vstack(&[&d.da, &d.s.shifted(shift)]), tol.kernel)?;
        if basis.cols() == 0 {
            continue;
        }
        worst = worst
            .max(d.da.matmul(&basis).max_abs())
            .max(d.da.matmul(&d.s.matmul(&basis)).max_abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_cycle, build_truncated_tree};
    use crate::operators::BuildOptions;

    fn ops(g: crate::graph::SymmetricArcGraph) -> WalkOperators {
        WalkOperators::from_graph(&g, &BuildOptions::default()).unwrap()
    }

    #[test]
    fn cycle_four_has_both_boundary_kernels() {
        let dims = subspace_dims(&ops(build_cycle(4).unwrap()), &Tolerances::default()).unwrap();
        assert_eq!((dims.m_plus, dims.m_minus), (1, 1));
        assert!(dims.violations().is_empty(), "{:?}", dims.violations());
    }

    #[test]
    fn path_has_no_extra_boundary_multiplicity() {
        for depth in 1..4 {
            let dims = subspace_dims(&ops(build_truncated_tree(2, depth).unwrap()), &Tolerances::default()).unwrap();
            assert_eq!((dims.big_m_plus, dims.big_m_minus), (0, 0));
        }
    }

    #[test]
    fn cycle_three_verdict_passes() {
        let v = verify_point_spectrum(&ops(build_cycle(3).unwrap()), &Tolerances::default()).unwrap();
        assert!(v.pass, "{:?}", v.failed_checks().collect::<Vec<_>>());
        assert_eq!(v.multiplicity_table.iter().map(|r| r.observed).sum::<usize>(), 6);
    }

    #[test]
    fn multiplicity_table_counts_both_sides() {
        let obs = [ONE, ONE, -ONE];
        let exp = [ONE, -ONE, -ONE];
        let table = multiplicity_table(&obs, &exp, 1e-9);
        assert_eq!(table.len(), 2);
        assert_eq!((table[0].expected, table[0].observed), (1, 2));
        assert_eq!((table[1].expected, table[1].observed), (2, 1));
    }
}
