//! The walk operator family built from a coisometry and a unitary
//! involution: boundaries `dA`, `dB = dA S`, coin `C = 2 dA* dA - I`,
//! evolution `U = S C` and discriminant `T = dA dB*`.

mod identities;
mod mtx;
mod partition;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{GraphSpec, SymmetricArcGraph};
use crate::linalg::{CMatrix, CsrMatrix, Operator, C64, ONE};
use crate::spectral::eig_hermitian;

pub use identities::{identity_suite, IdentityCheck, IdentityReport, IDENTITY_NAMES};
pub use mtx::{export_operators, parse_matrix_market, write_matrix_market};
pub use partition::{build_partition_of_unity, Profile};

/// Dense storage up to this many arcs (rows of `U`), sparse above.
pub const DEFAULT_DENSE_LIMIT: usize = 1024;
/// Random probe vectors used to screen identities on sparse operators.
pub const SPARSE_PROBES: usize = 20;
const PROBE_SEED: u64 = 0x5eed_cafe;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BuildOptions {
    pub dense_limit: usize,
    /// Entrywise tolerance for the construction identities.
    pub tolerance: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            dense_limit: DEFAULT_DENSE_LIMIT,
            tolerance: 1e-10,
        }
    }
}

/// A user-supplied (coisometry, unitary involution) pair.
#[derive(Clone, Debug)]
pub struct AbstractPair {
    boundary: CMatrix,
    shift: CMatrix,
}

impl AbstractPair {
    pub fn new(boundary: CMatrix, shift: CMatrix) -> Result<Self> {
        Self::with_tolerance(boundary, shift, 1e-10)
    }

    pub fn with_tolerance(boundary: CMatrix, shift: CMatrix, tol: f64) -> Result<Self> {
        let (k, h) = (boundary.rows(), boundary.cols());
        if shift.rows() != h || shift.cols() != h {
            return Err(Error::Dimension(format!(
                "shift is {}x{}, boundary needs {h}x{h}",
                shift.rows(),
                shift.cols()
            )));
        }
        let (residual, row, col) = boundary
            .matmul(&boundary.adjoint())
            .max_abs_diff_at(&CMatrix::identity(k));
        if residual > tol {
            return Err(Error::NotCoisometry { residual, row, col });
        }
        let (residual, row, col) = shift.max_abs_diff_at(&shift.adjoint());
        if residual > tol {
            return Err(Error::NotInvolution {
                check: "S = S*",
                residual,
                row,
                col,
            });
        }
        let (residual, row, col) = shift.matmul(&shift).max_abs_diff_at(&CMatrix::identity(h));
        if residual > tol {
            return Err(Error::NotInvolution {
                check: "S^2 = I",
                residual,
                row,
                col,
            });
        }
        Ok(AbstractPair { boundary, shift })
    }

    pub fn boundary(&self) -> &CMatrix {
        &self.boundary
    }

    pub fn shift(&self) -> &CMatrix {
        &self.shift
    }
}

#[derive(Clone, Debug)]
pub struct WalkOperators {
    dim_h: usize,
    dim_k: usize,
    da: Operator,
    db: Operator,
    s: Operator,
    c: Operator,
    u: Operator,
    t: Operator,
}

impl WalkOperators {
    /// `dA[v, e] = conj(w(e))` when `o(e) = v`; `S[e, ē] = exp(-i θ(e))`.
    pub fn from_graph(graph: &SymmetricArcGraph, opts: &BuildOptions) -> Result<Self> {
        let h = graph.arc_count();
        let k = graph.vertex_count();
        let da: Vec<_> = graph
            .arcs()
            .iter()
            .enumerate()
            .map(|(e, a)| (a.origin, e, a.weight.conj()))
            .collect();
        let s: Vec<_> = graph
            .arcs()
            .iter()
            .enumerate()
            .map(|(e, a)| (e, a.inverse, C64::from_polar(1.0, -a.theta)))
            .collect();
        let da = Operator::Sparse(CsrMatrix::from_triplets(k, h, &da));
        let s = Operator::Sparse(CsrMatrix::from_triplets(h, h, &s));
        Self::compose(da, s, opts)
    }

    pub fn from_abstract(pair: &AbstractPair, opts: &BuildOptions) -> Result<Self> {
        let h = pair.shift.rows();
        let (da, s) = if h <= opts.dense_limit {
            (
                Operator::Dense(pair.boundary.clone()),
                Operator::Dense(pair.shift.clone()),
            )
        } else {
            (
                Operator::Sparse(pair.boundary.to_sparse()),
                Operator::Sparse(pair.shift.to_sparse()),
            )
        };
        Self::compose(da, s, opts)
    }

    pub(crate) fn compose(da: Operator, s: Operator, opts: &BuildOptions) -> Result<Self> {
        let dim_k = da.rows();
        let dim_h = da.cols();
        let sparse = dim_h > opts.dense_limit;
        let (da, s) = if sparse {
            (Operator::Sparse(da.to_sparse()), Operator::Sparse(s.to_sparse()))
        } else {
            (Operator::Dense(da.to_dense()), Operator::Dense(s.to_dense()))
        };
        let projection = da.adjoint().compose(&da);
        let c = match projection {
            Operator::Sparse(p) => {
                Operator::Sparse(p.scale(C64::new(2.0, 0.0)).add(&CsrMatrix::identity(dim_h).scale(-ONE)))
            }
            Operator::Dense(p) => Operator::Dense(p.scale_real(2.0).shifted(ONE)),
        };
        let db = da.compose(&s);
        let u = s.compose(&c);
        let t = da.compose(&db.adjoint());
        let ops = WalkOperators {
            dim_h,
            dim_k,
            da,
            db,
            s,
            c,
            u,
            t,
        };
        ops.check_invariants(opts.tolerance)?;
        Ok(ops)
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn dim_k(&self) -> usize {
        self.dim_k
    }

    pub fn is_sparse(&self) -> bool {
        self.u.is_sparse()
    }

    /// The coisometry `dA : H -> K`.
    pub fn boundary_a(&self) -> &Operator {
        &self.da
    }

    /// `dB = dA S`.
    pub fn boundary_b(&self) -> &Operator {
        &self.db
    }

    /// The unitary involution `S`.
    pub fn shift(&self) -> &Operator {
        &self.s
    }

    /// `C = 2 dA* dA - I`.
    pub fn coin(&self) -> &Operator {
        &self.c
    }

    /// `U = S C`.
    pub fn evolution(&self) -> &Operator {
        &self.u
    }

    /// `T = dA dB*`.
    pub fn discriminant(&self) -> &Operator {
        &self.t
    }

    /// Test hook: perturbs one entry of `U` without re-validating.
    #[doc(hidden)]
    pub fn corrupt_evolution(&mut self, row: usize, col: usize, delta: C64) {
        self.u.perturb(row, col, delta);
    }

    /// Probe block on the arc space: the identity when dense, seeded random
    /// unit vectors when sparse.
    pub(crate) fn probe_h(&self) -> CMatrix {
        probe_block(self.dim_h, self.is_sparse())
    }

    pub(crate) fn probe_k(&self) -> CMatrix {
        probe_block(self.dim_k, self.is_sparse())
    }

    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        let ph = self.probe_h();
        let pk = self.probe_k();
        let da_star_k = self.da.apply_adjoint_block(&pk);
        let db_star_k = self.db.apply_adjoint_block(&pk);
        let s_h = self.s.apply_block(&ph);
        let c_h = self.c.apply_block(&ph);
        let u_h = self.u.apply_block(&ph);

        let checks: [(&'static str, CMatrix, CMatrix); 11] = [
            ("dA dA* = I", self.da.apply_block(&da_star_k), pk.clone()),
            ("dB dB* = I", self.db.apply_block(&db_star_k), pk.clone()),
            ("S^2 = I", self.s.apply_block(&s_h), ph.clone()),
            ("S = S*", s_h.clone(), self.s.apply_adjoint_block(&ph)),
            ("C^2 = I", self.c.apply_block(&c_h), ph.clone()),
            ("C = C*", c_h.clone(), self.c.apply_adjoint_block(&ph)),
            ("U*U = I", self.u.apply_adjoint_block(&u_h), ph.clone()),
            ("dB = dA S", self.db.apply_block(&ph), self.da.apply_block(&s_h)),
            (
                "C = 2 dA* dA - I",
                c_h.clone(),
                &self.da.apply_adjoint_block(&self.da.apply_block(&ph)).scale_real(2.0) - &ph,
            ),
            ("U = S C", u_h, self.s.apply_block(&c_h)),
            ("T = dA dB*", self.t.apply_block(&pk), self.da.apply_block(&db_star_k)),
        ];
        for (name, lhs, rhs) in checks {
            let (residual, row, col) = lhs.max_abs_diff_at(&rhs);
            if residual > tol {
                return Err(Error::InvariantViolation {
                    invariant: name,
                    detail: format!("residual {residual:e} at ({row}, {col})"),
                });
            }
        }
        let t_k = self.t.apply_block(&pk);
        let (residual, _, _) = t_k.max_abs_diff_at(&self.t.apply_adjoint_block(&pk));
        if residual > tol {
            return Err(Error::InvariantViolation {
                invariant: "T = T*",
                detail: format!("residual {residual:e}"),
            });
        }
        let norm = self.discriminant_norm()?;
        if norm > 1.0 + tol {
            return Err(Error::InvariantViolation {
                invariant: "|T| <= 1",
                detail: format!("spectral radius {norm}"),
            });
        }
        Ok(())
    }

    /// Spectral radius of `T`: exact for dense storage, a power-iteration
    /// estimate for sparse storage.
    pub fn discriminant_norm(&self) -> Result<f64> {
        match &self.t {
            Operator::Dense(t) => {
                let eig = eig_hermitian(t)?;
                Ok(eig.values.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
            }
            Operator::Sparse(t) => {
                let mut x = probe_block(self.dim_k, true).column(0);
                let mut est = 0.0;
                for _ in 0..200 {
                    let y = t.matvec(&x);
                    let n = crate::linalg::norm2(&y);
                    if n == 0.0 {
                        return Ok(0.0);
                    }
                    est = n;
                    x = y.into_iter().map(|v| v / n).collect();
                }
                Ok(est)
            }
        }
    }
}

/// Operators for a spec, together with the graph when there is one.
#[derive(Clone, Debug)]
pub struct Instance {
    pub spec: GraphSpec,
    pub graph: Option<SymmetricArcGraph>,
    pub ops: WalkOperators,
}

pub fn build_instance(spec: &GraphSpec, opts: &BuildOptions) -> Result<Instance> {
    let (graph, ops) = match spec {
        GraphSpec::PartitionOfUnity { grid_points, profile } => {
            (None, build_partition_of_unity(*grid_points, profile, opts)?)
        }
        _ => {
            let g = spec.build_graph()?;
            let ops = WalkOperators::from_graph(&g, opts)?;
            (Some(g), ops)
        }
    };
    Ok(Instance {
        spec: spec.clone(),
        graph,
        ops,
    })
}

fn probe_block(n: usize, random: bool) -> CMatrix {
    if !random {
        return CMatrix::identity(n);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED ^ n as u64);
    let mut m = CMatrix::zeros(n, SPARSE_PROBES);
    for j in 0..SPARSE_PROBES {
        let col: Vec<C64> = (0..n)
            .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
            .collect();
        let norm = crate::linalg::norm2(&col);
        m.set_column(j, &col.iter().map(|v| v / norm).collect::<Vec<_>>());
    }
    m
}
