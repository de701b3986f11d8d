//! Families of quadrics over projective bases, counted over prime fields.
//!
//! The main object is a [`QuadricNet`]: `m + 1` integer symmetric matrices of
//! size `n + 2` spanning a linear system of quadrics in `P^(n+1)`, viewed as the
//! family `Q -> P^m` whose fiber over `s` is the quadric of `M(s) = sum s_i M_i`.
//! Everything that only needs "a Gram matrix for every base point" goes through
//! the [`QuadricFamily`] trait, which the cubic-fourfold and Verra recipes
//! implement as well.

mod cubic;
mod io;
mod reduce;
mod relations;
mod search;
mod verra;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gfp::{PrimeField, ProjPoint, ProjectiveSpace};
use crate::linalg::ModMatrix;
use crate::mpoly::{determinant_of_linear_matrix, HomPoly, LinearFormMatrix};
use crate::quadform::{classify, count_projective_points, GramMatrix};

pub use cubic::{
    accepted_cubic, cubic_with_plane_counts, random_cubic_containing_plane, CubicForm,
    CubicPlaneFamily, CubicReport,
};
pub use io::{CubicFile, CubicTerm, NetFile, VerraFile, FORMAT_VERSION, VERRA_VARIABLE_ORDER};
pub use reduce::{
    count_reduced_family, count_reduced_family_dual, hyperbolic_reduce_family,
    hyperbolic_reduce_family_mod, DualCount, ReducedFamily,
};
pub use relations::{verify_relations, CountReport, Counts, ReportFlags};
pub use search::{random_net_search, SearchConstraints, SearchResult};
pub use verra::{
    accepted_verra_form, verra_counts, VerraFamily, VerraForm, VerraReport, VerraSide,
};

/// Default cap on the number of points any single enumeration may visit.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 20_000_000;

/// A family of quadrics over `P^m`: one Gram matrix per base point.
///
/// `fiber` must be well defined up to congruence and nonzero scalars when the
/// representative of `s` is rescaled, so that counts do not depend on it.
pub trait QuadricFamily: Sync {
    fn base_dim(&self) -> usize;
    fn fiber(&self, s: &[u32], field: PrimeField) -> GramMatrix;
}

/// Histogram `corank -> number of base points`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorankHistogram(pub BTreeMap<usize, u64>);

impl CorankHistogram {
    pub fn count(&self, corank: usize) -> u64 {
        self.0.get(&corank).copied().unwrap_or(0)
    }

    /// Number of base points with corank at least `c`.
    pub fn at_least(&self, c: usize) -> u64 {
        self.0.range(c..).map(|(_, v)| v).sum()
    }

    pub fn max_corank(&self) -> usize {
        self.0.keys().next_back().copied().unwrap_or(0)
    }
}

pub fn corank_stratification(family: &impl QuadricFamily, field: PrimeField) -> CorankHistogram {
    let base = ProjectiveSpace::new(family.base_dim(), field);
    let mut hist = BTreeMap::new();
    base.for_each(|s| {
        *hist
            .entry(classify(&family.fiber(s, field)).corank)
            .or_insert(0) += 1;
    });
    CorankHistogram(hist)
}

/// `#Q(F_p)`, summing exact fiber counts over the base.
pub fn count_total_space(family: &impl QuadricFamily, field: PrimeField) -> u64 {
    ProjectiveSpace::new(family.base_dim(), field)
        .par_sum(|s| count_projective_points(&family.fiber(s, field)))
}

/// Points of the determinant double cover: `sum_s (1 + chi((-1)^(N/2) det M(s)))`.
pub fn count_double_cover(family: &impl QuadricFamily, field: PrimeField) -> Result<u64> {
    let base = ProjectiveSpace::new(family.base_dim(), field);
    let mut odd = None;
    let mut total = 0u64;
    base.for_each(|s| {
        let g = family.fiber(s, field);
        let n = g.size();
        if n % 2 == 1 {
            odd.get_or_insert(n);
            return;
        }
        total += (1 + signed_determinant_character(&g)) as u64;
    });
    match odd {
        Some(n) => Err(Error::Precondition(format!(
            "double cover needs even fiber size, got a fiber of size {n}"
        ))),
        None => Ok(total),
    }
}

/// `chi((-1)^(N/2) det M)` for an even-size Gram matrix.
pub fn signed_determinant_character(g: &GramMatrix) -> i32 {
    let f = g.field();
    let mut d = g.det();
    if (g.size() / 2) % 2 == 1 {
        d = f.neg(d);
    }
    f.legendre(d)
}

/// A net (or pencil, or any linear system) of quadrics with integer Gram matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadricNet {
    n: usize,
    m: usize,
    matrices: Vec<Vec<Vec<i64>>>,
}

/// Upper-triangular expansion of `v^T M v` mod p, for fast repeated evaluation.
#[derive(Clone, Debug)]
pub(crate) struct QuadEval {
    terms: Vec<(usize, usize, u64)>,
    p: u64,
}

impl QuadEval {
    pub(crate) fn new(m: &[Vec<i64>], field: PrimeField) -> Self {
        let n = m.len();
        let mut terms = Vec::new();
        for i in 0..n {
            for j in i..n {
                let c = field.reduce_i64(if i == j { m[i][i] } else { 2 * m[i][j] });
                if c != 0 {
                    terms.push((i, j, c as u64));
                }
            }
        }
        QuadEval {
            terms,
            p: field.p() as u64,
        }
    }

    #[inline]
    pub(crate) fn eval(&self, v: &[u32]) -> u64 {
        let p = self.p;
        let mut acc = 0u64;
        for &(i, j, c) in &self.terms {
            acc = (acc + c * (v[i] as u64 * v[j] as u64 % p)) % p;
        }
        acc
    }
}

impl QuadricNet {
    pub fn new(n: usize, m: usize, matrices: Vec<Vec<Vec<i64>>>) -> Result<Self> {
        if matrices.len() != m + 1 {
            return Err(Error::Input(format!(
                "expected {} matrices, got {}",
                m + 1,
                matrices.len()
            )));
        }
        let size = n + 2;
        for (k, mat) in matrices.iter().enumerate() {
            if mat.len() != size || mat.iter().any(|r| r.len() != size) {
                return Err(Error::Input(format!("matrix {k} is not {size}x{size}")));
            }
            for i in 0..size {
                for j in 0..i {
                    if mat[i][j] != mat[j][i] {
                        return Err(Error::Input(format!(
                            "matrix {k} is not symmetric at ({i},{j})"
                        )));
                    }
                }
            }
        }
        Ok(QuadricNet { n, m, matrices })
    }

    /// Fiber quadric dimension `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Base dimension `m`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Gram size `n + 2`.
    pub fn size(&self) -> usize {
        self.n + 2
    }

    pub fn matrices(&self) -> &[Vec<Vec<i64>>] {
        &self.matrices
    }

    pub fn linear_form_matrix(&self) -> LinearFormMatrix {
        LinearFormMatrix::from_pencil(&self.matrices).expect("validated on construction")
    }

    /// `det M(s)` as a polynomial of degree `n + 2` on the base.
    pub fn discriminant(&self) -> HomPoly {
        determinant_of_linear_matrix(&self.linear_form_matrix())
    }

    /// `u^T M_k v` over the integers.
    pub fn bilinear_int(&self, k: usize, u: &[i64], v: &[i64]) -> i128 {
        let m = &self.matrices[k];
        let mut acc = 0i128;
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0 {
                continue;
            }
            for (j, &vj) in v.iter().enumerate() {
                acc += ui as i128 * m[i][j] as i128 * vj as i128;
            }
        }
        acc
    }

    /// Whether an integer vector lies on every quadric of the system over the integers.
    pub fn contains_integer_point(&self, v: &[i64]) -> bool {
        v.len() == self.size() && (0..=self.m).all(|k| self.bilinear_int(k, v, v) == 0)
    }

    pub(crate) fn evaluators(&self, field: PrimeField) -> Vec<QuadEval> {
        self.matrices
            .iter()
            .map(|m| QuadEval::new(m, field))
            .collect()
    }

    pub(crate) fn reduced_matrices(&self, field: PrimeField) -> Vec<ModMatrix> {
        self.matrices
            .iter()
            .map(|m| {
                let n = m.len();
                ModMatrix::from_fn(n, n, |i, j| field.reduce_i64(m[i][j]))
            })
            .collect()
    }

    pub fn fiber_matrix(&self, s: &[u32], field: PrimeField) -> GramMatrix {
        assert_eq!(s.len(), self.m + 1, "base point has wrong length");
        let size = self.size();
        let m = ModMatrix::from_fn(size, size, |i, j| {
            self.matrices.iter().zip(s).fold(0u32, |acc, (mk, &x)| {
                field.add(acc, field.mul(field.reduce_i64(mk[i][j]), x))
            })
        });
        GramMatrix::new(m, field).expect("symmetric by construction")
    }

    /// Checks that `point` lies on `X` mod p.
    pub fn point_on_x(&self, point: &[u32], field: PrimeField) -> bool {
        self.evaluators(field).iter().all(|q| q.eval(point) == 0)
    }

    /// All points of `X = ∩ Q_i` in `P^(n+1)(F_p)`.
    pub fn points_on_x(&self, field: PrimeField, budget: u64) -> Result<Vec<ProjPoint>> {
        let space = ProjectiveSpace::new(self.n + 1, field);
        check_budget(&space, budget)?;
        let evals = self.evaluators(field);
        Ok(space.par_filter(|v| evals.iter().all(|q| q.eval(v) == 0)))
    }

    /// `#X(F_p)` without materializing the points.
    pub fn count_x(&self, field: PrimeField, budget: u64) -> Result<u64> {
        let space = ProjectiveSpace::new(self.n + 1, field);
        check_budget(&space, budget)?;
        let evals = self.evaluators(field);
        Ok(space.par_sum(|v| evals.iter().all(|q| q.eval(v) == 0) as u64))
    }

    /// `F_p`-rational regularity test of the smoothness criterion: no radical
    /// vector of a singular fiber may lie on `X`, and no fiber may have corank 2.
    pub fn regularity_check(&self, field: PrimeField) -> RegularityReport {
        let base = ProjectiveSpace::new(self.m, field);
        let evals = self.evaluators(field);
        let mut report = RegularityReport {
            heuristic: true,
            ..Default::default()
        };
        base.for_each(|s| {
            let g = self.fiber_matrix(s, field);
            let radical = g.radical();
            let corank = radical.len();
            if corank == 0 {
                return;
            }
            let sp = ProjPoint::normalize(s, field).unwrap();
            if corank >= 2 {
                report.corank_ge2.push(sp.clone());
            }
            if corank == self.size() {
                report.flatness_violation = true;
            }
            // every projective point of the radical
            let kernel_space = ProjectiveSpace::new(corank - 1, field);
            kernel_space.for_each(|c| {
                let u: Vec<u32> = (0..self.size())
                    .map(|i| {
                        radical
                            .iter()
                            .zip(c)
                            .fold(0, |acc, (b, &x)| field.add(acc, field.mul(b[i], x)))
                    })
                    .collect();
                if evals.iter().all(|q| q.eval(&u) == 0) {
                    report
                        .violations
                        .push((sp.clone(), ProjPoint::normalize(&u, field).unwrap()));
                }
            });
        });
        report
    }

    /// `F_p`-lines through `point` inside `X`, each returned as its second point
    /// `v` with the pivot coordinate of `point` set to zero.
    pub fn lines_through_point(&self, point: &[u32], field: PrimeField) -> Result<Vec<ProjPoint>> {
        let size = self.size();
        if point.len() != size {
            return Err(Error::Input("point has wrong length".into()));
        }
        if !self.point_on_x(point, field) {
            return Err(Error::Precondition("point is not on X".into()));
        }
        let pivot = point
            .iter()
            .position(|&c| c % field.p() != 0)
            .ok_or_else(|| Error::Input("zero vector".into()))?;
        let mats = self.reduced_matrices(field);
        // linear forms b_k(P, .)
        let forms: Vec<Vec<u32>> = mats
            .iter()
            .map(|m| m.transpose().mul_vec(point, field))
            .collect();
        let evals = self.evaluators(field);
        let space = ProjectiveSpace::new(size - 2, field);
        let mut lift = vec![0u32; size];
        let mut out = Vec::new();
        space.for_each(|v| {
            for (i, slot) in lift.iter_mut().enumerate() {
                *slot = match i.cmp(&pivot) {
                    std::cmp::Ordering::Less => v[i],
                    std::cmp::Ordering::Equal => 0,
                    std::cmp::Ordering::Greater => v[i - 1],
                };
            }
            let on_tangent = forms.iter().all(|b| {
                b.iter()
                    .zip(&lift)
                    .fold(0u32, |acc, (&x, &y)| field.add(acc, field.mul(x, y)))
                    == 0
            });
            if on_tangent && evals.iter().all(|q| q.eval(&lift) == 0) {
                out.push(ProjPoint::normalize(&lift, field).unwrap());
            }
        });
        Ok(out)
    }
}

impl QuadricFamily for QuadricNet {
    fn base_dim(&self) -> usize {
        self.m
    }

    fn fiber(&self, s: &[u32], field: PrimeField) -> GramMatrix {
        self.fiber_matrix(s, field)
    }
}

/// Outcome of [`QuadricNet::regularity_check`]. Only `F_p`-rational points are
/// examined, so a clean report does not certify geometric smoothness.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RegularityReport {
    pub heuristic: bool,
    /// `(s, u)`: `u` spans part of the radical of `M(s)` and lies on `X`.
    pub violations: Vec<(ProjPoint, ProjPoint)>,
    pub corank_ge2: Vec<ProjPoint>,
    pub flatness_violation: bool,
}

impl RegularityReport {
    pub fn is_regular(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty() && self.corank_ge2.is_empty() && !self.flatness_violation
    }
}

pub(crate) fn check_budget(space: &ProjectiveSpace, budget: u64) -> Result<()> {
    if space.len() > budget {
        return Err(Error::Budget(format!(
            "enumerating P^{}(F_{}) visits {} points, budget is {}",
            space.dim(),
            space.field().p(),
            space.len(),
            budget
        )));
    }
    Ok(())
}

/// Canonical integer representative: divided by the gcd, first nonzero entry positive.
pub fn primitive_integer_vector(v: &[i64]) -> Option<Vec<i64>> {
    let g = v.iter().fold(0i64, |g, &x| num_integer::gcd(g, x));
    if g == 0 {
        return None;
    }
    let sign = v.iter().find(|&&x| x != 0).map_or(1, |x| x.signum());
    Some(v.iter().map(|&x| x / g * sign).collect())
}
