//! Hyperbolic reduction of a net along a constant isotropic subspace.
//!
//! For `U ⊂ V` isotropic for every quadric of the net, the reduction lives in
//! `P(W) × P(V/U)` and is cut out by `k+1` forms of bidegree (1,1),
//! `B_j(w, v') = b_{M(w)}(u_j, v'')`, and one form of bidegree (1,2),
//! `q(w)(v'', v'')`, where `v''` lifts `v'` through the coordinate splitting
//! that deletes the echelon pivots of `U`.

use serde::{Deserialize, Serialize};

use super::{check_budget, QuadricFamily, QuadricNet};
use crate::error::{Error, Result};
use crate::gfp::{PrimeField, ProjectiveSpace};
use crate::linalg::ModMatrix;
use crate::quadform::{count_projective_points, GramMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedFamily {
    /// Base dimension `m`.
    pub m: usize,
    /// Fiber dimension of the original family.
    pub n: usize,
    /// `dim U - 1`.
    pub k: usize,
    pub u_basis: Vec<Vec<i64>>,
    /// Coordinates of `V` deleted to realize `V/U`.
    pub pivots: Vec<usize>,
    /// Remaining coordinates, in order; these index `V/U`.
    pub complement: Vec<usize>,
    /// `bilinear_forms[j][i][c] = (u_j^T M_i)[complement[c]]`.
    pub bilinear_forms: Vec<Vec<Vec<i64>>>,
    /// `quad_form[i]` is `M_i` restricted to the complement coordinates.
    pub quad_form: Vec<Vec<Vec<i64>>>,
}

/// Integer row echelon form; returns pivot columns.
fn integer_echelon_pivots(rows: &[Vec<i64>]) -> Vec<usize> {
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == a.len() {
            break;
        }
        let Some(pr) = (r..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, pr);
        for i in r + 1..a.len() {
            if a[i][c] == 0 {
                continue;
            }
            let (x, y) = (a[r][c], a[i][c]);
            let g = num_integer::gcd(x, y);
            let (fx, fy) = (y / g, x / g);
            for j in 0..cols {
                a[i][j] = a[i][j] * fy - a[r][j] * fx;
            }
            let g = a[i].iter().fold(0i128, |g, &v| num_integer::gcd(g, v));
            if g > 1 {
                for v in a[i].iter_mut() {
                    *v /= g;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Reduces `net` along the span of `u_basis`, which must be isotropic for every
/// `M_i` over the integers and linearly independent.
pub fn hyperbolic_reduce_family(net: &QuadricNet, u_basis: &[Vec<i64>]) -> Result<ReducedFamily> {
    check_shape(net, u_basis)?;
    for i in 0..=net.m() {
        for (a, ua) in u_basis.iter().enumerate() {
            for ub in &u_basis[a..] {
                if net.bilinear_int(i, ua, ub) != 0 {
                    return Err(Error::Precondition(format!(
                        "basis is not isotropic for quadric {i}"
                    )));
                }
            }
        }
    }
    build(net, u_basis)
}

/// Like [`hyperbolic_reduce_family`], but `u_basis` (integer lifts) need only be
/// isotropic mod p. The result is meaningful at that prime only.
pub fn hyperbolic_reduce_family_mod(
    net: &QuadricNet,
    u_basis: &[Vec<i64>],
    field: PrimeField,
) -> Result<ReducedFamily> {
    check_shape(net, u_basis)?;
    let reduce = |u: &[i64]| u.iter().map(|&c| field.reduce_i64(c)).collect::<Vec<u32>>();
    for (i, mat) in net.reduced_matrices(field).iter().enumerate() {
        for (a, ua) in u_basis.iter().enumerate() {
            let mu = mat.mul_vec(&reduce(ua), field);
            for ub in &u_basis[a..] {
                let b = reduce(ub)
                    .iter()
                    .zip(&mu)
                    .fold(0u32, |acc, (&x, &y)| field.add(acc, field.mul(x, y)));
                if b != 0 {
                    return Err(Error::Precondition(format!(
                        "basis is not isotropic for quadric {i} mod {}",
                        field.p()
                    )));
                }
            }
        }
    }
    let rows: Vec<Vec<u32>> = u_basis.iter().map(|u| reduce(u)).collect();
    if ModMatrix::from_rows(&rows).rank(field) != u_basis.len() {
        return Err(Error::Input(format!(
            "isotropic basis is linearly dependent mod {}",
            field.p()
        )));
    }
    build(net, u_basis)
}

fn check_shape(net: &QuadricNet, u_basis: &[Vec<i64>]) -> Result<()> {
    let size = net.size();
    if u_basis.is_empty() {
        return Err(Error::Input("empty isotropic basis".into()));
    }
    if u_basis.iter().any(|u| u.len() != size) {
        return Err(Error::Input(format!(
            "basis vectors must have length {size}"
        )));
    }
    Ok(())
}

fn build(net: &QuadricNet, u_basis: &[Vec<i64>]) -> Result<ReducedFamily> {
    let size = net.size();
    let pivots = integer_echelon_pivots(u_basis);
    if pivots.len() != u_basis.len() {
        return Err(Error::Input("isotropic basis is linearly dependent".into()));
    }
    let k = u_basis.len() - 1;
    if 2 * (k + 1) > size {
        return Err(Error::Precondition("isotropic subspace too large".into()));
    }
    let complement: Vec<usize> = (0..size).filter(|c| !pivots.contains(c)).collect();
    let mats = net.matrices();
    let bilinear_forms = u_basis
        .iter()
        .map(|u| {
            mats.iter()
                .map(|mi| {
                    complement
                        .iter()
                        .map(|&c| (0..size).map(|r| u[r] * mi[r][c]).sum())
                        .collect()
                })
                .collect()
        })
        .collect();
    let quad_form = mats
        .iter()
        .map(|mi| {
            complement
                .iter()
                .map(|&r| complement.iter().map(|&c| mi[r][c]).collect())
                .collect()
        })
        .collect();
    Ok(ReducedFamily {
        m: net.m(),
        n: net.n(),
        k,
        u_basis: u_basis.to_vec(),
        pivots,
        complement,
        bilinear_forms,
        quad_form,
    })
}

impl ReducedFamily {
    /// Dimension of `V/U` minus one: the reduced family sits in `P^m × P^(n-k)`.
    pub fn ambient_fiber_dim(&self) -> usize {
        self.complement.len() - 1
    }

    /// Whether deleting the pivot coordinates still splits off `U` mod p.
    pub fn splits_mod(&self, field: PrimeField) -> bool {
        let r = self.pivots.len();
        let block = ModMatrix::from_fn(r, r, |a, b| {
            field.reduce_i64(self.u_basis[a][self.pivots[b]])
        });
        block.det(field) != 0
    }

    /// Rows `B_j(s, .)` over `F_p`.
    pub fn bilinear_rows(&self, s: &[u32], field: PrimeField) -> ModMatrix {
        let cols = self.complement.len();
        ModMatrix::from_fn(self.k + 1, cols, |j, c| {
            self.bilinear_forms[j]
                .iter()
                .zip(s)
                .fold(0u32, |acc, (bi, &x)| {
                    field.add(acc, field.mul(field.reduce_i64(bi[c]), x))
                })
        })
    }

    pub fn quad_matrix(&self, s: &[u32], field: PrimeField) -> GramMatrix {
        let cols = self.complement.len();
        let m = ModMatrix::from_fn(cols, cols, |a, b| {
            self.quad_form.iter().zip(s).fold(0u32, |acc, (qi, &x)| {
                field.add(acc, field.mul(field.reduce_i64(qi[a][b]), x))
            })
        });
        GramMatrix::new(m, field).expect("symmetric by construction")
    }

    /// The fiber over `s` as a quadric on `{B(s, .) = 0}`, written in the kernel
    /// basis of the linear conditions. When the section degenerates at `s`
    /// the kernel is larger and so is the returned matrix.
    pub fn fiber_restriction(&self, s: &[u32], field: PrimeField) -> GramMatrix {
        let rows = self.bilinear_rows(s, field);
        let basis = rows.kernel(field);
        let q = self.quad_matrix(s, field);
        let k = ModMatrix::from_fn(self.complement.len(), basis.len(), |r, c| basis[c][r]);
        q.congruent_by(&k)
    }

    /// Base points over which `B(s, .)` loses rank, i.e. the section degenerates.
    pub fn degenerate_fibers(&self, field: PrimeField) -> u64 {
        let base = ProjectiveSpace::new(self.m, field);
        base.par_sum(|s| (self.bilinear_rows(s, field).rank(field) < self.k + 1) as u64)
    }
}

impl QuadricFamily for ReducedFamily {
    fn base_dim(&self) -> usize {
        self.m
    }

    fn fiber(&self, s: &[u32], field: PrimeField) -> GramMatrix {
        self.fiber_restriction(s, field)
    }
}

/// `#Q̄(F_p)` summed over the base `P^m`.
pub fn count_reduced_family(red: &ReducedFamily, field: PrimeField) -> Result<u64> {
    if !red.splits_mod(field) {
        return Err(Error::Precondition(format!(
            "coordinate splitting of U fails mod {}",
            field.p()
        )));
    }
    Ok(ProjectiveSpace::new(red.m, field)
        .par_sum(|s| count_projective_points(&red.fiber_restriction(s, field))))
}

/// Count of `Q̄` through the other projection, to `P(V/U)`, whose fibers are
/// linear subspaces of `P^m`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualCount {
    pub total: u64,
    /// Points of `P(V/U)` where the fiber is larger than generic.
    pub jump_locus: u64,
    /// Points whose fiber is all of `P^m`.
    pub full_fibers: u64,
}

pub fn count_reduced_family_dual(
    red: &ReducedFamily,
    field: PrimeField,
    budget: u64,
) -> Result<DualCount> {
    if !red.splits_mod(field) {
        return Err(Error::Precondition(format!(
            "coordinate splitting of U fails mod {}",
            field.p()
        )));
    }
    let dim = red.ambient_fiber_dim();
    let space = ProjectiveSpace::new(dim, field);
    check_budget(&space, budget)?;
    let vars = red.m + 1;
    let generic_rank = (red.k + 2).min(vars);
    // per base coordinate i: the (k+2) x cols data needed to build the condition matrix
    let cols = red.complement.len();
    let lin: Vec<Vec<Vec<u32>>> = (0..vars)
        .map(|i| {
            (0..=red.k)
                .map(|j| {
                    (0..cols)
                        .map(|c| field.reduce_i64(red.bilinear_forms[j][i][c]))
                        .collect()
                })
                .collect()
        })
        .collect();
    let quads: Vec<super::QuadEval> = red
        .quad_form
        .iter()
        .map(|q| super::QuadEval::new(q, field))
        .collect();
    let parts: Vec<(u64, u64, u64)> = {
        use rayon::prelude::*;
        space
            .chunks()
            .into_par_iter()
            .map(|r| {
                let mut acc = (0u64, 0u64, 0u64);
                let mut cond = ModMatrix::zeros(red.k + 2, vars);
                space.for_each_in_range(r, |v| {
                    for i in 0..vars {
                        for j in 0..=red.k {
                            let x = lin[i][j]
                                .iter()
                                .zip(v)
                                .fold(0u32, |a, (&c, &y)| field.add(a, field.mul(c, y)));
                            cond.set(j, i, x);
                        }
                        cond.set(red.k + 1, i, quads[i].eval(v) as u32);
                    }
                    let rank = cond.rank(field);
                    if rank < vars {
                        acc.0 += field.projective_count(vars - 1 - rank);
                    }
                    if rank < generic_rank {
                        acc.1 += 1;
                    }
                    if rank == 0 {
                        acc.2 += 1;
                    }
                });
                acc
            })
            .collect()
    };
    let (total, jump_locus, full_fibers) = parts
        .into_iter()
        .fold((0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    Ok(DualCount {
        total,
        jump_locus,
        full_fibers,
    })
}
