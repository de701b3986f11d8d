//! Single quadratic forms over `F_p`.
//!
//! A form is stored by its symmetric Gram matrix `M` with `q(v) = v^T M v` and
//! `b(u, v) = u^T M v`. Over a finite field of odd characteristic a form is
//! determined up to congruence by its rank and the square class of the
//! determinant of its nondegenerate part, which is all the counting code needs.

use std::fmt;

use crate::error::{Error, Result};
use crate::gfp::{PrimeField, ProjectiveSpace};
use crate::linalg::ModMatrix;

/// Enumeration cap used by [`brute_force_count`] when callers have no opinion.
pub const DEFAULT_BRUTE_FORCE_BUDGET: u64 = 50_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GramMatrix {
    field: PrimeField,
    m: ModMatrix,
}

impl GramMatrix {
    pub fn new(m: ModMatrix, field: PrimeField) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::Input("Gram matrix must be square".into()));
        }
        let n = m.rows();
        for i in 0..n {
            for j in 0..i {
                if m.get(i, j) != m.get(j, i) {
                    return Err(Error::Input(format!(
                        "Gram matrix not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(GramMatrix { field, m })
    }

    pub fn from_i64(rows: &[Vec<i64>], field: PrimeField) -> Result<Self> {
        let red: Vec<Vec<u32>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| field.reduce_i64(x)).collect())
            .collect();
        Self::new(ModMatrix::from_rows(&red), field)
    }

    pub fn diagonal(entries: &[u32], field: PrimeField) -> Self {
        let n = entries.len();
        let m = ModMatrix::from_fn(n, n, |i, j| if i == j { entries[i] % field.p() } else { 0 });
        GramMatrix { field, m }
    }

    pub fn zero(n: usize, field: PrimeField) -> Self {
        GramMatrix {
            field,
            m: ModMatrix::zeros(n, n),
        }
    }

    /// Orthogonal sum `self ⊥ other`.
    pub fn direct_sum(&self, other: &GramMatrix) -> GramMatrix {
        let a = self.size();
        let n = a + other.size();
        let m = ModMatrix::from_fn(n, n, |i, j| match (i < a, j < a) {
            (true, true) => self.get(i, j),
            (false, false) => other.get(i - a, j - a),
            _ => 0,
        });
        GramMatrix {
            field: self.field,
            m,
        }
    }

    /// `A^T M A`.
    pub fn congruent_by(&self, a: &ModMatrix) -> GramMatrix {
        let f = self.field;
        let m = a.transpose().mul(&self.m, f).mul(a, f);
        GramMatrix { field: f, m }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.m.rows()
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.m.get(i, j)
    }

    pub fn matrix(&self) -> &ModMatrix {
        &self.m
    }

    pub fn bilinear(&self, u: &[u32], v: &[u32]) -> u32 {
        let mv = self.m.mul_vec(v, self.field);
        let p = self.field.p() as u64;
        u.iter()
            .zip(&mv)
            .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % p) as u32
    }

    pub fn eval(&self, v: &[u32]) -> u32 {
        self.bilinear(v, v)
    }

    /// Right kernel of `M`, i.e. a basis of the radical.
    pub fn radical(&self) -> Vec<Vec<u32>> {
        self.m.kernel(self.field)
    }

    pub fn rank(&self) -> usize {
        self.m.rank(self.field)
    }

    pub fn det(&self) -> u32 {
        self.m.det(self.field)
    }
}

impl fmt::Display for GramMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.m.to_rows().iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            write!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Result of [`diagonalize`]: `A^T M A = D` with `D = diag(entries)`.
#[derive(Clone, Debug)]
pub struct Diagonalization {
    pub entries: Vec<u32>,
    pub transform: ModMatrix,
}

impl Diagonalization {
    pub fn diagonal_matrix(&self, field: PrimeField) -> GramMatrix {
        GramMatrix::diagonal(&self.entries, field)
    }
}

/// Symmetric Gaussian elimination. The first usable diagonal pivot in row order
/// wins; with none available, an off-diagonal entry `M_ij` is promoted by the
/// substitution `e_i <- e_i + e_j`.
pub fn diagonalize(gram: &GramMatrix) -> Diagonalization {
    let f = gram.field;
    let n = gram.size();
    let mut m = gram.m.clone();
    let mut a = ModMatrix::identity(n);

    // simultaneous row and column operation helpers
    let swap = |m: &mut ModMatrix, a: &mut ModMatrix, i: usize, j: usize| {
        if i == j {
            return;
        }
        for k in 0..n {
            let (x, y) = (m.get(i, k), m.get(j, k));
            m.set(i, k, y);
            m.set(j, k, x);
        }
        for k in 0..n {
            let (x, y) = (m.get(k, i), m.get(k, j));
            m.set(k, i, y);
            m.set(k, j, x);
        }
        for k in 0..n {
            let (x, y) = (a.get(k, i), a.get(k, j));
            a.set(k, i, y);
            a.set(k, j, x);
        }
    };
    // e_dst <- e_dst + c e_src
    let add = |m: &mut ModMatrix, a: &mut ModMatrix, dst: usize, src: usize, c: u32| {
        for k in 0..n {
            let v = f.add(m.get(dst, k), f.mul(c, m.get(src, k)));
            m.set(dst, k, v);
        }
        for k in 0..n {
            let v = f.add(m.get(k, dst), f.mul(c, m.get(k, src)));
            m.set(k, dst, v);
        }
        for k in 0..n {
            let v = f.add(a.get(k, dst), f.mul(c, a.get(k, src)));
            a.set(k, dst, v);
        }
    };

    for k in 0..n {
        let pivot = match (k..n).find(|&i| m.get(i, i) != 0) {
            Some(i) => Some(i),
            None => {
                let off =
                    (k..n).find_map(|i| (i + 1..n).find(|&j| m.get(i, j) != 0).map(|j| (i, j)));
                off.map(|(i, j)| {
                    add(&mut m, &mut a, i, j, 1);
                    i
                })
            }
        };
        let Some(i) = pivot else { break };
        swap(&mut m, &mut a, k, i);
        let inv = f.inv(m.get(k, k));
        for r in k + 1..n {
            let c = f.mul(m.get(r, k), inv);
            if c != 0 {
                add(&mut m, &mut a, r, k, f.neg(c));
            }
        }
    }
    Diagonalization {
        entries: (0..n).map(|i| m.get(i, i)).collect(),
        transform: a,
    }
}

/// Rank, corank and discriminant data of a form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FormInvariants {
    pub rank: usize,
    pub corank: usize,
    /// Character of `(-1)^t det` of the nondegenerate part, `t = floor(rank/2)`.
    pub signed_disc_character: i32,
    /// Character of the plain determinant of the nondegenerate part.
    pub disc_character: i32,
}

pub fn classify(gram: &GramMatrix) -> FormInvariants {
    let f = gram.field;
    let d = diagonalize(gram);
    let nonzero: Vec<u32> = d.entries.iter().copied().filter(|&x| x != 0).collect();
    let rank = nonzero.len();
    let det = nonzero.iter().fold(1u32, |acc, &x| f.mul(acc, x));
    let disc_character = f.legendre(det);
    let minus_one = f.legendre(f.p() - 1);
    let sign = if (rank / 2) % 2 == 1 { minus_one } else { 1 };
    FormInvariants {
        rank,
        corank: gram.size() - rank,
        signed_disc_character: sign * disc_character,
        disc_character,
    }
}

/// `#{q = 0}` in `P^(size-1)(F_p)` for a form of the given rank and signed
/// discriminant character (used only for even rank).
pub fn quadric_point_count(size: usize, rank: usize, eps: i32, p: u64) -> u64 {
    let corank = size - rank;
    let proj = |k: usize| -> u64 { (0..k).map(|i| p.pow(i as u32)).sum() }; // #P^(k-1)
    let nondeg: i64 = if rank == 0 {
        0
    } else if rank % 2 == 1 {
        proj(rank - 1) as i64
    } else {
        proj(rank - 1) as i64 + eps as i64 * p.pow((rank / 2 - 1) as u32) as i64
    };
    nondeg as u64 * p.pow(corank as u32) + proj(corank)
}

/// Exact number of projective points on the quadric `{q = 0}`, by the closed form.
pub fn count_projective_points(gram: &GramMatrix) -> u64 {
    let inv = classify(gram);
    quadric_point_count(
        gram.size(),
        inv.rank,
        inv.signed_disc_character,
        gram.field.p() as u64,
    )
}

/// Exhaustive count over `P^(N-1)(F_p)`; refuses when that space exceeds `budget` points.
pub fn brute_force_count(gram: &GramMatrix, budget: u64) -> Result<u64> {
    let n = gram.size();
    if n == 0 {
        return Ok(0);
    }
    let f = gram.field;
    let space = ProjectiveSpace::new(n - 1, f);
    if space.len() > budget {
        return Err(Error::Budget(format!(
            "brute force over P^{}(F_{}) needs {} points, budget {}",
            n - 1,
            f.p(),
            space.len(),
            budget
        )));
    }
    let p = f.p() as u64;
    // upper-triangular coefficients of q
    let mut coeffs = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            let c = if i == j {
                gram.get(i, i)
            } else {
                f.add(gram.get(i, j), gram.get(i, j))
            };
            coeffs.push((i, j, c as u64));
        }
    }
    let small = p < 1 << 16;
    let mut count = 0u64;
    space.for_each(|v| {
        let mut acc = 0u64;
        for &(i, j, c) in &coeffs {
            let t = c * (v[i] as u64 * v[j] as u64 % p);
            if small {
                acc += t;
            } else {
                acc = (acc + t % p) % p;
            }
        }
        if acc % p == 0 {
            count += 1;
        }
    });
    Ok(count)
}

/// Form induced on `v^⊥/<v>` for an isotropic, non-radical `v`.
///
/// With `w` chosen so that `b(v, w) = 1`, the result is the restriction of `q`
/// to `{u : b(v, u) = b(w, u) = 0}` in the kernel basis of those two equations.
pub fn hyperbolic_reduce_at_vector(gram: &GramMatrix, v: &[u32]) -> Result<GramMatrix> {
    let f = gram.field;
    let n = gram.size();
    if v.len() != n {
        return Err(Error::Input(format!(
            "vector has length {}, form has size {n}",
            v.len()
        )));
    }
    if n < 2 {
        return Err(Error::Precondition(
            "form too small for hyperbolic reduction".into(),
        ));
    }
    if gram.eval(v) != 0 {
        return Err(Error::Precondition("vector is not isotropic".into()));
    }
    let mv = gram.m.mul_vec(v, f);
    let Some(i) = mv.iter().position(|&x| x != 0) else {
        return Err(Error::Precondition(
            "vector lies in the radical (degenerate section)".into(),
        ));
    };
    let mut w = vec![0u32; n];
    w[i] = f.inv(mv[i]);
    let mw = gram.m.mul_vec(&w, f);
    let eqs = ModMatrix::from_rows(&[mv, mw]);
    let basis = eqs.kernel(f);
    debug_assert_eq!(basis.len(), n - 2);
    let k = ModMatrix::from_fn(n, basis.len(), |r, c| basis[c][r]);
    Ok(gram.congruent_by(&k))
}

/// Congruence test over `F_p`: same size, same rank and the same square class
/// of the determinant of the nondegenerate part.
pub fn forms_congruent(a: &GramMatrix, b: &GramMatrix) -> bool {
    if a.size() != b.size() || a.field != b.field {
        return false;
    }
    let (ia, ib) = (classify(a), classify(b));
    ia.rank == ib.rank && ia.disc_character == ib.disc_character
}
