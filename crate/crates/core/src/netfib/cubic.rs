//! Cubic fourfolds containing the plane `x3 = x4 = x5 = 0`.
//!
//! Projecting from the plane turns the blown-up cubic into a family of quadric
//! surfaces over `P^2_(x3:x4:x5)`: over `s` the residual quadric lives in the
//! 3-space spanned by the plane and `s`, with coordinates `(x0:x1:x2:λ)` for the
//! point `(x0, x1, x2, λ s)`, and its equation is `F(x0, x1, x2, λ s) / λ`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_budget, corank_stratification, count_double_cover, QuadricFamily};
use crate::error::{Error, Result};
use crate::gfp::{PrimeField, ProjectiveSpace};
use crate::linalg::ModMatrix;
use crate::mpoly::HomPoly;
use crate::quadform::GramMatrix;

/// A cubic form in `x0..x5`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicForm {
    poly: HomPoly,
}

impl CubicForm {
    pub fn new(terms: &[(Vec<u32>, i64)]) -> Result<Self> {
        Ok(CubicForm {
            poly: HomPoly::from_terms(6, 3, terms)?,
        })
    }

    pub fn poly(&self) -> &HomPoly {
        &self.poly
    }

    /// `(exponents, coefficient)` pairs, coefficients fitting in `i64`.
    pub fn terms(&self) -> Vec<(Vec<u32>, i64)> {
        use num_traits::ToPrimitive;
        self.poly
            .terms()
            .map(|(e, c)| {
                (
                    e.clone(),
                    c.to_i64().expect("cubic coefficients fit in i64"),
                )
            })
            .collect()
    }

    pub fn contains_plane(&self) -> bool {
        self.poly.terms().all(|(e, _)| e[3] + e[4] + e[5] > 0)
    }

    /// `x3 Q3 + x4 Q4 + x5 Q5` for quadratic forms given by symmetric integer matrices.
    pub fn from_quadrics(quadrics: &[Vec<Vec<i64>>; 3]) -> Result<Self> {
        let mut terms = Vec::new();
        for (j, q) in quadrics.iter().enumerate() {
            for a in 0..6 {
                for b in a..6 {
                    let c = if a == b { q[a][a] } else { q[a][b] + q[b][a] };
                    if c == 0 {
                        continue;
                    }
                    let mut e = vec![0u32; 6];
                    e[a] += 1;
                    e[b] += 1;
                    e[3 + j] += 1;
                    terms.push((e, c));
                }
            }
        }
        Self::new(&terms)
    }
}

/// The quadric-surface family of a cubic through the plane.
#[derive(Clone, Debug)]
pub struct CubicPlaneFamily {
    /// Per monomial: Gram position `(i, j)` in `(x0, x1, x2, λ)`, coefficient,
    /// and the exponents of `s` it carries.
    pieces: Vec<(usize, usize, i64, [u32; 3])>,
}

impl CubicPlaneFamily {
    pub fn new(cubic: &CubicForm) -> Result<Self> {
        if !cubic.contains_plane() {
            return Err(Error::Precondition(
                "cubic does not contain the plane x3 = x4 = x5 = 0".into(),
            ));
        }
        let mut pieces = Vec::new();
        for (e, c) in cubic.terms() {
            let b = [e[3], e[4], e[5]];
            let lambda = b.iter().sum::<u32>() - 1;
            // the degree-2 monomial in (x0, x1, x2, λ)
            let z = [e[0], e[1], e[2], lambda];
            let mut idx = Vec::with_capacity(2);
            for (v, &k) in z.iter().enumerate() {
                for _ in 0..k {
                    idx.push(v);
                }
            }
            pieces.push((idx[0], idx[1], c, b));
        }
        Ok(CubicPlaneFamily { pieces })
    }
}

impl QuadricFamily for CubicPlaneFamily {
    fn base_dim(&self) -> usize {
        2
    }

    /// Gram matrix of `2 g_s`, which keeps entries integral.
    fn fiber(&self, s: &[u32], field: PrimeField) -> GramMatrix {
        let mut m = ModMatrix::zeros(4, 4);
        for &(i, j, c, b) in &self.pieces {
            let mut v = field.reduce_i64(c);
            for (k, &e) in b.iter().enumerate() {
                v = field.mul(v, field.pow(s[k], e as u64));
            }
            if i == j {
                m.set(i, i, field.add(m.get(i, i), field.add(v, v)));
            } else {
                m.set(i, j, field.add(m.get(i, j), v));
                m.set(j, i, field.add(m.get(j, i), v));
            }
        }
        GramMatrix::new(m, field).expect("symmetric by construction")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubicReport {
    pub p: u32,
    pub x_count: u64,
    pub y_count: u64,
    /// `#X - (1 + p^2 + p^4 + p #Y)`.
    pub residual: i64,
    pub corank2_found: bool,
    /// Rational points of the plane where the cubic is singular.
    pub plane_singular_points: u64,
}

impl CubicReport {
    pub fn passed(&self) -> bool {
        self.residual == 0 && !self.corank2_found && self.plane_singular_points == 0
    }
}

fn count_cubic_points(cubic: &CubicForm, field: PrimeField, budget: u64) -> Result<u64> {
    let space = ProjectiveSpace::new(5, field);
    check_budget(&space, budget)?;
    let terms: Vec<(Vec<u32>, u32)> = cubic
        .terms()
        .into_iter()
        .map(|(e, c)| (e, field.reduce_i64(c)))
        .collect();
    Ok(space.par_sum(|v| {
        let mut acc = 0u32;
        for (e, c) in &terms {
            let mut t = *c;
            for (k, &d) in e.iter().enumerate() {
                for _ in 0..d {
                    t = field.mul(t, v[k]);
                }
            }
            acc = field.add(acc, t);
        }
        (acc == 0) as u64
    }))
}

/// Points `x` of the plane with `∂F/∂x_{3+j}(x, 0) = 0` for all `j`.
fn plane_singular_points(cubic: &CubicForm, field: PrimeField) -> u64 {
    let linear: Vec<(Vec<u32>, u32)> = cubic
        .terms()
        .into_iter()
        .filter(|(e, _)| e[3] + e[4] + e[5] == 1)
        .map(|(e, c)| (e, field.reduce_i64(c)))
        .collect();
    let plane = ProjectiveSpace::new(2, field);
    plane.par_sum(|x| {
        let mut grads = [0u32; 3];
        for (e, c) in &linear {
            let j = (3..6).find(|&k| e[k] == 1).unwrap() - 3;
            let mut t = *c;
            for k in 0..3 {
                t = field.mul(t, field.pow(x[k], e[k] as u64));
            }
            grads[j] = field.add(grads[j], t);
        }
        grads.iter().all(|&g| g == 0) as u64
    })
}

pub fn cubic_with_plane_counts(
    cubic: &CubicForm,
    primes: &[PrimeField],
    budget: u64,
) -> Result<Vec<CubicReport>> {
    let family = CubicPlaneFamily::new(cubic)?;
    primes
        .iter()
        .map(|&field| {
            let p = field.p() as i64;
            let x = count_cubic_points(cubic, field, budget)?;
            let y = count_double_cover(&family, field)?;
            let hist = corank_stratification(&family, field);
            Ok(CubicReport {
                p: field.p(),
                x_count: x,
                y_count: y,
                residual: x as i64 - (1 + p * p + p.pow(4) + p * y as i64),
                corank2_found: hist.at_least(2) > 0,
                plane_singular_points: plane_singular_points(cubic, field),
            })
        })
        .collect()
}

/// Deterministic random cubic `x3 Q3 + x4 Q4 + x5 Q5` with entries in `[-bound, bound]`.
pub fn random_cubic_containing_plane(seed: u64, bound: i64) -> CubicForm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut quad = || {
        let mut q = vec![vec![0i64; 6]; 6];
        for a in 0..6 {
            for b in a..6 {
                let x = rng.gen_range(-bound..=bound);
                q[a][b] = x;
                q[b][a] = x;
            }
        }
        q
    };
    let qs = [quad(), quad(), quad()];
    CubicForm::from_quadrics(&qs).expect("well-formed cubic")
}

/// Tries seeds `seed, seed + 1, ...` until the random cubic has no corank 2
/// fiber and is smooth along the plane at each of `primes`.
pub fn accepted_cubic(
    seed: u64,
    bound: i64,
    primes: &[PrimeField],
    max_attempts: u64,
) -> Result<(CubicForm, u64)> {
    if bound < 1 {
        return Err(Error::Input("entry bound must be positive".into()));
    }
    for s in seed..seed.saturating_add(max_attempts) {
        let cubic = random_cubic_containing_plane(s, bound);
        let family = CubicPlaneFamily::new(&cubic)?;
        let clean = primes.iter().all(|&field| {
            corank_stratification(&family, field).at_least(2) == 0
                && plane_singular_points(&cubic, field) == 0
        });
        if clean {
            return Ok((cubic, s));
        }
    }
    Err(Error::Budget(format!(
        "no accepted cubic in {max_attempts} attempts"
    )))
}
