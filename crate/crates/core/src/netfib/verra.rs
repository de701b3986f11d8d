//! Double covers of `P^2 × P^2` branched in a divisor of bidegree (2,2).
//!
//! Each projection makes the double cover a family of quadric surfaces: over
//! `s` in the first factor, the fiber `{w^2 = G(s, t)}` sits in `P^3_(w:t)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{corank_stratification, count_double_cover, QuadricFamily};
use crate::error::{Error, Result};
use crate::gfp::{PrimeField, ProjectiveSpace};
use crate::linalg::ModMatrix;
use crate::quadform::GramMatrix;

/// `G(s, t) = sum T[i][j][k][l] s_i s_j t_k t_l`, stored flat with index
/// `((i*3 + j)*3 + k)*3 + l`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerraForm {
    coefficients: Vec<i64>,
}

impl VerraForm {
    pub fn new(coefficients: Vec<i64>) -> Result<Self> {
        if coefficients.len() != 81 {
            return Err(crate::Error::Input(format!(
                "a (2,2)-form needs 81 tensor coefficients, got {}",
                coefficients.len()
            )));
        }
        Ok(VerraForm { coefficients })
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    #[inline]
    pub fn coeff(&self, i: usize, j: usize, k: usize, l: usize) -> i64 {
        self.coefficients[((i * 3 + j) * 3 + k) * 3 + l]
    }

    /// The same form with the two factors exchanged.
    pub fn swapped(&self) -> VerraForm {
        let mut c = vec![0; 81];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        c[((k * 3 + l) * 3 + i) * 3 + j] = self.coeff(i, j, k, l);
                    }
                }
            }
        }
        VerraForm { coefficients: c }
    }

    pub fn is_symmetric(&self) -> bool {
        self.swapped() == *self
    }

    pub fn eval(&self, s: &[u32], t: &[u32], field: PrimeField) -> u32 {
        let mut acc = 0u32;
        for i in 0..3 {
            for j in 0..3 {
                let sij = field.mul(s[i], s[j]);
                if sij == 0 {
                    continue;
                }
                for k in 0..3 {
                    for l in 0..3 {
                        let c = field.reduce_i64(self.coeff(i, j, k, l));
                        acc = field.add(acc, field.mul(c, field.mul(sij, field.mul(t[k], t[l]))));
                    }
                }
            }
        }
        acc
    }

    /// Deterministic random form with entries in `[-bound, bound]`.
    pub fn random(seed: u64, bound: i64) -> VerraForm {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        VerraForm {
            coefficients: (0..81).map(|_| rng.gen_range(-bound..=bound)).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerraSide {
    First,
    Second,
}

/// The quadric-surface fibration over one factor.
#[derive(Clone, Debug)]
pub struct VerraFamily {
    form: VerraForm,
}

impl VerraFamily {
    pub fn new(form: &VerraForm, side: VerraSide) -> Self {
        let form = match side {
            VerraSide::First => form.clone(),
            VerraSide::Second => form.swapped(),
        };
        VerraFamily { form }
    }
}

impl QuadricFamily for VerraFamily {
    fn base_dim(&self) -> usize {
        2
    }

    /// Gram matrix of `2 (w^2 - G(s, .))` in coordinates `(w, t0, t1, t2)`.
    fn fiber(&self, s: &[u32], field: PrimeField) -> GramMatrix {
        let mut a = [[0u32; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let sij = field.mul(s[i], s[j]);
                if sij == 0 {
                    continue;
                }
                for (k, row) in a.iter_mut().enumerate() {
                    for (l, slot) in row.iter_mut().enumerate() {
                        let c = field.reduce_i64(self.form.coeff(i, j, k, l));
                        *slot = field.add(*slot, field.mul(c, sij));
                    }
                }
            }
        }
        let m = ModMatrix::from_fn(4, 4, |r, c| match (r, c) {
            (0, 0) => 2 % field.p(),
            (0, _) | (_, 0) => 0,
            _ => field.neg(field.add(a[r - 1][c - 1], a[c - 1][r - 1])),
        });
        GramMatrix::new(m, field).expect("symmetric by construction")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerraReport {
    pub p: u32,
    pub x_count: u64,
    pub y1_count: u64,
    pub y2_count: u64,
    /// `#X - ((p^2 + 1) #P^2 + p #Y_1)`.
    pub residual_1: i64,
    /// `#X - ((p^2 + 1) #P^2 + p #Y_2)`.
    pub residual_2: i64,
    /// `#Y_1 - #Y_2`.
    pub residual_y: i64,
    pub corank2_found_1: bool,
    pub corank2_found_2: bool,
}

impl VerraReport {
    pub fn passed(&self) -> bool {
        self.residual_1 == 0
            && self.residual_2 == 0
            && self.residual_y == 0
            && !self.corank2_found_1
            && !self.corank2_found_2
    }
}

/// `#X = sum over P^2 × P^2 of (1 + chi(G(s, t)))`.
pub fn count_verra_cover(form: &VerraForm, field: PrimeField) -> u64 {
    let plane = ProjectiveSpace::new(2, field);
    let ts: Vec<Vec<u32>> = plane.iter().map(|t| t.coords().to_vec()).collect();
    plane.par_sum(|s| {
        ts.iter()
            .map(|t| (1 + field.legendre(form.eval(s, t, field))) as u64)
            .sum()
    })
}

pub fn verra_counts(form: &VerraForm, primes: &[PrimeField]) -> Result<Vec<VerraReport>> {
    let first = VerraFamily::new(form, VerraSide::First);
    let second = VerraFamily::new(form, VerraSide::Second);
    primes
        .iter()
        .map(|&field| {
            let p = field.p() as i64;
            let x = count_verra_cover(form, field);
            let y1 = count_double_cover(&first, field)?;
            let y2 = count_double_cover(&second, field)?;
            let base = field.projective_count(2) as i64;
            Ok(VerraReport {
                p: field.p(),
                x_count: x,
                y1_count: y1,
                y2_count: y2,
                residual_1: x as i64 - ((p * p + 1) * base + p * y1 as i64),
                residual_2: x as i64 - ((p * p + 1) * base + p * y2 as i64),
                residual_y: y1 as i64 - y2 as i64,
                corank2_found_1: corank_stratification(&first, field).at_least(2) > 0,
                corank2_found_2: corank_stratification(&second, field).at_least(2) > 0,
            })
        })
        .collect()
}

/// Tries seeds `seed, seed + 1, ...` until the random form has no fiber of
/// corank at least 2 over either factor at any of `primes`. Returns the form
/// and the seed that produced it.
pub fn accepted_verra_form(
    seed: u64,
    bound: i64,
    primes: &[PrimeField],
    max_attempts: u64,
) -> Result<(VerraForm, u64)> {
    if bound < 1 {
        return Err(Error::Input("entry bound must be positive".into()));
    }
    for s in seed..seed.saturating_add(max_attempts) {
        let form = VerraForm::random(s, bound);
        let first = VerraFamily::new(&form, VerraSide::First);
        let second = VerraFamily::new(&form, VerraSide::Second);
        let clean = primes.iter().all(|&field| {
            corank_stratification(&first, field).at_least(2) == 0
                && corank_stratification(&second, field).at_least(2) == 0
        });
        if clean {
            return Ok((form, s));
        }
    }
    Err(Error::Budget(format!(
        "no accepted (2,2)-form in {max_attempts} attempts"
    )))
}
