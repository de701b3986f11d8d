//! Rank-2 Néron–Severi arithmetic for degree-8 K3 surfaces: discriminants,
//! the odd-degree-curve parity test, and exact solvability of `a^2 - d b^2 = N`.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Lattice generated by the polarization `H` (`H^2 = 8`) and a curve class `C`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NSData {
    pub ch: i64,
    pub c2: i64,
    pub d: i64,
}

impl NSData {
    pub fn new(ch: i64, c2: i64) -> Self {
        NSData {
            ch,
            c2,
            d: discriminant(ch, c2),
        }
    }
}

/// `(C.H)^2 - 8 C^2`.
pub fn discriminant(ch: i64, c2: i64) -> i64 {
    ch * ch - 8 * c2
}

/// The Brauer class vanishes iff `d = 1 mod 8`.
pub fn brauer_vanishes(d: i64) -> bool {
    d.rem_euclid(8) == 1
}

/// Nonnegative `(a, b)` with `a^2 - d b^2 = n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PellSolution {
    #[serde(serialize_with = "as_string")]
    pub a: BigInt,
    #[serde(serialize_with = "as_string")]
    pub b: BigInt,
}

fn as_string<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

impl PellSolution {
    pub fn check(&self, d: i64, n: i64) -> bool {
        &self.a * &self.a - BigInt::from(d) * &self.b * &self.b == BigInt::from(n)
    }
}

fn better(x: &PellSolution, y: &PellSolution) -> bool {
    (&x.b, &x.a) < (&y.b, &y.a)
}

/// Fundamental solution of `x^2 - d y^2 = (-1)^len` from one period of the
/// continued fraction of `sqrt(d)`, and the period length.
fn fundamental(d: i64) -> (BigInt, BigInt, usize) {
    let a0 = d.sqrt();
    let (mut p, mut q, mut a) = (0i64, 1i64, a0);
    let (mut h0, mut h1) = (BigInt::one(), BigInt::from(a0));
    let (mut k0, mut k1) = (BigInt::zero(), BigInt::one());
    let mut len = 0;
    loop {
        p = a * q - p;
        q = (d - p * p) / q;
        a = (a0 + p) / q;
        len += 1;
        if q == 1 {
            return (h1, k1, len);
        }
        let h2 = BigInt::from(a) * &h1 + &h0;
        let k2 = BigInt::from(a) * &k1 + &k0;
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
    }
}

/// Solutions `(G, B)` of `G^2 - d B^2 = ±m` found by the PQa expansion of
/// `(z + sqrt(d)) / |m|`, tagged with the sign actually obtained.
fn pqa_candidates(d: i64, z: i64, m_abs: i64) -> Vec<(BigInt, BigInt, i64)> {
    let sqrt_d = d.sqrt();
    let (mut p, mut q) = (BigInt::from(z), BigInt::from(m_abs));
    let dd = BigInt::from(d);
    let (mut b_prev, mut b_cur) = (BigInt::one(), BigInt::zero());
    let (mut g_prev, mut g_cur) = (BigInt::from(-z), BigInt::from(m_abs));
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for i in 0usize.. {
        if !seen.insert((p.clone(), q.clone())) {
            break;
        }
        // a_i = floor((P_i + sqrt d) / Q_i), exact since sqrt d is irrational
        let num = &p
            + BigInt::from(sqrt_d)
            + if q.is_negative() {
                BigInt::one()
            } else {
                BigInt::zero()
            };
        let a = num.div_floor(&q);
        let b_next = &a * &b_cur + &b_prev;
        let g_next = &a * &g_cur + &g_prev;
        b_prev = std::mem::replace(&mut b_cur, b_next);
        g_prev = std::mem::replace(&mut g_cur, g_next);
        let p_next = &a * &q - &p;
        let q_next = (&dd - &p_next * &p_next) / &q;
        p = p_next;
        q = q_next;
        // G_i^2 - d B_i^2 = (-1)^(i+1) Q_(i+1) |m|
        if q.abs().is_one() {
            let sign = if i % 2 == 0 { -1 } else { 1 } * if q.is_negative() { -1 } else { 1 };
            out.push((g_cur.abs(), b_cur.abs(), sign));
        }
    }
    out
}

/// Moves `(a, b)` to the smallest `b` in its orbit under the unit group.
fn reduce_by_units(mut s: PellSolution, d: i64, x1: &BigInt, y1: &BigInt) -> PellSolution {
    let dd = BigInt::from(d);
    loop {
        // (a + b sqrt d)(x1 - y1 sqrt d)
        let a2 = (&s.a * x1 - &dd * &s.b * y1).abs();
        let b2 = (&s.b * x1 - &s.a * y1).abs();
        let cand = PellSolution { a: a2, b: b2 };
        if better(&cand, &s) {
            s = cand;
        } else {
            return s;
        }
    }
}

fn solve_square(e: i64, n: i64) -> Option<PellSolution> {
    // (a - e b)(a + e b) = n
    let mut best: Option<PellSolution> = None;
    let n_abs = n.abs();
    for u in 1..=n_abs {
        if n_abs % u != 0 {
            continue;
        }
        for su in [u, -u] {
            let v = n / su;
            if (su + v) % 2 != 0 || (v - su) % (2 * e) != 0 {
                continue;
            }
            let cand = PellSolution {
                a: BigInt::from(((su + v) / 2).abs()),
                b: BigInt::from(((v - su) / (2 * e)).abs()),
            };
            if best.as_ref().is_none_or(|b| better(&cand, b)) {
                best = Some(cand);
            }
        }
    }
    best
}

/// Decides `a^2 - d b^2 = n` and returns the solution with the smallest `b`
/// (then smallest `a`), both nonnegative.
pub fn solve_pell_like(d: i64, n: i64) -> Result<Option<PellSolution>> {
    if d <= 0 {
        return Err(Error::Input(format!("d must be positive, got {d}")));
    }
    if n == 0 {
        return Err(Error::Input("right-hand side must be nonzero".into()));
    }
    let e = d.sqrt();
    if e * e == d {
        return Ok(solve_square(e, n));
    }
    let (x1, y1, len) = fundamental(d);
    // with an odd period, (x1, y1) solves the negative equation
    let neg_unit = (len % 2 == 1).then(|| (x1.clone(), y1.clone()));
    let (ux, uy) = if len % 2 == 1 {
        (
            &x1 * &x1 + BigInt::from(d) * &y1 * &y1,
            BigInt::from(2) * &x1 * &y1,
        )
    } else {
        (x1, y1)
    };
    let mut best: Option<PellSolution> = None;
    let mut f = 1i64;
    while f * f <= n.abs() {
        if n % (f * f) == 0 {
            let m = n / (f * f);
            let m_abs = m.abs();
            let lo = -(m_abs - 1) / 2;
            for z in lo..=m_abs / 2 {
                if (z * z - d).rem_euclid(m_abs) != 0 {
                    continue;
                }
                for (g, b, sign) in pqa_candidates(d, z, m_abs) {
                    let (g, b) = if sign == m.signum() {
                        (g, b)
                    } else if let Some((tx, ty)) = &neg_unit {
                        (&g * tx + BigInt::from(d) * &b * ty, &g * ty + &b * tx)
                    } else {
                        continue;
                    };
                    let cand = PellSolution { a: g * f, b: b * f };
                    let cand = reduce_by_units(cand, d, &ux, &uy);
                    debug_assert!(cand.check(d, n));
                    if best.as_ref().is_none_or(|x| better(&cand, x)) {
                        best = Some(cand);
                    }
                }
            }
        }
        f += 1;
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Classification {
    #[serde(rename = "isomorphic")]
    Isomorphic,
    #[serde(rename = "nontrivially-L-equivalent")]
    NontriviallyLEquivalent,
    #[serde(rename = "brauer-obstructed")]
    BrauerObstructed,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Classification::Isomorphic => "isomorphic",
            Classification::NontriviallyLEquivalent => "nontrivially-L-equivalent",
            Classification::BrauerObstructed => "brauer-obstructed",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PellWitness {
    #[serde(flatten)]
    pub solution: PellSolution,
    /// Right-hand side solved, `8` or `-8`.
    pub rhs: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiscriminantVerdict {
    pub d: i64,
    pub brauer_vanishes: bool,
    pub pell_solution: Option<PellWitness>,
    pub classification: Classification,
}

/// Isomorphic iff `a^2 - d b^2 = ±8` is solvable; otherwise nontrivially
/// L-equivalent iff the Brauer class vanishes.
pub fn classify_discriminant(d: i64) -> Result<DiscriminantVerdict> {
    let plus = solve_pell_like(d, 8)?.map(|s| PellWitness {
        solution: s,
        rhs: 8,
    });
    let minus = solve_pell_like(d, -8)?.map(|s| PellWitness {
        solution: s,
        rhs: -8,
    });
    let pell_solution = match (plus, minus) {
        (Some(p), Some(m)) => Some(if better(&m.solution, &p.solution) {
            m
        } else {
            p
        }),
        (p, m) => p.or(m),
    };
    let brauer = brauer_vanishes(d);
    let classification = match (&pell_solution, brauer) {
        (Some(_), _) => Classification::Isomorphic,
        (None, true) => Classification::NontriviallyLEquivalent,
        (None, false) => Classification::BrauerObstructed,
    };
    Ok(DiscriminantVerdict {
        d,
        brauer_vanishes: brauer,
        pell_solution,
        classification,
    })
}

/// All `d <= limit` classified nontrivially L-equivalent, ascending.
pub fn enumerate_nontrivial(limit: i64) -> Result<Vec<i64>> {
    if limit < 1 {
        return Err(Error::Input(format!(
            "limit must be at least 1, got {limit}"
        )));
    }
    let mut out = Vec::new();
    // only d = 1 mod 8 can qualify
    for d in (1..=limit).step_by(8) {
        if classify_discriminant(d)?.classification == Classification::NontriviallyLEquivalent {
            out.push(d);
        }
    }
    Ok(out)
}
