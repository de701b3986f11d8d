//! Prime fields of odd characteristic and canonical enumeration of projective spaces.

use std::fmt;
use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An odd prime field `F_p` with `3 <= p < 2^31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrimeField {
    p: u32,
}

impl TryFrom<u32> for PrimeField {
    type Error = Error;

    fn try_from(p: u32) -> Result<Self> {
        PrimeField::new(p)
    }
}

impl From<PrimeField> for u32 {
    fn from(f: PrimeField) -> u32 {
        f.p
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let n = n as u64;
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if p == 2 || p >= 1 << 31 || !is_prime(p) {
            return Err(Error::Input(format!("{p} is not an odd prime below 2^31")));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce_i64(&self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        (s % self.p as u64) as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            self.p - (b - a)
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let p = self.p as u64;
        let mut base = a as u64 % p;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        acc as u32
    }

    /// Multiplicative inverse; `a` must be nonzero.
    pub fn inv(&self, a: u32) -> u32 {
        debug_assert!(a % self.p != 0, "inverse of zero");
        self.pow(a, self.p as u64 - 2)
    }

    /// Quadratic character by Euler's criterion: 0 for zero, 1 for nonzero squares, -1 otherwise.
    pub fn legendre(&self, a: u32) -> i32 {
        let a = a % self.p;
        if a == 0 {
            return 0;
        }
        if self.pow(a, (self.p as u64 - 1) / 2) == 1 {
            1
        } else {
            -1
        }
    }

    /// Smallest quadratic non-residue.
    pub fn nonsquare(&self) -> u32 {
        (2..self.p)
            .find(|&a| self.legendre(a) == -1)
            .expect("odd prime has non-residues")
    }

    /// `#P^n(F_p) = (p^(n+1) - 1)/(p - 1)`.
    pub fn projective_count(&self, n: usize) -> u64 {
        let p = self.p as u64;
        (0..=n).map(|i| p.pow(i as u32)).sum()
    }
}

/// Quadratic character of `a` in `field`.
pub fn legendre_character(a: u32, field: PrimeField) -> i32 {
    field.legendre(a)
}

/// A point of projective space in canonical form: leftmost nonzero coordinate is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProjPoint {
    coords: Vec<u32>,
}

impl ProjPoint {
    /// Normalizes `coords` to canonical form. Fails on the zero vector.
    pub fn normalize(coords: &[u32], field: PrimeField) -> Result<Self> {
        let coords: Vec<u32> = coords.iter().map(|&c| c % field.p()).collect();
        let lead = coords
            .iter()
            .copied()
            .find(|&c| c != 0)
            .ok_or_else(|| Error::Input("zero vector is not a projective point".into()))?;
        let inv = field.inv(lead);
        Ok(ProjPoint {
            coords: coords.iter().map(|&c| field.mul(c, inv)).collect(),
        })
    }

    pub fn from_i64(coords: &[i64], field: PrimeField) -> Result<Self> {
        let red: Vec<u32> = coords.iter().map(|&c| field.reduce_i64(c)).collect();
        Self::normalize(&red, field)
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ":")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// `P^n(F_p)` with a fixed total order on its points.
///
/// Points are indexed block by block: block `i` holds the `p^(n-i)` points whose
/// leading 1 sits at coordinate `i`, and inside a block the trailing coordinates
/// are read as a base-`p` number with the last coordinate least significant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProjectiveSpace {
    n: usize,
    field: PrimeField,
}

/// Number of index blocks used for parallel reductions. Fixed so that work
/// partitioning never depends on the thread count.
const PAR_CHUNKS: u64 = 256;

impl ProjectiveSpace {
    pub fn new(n: usize, field: PrimeField) -> Self {
        ProjectiveSpace { n, field }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn len(&self) -> u64 {
        self.field.projective_count(self.n)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn write_point(&self, mut idx: u64, buf: &mut [u32]) {
        let p = self.field.p() as u64;
        let mut lead = 0;
        loop {
            let block = p.pow((self.n - lead) as u32);
            if idx < block {
                break;
            }
            idx -= block;
            lead += 1;
        }
        buf[..lead].fill(0);
        buf[lead] = 1;
        for slot in buf[lead + 1..].iter_mut().rev() {
            *slot = (idx % p) as u32;
            idx /= p;
        }
    }

    /// Point with the given index, `idx < len()`.
    pub fn point_at(&self, idx: u64) -> ProjPoint {
        assert!(idx < self.len(), "index {idx} out of range");
        let mut coords = vec![0; self.n + 1];
        self.write_point(idx, &mut coords);
        ProjPoint { coords }
    }

    /// Calls `f` on every point whose index lies in `range`, reusing one buffer.
    pub fn for_each_in_range<F: FnMut(&[u32])>(&self, range: Range<u64>, mut f: F) {
        let end = range.end.min(self.len());
        if range.start >= end {
            return;
        }
        let p = self.field.p();
        let mut buf = vec![0u32; self.n + 1];
        self.write_point(range.start, &mut buf);
        let mut idx = range.start;
        loop {
            f(&buf);
            idx += 1;
            if idx >= end {
                break;
            }
            // odometer step on the coordinates after the leading 1
            let lead = buf.iter().position(|&c| c != 0).unwrap();
            let mut pos = self.n;
            loop {
                if pos == lead {
                    // block exhausted: the leading 1 moves right
                    buf.fill(0);
                    buf[lead + 1] = 1;
                    break;
                }
                buf[pos] += 1;
                if buf[pos] < p {
                    break;
                }
                buf[pos] = 0;
                pos -= 1;
            }
        }
    }

    pub fn for_each<F: FnMut(&[u32])>(&self, f: F) {
        self.for_each_in_range(0..self.len(), f)
    }

    pub fn iter(&self) -> impl Iterator<Item = ProjPoint> + '_ {
        (0..self.len()).map(move |i| self.point_at(i))
    }

    /// Index ranges covering the space, fixed independently of the thread pool.
    pub fn chunks(&self) -> Vec<Range<u64>> {
        let len = self.len();
        let step = len.div_ceil(PAR_CHUNKS).max(1);
        (0..len)
            .step_by(step as usize)
            .map(|s| s..(s + step).min(len))
            .collect()
    }

    /// Data-parallel sum of `f` over all points.
    pub fn par_sum<F>(&self, f: F) -> u64
    where
        F: Fn(&[u32]) -> u64 + Sync,
    {
        self.chunks()
            .into_par_iter()
            .map(|r| {
                let mut acc = 0u64;
                self.for_each_in_range(r, |pt| acc += f(pt));
                acc
            })
            .sum()
    }

    /// Data-parallel filter; output is in index order.
    pub fn par_filter<F>(&self, f: F) -> Vec<ProjPoint>
    where
        F: Fn(&[u32]) -> bool + Sync,
    {
        let parts: Vec<Vec<ProjPoint>> = self
            .chunks()
            .into_par_iter()
            .map(|r| {
                let mut out = Vec::new();
                self.for_each_in_range(r, |pt| {
                    if f(pt) {
                        out.push(ProjPoint {
                            coords: pt.to_vec(),
                        });
                    }
                });
                out
            })
            .collect();
        parts.into_iter().flatten().collect()
    }
}

/// All points of `P^n(F_p)` in canonical order.
pub fn enumerate_projective(n: usize, field: PrimeField) -> ProjectiveSpace {
    ProjectiveSpace::new(n, field)
}
