//! Seeded rejection sampling of integer nets with a chosen rational point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{corank_stratification, QuadricNet};
use crate::error::{Error, Result};
use crate::gfp::PrimeField;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConstraints {
    /// Entries are drawn from `[-entry_bound, entry_bound]`.
    pub entry_bound: i64,
    /// Extra primes at which the net must also be accepted.
    pub primes: Vec<PrimeField>,
    /// Draw diagonal matrices only.
    pub diagonal: bool,
    pub max_attempts: u64,
    pub require_no_lines: bool,
}

impl Default for SearchConstraints {
    fn default() -> Self {
        SearchConstraints {
            entry_bound: 9,
            primes: Vec::new(),
            diagonal: false,
            max_attempts: 2000,
            require_no_lines: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub net: QuadricNet,
    pub point: Vec<i64>,
    pub attempts: u64,
}

fn random_symmetric(
    size: usize,
    bound: i64,
    diagonal: bool,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<i64>> {
    let mut m = vec![vec![0i64; size]; size];
    for i in 0..size {
        for j in i..size {
            if diagonal && i != j {
                continue;
            }
            let x = rng.gen_range(-bound..=bound);
            m[i][j] = x;
            m[j][i] = x;
        }
    }
    // e0 lies on every quadric
    m[0][0] = 0;
    m
}

/// Whether `net` with the point `point` passes every check at `field`.
fn accepted(
    net: &QuadricNet,
    point: &[i64],
    field: PrimeField,
    require_no_lines: bool,
) -> Result<bool> {
    let hist = corank_stratification(net, field);
    if hist.at_least(2) > 0 {
        return Ok(false);
    }
    if !net.regularity_check(field).is_clean() {
        return Ok(false);
    }
    if require_no_lines {
        let pt: Vec<u32> = point.iter().map(|&c| field.reduce_i64(c)).collect();
        if !net.lines_through_point(&pt, field)?.is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Draws nets until one is accepted at `field` and at every prime of
/// `constraints.primes`. The point is always the first standard vector, which
/// the sampler places on `X` over the integers.
pub fn random_net_search(
    n: usize,
    m: usize,
    field: PrimeField,
    seed: u64,
    constraints: &SearchConstraints,
) -> Result<SearchResult> {
    if constraints.entry_bound < 1 {
        return Err(Error::Input("entry bound must be positive".into()));
    }
    let mut primes = vec![field];
    for &q in &constraints.primes {
        if !primes.contains(&q) {
            primes.push(q);
        }
    }
    let size = n + 2;
    let mut point = vec![0i64; size];
    point[0] = 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=constraints.max_attempts {
        let mats = (0..=m)
            .map(|_| {
                random_symmetric(
                    size,
                    constraints.entry_bound,
                    constraints.diagonal,
                    &mut rng,
                )
            })
            .collect();
        let net = QuadricNet::new(n, m, mats)?;
        let mut ok = true;
        for &q in &primes {
            if !accepted(&net, &point, q, constraints.require_no_lines)? {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(SearchResult {
                net,
                point,
                attempts: attempt,
            });
        }
    }
    Err(Error::Budget(format!(
        "no accepted net in {} attempts",
        constraints.max_attempts
    )))
}
