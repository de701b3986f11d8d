//! Per-prime count reports for the relations satisfied by a net with a
//! rational point: the total space, the hyperbolic reduction at the point, the
//! intersection `X` and the determinant double cover `Y`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::reduce::{
    count_reduced_family, count_reduced_family_dual, hyperbolic_reduce_family,
    hyperbolic_reduce_family_mod, ReducedFamily,
};
use super::{corank_stratification, count_double_cover, count_total_space, QuadricNet};
use crate::error::{Error, Result};
use crate::gfp::PrimeField;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFlags {
    pub corank2_found: bool,
    pub regularity_violation: bool,
    pub line_through_p_found: bool,
    pub flatness_violation: bool,
    /// The point does not split off mod p (it reduces into the deleted pivot).
    pub degenerate_section: bool,
    /// No point was given and `X(F_p)` is empty.
    pub no_rational_point: bool,
}

impl ReportFlags {
    pub fn any(&self) -> bool {
        self.corank2_found
            || self.regularity_violation
            || self.line_through_p_found
            || self.flatness_violation
            || self.degenerate_section
            || self.no_rational_point
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub x: u64,
    pub y: u64,
    pub q: u64,
    pub qbar: u64,
    /// `#P^(n+1)`, the ambient space of the fibers.
    pub proj_ambient: u64,
    /// `#P^m`, the base.
    pub proj_base: u64,
    /// `#P^n`, the space `P(V/P)` holding the reduction.
    pub proj_reduced: u64,
    /// Points of `P(V/P)` over which the reduction has a jumping fiber.
    pub jump_locus: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub p: u32,
    pub n: usize,
    pub m: usize,
    /// The point used for the reduction, reduced mod p.
    pub point: Vec<u32>,
    pub counts: Counts,
    /// `R1..R4`, all expected to vanish.
    pub residuals: BTreeMap<String, i64>,
    pub corank_histogram: BTreeMap<usize, u64>,
    pub flags: ReportFlags,
}

impl CountReport {
    pub fn all_zero(&self) -> bool {
        self.residuals.values().all(|&r| r == 0)
    }

    pub fn residual(&self, name: &str) -> i64 {
        self.residuals[name]
    }

    pub fn passed(&self) -> bool {
        self.all_zero() && !self.flags.any()
    }
}

/// Runs the count checks for a net with `n = 4, m = 2` (three quadrics in `P^5`)
/// or `n = 2, m = 1` (a pencil in `P^3`).
///
/// `point`, when given, must lie on `X` over the integers. Otherwise each prime
/// uses the first point of `X(F_p)` in enumeration order with no rational line
/// of `X` through it (or simply the first point, if every one has a line).
///
/// For `(4, 2)`:
/// `R1 = #Q - (#P^5 #P^1 + #X p^2)`, `R2 = #Q̄ - (#P^4 + p^2 + #X p)`,
/// `R3 = #Q̄ - (#P^2 (1 + p^2) + #Y p)`, `R4 = #X - #Y`.
/// For the pencil: `R1 = #Q - (#P^3 + #X p)`, `R2 = #Q̄ - #Y`,
/// `R3 = #Q - (#P^1 (1 + p^2) + #Y p)`, `R4 = #X - #Y`.
///
/// Failed hypotheses show up as flags on the report rather than as errors.
pub fn verify_relations(
    net: &QuadricNet,
    point: Option<&[i64]>,
    primes: &[PrimeField],
    budget: u64,
) -> Result<Vec<CountReport>> {
    let pencil = match (net.n(), net.m()) {
        (4, 2) => false,
        (2, 1) => true,
        (n, m) => {
            return Err(Error::Input(format!(
                "relation checks cover (n, m) = (4, 2) and (2, 1), got ({n}, {m})"
            )))
        }
    };
    let integral = match point {
        Some(pt) => {
            if !net.contains_integer_point(pt) {
                return Err(Error::Precondition(
                    "the chosen point does not lie on X".into(),
                ));
            }
            Some((pt.to_vec(), hyperbolic_reduce_family(net, &[pt.to_vec()])?))
        }
        None => None,
    };
    primes
        .iter()
        .map(|&field| {
            let p = field.p() as i64;
            let hist = corank_stratification(net, field);
            let reg = net.regularity_check(field);
            let mut flags = ReportFlags {
                corank2_found: hist.at_least(2) > 0,
                regularity_violation: !reg.is_regular(),
                flatness_violation: hist.count(net.size()) > 0,
                ..Default::default()
            };
            let x = net.count_x(field, budget)?;
            let y = count_double_cover(net, field)?;
            let q = count_total_space(net, field);
            let chosen: Option<(Vec<i64>, ReducedFamily)> = match &integral {
                Some((pt, red)) => Some((pt.clone(), red.clone())),
                None => match choose_point(net, field, budget)? {
                    Some(pt) => {
                        let red = hyperbolic_reduce_family_mod(net, &[pt.clone()], field)?;
                        Some((pt, red))
                    }
                    None => {
                        flags.no_rational_point = true;
                        None
                    }
                },
            };
            let mut pt_mod = Vec::new();
            let (qbar, jump) = match &chosen {
                Some((pt, red)) if red.splits_mod(field) => {
                    pt_mod = pt.iter().map(|&c| field.reduce_i64(c)).collect();
                    flags.line_through_p_found =
                        !net.lines_through_point(&pt_mod, field)?.is_empty();
                    let dual = count_reduced_family_dual(red, field, budget)?;
                    (count_reduced_family(red, field)?, dual.jump_locus)
                }
                Some(_) => {
                    flags.degenerate_section = true;
                    (0, 0)
                }
                None => (0, 0),
            };
            let counts = Counts {
                x,
                y,
                q,
                qbar,
                proj_ambient: field.projective_count(net.n() + 1),
                proj_base: field.projective_count(net.m()),
                proj_reduced: field.projective_count(net.n()),
                jump_locus: jump,
            };
            let (xi, yi, qi, qbi) = (x as i64, y as i64, q as i64, qbar as i64);
            let proj = |d: usize| field.projective_count(d) as i64;
            let mut residuals = BTreeMap::new();
            if pencil {
                residuals.insert("R1".into(), qi - (proj(3) + xi * p));
                residuals.insert("R2".into(), qbi - yi);
                residuals.insert("R3".into(), qi - (proj(1) * (1 + p * p) + yi * p));
            } else {
                residuals.insert("R1".into(), qi - (proj(5) * proj(1) + xi * p * p));
                residuals.insert("R2".into(), qbi - (proj(4) + p * p + xi * p));
                residuals.insert("R3".into(), qbi - (proj(2) * (1 + p * p) + yi * p));
            }
            residuals.insert("R4".into(), xi - yi);
            Ok(CountReport {
                p: field.p(),
                n: net.n(),
                m: net.m(),
                point: pt_mod,
                counts,
                residuals,
                corank_histogram: hist.0,
                flags,
            })
        })
        .collect()
}

fn choose_point(net: &QuadricNet, field: PrimeField, budget: u64) -> Result<Option<Vec<i64>>> {
    let points = net.points_on_x(field, budget)?;
    let mut first = None;
    for pt in &points {
        if net.lines_through_point(pt.coords(), field)?.is_empty() {
            first = Some(pt);
            break;
        }
    }
    Ok(first
        .or(points.first())
        .map(|pt| pt.coords().iter().map(|&c| c as i64).collect()))
}
