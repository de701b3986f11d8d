//! Formal arithmetic in the Grothendieck ring of varieties.
//!
//! An expression is a `Z[L]`-linear combination of monomials in opaque atoms
//! (`[X]`, `[Y]`, ...). Projective spaces are never atoms: `[P^n]` is stored as
//! `1 + L + ... + L^n`. Nothing here divides by `L`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::error::{Error, Result};

/// A product of atoms with multiplicities, sorted by atom name.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Monomial(Vec<(String, u32)>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn atom(name: &str) -> Self {
        Monomial(vec![(name.to_string(), 1)])
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(String, u32)] {
        &self.0
    }

    pub fn degree_in(&self, name: &str) -> u32 {
        self.0
            .iter()
            .find(|(a, _)| a == name)
            .map_or(0, |(_, k)| *k)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut m: BTreeMap<&str, u32> = BTreeMap::new();
        for (a, k) in self.0.iter().chain(&other.0) {
            *m.entry(a.as_str()).or_insert(0) += k;
        }
        Monomial(m.into_iter().map(|(a, k)| (a.to_string(), k)).collect())
    }

    fn without(&self, name: &str) -> Monomial {
        Monomial(self.0.iter().filter(|(a, _)| a != name).cloned().collect())
    }
}

fn trim(mut p: Vec<i64>) -> Vec<i64> {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

fn poly_add(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len().max(b.len())];
    for (i, &c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, &c) in b.iter().enumerate() {
        out[i] += c;
    }
    trim(out)
}

fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

/// Element of `K_0(Var)` built from atoms and `L`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GRExpr {
    /// Monomial -> coefficients of `1, L, L^2, ...`; never empty.
    terms: BTreeMap<Monomial, Vec<i64>>,
}

impl GRExpr {
    pub fn zero() -> Self {
        GRExpr::default()
    }

    pub fn one() -> Self {
        GRExpr::int(1)
    }

    pub fn int(c: i64) -> Self {
        GRExpr::from_poly(Monomial::unit(), vec![c])
    }

    /// The class of the affine line.
    pub fn l() -> Self {
        GRExpr::l_pow(1)
    }

    pub fn l_pow(k: usize) -> Self {
        let mut p = vec![0; k + 1];
        p[k] = 1;
        GRExpr::from_poly(Monomial::unit(), p)
    }

    pub fn atom(name: &str) -> Self {
        GRExpr::from_poly(Monomial::atom(name), vec![1])
    }

    /// `[P^n] = 1 + L + ... + L^n`.
    pub fn projective_space(n: usize) -> Self {
        GRExpr::from_poly(Monomial::unit(), vec![1; n + 1])
    }

    /// `c(L) * mono`, with `c` given by ascending coefficients.
    pub fn from_poly(mono: Monomial, coeffs: Vec<i64>) -> Self {
        let mut e = GRExpr::zero();
        e.add_term(mono, &coeffs);
        e
    }

    fn add_term(&mut self, mono: Monomial, coeffs: &[i64]) {
        let sum = poly_add(self.terms.get(&mono).map_or(&[][..], |p| p), coeffs);
        if sum.is_empty() {
            self.terms.remove(&mono);
        } else {
            self.terms.insert(mono, sum);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &[i64])> {
        self.terms.iter().map(|(m, p)| (m, p.as_slice()))
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(a, _)| a.clone()))
            .collect()
    }

    /// Largest `r` with `L^r` dividing every coefficient; `None` for zero.
    pub fn l_valuation(&self) -> Option<usize> {
        self.terms
            .values()
            .map(|p| p.iter().position(|&c| c != 0).unwrap())
            .min()
    }

    pub fn pow(&self, k: u32) -> GRExpr {
        let mut out = GRExpr::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Replaces every occurrence of the atom `name` by `value`.
    pub fn substitute(&self, name: &str, value: &GRExpr) -> GRExpr {
        let mut out = GRExpr::zero();
        for (mono, p) in &self.terms {
            let k = mono.degree_in(name);
            let rest = GRExpr::from_poly(mono.without(name), p.clone());
            out = out + rest * value.pow(k);
        }
        out
    }

    /// Integer value with `L := l` and atoms looked up in `atoms`.
    pub fn evaluate(&self, l: i128, atoms: &BTreeMap<String, i128>) -> Result<i128> {
        let mut total = 0i128;
        for (mono, p) in &self.terms {
            let mut v = p.iter().rev().fold(0i128, |acc, &c| acc * l + c as i128);
            for (a, k) in &mono.0 {
                let x = atoms
                    .get(a)
                    .ok_or_else(|| Error::Input(format!("no value for atom [{a}]")))?;
                v *= x.pow(*k);
            }
            total += v;
        }
        Ok(total)
    }

    fn shifted_down(&self, r: usize) -> GRExpr {
        GRExpr {
            terms: self
                .terms
                .iter()
                .map(|(m, p)| (m.clone(), p[r..].to_vec()))
                .collect(),
        }
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&GRExpr> for &GRExpr {
            type Output = GRExpr;
            fn $method(self, rhs: &GRExpr) -> GRExpr {
                $body(self, rhs)
            }
        }
        impl $tr<GRExpr> for GRExpr {
            type Output = GRExpr;
            fn $method(self, rhs: GRExpr) -> GRExpr {
                $body(&self, &rhs)
            }
        }
        impl $tr<&GRExpr> for GRExpr {
            type Output = GRExpr;
            fn $method(self, rhs: &GRExpr) -> GRExpr {
                $body(&self, rhs)
            }
        }
        impl $tr<GRExpr> for &GRExpr {
            type Output = GRExpr;
            fn $method(self, rhs: GRExpr) -> GRExpr {
                $body(self, &rhs)
            }
        }
    };
}

fn add_impl(a: &GRExpr, b: &GRExpr) -> GRExpr {
    let mut out = a.clone();
    for (m, p) in &b.terms {
        out.add_term(m.clone(), p);
    }
    out
}

fn sub_impl(a: &GRExpr, b: &GRExpr) -> GRExpr {
    add_impl(a, &-b)
}

fn mul_impl(a: &GRExpr, b: &GRExpr) -> GRExpr {
    let mut out = GRExpr::zero();
    for (ma, pa) in &a.terms {
        for (mb, pb) in &b.terms {
            out.add_term(ma.mul(mb), &poly_mul(pa, pb));
        }
    }
    out
}

binop!(Add, add, add_impl);
binop!(Sub, sub, sub_impl);
binop!(Mul, mul, mul_impl);

impl Neg for &GRExpr {
    type Output = GRExpr;
    fn neg(self) -> GRExpr {
        GRExpr {
            terms: self
                .terms
                .iter()
                .map(|(m, p)| (m.clone(), p.iter().map(|c| -c).collect()))
                .collect(),
        }
    }
}

impl Neg for GRExpr {
    type Output = GRExpr;
    fn neg(self) -> GRExpr {
        -&self
    }
}

fn superscript(k: usize) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    k.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
        .collect()
}

fn subscript_digits(name: &str) -> String {
    const DIGITS: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];
    let stem = name.trim_end_matches(|c: char| c.is_ascii_digit());
    let tail: String = name[stem.len()..]
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
        .collect();
    format!("{stem}{tail}")
}

fn l_power(k: usize) -> String {
    match k {
        0 => String::new(),
        1 => "L".into(),
        _ => format!("L{}", superscript(k)),
    }
}

fn render_monomial(m: &Monomial) -> String {
    m.0.iter()
        .map(|(a, k)| {
            let base = format!("[{}]", subscript_digits(a));
            if *k == 1 {
                base
            } else {
                format!("{base}{}", superscript(*k as usize))
            }
        })
        .collect()
}

/// `c * L^k` with the sign stripped.
fn render_scalar_term(c: i64, k: usize) -> String {
    match (c.abs(), k) {
        (a, 0) => a.to_string(),
        (1, _) => l_power(k),
        (a, _) => format!("{a}{}", l_power(k)),
    }
}

fn render_poly(p: &[i64]) -> String {
    join_signed(
        p.iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| (c < 0, render_scalar_term(c, k)))
            .collect(),
    )
}

fn join_signed(pieces: Vec<(bool, String)>) -> String {
    let mut s = String::new();
    for (i, (neg, body)) in pieces.into_iter().enumerate() {
        match (i, neg) {
            (0, true) => s.push_str(&format!("−{body}")),
            (0, false) => s.push_str(&body),
            (_, true) => s.push_str(&format!(" − {body}")),
            (_, false) => s.push_str(&format!(" + {body}")),
        }
    }
    s
}

impl GRExpr {
    fn pieces(&self) -> Vec<(bool, String)> {
        let mut pieces = Vec::new();
        for (m, p) in self.terms.iter().filter(|(m, _)| !m.is_unit()) {
            let nonzero: Vec<(usize, i64)> = p
                .iter()
                .copied()
                .enumerate()
                .filter(|&(_, c)| c != 0)
                .collect();
            let mono = render_monomial(m);
            if let [(k, c)] = nonzero[..] {
                let coeff = if c.abs() == 1 {
                    String::new()
                } else {
                    c.abs().to_string()
                };
                let lp = if k == 0 {
                    String::new()
                } else {
                    format!("·{}", l_power(k))
                };
                pieces.push((c < 0, format!("{coeff}{mono}{lp}")));
            } else {
                pieces.push((false, format!("({})·{mono}", render_poly(p))));
            }
        }
        if let Some(p) = self.terms.get(&Monomial::unit()) {
            for (k, &c) in p.iter().enumerate().filter(|(_, &c)| c != 0) {
                pieces.push((c < 0, render_scalar_term(c, k)));
            }
        }
        pieces
    }
}

/// Atoms first in name order, then the pure `L`-polynomial in ascending
/// powers; a power of `L` common to every term is pulled out.
impl fmt::Display for GRExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(r) = self.l_valuation() else {
            return write!(f, "0");
        };
        if r > 0 {
            let inner = self.shifted_down(r).pieces();
            if inner.len() > 1 {
                return write!(f, "({})·{}", join_signed(inner), l_power(r));
            }
        }
        write!(f, "{}", join_signed(self.pieces()))
    }
}

/// `lhs = rhs` in the Grothendieck ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub name: String,
    pub lhs: GRExpr,
    pub rhs: GRExpr,
}

impl Equation {
    pub fn new(name: impl Into<String>, lhs: GRExpr, rhs: GRExpr) -> Self {
        Equation {
            name: name.into(),
            lhs,
            rhs,
        }
    }

    pub fn residual(&self) -> GRExpr {
        &self.lhs - &self.rhs
    }

    /// The atom this equation defines, when its left side is a bare atom.
    pub fn defined_atom(&self) -> Option<&str> {
        match self.lhs.terms.iter().next() {
            Some((m, p))
                if self.lhs.terms.len() == 1 && p == &[1] && m.0.len() == 1 && m.0[0].1 == 1 =>
            {
                Some(&m.0[0].0)
            }
            _ => None,
        }
    }

    /// Rewrites `expr` by replacing the defined atom with the right side.
    pub fn apply(&self, expr: &GRExpr) -> Result<GRExpr> {
        let atom = self.defined_atom().ok_or_else(|| {
            Error::Input(format!("equation {} does not define an atom", self.name))
        })?;
        Ok(expr.substitute(atom, &self.rhs))
    }

    pub fn holds_at(&self, l: i128, atoms: &BTreeMap<String, i128>) -> Result<bool> {
        Ok(self.residual().evaluate(l, atoms)? == 0)
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

/// Fibration with constant fiber: `[M] = [S][F]`.
pub fn rule_zlt(total: &str, base: &GRExpr, fiber: &GRExpr) -> Equation {
    Equation::new("fibration", GRExpr::atom(total), base * fiber)
}

/// `[Bl_Z X] = [X] + [Z](L + ... + L^(c-1))` for a smooth center of codimension `c`.
pub fn rule_blowup(blowup: &str, x: &GRExpr, center: &GRExpr, codim: usize) -> Result<Equation> {
    if codim == 0 {
        return Err(Error::Input(
            "blowup center must have positive codimension".into(),
        ));
    }
    let mut exc = vec![1i64; codim];
    exc[0] = 0;
    let rhs = x + center * GRExpr::from_poly(Monomial::unit(), exc);
    Ok(Equation::new("blowup", GRExpr::atom(blowup), rhs))
}

/// Family of `n`-dimensional quadrics over `S` with a nondegenerate `k`-section:
/// `[Q] = [S][P^k](1 + L^(n-k)) + [Qbar] L^(k+1)`.
pub fn rule_hyperbolic_reduction(
    total: &str,
    base: &GRExpr,
    n: usize,
    k: usize,
    qbar: &GRExpr,
) -> Result<Equation> {
    if 2 * k > n {
        return Err(Error::Input(format!(
            "a {k}-section needs n >= {}, got n = {n}",
            2 * k
        )));
    }
    let rhs = base * GRExpr::projective_space(k) * (GRExpr::one() + GRExpr::l_pow(n - k))
        + qbar * GRExpr::l_pow(k + 1);
    Ok(Equation::new(
        "hyperbolic reduction",
        GRExpr::atom(total),
        rhs,
    ))
}

/// Total space of a net of `n`-dimensional quadrics over `P^m` with base locus `X`:
/// `[Q] = [P^(n+1)][P^(m-1)] + [X] L^m`.
pub fn rule_family_total(total: &str, x: &GRExpr, n: usize, m: usize) -> Result<Equation> {
    if m == 0 {
        return Err(Error::Input(
            "the base must have dimension at least 1".into(),
        ));
    }
    let rhs =
        GRExpr::projective_space(n + 1) * GRExpr::projective_space(m - 1) + x * GRExpr::l_pow(m);
    Ok(Equation::new("total space", GRExpr::atom(total), rhs))
}

pub const DERIVATION_NAMES: [&str; 6] = [
    "theorem-main",
    "corollary-m1",
    "corollary-m2",
    "cubic-plane",
    "verra",
    "pfaffian-statement-check",
];

/// What `all` expands to; the Pfaffian entry only restates a cited relation.
pub const DERIVED_IDENTITIES: [&str; 5] = [
    "theorem-main",
    "corollary-m1",
    "corollary-m2",
    "cubic-plane",
    "verra",
];

/// One class computed along two routes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub name: String,
    /// The class computed twice.
    pub pivot: String,
    /// Rules used, in order.
    pub equations: Vec<Equation>,
    pub route_a: GRExpr,
    pub route_b: GRExpr,
    /// `route_a - route_b`.
    pub residual: GRExpr,
    /// The relation as it is stated.
    pub expected: GRExpr,
    pub hypothesis: Equation,
    /// The residual with the hypothesis substituted.
    pub after_hypothesis: GRExpr,
    /// Only restates a cited relation; no routes are computed.
    pub cited: bool,
}

impl Derivation {
    pub fn consistent(&self) -> bool {
        self.residual == self.expected && self.after_hypothesis.is_zero()
    }
}

fn finish(
    name: &str,
    pivot: &str,
    equations: Vec<Equation>,
    route_a: GRExpr,
    route_b: GRExpr,
    expected: GRExpr,
    hypothesis: Equation,
) -> Result<Derivation> {
    let residual = &route_a - &route_b;
    let after_hypothesis = hypothesis.apply(&residual)?;
    Ok(Derivation {
        name: name.into(),
        pivot: pivot.into(),
        equations,
        route_a,
        route_b,
        residual,
        expected,
        hypothesis,
        after_hypothesis,
        cited: false,
    })
}

pub fn derive(name: &str) -> Result<Derivation> {
    let x = GRExpr::atom("X");
    let y = GRExpr::atom("Y");
    let l = GRExpr::l();
    let p = GRExpr::projective_space;
    let x_is_y = Equation::new("hypothesis", x.clone(), y.clone());
    match name {
        "theorem-main" => {
            // Qbar = Bl_{X'} P^4 and X' = Bl_P X, against reduction in dimension two
            let qbar_blowup = rule_blowup("Qbar", &p(4), &GRExpr::atom("Xprime"), 2)?;
            let xprime = rule_blowup("Xprime", &x, &GRExpr::one(), 2)?;
            let qbar_reduction = rule_hyperbolic_reduction("Qbar", &p(2), 2, 0, &y)?;
            let route_a = xprime.apply(&qbar_blowup.rhs)?;
            let route_b = qbar_reduction.rhs.clone();
            finish(
                name,
                "Qbar",
                vec![qbar_blowup, xprime, qbar_reduction],
                route_a,
                route_b,
                (&x - &y) * &l,
                x_is_y,
            )
        }
        "corollary-m1" => {
            let total = rule_family_total("Q", &x, 2, 1)?;
            let reduction = rule_hyperbolic_reduction("Q", &p(1), 2, 0, &y)?;
            let (a, b) = (total.rhs.clone(), reduction.rhs.clone());
            finish(
                name,
                "Q",
                vec![total, reduction],
                a,
                b,
                (&x - &y) * &l,
                x_is_y,
            )
        }
        "corollary-m2" => {
            // reduction along a line, a 1-section
            let total = rule_family_total("Q", &x, 4, 2)?;
            let reduction = rule_hyperbolic_reduction("Q", &p(2), 4, 1, &y)?;
            let (a, b) = (total.rhs.clone(), reduction.rhs.clone());
            finish(
                name,
                "Q",
                vec![total, reduction],
                a,
                b,
                (&x - &y) * GRExpr::l_pow(2),
                x_is_y,
            )
        }
        "cubic-plane" => {
            let blowup = rule_blowup("Xtilde", &x, &p(2), 2)?;
            let reduction = rule_hyperbolic_reduction("Xtilde", &p(2), 2, 0, &y)?;
            let (a, b) = (blowup.rhs.clone(), reduction.rhs.clone());
            let stated = GRExpr::one() + GRExpr::l_pow(2) + GRExpr::l_pow(4) + &y * &l;
            let hypothesis = Equation::new("hypothesis", x.clone(), stated.clone());
            finish(
                name,
                "Xtilde",
                vec![blowup, reduction],
                a,
                b,
                &x - &stated,
                hypothesis,
            )
        }
        "verra" => {
            let y1 = GRExpr::atom("Y1");
            let y2 = GRExpr::atom("Y2");
            let first = rule_hyperbolic_reduction("X", &p(2), 2, 0, &y1)?;
            let second = rule_hyperbolic_reduction("X", &p(2), 2, 0, &y2)?;
            let (a, b) = (first.rhs.clone(), second.rhs.clone());
            let hypothesis = Equation::new("hypothesis", y1.clone(), y2.clone());
            finish(
                name,
                "X",
                vec![first, second],
                a,
                b,
                (&y1 - &y2) * &l,
                hypothesis,
            )
        }
        "pfaffian-statement-check" => {
            let l6 = GRExpr::l_pow(6);
            let route_a = &x * &l6;
            let route_b = &y * &l6;
            let mut d = finish(
                name,
                "",
                Vec::new(),
                route_a,
                route_b,
                (&x - &y) * &l6,
                x_is_y,
            )?;
            d.cited = true;
            Ok(d)
        }
        other => Err(Error::Input(format!(
            "unknown derivation {other:?}; expected one of {}",
            DERIVATION_NAMES.join(", ")
        ))),
    }
}
