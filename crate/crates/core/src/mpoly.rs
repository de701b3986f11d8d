//! Sparse homogeneous polynomials with integer coefficients, and determinants of
//! matrices whose entries are linear forms.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::gfp::PrimeField;

/// Exponent vector of a monomial.
pub type Exponents = Vec<u32>;

/// Homogeneous polynomial in `num_vars` variables. Only nonzero coefficients are
/// stored and every exponent vector sums to `degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomPoly {
    num_vars: usize,
    degree: u32,
    terms: BTreeMap<Exponents, BigInt>,
}

impl HomPoly {
    pub fn zero(num_vars: usize, degree: u32) -> Self {
        HomPoly {
            num_vars,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, c: impl Into<BigInt>) -> Self {
        let mut p = Self::zero(num_vars, 0);
        p.add_term(vec![0; num_vars], c.into());
        p
    }

    /// The linear form `sum coeffs[i] * x_i`.
    pub fn linear(coeffs: &[i64]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n, 1);
        for (i, &c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, BigInt::from(c));
        }
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging repeats.
    pub fn from_terms(num_vars: usize, degree: u32, terms: &[(Exponents, i64)]) -> Result<Self> {
        let mut p = Self::zero(num_vars, degree);
        for (e, c) in terms {
            if e.len() != num_vars {
                return Err(Error::Input(format!(
                    "exponent vector {e:?} has {} entries, expected {num_vars}",
                    e.len()
                )));
            }
            if e.iter().sum::<u32>() != degree {
                return Err(Error::Input(format!(
                    "monomial {e:?} is not of degree {degree}"
                )));
            }
            p.add_term(e.clone(), BigInt::from(*c));
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Exponents, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &[u32]) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add(&self, other: &HomPoly) -> HomPoly {
        assert_eq!(self.num_vars, other.num_vars);
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        assert_eq!(
            self.degree, other.degree,
            "adding polynomials of different degree"
        );
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> HomPoly {
        HomPoly {
            num_vars: self.num_vars,
            degree: self.degree,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &HomPoly) -> HomPoly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &BigInt) -> HomPoly {
        let mut out = HomPoly::zero(self.num_vars, self.degree);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a * c);
        }
        out
    }

    pub fn mul(&self, other: &HomPoly) -> HomPoly {
        assert_eq!(self.num_vars, other.num_vars);
        let degree = self.degree + other.degree;
        let mut acc: BTreeMap<Exponents, BigInt> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        HomPoly {
            num_vars: self.num_vars,
            degree,
            terms: acc,
        }
    }

    /// Exact value at an integer point.
    pub fn evaluate_int(&self, point: &[i64]) -> Result<BigInt> {
        self.check_len(point.len())?;
        let mut total = BigInt::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (&x, &k) in point.iter().zip(e) {
                t *= BigInt::from(x).pow(k);
            }
            total += t;
        }
        Ok(total)
    }

    /// Value at a point of `F_p^n`.
    pub fn evaluate(&self, point: &[u32], field: PrimeField) -> Result<u32> {
        self.check_len(point.len())?;
        let p = BigInt::from(field.p());
        let mut total = 0u32;
        for (e, c) in &self.terms {
            let c = ((c % &p + &p) % &p).to_u32().unwrap();
            let mut t = c;
            for (&x, &k) in point.iter().zip(e) {
                t = field.mul(t, field.pow(x, k as u64));
            }
            total = field.add(total, t);
        }
        Ok(total)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.num_vars {
            return Err(Error::Input(format!(
                "point has {len} coordinates, polynomial has {} variables",
                self.num_vars
            )));
        }
        Ok(())
    }

    /// Coefficients reduced into `0..p`; monomials vanishing mod `p` are dropped.
    pub fn reduce_mod(&self, field: PrimeField) -> HomPoly {
        let p = BigInt::from(field.p());
        let mut out = HomPoly::zero(self.num_vars, self.degree);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), (c % &p + &p) % &p);
        }
        out
    }

    pub fn partial_derivative(&self, var: usize) -> HomPoly {
        assert!(var < self.num_vars, "variable index out of range");
        let mut out = HomPoly::zero(self.num_vars, self.degree.saturating_sub(1));
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[var] -= 1;
            out.add_term(d, c * BigInt::from(e[var]));
        }
        out
    }

    pub fn max_abs_coefficient(&self) -> BigInt {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_default()
    }
}

impl fmt::Display for HomPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(v, &k)| {
                    if k == 1 {
                        format!("x{v}")
                    } else {
                        format!("x{v}^{k}")
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{abs}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Square matrix of linear forms in `vars` base variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearFormMatrix {
    size: usize,
    vars: usize,
    /// `entries[i][j][k]` is the coefficient of variable `k` in entry `(i, j)`.
    entries: Vec<Vec<Vec<i64>>>,
}

impl LinearFormMatrix {
    pub fn new(entries: Vec<Vec<Vec<i64>>>) -> Result<Self> {
        let size = entries.len();
        let vars = entries
            .first()
            .and_then(|r| r.first())
            .map_or(0, |e| e.len());
        for row in &entries {
            if row.len() != size {
                return Err(Error::Input("linear-form matrix must be square".into()));
            }
            if row.iter().any(|e| e.len() != vars) {
                return Err(Error::Input("inconsistent number of base variables".into()));
            }
        }
        Ok(LinearFormMatrix {
            size,
            vars,
            entries,
        })
    }

    /// `M(s) = sum_k s_k M_k` from constant integer matrices `M_0..M_m`.
    pub fn from_pencil(matrices: &[Vec<Vec<i64>>]) -> Result<Self> {
        let vars = matrices.len();
        let size = matrices.first().map_or(0, |m| m.len());
        let entries = (0..size)
            .map(|i| {
                (0..size)
                    .map(|j| (0..vars).map(|k| matrices[k][i][j]).collect())
                    .collect()
            })
            .collect();
        Self::new(entries)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn entry(&self, i: usize, j: usize) -> &[i64] {
        &self.entries[i][j]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.size).all(|i| (0..i).all(|j| self.entries[i][j] == self.entries[j][i]))
    }

    /// The numeric matrix `M(s)` over `F_p`.
    pub fn evaluate(&self, s: &[u32], field: PrimeField) -> crate::linalg::ModMatrix {
        crate::linalg::ModMatrix::from_fn(self.size, self.size, |i, j| {
            self.entries[i][j]
                .iter()
                .zip(s)
                .fold(0u32, |acc, (&c, &x)| {
                    field.add(acc, field.mul(field.reduce_i64(c), x))
                })
        })
    }
}

/// `det(M(s))` as a homogeneous polynomial of degree `size` in the base variables.
///
/// Laplace expansion along rows, memoized on the set of columns still in play,
/// so the cost is `O(size * 2^size)` polynomial products.
pub fn determinant_of_linear_matrix(m: &LinearFormMatrix) -> HomPoly {
    let n = m.size();
    let vars = m.vars();
    let linear: Vec<Vec<HomPoly>> = (0..n)
        .map(|i| (0..n).map(|j| HomPoly::linear(m.entry(i, j))).collect())
        .collect();
    let mut memo: HashMap<u32, HomPoly> = HashMap::new();
    memo.insert(0, HomPoly::constant(vars, 1));
    // masks ordered by popcount so minors are ready before they are needed
    let mut masks: Vec<u32> = (1..(1u32 << n)).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for mask in masks {
        let k = mask.count_ones() as usize;
        let row = n - k;
        let mut acc = HomPoly::zero(vars, k as u32);
        // sign of column j = parity of the number of earlier columns still in the mask
        let mut position = 0;
        for col in 0..n {
            if mask & (1 << col) == 0 {
                continue;
            }
            let minor = &memo[&(mask & !(1 << col))];
            let mut term = linear[row][col].mul(minor);
            if position % 2 == 1 {
                term = term.neg();
            }
            if !term.is_zero() {
                acc = acc.add(&term);
            }
            position += 1;
        }
        if acc.is_zero() {
            acc = HomPoly::zero(vars, k as u32);
        }
        memo.insert(mask, acc);
    }
    let full = if n == 0 { 0 } else { (1u32 << n) - 1 };
    memo.remove(&full).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ModMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn random_poly(vars: usize, degree: u32, rng: &mut impl Rng) -> HomPoly {
        let mut terms = Vec::new();
        for _ in 0..8 {
            let mut e = vec![0u32; vars];
            for _ in 0..degree {
                e[rng.gen_range(0..vars)] += 1;
            }
            terms.push((e, rng.gen_range(-20..=20)));
        }
        HomPoly::from_terms(vars, degree, &terms).unwrap()
    }

    fn random_net(size: usize, vars: usize, rng: &mut impl Rng) -> Vec<Vec<Vec<i64>>> {
        (0..vars)
            .map(|_| {
                let mut m = vec![vec![0i64; size]; size];
                for i in 0..size {
                    for j in i..size {
                        let x = rng.gen_range(-9..=9);
                        m[i][j] = x;
                        m[j][i] = x;
                    }
                }
                m
            })
            .collect()
    }

    #[test]
    fn evaluation_examples() {
        let x0sq = HomPoly::from_terms(3, 2, &[(vec![2, 0, 0], 1)]).unwrap();
        assert_eq!(x0sq.evaluate(&[1, 0, 0], f(5)).unwrap(), 1);
        let g = HomPoly::from_terms(3, 2, &[(vec![1, 1, 0], 1), (vec![0, 0, 2], 1)]).unwrap();
        assert_eq!(g.evaluate(&[1, 1, 1], f(3)).unwrap(), 2);
        assert!(g.evaluate(&[1, 1], f(3)).is_err());
        assert!(HomPoly::from_terms(2, 2, &[(vec![1, 0], 1)]).is_err());
    }

    #[test]
    fn derivative_examples() {
        let x0sq = HomPoly::from_terms(2, 2, &[(vec![2, 0], 1)]).unwrap();
        assert_eq!(
            x0sq.partial_derivative(0),
            HomPoly::from_terms(2, 1, &[(vec![1, 0], 2)]).unwrap()
        );
        assert!(x0sq.partial_derivative(1).is_zero());
    }

    #[test]
    fn determinant_of_diagonal_matrices() {
        let m = LinearFormMatrix::new(vec![
            vec![vec![1, 0], vec![0, 0]],
            vec![vec![0, 0], vec![0, 1]],
        ])
        .unwrap();
        let det = determinant_of_linear_matrix(&m);
        assert_eq!(det, HomPoly::from_terms(2, 2, &[(vec![1, 1], 1)]).unwrap());

        let id: Vec<Vec<i64>> = (0..4)
            .map(|i| (0..4).map(|j| (i == j) as i64).collect())
            .collect();
        let d: Vec<Vec<i64>> = (0..4)
            .map(|i| (0..4).map(|j| if i == j { i as i64 } else { 0 }).collect())
            .collect();
        let det = determinant_of_linear_matrix(&LinearFormMatrix::from_pencil(&[id, d]).unwrap());
        // lambda (lambda + mu)(lambda + 2 mu)(lambda + 3 mu) = l^4 + 6 l^3 m + 11 l^2 m^2 + 6 l m^3
        let expect = HomPoly::from_terms(
            2,
            4,
            &[
                (vec![4, 0], 1),
                (vec![3, 1], 6),
                (vec![2, 2], 11),
                (vec![1, 3], 6),
            ],
        )
        .unwrap();
        assert_eq!(det, expect);
    }

    #[test]
    fn determinant_matches_numeric_on_six_by_six_nets() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let k = f(7);
        let net = random_net(6, 3, &mut rng);
        let m = LinearFormMatrix::from_pencil(&net).unwrap();
        assert!(m.is_symmetric());
        let det = determinant_of_linear_matrix(&m);
        assert_eq!(det.degree(), 6);
        for _ in 0..50 {
            let s: Vec<u32> = (0..3).map(|_| rng.gen_range(0..7)).collect();
            assert_eq!(det.evaluate(&s, k).unwrap(), m.evaluate(&s, k).det(k));
        }
    }

    #[test]
    fn determinant_matches_numeric_on_random_two_by_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..100 {
            let p = [5u32, 7, 11, 13][rng.gen_range(0..4)];
            let entries: Vec<Vec<Vec<i64>>> = (0..2)
                .map(|_| {
                    (0..2)
                        .map(|_| (0..3).map(|_| rng.gen_range(-50..=50)).collect())
                        .collect()
                })
                .collect();
            let m = LinearFormMatrix::new(entries).unwrap();
            let det = determinant_of_linear_matrix(&m);
            let s: Vec<u32> = (0..3).map(|_| rng.gen_range(0..p)).collect();
            assert_eq!(
                det.evaluate(&s, f(p)).unwrap(),
                m.evaluate(&s, f(p)).det(f(p))
            );
        }
    }

    #[test]
    fn derivative_of_determinant_is_trace_of_adjugate_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let k = f(11);
        let net = random_net(5, 3, &mut rng);
        let m = LinearFormMatrix::from_pencil(&net).unwrap();
        let det = determinant_of_linear_matrix(&m);
        for var in 0..3 {
            let d = det.partial_derivative(var);
            let mk = ModMatrix::from_fn(5, 5, |i, j| k.reduce_i64(net[var][i][j]));
            for _ in 0..20 {
                let s: Vec<u32> = (0..3).map(|_| rng.gen_range(0..11)).collect();
                let adj = m.evaluate(&s, k).adjugate(k);
                let prod = adj.mul(&mk, k);
                let trace = (0..5).fold(0, |acc, i| k.add(acc, prod.get(i, i)));
                assert_eq!(d.evaluate(&s, k).unwrap(), trace);
            }
        }
    }

    #[test]
    fn euler_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..50 {
            let vars = rng.gen_range(1..5);
            let deg = rng.gen_range(1..7);
            let g = random_poly(vars, deg, &mut rng);
            let mut lhs = HomPoly::zero(vars, deg);
            for v in 0..vars {
                let mut xv = vec![0i64; vars];
                xv[v] = 1;
                let dv = g.partial_derivative(v);
                if !dv.is_zero() {
                    lhs = lhs.add(&HomPoly::linear(&xv).mul(&dv));
                }
            }
            assert_eq!(lhs, g.scale(&BigInt::from(deg)));
            // and over F_p
            let k = f(13);
            let s: Vec<u32> = (0..vars).map(|_| rng.gen_range(0..13)).collect();
            assert_eq!(
                lhs.evaluate(&s, k).unwrap(),
                k.mul(deg % 13, g.evaluate(&s, k).unwrap())
            );
        }
    }

    #[test]
    fn determinant_under_constant_congruence() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let k = f(13);
        let net = random_net(4, 3, &mut rng);
        let a: Vec<Vec<i64>> = (0..4)
            .map(|_| (0..4).map(|_| rng.gen_range(-3..=3)).collect())
            .collect();
        let transformed: Vec<Vec<Vec<i64>>> = net
            .iter()
            .map(|mk| {
                (0..4)
                    .map(|i| {
                        (0..4)
                            .map(|j| {
                                (0..4)
                                    .map(|r| {
                                        (0..4).map(|c| a[r][i] * mk[r][c] * a[c][j]).sum::<i64>()
                                    })
                                    .sum()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let d0 = determinant_of_linear_matrix(&LinearFormMatrix::from_pencil(&net).unwrap());
        let d1 =
            determinant_of_linear_matrix(&LinearFormMatrix::from_pencil(&transformed).unwrap());
        let am = ModMatrix::from_fn(4, 4, |i, j| k.reduce_i64(a[i][j]));
        let det_a = am.det(k);
        for _ in 0..30 {
            let s: Vec<u32> = (0..3).map(|_| rng.gen_range(0..13)).collect();
            assert_eq!(
                d1.evaluate(&s, k).unwrap(),
                k.mul(k.mul(det_a, det_a), d0.evaluate(&s, k).unwrap())
            );
        }
    }

    #[test]
    fn reduce_mod_drops_multiples() {
        let g = HomPoly::from_terms(2, 1, &[(vec![1, 0], 14), (vec![0, 1], -3)]).unwrap();
        let r = g.reduce_mod(f(7));
        assert_eq!(r.num_terms(), 1);
        assert_eq!(r.coefficient(&[0, 1]), BigInt::from(4));
    }
}
