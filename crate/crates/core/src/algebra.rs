//! Exact arithmetic in Q, imaginary quadratic fields and totally definite
//! rational quaternion algebras.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// One of the three algebra kinds that host orders with finite unit group.
///
/// Basis conventions: `(1)`, `(1, √−d)`, `(1, i, j, k)` with `i² = u`,
/// `j² = v`, `ij = k = −ji`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algebra {
    Rationals,
    ImaginaryQuadratic(u64),
    Quaternion(i64, i64),
}

pub fn is_square_free(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

impl Algebra {
    pub fn imaginary_quadratic(d: u64) -> Result<Self> {
        if d == 0 || !is_square_free(d) {
            return Err(Error::domain(format!("Q(√−{d}) requires d > 0 square-free")));
        }
        Ok(Algebra::ImaginaryQuadratic(d))
    }

    pub fn quaternion(u: i64, v: i64) -> Result<Self> {
        if u >= 0 || v >= 0 {
            return Err(Error::InfiniteUnitGroup);
        }
        Ok(Algebra::Quaternion(u, v))
    }

    /// Parses `Q`, `Qi:<d>` or `quat:<u>,<v>`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t == "Q" {
            return Ok(Algebra::Rationals);
        }
        if let Some(rest) = t.strip_prefix("Qi:") {
            let d: i64 = rest
                .trim()
                .parse()
                .map_err(|_| Error::parse(3, format!("bad integer {rest:?}")))?;
            if d <= 0 || !is_square_free(d as u64) {
                return Err(Error::parse(3, "d must be a positive square-free integer"));
            }
            return Ok(Algebra::ImaginaryQuadratic(d as u64));
        }
        if let Some(rest) = t.strip_prefix("quat:") {
            let mut parts = rest.split(',');
            let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::parse(5, "expected quat:<u>,<v>"));
            };
            let u: i64 = a.trim().parse().map_err(|_| Error::parse(5, format!("bad integer {a:?}")))?;
            let v: i64 = b.trim().parse().map_err(|_| Error::parse(6 + a.len(), format!("bad integer {b:?}")))?;
            if u >= 0 || v >= 0 {
                return Err(Error::parse(5, "quaternion parameters must be negative (totally definite)"));
            }
            return Ok(Algebra::Quaternion(u, v));
        }
        Err(Error::parse(0, format!("unknown algebra descriptor {t:?}")))
    }

    pub fn dimension(&self) -> usize {
        match self {
            Algebra::Rationals => 1,
            Algebra::ImaginaryQuadratic(_) => 2,
            Algebra::Quaternion(..) => 4,
        }
    }

    pub fn is_commutative(&self) -> bool {
        !matches!(self, Algebra::Quaternion(..))
    }

    pub fn basis_labels(&self) -> Vec<String> {
        match self {
            Algebra::Rationals => vec!["1".into()],
            Algebra::ImaginaryQuadratic(d) => vec!["1".into(), format!("√−{d}")],
            Algebra::Quaternion(..) => ["1", "i", "j", "k"].iter().map(|s| s.to_string()).collect(),
        }
    }

    /// `e_a · e_b = coef · e_c`, returned as `(coef, c)`.
    pub fn basis_product(&self, a: usize, b: usize) -> (i64, usize) {
        if a == 0 {
            return (1, b);
        }
        if b == 0 {
            return (1, a);
        }
        match *self {
            Algebra::Rationals => unreachable!(),
            Algebra::ImaginaryQuadratic(d) => (-(d as i64), 0),
            Algebra::Quaternion(u, v) => match (a, b) {
                (1, 1) => (u, 0),
                (1, 2) => (1, 3),
                (1, 3) => (u, 2),
                (2, 1) => (-1, 3),
                (2, 2) => (v, 0),
                (2, 3) => (-v, 1),
                (3, 1) => (-u, 2),
                (3, 2) => (v, 1),
                (3, 3) => (-u * v, 0),
                _ => unreachable!(),
            },
        }
    }

    /// Full multiplication table as dense structure constants.
    pub fn table(&self) -> Vec<Vec<Vec<i64>>> {
        let n = self.dimension();
        let mut t = vec![vec![vec![0i64; n]; n]; n];
        for a in 0..n {
            for b in 0..n {
                let (c, k) = self.basis_product(a, b);
                t[a][b][k] = c;
            }
        }
        t
    }

    /// Checks associativity and unitality of the table on all basis triples.
    pub fn check_table(&self) -> Result<()> {
        let n = self.dimension();
        let t = self.table();
        let mul = |x: &[i64], y: &[i64]| {
            let mut out = vec![0i64; n];
            for a in 0..n {
                for b in 0..n {
                    if x[a] == 0 || y[b] == 0 {
                        continue;
                    }
                    for c in 0..n {
                        out[c] += x[a] * y[b] * t[a][b][c];
                    }
                }
            }
            out
        };
        let unit = |i: usize| {
            let mut v = vec![0i64; n];
            v[i] = 1;
            v
        };
        for a in 0..n {
            if mul(&unit(0), &unit(a)) != unit(a) || mul(&unit(a), &unit(0)) != unit(a) {
                return Err(Error::invariant(format!("{self}: 1 is not neutral")));
            }
            for b in 0..n {
                for c in 0..n {
                    let l = mul(&mul(&unit(a), &unit(b)), &unit(c));
                    let r = mul(&unit(a), &mul(&unit(b), &unit(c)));
                    if l != r {
                        return Err(Error::invariant(format!("{self}: table not associative at ({a},{b},{c})")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Coefficients `c_a` with `N(x) = Σ c_a x_a²` (the basis is orthogonal for the norm form).
    pub fn norm_weights(&self) -> Vec<i64> {
        match *self {
            Algebra::Rationals => vec![1],
            Algebra::ImaginaryQuadratic(d) => vec![1, d as i64],
            Algebra::Quaternion(u, v) => vec![1, -u, -v, u * v],
        }
    }
}

impl fmt::Display for Algebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algebra::Rationals => write!(f, "Q"),
            Algebra::ImaginaryQuadratic(d) => write!(f, "Qi:{d}"),
            Algebra::Quaternion(u, v) => write!(f, "quat:{u},{v}"),
        }
    }
}

/// An element of an [`Algebra`], as exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Element {
    algebra: Algebra,
    coords: Vec<Rational>,
}

pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let r = t
        .parse::<Rational>()
        .map_err(|_| Error::parse(0, format!("bad rational {t:?}")))?;
    Ok(r)
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl Element {
    pub fn new(algebra: Algebra, coords: Vec<Rational>) -> Result<Self> {
        if coords.len() != algebra.dimension() {
            return Err(Error::domain(format!(
                "{algebra} has dimension {}, got {} coordinates",
                algebra.dimension(),
                coords.len()
            )));
        }
        Ok(Element { algebra, coords })
    }

    pub fn from_ints(algebra: Algebra, coords: &[i64]) -> Result<Self> {
        Self::new(algebra, coords.iter().map(|&c| Rational::from_integer(c.into())).collect())
    }

    /// Coordinates given as `(numerator, denominator)` pairs.
    pub fn from_fractions(algebra: Algebra, coords: &[(i64, i64)]) -> Result<Self> {
        let mut out = Vec::with_capacity(coords.len());
        for &(p, q) in coords {
            if q == 0 {
                return Err(Error::DivisionByZero);
            }
            out.push(Rational::new(p.into(), q.into()));
        }
        Self::new(algebra, out)
    }

    pub fn zero(algebra: Algebra) -> Self {
        Element { algebra, coords: vec![Rational::zero(); algebra.dimension()] }
    }

    pub fn scalar(algebra: Algebra, r: Rational) -> Self {
        let mut e = Self::zero(algebra);
        e.coords[0] = r;
        e
    }

    pub fn one(algebra: Algebra) -> Self {
        Self::scalar(algebra, Rational::one())
    }

    pub fn basis(algebra: Algebra, i: usize) -> Self {
        let mut e = Self::zero(algebra);
        e.coords[i] = Rational::one();
        e
    }

    /// Parses a JSON-style array of `"p/q"` strings (quotes optional).
    pub fn parse(algebra: Algebra, text: &str) -> Result<Self> {
        let t = text.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| Error::parse(0, "element must be a bracketed coordinate list"))?;
        let mut coords = Vec::new();
        for part in inner.split(',') {
            let p = part.trim().trim_matches('"');
            coords.push(parse_rational(p)?);
        }
        Self::new(algebra, coords)
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    fn same(&self, other: &Self) -> Result<()> {
        if self.algebra != other.algebra {
            return Err(Error::DescriptorMismatch(self.algebra.to_string(), other.algebra.to_string()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect();
        Ok(Element { algebra: self.algebra, coords })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect();
        Ok(Element { algebra: self.algebra, coords })
    }

    pub fn neg(&self) -> Self {
        Element { algebra: self.algebra, coords: self.coords.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        Element { algebra: self.algebra, coords: self.coords.iter().map(|c| c * r).collect() }
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.same(other)?;
        let n = self.algebra.dimension();
        let mut out = vec![Rational::zero(); n];
        for a in 0..n {
            if self.coords[a].is_zero() {
                continue;
            }
            for b in 0..n {
                if other.coords[b].is_zero() {
                    continue;
                }
                let (c, k) = self.algebra.basis_product(a, b);
                out[k] += &self.coords[a] * &other.coords[b] * Rational::from_integer(c.into());
            }
        }
        Ok(Element { algebra: self.algebra, coords: out })
    }

    pub fn conjugate(&self) -> Self {
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(i, c)| if i == 0 { c.clone() } else { -c })
            .collect();
        Element { algebra: self.algebra, coords }
    }

    pub fn reduced_norm(&self) -> Rational {
        self.algebra
            .norm_weights()
            .iter()
            .zip(&self.coords)
            .map(|(&w, c)| c * c * Rational::from_integer(w.into()))
            .sum()
    }

    pub fn reduced_trace(&self) -> Rational {
        &self.coords[0] * Rational::from_integer(BigInt::from(2))
    }

    pub fn invert(&self) -> Result<Self> {
        let n = self.reduced_norm();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.conjugate().scale(&n.recip()))
    }

    /// Serializes as a list of `"p/q"` strings.
    pub fn to_strings(&self) -> Vec<String> {
        self.coords.iter().map(format_rational).collect()
    }

    /// Readable form such as `1/2+1/2i-j`.
    pub fn pretty(&self) -> String {
        let labels = self.algebra.basis_labels();
        let mut s = String::new();
        for (c, label) in self.coords.iter().zip(&labels) {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else if s.is_empty() { "" } else { "+" };
            let mag = c.abs();
            let body = if label == "1" {
                format_rational(&mag)
            } else if mag.is_one() {
                label.clone()
            } else {
                format!("{}{}", format_rational(&mag), label)
            };
            s.push_str(sign);
            s.push_str(&body);
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.to_strings().join(","))
    }
}
