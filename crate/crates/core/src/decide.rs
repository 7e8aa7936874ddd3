//! Decision procedures for group rings and for `E₂`, `B₂` and GRK groups over orders.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::algebra::Algebra;
use crate::catalog::{self, forbidden_catalog};
use crate::error::{Error, Result};
use crate::groups::{maps_onto, FiniteGroupTable};
use crate::intmat;
use crate::order::{Order, OrderElement};
use crate::units::{identify_group, short_vectors, unit_group};

/// Reported alongside every cut decision.
pub const CUT_CRITERION_NOTE: &str =
    "cut decided by: g^j is conjugate to g or g^-1 for every j coprime to ord(g)";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupDecision {
    pub hfa: bool,
    pub fab: bool,
    pub t: bool,
    pub hfr: bool,
    pub cut: bool,
    pub forbidden_witness: Option<String>,
    pub certificate: String,
}

/// The first catalog group that `g` maps onto.
pub fn forbidden_quotient(g: &FiniteGroupTable) -> Result<Option<String>> {
    for f in forbidden_catalog()? {
        let m = f.group.order();
        if m > g.order() || g.order() % m != 0 {
            continue;
        }
        if maps_onto(g, &f.group)?.is_some() {
            return Ok(Some(f.name.clone()));
        }
    }
    Ok(None)
}

/// HFA for `U(ZG)`; by equivalence the same answer decides FAb, (T) and HFR.
pub fn decide_hfa(g: &FiniteGroupTable) -> Result<GroupDecision> {
    let cut = crate::groups::is_cut(g);
    let witness = forbidden_quotient(g)?;
    let hfa = cut && witness.is_none();
    let certificate = match (&witness, cut) {
        (Some(w), _) => format!("maps onto {w}"),
        (None, false) => "not cut".to_string(),
        (None, true) => "cut and no forbidden quotient".to_string(),
    };
    Ok(GroupDecision { hfa, fab: hfa, t: hfa, hfr: hfa, cut, forbidden_witness: witness, certificate })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OddOrderReport {
    pub hfa: bool,
    pub fab: bool,
    pub finite_abelianization: bool,
    pub cut: bool,
}

/// For groups without type-II components all four properties coincide with cut.
/// Even order is refused unless the caller asserts the hypothesis.
pub fn decide_odd_order(g: &FiniteGroupTable, assume_no_type_two: bool) -> Result<OddOrderReport> {
    if g.order() % 2 == 0 && !assume_no_type_two {
        return Err(Error::domain(format!(
            "group of even order {} needs the no-type-II assertion",
            g.order()
        )));
    }
    let cut = crate::groups::is_cut(g);
    Ok(OddOrderReport { hfa: cut, fab: cut, finite_abelianization: cut, cut })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExceptionalType {
    TypeI,
    TypeII,
    None,
}

impl std::fmt::Display for ExceptionalType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ExceptionalType::TypeI => "TypeI",
            ExceptionalType::TypeII => "TypeII",
            ExceptionalType::None => "None",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExceptionalReport {
    pub kind: ExceptionalType,
    pub totally_definite: bool,
    pub division: bool,
    pub in_catalog: bool,
    /// Finite primes ramified in a quaternion algebra.
    pub ramified: Vec<u64>,
}

fn legendre(a: i128, p: i128) -> i128 {
    let r = BigInt::from(a.rem_euclid(p)).modpow(&BigInt::from((p - 1) / 2), &BigInt::from(p));
    if r.is_zero() {
        0
    } else if r.is_one() {
        1
    } else {
        -1
    }
}

fn split_power(mut a: i128, p: i128) -> (u32, i128) {
    let mut k = 0;
    while a % p == 0 {
        a /= p;
        k += 1;
    }
    (k, a)
}

/// The Hilbert symbol `(a, b)_p` for nonzero integers and a prime `p`.
pub fn hilbert_symbol(a: i64, b: i64, p: u64) -> i32 {
    let (a, b, p) = (a as i128, b as i128, p as i128);
    let (alpha, u) = split_power(a, p);
    let (beta, v) = split_power(b, p);
    let (alpha, beta) = (alpha as i128, beta as i128);
    if p == 2 {
        let eps = |x: i128| ((x - 1) / 2).rem_euclid(2);
        let omega = |x: i128| ((x * x - 1) / 8).rem_euclid(2);
        let e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u);
        return if e % 2 == 0 { 1 } else { -1 };
    }
    let mut s = if (alpha * beta * ((p - 1) / 2)) % 2 == 0 { 1 } else { -1 };
    if beta % 2 == 1 {
        s *= legendre(u, p);
    }
    if alpha % 2 == 1 {
        s *= legendre(v, p);
    }
    s as i32
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Finite ramified primes of `(u, v / Q)`.
pub fn ramified_primes(u: i64, v: i64) -> Vec<u64> {
    let mut ps = prime_factors(2 * u.unsigned_abs() * v.unsigned_abs());
    ps.dedup();
    ps.into_iter().filter(|&p| hilbert_symbol(u, v, p) == -1).collect()
}

pub fn exceptional_type(algebra: Algebra, n: usize) -> ExceptionalReport {
    let (totally_definite, division, ramified, in_catalog, finite_units) = match algebra {
        Algebra::Rationals => (false, true, vec![], true, true),
        Algebra::ImaginaryQuadratic(d) => (false, true, vec![], matches!(d, 1 | 2 | 3), true),
        Algebra::Quaternion(u, v) => {
            let definite = u < 0 && v < 0;
            let ram = ramified_primes(u, v);
            let division = definite || !ram.is_empty();
            let catalog = definite && (ram == [2] || ram == [3] || ram == [5]);
            (definite, division, ram, catalog, definite)
        }
    };
    let kind = match n {
        1 if !algebra.is_commutative() && division && !totally_definite => ExceptionalType::TypeI,
        2 if division && finite_units => ExceptionalType::TypeII,
        _ => ExceptionalType::None,
    };
    ExceptionalReport { kind, totally_definite, division, in_catalog, ramified }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentPredicates {
    pub has_m2q: bool,
    pub has_m2h5: bool,
    pub solvable: bool,
}

pub fn component_predicates(g: &FiniteGroupTable) -> Result<ComponentPredicates> {
    let onto = |h: &FiniteGroupTable| -> Result<bool> {
        if h.order() > g.order() || g.order() % h.order() != 0 {
            return Ok(false);
        }
        Ok(maps_onto(g, h)?.is_some())
    };
    let has_m2q = onto(&catalog::d8()?.group)? || onto(&catalog::s3()?.group)?;
    let has_m2h5 = onto(&catalog::g240_90()?.group)?;
    let solvable = g.is_solvable();
    if solvable && has_m2h5 {
        return Err(Error::invariant("solvable group maps onto G240_90"));
    }
    Ok(ComponentPredicates { has_m2q, has_m2h5, solvable })
}

/// Ring isomorphism search: basis images range over elements of matching norm and trace.
pub fn order_isomorphic(a: &Order, b: &Order) -> Result<bool> {
    let n = a.rank();
    if n != b.rank() {
        return Ok(false);
    }
    if intmat::determinant(&intmat::from_i64(a.trace_form()))
        != intmat::determinant(&intmat::from_i64(b.trace_form()))
    {
        return Ok(false);
    }
    let mut candidates = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.basis_element(i);
        let tr = a.trace(&x);
        let c: Vec<OrderElement> =
            short_vectors(b, &a.norm(&x))?.into_iter().filter(|y| b.trace(y) == tr).collect();
        if c.is_empty() {
            return Ok(false);
        }
        candidates.push(c);
    }
    let mut images: Vec<OrderElement> = Vec::with_capacity(n);
    Ok(search_isomorphism(a, b, &candidates, &mut images))
}

fn apply(images: &[OrderElement], b: &Order, x: &OrderElement) -> OrderElement {
    let mut out = b.zero();
    for (c, img) in x.0.iter().zip(images) {
        out = b.add(&out, &b.scale(img, c));
    }
    out
}

fn search_isomorphism(
    a: &Order,
    b: &Order,
    candidates: &[Vec<OrderElement>],
    images: &mut Vec<OrderElement>,
) -> bool {
    let n = a.rank();
    if images.len() == n {
        let m: Vec<Vec<BigInt>> = images.iter().map(|x| x.0.clone()).collect();
        if intmat::determinant(&m).abs() != BigInt::one() || apply(images, b, &a.one()) != b.one() {
            return false;
        }
        for i in 0..n {
            for j in 0..n {
                let lhs = apply(images, b, &a.mul(&a.basis_element(i), &a.basis_element(j)));
                if lhs != b.mul(&images[i], &images[j]) {
                    return false;
                }
            }
        }
        return true;
    }
    for c in &candidates[images.len()] {
        images.push(c.clone());
        if search_isomorphism(a, b, candidates, images) {
            return true;
        }
        images.pop();
    }
    false
}

pub const FA_E2_ORDERS: [&str; 3] = ["I3", "O2", "O3"];

pub fn decide_fa_e2(order: &Order) -> Result<bool> {
    for name in FA_E2_ORDERS {
        if order_isomorphic(order, &Order::builtin(name)?)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Never holds for definite orders.
pub fn decide_hfa_e2(_order: &Order) -> Result<bool> {
    Ok(false)
}

pub fn decide_fa_borel(order: &Order) -> Result<bool> {
    Ok(identify_group(&unit_group(order)?.group) != "C2")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagonalMode {
    /// All diagonal unit pairs.
    D2,
    /// Pairs `[μ, ν]` with `μν ∈ U′`.
    DE2,
}

impl std::str::FromStr for DiagonalMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "D2" => Ok(DiagonalMode::D2),
            "DE2" => Ok(DiagonalMode::DE2),
            _ => Err(Error::parse(0, format!("unknown diagonal mode {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrkWitness {
    pub mu: OrderElement,
    pub nu: OrderElement,
    /// Characteristic polynomial of `x ↦ ν⁻¹xμ`, constant term first.
    pub charpoly: Vec<BigInt>,
}

/// Characteristic polynomial `det(tI − A)`, constant term first.
pub fn charpoly(a: &[Vec<BigInt>]) -> Vec<BigInt> {
    // Faddeev-LeVerrier
    let n = a.len();
    let a: Vec<Vec<BigRational>> = intmat::to_rational(&a.to_vec());
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        let mut am = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigRational::zero();
                for l in 0..n {
                    s += &a[i][l] * &m[l][j];
                }
                am[i][j] = s;
            }
        }
        for (i, row) in am.iter_mut().enumerate() {
            row[i] += &coeffs[n - k + 1];
        }
        m = am;
        let mut tr = BigRational::zero();
        for i in 0..n {
            let mut s = BigRational::zero();
            for l in 0..n {
                s += &a[i][l] * &m[l][i];
            }
            tr += s;
        }
        coeffs[n - k] = -tr / BigRational::from_integer(BigInt::from(k));
    }
    coeffs.into_iter().map(|c| c.to_integer()).collect()
}

/// Rational roots of a monic integer polynomial.
pub fn rational_roots(poly: &[BigInt]) -> Vec<BigInt> {
    let eval = |x: &BigInt| poly.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c);
    let mut roots = Vec::new();
    let Some(k) = poly.iter().position(|c| !c.is_zero()) else {
        return vec![BigInt::zero()];
    };
    if k > 0 {
        roots.push(BigInt::zero());
    }
    let c0 = poly[k].abs();
    let mut d = BigInt::one();
    while &d * &d <= c0 {
        if c0.is_multiple_of(&d) {
            for q in [d.clone(), &c0 / &d] {
                for r in [q.clone(), -q] {
                    if !roots.contains(&r) && eval(&r).is_zero() {
                        roots.push(r);
                    }
                }
            }
        }
        d += 1;
    }
    roots.sort();
    roots
}

/// Searches diagonal pairs `[μ, ν]` whose action `x ↦ ν⁻¹xμ` has no rational eigenvalue.
pub fn grk_criterion(order: &Order, mode: DiagonalMode) -> Result<Option<GrkWitness>> {
    let ug = unit_group(order)?;
    let derived = ug.derived_subgroup();
    let g = &ug.group;
    let mut nus: Vec<usize> = (0..ug.order()).collect();
    nus.sort_by_key(|&i| i != g.identity());
    for &nu in &nus {
        for mu in 0..ug.order() {
            if mode == DiagonalMode::DE2 && !derived.contains(g.mul(mu, nu)) {
                continue;
            }
            let nu_inv = &ug.elements[g.inv(nu)];
            let m = order.two_sided_matrix(nu_inv, &ug.elements[mu]);
            let poly = charpoly(&m);
            if rational_roots(&poly).is_empty() {
                return Ok(Some(GrkWitness {
                    mu: ug.elements[mu].clone(),
                    nu: ug.elements[nu].clone(),
                    charpoly: poly,
                }));
            }
        }
    }
    Ok(None)
}
