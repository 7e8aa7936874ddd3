//! Orders with integer structure constants relative to their own basis.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::algebra::{is_square_free, parse_rational, Algebra, Element, Rational};
use crate::error::{Error, Result};
use crate::intmat::{self, IntMatrix, RatMatrix};
use crate::lattice::Lattice;

/// Integer coordinates of an order element with respect to the order basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderElement(pub Vec<BigInt>);

impl OrderElement {
    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }
}

/// A full-rank multiplication-closed lattice containing 1.
#[derive(Clone, Debug)]
pub struct Order {
    name: String,
    algebra: Algebra,
    basis: Vec<Element>,
    lattice: Lattice,
    to_order: RatMatrix,
    structure: Vec<Vec<Vec<i64>>>,
    conj: Vec<Vec<i64>>,
    trace_form: Vec<Vec<i64>>,
    one: OrderElement,
}

impl PartialEq for Order {
    fn eq(&self, other: &Self) -> bool {
        self.lattice == other.lattice && self.basis == other.basis
    }
}

impl Eq for Order {}

fn small(x: &Rational, what: &str) -> Result<i64> {
    if !x.is_integer() {
        return Err(Error::NotAnOrder(format!("{what} is not integral")));
    }
    x.to_integer()
        .to_i64()
        .ok_or_else(|| Error::domain(format!("{what} exceeds the supported size")))
}

impl Order {
    pub fn from_basis(name: impl Into<String>, algebra: Algebra, basis: Vec<Element>) -> Result<Self> {
        let n = algebra.dimension();
        if basis.len() != n {
            return Err(Error::NotAnOrder(format!("basis has {} elements, need {n}", basis.len())));
        }
        for b in &basis {
            if b.algebra() != algebra {
                return Err(Error::DescriptorMismatch(algebra.to_string(), b.algebra().to_string()));
            }
        }
        let b_mat: RatMatrix = basis.iter().map(|b| b.coords().to_vec()).collect();
        let to_order = intmat::inverse_rational(&b_mat)
            .ok_or_else(|| Error::NotAnOrder("basis is not of full rank".into()))?;
        let lattice = Lattice::canonical_basis(algebra, &basis)?;
        let coords = |x: &Element| intmat::rat_vec_mat(x.coords(), &to_order);
        let one_c = coords(&Element::one(algebra));
        let mut one = Vec::with_capacity(n);
        for c in &one_c {
            if !c.is_integer() {
                return Err(Error::NotAnOrder("1 is not in the lattice".into()));
            }
            one.push(c.to_integer());
        }
        let mut structure = vec![vec![vec![0i64; n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                let p = basis[i].multiply(&basis[j])?;
                for (k, c) in coords(&p).iter().enumerate() {
                    structure[i][j][k] = small(c, &format!("product b{i}·b{j} = {}", p.pretty()))
                        .map_err(|e| match e {
                            Error::NotAnOrder(_) => Error::NotAnOrder(format!(
                                "b{i}·b{j} = {} is not in the lattice",
                                p.pretty()
                            )),
                            other => other,
                        })?;
                }
            }
        }
        let mut conj = vec![vec![0i64; n]; n];
        let mut trace_form = vec![vec![0i64; n]; n];
        for i in 0..n {
            let c = basis[i].conjugate();
            for (k, x) in coords(&c).iter().enumerate() {
                conj[i][k] = small(x, "conjugate")?;
            }
            for j in 0..n {
                let t = basis[i].multiply(&basis[j].conjugate())?.reduced_trace();
                trace_form[i][j] = small(&t, "trace form")?;
            }
            small(&basis[i].reduced_norm(), "reduced norm")?;
        }
        Ok(Order { name: name.into(), algebra, basis, lattice, to_order, structure, conj, trace_form, one: OrderElement(one) })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Element] {
        &self.basis
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn structure_constants(&self) -> &Vec<Vec<Vec<i64>>> {
        &self.structure
    }

    /// `Tr(bᵢ·b̄ⱼ)`; twice the Gram matrix of the norm form.
    pub fn trace_form(&self) -> &Vec<Vec<i64>> {
        &self.trace_form
    }

    pub fn zero(&self) -> OrderElement {
        OrderElement(vec![BigInt::zero(); self.rank()])
    }

    pub fn one(&self) -> OrderElement {
        self.one.clone()
    }

    pub fn scalar(&self, k: &BigInt) -> OrderElement {
        self.scale(&self.one, k)
    }

    pub fn basis_element(&self, i: usize) -> OrderElement {
        let mut v = vec![BigInt::zero(); self.rank()];
        v[i] = BigInt::one();
        OrderElement(v)
    }

    pub fn from_ints(&self, c: &[i64]) -> OrderElement {
        assert_eq!(c.len(), self.rank());
        OrderElement(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn add(&self, x: &OrderElement, y: &OrderElement) -> OrderElement {
        OrderElement(x.0.iter().zip(&y.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, x: &OrderElement, y: &OrderElement) -> OrderElement {
        OrderElement(x.0.iter().zip(&y.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self, x: &OrderElement) -> OrderElement {
        OrderElement(x.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, x: &OrderElement, k: &BigInt) -> OrderElement {
        OrderElement(x.0.iter().map(|a| a * k).collect())
    }

    pub fn mul(&self, x: &OrderElement, y: &OrderElement) -> OrderElement {
        let n = self.rank();
        let mut out = vec![BigInt::zero(); n];
        for i in 0..n {
            if x.0[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y.0[j].is_zero() {
                    continue;
                }
                let p = &x.0[i] * &y.0[j];
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.structure[i][j][k];
                    if c != 0 {
                        *o += &p * c;
                    }
                }
            }
        }
        OrderElement(out)
    }

    pub fn conj(&self, x: &OrderElement) -> OrderElement {
        let n = self.rank();
        let mut out = vec![BigInt::zero(); n];
        for i in 0..n {
            if x.0[i].is_zero() {
                continue;
            }
            for (k, o) in out.iter_mut().enumerate() {
                let c = self.conj[i][k];
                if c != 0 {
                    *o += &x.0[i] * c;
                }
            }
        }
        OrderElement(out)
    }

    /// Bilinear trace form `Tr(x·ȳ)`.
    pub fn trace_pairing(&self, x: &OrderElement, y: &OrderElement) -> BigInt {
        let n = self.rank();
        let mut s = BigInt::zero();
        for i in 0..n {
            if x.0[i].is_zero() {
                continue;
            }
            for j in 0..n {
                let c = self.trace_form[i][j];
                if c != 0 && !y.0[j].is_zero() {
                    s += &x.0[i] * &y.0[j] * c;
                }
            }
        }
        s
    }

    pub fn norm(&self, x: &OrderElement) -> BigInt {
        self.trace_pairing(x, x) / 2
    }

    pub fn trace(&self, x: &OrderElement) -> BigInt {
        self.trace_pairing(x, &self.one)
    }

    pub fn is_unit(&self, x: &OrderElement) -> bool {
        self.norm(x).is_one()
    }

    /// Inverse inside the order, if it exists.
    pub fn inverse(&self, x: &OrderElement) -> Option<OrderElement> {
        let n = self.norm(x);
        if n.is_zero() {
            return None;
        }
        let c = self.conj(x);
        if n.is_one() {
            return Some(c);
        }
        let mut out = Vec::with_capacity(c.0.len());
        for a in c.0 {
            let (q, r) = a.div_rem(&n);
            if !r.is_zero() {
                return None;
            }
            out.push(q);
        }
        Some(OrderElement(out))
    }

    pub fn to_element(&self, x: &OrderElement) -> Element {
        let mut acc = Element::zero(self.algebra);
        for (c, b) in x.0.iter().zip(&self.basis) {
            if !c.is_zero() {
                acc = acc.add(&b.scale(&Rational::from_integer(c.clone()))).expect("same algebra");
            }
        }
        acc
    }

    /// Rational coordinates of an algebra element in the order basis.
    pub fn rational_coords(&self, x: &Element) -> Result<Vec<Rational>> {
        if x.algebra() != self.algebra {
            return Err(Error::DescriptorMismatch(self.algebra.to_string(), x.algebra().to_string()));
        }
        Ok(intmat::rat_vec_mat(x.coords(), &self.to_order))
    }

    pub fn from_element(&self, x: &Element) -> Result<OrderElement> {
        let c = self.rational_coords(x)?;
        let mut out = Vec::with_capacity(c.len());
        for r in c {
            if !r.is_integer() {
                return Err(Error::domain(format!("{} is not in the order {}", x.pretty(), self.name)));
            }
            out.push(r.to_integer());
        }
        Ok(OrderElement(out))
    }

    pub fn contains(&self, x: &Element) -> bool {
        self.lattice.contains(x)
    }

    pub fn pretty(&self, x: &OrderElement) -> String {
        self.to_element(x).pretty()
    }

    /// Matrix of `x ↦ a·x·b` acting on row vectors of order coordinates.
    pub fn two_sided_matrix(&self, a: &OrderElement, b: &OrderElement) -> IntMatrix {
        (0..self.rank())
            .map(|i| self.mul(&self.mul(a, &self.basis_element(i)), b).0)
            .collect()
    }

    /// Smallest two-sided ideal containing `generators`, as an HNF matrix in order coordinates.
    pub fn ideal_closure_coords(&self, generators: &[OrderElement]) -> IntMatrix {
        let n = self.rank();
        let mut current = intmat::hnf(&generators.iter().map(|g| g.0.clone()).collect::<Vec<_>>());
        loop {
            let mut rows = current.clone();
            for r in &current {
                let g = OrderElement(r.clone());
                for i in 0..n {
                    let b = self.basis_element(i);
                    rows.push(self.mul(&b, &g).0);
                    rows.push(self.mul(&g, &b).0);
                }
            }
            let next = intmat::hnf(&rows);
            if next == current {
                return current;
            }
            current = next;
        }
    }

    /// Two-sided ideal generated by algebra elements, which must lie in the order.
    pub fn ideal_closure(&self, generators: &[Element]) -> Result<Lattice> {
        let gens = generators.iter().map(|g| self.from_element(g)).collect::<Result<Vec<_>>>()?;
        let rows = self.ideal_closure_coords(&gens);
        self.lattice_of_rows(&rows)
    }

    pub fn lattice_of_rows(&self, rows: &IntMatrix) -> Result<Lattice> {
        let els: Vec<Element> = rows.iter().map(|r| self.to_element(&OrderElement(r.clone()))).collect();
        Lattice::canonical_basis(self.algebra, &els)
    }

    pub fn builtin(name: &str) -> Result<Self> {
        let name = name.trim();
        let q = Algebra::Rationals;
        let f = |a: Algebra, c: &[(i64, i64)]| Element::from_fractions(a, c);
        match name {
            "Z" => Order::from_basis("Z", q, vec![Element::one(q)]),
            "I1" | "I2" | "I3" | "I7" | "I11" => {
                let d: u64 = name[1..].parse().expect("literal");
                ring_of_integers(d, name)
            }
            "L" => {
                let a = Algebra::Quaternion(-1, -1);
                Order::from_basis("L", a, (0..4).map(|i| Element::basis(a, i)).collect())
            }
            "O2" => {
                let a = Algebra::Quaternion(-1, -1);
                let basis = vec![Element::basis(a, 0), Element::basis(a, 1), Element::basis(a, 2), f(a, &[(1, 2); 4])?];
                Order::from_basis("O2", a, basis)
            }
            "O3" => {
                let a = Algebra::Quaternion(-1, -3);
                let basis = vec![
                    Element::basis(a, 0),
                    Element::basis(a, 1),
                    f(a, &[(1, 2), (0, 1), (1, 2), (0, 1)])?,
                    f(a, &[(0, 1), (1, 2), (0, 1), (1, 2)])?,
                ];
                Order::from_basis("O3", a, basis)
            }
            "O5" => {
                let a = Algebra::Quaternion(-2, -5);
                let basis = vec![
                    Element::basis(a, 0),
                    f(a, &[(1, 2), (1, 2), (1, 2), (0, 1)])?,
                    f(a, &[(2, 4), (1, 4), (0, 1), (-1, 4)])?,
                    f(a, &[(2, 4), (3, 4), (0, 1), (1, 4)])?,
                ];
                Order::from_basis("O5", a, basis)
            }
            _ => {
                if let Some(rest) = name.strip_prefix("Zsqrt:") {
                    let t = rest.trim();
                    let d: i64 = t
                        .trim_start_matches('-')
                        .parse()
                        .map_err(|_| Error::parse(6, format!("bad integer {t:?}")))?;
                    if d <= 0 {
                        return Err(Error::parse(6, "Zsqrt needs d > 0"));
                    }
                    return z_sqrt(d as u64);
                }
                if let Some(rest) = name.strip_prefix("Iq:") {
                    let d: i64 = rest.trim().parse().map_err(|_| Error::parse(3, format!("bad integer {rest:?}")))?;
                    if d <= 0 || !is_square_free(d as u64) {
                        return Err(Error::parse(3, "Iq:<d> needs d a positive square-free integer"));
                    }
                    let label = if [1, 2, 3, 7, 11].contains(&d) { format!("I{d}") } else { format!("Iq:{d}") };
                    return ring_of_integers(d as u64, &label);
                }
                Err(Error::UnknownName(name.to_string()))
            }
        }
    }

    /// Parses an order spec: a builtin name or
    /// `custom:{"descriptor": "...", "basis": [["p/q", ...], ...]}`.
    pub fn parse_spec(text: &str) -> Result<Self> {
        let t = text.trim();
        let Some(json) = t.strip_prefix("custom:") else {
            return Order::builtin(t);
        };
        let v: Value = serde_json::from_str(json)
            .map_err(|e| Error::parse(7 + e.column().saturating_sub(1), format!("bad JSON: {e}")))?;
        let desc = v
            .get("descriptor")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::parse(7, "custom order needs a \"descriptor\" string"))?;
        let algebra = Algebra::parse(desc)?;
        let rows = v
            .get("basis")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::parse(7, "custom order needs a \"basis\" array"))?;
        let mut basis = Vec::new();
        for row in rows {
            let entries = row.as_array().ok_or_else(|| Error::parse(7, "basis rows must be arrays"))?;
            let mut coords = Vec::new();
            for e in entries {
                let s = match e {
                    Value::String(s) => s.clone(),
                    Value::Number(n) => n.to_string(),
                    _ => return Err(Error::parse(7, "coordinates must be \"p/q\" strings")),
                };
                coords.push(parse_rational(&s)?);
            }
            basis.push(Element::new(algebra, coords)?);
        }
        let name = v.get("name").and_then(Value::as_str).unwrap_or("custom").to_string();
        Order::from_basis(name, algebra, basis)
    }
}

fn ring_of_integers(d: u64, label: &str) -> Result<Order> {
    let a = Algebra::imaginary_quadratic(d)?;
    let second = if d % 4 == 3 {
        Element::from_fractions(a, &[(1, 2), (1, 2)])?
    } else {
        Element::basis(a, 1)
    };
    Order::from_basis(label, a, vec![Element::one(a), second])
}

/// `Z[√−d]` inside `Q(√−d′)` with `d = f²d′`, `d′` square-free.
fn z_sqrt(d: u64) -> Result<Order> {
    let mut f = 1u64;
    let mut k = 2u64;
    let mut rest = d;
    while k * k <= rest {
        while rest % (k * k) == 0 {
            rest /= k * k;
            f *= k;
        }
        k += 1;
    }
    let a = Algebra::imaginary_quadratic(rest)?;
    let root = Element::from_ints(a, &[0, f as i64])?;
    Order::from_basis(format!("Zsqrt:-{d}"), a, vec![Element::one(a), root])
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b: Vec<String> = self.basis.iter().map(|e| e.pretty()).collect();
        write!(f, "{} = Z⟨{}⟩ ⊂ {}", self.name, b.join(", "), self.algebra)
    }
}

pub const BUILTIN_ORDERS: [&str; 10] = ["Z", "I1", "I2", "I3", "I7", "I11", "L", "O2", "O3", "O5"];

/// The test battery: builtins plus `Z[√−d]` for `d ≤ 10`.
pub fn battery() -> Vec<Order> {
    let mut out: Vec<Order> = BUILTIN_ORDERS.iter().map(|n| Order::builtin(n).expect("builtin")).collect();
    for d in 1..=10 {
        out.push(Order::builtin(&format!("Zsqrt:-{d}")).expect("builtin"));
    }
    out
}

pub fn signed_to_string(x: &BigInt) -> String {
    if x.is_negative() {
        format!("-{}", x.abs())
    } else {
        x.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_construct() {
        for name in BUILTIN_ORDERS {
            let o = Order::builtin(name).unwrap();
            assert_eq!(o.rank(), o.algebra().dimension());
            assert!(o.contains(&Element::one(o.algebra())));
        }
    }

    #[test]
    fn builtin_basis_elements() {
        let o3 = Order::builtin("O3").unwrap();
        assert_eq!(o3.basis()[2].pretty(), "1/2+1/2j");
        let o5 = Order::builtin("O5").unwrap();
        assert_eq!(o5.basis()[2].pretty(), "1/2+1/4i-1/4k");
        assert_eq!(Order::builtin("Z").unwrap().rank(), 1);
    }

    #[test]
    fn not_an_order() {
        let a = Algebra::Quaternion(-1, -1);
        let basis = vec![
            Element::basis(a, 0),
            Element::basis(a, 1),
            Element::basis(a, 2),
            Element::from_fractions(a, &[(0, 1), (0, 1), (0, 1), (1, 2)]).unwrap(),
        ];
        assert!(matches!(Order::from_basis("bad", a, basis), Err(Error::NotAnOrder(_))));
        let q5 = Algebra::ImaginaryQuadratic(5);
        assert!(Order::from_basis("Z[√−5]", q5, vec![Element::basis(q5, 0), Element::basis(q5, 1)]).is_ok());
    }

    #[test]
    fn membership() {
        let o2 = Order::builtin("O2").unwrap();
        let l = Order::builtin("L").unwrap();
        let w = Element::from_fractions(o2.algebra(), &[(1, 2); 4]).unwrap();
        assert!(o2.contains(&w));
        assert!(!l.contains(&w));
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(Order::parse_spec("Iq:3").unwrap(), Order::builtin("I3").unwrap());
        assert!(matches!(Order::parse_spec("Iq:0"), Err(Error::Parse { .. })));
        let l = Order::parse_spec(r#"custom:{"descriptor":"quat:-1,-1","basis":[["1","0","0","0"],["0","1","0","0"],["0","0","1","0"],["0","0","0","1"]]}"#).unwrap();
        assert_eq!(l.lattice(), Order::builtin("L").unwrap().lattice());
        assert!(matches!(Order::parse_spec("nonsense"), Err(Error::UnknownName(_))));
        let z4 = Order::builtin("Zsqrt:-4").unwrap();
        assert_eq!(z4.algebra(), Algebra::ImaginaryQuadratic(1));
        assert_eq!(z4.norm(&z4.basis_element(1)), BigInt::from(4));
    }

    #[test]
    fn integer_arithmetic_matches_algebra() {
        for name in BUILTIN_ORDERS {
            let o = Order::builtin(name).unwrap();
            let n = o.rank();
            let x = o.from_ints(&[1, -2, 3, 1][..n]);
            let y = o.from_ints(&[2, 1, -1, 4][..n]);
            let prod = o.to_element(&o.mul(&x, &y));
            assert_eq!(prod, o.to_element(&x).multiply(&o.to_element(&y)).unwrap());
            assert_eq!(Rational::from_integer(o.norm(&x)), o.to_element(&x).reduced_norm());
            assert_eq!(Rational::from_integer(o.trace(&x)), o.to_element(&x).reduced_trace());
            assert_eq!(o.to_element(&o.conj(&x)), o.to_element(&x).conjugate());
            assert_eq!(o.from_element(&o.to_element(&x)).unwrap(), x);
        }
    }

    #[test]
    fn ideal_closures() {
        let z = Order::builtin("Z").unwrap();
        let q = Algebra::Rationals;
        let two = z.ideal_closure(&[Element::from_ints(q, &[-2]).unwrap()]).unwrap();
        assert_eq!(two, Lattice::canonical_basis(q, &[Element::from_ints(q, &[2]).unwrap()]).unwrap());
        assert_eq!(z.ideal_closure(&[]).unwrap().rank(), 0);
        let i1 = Order::builtin("I1").unwrap();
        let a = i1.algebra();
        let ideal = i1.ideal_closure(&[Element::from_ints(a, &[-1, 1]).unwrap()]).unwrap();
        let inv = crate::lattice::quotient_invariants(i1.lattice(), &ideal).unwrap();
        assert_eq!(inv.torsion, vec![BigInt::from(2)]);
        let rows = i1.ideal_closure_coords(&[i1.from_ints(&[-1, 1])]);
        assert_eq!(i1.ideal_closure_coords(&rows.iter().map(|r| OrderElement(r.clone())).collect::<Vec<_>>()), rows);
        let outside = Element::from_fractions(a, &[(1, 2), (0, 1)]).unwrap();
        assert!(i1.ideal_closure(&[outside]).is_err());
    }
}
