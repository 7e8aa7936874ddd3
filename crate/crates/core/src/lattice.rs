//! Z-lattices inside an algebra, stored canonically, and quotient invariants.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::{Algebra, Element, Rational};
use crate::error::{Error, Result};
use crate::intmat::{self, IntMatrix, Smith};

/// `(1/denominator) · rowspace(rows)`, with `rows` in Hermite normal form and
/// `gcd(denominator, entries) = 1`, so equal lattices have equal storage.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    algebra: Algebra,
    denominator: BigInt,
    rows: IntMatrix,
}

impl Lattice {
    pub fn zero(algebra: Algebra) -> Self {
        Lattice { algebra, denominator: BigInt::one(), rows: Vec::new() }
    }

    /// Canonical lattice spanned by `vectors`.
    pub fn canonical_basis(algebra: Algebra, vectors: &[Element]) -> Result<Self> {
        let mut den = BigInt::one();
        for v in vectors {
            if v.algebra() != algebra {
                return Err(Error::DescriptorMismatch(algebra.to_string(), v.algebra().to_string()));
            }
            for c in v.coords() {
                den = den.lcm(c.denom());
            }
        }
        let rows: IntMatrix = vectors
            .iter()
            .map(|v| v.coords().iter().map(|c| (c * Rational::from_integer(den.clone())).to_integer()).collect())
            .collect();
        Ok(Self::from_scaled_rows(algebra, den, &rows))
    }

    fn from_scaled_rows(algebra: Algebra, den: BigInt, rows: &IntMatrix) -> Self {
        let mut h = intmat::hnf(rows);
        if h.is_empty() {
            return Self::zero(algebra);
        }
        let mut g = den.clone();
        for r in &h {
            for x in r {
                g = g.gcd(x);
            }
        }
        for r in h.iter_mut() {
            for x in r.iter_mut() {
                *x = &*x / &g;
            }
        }
        Lattice { algebra, denominator: den / g, rows: h }
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    pub fn rows(&self) -> &IntMatrix {
        &self.rows
    }

    pub fn basis(&self) -> Vec<Element> {
        self.rows
            .iter()
            .map(|r| {
                let coords = r.iter().map(|x| Rational::new(x.clone(), self.denominator.clone())).collect();
                Element::new(self.algebra, coords).expect("row length matches dimension")
            })
            .collect()
    }

    /// Integer coordinates of `x` with respect to [`Lattice::basis`], if `x` lies in the lattice.
    pub fn coordinates(&self, x: &Element) -> Option<Vec<BigInt>> {
        if x.algebra() != self.algebra {
            return None;
        }
        let mut v = Vec::with_capacity(x.coords().len());
        for c in x.coords() {
            let s = c * Rational::from_integer(self.denominator.clone());
            if !s.is_integer() {
                return None;
            }
            v.push(s.to_integer());
        }
        let mut out = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let col = row.iter().position(|x| !x.is_zero()).expect("HNF rows are nonzero");
            let (q, r) = v[col].div_rem(&row[col]);
            if !r.is_zero() {
                return None;
            }
            for (a, b) in v.iter_mut().zip(row) {
                *a -= &q * b;
            }
            out.push(q);
        }
        if v.iter().all(|a| a.is_zero()) {
            Some(out)
        } else {
            None
        }
    }

    pub fn contains(&self, x: &Element) -> bool {
        self.coordinates(x).is_some()
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis().iter().all(|b| self.contains(b))
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b: Vec<String> = self.basis().iter().map(|e| e.pretty()).collect();
        write!(f, "⟨{}⟩", b.join(", "))
    }
}

/// Invariant factors `d₁ | d₂ | …` (each > 1) plus a free rank.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteAbelianInvariants {
    pub torsion: Vec<BigInt>,
    pub free_rank: usize,
}

impl FiniteAbelianInvariants {
    pub fn trivial() -> Self {
        FiniteAbelianInvariants { torsion: Vec::new(), free_rank: 0 }
    }

    /// Normalizes an arbitrary product of cyclic groups `⊕ Z/cᵢ` (a zero entry means `Z`).
    pub fn from_cyclic_orders(orders: &[BigInt]) -> Self {
        let n = orders.len();
        let rows: IntMatrix = (0..n)
            .map(|i| (0..n).map(|j| if i == j { orders[i].clone() } else { BigInt::zero() }).collect())
            .collect();
        Self::from_smith(&intmat::smith(&rows, n))
    }

    pub fn from_smith(s: &Smith) -> Self {
        let torsion: Vec<BigInt> = s.diagonal.iter().filter(|d| !d.is_one()).cloned().collect();
        FiniteAbelianInvariants { torsion, free_rank: s.columns - s.rank() }
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.torsion.iter().product())
    }

    pub fn exponent(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.torsion.last().cloned().unwrap_or_else(BigInt::one))
    }

    pub fn is_trivial(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }

    pub fn is_cyclic_of_order(&self, n: u64) -> bool {
        if n == 1 {
            return self.is_trivial();
        }
        self.free_rank == 0 && self.torsion == vec![BigInt::from(n)]
    }
}

impl fmt::Display for FiniteAbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("C{d}")).collect();
        if self.free_rank > 0 {
            parts.insert(0, if self.free_rank == 1 { "Z".into() } else { format!("Z^{}", self.free_rank) });
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" x "))
        }
    }
}

/// The quotient `Zⁿ / rowspace(generators)` with an explicit reduction map.
#[derive(Clone, Debug)]
pub struct Quotient {
    smith: Smith,
    invariants: FiniteAbelianInvariants,
}

impl Quotient {
    pub fn new(generators: &IntMatrix, n: usize) -> Self {
        let smith = intmat::smith(generators, n);
        let invariants = FiniteAbelianInvariants::from_smith(&smith);
        Quotient { smith, invariants }
    }

    pub fn invariants(&self) -> &FiniteAbelianInvariants {
        &self.invariants
    }

    /// Normal form of the class of `x`: torsion coordinates reduced into
    /// `[0, dᵢ)`, followed by the free coordinates.
    pub fn reduce(&self, x: &[BigInt]) -> Vec<BigInt> {
        let y = intmat::mat_vec_row(x, &self.smith.column_transform);
        let mut out = Vec::new();
        for (i, yi) in y.iter().enumerate() {
            match self.smith.diagonal.get(i) {
                Some(d) if d.is_one() => {}
                Some(d) => out.push(yi.mod_floor(d)),
                None => out.push(yi.clone()),
            }
        }
        out
    }

    pub fn is_zero(&self, x: &[BigInt]) -> bool {
        self.reduce(x).iter().all(|c| c.is_zero())
    }

    /// Sum of two classes given in the normal form of `reduce`.
    pub fn add_classes(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let moduli = self.smith.diagonal.iter().filter(|d| !d.is_one());
        let mut out: Vec<BigInt> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        for (c, d) in out.iter_mut().zip(moduli) {
            *c = c.mod_floor(d);
        }
        out
    }
}

/// Invariants of `ambient / sub`.
pub fn quotient_invariants(ambient: &Lattice, sub: &Lattice) -> Result<FiniteAbelianInvariants> {
    if ambient.algebra != sub.algebra {
        return Err(Error::DescriptorMismatch(ambient.algebra.to_string(), sub.algebra.to_string()));
    }
    let mut rows = Vec::with_capacity(sub.rank());
    for b in sub.basis() {
        let c = ambient
            .coordinates(&b)
            .ok_or_else(|| Error::domain(format!("{} is not contained in the ambient lattice", b.pretty())))?;
        rows.push(c);
    }
    let s = intmat::smith(&rows, ambient.rank());
    Ok(FiniteAbelianInvariants::from_smith(&s))
}

pub fn format_int(x: &BigInt) -> String {
    if x.is_negative() {
        format!("-{}", x.abs())
    } else {
        x.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::{HashMap, VecDeque};

    fn q_el(c: i64) -> Element {
        Element::from_ints(Algebra::Rationals, &[c]).unwrap()
    }

    #[test]
    fn gcd_lattice() {
        let l = Lattice::canonical_basis(Algebra::Rationals, &[q_el(2), q_el(3)]).unwrap();
        assert_eq!(l, Lattice::canonical_basis(Algebra::Rationals, &[q_el(1)]).unwrap());
        assert_eq!(l.rank(), 1);
        let z = Lattice::canonical_basis(Algebra::Rationals, &[q_el(0)]).unwrap();
        assert_eq!(z.rank(), 0);
    }

    #[test]
    fn index_two_in_gaussian() {
        let a = Algebra::ImaginaryQuadratic(1);
        let l = Lattice::canonical_basis(
            a,
            &[Element::from_ints(a, &[1, 1]).unwrap(), Element::from_ints(a, &[1, -1]).unwrap()],
        )
        .unwrap();
        let full = Lattice::canonical_basis(a, &[Element::basis(a, 0), Element::basis(a, 1)]).unwrap();
        let inv = quotient_invariants(&full, &l).unwrap();
        assert_eq!(inv.torsion, vec![BigInt::from(2)]);
        assert_eq!(inv.free_rank, 0);
    }

    #[test]
    fn simple_quotients() {
        let z = Lattice::canonical_basis(Algebra::Rationals, &[q_el(1)]).unwrap();
        let twelve = Lattice::canonical_basis(Algebra::Rationals, &[q_el(12)]).unwrap();
        assert_eq!(quotient_invariants(&z, &twelve).unwrap().torsion, vec![BigInt::from(12)]);
        assert!(quotient_invariants(&z, &z).unwrap().is_trivial());
        assert!(quotient_invariants(&twelve, &z).is_err());
        let a = Algebra::ImaginaryQuadratic(1);
        let full = Lattice::canonical_basis(a, &[Element::basis(a, 0), Element::basis(a, 1)]).unwrap();
        let two = Lattice::canonical_basis(
            a,
            &[Element::from_ints(a, &[2, 0]).unwrap(), Element::from_ints(a, &[0, 2]).unwrap()],
        )
        .unwrap();
        let inv = quotient_invariants(&full, &two).unwrap();
        assert_eq!(inv.torsion, vec![BigInt::from(2), BigInt::from(2)]);
    }

    #[test]
    fn membership_with_denominators() {
        let a = Algebra::Quaternion(-1, -1);
        let w = Element::from_fractions(a, &[(1, 2); 4]).unwrap();
        let hurwitz = Lattice::canonical_basis(
            a,
            &[Element::basis(a, 0), Element::basis(a, 1), Element::basis(a, 2), w.clone()],
        )
        .unwrap();
        let lipschitz = Lattice::canonical_basis(a, &(0..4).map(|i| Element::basis(a, i)).collect::<Vec<_>>()).unwrap();
        assert!(hurwitz.contains(&w));
        assert!(!lipschitz.contains(&w));
        assert!(hurwitz.contains_lattice(&lipschitz));
        let inv = quotient_invariants(&hurwitz, &lipschitz).unwrap();
        assert_eq!(inv.torsion, vec![BigInt::from(2)]);
    }

    #[test]
    fn invariants_normalize() {
        let inv = FiniteAbelianInvariants::from_cyclic_orders(&[BigInt::from(4), BigInt::from(6), BigInt::from(0)]);
        assert_eq!(inv.torsion, vec![BigInt::from(2), BigInt::from(12)]);
        assert_eq!(inv.free_rank, 1);
        assert_eq!(inv.to_string(), "Z x C2 x C12");
    }

    /// Breadth-first coset enumeration of `Zⁿ / L`, keyed by the HNF-reduced
    /// representative; returns the multiset of additive element orders.
    fn coset_orders(rows: &IntMatrix, n: usize) -> Vec<u64> {
        let h = intmat::hnf(rows);
        let reduce = |v: &[BigInt]| -> Vec<BigInt> {
            let mut v = v.to_vec();
            for row in &h {
                let col = row.iter().position(|x| !x.is_zero()).unwrap();
                let q = v[col].div_floor(&row[col]);
                for (a, b) in v.iter_mut().zip(row) {
                    *a -= &q * b;
                }
            }
            v
        };
        let zero = vec![BigInt::zero(); n];
        let mut seen: HashMap<Vec<BigInt>, ()> = HashMap::new();
        let mut queue = VecDeque::from([zero.clone()]);
        seen.insert(zero.clone(), ());
        while let Some(v) = queue.pop_front() {
            for i in 0..n {
                let mut w = v.clone();
                w[i] += 1;
                let w = reduce(&w);
                if !seen.contains_key(&w) {
                    seen.insert(w.clone(), ());
                    queue.push_back(w);
                }
            }
        }
        let index = seen.len() as u64;
        let divisors: Vec<u64> = (1..=index).filter(|d| index % d == 0).collect();
        let mut orders: Vec<u64> = seen
            .keys()
            .map(|v| {
                *divisors
                    .iter()
                    .find(|&&k| {
                        let kv: Vec<BigInt> = v.iter().map(|a| a * k).collect();
                        reduce(&kv) == zero
                    })
                    .unwrap()
            })
            .collect();
        orders.sort_unstable();
        orders
    }

    fn orders_from_invariants(inv: &FiniteAbelianInvariants) -> Vec<u64> {
        let ds: Vec<u64> = inv.torsion.iter().map(|d| d.to_string().parse().unwrap()).collect();
        let mut out = vec![1u64];
        for d in ds {
            let mut next = Vec::new();
            for &o in &out {
                for k in 0..d {
                    let ok = d / num_integer::gcd(k, d);
                    next.push(num_integer::lcm(o, ok));
                }
            }
            out = next;
        }
        out.sort_unstable();
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn quotient_matches_coset_enumeration(v in proptest::collection::vec(proptest::collection::vec(-6i64..7, 4), 4)) {
            let rows = intmat::from_i64(&v);
            let det = intmat::determinant(&rows).abs();
            prop_assume!(!det.is_zero() && det <= BigInt::from(10_000));
            let q = Quotient::new(&rows, 4);
            prop_assert_eq!(q.invariants().order().unwrap(), det.clone());
            prop_assert_eq!(coset_orders(&rows, 4), orders_from_invariants(q.invariants()));
        }

        #[test]
        fn canonical_basis_is_order_free(v in proptest::collection::vec(proptest::collection::vec((-6i64..7, 1i64..4), 4), 1..6)) {
            let a = Algebra::Quaternion(-1, -3);
            let els: Vec<Element> = v.iter().map(|c| Element::from_fractions(a, c).unwrap()).collect();
            let l = Lattice::canonical_basis(a, &els).unwrap();
            let mut rev = els.clone();
            rev.reverse();
            prop_assert_eq!(Lattice::canonical_basis(a, &rev).unwrap(), l.clone());
            prop_assert_eq!(Lattice::canonical_basis(a, &l.basis()).unwrap(), l.clone());
            for e in &els {
                prop_assert!(l.contains(e));
            }
        }
    }
}
