//! Finite unit groups of definite orders via exact short-vector enumeration.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::algebra::Rational;
use crate::catalog;
use crate::error::{Error, Result};
use crate::groups::{cyclic, is_isomorphic, FiniteGroupTable, Subgroup};
use crate::intmat::{self, RatMatrix};
use crate::lattice::FiniteAbelianInvariants;
use crate::order::{Order, OrderElement};

/// `G = L·D·Lᵀ` style decomposition of the norm form:
/// `N(x) = Σᵢ dᵢ (xᵢ + Σ_{j>i} mᵢⱼ xⱼ)²`.
struct NormDecomposition {
    d: Vec<Rational>,
    m: RatMatrix,
}

fn gram(order: &Order) -> RatMatrix {
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    order
        .trace_form()
        .iter()
        .map(|r| r.iter().map(|&x| Rational::from_integer(x.into()) * &half).collect())
        .collect()
}

fn decompose(g: &RatMatrix) -> Result<NormDecomposition> {
    let n = g.len();
    let mut d = vec![Rational::zero(); n];
    let mut m = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        m[i][i] = Rational::one();
        let mut di = g[i][i].clone();
        for k in 0..i {
            di -= &m[k][i] * &m[k][i] * &d[k];
        }
        if !di.is_positive() {
            return Err(Error::InfiniteUnitGroup);
        }
        d[i] = di;
        for j in i + 1..n {
            let mut s = g[i][j].clone();
            for k in 0..i {
                s -= &m[k][i] * &m[k][j] * &d[k];
            }
            m[i][j] = s / &d[i];
        }
    }
    Ok(NormDecomposition { d, m })
}

fn floor(r: &Rational) -> BigInt {
    r.floor().to_integer()
}

fn enumerate(dec: &NormDecomposition, i: usize, x: &mut Vec<BigInt>, remaining: Rational, out: &mut Vec<Vec<BigInt>>) {
    let n = x.len();
    let mut center = Rational::zero();
    for j in i + 1..n {
        center -= &dec.m[i][j] * Rational::from_integer(x[j].clone());
    }
    let mut visit = |xi: BigInt, x: &mut Vec<BigInt>| -> bool {
        let diff = Rational::from_integer(xi.clone()) - &center;
        let used = &dec.d[i] * &diff * &diff;
        if used > remaining {
            return false;
        }
        x[i] = xi;
        let rest = &remaining - used;
        if i == 0 {
            if rest.is_zero() {
                out.push(x.clone());
            }
        } else {
            enumerate(dec, i - 1, x, rest, out);
        }
        true
    };
    let start = floor(&center);
    let mut k = start.clone();
    while visit(k.clone(), x) {
        k -= 1;
    }
    let mut k: BigInt = start + 1;
    while visit(k.clone(), x) {
        k += 1;
    }
    x[i] = BigInt::zero();
}

/// All `x ∈ O` with `N(x) = t`, sorted lexicographically by order coordinates.
pub fn short_vectors(order: &Order, t: &BigInt) -> Result<Vec<OrderElement>> {
    if t.is_negative() {
        return Ok(Vec::new());
    }
    let dec = decompose(&gram(order))?;
    let n = order.rank();
    let mut out = Vec::new();
    let mut x = vec![BigInt::zero(); n];
    enumerate(&dec, n - 1, &mut x, Rational::from_integer(t.clone()), &mut out);
    let mut v: Vec<OrderElement> = out.into_iter().map(OrderElement).collect();
    v.sort();
    v.dedup();
    Ok(v)
}

/// The unit group with its multiplication table (indices into `elements`).
#[derive(Clone, Debug)]
pub struct UnitGroup {
    pub elements: Vec<OrderElement>,
    pub group: FiniteGroupTable,
}

impl UnitGroup {
    pub fn new(order: &Order) -> Result<Self> {
        let elements = short_vectors(order, &BigInt::one())?;
        let index: HashMap<OrderElement, usize> = elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let mut table = vec![vec![0usize; elements.len()]; elements.len()];
        for (a, x) in elements.iter().enumerate() {
            for (b, y) in elements.iter().enumerate() {
                let p = order.mul(x, y);
                table[a][b] = *index
                    .get(&p)
                    .ok_or_else(|| Error::invariant(format!("unit product {} not a unit", order.pretty(&p))))?;
            }
        }
        let names = elements.iter().map(|e| order.pretty(e)).collect();
        let group = FiniteGroupTable::from_table(table, Some(names)).map_err(|e| Error::invariant(e.to_string()))?;
        if elements[group.identity()] != order.one() {
            return Err(Error::invariant("identity of the unit table is not 1"));
        }
        Ok(UnitGroup { elements, group })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, x: &OrderElement) -> Option<usize> {
        self.elements.iter().position(|e| e == x)
    }

    pub fn identity(&self) -> usize {
        self.group.identity()
    }

    pub fn structure(&self) -> String {
        identify_group(&self.group)
    }

    pub fn generators(&self) -> Vec<OrderElement> {
        self.group.generating_set().into_iter().map(|i| self.elements[i].clone()).collect()
    }

    pub fn derived_subgroup(&self) -> Subgroup {
        self.group.derived_subgroup()
    }

    pub fn abelianization(&self) -> FiniteAbelianInvariants {
        self.group.abelianization()
    }
}

pub fn unit_group(order: &Order) -> Result<UnitGroup> {
    UnitGroup::new(order)
}

/// Names the group as `C<n>`, `Q8`, `SL(2,3)` or `C3:C4` (for orders up to 48), else `other`.
pub fn identify_group(g: &FiniteGroupTable) -> String {
    let n = g.order();
    if n > 48 {
        return "other".into();
    }
    if is_isomorphic(g, &cyclic(n)) {
        return format!("C{n}");
    }
    let models: [(&str, fn() -> Result<FiniteGroupTable>); 3] = [
        ("Q8", || Ok(catalog::q8()?.group)),
        ("SL(2,3)", || Ok(catalog::sl23()?.group)),
        ("C3:C4", || catalog::cyclic_semidirect(3, 4)),
    ];
    for (name, build) in models {
        if let Ok(m) = build() {
            if m.order() == n && is_isomorphic(g, &m) {
                return name.into();
            }
        }
    }
    "other".into()
}

pub fn unit_abelianization(ug: &UnitGroup) -> FiniteAbelianInvariants {
    ug.abelianization()
}

fn is_primitive(rows: &[Vec<BigInt>], n: usize) -> bool {
    let s = intmat::smith(rows, n);
    s.rank() == rows.len() && s.diagonal.iter().all(|d| d.is_one())
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// A largest set of units that extends to a Z-basis of the order.
pub fn unit_basis_witness(order: &Order, ug: &UnitGroup) -> Vec<OrderElement> {
    // ±u span the same line, so keep one representative per sign class
    let mut reps: Vec<OrderElement> = Vec::new();
    for u in &ug.elements {
        let neg = order.neg(u);
        if !reps.contains(&neg) {
            reps.push(u.clone());
        }
    }
    let n = order.rank();
    for k in (1..=n.min(reps.len())).rev() {
        for s in subsets(reps.len(), k) {
            let rows: Vec<Vec<BigInt>> = s.iter().map(|&i| reps[i].0.clone()).collect();
            if is_primitive(&rows, n) {
                return s.iter().map(|&i| reps[i].clone()).collect();
            }
        }
    }
    Vec::new()
}

/// `inv_O`: the maximal number of units in a Z-basis of `O`.
pub fn inv_of_order(order: &Order) -> Result<usize> {
    let ug = unit_group(order)?;
    Ok(unit_basis_witness(order, &ug).len())
}

/// Q-dimension of the span of `subset`.
pub fn rational_span(subset: &[OrderElement]) -> usize {
    let rows: Vec<Vec<BigInt>> = subset.iter().map(|x| x.0.clone()).collect();
    intmat::rank_rational(&intmat::to_rational(&rows))
}

/// Exhaustive box search, used as an independent check on [`short_vectors`]:
/// `|xᵢ| ≤ ⌊√(t·(G⁻¹)ᵢᵢ)⌋` by Cauchy–Schwarz.
pub fn short_vectors_box(order: &Order, t: &BigInt) -> Vec<OrderElement> {
    let g = gram(order);
    let inv = intmat::inverse_rational(&g).expect("definite form");
    let n = order.rank();
    let bounds: Vec<BigInt> = (0..n)
        .map(|i| {
            let r = Rational::from_integer(t.clone()) * &inv[i][i];
            floor(&r).sqrt()
        })
        .collect();
    let mut out = Vec::new();
    let mut x: Vec<BigInt> = bounds.iter().map(|b| -b).collect();
    loop {
        let e = OrderElement(x.clone());
        if &order.norm(&e) == t {
            out.push(e);
        }
        let mut i = 0;
        loop {
            if i == n {
                out.sort();
                return out;
            }
            x[i] += 1;
            if x[i] > bounds[i] {
                x[i] = -bounds[i].clone();
                i += 1;
            } else {
                break;
            }
        }
    }
}
