//! The subgroup `M` with `E₂(O)^ab ≅ O/M`, the ideal `N` governing
//! `GE₂(O)^ab`, and the rank formula.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::decide::order_isomorphic;
use crate::error::{Error, Result};
use crate::intmat::{self, IntMatrix};
use crate::lattice::{FiniteAbelianInvariants, Quotient};
use crate::order::{Order, OrderElement};
use crate::units::{short_vectors, unit_basis_witness, unit_group, UnitGroup};

/// Collects integer rows and keeps them reduced to a Hermite basis.
#[derive(Default)]
struct RowSpan {
    basis: IntMatrix,
    pending: IntMatrix,
}

impl RowSpan {
    fn push(&mut self, row: Vec<BigInt>) {
        if row.iter().all(|x| x.is_zero()) {
            return;
        }
        self.pending.push(row);
        if self.pending.len() >= 64 {
            self.flush();
        }
    }

    fn flush(&mut self) {
        if self.pending.is_empty() {
            return;
        }
        let mut rows = std::mem::take(&mut self.basis);
        rows.append(&mut self.pending);
        self.basis = intmat::hnf(&rows);
    }

    fn finish(mut self) -> IntMatrix {
        self.flush();
        self.basis
    }
}

#[derive(Clone, Debug)]
pub struct LoopGraphStats {
    pub states: usize,
    pub edges: usize,
}

#[derive(Clone, Debug)]
pub struct MSubgroupReport {
    pub type1: Vec<OrderElement>,
    pub type2: Vec<OrderElement>,
    pub type3: Vec<OrderElement>,
    pub type4: Vec<OrderElement>,
    /// Hermite basis of `M` in order coordinates.
    pub lattice: IntMatrix,
    pub loop_graph: LoopGraphStats,
}

impl MSubgroupReport {
    pub fn quotient(&self, rank: usize) -> Quotient {
        Quotient::new(&self.lattice, rank)
    }
}

fn dedup(mut v: Vec<OrderElement>) -> Vec<OrderElement> {
    v.sort();
    v.dedup();
    v
}

/// Type-(2) generators: closed walks at 1 in the graph on `U′` whose edges
/// `s → s·α⁻¹β⁻¹αβ` carry the value `3(α+1)(β+1)`; the walk sums are spanned
/// by `p(s) + v(e) − p(t)` for a spanning-tree potential `p`.
fn loop_generators(order: &Order, ug: &UnitGroup) -> (Vec<OrderElement>, LoopGraphStats) {
    let g = &ug.group;
    let n = ug.order();
    let three = BigInt::from(3);
    let one = order.one();
    let mut edges: Vec<(usize, OrderElement)> = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let c = g.commutator(a, b);
            let value = order.scale(
                &order.mul(&order.add(&ug.elements[a], &one), &order.add(&ug.elements[b], &one)),
                &three,
            );
            edges.push((c, value));
        }
    }
    let mut potential: HashMap<usize, OrderElement> = HashMap::from([(g.identity(), order.zero())]);
    let mut queue = VecDeque::from([g.identity()]);
    let mut order_seen = vec![g.identity()];
    while let Some(s) = queue.pop_front() {
        let ps = potential[&s].clone();
        for (c, v) in &edges {
            let t = g.mul(s, *c);
            if let std::collections::hash_map::Entry::Vacant(e) = potential.entry(t) {
                e.insert(order.add(&ps, v));
                queue.push_back(t);
                order_seen.push(t);
            }
        }
    }
    let mut gens = Vec::new();
    for &s in &order_seen {
        for (c, v) in &edges {
            let t = g.mul(s, *c);
            let x = order.sub(&order.add(&potential[&s], v), &potential[&t]);
            if !x.is_zero() {
                gens.push(x);
            }
        }
    }
    let stats = LoopGraphStats { states: order_seen.len(), edges: order_seen.len() * edges.len() };
    (dedup(gens), stats)
}

/// The span of all `3(α+1)(β+1)`; equals the type-(2) part when `U` is abelian.
pub fn abelian_shortcut(order: &Order, ug: &UnitGroup) -> IntMatrix {
    let one = order.one();
    let mut span = RowSpan::default();
    for a in &ug.elements {
        for b in &ug.elements {
            let v = order.scale(&order.mul(&order.add(a, &one), &order.add(b, &one)), &BigInt::from(3));
            span.push(v.0);
        }
    }
    span.finish()
}

pub fn m_subgroup(order: &Order) -> Result<MSubgroupReport> {
    let ug = unit_group(order)?;
    let n = order.rank();
    let mut type1 = Vec::new();
    for a in &ug.elements {
        for i in 0..n {
            let x = order.basis_element(i);
            let v = order.sub(&order.mul(&order.mul(a, &x), a), &x);
            if !v.is_zero() {
                type1.push(v);
            }
        }
    }
    let (type2, loop_graph) = loop_generators(order, &ug);
    let mut type3 = Vec::new();
    for x in short_vectors(order, &BigInt::from(2))? {
        let tr = order.trace(&x);
        type3.push(order.scalar(&(tr * 2 + 6)));
    }
    let mut type4 = Vec::new();
    for x in short_vectors(order, &BigInt::from(3))? {
        let tr = order.trace(&x);
        type4.push(order.scalar(&(tr * 3)));
    }
    let (type1, type3, type4) = (dedup(type1), dedup(type3), dedup(type4));
    let mut span = RowSpan::default();
    for v in type1.iter().chain(&type2).chain(&type3).chain(&type4) {
        span.push(v.0.clone());
    }
    Ok(MSubgroupReport { type1, type2, type3, type4, lattice: span.finish(), loop_graph })
}

/// `E₂(O)^ab ≅ O/M`.
pub fn e2_abelianization(order: &Order) -> Result<FiniteAbelianInvariants> {
    let m = m_subgroup(order)?;
    Ok(m.quotient(order.rank()).invariants().clone())
}

/// The two-sided ideal generated by `{u − 1}`, as a Hermite basis in order coordinates.
pub fn n_ideal(order: &Order) -> Result<IntMatrix> {
    let ug = unit_group(order)?;
    let one = order.one();
    let gens: Vec<OrderElement> = ug.elements.iter().map(|u| order.sub(u, &one)).collect();
    Ok(order.ideal_closure_coords(&gens))
}

#[derive(Clone, Debug)]
pub struct Ge2AbReport {
    pub o_mod_n: FiniteAbelianInvariants,
    pub u_ab: FiniteAbelianInvariants,
    pub total_order: BigInt,
    pub collapsed: bool,
}

pub fn ge2_abelianization(order: &Order) -> Result<Ge2AbReport> {
    let ug = unit_group(order)?;
    let n = n_ideal(order)?;
    let o_mod_n = Quotient::new(&n, order.rank()).invariants().clone();
    let u_ab = ug.abelianization();
    let (Some(a), Some(b)) = (o_mod_n.order(), u_ab.order()) else {
        return Err(Error::invariant("GE₂ abelianization pieces must be finite"));
    };
    if o_mod_n.torsion.iter().any(|d| d != &BigInt::from(2)) {
        return Err(Error::invariant(format!("O/N = {o_mod_n} is not elementary abelian of exponent 2")));
    }
    Ok(Ge2AbReport { collapsed: o_mod_n.is_trivial(), o_mod_n, u_ab, total_order: a * b })
}

/// The five equivalent finiteness conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitenessConditions {
    pub finite_abelianization: bool,
    pub isomorphic_to_listed_order: bool,
    pub unit_basis: bool,
    pub ring_generated_by_units: bool,
    pub module_generated_by_units: bool,
}

impl FinitenessConditions {
    pub fn all_agree(&self) -> bool {
        let v = [
            self.finite_abelianization,
            self.isomorphic_to_listed_order,
            self.unit_basis,
            self.ring_generated_by_units,
            self.module_generated_by_units,
        ];
        v.iter().all(|&x| x == v[0])
    }
}

#[derive(Clone, Debug)]
pub struct RankReport {
    pub rank: usize,
    pub inv: usize,
    pub e2_ab: FiniteAbelianInvariants,
    pub finite: bool,
    pub conditions: FinitenessConditions,
    pub unit_basis: Vec<OrderElement>,
}

pub const FINITE_E2AB_ORDERS: [&str; 6] = ["Z", "I1", "I3", "L", "O2", "O3"];

fn is_full(rows: &IntMatrix, n: usize) -> bool {
    let h = intmat::hnf(rows);
    h == intmat::identity(n)
}

/// The subring generated by `gens`, by saturating the span under products.
fn ring_closure(order: &Order, gens: &[OrderElement]) -> IntMatrix {
    let mut current = intmat::hnf(&gens.iter().map(|g| g.0.clone()).collect::<Vec<_>>());
    loop {
        let mut rows = current.clone();
        for a in &current {
            for b in &current {
                rows.push(order.mul(&OrderElement(a.clone()), &OrderElement(b.clone())).0);
            }
        }
        let next = intmat::hnf(&rows);
        if next == current {
            return current;
        }
        current = next;
    }
}

pub fn rank_and_finiteness(order: &Order) -> Result<RankReport> {
    let ug = unit_group(order)?;
    let n = order.rank();
    let e2_ab = e2_abelianization(order)?;
    let witness = unit_basis_witness(order, &ug);
    let inv = witness.len();
    if e2_ab.free_rank != n - inv {
        return Err(Error::invariant(format!(
            "rank formula fails for {}: free rank {} but rank − inv = {n} − {inv}",
            order.name(),
            e2_ab.free_rank
        )));
    }
    let mut listed = false;
    for name in FINITE_E2AB_ORDERS {
        let other = Order::builtin(name)?;
        if other.rank() == n && order_isomorphic(order, &other)? {
            listed = true;
            break;
        }
    }
    let unit_rows: IntMatrix = ug.elements.iter().map(|u| u.0.clone()).collect();
    let conditions = FinitenessConditions {
        finite_abelianization: e2_ab.is_finite(),
        isomorphic_to_listed_order: listed,
        unit_basis: inv == n,
        ring_generated_by_units: is_full(&ring_closure(order, &ug.elements), n),
        module_generated_by_units: is_full(&unit_rows, n),
    };
    if !conditions.all_agree() {
        return Err(Error::invariant(format!("finiteness conditions disagree for {}: {conditions:?}", order.name())));
    }
    Ok(RankReport { rank: n, inv, finite: e2_ab.is_finite(), e2_ab, conditions, unit_basis: witness })
}

/// Whether `12u ∈ M` for all units `u`.
pub fn twelve_units_in_m(order: &Order, m: &MSubgroupReport) -> Result<bool> {
    let ug = unit_group(order)?;
    let q = m.quotient(order.rank());
    Ok(ug.elements.iter().all(|u| q.is_zero(&order.scale(u, &BigInt::from(12)).0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::battery;

    fn o(name: &str) -> Order {
        Order::builtin(name).unwrap()
    }

    #[test]
    fn m_of_integers() {
        let z = o("Z");
        let m = m_subgroup(&z).unwrap();
        assert_eq!(m.lattice, intmat::from_i64(&[vec![12]]));
        assert!(m.type3.is_empty() && m.type4.is_empty());
        assert!(e2_abelianization(&z).unwrap().is_cyclic_of_order(12));
    }

    #[test]
    fn m_of_gaussian_integers() {
        let i1 = o("I1");
        let m = m_subgroup(&i1).unwrap();
        assert_eq!(intmat::hnf(&m.lattice), intmat::from_i64(&[vec![2, 0], vec![0, 2]]));
        let ab = e2_abelianization(&i1).unwrap();
        assert_eq!(ab.torsion, vec![BigInt::from(2), BigInt::from(2)]);
        // hand expansion: type 1 gives −2 and −2i
        assert!(m.type1.contains(&i1.from_ints(&[-2, 0])));
        assert!(m.type1.contains(&i1.from_ints(&[0, -2])));
    }

    #[test]
    fn lipschitz_is_finite() {
        let ab = e2_abelianization(&o("L")).unwrap();
        assert!(ab.is_finite());
        assert_eq!(m_subgroup(&o("L")).unwrap().lattice.len(), 4);
    }

    #[test]
    fn infinite_cases() {
        assert_eq!(e2_abelianization(&o("Zsqrt:-3")).unwrap().free_rank, 1);
        assert_eq!(e2_abelianization(&o("Zsqrt:-5")).unwrap().free_rank, 1);
        assert_eq!(e2_abelianization(&o("O5")).unwrap().free_rank, 2);
    }

    #[test]
    fn n_ideals() {
        assert_eq!(n_ideal(&o("Z")).unwrap(), intmat::from_i64(&[vec![2]]));
        for name in ["O5", "I3", "O2", "O3"] {
            let ord = o(name);
            assert_eq!(n_ideal(&ord).unwrap(), intmat::identity(ord.rank()), "{name}");
        }
    }

    #[test]
    fn ge2_reports() {
        let z = ge2_abelianization(&o("Z")).unwrap();
        assert!(z.o_mod_n.is_cyclic_of_order(2));
        assert!(z.u_ab.is_cyclic_of_order(2));
        assert_eq!(z.total_order, BigInt::from(4));
        for (name, k) in [("O2", 3), ("O3", 4), ("O5", 6)] {
            let r = ge2_abelianization(&o(name)).unwrap();
            assert!(r.collapsed);
            assert!(r.u_ab.is_cyclic_of_order(k), "{name}");
        }
    }

    #[test]
    fn battery_invariants() {
        for ord in battery() {
            let m = m_subgroup(&ord).unwrap();
            assert!(twelve_units_in_m(&ord, &m).unwrap(), "{}", ord.name());
            let ug = unit_group(&ord).unwrap();
            if ug.group.is_abelian() {
                assert_eq!(intmat::hnf(&m.type2.iter().map(|x| x.0.clone()).collect::<Vec<_>>()), abelian_shortcut(&ord, &ug));
            }
            let n = n_ideal(&ord).unwrap();
            // 2O ⊆ N
            let q = Quotient::new(&n, ord.rank());
            for i in 0..ord.rank() {
                assert!(q.is_zero(&ord.scale(&ord.basis_element(i), &BigInt::from(2)).0));
            }
            let r = rank_and_finiteness(&ord).unwrap();
            let expected = FINITE_E2AB_ORDERS.contains(&ord.name()) || ord.name() == "Zsqrt:-1";
            assert_eq!(r.finite, expected, "{}", ord.name());
        }
    }
}
