//! Finite groups as explicit multiplication tables.

use std::collections::{HashMap, HashSet, VecDeque};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::FiniteAbelianInvariants;

/// Largest group order for which normal subgroups are enumerated.
pub const MAX_NORMAL_SUBGROUP_ORDER: usize = 2000;

/// Associativity is checked on all triples up to this order, sampled above.
const FULL_ASSOCIATIVITY_BOUND: usize = 400;

#[derive(Clone, Debug)]
pub struct FiniteGroupTable {
    n: usize,
    table: Vec<u32>,
    identity: usize,
    inverse: Vec<usize>,
    names: Vec<String>,
    permutation_generators: Option<Vec<Vec<usize>>>,
}

/// A subgroup given by its sorted element list and a membership mask.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgroup {
    pub elements: Vec<usize>,
    pub generators: Vec<usize>,
}

impl Subgroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.elements.binary_search(&g).is_ok()
    }
}

impl FiniteGroupTable {
    /// Validates a table: identity, Latin-square rows/columns, inverses and
    /// associativity (all triples up to order 400, a fixed sample above).
    pub fn from_table(table: Vec<Vec<usize>>, names: Option<Vec<String>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::GroupConstruction("empty table".into()));
        }
        for row in &table {
            if row.len() != n {
                return Err(Error::GroupConstruction("table is not square".into()));
            }
            if row.iter().any(|&x| x >= n) {
                return Err(Error::GroupConstruction("entry out of range".into()));
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::GroupConstruction("no identity element".into()))?;
        let mut inverse = vec![usize::MAX; n];
        for x in 0..n {
            let y = (0..n)
                .find(|&y| table[x][y] == identity)
                .ok_or_else(|| Error::GroupConstruction(format!("element {x} has no right inverse")))?;
            if table[y][x] != identity {
                return Err(Error::GroupConstruction(format!("element {x} has no two-sided inverse")));
            }
            inverse[x] = y;
        }
        for x in 0..n {
            let mut seen = vec![false; n];
            for &y in &table[x] {
                if std::mem::replace(&mut seen[y], true) {
                    return Err(Error::GroupConstruction(format!("row {x} repeats an entry")));
                }
            }
        }
        let flat: Vec<u32> = table.iter().flatten().map(|&x| x as u32).collect();
        let names = names.unwrap_or_else(|| (0..n).map(|i| format!("g{i}")).collect());
        if names.len() != n {
            return Err(Error::GroupConstruction("wrong number of element names".into()));
        }
        let g = FiniteGroupTable { n, table: flat, identity, inverse, names, permutation_generators: None };
        g.check_associativity()?;
        Ok(g)
    }

    fn check_associativity(&self) -> Result<()> {
        let n = self.n;
        let bad = |a: usize, b: usize, c: usize| self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c));
        if n <= FULL_ASSOCIATIVITY_BOUND {
            for a in 0..n {
                for b in 0..n {
                    let ab = self.mul(a, b);
                    for c in 0..n {
                        if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                            return Err(Error::GroupConstruction(format!("not associative at ({a},{b},{c})")));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            for _ in 0..200_000 {
                let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if bad(a, b, c) {
                    return Err(Error::GroupConstruction(format!("not associative at ({a},{b},{c})")));
                }
            }
        }
        Ok(())
    }

    /// Closure of `generators` under `mul`; element 0 is `identity`.
    pub fn from_closure<T, F>(identity: T, generators: &[T], mul: F) -> Result<(Self, Vec<T>)>
    where
        T: Clone + Eq + Hash,
        F: Fn(&T, &T) -> T,
    {
        let mut elements = vec![identity.clone()];
        let mut index: HashMap<T, usize> = HashMap::from([(identity, 0)]);
        let mut i = 0;
        while i < elements.len() {
            for g in generators {
                let p = mul(&elements[i], g);
                if !index.contains_key(&p) {
                    index.insert(p.clone(), elements.len());
                    elements.push(p);
                }
            }
            i += 1;
            if elements.len() > 100_000 {
                return Err(Error::GroupConstruction("closure exceeds 100000 elements".into()));
            }
        }
        let n = elements.len();
        let mut table = vec![vec![0usize; n]; n];
        for a in 0..n {
            for b in 0..n {
                let p = mul(&elements[a], &elements[b]);
                table[a][b] = *index
                    .get(&p)
                    .ok_or_else(|| Error::GroupConstruction("operation is not closed on the generated set".into()))?;
            }
        }
        Ok((Self::from_table(table, None)?, elements))
    }

    /// Permutation group on `{0,…,d−1}`; permutations act on the right (`x·(στ) = (x·σ)·τ`).
    pub fn from_permutations(generators: &[Vec<usize>]) -> Result<Self> {
        let d = generators.first().map_or(0, |g| g.len());
        for g in generators {
            let mut seen = vec![false; d];
            if g.len() != d || g.iter().any(|&x| x >= d || std::mem::replace(&mut seen[x], true)) {
                return Err(Error::GroupConstruction(format!("{g:?} is not a permutation of 0..{d}")));
            }
        }
        let id: Vec<usize> = (0..d).collect();
        let (mut g, elements) = Self::from_closure(id, generators, |a: &Vec<usize>, b: &Vec<usize>| {
            a.iter().map(|&x| b[x]).collect()
        })?;
        g.names = elements.iter().map(|p| format!("{p:?}")).collect();
        g.permutation_generators = Some(generators.to_vec());
        Ok(g)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Self {
        assert_eq!(names.len(), self.n);
        self.names = names;
        self
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn name(&self, g: usize) -> &str {
        &self.names[g]
    }

    pub fn permutation_generators(&self) -> Option<&Vec<Vec<usize>>> {
        self.permutation_generators.as_ref()
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn product(&self, xs: &[usize]) -> usize {
        xs.iter().fold(self.identity, |acc, &x| self.mul(acc, x))
    }

    pub fn pow(&self, a: usize, k: i64) -> usize {
        let base = if k < 0 { self.inv(a) } else { a };
        let mut e = k.unsigned_abs();
        let mut acc = self.identity;
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    /// `g⁻¹ a g`.
    pub fn conjugate(&self, a: usize, g: usize) -> usize {
        self.mul(self.mul(self.inv(g), a), g)
    }

    /// `a⁻¹ b⁻¹ a b`.
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut k = 1;
        let mut x = a;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn element_orders(&self) -> Vec<usize> {
        (0..self.n).map(|a| self.element_order(a)).collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.n).all(|a| (a + 1..self.n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut class_of = vec![usize::MAX; self.n];
        let mut classes = Vec::new();
        for a in 0..self.n {
            if class_of[a] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let mut members = Vec::new();
            for g in 0..self.n {
                let c = self.conjugate(a, g);
                if class_of[c] == usize::MAX {
                    class_of[c] = id;
                    members.push(c);
                }
            }
            members.sort_unstable();
            classes.push(members);
        }
        classes
    }

    /// Class index of every element.
    pub fn class_map(&self) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for (i, c) in self.conjugacy_classes().iter().enumerate() {
            for &x in c {
                out[x] = i;
            }
        }
        out
    }

    pub fn center(&self) -> Subgroup {
        let elements: Vec<usize> =
            (0..self.n).filter(|&a| (0..self.n).all(|b| self.mul(a, b) == self.mul(b, a))).collect();
        self.subgroup_generated(&elements)
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        Subgroup { elements: vec![self.identity], generators: Vec::new() }
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup { elements: (0..self.n).collect(), generators: self.generating_set() }
    }

    /// Subgroup generated by `gens`, with a small generating set attached.
    pub fn subgroup_generated(&self, gens: &[usize]) -> Subgroup {
        let mut mask = vec![false; self.n];
        mask[self.identity] = true;
        let mut elements = vec![self.identity];
        let mut useful = Vec::new();
        for &g in gens {
            if mask[g] {
                continue;
            }
            useful.push(g);
            let mut i = 0;
            // re-close with all useful generators so far
            while i < elements.len() {
                let x = elements[i];
                for &h in &useful {
                    let p = self.mul(x, h);
                    if !mask[p] {
                        mask[p] = true;
                        elements.push(p);
                    }
                }
                i += 1;
            }
        }
        elements.sort_unstable();
        Subgroup { elements, generators: useful }
    }

    /// Greedy generating set, preferring elements of large order.
    pub fn generating_set(&self) -> Vec<usize> {
        let orders = self.element_orders();
        let mut candidates: Vec<usize> = (0..self.n).collect();
        candidates.sort_by_key(|&a| (std::cmp::Reverse(orders[a]), a));
        self.subgroup_generated(&candidates).generators
    }

    pub fn is_normal(&self, s: &Subgroup) -> bool {
        let gens = self.generating_set();
        let sub_gens = if s.generators.is_empty() { s.elements.clone() } else { s.generators.clone() };
        gens.iter().all(|&g| sub_gens.iter().all(|&x| s.contains(self.conjugate(x, g))))
    }

    pub fn normal_closure(&self, xs: &[usize]) -> Subgroup {
        let mut current = self.subgroup_generated(xs);
        let gens = self.generating_set();
        loop {
            let mut extra: Vec<usize> = current.generators.clone();
            let mut grew = false;
            for &g in &gens {
                for &x in &current.generators {
                    let c = self.conjugate(x, g);
                    if !current.contains(c) {
                        extra.push(c);
                        grew = true;
                    }
                }
            }
            if !grew {
                return current;
            }
            current = self.subgroup_generated(&extra);
        }
    }

    pub fn derived_subgroup(&self) -> Subgroup {
        let gens = self.generating_set();
        let comms: Vec<usize> =
            gens.iter().flat_map(|&a| gens.iter().map(move |&b| (a, b))).map(|(a, b)| self.commutator(a, b)).collect();
        self.normal_closure(&comms)
    }

    /// Orders of `G ⊇ G′ ⊇ G″ ⊇ …` until it stabilizes.
    pub fn derived_series_orders(&self) -> Vec<usize> {
        let mut out = vec![self.n];
        let mut g = self.clone();
        loop {
            let d = g.derived_subgroup();
            if d.order() == g.order() {
                return out;
            }
            out.push(d.order());
            if d.order() == 1 {
                return out;
            }
            g = g.restrict(&d);
        }
    }

    pub fn is_solvable(&self) -> bool {
        *self.derived_series_orders().last().expect("nonempty") == 1
    }

    /// The subgroup as a group in its own right (elements renumbered in sorted order).
    pub fn restrict(&self, s: &Subgroup) -> FiniteGroupTable {
        let pos: HashMap<usize, usize> = s.elements.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let table: Vec<Vec<usize>> =
            s.elements.iter().map(|&a| s.elements.iter().map(|&b| pos[&self.mul(a, b)]).collect()).collect();
        let names = s.elements.iter().map(|&x| self.names[x].clone()).collect();
        FiniteGroupTable::from_table_unchecked(table, names)
    }

    fn from_table_unchecked(table: Vec<Vec<usize>>, names: Vec<String>) -> Self {
        let n = table.len();
        let identity = (0..n).find(|&e| (0..n).all(|x| table[e][x] == x)).expect("identity");
        let mut inverse = vec![0; n];
        for x in 0..n {
            inverse[x] = (0..n).find(|&y| table[x][y] == identity).expect("inverse");
        }
        let flat = table.iter().flatten().map(|&x| x as u32).collect();
        FiniteGroupTable { n, table: flat, identity, inverse, names, permutation_generators: None }
    }

    /// `G/N` and the projection of each element to its coset index.
    pub fn quotient(&self, normal: &Subgroup) -> Result<(FiniteGroupTable, Vec<usize>)> {
        if !self.is_normal(normal) {
            return Err(Error::domain("quotient by a subgroup that is not normal"));
        }
        let mut coset = vec![usize::MAX; self.n];
        let mut reps = Vec::new();
        for g in 0..self.n {
            if coset[g] != usize::MAX {
                continue;
            }
            let id = reps.len();
            reps.push(g);
            for &x in &normal.elements {
                coset[self.mul(g, x)] = id;
            }
        }
        let m = reps.len();
        let table: Vec<Vec<usize>> =
            (0..m).map(|a| (0..m).map(|b| coset[self.mul(reps[a], reps[b])]).collect()).collect();
        let names = reps.iter().map(|&r| format!("{}N", self.names[r])).collect();
        Ok((FiniteGroupTable::from_table_unchecked(table, names), coset))
    }

    /// All normal subgroups, sorted by order then elements.
    pub fn normal_subgroups(&self) -> Result<Vec<Subgroup>> {
        if self.n > MAX_NORMAL_SUBGROUP_ORDER {
            return Err(Error::domain(format!(
                "normal subgroup enumeration is limited to order {MAX_NORMAL_SUBGROUP_ORDER}, got {}",
                self.n
            )));
        }
        let closures: Vec<Subgroup> = {
            let mut seen = HashSet::new();
            self.conjugacy_classes()
                .iter()
                .map(|c| self.normal_closure(c))
                .filter(|s| seen.insert(s.elements.clone()))
                .collect()
        };
        let mut found: HashSet<Vec<usize>> = HashSet::new();
        let mut list = vec![self.trivial_subgroup()];
        found.insert(list[0].elements.clone());
        let mut i = 0;
        while i < list.len() {
            for c in &closures {
                if c.elements.iter().all(|&x| list[i].contains(x)) {
                    continue;
                }
                let mut gens = list[i].generators.clone();
                gens.extend(&c.generators);
                let j = self.subgroup_generated(&gens);
                if found.insert(j.elements.clone()) {
                    list.push(j);
                }
            }
            i += 1;
        }
        list.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.elements.cmp(&b.elements)));
        Ok(list)
    }

    /// Invariant factors of `G/G′`.
    pub fn abelianization(&self) -> FiniteAbelianInvariants {
        let d = self.derived_subgroup();
        let (q, _) = self.quotient(&d).expect("derived subgroup is normal");
        abelian_invariants(&q)
    }

    /// Extends `generators[i] ↦ images[i]` to a homomorphism into `target`,
    /// provided the generators generate `self` and the assignment is consistent.
    pub fn extend_homomorphism(
        &self,
        generators: &[usize],
        target: &FiniteGroupTable,
        images: &[usize],
    ) -> Option<Vec<usize>> {
        let map = partial_homomorphism(self, generators, target, images)?;
        map.iter().all(|&x| x != usize::MAX).then_some(map)
    }
}

/// Image of every element of `⟨generators⟩` under the assignment, or `None`
/// if the assignment is inconsistent. Elements outside the subgroup map to `usize::MAX`.
fn partial_homomorphism(
    g: &FiniteGroupTable,
    generators: &[usize],
    h: &FiniteGroupTable,
    images: &[usize],
) -> Option<Vec<usize>> {
    let mut map = vec![usize::MAX; g.n];
    map[g.identity] = h.identity;
    let mut queue = VecDeque::from([g.identity]);
    while let Some(x) = queue.pop_front() {
        for (&s, &t) in generators.iter().zip(images) {
            let y = g.mul(x, s);
            let fy = h.mul(map[x], t);
            if map[y] == usize::MAX {
                map[y] = fy;
                queue.push_back(y);
            } else if map[y] != fy {
                return None;
            }
        }
    }
    Some(map)
}

fn primes_dividing(mut n: usize) -> Vec<usize> {
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

/// Invariant factors of an abelian group given by its table, read off from
/// the counts `#{x : x^{p^k} = 1}`.
pub fn abelian_invariants(g: &FiniteGroupTable) -> FiniteAbelianInvariants {
    let orders = g.element_orders();
    let mut cyclic = Vec::new();
    for p in primes_dividing(g.order()) {
        let mut logs = vec![0usize];
        let mut pk = 1usize;
        loop {
            pk *= p;
            let count = orders.iter().filter(|&&o| pk % o == 0).count();
            let mut l = 0;
            let mut c = count;
            while c > 1 {
                c /= p;
                l += 1;
            }
            logs.push(l);
            if l == *logs.iter().rev().nth(1).expect("two entries") {
                break;
            }
        }
        // s_k = #{ factors with exponent ≥ k }
        let s: Vec<usize> = logs.windows(2).map(|w| w[1] - w[0]).collect();
        for k in 1..s.len() + 1 {
            let at_least_k = s[k - 1];
            let at_least_next = s.get(k).copied().unwrap_or(0);
            for _ in 0..at_least_k - at_least_next {
                cyclic.push(BigInt::from(p.pow(k as u32)));
            }
        }
    }
    FiniteAbelianInvariants::from_cyclic_orders(&cyclic)
}

#[derive(PartialEq, Eq)]
struct Screen {
    order: usize,
    element_orders: Vec<usize>,
    class_sizes: Vec<usize>,
    center: usize,
    derived: Vec<usize>,
}

fn screen(g: &FiniteGroupTable) -> Screen {
    let mut element_orders = g.element_orders();
    element_orders.sort_unstable();
    let mut class_sizes: Vec<usize> = g.conjugacy_classes().iter().map(Vec::len).collect();
    class_sizes.sort_unstable();
    Screen {
        order: g.order(),
        element_orders,
        class_sizes,
        center: g.center().order(),
        derived: g.derived_series_orders(),
    }
}

/// Isomorphism test: invariant screen, then backtracking over generator images.
pub fn is_isomorphic(g: &FiniteGroupTable, h: &FiniteGroupTable) -> bool {
    find_isomorphism(g, h).is_some()
}

pub fn find_isomorphism(g: &FiniteGroupTable, h: &FiniteGroupTable) -> Option<Vec<usize>> {
    if g.order() != h.order() || screen(g) != screen(h) {
        return None;
    }
    let gens = g.generating_set();
    let g_orders = g.element_orders();
    let h_orders = h.element_orders();
    let g_class = class_sizes_by_element(g);
    let h_class = class_sizes_by_element(h);
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&s| (0..h.order()).filter(|&t| h_orders[t] == g_orders[s] && h_class[t] == g_class[s]).collect())
        .collect();
    let mut images = Vec::with_capacity(gens.len());
    search_images(g, h, &gens, &candidates, &mut images)
}

fn class_sizes_by_element(g: &FiniteGroupTable) -> Vec<usize> {
    let mut out = vec![0; g.order()];
    for c in g.conjugacy_classes() {
        for &x in &c {
            out[x] = c.len();
        }
    }
    out
}

fn search_images(
    g: &FiniteGroupTable,
    h: &FiniteGroupTable,
    gens: &[usize],
    candidates: &[Vec<usize>],
    images: &mut Vec<usize>,
) -> Option<Vec<usize>> {
    let i = images.len();
    let Some(map) = partial_homomorphism(g, &gens[..i], h, images) else {
        return None;
    };
    // injectivity on the subgroup generated so far
    let mut hit = vec![false; h.order()];
    for &y in map.iter().filter(|&&y| y != usize::MAX) {
        if std::mem::replace(&mut hit[y], true) {
            return None;
        }
    }
    if i == gens.len() {
        return Some(map);
    }
    for &t in &candidates[i] {
        images.push(t);
        if let Some(m) = search_images(g, h, gens, candidates, images) {
            return Some(m);
        }
        images.pop();
    }
    None
}

/// A normal subgroup `N` with `G/N ≅ H`, if one exists.
pub fn maps_onto(g: &FiniteGroupTable, h: &FiniteGroupTable) -> Result<Option<Subgroup>> {
    if g.order() % h.order() != 0 {
        return Ok(None);
    }
    let target = g.order() / h.order();
    for n in g.normal_subgroups()? {
        if n.order() != target {
            continue;
        }
        let (q, _) = g.quotient(&n)?;
        if is_isomorphic(&q, h) {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// For every `g` and every `j` coprime to `ord(g)`, `g^j` is conjugate to `g` or `g⁻¹`.
pub fn is_cut(g: &FiniteGroupTable) -> bool {
    let class = g.class_map();
    (0..g.order()).all(|a| {
        let o = g.element_order(a);
        (1..o).filter(|j| j.gcd(&o) == 1).all(|j| {
            let p = g.pow(a, j as i64);
            class[p] == class[a] || class[p] == class[g.inv(a)]
        })
    })
}

pub fn cyclic(n: usize) -> FiniteGroupTable {
    let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    FiniteGroupTable::from_table(table, Some((0..n).map(|i| format!("a^{i}")).collect())).expect("cyclic group")
}

pub fn direct_product(g: &FiniteGroupTable, h: &FiniteGroupTable) -> FiniteGroupTable {
    let (n, m) = (g.order(), h.order());
    let table: Vec<Vec<usize>> = (0..n * m)
        .map(|x| (0..n * m).map(|y| g.mul(x / m, y / m) * m + h.mul(x % m, y % m)).collect())
        .collect();
    let names = (0..n * m).map(|x| format!("({},{})", g.name(x / m), h.name(x % m))).collect();
    FiniteGroupTable::from_table_unchecked(table, names)
}
