//! Concrete models of named finite groups, including the ten forbidden
//! quotients, each validated against a presentation.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::groups::{cyclic, direct_product, FiniteGroupTable};

/// A group with named generators and the relations they satisfy.
#[derive(Clone, Debug)]
pub struct NamedGroup {
    pub name: String,
    pub group: FiniteGroupTable,
    pub generators: Vec<(String, usize)>,
    pub relations: Vec<String>,
}

/// Display names of the forbidden quotients.
pub const FORBIDDEN: [&str; 10] =
    ["D8", "G16_6", "G16_13", "G32_50", "Q8xC3", "S3", "SL(2,3)", "G96_202", "G240_90", "G384_618"];

pub const FORBIDDEN_ORDERS: [usize; 10] = [8, 16, 16, 32, 24, 6, 24, 96, 240, 384];

// ---------------------------------------------------------------------------
// relation language: products with `*`, powers `x^3`, conjugates `x^y`
// (= y⁻¹xy), commutators `(x,y)` (= x⁻¹y⁻¹xy), `1` for the identity.

struct RelParser<'a> {
    s: &'a [u8],
    pos: usize,
    g: &'a FiniteGroupTable,
    names: &'a HashMap<String, usize>,
}

impl RelParser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::parse(self.pos, msg.to_string())
    }

    fn skip(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos] == b' ' {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<usize> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.factor()?;
            acc = self.g.mul(acc, f);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<usize> {
        let mut base = self.atom()?;
        while self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip();
            let c = self.s.get(self.pos).copied().ok_or_else(|| self.err("dangling ^"))?;
            if c == b'-' || c.is_ascii_digit() {
                let start = self.pos;
                self.pos += 1;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let k: i64 = std::str::from_utf8(&self.s[start..self.pos])
                    .expect("ascii")
                    .parse()
                    .map_err(|_| self.err("bad exponent"))?;
                base = self.g.pow(base, k);
            } else {
                let y = self.atom()?;
                base = self.g.conjugate(base, y);
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<usize> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let x = self.expr()?;
                let out = if self.peek() == Some(b',') {
                    self.pos += 1;
                    let y = self.expr()?;
                    self.g.commutator(x, y)
                } else {
                    x
                };
                if self.peek() != Some(b')') {
                    return Err(self.err("expected )"));
                }
                self.pos += 1;
                Ok(out)
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(self.g.identity())
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
                self.names.get(name).copied().ok_or_else(|| self.err(&format!("unknown generator {name}")))
            }
            _ => Err(self.err("expected a generator, 1, or (")),
        }
    }
}

/// Evaluates a word in the relation language.
pub fn evaluate(g: &FiniteGroupTable, generators: &[(String, usize)], word: &str) -> Result<usize> {
    let names: HashMap<String, usize> = generators.iter().cloned().collect();
    let mut p = RelParser { s: word.as_bytes(), pos: 0, g, names: &names };
    let v = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

/// Checks `lhs = rhs` (chains `a = b = c` allowed) for every relation.
pub fn check_relations(g: &FiniteGroupTable, generators: &[(String, usize)], relations: &[String]) -> Result<()> {
    for rel in relations {
        let sides: Vec<&str> = rel.split('=').collect();
        let values = sides.iter().map(|s| evaluate(g, generators, s)).collect::<Result<Vec<_>>>()?;
        if values.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::GroupConstruction(format!("relation {rel} fails")));
        }
    }
    Ok(())
}

impl NamedGroup {
    fn assemble(name: &str, group: FiniteGroupTable, gens: Vec<(&str, usize)>, rels: &[&str], order: usize) -> Result<Self> {
        let generators: Vec<(String, usize)> = gens.into_iter().map(|(n, i)| (n.to_string(), i)).collect();
        let relations: Vec<String> = rels.iter().map(|s| s.to_string()).collect();
        if group.order() != order {
            return Err(Error::GroupConstruction(format!("{name}: order {} instead of {order}", group.order())));
        }
        check_relations(&group, &generators, &relations)?;
        let ids: Vec<usize> = generators.iter().map(|(_, i)| *i).collect();
        if group.subgroup_generated(&ids).order() != order {
            return Err(Error::GroupConstruction(format!("{name}: generators do not generate")));
        }
        Ok(NamedGroup { name: name.to_string(), group, generators, relations })
    }

    pub fn generator(&self, name: &str) -> usize {
        self.generators.iter().find(|(n, _)| n == name).map(|(_, i)| *i).expect("known generator")
    }
}

// ---------------------------------------------------------------------------
// 2×2 matrices over F_p, row-major.

type Mat = [u8; 4];

fn mat_mul(p: u8, a: &Mat, b: &Mat) -> Mat {
    let p = p as u32;
    let f = |x: u8, y: u8, z: u8, w: u8| ((x as u32 * y as u32 + z as u32 * w as u32) % p) as u8;
    [f(a[0], b[0], a[1], b[2]), f(a[0], b[1], a[1], b[3]), f(a[2], b[0], a[3], b[2]), f(a[2], b[1], a[3], b[3])]
}

fn mat_det(p: u8, a: &Mat) -> u8 {
    let p = p as i32;
    ((a[0] as i32 * a[3] as i32 - a[1] as i32 * a[2] as i32).rem_euclid(p)) as u8
}

fn mat_neg(p: u8, a: &Mat) -> Mat {
    a.map(|x| (p - x) % p)
}

fn all_mats(p: u8) -> impl Iterator<Item = Mat> {
    (0..(p as u32).pow(4)).map(move |mut k| {
        let mut m = [0u8; 4];
        for e in m.iter_mut() {
            *e = (k % p as u32) as u8;
            k /= p as u32;
        }
        m
    })
}

fn mat_pow(p: u8, a: &Mat, k: usize) -> Mat {
    (0..k).fold(IDENTITY, |acc, _| mat_mul(p, &acc, a))
}

fn mat_inv(p: u8, a: &Mat) -> Mat {
    let mut b = *a;
    loop {
        let c = mat_mul(p, &b, a);
        if c == IDENTITY {
            return b;
        }
        b = c;
    }
}

const IDENTITY: Mat = [1, 0, 0, 1];

/// Q8 inside SL(2,3).
const Q8_I: Mat = [0, 2, 1, 0];
const Q8_J: Mat = [1, 1, 1, 2];
/// D8 inside GL(2,3): rotation, reflection and the second reflection used for central products.
const D8_R: Mat = [0, 2, 1, 0];
const D8_S: Mat = [1, 0, 0, 2];
const D8_SWAP: Mat = [0, 1, 1, 0];

/// Pair of matrices modulo the central element `(−I, −I)`.
fn central_pair(p: u8, a: Mat, b: Mat) -> (Mat, Mat) {
    let alt = (mat_neg(p, &a), mat_neg(p, &b));
    std::cmp::min((a, b), alt)
}

fn matrix_group(p: u8, gens: &[Mat]) -> Result<(FiniteGroupTable, Vec<Mat>)> {
    FiniteGroupTable::from_closure(IDENTITY, gens, |a, b| mat_mul(p, a, b))
}

fn index_of<T: PartialEq>(elements: &[T], x: &T) -> usize {
    elements.iter().position(|e| e == x).expect("element in group")
}

const Q8_RELS: [&str; 3] = ["i^4 = 1", "i^2 = j^2", "i^j = i^-1"];

pub fn q8() -> Result<NamedGroup> {
    let (g, els) = matrix_group(3, &[Q8_I, Q8_J])?;
    let (i, j) = (index_of(&els, &Q8_I), index_of(&els, &Q8_J));
    NamedGroup::assemble("Q8", g, vec![("i", i), ("j", j)], &Q8_RELS, 8)
}

pub fn d8() -> Result<NamedGroup> {
    let (g, els) = matrix_group(3, &[D8_R, D8_S])?;
    let (r, s) = (index_of(&els, &D8_R), index_of(&els, &D8_S));
    NamedGroup::assemble("D8", g, vec![("r", r), ("s", s)], &["r^4 = s^2 = 1", "r^s = r^-1"], 8)
}

pub fn s3() -> Result<NamedGroup> {
    let r = vec![1usize, 2, 0];
    let s = vec![1usize, 0, 2];
    let g = FiniteGroupTable::from_permutations(&[r, s])?;
    // generators were added first in closure order after the identity
    let (ri, si) = (find_perm(&g, "[1, 2, 0]"), find_perm(&g, "[1, 0, 2]"));
    NamedGroup::assemble("S3", g, vec![("r", ri), ("s", si)], &["r^3 = s^2 = 1", "r^s = r^-1"], 6)
}

fn find_perm(g: &FiniteGroupTable, name: &str) -> usize {
    (0..g.order()).find(|&x| g.name(x) == name).expect("permutation present")
}

pub fn q8_x_c3() -> Result<NamedGroup> {
    type E = (Mat, u8);
    let gens: [E; 3] = [(Q8_I, 0), (Q8_J, 0), (IDENTITY, 1)];
    let (g, els) = FiniteGroupTable::from_closure((IDENTITY, 0u8), &gens, |a: &E, b: &E| {
        (mat_mul(3, &a.0, &b.0), (a.1 + b.1) % 3)
    })?;
    let ids: Vec<usize> = gens.iter().map(|x| index_of(&els, x)).collect();
    let mut rels: Vec<&str> = Q8_RELS.to_vec();
    rels.extend(["c^3 = 1", "(i,c) = (j,c) = 1"]);
    NamedGroup::assemble("Q8xC3", g, vec![("i", ids[0]), ("j", ids[1]), ("c", ids[2])], &rels, 24)
}

/// Element `b` of order 3 in SL(2,3) with `i^b = j`, `j^b = ij`.
fn sl23_b() -> Mat {
    all_mats(3)
        .find(|b| {
            mat_det(3, b) == 1
                && mat_pow(3, b, 3) == IDENTITY
                && *b != IDENTITY
                && mat_mul(3, &mat_mul(3, &mat_inv(3, b), &Q8_I), b) == Q8_J
                && mat_mul(3, &mat_mul(3, &mat_inv(3, b), &Q8_J), b) == mat_mul(3, &Q8_I, &Q8_J)
        })
        .expect("SL(2,3) contains such an element")
}

const SL23_RELS: [&str; 6] = ["i^4 = 1", "i^2 = j^2", "i^j = i^-1", "b^3 = 1", "i^b = j", "j^b = i*j"];

pub fn sl23() -> Result<NamedGroup> {
    let b = sl23_b();
    let (g, els) = matrix_group(3, &[Q8_I, Q8_J, b])?;
    let ids = [Q8_I, Q8_J, b].map(|m| index_of(&els, &m));
    NamedGroup::assemble("SL(2,3)", g, vec![("i", ids[0]), ("j", ids[1]), ("b", ids[2])], &SL23_RELS, 24)
}

pub fn g16_6() -> Result<NamedGroup> {
    type E = (u8, u8);
    let mul = |x: &E, y: &E| -> E {
        let f = if x.1 == 1 { 5 } else { 1 };
        ((x.0 + f * y.0) % 8, (x.1 + y.1) % 2)
    };
    let (g, els) = FiniteGroupTable::from_closure((0u8, 0u8), &[(1, 0), (0, 1)], mul)?;
    let (a, b) = (index_of(&els, &(1, 0)), index_of(&els, &(0, 1)));
    NamedGroup::assemble("G16_6", g, vec![("a", a), ("b", b)], &["a^8 = b^2 = 1", "a^b = a^5"], 16)
}

pub fn g16_13() -> Result<NamedGroup> {
    type E = (u8, u8, u8);
    let mul = |x: &E, y: &E| -> E { ((x.0 + y.0 + 2 * x.2 * y.1) % 4, (x.1 + y.1) % 2, (x.2 + y.2) % 2) };
    let gens: [E; 3] = [(1, 0, 0), (0, 1, 0), (0, 0, 1)];
    let (g, els) = FiniteGroupTable::from_closure((0, 0, 0), &gens, mul)?;
    let ids: Vec<usize> = gens.iter().map(|x| index_of(&els, x)).collect();
    NamedGroup::assemble(
        "G16_13",
        g,
        vec![("a", ids[0]), ("b", ids[1]), ("c", ids[2])],
        &["a^4 = b^2 = c^2 = 1 = (a,b) = (a,c)", "b^c = a^2*b"],
        16,
    )
}

pub fn g32_50() -> Result<NamedGroup> {
    type E = (Mat, Mat);
    let k = mat_mul(3, &Q8_I, &Q8_J);
    let gens: [E; 4] = [
        central_pair(3, Q8_I, IDENTITY),
        central_pair(3, Q8_J, IDENTITY),
        central_pair(3, IDENTITY, D8_S),
        central_pair(3, k, D8_R),
    ];
    let (g, els) = FiniteGroupTable::from_closure((IDENTITY, IDENTITY), &gens, |x: &E, y: &E| {
        central_pair(3, mat_mul(3, &x.0, &y.0), mat_mul(3, &x.1, &y.1))
    })?;
    let ids: Vec<usize> = gens.iter().map(|x| index_of(&els, x)).collect();
    NamedGroup::assemble(
        "G32_50",
        g,
        vec![("i", ids[0]), ("j", ids[1]), ("a", ids[2]), ("b", ids[3])],
        &[
            "i^4 = 1",
            "i^2 = j^2",
            "i^j = i^-1",
            "a^2 = 1",
            "(i,a) = (j,a) = 1",
            "b^2 = 1",
            "i^b = i^-1",
            "j^b = j^-1",
            "a^b = i^2*a",
        ],
        32,
    )
}

pub fn g96_202() -> Result<NamedGroup> {
    type E = (Mat, Mat);
    let b = sl23_b();
    let gens: [E; 5] = [
        central_pair(3, Q8_I, IDENTITY),
        central_pair(3, Q8_J, IDENTITY),
        central_pair(3, b, IDENTITY),
        central_pair(3, IDENTITY, D8_S),
        central_pair(3, IDENTITY, D8_SWAP),
    ];
    let (g, els) = FiniteGroupTable::from_closure((IDENTITY, IDENTITY), &gens, |x: &E, y: &E| {
        central_pair(3, mat_mul(3, &x.0, &y.0), mat_mul(3, &x.1, &y.1))
    })?;
    let ids: Vec<usize> = gens.iter().map(|x| index_of(&els, x)).collect();
    let mut rels: Vec<&str> = SL23_RELS.to_vec();
    rels.extend(["t^2 = 1", "(i,t) = (j,t) = (b,t) = 1", "a^2 = 1", "(i,a) = (j,a) = (b,a) = 1", "t^a = i^2*t"]);
    NamedGroup::assemble(
        "G96_202",
        g,
        vec![("i", ids[0]), ("j", ids[1]), ("b", ids[2]), ("t", ids[3]), ("a", ids[4])],
        &rels,
        96,
    )
}

/// `SL(2,5) ⋊ C₂` where the involution acts as conjugation by a matrix of
/// non-square determinant whose square is scalar.
pub fn g240_90() -> Result<NamedGroup> {
    const P: u8 = 5;
    const NEG: Mat = [4, 0, 0, 4];
    let rels = [
        "x^3 = y^5 = z^2 = 1",
        "(x,z) = (y,z) = 1",
        "(x*y)^2 = z",
        "a^2 = 1",
        "(z,a) = 1",
        "x^a = x^2",
        "y^a = (x*y^3)^2",
    ];
    let sl25: Vec<Mat> = all_mats(P).filter(|m| mat_det(P, m) == 1).collect();
    let twisters = all_mats(P).filter(|g| {
        let d = mat_det(P, g);
        let sq = mat_mul(P, g, g);
        (d == 2 || d == 3) && sq[1] == 0 && sq[2] == 0 && sq[0] == sq[3]
    });
    let mut order_g = twisters.collect::<Vec<_>>();
    // the conventional choice first
    order_g.sort_by_key(|g| *g != [0, 2, 1, 0]);
    for tw in order_g {
        let tw_inv = mat_inv(P, &tw);
        let sigma = |m: &Mat| mat_mul(P, &mat_mul(P, &tw_inv, m), &tw);
        for x in sl25.iter().filter(|m| mat_pow(P, m, 3) == IDENTITY && **m != IDENTITY) {
            if sigma(x) != mat_mul(P, x, x) {
                continue;
            }
            for y in sl25.iter().filter(|m| mat_pow(P, m, 5) == IDENTITY && **m != IDENTITY) {
                let xy = mat_mul(P, x, y);
                if mat_mul(P, &xy, &xy) != NEG {
                    continue;
                }
                let xy3 = mat_mul(P, x, &mat_pow(P, y, 3));
                if sigma(y) != mat_mul(P, &xy3, &xy3) {
                    continue;
                }
                type E = (Mat, u8);
                // (m, e)(n, f) = (m·σ^e(n), e+f); σ is an involution so a⁻¹(n,0)a = (σ(n),0)
                let mul = |u: &E, v: &E| -> E {
                    let n = if u.1 == 1 { sigma(&v.0) } else { v.0 };
                    (mat_mul(P, &u.0, &n), (u.1 + v.1) % 2)
                };
                let gens: [E; 4] = [(*x, 0), (*y, 0), (NEG, 0), (IDENTITY, 1)];
                let (g, els) = FiniteGroupTable::from_closure((IDENTITY, 0u8), &gens, mul)?;
                let ids: Vec<usize> = gens.iter().map(|e| index_of(&els, e)).collect();
                return NamedGroup::assemble(
                    "G240_90",
                    g,
                    vec![("x", ids[0]), ("y", ids[1]), ("z", ids[2]), ("a", ids[3])],
                    &rels,
                    240,
                );
            }
        }
    }
    Err(Error::GroupConstruction("G240_90: no generators satisfy the presentation".into()))
}

pub fn g384_618() -> Result<NamedGroup> {
    let q = q8()?;
    let (i, j) = (q.generator("i"), q.generator("j"));
    let qg = &q.group;
    let k = qg.mul(i, j);
    // α: i ↦ j⁻¹, j ↦ k⁻¹
    let alpha = qg
        .extend_homomorphism(&[i, j], qg, &[qg.inv(j), qg.inv(k)])
        .ok_or_else(|| Error::GroupConstruction("Q8 automorphism is inconsistent".into()))?;
    // σ(q₁, q₂) = (α(q₂), α(q₁)), of order 6
    let sigma = |x: (usize, usize)| (alpha[x.1], alpha[x.0]);
    let sigma_pow = |x: (usize, usize), e: u8| (0..e).fold(x, |acc, _| sigma(acc));
    type E = (usize, usize, u8);
    // (x, e)(y, f) = (x·σ^{−e}(y), e+f), so that a⁻¹ y a = σ(y)
    let mul = |u: &E, v: &E| -> E {
        let (y1, y2) = sigma_pow((v.0, v.1), (6 - u.2) % 6);
        (qg.mul(u.0, y1), qg.mul(u.1, y2), (u.2 + v.2) % 6)
    };
    let e = qg.identity();
    let gens: [E; 5] = [(i, e, 0), (j, e, 0), (e, i, 0), (e, j, 0), (e, e, 1)];
    let (g, els) = FiniteGroupTable::from_closure((e, e, 0u8), &gens, mul)?;
    let ids: Vec<usize> = gens.iter().map(|x| index_of(&els, x)).collect();
    NamedGroup::assemble(
        "G384_618",
        g,
        vec![("i1", ids[0]), ("j1", ids[1]), ("i2", ids[2]), ("j2", ids[3]), ("a", ids[4])],
        &[
            "i1^4 = 1",
            "i1^2 = j1^2",
            "i1^j1 = i1^-1",
            "i2^4 = 1",
            "i2^2 = j2^2",
            "i2^j2 = i2^-1",
            "(i1,i2) = (i1,j2) = (j1,i2) = (j1,j2) = 1",
            "a^6 = 1",
            "i1^a = j2^-1",
            "j1^a = (i2*j2)^-1",
            "i2^a = j1^-1",
            "j2^a = (i1*j1)^-1",
        ],
        384,
    )
}

pub fn forbidden(name: &str) -> Result<NamedGroup> {
    match canonical_name(name).as_str() {
        "D8" => d8(),
        "S3" => s3(),
        "G16_6" => g16_6(),
        "G16_13" => g16_13(),
        "Q8xC3" => q8_x_c3(),
        "SL(2,3)" => sl23(),
        "G32_50" => g32_50(),
        "G96_202" => g96_202(),
        "G240_90" => g240_90(),
        "G384_618" => g384_618(),
        other => Err(Error::UnknownName(other.to_string())),
    }
}

pub fn forbidden_catalog() -> Result<Vec<NamedGroup>> {
    FORBIDDEN.iter().map(|n| forbidden(n)).collect()
}

fn canonical_name(name: &str) -> String {
    let t = name.trim();
    match t {
        "SL23" | "SL(2,3)" => "SL(2,3)".into(),
        "Q8xC3" | "C3xQ8" => "Q8xC3".into(),
        _ => {
            if let Some(rest) = t.strip_prefix('G') {
                rest.replace(',', "_")
                    .split_once('_')
                    .map(|(a, b)| format!("G{}_{}", a.trim(), b.trim()))
                    .unwrap_or_else(|| t.to_string())
            } else {
                t.to_string()
            }
        }
    }
}

// ---------------------------------------------------------------------------
// small families

pub fn dihedral(order: usize) -> Result<FiniteGroupTable> {
    if order < 2 || order % 2 != 0 {
        return Err(Error::domain(format!("dihedral group needs even order, got {order}")));
    }
    let n = order / 2;
    let r: Vec<usize> = (0..n).map(|x| (x + 1) % n).collect();
    let s: Vec<usize> = (0..n).map(|x| (n - x) % n).collect();
    if n <= 2 {
        return Ok(direct_product(&cyclic(n), &cyclic(2)));
    }
    FiniteGroupTable::from_permutations(&[r, s])
}

pub fn symmetric(d: usize) -> Result<FiniteGroupTable> {
    if d <= 1 {
        return Ok(cyclic(1));
    }
    let cycle: Vec<usize> = (0..d).map(|x| (x + 1) % d).collect();
    let mut swap: Vec<usize> = (0..d).collect();
    swap.swap(0, 1);
    FiniteGroupTable::from_permutations(&[cycle, swap])
}

pub fn alternating(d: usize) -> Result<FiniteGroupTable> {
    if d <= 2 {
        return Ok(cyclic(1));
    }
    let gens: Vec<Vec<usize>> = (2..d)
        .map(|k| {
            let mut p: Vec<usize> = (0..d).collect();
            p[0] = 1;
            p[1] = k;
            p[k] = 0;
            p
        })
        .collect();
    FiniteGroupTable::from_permutations(&gens)
}

fn mult_order(r: usize, m: usize) -> usize {
    let mut x = r % m;
    let mut k = 1;
    while x != 1 {
        x = x * r % m;
        k += 1;
    }
    k
}

/// `C_m ⋊ C_n` with the generator of `C_n` acting by `a ↦ a^r`, where `r`
/// is the smallest residue of the largest multiplicative order dividing `n`.
pub fn cyclic_semidirect(m: usize, n: usize) -> Result<FiniteGroupTable> {
    if m == 0 || n == 0 {
        return Err(Error::domain("cyclic factors must be nontrivial"));
    }
    let r = if m == 1 {
        0
    } else {
        (1..m)
            .filter(|&r| num_integer::gcd(r, m) == 1 && n % mult_order(r, m) == 0)
            .max_by_key(|&r| (mult_order(r, m), std::cmp::Reverse(r)))
            .expect("r = 1 always qualifies")
    };
    type E = (usize, usize);
    let pow_r = |e: usize| (0..e).fold(1 % m, |acc, _| acc * r % m);
    let mul = |x: &E, y: &E| -> E { ((x.0 + pow_r(x.1) * y.0) % m, (x.1 + y.1) % n) };
    Ok(FiniteGroupTable::from_closure((0, 0), &[(1 % m, 0), (0, 1 % n)], mul)?.0)
}

pub fn sl2(p: u8) -> Result<FiniteGroupTable> {
    let gens = [[1, 1, 0, 1], [1, 0, 1, 1]];
    Ok(matrix_group(p, &gens)?.0)
}

/// Builds a named group: a catalog name, `Cn`, `Dn` (order n), `Sn`, `An`,
/// `Q8`, `Cm:Cn`, `SL(2,p)` for p ∈ {3,5,7}, or `AxB` direct products.
pub fn build_named(name: &str) -> Result<FiniteGroupTable> {
    let t = name.trim();
    if let Ok(g) = forbidden(t) {
        return Ok(g.group);
    }
    if t == "Q8" {
        return Ok(q8()?.group);
    }
    if let Some(p) = t.strip_prefix("SL(2,").and_then(|s| s.strip_suffix(')')) {
        return match p {
            "5" => sl2(5),
            "7" => sl2(7),
            _ => Err(Error::UnknownName(t.to_string())),
        };
    }
    if let Some((a, b)) = t.split_once(':') {
        let m = parse_index(a.strip_prefix('C'), t)?;
        let n = parse_index(b.strip_prefix('C'), t)?;
        return cyclic_semidirect(m, n);
    }
    if let Some((a, b)) = split_product(t) {
        return Ok(direct_product(&build_named(a)?, &build_named(b)?));
    }
    let (head, tail) = t.split_at(1.min(t.len()));
    let k = parse_index(Some(tail), t)?;
    match head {
        "C" if k >= 1 => Ok(cyclic(k)),
        "D" => dihedral(k),
        "S" if k <= 6 => symmetric(k),
        "A" if k <= 6 => alternating(k),
        _ => Err(Error::UnknownName(t.to_string())),
    }
}

fn split_product(t: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, c) in t.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            'x' if depth == 0 && i > 0 => return Some((&t[..i], &t[i + 1..])),
            _ => {}
        }
    }
    None
}

fn parse_index(s: Option<&str>, whole: &str) -> Result<usize> {
    s.and_then(|x| x.parse().ok()).ok_or_else(|| Error::UnknownName(whole.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::is_isomorphic;

    #[test]
    fn catalog_orders_and_presentations() {
        for (name, order) in FORBIDDEN.iter().zip(FORBIDDEN_ORDERS) {
            let g = forbidden(name).unwrap();
            assert_eq!(g.group.order(), order, "{name}");
            check_relations(&g.group, &g.generators, &g.relations).unwrap();
        }
    }

    #[test]
    fn structure_cross_checks() {
        // G16,13 is the central product of D8 and C4
        let d8c4 = {
            type E = (Mat, u8);
            let (g, _) = FiniteGroupTable::from_closure(
                (IDENTITY, 0u8),
                &[(D8_R, 0), (D8_S, 0), (IDENTITY, 1)],
                |x: &E, y: &E| {
                    let m = mat_mul(3, &x.0, &y.0);
                    let e = (x.1 + y.1) % 4;
                    // identify (−I, e) with (I, e+2)
                    if e >= 2 { (mat_neg(3, &m), e - 2) } else { (m, e) }
                },
            )
            .unwrap();
            g
        };
        assert_eq!(d8c4.order(), 16);
        assert!(is_isomorphic(&d8c4, &g16_13().unwrap().group));
        assert!(!is_isomorphic(&g16_6().unwrap().group, &g16_13().unwrap().group));
        assert_eq!(g32_50().unwrap().group.center().order(), 2);
    }

    #[test]
    fn named_groups() {
        assert_eq!(build_named("C6").unwrap().order(), 6);
        assert!(build_named("C6").unwrap().is_abelian());
        assert_eq!(build_named("S4").unwrap().order(), 24);
        assert_eq!(build_named("A5").unwrap().order(), 60);
        assert_eq!(build_named("D10").unwrap().order(), 10);
        assert_eq!(build_named("SL(2,5)").unwrap().order(), 120);
        let f21 = build_named("C7:C3").unwrap();
        assert_eq!(f21.order(), 21);
        assert!(!f21.is_abelian());
        let c3c4 = build_named("C3:C4").unwrap();
        assert!(!c3c4.is_abelian());
        assert_eq!(c3c4.order(), 12);
        assert!(is_isomorphic(&build_named("C2xC3").unwrap(), &build_named("C6").unwrap()));
        assert!(is_isomorphic(&build_named("SL23").unwrap(), &sl2(3).unwrap()));
        assert!(build_named("X9").is_err());
    }

    #[test]
    fn relation_language() {
        let g = q8().unwrap();
        assert_eq!(evaluate(&g.group, &g.generators, "(i,j)").unwrap(), evaluate(&g.group, &g.generators, "i^2").unwrap());
        assert!(evaluate(&g.group, &g.generators, "i*").is_err());
        assert!(evaluate(&g.group, &g.generators, "q").is_err());
    }
}
