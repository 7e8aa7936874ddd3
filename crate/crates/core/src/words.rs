//! Words in the generators `E(x)` and `[μ, ν]` of `GE₂(O)`, relation checks,
//! canonical forms, the norm descent for relations, Euclidean decomposition
//! and the abelianization maps.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::abelianization::{m_subgroup, n_ideal};
use crate::algebra::Element;
use crate::error::{Error, Result};
use crate::groups::FiniteGroupTable;
use crate::lattice::Quotient;
use crate::order::{Order, OrderElement};
use crate::units::{short_vectors, unit_group, UnitGroup};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generator {
    E(OrderElement),
    Diag(OrderElement, OrderElement),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Letter {
    pub generator: Generator,
    pub inverse: bool,
}

impl Letter {
    pub fn e(x: OrderElement) -> Self {
        Letter { generator: Generator::E(x), inverse: false }
    }

    pub fn diag(mu: OrderElement, nu: OrderElement) -> Self {
        Letter { generator: Generator::Diag(mu, nu), inverse: false }
    }

    /// `D(μ) = [μ, μ⁻¹]`.
    pub fn d(order: &Order, mu: &OrderElement) -> Result<Self> {
        let inv = unit_inverse(order, mu)?;
        Ok(Letter::diag(mu.clone(), inv))
    }

    pub fn inverted(&self) -> Self {
        Letter { generator: self.generator.clone(), inverse: !self.inverse }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn new() -> Self {
        Word(Vec::new())
    }

    pub fn from_es(ts: &[OrderElement]) -> Self {
        Word(ts.iter().cloned().map(Letter::e).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().map(Letter::inverted).collect())
    }

    pub fn concat(&self, other: &Word) -> Self {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Word(v)
    }

    pub fn push(&mut self, letter: Letter) {
        self.0.push(letter);
    }

    pub fn is_elementary(&self) -> bool {
        self.0.iter().all(|l| matches!(l.generator, Generator::E(_)))
    }

    /// Text form `E([..]);[[..],[..]];inv(E([..]))` in algebra coordinates.
    pub fn display<'a>(&'a self, order: &'a Order) -> WordDisplay<'a> {
        WordDisplay { word: self, order }
    }

    pub fn parse(order: &Order, text: &str) -> Result<Self> {
        let mut p = WordParser { order, text, chars: text.char_indices().collect(), pos: 0 };
        let w = p.word()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(Error::parse(p.offset(), "unexpected trailing input"));
        }
        Ok(w)
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    order: &'a Order,
}

fn fmt_elem(order: &Order, x: &OrderElement) -> String {
    order.to_element(x).to_string()
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .word
            .0
            .iter()
            .map(|l| {
                let g = match &l.generator {
                    Generator::E(x) => format!("E({})", fmt_elem(self.order, x)),
                    Generator::Diag(a, b) => format!("[{},{}]", fmt_elem(self.order, a), fmt_elem(self.order, b)),
                };
                if l.inverse {
                    format!("inv({g})")
                } else {
                    g
                }
            })
            .collect();
        f.write_str(&parts.join(";"))
    }
}

struct WordParser<'a> {
    order: &'a Order,
    text: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl WordParser<'_> {
    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.text.len(), |c| c.0)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        let n = s.chars().count();
        let got: String = self.chars[self.pos..].iter().take(n).map(|c| c.1).collect();
        if got == s {
            self.pos += n;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(Error::parse(self.offset(), format!("expected {s:?}")))
        }
    }

    fn word(&mut self) -> Result<Word> {
        let mut w = Word::new();
        self.skip_ws();
        if self.pos == self.chars.len() || self.peek() == Some(')') {
            return Ok(w);
        }
        loop {
            w = w.concat(&self.item()?);
            if !self.eat(";") {
                return Ok(w);
            }
        }
    }

    fn element(&mut self) -> Result<OrderElement> {
        self.skip_ws();
        let start = self.offset();
        if self.peek() != Some('[') {
            return Err(Error::parse(start, "expected '['"));
        }
        while let Some(c) = self.peek() {
            self.pos += 1;
            if c == ']' {
                break;
            }
        }
        let text = &self.text[start..self.offset()];
        let e = Element::parse(self.order.algebra(), text).map_err(|e| match e {
            Error::Parse { position, message } => Error::parse(start + position, message),
            other => other,
        })?;
        self.order
            .from_element(&e)
            .map_err(|_| Error::parse(start, format!("{text} is not in the order {}", self.order.name())))
    }

    fn unit(&mut self) -> Result<OrderElement> {
        let start = self.offset();
        let x = self.element()?;
        if !self.order.is_unit(&x) {
            return Err(Error::parse(start, "diagonal entries must be units"));
        }
        Ok(x)
    }

    fn item(&mut self) -> Result<Word> {
        if self.eat("inv(") {
            let w = self.word()?;
            self.expect(")")?;
            return Ok(w.inverse());
        }
        if self.eat("E(") {
            let x = self.element()?;
            self.expect(")")?;
            return Ok(Word(vec![Letter::e(x)]));
        }
        if self.eat("D(") {
            let x = self.unit()?;
            self.expect(")")?;
            return Ok(Word(vec![Letter::d(self.order, &x)?]));
        }
        if self.eat("[") {
            let a = self.unit()?;
            self.expect(",")?;
            let b = self.unit()?;
            self.expect("]")?;
            return Ok(Word(vec![Letter::diag(a, b)]));
        }
        Err(Error::parse(self.offset(), "expected E(..), D(..), [..,..] or inv(..)"))
    }
}

fn unit_inverse(order: &Order, x: &OrderElement) -> Result<OrderElement> {
    match order.inverse(x) {
        Some(y) => Ok(y),
        None => Err(Error::domain(format!("{} is not a unit", order.pretty(x)))),
    }
}

/// A 2×2 matrix over an order, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix2(pub [OrderElement; 4]);

impl Matrix2 {
    pub fn identity(order: &Order) -> Self {
        Matrix2([order.one(), order.zero(), order.zero(), order.one()])
    }

    pub fn e(order: &Order, x: &OrderElement) -> Self {
        Matrix2([x.clone(), order.one(), order.neg(&order.one()), order.zero()])
    }

    pub fn diag(order: &Order, mu: &OrderElement, nu: &OrderElement) -> Self {
        Matrix2([mu.clone(), order.zero(), order.zero(), nu.clone()])
    }

    pub fn mul(&self, order: &Order, other: &Matrix2) -> Matrix2 {
        let [a, b, c, d] = &self.0;
        let [e, f, g, h] = &other.0;
        let m = |x: &OrderElement, y: &OrderElement, z: &OrderElement, w: &OrderElement| {
            order.add(&order.mul(x, y), &order.mul(z, w))
        };
        Matrix2([m(a, e, b, g), m(a, f, b, h), m(c, e, d, g), m(c, f, d, h)])
    }

    pub fn neg(&self, order: &Order) -> Matrix2 {
        Matrix2(self.0.clone().map(|x| order.neg(&x)))
    }

    pub fn is_diagonal(&self) -> bool {
        self.0[1].is_zero() && self.0[2].is_zero()
    }

    pub fn display(&self, order: &Order) -> String {
        let s: Vec<String> = self.0.iter().map(|x| fmt_elem(order, x)).collect();
        format!("[[{},{}],[{},{}]]", s[0], s[1], s[2], s[3])
    }
}

fn eval_letter(order: &Order, letter: &Letter) -> Result<Matrix2> {
    match (&letter.generator, letter.inverse) {
        (Generator::E(x), false) => Ok(Matrix2::e(order, x)),
        (Generator::E(x), true) => {
            let z = Matrix2::e(order, &order.zero());
            Ok(z.mul(order, &Matrix2::e(order, &order.neg(x))).mul(order, &z))
        }
        (Generator::Diag(a, b), false) => Ok(Matrix2::diag(order, a, b)),
        (Generator::Diag(a, b), true) => {
            Ok(Matrix2::diag(order, &unit_inverse(order, a)?, &unit_inverse(order, b)?))
        }
    }
}

pub fn eval_word(order: &Order, word: &Word) -> Result<Matrix2> {
    let mut m = Matrix2::identity(order);
    for l in &word.0 {
        m = m.mul(order, &eval_letter(order, l)?);
    }
    Ok(m)
}

/// A diagonal matrix `[μ, ν]` of units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagonal {
    pub mu: OrderElement,
    pub nu: OrderElement,
}

impl Diagonal {
    pub fn identity(order: &Order) -> Self {
        Diagonal { mu: order.one(), nu: order.one() }
    }

    pub fn d(order: &Order, mu: &OrderElement) -> Result<Self> {
        Ok(Diagonal { mu: mu.clone(), nu: unit_inverse(order, mu)? })
    }

    pub fn neg(&self, order: &Order) -> Self {
        Diagonal { mu: order.neg(&self.mu), nu: order.neg(&self.nu) }
    }

    pub fn mul(&self, order: &Order, other: &Diagonal) -> Self {
        Diagonal { mu: order.mul(&self.mu, &other.mu), nu: order.mul(&self.nu, &other.nu) }
    }

    pub fn inverse(&self, order: &Order) -> Result<Self> {
        Ok(Diagonal { mu: unit_inverse(order, &self.mu)?, nu: unit_inverse(order, &self.nu)? })
    }

    pub fn swap(&self) -> Self {
        Diagonal { mu: self.nu.clone(), nu: self.mu.clone() }
    }

    pub fn matrix(&self, order: &Order) -> Matrix2 {
        Matrix2::diag(order, &self.mu, &self.nu)
    }

    pub fn is_identity(&self, order: &Order) -> bool {
        self.mu == order.one() && self.nu == order.one()
    }

    pub fn display(&self, order: &Order) -> String {
        format!("[{},{}]", fmt_elem(order, &self.mu), fmt_elem(order, &self.nu))
    }
}

fn eval_es(order: &Order, ts: &[OrderElement]) -> Matrix2 {
    let mut m = Matrix2::identity(order);
    for t in ts {
        m = m.mul(order, &Matrix2::e(order, t));
    }
    m
}

/// `[μ,ν]E(y) = E(μyν⁻¹)[ν,μ]`: moves a pending diagonal past `E(y)`.
fn push_diagonal(order: &Order, pending: &Diagonal, y: &OrderElement) -> Result<(OrderElement, Diagonal)> {
    let nu_inv = unit_inverse(order, &pending.nu)?;
    Ok((order.mul(&order.mul(&pending.mu, y), &nu_inv), pending.swap()))
}

/// Rewrites a word as `E(t₁)…E(t_l)·[μ,ν]`.
pub fn normalize(order: &Order, word: &Word) -> Result<(Vec<OrderElement>, Diagonal)> {
    let mut ts = Vec::new();
    let mut pending = Diagonal::identity(order);
    let zero = order.zero();
    for letter in &word.0 {
        match (&letter.generator, letter.inverse) {
            (Generator::E(x), inverse) => {
                let seq = if inverse { vec![zero.clone(), order.neg(x), zero.clone()] } else { vec![x.clone()] };
                for y in seq {
                    let (t, p) = push_diagonal(order, &pending, &y)?;
                    ts.push(t);
                    pending = p;
                }
            }
            (Generator::Diag(a, b), inverse) => {
                let d = Diagonal { mu: a.clone(), nu: b.clone() };
                let d = if inverse { d.inverse(order)? } else { d };
                pending = pending.mul(order, &d);
            }
        }
    }
    Ok((ts, pending))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    /// `E(x)E(0)E(y) = −E(x+y)`.
    ZeroElimination,
    /// `E(x)E(α)E(y) = E(x−α⁻¹)D(α)E(y−α⁻¹)` followed by moving `D(α)` right.
    UnitElimination,
    /// Conjugation moving a leading `E(0)E(t₂)` to the end.
    Rotation,
    NormTwoRewrite,
    NormThreeRewrite,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::ZeroElimination => "R1",
            Rule::UnitElimination => "R7-substitution",
            Rule::Rotation => "canonicalization",
            Rule::NormTwoRewrite => "norm-2 rewrite",
            Rule::NormThreeRewrite => "norm-3 rewrite",
        })
    }
}

/// One interior move; returns `E(ts) = E(ts')·R`.
fn canonical_move(order: &Order, ts: &[OrderElement]) -> Result<Option<(Rule, Vec<OrderElement>, Diagonal)>> {
    let l = ts.len();
    if l < 3 {
        return Ok(None);
    }
    for i in 1..l - 1 {
        if ts[i].is_zero() {
            let mut out = ts[..i - 1].to_vec();
            out.push(order.add(&ts[i - 1], &ts[i + 1]));
            out.extend_from_slice(&ts[i + 2..]);
            return Ok(Some((Rule::ZeroElimination, out, Diagonal::identity(order).neg(order))));
        }
    }
    for i in 1..l - 1 {
        if order.is_unit(&ts[i]) {
            let alpha_inv = unit_inverse(order, &ts[i])?;
            let mut out = ts[..i - 1].to_vec();
            out.push(order.sub(&ts[i - 1], &alpha_inv));
            let mut pending = Diagonal::d(order, &ts[i])?;
            let rest = std::iter::once(order.sub(&ts[i + 1], &alpha_inv)).chain(ts[i + 2..].iter().cloned());
            for y in rest {
                let (t, p) = push_diagonal(order, &pending, &y)?;
                out.push(t);
                pending = p;
            }
            return Ok(Some((Rule::UnitElimination, out, pending)));
        }
    }
    Ok(None)
}

/// Canonical form: `eval(word) = E(t₁)…E(t_l)·D` with interior `tᵢ ∉ U ∪ {0}`.
pub fn to_canonical(order: &Order, word: &Word) -> Result<(Vec<OrderElement>, Diagonal)> {
    let (mut ts, mut diag) = normalize(order, word)?;
    while let Some((_, next, r)) = canonical_move(order, &ts)? {
        ts = next;
        diag = r.mul(order, &diag);
    }
    Ok((ts, diag))
}

/// `(1,2)`-entries of the prefixes `E(t₁)…E(tᵢ)`.
pub fn b_sequence(order: &Order, ts: &[OrderElement]) -> Vec<OrderElement> {
    let mut m = Matrix2::identity(order);
    ts.iter()
        .map(|t| {
            m = m.mul(order, &Matrix2::e(order, t));
            m.0[1].clone()
        })
        .collect()
}

/// `(m, h)`: the largest `|bᵢ|²` and the last (1-based) index attaining it.
pub fn measure(order: &Order, ts: &[OrderElement]) -> (BigInt, usize) {
    let mut best = (BigInt::zero(), 0);
    for (i, b) in b_sequence(order, ts).iter().enumerate() {
        let n = order.norm(b);
        if n >= best.0 {
            best = (n, i + 1);
        }
    }
    best
}

/// `E(t₁)…E(t_l) = [μ, ν]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub ts: Vec<OrderElement>,
    pub diagonal: Diagonal,
}

impl Relation {
    pub fn display(&self, order: &Order) -> String {
        format!("{} = {}", Word::from_es(&self.ts).display(order), self.diagonal.display(order))
    }

    fn check(&self, order: &Order) -> Result<()> {
        if eval_es(order, &self.ts) != self.diagonal.matrix(order) {
            return Err(Error::invariant(format!("relation no longer holds: {}", self.display(order))));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ReductionStep {
    pub rule: Rule,
    pub before: Relation,
    pub after: Relation,
    /// `(m, h)` of `after`.
    pub measure: (BigInt, usize),
}

#[derive(Clone, Debug)]
pub struct ReductionTrace {
    pub start: Relation,
    pub steps: Vec<ReductionStep>,
    pub end: Relation,
}

impl ReductionTrace {
    pub fn descent_steps(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s.rule, Rule::NormTwoRewrite | Rule::NormThreeRewrite)).count()
    }
}

const MAX_REDUCTION_STEPS: usize = 100_000;

fn record(order: &Order, steps: &mut Vec<ReductionStep>, rule: Rule, before: Relation, after: &Relation) -> Result<()> {
    after.check(order)?;
    if steps.len() >= MAX_REDUCTION_STEPS {
        return Err(Error::invariant("reduction did not terminate"));
    }
    steps.push(ReductionStep { rule, before, after: after.clone(), measure: measure(order, &after.ts) });
    Ok(())
}

fn canonicalize_relation(order: &Order, rel: &mut Relation, steps: &mut Vec<ReductionStep>) -> Result<()> {
    loop {
        let before = rel.clone();
        if let Some((rule, ts, r)) = canonical_move(order, &rel.ts)? {
            rel.ts = ts;
            rel.diagonal = rel.diagonal.mul(order, &r.inverse(order)?);
            record(order, steps, rule, before, rel)?;
        } else if rel.ts.len() >= 3 && rel.ts[0].is_zero() {
            // E(0)E(t₂)·Y = D gives Y·D⁻¹E(0)E(t₂)D = D; the b-sequence only shifts by two
            let head: Vec<OrderElement> = rel.ts.drain(..2).collect();
            let mut pending = rel.diagonal.inverse(order)?;
            for y in &head {
                let (t, p) = push_diagonal(order, &pending, y)?;
                rel.ts.push(t);
                pending = p;
            }
            rel.diagonal = rel.diagonal.mul(order, &pending.mul(order, &rel.diagonal).inverse(order)?);
            record(order, steps, Rule::Rotation, before, rel)?;
        } else {
            return Ok(());
        }
    }
}

/// Reduces a relation to one of length `< 3` by the norm descent.
pub fn reduce_relation(order: &Order, word: &Word) -> Result<ReductionTrace> {
    let m = eval_word(order, word)?;
    if !m.is_diagonal() {
        return Err(Error::NotARelation);
    }
    let (ts, r) = normalize(order, word)?;
    let d = Diagonal { mu: m.0[0].clone(), nu: m.0[3].clone() };
    let start = Relation { ts, diagonal: d.mul(order, &r.inverse(order)?) };
    start.check(order)?;
    let mut rel = start.clone();
    let mut steps = Vec::new();
    canonicalize_relation(order, &mut rel, &mut steps)?;
    while rel.ts.len() >= 3 {
        let (m_before, h) = measure(order, &rel.ts);
        let l = rel.ts.len();
        if h < 2 || h >= l {
            return Err(Error::DescentObstruction(format!("maximum at position {h} of {l}")));
        }
        let i = h - 1;
        let t = rel.ts[i].clone();
        let n = order.norm(&t);
        let tbar = order.conj(&t);
        let neg_t = order.neg(&t);
        let neg_tbar = order.neg(&tbar);
        let (rule, middle) = if n == BigInt::from(2) {
            (Rule::NormTwoRewrite, vec![neg_t])
        } else if n == BigInt::from(3) {
            (Rule::NormThreeRewrite, vec![neg_t.clone(), neg_tbar, neg_t])
        } else {
            return Err(Error::DescentObstruction(n.to_string()));
        };
        let before = rel.clone();
        let mut ts = rel.ts[..i - 1].to_vec();
        ts.push(order.sub(&rel.ts[i - 1], &tbar));
        ts.extend(middle);
        ts.push(order.sub(&rel.ts[i + 1], &tbar));
        ts.extend_from_slice(&rel.ts[i + 2..]);
        rel = Relation { ts, diagonal: rel.diagonal.neg(order) };
        record(order, &mut steps, rule, before, &rel)?;
        canonicalize_relation(order, &mut rel, &mut steps)?;
        if rel.ts.len() >= 3 {
            let after = measure(order, &rel.ts);
            if after >= (m_before.clone(), h) {
                return Err(Error::invariant(format!(
                    "measure did not decrease: ({m_before}, {h}) -> ({}, {})",
                    after.0, after.1
                )));
            }
        }
    }
    let terminal_ok = match rel.ts.len() {
        0 => rel.diagonal.is_identity(order),
        2 => rel.ts.iter().all(|t| t.is_zero()) && rel.diagonal == Diagonal::identity(order).neg(order),
        _ => false,
    };
    if !terminal_ok {
        return Err(Error::invariant(format!("unexpected terminal relation {}", rel.display(order))));
    }
    Ok(ReductionTrace { start, steps, end: rel })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelationSuiteReport {
    /// `(relation label, number of instances checked)`.
    pub checked: Vec<(String, usize)>,
}

impl RelationSuiteReport {
    pub fn total(&self) -> usize {
        self.checked.iter().map(|c| c.1).sum()
    }
}

pub fn random_element(order: &Order, rng: &mut impl Rng, bound: i64) -> OrderElement {
    OrderElement((0..order.rank()).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect())
}

struct SuiteChecker<'a> {
    order: &'a Order,
    report: RelationSuiteReport,
}

impl SuiteChecker<'_> {
    fn check(&mut self, label: &str, lhs: Word, rhs: Word) -> Result<()> {
        let (a, b) = (eval_word(self.order, &lhs)?, eval_word(self.order, &rhs)?);
        if a != b {
            return Err(Error::invariant(format!(
                "{label} fails: {} vs {}",
                lhs.display(self.order),
                rhs.display(self.order)
            )));
        }
        match self.report.checked.iter_mut().find(|c| c.0 == label) {
            Some(c) => c.1 += 1,
            None => self.report.checked.push((label.to_string(), 1)),
        }
        Ok(())
    }
}

/// Checks R1–R8 and R3′ on sampled ring elements and on all unit parameters.
pub fn verify_relation_suite(order: &Order, samples: usize, seed: u64) -> Result<RelationSuiteReport> {
    let ug = unit_group(order)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let o = order;
    let e = |x: &OrderElement| Letter::e(x.clone());
    let e0 = || Letter::e(o.zero());
    let mut c = SuiteChecker { order, report: RelationSuiteReport::default() };
    let xs: Vec<OrderElement> = (0..samples.max(1)).map(|_| random_element(o, &mut rng, 4)).collect();
    for k in 0..samples {
        let (x, y, z) = (&xs[k], &xs[(k + 1) % xs.len()], &xs[(k + 2) % xs.len()]);
        c.check("R1", Word(vec![e(x), e0(), e(y)]), Word(vec![e0(), e0(), e(&o.add(x, y))]))?;
        c.check("R5", Word(vec![e(x), e(x).inverted()]), Word::new())?;
        c.check("R5", Word(vec![e(x).inverted()]), Word(vec![e0(), e(&o.neg(x)), e0()]))?;
        c.check("R6", Word(vec![e(x), e(y).inverted(), e(z)]), Word(vec![e(&o.add(&o.sub(x, y), z))]))?;
    }
    c.check("R4", Word(vec![e0(), e0()]), Word(vec![Letter::d(o, &o.neg(&o.one()))?]))?;
    for (k, mu) in ug.elements.iter().enumerate() {
        let mu_inv = unit_inverse(o, mu)?;
        let (x, y) = (&xs[k % xs.len()], &xs[(k + 1) % xs.len()]);
        c.check("R2", Word(vec![e(mu), e(&mu_inv), e(mu)]), Word(vec![e0(), e0(), Letter::d(o, mu)?]))?;
        c.check(
            "R3'",
            Word(vec![e(x), Letter::d(o, mu)?]),
            Word(vec![Letter::d(o, &mu_inv)?, e(&o.mul(&o.mul(mu, x), mu))]),
        )?;
        c.check(
            "R7",
            Word(vec![e(x), e(mu), e(y)]),
            Word(vec![e(&o.sub(x, &mu_inv)), Letter::d(o, mu)?, e(&o.sub(y, &mu_inv))]),
        )?;
        for (j, nu) in ug.elements.iter().enumerate() {
            let nu_inv = unit_inverse(o, nu)?;
            let x = &xs[(k + j) % xs.len()];
            c.check(
                "R3",
                Word(vec![e(x), Letter::diag(mu.clone(), nu.clone())]),
                Word(vec![Letter::diag(nu.clone(), mu.clone()), e(&o.mul(&o.mul(&nu_inv, x), mu))]),
            )?;
            let comm = o.mul(&o.mul(&mu_inv, &nu_inv), &o.mul(mu, nu));
            c.check(
                "R8",
                Word(vec![Letter::diag(comm, o.one())]),
                Word(vec![Letter::d(o, &mu_inv)?, Letter::d(o, &nu_inv)?, Letter::d(o, &o.mul(mu, nu))?]),
            )?;
        }
    }
    Ok(c.report)
}

/// The relator `(E(ā)E(a))ⁿ E(0)⁻²` for `N(a) = n`.
pub fn alpha_relator(order: &Order, a: &OrderElement) -> Word {
    let n = usize::try_from(&order.norm(a)).unwrap_or(0);
    let mut w = Word::new();
    for _ in 0..n {
        w.push(Letter::e(order.conj(a)));
        w.push(Letter::e(a.clone()));
    }
    w.push(Letter::e(order.zero()).inverted());
    w.push(Letter::e(order.zero()).inverted());
    w
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphaReport {
    pub norm_two: usize,
    pub norm_three: usize,
}

/// Checks `(E(ā)E(a))ⁿ = E(0)²` for every `a` with `N(a) = n ∈ {2, 3}`.
pub fn alpha_relations(order: &Order) -> Result<AlphaReport> {
    let minus_one = Matrix2::identity(order).neg(order);
    let mut counts = [0usize; 2];
    for (slot, n) in [2u32, 3].into_iter().enumerate() {
        for a in short_vectors(order, &BigInt::from(n))? {
            let step = Matrix2::e(order, &order.conj(&a)).mul(order, &Matrix2::e(order, &a));
            let mut m = Matrix2::identity(order);
            for _ in 0..n {
                m = m.mul(order, &step);
            }
            if m != minus_one {
                return Err(Error::invariant(format!("relation alpha fails for a = {}", order.pretty(&a))));
            }
            counts[slot] += 1;
        }
    }
    Ok(AlphaReport { norm_two: counts[0], norm_three: counts[1] })
}

/// Orders on which `euclid_divide` is offered.
pub const EUCLIDEAN_ORDERS: [&str; 9] = ["Z", "I1", "I2", "I3", "I7", "I11", "O2", "O3", "O5"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `a = qb + r`.
    Left,
    /// `a = bq + r`.
    Right,
}

/// Division with remainder of norm smaller than `N(b)`: the quotient is the
/// best point in the unit box around the coordinatewise rounding of `a/b`.
pub fn euclid_divide(order: &Order, a: &OrderElement, b: &OrderElement, side: Side) -> Result<(OrderElement, OrderElement)> {
    if !EUCLIDEAN_ORDERS.contains(&order.name()) {
        return Err(Error::NotEuclidean(order.name().to_string()));
    }
    if b.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let (ae, be) = (order.to_element(a), order.to_element(b));
    let binv = be.invert()?;
    let exact = match side {
        Side::Left => ae.multiply(&binv)?,
        Side::Right => binv.multiply(&ae)?,
    };
    let coords = order.rational_coords(&exact)?;
    let rounded: Vec<BigInt> = coords.iter().map(|c| c.round().to_integer()).collect();
    let nb = order.norm(b);
    let remainder = |q: &OrderElement| match side {
        Side::Left => order.sub(a, &order.mul(q, b)),
        Side::Right => order.sub(a, &order.mul(b, q)),
    };
    let n = order.rank();
    let mut best: Option<(BigInt, OrderElement, OrderElement)> = None;
    for code in 0..3usize.pow(n as u32) {
        let mut k = code;
        let q = OrderElement(
            rounded
                .iter()
                .map(|c| {
                    let d = (k % 3) as i64 - 1;
                    k /= 3;
                    c + d
                })
                .collect(),
        );
        let r = remainder(&q);
        let nr = order.norm(&r);
        if best.as_ref().is_none_or(|b| nr < b.0) {
            best = Some((nr, q, r));
        }
    }
    match best {
        Some((nr, q, r)) if nr < nb => Ok((q, r)),
        _ => Err(Error::NotEuclidean(format!(
            "no remainder of norm below {nb} for {} / {}",
            order.pretty(a),
            order.pretty(b)
        ))),
    }
}

/// A word in `E` and diagonal letters evaluating to `m`, by Euclidean reduction of the first column.
pub fn ge2_decompose(order: &Order, m: &Matrix2) -> Result<Word> {
    if *m == Matrix2::identity(order) {
        return Ok(Word::new());
    }
    let mut cur = m.clone();
    let mut quotients = Vec::new();
    while !cur.0[2].is_zero() {
        let (q, _) = euclid_divide(order, &cur.0[0], &cur.0[2], Side::Left)?;
        let x = order.neg(&q);
        // E(x)⁻¹ = (0 −1; 1 x)
        let inv = Matrix2([order.zero(), order.neg(&order.one()), order.one(), x.clone()]);
        cur = inv.mul(order, &cur);
        quotients.push(x);
        if quotients.len() > 10_000 {
            return Err(Error::invariant("Euclidean reduction did not terminate"));
        }
    }
    let [u, b, _, d] = &cur.0;
    let (Some(u_inv), true) = (order.inverse(u), order.is_unit(d)) else {
        return Err(Error::domain("matrix is not invertible over the order"));
    };
    let mut word = Word::from_es(&quotients);
    if !(u == &order.one() && d == &order.one()) {
        word.push(Letter::diag(u.clone(), d.clone()));
    }
    let x = order.mul(&u_inv, b);
    if !x.is_zero() {
        // (1 x; 0 1) = E(−x)E(0)⁻¹
        word.push(Letter::e(order.neg(&x)));
        word.push(Letter::e(order.zero()).inverted());
    }
    if eval_word(order, &word)? != *m {
        return Err(Error::invariant("decomposition does not evaluate to the input"));
    }
    Ok(word)
}

/// The three homomorphisms `φ: GE₂ → U^ab`, `ψ: E₂ → O/N`, `τ: E₂ → O/M`.
pub struct AbelianizationMaps<'a> {
    order: &'a Order,
    units: UnitGroup,
    u_ab: FiniteGroupTable,
    coset: Vec<usize>,
    n_quotient: Quotient,
    m_quotient: Quotient,
}

impl<'a> AbelianizationMaps<'a> {
    pub fn new(order: &'a Order) -> Result<Self> {
        let units = unit_group(order)?;
        let (u_ab, coset) = units.group.quotient(&units.derived_subgroup())?;
        let n_quotient = Quotient::new(&n_ideal(order)?, order.rank());
        let m_quotient = m_subgroup(order)?.quotient(order.rank());
        Ok(AbelianizationMaps { order, units, u_ab, coset, n_quotient, m_quotient })
    }

    pub fn u_ab(&self) -> &FiniteGroupTable {
        &self.u_ab
    }

    pub fn n_quotient(&self) -> &Quotient {
        &self.n_quotient
    }

    pub fn m_quotient(&self) -> &Quotient {
        &self.m_quotient
    }

    fn unit_class(&self, x: &OrderElement) -> Result<usize> {
        let i = self.units.index_of(x).ok_or_else(|| Error::domain(format!("{} is not a unit", self.order.pretty(x))))?;
        Ok(self.coset[i])
    }

    /// Index in `u_ab()` of the image; `φ([α,β])` is the class of `αβ`.
    pub fn phi(&self, word: &Word) -> Result<usize> {
        let mut acc = self.u_ab.identity();
        for l in &word.0 {
            let v = match &l.generator {
                Generator::E(_) => self.u_ab.identity(),
                Generator::Diag(a, b) => self.unit_class(&self.order.mul(a, b))?,
            };
            let v = if l.inverse { self.u_ab.inv(v) } else { v };
            acc = self.u_ab.mul(acc, v);
        }
        Ok(acc)
    }

    fn additive(&self, word: &Word, shift: i64, q: &Quotient, name: &str) -> Result<Vec<BigInt>> {
        let o = self.order;
        let mut acc = o.zero();
        for l in &word.0 {
            let Generator::E(x) = &l.generator else {
                return Err(Error::domain(format!("{name} is defined on E-letter words only")));
            };
            let v = o.sub(x, &o.scalar(&BigInt::from(shift)));
            acc = if l.inverse { o.sub(&acc, &v) } else { o.add(&acc, &v) };
        }
        Ok(q.reduce(&acc.0))
    }

    /// `E(x) ↦ x − 1 + N`.
    pub fn psi(&self, word: &Word) -> Result<Vec<BigInt>> {
        self.additive(word, 1, &self.n_quotient, "psi")
    }

    /// `E(x) ↦ x − 3 + M`.
    pub fn tau(&self, word: &Word) -> Result<Vec<BigInt>> {
        self.additive(word, 3, &self.m_quotient, "tau")
    }
}

/// `n × n` matrices over an order, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
struct MatrixN {
    n: usize,
    entries: Vec<OrderElement>,
}

impl MatrixN {
    fn elementary(order: &Order, n: usize, i: usize, j: usize, r: &OrderElement) -> Self {
        let mut entries = vec![order.zero(); n * n];
        for k in 0..n {
            entries[k * n + k] = order.one();
        }
        entries[i * n + j] = r.clone();
        MatrixN { n, entries }
    }

    fn mul(&self, order: &Order, other: &MatrixN) -> MatrixN {
        let n = self.n;
        let mut entries = vec![order.zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let p = order.mul(a, &other.entries[k * n + j]);
                    entries[i * n + j] = order.add(&entries[i * n + j], &p);
                }
            }
        }
        MatrixN { n, entries }
    }
}

/// `(x, y) = x⁻¹y⁻¹xy` for elementary matrices given by `(i, j, r)`.
fn elementary_commutator(order: &Order, n: usize, x: (usize, usize, &OrderElement), y: (usize, usize, &OrderElement)) -> MatrixN {
    let e = |i, j, r: &OrderElement| MatrixN::elementary(order, n, i, j, r);
    let xi = e(x.0, x.1, &order.neg(x.2));
    let yi = e(y.0, y.1, &order.neg(y.2));
    xi.mul(order, &yi).mul(order, &e(x.0, x.1, x.2)).mul(order, &e(y.0, y.1, y.2))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutatorReport {
    pub commutator_identities: usize,
    pub iterated_commutators: usize,
}

/// Exact checks of the commutator formulas for elementary matrices and of
/// `e_{i,i+k}(t)` as an iterated commutator of superdiagonal generators.
pub fn elementary_commutator_check(n: usize, order: &Order, samples: usize, seed: u64) -> Result<CommutatorReport> {
    if !(3..=4).contains(&n) {
        return Err(Error::domain("n must be 3 or 4"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let identity = MatrixN::elementary(order, n, 0, 1, &order.zero());
    let mut report = CommutatorReport { commutator_identities: 0, iterated_commutators: 0 };
    for _ in 0..samples {
        let r = random_element(order, &mut rng, 3);
        let s = random_element(order, &mut rng, 3);
        for (k, l, i, j) in index_quadruples(n) {
            let got = elementary_commutator(order, n, (k, l, &s), (i, j, &r));
            let expected = if j != k && i != l {
                identity.clone()
            } else if j == k {
                MatrixN::elementary(order, n, i, l, &order.neg(&order.mul(&r, &s)))
            } else {
                MatrixN::elementary(order, n, k, j, &order.mul(&s, &r))
            };
            if got != expected {
                return Err(Error::invariant(format!("commutator of e{k}{l} and e{i}{j} fails")));
            }
            report.commutator_identities += 1;
        }
        let minus_one = order.neg(&order.one());
        for i in 0..n {
            for top in i + 2..n {
                // e_{i,top-1}(r) is already established, so one commutator extends it
                let acc = elementary_commutator(order, n, (top - 1, top, &minus_one), (i, top - 1, &r));
                if acc != MatrixN::elementary(order, n, i, top, &r) {
                    return Err(Error::invariant(format!("iterated commutator e{i}{top} fails")));
                }
                report.iterated_commutators += 1;
            }
        }
    }
    Ok(report)
}

fn index_quadruples(n: usize) -> Vec<(usize, usize, usize, usize)> {
    let mut out = Vec::new();
    for k in 0..n {
        for l in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if i == j || k == l {
                        continue;
                    }
                    let mut set = vec![i, j, k, l];
                    set.sort_unstable();
                    set.dedup();
                    // the case j = k and i = l is excluded by the formula
                    if set.len() > 2 && !(j == k && i == l) {
                        out.push((k, l, i, j));
                    }
                }
            }
        }
    }
    out
}

/// Random relations: products of conjugates of R1, R2, R4, R6, R7 and relation alpha.
pub fn relation_corpus(order: &Order, count: usize, max_len: usize, seed: u64) -> Result<Vec<Word>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ug = unit_group(order)?;
    let mut alphas = short_vectors(order, &BigInt::from(2))?;
    alphas.extend(short_vectors(order, &BigInt::from(3))?);
    let o = order;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mut word = Word::new();
        loop {
            let x = random_element(o, &mut rng, 3);
            let y = random_element(o, &mut rng, 3);
            let mu = &ug.elements[rng.gen_range(0..ug.order())];
            let mu_inv = unit_inverse(o, mu)?;
            let e = |t: &OrderElement| Letter::e(t.clone());
            let e0 = || Letter::e(o.zero());
            let (lhs, rhs) = match rng.gen_range(0..6) {
                0 => (Word(vec![e(&x), e0(), e(&y)]), Word(vec![e0(), e0(), e(&o.add(&x, &y))])),
                1 => (Word(vec![e(mu), e(&mu_inv), e(mu)]), Word(vec![e0(), e0(), Letter::d(o, mu)?])),
                2 => (Word(vec![e0(), e0()]), Word(vec![Letter::d(o, &o.neg(&o.one()))?])),
                3 => {
                    let z = random_element(o, &mut rng, 3);
                    (Word(vec![e(&x), e(&y).inverted(), e(&z)]), Word(vec![e(&o.add(&o.sub(&x, &y), &z))]))
                }
                4 => (
                    Word(vec![e(&x), e(mu), e(&y)]),
                    Word(vec![e(&o.sub(&x, &mu_inv)), Letter::d(o, mu)?, e(&o.sub(&y, &mu_inv))]),
                ),
                _ if !alphas.is_empty() => (alpha_relator(o, &alphas[rng.gen_range(0..alphas.len())]), Word::new()),
                _ => (Word(vec![e0(), e0(), e0(), e0()]), Word::new()),
            };
            let relator = lhs.concat(&rhs.inverse());
            let conj = Word((0..rng.gen_range(0..3)).map(|_| Letter::e(random_element(o, &mut rng, 2))).collect());
            let piece = conj.concat(&relator).concat(&conj.inverse());
            if !word.is_empty() && word.len() + piece.len() > max_len {
                break;
            }
            word = word.concat(&piece);
            if rng.gen_bool(0.4) {
                break;
            }
        }
        out.push(word);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{any, prop_assert_eq, proptest, ProptestConfig};

    fn o(name: &str) -> Order {
        Order::builtin(name).unwrap()
    }

    fn z(k: i64) -> OrderElement {
        OrderElement(vec![BigInt::from(k)])
    }

    #[test]
    fn evaluation_examples() {
        let zz = o("Z");
        let w = Word(vec![Letter::e(zz.zero()), Letter::e(zz.zero())]);
        assert_eq!(eval_word(&zz, &w).unwrap(), Matrix2::identity(&zz).neg(&zz));
        assert_eq!(eval_word(&zz, &Word::new()).unwrap(), Matrix2::identity(&zz));
        let i1 = o("I1");
        let i = i1.from_ints(&[0, 1]);
        let mi = i1.from_ints(&[0, -1]);
        let lhs = Word(vec![Letter::e(i.clone()), Letter::e(mi), Letter::e(i.clone())]);
        let rhs = Word(vec![Letter::e(i1.zero()), Letter::e(i1.zero()), Letter::d(&i1, &i).unwrap()]);
        assert_eq!(eval_word(&i1, &lhs).unwrap(), eval_word(&i1, &rhs).unwrap());
    }

    #[test]
    fn parse_round_trip() {
        let o2 = o("O2");
        let w = Word::parse(&o2, "E([1,1,0,0]);D([0,1,0,0]);inv(E([1/2,1/2,1/2,1/2]));[[1,0,0,0],[-1,0,0,0]]").unwrap();
        assert_eq!(w.len(), 4);
        let text = w.display(&o2).to_string();
        assert_eq!(Word::parse(&o2, &text).unwrap(), w);
        assert!(matches!(Word::parse(&o2, "E([1,1,0,0]);X"), Err(Error::Parse { .. })));
        assert!(matches!(Word::parse(&o2, "D([2,0,0,0])"), Err(Error::Parse { .. })));
        assert!(matches!(Word::parse(&o2, "E([1/3,0,0,0])"), Err(Error::Parse { .. })));
    }

    #[test]
    fn relation_suites() {
        for name in ["Z", "I1", "I3", "L", "O2", "O3", "O5", "Zsqrt:-5"] {
            let r = verify_relation_suite(&o(name), 30, 7).unwrap();
            assert_eq!(r.checked.len(), 9, "{name}");
        }
        let r = verify_relation_suite(&o("O2"), 5, 1).unwrap();
        assert!(r.checked.contains(&("R3".to_string(), 576)));
        assert!(r.checked.contains(&("R8".to_string(), 576)));
    }

    #[test]
    fn alpha_counts() {
        assert_eq!(alpha_relations(&o("I1")).unwrap(), AlphaReport { norm_two: 4, norm_three: 0 });
        assert_eq!(alpha_relations(&o("Z")).unwrap(), AlphaReport { norm_two: 0, norm_three: 0 });
        // r(n) = 24·σ(n odd part) for the Hurwitz order
        assert_eq!(alpha_relations(&o("O2")).unwrap(), AlphaReport { norm_two: 24, norm_three: 96 });
    }

    #[test]
    fn canonical_examples() {
        let zz = o("Z");
        let (ts, d) = to_canonical(&zz, &Word::from_es(&[z(1), z(0), z(1)])).unwrap();
        assert_eq!(ts, vec![z(2)]);
        assert_eq!(d, Diagonal::identity(&zz).neg(&zz));
        let (ts, d) = to_canonical(&zz, &Word::from_es(&[z(3), z(1), z(3)])).unwrap();
        assert_eq!(ts, vec![z(2), z(2)]);
        assert_eq!(d.mu, z(1));
        let already = Word::from_es(&[z(2), z(5), z(3)]);
        let (ts, d) = to_canonical(&zz, &already).unwrap();
        assert_eq!(ts, vec![z(2), z(5), z(3)]);
        assert!(d.is_identity(&zz));
    }

    #[test]
    fn b_sequence_examples() {
        let zz = o("Z");
        assert_eq!(b_sequence(&zz, &[z(7)]), vec![z(1)]);
        assert_eq!(b_sequence(&zz, &[z(2), z(3), z(5)]), vec![z(1), z(2), z(5)]);
        // b_{i+1} = a_i
        let ts = [z(4), z(-3), z(2), z(9)];
        let bs = b_sequence(&zz, &ts);
        let mut m = Matrix2::identity(&zz);
        for (i, t) in ts.iter().enumerate().take(3) {
            m = m.mul(&zz, &Matrix2::e(&zz, t));
            assert_eq!(bs[i + 1], m.0[0]);
        }
    }

    #[test]
    fn reduction_examples() {
        let i1 = o("I1");
        let a = i1.from_ints(&[1, 1]);
        let w = Word::from_es(&[i1.conj(&a), a.clone(), i1.conj(&a), a, i1.zero(), i1.zero()]);
        let trace = reduce_relation(&i1, &w).unwrap();
        assert!(trace.end.ts.len() < 3);
        let zz = o("Z");
        let t = reduce_relation(&zz, &Word::from_es(&[z(0), z(0), z(0), z(0)])).unwrap();
        assert_eq!(t.end.ts, vec![z(0), z(0)]);
        assert_eq!(reduce_relation(&zz, &Word::from_es(&[z(2), z(3)])).unwrap_err(), Error::NotARelation);
    }

    #[test]
    fn corpus_reduces_with_decreasing_measure() {
        for name in ["Z", "I1", "I2", "I3", "L", "O2", "O3", "O5", "Zsqrt:-5"] {
            let ord = o(name);
            for w in relation_corpus(&ord, 25, 40, 11).unwrap() {
                assert!(eval_word(&ord, &w).unwrap() == Matrix2::identity(&ord));
                let trace = reduce_relation(&ord, &w).unwrap_or_else(|e| panic!("{name}: {e}"));
                assert!(trace.end.ts.len() < 3);
            }
        }
    }

    #[test]
    fn leading_zero_after_cascade_keeps_measure() {
        // the rewrite at h = 3 zeroes t₂, then R1 twice leaves t₁ = 0
        let i2 = o("I2");
        let e = |a, b| i2.from_ints(&[a, b]);
        let ts = [e(-1, -1), e(-1, 1), e(-1, -1), e(-1, 1), e(-1, -1), e(-3, 3), e(0, 1), e(0, -1), e(0, 1), e(2, -3)];
        let m = eval_es(&i2, &ts);
        assert!(m.is_diagonal());
        let trace = reduce_relation(&i2, &Word::from_es(&ts)).unwrap();
        let mut rel = trace.start.clone();
        canonicalize_relation(&i2, &mut rel, &mut Vec::new()).unwrap();
        assert_eq!(measure(&i2, &rel.ts), (BigInt::from(4), 3));
        assert!(trace.steps.iter().any(|s| s.rule == Rule::Rotation));
    }

    #[test]
    fn division_examples() {
        let i1 = o("I1");
        let (q, r) = euclid_divide(&i1, &i1.from_ints(&[5, 0]), &i1.from_ints(&[1, 1]), Side::Left).unwrap();
        assert!(i1.norm(&r) < BigInt::from(2));
        assert_eq!(i1.add(&i1.mul(&q, &i1.from_ints(&[1, 1])), &r), i1.from_ints(&[5, 0]));
        let (q, r) = euclid_divide(&i1, &i1.zero(), &i1.from_ints(&[1, 1]), Side::Left).unwrap();
        assert!(q.is_zero() && r.is_zero());
        let o2 = o("O2");
        let a = o2.from_element(&Element::parse(o2.algebra(), "[1,1,1,0]").unwrap()).unwrap();
        let b = o2.scalar(&BigInt::from(2));
        let (_, r) = euclid_divide(&o2, &a, &b, Side::Right).unwrap();
        assert!(o2.norm(&r) <= BigInt::from(1));
        assert!(matches!(euclid_divide(&o("L"), &a, &b, Side::Left), Err(Error::NotEuclidean(_))));
    }

    #[test]
    fn decomposition_examples() {
        let i1 = o("I1");
        assert!(ge2_decompose(&i1, &Matrix2::identity(&i1)).unwrap().is_empty());
        let m = Matrix2::e(&i1, &i1.from_ints(&[7, 0]));
        let w = ge2_decompose(&i1, &m).unwrap();
        assert_eq!(eval_word(&i1, &w).unwrap(), m);
        let singular = Matrix2([i1.from_ints(&[2, 0]), i1.zero(), i1.zero(), i1.one()]);
        assert!(ge2_decompose(&i1, &singular).is_err());
    }

    fn random_word(ord: &Order, ug: &UnitGroup, rng: &mut ChaCha8Rng, len: usize) -> Word {
        let mut w = Word::new();
        for _ in 0..len {
            let l = if rng.gen_bool(0.8) {
                Letter::e(random_element(ord, rng, 3))
            } else {
                let a = ug.elements[rng.gen_range(0..ug.order())].clone();
                let b = ug.elements[rng.gen_range(0..ug.order())].clone();
                Letter::diag(a, b)
            };
            w.push(if rng.gen_bool(0.2) { l.inverted() } else { l });
        }
        w
    }

    #[test]
    fn decomposition_round_trips() {
        for name in EUCLIDEAN_ORDERS {
            let ord = o(name);
            let ug = unit_group(&ord).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            for _ in 0..100 {
                let len = rng.gen_range(1..=20);
                let m = eval_word(&ord, &random_word(&ord, &ug, &mut rng, len)).unwrap();
                let w = ge2_decompose(&ord, &m).unwrap();
                assert_eq!(eval_word(&ord, &w).unwrap(), m, "{name}");
            }
        }
    }

    #[test]
    fn abelianization_map_examples() {
        let zz = o("Z");
        let maps = AbelianizationMaps::new(&zz).unwrap();
        assert!(maps.tau(&Word::from_es(&[z(3)])).unwrap().iter().all(|c| c.is_zero()));
        assert_eq!(maps.phi(&Word::from_es(&[z(5)])).unwrap(), maps.u_ab().identity());
        assert!(maps.psi(&Word(vec![Letter::diag(z(1), z(-1))])).is_err());
        let i1 = o("I1");
        let maps = AbelianizationMaps::new(&i1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ug = unit_group(&i1).unwrap();
        for _ in 0..20 {
            let w1 = Word::from_es(&(0..4).map(|_| random_element(&i1, &mut rng, 3)).collect::<Vec<_>>());
            let w2 = Word::from_es(&(0..3).map(|_| random_element(&i1, &mut rng, 3)).collect::<Vec<_>>());
            let comm = w1.inverse().concat(&w2.inverse()).concat(&w1).concat(&w2);
            assert!(maps.psi(&comm).unwrap().iter().all(|c| c.is_zero()));
            assert!(maps.tau(&comm).unwrap().iter().all(|c| c.is_zero()));
            let g = random_word(&i1, &ug, &mut rng, 5);
            let h = random_word(&i1, &ug, &mut rng, 5);
            let gc = g.inverse().concat(&h.inverse()).concat(&g).concat(&h);
            assert_eq!(maps.phi(&gc).unwrap(), maps.u_ab().identity());
        }
    }

    #[test]
    fn maps_respect_relations() {
        // relations evaluate to I, so E-only relators lie in the kernels of ψ and τ
        for name in ["Z", "I1", "I3", "O2", "O3"] {
            let ord = o(name);
            let maps = AbelianizationMaps::new(&ord).unwrap();
            for w in relation_corpus(&ord, 20, 30, 2).unwrap().into_iter().filter(Word::is_elementary) {
                assert!(maps.tau(&w).unwrap().iter().all(|c| c.is_zero()), "{name}");
                assert!(maps.psi(&w).unwrap().iter().all(|c| c.is_zero()), "{name}");
            }
        }
    }

    #[test]
    fn elementary_commutators() {
        assert!(elementary_commutator_check(3, &o("Z"), 20, 1).unwrap().commutator_identities > 0);
        assert!(elementary_commutator_check(4, &o("I3"), 10, 2).is_ok());
        let r = elementary_commutator_check(3, &o("O2"), 100, 3).unwrap();
        assert_eq!(r.iterated_commutators, 100);
        assert!(elementary_commutator_check(5, &o("Z"), 1, 1).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn letters_cancel_with_inverses(seed in any::<u64>(), len in 0usize..12) {
            let ord = o("O3");
            let ug = unit_group(&ord).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = random_word(&ord, &ug, &mut rng, len);
            prop_assert_eq!(eval_word(&ord, &w.concat(&w.inverse())).unwrap(), Matrix2::identity(&ord));
            let v = random_word(&ord, &ug, &mut rng, 4);
            let lhs = eval_word(&ord, &w.concat(&v)).unwrap();
            let rhs = eval_word(&ord, &w).unwrap().mul(&ord, &eval_word(&ord, &v).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn tau_is_additive(seed in any::<u64>()) {
            let ord = o("I3");
            let maps = AbelianizationMaps::new(&ord).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut w = || {
                let v: Vec<OrderElement> = (0..rng.gen_range(0..6)).map(|_| random_element(&ord, &mut rng, 5)).collect();
                Word::from_es(&v)
            };
            let (a, b) = (w(), w());
            let sum = maps.m_quotient().add_classes(&maps.tau(&a).unwrap(), &maps.tau(&b).unwrap());
            prop_assert_eq!(maps.tau(&a.concat(&b)).unwrap(), sum);
        }
    }

    #[test]
    fn normal_form_preserves_value() {
        let ord = o("O2");
        let ug = unit_group(&ord).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let w = random_word(&ord, &ug, &mut rng, 10);
            let (ts, d) = to_canonical(&ord, &w).unwrap();
            assert_eq!(eval_es(&ord, &ts).mul(&ord, &d.matrix(&ord)), eval_word(&ord, &w).unwrap());
            for t in ts.iter().skip(1).take(ts.len().saturating_sub(2)) {
                assert!(!t.is_zero() && !ord.is_unit(t));
            }
        }
    }
}
