//! Polyadic terms with coefficients, group terms, and translation between them.
//!
//! Variables are 0-based internally and written `x1, x2, …` in the surface
//! syntax. Constants are element names, bare when they are plain identifiers
//! and in brackets (`[(12)]`) otherwise.

use std::fmt;

use crate::cover::PostCover;
use crate::group::FiniteGroup;
use crate::lex::{Cursor, ParseError};
use crate::polyadic::{NaryOperation, PolyadicGroup};
use crate::Elem;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error("variable x{} is not bound by an assignment of length {bound}", .index + 1)]
    UnboundVariable { index: usize, bound: usize },
    #[error("operation applied to {got} arguments, arity is {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("constant {element} out of range for carrier of size {order}")]
    ConstantOutOfRange { element: Elem, order: usize },
    #[error("no skew element for {0}")]
    NoSkew(Elem),
}

/// An element of `G[X]`: variables, constants, `f` and skew.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolyadicTerm {
    Var(usize),
    Const(Elem),
    Apply(Vec<PolyadicTerm>),
    Skew(Box<PolyadicTerm>),
}

/// `left ≈ right`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Equation {
    pub left: PolyadicTerm,
    pub right: PolyadicTerm,
}

impl PolyadicTerm {
    pub fn skew(t: PolyadicTerm) -> PolyadicTerm {
        PolyadicTerm::Skew(Box::new(t))
    }

    /// Largest variable index, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            PolyadicTerm::Var(i) => Some(*i),
            PolyadicTerm::Const(_) => None,
            PolyadicTerm::Apply(ts) => ts.iter().filter_map(PolyadicTerm::max_var).max(),
            PolyadicTerm::Skew(t) => t.max_var(),
        }
    }

    pub fn is_coefficient_free(&self) -> bool {
        match self {
            PolyadicTerm::Var(_) => true,
            PolyadicTerm::Const(_) => false,
            PolyadicTerm::Apply(ts) => ts.iter().all(PolyadicTerm::is_coefficient_free),
            PolyadicTerm::Skew(t) => t.is_coefficient_free(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            PolyadicTerm::Var(_) | PolyadicTerm::Const(_) => 1,
            PolyadicTerm::Apply(ts) => 1 + ts.iter().map(PolyadicTerm::size).sum::<usize>(),
            PolyadicTerm::Skew(t) => 1 + t.size(),
        }
    }

    /// Renders with caller-supplied names for variables and constants.
    pub fn render_with(&self, var: &dyn Fn(usize) -> String, constant: &dyn Fn(Elem) -> String) -> String {
        match self {
            PolyadicTerm::Var(i) => var(*i),
            PolyadicTerm::Const(c) => constant(*c),
            PolyadicTerm::Apply(ts) => {
                let inner: Vec<String> = ts.iter().map(|t| t.render_with(var, constant)).collect();
                format!("f({})", inner.join(","))
            }
            PolyadicTerm::Skew(t) => format!("~{}", t.render_with(var, constant)),
        }
    }

    /// Renders in the surface syntax, naming constants from `op`.
    pub fn render(&self, op: &impl NaryOperation) -> String {
        self.render_with(&|i| format!("x{}", i + 1), &|c| quote_name(op.name(c)))
    }

    /// Parses with a custom identifier resolver; `resolve(name, bracketed)` returns the leaf.
    pub fn parse_with(
        src: &str,
        arity: usize,
        resolve: &dyn Fn(&str, bool) -> Option<PolyadicTerm>,
    ) -> Result<PolyadicTerm, ParseError> {
        let mut c = Cursor::new(src);
        let t = parse_poly(&mut c, arity, resolve)?;
        c.expect_end()?;
        Ok(t)
    }

    /// Parses against a polyadic group: `x<k>` is variable `k`, other names are elements.
    pub fn parse(src: &str, p: &impl NaryOperation) -> Result<PolyadicTerm, ParseError> {
        Self::parse_with(src, p.arity(), &standard_resolver(p))
    }
}

impl Equation {
    pub fn new(left: PolyadicTerm, right: PolyadicTerm) -> Self {
        Self { left, right }
    }

    pub fn max_var(&self) -> Option<usize> {
        self.left.max_var().max(self.right.max_var())
    }

    pub fn is_coefficient_free(&self) -> bool {
        self.left.is_coefficient_free() && self.right.is_coefficient_free()
    }

    pub fn parse_with(
        src: &str,
        arity: usize,
        resolve: &dyn Fn(&str, bool) -> Option<PolyadicTerm>,
    ) -> Result<Equation, ParseError> {
        let mut c = Cursor::new(src);
        let left = parse_poly(&mut c, arity, resolve)?;
        c.expect('=')?;
        let right = parse_poly(&mut c, arity, resolve)?;
        c.expect_end()?;
        Ok(Equation { left, right })
    }

    pub fn parse(src: &str, p: &impl NaryOperation) -> Result<Equation, ParseError> {
        Self::parse_with(src, p.arity(), &standard_resolver(p))
    }

    pub fn render(&self, op: &impl NaryOperation) -> String {
        format!("{} = {}", self.left.render(op), self.right.render(op))
    }

    /// True when both sides agree at `point`.
    pub fn holds_at(&self, point: &[Elem], op: &impl NaryOperation) -> Result<bool, TermError> {
        Ok(eval_term(&self.left, point, op)? == eval_term(&self.right, point, op)?)
    }
}

/// `x<k>` with `k ≥ 1`, as a 0-based index.
fn variable_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    digits.parse::<usize>().ok().map(|k| k - 1)
}

fn is_plain_identifier(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// An element name as written in terms: bare when unambiguous, bracketed otherwise.
pub fn quote_name(name: &str) -> String {
    if is_plain_identifier(name) && variable_index(name).is_none() && name != "f" && name != "1" {
        name.to_string()
    } else {
        format!("[{name}]")
    }
}

fn standard_resolver(p: &impl NaryOperation) -> impl Fn(&str, bool) -> Option<PolyadicTerm> + '_ {
    move |name, bracketed| {
        if !bracketed {
            if let Some(i) = variable_index(name) {
                return Some(PolyadicTerm::Var(i));
            }
        }
        (0..p.order()).find(|&x| p.name(x) == name).map(PolyadicTerm::Const)
    }
}

fn identifier<'a>(c: &mut Cursor<'a>) -> Option<(usize, &'a str, bool)> {
    let start = c.pos();
    match c.peek() {
        Some('[') => {
            c.bump();
            let name = c.take_while(|ch| ch != ']');
            if c.peek_tight() != Some(']') {
                return None;
            }
            c.bump();
            Some((start, name, true))
        }
        Some(ch) if ch.is_ascii_alphanumeric() || ch == '_' => {
            let start = c.pos();
            let name = c.take_while(|ch| ch.is_ascii_alphanumeric() || ch == '_');
            Some((start, name, false))
        }
        _ => None,
    }
}

fn parse_poly(
    c: &mut Cursor<'_>,
    arity: usize,
    resolve: &dyn Fn(&str, bool) -> Option<PolyadicTerm>,
) -> Result<PolyadicTerm, ParseError> {
    if c.eat('~') {
        return Ok(PolyadicTerm::skew(parse_poly(c, arity, resolve)?));
    }
    c.skip_ws();
    let start = c.pos();
    let Some((start_name, name, bracketed)) = identifier(c) else {
        return Err(match c.peek() {
            Some('[') => c.error("unterminated '['"),
            Some(ch) => c.error(format!("unexpected '{ch}'")),
            None => c.error("expected a term"),
        });
    };
    if name == "f" && !bracketed && c.peek() == Some('(') {
        c.bump();
        let mut args = vec![parse_poly(c, arity, resolve)?];
        while c.eat(',') {
            args.push(parse_poly(c, arity, resolve)?);
        }
        c.expect(')')?;
        if args.len() != arity {
            return Err(c.error_at(start, format!("f applied to {} arguments, arity is {arity}", args.len())));
        }
        return Ok(PolyadicTerm::Apply(args));
    }
    resolve(name, bracketed).ok_or_else(|| c.error_at(start_name, format!("unknown identifier '{name}'")))
}

/// Recursive evaluation with `f` and skew of `op`.
pub fn eval_term(t: &PolyadicTerm, assignment: &[Elem], op: &impl NaryOperation) -> Result<Elem, TermError> {
    match t {
        PolyadicTerm::Var(i) => assignment
            .get(*i)
            .copied()
            .ok_or(TermError::UnboundVariable { index: *i, bound: assignment.len() }),
        PolyadicTerm::Const(c) => {
            if *c < op.order() {
                Ok(*c)
            } else {
                Err(TermError::ConstantOutOfRange { element: *c, order: op.order() })
            }
        }
        PolyadicTerm::Apply(ts) => {
            if ts.len() != op.arity() {
                return Err(TermError::ArityMismatch { expected: op.arity(), got: ts.len() });
            }
            let args = ts.iter().map(|s| eval_term(s, assignment, op)).collect::<Result<Vec<_>, _>>()?;
            Ok(op.apply(&args))
        }
        PolyadicTerm::Skew(s) => {
            let x = eval_term(s, assignment, op)?;
            op.skew(x).ok_or(TermError::NoSkew(x))
        }
    }
}

/// A term in the language of ordinary groups with constants.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupTerm {
    Var(usize),
    Const(Elem),
    Identity,
    Product(Vec<GroupTerm>),
    Inverse(Box<GroupTerm>),
    Power(Box<GroupTerm>, i64),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupEquation {
    pub left: GroupTerm,
    pub right: GroupTerm,
}

impl GroupTerm {
    pub fn max_var(&self) -> Option<usize> {
        match self {
            GroupTerm::Var(i) => Some(*i),
            GroupTerm::Const(_) | GroupTerm::Identity => None,
            GroupTerm::Product(ts) => ts.iter().filter_map(GroupTerm::max_var).max(),
            GroupTerm::Inverse(t) | GroupTerm::Power(t, _) => t.max_var(),
        }
    }

    /// Parses products (`*` or whitespace), `^k`, `'`, parentheses, `1` and
    /// constants named in `names`.
    pub fn parse(src: &str, names: &[String]) -> Result<GroupTerm, ParseError> {
        let mut c = Cursor::new(src);
        let t = parse_group_product(&mut c, names)?;
        c.expect_end()?;
        Ok(t)
    }

    pub fn render_with(&self, constant: &dyn Fn(Elem) -> String) -> String {
        match self {
            GroupTerm::Var(i) => format!("x{}", i + 1),
            GroupTerm::Const(c) => constant(*c),
            GroupTerm::Identity => "1".to_string(),
            GroupTerm::Product(ts) => {
                let inner: Vec<String> = ts.iter().map(|t| t.render_atom(constant)).collect();
                inner.join(" * ")
            }
            GroupTerm::Inverse(t) => format!("{}^-1", t.render_atom(constant)),
            GroupTerm::Power(t, k) => format!("{}^{k}", t.render_atom(constant)),
        }
    }

    fn render_atom(&self, constant: &dyn Fn(Elem) -> String) -> String {
        match self {
            GroupTerm::Product(ts) if ts.len() != 1 => format!("({})", self.render_with(constant)),
            _ => self.render_with(constant),
        }
    }

    pub fn render(&self, names: &[String]) -> String {
        self.render_with(&|c| quote_name(&names[c]))
    }
}

impl GroupEquation {
    pub fn parse(src: &str, names: &[String]) -> Result<GroupEquation, ParseError> {
        let mut c = Cursor::new(src);
        let left = parse_group_product(&mut c, names)?;
        c.expect('=')?;
        let right = parse_group_product(&mut c, names)?;
        c.expect_end()?;
        Ok(GroupEquation { left, right })
    }

    pub fn max_var(&self) -> Option<usize> {
        self.left.max_var().max(self.right.max_var())
    }

    pub fn render(&self, names: &[String]) -> String {
        format!("{} = {}", self.left.render(names), self.right.render(names))
    }
}

fn parse_group_product(c: &mut Cursor<'_>, names: &[String]) -> Result<GroupTerm, ParseError> {
    let mut factors = vec![parse_group_factor(c, names)?];
    loop {
        match c.peek() {
            Some('*') => {
                c.bump();
                factors.push(parse_group_factor(c, names)?);
            }
            Some(ch) if ch == '(' || ch == '[' || ch.is_ascii_alphanumeric() || ch == '_' => {
                factors.push(parse_group_factor(c, names)?);
            }
            _ => break,
        }
    }
    Ok(if factors.len() == 1 { factors.pop().expect("one factor") } else { GroupTerm::Product(factors) })
}

fn parse_group_factor(c: &mut Cursor<'_>, names: &[String]) -> Result<GroupTerm, ParseError> {
    let mut t = match c.peek() {
        Some('(') => {
            c.bump();
            let inner = parse_group_product(c, names)?;
            c.expect(')')?;
            inner
        }
        _ => {
            let Some((start, name, bracketed)) = identifier(c) else {
                return Err(match c.peek() {
                    Some(ch) => c.error(format!("unexpected '{ch}'")),
                    None => c.error("expected a term"),
                });
            };
            if !bracketed && name == "1" {
                GroupTerm::Identity
            } else if let (false, Some(i)) = (bracketed, variable_index(name)) {
                GroupTerm::Var(i)
            } else {
                let e = names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| c.error_at(start, format!("unknown identifier '{name}'")))?;
                GroupTerm::Const(e)
            }
        }
    };
    loop {
        match c.peek_tight() {
            Some('\'') => {
                c.bump();
                t = GroupTerm::Inverse(Box::new(t));
            }
            Some('^') => {
                c.bump();
                let k = if c.eat('(') {
                    let k = c.integer()?;
                    c.expect(')')?;
                    k
                } else {
                    c.integer()?
                };
                t = GroupTerm::Power(Box::new(t), k);
            }
            _ => return Ok(t),
        }
    }
}

/// Evaluation in an ordinary group.
pub fn eval_group_term(t: &GroupTerm, assignment: &[Elem], g: &FiniteGroup) -> Result<Elem, TermError> {
    Ok(match t {
        GroupTerm::Var(i) => {
            *assignment.get(*i).ok_or(TermError::UnboundVariable { index: *i, bound: assignment.len() })?
        }
        GroupTerm::Const(c) => {
            if *c >= g.order() {
                return Err(TermError::ConstantOutOfRange { element: *c, order: g.order() });
            }
            *c
        }
        GroupTerm::Identity => g.identity(),
        GroupTerm::Product(ts) => {
            let mut acc = g.identity();
            for s in ts {
                acc = g.mul(acc, eval_group_term(s, assignment, g)?);
            }
            acc
        }
        GroupTerm::Inverse(s) => g.inv(eval_group_term(s, assignment, g)?),
        GroupTerm::Power(s, k) => g.pow(eval_group_term(s, assignment, g)?, *k),
    })
}

fn flatten_factors<'a>(t: &'a GroupTerm, out: &mut Vec<&'a GroupTerm>) {
    match t {
        GroupTerm::Product(ts) => ts.iter().for_each(|s| flatten_factors(s, out)),
        GroupTerm::Power(s, k) if *k > 0 => (0..*k).for_each(|_| flatten_factors(s, out)),
        _ => out.push(t),
    }
}

/// Rewrites a group term over `ret_a(P)`: `u·v = f(u, a^{(n−2)}, v)` folded to
/// the right over the flattened product, `u⁻¹ = f(ā, u^{(n−3)}, ū, ā)`, `1 = ā`.
pub fn group_to_polyadic(t: &GroupTerm, a: Elem, p: &PolyadicGroup) -> PolyadicTerm {
    let n = p.arity();
    let abar = p.skew_of(a);
    let inverse = |u: PolyadicTerm| {
        let mut args = vec![PolyadicTerm::Const(abar)];
        args.extend(std::iter::repeat(u.clone()).take(n - 3));
        args.push(PolyadicTerm::skew(u));
        args.push(PolyadicTerm::Const(abar));
        PolyadicTerm::Apply(args)
    };
    match t {
        GroupTerm::Var(i) => PolyadicTerm::Var(*i),
        GroupTerm::Const(c) => PolyadicTerm::Const(*c),
        GroupTerm::Identity => PolyadicTerm::Const(abar),
        GroupTerm::Inverse(s) => inverse(group_to_polyadic(s, a, p)),
        GroupTerm::Power(_, k) if *k > 0 => fold_product(t, a, p),
        GroupTerm::Power(_, 0) => PolyadicTerm::Const(abar),
        GroupTerm::Power(s, k) => inverse(group_to_polyadic(&GroupTerm::Power(s.clone(), -k), a, p)),
        GroupTerm::Product(_) => fold_product(t, a, p),
    }
}

fn fold_product(t: &GroupTerm, a: Elem, p: &PolyadicGroup) -> PolyadicTerm {
    let mut factors = Vec::new();
    flatten_factors(t, &mut factors);
    let mut translated: Vec<PolyadicTerm> = factors.into_iter().map(|s| group_to_polyadic(s, a, p)).collect();
    let Some(mut acc) = translated.pop() else {
        return PolyadicTerm::Const(p.skew_of(a));
    };
    while let Some(left) = translated.pop() {
        let mut args = vec![left];
        args.extend(std::iter::repeat(PolyadicTerm::Const(a)).take(p.arity() - 2));
        args.push(acc);
        acc = PolyadicTerm::Apply(args);
    }
    acc
}

pub fn group_equation_to_polyadic(e: &GroupEquation, a: Elem, p: &PolyadicGroup) -> Equation {
    Equation { left: group_to_polyadic(&e.left, a, p), right: group_to_polyadic(&e.right, a, p) }
}

/// The flattening image in the Post cover: `f ↦` product, skew `↦` power `2−n`,
/// constants `↦` their embedded cover elements.
pub fn polyadic_to_group(t: &PolyadicTerm, cover: &PostCover) -> GroupTerm {
    match t {
        PolyadicTerm::Var(i) => GroupTerm::Var(*i),
        PolyadicTerm::Const(c) => GroupTerm::Const(cover.embed(*c)),
        PolyadicTerm::Apply(ts) => GroupTerm::Product(ts.iter().map(|s| polyadic_to_group(s, cover)).collect()),
        PolyadicTerm::Skew(s) => GroupTerm::Power(Box::new(polyadic_to_group(s, cover)), 2 - cover.arity() as i64),
    }
}

pub fn polyadic_equation_to_group(e: &Equation, cover: &PostCover) -> GroupEquation {
    GroupEquation { left: polyadic_to_group(&e.left, cover), right: polyadic_to_group(&e.right, cover) }
}

/// A syllable of the free-product normal form in `G* ∗ F(X)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Syllable {
    /// A non-identity element of the Post cover.
    Const(Elem),
    /// A nonzero power of a variable.
    Var(usize, i64),
}

/// Normal form of an element of `G[X]` inside `G* ∗ F(X)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SyllableWord {
    syllables: Vec<Syllable>,
}

impl SyllableWord {
    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    fn push(&mut self, s: Syllable, cover: &PostCover) {
        let g = cover.group();
        match (self.syllables.last_mut(), s) {
            (Some(Syllable::Const(a)), Syllable::Const(b)) => {
                *a = g.mul(*a, b);
                if *a == g.identity() {
                    self.syllables.pop();
                }
            }
            (Some(Syllable::Var(i, e)), Syllable::Var(j, f)) if *i == j => {
                *e += f;
                if *e == 0 {
                    self.syllables.pop();
                }
            }
            (_, Syllable::Const(b)) if b == g.identity() => {}
            (_, Syllable::Var(_, 0)) => {}
            _ => self.syllables.push(s),
        }
    }

    fn extend(&mut self, other: &SyllableWord, cover: &PostCover) {
        for &s in &other.syllables {
            self.push(s, cover);
        }
    }

    fn inverse(&self, cover: &PostCover) -> SyllableWord {
        let g = cover.group();
        let syllables = self
            .syllables
            .iter()
            .rev()
            .map(|s| match *s {
                Syllable::Const(c) => Syllable::Const(g.inv(c)),
                Syllable::Var(i, e) => Syllable::Var(i, -e),
            })
            .collect();
        SyllableWord { syllables }
    }

    fn pow(&self, k: i64, cover: &PostCover) -> SyllableWord {
        let base = if k < 0 { self.inverse(cover) } else { self.clone() };
        let mut out = SyllableWord::default();
        for _ in 0..k.unsigned_abs() {
            out.extend(&base, cover);
        }
        out
    }

    /// Sum of variable exponents and of constant grades.
    pub fn height(&self, cover: &PostCover) -> i64 {
        self.syllables
            .iter()
            .map(|s| match *s {
                Syllable::Const(c) => cover.grade(c) as i64,
                Syllable::Var(_, e) => e,
            })
            .sum()
    }

    /// True when the free-product normal-form conditions and the height condition hold.
    pub fn is_normal(&self, cover: &PostCover) -> bool {
        let g = cover.group();
        let adjacent_ok = self.syllables.windows(2).all(|w| match (w[0], w[1]) {
            (Syllable::Const(_), Syllable::Const(_)) => false,
            (Syllable::Var(i, _), Syllable::Var(j, _)) => i != j,
            _ => true,
        });
        let entries_ok = self.syllables.iter().all(|s| match *s {
            Syllable::Const(c) => c != g.identity(),
            Syllable::Var(_, e) => e != 0,
        });
        let modulus = cover.arity() as i64 - 1;
        adjacent_ok && entries_ok && self.height(cover).rem_euclid(modulus) == 1
    }

    /// Value in the cover with variables sent to embedded elements of `G`.
    pub fn eval(&self, assignment: &[Elem], cover: &PostCover) -> Result<Elem, TermError> {
        let g = cover.group();
        let mut acc = g.identity();
        for s in &self.syllables {
            let v = match *s {
                Syllable::Const(c) => c,
                Syllable::Var(i, e) => {
                    let x = assignment.get(i).ok_or(TermError::UnboundVariable { index: i, bound: assignment.len() })?;
                    g.pow(cover.embed(*x), e)
                }
            };
            acc = g.mul(acc, v);
        }
        Ok(acc)
    }

    pub fn render(&self, cover: &PostCover) -> String {
        let parts: Vec<String> = self
            .syllables
            .iter()
            .map(|s| match *s {
                Syllable::Const(c) => format!("[{}]", cover.group().name(c)),
                Syllable::Var(i, 1) => format!("x{}", i + 1),
                Syllable::Var(i, e) => format!("x{}^{e}", i + 1),
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" ")
        }
    }
}

impl Default for SyllableWord {
    fn default() -> Self {
        SyllableWord { syllables: Vec::new() }
    }
}

/// Normal form: `f` concatenates, constants embed at grade 1, skew is the power `2−n`.
pub fn normalize_term(t: &PolyadicTerm, cover: &PostCover) -> SyllableWord {
    let mut out = SyllableWord::default();
    match t {
        PolyadicTerm::Var(i) => out.push(Syllable::Var(*i, 1), cover),
        PolyadicTerm::Const(c) => out.push(Syllable::Const(cover.embed(*c)), cover),
        PolyadicTerm::Apply(ts) => ts.iter().for_each(|s| out.extend(&normalize_term(s, cover), cover)),
        PolyadicTerm::Skew(s) => out = normalize_term(s, cover).pow(2 - cover.arity() as i64, cover),
    }
    out
}

impl fmt::Display for PolyadicTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_with(&|i| format!("x{}", i + 1), &|c| format!("[#{c}]")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::cover::build_post_cover;
    use crate::group::FiniteGroup;
    use crate::polyadic::retract;
    use crate::Limits;

    fn var(i: usize) -> PolyadicTerm {
        PolyadicTerm::Var(i)
    }

    #[test]
    fn parse_and_render() {
        let p = catalog::z3_negation();
        let t = PolyadicTerm::parse("f(x1, ~x2, 2)", &p).unwrap();
        assert_eq!(t, PolyadicTerm::Apply(vec![var(0), PolyadicTerm::skew(var(1)), PolyadicTerm::Const(2)]));
        assert_eq!(t.render(&p), "f(x1,~x2,2)");
        let e = PolyadicTerm::parse("f(x1,x1)", &p).unwrap_err();
        assert_eq!((e.line, e.column), (1, 1));
        let e = PolyadicTerm::parse("f(x1,x1,q)", &p).unwrap_err();
        assert_eq!(e.column, 9);
        let s3 = catalog::s3_inner(4).unwrap();
        let t = PolyadicTerm::parse("f([(12)], e, x1, [e])", &s3).unwrap();
        assert_eq!(t.render(&s3), "f([(12)],e,x1,e)");
        let eq = Equation::parse("f(x1,x1,x1) = 2", &p).unwrap();
        assert_eq!(eq.max_var(), Some(0));
        assert!(!eq.is_coefficient_free());
    }

    #[test]
    fn eval_examples() {
        let p = catalog::z3_negation();
        let t = PolyadicTerm::parse("f(x1,x1,x1)", &p).unwrap();
        assert_eq!(eval_term(&t, &[2], &p).unwrap(), 2);
        assert_eq!(eval_term(&PolyadicTerm::Const(1), &[0, 2], &p).unwrap(), 1);
        let q = catalog::z3_identity();
        assert_eq!(eval_term(&PolyadicTerm::skew(var(0)), &[1], &q).unwrap(), 2);
        assert_eq!(
            eval_term(&var(3), &[0], &q).unwrap_err(),
            TermError::UnboundVariable { index: 3, bound: 1 }
        );
    }

    #[test]
    fn normalize_examples() {
        let p = catalog::z3_identity();
        let cover = build_post_cover(&p, &Limits::default()).unwrap();
        let t = PolyadicTerm::Apply(vec![var(0), PolyadicTerm::Const(0), var(1)]);
        let w = normalize_term(&t, &cover);
        assert_eq!(
            w.syllables(),
            &[Syllable::Var(0, 1), Syllable::Const(cover.embed(0)), Syllable::Var(1, 1)]
        );
        assert_ne!(cover.embed(0), cover.group().identity());
        assert!(w.is_normal(&cover));
        let t = PolyadicTerm::Apply(vec![var(0), PolyadicTerm::skew(var(0)), var(0)]);
        assert_eq!(normalize_term(&t, &cover).syllables(), &[Syllable::Var(0, 1)]);
    }

    #[test]
    fn normal_form_evaluates_like_the_term() {
        for (_, p) in catalog::constructible().into_iter().take(4) {
            let cover = build_post_cover(&p, &Limits::default()).unwrap();
            let t = PolyadicTerm::parse("f(~f(x1,x2,0), 1, f(x2,~x1,~~x2))", &p).unwrap();
            let w = normalize_term(&t, &cover);
            assert!(w.is_normal(&cover));
            for x in 0..p.order() {
                for y in 0..p.order() {
                    let v = eval_term(&t, &[x, y], &p).unwrap();
                    assert_eq!(w.eval(&[x, y], &cover).unwrap(), cover.embed(v));
                }
            }
        }
    }

    #[test]
    fn group_terms_parse() {
        let names: Vec<String> = ["0", "1", "2"].iter().map(|s| s.to_string()).collect();
        let t = GroupTerm::parse("[2] x1^2 x2^-1 * [1] x1", &names).unwrap();
        let GroupTerm::Product(fs) = &t else { panic!("product expected") };
        assert_eq!(fs.len(), 5);
        assert_eq!(GroupTerm::parse("1", &names).unwrap(), GroupTerm::Identity);
        assert_eq!(GroupTerm::parse("[1]", &names).unwrap(), GroupTerm::Const(1));
        assert_eq!(GroupTerm::parse("2", &names).unwrap(), GroupTerm::Const(2));
        assert_eq!(GroupTerm::parse("x1'", &names).unwrap(), GroupTerm::Inverse(Box::new(GroupTerm::Var(0))));
        assert!(GroupTerm::parse("x1 q", &names).is_err());
        let e = GroupEquation::parse("x1 * x2 = 1", &names).unwrap();
        assert_eq!(e.render(&names), "x1 * x2 = 1");
    }

    #[test]
    fn inverse_at_arity_three() {
        let p = catalog::z3_negation();
        let t = group_to_polyadic(&GroupTerm::Inverse(Box::new(GroupTerm::Var(0))), 1, &p);
        let abar = PolyadicTerm::Const(p.skew_of(1));
        assert_eq!(t, PolyadicTerm::Apply(vec![abar.clone(), PolyadicTerm::skew(var(0)), abar]));
        assert_eq!(group_to_polyadic(&GroupTerm::Var(0), 0, &p), var(0));
    }

    fn check_translation(src: &str, p: &PolyadicGroup) {
        let ret_names = p.names();
        let e = GroupEquation::parse(src, &ret_names).unwrap();
        for a in 0..p.order() {
            let r: FiniteGroup = retract(p, a).unwrap();
            let t = group_equation_to_polyadic(&e, a, p);
            for x in 0..p.order() {
                for y in 0..p.order() {
                    let pt = [x, y];
                    let lhs = eval_group_term(&e.left, &pt, &r).unwrap() == eval_group_term(&e.right, &pt, &r).unwrap();
                    assert_eq!(lhs, t.holds_at(&pt, p).unwrap(), "{src} anchor {a} at {pt:?}");
                }
            }
        }
    }

    #[test]
    fn translation_preserves_solutions() {
        for (_, p) in catalog::constructible() {
            check_translation("x1 x2^-1 x1^3 = x2 x1", &p);
            check_translation("(x1 x2)^-2 = 1", &p);
        }
    }

    #[test]
    fn polyadic_to_group_agrees_in_cover() {
        let p = catalog::z4_negation(2);
        let cover = build_post_cover(&p, &Limits::default()).unwrap();
        let t = PolyadicTerm::parse("f(~x1, f(x2,3,x1), ~~x2)", &p).unwrap();
        let g = polyadic_to_group(&t, &cover);
        for x in 0..4 {
            for y in 0..4 {
                let v = eval_term(&t, &[x, y], &p).unwrap();
                let w = eval_group_term(&g, &[cover.embed(x), cover.embed(y)], cover.group()).unwrap();
                assert_eq!(w, cover.embed(v));
            }
        }
    }
}
