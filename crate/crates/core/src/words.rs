//! Free groups and the two models of the free polyadic group.
//!
//! [`FreeWord`] is a freely reduced word stored as runs `x^k`. A
//! [`PolyadicFreeWord`] is a word of height `≡ 1 (mod n−1)`, the carrier of
//! `F_pol^n(X)` with `f(w_1,…,w_n) = w_1⋯w_n` and `w̄ = w^{2−n}`. [`MpWord`] is
//! a word over `X ∪ X̄` of length `≡ 1 (mod n−1)`; equality of such words is
//! decided through the embedding `x̄ ↦ x^{2−n}`.

use std::fmt;
use std::sync::Arc;

use crate::lex::{Cursor, ParseError};

/// An interned generator name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordError {
    #[error("operand {operand} has height {height}, not 1 mod {modulus}")]
    HeightViolation { operand: usize, height: i64, modulus: usize },
    #[error("word has length {length}, not 1 mod {modulus}")]
    LengthViolation { length: usize, modulus: usize },
    #[error("expected {expected} operands, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("arity {0} is below 3")]
    ArityTooSmall(usize),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// A freely reduced word: no zero exponents and no two adjacent runs of the same generator.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FreeWord {
    runs: Vec<(Symbol, i64)>,
}

fn push_run(stack: &mut Vec<(Symbol, i64)>, sym: Symbol, exp: i64) {
    if exp == 0 {
        return;
    }
    match stack.last_mut() {
        Some((top, e)) if *top == sym => {
            *e += exp;
            if *e == 0 {
                stack.pop();
            }
        }
        _ => stack.push((sym, exp)),
    }
}

impl FreeWord {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn generator(name: &str) -> Self {
        Self::power_of(Symbol::new(name), 1)
    }

    pub fn power_of(sym: Symbol, exp: i64) -> Self {
        Self::reduce(std::iter::once((sym, exp)))
    }

    /// Freely reduces an arbitrary sequence of runs.
    pub fn reduce(letters: impl IntoIterator<Item = (Symbol, i64)>) -> Self {
        let mut runs = Vec::new();
        for (sym, exp) in letters {
            push_run(&mut runs, sym, exp);
        }
        Self { runs }
    }

    pub fn runs(&self) -> &[(Symbol, i64)] {
        &self.runs
    }

    pub fn is_identity(&self) -> bool {
        self.runs.is_empty()
    }

    /// Exponent sum.
    pub fn height(&self) -> i64 {
        self.runs.iter().map(|(_, e)| e).sum()
    }

    /// Number of letters `x^{±1}`.
    pub fn length(&self) -> u64 {
        self.runs.iter().map(|(_, e)| e.unsigned_abs()).sum()
    }

    /// The word spelled out as single letters `(x, ±1)`.
    pub fn letters(&self) -> impl Iterator<Item = (Symbol, i64)> + '_ {
        self.runs
            .iter()
            .flat_map(|(s, e)| std::iter::repeat((s.clone(), e.signum())).take(e.unsigned_abs() as usize))
    }

    pub fn mul(&self, other: &FreeWord) -> FreeWord {
        let mut runs = self.runs.clone();
        for (s, e) in &other.runs {
            push_run(&mut runs, s.clone(), *e);
        }
        FreeWord { runs }
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord { runs: self.runs.iter().rev().map(|(s, e)| (s.clone(), -e)).collect() }
    }

    pub fn pow(&self, k: i64) -> FreeWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = FreeWord::identity();
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    pub fn concat<'a>(words: impl IntoIterator<Item = &'a FreeWord>) -> FreeWord {
        let mut runs = Vec::new();
        for w in words {
            for (s, e) in &w.runs {
                push_run(&mut runs, s.clone(), *e);
            }
        }
        FreeWord { runs }
    }

    /// The cyclically reduced core (a conjugate of the word).
    pub fn cyclic_core(&self) -> FreeWord {
        let mut runs = self.runs.clone();
        while runs.len() >= 2 && runs[0].0 == runs[runs.len() - 1].0 {
            let (_, e) = runs.pop().expect("nonempty");
            runs[0].1 += e;
            if runs[0].1 == 0 {
                runs.remove(0);
            }
        }
        FreeWord { runs }
    }

    /// Parses the word syntax: generators are a letter followed by digits, `^k`
    /// and `'` give powers and inverses, `(…)^k` groups, `*` is optional and `1`
    /// is the empty word.
    pub fn parse(src: &str) -> Result<FreeWord, ParseError> {
        let mut c = Cursor::new(src);
        let w = parse_product(&mut c)?;
        c.expect_end()?;
        Ok(w)
    }
}

fn parse_product(c: &mut Cursor<'_>) -> Result<FreeWord, ParseError> {
    let mut acc = FreeWord::identity();
    let mut first = true;
    loop {
        match c.peek() {
            None | Some(')') => break,
            Some('*') if !first => {
                c.bump();
            }
            _ => {}
        }
        let factor = parse_factor(c)?;
        acc = acc.mul(&factor);
        first = false;
    }
    if first {
        return Err(c.error("expected a word"));
    }
    Ok(acc)
}

fn parse_factor(c: &mut Cursor<'_>) -> Result<FreeWord, ParseError> {
    let base = match c.peek() {
        Some('(') => {
            c.bump();
            let inner = parse_product(c)?;
            c.expect(')')?;
            inner
        }
        Some('1') => {
            c.bump();
            FreeWord::identity()
        }
        Some(ch) if ch.is_ascii_alphabetic() => {
            let start = c.pos();
            c.bump();
            c.take_while(|d| d.is_ascii_digit());
            FreeWord::generator(c.slice(start, c.pos()))
        }
        Some(ch) => return Err(c.error(format!("unexpected '{ch}'"))),
        None => return Err(c.error("expected a generator")),
    };
    parse_exponents(c, base)
}

fn parse_exponents(c: &mut Cursor<'_>, mut w: FreeWord) -> Result<FreeWord, ParseError> {
    loop {
        match c.peek_tight() {
            Some('\'') => {
                c.bump();
                w = w.inverse();
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
                w = w.pow(k);
            }
            _ => return Ok(w),
        }
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.runs.is_empty() {
            return f.write_str("1");
        }
        for (i, (s, e)) in self.runs.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if *e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

/// An element of `F_pol^n(X)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PolyadicFreeWord {
    word: FreeWord,
    arity: usize,
}

impl PolyadicFreeWord {
    pub fn new(word: FreeWord, arity: usize) -> Result<Self, WordError> {
        check_height(&word, arity, 0)?;
        Ok(Self { word, arity })
    }

    pub fn word(&self) -> &FreeWord {
        &self.word
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn into_word(self) -> FreeWord {
        self.word
    }
}

fn check_height(word: &FreeWord, arity: usize, operand: usize) -> Result<(), WordError> {
    if arity < 3 {
        return Err(WordError::ArityTooSmall(arity));
    }
    let modulus = arity - 1;
    let height = word.height();
    if height.rem_euclid(modulus as i64) != 1 {
        return Err(WordError::HeightViolation { operand, height, modulus });
    }
    Ok(())
}

/// True when `word` lies in `F_pol^n(X)`.
pub fn in_free_polyadic(word: &FreeWord, arity: usize) -> bool {
    check_height(word, arity, 0).is_ok()
}

/// `f(w_1,…,w_n) = w_1⋯w_n`; operands are numbered from 1 in errors.
pub fn f_free(arity: usize, operands: &[FreeWord]) -> Result<PolyadicFreeWord, WordError> {
    if operands.len() != arity {
        return Err(WordError::ArityMismatch { expected: arity, got: operands.len() });
    }
    for (i, w) in operands.iter().enumerate() {
        check_height(w, arity, i + 1)?;
    }
    Ok(PolyadicFreeWord { word: FreeWord::concat(operands), arity })
}

/// `w̄ = w^{2−n}`.
pub fn skew_free(w: &PolyadicFreeWord) -> PolyadicFreeWord {
    PolyadicFreeWord { word: w.word.pow(2 - w.arity as i64), arity: w.arity }
}

/// A letter of the cancellation model: `x` or its skew mark `x̄`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MpLetter {
    pub symbol: Symbol,
    pub skew: bool,
}

/// A word over `X ∪ X̄` of length `≡ 1 (mod n−1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MpWord {
    letters: Vec<MpLetter>,
    arity: usize,
}

impl MpWord {
    pub fn new(letters: Vec<MpLetter>, arity: usize) -> Result<Self, WordError> {
        if arity < 3 {
            return Err(WordError::ArityTooSmall(arity));
        }
        if letters.len() % (arity - 1) != 1 % (arity - 1) {
            return Err(WordError::LengthViolation { length: letters.len(), modulus: arity - 1 });
        }
        Ok(Self { letters, arity })
    }

    /// Parses letters `x` and `~x`, optionally separated by whitespace.
    pub fn parse(src: &str, arity: usize) -> Result<Self, WordError> {
        let mut c = Cursor::new(src);
        let mut letters = Vec::new();
        while !c.at_end() {
            let skew = c.eat('~');
            match c.peek() {
                Some(ch) if ch.is_ascii_alphabetic() => {
                    let start = c.pos();
                    c.bump();
                    c.take_while(|d| d.is_ascii_digit());
                    letters.push(MpLetter { symbol: Symbol::new(c.slice(start, c.pos())), skew });
                }
                Some(ch) => return Err(c.error(format!("unexpected '{ch}'")).into()),
                None => return Err(c.error("expected a generator").into()),
            }
        }
        Self::new(letters, arity)
    }

    pub fn letters(&self) -> &[MpLetter] {
        &self.letters
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Deletes the cancellable piece `x^{(j)} x̄ x^{(n−2−j)}` starting at `pos`, if there is one.
    pub fn delete_piece(&self, pos: usize) -> Option<MpWord> {
        let len = self.arity - 1;
        let piece = self.letters.get(pos..pos + len)?;
        let sym = &piece[0].symbol;
        let skews = piece.iter().filter(|l| l.skew).count();
        if skews != 1 || piece.iter().any(|l| l.symbol != *sym) {
            return None;
        }
        let mut letters = self.letters.clone();
        letters.drain(pos..pos + len);
        Some(MpWord { letters, arity: self.arity })
    }

    /// Inserts `x^{(j)} x̄ x^{(n−2−j)}` at `pos` (`j ≤ n−2`, `pos ≤ len`).
    pub fn insert_piece(&self, pos: usize, symbol: &Symbol, j: usize) -> MpWord {
        assert!(j <= self.arity - 2 && pos <= self.letters.len());
        let piece = (0..self.arity - 1).map(|k| MpLetter { symbol: symbol.clone(), skew: k == j });
        let mut letters = self.letters.clone();
        letters.splice(pos..pos, piece);
        MpWord { letters, arity: self.arity }
    }
}

impl fmt::Display for MpWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if l.skew {
                f.write_str("~")?;
            }
            write!(f, "{}", l.symbol)?;
        }
        Ok(())
    }
}

/// `x ↦ x`, `x̄ ↦ x^{2−n}`.
pub fn mp_embed(m: &MpWord) -> PolyadicFreeWord {
    let skew_exp = 2 - m.arity as i64;
    let word = FreeWord::reduce(m.letters.iter().map(|l| (l.symbol.clone(), if l.skew { skew_exp } else { 1 })));
    PolyadicFreeWord { word, arity: m.arity }
}

/// Equality of the embedded reduced words.
pub fn mp_equal(a: &MpWord, b: &MpWord) -> bool {
    a.arity == b.arity && mp_embed(a) == mp_embed(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> FreeWord {
        FreeWord::parse(s).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let e = w("x y y^-1 x^-1");
        assert!(e.is_identity());
        assert_eq!(e.height(), 0);
        let v = w("x^2 y^-1 x y^2");
        assert_eq!(v.runs().len(), 4);
        assert_eq!(v.height(), 4);
        assert!(in_free_polyadic(&v, 4));
        assert!(!in_free_polyadic(&v, 3));
    }

    #[test]
    fn parse_forms() {
        assert_eq!(w("x'"), w("x^-1"));
        assert_eq!(w("x*y"), w("xy"));
        assert_eq!(w("(xy)^2"), w("x y x y"));
        assert_eq!(w("(xy)'"), w("y^-1 x^-1"));
        assert_eq!(w("x^(-2)"), w("x'x'"));
        assert_eq!(w("1"), FreeWord::identity());
        assert_eq!(w("x1 x12").runs().len(), 2);
        assert!(FreeWord::parse("x +").is_err());
        assert!(FreeWord::parse("").is_err());
        assert_eq!(w("x^2 y^-1 x y^2").to_string(), "x^2 y^-1 x y^2");
    }

    #[test]
    fn f_free_examples() {
        let r = f_free(3, &[w("x"), w("y"), w("z")]).unwrap();
        assert_eq!(r.word(), &w("xyz"));
        assert_eq!(r.word().height(), 3);
        let err = f_free(4, &[w("x"), w("y y"), w("x"), w("x")]).unwrap_err();
        assert_eq!(err, WordError::HeightViolation { operand: 2, height: 2, modulus: 3 });
    }

    #[test]
    fn skew_examples() {
        let x3 = PolyadicFreeWord::new(w("x"), 3).unwrap();
        assert_eq!(skew_free(&x3).word(), &w("x^-1"));
        let x4 = PolyadicFreeWord::new(w("x"), 4).unwrap();
        assert_eq!(skew_free(&x4).word(), &w("x^-2"));
    }

    #[test]
    fn mp_examples() {
        let a = MpWord::parse("x ~x x", 3).unwrap();
        let b = MpWord::parse("x", 3).unwrap();
        assert!(mp_equal(&a, &b));
        assert!(!mp_equal(&b, &MpWord::parse("y", 3).unwrap()));
        let c = MpWord::parse("x x ~x x", 4).unwrap();
        assert!(mp_equal(&c, &MpWord::parse("x", 4).unwrap()));
        assert_eq!(
            MpWord::parse("x x", 3).unwrap_err(),
            WordError::LengthViolation { length: 2, modulus: 2 }
        );
        assert_eq!(a.delete_piece(0).unwrap(), b);
        assert_eq!(a.delete_piece(1).unwrap(), b);
        assert_eq!(b.insert_piece(1, &Symbol::new("y"), 0).to_string(), "x ~y y");
    }

    #[test]
    fn cyclic_core() {
        assert_eq!(w("x y z x^-1").cyclic_core(), w("y z"));
        assert_eq!(w("x^2 y x").cyclic_core().height(), 4);
    }
}
