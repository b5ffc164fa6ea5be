//! Words in the three generator letters, with a small parser for the
//! command-line syntax: letters `a`, `b`, `t`, optional exponents (`a^2`,
//! `a2`, `b^-1`), parenthesized groups, and commutator brackets `[u,v]`.

use crate::error::{Error, Result};
use std::fmt;
use std::iter::Peekable;
use std::str::{Chars, FromStr};

/// One generator: the flip on the distinguished edge, the rotation of the
/// distinguished edge around its left triangle, or the mark toggle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Flip,
    Rotate,
    Toggle,
}

impl Letter {
    pub fn token(self) -> char {
        match self {
            Letter::Flip => 'a',
            Letter::Rotate => 'b',
            Letter::Toggle => 't',
        }
    }

    /// Letters that undo this one: the flip has order four, the rotation
    /// three, the toggle two.
    pub fn inverse_letters(self) -> &'static [Letter] {
        match self {
            Letter::Flip => &[Letter::Flip; 3],
            Letter::Rotate => &[Letter::Rotate; 2],
            Letter::Toggle => &[Letter::Toggle; 1],
        }
    }
}

/// A finite word over the generators. The rightmost letter acts first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        Word { letters: letters.into_iter().collect() }
    }

    pub fn single(l: Letter) -> Self {
        Word { letters: vec![l] }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The word `self` followed (to the right) by `other`, so `other` acts
    /// first when the result is applied.
    pub fn then(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    /// Letterwise inverse: reverse the word and invert each letter using the
    /// generator orders 4, 3, 2.
    pub fn inverse(&self) -> Word {
        let mut letters = Vec::with_capacity(self.letters.len());
        for l in self.letters.iter().rev() {
            letters.extend_from_slice(l.inverse_letters());
        }
        Word { letters }
    }

    pub fn pow(&self, n: i32) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut letters = Vec::with_capacity(base.letters.len() * n.unsigned_abs() as usize);
        for _ in 0..n.unsigned_abs() {
            letters.extend_from_slice(&base.letters);
        }
        Word { letters }
    }

    /// The group commutator `u v u⁻¹ v⁻¹`.
    pub fn commutator(u: &Word, v: &Word) -> Word {
        u.then(v).then(&u.inverse()).then(&v.inverse())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        for l in &self.letters {
            write!(f, "{}", l.token())?;
        }
        Ok(())
    }
}

struct Parser<'a> {
    chars: Peekable<Chars<'a>>,
    input: &'a str,
}

impl<'a> Parser<'a> {
    fn err(&self, reason: impl Into<String>) -> Error {
        Error::WordParse { input: self.input.to_string(), reason: reason.into() }
    }

    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some(c) if c.is_whitespace()) {
            self.chars.next();
        }
    }

    /// Parse items until a closing delimiter or end of input.
    fn word(&mut self, depth: usize) -> Result<Vec<Letter>> {
        if depth > 64 {
            return Err(self.err("brackets nested too deeply"));
        }
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            let atom: Vec<Letter> = match self.chars.peek() {
                None | Some(',') | Some(']') | Some(')') => break,
                Some('a') => {
                    self.chars.next();
                    vec![Letter::Flip]
                }
                Some('b') => {
                    self.chars.next();
                    vec![Letter::Rotate]
                }
                Some('t') => {
                    self.chars.next();
                    vec![Letter::Toggle]
                }
                Some('e') => {
                    self.chars.next();
                    vec![]
                }
                Some('(') => {
                    self.chars.next();
                    let inner = self.word(depth + 1)?;
                    if self.chars.next() != Some(')') {
                        return Err(self.err("expected `)`"));
                    }
                    inner
                }
                Some('[') => {
                    self.chars.next();
                    let u = self.word(depth + 1)?;
                    if self.chars.next() != Some(',') {
                        return Err(self.err("expected `,` inside commutator brackets"));
                    }
                    let v = self.word(depth + 1)?;
                    if self.chars.next() != Some(']') {
                        return Err(self.err("expected `]`"));
                    }
                    Word::commutator(&Word::from_letters(u), &Word::from_letters(v))
                        .letters
                }
                Some(c) => {
                    let c = *c;
                    return Err(self.err(format!("unexpected character `{c}`")));
                }
            };
            let exp = self.exponent()?;
            let expanded = Word::from_letters(atom).pow(exp);
            out.extend_from_slice(&expanded.letters);
        }
        Ok(out)
    }

    /// Optional exponent: `^k`, `^-k`, or bare digits. Defaults to 1.
    fn exponent(&mut self) -> Result<i32> {
        self.skip_ws();
        let explicit = matches!(self.chars.peek(), Some('^'));
        if explicit {
            self.chars.next();
            self.skip_ws();
        }
        let negative = explicit && matches!(self.chars.peek(), Some('-'));
        if negative {
            self.chars.next();
        }
        let mut digits = String::new();
        while matches!(self.chars.peek(), Some(c) if c.is_ascii_digit()) {
            digits.push(self.chars.next().unwrap());
        }
        if digits.is_empty() {
            if explicit {
                return Err(self.err("`^` must be followed by an integer"));
            }
            return Ok(1);
        }
        let mag: i32 = digits.parse().map_err(|_| self.err("exponent out of range"))?;
        Ok(if negative { -mag } else { mag })
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser { chars: s.chars().peekable(), input: s };
        let letters = p.word(0)?;
        p.skip_ws();
        if let Some(c) = p.chars.next() {
            return Err(p.err(format!("unbalanced `{c}`")));
        }
        Ok(Word { letters })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn plain_letters_and_exponents() {
        assert_eq!(w("abt").to_string(), "abt");
        assert_eq!(w("a^2 b2 t"), w("aabbt"));
        assert_eq!(w("(ab)^2"), w("abab"));
        assert_eq!(w("(ab)^0"), Word::empty());
        assert_eq!(w("e"), Word::empty());
    }

    #[test]
    fn inverses_unfold_by_generator_order() {
        assert_eq!(w("a^-1"), w("aaa"));
        assert_eq!(w("b^-1"), w("bb"));
        assert_eq!(w("t^-1"), w("t"));
        assert_eq!(w("(ab)^-1"), w("bbaaa"));
        assert_eq!(w("ab").inverse(), w("bbaaa"));
    }

    #[test]
    fn commutator_brackets_expand() {
        assert_eq!(w("[a,b]"), w("abaaabb"));
        assert_eq!(
            Word::commutator(&w("bab"), &w("aababaa")),
            w("[bab,aababaa]")
        );
    }

    #[test]
    fn malformed_words_are_rejected() {
        for bad in ["x", "[a", "[a,b", "(ab", "a^", "a^x", "a)b"] {
            assert!(bad.parse::<Word>().is_err(), "`{bad}` should not parse");
        }
    }

    #[test]
    fn display_round_trip() {
        for s in ["e", "a", "abtba", "ttt"] {
            assert_eq!(w(s).to_string(), s);
        }
    }
}
