//! Free-group words over indexed generators, free reduction, and the textual
//! grammar shared by presentations, workspaces and the CLI.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! expr     := term ('*'? term)*
//! term     := atom ('^' exponent)*
//! exponent := '-'? integer | atom            // an atom exponent means conjugation
//! atom     := ident | '1' | '(' expr ')' | '[' expr (',' expr)+ ']'
//! relation := expr ('=' expr)?
//! ```
//!
//! `[u,v]` is `u^-1*v^-1*u*v`, `[u,v,w]` is `[[u,v],w]`, and `u^v` is `v^-1*u*v`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Syllable {
    pub gen: usize,
    pub exp: BigInt,
}

/// A freely reduced word: no zero exponents, no two adjacent syllables on
/// the same generator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    syllables: Vec<Syllable>,
}

/// Freely reduce an arbitrary syllable sequence.
pub fn free_reduce<I>(raw: I) -> Word
where
    I: IntoIterator<Item = (usize, BigInt)>,
{
    let mut out: Vec<Syllable> = Vec::new();
    for (gen, exp) in raw {
        if exp.is_zero() {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.gen == gen => {
                last.exp += exp;
                if last.exp.is_zero() {
                    out.pop();
                }
            }
            _ => out.push(Syllable { gen, exp }),
        }
    }
    Word { syllables: out }
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn gen(gen: usize) -> Self {
        Word::power_of(gen, BigInt::one())
    }

    pub fn power_of(gen: usize, exp: BigInt) -> Self {
        free_reduce([(gen, exp)])
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Largest generator index mentioned, if any.
    pub fn max_gen(&self) -> Option<usize> {
        self.syllables.iter().map(|s| s.gen).max()
    }

    pub fn inverse(&self) -> Word {
        Word {
            syllables: self
                .syllables
                .iter()
                .rev()
                .map(|s| Syllable { gen: s.gen, exp: -&s.exp })
                .collect(),
        }
    }

    pub fn mul(&self, other: &Word) -> Word {
        free_reduce(
            self.syllables
                .iter()
                .chain(other.syllables.iter())
                .map(|s| (s.gen, s.exp.clone())),
        )
    }

    pub fn pow(&self, k: &BigInt) -> Word {
        if k.is_zero() || self.is_identity() {
            return Word::identity();
        }
        if self.syllables.len() == 1 {
            let s = &self.syllables[0];
            return Word::power_of(s.gen, &s.exp * k);
        }
        let base = if k.is_negative() { self.inverse() } else { self.clone() };
        let mut n = k.abs();
        let mut acc = Word::identity();
        let mut sq = base;
        while !n.is_zero() {
            if (&n % 2u32).is_one() {
                acc = acc.mul(&sq);
            }
            n >>= 1;
            if !n.is_zero() {
                sq = sq.mul(&sq);
            }
        }
        acc
    }

    /// `[self, other] = self^-1 * other^-1 * self * other`.
    pub fn commutator(&self, other: &Word) -> Word {
        self.inverse().mul(&other.inverse()).mul(self).mul(other)
    }

    /// `self^by = by^-1 * self * by`.
    pub fn conjugate(&self, by: &Word) -> Word {
        by.inverse().mul(self).mul(by)
    }

    /// Replace generator indices through `map`.
    pub fn relabel(&self, map: impl Fn(usize) -> usize) -> Word {
        free_reduce(self.syllables.iter().map(|s| (map(s.gen), s.exp.clone())))
    }

    /// Exponent-sum vector of length `n`.
    pub fn exponent_sums(&self, n: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); n];
        for s in &self.syllables {
            v[s.gen] += &s.exp;
        }
        v
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> WordDisplay<'a> {
        WordDisplay { word: self, names }
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        self.display(names).to_string()
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    names: &'a [String],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_identity() {
            return write!(f, "1");
        }
        for (k, s) in self.word.syllables.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            let name = self.names.get(s.gen).map(String::as_str).unwrap_or("?");
            if s.exp.is_one() {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{}", s.exp)?;
            }
        }
        Ok(())
    }
}

/// Parsed expression, kept so that presentation relations can be classified
/// by shape before they are flattened into words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Identity,
    Gen(usize),
    Product(Vec<Expr>),
    Power(Box<Expr>, BigInt),
    Conjugate(Box<Expr>, Box<Expr>),
    Commutator(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn eval(&self) -> Word {
        match self {
            Expr::Identity => Word::identity(),
            Expr::Gen(g) => Word::gen(*g),
            Expr::Product(parts) => parts.iter().fold(Word::identity(), |acc, p| acc.mul(&p.eval())),
            Expr::Power(base, k) => base.eval().pow(k),
            Expr::Conjugate(base, by) => base.eval().conjugate(&by.eval()),
            Expr::Commutator(u, v) => u.eval().commutator(&v.eval()),
        }
    }
}

/// `lhs = rhs`, or a bare relator when `rhs` is absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub lhs: Expr,
    pub rhs: Option<Expr>,
    pub text: String,
}

impl Relation {
    /// The relator `lhs * rhs^-1`.
    pub fn relator(&self) -> Word {
        match &self.rhs {
            Some(rhs) => self.lhs.eval().mul(&rhs.eval().inverse()),
            None => self.lhs.eval(),
        }
    }
}

/// Generators plus relations, as read from text or JSON.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub name: String,
    pub gens: Vec<String>,
    pub relations: Vec<Relation>,
    pub class: Option<usize>,
}

impl Presentation {
    pub fn new(name: &str, gens: Vec<String>, rels: &[&str], class: Option<usize>) -> Result<Self> {
        check_distinct(&gens)?;
        let relations = rels
            .iter()
            .map(|r| parse_relation(r, &gens))
            .collect::<Result<Vec<_>>>()?;
        Ok(Presentation { name: name.to_string(), gens, relations, class })
    }

    pub fn relators(&self) -> Vec<Word> {
        self.relations.iter().map(Relation::relator).collect()
    }
}

pub(crate) fn check_distinct(gens: &[String]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for g in gens {
        if !is_identifier(g) {
            return Err(Error::Invalid(format!("`{g}` is not a generator name")));
        }
        if !seen.insert(g.as_str()) {
            return Err(Error::DuplicateGenerator(g.clone()));
        }
    }
    Ok(())
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn parse_word(text: &str, gens: &[String]) -> Result<Word> {
    Ok(parse_expr(text, gens)?.eval())
}

pub fn parse_expr(text: &str, gens: &[String]) -> Result<Expr> {
    let mut p = Parser::new(text, gens)?;
    let e = p.expr()?;
    p.expect_end()?;
    Ok(e)
}

pub fn parse_relation(text: &str, gens: &[String]) -> Result<Relation> {
    let mut p = Parser::new(text, gens)?;
    let rel = p.relation()?;
    p.expect_end()?;
    Ok(rel)
}

/// Parse `group NAME { gens: a, b; rels: [b,a] = c, ...; class: 2 }`.
pub fn parse_presentation(text: &str) -> Result<Presentation> {
    let mut p = Parser::new(text, &[])?;
    p.keyword("group")?;
    let name = p.ident()?;
    p.punct('{')?;
    let mut gens = Vec::new();
    let mut relations = Vec::new();
    let mut class = None;
    loop {
        if p.eat('}') {
            break;
        }
        let key = p.ident()?;
        p.punct(':')?;
        match key.as_str() {
            "gens" => {
                if !p.peek_is(';') && !p.peek_is('}') {
                    gens.push(p.ident()?);
                    while p.eat(',') {
                        gens.push(p.ident()?);
                    }
                }
                check_distinct(&gens)?;
                p.gens = gens.clone();
            }
            "rels" => {
                if !p.peek_is(';') && !p.peek_is('}') {
                    relations.push(p.relation()?);
                    while p.eat(',') {
                        relations.push(p.relation()?);
                    }
                }
            }
            "class" => {
                let pos = p.pos();
                let k = p.integer()?;
                class = Some(
                    usize::try_from(&k).map_err(|_| Error::parse(pos, "class must be a small non-negative integer"))?,
                );
            }
            other => return Err(Error::parse(p.pos(), format!("unknown section `{other}`"))),
        }
        if !p.eat(';') {
            p.punct('}')?;
            break;
        }
    }
    p.expect_end()?;
    Ok(Presentation { name, gens, relations, class })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Punct(char),
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    at: usize,
    gens: Vec<String>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, gens: &[String]) -> Result<Self> {
        let mut toks = Vec::new();
        let bytes: Vec<char> = src.chars().collect();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_alphabetic() {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
                    i += 1;
                }
                toks.push((Tok::Ident(bytes[start..i].iter().collect()), start));
            } else if c.is_ascii_digit() {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = bytes[start..i].iter().collect();
                toks.push((Tok::Int(s.parse().expect("digits")), start));
            } else if "*^[](),={};:-".contains(c) {
                toks.push((Tok::Punct(c), i));
                i += 1;
            } else {
                return Err(Error::parse(i, format!("unexpected character `{c}`")));
            }
        }
        Ok(Parser { src, toks, at: 0, gens: gens.to_vec() })
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|t| t.1).unwrap_or(self.src.chars().count())
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.0)
    }

    fn peek_is(&self, c: char) -> bool {
        matches!(self.peek(), Some(Tok::Punct(p)) if *p == c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek_is(c) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn punct(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::parse(self.pos(), format!("expected `{c}`")))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) => {
                self.at += 1;
                Ok(s)
            }
            _ => Err(Error::parse(self.pos(), "expected identifier")),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        let pos = self.pos();
        match self.ident() {
            Ok(s) if s == kw => Ok(()),
            _ => Err(Error::parse(pos, format!("expected `{kw}`"))),
        }
    }

    fn integer(&mut self) -> Result<BigInt> {
        let neg = self.eat('-');
        match self.peek().cloned() {
            Some(Tok::Int(k)) => {
                self.at += 1;
                Ok(if neg { -k } else { k })
            }
            _ => Err(Error::parse(self.pos(), "expected integer")),
        }
    }

    fn expect_end(&self) -> Result<()> {
        if self.at == self.toks.len() {
            Ok(())
        } else {
            Err(Error::parse(self.pos(), "unexpected trailing input"))
        }
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(_)) => true,
            Some(Tok::Int(k)) => k.is_one(),
            Some(Tok::Punct(c)) => *c == '(' || *c == '[',
            None => false,
        }
    }

    fn relation(&mut self) -> Result<Relation> {
        let start = self.pos();
        let lhs = self.expr()?;
        let rhs = if self.eat('=') { Some(self.expr()?) } else { None };
        let end = self.pos();
        let text: String = self.src.chars().skip(start).take(end.saturating_sub(start)).collect();
        Ok(Relation { lhs, rhs, text: text.trim().to_string() })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut parts = vec![self.term()?];
        loop {
            // `*` is optional between juxtaposed atoms
            if self.eat('*') || self.starts_atom() {
                parts.push(self.term()?);
            } else {
                break;
            }
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Expr::Product(parts) })
    }

    fn term(&mut self) -> Result<Expr> {
        let mut base = self.atom()?;
        while self.eat('^') {
            if self.peek_is('-') || matches!(self.peek(), Some(Tok::Int(_))) {
                let k = self.integer()?;
                base = Expr::Power(Box::new(base), k);
            } else if self.starts_atom() {
                let by = self.atom()?;
                base = Expr::Conjugate(Box::new(base), Box::new(by));
            } else {
                return Err(Error::parse(self.pos(), "expected exponent or conjugating atom after `^`"));
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.at += 1;
                match self.gens.iter().position(|g| *g == name) {
                    Some(i) => Ok(Expr::Gen(i)),
                    None => Err(Error::UndeclaredGenerator { name, position: pos }),
                }
            }
            Some(Tok::Int(k)) if k.is_one() => {
                self.at += 1;
                Ok(Expr::Identity)
            }
            Some(Tok::Punct('(')) => {
                self.at += 1;
                let e = self.expr()?;
                self.punct(')')?;
                Ok(e)
            }
            Some(Tok::Punct('[')) => {
                self.at += 1;
                let mut acc = self.expr()?;
                self.punct(',')?;
                let next = self.expr()?;
                acc = Expr::Commutator(Box::new(acc), Box::new(next));
                while self.eat(',') {
                    let next = self.expr()?;
                    acc = Expr::Commutator(Box::new(acc), Box::new(next));
                }
                self.punct(']')?;
                Ok(acc)
            }
            _ => Err(Error::parse(pos, "expected generator, `1`, `(` or `[`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(s: &[&str]) -> Vec<String> {
        s.iter().map(|x| x.to_string()).collect()
    }

    fn syl(w: &Word) -> Vec<(usize, i64)> {
        w.syllables().iter().map(|s| (s.gen, i64::try_from(&s.exp).unwrap())).collect()
    }

    #[test]
    fn cancellation_and_merging() {
        let g = names(&["a", "b"]);
        assert!(parse_word("a*a^-1", &g).unwrap().is_identity());
        assert_eq!(syl(&parse_word("a^2*b*a^-1", &g).unwrap()), vec![(0, 2), (1, 1), (0, -1)]);
        let raw = [(0usize, 1i64), (1, 1), (1, -1), (0, 1)].map(|(g, e)| (g, BigInt::from(e)));
        assert_eq!(syl(&free_reduce(raw)), vec![(0, 2)]);
        let raw = [(0usize, 2i64), (0, 3)].map(|(g, e)| (g, BigInt::from(e)));
        assert_eq!(syl(&free_reduce(raw)), vec![(0, 5)]);
        let raw = [(0usize, 1i64), (0, -1)].map(|(g, e)| (g, BigInt::from(e)));
        assert!(free_reduce(raw).is_identity());
    }

    #[test]
    fn commutator_and_conjugation_conventions() {
        let g = names(&["a", "b"]);
        assert_eq!(syl(&parse_word("[a,b]", &g).unwrap()), vec![(0, -1), (1, -1), (0, 1), (1, 1)]);
        assert_eq!(syl(&parse_word("a^b", &g).unwrap()), vec![(1, -1), (0, 1), (1, 1)]);
        assert_eq!(parse_word("[a,b,a]", &g).unwrap(), parse_word("[[a,b],a]", &g).unwrap());
        assert_eq!(parse_word("a b", &g).unwrap(), parse_word("a*b", &g).unwrap());
        assert_eq!(parse_word("(a*b)^-2", &g).unwrap(), parse_word("b^-1 a^-1 b^-1 a^-1", &g).unwrap());
        assert!(parse_word("1", &g).unwrap().is_identity());
    }

    #[test]
    fn errors_report_position() {
        let g = names(&["a", "b"]);
        match parse_word("a*zz", &g) {
            Err(Error::UndeclaredGenerator { name, position }) => {
                assert_eq!(name, "zz");
                assert_eq!(position, 2);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_word("a^", &g), Err(Error::Parse { position: 2, .. })));
        assert!(matches!(parse_word("[a b]", &g), Err(Error::Parse { .. })));
        assert!(matches!(parse_word("a % b", &g), Err(Error::Parse { position: 2, .. })));
    }

    #[test]
    fn presentation_block() {
        let p = parse_presentation("group H { gens: a, b, c; rels: [b,a] = c, [c,a], [c,b]; class: 2 }").unwrap();
        assert_eq!(p.name, "H");
        assert_eq!(p.gens, names(&["a", "b", "c"]));
        assert_eq!(p.relations.len(), 3);
        assert_eq!(p.class, Some(2));
        assert_eq!(p.relations[0].text, "[b,a] = c");
        assert!(parse_presentation("group H { gens: a, a }").is_err());
        assert!(parse_presentation("group H { gens: a; rels: b }").is_err());
    }
}
