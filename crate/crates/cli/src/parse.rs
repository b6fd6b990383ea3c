//! Recursive-descent parser for terms.
//!
//! ```text
//! term := sum
//! sum  := prod (('+' | '-') prod)*
//! prod := atom ('*' atom)*
//! atom := INT | 'p' | 'x' | 's^' INT '(' term ')' | 's(' term ')'
//!       | 'Q(' term ',' term ')' | NAME '(' term (',' term)* ')' | '(' term ')'
//! ```

use std::collections::HashMap;
use std::sync::Arc;

use sigma_hensel::term::{NamedSeries, Term};
use sigma_hensel::{Error, Result};

/// Byte range of a node in the source, `start..end`.
pub type Span = std::ops::Range<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(u64),
    Ident(String),
    Sym(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(n) => n.to_string(),
            Tok::Ident(s) => s.clone(),
            Tok::Sym(c) => c.to_string(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Span)>> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_digit() {
            let mut end = i;
            while let Some(&(j, d)) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                end = j + 1;
                chars.next();
            }
            let n = src[i..end].parse().map_err(|_| Error::Syntax {
                column: column(src, i),
                expected: vec!["INT below 2^64".into()],
                found: src[i..end].into(),
            })?;
            out.push((Tok::Int(n), i..end));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut end = i;
            while let Some(&(j, d)) = chars.peek() {
                if !(d.is_ascii_alphanumeric() || d == '_') {
                    break;
                }
                end = j + 1;
                chars.next();
            }
            out.push((Tok::Ident(src[i..end].into()), i..end));
        } else if "+-*(),^".contains(c) {
            out.push((Tok::Sym(c), i..i + 1));
            chars.next();
        } else {
            return Err(Error::Syntax {
                column: column(src, i),
                expected: atom_start(),
                found: c.to_string(),
            });
        }
    }
    out.push((Tok::End, src.len()..src.len()));
    Ok(out)
}

/// 1-based character column of a byte offset.
fn column(src: &str, offset: usize) -> usize {
    src[..offset].chars().count() + 1
}

fn atom_start() -> Vec<String> {
    ["INT", "p", "x", "s", "Q", "series name", "("].map(String::from).to_vec()
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, Span)>,
    pos: usize,
    series: &'a HashMap<String, Arc<NamedSeries>>,
    /// Preorder: a node's span is recorded before its children's.
    spans: Vec<Span>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn start(&self) -> usize {
        self.toks[self.pos].1.start
    }

    fn prev_end(&self) -> usize {
        self.toks[self.pos - 1].1.end
    }

    fn error(&self, expected: Vec<String>) -> Error {
        let (tok, span) = &self.toks[self.pos];
        Error::Syntax {
            column: column(self.src, span.start),
            expected,
            found: tok.describe(),
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if *self.peek() == Tok::Sym(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(vec![c.to_string()]))
        }
    }

    /// Reserves a span slot so the parent precedes its children.
    fn open(&mut self) -> usize {
        self.spans.push(0..0);
        self.spans.len() - 1
    }

    fn close(&mut self, slot: usize, start: usize) {
        self.spans[slot] = start..self.prev_end();
    }

    /// Binary chains are left-associative; the outer node's slot is
    /// inserted in front of the left operand's subtree once it is known.
    fn sum(&mut self) -> Result<Term> {
        let start = self.start();
        let first = self.spans.len();
        let mut acc = self.prod()?;
        while let Tok::Sym(op @ ('+' | '-')) = *self.peek() {
            self.pos += 1;
            self.spans.insert(first, 0..0);
            let rhs = self.prod()?;
            acc = if op == '+' { Term::add(acc, rhs) } else { Term::sub(acc, rhs) };
            self.close(first, start);
        }
        Ok(acc)
    }

    fn prod(&mut self) -> Result<Term> {
        let start = self.start();
        let first = self.spans.len();
        let mut acc = self.atom()?;
        while *self.peek() == Tok::Sym('*') {
            self.pos += 1;
            self.spans.insert(first, 0..0);
            let rhs = self.atom()?;
            acc = Term::mul(acc, rhs);
            self.close(first, start);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Term> {
        let start = self.start();
        match self.peek().clone() {
            Tok::Sym('(') => {
                self.pos += 1;
                let t = self.sum()?;
                self.expect(')')?;
                Ok(t)
            }
            Tok::Int(n) => {
                let slot = self.open();
                self.pos += 1;
                self.close(slot, start);
                Ok(Term::Int(n))
            }
            Tok::Ident(name) => {
                let slot = self.open();
                self.pos += 1;
                let t = match name.as_str() {
                    "p" => Term::P,
                    "x" => Term::Var,
                    "s" => {
                        let iterate = if *self.peek() == Tok::Sym('^') {
                            self.pos += 1;
                            match *self.peek() {
                                Tok::Int(n) if n <= u32::MAX as u64 => {
                                    self.pos += 1;
                                    n as u32
                                }
                                _ => return Err(self.error(vec!["INT".into()])),
                            }
                        } else {
                            1
                        };
                        self.expect('(')?;
                        let inner = self.sum()?;
                        self.expect(')')?;
                        Term::sigma(iterate, inner)
                    }
                    "Q" => {
                        self.expect('(')?;
                        let a = self.sum()?;
                        self.expect(',')?;
                        let b = self.sum()?;
                        self.expect(')')?;
                        Term::quot(a, b)
                    }
                    _ => {
                        let Some(f) = self.series.get(&name).cloned() else {
                            return Err(Error::UnknownSeries(name));
                        };
                        self.expect('(')?;
                        let mut args = vec![self.sum()?];
                        while *self.peek() == Tok::Sym(',') {
                            self.pos += 1;
                            args.push(self.sum()?);
                        }
                        self.expect(')')?;
                        Term::apply(&f, args)?
                    }
                };
                self.close(slot, start);
                Ok(t)
            }
            _ => Err(self.error(atom_start())),
        }
    }
}

/// Parses a term; series references resolve through `series`.
pub fn parse_term(src: &str, series: &HashMap<String, Arc<NamedSeries>>) -> Result<Term> {
    parse_term_with_spans(src, series).map(|(t, _)| t)
}

/// Parses a term and returns the source span of every node, in preorder.
pub fn parse_term_with_spans(src: &str, series: &HashMap<String, Arc<NamedSeries>>) -> Result<(Term, Vec<Span>)> {
    let mut p = Parser {
        src,
        toks: lex(src)?,
        pos: 0,
        series,
        spans: Vec::new(),
    };
    let t = p.sum()?;
    if *p.peek() != Tok::End {
        return Err(p.error(vec!["+".into(), "-".into(), "*".into(), "end of input".into()]));
    }
    Ok((t, p.spans))
}
