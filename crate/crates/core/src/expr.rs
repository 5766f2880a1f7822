//! Element expressions: integers, `pi` (or `π`), `t(d)` for the Teichmüller
//! lift of residue index `d`, combined with `+ - * /`, unary minus, `^k` with
//! an integer exponent, and parentheses.

use crate::error::{Error, Result};
use crate::local::{FieldRef, LFElem};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(i64),
    Pi,
    Teich,
    Op(char),
    Open,
    Close,
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        match c {
            ' ' | '\t' => i += 1,
            '0'..='9' => {
                let start = i;
                while i < cs.len() && cs[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = cs[start..i].iter().collect();
                let n = text
                    .parse()
                    .map_err(|_| bad(format!("integer {text} is too large")))?;
                out.push(Tok::Int(n));
            }
            'π' => {
                out.push(Tok::Pi);
                i += 1;
            }
            'p' if cs.get(i + 1) == Some(&'i') => {
                out.push(Tok::Pi);
                i += 2;
            }
            't' => {
                out.push(Tok::Teich);
                i += 1;
            }
            '+' | '-' | '*' | '/' | '^' => {
                out.push(Tok::Op(c));
                i += 1;
            }
            '(' => {
                out.push(Tok::Open);
                i += 1;
            }
            ')' => {
                out.push(Tok::Close);
                i += 1;
            }
            _ => return Err(bad(format!("unexpected character {c:?} in {s:?}"))),
        }
    }
    Ok(out)
}

fn bad(msg: String) -> Error {
    Error::InvalidInput(msg)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    field: &'a FieldRef,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        match self.next() {
            Some(ref got) if *got == t => Ok(()),
            got => Err(bad(format!("expected {t:?}, found {got:?}"))),
        }
    }

    fn sum(&mut self) -> Result<LFElem> {
        let mut acc = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == '+' {
                acc.add(&rhs)?
            } else {
                acc.sub(&rhs)?
            };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<LFElem> {
        let mut acc = self.factor()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.factor()?;
            acc = if c == '*' {
                acc.mul(&rhs)?
            } else {
                acc.div(&rhs)?
            };
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<LFElem> {
        if self.peek() == Some(&Tok::Op('-')) {
            self.pos += 1;
            return Ok(self.factor()?.neg());
        }
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Op('^')) {
            self.pos += 1;
            let negative = self.peek() == Some(&Tok::Op('-'));
            if negative {
                self.pos += 1;
            }
            let Some(Tok::Int(k)) = self.next() else {
                return Err(bad("exponent must be an integer".into()));
            };
            return base.pow(if negative { -k } else { k });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<LFElem> {
        match self.next() {
            Some(Tok::Int(n)) => Ok(LFElem::from_int(self.field, n)),
            Some(Tok::Pi) => Ok(self.field.pi()),
            Some(Tok::Teich) => {
                self.expect(Tok::Open)?;
                let Some(Tok::Int(d)) = self.next() else {
                    return Err(bad("t(..) takes a residue index".into()));
                };
                self.expect(Tok::Close)?;
                let q = self.field.residue().q() as i64;
                if d >= q {
                    return Err(bad(format!("residue index {d} is not below q = {q}")));
                }
                Ok(self.field.teichmuller(d as u32))
            }
            Some(Tok::Open) => {
                let x = self.sum()?;
                self.expect(Tok::Close)?;
                Ok(x)
            }
            t => Err(bad(format!("unexpected token {t:?}"))),
        }
    }
}

/// Parses and evaluates an element expression in `field`.
pub fn parse_elem(field: &FieldRef, s: &str) -> Result<LFElem> {
    let mut p = Parser {
        toks: lex(s)?,
        pos: 0,
        field,
    };
    let x = p.sum()?;
    if p.pos != p.toks.len() {
        return Err(bad(format!("trailing input in {s:?}")));
    }
    Ok(x)
}
