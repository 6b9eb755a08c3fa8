//! Recursive-descent parser for gauge nets.
//!
//! ```text
//! expr     := term (('+'|'-') term)*
//! term     := factor ('*' factor)*
//! factor   := '-' factor | number | 'u' ['^' rational] | 'L' ['^' integer]
//!           | 'abs(' expr ')' | 'max(' expr ',' expr ')' | '(' expr ')'
//! rational := ['-'] integer ['/' integer]  (optionally parenthesized)
//! ```

use num_rational::Rational64;
use thiserror::Error;

use super::net::{Expr, SymbolicNet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unsupported at {pos}: {msg}")]
    Unsupported { pos: usize, msg: String },
}

pub fn parse_net(text: &str) -> Result<SymbolicNet, ParseError> {
    let mut p = Parser::new(text);
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(SymbolicNet::new(e))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            src: text.as_bytes(),
            pos: 0,
        }
    }

    fn syntax(&self, msg: &str) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.syntax(&format!("expected `{}`", c as char)))
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        let end = self.pos + kw.len();
        let followed_by_ident = self
            .src
            .get(end)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_');
        if self.src.get(self.pos..end) == Some(kw.as_bytes()) && !followed_by_ident {
            self.pos = end;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat(b'+') {
                terms.push(self.term()?);
            } else if self.eat(b'-') {
                terms.push(Expr::Neg(Box::new(self.term()?)));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().expect("one term")
        } else {
            Expr::Add(terms)
        })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.factor()?];
        while self.eat(b'*') {
            factors.push(self.factor()?);
        }
        Ok(if factors.len() == 1 {
            factors.pop().expect("one factor")
        } else {
            Expr::Mul(factors)
        })
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            None => Err(self.syntax("unexpected end of input")),
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.factor()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Expr::Const(self.number()?)),
            Some(_) => {
                if self.keyword("abs") {
                    self.expect(b'(')?;
                    let e = self.expr()?;
                    self.expect(b')')?;
                    Ok(Expr::Abs(Box::new(e)))
                } else if self.keyword("max") {
                    self.expect(b'(')?;
                    let a = self.expr()?;
                    self.expect(b',')?;
                    let b = self.expr()?;
                    self.expect(b')')?;
                    Ok(Expr::Max(Box::new(a), Box::new(b)))
                } else if self.keyword("u") {
                    if self.eat(b'^') {
                        Ok(Expr::U(self.rational()?))
                    } else {
                        Ok(Expr::U(Rational64::from_integer(1)))
                    }
                } else if self.keyword("L") {
                    if self.eat(b'^') {
                        let start = self.pos;
                        let r = self.rational()?;
                        if !r.is_integer() {
                            return Err(ParseError::Unsupported {
                                pos: start,
                                msg: "powers of L must be integers".into(),
                            });
                        }
                        let k = i32::try_from(*r.numer()).map_err(|_| ParseError::Unsupported {
                            pos: start,
                            msg: "power of L out of range".into(),
                        })?;
                        Ok(Expr::L(k))
                    } else {
                        Ok(Expr::L(1))
                    }
                } else {
                    Err(self.syntax("expected a number, `u`, `L`, `abs(`, `max(` or `(`"))
                }
            }
        }
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let s = self.src;
        let mut i = self.pos;
        while i < s.len() && (s[i].is_ascii_digit() || s[i] == b'.') {
            i += 1;
        }
        if i < s.len() && (s[i] == b'e' || s[i] == b'E') {
            let mut j = i + 1;
            if j < s.len() && (s[j] == b'+' || s[j] == b'-') {
                j += 1;
            }
            if j < s.len() && s[j].is_ascii_digit() {
                while j < s.len() && s[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let text = std::str::from_utf8(&s[start..i]).expect("ascii slice");
        self.pos = i;
        text.parse::<f64>().map_err(|_| ParseError::Syntax {
            pos: start,
            msg: format!("malformed number `{text}`"),
        })
    }

    fn integer(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let neg = self.eat(b'-');
        self.skip_ws();
        let digits = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits {
            return Err(ParseError::Syntax {
                pos: start,
                msg: "expected an integer".into(),
            });
        }
        let text = std::str::from_utf8(&self.src[digits..self.pos]).expect("ascii digits");
        let v: i64 = text.parse().map_err(|_| ParseError::Unsupported {
            pos: start,
            msg: format!("integer `{text}` out of range"),
        })?;
        Ok(if neg { -v } else { v })
    }

    fn rational(&mut self) -> Result<Rational64, ParseError> {
        let paren = self.eat(b'(');
        let start = self.pos;
        let n = self.integer()?;
        if matches!(self.src.get(self.pos), Some(b'.') | Some(b'e') | Some(b'E')) {
            return Err(ParseError::Unsupported {
                pos: start,
                msg: "exponents must be rationals p/q".into(),
            });
        }
        let d = if self.eat(b'/') { self.integer()? } else { 1 };
        if d == 0 {
            return Err(ParseError::Syntax {
                pos: start,
                msg: "zero denominator".into(),
            });
        }
        if paren {
            self.expect(b')')?;
        }
        Ok(Rational64::new(n, d))
    }
}
