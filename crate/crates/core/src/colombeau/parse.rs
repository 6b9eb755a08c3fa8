//! Text form of representatives.
//!
//! ```text
//! expr    := term (('+'|'-') term)*
//! term    := factor ('*' factor)*
//! factor  := '-' factor | primary ['^' integer]
//! primary := number | 'x' | 'u' ['^' rational] | '(' expr ')'
//!          | 'K[' id ',' integer '](' arg ')'
//!          | 'd(' expr ')' | 'smooth(' expr ')' | 'scale-embed(' integer ')'
//!          | 'delta(' [id] ')' | 'heaviside(' [id] ')' | 'dH(' [id] ')'
//! arg     := shifted | '(' shifted ')' '/' gauge | shifted '/' gauge
//! shifted := 'x' [('-'|'+') ['-'] number]
//! gauge   := 'u' ['^' rational]
//! rational:= ['-'] integer ['/' integer], parenthesized unless a plain integer
//! ```
//!
//! Kernel ids are `phi`, `psi`, `eps`, `aq<q>` or a `bump(c, r; ...)` literal.
//! The printed form of a [`RepNet`] parses back to the same normal form.

use num_rational::Rational64;
use num_traits::{One, Zero};
use thiserror::Error;

use super::repnet::{embed_smooth, Kernel, Poly, RepNet};
use super::{ColombeauError, Interval};
use crate::testfn::{TestFunction, MAX_MOLLIFIER_ORDER};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("syntax error at {pos}: {msg}")]
pub struct RepParseError {
    pub pos: usize,
    pub msg: String,
}

/// Parses a representative on the domain `domain`.
pub fn parse_repnet(text: &str, domain: Interval) -> Result<RepNet, ColombeauError> {
    let mut p = Parser {
        src: text.as_bytes(),
        text,
        pos: 0,
        domain,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
    domain: Interval,
}

type PResult<T> = Result<T, ColombeauError>;

impl Parser<'_> {
    fn err(&self, msg: &str) -> ColombeauError {
        RepParseError {
            pos: self.pos,
            msg: msg.to_string(),
        }
        .into()
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

    fn expect(&mut self, c: u8) -> PResult<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> PResult<RepNet> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc.add(&self.term()?)?;
            } else if self.eat(b'-') {
                acc = acc.sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> PResult<RepNet> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = acc.mul(&self.factor()?)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> PResult<RepNet> {
        if self.eat(b'-') {
            return Ok(self.factor()?.scale(-1.0));
        }
        let is_gauge = self.peek() == Some(b'u') && !self.ident_follows_char(1);
        let base = self.primary()?;
        if !is_gauge && self.eat(b'^') {
            let n = self.integer()?;
            if n < 0 {
                return Err(self.err("negative powers are only allowed on `u`"));
            }
            let mut out = embed_smooth(Poly::constant(1.0), self.domain);
            for _ in 0..n {
                out = out.mul(&base)?;
            }
            return Ok(out);
        }
        Ok(base)
    }

    /// Whether an identifier character sits `off` bytes past the cursor.
    fn ident_follows_char(&self, off: usize) -> bool {
        self.src
            .get(self.pos + off)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.ident_follows_char(0) {
            self.pos += 1;
        }
        let mut id = self.text[start..self.pos].to_string();
        if id == "scale" && self.text[self.pos..].starts_with("-embed") {
            self.pos += "-embed".len();
            id.push_str("-embed");
        }
        id
    }

    fn number(&mut self) -> PResult<f64> {
        self.skip_ws();
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.src.get(p.pos).is_some_and(u8::is_ascii_digit) {
                p.pos += 1;
            }
        };
        digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
                digits(self);
            } else {
                self.pos = save;
            }
        }
        self.text[start..self.pos].parse().map_err(|_| {
            self.pos = start;
            self.err("expected a number")
        })
    }

    fn integer(&mut self) -> PResult<i64> {
        self.skip_ws();
        let start = self.pos;
        if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        self.text[start..self.pos].parse().map_err(|_| {
            self.pos = start;
            self.err("expected an integer")
        })
    }

    fn rational(&mut self) -> PResult<Rational64> {
        if self.eat(b'(') {
            let n = self.integer()?;
            let d = if self.eat(b'/') { self.integer()? } else { 1 };
            if d == 0 {
                return Err(self.err("zero denominator"));
            }
            self.expect(b')')?;
            Ok(Rational64::new(n, d))
        } else {
            Ok(Rational64::from_integer(self.integer()?))
        }
    }

    /// `u ['^' rational]`, the cursor on `u`.
    fn gauge(&mut self) -> PResult<Rational64> {
        if self.ident() != "u" {
            return Err(self.err("expected `u`"));
        }
        if self.eat(b'^') {
            self.rational()
        } else {
            Ok(Rational64::one())
        }
    }

    /// `x [(+|-) number]`, returning the shift `a` of `x - a`.
    fn shifted(&mut self) -> PResult<f64> {
        if self.ident() != "x" {
            return Err(self.err("expected `x`"));
        }
        let sign = if self.eat(b'-') {
            1.0
        } else if self.eat(b'+') {
            -1.0
        } else {
            return Ok(0.0);
        };
        let sign = if self.eat(b'-') { -sign } else { sign };
        Ok(sign * self.number()?)
    }

    /// A kernel id up to the next top-level `,` or `)` / `]`.
    fn kernel_id(&mut self) -> PResult<Kernel> {
        self.skip_ws();
        let start = self.pos;
        let mut depth = 0usize;
        while let Some(&c) = self.src.get(self.pos) {
            match c {
                b'(' => depth += 1,
                b')' if depth == 0 => break,
                b')' => depth -= 1,
                b',' | b']' if depth == 0 => break,
                _ => {}
            }
            self.pos += 1;
        }
        let id = self.text[start..self.pos].trim();
        if id.starts_with("bump") {
            let phi: TestFunction = id.parse().map_err(|_| {
                self.pos = start;
                ColombeauError::UnknownKernel(id.to_string())
            })?;
            Ok(Kernel::fixed(phi))
        } else {
            Kernel::named(id)
        }
    }

    fn optional_kernel(&mut self) -> PResult<Kernel> {
        let k = if self.peek() == Some(b')') {
            Kernel::standard()
        } else {
            self.kernel_id()?
        };
        self.expect(b')')?;
        Ok(k)
    }

    fn kernel_factor(&mut self) -> PResult<RepNet> {
        self.expect(b'[')?;
        let kernel = self.kernel_id()?;
        self.expect(b',')?;
        let j = self.integer()?;
        if j < -1 {
            return Err(self.err("kernel order must be at least -1"));
        }
        self.expect(b']')?;
        self.expect(b'(')?;
        let (shift, s) = if self.eat(b'(') {
            let a = self.shifted()?;
            self.expect(b')')?;
            self.expect(b'/')?;
            (a, self.gauge()?)
        } else {
            let a = self.shifted()?;
            let s = if self.eat(b'/') {
                self.gauge()?
            } else {
                Rational64::zero()
            };
            (a, s)
        };
        self.expect(b')')?;
        Ok(RepNet::kernel_atom(
            kernel,
            Rational64::zero(),
            j as i32,
            shift,
            s,
            self.domain,
        ))
    }

    fn primary(&mut self) -> PResult<RepNet> {
        let c = self
            .peek()
            .ok_or_else(|| self.err("unexpected end of input"))?;
        if c.is_ascii_digit() || c == b'.' {
            let v = self.number()?;
            return Ok(embed_smooth(Poly::constant(v), self.domain));
        }
        if self.eat(b'(') {
            let e = self.expr()?;
            self.expect(b')')?;
            return Ok(e);
        }
        let start = self.pos;
        let id = self.ident();
        match id.as_str() {
            "x" => Ok(embed_smooth(Poly::monomial(1.0, 1), self.domain)),
            "u" => {
                self.pos = start;
                let p = self.gauge()?;
                Ok(RepNet::gauge_power(p, self.domain))
            }
            "K" => self.kernel_factor(),
            "d" => {
                self.expect(b'(')?;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e.derive())
            }
            "smooth" => {
                self.expect(b'(')?;
                let e = self.expr()?;
                if e.atoms()
                    .iter()
                    .any(|a| !a.p.is_zero() || !a.kernels.is_empty())
                {
                    return Err(self.err("smooth(...) takes a polynomial in x"));
                }
                self.expect(b')')?;
                Ok(e)
            }
            "scale-embed" => {
                self.expect(b'(')?;
                let q = self.integer()?;
                if !(0..=MAX_MOLLIFIER_ORDER as i64).contains(&q) {
                    return Err(self.err(&format!("q must lie in 0..={MAX_MOLLIFIER_ORDER}")));
                }
                self.expect(b')')?;
                Ok(RepNet::delta(
                    Kernel::named(&format!("aq{q}"))?,
                    self.domain,
                ))
            }
            "delta" | "heaviside" | "dH" => {
                self.expect(b'(')?;
                let k = self.optional_kernel()?;
                Ok(match id.as_str() {
                    "delta" => RepNet::delta(k, self.domain),
                    "heaviside" => RepNet::heaviside(k, self.domain),
                    _ => RepNet::heaviside(k, self.domain).derive(),
                })
            }
            "" => Err(self.err("expected a factor")),
            _ => {
                self.pos = start;
                Err(self.err(&format!("unknown name `{id}`")))
            }
        }
    }
}
