//! Exact arithmetic strings such as `"2/(e-1)"` or `"-2/(e^(-4)-1)"`.
//!
//! Grammar: numbers, `e`, `inf`, `+ - * / ^`, unary minus, parentheses and
//! `exp(..)`, `ln(..)`, `sqrt(..)`. `^` is right associative and binds
//! tighter than unary minus.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("cannot evaluate `{input}` at byte {pos}: {message}")]
pub struct ExprError {
    pub input: String,
    pub pos: usize,
    pub message: String,
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError { input: self.src.to_string(), pos: self.pos, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<f64, ExprError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc += self.term()?;
            } else if self.eat(b'-') {
                acc -= self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<f64, ExprError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat(b'*') {
                acc *= self.unary()?;
            } else if self.eat(b'/') {
                acc /= self.unary()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<f64, ExprError> {
        if self.eat(b'-') {
            return Ok(-self.unary()?);
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<f64, ExprError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exp = self.unary()?;
            return Ok(if base == std::f64::consts::E { exp.exp() } else { base.powf(exp) });
        }
        Ok(base)
    }

    fn ident(&mut self) -> &'a str {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn atom(&mut self) -> Result<f64, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected `)`");
                }
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let name = self.ident();
                match name {
                    "e" => Ok(std::f64::consts::E),
                    "inf" => Ok(f64::INFINITY),
                    "exp" | "ln" | "sqrt" => {
                        if !self.eat(b'(') {
                            return self.err(format!("expected `(` after `{name}`"));
                        }
                        let v = self.expr()?;
                        if !self.eat(b')') {
                            return self.err("expected `)`");
                        }
                        Ok(match name {
                            "exp" => v.exp(),
                            "ln" => v.ln(),
                            _ => v.sqrt(),
                        })
                    }
                    _ => {
                        self.pos = start;
                        self.err(format!("unknown identifier `{name}`"))
                    }
                }
            }
            Some(c) => self.err(format!("unexpected `{}`", c as char)),
            None => self.err("unexpected end of input"),
        }
    }

    fn number(&mut self) -> Result<f64, ExprError> {
        let start = self.pos;
        while self.pos < self.bytes.len() && (self.bytes[self.pos].is_ascii_digit() || self.bytes[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < self.bytes.len() && matches!(self.bytes[self.pos], b'E') {
            self.pos += 1;
            if self.pos < self.bytes.len() && matches!(self.bytes[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        match self.src[start..self.pos].parse::<f64>() {
            Ok(v) => Ok(v),
            Err(_) => {
                self.pos = start;
                self.err("malformed number")
            }
        }
    }
}

pub fn eval(src: &str) -> Result<f64, ExprError> {
    let mut p = Parser { src, bytes: src.as_bytes(), pos: 0 };
    let v = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn evaluates_closed_forms() {
        let cases: [(&str, f64); 9] = [
            ("2/(e-1)", 2.0 / (E - 1.0)),
            ("-2/(e^(-4)-1)", -2.0 / ((-4.0f64).exp() - 1.0)),
            ("1/(e^2-1)", 1.0 / (E * E - 1.0)),
            ("8/(e^-1-1)", 8.0 / ((-1.0f64).exp() - 1.0)),
            ("-3/(e^2 - 1)", -3.0 / (E * E - 1.0)),
            ("-e^2", -(E * E)),
            ("2^3^2", 512.0),
            ("exp(1) - e", 0.0),
            ("1.5E-3 * 2", 3e-3),
        ];
        for (s, want) in cases {
            let got = eval(s).unwrap();
            assert!((got - want).abs() <= 1e-15 * want.abs().max(1.0), "{s}: {got} vs {want}");
        }
        assert_eq!(eval("-inf").unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn reports_errors() {
        assert!(eval("2/(e-1").is_err());
        assert!(eval("2 3").is_err());
        assert!(eval("foo").is_err());
        assert!(eval("").is_err());
    }
}
