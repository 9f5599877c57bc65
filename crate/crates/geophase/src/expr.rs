//! Numeric literals with `pi` arithmetic: `pi/2`, `2pi`, `-3*pi/4`, `(1+pi)/2`.
//!
//! Grammar, lowest precedence first:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary | implicit)*
//! unary   := '-' unary | '+' unary | atom
//! atom    := number | 'pi' | '(' sum ')'
//! ```
//!
//! `implicit` is juxtaposition with `pi` or a parenthesis, so `2pi` and
//! `3(pi+1)` multiply.

use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("bad number `{input}`: {reason}")]
pub struct ExprError {
    pub input: String,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Token {
    Num(f64),
    Pi,
    Plus,
    Minus,
    Star,
    Slash,
    Open,
    Close,
}

fn tokenize(s: &str) -> Result<Vec<Token>, String> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            '/' => {
                out.push(Token::Slash);
                i += 1;
            }
            '(' => {
                out.push(Token::Open);
                i += 1;
            }
            ')' => {
                out.push(Token::Close);
                i += 1;
            }
            'p' | 'P' => {
                if s[i..].len() >= 2 && s[i..i + 2].eq_ignore_ascii_case("pi") {
                    out.push(Token::Pi);
                    i += 2;
                } else {
                    return Err(format!("unexpected `{c}` at offset {i}"));
                }
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // exponent, but only when digits follow so `2e` is rejected
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &s[start..i];
                let v: f64 = text
                    .parse()
                    .map_err(|_| format!("`{text}` is not a number"))?;
                out.push(Token::Num(v));
            }
            _ => return Err(format!("unexpected `{c}` at offset {i}")),
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<Token> {
        self.tokens.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.peek();
        self.pos += 1;
        t
    }

    fn sum(&mut self) -> Result<f64, String> {
        let mut v = self.product()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    v += self.product()?;
                }
                Some(Token::Minus) => {
                    self.bump();
                    v -= self.product()?;
                }
                _ => return Ok(v),
            }
        }
    }

    fn product(&mut self) -> Result<f64, String> {
        let mut v = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                    v *= self.unary()?;
                }
                Some(Token::Slash) => {
                    self.bump();
                    let d = self.unary()?;
                    if d == 0.0 {
                        return Err("division by zero".into());
                    }
                    v /= d;
                }
                Some(Token::Pi) | Some(Token::Open) => v *= self.atom()?,
                _ => return Ok(v),
            }
        }
    }

    fn unary(&mut self) -> Result<f64, String> {
        match self.peek() {
            Some(Token::Minus) => {
                self.bump();
                Ok(-self.unary()?)
            }
            Some(Token::Plus) => {
                self.bump();
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<f64, String> {
        match self.bump() {
            Some(Token::Num(v)) => Ok(v),
            Some(Token::Pi) => Ok(PI),
            Some(Token::Open) => {
                let v = self.sum()?;
                match self.bump() {
                    Some(Token::Close) => Ok(v),
                    _ => Err("missing `)`".into()),
                }
            }
            Some(t) => Err(format!("unexpected {t:?}")),
            None => Err("unexpected end of expression".into()),
        }
    }
}

/// Evaluates a number expression. The result must be finite.
pub fn eval(input: &str) -> Result<f64, ExprError> {
    let fail = |reason: String| ExprError {
        input: input.to_string(),
        reason,
    };
    let tokens = tokenize(input).map_err(fail)?;
    if tokens.is_empty() {
        return Err(fail("empty expression".into()));
    }
    let mut p = Parser { tokens, pos: 0 };
    let v = p.sum().map_err(fail)?;
    if p.pos != p.tokens.len() {
        return Err(fail(format!("trailing input after token {}", p.pos)));
    }
    if !v.is_finite() {
        return Err(fail("value is not finite".into()));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_forms() {
        assert_eq!(eval("pi").unwrap(), PI);
        assert_eq!(eval("pi/2").unwrap(), PI / 2.0);
        assert_eq!(eval("2pi").unwrap(), 2.0 * PI);
        assert_eq!(eval("10*pi").unwrap(), 10.0 * PI);
        assert_eq!(eval("-pi/4").unwrap(), -PI / 4.0);
        assert_eq!(eval("3(pi+1)").unwrap(), 3.0 * (PI + 1.0));
        assert_eq!(eval(" ( 1 + 2 ) * 3 ").unwrap(), 9.0);
        assert_eq!(eval("1.5e-3").unwrap(), 1.5e-3);
        assert_eq!(eval("2 - 3 - 4").unwrap(), -5.0);
        assert_eq!(eval("8/2/2").unwrap(), 2.0);
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "pie", "2 +", "(pi", "1/0", "pi)", "x", "2e", "1..2"] {
            assert!(eval(bad).is_err(), "{bad:?} should fail");
        }
    }
}
