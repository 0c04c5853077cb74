//! Recursive-descent parser for nc rational expressions.
//!
//! ```text
//! expr   := term { ("+" | "-") term }
//! term   := factor { ["*"] factor }
//! factor := atom { "^-1" }
//! atom   := rational | "x" digits | "inv" "(" expr ")" | "(" expr ")" | "-" atom
//! ```
//!
//! Whitespace is insignificant and a rational is `integer ["/" positive-integer]`.

use num_bigint::BigInt;

use crate::error::{NcError, Result};
use crate::expr::Expr;
use crate::field::{qi, Q};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Var(usize),
    Inv,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |pos: usize, msg: &str| NcError::Parse { pos, msg: msg.to_string() };
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '+' => out.push((Tok::Plus, start)),
            '-' => out.push((Tok::Minus, start)),
            '*' => out.push((Tok::Star, start)),
            '/' => out.push((Tok::Slash, start)),
            '^' => out.push((Tok::Caret, start)),
            '(' => out.push((Tok::LParen, start)),
            ')' => out.push((Tok::RParen, start)),
            '0'..='9' => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                out.push((Tok::Int(s.parse().map_err(|_| err(start, "bad integer"))?), start));
                i = j;
                continue;
            }
            'x' => {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j == i + 1 {
                    return Err(err(start, "expected digits after 'x'"));
                }
                let s: String = chars[i + 1..j].iter().collect();
                let idx: usize = s.parse().map_err(|_| err(start, "variable index too large"))?;
                out.push((Tok::Var(idx), start));
                i = j;
                continue;
            }
            'i' if chars[i..].iter().take(3).collect::<String>() == "inv" => {
                out.push((Tok::Inv, start));
                i += 3;
                continue;
            }
            _ => return Err(err(start, &format!("unexpected character '{c}'"))),
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    d: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.1).unwrap_or(self.end)
    }

    fn error<R>(&self, msg: &str) -> Result<R> {
        Err(NcError::Parse { pos: self.here(), msg: msg.to_string() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(&format!("expected {what}"))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(t);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.sub(t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn starts_factor(t: Option<&Tok>) -> bool {
        matches!(t, Some(Tok::Int(_)) | Some(Tok::Var(_)) | Some(Tok::Inv) | Some(Tok::LParen))
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        loop {
            if self.peek() == Some(&Tok::Star) {
                self.pos += 1;
                let f = self.factor()?;
                acc = acc.mul(f);
            } else if Self::starts_factor(self.peek()) {
                let f = self.factor()?;
                acc = acc.mul(f);
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let mut acc = self.atom()?;
        while self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            self.expect(Tok::Minus, "'-1' after '^'")?;
            match self.peek() {
                Some(Tok::Int(v)) if *v == BigInt::from(1) => self.pos += 1,
                _ => return self.error("only the exponent -1 is supported"),
            }
            acc = acc.inv();
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::Slash) {
                    self.pos += 1;
                    match self.peek().cloned() {
                        Some(Tok::Int(d)) if d > BigInt::from(0) => {
                            self.pos += 1;
                            Ok(Expr::Const(Q::new(n, d)))
                        }
                        _ => self.error("expected a positive denominator"),
                    }
                } else {
                    Ok(Expr::Const(Q::from_integer(n)))
                }
            }
            Some(Tok::Var(j)) => {
                if j == 0 || j > self.d {
                    return Err(NcError::VariableIndex { index: j, d: self.d });
                }
                self.pos += 1;
                Ok(Expr::Var(j - 1))
            }
            Some(Tok::Inv) => {
                self.pos += 1;
                self.expect(Tok::LParen, "'(' after inv")?;
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e.inv())
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Some(Tok::Minus) => {
                self.pos += 1;
                let a = self.atom()?;
                Ok(Expr::ScaleLeft(qi(-1), Box::new(a)))
            }
            _ => self.error("expected a number, variable, 'inv', '(' or '-'"),
        }
    }
}

/// Parses `text` as an expression in the variables `x1..xd`.
pub fn parse(text: &str, d: usize) -> Result<Expr> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, end: text.chars().count(), d };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.error("unexpected trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commutator_inverse_shape() {
        let e = parse("(x1*x2 - x2*x1)^-1", 2).unwrap();
        let expect = Expr::x(1).mul(Expr::x(2)).add(Expr::x(2).mul(Expr::x(1)).neg()).inv();
        assert_eq!(e, expect);
    }

    #[test]
    fn constants_and_synonyms() {
        assert_eq!(parse("3", 0).unwrap(), Expr::int(3));
        assert_eq!(parse("inv(x1)", 1).unwrap(), Expr::x(1).inv());
        assert_eq!(parse("x1x2", 2).unwrap(), Expr::x(1).mul(Expr::x(2)));
    }

    #[test]
    fn errors_are_positioned() {
        assert_eq!(parse("x3", 2), Err(NcError::VariableIndex { index: 3, d: 2 }));
        match parse("x1 + * x2", 2) {
            Err(NcError::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse("(x1", 1), Err(NcError::Parse { pos: 3, .. })));
        assert!(matches!(parse("x1^2", 1), Err(NcError::Parse { .. })));
    }

    #[test]
    fn format_round_trips() {
        for text in ["(x1*x2 - x2*x1)^-1", "3", "inv(x1)", "x1^-1*(1 + x2*x1^-1)^-1", "-x1*-x2 - -(x1 + 1/2)"] {
            let e = parse(text, 2).unwrap();
            assert_eq!(parse(&e.to_string(), 2).unwrap(), e, "{text}");
        }
    }
}
