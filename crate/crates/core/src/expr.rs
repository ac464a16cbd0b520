//! A small arithmetic expression grammar for user-supplied case files:
//! `+ - * /`, `pow(f, q)`, `exp`, `log`, `sin`, `cos`, `sqrt` over named
//! coordinates and constants (`pi`, `e`, numeric literals).

use crate::error::{Error, Result};
use crate::jet::Jet;

#[derive(Clone, Debug, PartialEq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// `pow(base, exponent)`; the exponent must be constant.
    Pow(Box<Expr>, f64),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Parse with the given coordinate names.
    pub fn parse(src: &str, variables: &[String]) -> Result<Expr> {
        let tokens = tokenize(src)?;
        let mut parser = Parser {
            tokens,
            pos: 0,
            variables,
        };
        let expr = parser.expression()?;
        if parser.pos != parser.tokens.len() {
            return Err(Error::Parse(format!(
                "unexpected trailing input near `{:?}`",
                parser.tokens[parser.pos]
            )));
        }
        Ok(expr)
    }

    pub fn eval_jets(&self, seeds: &[Jet]) -> Result<Jet> {
        match self {
            Expr::Num(v) => Ok(Jet::constant(*v, seeds[0].dim())),
            Expr::Var(i) => Ok(seeds[*i].clone()),
            Expr::Neg(e) => Ok(e.eval_jets(seeds)?.neg()),
            Expr::Add(a, b) => a.eval_jets(seeds)?.add(&b.eval_jets(seeds)?),
            Expr::Sub(a, b) => a.eval_jets(seeds)?.sub(&b.eval_jets(seeds)?),
            Expr::Mul(a, b) => a.eval_jets(seeds)?.mul(&b.eval_jets(seeds)?),
            Expr::Div(a, b) => a.eval_jets(seeds)?.div(&b.eval_jets(seeds)?),
            Expr::Pow(a, q) => a.eval_jets(seeds)?.powf(*q),
            Expr::Call(f, a) => {
                let inner = a.eval_jets(seeds)?;
                match f {
                    Func::Exp => inner.exp(),
                    Func::Log => inner.ln(),
                    Func::Sin => inner.sin(),
                    Func::Cos => inner.cos(),
                    Func::Sqrt => inner.sqrt(),
                }
            }
        }
    }

    pub fn eval_f64(&self, point: &[f64]) -> Result<f64> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => point[*i],
            Expr::Neg(e) => -e.eval_f64(point)?,
            Expr::Add(a, b) => a.eval_f64(point)? + b.eval_f64(point)?,
            Expr::Sub(a, b) => a.eval_f64(point)? - b.eval_f64(point)?,
            Expr::Mul(a, b) => a.eval_f64(point)? * b.eval_f64(point)?,
            Expr::Div(a, b) => {
                let d = b.eval_f64(point)?;
                if d == 0.0 {
                    return Err(Error::Domain("division by zero".into()));
                }
                a.eval_f64(point)? / d
            }
            Expr::Pow(a, q) => a.eval_f64(point)?.powf(*q),
            Expr::Call(f, a) => {
                let v = a.eval_f64(point)?;
                match f {
                    Func::Exp => v.exp(),
                    Func::Log => {
                        if v <= 0.0 {
                            return Err(Error::Domain(format!("log of {v}")));
                        }
                        v.ln()
                    }
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Sqrt => {
                        if v < 0.0 {
                            return Err(Error::Domain(format!("sqrt of {v}")));
                        }
                        v.sqrt()
                    }
                }
            }
        })
    }

    fn eval_const(&self) -> Result<f64> {
        match self {
            Expr::Var(_) => Err(Error::Parse(
                "exponent of pow must be a constant expression".to_string(),
            )),
            _ => self.eval_f64(&[]),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Comma,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' | '−' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' | '×' => {
                out.push(Token::Star);
                i += 1;
            }
            '/' | '÷' => {
                out.push(Token::Slash);
                i += 1;
            }
            '(' => {
                out.push(Token::LParen);
                i += 1;
            }
            ')' => {
                out.push(Token::RParen);
                i += 1;
            }
            ',' => {
                out.push(Token::Comma);
                i += 1;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_digit()
                        || chars[i] == '.'
                        || chars[i] == 'e'
                        || chars[i] == 'E'
                        || ((chars[i] == '+' || chars[i] == '-')
                            && i > start
                            && (chars[i - 1] == 'e' || chars[i - 1] == 'E')))
                {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let v: f64 = text
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad number `{text}`")))?;
                out.push(Token::Num(v));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_')
                {
                    i += 1;
                }
                out.push(Token::Ident(chars[start..i].iter().collect()));
            }
            other => return Err(Error::Parse(format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    variables: &'a [String],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Token) -> Result<()> {
        match self.bump() {
            Some(found) if found == t => Ok(()),
            found => Err(Error::Parse(format!("expected {t:?}, found {found:?}"))),
        }
    }

    fn expression(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Some(Token::Slash) => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        match self.bump() {
            Some(Token::Minus) => Ok(Expr::Neg(Box::new(self.factor()?))),
            Some(Token::Num(v)) => Ok(Expr::Num(v)),
            Some(Token::LParen) => {
                let inner = self.expression()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            Some(Token::Ident(name)) => self.ident(name),
            found => Err(Error::Parse(format!("unexpected token {found:?}"))),
        }
    }

    fn ident(&mut self, name: String) -> Result<Expr> {
        let func = match name.as_str() {
            "exp" => Some(Func::Exp),
            "log" | "ln" => Some(Func::Log),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "sqrt" => Some(Func::Sqrt),
            _ => None,
        };
        if let Some(f) = func {
            self.expect(Token::LParen)?;
            let arg = self.expression()?;
            self.expect(Token::RParen)?;
            return Ok(Expr::Call(f, Box::new(arg)));
        }
        if name == "pow" {
            self.expect(Token::LParen)?;
            let base = self.expression()?;
            self.expect(Token::Comma)?;
            let exponent = self.expression()?.eval_const()?;
            self.expect(Token::RParen)?;
            return Ok(Expr::Pow(Box::new(base), exponent));
        }
        match name.as_str() {
            "pi" => return Ok(Expr::Num(std::f64::consts::PI)),
            "e" => return Ok(Expr::Num(std::f64::consts::E)),
            _ => {}
        }
        if let Some(i) = self.variables.iter().position(|v| v == &name) {
            return Ok(Expr::Var(i));
        }
        Err(Error::Parse(format!(
            "unknown identifier `{name}` (coordinates: {:?})",
            self.variables
        )))
    }
}
