//! Polynomial expressions and problem files.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := base ('^' natural)? | '-' factor
//! base   := rational | imag | 'i' | ident | 'conj(' expr ')'
//!         | 'Re(' expr ')' | 'Im(' expr ')' | '(' expr ')'
//! rational := integer ('/' natural)?      imag := rational 'i'
//! ```
//!
//! A literal glued to `i` is imaginary (`2i`, `3/2i`), which is also how the
//! printer writes imaginary coefficients.

mod problem;

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::algebra::{GaussRat, Poly, VarContext};

pub use problem::{parse_problem, ManifoldSection, MapSection, ProblemFile, TaskKind, TaskSection};

pub const MAX_EXPONENT: u32 = 1024;
pub const MAX_DEPTH: usize = 256;
/// Cap on `terms(a)·terms(b)` for a single product, so hostile input cannot
/// exhaust memory.
pub const MAX_PRODUCT_WORK: usize = 1_000_000;
pub const MAX_DEGREE: u32 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ErrorCode {
    Syntax,
    UnknownIdent,
    Exponent,
    TooLarge,
    MissingSection,
    UnknownSection,
    DuplicateKey,
    UnknownKey,
    Dimension,
    UnknownTask,
    BadValue,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::Syntax => "E_SYNTAX",
            ErrorCode::UnknownIdent => "E_UNKNOWN_IDENT",
            ErrorCode::Exponent => "E_EXPONENT",
            ErrorCode::TooLarge => "E_TOO_LARGE",
            ErrorCode::MissingSection => "E_MISSING_SECTION",
            ErrorCode::UnknownSection => "E_UNKNOWN_SECTION",
            ErrorCode::DuplicateKey => "E_DUPLICATE_KEY",
            ErrorCode::UnknownKey => "E_UNKNOWN_KEY",
            ErrorCode::Dimension => "E_DIMENSION",
            ErrorCode::UnknownTask => "E_UNKNOWN_TASK",
            ErrorCode::BadValue => "E_BAD_VALUE",
        }
    }
}

/// Positioned diagnostic; `line` and `col` are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub code: ErrorCode,
    pub message: String,
    pub line: usize,
    pub col: usize,
}

impl ParseError {
    pub fn new(code: ErrorCode, message: impl Into<String>, line: usize, col: usize) -> Self {
        ParseError {
            code,
            message: message.into(),
            line,
            col,
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at {}:{}: {}",
            self.code.as_str(),
            self.line,
            self.col,
            self.message
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    /// Integer immediately followed by `i`.
    ImagInt(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str, line0: usize, col0: usize) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (line0, col0);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push(Token {
                tok: t,
                line: tl,
                col: tc,
            });
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let v: BigInt = digits.parse().expect("ascii digits");
            let imag = i < chars.len()
                && chars[i] == 'i'
                && !chars.get(i + 1).is_some_and(|d| d.is_ascii_alphanumeric());
            col += i - start;
            if imag {
                i += 1;
                col += 1;
                out.push(Token {
                    tok: Tok::ImagInt(v),
                    line: tl,
                    col: tc,
                });
            } else {
                if i < chars.len() && chars[i].is_ascii_alphabetic() {
                    return Err(ParseError::new(
                        ErrorCode::Syntax,
                        "missing `*` between number and identifier",
                        line,
                        col,
                    ));
                }
                out.push(Token {
                    tok: Tok::Int(v),
                    line: tl,
                    col: tc,
                });
            }
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: tl,
                col: tc,
            });
            continue;
        }
        return Err(ParseError::new(
            ErrorCode::Syntax,
            format!("unexpected character `{c}`"),
            tl,
            tc,
        ));
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    ctx: &'a Arc<VarContext>,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, code: ErrorCode, msg: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError::new(code, msg, t.line, t.col)
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.err(ErrorCode::TooLarge, "expression nested too deeply"));
        }
        Ok(())
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek().tok == t {
            self.bump();
            Ok(())
        } else {
            Err(self.err(ErrorCode::Syntax, format!("expected {what}")))
        }
    }

    fn mul(&self, a: &Poly, b: &Poly, at: &Token) -> Result<Poly, ParseError> {
        if a.num_terms().saturating_mul(b.num_terms()) > MAX_PRODUCT_WORK
            || a.total_degree() + b.total_degree() > MAX_DEGREE
        {
            return Err(ParseError::new(
                ErrorCode::TooLarge,
                "expansion too large",
                at.line,
                at.col,
            ));
        }
        Ok(a * b)
    }

    fn expr(&mut self) -> Result<Poly, ParseError> {
        self.enter()?;
        let mut acc = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly, ParseError> {
        let mut acc = self.factor()?;
        while self.peek().tok == Tok::Star {
            let at = self.bump();
            let f = self.factor()?;
            acc = self.mul(&acc, &f, &at)?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, ParseError> {
        if self.peek().tok == Tok::Minus {
            self.enter()?;
            self.bump();
            let f = self.factor()?;
            self.depth -= 1;
            return Ok(-f);
        }
        let b = self.base()?;
        if self.peek().tok != Tok::Caret {
            return Ok(b);
        }
        let at = self.bump();
        let e = match self.bump().tok {
            Tok::Int(v) => v,
            _ => {
                return Err(ParseError::new(
                    ErrorCode::Exponent,
                    "exponent must be a natural number",
                    at.line,
                    at.col + 1,
                ))
            }
        };
        let e: u32 = match u32::try_from(&e) {
            Ok(e) if e <= MAX_EXPONENT => e,
            _ => {
                return Err(ParseError::new(
                    ErrorCode::Exponent,
                    format!("exponent exceeds {MAX_EXPONENT}"),
                    at.line,
                    at.col + 1,
                ))
            }
        };
        self.pow(&b, e, &at)
    }

    fn pow(&self, b: &Poly, e: u32, at: &Token) -> Result<Poly, ParseError> {
        let mut acc = Poly::one(self.ctx);
        let mut base = b.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base, at)?;
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base, at)?;
            }
        }
        Ok(acc)
    }

    fn rational_tail(&mut self, num: BigInt) -> Result<(BigRational, bool), ParseError> {
        if self.peek().tok != Tok::Slash {
            return Ok((BigRational::from_integer(num), false));
        }
        self.bump();
        let t = self.bump();
        let (den, imag) = match t.tok {
            Tok::Int(d) => (d, false),
            Tok::ImagInt(d) => (d, true),
            _ => {
                return Err(ParseError::new(
                    ErrorCode::Syntax,
                    "expected denominator",
                    t.line,
                    t.col,
                ))
            }
        };
        if den.is_zero() {
            return Err(ParseError::new(
                ErrorCode::Syntax,
                "zero denominator",
                t.line,
                t.col,
            ));
        }
        Ok((BigRational::new(num, den), imag))
    }

    fn base(&mut self) -> Result<Poly, ParseError> {
        let t = self.bump();
        match t.tok {
            Tok::Int(v) => {
                let (r, imag) = self.rational_tail(v)?;
                let c = if imag {
                    GaussRat::new(BigRational::zero(), r)
                } else {
                    GaussRat::real(r)
                };
                Ok(Poly::constant(self.ctx, c))
            }
            Tok::ImagInt(v) => {
                if self.peek().tok == Tok::Slash {
                    return Err(
                        self.err(ErrorCode::Syntax, "write an imaginary rational as `p/qi`")
                    );
                }
                Ok(Poly::constant(
                    self.ctx,
                    GaussRat::new(BigRational::zero(), BigRational::from_integer(v)),
                ))
            }
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "i" => Ok(Poly::constant(self.ctx, GaussRat::i())),
                "conj" | "Re" | "Im" => {
                    self.expect(Tok::LParen, &format!("`(` after `{name}`"))?;
                    let e = self.expr()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(match name.as_str() {
                        "conj" => e.conj_involution(),
                        "Re" => e.real_part(),
                        _ => e.imag_part(),
                    })
                }
                _ => match self.ctx.index_of(&name) {
                    Some(v) => Ok(Poly::var(self.ctx, v, false)),
                    None => Err(ParseError::new(
                        ErrorCode::UnknownIdent,
                        format!("unknown identifier `{name}`"),
                        t.line,
                        t.col,
                    )),
                },
            },
            Tok::Eof => Err(ParseError::new(
                ErrorCode::Syntax,
                "unexpected end of expression",
                t.line,
                t.col,
            )),
            other => Err(ParseError::new(
                ErrorCode::Syntax,
                format!("unexpected {}", describe(&other)),
                t.line,
                t.col,
            )),
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Plus => "`+`",
        Tok::Minus => "`-`",
        Tok::Star => "`*`",
        Tok::Slash => "`/`",
        Tok::Caret => "`^`",
        Tok::LParen => "`(`",
        Tok::RParen => "`)`",
        Tok::Eof => "end of input",
        Tok::Int(_) | Tok::ImagInt(_) => "number",
        Tok::Ident(_) => "identifier",
    }
}

/// Names that cannot be declared as variables.
pub const RESERVED: [&str; 4] = ["i", "conj", "Re", "Im"];

/// Parses `text` into a polynomial over `ctx`.
pub fn parse_expression(text: &str, ctx: &Arc<VarContext>) -> Result<Poly, ParseError> {
    parse_expression_at(text, ctx, 1, 1)
}

/// As [`parse_expression`], reporting positions relative to `(line, col)`.
pub fn parse_expression_at(
    text: &str,
    ctx: &Arc<VarContext>,
    line: usize,
    col: usize,
) -> Result<Poly, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError::new(
            ErrorCode::Syntax,
            "empty expression",
            line,
            col,
        ));
    }
    let toks = lex(text, line, col)?;
    let mut p = Parser {
        toks,
        pos: 0,
        ctx,
        depth: 0,
    };
    let e = p.expr()?;
    if p.peek().tok != Tok::Eof {
        let what = describe(&p.peek().tok);
        return Err(p.err(ErrorCode::Syntax, format!("unexpected {what}")));
    }
    Ok(e)
}

/// Parses a constant such as `1/2 - 3i`.
pub fn parse_constant(text: &str, line: usize, col: usize) -> Result<GaussRat, ParseError> {
    let p = parse_expression_at(text, &VarContext::empty(), line, col)?;
    Ok(p.as_constant().expect("empty context yields constants"))
}
