//! Recursive-descent parser for kernel and profile expressions.
//!
//! Precedence from loosest to tightest: `+ -`, `* /`, unary `-`, `^`.
//! Binary operators associate left except `^`, which associates right, so
//! `-r^2` is `-(r^2)` and `2^3^2` is `2^(3^2)`. Calls: `exp(a)`, `log(a)`,
//! `min(a, b)`, `max(a, b)`. Constant: `pi`.

use std::fmt;

use super::expr::{BinaryOp, KernelExpr, UnaryOp, Var};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Empty,
    InvalidNumber(String),
    UnexpectedChar(char),
    UnexpectedToken { found: String, expected: Vec<&'static str> },
    UnknownIdentifier(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the source text.
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::Empty => write!(f, "empty expression"),
            ParseErrorKind::InvalidNumber(t) => write!(f, "invalid number `{t}` at byte {}", self.offset),
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character `{c}` at byte {}", self.offset),
            ParseErrorKind::UnexpectedToken { found, expected } => {
                write!(f, "unexpected {found} at byte {}, expected one of: {}", self.offset, expected.join(", "))
            }
            ParseErrorKind::UnknownIdentifier(name) => write!(f, "unknown identifier `{name}` at byte {}", self.offset),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(name) => format!("identifier `{name}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((Tok::Plus, start)),
            b'-' => out.push((Tok::Minus, start)),
            b'*' => out.push((Tok::Star, start)),
            b'/' => out.push((Tok::Slash, start)),
            b'^' => out.push((Tok::Caret, start)),
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            b',' => out.push((Tok::Comma, start)),
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
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
                let text = &src[start..i];
                let value: f64 =
                    text.parse().map_err(|_| ParseError { offset: start, kind: ParseErrorKind::InvalidNumber(text.to_string()) })?;
                out.push((Tok::Num(value), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(ParseError { offset: start, kind: ParseErrorKind::UnexpectedChar(ch) });
            }
        }
        i += 1;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: &'a [(&'static str, Var)],
}

const ATOM_START: &[&str] = &["number", "identifier", "`(`", "`-`"];

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&'static str]) -> ParseError {
        ParseError {
            offset: self.offset(),
            kind: ParseErrorKind::UnexpectedToken { found: self.peek().describe(), expected: expected.to_vec() },
        }
    }

    fn expect(&mut self, tok: Tok, name: &'static str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&[name]))
        }
    }

    fn expr(&mut self) -> Result<KernelExpr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinaryOp::Add,
                Tok::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = KernelExpr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<KernelExpr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinaryOp::Mul,
                Tok::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = KernelExpr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<KernelExpr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            let arg = self.unary()?;
            return Ok(KernelExpr::unary(UnaryOp::Neg, arg));
        }
        self.power()
    }

    fn power(&mut self) -> Result<KernelExpr, ParseError> {
        let base = self.atom()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            // right operand may carry its own sign and chains to the right
            let exponent = self.unary()?;
            return Ok(KernelExpr::binary(BinaryOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<KernelExpr, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(KernelExpr::Num(v))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                self.identifier(&name, offset)
            }
            _ => Err(self.unexpected(ATOM_START)),
        }
    }

    fn identifier(&mut self, name: &str, offset: usize) -> Result<KernelExpr, ParseError> {
        if let Some((_, var)) = self.vars.iter().find(|(n, _)| *n == name) {
            return Ok(KernelExpr::Var(*var));
        }
        match name {
            "pi" => Ok(KernelExpr::Pi),
            "exp" | "log" => {
                self.expect(Tok::LParen, "`(`")?;
                let arg = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                let op = if name == "exp" { UnaryOp::Exp } else { UnaryOp::Log };
                Ok(KernelExpr::unary(op, arg))
            }
            "min" | "max" => {
                self.expect(Tok::LParen, "`(`")?;
                let a = self.expr()?;
                self.expect(Tok::Comma, "`,`")?;
                let b = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                let op = if name == "min" { BinaryOp::Min } else { BinaryOp::Max };
                Ok(KernelExpr::binary(op, a, b))
            }
            _ => Err(ParseError { offset, kind: ParseErrorKind::UnknownIdentifier(name.to_string()) }),
        }
    }
}

const KERNEL_VARS: &[(&str, Var)] = &[("r", Var::R), ("s", Var::S)];
const PROFILE_VARS: &[(&str, Var)] = &[("r", Var::R)];

fn parse_with(text: &str, vars: &[(&'static str, Var)]) -> Result<KernelExpr, ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError { offset: 0, kind: ParseErrorKind::Empty });
    }
    let mut parser = Parser { toks: tokenize(text)?, pos: 0, vars };
    let expr = parser.expr()?;
    if *parser.peek() != Tok::End {
        return Err(parser.unexpected(&["operator", "end of input"]));
    }
    Ok(expr)
}

/// Parses a bivariate kernel expression in `r` and `s`.
pub fn parse_kernel(text: &str) -> Result<KernelExpr, ParseError> {
    parse_with(text, KERNEL_VARS)
}

/// Parses a one-variable profile `φ(r)`; `s` is rejected.
pub fn parse_profile(text: &str) -> Result<KernelExpr, ParseError> {
    parse_with(text, PROFILE_VARS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn eval(text: &str, r: f64, s: f64) -> f64 {
        parse_kernel(text).unwrap().eval(r, s).unwrap()
    }

    #[test]
    fn hilbert_kernel_structure_and_value() {
        let e = parse_kernel("1/(r+s)").unwrap();
        let expected = KernelExpr::binary(
            BinaryOp::Div,
            KernelExpr::Num(1.0),
            KernelExpr::binary(BinaryOp::Add, KernelExpr::Var(Var::R), KernelExpr::Var(Var::S)),
        );
        assert_eq!(e, expected);
        assert_eq!(e.eval(1.0, 1.0).unwrap(), 0.5);
    }

    #[test]
    fn spec_examples() {
        assert_eq!(eval("1/(r^2+s^2)", 1.0, 1.0), 0.5);
        assert!((eval("1/max(r,s)", 2.0, 3.0) - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("-r^2", 3.0, 0.0), -9.0);
        assert_eq!(eval("2^3^2", 0.0, 0.0), 512.0);
        assert_eq!(eval("8/4/2", 0.0, 0.0), 1.0);
        assert_eq!(eval("1-2-3", 0.0, 0.0), -4.0);
        assert_eq!(eval("2*3+4*5", 0.0, 0.0), 26.0);
        assert_eq!(eval("2^-1", 0.0, 0.0), 0.5);
        assert_eq!(eval("-2*-3", 0.0, 0.0), 6.0);
        assert!((eval("exp(log(r))*pi", 2.0, 0.0) - 2.0 * std::f64::consts::PI).abs() < 1e-14);
        assert_eq!(eval("1.5e2 + 2E-1", 0.0, 0.0), 150.2);
    }

    #[test]
    fn syntax_errors_carry_offsets_and_expectations() {
        let err = parse_kernel("1/(r+)").unwrap_err();
        assert_eq!(err.offset, 5);
        match err.kind {
            ParseErrorKind::UnexpectedToken { expected, .. } => assert!(expected.contains(&"number")),
            other => panic!("unexpected {other:?}"),
        }
        let err = parse_kernel("r s").unwrap_err();
        assert_eq!(err.offset, 2);
        let err = parse_kernel("min(r)").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::UnexpectedToken { ref expected, .. } if expected == &vec!["`,`"]));
    }

    #[test]
    fn unknown_identifiers_are_rejected() {
        let err = parse_kernel("1/(r+t)").unwrap_err();
        assert_eq!(err, ParseError { offset: 5, kind: ParseErrorKind::UnknownIdentifier("t".into()) });
        assert!(matches!(parse_profile("r+s").unwrap_err().kind, ParseErrorKind::UnknownIdentifier(_)));
        assert!(matches!(parse_kernel("sin(r)").unwrap_err().kind, ParseErrorKind::UnknownIdentifier(_)));
    }

    #[test]
    fn empty_and_garbage_input() {
        assert_eq!(parse_kernel("  ").unwrap_err().kind, ParseErrorKind::Empty);
        assert!(matches!(parse_kernel("r $ s").unwrap_err().kind, ParseErrorKind::UnexpectedChar('$')));
        assert!(matches!(parse_kernel("1..2").unwrap_err().kind, ParseErrorKind::InvalidNumber(_)));
    }

    fn arb_expr() -> impl Strategy<Value = KernelExpr> {
        let leaf = prop_oneof![
            (0u32..1000, 0u32..4).prop_map(|(m, e)| KernelExpr::Num(m as f64 / 10f64.powi(e as i32))),
            (1e-6f64..1e6).prop_map(KernelExpr::Num),
            Just(KernelExpr::Pi),
            Just(KernelExpr::Var(Var::R)),
            Just(KernelExpr::Var(Var::S)),
        ];
        leaf.prop_recursive(6, 64, 2, |inner| {
            prop_oneof![
                (prop_oneof![Just(UnaryOp::Neg), Just(UnaryOp::Exp), Just(UnaryOp::Log)], inner.clone())
                    .prop_map(|(op, a)| KernelExpr::unary(op, a)),
                (
                    prop_oneof![
                        Just(BinaryOp::Add),
                        Just(BinaryOp::Sub),
                        Just(BinaryOp::Mul),
                        Just(BinaryOp::Div),
                        Just(BinaryOp::Pow),
                        Just(BinaryOp::Min),
                        Just(BinaryOp::Max)
                    ],
                    inner.clone(),
                    inner
                )
                    .prop_map(|(op, a, b)| KernelExpr::binary(op, a, b)),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn print_then_parse_round_trips(e in arb_expr()) {
            let printed = e.to_string();
            let reparsed = parse_kernel(&printed).unwrap();
            prop_assert_eq!(&reparsed, &e);
            // and once more from the re-parsed tree
            prop_assert_eq!(parse_kernel(&reparsed.to_string()).unwrap(), e);
        }
    }
}
