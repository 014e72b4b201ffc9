//! A small language for describing the optical bench.
//!
//! ```text
//! bench  := source stmt*
//! source := "source" (V|H) (V|H) ";"
//! stmt   := ident "(" [arg ("," arg)*] ")" ";"
//! arg    := number ["deg"|"rad"] | ident
//! ```
//!
//! `#` starts a comment running to the end of the line. Angles default to
//! radians. `hwp`, `dove` and `phase` take an optional arm label `a` or `b`;
//! a run of arm-labelled elements is one Mach-Zehnder interferometer (a pair
//! of beam splitters). `detectors()` must be the last statement.

mod compile;
mod lexer;

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use crate::mode::{Polarization, Transverse};
use lexer::{tokenize, Token, TokenKind};

pub use compile::{compile, run_bench, Bindings, Pipeline, Stage};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{line}:{column}: {message} (at `{token}`)")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub token: String,
}

/// Angle or phase argument: a literal in radians or a name bound at compile
/// time.
#[derive(Debug, Clone, PartialEq)]
pub enum Param {
    Value(f64),
    Symbol(String),
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Value(v) => write!(f, "{v:?} rad"),
            Param::Symbol(s) => f.write_str(s),
        }
    }
}

/// Arm of an interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    A,
    B,
}

/// Output port of the MZIM.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Port {
    Odd,
    Even,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    Hwp { angle: Param, arm: Option<Arm> },
    Dove { angle: Param, arm: Option<Arm> },
    Phase { angle: Param, arm: Option<Arm> },
    Mzim { chi: Param },
    Pbs { port: Port },
}

impl Element {
    pub fn arm(&self) -> Option<Arm> {
        match self {
            Element::Hwp { arm, .. } | Element::Dove { arm, .. } | Element::Phase { arm, .. } => {
                *arm
            }
            _ => None,
        }
    }

    pub fn params(&self) -> impl Iterator<Item = &Param> {
        match self {
            Element::Hwp { angle, .. }
            | Element::Dove { angle, .. }
            | Element::Phase { angle, .. } => Some(angle),
            Element::Mzim { chi } => Some(chi),
            Element::Pbs { .. } => None,
        }
        .into_iter()
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let with_arm =
            |f: &mut fmt::Formatter<'_>, name: &str, angle: &Param, arm: &Option<Arm>| match arm {
                Some(Arm::A) => write!(f, "{name}({angle}, a);"),
                Some(Arm::B) => write!(f, "{name}({angle}, b);"),
                None => write!(f, "{name}({angle});"),
            };
        match self {
            Element::Hwp { angle, arm } => with_arm(f, "hwp", angle, arm),
            Element::Dove { angle, arm } => with_arm(f, "dove", angle, arm),
            Element::Phase { angle, arm } => with_arm(f, "phase", angle, arm),
            Element::Mzim { chi } => write!(f, "mzim({chi});"),
            Element::Pbs { port: Port::Odd } => write!(f, "pbs(odd);"),
            Element::Pbs { port: Port::Even } => write!(f, "pbs(even);"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchAst {
    pub transverse: Transverse,
    pub polarization: Polarization,
    pub elements: Vec<Element>,
    /// Whether the program ends in a detector bank.
    pub detectors: bool,
}

impl BenchAst {
    /// Symbolic parameter names, in order of first use.
    pub fn symbols(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for p in self.elements.iter().flat_map(|e| e.params()) {
            if let Param::Symbol(s) = p {
                if !out.contains(&s.as_str()) {
                    out.push(s);
                }
            }
        }
        out
    }
}

impl fmt::Display for BenchAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = match self.transverse {
            Transverse::V => "V",
            Transverse::H => "H",
        };
        let p = match self.polarization {
            Polarization::V => "V",
            Polarization::H => "H",
        };
        writeln!(f, "source {t} {p};")?;
        for e in &self.elements {
            writeln!(f, "{e}")?;
        }
        if self.detectors {
            writeln!(f, "detectors();")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum Arg {
    Angle(Param),
    Word(String),
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.at]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.at].clone();
        if !matches!(t.kind, TokenKind::Eof) {
            self.at += 1;
        }
        t
    }

    fn error(tok: &Token, message: impl Into<String>) -> ParseError {
        ParseError {
            line: tok.pos.line,
            column: tok.pos.column,
            message: message.into(),
            token: tok.describe(),
        }
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<Token, ParseError> {
        if self.peek().kind == kind {
            Ok(self.bump())
        } else {
            Err(Self::error(self.peek(), format!("expected {what}")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Token), ParseError> {
        match &self.peek().kind {
            TokenKind::Ident(name) => {
                let name = name.clone();
                Ok((name, self.bump()))
            }
            _ => Err(Self::error(self.peek(), format!("expected {what}"))),
        }
    }

    fn source(&mut self) -> Result<(Transverse, Polarization), ParseError> {
        match &self.peek().kind {
            TokenKind::Ident(k) if k == "source" => {
                self.bump();
            }
            _ => return Err(Self::error(self.peek(), "missing `source` declaration")),
        }
        let (t, tok) = self.ident("transverse label V or H")?;
        let transverse = match t.as_str() {
            "V" => Transverse::V,
            "H" => Transverse::H,
            _ => return Err(Self::error(&tok, "transverse label must be V or H")),
        };
        let (p, tok) = self.ident("polarization label V or H")?;
        let polarization = match p.as_str() {
            "V" => Polarization::V,
            "H" => Polarization::H,
            _ => return Err(Self::error(&tok, "polarization label must be V or H")),
        };
        self.expect(TokenKind::Semi, "`;`")?;
        Ok((transverse, polarization))
    }

    fn arg(&mut self) -> Result<(Arg, Token), ParseError> {
        let tok = self.peek().clone();
        match &tok.kind {
            TokenKind::Number(v) => {
                self.bump();
                let v = *v;
                let value = match &self.peek().kind {
                    TokenKind::Ident(u) if u == "deg" => {
                        self.bump();
                        v * PI / 180.0
                    }
                    TokenKind::Ident(u) if u == "rad" => {
                        self.bump();
                        v
                    }
                    _ => v,
                };
                Ok((Arg::Angle(Param::Value(value)), tok))
            }
            TokenKind::Ident(name) => {
                self.bump();
                Ok((Arg::Word(name.clone()), tok))
            }
            _ => Err(Self::error(&tok, "expected an argument")),
        }
    }

    fn args(&mut self) -> Result<Vec<(Arg, Token)>, ParseError> {
        self.expect(TokenKind::LParen, "`(`")?;
        let mut args = Vec::new();
        if self.peek().kind == TokenKind::RParen {
            self.bump();
            return Ok(args);
        }
        loop {
            args.push(self.arg()?);
            match self.peek().kind {
                TokenKind::Comma => {
                    self.bump();
                }
                TokenKind::RParen => {
                    self.bump();
                    return Ok(args);
                }
                _ => return Err(Self::error(self.peek(), "expected `,` or `)`")),
            }
        }
    }

    fn statement(&mut self) -> Result<Option<Element>, ParseError> {
        let (name, name_tok) = self.ident("an element name")?;
        if name == "source" {
            return Err(Self::error(&name_tok, "duplicate `source` declaration"));
        }
        let (min, max) = match name.as_str() {
            "hwp" | "dove" | "phase" => (1, 2),
            "mzim" | "pbs" => (1, 1),
            "detectors" => (0, 0),
            _ => return Err(Self::error(&name_tok, format!("unknown element `{name}`"))),
        };
        let args = self.args()?;
        if args.len() < min || args.len() > max {
            let expected = if min == max {
                format!("{min}")
            } else {
                format!("{min} or {max}")
            };
            return Err(Self::error(
                &name_tok,
                format!(
                    "`{name}` takes {expected} argument{}, got {}",
                    if max == 1 { "" } else { "s" },
                    args.len()
                ),
            ));
        }
        self.expect(TokenKind::Semi, "`;`")?;

        let angle = |a: &(Arg, Token)| -> Param {
            match &a.0 {
                Arg::Angle(p) => p.clone(),
                Arg::Word(w) => Param::Symbol(w.clone()),
            }
        };
        let arm = |a: Option<&(Arg, Token)>| -> Result<Option<Arm>, ParseError> {
            match a {
                None => Ok(None),
                Some((Arg::Word(w), _)) if w == "a" => Ok(Some(Arm::A)),
                Some((Arg::Word(w), _)) if w == "b" => Ok(Some(Arm::B)),
                Some((_, tok)) => Err(Self::error(tok, "arm must be `a` or `b`")),
            }
        };
        let element = match name.as_str() {
            "hwp" => Element::Hwp {
                angle: angle(&args[0]),
                arm: arm(args.get(1))?,
            },
            "dove" => Element::Dove {
                angle: angle(&args[0]),
                arm: arm(args.get(1))?,
            },
            "phase" => Element::Phase {
                angle: angle(&args[0]),
                arm: arm(args.get(1))?,
            },
            "mzim" => Element::Mzim {
                chi: angle(&args[0]),
            },
            "pbs" => {
                let port = match &args[0] {
                    (Arg::Word(w), _) if w == "odd" => Port::Odd,
                    (Arg::Word(w), _) if w == "even" => Port::Even,
                    (_, tok) => return Err(Self::error(tok, "pbs port must be `odd` or `even`")),
                };
                Element::Pbs { port }
            }
            "detectors" => return Ok(None),
            _ => unreachable!("kinds checked above"),
        };
        Ok(Some(element))
    }
}

pub fn parse(text: &str) -> Result<BenchAst, ParseError> {
    let mut p = Parser {
        tokens: tokenize(text)?,
        at: 0,
    };
    let (transverse, polarization) = p.source()?;
    let mut elements = Vec::new();
    let mut detectors = false;
    while p.peek().kind != TokenKind::Eof {
        if detectors {
            return Err(Parser::error(
                p.peek(),
                "`detectors` must be the last statement",
            ));
        }
        match p.statement()? {
            Some(e) => elements.push(e),
            None => detectors = true,
        }
    }
    Ok(BenchAst {
        transverse,
        polarization,
        elements,
        detectors,
    })
}
