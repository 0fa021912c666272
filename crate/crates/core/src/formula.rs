//! The epistemic language: parsing, printing, and analysis of formulas with
//! knowledge (`K_i`), awareness (`A_i`), unawareness (`U_i`), common
//! knowledge (`CK_i`), and propositional quantifiers.
//!
//! Surface syntax (ASCII): `~`, `&`, `|`, `->`, `<->`, `true`, `false`,
//! `K_i`, `A_i`, `U_i`, `CK_i`, `forall p. ...`, `exists p. ...`. Unary
//! operators bind tightest, then `&`, then `|`, then `->` (right
//! associative), then `<->`. A quantifier heading a formula position scopes
//! maximally to the right; a quantifier appearing as the argument of a unary
//! operator takes a unary-delimited body, so `K_1 exists p. U_1 p & q` is
//! the conjunction of `K_1 exists p. U_1 p` and `q`.
//!
//! `U_i f` is an abbreviation: it parses to `~A_i f`, and the printer
//! re-sugars `~A_i` back to `U_i`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// An agent index: any identifier, written after the underscore of a modal
/// operator (`K_1`, `A_bob`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Agent(String);

impl Agent {
    pub fn new(name: impl Into<String>) -> Agent {
        let name = name.into();
        assert!(is_ident(&name), "agent index must be an identifier");
        Agent(name)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Agent {
    fn from(s: &str) -> Agent {
        Agent::new(s)
    }
}

fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

const KEYWORDS: [&str; 4] = ["true", "false", "forall", "exists"];

fn is_letter_name(s: &str) -> bool {
    is_ident(s)
        && !KEYWORDS.contains(&s)
        && !["K_", "A_", "U_", "CK_"].iter().any(|p| s.starts_with(p))
}

/// A formula of the epistemic language, in normalized form: `U_i` never
/// appears as a node (it is stored as `~A_i`), while the remaining
/// connectives are kept as distinct nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Prop(String),
    Top,
    Bottom,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Knows(Agent, Box<Formula>),
    Aware(Agent, Box<Formula>),
    Common(Agent, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn prop(name: impl Into<String>) -> Formula {
        let name = name.into();
        assert!(
            is_letter_name(&name),
            "`{name}` is not a usable proposition letter"
        );
        Formula::Prop(name)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn imp(l: Formula, r: Formula) -> Formula {
        Formula::Imp(Box::new(l), Box::new(r))
    }

    pub fn iff(l: Formula, r: Formula) -> Formula {
        Formula::Iff(Box::new(l), Box::new(r))
    }

    pub fn knows(agent: impl Into<Agent>, f: Formula) -> Formula {
        Formula::Knows(agent.into(), Box::new(f))
    }

    pub fn aware(agent: impl Into<Agent>, f: Formula) -> Formula {
        Formula::Aware(agent.into(), Box::new(f))
    }

    /// `U_i f`, stored as `~A_i f`.
    pub fn unaware(agent: impl Into<Agent>, f: Formula) -> Formula {
        Formula::not(Formula::aware(agent, f))
    }

    pub fn common(agent: impl Into<Agent>, f: Formula) -> Formula {
        Formula::Common(agent.into(), Box::new(f))
    }

    pub fn forall(letter: impl Into<String>, f: Formula) -> Formula {
        Formula::Forall(letter.into(), Box::new(f))
    }

    pub fn exists(letter: impl Into<String>, f: Formula) -> Formula {
        Formula::Exists(letter.into(), Box::new(f))
    }

    pub fn parse(text: &str) -> Result<Formula, ParseError> {
        parse(text)
    }

    pub fn render(&self) -> String {
        render(self)
    }

    pub fn letters(&self) -> Letters {
        letters(self)
    }
}

impl From<Agent> for String {
    fn from(a: Agent) -> String {
        a.0
    }
}

/// Free-letter, bound-letter, and agent inventories of a formula.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Letters {
    pub free: BTreeSet<String>,
    pub bound: BTreeSet<String>,
    pub agents: BTreeSet<Agent>,
}

pub fn letters(f: &Formula) -> Letters {
    let mut out = Letters::default();
    let mut scope: Vec<String> = Vec::new();
    walk_letters(f, &mut scope, &mut out);
    out
}

fn walk_letters(f: &Formula, scope: &mut Vec<String>, out: &mut Letters) {
    match f {
        Formula::Prop(p) => {
            if !scope.iter().any(|b| b == p) {
                out.free.insert(p.clone());
            }
        }
        Formula::Top | Formula::Bottom => {}
        Formula::Not(g) => walk_letters(g, scope, out),
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) | Formula::Iff(l, r) => {
            walk_letters(l, scope, out);
            walk_letters(r, scope, out);
        }
        Formula::Knows(a, g) | Formula::Aware(a, g) | Formula::Common(a, g) => {
            out.agents.insert(a.clone());
            walk_letters(g, scope, out);
        }
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            out.bound.insert(v.clone());
            scope.push(v.clone());
            walk_letters(g, scope, out);
            scope.pop();
        }
    }
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Dot,
    Tilde,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    True,
    False,
    Forall,
    Exists,
    Modal(ModalOp, String),
    Ident(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ModalOp {
    Knows,
    Aware,
    Unaware,
    Common,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::Dot => write!(f, "."),
            Tok::Tilde => write!(f, "~"),
            Tok::Amp => write!(f, "&"),
            Tok::Pipe => write!(f, "|"),
            Tok::Arrow => write!(f, "->"),
            Tok::DArrow => write!(f, "<->"),
            Tok::True => write!(f, "true"),
            Tok::False => write!(f, "false"),
            Tok::Forall => write!(f, "forall"),
            Tok::Exists => write!(f, "exists"),
            Tok::Modal(op, a) => {
                let p = match op {
                    ModalOp::Knows => "K",
                    ModalOp::Aware => "A",
                    ModalOp::Unaware => "U",
                    ModalOp::Common => "CK",
                };
                write!(f, "{p}_{a}")
            }
            Tok::Ident(s) => write!(f, "{s}"),
        }
    }
}

/// A formula syntax error, with a byte position into the input.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{message} at position {position}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

fn err<T>(position: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        position,
        message: message.into(),
    })
}

fn lex(input: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = input.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            b')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            b'.' => {
                toks.push((Tok::Dot, i));
                i += 1;
            }
            b'~' => {
                toks.push((Tok::Tilde, i));
                i += 1;
            }
            b'&' => {
                toks.push((Tok::Amp, i));
                i += 1;
            }
            b'|' => {
                toks.push((Tok::Pipe, i));
                i += 1;
            }
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((Tok::Arrow, i));
                    i += 2;
                } else {
                    return err(i, "unknown token `-`");
                }
            }
            b'<' => {
                if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') {
                    toks.push((Tok::DArrow, i));
                    i += 3;
                } else {
                    return err(i, "unknown token `<`");
                }
            }
            _ if b.is_ascii_alphanumeric() || b == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                let word = &input[start..i];
                toks.push((classify_word(word, start)?, start));
            }
            _ => {
                let ch = input[i..].chars().next().unwrap();
                return err(i, format!("unknown token `{ch}`"));
            }
        }
    }
    Ok(toks)
}

fn classify_word(word: &str, pos: usize) -> Result<Tok, ParseError> {
    match word {
        "true" => return Ok(Tok::True),
        "false" => return Ok(Tok::False),
        "forall" => return Ok(Tok::Forall),
        "exists" => return Ok(Tok::Exists),
        _ => {}
    }
    for (prefix, op) in [
        ("CK_", ModalOp::Common),
        ("K_", ModalOp::Knows),
        ("A_", ModalOp::Aware),
        ("U_", ModalOp::Unaware),
    ] {
        if let Some(agent) = word.strip_prefix(prefix) {
            if agent.is_empty() {
                return err(pos, format!("missing agent index after `{prefix}`"));
            }
            return Ok(Tok::Modal(op, agent.to_string()));
        }
    }
    Ok(Tok::Ident(word.to_string()))
}

// ---------------------------------------------------------------------------
// Parser (recursive descent)

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let f = p.formula()?;
    if let Some((tok, at)) = p.peek_at() {
        return err(at, format!("unexpected token `{tok}`"));
    }
    Ok(f)
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek_at(&self) -> Option<(&Tok, usize)> {
        self.toks.get(self.pos).map(|(t, p)| (t, *p))
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        self.pos += 1;
        t
    }

    fn eat(&mut self, tok: &Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t == tok => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => err(self.here(), format!("expected `{tok}`, found `{t}`")),
            None => err(self.end, format!("expected `{tok}`, found end of input")),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut l = self.imp()?;
        while self.peek() == Some(&Tok::DArrow) {
            self.bump();
            let r = self.imp()?;
            l = Formula::iff(l, r);
        }
        Ok(l)
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let l = self.or()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.bump();
            let r = self.imp()?;
            return Ok(Formula::imp(l, r));
        }
        Ok(l)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut l = self.and()?;
        while self.peek() == Some(&Tok::Pipe) {
            self.bump();
            let r = self.and()?;
            l = Formula::or(l, r);
        }
        Ok(l)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut l = self.unary(false)?;
        while self.peek() == Some(&Tok::Amp) {
            self.bump();
            let r = self.unary(false)?;
            l = Formula::and(l, r);
        }
        Ok(l)
    }

    /// `arg_pos` is true when this position is the argument of a unary
    /// operator; a quantifier met there takes a unary-delimited body instead
    /// of maximal scope.
    fn unary(&mut self, arg_pos: bool) -> Result<Formula, ParseError> {
        let at = self.here();
        match self.peek() {
            Some(Tok::Tilde) => {
                self.bump();
                Ok(Formula::not(self.unary(true)?))
            }
            Some(Tok::Modal(..)) => {
                let (op, agent) = match self.bump() {
                    Tok::Modal(op, agent) => (op, agent),
                    _ => unreachable!(),
                };
                let agent = Agent::new(agent);
                let inner = self.unary(true)?;
                Ok(match op {
                    ModalOp::Knows => Formula::knows(agent, inner),
                    ModalOp::Aware => Formula::aware(agent, inner),
                    ModalOp::Unaware => Formula::unaware(agent, inner),
                    ModalOp::Common => Formula::common(agent, inner),
                })
            }
            Some(Tok::Forall) | Some(Tok::Exists) => {
                let is_forall = self.bump() == Tok::Forall;
                let at = self.here();
                let letter = match self.peek() {
                    Some(Tok::Ident(_)) => match self.bump() {
                        Tok::Ident(s) => s,
                        _ => unreachable!(),
                    },
                    Some(t) => return err(at, format!("expected a letter, found `{t}`")),
                    None => return err(self.end, "expected a letter, found end of input"),
                };
                self.eat(&Tok::Dot)?;
                let body = if arg_pos {
                    self.unary(true)?
                } else {
                    self.formula()?
                };
                Ok(if is_forall {
                    Formula::forall(letter, body)
                } else {
                    Formula::exists(letter, body)
                })
            }
            Some(Tok::True) => {
                self.bump();
                Ok(Formula::Top)
            }
            Some(Tok::False) => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Some(Tok::Ident(_)) => match self.bump() {
                Tok::Ident(s) => Ok(Formula::Prop(s)),
                _ => unreachable!(),
            },
            Some(Tok::LParen) => {
                self.bump();
                let f = self.formula()?;
                self.eat(&Tok::RParen)?;
                Ok(f)
            }
            Some(t) => err(at, format!("expected a formula, found `{t}`")),
            None => err(self.end, "expected a formula, found end of input"),
        }
    }
}

// ---------------------------------------------------------------------------
// Printer

const LVL_IFF: u8 = 1;
const LVL_IMP: u8 = 2;
const LVL_OR: u8 = 3;
const LVL_AND: u8 = 4;
const LVL_UNARY: u8 = 5;

#[derive(Clone, Copy)]
enum Ctx {
    /// Argument of a unary operator (`~`, `K_i`, ...).
    Arg,
    /// Operand at a binary level; `tail` is true when nothing follows the
    /// node inside the current parenthesized scope.
    Bin { level: u8, tail: bool },
}

/// True for formulas that reparse as a single `unary` production.
fn unary_class(f: &Formula) -> bool {
    match f {
        Formula::Prop(_) | Formula::Top | Formula::Bottom => true,
        Formula::Not(g)
        | Formula::Knows(_, g)
        | Formula::Aware(_, g)
        | Formula::Common(_, g)
        | Formula::Forall(_, g)
        | Formula::Exists(_, g) => unary_class(g),
        _ => false,
    }
}

/// Renders with minimal parenthesization; `parse(render(f))` returns `f`.
pub fn render(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(
        &mut out,
        f,
        Ctx::Bin {
            level: LVL_IFF,
            tail: true,
        },
    );
    out
}

fn write_formula(out: &mut String, f: &Formula, ctx: Ctx) {
    match f {
        Formula::Prop(p) => out.push_str(p),
        Formula::Top => out.push_str("true"),
        Formula::Bottom => out.push_str("false"),
        Formula::Not(g) => {
            if let Formula::Aware(agent, inner) = g.as_ref() {
                out.push_str("U_");
                out.push_str(agent.as_str());
                out.push(' ');
                write_formula(out, inner, Ctx::Arg);
            } else {
                out.push('~');
                write_formula(out, g, Ctx::Arg);
            }
        }
        Formula::Knows(agent, g) | Formula::Aware(agent, g) | Formula::Common(agent, g) => {
            out.push_str(match f {
                Formula::Knows(..) => "K_",
                Formula::Aware(..) => "A_",
                _ => "CK_",
            });
            out.push_str(agent.as_str());
            out.push(' ');
            write_formula(out, g, Ctx::Arg);
        }
        Formula::And(l, r) => write_binary(out, f, l, r, LVL_AND, ctx),
        Formula::Or(l, r) => write_binary(out, f, l, r, LVL_OR, ctx),
        Formula::Imp(l, r) => write_binary(out, f, l, r, LVL_IMP, ctx),
        Formula::Iff(l, r) => write_binary(out, f, l, r, LVL_IFF, ctx),
        Formula::Forall(v, body) | Formula::Exists(v, body) => {
            let bare = match ctx {
                Ctx::Arg => unary_class(body),
                Ctx::Bin { tail, .. } => tail,
            };
            if bare {
                write_quant(out, f, v, body, matches!(ctx, Ctx::Arg));
            } else {
                out.push('(');
                write_quant(out, f, v, body, false);
                out.push(')');
            }
        }
    }
}

fn write_quant(out: &mut String, f: &Formula, v: &str, body: &Formula, arg_pos: bool) {
    out.push_str(if matches!(f, Formula::Forall(..)) {
        "forall "
    } else {
        "exists "
    });
    out.push_str(v);
    out.push_str(". ");
    let ctx = if arg_pos {
        Ctx::Arg
    } else {
        Ctx::Bin {
            level: LVL_IFF,
            tail: true,
        }
    };
    write_formula(out, body, ctx);
}

fn write_binary(out: &mut String, node: &Formula, l: &Formula, r: &Formula, level: u8, ctx: Ctx) {
    let bare = match ctx {
        Ctx::Arg => false,
        Ctx::Bin {
            level: required, ..
        } => level >= required,
    };
    if !bare {
        out.push('(');
    }
    let tail = if bare {
        match ctx {
            Ctx::Bin { tail, .. } => tail,
            Ctx::Arg => true,
        }
    } else {
        true
    };
    let (op, left_level, right_level) = match node {
        Formula::And(..) => (" & ", LVL_AND, LVL_UNARY),
        Formula::Or(..) => (" | ", LVL_OR, LVL_AND),
        Formula::Imp(..) => (" -> ", LVL_OR, LVL_IMP),
        Formula::Iff(..) => (" <-> ", LVL_IFF, LVL_IMP),
        _ => unreachable!(),
    };
    write_formula(
        out,
        l,
        Ctx::Bin {
            level: left_level,
            tail: false,
        },
    );
    out.push_str(op);
    write_formula(
        out,
        r,
        Ctx::Bin {
            level: right_level,
            tail,
        },
    );
    if !bare {
        out.push(')');
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}
