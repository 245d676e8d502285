//! Analytic expressions over a declared variable set, evaluated as jets.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | atom ('^' factor)?
//! atom   := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-u^2`
//! is `-(u^2)` while `2^-u` is still accepted. Numbers are decimal with an
//! optional exponent. The names `pi` and `e` are replaced by literals.

use std::fmt;

use thiserror::Error;

use crate::jet::{Axis, Jet3, JetError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
    Atan,
    Abs,
}

impl Func {
    pub const ALL: [Func; 10] = [
        Func::Sin,
        Func::Cos,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Atan,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Atan => "atan",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.name() == name)
    }

    fn apply(self, x: &Jet3) -> Result<Jet3, JetError> {
        Ok(match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Tanh => x.tanh(),
            Func::Exp => x.exp(),
            Func::Log => x.ln()?,
            Func::Sqrt => x.sqrt()?,
            Func::Atan => x.atan(),
            Func::Abs => x.abs()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    Var(usize),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// A parsed expression together with the variable names it was parsed
/// against. Variable `k` is seeded on jet axis `k` during evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    root: Node,
    vars: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("empty expression")]
    Empty,
    #[error("unexpected character '{0}'")]
    UnexpectedChar(char),
    #[error("malformed number '{0}'")]
    BadNumber(String),
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: &'static str, found: String },
    #[error("unknown identifier '{0}'")]
    UnknownIdentifier(String),
    #[error("unknown function '{0}'")]
    UnknownFunction(String),
    #[error("function '{name}' takes 1 argument, found {found}")]
    BadArity { name: String, found: usize },
    #[error("invalid variable name '{0}'")]
    BadVariable(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("syntax error at offset {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error in '{subexpr}': {source}")]
    Domain {
        subexpr: String,
        #[source]
        source: JetError,
    },
    #[error("expression uses {0} variables; jets seed at most 2")]
    TooManyVariables(usize),
    #[error("expected {expected} variable values, got {got}")]
    VariableCount { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(x) => format!("number {x}"),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Op(c) => format!("'{c}'"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        if ch.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        match ch {
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push((Tok::Op(ch as char), start));
                i += 1;
            }
            b'(' => {
                out.push((Tok::LParen, start));
                i += 1;
            }
            b')' => {
                out.push((Tok::RParen, start));
                i += 1;
            }
            b',' => {
                out.push((Tok::Comma, start));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let mut digits = 0;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                    digits += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                        digits += 1;
                    }
                }
                if digits == 0 {
                    return Err(ParseError {
                        offset: start,
                        kind: ParseErrorKind::BadNumber(src[start..i].to_string()),
                    });
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    let exp_start = j;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    if j == exp_start {
                        return Err(ParseError {
                            offset: start,
                            kind: ParseErrorKind::BadNumber(src[start..j].to_string()),
                        });
                    }
                    i = j;
                }
                let text = &src[start..i];
                let value: f64 = text.parse().map_err(|_| ParseError {
                    offset: start,
                    kind: ParseErrorKind::BadNumber(text.to_string()),
                })?;
                if !value.is_finite() {
                    return Err(ParseError {
                        offset: start,
                        kind: ParseErrorKind::BadNumber(text.to_string()),
                    });
                }
                out.push((Tok::Num(value), start));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
            }
            _ => {
                let c = src[start..].chars().next().unwrap_or('?');
                return Err(ParseError { offset: start, kind: ParseErrorKind::UnexpectedChar(c) });
            }
        }
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: &'a [String],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &'static str) -> ParseError {
        ParseError {
            offset: self.offset(),
            kind: ParseErrorKind::Unexpected { expected, found: self.peek().describe() },
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Node, ParseError> {
        if let Tok::Op('-') = self.peek() {
            self.bump();
            return Ok(Node::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if let Tok::Op('^') = self.peek() {
            self.bump();
            let exponent = self.factor()?;
            return Ok(Node::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let (tok, at) = self.bump();
        match tok {
            Tok::Num(x) => Ok(Node::Num(x)),
            Tok::LParen => {
                let inner = self.expr()?;
                match self.peek() {
                    Tok::RParen => {
                        self.bump();
                        Ok(inner)
                    }
                    _ => Err(self.unexpected("')'")),
                }
            }
            Tok::Ident(name) => {
                if let Tok::LParen = self.peek() {
                    self.bump();
                    return self.call(name, at);
                }
                if let Some(k) = self.vars.iter().position(|v| *v == name) {
                    return Ok(Node::Var(k));
                }
                match name.as_str() {
                    "pi" => Ok(Node::Num(std::f64::consts::PI)),
                    "e" => Ok(Node::Num(std::f64::consts::E)),
                    _ if Func::from_name(&name).is_some() => Err(ParseError {
                        offset: at,
                        kind: ParseErrorKind::BadArity { name, found: 0 },
                    }),
                    _ => Err(ParseError { offset: at, kind: ParseErrorKind::UnknownIdentifier(name) }),
                }
            }
            Tok::End => {
                self.pos = self.toks.len() - 1;
                Err(ParseError {
                    offset: at,
                    kind: ParseErrorKind::Unexpected {
                        expected: "an operand",
                        found: Tok::End.describe(),
                    },
                })
            }
            other => Err(ParseError {
                offset: at,
                kind: ParseErrorKind::Unexpected { expected: "an operand", found: other.describe() },
            }),
        }
    }

    fn call(&mut self, name: String, at: usize) -> Result<Node, ParseError> {
        let mut args = Vec::new();
        if let Tok::RParen = self.peek() {
            self.bump();
        } else {
            loop {
                args.push(self.expr()?);
                match self.peek() {
                    Tok::Comma => {
                        self.bump();
                    }
                    Tok::RParen => {
                        self.bump();
                        break;
                    }
                    _ => return Err(self.unexpected("',' or ')'")),
                }
            }
        }
        let func = Func::from_name(&name)
            .ok_or_else(|| ParseError { offset: at, kind: ParseErrorKind::UnknownFunction(name.clone()) })?;
        if args.len() != 1 {
            return Err(ParseError {
                offset: at,
                kind: ParseErrorKind::BadArity { name, found: args.len() },
            });
        }
        Ok(Node::Call(func, Box::new(args.pop().unwrap())))
    }
}

fn valid_var_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && name != "pi"
        && name != "e"
        && Func::from_name(name).is_none()
}

/// Parse `source` against the declared variable names.
pub fn parse(source: &str, variables: &[&str]) -> Result<Expr, ParseError> {
    for v in variables {
        if !valid_var_name(v) {
            return Err(ParseError { offset: 0, kind: ParseErrorKind::BadVariable(v.to_string()) });
        }
    }
    if source.trim().is_empty() {
        return Err(ParseError { offset: 0, kind: ParseErrorKind::Empty });
    }
    let vars: Vec<String> = variables.iter().map(|s| s.to_string()).collect();
    let toks = lex(source)?;
    let mut p = Parser { toks, pos: 0, vars: &vars };
    let root = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(Expr { root, vars })
}

fn literal_int_exponent(node: &Node) -> Option<i32> {
    let x = match node {
        Node::Num(x) => *x,
        Node::Neg(inner) => match inner.as_ref() {
            Node::Num(x) => -*x,
            _ => return None,
        },
        _ => return None,
    };
    (x.fract() == 0.0 && (-9.0..=9.0).contains(&x)).then_some(x as i32)
}

impl Expr {
    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn variables(&self) -> &[String] {
        &self.vars
    }

    /// Constant-valued expression (no variable references).
    pub fn constant(value: f64) -> Expr {
        Expr { root: Node::Num(value), vars: Vec::new() }
    }

    /// Evaluate with jet values bound to the declared variables.
    pub fn eval_with(&self, values: &[Jet3]) -> Result<Jet3, EvalError> {
        if values.len() != self.vars.len() {
            return Err(EvalError::VariableCount { expected: self.vars.len(), got: values.len() });
        }
        self.eval_node(&self.root, values)
    }

    /// Jet of the function germ at `point`, variable `k` seeded on axis `k`.
    pub fn eval_jet(&self, point: [f64; 2]) -> Result<Jet3, EvalError> {
        if self.vars.len() > 2 {
            return Err(EvalError::TooManyVariables(self.vars.len()));
        }
        let seeds: Vec<Jet3> = (0..self.vars.len())
            .map(|k| Jet3::var(Axis::from_index(k), point[k]))
            .collect();
        self.eval_with(&seeds)
    }

    pub fn eval_f64(&self, point: [f64; 2]) -> Result<f64, EvalError> {
        Ok(self.eval_jet(point)?.value())
    }

    fn domain(&self, node: &Node, source: JetError) -> EvalError {
        EvalError::Domain { subexpr: self.print_node(node), source }
    }

    fn eval_node(&self, node: &Node, vals: &[Jet3]) -> Result<Jet3, EvalError> {
        let out = match node {
            Node::Num(x) => Jet3::cst(*x),
            Node::Var(k) => vals[*k],
            Node::Neg(a) => -self.eval_node(a, vals)?,
            Node::Call(f, a) => {
                let x = self.eval_node(a, vals)?;
                f.apply(&x).map_err(|e| self.domain(node, e))?
            }
            Node::Bin(op, a, b) => {
                let x = self.eval_node(a, vals)?;
                match op {
                    BinOp::Pow => match literal_int_exponent(b) {
                        Some(n) => x.powi(n).map_err(|e| self.domain(node, e))?,
                        None => {
                            let y = self.eval_node(b, vals)?;
                            x.powj(&y).map_err(|e| self.domain(node, e))?
                        }
                    },
                    _ => {
                        let y = self.eval_node(b, vals)?;
                        match op {
                            BinOp::Add => x + y,
                            BinOp::Sub => x - y,
                            BinOp::Mul => x * y,
                            BinOp::Div => x.checked_div(&y).map_err(|e| self.domain(node, e))?,
                            BinOp::Pow => unreachable!(),
                        }
                    }
                }
            }
        };
        if !out.is_finite() {
            return Err(self.domain(node, JetError::NonFinite(out.value())));
        }
        Ok(out)
    }

    fn print_node(&self, node: &Node) -> String {
        let mut s = String::new();
        self.write_node(node, &mut s);
        s
    }

    fn write_node(&self, node: &Node, out: &mut String) {
        match node {
            Node::Num(x) => out.push_str(&format!("{x:?}")),
            Node::Var(k) => out.push_str(&self.vars[*k]),
            Node::Neg(a) => {
                out.push_str("(-");
                self.write_node(a, out);
                out.push(')');
            }
            Node::Call(f, a) => {
                out.push_str(f.name());
                out.push('(');
                self.write_node(a, out);
                out.push(')');
            }
            Node::Bin(op, a, b) => {
                out.push('(');
                self.write_node(a, out);
                out.push(' ');
                out.push(op.symbol());
                out.push(' ');
                self.write_node(b, out);
                out.push(')');
            }
        }
    }
}

/// Fully parenthesized form; parsing it again yields the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.print_node(&self.root))
    }
}
