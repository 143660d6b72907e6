//! A small expression language over K-classes and graded classes.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := number | ident | call | '(' expr ')' | '-' factor
//! call   := name '(' expr (',' expr)* ')'
//! number := digits ('/' digits)?
//! ```
//!
//! Functions: `c`, `s`, `rank`, `dual` (one argument) and `grade`, `sym`,
//! `twist` (two arguments).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactring::{fmt_rational, GradedClass, Rational, Ring};
use crate::kcalc::{sym_power, BundleSymbol, KClass, Twist};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Chern,
    Segre,
    Rank,
    Grade,
    Sym,
    Dual,
    Twist,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Chern,
        Func::Segre,
        Func::Rank,
        Func::Grade,
        Func::Sym,
        Func::Dual,
        Func::Twist,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Chern => "c",
            Func::Segre => "s",
            Func::Rank => "rank",
            Func::Grade => "grade",
            Func::Sym => "sym",
            Func::Dual => "dual",
            Func::Twist => "twist",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Grade | Func::Sym | Func::Twist => 2,
            _ => 1,
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Num(Rational),
    Ident(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    pub fn num(n: i64) -> Expr {
        Expr::Num(Rational::from_integer(BigInt::from(n)))
    }

    pub fn ident(name: impl Into<String>) -> Expr {
        Expr::Ident(name.into())
    }

    pub fn call(f: Func, args: Vec<Expr>) -> Expr {
        Expr::Call(f, args)
    }

    pub fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Ident(_) => 1,
            Expr::Neg(e) => 1 + e.depth(),
            Expr::Binary(_, l, r) => 1 + l.depth().max(r.depth()),
            Expr::Call(_, args) => 1 + args.iter().map(Expr::depth).max().unwrap_or(0),
        }
    }

    // 1: sum level, 2: product level, 3: atom
    fn level(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Binary(BinOp::Mul, ..) => 2,
            _ => 3,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min_level: u8) -> fmt::Result {
        if self.level() < min_level {
            write!(f, "(")?;
            self.write_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Num(q) => write!(f, "{}", fmt_rational(q)),
            Expr::Ident(s) => write!(f, "{s}"),
            Expr::Neg(e) => {
                write!(f, "-")?;
                e.write_at(f, 3)
            }
            Expr::Binary(op, l, r) => {
                let (ll, rl) = match op {
                    BinOp::Mul => (2, 3),
                    _ => (1, 2),
                };
                l.write_at(f, ll)?;
                write!(f, " {} ", op.symbol())?;
                r.write_at(f, rl)
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    a.write_at(f, 0)?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Prints with the minimal parentheses that preserve the tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Sym(char),
    End,
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        offset,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let digits = |mut j: usize| {
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        j
    };
    while i < bytes.len() {
        let ch = bytes[i];
        if ch.is_ascii_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() {
            let end = digits(i);
            let numer: BigInt = text[i..end].parse().expect("digits");
            let (value, next) = if end < bytes.len() && bytes[end] == b'/' {
                let dend = digits(end + 1);
                if dend == end + 1 {
                    return Err(syntax(end + 1, "expected denominator after '/'"));
                }
                let denom: BigInt = text[end + 1..dend].parse().expect("digits");
                if denom.is_zero() {
                    return Err(syntax(end + 1, "zero denominator"));
                }
                (Rational::new(numer, denom), dend)
            } else {
                (Rational::from_integer(numer), end)
            };
            out.push((Tok::Num(value), i));
            i = next;
        } else if ch.is_ascii_alphabetic() || ch == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else if b"+-*(),".contains(&ch) {
            out.push((Tok::Sym(ch as char), i));
            i += 1;
        } else {
            let c = text[i..].chars().next().expect("in bounds");
            return Err(syntax(i, format!("unexpected character '{c}'")));
        }
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
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

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == &Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(syntax(self.offset(), format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Expr::binary(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while self.eat('*') {
            lhs = Expr::binary(BinOp::Mul, lhs, self.factor()?);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        let at = self.offset();
        match self.bump() {
            Tok::Num(q) => Ok(Expr::Num(q)),
            Tok::Sym('-') => Ok(Expr::Neg(Box::new(self.factor()?))),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if !self.eat('(') {
                    return Ok(Expr::Ident(name));
                }
                let func = Func::from_name(&name)
                    .ok_or_else(|| syntax(at, format!("unknown function `{name}`")))?;
                let mut args = vec![self.expr()?];
                while self.eat(',') {
                    args.push(self.expr()?);
                }
                self.expect(')')?;
                if args.len() != func.arity() {
                    return Err(syntax(
                        at,
                        format!(
                            "`{name}` takes {} argument(s), got {}",
                            func.arity(),
                            args.len()
                        ),
                    ));
                }
                Ok(Expr::Call(func, args))
            }
            Tok::End => Err(syntax(at, "unexpected end of input")),
            Tok::Sym(c) => Err(syntax(at, format!("unexpected '{c}'"))),
        }
    }
}

pub fn parse(text: &str) -> Result<Expr> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let e = p.expr()?;
    if p.peek() != &Tok::End {
        return Err(syntax(p.offset(), "trailing input"));
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    K(KClass),
    Graded(GradedClass),
    Integer(i64),
}

impl Value {
    fn kind(&self) -> &'static str {
        match self {
            Value::K(_) => "K-class",
            Value::Graded(_) => "graded class",
            Value::Integer(_) => "integer",
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::K(k) => write!(f, "{k}"),
            Value::Graded(g) => write!(f, "{g}"),
            Value::Integer(n) => write!(f, "{n}"),
        }
    }
}

/// Bindings over one ambient ring. Unbound identifiers fall back to ring
/// generators.
#[derive(Debug, Clone)]
pub struct Environment {
    ring: Ring,
    bindings: BTreeMap<String, Value>,
}

impl Environment {
    /// Rejects rings with generators above the truncation degree, which
    /// would be identically zero.
    pub fn new(ring: Ring) -> Result<Self> {
        if let Some(g) = ring
            .generators()
            .iter()
            .find(|g| g.degree > ring.truncation())
        {
            return Err(Error::InvalidPresentation(format!(
                "generator `{}` has degree {} above truncation {}",
                g.name,
                g.degree,
                ring.truncation()
            )));
        }
        Ok(Self {
            ring,
            bindings: BTreeMap::new(),
        })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn bind(&mut self, name: impl Into<String>, value: Value) -> Result<()> {
        if let Value::Graded(g) = &value {
            if g.ring() != &self.ring {
                return Err(Error::RingMismatch);
            }
        }
        self.bindings.insert(name.into(), value);
        Ok(())
    }

    pub fn bind_bundle(&mut self, name: impl Into<String>, sym: BundleSymbol) -> Result<()> {
        self.bind(name, Value::K(KClass::from_symbol(sym)))
    }

    fn lookup(&self, name: &str) -> Result<Value> {
        if let Some(v) = self.bindings.get(name) {
            return Ok(v.clone());
        }
        match self.ring.gen(name) {
            Ok(g) => Ok(Value::Graded(g)),
            Err(_) => Err(Error::Eval(format!("unbound identifier `{name}`"))),
        }
    }

    fn graded(&self, v: Value, what: &str) -> Result<GradedClass> {
        match v {
            Value::Graded(g) => Ok(g),
            Value::Integer(n) => Ok(self.ring.integer(n)),
            Value::K(_) => Err(type_error(what, "graded class", "K-class")),
        }
    }
}

fn type_error(what: &str, expected: &str, got: &str) -> Error {
    Error::Eval(format!("{what} expects a {expected}, got a {got}"))
}

fn overflow() -> Error {
    Error::Eval("integer overflow".into())
}

fn as_k(v: Value, what: &str) -> Result<KClass> {
    match v {
        Value::K(k) => Ok(k),
        other => Err(type_error(what, "K-class", other.kind())),
    }
}

fn as_int(v: Value, what: &str) -> Result<i64> {
    match v {
        Value::Integer(n) => Ok(n),
        other => Err(type_error(what, "integer", other.kind())),
    }
}

pub fn eval(e: &Expr, env: &Environment) -> Result<Value> {
    match e {
        Expr::Num(q) => Ok(match q.to_integer().to_i64() {
            Some(n) if q.is_integer() => Value::Integer(n),
            _ => Value::Graded(env.ring.constant(q.clone())),
        }),
        Expr::Ident(name) => env.lookup(name),
        Expr::Neg(inner) => Ok(match eval(inner, env)? {
            Value::K(k) => Value::K(k.neg()),
            Value::Graded(g) => Value::Graded(g.neg()),
            Value::Integer(n) => Value::Integer(n.checked_neg().ok_or_else(overflow)?),
        }),
        Expr::Binary(op, l, r) => binary(*op, eval(l, env)?, eval(r, env)?, env),
        Expr::Call(func, args) => call(*func, args, env),
    }
}

fn binary(op: BinOp, l: Value, r: Value, env: &Environment) -> Result<Value> {
    use Value::*;
    match (op, l, r) {
        (BinOp::Add, K(a), K(b)) => Ok(K(a.add(&b))),
        (BinOp::Sub, K(a), K(b)) => Ok(K(a.sub(&b))),
        (BinOp::Add, Integer(a), Integer(b)) => a.checked_add(b).map(Integer).ok_or_else(overflow),
        (BinOp::Sub, Integer(a), Integer(b)) => a.checked_sub(b).map(Integer).ok_or_else(overflow),
        (BinOp::Mul, Integer(a), Integer(b)) => a.checked_mul(b).map(Integer).ok_or_else(overflow),
        (BinOp::Mul, Integer(n), K(k)) | (BinOp::Mul, K(k), Integer(n)) => Ok(K(k.scale(n))),
        (op, K(_), other) | (op, other, K(_)) => Err(Error::Eval(format!(
            "cannot apply '{}' to a K-class and a {}",
            op.symbol(),
            other.kind()
        ))),
        (op, a, b) => {
            let a = env.graded(a, op.symbol())?;
            let b = env.graded(b, op.symbol())?;
            Ok(Graded(match op {
                BinOp::Add => a.add(&b)?,
                BinOp::Sub => a.sub(&b)?,
                BinOp::Mul => a.mul(&b)?,
            }))
        }
    }
}

fn call(func: Func, args: &[Expr], env: &Environment) -> Result<Value> {
    if args.len() != func.arity() {
        return Err(Error::Eval(format!(
            "`{}` takes {} argument(s), got {}",
            func.name(),
            func.arity(),
            args.len()
        )));
    }
    let name = func.name();
    let first = eval(&args[0], env)?;
    match func {
        Func::Chern => Ok(Value::Graded(as_k(first, name)?.total_chern(&env.ring)?)),
        Func::Segre => Ok(Value::Graded(as_k(first, name)?.total_segre(&env.ring)?)),
        Func::Rank => Ok(Value::Integer(as_k(first, name)?.rank())),
        Func::Dual => Ok(Value::K(as_k(first, name)?.dual())),
        Func::Grade => {
            let g = env.graded(first, name)?;
            let d = as_int(eval(&args[1], env)?, name)?;
            Ok(Value::Graded(g.grade(d)?))
        }
        Func::Sym => {
            let k = as_k(first, name)?;
            let d = as_int(eval(&args[1], env)?, name)?;
            let d = u32::try_from(d)
                .map_err(|_| Error::Eval(format!("sym degree {d} must be non-negative")))?;
            let mut terms = k.terms();
            match (terms.next(), terms.next()) {
                (Some((sym, twist, 1)), None) if twist.is_trivial() => {
                    Ok(Value::K(sym_power(sym, d)?))
                }
                _ => Err(Error::Eval(
                    "sym expects a single untwisted bundle with multiplicity 1".into(),
                )),
            }
        }
        Func::Twist => {
            let k = as_k(first, name)?;
            let class = env.graded(eval(&args[1], env)?, name)?;
            let line = Twist::line(args[1].to_string(), class)?;
            Ok(Value::K(k.tensor_line(&line)?))
        }
    }
}

/// Parses and evaluates in one step.
pub fn eval_str(text: &str, env: &Environment) -> Result<Value> {
    eval(&parse(text)?, env)
}
