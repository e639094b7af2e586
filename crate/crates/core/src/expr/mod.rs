//! Expression trees over phase-space coordinates and explicit time.
//!
//! An [`Expr`] is immutable and cheap to clone (reference counted), so values
//! can be shared freely between threads. All constructors apply a small set of
//! local rewrites: constant folding, flattening of nested sums and products,
//! merging of like terms (`2*x + 3*x -> 5*x`) and of equal bases
//! (`x * x^2 -> x^3`), and the identities `0*x -> 0`, `1*x -> x`, `x^1 -> x`.
//! No global normal form is attempted. Symbolic identities are decided by
//! sampled evaluation, see [`zero`].

mod chart;
mod diff;
mod display;
mod eval;
mod expand;
mod number;
mod parse;
pub mod zero;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::Rational64;
use num_traits::{One, Zero};

pub use chart::{Chart, ChartError};
pub use display::ExprDisplay;
pub use eval::{EvalError, EvalErrorKind};
pub use number::Number;
pub use parse::{parse, ParseError, ParseErrorKind};
pub use zero::{is_zero, is_zero_all, residual_test, SamplePoint, SampleSet, Sampling, ZeroTest};

/// Differentiation variable: a chart coordinate (by index) or time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    Coord(usize),
    Time,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        match name {
            "exp" => Some(Func::Exp),
            "ln" => Some(Func::Ln),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            _ => None,
        }
    }
}

#[derive(Debug)]
pub(crate) enum Node {
    Num(Number),
    Coord(usize),
    Time,
    /// At least two terms; the numeric term, if any, comes last.
    Sum(Vec<Expr>),
    /// Optional leading numeric coefficient (never 1), then sorted non-numeric
    /// factors with pairwise distinct bases.
    Product(Vec<Expr>),
    Pow(Expr, Rational64),
    Func(Func, Expr),
}

#[derive(Clone, Debug)]
pub struct Expr(Arc<Node>);

impl Expr {
    fn from_node(node: Node) -> Self {
        Expr(Arc::new(node))
    }

    pub(crate) fn node(&self) -> &Node {
        &self.0
    }

    pub fn num(n: Number) -> Self {
        Self::from_node(Node::Num(n))
    }

    pub fn int(v: i64) -> Self {
        Self::num(Number::int(v))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::num(Number::ratio(num, den))
    }

    pub fn float(v: f64) -> Self {
        Self::num(Number::Float(v))
    }

    pub fn zero() -> Self {
        Self::num(Number::ZERO)
    }

    pub fn one() -> Self {
        Self::num(Number::ONE)
    }

    pub fn coord(index: usize) -> Self {
        Self::from_node(Node::Coord(index))
    }

    pub fn time() -> Self {
        Self::from_node(Node::Time)
    }

    pub fn var(v: Var) -> Self {
        match v {
            Var::Coord(i) => Self::coord(i),
            Var::Time => Self::time(),
        }
    }

    pub fn as_number(&self) -> Option<Number> {
        match self.node() {
            Node::Num(n) => Some(*n),
            _ => None,
        }
    }

    /// Structurally the constant zero (not a semantic test).
    pub fn is_zero_literal(&self) -> bool {
        self.as_number().is_some_and(Number::is_zero)
    }

    pub fn is_one_literal(&self) -> bool {
        self.as_number().is_some_and(Number::is_one)
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Num(_) | Node::Coord(_) | Node::Time => 1,
            Node::Sum(xs) | Node::Product(xs) => 1 + xs.iter().map(Expr::size).sum::<usize>(),
            Node::Pow(b, _) | Node::Func(_, b) => 1 + b.size(),
        }
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_coord(&self) -> Option<usize> {
        match self.node() {
            Node::Coord(i) => Some(*i),
            Node::Num(_) | Node::Time => None,
            Node::Sum(xs) | Node::Product(xs) => xs.iter().filter_map(Expr::max_coord).max(),
            Node::Pow(b, _) | Node::Func(_, b) => b.max_coord(),
        }
    }

    pub fn depends_on_time(&self) -> bool {
        match self.node() {
            Node::Time => true,
            Node::Num(_) | Node::Coord(_) => false,
            Node::Sum(xs) | Node::Product(xs) => xs.iter().any(Expr::depends_on_time),
            Node::Pow(b, _) | Node::Func(_, b) => b.depends_on_time(),
        }
    }

    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        let mut constant = Number::ZERO;
        let mut groups: BTreeMap<Expr, Number> = BTreeMap::new();
        let mut stack: Vec<Expr> = terms.into_iter().collect();
        while let Some(term) = stack.pop() {
            match term.node() {
                Node::Sum(inner) => stack.extend(inner.iter().cloned()),
                Node::Num(n) => constant = constant + *n,
                _ => {
                    let (coef, mono) = term.split_coefficient();
                    let slot = groups.entry(mono).or_insert(Number::ZERO);
                    *slot = *slot + coef;
                }
            }
        }
        let mut out: Vec<Expr> = groups
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(mono, c)| Expr::scaled(c, mono))
            .collect();
        if !constant.is_zero() {
            out.push(Expr::num(constant));
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => Expr::from_node(Node::Sum(out)),
        }
    }

    pub fn product<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        let mut coef = Number::ONE;
        let mut bases: BTreeMap<Expr, Rational64> = BTreeMap::new();
        let mut stack: Vec<Expr> = factors.into_iter().collect();
        while let Some(f) = stack.pop() {
            match f.node() {
                Node::Product(inner) => stack.extend(inner.iter().cloned()),
                Node::Num(n) => coef = coef * *n,
                Node::Pow(b, e) => {
                    let slot = bases.entry(b.clone()).or_insert_with(Rational64::zero);
                    *slot += *e;
                }
                _ => {
                    let slot = bases.entry(f.clone()).or_insert_with(Rational64::zero);
                    *slot += Rational64::one();
                }
            }
        }
        if coef.is_zero() {
            return Expr::zero();
        }
        let mut rest = Vec::with_capacity(bases.len());
        let mut spilled = Vec::new();
        for (base, exp) in bases {
            if exp.is_zero() {
                continue;
            }
            let p = Expr::pow(base, exp);
            match p.node() {
                Node::Num(n) => coef = coef * *n,
                // an integer power distributed over a product base
                Node::Product(inner) => spilled.extend(inner.iter().cloned()),
                _ => rest.push(p),
            }
        }
        if !spilled.is_empty() {
            return Expr::product(std::iter::once(Expr::num(coef)).chain(rest).chain(spilled));
        }
        if coef.is_zero() {
            return Expr::zero();
        }
        rest.sort();
        if let ([single], false) = (rest.as_slice(), coef.is_one()) {
            if let Node::Sum(terms) = single.node() {
                return Expr::sum(terms.iter().map(|t| t.scale(coef)));
            }
        }
        Expr::assemble_product(coef, rest)
    }

    fn assemble_product(coef: Number, mut rest: Vec<Expr>) -> Expr {
        if rest.is_empty() {
            return Expr::num(coef);
        }
        if coef.is_one() && rest.len() == 1 {
            return rest.pop().unwrap();
        }
        let mut v = Vec::with_capacity(rest.len() + 1);
        if !coef.is_one() {
            v.push(Expr::num(coef));
        }
        v.extend(rest);
        Expr::from_node(Node::Product(v))
    }

    /// `c * mono` where `mono` is already coefficient free.
    fn scaled(c: Number, mono: Expr) -> Expr {
        if c.is_one() {
            return mono;
        }
        match mono.node() {
            Node::Product(fs) => {
                let mut v = Vec::with_capacity(fs.len() + 1);
                v.push(Expr::num(c));
                v.extend(fs.iter().cloned());
                Expr::from_node(Node::Product(v))
            }
            _ => Expr::from_node(Node::Product(vec![Expr::num(c), mono])),
        }
    }

    /// Splits a leading numeric coefficient: `3*x*y -> (3, x*y)`.
    pub(crate) fn split_coefficient(&self) -> (Number, Expr) {
        match self.node() {
            Node::Num(n) => (*n, Expr::one()),
            Node::Product(fs) => match fs[0].node() {
                Node::Num(n) => {
                    let rest = &fs[1..];
                    let mono = if rest.len() == 1 {
                        rest[0].clone()
                    } else {
                        Expr::from_node(Node::Product(rest.to_vec()))
                    };
                    (*n, mono)
                }
                _ => (Number::ONE, self.clone()),
            },
            _ => (Number::ONE, self.clone()),
        }
    }

    pub fn pow(base: Expr, exp: Rational64) -> Expr {
        if exp.is_zero() {
            return Expr::one();
        }
        if exp.is_one() {
            return base;
        }
        match base.node() {
            Node::Num(n) => match n.pow(exp) {
                Some(v) => Expr::num(v),
                None => Expr::from_node(Node::Pow(base.clone(), exp)),
            },
            Node::Pow(b, e) if exp.is_integer() => Expr::pow(b.clone(), *e * exp),
            Node::Product(fs) if exp.is_integer() => {
                Expr::product(fs.iter().map(|f| Expr::pow(f.clone(), exp)))
            }
            _ => Expr::from_node(Node::Pow(base, exp)),
        }
    }

    pub fn powi(base: Expr, exp: i64) -> Expr {
        Expr::pow(base, Rational64::from_integer(exp))
    }

    pub fn recip(self) -> Expr {
        Expr::powi(self, -1)
    }

    pub fn apply(func: Func, arg: Expr) -> Expr {
        if let Some(n) = arg.as_number() {
            let v = n.to_f64();
            match func {
                Func::Exp if n.is_zero() => return Expr::one(),
                Func::Ln if n.is_one() => return Expr::zero(),
                Func::Sin if n.is_zero() => return Expr::zero(),
                Func::Cos if n.is_zero() => return Expr::one(),
                Func::Ln if v <= 0.0 => {}
                _ => {
                    let folded = match func {
                        Func::Exp => v.exp(),
                        Func::Ln => v.ln(),
                        Func::Sin => v.sin(),
                        Func::Cos => v.cos(),
                    };
                    if folded.is_finite() {
                        return Expr::float(folded);
                    }
                }
            }
        }
        Expr::from_node(Node::Func(func, arg))
    }

    pub fn exp(self) -> Expr {
        Expr::apply(Func::Exp, self)
    }

    pub fn ln(self) -> Expr {
        Expr::apply(Func::Ln, self)
    }

    pub fn sin(self) -> Expr {
        Expr::apply(Func::Sin, self)
    }

    pub fn cos(self) -> Expr {
        Expr::apply(Func::Cos, self)
    }

    pub fn scale(&self, c: Number) -> Expr {
        Expr::product([Expr::num(c), self.clone()])
    }

    fn rank(&self) -> u8 {
        match self.node() {
            Node::Num(_) => 0,
            Node::Coord(_) => 1,
            Node::Time => 2,
            Node::Pow(..) => 3,
            Node::Func(..) => 4,
            Node::Product(_) => 5,
            Node::Sum(_) => 6,
        }
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Expr {}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Structural order used for canonical term and factor placement.
impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        match (self.node(), other.node()) {
            (Node::Num(a), Node::Num(b)) => a.total_cmp(b),
            (Node::Coord(a), Node::Coord(b)) => a.cmp(b),
            (Node::Time, Node::Time) => Ordering::Equal,
            (Node::Pow(b1, e1), Node::Pow(b2, e2)) => b1.cmp(b2).then_with(|| e1.cmp(e2)),
            (Node::Func(f1, a1), Node::Func(f2, a2)) => f1.cmp(f2).then_with(|| a1.cmp(a2)),
            (Node::Sum(x), Node::Sum(y)) | (Node::Product(x), Node::Product(y)) => {
                x.len().cmp(&y.len()).then_with(|| x.cmp(y))
            }
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::sum([self, rhs])
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::sum([self, -rhs])
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::product([self, rhs])
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.scale(Number::int(-1))
    }
}

impl<'a> Add<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        Expr::sum([self.clone(), rhs.clone()])
    }
}

impl<'a> Sub<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        Expr::sum([self.clone(), -rhs.clone()])
    }
}

impl<'a> Mul<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        Expr::product([self.clone(), rhs.clone()])
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.scale(Number::int(-1))
    }
}

impl From<i64> for Expr {
    fn from(v: i64) -> Self {
        Expr::int(v)
    }
}
