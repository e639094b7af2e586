use std::fmt::{self, Write};

use num_traits::Signed;

use super::{Chart, Expr, Node, Number};

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const POWER: u8 = 3;
const ATOM: u8 = 4;

/// Renders an expression in the input grammar, so the text parses back to
/// an equal-valued expression.
pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    chart: Option<&'a Chart>,
}

impl Expr {
    pub fn display<'a>(&'a self, chart: &'a Chart) -> ExprDisplay<'a> {
        ExprDisplay {
            expr: self,
            chart: Some(chart),
        }
    }

    /// Text using the chart's names.
    pub fn to_text(&self, chart: &Chart) -> String {
        self.display(chart).to_string()
    }
}

/// Uses the default names `z1, z2, …` for coordinates.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        ExprDisplay {
            expr: self,
            chart: None,
        }
        .fmt(f)
    }
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_expr(self.expr, self.chart, 0, &mut out)?;
        f.write_str(&out)
    }
}

fn level(e: &Expr) -> u8 {
    match e.node() {
        Node::Num(n) => match n {
            Number::Rational(r) if r.is_integer() && !r.is_negative() => ATOM,
            Number::Float(v) if *v >= 0.0 => ATOM,
            _ => PRODUCT,
        },
        Node::Coord(_) | Node::Time | Node::Func(..) => ATOM,
        Node::Pow(_, e) if e.is_negative() => PRODUCT,
        Node::Pow(..) => POWER,
        Node::Product(_) => PRODUCT,
        Node::Sum(_) => SUM,
    }
}

fn write_expr(e: &Expr, chart: Option<&Chart>, ctx: u8, out: &mut String) -> fmt::Result {
    let paren = level(e) < ctx;
    if paren {
        out.push('(');
    }
    match e.node() {
        Node::Num(n) => write!(out, "{n}")?,
        Node::Coord(i) => match chart {
            Some(c) if *i < c.dim() => out.push_str(c.name(*i)),
            _ => write!(out, "z{}", i + 1)?,
        },
        Node::Time => out.push('t'),
        Node::Func(func, arg) => {
            out.push_str(func.name());
            out.push('(');
            write_expr(arg, chart, 0, out)?;
            out.push(')');
        }
        Node::Pow(_, exp) if exp.is_negative() => {
            write_product(Number::ONE, std::slice::from_ref(e), chart, out)?;
        }
        Node::Pow(base, exp) => {
            write_expr(base, chart, ATOM, out)?;
            if exp.is_integer() {
                write!(out, "^{}", exp.numer())?;
            } else {
                write!(out, "^({}/{})", exp.numer(), exp.denom())?;
            }
        }
        Node::Product(_) => {
            let (coef, mono) = e.split_coefficient();
            let factors: Vec<Expr> = match mono.node() {
                Node::Product(fs) => fs.clone(),
                _ => vec![mono.clone()],
            };
            write_product(coef, &factors, chart, out)?;
        }
        Node::Sum(terms) => {
            // lead with a positive term when there is one
            let mut terms = terms.clone();
            if let Some(k) = terms
                .iter()
                .position(|t| !t.split_coefficient().0.is_negative())
            {
                let lead = terms.remove(k);
                terms.insert(0, lead);
            }
            for (i, t) in terms.iter().enumerate() {
                let (coef, _) = t.split_coefficient();
                if i == 0 {
                    write_expr(t, chart, SUM, out)?;
                } else if coef.is_negative() {
                    out.push_str(" - ");
                    write_expr(&-t, chart, PRODUCT, out)?;
                } else {
                    out.push_str(" + ");
                    write_expr(t, chart, PRODUCT, out)?;
                }
            }
        }
    }
    if paren {
        out.push(')');
    }
    Ok(())
}

fn write_product(
    coef: Number,
    factors: &[Expr],
    chart: Option<&Chart>,
    out: &mut String,
) -> fmt::Result {
    let mut numer: Vec<String> = Vec::new();
    let mut denom: Vec<String> = Vec::new();
    let mut denom_levels: Vec<u8> = Vec::new();
    if coef.is_negative() {
        out.push('-');
    }
    let magnitude = coef.abs();
    let (num_part, den_part) = match magnitude {
        Number::Rational(r) => (Number::int(*r.numer()), Number::int(*r.denom())),
        Number::Float(_) => (magnitude, Number::ONE),
    };
    if !num_part.is_one() || factors.iter().all(is_inverse) {
        numer.push(num_part.to_string());
    }
    if !den_part.is_one() {
        denom.push(den_part.to_string());
        denom_levels.push(ATOM);
    }
    for f in factors {
        let mut s = String::new();
        if let Node::Pow(base, exp) = f.node() {
            if exp.is_negative() {
                let inv = Expr::pow(base.clone(), -*exp);
                write_expr(&inv, chart, POWER, &mut s)?;
                denom_levels.push(level(&inv).min(ATOM));
                denom.push(s);
                continue;
            }
        }
        write_expr(f, chart, POWER, &mut s)?;
        numer.push(s);
    }
    out.push_str(&numer.join("*"));
    if !denom.is_empty() {
        out.push('/');
        if denom.len() == 1 && denom_levels[0] >= POWER {
            out.push_str(&denom[0]);
        } else {
            out.push('(');
            out.push_str(&denom.join("*"));
            out.push(')');
        }
    }
    Ok(())
}

fn is_inverse(f: &Expr) -> bool {
    matches!(f.node(), Node::Pow(_, e) if e.is_negative())
}
