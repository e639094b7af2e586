use num_rational::Rational64;
use thiserror::Error;

use super::{Chart, Expr, Func, Number};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedToken(String),
    UnexpectedEnd,
    UnknownIdentifier(String),
    UnknownFunction(String),
    NonConstantExponent,
    BadNumber(String),
}

impl std::fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character `{c}`"),
            ParseErrorKind::UnexpectedToken(t) => write!(f, "unexpected `{t}`"),
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input"),
            ParseErrorKind::UnknownIdentifier(s) => write!(f, "unknown identifier `{s}`"),
            ParseErrorKind::UnknownFunction(s) => write!(f, "unknown function `{s}`"),
            ParseErrorKind::NonConstantExponent => {
                write!(f, "exponent must be a constant rational")
            }
            ParseErrorKind::BadNumber(s) => write!(f, "malformed number `{s}`"),
        }
    }
}

/// Syntax error; `column` is 1-based and counts characters.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{kind} at column {column}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Number),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(n) => n.to_string(),
        Tok::Ident(s) => s.clone(),
        Tok::Op(c) => c.to_string(),
        Tok::LParen => "(".into(),
        Tok::RParen => ")".into(),
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let n = number_literal(&text).ok_or_else(|| ParseError {
                kind: ParseErrorKind::BadNumber(text.clone()),
                column: start + 1,
            })?;
            out.push((Tok::Num(n), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), start));
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ => {
                return Err(ParseError {
                    kind: ParseErrorKind::UnexpectedChar(c),
                    column: i + 1,
                })
            }
        };
        out.push((tok, start));
        i += 1;
    }
    Ok(out)
}

/// Integers and plain decimals become exact rationals; exponent notation
/// (or anything too long for `i64`) becomes a float.
fn number_literal(text: &str) -> Option<Number> {
    if text.matches('.').count() > 1 {
        return None;
    }
    if !text.contains(['e', 'E']) {
        let (int_part, frac_part) = text.split_once('.').unwrap_or((text, ""));
        let digits = format!("{int_part}{frac_part}");
        if let (Ok(n), Some(den)) = (
            digits.parse::<i64>(),
            10i64.checked_pow(frac_part.len() as u32),
        ) {
            return Some(Number::Rational(Rational64::new(n, den)));
        }
    }
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(Number::Float)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    chart: &'a Chart,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, c)| *c) + 1
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            kind,
            column: self.column(),
        }
    }

    fn unexpected(&self) -> ParseError {
        match self.peek() {
            Some(t) => self.error(ParseErrorKind::UnexpectedToken(describe(t))),
            None => self.error(ParseErrorKind::UnexpectedEnd),
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek() {
            let op = *op;
            self.pos += 1;
            let t = self.term()?;
            terms.push(if op == '-' { -t } else { t });
        }
        Ok(Expr::sum(terms))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.unary()?;
        while let Some(Tok::Op(op @ ('*' | '/'))) = self.peek() {
            let op = *op;
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == '*' {
                acc * rhs
            } else {
                acc * rhs.recip()
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            let caret = self.column();
            self.pos += 1;
            let exponent = self.unary()?;
            let r = exponent
                .as_number()
                .and_then(Number::as_rational)
                .ok_or(ParseError {
                    kind: ParseErrorKind::NonConstantExponent,
                    column: caret,
                })?;
            return Ok(Expr::pow(base, r));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.unexpected());
        };
        match tok {
            Tok::Num(n) => {
                self.pos += 1;
                Ok(Expr::num(n))
            }
            Tok::LParen => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(Tok::LParen) = self.toks.get(self.pos + 1).map(|(t, _)| t) {
                    let func = Func::from_name(&name)
                        .ok_or_else(|| self.error(ParseErrorKind::UnknownFunction(name.clone())))?;
                    self.pos += 2;
                    let arg = self.sum()?;
                    self.expect_rparen()?;
                    return Ok(Expr::apply(func, arg));
                }
                if name == "t" && self.chart.includes_time() {
                    self.pos += 1;
                    return Ok(Expr::time());
                }
                let idx = self
                    .chart
                    .index_of(&name)
                    .ok_or_else(|| self.error(ParseErrorKind::UnknownIdentifier(name.clone())))?;
                self.pos += 1;
                Ok(Expr::coord(idx))
            }
            _ => Err(self.unexpected()),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::RParen) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.unexpected()),
        }
    }
}

/// Parses `source` over the coordinates of `chart` (plus `t` when the chart
/// admits time dependence).
///
/// Grammar: identifiers, integer/decimal literals (a `p/q` literal is an
/// exact rational), `+ - * / ^`, `exp ln sin cos`, parentheses; `^` binds
/// tighter than unary minus and associates to the right. Exponents must fold
/// to a rational constant.
pub fn parse(source: &str, chart: &Chart) -> Result<Expr, ParseError> {
    let toks = lex(source)?;
    let end = source.chars().count();
    let mut p = Parser {
        toks,
        pos: 0,
        end,
        chart,
    };
    let e = p.sum()?;
    if p.pos != p.toks.len() {
        return Err(p.unexpected());
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart() -> Chart {
        Chart::standard(4).unwrap()
    }

    #[test]
    fn zero_literal() {
        assert!(parse("0", &chart()).unwrap().is_zero_literal());
    }

    #[test]
    fn exact_rationals() {
        let c = chart();
        assert_eq!(
            parse("1/2", &c).unwrap().as_number(),
            Some(Number::ratio(1, 2))
        );
        assert_eq!(
            parse("0.25", &c).unwrap().as_number(),
            Some(Number::ratio(1, 4))
        );
        assert!(matches!(
            parse("1e-3", &c).unwrap().as_number(),
            Some(Number::Float(_))
        ));
    }

    #[test]
    fn precedence() {
        let c = chart();
        let e = parse("-z1^2", &c).unwrap();
        assert_eq!(e.eval(&[3.0, 0.0, 0.0, 0.0], 0.0).unwrap(), -9.0);
        let e = parse("2^3^2", &c).unwrap();
        assert_eq!(e.as_number(), Some(Number::int(512)));
        let e = parse("z1 - z2 - z3", &c).unwrap();
        assert_eq!(e.eval(&[1.0, 2.0, 3.0, 0.0], 0.0).unwrap(), -4.0);
        let e = parse("z1 / z2 * z3", &c).unwrap();
        assert_eq!(e.eval(&[1.0, 2.0, 3.0, 0.0], 0.0).unwrap(), 1.5);
    }

    #[test]
    fn whitespace_insensitive() {
        let c = chart();
        assert_eq!(
            parse(" z1*z2-exp( z3 -z4 ) ", &c).unwrap(),
            parse("z1*z2 - exp(z3-z4)", &c).unwrap()
        );
    }

    #[test]
    fn errors_carry_positions() {
        let c = chart();
        assert_eq!(
            parse("z1 + w", &c).unwrap_err(),
            ParseError {
                kind: ParseErrorKind::UnknownIdentifier("w".into()),
                column: 6
            }
        );
        assert_eq!(
            parse("z1 + ", &c).unwrap_err(),
            ParseError {
                kind: ParseErrorKind::UnexpectedEnd,
                column: 6
            }
        );
        assert_eq!(
            parse("z1 $ 2", &c).unwrap_err(),
            ParseError {
                kind: ParseErrorKind::UnexpectedChar('$'),
                column: 4
            }
        );
        assert_eq!(
            parse("z1^z2", &c).unwrap_err().kind,
            ParseErrorKind::NonConstantExponent
        );
        assert_eq!(
            parse("tan(z1)", &c).unwrap_err().kind,
            ParseErrorKind::UnknownFunction("tan".into())
        );
        assert!(matches!(
            parse("(z1", &c).unwrap_err().kind,
            ParseErrorKind::UnexpectedEnd
        ));
        assert!(matches!(
            parse("z1 z2", &c).unwrap_err().kind,
            ParseErrorKind::UnexpectedToken(_)
        ));
    }

    #[test]
    fn time_only_when_chart_allows_it() {
        let timeless = Chart::with_time(&["q", "p"], false).unwrap();
        assert_eq!(
            parse("t*q", &timeless).unwrap_err().kind,
            ParseErrorKind::UnknownIdentifier("t".into())
        );
        assert!(parse("t*q", &Chart::new(&["q", "p"]).unwrap())
            .unwrap()
            .depends_on_time());
    }
}
