//! Reader for the plain-text system format.
//!
//! ```text
//! # comment
//! variables: x, y
//! param a = 1.5e-3
//! x^2 + a*y - 1
//! x*y - 2/3
//! ```

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Pow;

use super::ast::{CRational, Expr, ExpressionSystem};
use super::ExprError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(char),
    End,
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Lexer {
    fn new(src: &str, line: usize) -> Self {
        Lexer { chars: src.chars().collect(), pos: 0, line }
    }

    fn err(&self, column: usize, message: impl Into<String>) -> ExprError {
        ExprError::Syntax { line: self.line, column, message: message.into() }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize)>, ExprError> {
        let mut out = Vec::new();
        loop {
            while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
                self.pos += 1;
            }
            let col = self.pos + 1;
            let Some(&c) = self.chars.get(self.pos) else {
                out.push((Tok::End, col));
                return Ok(out);
            };
            if c.is_ascii_digit() || c == '.' {
                out.push((Tok::Num(self.number()?), col));
            } else if c.is_alphabetic() || c == '_' {
                let start = self.pos;
                while self.pos < self.chars.len()
                    && (self.chars[self.pos].is_alphanumeric() || self.chars[self.pos] == '_')
                {
                    self.pos += 1;
                }
                out.push((Tok::Ident(self.chars[start..self.pos].iter().collect()), col));
            } else if "+-*/^()".contains(c) {
                self.pos += 1;
                out.push((Tok::Op(c), col));
            } else if c == '\u{2212}' {
                self.pos += 1;
                out.push((Tok::Op('-'), col));
            } else {
                return Err(self.err(col, format!("unexpected character '{c}'")));
            }
        }
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn number(&mut self) -> Result<BigRational, ExprError> {
        let col = self.pos + 1;
        let int_part = self.digits();
        let mut frac = String::new();
        if self.chars.get(self.pos) == Some(&'.') {
            self.pos += 1;
            frac = self.digits();
        }
        if int_part.is_empty() && frac.is_empty() {
            return Err(self.err(col, "malformed number"));
        }
        let mut exp: i64 = 0;
        if matches!(self.chars.get(self.pos), Some('e' | 'E')) {
            let save = self.pos;
            self.pos += 1;
            let neg = match self.chars.get(self.pos) {
                Some('-') => {
                    self.pos += 1;
                    true
                }
                Some('+') => {
                    self.pos += 1;
                    false
                }
                _ => false,
            };
            let e = self.digits();
            if e.is_empty() {
                self.pos = save;
                return Err(self.err(col, "malformed exponent"));
            }
            exp = e.parse::<i64>().map_err(|_| self.err(col, "exponent out of range"))?;
            if exp > 100_000 {
                return Err(self.err(col, "exponent out of range"));
            }
            if neg {
                exp = -exp;
            }
        }
        let digits = format!("{int_part}{frac}");
        let mant: BigInt = digits.parse().expect("digit string");
        let scale = exp - frac.len() as i64;
        let ten = BigInt::from(10);
        Ok(if scale >= 0 {
            BigRational::from_integer(mant * Pow::pow(&ten, scale as u64))
        } else {
            BigRational::new(mant, Pow::pow(&ten, (-scale) as u64))
        })
    }
}

/// Names visible while parsing one expression.
struct Scope<'s> {
    vars: &'s HashMap<String, usize>,
    params: &'s HashMap<String, CRational>,
    /// Variables are rejected inside parameter definitions.
    allow_vars: bool,
}

struct Parser<'s> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    scope: Scope<'s>,
}

impl<'s> Parser<'s> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn err(&self, message: impl Into<String>) -> ExprError {
        ExprError::Syntax { line: self.line, column: self.col(), message: message.into() }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn parse_all(mut self) -> Result<Expr, ExprError> {
        if *self.peek() == Tok::End {
            return Err(self.err("empty expression"));
        }
        let e = self.sum()?;
        if *self.peek() != Tok::End {
            return Err(self.err("unexpected trailing input"));
        }
        Ok(e)
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.product()?;
        while let Tok::Op(c @ ('+' | '-')) = *self.peek() {
            self.bump();
            let rhs = self.product()?;
            lhs = if c == '+' { fold_add(lhs, rhs) } else { fold_sub(lhs, rhs) };
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = *self.peek() {
            let col = self.col();
            self.bump();
            let rhs = self.unary()?;
            lhs = if c == '*' {
                fold_mul(lhs, rhs)
            } else {
                fold_div(lhs, rhs).ok_or(ExprError::ConstantDivisionByZero { line: self.line, column: col })?
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        match *self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(fold_neg(self.unary()?))
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        let col = self.col();
        self.bump();
        let k = self.exponent()?;
        if *self.peek() == Tok::Op('^') {
            return Err(self.err("chained exponent; add parentheses"));
        }
        fold_pow(base, k).ok_or(ExprError::ConstantDivisionByZero { line: self.line, column: col })
    }

    fn exponent(&mut self) -> Result<i32, ExprError> {
        let paren = *self.peek() == Tok::Op('(');
        if paren {
            self.bump();
        }
        let neg = *self.peek() == Tok::Op('-');
        if neg {
            self.bump();
        }
        let Tok::Num(n) = self.peek().clone() else {
            return Err(self.err("exponent must be an integer literal"));
        };
        if !n.is_integer() {
            return Err(self.err("exponent must be an integer literal"));
        }
        let k: i32 = n
            .to_integer()
            .try_into()
            .ok()
            .filter(|k: &i32| *k <= 1 << 16)
            .ok_or_else(|| self.err("exponent too large"))?;
        self.bump();
        if paren {
            if *self.peek() != Tok::Op(')') {
                return Err(self.err("expected ')'"));
            }
            self.bump();
        }
        Ok(if neg { -k } else { k })
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let col = self.col();
        match self.bump() {
            Tok::Num(r) => Ok(Expr::Const(CRational::real(r))),
            Tok::Ident(name) => {
                if name == "i" {
                    Ok(Expr::Const(CRational::imaginary_unit()))
                } else if let Some(c) = self.scope.params.get(&name) {
                    Ok(Expr::Const(c.clone()))
                } else if let Some(&k) = self.scope.vars.get(&name).filter(|_| self.scope.allow_vars) {
                    Ok(Expr::Var(k))
                } else {
                    Err(ExprError::UndeclaredIdentifier { name, line: self.line, column: col })
                }
            }
            Tok::Op('(') => {
                let e = self.sum()?;
                if *self.peek() != Tok::Op(')') {
                    return Err(self.err("expected ')'"));
                }
                self.bump();
                Ok(e)
            }
            Tok::End => Err(ExprError::Syntax {
                line: self.line,
                column: col,
                message: "unexpected end of expression".into(),
            }),
            Tok::Op(c) => Err(ExprError::Syntax {
                line: self.line,
                column: col,
                message: format!("unexpected '{c}'"),
            }),
        }
    }
}

fn fold_add(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Expr::Const(x.add(y)),
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn fold_sub(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Expr::Const(x.sub(y)),
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn fold_mul(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => Expr::Const(x.mul(y)),
        _ => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn fold_div(a: Expr, b: Expr) -> Option<Expr> {
    match (a.as_const(), b.as_const()) {
        (_, Some(y)) if y.is_zero() => None,
        (Some(x), Some(y)) => Some(Expr::Const(x.div(y)?)),
        _ => Some(Expr::Div(Box::new(a), Box::new(b))),
    }
}

fn fold_neg(a: Expr) -> Expr {
    match a.as_const() {
        Some(x) => Expr::Const(x.neg()),
        None => Expr::Neg(Box::new(a)),
    }
}

fn fold_pow(a: Expr, k: i32) -> Option<Expr> {
    match a.as_const() {
        Some(x) => Some(Expr::Const(x.pow(k)?)),
        None if k == 0 => Some(Expr::Const(CRational::one())),
        None if k == 1 => Some(a),
        None => Some(Expr::Pow(Box::new(a), k)),
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

/// Parses a system file. Parameters are folded into the expressions as exact
/// rational constants.
pub fn parse_system(text: &str) -> Result<ExpressionSystem, ExprError> {
    let mut vars: Option<HashMap<String, usize>> = None;
    let mut names = Vec::new();
    let mut params: HashMap<String, CRational> = HashMap::new();
    let mut exprs = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        if let Some(rest) = body.strip_prefix("variables:") {
            if vars.is_some() {
                return Err(ExprError::Syntax { line, column: 1, message: "duplicate variables line".into() });
            }
            let mut map = HashMap::new();
            for name in rest.split(',').map(str::trim) {
                if !is_identifier(name) || name == "i" {
                    return Err(ExprError::Syntax {
                        line,
                        column: 1,
                        message: format!("invalid variable name '{name}'"),
                    });
                }
                if map.insert(name.to_string(), names.len()).is_some() {
                    return Err(ExprError::DuplicateName { name: name.to_string(), line });
                }
                names.push(name.to_string());
            }
            vars = Some(map);
            continue;
        }
        let Some(vmap) = vars.as_ref() else {
            return Err(ExprError::MissingVariables { line });
        };
        if let Some(rest) = body.strip_prefix("param ") {
            let Some((name, _)) = rest.split_once('=') else {
                return Err(ExprError::Syntax { line, column: 1, message: "expected 'param name = value'".into() });
            };
            let name = name.trim();
            if !is_identifier(name) || name == "i" {
                return Err(ExprError::Syntax { line, column: 1, message: format!("invalid parameter name '{name}'") });
            }
            if vmap.contains_key(name) || params.contains_key(name) {
                return Err(ExprError::DuplicateName { name: name.to_string(), line });
            }
            let offset = raw.find('=').map_or(0, |p| p + 1);
            let e = parse_expr(&raw[offset..], line, offset, vmap, &params, false)?;
            let Expr::Const(c) = e else {
                unreachable!("parameter expressions fold to constants");
            };
            params.insert(name.to_string(), c);
            continue;
        }
        exprs.push(parse_expr(raw, line, 0, vmap, &params, true)?);
    }

    if vars.is_none() {
        return Err(ExprError::MissingVariables { line: text.lines().count().max(1) });
    }
    if exprs.len() != names.len() {
        return Err(ExprError::NonSquare { variables: names.len(), equations: exprs.len() });
    }
    Ok(ExpressionSystem::new(names, exprs))
}

fn parse_expr(
    src: &str,
    line: usize,
    col_offset: usize,
    vars: &HashMap<String, usize>,
    params: &HashMap<String, CRational>,
    allow_vars: bool,
) -> Result<Expr, ExprError> {
    let shift = |e: ExprError| match e {
        ExprError::Syntax { line, column, message } => {
            ExprError::Syntax { line, column: column + col_offset, message }
        }
        ExprError::UndeclaredIdentifier { name, line, column } => {
            ExprError::UndeclaredIdentifier { name, line, column: column + col_offset }
        }
        ExprError::ConstantDivisionByZero { line, column } => {
            ExprError::ConstantDivisionByZero { line, column: column + col_offset }
        }
        other => other,
    };
    let toks = Lexer::new(src, line).tokens().map_err(shift)?;
    let parser = Parser { toks, pos: 0, line, scope: Scope { vars, params, allow_vars } };
    parser.parse_all().map_err(shift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::CoefficientKind;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn decimal_literals_are_exact() {
        let sys = parse_system("variables: x\nx - 1.25e-2").unwrap();
        let Expr::Sub(_, c) = &sys.expressions[0] else { panic!() };
        assert_eq!(c.as_const().unwrap().re, rat(1, 80));
        let sys = parse_system("variables: x\nx - 2/3").unwrap();
        let Expr::Sub(_, c) = &sys.expressions[0] else { panic!() };
        assert_eq!(c.as_const().unwrap().re, rat(2, 3));
    }

    #[test]
    fn params_are_substituted() {
        let sys = parse_system("variables: x\nparam a = 3\nparam b = a^2 - 1\nb*x").unwrap();
        let Expr::Mul(c, _) = &sys.expressions[0] else { panic!() };
        assert_eq!(c.as_const().unwrap(), &CRational::from_int(8));
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let sys = parse_system("variables: x\n-x^2").unwrap();
        assert!(matches!(&sys.expressions[0], Expr::Neg(p) if matches!(**p, Expr::Pow(_, 2))));
        let sys = parse_system("variables: x\nx^-2 - (-2)^2").unwrap();
        let Expr::Sub(p, c) = &sys.expressions[0] else { panic!() };
        assert!(matches!(**p, Expr::Pow(_, -2)));
        assert_eq!(c.as_const().unwrap(), &CRational::from_int(4));
    }

    #[test]
    fn imaginary_unit_sets_complex_kind() {
        let sys = parse_system("variables: x\nx^2 - 2*i").unwrap();
        assert_eq!(sys.coefficient_kind, CoefficientKind::Complex);
        let sys = parse_system("variables: x\ni*i*x + 1").unwrap();
        assert_eq!(sys.coefficient_kind, CoefficientKind::Real);
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse_system("variables: x, y, z\n(x+y)*z"),
            Err(ExprError::NonSquare { variables: 3, equations: 1 })
        );
        assert_eq!(
            parse_system("variables: x\nx + q"),
            Err(ExprError::UndeclaredIdentifier { name: "q".into(), line: 2, column: 5 })
        );
        assert!(matches!(
            parse_system("variables: x\nx + * 2"),
            Err(ExprError::Syntax { line: 2, column: 5, .. })
        ));
        assert!(matches!(parse_system("x + 1"), Err(ExprError::MissingVariables { .. })));
        assert!(matches!(
            parse_system("variables: x\nx/(1-1)"),
            Err(ExprError::ConstantDivisionByZero { line: 2, column: 2 })
        ));
        assert!(matches!(parse_system("variables: x\nx^2^3"), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse_system("variables: x\nparam a = x\nx"), Err(ExprError::UndeclaredIdentifier { .. })));
    }

    #[test]
    fn comments_and_blank_lines_are_skipped() {
        let sys = parse_system("# header\n\nvariables: x, y\n# eq 1\nx - y\n\nx + y - 2\n").unwrap();
        assert_eq!(sys.dim(), 2);
        assert_eq!(sys.expressions.len(), 2);
    }
}
