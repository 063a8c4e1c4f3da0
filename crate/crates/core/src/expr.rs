//! Small arithmetic expression language for system definitions.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := atom ('^' unary)?
//! atom    := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Functions: `exp`, `ln`, `sqrt`, `sin`, `cos`, `abs`, `sgn`, `pow(a, b)`.
//! Constants: `pi`, `e`. The unicode operators `−`, `×`, `÷` and the name
//! `τ` (an alias of `tau`) are accepted.
//!
//! ```
//! use fractal_calc::expr::Expr;
//!
//! let e: Expr = "2 - exp(-tau)".parse().unwrap();
//! let v = e.bind(&["tau"]).unwrap();
//! assert_eq!(v.eval(&[0.0]), 1.0);
//! let dv = e.derivative("tau").bind(&["tau"]).unwrap();
//! assert_eq!(dv.eval(&[0.0]), 1.0);
//! ```

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
    Sin,
    Cos,
    Abs,
    Sgn,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "abs" => Func::Abs,
            "sgn" | "sign" => Func::Sgn,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Abs => "abs",
            Func::Sgn => "sgn",
        }
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Exp => x.exp(),
            Func::Ln => x.ln(),
            Func::Sqrt => x.sqrt(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Abs => x.abs(),
            Func::Sgn => {
                if x > 0.0 {
                    1.0
                } else if x < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

fn canonical_var(name: &str) -> &str {
    match name {
        "τ" => "tau",
        other => other,
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        match p.peek() {
            None => Ok(e),
            Some(tok) => Err(Error::Expr(format!("unexpected '{tok}' in \"{src}\""))),
        }
    }

    /// Variable names in order of first appearance.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Expr::Neg(a) | Expr::Call(_, a) => a.collect_vars(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Resolves variable names against `vars` (slot order of `eval`).
    pub fn bind(&self, vars: &[&str]) -> Result<Compiled> {
        let node = self.compile(vars)?;
        Ok(Compiled {
            node: Arc::new(node),
            arity: vars.len(),
        })
    }

    fn compile(&self, vars: &[&str]) -> Result<Node> {
        let c = |e: &Expr| e.compile(vars).map(Box::new);
        Ok(match self {
            Expr::Num(x) => Node::Num(*x),
            Expr::Var(name) => {
                let slot = vars.iter().position(|v| canonical_var(v) == name);
                match (slot, name.as_str()) {
                    (Some(i), _) => Node::Var(i),
                    (None, "pi") => Node::Num(std::f64::consts::PI),
                    (None, "e") => Node::Num(std::f64::consts::E),
                    (None, _) => {
                        return Err(Error::Expr(format!(
                            "unknown variable '{name}' (allowed: {})",
                            vars.join(", ")
                        )))
                    }
                }
            }
            Expr::Neg(a) => Node::Neg(c(a)?),
            Expr::Add(a, b) => Node::Bin(Op::Add, c(a)?, c(b)?),
            Expr::Sub(a, b) => Node::Bin(Op::Sub, c(a)?, c(b)?),
            Expr::Mul(a, b) => Node::Bin(Op::Mul, c(a)?, c(b)?),
            Expr::Div(a, b) => Node::Bin(Op::Div, c(a)?, c(b)?),
            Expr::Pow(a, b) => Node::Bin(Op::Pow, c(a)?, c(b)?),
            Expr::Call(f, a) => Node::Call(*f, c(a)?),
        })
    }

    fn is_num(&self, x: f64) -> bool {
        matches!(self, Expr::Num(v) if *v == x)
    }

    fn depends_on(&self, var: &str) -> bool {
        self.variables().iter().any(|v| v == var)
    }

    /// Symbolic partial derivative with respect to `var`.
    pub fn derivative(&self, var: &str) -> Expr {
        let var = canonical_var(var);
        let d = |e: &Expr| e.derivative(var);
        match self {
            Expr::Num(_) => Expr::Num(0.0),
            Expr::Var(v) => Expr::Num(if v == var { 1.0 } else { 0.0 }),
            Expr::Neg(a) => neg(d(a)),
            Expr::Add(a, b) => add(d(a), d(b)),
            Expr::Sub(a, b) => sub(d(a), d(b)),
            Expr::Mul(a, b) => add(mul(d(a), (**b).clone()), mul((**a).clone(), d(b))),
            Expr::Div(a, b) => div(
                sub(mul(d(a), (**b).clone()), mul((**a).clone(), d(b))),
                pow((**b).clone(), Expr::Num(2.0)),
            ),
            Expr::Pow(a, b) => {
                if !b.depends_on(var) {
                    // b a^(b-1) a'
                    mul(
                        mul((**b).clone(), pow((**a).clone(), sub((**b).clone(), Expr::Num(1.0)))),
                        d(a),
                    )
                } else {
                    // a^b (b' ln a + b a' / a)
                    mul(
                        self.clone(),
                        add(
                            mul(d(b), call(Func::Ln, (**a).clone())),
                            div(mul((**b).clone(), d(a)), (**a).clone()),
                        ),
                    )
                }
            }
            Expr::Call(f, a) => {
                let inner = d(a);
                let outer = match f {
                    Func::Exp => self.clone(),
                    Func::Ln => div(Expr::Num(1.0), (**a).clone()),
                    Func::Sqrt => div(Expr::Num(0.5), self.clone()),
                    Func::Sin => call(Func::Cos, (**a).clone()),
                    Func::Cos => neg(call(Func::Sin, (**a).clone())),
                    Func::Abs => call(Func::Sgn, (**a).clone()),
                    Func::Sgn => Expr::Num(0.0),
                };
                mul(outer, inner)
            }
        }
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(x) => Expr::Num(-x),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Num(x), Expr::Num(y)) => Expr::Num(x + y),
        _ if a.is_num(0.0) => b,
        _ if b.is_num(0.0) => a,
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Num(x), Expr::Num(y)) => Expr::Num(x - y),
        _ if b.is_num(0.0) => a,
        _ if a.is_num(0.0) => neg(b),
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Num(x), Expr::Num(y)) => Expr::Num(x * y),
        _ if a.is_num(0.0) || b.is_num(0.0) => Expr::Num(0.0),
        _ if a.is_num(1.0) => b,
        _ if b.is_num(1.0) => a,
        _ => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        _ if a.is_num(0.0) => Expr::Num(0.0),
        _ if b.is_num(1.0) => a,
        _ => Expr::Div(Box::new(a), Box::new(b)),
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        _ if b.is_num(1.0) => a,
        _ if b.is_num(0.0) => Expr::Num(1.0),
        _ => Expr::Pow(Box::new(a), Box::new(b)),
    }
}

fn call(f: Func, a: Expr) -> Expr {
    match a {
        Expr::Num(x) => Expr::Num(f.apply(x)),
        other => Expr::Call(f, Box::new(other)),
    }
}

impl FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Expr::parse(s)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(x) => write!(f, "{x}"),
            Expr::Var(v) => f.write_str(v),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b) => write!(f, "({a} ^ {b})"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug)]
enum Node {
    Num(f64),
    Var(usize),
    Neg(Box<Node>),
    Bin(Op, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

impl Node {
    fn eval(&self, vals: &[f64]) -> f64 {
        match self {
            Node::Num(x) => *x,
            Node::Var(i) => vals[*i],
            Node::Neg(a) => -a.eval(vals),
            Node::Bin(op, a, b) => {
                let (x, y) = (a.eval(vals), b.eval(vals));
                match op {
                    Op::Add => x + y,
                    Op::Sub => x - y,
                    Op::Mul => x * y,
                    Op::Div => x / y,
                    Op::Pow => match y {
                        2.0 => x * x,
                        _ if y.fract() == 0.0 && y.abs() <= 64.0 => x.powi(y as i32),
                        _ => x.powf(y),
                    },
                }
            }
            Node::Call(f, a) => f.apply(a.eval(vals)),
        }
    }
}

/// Expression with variables resolved to argument slots. Cheap to clone.
#[derive(Debug, Clone)]
pub struct Compiled {
    node: Arc<Node>,
    arity: usize,
}

impl Compiled {
    /// Evaluates with `vals[i]` bound to the `i`-th name given to `bind`.
    pub fn eval(&self, vals: &[f64]) -> f64 {
        assert_eq!(vals.len(), self.arity, "wrong number of arguments");
        self.node.eval(vals)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Sym(char),
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Num(x) => write!(f, "{x}"),
            Token::Ident(s) => f.write_str(s),
            Token::Sym(c) => write!(f, "{c}"),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
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
            let value = text
                .parse::<f64>()
                .map_err(|_| Error::Expr(format!("bad number '{text}'")))?;
            out.push(Token::Num(value));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else {
            let sym = match c {
                '+' | '-' | '*' | '/' | '^' | '(' | ')' | ',' => c,
                '−' => '-',
                '×' | '·' => '*',
                '÷' => '/',
                _ => return Err(Error::Expr(format!("unexpected character '{c}'"))),
            };
            out.push(Token::Sym(sym));
            i += 1;
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, sym: char) -> bool {
        if self.peek() == Some(&Token::Sym(sym)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: char) -> Result<()> {
        if self.eat(sym) {
            Ok(())
        } else {
            Err(Error::Expr(match self.peek() {
                Some(tok) => format!("expected '{sym}', found '{tok}'"),
                None => format!("expected '{sym}' at end of input"),
            }))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let tok = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| Error::Expr("unexpected end of input".into()))?;
        self.pos += 1;
        match tok {
            Token::Num(x) => Ok(Expr::Num(x)),
            Token::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Token::Ident(name) if self.eat('(') => {
                let mut args = vec![self.expr()?];
                while self.eat(',') {
                    args.push(self.expr()?);
                }
                self.expect(')')?;
                match (name.as_str(), args.len()) {
                    ("pow", 2) => {
                        let b = args.pop().expect("two args");
                        let a = args.pop().expect("two args");
                        Ok(Expr::Pow(Box::new(a), Box::new(b)))
                    }
                    (_, 1) => match Func::from_name(&name) {
                        Some(f) => Ok(Expr::Call(f, Box::new(args.pop().expect("one arg")))),
                        None => Err(Error::Expr(format!("unknown function '{name}'"))),
                    },
                    _ => Err(Error::Expr(format!(
                        "function '{name}' does not take {} arguments",
                        args.len()
                    ))),
                }
            }
            Token::Ident(name) => Ok(Expr::Var(canonical_var(&name).to_string())),
            Token::Sym(c) => Err(Error::Expr(format!("unexpected '{c}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn eval(src: &str, vars: &[&str], vals: &[f64]) -> f64 {
        Expr::parse(src).unwrap().bind(vars).unwrap().eval(vals)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("1 + 2 * 3", &[], &[]), 7.0);
        assert_eq!(eval("(1 + 2) * 3", &[], &[]), 9.0);
        assert_eq!(eval("2 ^ 3 ^ 2", &[], &[]), 512.0);
        assert_eq!(eval("-2 ^ 2", &[], &[]), -4.0);
        assert_eq!(eval("8 / 4 / 2", &[], &[]), 1.0);
        assert_eq!(eval("10 - 4 - 3", &[], &[]), 3.0);
        assert_eq!(eval("2e-3 * 1E3", &[], &[]), 2.0);
    }

    #[test]
    fn variables_functions_and_unicode() {
        assert_relative_eq!(eval("2 − exp(−τ)", &["tau"], &[1.0]), 2.0 - (-1f64).exp());
        assert_eq!(eval("y × z ÷ 2", &["y", "z"], &[3.0, 4.0]), 6.0);
        assert_eq!(eval("sgn(y) * abs(y)", &["y"], &[-3.0]), -3.0);
        assert_eq!(eval("pow(y, 3)", &["y"], &[2.0]), 8.0);
        assert_relative_eq!(eval("sin(pi / 2) + cos(0) + ln(e)", &[], &[]), 3.0);
        assert_eq!(eval("sqrt(16)", &[], &[]), 4.0);
    }

    #[test]
    fn errors() {
        assert!(Expr::parse("1 +").is_err());
        assert!(Expr::parse("(1 + 2").is_err());
        assert!(Expr::parse("foo(1)").is_err());
        assert!(Expr::parse("1 $ 2").is_err());
        assert!(Expr::parse("pow(1)").is_err());
        assert!(Expr::parse("1 2").is_err());
        assert!(Expr::parse("x").unwrap().bind(&["y"]).is_err());
    }

    #[test]
    fn symbolic_derivatives_match_finite_differences() {
        let cases = [
            "y^3 - 2*y",
            "exp(-y) * sin(y)",
            "y / (1 + y^2)",
            "sqrt(1 + y^2)",
            "pow(y, y)",
            "ln(2 + cos(y))",
            "abs(y) * y",
        ];
        for src in cases {
            let e = Expr::parse(src).unwrap();
            let f = e.bind(&["y"]).unwrap();
            let df = e.derivative("y").bind(&["y"]).unwrap();
            for y in [0.3, 0.9, 1.7] {
                let h = 1e-6;
                let fd = (f.eval(&[y + h]) - f.eval(&[y - h])) / (2.0 * h);
                assert_relative_eq!(df.eval(&[y]), fd, max_relative = 1e-6, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn derivative_of_identity_is_exactly_one() {
        let d = Expr::parse("y").unwrap().derivative("y");
        assert_eq!(d, Expr::Num(1.0));
        let d = Expr::parse("1").unwrap().derivative("y");
        assert_eq!(d, Expr::Num(0.0));
    }

    #[test]
    fn display_round_trips() {
        let e = Expr::parse("-(y + 2) * z ^ 2 / exp(tau)").unwrap();
        let again = Expr::parse(&e.to_string()).unwrap();
        let vars = ["tau", "y", "z"];
        let vals = [0.3, -1.2, 2.5];
        assert_eq!(
            e.bind(&vars).unwrap().eval(&vals),
            again.bind(&vars).unwrap().eval(&vals)
        );
    }
}
