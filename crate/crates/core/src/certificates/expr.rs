//! Expression trees over rationals, π, one bound variable, + − × ÷ and √.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Rat(BigRational),
    Pi,
    Var,
    Named(&'static str, Expr),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Neg(Expr),
    Sqrt(Expr),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr(Arc<Node>);

impl Expr {
    fn node(n: Node) -> Expr {
        Expr(Arc::new(n))
    }

    pub fn get(&self) -> &Node {
        &self.0
    }

    pub fn rat(r: BigRational) -> Expr {
        Expr::node(Node::Rat(r))
    }

    pub fn int(n: i64) -> Expr {
        Expr::rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn frac(n: i64, d: i64) -> Expr {
        Expr::rat(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    /// Exact value of a decimal literal such as "11.1962" or "-0.5".
    pub fn dec(s: &str) -> Expr {
        Expr::rat(parse_decimal(s).unwrap_or_else(|| panic!("bad decimal literal {s:?}")))
    }

    pub fn pi() -> Expr {
        Expr::node(Node::Pi)
    }

    pub fn var() -> Expr {
        Expr::node(Node::Var)
    }

    pub fn named(name: &'static str, e: Expr) -> Expr {
        Expr::node(Node::Named(name, e))
    }

    pub fn sqrt(&self) -> Expr {
        Expr::node(Node::Sqrt(self.clone()))
    }

    pub fn as_rat(&self) -> Option<&BigRational> {
        match self.get() {
            Node::Rat(r) => Some(r),
            _ => None,
        }
    }

    fn is_zero(&self) -> bool {
        self.as_rat().is_some_and(|r| r.is_zero())
    }

    fn is_one(&self) -> bool {
        self.as_rat().is_some_and(|r| r.is_one())
    }

    pub fn has_var(&self) -> bool {
        match self.get() {
            Node::Rat(_) | Node::Pi => false,
            Node::Var => true,
            Node::Named(_, e) | Node::Neg(e) | Node::Sqrt(e) => e.has_var(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => a.has_var() || b.has_var(),
        }
    }

    fn s_add(a: Expr, b: Expr) -> Expr {
        if a.is_zero() {
            b
        } else if b.is_zero() {
            a
        } else {
            Expr::node(Node::Add(a, b))
        }
    }

    fn s_sub(a: Expr, b: Expr) -> Expr {
        if b.is_zero() {
            a
        } else if a.is_zero() {
            Expr::s_neg(b)
        } else {
            Expr::node(Node::Sub(a, b))
        }
    }

    fn s_mul(a: Expr, b: Expr) -> Expr {
        if a.is_zero() || b.is_zero() {
            Expr::int(0)
        } else if a.is_one() {
            b
        } else if b.is_one() {
            a
        } else {
            Expr::node(Node::Mul(a, b))
        }
    }

    fn s_div(a: Expr, b: Expr) -> Expr {
        if a.is_zero() {
            Expr::int(0)
        } else if b.is_one() {
            a
        } else {
            Expr::node(Node::Div(a, b))
        }
    }

    fn s_neg(a: Expr) -> Expr {
        match a.get() {
            Node::Rat(r) => Expr::rat(-r.clone()),
            Node::Neg(inner) => inner.clone(),
            _ => Expr::node(Node::Neg(a)),
        }
    }

    /// Derivative with respect to the bound variable, with zero/one folding.
    pub fn derivative(&self) -> Expr {
        if !self.has_var() {
            return Expr::int(0);
        }
        match self.get() {
            Node::Rat(_) | Node::Pi => Expr::int(0),
            Node::Var => Expr::int(1),
            Node::Named(_, e) => e.derivative(),
            Node::Add(a, b) => Expr::s_add(a.derivative(), b.derivative()),
            Node::Sub(a, b) => Expr::s_sub(a.derivative(), b.derivative()),
            Node::Mul(a, b) => {
                Expr::s_add(Expr::s_mul(a.derivative(), b.clone()), Expr::s_mul(a.clone(), b.derivative()))
            }
            Node::Div(a, b) => {
                let first = Expr::s_div(a.derivative(), b.clone());
                let db = b.derivative();
                if db.is_zero() {
                    first
                } else {
                    Expr::s_sub(first, Expr::s_div(Expr::s_mul(a.clone(), db), Expr::s_mul(b.clone(), b.clone())))
                }
            }
            Node::Neg(a) => Expr::s_neg(a.derivative()),
            Node::Sqrt(a) => Expr::s_div(a.derivative(), Expr::s_mul(Expr::int(2), self.clone())),
        }
    }
}

pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    if n.is_negative() {
        return None;
    }
    let d = num_traits::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(n, d);
    Some(if neg { -r } else { r })
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::node(Node::Add(self, rhs))
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::node(Node::Sub(self, rhs))
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::node(Node::Mul(self, rhs))
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::node(Node::Div(self, rhs))
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::node(Node::Neg(self))
    }
}

macro_rules! int_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<i64> for Expr {
            type Output = Expr;
            fn $m(self, rhs: i64) -> Expr { $tr::$m(self, Expr::int(rhs)) }
        }
        impl $tr<Expr> for i64 {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr { $tr::$m(Expr::int(self), rhs) }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr { $tr::$m(self, rhs.clone()) }
        }
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr { $tr::$m(self.clone(), rhs.clone()) }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr { $tr::$m(self.clone(), rhs) }
        }
        impl $tr<i64> for &Expr {
            type Output = Expr;
            fn $m(self, rhs: i64) -> Expr { $tr::$m(self.clone(), Expr::int(rhs)) }
        }
        impl $tr<&Expr> for i64 {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr { $tr::$m(Expr::int(self), rhs.clone()) }
        }
    )*};
}

int_ops!(Add add, Sub sub, Mul mul, Div div);

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.get() {
            Node::Rat(r) => write!(f, "{r}"),
            Node::Pi => write!(f, "π"),
            Node::Var => write!(f, "x"),
            Node::Named(n, _) => write!(f, "{n}"),
            Node::Add(a, b) => write!(f, "({a} + {b})"),
            Node::Sub(a, b) => write!(f, "({a} - {b})"),
            Node::Mul(a, b) => write!(f, "{a}·{b}"),
            Node::Div(a, b) => write!(f, "{a}/{b}"),
            Node::Neg(a) => write!(f, "-{a}"),
            Node::Sqrt(a) => write!(f, "√{a}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse_decimal("11.1962").unwrap(), BigRational::new(111962.into(), 10000.into()));
        assert_eq!(parse_decimal("-0.5").unwrap(), BigRational::new((-1).into(), 2.into()));
        assert!(parse_decimal("abc").is_none());
    }

    #[test]
    fn derivative_of_polynomial() {
        let x = Expr::var();
        let p = &x * &x * 3 + &x * 2 + 1;
        assert!(p.derivative().has_var());
        assert!(
            p.derivative().derivative().derivative().is_zero() || !p.derivative().derivative().derivative().has_var()
        );
    }
}
