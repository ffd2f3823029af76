//! Outward-rounded interval evaluation of [`Expr`] with two backends:
//! double precision with exact-error detection, and BigInt fixed point.
//!
//! Subexpressions that are affine in the bound variable with rational
//! coefficients are folded exactly before any rounding happens, so that
//! e.g. `1 − 3x` at `x = 1/3` is exactly zero.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::expr::{Expr, Node};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("square root of an enclosure reaching below zero")]
    SqrtDomain,
    #[error("division by an enclosure containing zero")]
    DivisionByZero,
    #[error("expression has a free variable but no domain was given")]
    FreeVariable,
    #[error("non-finite intermediate")]
    Overflow,
}

/// Working precision: hardware doubles, or fixed point with the given
/// number of fractional bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Precision {
    Double,
    Fixed(u32),
}

impl Precision {
    pub fn from_bits(bits: u32) -> Precision {
        if bits <= 53 {
            Precision::Double
        } else {
            Precision::Fixed(bits)
        }
    }

    pub fn bits(self) -> u32 {
        match self {
            Precision::Double => 53,
            Precision::Fixed(b) => b,
        }
    }

    /// The next coarser precision in the halving ladder.
    fn coarser(self) -> Option<Precision> {
        match self {
            Precision::Double => None,
            Precision::Fixed(b) if b / 2 > 53 => Some(Precision::Fixed(b / 2)),
            Precision::Fixed(_) => Some(Precision::Double),
        }
    }
}

/// Closed rational interval known to contain the true value.
#[derive(Debug, Clone, PartialEq)]
pub struct Enclosure {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Enclosure {
    pub fn point(r: BigRational) -> Enclosure {
        Enclosure { lo: r.clone(), hi: r }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, r: &BigRational) -> bool {
        &self.lo <= r && r <= &self.hi
    }

    pub fn is_subset_of(&self, other: &Enclosure) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn intersect(&self, other: &Enclosure) -> Enclosure {
        Enclosure { lo: (&self.lo).max(&other.lo).clone(), hi: (&self.hi).min(&other.hi).clone() }
    }

    pub fn neg(&self) -> Enclosure {
        Enclosure { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn lo_f64(&self) -> f64 {
        rat_down(&self.lo)
    }

    pub fn hi_f64(&self) -> f64 {
        rat_up(&self.hi)
    }
}

pub fn next_up(x: f64) -> f64 {
    if x.is_nan() || x == f64::INFINITY {
        return x;
    }
    if x == 0.0 {
        return f64::from_bits(1);
    }
    let b = x.to_bits();
    f64::from_bits(if x > 0.0 { b + 1 } else { b - 1 })
}

pub fn next_down(x: f64) -> f64 {
    -next_up(-x)
}

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// Largest double not above `r`.
pub fn rat_down(r: &BigRational) -> f64 {
    let mut f = r.to_f64().unwrap_or(f64::NAN);
    if !f.is_finite() {
        return if r.is_negative() { f64::NEG_INFINITY } else { f64::MAX };
    }
    while exact(f) > *r {
        f = next_down(f);
    }
    while f < f64::MAX && exact(next_up(f)) <= *r {
        f = next_up(f);
    }
    f
}

/// Smallest double not below `r`.
pub fn rat_up(r: &BigRational) -> f64 {
    -rat_down(&-r)
}

pub trait Backend: Sync {
    type I: Clone + Send;
    fn rat_range(&self, lo: &BigRational, hi: &BigRational) -> Self::I;
    fn pi(&self) -> Self::I;
    fn add(&self, a: &Self::I, b: &Self::I) -> Self::I;
    fn sub(&self, a: &Self::I, b: &Self::I) -> Self::I;
    fn mul(&self, a: &Self::I, b: &Self::I) -> Self::I;
    fn div(&self, a: &Self::I, b: &Self::I) -> Result<Self::I, EvalError>;
    fn neg(&self, a: &Self::I) -> Self::I;
    fn sqrt(&self, a: &Self::I) -> Result<Self::I, EvalError>;
    fn enclosure(&self, a: &Self::I) -> Result<Enclosure, EvalError>;
}

/// Double-precision intervals. Each endpoint is the round-to-nearest
/// result, moved one ulp outward only when the exact error term (TwoSum
/// or fused multiply-add) shows the rounding went inward.
#[derive(Debug, Clone, Copy, Default)]
pub struct F64Backend;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F64I {
    pub lo: f64,
    pub hi: f64,
}

/// Rounded value and sign of (exact − rounded).
fn sum_err(a: f64, b: f64) -> (f64, Ordering) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e.partial_cmp(&0.0).unwrap_or(Ordering::Equal))
}

fn prod_err(a: f64, b: f64) -> (f64, Ordering) {
    let p = a * b;
    if p == 0.0 && a != 0.0 && b != 0.0 {
        // Underflow to zero: the sign of the exact product decides.
        let s = if (a < 0.0) != (b < 0.0) { Ordering::Less } else { Ordering::Greater };
        return (p, s);
    }
    let e = a.mul_add(b, -p);
    (p, e.partial_cmp(&0.0).unwrap_or(Ordering::Equal))
}

fn quot_err(a: f64, b: f64) -> (f64, Ordering) {
    let q = a / b;
    let r = (-q).mul_add(b, a);
    let sign = r.partial_cmp(&0.0).unwrap_or(Ordering::Equal);
    (q, if b < 0.0 { sign.reverse() } else { sign })
}

fn down((v, err): (f64, Ordering)) -> f64 {
    if err == Ordering::Less || (v != 0.0 && v.abs() < 1e-290) {
        next_down(v)
    } else {
        v
    }
}

fn up((v, err): (f64, Ordering)) -> f64 {
    if err == Ordering::Greater || (v != 0.0 && v.abs() < 1e-290) {
        next_up(v)
    } else {
        v
    }
}

impl Backend for F64Backend {
    type I = F64I;

    fn rat_range(&self, lo: &BigRational, hi: &BigRational) -> F64I {
        F64I { lo: rat_down(lo), hi: rat_up(hi) }
    }

    fn pi(&self) -> F64I {
        // The double nearest π lies below it.
        F64I { lo: std::f64::consts::PI, hi: next_up(std::f64::consts::PI) }
    }

    fn add(&self, a: &F64I, b: &F64I) -> F64I {
        F64I { lo: down(sum_err(a.lo, b.lo)), hi: up(sum_err(a.hi, b.hi)) }
    }

    fn sub(&self, a: &F64I, b: &F64I) -> F64I {
        self.add(a, &self.neg(b))
    }

    fn mul(&self, a: &F64I, b: &F64I) -> F64I {
        let ps = [(a.lo, b.lo), (a.lo, b.hi), (a.hi, b.lo), (a.hi, b.hi)];
        let lo = ps.iter().map(|&(x, y)| down(prod_err(x, y))).fold(f64::INFINITY, f64::min);
        let hi = ps.iter().map(|&(x, y)| up(prod_err(x, y))).fold(f64::NEG_INFINITY, f64::max);
        F64I { lo, hi }
    }

    fn div(&self, a: &F64I, b: &F64I) -> Result<F64I, EvalError> {
        if b.lo <= 0.0 && b.hi >= 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        let qs = [(a.lo, b.lo), (a.lo, b.hi), (a.hi, b.lo), (a.hi, b.hi)];
        let lo = qs.iter().map(|&(x, y)| down(quot_err(x, y))).fold(f64::INFINITY, f64::min);
        let hi = qs.iter().map(|&(x, y)| up(quot_err(x, y))).fold(f64::NEG_INFINITY, f64::max);
        Ok(F64I { lo, hi })
    }

    fn neg(&self, a: &F64I) -> F64I {
        F64I { lo: -a.hi, hi: -a.lo }
    }

    fn sqrt(&self, a: &F64I) -> Result<F64I, EvalError> {
        if a.lo < 0.0 {
            return Err(EvalError::SqrtDomain);
        }
        let root = |x: f64| {
            let s = x.sqrt();
            let r = (-s).mul_add(s, x);
            (s, r.partial_cmp(&0.0).unwrap_or(Ordering::Equal))
        };
        Ok(F64I { lo: down(root(a.lo)), hi: up(root(a.hi)) })
    }

    fn enclosure(&self, a: &F64I) -> Result<Enclosure, EvalError> {
        if !(a.lo.is_finite() && a.hi.is_finite()) {
            return Err(EvalError::Overflow);
        }
        Ok(Enclosure { lo: exact(a.lo), hi: exact(a.hi) })
    }
}

/// Fixed point: an interval of integers scaled by 2^−bits.
#[derive(Debug, Clone)]
pub struct FixedBackend {
    bits: u32,
    one: BigInt,
    pi: FixI,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixI {
    pub lo: BigInt,
    pub hi: BigInt,
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

/// Rigorous enclosure of atan(1/m)·2^w via the alternating series with floored terms.
fn atan_inv(m: u64, w: u32) -> (BigInt, BigInt) {
    let m = BigInt::from(m);
    let m2 = &m * &m;
    let mut x = (BigInt::one() << w as usize).div_floor(&m);
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !x.is_zero() {
        let t = x.div_floor(&BigInt::from(2 * k + 1));
        if k % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
        x = x.div_floor(&m2);
        k += 1;
    }
    // Each floor loses < 1, and the omitted tail is < 1.
    let slack = BigInt::from(k + 1);
    (&sum - &slack, &sum + &slack)
}

impl FixedBackend {
    pub fn new(bits: u32) -> FixedBackend {
        let guard = 16;
        let w = bits + guard;
        let (a_lo, a_hi) = atan_inv(5, w);
        let (b_lo, b_hi) = atan_inv(239, w);
        let lo = BigInt::from(16) * a_lo - BigInt::from(4) * b_hi;
        let hi = BigInt::from(16) * a_hi - BigInt::from(4) * b_lo;
        let d = BigInt::one() << guard as usize;
        let pi = FixI { lo: lo.div_floor(&d), hi: ceil_div(&hi, &d) };
        FixedBackend { bits, one: BigInt::one() << bits as usize, pi }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }
}

impl Backend for FixedBackend {
    type I = FixI;

    fn rat_range(&self, lo: &BigRational, hi: &BigRational) -> FixI {
        FixI { lo: (lo.numer() * &self.one).div_floor(lo.denom()), hi: ceil_div(&(hi.numer() * &self.one), hi.denom()) }
    }

    fn pi(&self) -> FixI {
        self.pi.clone()
    }

    fn add(&self, a: &FixI, b: &FixI) -> FixI {
        FixI { lo: &a.lo + &b.lo, hi: &a.hi + &b.hi }
    }

    fn sub(&self, a: &FixI, b: &FixI) -> FixI {
        FixI { lo: &a.lo - &b.hi, hi: &a.hi - &b.lo }
    }

    fn mul(&self, a: &FixI, b: &FixI) -> FixI {
        let ps = [&a.lo * &b.lo, &a.lo * &b.hi, &a.hi * &b.lo, &a.hi * &b.hi];
        let lo = ps.iter().min().expect("four products");
        let hi = ps.iter().max().expect("four products");
        FixI { lo: lo.div_floor(&self.one), hi: ceil_div(hi, &self.one) }
    }

    fn div(&self, a: &FixI, b: &FixI) -> Result<FixI, EvalError> {
        if !b.lo.is_positive() && !b.hi.is_negative() {
            return Err(EvalError::DivisionByZero);
        }
        let mut lo: Option<BigInt> = None;
        let mut hi: Option<BigInt> = None;
        for x in [&a.lo, &a.hi] {
            for y in [&b.lo, &b.hi] {
                let num = x * &self.one;
                let (num, den) = if y.is_negative() { (-num, -y) } else { (num, y.clone()) };
                let f = num.div_floor(&den);
                let c = ceil_div(&num, &den);
                lo = Some(lo.map_or(f.clone(), |l| l.min(f)));
                hi = Some(hi.map_or(c.clone(), |h| h.max(c)));
            }
        }
        Ok(FixI { lo: lo.expect("set"), hi: hi.expect("set") })
    }

    fn neg(&self, a: &FixI) -> FixI {
        FixI { lo: -&a.hi, hi: -&a.lo }
    }

    fn sqrt(&self, a: &FixI) -> Result<FixI, EvalError> {
        if a.lo.is_negative() {
            return Err(EvalError::SqrtDomain);
        }
        let lo = (&a.lo * &self.one).sqrt();
        let hn = &a.hi * &self.one;
        let mut hi = hn.sqrt();
        if &hi * &hi < hn {
            hi += 1;
        }
        Ok(FixI { lo, hi })
    }

    fn enclosure(&self, a: &FixI) -> Result<Enclosure, EvalError> {
        Ok(Enclosure {
            lo: BigRational::new(a.lo.clone(), self.one.clone()),
            hi: BigRational::new(a.hi.clone(), self.one.clone()),
        })
    }
}

/// c0 + c1·x with rational coefficients.
#[derive(Debug, Clone)]
struct Affine {
    c0: BigRational,
    c1: BigRational,
}

enum Val<I> {
    Exact(Affine),
    Approx(I),
}

struct Evaluator<'a, B: Backend> {
    be: &'a B,
    domain: Option<(&'a BigRational, &'a BigRational)>,
}

impl<B: Backend> Evaluator<'_, B> {
    fn affine_range(&self, a: &Affine) -> Result<(BigRational, BigRational), EvalError> {
        if a.c1.is_zero() {
            return Ok((a.c0.clone(), a.c0.clone()));
        }
        let (lo, hi) = self.domain.ok_or(EvalError::FreeVariable)?;
        let at_lo = &a.c0 + &a.c1 * lo;
        let at_hi = &a.c0 + &a.c1 * hi;
        Ok(if at_lo <= at_hi { (at_lo, at_hi) } else { (at_hi, at_lo) })
    }

    fn approx(&self, v: Val<B::I>) -> Result<B::I, EvalError> {
        match v {
            Val::Approx(i) => Ok(i),
            Val::Exact(a) => {
                let (lo, hi) = self.affine_range(&a)?;
                Ok(self.be.rat_range(&lo, &hi))
            }
        }
    }

    fn eval(&self, e: &Expr) -> Result<Val<B::I>, EvalError> {
        use Val::*;
        Ok(match e.get() {
            Node::Rat(r) => Exact(Affine { c0: r.clone(), c1: BigRational::zero() }),
            Node::Var => {
                if self.domain.is_none() {
                    return Err(EvalError::FreeVariable);
                }
                Exact(Affine { c0: BigRational::zero(), c1: BigRational::one() })
            }
            Node::Pi => Approx(self.be.pi()),
            Node::Named(_, inner) => self.eval(inner)?,
            Node::Neg(a) => match self.eval(a)? {
                Exact(x) => Exact(Affine { c0: -x.c0, c1: -x.c1 }),
                Approx(i) => Approx(self.be.neg(&i)),
            },
            Node::Add(a, b) | Node::Sub(a, b) => {
                let sub = matches!(e.get(), Node::Sub(..));
                match (self.eval(a)?, self.eval(b)?) {
                    (Exact(x), Exact(y)) => {
                        if sub {
                            Exact(Affine { c0: x.c0 - y.c0, c1: x.c1 - y.c1 })
                        } else {
                            Exact(Affine { c0: x.c0 + y.c0, c1: x.c1 + y.c1 })
                        }
                    }
                    (x, y) => {
                        let (x, y) = (self.approx(x)?, self.approx(y)?);
                        Approx(if sub { self.be.sub(&x, &y) } else { self.be.add(&x, &y) })
                    }
                }
            }
            Node::Mul(a, b) => match (self.eval(a)?, self.eval(b)?) {
                (Exact(x), Exact(y)) if x.c1.is_zero() || y.c1.is_zero() => {
                    let (k, v) = if x.c1.is_zero() { (x.c0, y) } else { (y.c0, x) };
                    Exact(Affine { c0: &k * v.c0, c1: &k * v.c1 })
                }
                (x, y) => {
                    let (x, y) = (self.approx(x)?, self.approx(y)?);
                    Approx(self.be.mul(&x, &y))
                }
            },
            Node::Div(a, b) => match (self.eval(a)?, self.eval(b)?) {
                (Exact(x), Exact(y)) if y.c1.is_zero() => {
                    if y.c0.is_zero() {
                        return Err(EvalError::DivisionByZero);
                    }
                    Exact(Affine { c0: x.c0 / &y.c0, c1: x.c1 / &y.c0 })
                }
                (x, y) => {
                    let (x, y) = (self.approx(x)?, self.approx(y)?);
                    Approx(self.be.div(&x, &y)?)
                }
            },
            Node::Sqrt(a) => {
                let v = self.eval(a)?;
                if let Exact(x) = &v {
                    let (lo, _) = self.affine_range(x)?;
                    if lo.is_negative() {
                        return Err(EvalError::SqrtDomain);
                    }
                }
                let i = self.approx(v)?;
                Approx(self.be.sqrt(&i)?)
            }
        })
    }
}

/// Enclosure of `e` over `domain` (required iff `e` has the bound variable)
/// with one backend, no precision ladder.
pub fn eval_with<B: Backend>(
    be: &B,
    e: &Expr,
    domain: Option<(&BigRational, &BigRational)>,
) -> Result<Enclosure, EvalError> {
    let ev = Evaluator { be, domain };
    match ev.eval(e)? {
        Val::Exact(a) => {
            let (lo, hi) = ev.affine_range(&a)?;
            Ok(Enclosure { lo, hi })
        }
        Val::Approx(i) => be.enclosure(&i),
    }
}

/// Backends for a precision and all coarser ones in the halving ladder.
pub struct Ladder {
    double: F64Backend,
    fixed: Vec<FixedBackend>,
}

impl Ladder {
    pub fn new(p: Precision) -> Ladder {
        let mut fixed = Vec::new();
        let mut q = Some(p);
        while let Some(Precision::Fixed(b)) = q {
            fixed.push(FixedBackend::new(b));
            q = Precision::Fixed(b).coarser();
        }
        Ladder { double: F64Backend, fixed }
    }

    /// Enclosure at the ladder's precision, intersected with every coarser
    /// level, so that finer precisions always give nested enclosures.
    pub fn eval(&self, e: &Expr, domain: Option<(&BigRational, &BigRational)>) -> Result<Enclosure, EvalError> {
        let mut enc = eval_with(&self.double, e, domain);
        for be in self.fixed.iter().rev() {
            let fine = eval_with(be, e, domain);
            enc = match (enc, fine) {
                (Ok(a), Ok(b)) => Ok(a.intersect(&b)),
                (Err(_), Ok(b)) => Ok(b),
                (a, Err(_)) => a,
            };
        }
        enc
    }
}

/// Enclosure of a closed expression at the given precision.
pub fn eval_enclosure(e: &Expr, p: Precision) -> Result<Enclosure, EvalError> {
    Ladder::new(p).eval(e, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_plus_two_is_exact() {
        let e = Expr::int(2) + Expr::int(2);
        let enc = eval_enclosure(&e, Precision::Double).unwrap();
        assert_eq!(enc.lo, enc.hi);
        let e = Expr::int(2).sqrt() * Expr::int(2).sqrt();
        let enc = eval_enclosure(&e, Precision::Double).unwrap();
        assert!(enc.contains(&BigRational::from_integer(2.into())));
    }

    #[test]
    fn pi_enclosures() {
        let pi_str = "3.14159265358979323846264338327950288419716939937510";
        let pi = super::super::expr::parse_decimal(pi_str).unwrap();
        let tol = BigRational::new(1.into(), BigInt::from(10).pow(45));
        for p in [Precision::Double, Precision::Fixed(80), Precision::Fixed(160)] {
            let enc = eval_enclosure(&Expr::pi(), p).unwrap();
            let lo = &enc.lo - &tol;
            let hi = &enc.hi + &tol;
            assert!(lo <= pi && pi <= hi, "{p:?}");
        }
        let wide = eval_enclosure(&Expr::pi(), Precision::Fixed(160)).unwrap();
        assert!(wide.width() < BigRational::new(1.into(), BigInt::from(10).pow(45)));
    }

    #[test]
    fn outward_rounding_brackets_thirds() {
        let e = Expr::int(1) / Expr::int(3).sqrt();
        let enc = eval_enclosure(&e, Precision::Double).unwrap();
        // (1/√3)² = 1/3 must lie within the squared enclosure.
        let third = BigRational::new(1.into(), 3.into());
        assert!(&enc.lo * &enc.lo <= third && third <= &enc.hi * &enc.hi);
    }
}
