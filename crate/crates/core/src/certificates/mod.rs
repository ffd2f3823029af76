//! Rigorous checks of the numeric constants.
//!
//! Every claim is an item `lhs REL rhs`, either closed or over an interval
//! of the bound variable. Each side is an [`Expr`] evaluated with outward
//! rounding, so a PASS is a proof that the inequality holds, a FAIL proves
//! it does not, and MARGINAL means the enclosure was too wide to decide.

pub mod expr;
pub mod interval;
mod ledger;

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

pub use expr::Expr;
pub use interval::{eval_enclosure, Enclosure, EvalError, Ladder, Precision};
pub use ledger::{builtin_ledger, competitor_exprs, k8_expr, CompetitorExprs};

/// Environment variable overriding the escalation precision in bits.
pub const ESCALATION_ENV: &str = "QUADBUBBLE_ESCALATION_BITS";

/// Bisection depth at which an undecided range item is reported MARGINAL.
pub const MAX_DEPTH: u32 = 40;

/// Highest derivative order tried by the monotone-chain test.
pub const MAX_CHAIN_ORDER: usize = 4;

/// Tolerance for the geometric cross-check against the constructed cluster.
pub const CROSS_CHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Gt => ">",
            Relation::Ge => ">=",
            Relation::Lt => "<",
            Relation::Le => "<=",
        }
    }

    pub fn is_strict(self) -> bool {
        matches!(self, Relation::Gt | Relation::Lt)
    }

    pub fn is_upper(self) -> bool {
        matches!(self, Relation::Lt | Relation::Le)
    }
}

/// Essential items carry the proof; cosmetic items only check printed
/// intermediate decimals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ItemClass {
    Essential,
    Cosmetic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Marginal,
    Fail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Marginal => "MARGINAL",
            Status::Fail => "FAIL",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CertItem {
    pub name: String,
    pub lhs: Expr,
    pub relation: Relation,
    pub rhs: Expr,
    /// Closed interval of the bound variable for range items.
    pub domain: Option<(BigRational, BigRational)>,
    pub class: ItemClass,
    pub paper_ref: &'static str,
    /// Floating-point value of `lhs` computed from a constructed cluster.
    pub cross_check: Option<fn() -> Result<f64, String>>,
}

impl CertItem {
    pub fn scalar(name: &str, lhs: Expr, relation: Relation, rhs: Expr, class: ItemClass, role: &'static str) -> Self {
        CertItem { name: name.into(), lhs, relation, rhs, domain: None, class, paper_ref: role, cross_check: None }
    }

    pub fn range(
        name: &str,
        lhs: Expr,
        relation: Relation,
        rhs: Expr,
        domain: (BigRational, BigRational),
        class: ItemClass,
        role: &'static str,
    ) -> Self {
        CertItem {
            name: name.into(),
            lhs,
            relation,
            rhs,
            domain: Some(domain),
            class,
            paper_ref: role,
            cross_check: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ItemResult {
    pub name: String,
    pub status: Status,
    /// Enclosure of lhs − rhs. For range items: of its infimum over the
    /// domain for `>`/`>=`, of its supremum for `<`/`<=`.
    pub lo: f64,
    pub hi: f64,
    pub class: ItemClass,
    pub paper_ref: &'static str,
    pub relation: Relation,
    pub precision_bits: u32,
    pub escalated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip)]
    pub enclosure: Option<Enclosure>,
}

fn status_of(rel: Relation, d: &Enclosure) -> Status {
    let z = BigRational::zero();
    let (pass, fail) = match rel {
        Relation::Gt => (d.lo > z, d.hi <= z),
        Relation::Ge => (d.lo >= z, d.hi < z),
        Relation::Lt => (d.hi < z, d.lo >= z),
        Relation::Le => (d.hi <= z, d.lo > z),
    };
    if pass {
        Status::Pass
    } else if fail {
        Status::Fail
    } else {
        Status::Marginal
    }
}

/// Check one item at a given precision, without escalation.
pub fn check_item(item: &CertItem, precision: Precision) -> ItemResult {
    let ladder = Ladder::new(precision);
    let (status, enclosure, bounds, mut detail) = match &item.domain {
        None => {
            let diff = &item.lhs - &item.rhs;
            match ladder.eval(&diff, None) {
                Ok(enc) => (status_of(item.relation, &enc), Some(enc), None, None),
                Err(e) => (Status::Marginal, None, None, Some(e.to_string())),
            }
        }
        Some((a, b)) => {
            let out = check_range(&ladder, item, a, b);
            let enc = match (&out.lo, &out.hi) {
                (Some(lo), Some(hi)) => Some(Enclosure { lo: lo.clone(), hi: hi.clone() }),
                _ => None,
            };
            let bounds = (out.lo.map(|l| interval::rat_down(&l)), out.hi.map(|h| interval::rat_up(&h)));
            (out.status, enc, Some(bounds), out.detail)
        }
    };
    let mut status = status;
    if let Some(check) = item.cross_check {
        match (check(), ladder.eval(&item.lhs, None)) {
            (Ok(geo), Ok(enc)) => {
                let mid = (enc.lo_f64() + enc.hi_f64()) / 2.0;
                let err = (mid - geo).abs();
                if err > CROSS_CHECK_TOL * geo.abs().max(1.0) {
                    status = Status::Fail;
                    detail = Some(format!("geometric value {geo} differs from closed form {mid} by {err:e}"));
                }
            }
            (Err(e), _) => {
                status = Status::Fail;
                detail = Some(format!("cross-check construction failed: {e}"));
            }
            (_, Err(e)) => detail = Some(e.to_string()),
        }
    }
    let (lo, hi) = match (&enclosure, bounds) {
        (Some(e), _) => (e.lo_f64(), e.hi_f64()),
        (None, Some((lo, hi))) => (lo.unwrap_or(f64::NEG_INFINITY), hi.unwrap_or(f64::INFINITY)),
        (None, None) => (f64::NEG_INFINITY, f64::INFINITY),
    };
    ItemResult {
        name: item.name.clone(),
        status,
        lo,
        hi,
        class: item.class,
        paper_ref: item.paper_ref,
        relation: item.relation,
        precision_bits: precision.bits(),
        escalated: false,
        detail,
        enclosure,
    }
}

/// Range item: g = ±(lhs − rhs) must be ≥ 0 (or > 0) on [a, b].
struct RangeSearch<'a> {
    ladder: &'a Ladder,
    /// g and its derivatives up to the chain order.
    derivs: Vec<Expr>,
    strict: bool,
    /// Minimum over leaves of the lower bound of g; `None` once some leaf
    /// has no finite lower bound.
    inf_lo: Option<BigRational>,
    lo_known: bool,
    /// Minimum over sampled points of the upper bound of g.
    inf_hi: Option<BigRational>,
}

enum Leaf {
    Certified,
    Counterexample(BigRational),
    Undecided(BigRational, BigRational),
    Split(BigRational, BigRational, BigRational),
    Error(EvalError),
}

impl RangeSearch<'_> {
    fn on(&self, k: usize, a: &BigRational, b: &BigRational) -> Result<Enclosure, EvalError> {
        self.ladder.eval(&self.derivs[k], Some((a, b)))
    }

    fn ok(&self, lo: &BigRational, strict: bool) -> bool {
        if strict {
            lo.is_positive()
        } else {
            !lo.is_negative()
        }
    }

    fn record_lo(&mut self, lo: Option<BigRational>) {
        match lo {
            Some(lo) => {
                if self.inf_lo.as_ref().map_or(true, |m| lo < *m) {
                    self.inf_lo = Some(lo);
                }
            }
            None => self.lo_known = false,
        }
    }

    fn record_hi(&mut self, hi: BigRational) {
        if self.inf_hi.as_ref().map_or(true, |m| hi < *m) {
            self.inf_hi = Some(hi);
        }
    }

    /// Monotone chain anchored at `t`: sign-adjusted g⁽ʲ⁾(t) ≥ 0 for j < k
    /// and sign-adjusted g⁽ᵏ⁾ ≥ 0 on [a, b]. `flip` alternates the signs for
    /// a right anchor. Returns the enclosure of g(t) on success.
    fn chain(&self, a: &BigRational, b: &BigRational, t: &BigRational, flip: bool) -> Option<Enclosure> {
        let sign = |j: usize, e: Enclosure| if flip && j % 2 == 1 { e.neg() } else { e };
        let g_t = self.on(0, t, t).ok()?;
        if !self.ok(&g_t.lo, self.strict) {
            return None;
        }
        for k in 1..=MAX_CHAIN_ORDER.min(self.derivs.len() - 1) {
            let whole = self.on(k, a, b).ok().map(|e| sign(k, e));
            if whole.is_some_and(|e| !e.lo.is_negative()) {
                return Some(g_t);
            }
            let at = self.on(k, t, t).ok().map(|e| sign(k, e))?;
            if at.lo.is_negative() {
                return None;
            }
        }
        None
    }

    fn leaf(&mut self, a: BigRational, b: BigRational, depth: u32) -> Leaf {
        let direct = self.on(0, &a, &b);
        if let Ok(enc) = &direct {
            if self.ok(&enc.lo, self.strict) {
                self.record_lo(Some(enc.lo.clone()));
                self.record_hi(enc.hi.clone());
                return Leaf::Certified;
            }
        }
        for t in [&a, &b] {
            match self.on(0, t, t) {
                Ok(pt) => {
                    self.record_hi(pt.hi.clone());
                    let bad = if self.strict { !pt.hi.is_positive() } else { pt.hi.is_negative() };
                    if bad {
                        return Leaf::Counterexample(t.clone());
                    }
                }
                Err(e) => return Leaf::Error(e),
            }
        }
        for (t, flip) in [(&a, false), (&b, true)] {
            if let Some(g_t) = self.chain(&a, &b, t, flip) {
                self.record_lo(Some(g_t.lo));
                return Leaf::Certified;
            }
        }
        if depth >= MAX_DEPTH {
            self.record_lo(direct.ok().map(|e| e.lo));
            return Leaf::Undecided(a, b);
        }
        let mid = (&a + &b) / BigRational::from_integer(BigInt::from(2));
        Leaf::Split(a, mid, b)
    }
}

struct RangeOutcome {
    status: Status,
    /// Bounds on inf g (or sup(lhs − rhs) for upper relations), when known.
    lo: Option<BigRational>,
    hi: Option<BigRational>,
    detail: Option<String>,
}

/// Adaptive bisection, breadth first so that a shallow counterexample is
/// found before deep undecided branches are explored.
fn check_range(ladder: &Ladder, item: &CertItem, a: &BigRational, b: &BigRational) -> RangeOutcome {
    let g = if item.relation.is_upper() { &item.rhs - &item.lhs } else { &item.lhs - &item.rhs };
    let mut derivs = vec![g];
    for _ in 0..MAX_CHAIN_ORDER {
        let next = derivs.last().expect("nonempty").derivative();
        derivs.push(next);
    }
    let mut s =
        RangeSearch { ladder, derivs, strict: item.relation.is_strict(), inf_lo: None, lo_known: true, inf_hi: None };
    let mut queue = std::collections::VecDeque::from([(a.clone(), b.clone(), 0u32)]);
    let mut undecided = None;
    let mut verdict = None;
    while let Some((lo, hi, depth)) = queue.pop_front() {
        match s.leaf(lo, hi, depth) {
            Leaf::Certified => {}
            Leaf::Split(l, m, r) => {
                queue.push_back((l, m.clone(), depth + 1));
                queue.push_back((m, r, depth + 1));
            }
            Leaf::Undecided(l, r) => {
                undecided.get_or_insert((l, r));
            }
            Leaf::Counterexample(t) => {
                verdict = Some((Status::Fail, format!("violated at x = {t}")));
                break;
            }
            Leaf::Error(e) => {
                verdict = Some((Status::Marginal, e.to_string()));
                break;
            }
        }
    }
    // Unexplored or unbounded leaves leave the lower end open.
    let inf_lo = if verdict.is_none() && s.lo_known { s.inf_lo } else { None };
    let (status, detail) = match (verdict, undecided) {
        (Some((st, d)), _) => (st, Some(d)),
        (None, Some((l, r))) => (Status::Marginal, Some(format!("undecided on [{l}, {r}] at depth {MAX_DEPTH}"))),
        (None, None) => (Status::Pass, None),
    };
    let (lo, hi) =
        if item.relation.is_upper() { (s.inf_hi.map(|h| -h), inf_lo.map(|l| -l)) } else { (inf_lo, s.inf_hi) };
    RangeOutcome { status, lo, hi, detail }
}

/// Precision used to re-run MARGINAL items.
pub fn escalation_precision(base: Precision) -> Precision {
    let from_env = std::env::var(ESCALATION_ENV).ok().and_then(|v| v.trim().parse::<u32>().ok());
    Precision::from_bits(from_env.unwrap_or_else(|| (2 * base.bits()).max(106)))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub marginal: usize,
    pub fail: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertReport {
    pub items: Vec<ItemResult>,
    pub summary: Summary,
}

impl CertReport {
    fn from_items(mut items: Vec<ItemResult>) -> Self {
        items.sort_by(|a, b| a.name.cmp(&b.name));
        let mut summary = Summary::default();
        for r in &items {
            match r.status {
                Status::Pass => summary.pass += 1,
                Status::Marginal => summary.marginal += 1,
                Status::Fail => summary.fail += 1,
            }
        }
        CertReport { items, summary }
    }

    pub fn get(&self, name: &str) -> Option<&ItemResult> {
        self.items.iter().find(|r| r.name == name)
    }

    /// Essential items that did not pass.
    pub fn essential_findings(&self) -> Vec<&ItemResult> {
        self.items.iter().filter(|r| r.class == ItemClass::Essential && r.status != Status::Pass).collect()
    }

    /// Cosmetic items that did not pass.
    pub fn cosmetic_findings(&self) -> Vec<&ItemResult> {
        self.items.iter().filter(|r| r.class == ItemClass::Cosmetic && r.status != Status::Pass).collect()
    }

    /// 0 when everything passes, 1 on an essential finding, 2 when only
    /// cosmetic items are flagged.
    pub fn exit_code(&self) -> i32 {
        if !self.essential_findings().is_empty() {
            1
        } else if !self.cosmetic_findings().is_empty() {
            2
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ =
            writeln!(out, "{:<20} {:<9} {:<8} {:>4} {:>20} {:>20}  role", "item", "class", "status", "rel", "lo", "hi");
        for r in &self.items {
            let class = match r.class {
                ItemClass::Essential => "essential",
                ItemClass::Cosmetic => "cosmetic",
            };
            let _ = writeln!(
                out,
                "{:<20} {:<9} {:<8} {:>4} {:>20} {:>20}  {}",
                r.name,
                class,
                r.status.as_str(),
                r.relation.symbol(),
                r.enclosure.as_ref().map_or_else(|| sig_down(r.lo, 12), |e| sig_rational(&e.lo, 12, false)),
                r.enclosure.as_ref().map_or_else(|| sig_up(r.hi, 12), |e| sig_rational(&e.hi, 12, true)),
                r.paper_ref
            );
            if let Some(d) = &r.detail {
                let _ = writeln!(out, "    {d}");
            }
        }
        let s = self.summary;
        let _ = writeln!(out, "pass {}  marginal {}  fail {}", s.pass, s.marginal, s.fail);
        out
    }
}

/// `x` to `digits` significant digits, rounded toward −∞.
pub fn sig_down(x: f64, digits: usize) -> String {
    sig_directed(x, digits, false)
}

/// `x` to `digits` significant digits, rounded toward +∞.
pub fn sig_up(x: f64, digits: usize) -> String {
    sig_directed(x, digits, true)
}

fn sig_directed(x: f64, digits: usize, up: bool) -> String {
    match BigRational::from_float(x) {
        Some(r) => sig_rational(&r, digits, up),
        None => format!("{x}"),
    }
}

/// Exact rational to `digits` significant digits with directed rounding.
pub fn sig_rational(r: &BigRational, digits: usize, up: bool) -> String {
    if r.is_zero() {
        return format!("{:.*e}", digits - 1, 0.0);
    }
    let neg = r.is_negative();
    let mag = r.abs();
    let ten = BigRational::from_integer(BigInt::from(10));
    let pow = |e: i64| -> BigRational {
        let p = num_traits::pow(ten.clone(), e.unsigned_abs() as usize);
        if e >= 0 {
            p
        } else {
            p.recip()
        }
    };
    // Decimal exponent from the bit lengths, then corrected.
    let bits = mag.numer().bits() as i64 - mag.denom().bits() as i64;
    let mut exp = (bits as f64 * std::f64::consts::LOG10_2).floor() as i64;
    while mag >= pow(exp + 1) {
        exp += 1;
    }
    while mag < pow(exp) {
        exp -= 1;
    }
    let scaled = &mag / pow(exp - digits as i64 + 1);
    let away = up != neg;
    let mut m = if away { scaled.ceil() } else { scaled.floor() }.to_integer();
    if m == num_traits::pow(BigInt::from(10), digits) {
        m /= 10;
        exp += 1;
    }
    let s = m.to_string();
    let (head, tail) = s.split_at(1);
    format!("{}{}.{}e{}", if neg { "-" } else { "" }, head, tail, exp)
}

/// Check every item at `precision`, escalating MARGINAL items once.
pub fn check_items(items: &[CertItem], precision: Precision) -> CertReport {
    let high = escalation_precision(precision);
    let results: Vec<ItemResult> = items
        .par_iter()
        .map(|item| {
            let first = check_item(item, precision);
            if first.status != Status::Marginal || high.bits() <= precision.bits() {
                return first;
            }
            let mut again = check_item(item, high);
            again.escalated = true;
            again
        })
        .collect();
    CertReport::from_items(results)
}

/// Check the built-in ledger.
pub fn check_ledger(precision: Precision) -> CertReport {
    check_items(&builtin_ledger(), precision)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directed_formatting() {
        assert_eq!(sig_down(1.0 / 3.0, 4), "3.333e-1");
        assert_eq!(sig_up(1.0 / 3.0, 4), "3.334e-1");
        assert_eq!(sig_down(-1.0 / 3.0, 4), "-3.334e-1");
        assert_eq!(sig_up(-1.0 / 3.0, 4), "-3.333e-1");
        assert_eq!(sig_up(9.9999, 3), "1.00e1");
        assert_eq!(sig_down(100.0, 3), "1.00e2");
    }
}
