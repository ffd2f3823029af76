//! The built-in list of numeric claims.
//!
//! Printed constants are exact rationals of their decimal forms. A claim
//! written as a chain `a ≥ b > c` is split into atomic items; the second
//! link carries a `-CMP` suffix.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::expr::Expr;
use super::{CertItem, ItemClass, Relation};
use crate::constructors::{make_competitor, COMPETITOR_X, COMPETITOR_Y};

fn c(name: &'static str, value: &str) -> Expr {
    Expr::named(name, Expr::dec(value))
}

fn d(value: &str) -> Expr {
    Expr::dec(value)
}

fn sqrt(e: Expr) -> Expr {
    e.sqrt()
}

/// k₈ = √(2π/3 + √3/4), the equal double-bubble scale.
pub fn k8_expr() -> Expr {
    Expr::named("k8", sqrt(Expr::int(2) * Expr::pi() / 3 + Expr::int(3).sqrt() / 4))
}

/// Exact areas and perimeter of the competitor cluster at (x, y).
pub struct CompetitorExprs {
    pub quad_area: Expr,
    pub tri_area: Expr,
    pub perimeter: Expr,
}

pub fn competitor_exprs() -> CompetitorExprs {
    let x = Expr::dec("0.2707");
    let y = Expr::dec("0.394");
    let s3 = Expr::int(3).sqrt();
    let pi = Expr::pi();
    let r = Expr::named("R", Expr::int(2) * (&x + &y) / &s3);
    let quad_area = (Expr::int(2) * &x + &y) * &y * &s3 + &pi / 3 * &r * &r - &s3 / 4 * &r * &r;
    let tri_area = &s3 * &y * &y + &pi / 2 * (&y * &s3) * (&y * &s3);
    let perimeter = Expr::int(2) * (Expr::int(2) * &pi / 3) * &r
        + Expr::int(2) * &pi * &s3 * &y
        + Expr::int(2) * &x
        + Expr::int(8) * &y;
    CompetitorExprs { quad_area, tri_area, perimeter }
}

fn competitor_value(which: fn(&crate::Cluster) -> f64) -> Result<f64, String> {
    let c = make_competitor(COMPETITOR_X, COMPETITOR_Y).map_err(|e| e.to_string())?;
    Ok(which(&c))
}

fn quad_area_geo() -> Result<f64, String> {
    competitor_value(|c| c.region_area(1).unwrap_or(f64::NAN))
}

fn tri_area_geo() -> Result<f64, String> {
    competitor_value(|c| c.region_area(3).unwrap_or(f64::NAN))
}

fn raw_perimeter_geo() -> Result<f64, String> {
    competitor_value(|c| c.perimeter())
}

fn rescaled_perimeter_geo() -> Result<f64, String> {
    competitor_value(|c| {
        let min = c.areas().values().copied().fold(f64::INFINITY, f64::min);
        c.perimeter() / min.sqrt()
    })
}

fn rat(n: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(den))
}

pub fn builtin_ledger() -> Vec<CertItem> {
    use ItemClass::{Cosmetic, Essential};
    use Relation::{Ge, Gt, Le, Lt};

    let k0 = c("k0", "11.1962");
    let k1 = c("k1", "0.1605");
    let k2 = c("k2", "0.0244");
    let k3 = c("k3", "0.0408");
    let k4 = c("k4", "0.0411");
    let k5 = c("k5", "1.0044");
    let k6 = c("k6", "0.0425");
    let k7 = c("k7", "1.4199");
    let k9 = c("k9", "0.7154");
    let k10 = c("k10", "8.7939");
    let c1 = c("c1", "1.3168");
    let c2 = c("c2", "2.1606");
    let c3 = c("c3", "1.1606");
    let c4 = c("c4", "1.4186");
    let c5 = c("c5", "0.9747");
    let c7 = c("c7", "0.1992");
    let c8 = c("c8", "2.4990");
    let c9 = c("c9", "4.4111");
    let c10 = c("c10", "1.3466");
    let c11 = c("c11", "4.1064");
    let c12 = c("c12", "1.6829");
    let k8 = k8_expr();
    let pi = Expr::pi();
    let sp = pi.sqrt();
    let one = Expr::int(1);
    let two = Expr::int(2);
    let s3 = Expr::int(3).sqrt();

    let scalar = |name: &str, lhs: Expr, rel: Relation, rhs: Expr, class: ItemClass, role: &'static str| {
        CertItem::scalar(name, lhs, rel, rhs, class, role)
    };

    let x = Expr::var();
    let y16 = Expr::int(16) * &pi / (Expr::int(9) * &k0 * &k0);
    let pk = &pi / (&k0 * &k0);
    let a_fin = &two * &c10 + Expr::int(20) * &pi / (Expr::int(3) * (&k0 - &k10));
    let nf_fin = &two * &c12 + Expr::int(6) * &pi / (&k0 - &k10);
    let comp = competitor_exprs();

    let mut items = vec![
        scalar("K8-LO", k8.clone(), Gt, d("1.5897"), Essential, "double-bubble scale, lower"),
        scalar("K8-HI", k8.clone(), Lt, d("1.5898"), Essential, "double-bubble scale, upper"),
        scalar(
            "K10",
            Expr::int(6) * (&pi / 2 + &one / &s3).sqrt(),
            Ge,
            k10.clone(),
            Essential,
            "equal triple-bubble perimeter",
        ),
        scalar("K2", &pk * (&one - &pk), Ge, k2.clone(), Essential, "small-component mass, four neighbours"),
        scalar("K6", &y16 * (&one - &y16), Ge, k6.clone(), Essential, "small-component mass, three neighbours"),
        scalar("C1", &k0 / &sp - 5, Le, c1.clone(), Essential, "one small component: excess budget"),
        scalar("F1-K1", k1.sqrt() + (&one - &k1).sqrt(), Gt, c1.clone(), Essential, "one small component: mass bound"),
        scalar(
            "K7",
            &two * &k0 - &two * &sp * ((&one - &k1).sqrt() + 5),
            Le,
            k7.clone(),
            Essential,
            "one small component: boundary length",
        ),
        scalar("C2", &k0 / &sp - 4 - k2.sqrt(), Le, c2.clone(), Essential, "internal small component: budget"),
        scalar(
            "F2-DK1",
            -(&one / (&one - &k1).sqrt()) + &one / (&two * k1.sqrt()),
            Gt,
            d("0.1565"),
            Essential,
            "internal small component: slope at k1",
        ),
        scalar(
            "F2-K3",
            &two * (&one - &k3).sqrt() + k3.sqrt(),
            Gt,
            c2.clone(),
            Essential,
            "internal small component: mass bound",
        ),
        scalar(
            "K9",
            &two * &k0 - &two * &sp * (k2.sqrt() + &two * (&one - &k3).sqrt() + 4),
            Le,
            k9.clone(),
            Essential,
            "internal small component: boundary length",
        ),
        scalar("C3", &k0 / &sp - 5 - k2.sqrt(), Le, c3.clone(), Essential, "two small components, same region: budget"),
        scalar(
            "F3-DK1",
            -(&one / (&one - &two * &k1).sqrt()) + &one / (&two * k1.sqrt()),
            Gt,
            d("0.0344"),
            Essential,
            "two small components, same region: slope at k1",
        ),
        scalar(
            "F3-K4",
            (&one - &two * &k4).sqrt() + k4.sqrt(),
            Gt,
            c3.clone(),
            Essential,
            "two small components, same region: mass bound",
        ),
        scalar("K5", &k0 / &sp - 5 - &two * k2.sqrt(), Le, k5.clone(), Essential, "two small components: budget"),
        scalar(
            "F4-K1",
            (&one - Expr::int(3) * &k1).sqrt() + k1.sqrt(),
            Gt,
            d("1.1206"),
            Essential,
            "two small components: value at k1",
        ),
        scalar("F4-K1-CMP", d("1.1206"), Gt, k5.clone(), Essential, "two small components: exceeds budget at k1"),
        scalar(
            "F4-K2",
            (&one - Expr::int(3) * &k2).sqrt() + k2.sqrt(),
            Gt,
            d("1.1189"),
            Essential,
            "two small components: value at k2",
        ),
        scalar("F4-K2-CMP", d("1.1189"), Gt, k5.clone(), Essential, "two small components: exceeds budget at k2"),
        CertItem::range(
            "CHAIN-A-1",
            Expr::int(3) * (&one - &x).sqrt() + 1,
            Ge,
            (&one - &two * &x).sqrt() + (&one - &x).sqrt() + 2,
            (rat(0, 1), rat(1, 3)),
            Essential,
            "concavity chain, first link",
        ),
        CertItem::range(
            "CHAIN-A-2",
            (&one - &two * &x).sqrt() + (&one - &x).sqrt() + 2,
            Ge,
            (&one - Expr::int(3) * &x).sqrt() + 3,
            (rat(0, 1), rat(1, 3)),
            Essential,
            "concavity chain, second link",
        ),
        scalar(
            "BIGINT",
            &two * &sp * ((&two * (&one - &k1)).sqrt() + 2),
            Ge,
            d("11.6831"),
            Essential,
            "two internal big components: perimeter",
        ),
        scalar("BIGINT-CMP", d("11.6831"), Gt, k0.clone(), Essential, "two internal big components: exceeds k0"),
        scalar("NTT-1", &pi / (Expr::int(3) * &k9), Gt, d("1.4637"), Essential, "two-two split: pressure"),
        scalar("NTT-1-CMP", d("1.4637"), Gt, &k0 / 8, Essential, "two-two split: pressure exceeds k0/8"),
        scalar("NTT-2", &two * &pi / (Expr::int(3) * &k9), Gt, &k0 / 4, Essential, "two-two split: quad pressure"),
        scalar(
            "NTT-C4",
            &two * &sp * ((&one - &k3).sqrt() + 1) - &k0 / 2,
            Gt,
            c4.clone(),
            Essential,
            "two-two split: length c4",
        ),
        scalar(
            "NTT-3",
            &sp / (&two * k3.sqrt()) - &two / &c4,
            Gt,
            d("2.9776"),
            Essential,
            "two-two split: small-component pressure",
        ),
        scalar("NTT-3-CMP", d("2.9776"), Gt, &k0 / 4, Essential, "two-two split: pressure exceeds k0/4"),
        scalar("NTT-4", &pi / &c4, Lt, d("2.2146"), Essential, "two-two split: pressure cap"),
        scalar(
            "NTT-C5",
            &sp * ((&two * (&one - &k3) + 1).sqrt() + 2) - &k0 / 2,
            Gt,
            c5.clone(),
            Essential,
            "two-two split: length c5",
        ),
        scalar(
            "NTT-5",
            &sp / (&two * k3.sqrt()) - &two / &c5,
            Gt,
            d("2.3355"),
            Essential,
            "two-two split: pressure, second case",
        ),
        scalar("NTT-5-CMP", d("2.3355"), Gt, Expr::int(3) * &k0 / 16, Essential, "two-two split: exceeds 3k0/16"),
        scalar("NTT-6", &sp / 2, Gt, d("0.8862"), Essential, "two-two split: circle pressure"),
        scalar("NTT-6-CMP", d("0.8862"), Gt, &k0 / 16, Essential, "two-two split: exceeds k0/16"),
        scalar(
            "NTT-C7",
            &sp / 6 * (&one - k3.sqrt() * &k0 / (&two * &sp * (&two - &k3))),
            Ge,
            c7.clone(),
            Essential,
            "two-two split: correction c7",
        ),
        scalar(
            "NTT-FIN",
            &two * &pi / &k9 + Expr::int(4) * &c7 + Expr::frac(4, 3) * &sp,
            Ge,
            d("11.9428"),
            Essential,
            "two-two split: perimeter",
        ),
        scalar("NTT-FIN-CMP", d("11.9428"), Gt, k0.clone(), Essential, "two-two split: exceeds k0"),
        scalar("BC-1", &k8 / (&one - &k1).sqrt(), Le, d("1.7352"), Essential, "reducible cases: pressure cap"),
        scalar("BC-2", &pi / &k7, Ge, d("2.2125"), Essential, "reducible cases: triangle pressure"),
        scalar("BC-3", &two * &pi / (Expr::int(3) * &k7), Ge, d("1.4750"), Essential, "reducible cases: quad pressure"),
        scalar("BC-3-CMP", d("1.4750"), Gt, d("0.9179"), Essential, "reducible cases: pressure ordering"),
        scalar("BC-3-K8", d("0.9179"), Ge, &k8 / &s3, Essential, "reducible cases: double-bubble pressure"),
        scalar(
            "BC-4",
            &two * &pi / (Expr::int(3) * &k7) + &k8 / &s3 * (&one - k1.sqrt() * &k0 / (&two * &sp * (&two - &k1))),
            Ge,
            d("1.7615"),
            Essential,
            "reducible cases: combined pressure",
        ),
        scalar(
            "FP-C8",
            &pi / &k7 + &k8 / &s3 * (&one - k1.sqrt() * &k0 / ((&two - &k1) * &two * &sp)),
            Ge,
            c8.clone(),
            Essential,
            "internal big triangle: pressure c8",
        ),
        scalar(
            "FP-FIN",
            Expr::int(4) * &c8 - &sp / (&one - &k1).sqrt() + Expr::int(4) * &k8 / &s3,
            Ge,
            d("11.5561"),
            Essential,
            "internal big triangle: perimeter",
        ),
        scalar("FP-FIN-CMP", d("11.5561"), Ge, k0.clone(), Essential, "internal big triangle: exceeds k0"),
        scalar(
            "A-C9",
            &two * &k0 - &two * &sp * ((&one - &k1).sqrt() + k2.sqrt() + 4),
            Le,
            c9.clone(),
            Essential,
            "cube case: length c9",
        ),
        scalar("A-2", &k0 / 6 - &two * &pi / (Expr::int(9) * &k7), Le, d("1.3744"), Essential, "cube case: pressure"),
        scalar(
            "A-C10",
            &two * &pi / (Expr::int(3) * &c9) + &two * &pi / (Expr::int(3) * (&k0 - &k10)),
            Ge,
            c10.clone(),
            Essential,
            "cube case: pressure c10",
        ),
        scalar("A-FIN", a_fin.clone(), Ge, d("11.4116"), Cosmetic, "cube case: printed perimeter"),
        scalar("A-FIN-ESS", a_fin, Gt, k0.clone(), Essential, "cube case: perimeter exceeds k0"),
        scalar("NF-C11", &k0 - Expr::int(4) * &sp, Le, c11.clone(), Essential, "no flower: length c11"),
        scalar("NF-C12", &pi / &c11 + &k8 / &s3, Ge, c12.clone(), Essential, "no flower: pressure c12"),
        scalar("NF-FIN", nf_fin.clone(), Ge, d("11.2124"), Cosmetic, "no flower: printed perimeter"),
        scalar("NF-FIN-ESS", nf_fin, Gt, k0.clone(), Essential, "no flower: perimeter exceeds k0"),
        CertItem::range(
            "TAYLOR",
            (&one + &x).sqrt(),
            Le,
            &one + &x / 2 - &x * &x / 8 + &x * &x * &x / 16,
            (rat(0, 1), rat(1, 1)),
            Essential,
            "third-order square-root bound",
        ),
        scalar("ISO-SANITY", Expr::int(6) * &sp, Lt, k0.clone(), Essential, "isoperimetric bound below competitor"),
    ];
    let mut geo = |name: &str, lhs: Expr, rel, rhs: Expr, class, role, check: Option<fn() -> Result<f64, String>>| {
        let mut item = CertItem::scalar(name, lhs, rel, rhs, class, role);
        item.cross_check = check;
        items.push(item);
    };
    let rescaled = &comp.perimeter / comp.quad_area.sqrt();
    geo(
        "GEO-COMP-QUAD",
        comp.quad_area.clone(),
        Gt,
        one.clone(),
        Essential,
        "competitor quad area",
        Some(quad_area_geo),
    );
    geo(
        "GEO-COMP-TRI",
        comp.tri_area.clone(),
        Gt,
        one.clone(),
        Essential,
        "competitor triangle area",
        Some(tri_area_geo),
    );
    geo("GEO-COMP-ORDER", comp.tri_area, Gt, comp.quad_area, Essential, "competitor smallest area is a quad", None);
    geo(
        "GEO-COMP-RESCALED",
        rescaled,
        Le,
        k0.clone(),
        Essential,
        "competitor perimeter at unit areas",
        Some(rescaled_perimeter_geo),
    );
    geo(
        "GEO-COMP-RAW",
        comp.perimeter,
        Lt,
        &k0 + d("0.0001"),
        Cosmetic,
        "competitor raw perimeter near k0",
        Some(raw_perimeter_geo),
    );
    items.sort_by(|a, b| a.name.cmp(&b.name));
    items
}
