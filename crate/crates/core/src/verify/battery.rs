use crate::algebroid::{AlgebroidSpec, JacobiAlgebroidSpec};
use crate::calculus::{
    deformed_schouten_jacobi, schouten, schouten_in, schouten_jacobi_first_order,
    schouten_jacobi_via_algebroid, to_first_order_section,
};
use crate::error::Result;
use crate::geometry::bidiff::{FirstOrderBiDiffOp, PolyDiffOp};
use crate::geometry::chart::{Chart, ChartRef};
use crate::geometry::skew::{Co, Contra, MultiVector};
use crate::lifts::{p_phi, poissonization};
use crate::random::Gen;

use super::{is_jacobi, is_poisson, Report};

fn sign(n: i64) -> i64 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `a - b` where a zero of any degree is the additive identity (brackets
/// of functions land in degree 0 rather than -1).
fn sub(a: &MultiVector, b: &MultiVector) -> Result<MultiVector> {
    if b.is_zero() {
        Ok(a.clone())
    } else if a.is_zero() {
        Ok(b.neg())
    } else {
        a.try_sub(b)
    }
}

/// Records the first counterexample of a randomized law.
struct Law {
    label: &'static str,
    description: String,
    failure: Option<String>,
}

impl Law {
    fn new(label: &'static str, description: String) -> Self {
        Law {
            label,
            description,
            failure: None,
        }
    }

    fn observe(&mut self, r: &MultiVector, context: impl FnOnce() -> String) {
        if self.failure.is_none() && !r.is_zero() {
            self.failure = Some(format!("{} on {}", r.render(), context()));
        }
    }

    fn push(self, rep: &mut Report) {
        rep.push(self.label, &self.description, self.failure);
    }
}

/// Randomized exact identities: graded antisymmetry, graded Jacobi and
/// Leibniz for the Schouten bracket, the closed first-order
/// Schouten-Jacobi formula against the algebroid route, the
/// poissonization bridge, the gauge homomorphism and `d^2 = 0`.
/// `count` sets the number of random inputs per law.
pub fn battery(seed: u64, count: usize) -> Result<Report> {
    let mut g = Gen::new(seed);
    let m: ChartRef = Chart::base(&["x", "y", "z"])?.into_ref();
    let mut rep = Report::new("battery");

    let mut anti = Law::new("antisymmetry", format!("[[X, Y]] = -(-1)^{{xy}} [[Y, X]] on {count} pairs"));
    let mut jac = Law::new("jacobi", format!("graded Jacobi identity on {count} triples"));
    let mut leib = Law::new("leibniz", format!("[[X, Y ^ Z]] expands by Leibniz on {count} triples"));
    for _ in 0..count {
        let (dx, dy, dz) = (g.range(0, 3), g.range(0, 3), g.range(0, 3));
        let x: MultiVector = g.multivector(&m, dx);
        let y: MultiVector = g.multivector(&m, dy);
        let z: MultiVector = g.multivector(&m, dz);
        let (sx, sy) = (dx as i64 - 1, dy as i64 - 1);
        let ctx = || format!("X = {}, Y = {}", x.render(), y.render());
        let r = sub(&schouten(&x, &y)?, &schouten(&y, &x)?.scale_int(-sign(sx * sy)))?;
        anti.observe(&r, ctx);
        let r = sub(
            &sub(&schouten(&x, &schouten(&y, &z)?)?, &schouten(&schouten(&x, &y)?, &z)?)?,
            &schouten(&y, &schouten(&x, &z)?)?.scale_int(sign(sx * sy)),
        )?;
        jac.observe(&r, ctx);
        if dy + dz <= 3 {
            let rhs = sub(
                &schouten(&x, &y)?.w(&z),
                &y.w(&schouten(&x, &z)?).scale_int(-sign(sx * (sy + 1))),
            )?;
            let r = sub(&schouten(&x, &y.w(&z))?, &rhs)?;
            leib.observe(&r, ctx);
        }
    }
    anti.push(&mut rep);
    jac.push(&mut rep);
    leib.push(&mut rep);

    let mut routes = Law::new(
        "first-order routes",
        format!("closed first-order formula = algebroid route on {count} pairs"),
    );
    for _ in 0..count {
        let op = |g: &mut Gen| -> Result<PolyDiffOp> {
            let d = g.range(0, 3);
            if d == 0 {
                Ok(PolyDiffOp::from_main(g.multivector(&m, 0)))
            } else {
                PolyDiffOp::new(g.multivector(&m, d), g.multivector(&m, d - 1))
            }
        };
        let (a, b) = (op(&mut g)?, op(&mut g)?);
        let r = sub(
            &to_first_order_section(&schouten_jacobi_first_order(&a, &b)?),
            &to_first_order_section(&schouten_jacobi_via_algebroid(&a, &b)?),
        )?;
        routes.observe(&r, || format!("{}, {}", a.render(), b.render()));
    }
    routes.push(&mut rep);

    let mut bridge = None;
    let mut jacobi_count = 0;
    for k in 0..count {
        let gm: MultiVector = g.multivector(&m, 1);
        let l = if k % 3 == 0 {
            MultiVector::coordinate_zero(&m, 2)
        } else {
            g.multivector(&m, 2)
        };
        let j = FirstOrderBiDiffOp::skew(&l, &gm)?;
        let a = is_jacobi(&j)?;
        let b = is_poisson(&poissonization(&j)?.to_multivector()?)?;
        jacobi_count += a as usize;
        if a != b && bridge.is_none() {
            bridge = Some(format!("is_jacobi = {a}, is_poisson(P_J) = {b} on {}", j.render()));
        }
    }
    rep.push(
        "poissonization",
        &format!("J Jacobi iff P_J Poisson on {count} skew pairs ({jacobi_count} Jacobi)"),
        bridge,
    );

    let base = Chart::base(&["x", "y"])?.into_ref();
    let js = JacobiAlgebroidSpec::first_order(&base);
    let hat = js.extend_hat()?;
    let mut gauge = Law::new("gauge", format!("P(X), P(Y) bracket to P([[X, Y]]_phi) on {count} pairs over T1M"));
    for _ in 0..count {
        let (dx, dy) = (g.range(0, 3), g.range(0, 3));
        let x = g.skew::<Contra>(&base, 3, dx);
        let y = g.skew::<Contra>(&base, 3, dy);
        let lhs = schouten_in(&hat, &p_phi(&hat, &x)?, &p_phi(&hat, &y)?)?;
        let rhs = p_phi(&hat, &deformed_schouten_jacobi(&js, &x, &y)?)?;
        gauge.observe(&sub(&lhs, &rhs)?, || format!("X = {}, Y = {}", x.render(), y.render()));
    }
    gauge.push(&mut rep);

    let specs = [AlgebroidSpec::tangent(&m), AlgebroidSpec::so3(&m), AlgebroidSpec::heisenberg(&m)];
    let mut dd = None;
    for spec in &specs {
        for _ in 0..count.div_ceil(3) {
            let deg = g.range(0, 2);
            let mu = g.skew::<Co>(&m, 3, deg);
            let r = spec.d_form(&spec.d_form(&mu)?)?;
            if !r.is_zero() && dd.is_none() {
                dd = Some(format!("{} on {}", r.render(), mu.render()));
            }
        }
    }
    rep.push("d squared", "d(d mu) = 0 over TM, so(3) and Heisenberg", dd);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_battery_passes_and_is_deterministic() {
        let a = battery(3, 6).unwrap();
        assert!(a.all_passed(), "{}", a.render_text());
        assert_eq!(a, battery(3, 6).unwrap());
    }
}
