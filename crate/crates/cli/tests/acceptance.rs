//! End-to-end acceptance battery: one pass/fail line per criterion.
//!
//! Expected values are produced by oracles written here from scratch
//! (brute-force Jacobi identities, coordinate closed forms, the
//! decomposable expansion of the Schouten bracket) and compared with the
//! library routes.

use std::process::{Command, ExitCode};

use liftlab::algebroid::{AlgebroidSpec, JacobiAlgebroidSpec};
use liftlab::calculus::{
    deformed_schouten_jacobi, from_first_order_section, schouten, schouten_in,
    schouten_jacobi_first_order, schouten_jacobi_via_algebroid, to_first_order_section,
};
use liftlab::geometry::{
    BundleChart, Chart, ChartRef, Co, Contra, CovariantField, FirstOrderBiDiffOp, MultiVector,
    PolyDiffOp, TensorField,
};
use liftlab::lifts::{
    complete_lift, function_complete_lift, jacobi_lift_algebroid, p_phi, poissonization,
};
use liftlab::random::Gen;
use liftlab::verify::{
    is_jacobi, is_poisson, lemma_first_order_suite, lemma_jacobi_algebroid_suite, theorem10_suite,
    theorem6_suite, theorem7_suite, theorem8_suite, LemmaOptions, Report, Theorem6Witness,
};
use liftlab::geometry::BracketSource;
use liftlab::{ExpPoly, Rational};

type Outcome = Result<String, String>;

fn chart(names: &[&str]) -> ChartRef {
    Chart::base(names).unwrap().into_ref()
}

fn sign(n: i64) -> i64 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `a - b`, treating a zero of any degree as the additive identity.
fn diff(a: &MultiVector, b: &MultiVector) -> MultiVector {
    if b.is_zero() {
        a.clone()
    } else if a.is_zero() {
        b.neg()
    } else {
        a.try_sub(b).unwrap()
    }
}

fn sum(a: &MultiVector, b: &MultiVector) -> MultiVector {
    diff(a, &b.neg())
}

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn sn_algebroid(base: &ChartRef) -> AlgebroidSpec {
    AlgebroidSpec::tangent(base)
}

/// `e1 = d/dx, e2 = d/dy + x d/dz, e3 = d/dz`, so `[e1, e2] = e3`.
fn twisted_frame(base: &ChartRef) -> AlgebroidSpec {
    let mut s = AlgebroidSpec::new(base, 3);
    s.set_bracket(0, 1, 2, base.one());
    s.set_anchor(0, 0, base.one());
    s.set_anchor(1, 1, base.one());
    s.set_anchor(1, 2, base.coord(0));
    s.set_anchor(2, 2, base.one());
    s
}

fn so3_ext(base: &ChartRef) -> JacobiAlgebroidSpec {
    JacobiAlgebroidSpec::new(AlgebroidSpec::so3_extended(base), CovariantField::basis(base, 4, &[3])).unwrap()
}

fn contact_pair(broken: bool) -> (MultiVector, MultiVector) {
    let m = chart(&["q", "p", "u"]);
    let b = |i: &[usize]| MultiVector::coordinate_basis(&m, i);
    let mut l = b(&[0, 1]);
    if !broken {
        l = l.plus(&b(&[2, 1]).scale(&m.coord(1)));
    }
    (l, b(&[2]))
}

fn contact(broken: bool) -> FirstOrderBiDiffOp {
    let (l, g) = contact_pair(broken);
    FirstOrderBiDiffOp::skew(&l, &g).unwrap()
}

// ---------------------------------------------------------------- oracles

/// Lie bracket of coordinate vector fields from the textbook formula.
fn lie_oracle(x: &MultiVector, y: &MultiVector) -> MultiVector {
    let c = x.chart();
    let mut out = MultiVector::coordinate_zero(c, 1);
    for b in 0..c.dim() {
        let mut v = c.zero();
        for a in 0..c.dim() {
            v.add_assign_ref(&(&x.get(&[a]) * &y.get(&[b]).derivative(a)));
            v = &v - &(&y.get(&[a]) * &x.get(&[b]).derivative(a));
        }
        out.add_term(&[b], v);
    }
    out
}

/// A multivector as a sum of decomposables `(f d/dx_i1) ^ d/dx_i2 ^ ...`.
fn decomposables(x: &MultiVector) -> Vec<Vec<MultiVector>> {
    let c = x.chart();
    x.comps()
        .iter()
        .map(|(idx, f)| {
            idx.iter()
                .enumerate()
                .map(|(pos, &i)| {
                    let v = MultiVector::coordinate_basis(c, &[i]);
                    if pos == 0 {
                        v.scale(f)
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect()
}

fn wedge_all(c: &ChartRef, fs: &[&MultiVector]) -> MultiVector {
    let mut out = MultiVector::scalar(c, c.dim(), c.one());
    for f in fs {
        out = out.w(f);
    }
    out
}

/// The Schouten bracket of multivectors of degree >= 1 by expansion into
/// decomposables: `sum (-1)^{k+l} [X_k, Y_l] ^ X_1..^X_k..X_m ^ Y_1..^Y_l..Y_n`.
fn schouten_oracle(x: &MultiVector, y: &MultiVector) -> MultiVector {
    let c = x.chart();
    let mut out = MultiVector::coordinate_zero(c, x.degree() + y.degree() - 1);
    for dx in decomposables(x) {
        for dy in decomposables(y) {
            for k in 0..dx.len() {
                for l in 0..dy.len() {
                    let mut parts = vec![lie_oracle(&dx[k], &dy[l])];
                    parts.extend(dx.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, v)| v.clone()));
                    parts.extend(dy.iter().enumerate().filter(|(j, _)| *j != l).map(|(_, v)| v.clone()));
                    let refs: Vec<&MultiVector> = parts.iter().collect();
                    out = out.plus(&wedge_all(c, &refs).scale_int(sign((k + l) as i64)));
                }
            }
        }
    }
    out
}

/// Jacobi identity of the bracket `{f, g} = L^{ab} f_a g_b` on coordinate
/// triples, evaluated directly.
fn poisson_oracle(l: &TensorField) -> bool {
    let c = l.chart();
    let br = |f: &ExpPoly, g: &ExpPoly| {
        let mut out = c.zero();
        for (k, v) in l.comps() {
            out.add_assign_ref(&(&(v * &f.derivative(k[0])) * &g.derivative(k[1])));
        }
        out
    };
    let n = c.dim();
    for a in 0..n {
        for b in 0..n {
            for d in 0..n {
                let (x, y, z) = (c.coord(a), c.coord(b), c.coord(d));
                let jac = &(&br(&x, &br(&y, &z)) + &br(&y, &br(&z, &x))) + &br(&z, &br(&x, &y));
                if !jac.is_zero() {
                    return false;
                }
            }
        }
    }
    true
}

/// `f^c = df/dx^a d^a_j y^j`.
fn fp11(spec: &AlgebroidSpec, e: &BundleChart, f: &ExpPoly) -> ExpPoly {
    let mut out = e.total().zero();
    for a in 0..spec.base().dim() {
        for j in 0..spec.rank() {
            let c = &f.derivative(a) * &spec.d(j, a);
            out.add_assign_ref(&(&e.lift_base(&c) * &e.total().coord(e.fiber_var(j))));
        }
    }
    out
}

/// `(X^i e_i)^c = X^i d^a_i d/dx^a + (X^i c^k_ji + dX^k/dx^a d^a_j) y^j d/dy^k`.
fn fp12(spec: &AlgebroidSpec, e: &BundleChart, x: &MultiVector) -> MultiVector {
    let t = e.total();
    let (n, r) = (spec.base().dim(), spec.rank());
    let mut out = MultiVector::coordinate_zero(t, 1);
    for i in 0..r {
        for a in 0..n {
            out.add_term(&[e.base_var(a)], e.lift_base(&(&x.get(&[i]) * &spec.d(i, a))));
        }
    }
    for k in 0..r {
        for j in 0..r {
            let mut c = spec.base().zero();
            for i in 0..r {
                c.add_assign_ref(&(&x.get(&[i]) * &spec.c(j, i, k)));
            }
            for a in 0..n {
                c.add_assign_ref(&(&x.get(&[k]).derivative(a) * &spec.d(j, a)));
            }
            out.add_term(&[e.fiber_var(k)], &e.lift_base(&c) * &t.coord(e.fiber_var(j)));
        }
    }
    out
}

/// `P^c = P^ij d^a_j dy^i ^ dx^a + (P^kj c^i_lk + 1/2 dP^ij/dx^a d^a_l) y^l dy^i ^ dy^j`
/// for `P = 1/2 P^ij e_i ^ e_j`.
fn fp13(spec: &AlgebroidSpec, e: &BundleChart, p: &MultiVector) -> MultiVector {
    let t = e.total();
    let (n, r) = (spec.base().dim(), spec.rank());
    let pm = p.expand();
    let pij = |i: usize, j: usize| pm.get(&[i, j]);
    let half = Rational::new(1, 2);
    let mut out = MultiVector::coordinate_zero(t, 2);
    for i in 0..r {
        for j in 0..r {
            for a in 0..n {
                out.add_term(&[e.fiber_var(i), e.base_var(a)], e.lift_base(&(&pij(i, j) * &spec.d(j, a))));
            }
            for l in 0..r {
                let mut c = spec.base().zero();
                for k in 0..r {
                    c.add_assign_ref(&(&pij(k, j) * &spec.c(l, k, i)));
                }
                for a in 0..n {
                    c.add_assign_ref(&(&pij(i, j).derivative(a) * &spec.d(l, a)).scale(&half));
                }
                out.add_term(&[e.fiber_var(i), e.fiber_var(j)], &e.lift_base(&c) * &t.coord(e.fiber_var(l)));
            }
        }
    }
    out
}

// -------------------------------------------------------------- criteria

fn criterion1() -> Outcome {
    let mut g = Gen::new(1);
    let charts = [chart(&["x", "y"]), chart(&["x", "y", "z"])];
    let mut n = 0;
    let mut oracle_checks = 0;
    for round in 0..120 {
        let c = &charts[round % 2];
        let dim = c.dim();
        let (dx, dy, dz) = (g.range(0, dim), g.range(0, dim), g.range(0, dim));
        let x: MultiVector = g.multivector(c, dx);
        let y: MultiVector = g.multivector(c, dy);
        let z: MultiVector = g.multivector(c, dz);
        let br = |a: &MultiVector, b: &MultiVector| schouten(a, b).unwrap();
        let (sx, sy) = (dx as i64 - 1, dy as i64 - 1);

        let anti = sum(&br(&x, &y), &br(&y, &x).scale_int(sign(sx * sy)));
        check(anti.is_zero(), || format!("antisymmetry: {} on {}, {}", anti.render(), x.render(), y.render()))?;

        let jac = diff(
            &diff(&br(&x, &br(&y, &z)), &br(&br(&x, &y), &z)),
            &br(&y, &br(&x, &z)).scale_int(sign(sx * sy)),
        );
        check(jac.is_zero(), || format!("Jacobi: {}", jac.render()))?;

        if dy + dz <= dim {
            let lhs = br(&x, &y.w(&z));
            let rhs = sum(&br(&x, &y).w(&z), &y.w(&br(&x, &z)).scale_int(sign(sx * (sy + 1))));
            let r = diff(&lhs, &rhs);
            check(r.is_zero(), || format!("Leibniz: {}", r.render()))?;
        }
        if dx >= 1 && dy >= 1 {
            let r = diff(&br(&x, &y), &schouten_oracle(&x, &y));
            check(r.is_zero(), || format!("decomposable expansion: {}", r.render()))?;
            oracle_checks += 1;
        }
        n += 1;
    }
    // the frame-based bracket of a non-tangent algebroid obeys the same laws
    let base = chart(&["x", "y", "z"]);
    for spec in [AlgebroidSpec::heisenberg(&base), twisted_frame(&base)] {
        for _ in 0..20 {
            let (dx, dy, dz) = (g.range(0, 3), g.range(0, 3), g.range(0, 3));
            let x = g.skew::<Contra>(&base, 3, dx);
            let y = g.skew::<Contra>(&base, 3, dy);
            let z = g.skew::<Contra>(&base, 3, dz);
            let br = |a: &MultiVector, b: &MultiVector| schouten_in(&spec, a, b).unwrap();
            let (sx, sy) = (dx as i64 - 1, dy as i64 - 1);
            let anti = sum(&br(&x, &y), &br(&y, &x).scale_int(sign(sx * sy)));
            let jac = diff(
                &diff(&br(&x, &br(&y, &z)), &br(&br(&x, &y), &z)),
                &br(&y, &br(&x, &z)).scale_int(sign(sx * sy)),
            );
            check(anti.is_zero() && jac.is_zero(), || "frame bracket axioms".into())?;
            n += 1;
        }
    }
    Ok(format!("{n} random triples; {oracle_checks} checked against the decomposable expansion"))
}

fn criterion2() -> Outcome {
    let mut g = Gen::new(2);
    let charts = [chart(&["x", "y"]), chart(&["x", "y", "z"])];
    for round in 0..60 {
        let c = &charts[round % 2];
        let l: MultiVector = g.multivector(c, 2);
        let gm: MultiVector = g.multivector(c, 1);
        let j = PolyDiffOp::new(l.clone(), gm.clone()).unwrap();
        let got = schouten_jacobi_first_order(&j, &j).unwrap();
        let main = schouten(&l, &l).unwrap().plus(&l.w(&gm).scale_int(2));
        let ident = schouten(&gm, &l).unwrap().scale_int(2);
        let want = PolyDiffOp::new(main, ident).unwrap();
        check(got == want, || format!("self-bracket of {}: {} != {}", j.render(), got.render(), want.render()))?;
    }
    let mut pairs = 0;
    for round in 0..60 {
        let c = &charts[round % 2];
        let dim = c.dim();
        let rand_op = |g: &mut Gen| {
            let d = g.range(0, dim);
            if d == 0 {
                PolyDiffOp::from_main(g.multivector(c, 0))
            } else {
                PolyDiffOp::new(g.multivector(c, d), g.multivector(c, d - 1)).unwrap()
            }
        };
        let a = rand_op(&mut g);
        let b = rand_op(&mut g);
        let closed = schouten_jacobi_first_order(&a, &b).unwrap();
        let via = schouten_jacobi_via_algebroid(&a, &b).unwrap();
        let closed_sec = to_first_order_section(&closed);
        let via_sec = to_first_order_section(&via);
        check(diff(&closed_sec, &via_sec).is_zero(), || {
            format!("closed form vs algebroid route on {}, {}", a.render(), b.render())
        })?;
        pairs += 1;
    }
    Ok(format!("60 self-brackets; {pairs} pairs agree across both routes"))
}

fn thm6_conditions(r: &Report) -> [bool; 3] {
    [r.passed("(i)"), r.passed("(ii)"), r.passed("(iii)")]
}

fn criterion3() -> Outcome {
    let m = chart(&["x", "y", "z"]);
    let b = |i: &[usize]| MultiVector::coordinate_basis(&m, i);
    let terms = [
        b(&[1, 2]).scale(&m.coord(0)),
        b(&[2, 0]).scale(&m.coord(1)),
        b(&[0, 1]).scale(&m.coord(2)),
    ];
    let full = terms[0].plus(&terms[1]).plus(&terms[2]);
    let w = Theorem6Witness::default();
    let r = theorem6_suite(&full.expand(), &w).map_err(|e| e.to_string())?;
    check(thm6_conditions(&r) == [true; 3], || r.render_text())?;

    let mut deleted = Vec::new();
    for skip in 0..3 {
        let l = (0..3).filter(|&k| k != skip).fold(MultiVector::coordinate_zero(&m, 2), |acc, k| acc.plus(&terms[k]));
        let oracle = poisson_oracle(&l.expand());
        let r = theorem6_suite(&l.expand(), &w).map_err(|e| e.to_string())?;
        check(thm6_conditions(&r) == [oracle; 3] && r.equivalences_hold(), || r.render_text())?;
        deleted.push(oracle);
    }
    // a tensor the oracle rejects: dual to V = (y, 0, 1) with V . curl V != 0
    let bad = b(&[0, 1]).plus(&b(&[1, 2]).scale(&m.coord(1)));
    let oracle_bad = poisson_oracle(&bad.expand());
    let r = theorem6_suite(&bad.expand(), &w).map_err(|e| e.to_string())?;
    check(!oracle_bad && thm6_conditions(&r) == [false; 3], || r.render_text())?;

    let mut nonskew = 0;
    for t in [
        TensorField::coordinate_basis(&m, &[0, 1]),
        TensorField::coordinate_basis(&m, &[0, 1]).scale(&m.coord(0)).plus(&TensorField::coordinate_basis(&m, &[1, 0])),
        full.expand().plus(&TensorField::coordinate_basis(&m, &[2, 2])),
    ] {
        let r = theorem6_suite(&t, &w).map_err(|e| e.to_string())?;
        let rec = r.get("(iv)").unwrap();
        check(!rec.passed && !rec.residual.is_empty(), || r.render_text())?;
        nonskew += 1;
    }
    Ok(format!(
        "so(3) passes (i)-(iii); one-term deletions Poisson per oracle: {deleted:?}, suite agrees; {nonskew} non-skew inputs fail (iv)"
    ))
}

fn criterion4() -> Outcome {
    let keys = ["J1", "J2", "J5", "J8"];
    let good = theorem8_suite(&contact(false), None).map_err(|e| e.to_string())?;
    check(keys.iter().all(|k| good.passed(k)), || good.render_text())?;
    let bad = theorem8_suite(&contact(true), None).map_err(|e| e.to_string())?;
    check(keys.iter().all(|k| !bad.passed(k)), || bad.render_text())?;

    let mut g = Gen::new(4);
    let charts = [chart(&["x", "y"]), chart(&["x", "y", "z"])];
    let (mut total, mut jacobi) = (0, 0);
    for round in 0..40 {
        let c = &charts[round % 2];
        let (l, gm) = match round % 4 {
            // (0, G) is always Jacobi
            0 => (MultiVector::coordinate_zero(c, 2), g.multivector(c, 1)),
            // constant Poisson tensors with G = 0
            1 => {
                let mut lim = g.limits;
                lim.coeff_degree = 0;
                let mut g2 = Gen::with_limits(round as u64, lim);
                (g2.multivector(c, 2), MultiVector::coordinate_zero(c, 1))
            }
            _ => (g.multivector(c, 2), g.multivector(c, 1)),
        };
        let j = FirstOrderBiDiffOp::skew(&l, &gm).unwrap();
        let lhs = is_jacobi(&j).map_err(|e| e.to_string())?;
        let pj = poissonization(&j).map_err(|e| e.to_string())?;
        let rhs = is_poisson(&pj.to_multivector().unwrap()).map_err(|e| e.to_string())?;
        check(lhs == rhs, || format!("bridge broken on {}", j.render()))?;
        total += 1;
        jacobi += lhs as usize;
    }
    for broken in [false, true] {
        let j = contact(broken);
        let pj = poissonization(&j).unwrap().to_multivector().unwrap();
        check(is_jacobi(&j).unwrap() == is_poisson(&pj).unwrap(), || "contact bridge".into())?;
        total += 1;
        jacobi += !broken as usize;
    }
    Ok(format!("J1,J2,J5,J8 pass on contact and fail on broken; bridge holds on {total} skew J ({jacobi} Jacobi)"))
}

fn lemma_items(r: &Report) -> Result<(), String> {
    for k in ["(b)", "(c)", "(d)", "(e)", "(f)"] {
        check(r.passed(k), || r.render_text())?;
    }
    Ok(())
}

fn criterion5() -> Outcome {
    let opts = LemmaOptions::default();
    let r = lemma_first_order_suite(&contact(false), &opts).map_err(|e| e.to_string())?;
    lemma_items(&r)?;
    let base = chart(&["x", "y"]);
    let js = so3_ext(&base);
    check(js.validate().is_valid(), || "so(3)+R spec invalid".into())?;
    check(!js.phi().is_zero() && js.d_phi(js.phi()).map(|d| d.is_zero()).unwrap_or(false), || "cocycle".into())?;
    let e = |i: &[usize]| MultiVector::basis(&base, 4, i);
    let j = e(&[0, 1]).scale(&base.coord(0)).plus(&e(&[2, 3])).plus(&e(&[1, 3]).scale(&base.coord(1)));
    let r = lemma_jacobi_algebroid_suite(&js, &j, &opts).map_err(|e| e.to_string())?;
    lemma_items(&r)?;
    Ok("first-order lemma (b)-(f) and algebroid lemma (b)-(f) over so(3)+R with phi = e*4".into())
}

fn gauge_battery(js: &JacobiAlgebroidSpec, g: &mut Gen, count: usize) -> Result<usize, String> {
    let hat = js.extend_hat().map_err(|e| e.to_string())?;
    let (base, rank) = (js.base().clone(), js.rank());
    for _ in 0..count {
        let (dx, dy) = (g.range(0, rank.min(3)), g.range(0, rank.min(3)));
        let x = g.skew::<Contra>(&base, rank, dx);
        let y = g.skew::<Contra>(&base, rank, dy);
        let lhs = schouten_in(&hat, &p_phi(&hat, &x).unwrap(), &p_phi(&hat, &y).unwrap()).unwrap();
        let rhs = p_phi(&hat, &deformed_schouten_jacobi(js, &x, &y).unwrap()).unwrap();
        check(diff(&lhs, &rhs).is_zero(), || format!("gauge fails on {}, {}", x.render(), y.render()))?;
    }
    Ok(count)
}

fn criterion6() -> Outcome {
    let mut g = Gen::new(6);
    let a = gauge_battery(&JacobiAlgebroidSpec::first_order(&chart(&["x", "y"])), &mut g, 40)?;
    let b = gauge_battery(&so3_ext(&chart(&["x", "y"])), &mut g, 40)?;
    Ok(format!("{a} pairs over (T1M, (0,1)); {b} pairs over so(3)+R"))
}

fn criterion7() -> Outcome {
    let mut g = Gen::new(7);
    let b3 = chart(&["x", "y", "z"]);
    let b2 = chart(&["x", "y"]);
    let specs: Vec<(&str, AlgebroidSpec)> = vec![
        ("TM", sn_algebroid(&b3)),
        ("so(3)", AlgebroidSpec::so3(&b3)),
        ("so(3)+R", AlgebroidSpec::so3_extended(&b2)),
        ("Heisenberg", AlgebroidSpec::heisenberg(&b3)),
        ("twisted frame", twisted_frame(&b3)),
        ("T1M", AlgebroidSpec::first_order(&b2)),
    ];
    let mut count = 0;
    for (name, spec) in &specs {
        check(spec.validate().is_valid(), || format!("{name} invalid"))?;
        let base = spec.base().clone();
        let r = spec.rank();
        for deg in 0..r {
            for _ in 0..4 {
                let mu = g.skew::<Co>(&base, r, deg);
                let dd = spec.d_form(&spec.d_form(&mu).unwrap()).unwrap();
                check(dd.is_zero(), || format!("d^2 != 0 on {name}"))?;
                count += 1;
            }
        }
        let e = spec.total_chart().unwrap();
        let es = spec.dual_chart().unwrap();
        let lin = spec.linear_poisson(&es).unwrap();
        for _ in 0..6 {
            let x = g.skew::<Contra>(&base, r, 1);
            let y = g.skew::<Contra>(&base, r, 1);
            let f = g.poly(&base);
            let bracket = spec.section_bracket(&x, &y).unwrap();
            let lhs = es.iota(&bracket).unwrap();
            let rhs = lin.bracket(&es.iota(&x).unwrap(), &es.iota(&y).unwrap()).unwrap();
            check(lhs == rhs, || format!("linear Poisson frame identity on {name}"))?;
            check(function_complete_lift(spec, &e, &f).unwrap() == fp11(spec, &e, &f), || format!("f^c closed form on {name}"))?;
            check(complete_lift(spec, &e, &x).unwrap() == fp12(spec, &e, &x), || format!("X^c closed form on {name}"))?;
            let p = g.skew::<Contra>(&base, r, 2);
            let pc = complete_lift(spec, &e, &p).unwrap();
            let want = fp13(spec, &e, &p);
            check(pc == want, || format!("P^c closed form on {name}: {} vs {}", pc.render(), want.render()))?;
            count += 4;
        }
    }
    // (d^phi)^2 = 0
    let cocycles: Vec<(&str, JacobiAlgebroidSpec)> = vec![
        ("TM, dx", JacobiAlgebroidSpec::new(sn_algebroid(&b3), CovariantField::basis(&b3, 3, &[0])).unwrap()),
        ("so(3)+R, e*4", so3_ext(&b2)),
        ("Heisenberg, e*1 - 2e*2", JacobiAlgebroidSpec::new(
            AlgebroidSpec::heisenberg(&b3),
            CovariantField::basis(&b3, 3, &[0]).minus(&CovariantField::basis(&b3, 3, &[1]).scale_int(2)),
        ).unwrap()),
        ("T1M", JacobiAlgebroidSpec::first_order(&b2)),
    ];
    for (name, js) in &cocycles {
        check(js.validate().is_valid(), || format!("{name}: cocycle not closed"))?;
        for deg in 0..js.rank() {
            for _ in 0..4 {
                let mu = g.skew::<Co>(js.base(), js.rank(), deg);
                let dd = js.d_phi(&js.d_phi(&mu).unwrap()).unwrap();
                check(dd.is_zero(), || format!("(d^phi)^2 != 0 on {name}"))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} exact checks over {} algebroids and {} cocycles", specs.len(), cocycles.len()))
}

fn criterion8() -> Outcome {
    let mut g = Gen::new(8);
    let b2 = chart(&["x", "y"]);
    let b3 = chart(&["x", "y", "z"]);
    let jspecs: Vec<(&str, JacobiAlgebroidSpec)> = vec![
        ("TM", JacobiAlgebroidSpec::new(sn_algebroid(&b2), CovariantField::zero(&b2, 2, 1)).unwrap()),
        ("twisted frame", JacobiAlgebroidSpec::new(twisted_frame(&b3), CovariantField::zero(&b3, 3, 1)).unwrap()),
        ("T1M", JacobiAlgebroidSpec::first_order(&b2)),
        ("so(3)+R", so3_ext(&b2)),
    ];
    let mut count = 0;
    let mut canonical = 0;
    for (name, js) in &jspecs {
        let spec = js.algebroid();
        let (base, r) = (spec.base().clone(), spec.rank());
        let e = spec.total_chart().unwrap();
        let lift_tangent = |m: &MultiVector| complete_lift(spec, &e, m).unwrap();
        for _ in 0..8 {
            let (dx, dy) = (g.range(0, r.min(3)), g.range(0, r.min(3)));
            let x = g.skew::<Contra>(&base, r, dx);
            let y = g.skew::<Contra>(&base, r, dy);
            let xy = schouten_in(spec, &x, &y).unwrap();
            // [[X, Y]]^c = [[X^c, Y^c]]
            let l1 = diff(&lift_tangent(&xy), &schouten(&lift_tangent(&x), &lift_tangent(&y)).unwrap());
            check(l1.is_zero(), || format!("complete lift homomorphism on {name}"))?;
            // [[X, Y]]^v = [[X^c, Y^v]]
            let l2 = diff(&e.vertical(&xy).unwrap(), &schouten(&lift_tangent(&x), &e.vertical(&y).unwrap()).unwrap());
            check(l2.is_zero(), || format!("vertical lift law on {name}"))?;

            // Jacobi lift of a section: X^c + (i_phi X)^v I
            let s = g.skew::<Contra>(&base, r, 1);
            let got = jacobi_lift_algebroid(js, &e, &s).unwrap();
            let mut iphi = base.zero();
            for i in 0..r {
                iphi.add_assign_ref(&(&s.get(&[i]) * &js.phi().get(&[i])));
            }
            let want = PolyDiffOp::new(fp12(spec, &e, &s), MultiVector::scalar(e.total(), e.total().dim(), e.lift_base(&iphi))).unwrap();
            check(got == want, || format!("Jacobi lift of a section on {name}"))?;

            // [[Xhat, Yhat]]_1 = ([[X, Y]]_phi)^hat and [[Xhat, Y^v]]_1 = ([[X, Y]]_phi)^v
            let dxy = deformed_schouten_jacobi(js, &x, &y).unwrap();
            let hat = |m: &MultiVector| jacobi_lift_algebroid(js, &e, m).unwrap();
            let lhs = schouten_jacobi_first_order(&hat(&x), &hat(&y)).unwrap();
            let d = diff(&to_first_order_section(&lhs), &to_first_order_section(&hat(&dxy)));
            check(d.is_zero(), || format!("Jacobi lift homomorphism on {name}: {}", d.render()))?;
            let yv = PolyDiffOp::from_main(e.vertical(&y).unwrap());
            let lhs = schouten_jacobi_first_order(&hat(&x), &yv).unwrap();
            let want = PolyDiffOp::from_main(e.vertical(&dxy).unwrap());
            let d = diff(&to_first_order_section(&lhs), &to_first_order_section(&want));
            check(d.is_zero(), || format!("Jacobi lift vs vertical on {name}: {}", d.render()))?;
            count += 5;
        }
        // canonical structures from the battery have Poisson complete lifts
        for _ in 0..6 {
            let p = g.skew::<Contra>(&base, r, 2);
            if schouten_in(spec, &p, &p).unwrap().is_zero() {
                check(is_poisson(&lift_tangent(&p)).unwrap(), || format!("P^c not Poisson on {name}"))?;
                canonical += 1;
            }
        }
    }
    check(canonical > 0, || "no canonical structure found in the battery".into())?;
    Ok(format!("{count} lift-law checks; {canonical} canonical P with Poisson P^c"))
}

fn criterion9() -> Outcome {
    let c = chart(&["q", "p", "u"]);
    let js = JacobiAlgebroidSpec::first_order(&c);
    let mut summary = Vec::new();
    for broken in [false, true] {
        let (l, gm) = contact_pair(broken);
        // L + I ^ G as a frame bivector: L - G ^ I
        let op = PolyDiffOp::new(l, gm).unwrap();
        let j = to_first_order_section(&op);
        check(from_first_order_section(&c, &j).unwrap() == op, || "frame round trip".into())?;
        let r10 = theorem10_suite(&js, &j).map_err(|e| e.to_string())?;
        let r8 = theorem8_suite(&contact(broken), None).map_err(|e| e.to_string())?;
        let all10 = ["(1)", "(2)", "(3)", "(4)"].iter().all(|k| r10.passed(k));
        let none10 = ["(1)", "(2)", "(3)", "(4)"].iter().all(|k| !r10.passed(k));
        check(if broken { none10 } else { all10 }, || r10.render_text())?;
        check(r8.all_passed() == all10, || format!("{}{}", r8.render_text(), r10.render_text()))?;
        summary.push(if broken { "broken: all fail" } else { "contact: all pass" });
    }
    // zero cocycle reproduces the algebroid characterization
    let m = chart(&["x"]);
    let h = AlgebroidSpec::heisenberg(&m);
    let zero = JacobiAlgebroidSpec::new(h.clone(), CovariantField::zero(&m, 3, 1)).unwrap();
    let mut g = Gen::new(9);
    let mut cases: Vec<MultiVector> = vec![MultiVector::basis(&m, 3, &[0, 2]), MultiVector::basis(&m, 3, &[0, 1])];
    for _ in 0..4 {
        cases.push(g.skew::<Contra>(&m, 3, 2));
    }
    for l in &cases {
        let r7 = theorem7_suite(&h, l).map_err(|e| e.to_string())?;
        let r10 = theorem10_suite(&zero, l).map_err(|e| e.to_string())?;
        for (a, b) in [("(i)", "(1)"), ("(ii)", "(4)"), ("(iii)", "(3)"), ("(iii)", "(2)")] {
            check(r7.passed(a) == r10.passed(b), || format!("{a} vs {b} on {}", l.render()))?;
        }
        for (a, b) in [("(i)", "(1)"), ("(ii)", "(4)")] {
            check(r7.get(a).unwrap().residual == r10.get(b).unwrap().residual, || format!("residual {a} vs {b}"))?;
        }
    }
    Ok(format!("{}; zero cocycle matches the algebroid suite on {} bivectors", summary.join(", "), cases.len()))
}

fn liftlab(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_liftlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn criterion10() -> Outcome {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden");
    let script = format!("{dir}/characterizations.lift");
    let golden = std::fs::read_to_string(format!("{dir}/characterizations.out")).map_err(|e| e.to_string())?;
    let first = liftlab(&["run", &script]);
    let second = liftlab(&["run", &script]);
    check(first.stdout == second.stdout, || "two runs differ".into())?;
    let out = String::from_utf8_lossy(&first.stdout);
    check(out == golden, || format!("output differs from golden file:\n{out}"))?;
    check(first.status.code() == Some(1), || format!("golden session exit code {:?}", first.status.code()))?;

    let roundtrip = liftlab(&["run", &format!("{dir}/roundtrip.lift")]);
    check(roundtrip.status.success(), || String::from_utf8_lossy(&roundtrip.stdout).into_owned())?;
    let passing = liftlab(&["check", "thm8", "--input", &script, "--define", "J"]);
    check(passing.status.success(), || "thm8 on contact should exit 0".into())?;
    let failing = liftlab(&["check", "thm6", "--input", &script, "--define", "Lbad"]);
    check(failing.status.code() == Some(1), || "failing check should exit 1".into())?;
    Ok("golden session byte-identical; round trip holds; exit codes 0/1 as expected".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("Schouten bracket axioms", criterion1),
        ("first-order Schouten-Jacobi identity", criterion2),
        ("Poisson tensor characterization", criterion3),
        ("Jacobi bracket characterization", criterion4),
        ("Poissonization lemmas", criterion5),
        ("gauge homomorphism", criterion6),
        ("algebroid calculus and closed forms", criterion7),
        ("lift laws", criterion8),
        ("Jacobi algebroid characterization", criterion9),
        ("CLI golden session", criterion10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
