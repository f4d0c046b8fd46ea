use crate::algebroid::{AlgebroidSpec, JacobiAlgebroidSpec};
use crate::calculus::{
    bracket_one_forms, deformed_schouten_jacobi, lie_bracket, schouten, schouten_in, FormFunction,
};
use crate::error::Result;
use crate::geometry::bidiff::{BracketSource, FirstOrderBiDiffOp};
use crate::geometry::bundle::{BundleChart, BundleMorphism};
use crate::geometry::chart::ChartRef;
use crate::geometry::skew::{CovariantField, MultiVector};
use crate::geometry::tensor::{contract_first, TensorField};
use crate::lifts::{
    complete_lift, complete_lift_tangent, jacobi_lift, jacobi_lift_algebroid,
    kirillov_bracket_lift, poisson_lift, poisson_lift_algebroid,
};

use super::{apply_morphism, jacobi_residuals, related_residuals, summarize, Report};

/// Coordinate 1-forms `e*a` and `x^b e*a` over a frame of size `rank`.
///
/// Both sides of every homomorphism condition are first-order
/// differential operators in each form argument and tensorial in the
/// frame, so agreement on this set implies agreement on all forms with
/// polynomial coefficients.
fn generating_forms(base: &ChartRef, rank: usize) -> Vec<(String, CovariantField)> {
    let names = base.names();
    let frame = |a: usize| {
        if rank == base.dim() {
            format!("d{}", names[a])
        } else {
            format!("e*{}", a + 1)
        }
    };
    let mut out = Vec::new();
    for a in 0..rank {
        out.push((frame(a), CovariantField::basis(base, rank, &[a])));
    }
    for b in 0..base.dim() {
        for a in 0..rank {
            out.push((
                format!("{} {}", names[b], frame(a)),
                CovariantField::basis(base, rank, &[a]).scale(&base.coord(b)),
            ));
        }
    }
    out
}

/// Runs `check` over ordered pairs from `gens`, collecting failures.
fn pairwise<T>(
    gens: &[(String, T)],
    mut check: impl FnMut(&T, &T) -> Result<Option<String>>,
) -> Result<Option<String>> {
    let mut fails = Vec::new();
    for (na, a) in gens {
        for (nb, b) in gens {
            if let Some(r) = check(a, b)? {
                fails.push((format!("({na}, {nb})"), r));
            }
        }
    }
    Ok(summarize(fails))
}

fn residual_of(m: &MultiVector) -> Option<String> {
    (!m.is_zero()).then(|| m.render())
}

fn skew_residual(l: &TensorField) -> Option<String> {
    if l.is_skew() {
        None
    } else {
        Some(format!("not skew: L + L^T = {}", l.plus(&l.transpose()).render()))
    }
}

fn related(
    f: &BundleMorphism,
    a: &dyn BracketSource,
    b: &dyn BracketSource,
    with_unit: bool,
) -> Result<Option<String>> {
    Ok(summarize(related_residuals(f, a, b, with_unit)?))
}

/// Witnesses for the existential conditions of [`theorem6_suite`].
#[derive(Clone, Debug, Default)]
pub struct Theorem6Witness {
    /// Bundle morphism `F: T*M -> TM`; defaults to `sharp_L`.
    pub f: Option<BundleMorphism>,
    /// Second tensor `L1`; defaults to `L`.
    pub lambda1: Option<TensorField>,
}

/// Characterization of Poisson tensors among all 2-contravariant tensors.
pub fn theorem6_suite(l: &TensorField, w: &Theorem6Witness) -> Result<Report> {
    let base = l.chart();
    let cot = BundleChart::cotangent(base)?;
    let tan = BundleChart::tangent(base)?;
    let sharp = BundleMorphism::sharp(l, &cot, &tan)?;
    let f = w.f.clone().unwrap_or_else(|| sharp.clone());
    let l1 = w.lambda1.clone().unwrap_or_else(|| l.clone());
    let lm = AlgebroidSpec::tangent(base).linear_poisson(&cot)?;
    let neg_lc = complete_lift_tangent(l)?.neg();
    let l1c = complete_lift_tangent(&l1)?;
    let gens = generating_forms(base, base.dim());
    let mut rep = Report::new("thm6");

    let poisson = match l.to_multivector() {
        Ok(mv) => schouten(&mv, &mv).map(|r| residual_of(&r)),
        Err(_) => Ok(skew_residual(l)),
    };
    rep.push_result("(i)", "L is a Poisson tensor", poisson);

    let hom = |bracket_of: &TensorField, map: &dyn Fn(&CovariantField) -> Result<MultiVector>| {
        pairwise(&gens, |a, b| {
            let lhs = map(&bracket_one_forms(bracket_of, a, b)?)?;
            let rhs = lie_bracket(&map(a)?, &map(b)?)?;
            Ok(residual_of(&lhs.try_sub(&rhs)?))
        })
    };
    let by_sharp = |mu: &CovariantField| contract_first(l, mu);
    let by_f = |mu: &CovariantField| apply_morphism(&f, mu);

    rep.push_result(
        "(ii)",
        "sharp_L([mu, nu]_L) = [sharp_L mu, sharp_L nu]",
        hom(l, &by_sharp),
    );
    rep.push_result(
        "(iii)",
        "L_M and -L^c are sharp_L-related",
        related(&sharp, &lm, &neg_lc, false),
    );
    rep.push_result(
        "(iv)",
        "L_M and -L^c are F-related",
        related(&f, &lm, &neg_lc, false),
    );
    rep.push_result(
        "(v)",
        "L_M and -L1^c are sharp_L-related",
        related(&sharp, &lm, &l1c.neg(), false),
    );
    match related(&sharp, &lm, &l1c, false) {
        Ok(r) => rep.push_info("(v) literal", "L_M and +L1^c are sharp_L-related", r),
        Err(e) => rep.push_info("(v) literal", "L_M and +L1^c are sharp_L-related", Some(e.to_string())),
    }
    rep.push_result("(vi)", "F([mu, nu]_L) = [F mu, F nu]", hom(l, &by_f));
    rep.push_result(
        "(vii)",
        "sharp_L([mu, nu]_L1) = [sharp_L mu, sharp_L nu]",
        hom(&l1, &by_sharp),
    );
    rep.expect_equivalent(&["(i)", "(ii)", "(iii)", "(iv)", "(v)", "(vi)", "(vii)"]);
    Ok(rep)
}

/// Characterization of canonical structures on a Lie algebroid.
pub fn theorem7_suite(spec: &AlgebroidSpec, l: &MultiVector) -> Result<Report> {
    let e = spec.total_chart()?;
    let es = spec.dual_chart()?;
    let lt = l.expand();
    let sharp = BundleMorphism::sharp(&lt, &es, &e)?;
    let gens = generating_forms(spec.base(), spec.rank());
    let mut rep = Report::new("thm7");
    rep.push_result(
        "(i)",
        "[[L, L]] = 0",
        schouten_in(spec, l, l).map(|r| residual_of(&r)),
    );
    rep.push_result(
        "(ii)",
        "sharp_L([mu, nu]_L) = [sharp_L mu, sharp_L nu]",
        pairwise(&gens, |a, b| {
            let lhs = contract_first(&lt, &spec.dual_bracket(&lt, a, b, None)?)?;
            let rhs = spec.section_bracket(&contract_first(&lt, a)?, &contract_first(&lt, b)?)?;
            Ok(residual_of(&lhs.try_sub(&rhs)?))
        }),
    );
    let lin = spec.linear_poisson(&es)?;
    let neg_lc = complete_lift(spec, &e, l)?.neg();
    rep.push_result(
        "(iii)",
        "L^{E*} and -L^c are sharp_L-related",
        related(&sharp, &lin, &neg_lc, false),
    );
    rep.expect_equivalent(&["(i)", "(ii)", "(iii)"]);
    Ok(rep)
}

fn frame_form(base: &ChartRef, a: &FormFunction) -> CovariantField {
    let n = base.dim();
    let mut out = CovariantField::zero(base, n + 1, 1);
    for (k, v) in a.form.comps() {
        out.add_term(k, v.clone());
    }
    out.add_term(&[n], a.func.clone());
    out
}

fn generating_pairs(base: &ChartRef) -> Vec<(String, FormFunction)> {
    let n = base.dim();
    let names = base.names();
    let zero_form = CovariantField::coordinate_zero(base, 1);
    let mut out = Vec::new();
    for (label, f) in generating_forms(base, n) {
        out.push((format!("({label}, 0)"), FormFunction::new(f, base.zero())));
    }
    out.push(("(0, 1)".into(), FormFunction::new(zero_form.clone(), base.one())));
    for b in 0..n {
        out.push((
            format!("(0, {})", names[b]),
            FormFunction::new(zero_form.clone(), base.coord(b)),
        ));
    }
    out
}

/// Characterization of Jacobi brackets among first-order bidifferential
/// operators. `j1` is the witness for the existential conditions.
pub fn theorem8_suite(j: &FirstOrderBiDiffOp, j1: Option<&FirstOrderBiDiffOp>) -> Result<Report> {
    let j1 = j1.unwrap_or(j);
    let base = j.chart();
    let e = BundleChart::first_order(base)?;
    let es = BundleChart::first_order_dual(base)?;
    let jt = j.as_frame_tensor();
    let j1t = j1.as_frame_tensor();
    let sharp = BundleMorphism::sharp(&jt, &es, &e)?;
    let sharp1 = BundleMorphism::sharp(&j1t, &es, &e)?;
    let jm = JacobiAlgebroidSpec::first_order(base).canonical_jacobi_dual(&es)?;
    let first = AlgebroidSpec::first_order(base);
    let lm = first.linear_poisson(&es)?;
    let neg_hat = jacobi_lift(j)?.neg();
    let neg_hat1 = jacobi_lift(j1)?.neg();
    let neg_hatc = poisson_lift(j)?.neg();
    let neg_hatc1 = poisson_lift(j1)?.neg();
    let mut rep = Report::new("thm8");

    let j1_res = match j.as_skew() {
        None => Ok(skew_residual(j.lambda()).or_else(|| {
            Some("identity parts are not opposite (G1 + G2 != 0 or alpha != 0)".into())
        })),
        Some((l, g)) => jacobi_residuals(&l, &g).map(|(a, b)| {
            let mut parts = Vec::new();
            if !a.is_zero() {
                parts.push(format!("[[G, L]] = {}", a.render()));
            }
            if !b.is_zero() {
                parts.push(format!("[[L, L]] + 2 G ^ L = {}", b.render()));
            }
            (!parts.is_empty()).then(|| parts.join("; "))
        }),
    };
    rep.push_result("J1", "J is a Jacobi bracket", j1_res);
    rep.push_result("J2", "J_M and -Jhat are sharp_J-related", related(&sharp, &jm, &neg_hat, true));
    rep.push_result("J3", "J_M and -Jhat are sharp_J1-related", related(&sharp1, &jm, &neg_hat, true));
    rep.push_result("J4", "J_M and -J1hat are sharp_J-related", related(&sharp, &jm, &neg_hat1, true));
    rep.push_result("J5", "L_M and -Jhat^c are sharp_J-related", related(&sharp, &lm, &neg_hatc, false));
    rep.push_result("J6", "L_M and -Jhat^c are sharp_J1-related", related(&sharp1, &lm, &neg_hatc, false));
    rep.push_result("J7", "L_M and -J1hat^c are sharp_J-related", related(&sharp, &lm, &neg_hatc1, false));

    let gens = generating_pairs(base);
    let hom = |bracket_op: &FirstOrderBiDiffOp, map: &TensorField| {
        pairwise(&gens, |a, b| {
            let br = kirillov_bracket_lift(bracket_op, a, b)?;
            let lhs = contract_first(map, &frame_form(base, &br))?;
            let rhs = first.section_bracket(
                &contract_first(map, &frame_form(base, a))?,
                &contract_first(map, &frame_form(base, b))?,
            )?;
            Ok(residual_of(&lhs.try_sub(&rhs)?))
        })
    };
    rep.push_result("J8", "sharp_J([a, b]_J) = [sharp_J a, sharp_J b]_1", hom(j, &jt));
    rep.push_result("J9", "sharp_J1([a, b]_J) = [sharp_J1 a, sharp_J1 b]_1", hom(j, &j1t));
    rep.push_result("J10", "sharp_J([a, b]_J1) = [sharp_J a, sharp_J b]_1", hom(j1, &jt));
    rep.expect_equivalent(&["J1", "J2", "J3", "J4", "J5", "J6", "J7", "J8", "J9", "J10"]);
    Ok(rep)
}

/// Characterization of canonical structures on a Jacobi algebroid.
pub fn theorem10_suite(jspec: &JacobiAlgebroidSpec, j: &MultiVector) -> Result<Report> {
    let spec = jspec.algebroid();
    let e = spec.total_chart()?;
    let es = spec.dual_chart()?;
    let jt = j.expand();
    let sharp = BundleMorphism::sharp(&jt, &es, &e)?;
    let mut rep = Report::new("thm10");
    rep.push_result(
        "(1)",
        "[[J, J]]_phi = 0",
        deformed_schouten_jacobi(jspec, j, j).map(|r| residual_of(&r)),
    );
    let jdual = jspec.canonical_jacobi_dual(&es)?;
    let jhat = jacobi_lift_algebroid(jspec, &e, j)?;
    rep.push_result(
        "(2)",
        "J_phi^{E*} and -Jhat_phi are sharp_J-related",
        related(&sharp, &jdual, &jhat.neg(), true),
    );
    let lin = spec.linear_poisson(&es)?;
    let jhatc = poisson_lift_algebroid(jspec, &e, j)?;
    rep.push_result(
        "(3)",
        "L^{E*} and -Jhat_phi^c are sharp_J-related",
        related(&sharp, &lin, &jhatc.neg(), false),
    );
    let gens = generating_forms(spec.base(), spec.rank());
    let phi = Some(jspec.phi());
    rep.push_result(
        "(4)",
        "sharp_J([mu, nu]_J) = [sharp_J mu, sharp_J nu]",
        pairwise(&gens, |a, b| {
            let lhs = contract_first(&jt, &spec.dual_bracket(&jt, a, b, phi)?)?;
            let rhs = spec.section_bracket(&contract_first(&jt, a)?, &contract_first(&jt, b)?)?;
            Ok(residual_of(&lhs.try_sub(&rhs)?))
        }),
    );
    // the bracket of forms read off from the Jacobi lift must be the
    // d^phi formula
    let route = pairwise(&gens, |a, b| {
        let lifted = jhat.bracket(&e.iota(a)?, &e.iota(b)?)?;
        let direct = e.iota(&spec.dual_bracket(&jt, a, b, phi)?)?;
        let r = lifted - direct;
        Ok((!r.is_zero()).then(|| e.total().render(&r)))
    });
    match route {
        Ok(r) => rep.push_info("(4) lift route", "{iota mu, iota nu}_Jhat = iota [mu, nu]_J", r),
        Err(err) => rep.push_info("(4) lift route", "{iota mu, iota nu}_Jhat = iota [mu, nu]_J", Some(err.to_string())),
    }
    rep.expect_equivalent(&["(1)", "(2)", "(3)", "(4)"]);
    Ok(rep)
}
