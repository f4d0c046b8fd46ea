//! Brackets: Schouten-Nijenhuis over any algebroid frame, its cocycle
//! deformation, the Schouten-Jacobi bracket of first-order polydifferential
//! operators, and brackets of 1-forms.

use crate::algebroid::{AlgebroidSpec, JacobiAlgebroidSpec};
use crate::coeff::ExpPoly;
use crate::error::{Error, Result};
use crate::geometry::bidiff::{apply_vector, differential, FirstOrderBiDiffOp, PolyDiffOp};
use crate::geometry::chart::{same_chart, ChartRef};
use crate::geometry::skew::{CovariantField, MultiVector};
use crate::geometry::tensor::{contract_first, pair};

fn parity_sign(n: i64) -> i64 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn without(idx: &[usize], k: usize) -> Vec<usize> {
    let mut v = idx.to_vec();
    v.remove(k);
    v
}

fn concat(parts: &[&[usize]]) -> Vec<usize> {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

/// `[[e_I, f]] = sum_k (-1)^(p-k) rho(e_{i_k})(f) e_{I\k}` (k counted from 1),
/// accumulated into `out` after wedging with `tail` on the right.
fn add_frame_function_bracket(
    spec: &AlgebroidSpec,
    out: &mut MultiVector,
    factor: &ExpPoly,
    sign: i64,
    idx: &[usize],
    f: &ExpPoly,
    tail: &[usize],
) {
    let p = idx.len() as i64;
    for (k, &i) in idx.iter().enumerate() {
        let df = spec.anchor_apply(i, f);
        if df.is_zero() {
            continue;
        }
        let s = sign * parity_sign(p - (k as i64 + 1));
        out.add_term(&concat(&[&without(idx, k), tail]), (factor * &df).scale_int(s));
    }
}

/// Schouten-Nijenhuis bracket of multisections of a Lie algebroid, graded
/// of degree -1 with `[[X, f]] = rho(X) f` and `[[X, Y]]` the algebroid
/// bracket on sections. Two functions bracket to zero.
pub fn schouten_in(spec: &AlgebroidSpec, a: &MultiVector, b: &MultiVector) -> Result<MultiVector> {
    spec.check_section(a)?;
    spec.check_section(b)?;
    let (p, q) = (a.degree(), b.degree());
    let chart = spec.base();
    if p + q == 0 {
        return Ok(MultiVector::zero(chart, spec.rank(), 0));
    }
    let mut out = MultiVector::zero(chart, spec.rank(), p + q - 1);
    let swap_sign = -parity_sign((p as i64 - 1) * (q as i64 - 1));
    for (ii, ca) in a.comps() {
        for (jj, cb) in b.comps() {
            add_frame_function_bracket(spec, &mut out, ca, 1, ii, cb, jj);
            add_frame_function_bracket(spec, &mut out, cb, swap_sign, jj, ca, ii);
            if p == 0 || q == 0 {
                continue;
            }
            let cab = ca * cb;
            for (k, &i) in ii.iter().enumerate() {
                let rest_i = without(ii, k);
                for (l, &j) in jj.iter().enumerate() {
                    let rest_j = without(jj, l);
                    let s = parity_sign((k + l) as i64);
                    for (m, c) in spec.structure(i, j) {
                        out.add_term(&concat(&[&[m], &rest_i, &rest_j]), (&cab * c).scale_int(s));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Schouten-Nijenhuis bracket of multivector fields on a chart.
pub fn schouten(a: &MultiVector, b: &MultiVector) -> Result<MultiVector> {
    same_chart(a.chart(), b.chart())?;
    schouten_in(&AlgebroidSpec::tangent(a.chart()), a, b)
}

/// `[X, Y]` of vector fields.
pub fn lie_bracket(x: &MultiVector, y: &MultiVector) -> Result<MultiVector> {
    for v in [x, y] {
        if v.degree() != 1 {
            return Err(Error::DegreeMismatch {
                expected: 1,
                found: v.degree(),
            });
        }
    }
    schouten(x, y)
}

/// `[[X, Y]]_phi = [[X, Y]] + x X ^ i_phi Y - (-1)^x y i_phi X ^ Y`
/// with `x = |X| - 1`, `y = |Y| - 1`.
pub fn deformed_schouten_jacobi(
    jspec: &JacobiAlgebroidSpec,
    x: &MultiVector,
    y: &MultiVector,
) -> Result<MultiVector> {
    let mut out = schouten_in(jspec.algebroid(), x, y)?;
    let (dx, dy) = (x.degree() as i64 - 1, y.degree() as i64 - 1);
    if dx + dy + 1 < 0 {
        return Ok(out);
    }
    let phi = jspec.phi();
    if y.degree() > 0 && dx != 0 {
        out = out.try_add(&x.wedge(&y.interior(phi)?)?.scale_int(dx))?;
    }
    if x.degree() > 0 && dy != 0 {
        out = out.try_add(&x.interior(phi)?.wedge(y)?.scale_int(-parity_sign(dx) * dy))?;
    }
    Ok(out)
}

/// Schouten-Jacobi bracket of first-order polydifferential operators
/// `A1 + I ^ A2` on a chart, in closed form:
/// `[[A1,B1]] + a A1^B2 - (-1)^a b A2^B1 + I ^ ((-1)^a [[A1,B2]] + [[A2,B1]] + (a-b) A2^B2)`.
pub fn schouten_jacobi_first_order(a: &PolyDiffOp, b: &PolyDiffOp) -> Result<PolyDiffOp> {
    same_chart(a.chart(), b.chart())?;
    let chart = a.chart();
    let (da, db) = (a.degree(), b.degree());
    if da + db == 0 {
        return Ok(PolyDiffOp::zero(chart, chart.dim(), 0));
    }
    let (sa, sb) = (da as i64 - 1, db as i64 - 1);
    let a2 = (da > 0).then_some(&a.ident);
    let b2 = (db > 0).then_some(&b.ident);
    let mut main = schouten(&a.main, &b.main)?;
    if let Some(b2) = b2 {
        if sa != 0 {
            main = main.try_add(&a.main.wedge(b2)?.scale_int(sa))?;
        }
    }
    if let Some(a2) = a2 {
        if sb != 0 {
            main = main.try_add(&a2.wedge(&b.main)?.scale_int(-parity_sign(sa) * sb))?;
        }
    }
    if da + db == 1 {
        return Ok(PolyDiffOp::from_main(main));
    }
    let mut ident = MultiVector::zero(chart, chart.dim(), da + db - 2);
    if let Some(b2) = b2 {
        ident = ident.try_add(&schouten(&a.main, b2)?.scale_int(parity_sign(sa)))?;
    }
    if let Some(a2) = a2 {
        ident = ident.try_add(&schouten(a2, &b.main)?)?;
    }
    if let (Some(a2), Some(b2)) = (a2, b2) {
        if sa != sb {
            ident = ident.try_add(&a2.wedge(b2)?.scale_int(sa - sb))?;
        }
    }
    PolyDiffOp::new(main, ident)
}

/// `A1 + I ^ A2` as a multisection of `TM + R` with `I` the last frame
/// element.
pub fn to_first_order_section(a: &PolyDiffOp) -> MultiVector {
    let n = a.chart().dim();
    let map: Vec<usize> = (0..n).collect();
    let main = a.main.reframe(n + 1, &map);
    if a.degree() == 0 {
        return main;
    }
    let i = MultiVector::basis(a.chart(), n + 1, &[n]);
    main.plus(&i.w(&a.ident.reframe(n + 1, &map)))
}

/// Inverse of [`to_first_order_section`].
pub fn from_first_order_section(chart: &ChartRef, x: &MultiVector) -> Result<PolyDiffOp> {
    let n = chart.dim();
    if x.rank() != n + 1 {
        return Err(Error::RankMismatch {
            expected: n + 1,
            found: x.rank(),
        });
    }
    let mut main = MultiVector::coordinate_zero(chart, x.degree());
    let mut ident = MultiVector::coordinate_zero(chart, x.degree().saturating_sub(1));
    for (k, v) in x.comps() {
        match k.last() {
            // I sorts last, so e_K ^ e_n = (-1)^{|K|} I ^ e_K
            Some(&last) if last == n => {
                let rest = &k[..k.len() - 1];
                ident.add_term(rest, v.scale_int(parity_sign(rest.len() as i64)));
            }
            _ => main.add_term(k, v.clone()),
        }
    }
    if x.degree() == 0 {
        return Ok(PolyDiffOp::from_main(main));
    }
    PolyDiffOp::new(main, ident)
}

/// The same bracket computed as the cocycle-deformed Schouten bracket of
/// the algebroid `TM + R` with cocycle `(0, 1)`.
pub fn schouten_jacobi_via_algebroid(a: &PolyDiffOp, b: &PolyDiffOp) -> Result<PolyDiffOp> {
    same_chart(a.chart(), b.chart())?;
    let jspec = JacobiAlgebroidSpec::first_order(a.chart());
    let c = deformed_schouten_jacobi(&jspec, &to_first_order_section(a), &to_first_order_section(b))?;
    from_first_order_section(a.chart(), &c)
}

/// `i_{sharp(mu)} d nu - i_{sharp(nu)} d mu + d <L, mu (x) nu>` for a
/// 2-tensor `L` (not necessarily skew) on a chart.
pub fn bracket_one_forms(
    l: &crate::geometry::TensorField,
    mu: &CovariantField,
    nu: &CovariantField,
) -> Result<CovariantField> {
    AlgebroidSpec::tangent(l.chart()).dual_bracket(l, mu, nu, None)
}

/// A section `(mu, f)` of `T*M + R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormFunction {
    pub form: CovariantField,
    pub func: ExpPoly,
}

impl FormFunction {
    pub fn new(form: CovariantField, func: ExpPoly) -> Self {
        FormFunction { form, func }
    }

    pub fn render(&self) -> String {
        format!(
            "({}, {})",
            self.form.render(),
            self.form.chart().render(&self.func)
        )
    }
}

/// Bracket of sections of `T*M + R` induced by a skew Jacobi pair, from
/// the explicit formula:
/// `(L_{#a} b - L_{#b} a - d L(a,b) + f L_G b - g L_G a - i_G(a ^ b),
///   L(b,a) + #a(g) - #b(f) + f G(g) - g G(f))`.
pub fn kirillov_bracket(
    j: &FirstOrderBiDiffOp,
    first: &FormFunction,
    second: &FormFunction,
) -> Result<FormFunction> {
    let (lam, gam) = j
        .as_skew()
        .ok_or_else(|| Error::NotSkew("Kirillov bracket needs a skew Jacobi pair".into()))?;
    let chart = j.chart();
    let tm = AlgebroidSpec::tangent(chart);
    let (a, f) = (&first.form, &first.func);
    let (b, g) = (&second.form, &second.func);
    let lt = lam.expand();
    let sa = contract_first(&lt, a)?;
    let sb = contract_first(&lt, b)?;
    let lab = pair(&lt, a, b)?;
    let dlab = differential(chart, &lab);

    let form = tm
        .lie_derivative(&sa, b)?
        .try_sub(&tm.lie_derivative(&sb, a)?)?
        .try_sub(&dlab)?
        .try_add(&tm.lie_derivative(&gam, b)?.scale(f))?
        .try_sub(&tm.lie_derivative(&gam, a)?.scale(g))?
        .try_sub(&a.wedge(b)?.interior(&gam)?)?;
    let func = -lab + apply_vector(&sa, g) - apply_vector(&sb, f) + f * &apply_vector(&gam, g)
        - g * &apply_vector(&gam, f);
    Ok(FormFunction::new(form, func))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::chart::Chart;

    fn contact() -> (ChartRef, MultiVector, MultiVector) {
        let m = Chart::base(&["q", "p", "u"]).unwrap().into_ref();
        let b = |i: &[usize]| MultiVector::coordinate_basis(&m, i);
        let lam = b(&[0, 1]).plus(&b(&[2, 1]).scale(&m.coord(1)));
        (m.clone(), lam, b(&[2]))
    }

    #[test]
    fn lie_bracket_examples() {
        let m = Chart::base(&["x", "y"]).unwrap().into_ref();
        let b = |i| MultiVector::coordinate_basis(&m, &[i]);
        let (x, y) = (m.coord(0), m.coord(1));
        assert_eq!(lie_bracket(&b(0), &b(0).scale(&x)).unwrap(), b(0));
        assert!(lie_bracket(&b(0), &b(1)).unwrap().is_zero());
        let lhs = lie_bracket(&b(1).scale(&x), &b(0).scale(&y)).unwrap();
        assert_eq!(lhs, b(0).scale(&x).minus(&b(1).scale(&y)));
        let fy = MultiVector::scalar(&m, 2, y);
        let xf = schouten(&b(1).scale(&x), &fy).unwrap();
        assert_eq!(xf.get(&[]), x);
    }

    #[test]
    fn contact_pair_satisfies_jacobi_identities() {
        let (m, lam, gam) = contact();
        let ll = schouten(&lam, &lam).unwrap();
        assert_eq!(ll, MultiVector::coordinate_basis(&m, &[2, 0, 1]).scale_int(-2));
        assert_eq!(ll, gam.w(&lam).scale_int(-2));
        assert!(schouten(&gam, &lam).unwrap().is_zero());
    }

    #[test]
    fn first_order_bracket_of_contact_pair_vanishes() {
        let (_, lam, gam) = contact();
        let j = PolyDiffOp::new(lam, gam).unwrap();
        let jj = schouten_jacobi_first_order(&j, &j).unwrap();
        assert!(jj.is_zero(), "{}", jj.render());
        assert!(schouten_jacobi_via_algebroid(&j, &j).unwrap().is_zero());
    }

    #[test]
    fn first_order_bracket_small_cases() {
        let (m, lam, gam) = contact();
        let i = PolyDiffOp::identity(&m, m.dim());
        assert!(schouten_jacobi_first_order(&i, &i).unwrap().is_zero());
        let x = PolyDiffOp::from_main(gam.scale(&m.coord(1)));
        let f = PolyDiffOp::from_main(MultiVector::scalar(&m, 3, m.coord(2).pow(2)));
        let xf = schouten_jacobi_first_order(&x, &f).unwrap();
        assert_eq!(xf.main.get(&[]), (m.coord(1) * m.coord(2)).scale_int(2));
        for (a, b) in [(&i, &x), (&x, &f), (&f, &i)] {
            assert_eq!(
                schouten_jacobi_first_order(a, b).unwrap(),
                schouten_jacobi_via_algebroid(a, b).unwrap()
            );
        }
        let j = PolyDiffOp::new(lam, gam).unwrap();
        assert_eq!(
            schouten_jacobi_first_order(&j, &x).unwrap(),
            schouten_jacobi_via_algebroid(&j, &x).unwrap()
        );
    }

    #[test]
    fn deformed_bracket_with_unit() {
        let m = Chart::base(&["x"]).unwrap().into_ref();
        let j = JacobiAlgebroidSpec::first_order(&m);
        let x = MultiVector::basis(&m, 2, &[1]).scale(&m.coord(0));
        let one = MultiVector::scalar(&m, 2, m.one());
        let r = deformed_schouten_jacobi(&j, &x, &one).unwrap();
        assert_eq!(r, x.interior(j.phi()).unwrap());
    }

    #[test]
    fn one_form_bracket_on_plane() {
        let m = Chart::base(&["x", "y"]).unwrap().into_ref();
        let l = MultiVector::coordinate_basis(&m, &[0, 1]).expand();
        let f = |i| CovariantField::coordinate_basis(&m, &[i]);
        assert!(bracket_one_forms(&l, &f(0), &f(1)).unwrap().is_zero());
        let xdy = f(1).scale(&m.coord(0));
        assert_eq!(bracket_one_forms(&l, &xdy, &f(1)).unwrap(), f(1));
        assert!(bracket_one_forms(&l, &xdy, &xdy).unwrap().is_zero());
    }

    #[test]
    fn kirillov_small_cases() {
        let m = Chart::base(&["u"]).unwrap().into_ref();
        let j = FirstOrderBiDiffOp::skew(
            &MultiVector::coordinate_zero(&m, 2),
            &MultiVector::coordinate_basis(&m, &[0]),
        )
        .unwrap();
        let zero = CovariantField::coordinate_zero(&m, 1);
        let du = CovariantField::coordinate_basis(&m, &[0]);
        let r = kirillov_bracket(
            &j,
            &FormFunction::new(zero.clone(), m.one()),
            &FormFunction::new(du, m.zero()),
        )
        .unwrap();
        assert!(r.form.is_zero() && r.func.is_zero());
        let r = kirillov_bracket(
            &j,
            &FormFunction::new(zero.clone(), m.one()),
            &FormFunction::new(zero, ExpPoly::int(1, 3)),
        )
        .unwrap();
        assert!(r.form.is_zero() && r.func.is_zero());
    }
}
