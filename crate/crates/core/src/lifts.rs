//! Lifts of tensors to the total space of a bundle: complete and vertical
//! lifts for Lie algebroids, Jacobi and Poisson lifts, poissonization, and
//! the gauge and transport maps onto the extended bundle over `M x R`.

use crate::algebroid::{AlgebroidSpec, JacobiAlgebroidSpec};
use crate::calculus::FormFunction;
use crate::coeff::ExpPoly;
use crate::error::{Error, Result};
use crate::geometry::bidiff::{BracketSource, FirstOrderBiDiffOp, PolyDiffOp};
use crate::geometry::bundle::BundleChart;
use crate::geometry::chart::{same_chart, ChartRef, Prolongation, Role};
use crate::geometry::skew::{CovariantField, MultiVector};
use crate::geometry::tensor::TensorField;

/// Name of the auxiliary coordinate on `R` in `M x R`.
pub const AUX_S: &str = "s";

/// `f^c = sum_a df/dx^a d^a_j y^j`, a fiber-linear function on `E`.
pub fn function_complete_lift(spec: &AlgebroidSpec, total: &BundleChart, f: &ExpPoly) -> Result<ExpPoly> {
    spec.check_bundle(total)?;
    spec.base().check_poly(f)?;
    let t = total.total();
    let mut out = t.zero();
    for j in 0..spec.rank() {
        let df = spec.anchor_apply(j, f);
        if !df.is_zero() {
            out.add_assign_ref(&(&total.lift_base(&df) * &t.coord(total.fiber_var(j))));
        }
    }
    Ok(out)
}

/// `e_i^c`: the anchor of `e_i` plus the linear vertical field whose
/// `y^k` component is `iota(L_{e_i} e*k)`.
pub fn frame_complete_lift(spec: &AlgebroidSpec, total: &BundleChart, i: usize) -> Result<MultiVector> {
    spec.check_bundle(total)?;
    let t = total.total();
    let mut out = MultiVector::coordinate_zero(t, 1);
    for (a, d) in spec.anchor_entries(i) {
        out.add_term(&[total.base_var(a)], total.lift_base(d));
    }
    let ei = spec.frame_element(i);
    for k in 0..spec.rank() {
        let l = spec.lie_derivative(&ei, &spec.coframe_element(k))?;
        out.add_term(&[total.fiber_var(k)], total.iota(&l)?);
    }
    Ok(out)
}

struct LiftKit {
    complete: Vec<MultiVector>,
    vertical: Vec<MultiVector>,
}

impl LiftKit {
    fn new(spec: &AlgebroidSpec, total: &BundleChart) -> Result<Self> {
        let complete = (0..spec.rank())
            .map(|i| frame_complete_lift(spec, total, i))
            .collect::<Result<Vec<_>>>()?;
        let vertical = (0..spec.rank())
            .map(|i| MultiVector::coordinate_basis(total.total(), &[total.fiber_var(i)]))
            .collect();
        Ok(LiftKit { complete, vertical })
    }
}

/// Complete lift of a multisection, built from the derivation rule
/// `(X ^ Y)^c = X^c ^ Y^v + X^v ^ Y^c` on frame elements and `f^c`.
pub fn complete_lift(spec: &AlgebroidSpec, total: &BundleChart, x: &MultiVector) -> Result<MultiVector> {
    spec.check_section(x)?;
    let kit = LiftKit::new(spec, total)?;
    let t = total.total();
    let mut out = MultiVector::coordinate_zero(t, x.degree());
    for (idx, a) in x.comps() {
        let ac = function_complete_lift(spec, total, a)?;
        let av = total.lift_base(a);
        let mut vert = MultiVector::scalar(t, t.dim(), t.one());
        for &i in idx {
            vert = vert.w(&kit.vertical[i]);
        }
        out = out.plus(&vert.scale(&ac));
        for j in 0..idx.len() {
            let mut prod = MultiVector::scalar(t, t.dim(), av.clone());
            for (pos, &i) in idx.iter().enumerate() {
                let f = if pos == j { &kit.complete[i] } else { &kit.vertical[i] };
                prod = prod.w(f);
            }
            out = out.plus(&prod);
        }
    }
    Ok(out)
}

/// Complete lift of a general contravariant tensor by the same derivation
/// rule with tensor products.
pub fn complete_lift_tensor(spec: &AlgebroidSpec, total: &BundleChart, x: &TensorField) -> Result<TensorField> {
    same_chart(x.chart(), spec.base())?;
    if x.rank() != spec.rank() {
        return Err(Error::RankMismatch {
            expected: spec.rank(),
            found: x.rank(),
        });
    }
    let kit = LiftKit::new(spec, total)?;
    let t = total.total();
    let ct: Vec<TensorField> = kit.complete.iter().map(|v| v.expand()).collect();
    let vt: Vec<TensorField> = kit.vertical.iter().map(|v| v.expand()).collect();
    let mut out = TensorField::coordinate_zero(t, x.degree());
    for (idx, a) in x.comps() {
        let ac = function_complete_lift(spec, total, a)?;
        let av = total.lift_base(a);
        let mut vert = TensorField::scalar(t, t.dim(), ac);
        for &i in idx {
            vert = vert.t(&vt[i]);
        }
        out = out.plus(&vert);
        for j in 0..idx.len() {
            let mut prod = TensorField::scalar(t, t.dim(), av.clone());
            for (pos, &i) in idx.iter().enumerate() {
                prod = prod.t(if pos == j { &ct[i] } else { &vt[i] });
            }
            out = out.plus(&prod);
        }
    }
    Ok(out)
}

/// Tangent lift of a tensor field on a base chart to `(x, v_x)`.
pub fn complete_lift_tangent(x: &TensorField) -> Result<TensorField> {
    let spec = AlgebroidSpec::tangent(x.chart());
    complete_lift_tensor(&spec, &BundleChart::tangent(x.chart())?, x)
}

fn identity_direction(first: &BundleChart) -> (MultiVector, ExpPoly) {
    let t = first.total();
    let n = first.rank() - 1;
    (
        MultiVector::coordinate_basis(t, &[first.fiber_var(n)]),
        t.coord(first.fiber_var(n)),
    )
}

fn reframe_first_order(x: &TensorField) -> TensorField {
    let n = x.chart().dim();
    x.reframe(n + 1, &(0..n).collect::<Vec<_>>())
}

fn lifts_on_first_order(x: &TensorField) -> Result<(TensorField, TensorField)> {
    let base = x.chart();
    let spec = AlgebroidSpec::first_order(base);
    let total = BundleChart::first_order(base)?;
    let xr = reframe_first_order(x);
    Ok((complete_lift_tensor(&spec, &total, &xr)?, total.vertical_tensor(&xr)?))
}

/// The Jacobi lift of a first-order bidifferential operator on `M` to
/// `TM + R` with coordinates `(x, v_x, t)`:
/// tensor part `L^c - tL^v + dt(x)(G1^c - tG1^v) + (G2^c - tG2^v)(x)dt + (a^c - t a^v) dt(x)dt`,
/// identity parts `G1^v + a^v dt` and `G2^v + a^v dt`, no `I(x)I` term.
pub fn jacobi_lift(j: &FirstOrderBiDiffOp) -> Result<FirstOrderBiDiffOp> {
    let base = j.chart();
    let total = BundleChart::first_order(base)?;
    let tc = total.total();
    let (dt, t) = identity_direction(&total);
    let dtt = dt.expand();
    let ct = |x: TensorField| lifts_on_first_order(&x).map(|(c, v)| c.minus(&v.scale(&t)));
    let g1 = ct(j.gamma1().expand())?;
    let g2 = ct(j.gamma2().expand())?;
    let al = ct(TensorField::scalar(base, base.dim(), j.alpha().clone()))?;
    let lambda = ct(j.lambda().clone())?
        .plus(&dtt.t(&g1))
        .plus(&g2.t(&dtt))
        .plus(&dtt.t(&dtt).scale(&al.get(&[])));
    let av = total.lift_base(j.alpha());
    let vert = |g: &MultiVector| -> Result<MultiVector> {
        let (_, v) = lifts_on_first_order(&g.expand())?;
        Ok(v.to_multivector()?.plus(&dt.scale(&av)))
    };
    FirstOrderBiDiffOp::new(lambda, vert(j.gamma1())?, vert(j.gamma2())?, tc.zero())
}

/// The Jacobi lift of a skew pair as `main + I ^ ident`.
pub fn jacobi_lift_skew(lambda: &MultiVector, gamma: &MultiVector) -> Result<PolyDiffOp> {
    let j = FirstOrderBiDiffOp::skew(lambda, gamma)?;
    let hat = jacobi_lift(&j)?;
    let (main, ident) = hat
        .as_skew()
        .ok_or_else(|| Error::NotSkew("lift of a skew pair".into()))?;
    PolyDiffOp::new(main, ident)
}

/// The Poisson lift on `(x, v_x, t)`: the tensor part of the Jacobi lift
/// plus `D (x) (G1^v + a^v dt) + (G2^v + a^v dt) (x) D`, with `D` the
/// Liouville field of `TM + R`.
pub fn poisson_lift(j: &FirstOrderBiDiffOp) -> Result<TensorField> {
    let hat = jacobi_lift(j)?;
    let total = BundleChart::first_order(j.chart())?;
    let d = total.liouville().expand();
    Ok(hat
        .lambda()
        .plus(&d.t(&hat.gamma1().expand()))
        .plus(&hat.gamma2().expand().t(&d)))
}

/// Complete Jacobi lift `X^c - (k-1) iota_phi X^v + I ^ (i_phi X)^v` of a
/// degree-`k` multisection.
pub fn jacobi_lift_algebroid(jspec: &JacobiAlgebroidSpec, total: &BundleChart, x: &MultiVector) -> Result<PolyDiffOp> {
    let (main, ident) = jacobi_parts(jspec, total, x)?;
    match ident {
        Some(ident) => PolyDiffOp::new(main, ident),
        None => Ok(PolyDiffOp::from_main(main)),
    }
}

/// Complete Poisson lift `X^c - (k-1) iota_phi X^v + D_E ^ (i_phi X)^v`.
pub fn poisson_lift_algebroid(jspec: &JacobiAlgebroidSpec, total: &BundleChart, x: &MultiVector) -> Result<MultiVector> {
    let (main, ident) = jacobi_parts(jspec, total, x)?;
    match ident {
        Some(ident) => main.try_add(&total.liouville().wedge(&ident)?),
        None => Ok(main),
    }
}

fn jacobi_parts(
    jspec: &JacobiAlgebroidSpec,
    total: &BundleChart,
    x: &MultiVector,
) -> Result<(MultiVector, Option<MultiVector>)> {
    let spec = jspec.algebroid();
    let k = x.degree() as i64;
    let iphi = jspec.iota_phi(total)?;
    let xv = total.vertical(x)?;
    let main = complete_lift(spec, total, x)?.try_sub(&xv.scale(&iphi).scale_int(k - 1))?;
    let ident = if k > 0 {
        Some(total.vertical(&x.interior(jspec.phi())?)?)
    } else {
        None
    };
    Ok((main, ident))
}

/// `M x R` with the auxiliary coordinate `s`.
pub fn hat_base(base: &ChartRef) -> Result<ChartRef> {
    if base.contains(AUX_S) {
        return Err(Error::NameCollision(format!(
            "{base} already has a coordinate named {AUX_S}"
        )));
    }
    Ok(base
        .prolong(&Prolongation::TimesR(AUX_S.into(), Role::AuxS))?
        .into_ref())
}

fn embed_coeffs(from: &ChartRef, to: &ChartRef) -> Result<Vec<usize>> {
    to.embedding_of(from)
}

/// Poissonization `e^{-s} (L + ds (x) G1 + G2 (x) ds + a ds (x) ds)` on
/// `M x R`.
pub fn poissonization(j: &FirstOrderBiDiffOp) -> Result<TensorField> {
    let base = j.chart();
    let hat = hat_base(base)?;
    let n = hat.dim();
    let s = n - 1;
    let map = embed_coeffs(base, &hat)?;
    let lift = |t: &TensorField| -> Result<TensorField> {
        Ok(t.map_coeffs(&hat, |p| Ok(p.reindex(n, &map)))?.reframe(n, &map))
    };
    let ds = TensorField::coordinate_basis(&hat, &[s]);
    let out = lift(j.lambda())?
        .plus(&ds.t(&lift(&j.gamma1().expand())?))
        .plus(&lift(&j.gamma2().expand())?.t(&ds))
        .plus(&ds.t(&ds).scale(&j.alpha().reindex(n, &map)));
    Ok(out.scale(&ExpPoly::exp(n, s, -1)))
}

/// Skew poissonization `e^{-s} (L + ds ^ G)`.
pub fn poissonization_skew(lambda: &MultiVector, gamma: &MultiVector) -> Result<MultiVector> {
    poissonization(&FirstOrderBiDiffOp::skew(lambda, gamma)?)?.to_multivector()
}

/// The gauge map `X -> e^{-ks} X` for `X` of degree `k + 1`, landing over
/// the base of the extended algebroid (functions get `e^{s}`).
pub fn p_phi(hat: &AlgebroidSpec, x: &MultiVector) -> Result<MultiVector> {
    let hb = hat.base();
    let map = embed_coeffs(x.chart(), hb)?;
    let s = hb.index(AUX_S)?;
    let k = x.degree() as i32 - 1;
    let n = hb.dim();
    x.map_coeffs(hb, |p| Ok(p.reindex(n, &map).mul_exp(s, -k)))
}

/// Bundle chart over `M x R` with the same fiber coordinates as `bundle`.
pub fn hat_bundle(bundle: &BundleChart, dual: bool) -> Result<BundleChart> {
    let hb = hat_base(bundle.base())?;
    let names: Vec<String> = bundle
        .fiber_vars()
        .iter()
        .map(|&i| bundle.total().var(i).name.clone())
        .collect();
    BundleChart::with_fibers(&hb, &names, dual)
}

/// Map of total-space variables of `src` into `dst`, where `dst` lives
/// over `base x R` with fibers matched by frame index.
fn transport_map(src: &BundleChart, dst: &BundleChart) -> Result<(Vec<usize>, usize)> {
    if src.rank() != dst.rank() {
        return Err(Error::RankMismatch {
            expected: src.rank(),
            found: dst.rank(),
        });
    }
    let s = dst.total().index(AUX_S)?;
    let mut map = vec![0; src.total().dim()];
    for (a, &v) in src.base_vars().iter().enumerate() {
        map[v] = dst.total().index(&src.base().var(a).name)?;
    }
    for i in 0..src.rank() {
        map[src.fiber_var(i)] = dst.fiber_var(i);
    }
    Ok((map, s))
}

/// `breve(phi)(v, s) = e^s phi(v)`.
pub fn breve(src: &BundleChart, dst: &BundleChart, phi: &ExpPoly) -> Result<ExpPoly> {
    src.total().check_poly(phi)?;
    let (map, s) = transport_map(src, dst)?;
    Ok(phi.reindex(dst.total().dim(), &map).mul_exp(s, 1))
}

/// `tilde(phi)(u, s) = e^s phi(e^{-s} u)`: the fiber-degree-`d` part is
/// multiplied by `e^{(1-d)s}`.
pub fn tilde(src: &BundleChart, dst: &BundleChart, phi: &ExpPoly) -> Result<ExpPoly> {
    src.total().check_poly(phi)?;
    let (map, s) = transport_map(src, dst)?;
    let n = dst.total().dim();
    let mut out = ExpPoly::zero(n);
    for (d, part) in phi.homogeneous_parts(src.fiber_vars()) {
        let w = 1 - i32::try_from(d).map_err(|_| Error::NonPolynomialFiber(src.total().render(phi)))?;
        out.add_assign_ref(&part.reindex(n, &map).mul_exp(s, w));
    }
    Ok(out)
}

/// `iota_{(mu, f)} = iota_mu + t f` on `(x, v_x, t)`.
pub fn iota_form_function(total: &BundleChart, a: &FormFunction) -> Result<ExpPoly> {
    let base = total.base();
    let n = base.dim();
    if a.form.degree() != 1 || a.form.rank() != n {
        return Err(Error::DegreeMismatch {
            expected: 1,
            found: a.form.degree(),
        });
    }
    let mut frame = CovariantField::zero(base, n + 1, 1);
    for (k, v) in a.form.comps() {
        frame.add_term(k, v.clone());
    }
    frame.add_term(&[n], a.func.clone());
    total.iota(&frame)
}

/// The bracket on sections of `T*M + R` read off from the Jacobi lift:
/// `{iota_a, iota_b}_Jhat = iota_{[a, b]_J}`. Works for non-skew `J`.
pub fn kirillov_bracket_lift(j: &FirstOrderBiDiffOp, a: &FormFunction, b: &FormFunction) -> Result<FormFunction> {
    let total = BundleChart::first_order(j.chart())?;
    let hat = jacobi_lift(j)?;
    let r = hat.bracket(&iota_form_function(&total, a)?, &iota_form_function(&total, b)?)?;
    let coeffs = total.linear_coefficients(&r)?;
    let n = j.chart().dim();
    let mut form = CovariantField::coordinate_zero(j.chart(), 1);
    for (i, c) in coeffs.iter().take(n).enumerate() {
        form.add_term(&[i], c.clone());
    }
    Ok(FormFunction::new(form, coeffs[n].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::kirillov_bracket;
    use crate::geometry::chart::Chart;

    fn chart(names: &[&str]) -> ChartRef {
        Chart::base(names).unwrap().into_ref()
    }

    #[test]
    fn tangent_lift_examples() {
        let m = chart(&["x"]);
        let tm = BundleChart::tangent(&m).unwrap();
        let spec = AlgebroidSpec::tangent(&m);
        let xc = function_complete_lift(&spec, &tm, &m.coord(0)).unwrap();
        assert_eq!(tm.total().render(&xc), "v_x");
        let xdx = MultiVector::coordinate_basis(&m, &[0]).scale(&m.coord(0));
        assert_eq!(complete_lift(&spec, &tm, &xdx).unwrap().render(), "x * d/dx + v_x * d/dv_x");

        let p = chart(&["x", "y"]);
        let l = MultiVector::coordinate_basis(&p, &[0, 1]);
        let lc = complete_lift_tangent(&l.expand()).unwrap().to_multivector().unwrap();
        assert_eq!(lc.render(), "d/dx ^ d/dv_y - d/dy ^ d/dv_x");
    }

    #[test]
    fn so3_section_lift() {
        let m = chart(&["x"]);
        let spec = AlgebroidSpec::so3(&m);
        let e = spec.total_chart().unwrap();
        assert!(function_complete_lift(&spec, &e, &m.coord(0)).unwrap().is_zero());
        let e1c = frame_complete_lift(&spec, &e, 0).unwrap();
        assert_eq!(e1c.render(), "y3 * d/dy2 - y2 * d/dy3");
    }

    #[test]
    fn jacobi_lift_examples() {
        let u = chart(&["u"]);
        let zero2 = MultiVector::coordinate_zero(&u, 2);
        let du = MultiVector::coordinate_basis(&u, &[0]);
        let j = jacobi_lift_skew(&zero2, &du).unwrap();
        assert_eq!(j.render(), "(-d/du ^ d/dt + t * d/dv_u ^ d/dt, d/dv_u)");
        let p = chart(&["x", "y"]);
        let l = MultiVector::coordinate_basis(&p, &[0, 1]);
        let j = jacobi_lift_skew(&l, &MultiVector::coordinate_zero(&p, 1)).unwrap();
        assert_eq!(
            j.main.render(),
            "d/dx ^ d/dv_y - d/dy ^ d/dv_x - t * d/dv_x ^ d/dv_y"
        );
        assert!(j.ident.is_zero());
    }

    #[test]
    fn poisson_lift_of_alpha() {
        let m = chart(&["x"]);
        let j = FirstOrderBiDiffOp::new(
            TensorField::coordinate_zero(&m, 2),
            MultiVector::coordinate_zero(&m, 1),
            MultiVector::coordinate_zero(&m, 1),
            m.one(),
        )
        .unwrap();
        let pl = poisson_lift(&j).unwrap();
        assert_eq!(pl.render(), "v_x * d/dv_x @ d/dt + v_x * d/dt @ d/dv_x + t * d/dt @ d/dt");
    }

    #[test]
    fn poissonization_of_contact() {
        let m = chart(&["q", "p", "u"]);
        let b = |i: &[usize]| MultiVector::coordinate_basis(&m, i);
        let lam = b(&[0, 1]).plus(&b(&[2, 1]).scale(&m.coord(1)));
        let pj = poissonization_skew(&lam, &b(&[2])).unwrap();
        assert_eq!(
            pj.render(),
            "exp(-s) * d/dq ^ d/dp - p*exp(-s) * d/dp ^ d/du - exp(-s) * d/du ^ d/ds"
        );
        assert!(hat_base(&chart(&["s"])).is_err());
    }

    #[test]
    fn transports() {
        let m = chart(&["x"]);
        let e = BundleChart::first_order(&m).unwrap();
        let eh = BundleChart::tangent(&hat_base(&m).unwrap()).unwrap();
        let vx = e.total().coord(1);
        assert_eq!(eh.total().render(&breve(&e, &eh, &vx).unwrap()), "v_x*exp(s)");
        let d = AlgebroidSpec::so3(&m).dual_chart().unwrap();
        let dh = hat_bundle(&d, true).unwrap();
        let xi = d.total().coord(1).pow(2);
        assert_eq!(dh.total().render(&tilde(&d, &dh, &xi).unwrap()), "xi1^2*exp(-s)");
    }

    #[test]
    fn kirillov_routes_agree_on_contact() {
        let m = chart(&["q", "p", "u"]);
        let b = |i: &[usize]| MultiVector::coordinate_basis(&m, i);
        let lam = b(&[0, 1]).plus(&b(&[2, 1]).scale(&m.coord(1)));
        let j = FirstOrderBiDiffOp::skew(&lam, &b(&[2])).unwrap();
        let f = |i| CovariantField::coordinate_basis(&m, &[i]);
        let cases = [
            (FormFunction::new(f(0), m.zero()), FormFunction::new(f(1), m.zero())),
            (FormFunction::new(f(2).scale(&m.coord(1)), m.coord(0)), FormFunction::new(f(1), m.one())),
            (FormFunction::new(f(0), m.coord(2)), FormFunction::new(f(2).scale(&m.coord(0)), m.coord(1))),
        ];
        for (a, c) in &cases {
            assert_eq!(kirillov_bracket(&j, a, c).unwrap(), kirillov_bracket_lift(&j, a, c).unwrap());
        }
    }
}
