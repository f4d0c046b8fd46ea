use crate::algebroid::{AlgebroidSpec, JacobiAlgebroidSpec};
use crate::coeff::ExpPoly;
use crate::error::Result;
use crate::geometry::bidiff::{BracketSource, FirstOrderBiDiffOp};
use crate::geometry::bundle::{BundleChart, BundleMorphism};
use crate::geometry::skew::MultiVector;
use crate::lifts::{
    breve, complete_lift, complete_lift_tangent, hat_base, hat_bundle, jacobi_lift,
    jacobi_lift_algebroid, p_phi, poisson_lift, poisson_lift_algebroid, poissonization, tilde,
};

use super::{summarize, Report};

/// Size of the function battery used by the lemma suites.
#[derive(Clone, Copy, Debug)]
pub struct LemmaOptions {
    /// Highest fiber degree of the battery monomials.
    pub max_fiber_degree: usize,
    /// Also include each fiber coordinate multiplied by each base
    /// coordinate, and the base coordinates themselves.
    pub base_weighted: bool,
}

impl Default for LemmaOptions {
    fn default() -> Self {
        LemmaOptions {
            max_fiber_degree: 2,
            base_weighted: true,
        }
    }
}

/// Monomials in the fiber coordinates of `b` up to the given degree,
/// optionally with base-weighted extras.
fn battery(b: &BundleChart, opts: &LemmaOptions) -> Vec<ExpPoly> {
    let total = b.total();
    let fibers = b.fiber_vars();
    let mut out = vec![total.one()];
    let mut layer = vec![total.one()];
    let mut seen = std::collections::BTreeSet::new();
    for _ in 0..opts.max_fiber_degree {
        let mut next = Vec::new();
        for m in &layer {
            for &v in fibers {
                let p = m * &total.coord(v);
                let key = total.render(&p);
                if seen.insert(key) {
                    next.push(p);
                }
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    if opts.base_weighted {
        for &a in b.base_vars() {
            out.push(total.coord(a));
            for &v in fibers {
                out.push(&total.coord(a) * &total.coord(v));
            }
        }
    }
    out
}

fn linear_battery(b: &BundleChart) -> Vec<ExpPoly> {
    let total = b.total();
    let mut out = Vec::new();
    for &v in b.fiber_vars() {
        out.push(total.coord(v));
        for &a in b.base_vars() {
            out.push(&total.coord(a) * &total.coord(v));
        }
    }
    out
}

/// Charts and structures shared by both lemma variants.
struct LemmaData<'a> {
    e: BundleChart,
    es: BundleChart,
    hat_e: BundleChart,
    hat_es: BundleChart,
    sharp_p: BundleMorphism,
    sharp_j: BundleMorphism,
    p_c: &'a dyn BracketSource,
    j_hat: &'a dyn BracketSource,
    j_hat_c: &'a dyn BracketSource,
    j_dual: &'a dyn BracketSource,
    l_dual: &'a dyn BracketSource,
    l_hat_dual: &'a dyn BracketSource,
}

fn run(name: &str, d: &LemmaData, opts: &LemmaOptions) -> Result<Report> {
    let fe = battery(&d.e, opts);
    let fes = battery(&d.es, opts);
    let mut rep = Report::new(name);

    // the transports send monomials to single monomials times an
    // exponential, so injectivity on the battery is distinctness
    let inj = (|| -> Result<Option<String>> {
        let mut seen = std::collections::BTreeSet::new();
        for f in &fe {
            let b = breve(&d.e, &d.hat_e, f)?;
            if b.len() != 1 || !seen.insert(d.hat_e.total().render(&b)) {
                return Ok(Some(format!("breve not injective at {}", d.e.total().render(f))));
            }
        }
        seen.clear();
        for f in &fes {
            let t = tilde(&d.es, &d.hat_es, f)?;
            if t.len() != 1 || !seen.insert(d.hat_es.total().render(&t)) {
                return Ok(Some(format!("tilde not injective at {}", d.es.total().render(f))));
            }
        }
        Ok(None)
    })();
    rep.push_result("(a)", "breve and tilde are injective on the battery", inj);

    let sharp_rel = (|| -> Result<Option<String>> {
        let mut fails = Vec::new();
        for f in &fe {
            let lhs = d.sharp_p.pullback(&breve(&d.e, &d.hat_e, f)?)?;
            let rhs = tilde(&d.es, &d.hat_es, &d.sharp_j.pullback(f)?)?;
            let r = lhs - rhs;
            if !r.is_zero() {
                fails.push((d.e.total().render(f), d.hat_es.total().render(&r)));
            }
        }
        Ok(summarize(fails))
    })();
    rep.push_result("(b)", "breve(phi) o sharp_P = tilde(phi o sharp_J)", sharp_rel);

    let pairs = |src: &BundleChart,
                     dst: &BundleChart,
                     fs: &[ExpPoly],
                     upper: &dyn BracketSource,
                     lower: &dyn BracketSource,
                     transport: fn(&BundleChart, &BundleChart, &ExpPoly) -> Result<ExpPoly>|
     -> Result<Option<String>> {
        let mut fails = Vec::new();
        for a in fs {
            let ta = transport(src, dst, a)?;
            for b in fs {
                let tb = transport(src, dst, b)?;
                let r = upper.bracket(&ta, &tb)? - transport(src, dst, &lower.bracket(a, b)?)?;
                if !r.is_zero() {
                    fails.push((
                        format!("({}, {})", src.total().render(a), src.total().render(b)),
                        dst.total().render(&r),
                    ));
                }
            }
        }
        Ok(summarize(fails))
    };
    let c = pairs(&d.e, &d.hat_e, &fe, d.p_c, d.j_hat, breve);
    rep.push_result("(c)", "{breve phi, breve psi}_{P^c} = breve {phi, psi}_Jhat", c);
    let dd = pairs(&d.es, &d.hat_es, &fes, d.l_hat_dual, d.j_dual, tilde);
    rep.push_result("(d)", "{tilde phi, tilde psi}_L = tilde {phi, psi}_J*", dd);

    let linear = |b: &BundleChart, p: &dyn BracketSource| -> Result<Option<String>> {
        let fs = linear_battery(b);
        let mut fails = Vec::new();
        for x in &fs {
            for y in &fs {
                let r = p.bracket(x, y)?;
                if b.linear_coefficients(&r).is_err() {
                    fails.push((
                        format!("({}, {})", b.total().render(x), b.total().render(y)),
                        b.total().render(&r),
                    ));
                }
            }
        }
        Ok(summarize(fails))
    };
    rep.push_result("(e)", "linear functions close under Jhat^c", linear(&d.e, d.j_hat_c));
    rep.push_result("(f)", "linear functions close under the linear Poisson structure", linear(&d.es, d.l_dual));
    Ok(rep)
}

/// Lemma checks for a first-order bidifferential operator `J` on `M`:
/// Poissonization, Jacobi lift and its tangent lift, against the
/// canonical structures on `T*M x R`.
pub fn lemma_first_order_suite(j: &FirstOrderBiDiffOp, opts: &LemmaOptions) -> Result<Report> {
    let base = j.chart();
    let e = BundleChart::first_order(base)?;
    let es = BundleChart::first_order_dual(base)?;
    let hb = hat_base(base)?;
    let hat_e = BundleChart::tangent(&hb)?;
    let hat_es = BundleChart::cotangent(&hb)?;
    let pj = poissonization(j)?;
    let sharp_p = BundleMorphism::sharp(&pj, &hat_es, &hat_e)?;
    let sharp_j = BundleMorphism::sharp(&j.as_frame_tensor(), &es, &e)?;
    let p_c = complete_lift_tangent(&pj)?;
    let j_hat = jacobi_lift(j)?;
    let j_hat_c = poisson_lift(j)?;
    let j_dual = JacobiAlgebroidSpec::first_order(base).canonical_jacobi_dual(&es)?;
    let l_dual = AlgebroidSpec::first_order(base).linear_poisson(&es)?;
    let l_hat_dual = AlgebroidSpec::tangent(&hb).linear_poisson(&hat_es)?;
    let data = LemmaData {
        e,
        es,
        hat_e,
        hat_es,
        sharp_p,
        sharp_j,
        p_c: &p_c,
        j_hat: &j_hat,
        j_hat_c: &j_hat_c,
        j_dual: &j_dual,
        l_dual: &l_dual,
        l_hat_dual: &l_hat_dual,
    };
    run("lemma first-order", &data, opts)
}

/// The same checks for a bivector `J` over a Jacobi algebroid `(E, phi)`.
pub fn lemma_jacobi_algebroid_suite(
    jspec: &JacobiAlgebroidSpec,
    j: &MultiVector,
    opts: &LemmaOptions,
) -> Result<Report> {
    let spec = jspec.algebroid();
    let e = spec.total_chart()?;
    let es = spec.dual_chart()?;
    let hat = jspec.extend_hat()?;
    let hat_e = hat_bundle(&e, false)?;
    let hat_es = hat_bundle(&es, true)?;
    let p = p_phi(&hat, j)?;
    let sharp_p = BundleMorphism::sharp(&p.expand(), &hat_es, &hat_e)?;
    let sharp_j = BundleMorphism::sharp(&j.expand(), &es, &e)?;
    let p_c = complete_lift(&hat, &hat_e, &p)?;
    let j_hat = jacobi_lift_algebroid(jspec, &e, j)?;
    let j_hat_c = poisson_lift_algebroid(jspec, &e, j)?;
    let j_dual = jspec.canonical_jacobi_dual(&es)?;
    let l_dual = spec.linear_poisson(&es)?;
    let l_hat_dual = hat.linear_poisson(&hat_es)?;
    let data = LemmaData {
        e,
        es,
        hat_e,
        hat_es,
        sharp_p,
        sharp_j,
        p_c: &p_c,
        j_hat: &j_hat,
        j_hat_c: &j_hat_c,
        j_dual: &j_dual,
        l_dual: &l_dual,
        l_hat_dual: &l_hat_dual,
    };
    run("lemma algebroid", &data, opts)
}
