//! Poisson/Jacobi predicates, relatedness of brackets under bundle
//! morphisms, and executable characterization suites.

mod battery;
mod lemmas;
mod theorems;

pub use battery::battery;
pub use lemmas::{lemma_first_order_suite, lemma_jacobi_algebroid_suite, LemmaOptions};
pub use theorems::{
    theorem10_suite, theorem6_suite, theorem7_suite, theorem8_suite, Theorem6Witness,
};

use serde::Serialize;

use crate::coeff::ExpPoly;
use crate::error::Result;
use crate::geometry::bidiff::{BracketSource, FirstOrderBiDiffOp};
use crate::geometry::bundle::BundleMorphism;
use crate::geometry::skew::{CovariantField, MultiVector};
use crate::calculus::schouten;

/// One checked condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Record {
    pub label: String,
    pub description: String,
    pub passed: bool,
    /// Nonzero residual on failure, empty on success.
    pub residual: String,
    /// Informational records do not take part in the equivalence pattern
    /// or in the overall verdict.
    pub informational: bool,
}

/// Outcome of a suite: one record per condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub suite: String,
    pub records: Vec<Record>,
    /// Groups of labels whose truth values must agree.
    pub equivalences: Vec<Vec<String>>,
}

impl Report {
    pub fn new(suite: &str) -> Self {
        Report {
            suite: suite.to_string(),
            records: Vec::new(),
            equivalences: Vec::new(),
        }
    }

    /// Adds a record; `residual` is `None` on success.
    pub fn push(&mut self, label: &str, description: &str, residual: Option<String>) {
        self.records.push(Record {
            label: label.to_string(),
            description: description.to_string(),
            passed: residual.is_none(),
            residual: residual.unwrap_or_default(),
            informational: false,
        });
    }

    pub fn push_info(&mut self, label: &str, description: &str, residual: Option<String>) {
        self.push(label, description, residual);
        self.records.last_mut().unwrap().informational = true;
    }

    /// Adds a record from a fallible check; errors count as failures.
    pub fn push_result(&mut self, label: &str, description: &str, r: Result<Option<String>>) {
        let residual = match r {
            Ok(r) => r,
            Err(e) => Some(format!("error: {e}")),
        };
        self.push(label, description, residual);
    }

    pub fn expect_equivalent(&mut self, labels: &[&str]) {
        self.equivalences
            .push(labels.iter().map(|s| s.to_string()).collect());
    }

    pub fn get(&self, label: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.label == label)
    }

    pub fn passed(&self, label: &str) -> bool {
        self.get(label).is_some_and(|r| r.passed)
    }

    pub fn all_passed(&self) -> bool {
        self.records.iter().all(|r| r.passed || r.informational)
    }

    /// True if every equivalence group has a single truth value.
    pub fn equivalences_hold(&self) -> bool {
        self.equivalences.iter().all(|g| {
            let vals: Vec<bool> = g.iter().filter_map(|l| self.get(l)).map(|r| r.passed).collect();
            vals.windows(2).all(|w| w[0] == w[1])
        })
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("suite {}\n", self.suite);
        let width = self.records.iter().map(|r| r.label.len()).max().unwrap_or(0);
        for r in &self.records {
            let status = match (r.passed, r.informational) {
                (true, false) => "pass",
                (false, false) => "FAIL",
                (true, true) => "info pass",
                (false, true) => "info fail",
            };
            out.push_str(&format!("  {:<width$}  {:<9}  {}\n", r.label, status, r.description));
            if !r.passed {
                out.push_str(&format!("  {:<width$}  residual: {}\n", "", r.residual));
            }
        }
        let verdict = if self.all_passed() { "all passed" } else { "some failed" };
        let eq = if self.equivalences_hold() { "consistent" } else { "BROKEN" };
        out.push_str(&format!("  verdict: {verdict}; equivalence pattern: {eq}\n"));
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v["all_passed"] = self.all_passed().into();
        v["equivalences_hold"] = self.equivalences_hold().into();
        v
    }
}

/// `[[L, L]] = 0`.
pub fn is_poisson(l: &MultiVector) -> Result<bool> {
    Ok(schouten(l, l)?.is_zero())
}

/// Residuals of `[[G, L]] = 0` and `[[L, L]] + 2 G ^ L = 0`.
pub fn jacobi_residuals(l: &MultiVector, g: &MultiVector) -> Result<(MultiVector, MultiVector)> {
    let gl = schouten(g, l)?;
    let ll = schouten(l, l)?.try_add(&g.wedge(l)?.scale_int(2))?;
    Ok((gl, ll))
}

/// A skew pair `(L, G)` satisfying both Jacobi identities.
pub fn is_jacobi(j: &FirstOrderBiDiffOp) -> Result<bool> {
    match j.as_skew() {
        None => Ok(false),
        Some((l, g)) => {
            let (a, b) = jacobi_residuals(&l, &g)?;
            Ok(a.is_zero() && b.is_zero())
        }
    }
}

/// Per-pair residuals of `{u o F, v o F}_A - {u, v}_B o F` over ordered
/// pairs of target coordinates, with the constant 1 added for operators
/// that are not biderivations. Only nonzero residuals are returned.
pub fn related_residuals(
    f: &BundleMorphism,
    a: &dyn BracketSource,
    b: &dyn BracketSource,
    with_unit: bool,
) -> Result<Vec<(String, String)>> {
    let tgt = f.target().total();
    let src = f.source().total();
    let mut gens: Vec<(String, ExpPoly)> = (0..tgt.dim())
        .map(|i| (tgt.var(i).name.clone(), tgt.coord(i)))
        .collect();
    if with_unit {
        gens.insert(0, ("1".into(), tgt.one()));
    }
    let pulled: Vec<ExpPoly> = gens
        .iter()
        .map(|(_, u)| f.pullback(u))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (i, (nu, u)) in gens.iter().enumerate() {
        for (j, (nv, v)) in gens.iter().enumerate() {
            let lhs = a.bracket(&pulled[i], &pulled[j])?;
            let rhs = f.pullback(&b.bracket(u, v)?)?;
            let r = lhs - rhs;
            if !r.is_zero() {
                out.push((format!("{{{nu}, {nv}}}"), src.render(&r)));
            }
        }
    }
    Ok(out)
}

/// Collapses pair residuals into a record residual (first few failures).
pub fn summarize(residuals: Vec<(String, String)>) -> Option<String> {
    if residuals.is_empty() {
        return None;
    }
    let shown: Vec<String> = residuals
        .iter()
        .take(3)
        .map(|(p, r)| format!("{p}: {r}"))
        .collect();
    let more = if residuals.len() > 3 {
        format!(" (+{} more pairs)", residuals.len() - 3)
    } else {
        String::new()
    };
    Some(format!("{}{more}", shown.join("; ")))
}

/// Relatedness of 2-tensors (biderivations) as a report with one record
/// per ordered coordinate pair.
pub fn check_related_tensor(
    f: &BundleMorphism,
    a: &dyn BracketSource,
    b: &dyn BracketSource,
) -> Result<Report> {
    related_report("related tensors", f, a, b, false)
}

/// Relatedness of first-order bidifferential operators; the constant 1
/// joins the coordinate generators.
pub fn check_related_bidiff(
    f: &BundleMorphism,
    a: &dyn BracketSource,
    b: &dyn BracketSource,
) -> Result<Report> {
    related_report("related operators", f, a, b, true)
}

fn related_report(
    name: &str,
    f: &BundleMorphism,
    a: &dyn BracketSource,
    b: &dyn BracketSource,
    with_unit: bool,
) -> Result<Report> {
    let failures = related_residuals(f, a, b, with_unit)?;
    let tgt = f.target().total();
    let mut names: Vec<String> = tgt.names();
    if with_unit {
        names.insert(0, "1".into());
    }
    let mut rep = Report::new(name);
    for u in &names {
        for v in &names {
            let label = format!("{{{u}, {v}}}");
            let r = failures.iter().find(|(p, _)| *p == label).map(|(_, r)| r.clone());
            rep.push(&label, "bracket of pulled-back coordinates", r);
        }
    }
    Ok(rep)
}

/// `F(mu)` for a fiber-linear `F: E* -> E` and a section of `E*`.
pub fn apply_morphism(f: &BundleMorphism, mu: &CovariantField) -> Result<MultiVector> {
    let src = f.source();
    let tgt = f.target();
    let mut out = MultiVector::zero(tgt.base(), tgt.rank(), 1);
    for j in 0..tgt.rank() {
        let coeffs = src.linear_coefficients(f.image(tgt.fiber_var(j)))?;
        let mut c = tgt.base().zero();
        for (i, ci) in coeffs.iter().enumerate() {
            c.add_scaled(ci, &mu.get(&[i]));
        }
        out.add_term(&[j], c);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::chart::Chart;

    #[test]
    fn poisson_predicate() {
        let m = Chart::base(&["x", "y", "z"]).unwrap().into_ref();
        let b = |i: &[usize]| MultiVector::coordinate_basis(&m, i);
        let so3 = b(&[1, 2])
            .scale(&m.coord(0))
            .plus(&b(&[2, 0]).scale(&m.coord(1)))
            .plus(&b(&[0, 1]).scale(&m.coord(2)));
        assert!(is_poisson(&so3).unwrap());
        // dual to V = (y, 0, 1), which has V . curl V = -1
        let bad = b(&[0, 1]).plus(&b(&[1, 2]).scale(&m.coord(1)));
        assert!(!is_poisson(&bad).unwrap());
    }

    #[test]
    fn jacobi_predicate_on_contact() {
        let m = Chart::base(&["q", "p", "u"]).unwrap().into_ref();
        let b = |i: &[usize]| MultiVector::coordinate_basis(&m, i);
        let good = b(&[0, 1]).plus(&b(&[2, 1]).scale(&m.coord(1)));
        assert!(is_jacobi(&FirstOrderBiDiffOp::skew(&good, &b(&[2])).unwrap()).unwrap());
        assert!(!is_jacobi(&FirstOrderBiDiffOp::skew(&b(&[0, 1]), &b(&[2])).unwrap()).unwrap());
    }

    #[test]
    fn report_rendering() {
        let mut r = Report::new("demo");
        r.push("a", "first", None);
        r.push("bb", "second", Some("x".into()));
        r.expect_equivalent(&["a", "bb"]);
        assert!(!r.all_passed());
        assert!(!r.equivalences_hold());
        assert_eq!(
            r.render_text(),
            "suite demo\n  a   pass       first\n  bb  FAIL       second\n      residual: x\n  verdict: some failed; equivalence pattern: BROKEN\n"
        );
        assert_eq!(r.to_json()["records"][1]["residual"], "x");
    }
}
