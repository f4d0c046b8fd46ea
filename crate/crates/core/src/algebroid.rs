//! Lie and Jacobi algebroids given by structure functions and an anchor on
//! a local frame, with their Cartan calculus.

use std::collections::BTreeMap;

use crate::coeff::ExpPoly;
use crate::error::{Error, Result};
use crate::geometry::bundle::BundleChart;
use crate::geometry::chart::{same_chart, ChartRef, Prolongation, Role};
use crate::geometry::skew::{CovariantField, MultiVector};
use crate::geometry::tensor::{contract_first, pair, TensorField};
use crate::geometry::PolyDiffOp;
use crate::rational::Rational;

/// `[e_i, e_j] = c^k_ij e_k`, `rho(e_i) = d^a_i d/dx^a`, coefficients on `base`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebroidSpec {
    base: ChartRef,
    rank: usize,
    structure: BTreeMap<(usize, usize), BTreeMap<usize, ExpPoly>>,
    anchor: Vec<BTreeMap<usize, ExpPoly>>,
}

impl AlgebroidSpec {
    /// Rank-`rank` bundle with zero bracket and zero anchor.
    pub fn new(base: &ChartRef, rank: usize) -> Self {
        AlgebroidSpec {
            base: base.clone(),
            rank,
            structure: BTreeMap::new(),
            anchor: vec![BTreeMap::new(); rank],
        }
    }

    /// The tangent algebroid of `chart` on its coordinate frame.
    pub fn tangent(chart: &ChartRef) -> Self {
        let mut out = Self::new(chart, chart.dim());
        for i in 0..chart.dim() {
            out.set_anchor(i, i, chart.one());
        }
        out
    }

    /// First-order differential operators `TM + R` on the frame
    /// `(d/dx_1, ..., d/dx_n, I)`.
    pub fn first_order(base: &ChartRef) -> Self {
        let mut out = Self::new(base, base.dim() + 1);
        for i in 0..base.dim() {
            out.set_anchor(i, i, base.one());
        }
        out
    }

    /// `so(3)` as a bundle of Lie algebras over `base`: `c^k_ij = eps_ijk`.
    pub fn so3(base: &ChartRef) -> Self {
        let mut out = Self::new(base, 3);
        out.set_bracket(0, 1, 2, base.one());
        out.set_bracket(1, 2, 0, base.one());
        out.set_bracket(2, 0, 1, base.one());
        out
    }

    /// `so(3) + R` with the extra element anchored to the first base
    /// direction. It carries the closed, nonzero cocycle `e*4`.
    pub fn so3_extended(base: &ChartRef) -> Self {
        let mut out = Self::new(base, 4);
        out.set_bracket(0, 1, 2, base.one());
        out.set_bracket(1, 2, 0, base.one());
        out.set_bracket(2, 0, 1, base.one());
        out.set_anchor(3, 0, base.one());
        out
    }

    /// Heisenberg algebra: `[e_1, e_2] = e_3`.
    pub fn heisenberg(base: &ChartRef) -> Self {
        let mut out = Self::new(base, 3);
        out.set_bracket(0, 1, 2, base.one());
        out
    }

    pub fn base(&self) -> &ChartRef {
        &self.base
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Sets `c^k_ij = coeff` and `c^k_ji = -coeff`.
    pub fn set_bracket(&mut self, i: usize, j: usize, k: usize, coeff: ExpPoly) {
        self.set_structure_entry(j, i, k, -&coeff);
        self.set_structure_entry(i, j, k, coeff);
    }

    /// Sets a single entry `c^k_ij` without touching `c^k_ji`.
    pub fn set_structure_entry(&mut self, i: usize, j: usize, k: usize, coeff: ExpPoly) {
        assert!(i < self.rank && j < self.rank && k < self.rank, "frame index out of range");
        self.base.check_poly(&coeff).expect("structure function off the base chart");
        let row = self.structure.entry((i, j)).or_default();
        if coeff.is_zero() {
            row.remove(&k);
        } else {
            row.insert(k, coeff);
        }
        if row.is_empty() {
            self.structure.remove(&(i, j));
        }
    }

    /// Sets `d^a_i`.
    pub fn set_anchor(&mut self, i: usize, a: usize, coeff: ExpPoly) {
        assert!(i < self.rank && a < self.base.dim(), "index out of range");
        self.base.check_poly(&coeff).expect("anchor off the base chart");
        if coeff.is_zero() {
            self.anchor[i].remove(&a);
        } else {
            self.anchor[i].insert(a, coeff);
        }
    }

    /// `c^k_ij`.
    pub fn c(&self, i: usize, j: usize, k: usize) -> ExpPoly {
        self.structure
            .get(&(i, j))
            .and_then(|r| r.get(&k))
            .cloned()
            .unwrap_or_else(|| self.base.zero())
    }

    /// Nonzero `(k, c^k_ij)`.
    pub fn structure(&self, i: usize, j: usize) -> impl Iterator<Item = (usize, &ExpPoly)> {
        self.structure
            .get(&(i, j))
            .into_iter()
            .flat_map(|r| r.iter().map(|(k, v)| (*k, v)))
    }

    /// `d^a_i`.
    pub fn d(&self, i: usize, a: usize) -> ExpPoly {
        self.anchor[i]
            .get(&a)
            .cloned()
            .unwrap_or_else(|| self.base.zero())
    }

    pub fn anchor_entries(&self, i: usize) -> impl Iterator<Item = (usize, &ExpPoly)> {
        self.anchor[i].iter().map(|(a, v)| (*a, v))
    }

    /// `rho(e_i)(f)`.
    pub fn anchor_apply(&self, i: usize, f: &ExpPoly) -> ExpPoly {
        let mut out = self.base.zero();
        for (a, d) in &self.anchor[i] {
            out.add_scaled(d, &f.derivative(*a));
        }
        out
    }

    /// `rho(X)(f)` for a section `X`.
    pub fn anchor_apply_section(&self, x: &MultiVector, f: &ExpPoly) -> ExpPoly {
        let mut out = self.base.zero();
        for (k, v) in x.comps() {
            out.add_scaled(v, &self.anchor_apply(k[0], f));
        }
        out
    }

    /// `rho(X)` as a vector field on the base.
    pub fn anchor_of(&self, x: &MultiVector) -> MultiVector {
        let mut out = MultiVector::coordinate_zero(&self.base, 1);
        for (k, v) in x.comps() {
            for (a, d) in &self.anchor[k[0]] {
                out.add_term(&[*a], v * d);
            }
        }
        out
    }

    pub fn check_section<K: crate::geometry::Variance>(
        &self,
        x: &crate::geometry::SkewField<K>,
    ) -> Result<()> {
        same_chart(x.chart(), &self.base)?;
        if x.rank() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: x.rank(),
            });
        }
        Ok(())
    }

    pub fn frame_element(&self, i: usize) -> MultiVector {
        MultiVector::basis(&self.base, self.rank, &[i])
    }

    pub fn coframe_element(&self, i: usize) -> CovariantField {
        CovariantField::basis(&self.base, self.rank, &[i])
    }

    /// `[X, Y]` for sections, from the structure functions and axiom
    /// `[X, fY] = f[X, Y] + rho(X)(f) Y`.
    pub fn section_bracket(&self, x: &MultiVector, y: &MultiVector) -> Result<MultiVector> {
        self.check_section(x)?;
        self.check_section(y)?;
        for s in [x, y] {
            if s.degree() != 1 {
                return Err(Error::DegreeMismatch {
                    expected: 1,
                    found: s.degree(),
                });
            }
        }
        let mut out = MultiVector::zero(&self.base, self.rank, 1);
        for (a, p) in x.comps() {
            for (b, q) in y.comps() {
                let pq = p * q;
                for (k, c) in self.structure(a[0], b[0]) {
                    out.add_term(&[k], &pq * c);
                }
            }
            for (b, q) in y.comps() {
                out.add_term(b, p * &self.anchor_apply(a[0], q));
            }
        }
        for (b, q) in y.comps() {
            for (a, p) in x.comps() {
                out.add_term(a, -(q * &self.anchor_apply(b[0], p)));
            }
        }
        Ok(out)
    }

    /// Checks skewness of `c`, the Jacobi identity on frame triples, and
    /// that the anchor preserves brackets on frame pairs.
    pub fn validate(&self) -> Validation {
        let mut issues = Vec::new();
        let names = self.base.names();
        for i in 0..self.rank {
            for j in 0..self.rank {
                for k in 0..self.rank {
                    let s = &self.c(i, j, k) + &self.c(j, i, k);
                    if !s.is_zero() {
                        issues.push(format!(
                            "c^{}_{}{} + c^{}_{}{} = {} (not skew)",
                            k + 1,
                            i + 1,
                            j + 1,
                            k + 1,
                            j + 1,
                            i + 1,
                            s.render(&names)
                        ));
                    }
                }
            }
        }
        let e: Vec<MultiVector> = (0..self.rank).map(|i| self.frame_element(i)).collect();
        let br = |a: &MultiVector, b: &MultiVector| self.section_bracket(a, b).expect("frame sections");
        for i in 0..self.rank {
            for j in i + 1..self.rank {
                for k in j + 1..self.rank {
                    let jac = br(&br(&e[i], &e[j]), &e[k])
                        .plus(&br(&br(&e[j], &e[k]), &e[i]))
                        .plus(&br(&br(&e[k], &e[i]), &e[j]));
                    if !jac.is_zero() {
                        issues.push(format!(
                            "Jacobi identity fails on (e{}, e{}, e{}): {}",
                            i + 1,
                            j + 1,
                            k + 1,
                            jac.render()
                        ));
                    }
                }
            }
        }
        let tangent = AlgebroidSpec::tangent(&self.base);
        for i in 0..self.rank {
            for j in i + 1..self.rank {
                let lhs = self.anchor_of(&br(&e[i], &e[j]));
                let rhs = tangent
                    .section_bracket(&self.anchor_of(&e[i]), &self.anchor_of(&e[j]))
                    .expect("vector fields");
                let diff = lhs.minus(&rhs);
                if !diff.is_zero() {
                    issues.push(format!(
                        "anchor does not preserve [e{}, e{}]: {}",
                        i + 1,
                        j + 1,
                        diff.render()
                    ));
                }
            }
        }
        Validation { issues }
    }

    /// Exterior derivative of a form over the frame.
    pub fn d_form(&self, mu: &CovariantField) -> Result<CovariantField> {
        self.check_section(mu)?;
        let k = mu.degree();
        let mut out = CovariantField::zero(&self.base, self.rank, k + 1);
        if k + 1 > self.rank {
            return Ok(out);
        }
        for tuple in increasing_tuples(self.rank, k + 1) {
            let mut val = self.base.zero();
            for a in 0..=k {
                let mut rest = tuple.clone();
                let ia = rest.remove(a);
                let term = self.anchor_apply(ia, &mu.get(&rest));
                if a % 2 == 0 {
                    val.add_assign_ref(&term);
                } else {
                    val.add_assign_ref(&-term);
                }
            }
            for a in 0..=k {
                for b in a + 1..=k {
                    let mut rest: Vec<usize> = Vec::with_capacity(k);
                    for (pos, &i) in tuple.iter().enumerate() {
                        if pos != a && pos != b {
                            rest.push(i);
                        }
                    }
                    for (m, c) in self.structure(tuple[a], tuple[b]) {
                        let mut idx = vec![m];
                        idx.extend_from_slice(&rest);
                        let term = c * &mu.get(&idx);
                        if (a + b) % 2 == 0 {
                            val.add_assign_ref(&term);
                        } else {
                            val.add_assign_ref(&-term);
                        }
                    }
                }
            }
            out.add_term(&tuple, val);
        }
        Ok(out)
    }

    /// `i_X mu` for a section `X`; zero on functions.
    pub fn interior(&self, x: &MultiVector, mu: &CovariantField) -> Result<CovariantField> {
        self.check_section(x)?;
        self.check_section(mu)?;
        if mu.degree() == 0 {
            return Err(Error::DegreeMismatch {
                expected: 1,
                found: 0,
            });
        }
        mu.interior(x)
    }

    /// `L_X = i_X d + d i_X`.
    pub fn lie_derivative(&self, x: &MultiVector, mu: &CovariantField) -> Result<CovariantField> {
        let dmu = self.d_form(mu)?;
        let first = self.interior(x, &dmu)?;
        if mu.degree() == 0 {
            return Ok(first);
        }
        first.try_add(&self.d_form(&self.interior(x, mu)?)?)
    }

    /// `[[X, f]] = rho(X)(f)` as a degree-0 field.
    pub fn scalar(&self, f: ExpPoly) -> MultiVector {
        MultiVector::scalar(&self.base, self.rank, f)
    }

    /// `i_P(alpha) d beta - i_P(beta) d alpha + d(P(alpha, beta))` for a
    /// 2-tensor `P` over the frame, with `d` replaced by `d^phi` when a
    /// cocycle is given.
    pub fn dual_bracket(
        &self,
        p: &TensorField,
        alpha: &CovariantField,
        beta: &CovariantField,
        phi: Option<&CovariantField>,
    ) -> Result<CovariantField> {
        same_chart(p.chart(), &self.base)?;
        let d = |mu: &CovariantField| -> Result<CovariantField> {
            match phi {
                Some(phi) => d_phi_with(self, phi, mu),
                None => self.d_form(mu),
            }
        };
        let sa = contract_first(p, alpha)?;
        let sb = contract_first(p, beta)?;
        let t1 = self.interior(&sa, &d(beta)?)?;
        let t2 = self.interior(&sb, &d(alpha)?)?;
        let f = CovariantField::scalar(&self.base, self.rank, pair(p, alpha, beta)?);
        t1.try_sub(&t2)?.try_add(&d(&f)?)
    }

    /// `sharp_P(alpha) = P(alpha, .)`.
    pub fn sharp_section(&self, p: &TensorField, alpha: &CovariantField) -> Result<MultiVector> {
        contract_first(p, alpha)
    }

    /// The linear Poisson tensor on the dual bundle:
    /// `1/2 c^k_ij xi_k d/dxi_i ^ d/dxi_j + d^a_i d/dxi_i ^ d/dx^a`.
    pub fn linear_poisson(&self, dual: &BundleChart) -> Result<MultiVector> {
        self.check_bundle(dual)?;
        let t = dual.total();
        let mut out = MultiVector::coordinate_zero(t, 2);
        let half = Rational::new(1, 2);
        for (&(i, j), row) in &self.structure {
            for (&k, c) in row {
                let coeff = (&dual.lift_base(c) * &t.coord(dual.fiber_var(k))).scale(&half);
                out.add_term(&[dual.fiber_var(i), dual.fiber_var(j)], coeff);
            }
        }
        for i in 0..self.rank {
            for (a, d) in &self.anchor[i] {
                out.add_term(&[dual.fiber_var(i), dual.base_var(*a)], dual.lift_base(d));
            }
        }
        Ok(out)
    }

    pub fn check_bundle(&self, b: &BundleChart) -> Result<()> {
        same_chart(b.base(), &self.base)?;
        if b.rank() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: b.rank(),
            });
        }
        Ok(())
    }

    /// Default total-space chart `(x, y1, ..., yn)`.
    pub fn total_chart(&self) -> Result<BundleChart> {
        let names: Vec<String> = (1..=self.rank).map(|i| format!("y{i}")).collect();
        BundleChart::with_fibers(&self.base, &names, false)
    }

    /// Default dual chart `(x, xi1, ..., xin)`.
    pub fn dual_chart(&self) -> Result<BundleChart> {
        let names: Vec<String> = (1..=self.rank).map(|i| format!("xi{i}")).collect();
        BundleChart::with_fibers(&self.base, &names, true)
    }

    /// The same structure on a larger chart containing the base.
    pub fn extend_chart(&self, chart: &ChartRef) -> Result<AlgebroidSpec> {
        let map = chart.embedding_of(&self.base)?;
        let n = chart.dim();
        let mut out = AlgebroidSpec::new(chart, self.rank);
        for (&(i, j), row) in &self.structure {
            for (&k, c) in row {
                out.set_structure_entry(i, j, k, c.reindex(n, &map));
            }
        }
        for i in 0..self.rank {
            for (a, d) in &self.anchor[i] {
                out.set_anchor(i, map[*a], d.reindex(n, &map));
            }
        }
        Ok(out)
    }
}

/// Outcome of [`AlgebroidSpec::validate`] / [`JacobiAlgebroidSpec::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Validation {
    pub issues: Vec<String>,
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Strictly increasing `k`-tuples from `0..n`.
pub fn increasing_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn d_phi_with(spec: &AlgebroidSpec, phi: &CovariantField, mu: &CovariantField) -> Result<CovariantField> {
    spec.d_form(mu)?.try_add(&phi.wedge(mu)?)
}

/// A Lie algebroid with a 1-cocycle `phi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiAlgebroidSpec {
    algebroid: AlgebroidSpec,
    phi: CovariantField,
}

impl JacobiAlgebroidSpec {
    pub fn new(algebroid: AlgebroidSpec, phi: CovariantField) -> Result<Self> {
        algebroid.check_section(&phi)?;
        if phi.degree() != 1 {
            return Err(Error::DegreeMismatch {
                expected: 1,
                found: phi.degree(),
            });
        }
        Ok(JacobiAlgebroidSpec { algebroid, phi })
    }

    /// `(TM + R, (0, 1))`.
    pub fn first_order(base: &ChartRef) -> Self {
        let a = AlgebroidSpec::first_order(base);
        let phi = a.coframe_element(base.dim());
        JacobiAlgebroidSpec { algebroid: a, phi }
    }

    pub fn algebroid(&self) -> &AlgebroidSpec {
        &self.algebroid
    }

    pub fn phi(&self) -> &CovariantField {
        &self.phi
    }

    pub fn base(&self) -> &ChartRef {
        self.algebroid.base()
    }

    pub fn rank(&self) -> usize {
        self.algebroid.rank()
    }

    pub fn validate(&self) -> Validation {
        let mut v = self.algebroid.validate();
        match self.algebroid.d_form(&self.phi) {
            Ok(dphi) if !dphi.is_zero() => v.issues.push(format!("d phi = {} (not closed)", dphi.render())),
            Ok(_) => {}
            Err(e) => v.issues.push(e.to_string()),
        }
        v
    }

    /// `d^phi mu = d mu + phi ^ mu`.
    pub fn d_phi(&self, mu: &CovariantField) -> Result<CovariantField> {
        d_phi_with(&self.algebroid, &self.phi, mu)
    }

    /// `L^phi_X = i_X d^phi + d^phi i_X`.
    pub fn lie_derivative_phi(&self, x: &MultiVector, mu: &CovariantField) -> Result<CovariantField> {
        let a = &self.algebroid;
        let first = a.interior(x, &self.d_phi(mu)?)?;
        if mu.degree() == 0 {
            return Ok(first);
        }
        first.try_add(&self.d_phi(&a.interior(x, mu)?)?)
    }

    /// `phi` as the fiber-linear function on the total space of `E`.
    pub fn iota_phi(&self, total: &BundleChart) -> Result<ExpPoly> {
        self.algebroid.check_bundle(total)?;
        total.iota(&self.phi)
    }

    /// The canonical Jacobi structure on the dual bundle as the pair
    /// `(Lambda + Delta ^ phi^v, -phi^v)`, i.e. `Lambda + Delta ^ phi^v - I ^ phi^v`.
    pub fn canonical_jacobi_dual(&self, dual: &BundleChart) -> Result<PolyDiffOp> {
        let lam = self.algebroid.linear_poisson(dual)?;
        let phiv = dual.vertical(&self.phi)?;
        let main = lam.try_add(&dual.liouville().wedge(&phiv)?)?;
        PolyDiffOp::new(main, phiv.neg())
    }

    /// The extended algebroid over `base x R(s)`: same brackets, anchor
    /// `rho(e_i) + phi_i d/ds`.
    pub fn extend_hat(&self) -> Result<AlgebroidSpec> {
        let base = self.base();
        let hat_base = base
            .prolong(&Prolongation::TimesR("s".into(), Role::AuxS))?
            .into_ref();
        let mut out = self.algebroid.extend_chart(&hat_base)?;
        let s = hat_base.dim() - 1;
        let map = hat_base.embedding_of(base)?;
        for (k, v) in self.phi.comps() {
            out.set_anchor(k[0], s, v.reindex(hat_base.dim(), &map));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::chart::Chart;

    fn line() -> ChartRef {
        Chart::base(&["x"]).unwrap().into_ref()
    }

    #[test]
    fn presets_validate() {
        let m = line();
        assert!(AlgebroidSpec::tangent(&m).validate().is_valid());
        assert!(AlgebroidSpec::so3(&m).validate().is_valid());
        assert!(AlgebroidSpec::heisenberg(&m).validate().is_valid());
        assert!(AlgebroidSpec::so3_extended(&m).validate().is_valid());
        let mut broken = AlgebroidSpec::heisenberg(&m);
        broken.set_structure_entry(1, 0, 2, m.one());
        let v = broken.validate();
        assert!(!v.is_valid());
        assert!(v.issues[0].contains("not skew"), "{:?}", v.issues);
    }

    #[test]
    fn so3_brackets() {
        let m = line();
        let a = AlgebroidSpec::so3(&m);
        let e = |i| a.frame_element(i);
        assert_eq!(a.section_bracket(&e(0), &e(1)).unwrap(), e(2));
        let xe2 = e(1).scale(&m.coord(0));
        assert_eq!(a.section_bracket(&e(0), &xe2).unwrap(), e(2).scale(&m.coord(0)));
    }

    #[test]
    fn exterior_derivative_examples() {
        let p = Chart::base(&["x", "y"]).unwrap().into_ref();
        let tm = AlgebroidSpec::tangent(&p);
        let xdy = CovariantField::coordinate_basis(&p, &[1]).scale(&p.coord(0));
        assert_eq!(tm.d_form(&xdy).unwrap(), CovariantField::coordinate_basis(&p, &[0, 1]));

        let m = line();
        let so3 = AlgebroidSpec::so3(&m);
        let d3 = so3.d_form(&so3.coframe_element(2)).unwrap();
        assert_eq!(d3, CovariantField::basis(&m, 3, &[0, 1]).neg());
        let f = CovariantField::scalar(&m, 3, m.coord(0));
        assert!(so3.d_form(&f).unwrap().is_zero());
    }

    #[test]
    fn cartan_on_plane() {
        let p = Chart::base(&["x", "y"]).unwrap().into_ref();
        let tm = AlgebroidSpec::tangent(&p);
        let dx = MultiVector::coordinate_basis(&p, &[0]);
        let xdy = CovariantField::coordinate_basis(&p, &[1]).scale(&p.coord(0));
        assert_eq!(
            tm.lie_derivative(&dx, &xdy).unwrap(),
            CovariantField::coordinate_basis(&p, &[1])
        );
    }

    #[test]
    fn linear_poisson_of_tangent_is_canonical() {
        let m = line();
        let tm = AlgebroidSpec::tangent(&m);
        let dual = tm.dual_chart().unwrap();
        let l = tm.linear_poisson(&dual).unwrap();
        // d/dxi ^ d/dx on (x, xi1)
        assert_eq!(l, MultiVector::coordinate_basis(dual.total(), &[1, 0]));
    }

    #[test]
    fn extended_anchor_sees_cocycle() {
        let m = line();
        let j = JacobiAlgebroidSpec::first_order(&m);
        assert!(j.validate().is_valid());
        let hat = j.extend_hat().unwrap();
        assert_eq!(hat.base().names(), ["x", "s"]);
        let s = hat.base().coord(1);
        let ds = hat.d_form(&CovariantField::scalar(hat.base(), hat.rank(), s)).unwrap();
        let phi_hat = j.phi().map_coeffs(hat.base(), |p| Ok(p.reindex(2, &[0]))).unwrap();
        assert_eq!(ds, phi_hat);
    }
}
