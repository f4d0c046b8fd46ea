//! Vector bundle charts, fiber-linear functions, vertical lifts, and
//! fiber-linear bundle morphisms over the identity.

use crate::coeff::ExpPoly;
use crate::error::{Error, Result};
use crate::geometry::chart::{same_chart, Chart, ChartRef, Prolongation, Role, Variable};
use crate::geometry::skew::{MultiVector, SkewField, Variance};
use crate::geometry::tensor::TensorField;

/// Coordinates `(x^a, y^i)` on the total space of a vector bundle with a
/// fixed local frame: `y^i` is the fiber coordinate dual to frame element `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleChart {
    total: ChartRef,
    base: ChartRef,
    base_map: Vec<usize>,
    fiber: Vec<usize>,
}

impl BundleChart {
    fn from_parts(base: &ChartRef, total: Chart, fiber_start: usize, rank: usize) -> Result<Self> {
        let total = total.into_ref();
        Ok(BundleChart {
            base_map: total.embedding_of(base)?,
            fiber: (fiber_start..fiber_start + rank).collect(),
            base: base.clone(),
            total,
        })
    }

    /// `TM` with coordinates `(x, v_x)`.
    pub fn tangent(base: &ChartRef) -> Result<Self> {
        let total = base.prolong(&Prolongation::Tangent)?;
        Self::from_parts(base, total, base.dim(), base.dim())
    }

    /// `T*M` with coordinates `(x, p_x)`.
    pub fn cotangent(base: &ChartRef) -> Result<Self> {
        let total = base.prolong(&Prolongation::Cotangent)?;
        Self::from_parts(base, total, base.dim(), base.dim())
    }

    /// `TM + R` with coordinates `(x, v_x, t)`; `t` is the fiber coordinate
    /// of the identity-operator direction.
    pub fn first_order(base: &ChartRef) -> Result<Self> {
        let total = base
            .prolong(&Prolongation::Tangent)?
            .prolong(&Prolongation::TimesR("t".into(), Role::AuxT))?;
        Self::from_parts(base, total, base.dim(), base.dim() + 1)
    }

    /// `T*M + R` with coordinates `(x, p_x, lambda)`.
    pub fn first_order_dual(base: &ChartRef) -> Result<Self> {
        let total = base
            .prolong(&Prolongation::Cotangent)?
            .prolong(&Prolongation::TimesR("lambda".into(), Role::AuxLambda))?;
        Self::from_parts(base, total, base.dim(), base.dim() + 1)
    }

    /// A bundle with one named fiber coordinate per frame element.
    pub fn with_fibers<S: AsRef<str>>(base: &ChartRef, names: &[S], dual: bool) -> Result<Self> {
        if !base.is_base_chart() {
            return Err(Error::NotBaseChart(base.to_string()));
        }
        let mut vars = base.vars().to_vec();
        for (i, n) in names.iter().enumerate() {
            vars.push(Variable {
                name: n.as_ref().to_string(),
                role: if dual {
                    Role::DualFiber(i)
                } else {
                    Role::BundleFiber(i)
                },
            });
        }
        Self::from_parts(base, Chart::new(vars)?, base.dim(), names.len())
    }

    pub fn total(&self) -> &ChartRef {
        &self.total
    }

    pub fn base(&self) -> &ChartRef {
        &self.base
    }

    pub fn rank(&self) -> usize {
        self.fiber.len()
    }

    /// Index in the total chart of the fiber coordinate of frame element `i`.
    pub fn fiber_var(&self, i: usize) -> usize {
        self.fiber[i]
    }

    pub fn fiber_vars(&self) -> &[usize] {
        &self.fiber
    }

    /// Index in the total chart of base coordinate `a`.
    pub fn base_var(&self, a: usize) -> usize {
        self.base_map[a]
    }

    pub fn base_vars(&self) -> &[usize] {
        &self.base_map
    }

    /// A base function pulled back along the projection.
    pub fn lift_base(&self, p: &ExpPoly) -> ExpPoly {
        assert_eq!(p.nvars(), self.base.dim(), "not a base function");
        p.reindex(self.total.dim(), &self.base_map)
    }

    /// The base function a fiber-constant function on the total space comes from.
    pub fn restrict_to_base(&self, p: &ExpPoly) -> Result<ExpPoly> {
        self.total.check_poly(p)?;
        let mut back = vec![usize::MAX; self.total.dim()];
        for (a, &i) in self.base_map.iter().enumerate() {
            back[i] = a;
        }
        let mut images = Vec::with_capacity(self.total.dim());
        for (i, &b) in back.iter().enumerate() {
            if b == usize::MAX {
                if p.depends_on(i) {
                    return Err(Error::Invalid(format!(
                        "function depends on fiber coordinate `{}`",
                        self.total.var(i).name
                    )));
                }
                images.push(ExpPoly::zero(self.base.dim()));
            } else {
                images.push(ExpPoly::var(self.base.dim(), b));
            }
        }
        p.substitute(self.base.dim(), &images)
    }

    /// The fiber-linear function `sum_i s_i(x) y^i` of a degree-1 field
    /// over the frame dual to this bundle's fibers.
    pub fn iota<K: Variance>(&self, s: &SkewField<K>) -> Result<ExpPoly> {
        same_chart(s.chart(), &self.base)?;
        if s.degree() != 1 {
            return Err(Error::DegreeMismatch {
                expected: 1,
                found: s.degree(),
            });
        }
        if s.rank() != self.rank() {
            return Err(Error::MissingFiber(format!(
                "section over {} frame elements, bundle has {} fiber coordinates",
                s.rank(),
                self.rank()
            )));
        }
        let mut out = self.total.zero();
        for (k, v) in s.comps() {
            out.add_assign_ref(&(&self.lift_base(v) * &self.total.coord(self.fiber[k[0]])));
        }
        Ok(out)
    }

    /// Reads a fiber-linear function back as its coefficient list.
    pub fn linear_coefficients(&self, p: &ExpPoly) -> Result<Vec<ExpPoly>> {
        self.total.check_poly(p)?;
        let parts = p.homogeneous_parts(&self.fiber);
        if parts.keys().any(|&d| d != 1) {
            return Err(Error::NotLinear(self.total.render(p)));
        }
        let mut coeffs = Vec::with_capacity(self.rank());
        let mut rest = p.clone();
        for &y in &self.fiber {
            let c = p.derivative(y);
            rest = &rest - &(&c * &self.total.coord(y));
            coeffs.push(self.restrict_to_base(&c)?);
        }
        debug_assert!(rest.is_zero());
        Ok(coeffs)
    }

    /// The Liouville field `sum_i y^i d/dy^i`.
    pub fn liouville(&self) -> MultiVector {
        let mut out = MultiVector::coordinate_zero(&self.total, 1);
        for &y in &self.fiber {
            out.add_term(&[y], self.total.coord(y));
        }
        out
    }

    /// Vertical lift of a skew field over the frame (a multisection of this
    /// bundle, or a form when the bundle is the dual one).
    pub fn vertical<K: Variance>(&self, x: &SkewField<K>) -> Result<MultiVector> {
        same_chart(x.chart(), &self.base)?;
        if x.rank() != self.rank() {
            return Err(Error::RankMismatch {
                expected: self.rank(),
                found: x.rank(),
            });
        }
        let mut out = MultiVector::coordinate_zero(&self.total, x.degree());
        for (k, v) in x.comps() {
            let idx: Vec<usize> = k.iter().map(|&i| self.fiber[i]).collect();
            out.add_term(&idx, self.lift_base(v));
        }
        Ok(out)
    }

    /// Vertical lift of a general tensor over the frame.
    pub fn vertical_tensor(&self, x: &TensorField) -> Result<TensorField> {
        same_chart(x.chart(), &self.base)?;
        if x.rank() != self.rank() {
            return Err(Error::RankMismatch {
                expected: self.rank(),
                found: x.rank(),
            });
        }
        let mut out = TensorField::coordinate_zero(&self.total, x.degree());
        for (k, v) in x.comps() {
            let idx: Vec<usize> = k.iter().map(|&i| self.fiber[i]).collect();
            out.add_term(&idx, self.lift_base(v));
        }
        Ok(out)
    }
}

/// A fiber-linear map between bundles over the same base, covering the
/// identity. Stored as the pullback of every target coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleMorphism {
    source: BundleChart,
    target: BundleChart,
    images: Vec<ExpPoly>,
}

impl BundleMorphism {
    /// `y^j o F = sum_i m[i][j](x) u^i` for source fibers `u` and target fibers `y`.
    pub fn from_matrix(source: &BundleChart, target: &BundleChart, m: &[Vec<ExpPoly>]) -> Result<Self> {
        same_chart(source.base(), target.base())?;
        if m.len() != source.rank() || m.iter().any(|r| r.len() != target.rank()) {
            return Err(Error::RankMismatch {
                expected: source.rank(),
                found: m.len(),
            });
        }
        let st = source.total();
        let mut images = vec![st.zero(); target.total().dim()];
        for (a, &ti) in target.base_vars().iter().enumerate() {
            images[ti] = st.coord(source.base_var(a));
        }
        for j in 0..target.rank() {
            let mut img = st.zero();
            for (i, row) in m.iter().enumerate() {
                source.base().check_poly(&row[j])?;
                img.add_assign_ref(&(&source.lift_base(&row[j]) * &st.coord(source.fiber_var(i))));
            }
            images[target.fiber_var(j)] = img;
        }
        Ok(BundleMorphism {
            source: source.clone(),
            target: target.clone(),
            images,
        })
    }

    /// `sharp_T(u) = T(u, .)` for a 2-tensor over the target frame.
    pub fn sharp(t: &TensorField, source: &BundleChart, target: &BundleChart) -> Result<Self> {
        same_chart(t.chart(), target.base())?;
        if t.degree() != 2 {
            return Err(Error::DegreeMismatch {
                expected: 2,
                found: t.degree(),
            });
        }
        if t.rank() != target.rank() || source.rank() != target.rank() {
            return Err(Error::RankMismatch {
                expected: target.rank(),
                found: t.rank(),
            });
        }
        let n = target.rank();
        let mut m = vec![vec![t.chart().zero(); n]; n];
        for (k, v) in t.comps() {
            m[k[0]][k[1]] = v.clone();
        }
        Self::from_matrix(source, target, &m)
    }

    pub fn source(&self) -> &BundleChart {
        &self.source
    }

    pub fn target(&self) -> &BundleChart {
        &self.target
    }

    /// Pullback of target coordinate `i`.
    pub fn image(&self, i: usize) -> &ExpPoly {
        &self.images[i]
    }

    pub fn images(&self) -> &[ExpPoly] {
        &self.images
    }

    /// `u o F` for a function on the target total space.
    pub fn pullback(&self, u: &ExpPoly) -> Result<ExpPoly> {
        self.target.total().check_poly(u)?;
        u.substitute(self.source.total().dim(), &self.images)
    }

    pub fn is_zero(&self) -> bool {
        self.target
            .fiber_vars()
            .iter()
            .all(|&j| self.images[j].is_zero())
    }

    /// Renders the fiber part as `v_x = -p_y, v_y = p_x`.
    pub fn render(&self) -> String {
        let tt = self.target.total();
        let st = self.source.total();
        self.target
            .fiber_vars()
            .iter()
            .map(|&j| format!("{} = {}", tt.var(j).name, st.render(&self.images[j])))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::skew::CovariantField;

    fn plane() -> ChartRef {
        Chart::base(&["x", "y"]).unwrap().into_ref()
    }

    #[test]
    fn iota_examples() {
        let m = Chart::base(&["x"]).unwrap().into_ref();
        let tm = BundleChart::tangent(&m).unwrap();
        let dx = CovariantField::coordinate_basis(&m, &[0]);
        assert_eq!(tm.total().render(&tm.iota(&dx).unwrap()), "v_x");

        let p = plane();
        let tp = BundleChart::tangent(&p).unwrap();
        let xdy = CovariantField::coordinate_basis(&p, &[1]).scale(&p.coord(0));
        assert_eq!(tp.total().render(&tp.iota(&xdy).unwrap()), "x*v_y");

        // (dx, 1) on TM + R gives v_x + t
        let t1 = BundleChart::first_order(&m).unwrap();
        let mut mf = CovariantField::zero(&m, 2, 1);
        mf.add_term(&[0], m.one());
        mf.add_term(&[1], m.one());
        assert_eq!(t1.total().render(&t1.iota(&mf).unwrap()), "v_x + t");
    }

    #[test]
    fn sharp_of_symplectic_plane() {
        let m = plane();
        let l = MultiVector::coordinate_basis(&m, &[0, 1]).expand();
        let f = BundleMorphism::sharp(
            &l,
            &BundleChart::cotangent(&m).unwrap(),
            &BundleChart::tangent(&m).unwrap(),
        )
        .unwrap();
        assert_eq!(f.render(), "v_x = -p_y, v_y = p_x");
        let zero = TensorField::coordinate_zero(&m, 2);
        let z = BundleMorphism::sharp(
            &zero,
            &BundleChart::cotangent(&m).unwrap(),
            &BundleChart::tangent(&m).unwrap(),
        )
        .unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn vertical_lifts() {
        let m = plane();
        let tm = BundleChart::tangent(&m).unwrap();
        let x = MultiVector::coordinate_basis(&m, &[0, 1]).scale(&m.coord(0));
        assert_eq!(tm.vertical(&x).unwrap().render(), "x * d/dv_x ^ d/dv_y");
    }

    #[test]
    fn linear_read_back() {
        let m = plane();
        let tm = BundleChart::tangent(&m).unwrap();
        let t = tm.total();
        let f = &(&t.coord(0) * &t.coord(2)) + &t.coord(3);
        let c = tm.linear_coefficients(&f).unwrap();
        assert_eq!(c, vec![m.coord(0), m.one()]);
        assert!(tm.linear_coefficients(&(&t.coord(2) * &t.coord(2))).is_err());
    }
}
