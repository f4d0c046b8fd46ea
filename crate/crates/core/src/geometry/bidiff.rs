//! First-order bidifferential operators and first-order polydifferential
//! operators written as `A1 + I ^ A2`.

use crate::coeff::ExpPoly;
use crate::error::{Error, Result};
use crate::geometry::chart::{same_chart, ChartRef};
use crate::geometry::skew::{CovariantField, MultiVector};
use crate::geometry::tensor::{pair, TensorField};

/// `df` on the coordinate coframe.
pub fn differential(chart: &ChartRef, f: &ExpPoly) -> CovariantField {
    let mut out = CovariantField::coordinate_zero(chart, 1);
    for i in 0..chart.dim() {
        out.add_term(&[i], f.derivative(i));
    }
    out
}

/// `X(f)` for a vector field on the coordinate frame.
pub fn apply_vector(x: &MultiVector, f: &ExpPoly) -> ExpPoly {
    assert_eq!(x.degree(), 1, "not a vector field");
    assert_eq!(x.rank(), x.chart().dim(), "not on the coordinate frame");
    let mut out = x.chart().zero();
    for (k, v) in x.comps() {
        out.add_scaled(v, &f.derivative(k[0]));
    }
    out
}

fn require_coordinate_frame(chart: &ChartRef, rank: usize) -> Result<()> {
    if rank != chart.dim() {
        return Err(Error::RankMismatch {
            expected: chart.dim(),
            found: rank,
        });
    }
    Ok(())
}

/// Anything that induces a bracket of functions on its chart.
pub trait BracketSource {
    fn bracket_chart(&self) -> &ChartRef;
    fn bracket(&self, f: &ExpPoly, g: &ExpPoly) -> Result<ExpPoly>;
}

impl BracketSource for TensorField {
    fn bracket_chart(&self) -> &ChartRef {
        self.chart()
    }

    /// `<T, df (x) dg>`.
    fn bracket(&self, f: &ExpPoly, g: &ExpPoly) -> Result<ExpPoly> {
        require_coordinate_frame(self.chart(), self.rank())?;
        let c = self.chart();
        pair(self, &differential(c, f), &differential(c, g))
    }
}

impl BracketSource for MultiVector {
    fn bracket_chart(&self) -> &ChartRef {
        self.chart()
    }

    /// `Lambda(df, dg)` for a bivector.
    fn bracket(&self, f: &ExpPoly, g: &ExpPoly) -> Result<ExpPoly> {
        require_coordinate_frame(self.chart(), self.rank())?;
        if self.degree() != 2 {
            return Err(Error::DegreeMismatch {
                expected: 2,
                found: self.degree(),
            });
        }
        let mut out = self.chart().zero();
        for (k, v) in self.comps() {
            let (i, j) = (k[0], k[1]);
            let t = &(&f.derivative(i) * &g.derivative(j)) - &(&f.derivative(j) * &g.derivative(i));
            out.add_scaled(v, &t);
        }
        Ok(out)
    }
}

/// `J = Lambda + I (x) Gamma1 + Gamma2 (x) I + alpha I (x) I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirstOrderBiDiffOp {
    lambda: TensorField,
    gamma1: MultiVector,
    gamma2: MultiVector,
    alpha: ExpPoly,
}

impl FirstOrderBiDiffOp {
    pub fn new(
        lambda: TensorField,
        gamma1: MultiVector,
        gamma2: MultiVector,
        alpha: ExpPoly,
    ) -> Result<Self> {
        let c = lambda.chart().clone();
        same_chart(&c, gamma1.chart())?;
        same_chart(&c, gamma2.chart())?;
        c.check_poly(&alpha)?;
        require_coordinate_frame(&c, lambda.rank())?;
        require_coordinate_frame(&c, gamma1.rank())?;
        require_coordinate_frame(&c, gamma2.rank())?;
        for (want, got) in [(2, lambda.degree()), (1, gamma1.degree()), (1, gamma2.degree())] {
            if want != got {
                return Err(Error::DegreeMismatch {
                    expected: want,
                    found: got,
                });
            }
        }
        Ok(FirstOrderBiDiffOp {
            lambda,
            gamma1,
            gamma2,
            alpha,
        })
    }

    /// The skew operator `Lambda + I ^ Gamma` of a pair `(Lambda, Gamma)`.
    pub fn skew(lambda: &MultiVector, gamma: &MultiVector) -> Result<Self> {
        let c = lambda.chart().clone();
        Self::new(lambda.expand(), gamma.clone(), gamma.neg(), c.zero())
    }

    pub fn zero(chart: &ChartRef) -> Self {
        FirstOrderBiDiffOp {
            lambda: TensorField::coordinate_zero(chart, 2),
            gamma1: MultiVector::coordinate_zero(chart, 1),
            gamma2: MultiVector::coordinate_zero(chart, 1),
            alpha: chart.zero(),
        }
    }

    pub fn chart(&self) -> &ChartRef {
        self.lambda.chart()
    }

    pub fn lambda(&self) -> &TensorField {
        &self.lambda
    }

    pub fn gamma1(&self) -> &MultiVector {
        &self.gamma1
    }

    pub fn gamma2(&self) -> &MultiVector {
        &self.gamma2
    }

    pub fn alpha(&self) -> &ExpPoly {
        &self.alpha
    }

    /// `(Lambda, Gamma)` when the operator is skew-symmetric.
    pub fn as_skew(&self) -> Option<(MultiVector, MultiVector)> {
        let l = self.lambda.to_multivector().ok()?;
        (self.alpha.is_zero() && self.gamma2 == self.gamma1.neg()).then(|| (l, self.gamma1.clone()))
    }

    pub fn is_skew(&self) -> bool {
        self.as_skew().is_some()
    }

    pub fn neg(&self) -> Self {
        FirstOrderBiDiffOp {
            lambda: self.lambda.neg(),
            gamma1: self.gamma1.neg(),
            gamma2: self.gamma2.neg(),
            alpha: -&self.alpha,
        }
    }

    /// The operator as a 2-tensor over the frame `(d/dx_1, ..., d/dx_n, I)`.
    pub fn as_frame_tensor(&self) -> TensorField {
        let n = self.chart().dim();
        let mut out = TensorField::zero(self.chart(), n + 1, 2);
        for (k, v) in self.lambda.comps() {
            out.add_term(k, v.clone());
        }
        for (k, v) in self.gamma1.comps() {
            out.add_term(&[n, k[0]], v.clone());
        }
        for (k, v) in self.gamma2.comps() {
            out.add_term(&[k[0], n], v.clone());
        }
        out.add_term(&[n, n], self.alpha.clone());
        out
    }

    /// `(T, G1, G2, alpha)` in canonical rendering.
    pub fn render(&self) -> String {
        format!(
            "({}, {}, {}, {})",
            self.lambda.render(),
            self.gamma1.render(),
            self.gamma2.render(),
            self.chart().render(&self.alpha)
        )
    }
}

impl BracketSource for FirstOrderBiDiffOp {
    fn bracket_chart(&self) -> &ChartRef {
        self.chart()
    }

    /// `<Lambda, df (x) dg> + f Gamma1(g) + g Gamma2(f) + alpha f g`.
    fn bracket(&self, f: &ExpPoly, g: &ExpPoly) -> Result<ExpPoly> {
        let mut out = self.lambda.bracket(f, g)?;
        out.add_assign_ref(&(f * &apply_vector(&self.gamma1, g)));
        out.add_assign_ref(&(g * &apply_vector(&self.gamma2, f)));
        out.add_assign_ref(&(&self.alpha * &(f * g)));
        Ok(out)
    }
}

/// A first-order polydifferential operator `main + I ^ ident` with
/// `deg ident = deg main - 1`. For degree 0 the identity part is absent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyDiffOp {
    pub main: MultiVector,
    pub ident: MultiVector,
}

impl PolyDiffOp {
    pub fn new(main: MultiVector, ident: MultiVector) -> Result<Self> {
        main.check_compatible(&ident)?;
        let want = main.degree().saturating_sub(1);
        if ident.degree() != want {
            return Err(Error::DegreeMismatch {
                expected: want,
                found: ident.degree(),
            });
        }
        if main.degree() == 0 && !ident.is_zero() {
            return Err(Error::Invalid(
                "a function has no identity-operator part".into(),
            ));
        }
        Ok(PolyDiffOp { main, ident })
    }

    /// Operator of degree `degree` with both parts zero.
    pub fn zero(chart: &ChartRef, rank: usize, degree: usize) -> Self {
        PolyDiffOp {
            main: MultiVector::zero(chart, rank, degree),
            ident: MultiVector::zero(chart, rank, degree.saturating_sub(1)),
        }
    }

    /// The identity operator `I` itself.
    pub fn identity(chart: &ChartRef, rank: usize) -> Self {
        PolyDiffOp {
            main: MultiVector::zero(chart, rank, 1),
            ident: MultiVector::scalar(chart, rank, chart.one()),
        }
    }

    pub fn from_main(main: MultiVector) -> Self {
        let ident = MultiVector::zero(main.chart(), main.rank(), main.degree().saturating_sub(1));
        PolyDiffOp { main, ident }
    }

    pub fn degree(&self) -> usize {
        self.main.degree()
    }

    pub fn chart(&self) -> &ChartRef {
        self.main.chart()
    }

    pub fn is_zero(&self) -> bool {
        self.main.is_zero() && self.ident.is_zero()
    }

    pub fn plus(&self, other: &Self) -> Self {
        PolyDiffOp {
            main: self.main.plus(&other.main),
            ident: self.ident.plus(&other.ident),
        }
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.neg())
    }

    pub fn neg(&self) -> Self {
        PolyDiffOp {
            main: self.main.neg(),
            ident: self.ident.neg(),
        }
    }

    pub fn scale(&self, f: &ExpPoly) -> Self {
        PolyDiffOp {
            main: self.main.scale(f),
            ident: self.ident.scale(f),
        }
    }

    /// Degree-2 operators as bidifferential operators.
    pub fn to_bidiff(&self) -> Result<FirstOrderBiDiffOp> {
        if self.degree() != 2 {
            return Err(Error::DegreeMismatch {
                expected: 2,
                found: self.degree(),
            });
        }
        FirstOrderBiDiffOp::skew(&self.main, &self.ident)
    }

    pub fn render(&self) -> String {
        format!("({}, {})", self.main.render(), self.ident.render())
    }
}

impl BracketSource for PolyDiffOp {
    fn bracket_chart(&self) -> &ChartRef {
        self.chart()
    }

    /// `A1(df, dg) + f A2(g) - g A2(f)` for `A1 + I ^ A2`.
    fn bracket(&self, f: &ExpPoly, g: &ExpPoly) -> Result<ExpPoly> {
        if self.degree() != 2 {
            return Err(Error::DegreeMismatch {
                expected: 2,
                found: self.degree(),
            });
        }
        let mut out = self.main.bracket(f, g)?;
        out.add_assign_ref(&(f * &apply_vector(&self.ident, g)));
        out.add_assign_ref(&(-&(g * &apply_vector(&self.ident, f))));
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::chart::Chart;

    #[test]
    fn bracket_of_alpha_term() {
        let m = Chart::base(&["x"]).unwrap().into_ref();
        let mut j = FirstOrderBiDiffOp::zero(&m);
        j.alpha = m.one();
        let f = m.coord(0);
        let g = &m.coord(0) + &m.one();
        assert_eq!(j.bracket(&f, &g).unwrap(), &f * &g);
    }

    #[test]
    fn canonical_bracket_signs() {
        // Lambda_M = d/dp ^ d/dx on (x, p)
        let m = Chart::base(&["x", "p"]).unwrap().into_ref();
        let l = MultiVector::coordinate_basis(&m, &[1, 0]);
        assert_eq!(l.bracket(&m.coord(0), &m.coord(1)).unwrap(), ExpPoly::int(2, -1));
        assert!(l.bracket(&m.coord(1), &m.coord(0)).unwrap().is_one());
    }

    #[test]
    fn skew_pair_brackets_agree() {
        let m = Chart::base(&["q", "p", "u"]).unwrap().into_ref();
        let l = MultiVector::coordinate_basis(&m, &[0, 1])
            .plus(&MultiVector::coordinate_basis(&m, &[2, 1]).scale(&m.coord(1)));
        let g = MultiVector::coordinate_basis(&m, &[2]);
        let j = FirstOrderBiDiffOp::skew(&l, &g).unwrap();
        let pd = PolyDiffOp::new(l, g).unwrap();
        let f = &m.coord(0) * &m.coord(2);
        let h = &m.coord(1) + &m.one();
        assert_eq!(j.bracket(&f, &h).unwrap(), pd.bracket(&f, &h).unwrap());
        assert!(j.bracket(&m.one(), &m.one()).unwrap().is_zero());
        assert!(j.as_skew().is_some());
    }

    #[test]
    fn frame_tensor_layout() {
        let m = Chart::base(&["x"]).unwrap().into_ref();
        let j = FirstOrderBiDiffOp::new(
            TensorField::coordinate_zero(&m, 2),
            MultiVector::coordinate_basis(&m, &[0]),
            MultiVector::coordinate_zero(&m, 1),
            m.coord(0),
        )
        .unwrap();
        let t = j.as_frame_tensor();
        assert!(t.get(&[1, 0]).is_one());
        assert_eq!(t.get(&[1, 1]), m.coord(0));
        assert!(t.get(&[0, 1]).is_zero());
    }
}
