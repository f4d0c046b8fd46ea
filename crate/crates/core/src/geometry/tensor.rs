//! General (not necessarily skew) contravariant tensor fields.

use std::collections::BTreeMap;

use crate::coeff::ExpPoly;
use crate::error::{Error, Result};
use crate::geometry::chart::{same_chart, ChartRef};
use crate::geometry::skew::{
    frame_labels, render_terms, sort_with_sign, vector_labels, CovariantField, MultiVector,
};
use crate::rational::Rational;

/// A contravariant tensor over a frame of size `rank`, components on every
/// index tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorField {
    chart: ChartRef,
    rank: usize,
    degree: usize,
    comps: BTreeMap<Vec<usize>, ExpPoly>,
}

impl TensorField {
    pub fn zero(chart: &ChartRef, rank: usize, degree: usize) -> Self {
        TensorField {
            chart: chart.clone(),
            rank,
            degree,
            comps: BTreeMap::new(),
        }
    }

    pub fn coordinate_zero(chart: &ChartRef, degree: usize) -> Self {
        Self::zero(chart, chart.dim(), degree)
    }

    pub fn scalar(chart: &ChartRef, rank: usize, f: ExpPoly) -> Self {
        let mut out = Self::zero(chart, rank, 0);
        out.add_term(&[], f);
        out
    }

    pub fn term(chart: &ChartRef, rank: usize, coeff: ExpPoly, idx: &[usize]) -> Self {
        let mut out = Self::zero(chart, rank, idx.len());
        out.add_term(idx, coeff);
        out
    }

    /// `d/dx_i (x) d/dx_j (x) ...` on the coordinate frame.
    pub fn coordinate_basis(chart: &ChartRef, idx: &[usize]) -> Self {
        Self::term(chart, chart.dim(), chart.one(), idx)
    }

    pub fn chart(&self) -> &ChartRef {
        &self.chart
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn comps(&self) -> &BTreeMap<Vec<usize>, ExpPoly> {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn get(&self, idx: &[usize]) -> ExpPoly {
        self.comps
            .get(idx)
            .cloned()
            .unwrap_or_else(|| self.chart.zero())
    }

    pub fn add_term(&mut self, idx: &[usize], coeff: ExpPoly) {
        assert_eq!(idx.len(), self.degree, "term degree differs from tensor degree");
        assert!(idx.iter().all(|&i| i < self.rank), "frame index out of range");
        assert_eq!(coeff.nvars(), self.chart.dim(), "coefficient on another chart");
        if coeff.is_zero() {
            return;
        }
        match self.comps.get_mut(idx) {
            Some(p) => {
                p.add_assign_ref(&coeff);
                if p.is_zero() {
                    self.comps.remove(idx);
                }
            }
            None => {
                self.comps.insert(idx.to_vec(), coeff);
            }
        }
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        same_chart(&self.chart, &other.chart)?;
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: other.rank,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: other.degree,
            });
        }
        let mut out = self.clone();
        for (k, v) in &other.comps {
            out.add_term(k, v.clone());
        }
        Ok(out)
    }

    pub fn plus(&self, other: &Self) -> Self {
        self.try_add(other).expect("incompatible tensors")
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale_rat(&Rational::from_int(-1))
    }

    pub fn scale_rat(&self, c: &Rational) -> Self {
        let mut out = Self::zero(&self.chart, self.rank, self.degree);
        for (k, v) in &self.comps {
            out.add_term(k, v.scale(c));
        }
        out
    }

    pub fn scale(&self, f: &ExpPoly) -> Self {
        let mut out = Self::zero(&self.chart, self.rank, self.degree);
        for (k, v) in &self.comps {
            out.add_term(k, f * v);
        }
        out
    }

    /// Tensor product `self (x) other`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(&self.chart, self.rank, self.degree + other.degree);
        for (a, p) in &self.comps {
            for (b, q) in &other.comps {
                let idx: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
                out.add_term(&idx, p * q);
            }
        }
        Ok(out)
    }

    pub fn t(&self, other: &Self) -> Self {
        self.tensor(other).expect("incompatible tensors")
    }

    /// Swaps the two slots of a degree-2 tensor.
    pub fn transpose(&self) -> Self {
        assert_eq!(self.degree, 2, "transpose needs a 2-tensor");
        let mut out = Self::zero(&self.chart, self.rank, 2);
        for (k, v) in &self.comps {
            out.add_term(&[k[1], k[0]], v.clone());
        }
        out
    }

    /// True if the tensor changes sign under every transposition of slots.
    pub fn is_skew(&self) -> bool {
        self.to_multivector().is_ok()
    }

    /// The multivector whose unit-weight expansion is this tensor.
    pub fn to_multivector(&self) -> Result<MultiVector> {
        let mut out = MultiVector::zero(&self.chart, self.rank, self.degree);
        for (k, v) in &self.comps {
            match sort_with_sign(k) {
                None => {
                    return Err(Error::NotSkew(format!(
                        "nonzero component on repeated indices {k:?}"
                    )))
                }
                Some((1, key)) if key == *k => out.add_term(k, v.clone()),
                Some(_) => {}
            }
        }
        if MultiVector::expand(&out) != *self {
            return Err(Error::NotSkew(
                "components do not change sign under transposition".into(),
            ));
        }
        Ok(out)
    }

    pub fn map_coeffs(
        &self,
        chart: &ChartRef,
        mut f: impl FnMut(&ExpPoly) -> Result<ExpPoly>,
    ) -> Result<Self> {
        let mut out = Self::zero(chart, self.rank, self.degree);
        for (k, v) in &self.comps {
            let c = f(v)?;
            chart.check_poly(&c)?;
            out.add_term(k, c);
        }
        Ok(out)
    }

    pub fn reframe(&self, rank: usize, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.rank, "reframe map has the wrong length");
        let mut out = Self::zero(&self.chart, rank, self.degree);
        for (k, v) in &self.comps {
            let idx: Vec<usize> = k.iter().map(|&i| map[i]).collect();
            out.add_term(&idx, v.clone());
        }
        out
    }

    pub fn render_with(&self, labels: &[String]) -> String {
        render_terms(
            &self.chart.names(),
            self.comps.iter().map(|(k, v)| (k.as_slice(), v)),
            labels,
            " @ ",
        )
    }

    /// Rendering like `x * d/dx @ d/dy`.
    pub fn render(&self) -> String {
        let labels = if self.rank == self.chart.dim() {
            vector_labels(&self.chart.names())
        } else {
            frame_labels(self.rank)
        };
        self.render_with(&labels)
    }
}

impl MultiVector {
    /// Unit-weight expansion into a full tensor.
    pub fn expand(&self) -> TensorField {
        let mut out = TensorField::zero(self.chart(), self.rank(), self.degree());
        for (k, v) in self.expand_components() {
            out.add_term(&k, v);
        }
        out
    }
}

/// `<T, mu (x) nu> = sum T^{ij} mu_i nu_j`.
pub fn pair(t: &TensorField, mu: &CovariantField, nu: &CovariantField) -> Result<ExpPoly> {
    same_chart(t.chart(), mu.chart())?;
    same_chart(t.chart(), nu.chart())?;
    if t.degree() != 2 {
        return Err(Error::DegreeMismatch {
            expected: 2,
            found: t.degree(),
        });
    }
    for f in [mu, nu] {
        if f.degree() != 1 {
            return Err(Error::DegreeMismatch {
                expected: 1,
                found: f.degree(),
            });
        }
        if f.rank() != t.rank() {
            return Err(Error::RankMismatch {
                expected: t.rank(),
                found: f.rank(),
            });
        }
    }
    let mut out = t.chart().zero();
    for (k, v) in t.comps() {
        let a = mu.get(&k[..1]);
        let b = nu.get(&k[1..]);
        if a.is_zero() || b.is_zero() {
            continue;
        }
        out.add_scaled(&(&a * &b), v);
    }
    Ok(out)
}

/// `T(mu, .)`: contraction in the first slot, a degree-1 field.
pub fn contract_first(t: &TensorField, mu: &CovariantField) -> Result<MultiVector> {
    same_chart(t.chart(), mu.chart())?;
    if t.degree() != 2 || mu.degree() != 1 {
        return Err(Error::DegreeMismatch {
            expected: 2,
            found: t.degree(),
        });
    }
    let mut out = MultiVector::zero(t.chart(), t.rank(), 1);
    for (k, v) in t.comps() {
        let a = mu.get(&k[..1]);
        if !a.is_zero() {
            out.add_term(&k[1..], &a * v);
        }
    }
    Ok(out)
}

/// `T(., mu)`: contraction in the second slot.
pub fn contract_second(t: &TensorField, mu: &CovariantField) -> Result<MultiVector> {
    contract_first(&t.transpose(), mu)
}

/// Value of a degree-1 field on a 1-form, `<X, mu>`.
pub fn pair_vector(x: &MultiVector, mu: &CovariantField) -> Result<ExpPoly> {
    same_chart(x.chart(), mu.chart())?;
    let mut out = x.chart().zero();
    for (k, v) in x.comps() {
        out.add_scaled(v, &mu.get(k));
    }
    Ok(out)
}
