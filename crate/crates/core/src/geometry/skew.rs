//! Skew-symmetric fields: multivectors and exterior forms.
//!
//! Components are stored on strictly increasing index tuples over a frame of
//! size `rank` (the coordinate frame of the chart, or the frame of an
//! algebroid). The expansion to a full tensor uses unit-weight
//! antisymmetrization, `a ^ b = a (x) b - b (x) a`.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::marker::PhantomData;

use crate::coeff::ExpPoly;
use crate::error::{Error, Result};
use crate::geometry::chart::{same_chart, ChartRef};
use crate::rational::Rational;

pub trait Variance: Clone + Copy + Debug + PartialEq + Eq + Default + 'static {
    const COVARIANT: bool;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Contra;
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Co;

impl Variance for Contra {
    const COVARIANT: bool = false;
}
impl Variance for Co {
    const COVARIANT: bool = true;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewField<K: Variance> {
    chart: ChartRef,
    rank: usize,
    degree: usize,
    comps: BTreeMap<Vec<usize>, ExpPoly>,
    _kind: PhantomData<K>,
}

/// Multivector field, or multisection of an algebroid frame.
pub type MultiVector = SkewField<Contra>;
/// Exterior form over a frame (coordinate differentials or a dual frame).
pub type CovariantField = SkewField<Co>;

/// Sorts `idx` and returns the permutation sign, or `None` on a repeat.
pub fn sort_with_sign(idx: &[usize]) -> Option<(i64, Vec<usize>)> {
    let mut v = idx.to_vec();
    let mut sign = 1i64;
    // insertion sort counting transpositions
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && v[j - 1] == v[j] {
            return None;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((sign, v))
}

/// All permutations of `idx` with their signs.
pub(crate) fn signed_permutations(idx: &[usize]) -> Vec<(i64, Vec<usize>)> {
    if idx.len() <= 1 {
        return vec![(1, idx.to_vec())];
    }
    let mut out = Vec::new();
    for k in 0..idx.len() {
        let mut rest = idx.to_vec();
        let first = rest.remove(k);
        let s = if k % 2 == 0 { 1 } else { -1 };
        for (t, mut p) in signed_permutations(&rest) {
            p.insert(0, first);
            out.push((s * t, p));
        }
    }
    out
}

impl<K: Variance> SkewField<K> {
    pub fn zero(chart: &ChartRef, rank: usize, degree: usize) -> Self {
        SkewField {
            chart: chart.clone(),
            rank,
            degree,
            comps: BTreeMap::new(),
            _kind: PhantomData,
        }
    }

    /// Zero field over the coordinate frame of `chart`.
    pub fn coordinate_zero(chart: &ChartRef, degree: usize) -> Self {
        Self::zero(chart, chart.dim(), degree)
    }

    pub fn scalar(chart: &ChartRef, rank: usize, f: ExpPoly) -> Self {
        let mut out = Self::zero(chart, rank, 0);
        out.add_term(&[], f);
        out
    }

    /// `coeff * b_{i1} ^ ... ^ b_{ik}` for frame elements `b`.
    pub fn term(chart: &ChartRef, rank: usize, coeff: ExpPoly, idx: &[usize]) -> Self {
        let mut out = Self::zero(chart, rank, idx.len());
        out.add_term(idx, coeff);
        out
    }

    pub fn basis(chart: &ChartRef, rank: usize, idx: &[usize]) -> Self {
        Self::term(chart, rank, ExpPoly::one(chart.dim()), idx)
    }

    /// Coordinate frame element(s) `d/dx_i ^ ...` (or `dx_i ^ ...` for forms).
    pub fn coordinate_basis(chart: &ChartRef, idx: &[usize]) -> Self {
        Self::basis(chart, chart.dim(), idx)
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

    /// Component on an arbitrary index tuple (sign-adjusted).
    pub fn get(&self, idx: &[usize]) -> ExpPoly {
        match sort_with_sign(idx) {
            None => self.chart.zero(),
            Some((s, key)) => match self.comps.get(&key) {
                Some(p) => p.scale_int(s),
                None => self.chart.zero(),
            },
        }
    }

    /// Adds `coeff * b_idx`, normalizing the index order.
    pub fn add_term(&mut self, idx: &[usize], coeff: ExpPoly) {
        assert_eq!(idx.len(), self.degree, "term degree differs from field degree");
        assert!(idx.iter().all(|&i| i < self.rank), "frame index out of range");
        assert_eq!(coeff.nvars(), self.chart.dim(), "coefficient on another chart");
        if coeff.is_zero() {
            return;
        }
        let Some((s, key)) = sort_with_sign(idx) else {
            return;
        };
        let c = if s < 0 { -coeff } else { coeff };
        match self.comps.get_mut(&key) {
            Some(p) => {
                p.add_assign_ref(&c);
                if p.is_zero() {
                    self.comps.remove(&key);
                }
            }
            None => {
                self.comps.insert(key, c);
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

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        self.check_compatible(other)?;
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch {
                expected: self.degree,
                found: other.degree,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (k, v) in &other.comps {
            out.add_term(k, v.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    /// `self + other`; panics on shape mismatch.
    pub fn plus(&self, other: &Self) -> Self {
        self.try_add(other).expect("incompatible skew fields")
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.try_sub(other).expect("incompatible skew fields")
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

    pub fn scale_int(&self, c: i64) -> Self {
        self.scale_rat(&Rational::from_int(c))
    }

    /// Multiplication by a function.
    pub fn scale(&self, f: &ExpPoly) -> Self {
        let mut out = Self::zero(&self.chart, self.rank, self.degree);
        for (k, v) in &self.comps {
            out.add_term(k, f * v);
        }
        out
    }

    /// Graded-commutative exterior product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(&self.chart, self.rank, self.degree + other.degree);
        for (a, p) in &self.comps {
            for (b, q) in &other.comps {
                let idx: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
                if sort_with_sign(&idx).is_some() {
                    out.add_term(&idx, p * q);
                }
            }
        }
        Ok(out)
    }

    /// `self ^ other`; panics on incompatible inputs.
    pub fn w(&self, other: &Self) -> Self {
        self.wedge(other).expect("incompatible skew fields")
    }

    /// Contraction in the first slot with a degree-1 field of the opposite
    /// variance: `(i_a X)(...) = X(a, ...)`.
    pub fn interior<L: Variance>(&self, a: &SkewField<L>) -> Result<Self> {
        same_chart(&self.chart, &a.chart)?;
        if a.rank != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                found: a.rank,
            });
        }
        if a.degree != 1 {
            return Err(Error::DegreeMismatch {
                expected: 1,
                found: a.degree,
            });
        }
        if self.degree == 0 {
            return Ok(Self::zero(&self.chart, self.rank, 0));
        }
        let mut out = Self::zero(&self.chart, self.rank, self.degree - 1);
        for (key, p) in &self.comps {
            for (j, &i) in key.iter().enumerate() {
                let Some(ai) = a.comps.get(&vec![i]) else {
                    continue;
                };
                let mut rest = key.clone();
                rest.remove(j);
                let c = ai * p;
                out.add_term(&rest, if j % 2 == 0 { c } else { -c });
            }
        }
        Ok(out)
    }

    /// Components on every index tuple (the full antisymmetric tensor).
    pub fn expand_components(&self) -> BTreeMap<Vec<usize>, ExpPoly> {
        let mut out = BTreeMap::new();
        for (key, p) in &self.comps {
            for (s, perm) in signed_permutations(key) {
                out.insert(perm, p.scale_int(s));
            }
        }
        out
    }

    /// Applies `f` to every coefficient, landing on `chart`.
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

    /// Same components over a frame that contains this one as the first
    /// `self.rank` elements, or with indices moved by `map`.
    pub fn reframe(&self, rank: usize, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.rank, "reframe map has the wrong length");
        let mut out = Self::zero(&self.chart, rank, self.degree);
        for (k, v) in &self.comps {
            let idx: Vec<usize> = k.iter().map(|&i| map[i]).collect();
            out.add_term(&idx, v.clone());
        }
        out
    }

    /// Canonical rendering using one label per frame element.
    pub fn render_with(&self, labels: &[String]) -> String {
        render_terms(
            &self.chart.names(),
            self.comps.iter().map(|(k, v)| (k.as_slice(), v)),
            labels,
            " ^ ",
        )
    }
}

pub(crate) fn render_terms<'a>(
    names: &[String],
    terms: impl Iterator<Item = (&'a [usize], &'a ExpPoly)>,
    labels: &[String],
    joiner: &str,
) -> String {
    let mut out = String::new();
    for (n, (key, coeff)) in terms.enumerate() {
        let basis = key
            .iter()
            .map(|&i| labels[i].as_str())
            .collect::<Vec<_>>()
            .join(joiner);
        let rendered = coeff.render(names);
        let (neg, body) = if !coeff.is_compound() && rendered.starts_with('-') {
            (true, rendered[1..].to_string())
        } else {
            (false, rendered)
        };
        let factor = if coeff.is_compound() {
            format!("({body})")
        } else {
            body
        };
        let text = if basis.is_empty() {
            factor
        } else if factor == "1" {
            basis
        } else {
            format!("{factor} * {basis}")
        };
        if n == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&text);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Labels `d/dx` for the coordinate frame of a chart.
pub fn vector_labels(names: &[String]) -> Vec<String> {
    names.iter().map(|n| format!("d/d{n}")).collect()
}

/// Labels `dx` for the coordinate coframe of a chart.
pub fn form_labels(names: &[String]) -> Vec<String> {
    names.iter().map(|n| format!("d{n}")).collect()
}

/// Labels `e1, e2, ...` for an abstract frame.
pub fn frame_labels(rank: usize) -> Vec<String> {
    (1..=rank).map(|i| format!("e{i}")).collect()
}

impl MultiVector {
    /// Coordinate rendering `x * d/dx ^ d/dy`, or `e1 ^ e2` over an abstract frame.
    pub fn render(&self) -> String {
        let labels = if self.rank == self.chart.dim() {
            vector_labels(&self.chart.names())
        } else {
            frame_labels(self.rank)
        };
        self.render_with(&labels)
    }
}

impl CovariantField {
    pub fn render(&self) -> String {
        let labels = if self.rank == self.chart.dim() {
            form_labels(&self.chart.names())
        } else {
            (1..=self.rank).map(|i| format!("e*{i}")).collect()
        };
        self.render_with(&labels)
    }

    /// Value on frame elements `X_{i1}, ..., X_{ik}`.
    pub fn eval_frame(&self, idx: &[usize]) -> ExpPoly {
        self.get(idx)
    }
}
