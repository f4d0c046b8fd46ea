//! Exact coefficient arithmetic.
//!
//! An [`ExpPoly`] is a rational-coefficient polynomial in the variables of a
//! chart, extended by integer powers of exponential generators `exp(s)`
//! attached to individual variables. Every tensor component in the crate is
//! an `ExpPoly`, so "equals zero" is a structural test.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Exponent data of a single term: variable powers followed by the
/// exponential weights, both indexed by chart variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Box<[i32]>);

impl Monomial {
    pub fn unit(nvars: usize) -> Self {
        Monomial(vec![0; 2 * nvars].into_boxed_slice())
    }

    pub fn nvars(&self) -> usize {
        self.0.len() / 2
    }

    pub fn power(&self, var: usize) -> u32 {
        self.0[var] as u32
    }

    pub fn exp_weight(&self, var: usize) -> i32 {
        self.0[self.nvars() + var]
    }

    pub fn powers(&self) -> &[i32] {
        &self.0[..self.nvars()]
    }

    pub fn exp_weights(&self) -> &[i32] {
        &self.0[self.nvars()..]
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn with_power(mut self, var: usize, p: u32) -> Self {
        self.0[var] = i32::try_from(p).expect("exponent overflow");
        self
    }

    fn with_exp(mut self, var: usize, m: i32) -> Self {
        let n = self.nvars();
        self.0[n + var] = m;
        self
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        let v: Vec<i32> = self
            .0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
            .collect();
        Monomial(v.into_boxed_slice())
    }

    /// Total degree in the given variables, ignoring exponential weights.
    pub fn degree_in(&self, vars: &[usize]) -> u32 {
        vars.iter().map(|&v| self.power(v)).sum()
    }
}

/// Rational polynomial times integer powers of `exp(v)` generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExpPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl ExpPoly {
    pub fn zero(nvars: usize) -> Self {
        ExpPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::monomial(nvars, Monomial::unit(nvars), c)
    }

    pub fn int(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, Rational::from_int(c))
    }

    pub fn monomial(nvars: usize, m: Monomial, c: Rational) -> Self {
        assert_eq!(m.nvars(), nvars, "monomial sized for a different chart");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        ExpPoly { nvars, terms }
    }

    /// The coordinate function of variable `var`.
    pub fn var(nvars: usize, var: usize) -> Self {
        assert!(var < nvars, "variable index out of range");
        Self::monomial(nvars, Monomial::unit(nvars).with_power(var, 1), Rational::one())
    }

    /// `exp(m * v)` for the variable `var`.
    pub fn exp(nvars: usize, var: usize, m: i32) -> Self {
        assert!(var < nvars, "variable index out of range");
        Self::monomial(nvars, Monomial::unit(nvars).with_exp(var, m), Rational::one())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// The value if the polynomial is a constant (no variables, no exponentials).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_unit().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.terms
            .keys()
            .any(|m| m.power(var) != 0 || m.exp_weight(var) != 0)
    }

    /// True when no term carries an exponential generator.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|m| m.exp_weights().iter().all(|&e| e == 0))
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &ExpPoly) {
        assert_eq!(self.nvars, other.nvars, "chart size mismatch");
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    /// `self += factor * other`, the workhorse of tensor contractions.
    pub fn add_scaled(&mut self, factor: &ExpPoly, other: &ExpPoly) {
        assert_eq!(self.nvars, other.nvars, "chart size mismatch");
        assert_eq!(self.nvars, factor.nvars, "chart size mismatch");
        for (m1, c1) in &factor.terms {
            for (m2, c2) in &other.terms {
                self.add_term(m1.mul(m2), c1 * c2);
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> ExpPoly {
        if c.is_zero() {
            return ExpPoly::zero(self.nvars);
        }
        ExpPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn scale_int(&self, c: i64) -> ExpPoly {
        self.scale(&Rational::from_int(c))
    }

    pub fn pow(&self, e: u32) -> ExpPoly {
        let mut acc = ExpPoly::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative with respect to the variable at `var`.
    ///
    /// A term `c * x^k * exp(m*x)` differentiates to `c * (k x^(k-1) + m x^k) exp(m*x)`.
    pub fn derivative(&self, var: usize) -> ExpPoly {
        assert!(var < self.nvars, "variable index out of range");
        let mut out = ExpPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let k = m.power(var);
            let w = m.exp_weight(var);
            if k > 0 {
                let lowered = m.clone().with_power(var, k - 1);
                out.add_term(lowered, c * &Rational::from_int(k as i64));
            }
            if w != 0 {
                out.add_term(m.clone(), c * &Rational::from_int(w as i64));
            }
        }
        out
    }

    /// Moves the polynomial onto a chart with `nvars` variables, sending
    /// source variable `i` to target variable `map[i]`.
    pub fn reindex(&self, nvars: usize, map: &[usize]) -> ExpPoly {
        assert_eq!(map.len(), self.nvars, "reindex map has the wrong length");
        let mut out = ExpPoly::zero(nvars);
        for (m, c) in &self.terms {
            let mut t = Monomial::unit(nvars);
            for (i, &j) in map.iter().enumerate() {
                let p = m.power(i);
                let w = m.exp_weight(i);
                if p != 0 {
                    let cur = t.power(j);
                    t = t.with_power(j, cur + p);
                }
                if w != 0 {
                    let cur = t.exp_weight(j);
                    t = t.with_exp(j, cur + w);
                }
            }
            out.add_term(t, c.clone());
        }
        out
    }

    /// Exact composition: every variable `i` is replaced by `images[i]`,
    /// a polynomial over a chart of `nvars` variables.
    ///
    /// A variable carrying an exponential generator may only be replaced by
    /// a bare variable, which then carries the generator.
    pub fn substitute(&self, nvars: usize, images: &[ExpPoly]) -> Result<ExpPoly> {
        assert_eq!(images.len(), self.nvars, "one image per variable required");
        for img in images {
            assert_eq!(img.nvars, nvars, "image lives on a different chart");
        }
        let mut power_cache: BTreeMap<(usize, u32), ExpPoly> = BTreeMap::new();
        let mut out = ExpPoly::zero(nvars);
        for (m, c) in &self.terms {
            let mut term = ExpPoly::constant(nvars, c.clone());
            for (i, img) in images.iter().enumerate() {
                let w = m.exp_weight(i);
                if w != 0 {
                    let target = img.as_bare_variable().ok_or_else(|| {
                        Error::UnsupportedSubstitution(format!(
                            "variable {i} carries exp weight {w} but its image is not a bare variable"
                        ))
                    })?;
                    term = &term * &ExpPoly::exp(nvars, target, w);
                }
                let p = m.power(i);
                if p != 0 {
                    let f = power_cache
                        .entry((i, p))
                        .or_insert_with(|| img.pow(p))
                        .clone();
                    term = &term * &f;
                }
            }
            out.add_assign_ref(&term);
        }
        Ok(out)
    }

    /// `Some(v)` when the polynomial is exactly the coordinate function `v`.
    pub fn as_bare_variable(&self) -> Option<usize> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        if !c.is_one() || m.exp_weights().iter().any(|&w| w != 0) {
            return None;
        }
        let nz: Vec<usize> = (0..self.nvars).filter(|&i| m.power(i) != 0).collect();
        (nz.len() == 1 && m.power(nz[0]) == 1).then(|| nz[0])
    }

    /// Splits into components that are homogeneous of fixed degree in `vars`.
    pub fn homogeneous_parts(&self, vars: &[usize]) -> BTreeMap<u32, ExpPoly> {
        let mut out: BTreeMap<u32, ExpPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree_in(vars))
                .or_insert_with(|| ExpPoly::zero(self.nvars))
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// Multiplies by `exp(m * var)`.
    pub fn mul_exp(&self, var: usize, m: i32) -> ExpPoly {
        self * &ExpPoly::exp(self.nvars, var, m)
    }

    /// Renders in the canonical text form, e.g. `3/2*x^2*y*exp(-2*s)`.
    pub fn render<S: AsRef<str>>(&self, names: &[S]) -> String {
        assert_eq!(names.len(), self.nvars, "one name per variable required");
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let body = render_monomial(m, names);
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            match (mag.is_one(), body.is_empty()) {
                (true, true) => out.push('1'),
                (true, false) => out.push_str(&body),
                (false, true) => {
                    let _ = write!(out, "{mag}");
                }
                (false, false) => {
                    let _ = write!(out, "{mag}*{body}");
                }
            }
        }
        out
    }

    /// True if rendering needs parentheses when used as a factor.
    pub fn is_compound(&self) -> bool {
        self.terms.len() > 1
    }
}

fn render_monomial<S: AsRef<str>>(m: &Monomial, names: &[S]) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (i, name) in names.iter().enumerate() {
        match m.power(i) {
            0 => {}
            1 => parts.push(name.as_ref().to_string()),
            p => parts.push(format!("{}^{p}", name.as_ref())),
        }
    }
    for (i, name) in names.iter().enumerate() {
        match m.exp_weight(i) {
            0 => {}
            1 => parts.push(format!("exp({})", name.as_ref())),
            -1 => parts.push(format!("exp(-{})", name.as_ref())),
            w => parts.push(format!("exp({w}*{})", name.as_ref())),
        }
    }
    parts.join("*")
}

impl<'a> Add<&'a ExpPoly> for &'a ExpPoly {
    type Output = ExpPoly;
    fn add(self, rhs: &ExpPoly) -> ExpPoly {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl<'a> Sub<&'a ExpPoly> for &'a ExpPoly {
    type Output = ExpPoly;
    fn sub(self, rhs: &ExpPoly) -> ExpPoly {
        let mut out = self.clone();
        assert_eq!(self.nvars, rhs.nvars, "chart size mismatch");
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a ExpPoly> for &'a ExpPoly {
    type Output = ExpPoly;
    fn mul(self, rhs: &ExpPoly) -> ExpPoly {
        let mut out = ExpPoly::zero(self.nvars);
        out.add_scaled(self, rhs);
        out
    }
}

impl Neg for &ExpPoly {
    type Output = ExpPoly;
    fn neg(self) -> ExpPoly {
        self.scale_int(-1)
    }
}

impl Neg for ExpPoly {
    type Output = ExpPoly;
    fn neg(self) -> ExpPoly {
        -&self
    }
}

macro_rules! owned_poly_op {
    ($tr:ident, $m:ident) => {
        impl $tr for ExpPoly {
            type Output = ExpPoly;
            fn $m(self, rhs: ExpPoly) -> ExpPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
owned_poly_op!(Add, add);
owned_poly_op!(Sub, sub);
owned_poly_op!(Mul, mul);
