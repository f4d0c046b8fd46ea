//! Seeded generators for randomized property batteries.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebroid::increasing_tuples;
use crate::coeff::ExpPoly;
use crate::geometry::chart::ChartRef;
use crate::geometry::skew::{SkewField, Variance};
use crate::rational::Rational;

/// Shape limits for generated objects.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    /// Highest total degree of coefficient polynomials.
    pub coeff_degree: u32,
    /// Most terms per coefficient polynomial.
    pub coeff_terms: usize,
    /// Probability that a component of a field is nonzero.
    pub density: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            coeff_degree: 2,
            coeff_terms: 2,
            density: 0.5,
        }
    }
}

/// Deterministic generator; the same seed gives the same objects.
pub struct Gen {
    rng: ChaCha8Rng,
    pub limits: Limits,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            limits: Limits::default(),
        }
    }

    pub fn with_limits(seed: u64, limits: Limits) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            limits,
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn range(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        self.rng.random_range(lo..=hi_inclusive)
    }

    fn rational(&mut self) -> Rational {
        let mut n = self.rng.random_range(1..=3i64);
        if self.rng.random_bool(0.5) {
            n = -n;
        }
        let d = if self.rng.random_bool(0.2) { 2 } else { 1 };
        Rational::new(n, d)
    }

    /// Polynomial in the base-like variables of `chart` with at most
    /// `coeff_terms` terms of degree at most `coeff_degree`.
    pub fn poly(&mut self, chart: &ChartRef) -> ExpPoly {
        let vars = chart.base_indices();
        let mut out = chart.zero();
        let nterms = self.rng.random_range(1..=self.limits.coeff_terms);
        for _ in 0..nterms {
            let deg = self.rng.random_range(0..=self.limits.coeff_degree);
            let mut term = ExpPoly::constant(chart.dim(), self.rational());
            for _ in 0..deg {
                if vars.is_empty() {
                    break;
                }
                let v = vars[self.rng.random_range(0..vars.len())];
                term = &term * &chart.coord(v);
            }
            out.add_assign_ref(&term);
        }
        out
    }

    /// Skew field of the given degree over a frame of size `rank`;
    /// nonzero unless the degree exceeds the rank.
    pub fn skew<K: Variance>(&mut self, chart: &ChartRef, rank: usize, degree: usize) -> SkewField<K> {
        let tuples = increasing_tuples(rank, degree);
        let mut out = SkewField::zero(chart, rank, degree);
        if tuples.is_empty() {
            return out;
        }
        for t in &tuples {
            if self.rng.random_bool(self.limits.density) {
                out.add_term(t, self.poly(chart));
            }
        }
        if out.is_zero() {
            let t = &tuples[self.rng.random_range(0..tuples.len())];
            let mut p = self.poly(chart);
            if p.is_zero() {
                p = chart.one();
            }
            out.add_term(t, p);
        }
        out
    }

    /// Coordinate multivector (frame = coordinate vector fields).
    pub fn multivector(&mut self, chart: &ChartRef, degree: usize) -> SkewField<crate::geometry::Contra> {
        self.skew(chart, chart.dim(), degree)
    }
}
