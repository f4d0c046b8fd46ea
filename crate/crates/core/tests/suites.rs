use liftlab::algebroid::{AlgebroidSpec, JacobiAlgebroidSpec};
use liftlab::geometry::{Chart, ChartRef, FirstOrderBiDiffOp, MultiVector, TensorField};
use liftlab::verify::*;

fn chart(names: &[&str]) -> ChartRef {
    Chart::base(names).unwrap().into_ref()
}

fn contact(broken: bool) -> FirstOrderBiDiffOp {
    let m = chart(&["q", "p", "u"]);
    let b = |i: &[usize]| MultiVector::coordinate_basis(&m, i);
    let mut l = b(&[0, 1]);
    if !broken {
        l = l.plus(&b(&[2, 1]).scale(&m.coord(1)));
    }
    FirstOrderBiDiffOp::skew(&l, &b(&[2])).unwrap()
}

fn assert_uniform(r: &Report, expect: bool) {
    assert!(r.equivalences_hold(), "{}", r.render_text());
    for rec in r.records.iter().filter(|r| !r.informational) {
        assert_eq!(rec.passed, expect, "{}", r.render_text());
    }
}

#[test]
fn poisson_characterization() {
    let m = chart(&["x", "y", "z"]);
    let b = |i: &[usize]| MultiVector::coordinate_basis(&m, i);
    let so3 = b(&[1, 2])
        .scale(&m.coord(0))
        .plus(&b(&[2, 0]).scale(&m.coord(1)))
        .plus(&b(&[0, 1]).scale(&m.coord(2)));
    let r = theorem6_suite(&so3.expand(), &Theorem6Witness::default()).unwrap();
    assert_uniform(&r, true);
    // the unsigned reading of the witness condition fails on a true
    // Poisson tensor
    assert!(!r.passed("(v) literal"));

    let bad = b(&[0, 1]).plus(&b(&[1, 2]).scale(&m.coord(1)));
    assert_uniform(&theorem6_suite(&bad.expand(), &Theorem6Witness::default()).unwrap(), false);
}

#[test]
fn poisson_characterization_non_skew() {
    let m = chart(&["x", "y"]);
    let t = TensorField::coordinate_basis(&m, &[0, 1]);
    let r = theorem6_suite(&t, &Theorem6Witness::default()).unwrap();
    assert!(!r.passed("(i)"));
    assert!(r.equivalences_hold(), "{}", r.render_text());
}

#[test]
fn jacobi_characterization() {
    assert_uniform(&theorem8_suite(&contact(false), None).unwrap(), true);
    assert_uniform(&theorem8_suite(&contact(true), None).unwrap(), false);
}

#[test]
fn algebroid_characterization() {
    let m = chart(&["x"]);
    let h = AlgebroidSpec::heisenberg(&m);
    assert_uniform(&theorem7_suite(&h, &MultiVector::basis(&m, 3, &[0, 2])).unwrap(), true);
    assert_uniform(&theorem7_suite(&h, &MultiVector::basis(&m, 3, &[0, 1])).unwrap(), false);
}

#[test]
fn jacobi_algebroid_characterization() {
    let c = chart(&["q", "p", "u"]);
    let js = JacobiAlgebroidSpec::first_order(&c);
    let b = |i: &[usize]| MultiVector::basis(&c, 4, i);
    let lam = b(&[0, 1]).plus(&b(&[2, 1]).scale(&c.coord(1)));
    // Lambda - Gamma ^ I is the frame bivector of the contact pair
    let good = lam.plus(&b(&[2, 3]).neg());
    let bad = lam.plus(&b(&[2, 3]));
    let r = theorem10_suite(&js, &good).unwrap();
    assert_uniform(&r, true);
    assert!(r.passed("(4) lift route"));
    assert_uniform(&theorem10_suite(&js, &bad).unwrap(), false);
}

#[test]
fn lemmas_hold_for_any_operator() {
    let opts = LemmaOptions::default();
    for broken in [false, true] {
        assert_uniform(&lemma_first_order_suite(&contact(broken), &opts).unwrap(), true);
    }
    let c = chart(&["q", "p", "u"]);
    let js = JacobiAlgebroidSpec::first_order(&c);
    let j = MultiVector::basis(&c, 4, &[0, 1]).plus(&MultiVector::basis(&c, 4, &[1, 3]).scale(&c.coord(2)));
    assert_uniform(&lemma_jacobi_algebroid_suite(&js, &j, &opts).unwrap(), true);
}
