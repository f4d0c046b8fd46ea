"""Smoke test for the liftlab Python extension.

Build and install first, e.g.
    pip install --no-build-isolation ./crates/py
then run
    python python/smoke_test.py
"""

import liftlab

CONTACT = """
chart M(q, p, u)
jacobi J on M = (d/dq ^ d/dp + p * d/du ^ d/dp, d/du)
jacobi Jb on M = (d/dq ^ d/dp, d/du)
bivector L on M = d/dq ^ d/dp
lift poissonization J
"""


def main():
    s = liftlab.Session(seed=1)
    out = s.run(CONTACT)
    assert out["all_passed"]
    assert out["outputs"][0]["value"].startswith("exp(-s) * d/dq ^ d/dp")
    assert s.names() == ["M", "J", "Jb", "L"]
    assert s.canonical("L") == "bivector L on M = d/dq ^ d/dp"

    j = s.operator("J")
    assert j.is_jacobi()
    report = j.characterization()
    assert report.passed and report.equivalences_hold
    assert dict(report.conditions())["J8"]

    assert not s.operator("Jb").is_jacobi()
    assert not s.check("thm8", "Jb").passed

    dq = liftlab.basis(["q", "p", "u"], [0])
    dp = liftlab.basis(["q", "p", "u"], [1])
    du = liftlab.basis(["q", "p", "u"], [2])
    assert str(dq.wedge(dp)) == "d/dq ^ d/dp"
    assert dq.wedge(dq).is_zero()
    assert dq.wedge(dp).is_poisson()
    assert dq.wedge(dp).schouten(du).is_zero()
    op = liftlab.JacobiOperator.from_pair(dq.wedge(dp), du)
    assert not op.is_jacobi()

    try:
        s.run("chart N(x y)")
    except ValueError as e:
        assert str(e).startswith("1:11:"), e
    else:
        raise AssertionError("syntax error not raised")

    b = liftlab.battery(seed=3, count=4)
    assert b.passed, str(b)
    assert b.to_dict()["suite"] == "battery"

    direct = liftlab.run_script("chart M(x, y)\nbivector L on M = x * d/dx ^ d/dy\ncheck poisson L\n")
    assert direct["outputs"][0]["report"]["all_passed"]
    print("python smoke test passed")


if __name__ == "__main__":
    main()
