"""Smoke test for the gkcat extension module.

Build and install first:
    pip install maturin
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/gkcat-*.whl
then run `python python/smoke_test.py` (or `pytest python/`).
"""

import json
import pathlib

import gkcat

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "crates" / "core" / "fixtures"


def load(name):
    return gkcat.Presentation.from_file(str(FIXTURES / name))


def test_presentation():
    p1 = load("p1.gk")
    assert p1.is_valid()
    assert p1.validate() == []
    assert "AB" in p1.objects()
    assert "f" in p1.homs()
    broken = load("broken.gk")
    assert not broken.is_valid()
    assert any("associativity" in v for v in broken.validate())


def test_terms():
    p1 = load("p1.gk")
    assert p1.canonical("pA;f;g_s + pA;f2") == "pA;f2 + pA;f;g_s"
    assert p1.product("pA;f + pB;s", "theta(S1)") == "pA;f;theta(S1) + pB;s;theta(S1)"
    assert p1.add("f", p1.negate("f")) == "0(A,D)"
    try:
        p1.product("f", "f")
    except gkcat.GkError:
        pass
    else:
        raise AssertionError("ill-typed product accepted")


def test_equiv_and_traces():
    p1 = load("p1.gk")
    m1 = gkcat.Model.from_file(p1, str(FIXTURES / "m1.json"))
    trace = p1.equiv("pA;f;theta(S1) + pB;s;theta(S1)", "id(AB)", depth=1)
    assert trace is not None
    assert p1.check_trace(trace) == 1
    assert m1.check_trace(trace)
    doc = json.loads(trace)
    assert doc["steps"][0]["ruleId"] == "R9(left,S1)"
    assert p1.equiv("f", "f;g_s", depth=2) is None


def test_normal_forms():
    p3 = load("p3.gk")
    assert p3.normalize("theta(S1)") == "u;theta(S1');id(AB)"
    nf, trace = p3.normalize_traced("theta(S1);pB")
    assert p3.is_normal(nf)
    assert p3.check_trace(trace) > 0


def test_models():
    p1 = load("p1.gk")
    m1 = gkcat.Model.from_file(p1, str(FIXTURES / "m1.json"))
    assert m1.validate() == []
    assert m1.eval("theta(S1)") == [[1, 0], [0, 1]]
    assert m1.eval("pA;f + pB;s") == [[1, 0], [0, 1]]
    doc = json.loads(m1.to_json())
    doc["gens"]["g_s"] = [[0, 0], [0, 2]]
    bad = gkcat.Model(p1, json.dumps(doc))
    assert {label for label, _ in bad.validate()} == {"a"}


def test_cli():
    code, out = gkcat.run_cli(["validate", str(FIXTURES / "p1.gk")])
    assert (code, out) == (0, "valid\n")
    code, out = gkcat.run_cli(
        ["eval", str(FIXTURES / "p1.gk"), "--model", str(FIXTURES / "m1.json"), "-e", "theta(S1)"]
    )
    assert (code, out) == (0, "2x2\n[1, 0]\n[0, 1]\n")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"ok {name}")
