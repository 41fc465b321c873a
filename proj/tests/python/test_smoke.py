import json
import math
import os
from pathlib import Path

import numpy as np
import pytest

import fockop

CORPUS = Path(os.environ.get("FOCKOP_CORPUS", Path(__file__).resolve().parents[2] / "corpus"))


def one_dim(a, b, psi=None, p=2.0, q=2.0):
    return fockop.problem(
        {
            "version": 1,
            "n": 1,
            "p": p,
            "q": q,
            "psi": psi or [{"coeff": [1, 0], "power": [0], "freq": [[0, 0]]}],
            "phi": {"A": [[a, 0]], "b": [[b, 0]]},
        }
    )


def test_identity():
    pr = fockop.problem(CORPUS / "identity_n1.json")
    c = fockop.classify(pr)
    assert c.verdict == "bounded_not_compact"
    assert c.bounded
    nb = fockop.norm_bounds(pr)
    assert nb.lower == pytest.approx(1.0)
    assert nb.upper == pytest.approx(1.0)


def test_inadmissible():
    c = fockop.classify(one_dim(2.0, 0.0))
    assert c.verdict == "unbounded"
    assert "spectral norm 2 > 1" in c.certificate
    with pytest.raises(fockop.DomainError):
        fockop.norm_bounds(one_dim(2.0, 0.0))


def test_weighted_translation_norm():
    psi = [{"coeff": [1, 0], "power": [0], "freq": [[-0.3, 0]]}]
    pr = one_dim(1.0, 0.3, psi)
    assert fockop.classify(pr).verdict == "bounded_not_compact"
    s = fockop.ell_sup(pr)
    assert s.finite
    assert s.value == pytest.approx(math.exp(0.5 * 0.09), rel=1e-12)


def test_matrix_and_truncation():
    pr = one_dim(0.5, 0.0)
    m = fockop.f2_matrix(pr, 6)
    assert m.shape == (7, 7)
    assert np.allclose(m, np.diag(0.5 ** np.arange(7)))
    assert fockop.truncated_norm(pr, 6) == pytest.approx(1.0)


def test_carleson_and_unsupported():
    pr = one_dim(0.5, 0.2, p=3.0, q=2.0)
    r = fockop.carleson_integral(pr)
    assert r["member"] and r["r"] == pytest.approx(6.0)
    assert r["lr_norm"] > 0
    with pytest.raises(fockop.UnsupportedError):
        fockop.essential_norm_bounds(pr)


def test_report_round_trip():
    pr = fockop.problem(CORPUS / "flat_contracting_n2.json")
    rep = json.loads(fockop.report("bounds", pr, "flat"))
    assert rep["source"] == "flat"
    assert rep["verdict"] == "bounded_not_compact"
    again = fockop.Problem.from_json(json.dumps(rep["problem"]))
    assert json.loads(again.to_json()) == rep["problem"]


def test_parse_errors():
    with pytest.raises(fockop.ParseError):
        fockop.problem('{"version": 1}')
    with pytest.raises(fockop.ParseError):
        fockop.report("frobnicate", one_dim(0.5, 0.0))
