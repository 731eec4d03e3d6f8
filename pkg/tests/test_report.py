"""Tests for report assembly and canonical JSON serialization."""

import json
import math

import numpy as np
import pytest

from geomseq import (
    GeoSeq,
    LambdaSeq,
    OrliczFn,
    PSeq,
    REPORT_SCHEMA_VERSION,
    build_analysis,
    canonical_json,
    generate,
)
from geomseq.report import ALL_SPACES, _sample_curve


class TestCanonicalJson:
    def test_sorted_keys_and_format(self):
        s = canonical_json({"b": 1, "a": [True, None, 0.5]})
        assert s.index('"a"') < s.index('"b"')
        assert json.loads(s) == {"a": [True, None, 0.5], "b": 1}

    def test_floats_roundtrip_exactly(self, rng):
        vals = rng.uniform(-1e12, 1e12, size=200).tolist() + [0.1, 1e-300, math.pi]
        out = json.loads(canonical_json({"v": vals}))
        assert out["v"] == vals

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            canonical_json({"v": math.inf})
        with pytest.raises(ValueError):
            canonical_json([math.nan])

    def test_non_string_keys_rejected(self):
        with pytest.raises(ValueError):
            canonical_json({1: "x"})

    def test_unsupported_type_rejected(self):
        with pytest.raises(ValueError):
            canonical_json({"v": {1, 2}})

    def test_string_escapes(self):
        s = canonical_json({"k": 'a"b\\c\td'})
        assert json.loads(s) == {"k": 'a"b\\c\td'}

    def test_deterministic_bytes(self):
        obj = {"z": [1.5, {"y": "w", "x": None}], "a": True}
        assert canonical_json(obj) == canonical_json(obj)

    def test_bool_not_confused_with_int(self):
        assert canonical_json(True) == "true"
        assert canonical_json(1) == "1"


class TestCurveSampling:
    def test_short_curve_kept_whole(self):
        pts = _sample_curve(np.linspace(0, 1, 10))
        assert len(pts) == 10
        assert pts[0] == [1, 0.0]

    def test_long_curve_downsampled(self):
        pts = _sample_curve(np.zeros(100_000))
        assert len(pts) <= 32
        assert pts[0][0] == 1 and pts[-1][0] == 100_000


class TestBuildAnalysis:
    def make(self, **kw):
        x = generate("log-oscillatory", 400, m=1)
        lam = LambdaSeq.cesaro(400)
        return build_analysis(x, 1, lam, **kw)

    def test_default_sections_present(self):
        rep = self.make(orlicz=OrliczFn.power(2.0))
        assert rep["schema_version"] == REPORT_SCHEMA_VERSION
        assert set(rep["spaces"]) == {"C1", "absC1", "Vlambda", "absVlambda", "linf", "S", "Slambda"}
        assert set(rep["norms"]) == {
            "cesaro_signed",
            "cesaro_absolute",
            "window_signed",
            "window_absolute",
        }
        assert set(rep["orlicz"]["membership"]) == {"L", "0", "inf"}
        assert "paranorm" in rep["orlicz"] and "delta2" in rep["orlicz"]
        assert set(rep["duals"]) == {"vlambda_sup", "vlambda_p", "alpha_dual_as_coefficients"}
        assert rep["flags"]["truncation_conditional"] is True

    def test_space_selection(self):
        rep = self.make(spaces=("C1", "linf"))
        assert set(rep["spaces"]) == {"C1", "linf"}
        assert "orlicz" not in rep and "duals" not in rep and "density_curves" not in rep

    def test_unknown_token_rejected(self):
        with pytest.raises(ValueError):
            self.make(spaces=("C1", "Hardy"))

    def test_orlicz_token_needs_spec(self):
        with pytest.raises(ValueError):
            self.make(spaces=("orlicz",))

    def test_verdicts_match_direct_calls(self):
        rep = self.make(spaces=("C1", "absC1"))
        assert rep["spaces"]["C1"]["verdict"] == "yes"
        assert rep["spaces"]["absC1"]["verdict"] == "no"

    def test_serializable_and_deterministic(self):
        kw = dict(orlicz=OrliczFn.power(2.0), p=PSeq(values=np.full(400, 2.0)))
        a = canonical_json(self.make(**kw))
        b = canonical_json(self.make(**kw))
        assert a == b
        json.loads(a)

    def test_density_curves_shape(self):
        rep = self.make(spaces=("S",), eps_logs=(0.25, 0.75))
        assert len(rep["density_curves"]) == 2
        for curve in rep["density_curves"]:
            assert curve["window"] == "cesaro"
            assert all(len(pt) == 2 for pt in curve["points"])

    def test_all_spaces_tuple_is_complete(self):
        assert ALL_SPACES == (
            "C1",
            "absC1",
            "Vlambda",
            "absVlambda",
            "linf",
            "S",
            "Slambda",
            "orlicz",
            "duals",
        )
