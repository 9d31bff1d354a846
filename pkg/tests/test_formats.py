import json
import random

import pytest

from locder.algebra import Central, Element, Graded, resolve_spec
from locder.engine import decompose
from locder.formats import (
    MapFileError,
    Report,
    dump_map_file,
    map_from_json,
    map_to_json,
    parse_element,
    parse_map_file,
    parse_scalar,
    scalar_from_json,
    scalar_to_json,
    to_jsonable,
)
from locder.maps import WindowedLinearMap
from locder.sampling import random_derivation, random_scalar
from locder.scalars import QSqrt2
from fractions import Fraction

EXAMPLE = {"algebra": "w22-centerless", "window": 2, "entries": [
    {"basis": "L:1", "value": [{"basis": "I:1", "coeff": {"rat": ["1", "1"], "irr": ["0", "1"]}}]}]}


class TestScalars:
    def test_round_trip(self):
        rng = random.Random(0)
        for _ in range(50):
            x = random_scalar(rng, 10**30)
            assert scalar_from_json(json.loads(json.dumps(scalar_to_json(x)))) == x

    def test_strings(self):
        assert scalar_to_json(QSqrt2(Fraction(-1, 3), 2)) == {"rat": ["-1", "3"], "irr": ["2", "1"]}

    @pytest.mark.parametrize("bad", [{"rat": ["1", "0"]}, {"rat": "x"}, {"foo": 1}, [1]])
    def test_bad(self, bad):
        with pytest.raises(MapFileError):
            scalar_from_json(bad)

    @pytest.mark.parametrize("text,value", [
        ("3", QSqrt2(3)), ("-1/2", QSqrt2(Fraction(-1, 2))), ("√2", QSqrt2(0, 1)),
        ("1/2+3/4√2", QSqrt2(Fraction(1, 2), Fraction(3, 4))), ("2-sqrt2", QSqrt2(2, -1)),
        ("(1+√2)", QSqrt2(1, 1)), ("-2√2", QSqrt2(0, -2)),
    ])
    def test_literals(self, text, value):
        assert parse_scalar(text) == value

    def test_bad_literal(self):
        with pytest.raises(ValueError):
            parse_scalar("1/2+")


class TestElements:
    BMS3 = resolve_spec("bms3")

    def test_parse(self):
        x = parse_element("1/3*L:3 - I:-2 + (1+√2)*J:1 + C1", self.BMS3)
        assert x == Element({Graded(0, 3): Fraction(1, 3), Graded(2, -2): -1,
                             Graded(1, 1): QSqrt2(1, 1), Central(1): 1})

    def test_format_round_trip(self):
        x = parse_element("-√2*J:2 + 1/2*C + g:2:5", self.BMS3)
        assert parse_element(x.format(self.BMS3), self.BMS3) == x

    def test_zero(self):
        assert parse_element("0", self.BMS3) == Element()

    @pytest.mark.parametrize("bad", ["L:1 L:2", "2*", "X:1", "L:1 +"])
    def test_bad(self, bad):
        with pytest.raises(ValueError):
            parse_element(bad, self.BMS3)


class TestMapFiles:
    def test_example(self, tmp_path):
        p = tmp_path / "m.json"
        p.write_text(json.dumps(EXAMPLE))
        m = parse_map_file(p)
        assert m[Graded(0, 1)] == Element({Graded(1, 1): 1})
        assert sum(1 for _ in m.nonzero_entries()) == 1
        assert m[Graded(1, -2)] == Element()

    def test_J_under_w22(self):
        bad = {"algebra": "w22", "window": 2, "entries": [{"basis": "J:1", "value": []}]}
        with pytest.raises(MapFileError, match=r"entries\[0\]\.basis"):
            map_from_json(bad)

    def test_value_context(self):
        bad = {"algebra": "w22", "window": 2, "entries": [
            {"basis": "L:1", "value": [{"basis": "L:2", "coeff": {"rat": ["1", "0"]}}]}]}
        with pytest.raises(MapFileError, match=r"entries\[0\]\.value\[0\]\.coeff\.rat"):
            map_from_json(bad)

    def test_syntax_error_line(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{\n  "algebra": "w22",\n  "window": 2,\n  "entries": [,]\n}')
        with pytest.raises(MapFileError, match="line 4"):
            parse_map_file(p)

    @pytest.mark.parametrize("bad", [[], {"window": 2}, {"algebra": "w22", "window": -1},
                                     {"algebra": "w22", "window": 1, "entries": [{"basis": "L:5", "value": []}]},
                                     {"algebra": "w22", "window": 1, "entries": [
                                         {"basis": "L:1", "value": []}, {"basis": "g:0:1", "value": []}]}])
    def test_rejects(self, bad):
        with pytest.raises(MapFileError):
            map_from_json(bad)

    def test_normalize(self, tmp_path):
        raw = {"algebra": "w22", "window": 2, "entries": [
            {"basis": "I:2", "value": [{"basis": "g:0:1", "coeff": {"rat": ["2", "4"]}}]},
            {"basis": "L:0", "value": []},
            {"basis": "L:-1", "value": [{"basis": "C1", "coeff": {"rat": ["1", "1"], "irr": ["0", "1"]}}]}]}
        m = map_from_json(raw)
        norm = map_to_json(m)
        assert [e["basis"] for e in norm["entries"]] == ["L:-1", "I:2"]
        assert norm["entries"][1]["value"][0] == {"basis": "L:1", "coeff": {"rat": ["1", "2"], "irr": ["0", "1"]}}
        assert map_to_json(map_from_json(norm)) == norm
        p = tmp_path / "n.json"
        dump_map_file(m, p)
        assert parse_map_file(p) == m


class TestReports:
    def test_round_trip(self):
        spec = resolve_spec("bms3")
        _, m = random_derivation(random.Random(2), spec, 4)
        rep = decompose(m)
        r = Report("decompose", spec.name, 4, rep.outcome, to_jsonable(rep, spec), 0, 12.5)
        back = Report.from_json(r.to_json())
        assert back == r and back.timing_ms == 12.5

    def test_timing_excluded_from_equality(self):
        a = Report("x", None, None, "pass", [], 0, 1.0)
        b = Report("x", None, None, "pass", [], 0, 2.0)
        assert a == b and a.to_json(timing=False) == b.to_json(timing=False)

    def test_outer_conversion_note(self):
        from locder.maps import DerivationDescriptor
        spec = resolve_spec("bms3")
        out = to_jsonable(DerivationDescriptor(Element(), QSqrt2(3)), spec)
        assert scalar_from_json(out["outer_classical_delta"]) == QSqrt2(6)

    def test_unknown_type(self):
        with pytest.raises(TypeError):
            to_jsonable(object(), resolve_spec("witt"))
