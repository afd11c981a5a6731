"""
Pruebas del lector de archivos .spec
"""

import math

import pytest

from src.exceptions import SpecFileError
from src.exprdsl import Neg, parse
from src.specfile import dump_normalized, load_spec, parse_spec
from src.transforms import CoordChange, LorentzField

MINIMAL = """\
[coords]
t x y z

[tetrad]
e 0 t = 1
e 1 x = 1
e 2 y = 1
e 3 z = 1

[domain]
t in (0, 1)
x in (0, 1)
y in (0, 1)
z in (0, 1)
"""


def _with(extra: str) -> str:
    return MINIMAL + "\n" + extra


class TestParseSpec:
    def test_minimal(self):
        spec = parse_spec(MINIMAL, name="plano")
        assert spec.coords == ("t", "x", "y", "z")
        assert spec.domain == ((0.0, 1.0),) * 4
        assert spec.spin is None and spec.anchors == []
        assert len(spec.digest) > 0
        assert isinstance(spec.lorentz_field(), LorentzField)
        assert isinstance(spec.coord_change(), CoordChange)

    def test_schwarzschild_file(self, specs_dir):
        spec = load_spec(specs_dir / "schwarzschild.spec")
        assert spec.name == "schwarzschild"
        assert spec.params == {"M": 1.0}
        assert spec.domain[2] == pytest.approx((0.3, math.pi - 0.3))
        assert set(spec.spin) == {(0, 0, 1), (2, 1, 2), (3, 1, 3), (3, 2, 3)}
        assert spec.coord_change().verify([(0.5, 5.0, 1.0, 0.5)]) <= 1e-9

    def test_spin_order_is_negated(self):
        spec = parse_spec(_with("[spin]\nw t 1 0 = 0.5*t\n"))
        assert spec.spin == {(0, 0, 1): Neg(parse("0.5*t", ("t", "x", "y", "z")))}

    def test_expect_and_unknowns(self, specs_dir):
        assert load_spec(specs_dir / "nonholonomic.spec").expects_failure("contact")
        family = load_spec(specs_dir / "schwarzschild_family.spec")
        assert family.unknowns == {"c0": 0.9, "c1": -1.5}
        anchor = family.anchors[0]
        assert (anchor.mu, anchor.index) == (0, 0)
        assert anchor.value == pytest.approx(math.sqrt(0.75))

    def test_comments_and_blank_lines(self):
        spec = parse_spec("# cabecera\n\n" + MINIMAL.replace("e 0 t = 1", "e 0 t = 1  # lapso"))
        assert spec.tetrad[(0, 0)] == parse("1")

    @pytest.mark.parametrize("path", [
        "minkowski.spec", "schwarzschild.spec", "frw_dust.spec", "rindler.spec",
        "schwarzschild_family.spec", "perturbed.spec", "nonholonomic.spec",
    ])
    def test_normalized_round_trip(self, specs_dir, path):
        spec = load_spec(specs_dir / path)
        text = dump_normalized(spec)
        again = parse_spec(text)
        assert again == spec
        assert dump_normalized(again) == text


class TestSpecErrors:
    @pytest.mark.parametrize("text, line", [
        (MINIMAL.replace("e 1 x = 1", "e 1 x = 1 +"), 6),
        (MINIMAL.replace("e 1 x = 1", "e 7 x = 1"), 6),
        (MINIMAL.replace("e 1 x = 1", "e 1 w = 1"), 6),
        (MINIMAL.replace("x in (0, 1)", "x in (1, 0)"), 12),
        (MINIMAL.replace("t x y z", "t x y"), 2),
        ("t x y z\n" + MINIMAL, 1),
        (_with("[bogus]\n"), 16),
        (_with("[params]\nM = 1\nM = 2\n"), 18),
        (_with("[expect]\nvacuum = maybe\n"), 17),
        (_with("[spin]\nw t 1 1 = 1\n"), 17),
        (_with("[spin]\nw t 0 1 = 1\nw t 1 0 = 2\n"), 18),
        (_with("[spin]\nw t 0 = 1\n"), 17),
        (MINIMAL.split("[domain]")[0], 9),
        (MINIMAL.replace("[coords]\nt x y z\n", ""), 12),
        (MINIMAL.replace("e 0 t = 1\ne 1 x = 1\ne 2 y = 1\ne 3 z = 1\n", ""), 4),
    ])
    def test_reports_line(self, text, line):
        with pytest.raises(SpecFileError) as info:
            parse_spec(text)
        assert info.value.line == line
        assert str(info.value).startswith(f"línea {line}:")

    def test_missing_domain_axis(self):
        with pytest.raises(SpecFileError, match="falta dominio para z"):
            parse_spec(MINIMAL.replace("z in (0, 1)\n", ""))

    def test_unknown_function(self):
        with pytest.raises(SpecFileError, match="expresión inválida"):
            parse_spec(MINIMAL.replace("e 1 x = 1", "e 1 x = sinh(t)"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(SpecFileError):
            load_spec(tmp_path / "no_existe.spec")

    def test_unknown_vectorfield_tag(self):
        with pytest.raises(SpecFileError):
            parse_spec(_with("[vectorfield]\nH 0 1 = 1\n"))
