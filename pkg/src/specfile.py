"""
Lector de archivos .spec

Formato UTF-8 por secciones entre corchetes; '#' inicia un comentario.

    [coords]       t r theta phi
    [params]       M = 1
    [unknowns]     c0 = 0.9                    (incógnitas del ajuste, valor inicial)
    [tetrad]       e MU I = <expr>             (faltantes = 0)
    [spin]         w I MU NU = <expr>          (conexión explícita, se antisimetriza)
    [domain]       <coord> in (a, b)
    [lorentz]      L MU NU = <expr>            (faltantes = identidad)
    [coordchange]  xbar I = <expr> / x I = <expr>   (directa e inversa)
    [vectorfield]  eps I = <expr> / D MU NU = <expr> / G MU I = <expr>
    [anchor]       e MU I at (x0, x1, x2, x3) = <expr>
    [expect]       <check> = pass | fail

MU, NU son índices de marco 0..3; I acepta un nombre de coordenada o 0..3.
Los límites de dominio y los puntos de anclaje son expresiones constantes.
"""

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.exceptions import SpecFileError, TetradJetError
from src.exprdsl import ZERO, Constant, Coord, Expr, Neg, evaluate, parse, to_text
from src.geometry import TetradField
from src.sections import Section, spin_array
from src.solver import Anchor
from src.transforms import CoordChange, JVectorField, LorentzField
from src.utils import Interval, compute_digest


logger = logging.getLogger(__name__)

SECTIONS = (
    "coords", "params", "unknowns", "tetrad", "spin", "domain",
    "lorentz", "coordchange", "vectorfield", "anchor", "expect",
)

_HEADER = re.compile(r"^\[(?P<name>[A-Za-z_]+)\]$")
_ASSIGN = re.compile(r"^(?P<lhs>[^=]+?)\s*=\s*(?P<rhs>.+)$")
_DOMAIN = re.compile(r"^(?P<coord>\w+)\s+in\s+\(\s*(?P<a>[^,]+?)\s*,\s*(?P<b>[^)]+?)\s*\)$")
_ANCHOR = re.compile(
    r"^e\s+(?P<mu>\S+)\s+(?P<i>\S+)\s+at\s+\((?P<point>[^)]*)\)\s*=\s*(?P<rhs>.+)$"
)
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

_EXPECT_VALUES = ("pass", "fail")


@dataclass
class SpecFile:
    """
    Representación interna de un archivo .spec

    Las claves de los diccionarios de componentes son tuplas de índices
    enteros; las expresiones ya están resueltas contra coords y params.
    """

    coords: Tuple[str, ...]
    params: Dict[str, float]
    tetrad: Dict[Tuple[int, int], Expr]
    domain: Tuple[Interval, ...]
    unknowns: Dict[str, float] = field(default_factory=dict)
    spin: Optional[Dict[Tuple[int, int, int], Expr]] = None
    lorentz: Optional[Dict[Tuple[int, int], Expr]] = None
    forward: Optional[Dict[int, Expr]] = None
    inverse: Optional[Dict[int, Expr]] = None
    vectorfield: Optional[Dict[str, Dict[tuple, Expr]]] = None
    anchors: List[Anchor] = field(default_factory=list)
    expect: Dict[str, str] = field(default_factory=dict)
    name: str = field(default="", compare=False)
    digest: str = field(default="", compare=False)

    @property
    def environment(self) -> Dict[str, float]:
        """Parámetros más incógnitas en su valor inicial"""
        return {**self.params, **self.unknowns}

    def expects_failure(self, check: str) -> bool:
        return self.expect.get(check) == "fail"

    def tetrad_field(self, overrides: Optional[Dict[str, float]] = None) -> TetradField:
        rows = [[self.tetrad.get((mu, i), ZERO) for i in range(4)] for mu in range(4)]
        return TetradField(
            rows,
            params={**self.environment, **(overrides or {})},
            domain=self.domain,
            coords=self.coords,
            name=self.name,
        )

    def section(self) -> Section:
        spin = spin_array(self.spin) if self.spin else None
        return Section(self.tetrad_field(), spin=spin, name=self.name)

    def lorentz_field(self) -> LorentzField:
        if self.lorentz is None:
            return LorentzField.identity()
        rows = [
            [self.lorentz.get((mu, nu), Constant(1.0 if mu == nu else 0.0)) for nu in range(4)]
            for mu in range(4)
        ]
        return LorentzField(rows, self.environment, name=f"{self.name}.lorentz")

    def coord_change(self) -> CoordChange:
        if self.forward is None and self.inverse is None:
            return CoordChange.identity()
        forward = [(self.forward or {}).get(k, Coord(k)) for k in range(4)]
        inverse = [(self.inverse or {}).get(k, Coord(k)) for k in range(4)]
        return CoordChange(forward, inverse, self.environment, name=f"{self.name}.coordchange")

    def vector_field(self) -> Optional[JVectorField]:
        if self.vectorfield is None:
            return None
        eps = self.vectorfield.get("eps", {})
        D = self.vectorfield.get("D", {})
        G = self.vectorfield.get("G", {})
        return JVectorField(
            [eps.get((k,), ZERO) for k in range(4)],
            [[D.get((mu, nu), ZERO) for nu in range(4)] for mu in range(4)],
            [[G.get((mu, q), ZERO) for q in range(4)] for mu in range(4)],
            self.environment,
            name=f"{self.name}.vectorfield",
        )


# ============================================================================
# LECTURA
# ============================================================================

class _Reader:
    """Analiza las líneas ya agrupadas por sección en orden canónico"""

    def __init__(self, blocks: Dict[str, List[Tuple[int, str]]], headers: Dict[str, int], last_line: int):
        self.blocks = blocks
        self.headers = headers
        # Una sección ausente se reporta en la última línea leída
        self.end_line = max(1, last_line)
        self.coords: Tuple[str, ...] = ()
        self.env: Dict[str, float] = {}

    def expr(self, text: str, line: int) -> Expr:
        try:
            return parse(text, self.coords, list(self.env))
        except TetradJetError as e:
            raise SpecFileError(f"expresión inválida '{text}': {e}", line) from e

    def constant(self, text: str, line: int) -> float:
        try:
            return float(evaluate(parse(text, self.coords, list(self.env)), np.zeros(4), self.env))
        except TetradJetError as e:
            raise SpecFileError(f"valor constante inválido '{text}': {e}", line) from e

    def frame_index(self, token: str, line: int) -> int:
        if token.isdigit() and int(token) < 4:
            return int(token)
        raise SpecFileError(f"índice de marco inválido: {token}", line)

    def coord_index(self, token: str, line: int) -> int:
        if token in self.coords:
            return self.coords.index(token)
        if token.isdigit() and int(token) < 4:
            return int(token)
        if re.fullmatch(r"x[0-3]", token):
            return int(token[1])
        raise SpecFileError(f"coordenada desconocida: {token}", line)

    def assignments(self, section: str):
        for line, text in self.blocks.get(section, []):
            match = _ASSIGN.match(text)
            if not match:
                raise SpecFileError(f"se esperaba 'lhs = expr' en [{section}]", line)
            yield line, match.group("lhs").split(), match.group("rhs")

    # ------------------------------------------------------------------

    def read_coords(self) -> None:
        lines = self.blocks.get("coords")
        if not lines:
            raise SpecFileError("falta la sección [coords]", self.headers.get("coords", self.end_line))
        names = [name for _, text in lines for name in text.split()]
        line = lines[0][0]
        if len(names) != 4:
            raise SpecFileError(f"se requieren 4 coordenadas, declaradas {len(names)}", line)
        if len(set(names)) != 4 or not all(_NAME.match(n) for n in names):
            raise SpecFileError(f"nombres de coordenadas inválidos: {names}", line)
        self.coords = tuple(names)

    def read_constants(self, section: str) -> Dict[str, float]:
        values: Dict[str, float] = {}
        for line, lhs, rhs in self.assignments(section):
            if len(lhs) != 1 or not _NAME.match(lhs[0]):
                raise SpecFileError(f"nombre inválido en [{section}]: {' '.join(lhs)}", line)
            name = lhs[0]
            if name in self.env or name in self.coords:
                raise SpecFileError(f"nombre repetido: {name}", line)
            values[name] = self.constant(rhs, line)
            self.env[name] = values[name]
        return values

    def read_components(self, section: str, tag: str, kinds: Sequence[str]) -> Dict[tuple, Expr]:
        """kinds: 'f' índice de marco, 'c' índice de coordenada"""
        out: Dict[tuple, Expr] = {}
        for line, lhs, rhs in self.assignments(section):
            if len(lhs) != len(kinds) + 1 or lhs[0] != tag:
                raise SpecFileError(f"se esperaba '{tag} {' '.join(k.upper() for k in kinds)} = expr'", line)
            key = tuple(
                self.frame_index(tok, line) if kind == "f" else self.coord_index(tok, line)
                for tok, kind in zip(lhs[1:], kinds)
            )
            if key in out:
                raise SpecFileError(f"componente repetida {tag}{key}", line)
            out[key] = self.expr(rhs, line)
        return out

    def read_spin(self) -> Optional[Dict[Tuple[int, int, int], Expr]]:
        if "spin" not in self.blocks:
            return None
        out = {}
        for line, lhs, rhs in self.assignments("spin"):
            if len(lhs) != 4 or lhs[0] != "w":
                raise SpecFileError("se esperaba 'w I MU NU = expr'", line)
            i = self.coord_index(lhs[1], line)
            mu, nu = self.frame_index(lhs[2], line), self.frame_index(lhs[3], line)
            if mu == nu:
                raise SpecFileError(f"componente diagonal w {i} {mu} {nu}", line)
            key = (i, mu, nu) if mu < nu else (i, nu, mu)
            if key in out:
                raise SpecFileError(f"componente w {i} {mu} {nu} declarada dos veces (antisimetría)", line)
            expr = self.expr(rhs, line)
            out[key] = expr if mu < nu else Neg(expr)
        return out

    def read_domain(self) -> Tuple[Interval, ...]:
        lines = self.blocks.get("domain")
        if not lines:
            raise SpecFileError("falta la sección [domain]", self.headers.get("domain", self.end_line))
        intervals: Dict[int, Interval] = {}
        for line, text in lines:
            match = _DOMAIN.match(text)
            if not match:
                raise SpecFileError("se esperaba '<coord> in (a, b)'", line)
            k = self.coord_index(match.group("coord"), line)
            a, b = self.constant(match.group("a"), line), self.constant(match.group("b"), line)
            if not a < b:
                raise SpecFileError(f"intervalo vacío ({a}, {b})", line)
            intervals[k] = (a, b)
        missing = [self.coords[k] for k in range(4) if k not in intervals]
        if missing:
            raise SpecFileError(f"falta dominio para {', '.join(missing)}", lines[0][0])
        return tuple(intervals[k] for k in range(4))

    def read_coordchange(self) -> Tuple[Optional[Dict[int, Expr]], Optional[Dict[int, Expr]]]:
        if "coordchange" not in self.blocks:
            return None, None
        forward: Dict[int, Expr] = {}
        inverse: Dict[int, Expr] = {}
        for line, lhs, rhs in self.assignments("coordchange"):
            if len(lhs) != 2 or lhs[0] not in ("xbar", "x"):
                raise SpecFileError("se esperaba 'xbar I = expr' o 'x I = expr'", line)
            target = forward if lhs[0] == "xbar" else inverse
            k = self.coord_index(lhs[1], line)
            if k in target:
                raise SpecFileError(f"componente repetida {lhs[0]} {lhs[1]}", line)
            target[k] = self.expr(rhs, line)
        return forward, inverse

    def read_vectorfield(self) -> Optional[Dict[str, Dict[tuple, Expr]]]:
        if "vectorfield" not in self.blocks:
            return None
        kinds = {"eps": "c", "D": "ff", "G": "fc"}
        out: Dict[str, Dict[tuple, Expr]] = {tag: {} for tag in kinds}
        for line, lhs, rhs in self.assignments("vectorfield"):
            tag = lhs[0]
            if tag not in kinds or len(lhs) != len(kinds[tag]) + 1:
                raise SpecFileError("se esperaba 'eps I', 'D MU NU' o 'G MU I'", line)
            key = tuple(
                self.frame_index(tok, line) if kind == "f" else self.coord_index(tok, line)
                for tok, kind in zip(lhs[1:], kinds[tag])
            )
            if key in out[tag]:
                raise SpecFileError(f"componente repetida {tag}{key}", line)
            out[tag][key] = self.expr(rhs, line)
        return out

    def read_anchors(self) -> List[Anchor]:
        anchors = []
        for line, text in self.blocks.get("anchor", []):
            match = _ANCHOR.match(text)
            if not match:
                raise SpecFileError("se esperaba 'e MU I at (x0, x1, x2, x3) = expr'", line)
            parts = [p.strip() for p in match.group("point").split(",")]
            if len(parts) != 4:
                raise SpecFileError("el punto de anclaje requiere 4 coordenadas", line)
            point = tuple(self.constant(p, line) for p in parts)
            anchors.append(Anchor(
                mu=self.frame_index(match.group("mu"), line),
                index=self.coord_index(match.group("i"), line),
                point=point,
                value=self.constant(match.group("rhs"), line),
            ))
        return anchors

    def read_expect(self) -> Dict[str, str]:
        expect = {}
        for line, lhs, rhs in self.assignments("expect"):
            verdict = rhs.strip().lower()
            if len(lhs) != 1 or verdict not in _EXPECT_VALUES:
                raise SpecFileError("se esperaba '<check> = pass|fail'", line)
            expect[lhs[0]] = verdict
        return expect


def _split_blocks(text: str) -> Tuple[Dict[str, List[Tuple[int, str]]], Dict[str, int]]:
    """Líneas de contenido agrupadas por sección y línea de cada cabecera"""
    blocks: Dict[str, List[Tuple[int, str]]] = {}
    headers: Dict[str, int] = {}
    current: Optional[str] = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        header = _HEADER.match(line)
        if header:
            current = header.group("name").lower()
            if current not in SECTIONS:
                raise SpecFileError(f"sección desconocida [{current}]", number)
            if current in blocks:
                raise SpecFileError(f"sección [{current}] repetida", number)
            blocks[current] = []
            headers[current] = number
            continue
        if current is None:
            raise SpecFileError("contenido antes de la primera sección", number)
        blocks[current].append((number, line))
    return blocks, headers


def parse_spec(text: str, name: str = "") -> SpecFile:
    """
    Construye un SpecFile desde el texto

    Raises:
        SpecFileError: con el número de línea (1-based) del problema
    """
    blocks, headers = _split_blocks(text)
    reader = _Reader(blocks, headers, len(text.splitlines()))
    reader.read_coords()
    params = reader.read_constants("params")
    unknowns = reader.read_constants("unknowns")
    tetrad = reader.read_components("tetrad", "e", "fc")
    if not tetrad:
        raise SpecFileError("la sección [tetrad] está vacía o falta", headers.get("tetrad", reader.end_line))
    forward, inverse = reader.read_coordchange()
    lorentz = reader.read_components("lorentz", "L", "ff") if "lorentz" in reader.blocks else None

    return SpecFile(
        coords=reader.coords,
        params=params,
        tetrad=tetrad,
        domain=reader.read_domain(),
        unknowns=unknowns,
        spin=reader.read_spin(),
        lorentz=lorentz,
        forward=forward,
        inverse=inverse,
        vectorfield=reader.read_vectorfield(),
        anchors=reader.read_anchors(),
        expect=reader.read_expect(),
        name=name,
        digest=compute_digest(text),
    )


def load_spec(path) -> SpecFile:
    """Lee un .spec del disco"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise SpecFileError(f"no se pudo leer {path}: {e}") from e
    spec = parse_spec(text, name=path.stem)
    logger.debug(f"Spec {path.name} leído ({len(spec.tetrad)} componentes de tétrada)")
    return spec


# ============================================================================
# ESCRITURA NORMALIZADA
# ============================================================================

def dump_normalized(spec: SpecFile) -> str:
    """
    Texto canónico: secciones en orden fijo, componentes ordenadas, índices numéricos
    parse_spec(dump_normalized(s)) == s
    """
    coords = spec.coords
    show = lambda expr: to_text(expr, coords)  # noqa: E731
    out = ["[coords]", " ".join(coords)]

    if spec.params:
        out += ["", "[params]"] + [f"{k} = {v!r}" for k, v in spec.params.items()]
    if spec.unknowns:
        out += ["", "[unknowns]"] + [f"{k} = {v!r}" for k, v in spec.unknowns.items()]

    out += ["", "[tetrad]"] + [f"e {mu} {i} = {show(spec.tetrad[(mu, i)])}" for mu, i in sorted(spec.tetrad)]
    if spec.spin:
        out += ["", "[spin]"] + [f"w {i} {mu} {nu} = {show(spec.spin[(i, mu, nu)])}" for i, mu, nu in sorted(spec.spin)]

    out += ["", "[domain]"] + [f"{coords[k]} in ({a!r}, {b!r})" for k, (a, b) in enumerate(spec.domain)]

    if spec.lorentz is not None:
        out += ["", "[lorentz]"] + [f"L {mu} {nu} = {show(spec.lorentz[(mu, nu)])}" for mu, nu in sorted(spec.lorentz)]
    if spec.forward is not None or spec.inverse is not None:
        out += ["", "[coordchange]"]
        out += [f"xbar {k} = {show(v)}" for k, v in sorted((spec.forward or {}).items())]
        out += [f"x {k} = {show(v)}" for k, v in sorted((spec.inverse or {}).items())]
    if spec.vectorfield is not None:
        out += ["", "[vectorfield]"]
        for tag in ("eps", "D", "G"):
            for key in sorted(spec.vectorfield.get(tag, {})):
                out.append(f"{tag} {' '.join(str(k) for k in key)} = {show(spec.vectorfield[tag][key])}")
    if spec.anchors:
        out += ["", "[anchor]"]
        for a in spec.anchors:
            point = ", ".join(repr(float(v)) for v in a.point)
            out.append(f"e {a.mu} {a.index} at ({point}) = {a.value!r}")
    if spec.expect:
        out += ["", "[expect]"] + [f"{k} = {v}" for k, v in sorted(spec.expect.items())]
    return "\n".join(out) + "\n"

