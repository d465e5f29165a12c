"""Verdicts, the evaluation matrix, and comparison against expected verdicts."""
from __future__ import annotations

import csv
import enum
import hashlib
import io
import json
import re
from dataclasses import asdict, dataclass, field, fields, replace
from importlib import resources
from typing import Any, Callable, Iterable, Mapping

from .attacks.core import AttackOutcome, GameConfig, GameError, ci_contains
from .attacks.games import builder_groups, run_cells
from .schemes import SCHEME_NAMES, AddressScheme, SchemeError, get_scheme_class

MIN_TRIALS = 1000
UNRESISTANT_AT = 0.95


class Level(str, enum.Enum):
    RESISTANT = "resistant"
    PROBABILISTIC = "probabilistic"
    UNRESISTANT = "unresistant"
    NOT_APPLICABLE = "not_applicable"

    @property
    def symbol(self) -> str:
        return SYMBOLS[self]


SYMBOLS = {Level.RESISTANT: "✓✓", Level.PROBABILISTIC: "✓", Level.UNRESISTANT: "✗",
           Level.NOT_APPLICABLE: "-"}


class InsufficientTrials(GameError):
    pass


class FixtureError(ValueError):
    pass


@dataclass(frozen=True)
class Column:
    layer: str
    attack: str
    medium: str

    @property
    def key(self) -> str:
        return f"{self.layer}/{self.attack}/{self.medium}"

    @classmethod
    def parse(cls, key: str) -> "Column":
        parts = key.split("/")
        if len(parts) != 3:
            raise FixtureError(f"bad column key {key!r}")
        return cls(*parts)


COLUMNS: tuple[Column, ...] = (
    Column("L1", "slla", "coin-to-coin"),
    Column("L1", "slla", "coin-to-value"),
    Column("L1", "slla", "coin-to-time"),
    Column("L0", "tlla", "tran-to-tran"),
    Column("L0", "tlla", "coin-to-coin"),
    Column("L2", "rccla", "sent-coin"),
    Column("L2", "rccla", "coin-to-value"),
    Column("L2", "rccla", "coin-to-time"),
    Column("L2", "sccla", "consumed-coin"),
    Column("L2", "sccla", "coin-to-value"),
    Column("L2", "sccla", "coin-to-time"),
)
COLUMN_KEYS = tuple(c.key for c in COLUMNS)
INDIRECT_KEY = "L1/anonymity/indirect-deanon"


# -- verdicts ----------------------------------------------------------------

@dataclass(frozen=True)
class ResistanceVerdict:
    level: Level
    # Measured success rate; set only for probabilistic resistance.
    p_est: float | None = None
    evidence: AttackOutcome | None = None
    note: str | None = None

    @property
    def symbol(self) -> str:
        return self.level.symbol

    def to_dict(self) -> dict:
        return {"level": self.level.value, "p_est": self.p_est, "note": self.note,
                "evidence": None if self.evidence is None else self.evidence.to_dict()}

    @classmethod
    def from_dict(cls, d: Mapping) -> "ResistanceVerdict":
        ev = d.get("evidence")
        return cls(Level(d["level"]), d.get("p_est"),
                   None if ev is None else AttackOutcome.from_dict(ev), d.get("note"))


def classify(outcome: AttackOutcome, *, min_trials: int = MIN_TRIALS) -> ResistanceVerdict:
    """Map a measured outcome onto the resistant / probabilistic / unresistant scale.

    Resistant when the 95% interval reaches the baseline (or the adversary does
    no better than it); unresistant at a success rate of 0.95 or more;
    otherwise probabilistically resistant at the measured rate.
    """
    if not outcome.applicable:
        return ResistanceVerdict(Level.NOT_APPLICABLE, evidence=outcome, note=outcome.not_applicable)
    if outcome.trials < min_trials:
        raise InsufficientTrials(f"{outcome.trials} trials; classification needs >= {min_trials}")
    if ci_contains(outcome.wilson_ci_95, outcome.baseline):
        return ResistanceVerdict(Level.RESISTANT, evidence=outcome)
    if outcome.success_rate < outcome.baseline:
        return ResistanceVerdict(Level.RESISTANT, evidence=outcome, note="below baseline")
    if outcome.success_rate >= UNRESISTANT_AT:
        return ResistanceVerdict(Level.UNRESISTANT, evidence=outcome)
    return ResistanceVerdict(Level.PROBABILISTIC, p_est=outcome.success_rate, evidence=outcome)


def parse_symbol(text: str) -> Level:
    """'✓✓(Ring CT)' -> resistant, '✓(prob.)' -> probabilistic, '✗' -> unresistant."""
    core = re.sub(r"\(.*\)\s*$", "", str(text)).strip()
    for level, sym in sorted(SYMBOLS.items(), key=lambda kv: -len(kv[1])):
        if core == sym:
            return level
    if core in ("−", "–"):
        return Level.NOT_APPLICABLE
    raise FixtureError(f"unrecognised verdict symbol {text!r}")


# -- run configuration ----------------------------------------------------------

@dataclass
class RunConfig:
    """Everything that determines a run.  ``format``/``out``/``transcript``
    only choose where results go and are left out of the digest."""

    schemes: tuple[str, ...] = SCHEME_NAMES
    attack: str = "slla"
    medium: str = "coin-to-coin"
    columns: tuple[str, ...] = COLUMN_KEYS
    trials: int = 10000
    seed: int = 42
    ring_size: int = 4
    mix_size: int = 4
    candidates: int = 8
    mixnet: bool = False
    group_profile: str = "toy64"
    scoring: str = "expected"
    maturity: int = 10
    min_trials: int = MIN_TRIALS
    format: str = "json"
    out: str | None = None
    transcript: str | None = None

    OUTPUT_FIELDS = ("format", "out", "transcript")

    def __post_init__(self):
        self.schemes = tuple(get_scheme_class(s).name for s in self.schemes)
        if not self.schemes:
            raise GameError("at least one scheme is required")
        self.columns = tuple(Column.parse(k).key for k in self.columns)
        unknown = set(self.columns) - set(COLUMN_KEYS)
        if unknown:
            raise GameError(f"unknown matrix columns: {sorted(unknown)}")
        if self.format not in RENDERERS:
            raise GameError(f"unknown format {self.format!r}")
        if self.min_trials < 1:
            raise GameError("min_trials must be >= 1")
        self.game_config(self.schemes[0])  # validates the shared game fields

    def game_config(self, scheme: str, attack: str | None = None,
                    medium: str | None = None) -> GameConfig:
        return GameConfig(scheme=scheme, attack=attack or self.attack, medium=medium or self.medium,
                          trials=self.trials, seed=self.seed, candidates=self.candidates,
                          ring_size=self.ring_size, mix_size=self.mix_size, mixnet=self.mixnet,
                          group_profile=self.group_profile, scoring=self.scoring,
                          maturity=self.maturity)

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["schemes"] = list(self.schemes)
        d["columns"] = list(self.columns)
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise GameError(f"unknown config keys: {sorted(extra)}")
        d = dict(d)
        for k in ("schemes", "columns"):
            if k in d:
                if isinstance(d[k], str) or not isinstance(d[k], (list, tuple)):
                    raise GameError(f"{k} must be a list")
                d[k] = tuple(d[k])
        return cls(**d)

    def digest(self) -> str:
        d = {k: v for k, v in self.to_dict().items() if k not in self.OUTPUT_FIELDS}
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()


# -- the matrix ----------------------------------------------------------------

@dataclass
class EvaluationMatrix:
    rows: tuple[str, ...]
    cols: tuple[Column, ...]
    cells: dict[str, dict[str, ResistanceVerdict]]
    metadata: dict[str, Any] = field(default_factory=dict)

    def verdict(self, scheme: str, column: str | Column) -> ResistanceVerdict:
        key = column.key if isinstance(column, Column) else column
        try:
            return self.cells[scheme][key]
        except KeyError:
            raise KeyError(f"no cell ({scheme}, {key})") from None

    def to_dict(self) -> dict:
        return {
            "rows": list(self.rows),
            "cols": [asdict(c) for c in self.cols],
            "cells": {s: {k: v.to_dict() for k, v in row.items()} for s, row in self.cells.items()},
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "EvaluationMatrix":
        return cls(tuple(d["rows"]), tuple(Column(**c) for c in d["cols"]),
                   {s: {k: ResistanceVerdict.from_dict(v) for k, v in row.items()}
                    for s, row in d["cells"].items()},
                   dict(d.get("metadata", {})))


Progress = Callable[[str, list[tuple[str, str]]], None]


def build_matrix(config: RunConfig, *, progress: Progress | None = None) -> EvaluationMatrix:
    """Play every (scheme, column) game and classify the outcomes.

    Columns that share a scenario builder are scored on the same worlds, which
    gives the same numbers as running them one at a time.
    """
    cols = tuple(Column.parse(k) for k in config.columns)
    by_cell = {(c.attack, c.medium): c for c in cols}
    cells: dict[str, dict[str, ResistanceVerdict]] = {}
    for scheme in config.schemes:
        row: dict[str, ResistanceVerdict] = {}
        for group in builder_groups(list(by_cell)):
            if progress is not None:
                progress(scheme, group)
            try:
                outcomes = run_cells(config.game_config(scheme), group)
            except (GameError, SchemeError) as exc:
                gc = config.game_config(scheme)
                outcomes = {c: AttackOutcome.not_applicable_for(
                    replace(gc, attack=c[0], medium=c[1]), f"game error: {exc}") for c in group}
            for cell, outcome in outcomes.items():
                row[by_cell[cell].key] = classify(outcome, min_trials=config.min_trials)
        cells[scheme] = {c.key: row[c.key] for c in cols}
    meta = {"seed": config.seed, "trials": config.trials, "config_digest": config.digest(),
            "config": {k: v for k, v in config.to_dict().items() if k not in config.OUTPUT_FIELDS}}
    return EvaluationMatrix(tuple(config.schemes), cols, cells, meta)


# -- anonymity ----------------------------------------------------------------

@dataclass(frozen=True)
class AnonymityAssessment:
    scheme: str
    address_scheme: AddressScheme
    indirect_deanon_resistant: bool
    reasons: tuple[str, ...]
    slla: Level
    level: Level

    @property
    def symbol(self) -> str:
        return self.level.symbol


_ADDRESS_REASON = {AddressScheme.ADDRESSLESS: "addressless",
                   AddressScheme.ADDRESS_ENCRYPTION: "address encryption",
                   AddressScheme.ONE_TIME_ADDRESS: "one-time address"}


def assess_anonymity(scheme: str, matrix: EvaluationMatrix) -> AnonymityAssessment:
    """Indirect de-anonymization resistance.

    Holds when any of: the ledger-only coin-to-coin game is resisted; the scheme
    is addressless; addresses are encrypted; addresses are one-time.  Without
    any of these, probabilistic coin-to-coin resistance still earns a
    probabilistic rating.
    """
    cls = get_scheme_class(scheme)
    if cls.name not in matrix.cells:
        raise KeyError(f"scheme {scheme!r} missing from matrix")
    slla = matrix.verdict(cls.name, COLUMNS[0]).level
    reasons = []
    if slla is Level.RESISTANT:
        reasons.append("SLLA-resistant")
    if cls.address_scheme in _ADDRESS_REASON:
        reasons.append(_ADDRESS_REASON[cls.address_scheme])
    if reasons:
        level = Level.RESISTANT
    elif slla is Level.PROBABILISTIC:
        level = Level.PROBABILISTIC
    else:
        level = Level.UNRESISTANT
    return AnonymityAssessment(cls.name, cls.address_scheme, bool(reasons), tuple(reasons), slla, level)


# -- expected verdicts ------------------------------------------------------------

@dataclass(frozen=True)
class Fixture:
    columns: tuple[str, ...]
    expected: dict[str, dict[str, str]]
    indirect: dict[str, str]
    static: dict[str, dict[str, Any]]
    display: dict[str, str]
    sources: dict[str, str]


def load_fixture(source: str | Mapping | None = None) -> Fixture:
    """Parse an expected-verdict document (the shipped one by default)."""
    if source is None:
        text = resources.files("anonylink").joinpath("data/expected_matrix.json").read_text("utf-8")
        doc = json.loads(text)
    elif isinstance(source, Mapping):
        doc = source
    else:
        with open(source, encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise FixtureError(f"fixture is not JSON: {exc}") from None
    try:
        cols = tuple(c["key"] for c in doc["columns"])
        sources = {c["key"]: c.get("source", "") for c in doc["columns"]}
        rows = doc["schemes"]
        expected, indirect, static, display = {}, {}, {}, {}
        for name, row in rows.items():
            try:
                canon = get_scheme_class(name).name
            except SchemeError as exc:
                raise FixtureError(f"unknown scheme row {name!r}") from exc
            cells = dict(row["expected"])
            for k, sym in cells.items():
                if k not in cols:
                    raise FixtureError(f"{name}: cell for undeclared column {k!r}")
                parse_symbol(sym)
            if "indirect_deanon" in row:
                parse_symbol(row["indirect_deanon"])
                indirect[canon] = row["indirect_deanon"]
            expected[canon] = cells
            static[canon] = dict(row.get("static", {}))
            display[canon] = row.get("display", get_scheme_class(canon).display_name)
    except (KeyError, TypeError, AttributeError) as exc:
        raise FixtureError(f"malformed fixture: {exc!r}") from None
    for k in cols:
        Column.parse(k)
    return Fixture(cols, expected, indirect, static, display, sources)


@dataclass(frozen=True)
class CellDiff:
    scheme: str
    column: str
    expected: str
    computed: str
    detail: str = ""

    def __str__(self) -> str:
        extra = f" ({self.detail})" if self.detail else ""
        return f"{self.scheme} {self.column}: expected {self.expected}, computed {self.computed}{extra}"


def verify_against_expected(matrix: EvaluationMatrix, fixture: Fixture | Mapping | str | None = None
                            ) -> list[CellDiff]:
    """Every implemented cell whose verdict class differs from the expected symbol."""
    fx = fixture if isinstance(fixture, Fixture) else load_fixture(fixture)
    diffs = []
    for scheme in matrix.rows:
        exp = fx.expected.get(scheme)
        if exp is None:
            continue
        for col in matrix.cols:
            if col.key not in exp:
                continue
            want = parse_symbol(exp[col.key])
            got = matrix.verdict(scheme, col)
            if got.level is not want:
                ev = got.evidence
                detail = "" if ev is None or not ev.applicable else (
                    f"success {ev.success_rate:.4f}, baseline {ev.baseline:.4f}")
                diffs.append(CellDiff(scheme, col.key, exp[col.key], got.symbol, detail))
        if scheme in fx.indirect and matrix.cols and COLUMNS[0] in matrix.cols:
            want = parse_symbol(fx.indirect[scheme])
            got = assess_anonymity(scheme, matrix)
            if got.level is not want:
                diffs.append(CellDiff(scheme, INDIRECT_KEY, fx.indirect[scheme], got.symbol,
                                      ", ".join(got.reasons)))
    return diffs


def matrix_from_fixture(fixture: Fixture | Mapping | str | None = None) -> EvaluationMatrix:
    """The expected verdicts as a matrix without evidence (for rendering)."""
    fx = fixture if isinstance(fixture, Fixture) else load_fixture(fixture)
    cols = tuple(Column.parse(k) for k in fx.columns)
    cells = {s: {k: ResistanceVerdict(parse_symbol(v)) for k, v in row.items()}
             for s, row in fx.expected.items()}
    return EvaluationMatrix(tuple(fx.expected), cols, cells, {"source": "expected"})


# -- rendering ----------------------------------------------------------------------

_STATIC_L1 = [("year", "Year"), ("decentralization", "Decentralization"),
              ("secret_share", "Secret-share"), ("addressless", "Addressless"),
              ("address_encryption", "Addr encrypt"), ("value_encryption", "Value encrypt"),
              ("l1_randomness", "Randomness"), ("l1_one_timeness", "One-timeness")]
_STATIC_L1_TAIL = [("l1_sender_anonymity", "Sender anon."), ("l1_recipient_anonymity", "Recip. anon.")]
_STATIC_L0 = [("l0_randomness", "Randomness"), ("l0_one_timeness", "One-timeness")]
_STATIC_L0_TAIL = [("l0_sender_anonymity", "Sender anon."), ("l0_recipient_anonymity", "Recip. anon.")]
_STATIC_L2_TAIL = [("l2_indirect_deanon", "Indirect de-anon. (L2)")]


def _cell_text(v: ResistanceVerdict) -> str:
    if v.level is Level.PROBABILISTIC and v.p_est is not None:
        return f"✓(p={v.p_est:.3f})"
    return v.symbol


def _col_label(c: Column) -> str:
    return f"{c.attack.upper()} {c.medium}"


def _md_table(header: list[str], rows: list[list[str]]) -> list[str]:
    out = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    out += ["| " + " | ".join(r) + " |" for r in rows]
    return out


def _display(scheme: str) -> str:
    try:
        return get_scheme_class(scheme).display_name
    except SchemeError:
        return scheme


def render_markdown(matrix: EvaluationMatrix, static: Mapping[str, Mapping] | None = None) -> str:
    """Two tables in the ledger-layer / transport+secret-sharing layout."""
    if static is None:
        static = load_fixture().static
    by_layer = {layer: [c for c in matrix.cols if c.layer == layer] for layer in ("L1", "L0", "L2")}
    assessments = {}
    if COLUMNS[0] in matrix.cols:
        assessments = {s: assess_anonymity(s, matrix) for s in matrix.rows}

    def stat(s, keys):
        return [str(static.get(s, {}).get(k, "")) for k, _ in keys]

    lines = ["## Ledger layer (L1)", ""]
    header = ["Scheme"] + [h for _, h in _STATIC_L1] + [_col_label(c) for c in by_layer["L1"]] \
        + [h for _, h in _STATIC_L1_TAIL] + ["Indirect de-anon."]
    rows = []
    for s in matrix.rows:
        a = assessments.get(s)
        ind = "" if a is None else "{}({})".format(a.symbol, ", ".join(
            [f"SLLA-{a.slla.value}"] + [r for r in a.reasons if not r.startswith("SLLA")]))
        rows.append([_display(s)] + stat(s, _STATIC_L1)
                    + [_cell_text(matrix.cells[s][c.key]) for c in by_layer["L1"]]
                    + stat(s, _STATIC_L1_TAIL) + [ind])
    lines += _md_table(header, rows)
    lines += ["", "## Transport layer (L0) and secret-sharing layer (L2)", ""]
    header = ["Scheme"] + [h for _, h in _STATIC_L0] + [_col_label(c) for c in by_layer["L0"]] \
        + [h for _, h in _STATIC_L0_TAIL] + [_col_label(c) for c in by_layer["L2"]] \
        + [h for _, h in _STATIC_L2_TAIL]
    rows = []
    for s in matrix.rows:
        rows.append([_display(s)] + stat(s, _STATIC_L0)
                    + [_cell_text(matrix.cells[s][c.key]) for c in by_layer["L0"]]
                    + stat(s, _STATIC_L0_TAIL)
                    + [_cell_text(matrix.cells[s][c.key]) for c in by_layer["L2"]]
                    + stat(s, _STATIC_L2_TAIL))
    lines += _md_table(header, rows)
    lines += ["", "✓✓ resistant · ✓ probabilistically resistant (measured rate) · ✗ unresistant · "
              "- not applicable"]
    meta = matrix.metadata
    if "seed" in meta:
        lines.append(f"seed {meta['seed']} · {meta['trials']} trials/cell · config "
                     f"{meta['config_digest'][:16]}")
    return "\n".join(lines) + "\n"


def render_csv(matrix: EvaluationMatrix) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scheme"] + [c.key for c in matrix.cols])
    for s in matrix.rows:
        row = matrix.cells[s]
        w.writerow([s] + [row[c.key].level.value if row[c.key].p_est is None
                          else f"{row[c.key].level.value}:{row[c.key].p_est:.6f}"
                          for c in matrix.cols])
    return buf.getvalue()


def render_json(matrix: EvaluationMatrix) -> str:
    return json.dumps(matrix.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


RENDERERS: dict[str, Callable[[EvaluationMatrix], str]] = {
    "markdown": render_markdown, "csv": render_csv, "json": render_json}


def render(matrix: EvaluationMatrix, format: str = "markdown") -> str:
    try:
        return RENDERERS[format](matrix)
    except KeyError:
        raise ValueError(f"unknown format {format!r}; choose from {', '.join(RENDERERS)}") from None


def parse_json(text: str) -> EvaluationMatrix:
    return EvaluationMatrix.from_dict(json.loads(text))


def verdict_classes(matrix: EvaluationMatrix) -> dict[tuple[str, str], Level]:
    return {(s, c.key): matrix.cells[s][c.key].level for s in matrix.rows for c in matrix.cols}


def summarize_diffs(diffs: Iterable[CellDiff]) -> str:
    diffs = list(diffs)
    if not diffs:
        return "no differences\n"
    return "".join(f"{d}\n" for d in diffs) + f"{len(diffs)} difference(s)\n"
