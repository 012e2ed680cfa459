"""Line-oriented netlist and experiment-config formats.

Netlist grammar (one statement per line, ``#`` starts a comment)::

    format 1
    param <name> <number>
    block <id> <kind> key=value ...
    connect <id>.<port> <id>.<port>
    input <name> <id>.<port>
    output <name> <id>.<port>

Parsing collects *all* errors with 1-based line/column positions instead
of failing fast.  A block whose parameters are rejected still reserves
its id and kind so later statements refer to it without cascading
errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .blocks import PhaseShifterState, RingParams, WaveguideParams
from .circuit import BlockInstance, CircuitGraph, Port, block_ports
from .errors import ShaperError

_BLOCK_KEYS = {
    "waveguide": ("optical_path_length", "loss_db_per_cm", "physical_length_cm"),
    "phase_shifter": ("phase_rad", "heater_power_mw"),
    "tunable_coupler": ("phase_rad",),
    "coupler_3db": (),
    "ring_allpass": ("kappa", "fsr_ghz", "round_trip_amplitude", "detune_ghz"),
    "ring_adddrop": ("kappa", "kappa_drop", "fsr_ghz", "round_trip_amplitude",
                     "detune_ghz"),
}
_REQUIRED_KEYS = {
    "waveguide": ("optical_path_length",),
    "phase_shifter": ("phase_rad",),
    "tunable_coupler": ("phase_rad",),
    "coupler_3db": (),
    "ring_allpass": ("kappa", "fsr_ghz"),
    "ring_adddrop": ("kappa", "kappa_drop", "fsr_ghz"),
}


@dataclass(frozen=True)
class ParseError:
    line: int
    column: int
    message: str
    token: str = ""

    def __str__(self) -> str:
        tok = f" near {self.token!r}" if self.token else ""
        return f"line {self.line}, col {self.column}: {self.message}{tok}"


@dataclass
class NetlistDocument:
    params: dict[str, float] = field(default_factory=dict)
    blocks: list[BlockInstance] = field(default_factory=list)
    connections: list[tuple[Port, Port]] = field(default_factory=list)
    inputs: dict[str, Port] = field(default_factory=dict)
    outputs: dict[str, Port] = field(default_factory=dict)

    def to_graph(self) -> CircuitGraph:
        return CircuitGraph(tuple(self.blocks), tuple(self.connections),
                            dict(self.inputs), dict(self.outputs))

    @classmethod
    def from_graph(cls, graph: CircuitGraph,
                   params: dict[str, float] | None = None) -> "NetlistDocument":
        return cls(dict(params or {}), list(graph.blocks),
                   list(graph.connections), dict(graph.inputs),
                   dict(graph.outputs))


def _tokenize(line: str) -> list[tuple[str, int]]:
    """Whitespace tokens with their 1-based column."""
    out, i = [], 0
    while i < len(line):
        if line[i].isspace():
            i += 1
            continue
        j = i
        while j < len(line) and not line[j].isspace():
            j += 1
        out.append((line[i:j], i + 1))
        i = j
    return out


def _number(tok: str) -> float:
    v = float(tok)
    if not math.isfinite(v):
        raise ValueError("non-finite number")
    return v


class _Parser:
    def __init__(self):
        self.doc = NetlistDocument()
        self.errors: list[ParseError] = []
        self.kinds: dict[str, str] = {}      # id -> kind (even if params bad)
        self.decl_lines: dict[str, int] = {}
        self.used_sources: dict[Port, int] = {}
        self.used_sinks: dict[Port, int] = {}

    def err(self, line: int, col: int, message: str, token: str = "") -> None:
        self.errors.append(ParseError(line, col, message, token))

    # -- statement handlers --------------------------------------------

    def stmt_format(self, ln, toks):
        if len(toks) != 2 or toks[1][0] != "1":
            col = toks[1][1] if len(toks) > 1 else toks[0][1]
            self.err(ln, col, "only 'format 1' is supported",
                     toks[1][0] if len(toks) > 1 else "")

    def stmt_param(self, ln, toks):
        if len(toks) != 3:
            self.err(ln, toks[0][1], "expected: param <name> <number>")
            return
        name, ncol = toks[1][0], toks[2][1]
        try:
            self.doc.params[name] = _number(toks[2][0])
        except ValueError:
            self.err(ln, ncol, "invalid number", toks[2][0])

    def _parse_port(self, ln, tok, col, direction) -> Port | None:
        if "." not in tok:
            self.err(ln, col, "expected <block>.<port>", tok)
            return None
        bid, pname = tok.split(".", 1)
        kind = self.kinds.get(bid)
        if kind is None:
            self.err(ln, col, f"unknown block id {bid!r}", tok)
            return None
        ins, outs = block_ports(kind)
        names = ins if direction == "in" else outs
        if pname not in names:
            self.err(ln, col,
                     f"kind {kind} has no {direction}put port {pname!r} "
                     f"(expected one of {', '.join(names)})", tok)
            return None
        return Port(bid, pname)

    def stmt_block(self, ln, toks):
        if len(toks) < 3:
            self.err(ln, toks[0][1], "expected: block <id> <kind> key=value ...")
            return
        (bid, bcol), (kind, kcol) = toks[1], toks[2]
        if bid in self.kinds:
            self.err(ln, bcol,
                     f"duplicate block id {bid!r} (first declared on line "
                     f"{self.decl_lines[bid]})", bid)
            return
        if kind not in _BLOCK_KEYS:
            self.err(ln, kcol, f"unknown block kind {kind!r}", kind)
            return
        self.kinds[bid] = kind
        self.decl_lines[bid] = ln
        kv: dict[str, float] = {}
        seen: set[str] = set()
        ok = True
        for tok, col in toks[3:]:
            if "=" not in tok:
                self.err(ln, col, "expected key=value", tok)
                ok = False
                continue
            key, _, val = tok.partition("=")
            if key not in _BLOCK_KEYS[kind]:
                self.err(ln, col, f"kind {kind} has no key {key!r}", tok)
                ok = False
                continue
            if key in seen:
                self.err(ln, col, f"key {key!r} given twice", tok)
                ok = False
                continue
            seen.add(key)
            try:
                kv[key] = _number(val)
            except ValueError:
                self.err(ln, col, f"invalid number for {key!r}", val)
                ok = False
        for key in _REQUIRED_KEYS[kind]:
            if key not in seen:
                self.err(ln, kcol, f"kind {kind} requires key {key!r}", kind)
                ok = False
        if not ok:
            return
        try:
            block = BlockInstance(bid, kind, _make_params(kind, kv))
        except (ShaperError, ValueError) as exc:
            self.err(ln, kcol, str(exc), kind)
            return
        self.doc.blocks.append(block)

    def stmt_connect(self, ln, toks):
        if len(toks) != 3:
            self.err(ln, toks[0][1], "expected: connect <id>.<port> <id>.<port>")
            return
        src = self._parse_port(ln, toks[1][0], toks[1][1], "out")
        dst = self._parse_port(ln, toks[2][0], toks[2][1], "in")
        if src is None or dst is None:
            return
        if src in self.used_sources:
            self.err(ln, toks[1][1],
                     f"output {src} already used on line {self.used_sources[src]}")
            return
        if dst in self.used_sinks:
            self.err(ln, toks[2][1],
                     f"input {dst} already driven on line {self.used_sinks[dst]}")
            return
        self.used_sources[src] = ln
        self.used_sinks[dst] = ln
        self.doc.connections.append((src, dst))

    def stmt_io(self, ln, toks, direction):
        kw = toks[0][0]
        if len(toks) != 3:
            self.err(ln, toks[0][1], f"expected: {kw} <name> <id>.<port>")
            return
        name = toks[1][0]
        table = self.doc.inputs if direction == "in" else self.doc.outputs
        if name in table:
            self.err(ln, toks[1][1], f"duplicate {kw} name {name!r}", name)
            return
        port = self._parse_port(ln, toks[2][0], toks[2][1], direction)
        if port is None:
            return
        used = self.used_sinks if direction == "in" else self.used_sources
        if port in used:
            self.err(ln, toks[2][1], f"port {port} already used on line {used[port]}")
            return
        used[port] = ln
        table[name] = port


def _make_params(kind: str, kv: dict[str, float]):
    if kind == "waveguide":
        return WaveguideParams(kv["optical_path_length"],
                               kv.get("loss_db_per_cm", 0.0),
                               kv.get("physical_length_cm", 0.0))
    if kind in ("phase_shifter", "tunable_coupler"):
        return PhaseShifterState(kv["phase_rad"], kv.get("heater_power_mw"))
    if kind == "coupler_3db":
        return None
    return RingParams(kv["fsr_ghz"], kv["kappa"], kv.get("kappa_drop"),
                      kv.get("round_trip_amplitude", 1.0),
                      kv.get("detune_ghz", 0.0))


def parse_netlist(text: str) -> tuple[NetlistDocument, list[ParseError]]:
    """Parse netlist text; returns the document and all positioned errors."""
    p = _Parser()
    for ln, raw in enumerate(text.splitlines(), start=1):
        hash_pos = raw.find("#")
        line = raw if hash_pos < 0 else raw[:hash_pos]
        toks = _tokenize(line)
        if not toks:
            continue
        kw = toks[0][0]
        if kw == "format":
            p.stmt_format(ln, toks)
        elif kw == "param":
            p.stmt_param(ln, toks)
        elif kw == "block":
            p.stmt_block(ln, toks)
        elif kw == "connect":
            p.stmt_connect(ln, toks)
        elif kw == "input":
            p.stmt_io(ln, toks, "in")
        elif kw == "output":
            p.stmt_io(ln, toks, "out")
        else:
            p.err(ln, toks[0][1], f"unknown statement {kw!r}", kw)
    return p.doc, p.errors


def _format_value(v: float) -> str:
    return repr(float(v))


def _block_line(block: BlockInstance) -> str:
    parts = [f"block {block.id} {block.kind}"]
    p = block.params
    if block.kind == "waveguide":
        parts.append(f"optical_path_length={_format_value(p.optical_path_length)}")
        parts.append(f"loss_db_per_cm={_format_value(p.loss_db_per_cm)}")
        parts.append(f"physical_length_cm={_format_value(p.physical_length_cm)}")
    elif block.kind in ("phase_shifter", "tunable_coupler"):
        parts.append(f"phase_rad={_format_value(p.phase_rad)}")
        if p.heater_power_mw is not None:
            parts.append(f"heater_power_mw={_format_value(p.heater_power_mw)}")
    elif block.kind in ("ring_allpass", "ring_adddrop"):
        parts.append(f"kappa={_format_value(p.kappa)}")
        if block.kind == "ring_adddrop":
            parts.append(f"kappa_drop={_format_value(p.kappa_drop)}")
        parts.append(f"fsr_ghz={_format_value(p.fsr_ghz)}")
        parts.append(f"round_trip_amplitude={_format_value(p.round_trip_amplitude)}")
        parts.append(f"detune_ghz={_format_value(p.detune_ghz)}")
    return " ".join(parts)


def document_to_text(doc: NetlistDocument) -> str:
    """Deterministic netlist text for a document (LF line endings)."""
    lines = ["format 1"]
    for name in sorted(doc.params):
        lines.append(f"param {name} {_format_value(doc.params[name])}")
    for block in doc.blocks:
        lines.append(_block_line(block))
    for src, dst in doc.connections:
        lines.append(f"connect {src} {dst}")
    for name, port in doc.inputs.items():
        lines.append(f"input {name} {port}")
    for name, port in doc.outputs.items():
        lines.append(f"output {name} {port}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# experiment configuration
# ---------------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    """Settings resolved from an experiment config file."""

    experiment: str
    sweep: tuple[float, float, float] | None = None
    heaters: dict[str, float] = field(default_factory=dict)
    options: dict[str, object] = field(default_factory=dict)
    seed: int = 0
    outdir: str | None = None

    def overrides(self) -> dict[str, object]:
        out: dict[str, object] = dict(self.options)
        if self.sweep is not None:
            out["sweep"] = self.sweep
        if self.heaters:
            out["heaters"] = dict(self.heaters)
        return out


def load_experiment_config(text: str) -> tuple[ExperimentConfig | None,
                                               list[ParseError]]:
    """Parse an experiment config; same line discipline as netlists.

    Statements: ``experiment <name>``, ``sweep <lo> <hi> <step>``,
    ``heater <name> <value>``, ``seed <int>``, ``outdir <path>``,
    ``set <key> <value>`` for preset options (comma lists allowed).
    """
    errors: list[ParseError] = []
    name: str | None = None
    cfg = ExperimentConfig("")
    for ln, raw in enumerate(text.splitlines(), start=1):
        hash_pos = raw.find("#")
        line = raw if hash_pos < 0 else raw[:hash_pos]
        toks = _tokenize(line)
        if not toks:
            continue
        kw, col = toks[0]
        if kw == "experiment":
            if len(toks) != 2:
                errors.append(ParseError(ln, col, "expected: experiment <name>"))
            elif name is not None:
                errors.append(ParseError(ln, toks[1][1],
                                         "experiment given twice", toks[1][0]))
            else:
                name = toks[1][0]
        elif kw == "sweep":
            if len(toks) != 4:
                errors.append(ParseError(ln, col, "expected: sweep <lo> <hi> <step>"))
                continue
            try:
                cfg.sweep = tuple(_number(t) for t, _ in toks[1:4])
            except ValueError:
                errors.append(ParseError(ln, col, "invalid sweep numbers"))
        elif kw == "heater":
            if len(toks) != 3:
                errors.append(ParseError(ln, col, "expected: heater <name> <value>"))
                continue
            try:
                cfg.heaters[toks[1][0]] = _number(toks[2][0])
            except ValueError:
                errors.append(ParseError(ln, toks[2][1], "invalid number",
                                         toks[2][0]))
        elif kw == "seed":
            try:
                cfg.seed = int(toks[1][0]) if len(toks) == 2 else 0
                if len(toks) != 2:
                    raise ValueError
            except ValueError:
                errors.append(ParseError(ln, col, "expected: seed <integer>"))
        elif kw == "outdir":
            if len(toks) != 2:
                errors.append(ParseError(ln, col, "expected: outdir <path>"))
            else:
                cfg.outdir = toks[1][0]
        elif kw == "set":
            if len(toks) != 3:
                errors.append(ParseError(ln, col, "expected: set <key> <value>"))
                continue
            key, val = toks[1][0], toks[2][0]
            try:
                if "," in val:
                    cfg.options[key] = tuple(_number(x) for x in val.split(","))
                else:
                    cfg.options[key] = _number(val)
            except ValueError:
                errors.append(ParseError(ln, toks[2][1], "invalid number", val))
        else:
            errors.append(ParseError(ln, col, f"unknown statement {kw!r}", kw))
    if name is None:
        errors.append(ParseError(1, 1, "missing required 'experiment' statement"))
        return None, errors
    cfg.experiment = name
    return (cfg if not errors else None), errors
