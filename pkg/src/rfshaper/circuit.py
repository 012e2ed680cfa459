"""Port-connected circuit graphs and their frequency-domain evaluation.

A circuit is a feed-forward network of block instances.  All resonant
feedback lives inside ring blocks, so evaluation is a single pass in
topological order: scalar blocks multiply the field, 2x2 blocks mix their
two inputs.  Graphs are immutable after construction and evaluation is
pure, so concurrent use needs no locking.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import kernels
from .blocks import (FrequencyGrid, PhaseShifterState, RingParams,
                     WaveguideParams, h_phase_shifter, h_tunable_coupler)
from .errors import ConfigurationError, TopologyError

SCALAR_KINDS = ("waveguide", "phase_shifter", "ring_allpass")
MATRIX_KINDS = ("coupler_3db", "tunable_coupler", "ring_adddrop")
KINDS = SCALAR_KINDS + MATRIX_KINDS

_PORTS = {
    "waveguide": (("in",), ("out",)),
    "phase_shifter": (("in",), ("out",)),
    "ring_allpass": (("in",), ("out",)),
    "coupler_3db": (("in0", "in1"), ("out0", "out1")),
    "tunable_coupler": (("in0", "in1"), ("out0", "out1")),
    "ring_adddrop": (("in0", "in1"), ("out0", "out1")),
}


def block_ports(kind: str) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """(input ports, output ports) of a block kind."""
    try:
        return _PORTS[kind]
    except KeyError:
        raise ConfigurationError(f"unknown block kind {kind!r}") from None


@dataclass(frozen=True)
class Port:
    block: str
    name: str

    def __str__(self) -> str:
        return f"{self.block}.{self.name}"


@dataclass(frozen=True)
class BlockInstance:
    """One placed building block with its physical parameters."""

    id: str
    kind: str
    params: object = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown block kind {self.kind!r}")
        expected = {
            "waveguide": WaveguideParams,
            "phase_shifter": PhaseShifterState,
            "ring_allpass": RingParams,
            "ring_adddrop": RingParams,
            "tunable_coupler": PhaseShifterState,
            "coupler_3db": type(None),
        }[self.kind]
        if not isinstance(self.params, expected):
            raise ConfigurationError(
                f"block {self.id!r} of kind {self.kind} needs {expected.__name__} "
                f"params, got {type(self.params).__name__}")
        if self.kind == "ring_adddrop" and self.params.kappa_drop is None:
            raise ConfigurationError(f"block {self.id!r}: ring_adddrop needs kappa_drop")

    @property
    def heater_refs(self) -> tuple[str, ...]:
        """Names of the tunable phases this block exposes.

        Ring couplers are tunable MZI couplers, so their coupling heater is
        a phase with ``kappa = sin^2(phase/2)``; the detune heater shifts
        the resonance by ``fsr * phase / (2*pi)``.
        """
        if self.kind in ("phase_shifter", "tunable_coupler"):
            return (f"{self.id}.phase",)
        if self.kind == "ring_allpass":
            return (f"{self.id}.coupling", f"{self.id}.detune")
        if self.kind == "ring_adddrop":
            return (f"{self.id}.coupling", f"{self.id}.coupling_drop",
                    f"{self.id}.detune")
        return ()

    def heater_values(self) -> dict[str, float]:
        """Current heater phases implied by the stored parameters."""
        vals: dict[str, float] = {}
        if self.kind in ("phase_shifter", "tunable_coupler"):
            vals[f"{self.id}.phase"] = self.params.phase_rad % (2 * math.pi)
        elif self.kind in ("ring_allpass", "ring_adddrop"):
            p: RingParams = self.params
            vals[f"{self.id}.coupling"] = 2.0 * math.asin(math.sqrt(p.kappa))
            vals[f"{self.id}.detune"] = (2 * math.pi * (p.detune_ghz / p.fsr_ghz)) % (2 * math.pi)
            if self.kind == "ring_adddrop":
                vals[f"{self.id}.coupling_drop"] = 2.0 * math.asin(math.sqrt(p.kappa_drop))
        return vals

    def with_heater(self, heater: str, phase: float) -> "BlockInstance":
        """Copy of this block with one heater set to the given phase."""
        phase = phase % (2 * math.pi)
        if self.kind in ("phase_shifter", "tunable_coupler") and heater == "phase":
            return dataclasses.replace(
                self, params=PhaseShifterState(phase_rad=phase))
        if self.kind in ("ring_allpass", "ring_adddrop"):
            p: RingParams = self.params
            if heater == "coupling":
                return dataclasses.replace(
                    self, params=dataclasses.replace(p, kappa=math.sin(phase / 2) ** 2))
            if heater == "coupling_drop" and self.kind == "ring_adddrop":
                return dataclasses.replace(
                    self, params=dataclasses.replace(p, kappa_drop=math.sin(phase / 2) ** 2))
            if heater == "detune":
                return dataclasses.replace(
                    self, params=dataclasses.replace(
                        p, detune_ghz=p.fsr_ghz * phase / (2 * math.pi)))
        raise ConfigurationError(f"block {self.id!r} has no heater {heater!r}")


@dataclass(frozen=True)
class CircuitResponse:
    """Per-port complex amplitudes over a frequency grid."""

    grid: FrequencyGrid
    fields: Mapping[str, np.ndarray]

    def port(self, name: str) -> np.ndarray:
        try:
            return self.fields[name]
        except KeyError:
            avail = ", ".join(sorted(self.fields))
            raise ConfigurationError(
                f"unknown output port {name!r}; available: {avail}") from None

    def power(self, name: str) -> np.ndarray:
        a = self.port(name)
        return (a * a.conj()).real


@dataclass(frozen=True)
class CircuitGraph:
    """Immutable feed-forward network of blocks.

    ``connections`` join one block output port to one block input port;
    ``inputs``/``outputs`` name the external ports.  Unconnected block
    *input* ports receive zero field (open ports); every block *output*
    port must be consumed by a connection or an external output.
    """

    blocks: tuple[BlockInstance, ...]
    connections: tuple[tuple[Port, Port], ...]
    inputs: Mapping[str, Port] = field(default_factory=dict)
    outputs: Mapping[str, Port] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        object.__setattr__(self, "connections", tuple(self.connections))
        object.__setattr__(self, "inputs", dict(self.inputs))
        object.__setattr__(self, "outputs", dict(self.outputs))
        object.__setattr__(self, "_by_id", {b.id: b for b in self.blocks})
        self._validate()
        object.__setattr__(self, "_order", self._topological_order())

    # -- validation --------------------------------------------------------

    def block(self, block_id: str) -> BlockInstance:
        try:
            return self._by_id[block_id]
        except KeyError:
            raise TopologyError(f"unknown block id {block_id!r}") from None

    def _check_port(self, port: Port, direction: str) -> None:
        blk = self.block(port.block)
        ins, outs = block_ports(blk.kind)
        names = ins if direction == "in" else outs
        if port.name not in names:
            raise TopologyError(
                f"{port} is not an {direction}put port of kind {blk.kind}")

    def _validate(self) -> None:
        if len(self._by_id) != len(self.blocks):
            seen, dupes = set(), set()
            for b in self.blocks:
                (dupes if b.id in seen else seen).add(b.id)
            raise TopologyError(f"duplicate block ids: {sorted(dupes)}")
        used_sources: set[Port] = set()
        used_sinks: set[Port] = set()
        for src, dst in self.connections:
            self._check_port(src, "out")
            self._check_port(dst, "in")
            if src in used_sources:
                raise TopologyError(f"output port {src} used in two connections")
            if dst in used_sinks:
                raise TopologyError(f"input port {dst} driven twice")
            used_sources.add(src)
            used_sinks.add(dst)
        for name, port in self.inputs.items():
            self._check_port(port, "in")
            if port in used_sinks:
                raise TopologyError(f"external input {name!r} collides with {port}")
            used_sinks.add(port)
        for name, port in self.outputs.items():
            self._check_port(port, "out")
            if port in used_sources:
                raise TopologyError(f"external output {name!r} collides with {port}")
            used_sources.add(port)
        for b in self.blocks:
            _, outs = block_ports(b.kind)
            for o in outs:
                if Port(b.id, o) not in used_sources:
                    raise TopologyError(f"dangling output port {b.id}.{o}")
        if self.inputs:
            succ: dict[str, set[str]] = {}
            for src, dst in self.connections:
                succ.setdefault(src.block, set()).add(dst.block)
            frontier = [p.block for p in self.inputs.values()]
            reached = set(frontier)
            while frontier:
                for nxt in succ.get(frontier.pop(), ()):
                    if nxt not in reached:
                        reached.add(nxt)
                        frontier.append(nxt)
            for name, port in self.outputs.items():
                if port.block not in reached:
                    raise TopologyError(
                        f"external output {name!r} unreachable from any input")

    def _topological_order(self) -> tuple[str, ...]:
        succ: dict[str, set[str]] = {b.id: set() for b in self.blocks}
        indeg: dict[str, int] = {b.id: 0 for b in self.blocks}
        for src, dst in self.connections:
            if dst.block not in succ[src.block]:
                succ[src.block].add(dst.block)
                indeg[dst.block] += 1
        ready = sorted(b for b, d in indeg.items() if d == 0)
        order: list[str] = []
        while ready:
            b = ready.pop(0)
            order.append(b)
            for nxt in sorted(succ[b]):
                indeg[nxt] -= 1
                if indeg[nxt] == 0:
                    ready.append(nxt)
            ready.sort()
        if len(order) != len(self.blocks):
            cyclic = sorted(set(indeg) - set(order))
            raise TopologyError(f"circuit contains a feedback loop through {cyclic}")
        return tuple(order)

    # -- heaters -----------------------------------------------------------

    def heater_names(self) -> tuple[str, ...]:
        names: list[str] = []
        for b in self.blocks:
            names.extend(b.heater_refs)
        return tuple(sorted(names))

    def heater_values(self) -> dict[str, float]:
        vals: dict[str, float] = {}
        for b in self.blocks:
            vals.update(b.heater_values())
        return vals

    def with_heaters(self, settings: Mapping[str, float]) -> "CircuitGraph":
        """New graph with the named heater phases applied to the params."""
        for name in settings:
            block_id, _, heater = name.partition(".")
            if not heater or block_id not in self._by_id:
                raise ConfigurationError(f"unknown heater {name!r}")
        new_blocks = []
        for b in self.blocks:
            for name, value in settings.items():
                block_id, _, heater = name.partition(".")
                if block_id == b.id:
                    b = b.with_heater(heater, value)
            new_blocks.append(b)
        return CircuitGraph(tuple(new_blocks), self.connections,
                            self.inputs, self.outputs)


def _matrix_entries(block: BlockInstance, offsets: np.ndarray):
    """(m00, m01, m10, m11) of a 2x2 block, scalars or grid arrays."""
    if block.kind == "coupler_3db":
        a = math.sqrt(0.5)
        return a, -1j * a, -1j * a, a
    if block.kind == "tunable_coupler":
        m = h_tunable_coupler(block.params.phase_rad)
        return m.m00, m.m01, m.m10, m.m11
    p: RingParams = block.params
    through_in, drop, through_add = kernels.ring_adddrop_grid(
        offsets, p.self_coupling, p.self_coupling_drop,
        p.round_trip_amplitude, p.fsr_ghz, p.detune_ghz)
    return through_in, drop, drop, through_add


def _scalar_response(block: BlockInstance, offsets: np.ndarray):
    if block.kind == "waveguide":
        p: WaveguideParams = block.params
        return kernels.waveguide_grid(offsets, p.gamma, p.fsr_equivalent_ghz)
    if block.kind == "phase_shifter":
        return h_phase_shifter(block.params.phase_rad)
    p = block.params
    return kernels.ring_allpass_grid(offsets, p.self_coupling,
                                     p.round_trip_amplitude, p.fsr_ghz,
                                     p.detune_ghz)


def evaluate(graph: CircuitGraph, grid: FrequencyGrid,
             input_name: str | None = None,
             heaters: Mapping[str, float] | None = None,
             amplitude: complex = 1.0 + 0.0j) -> CircuitResponse:
    """Propagate a unit (or ``amplitude``) field from one external input.

    Returns the complex amplitude at every external output for every grid
    offset.  ``heaters`` overrides heater phases for this evaluation only.
    """
    if not graph.inputs:
        raise TopologyError("graph declares no external inputs")
    if input_name is None:
        if len(graph.inputs) > 1:
            raise ConfigurationError(
                f"graph has several inputs {sorted(graph.inputs)}; pick one")
        input_name = next(iter(graph.inputs))
    if input_name not in graph.inputs:
        raise ConfigurationError(f"unknown input {input_name!r}")

    overrides: dict[str, list[tuple[str, float]]] = {}
    if heaters:
        for name, value in heaters.items():
            block_id, _, heater = name.partition(".")
            if not heater or block_id not in graph._by_id:
                raise ConfigurationError(f"unknown heater {name!r}")
            overrides.setdefault(block_id, []).append((heater, value))

    offsets = grid.offsets_ghz
    n = offsets.size
    fields: dict[Port, np.ndarray] = {}
    incoming: dict[Port, Port] = {dst: src for src, dst in graph.connections}

    def port_field(port: Port) -> np.ndarray:
        if port in fields:
            return fields[port]
        return np.zeros(n, dtype=np.complex128)

    entry = graph.inputs[input_name]
    fields[entry] = np.full(n, 1.0 + 0.0j)

    for block_id in graph._order:
        blk = graph.block(block_id)
        for heater, value in overrides.get(block_id, ()):
            blk = blk.with_heater(heater, value)
        ins, outs = block_ports(blk.kind)

        def in_field(port_name: str) -> np.ndarray:
            dst = Port(block_id, port_name)
            if dst in fields:          # external input lands here
                return fields[dst]
            src = incoming.get(dst)
            return port_field(src) if src is not None else np.zeros(n, dtype=np.complex128)

        if blk.kind in SCALAR_KINDS:
            resp = _scalar_response(blk, offsets)
            fields[Port(block_id, outs[0])] = resp * in_field(ins[0])
        else:
            m00, m01, m10, m11 = _matrix_entries(blk, offsets)
            a, b = in_field(ins[0]), in_field(ins[1])
            fields[Port(block_id, outs[0])] = m00 * a + m01 * b
            fields[Port(block_id, outs[1])] = m10 * a + m11 * b

    out_fields = {name: amplitude * port_field(port)
                  for name, port in graph.outputs.items()}
    return CircuitResponse(grid, out_fields)
