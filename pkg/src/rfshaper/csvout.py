"""Deterministic CSV emission for swept responses.

Numbers are written as nine significant digits in plain positional
notation with trailing zeros kept, so equal inputs always produce
byte-identical files (LF line endings).
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .circuit import CircuitResponse
from .rflink import RfResponse

RF_HEADER = "freq_ghz,mag_db,phase_rad"
OPTICAL_HEADER = "offset_ghz,re,im"


def format_number(x: float) -> str:
    """Nine-significant-digit positional decimal, trailing zeros kept."""
    x = float(x)
    if x == 0.0:               # normalise -0.0 for byte determinism
        return "0.00000000"
    return np.format_float_positional(x, precision=9, unique=False,
                                      fractional=False, trim="k")


def _write_lines(dest, lines: Iterable[str]) -> None:
    path = Path(dest)
    try:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            for line in lines:
                fh.write(line)
                fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def write_rf_csv(response: RfResponse, dest) -> Path:
    """RF trace as ``freq_ghz,mag_db,phase_rad`` rows."""
    rows = (",".join((format_number(f), format_number(m), format_number(p)))
            for f, m, p in zip(response.rf_freqs_ghz, response.mag_db,
                               response.phase_rad))
    _write_lines(dest, [RF_HEADER, *rows])
    return Path(dest)


def with_port_suffix(dest, port: str) -> Path:
    path = Path(dest)
    return path.with_name(f"{path.stem}_{port}{path.suffix or '.csv'}")


def write_optical_csv(response: CircuitResponse, dest,
                      port: str | None = None) -> list[Path]:
    """Optical response as ``offset_ghz,re,im``; one file per output port.

    With a single port (or an explicit ``port``), writes exactly ``dest``;
    otherwise the port name is appended to the file stem.
    """
    ports = [port] if port is not None else sorted(response.fields)
    paths = []
    for name in ports:
        amps = response.port(name)
        target = Path(dest) if len(ports) == 1 else with_port_suffix(dest, name)
        rows = (",".join((format_number(f), format_number(a.real),
                          format_number(a.imag)))
                for f, a in zip(response.grid.offsets_ghz, amps))
        _write_lines(target, [OPTICAL_HEADER, *rows])
        paths.append(target)
    return paths


def write_csv(response, dest) -> list[Path]:
    """Write a swept response to CSV; dispatches on the response type.

    RF traces produce one ``freq_ghz,mag_db,phase_rad`` file; optical
    responses produce one ``offset_ghz,re,im`` file per output port.
    """
    if isinstance(response, RfResponse):
        return [write_rf_csv(response, dest)]
    if isinstance(response, CircuitResponse):
        return write_optical_csv(response, dest)
    raise TypeError(f"cannot serialise {type(response).__name__} to CSV")


def write_table_csv(headers: Sequence[str], rows: Iterable[Sequence[float]],
                    dest) -> Path:
    """Generic numeric table with the same formatting rules."""
    lines = [",".join(headers)]
    for row in rows:
        lines.append(",".join(format_number(v) for v in row))
    _write_lines(dest, lines)
    return Path(dest)


def format_summary_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format_number(float(v))
    return str(v)


def write_summary(summary: dict, dest) -> Path:
    """Flat ``key value`` lines, one per summary entry."""
    lines = [f"{k} {format_summary_value(v)}" for k, v in summary.items()]
    _write_lines(dest, lines)
    return Path(dest)


def read_rf_csv(path) -> RfResponse:
    """Parse a file written by :func:`write_rf_csv` (round-trip helper)."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != RF_HEADER:
            raise ValueError(f"{path}: unexpected header {header!r}")
        data = [line.strip().split(",") for line in fh if line.strip()]
    cols = np.array(data, dtype=float)
    if cols.size == 0:
        cols = np.empty((0, 3))
    return RfResponse(cols[:, 0], cols[:, 1], cols[:, 2])
