"""Plain-text series files.

Format: a header ``dim=<d> denom=<1|2>``, then one line per coefficient
``h1 ... hd  re11 im11 re12 im12 re21 im21 re22 im22`` with 17 significant
digits, which makes the round trip exact. Blank lines and '#' comments are
ignored on reading.
"""
from __future__ import annotations

import numpy as np

from .fourier import MatrixSeries


def _fmt(x):
    return f"{x:.17g}"


def format_series(F):
    lines = [f"dim={F.d} denom={F.denom}"]
    for h, c in zip(F.idx, F.coef):
        ints = " ".join(str(int(x)) for x in h)
        vals = " ".join(f"{_fmt(z.real)} {_fmt(z.imag)}" for z in c.reshape(4))
        lines.append(f"{ints}  {vals}")
    return "\n".join(lines) + "\n"


def parse_series(text, source="<string>"):
    header = None
    idx, coef = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if header is None:
            try:
                fields = dict(part.split("=", 1) for part in line.split())
                header = int(fields["dim"]), int(fields["denom"])
            except (ValueError, KeyError) as exc:
                raise ValueError(f"{source}:{lineno}: expected 'dim=<d> denom=<1|2>' header") from exc
            if header[0] < 1 or header[1] not in (1, 2):
                raise ValueError(f"{source}:{lineno}: bad header values {header}")
            continue
        d = header[0]
        parts = line.split()
        if len(parts) != d + 8:
            raise ValueError(f"{source}:{lineno}: expected {d} indices and 8 numbers")
        try:
            h = [int(p) for p in parts[:d]]
            v = [float(p) for p in parts[d:]]
        except ValueError as exc:
            raise ValueError(f"{source}:{lineno}: {exc}") from exc
        idx.append(h)
        coef.append(np.array(v[0::2]) + 1j * np.array(v[1::2]))
    if header is None:
        raise ValueError(f"{source}: empty series file")
    d, denom = header
    if not idx:
        return MatrixSeries.zero(d, denom)
    return MatrixSeries.build(d, denom, np.array(idx), np.array(coef).reshape(-1, 2, 2))


def write_series(path, F):
    with open(path, "w") as fh:
        fh.write(format_series(F))


def read_series(path):
    with open(path) as fh:
        return parse_series(fh.read(), str(path))
