"""Analytical tables: addition counts, LL memory, cycle latency and speed gain."""

from __future__ import annotations

import csv
import io
from dataclasses import replace

from . import hw

LATENCY_COLUMNS = ("name", "N", "M", "L", "P", "q", "gamma", "T_S", "T_N", "T_B",
                   "cycles", "speed_gain")


def baseline_row(N: int = 1024, L: int = 4, P: int = 64) -> hw.TableRow:
    """Bit-decision list decoder with pre-computation (M = 1)."""
    h = hw.HwParams(N=N, M=1, L=L, P=P)
    return hw.TableRow("SCL", h, hw.latency(h).total)


def latency_rows(rows=None, **overrides) -> list[dict]:
    """Evaluate latency rows; ``overrides`` (N, L, P, ...) replace preset fields."""
    rows = list(hw.TABLE_II if rows is None else rows)
    base = rows[0].params if rows else hw.HwParams(1024, 1, 4, 64)
    keep = {k: v for k, v in overrides.items() if v is not None}
    table = [baseline_row(keep.get("N", base.N), keep.get("L", base.L), keep.get("P", base.P))]
    table += rows
    out = []
    for row in table:
        h = replace(row.params, **keep) if keep else row.params
        rep = hw.latency(h)
        out.append({
            "name": row.name, "N": h.N, "M": h.M, "L": h.L, "P": h.P,
            "q": "-" if h.q is None else h.q, "gamma": str(h.gamma_exact.limit_denominator(10 ** 6)),
            "T_S": rep.T_S, "T_N": rep.T_N, "T_B": str(rep.T_B), "cycles": rep.total,
            "speed_gain": f"{float(hw.speed_gain(h)):.4f}",
        })
    return out


def addition_rows(Ms=(2, 4, 8)) -> list[dict]:
    return [{"M": M, "recursive": hw.addition_count(M, hw.RECURSIVE),
             "direct": hw.addition_count(M, hw.DIRECT)} for M in Ms]


def memory_rows(N: int = 1024, L: int = 4, Q_ch: int = 4) -> list[dict]:
    return [{"N": N, "L": L, "Q_ch": Q_ch, "ll_bits": hw.mem_bits_ll(N, L, Q_ch),
             "pcms_bits": hw.mem_bits_pcms(N, L, Q_ch), "saving": hw.pcms_saving(N, L, Q_ch)}]


def _csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _text(title: str, rows: list[dict]) -> str:
    cols = list(rows[0])
    width = {c: max(len(c), *(len(str(r[c])) for r in rows)) for c in cols}
    lines = [f"[{title}]", "  ".join(c.rjust(width[c]) for c in cols)]
    lines += ["  ".join(str(r[c]).rjust(width[c]) for c in cols) for r in rows]
    return "\n".join(lines) + "\n"


def run_report(fmt: str = "text", N=None, L=None, P=None, Q_ch: int = 4) -> str:
    """Render the addition, memory and latency tables as aligned text or CSV."""
    sections = [
        ("additions", addition_rows()),
        ("memory", memory_rows(N or 1024, L or 4, Q_ch)),
        ("latency", latency_rows(N=N, L=L, P=P)),
    ]
    if fmt == "csv":
        return "\n".join(f"# {t}\n{_csv(r)}" for t, r in sections)
    if fmt == "text":
        return "\n".join(_text(t, r) for t, r in sections)
    raise ValueError(f"unknown format {fmt!r}")
