"""Rendering reports as sorted-key JSON or as plain tables."""

from __future__ import annotations

import json

from .commands import Report


def emit_report(report: Report | dict, fmt: str = "json", timing: bool = False) -> str:
    data = report.to_dict(timing) if isinstance(report, Report) else report
    if fmt == "json":
        return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if fmt == "human":
        return _human(data)
    raise ValueError(f"unknown format {fmt!r}")


def _table(header, rows) -> list:
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    fmt = "  ".join("{:<%d}" % w for w in widths)
    return [fmt.format(*header).rstrip()] + [fmt.format(*map(str, r)).rstrip() for r in rows]


def _coh_rows(*tables) -> list:
    degs = sorted({int(k) for t in tables for k in t})
    return [[k] + [t.get(str(k), {}).get("gens", 0) for t in tables] for k in degs]


def _human(d: dict) -> str:
    out = [f"command: {d['command']}", f"status:  {d['status']} (exit {d['exit_code']})"]
    if "error" in d:
        where = f" (line {d['line']}, column {d['column']})" if d.get("line") is not None else ""
        out.append(f"error:   {d['error']}{where}")
    if "result" in d and isinstance(d["result"], bool):
        out.append(f"result:  {str(d['result']).lower()}")
    if "per_point" in d:
        rows = [[x, v["bound"], "yes" if v["ok"] else "no",
                 " ".join(f"{k}:{r}" for k, r in v["degrees"].items()) or "-"]
                for x, v in d["per_point"].items()]
        out += _table(["point", "bound", "ok", "offending degrees"], rows)
    if "L" in d and "M" in d:
        out.append("cohomology generators of the truncations:")
        out += _table(["degree", "L", "M"], _coh_rows(d["L"]["cohomology"], d["M"]["cohomology"]))
        out.append("recursion: " + " -> ".join(f"{t.get('point', '-')}[{t.get('step', '')}]" for t in d["trace"]))
    if isinstance(d.get("result"), dict) and "cohomology" in d["result"]:
        out.append("cohomology generators:")
        out += _table(["degree", "H"], _coh_rows(d["result"]["cohomology"]))
    if "no_sub" in d:
        out.append(f"no subobjects on boundary: {str(d['no_sub']).lower()}")
        out.append(f"no quotients on boundary:  {str(d['no_quot']).lower()}")
    if "degrees" in d and d.get("advisory"):
        rows = [[k, " ".join(map(lambda x: "inf" if x is None else str(x), v["lengths"])),
                 "yes" if v["stabilized"] else "no"] for k, v in sorted(d["degrees"].items(), key=lambda kv: int(kv[0]))]
        out += _table(["degree", "lengths t=1..", "stabilized"], rows)
    if "ring" in d:
        r = d["ring"]
        out.append(f"ring: F_{r['char']}[{', '.join(r['vars'])}]/({', '.join(r['quotient'])})"
                   + (f", dimension {r['dimension']}" if r.get("cohen_macaulay") else ", not Cohen-Macaulay"))
        out += _table(["point", "dim", "ideal"], [[n, v["dim"], "(" + ", ".join(v["ideal"]) + ")"]
                                                   for n, v in d["points"].items()])
        for n, v in d["perversities"].items():
            flags = [f for f in ("monotone", "comonotone", "strictly_monotone", "strictly_comonotone") if v[f]]
            out.append(f"perversity {n}: {v['values']} [{', '.join(flags) or 'no flags'}]")
        for n, v in d["complexes"].items():
            out.append(f"complex {n}: ranks {v['ranks']} cohomology in {sorted(map(int, v['cohomology']))}"
                       + ("" if v["support_covered"] else " (support not covered)"))
    if d.get("certificates"):
        out.append("checked: " + "; ".join(d["certificates"]))
    if "seconds" in d:
        out.append(f"time: {d['seconds']}s")
    return "\n".join(out) + "\n"
