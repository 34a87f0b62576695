"""Command lines and their dispatch onto the compute modules."""

from __future__ import annotations

import shlex
import time
from dataclasses import dataclass, field

from ..complexes import Complex, cohomology_module, quasi_iso_check, shift
from ..duality import biduality_data, canonical_module
from ..engine import (
    aux_perversity,
    ic_extend,
    minimality_check,
    orthogonality_check,
    perverse_cohomology,
    perverse_truncate,
)
from ..errors import (
    CertificateFailure,
    NotCohenMacaulay,
    PervcohError,
    PerversityError,
    SpaceError,
    UndeclaredGenericPoint,
    UnsupportedSupport,
    WindowError,
)
from ..resolutions import gamma_sections_oracle, vector_space_dimension
from ..space import check_support, member_gt, membership_details
from .session import InputError, SessionDocument, complex_to_dict

EXIT_OK, EXIT_FALSE, EXIT_INPUT, EXIT_UNSUPPORTED = 0, 1, 2, 3

# positional parameters of each command; options are given as --name value
_SIGNATURES = {
    "validate": ([], []),
    "member": (["F", "perversity", "side"], ["assert"]),
    "truncate": (["F", "perversity"], ["shortcuts"]),
    "pcoh": (["F", "perversity", "k"], []),
    "dual": (["F"], []),
    "ic": (["F", "perversity"], ["boundary"]),
    "minimal": (["F", "perversity"], ["boundary", "assert"]),
    "ortho": (["F", "G", "perversity"], ["assert", "pre"]),
    "gamma": (["F"], ["ideal", "cutoff", "lo", "hi"]),
}
_REQUIRED_OPTS = {"ic": ["boundary"], "minimal": ["boundary"], "gamma": ["ideal", "cutoff"]}


@dataclass
class Command:
    name: str
    args: dict
    text: str


@dataclass
class Report:
    command: str
    status: str
    exit_code: int
    payload: dict = field(default_factory=dict)
    certificates: list = field(default_factory=list)
    error: str | None = None
    seconds: float | None = None

    def to_dict(self, timing: bool = False) -> dict:
        out = {"command": self.command, "status": self.status, "exit_code": self.exit_code,
               "certificates": self.certificates}
        out.update(self.payload)
        if self.error is not None:
            out["error"] = self.error
        if timing and self.seconds is not None:
            out["seconds"] = round(self.seconds, 3)
        return out


def _bool(text: str) -> bool:
    t = text.lower()
    if t in ("true", "yes", "1"):
        return True
    if t in ("false", "no", "0"):
        return False
    raise InputError(f"expected true or false, got {text!r}")


def _int(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise InputError(f"{what} must be an integer, got {text!r}") from None


def parse_command(line: str, session: SessionDocument) -> Command:
    """Parse one command line and resolve every name it mentions."""
    try:
        toks = shlex.split(line)
    except ValueError as e:
        raise InputError(f"cannot split command line: {e}") from None
    if not toks:
        raise InputError("empty command")
    name = toks[0]
    if name not in _SIGNATURES:
        raise InputError(f"unknown command {name!r}; expected one of {', '.join(_SIGNATURES)}")
    pos_names, opt_names = _SIGNATURES[name]
    args, positional = {}, []
    i = 1
    while i < len(toks):
        t = toks[i]
        if t.startswith("--"):
            key = t[2:]
            if "=" in key:
                key, val = key.split("=", 1)
            else:
                if i + 1 >= len(toks):
                    raise InputError(f"option --{key} needs a value")
                i += 1
                val = toks[i]
            if key not in opt_names:
                raise InputError(f"{name}: unknown option --{key}")
            args[key] = val
        elif "=" in t and t.split("=", 1)[0] in pos_names + opt_names:
            key, val = t.split("=", 1)
            args[key] = val
        else:
            positional.append(t)
        i += 1
    free = [p for p in pos_names if p not in args]
    if len(positional) > len(free):
        raise InputError(f"{name}: too many arguments")
    args.update(zip(free, positional))
    missing = [p for p in pos_names + _REQUIRED_OPTS.get(name, []) if p not in args]
    if missing:
        raise InputError(f"{name}: missing {', '.join(missing)}")
    _resolve_names(name, args, session)
    return Command(name, args, " ".join(shlex.quote(t) for t in toks))


def _resolve_names(name: str, args: dict, session: SessionDocument):
    for key in ("F", "G"):
        if key in args and args[key] not in session.complexes:
            raise InputError(f"{name}: unknown complex {args[key]!r}")
    if "perversity" in args and args["perversity"] not in session.perversities:
        raise InputError(f"{name}: unknown perversity {args['perversity']!r}")
    if "side" in args:
        side = args["side"].lower()
        if side not in ("leq", "geq", "gt"):
            raise InputError(f"{name}: side must be leq, geq or gt, got {args['side']!r}")
        args["side"] = side
    if "boundary" in args:
        pts = [p for p in args["boundary"].split(",") if p]
        for p in pts:
            if p not in session.space.names:
                raise InputError(f"{name}: undeclared point {p!r}")
        args["boundary"] = pts
    if "ideal" in args and args["ideal"] not in session.space.names:
        raise InputError(f"{name}: undeclared point {args['ideal']!r}")
    for key in ("assert", "shortcuts", "pre"):
        if key in args:
            args[key] = _bool(args[key])
    if "k" in args:
        args["k"] = _int(args["k"], "k")
    if "cutoff" in args:
        args["cutoff"] = _int(args["cutoff"], "cutoff")
        if args["cutoff"] < 2 or args["cutoff"] > 50:
            raise InputError("gamma: cutoff must lie in [2, 50]")
    for key in ("lo", "hi"):
        if key in args:
            args[key] = _int(args[key], key)


# --------------------------------------------------------------------------
# payload helpers


def cohomology_table(C: Complex) -> dict:
    """``{degree: {"gens", "rels", "length"}}`` for the nonzero cohomology of ``C``."""
    out = {}
    for k in C.terms:
        H = cohomology_module(C, k)
        if H.is_zero():
            continue
        out[str(k)] = {"gens": H.ngens, "rels": len(H.rels), "length": vector_space_dimension(H)}
    return out


def _complex_payload(C: Complex) -> dict:
    return {"terms": complex_to_dict(C), "cohomology": cohomology_table(C)}


def _details(d: dict) -> dict:
    return {x: {"bound": v["bound"], "ok": v["ok"],
                "degrees": {str(k): r for k, r in sorted(v["degrees"].items())}}
            for x, v in d.items()}


def _trace(trace) -> list:
    keep = ("depth", "point", "step", "support", "support_points")
    return [{k: t[k] for k in keep if k in t} for t in trace]


# --------------------------------------------------------------------------
# commands


def _validate(s: SessionDocument, a) -> tuple:
    ring = s.ring
    try:
        dd = canonical_module(ring)
        cm = {"cohen_macaulay": True, "dimension": dd.d, "gorenstein": dd.gorenstein}
    except NotCohenMacaulay as e:
        cm = {"cohen_macaulay": False, "ext_degrees": e.degrees}
    pts = {x.name: {"dim": x.dim, "ideal": [str(g) for g in x.gens],
                    "closure": sorted(s.space.below[x.name])} for x in s.space.points}
    pervs = {n: {"values": P.values, "dual": P.dual_values, **P.flags()} for n, P in s.perversities.items()}
    cx = {}
    for n, C in s.complexes.items():
        entry = {"ranks": {str(k): r for k, r in C.ranks().items()}, "cohomology": cohomology_table(C)}
        try:
            check_support(C, s.space)
            entry["support_covered"] = True
        except UndeclaredGenericPoint as e:
            entry["support_covered"] = False
            entry["witness"] = str(e.witness) if e.witness is not None else None
        cx[n] = entry
    payload = {"ring": {"char": ring.char, "vars": list(ring.ambient.variables),
                        "quotient": [str(f) for f in ring.ideal], **cm},
               "points": pts, "perversities": pervs, "complexes": cx}
    return payload, ["d∘d = 0 for every complex", "specialization order by ideal containment"], None


def _dd(s):
    return canonical_module(s.ring)


def _member(s, a):
    F, P = s.complexes[a["F"]], s.perversities[a["perversity"]]
    dd = _dd(s)
    if a["side"] == "gt":
        res = member_gt(F, P, dd)
        det = membership_details(shift(F, 1), P, "geq", dd)
    else:
        det = membership_details(F, P, a["side"], dd)
        res = all(v["ok"] for v in det.values())
    certs = [f"{'stalk' if a['side'] == 'leq' else 'costalk'} bound at {x}" for x in det]
    return {"result": res, "per_point": _details(det)}, certs, res


def _truncate(s, a):
    F, P = s.complexes[a["F"]], s.perversities[a["perversity"]]
    res = perverse_truncate(F, P, s.space, _dd(s), shortcuts=a.get("shortcuts", True))
    certs = sorted(k for k, v in res.certificates.items() if v)
    payload = {"L": _complex_payload(res.L), "M": _complex_payload(res.M), "trace": _trace(res.trace)}
    return payload, certs, None


def _pcoh(s, a):
    F, P = s.complexes[a["F"]], s.perversities[a["perversity"]]
    H = perverse_cohomology(F, P, a["k"], _dd(s))
    return {"result": _complex_payload(H)}, ["member_leq", "member_geq"], None


def _dual(s, a):
    F = s.complexes[a["F"]]
    dd = _dd(s)
    B = biduality_data(F, dd)
    ok = B.witness.check() and quasi_iso_check(B.witness) and quasi_iso_check(B.to_F)
    if not ok:
        raise CertificateFailure("biduality witness is not a quasi-isomorphism")
    return {"result": _complex_payload(B.first.E)}, ["biduality_qiso"], None


def _ic(s, a):
    F, P = s.complexes[a["F"]], s.perversities[a["perversity"]]
    dd = _dd(s)
    out = ic_extend(F, P, a["boundary"], s.space, dd)
    pm, pp = aux_perversity(P, a["boundary"])
    payload = {"result": _complex_payload(out),
               "p_minus": pm.values, "p_plus": pp.values}
    return payload, ["member_leq(p-)", "member_geq(p+)"], None


def _minimal(s, a):
    F, P = s.complexes[a["F"]], s.perversities[a["perversity"]]
    no_sub, no_quot = minimality_check(F, P, a["boundary"], s.space, _dd(s))
    res = no_sub and no_quot
    return ({"no_sub": no_sub, "no_quot": no_quot, "result": res},
            ["heart membership", "stalk bound p-1 on boundary", "costalk bound p+1 on boundary"], res)


def _ortho(s, a):
    F, G, P = s.complexes[a["F"]], s.complexes[a["G"]], s.perversities[a["perversity"]]
    pre = a.get("pre", True)
    res = orthogonality_check(F, G, P, _dd(s), check_pre=pre)
    certs = (["member_leq(F)", "member_gt(G)"] if pre else []) + ["H^0 RHom(F, G)"]
    return {"result": res}, certs, res


def _gamma(s, a):
    C = s.complexes[a["F"]]
    x = s.space.point(a["ideal"])
    d = _dd(s).d
    lo = a.get("lo", C.lo if C.lo is not None else 0)
    hi = a.get("hi", (C.hi if C.hi is not None else 0) + d)
    if hi < lo or hi - lo > 20:
        raise InputError("gamma: need lo <= hi within 20 degrees")
    rows = gamma_sections_oracle(C, x.gens, lo, hi, a["cutoff"])
    table = {str(r.degree): {"lengths": r.lengths, "stabilized": r.stabilized, "stable_from": r.stable_from}
             for r in rows}
    return {"advisory": True, "degrees": table}, ["oracle only: stabilization is heuristic"], None


_RUNNERS = {"validate": _validate, "member": _member, "truncate": _truncate, "pcoh": _pcoh,
            "dual": _dual, "ic": _ic, "minimal": _minimal, "ortho": _ortho, "gamma": _gamma}


def run_command(session: SessionDocument, command) -> Report:
    """Run one command; errors become reports with the exit code of the contract."""
    t0 = time.perf_counter()
    text = command if isinstance(command, str) else command.text
    try:
        if isinstance(command, str):
            command = parse_command(command, session)
        payload, certs, claim = _RUNNERS[command.name](session, command.args)
    except InputError as e:
        return Report(text, "input-error", EXIT_INPUT, error=e.message, seconds=time.perf_counter() - t0)
    except (NotCohenMacaulay, UndeclaredGenericPoint, UnsupportedSupport) as e:
        payload = {"error_type": type(e).__name__}
        if isinstance(e, UndeclaredGenericPoint):
            payload["witness"] = str(e.witness) if e.witness is not None else None
            payload["minimal_points"] = e.minimal_points
        return Report(text, "unsupported", EXIT_UNSUPPORTED, payload, error=str(e),
                      seconds=time.perf_counter() - t0)
    except (PerversityError, SpaceError, WindowError) as e:
        return Report(text, "input-error", EXIT_INPUT, {"error_type": type(e).__name__}, error=str(e),
                      seconds=time.perf_counter() - t0)
    except CertificateFailure as e:
        payload = {"error_type": "CertificateFailure", "trace": _trace(e.trace or [])}
        return Report(text, "certificate-failure", EXIT_FALSE, payload, error=str(e),
                      seconds=time.perf_counter() - t0)
    except PervcohError as e:
        return Report(text, "error", EXIT_FALSE, {"error_type": type(e).__name__}, error=str(e),
                      seconds=time.perf_counter() - t0)
    code, status = EXIT_OK, "ok"
    expected = command.args.get("assert")
    if expected is not None:
        payload["asserted"] = expected
        if claim != expected:
            code, status = EXIT_FALSE, "assertion-failed"
    return Report(command.text, status, code, payload, certs, seconds=time.perf_counter() - t0)
