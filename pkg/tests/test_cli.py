import json
import random
import subprocess
import sys
from pathlib import Path

import pytest

from pervcoh.cli import (
    InputError,
    emit_report,
    main,
    parse_input,
    run_command,
    serialize_complex,
    serialize_session,
)
from pervcoh.cli.session import serialize_header

from battery import cone_ring, line, plane

NILCONE = Path(__file__).resolve().parent.parent / "sessions" / "nilcone.toml"

HEADER = """field.char = 32003
ambient.vars = ["x", "y", "z"]
quotient = ["x*y - z^2"]
points.eta = []
points.o = ["x", "y", "z"]
perversity.mid = { eta = -1, o = 0 }
complex.IC.degree.-1.gens = 1
"""


def _nilcone():
    return parse_input(NILCONE.read_text())


def test_golden_session_parses():
    s = _nilcone()
    assert s.space.names == ["eta", "o"]
    assert [x.dim for x in s.space.points] == [2, 0]
    assert list(s.perversities) == ["mid"]
    assert sorted(s.complexes) == ["IC", "SKY"]


def test_dangling_point_reference():
    text = HEADER + 'perversity.bad = { eta = -1, "ℓ" = 0 }\n'
    with pytest.raises(InputError) as err:
        parse_input(text)
    assert "ℓ" in err.value.message
    assert err.value.line == 8


def test_juxtaposition_error_points_at_the_space():
    text = HEADER.replace('quotient = ["x*y - z^2"]', 'quotient = ["x y - z^2"]')
    with pytest.raises(InputError) as err:
        parse_input(text)
    assert err.value.line == 3
    line = text.splitlines()[2]
    assert line[err.value.column - 1] == " " and line[err.value.column - 2] == "x"


def test_input_errors():
    bad = [
        HEADER.replace("32003", "32001"),
        HEADER.replace('"x", "y", "z"]\nquotient', '"x", "x", "z"]\nquotient'),
        HEADER + "complex.B.degree.0.gens = 1\ncomplex.B.diff.0 = [[\"1\"]]\n",
        HEADER + "mystery = 1\n",
        HEADER + 'commands.a = "member IC nope leq"\n',
        HEADER.replace("x*y - z^2", "x*y - w^2"),
        "field.char = [",
    ]
    for text in bad:
        with pytest.raises(InputError):
            parse_input(text)


def test_member_report_matches_the_example():
    s = _nilcone()
    r = run_command(s, "member F=IC side=leq perversity=mid")
    d = r.to_dict()
    assert d["result"] is True and d["exit_code"] == 0
    assert sorted(d["per_point"]) == ["eta", "o"]
    assert len(d["certificates"]) == 2


def test_reports_are_byte_identical():
    s = _nilcone()
    for cmd in ("member IC mid geq", "truncate SKY mid", "ic IC mid --boundary o", "dual SKY"):
        a = emit_report(run_command(s, cmd))
        b = emit_report(run_command(_nilcone(), cmd))
        assert a == b
        assert json.loads(a)["status"] == "ok"


def test_human_truncate_table():
    s = _nilcone()
    out = emit_report(run_command(s, "truncate IC mid"), "human")
    assert "degree" in out and "L" in out and "M" in out
    rows = [l.split() for l in out.splitlines() if l.strip().startswith("-1")]
    assert rows and rows[0] == ["-1", "1", "0"]


def test_zero_perversity_truncate_is_standard():
    text = """field.char = 32003
ambient.vars = ["t"]
points.eta = []
points.o = ["t"]
perversity.zero = { eta = 0, o = 0 }
complex.F.degree.0.gens = 1
complex.F.degree.1.gens = 1
complex.F.diff.0 = [["t^2"]]
complex.G.degree.-1.gens = 1
complex.G.degree.0.gens = 1
complex.G.degree.0.rels = [["t"]]
"""
    s = parse_input(text)
    d = run_command(s, "truncate F zero").to_dict()
    assert d["L"]["cohomology"] == {} and d["M"]["cohomology"] == {"1": {"gens": 1, "rels": 1, "length": 2}}
    d = run_command(s, "truncate G zero").to_dict()
    assert d["M"]["cohomology"] == {}


def test_exit_codes_end_to_end(tmp_path, capsys):
    assert main([str(NILCONE)]) == 0
    capsys.readouterr()
    assert main([str(NILCONE), "member", "IC", "mid", "leq", "--assert", "false"]) == 1
    assert main([str(NILCONE), "member", "NOPE", "mid", "leq"]) == 2
    cone_only = tmp_path / "line.toml"
    cone_only.write_text(HEADER + 'complex.L.degree.0.gens = 1\ncomplex.L.degree.0.rels = [["x"]]\n')
    assert main([str(cone_only), "member", "L", "mid", "leq"]) == 3
    ncm = tmp_path / "ncm.toml"
    ncm.write_text('field.char = 32003\nambient.vars = ["x", "y"]\nquotient = ["x^2", "x*y"]\n'
                   'points.eta = []\ncomplex.O.degree.0.gens = 1\n')
    assert main([str(ncm), "dual", "O"]) == 3
    out = capsys.readouterr().out
    assert "NotCohenMacaulay" in out
    broken = tmp_path / "broken.toml"
    broken.write_text("field.char = 3200\n")
    assert main([str(broken)]) == 2
    assert main([str(tmp_path / "missing.toml")]) == 2


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pervcoh", str(NILCONE), "--format", "human",
                           "member", "SKY", "mid", "geq"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "result" in proc.stdout


def test_serialization_round_trip():
    for make in (line, plane, cone_ring):
        R, space, cx = make()
        head = serialize_header(R, space)
        for name, C in cx.items():
            ident = "".join(ch if ch.isalnum() else "_" for ch in name)
            ident = "C_" + ident
            text = serialize_complex(ident, C)
            again = parse_input(head + text).complexes[ident]
            assert serialize_complex(ident, again) == text, name


def test_session_round_trip():
    s = _nilcone()
    text = serialize_session(s)
    assert serialize_session(parse_input(text)) == text


def _mutate(text, rng):
    alphabet = list('[]{}=",.-+*^0123456789xyzabceto \n#ℓ') + ["\"\"", "1e9", "[[", "99999999999"]
    chars = list(text)
    for _ in range(rng.randint(1, 4)):
        op = rng.randrange(5)
        if not chars:
            break
        i = rng.randrange(len(chars))
        if op == 0:
            del chars[i]
        elif op == 1:
            chars.insert(i, rng.choice(alphabet))
        elif op == 2:
            chars[i] = rng.choice(alphabet)
        elif op == 3:
            lines = "".join(chars).splitlines(keepends=True)
            j = rng.randrange(len(lines))
            lines.insert(rng.randrange(len(lines) + 1), lines[j])
            chars = list("".join(lines))
        else:
            chars = chars[:i]
    return "".join(chars)


def test_parser_is_total_on_mutated_documents():
    rng = random.Random(2024)
    base = NILCONE.read_text()
    outcomes = {"session": 0, "diagnostic": 0}
    for _ in range(10_000):
        text = _mutate(base, rng)
        try:
            parse_input(text)
            outcomes["session"] += 1
        except InputError as e:
            assert e.message
            outcomes["diagnostic"] += 1
    assert sum(outcomes.values()) == 10_000
    assert outcomes["session"] > 0 and outcomes["diagnostic"] > 0
