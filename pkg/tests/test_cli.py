"""Command line surface and campaign plumbing."""

import json

from lastfall.cli import (campaign_csv, gen_random_system, main, verify_solver,
                          verify_thm_1_1, write_campaign)
from lastfall.poly import PolySystem, Ring

import random


def test_gen_deterministic(gf9):
    ring = Ring(gf9, "k", ["X0", "X1"])
    a = gen_random_system(ring, 2, 2, random.Random("s"))
    b = gen_random_system(ring, 2, 2, random.Random("s"))
    assert a == b


def test_gen_degree_one_is_affine(gf4):
    ring = Ring(gf4, "k", ["X0", "X1"])
    system = gen_random_system(ring, 1, 3, random.Random(1))
    assert all(f.degree <= 1 for f in system.polys)


def test_cli_gen_and_descend_round_trip(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"field": {"p": 2, "e": 1, "n": 2},
                               "m": 1, "degree": 2, "count": 1, "seed": 3}))
    sysfile = tmp_path / "system.json"
    rc = main(["--config", str(cfg), "--out", str(sysfile), "gen"])
    assert rc == 0
    system = PolySystem.from_json_str(sysfile.read_text())
    assert system.ring.nvars == 1

    out = tmp_path / "desc.json"
    rc = main(["--out", str(out), "descend", str(sysfile), "--emit", "Fprime1"])
    assert rc == 0
    descended = PolySystem.from_json_str(out.read_text())
    assert descended.ring.nvars == 2
    assert len(descended.polys) == 2 + 2  # components + field equations

    rc = main(["--out", str(tmp_path / "f1.json"), "descend", str(sysfile),
               "--emit", "F1"])
    assert rc == 0


def test_cli_lastfall(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"field": {"p": 2, "e": 1, "n": 1},
                               "m": 2, "degree": 2, "count": 2, "seed": 5}))
    sysfile = tmp_path / "system.json"
    main(["--config", str(cfg), "--out", str(sysfile), "gen"])
    outdir = tmp_path / "prof"
    rc = main(["--out", str(outdir), "lastfall", str(sysfile), "--cap", "5"])
    assert rc == 0
    prof = json.loads((outdir / "lastfall.json").read_text())
    assert prof["status"] in ("certified", "cap-limited")
    csv_text = (outdir / "lastfall.csv").read_text()
    assert csv_text.splitlines()[0] == "degree,dim_V,dim_V_cap_lower,dim_prev,fall"


def test_cli_lastfall_orders_agree(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"field": {"p": 3, "e": 1, "n": 1},
                               "m": 2, "degree": 2, "count": 2, "seed": 11}))
    sysfile = tmp_path / "system.json"
    main(["--config", str(cfg), "--out", str(sysfile), "gen"])
    profs = {}
    for order in ("grevlex", "grlex"):
        outdir = tmp_path / order
        main(["--out", str(outdir), "lastfall", str(sysfile), "--order", order])
        profs[order] = json.loads((outdir / "lastfall.json").read_text())
    assert (profs["grevlex"]["last_fall_degree"]
            == profs["grlex"]["last_fall_degree"])


def test_cli_solve_linearized(tmp_path, capsys):
    cfg = tmp_path / "solve.json"
    cfg.write_text(json.dumps({
        "field": {"p": 2, "e": 1, "n": 2},
        "m": 2,
        "coeffs": [[[1, 0], [1, 0]]],   # x_0 - x_1
        "fw": [1, 0, 1],                # x^2 - 1
    }))
    rc = main(["--config", str(cfg), "solve-linearized", "--compare"])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["mode"] == "structured"
    assert out["agrees_with_oracle"] is True
    assert out["dim"] == 2

    rc = main(["--config", str(cfg), "solve-linearized", "--oracle"])
    assert rc == 0
    out2 = json.loads(capsys.readouterr().out)
    assert out2["mode"] == "oracle"
    assert out2["coord_matrix"] == out["coord_matrix"]


def test_campaign_csv_reproducible(tmp_path):
    a = verify_thm_1_1(seed=9, per_combo=1, combos=((2, 2, 1),))
    b = verify_thm_1_1(seed=9, per_combo=1, combos=((2, 2, 1),))
    assert campaign_csv(a) == campaign_csv(b)
    paths = write_campaign(a, str(tmp_path))
    assert (tmp_path / "thm11.csv").exists()
    payload = json.loads((tmp_path / "thm11.json").read_text())
    assert payload["summary"]["total"] == 1
    assert "wall_ms" in payload["rows"][0]


def test_cli_verify_exit_codes(tmp_path, capsys):
    cfg = tmp_path / "verify.json"
    cfg.write_text(json.dumps({"thm11": {"per_combo": 1, "combos": [[2, 2, 1]]}}))
    rc = main(["--config", str(cfg), "--seed", "4", "--out", str(tmp_path / "o"),
               "verify", "thm11"])
    assert rc == 0
    assert (tmp_path / "o" / "thm11.csv").exists()
    capsys.readouterr()


def test_solver_subcommand_campaign_smoke():
    res = verify_solver(seed=1, per_combo=4, combos=((2, 1), (3, 2)),
                        check_fall_bound=False)
    assert res.failed == 0


def test_cli_gen_linearized(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"field": {"p": 2, "e": 1, "n": 3},
                               "m": 2, "count": 1, "seed": 8,
                               "linearized": True, "bound": 2}))
    sysfile = tmp_path / "lin.json"
    assert main(["--config", str(cfg), "--out", str(sysfile), "gen"]) == 0
    system = PolySystem.from_json_str(sysfile.read_text())
    # linearized shape: every monomial is a q-power of a single variable
    for f in system.polys:
        for e in f.terms:
            nonzero = [a for a in e if a]
            assert len(nonzero) == 1 and nonzero[0] in (1, 2, 4)


def test_cli_verify_inconclusive_exit_code(tmp_path, capsys):
    """Cap-limited rows are never passes; without the override the exit code
    is nonzero, with it the campaign may still succeed."""
    cfg = tmp_path / "verify.json"
    cfg.write_text(json.dumps(
        {"thm11": {"per_combo": 2, "combos": [[2, 3, 2]], "cap": 1}}))
    rc = main(["--config", str(cfg), "--seed", "0", "verify", "thm11"])
    assert rc == 1
    summary = json.loads(capsys.readouterr().out)
    assert summary["inconclusive"] == summary["total"] > 0
    rc = main(["--config", str(cfg), "--seed", "0", "verify", "thm11",
               "--allow-inconclusive"])
    assert rc == 0
    capsys.readouterr()


def test_cli_verify_csv_format(tmp_path, capsys):
    cfg = tmp_path / "verify.json"
    cfg.write_text(json.dumps({"thm11": {"per_combo": 1, "combos": [[2, 2, 1]]}}))
    rc = main(["--config", str(cfg), "--format", "csv", "--out",
               str(tmp_path / "o"), "verify", "thm11"])
    assert rc == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0].startswith("instance,p,e,n,m,")
    assert (tmp_path / "o" / "thm11.csv").read_text() == out
