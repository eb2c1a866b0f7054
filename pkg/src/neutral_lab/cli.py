"""Command line front end.

Commands read an optional JSON config (--config), apply flag overrides, and
print one JSON report to stdout. --out writes the same report plus any
tabular artifacts (RFC-4180 CSV) into a directory. Every report embeds the
effective config and its sha256 hash so runs are reproducible.

Exit codes: 0 success; 1 invalid input (bad flags, malformed or unknown
config keys, invalid geometry); 2 numerical failure (singular solve, no
valid coating, search that misses its target).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from pathlib import Path
from types import SimpleNamespace

import numpy as np

from .errors import (
    DesignError,
    GeometryError,
    NearEvaluationError,
    SolverError,
    UnsupportedConfigurationError,
    ValidationError,
)
from . import designer, laurent, newtonian, shapesearch
from .geometry import (
    CoatedInclusion,
    LaurentMap,
    confocal_pair,
    discretize,
    laurent_domain,
    make_ellipse,
)
from .transmission import (
    ConductivityProfile,
    HarmonicPoly,
    decay_exponent,
    eval_u,
    neutrality_report,
    solve_uniform,
    _probe_circle,
)

_INF_TOKENS = {"inf", "Infinity", "infinity"}


class _Parser(argparse.ArgumentParser):
    """argparse that exits 1 on usage errors (validation, not numerics)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fail(code: int, message: str) -> int:
    print(message, file=sys.stderr)
    return code


# ---------------------------------------------------------------------------
# config schema (hand-rolled: flat sections, unknown keys rejected with paths)


def _is_num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _is_sigma(v) -> bool:
    if isinstance(v, str):
        return v in _INF_TOKENS
    return isinstance(v, (int, float)) and not isinstance(v, bool) and (
        math.isinf(v) or v >= 0
    )


def _sigma_value(v) -> float:
    return math.inf if isinstance(v, str) else float(v)


def _check_keys(section: dict, allowed: dict, path: str):
    for k in section:
        if k not in allowed:
            raise ValidationError(f"unknown config key '{path}.{k}'")
    for k, pred in allowed.items():
        if k in section and not pred(section[k]):
            raise ValidationError(f"config key '{path}.{k}' has invalid value {section[k]!r}")


def _validate_geometry(g: dict):
    if not isinstance(g, dict) or "type" not in g:
        raise ValidationError("config 'geometry' must be an object with a 'type'")
    t = g["type"]
    if t == "confocal":
        _check_keys(g, {"type": lambda v: True, "a1": _is_num, "am1": _is_num, "r0": _is_num},
                    "geometry")
        for k in ("a1", "am1", "r0"):
            if k not in g:
                raise ValidationError(f"geometry.confocal requires '{k}'")
    elif t == "laurent":
        _check_keys(g, {"type": lambda v: True, "coeffs": lambda v: isinstance(v, dict),
                        "r0": _is_num}, "geometry")
        if "coeffs" not in g or "r0" not in g:
            raise ValidationError("geometry.laurent requires 'coeffs' and 'r0'")
        for k, v in g["coeffs"].items():
            try:
                int(k)
            except ValueError:
                raise ValidationError(f"geometry.coeffs key {k!r} is not an integer order")
            ok = _is_num(v) or (
                isinstance(v, list) and len(v) == 2 and all(_is_num(c) for c in v)
            )
            if not ok:
                raise ValidationError(f"geometry.coeffs[{k}] must be a number or [re, im]")
    elif t == "ellipse_pair":
        def _ell(v):
            if not isinstance(v, dict):
                return False
            allowed = {"a": _is_num, "b": _is_num, "theta": _is_num,
                       "center": lambda c: isinstance(c, list) and len(c) == 2
                       and all(_is_num(x) for x in c)}
            _check_keys(v, allowed, "geometry.ellipse")
            return "a" in v and "b" in v
        _check_keys(g, {"type": lambda v: True, "inner": _ell, "outer": _ell}, "geometry")
        if "inner" not in g or "outer" not in g:
            raise ValidationError("geometry.ellipse_pair requires 'inner' and 'outer'")
    else:
        raise ValidationError(f"unknown geometry.type {t!r}")


_SCHEMA = {
    "geometry": None,  # validated by _validate_geometry
    "profile": {
        "sigma_c": _is_sigma,
        "sigma_s": lambda v: _is_num(v) and v > 0,
        "sigma_m": lambda v: _is_sigma(v) or (
            isinstance(v, list) and len(v) == 2 and all(_is_sigma(x) for x in v)
        ),
    },
    "numerics": {
        "nodes": lambda v: isinstance(v, int) and not isinstance(v, bool),
        "probe_radius": lambda v: v is None or _is_num(v),
        "probe_points": lambda v: isinstance(v, int) and not isinstance(v, bool),
        "tol": _is_num,
    },
    "solve": {"axis": lambda v: v in (1, 2)},
    "neutrality": {},
    "design": {"verify": lambda v: isinstance(v, bool)},
    "disk": {"f": _is_num},
    "newtonian": {},
    "freebvp": {"f": _is_num, "shear": _is_num},
    "laurent": {"f": _is_num, "shear": _is_num, "coeff_tol": _is_num},
    "search": {
        "max_evals": lambda v: isinstance(v, int) and not isinstance(v, bool),
        "target": _is_num,
        "run_budget": lambda v: isinstance(v, int) and not isinstance(v, bool),
        "max_order": lambda v: isinstance(v, int) and not isinstance(v, bool),
        "perturb": _is_num,
        "sigma_m": lambda v: isinstance(v, list) and len(v) == 2 and all(_is_num(x) for x in v),
    },
    "decay": {
        "h": lambda v: v in ("x1", "x2", "saddle", "xy"),
        "radii": lambda v: isinstance(v, list) and len(v) == 2 and all(_is_num(x) for x in v),
    },
}


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ValidationError(f"cannot read config {path}: {e}")
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f"malformed JSON in {path}: {e}")
    if not isinstance(cfg, dict):
        raise ValidationError("config root must be a JSON object")
    validate_config(cfg)
    return cfg


def validate_config(cfg: dict):
    for key, section in cfg.items():
        if key not in _SCHEMA:
            raise ValidationError(f"unknown config key '{key}'")
        if key == "geometry":
            _validate_geometry(section)
            continue
        if not isinstance(section, dict):
            raise ValidationError(f"config '{key}' must be an object")
        _check_keys(section, _SCHEMA[key], key)


def config_hash(cfg: dict) -> str:
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"), allow_nan=False)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# builders


def build_geometry(g: dict) -> CoatedInclusion:
    t = g["type"]
    if t == "confocal":
        return confocal_pair(float(g["a1"]), float(g["am1"]), float(g["r0"]))
    if t == "laurent":
        coeffs = {}
        for k, v in g["coeffs"].items():
            coeffs[int(k)] = complex(v[0], v[1]) if isinstance(v, list) else float(v)
        return laurent_domain(LaurentMap(coeffs=coeffs, r0=float(g["r0"])))
    inner_d, outer_d = g["inner"], g["outer"]

    def _mk(d):
        center = complex(*d.get("center", (0.0, 0.0)))
        return make_ellipse(center, float(d["a"]), float(d["b"]), float(d.get("theta", 0.0)))

    inc = CoatedInclusion(inner=_mk(inner_d), outer=_mk(outer_d), origin=None)
    inc.validate()
    return inc


def build_profile(p: dict) -> ConductivityProfile:
    for k in ("sigma_c", "sigma_s", "sigma_m"):
        if k not in p:
            raise ValidationError(f"profile requires '{k}'")
    sm = p["sigma_m"]
    if isinstance(sm, list):
        sigma_m = (_sigma_value(sm[0]), _sigma_value(sm[1]))
    else:
        sigma_m = (_sigma_value(sm), _sigma_value(sm))
    return ConductivityProfile(
        sigma_c=_sigma_value(p["sigma_c"]),
        sigma_s=float(p["sigma_s"]),
        sigma_m=sigma_m,
    )


_H_CHOICES = {
    "x1": HarmonicPoly(cx=1.0),
    "x2": HarmonicPoly(cy=1.0),
    "saddle": HarmonicPoly(cq=1.0),
    "xy": HarmonicPoly(cxy=1.0),
}


# ---------------------------------------------------------------------------
# artifact helpers


def _write_csv(path: Path, header: list[str], rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        w.writerows(rows)


def _emit(report: dict, out_dir: str | None, csv_files: dict | None = None) -> None:
    print(json.dumps(report, indent=2, sort_keys=True))
    if out_dir is None:
        return
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    for name, (header, rows) in (csv_files or {}).items():
        _write_csv(out / name, header, rows)


# ---------------------------------------------------------------------------
# command handlers: each returns (result_dict, csv_files)


def _numerics(cfg: dict) -> dict:
    base = {"nodes": 256, "probe_radius": None, "probe_points": 64, "tol": 1e-9}
    base.update(cfg.get("numerics", {}))
    return base


def cmd_solve(cfg):
    inc = build_geometry(cfg["geometry"])
    prof = build_profile(cfg["profile"])
    num = _numerics(cfg)
    axis = cfg.get("solve", {}).get("axis", 1)
    pair = solve_uniform(inc, prof, axis, n=num["nodes"])
    radius = num["probe_radius"] or 3.0 * inc.outer.max_radius()
    probe = _probe_circle(radius, num["probe_points"])
    vals, grads = eval_u(inc, pair, prof, probe)
    resid = float(np.max(np.abs(vals - probe[:, axis - 1])))
    t = pair.disc_inner.t
    result = {
        "axis": axis,
        "probe_radius": radius,
        "residual": resid,
        "phi": pair.phi.tolist(),
        "psi": pair.psi.tolist(),
    }
    rows = [
        (t[i],
         pair.disc_inner.nodes[i, 0], pair.disc_inner.nodes[i, 1], pair.phi[i],
         pair.disc_outer.nodes[i, 0], pair.disc_outer.nodes[i, 1], pair.psi[i])
        for i in range(len(t))
    ]
    samples = [
        (probe[i, 0], probe[i, 1], vals[i], grads[i, 0], grads[i, 1])
        for i in range(len(vals))
    ]
    return result, {
        "densities.csv": (["t", "x_in", "y_in", "phi", "x_out", "y_out", "psi"], rows),
        "samples.csv": (["x", "y", "u", "ux", "uy"], samples),
    }


def cmd_neutrality(cfg):
    inc = build_geometry(cfg["geometry"])
    prof = build_profile(cfg["profile"])
    num = _numerics(cfg)
    rep = neutrality_report(
        inc, prof, n=num["nodes"],
        probe_radius=num["probe_radius"], probe_points=num["probe_points"],
    )
    return rep.as_dict(), None


def cmd_design(cfg):
    g = cfg["geometry"]
    if g["type"] != "confocal":
        raise ValidationError("design requires geometry.type == 'confocal'")
    p = cfg.get("profile", {})
    for k in ("sigma_c", "sigma_s"):
        if k not in p:
            raise ValidationError(f"design requires profile.{k}")
    dr = designer.confocal_design(
        float(g["a1"]), float(g["am1"]), float(g["r0"]),
        _sigma_value(p["sigma_c"]), float(p["sigma_s"]),
    )
    result = dr.as_dict()
    if cfg.get("design", {}).get("verify", False):
        num = _numerics(cfg)
        inc = confocal_pair(float(g["a1"]), float(g["am1"]), float(g["r0"]))
        rep = neutrality_report(inc, dr.profile(_sigma_value(p["sigma_c"]),
                                                float(p["sigma_s"])), n=num["nodes"])
        result["neutrality"] = rep.as_dict()
    return result, None


def cmd_disk(cfg):
    p = cfg.get("profile", {})
    d = cfg.get("disk", {})
    for k in ("sigma_c", "sigma_s"):
        if k not in p:
            raise ValidationError(f"disk requires profile.{k}")
    if "f" not in d:
        raise ValidationError("disk requires disk.f")
    sm = designer.disk_matrix_conductivity(
        _sigma_value(p["sigma_c"]), float(p["sigma_s"]), float(d["f"])
    )
    return {"sigma_m": sm, "f": float(d["f"])}, None


def _design_for_geometry(cfg, section):
    """f and shear for the shell identities: explicit values win, else design."""
    g = cfg["geometry"]
    sect = cfg.get(section, {})
    if "f" in sect and "shear" in sect:
        return float(sect["f"]), float(sect["shear"]), None
    if g["type"] != "confocal":
        raise ValidationError(
            f"{section} needs explicit '{section}.f' and '{section}.shear' "
            "unless geometry.type == 'confocal'"
        )
    p = cfg.get("profile", {})
    for k in ("sigma_c", "sigma_s"):
        if k not in p:
            raise ValidationError(f"{section} requires profile.{k} to derive the design")
    dr = designer.confocal_design(
        float(g["a1"]), float(g["am1"]), float(g["r0"]),
        _sigma_value(p["sigma_c"]), float(p["sigma_s"]),
    )
    f = float(sect.get("f", dr.f))
    shear = float(sect.get("shear", dr.shear))
    return f, shear, dr


def cmd_newtonian(cfg):
    inc = build_geometry(cfg["geometry"])
    num = _numerics(cfg)
    f, shear, dr = _design_for_geometry(cfg, "newtonian")
    if dr is None:
        dr = SimpleNamespace(f=f, dmu=-shear / f)
    rep = newtonian.combined_identity_check(inc, dr, n=num["nodes"])
    result = rep.as_dict()
    fit = rep.fit
    rows = [
        ("d1", fit.d1, rep.d_expected[0], rep.d_mismatch[0]),
        ("d2", fit.d2, rep.d_expected[1], rep.d_mismatch[1]),
        ("c1", fit.c1, 0.0, abs(fit.c1)),
        ("c2", fit.c2, 0.0, abs(fit.c2)),
        ("rms_residual", fit.rms_residual, 0.0, fit.rms_residual),
        ("exterior_residual", rep.exterior_residual, 0.0, rep.exterior_residual),
    ]
    return result, {"fit.csv": (["quantity", "value", "expected", "mismatch"], rows)}


def cmd_freebvp(cfg):
    inc = build_geometry(cfg["geometry"])
    num = _numerics(cfg)
    f, shear, _ = _design_for_geometry(cfg, "freebvp")
    rep = newtonian.free_bvp_residual(inc, f, shear, n=num["nodes"])
    result = rep.as_dict()
    result.update({"f": f, "shear": shear})
    return result, None


def cmd_laurent_classify(cfg):
    g = cfg["geometry"]
    if g["type"] == "laurent":
        coeffs = {}
        for k, v in g["coeffs"].items():
            coeffs[int(k)] = complex(v[0], v[1]) if isinstance(v, list) else float(v)
        m = LaurentMap(coeffs=coeffs, r0=float(g["r0"]))
    elif g["type"] == "confocal":
        m = LaurentMap(coeffs={1: float(g["a1"]), -1: float(g["am1"])}, r0=float(g["r0"]))
    else:
        raise ValidationError("laurent-classify requires a laurent or confocal geometry")
    num = _numerics(cfg)
    sect = cfg.get("laurent", {})
    if "f" in sect and "shear" in sect:
        f, shear = float(sect["f"]), float(sect["shear"])
    else:
        inc = laurent_domain(m)
        from .geometry import area
        f = area(discretize(inc.inner, 256)) / area(discretize(inc.outer, 256))
        shear = float(sect.get("shear", 0.0))
    cls = laurent.classify(
        m, f, shear, tol=num["tol"], coeff_tol=sect.get("coeff_tol", 1e-10)
    )
    result = cls.as_dict()
    result.update({"f": f, "shear": shear})
    rows = [(n, fac, "yes" if n in cls.admissible else "no",
             "yes" if n in cls.support else "no")
            for n, fac in sorted(cls.factors.items())]
    return result, {"factors.csv": (["n", "factor", "admissible", "in_support"], rows)}


def cmd_search(cfg, seed=None):
    g = cfg["geometry"]
    p = cfg.get("profile", {})
    for k in ("sigma_c", "sigma_s"):
        if k not in p:
            raise ValidationError(f"search requires profile.{k}")
    sect = cfg.get("search", {})
    num = _numerics(cfg)
    scfg = shapesearch.SearchConfig(
        sigma_c=_sigma_value(p["sigma_c"]),
        sigma_s=float(p["sigma_s"]),
        max_order=sect.get("max_order", 2),
        nodes=num["nodes"],
        probe_points=num["probe_points"],
    )
    if g["type"] == "confocal":
        coeffs = {k: 0.0 for k in scfg.coeff_orders}
        coeffs[-1] = float(g["am1"])
        r0 = float(g["r0"])
    elif g["type"] == "laurent":
        coeffs = {k: 0.0 for k in scfg.coeff_orders}
        for k, v in g["coeffs"].items():
            k = int(k)
            if k == 1:
                if float(v) != 1.0:
                    raise ValidationError("search uses the gauge a_1 = 1")
                continue
            if k not in coeffs:
                raise ValidationError(f"coefficient order {k} exceeds search.max_order")
            coeffs[k] = float(v)
        r0 = float(g["r0"])
    else:
        raise ValidationError("search requires a confocal or laurent geometry")
    if "sigma_m" in sect:
        sigma_m = (float(sect["sigma_m"][0]), float(sect["sigma_m"][1]))
    else:
        sm = p.get("sigma_m")
        if sm is None:
            raise ValidationError("search requires profile.sigma_m or search.sigma_m")
        sigma_m = ((_sigma_value(sm[0]), _sigma_value(sm[1])) if isinstance(sm, list)
                   else (_sigma_value(sm), _sigma_value(sm)))
    start = shapesearch.ShapeParams(coeffs=coeffs, r0=r0, sigma_m=sigma_m)
    perturb = float(sect.get("perturb", 0.0))
    if perturb:
        rng = np.random.default_rng(seed)
        x = shapesearch.encode(start, scfg)
        x[: len(scfg.coeff_orders)] += rng.uniform(-perturb, perturb,
                                                   len(scfg.coeff_orders))
        start = shapesearch.decode(x, scfg)
    res = shapesearch.search(
        start, scfg,
        max_evals=sect.get("max_evals", 5000),
        target=sect.get("target", 1e-12),
        run_budget=sect.get("run_budget", 1500),
    )
    rows = [(i, f, gap) for (i, f, gap) in res.improvements]
    result = res.as_dict()
    if not res.converged:
        raise SolverError(
            "search did not reach the target objective: "
            + json.dumps(result, sort_keys=True)
        )
    return result, {"history.csv": (["iteration", "objective", "gap"], rows)}


def cmd_decay(cfg):
    inc = build_geometry(cfg["geometry"])
    prof = build_profile(cfg["profile"])
    num = _numerics(cfg)
    sect = cfg.get("decay", {})
    h = _H_CHOICES[sect.get("h", "x1")]
    radii = sect.get("radii", [5.0, 10.0])
    expo = decay_exponent(inc, prof, h, (float(radii[0]), float(radii[1])),
                          n=num["nodes"], probe_points=num["probe_points"])
    return {"h": sect.get("h", "x1"), "radii": list(radii), "exponent": expo}, None


# ---------------------------------------------------------------------------
# argument parsing


def _add_geometry_flags(sp):
    sp.add_argument("--a1", type=float, help="confocal a_1 coefficient")
    sp.add_argument("--am1", type=float, help="confocal a_-1 coefficient")
    sp.add_argument("--r0", type=float, help="conformal modulus of the shell")
    sp.add_argument("--map", help="LaurentMap as JSON text or @file path")


def _add_profile_flags(sp):
    sp.add_argument("--sc", help="core conductivity (number or 'inf')")
    sp.add_argument("--ss", type=float, help="shell conductivity")
    sp.add_argument("--sm", help="matrix conductivity: SIGMA or S1,S2")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="neutral-lab",
                 description="Coated-inclusion neutrality laboratory")
    ap.add_argument("--config", help="JSON config file")
    ap.add_argument("--out", help="directory for report.json and CSV artifacts")
    ap.add_argument("--nodes", type=int, help="quadrature nodes per curve")
    ap.add_argument("--seed", type=int, help="seed for randomized options")
    ap.add_argument("--tol", type=float, help="admissibility tolerance")
    sub = ap.add_subparsers(dest="command", required=True)

    for name in ("solve", "neutrality", "design", "disk", "newtonian",
                 "freebvp", "laurent-classify", "search", "decay"):
        sp = sub.add_parser(name)
        _add_geometry_flags(sp)
        _add_profile_flags(sp)
        sp.add_argument("--probe-radius", type=float)
        if name == "solve":
            sp.add_argument("--axis", type=int, choices=(1, 2))
        if name == "design":
            sp.add_argument("--verify", action="store_true",
                            help="attach a BIE neutrality report")
        if name == "disk":
            sp.add_argument("--f", type=float, help="volume fraction")
        if name in ("freebvp", "newtonian", "laurent-classify"):
            sp.add_argument("--f", type=float, help="volume fraction override")
            sp.add_argument("--shear", type=float, help="inner shear coefficient")
        if name == "laurent-classify":
            sp.add_argument("--coeff-tol", type=float)
        if name == "search":
            sp.add_argument("--max-evals", type=int)
            sp.add_argument("--target", type=float)
            sp.add_argument("--max-order", type=int)
            sp.add_argument("--perturb", type=float,
                            help="uniform start perturbation amplitude")
        if name == "decay":
            sp.add_argument("--h", choices=sorted(_H_CHOICES))
            sp.add_argument("--radii", nargs=2, type=float,
                            metavar=("R1", "R2"))
    return ap


def _parse_sigma_flag(text: str) -> float | str:
    if text in _INF_TOKENS:
        return "inf"
    try:
        return float(text)
    except ValueError:
        raise ValidationError(f"conductivity flag must be a number or 'inf', got {text!r}")


def _merge_flags(cfg: dict, args) -> dict:
    """Overlay command-line flags onto the config dict (flags win)."""
    cfg = json.loads(json.dumps(cfg))  # deep copy, JSON-clean

    geo = cfg.setdefault("geometry", {})
    if getattr(args, "map", None):
        text = args.map
        if text.startswith("@"):
            text = Path(text[1:]).read_text(encoding="utf-8")
        try:
            m = json.loads(text)
        except json.JSONDecodeError as e:
            raise ValidationError(f"--map is not valid JSON: {e}")
        geo.clear()
        geo.update({"type": "laurent", "coeffs": m.get("coeffs", {}), "r0": m.get("r0")})
    if getattr(args, "a1", None) is not None or getattr(args, "am1", None) is not None \
            or getattr(args, "r0", None) is not None:
        if geo.get("type") not in (None, "confocal"):
            raise ValidationError("--a1/--am1/--r0 conflict with a non-confocal geometry")
        geo["type"] = "confocal"
        if args.a1 is not None:
            geo["a1"] = args.a1
        if args.am1 is not None:
            geo["am1"] = args.am1
        if args.r0 is not None:
            geo["r0"] = args.r0
        geo.setdefault("am1", 0.0)
    if not geo:
        cfg.pop("geometry")

    prof = cfg.setdefault("profile", {})
    if getattr(args, "sc", None) is not None:
        prof["sigma_c"] = _parse_sigma_flag(args.sc)
    if getattr(args, "ss", None) is not None:
        prof["sigma_s"] = args.ss
    if getattr(args, "sm", None) is not None:
        parts = args.sm.split(",")
        if len(parts) == 1:
            prof["sigma_m"] = _parse_sigma_flag(parts[0])
        elif len(parts) == 2:
            prof["sigma_m"] = [_parse_sigma_flag(p) for p in parts]
        else:
            raise ValidationError("--sm takes SIGMA or S1,S2")
    if not prof:
        cfg.pop("profile")

    num = cfg.setdefault("numerics", {})
    if args.nodes is not None:
        num["nodes"] = args.nodes
    if getattr(args, "probe_radius", None) is not None:
        num["probe_radius"] = args.probe_radius
    if args.tol is not None:
        num["tol"] = args.tol
    if not num:
        cfg.pop("numerics")

    cmd_key = args.command.replace("-", "_")
    section_name = {"laurent_classify": "laurent"}.get(cmd_key, cmd_key)
    sect = cfg.setdefault(section_name, {})
    for flag, key in (
        ("axis", "axis"), ("verify", "verify"), ("f", "f"), ("shear", "shear"),
        ("coeff_tol", "coeff_tol"), ("max_evals", "max_evals"),
        ("target", "target"), ("max_order", "max_order"),
        ("perturb", "perturb"), ("h", "h"), ("radii", "radii"),
    ):
        v = getattr(args, flag, None)
        if v is not None and v is not False:
            sect[key] = list(v) if isinstance(v, tuple) else v
    if not sect:
        cfg.pop(section_name)

    validate_config(cfg)
    return cfg


_HANDLERS = {
    "solve": cmd_solve,
    "neutrality": cmd_neutrality,
    "design": cmd_design,
    "disk": cmd_disk,
    "newtonian": cmd_newtonian,
    "freebvp": cmd_freebvp,
    "laurent-classify": cmd_laurent_classify,
    "decay": cmd_decay,
}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = load_config(args.config)
        cfg = _merge_flags(cfg, args)
        if args.command == "search":
            result, csv_files = cmd_search(cfg, seed=args.seed)
        else:
            result, csv_files = _HANDLERS[args.command](cfg)
    except (ValidationError, GeometryError, UnsupportedConfigurationError) as e:
        return _fail(1, f"error: {e}")
    except (SolverError, DesignError, NearEvaluationError) as e:
        return _fail(2, f"numerical failure: {e}")

    report = {
        "command": args.command,
        "config": cfg,
        "config_hash": config_hash(cfg),
        "seed": args.seed,
        "result": result,
    }
    _emit(report, args.out, csv_files)
    return 0


if __name__ == "__main__":
    sys.exit(main())
