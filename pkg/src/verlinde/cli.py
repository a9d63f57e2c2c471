"""Command-line surface: fusion products, fusion tables, qdim evaluation,
resolution inspection, and the verification suites.

Labels are parenthesized Kac pairs like ``(2,1)`` or bracketed key=value
forms like ``E[l=0;lam=0.31;r=1,s=1]`` and ``M[r=2,s=1]``.  Output formats:
text (default), json (validating against the shipped schema), csv.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import __version__, checks
from . import singlet as sg
from . import sl2 as s2
from .errors import (CalculusError, IncompleteBasis, LabelParseError,
                     NotNearInteger, OutOfRange, UnsupportedPair)
from .labels import (GrothendieckVector, PiLabel, Sl2DMinus, SingletAtom,
                     canonicalize, parse_label, render_label)
from .resolution import closed_form, double_limit
from .scalar import Tolerance
from .semisimple import (HeisenbergTheory, MinimalModelTheory, PiTheory,
                         heis_qdim, pi0_fusion, pi0_qdim, vir_fusion_product)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_PARSE = 2
EXIT_UNSUPPORTED = 3
EXIT_CROSSCHECK = 4

_GRADING_NOTE = "z-degree of sl2 standards is the spectral-flow index l"


@dataclass
class RunConfig:
    theory: str
    u: int | None
    v: int | None
    p: int | None
    k: str | None
    heis_m: str | None
    heis_b: str | None
    seed: int
    samples: int
    tol: Tolerance
    fmt: str
    output: str | None
    timestamp: bool
    workers: int


def _fmt_float(x: float) -> float:
    # 12 significant digits, still a JSON number
    return float(f"{float(x):.12g}")


def _fmt_complex(z: complex) -> list[float]:
    return [_fmt_float(z.real), _fmt_float(z.imag)]


def _parse_ranges(text: str | None, default: tuple[int, int]) -> range:
    if text is None:
        lo, hi = default
    else:
        try:
            lo, hi = (int(part) for part in text.split(":"))
        except ValueError as exc:
            raise LabelParseError(f"bad range {text!r}, expected LO:HI") from exc
    return range(lo, hi + 1)


def _build_theory(cfg: RunConfig):
    name = cfg.theory
    if name == "minimal":
        _need(cfg.u is not None and cfg.v is not None, "minimal theory needs --u and --v")
        return MinimalModelTheory(cfg.u, cfg.v)
    if name == "singlet":
        _need(cfg.p is not None, "singlet theory needs --p")
        return sg.SingletTheory(cfg.p)
    if name == "sl2":
        u, v = _uv_or_k(cfg)
        return s2.Sl2Theory(u, v)
    if name == "pi0":
        u, v = _uv_or_k(cfg)
        return PiTheory(u, v)
    if name == "heisenberg":
        _need(cfg.heis_m is not None, "heisenberg theory needs --heis-m")
        rows = [tuple(float(x) for x in row.split(",")) for row in cfg.heis_m.split(";")]
        b = tuple(float(x) for x in cfg.heis_b.split(",")) if cfg.heis_b else ()
        return HeisenbergTheory(tuple(rows), b)
    raise LabelParseError(f"unknown theory {name!r}")


def _uv_or_k(cfg: RunConfig) -> tuple[int, int]:
    if cfg.u is not None and cfg.v is not None:
        return cfg.u, cfg.v
    _need(cfg.k is not None, "need --u/--v or --k (level as '-2 + u/v', e.g. -1/2)")
    k = Fraction(cfg.k)
    uv = k + 2
    _need(uv > 0, f"level {cfg.k} is not of the admissible form")
    return uv.numerator, uv.denominator


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise LabelParseError(msg)


def _theory_params(cfg: RunConfig) -> dict:
    return {key: val for key, val in
            (("u", cfg.u), ("v", cfg.v), ("p", cfg.p), ("k", cfg.k),
             ("heis_m", cfg.heis_m), ("heis_b", cfg.heis_b)) if val is not None}


def _meta(cfg: RunConfig) -> dict:
    meta = {
        "theory": cfg.theory,
        "params": _theory_params(cfg),
        "seed": cfg.seed,
        "samples": cfg.samples,
        "tolerances": {
            "eps_round": _fmt_float(cfg.tol.eps_round),
            "eps_limit": _fmt_float(cfg.tol.eps_limit),
            "eps_exclusion": _fmt_float(cfg.tol.eps_exclusion),
        },
        "version": __version__,
        "grading_convention": _GRADING_NOTE,
    }
    if cfg.timestamp:
        meta["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    return meta


def _emit(cfg: RunConfig, command: str, result, text_lines: list[str],
          csv_rows: tuple[list[str], list[list]] | None = None) -> None:
    if cfg.fmt == "json":
        doc = {"command": command, "meta": _meta(cfg), "result": result}
        payload = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    elif cfg.fmt == "csv":
        buf = io.StringIO()
        for key, val in sorted(_meta(cfg).items()):
            if key == "timestamp" and not cfg.timestamp:
                continue
            buf.write(f"# {key}={json.dumps(val, sort_keys=True)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        header, rows = csv_rows if csv_rows is not None else (["value"], [[json.dumps(result)]])
        writer.writerow(header)
        writer.writerows(rows)
        payload = buf.getvalue()
    else:
        payload = "\n".join(text_lines) + "\n"
    if cfg.output:
        Path(cfg.output).write_text(payload)
    else:
        sys.stdout.write(payload)


def _vector_json(vec: GrothendieckVector) -> list:
    return [[render_label(lab), c] for lab, c in vec.items()]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_fuse(cfg: RunConfig, args) -> int:
    theory = _build_theory(cfg)
    x = parse_label(args.x)
    y = parse_label(args.y)
    result: dict = {"x": render_label(x), "y": render_label(y)}
    lines = []
    if isinstance(theory, MinimalModelTheory):
        vec = vir_fusion_product(theory, x, y)
        result["grothendieck"] = _vector_json(vec)
        lines.append(vec.render())
    elif isinstance(theory, sg.SingletTheory):
        vec = sg.fuse(theory, x, y, seed=cfg.seed, tol=cfg.tol)
        result["grothendieck"] = _vector_json(vec)
        lines.append(vec.render())
    elif isinstance(theory, s2.Sl2Theory):
        try:
            fr = s2.fusion(theory, x, y, n_check=0 if args.skip_check else 4,
                           seed=cfg.seed, tol=cfg.tol)
        except UnsupportedPair:
            # the class-level product is still well-defined
            vec = s2.gr_fusion(theory, x, y, cfg.tol)
            result["grothendieck"] = _vector_json(vec)
            result["note"] = "actual module decomposition not determined for this pair"
            lines.append(f"classes: {vec.render()}")
            lines.append(result["note"])
            rows = (["x", "y", "term", "coefficient"],
                    [[result["x"], result["y"], lab, c]
                     for lab, c in result["grothendieck"]])
            _emit(cfg, "fuse", result, lines, rows)
            return EXIT_UNSUPPORTED
        if not args.skip_check and fr.max_residual > cfg.tol.eps_round:
            raise NotNearInteger(fr.max_residual, fr.max_residual)
        result["grothendieck"] = _vector_json(fr.gr)
        result["summands"] = [[render_label(o), c] for o, c in fr.summands]
        result["max_residual"] = _fmt_float(fr.max_residual)
        lines.append(fr.render())
        lines.append(f"classes: {fr.gr.render()}")
    elif isinstance(theory, PiTheory):
        out = pi0_fusion(canonicalize(x, theory), canonicalize(y, theory))
        result["product"] = render_label(out)
        lines.append(render_label(out))
    else:
        raise UnsupportedPair(f"fuse is not defined for theory {cfg.theory!r}")
    rows = (["x", "y", "term", "coefficient"],
            [[result["x"], result["y"], lab, c]
             for lab, c in result.get("grothendieck", [])])
    _emit(cfg, "fuse", result, lines, rows)
    return EXIT_OK


def _table_labels(cfg: RunConfig, theory, args) -> list:
    rr = _parse_ranges(args.r_range, (1, 2))
    sr = _parse_ranges(args.s_range, (1, 2))
    lr = _parse_ranges(args.l_range, (0, 1))
    grid = [float(x) for x in args.lam_grid.split(",")] if args.lam_grid else []
    if isinstance(theory, MinimalModelTheory):
        labels = theory.labels()
        if args.r_range or args.s_range:
            labels = [lab for lab in labels if lab.r in rr and lab.s in sr]
        return labels
    if isinstance(theory, sg.SingletTheory):
        return [SingletAtom(r, s) for r in rr for s in range(1, theory.p) if s in sr]
    if isinstance(theory, s2.Sl2Theory):
        return [Sl2DMinus(ell, r, s)
                for ell in lr
                for r in rr if 1 <= r <= theory.u - 1
                for s in sr if 1 <= s <= theory.v - 1]
    if isinstance(theory, PiTheory):
        return [PiLabel(ell, lam) for ell in lr for lam in grid]
    raise UnsupportedPair(f"table is not defined for theory {cfg.theory!r}")


def cmd_table(cfg: RunConfig, args) -> int:
    theory = _build_theory(cfg)
    labels = _table_labels(cfg, theory, args)
    pairs = [(a, b) for a in labels for b in labels]

    def one(pair):
        a, b = pair
        if isinstance(theory, MinimalModelTheory):
            return vir_fusion_product(theory, a, b)
        if isinstance(theory, sg.SingletTheory):
            return sg.fuse(theory, a, b, seed=cfg.seed, tol=cfg.tol)
        if isinstance(theory, s2.Sl2Theory):
            return s2.gr_fusion(theory, a, b, cfg.tol)
        return GrothendieckVector.unit(canonicalize(pi0_fusion(a, b), theory))

    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        products = list(pool.map(one, pairs))
    entries = []
    rows = []
    lines = []
    for (a, b), vec in zip(pairs, products):
        entry = {"x": render_label(a), "y": render_label(b), "terms": _vector_json(vec)}
        entries.append(entry)
        lines.append(f"{entry['x']} x {entry['y']} = {vec.render()}")
        for lab, c in vec.items():
            rows.append([entry["x"], entry["y"], render_label(lab), c])
    _emit(cfg, "table", {"entries": entries}, lines,
          (["x", "y", "term", "coefficient"], rows))
    return EXIT_OK


def cmd_qdim(cfg: RunConfig, args) -> int:
    theory = _build_theory(cfg)
    lab = parse_label(args.label)
    values = []
    if isinstance(theory, MinimalModelTheory):
        points = theory.labels()
        values = [(render_label(pt), complex(theory.qdim(canonicalize(lab, theory), pt)))
                  for pt in points]
    elif isinstance(theory, sg.SingletTheory):
        for pt in theory.sample_points(cfg.samples, cfg.seed, cfg.tol):
            values.append((f"mu={pt.mu:.12g}", sg.qdim_label(theory, lab, pt.mu, cfg.tol)))
    elif isinstance(theory, s2.Sl2Theory):
        for pt in theory.sample_points(cfg.samples, cfg.seed, cfg.tol):
            qv = s2.qdim_A(theory, lab, pt, cfg.tol) / s2.qdim_vacuum(theory, pt, cfg.tol)
            values.append((f"l={pt.ell};lam={pt.lam:.12g};r={pt.r},s={pt.s}", qv))
    elif isinstance(theory, PiTheory):
        for pt in theory.sample_labels(cfg.samples, cfg.seed):
            values.append((render_label(pt), pi0_qdim(theory, canonicalize(lab, theory), pt)))
    elif isinstance(theory, HeisenbergTheory):
        for w in theory.sample_weights(cfg.samples, cfg.seed):
            values.append((f"rho={','.join(f'{x:.12g}' for x in w)}",
                           heis_qdim(theory, lab.lam, w)))
    result = {"label": render_label(lab),
              "values": [{"point": p, "value": _fmt_complex(v)} for p, v in values]}
    lines = [f"qdim {render_label(lab)}:"]
    lines += [f"  {p}: {v.real:.12g}{v.imag:+.12g}i" for p, v in values]
    rows = (["point", "re", "im"],
            [[p, f"{v.real:.12g}", f"{v.imag:.12g}"] for p, v in values])
    _emit(cfg, "qdim", result, lines, rows)
    return EXIT_OK


def cmd_resolve(cfg: RunConfig, args) -> int:
    theory = _build_theory(cfg)
    lab = parse_label(args.label)
    if isinstance(theory, sg.SingletTheory):
        lab = canonicalize(lab, theory, cfg.tol)
        if isinstance(lab, SingletAtom):
            res = sg.resolution_of_M(theory, lab.r, lab.s)
        else:
            res = sg.resolution_of_F(theory, lab.r, lab.s)
        qd = lambda l, sp: sg.qdim_A_fock(theory, l, sp)
        pt = theory.sample_points(1, cfg.seed, cfg.tol)[0]
        point_desc = {"mu": _fmt_float(pt.mu)}
    elif isinstance(theory, s2.Sl2Theory):
        lab = canonicalize(lab, theory, cfg.tol)
        if not isinstance(lab, Sl2DMinus):
            raise OutOfRange("resolve expects a non-standard simple (D-, D+ or L label)")
        res = s2.resolution_of_Dminus(theory, lab.ell, lab.r, lab.s)
        qd = lambda l, sp: s2.qdim_standard(theory, l, sp, cfg.tol)
        pt = theory.sample_points(1, cfg.seed, cfg.tol)[0]
        point_desc = {"l": pt.ell, "lam": _fmt_float(pt.lam), "r": pt.r, "s": pt.s}
    else:
        raise UnsupportedPair(f"resolve is not defined for theory {cfg.theory!r}")
    q = closed_form(res, qd, pt, cfg.tol)
    lim = double_limit(q, "tz", cfg.tol)
    doc = res.to_json_dict(render_label)
    doc["depth_preview"] = [
        [render_label(t.label) for t in s] for s in res.slots(args.depth)
    ]
    result = {
        "resolution": doc,
        "sample": {
            "point": point_desc,
            "pole_factor": _fmt_complex(q.pole) if q.pole is not None else None,
            "double_limit": _fmt_complex(lim),
        },
    }
    lines = [f"resolution of {doc['target']} (period {doc['period_length']}, "
             f"z-shift {doc['z_shift_per_period']})"]
    for i, s in enumerate(doc["depth_preview"]):
        lines.append(f"  slot {i}: " + " + ".join(s))
    lines.append(f"double limit at sample: {lim.real:.12g}{lim.imag:+.12g}i")
    _emit(cfg, "resolve", result, lines)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, args) -> int:
    theory = _build_theory(cfg)
    if args.suite not in checks.SUITES:
        sys.stderr.write(f"unknown suite {args.suite!r}; choose from "
                         f"{', '.join(checks.SUITES)}\n")
        return EXIT_PARSE
    suites = [args.suite]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        futures = [pool.submit(checks.run_suite, theory, s, seed=cfg.seed,
                               n_samples=cfg.samples, tol=cfg.tol) for s in suites]
        results = [r for f in futures for r in f.result()]
    results.sort(key=lambda r: r.name)
    ok = all(r.passed for r in results)
    result = {
        "all_passed": ok,
        "checks": [{
            "name": r.name,
            "passed": r.passed,
            "max_deviation": _fmt_float(r.max_deviation),
            "cases": r.cases,
            "threshold": _fmt_float(r.threshold),
            "note": r.note,
        } for r in results],
    }
    lines = [r.line() for r in results]
    lines.append("all checks passed" if ok else "FAILURES present")
    rows = (["name", "passed", "max_deviation", "cases"],
            [[r.name, r.passed, f"{r.max_deviation:.12g}", r.cases] for r in results])
    _emit(cfg, "verify", result, lines, rows)
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


# ---------------------------------------------------------------------------
# argument plumbing
# ---------------------------------------------------------------------------

def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--theory", choices=["minimal", "heisenberg", "pi0", "singlet", "sl2"])
    parser.add_argument("--u", type=int)
    parser.add_argument("--v", type=int)
    parser.add_argument("--p", type=int)
    parser.add_argument("--k", help="level as a fraction, e.g. -1/2 (alternative to --u/--v)")
    parser.add_argument("--heis-m", help="Gram matrix rows 'a,b;c,d'")
    parser.add_argument("--heis-b", help="shift vector 'a,b'")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--samples", type=int)
    parser.add_argument("--tol-round", type=float)
    parser.add_argument("--tol-limit", type=float)
    parser.add_argument("--tol-exclusion", type=float)
    parser.add_argument("--format", choices=["text", "json", "csv"])
    parser.add_argument("--output")
    parser.add_argument("--no-timestamp", action="store_true", default=None)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--config", help="key=value file mirroring these flags")


_DEFAULTS = {"seed": 42, "samples": 20, "tol_round": 1e-6, "tol_limit": 1e-8,
             "tol_exclusion": 1e-9, "format": "text", "workers": 4,
             "no_timestamp": False}


def _load_config_file(path: str) -> dict:
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise LabelParseError(f"bad config line {raw!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        out[key.replace("-", "_")] = val
    return out


def _resolve_config(args) -> RunConfig:
    file_vals = _load_config_file(args.config) if args.config else {}

    def pick(name: str, cast):
        val = getattr(args, name, None)
        if val is None and name in file_vals:
            val = cast(file_vals[name])
        if val is None:
            val = _DEFAULTS.get(name)
        return val

    theory = pick("theory", str)
    _need(theory is not None, "--theory is required")
    tol = Tolerance(pick("tol_round", float), pick("tol_limit", float),
                    pick("tol_exclusion", float))
    return RunConfig(
        theory=theory,
        u=pick("u", int), v=pick("v", int), p=pick("p", int), k=pick("k", str),
        heis_m=pick("heis_m", str), heis_b=pick("heis_b", str),
        seed=pick("seed", int), samples=pick("samples", int), tol=tol,
        fmt=pick("format", str), output=pick("output", str),
        timestamp=not pick("no_timestamp", lambda s: s.lower() in ("1", "true", "yes")),
        workers=pick("workers", int),
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="verlinde",
        description="fusion rules, S-kernels and quantum dimensions for "
                    "minimal-model, Heisenberg, Pi(0), singlet and sl2 theories",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fuse = sub.add_parser("fuse", help="fusion product of two labels")
    p_fuse.add_argument("x")
    p_fuse.add_argument("y")
    p_fuse.add_argument("--skip-check", action="store_true")
    _common(p_fuse)

    p_table = sub.add_parser("table", help="fusion table over a label window")
    p_table.add_argument("--r-range", metavar="LO:HI")
    p_table.add_argument("--s-range", metavar="LO:HI")
    p_table.add_argument("--l-range", metavar="LO:HI")
    p_table.add_argument("--lam-grid", metavar="X,Y,...")
    _common(p_table)

    p_qdim = sub.add_parser("qdim", help="quantum dimension of a label at sampled points")
    p_qdim.add_argument("label")
    _common(p_qdim)

    p_res = sub.add_parser("resolve", help="standard resolution of a label, serialized")
    p_res.add_argument("label")
    p_res.add_argument("--depth", type=int, default=6)
    _common(p_res)

    p_ver = sub.add_parser("verify", help="run a verification suite")
    p_ver.add_argument("suite", help=f"one of: {', '.join(checks.SUITES)}")
    _common(p_ver)

    return parser


_HANDLERS = {"fuse": cmd_fuse, "table": cmd_table, "qdim": cmd_qdim,
             "resolve": cmd_resolve, "verify": cmd_verify}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve_config(args)
        return _HANDLERS[args.command](cfg, args)
    except (LabelParseError, OutOfRange, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_PARSE
    except UnsupportedPair as exc:
        sys.stderr.write(f"unsupported pair: {exc}\n")
        return EXIT_UNSUPPORTED
    except (NotNearInteger, IncompleteBasis) as exc:
        sys.stderr.write(f"verification failure: {exc}\n")
        return EXIT_CROSSCHECK
    except CalculusError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CROSSCHECK


if __name__ == "__main__":
    sys.exit(main())
