"""Command-line entry point: census, lacunas, monodromy, volume, plot.

Exit codes: 0 success, 2 usage, 3 degenerate input, 4 expectation mismatch.
JSON is written with sorted keys; CSV follows RFC 4180 via the csv module.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import subprocess
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .atlas import SCHEMA_VERSION, CensusCache, census, stabilized_census
from .families import Deformation, Family, SingularityClass, WallError, parse_class, require_off_walls
from .monodromy import (
    CycleVector,
    coupling_blocks,
    dot_graph,
    eta_matrix,
    generator,
    is_indecomposable,
    obstruction,
    rank_report,
)

EXIT_OK, EXIT_USAGE, EXIT_DEGENERATE, EXIT_MISMATCH = 0, 2, 3, 4


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    family: str = "B"
    k: int | None = None
    sign: str = "+"
    stab: tuple[int, int] = (0, 0)
    seed: int | None = None
    budget: int | None = None
    lam: str | None = None
    c: float = 0.0
    c_range: str = "0:1"
    c_steps: int = 11
    side: int = 1
    tol: float = 1e-10
    pi: str | None = None
    coupling: str | None = None
    max_length: int = 6
    out: str | None = None
    csv: str | None = None
    svg: str | None = None
    dot: str | None = None
    cache: str | None = None
    extra: dict = field(default_factory=dict)

    def singularity(self) -> SingularityClass:
        try:
            return parse_class(self.family, self.k if self.k is not None else 4, self.sign, self.stab)
        except (ValueError, KeyError) as exc:
            raise UsageError(str(exc)) from exc

    def header(self) -> dict:
        cfg = {k: v for k, v in asdict(self).items() if k != "extra"}
        cfg["stab"] = list(self.stab)
        return {"schema": SCHEMA_VERSION, "build": build_id(), "config": cfg}


def build_id() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=Path(__file__).resolve().parent, capture_output=True, text=True, timeout=5,
        )
        return out.stdout.strip() or "unknown"
    except (OSError, subprocess.SubprocessError):
        return "unknown"


def _emit_json(payload: dict, path: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _ints(text: str | None) -> list[int] | None:
    if text is None:
        return None
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc


def _lam(cfg: RunConfig, cls: SingularityClass) -> Deformation:
    if cfg.lam is None:
        raise UsageError("--lambda is required")
    try:
        lam = Deformation.parse(cfg.lam)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"cannot parse --lambda {cfg.lam!r}") from exc
    if len(lam) != cls.planar().dim:
        raise UsageError(f"{cls.label} needs {cls.planar().dim} deformation parameters, got {len(lam)}")
    return lam


# ---------------------------------------------------------------- subcommands


CENSUS_COLUMNS = ["family", "k", "sign", "r", "s", "signature", "is_lacuna", "witness"]


def _write_csv(rows: list[list], path: str | None) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerows(rows)
    if path:
        Path(path).write_text(buf.getvalue(), encoding="utf-8", newline="")
    else:
        sys.stdout.write(buf.getvalue())


def _planar_census(cfg: RunConfig, cls: SingularityClass) -> dict:
    cache = CensusCache(cfg.cache) if cfg.cache else None
    payload = cache.get(cls, cfg.seed, cfg.budget) if cache else None
    if payload is None:
        payload = census(cls, cfg.budget, cfg.seed).to_json()
        if cache:
            cache.put(cls, cfg.seed, cfg.budget, payload)
    return payload


def run_census(cfg: RunConfig) -> int:
    """Chamber and lacuna counts; with --stab the lacuna verdicts are the stabilized ones."""
    cls = cfg.singularity()
    planar = _planar_census(cfg, cls.planar())
    fam, k = cls.family.value, (cls.k if cls.family is not Family.F4 else "")
    sign, (r, s) = ("+" if cls.sign > 0 else "-"), cls.stab
    rows = [CENSUS_COLUMNS]
    if cls.is_stabilized:
        records = census(cls.planar(), cfg.budget, cfg.seed).records
        stab = stabilized_census(cls, records)
        for rec, (sig, lac, _) in zip(records, stab.verdicts):
            rows.append([fam, k, sign, r, s, str(sig), int(lac), " ".join(rec.witness.to_json())])
        lacunas, lacunas_expected = stab.lacuna_count, stab.expected_lacunas
    else:
        for rec in planar["records"]:
            rows.append([fam, k, sign, r, s, rec["signature"]["text"], int(rec["is_lacuna"]),
                         " ".join(rec["witness"])])
        lacunas, lacunas_expected = planar["lacunas"], planar["lacunas_expected"]
    summary = {
        "class": cls.label,
        "family": fam,
        "k": cls.k if cls.family is not Family.F4 else None,
        "sign": sign,
        "r": r,
        "s": s,
        "components": planar["components"],
        "components_expected": planar["components_expected"],
        "lacunas": lacunas,
        "lacunas_expected": lacunas_expected,
        "samples": planar["samples"],
        "status": planar["status"],
    }
    ok = (summary["components"], summary["lacunas"]) == (summary["components_expected"], lacunas_expected)
    if cfg.csv:
        _write_csv(rows, cfg.csv)
    _emit_json({**cfg.header(), "result": summary, "matches_expected": ok}, cfg.out)
    return EXIT_OK if ok else EXIT_MISMATCH


def run_lacunas(cfg: RunConfig) -> int:
    cls = cfg.singularity()
    if cls.is_stabilized:
        res = stabilized_census(cls, census(cls.planar(), cfg.budget, cfg.seed).records)
        result = res.to_json()
        ok = res.matches_expected
    else:
        res = census(cls, cfg.budget, cfg.seed)
        result = {
            "class": cls.label,
            "lacunas": res.lacuna_count,
            "lacunas_expected": res.expected_lacunas,
            "lacuna_chambers": [
                {"signature": r.signature.to_json(), "witness": r.witness.to_json()}
                for r in res.records if r.is_lacuna
            ],
        }
        ok = res.matches_expected
    _emit_json({**cfg.header(), "result": result, "matches_expected": ok}, cfg.out)
    return EXIT_OK if ok else EXIT_MISMATCH


def run_monodromy(cfg: RunConfig) -> int:
    cls = cfg.singularity()
    if cls.is_stabilized:
        raise UsageError("monodromy matrices are modelled for planar classes only")
    model = eta_matrix(cls)
    result = {
        "model": model.to_json(),
        "generators": {str(i): generator(model, i).tolist() for i in range(1, model.dim + 1)},
        "indecomposable": is_indecomposable(model),
        "blocks": coupling_blocks(model),
        "rank_report": rank_report(cls).to_json(),
    }
    pi, cpl = _ints(cfg.pi), _ints(cfg.coupling)
    if pi is not None or cpl is not None:
        pi = pi or [0] * model.dim
        if len(pi) != model.dim or (cpl is not None and len(cpl) != model.dim):
            raise UsageError(f"cycle vectors for {cls.label} have length {model.dim}")
        vec = CycleVector(pi, cpl)
        if vec.is_zero():
            raise UsageError("--pi must be nonzero")
        result["obstruction"] = obstruction(model, vec, cfg.max_length).to_json()
    else:
        result["obstruction_by_generator"] = {
            str(i): obstruction(model, CycleVector.basis(model.dim, i), cfg.max_length).to_json()
            for i in range(1, model.dim + 1)
        }
    if cfg.dot:
        Path(cfg.dot).write_text(dot_graph(model) + "\n", encoding="utf-8")
    _emit_json({**cfg.header(), "result": result}, cfg.out)
    return EXIT_OK


def _c_grid(cfg: RunConfig) -> list[float]:
    parts = cfg.c_range.split(":")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        n = int(parts[2]) if len(parts) > 2 else cfg.c_steps
    except (ValueError, IndexError) as exc:
        raise UsageError(f"--c-range must look like lo:hi[:steps], got {cfg.c_range!r}") from exc
    if n < 2 or hi <= lo:
        raise UsageError("--c-range needs lo < hi and at least 2 steps")
    return [float(v) for v in np.linspace(lo, hi, n)]


def run_volume(cfg: RunConfig) -> int:
    from .volume import ramification_probe, volume_series

    cls = cfg.singularity()
    if cls.is_stabilized:
        raise UsageError("volume functions are computed at n = 2 only")
    lam = _lam(cfg, cls)
    require_off_walls(cls, lam)
    series = volume_series(cls, lam, _c_grid(cfg), cfg.side, cfg.tol)
    rows = [["c", "V", "dV_dc"]]
    rows += [[repr(v) for v in row] for row in zip(series.c, series.values, series.derivatives)]
    _write_csv(rows, cfg.csv)
    report = ramification_probe(cls, lam)
    payload = {**cfg.header(), "series": series.to_json(), "monotone": series.monotone(),
               "ramification": report.to_json()}
    if cfg.out:
        _emit_json(payload, cfg.out)
    if cfg.svg:
        render_svg(cls, lam, series.c[len(series.c) // 2], cfg.side, cfg.svg)
    return EXIT_OK


def run_plot(cfg: RunConfig) -> int:
    cls = cfg.singularity()
    lam = _lam(cfg, cls)
    require_off_walls(cls, lam)
    if not cfg.svg:
        raise UsageError("plot needs --svg")
    render_svg(cls, lam, cfg.c, cfg.side, cfg.svg)
    return EXIT_OK


def render_svg(cls: SingularityClass, lam: Deformation, c: float, side: int, path: str) -> None:
    """Level curve f = c, the S-avoiding regions on ``side``, and S."""
    import matplotlib

    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    from .volume import region_components

    regions = region_components(cls, lam, c, side)
    fig, ax = plt.subplots(figsize=(5, 5))
    if regions:
        grid = regions[0].grid
        keep = [r.label for r in regions if not r.touches_S]
        mask = np.isin(grid.labels, keep)
        ax.contourf(grid.xs, grid.ys, mask.astype(float), levels=[0.5, 1.5], colors=["#9ecae1"])
        ax.contour(grid.xs, grid.ys, grid.values, levels=[0.0], colors="k", linewidths=1)
        ax.set_xlim(grid.xs[0], grid.xs[-1])
        ax.set_ylim(grid.ys[0], grid.ys[-1])
    ax.axvline(0.0, color="#d62728", linewidth=1)
    ax.set_title(f"{cls.label}  c = {c:g}")
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


COMMANDS = {
    "census": run_census,
    "lacunas": run_lacunas,
    "monodromy": run_monodromy,
    "volume": run_volume,
    "plot": run_plot,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="boundary-lacunas", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, seed_required=False):
        p.add_argument("--family", required=True, choices=[f.value for f in Family])
        p.add_argument("--k", type=int, default=None)
        p.add_argument("--sign", default="+", choices=["+", "-"])
        p.add_argument("--stab", default="0,0", help="stabilization inertia r,s")
        p.add_argument("--out", help="JSON output path (default stdout)")
        if seed_required:
            p.add_argument("--seed", type=int, required=True)
            p.add_argument("--budget", type=int, default=None)

    p = sub.add_parser("census", help="count chambers and lacunas")
    common(p, seed_required=True)
    p.add_argument("--csv", help="per-chamber CSV output path")
    p.add_argument("--cache", help="directory for cached census JSON")

    p = sub.add_parser("lacunas", help="lacuna list, or stabilized count with --stab")
    common(p, seed_required=True)

    p = sub.add_parser("monodromy", help="eta matrix, generators, indecomposability, obstruction")
    common(p)
    p.add_argument("--pi", help="cycle coefficients, comma separated")
    p.add_argument("--coupling", help="coupling vector of a class outside the span")
    p.add_argument("--max-length", type=int, default=6)
    p.add_argument("--dot", help="write the coupling graph as DOT")

    p = sub.add_parser("volume", help="V(c) and dV/dc as CSV plus a ramification report")
    common(p)
    p.add_argument("--lambda", dest="lam", required=True, help="lam_0,lam_1,... (rationals allowed)")
    p.add_argument("--c-range", default="0:1")
    p.add_argument("--side", type=int, default=1, choices=[1, -1])
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--csv", help="CSV output path (default stdout)")
    p.add_argument("--svg")

    p = sub.add_parser("plot", help="SVG of the level curve and S-avoiding regions")
    common(p)
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("--side", type=int, default=1, choices=[1, -1])
    p.add_argument("--svg", required=True)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    stab = _ints(ns.stab) or [0, 0]
    if len(stab) != 2 or min(stab) < 0:
        raise UsageError("--stab must be r,s with r, s >= 0")
    fields = {k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__ and v is not None}
    fields["stab"] = (stab[0], stab[1])
    if ns.family == "F4" and ns.k not in (None, 4):
        raise UsageError("F4 has no index; omit --k")
    if ns.family in ("B", "C") and ns.k is None:
        raise UsageError(f"--k is required for family {ns.family}")
    return RunConfig(**fields)


def run(cfg: RunConfig) -> int:
    from .volume import LevelError, PoleError

    try:
        return COMMANDS[cfg.subcommand](cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (WallError, LevelError, PoleError) as exc:
        print(f"degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


VALUE_FLAGS = ("--lambda", "--c-range", "--pi", "--coupling")


def _glue_values(argv: list[str]) -> list[str]:
    """Join value flags to their argument so that "--lambda -1,0" parses."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] in VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(_glue_values(list(sys.argv[1:] if argv is None else argv)))
    try:
        cfg = config_from_args(ns)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
