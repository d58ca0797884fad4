"""Command-line front end: ``rgme compute | sweep | verify | search``.

Exit codes: 0 ok, 1 verification failure, 2 bad input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import measures as M
from .linalg import DensityMatrix, PureState
from .separable import SearchConfig, max_fidelity_separable, rgme_numeric
from .states import FamilyTag, StateFamily, load_state
from .verify import DEFAULT_VERIFY_SEARCH, SUITES, run_suites, summary_table

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3


class InputError(ValueError):
    pass


# -- measure dispatch -----------------------------------------------------------------------


def _need_family(name, family, *tags):
    if family is None or (tags and family.tag not in tags):
        allowed = ", ".join(t.value for t in tags) if tags else "a family state"
        raise InputError(f"measure {name!r} needs {allowed}")


def _gme(rho: DensityMatrix, family, seed):
    if family is not None and family.tag is FamilyTag.Isotropic:
        return M.MeasureReport("gme", M.gme_isotropic(family["d"], family["alpha"]), family=family)
    w, v = np.linalg.eigh(rho.matrix)
    if w[-1] > 1 - 1e-10:
        return M.gme_pure(PureState.normalized(v[:, -1], rho.dims), seed=seed)
    if rho.dims == (2, 2):
        return M.MeasureReport("gme", M.gme_two_qubit(rho))
    raise InputError("gme is available for pure states, two-qubit states and isotropic families")


def compute_measure(name: str, rho: DensityMatrix, family: StateFamily | None,
                    cfg: SearchConfig, seed: int = 0) -> M.MeasureReport:
    """Evaluate one named measure; raises :class:`InputError` if it does not apply."""
    if name == "rgme_closed":
        _need_family(name, family)
        return M.rgme_closed(family)
    if name == "rgme_numeric":
        return rgme_numeric(rho, cfg)
    if name == "rgme":
        try:
            rep = M.rgme_closed(family) if family is not None else rgme_numeric(rho, cfg)
        except M.UncoveredFamilyError:
            rep = rgme_numeric(rho, cfg)
        rep.measure = "rgme"
        return rep
    if name == "gme":
        rep = _gme(rho, family, seed)
        rep.family = family
        return rep
    if name == "re_closed":
        _need_family(name, family)
        return M.MeasureReport(name, M.re_closed(family), family=family)
    if name == "re":
        _need_family(name, family)
        sigma = family.re_closest_sep()
        if sigma is None:
            raise InputError(f"no relative-entropy closest state for {family.tag.value}")
        return M.MeasureReport(name, M.relative_entropy(rho, sigma), sigma, family)
    if name == "negativity":
        return M.MeasureReport(name, M.negativity(rho), family=family)
    if name == "concurrence":
        if rho.dims != (2, 2):
            raise InputError("concurrence needs a 2 x 2 state")
        return M.MeasureReport(name, M.concurrence(rho), family=family)
    if name == "entropy":
        return M.MeasureReport(name, M.von_neumann_entropy(rho), family=family)
    if name in ("eof", "iconcurrence"):
        _need_family(name, family, FamilyTag.Isotropic)
        fn = M.eof_isotropic if name == "eof" else M.iconcurrence_isotropic
        return M.MeasureReport(name, fn(family["d"], family["alpha"]), family=family)
    raise InputError(f"unknown measure {name!r}; choose from {MEASURES}")


MEASURES = ["rgme_closed", "rgme_numeric", "rgme", "gme", "re_closed", "re",
            "negativity", "concurrence", "entropy", "eof", "iconcurrence"]


# -- argument helpers --------------------------------------------------------------------------


def parse_params(tokens) -> dict:
    """``["d=2", "alpha=0.5"]`` or ``["d=2,alpha=0.5"]`` -> dict of floats."""
    out = {}
    for tok in tokens or []:
        for part in tok.split(","):
            if not part.strip():
                continue
            if "=" not in part:
                raise InputError(f"parameter {part!r} is not key=value")
            k, v = part.split("=", 1)
            try:
                out[k.strip()] = float(v)
            except ValueError:
                raise InputError(f"parameter {k}={v!r} is not a number") from None
    return out


@dataclass
class SweepGrid:
    """Cartesian parameter grid; the first axis varies slowest."""

    family: FamilyTag
    axes: list
    fixed: dict = field(default_factory=dict)
    measures: list = field(default_factory=list)
    out: str | None = None

    @staticmethod
    def parse_axes(spec: str) -> list:
        """``"alpha=0:1:21,d=2:4:3"`` -> ``[("alpha", 0, 1, 21), ("d", 2, 4, 3)]``."""
        axes = []
        for part in spec.split(","):
            if not part.strip():
                continue
            try:
                name, rng = part.split("=", 1)
                start, stop, count = rng.split(":")
                axis = (name.strip(), float(start), float(stop), int(count))
            except ValueError:
                raise InputError(f"grid axis {part!r} is not name=start:stop:count") from None
            if axis[3] < 2:
                raise InputError(f"grid axis {axis[0]!r} needs count >= 2")
            axes.append(axis)
        if not axes:
            raise InputError("empty grid")
        return axes

    def points(self):
        values = [np.linspace(a, b, n) for _, a, b, n in self.axes]
        names = [ax[0] for ax in self.axes]
        for combo in itertools.product(*values):
            yield dict(zip(names, (float(c) for c in combo)))


def _load_config(path) -> dict:
    if not path:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise InputError("config file must hold a JSON object")
    return cfg


def _search_config(args, file_cfg, base: SearchConfig | None = None) -> SearchConfig:
    data = (base or SearchConfig()).to_dict()
    data.update(file_cfg.get("search", {}))
    if args.seed is not None:
        data["seed"] = args.seed
    try:
        return SearchConfig.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad search settings: {exc}") from None


def _seed(args, file_cfg) -> int:
    return args.seed if args.seed is not None else int(file_cfg.get("seed", 0))


def _state_from_args(args):
    if args.state and args.family:
        raise InputError("give either --state or --family, not both")
    if args.state:
        try:
            with open(args.state) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read state {args.state}: {exc}") from None
        return load_state(data)
    if args.family:
        fam = StateFamily(FamilyTag.parse(args.family), parse_params(args.params))
        return fam.state(), fam
    raise InputError("need --state or --family")


def _measures(args, file_cfg, default=None) -> list:
    raw = args.measures or ",".join(file_cfg.get("measures", [])) or default
    if not raw:
        raise InputError("need --measures")
    names = [m.strip() for m in raw.split(",") if m.strip()]
    bad = [m for m in names if m not in MEASURES]
    if bad:
        raise InputError(f"unknown measures {bad}; choose from {MEASURES}")
    return names


def _emit(text: str, out):
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _check_finite(value, what):
    if isinstance(value, float) and math.isnan(value):
        raise FloatingPointError(f"{what} evaluated to NaN")


# -- subcommands ---------------------------------------------------------------------------------


def cmd_compute(args) -> int:
    file_cfg = _load_config(args.config)
    rho, family = _state_from_args(args)
    cfg = _search_config(args, file_cfg)
    reports = []
    for name in _measures(args, file_cfg):
        rep = compute_measure(name, rho, family, cfg, _seed(args, file_cfg))
        _check_finite(rep.value, name)
        reports.append(rep.to_dict())
    _emit(json.dumps(reports, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    file_cfg = _load_config(args.config)
    if not args.family:
        raise InputError("sweep needs --family")
    grid_spec = args.grid or file_cfg.get("grid")
    if not grid_spec:
        raise InputError("sweep needs --grid")
    grid = SweepGrid(FamilyTag.parse(args.family), SweepGrid.parse_axes(grid_spec),
                     parse_params(args.params), _measures(args, file_cfg), args.out)
    cfg = _search_config(args, file_cfg)
    seed = _seed(args, file_cfg)
    writer_rows = [[ax[0] for ax in grid.axes] + grid.measures]
    for point in grid.points():
        fam = StateFamily(grid.family, {**grid.fixed, **point})
        rho = fam.state()
        row = [point[ax[0]] for ax in grid.axes]
        for name in grid.measures:
            v = compute_measure(name, rho, fam, cfg, seed).value
            _check_finite(v, name)
            row.append(v)
        writer_rows.append(row)
    lines = []
    for row in writer_rows:
        lines.append(",".join(x if isinstance(x, str) else "%.12g" % x for x in row))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    file_cfg = _load_config(args.config)
    cfg = _search_config(args, file_cfg, DEFAULT_VERIFY_SEARCH)
    suites = [s.strip() for s in (args.suite or "all").split(",") if s.strip()]
    try:
        results = run_suites(suites, _seed(args, file_cfg), cfg)
    except KeyError as exc:
        raise InputError(str(exc)) from None
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            json.dump([r.to_dict() for r in results], fh, indent=2)
            fh.write("\n")
    print(summary_table(results))
    failed = [r for r in results if not r.passed]
    for r in results:
        if r.skipped:
            print(f"SKIP {r.claim_id} {r.instance}: {r.skipped}")
    if failed:
        print(f"\n{len(failed)} failing claims:", file=sys.stderr)
        for r in failed:
            print(f"FAIL {r.claim_id} {r.instance} lhs={r.lhs:.12g} rhs={r.rhs:.12g} "
                  f"margin={r.margin:.4g}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_search(args) -> int:
    file_cfg = _load_config(args.config)
    rho, _ = _state_from_args(args)
    cfg = _search_config(args, file_cfg)
    F, witness, diag = max_fidelity_separable(rho, cfg)
    _check_finite(F, "F_max")
    summary = {"F_max": F, "rgme": 1 - F * F, "diagnostics": diag}
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            json.dump(dict(summary, witness=witness.to_json()), fh, indent=2)
            fh.write("\n")
    print(json.dumps(summary, indent=2))
    return EXIT_OK


# -- entry point -------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rgme", description="Fidelity-based entanglement measures.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, state=True):
        if state:
            sp.add_argument("--family", help=f"one of {[t.value for t in FamilyTag]}")
            sp.add_argument("--params", nargs="*", default=[], metavar="K=V",
                            help="family parameters, e.g. d=2 alpha=0.5")
            sp.add_argument("--state", help="state JSON file")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--config", help="JSON config with a 'search' section")
        sp.add_argument("--out", help="output path (default stdout)")

    sp = sub.add_parser("compute", help="evaluate measures for one state")
    common(sp)
    sp.add_argument("--measures", help=f"comma list from {MEASURES}")
    sp.set_defaults(func=cmd_compute)

    sp = sub.add_parser("sweep", help="CSV of measures over a parameter grid")
    common(sp)
    sp.add_argument("--grid", help="name=start:stop:count[,...]")
    sp.add_argument("--measures", help=f"comma list from {MEASURES}")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("verify", help="run claim suites")
    common(sp, state=False)
    sp.add_argument("--suite", help=f"comma list from {['all'] + list(SUITES)}")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("search", help="numerical closest separable state")
    common(sp)
    sp.set_defaults(func=cmd_search)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
