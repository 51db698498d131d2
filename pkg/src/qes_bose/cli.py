"""Command-line front end.

Exit codes: 0 success, 1 unreadable or malformed configuration, 2 a
well-formed request that fails (sector not invariant, infeasible shape,
ill-defined ground state, oracle mismatch).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import conditions, model, oracle
from .config import ConfigError, RunConfig, config_document, load_config
from .errors import InvariantSubspaceViolated, QESError
from .multimode import match_product, product_from_config, product_spectrum
from .scan import ScanError, run_scan
from .spectra import merge_spectra, solve_sector
from .svg import levels_svg

EXIT_OK, EXIT_CONFIG, EXIT_FAIL = 0, 1, 2


def _num(x: float) -> str:
    # shortest string that round-trips to the same double
    return repr(float(x))


def spectrum_csv(result) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["index", "eigenvalue", "residual"])
    for i, (e, r) in enumerate(zip(result.eigenvalues, result.residuals)):
        writer.writerow([i, _num(e), _num(r)])
    return buf.getvalue()


def _emit(text: str, path: str | None):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def _sectors(cfg: RunConfig, which: str):
    sectors = cfg.select(which)
    if not sectors:
        raise ConfigError(f"configuration defines no {which!r} sector")
    return sectors


def _require_spec(cfg: RunConfig):
    if cfg.spec is None:
        raise ConfigError("configuration needs a 'hamiltonian' entry")
    return cfg.spec


def _spectrum(cfg: RunConfig, which: str, tol: float):
    spec = _require_spec(cfg)
    sectors = _sectors(cfg, which)
    return spec, sectors, merge_spectra(*(solve_sector(spec, s, tol) for s in sectors))


def cmd_validate(cfg: RunConfig, args) -> int:
    validity = model.validate_ground_state(_require_spec(cfg))
    print(f"{validity.status.value}: {validity.message}")
    return EXIT_FAIL if validity.status is model.Status.ILL_DEFINED else EXIT_OK


def cmd_conditions(cfg: RunConfig, args) -> int:
    shape = cfg.effective_shape()
    doc = conditions.report(shape, *_sectors(cfg, args.sector))
    doc["shape"] = list(shape)
    if cfg.spec is not None:
        doc["checks"] = [
            {"q": s.q, "r": s.r, "N": s.N, "closed": conditions.check_cutoff(cfg.spec, s)} for s in _sectors(cfg, args.sector)
        ]
    _emit(_json(doc), args.out)
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig, args) -> int:
    _, _, result = _spectrum(cfg, args.sector, args.tol or cfg.tol)
    _emit(spectrum_csv(result), args.out)
    doc = {"config": config_document(cfg), "sector_selection": args.sector, "spectrum": result.to_dict()}
    if args.json:
        Path(args.json).write_text(_json(doc))
    elif args.out:
        Path(args.out).with_suffix(".json").write_text(_json(doc))
    return EXIT_OK


def cmd_oracle(cfg: RunConfig, args) -> int:
    spec = _require_spec(cfg)
    tol = args.tol if args.tol is not None else cfg.oracle_tol
    ok = True
    reports = []
    for sector in _sectors(cfg, args.sector):
        result = solve_sector(spec, sector, cfg.tol)
        n_max = args.n_max or cfg.n_max or oracle.default_n_max(sector)
        rep = oracle.match_spectra(result, spec, n_max, tol)
        decoupled = oracle.block_decoupling_check(spec, sector, max(n_max, sector.particle_number(sector.N) + 1))
        print(f"sector q={sector.q} r={sector.r} N={sector.N}  n_max={n_max}  decoupled={decoupled}")
        print(rep.table())
        ok = ok and rep.ok and decoupled
        reports.append({"q": sector.q, "r": sector.r, "N": sector.N, "n_max": n_max, "decoupled": decoupled, **rep.to_dict()})
    if args.out:
        Path(args.out).write_text(_json({"config": config_document(cfg), "reports": reports}))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_scan(cfg: RunConfig, args) -> int:
    spec = _require_spec(cfg)
    if cfg.scan is None:
        raise ConfigError("configuration needs a 'scan' entry")
    sectors = _sectors(cfg, args.sector)
    rows = run_scan(spec, sectors, cfg.effective_shape(), cfg.scan, cfg.tol)
    width = len(rows[0][1].eigenvalues)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([cfg.scan.label] + [f"E{j}" for j in range(width)])
    for value, result in rows:
        writer.writerow([_num(value)] + [_num(e) for e in result.eigenvalues])
    _emit(buf.getvalue(), args.out)
    if args.svg:
        x = [float(v) for v, _ in rows]
        levels = [[res.eigenvalues[j] for _, res in rows] for j in range(width)]
        Path(args.svg).write_text(levels_svg(x, levels, xlabel=cfg.scan.label))
    return EXIT_OK


def cmd_multimode(cfg: RunConfig, args) -> int:
    if not cfg.modes or cfg.terms is None:
        raise ConfigError("configuration needs 'modes' and 'terms'")
    try:
        ph = product_from_config(cfg.modes, cfg.terms)
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid multimode configuration: {exc!r}") from exc
    result = product_spectrum(ph, cfg.tol)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["index", "eigenvalue", "residual", "m_a", "m_b"])
    for i, (e, r, lab) in enumerate(zip(result.eigenvalues, result.residuals, result.labels)):
        writer.writerow([i, _num(e), _num(r), *lab])
    _emit(buf.getvalue(), args.out)
    status = EXIT_OK
    if args.check:
        tol = args.tol if args.tol is not None else cfg.oracle_tol
        rep = match_product(result, ph, args.n_max, args.n_max, tol)
        print(rep.table(), file=sys.stderr)
        status = EXIT_OK if rep.ok else EXIT_FAIL
    if args.json:
        Path(args.json).write_text(_json({"config": config_document(cfg), "spectrum": result.to_dict()}))
    return status


COMMANDS = {
    "validate": cmd_validate,
    "conditions": cmd_conditions,
    "spectrum": cmd_spectrum,
    "oracle": cmd_oracle,
    "scan": cmd_scan,
    "multimode": cmd_multimode,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qes-bose", description="Quasi-exactly solvable sectors of anharmonic Bose Hamiltonians.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON configuration file")
        p.add_argument("--sector", choices=("even", "odd", "both"), default="both")
        p.add_argument("--n-max", type=int, default=None, help="Fock-space cutoff for oracle checks")
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--out", default=None, help="output path (stdout when omitted)")
        p.add_argument("--json", default=None, help="JSON output path")
        p.add_argument("--svg", default=None, help="SVG plot path (scan)")
        if name == "multimode":
            p.add_argument("--check", action="store_true", help="certify against the two-mode Fock oracle")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantSubspaceViolated as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (ScanError, QESError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
