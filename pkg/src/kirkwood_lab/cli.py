"""Command-line front end.

Subcommands: kirkwood, audit, oam, tomo, weaksim, bayes.  Every run writes a
manifest (subcommand, resolved config, seed, artifact checksums); all
randomness flows from the seed, so identical manifests mean byte-identical
data files.

Exit codes: 0 success (and admissible verdicts), 2 usage error,
3 inadmissible audit verdict, 4 numerical/domain error, 5 I/O error.
Errors are reported as one JSON object on stderr: {code, message, context}.

The environment variable KIRKWOOD_LAB_CONFIG may point at a JSON run config
({"out_dir", "format", "seed", "tolerances": {...}}); explicit flags win.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import quasiprob, scenarios, weaksim
from .audit import ComplexCurve, PlausibilityScale, Verdict, audit
from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import KirkwoodLabError
from .hilbert import (
    DensityMatrix,
    NAMED_BASES,
    OrthonormalBasis,
    StateVector,
    named_basis,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INADMISSIBLE = 3
EXIT_DOMAIN = 4
EXIT_IO = 5

ENV_CONFIG = "KIRKWOOD_LAB_CONFIG"


class _UsageError(Exception):
    pass


class _InputError(Exception):
    pass


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Resolved run configuration."""

    tolerances: Tolerances = DEFAULT_TOLERANCES
    out_dir: Path = Path(".")
    format: str = "json"
    seed: int = 0


def _fmt_float(x: float) -> str:
    # shortest round-trip decimal form (17 significant digits when needed)
    return repr(float(x))


class _ArtifactWriter:
    """Writes run artifacts and accumulates their checksums for the manifest."""

    def __init__(self, out_dir: Path) -> None:
        self.out_dir = out_dir
        self.checksums: dict[str, str] = {}
        out_dir.mkdir(parents=True, exist_ok=True)

    def _register(self, name: str, data: bytes) -> None:
        (self.out_dir / name).write_bytes(data)
        self.checksums[name] = hashlib.sha256(data).hexdigest()

    def write_json(self, name: str, payload) -> None:
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
        self._register(name, text.encode())

    def write_csv(self, name: str, header: list[str], rows) -> None:
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join(
                _fmt_float(v) if isinstance(v, float) else str(v) for v in row
            ))
        self._register(name, ("\n".join(lines) + "\n").encode())

    def finalize(self, subcommand: str, config: RunConfig, args: dict) -> None:
        manifest = {
            "subcommand": subcommand,
            "config": {
                "format": config.format,
                "seed": config.seed,
                "tolerances": dataclasses.asdict(config.tolerances),
            },
            "args": args,
            "artifacts": dict(sorted(self.checksums.items())),
        }
        text = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
        (self.out_dir / "manifest.json").write_bytes(text.encode())


# --- input loading ---------------------------------------------------------------

def _load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise _InputError(f"{path} is not valid JSON: {exc}") from exc


def _load_state(path: str) -> StateVector:
    payload = _load_json(path)
    try:
        return StateVector.from_dict(payload)
    except (KeyError, TypeError) as exc:
        raise _InputError(f"{path} is not a valid state file: {exc}") from exc


def _load_density(path: str) -> DensityMatrix:
    payload = _load_json(path)
    try:
        return DensityMatrix.from_dict(payload)
    except (KeyError, TypeError) as exc:
        raise _InputError(f"{path} is not a valid density file: {exc}") from exc


def _load_matrix(path: str) -> np.ndarray:
    payload = _load_json(path)
    try:
        from .hilbert import pairs_to_complex_matrix

        entries = pairs_to_complex_matrix(payload["entries"])
    except (KeyError, TypeError) as exc:
        raise _InputError(f"{path} is not a valid matrix file: {exc}") from exc
    if int(payload.get("dim", entries.shape[0])) != entries.shape[0]:
        raise _InputError(f"{path}: dim field does not match matrix size")
    return entries


def _resolve_basis(spec: str, dim: int) -> OrthonormalBasis:
    """A basis flag is either a built-in family name or a JSON file path."""
    if spec in NAMED_BASES:
        return named_basis(spec, dim)
    payload = _load_json(spec)
    try:
        basis = OrthonormalBasis.from_dict(payload)
    except (KeyError, TypeError) as exc:
        raise _InputError(f"{spec} is not a valid basis file: {exc}") from exc
    if basis.dim != dim:
        raise _UsageError(f"basis {spec} has dimension {basis.dim}, expected {dim}")
    return basis


def _parse_float_list(text: str, flag: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise _UsageError(f"{flag} expects a comma-separated list of numbers") from exc
    if not values:
        raise _UsageError(f"{flag} is empty")
    return values


# --- config resolution -------------------------------------------------------------

_CONFIG_KEYS = {"out_dir", "format", "seed", "tolerances"}


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    payload: dict = {}
    env_path = os.environ.get(ENV_CONFIG)
    if env_path:
        raw = _load_json(env_path)
        if not isinstance(raw, dict):
            raise _UsageError(f"{ENV_CONFIG} file must hold a JSON object")
        unknown = set(raw) - _CONFIG_KEYS
        if unknown:
            raise _UsageError(f"{ENV_CONFIG} has unknown keys: {sorted(unknown)}")
        payload = raw

    tol_overrides = payload.get("tolerances", {})
    if not isinstance(tol_overrides, dict):
        raise _UsageError("tolerances must be a JSON object")
    try:
        tolerances = DEFAULT_TOLERANCES.updated(**tol_overrides)
    except (TypeError, ValueError) as exc:
        raise _UsageError(f"bad tolerance override: {exc}") from exc

    out_dir = args.out_dir if args.out_dir is not None else payload.get("out_dir", ".")
    fmt = args.format if args.format is not None else payload.get("format", "json")
    if fmt not in ("json", "csv", "both"):
        raise _UsageError(f"format must be json, csv, or both, got {fmt!r}")
    seed = args.seed if args.seed is not None else int(payload.get("seed", 0))
    return RunConfig(tolerances=tolerances, out_dir=Path(out_dir), format=fmt, seed=seed)


# --- subcommand handlers -------------------------------------------------------------

def _cmd_kirkwood(args, config: RunConfig, writer: _ArtifactWriter) -> int:
    rho = _load_density(args.rho)
    basis_a = _resolve_basis(args.basis_a, rho.dim)
    basis_b = _resolve_basis(args.basis_b, rho.dim)
    table = quasiprob.kirkwood(rho, basis_a, basis_b)
    marg_a = quasiprob.marginal_over_b(table)
    marg_b = quasiprob.marginal_over_a(table)
    if config.format in ("json", "both"):
        writer.write_json("kirkwood.json", table.to_dict())
    if config.format in ("csv", "both"):
        writer.write_csv("kirkwood.csv", ["a_index", "b_index", "re", "im"],
                         quasiprob.kirkwood_csv_rows(table))
    total = complex(table.values.sum())
    writer.write_json("marginals.json", {
        "basis_a_probs": [float(p) for p in marg_a.probs],
        "basis_b_probs": [float(p) for p in marg_b.probs],
        "imag_residue": max(marg_a.imag_residue, marg_b.imag_residue),
        "total_sum": [total.real, total.imag],
    })
    return EXIT_OK


def _cmd_audit(args, config: RunConfig, writer: _ArtifactWriter) -> int:
    curves = []
    for path in args.curve:
        payload = _load_json(path)
        try:
            curves.append(ComplexCurve.from_dict(payload))
        except (KeyError, TypeError) as exc:
            raise _InputError(f"{path} is not a valid curve file: {exc}") from exc
    scale = PlausibilityScale(args.v_false, args.v_true)
    report = audit(
        curves, scale,
        intersection_tol=config.tolerances.intersection,
        closure_tol=config.tolerances.closure,
    )
    writer.write_json("audit.json", report.to_dict())
    return EXIT_OK if report.verdict is Verdict.ADMISSIBLE else EXIT_INADMISSIBLE


def _cmd_oam(args, config: RunConfig, writer: _ArtifactWriter) -> int:
    if args.sweep_delta is not None:
        tokens = [tok for tok in args.sweep_delta.split(",") if tok.strip() != ""]
        deltas = [(tok, float(tok)) for tok in tokens]
        if not deltas:
            raise _UsageError("--sweep-delta is empty")
    elif args.delta is not None:
        deltas = [(str(args.delta), args.delta)]
    else:
        raise _UsageError("oam needs --delta or --sweep-delta")

    entries = []
    worst_exit = EXIT_OK
    for token, delta in deltas:
        scenario = scenarios.OamScenario(dim=args.dim, m=args.m, n=args.n, delta=delta)
        curve = scenarios.oam_conditional(scenario)
        fit = scenarios.circle_fit(curve.points)
        report = audit(
            [curve],
            intersection_tol=config.tolerances.intersection,
            closure_tol=config.tolerances.closure,
        )
        suffix = f"_delta{token}" if len(deltas) > 1 else ""
        rows = [(float(t), float(z.real), float(z.imag))
                for t, z in zip(curve.param, curve.points)]
        if config.format in ("csv", "both"):
            writer.write_csv(f"oam_samples{suffix}.csv", ["phi", "re", "im"], rows)
        if config.format in ("json", "both"):
            writer.write_json(f"oam_samples{suffix}.json", curve.to_dict())
        entries.append({
            "delta": delta,
            "dim": args.dim,
            "m": args.m,
            "n": args.n,
            "fit_center": [fit.center.real, fit.center.imag],
            "fit_radius": fit.radius,
            "fit_rms_residual": fit.rms_residual,
            "expected_center": [scenario.expected_center, 0.0],
            "expected_radius": scenario.expected_radius,
            "verdict": report.verdict.value,
            "closure_gap": report.closure_gap,
        })
        if report.verdict is not Verdict.ADMISSIBLE:
            worst_exit = EXIT_INADMISSIBLE
    writer.write_json("oam_report.json", entries)
    return worst_exit


def _cmd_tomo(args, config: RunConfig, writer: _ArtifactWriter) -> int:
    rho = _load_density(args.rho)
    basis_a = _resolve_basis(args.basis_a, rho.dim)
    basis_b = _resolve_basis(args.basis_b, rho.dim)
    table = quasiprob.kirkwood(rho, basis_a, basis_b)
    recon = quasiprob.reconstruct_density(table)
    frob = float(np.linalg.norm(recon.entries - rho.entries))
    writer.write_json("reconstructed.json", recon.to_dict())
    writer.write_json("tomo_report.json", {
        "dim": rho.dim,
        "basis_a": basis_a.label,
        "basis_b": basis_b.label,
        "frobenius_error": frob,
    })
    return EXIT_OK


def _cmd_weaksim(args, config: RunConfig, writer: _ArtifactWriter) -> int:
    pre = _load_state(args.pre)
    post = _load_state(args.post)
    observable = _load_matrix(args.obs)
    shots = args.shots if args.shots is not None else 0

    if args.sweep_g is not None:
        gs = _parse_float_list(args.sweep_g, "--sweep-g")
        scenario = weaksim.WeakMeasurementScenario(
            pre=pre, post=post, observable=observable, coupling=gs[0]
        )
        records = weaksim.convergence_sweep(scenario, gs, shots=shots, seed=config.seed)
    else:
        if args.g is None:
            raise _UsageError("weaksim needs --g or --sweep-g")
        scenario = weaksim.WeakMeasurementScenario(
            pre=pre, post=post, observable=observable, coupling=args.g
        )
        if shots == 0:
            records = (weaksim.run_exact(scenario),)
        else:
            records = (weaksim.monte_carlo_run(scenario, shots, seed=config.seed),)

    if config.format in ("json", "both"):
        writer.write_json("weaksim_records.json", [r.to_dict() for r in records])
    if config.format in ("csv", "both"):
        rows = [(r.g, r.estimate.real, r.estimate.imag, r.exact.real, r.exact.imag,
                 r.error, r.stderr, r.shots, r.seed) for r in records]
        writer.write_csv(
            "weaksim_records.csv",
            ["g", "estimate_re", "estimate_im", "exact_re", "exact_im",
             "abs_error", "stderr", "shots", "seed"],
            rows,
        )
    return EXIT_OK


def _cmd_bayes(args, config: RunConfig, writer: _ArtifactWriter) -> int:
    prior_values = _parse_float_list(args.prior, "--prior")
    likelihood = _parse_float_list(args.likelihood, "--likelihood")
    prior = quasiprob.ClassicalDistribution(np.asarray(prior_values))
    posterior = quasiprob.bayes_update(prior, likelihood, evidence=args.evidence)
    print(",".join(f"{p:.6f}" for p in posterior.probs))
    writer.write_json("bayes.json", {
        "prior": prior_values,
        "likelihood": likelihood,
        "posterior": [float(p) for p in posterior.probs],
    })
    return EXIT_OK


# --- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", default=None, help="directory for run artifacts")
    common.add_argument("--format", default=None, choices=["json", "csv", "both"],
                        help="data file format (default json)")
    common.add_argument("--seed", type=int, default=None, help="RNG seed (default 0)")

    parser = argparse.ArgumentParser(
        prog="kirkwood-lab",
        description="Kirkwood quasiprobability tables and curve rankability audits",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("kirkwood", parents=[common],
                       help="joint quasiprobability table of a density matrix")
    p.add_argument("--rho", required=True, help="density matrix JSON file")
    p.add_argument("--basis-a", required=True, help="basis name or JSON file")
    p.add_argument("--basis-b", required=True, help="basis name or JSON file")
    p.set_defaults(handler=_cmd_kirkwood)

    p = sub.add_parser("audit", parents=[common],
                       help="rankability audit of one or more curves")
    p.add_argument("--curve", required=True, action="append",
                   help="curve JSON file (repeatable)")
    p.add_argument("--vf", dest="v_false", type=float, default=0.0,
                   help="scale false end (default 0)")
    p.add_argument("--vt", dest="v_true", type=float, default=1.0,
                   help="scale true end (default 1)")
    p.set_defaults(handler=_cmd_audit)

    p = sub.add_parser("oam", parents=[common],
                       help="phase-grid interference circle scenario")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--sweep-delta", default=None,
                   help="comma-separated list of overlaps")
    p.set_defaults(handler=_cmd_oam)

    p = sub.add_parser("tomo", parents=[common],
                       help="Kirkwood table round trip back to the density matrix")
    p.add_argument("--rho", required=True, help="density matrix JSON file")
    p.add_argument("--basis-a", required=True, help="basis name or JSON file")
    p.add_argument("--basis-b", required=True, help="basis name or JSON file")
    p.set_defaults(handler=_cmd_tomo)

    p = sub.add_parser("weaksim", parents=[common],
                       help="weak-value estimation on the qubit-meter model")
    p.add_argument("--pre", required=True, help="preselection state JSON file")
    p.add_argument("--post", required=True, help="postselection state JSON file")
    p.add_argument("--obs", required=True, help="Hermitian observable JSON file")
    p.add_argument("--g", type=float, default=None, help="coupling strength")
    p.add_argument("--sweep-g", default=None,
                   help="comma-separated decreasing couplings")
    p.add_argument("--shots", type=int, default=None,
                   help="meter readouts (0 or omitted = exact expectations)")
    p.set_defaults(handler=_cmd_weaksim)

    p = sub.add_parser("bayes", parents=[common], help="classical Bayes update")
    p.add_argument("--prior", required=True, help="comma-separated prior")
    p.add_argument("--likelihood", required=True, help="comma-separated likelihood")
    p.add_argument("--evidence", type=float, default=None,
                   help="explicit evidence term (checked against the contraction)")
    p.set_defaults(handler=_cmd_bayes)
    return parser


def _emit_error(code: str, message: str, context: dict) -> None:
    sys.stderr.write(json.dumps(
        {"code": code, "message": message, "context": context}, sort_keys=True
    ) + "\n")


def run(argv=None) -> int:
    """Parse argv, execute one subcommand, and return the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)

    try:
        config = _resolve_config(args)
        writer = _ArtifactWriter(config.out_dir)
        code = args.handler(args, config, writer)
        arg_record = {
            k: v for k, v in vars(args).items()
            if k not in ("handler", "out_dir", "format", "seed") and v is not None
        }
        writer.finalize(args.subcommand, config, arg_record)
        return code
    except _UsageError as exc:
        _emit_error("UsageError", str(exc), {})
        return EXIT_USAGE
    except _InputError as exc:
        _emit_error("InputError", str(exc), {})
        return EXIT_IO
    except KirkwoodLabError as exc:
        _emit_error(exc.code, str(exc), exc.context)
        return EXIT_DOMAIN
    except ValueError as exc:
        _emit_error("ValueError", str(exc), {})
        return EXIT_DOMAIN
    except OSError as exc:
        _emit_error("IOError", str(exc), {})
        return EXIT_IO


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
