"""Command-line front end.

Exit codes: 0 success, 1 I/O or parse error, 2 semantic validation failure,
3 invariant-suite failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .channels import ChannelChain, is_cptp
from .linalg import ATOL, Operator, hermitian_spectrum
from .quasiprob import conditional, from_qsot, negativity
from .scenarios import LG_VECTORS, LeggettGargConfig, lg_run, maximally_mixed, nonmarkov_demo
from .serialize import (
    chain_from_json,
    complex_json,
    distribution_to_json,
    dumps,
    load_json,
    operator_from_json,
    povm_from_json,
    qsot_to_json,
)
from .snapshot import ObservableChain, expectation_direct, expectation_factored
from .star import ExtensionPolicy, StarKind, marginal_check, star
from .verify import SABOTAGE_TARGETS, results_json, run_suite

EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_SUITE = 0, 1, 2, 3


class InputError(Exception):
    """Unreadable or malformed input (exit 1)."""


def _read(path) -> object:
    try:
        return load_json(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc


def _parse(fn, obj, what: str):
    try:
        return fn(obj)
    except (KeyError, TypeError, AttributeError) as exc:
        raise InputError(f"malformed {what}: {exc}") from exc


def _policy(text: str | None) -> ExtensionPolicy:
    if text is None or text.lower() == "markovian":
        return ExtensionPolicy()
    bits = text.split(":", 1)[1] if text.lower().startswith("holistic:") else text
    return ExtensionPolicy(bits)


def _meta(args, **extra) -> dict:
    meta = {
        "tool": "qsot",
        "version": __version__,
        "command": args.command,
        "seed": getattr(args, "seed", None),
        "tol": args.tol,
    }
    meta.update(extra)
    return meta


def _emit(args, text: str) -> None:
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            raise InputError(f"cannot write {args.out}: {exc.strerror or exc}") from exc
    else:
        sys.stdout.write(text)


def _load_problem(args):
    """Kind, policy, chain and initial state from --input or --kind/--policy/--chain/--rho."""
    cfg = _read(args.input) if args.input else {}
    kind = args.kind or cfg.get("kind") or "fp"
    policy = _policy(args.policy) if args.policy else ExtensionPolicy.from_json(cfg.get("policy"))
    if args.chain:
        chain_obj = _read(args.chain)
    elif "chain" in cfg:
        chain_obj = cfg["chain"]
    else:
        raise InputError("no channel chain given (use --chain or --input)")
    if args.rho:
        rho_obj = _read(args.rho)
    elif "rho" in cfg:
        rho_obj = cfg["rho"]
    else:
        raise InputError("no initial state given (use --rho or --input)")
    chain = _parse(chain_from_json, chain_obj, "chain")
    rho = _parse(operator_from_json, rho_obj, "state")
    return StarKind.parse(kind), policy, chain, rho


def _validate(chain: ChannelChain, rho: Operator, tol: float) -> None:
    for k, e in enumerate(chain):
        rep = is_cptp(e, tol)
        if not rep.ok:
            raise ValueError(
                f"channel {k} is not CPTP (tp_defect={rep.tp_defect:.3g}, min_choi_eig={rep.min_choi_eig:.3g})"
            )
    if rho.dim != chain.dims[0]:
        raise ValueError(f"state dimension {rho.dim} does not match chain input {chain.dims[0]}")
    if not rho.is_psd(tol) or abs(rho.trace() - 1) > tol:
        raise ValueError("initial state must be a unit-trace positive semidefinite operator")


def _structure_report(q, chain, rho, tol) -> dict:
    op = q.op
    herm = op.hermitian_defect()
    rep = {
        "trace": complex_json(op.trace()),
        "hermitian_defect": herm,
        "min_eigenvalue": float(hermitian_spectrum(op, max(tol, herm))[-1]) if herm <= tol else None,
        "min_eigenvalue_hermitian_part": float(np.linalg.eigvalsh(0.5 * (op.data + op.data.conj().T)).min()),
        "marginal_defect": marginal_check(q, chain, rho, tol).max_defect,
        "canonical": q.policy.markovian,
    }
    return rep


def cmd_qsot(args) -> int:
    kind, policy, chain, rho = _load_problem(args)
    _validate(chain, rho, args.tol)
    q = star(kind, chain, rho, policy)
    report = {
        "meta": _meta(args, kind=kind.value, policy=policy.to_json()),
        "qsot": qsot_to_json(q),
        "report": _structure_report(q, chain, rho, args.tol),
    }
    _emit(args, dumps(report))
    return EXIT_OK


def cmd_spectrum(args) -> int:
    if args.op:
        op = _parse(operator_from_json, _read(args.op), "operator")
        meta = _meta(args)
    else:
        kind, policy, chain, rho = _load_problem(args)
        _validate(chain, rho, args.tol)
        op = star(kind, chain, rho, policy).op
        meta = _meta(args, kind=kind.value, policy=policy.to_json())
    eig = hermitian_spectrum(op, args.tol)
    _emit(args, dumps({"meta": meta, "eigenvalues": [float(x) for x in eig], "min_eigenvalue": float(eig[-1])}))
    return EXIT_OK


def _load_povms(path) -> list:
    obj = _read(path)
    if isinstance(obj, dict):
        obj = obj.get("povms", obj)
    if not isinstance(obj, list):
        raise InputError("POVM file must hold a list of POVMs or {\"povms\": [...]}")
    return [_parse(povm_from_json, p, "POVM") for p in obj]


def cmd_quasiprob(args) -> int:
    kind, policy, chain, rho = _load_problem(args)
    _validate(chain, rho, args.tol)
    povms = _load_povms(args.povms)
    qd = from_qsot(star(kind, chain, rho, policy), povms)
    if args.format == "csv":
        _emit(args, qd.to_csv())
    else:
        report = {
            "meta": _meta(args, kind=kind.value, policy=policy.to_json()),
            "distribution": distribution_to_json(qd),
            "total": complex_json(qd.total()),
            "negativity": negativity(qd),
            "min_real": qd.min_real,
        }
        _emit(args, dumps(report))
    return EXIT_OK


def cmd_snapshot(args) -> int:
    kind, policy, chain, rho = _load_problem(args)
    if not policy.markovian:
        raise ValueError("snapshot factorization is defined for the Markovian extension only")
    _validate(chain, rho, args.tol)
    obj = _read(args.obs)
    if isinstance(obj, dict):
        obj = obj.get("observables", obj)
    obs = ObservableChain(_parse(lambda xs: [operator_from_json(x) for x in xs], obj, "observables"))
    out = {"meta": _meta(args, kind=kind.value, policy=policy.to_json())}
    direct = factored = None
    if args.mode in ("direct", "both"):
        direct = expectation_direct(kind, chain, rho, obs)
        out["direct"] = complex_json(direct)
    if args.mode in ("factored", "both"):
        factored = expectation_factored(kind, chain, rho, obs)
        out["factored"] = complex_json(factored)
    if direct is not None and factored is not None:
        out["defect"] = abs(direct - factored)
    _emit(args, dumps(out))
    return EXIT_OK


def cmd_lg(args) -> int:
    rho = _parse(operator_from_json, _read(args.rho), "state") if args.rho else maximally_mixed(2)
    vectors = LG_VECTORS
    if args.vectors:
        obj = _read(args.vectors)
        vectors = obj.get("vectors") if isinstance(obj, dict) else obj
    cfg = LeggettGargConfig(bloch_vectors=tuple(tuple(v) for v in vectors), rho=rho)
    rep = lg_run(cfg, args.tol)
    out = {
        "meta": _meta(args, kind="fp", policy={"markovian": True}),
        "bloch_vectors": [list(v) for v in cfg.bloch_vectors],
        "C12": rep.C12,
        "C23": rep.C23,
        "C13": rep.C13,
        "lg_sum": rep.lg_sum,
        "violated": rep.violated,
        "qsot_correlators": rep.qsot_correlators,
        "P": rep.P,
        "Q": rep.Q,
        "tables_differ": rep.tables_differ,
        "weighted_sums_agree": rep.weighted_sums_agree,
    }
    _emit(args, dumps(out))
    return EXIT_OK


def _table_csv(values: np.ndarray, header: list[str]) -> str:
    lines = [",".join(header + ["re", "im"])]
    for idx in np.ndindex(values.shape):
        v = complex(values[idx])
        re = "nan" if np.isnan(v.real) else f"{v.real:.17g}"
        im = "nan" if np.isnan(v.imag) else f"{v.imag:.17g}"
        lines.append(",".join([str(i) for i in idx] + [re, im]))
    return "\n".join(lines) + "\n"


def cmd_nonmarkov(args) -> int:
    rep = nonmarkov_demo()
    tables = {
        "distribution.csv": rep.distribution.to_csv(),
        "cond_c_given_ab.csv": _table_csv(rep.cond_given_ab.values, ["i", "j", "k"]),
        "cond_c_given_b.csv": _table_csv(rep.cond_given_b.values, ["j", "k"]),
    }
    if args.format == "csv":
        _emit(args, tables["distribution.csv"])
        return EXIT_OK
    out = {
        "meta": _meta(args, kind="fp", policy={"markovian": True}, bases=["Z", "X", "Z"]),
        "distribution": distribution_to_json(rep.distribution),
        "cond_c_given_ab": np.nan_to_num(rep.cond_given_ab.values.real, nan=np.nan).tolist(),
        "cond_c_given_b": rep.cond_given_b.values.real.tolist(),
        "formula": rep.formula.tolist(),
        "formula_defect": rep.formula_defect,
        "markov_defect": rep.markov.max_defect,
        "is_markov": rep.markov.is_markov,
        "witness": list(rep.markov.witness) if rep.markov.witness else None,
    }
    if args.tables:
        d = Path(args.tables)
        try:
            d.mkdir(parents=True, exist_ok=True)
            for name, text in tables.items():
                (d / name).write_text(text)
        except OSError as exc:
            raise InputError(f"cannot write tables to {d}: {exc.strerror or exc}") from exc
    _emit(args, dumps(out))
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.trials == 0:
        print("warning: trials=0, randomized checks are vacuous", file=sys.stderr)
    results = run_suite(args.seed, args.trials, args.tol, args.sabotage)
    failed = [r.name for r in results if not r.passed]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.name:<24} {r.value:.3e} {r.rule} {r.threshold:.1e}", file=sys.stderr)
    out = {
        "meta": _meta(args, kind="fp,left,right,ls", policy={"markovian": True}, trials=args.trials,
                      sabotage=args.sabotage),
        "checks": results_json(results),
        "failed": failed,
        "ok": not failed,
    }
    _emit(args, dumps(out))
    if failed:
        print("failing invariants: " + ", ".join(failed), file=sys.stderr)
        return EXIT_SUITE
    return EXIT_OK


def _add_problem_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", help="JSON with kind, policy, chain, rho")
    p.add_argument("--kind", choices=[k.value for k in StarKind])
    p.add_argument("--policy", help="'markovian' (default) or a holistic bit string like LRL")
    p.add_argument("--chain", help="chain JSON file")
    p.add_argument("--rho", help="initial state JSON file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsot", description="Quantum states over time toolkit")
    parser.add_argument("--version", action="version", version=f"qsot {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=False):
        p.add_argument("--tol", type=float, default=ATOL)
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument("--format", choices=["json", "csv"], default="json")
        if seed:
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--trials", type=int, default=50)
        return p

    p = common(sub.add_parser("qsot", help="build a QSOT and report its structure"))
    _add_problem_args(p)
    p.set_defaults(func=cmd_qsot)

    p = common(sub.add_parser("spectrum", help="eigenvalues of an operator or of a QSOT"))
    p.add_argument("--op", help="operator JSON file")
    _add_problem_args(p)
    p.set_defaults(func=cmd_spectrum)

    p = common(sub.add_parser("quasiprob", help="quasiprobability distribution for POVMs"))
    _add_problem_args(p)
    p.add_argument("--povms", required=True, help="JSON list of POVMs, one per time step")
    p.set_defaults(func=cmd_quasiprob)

    p = common(sub.add_parser("snapshot", help="multi-time expectation value"))
    _add_problem_args(p)
    p.add_argument("--obs", required=True, help="JSON list of observables, one per time step")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--direct", dest="mode", action="store_const", const="direct")
    mode.add_argument("--factored", dest="mode", action="store_const", const="factored")
    mode.add_argument("--both", dest="mode", action="store_const", const="both")
    p.set_defaults(func=cmd_snapshot, mode="both")

    p = common(sub.add_parser("lg", help="three-time Leggett-Garg scenario"))
    p.add_argument("--rho", help="qubit state JSON (default: maximally mixed)")
    p.add_argument("--vectors", help="JSON list of three unit Bloch vectors")
    p.set_defaults(func=cmd_lg)

    p = common(sub.add_parser("nonmarkov-demo", help="non-Markovian quasiprobabilities of id^2 * pi"))
    p.add_argument("--tables", help="directory for CSV tables")
    p.set_defaults(func=cmd_nonmarkov)

    p = common(sub.add_parser("verify", help="randomized invariant suite"), seed=True)
    p.add_argument("--sabotage", choices=SABOTAGE_TARGETS, help="inject a fault to self-test the harness")
    p.set_defaults(func=cmd_verify, tol=1e-9)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
