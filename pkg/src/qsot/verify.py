"""Randomized invariant suite behind ``qsot verify``.

Every check yields a scalar and a pass rule. Defect-type checks pass when
the value is at most ``tol``; witness-type checks (the LS nonlinearity and
the holistic gap) pass when the value exceeds a fixed margin.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .channels import (
    ChannelChain,
    apply,
    identity_channel,
    inverse_jamiolkowski,
    jamiolkowski,
    random_chain,
    random_channel,
    random_state,
    random_unitary,
)
from .linalg import Operator, apply_to_last, basis_op, hermitian_spectrum, max_abs_diff
from .quasiprob import Povm, from_qsot, marginal
from .scenarios import lg_run, nonmarkov_demo
from .star import (
    QsotOperator,
    StarKind,
    bloom,
    conditionability_defect,
    ls_linearity_gap,
    marginal_check,
    star_1chain,
    star_nchain,
    star_nchain_holistic,
    structural_probe,
)
from .snapshot import expectation_direct, expectation_factored, random_instance

SABOTAGE_TARGETS = ("marginal", "factorization", "conditionability")
LINEAR_KINDS = (StarKind.FP, StarKind.LEFT, StarKind.RIGHT)


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    rule: str  # "<=" or ">"
    threshold: float
    passed: bool


def _defect(name: str, value: float, tol: float) -> CheckResult:
    return CheckResult(name, float(value), "<=", tol, bool(value <= tol))


def _witness(name: str, value: float, margin: float) -> CheckResult:
    return CheckResult(name, float(value), ">", margin, bool(value > margin))


def _trial_rngs(seed: int, trials: int):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(trials)]


def _random_chain(rng: np.random.Generator) -> tuple[ChannelChain, Operator]:
    n = int(rng.integers(1, 4))
    dims = [int(rng.choice((2, 3))) for _ in range(n + 1)]
    return random_chain(dims, seed=rng), random_state(dims[0], seed=rng)


def check_marginals(seed: int, trials: int, tol: float, sabotage: bool = False) -> CheckResult:
    worst = 0.0
    for rng in _trial_rngs(seed, trials):
        chain, rho = _random_chain(rng)
        qs = [star_nchain(k, chain, rho) for k in LINEAR_KINDS]
        bits = "".join(rng.choice(["L", "R"], size=len(chain)))
        qs.append(star_nchain_holistic(bits, chain, rho))
        for q in qs:
            if sabotage:
                data = np.array(q.data)
                data[0, 0] += 0.1
                q = QsotOperator(Operator(data, q.dims), q.kind, q.policy)
            worst = max(worst, marginal_check(q, chain, rho, tol).max_defect)
    return _defect("marginal", worst, tol)


def check_iterativity(seed: int, trials: int, tol: float) -> CheckResult:
    worst = 0.0
    for rng in _trial_rngs(seed + 1, trials):
        chain, rho = _random_chain(rng)
        if len(chain) < 2:
            continue
        for k in LINEAR_KINDS:
            prev = star_nchain(k, chain.upper(), rho).op
            grown = apply_to_last(bloom(k, chain[-1]), prev)
            worst = max(worst, max_abs_diff(star_nchain(k, chain, rho).op, grown))
    return _defect("iterativity", worst, tol)


def check_conditionability(seed: int, trials: int, tol: float, sabotage: bool = False) -> CheckResult:
    worst = 0.0
    for rng in _trial_rngs(seed + 2, trials):
        chain, rho = _random_chain(rng)
        for k in LINEAR_KINDS:
            worst = max(worst, conditionability_defect(k, chain, rho))
    if sabotage:
        worst += 1e-3
    return _defect("conditionability", worst, tol)


def check_factorization(seed: int, trials: int, tol: float, sabotage: bool = False) -> list[CheckResult]:
    out = []
    for kind in (StarKind.FP, StarKind.LEFT):
        worst = 0.0
        for rng in _trial_rngs(seed + 3, trials):
            chain, rho, obs = random_instance(rng)
            direct = expectation_direct(kind, chain, rho, obs)
            factored = expectation_factored(kind, chain, rho, obs)
            if sabotage:
                factored += 1e-3
            worst = max(worst, abs(direct - factored))
        out.append(_defect(f"factorization_{kind.value}", worst, tol))
    return out


def check_structure(seed: int, trials: int, tol: float) -> list[CheckResult]:
    out = []
    hierarchy = True
    for kind in LINEAR_KINDS:
        rep = structural_probe(kind, seed + 4, trials, tol)
        hierarchy &= rep.hierarchy_ok
        out.append(_defect(
            f"structure_{kind.value}",
            max(rep.broadcasting_defect, rep.conditionability_defect, rep.decomposability_defect),
            tol,
        ))
    ls = structural_probe(StarKind.LS, seed + 4, trials, tol)
    hierarchy &= ls.hierarchy_ok
    out.append(_defect("ls_broadcasting", ls.broadcasting_defect, tol))
    out.append(_defect("hierarchy", 0.0 if hierarchy else 1.0, tol))
    return out


def check_jamiolkowski_roundtrip(seed: int, trials: int, tol: float) -> CheckResult:
    worst = 0.0
    for rng in _trial_rngs(seed + 5, trials):
        din, dout = (int(x) for x in rng.choice((2, 3), size=2))
        e = random_channel(din, dout, seed=rng)
        back = inverse_jamiolkowski(jamiolkowski(e), din, dout)
        for i in range(din):
            for j in range(din):
                x = basis_op(din, i, j)
                worst = max(worst, max_abs_diff(back(x), apply(e, x)))
    return _defect("jamiolkowski_roundtrip", worst, tol)


def check_born_marginals(seed: int, trials: int, tol: float) -> CheckResult:
    worst = 0.0
    for rng in _trial_rngs(seed + 6, trials):
        chain, rho = _random_chain(rng)
        povms = [Povm.from_basis(random_unitary(d, seed=rng).T) for d in chain.dims]
        states = [rho]
        for e in chain:
            states.append(apply(e, states[-1]))
        for kind in LINEAR_KINDS:
            qd = from_qsot(star_nchain(kind, chain, rho), povms)
            for axis, (p, s) in enumerate(zip(povms, states)):
                born = np.array([np.trace(s.data @ m) for m in p.elements])
                worst = max(worst, float(np.abs(marginal(qd, [axis]).values - born).max()))
    return _defect("born_marginals", worst, tol)


def check_scenarios(tol: float) -> list[CheckResult]:
    lg = lg_run()
    nm = nonmarkov_demo()
    rho0 = Operator([[1, 0], [0, 0]])
    eig = hermitian_spectrum(star_1chain(StarKind.FP, identity_channel(2), rho0).op)
    plus = Operator(np.full((2, 2), 0.5))
    ids = [identity_channel(2), identity_channel(2)]
    gap = max_abs_diff(star_nchain_holistic("LL", ids, plus).op, star_nchain_holistic("LR", ids, plus).op)
    return [
        _defect("lg_sum", abs(lg.lg_sum - 1.5), tol),
        _defect("nonmarkov_defect", abs(nm.markov.max_defect - 0.5), tol),
        _defect("negativity_witness", abs(eig[-1] + 0.5), tol),
        _witness("ls_linearity_gap", ls_linearity_gap(rho0, plus, identity_channel(2)), 1e-2),
        _witness("holistic_gap", gap, 1e-6),
    ]


def run_suite(seed: int = 0, trials: int = 50, tol: float = 1e-9, sabotage: str | None = None) -> list[CheckResult]:
    if sabotage is not None and sabotage not in SABOTAGE_TARGETS:
        raise ValueError(f"unknown sabotage target {sabotage!r}; choose from {SABOTAGE_TARGETS}")
    results = [
        check_marginals(seed, trials, tol, sabotage == "marginal"),
        check_iterativity(seed, trials, tol),
        check_conditionability(seed, trials, tol, sabotage == "conditionability"),
        *check_factorization(seed, trials, tol, sabotage == "factorization"),
        *check_structure(seed, trials, tol),
        check_jamiolkowski_roundtrip(seed, trials, tol),
        check_born_marginals(seed, trials, tol),
    ]
    results += check_scenarios(tol)
    return results


def results_json(results: list[CheckResult]) -> list[dict]:
    return [asdict(r) for r in results]
