"""Named checks over one input form, run as a batch into a report."""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import converse_checks as cc
from .arith import is_prime
from .characters import (
    characters_mod,
    gauss_sum,
    orthogonality_defects,
    primitive_characters,
    verify_additive_fourier_identity,
)
from .coefficients import CoefficientSeries, check_multiplicativity, euler_factor_inverse
from .forms import BUNDLED, describe, is_genuine, load_form
from .lfunction import (
    UNTWISTED,
    CompletedLContext,
    FunctionalEquationViolated,
    Twist,
    additive_twist_mellin,
    additive_twist_value,
    estimate_root_number,
    verify_twist_identity,
    y_independence_sweep,
)
from .qexp import H, InsufficientTruncation, check_matrix_identity, check_top_row_lemma, estimate_phase, twist_gamma

FE_SAMPLES = (0.5, 0.5 + 1.0j, 0.75)
TWIST_SAMPLES = (2.0, 2.0 + 1.0j)
GAMMA_BS = (0, 1, 2, 3)
INEQUIVALENCE_BOUND = 50
LEMMA_BOUND = 500


class SuiteError(ValueError):
    """Configuration problem (unknown check name, bad prime list)."""


@dataclass(frozen=True)
class SuiteConfig:
    form: str = "delta"
    primes: tuple[int, ...] = ()
    checks: tuple[str, ...] = ()
    tolerance: float | None = None
    truncation: int = 10_000
    precision_bits: int | None = None
    perturb: tuple[tuple[int, complex], ...] = ()
    jobs: int = 1


@dataclass
class CheckRecord:
    name: str
    anchor: str
    parameters: dict
    residual: float | None
    tolerance: float | None
    status: str  # pass | fail | reported | error
    wall_time: float = 0.0
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status in ("pass", "reported")


@dataclass
class RunInput:
    config: SuiteConfig
    series: CoefficientSeries
    genuine: bool


def _judge(value: float | None, tol: float, config: SuiteConfig) -> tuple[float, str]:
    tol = config.tolerance if config.tolerance is not None else tol
    if value is None or math.isnan(value):
        return tol, "fail"
    return tol, "pass" if value <= tol else "fail"


def _record(run: RunInput, name, anchor, params, value, tol, asserted=True, detail="") -> CheckRecord:
    tol, status = _judge(value, tol, run.config)
    if not asserted:
        status = "reported"
    return CheckRecord(name, anchor, params, None if value is None else float(value), tol, status, detail=detail)


def _congruent(run: RunInput, q: int) -> bool:
    return (q - 1) % run.series.level == 0


# individual checks --------------------------------------------------------------------------
# each returns a list of CheckRecord for one prime q (or the whole form when q is None)


def check_characters(run: RunInput, q: int) -> list[CheckRecord]:
    orth = orthogonality_defects(q)
    gauss = max((abs(abs(gauss_sum(c)) ** 2 - c.modulus) for c in primitive_characters(q)), default=0.0)
    anchor = "orthogonality of characters and |tau(chi)|^2 = q"
    return [
        _record(run, "characters.orthogonality", anchor, {"q": q}, float(len(orth)), 0.0),
        _record(run, "characters.gauss_modulus", anchor, {"q": q}, gauss, 1e-12),
    ]


def check_additive(run: RunInput, q: int) -> list[CheckRecord]:
    worst = max(verify_additive_fourier_identity(q, n) for n in range(q))
    return [_record(run, "additive.fourier", "e(n/q) expanded over characters mod q", {"q": q}, worst, 1e-12)]


def check_matrix(run: RunInput, q: int | None) -> list[CheckRecord]:
    N = run.series.level
    bad = sum(not check_matrix_identity(N, M) for M in range(1, 11))
    out = [_record(run, "matrix.h_p_h", "H_N P^M H_N identity", {"N": N, "M": "1..10"}, float(bad), 0.0)]
    if q is not None and N % q:
        bad = sum(not check_top_row_lemma(N, q, b) for b in range(1, q) if math.gcd(b * N, q) == 1)
        out.append(_record(run, "matrix.top_row", "top row (q, -b) completions", {"N": N, "q": q}, float(bad), 0.0))
    return out


def check_modularity(run: RunInput, q: int | None) -> list[CheckRecord]:
    s = run.series
    out = []
    ph = estimate_phase(s, H(s.level), conjugated_right=True)
    out.append(
        _record(run, "modularity.fricke", "f|H_N is a unimodular multiple of conj f",
                {"N": s.level}, max(ph.spread, ph.unimodularity_defect), 1e-8,
                detail=f"omega={ph.omega:.12g}")
    )
    if q is not None and s.level % q:
        ph = estimate_phase(s, twist_gamma(s.level, q), conjugated_left=True)
        out.append(
            _record(run, "modularity.twist_matrix", "phase of the twisting matrix",
                    {"q": q}, max(ph.spread, ph.unimodularity_defect), 1e-8, detail=f"omega={ph.omega:.12g}")
        )
    return out


def check_multiplicativity_(run: RunInput, q: int | None) -> list[CheckRecord]:
    bad = check_multiplicativity(run.series)
    return [_record(run, "multiplicativity", "a_mn = a_m a_n for coprime m, n", {"X": run.series.length},
                    float(len(bad)), 0.0, detail=f"first violations {bad[:5]}" if bad else "")]


def check_euler(run: RunInput, q: int) -> list[CheckRecord]:
    d = euler_factor_inverse(run.series, q, 6, clamp=True)
    params = {"q": q, "J": len(d.inverse_poly) - 1}
    local = run.series.level % q == 0
    return [
        _record(run, "euler.degree_two", "formal inverse of the Euler factor is a quadratic polynomial",
                params, d.defect, 1e-9, detail=f"lam={d.lam:.12g} mu={d.mu:.12g}"),
        _record(run, "euler.nonvanishing", "roots satisfy |z| >= q^(-1/2)", params,
                0.0 if d.satisfies_nonvanishing() else 1.0, 0.0, asserted=not local),
    ]


def _fe_context(run: RunInput, twist: Twist) -> CompletedLContext:
    return CompletedLContext.for_series(run.series, twist, precision_bits=run.config.precision_bits)


def _fe_records(run: RunInput, twist: Twist, label: str, params: dict) -> list[CheckRecord]:
    ctx = _fe_context(run, twist)
    est = estimate_root_number(run.series, twist, ctx)
    worst = max(y_independence_sweep(run.series, twist, s, est.eps, ctx).relative_residual for s in FE_SAMPLES)
    anchor = "functional equation of the twisted L-function"
    return [
        _record(run, f"fe.root_spread.{label}", anchor, params, est.spread, 1e-7, detail=f"eps={est.eps:.15g}"),
        _record(run, f"fe.root_unimodular.{label}", anchor, params, est.unimodularity_defect, 1e-8),
        _record(run, f"fe.y_independence.{label}", anchor, params, worst, 1e-8),
    ]


def check_fe(run: RunInput, q: int) -> list[CheckRecord]:
    out = []
    for chi in primitive_characters(q):
        out += _fe_records(run, Twist.character(chi), f"{q}.{characters_mod(q).index(chi)}",
                           {"q": q, "chi": list(chi.label)})
    return out


def check_fe_untwisted(run: RunInput, q: int | None) -> list[CheckRecord]:
    return _fe_records(run, UNTWISTED, "untwisted", {})


def check_twist_identity(run: RunInput, q: int) -> list[CheckRecord]:
    anchor = "additive twist as a combination of multiplicative twists"
    out = []
    roots = None
    for s in TWIST_SAMPLES:
        res = verify_twist_identity(run.series, q, s, root_numbers=roots)
        roots = res.root_numbers
        p = {"q": q, "s": str(s)}
        out += [
            _record(run, "twist.analytic", anchor, p, res.analytic_residual, 1e-10),
            _record(run, "twist.truncated", anchor, p, res.truncated_residual, 1e-10),
        ]
    out.append(_record(run, "twist.coefficients", anchor, {"q": q, "X": run.series.length},
                       res.coefficient_defect, 1e-12))
    return out


def check_additive_twist(run: RunInput, q: int) -> list[CheckRecord]:
    s = 6.0
    mellin = additive_twist_mellin(run.series, q, s).value
    direct = additive_twist_value(run.series, 1, q, s).value
    return [_record(run, "additive_twist.routes", "additive twist by Mellin transform and by direct sum",
                    {"q": q, "s": s}, abs(mellin - direct) / max(1.0, abs(direct)), 1e-9)]


def check_ramanujan_fe(run: RunInput, q: int) -> list[CheckRecord]:
    res = cc.verify_ramanujan_fe(run.series, q, allow_any_prime=run.series.level == 1,
                                 precision_bits=run.config.precision_bits)
    anchor = "functional equation for the Ramanujan-sum twist and D_q"
    p = {"q": q}
    return [
        _record(run, "ramanujan.dq_ratio", anchor, p, res.residual_a, 1e-8),
        _record(run, "ramanujan.y_independence", anchor, p, res.residual_b, 1e-8),
    ]


def check_dq(run: RunInput, q: int) -> list[CheckRecord]:
    d = euler_factor_inverse(run.series, q, 2)
    fl = cc.verify_dq_reflection(d.lam, d.mu, q)
    anchor = "reflection of D_q"
    out = [_record(run, "dq.reflection_float", anchor, {"q": q}, fl.defect, 1e-12)]
    raw = run.series.raw_exact
    if raw is not None and q * q < len(raw):
        lam, mu = cc.exact_local_data(int(raw[q]), int(raw[q * q]), q, run.series.weight)
        ex = cc.verify_dq_reflection_exact(lam, mu, q)
        out.append(_record(run, "dq.reflection_exact", anchor, {"q": q}, 0.0 if ex.passed else 1.0, 0.0))
    return out


def check_sq(run: RunInput, q: int) -> list[CheckRecord]:
    data = cc.build_local_data(run.series, q, allow_any_prime=run.series.level == 1, strict=False)
    asserted = run.genuine
    anchor = "S_q(x) = 1 on units"
    p = {"q": q}
    recon = float(np.max(np.abs(cc.reconstruct_C_hat(data.S) - data.C_hat)))
    recovered = float(np.max(np.abs(cc.c_hat_from_S0(data.S[0], q) - data.C_hat)))
    c_unit = max(abs(abs(c) - 1) for c in data.C.values())
    return [
        _record(run, "sq.units", anchor, p, data.unit_defect(), 1e-6, asserted),
        _record(run, "sq.zero", "value of S_q(0)", p, data.zero_defect(), 1e-8),
        _record(run, "sq.c_unimodular", "unimodular C_chi", p, c_unit, 1e-10, asserted),
        _record(run, "sq.inverse_dft", "C_hat and S_q are inverse transforms", p, recon, 1e-10),
        _record(run, "sq.c_hat_from_S0", "C_hat recovered from S_q(0)", p, recovered, 1e-10, asserted),
        _record(run, "sq.r_zero", "r = 0 for a newform", p, abs(data.r), 1e-8, asserted),
        _record(run, "sq.mu_unimodular", "|mu| = 1 for a newform", p, abs(abs(data.mu) - 1), 1e-8, asserted),
        _record(run, "sq.eps_real", "eps = 1 for real lambda", p,
                abs(data.eps - 1) if abs(data.lam.imag) < 1e-12 and abs(data.lam) > 1e-12 else 0.0, 1e-12, asserted),
    ]


def check_gamma(run: RunInput, q: int) -> list[CheckRecord]:
    anchor = "invariance under gamma_{q,b}"
    out = []
    data = None
    for b in GAMMA_BS:
        res = cc.verify_gamma_invariance(run.series, q, b, allow_any_prime=run.series.level == 1)
        out.append(_record(run, "gamma.invariance", anchor, {"q": q, "b": b}, res, 1e-8))
    if run.genuine:
        data = cc.build_local_data(run.series, q, allow_any_prime=run.series.level == 1, strict=False)
        X = min(run.series.length, 2000)
        for b in GAMMA_BS[1:]:
            out.append(_record(run, "gamma.fourier", "Fourier coefficients of f|gamma_{q,b}",
                               {"q": q, "b": b, "X": X}, cc.fourier_gamma_defect(run.series, data, b, X), 1e-8))
    return out


def check_lemma(run: RunInput, q: int) -> list[CheckRecord]:
    missing = [a for a in range(1, q) if cc.find_nonvanishing_residue(run.series, q, a, LEMMA_BOUND) is None]
    return [_record(run, "lemma.nonvanishing_residue", "some f_n with n = a mod q is nonzero",
                    {"q": q, "bound": LEMMA_BOUND}, float(len(missing)), 0.0,
                    detail=f"missing residues {missing}" if missing else "")]


def check_inequivalence(run: RunInput, q: int | None) -> list[CheckRecord]:
    out = []
    B = INEQUIVALENCE_BOUND
    X = max(run.series.length, B * B)
    for name in BUNDLED:
        if name == run.config.form:
            continue
        other = load_form(name, X)
        p = cc.euler_inequivalence(run.series, other, B)
        out.append(_record(run, "inequivalence", "pairwise inequivalent Euler products",
                           {"against": name, "bound": B}, 0.0 if p is not None else 1.0, 0.0,
                           detail=f"first differing prime {p}"))
    return out


# registry ----------------------------------------------------------------------------------------

PER_PRIME = {
    "characters": check_characters,
    "additive": check_additive,
    "euler": check_euler,
    "fe": check_fe,
    "twist-identity": check_twist_identity,
    "additive-twist": check_additive_twist,
    "ramanujan-fe": check_ramanujan_fe,
    "dq": check_dq,
    "sq": check_sq,
    "gamma": check_gamma,
    "lemma": check_lemma,
}
PER_FORM = {
    "matrix": check_matrix,
    "modularity": check_modularity,
    "multiplicativity": check_multiplicativity_,
    "fe-untwisted": check_fe_untwisted,
    "inequivalence": check_inequivalence,
}
CHECKS = {**PER_PRIME, **PER_FORM}
DEFAULT_CHECKS = ("characters", "euler", "fe", "twist-identity", "ramanujan-fe", "dq", "sq", "gamma")
# checks that need q = 1 mod N
CONGRUENCE_CHECKS = {"ramanujan-fe", "sq", "gamma"}


def default_primes(level: int) -> tuple[int, ...]:
    if level == 1:
        return (5, 7)
    q = level + 1
    while not is_prime(q):
        q += level
    return (q,)


def parse_perturb(text: str) -> tuple[tuple[int, complex], ...]:
    """'a2=+0.01,a3=1e-3j' -> ((2, 0.01), (3, 0.001j))."""
    out = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        key, _, val = part.partition("=")
        if not key.startswith("a") or not key[1:].isdigit() or not val:
            raise SuiteError(f"bad perturbation {part!r}; expected a<n>=<delta>")
        try:
            out.append((int(key[1:]), complex(val)))
        except ValueError as exc:
            raise SuiteError(f"bad perturbation value {val!r}") from exc
    return tuple(out)


def validate(config: SuiteConfig) -> SuiteConfig:
    checks = config.checks or DEFAULT_CHECKS
    unknown = [c for c in checks if c not in CHECKS]
    if unknown:
        raise SuiteError(f"unknown check(s) {', '.join(unknown)}; known: {', '.join(CHECKS)}")
    describe(config.form)
    bad = [q for q in config.primes if not is_prime(q)]
    if bad:
        raise SuiteError(f"not prime: {bad}")
    if config.truncation < 1:
        raise SuiteError("truncation must be positive")
    return replace(config, checks=tuple(checks))


def prepare(config: SuiteConfig) -> RunInput:
    series = load_form(config.form, config.truncation)
    for n, delta in config.perturb:
        if not 1 <= n <= series.length:
            raise SuiteError(f"cannot perturb a_{n} of a series of length {series.length}")
        series = series.perturbed(n, delta)
    return RunInput(config, series, is_genuine(config.form))


def _tasks(config: SuiteConfig, level: int) -> list[tuple[str, int | None]]:
    primes = config.primes or default_primes(level)
    tasks: list[tuple[str, int | None]] = []
    for name in config.checks:
        if name in PER_FORM:
            tasks.append((name, primes[0] if name in ("matrix", "modularity") else None))
        else:
            tasks.extend((name, q) for q in primes)
    return tasks


def _run_task(run: RunInput, name: str, q: int | None) -> list[CheckRecord]:
    t0 = time.perf_counter()
    try:
        if q is not None and name in CONGRUENCE_CHECKS and not _congruent(run, q):
            raise SuiteError(f"q = {q} is not 1 mod N = {run.series.level}")
        if q is not None and run.series.level % q == 0 and name != "euler" and name in PER_PRIME:
            raise SuiteError(f"q = {q} divides the level")
        records = CHECKS[name](run, q)
    except (SuiteError, InsufficientTruncation, FunctionalEquationViolated, ValueError, ArithmeticError) as exc:
        records = [CheckRecord(name, "plumbing", {"q": q}, None, None, "error", detail=f"{type(exc).__name__}: {exc}")]
    dt = time.perf_counter() - t0
    for r in records:
        r.wall_time = dt / len(records)
    return records


_WORKER_RUN: RunInput | None = None


def _worker_init(config: SuiteConfig) -> None:
    global _WORKER_RUN
    _WORKER_RUN = prepare(config)


def _worker(task: tuple[str, int | None]) -> list[CheckRecord]:
    return _run_task(_WORKER_RUN, *task)


def run_suite(config: SuiteConfig) -> tuple[RunInput, list[CheckRecord]]:
    """Execute the selected checks in a fixed order (the order of ``config.checks`` then primes)."""
    config = validate(config)
    run = prepare(config)
    tasks = _tasks(config, run.series.level)
    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(config.jobs, initializer=_worker_init, initargs=(config,)) as pool:
            chunks = list(pool.map(_worker, tasks))
    else:
        chunks = [_run_task(run, name, q) for name, q in tasks]
    return run, [r for chunk in chunks for r in chunk]


def euler_table(series: CoefficientSeries, primes: list[int], J: int = 6) -> list[dict]:
    rows = []
    for p in primes:
        if p * p > series.length:
            break
        d = euler_factor_inverse(series, p, J, clamp=True)
        rows.append({
            "p": p,
            "lambda": [d.lam.real, d.lam.imag],
            "mu": [d.mu.real, d.mu.imag],
            "eps": [d.eps.real, d.eps.imag],
            "r": [d.r.real, d.r.imag],
            "degree": d.degree,
            "defect": d.defect,
            "nonvanishing": d.satisfies_nonvanishing(),
        })
    return rows


def config_dict(config: SuiteConfig) -> dict:
    d = asdict(config)
    d["perturb"] = [[n, str(v)] for n, v in config.perturb]
    d["primes"] = list(config.primes)
    d["checks"] = list(config.checks)
    return d


__all__ = [
    "CHECKS",
    "DEFAULT_CHECKS",
    "CheckRecord",
    "SuiteConfig",
    "SuiteError",
    "euler_table",
    "parse_perturb",
    "run_suite",
]
