"""Reproducible seeded experiments with machine-readable JSON reports.

Subcommands: verify-lemmas, learn-product, lpn, sda, noise-demo.  Every
randomized quantity flows from --seed through named substreams, so a report
is bit-identical across reruns and worker counts (timestamps and runtimes
live under "meta" and are excluded from that contract).  Exit code 0 iff all
assertions in the report passed.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from fractions import Fraction

import numpy as np

from . import __version__
from .learners import (
    decode_state_learning_dataset,
    exhaustive_lpn_solver,
    gaussian_elimination_parity,
    generate_lpn_instance,
    haar_sign_moment_mc,
    learn_basis_state,
    learn_product_state,
    make_lpn_as_state_learning,
)
from .oracle import (
    AdversarialCallback,
    BoundedChannelAbsorbingOracle,
    BoundedChannelNoise,
    ClassificationCorrectedOracle,
    ClassificationNoise,
    DefaultAdversary,
    DepolarizingCorrectedOracle,
    DepolarizingNoise,
    EmpiricalFromSamples,
    ExactPolicy,
    MaliciousNoise,
    NoNoise,
    OracleConfig,
    RandomWithinTau,
    SQQuery,
    StatisticalQueryOracle,
    absorb_bounded_channel,
    adjoint_measurement,
    correct_classification,
    correct_depolarizing,
    draw_validation_set,
    eta_grid_search,
    mixture_acceptance,
)
from .pauli import PauliMeasurement, PauliOperator
from .pconcept import (
    EXACT,
    BlochVector,
    FiniteWeighted,
    HaarSingleQubitProduct,
    MaximallyMixed,
    MonteCarlo,
    ProductState,
    SingleQubitProjector,
    StabilizerState,
    UniformPauli,
    UniformParity,
    acceptance_probability,
    inner_product,
    squared_loss,
)
from .stabilizer import (
    StabilizerGroup,
    enumerate_stabilizer_groups,
    random_stabilizer_group,
)
from .statdim import ConceptClass, average_correlation, sda_bound, sda_exact, verify_query_lower_bound
from .streams import substream

STABILIZER_COUNTS = {1: 6, 2: 60, 3: 1080}


@dataclass
class ExperimentConfig:
    experiment: str
    n: int = 2
    distribution: dict | None = None
    noise: dict | None = None
    policy: dict | None = None
    epsilon: float = 0.01
    tau: float | None = None
    seed: int = 0
    trials: int = 10
    jobs: int = 1
    samples: int | None = None
    target: str = "ball"
    grid_search: bool = False
    eta_upper: float | None = None
    lpn_m: int | None = None
    lpn_eta: float = 0.0
    lpn_file: str | None = None
    out: str | None = None

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        if "experiment" not in data:
            raise ValueError("config needs an 'experiment' field")
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


def distribution_from_descriptor(desc: dict):
    kind = desc["kind"]
    if kind == "uniform_pauli":
        return UniformPauli(desc["n"])
    if kind == "uniform_parity":
        return UniformParity(desc["n"])
    if kind == "haar_product":
        return HaarSingleQubitProduct(desc["n"])
    if kind == "finite":
        items = []
        for meas, weight in desc["items"]:
            if isinstance(meas, str):
                items.append((PauliMeasurement(PauliOperator.from_string(meas)), weight))
            else:
                items.append(
                    (SingleQubitProjector(meas["n"], meas["qubit"], BlochVector(*meas["axis"])), weight)
                )
        return FiniteWeighted(tuple(items))
    raise ValueError(f"unknown distribution kind {kind!r}")


def noise_from_descriptor(desc: dict | None):
    if desc is None:
        return NoNoise()
    kind = desc["kind"]
    if kind == "none":
        return NoNoise()
    if kind == "classification":
        return ClassificationNoise(desc["eta"])
    if kind == "malicious":
        return MaliciousNoise(desc["eta"])
    if kind == "depolarizing":
        return DepolarizingNoise(desc["eta"])
    if kind == "bounded_channel":
        eta = desc["eta"]
        return BoundedChannelNoise(eta_diamond=2.0 * eta, channel=DepolarizingNoise(eta))
    raise ValueError(f"unknown noise kind {kind!r}")


def policy_from_descriptor(desc: dict | None, default_seed: int):
    if desc is None:
        return ExactPolicy()
    kind = desc["kind"]
    if kind == "exact":
        return ExactPolicy()
    if kind == "random_within_tau":
        return RandomWithinTau(desc.get("seed", default_seed))
    if kind == "adversarial":
        return AdversarialCallback(DefaultAdversary())
    if kind == "empirical":
        return EmpiricalFromSamples(
            samples=desc.get("samples"), seed=desc.get("seed", default_seed)
        )
    raise ValueError(f"unknown policy kind {kind!r}")


def _jsonable(value):
    if isinstance(value, Fraction):
        return {"num": value.numerator, "den": value.denominator}
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _random_product_state(n: int, rng, target: str) -> ProductState:
    blochs = []
    for _ in range(n):
        v = rng.normal(size=3)
        v /= np.linalg.norm(v)
        if target == "ball":
            v = v * rng.uniform(0.0, 1.0) ** (1.0 / 3.0)
        blochs.append(BlochVector(*v))
    return ProductState(tuple(blochs))


def grid_step(epsilon: float, eta_upper: float) -> float:
    """Noise-rate grid step for the search over depolarizing-rate guesses.

    Fine enough that a half-step rate mismatch perturbs each recovered Bloch
    coordinate by at most sqrt(eps)/2, the slack left by running the inner
    learner at eps/4; rounded so the grid lands on eta_upper exactly.
    """
    if eta_upper <= 0:
        return 1.0
    budget = (epsilon**0.5) * (1.0 - eta_upper) / 2.0
    steps = max(1, int(np.ceil(eta_upper / budget)))
    return eta_upper / steps


# ---------------------------------------------------------------------------
# verify-lemmas


def cmd_verify_lemmas(config: ExperimentConfig) -> dict:
    n = config.n
    if not 1 <= n <= 3:
        raise ValueError(f"verify-lemmas supports n in 1..3, got {n}")
    assertions = []
    results = {}

    groups = enumerate_stabilizer_groups(n)
    results["stabilizer_count"] = len(groups)
    assertions.append(
        {"name": "stabilizer_count", "passed": len(groups) == STABILIZER_COUNTS[n]}
    )

    # exact correlation structure: norms 1/2^n, cross terms <= 1/2^{n+1}, tight
    d = UniformPauli(n)
    states = [StabilizerState(g) for g in groups]
    norm_ok = all(
        inner_product(s, s, d, EXACT) == Fraction(1, 2**n) for s in states
    )
    assertions.append({"name": "norm_squared_is_2^-n", "passed": norm_ok})

    bound = Fraction(1, 2 ** (n + 1))
    rng = substream(config.seed, "pairs")
    if n <= 2:
        pair_indices = [(i, j) for i in range(len(states)) for j in range(i + 1, len(states))]
    else:
        pair_indices = [
            tuple(sorted(rng.choice(len(states), size=2, replace=False).tolist()))
            for _ in range(300)
        ]
    cross = [abs(inner_product(states[i], states[j], d, EXACT)) for i, j in pair_indices]
    assertions.append(
        {"name": "cross_correlation_at_most_2^-(n+1)", "passed": all(c <= bound for c in cross)}
    )
    tight_found = any(c == bound for c in cross)
    witness = StabilizerState(StabilizerGroup.from_strings(["+" + "I" * i + "Z" + "I" * (n - 1 - i) for i in range(n)]))
    witness2_strings = ["+" + "I" * i + "Z" + "I" * (n - 1 - i) for i in range(n - 1)] + ["+" + "I" * (n - 1) + "X"]
    witness2 = StabilizerState(StabilizerGroup.from_strings(witness2_strings))
    tight_pair_value = abs(inner_product(witness, witness2, d, EXACT))
    results["tightness_witness_value"] = tight_pair_value
    assertions.append(
        {"name": "tightness_attained", "passed": tight_pair_value == bound and (tight_found or n == 3)}
    )

    # maximally mixed identity on random states
    mixed = MaximallyMixed(n)
    identity_ok = True
    for k in range(50):
        g = random_stabilizer_group(n, substream(config.seed, "mm", k))
        s = StabilizerState(g)
        lhs = inner_product(s, s, d, EXACT) - squared_loss(s, mixed, d, EXACT)
        identity_ok = identity_ok and lhs == Fraction(1, 4**n)
    assertions.append({"name": "maximally_mixed_identity", "passed": identity_ok})

    # Haar sign moment, Monte Carlo vs closed form
    samples = config.samples or 1_000_000
    mc_ok = True
    mc_rows = []
    for k in range(5):
        rng_k = substream(config.seed, "haar-moment", k)
        psi = rng_k.normal(size=3)
        psi /= np.linalg.norm(psi)
        r = rng_k.normal(size=3)
        r *= rng_k.uniform(0, 1) / np.linalg.norm(r)
        ref = BlochVector(*psi)
        tgt = BlochVector(*r)
        est = haar_sign_moment_mc(ref, tgt, samples, rng_k)
        closed = ref.dot(tgt) / 4.0
        mc_rows.append({"estimate": est.value, "closed_form": closed, "std_error": est.std_error})
        mc_ok = mc_ok and abs(est.value - closed) <= 4 * est.std_error
    results["haar_moment"] = mc_rows
    assertions.append({"name": "haar_sign_moment_mc", "passed": mc_ok})

    # product squared loss: closed form vs Monte Carlo
    dh = HaarSingleQubitProduct(n)
    loss_ok = True
    for k in range(3):
        rng_k = substream(config.seed, "loss", k)
        a = _random_product_state(n, rng_k, "ball")
        b = _random_product_state(n, rng_k, "ball")
        exact = float(squared_loss(a, b, dh, EXACT))
        mc = squared_loss(a, b, dh, MonteCarlo(100_000, config.seed + k))
        loss_ok = loss_ok and abs(mc.value - exact) <= 4 * mc.std_error + 1e-12
    assertions.append({"name": "product_loss_closed_form_vs_mc", "passed": loss_ok})

    return {"results": results, "assertions": assertions}


# ---------------------------------------------------------------------------
# learn-product


def _product_trial(config_dict: dict, trial: int) -> dict:
    config = ExperimentConfig.from_dict(config_dict)
    n = config.n
    rng = substream(config.seed, "trial", trial)
    dist = HaarSingleQubitProduct(n)
    noise = noise_from_descriptor(config.noise)
    policy = policy_from_descriptor(config.policy, default_seed=config.seed * 7919 + trial)
    t0 = time.perf_counter()

    if config.target == "basis":
        bits = int(rng.integers(0, 1 << n))
        state = StabilizerState(StabilizerGroup.basis_state(bits, n))
        oracle = StatisticalQueryOracle(state, dist, OracleConfig(policy, noise))
        hypothesis = learn_basis_state(oracle)
        loss = float(squared_loss(state, hypothesis.state, dist, EXACT))
        recovered = hypothesis.state == state
        return {
            "trial": trial,
            "queries": hypothesis.queries_used,
            "loss": loss,
            "recovered": bool(recovered),
            "runtime_s": time.perf_counter() - t0,
        }

    state = _random_product_state(n, rng, config.target)
    oracle = StatisticalQueryOracle(state, dist, OracleConfig(policy, noise))
    epsilon = config.epsilon

    if isinstance(noise, ClassificationNoise):
        learner_oracle = ClassificationCorrectedOracle(oracle, noise.eta)
        hypothesis = learn_product_state(learner_oracle, epsilon)
    elif isinstance(noise, DepolarizingNoise) and config.grid_search:
        eta_upper = config.eta_upper if config.eta_upper is not None else noise.eta
        delta = grid_step(epsilon, eta_upper)
        validation = draw_validation_set(state, dist, 20_000, substream(config.seed, "val", trial))

        def run(guess: float):
            inner = StatisticalQueryOracle(state, dist, OracleConfig(policy, noise))
            corrected = DepolarizingCorrectedOracle(inner, guess)
            return learn_product_state(corrected, epsilon / 4)

        _, hypothesis = eta_grid_search(run, eta_upper, delta, validation)
    elif isinstance(noise, DepolarizingNoise):
        learner_oracle = DepolarizingCorrectedOracle(oracle, noise.eta)
        hypothesis = learn_product_state(learner_oracle, epsilon)
    elif isinstance(noise, BoundedChannelNoise):
        learner_oracle = BoundedChannelAbsorbingOracle(oracle, noise.eta_diamond)
        hypothesis = learn_product_state(learner_oracle, epsilon, tau=config.tau)
    else:
        hypothesis = learn_product_state(oracle, epsilon, tau=config.tau)

    loss = float(squared_loss(state, hypothesis.state, dist, EXACT))
    return {
        "trial": trial,
        "queries": hypothesis.queries_used,
        "loss": loss,
        "passed": loss <= epsilon,
        "runtime_s": time.perf_counter() - t0,
    }


def cmd_learn_product(config: ExperimentConfig) -> dict:
    trial_ids = list(range(config.trials))
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            rows = list(pool.map(_product_trial, [config.to_dict()] * len(trial_ids), trial_ids))
    else:
        rows = [_product_trial(config.to_dict(), t) for t in trial_ids]
    rows.sort(key=lambda r: r["trial"])
    for row in rows:
        row.pop("runtime_s", None)
    assertions = []
    if config.target == "basis":
        assertions.append(
            {"name": "exact_recovery", "passed": all(r["recovered"] for r in rows)}
        )
        assertions.append(
            {"name": "queries_equal_n", "passed": all(r["queries"] == config.n for r in rows)}
        )
    else:
        assertions.append(
            {"name": "loss_within_epsilon", "passed": all(r["loss"] <= config.epsilon for r in rows)}
        )
        assertions.append(
            {"name": "queries_equal_3n", "passed": all(r["queries"] == 3 * config.n for r in rows)}
        )
    return {"results": {"trials": rows, "max_loss": max(r["loss"] for r in rows)}, "assertions": assertions}


# ---------------------------------------------------------------------------
# lpn


def _load_lpn_instance(path: str):
    from .learners import lpn_instance_from_json

    with open(path, encoding="utf-8") as fh:
        return lpn_instance_from_json(json.load(fh))


def _lpn_trial(config_dict: dict, trial: int) -> dict:
    config = ExperimentConfig.from_dict(config_dict)
    if config.lpn_file is not None:
        fixed = _load_lpn_instance(config.lpn_file)
        n, eta, m = fixed.n, fixed.eta, len(fixed.examples)
    else:
        fixed = None
        n = config.n
        eta = config.lpn_eta
        m = config.lpn_m or (4 * n if eta == 0 else 50 * n)
    rng = substream(config.seed, "lpn", trial)
    retries = 0
    while True:
        instance = fixed if fixed is not None else generate_lpn_instance(n, m, eta, rng)
        dataset = make_lpn_as_state_learning(instance)
        decoded = decode_state_learning_dataset(dataset, n)
        round_trip = tuple(decoded) == instance.examples
        if eta == 0:
            solution = gaussian_elimination_parity(instance.examples, n)
            if isinstance(solution, int):
                return {
                    "trial": trial,
                    "recovered": solution == instance.secret if instance.secret is not None else None,
                    "round_trip": round_trip,
                    "retries": retries,
                }
            retries += 1
            if fixed is not None or retries > 10:
                return {"trial": trial, "recovered": False, "round_trip": round_trip, "retries": retries}
            continue
        result = exhaustive_lpn_solver(instance)
        disagreement_rate = result.disagreements / m
        recovered = None
        if instance.secret is not None:
            recovered = result.best == instance.secret and len(result.ties) == 1
        return {
            "trial": trial,
            "recovered": recovered,
            "round_trip": round_trip,
            "disagreement_rate": disagreement_rate,
            "ties": len(result.ties),
        }


def cmd_lpn(config: ExperimentConfig) -> dict:
    trial_ids = list(range(config.trials))
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            rows = list(pool.map(_lpn_trial, [config.to_dict()] * len(trial_ids), trial_ids))
    else:
        rows = [_lpn_trial(config.to_dict(), t) for t in trial_ids]
    rows.sort(key=lambda r: r["trial"])
    recovered = sum(1 for r in rows if r["recovered"])
    assertions = [
        {"name": "round_trip_bijection", "passed": all(r["round_trip"] for r in rows)},
    ]
    secrets_known = all(r["recovered"] is not None for r in rows)
    near_boundary = config.lpn_eta >= 0.45
    if secrets_known and not near_boundary:
        threshold = 0.99 if config.lpn_eta == 0 else 0.95
        assertions.append(
            {
                "name": "secret_recovery_rate",
                "passed": recovered >= threshold * len(rows),
            }
        )
    return {
        "results": {"trials": rows, "recovered": recovered, "total": len(rows)},
        "assertions": assertions,
    }


# ---------------------------------------------------------------------------
# sda


def cmd_sda(config: ExperimentConfig) -> dict:
    n = config.n
    if not 1 <= n <= 2:
        raise ValueError(f"sda supports n in 1..2 for exact class quantities, got {n}")
    groups = enumerate_stabilizer_groups(n)
    cls = ConceptClass(tuple(StabilizerState(g) for g in groups), UniformPauli(n))
    results = {}
    assertions = []

    avg = average_correlation(cls)
    results["class_size"] = len(cls)
    results["average_correlation"] = avg

    kappa = Fraction(1, 2**n)
    gamma_pair = Fraction(1, 2 ** (n + 1))
    gamma_prime = Fraction(1, 2 ** (n + 1))
    bound = sda_bound(cls, gamma_pair, kappa, gamma_prime)
    results["pairwise_bound"] = bound.to_jsonable()
    assertions.append(
        {
            "name": "bound_equals_class_size_at_threshold_2^-n",
            "passed": bound.sda_value == len(cls) and bound.gamma == kappa,
        }
    )

    if n == 1:
        exact = sda_exact(cls, Fraction(1, 2))
        results["sda_exact"] = exact.to_jsonable()
        assertions.append(
            {"name": "exact_at_least_bound", "passed": Fraction(exact.sda_value) >= bound.sda_value}
        )

    # side-condition verdict at tau = epsilon = 3/8 (succeeds for n = 2,
    # fails for n = 1 where tolerance and loss cannot both fit the norms)
    tau = 3.0 / 8.0 if n == 2 else 9.0 / 16.0
    beta = 2.0 ** (-n / 2.0)
    gamma_prime_v = Fraction(9, 64) - gamma_pair if n == 2 else Fraction(81, 256) - gamma_pair
    verdict_report = sda_bound(cls, gamma_pair, kappa, gamma_prime_v)
    verdict = verify_query_lower_bound(verdict_report, epsilon=tau, beta=beta, tau=tau)
    results["verdict"] = {
        "ok": verdict.ok,
        "checks": verdict.checks,
        "statement": verdict.statement,
        "implied_queries": verdict.implied_queries,
    }
    assertions.append({"name": "verdict_consistent", "passed": verdict.ok == (n == 2)})

    return {"results": results, "assertions": assertions}


# ---------------------------------------------------------------------------
# noise-demo


def cmd_noise_demo(config: ExperimentConfig) -> dict:
    results = {}
    assertions = []
    state = StabilizerState(StabilizerGroup.from_strings(["+Z"]))
    point_mass = FiniteWeighted(((PauliMeasurement(PauliOperator.from_string("Z")), 1.0),))
    label_query = lambda e, y: float(y)  # noqa: E731

    def answer(noise):
        oracle = StatisticalQueryOracle(state, point_mass, OracleConfig(ExactPolicy(), noise))
        return oracle.query(SQQuery(label_query, 0.01))

    eta_c, eta_d, eta_m = 0.1, 0.5, 0.2
    clean = answer(NoNoise())
    noisy_c = answer(ClassificationNoise(eta_c))
    noisy_d = answer(DepolarizingNoise(eta_d))
    noisy_m = answer(MaliciousNoise(eta_m))
    results["clean"] = clean
    results["classification"] = {"noisy": noisy_c, "corrected": correct_classification(noisy_c, eta_c)}
    results["depolarizing"] = {"noisy": noisy_d, "corrected": correct_depolarizing(noisy_d, 0.0, eta_d)}
    results["malicious"] = {"noisy": noisy_m, "perturbation_bound": 2 * eta_m}
    assertions.append({"name": "classification_expectation", "passed": abs(noisy_c - (1 - 2 * eta_c)) < 1e-12})
    assertions.append({"name": "classification_corrected", "passed": abs(results["classification"]["corrected"] - clean) < 1e-12})
    assertions.append({"name": "depolarizing_expectation", "passed": abs(noisy_d - (1 - eta_d)) < 1e-12})
    assertions.append({"name": "depolarizing_corrected", "passed": abs(results["depolarizing"]["corrected"] - clean) < 1e-12})
    assertions.append({"name": "malicious_within_2eta", "passed": abs(noisy_m - clean) <= 2 * eta_m + 1e-12})

    results["absorb"] = {"tau": 0.1, "eta": 0.02, "effective": absorb_bounded_channel(0.1, 0.02)}
    assertions.append({"name": "absorb_arithmetic", "passed": abs(results["absorb"]["effective"] - 0.06) < 1e-15})

    # adjoint identity: tr(adj(E) rho) == tr(E (1-eta) rho + eta I/2^n) on a
    # random two-qubit stabilizer state, over all signed Paulis
    n = 2
    eta = 0.3
    channel = DepolarizingNoise(eta)
    rho = StabilizerState(random_stabilizer_group(n, substream(config.seed, "adjoint")))
    mixed = MaximallyMixed(n)
    worst = 0.0
    for e, _ in UniformPauli(n).support():
        lhs = mixture_acceptance(rho, adjoint_measurement(e, channel))
        rhs = (1 - eta) * float(acceptance_probability(rho, e)) + eta * float(
            acceptance_probability(mixed, e)
        )
        worst = max(worst, abs(lhs - rhs))
    results["adjoint_worst_abs_err"] = worst
    assertions.append({"name": "adjoint_identity", "passed": worst < 1e-12})

    if config.distribution is not None:
        # correction round trip on a caller-supplied measurement distribution
        d = distribution_from_descriptor(config.distribution)
        target = StabilizerState(random_stabilizer_group(d.n, substream(config.seed, "demo-state")))
        clean = StatisticalQueryOracle(target, d, OracleConfig(ExactPolicy(), NoNoise()))
        noisy = StatisticalQueryOracle(
            target, d, OracleConfig(ExactPolicy(), ClassificationNoise(eta_c))
        )
        wrapped = ClassificationCorrectedOracle(noisy, eta_c)
        tau = config.tau or 0.01
        probe = SQQuery(label_query, tau)
        gap = abs(wrapped.query(probe) - clean.query(probe))
        results["custom_distribution_round_trip_gap"] = gap
        assertions.append({"name": "custom_distribution_round_trip", "passed": gap <= tau})

    return {"results": results, "assertions": assertions}


# ---------------------------------------------------------------------------
# driver


_COMMANDS = {
    "verify-lemmas": cmd_verify_lemmas,
    "learn-product": cmd_learn_product,
    "lpn": cmd_lpn,
    "sda": cmd_sda,
    "noise-demo": cmd_noise_demo,
}


def run_experiment(config: ExperimentConfig) -> dict:
    t0 = time.perf_counter()
    body = _COMMANDS[config.experiment](config)
    passed = all(a["passed"] for a in body["assertions"])
    report = {
        "config": config.to_dict(),
        "results": _jsonable(body["results"]),
        "assertions": _jsonable(body["assertions"]),
        "passed": passed,
        "version": __version__,
        "meta": {"runtime_s": time.perf_counter() - t0, "timestamp": time.time()},
    }
    return report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="paulisq", description=__doc__)
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None, help="JSON config file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--jobs", type=int, default=None)
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--epsilon", type=float, default=None)
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--target", type=str, default=None, choices=["ball", "pure", "basis"])
        p.add_argument("--noise", type=str, default=None, help="noise kind")
        p.add_argument("--eta", type=float, default=None)
        p.add_argument("--policy", type=str, default=None)
        p.add_argument("--grid-search", action="store_true", default=None)
        p.add_argument("--lpn-m", type=int, default=None)
        p.add_argument("--lpn-eta", type=float, default=None)
        p.add_argument("--lpn-file", type=str, default=None)
    return parser


def config_from_args(args) -> ExperimentConfig:
    data = {"experiment": args.experiment}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            data.update(json.load(fh))
        data["experiment"] = args.experiment
    overrides = {
        "seed": args.seed,
        "out": args.out,
        "trials": args.trials,
        "jobs": args.jobs,
        "n": args.n,
        "epsilon": args.epsilon,
        "samples": args.samples,
        "target": args.target,
        "lpn_m": args.lpn_m,
        "lpn_eta": args.lpn_eta,
        "lpn_file": args.lpn_file,
        "grid_search": args.grid_search,
    }
    for key, value in overrides.items():
        if value is not None:
            data[key] = value
    if args.noise is not None:
        data["noise"] = {"kind": args.noise, "eta": args.eta if args.eta is not None else 0.0}
    if args.policy is not None:
        data["policy"] = {"kind": args.policy}
    return ExperimentConfig.from_dict(data)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = config_from_args(args)
    report = run_experiment(config)
    text = json.dumps(report, indent=2)
    if config.out:
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    return 0 if report["passed"] else 1


if __name__ == "__main__":
    sys.exit(main())
