"""Product-state and basis-state learners, plus the parity-learning baselines."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dense_ref import kron_all, measurement_matrix, PAULI_MATS, I2
from paulisq.learners import (
    AffineSolutionSpace,
    BudgetExceeded,
    InconsistentSystem,
    LPNInstance,
    PromiseViolation,
    _axis_sign_query,
    decode_state_learning_dataset,
    exhaustive_lpn_solver,
    gaussian_elimination_parity,
    generate_lpn_instance,
    haar_sign_moment_mc,
    learn_basis_state,
    learn_product_state,
    make_lpn_as_state_learning,
    normalize_if_outside,
)
from paulisq.oracle import (
    AdversarialCallback,
    DefaultAdversary,
    ExactPolicy,
    NoNoise,
    OracleConfig,
    RandomWithinTau,
    StatisticalQueryOracle,
)
from paulisq.pconcept import (
    EXACT,
    BlochVector,
    HaarSingleQubitProduct,
    MaximallyMixed,
    ProductState,
    SingleQubitProjector,
    StabilizerState,
    UniformPauli,
    sample_outcome,
    squared_loss,
)
from paulisq.stabilizer import StabilizerGroup
from paulisq.streams import substream


def random_product(rng, n, pure=False):
    blochs = []
    for _ in range(n):
        v = rng.normal(size=3)
        v /= np.linalg.norm(v)
        if not pure:
            v *= rng.uniform(0, 1) ** (1 / 3)
        blochs.append(BlochVector(*v))
    return ProductState(tuple(blochs))


def exact_oracle(state, n):
    return StatisticalQueryOracle(
        state, HaarSingleQubitProduct(n), OracleConfig(ExactPolicy(), NoNoise())
    )


def test_axis_sign_query_matches_literal_trace_formula():
    # phi = sgn(2^{1-n} tr(E (I x .. x (I+P_j)/2 x .. x I)) - 1/2) * Y, checked densely
    rng = substream(51, "literal")
    for n in (2, 3):
        for _ in range(25):
            qubit = int(rng.integers(0, n))
            v = rng.normal(size=3)
            v /= np.linalg.norm(v)
            e = SingleQubitProjector(n, qubit, BlochVector(*v))
            e_mat = measurement_matrix(e)
            for i in range(n):
                for j, kind in enumerate("XYZ"):
                    mats = [I2] * n
                    mats[i] = 0.5 * (I2 + PAULI_MATS[kind])
                    ref = np.sign(
                        2.0 ** (1 - n) * np.trace(e_mat @ kron_all(mats)).real - 0.5
                    )
                    for y in (1, -1):
                        assert _axis_sign_query(i, j)(e, y) == pytest.approx(ref * y)


def test_product_learner_exact_recovery_of_all_zeros():
    n = 4
    target = ProductState((BlochVector(0, 0, 1),) * n)
    hyp = learn_product_state(exact_oracle(target, n), 0.01)
    assert hyp.queries_used == 3 * n
    for b in hyp.state.blochs:
        assert b.z == pytest.approx(1.0, abs=1e-8)
    assert float(squared_loss(target, hyp.state, HaarSingleQubitProduct(n), EXACT)) <= 1e-15


def test_product_learner_on_maximally_mixed_target():
    n = 3
    target = MaximallyMixed(n)
    oracle = exact_oracle(target, n)
    hyp = learn_product_state(oracle, 0.25)
    for b in hyp.state.blochs:
        assert abs(b.x) < 1e-9 and abs(b.y) < 1e-9 and abs(b.z) < 1e-9


def test_product_learner_single_qubit_closed_form():
    target = ProductState((BlochVector(0.6, 0.0, 0.8),))
    hyp = learn_product_state(exact_oracle(target, 1), 0.01)
    got = hyp.state.blochs[0]
    assert got.x == pytest.approx(0.6, abs=1e-8)
    assert got.z == pytest.approx(0.8, abs=1e-8)


@pytest.mark.parametrize("n", [1, 2, 4])
@pytest.mark.parametrize("epsilon", [0.25, 0.01])
def test_product_learner_loss_certificate(n, epsilon):
    d = HaarSingleQubitProduct(n)
    for trial in range(8):
        rng = substream(52, "cert", n, epsilon, trial)
        target = random_product(rng, n, pure=bool(trial % 2))
        for policy in [ExactPolicy(), RandomWithinTau(seed=trial)]:
            oracle = StatisticalQueryOracle(target, d, OracleConfig(policy, NoNoise()))
            hyp = learn_product_state(oracle, epsilon)
            assert hyp.queries_used == 3 * n
            assert float(squared_loss(target, hyp.state, d, EXACT)) <= epsilon


def test_product_learner_rejects_wrong_distribution():
    state = ProductState((BlochVector(0, 0, 1),))
    oracle = StatisticalQueryOracle(state, UniformPauli(1), OracleConfig())
    with pytest.raises(ValueError):
        learn_product_state(oracle, 0.1)
    with pytest.raises(ValueError):
        learn_product_state(exact_oracle(state, 1), 0.0)


def test_basis_learner_exact_under_default_adversary():
    n = 3
    bits = 0b101
    state = StabilizerState(StabilizerGroup.basis_state(bits, n))
    oracle = StatisticalQueryOracle(
        state,
        HaarSingleQubitProduct(n),
        OracleConfig(AdversarialCallback(DefaultAdversary()), NoNoise()),
    )
    hyp = learn_basis_state(oracle)
    assert hyp.queries_used == n
    assert hyp.state.group == state.group


def test_basis_learner_single_qubit():
    state = StabilizerState(StabilizerGroup.basis_state(0, 1))
    hyp = learn_basis_state(exact_oracle(state, 1))
    assert hyp.queries_used == 1
    assert hyp.state.group == state.group


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_basis_learner_survives_every_full_perturbation_pattern(n):
    # adversary pushes every answer by the full +-1/(4n), all sign patterns
    for bits in range(1 << n):
        state = StabilizerState(StabilizerGroup.basis_state(bits, n))
        for pattern in itertools.product((1, -1), repeat=n):
            signs = iter(pattern)

            def push(truth, tau, _signs=signs):
                return truth + next(_signs) * tau

            oracle = StatisticalQueryOracle(
                state,
                HaarSingleQubitProduct(n),
                OracleConfig(AdversarialCallback(push), NoNoise()),
            )
            hyp = learn_basis_state(oracle)
            assert hyp.state.group == state.group


def test_basis_learner_dead_zone_detection():
    # |+> on the probed qubit: its z component is 0, inside the dead zone
    state = ProductState((BlochVector(1, 0, 0), BlochVector(0, 0, 1)))
    with pytest.raises(PromiseViolation):
        learn_basis_state(exact_oracle(state, 2))


def test_normalize_if_outside_identity_inside_ball():
    assert normalize_if_outside(0.1, 0.2, -0.3) == (0.1, 0.2, -0.3)


@given(
    target=st.tuples(*[st.floats(-1, 1) for _ in range(3)]),
    estimate=st.tuples(*[st.floats(-2, 2) for _ in range(3)]),
)
@settings(max_examples=300)
def test_renormalization_never_hurts(target, estimate):
    t = np.array(target)
    if np.linalg.norm(t) > 1:
        t /= np.linalg.norm(t)
    e = np.array(estimate)
    if np.linalg.norm(e) <= 1:
        return
    projected = np.array(normalize_if_outside(*e))
    assert np.linalg.norm(t - projected) <= np.linalg.norm(t - e) + 1e-12


def test_haar_sign_moment_mc_matches_closed_form():
    rng = substream(53, "moment")
    for k in range(6):
        psi = rng.normal(size=3)
        psi /= np.linalg.norm(psi)
        r = rng.normal(size=3)
        r *= rng.uniform(0, 1) / np.linalg.norm(r)
        ref, tgt = BlochVector(*psi), BlochVector(*r)
        est = haar_sign_moment_mc(ref, tgt, 400_000, rng)
        assert abs(est.value - ref.dot(tgt) / 4.0) <= 4 * est.std_error


# --- parity learning ---------------------------------------------------------


def test_lpn_embedding_example():
    instance = LPNInstance(2, 0.0, ((0b11, 1),), secret=0b01)
    [(e, label)] = make_lpn_as_state_learning(instance)
    assert label == 1  # x.y = 1*1 + 1*0 = 1
    state = StabilizerState(StabilizerGroup.basis_state(instance.secret, 2))
    rng = substream(54, "embed")
    assert all(sample_outcome(state, e, rng) == label for _ in range(20))


def test_lpn_embedding_empty_parity():
    instance = LPNInstance(3, 0.0, ((0, 0),), secret=0b101)
    [(e, label)] = make_lpn_as_state_learning(instance)
    assert label == -1
    state = StabilizerState(StabilizerGroup.basis_state(instance.secret, 3))
    rng = substream(54, "embed0")
    assert all(sample_outcome(state, e, rng) == -1 for _ in range(20))


def test_lpn_embedding_round_trip_bijection():
    rng = substream(55, "roundtrip")
    instance = generate_lpn_instance(6, 40, 0.2, rng)
    dataset = make_lpn_as_state_learning(instance)
    assert tuple(decode_state_learning_dataset(dataset, 6)) == instance.examples


def test_lpn_instance_json_round_trip():
    import json

    from paulisq.learners import lpn_instance_from_json, lpn_instance_to_json

    rng = substream(55, "json")
    instance = generate_lpn_instance(5, 12, 0.25, rng)
    data = json.loads(json.dumps(lpn_instance_to_json(instance)))
    assert lpn_instance_from_json(data) == instance
    assert all(len(x) == 5 and set(x) <= {"0", "1"} for x, _ in data["examples"])
    # leftmost character is coordinate 0
    one_hot = LPNInstance(3, 0.0, ((0b001, 1),), secret=None)
    assert lpn_instance_to_json(one_hot)["examples"][0][0] == "100"


def test_lpn_instance_json_without_secret():
    from paulisq.learners import lpn_instance_from_json, lpn_instance_to_json

    instance = LPNInstance(2, 0.0, ((0b11, 0),))
    data = lpn_instance_to_json(instance)
    assert "secret" not in data
    assert lpn_instance_from_json(data).secret is None


def test_lpn_embedding_outcome_law_matches_noise_rate():
    # measuring the embedded basis state reproduces clean labels; the mapped
    # noisy labels disagree with them at exactly the instance's flip rate
    rng = substream(56, "law")
    instance = generate_lpn_instance(5, 4000, 0.3, rng)
    state = StabilizerState(StabilizerGroup.basis_state(instance.secret, 5))
    dataset = make_lpn_as_state_learning(instance)
    flips = 0
    for e, label in dataset:
        clean = sample_outcome(state, e, rng)  # deterministic for parity effects
        flips += int(clean != label)
    assert flips / len(dataset) == pytest.approx(0.3, abs=0.03)


def test_gaussian_elimination_unit_vectors():
    n = 5
    secret = 0b10110
    data = [(1 << i, (secret >> i) & 1) for i in range(n)]
    assert gaussian_elimination_parity(data, n) == secret


def test_gaussian_elimination_planted():
    rng = substream(57, "ge")
    recovered = 0
    for trial in range(20):
        instance = generate_lpn_instance(16, 64, 0.0, rng)
        solution = gaussian_elimination_parity(instance.examples, 16)
        if isinstance(solution, int) and solution == instance.secret:
            recovered += 1
    assert recovered >= 19  # rank deficiency at m = 4n is vanishingly rare


def test_gaussian_elimination_inconsistent():
    with pytest.raises(InconsistentSystem):
        gaussian_elimination_parity([(0b11, 0), (0b11, 1)], 2)


def test_gaussian_elimination_underdetermined():
    n = 4
    secret = 0b1010
    data = [(0b0011, (secret & 0b0011).bit_count() & 1), (0b1100, (secret & 0b1100).bit_count() & 1)]
    out = gaussian_elimination_parity(data, n)
    assert isinstance(out, AffineSolutionSpace)
    assert len(out.nullspace_basis) == 2
    # every affine-space member satisfies the dataset
    for mask in range(1 << len(out.nullspace_basis)):
        candidate = out.particular
        for k, vec in enumerate(out.nullspace_basis):
            if (mask >> k) & 1:
                candidate ^= vec
        for x, b in data:
            assert (x & candidate).bit_count() & 1 == b


def test_exhaustive_solver_agrees_with_elimination_noiseless():
    rng = substream(58, "ml0")
    instance = generate_lpn_instance(10, 60, 0.0, rng)
    ml = exhaustive_lpn_solver(instance)
    assert ml.best == instance.secret
    assert ml.disagreements == 0
    assert gaussian_elimination_parity(instance.examples, 10) == instance.secret


def test_exhaustive_solver_noisy_planted():
    rng = substream(59, "ml")
    hits = 0
    for trial in range(10):
        instance = generate_lpn_instance(12, 600, 0.1, rng)
        ml = exhaustive_lpn_solver(instance)
        if ml.best == instance.secret and len(ml.ties) == 1:
            hits += 1
        assert abs(ml.disagreements / 600 - 0.1) < 0.06
    assert hits == 10


def test_exhaustive_solver_empty_instance_ties_everything():
    instance = LPNInstance(4, 0.0, (), secret=0)
    ml = exhaustive_lpn_solver(instance)
    assert ml.disagreements == 0
    assert len(ml.ties) == 16


def test_exhaustive_solver_budget():
    instance = LPNInstance(25, 0.0, ((1, 1),))
    with pytest.raises(BudgetExceeded):
        exhaustive_lpn_solver(instance, budget=20)


def test_solving_embedded_dataset_equals_solving_raw():
    # threshold the embedded measurement labels back to parity bits and solve:
    # example-for-example the same instance, so the same secret comes back
    rng = substream(60, "equiv")
    instance = generate_lpn_instance(9, 500, 0.08, rng)
    embedded = make_lpn_as_state_learning(instance)
    recovered_examples = decode_state_learning_dataset(embedded, 9)
    via_embedding = exhaustive_lpn_solver(
        LPNInstance(9, instance.eta, tuple(recovered_examples))
    )
    direct = exhaustive_lpn_solver(instance)
    assert via_embedding.best == direct.best == instance.secret
