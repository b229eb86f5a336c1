import json
import sys

import numpy as np
import pytest

from ilkit.datasets import SystemRecord, validate_record
from ilkit.errors import (
    ExternalPredictorError,
    PredictionError,
    TrainingError,
)
from ilkit.predictor import (
    MLPConfig,
    RidgeModel,
    Standardizer,
    external_predict,
    featurize_record,
    load_model,
    predict,
    save_model,
    train_mlp,
    train_ridge,
)

EMIM = "CCn1cc[n+](C)c1"
TF2N = "O=S(=O)(C(F)(F)F)[N-]S(=O)(=O)C(F)(F)F"
CO2 = "O=C=O"


def _record(temperature=298.15):
    return validate_record(
        SystemRecord(
            category="il_solute", cation=EMIM, anion=TF2N, solute=CO2,
            temperature=temperature,
        )
    )


def test_featurize_record_deterministic():
    rec = _record()
    a = featurize_record(rec)
    b = featurize_record(rec)
    assert np.array_equal(a, b)
    assert a.shape == (89,)


def test_temperature_only_changes_index_84():
    a = featurize_record(_record(298.15))
    b = featurize_record(_record(350.0))
    diff = np.nonzero(a != b)[0]
    assert list(diff) == [84]


def test_il_bulk_record_zero_slots():
    rec = validate_record(
        SystemRecord(category="il_bulk_with_T", cation=EMIM, anion=TF2N, temperature=298.15)
    )
    x = featurize_record(rec)
    assert np.all(x[42:84] == 0.0)


def _planted_linear(n=60, d=5, seed=0):
    rng = np.random.Generator(np.random.PCG64(seed))
    X = rng.normal(size=(n, d))
    y = 3.0 * X[:, 1] + 1.0
    return X, y


def test_ridge_recovers_planted_coefficients():
    X, y = _planted_linear()
    model = train_ridge(X, y, lam=0.0)
    w, b = model.coefficients()
    assert w[1] == pytest.approx(3.0, abs=1e-6)
    assert b == pytest.approx(1.0, abs=1e-6)
    for wi in np.delete(w, 1):
        assert wi == pytest.approx(0.0, abs=1e-6)
    assert model.predict_features(X) == pytest.approx(y, abs=1e-6)


def test_ridge_huge_lambda_collapses_to_mean():
    X, y = _planted_linear()
    model = train_ridge(X, y, lam=1e9)
    assert np.max(np.abs(model.weights)) < 1e-3
    assert model.predict_features(X) == pytest.approx(np.full_like(y, y.mean()), abs=1e-3)


def test_ridge_single_sample():
    model = train_ridge(np.array([[1.0, 2.0]]), np.array([7.0]), lam=1.0)
    assert model.predict_features(np.array([[1.0, 2.0]]))[0] == pytest.approx(7.0)


def test_ridge_singular_without_penalty():
    X = np.zeros((4, 3))
    X[:, 0] = [1, 2, 3, 4]
    X[:, 1] = [2, 4, 6, 8]  # duplicated direction after standardization
    y = np.array([1.0, 2.0, 3.0, 4.0])
    with pytest.raises(TrainingError, match="lambda > 0"):
        train_ridge(X, y, lam=0.0)


def test_ridge_normal_equation_residual():
    X, y = _planted_linear(n=200, d=12, seed=3)
    for lam in (0.0, 0.5, 10.0):
        model = train_ridge(X, y, lam=lam)
        Z = model.standardizer.transform(X)
        A = Z.T @ Z + lam * np.eye(Z.shape[1])
        rhs = Z.T @ (y - y.mean())
        assert np.max(np.abs(A @ model.weights - rhs)) < 1e-8


def test_standardizer_roundtrip():
    rng = np.random.Generator(np.random.PCG64(8))
    X = rng.normal(size=(50, 7)) * 100 + 3
    std = Standardizer.fit(X)
    assert np.max(np.abs(std.inverse(std.transform(X)) - X)) < 1e-12


def test_mlp_zero_epochs_returns_initialization():
    X, y = _planted_linear()
    cfg = MLPConfig(hidden=(8,), epochs=0, batch_size=16, seed=5)
    a = train_mlp(X, y, cfg)
    b = train_mlp(X, y, cfg)
    for wa, wb in zip(a.weights, b.weights):
        assert np.array_equal(wa, wb)
    assert len(a.loss_trace) == 1


def test_mlp_recovers_planted_linear():
    X, y = _planted_linear(n=200, d=4, seed=2)
    cfg = MLPConfig(hidden=(), learning_rate=0.05, batch_size=200, epochs=500, seed=1)
    model = train_mlp(X, y, cfg)
    pred = model.predict_features(X)
    assert np.max(np.abs(pred - y)) < 1e-3


def test_mlp_deterministic():
    X, y = _planted_linear(seed=9)
    cfg = MLPConfig(hidden=(16, 8), epochs=5, batch_size=16, seed=33)
    a = train_mlp(X, y, cfg)
    b = train_mlp(X, y, cfg)
    for wa, wb in zip(a.weights, b.weights):
        assert np.array_equal(wa, wb)
    assert a.loss_trace == b.loss_trace


def test_mlp_full_batch_loss_monotone_on_convex_task():
    X, y = _planted_linear(n=100, d=3, seed=4)
    cfg = MLPConfig(hidden=(), learning_rate=1e-3, batch_size=100, epochs=100, seed=2)
    model = train_mlp(X, y, cfg)
    trace = model.loss_trace
    assert all(b <= a + 1e-12 for a, b in zip(trace, trace[1:]))


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_mlp_divergence_reports_epoch():
    X, y = _planted_linear(n=64, d=4, seed=6)
    cfg = MLPConfig(hidden=(8,), learning_rate=50.0, batch_size=8, epochs=30, seed=3)
    with pytest.raises(TrainingError, match="epoch"):
        train_mlp(X, y * 1e6, cfg)


def test_gradients_match_finite_differences():
    rng = np.random.Generator(np.random.PCG64(12))
    for trial in range(12):
        d = int(rng.integers(2, 6))
        hidden = tuple(int(h) for h in rng.integers(2, 5, size=int(rng.integers(1, 3))))
        activation = "tanh" if trial % 2 == 0 else "relu"
        cfg = MLPConfig(hidden=hidden, activation=activation, epochs=0, batch_size=3, seed=trial)
        X = rng.normal(size=(3, d))
        y = rng.normal(size=3)
        model = train_mlp(X, y, cfg)
        Z = model.standardizer.transform(X)
        _, grads_w, grads_b = model.loss_and_gradients(Z, y)
        h = 1e-5
        for k in range(len(model.weights)):
            for index in np.ndindex(model.weights[k].shape):
                orig = model.weights[k][index]
                model.weights[k][index] = orig + h
                lp, _, _ = model.loss_and_gradients(Z, y)
                model.weights[k][index] = orig - h
                lm, _, _ = model.loss_and_gradients(Z, y)
                model.weights[k][index] = orig
                fd = (lp - lm) / (2 * h)
                scale = max(abs(fd), abs(grads_w[k][index]), 1e-8)
                assert abs(fd - grads_w[k][index]) / scale < 1e-4


def test_predict_property_mismatch():
    X, y = _planted_linear()
    model = train_ridge(X[:, :89] if X.shape[1] >= 89 else np.pad(X, ((0, 0), (0, 89 - X.shape[1]))), y, 1.0, "mass_density")
    rec = validate_record(
        SystemRecord(
            category="il_solute", cation=EMIM, anion=TF2N, solute=CO2,
            temperature=298.15, property="solvation_dg", value=-1.0,
        )
    )
    with pytest.raises(PredictionError):
        predict(model, rec)


def test_predict_constant_model():
    std = Standardizer(np.zeros(89), np.ones(89))
    model = RidgeModel("solvation_dg", std, np.zeros(89), 2.5, 1.0)
    assert predict(model, _record()) == 2.5


def test_model_json_roundtrip(tmp_path):
    X, y = _planted_linear()
    ridge = train_ridge(np.pad(X, ((0, 0), (0, 89 - X.shape[1]))), y, 0.3, "solvation_dg")
    path = tmp_path / "model.json"
    save_model(ridge, path)
    again = load_model(path)
    assert again.property == "solvation_dg"
    assert np.allclose(again.weights, ridge.weights)
    mlp = train_mlp(X, y, MLPConfig(hidden=(6,), epochs=2, batch_size=16, seed=1), "solvation_dg")
    save_model(mlp, tmp_path / "mlp.json")
    again = load_model(tmp_path / "mlp.json")
    assert np.allclose(again.predict_features(X), mlp.predict_features(X))


_ECHO_ZERO = (
    "import sys, json\n"
    "for line in sys.stdin:\n"
    "    json.loads(line)\n"
    "    print(json.dumps({'value': 0.0}), flush=True)\n"
)

_ECHO_TEMPERATURE = (
    "import sys, json\n"
    "for line in sys.stdin:\n"
    "    req = json.loads(line)\n"
    "    print(json.dumps({'value': req['record']['temperature_K']}), flush=True)\n"
)

_BAD_THIRD = (
    "import sys, json\n"
    "for i, line in enumerate(sys.stdin):\n"
    "    if i == 3:\n"
    "        print('not json', flush=True)\n"
    "    else:\n"
    "        print(json.dumps({'value': 1.0}), flush=True)\n"
)


def _records(n):
    return [_record(temperature=290.0 + i) for i in range(n)]


def test_external_echo_zero():
    values = external_predict([sys.executable, "-c", _ECHO_ZERO], _records(4))
    assert values == [0.0, 0.0, 0.0, 0.0]


def test_external_returns_temperatures():
    records = _records(3)
    values = external_predict([sys.executable, "-c", _ECHO_TEMPERATURE], records)
    assert values == [r.temperature for r in records]


def test_external_malformed_response_names_record():
    with pytest.raises(ExternalPredictorError, match="record 3"):
        external_predict([sys.executable, "-c", _BAD_THIRD], _records(5))


def test_external_process_exit_reported():
    with pytest.raises(ExternalPredictorError, match="record 0"):
        external_predict([sys.executable, "-c", "import sys; sys.exit(3)"], _records(2))


def test_external_timeout():
    slow = "import time, sys; sys.stdin.readline(); time.sleep(5)"
    with pytest.raises(ExternalPredictorError, match="no response"):
        external_predict([sys.executable, "-c", slow], _records(1), timeout=0.4)
