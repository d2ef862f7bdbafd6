import json
import os
import subprocess

import numpy as np
import pytest

import limase


@pytest.fixture(scope="module")
def data():
    return limase.make_synthetic(rows=300, features=5, informative=3, seed=1)


@pytest.fixture(scope="module")
def forest(data):
    return limase.train_forest(data, n_trees=10, seed=2)


def test_dataset_round_trip(data):
    assert data.x.shape == (300, 5)
    assert data.y.shape == (300,)
    copy = limase.Dataset(data.x, data.y, data.feature_names)
    assert copy.num_rows == 300
    np.testing.assert_array_equal(copy.row(4), data.row(4))


def test_explain_is_efficient_on_the_surrogate(data, forest):
    r = limase.explain(forest, data, data.row(0), n_samples=400, seed=3)
    assert r["explainer"] == "limase"
    assert r["phi"].shape == (5,)
    assert abs(r["base_value"] + r["phi"].sum() - r["fx"]) <= 1e-9 * max(1.0, abs(r["fx"]))
    again = limase.explain(forest, data, data.row(0), n_samples=400, seed=3)
    np.testing.assert_array_equal(r["phi"], again["phi"])


def test_forest_shap_matches_prediction(data, forest):
    x = data.row(5)
    e = limase.forest_shap(forest, x)
    assert e["base_value"] + e["phi"].sum() == pytest.approx(forest.predict(x[None, :])[0, 0], abs=1e-9)


def test_callable_model_with_kernel_shap(data):
    w = np.array([1.0, -2.0, 0.5, 0.0, 3.0])
    model = limase.CallableModel(lambda x: x @ w, 5)
    bg = data.x[:1]
    x = data.row(7)
    e = limase.kernel_shap(model, x, bg)
    np.testing.assert_allclose(e["phi"], w * (x - bg[0]), atol=1e-10)
    r = limase.explain(model, data, x, n_samples=200)
    assert r["phi"].shape == (5,)


def test_callable_model_errors_propagate(data):
    def broken(x):
        raise RuntimeError("model offline")

    with pytest.raises(Exception, match="model offline"):
        limase.explain(limase.CallableModel(broken, 5), data, data.row(0), n_samples=50)
    with pytest.raises(ValueError):
        limase.explain(limase.CallableModel(lambda x: x[:, 0], 5), data, data.row(0)[:3])


def test_submodular_pick():
    s = np.array([[1.0, 0.0], [0.0, 2.0]])
    r = limase.submodular_pick(s, 1)
    assert r["selected"] == [1]
    np.testing.assert_allclose(limase.feature_importance(s), [1.0, np.sqrt(2.0)])


def test_svg_and_model_files(tmp_path, data, forest):
    e = limase.explain(forest, data, data.row(1), n_samples=200)
    svg = limase.force_plot_svg(e, data)
    assert svg.startswith("<?xml") and svg.endswith("</svg>\n")
    s = np.vstack([limase.explain(forest, data, data.row(i), n_samples=200)["phi"] for i in range(4)])
    assert "feature-row" in limase.summary_plot_svg(s, data.x[:4], data)
    path = tmp_path / "forest.json"
    path.write_text(forest.to_json())
    loaded = limase.load_model(path)
    np.testing.assert_array_equal(loaded.predict(data.x[:10]), forest.predict(data.x[:10]))


@pytest.mark.skipif("LIMASE_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_synth_and_inspect(tmp_path):
    cli = os.environ["LIMASE_CLI"]
    csv = tmp_path / "d.csv"
    subprocess.run([cli, "synth", "--rows", "50", "--csv", str(csv)], check=True, capture_output=True)
    out = subprocess.run([cli, "inspect", "--data", str(csv), "--target", "y"], check=True,
                         capture_output=True, text=True)
    assert json.loads(out.stdout)["rows"] == 50
    bad = subprocess.run([cli, "inspect", "--data", str(csv), "--target", "nope"], capture_output=True)
    assert bad.returncode == 2
