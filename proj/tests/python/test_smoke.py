"""End-to-end smoke tests for the python bindings."""

import math

import pytest

import driftgate as dg


@pytest.fixture(scope="module")
def fast_params():
    return dg.BoostParams(num_boost_round=150, early_stopping_rounds=20, seed=42)


@pytest.fixture(scope="module")
def shifted_pair():
    return dg.generate_shifted(
        kind="covariate", magnitude=3.0, n_train=1200, n_test=1200,
        n_features=5, months=1, seed=7,
    )


def test_metrics_basics():
    assert dg.auc([0, 0, 1, 1], [0.1, 0.4, 0.35, 0.8]) == 0.75
    assert dg.auc([0, 1], [0.5, 0.5]) == 0.5
    assert dg.ks_statistic([0, 1], [0.2, 0.8]) == 1.0
    assert dg.psi([0.5, 0.5], [0.5, 0.5]) == 0.0
    assert dg.psi([0.5, 0.5], [0.25, 0.75]) == pytest.approx(0.2747, abs=1e-3)
    with pytest.raises(dg.DriftgateError):
        dg.auc([1, 1], [0.2, 0.4])


def test_generate_and_dataset_surface(shifted_pair):
    train, test = shifted_pair
    assert train.n_rows == 1200
    assert train.n_features == 5
    assert train.feature_names == [f"f{j}" for j in range(5)]
    assert set(train.labels) <= {0, 1}
    assert train.months[0] == "2018-01"
    assert len(train.column("f0")) == 1200
    assert all(math.isfinite(v) for v in test.column("f0"))


def test_adversarial_detects_the_shift(shifted_pair, fast_params):
    train, test = shifted_pair
    report = dg.adversarial_validate(train, test, fast_params, k=5, threshold=0.7)
    assert report.adv_auc >= 0.9
    assert report.verdict == "shifted"
    assert len(report.per_row) == train.n_rows
    assert dg.verdict(0.5, 0.7) == "consistent"


def test_null_case_is_consistent(fast_params):
    train, test = dg.generate_shifted(
        kind="none", n_train=1000, n_test=1000, n_features=5, months=1, seed=3,
    )
    report = dg.adversarial_validate(train, test, fast_params)
    assert 0.4 < report.adv_auc < 0.6
    assert report.verdict == "consistent"


def test_plans_and_execution(fast_params):
    train, test = dg.generate_shifted(
        kind="covariate", magnitude=1.0, n_train=900, n_test=400,
        n_features=4, months=6, seed=11,
    )
    report = dg.adversarial_validate(train, test, fast_params)

    base = dg.baseline_cv_plan(train, k=3, seed=5)
    assert base.n_folds == 3
    train_ids, valid_ids = base.fold(0)
    assert not set(train_ids) & set(valid_ids)

    aug = dg.augmented_cv_plan(train, report, keep_fraction=0.5, k=3, seed=5)
    kept = dg.select_top_rows(train, report, 0.5)
    assert len(kept) == 450
    assert set(aug.fold(0)[1]) <= set(kept)

    outcome = dg.execute_plan(aug, train, test, fast_params)
    assert 0.0 <= outcome.test_auc <= 1.0
    assert len(outcome.per_fold_valid_auc) == 3

    model = dg.fit(train, None, fast_params)
    probs = model.predict(test)
    assert len(probs) == test.n_rows
    assert all(0.0 < p < 1.0 for p in probs)
    assert sum(model.feature_importance().values()) > 0


def test_model_round_trip(tmp_path, fast_params):
    train, _ = dg.generate_shifted(n_train=500, n_test=100, n_features=3, seed=9)
    model = dg.fit(train, None, dg.BoostParams(num_boost_round=20, seed=1))
    path = str(tmp_path / "model.json")
    model.save(path)
    again = dg.Model.load(path)
    assert again.predict(train) == model.predict(train)


def test_grid_and_report(tmp_path, fast_params):
    train, test = dg.generate_shifted(
        kind="covariate", magnitude=1.0, n_train=600, n_test=300,
        n_features=4, months=6, seed=13,
    )
    config = '{"k": 3, "seed": 2, "set3_weighted": true, "set4_keep_fractions": [1.0, 0.5]}'
    params = dg.BoostParams(num_boost_round=20, early_stopping_rounds=5, seed=2)
    report = dg.run_grid(train, test, params, config)
    assert report.set_counts == [0, 0, 1, 2, 0]
    assert len(report.rows) == 3
    out = tmp_path / "results"
    dg.emit_report(report, str(out))
    assert (out / "results.csv").exists()
    assert (out / "summary.json").exists()


def test_lending_club_pipeline(tmp_path):
    csv = tmp_path / "loans.csv"
    csv.write_text(
        "emp_length,fico_range_low,fico_range_high,annual_inc,revol_bal,loan_status\n"
        "10+ years,700,704,65535,9999,Fully Paid\n"
        "< 1 year,660,664,30000,100,Charged Off\n"
        "5 years,680,684,45000,500,Current\n"
    )
    schema = tmp_path / "schema.json"
    schema.write_text(
        '{"columns":[{"name":"emp_length","kind":"categorical"},'
        '{"name":"fico_range_low","kind":"numeric"},'
        '{"name":"fico_range_high","kind":"numeric"},'
        '{"name":"annual_inc","kind":"numeric"},'
        '{"name":"revol_bal","kind":"numeric"}],"label_column":"loan_status"}'
    )
    ds = dg.load_csv(str(csv), str(schema))
    ds = dg.encode_loan_status(ds)
    ds = dg.preprocess_lending_club(ds)
    assert ds.n_rows == 2
    assert ds.labels == [0, 1]
    assert ds.column("fico_score") == [702.0, 662.0]
    stats = {s["name"]: s for s in dg.summarize(ds)}
    assert stats["log_annual_inc"]["mean"] == pytest.approx(
        (math.log10(65536) + math.log10(30001)) / 2
    )
