import math

import pytest

import fraudlab


def test_low_level_helpers():
    assert fraudlab.nearest_rank_quantile([float(i) for i in range(1, 101)], 0.95) == 95.0
    assert fraudlab.auc([True, True, False, False], [0.9, 0.8, 0.2, 0.1]) == 1.0
    assert fraudlab.auc([True, False], [0.5, 0.5]) == 0.5
    assert math.isclose(
        fraudlab.weighted_score(True, True, False, 0.5), 1.625, rel_tol=0, abs_tol=1e-12
    )
    assert math.isclose(
        fraudlab.weighted_score(True, True, True, 1.0), 2.18, rel_tol=0, abs_tol=1e-12
    )


def test_generate_corpus(tmp_path):
    fraudlab.generate_corpus(str(tmp_path), n_transactions=5000, seed=7)
    for name in (
        "transactions.csv",
        "cardholders.csv",
        "merchants.csv",
        "categories.csv",
        "labels.csv",
    ):
        assert (tmp_path / name).is_file(), name
    header = (tmp_path / "labels.csv").read_text().splitlines()[0]
    assert header == "txn_id,is_fraud,typology"


def test_pipeline_run_until_risk(tmp_path):
    config = "\n".join(
        [
            "[gen]",
            "n_transactions = 6000",
            "[autoencoder]",
            "max_epochs = 15",
        ]
    )
    res = fraudlab.run(config, seed=42, out_dir=str(tmp_path), until="risk")
    assert res["n_transactions"] >= 5900
    assert 0.005 <= res["flag_fraction"]["iforest"] <= 0.015
    assert 0.01 <= res["queue_fraction"] <= 0.06
    assert res["eval"] == []  # eval stage not reached


def test_pipeline_eval_report_and_determinism(tmp_path):
    config = "[gen]\nn_transactions = 6000\n[autoencoder]\nmax_epochs = 15\n"
    a = fraudlab.run(config, seed=11, until="eval")
    b = fraudlab.run(config, seed=11, until="eval")
    assert a["eval_csv"] == b["eval_csv"]
    detectors = {row["detector"] for row in a["eval"]}
    assert {
        "iforest",
        "ocsvm",
        "autoencoder",
        "combined_queue",
        "combined_queue_threshold",
    } <= detectors
    for row in a["eval"]:
        assert 0.0 <= row["auc_roc"] <= 1.0


def test_bad_inputs_raise():
    with pytest.raises(ValueError):
        fraudlab.run("", until="nope")
    with pytest.raises(RuntimeError):
        fraudlab.run("[gen]\nbogus_key = 1\n")
