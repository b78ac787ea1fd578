"""Smoke tests for the _ahdd extension: import, core operations, and a
micro training loop. Runs standalone (python smoke_test.py) or under pytest.
"""

import math
import os
import sys
import tempfile

import _ahdd as ahdd


def test_tokenize():
    assert ahdd.tokenize("Initial hematocrit 27.8") == ["initial", "hematocrit"]
    assert ahdd.tokenize("") == []


def _toy_hierarchy(tmp):
    path = os.path.join(tmp, "codes.tsv")
    with open(path, "w") as f:
        f.write("285\tOther and unspecified anemias\n")
        f.write("285.1\tAcute posthemorrhagic anemia\n")
        f.write("285.8\tOther specified anemias\n")
    return ahdd.load_hierarchy(path)


def test_hierarchy():
    with tempfile.TemporaryDirectory() as tmp:
        h = _toy_hierarchy(tmp)
        assert h.num_labels == 3
        assert h.siblings_of("285.1") == {"285.8"}
        assert ahdd.derive_parent("285.1") == "285"
        assert ahdd.derive_parent("285") is None
        assert h.label_index(h.code_at(1)) == 1


def test_attention_and_losses():
    weights = ahdd.attention_weights([[0.0, 0.0]], [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    assert len(weights) == 1 and len(weights[0]) == 3
    assert abs(sum(weights[0]) - 1.0) < 1e-9

    v = [[1.0, 0.0], [0.0, 2.0]]
    assert abs(ahdd.loss_sim(v, v)) < 1e-12
    assert abs(ahdd.loss_dis(v, v) - 1.0) < 1e-12
    assert ahdd.loss_dis(v, None) == 0.0
    assert abs(ahdd.mean_label_cosine(v, v) - 1.0) < 1e-12

    assert abs(ahdd.bce([0.5, 0.5], [1, 0]) - 2.0 * math.log(2.0)) < 1e-12


def test_metrics():
    probs = [[0.9, 0.1], [0.2, 0.8]]
    gold = [[1.0, 0.0], [0.0, 1.0]]
    macro, micro = ahdd.micro_macro_f1(probs, gold, 0.5)
    assert macro == 1.0 and micro == 1.0
    macro_auc, micro_auc = ahdd.micro_macro_auc(probs, gold)
    assert macro_auc == 1.0 and micro_auc == 1.0
    assert ahdd.precision_at_k(probs, gold, 1) == 1.0


def test_generate_train_predict():
    with tempfile.TemporaryDirectory() as tmp:
        spec = ahdd.SyntheticSpec()
        spec.num_codes = 6
        spec.branching = 2
        spec.train_docs = 40
        spec.dev_docs = 10
        spec.test_docs = 10
        spec.note_length = 30
        spec.vocab_size = 60
        spec.seed = 5
        paths = ahdd.generate_synthetic(spec, tmp)

        hierarchy = ahdd.load_hierarchy(paths["descriptions"])
        raw = ahdd.load_jsonl_raw(paths["train"])
        vocab = ahdd.build_vocab(raw, hierarchy, 1)

        config = ahdd.TrainingConfig()
        config.emb_dim = 16
        config.hidden_dim = 8
        config.epochs = 2
        config.seed = 5
        train_docs = ahdd.load_jsonl(paths["train"], vocab, hierarchy, config.max_length)
        dev_docs = ahdd.load_jsonl(paths["dev"], vocab, hierarchy, config.max_length)

        model = ahdd.Model(config, hierarchy, vocab)
        result = ahdd.train(model, train_docs, dev_docs, config)
        assert len(result.epochs) == 2
        assert all(math.isfinite(e.total) for e in result.epochs)

        probs, codes = model.predict(dev_docs[0], 0.5)
        assert len(probs) == hierarchy.num_labels
        assert all(0.0 < p < 1.0 for p in probs)
        assert set(codes) <= set(hierarchy.codes())

        row = model.attention_row(dev_docs[0], hierarchy.code_at(0))
        assert abs(sum(row) - 1.0) < 1e-6

        ckpt = os.path.join(tmp, "model.ahdd")
        ahdd.save_checkpoint(ckpt, model, config)
        loaded, loaded_config = ahdd.load_checkpoint(ckpt, hierarchy)
        assert loaded_config.seed == 5
        reloaded_probs = loaded.predict_probabilities(dev_docs[0])
        assert reloaded_probs == probs

        assert "embeddings" in model.parameter_names
        assert "attention.query_proj" in model.parameter_names


def test_unknown_label_raises():
    with tempfile.TemporaryDirectory() as tmp:
        h = _toy_hierarchy(tmp)
        try:
            h.label_index("999")
        except Exception as e:  # noqa: BLE001 - the binding maps Error to AhddError
            assert "999" in str(e)
        else:
            raise AssertionError("expected a lookup error")


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for test in tests:
        test()
        print(f"ok {test.__name__}")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    sys.exit(main())
