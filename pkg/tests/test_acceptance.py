"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with -s to see them). Tolerances and runtime budgets are
pinned here, not configurable."""

import functools
import math
import time
from collections import Counter
from dataclasses import replace

import numpy as np
import pytest

from _oracles import metrics_oracle, nearest_template_accuracy
from seer import fusion
from seer.errors import OrderingViolationError
from seer.graphs import EdgeKind, Perturbation, PerturbationOp, apply_perturbation
from seer.model import (
    ClassifierConfig,
    ablate,
    compute_metrics,
    encode_dataset,
    grad_check,
    init_params,
    predict,
    train,
)
from seer.sequences import augment, build_vocab, corpus_stats, split_by_source, synth_corpus
from seer.spectral import (
    anchor_table,
    canonical_micrograph,
    laplacian,
    profile,
    random_member_graph,
    spectral_entropy,
    spectral_norm,
    spectrum,
)
from seer.timing import DEFAULT_MULTIPLIERS, ContextSymbol, TimingTable, duration, validate_table


def criterion(name):
    def decorate(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"\nACCEPTANCE  {name}: FAIL")
                raise
            print(f"\nACCEPTANCE  {name}: PASS")

        return wrapper

    return decorate


@criterion("anchor reproduction (Ψ=0.001, Δ=1.319, Θ=1.549, Π=2.581, <1s)")
def test_anchor_reproduction():
    start = time.perf_counter()
    table = anchor_table()
    elapsed = time.perf_counter() - start
    assert table.interface == 0.001
    assert table.abstract_superclass == pytest.approx(1.319, abs=5e-4)
    assert table.static_utility == pytest.approx(1.549, abs=5e-4)
    assert table.main_orchestrator == pytest.approx(2.581, abs=5e-4)
    assert elapsed < 1.0


@criterion("anchor ordering under recalibration (50 seeded draws)")
def test_anchor_ordering():
    default = anchor_table()
    assert 0.001 < default.abstract_superclass < default.static_utility < default.main_orchestrator

    # the star anchor for n in {3, 4} falls BELOW the path anchor
    # (H(S_3)=0.811, H(S_4)=1.252 < H(P_4)=1.319), so recalibrated utility
    # stars start at 5 members; the two boundary cases are pinned here
    h_p4 = default.abstract_superclass
    assert profile(canonical_micrograph("static", n_static=3)).entropy_bits < h_p4
    assert profile(canonical_micrograph("static", n_static=4)).entropy_bits < h_p4

    rng = np.random.default_rng(2024)
    for _ in range(50):
        n_static = int(rng.integers(5, 17))
        n_main = int(rng.integers(n_static + 1, 25))
        assert n_main > n_static >= 3
        table = anchor_table(n_static=n_static, n_main=n_main, k_abs=4)
        assert 0.001 < table.abstract_superclass < table.static_utility < table.main_orchestrator


@criterion("spectral functional correctness (P_4 closed form, H(K_2)=0, H<=log2 n)")
def test_spectral_functional_correctness():
    p4 = spectrum(laplacian(canonical_micrograph("abstract")))
    np.testing.assert_allclose(p4, [0.0, 2 - math.sqrt(2), 2.0, 2 + math.sqrt(2)], atol=1e-9)

    k2 = canonical_micrograph("main", n_main=2)
    assert profile(k2).entropy_bits == 0.0

    rng = np.random.default_rng(99)
    for trial in range(1000):
        n = int(rng.integers(3, 17))
        g = random_member_graph(n, float(rng.uniform(0.1, 0.9)), np.random.default_rng([99, trial]))
        h = profile(g).entropy_bits
        assert 0.0 <= h <= math.log2(n) + 1e-12


@criterion("Weyl locality bound (1000 seeded single-edge flips, 100% within bound, <30s)")
def test_weyl_locality():
    start = time.perf_counter()
    rng = np.random.default_rng(4242)
    for trial in range(1000):
        n = int(rng.integers(4, 17))
        g = random_member_graph(n, 0.4, np.random.default_rng([4242, trial]))
        ids = g.node_ids
        i, j = rng.choice(n, size=2, replace=False)
        a, b = ids[int(i)], ids[int(j)]
        if g.has_edge(a, b):
            flipped = apply_perturbation(g, Perturbation(op=PerturbationOp.REMOVE_EDGE, a=a, b=b))
        else:
            flipped = apply_perturbation(
                g, Perturbation(op=PerturbationOp.ADD_EDGE, a=a, b=b, edge_kind=EdgeKind.METHOD_CALL)
            )
        shift = float(np.abs(spectrum(laplacian(g)) - spectrum(laplacian(flipped))).max())
        bound = spectral_norm(laplacian(g) - laplacian(flipped))
        assert shift <= bound + 1e-9
        assert bound <= 2.0
    assert time.perf_counter() - start < 30.0


@criterion("entropy scale invariance (100 seeded positive scalings, ±1e-12)")
def test_scale_invariance():
    rng = np.random.default_rng(7)
    for trial in range(100):
        n = int(rng.integers(3, 14))
        g = random_member_graph(n, 0.5, np.random.default_rng([7, trial]))
        lam = spectrum(laplacian(g))
        c = float(rng.uniform(1e-3, 1e3))
        assert abs(spectral_entropy(c * lam) - spectral_entropy(lam)) <= 1e-12


@criterion("timing table (defaults exact, ordering enforced, linear in tau)")
def test_timing_table():
    table = TimingTable()
    expected = {"SIGMA": 2.50, "PHI": 0.25, "LAMBDA": 1.00, "OMEGA": 1.20, "GAMMA": 1.50, "T": 0.50, "XI": 4.00}
    for name, value in expected.items():
        assert table.multipliers[ContextSymbol[name]] == value

    bad = dict(DEFAULT_MULTIPLIERS)
    bad[ContextSymbol.OMEGA] = 0.9
    with pytest.raises(OrderingViolationError):
        validate_table(TimingTable(multipliers=bad))

    for sym in ContextSymbol:
        for tau in (0.25, 1.0, 2.0, 17.5):
            assert duration(sym, TimingTable(tau=tau)) == tau * duration(sym, TimingTable(tau=1.0))


@criterion("circular embedding (10k seeded unit-circle checks ±1e-12, baseline vector 1e-9)")
def test_circular_embedding():
    rng = np.random.default_rng(31337)
    values = rng.uniform(-20, 20, size=(10_000, 3))
    omegas = rng.uniform(1e-2, 5.0, size=10_000)
    for (h1, h2, t), omega in zip(values, omegas):
        v = fusion.circular_embed(h1, h2, t, omega)
        for k in range(3):
            assert abs(v[2 * k] ** 2 + v[2 * k + 1] ** 2 - 1.0) <= 1e-12

    got = fusion.circular_embed(1.549, 2.581, 2.5, omega=1.0)
    expected = [
        math.sin(1.549), math.cos(1.549),
        math.sin(2.581), math.cos(2.581),
        math.sin(2.5), math.cos(2.5),
    ]
    np.testing.assert_allclose(got, expected, atol=1e-9)


@criterion("fusion shape contract (d_model in {8, 64, 512}; block identity severs)")
def test_fusion_shapes():
    for d_model in (8, 64, 512):
        config = fusion.FusionConfig(d_model=d_model, omega=1.0, max_len=8, vocab_size=11)
        params = fusion.init_fusion_params(config, seed=1)
        out = fusion.fuse(3, 2, 1.549, 2.581, 2.5, params, config)
        assert out.shape == (d_model,)
        assert params.w_cat.shape == (d_model, 2 * d_model)

    config = fusion.FusionConfig(d_model=8, omega=1.0, max_len=8, vocab_size=11)
    params = fusion.init_fusion_params(config, seed=1)
    severed = fusion.FusionParams(
        token_table=params.token_table,
        w_freq=params.w_freq,
        b_freq=params.b_freq,
        w_cat=np.concatenate([np.eye(8), np.zeros((8, 8))], axis=1),
        b_cat=np.zeros(8),
    )
    out = fusion.fuse(3, 2, 1.549, 2.581, 2.5, severed, config)
    np.testing.assert_array_equal(out, params.token_table[3] + fusion.positional_encoding(2, 8))


@criterion("gradient correctness (full stack <=1e-3, linear head <=1e-6, <60s)")
def test_gradient_correctness():
    start = time.perf_counter()
    corpus = synth_corpus(4, 8, seed=3)
    labels = tuple(sorted({s.label for s in corpus}))
    vocab = build_vocab(corpus)
    stats = corpus_stats(corpus)
    omega = fusion.choose_omega(stats["max_h"], stats["max_t"])

    full = ClassifierConfig(d_model=16, n_heads=4, n_layers=2, dropout=0.0, n_classes=4, max_len=64, seed=3)
    dataset = encode_dataset(corpus[:6], vocab, labels, full)
    params = init_params(full, vocab.size, seed=2, head_init="uniform")
    report = grad_check(params, dataset, full, omega, n_coords=200, seed=5)
    assert report.n_checked >= 200
    assert report.max_rel_error <= 1e-3

    linear = replace(full, n_layers=0)
    params = init_params(linear, vocab.size, seed=2, head_init="uniform")
    report = grad_check(params, dataset, linear, omega, n_coords=200, seed=5)
    assert report.max_rel_error <= 1e-6
    assert time.perf_counter() - start < 60.0


@criterion("end-to-end learning (acc >= 0.90 vs oracle >= 0.95, metrics 1e-9, deterministic, <5min)")
def test_end_to_end_learning():
    start = time.perf_counter()
    # 270 sequences cannot be split into four equal classes; the nearest
    # class-balanced realization is 4 classes x 68 over 4 sources each,
    # which the 3:1 source split turns into 204 train / 68 test
    corpus = synth_corpus(4, 68, seed=7)
    config = ClassifierConfig(seed=7)

    bundle, report = train(corpus, config)
    assert report.n_train == 204
    assert report.n_test == 68
    assert report.accuracy >= 0.90

    train_seqs, test_seqs = split_by_source(corpus, 0.25, seed=config.seed)
    oracle_accuracy = nearest_template_accuracy(train_seqs, test_seqs)
    assert oracle_accuracy >= 0.95

    test_set = encode_dataset(test_seqs, bundle.vocab, bundle.labels, bundle.config)
    predictions = predict(bundle, test_set)
    ours = compute_metrics(test_set.y, predictions, bundle.labels)
    independent = metrics_oracle(test_set.y, predictions, len(bundle.labels))
    for key in ("accuracy", "macro_precision", "macro_recall", "macro_f1"):
        assert ours[key] == pytest.approx(independent[key], abs=1e-9)
    assert report.accuracy == pytest.approx(independent["accuracy"], abs=1e-9)

    _, report_again = train(corpus, config)
    assert report_again == report

    assert time.perf_counter() - start < 300.0


@criterion("augmentation invariance (100 seeded multiset checks + permutation-equivariant logits)")
def test_augmentation_invariance():
    corpus = synth_corpus(4, 10, seed=13)

    def signature(seq):
        return Counter((e.context, e.h_caller, e.h_callee, e.t) for e in seq.events)

    rng = np.random.default_rng(555)
    for _ in range(100):
        seq = corpus[int(rng.integers(len(corpus)))]
        assert signature(augment(seq, int(rng.integers(2**31)))) == signature(seq)

    # stronger check at initialization: renaming generic roles while applying
    # the same permutation to the (untied) embedding rows leaves logits
    # bit-identical
    from seer.model import ModelBundle, classify
    from seer.sequences import GENERIC_ROLES, apply_role_permutation

    labels = tuple(sorted({s.label for s in corpus}))
    vocab = build_vocab(corpus)
    stats = corpus_stats(corpus)
    omega = fusion.choose_omega(stats["max_h"], stats["max_t"])
    config = ClassifierConfig(seed=13)
    params = init_params(config, vocab.size, seed=13, head_init="uniform")
    bundle = ModelBundle(params=params, config=config, vocab=vocab, labels=labels, omega=omega)

    present = [c for c in GENERIC_ROLES if vocab.id_of(c) != 1]
    mapping = dict(zip(present, present[1:] + present[:1]))
    for seq in corpus[:10]:
        augmented = apply_role_permutation(seq, mapping)
        permuted = dict(params)
        table = params["token_table"].copy()
        for src, dst in mapping.items():
            table[vocab.id_of(dst)] = params["token_table"][vocab.id_of(src)]
        permuted["token_table"] = table
        permuted_bundle = ModelBundle(
            params=permuted, config=config, vocab=vocab, labels=labels, omega=omega
        )
        np.testing.assert_array_equal(classify(permuted_bundle, augmented), classify(bundle, seq))


@criterion("ablation harness (exactly four factorial rows, no ordering asserted)")
def test_ablation_harness():
    corpus = synth_corpus(4, 8, seed=17)
    config = ClassifierConfig(d_model=16, n_heads=2, n_layers=1, dropout=0.0, n_classes=4, epochs=1, seed=17)
    rows = ablate(corpus, config)
    assert len(rows) == 4
    assert [r["variant"] for r in rows] == ["baseline", "time-only", "roles-only", "both"]
    for row in rows:
        assert set(row) == {"variant", "accuracy", "macro_f1", "macro_precision", "macro_recall"}
        assert 0.0 <= row["accuracy"] <= 1.0
        assert 0.0 <= row["macro_f1"] <= 1.0
