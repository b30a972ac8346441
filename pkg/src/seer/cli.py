"""Single entry point exposing every pipeline stage.

stdout carries data (JSON, or CSV under --csv); stderr carries diagnostics.
Exit code 0 iff no error value was produced. All randomness flows from
--seed flags; sub-seeds are derived with fixed integer tags.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import warnings

import numpy as np

from . import fusion, model, sequences, spectral, timing
from .errors import SchemaError, SeerError
from .graphs import Perturbation, apply_perturbation, load_graph


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, ensure_ascii=False, indent=2)
    sys.stdout.write("\n")


def _emit_csv(rows: list[dict]) -> None:
    if not rows:
        return
    writer = csv.DictWriter(sys.stdout, fieldnames=list(rows[0].keys()))
    writer.writeheader()
    writer.writerows(rows)


def _load_json_arg(raw: str):
    """Inline JSON, or @path to read it from a file."""
    if raw.startswith("@"):
        with open(raw[1:], "r", encoding="utf-8") as fh:
            return json.load(fh)
    return json.loads(raw)


def _pipeline_config(path: str | None) -> tuple[timing.TimingTable, float | None]:
    """Timing table plus optional omega override from --config / SEER_CONFIG."""
    path = path or os.environ.get("SEER_CONFIG")
    if path is None:
        return timing.TimingTable(), None
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    table = timing.timing_table_from_dict(doc)
    omega = doc.get("omega")
    if omega is not None and (not isinstance(omega, (int, float)) or omega <= 0):
        raise SchemaError(f"omega must be a positive number, got {omega!r}", element="omega")
    return table, (float(omega) if omega is not None else None)


def _read_graph(path: str, strict: bool):
    with open(path, "rb") as fh:
        return load_graph(fh, strict=strict)


def _read_corpus(path: str, enforce_lengths: bool = True):
    with open(path, "r", encoding="utf-8") as fh:
        return sequences.read_jsonl(fh, enforce_lengths=enforce_lengths)


def _parse_variants(spec) -> dict[str, list[Perturbation]]:
    if isinstance(spec, list):
        spec = {"P1": spec}
    if not isinstance(spec, dict):
        raise SchemaError("perturbation spec must be a JSON object or array")
    return {
        name: [Perturbation.from_dict(raw) for raw in ops]
        for name, ops in spec.items()
    }


# --- command handlers ---------------------------------------------------------

def cmd_entropy(args) -> None:
    g = _read_graph(args.graph, strict=not args.lenient)
    out = spectral.profile(g).to_dict()
    out["class_name"] = g.class_name
    _emit(out)


def cmd_anchors(args) -> None:
    table = spectral.anchor_table(n_static=args.n_static, n_main=args.n_main, k_abs=args.k_abs)
    _emit(table.to_dict())


def cmd_report_anchors(args) -> None:
    table = spectral.anchor_table(n_static=args.n_static, n_main=args.n_main, k_abs=args.k_abs)
    rows = [
        {"role": "Superclass (abstract)", "symbol": "Δ", "entropy": table.abstract_superclass},
        {"role": "Interface (edgeless)", "symbol": "Ψ", "entropy": table.interface},
        {"role": "Main class (orchestrator)", "symbol": "Π", "entropy": table.main_orchestrator},
        {"role": "Static/utility class", "symbol": "Θ", "entropy": table.static_utility},
        {"role": "Other objects", "symbol": "A,B...Z", "entropy": "role-specific"},
    ]
    if args.csv:
        _emit_csv(rows)
    else:
        _emit(rows)


def _weyl_vs_base(base, variant):
    """Weyl verdict against the base graph, embedding the base with isolated
    nodes when the variant only added members (the standard same-size
    comparison for node additions). None when node sets are incomparable."""
    if variant.node_ids == base.node_ids:
        return spectral.weyl_check(base, variant).to_dict()
    base_ids = set(base.node_ids)
    variant_ids = set(variant.node_ids)
    if base_ids < variant_ids:
        from .graphs import build_graph

        extra = [variant.node(node_id) for node_id in sorted(variant_ids - base_ids)]
        padded = build_graph(base.class_name, base.nodes + tuple(extra), base.edges)
        return spectral.weyl_check(padded, variant).to_dict()
    return None


def _variant_report(args) -> list[dict]:
    g = _read_graph(args.graph, strict=not args.lenient)
    base = spectral.profile(g)
    rows = [
        {
            "variant": "Base",
            "n": base.n,
            "eigenvalues": list(base.eigenvalues),
            "normalized_spectrum": list(base.distribution),
            "entropy_bits": base.entropy_bits,
            "entropy_delta": 0.0,
            "weyl": None,
        }
    ]
    for name, ops in _parse_variants(_load_json_arg(args.ops)).items():
        variant = g
        for op in ops:
            variant = apply_perturbation(variant, op)
        prof = spectral.profile(variant)
        rows.append(
            {
                "variant": name,
                "n": prof.n,
                "eigenvalues": list(prof.eigenvalues),
                "normalized_spectrum": list(prof.distribution),
                "entropy_bits": prof.entropy_bits,
                "entropy_delta": prof.entropy_bits - base.entropy_bits,
                "weyl": _weyl_vs_base(g, variant),
            }
        )
    return rows


def cmd_perturb_scan(args) -> None:
    rows = _variant_report(args)
    if args.csv:
        flat = [
            {
                "variant": r["variant"],
                "n": r["n"],
                "entropy_bits": r["entropy_bits"],
                "entropy_delta": r["entropy_delta"],
                "weyl_satisfied": (r["weyl"] or {}).get("satisfied", ""),
            }
            for r in rows
        ]
        _emit_csv(flat)
    else:
        _emit(rows)


def cmd_report_locality(args) -> None:
    cmd_perturb_scan(args)


def cmd_cospectral_scan(args) -> None:
    report = spectral.cospectrality_scan(
        n_graphs=args.count,
        n_nodes_range=(args.n_min, args.n_max),
        edge_prob=args.edge_prob,
        seed=args.seed,
    ).to_dict()
    if args.csv:
        _emit_csv([report])
    else:
        _emit(report)


def cmd_enrich(args) -> None:
    table, _ = _pipeline_config(args.config)
    triads = [tuple(t) for t in _load_json_arg(args.triads)]
    entropies = _load_json_arg(args.entropies)
    generic = {k: v for k, v in entropies.items() if k in sequences.GENERIC_ROLES}
    entropy_of = sequences.role_entropy_map(spectral.anchor_table(), generic)
    seq = sequences.enrich(triads, entropy_of, table, label=args.label, source=args.source)
    sequences.write_jsonl([seq], sys.stdout)


def cmd_augment(args) -> None:
    corpus = _read_corpus(args.corpus)
    out = []
    for index, seq in enumerate(corpus):
        for j in range(args.factor):
            sub_seed = int(np.random.default_rng([args.seed, index, j]).integers(2**31))
            out.append(sequences.augment(seq, sub_seed))
    sequences.write_jsonl(out, sys.stdout)


def cmd_synth(args) -> None:
    corpus = sequences.synth_corpus(
        args.classes, args.per_class, args.seed, sources_per_class=args.sources_per_class
    )
    sequences.write_jsonl(corpus, sys.stdout)


def cmd_tokenize(args) -> None:
    corpus = _read_corpus(args.corpus)
    vocab = sequences.build_vocab(corpus)
    for seq in corpus:
        doc = sequences.tokenize(seq, vocab, args.max_len).to_dict()
        sys.stdout.write(json.dumps(doc, ensure_ascii=False) + "\n")


def _classifier_config(path: str | None, seed: int | None) -> model.ClassifierConfig:
    if path is None:
        config = model.ClassifierConfig()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            config = model.ClassifierConfig.from_dict(json.load(fh))
    if seed is not None:
        config = model.ClassifierConfig.from_dict({**config.to_dict(), "seed": seed})
    return config


def cmd_train(args) -> None:
    corpus = _read_corpus(args.corpus)
    config = _classifier_config(args.config, args.seed)
    bundle, report = model.train(corpus, config)
    if args.out:
        model.save_bundle(args.out, bundle)
    _emit(report.to_dict())


def cmd_eval(args) -> None:
    bundle = model.load_bundle(args.ckpt)
    corpus = _read_corpus(args.corpus)
    metrics = model.evaluate(bundle, corpus)
    if args.csv:
        labels = list(bundle.labels)
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["true\\pred"] + labels)
        for label, row in zip(labels, metrics["confusion"]):
            writer.writerow([label] + list(row))
        sys.stdout.write(buf.getvalue())
    else:
        out = dict(metrics)
        out["confusion"] = [list(r) for r in out["confusion"]]
        out["warnings"] = list(out["warnings"])
        _emit(out)


def cmd_gradcheck(args) -> None:
    config = _classifier_config(args.config, args.seed)
    config = model.ClassifierConfig.from_dict({**config.to_dict(), "dropout": 0.0})
    corpus = sequences.synth_corpus(config.n_classes, 8, config.seed)
    labels = tuple(sorted({s.label for s in corpus}))
    vocab = sequences.build_vocab(corpus)
    stats = sequences.corpus_stats(corpus)
    omega = config.omega or fusion.choose_omega(stats["max_h"], stats["max_t"])
    dataset = model.encode_dataset(corpus[: args.batch], vocab, labels, config)
    params = model.init_params(config, vocab.size, head_init="uniform")
    report = model.grad_check(
        params, dataset, config, omega,
        epsilon=args.epsilon, n_coords=args.coords, seed=config.seed,
    )
    _emit(report.to_dict())


def cmd_ablate(args) -> None:
    if args.variants != "all":
        raise SchemaError(f"only --variants all is supported, got {args.variants!r}")
    corpus = _read_corpus(args.corpus)
    config = _classifier_config(args.config, args.seed)
    rows = model.ablate(corpus, config)
    if args.csv:
        _emit_csv(rows)
    else:
        _emit(rows)


# --- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seer", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(handler=handler)
        return p

    p = add("entropy", cmd_entropy, help="spectral profile of one member graph")
    p.add_argument("graph")
    p.add_argument("--lenient", action="store_true", help="warn on unknown fields instead of rejecting")

    for name, handler in (("anchors", cmd_anchors), ("report-anchors", cmd_report_anchors)):
        p = add(name, handler, help="baseline entropy anchors from canonical micrographs")
        p.add_argument("--n-static", type=int, default=5)
        p.add_argument("--n-main", type=int, default=13)
        p.add_argument("--k-abs", type=int, default=4)
        if name == "report-anchors":
            p.add_argument("--csv", action="store_true")

    for name, handler in (("perturb-scan", cmd_perturb_scan), ("report-locality", cmd_report_locality)):
        p = add(name, handler, help="spectra and entropy deltas of perturbed variants")
        p.add_argument("graph")
        p.add_argument("--ops", required=True, help="JSON perturbation spec (inline or @file)")
        p.add_argument("--lenient", action="store_true")
        p.add_argument("--csv", action="store_true")

    p = add("cospectral-scan", cmd_cospectral_scan, help="random-graph spectrum collision scan")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-min", type=int, default=6)
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--edge-prob", type=float, default=0.3)
    p.add_argument("--csv", action="store_true")

    p = add("enrich", cmd_enrich, help="attach entropies and durations to raw triads")
    p.add_argument("--triads", required=True, help="JSON array of [caller, context, callee] (inline or @file)")
    p.add_argument("--entropies", required=True, help="JSON object: generic symbol -> entropy bits")
    p.add_argument("--label", default=None)
    p.add_argument("--source", default="cli")
    p.add_argument("--config", default=None, help="timing/omega config JSON (SEER_CONFIG fallback)")

    p = add("augment", cmd_augment, help="entropy-preserving symbol permutation")
    p.add_argument("--corpus", required=True)
    p.add_argument("--factor", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)

    p = add("synth", cmd_synth, help="deterministic labeled synthetic corpus")
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--per-class", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sources-per-class", type=int, default=4)

    p = add("tokenize", cmd_tokenize, help="token ids, attention mask and side channel")
    p.add_argument("--corpus", required=True)
    p.add_argument("--max-len", type=int, default=64)

    p = add("train", cmd_train, help="train the toy classifier")
    p.add_argument("--corpus", required=True)
    p.add_argument("--config", default=None, help="classifier config JSON")
    p.add_argument("--out", default=None, help="checkpoint path")
    p.add_argument("--seed", type=int, default=None)

    p = add("eval", cmd_eval, help="evaluate a checkpoint on a corpus")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--csv", action="store_true", help="confusion matrix as CSV")

    p = add("gradcheck", cmd_gradcheck, help="analytic vs finite-difference gradients")
    p.add_argument("--config", default=None, help="classifier config JSON")
    p.add_argument("--epsilon", type=float, default=1e-5)
    p.add_argument("--coords", type=int, default=200)
    p.add_argument("--batch", type=int, default=8)
    p.add_argument("--seed", type=int, default=None)

    p = add("ablate", cmd_ablate, help="factorial enrichment ablation (4 variants)")
    p.add_argument("--corpus", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--variants", default="all")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--csv", action="store_true")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            try:
                args.handler(args)
            finally:
                for w in caught:
                    sys.stderr.write(f"warning: {w.message}\n")
    except SeerError as exc:
        json.dump(exc.to_dict(), sys.stderr, ensure_ascii=False)
        sys.stderr.write("\n")
        return 1
    except OSError as exc:
        json.dump({"error": "io_error", "detail": str(exc)}, sys.stderr, ensure_ascii=False)
        sys.stderr.write("\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
