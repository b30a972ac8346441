"""Toy transformer encoder + softmax head over fused inputs.

Pure-numpy forward AND backward so the analytic gradients can be checked
against central finite differences. Post-norm blocks, key-side and
query-side attention masking (masked positions never attend nor are
attended, so PAD content cannot leak into the logits), CLS pooling,
Adam updates, deterministic under (config, seed, corpus).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from . import fusion
from .checkpoint import load_tensors, save_tensors
from .errors import NonFiniteError, ShapeError, SplitError
from .sequences import (
    BssSequence,
    Vocabulary,
    build_vocab,
    corpus_stats,
    split_by_source,
    tokenize,
)

VARIANTS = ("baseline", "time-only", "roles-only", "both")


@dataclass(frozen=True)
class ClassifierConfig:
    """Toy-scale defaults; `full_scale` switches to the full-size configuration."""

    d_model: int = 64
    n_heads: int = 4
    n_layers: int = 2
    d_ff: int | None = None
    dropout: float = 0.1
    n_classes: int = 4
    lr: float = 1e-3
    batch_size: int = 32
    epochs: int = 30
    seed: int = 0
    max_len: int = 64
    variant: str = "both"
    omega: float | None = None
    ln_eps: float = 1e-5

    def __post_init__(self):
        if self.d_model % 2 != 0 or self.d_model % self.n_heads != 0:
            raise ShapeError(f"d_model {self.d_model} must be even and divisible by n_heads {self.n_heads}")
        if not (0.0 <= self.dropout < 1.0):
            raise ShapeError(f"dropout must be in [0, 1), got {self.dropout}")
        if not (1 <= self.n_classes <= 23):
            raise ShapeError(f"n_classes must be in [1, 23], got {self.n_classes}")
        if self.variant not in VARIANTS:
            raise ShapeError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.d_ff is None:
            object.__setattr__(self, "d_ff", 4 * self.d_model)

    @classmethod
    def full_scale(cls, **overrides) -> "ClassifierConfig":
        base = dict(
            d_model=512, n_heads=16, n_layers=8, dropout=0.5, n_classes=23,
            lr=1e-4, batch_size=64, epochs=160,
        )
        base.update(overrides)
        return cls(**base)

    @classmethod
    def from_dict(cls, doc: Mapping) -> "ClassifierConfig":
        allowed = set(cls.__dataclass_fields__)
        unknown = set(doc) - allowed
        if unknown:
            raise ShapeError(f"unknown config fields {sorted(unknown)}", element=sorted(unknown)[0])
        return cls(**doc)

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in self.__dataclass_fields__}


# --- parameters ---------------------------------------------------------------

def _uniform(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int) -> np.ndarray:
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


def init_params(
    config: ClassifierConfig,
    vocab_size: int,
    seed: int | None = None,
    head_init: str = "zero",
) -> dict[str, np.ndarray]:
    """`head_init="zero"` keeps initial probabilities uniform (training
    default); gradient checking wants a generic point, so it passes
    "uniform" to give every path a nonzero gradient."""
    seed = config.seed if seed is None else seed
    rng = np.random.default_rng([seed, 0])
    d, dff, c = config.d_model, config.d_ff, config.n_classes
    params: dict[str, np.ndarray] = {
        "token_table": _uniform(rng, (vocab_size, d), d),
        "w_freq": _uniform(rng, (d, 6), 6),
        "b_freq": _uniform(rng, (d,), 6),
        "w_cat": _uniform(rng, (d, 2 * d), 2 * d),
        "b_cat": _uniform(rng, (d,), 2 * d),
    }
    for i in range(config.n_layers):
        p = f"layer{i}."
        for name in ("wq", "wk", "wv", "wo"):
            params[p + name] = _uniform(rng, (d, d), d)
        for name in ("bq", "bk", "bv", "bo"):
            params[p + name] = np.zeros(d)
        params[p + "ln1_g"] = np.ones(d)
        params[p + "ln1_b"] = np.zeros(d)
        params[p + "ffn_w1"] = _uniform(rng, (d, dff), d)
        params[p + "ffn_b1"] = np.zeros(dff)
        params[p + "ffn_w2"] = _uniform(rng, (dff, d), dff)
        params[p + "ffn_b2"] = np.zeros(d)
        params[p + "ln2_g"] = np.ones(d)
        params[p + "ln2_b"] = np.zeros(d)
    if head_init == "uniform":
        params["head_w"] = _uniform(rng, (d, c), d)
    else:
        # zero head: uniform probabilities at initialization (loss = ln n_classes)
        params["head_w"] = np.zeros((d, c))
    params["head_b"] = np.zeros(c)
    return params


# --- forward / backward --------------------------------------------------------

def _dropout_mask(rng: np.random.Generator | None, shape: tuple[int, ...], p: float) -> np.ndarray | None:
    if rng is None or p <= 0.0:
        return None
    return (rng.random(shape) >= p) / (1.0 - p)


def _layer_norm(z: np.ndarray, g: np.ndarray, b: np.ndarray, eps: float):
    mu = z.mean(axis=-1, keepdims=True)
    xc = z - mu
    var = (xc * xc).mean(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + eps)
    xhat = xc * inv_std
    return g * xhat + b, (xhat, inv_std, g)


def _layer_norm_backward(dout: np.ndarray, cache):
    xhat, inv_std, g = cache
    dg = (dout * xhat).sum(axis=(0, 1))
    db = dout.sum(axis=(0, 1))
    dxhat = dout * g
    dz = inv_std * (
        dxhat
        - dxhat.mean(axis=-1, keepdims=True)
        - xhat * (dxhat * xhat).mean(axis=-1, keepdims=True)
    )
    return dz, dg, db


def _split_heads(x: np.ndarray, n_heads: int) -> np.ndarray:
    b, l, d = x.shape
    return x.reshape(b, l, n_heads, d // n_heads).transpose(0, 2, 1, 3)


def _merge_heads(x: np.ndarray) -> np.ndarray:
    b, h, l, dh = x.shape
    return x.transpose(0, 2, 1, 3).reshape(b, l, h * dh)


def forward(
    params: Mapping[str, np.ndarray],
    ids: np.ndarray,
    side: np.ndarray,
    mask: np.ndarray,
    config: ClassifierConfig,
    omega: float,
    *,
    dropout_rng: np.random.Generator | None = None,
    collect_attention: bool = False,
) -> tuple[np.ndarray, dict]:
    """Logits (B, n_classes) from token ids, side channel and mask.

    `dropout_rng=None` disables dropout (evaluation / gradient checking).
    """
    ids = np.atleast_2d(np.asarray(ids, dtype=np.int64))
    side = np.asarray(side, dtype=np.float64)
    if side.ndim == 2:
        side = side[None]
    mask = np.atleast_2d(np.asarray(mask, dtype=np.float64))
    b, l = ids.shape
    if side.shape != (b, l, 3) or mask.shape != (b, l):
        raise ShapeError(f"inconsistent input shapes ids={ids.shape} side={side.shape} mask={mask.shape}")
    d = config.d_model
    p = config.dropout

    cache: dict = {"ids": ids, "mask": mask, "config": config}

    # dual-path fusion
    pe = fusion.positional_encoding_table(config.max_len, d)[:l]
    symbol = params["token_table"][ids] + pe
    v6 = fusion.circular_embed_batch(side, omega)
    freq = v6 @ params["w_freq"].T + params["b_freq"]
    concat = np.concatenate([symbol, freq], axis=-1)
    x = concat @ params["w_cat"].T + params["b_cat"]
    drop0 = _dropout_mask(dropout_rng, x.shape, p)
    if drop0 is not None:
        x = x * drop0
    cache["fusion"] = (v6, concat, drop0)

    x, enc_cache = _encode(params, x, mask, config, dropout_rng=dropout_rng, collect_attention=collect_attention)
    cache.update(enc_cache)

    cls = x[:, 0, :]
    logits = cls @ params["head_w"] + params["head_b"]
    cache["cls"] = cls
    cache["x_final"] = x
    return logits, cache


def _encode(
    params: Mapping[str, np.ndarray],
    x: np.ndarray,
    mask: np.ndarray,
    config: ClassifierConfig,
    *,
    dropout_rng: np.random.Generator | None = None,
    collect_attention: bool = False,
) -> tuple[np.ndarray, dict]:
    """Run the encoder stack on already-fused inputs (B, L, d_model)."""
    d, p = config.d_model, config.dropout
    cache: dict = {"layers": []}
    key_bias = np.where(mask > 0, 0.0, -np.inf)[:, None, None, :]
    query_keep = (mask > 0).astype(np.float64)[:, None, :, None]
    if collect_attention:
        cache["attention"] = []

    for i in range(config.n_layers):
        pref = f"layer{i}."
        lc: dict = {"x_in": x}

        q = _split_heads(x @ params[pref + "wq"] + params[pref + "bq"], config.n_heads)
        k = _split_heads(x @ params[pref + "wk"] + params[pref + "bk"], config.n_heads)
        v = _split_heads(x @ params[pref + "wv"] + params[pref + "bv"], config.n_heads)
        dh = d // config.n_heads
        scores = (q @ k.transpose(0, 1, 3, 2)) / np.sqrt(dh) + key_bias
        scores_max = scores.max(axis=-1, keepdims=True)
        expd = np.exp(scores - scores_max)
        attn_w = expd / expd.sum(axis=-1, keepdims=True)
        attn_w = attn_w * query_keep  # masked positions do not attend
        if collect_attention:
            cache["attention"].append(attn_w)
        heads = attn_w @ v
        attn_out = _merge_heads(heads)
        proj = attn_out @ params[pref + "wo"] + params[pref + "bo"]
        drop_a = _dropout_mask(dropout_rng, proj.shape, p)
        if drop_a is not None:
            proj = proj * drop_a
        lc.update(q=q, k=k, v=v, attn_w=attn_w, attn_out=attn_out, drop_a=drop_a, dh=dh)

        x1, ln1_cache = _layer_norm(x + proj, params[pref + "ln1_g"], params[pref + "ln1_b"], config.ln_eps)
        lc["ln1"] = ln1_cache

        h_pre = x1 @ params[pref + "ffn_w1"] + params[pref + "ffn_b1"]
        h_act = np.maximum(h_pre, 0.0)
        f = h_act @ params[pref + "ffn_w2"] + params[pref + "ffn_b2"]
        drop_f = _dropout_mask(dropout_rng, f.shape, p)
        if drop_f is not None:
            f = f * drop_f
        lc.update(x1=x1, h_pre=h_pre, h_act=h_act, drop_f=drop_f)

        x, ln2_cache = _layer_norm(x1 + f, params[pref + "ln2_g"], params[pref + "ln2_b"], config.ln_eps)
        lc["ln2"] = ln2_cache
        cache["layers"].append(lc)
    return x, cache


def encoder_forward(
    params: Mapping[str, np.ndarray],
    fused_tokens: np.ndarray,
    mask: np.ndarray,
    config: ClassifierConfig,
    *,
    collect_attention: bool = False,
) -> np.ndarray | tuple[np.ndarray, list]:
    """Encoder stack on an already-fused (max_len, d_model) matrix.

    With n_layers=0 this is the identity on its input.
    """
    fused_tokens = np.asarray(fused_tokens, dtype=np.float64)
    single = fused_tokens.ndim == 2
    if single:
        fused_tokens = fused_tokens[None]
    mask = np.atleast_2d(np.asarray(mask, dtype=np.float64))
    if fused_tokens.shape[-1] != config.d_model or fused_tokens.shape[:2] != mask.shape:
        raise ShapeError(
            f"fused tokens {fused_tokens.shape} inconsistent with mask {mask.shape} / d_model {config.d_model}"
        )
    out, cache = _encode(params, fused_tokens, mask, config, collect_attention=collect_attention)
    if single:
        out = out[0]
    if collect_attention:
        return out, cache["attention"]
    return out


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def cross_entropy(logits: np.ndarray, labels: np.ndarray) -> float:
    z = logits - logits.max(axis=-1, keepdims=True)
    log_probs = z - np.log(np.exp(z).sum(axis=-1, keepdims=True))
    return float(-log_probs[np.arange(len(labels)), labels].mean())


def backward(
    params: Mapping[str, np.ndarray],
    cache: dict,
    logits: np.ndarray,
    labels: np.ndarray,
) -> dict[str, np.ndarray]:
    """Gradients of mean cross-entropy w.r.t. every parameter."""
    config: ClassifierConfig = cache["config"]
    ids, mask = cache["ids"], cache["mask"]
    b = logits.shape[0]

    probs = softmax(logits)
    dlogits = probs.copy()
    dlogits[np.arange(b), labels] -= 1.0
    dlogits /= b

    grads: dict[str, np.ndarray] = {}
    cls = cache["cls"]
    grads["head_w"] = cls.T @ dlogits
    grads["head_b"] = dlogits.sum(axis=0)

    dx = np.zeros_like(cache["x_final"])
    dx[:, 0, :] = dlogits @ params["head_w"].T

    for i in reversed(range(config.n_layers)):
        pref = f"layer{i}."
        lc = cache["layers"][i]

        dsum2, dg2, db2 = _layer_norm_backward(dx, lc["ln2"])
        grads[pref + "ln2_g"] = dg2
        grads[pref + "ln2_b"] = db2
        dx1 = dsum2.copy()
        df = dsum2
        if lc["drop_f"] is not None:
            df = df * lc["drop_f"]

        grads[pref + "ffn_w2"] = np.einsum("blh,bld->hd", lc["h_act"], df)
        grads[pref + "ffn_b2"] = df.sum(axis=(0, 1))
        dh = df @ params[pref + "ffn_w2"].T
        dh_pre = dh * (lc["h_pre"] > 0)
        grads[pref + "ffn_w1"] = np.einsum("bld,blh->dh", lc["x1"], dh_pre)
        grads[pref + "ffn_b1"] = dh_pre.sum(axis=(0, 1))
        dx1 += dh_pre @ params[pref + "ffn_w1"].T

        dsum1, dg1, db1 = _layer_norm_backward(dx1, lc["ln1"])
        grads[pref + "ln1_g"] = dg1
        grads[pref + "ln1_b"] = db1
        dx_res = dsum1.copy()
        dproj = dsum1
        if lc["drop_a"] is not None:
            dproj = dproj * lc["drop_a"]

        grads[pref + "wo"] = np.einsum("bld,ble->de", lc["attn_out"], dproj)
        grads[pref + "bo"] = dproj.sum(axis=(0, 1))
        dattn_out = dproj @ params[pref + "wo"].T
        dheads = _split_heads(dattn_out, config.n_heads)

        attn_w, v, q, k = lc["attn_w"], lc["v"], lc["q"], lc["k"]
        dv = np.einsum("bhql,bhqd->bhld", attn_w, dheads)
        dw = np.einsum("bhqd,bhld->bhql", dheads, v)
        ds = attn_w * (dw - (dw * attn_w).sum(axis=-1, keepdims=True))
        ds = ds / np.sqrt(lc["dh"])
        dq = np.einsum("bhql,bhld->bhqd", ds, k)
        dk = np.einsum("bhql,bhqd->bhld", ds, q)

        x_in = lc["x_in"]
        for name, grad_heads in (("wq", dq), ("wk", dk), ("wv", dv)):
            flat = _merge_heads(grad_heads)
            grads[pref + name] = np.einsum("bld,ble->de", x_in, flat)
            grads[pref + "b" + name[1]] = flat.sum(axis=(0, 1))
            dx_res += flat @ params[pref + name].T

        dx = dx_res

    v6, concat, drop0 = cache["fusion"]
    if drop0 is not None:
        dx = dx * drop0
    grads["w_cat"] = np.einsum("ble,blk->ek", dx, concat)
    grads["b_cat"] = dx.sum(axis=(0, 1))
    dconcat = dx @ params["w_cat"]
    d = config.d_model
    dsymbol, dfreq = dconcat[..., :d], dconcat[..., d:]
    grads["w_freq"] = np.einsum("ble,blj->ej", dfreq, v6)
    grads["b_freq"] = dfreq.sum(axis=(0, 1))
    dtable = np.zeros_like(params["token_table"])
    np.add.at(dtable, ids, dsymbol)
    grads["token_table"] = dtable

    for name, g in grads.items():
        if not np.all(np.isfinite(g)):
            raise NonFiniteError(f"non-finite gradient for {name!r}", element=name)
    return grads


# --- optimizer ------------------------------------------------------------------

class Adam:
    def __init__(self, params: Mapping[str, np.ndarray], lr: float, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.t = 0

    def step(self, params: dict[str, np.ndarray], grads: Mapping[str, np.ndarray]) -> None:
        self.t += 1
        b1t = 1.0 - self.beta1**self.t
        b2t = 1.0 - self.beta2**self.t
        for key, g in grads.items():
            self.m[key] = self.beta1 * self.m[key] + (1 - self.beta1) * g
            self.v[key] = self.beta2 * self.v[key] + (1 - self.beta2) * g * g
            params[key] = params[key] - self.lr * (self.m[key] / b1t) / (np.sqrt(self.v[key] / b2t) + self.eps)


# --- datasets ---------------------------------------------------------------------

@dataclass(frozen=True)
class EncodedDataset:
    ids: np.ndarray
    side: np.ndarray
    mask: np.ndarray
    y: np.ndarray


def apply_variant(side: np.ndarray, variant: str) -> np.ndarray:
    """Factorial enrichment switch: zero out roles, time, both, or neither."""
    out = side.copy()
    if variant == "baseline":
        out[:] = 0.0
    elif variant == "time-only":
        out[..., 0:2] = 0.0
    elif variant == "roles-only":
        out[..., 2] = 0.0
    elif variant != "both":
        raise ShapeError(f"unknown variant {variant!r}")
    return out


def encode_dataset(
    seqs: Sequence[BssSequence],
    vocab: Vocabulary,
    labels: Sequence[str],
    config: ClassifierConfig,
) -> EncodedDataset:
    label_index = {lbl: i for i, lbl in enumerate(labels)}
    ids, side, mask, y = [], [], [], []
    for seq in seqs:
        tok = tokenize(seq, vocab, config.max_len)
        ids.append(tok.ids)
        side.append(tok.side_channel)
        mask.append(tok.attention_mask)
        if seq.label is None:
            raise SplitError(f"unlabeled sequence from source {seq.source!r}", element=seq.source)
        y.append(label_index[seq.label])
    side_arr = apply_variant(np.asarray(side, dtype=np.float64), config.variant)
    return EncodedDataset(
        ids=np.asarray(ids, dtype=np.int64),
        side=side_arr,
        mask=np.asarray(mask, dtype=np.float64),
        y=np.asarray(y, dtype=np.int64),
    )


# --- metrics -----------------------------------------------------------------------

@dataclass(frozen=True)
class TrainReport:
    labels: tuple[str, ...]
    epoch_losses: tuple[float, ...]
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    per_class: dict
    confusion: tuple[tuple[int, ...], ...]
    n_train: int
    n_test: int
    warnings: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "epoch_losses": list(self.epoch_losses),
            "accuracy": self.accuracy,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "per_class": self.per_class,
            "confusion": [list(row) for row in self.confusion],
            "n_train": self.n_train,
            "n_test": self.n_test,
            "warnings": list(self.warnings),
        }


def compute_metrics(y_true: np.ndarray, y_pred: np.ndarray, labels: Sequence[str]) -> dict:
    """Accuracy, per-class precision/recall/F1, macro averages, confusion.

    confusion[i][j] counts true class i predicted as j; division-by-zero
    classes score 0 and are reported in `warnings`.
    """
    c = len(labels)
    confusion = np.zeros((c, c), dtype=np.int64)
    for t, p in zip(y_true, y_pred):
        confusion[t, p] += 1
    notes = []
    per_class = {}
    precisions, recalls, f1s = [], [], []
    for i, label in enumerate(labels):
        tp = int(confusion[i, i])
        col = int(confusion[:, i].sum())
        row = int(confusion[i, :].sum())
        if col == 0:
            precision = 0.0
            notes.append(f"class {label!r} was never predicted; precision set to 0")
        else:
            precision = tp / col
        if row == 0:
            recall = 0.0
            notes.append(f"class {label!r} has no test support; recall set to 0")
        else:
            recall = tp / row
        f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
        per_class[label] = {"precision": precision, "recall": recall, "f1": f1, "support": row}
        precisions.append(precision)
        recalls.append(recall)
        f1s.append(f1)
    for note in notes:
        warnings.warn(note, stacklevel=2)
    return {
        "accuracy": float((y_true == y_pred).mean()) if len(y_true) else 0.0,
        "macro_precision": float(np.mean(precisions)),
        "macro_recall": float(np.mean(recalls)),
        "macro_f1": float(np.mean(f1s)),
        "per_class": per_class,
        "confusion": tuple(tuple(int(v) for v in row) for row in confusion),
        "warnings": tuple(notes),
    }


# --- bundle ------------------------------------------------------------------------

@dataclass
class ModelBundle:
    """Everything needed to run inference: parameters plus encoding state."""

    params: dict[str, np.ndarray]
    config: ClassifierConfig
    vocab: Vocabulary
    labels: tuple[str, ...]
    omega: float


def save_bundle(path: str, bundle: ModelBundle) -> None:
    meta = {
        "config": bundle.config.to_dict(),
        "vocab": list(bundle.vocab.tokens),
        "labels": list(bundle.labels),
        "omega": bundle.omega,
    }
    save_tensors(path, bundle.params, meta=meta)


def load_bundle(path: str) -> ModelBundle:
    tensors, meta = load_tensors(path)
    return ModelBundle(
        params=tensors,
        config=ClassifierConfig.from_dict(meta["config"]),
        vocab=Vocabulary(tokens=tuple(meta["vocab"])),
        labels=tuple(meta["labels"]),
        omega=float(meta["omega"]),
    )


def predict(bundle: ModelBundle, dataset: EncodedDataset, batch_size: int = 64) -> np.ndarray:
    preds = []
    for start in range(0, len(dataset.y), batch_size):
        sl = slice(start, start + batch_size)
        logits, _ = forward(
            bundle.params, dataset.ids[sl], dataset.side[sl], dataset.mask[sl],
            bundle.config, bundle.omega,
        )
        preds.append(np.argmax(logits, axis=-1))
    return np.concatenate(preds) if preds else np.empty(0, dtype=np.int64)


def classify(bundle: ModelBundle, seq: BssSequence) -> np.ndarray:
    """Probability vector over the bundle's labels for one sequence."""
    tok = tokenize(seq, bundle.vocab, bundle.config.max_len)
    logits, _ = forward(
        bundle.params,
        np.asarray([tok.ids]),
        apply_variant(np.asarray([tok.side_channel], dtype=np.float64), bundle.config.variant),
        np.asarray([tok.attention_mask]),
        bundle.config,
        bundle.omega,
    )
    return softmax(logits)[0]


def evaluate(bundle: ModelBundle, test_seqs: Sequence[BssSequence]) -> dict:
    """Metrics of the bundle on held-out sequences (must be disjoint from training)."""
    if not test_seqs:
        raise SplitError("empty test set")
    dataset = encode_dataset(test_seqs, bundle.vocab, bundle.labels, bundle.config)
    preds = predict(bundle, dataset)
    return compute_metrics(dataset.y, preds, bundle.labels)


# --- training ------------------------------------------------------------------------

def train(
    corpus: Sequence[BssSequence],
    config: ClassifierConfig,
    *,
    test_frac: float = 0.25,
) -> tuple[ModelBundle, TrainReport]:
    """Source-level 75/25 split, Adam + cross-entropy, deterministic under seed."""
    train_seqs, test_seqs = split_by_source(corpus, test_frac=test_frac, seed=config.seed)
    labels = tuple(sorted({s.label for s in corpus if s.label is not None}))
    if len(labels) != config.n_classes:
        raise SplitError(f"corpus has {len(labels)} labels but config.n_classes={config.n_classes}")
    train_labels = {s.label for s in train_seqs}
    missing = [lbl for lbl in labels if lbl not in train_labels]
    if missing:
        raise SplitError(f"class {missing[0]!r} absent from training split", element=missing[0])

    vocab = build_vocab(train_seqs)
    if config.omega is not None:
        omega = config.omega
    else:
        stats = corpus_stats(train_seqs)
        omega = fusion.choose_omega(stats["max_h"], stats["max_t"])

    train_set = encode_dataset(train_seqs, vocab, labels, config)
    params = init_params(config, vocab.size)
    optimizer = Adam(params, lr=config.lr)

    n = len(train_set.y)
    epoch_losses = []
    for epoch in range(config.epochs):
        order = np.random.default_rng([config.seed, 1, epoch]).permutation(n)
        total, steps = 0.0, 0
        for step, start in enumerate(range(0, n, config.batch_size)):
            batch = order[start : start + config.batch_size]
            rng = np.random.default_rng([config.seed, 2, epoch, step]) if config.dropout > 0 else None
            logits, cache = forward(
                params, train_set.ids[batch], train_set.side[batch], train_set.mask[batch],
                config, omega, dropout_rng=rng,
            )
            loss = cross_entropy(logits, train_set.y[batch])
            grads = backward(params, cache, logits, train_set.y[batch])
            optimizer.step(params, grads)
            total += loss * len(batch)
            steps += len(batch)
        epoch_losses.append(total / steps)

    bundle = ModelBundle(params=params, config=config, vocab=vocab, labels=labels, omega=omega)
    metrics = evaluate(bundle, test_seqs)
    report = TrainReport(
        labels=labels,
        epoch_losses=tuple(epoch_losses),
        accuracy=metrics["accuracy"],
        macro_precision=metrics["macro_precision"],
        macro_recall=metrics["macro_recall"],
        macro_f1=metrics["macro_f1"],
        per_class=metrics["per_class"],
        confusion=metrics["confusion"],
        n_train=len(train_seqs),
        n_test=len(test_seqs),
        warnings=metrics["warnings"],
    )
    return bundle, report


def ablate(corpus: Sequence[BssSequence], config: ClassifierConfig) -> list[dict]:
    """Four-variant factorial report: {baseline, time-only, roles-only, both}."""
    rows = []
    for variant in VARIANTS:
        _, report = train(corpus, replace(config, variant=variant))
        rows.append(
            {
                "variant": variant,
                "accuracy": report.accuracy,
                "macro_f1": report.macro_f1,
                "macro_precision": report.macro_precision,
                "macro_recall": report.macro_recall,
            }
        )
    return rows


# --- gradient checking -----------------------------------------------------------------

@dataclass(frozen=True)
class GradCheckReport:
    max_rel_error: float
    n_checked: int

    def to_dict(self) -> dict:
        return {"max_rel_error": self.max_rel_error, "n_checked": self.n_checked}


def grad_check(
    params: dict[str, np.ndarray],
    batch: EncodedDataset,
    config: ClassifierConfig,
    omega: float,
    *,
    epsilon: float = 1e-5,
    n_coords: int = 200,
    seed: int = 0,
) -> GradCheckReport:
    """Analytic gradients vs central finite differences on random coordinates.

    Dropout must be disabled (config.dropout == 0) so the loss is a
    deterministic function of the parameters.
    """
    if config.dropout != 0.0:
        raise ShapeError("grad_check requires dropout=0")

    def loss_of(p: Mapping[str, np.ndarray]) -> float:
        logits, _ = forward(p, batch.ids, batch.side, batch.mask, config, omega)
        return cross_entropy(logits, batch.y)

    logits, cache = forward(params, batch.ids, batch.side, batch.mask, config, omega)
    grads = backward(params, cache, logits, batch.y)

    names = sorted(params)
    sizes = np.array([params[name].size for name in names])
    total = int(sizes.sum())
    rng = np.random.default_rng([seed, 3])
    coords = rng.choice(total, size=min(n_coords, total), replace=False)
    offsets = np.cumsum(sizes) - sizes

    # below this magnitude a central difference is pure roundoff noise; when
    # both sides sit under it (e.g. the structurally-zero key-bias gradients,
    # where softmax is invariant to per-row score shifts) the coordinate
    # counts as agreement
    noise_floor = 1e-8

    max_rel = 0.0
    for flat_index in coords:
        which = int(np.searchsorted(offsets, flat_index, side="right") - 1)
        name = names[which]
        local = int(flat_index - offsets[which])
        original = params[name].flat[local]

        params[name].flat[local] = original + epsilon
        up = loss_of(params)
        params[name].flat[local] = original - epsilon
        down = loss_of(params)
        params[name].flat[local] = original

        numeric = (up - down) / (2 * epsilon)
        analytic = grads[name].flat[local]
        if abs(numeric) < noise_floor and abs(analytic) < noise_floor:
            continue
        denom = max(abs(numeric) + abs(analytic), noise_floor)
        max_rel = max(max_rel, abs(numeric - analytic) / denom)
    return GradCheckReport(max_rel_error=float(max_rel), n_checked=len(coords))
