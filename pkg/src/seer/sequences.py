"""Behavio-structural sequences: interaction triads enriched with role
entropies and context durations.

A sequence is an ordered list of (caller, context, callee) events. Roles are
either special symbols (Δ Ψ Π Θ, entropy pinned to the anchor table) or
generic letters A..Z whose entropy is role-specific. Each event carries the
entropy pair (h_caller, h_callee) and the context duration t.
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import (
    CorpusSpecError,
    EmptyCorpusError,
    SchemaError,
    SequenceLengthError,
    SequenceOverflowError,
    SplitError,
    UnknownSymbolError,
)
from .spectral import AnchorTable
from .timing import ContextSymbol, TimingTable, duration

SPECIAL_ROLES: tuple[str, ...] = ("Δ", "Ψ", "Π", "Θ")
GENERIC_ROLES: tuple[str, ...] = tuple(string.ascii_uppercase)

#: the 23 canonical pattern labels, alphabetical
GOF_PATTERNS: tuple[str, ...] = (
    "abstract factory",
    "adapter",
    "bridge",
    "builder",
    "chain of responsibility",
    "command",
    "composite",
    "decorator",
    "facade",
    "factory method",
    "flyweight",
    "interpreter",
    "iterator",
    "mediator",
    "memento",
    "observer",
    "prototype",
    "proxy",
    "singleton",
    "state",
    "strategy",
    "template method",
    "visitor",
)

#: default ingestion bounds, measured in tokens (1 CLS + 3 per event)
MIN_TOKENS = 8
MAX_TOKENS = 50

TOKENS_PER_EVENT = 3


def is_role_symbol(sym: str) -> bool:
    return sym in SPECIAL_ROLES or sym in GENERIC_ROLES


@dataclass(frozen=True)
class CallEvent:
    caller: str
    context: ContextSymbol
    callee: str
    h_caller: float
    h_callee: float
    t: float


@dataclass(frozen=True)
class BssSequence:
    events: tuple[CallEvent, ...]
    label: str | None = None
    source: str = ""

    def __post_init__(self):
        if self.label is not None and self.label not in GOF_PATTERNS:
            raise SchemaError(f"label {self.label!r} is not a known pattern name", element=str(self.label))

    @property
    def n_tokens(self) -> int:
        """Token footprint: one CLS plus three tokens per event."""
        return 1 + TOKENS_PER_EVENT * len(self.events)


def role_entropy_map(anchors: AnchorTable, generic: Mapping[str, float] | None = None) -> dict[str, float]:
    """Full symbol -> entropy map: anchor values for specials plus the
    caller-supplied values for generic letters."""
    out = dict(anchors.symbol_values())
    for sym, h in (generic or {}).items():
        if sym in SPECIAL_ROLES:
            raise UnknownSymbolError(f"special symbol {sym!r} takes its anchor value", element=sym)
        if sym not in GENERIC_ROLES:
            raise UnknownSymbolError(f"{sym!r} is not a role symbol", element=sym)
        out[sym] = float(h)
    return out


Triad = tuple[str, Union[str, ContextSymbol], str]


def enrich(
    triads: Iterable[Triad],
    entropy_of: Mapping[str, float],
    timing: TimingTable | None = None,
    *,
    label: str | None = None,
    source: str = "",
) -> BssSequence:
    """Attach (h_caller, h_callee, t) to each raw triad, order preserved."""
    timing = timing if timing is not None else TimingTable()
    events = []
    for caller, context, callee in triads:
        ctx = context if isinstance(context, ContextSymbol) else ContextSymbol.parse(context)
        for sym in (caller, callee):
            if not is_role_symbol(sym):
                raise UnknownSymbolError(f"{sym!r} is not a role symbol", element=sym)
            if sym not in entropy_of:
                raise UnknownSymbolError(f"no entropy for symbol {sym!r}", element=sym)
        events.append(
            CallEvent(
                caller=caller,
                context=ctx,
                callee=callee,
                h_caller=float(entropy_of[caller]),
                h_callee=float(entropy_of[callee]),
                t=duration(ctx, timing),
            )
        )
    if not events:
        raise SequenceLengthError("sequence has no events (below minimum length)")
    return BssSequence(events=tuple(events), label=label, source=source)


# --- vocabulary and tokenization --------------------------------------------

PAD_TOKEN = "<pad>"
UNK_TOKEN = "<unk>"
CLS_TOKEN = "<cls>"
PAD_ID, UNK_ID, CLS_ID = 0, 1, 2
RESERVED_TOKENS = (PAD_TOKEN, UNK_TOKEN, CLS_TOKEN)


def context_token(ctx: ContextSymbol) -> str:
    # "@" prefix keeps context T distinct from generic role T
    return "@" + ctx.value


@dataclass(frozen=True)
class Vocabulary:
    tokens: tuple[str, ...]

    def __post_init__(self):
        if self.tokens[: len(RESERVED_TOKENS)] != RESERVED_TOKENS:
            raise SchemaError("vocabulary must start with the reserved tokens")
        if len(set(self.tokens)) != len(self.tokens):
            raise SchemaError("vocabulary tokens must be unique")
        object.__setattr__(self, "_index", {tok: i for i, tok in enumerate(self.tokens)})

    @property
    def size(self) -> int:
        return len(self.tokens)

    def id_of(self, token: str) -> int:
        return self._index.get(token, UNK_ID)

    def token_of(self, token_id: int) -> str:
        return self.tokens[token_id]

    def to_dict(self) -> dict:
        return {"tokens": list(self.tokens)}


def build_vocab(corpus: Sequence[BssSequence]) -> Vocabulary:
    """Reserved tokens followed by every observed symbol, sorted."""
    if not corpus:
        raise EmptyCorpusError("cannot build a vocabulary from an empty corpus")
    observed: set[str] = set()
    for seq in corpus:
        for ev in seq.events:
            observed.add(ev.caller)
            observed.add(ev.callee)
            observed.add(context_token(ev.context))
    return Vocabulary(tokens=RESERVED_TOKENS + tuple(sorted(observed)))


@dataclass(frozen=True)
class TokenizedSequence:
    ids: tuple[int, ...]
    attention_mask: tuple[int, ...]
    side_channel: tuple[tuple[float, float, float], ...]

    def to_dict(self) -> dict:
        return {
            "ids": list(self.ids),
            "attention_mask": list(self.attention_mask),
            "side_channel": [list(v) for v in self.side_channel],
        }


def tokenize(seq: BssSequence, vocab: Vocabulary, max_len: int) -> TokenizedSequence:
    """CLS + 3 tokens per event, padded to max_len.

    The side channel repeats each event's (h1, h2, t) across that event's
    three token positions; CLS and padding carry (0, 0, 0). Sequences that
    do not fit are rejected, never silently truncated.
    """
    needed = seq.n_tokens
    if needed > max_len:
        raise SequenceOverflowError(
            f"sequence needs {needed} tokens but max_len is {max_len}",
            element=seq.source or None,
        )
    ids = [CLS_ID]
    side: list[tuple[float, float, float]] = [(0.0, 0.0, 0.0)]
    for ev in seq.events:
        ids.extend(
            (vocab.id_of(ev.caller), vocab.id_of(context_token(ev.context)), vocab.id_of(ev.callee))
        )
        side.extend([(ev.h_caller, ev.h_callee, ev.t)] * TOKENS_PER_EVENT)
    mask = [1] * needed + [0] * (max_len - needed)
    ids.extend([PAD_ID] * (max_len - needed))
    side.extend([(0.0, 0.0, 0.0)] * (max_len - needed))
    return TokenizedSequence(ids=tuple(ids), attention_mask=tuple(mask), side_channel=tuple(side))


# --- augmentation ------------------------------------------------------------

def apply_role_permutation(seq: BssSequence, mapping: Mapping[str, str]) -> BssSequence:
    """Rename generic roles through a bijection; specials stay fixed.

    Entropy values travel with their object: each event keeps its
    (h_caller, h_callee, t) numbers, only the symbol names change.
    """
    for src, dst in mapping.items():
        if src in SPECIAL_ROLES or dst in SPECIAL_ROLES:
            raise UnknownSymbolError("special symbols are role-fixed and cannot be permuted", element=src)
        if src not in GENERIC_ROLES or dst not in GENERIC_ROLES:
            raise UnknownSymbolError(f"{src!r}->{dst!r} is not a generic-letter mapping", element=src)
    if len(set(mapping.values())) != len(mapping):
        raise UnknownSymbolError("mapping is not a bijection")

    def rename(sym: str) -> str:
        if sym in SPECIAL_ROLES:
            return sym
        return mapping.get(sym, sym)

    events = tuple(
        CallEvent(
            caller=rename(ev.caller),
            context=ev.context,
            callee=rename(ev.callee),
            h_caller=ev.h_caller,
            h_callee=ev.h_callee,
            t=ev.t,
        )
        for ev in seq.events
    )
    return BssSequence(events=events, label=seq.label, source=seq.source)


def augment(seq: BssSequence, rng_seed: int) -> BssSequence:
    """Entropy-preserving augmentation: a seeded random bijection over A..Z."""
    if seq.label is None:
        raise SchemaError("augmentation requires a labeled sequence")
    rng = np.random.default_rng(rng_seed)
    letters = list(GENERIC_ROLES)
    shuffled = list(letters)
    rng.shuffle(shuffled)
    return apply_role_permutation(seq, dict(zip(letters, shuffled)))


# --- synthetic corpus ---------------------------------------------------------

@dataclass(frozen=True)
class ClassTemplate:
    """Stochastic recipe for one synthetic pattern class.

    Sequences of a class concentrate on two dominant contexts, recur around
    one special role, and draw generic-role entropies from a class-specific
    band. Together these make classes separable by construction.
    """

    label: str
    dominant_contexts: tuple[ContextSymbol, ContextSymbol]
    special: str
    entropy_center: float
    entropy_halfwidth: float = 0.1


def class_template(class_index: int, label: str) -> ClassTemplate:
    symbols = list(ContextSymbol)
    return ClassTemplate(
        label=label,
        dominant_contexts=(symbols[class_index % 7], symbols[(class_index + 3) % 7]),
        special=SPECIAL_ROLES[class_index % len(SPECIAL_ROLES)],
        entropy_center=0.5 + 0.5 * (class_index % 6),
    )


def _sample_sequence(
    template: ClassTemplate,
    anchors: AnchorTable,
    timing: TimingTable,
    rng: np.random.Generator,
    events_range: tuple[int, int],
    source: str,
) -> BssSequence:
    n_events = int(rng.integers(events_range[0], events_range[1] + 1))
    n_generics = int(rng.integers(2, 5))
    pool = list(GENERIC_ROLES[:n_generics])

    weights = np.ones(len(ContextSymbol))
    symbols = list(ContextSymbol)
    for ctx in template.dominant_contexts:
        weights[symbols.index(ctx)] = 12.0
    weights /= weights.sum()

    triads: list[Triad] = []
    for _ in range(n_events):
        ctx = symbols[int(rng.choice(len(symbols), p=weights))]
        if rng.random() < 0.35:
            generic = pool[int(rng.integers(len(pool)))]
            pair = (template.special, generic) if rng.random() < 0.5 else (generic, template.special)
        else:
            i, j = rng.choice(len(pool), size=2, replace=False)
            pair = (pool[int(i)], pool[int(j)])
        triads.append((pair[0], ctx, pair[1]))

    # canonicalize generics to first-appearance order A, B, C, ...
    seen: dict[str, str] = {}
    canon: list[Triad] = []
    for caller, ctx, callee in triads:
        renamed = []
        for sym in (caller, callee):
            if sym in SPECIAL_ROLES:
                renamed.append(sym)
            else:
                if sym not in seen:
                    seen[sym] = GENERIC_ROLES[len(seen)]
                renamed.append(seen[sym])
        canon.append((renamed[0], ctx, renamed[1]))

    lo = template.entropy_center - template.entropy_halfwidth
    hi = template.entropy_center + template.entropy_halfwidth
    generic_h = {letter: float(rng.uniform(lo, hi)) for letter in seen.values()}
    entropy_of = role_entropy_map(anchors, generic_h)
    return enrich(canon, entropy_of, timing, label=template.label, source=source)


def synth_corpus(
    n_classes: int,
    per_class: int,
    seed: int,
    *,
    sources_per_class: int = 4,
    events_range: tuple[int, int] = (8, 16),
    anchors: AnchorTable | None = None,
    timing: TimingTable | None = None,
) -> list[BssSequence]:
    """Deterministic labeled corpus over class-conditional templates.

    Labels are the first `n_classes` canonical pattern names; each class's
    sequences are spread round-robin over `sources_per_class` synthetic
    project sources (for source-level splits).
    """
    if not (1 <= n_classes <= len(GOF_PATTERNS)):
        raise CorpusSpecError(f"n_classes must be in [1, {len(GOF_PATTERNS)}], got {n_classes}")
    if per_class < 1:
        raise CorpusSpecError(f"per_class must be positive, got {per_class}")
    if sources_per_class < 1:
        raise CorpusSpecError(f"sources_per_class must be positive, got {sources_per_class}")
    lo, hi = events_range
    if not (1 <= lo <= hi):
        raise CorpusSpecError(f"bad events_range {events_range}")

    from .spectral import anchor_table

    anchors = anchors if anchors is not None else anchor_table()
    timing = timing if timing is not None else TimingTable()

    corpus: list[BssSequence] = []
    for class_index in range(n_classes):
        label = GOF_PATTERNS[class_index]
        template = class_template(class_index, label)
        slug = label.replace(" ", "_")
        for k in range(per_class):
            rng = np.random.default_rng([seed, class_index, k])
            source = f"proj-{slug}-{k % sources_per_class}"
            corpus.append(_sample_sequence(template, anchors, timing, rng, (lo, hi), source))
    return corpus


def split_by_source(
    corpus: Sequence[BssSequence],
    test_frac: float = 0.25,
    seed: int = 0,
) -> tuple[list[BssSequence], list[BssSequence]]:
    """Hold out whole sources, stratified by the label each source carries.

    Every sequence from one source lands entirely in train or in test,
    never both.
    """
    if not corpus:
        raise SplitError("cannot split an empty corpus")
    if not (0.0 < test_frac < 1.0):
        raise SplitError(f"test_frac must be in (0, 1), got {test_frac}")

    by_source: dict[str, list[BssSequence]] = {}
    for seq in corpus:
        by_source.setdefault(seq.source, []).append(seq)

    label_buckets: dict[str | None, list[str]] = {}
    for source in sorted(by_source):
        label_buckets.setdefault(by_source[source][0].label, []).append(source)

    rng = np.random.default_rng([seed, len(by_source)])
    test_sources: set[str] = set()
    for label in sorted(label_buckets, key=str):
        sources = label_buckets[label]
        n_test = max(1, round(len(sources) * test_frac)) if len(sources) > 1 else 0
        picked = rng.choice(len(sources), size=n_test, replace=False) if n_test else []
        test_sources.update(sources[int(i)] for i in picked)

    train = [s for s in corpus if s.source not in test_sources]
    test = [s for s in corpus if s.source in test_sources]
    if not train or not test:
        raise SplitError("split produced an empty side; add more sources")
    return train, test


def corpus_stats(corpus: Sequence[BssSequence]) -> dict[str, float]:
    """Max entropy and duration observed, for angular-frequency selection."""
    max_h = 0.0
    max_t = 0.0
    for seq in corpus:
        for ev in seq.events:
            max_h = max(max_h, ev.h_caller, ev.h_callee)
            max_t = max(max_t, ev.t)
    return {"max_h": max_h, "max_t": max_t}


# --- interchange --------------------------------------------------------------

def sequence_to_dict(seq: BssSequence) -> dict:
    return {
        "label": seq.label,
        "source": seq.source,
        "events": [
            {
                "caller": ev.caller,
                "context": ev.context.name,
                "callee": ev.callee,
                "h1": ev.h_caller,
                "h2": ev.h_callee,
                "t": ev.t,
            }
            for ev in seq.events
        ],
    }


def sequence_from_dict(doc: Mapping) -> BssSequence:
    if not isinstance(doc, Mapping):
        raise SchemaError("sequence entries must be objects")
    for key in ("label", "source", "events"):
        if key not in doc:
            raise SchemaError(f"sequence missing field {key!r}", element=key)
    events = []
    for raw in doc["events"]:
        try:
            events.append(
                CallEvent(
                    caller=str(raw["caller"]),
                    context=ContextSymbol.parse(str(raw["context"])),
                    callee=str(raw["callee"]),
                    h_caller=float(raw["h1"]),
                    h_callee=float(raw["h2"]),
                    t=float(raw["t"]),
                )
            )
        except KeyError as exc:
            raise SchemaError(f"event missing field {exc.args[0]!r}", element=str(exc.args[0])) from None
    if not events:
        raise SequenceLengthError("sequence has no events")
    label = doc["label"]
    return BssSequence(events=tuple(events), label=label if label is not None else None, source=str(doc["source"]))


def write_jsonl(corpus: Iterable[BssSequence], fh: IO[str]) -> None:
    for seq in corpus:
        fh.write(json.dumps(sequence_to_dict(seq), ensure_ascii=False, sort_keys=True) + "\n")


def read_jsonl(
    fh: IO[str],
    *,
    min_tokens: int = MIN_TOKENS,
    max_tokens: int = MAX_TOKENS,
    enforce_lengths: bool = True,
) -> list[BssSequence]:
    """Parse a sequence corpus, enforcing the token-length bounds at ingestion."""
    corpus = []
    for lineno, line in enumerate(fh, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"line {lineno}: not valid JSON: {exc}") from None
        seq = sequence_from_dict(doc)
        if enforce_lengths and not (min_tokens <= seq.n_tokens <= max_tokens):
            raise SequenceLengthError(
                f"line {lineno}: sequence is {seq.n_tokens} tokens, outside [{min_tokens}, {max_tokens}]",
                element=str(lineno),
            )
        corpus.append(seq)
    return corpus
