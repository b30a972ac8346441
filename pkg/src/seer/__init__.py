"""SEER: spectral-entropy role encoding for design-pattern detection.

Pipeline stages: member graphs -> Laplacian spectra and entropy anchors ->
behavio-structural sequences with timing priors -> dual-path embedding
fusion -> toy transformer classifier. The `seer` CLI exposes each stage.
"""

from .graphs import (
    EdgeKind,
    MemberEdge,
    MemberGraph,
    MemberKind,
    MemberNode,
    Perturbation,
    adjacency_and_degree,
    apply_perturbation,
    build_graph,
    dump_graph,
    graph_to_dict,
    invert_perturbation,
    load_graph,
)
from .spectral import (
    AnchorTable,
    SpectralProfile,
    anchor_table,
    canonical_micrograph,
    cospectrality_scan,
    entropy_stability_check,
    laplacian,
    profile,
    spectral_entropy,
    spectrum,
    weyl_check,
)
from .timing import ContextSymbol, TimingTable, duration, validate_table
from .sequences import (
    BssSequence,
    CallEvent,
    Vocabulary,
    augment,
    build_vocab,
    enrich,
    split_by_source,
    synth_corpus,
    tokenize,
)
from .fusion import (
    FusionConfig,
    FusionParams,
    choose_omega,
    circular_embed,
    fuse,
    init_fusion_params,
    positional_encoding,
)
from .model import (
    ClassifierConfig,
    ModelBundle,
    TrainReport,
    ablate,
    classify,
    encoder_forward,
    evaluate,
    grad_check,
    train,
)

__version__ = "0.1.0"
