"""Dual-path input construction.

Symbol path: learned token embedding plus fixed sinusoidal positional
encoding. Frequential path: the 6-dim circular embedding of (H1, H2, t),
projected to model width. The two are concatenated and re-projected back to
model width:

    v_final = W2 . ( (tok + pos) || (W . v6 + b) ) + b2
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteError, NonpositiveValueError, ShapeError


def circular_embed(h1: float, h2: float, t: float, omega: float) -> np.ndarray:
    """[sin wH1, cos wH1, sin wH2, cos wH2, sin wt, cos wt].

    Each consecutive (sin, cos) pair lies on the unit circle.
    """
    values = np.array([h1, h2, t], dtype=np.float64)
    if not np.all(np.isfinite(values)) or not np.isfinite(omega):
        raise NonFiniteError(f"non-finite circular-embedding input ({h1}, {h2}, {t}, omega={omega})")
    angles = omega * values
    out = np.empty(6, dtype=np.float64)
    out[0::2] = np.sin(angles)
    out[1::2] = np.cos(angles)
    return out


def circular_embed_batch(side: np.ndarray, omega: float) -> np.ndarray:
    """Vectorized circular embedding: (..., 3) -> (..., 6)."""
    side = np.asarray(side, dtype=np.float64)
    if not np.all(np.isfinite(side)):
        raise NonFiniteError("non-finite side-channel values")
    angles = omega * side
    out = np.empty(side.shape[:-1] + (6,), dtype=np.float64)
    out[..., 0::2] = np.sin(angles)
    out[..., 1::2] = np.cos(angles)
    return out


def choose_omega(max_h: float, max_t: float) -> float:
    """pi / max(max_h, max_t): every observed phase falls in [0, pi], so the
    encoding is injective over the observed range and never wraps."""
    if max_h <= 0 or max_t <= 0:
        raise NonpositiveValueError(f"corpus stats must be positive, got max_h={max_h}, max_t={max_t}")
    return float(np.pi / max(max_h, max_t))


def positional_encoding(position: int, d_model: int, max_len: int | None = None) -> np.ndarray:
    """Sinusoidal positional vector; pair k oscillates at 10000^(-2k/d)."""
    if d_model % 2 != 0:
        raise ShapeError(f"d_model must be even, got {d_model}")
    if position < 0 or (max_len is not None and position >= max_len):
        raise ShapeError(f"position {position} out of range [0, {max_len})")
    return positional_encoding_table(position + 1, d_model)[position]


def positional_encoding_table(max_len: int, d_model: int) -> np.ndarray:
    """(max_len, d_model) table; even columns sin, odd columns cos."""
    if d_model % 2 != 0:
        raise ShapeError(f"d_model must be even, got {d_model}")
    positions = np.arange(max_len, dtype=np.float64)[:, None]
    k = np.arange(d_model // 2, dtype=np.float64)[None, :]
    rates = np.power(10000.0, -2.0 * k / d_model)
    table = np.empty((max_len, d_model), dtype=np.float64)
    table[:, 0::2] = np.sin(positions * rates)
    table[:, 1::2] = np.cos(positions * rates)
    return table


@dataclass(frozen=True)
class FusionConfig:
    d_model: int
    omega: float
    max_len: int
    vocab_size: int

    def __post_init__(self):
        if self.d_model % 2 != 0:
            raise ShapeError(f"d_model must be even, got {self.d_model}")
        if self.omega <= 0:
            raise NonpositiveValueError(f"omega must be positive, got {self.omega}")


@dataclass(frozen=True)
class FusionParams:
    """token_table (V,d); W (d,6) + b (d) project the 6-vector; W2 (d,2d) +
    b2 (d) re-project the concatenation."""

    token_table: np.ndarray
    w_freq: np.ndarray
    b_freq: np.ndarray
    w_cat: np.ndarray
    b_cat: np.ndarray

    def validate(self, config: FusionConfig) -> None:
        d, v = config.d_model, config.vocab_size
        expected = {
            "token_table": (v, d),
            "w_freq": (d, 6),
            "b_freq": (d,),
            "w_cat": (d, 2 * d),
            "b_cat": (d,),
        }
        for name, shape in expected.items():
            arr = getattr(self, name)
            if arr.shape != shape:
                raise ShapeError(f"{name}: expected shape {shape}, got {arr.shape}", element=name)
            if not np.all(np.isfinite(arr)):
                raise NonFiniteError(f"{name} contains non-finite entries", element=name)


def _uniform(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int) -> np.ndarray:
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape)


def init_fusion_params(config: FusionConfig, seed: int) -> FusionParams:
    rng = np.random.default_rng([seed, 0])
    d = config.d_model
    params = FusionParams(
        token_table=_uniform(rng, (config.vocab_size, d), d),
        w_freq=_uniform(rng, (d, 6), 6),
        b_freq=_uniform(rng, (d,), 6),
        w_cat=_uniform(rng, (d, 2 * d), 2 * d),
        b_cat=_uniform(rng, (d,), 2 * d),
    )
    params.validate(config)
    return params


def fuse(
    token_id: int,
    position: int,
    h1: float,
    h2: float,
    t: float,
    params: FusionParams,
    config: FusionConfig,
) -> np.ndarray:
    """Fused d_model vector for a single token position."""
    if not (0 <= token_id < config.vocab_size):
        raise ShapeError(f"token id {token_id} out of range [0, {config.vocab_size})")
    if not (0 <= position < config.max_len):
        raise ShapeError(f"position {position} out of range [0, {config.max_len})")
    symbol = params.token_table[token_id] + positional_encoding(position, config.d_model, config.max_len)
    freq = params.w_freq @ circular_embed(h1, h2, t, config.omega) + params.b_freq
    concat = np.concatenate([symbol, freq])
    return params.w_cat @ concat + params.b_cat


def fuse_sequence(
    ids: np.ndarray,
    side: np.ndarray,
    params: FusionParams,
    config: FusionConfig,
) -> np.ndarray:
    """Vectorized fuse over whole (batched) sequences.

    ids: (..., L) ints; side: (..., L, 3). Returns (..., L, d_model).
    """
    ids = np.asarray(ids)
    if ids.max() >= config.vocab_size or ids.min() < 0:
        raise ShapeError("token id out of vocabulary range")
    length = ids.shape[-1]
    if length > config.max_len:
        raise ShapeError(f"sequence length {length} exceeds max_len {config.max_len}")
    pe = positional_encoding_table(config.max_len, config.d_model)[:length]
    symbol = params.token_table[ids] + pe
    v6 = circular_embed_batch(side, config.omega)
    freq = v6 @ params.w_freq.T + params.b_freq
    concat = np.concatenate([symbol, freq], axis=-1)
    return concat @ params.w_cat.T + params.b_cat
