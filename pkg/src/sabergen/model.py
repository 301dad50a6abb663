"""Decoder-only autoregressive transformer in plain numpy.

Pre-norm blocks, learned positional embeddings, multi-head causal
attention, tanh-approximated GELU, and an output projection tied to the
token embedding. Forward, loss, and backward are hand-written; every
intermediate is computed in the dtype of the parameters, so a float64
parameter set yields float64 gradients suitable for finite-difference
verification.

Causal masking uses additive ``-inf`` before the softmax, which makes
attention weights on future positions exactly zero: logits at position t
are bitwise invariant to any change of tokens after t.
"""

from __future__ import annotations

import json
import struct
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import CheckpointError, ConfigError

__all__ = [
    "ModelConfig",
    "init_params",
    "forward",
    "loss",
    "loss_and_grads",
    "param_count",
    "gradient_check",
    "GradientCheckResult",
    "save_checkpoint",
    "load_checkpoint",
]

_CHECKPOINT_MAGIC = b"SBGC"
_CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int
    dim: int = 128
    layers: int = 4
    heads: int = 4
    context_length: int = 256
    mlp_ratio: int = 4
    dropout: float = 0.0

    def __post_init__(self) -> None:
        if self.vocab_size < 2:
            raise ConfigError("vocab_size must be >= 2")
        if self.dim % self.heads != 0:
            raise ConfigError(f"dim {self.dim} not divisible by heads {self.heads}")
        if min(self.dim, self.layers, self.heads, self.context_length, self.mlp_ratio) < 1:
            raise ConfigError("model dimensions must be >= 1")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError("dropout must be in [0, 1)")


def init_params(
    config: ModelConfig, seed: int = 0, dtype=np.float32
) -> dict[str, np.ndarray]:
    """Gaussian init (sd 0.02); residual-output projections scaled down
    by sqrt(2 * layers) so the residual stream variance stays flat."""
    rng = np.random.default_rng(seed)
    d, h = config.dim, config.mlp_ratio * config.dim

    def normal(*shape, scale=0.02):
        return rng.normal(0.0, scale, size=shape).astype(dtype)

    res_scale = 0.02 / np.sqrt(2.0 * config.layers)
    params: dict[str, np.ndarray] = {
        "tok_emb": normal(config.vocab_size, d),
        "pos_emb": normal(config.context_length, d),
    }
    for i in range(config.layers):
        p = f"l{i}."
        params[p + "ln1.g"] = np.ones(d, dtype=dtype)
        params[p + "ln1.b"] = np.zeros(d, dtype=dtype)
        params[p + "attn.wq"] = normal(d, d)
        params[p + "attn.wk"] = normal(d, d)
        params[p + "attn.wv"] = normal(d, d)
        params[p + "attn.wo"] = normal(d, d, scale=res_scale)
        params[p + "ln2.g"] = np.ones(d, dtype=dtype)
        params[p + "ln2.b"] = np.zeros(d, dtype=dtype)
        params[p + "mlp.w1"] = normal(d, h)
        params[p + "mlp.b1"] = np.zeros(h, dtype=dtype)
        params[p + "mlp.w2"] = normal(h, d, scale=res_scale)
        params[p + "mlp.b2"] = np.zeros(d, dtype=dtype)
    params["ln_f.g"] = np.ones(d, dtype=dtype)
    params["ln_f.b"] = np.zeros(d, dtype=dtype)
    return params


def param_count(params: dict[str, np.ndarray]) -> int:
    return sum(int(p.size) for p in params.values())


_LN_EPS = 1e-5


def _layernorm(x, g, b):
    mu = x.mean(axis=-1, keepdims=True)
    xc = x - mu
    var = (xc * xc).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + np.asarray(_LN_EPS, dtype=x.dtype))
    xhat = xc * inv
    return xhat * g + b, (xhat, inv)

def _layernorm_bwd(dy, cache, g):
    xhat, inv = cache
    n = xhat.shape[-1]
    dg = (dy * xhat).sum(axis=tuple(range(dy.ndim - 1)))
    db = dy.sum(axis=tuple(range(dy.ndim - 1)))
    dxhat = dy * g
    dx = inv / n * (
        n * dxhat - dxhat.sum(axis=-1, keepdims=True) - xhat * (dxhat * xhat).sum(axis=-1, keepdims=True)
    )
    return dx, dg, db


_GELU_C = 0.7978845608028654  # sqrt(2/pi)


def _gelu(x):
    c = np.asarray(_GELU_C, dtype=x.dtype)
    a = np.asarray(0.044715, dtype=x.dtype)
    t = np.tanh(c * (x + a * x**3))
    return 0.5 * x * (1.0 + t), t

def _gelu_bwd(dy, x, t):
    c = np.asarray(_GELU_C, dtype=x.dtype)
    a = np.asarray(0.044715, dtype=x.dtype)
    du = c * (1.0 + 3.0 * a * x * x) * (1.0 - t * t)
    return dy * (0.5 * (1.0 + t) + 0.5 * x * du)


def _split_heads(x, heads):
    b, t, d = x.shape
    return x.reshape(b, t, heads, d // heads).transpose(0, 2, 1, 3)

def _merge_heads(x):
    b, h, t, hd = x.shape
    return x.transpose(0, 2, 1, 3).reshape(b, t, h * hd)


def _forward(params, config: ModelConfig, ids: np.ndarray, need_cache: bool, drop_rng=None):
    """Token ids [B, T] -> logits [B, T, V] (and a backward cache).

    Residual dropout fires only when a generator is supplied (training);
    inference is always deterministic regardless of config.dropout.
    """
    ids = np.asarray(ids)
    if ids.ndim != 2:
        raise ConfigError("ids must have shape [batch, time]")
    b, t = ids.shape
    if t > config.context_length:
        raise ConfigError(f"sequence length {t} exceeds context length {config.context_length}")
    if ids.min() < 0 or ids.max() >= config.vocab_size:
        raise ConfigError("token id outside the vocabulary")
    dtype = params["tok_emb"].dtype
    heads = config.heads
    hd = config.dim // heads
    scale = np.asarray(1.0 / np.sqrt(hd), dtype=dtype)
    causal = np.triu(np.ones((t, t), dtype=bool), k=1)
    neg_inf = np.asarray(-np.inf, dtype=dtype)
    p_drop = config.dropout if drop_rng is not None else 0.0

    def drop_mask(shape):
        if p_drop == 0.0:
            return None
        keep = (drop_rng.random(shape) >= p_drop).astype(dtype)
        return keep / np.asarray(1.0 - p_drop, dtype=dtype)

    x = params["tok_emb"][ids] + params["pos_emb"][:t]
    layer_caches = []
    for i in range(config.layers):
        p = f"l{i}."
        xn, ln1_cache = _layernorm(x, params[p + "ln1.g"], params[p + "ln1.b"])
        q = _split_heads(xn @ params[p + "attn.wq"], heads)
        k = _split_heads(xn @ params[p + "attn.wk"], heads)
        v = _split_heads(xn @ params[p + "attn.wv"], heads)
        scores = np.where(causal, neg_inf, (q * scale) @ k.transpose(0, 1, 3, 2))
        scores -= scores.max(axis=-1, keepdims=True)
        alpha = np.exp(scores)
        alpha /= alpha.sum(axis=-1, keepdims=True)
        ctx = _merge_heads(alpha @ v)
        attn_out = ctx @ params[p + "attn.wo"]
        m_attn = drop_mask(attn_out.shape)
        if m_attn is not None:
            attn_out = attn_out * m_attn
        x1 = x + attn_out

        x1n, ln2_cache = _layernorm(x1, params[p + "ln2.g"], params[p + "ln2.b"])
        u = x1n @ params[p + "mlp.w1"] + params[p + "mlp.b1"]
        act, tanh_cache = _gelu(u)
        mlp_out = act @ params[p + "mlp.w2"] + params[p + "mlp.b2"]
        m_mlp = drop_mask(mlp_out.shape)
        if m_mlp is not None:
            mlp_out = mlp_out * m_mlp
        x2 = x1 + mlp_out
        if need_cache:
            layer_caches.append(
                (xn, ln1_cache, q, k, v, alpha, ctx, x1n, ln2_cache, u, tanh_cache, act, m_attn, m_mlp)
            )
        x = x2

    xf, lnf_cache = _layernorm(x, params["ln_f.g"], params["ln_f.b"])
    logits = xf @ params["tok_emb"].T
    cache = (ids, layer_caches, xf, lnf_cache) if need_cache else None
    return logits, cache


def forward(params, config: ModelConfig, ids: np.ndarray) -> np.ndarray:
    """Inference-only forward pass."""
    return _forward(params, config, ids, need_cache=False)[0]


def _masked_ce(logits, targets, mask):
    """Mean cross entropy (nats) over positions where mask is true.

    Returns (loss, dlogits, n_positions); dlogits is already divided by
    the position count.
    """
    dtype = logits.dtype
    n = int(mask.sum())
    if n == 0:
        warnings.warn("loss requested with every position masked; defining it as 0", stacklevel=3)
        return np.asarray(0.0, dtype=dtype), np.zeros_like(logits), 0
    shifted = logits - logits.max(axis=-1, keepdims=True)
    logz = np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    logp = shifted - logz
    b_idx, t_idx = np.nonzero(mask)
    nll = -logp[b_idx, t_idx, targets[b_idx, t_idx]]
    total = nll.sum() / n
    probs = np.exp(logp)
    dlogits = np.where(mask[..., None], probs, np.asarray(0.0, dtype=dtype))
    dlogits[b_idx, t_idx, targets[b_idx, t_idx]] -= 1.0
    dlogits /= n
    return total.astype(dtype), dlogits, n


def loss(params, config: ModelConfig, inputs, targets, mask) -> float:
    """Masked mean next-token cross entropy in nats."""
    logits, _ = _forward(params, config, inputs, need_cache=False)
    value, _, _ = _masked_ce(logits, np.asarray(targets), np.asarray(mask, dtype=bool))
    return float(value)


def loss_and_grads(
    params, config: ModelConfig, inputs, targets, mask, drop_rng=None
) -> tuple[float, dict[str, np.ndarray]]:
    """Loss plus the full analytic gradient, one dict entry per parameter."""
    inputs = np.asarray(inputs)
    targets = np.asarray(targets)
    mask = np.asarray(mask, dtype=bool)
    logits, cache = _forward(params, config, inputs, need_cache=True, drop_rng=drop_rng)
    value, dlogits, _ = _masked_ce(logits, targets, mask)
    ids, layer_caches, xf, lnf_cache = cache

    b, t, d = xf.shape
    heads = config.heads
    hd = d // heads
    dtype = params["tok_emb"].dtype
    scale = np.asarray(1.0 / np.sqrt(hd), dtype=dtype)
    grads: dict[str, np.ndarray] = {}

    # tied output projection
    flat_dl = dlogits.reshape(-1, dlogits.shape[-1])
    grads["tok_emb"] = flat_dl.T @ xf.reshape(-1, d)
    dxf = dlogits @ params["tok_emb"]
    dx, dg, db = _layernorm_bwd(dxf, lnf_cache, params["ln_f.g"])
    grads["ln_f.g"], grads["ln_f.b"] = dg, db

    for i in reversed(range(config.layers)):
        p = f"l{i}."
        (xn, ln1_cache, q, k, v, alpha, ctx, x1n, ln2_cache, u, tanh_cache, act, m_attn, m_mlp) = layer_caches[i]

        # mlp branch
        dmlp = dx if m_mlp is None else dx * m_mlp
        grads[p + "mlp.b2"] = dmlp.sum(axis=(0, 1))
        grads[p + "mlp.w2"] = act.reshape(-1, act.shape[-1]).T @ dmlp.reshape(-1, d)
        dact = dmlp @ params[p + "mlp.w2"].T
        du = _gelu_bwd(dact, u, tanh_cache)
        grads[p + "mlp.b1"] = du.sum(axis=(0, 1))
        grads[p + "mlp.w1"] = x1n.reshape(-1, d).T @ du.reshape(-1, du.shape[-1])
        dx1n = du @ params[p + "mlp.w1"].T
        dx1, dg, db = _layernorm_bwd(dx1n, ln2_cache, params[p + "ln2.g"])
        grads[p + "ln2.g"], grads[p + "ln2.b"] = dg, db
        dx1 = dx1 + dx  # residual passes the upstream gradient through untouched

        # attention branch
        dattn = dx1 if m_attn is None else dx1 * m_attn
        grads[p + "attn.wo"] = ctx.reshape(-1, d).T @ dattn.reshape(-1, d)
        dctx = _split_heads(dattn @ params[p + "attn.wo"].T, heads)
        dalpha = dctx @ v.transpose(0, 1, 3, 2)
        dv = alpha.transpose(0, 1, 3, 2) @ dctx
        dscores = alpha * (dalpha - (dalpha * alpha).sum(axis=-1, keepdims=True))
        dq = (dscores @ k) * scale
        dk = (dscores.transpose(0, 1, 3, 2) @ q) * scale
        dq, dk, dv = (_merge_heads(a) for a in (dq, dk, dv))
        flat_xn = xn.reshape(-1, d)
        grads[p + "attn.wq"] = flat_xn.T @ dq.reshape(-1, d)
        grads[p + "attn.wk"] = flat_xn.T @ dk.reshape(-1, d)
        grads[p + "attn.wv"] = flat_xn.T @ dv.reshape(-1, d)
        dxn = (
            dq @ params[p + "attn.wq"].T
            + dk @ params[p + "attn.wk"].T
            + dv @ params[p + "attn.wv"].T
        )
        dx0, dg, db = _layernorm_bwd(dxn, ln1_cache, params[p + "ln1.g"])
        grads[p + "ln1.g"], grads[p + "ln1.b"] = dg, db
        dx = dx0 + dx1  # residual

    # embeddings: scatter token grads, sum position grads over the batch
    np.add.at(grads["tok_emb"], ids.reshape(-1), dx.reshape(-1, d))
    dpos = np.zeros_like(params["pos_emb"])
    dpos[:t] = dx.sum(axis=0)
    grads["pos_emb"] = dpos
    return float(value), grads


@dataclass(frozen=True)
class GradientCheckResult:
    max_rel_error: float
    checked: int
    worst_param: str

    @property
    def ok(self) -> bool:
        return self.max_rel_error < 1e-4


def gradient_check(
    params: dict[str, np.ndarray],
    config: ModelConfig,
    inputs,
    targets,
    mask,
    n_coords: int = 200,
    h: float = 1e-3,
    seed: int = 0,
) -> GradientCheckResult:
    """Compare analytic gradients against central finite differences on
    randomly sampled coordinates.

    Uses the five-point (fourth-order) central stencil at step ``h``: at
    h = 1e-3 the plain two-point stencil's truncation error is ~1e-6
    absolute, which alone exceeds a 1e-4 relative tolerance wherever the
    true gradient is small, so it cannot distinguish a correct backward
    pass from a broken one. Parameters should be float64; float32
    roundoff in the loss is larger than the tolerance.
    """
    for p in params.values():
        if p.dtype != np.float64:
            raise ConfigError("gradient_check requires float64 parameters")
    if config.dropout != 0.0:
        raise ConfigError("gradient_check requires dropout 0 (stochastic masks are not differentiable targets)")
    inputs = np.asarray(inputs)
    targets = np.asarray(targets)
    mask = np.asarray(mask, dtype=bool)
    _, grads = loss_and_grads(params, config, inputs, targets, mask)

    names = sorted(params)
    sizes = np.array([params[n].size for n in names])
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    rng = np.random.default_rng(seed)
    coords = rng.choice(int(offsets[-1]), size=min(n_coords, int(offsets[-1])), replace=False)

    worst, worst_param = 0.0, ""
    for flat_idx in coords:
        which = int(np.searchsorted(offsets, flat_idx, side="right") - 1)
        name = names[which]
        idx = int(flat_idx - offsets[which])
        flat = params[name].reshape(-1)
        orig = flat[idx]
        samples = {}
        for k in (-2, -1, 1, 2):
            flat[idx] = orig + k * h
            samples[k] = loss(params, config, inputs, targets, mask)
        flat[idx] = orig
        fd = (-samples[2] + 8 * samples[1] - 8 * samples[-1] + samples[-2]) / (12 * h)
        analytic = float(grads[name].reshape(-1)[idx])
        rel = abs(fd - analytic) / max(abs(fd), abs(analytic), 1e-10)
        if rel > worst:
            worst, worst_param = rel, name
    return GradientCheckResult(worst, len(coords), worst_param)


def _dtype_code(dtype) -> int:
    return {np.dtype(np.float32): 4, np.dtype(np.float64): 8}[np.dtype(dtype)]


def _dtype_from_code(code: int):
    try:
        return {4: np.float32, 8: np.float64}[code]
    except KeyError:
        raise CheckpointError(f"unknown dtype code {code}") from None


def save_checkpoint(
    path: Union[str, Path],
    params: dict[str, np.ndarray],
    config: ModelConfig,
    extra: Optional[dict] = None,
) -> None:
    """Self-describing binary checkpoint: a JSON header (model config
    plus caller metadata) followed by named little-endian tensors."""
    header = {"model": asdict(config), "extra": extra or {}}
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_CHECKPOINT_MAGIC)
        fh.write(struct.pack("<II", _CHECKPOINT_VERSION, len(blob)))
        fh.write(blob)
        fh.write(struct.pack("<I", len(params)))
        for name in sorted(params):
            tensor = params[name]
            encoded = name.encode("utf-8")
            fh.write(struct.pack("<H", len(encoded)))
            fh.write(encoded)
            fh.write(struct.pack("<BB", tensor.ndim, _dtype_code(tensor.dtype)))
            fh.write(struct.pack(f"<{tensor.ndim}I", *tensor.shape))
            fh.write(np.ascontiguousarray(tensor, dtype=f"<f{tensor.dtype.itemsize}").tobytes())


def load_checkpoint(
    path: Union[str, Path],
) -> tuple[dict[str, np.ndarray], ModelConfig, dict]:
    data = Path(path).read_bytes()
    if data[:4] != _CHECKPOINT_MAGIC:
        raise CheckpointError(f"{path}: not a checkpoint file")
    version, blob_len = struct.unpack_from("<II", data, 4)
    if version != _CHECKPOINT_VERSION:
        raise CheckpointError(f"{path}: unsupported checkpoint version {version}")
    pos = 12
    try:
        header = json.loads(data[pos : pos + blob_len].decode("utf-8"))
        pos += blob_len
        config = ModelConfig(**header["model"])
        (n_tensors,) = struct.unpack_from("<I", data, pos)
        pos += 4
        params: dict[str, np.ndarray] = {}
        for _ in range(n_tensors):
            (name_len,) = struct.unpack_from("<H", data, pos)
            pos += 2
            name = data[pos : pos + name_len].decode("utf-8")
            pos += name_len
            ndim, dcode = struct.unpack_from("<BB", data, pos)
            pos += 2
            shape = struct.unpack_from(f"<{ndim}I", data, pos)
            pos += 4 * ndim
            dtype = np.dtype(_dtype_from_code(dcode))
            count = int(np.prod(shape)) if ndim else 1
            arr = np.frombuffer(data, dtype=f"<f{dtype.itemsize}", count=count, offset=pos)
            pos += count * dtype.itemsize
            params[name] = arr.reshape(shape).astype(dtype)
    except (KeyError, ValueError, struct.error) as exc:
        raise CheckpointError(f"{path}: corrupt checkpoint ({exc})") from exc
    if pos != len(data):
        raise CheckpointError(f"{path}: trailing bytes after tensors")
    return params, config, header.get("extra", {})
