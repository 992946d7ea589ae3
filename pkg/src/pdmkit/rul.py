"""Remaining-useful-life estimators.

Two independent routes over the same window features:

* an LSTM over feature sequences, trained with full-sequence
  backpropagation through time on mean-squared error, plain gradient
  descent, and global gradient-norm clipping;
* the linear model rul = beta0 + sum_i beta_i * F_i, fit by ordinary
  least squares on the normal equations with a tiny ridge fallback when
  the Gram matrix is singular.

Targets are milliseconds. The LSTM stores a target scale (max |target|)
so optimization happens on O(1) values; predictions rescale and clamp at 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyInput,
    InsufficientData,
    InvalidConfig,
    NonFiniteLoss,
    NonFiniteValue,
    ShapeMismatch,
)
from .features import FeatureVector

INIT_SPAN = 0.08  # uniform init range for all weights
RIDGE_LAMBDA = 1e-8

_PARAM_NAMES = (
    "w_forget", "w_input", "w_output", "w_cand",
    "b_forget", "b_input", "b_output", "b_cand",
    "w_head", "b_head",
)


def _sigmoid(a: np.ndarray) -> np.ndarray:
    out = np.empty_like(a)
    pos = a >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-a[pos]))
    expa = np.exp(a[~pos])
    out[~pos] = expa / (1.0 + expa)
    return out


@dataclass
class LstmCellState:
    """Cell memory and hidden activation after a step."""

    c: np.ndarray
    h: np.ndarray


@dataclass
class LstmModel:
    """Gate weights over [x_t, h_{t-1}], a linear head, and the target scale."""

    input_dim: int
    hidden_dim: int
    w_forget: np.ndarray
    w_input: np.ndarray
    w_output: np.ndarray
    w_cand: np.ndarray
    b_forget: np.ndarray
    b_input: np.ndarray
    b_output: np.ndarray
    b_cand: np.ndarray
    w_head: np.ndarray
    b_head: np.ndarray  # shape (1,)
    target_scale: float = 1.0
    seed: int = 0

    @classmethod
    def init(cls, input_dim: int, hidden_dim: int, seed: int = 0) -> "LstmModel":
        """Uniform [-0.08, 0.08] weights; forget-gate bias starts at 1.0."""
        if input_dim < 1 or hidden_dim < 1:
            raise InvalidConfig("input_dim and hidden_dim must be >= 1")
        rng = np.random.default_rng(seed)
        d = input_dim + hidden_dim

        def draw(*shape):
            return rng.uniform(-INIT_SPAN, INIT_SPAN, size=shape)

        return cls(
            input_dim=input_dim,
            hidden_dim=hidden_dim,
            w_forget=draw(hidden_dim, d),
            w_input=draw(hidden_dim, d),
            w_output=draw(hidden_dim, d),
            w_cand=draw(hidden_dim, d),
            b_forget=np.ones(hidden_dim),
            b_input=draw(hidden_dim),
            b_output=draw(hidden_dim),
            b_cand=draw(hidden_dim),
            w_head=draw(hidden_dim),
            b_head=draw(1),
            seed=seed,
        )

    def params(self) -> list[tuple[str, np.ndarray]]:
        return [(name, getattr(self, name)) for name in _PARAM_NAMES]

    def to_json_dict(self) -> dict:
        return {
            "schema_version": 1,
            "model_type": "lstm",
            "dims": {"input_dim": self.input_dim, "hidden_dim": self.hidden_dim},
            "target_scale": float(self.target_scale),
            "seed": int(self.seed),
            "parameters": {
                name: {"shape": list(arr.shape), "data": [float(v) for v in arr.ravel()]}
                for name, arr in self.params()
            },
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "LstmModel":
        if doc.get("model_type") != "lstm":
            raise InvalidConfig(f"not an lstm model document: {doc.get('model_type')!r}")
        dims = doc["dims"]
        kwargs = {}
        for name in _PARAM_NAMES:
            entry = doc["parameters"][name]
            kwargs[name] = np.asarray(entry["data"], dtype=np.float64).reshape(entry["shape"])
        return cls(
            input_dim=int(dims["input_dim"]),
            hidden_dim=int(dims["hidden_dim"]),
            target_scale=float(doc["target_scale"]),
            seed=int(doc.get("seed", 0)),
            **kwargs,
        )


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-2
    epochs: int = 100
    grad_clip: float = 5.0
    seed: int = 0

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise InvalidConfig("learning_rate must be > 0")
        if not isinstance(self.epochs, int) or self.epochs < 1:
            raise InvalidConfig("epochs must be a positive integer")
        if not self.grad_clip > 0:
            raise InvalidConfig("grad_clip must be > 0")


# --- forward -----------------------------------------------------------------


def lstm_cell_step(model: LstmModel, x, prev: LstmCellState | None = None) -> LstmCellState:
    """One step: gates over [x, h_prev], then c = f*c_prev + i*c~, h = o*tanh(c)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (model.input_dim,):
        raise DimensionMismatch(f"expected input of shape ({model.input_dim},), got {x.shape}")
    if prev is None:
        prev = LstmCellState(c=np.zeros(model.hidden_dim), h=np.zeros(model.hidden_dim))
    z = np.concatenate([x, prev.h])
    forget = _sigmoid(model.w_forget @ z + model.b_forget)
    update = _sigmoid(model.w_input @ z + model.b_input)
    out = _sigmoid(model.w_output @ z + model.b_output)
    cand = np.tanh(model.w_cand @ z + model.b_cand)
    c = forget * prev.c + update * cand
    h = out * np.tanh(c)
    return LstmCellState(c=c, h=h)


def _as_sequence(model: LstmModel, seq) -> np.ndarray:
    arr = np.asarray(seq, dtype=np.float64)
    if arr.ndim == 1 and model.input_dim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[1] != model.input_dim:
        raise ShapeMismatch(f"sequence must be (T, {model.input_dim}), got {arr.shape}")
    if arr.shape[0] == 0:
        raise EmptyInput("empty sequence")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteValue("sequence values must be finite")
    return arr


def _forward_raw(model: LstmModel, seq: np.ndarray, caches: list | None = None) -> float:
    """Run the cell over a sequence; returns the unclamped head output (scaled space)."""
    c = np.zeros(model.hidden_dim)
    h = np.zeros(model.hidden_dim)
    for x in seq:
        z = np.concatenate([x, h])
        forget = _sigmoid(model.w_forget @ z + model.b_forget)
        update = _sigmoid(model.w_input @ z + model.b_input)
        out = _sigmoid(model.w_output @ z + model.b_output)
        cand = np.tanh(model.w_cand @ z + model.b_cand)
        c_new = forget * c + update * cand
        tc = np.tanh(c_new)
        h_new = out * tc
        if caches is not None:
            caches.append((z, forget, update, out, cand, c, c_new, tc))
        c, h = c_new, h_new
    return float(model.w_head @ h + model.b_head[0])


def lstm_forward(model: LstmModel, seq) -> tuple[float, LstmCellState]:
    """Predicted RUL in target units (clamped at 0) plus the final cell state."""
    arr = _as_sequence(model, seq)
    state = None
    for x in arr:
        state = lstm_cell_step(model, x, state)
    raw = float(model.w_head @ state.h + model.b_head[0])
    return max(0.0, raw * model.target_scale), state


# --- backpropagation through time ---------------------------------------------


def _zero_grads(model: LstmModel) -> dict[str, np.ndarray]:
    return {name: np.zeros_like(arr) for name, arr in model.params()}


def _accumulate_example(model: LstmModel, seq: np.ndarray, d_raw: float,
                        grads: dict[str, np.ndarray]) -> None:
    """Backward pass of one sequence given d(loss)/d(raw output)."""
    caches: list = []
    _forward_raw(model, seq, caches)
    h_final = caches[-1][3] * caches[-1][7]  # o * tanh(c) at the last step
    grads["w_head"] += d_raw * h_final
    grads["b_head"] += d_raw
    dh = d_raw * model.w_head
    dc = np.zeros(model.hidden_dim)
    for z, forget, update, out, cand, c_prev, _c_new, tc in reversed(caches):
        do = dh * tc
        dc = dc + dh * out * (1.0 - tc * tc)
        da_f = dc * c_prev * forget * (1.0 - forget)
        da_i = dc * cand * update * (1.0 - update)
        da_o = do * out * (1.0 - out)
        da_c = dc * update * (1.0 - cand * cand)
        grads["w_forget"] += np.outer(da_f, z)
        grads["w_input"] += np.outer(da_i, z)
        grads["w_output"] += np.outer(da_o, z)
        grads["w_cand"] += np.outer(da_c, z)
        grads["b_forget"] += da_f
        grads["b_input"] += da_i
        grads["b_output"] += da_o
        grads["b_cand"] += da_c
        dz = (model.w_forget.T @ da_f + model.w_input.T @ da_i
              + model.w_output.T @ da_o + model.w_cand.T @ da_c)
        dh = dz[model.input_dim:]
        dc = dc * forget
    return None


def loss_and_grads(model: LstmModel, sequences: list[np.ndarray],
                   targets: np.ndarray) -> tuple[float, dict[str, np.ndarray]]:
    """Mean-squared error over the dataset (scaled space) and its gradients.

    The loss is taken on the raw head output, so it is smooth everywhere and
    finite-difference checkable; the clamp at 0 belongs to prediction.
    """
    m = len(sequences)
    grads = _zero_grads(model)
    loss = 0.0
    for seq, target in zip(sequences, targets):
        raw = _forward_raw(model, seq)
        err = raw - float(target)
        loss += err * err / m
        _accumulate_example(model, seq, 2.0 * err / m, grads)
    return loss, grads


def clip_gradients(grads: dict[str, np.ndarray], max_norm: float) -> float:
    """Scale all gradients in place so their global L2 norm is <= max_norm."""
    total = float(np.sqrt(sum(float((g * g).sum()) for g in grads.values())))
    if total > max_norm and total > 0.0:
        factor = max_norm / total
        for g in grads.values():
            g *= factor
    return total


def lstm_train(data: list[tuple[np.ndarray, float]], cfg: TrainConfig,
               input_dim: int, hidden_dim: int) -> tuple[LstmModel, list[float]]:
    """Full-batch gradient descent with BPTT; returns (model, per-epoch loss).

    ``data`` pairs each feature sequence with a nonnegative RUL target in
    target units; the loss curve is reported in those units squared.
    """
    if not data:
        raise EmptyInput("no training sequences")
    model = LstmModel.init(input_dim, hidden_dim, seed=cfg.seed)
    sequences = [_as_sequence(model, seq) for seq, _ in data]
    raw_targets = np.asarray([t for _, t in data], dtype=np.float64)
    if not np.all(np.isfinite(raw_targets)) or np.any(raw_targets < 0):
        raise NonFiniteValue("RUL targets must be finite and >= 0")

    model.target_scale = max(1.0, float(raw_targets.max()))
    targets = raw_targets / model.target_scale

    loss_curve = []
    for epoch in range(cfg.epochs):
        loss, grads = loss_and_grads(model, sequences, targets)
        if not np.isfinite(loss):
            raise NonFiniteLoss(f"loss became non-finite at epoch {epoch}",
                                epoch=epoch, loss=loss)
        loss_curve.append(loss * model.target_scale**2)
        clip_gradients(grads, cfg.grad_clip)
        for name, arr in model.params():
            arr -= cfg.learning_rate * grads[name]
    return model, loss_curve


# --- linear RUL ----------------------------------------------------------------


@dataclass
class RulLinearModel:
    """rul_hat = beta0 + betas . features, clamped at 0."""

    beta0: float
    betas: np.ndarray

    def to_json_dict(self) -> dict:
        return {
            "schema_version": 1,
            "model_type": "rul_linear",
            "dims": {"features": int(self.betas.shape[0])},
            "parameters": {
                "beta0": float(self.beta0),
                "betas": [float(v) for v in self.betas],
            },
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "RulLinearModel":
        if doc.get("model_type") != "rul_linear":
            raise InvalidConfig(f"not a rul_linear model document: {doc.get('model_type')!r}")
        betas = np.asarray(doc["parameters"]["betas"], dtype=np.float64)
        if betas.shape != (int(doc["dims"]["features"]),):
            raise DimensionMismatch("betas shape disagrees with declared dims")
        return cls(beta0=float(doc["parameters"]["beta0"]), betas=betas)


def as_feature_matrix(features) -> np.ndarray:
    """Stack FeatureVector instances or array rows into an (n, d) float matrix."""
    rows = [fv.values if isinstance(fv, FeatureVector) else np.asarray(fv, dtype=np.float64)
            for fv in features]
    if not rows:
        raise EmptyInput("no feature rows")
    widths = {row.shape for row in rows}
    if len(widths) != 1 or rows[0].ndim != 1:
        raise ShapeMismatch(f"inconsistent feature shapes: {sorted(widths)}")
    return np.vstack(rows)


def rul_fit_linear(features, targets) -> RulLinearModel:
    """Ordinary least squares on the normal equations.

    Singular Gram matrices fall back to ridge with lambda = 1e-8 on the
    slope block only, so a degenerate fit still yields the intercept-only
    solution exactly.
    """
    x = as_feature_matrix(features)
    y = np.asarray(targets, dtype=np.float64)
    n, d = x.shape
    if y.shape != (n,):
        raise ShapeMismatch(f"{n} feature rows but targets of shape {y.shape}")
    if not np.all(np.isfinite(x)) or not np.all(np.isfinite(y)):
        raise NonFiniteValue("features and targets must be finite")
    if n < d + 1:
        raise InsufficientData(f"need at least {d + 1} rows to fit {d} slopes + intercept, got {n}")

    design = np.hstack([np.ones((n, 1)), x])
    gram = design.T @ design
    rhs = design.T @ y
    try:
        beta = np.linalg.solve(gram, rhs)
        if not np.all(np.isfinite(beta)):
            raise np.linalg.LinAlgError
    except np.linalg.LinAlgError:
        ridge = gram + RIDGE_LAMBDA * np.diag([0.0] + [1.0] * d)
        beta = np.linalg.solve(ridge, rhs)
    return RulLinearModel(beta0=float(beta[0]), betas=beta[1:])


def rul_predict_linear(model: RulLinearModel, features) -> float:
    """Predicted RUL, clamped at 0 from below."""
    if isinstance(features, FeatureVector):
        features = features.values
    x = np.asarray(features, dtype=np.float64)
    if x.shape != model.betas.shape:
        raise DimensionMismatch(f"expected {model.betas.shape[0]} features, got {x.shape}")
    return max(0.0, float(model.beta0 + model.betas @ x))
