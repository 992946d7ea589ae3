"""Soft-margin SVM classifier trained by sequential minimal optimization.

The trainer solves the dual of

    min 1/2 ||w||^2 + C * sum(xi_i)
    s.t. y_i (w . x_i + b) >= 1 - xi_i,  xi_i >= 0

with Platt-style analytic two-variable updates. Every iterate stays inside
the box 0 <= alpha_i <= C, the dual objective never decreases on an accepted
step, and the loop terminates only once every training point satisfies the
KKT conditions at the working tolerance -- recentering the bias first when
no interior alpha pins it (or the sweep budget is exhausted, which raises).

Feature standardization is baked into the model: training standardizes the
inputs per dimension and predictions standardize incoming vectors with the
stored means/devs, so callers always pass raw features.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateLabels,
    DimensionMismatch,
    EmptyInput,
    InvalidConfig,
    LengthMismatch,
    NoConvergence,
    NonFiniteValue,
)

KERNEL_KINDS = ("linear", "rbf")


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "rbf"
    gamma: float | None = None  # required for rbf, ignored for linear

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise InvalidConfig(f"kernel kind must be one of {KERNEL_KINDS}, got {self.kind!r}")
        if self.kind == "rbf":
            if self.gamma is None or not self.gamma > 0:
                raise InvalidConfig("rbf kernel needs gamma > 0")


@dataclass(frozen=True)
class SvmConfig:
    c: float = 1.0
    tolerance: float = 1e-3
    max_passes: int | None = None  # sweep budget; None resolves to 10 * n_samples
    seed: int = 0
    standardize: bool = True
    record_diagnostics: bool = False

    def __post_init__(self):
        if not self.c > 0:
            raise InvalidConfig("C must be > 0")
        if not self.tolerance > 0:
            raise InvalidConfig("tolerance must be > 0")
        if self.max_passes is not None and self.max_passes < 1:
            raise InvalidConfig("max_passes must be >= 1")


@dataclass
class SvmModel:
    """Trained classifier; support vectors are stored in standardized space."""

    kernel: KernelSpec
    c: float
    bias: float
    means: np.ndarray
    devs: np.ndarray
    support_vectors: np.ndarray  # (m, d), standardized
    dual_coefs: np.ndarray       # (m,), alpha_i * y_i
    diagnostics: dict | None = field(default=None, repr=False, compare=False)

    def to_json_dict(self) -> dict:
        doc = {
            "schema_version": 1,
            "model_type": "svm",
            "kernel": self.kernel.kind,
            "c": float(self.c),
            "bias": float(self.bias),
            "scaling": {
                "means": [float(v) for v in self.means],
                "devs": [float(v) for v in self.devs],
            },
            "support_vectors": [[float(v) for v in row] for row in self.support_vectors],
            "dual_coefs": [float(v) for v in self.dual_coefs],
        }
        if self.kernel.kind == "rbf":
            doc["gamma"] = float(self.kernel.gamma)
        return doc

    @classmethod
    def from_json_dict(cls, doc: dict) -> "SvmModel":
        if doc.get("model_type") != "svm":
            raise InvalidConfig(f"not an svm model document: {doc.get('model_type')!r}")
        kernel = KernelSpec(kind=doc["kernel"], gamma=doc.get("gamma"))
        means = np.asarray(doc["scaling"]["means"], dtype=np.float64)
        devs = np.asarray(doc["scaling"]["devs"], dtype=np.float64)
        svs = np.asarray(doc["support_vectors"], dtype=np.float64)
        coefs = np.asarray(doc["dual_coefs"], dtype=np.float64)
        if svs.size == 0:
            svs = svs.reshape(0, means.shape[0])
        if svs.shape[0] != coefs.shape[0] or (svs.size and svs.shape[1] != means.shape[0]):
            raise DimensionMismatch("inconsistent support vector / coefficient shapes")
        return cls(kernel=kernel, c=float(doc["c"]), bias=float(doc["bias"]),
                   means=means, devs=devs, support_vectors=svs, dual_coefs=coefs)


# --- kernels -----------------------------------------------------------------


def kernel_eval(spec: KernelSpec, x, z) -> float:
    """k(x, z) on raw vectors: dot product, or exp(-gamma ||x - z||^2)."""
    x = np.asarray(x, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if x.shape != z.shape or x.ndim != 1:
        raise DimensionMismatch(f"kernel arguments must be equal-length vectors, got {x.shape} vs {z.shape}")
    if spec.kind == "linear":
        return float(x @ z)
    diff = x - z
    return float(np.exp(-spec.gamma * (diff @ diff)))


def _kernel_matrix(spec: KernelSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if spec.kind == "linear":
        return a @ b.T
    sq = (a * a).sum(axis=1)[:, None] + (b * b).sum(axis=1)[None, :] - 2.0 * (a @ b.T)
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-spec.gamma * sq)


# --- prediction --------------------------------------------------------------


def _standardized(model: SvmModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != model.means.shape:
        raise DimensionMismatch(f"expected {model.means.shape[0]} features, got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise NonFiniteValue("feature vector must be finite")
    return (x - model.means) / model.devs


def svm_score(model: SvmModel, x) -> float:
    """Signed decision value f(x) = sum_i alpha_i y_i k(sv_i, x) + b."""
    xs = _standardized(model, x)
    if model.support_vectors.shape[0] == 0:
        return float(model.bias)
    k = _kernel_matrix(model.kernel, model.support_vectors, xs[None, :])[:, 0]
    return float(model.dual_coefs @ k + model.bias)


def svm_decision(model: SvmModel, x) -> int:
    """Class label sign(f(x)) in {-1, +1}, with sign(0) = +1."""
    return 1 if svm_score(model, x) >= 0.0 else -1


def svm_predict_proba(model: SvmModel, x) -> float:
    """Logistic squash 1 / (1 + exp(-f(x))) of the decision value."""
    return float(1.0 / (1.0 + np.exp(-svm_score(model, x))))


# --- SMO training ------------------------------------------------------------


class _Smo:
    """Platt's SMO working state over standardized training data."""

    # Minimum relative change for a pair update to count as progress; shrinks
    # with the tolerance so tight configs can polish below it.
    STEP_EPS = 1e-5

    def __init__(self, x, y, cfg: SvmConfig, kernel: KernelSpec):
        self.x = x
        self.y = y
        self.cfg = cfg
        self.kernel = kernel
        self.n = x.shape[0]
        self.c = float(cfg.c)
        self.tol = float(cfg.tolerance)
        self.step_eps = min(self.STEP_EPS, 0.1 * self.tol)
        self.snap = min(1e-8, 0.01 * self.tol) * self.c
        self.k = _kernel_matrix(kernel, x, x)
        self.alphas = np.zeros(self.n)
        self.bias = 0.0
        # f(x_i) - y_i for every training point; alphas start at 0 so f = b = 0.
        self.errors = -y.astype(np.float64)
        self.rng = np.random.default_rng(cfg.seed)
        self.objective_trace: list[float] = []
        self.alpha_bounds_ok = True
        self.record = cfg.record_diagnostics

    def dual_objective(self) -> float:
        v = self.alphas * self.y
        return float(self.alphas.sum() - 0.5 * (v @ self.k @ v))

    def take_step(self, i1: int, i2: int) -> bool:
        if i1 == i2:
            return False
        a1_old, a2_old = self.alphas[i1], self.alphas[i2]
        y1, y2 = self.y[i1], self.y[i2]
        e1, e2 = self.errors[i1], self.errors[i2]
        s = y1 * y2
        if s < 0:
            low = max(0.0, a2_old - a1_old)
            high = min(self.c, self.c + a2_old - a1_old)
        else:
            low = max(0.0, a1_old + a2_old - self.c)
            high = min(self.c, a1_old + a2_old)
        if low >= high:
            return False
        k11, k12, k22 = self.k[i1, i1], self.k[i1, i2], self.k[i2, i2]
        eta = k11 + k22 - 2.0 * k12
        if eta > 0.0:
            a2 = a2_old + y2 * (e1 - e2) / eta
            a2 = min(max(a2, low), high)
        else:
            # Flat or concave direction: evaluate the dual at both clip ends.
            f1 = y1 * (e1 + self.bias) - a1_old * k11 - s * a2_old * k12
            f2 = y2 * (e2 + self.bias) - s * a1_old * k12 - a2_old * k22
            l1 = a1_old + s * (a2_old - low)
            h1 = a1_old + s * (a2_old - high)
            obj_low = (l1 * f1 + low * f2 + 0.5 * l1 * l1 * k11
                       + 0.5 * low * low * k22 + s * low * l1 * k12)
            obj_high = (h1 * f1 + high * f2 + 0.5 * h1 * h1 * k11
                        + 0.5 * high * high * k22 + s * high * h1 * k12)
            if obj_low < obj_high - self.step_eps:
                a2 = low
            elif obj_low > obj_high + self.step_eps:
                a2 = high
            else:
                return False
        if abs(a2 - a2_old) < self.step_eps * (a2 + a2_old + self.step_eps):
            return False
        a1 = a1_old + s * (a2_old - a2)
        # Guard the box against rounding, and snap near-bound dust to the exact
        # bound so zero means zero (a 1e-18 alpha would read as interior).
        a1 = 0.0 if a1 < self.snap else self.c if a1 > self.c - self.snap else a1
        a2 = 0.0 if a2 < self.snap else self.c if a2 > self.c - self.snap else a2
        if a1 == a1_old and a2 == a2_old:
            return False

        d1 = y1 * (a1 - a1_old)
        d2 = y2 * (a2 - a2_old)
        b1 = self.bias - e1 - d1 * k11 - d2 * k12
        b2 = self.bias - e2 - d1 * k12 - d2 * k22
        if 0.0 < a1 < self.c:
            new_bias = b1
        elif 0.0 < a2 < self.c:
            new_bias = b2
        else:
            new_bias = 0.5 * (b1 + b2)

        self.errors += d1 * self.k[i1] + d2 * self.k[i2] + (new_bias - self.bias)
        self.alphas[i1] = a1
        self.alphas[i2] = a2
        self.bias = new_bias
        if self.record:
            self.objective_trace.append(self.dual_objective())
            if self.alphas.min() < 0.0 or self.alphas.max() > self.c:
                self.alpha_bounds_ok = False
        return True

    def violates_kkt(self, i: int) -> bool:
        r = self.errors[i] * self.y[i]  # = y_i f(x_i) - 1
        return (r < -self.tol and self.alphas[i] < self.c) or (r > self.tol and self.alphas[i] > 0.0)

    def recenter_bias(self) -> None:
        """Move the bias to the middle of the interval the KKT conditions allow.

        Pair updates are invariant to the bias (they use error differences),
        so they pin it only through interior alphas. When the solution puts
        every alpha on a box bound, the running bias can drift outside the
        feasible interval even though the alphas are already optimal.
        """
        # b = y_i - g_i puts point i exactly on its margin, where g is the
        # biasless score; errors_i = g_i + bias - y_i.
        targets = self.bias - self.errors
        lows, highs = [], []
        for i in range(self.n):
            if 0.0 < self.alphas[i] < self.c:
                lows.append(targets[i])
                highs.append(targets[i])
            elif (self.y[i] > 0.0) == (self.alphas[i] <= 0.0):
                lows.append(targets[i])  # (+1, alpha=0) or (-1, alpha=C): b >= target
            else:
                highs.append(targets[i])
        if not lows:
            new_bias = min(highs)
        elif not highs:
            new_bias = max(lows)
        else:
            new_bias = 0.5 * (max(lows) + min(highs))
        self.errors += new_bias - self.bias
        self.bias = new_bias

    def examine(self, i2: int) -> bool:
        if not self.violates_kkt(i2):
            return False
        non_bound = np.flatnonzero((self.alphas > 0.0) & (self.alphas < self.c))
        if non_bound.shape[0] > 1:
            # Heuristic: the partner with the largest |E1 - E2| moves farthest.
            i1 = int(non_bound[np.argmax(np.abs(self.errors[non_bound] - self.errors[i2]))])
            if self.take_step(i1, i2):
                return True
        if non_bound.shape[0]:
            start = int(self.rng.integers(non_bound.shape[0]))
            for offset in range(non_bound.shape[0]):
                if self.take_step(int(non_bound[(start + offset) % non_bound.shape[0]]), i2):
                    return True
        start = int(self.rng.integers(self.n))
        for offset in range(self.n):
            if self.take_step((start + offset) % self.n, i2):
                return True
        return False

    def solve(self) -> int:
        budget = self.cfg.max_passes if self.cfg.max_passes is not None else 10 * self.n
        sweeps = 0
        while True:
            examine_all = True
            num_changed = 1
            while num_changed > 0 or examine_all:
                sweeps += 1
                if sweeps > budget:
                    raise NoConvergence(
                        f"SMO exhausted its budget of {budget} sweeps",
                        diagnostics={
                            "sweeps": sweeps - 1,
                            "violations": int(sum(self.violates_kkt(i) for i in range(self.n))),
                            "dual_objective": self.dual_objective(),
                            "alphas": self.alphas.copy(),
                            "bias": self.bias,
                        },
                    )
                num_changed = 0
                if examine_all:
                    indices = range(self.n)
                else:
                    indices = np.flatnonzero((self.alphas > 0.0) & (self.alphas < self.c))
                for i2 in indices:
                    if self.examine(int(i2)):
                        num_changed += 1
                if examine_all:
                    examine_all = False
                elif num_changed == 0:
                    examine_all = True
            if not any(self.violates_kkt(i) for i in range(self.n)):
                return sweeps
            # All-bound solutions leave the bias loose; recenter and recheck.
            self.recenter_bias()
            if not any(self.violates_kkt(i) for i in range(self.n)):
                return sweeps


def svm_train(features, labels, cfg: SvmConfig | None = None,
              kernel: KernelSpec | None = None) -> SvmModel:
    """Fit a soft-margin SVM; returns a model with scaling baked in.

    ``labels`` must contain both classes as -1/+1. At exit the KKT conditions
    hold at cfg.tolerance for every training point.
    """
    cfg = cfg or SvmConfig()
    kernel = kernel or KernelSpec(kind="rbf", gamma=0.5)
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionMismatch("features must be a 2-D array (n_samples, n_features)")
    if x.shape[0] == 0:
        raise EmptyInput("no training samples")
    if y.shape != (x.shape[0],):
        raise LengthMismatch(f"{x.shape[0]} feature rows but {y.shape} labels")
    if not np.all(np.isfinite(x)):
        raise NonFiniteValue("training features must be finite")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise DegenerateLabels("labels must be -1 or +1")
    if np.unique(y).shape[0] < 2:
        raise DegenerateLabels("training labels contain a single class")

    if cfg.standardize:
        means = x.mean(axis=0)
        devs = x.std(axis=0)
        devs = np.where(devs == 0.0, 1.0, devs)
    else:
        means = np.zeros(x.shape[1])
        devs = np.ones(x.shape[1])
    xs = (x - means) / devs

    smo = _Smo(xs, y, cfg, kernel)
    sweeps = smo.solve()

    sv_mask = smo.alphas > 0.0
    model = SvmModel(
        kernel=kernel,
        c=cfg.c,
        bias=smo.bias,
        means=means,
        devs=devs,
        support_vectors=xs[sv_mask].copy(),
        dual_coefs=(smo.alphas * y)[sv_mask],
    )
    if cfg.record_diagnostics:
        model.diagnostics = {
            "alphas": smo.alphas.copy(),
            "sweeps": sweeps,
            "objective_trace": smo.objective_trace,
            "alpha_bounds_ok": smo.alpha_bounds_ok,
            "standardized_x": xs,
        }
    return model
