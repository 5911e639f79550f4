"""Parameter containers shared by the interpreter and classifier networks."""

import hashlib
from typing import Dict, List, Tuple

import numpy as np

from seqforge.core.exceptions import ShapeError
from seqforge.numerics.tensor import Tensor


def xavier_uniform(rng: np.random.Generator, fan_in: int, fan_out: int, shape=None) -> np.ndarray:
    """Glorot-uniform initial weights of ``shape`` (default (fan_in, fan_out))."""
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape if shape is not None else (fan_in, fan_out))


class Module:
    """Named tree of trainable tensors.

    Parameters are registered with ``add_parameter`` and sub-modules with
    ``add_module``; ``named_parameters`` walks both in registration order,
    so parameter order (and therefore optimizer state and checkpoint
    layout) is fixed by construction order.
    """

    def __init__(self) -> None:
        self._parameters: Dict[str, Tensor] = {}
        self._modules: Dict[str, "Module"] = {}

    def add_parameter(self, name: str, value: np.ndarray) -> Tensor:
        param = Tensor.parameter(value)
        self._parameters[name] = param
        return param

    def add_module(self, name: str, module: "Module") -> "Module":
        self._modules[name] = module
        return module

    def named_parameters(self, prefix: str = "") -> List[Tuple[str, Tensor]]:
        out = [(f"{prefix}{name}", p) for name, p in self._parameters.items()]
        for name, module in self._modules.items():
            out.extend(module.named_parameters(prefix=f"{prefix}{name}."))
        return out

    def parameters(self) -> List[Tensor]:
        return [p for _, p in self.named_parameters()]

    def num_parameters(self) -> int:
        return int(sum(p.size for p in self.parameters()))

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.zero_grad()

    def state_dict(self) -> Dict[str, np.ndarray]:
        """Copies of every parameter keyed by dotted name."""
        return {name: p.data.copy() for name, p in self.named_parameters()}

    def load_state_dict(self, state: Dict[str, np.ndarray]) -> None:
        """Overwrite parameters in place.

        Raises
        ------
        KeyError
            If a parameter is missing from ``state``.
        ShapeError
            If a stored array has the wrong shape.
        """
        for name, param in self.named_parameters():
            if name not in state:
                raise KeyError(f"missing parameter {name!r}")
            value = np.asarray(state[name], dtype=np.float64)
            if value.shape != param.shape:
                raise ShapeError(f"parameter {name!r} expects {param.shape}, got {value.shape}")
            param.data[...] = value

    def checksum(self) -> str:
        """sha256 over all parameter bytes; changes iff any weight changes."""
        digest = hashlib.sha256()
        for name, param in self.named_parameters():
            digest.update(name.encode("utf-8"))
            digest.update(np.ascontiguousarray(param.data).tobytes())
        return digest.hexdigest()


class Dense(Module):
    """Affine map ``x @ weight + bias`` over the last axis."""

    def __init__(self, in_features: int, out_features: int, rng: np.random.Generator) -> None:
        super().__init__()
        self.in_features = in_features
        self.out_features = out_features
        self.weight = self.add_parameter("weight", xavier_uniform(rng, in_features, out_features))
        self.bias = self.add_parameter("bias", np.zeros(out_features))

    def __call__(self, x: Tensor) -> Tensor:
        return x @ self.weight + self.bias
