"""Bridge package: MAG/SIGN/IRL tensors, reducer and bridge loss."""

from seqforge.bridge.irl import (
    BridgeTensors,
    Reducer,
    bridge_tensors,
    irl_matrix,
    magnitude,
    reduce_irl,
    sign_matrix,
)
from seqforge.bridge.losses import bridge_loss, interpreter_total_loss

__all__ = [
    "BridgeTensors",
    "Reducer",
    "magnitude",
    "sign_matrix",
    "irl_matrix",
    "reduce_irl",
    "bridge_tensors",
    "bridge_loss",
    "interpreter_total_loss",
]
