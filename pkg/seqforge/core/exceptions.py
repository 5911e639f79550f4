"""Framework exceptions."""

from typing import Optional


class SeqforgeError(RuntimeError):
    """Base class for all framework errors."""

    pass


class ConfigError(SeqforgeError, ValueError):
    """Raised when a training config, sweep grid or generator spec is invalid."""

    pass


class DataFormatError(SeqforgeError, ValueError):
    """Raised when a dataset or schema file cannot be parsed.

    Parameters
    ----------
    message : str
        Description of the problem.
    line_number : Optional[int]
        1-based line number of the offending record, if known.
    """

    def __init__(self, message: str, line_number: Optional[int] = None) -> None:
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class ShapeError(SeqforgeError, ValueError):
    """Raised when tensor or loss operands have incompatible shapes."""

    pass


class NonFiniteLossError(SeqforgeError):
    """Raised by the gradient checker when a perturbed loss is not finite."""

    def __init__(self, parameter_index: int, element_index: int) -> None:
        super().__init__(
            f"non-finite loss at parameter {parameter_index}, element {element_index}"
        )
        self.parameter_index = parameter_index
        self.element_index = element_index


class DivergenceError(SeqforgeError):
    """Raised when training produces non-finite losses or activations.

    Parameters
    ----------
    phase : str
        Training phase that diverged.
    epoch : int
        Collaborative epoch index (1-based).
    last_checkpoint : Optional[str]
        Path of the last checkpoint written before divergence.
    """

    def __init__(self, phase: str, epoch: int, last_checkpoint: Optional[str] = None) -> None:
        msg = f"{phase} phase diverged in collaborative epoch {epoch}"
        if last_checkpoint:
            msg += f" (last good checkpoint: {last_checkpoint})"
        super().__init__(msg)
        self.phase = phase
        self.epoch = epoch
        self.last_checkpoint = last_checkpoint


class CheckpointError(SeqforgeError):
    """Raised when a checkpoint is missing or corrupt."""

    pass
