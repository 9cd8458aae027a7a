from __future__ import annotations

from dataclasses import asdict, dataclass, field


@dataclass
class RunDiagnostics:
    """Iteration record of a 1D or multivariate solve.

    ``max_changes[t]`` is the largest location change applied in iteration
    ``t + 1``. ``reorder_events`` counts (iteration, direction) pairs whose
    per-direction step changed the order of the projected samples.
    """

    iterations: int = 0
    max_changes: list[float] = field(default_factory=list)
    converged: bool = False
    threshold: float = 0.0
    distance_initial: float | None = None
    distance_final: float | None = None
    reorder_events: int = 0
    directions_per_iteration: int = 1

    def to_dict(self) -> dict:
        return asdict(self)
