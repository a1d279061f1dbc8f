from abc import ABC

from backend.cbvf_solver import ValueFunction


class ValueFunctionDataGateway(ABC):
    """Interface for value-function data gateway, keyed by run id."""
    def insert(self, run_id: str, vf: ValueFunction, **kw) -> None:
        raise NotImplementedError

    def find(self, run_id: str, **kw) -> ValueFunction | None:
        raise NotImplementedError

    def update(self, run_id: str, vf: ValueFunction, **kw) -> None:
        raise NotImplementedError

    def delete(self, run_id: str, **kw) -> None:
        raise NotImplementedError


__all__ = [
    "ValueFunctionDataGateway",
]
