from __future__ import annotations

import os
from pathlib import Path

from backend.cbvf_solver import ValueFunction

from .value_function_data_gateway import ValueFunctionDataGateway
from .value_function_container import export_value_function, import_value_function

EXTENSION = ".cbvf"


class FileValueFunctionDataGateway(ValueFunctionDataGateway):
    """
    Gateway storing each value function as ``<run_id>.cbvf`` in one
    directory.
    """

    def __init__(self, directory: str | os.PathLike) -> None:
        self.directory = Path(directory)

    def path_for(self, run_id: str) -> Path:
        if not run_id or os.sep in run_id or (os.altsep and os.altsep in run_id):
            raise ValueError(f"Invalid run id {run_id!r}.")
        return self.directory / f"{run_id}{EXTENSION}"

    def insert(self, run_id: str, vf: ValueFunction, **kw) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        export_value_function(vf, self.path_for(run_id))

    def find(self, run_id: str, **kw) -> ValueFunction | None:
        """
        The stored value function, or None if there is none.

        :raise ContainerFormatError: if the stored file is malformed.
        """
        path = self.path_for(run_id)
        if not path.is_file():
            return None
        return import_value_function(path)

    def update(self, run_id: str, vf: ValueFunction, **kw) -> None:
        """Replace the stored value function of ``run_id``."""
        self.insert(run_id, vf, **kw)

    def delete(self, run_id: str, **kw) -> None:
        path = self.path_for(run_id)
        if path.is_file():
            path.unlink()


__all__ = [
    "EXTENSION",
    "FileValueFunctionDataGateway",
]
