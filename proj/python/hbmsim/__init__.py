# Copyright 2026 The hbmsim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""Python front end of the hbmsim transaction-level HBM simulator.

Profiles are builtin names, paths to profile JSON files or dicts. Workload
specs and reports use the same field names as the JSON configs.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any, Mapping, Union

_DATA = Path(__file__).resolve().parent / "data"
if (_DATA / "paper_reference.json").is_file():
    os.environ.setdefault("HBMSIM_DATA_DIR", str(_DATA))

from . import _core  # noqa: E402
from ._core import ConfigError, __version__  # noqa: E402

ProfileRef = Union[str, os.PathLike, Mapping[str, Any]]

__all__ = [
    "ConfigError",
    "__version__",
    "calibrate",
    "csv_columns",
    "list_profiles",
    "profile",
    "reproduce",
    "run",
    "run_config",
    "tables",
]


def _profile_arg(p: ProfileRef) -> str:
    if isinstance(p, Mapping):
        return json.dumps(dict(p))
    return os.fspath(p)


def list_profiles() -> list[str]:
    """Names of the builtin platform profiles."""
    return list(_core.builtin_profile_names())


def profile(ref: ProfileRef) -> dict:
    """Fully resolved profile as a dict."""
    return json.loads(_core.profile_json(_profile_arg(ref)))


def run(spec: Mapping[str, Any], profile: ProfileRef = "u280") -> dict:
    """Simulates one workload and returns its report."""
    return json.loads(_core.run_workload_json(_profile_arg(profile), json.dumps(dict(spec))))


def run_config(path: Union[str, os.PathLike], parallelism: int = 0) -> list[dict]:
    """Runs every expanded workload of an experiment config file."""
    return json.loads(_core.run_config_json(os.fspath(path), parallelism))["runs"]


def reproduce(table: str, mib_per_pc: float = 4.0, parallelism: int = 1, reference: str = "") -> dict:
    """Simulated cells of a reference table next to the measured values."""
    return json.loads(_core.reproduce_json(table, mib_per_pc, parallelism, reference))


def calibrate(profile: ProfileRef = "u280", mib_per_pc: float = 4.0) -> dict:
    """Analytic model parameters extracted from simulated microbenchmarks."""
    return json.loads(_core.calibrate_json(_profile_arg(profile), mib_per_pc))


def tables() -> list[str]:
    return list(_core.table_ids())


def csv_columns() -> list[str]:
    return list(_core.csv_columns())
