# SPDX-FileCopyrightText: Copyright (c) 2024 NVIDIA CORPORATION & AFFILIATES. All rights reserved.
# SPDX-License-Identifier: Apache-2.0
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

import dataclasses
import logging
import os
import pathlib
import sys
import warnings

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from sheaftree.error import ValidationError

logger = logging.getLogger("sheaftree")


def configure_logging():
    logging.basicConfig()
    log_level = os.getenv("SHEAFTREE_LOGLEVEL", "INFO").upper()
    try:
        logger.setLevel(log_level)
    except ValueError:
        warnings.warn(f"Bad user supplied log level: {log_level}; falling back to INFO")
        log_level = "INFO"
        logger.setLevel(log_level)
    return log_level


@dataclasses.dataclass(frozen=True)
class Settings:
    field: str = "Q"
    seed: int = 0
    count: int = 100
    max_vertices: int = 8
    max_stalk_dim: int = 3
    pretty: bool = False
    failure_dir: str = "."
    # ±1/0 combinations of up to this many hom-space basis elements
    iso_sweep_terms: int = 3
    # over F_p, enumerate the whole hom space when its dimension is at most this
    iso_enumeration_exponent: int = 4
    # and when it has at most this many elements
    iso_enumeration_limit: int = 10_000
    norton_attempts: int = 24

    def replace(self, **overrides):
        """Return a copy with every override that is not None applied."""
        return dataclasses.replace(
            self, **{k: v for k, v in overrides.items() if v is not None}
        )


SETTING_NAMES = {f.name for f in dataclasses.fields(Settings)}


def _settings_from_table(table, base):
    known = {}
    for key, value in table.items():
        if isinstance(value, dict):
            # per-command sub-table, applied by load_settings
            continue
        name = key.replace("-", "_")
        if name not in SETTING_NAMES:
            warnings.warn(f"Unknown [tool.sheaftree] key {key!r} ignored")
            continue
        known[name] = value
    return base.replace(**known)


def config_path(src_dir=None):
    override = os.environ.get("SHEAFTREE_CONFIG", None)
    if override:
        return pathlib.Path(override)
    return pathlib.Path(src_dir or os.getcwd()) / "pyproject.toml"


def get_config_table(path):
    """Return the [tool.sheaftree] table of ``path``, or an empty dict when absent."""
    if not path.exists():
        return {}
    with open(path, "rb") as f:
        try:
            toml_dict = tomllib.load(f)
        except tomllib.TOMLDecodeError as e:
            raise ValidationError("ConfigError", f"Cannot parse {path}: {e}") from None
    table = toml_dict.get("tool", {}).get("sheaftree", {})
    if not isinstance(table, dict):
        raise ValidationError("ConfigError", f"[tool.sheaftree] in {path} must be a table")
    return table


def load_settings(src_dir=None, command=None):
    """Defaults, overridden by [tool.sheaftree], overridden by its per-command sub-table."""
    path = config_path(src_dir)
    table = get_config_table(path)
    settings = _settings_from_table(table, Settings())
    if command is not None:
        extra = table.get(command, None)
        if extra:
            if not isinstance(extra, dict):
                raise ValidationError(
                    "ConfigError", f"[tool.sheaftree.{command}] must be a table"
                )
            settings = _settings_from_table(extra, settings)
    logger.debug("Loaded settings from %s: %s", path, settings)
    return settings
