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

import os
import platform
import traceback
from importlib.metadata import PackageNotFoundError, version

BASE_DIR = os.path.abspath(os.path.dirname(__file__))
ERROR_TEMPLATE = os.path.join(BASE_DIR, "ERROR.txt")


class SheafTreeError(RuntimeError):
    """Base error. ``kind`` is the error name, ``ids`` the offending cells or elements."""

    exit_code = 1

    def __init__(self, kind, message, ids=()):
        super().__init__(f"{kind}: {message}")
        self.kind = kind
        self.message = message
        self.ids = tuple(ids)
        # assertion records made before the error, when raised mid-computation
        self.assertions = []

    def as_dict(self):
        return {
            "error": type(self).__name__,
            "kind": self.kind,
            "message": self.message,
            "ids": [str(i) for i in self.ids],
        }


class ValidationError(SheafTreeError):
    exit_code = 1


class FieldError(ValidationError):
    pass


class ScalarParseError(ValidationError):
    pass


class SchemaError(ValidationError):
    pass


class TreeError(ValidationError):
    pass


class SheafError(ValidationError):
    pass


class GroupError(ValidationError):
    pass


class ActionError(ValidationError):
    pass


class InfeasibleConstraint(ValidationError):
    pass


class HypothesisViolated(SheafTreeError):
    """H^0 is not irreducible; ``evidence`` holds a verified invariant subspace."""

    exit_code = 2

    def __init__(self, kind, message, evidence=None, ids=()):
        super().__init__(kind, message, ids)
        self.evidence = evidence


class CertificationFailed(SheafTreeError):
    exit_code = 3


class InternalAssertion(SheafTreeError):
    """A statement that holds for every valid input failed: this is a bug."""

    exit_code = 4


class DimensionMismatch(InternalAssertion):
    pass


class TheoremViolated(InternalAssertion):
    pass


class ConstructionMismatch(InternalAssertion):
    pass


class NotInvariant(InternalAssertion):
    pass


class EquivarianceBroken(InternalAssertion):
    pass


class PreconditionFailed(InternalAssertion):
    pass


def _package_version(name):
    try:
        return version(name)
    except PackageNotFoundError:
        return "not installed"


def report_internal_failure(command, digest, exception_context):
    """Render the bug report text for an internal assertion failure."""
    if exception_context is not None:
        traceback.print_tb(exception_context.__traceback__)
    python_info = f"{platform.python_implementation()} {platform.python_version()}"
    os_info = f"{platform.system()} {platform.release()}"
    stack_info = ", ".join(
        f"{name} {_package_version(name)}"
        for name in ("sheaftree", "sympy", "networkx", "pydantic")
    )
    with open(ERROR_TEMPLATE) as template:
        template_text = template.read()
    return template_text.format(
        command=command,
        digest=digest or "unavailable",
        failure=exception_context,
        python_info=python_info,
        os_info=os_info,
        stack_info=stack_info,
    )
