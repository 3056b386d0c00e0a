# Copyright 2026 The cmgames Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Solvers and exploitability certification for convex Markov games."""

try:
    from ._cmgames import *  # noqa: F401,F403
    from . import _cmgames as _impl
except ImportError:  # in-tree builds put the extension on PYTHONPATH directly
    from _cmgames import *  # noqa: F401,F403
    import _cmgames as _impl

__all__ = [name for name in dir(_impl) if not name.startswith("_")]
__version__ = "0.1.0"
