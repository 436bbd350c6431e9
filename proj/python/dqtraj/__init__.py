# Copyright 2026 dqtraj contributors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Disordered quantum trajectories: random Kraus ensembles driven by an
ergodic shift, purification diagnostics, and gray/dark projection search."""

try:
    from ._dqtraj import *  # noqa: F401,F403
except ImportError:  # in-tree builds keep the extension next to the package
    from _dqtraj import *  # noqa: F401,F403

__version__ = "0.1.0"
