# Copyright 2026 The convlearn Authors. All Rights Reserved.
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

"""Learning a one-hidden-layer CNN with a shared filter."""

from ._core import (
    ArgumentError,
    ConfigError,
    DivergedError,
    NumericError,
    PatchConfig,
    UnsupportedError,
    default_config,
    double_convotron,
    eigen_scan,
    forward,
    jacobi_eigenvalues,
    l_reg,
    l_reg_grad,
    lambda_lower_bound,
    nonoverlap_filter,
    patch_matrix,
    run_experiment,
    run_seed,
    sample_inputs,
    verify,
    weighted_patch_gram,
)

__all__ = [
    "ArgumentError",
    "ConfigError",
    "DivergedError",
    "NumericError",
    "PatchConfig",
    "UnsupportedError",
    "default_config",
    "double_convotron",
    "eigen_scan",
    "forward",
    "jacobi_eigenvalues",
    "l_reg",
    "l_reg_grad",
    "lambda_lower_bound",
    "nonoverlap_filter",
    "patch_matrix",
    "run_experiment",
    "run_seed",
    "sample_inputs",
    "verify",
    "weighted_patch_gram",
]
