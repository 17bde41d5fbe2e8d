# Copyright 2026 The ProbDPP Authors.
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

"""Reliability-aware DPP subset selection with KL-UCB exploration."""

from probdpp._probdpp import (
    ConfigError,
    DegenerateInstance,
    EmptyInput,
    InvalidArgument,
    NeverPulled,
    OutOfRange,
    ParseError,
    ProbDPPError,
    SingularSubmatrix,
    TooLarge,
    best_action,
    beta_epsilon,
    binary_kl,
    build_gram,
    exhaustive_select,
    expected_diversity,
    exploration_threshold,
    generate_features,
    greedy_select,
    klucb_upper,
    log_det_subset,
    lower_bound_constant,
    masked_logdet_identity,
    masked_logdet_naive,
    monte_carlo_diversity,
    objective_value,
    regularized_masked_logdet,
    reliability_reward,
    run_horizon,
    theorem_upper_bound,
)
from probdpp import _probdpp

__version__ = "0.1.0"


def _stringify(config):
    out = {}
    for key, value in config.items():
        if isinstance(value, bool):
            out[key] = "true" if value else "false"
        elif isinstance(value, float):
            out[key] = repr(value)
        elif isinstance(value, (list, tuple)):
            out[key] = ",".join(repr(float(v)) for v in value)
        else:
            out[key] = str(value)
    return out


def simulate(**config):
    """Run the bandit experiment and return the summary as a dict.

    Keys are the same as in a config file. Nothing is written to disk
    unless output_path is given.
    """
    config.setdefault("output_path", "")
    return _probdpp._simulate(_stringify(config))


def verify(corrupt_identity=False, **config):
    return _probdpp._verify(_stringify(config), corrupt_identity)


def select(**config):
    return _probdpp._select(_stringify(config))
