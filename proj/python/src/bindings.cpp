// Copyright 2026 The ProbDPP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "probdpp/analysis.hpp"
#include "probdpp/bandit.hpp"
#include "probdpp/errors.hpp"
#include "probdpp/experiment.hpp"
#include "probdpp/kernel.hpp"
#include "probdpp/objective.hpp"
#include "probdpp/oracle.hpp"

namespace py = pybind11;
using namespace probdpp;

namespace {

using Items = std::vector<std::size_t>;
using Bits = std::vector<std::uint8_t>;

GramMatrix as_gram(const Eigen::MatrixXd& g) { return GramMatrix(g); }

SelectionAction as_action(const Eigen::MatrixXd& g, const Items& items) {
  return SelectionAction(static_cast<std::size_t>(g.rows()), items);
}

py::object to_python(const nlohmann::ordered_json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

ExperimentConfig make_config(const std::map<std::string, std::string>& kv) {
  ExperimentConfig config;
  for (const auto& [key, value] : kv) config.set(key, value);
  config.validate();
  return config;
}

OracleMode parse_mode(const std::string& mode) {
  if (mode == "greedy") return OracleMode::kGreedy;
  if (mode == "exhaustive") return OracleMode::kExhaustive;
  throw InvalidArgument("oracle must be 'greedy' or 'exhaustive'");
}

}  // namespace

PYBIND11_MODULE(_probdpp, m) {
  m.doc() = "Reliability-aware DPP subset selection and KL-UCB bandits";

  static py::exception<Error> base(m, "ProbDPPError", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<SingularSubmatrix>(m, "SingularSubmatrix", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<EmptyInput>(m, "EmptyInput", base.ptr());
  py::register_exception<OutOfRange>(m, "OutOfRange", base.ptr());
  py::register_exception<TooLarge>(m, "TooLarge", base.ptr());
  py::register_exception<NeverPulled>(m, "NeverPulled", base.ptr());
  py::register_exception<DegenerateInstance>(m, "DegenerateInstance",
                                             base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  // kernel
  m.def("generate_features",
        [](std::size_t n, std::size_t d, std::uint64_t seed) {
          return generate_features(n, d, seed).data();
        },
        py::arg("n"), py::arg("d"), py::arg("seed"));
  m.def("build_gram",
        [](const Eigen::MatrixXd& features, double delta, bool normalize) {
          const FeatureMatrix f = normalize ? FeatureMatrix::normalized(features)
                                            : FeatureMatrix(features);
          return ridge(build_gram(f), delta).data();
        },
        py::arg("features"), py::arg("ridge") = 1e-8,
        py::arg("normalize") = false,
        "Ridged Gram matrix F F^T + ridge * I. Rows must be unit norm unless "
        "normalize is set.");
  m.def("log_det_subset",
        [](const Eigen::MatrixXd& g, const Items& items) {
          return log_det_subset(as_gram(g), as_action(g, items));
        },
        py::arg("gram"), py::arg("items"));

  // objective
  m.def("reliability_reward", &reliability_reward, py::arg("alpha"),
        py::arg("epsilon"));
  m.def("beta_epsilon", &beta_epsilon, py::arg("epsilon"));
  m.def("masked_logdet_naive",
        [](const Eigen::MatrixXd& g, const Items& items, const Bits& mask) {
          const MaskedLogDet v =
              masked_logdet_naive(as_gram(g), as_action(g, items), DropoutMask(mask));
          return v.is_neg_infinity() ? -std::numeric_limits<double>::infinity()
                                     : v.value();
        },
        py::arg("gram"), py::arg("items"), py::arg("mask"),
        "log det of the masked kernel; -inf when any selected item drops out.");
  m.def("regularized_masked_logdet",
        [](const Eigen::MatrixXd& g, const Items& items, const Bits& mask,
           double eps) {
          return regularized_masked_logdet(as_gram(g), as_action(g, items),
                                           DropoutMask(mask), Regularizer(eps));
        },
        py::arg("gram"), py::arg("items"), py::arg("mask"), py::arg("epsilon"));
  m.def("masked_logdet_identity",
        [](const Eigen::MatrixXd& g, const Items& items, const Bits& mask,
           double eps) {
          return masked_logdet_identity(as_gram(g), as_action(g, items),
                                        DropoutMask(mask), Regularizer(eps));
        },
        py::arg("gram"), py::arg("items"), py::arg("mask"), py::arg("epsilon"));
  m.def("expected_diversity",
        [](const Eigen::MatrixXd& g, const Items& items,
           const std::vector<double>& alphas, double eps) {
          return expected_diversity(as_gram(g), as_action(g, items),
                                    ReliabilityVector(alphas), Regularizer(eps));
        },
        py::arg("gram"), py::arg("items"), py::arg("alphas"), py::arg("epsilon"));
  m.def("monte_carlo_diversity",
        [](const Eigen::MatrixXd& g, const Items& items,
           const std::vector<double>& alphas, double eps, std::size_t samples,
           std::uint64_t seed) {
          const MonteCarloEstimate e = monte_carlo_diversity(
              as_gram(g), as_action(g, items), ReliabilityVector(alphas),
              Regularizer(eps), samples, seed);
          return py::make_tuple(e.mean, e.std_error);
        },
        py::arg("gram"), py::arg("items"), py::arg("alphas"), py::arg("epsilon"),
        py::arg("samples"), py::arg("seed"), "Returns (mean, std_error).");

  // oracle
  m.def("objective_value",
        [](const Eigen::MatrixXd& g, const Items& items,
           const std::vector<double>& thetas) {
          return objective_value(as_gram(g), as_action(g, items),
                                 LinearCoefficients(thetas));
        },
        py::arg("gram"), py::arg("items"), py::arg("thetas"));
  m.def("greedy_select",
        [](const Eigen::MatrixXd& g, const std::vector<double>& thetas,
           std::size_t k) {
          return greedy_select(as_gram(g), LinearCoefficients(thetas), k).items();
        },
        py::arg("gram"), py::arg("thetas"), py::arg("k"));
  m.def("exhaustive_select",
        [](const Eigen::MatrixXd& g, const std::vector<double>& thetas,
           std::size_t k) {
          return exhaustive_select(as_gram(g), LinearCoefficients(thetas), k)
              .items();
        },
        py::arg("gram"), py::arg("thetas"), py::arg("k"));

  // bandit
  m.def("binary_kl", &binary_kl, py::arg("p"), py::arg("q"));
  m.def("exploration_threshold", &exploration_threshold, py::arg("t"),
        py::arg("c"));
  m.def("klucb_upper",
        [](double mean, std::uint64_t pulls, double threshold, double tol,
           std::size_t max_iter) {
          return klucb_upper(mean, pulls, threshold, tol, max_iter);
        },
        py::arg("mean"), py::arg("pulls"), py::arg("threshold"),
        py::arg("tol") = 1e-9, py::arg("max_iter") = 100);
  m.def("run_horizon",
        [](const Eigen::MatrixXd& g, const std::vector<double>& alphas,
           std::size_t k, double eps, double c, const std::string& oracle,
           std::uint64_t horizon, std::uint64_t seed) {
          KLUCBConfig cfg;
          cfg.k = k;
          cfg.epsilon = eps;
          cfg.c = c;
          cfg.oracle = parse_mode(oracle);
          py::list out;
          for (const TraceStep& s : run_horizon(as_gram(g), cfg,
                                                ReliabilityVector(alphas),
                                                horizon, seed)) {
            out.append(py::make_tuple(s.t, s.action.items(), s.mask.bits()));
          }
          return out;
        },
        py::arg("gram"), py::arg("alphas"), py::arg("k"),
        py::arg("epsilon") = 0.1, py::arg("c") = 3.0,
        py::arg("oracle") = "greedy", py::arg("horizon"), py::arg("seed"),
        "List of (t, selected, mask) tuples.");

  // analysis
  m.def("best_action",
        [](const Eigen::MatrixXd& g, const std::vector<double>& alphas,
           double eps, std::size_t k) {
          const BestAction b =
              best_action(as_gram(g), ReliabilityVector(alphas), eps, k);
          return py::make_tuple(b.action.items(), b.value);
        },
        py::arg("gram"), py::arg("alphas"), py::arg("epsilon"), py::arg("k"),
        "Returns (items, value) of the best fixed action.");
  m.def("theorem_upper_bound",
        [](const Eigen::MatrixXd& g, const std::vector<double>& alphas,
           double eps, std::size_t k, double c, std::uint64_t horizon) {
          return theorem_upper_bound(as_gram(g), ReliabilityVector(alphas), eps,
                                     k, c, horizon);
        },
        py::arg("gram"), py::arg("alphas"), py::arg("epsilon"), py::arg("k"),
        py::arg("c"), py::arg("horizon"));
  m.def("lower_bound_constant",
        [](const std::vector<double>& alphas, double eps) {
          return lower_bound_constant(ReliabilityVector(alphas), eps);
        },
        py::arg("alphas"), py::arg("epsilon"));

  // experiment commands; config values arrive as strings
  m.def("_simulate",
        [](const std::map<std::string, std::string>& kv) {
          SimulationSummary s;
          {
            ExperimentConfig config = make_config(kv);
            py::gil_scoped_release release;
            s = cmd_simulate(std::move(config));
          }
          return to_python(s.json);
        },
        py::arg("config"));
  m.def("_verify",
        [](const std::map<std::string, std::string>& kv, bool corrupt) {
          const ExperimentConfig config = make_config(kv);
          std::vector<PropertyResult> results;
          {
            py::gil_scoped_release release;
            results = cmd_verify(config, VerifyOptions{corrupt});
          }
          py::list out;
          for (const PropertyResult& r : results) {
            py::dict d;
            d["name"] = r.name;
            d["passed"] = r.passed;
            d["stats"] = to_python(r.stats);
            out.append(d);
          }
          return out;
        },
        py::arg("config"), py::arg("corrupt_identity") = false);
  m.def("_select",
        [](const std::map<std::string, std::string>& kv) {
          return to_python(cmd_select(make_config(kv)));
        },
        py::arg("config"));
}
