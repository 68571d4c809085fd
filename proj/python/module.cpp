// Python bindings for the main operations: flow constants, curvature
// certification, simulation/coupling, transport distances, checks, and the
// config runner.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sld/cli.hpp"
#include "sld/constants.hpp"
#include "sld/model.hpp"
#include "sld/sde.hpp"
#include "sld/transport.hpp"
#include "sld/verify.hpp"

namespace py = pybind11;
using namespace sld;

namespace {

using Params = std::map<std::string, double>;

model::PotentialSpec make_pot(const std::string& family, int d, const Params& params) {
  return model::make_potential(family, d, params);
}

sde::IntegratorConfig make_cfg(double h, double T, size_t n_paths, uint64_t seed, int workers) {
  sde::IntegratorConfig cfg;
  cfg.h = h;
  cfg.T = T;
  cfg.n_paths = n_paths;
  cfg.seed = seed;
  cfg.workers = workers;
  return cfg;
}

py::dict result_to_dict(const verify::CheckResult& r) {
  py::dict out;
  out["name"] = r.name;
  out["rule"] = std::string(verify::to_string(r.rule));
  out["empirical"] = r.empirical;
  out["bound"] = r.bound;
  out["stderr"] = r.stderr_value;
  out["k"] = r.k;
  out["passed"] = r.passed;
  out["margin_sigmas"] = r.margin_sigmas;
  out["necessary_condition_only"] = r.necessary_condition_only;
  out["provenance"] = r.provenance;
  py::list series;
  for (const auto& row : r.series) {
    series.append(py::make_tuple(row[0], row[1], row[2], row[3]));
  }
  out["series"] = series;
  return out;
}

sde::CoupledBatch run_coupling(const model::DiffusionSpec& spec, const std::string& scheme,
                               const std::vector<double>& x, const std::vector<double>& y,
                               const sde::IntegratorConfig& cfg,
                               const std::vector<double>& observe) {
  if (scheme == "synchronous") return sde::couple_synchronous(spec, x, y, cfg, observe);
  if (scheme == "reflection") return sde::couple_reflection(spec, x, y, cfg, observe);
  if (scheme == "reflection_general")
    return sde::couple_reflection_general(spec, x, y, cfg, observe);
  if (scheme == "independent") return sde::couple_independent(spec, x, y, cfg, observe);
  throw SldError("unknown coupling scheme: " + scheme);
}

}  // namespace

PYBIND11_MODULE(sldlab, m) {
  m.doc() = "Simulation-and-verification laboratory for semi log-concave diffusions";
  m.attr("__version__") = cli::kToolVersion;
  m.attr("inf") = kInf;

  // ---- constants ---------------------------------------------------------
  m.def("poincare_flow", &constants::poincare_flow, py::arg("K"), py::arg("M"), py::arg("T"),
        py::arg("C0") = 0.0, "Spectral-gap constant transported along the flow.");
  m.def("logsobolev_flow", &constants::logsobolev_flow, py::arg("K"), py::arg("T"),
        py::arg("C0") = 0.0);
  m.def("t2_constant", &constants::t2_constant, py::arg("K"), py::arg("T"));
  m.def("beckner_constant", &constants::beckner_constant, py::arg("m"), py::arg("M"),
        py::arg("K"), py::arg("t"));
  m.def("superconvex_Kbeta", &constants::superconvex_Kbeta, py::arg("beta"), py::arg("d"));
  m.def(
      "eberle_rate",
      [](const std::vector<std::pair<double, double>>& profile) {
        const auto r = constants::eberle_rate_profile(profile);
        py::dict out;
        out["R0"] = r.R0;
        out["R1"] = r.R1;
        out["phi_min"] = r.phi_min;
        out["lambda"] = r.lambda;
        out["prefactor"] = r.prefactor;
        out["general"] = r.general;
        out["no_rate"] = r.no_rate;
        return out;
      },
      py::arg("profile"),
      "Coupling decay rate from a sampled curvature profile [(r, kappa(r)), ...].");

  // ---- model -------------------------------------------------------------
  m.def("potential_families", &model::potential_family_names);
  m.def(
      "semiconvexity",
      [](const std::string& family, int d, const Params& params, long pairs, uint64_t seed) {
        const auto spec = model::langevin(make_pot(family, d, params));
        model::SamplingPlan plan;
        plan.pairs = pairs;
        plan.seed = seed;
        const auto r = model::semiconvexity_K(spec, plan);
        py::dict out;
        out["K"] = r.K;
        out["mode"] = r.mode == model::CertificationMode::Analytic ? "analytic" : "sampled";
        out["diverged"] = r.diverged;
        return out;
      },
      py::arg("family"), py::arg("d"), py::arg("params") = Params{}, py::arg("pairs") = 100000,
      py::arg("seed") = 0);
  m.def(
      "certify_superconvex",
      [](const std::string& family, int d, const Params& params, double beta, double K,
         long pairs, uint64_t seed) {
        model::SamplingPlan plan;
        plan.pairs = pairs;
        plan.seed = seed;
        const auto cert = model::certify_Hphi(make_pot(family, d, params), beta, K, plan);
        py::dict out;
        out["holds"] = cert.holds;
        out["min_ratio"] = cert.min_ratio;
        out["violations"] = cert.violations;
        return out;
      },
      py::arg("family"), py::arg("d"), py::arg("params"), py::arg("beta"), py::arg("K"),
      py::arg("pairs") = 200000, py::arg("seed") = 0);

  // ---- simulation --------------------------------------------------------
  m.def(
      "simulate",
      [](const std::string& family, int d, const Params& params, const std::vector<double>& x0,
         double h, double T, size_t n_paths, uint64_t seed, const std::vector<double>& observe,
         int workers) {
        const auto spec = model::langevin(make_pot(family, d, params));
        const auto cfg = make_cfg(h, T, n_paths, seed, workers);
        const auto batch = sde::simulate(spec, sde::dirac(x0), cfg, observe);
        py::dict out;
        out["d"] = batch.d;
        out["times"] = batch.grid.snapped;
        out["data"] = batch.data;
        out["blown"] = std::vector<int>(batch.blown.begin(), batch.blown.end());
        return out;
      },
      py::arg("family"), py::arg("d"), py::arg("params"), py::arg("x0"), py::arg("h") = 1e-3,
      py::arg("T") = 1.0, py::arg("n_paths") = 1000, py::arg("seed") = 0,
      py::arg("observe") = std::vector<double>{}, py::arg("workers") = 1,
      "Euler-Maruyama batch for the Langevin diffusion of a named potential; "
      "empty observe defaults to the horizon.");
  m.def(
      "couple",
      [](const std::string& family, int d, const Params& params, const std::string& scheme,
         const std::vector<double>& x, const std::vector<double>& y, double h, double T,
         size_t n_paths, uint64_t seed, const std::vector<double>& observe, int workers) {
        const auto spec = model::langevin(make_pot(family, d, params));
        const auto cfg = make_cfg(h, T, n_paths, seed, workers);
        std::vector<double> obs = observe.empty() ? std::vector<double>{T} : observe;
        const auto out = run_coupling(spec, scheme, x, y, cfg, obs);
        py::dict res;
        res["times"] = out.grid.snapped;
        std::vector<double> mean_dist, coupled_frac;
        for (size_t k = 0; k < out.grid.snapped.size(); ++k) {
          double acc = 0.0;
          size_t coupled = 0;
          for (size_t i = 0; i < out.n_pairs(); ++i) {
            double s = 0.0;
            for (int c = 0; c < out.d; ++c) {
              const double dx = out.X[k][i * out.d + c] - out.Y[k][i * out.d + c];
              s += dx * dx;
            }
            acc += std::sqrt(s);
            if (out.coupling_time[i] <= out.grid.snapped[k]) ++coupled;
          }
          mean_dist.push_back(acc / static_cast<double>(out.n_pairs()));
          coupled_frac.push_back(static_cast<double>(coupled) /
                                 static_cast<double>(out.n_pairs()));
        }
        res["mean_distance"] = mean_dist;
        res["coupled_fraction"] = coupled_frac;
        res["merge_threshold"] = out.merge_threshold;
        res["positivity_ok"] = out.positivity_ok;
        return res;
      },
      py::arg("family"), py::arg("d"), py::arg("params"), py::arg("scheme"), py::arg("x"),
      py::arg("y"), py::arg("h") = 1e-3, py::arg("T") = 1.0, py::arg("n_paths") = 1000,
      py::arg("seed") = 0, py::arg("observe") = std::vector<double>{}, py::arg("workers") = 1);

  // ---- transport ---------------------------------------------------------
  m.def(
      "wasserstein",
      [](const std::vector<double>& a, const std::vector<double>& b, int d, double p,
         bool paper_half) {
        transport::Cloud A{d, a}, B{d, b};
        const auto conv = paper_half ? constants::Convention::PaperHalf
                                     : constants::Convention::Standard;
        return transport::wasserstein(A, B, p, conv).value;
      },
      py::arg("a"), py::arg("b"), py::arg("d") = 1, py::arg("p") = 2.0,
      py::arg("paper_half") = false,
      "Exact W_p between equal-size clouds (flattened n*d point lists).");

  // ---- checks ------------------------------------------------------------
  m.def(
      "check_w_contraction",
      [](const std::string& family, int d, const Params& params, const std::vector<double>& x,
         const std::vector<double>& y, const std::vector<double>& times, double p, double h,
         double T, size_t n_paths, uint64_t seed) {
        const auto spec = model::langevin(make_pot(family, d, params));
        const auto cfg = make_cfg(h, T, n_paths, seed, 1);
        return result_to_dict(verify::check_w_contraction(spec, x, y, times, p, cfg));
      },
      py::arg("family"), py::arg("d"), py::arg("params"), py::arg("x"), py::arg("y"),
      py::arg("times"), py::arg("p") = 2.0, py::arg("h") = 1e-3, py::arg("T") = 1.0,
      py::arg("n_paths") = 1000, py::arg("seed") = 0);
  m.def(
      "check_t2",
      [](double K, double T, const std::vector<double>& tilts) {
        return result_to_dict(verify::check_t2(K, T, tilts));
      },
      py::arg("K"), py::arg("T"), py::arg("tilts") = std::vector<double>{0.1, 1.0, 3.0});

  // ---- config runner -----------------------------------------------------
  m.def(
      "run_config",
      [](const std::string& json_text, const std::string& out_dir) {
        const auto config = nlohmann::json::parse(json_text);
        const auto r = cli::run_config(config, out_dir);
        py::dict out;
        out["exit_code"] = r.exit_code;
        out["files"] = r.files;
        out["summary"] = r.summary;
        return out;
      },
      py::arg("json_text"), py::arg("out_dir"),
      "Execute a JSON config (same schema as the CLI) and write artifacts to out_dir.");
}
