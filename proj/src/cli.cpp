#include "sld/cli.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "sld/sde.hpp"
#include "sld/transport.hpp"

namespace sld::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Schema helpers
// ---------------------------------------------------------------------------

[[noreturn]] void schema_fail(const std::string& msg) { throw SchemaError("schema: " + msg); }

const json& member(const json& j, const std::string& key) {
  if (!j.is_object() || !j.contains(key)) schema_fail("missing field '" + key + "'");
  return j.at(key);
}

double num(const json& j, const std::string& key) {
  const json& v = member(j, key);
  if (v.is_string() && v.get<std::string>() == "inf") return kInf;
  if (!v.is_number()) schema_fail("field '" + key + "' must be a number");
  return v.get<double>();
}

double num_or(const json& j, const std::string& key, double dflt) {
  if (!j.is_object() || !j.contains(key)) return dflt;
  return num(j, key);
}

std::string str(const json& j, const std::string& key) {
  const json& v = member(j, key);
  if (!v.is_string()) schema_fail("field '" + key + "' must be a string");
  return v.get<std::string>();
}

std::string str_or(const json& j, const std::string& key, const std::string& dflt) {
  if (!j.is_object() || !j.contains(key)) return dflt;
  return str(j, key);
}

bool flag_or(const json& j, const std::string& key, bool dflt) {
  if (!j.is_object() || !j.contains(key)) return dflt;
  const json& v = j.at(key);
  if (!v.is_boolean()) schema_fail("field '" + key + "' must be a boolean");
  return v.get<bool>();
}

std::vector<double> num_list(const json& j, const std::string& key) {
  const json& v = member(j, key);
  if (!v.is_array()) schema_fail("field '" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (e.is_string() && e.get<std::string>() == "inf") {
      out.push_back(kInf);  // same spelling the scalar fields accept
      continue;
    }
    if (!e.is_number()) schema_fail("field '" + key + "' must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<double> num_list_or(const json& j, const std::string& key,
                                std::vector<double> dflt) {
  if (!j.is_object() || !j.contains(key)) return dflt;
  return num_list(j, key);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

json finite_or_str(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(const fs::path& path) : out_(path) {
    require(out_.good(), "cannot open output file " + path.string());
  }
  void raw(const std::string& line) { out_ << line << "\n"; }
  void row(const std::vector<double>& vals) {
    for (size_t i = 0; i < vals.size(); ++i) out_ << (i ? "," : "") << g17(vals[i]);
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  require(out.good(), "cannot open output file " + path.string());
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace

uint64_t config_hash(const json& config) {
  const std::string dump = config.dump();
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

json check_result_to_json(const verify::CheckResult& r) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = r.name;
  j["rule"] = verify::to_string(r.rule);
  j["empirical"] = finite_or_str(r.empirical);
  j["bound"] = finite_or_str(r.bound);
  j["stderr"] = r.stderr_value;
  j["k"] = r.k;
  j["passed"] = r.passed;
  j["margin_sigmas"] = finite_or_str(r.margin_sigmas);
  j["necessary_condition_only"] = r.necessary_condition_only;
  j["provenance"] = r.provenance;
  json series = json::array();
  for (const auto& row : r.series) series.push_back({row[0], row[1], row[2], row[3]});
  j["series"] = series;
  return j;
}

json certificate_to_json(const constants::InequalityCertificate& c) {
  json inputs = json::object();
  for (const auto& [k, v] : c.inputs) inputs[k] = finite_or_str(v);
  return json{{"kind", constants::to_string(c.kind)},
              {"constant", finite_or_str(c.constant)},
              {"T", finite_or_str(c.T)},
              {"inputs", inputs},
              {"convention", constants::to_string(c.convention)},
              {"paper_anchor", c.anchor}};
}

// ---------------------------------------------------------------------------
// Config-driven constructors
// ---------------------------------------------------------------------------

model::PotentialSpec build_potential(const json& j) {
  const std::string family = str(j, "family");
  const int d = static_cast<int>(num_or(j, "d", 1));
  if (d < 1) schema_fail("potential dimension must be >= 1");
  std::map<std::string, double> params;
  if (j.contains("params")) {
    const json& p = j.at("params");
    if (!p.is_object()) schema_fail("'params' must be an object");
    for (const auto& [k, v] : p.items()) {
      if (!v.is_number()) schema_fail("parameter '" + k + "' must be a number");
      params[k] = v.get<double>();
    }
  }
  std::vector<std::pair<std::vector<int>, double>> poly;
  if (j.contains("poly")) {
    const json& p = j.at("poly");
    if (!p.is_array()) schema_fail("'poly' must be an array of {powers, coeff} terms");
    for (const auto& term : p) {
      std::vector<int> powers;
      for (const auto& e : member(term, "powers")) {
        if (!e.is_number_integer() || e.get<int>() < 0)
          schema_fail("'powers' entries must be non-negative integers");
        powers.push_back(e.get<int>());
      }
      if (static_cast<int>(powers.size()) != d)
        schema_fail("each 'powers' multi-index must have length d");
      poly.emplace_back(std::move(powers), num(term, "coeff"));
    }
  }
  try {
    return model::make_potential(family, d, params, poly);
  } catch (const SldError& e) {
    schema_fail(e.what());
  }
}

model::DiffusionSpec build_spec(const json& j) {
  const std::string family = str(j, "family");
  if (family == "brownian") {
    const int d = static_cast<int>(num_or(j, "d", 1));
    if (d < 1) schema_fail("spec dimension must be >= 1");
    return model::brownian(d);
  }
  if (family == "kinetic") return model::builtin_kinetic(build_potential(member(j, "V")));
  model::DiffusionSpec spec = model::langevin(build_potential(j));
  if (j.contains("K")) spec.meta.K = num(j, "K");
  if (j.contains("M")) spec.meta.M = num(j, "M");
  return spec;
}

namespace {

sde::IntegratorConfig build_integrator(const json& cfg, uint64_t seed, int workers) {
  const json& j = cfg.contains("integrator") ? cfg.at("integrator") : json::object();
  sde::IntegratorConfig c;
  c.h = num_or(j, "h", 1e-3);
  c.T = num_or(j, "T", 1.0);
  c.n_paths = static_cast<size_t>(num_or(j, "n_paths", 1000));
  c.merge_threshold = num_or(j, "merge_threshold", -1.0);
  c.seed = seed;
  c.workers = workers;
  try {
    c.validate();
  } catch (const SldError& e) {
    schema_fail(e.what());
  }
  return c;
}

sde::InitSampler build_init(const json& j, int d) {
  const std::string type = str_or(j, "type", "dirac");
  if (type == "dirac") {
    auto pt = num_list_or(j, "point", std::vector<double>(d, 0.0));
    if (static_cast<int>(pt.size()) != d) schema_fail("'point' must have length d");
    return sde::dirac(pt);
  }
  if (type == "gaussian") {
    auto mean = num_list_or(j, "mean", std::vector<double>(d, 0.0));
    if (static_cast<int>(mean.size()) != d) schema_fail("'mean' must have length d");
    return sde::gaussian_init(mean, num_or(j, "sd", 1.0));
  }
  schema_fail("unknown init type '" + type + "' (expected dirac | gaussian)");
}

verify::TestFunction find_function(const json& check, int d) {
  const std::string name = str_or(check, "function", "lin_x1");
  if (name == "exp_tilt") return verify::exp_tilt(num_or(check, "a", 1.0));
  if (name == "constant") return verify::constant_fn(num_or(check, "value", 1.0));
  for (auto& f : verify::test_library(d))
    if (f.name == name) return f;
  schema_fail("unknown test function '" + name + "'");
}

std::vector<double> point_arg(const json& j, const std::string& key, int d) {
  auto v = num_list(j, key);
  if (static_cast<int>(v.size()) != d)
    schema_fail("'" + key + "' must be a point of dimension " + std::to_string(d));
  return v;
}

// Cheap pre-flight: integrate a few paths over the full horizon and compare
// the blown fraction against the configured attrition threshold. Checks keep
// their internal batches, so this is the blow-up policy for `check` configs.
void attrition_probe(const model::DiffusionSpec& spec, const sde::InitSampler& init,
                     const sde::IntegratorConfig& cfg, double threshold) {
  sde::IntegratorConfig probe = cfg;
  probe.n_paths = std::min<size_t>(cfg.n_paths, 64);
  probe.workers = 1;
  const auto batch = sde::simulate(spec, init, probe, {probe.T});
  const double frac =
      static_cast<double>(batch.blown_count()) / static_cast<double>(probe.n_paths);
  if (frac > threshold)
    throw BlowupError("blow-up: " + std::to_string(batch.blown_count()) + "/" +
                      std::to_string(probe.n_paths) +
                      " probe paths exceeded the divergence sentinel (attrition threshold " +
                      g17(threshold) + ")");
}

// ---------------------------------------------------------------------------
// Sweep formula registry
// ---------------------------------------------------------------------------

struct FormulaDef {
  std::vector<std::string> args;
  std::map<std::string, double> defaults;
  std::function<double(const std::map<std::string, double>&)> eval;
};

const std::map<std::string, FormulaDef>& formula_registry() {
  static const std::map<std::string, FormulaDef> reg = [] {
    std::map<std::string, FormulaDef> r;
    r["superconvex_Kbeta"] = {
        {"beta", "d"},
        {{"d", 1.0}},
        [](const std::map<std::string, double>& a) {
          return constants::superconvex_Kbeta(a.at("beta"), static_cast<int>(a.at("d")));
        }};
    r["poincare_flow"] = {{"K", "M", "T", "C0"},
                          {{"M", 1.0}, {"C0", 0.0}},
                          [](const std::map<std::string, double>& a) {
                            return constants::poincare_flow(a.at("K"), a.at("M"), a.at("T"),
                                                           a.at("C0"));
                          }};
    r["logsobolev_flow"] = {{"K", "T", "C0"},
                           {{"C0", 0.0}},
                           [](const std::map<std::string, double>& a) {
                             return constants::logsobolev_flow(a.at("K"), a.at("T"), a.at("C0"));
                           }};
    r["t2_constant"] = {{"K", "T"},
                        {},
                        [](const std::map<std::string, double>& a) {
                          return constants::t2_constant(a.at("K"), a.at("T"));
                        }};
    r["beckner_constant"] = {{"m", "M", "K", "t"},
                             {{"M", 1.0}},
                             [](const std::map<std::string, double>& a) {
                               return constants::beckner_constant(a.at("m"), a.at("M"),
                                                                 a.at("K"), a.at("t"));
                             }};
    r["mckean_rate"] = {{"K_V", "K_W"},
                        {},
                        [](const std::map<std::string, double>& a) {
                          return constants::mckean_rate(a.at("K_V"), a.at("K_W"));
                        }};
    r["prekopa_curvature"] = {{"K", "lambda"},
                              {},
                              [](const std::map<std::string, double>& a) {
                                return constants::prekopa_curvature(a.at("K"), a.at("lambda"));
                              }};
    // Reflection-coupling rate for the convex-plus-bounded-perturbation
    // profile kappa(r) = K - M/r (rate-vs-M sweeps reproduce the closed-form
    // bound's shape).
    r["eberle_lambda_perturbed"] = {
        {"K", "M"},
        {},
        [](const std::map<std::string, double>& a) {
          const double K = a.at("K"), M = a.at("M");
          auto kappa = [K, M](double rr) { return K - M / std::max(rr, 1e-12); };
          return constants::eberle_rate(kappa).lambda;
        }};
    r["perturbation_cp_bound"] = {{"K", "M"},
                                  {},
                                  [](const std::map<std::string, double>& a) {
                                    return constants::perturbation_cp_bound(a.at("K"),
                                                                            a.at("M"));
                                  }};
    return r;
  }();
  return reg;
}

// ---------------------------------------------------------------------------
// Experiment executors (each appends files + summary lines, returns exit code)
// ---------------------------------------------------------------------------

struct ExecContext {
  const json& cfg;
  fs::path out;
  uint64_t seed = 0;
  int workers = 1;
  double attrition = 0.0;
  std::vector<std::string> files;
  std::ostringstream summary;
};

void emit_records(ExecContext& ctx, const json& records) {
  write_json(ctx.out / "records.json", records);
  ctx.files.push_back("records.json");
}

void summarize_check(ExecContext& ctx, const verify::CheckResult& r) {
  char line[256];
  std::snprintf(line, sizeof(line),
                "[%s] %-24s empirical=%-13.6g bound=%-13.6g stderr=%-10.4g margin=%+.2f sigma",
                r.passed ? "PASS" : "FAIL", r.name.c_str(), r.empirical, r.bound,
                r.stderr_value, std::clamp(r.margin_sigmas, -999.0, 999.0));
  ctx.summary << line << "\n";
}

int exec_simulate(ExecContext& ctx) {
  const auto spec = build_spec(member(ctx.cfg, "spec"));
  const auto integ = build_integrator(ctx.cfg, ctx.seed, ctx.workers);
  const auto init = build_init(ctx.cfg.contains("init") ? ctx.cfg.at("init") : json::object(),
                               spec.d);
  const auto observe = num_list_or(ctx.cfg, "observe", {integ.T});

  const auto batch = sde::simulate(spec, init, integ, observe);
  const double frac =
      static_cast<double>(batch.blown_count()) / static_cast<double>(integ.n_paths);
  if (frac > ctx.attrition)
    throw BlowupError("blow-up: " + std::to_string(batch.blown_count()) + "/" +
                      std::to_string(integ.n_paths) + " paths exceeded the divergence sentinel");

  CsvWriter csv(ctx.out / "series.csv");
  csv.raw("# sldlab-batch-csv v" + std::string(kSchemaVersion));
  csv.raw("# spec=" + spec.name + " d=" + std::to_string(batch.d) +
          " n_paths=" + std::to_string(integ.n_paths) + " h=" + g17(integ.h) +
          " seed=" + std::to_string(ctx.seed));
  std::string header = "obs_index,t,path,blown";
  for (int c = 0; c < batch.d; ++c) header += ",x" + std::to_string(c);
  csv.raw(header);
  for (size_t k = 0; k < batch.grid.snapped.size(); ++k)
    for (size_t i = 0; i < integ.n_paths; ++i) {
      std::vector<double> row{static_cast<double>(k), batch.grid.snapped[k],
                              static_cast<double>(i), batch.blown[i] ? 1.0 : 0.0};
      for (int c = 0; c < batch.d; ++c) row.push_back(batch.data[k][i * batch.d + c]);
      csv.row(row);
    }
  ctx.files.push_back("series.csv");

  emit_records(ctx, json{{"schema_version", kSchemaVersion},
                         {"kind", "simulate"},
                         {"spec", spec.name},
                         {"n_paths", integ.n_paths},
                         {"blown", batch.blown_count()},
                         {"observe", batch.grid.snapped}});
  char line[160];
  std::snprintf(line, sizeof(line), "[ OK ] simulate %-20s n=%zu blown=%zu observations=%zu",
                spec.name.c_str(), integ.n_paths, batch.blown_count(),
                batch.grid.snapped.size());
  ctx.summary << line << "\n";
  return kExitPass;
}

int exec_couple(ExecContext& ctx) {
  const auto spec = build_spec(member(ctx.cfg, "spec"));
  const json& cj = member(ctx.cfg, "coupling");
  const auto integ = build_integrator(ctx.cfg, ctx.seed, ctx.workers);
  const auto x = point_arg(cj, "x", spec.d);
  const auto y = point_arg(cj, "y", spec.d);
  const auto observe = num_list_or(ctx.cfg, "observe", {integ.T});
  const std::string scheme = str_or(cj, "scheme", "synchronous");

  sde::CoupledBatch batch;
  if (scheme == "synchronous")
    batch = sde::couple_synchronous(spec, x, y, integ, observe);
  else if (scheme == "reflection")
    batch = sde::couple_reflection(spec, x, y, integ, observe);
  else if (scheme == "reflection_general")
    batch = sde::couple_reflection_general(spec, x, y, integ, observe);
  else if (scheme == "independent")
    batch = sde::couple_independent(spec, x, y, integ, observe);
  else
    schema_fail("unknown coupling scheme '" + scheme + "'");

  size_t blown = 0;
  for (bool b : batch.blown) blown += b ? 1 : 0;
  const double frac = static_cast<double>(blown) / static_cast<double>(integ.n_paths);
  if (frac > ctx.attrition)
    throw BlowupError("blow-up: " + std::to_string(blown) + "/" +
                      std::to_string(integ.n_paths) + " pairs exceeded the divergence sentinel");

  CsvWriter csv(ctx.out / "coupling.csv");
  csv.raw("# sldlab-coupling-csv v" + std::string(kSchemaVersion));
  csv.raw("t,mean_distance,coupled_fraction,blown_fraction");
  double final_mean = 0.0, final_coupled = 0.0;
  for (size_t k = 0; k < batch.grid.snapped.size(); ++k) {
    double sum = 0.0;
    size_t coupled = 0;
    for (size_t i = 0; i < integ.n_paths; ++i) {
      double d2 = 0.0;
      for (int c = 0; c < batch.d; ++c) {
        const double dd = batch.X[k][i * batch.d + c] - batch.Y[k][i * batch.d + c];
        d2 += dd * dd;
      }
      sum += std::sqrt(d2);
      if (batch.coupling_time[i] <= batch.grid.snapped[k]) ++coupled;
    }
    final_mean = sum / integ.n_paths;
    final_coupled = static_cast<double>(coupled) / integ.n_paths;
    csv.row({batch.grid.snapped[k], final_mean, final_coupled, frac});
  }
  ctx.files.push_back("coupling.csv");

  emit_records(ctx, json{{"schema_version", kSchemaVersion},
                         {"kind", "couple"},
                         {"spec", spec.name},
                         {"scheme", scheme},
                         {"merge_threshold", batch.merge_threshold},
                         {"n_pairs", integ.n_paths},
                         {"blown", blown},
                         {"final_mean_distance", final_mean},
                         {"final_coupled_fraction", final_coupled},
                         {"positivity_ok", batch.positivity_ok}});
  char line[200];
  std::snprintf(line, sizeof(line),
                "[ OK ] couple %-12s %-16s mean|X-Y|=%-11.5g coupled=%.1f%%", scheme.c_str(),
                spec.name.c_str(), final_mean, 100.0 * final_coupled);
  ctx.summary << line << "\n";
  return kExitPass;
}

int exec_constants_table(ExecContext& ctx) {
  const json& grid = member(ctx.cfg, "grid");
  const auto Ks = num_list(grid, "K");
  const auto Ms = num_list_or(grid, "M", {1.0});
  const auto Ts = num_list(grid, "T");
  const double C0 = num_or(ctx.cfg, "C0", 0.0);
  if (Ks.empty() || Ms.empty() || Ts.empty()) schema_fail("constants-table grid is empty");

  CsvWriter csv(ctx.out / "constants.csv");
  csv.raw("# sldlab-constants-csv v" + std::string(kSchemaVersion));
  csv.raw("K,M,T,C0,poincare_flow,logsobolev_flow,t2_constant");
  json certs = json::array();
  for (double K : Ks)
    for (double M : Ms)
      for (double T : Ts) {
        if (!std::isfinite(T) && K <= 0.0)
          schema_fail("T = inf in the constants grid requires K > 0");
        const double cp = constants::poincare_flow(K, M, T, C0);
        const double cls = constants::logsobolev_flow(K, T, C0);
        const double ct2 = constants::t2_constant(K, T);
        csv.row({K, M, T, C0, cp, cls, ct2});
        auto mk = [&](constants::IneqKind kind, double value, const char* anchor) {
          constants::InequalityCertificate c;
          c.kind = kind;
          c.constant = value;
          c.T = T;
          c.inputs = {{"K", K}, {"M", M}, {"C0", C0}};
          c.convention = constants::Convention::Standard;
          c.anchor = anchor;
          certs.push_back(certificate_to_json(c));
        };
        mk(constants::IneqKind::Poincare, cp, "flow:poincare");
        mk(constants::IneqKind::LogSobolev, cls, "flow:logsobolev");
        mk(constants::IneqKind::T2, ct2, "marginal:t2");
      }
  ctx.files.push_back("constants.csv");
  write_json(ctx.out / "certificates.json", certs);
  ctx.files.push_back("certificates.json");
  emit_records(ctx, json{{"schema_version", kSchemaVersion},
                         {"kind", "constants-table"},
                         {"rows", Ks.size() * Ms.size() * Ts.size()}});
  ctx.summary << "[ OK ] constants-table rows=" << Ks.size() * Ms.size() * Ts.size() << "\n";
  return kExitPass;
}

int exec_check(ExecContext& ctx) {
  const json& check = member(ctx.cfg, "check");
  const std::string op = str(check, "op");
  const auto times = num_list_or(check, "times", {1.0});

  verify::CheckResult res;
  if (op == "t2") {
    res = verify::check_t2(num(check, "K"), num(check, "T"),
                           num_list_or(check, "tilts", {0.1, 1.0, 3.0}));
  } else if (op == "convolution") {
    const std::string kind = str_or(check, "kind", "poincare");
    if (kind != "poincare" && kind != "logsobolev")
      schema_fail("convolution kind must be poincare | logsobolev");
    res = verify::check_convolution(kind == "poincare" ? constants::IneqKind::Poincare
                                                       : constants::IneqKind::LogSobolev,
                                    num(check, "var1"), num(check, "var2"),
                                    num(check, "lambda"));
  } else if (op == "mckean_contraction") {
    auto mv = model::builtin_mckean(build_potential(member(check, "V")),
                                    build_potential(member(check, "W")));
    if (check.contains("K_V")) mv.meta.K_V = num(check, "K_V");
    if (check.contains("K_W")) mv.meta.K_W = num(check, "K_W");
    const auto integ = build_integrator(ctx.cfg, ctx.seed, ctx.workers);
    const auto init1 = build_init(member(check, "init1"), mv.d);
    const auto init2 = build_init(member(check, "init2"), mv.d);
    res = verify::check_mckean_contraction(mv, init1, init2, times, integ,
                                           flag_or(check, "matched_means_V0", false));
  } else {
    const auto spec = build_spec(member(ctx.cfg, "spec"));
    const auto integ = build_integrator(ctx.cfg, ctx.seed, ctx.workers);
    if (op == "w_contraction" || op == "eberle_w1" || op == "coupling_time_exact" ||
        op == "coupling_time_tail") {
      const auto x = point_arg(check, "x", spec.d);
      const auto y = point_arg(check, "y", spec.d);
      attrition_probe(spec, sde::dirac(x), integ, ctx.attrition);
      attrition_probe(spec, sde::dirac(y), integ, ctx.attrition);
      if (op == "w_contraction") {
        res = verify::check_w_contraction(spec, x, y, times, num_or(check, "p", 2.0), integ);
      } else if (op == "eberle_w1") {
        std::vector<double> radii = num_list_or(check, "radii", {});
        if (radii.empty())
          for (int i = 0; i <= 40; ++i)
            radii.push_back(1e-2 * std::pow(1e4, i / 40.0));  // 1e-2 .. 1e2
        model::SamplingPlan plan;
        plan.seed = ctx.seed;
        const auto report = model::kappa_profile(spec, radii, plan);
        const auto rate = constants::eberle_rate_profile(report.kappa_profile);
        if (rate.no_rate) schema_fail("eberle_w1: profile has no positive rate");
        res = verify::check_eberle_w1(spec, x, y, times, rate, integ);
      } else if (op == "coupling_time_exact") {
        res = verify::check_coupling_time_exact(spec, x, y, times, integ);
      } else {
        std::optional<double> lam;
        if (check.contains("ou_lambda")) lam = num(check, "ou_lambda");
        res = verify::check_coupling_time_tail(spec, x, y, times, integ, lam);
      }
    } else if (op == "gradient_commutation") {
      const auto x = point_arg(check, "x", spec.d);
      attrition_probe(spec, sde::dirac(x), integ, ctx.attrition);
      const std::string form = str_or(check, "form", "squared");
      verify::CommutationForm cf;
      if (form == "strong")
        cf = verify::CommutationForm::Strong;
      else if (form == "squared")
        cf = verify::CommutationForm::Squared;
      else if (form == "interpolated")
        cf = verify::CommutationForm::Interpolated;
      else
        schema_fail("unknown commutation form '" + form + "'");
      res = verify::check_gradient_commutation(spec, find_function(check, spec.d), x,
                                               num(check, "t"), cf, integ,
                                               num_or(check, "m", 2.0));
    } else if (op == "poincare" || op == "logsobolev") {
      const auto init =
          build_init(check.contains("init") ? check.at("init") : json::object(), spec.d);
      attrition_probe(spec, init, integ, ctx.attrition);
      const auto batch = sde::simulate(spec, init, integ, {integ.T});
      sde::ParticleCloud cloud;
      cloud.d = spec.d;
      cloud.t = integ.T;
      cloud.pts = batch.data[0];
      const double C = num(check, "C");
      res = op == "poincare"
                ? verify::check_poincare(cloud, verify::test_library(spec.d), C, ctx.seed)
                : verify::check_logsobolev(cloud, verify::test_library(spec.d), C, ctx.seed);
    } else if (op == "variance_decay") {
      attrition_probe(spec, sde::dirac(std::vector<double>(spec.d, 0.0)), integ,
                      ctx.attrition);
      res = verify::check_variance_decay(spec, find_function(check, spec.d), times, integ);
    } else if (op == "entropy_decay") {
      attrition_probe(spec, sde::dirac(std::vector<double>(spec.d, 0.0)), integ,
                      ctx.attrition);
      res = verify::check_entropy_decay(spec, find_function(check, spec.d), times, integ,
                                        static_cast<size_t>(num_or(check, "inner_paths", 96)));
    } else {
      schema_fail("unknown check op '" + op + "'");
    }
  }

  emit_records(ctx, json::array({check_result_to_json(res)}));
  CsvWriter csv(ctx.out / "series.csv");
  csv.raw("# sldlab-series-csv v" + std::string(kSchemaVersion));
  csv.raw("t,empirical,bound,stderr");
  for (const auto& row : res.series) csv.row({row[0], row[1], row[2], row[3]});
  ctx.files.push_back("series.csv");
  summarize_check(ctx, res);
  return res.passed ? kExitPass : kExitCheckFailed;
}

int exec_sweep(ExecContext& ctx) {
  const json& sw = member(ctx.cfg, "sweep");
  const json& pj = member(sw, "param");
  if (!pj.is_string())
    schema_fail("sweep requires exactly one swept parameter (a single name)");
  const std::string param = pj.get<std::string>();
  const std::string formula = str(sw, "formula");
  const auto grid = num_list(sw, "grid");
  if (grid.empty()) schema_fail("sweep grid is empty");

  const auto& reg = formula_registry();
  const auto it = reg.find(formula);
  if (it == reg.end()) schema_fail("unknown sweep formula '" + formula + "'");
  const FormulaDef& def = it->second;
  if (std::find(def.args.begin(), def.args.end(), param) == def.args.end())
    schema_fail("formula '" + formula + "' has no parameter '" + param + "'");

  std::map<std::string, double> args = def.defaults;
  if (sw.contains("fixed")) {
    const json& fx = sw.at("fixed");
    if (!fx.is_object()) schema_fail("'fixed' must be an object");
    for (const auto& [k, v] : fx.items()) {
      if (std::find(def.args.begin(), def.args.end(), k) == def.args.end())
        schema_fail("formula '" + formula + "' has no parameter '" + k + "'");
      args[k] = v.is_string() && v.get<std::string>() == "inf" ? kInf : v.get<double>();
    }
  }
  for (const auto& a : def.args)
    if (a != param && !args.count(a))
      schema_fail("sweep is missing fixed value for parameter '" + a + "'");

  CsvWriter csv(ctx.out / "sweep.csv");
  csv.raw("# sldlab-sweep-csv v" + std::string(kSchemaVersion));
  csv.raw(param + "," + formula);
  json records = json::array();
  for (double g : grid) {
    args[param] = g;
    const double value = def.eval(args);
    csv.row({g, value});
    records.push_back({{"schema_version", kSchemaVersion},
                       {"formula", formula},
                       {"param", param},
                       {"value", g},
                       {"result", finite_or_str(value)}});
  }
  ctx.files.push_back("sweep.csv");
  emit_records(ctx, records);
  ctx.summary << "[ OK ] sweep " << formula << " over " << param << " (" << grid.size()
              << " points)\n";
  return kExitPass;
}

}  // namespace

RunResult run_config(json config, const std::string& out_dir) {
  if (!config.is_object()) schema_fail("config root must be an object");
  const std::string kind = str(config, "kind");
  const bool needs_seed = kind == "simulate" || kind == "couple" || kind == "check";
  if (needs_seed && !config.contains("seed"))
    schema_fail("'" + kind + "' configs require an explicit seed (no wall-clock seeding)");

  ExecContext ctx{config, fs::path(out_dir)};
  ctx.seed = static_cast<uint64_t>(num_or(config, "seed", 0.0));
  ctx.workers = std::max(1, static_cast<int>(num_or(config, "workers", 1.0)));
  ctx.attrition = num_or(config, "attrition_threshold", 0.0);
  if (ctx.attrition < 0.0 || ctx.attrition > 1.0)
    schema_fail("attrition_threshold must lie in [0, 1]");

  fs::create_directories(ctx.out);

  int code;
  if (kind == "simulate")
    code = exec_simulate(ctx);
  else if (kind == "couple")
    code = exec_couple(ctx);
  else if (kind == "constants-table")
    code = exec_constants_table(ctx);
  else if (kind == "check")
    code = exec_check(ctx);
  else if (kind == "sweep")
    code = exec_sweep(ctx);
  else
    schema_fail("unknown experiment kind '" + kind +
                "' (expected simulate | couple | constants-table | check | sweep)");

  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016" PRIx64, config_hash(config));
  json manifest{{"schema_version", kSchemaVersion},
                {"tool", {{"name", kToolName}, {"version", kToolVersion}}},
                {"config_hash", hash},
                {"seed", ctx.seed},
                {"workers", ctx.workers},
                {"config", config},
                {"outputs", ctx.files}};
  write_json(ctx.out / "manifest.json", manifest);
  ctx.files.push_back("manifest.json");

  std::string summary = ctx.summary.str();
  write_text(ctx.out / "summary.txt", summary);
  ctx.files.push_back("summary.txt");

  RunResult rr;
  rr.exit_code = code;
  rr.files = ctx.files;
  rr.summary = std::move(summary);
  return rr;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"sldlab: simulation and verification laboratory for semi log-concave "
               "Markov diffusions"};
  app.require_subcommand(0, 1);

  std::string config_path, out_override;
  std::optional<uint64_t> seed_override;
  std::optional<int> workers_override;
  uint64_t seed_raw = 0;
  int workers_raw = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--seed", seed_raw, "override the config seed");
    sub->add_option("--workers", workers_raw, "override the worker count");
    sub->add_option("--out", out_override, "output directory");
  };
  CLI::App* run_cmd = app.add_subcommand("run", "execute one experiment config");
  add_common(run_cmd);
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "execute a sweep config");
  add_common(sweep_cmd);
  CLI::App* list_cmd =
      app.add_subcommand("list-families", "list the built-in model families");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitPass : kExitSchema;
  }

  if (list_cmd->parsed()) {
    std::printf("potential families (Langevin diffusions):\n");
    for (const auto& f : model::potential_family_names()) std::printf("  %s\n", f.c_str());
    std::printf("diffusion families:\n  brownian\n  kinetic (nested V potential)\n");
    std::printf("interacting families:\n  mckean (V confinement + even W interaction)\n");
    std::printf("sweep formulas:\n");
    for (const auto& [name, def] : formula_registry()) {
      std::printf("  %s(", name.c_str());
      for (size_t i = 0; i < def.args.size(); ++i)
        std::printf("%s%s", i ? ", " : "", def.args[i].c_str());
      std::printf(")\n");
    }
    return kExitPass;
  }
  if (!run_cmd->parsed() && !sweep_cmd->parsed()) {
    std::fprintf(stderr, "%s\n", app.help().c_str());
    return kExitSchema;
  }
  CLI::App* active = run_cmd->parsed() ? run_cmd : sweep_cmd;
  if (active->count("--seed") > 0) seed_override = seed_raw;
  if (active->count("--workers") > 0) workers_override = workers_raw;

  json config;
  {
    std::ifstream in(config_path);
    if (!in.good()) {
      std::fprintf(stderr, "schema error: cannot read config file %s\n", config_path.c_str());
      return kExitSchema;
    }
    try {
      config = json::parse(in);
    } catch (const json::parse_error& e) {
      std::fprintf(stderr, "schema error: %s\n", e.what());
      return kExitSchema;
    }
  }

  try {
    if (!config.is_object()) schema_fail("config root must be an object");
    if (sweep_cmd->parsed() && str_or(config, "kind", "sweep") != "sweep")
      schema_fail("the sweep subcommand requires a config with kind = sweep");
    if (seed_override) config["seed"] = *seed_override;
    if (workers_override) config["workers"] = *workers_override;

    std::string out_dir = out_override;
    if (out_dir.empty()) out_dir = str_or(config, "out", "");
    if (out_dir.empty()) {
      const char* env = std::getenv(kOutEnvVar);
      out_dir = env && *env ? env : kOutFallback;
    }
    config.erase("out");  // location is not part of the experiment identity

    const RunResult rr = run_config(config, out_dir);
    std::fputs(rr.summary.c_str(), stdout);
    std::printf("results written to %s\n", out_dir.c_str());
    return rr.exit_code;
  } catch (const SchemaError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitSchema;
  } catch (const BlowupError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return kExitBlowup;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "schema error: %s\n", e.what());
    return kExitSchema;
  }
}

}  // namespace sld::cli
