#include "autoconv/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>

#include <fmt/format.h>

namespace autoconv {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(fmt::format("{}: {}", path, what));
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  const std::set<std::string> known(keys.begin(), keys.end());
  for (const auto& [k, _] : j.items())
    if (!known.count(k)) fail(join(path, k), "unknown key");
}

double get_number(const json& j, const std::string& path, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) fail(join(path, key), "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(join(path, key), "must be finite");
  return d;
}

long long get_integer(const json& j, const std::string& path, const char* key, long long fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number_integer()) fail(join(path, key), "expected an integer");
  return v.get<long long>();
}

std::string get_string(const json& j, const std::string& path, const char* key,
                       const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_string()) fail(join(path, key), "expected a string");
  return v.get<std::string>();
}

std::vector<double> get_number_array(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) return {};
  const json& v = j.at(key);
  const std::string p = join(path, key);
  if (!v.is_array()) fail(p, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) fail(fmt::format("{}[{}]", p, i), "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

// Runs a validate() call and re-throws its message under a field path.
template <typename F>
void validate_at(const std::string& path, F&& f) {
  try {
    f();
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

GridSettings parse_grid(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"q_min", "q_max", "N", "q_cw"});
  GridSettings g;
  g.q_min = get_number(j, path, "q_min", g.q_min);
  g.q_max = get_number(j, path, "q_max", g.q_max);
  const long long n = get_integer(j, path, "N", static_cast<long long>(g.n));
  if (n < 2) fail(join(path, "N"), "must be >= 2");
  g.n = static_cast<std::size_t>(n);
  g.q_cw = get_number(j, path, "q_cw", g.q_cw);
  validate_at(path, [&] { (void)g.make(); });
  return g;
}

PulseSpec parse_pulse(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path,
                 {"shape", "amplitude_max", "center", "width", "phase_half_width", "center1",
                  "center2", "width1", "width2", "second_peak_ratio", "phase_amplitude",
                  "phase_frequency"});
  PulseSpec p;
  const std::string shape = get_string(j, path, "shape", "case1");
  if (shape == "case1" || shape == "smooth_single_peak")
    p.shape = PulseShape::SmoothSinglePeak;
  else if (shape == "case2" || shape == "two_peak")
    p.shape = PulseShape::TwoPeakSinusoidalPhase;
  else
    fail(join(path, "shape"), "expected case1 | case2 | smooth_single_peak | two_peak");
  p.amplitude_max = get_number(j, path, "amplitude_max", p.amplitude_max);
  p.center = get_number(j, path, "center", p.center);
  p.width = get_number(j, path, "width", p.width);
  p.phase_half_width = get_number(j, path, "phase_half_width", p.phase_half_width);
  p.center1 = get_number(j, path, "center1", p.center1);
  p.center2 = get_number(j, path, "center2", p.center2);
  p.width1 = get_number(j, path, "width1", p.width1);
  p.width2 = get_number(j, path, "width2", p.width2);
  p.second_peak_ratio = get_number(j, path, "second_peak_ratio", p.second_peak_ratio);
  p.phase_amplitude = get_number(j, path, "phase_amplitude", p.phase_amplitude);
  p.phase_frequency = get_number(j, path, "phase_frequency", p.phase_frequency);
  validate_at(path, [&] { p.validate(); });
  return p;
}

NoiseSpec parse_noise(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"delta_percent", "seed"});
  NoiseSpec n;
  n.delta_percent = get_number(j, path, "delta_percent", n.delta_percent);
  if (n.delta_percent < 0.0) fail(join(path, "delta_percent"), "must be >= 0");
  const long long seed = get_integer(j, path, "seed", 0);
  if (seed < 0) fail(join(path, "seed"), "must be >= 0");
  n.seed = static_cast<std::uint64_t>(seed);
  return n;
}

FineFactor parse_fine_factor(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"num", "den"});
  FineFactor f;
  f.num = static_cast<int>(get_integer(j, path, "num", f.num));
  f.den = static_cast<int>(get_integer(j, path, "den", f.den));
  if (f.num <= 0 || f.den <= 0) fail(path, "num and den must be positive");
  return f;
}

SolverSettings parse_solver(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path,
                 {"alpha_grid", "alpha_hat_grid", "gamma", "max_iterations", "min_iterations",
                  "patience", "kernel_scale", "central_fraction"});
  SolverSettings s;
  s.lm.alpha_grid = get_number_array(j, path, "alpha_grid");
  s.alpha_hat_grid = get_number_array(j, path, "alpha_hat_grid");
  if (!s.lm.alpha_grid.empty() && !s.alpha_hat_grid.empty())
    fail(path, "give either alpha_grid or alpha_hat_grid, not both");
  s.lm.gamma = get_number(j, path, "gamma", s.lm.gamma);
  s.lm.max_iterations = static_cast<int>(get_integer(j, path, "max_iterations", s.lm.max_iterations));
  s.lm.min_iterations = static_cast<int>(get_integer(j, path, "min_iterations", s.lm.min_iterations));
  s.lm.patience = static_cast<int>(get_integer(j, path, "patience", s.lm.patience));
  if (j.contains("kernel_scale")) {
    s.kernel_scale = get_number(j, path, "kernel_scale", 0.0);
    if (!(*s.kernel_scale > 0.0)) fail(join(path, "kernel_scale"), "must be > 0");
  }
  s.central_fraction = get_number(j, path, "central_fraction", s.central_fraction);
  if (!(s.central_fraction > 0.0 && s.central_fraction <= 1.0))
    fail(join(path, "central_fraction"), "must lie in (0, 1]");
  for (std::size_t i = 0; i < s.alpha_hat_grid.size(); ++i)
    if (!(s.alpha_hat_grid[i] > 0.0) || (i > 0 && !(s.alpha_hat_grid[i] > s.alpha_hat_grid[i - 1])))
      fail(fmt::format("{}.alpha_hat_grid[{}]", path, i), "values must be positive and increasing");
  // Validate everything but the grid, which may still be pending.
  LMConfig probe = s.lm;
  if (probe.alpha_grid.empty()) probe.alpha_grid = {1.0};
  validate_at(path, [&] { probe.validate(); });
  return s;
}

DemoSettings parse_demo(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"r", "betas", "N", "x0", "kernel"});
  DemoSettings d;
  d.r = get_number(j, path, "r", d.r);
  if (!(d.r > 0.0)) fail(join(path, "r"), "must be > 0");
  if (j.contains("betas")) d.betas = get_number_array(j, path, "betas");
  if (d.betas.empty()) fail(join(path, "betas"), "must not be empty");
  for (std::size_t i = 0; i < d.betas.size(); ++i) {
    const double b = d.betas[i];
    if (!(b > 0.0 && b < 0.5) || (i > 0 && !(b > d.betas[i - 1])))
      fail(fmt::format("{}.betas[{}]", path, i), "betas must increase within (0, 1/2)");
  }
  const long long n = get_integer(j, path, "N", static_cast<long long>(d.n));
  if (n < 2) fail(join(path, "N"), "must be >= 2");
  d.n = static_cast<std::size_t>(n);
  d.x0 = get_string(j, path, "x0", d.x0);
  if (d.x0 != "zero" && d.x0 != "pulse") fail(join(path, "x0"), "expected zero | pulse");
  if (j.contains("kernel")) d.kernel = parse_kernel(j["kernel"], join(path, "kernel"));
  return d;
}

}  // namespace

PhysicalKernelParams reference_kernel_params() {
  PhysicalKernelParams p;
  p.magnitude_scale = 1e28;
  p.chi3 = {0.955, 0.296};
  p.mismatch_quadratic = 4e-29;
  p.interaction_length = 1.0;
  p.carrier_weight = 0.5e-16;
  p.transverse_phase = 0.4;
  return p;
}

std::vector<double> logspace(double lo_exp, double hi_exp, std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    out[i] = std::pow(10.0, lo_exp + t * (hi_exp - lo_exp));
  }
  return out;
}

std::vector<double> default_alpha_hat_grid() { return logspace(-2.0, 4.0, 10); }

LMConfig resolve_solver(const SolverSettings& s, double a_hat_max, double dq, double kernel_scale) {
  LMConfig c = s.lm;
  if (c.alpha_grid.empty()) {
    const auto hats = s.alpha_hat_grid.empty() ? default_alpha_hat_grid() : s.alpha_hat_grid;
    for (double h : hats) c.alpha_grid.push_back(denormalized_alpha(h, a_hat_max, dq, kernel_scale));
  }
  c.validate();
  return c;
}

Kernel parse_kernel(const json& j, const std::string& path) {
  require_object(j, path);
  const std::string variant = get_string(j, path, "variant", "physical");
  if (variant == "constant") {
    reject_unknown(j, path, {"variant", "re", "im"});
    return Kernel::constant({get_number(j, path, "re", 1.0), get_number(j, path, "im", 0.0)});
  }
  if (variant != "physical") fail(join(path, "variant"), "expected physical | constant");
  reject_unknown(j, path,
                 {"variant", "magnitude_scale", "chi3_re", "chi3_im", "mismatch_quadratic",
                  "interaction_length", "carrier_weight", "transverse_phase"});
  PhysicalKernelParams p = reference_kernel_params();
  p.magnitude_scale = get_number(j, path, "magnitude_scale", p.magnitude_scale);
  p.chi3 = {get_number(j, path, "chi3_re", p.chi3.real()),
            get_number(j, path, "chi3_im", p.chi3.imag())};
  p.mismatch_quadratic = get_number(j, path, "mismatch_quadratic", p.mismatch_quadratic);
  p.interaction_length = get_number(j, path, "interaction_length", p.interaction_length);
  p.carrier_weight = get_number(j, path, "carrier_weight", p.carrier_weight);
  p.transverse_phase = get_number(j, path, "transverse_phase", p.transverse_phase);
  validate_at(path, [&] { p.validate(); });
  return Kernel::physical(p);
}

LMConfig parse_lm_config(const json& j, const std::string& path) {
  SolverSettings s = parse_solver(j, path);
  if (s.lm.alpha_grid.empty()) fail(join(path, "alpha_grid"), "must not be empty");
  return s.lm;
}

RunConfig parse_run_config(const json& j) {
  require_object(j, "<root>");
  reject_unknown(j, "",
                 {"grid", "kernel", "pulse", "noise", "fine_factor", "solver", "demo", "output"});
  RunConfig c;
  c.kernel = Kernel::physical(reference_kernel_params());
  if (j.contains("grid")) c.grid = parse_grid(j["grid"], "grid");
  if (j.contains("kernel")) c.kernel = parse_kernel(j["kernel"], "kernel");
  if (j.contains("pulse")) c.pulse = parse_pulse(j["pulse"], "pulse");
  if (j.contains("noise")) c.noise = parse_noise(j["noise"], "noise");
  if (j.contains("fine_factor")) c.fine_factor = parse_fine_factor(j["fine_factor"], "fine_factor");
  if (j.contains("solver")) c.solver = parse_solver(j["solver"], "solver");
  if (j.contains("demo")) c.demo = parse_demo(j["demo"], "demo");
  if (j.contains("output")) {
    if (!j["output"].is_string()) fail("output", "expected a directory path string");
    c.output = j["output"].get<std::string>();
  }
  return c;
}

json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
    throw ConfigError(fmt::format("{}: line {}: {}", source, line, e.what()));
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open config");
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  try {
    return parse_run_config(parse_json_text(text, path.string()));
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path.string(), 0) == 0) throw;
    throw ConfigError(path.string() + ": " + msg);
  }
}

json to_json(const GridSettings& g) {
  return {{"q_min", g.q_min}, {"q_max", g.q_max}, {"N", g.n}, {"q_cw", g.q_cw}};
}

json to_json(const SampledGrid& g) {
  return {{"q_min", g.q_min()}, {"q_max", g.q_max()}, {"N", g.n()}, {"q_cw", g.q_cw()}};
}

json to_json(const Kernel& k) {
  if (k.is_constant()) {
    const cplx c = std::get<ConstantKernel>(k.variant()).value;
    return {{"variant", "constant"}, {"re", c.real()}, {"im", c.imag()}};
  }
  const auto& p = std::get<PhysicalKernelParams>(k.variant());
  return {{"variant", "physical"},
          {"magnitude_scale", p.magnitude_scale},
          {"chi3_re", p.chi3.real()},
          {"chi3_im", p.chi3.imag()},
          {"mismatch_quadratic", p.mismatch_quadratic},
          {"interaction_length", p.interaction_length},
          {"carrier_weight", p.carrier_weight},
          {"transverse_phase", p.transverse_phase}};
}

json to_json(const PulseSpec& p) {
  json j{{"amplitude_max", p.amplitude_max}};
  if (p.shape == PulseShape::SmoothSinglePeak) {
    j["shape"] = "case1";
    j["center"] = p.center;
    j["width"] = p.width;
    j["phase_half_width"] = p.phase_half_width;
  } else {
    j["shape"] = "case2";
    j["center1"] = p.center1;
    j["center2"] = p.center2;
    j["width1"] = p.width1;
    j["width2"] = p.width2;
    j["second_peak_ratio"] = p.second_peak_ratio;
    j["phase_amplitude"] = p.phase_amplitude;
    j["phase_frequency"] = p.phase_frequency;
  }
  return j;
}

json to_json(const NoiseSpec& n) { return {{"delta_percent", n.delta_percent}, {"seed", n.seed}}; }

json to_json(const LMConfig& c) {
  return {{"alpha_grid", c.alpha_grid},
          {"gamma", c.gamma},
          {"max_iterations", c.max_iterations},
          {"min_iterations", c.min_iterations},
          {"patience", c.patience}};
}

json to_json(const SolverSettings& s) {
  json j = to_json(s.lm);
  if (s.lm.alpha_grid.empty()) {
    j.erase("alpha_grid");
    j["alpha_hat_grid"] = s.alpha_hat_grid.empty() ? default_alpha_hat_grid() : s.alpha_hat_grid;
  }
  if (s.kernel_scale) j["kernel_scale"] = *s.kernel_scale;
  j["central_fraction"] = s.central_fraction;
  return j;
}

json to_json(const DemoSettings& d) {
  return {{"r", d.r}, {"betas", d.betas}, {"N", d.n}, {"x0", d.x0}, {"kernel", to_json(d.kernel)}};
}

json to_json(const RunConfig& c) {
  return {{"grid", to_json(c.grid)},
          {"kernel", to_json(c.kernel)},
          {"pulse", to_json(c.pulse)},
          {"noise", to_json(c.noise)},
          {"fine_factor", {{"num", c.fine_factor.num}, {"den", c.fine_factor.den}}},
          {"solver", to_json(c.solver)},
          {"demo", to_json(c.demo)},
          {"output", c.output.string()}};
}

}  // namespace autoconv
