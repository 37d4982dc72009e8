#include "fodof/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "fodof/errors.hpp"

namespace fodof {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(std::string_view field, const std::string& what) {
  throw Error(Errc::kParseError, "field '" + std::string(field) + "': " + what);
}

[[noreturn]] void invalid(const std::string& what) { throw Error(Errc::kValidationError, what); }

const json* find(const json& obj, std::string_view key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_number(const json& j, std::string_view field) {
  if (!j.is_number()) parse_fail(field, "expected a number");
  return j.get<double>();
}

int get_int(const json& j, std::string_view field) {
  if (!j.is_number_integer()) parse_fail(field, "expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    parse_fail(field, "integer out of range");
  }
  return static_cast<int>(v);
}

std::uint64_t get_seed(const json& j, std::string_view field) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    parse_fail(field, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

const json& require(const json& obj, std::string_view key) {
  const json* v = find(obj, key);
  if (!v) parse_fail(key, "missing");
  return *v;
}

Vector vector_from_json(const json& j, std::string_view field) {
  if (!j.is_array()) parse_fail(field, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = get_number(j[i], field);
  return v;
}

json vector_to_json(const std::vector<double>& v) { return json(v); }

std::vector<double> doubles_from_json(const json& j, std::string_view field) {
  const Vector v = vector_from_json(j, field);
  return {v.data(), v.data() + v.size()};
}

// Non-finite margins are stored as null.
json real_to_json(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }
double real_from_json(const json& j, std::string_view field) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : get_number(j, field);
}

void check_finite(const Matrix& m, std::string_view field) {
  if (!m.allFinite()) invalid(std::string(field) + " has non-finite entries");
}

void validate(const ProblemConfig& cfg) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 2.0)) invalid("alpha must lie in (0, 2)");
  const Eigen::Index n = cfg.a_lower.rows();
  if (n == 0 || cfg.a_lower.cols() != n) invalid("a_lower must be square and non-empty");
  if (cfg.a_upper.rows() != n || cfg.a_upper.cols() != n) invalid("a_upper shape differs from a_lower");
  if (cfg.b_lower.rows() != n || cfg.b_lower.cols() == 0) invalid("b_lower must have n rows");
  if (cfg.b_upper.rows() != n || cfg.b_upper.cols() != cfg.b_lower.cols()) {
    invalid("b_upper shape differs from b_lower");
  }
  if (cfg.c.cols() != n || cfg.c.rows() == 0) invalid("c must have n columns");
  for (const auto* m : {&cfg.a_lower, &cfg.a_upper, &cfg.b_lower, &cfg.b_upper, &cfg.c}) check_finite(*m, "matrix");
  auto bounds = [](const Matrix& lo, const Matrix& hi, const char* name) {
    for (Eigen::Index i = 0; i < lo.rows(); ++i) {
      for (Eigen::Index j = 0; j < lo.cols(); ++j) {
        if (lo(i, j) > hi(i, j)) {
          invalid("interval bound: " + std::string(name) + "_lower(" + std::to_string(i + 1) + "," +
                  std::to_string(j + 1) + ") > " + name + "_upper");
        }
      }
    }
  };
  bounds(cfg.a_lower, cfg.a_upper, "a");
  bounds(cfg.b_lower, cfg.b_upper, "b");
  if (cfg.n_c < 0) invalid("n_c must be >= 0");
  if (!(cfg.solver.eps_margin > 0.0)) invalid("solver.eps_margin must be positive");
  if (!(cfg.solver.tol > 0.0)) invalid("solver.tol must be positive");
  if (cfg.solver.max_iter < 1) invalid("solver.max_iter must be >= 1");
  if (!(cfg.solver.box > 0.0)) invalid("solver.box must be positive");
  if (cfg.certify.sample_count < 0) invalid("certify.sample_count must be >= 0");
  if (cfg.simulate) {
    const SimulateConfig& s = *cfg.simulate;
    if (!(s.h > 0.0) || !std::isfinite(s.h)) invalid("simulate.h must be positive");
    if (!(s.t_end >= s.h) || !std::isfinite(s.t_end)) invalid("simulate.t_end must be >= h");
    if (s.x0.size() < n) invalid("simulate.x0 needs at least n entries");
    if (!s.x0.allFinite()) invalid("simulate.x0 has non-finite entries");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kParseError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(std::string_view text, std::string_view origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t pos = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n');
    throw Error(Errc::kParseError, std::string(origin) + ":" + std::to_string(line) + ": " + e.what());
  }
}

}  // namespace

UncertainFoltiSystem ProblemConfig::system() const {
  return UncertainFoltiSystem(alpha, IntervalMatrix(a_lower, a_upper), IntervalMatrix(b_lower, b_upper), c);
}

std::filesystem::path resolve_input_path(const std::filesystem::path& p) {
  if (std::filesystem::exists(p) || p.has_extension()) return p;
  std::filesystem::path with_ext = p;
  with_ext += ".json";
  return std::filesystem::exists(with_ext) ? with_ext : p;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, std::string_view field) {
  if (j.is_number()) return Matrix::Constant(1, 1, j.get<double>());
  if (!j.is_array()) parse_fail(field, "expected a nested array");
  if (j.empty()) return Matrix(0, 0);
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (!j[0].is_array()) parse_fail(field, "rows must be arrays");
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) parse_fail(field, "row " + std::to_string(r + 1) + " is ragged");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = get_number(j[r][c], field);
    }
  }
  return m;
}

ProblemConfig parse_config_text(std::string_view text, std::string_view origin) {
  const json j = parse_json(text, origin);
  if (!j.is_object()) parse_fail("<root>", "expected an object");

  ProblemConfig cfg;
  cfg.alpha = get_number(require(j, "alpha"), "alpha");
  cfg.a_lower = matrix_from_json(require(j, "a_lower"), "a_lower");
  cfg.a_upper = matrix_from_json(require(j, "a_upper"), "a_upper");
  cfg.b_lower = matrix_from_json(require(j, "b_lower"), "b_lower");
  cfg.b_upper = matrix_from_json(require(j, "b_upper"), "b_upper");
  cfg.c = matrix_from_json(require(j, "c"), "c");
  if (const json* v = find(j, "n_c")) cfg.n_c = get_int(*v, "n_c");

  if (const json* s = find(j, "solver")) {
    if (!s->is_object()) parse_fail("solver", "expected an object");
    if (const json* v = find(*s, "eps_margin")) cfg.solver.eps_margin = get_number(*v, "solver.eps_margin");
    if (const json* v = find(*s, "tol")) cfg.solver.tol = get_number(*v, "solver.tol");
    if (const json* v = find(*s, "max_iter")) cfg.solver.max_iter = get_int(*v, "solver.max_iter");
    if (const json* v = find(*s, "seed")) cfg.solver.seed = get_seed(*v, "solver.seed");
    if (const json* v = find(*s, "box")) cfg.solver.box = get_number(*v, "solver.box");
  }
  if (const json* s = find(j, "certify")) {
    if (!s->is_object()) parse_fail("certify", "expected an object");
    if (const json* v = find(*s, "sample_count")) cfg.certify.sample_count = get_int(*v, "certify.sample_count");
    if (const json* v = find(*s, "seed")) cfg.certify.seed = get_seed(*v, "certify.seed");
  }
  if (const json* s = find(j, "simulate")) {
    if (!s->is_object()) parse_fail("simulate", "expected an object");
    SimulateConfig sim;
    sim.x0 = vector_from_json(require(*s, "x0"), "simulate.x0");
    if (const json* v = find(*s, "t_end")) sim.t_end = get_number(*v, "simulate.t_end");
    if (const json* v = find(*s, "h")) sim.h = get_number(*v, "simulate.h");
    cfg.simulate = sim;
  }
  cfg.certify.nominal_solver = cfg.solver;
  validate(cfg);
  return cfg;
}

ProblemConfig parse_config(const std::filesystem::path& path) {
  const std::filesystem::path p = resolve_input_path(path);
  return parse_config_text(read_file(p), p.string());
}

json config_to_json(const ProblemConfig& cfg) {
  json j;
  j["alpha"] = cfg.alpha;
  j["a_lower"] = matrix_to_json(cfg.a_lower);
  j["a_upper"] = matrix_to_json(cfg.a_upper);
  j["b_lower"] = matrix_to_json(cfg.b_lower);
  j["b_upper"] = matrix_to_json(cfg.b_upper);
  j["c"] = matrix_to_json(cfg.c);
  j["n_c"] = cfg.n_c;
  j["solver"] = {{"eps_margin", cfg.solver.eps_margin},
                 {"tol", cfg.solver.tol},
                 {"max_iter", cfg.solver.max_iter},
                 {"seed", cfg.solver.seed},
                 {"box", cfg.solver.box}};
  j["certify"] = {{"sample_count", cfg.certify.sample_count}, {"seed", cfg.certify.seed}};
  if (cfg.simulate) {
    const Vector& x0 = cfg.simulate->x0;
    j["simulate"] = {{"x0", std::vector<double>(x0.data(), x0.data() + x0.size())},
                     {"t_end", cfg.simulate->t_end},
                     {"h", cfg.simulate->h}};
  }
  return j;
}

json controller_to_json(const DynamicController& k) {
  return {{"n_c", k.n_c},
          {"a_c", matrix_to_json(k.a_c)},
          {"b_c", matrix_to_json(k.b_c)},
          {"c_c", matrix_to_json(k.c_c)},
          {"d_c", matrix_to_json(k.d_c)}};
}

DynamicController controller_from_json(const json& j) {
  if (!j.is_object()) parse_fail("controller", "expected an object");
  DynamicController k;
  k.n_c = get_int(require(j, "n_c"), "n_c");
  if (k.n_c < 0) invalid("n_c must be >= 0");
  k.d_c = matrix_from_json(require(j, "d_c"), "d_c");
  const Eigen::Index l = k.d_c.rows(), m = k.d_c.cols();
  auto block = [&](const char* key, Eigen::Index r, Eigen::Index c) {
    const json* v = find(j, key);
    Matrix out = v ? matrix_from_json(*v, key) : Matrix(0, 0);
    // [] carries no shape; an empty block takes the shape implied by n_c and d_c.
    if (out.size() == 0) {
      if (r * c != 0) parse_fail(key, "required when n_c > 0");
      out.resize(r, c);
    }
    return out;
  };
  k.a_c = block("a_c", k.n_c, k.n_c);
  k.b_c = block("b_c", k.n_c, m);
  k.c_c = block("c_c", l, k.n_c);
  k.validate(static_cast<int>(l), static_cast<int>(m));
  return k;
}

DynamicController load_controller(const std::filesystem::path& path) {
  const std::filesystem::path p = resolve_input_path(path);
  const json j = parse_json(read_file(p), p.string());
  if (const json* syn = find(j, "synthesis"); syn && syn->is_object()) {
    return controller_from_json(require(*syn, "controller"));
  }
  return controller_from_json(j);
}

json report_to_json(const RunReport& r) {
  json j;
  j["command"] = r.command;
  j["status"] = r.status;
  j["exit_code"] = r.exit_code;
  j["message"] = r.message;
  j["config"] = r.config;
  if (r.synthesis) {
    const SynthesisSummary& s = *r.synthesis;
    j["synthesis"] = {{"controller", controller_to_json(s.controller)},
                      {"eta", s.eta},
                      {"solver_status", s.solver_status},
                      {"regime", s.regime},
                      {"robust", s.robust},
                      {"iterations", s.iterations},
                      {"achieved_margin", real_to_json(s.achieved_margin)},
                      {"eps_margin", s.eps_margin},
                      {"attempts", s.attempts},
                      {"q_s_condition", real_to_json(s.q_s_condition)},
                      {"q_c_condition", real_to_json(s.q_c_condition)}};
  }
  if (r.certification) {
    const CertificationReport& c = *r.certification;
    j["certification"] = {{"vertex_count", c.vertex_count},
                          {"sample_count", c.sample_count},
                          {"min_sector_margin", real_to_json(c.min_sector_margin)},
                          {"worst_realization",
                           {{"f_a", vector_to_json(c.worst_realization.f_a)},
                            {"f_b", vector_to_json(c.worst_realization.f_b)}}},
                          {"nominal_lmi_ok", c.nominal_lmi_ok},
                          {"vertices_skipped", c.vertices_skipped},
                          {"passed", c.passed}};
  }
  if (r.simulation) {
    const SimulationSummary& s = *r.simulation;
    j["simulation"] = {{"t_end", s.t_end},
                       {"h", s.h},
                       {"steps", s.steps},
                       {"initial_norm", s.initial_norm},
                       {"final_norm", real_to_json(s.final_norm)},
                       {"ratio", real_to_json(s.ratio)}};
  }
  if (!r.decomposition.is_null()) j["decomposition"] = r.decomposition;
  j["timings_ms"] = r.timings_ms;
  return j;
}

namespace {

bool is_flat(const json& j) {
  return std::none_of(j.begin(), j.end(), [](const json& e) { return e.is_structured(); });
}

void format_into(std::string& out, const json& j, int depth) {
  const std::string pad(2 * (depth + 1), ' ');
  const std::string close_pad(2 * depth, ' ');
  if (j.is_object() && !j.empty()) {
    out += "{\n";
    std::size_t i = 0;
    for (auto it = j.begin(); it != j.end(); ++it, ++i) {
      out += pad + json(it.key()).dump() + ": ";
      format_into(out, it.value(), depth + 1);
      out += i + 1 < j.size() ? ",\n" : "\n";
    }
    out += close_pad + "}";
  } else if (j.is_array() && !j.empty() && !is_flat(j)) {
    out += "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      out += pad;
      format_into(out, j[i], depth + 1);
      out += i + 1 < j.size() ? ",\n" : "\n";
    }
    out += close_pad + "]";
  } else if (j.is_array()) {
    out += "[";
    for (std::size_t i = 0; i < j.size(); ++i) out += (i ? ", " : "") + j[i].dump();
    out += "]";
  } else {
    out += j.dump();
  }
}

}  // namespace

std::string format_json(const json& j) {
  std::string out;
  format_into(out, j, 0);
  return out + "\n";
}

RunReport report_from_json(const json& j) {
  if (!j.is_object()) parse_fail("report", "expected an object");
  RunReport r;
  r.command = require(j, "command").get<std::string>();
  r.status = require(j, "status").get<std::string>();
  r.exit_code = get_int(require(j, "exit_code"), "exit_code");
  if (const json* v = find(j, "message")) r.message = v->get<std::string>();
  if (const json* v = find(j, "config")) r.config = *v;
  if (const json* v = find(j, "synthesis")) {
    SynthesisSummary s;
    s.controller = controller_from_json(require(*v, "controller"));
    s.eta = get_number(require(*v, "eta"), "eta");
    s.solver_status = require(*v, "solver_status").get<std::string>();
    s.regime = require(*v, "regime").get<std::string>();
    s.robust = require(*v, "robust").get<bool>();
    s.iterations = get_int(require(*v, "iterations"), "iterations");
    s.achieved_margin = real_from_json(require(*v, "achieved_margin"), "achieved_margin");
    s.eps_margin = get_number(require(*v, "eps_margin"), "eps_margin");
    s.attempts = get_int(require(*v, "attempts"), "attempts");
    s.q_s_condition = real_from_json(require(*v, "q_s_condition"), "q_s_condition");
    s.q_c_condition = real_from_json(require(*v, "q_c_condition"), "q_c_condition");
    r.synthesis = s;
  }
  if (const json* v = find(j, "certification")) {
    CertificationReport c;
    c.vertex_count = get_seed(require(*v, "vertex_count"), "vertex_count");
    c.sample_count = get_int(require(*v, "sample_count"), "sample_count");
    c.min_sector_margin = real_from_json(require(*v, "min_sector_margin"), "min_sector_margin");
    const json& w = require(*v, "worst_realization");
    c.worst_realization.f_a = doubles_from_json(require(w, "f_a"), "f_a");
    c.worst_realization.f_b = doubles_from_json(require(w, "f_b"), "f_b");
    c.nominal_lmi_ok = require(*v, "nominal_lmi_ok").get<bool>();
    c.vertices_skipped = require(*v, "vertices_skipped").get<bool>();
    c.passed = require(*v, "passed").get<bool>();
    r.certification = c;
  }
  if (const json* v = find(j, "simulation")) {
    SimulationSummary s;
    s.t_end = get_number(require(*v, "t_end"), "t_end");
    s.h = get_number(require(*v, "h"), "h");
    s.steps = get_seed(require(*v, "steps"), "steps");
    s.initial_norm = get_number(require(*v, "initial_norm"), "initial_norm");
    s.final_norm = real_from_json(require(*v, "final_norm"), "final_norm");
    s.ratio = real_from_json(require(*v, "ratio"), "ratio");
    r.simulation = s;
  }
  if (const json* v = find(j, "decomposition")) r.decomposition = *v;
  if (const json* v = find(j, "timings_ms")) r.timings_ms = v->get<std::map<std::string, double>>();
  return r;
}

}  // namespace fodof
