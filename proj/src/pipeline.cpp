#include "mdnf/pipeline.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <variant>
#include <vector>

#include "json.hpp"

namespace mdnf {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

[[noreturn]] void config_error(std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::ConfigError, "config line " + std::to_string(line) + ": " + msg);
}

double parse_real(const std::string& v, std::size_t line, const std::string& key) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
    config_error(line, "'" + key + "' expects a real number, got '" + v + "'");
  return out;
}

std::size_t parse_count(const std::string& v, std::size_t line, const std::string& key) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    config_error(line, "'" + key + "' expects a non-negative integer, got '" + v + "'");
  return out;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// A small column table rendered as CSV or JSON.
struct Table {
  using Cell = std::variant<std::string, double>;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::string render(TableFormat format) const {
    if (format == TableFormat::Csv) {
      std::string out;
      for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ',';
        out += columns[i];
      }
      out += '\n';
      for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
          if (i) out += ',';
          if (const auto* s = std::get_if<std::string>(&row[i]))
            out += *s;
          else
            out += fmt17(std::get<double>(row[i]));
        }
        out += '\n';
      }
      return out;
    }
    nlohmann::ordered_json j;
    j["columns"] = columns;
    nlohmann::json rs = nlohmann::json::array();
    for (const auto& row : rows) {
      nlohmann::json r = nlohmann::json::array();
      for (const auto& c : row) {
        if (const auto* s = std::get_if<std::string>(&c))
          r.push_back(*s);
        else
          r.push_back(std::get<double>(c));
      }
      rs.push_back(std::move(r));
    }
    j["rows"] = std::move(rs);
    return j.dump(2) + "\n";
  }
};

}  // namespace

VerifyOptions RunConfig::verify_options() const {
  VerifyOptions o;
  o.grid_n = grid_n;
  o.grid_m = grid_m;
  o.grid_extent = grid_extent;
  o.eps_max = eps_max;
  o.fd_step = tolerances.fd_step;
  const double v = tolerances.verify_tol;
  o.tol_symplectic = tol_symplectic.value_or(v);
  o.tol_functional = tol_functional.value_or(v);
  o.tol_boundary = tol_boundary.value_or(v);
  o.tol_area = tol_area.value_or(v);
  o.tol_lemma5 = tol_lemma5.value_or(1e-4);
  o.tol_bisector = tol_bisector.value_or(v);
  return o;
}

void RunConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::ConfigError, m); };
  if (trim(f_expr).empty()) fail("missing or empty expression 'f'");
  if (trim(omega_expr).empty()) fail("missing or empty expression 'omega'");
  if (!(eps_max > 0.0)) fail("eps_max must be positive");
  if (grid_n < 8 || grid_m < 4) fail("grid must be at least 8 x 4");
  if (profile_points < 16) fail("profile_points must be at least 16");
  if (!(grid_extent > 0.0)) fail("grid_extent must be positive");
  if (!(chart_radius > 0.0)) fail("chart_radius must be positive");
  if (!format_csv && !format_json) fail("formats must include csv or json");
  for (const auto& t : {tol_symplectic, tol_functional, tol_boundary, tol_area, tol_lemma5,
                        tol_bisector})
    if (t && !(*t > 0.0)) fail("check tolerances must be positive");
  if (!(fault_p_scale > 0.0)) fail("fault_p_scale must be positive");
  try {
    tolerances.validate();
  } catch (const Error& e) {
    fail(e.what());
  }
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  bool seen_formats = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view raw = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    // Strip comments outside quotes.
    bool quoted = false;
    std::size_t cut = raw.size();
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == '"') quoted = !quoted;
      if (raw[i] == '#' && !quoted) {
        cut = i;
        break;
      }
    }
    const std::string line = trim(raw.substr(0, cut));
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) config_error(line_no, "expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    else if (value.find('"') != std::string::npos)
      config_error(line_no, "unbalanced quotes in value of '" + key + "'");

    if (key == "f") c.f_expr = value;
    else if (key == "omega") c.omega_expr = value;
    else if (key == "eps_max") c.eps_max = parse_real(value, line_no, key);
    else if (key == "profile_points") c.profile_points = parse_count(value, line_no, key);
    else if (key == "grid_n") c.grid_n = parse_count(value, line_no, key);
    else if (key == "grid_m") c.grid_m = parse_count(value, line_no, key);
    else if (key == "grid_extent") c.grid_extent = parse_real(value, line_no, key);
    else if (key == "chart_radius") c.chart_radius = parse_real(value, line_no, key);
    else if (key == "quad_tol") c.tolerances.quad_tol = parse_real(value, line_no, key);
    else if (key == "root_tol") c.tolerances.root_tol = parse_real(value, line_no, key);
    else if (key == "newton_max_iter")
      c.tolerances.newton_max_iter = static_cast<int>(parse_count(value, line_no, key));
    else if (key == "fd_step") c.tolerances.fd_step = parse_real(value, line_no, key);
    else if (key == "verify_tol") c.tolerances.verify_tol = parse_real(value, line_no, key);
    else if (key == "tol_symplectic") c.tol_symplectic = parse_real(value, line_no, key);
    else if (key == "tol_functional") c.tol_functional = parse_real(value, line_no, key);
    else if (key == "tol_boundary") c.tol_boundary = parse_real(value, line_no, key);
    else if (key == "tol_area") c.tol_area = parse_real(value, line_no, key);
    else if (key == "tol_lemma5") c.tol_lemma5 = parse_real(value, line_no, key);
    else if (key == "tol_bisector") c.tol_bisector = parse_real(value, line_no, key);
    else if (key == "output_dir") c.output_dir = value;
    else if (key == "fault_p_scale") c.fault_p_scale = parse_real(value, line_no, key);
    else if (key == "formats") {
      seen_formats = true;
      c.format_csv = c.format_json = false;
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item == "csv") c.format_csv = true;
        else if (item == "json") c.format_json = true;
        else if (!item.empty()) config_error(line_no, "unknown format '" + item + "'");
      }
    } else {
      config_error(line_no, "unknown key '" + key + "'");
    }
    if (end == text.size()) break;
  }
  (void)seen_formats;
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

// ---------------------------------------------------------------------------

Session::Session(RunConfig config) : config_(std::move(config)) {}

void Session::ensure_parsed() {
  if (!f_) f_ = ScalarExpression::parse(config_.f_expr);
  if (!omega_) omega_ = ScalarExpression::parse(config_.omega_expr);
}

HypothesisReport Session::check() {
  ensure_parsed();
  return check_hypotheses(*f_, *omega_);
}

std::string Session::check_json() {
  const HypothesisReport r = check();
  nlohmann::ordered_json j;
  j["f"] = config_.f_expr;
  j["omega"] = config_.omega_expr;
  j["admissible"] = r.admissible;
  j["failure"] = r.failure ? nlohmann::ordered_json(error_code_name(*r.failure))
                           : nlohmann::ordered_json(nullptr);
  j["message"] = r.message;
  j["f00"] = r.f00;
  j["fx0"] = r.fx0;
  j["fy0"] = r.fy0;
  j["fxx0"] = r.fxx0;
  j["omega0"] = r.omega0;
  j["flip_f"] = r.flip_f;
  j["flip_y"] = r.flip_y;
  return j.dump(2) + "\n";
}

const NormalizedProblem& Session::problem() {
  if (!normalized_) {
    ensure_parsed();
    normalized_ = std::make_unique<NormalizationResult>(
        check_and_normalize(*f_, *omega_, config_.tolerances, config_.chart_radius));
  }
  return normalized_->problem;
}

const NormalFormChart& Session::chart() {
  if (!chart_) chart_ = std::make_unique<NormalFormChart>(build_chart(problem(), config_.fault_p_scale));
  return *chart_;
}

double Session::effective_eps_max() {
  const double r = problem().radius();
  return std::min(config_.eps_max, r * r);
}

std::string Session::profile_table(TableFormat format, std::string* summary) {
  const double eps = effective_eps_max();
  const AreaProfile p = build_profile(problem(), eps, config_.profile_points);
  Table t;
  t.columns = {"eps", "A", "A_tilde", "alpha_inv"};
  for (std::size_t i = 0; i < p.eps_grid.size(); ++i) {
    const double a = p.a_values[i];
    const double at = a > 0.0 ? std::pow(a, 2.0 / 3.0) : 0.0;
    const double ai = a > 0.0 ? std::pow(0.75 * a, 2.0 / 3.0) : 0.0;
    t.rows.push_back({p.eps_grid[i], a, at, ai});
  }
  if (summary) {
    const double limit = 4.0 / 3.0 * p.omega0;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "small-eps ratio A/eps^1.5 at eps=%.6g: %.12g, limit 4/3*omega0 = %.12g "
                  "(relative difference %.3g, %s)",
                  p.eps_grid[1], p.small_eps_ratio, limit,
                  std::fabs(p.small_eps_ratio - limit) / limit,
                  p.small_eps_ok ? "within 5%" : "outside 5%");
    *summary = buf;
    if (eps < config_.eps_max) {
      std::snprintf(buf, sizeof buf, "\neps_max clipped from %.6g to %.6g (chart radius %.6g)",
                    config_.eps_max, eps, problem().radius());
      *summary += buf;
    }
  }
  return t.render(format);
}

std::string Session::chart_table(TableFormat format) {
  const NormalFormChart& ch = chart();
  const NormalizedProblem& prob = ch.problem();
  const HypothesisReport& rep = prob.report();
  const double sign = rep.flip_f ? -1.0 : 1.0;
  const double g = std::min(config_.grid_extent, prob.radius() / std::sqrt(2.0));
  const std::size_t n = config_.grid_n;
  const std::size_t m = config_.grid_m;
  Table t;
  t.columns = {"x", "y", "p", "q", "f", "alpha_of_s"};
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 hat{-g + 2.0 * g * i / (n - 1), g * g * j / (m - 1)};
      const Vec2 P = prob.inverse(hat);
      const ChartValue v = ch.evaluate(P[0], P[1]);
      const double y_in = rep.flip_y ? -P[1] : P[1];
      const double f_in = f_->evaluate(P[0], y_in);
      const double s = v.p * v.p + v.q;
      t.rows.push_back({P[0], y_in, v.p, v.q, f_in, rep.f00 + sign * ch.alpha().alpha(s)});
    }
  }
  return t.render(format);
}

std::string Session::levels_table(TableFormat format) {
  const NormalFormChart& ch = chart();
  const NormalizedProblem& prob = ch.problem();
  const bool flip_y = prob.report().flip_y;
  const double top_h = std::min(0.9 * effective_eps_max(), ch.alpha().beta_max());
  const double c_max = ch.alpha().alpha(top_h);
  constexpr int kPoints = 41;
  Table t;
  t.columns = {"curve_id", "x", "y"};
  auto emit = [&](const std::string& id, const Vec2& hat) {
    const Vec2 P = prob.inverse(hat);
    t.rows.push_back({id, P[0], flip_y ? -P[1] : P[1]});
  };
  for (int k = 0; k <= 9; ++k) {
    const double c = c_max * k / 9.0;
    const std::string id = "level_" + std::to_string(k);
    if (c == 0.0) {
      emit(id, {0.0, 0.0});
      continue;
    }
    const double w = std::sqrt(c);
    for (int i = 0; i < kPoints; ++i) {
      const double xh = -w + 2.0 * w * i / (kPoints - 1);
      emit(id, {xh, std::max(0.0, c - xh * xh)});
    }
  }
  const double wb = std::sqrt(c_max);
  for (int i = 0; i < kPoints; ++i) emit("boundary", {-wb + 2.0 * wb * i / (kPoints - 1), 0.0});
  const Bisector b = Bisector::sample(ch.level(), c_max, kPoints - 1);
  for (std::size_t i = 0; i < b.z().size(); ++i) {
    const double s = b.s()[i];
    emit("bisector", {s, b.z()[i] - s * s});
  }
  return t.render(format);
}

VerificationReport Session::verify() { return mdnf::verify(chart(), config_.verify_options()); }

Vec2 Session::chart_at(double x, double y) {
  const NormalFormChart& ch = chart();
  return ch.pq(x, ch.problem().report().flip_y ? -y : y);
}

}  // namespace mdnf
