// tfham: command-line front end for the HAM engine, the shooting reference
// and the reproduction targets.
//
// Exit codes: 0 success (reproduce: no mismatch), 1 reproduce found a
// mismatch, 2 usage error, 3 computation failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tfham/errors.hpp"
#include "tfham/ham_engine.hpp"
#include "tfham/reference_solver.hpp"
#include "tfham/report.hpp"
#include "tfham/series_accel.hpp"

namespace {

using namespace tfham;

constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;
constexpr int kExitFailure = 3;

struct Globals {
  int precision = 512;
  std::string mode = "float";
  std::string out;
  std::string format;
  unsigned threads = 0;
  bool timings = false;
};

struct BasisFlags {
  std::string alpha = "3/4";
  std::string beta = "1";
  std::string gamma = "1";
  std::string h = "-3/4";
  std::string op = "kernel";

  void attach(CLI::App* cmd) {
    cmd->add_option("--alpha", alpha, "basis shift alpha > 0")->capture_default_str();
    cmd->add_option("--beta", beta, "basis scale beta > 0")->capture_default_str();
    cmd->add_option("--gamma", gamma, "initial-guess exponent gamma > 0")->capture_default_str();
    cmd->add_option("--h", h, "convergence-control parameter h < 0")->capture_default_str();
    cmd->add_option("--operator", op, "auxiliary operator: kernel | printed")
        ->check(CLI::IsMember({"kernel", "printed"}))
        ->capture_default_str();
  }

  BasisParams basis() const {
    BasisParams p{parse_number(alpha), parse_number(beta), parse_number(gamma)};
    p.validate();
    return p;
  }

  HamConfig config(int order, const NumericMode& mode) const {
    HamConfig c;
    c.basis = basis();
    c.h = parse_number(h);
    c.order = order;
    c.mode = mode;
    c.op = op == "printed" ? OperatorForm::AsPrinted : OperatorForm::KernelConsistent;
    c.validate();
    return c;
  }
};

NumericMode numeric_mode(const Globals& g) {
  if (g.mode == "exact") return NumericMode::exact();
  if (g.precision < 64) throw ConfigError("--precision must be >= 64");
  return NumericMode::approx(g.precision);
}

// Writes to --out when given, stdout otherwise.
class Sink {
public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw ConfigError("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
  std::ofstream file_;
};

// "a,b,c" or "lo:hi:step" (inclusive), combinable with commas.
std::vector<Rational> parse_grid(const std::string& text) {
  std::vector<Rational> grid;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.find(':') == std::string::npos) {
      grid.push_back(parse_number(item));
      continue;
    }
    std::vector<std::string> parts;
    std::stringstream range(item);
    for (std::string p; std::getline(range, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw ParseError("grid range must be lo:hi:step, got '" + item + "'");
    const Rational lo = parse_number(parts[0]), hi = parse_number(parts[1]), step = parse_number(parts[2]);
    if (sgn(step) <= 0) throw ParseError("grid step must be positive");
    for (Rational x = lo; x <= hi; x += step) grid.push_back(x);
  }
  if (grid.empty()) throw ParseError("empty evaluation grid");
  return grid;
}

std::vector<long double> default_reference_grid() {
  std::vector<long double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.5L * i);
  return grid;
}

template <class C>
int emit_solve(const HamConfig& cfg, const Globals& g, const std::string& eval_grid) {
  auto seq = run<C>(cfg);
  const std::string format = g.format.empty() ? "json" : g.format;
  nlohmann::json summary = run_summary(seq, {g.timings});
  std::vector<std::pair<std::string, std::string>> solution;
  if (!eval_grid.empty()) {
    auto sum = partial_sum(seq, cfg.order);
    const int prec = cfg.mode.is_exact() ? 128 : cfg.mode.precision;
    for (const Rational& x : parse_grid(eval_grid)) {
      std::string u;
      if constexpr (Field<C>::exact)
        u = to_string(evaluate_exact(sum, x));
      else
        u = series_eval(sum, Real(x, prec), cfg.mode).to_string();
      solution.emplace_back(to_string(x), u);
    }
  }
  Sink sink(g.out);
  if (format == "csv") {
    if (solution.empty()) throw ConfigError("--format csv for solve needs --eval-grid");
    sink.stream() << "x,u_ham\n";
    for (const auto& [x, u] : solution) sink.stream() << x << ',' << u << '\n';
  } else {
    if (!solution.empty()) {
      summary["solution"] = nlohmann::json::array();
      for (const auto& [x, u] : solution) summary["solution"].push_back({{"x", x}, {"u", u}});
    }
    sink.stream() << summary.dump(2) << '\n';
  }
  return 0;
}

ShootingConfig shooting_from(const std::vector<std::string>& bracket, const std::string& x_start,
                             const std::string& x_max, const std::string& ode_tol, const std::string& bracket_tol) {
  ShootingConfig cfg;
  auto ld = [](const std::string& s) { return static_cast<long double>(parse_number(s).get_d()); };
  if (!bracket.empty()) {
    cfg.bracket_lo = std::stold(bracket.at(0));
    cfg.bracket_hi = std::stold(bracket.at(1));
  }
  if (!x_start.empty()) cfg.x_start = ld(x_start);
  if (!x_max.empty()) cfg.x_max = ld(x_max);
  if (!ode_tol.empty()) cfg.ode_tol = ld(ode_tol);
  if (!bracket_tol.empty()) cfg.bracket_tol = ld(bracket_tol);
  cfg.validate();
  return cfg;
}

int report_exit(const std::vector<ReportRow>& rows) {
  int mismatches = 0;
  for (const auto& r : rows)
    if (r.verdict == Verdict::Mismatch) {
      ++mismatches;
      std::cerr << "mismatch: " << r.label << " computed " << r.computed;
      if (r.expected) std::cerr << " expected " << *r.expected;
      std::cerr << '\n';
    }
  std::cerr << rows.size() << " rows, " << mismatches << " mismatch(es)\n";
  return mismatches == 0 ? 0 : kExitMismatch;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thomas-Fermi HAM series engine and reproduction harness"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  Globals g;
  app.add_option("--precision", g.precision, "working precision in bits (float mode)")->capture_default_str();
  app.add_option("--mode", g.mode, "exact | float")->check(CLI::IsMember({"exact", "float"}))->capture_default_str();
  app.add_option("--out", g.out, "output path (default stdout)");
  app.add_option("--format", g.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--threads", g.threads, "worker threads for concurrent runs (0: all cores)");
  app.add_flag("--timings", g.timings, "include wall-clock seconds per order");
  app.fallthrough();

  // solve
  auto* solve = app.add_subcommand("solve", "run the deformation recursion to a given order");
  BasisFlags solve_basis;
  solve_basis.attach(solve);
  int solve_order = 10;
  std::string eval_grid;
  solve->add_option("--order", solve_order, "highest order N")->capture_default_str();
  solve->add_option("--eval-grid", eval_grid, "x values: a,b,c or lo:hi:step");

  // hcurve
  auto* hc = app.add_subcommand("hcurve", "slope and curvature at x = 0 against h");
  BasisFlags hc_basis;
  hc_basis.attach(hc);
  std::string h_min = "-6/5", h_max = "-1/20";
  int hc_samples = 100, hc_order = 20;
  hc->add_option("--h-min", h_min)->capture_default_str();
  hc->add_option("--h-max", h_max)->capture_default_str();
  hc->add_option("--samples", hc_samples)->capture_default_str();
  hc->add_option("--order", hc_order)->capture_default_str();

  // pade
  auto* pade = app.add_subcommand("pade", "diagonal Pade approximants of the slope series at p = 1");
  BasisFlags pade_basis;
  pade_basis.attach(pade);
  int pade_m = 10;
  pade->add_option("--m", pade_m, "highest diagonal degree; the engine runs to order 2m")->capture_default_str();

  // reference and reproduce share the shooting overrides
  std::vector<std::string> bracket;
  std::string x_start, x_max, ode_tol, bracket_tol;
  auto add_shooting = [&](CLI::App* cmd) {
    cmd->add_option("--bracket", bracket, "initial slope bracket: lo hi")->expected(2)->allow_extra_args(false);
    cmd->add_option("--x-start", x_start, "singular-start offset");
    cmd->add_option("--x-max", x_max, "far boundary");
    cmd->add_option("--ode-tol", ode_tol, "adaptive step tolerance");
    cmd->add_option("--bracket-tol", bracket_tol, "bisection stopping width");
  };
  auto* ref = app.add_subcommand("reference", "initial slope by shooting, and the solution on [0, 10]");
  add_shooting(ref);

  auto* repro = app.add_subcommand("reproduce", "recompute a published table or figure and compare");
  std::string target;
  ReproduceOptions ropts;
  bool long_run = false, fixed_precision = false;
  std::string table1_h = "-4/5", table2_h = "-3/4";
  repro->add_option("target", target, "table1 | table2 | figure1 | hcurves")->required();
  repro->add_option("--max-order", ropts.max_order, "table1: largest N")->capture_default_str();
  repro->add_option("--max-m", ropts.max_m, "table2: largest m")->capture_default_str();
  repro->add_flag("--long", long_run, "all published rows (N <= 100, m <= 50)");
  repro->add_flag("--fixed-precision", fixed_precision, "do not raise --precision for high orders");
  repro->add_option("--table1-h", table1_h, "h for the table1 runs")->capture_default_str();
  repro->add_option("--table2-h", table2_h, "h for the table2 runs")->capture_default_str();
  add_shooting(repro);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*solve) {
      if (solve_order < 0) throw ConfigError("--order must be >= 0");
      const HamConfig cfg = solve_basis.config(solve_order, numeric_mode(g));
      return cfg.mode.is_exact() ? emit_solve<Rational>(cfg, g, eval_grid) : emit_solve<Real>(cfg, g, eval_grid);
    }
    if (*hc) {
      const Rational lo = parse_number(h_min), hi = parse_number(h_max);
      if (hc_samples < 1) throw ConfigError("--samples must be >= 1");
      if (hc_samples > 1 && !(lo < hi)) throw ConfigError("--h-min must be below --h-max");
      if (sgn(hi) >= 0) throw ConfigError("h must stay negative");
      const NumericMode mode = numeric_mode(g);
      if (mode.is_exact()) throw ConfigError("hcurve runs in float mode");
      hc_basis.config(hc_order, mode);
      auto points = hcurve(hc_basis.basis(), lo, hi, hc_samples, hc_order, mode, g.threads);
      Sink sink(g.out);
      if (g.format == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& p : points)
          j.push_back({{"h", to_string(p.h)}, {"slope", p.slope.to_string()}, {"curvature", p.curvature.to_string()}});
        sink.stream() << j.dump(2) << '\n';
      } else {
        write_csv(sink.stream(), points);
      }
      return 0;
    }
    if (*pade) {
      if (pade_m < 0) throw ConfigError("--m must be >= 0");
      NumericMode mode = numeric_mode(g);
      if (mode.is_exact()) mode = NumericMode::approx(512);
      const HamConfig cfg = pade_basis.config(2 * pade_m, mode);
      const long double slope = find_initial_slope().slope;
      const bool published = cfg.basis == present_basis() && cfg.h == Rational(-3, 4);
      auto report = pade_rows(cfg, pade_m, slope, published);
      Sink sink(g.out);
      if (g.format == "json") {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& l : report.lines)
          j.push_back({{"m", l.m_label},
                       {"value", l.value ? nlohmann::json(l.value->to_string()) : nlohmann::json(nullptr)},
                       {"err_pct", l.err_pct ? nlohmann::json(l.err_pct->to_string()) : nlohmann::json(nullptr)},
                       {"method", l.method},
                       {"verdict", to_string(l.verdict)}});
        sink.stream() << j.dump(2) << '\n';
      } else {
        write_csv(sink.stream(), report.lines);
      }
      return 0;
    }
    if (*ref) {
      const ShootingConfig cfg = shooting_from(bracket, x_start, x_max, ode_tol, bracket_tol);
      auto result = find_initial_slope(cfg);
      auto samples = sample_solution(result, default_reference_grid());
      Sink sink(g.out);
      if (g.format == "csv") {
        sink.stream() << "x,u_ref\n";
        for (const auto& [x, u] : samples) sink.stream() << render_decimal(x) << ',' << render_decimal(u) << '\n';
      } else {
        nlohmann::json j = to_json(result);
        j["reference"] = nlohmann::json::array();
        for (const auto& [x, u] : samples) j["reference"].push_back({{"x", render_decimal(x)}, {"u", render_decimal(u)}});
        sink.stream() << j.dump(2) << '\n';
      }
      return 0;
    }
    if (*repro) {
      if (target != "table1" && target != "table2" && target != "figure1" && target != "hcurves")
        throw ConfigError("unknown reproduce target '" + target + "'");
      if (g.mode == "exact") throw ConfigError("reproduce runs in float mode");
      ropts.precision = numeric_mode(g).precision;
      ropts.auto_precision = !fixed_precision;
      ropts.threads = g.threads;
      ropts.table1_h = parse_number(table1_h);
      ropts.table2_h = parse_number(table2_h);
      if (long_run) {
        ropts.max_order = 100;
        ropts.max_m = 50;
      }
      ropts.shooting = shooting_from(bracket, x_start, x_max, ode_tol, bracket_tol);
      const auto reference = find_initial_slope(ropts.shooting);
      const bool json = g.format == "json";
      Sink sink(g.out);
      std::vector<ReportRow> rows;
      nlohmann::json doc;
      if (target == "table1") {
        auto rep = reproduce_table1(ropts, reference.slope);
        rows = rep.rows;
        if (!json) write_csv(sink.stream(), rep.lines);
      } else if (target == "table2") {
        auto rep = reproduce_table2(ropts, reference.slope);
        rows = rep.rows;
        if (!json) write_csv(sink.stream(), rep.lines);
      } else if (target == "figure1") {
        auto rep = reproduce_figure1(ropts, reference);
        rows = rep.rows;
        if (!json) write_csv(sink.stream(), rep.lines);
      } else {
        auto rep = reproduce_hcurves(ropts);
        rows = rep.rows;
        if (!json) {
          sink.stream() << "basis,h,slope,curvature\n";
          for (const auto* curve : {&rep.present, &rep.liao})
            for (const auto& p : *curve)
              sink.stream() << (curve == &rep.present ? "alpha=3/4" : "alpha=1") << ',' << to_string(p.h) << ','
                            << p.slope.to_string() << ',' << p.curvature.to_string() << '\n';
        }
      }
      if (json) {
        doc["target"] = target;
        doc["reference"] = to_json(reference);
        doc["rows"] = to_json(rows);
        sink.stream() << doc.dump(2) << '\n';
      }
      return report_exit(rows);
    }
  } catch (const ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DivisionByZeroError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}
