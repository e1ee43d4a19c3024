#include "tfham/report.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <thread>

#include "tfham/errors.hpp"

namespace tfham {

namespace {

constexpr double kEpsilonAgreement = 1e-20;

std::string opt_decimal(const std::optional<double>& v) {
  if (!v) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", *v);
  return buf;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

Verdict combine(std::initializer_list<Verdict> parts) {
  bool informational = false;
  for (Verdict v : parts) {
    if (v == Verdict::Mismatch) return Verdict::Mismatch;
    if (v != Verdict::Match) informational = true;
  }
  return informational ? Verdict::Informational : Verdict::Match;
}

int effective_precision(const ReproduceOptions& opts, int order) {
  return opts.auto_precision ? std::max(opts.precision, recommended_precision(order)) : opts.precision;
}

HamConfig make_config(const BasisParams& basis, const Rational& h, int order, int precision) {
  HamConfig c;
  c.basis = basis;
  c.h = h;
  c.order = order;
  c.mode = NumericMode::approx(precision);
  return c;
}

// Runs fn(i) for i in [0, count) on up to `threads` workers.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  auto worker = [&](unsigned id) {
    try {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    } catch (...) {
      errors[id] = std::current_exception();
      next = count;
    }
  };
  if (threads <= 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

PadeLine pade_line(const CoefficientTail<Real>& tail, int m, std::string label,
                   std::optional<long double> reference, const Table2Row* expected_row, bool informational,
                   std::vector<ReportRow>& rows) {
  PadeLine line{std::move(label), std::nullopt, std::nullopt, std::nullopt, "", Verdict::Informational};
  std::optional<PadeResult<Real>> primary, check;
  try {
    primary = pade_by_epsilon(tail, m);
  } catch (const DegeneracyError&) {
  }
  try {
    check = pade_at_one(tail, m);
  } catch (const DegeneracyError&) {
  }
  if (!primary && !check) {
    line.method = "degenerate";
    line.verdict = Verdict::Degenerate;
    rows.push_back({"pade " + line.m_label + " value", 0, std::nullopt, std::nullopt, 0, Verdict::Degenerate});
    return line;
  }
  if (!primary) std::swap(primary, check);
  line.value = primary->value;
  line.method = to_string(primary->method);
  if (check) {
    Real gap = abs(primary->value - check->value) / abs(primary->value);
    line.method += gap.to_double() <= kEpsilonAgreement ? "+" + to_string(check->method)
                                                        : "!" + to_string(check->method) + "(gap=" + gap.to_string(3) + ")";
  } else {
    line.method += "(" + std::string(primary->method == PadeMethod::Epsilon ? "direct" : "epsilon") + " degenerate)";
  }
  const int prec = primary->value.precision();
  if (reference) line.err_pct = error_percent(*line.value, Real(*reference, prec));
  if (expected_row) line.expected = informational ? expected_row->slope_liao : expected_row->slope;

  auto value_row = ReportRow::compare("pade " + line.m_label + " value", line.value->to_double(), line.expected,
                                      kPadeTolerance, informational);
  std::optional<double> expected_err =
      expected_row && !informational ? std::optional<double>(expected_row->err_pct) : std::nullopt;
  auto err_row = ReportRow::compare("pade " + line.m_label + " err_pct",
                                    line.err_pct ? line.err_pct->to_double() : 0.0, expected_err, kErrPctTolerance,
                                    informational || !line.err_pct);
  line.verdict = expected_row ? combine({value_row.verdict, err_row.verdict}) : Verdict::Informational;
  rows.push_back(std::move(value_row));
  if (line.err_pct) rows.push_back(std::move(err_row));
  return line;
}

} // namespace

const std::vector<Table1Row>& PaperConstants::table1() {
  static const std::vector<Table1Row> rows = {
      {10, -1.54628, 2.63, -1.50014, 25.4567, 13.0003, 1e-4},
      {20, -1.56597, 1.39, -1.54093, 46.8426, 23.0819, 1e-4},
      {30, -1.57305, 0.94, -1.55595, 68.1948, 33.1119, 1e-4},
      {40, -1.57669, 0.71, -1.56373, 89.5378, 43.1275, 1e-4},
      {50, -1.57891, 0.57, -1.56848, 110.877, 53.1370, 1e-3},
      {60, -1.58040, 0.48, -1.57168, 132.214, 63.1434, 1e-3},
      {70, -1.58171, 0.40, -1.57399, 151.216, 73.1480, 1e-3},
      {80, -1.58303, 0.31, -1.57572, 173.012, 83.1514, 1e-3},
      {90, -1.58424, 0.24, -1.57708, 196.871, 93.1542, 1e-3},
      {100, -1.58515, 0.18, -1.57816, 224.112, 103.1560, 1e-3},
  };
  return rows;
}

const std::vector<Table2Row>& PaperConstants::table2() {
  static const std::vector<Table2Row> rows = {
      {10, -1.58030, 0.48933, -1.51508},
      {20, -1.58571, 0.14867, -1.58281},
      {30, -1.58694, 0.07122, -1.58606},
      {40, -1.58752, 0.03469, -1.58668},
      {50, -1.58801, 0.00384, -1.58712},
  };
  return rows;
}

const Table1Row* PaperConstants::table1_row(int n) {
  for (const auto& r : table1())
    if (r.n == n) return &r;
  return nullptr;
}

const Table2Row* PaperConstants::table2_row(int m) {
  for (const auto& r : table2())
    if (r.m == m) return &r;
  return nullptr;
}

std::string to_string(Verdict v) {
  switch (v) {
  case Verdict::Match: return "match";
  case Verdict::Mismatch: return "mismatch";
  case Verdict::Informational: return "informational";
  case Verdict::Degenerate: return "degenerate";
  }
  return "?";
}

ReportRow ReportRow::compare(std::string label, double computed, std::optional<double> expected,
                             std::optional<double> tolerance, bool informational) {
  ReportRow row{std::move(label), computed, expected, tolerance, 0, Verdict::Informational};
  if (expected) row.abs_diff = std::fabs(computed - *expected);
  if (expected && tolerance && !informational)
    row.verdict = std::isfinite(computed) && row.abs_diff <= *tolerance ? Verdict::Match : Verdict::Mismatch;
  return row;
}

bool all_match(const std::vector<ReportRow>& rows) {
  for (const auto& r : rows)
    if (r.verdict == Verdict::Mismatch) return false;
  return true;
}

int recommended_precision(int order) {
  const int bits = 64 + 6 * std::max(order, 0);
  return (bits + 63) / 64 * 64;
}

BasisParams present_basis() { return {Rational(3, 4), Rational(1), Rational(1)}; }
BasisParams liao_basis() { return {Rational(1), Rational(1), Rational(1)}; }

std::vector<HCurvePoint> hcurve(const BasisParams& basis, const Rational& h_min, const Rational& h_max, int samples,
                                int order, const NumericMode& mode, unsigned threads) {
  if (samples < 1) throw ConfigError("hcurve needs at least one sample");
  if (samples > 1 && !(h_min < h_max)) throw ConfigError("hcurve needs h_min < h_max");
  if (mode.is_exact()) throw ConfigError("hcurve runs in float mode");
  std::vector<Rational> hs;
  for (int i = 0; i < samples; ++i) {
    Rational h = samples == 1 ? h_min : Rational(h_min + (h_max - h_min) * i / (samples - 1));
    h.canonicalize();
    hs.push_back(h);
  }
  std::vector<std::optional<HCurvePoint>> out(hs.size());
  parallel_for(hs.size(), threads, [&](std::size_t i) {
    HamConfig c = make_config(basis, hs[i], order, mode.precision);
    auto seq = run<Real>(c);
    out[i] = HCurvePoint{hs[i], seq.partial_slope(order), seq.partial_curvature(order)};
  });
  std::vector<HCurvePoint> points;
  for (auto& p : out) points.push_back(std::move(*p));
  return points;
}

PadeReport pade_rows(const HamConfig& base, int m, std::optional<long double> reference_slope,
                     bool compare_published) {
  if (m < 0) throw ConfigError("Pade degree must be >= 0");
  HamConfig cfg = base;
  cfg.order = 2 * m;
  if (cfg.mode.is_exact()) cfg.mode = NumericMode::approx(512);
  auto seq = run<Real>(cfg);
  auto tail = CoefficientTail<Real>::from_sequence(seq);
  PadeReport report;
  for (int k = m == 0 ? 0 : 1; k <= m; ++k) {
    const Table2Row* expected = compare_published ? PaperConstants::table2_row(k) : nullptr;
    report.lines.push_back(pade_line(tail, k, std::to_string(k), reference_slope, expected, false, report.rows));
  }
  return report;
}

std::vector<ReportRow> table1_error_column(long double reference_slope) {
  std::vector<ReportRow> rows;
  for (const auto& r : PaperConstants::table1())
    rows.push_back(ReportRow::compare("table1 N=" + std::to_string(r.n) + " printed-slope err_pct",
                                      error_percent(r.slope, static_cast<double>(reference_slope)), r.err_pct,
                                      kErrPctTolerance));
  return rows;
}

Table1Report reproduce_table1(const ReproduceOptions& opts, long double reference_slope) {
  const int top = opts.max_order / 10 * 10;
  if (top < 10) throw ConfigError("table1 needs max-order >= 10");
  const int prec = effective_precision(opts, top);
  Table1Report report;

  std::vector<HamConfig> configs = {make_config(present_basis(), opts.table1_h, top, prec),
                                    make_config(liao_basis(), opts.liao_h, top, prec)};
  std::vector<std::optional<ApproxSequence>> seqs(2);
  parallel_for(2, opts.threads, [&](std::size_t i) { seqs[i] = run<Real>(configs[i]); });

  const Real ref(reference_slope, prec);
  for (int pass = 0; pass < 2; ++pass) {
    const bool liao = pass == 1;
    const auto& seq = *seqs[static_cast<std::size_t>(pass)];
    for (int n = 10; n <= top; n += 10) {
      const Table1Row* row = PaperConstants::table1_row(n);
      Table1Line line{(liao ? "L" : "") + std::to_string(n),
                      seq.partial_slope(n),
                      std::nullopt,
                      Real(prec),
                      std::nullopt,
                      seq.partial_curvature(n),
                      std::nullopt,
                      Verdict::Informational};
      line.err_pct = error_percent(line.slope, ref);
      if (row) {
        line.expected = liao ? row->slope_liao : row->slope;
        line.expected_curv = liao ? row->curvature_liao : row->curvature;
        if (!liao) line.expected_err = row->err_pct;
      }
      const std::string tag = "table1 N=" + line.n_label;
      auto slope_row = ReportRow::compare(tag + " slope", line.slope.to_double(), line.expected, kSlopeTolerance, liao);
      auto err_row = ReportRow::compare(tag + " err_pct", line.err_pct.to_double(), line.expected_err, kErrPctTolerance,
                                        liao);
      const double curv_tol = row ? 100 * row->curvature_unit : 0.0;
      auto curv_row = ReportRow::compare(tag + " curvature", line.curvature.to_double(), line.expected_curv,
                                         curv_tol, liao);
      line.verdict = row && !liao ? combine({slope_row.verdict, err_row.verdict, curv_row.verdict})
                                  : Verdict::Informational;
      report.rows.push_back(std::move(slope_row));
      report.rows.push_back(std::move(err_row));
      report.rows.push_back(std::move(curv_row));
      report.lines.push_back(std::move(line));
    }
    if (!liao && seq.precision_exhausted())
      report.rows.push_back({"table1 precision exhausted at " + std::to_string(prec) + " bits", 1.0, 0.0, 0.0, 1.0,
                             Verdict::Mismatch});
  }
  return report;
}

PadeReport reproduce_table2(const ReproduceOptions& opts, long double reference_slope) {
  const int top = opts.max_m / 10 * 10;
  if (top < 10) throw ConfigError("table2 needs max-m >= 10");
  const int prec = effective_precision(opts, 2 * top);
  std::vector<HamConfig> configs = {make_config(present_basis(), opts.table2_h, 2 * top, prec),
                                    make_config(liao_basis(), opts.liao_h, 2 * top, prec)};
  std::vector<std::optional<ApproxSequence>> seqs(2);
  parallel_for(2, opts.threads, [&](std::size_t i) { seqs[i] = run<Real>(configs[i]); });

  PadeReport report;
  for (int pass = 0; pass < 2; ++pass) {
    const bool liao = pass == 1;
    auto tail = CoefficientTail<Real>::from_sequence(*seqs[static_cast<std::size_t>(pass)]);
    for (int m = 10; m <= top; m += 10)
      report.lines.push_back(pade_line(tail, m, (liao ? "L" : "") + std::to_string(m), reference_slope,
                                       PaperConstants::table2_row(m), liao, report.rows));
  }
  return report;
}

SolutionReport reproduce_figure1(const ReproduceOptions& opts, const ShootingResult& reference) {
  const int prec = effective_precision(opts, opts.figure_order);
  auto seq = run<Real>(make_config(present_basis(), opts.figure_h, opts.figure_order, prec));
  auto sum = partial_sum(seq, opts.figure_order);
  const NumericMode mode = NumericMode::approx(prec);

  std::vector<long double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.5L * i);
  auto ref = sample_states(reference, grid);

  SolutionReport report;
  double worst = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Real u = series_eval(sum, Real(grid[i], prec), mode);
    const double diff = std::fabs(u.to_double() - static_cast<double>(ref[i].u));
    worst = std::max(worst, diff);
    report.lines.push_back({static_cast<double>(grid[i]), std::move(u), ref[i].u, diff});
  }
  report.rows.push_back(ReportRow::compare("figure1 max |u_ham - u_ref| on [0,10]", worst, 0.0, kFigureTolerance));

  std::vector<Real> probe;
  for (int x : {1, 2, 5}) probe.emplace_back(x, prec);
  auto residual = original_residual(sum, probe);
  for (std::size_t i = 0; i < probe.size(); ++i)
    report.rows.push_back(ReportRow::compare("figure1 residual u''-sqrt(u^3/x) at x=" + probe[i].to_string(3),
                                             std::fabs(residual[i].to_double()), 0.0, 1e-2));
  return report;
}

HCurveReport reproduce_hcurves(const ReproduceOptions& opts) {
  const int prec = effective_precision(opts, opts.hcurve_order);
  const NumericMode mode = NumericMode::approx(prec);
  HCurveReport report;
  report.present = hcurve(present_basis(), opts.hcurve_min, opts.hcurve_max, opts.hcurve_samples, opts.hcurve_order,
                          mode, opts.threads);
  report.liao = hcurve(liao_basis(), opts.hcurve_min, opts.hcurve_max, opts.hcurve_samples, opts.hcurve_order, mode,
                       opts.threads);

  auto probe = [&](const BasisParams& b, const Rational& h) {
    return run<Real>(make_config(b, h, opts.hcurve_order, prec)).partial_slope(opts.hcurve_order).to_double();
  };
  const double present_gap = std::fabs(probe(present_basis(), Rational(-4, 5)) - probe(present_basis(), Rational(-1, 2)));
  const double liao_gap = std::fabs(probe(liao_basis(), Rational(-4, 5)) - probe(liao_basis(), Rational(-1, 2)));
  report.rows.push_back(ReportRow::compare("hcurve alpha=3/4 |slope(-0.8)-slope(-0.5)|", present_gap, 0.0,
                                           kPlateauTolerance));
  ReportRow departure{"hcurve alpha=1 |slope(-0.8)-slope(-0.5)| > 0.1", liao_gap, kDepartureThreshold, std::nullopt,
                      std::fabs(liao_gap - kDepartureThreshold),
                      std::isfinite(liao_gap) && liao_gap > kDepartureThreshold ? Verdict::Match : Verdict::Mismatch};
  report.rows.push_back(std::move(departure));
  return report;
}

std::string render_decimal(long double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.19Lg", v);
  return buf;
}

void write_csv(std::ostream& os, const std::vector<HCurvePoint>& points) {
  os << "h,slope,curvature\n";
  for (const auto& p : points) os << to_string(p.h) << ',' << p.slope.to_string() << ',' << p.curvature.to_string() << '\n';
}

void write_csv(std::ostream& os, const std::vector<Table1Line>& lines) {
  os << "N,slope,expected,err_pct,expected_err,curvature,expected_curv,verdict\n";
  for (const auto& l : lines)
    os << l.n_label << ',' << l.slope.to_string() << ',' << opt_decimal(l.expected) << ',' << l.err_pct.to_string()
       << ',' << opt_decimal(l.expected_err) << ',' << l.curvature.to_string() << ',' << opt_decimal(l.expected_curv)
       << ',' << to_string(l.verdict) << '\n';
}

void write_csv(std::ostream& os, const std::vector<PadeLine>& lines) {
  os << "m,value,expected,err_pct,method,verdict\n";
  for (const auto& l : lines)
    os << l.m_label << ',' << (l.value ? l.value->to_string() : "") << ',' << opt_decimal(l.expected) << ','
       << (l.err_pct ? l.err_pct->to_string() : "") << ',' << l.method << ',' << to_string(l.verdict) << '\n';
}

void write_csv(std::ostream& os, const std::vector<SolutionLine>& lines) {
  os << "x,u_ham,u_ref,abs_diff\n";
  for (const auto& l : lines)
    os << fmt_double(l.x) << ',' << l.u_ham.to_string() << ',' << render_decimal(l.u_ref) << ','
       << fmt_double(l.abs_diff) << '\n';
}

void write_csv(std::ostream& os, const std::vector<ReportRow>& rows) {
  os << "label,computed,expected,abs_diff,tolerance,verdict\n";
  for (const auto& r : rows)
    os << '"' << r.label << "\"," << fmt_double(r.computed) << ',' << opt_decimal(r.expected) << ','
       << fmt_double(r.abs_diff) << ',' << opt_decimal(r.tolerance) << ',' << to_string(r.verdict) << '\n';
}

nlohmann::json to_json(const std::vector<ReportRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j = {{"label", r.label}, {"computed", fmt_double(r.computed)}, {"abs_diff", fmt_double(r.abs_diff)},
                        {"verdict", to_string(r.verdict)}};
    j["expected"] = r.expected ? nlohmann::json(opt_decimal(r.expected)) : nlohmann::json(nullptr);
    j["tolerance"] = r.tolerance ? nlohmann::json(opt_decimal(r.tolerance)) : nlohmann::json(nullptr);
    out.push_back(std::move(j));
  }
  return out;
}

nlohmann::json to_json(const ShootingResult& result) {
  return {{"slope", render_decimal(result.slope)},
          {"iterations", result.iterations},
          {"ode_tol", render_decimal(result.config.ode_tol)},
          {"bracket_tol", render_decimal(result.config.bracket_tol)},
          {"bracket", {render_decimal(result.bracket_lo), render_decimal(result.bracket_hi)}}};
}

} // namespace tfham
