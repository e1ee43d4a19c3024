#pragma once

// Reproduction harness: published reference values, experiment drivers and
// flat-file report writers shared by the command-line tool and the
// acceptance suite.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tfham/ham_engine.hpp"
#include "tfham/reference_solver.hpp"
#include "tfham/series_accel.hpp"

namespace tfham {

struct Table1Row {
  int n;
  double slope;
  double err_pct;
  double slope_liao;
  double curvature;
  double curvature_liao;
  /// Printed resolution of the curvature column (unit in the last digit).
  double curvature_unit;
};

struct Table2Row {
  int m;
  double slope;
  double err_pct;
  double slope_liao;
};

/// Published values, transcribed verbatim.
struct PaperConstants {
  static const std::vector<Table1Row>& table1();
  static const std::vector<Table2Row>& table2();
  static const Table1Row* table1_row(int n);
  static const Table2Row* table2_row(int m);
};

enum class Verdict { Match, Mismatch, Informational, Degenerate };

std::string to_string(Verdict v);

struct ReportRow {
  std::string label;
  double computed = 0;
  std::optional<double> expected;
  std::optional<double> tolerance;
  double abs_diff = 0;
  Verdict verdict = Verdict::Informational;

  /// Match iff |computed - expected| <= tolerance; Informational when either is absent.
  static ReportRow compare(std::string label, double computed, std::optional<double> expected,
                           std::optional<double> tolerance, bool informational = false);
};

/// True when no row is a Mismatch.
bool all_match(const std::vector<ReportRow>& rows);

/// Smallest multiple of 64 bits that keeps about 40 significant bits after
/// the cancellation an order-N run goes through at alpha = 3/4 (roughly six
/// bits per order).
int recommended_precision(int order);

// --- tolerances used by the reproduction targets ---
inline constexpr double kSlopeTolerance = 5e-5;
inline constexpr double kErrPctTolerance = 0.02;
inline constexpr double kPadeTolerance = 2e-4;
inline constexpr double kFigureTolerance = 5e-3;
inline constexpr double kPlateauTolerance = 1e-2;
inline constexpr double kDepartureThreshold = 1e-1;

/// Parameter sets used across the reproduction.
BasisParams present_basis();  // alpha = 3/4, beta = gamma = 1
BasisParams liao_basis();     // alpha = beta = gamma = 1

struct ReproduceOptions {
  int precision = 512;
  bool auto_precision = true; ///< raise precision to recommended_precision(order)
  int max_order = 50;         ///< Table 1 rows N <= max_order
  int max_m = 10;             ///< Table 2 rows m <= max_m
  Rational table1_h{-4, 5};
  Rational table2_h{-3, 4};
  Rational liao_h{-1, 2};
  Rational figure_h{-4, 5};
  int figure_order = 40;
  int hcurve_order = 20;
  Rational hcurve_min{-6, 5};
  Rational hcurve_max{-1, 20};
  int hcurve_samples = 100;
  ShootingConfig shooting;
  unsigned threads = 0; ///< 0: hardware concurrency
};

struct Table1Line {
  std::string n_label; ///< "10", or "L10" for the alpha = beta = gamma = 1 comparison run
  Real slope;
  std::optional<double> expected;
  Real err_pct;
  std::optional<double> expected_err;
  Real curvature;
  std::optional<double> expected_curv;
  Verdict verdict;
};

struct PadeLine {
  std::string m_label;
  std::optional<Real> value; ///< absent when both routes are degenerate
  std::optional<double> expected;
  std::optional<Real> err_pct;
  std::string method;
  Verdict verdict;
};

struct SolutionLine {
  double x;
  Real u_ham;
  long double u_ref;
  double abs_diff;
};

struct HCurvePoint {
  Rational h;
  Real slope;
  Real curvature;
};

struct Table1Report {
  std::vector<Table1Line> lines;
  std::vector<ReportRow> rows;
};
struct PadeReport {
  std::vector<PadeLine> lines;
  std::vector<ReportRow> rows;
};
struct SolutionReport {
  std::vector<SolutionLine> lines;
  std::vector<ReportRow> rows;
};
struct HCurveReport {
  std::vector<HCurvePoint> present;
  std::vector<HCurvePoint> liao;
  std::vector<ReportRow> rows;
};

/// Equally spaced h samples in [h_min, h_max]; one engine run per sample, run
/// concurrently. A single sample uses h_min.
std::vector<HCurvePoint> hcurve(const BasisParams& basis, const Rational& h_min, const Rational& h_max, int samples,
                                int order, const NumericMode& mode, unsigned threads = 0);

/// Pade rows m' = 1..m (just m' = 0 when m = 0) from a run of order 2m.
/// Rows whose degree appears in Table 2 are compared when the basis and h
/// match the published setting.
PadeReport pade_rows(const HamConfig& base, int m, std::optional<long double> reference_slope,
                     bool compare_published);

Table1Report reproduce_table1(const ReproduceOptions& opts, long double reference_slope);
PadeReport reproduce_table2(const ReproduceOptions& opts, long double reference_slope);
SolutionReport reproduce_figure1(const ReproduceOptions& opts, const ShootingResult& reference);
HCurveReport reproduce_hcurves(const ReproduceOptions& opts);

/// Table 1 error column recomputed from the printed slopes and a reference.
std::vector<ReportRow> table1_error_column(long double reference_slope);

// --- writers ---
void write_csv(std::ostream& os, const std::vector<HCurvePoint>& points);
void write_csv(std::ostream& os, const std::vector<Table1Line>& lines);
void write_csv(std::ostream& os, const std::vector<PadeLine>& lines);
void write_csv(std::ostream& os, const std::vector<SolutionLine>& lines);
void write_csv(std::ostream& os, const std::vector<ReportRow>& rows);

nlohmann::json to_json(const std::vector<ReportRow>& rows);
nlohmann::json to_json(const ShootingResult& result);

/// Decimal rendering used in every report: full precision for Real.
std::string render_decimal(long double v);

} // namespace tfham
