#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nsdarcy/decoupled.hpp"
#include "nsdarcy/forms.hpp"
#include "nsdarcy/linear.hpp"
#include "nsdarcy/mesh.hpp"

namespace nsdarcy {

struct ExperimentConfig {
  std::string algorithm = "coupled";  // coupled, A, B, C, D
  int order = 1;
  std::string schedule = "square:n0=2,levels=2";
  SolverMode solver = SolverMode::Direct;
  double picard_tol = 1e-7;
  int picard_maxit = 50;
  double linear_tol = 1e-9;
  double droptol = 1e-3;
  bool baseline = true;  // also solve the coupled problem on the fine meshes
  std::string out_dir = "nsdarcy-out";
  bool dry_run = false;
  ModelParams params;

  MultilevelOptions options() const;
};

/// "square:n0=2,levels=3", "cube_then_square:n0=2,levels=2" or
/// "pairs:2:6,3:16" (each comma item is one colon-separated schedule).
/// Throws ValidationError("schedule", ...).
ScheduleSpec parse_schedule(const std::string& text);

/// Set one key. Throws ValidationError naming the key.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// key=value lines; '#' starts a comment. Throws ParseError with the line
/// number for malformed or unknown keys and bad values.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

/// Scientific notation with four significant digits, e.g.
/// 8.270E-3.
std::string format_error(double v);
std::string format_rate(double v);

struct TableRow {
  int level = 0;
  std::string h;  // "1/n"
  std::string variable;
  std::string norm;
  double error = 0.0;
  std::optional<double> rate;
};

struct TableArtifact {
  std::string name;
  std::vector<std::string> metadata;  // written as "# ..." lines
  std::vector<TableRow> rows;
};

inline constexpr const char* kCsvHeader = "level,h,variable,norm,error,rate";

/// Rows for the reports in order, errors stored rounded to their printed
/// form. Rates are taken between consecutive reports on distinct meshes.
TableArtifact make_table(const std::string& name, const std::vector<ErrorReport>& reports, bool include_head = true);

void write_csv(const TableArtifact& t, std::ostream& out);
void write_csv(const TableArtifact& t, const std::filesystem::path& path);
TableArtifact read_csv(std::istream& in, const std::string& name = "");
TableArtifact read_csv(const std::filesystem::path& path);
/// Aligned text, one line per level.
std::string format_text(const TableArtifact& t);

/// Relative tolerances: "all=", "energy=", "l2=" and "<var>.<norm>="
/// entries, comma separated. More specific entries win.
struct ToleranceSpec {
  std::optional<double> all;
  std::optional<double> energy;
  std::optional<double> l2;
  std::vector<std::pair<std::string, double>> overrides;  // "u.H1"

  double tolerance(const std::string& variable, const std::string& norm) const;
};

ToleranceSpec parse_tolerance(const std::string& text);

struct DiffRow {
  std::string h;
  std::string variable;
  std::string norm;
  double a = 0.0;
  double b = 0.0;
  double rel = 0.0;
  double tol = 0.0;
  bool pass = true;
};

struct DiffReport {
  std::vector<DiffRow> rows;
  bool pass = true;
  double max_rel = 0.0;
};

/// Compare every row of a with the row of b with the same (h, variable,
/// norm). Throws KeyMismatch for a missing or duplicated key.
DiffReport diff_tables(const TableArtifact& a, const TableArtifact& b, const ToleranceSpec& tol);

struct ExperimentResult {
  std::vector<TableArtifact> tables;
  std::vector<std::filesystem::path> files;
  std::string summary;  // dry run: schedules and dof counts
};

/// Run the configured experiment and write tables, data files and a
/// gnuplot script under cfg.out_dir (nothing is solved or written on a dry
/// run).
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

}  // namespace nsdarcy
