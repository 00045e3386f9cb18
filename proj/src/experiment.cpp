#include "nsdarcy/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "nsdarcy/errors.hpp"

#ifndef NSDARCY_REVISION
#define NSDARCY_REVISION "unknown"
#endif

namespace nsdarcy {

namespace fs = std::filesystem;

MultilevelOptions ExperimentConfig::options() const {
  MultilevelOptions o;
  o.solver.mode = solver;
  o.solver.linear_tol = linear_tol;
  o.solver.droptol = droptol;
  o.coupled.solver = o.solver;
  o.coupled.picard_tol = picard_tol;
  o.coupled.maxit = picard_maxit;
  return o;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

int to_int(const std::string& field, const std::string& v) {
  const std::string t = trim(v);
  char* end = nullptr;
  const long r = std::strtol(t.c_str(), &end, 10);
  if (t.empty() || *end != '\0') throw ValidationError(field, "expected an integer, got '" + v + "'");
  return static_cast<int>(r);
}

double to_double(const std::string& field, const std::string& v) {
  const std::string t = trim(v);
  char* end = nullptr;
  const double r = std::strtod(t.c_str(), &end);
  if (t.empty() || *end != '\0' || !std::isfinite(r))
    throw ValidationError(field, "expected a number, got '" + v + "'");
  return r;
}

double positive(const std::string& field, const std::string& v) {
  const double r = to_double(field, v);
  if (!(r > 0.0)) throw ValidationError(field, "must be positive");
  return r;
}

bool to_bool(const std::string& field, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ValidationError(field, "expected true or false, got '" + v + "'");
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

ScheduleSpec parse_schedule(const std::string& text) {
  const std::string t = trim(text);
  const auto colon = t.find(':');
  const std::string kind = t.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : t.substr(colon + 1);
  ScheduleSpec spec;
  if (kind == "square" || kind == "cube_then_square") {
    spec.kind = kind == "square" ? ScheduleKind::Square : ScheduleKind::CubeThenSquare;
    if (!rest.empty())
      for (const std::string& item : split(rest, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ValidationError("schedule", "expected key=value, got '" + item + "'");
        const std::string k = trim(item.substr(0, eq)), v = item.substr(eq + 1);
        if (k == "n0") spec.n0 = to_int("schedule", v);
        else if (k == "levels") spec.levels = to_int("schedule", v);
        else if (k == "cap") spec.cap = to_int("schedule", v);
        else throw ValidationError("schedule", "unknown parameter '" + k + "'");
      }
    if (spec.n0 < 2) throw ValidationError("schedule", "n0 must be >= 2");
    if (spec.levels < 1) throw ValidationError("schedule", "levels must be >= 1");
  } else if (kind == "pairs") {
    spec.kind = ScheduleKind::PairList;
    if (rest.empty()) throw ValidationError("schedule", "pairs needs at least one list");
    for (const std::string& item : split(rest, ',')) {
      std::vector<int> list;
      for (const std::string& n : split(item, ':')) list.push_back(to_int("schedule", n));
      if (list.size() < 2) throw ValidationError("schedule", "each list needs a coarse and a fine mesh");
      spec.lists.push_back(std::move(list));
    }
  } else {
    throw ValidationError("schedule", "unknown kind '" + kind + "'");
  }
  return spec;
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "algorithm") {
    static const std::set<std::string> ok{"coupled", "A", "B", "C", "D"};
    if (!ok.count(value)) throw ValidationError(key, "expected coupled, A, B, C or D, got '" + value + "'");
    cfg.algorithm = value;
  } else if (key == "order") {
    const int k = to_int(key, value);
    if (k != 1 && k != 2) throw ValidationError(key, "must be 1 or 2");
    cfg.order = k;
  } else if (key == "schedule") {
    make_schedule(parse_schedule(value));
    cfg.schedule = value;
  } else if (key == "solver") {
    if (value == "direct") cfg.solver = SolverMode::Direct;
    else if (value == "iterative") cfg.solver = SolverMode::Iterative;
    else throw ValidationError(key, "expected direct or iterative, got '" + value + "'");
  } else if (key == "picard_tol") {
    cfg.picard_tol = positive(key, value);
  } else if (key == "picard_maxit") {
    cfg.picard_maxit = to_int(key, value);
    if (cfg.picard_maxit < 1) throw ValidationError(key, "must be >= 1");
  } else if (key == "linear_tol") {
    cfg.linear_tol = positive(key, value);
  } else if (key == "droptol") {
    cfg.droptol = to_double(key, value);
    if (cfg.droptol < 0.0) throw ValidationError(key, "must be >= 0");
  } else if (key == "baseline") {
    cfg.baseline = to_bool(key, value);
  } else if (key == "out") {
    if (value.empty()) throw ValidationError(key, "empty path");
    cfg.out_dir = value;
  } else if (key == "dry_run") {
    cfg.dry_run = to_bool(key, value);
  } else if (key == "nu") {
    cfg.params.nu = positive(key, value);
  } else if (key == "rho") {
    cfg.params.rho = positive(key, value);
  } else if (key == "gravity") {
    cfg.params.gravity = positive(key, value);
  } else if (key == "porosity") {
    cfg.params.porosity = positive(key, value);
  } else if (key == "conductivity") {
    cfg.params.conductivity = positive(key, value);
  } else if (key == "alpha_bjs") {
    cfg.params.alpha_bjs = positive(key, value);
  } else {
    throw ValidationError(key, "unknown key");
  }
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected key=value");
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) throw ParseError(lineno, "missing key");
    try {
      apply_setting(cfg, key, body.substr(eq + 1));
    } catch (const ValidationError& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return cfg;
}

ExperimentConfig parse_config_text(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

ExperimentConfig parse_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path.string());
  return parse_config(in);
}

std::string format_error(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3E", v);
  std::string s(buf);
  const auto e = s.find('E');
  std::string mant = s.substr(0, e);
  std::string ex = s.substr(e + 1);
  const bool neg = ex[0] == '-';
  ex = ex.substr(1);
  while (ex.size() > 1 && ex[0] == '0') ex.erase(0, 1);
  return mant + "E" + (neg ? "-" : "") + ex;
}

std::string format_rate(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

namespace {

double rounded(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

std::string h_string(int n) { return "1/" + std::to_string(n); }

}  // namespace

TableArtifact make_table(const std::string& name, const std::vector<ErrorReport>& reports, bool include_head) {
  TableArtifact t;
  t.name = name;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const ErrorReport& r = reports[i];
    const ErrorReport* prev = (i > 0 && reports[i - 1].n != r.n) ? &reports[i - 1] : nullptr;
    for (Variable v : kVariables) {
      if (v == Variable::Phi && !include_head) continue;
      for (Norm nm : {Norm::L2, Norm::H1}) {
        if (v == Variable::P && nm == Norm::H1) continue;
        TableRow row;
        row.level = r.level;
        row.h = h_string(r.n);
        row.variable = to_string(v);
        row.norm = to_string(nm);
        row.error = rounded(format_error(r.get(v, nm)));
        if (prev != nullptr) {
          const double ea = prev->get(v, nm), eb = r.get(v, nm);
          if (ea > 0.0 && eb > 0.0)
            row.rate = rounded(format_rate(std::log(ea / eb) / std::log(prev->h() / r.h())));
        }
        t.rows.push_back(row);
      }
    }
  }
  return t;
}

void write_csv(const TableArtifact& t, std::ostream& out) {
  for (const std::string& m : t.metadata) out << "# " << m << '\n';
  out << kCsvHeader << '\n';
  for (const TableRow& r : t.rows)
    out << r.level << ',' << r.h << ',' << r.variable << ',' << r.norm << ',' << format_error(r.error) << ','
        << (r.rate ? format_rate(*r.rate) : "-") << '\n';
}

void write_csv(const TableArtifact& t, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_csv(t, out);
}

TableArtifact read_csv(std::istream& in, const std::string& name) {
  TableArtifact t;
  t.name = name;
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line[0] == '#') {
      t.metadata.push_back(trim(line.substr(1)));
      continue;
    }
    if (trim(line).empty()) continue;
    if (!header) {
      if (line != kCsvHeader) throw ParseError(lineno, std::string("expected header '") + kCsvHeader + "'");
      header = true;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 6) throw ParseError(lineno, "expected 6 fields, got " + std::to_string(f.size()));
    TableRow r;
    char* end = nullptr;
    r.level = static_cast<int>(std::strtol(f[0].c_str(), &end, 10));
    if (f[0].empty() || *end != '\0') throw ParseError(lineno, "bad level '" + f[0] + "'");
    r.h = f[1];
    r.variable = f[2];
    r.norm = f[3];
    r.error = std::strtod(f[4].c_str(), &end);
    if (f[4].empty() || *end != '\0') throw ParseError(lineno, "bad error value '" + f[4] + "'");
    if (f[5] != "-") {
      r.rate = std::strtod(f[5].c_str(), &end);
      if (f[5].empty() || *end != '\0') throw ParseError(lineno, "bad rate '" + f[5] + "'");
    }
    t.rows.push_back(std::move(r));
  }
  if (!header) throw ParseError(lineno, "missing header");
  return t;
}

TableArtifact read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_csv(in, path.stem().string());
}

std::string format_text(const TableArtifact& t) {
  std::vector<std::string> cols;
  std::vector<std::pair<int, std::string>> keys;
  std::map<std::pair<std::pair<int, std::string>, std::string>, std::string> cell;
  for (const TableRow& r : t.rows) {
    const std::string c = "e_" + r.variable + "_" + r.norm;
    if (std::find(cols.begin(), cols.end(), c) == cols.end()) cols.push_back(c);
    const auto k = std::make_pair(r.level, r.h);
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    cell[{k, c}] = format_error(r.error);
  }
  std::ostringstream os;
  char buf[64];
  os << t.name << '\n';
  std::snprintf(buf, sizeof buf, "%-6s %-8s", "level", "h");
  os << buf;
  for (const auto& c : cols) {
    std::snprintf(buf, sizeof buf, " %10s", c.c_str());
    os << buf;
  }
  os << '\n';
  for (const auto& k : keys) {
    std::snprintf(buf, sizeof buf, "%-6d %-8s", k.first, k.second.c_str());
    os << buf;
    for (const auto& c : cols) {
      const auto it = cell.find({k, c});
      std::snprintf(buf, sizeof buf, " %10s", it == cell.end() ? "" : it->second.c_str());
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

double ToleranceSpec::tolerance(const std::string& variable, const std::string& norm) const {
  for (const auto& [k, v] : overrides)
    if (k == variable + "." + norm) return v;
  const bool is_energy = (variable == "p") ? norm == "L2" : norm == "H1";
  if (is_energy && energy) return *energy;
  if (!is_energy && norm == "L2" && l2) return *l2;
  return all.value_or(0.0);
}

ToleranceSpec parse_tolerance(const std::string& text) {
  ToleranceSpec spec;
  for (const std::string& raw : split(text, ',')) {
    const std::string item = trim(raw);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ValidationError("tol", "expected key=value, got '" + item + "'");
    const std::string k = trim(item.substr(0, eq));
    const double v = to_double("tol", item.substr(eq + 1));
    if (v < 0.0) throw ValidationError("tol", "tolerances must be >= 0");
    if (k == "all") spec.all = v;
    else if (k == "energy") spec.energy = v;
    else if (k == "l2") spec.l2 = v;
    else if (k.find('.') != std::string::npos) spec.overrides.emplace_back(k, v);
    else throw ValidationError("tol", "unknown tolerance key '" + k + "'");
  }
  return spec;
}

DiffReport diff_tables(const TableArtifact& a, const TableArtifact& b, const ToleranceSpec& tol) {
  using Key = std::tuple<std::string, std::string, std::string>;
  auto index = [](const TableArtifact& t) {
    std::map<Key, const TableRow*> m;
    for (const TableRow& r : t.rows)
      if (!m.emplace(Key{r.h, r.variable, r.norm}, &r).second)
        throw KeyMismatch("duplicate row (" + r.h + ", " + r.variable + ", " + r.norm + ") in table '" + t.name + "'");
    return m;
  };
  const auto ia = index(a);
  const auto ib = index(b);
  DiffReport rep;
  for (const TableRow& r : a.rows) {
    const auto it = ib.find(Key{r.h, r.variable, r.norm});
    if (it == ib.end())
      throw KeyMismatch("row (" + r.h + ", " + r.variable + ", " + r.norm + ") missing from table '" + b.name + "'");
    DiffRow d;
    d.h = r.h;
    d.variable = r.variable;
    d.norm = r.norm;
    d.a = r.error;
    d.b = it->second->error;
    d.rel = d.b != 0.0 ? std::abs(d.a - d.b) / std::abs(d.b) : std::abs(d.a - d.b);
    d.tol = tol.tolerance(r.variable, r.norm);
    d.pass = d.rel <= d.tol;
    rep.pass = rep.pass && d.pass;
    rep.max_rel = std::max(rep.max_rel, d.rel);
    rep.rows.push_back(d);
  }
  return rep;
}

namespace {

std::vector<std::string> config_echo(const ExperimentConfig& c) {
  return {"algorithm=" + c.algorithm,
          "order=" + std::to_string(c.order),
          "schedule=" + c.schedule,
          std::string("solver=") + (c.solver == SolverMode::Direct ? "direct" : "iterative"),
          "picard_tol=" + num(c.picard_tol),
          "picard_maxit=" + std::to_string(c.picard_maxit),
          "linear_tol=" + num(c.linear_tol),
          "droptol=" + num(c.droptol),
          "nu=" + num(c.params.nu),
          "rho=" + num(c.params.rho),
          "gravity=" + num(c.params.gravity),
          "porosity=" + num(c.params.porosity),
          "conductivity=" + num(c.params.conductivity),
          "alpha_bjs=" + num(c.params.alpha_bjs)};
}

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

void write_dat(const TableArtifact& t, const std::string& variable, const fs::path& path) {
  std::map<std::string, std::pair<std::string, std::string>> by_h;
  std::vector<std::string> order;
  for (const TableRow& r : t.rows) {
    if (r.variable != variable) continue;
    if (!by_h.count(r.h)) order.push_back(r.h);
    (r.norm == "L2" ? by_h[r.h].first : by_h[r.h].second) = format_error(r.error);
  }
  std::ofstream out(path, std::ios::binary);
  out << "# h " << variable << "_L2 " << variable << "_H1\n";
  for (const std::string& h : order) {
    const double hv = 1.0 / std::stoi(h.substr(2));
    const auto& [l2, h1] = by_h[h];
    out << num(hv) << ' ' << (l2.empty() ? "-" : l2) << ' ' << (h1.empty() ? "-" : h1) << '\n';
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
  if (cfg.order != 1 && cfg.order != 2) throw ValidationError("order", "must be 1 or 2");
  cfg.params.validate();
  const std::vector<MeshSchedule> schedules = make_schedule(parse_schedule(cfg.schedule));
  ExperimentResult res;
  if (cfg.dry_run) {
    std::ostringstream os;
    for (const MeshSchedule& s : schedules) {
      os << "schedule";
      for (int n : s.subdivisions()) os << ' ' << n;
      os << '\n';
      for (int l = 0; l < s.levels(); ++l) {
        const CoupledSpaces sp = make_spaces(build_coupled_mesh(s[l]), cfg.order);
        const int nu = sp.velocity->vector_size(), np = sp.pressure->size(), nh = sp.head->size();
        os << "  level " << l << " n=" << s[l] << " velocity=" << nu << " pressure=" << np << " head=" << nh
           << " total=" << nu + np + nh << '\n';
      }
    }
    res.summary = os.str();
    return res;
  }

  const ManufacturedProblem mms(cfg.params);
  const MultilevelOptions opts = cfg.options();
  const bool coupled_only = cfg.algorithm == "coupled";
  std::vector<ErrorReport> fe, inter, fin;
  std::set<int> done;
  for (const MeshSchedule& s : schedules) {
    if (coupled_only || cfg.baseline)
      for (int l = 1; l < s.levels(); ++l) {
        if (!done.insert(s[l]).second) continue;
        if (log) *log << "coupled solve n=" << s[l] << std::endl;
        auto [state, rep] = solve_coupled(build_coupled_mesh(s[l]), cfg.order, cfg.params, mms, opts.coupled);
        ErrorReport r = error_norms(state, mms);
        r.level = l;
        r.stage = "fe";
        fe.push_back(r);
      }
    if (!coupled_only) {
      if (log) {
        *log << "algorithm " << cfg.algorithm << " on";
        for (int n : s.subdivisions()) *log << ' ' << n;
        *log << std::endl;
      }
      const MultilevelRun run = run_multilevel(parse_algorithm(cfg.algorithm), s, cfg.order, cfg.params, mms, opts);
      for (const ErrorReport& r : level_errors(run, mms, true)) inter.push_back(r);
      for (const ErrorReport& r : level_errors(run, mms, false)) fin.push_back(r);
    }
  }

  std::vector<std::string> meta = config_echo(cfg);
  meta.push_back("timestamp=" + timestamp());
  meta.push_back(std::string("revision=") + NSDARCY_REVISION);
  auto add = [&](const std::string& name, const std::vector<ErrorReport>& reports, bool head) {
    if (reports.empty()) return;
    TableArtifact t = make_table(name, reports, head);
    t.metadata = meta;
    t.metadata.insert(t.metadata.begin(), "table=" + name);
    res.tables.push_back(std::move(t));
  };
  add("fe", fe, true);
  if (!coupled_only) {
    const std::string a = cfg.algorithm;
    add(a + "_intermediate", inter, true);
    add(a + "_final", fin, a != "D");
  }

  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  std::ofstream txt(dir / "table.txt", std::ios::binary);
  std::ofstream gp(dir / "plot.gp", std::ios::binary);
  gp << "set logscale xy\nset format y \"%.0e\"\nset xlabel \"h\"\nset ylabel \"error\"\nset key left top\n"
        "set terminal pngcairo size 800,600\n";
  for (const TableArtifact& t : res.tables) {
    const fs::path csv = dir / (t.name + ".csv");
    write_csv(t, csv);
    res.files.push_back(csv);
    txt << format_text(t) << '\n';
    for (Variable v : kVariables) {
      const std::string var = to_string(v);
      if (std::none_of(t.rows.begin(), t.rows.end(), [&](const TableRow& r) { return r.variable == var; })) continue;
      const std::string dat = t.name + "_" + var + ".dat";
      write_dat(t, var, dir / dat);
      res.files.push_back(dir / dat);
      gp << "set output \"" << t.name << "_" << var << ".png\"\nset title \"" << t.name << ": " << var << "\"\n";
      if (v == Variable::P)
        gp << "plot \"" << dat << "\" using 1:2 with linespoints title \"L2\"\n";
      else
        gp << "plot \"" << dat << "\" using 1:2 with linespoints title \"L2\", \"\" using 1:3 with linespoints title \"H1\"\n";
    }
  }
  res.files.push_back(dir / "table.txt");
  res.files.push_back(dir / "plot.gp");
  return res;
}

}  // namespace nsdarcy
