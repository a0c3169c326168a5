#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "escat/forward.hpp"
#include "escat/geometry.hpp"
#include "escat/inverse.hpp"
#include "escat/medium.hpp"

namespace escat {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Full run configuration as read from the JSON config file.
struct RunConfig {
  ElasticMedium medium{3.88, 2.56, 0.7 * pi};
  IncidentWave wave{WaveKind::S, 0.0};
  ModeFlags mode{1, 0};
  // Target geometry: either a builtin exact sampler or explicit coefficients.
  std::optional<BuiltinShape> shape_name;
  std::optional<Vec2> shape_offset;
  std::optional<StarCurve> shape_curve;
  ReconstructionConfig solver;
  std::optional<StarCurve> initial;
  std::string output_dir = ".";

  std::unique_ptr<ParametricCurve> make_shape() const {
    if (shape_name)
      return builtin_shape(*shape_name, shape_offset.value_or(Vec2::Zero()));
    if (shape_curve) return std::make_unique<StarCurve>(*shape_curve);
    throw ConfigError("config: no shape given");
  }
};

namespace io_detail {

inline void reject_unknown_keys(const nlohmann::json& j, const std::string& where,
                                std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) throw ConfigError("config: unknown key '" + it.key() + "' in " + where);
  }
}

inline double require_number(const nlohmann::json& j, const char* key,
                             const std::string& where) {
  if (!j.contains(key) || !j[key].is_number())
    throw ConfigError("config: missing or non-numeric key '" + std::string(key) +
                      "' in " + where);
  return j[key].get<double>();
}

/// 17 significant digits round-trips binary64 exactly.
inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline StarCurve parse_curve(const nlohmann::json& j, const std::string& where) {
  reject_unknown_keys(j, where, {"c1", "c2", "alpha", "beta"});
  const Vec2 c(require_number(j, "c1", where), require_number(j, "c2", where));
  if (!j.contains("alpha") || !j["alpha"].is_array())
    throw ConfigError("config: '" + where + ".alpha' must be an array");
  std::vector<double> a = j["alpha"].get<std::vector<double>>();
  std::vector<double> b =
      j.contains("beta") ? j["beta"].get<std::vector<double>>() : std::vector<double>{};
  b.resize(a.size() - 1, 0.0);
  Eigen::VectorXd alpha = Eigen::Map<Eigen::VectorXd>(a.data(), a.size());
  Eigen::VectorXd beta = Eigen::Map<Eigen::VectorXd>(b.data(), b.size());
  return StarCurve(c, alpha, beta);
}

inline nlohmann::json curve_json(const StarCurve& c) {
  nlohmann::json j;
  j["c1"] = c.center().x();
  j["c2"] = c.center().y();
  j["alpha"] = std::vector<double>(c.alpha().data(), c.alpha().data() + c.alpha().size());
  j["beta"] = std::vector<double>(c.beta().data(), c.beta().data() + c.beta().size());
  return j;
}

}  // namespace io_detail

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  using io_detail::reject_unknown_keys;
  using io_detail::require_number;
  reject_unknown_keys(j, "root",
                      {"medium", "wave", "mode", "shape", "solver", "initial",
                       "reference_ball", "output_dir"});

  RunConfig cfg;
  if (!j.contains("medium")) throw ConfigError("config: missing 'medium'");
  const auto& jm = j["medium"];
  reject_unknown_keys(jm, "medium", {"lambda", "mu", "omega"});
  try {
    cfg.medium = ElasticMedium(require_number(jm, "lambda", "medium"),
                               require_number(jm, "mu", "medium"),
                               require_number(jm, "omega", "medium"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: medium: ") + e.what());
  }

  if (!j.contains("wave")) throw ConfigError("config: missing 'wave'");
  const auto& jw = j["wave"];
  reject_unknown_keys(jw, "wave", {"kind", "theta"});
  const std::string kind = jw.value("kind", "S");
  if (kind != "P" && kind != "S") throw ConfigError("config: wave.kind must be P or S");
  cfg.wave = IncidentWave(kind == "P" ? WaveKind::P : WaveKind::S,
                          require_number(jw, "theta", "wave"));

  if (j.contains("mode")) {
    const auto& jmode = j["mode"];
    reject_unknown_keys(jmode, "mode", {"a_p", "a_s"});
    try {
      cfg.mode = ModeFlags(jmode.value("a_p", 1), jmode.value("a_s", 0));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: mode: ") + e.what());
    }
  }

  if (j.contains("shape")) {
    const auto& js = j["shape"];
    reject_unknown_keys(js, "shape", {"name", "offset", "curve"});
    if (js.contains("name")) {
      const std::string name = js["name"].get<std::string>();
      if (name == "apple")
        cfg.shape_name = BuiltinShape::apple;
      else if (name == "peanut")
        cfg.shape_name = BuiltinShape::peanut;
      else
        throw ConfigError("config: unknown shape name '" + name + "'");
      if (js.contains("offset"))
        cfg.shape_offset =
            Vec2(js["offset"][0].get<double>(), js["offset"][1].get<double>());
    } else if (js.contains("curve")) {
      cfg.shape_curve = io_detail::parse_curve(js["curve"], "shape.curve");
    } else {
      throw ConfigError("config: shape needs 'name' or 'curve'");
    }
  }

  if (j.contains("solver")) {
    const auto& jsv = j["solver"];
    reject_unknown_keys(jsv, "solver",
                        {"n", "n_bar", "M", "rho", "epsilon", "delta", "max_iters",
                         "seed", "h2_penalty"});
    cfg.solver.n = jsv.value("n", 64);
    cfg.solver.n_bar = jsv.value("n_bar", 32);
    cfg.solver.M = jsv.value("M", 6);
    cfg.solver.rho = jsv.value("rho", 0.9);
    cfg.solver.epsilon = jsv.value("epsilon", 0.01);
    cfg.solver.delta = jsv.value("delta", 0.0);
    cfg.solver.max_iters = jsv.value("max_iters", 100);
    cfg.solver.rng_seed = jsv.value("seed", std::uint64_t{0});
    cfg.solver.h2_penalty = jsv.value("h2_penalty", true);
  }
  cfg.solver.mode = cfg.mode;

  if (j.contains("reference_ball")) {
    const auto& jb = j["reference_ball"];
    reject_unknown_keys(jb, "reference_ball", {"b1", "b2", "R"});
    cfg.solver.reference_ball = CircleBoundary(
        Vec2(require_number(jb, "b1", "reference_ball"),
             require_number(jb, "b2", "reference_ball")),
        require_number(jb, "R", "reference_ball"));
  }

  if (j.contains("initial")) {
    const auto& ji = j["initial"];
    if (ji.contains("radius")) {
      reject_unknown_keys(ji, "initial", {"c1", "c2", "radius"});
      cfg.initial = StarCurve::circle(Vec2(require_number(ji, "c1", "initial"),
                                           require_number(ji, "c2", "initial")),
                                      require_number(ji, "radius", "initial"),
                                      cfg.solver.M);
    } else {
      cfg.initial = io_detail::parse_curve(ji, "initial");
    }
  }

  if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
  try {
    cfg.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: solver: ") + e.what());
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Far-field data files: self-describing header plus decimal records.
// ---------------------------------------------------------------------------

struct DataFileHeader {
  int version = 1;
  bool phaseless = false;
  double lambda = 0.0, mu = 0.0, omega = 0.0;
  std::string wave_kind = "S";
  double theta = 0.0;
  int n_bar = 32;
  double delta = 0.0;
  std::uint64_t seed = 0;
};

inline void write_far_field(std::ostream& out, const DataFileHeader& h,
                            const FarField& ff) {
  using io_detail::fmt;
  out << "# escat far-field v" << h.version << "\n"
      << "# kind: phased\n"
      << "# medium: lambda=" << fmt(h.lambda) << " mu=" << fmt(h.mu)
      << " omega=" << fmt(h.omega) << "\n"
      << "# wave: kind=" << h.wave_kind << " theta=" << fmt(h.theta) << "\n"
      << "# n_bar: " << h.n_bar << "\n"
      << "# noise: delta=" << fmt(h.delta) << " seed=" << h.seed << "\n"
      << "# columns: angle re_phi im_phi re_psi im_psi\n";
  for (int i = 0; i < ff.directions.size(); ++i)
    out << fmt(ff.directions[i]) << " " << fmt(ff.phi_inf[i].real()) << " "
        << fmt(ff.phi_inf[i].imag()) << " " << fmt(ff.psi_inf[i].real()) << " "
        << fmt(ff.psi_inf[i].imag()) << "\n";
}

inline void write_phaseless(std::ostream& out, const DataFileHeader& h,
                            const PhaselessData& d) {
  using io_detail::fmt;
  out << "# escat far-field v" << h.version << "\n"
      << "# kind: phaseless\n"
      << "# medium: lambda=" << fmt(h.lambda) << " mu=" << fmt(h.mu)
      << " omega=" << fmt(h.omega) << "\n"
      << "# wave: kind=" << h.wave_kind << " theta=" << fmt(h.theta) << "\n"
      << "# n_bar: " << h.n_bar << "\n"
      << "# noise: delta=" << fmt(h.delta) << " seed=" << h.seed << "\n"
      << "# columns: angle abs_phi_sq abs_psi_sq\n";
  for (int i = 0; i < d.directions.size(); ++i)
    out << fmt(d.directions[i]) << " " << fmt(d.phi_sq[i]) << " " << fmt(d.psi_sq[i])
        << "\n";
}

struct LoadedData {
  DataFileHeader header;
  std::optional<FarField> phased;
  std::optional<PhaselessData> phaseless;
};

inline LoadedData read_data_file(std::istream& in) {
  LoadedData out;
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string tag;
      hs >> tag;
      auto value_after = [&](const std::string& key) -> std::string {
        const auto pos = line.find(key + "=");
        if (pos == std::string::npos) return {};
        const auto start = pos + key.size() + 1;
        const auto end = line.find(' ', start);
        return line.substr(start, end == std::string::npos ? end : end - start);
      };
      if (tag == "kind:") {
        std::string kind;
        hs >> kind;
        out.header.phaseless = (kind == "phaseless");
      } else if (tag == "medium:") {
        out.header.lambda = std::stod(value_after("lambda"));
        out.header.mu = std::stod(value_after("mu"));
        out.header.omega = std::stod(value_after("omega"));
      } else if (tag == "wave:") {
        out.header.wave_kind = value_after("kind");
        out.header.theta = std::stod(value_after("theta"));
      } else if (tag == "n_bar:") {
        hs >> out.header.n_bar;
      } else if (tag == "noise:") {
        out.header.delta = std::stod(value_after("delta"));
        out.header.seed = std::stoull(value_after("seed"));
      }
      continue;
    }
    std::istringstream rs(line);
    std::vector<double> row;
    double v;
    while (rs >> v) row.push_back(v);
    if (!row.empty()) rows.push_back(row);
  }
  const int N = static_cast<int>(rows.size());
  if (N == 0) throw std::runtime_error("data file: no records");
  if (out.header.phaseless) {
    PhaselessData d;
    d.directions.resize(N);
    d.phi_sq.resize(N);
    d.psi_sq.resize(N);
    for (int i = 0; i < N; ++i) {
      if (rows[i].size() != 3) throw std::runtime_error("data file: bad phaseless record");
      d.directions[i] = rows[i][0];
      d.phi_sq[i] = rows[i][1];
      d.psi_sq[i] = rows[i][2];
    }
    out.phaseless = std::move(d);
  } else {
    FarField ff;
    ff.directions.resize(N);
    ff.phi_inf.resize(N);
    ff.psi_inf.resize(N);
    for (int i = 0; i < N; ++i) {
      if (rows[i].size() != 5) throw std::runtime_error("data file: bad phased record");
      ff.directions[i] = rows[i][0];
      ff.phi_inf[i] = Complex(rows[i][1], rows[i][2]);
      ff.psi_inf[i] = Complex(rows[i][3], rows[i][4]);
    }
    out.phased = std::move(ff);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trace and curve exports.
// ---------------------------------------------------------------------------

inline void write_trace_csv(std::ostream& out, const IterationTrace& trace) {
  using io_detail::fmt;
  if (trace.records.empty()) return;
  const int M = trace.records.front().curve.truncation();
  out << "k,E,Err,lambda,c1,c2";
  for (int m = 0; m <= M; ++m) out << ",alpha" << m;
  for (int m = 1; m <= M; ++m) out << ",beta" << m;
  out << "\n";
  for (std::size_t k = 0; k < trace.records.size(); ++k) {
    const auto& r = trace.records[k];
    out << k << "," << fmt(r.E) << "," << fmt(r.Err) << "," << fmt(r.lambda) << ","
        << fmt(r.curve.center().x()) << "," << fmt(r.curve.center().y());
    for (int m = 0; m < r.curve.alpha().size(); ++m) out << "," << fmt(r.curve.alpha()[m]);
    for (int m = 0; m < r.curve.beta().size(); ++m) out << "," << fmt(r.curve.beta()[m]);
    out << "\n";
  }
}

/// Curves are exported at a fixed 256 samples regardless of solver resolution.
inline void write_polyline_csv(std::ostream& out, const ParametricCurve& curve,
                               int samples = 256) {
  using io_detail::fmt;
  out << "t,x,y\n";
  for (int j = 0; j < samples; ++j) {
    const double t = 2.0 * pi * j / samples;
    const Vec2 p = curve.point(t);
    out << fmt(t) << "," << fmt(p.x()) << "," << fmt(p.y()) << "\n";
  }
}

}  // namespace escat
