#include "pinnet/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "pinnet/errors.hpp"
#include "pinnet/io.hpp"

namespace pinnet {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] void bad_key(const std::string& section, const std::string& key,
                          const std::string& why) {
  throw ValidationError("config [" + section + "] " + key + ": " + why);
}

const std::string& need(const ConfigSection& sec, const std::string& key) {
  const std::string* v = sec.find(key);
  if (!v) bad_key(sec.name, key, "missing");
  return *v;
}

std::uint64_t parse_u64(const std::string& value) {
  const std::string v = trim(value);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw ValidationError("not an unsigned integer: '" + value + "'");
  return out;
}

std::size_t parse_size(const std::string& value) {
  return static_cast<std::size_t>(parse_u64(value));
}

}  // namespace

const std::string* ConfigSection::find(const std::string& key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return &v;
  return nullptr;
}

const ConfigSection* ConfigFile::find(const std::string& name) const {
  for (const ConfigSection& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

ConfigFile ConfigFile::parse(const std::string& text, const std::string& dir) {
  ConfigFile file;
  file.dir = dir;
  std::istringstream is(text);
  std::string raw;
  std::size_t lineno = 0;
  ConfigSection* cur = nullptr;
  while (std::getline(is, raw)) {
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ValidationError("config line " + std::to_string(lineno) +
                              ": unterminated section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty())
        throw ValidationError("config line " + std::to_string(lineno) +
                              ": empty section name");
      if (file.find(name))
        throw ValidationError("config line " + std::to_string(lineno) +
                              ": duplicate section [" + name + "]");
      file.sections.push_back({name, {}});
      cur = &file.sections.back();
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(lineno) +
                            ": expected key = value");
    if (!cur)
      throw ValidationError("config line " + std::to_string(lineno) +
                            ": entry outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ValidationError("config line " + std::to_string(lineno) +
                            ": empty key");
    if (cur->find(key))
      throw ValidationError("config line " + std::to_string(lineno) +
                            ": duplicate key '" + key + "' in [" + cur->name +
                            "]");
    cur->entries.emplace_back(key, value);
  }
  return file;
}

ConfigFile ConfigFile::load(const std::string& path) {
  const std::string text = read_file(path);
  return parse(text, std::filesystem::path(path).parent_path().string());
}

std::string ConfigFile::serialize() const {
  std::ostringstream os;
  bool first = true;
  for (const ConfigSection& s : sections) {
    if (!first) os << '\n';
    first = false;
    os << '[' << s.name << "]\n";
    for (const auto& [k, v] : s.entries) os << k << " = " << v << '\n';
  }
  return os.str();
}

double parse_double(const std::string& value) {
  const std::string v = trim(value);
  if (v.empty()) throw ValidationError("empty number");
  const char* begin = v.c_str();
  char* end = nullptr;
  const double out = std::strtod(begin, &end);
  if (end != begin + v.size())
    throw ValidationError("not a number: '" + value + "'");
  return out;
}

std::vector<double> parse_vector(const std::string& value) {
  std::vector<double> out;
  for (const std::string& tok : split_ws(value)) out.push_back(parse_double(tok));
  if (out.empty()) throw ValidationError("empty vector value");
  return out;
}

Matrix parse_matrix(const std::string& value, const std::string& dir) {
  std::string body = trim(value);
  std::vector<std::string> rows;
  if (body.rfind("file:", 0) == 0) {
    const std::string rel = trim(body.substr(5));
    if (rel.empty()) throw ValidationError("empty matrix file reference");
    const std::filesystem::path p =
        dir.empty() ? std::filesystem::path(rel)
                    : std::filesystem::path(dir) / rel;
    std::istringstream is(read_file(p.string()));
    std::string line;
    while (std::getline(is, line)) {
      line = trim(line);
      if (!line.empty() && line[0] != '#') rows.push_back(line);
    }
  } else {
    std::size_t start = 0;
    while (start <= body.size()) {
      const std::size_t semi = body.find(';', start);
      const std::string row =
          trim(semi == std::string::npos ? body.substr(start)
                                         : body.substr(start, semi - start));
      if (!row.empty()) rows.push_back(row);
      if (semi == std::string::npos) break;
      start = semi + 1;
    }
  }
  if (rows.empty()) throw ValidationError("empty matrix value");
  std::vector<std::vector<double>> data;
  for (const std::string& row : rows) data.push_back(parse_vector(row));
  const std::size_t cols = data.front().size();
  for (const auto& row : data)
    if (row.size() != cols)
      throw ValidationError("matrix rows have unequal lengths");
  Matrix m(data.size(), cols);
  for (std::size_t i = 0; i < data.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = data[i][j];
  return m;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw NumericError("cannot format number");
  return std::string(buf, ptr);
}

std::string format_vector(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v[i]);
  }
  return out;
}

std::string format_matrix(const Matrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows; ++i) {
    if (i) out += "; ";
    for (std::size_t j = 0; j < m.cols; ++j) {
      if (j) out += ' ';
      out += format_double(m(i, j));
    }
  }
  return out;
}

ExperimentConfig parse_experiment(const ConfigFile& file) {
  ExperimentConfig cfg;
  const ConfigSection* exp = file.find("experiment");
  if (!exp) throw ValidationError("config: missing [experiment] section");
  {
    const std::string kind = need(*exp, "kind");
    if (kind == "slow-switching")
      cfg.kind = ExperimentKind::SlowSwitching;
    else if (kind == "mobile-spatial")
      cfg.kind = ExperimentKind::MobileSpatial;
    else if (kind == "custom")
      cfg.kind = ExperimentKind::Custom;
    else
      bad_key("experiment", "kind", "unknown kind '" + kind + "'");
    if (const std::string* v = exp->find("seed")) cfg.seed = parse_u64(*v);
    if (const std::string* v = exp->find("out")) cfg.out_dir = *v;
    if (const std::string* v = exp->find("runs")) cfg.runs = parse_size(*v);
    if (const std::string* v = exp->find("h")) cfg.h = parse_double(*v);
    if (const std::string* v = exp->find("horizon"))
      cfg.horizon = parse_double(*v);
  }

  const ConfigSection* dyn = file.find("dynamics");
  if (!dyn) throw ValidationError("config: missing [dynamics] section");
  cfg.D = parse_matrix(need(*dyn, "d"), file.dir);
  cfg.T = parse_matrix(need(*dyn, "t"), file.dir);
  cfg.G = parse_matrix(need(*dyn, "g"), file.dir);
  cfg.Gamma = parse_matrix(need(*dyn, "gamma"), file.dir);
  cfg.alpha = parse_double(need(*dyn, "alpha"));
  cfg.beta = parse_double(need(*dyn, "beta"));
  if (const std::string* v = dyn->find("lf")) cfg.lf = parse_double(*v);

  const ConfigSection* cp = file.find("coupling");
  if (!cp) throw ValidationError("config: missing [coupling] section");
  cfg.coupling.kappa = parse_double(need(*cp, "kappa"));
  cfg.coupling.epsilon = parse_double(need(*cp, "epsilon"));

  if (const ConfigSection* chain = file.find("chain")) {
    cfg.embedded = parse_matrix(need(*chain, "embedded"), file.dir);
    const std::string* qv = chain->find("q");
    const std::string* qr = chain->find("q_range");
    if (!!qv == !!qr)
      throw ValidationError("config [chain]: exactly one of q, q_range required");
    if (qv) {
      cfg.q = parse_vector(*qv);
    } else {
      const std::vector<double> r = parse_vector(*qr);
      if (r.size() != 2 || !(r[0] < r[1]))
        bad_key("chain", "q_range", "expected two numbers low < high");
      cfg.q_low = r[0];
      cfg.q_high = r[1];
    }
  }

  if (const ConfigSection* topo = file.find("topology")) {
    const std::size_t states = parse_size(need(*topo, "states"));
    if (states == 0) bad_key("topology", "states", "must be positive");
    for (std::size_t i = 1; i <= states; ++i) {
      cfg.L.push_back(parse_matrix(need(*topo, "L" + std::to_string(i)), file.dir));
      const std::vector<double> c =
          parse_vector(need(*topo, "C" + std::to_string(i)));
      cfg.C.push_back(Matrix::diagonal(c));
    }
  }

  if (const ConfigSection* mob = file.find("mobility")) {
    cfg.has_mobility = true;
    MobilityConfig& m = cfg.mobility;
    if (const std::string* v = mob->find("arena"))
      m.arena_side = parse_double(*v);
    if (const std::string* v = mob->find("region")) {
      const std::vector<double> r = parse_vector(*v);
      if (r.size() != 4) bad_key("mobility", "region", "expected x0 y0 x1 y1");
      m.control_region = {r[0], r[1], r[2], r[3]};
    }
    if (const std::string* v = mob->find("r_link")) m.r_link = parse_double(*v);
    if (const std::string* v = mob->find("v_min")) m.v_min = parse_double(*v);
    if (const std::string* v = mob->find("v_max")) m.v_max = parse_double(*v);
    if (const std::string* v = mob->find("w_min")) m.w_min = parse_double(*v);
    if (const std::string* v = mob->find("w_max")) m.w_max = parse_double(*v);
    if (const std::string* v = mob->find("agents")) m.agents = parse_size(*v);
    cfg.p_meet = 0.99;
    cfg.p_region = 0.75;
    if (const std::string* v = mob->find("p_meet")) cfg.p_meet = parse_double(*v);
    if (const std::string* v = mob->find("p_region"))
      cfg.p_region = parse_double(*v);
  }

  if (const ConfigSection* cert = file.find("certificates")) {
    if (const std::string* v = cert->find("weights")) {
      if (*v != "identity" && *v != "perron")
        bad_key("certificates", "weights", "expected identity or perron");
      cfg.weights = *v;
    }
    if (const std::string* v = cert->find("k2")) cfg.k2 = parse_double(*v);
    if (const std::string* v = cert->find("k4")) cfg.k4 = parse_double(*v);
    if (const std::string* v = cert->find("delta"))
      cfg.delta = parse_double(*v);
    if (const std::string* v = cert->find("r_steps"))
      cfg.r_steps = parse_size(*v);
  }
  return cfg;
}

ExperimentConfig load_experiment(const std::string& path) {
  return parse_experiment(ConfigFile::load(path));
}

std::string serialize_experiment(const ExperimentConfig& cfg) {
  ConfigFile file;
  ConfigSection exp{"experiment", {}};
  const char* kind = cfg.kind == ExperimentKind::SlowSwitching ? "slow-switching"
                     : cfg.kind == ExperimentKind::MobileSpatial
                         ? "mobile-spatial"
                         : "custom";
  exp.entries.emplace_back("kind", kind);
  exp.entries.emplace_back("seed", std::to_string(cfg.seed));
  exp.entries.emplace_back("out", cfg.out_dir);
  exp.entries.emplace_back("runs", std::to_string(cfg.runs));
  exp.entries.emplace_back("h", format_double(cfg.h));
  exp.entries.emplace_back("horizon", format_double(cfg.horizon));
  file.sections.push_back(std::move(exp));

  ConfigSection dyn{"dynamics", {}};
  dyn.entries.emplace_back("d", format_matrix(cfg.D));
  dyn.entries.emplace_back("t", format_matrix(cfg.T));
  dyn.entries.emplace_back("g", format_matrix(cfg.G));
  dyn.entries.emplace_back("gamma", format_matrix(cfg.Gamma));
  dyn.entries.emplace_back("alpha", format_double(cfg.alpha));
  dyn.entries.emplace_back("beta", format_double(cfg.beta));
  if (cfg.lf != 0) dyn.entries.emplace_back("lf", format_double(cfg.lf));
  file.sections.push_back(std::move(dyn));

  ConfigSection cp{"coupling", {}};
  cp.entries.emplace_back("kappa", format_double(cfg.coupling.kappa));
  cp.entries.emplace_back("epsilon", format_double(cfg.coupling.epsilon));
  file.sections.push_back(std::move(cp));

  if (cfg.embedded.rows > 0) {
    ConfigSection chain{"chain", {}};
    chain.entries.emplace_back("embedded", format_matrix(cfg.embedded));
    if (!cfg.q.empty())
      chain.entries.emplace_back("q", format_vector(cfg.q));
    else
      chain.entries.emplace_back("q_range",
                                 format_vector({cfg.q_low, cfg.q_high}));
    file.sections.push_back(std::move(chain));
  }

  if (!cfg.L.empty()) {
    ConfigSection topo{"topology", {}};
    topo.entries.emplace_back("states", std::to_string(cfg.L.size()));
    for (std::size_t i = 0; i < cfg.L.size(); ++i) {
      topo.entries.emplace_back("L" + std::to_string(i + 1),
                                format_matrix(cfg.L[i]));
      topo.entries.emplace_back("C" + std::to_string(i + 1),
                                format_vector(cfg.C[i].diag()));
    }
    file.sections.push_back(std::move(topo));
  }

  if (cfg.has_mobility) {
    const MobilityConfig& m = cfg.mobility;
    ConfigSection mob{"mobility", {}};
    mob.entries.emplace_back("arena", format_double(m.arena_side));
    mob.entries.emplace_back(
        "region",
        format_vector({m.control_region.x0, m.control_region.y0,
                       m.control_region.x1, m.control_region.y1}));
    mob.entries.emplace_back("r_link", format_double(m.r_link));
    mob.entries.emplace_back("v_min", format_double(m.v_min));
    mob.entries.emplace_back("v_max", format_double(m.v_max));
    mob.entries.emplace_back("w_min", format_double(m.w_min));
    mob.entries.emplace_back("w_max", format_double(m.w_max));
    mob.entries.emplace_back("agents", std::to_string(m.agents));
    mob.entries.emplace_back("p_meet", format_double(cfg.p_meet));
    mob.entries.emplace_back("p_region", format_double(cfg.p_region));
    file.sections.push_back(std::move(mob));
  }

  if (cfg.weights != "identity" || cfg.k2 != 0 || cfg.k4 != 0 ||
      cfg.delta != 0 || cfg.r_steps != 0) {
    ConfigSection cert{"certificates", {}};
    cert.entries.emplace_back("weights", cfg.weights);
    if (cfg.k2 != 0) cert.entries.emplace_back("k2", format_double(cfg.k2));
    if (cfg.k4 != 0) cert.entries.emplace_back("k4", format_double(cfg.k4));
    if (cfg.delta != 0)
      cert.entries.emplace_back("delta", format_double(cfg.delta));
    if (cfg.r_steps != 0)
      cert.entries.emplace_back("r_steps", std::to_string(cfg.r_steps));
    file.sections.push_back(std::move(cert));
  }
  return file.serialize();
}

DynamicsSpec dynamics_from(const ExperimentConfig& cfg) {
  CnnParams params{cfg.D, cfg.T};
  return cnn_dynamics(params, cfg.Gamma, cfg.G, cfg.alpha, cfg.beta, cfg.lf);
}

}  // namespace pinnet
