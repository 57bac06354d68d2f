#include "pinnet/markov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pinnet/errors.hpp"

namespace pinnet {

EmbeddedChain make_embedded_chain(const Matrix& p) {
  if (!p.square()) throw ValidationError("embedded chain: matrix not square");
  if (p.rows < 2)
    throw ValidationError("embedded chain: needs at least two states");
  if (!all_finite(p)) throw ValidationError("embedded chain: non-finite entry");
  for (std::size_t i = 0; i < p.rows; ++i) {
    if (p(i, i) != 0.0)
      throw ValidationError("embedded chain: nonzero diagonal at state " +
                            std::to_string(i + 1));
    double sum = 0.0;
    for (std::size_t j = 0; j < p.cols; ++j) {
      if (p(i, j) < 0.0 || p(i, j) > 1.0)
        throw ValidationError("embedded chain: entry out of [0,1] at row " +
                              std::to_string(i + 1));
      sum += p(i, j);
    }
    if (std::fabs(sum - 1.0) > 1e-12)
      throw ValidationError("embedded chain: row " + std::to_string(i + 1) +
                            " sums to " + std::to_string(sum));
  }
  return EmbeddedChain{p};
}

std::vector<double> MarkovGenerator::rates() const {
  std::vector<double> q(Q.rows);
  for (std::size_t i = 0; i < Q.rows; ++i) q[i] = -Q(i, i);
  return q;
}

EmbeddedChain MarkovGenerator::embedded() const {
  Matrix p(Q.rows, Q.cols);
  for (std::size_t i = 0; i < Q.rows; ++i) {
    double qi = -Q(i, i);
    for (std::size_t j = 0; j < Q.cols; ++j)
      if (i != j) p(i, j) = Q(i, j) / qi;
  }
  return make_embedded_chain(p);
}

MarkovGenerator assemble_generator(const EmbeddedChain& p,
                                   const std::vector<double>& q) {
  const std::size_t n = p.states();
  if (q.size() != n)
    throw ValidationError("assemble_generator: rate vector length " +
                          std::to_string(q.size()) + ", expected " +
                          std::to_string(n));
  for (std::size_t i = 0; i < n; ++i)
    if (!(q[i] > 0.0) || !std::isfinite(q[i]))
      throw ValidationError("assemble_generator: rate for state " +
                            std::to_string(i + 1) + " must be positive");
  Matrix gen(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      gen(i, j) = q[i] * p.P(i, j);
      off += gen(i, j);
    }
    gen(i, i) = -off;  // exact zero row sum by construction
  }
  return MarkovGenerator{gen};
}

MarkovGenerator make_generator(const Matrix& q) {
  if (!q.square()) throw ValidationError("generator: matrix not square");
  if (!all_finite(q)) throw ValidationError("generator: non-finite entry");
  double scale = std::max(1.0, max_abs(q));
  for (std::size_t i = 0; i < q.rows; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < q.cols; ++j) {
      if (i != j && q(i, j) < 0.0)
        throw ValidationError("generator: negative off-diagonal rate at row " +
                              std::to_string(i + 1));
      sum += q(i, j);
    }
    if (std::fabs(sum) > 1e-12 * scale)
      throw ValidationError("generator: row " + std::to_string(i + 1) +
                            " sums to " + std::to_string(sum));
    if (!(-q(i, i) > 0.0))
      throw ValidationError("generator: state " + std::to_string(i + 1) +
                            " has no leave rate");
  }
  return MarkovGenerator{q};
}

namespace {

// Strong connectivity of the support of a stochastic matrix.
bool support_irreducible(const Matrix& p) {
  const std::size_t n = p.rows;
  auto reach = [&](bool rev) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t cnt = 1;
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n; ++v) {
        if (seen[v]) continue;
        double w = rev ? p(v, u) : p(u, v);
        if (w > 0.0) {
          seen[v] = 1;
          ++cnt;
          stack.push_back(v);
        }
      }
    }
    return cnt;
  };
  return reach(false) == n && reach(true) == n;
}

// Period of an irreducible chain: gcd over all support edges (u,v) of
// depth(u) + 1 − depth(v) with depths from a BFS tree.
std::size_t chain_period(const Matrix& p) {
  const std::size_t n = p.rows;
  std::vector<long long> depth(n, -1);
  std::vector<std::size_t> queue{0};
  depth[0] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    std::size_t u = queue[head];
    for (std::size_t v = 0; v < n; ++v)
      if (p(u, v) > 0.0 && depth[v] < 0) {
        depth[v] = depth[u] + 1;
        queue.push_back(v);
      }
  }
  long long g = 0;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v)
      if (p(u, v) > 0.0) g = std::gcd(g, depth[u] + 1 - depth[v]);
  return static_cast<std::size_t>(g < 0 ? -g : g);
}

}  // namespace

InvariantDistribution invariant_distribution(const MarkovGenerator& gen) {
  const std::size_t n = gen.states();
  EmbeddedChain emb = gen.embedded();
  if (!support_irreducible(emb.P))
    throw ConnectivityError(
        "invariant_distribution: embedded chain is reducible");

  // barπ solves barπᵀ(P − I) = 0; the null-space route works for periodic
  // chains too, where power iteration on P would not converge.  P − I has
  // the Metzler zero-row-sum shape, so the Perron solver applies directly.
  std::vector<double> bar_pi =
      perron_left_vector(emb.P - Matrix::identity(n));

  std::vector<double> q = gen.rates();
  std::vector<double> pi(n);
  double denom = 0.0;
  for (std::size_t i = 0; i < n; ++i) denom += bar_pi[i] / q[i];
  for (std::size_t i = 0; i < n; ++i) pi[i] = (bar_pi[i] / q[i]) / denom;

  double residual = max_abs(transpose(gen.Q) * pi);
  double max_rate = max_abs(gen.Q);
  if (residual > 1e-9 * std::max(1.0, max_rate))
    throw NumericError("invariant_distribution: residual " +
                       std::to_string(residual));

  InvariantDistribution out;
  out.pi = std::move(pi);
  out.bar_pi = std::move(bar_pi);
  out.embedded_primitive = chain_period(emb.P) == 1;
  return out;
}

SwitchPath sample_path(const MarkovGenerator& gen, std::size_t initial_state,
                       double horizon, Rng& rng) {
  if (!(horizon > 0.0))
    throw ValidationError("sample_path: horizon must be positive");
  const std::size_t n = gen.states();
  if (initial_state >= n)
    throw ValidationError("sample_path: initial state out of range");

  EmbeddedChain emb = gen.embedded();
  std::vector<double> q = gen.rates();

  SwitchPath path;
  path.horizon = horizon;
  std::size_t state = initial_state;
  double t = 0.0;
  path.entries.push_back({0.0, state});
  while (true) {
    double dwell = rng.exponential(q[state]);
    while (!(dwell > 0.0)) dwell = rng.exponential(q[state]);
    t += dwell;
    if (t >= horizon) break;
    state = rng.categorical(&emb.P.a[state * n], n);
    path.entries.push_back({t, state});
  }
  return path;
}

SwitchPath sample_path(const MarkovGenerator& gen,
                       const std::vector<double>& initial, double horizon,
                       Rng& rng) {
  if (initial.size() != gen.states())
    throw ValidationError("sample_path: initial distribution length mismatch");
  std::size_t s = rng.categorical(initial.data(), initial.size());
  return sample_path(gen, s, horizon, rng);
}

std::vector<double> kstep_distribution(const EmbeddedChain& p,
                                       const std::vector<double>& pi0,
                                       std::size_t k) {
  if (pi0.size() != p.states())
    throw ValidationError("kstep_distribution: distribution length mismatch");
  std::vector<double> v = pi0;
  const std::size_t n = p.states();
  for (std::size_t step = 0; step < k; ++step) {
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (v[i] == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) w[j] += v[i] * p.P(i, j);
    }
    v = std::move(w);
  }
  return v;
}

std::string switch_path_csv(const SwitchPath& path) {
  std::ostringstream os;
  os.precision(17);
  os << "entry_time,state\n";
  for (const auto& e : path.entries)
    os << e.entry_time << "," << e.state + 1 << "\n";
  return os.str();
}

SwitchPath parse_switch_path_csv(const std::string& text, double horizon) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != "entry_time,state")
    throw ValidationError("switch path csv: missing header");
  SwitchPath path;
  path.horizon = horizon;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw ValidationError("switch path csv: malformed line " +
                            std::to_string(lineno));
    double t = std::stod(line.substr(0, comma));
    long s = std::stol(line.substr(comma + 1));
    if (s < 1) throw ValidationError("switch path csv: state must be >= 1");
    if (!path.entries.empty() && t <= path.entries.back().entry_time)
      throw ValidationError("switch path csv: entry times must increase");
    path.entries.push_back({t, static_cast<std::size_t>(s - 1)});
  }
  if (path.entries.empty() || path.entries.front().entry_time != 0.0)
    throw ValidationError("switch path csv: first entry must start at 0");
  return path;
}

}  // namespace pinnet
