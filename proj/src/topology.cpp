#include "domd/topology.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

#include "domd/error.hpp"
#include "domd/parallel.hpp"
#include "domd/rng.hpp"

namespace domd {

namespace {

constexpr double kStochasticTol = 1e-12;
constexpr int kRetryBudget = 1000;

Adjacency empty_graph(std::size_t n) {
  return Adjacency::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), false);
}

void add_edge(Adjacency& a, std::size_t i, std::size_t j) {
  if (i == j) return;
  a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = true;
  a(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = true;
}

std::vector<int> degrees(const Adjacency& a) {
  std::vector<int> deg(static_cast<std::size_t>(a.rows()), 0);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      if (a(i, j)) ++deg[static_cast<std::size_t>(i)];
  return deg;
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error("invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

Adjacency complete_graph(std::size_t n) {
  Adjacency a = empty_graph(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) add_edge(a, i, j);
  return a;
}

Adjacency cycle_graph(std::size_t n) {
  Adjacency a = empty_graph(n);
  if (n == 2) add_edge(a, 0, 1);
  if (n >= 3)
    for (std::size_t i = 0; i < n; ++i) add_edge(a, i, (i + 1) % n);
  return a;
}

// Square torus; each node links to its d/4 nearest nodes along each of the
// four axis directions.
Adjacency grid_graph(std::size_t n, int degree) {
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  if (side * side != n) throw Error("grid topology requires a perfect-square node count, got " + std::to_string(n));
  if (degree <= 0 || degree % 4 != 0)
    throw Error("grid degree must be a positive multiple of 4, got " + std::to_string(degree));
  Adjacency a = empty_graph(n);
  const std::size_t reach = static_cast<std::size_t>(degree / 4);
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) {
      const std::size_t node = r * side + c;
      for (std::size_t step = 1; step <= reach; ++step) {
        add_edge(a, node, r * side + (c + step) % side);
        add_edge(a, node, ((r + step) % side) * side + c);
      }
    }
  }
  return a;
}

Adjacency random_geometric_graph(std::size_t n, double eps, RngStream& rng) {
  if (!(eps > 0.0)) throw Error("random geometric epsilon must be positive");
  if (n == 1) return empty_graph(1);
  const double logn = std::log(static_cast<double>(n));
  const double radius = std::sqrt(std::pow(logn, 1.0 + eps) / static_cast<double>(n));
  for (int attempt = 0; attempt < kRetryBudget; ++attempt) {
    std::vector<double> px(n), py(n);
    for (std::size_t i = 0; i < n; ++i) {
      px[i] = rng.uniform();
      py[i] = rng.uniform();
    }
    Adjacency a = empty_graph(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (std::hypot(px[i] - px[j], py[i] - py[j]) < radius) add_edge(a, i, j);
    if (is_connected(a)) return a;
  }
  std::ostringstream msg;
  msg.precision(17);
  msg << "random geometric graph not connected after " << kRetryBudget << " placements (n = " << n
      << ", radius = " << radius << ")";
  throw Error(msg.str());
}

// Random spanning tree (each node in a shuffled order attaches to an earlier
// one) plus independent extra edges.
Adjacency random_connected_graph(std::size_t n, RngStream& rng) {
  Adjacency a = empty_graph(n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
  for (std::size_t k = 1; k < n; ++k) add_edge(a, order[k], order[rng() % k]);
  const double p = n > 2 ? std::min(1.0, 2.0 * std::log(static_cast<double>(n)) / static_cast<double>(n)) : 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.uniform() < p) add_edge(a, i, j);
  return a;
}

}  // namespace

WeightMatrix WeightMatrix::from_entries(Matrix entries) {
  if (entries.rows() != entries.cols() || entries.rows() == 0) throw Error("weight matrix must be square and non-empty");
  if (!entries.allFinite()) throw Error("weight matrix has non-finite entries");
  if ((entries.array() < 0.0).any()) throw Error("weight matrix has negative entries");
  for (Eigen::Index i = 0; i < entries.rows(); ++i) {
    if (std::abs(entries.row(i).sum() - 1.0) > kStochasticTol)
      throw Error("weight matrix row " + std::to_string(i) + " does not sum to 1");
    if (std::abs(entries.col(i).sum() - 1.0) > kStochasticTol)
      throw Error("weight matrix column " + std::to_string(i) + " does not sum to 1");
  }
  const double s2 = second_singular_value(entries);
  if (!(s2 < 1.0)) throw Error("graph does not mix (sigma2 = 1)");
  return WeightMatrix(std::move(entries), s2);
}

TopologySpec TopologySpec::parse(std::string_view text) {
  TopologySpec spec;
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  auto need_arg = [&](bool wanted) {
    if (wanted == arg.empty() || wanted != (colon != std::string_view::npos))
      throw Error("malformed topology '" + std::string(text) + "'");
  };
  if (head == "complete") {
    need_arg(false);
    spec.kind = Kind::complete;
  } else if (head == "cycle") {
    need_arg(false);
    spec.kind = Kind::cycle;
  } else if (head == "grid") {
    need_arg(true);
    spec.kind = Kind::grid;
    spec.grid_degree = parse_number<int>(arg, "grid degree");
    if (spec.grid_degree <= 0 || spec.grid_degree % 4 != 0)
      throw Error("grid degree must be a positive multiple of 4");
  } else if (head == "rgg") {
    need_arg(true);
    spec.kind = Kind::random_geometric;
    spec.rgg_eps = parse_number<double>(arg, "random geometric epsilon");
    if (!(spec.rgg_eps > 0.0)) throw Error("random geometric epsilon must be positive");
  } else if (head == "pool") {
    need_arg(true);
    spec.kind = Kind::random_pool;
    spec.pool_size = parse_number<int>(arg, "pool size");
    if (spec.pool_size < 1) throw Error("pool size must be at least 1");
  } else {
    throw Error("unknown topology '" + std::string(text) + "'");
  }
  return spec;
}

std::string TopologySpec::to_string() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind) {
    case Kind::complete: out << "complete"; break;
    case Kind::cycle: out << "cycle"; break;
    case Kind::grid: out << "grid:" << grid_degree; break;
    case Kind::random_geometric: out << "rgg:" << rgg_eps; break;
    case Kind::random_pool: out << "pool:" << pool_size; break;
  }
  return out.str();
}

TopologySchedule::TopologySchedule(std::vector<WeightMatrix> pool) : pool_(std::move(pool)) {
  if (pool_.empty()) throw Error("topology pool is empty");
  for (const auto& w : pool_)
    if (w.size() != pool_.front().size()) throw Error("topology pool mixes node counts");
}

const WeightMatrix& TopologySchedule::at(std::int64_t t) const {
  if (t < 1) throw Error("round index must be >= 1, got " + std::to_string(t));
  return pool_[static_cast<std::size_t>((t - 1) % static_cast<std::int64_t>(pool_.size()))];
}

bool is_connected(const Adjacency& adjacency) {
  const auto n = static_cast<std::size_t>(adjacency.rows());
  if (n == 0) return false;
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop();
    for (std::size_t j = 0; j < n; ++j) {
      if (!seen[j] && adjacency(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) {
        seen[j] = true;
        ++reached;
        frontier.push(j);
      }
    }
  }
  return reached == n;
}

WeightMatrix build_weight_matrix(const Adjacency& adjacency, const WeightScheme& scheme) {
  const Eigen::Index n = adjacency.rows();
  if (n == 0 || adjacency.cols() != n) throw Error("adjacency must be square and non-empty");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (adjacency(i, i)) throw Error("adjacency has a self loop at node " + std::to_string(i));
    for (Eigen::Index j = 0; j < n; ++j)
      if (adjacency(i, j) != adjacency(j, i)) throw Error("adjacency is not symmetric");
  }
  if (!is_connected(adjacency)) throw Error("graph not connected");
  if (scheme.kind == WeightScheme::Kind::lazy_uniform && !(scheme.alpha > 0.0 && scheme.alpha < 1.0))
    throw Error("lazy_alpha must lie in (0, 1)");

  const std::vector<int> deg = degrees(adjacency);
  const int max_deg = deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
  Matrix w = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (!adjacency(i, j)) continue;
      double weight = 0.0;
      if (scheme.kind == WeightScheme::Kind::metropolis) {
        weight = 1.0 / (1.0 + std::max(deg[static_cast<std::size_t>(i)], deg[static_cast<std::size_t>(j)]));
      } else {
        weight = (1.0 - scheme.alpha) / max_deg;
      }
      w(i, j) = weight;
      w(j, i) = weight;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) off += w(i, j);
    w(i, i) = 1.0 - off;
  }
  return WeightMatrix::from_entries(std::move(w));
}

TopologySchedule generate_topology(const TopologySpec& spec, std::size_t n, std::uint64_t seed,
                                   const WeightScheme& scheme) {
  if (n < 1) throw Error("node count must be at least 1");
  RngStream rng = derive_stream(seed, topology_stream_index(n));
  std::vector<WeightMatrix> pool;
  switch (spec.kind) {
    case TopologySpec::Kind::complete:
      pool.push_back(build_weight_matrix(complete_graph(n), scheme));
      break;
    case TopologySpec::Kind::cycle:
      pool.push_back(build_weight_matrix(cycle_graph(n), scheme));
      break;
    case TopologySpec::Kind::grid:
      pool.push_back(build_weight_matrix(grid_graph(n, spec.grid_degree), scheme));
      break;
    case TopologySpec::Kind::random_geometric:
      pool.push_back(build_weight_matrix(random_geometric_graph(n, spec.rgg_eps, rng), scheme));
      break;
    case TopologySpec::Kind::random_pool: {
      std::vector<Adjacency> graphs;
      for (int p = 0; p < spec.pool_size; ++p) {
        bool placed = false;
        for (int attempt = 0; attempt < kRetryBudget && !placed; ++attempt) {
          Adjacency a = random_connected_graph(n, rng);
          const bool duplicate =
              std::any_of(graphs.begin(), graphs.end(), [&](const Adjacency& g) { return g == a; });
          if (!duplicate) {
            graphs.push_back(std::move(a));
            placed = true;
          }
        }
        if (!placed)
          throw Error("cannot draw " + std::to_string(spec.pool_size) + " distinct connected graphs on " +
                      std::to_string(n) + " nodes");
      }
      for (const auto& g : graphs) pool.push_back(build_weight_matrix(g, scheme));
      break;
    }
  }
  return TopologySchedule(std::move(pool));
}

double second_singular_value(const Matrix& w) {
  if (w.rows() != w.cols()) throw Error("second_singular_value needs a square matrix");
  if (!w.allFinite()) throw Error("matrix has non-finite entries");
  if (w.rows() < 2) return 0.0;
  Eigen::BDCSVD<Matrix> svd(w);
  return svd.singularValues()(1);
}

int consensus_rounds(std::int64_t t, double sigma2) {
  if (t < 1) throw Error("round index must be >= 1");
  if (!(sigma2 >= 0.0)) throw Error("sigma2 must be nonnegative");
  if (sigma2 >= 1.0) throw Error("graph does not mix (sigma2 >= 1)");
  if (sigma2 == 0.0) return 1;
  double ratio = -2.0 * std::log(static_cast<double>(t)) / std::log(sigma2);
  // The ratio is often an exact integer (t a power of 1/sigma2); do not let
  // last-bit rounding add a consensus step.
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-10 * std::max(1.0, nearest)) ratio = nearest;
  return std::max(1, static_cast<int>(std::ceil(ratio)));
}

NodeVectors consensus_average(const WeightMatrix& w, int k, const NodeVectors& values, int threads) {
  const std::size_t n = w.size();
  if (k < 1) throw Error("consensus step count must be >= 1");
  if (values.size() != n)
    throw Error("consensus expects " + std::to_string(n) + " vectors, got " + std::to_string(values.size()));
  const Eigen::Index d = values.front().size();
  for (const auto& v : values)
    if (v.size() != d) throw Error("consensus vectors have mismatched dimensions");

  NodeVectors current = values;
  NodeVectors next(n, Vector::Zero(d));
  for (int step = 0; step < k; ++step) {
    parallel_for(n, threads, [&](std::size_t i) {
      Vector& out = next[i];
      out.setZero();
      for (std::size_t j = 0; j < n; ++j) {
        const double wij = w(i, j);
        if (wij != 0.0) out.noalias() += wij * current[j];
      }
    });
    std::swap(current, next);
  }
  return current;
}

double mixing_deviation(const WeightMatrix& w, int k) {
  if (k < 1) throw Error("mixing_deviation needs K >= 1");
  const Matrix& base = w.entries();
  Matrix power = base;
  for (int step = 1; step < k; ++step) power = (power * base).eval();
  const double uniform = 1.0 / static_cast<double>(w.size());
  return (power.array() - uniform).abs().rowwise().sum().maxCoeff();
}

}  // namespace domd
