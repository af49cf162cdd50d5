#include "pbnet/network.hpp"

#include <cmath>
#include <string>

#include "pbnet/error.hpp"

namespace pbnet {
namespace {

constexpr double kColumnSumTolerance = 1e-12;
constexpr double kPerronStep = 1e-12;
constexpr int kPerronMaxIterations = 100000;
constexpr double kPerronResidual = 1e-10;
constexpr int kMaxGraphAttempts = 1000;

// Iterative DFS that appends vertices to `order` in post-order.
void postOrder(const Adjacency& g, std::size_t start, bool reversed, std::vector<char>& seen,
               std::vector<std::size_t>& order) {
  const std::size_t n = g.size();
  std::vector<std::pair<std::size_t, std::size_t>> stack{{start, 0}};
  seen[start] = 1;
  while (!stack.empty()) {
    auto& [v, next] = stack.back();
    bool descended = false;
    while (next < n) {
      const std::size_t w = next++;
      const bool edge = reversed ? g.hasEdge(w, v) : g.hasEdge(v, w);
      if (edge && !seen[w]) {
        seen[w] = 1;
        stack.emplace_back(w, 0);
        descended = true;
        break;
      }
    }
    if (!descended) {
      order.push_back(v);
      stack.pop_back();
    }
  }
}

}  // namespace

Adjacency::Adjacency(std::size_t agents) : n_(agents), edges_(agents * agents, 0) {}

bool Adjacency::hasEdge(std::size_t from, std::size_t to) const {
  return edges_.at(from * n_ + to) != 0;
}

void Adjacency::setEdge(std::size_t from, std::size_t to, bool present) {
  edges_.at(from * n_ + to) = present ? 1 : 0;
}

std::vector<std::size_t> Adjacency::neighborhood(std::size_t agent) const {
  std::vector<std::size_t> out;
  for (std::size_t l = 0; l < n_; ++l) {
    if (hasEdge(l, agent)) out.push_back(l);
  }
  return out;
}

// Kosaraju: finish order on the graph, then sweep the transpose.
std::size_t Adjacency::stronglyConnectedComponents() const {
  std::vector<char> seen(n_, 0);
  std::vector<std::size_t> order;
  order.reserve(n_);
  for (std::size_t v = 0; v < n_; ++v) {
    if (!seen[v]) postOrder(*this, v, false, seen, order);
  }
  std::fill(seen.begin(), seen.end(), 0);
  std::size_t components = 0;
  std::vector<std::size_t> scratch;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (seen[*it]) continue;
    postOrder(*this, *it, true, seen, scratch);
    ++components;
  }
  return components;
}

Adjacency Adjacency::ring(std::size_t agents) {
  Adjacency g(agents);
  for (std::size_t k = 0; k < agents; ++k) {
    g.setEdge(k, k);
    if (agents > 1) {
      const std::size_t next = (k + 1) % agents;
      g.setEdge(k, next);
      g.setEdge(next, k);
    }
  }
  return g;
}

Adjacency Adjacency::complete(std::size_t agents) {
  Adjacency g(agents);
  for (std::size_t l = 0; l < agents; ++l)
    for (std::size_t k = 0; k < agents; ++k) g.setEdge(l, k);
  return g;
}

Adjacency Adjacency::star(std::size_t agents) {
  Adjacency g(agents);
  for (std::size_t k = 0; k < agents; ++k) {
    g.setEdge(k, k);
    if (k > 0) {
      g.setEdge(0, k);
      g.setEdge(k, 0);
    }
  }
  return g;
}

Adjacency Adjacency::preset(const std::string& name, std::size_t agents) {
  if (agents == 0) throw Error(ErrorKind::Validation, "network.agents: must be at least 1");
  if (name == "ring") return ring(agents);
  if (name == "complete") return complete(agents);
  if (name == "star") return star(agents);
  throw Error(ErrorKind::Validation, "network.preset: unknown preset '" + name + "'");
}

Adjacency generateStronglyConnectedGraph(std::size_t agents, double edgeProbability, Rng& rng) {
  if (agents == 0) throw Error(ErrorKind::Validation, "graph generator: need at least 1 agent");
  if (!(edgeProbability > 0.0 && edgeProbability <= 1.0)) {
    throw Error(ErrorKind::Validation, "graph generator: edgeProbability must lie in (0, 1]");
  }
  for (int attempt = 0; attempt < kMaxGraphAttempts; ++attempt) {
    Adjacency g(agents);
    for (std::size_t l = 0; l < agents; ++l) {
      for (std::size_t k = 0; k < agents; ++k) {
        if (l == k || uniform01(rng) < edgeProbability) g.setEdge(l, k);
      }
    }
    if (g.stronglyConnected()) return g;
  }
  throw Error(ErrorKind::GenerationFailure,
              "no strongly connected graph after 1000 attempts; raise edgeProbability");
}

Eigen::VectorXd perronVector(const Eigen::MatrixXd& combination) {
  const Eigen::Index n = combination.cols();
  if (n == 0 || combination.rows() != n) {
    throw Error(ErrorKind::Validation, "perronVector: matrix must be square and non-empty");
  }
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (int it = 0; it < kPerronMaxIterations; ++it) {
    Eigen::VectorXd next = combination * v;
    next /= next.sum();
    const double step = (next - v).lpNorm<Eigen::Infinity>();
    v = std::move(next);
    if (step < kPerronStep) {
      if ((combination * v - v).lpNorm<Eigen::Infinity>() >= kPerronResidual ||
          v.minCoeff() <= 0.0) {
        break;
      }
      return v;
    }
  }
  throw Error(ErrorKind::NonConvergence, "Perron power iteration did not converge");
}

namespace {

template <typename Term>
double weightedDoubleSum(const Eigen::MatrixXd& a, const Eigen::VectorXd& v, Term term) {
  const Eigen::Index n = a.cols();
  double total = 0.0;
  for (Eigen::Index l = 0; l < n; ++l) {
    double inner = 0.0;
    for (Eigen::Index m = 0; m < n; ++m) {
      if (m == l || a(m, l) == 0.0) continue;
      const double self = a(m, m);
      if (self >= 1.0) {
        throw Error(ErrorKind::DivisionDegeneracy,
                    "agent " + std::to_string(m + 1) + " has self-weight 1 but a nonzero outgoing weight");
      }
      inner += term(a(m, l), self);
    }
    total += v(l) * inner;
  }
  return total;
}

}  // namespace

double alphaConstant(const Eigen::MatrixXd& combination, const Eigen::VectorXd& perron) {
  return weightedDoubleSum(combination, perron,
                           [](double w, double self) { return w / (1.0 - self); });
}

double lemma4WeightSum(const Eigen::MatrixXd& combination, const Eigen::VectorXd& perron) {
  return weightedDoubleSum(combination, perron,
                           [](double w, double self) { return w * self / (1.0 - self); });
}

void Network::validate() const {
  const Eigen::Index n = a_.cols();
  if (n == 0 || a_.rows() != n) {
    throw Error(ErrorKind::Validation, "combination matrix must be square and non-empty");
  }
  if (static_cast<Eigen::Index>(adjacency_.size()) != n) {
    throw Error(ErrorKind::Validation, "combination matrix and adjacency differ in size");
  }
  bool anySelfWeight = false;
  for (Eigen::Index k = 0; k < n; ++k) {
    double column = 0.0;
    for (Eigen::Index l = 0; l < n; ++l) {
      const double w = a_(l, k);
      if (!std::isfinite(w) || w < 0.0) {
        throw Error(ErrorKind::Validation, "combination weights must be finite and nonnegative");
      }
      if (w > 0.0 && !adjacency_.hasEdge(static_cast<std::size_t>(l), static_cast<std::size_t>(k))) {
        throw Error(ErrorKind::Validation,
                    "weight a(" + std::to_string(l + 1) + "," + std::to_string(k + 1) +
                        ") is nonzero but the edge is absent");
      }
      column += w;
    }
    if (std::abs(column - 1.0) > kColumnSumTolerance) {
      throw Error(ErrorKind::Validation,
                  "column " + std::to_string(k + 1) + " of the combination matrix sums to " +
                      std::to_string(column));
    }
    anySelfWeight = anySelfWeight || a_(k, k) > 0.0;
  }
  if (!adjacency_.stronglyConnected()) {
    throw Error(ErrorKind::Connectivity, "network is not strongly connected");
  }
  if (!anySelfWeight) {
    throw Error(ErrorKind::Validation, "at least one agent needs a positive self-weight");
  }
}

Network Network::fromMatrix(Eigen::MatrixXd combination, Adjacency adjacency) {
  Network net;
  net.a_ = std::move(combination);
  net.adjacency_ = std::move(adjacency);
  net.validate();
  net.perron_ = perronVector(net.a_);
  net.alpha_ = alphaConstant(net.a_, net.perron_);
  net.lemma4_ = lemma4WeightSum(net.a_, net.perron_);
  return net;
}

Network Network::fromMatrix(Eigen::MatrixXd combination) {
  const auto n = static_cast<std::size_t>(combination.cols());
  Adjacency support(n);
  for (std::size_t l = 0; l < n && static_cast<Eigen::Index>(l) < combination.rows(); ++l)
    for (std::size_t k = 0; k < n; ++k)
      if (combination(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k)) != 0.0)
        support.setEdge(l, k);
  return fromMatrix(std::move(combination), std::move(support));
}

Network Network::averaging(const Adjacency& adjacency, double lambda) {
  const std::size_t n = adjacency.size();
  if (n == 0) throw Error(ErrorKind::Validation, "network: no agents");
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw Error(ErrorKind::Validation, "network.lambda: must lie in (0, 1)");
  }
  if (!adjacency.stronglyConnected()) {
    throw Error(ErrorKind::Connectivity, "network is not strongly connected");
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    if (!adjacency.hasEdge(k, k)) {
      throw Error(ErrorKind::Validation,
                  "network: averaging rule needs a self-loop at agent " + std::to_string(k + 1));
    }
    const auto hood = adjacency.neighborhood(k);
    const auto kk = static_cast<Eigen::Index>(k);
    if (hood.size() == 1) {
      if (lambda < 1.0) {
        throw Error(ErrorKind::DegenerateDegree,
                    "agent " + std::to_string(k + 1) + " has no neighbors but lambda < 1");
      }
      a(kk, kk) = 1.0;
      continue;
    }
    const double share = (1.0 - lambda) / static_cast<double>(hood.size() - 1);
    for (std::size_t l : hood) a(static_cast<Eigen::Index>(l), kk) = (l == k) ? lambda : share;
  }
  return fromMatrix(std::move(a), adjacency);
}

Network buildAveragingMatrix(const Adjacency& adjacency, double lambda) {
  return Network::averaging(adjacency, lambda);
}

}  // namespace pbnet
