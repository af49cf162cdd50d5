#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pbnet/numeric.hpp"

namespace pbnet {

// Directed graph over agents. hasEdge(from, to) means agent `to` listens to
// agent `from`, i.e. from belongs to the neighborhood N_to. Self-loops are
// ordinary edges on the diagonal.
class Adjacency {
 public:
  explicit Adjacency(std::size_t agents = 0);

  std::size_t size() const noexcept { return n_; }
  bool hasEdge(std::size_t from, std::size_t to) const;
  void setEdge(std::size_t from, std::size_t to, bool present = true);

  // Neighborhood of `agent` including itself when it has a self-loop.
  std::vector<std::size_t> neighborhood(std::size_t agent) const;

  std::size_t stronglyConnectedComponents() const;
  bool stronglyConnected() const { return n_ > 0 && stronglyConnectedComponents() == 1; }

  bool operator==(const Adjacency&) const = default;

  // Bidirectional cycle 0-1-...-(n-1)-0 plus self-loops.
  static Adjacency ring(std::size_t agents);
  static Adjacency complete(std::size_t agents);
  // Agent 0 is the hub; leaves connect to the hub in both directions.
  static Adjacency star(std::size_t agents);
  static Adjacency preset(const std::string& name, std::size_t agents);

 private:
  std::size_t n_;
  std::vector<char> edges_;  // row-major [from * n + to]
};

// Random directed graph with every self-loop present and each off-diagonal
// edge kept independently with probability `edgeProbability`; resampled
// until strongly connected (at most 1000 attempts).
Adjacency generateStronglyConnectedGraph(std::size_t agents, double edgeProbability, Rng& rng);

// Power iteration v <- A v from the uniform vector until the max-norm change
// drops below 1e-12 (at most 1e5 iterations). Result sums to 1.
Eigen::VectorXd perronVector(const Eigen::MatrixXd& combination);

// sum_l v_l sum_{n != l} a_{nl} / (1 - a_{nn})
double alphaConstant(const Eigen::MatrixXd& combination, const Eigen::VectorXd& perron);
// sum_l v_l sum_{n != l} a_{nl} a_{nn} / (1 - a_{nn})
double lemma4WeightSum(const Eigen::MatrixXd& combination, const Eigen::VectorXd& perron);

// Combination matrix over a strongly connected graph.
//
// Convention: A is left-stochastic. Column k holds the weights agent k gives
// to its incoming neighbors, so weight(l, k) == A(l, k) is what agent k
// applies to agent l, and every column sums to 1. The combination step reads
// columns, never rows.
//
// Immutable once built; the Perron vector and weight constants are computed
// eagerly at construction.
class Network {
 public:
  // Validates column sums (1e-12), nonnegativity, support on the adjacency,
  // strong connectivity and at least one positive self-weight.
  static Network fromMatrix(Eigen::MatrixXd combination, Adjacency adjacency);
  // Support taken from the nonzero pattern of the matrix.
  static Network fromMatrix(Eigen::MatrixXd combination);

  // a_kk = lambda, a_lk = (1 - lambda) / (n_k - 1) for l in N_k \ {k}.
  static Network averaging(const Adjacency& adjacency, double lambda);

  std::size_t size() const noexcept { return static_cast<std::size_t>(a_.cols()); }
  double weight(std::size_t from, std::size_t to) const { return a_(from, to); }
  const Eigen::MatrixXd& matrix() const noexcept { return a_; }
  const Adjacency& adjacency() const noexcept { return adjacency_; }
  const Eigen::VectorXd& perron() const noexcept { return perron_; }
  double alpha() const noexcept { return alpha_; }
  double lemma4Sum() const noexcept { return lemma4_; }

  // Re-checks the stochasticity invariants; throws Error(Validation).
  void validate() const;

 private:
  Network() = default;

  Eigen::MatrixXd a_;
  Adjacency adjacency_;
  Eigen::VectorXd perron_;
  double alpha_ = 0.0;
  double lemma4_ = 0.0;
};

inline double alphaConstant(const Network& net) { return net.alpha(); }
inline double lemma4WeightSum(const Network& net) { return net.lemma4Sum(); }

Network buildAveragingMatrix(const Adjacency& adjacency, double lambda);

}  // namespace pbnet
