#pragma once

// Instance builders and independent dense oracles shared by the test binaries.

#include "saddle/bilinear.hpp"
#include "saddle/metrics.hpp"
#include "saddle/problem.hpp"
#include "saddle/prox.hpp"
#include "saddle/sampling.hpp"
#include "saddle/solvers.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

namespace testing_support {

using saddle::Index;
using saddle::Vector;

inline Eigen::MatrixXd gaussian_dense(Index n, Index d, std::uint64_t seed) {
  saddle::Rng rng(seed);
  Eigen::MatrixXd m(n, d);
  for (Index j = 0; j < n; ++j)
    for (Index k = 0; k < d; ++k) m(j, k) = rng.normal();
  return m;
}

inline Eigen::MatrixXd sparse_dense(Index n, Index d, double density, std::uint64_t seed) {
  saddle::Rng rng(seed);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, d);
  for (Index j = 0; j < n; ++j)
    for (Index k = 0; k < d; ++k)
      if (rng.uniform01() < density) m(j, k) = rng.normal();
  return m;
}

inline Eigen::MatrixXd rank_one_dense(Index n, Index d, std::uint64_t seed) {
  saddle::Rng rng(seed);
  Vector u(n), v(d);
  for (Index j = 0; j < n; ++j) u[j] = rng.normal();
  for (Index k = 0; k < d; ++k) v[k] = rng.normal();
  return u * v.transpose();
}

inline std::shared_ptr<const saddle::CouplingMatrix> coupling(const Eigen::MatrixXd& m) {
  return std::make_shared<saddle::CouplingMatrix>(saddle::CouplingMatrix::from_dense(m));
}

inline Vector gaussian_vector(Index n, std::uint64_t seed) {
  saddle::Rng rng(seed);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

inline double dense_op_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()[0];
}

// f(x) = (lambda/2)|x|^2 + l1 |x|_1 + c^T x,  g(y) = (gamma/2)|y|^2 + b^T y.
inline saddle::SaddleProblem separable_problem(std::shared_ptr<const saddle::CouplingMatrix> K, double lambda,
                                               double gamma, double l1, Vector c, Vector b,
                                               saddle::SplitScheme split = {}) {
  saddle::SaddleProblem sp;
  sp.K = std::move(K);
  sp.geometry = saddle::Geometry(lambda, gamma, sp.K->cols(), sp.K->rows());
  sp.primal = std::make_shared<saddle::SeparableTerm>(l1, std::move(c));
  sp.dual = std::make_shared<saddle::SeparableTerm>(0.0, std::move(b));
  sp.split = split;
  return sp;
}

// Dense saddle oracle for quadratic terms: (lambda I + K^T K / gamma) x = -c + K^T b / gamma.
inline saddle::PrimalDualPoint dense_saddle(const Eigen::MatrixXd& K, double lambda, double gamma, const Vector& c,
                                            const Vector& b) {
  const Index d = K.cols();
  Eigen::MatrixXd system = lambda * Eigen::MatrixXd::Identity(d, d) + K.transpose() * K / gamma;
  Vector rhs = -c + K.transpose() * b / gamma;
  Vector x = system.fullPivLu().solve(rhs);
  Vector y = (K * x - b) / gamma;
  return {x, y};
}

// Dense ROC quadratic-form matrix built from the pairwise definition.
inline Eigen::MatrixXd auc_dense_A(const Vector& labels) {
  const Index n = labels.size();
  double np = 0, nn = 0;
  for (Index i = 0; i < n; ++i) (labels[i] > 0 ? np : nn) += 1;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (!(labels[i] > 0) || labels[j] > 0) continue;
      // (u_i - u_j)^2 / (np nn) for positive i, negative j
      const double w = 1.0 / (np * nn);
      A(i, i) += w;
      A(j, j) += w;
      A(i, j) -= w;
      A(j, i) -= w;
    }
  return A;
}

// argmin_v (gamma/2)|v - v0|^2 + sigma (v^T A^+ v / 2 - (M/2)|v|^2) on sum(v) = 0,
// through the eigendecomposition of the dense A.
inline Vector auc_prox_oracle(const Vector& labels, double gamma, double sigma, const Vector& v0) {
  const Eigen::MatrixXd A = auc_dense_A(labels);
  const double M = 1.0 / Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A).eigenvalues().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  Vector v = Vector::Zero(v0.size());
  for (Index k = 0; k < A.rows(); ++k) {
    const double mu = es.eigenvalues()[k];
    if (mu < 1e-12) continue;  // the ones direction
    const Vector u = es.eigenvectors().col(k);
    v += gamma * u.dot(v0) / (gamma + sigma * (1.0 / mu - M)) * u;
  }
  return v;
}

// argmin_x sigma [(lambda/2)|x|^2 + c sum_{i<j} |x_i - x_j|] + (lambda/2)|x - x0|^2 through
// accelerated projected gradient on the box-constrained dual over pair multipliers.
inline Vector cluster_prox_oracle(double lambda, double sigma, double c, const Vector& x0, int iterations = 200000) {
  const Index n = x0.size();
  const double beta = sigma * c / lambda;
  std::vector<std::pair<Index, Index>> pairs;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  const std::size_t P = pairs.size();
  auto primal = [&](const std::vector<double>& u) {
    Vector x = x0;
    for (std::size_t p = 0; p < P; ++p) {
      x[pairs[p].first] -= beta * u[p];
      x[pairs[p].second] += beta * u[p];
    }
    return Vector(x / (1.0 + sigma));
  };
  if (P == 0 || beta == 0.0) return x0 / (1.0 + sigma);
  // dual objective |x0 - beta D^T u|^2 / 2 with |u|_inf <= 1; gradient -beta D (x0 - beta D^T u)
  const double step = 1.0 / (beta * beta * static_cast<double>(n));
  std::vector<double> u(P, 0.0), prev(P, 0.0), look(P, 0.0);
  double t = 1.0;
  for (int it = 0; it < iterations; ++it) {
    const Vector r = primal(look) * (1.0 + sigma);
    prev.swap(u);
    for (std::size_t p = 0; p < P; ++p) {
      const double grad = -beta * (r[pairs[p].first] - r[pairs[p].second]);
      u[p] = std::clamp(look[p] - step * grad, -1.0, 1.0);
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    for (std::size_t p = 0; p < P; ++p) look[p] = u[p] + (t - 1.0) / t_next * (u[p] - prev[p]);
    t = t_next;
  }
  return primal(u);
}

inline double cluster_objective(double lambda, double sigma, double c, const Vector& x0, const Vector& x) {
  return sigma * (0.5 * lambda * x.squaredNorm() + c * saddle::cluster_penalty(x)) +
         0.5 * lambda * (x - x0).squaredNorm();
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace testing_support
