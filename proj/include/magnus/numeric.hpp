#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "magnus/exact.hpp"
#include "magnus/freelie.hpp"

namespace magnus {

using Matrix = Eigen::MatrixXd;

// Matrix exponential by scaling and squaring around a fixed-degree Taylor
// kernel; relative error well below 1e-12 for ||M|| <= 10.
inline Matrix expm(const Matrix& m) {
  if (!m.allFinite()) throw std::invalid_argument("expm: non-finite entries");
  const double norm = m.norm();
  int s = 0;
  if (norm > 0.25) s = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
  const Matrix t = m / std::pow(2.0, s);
  Matrix result = Matrix::Identity(m.rows(), m.cols());
  Matrix term = Matrix::Identity(m.rows(), m.cols());
  for (int k = 1; k <= 24; ++k) {
    term = (term * t) / static_cast<double>(k);
    result += term;
    if (term.norm() <= 1e-18 * result.norm()) break;
  }
  for (int i = 0; i < s; ++i) result = result * result;
  if (!result.allFinite()) throw std::overflow_error("expm: overflow");
  return result;
}

// Taylor data of A around the step midpoint: a_i = A^(i)(t_mid)/i!, estimated
// from a symmetric 7-point stencil with spacing scaled to h (a degree-6
// polynomial fit, i.e. maximal-order central differences), returned already
// assembled as q_i = a_{i-1} h^i.
inline std::vector<Matrix> taylor_coeffs_midpoint(const std::function<Matrix(double)>& a,
                                                  double t_mid, int count, double h) {
  if (count < 1 || count > 7) throw std::invalid_argument("taylor_coeffs_midpoint: count must be 1..7");
  if (!(h > 0)) throw std::invalid_argument("taylor_coeffs_midpoint: step must be positive");
  constexpr int kHalf = 3;               // stencil -3d..3d
  constexpr int kPoints = 2 * kHalf + 1;
  const double d = h / 2.0;
  std::vector<Matrix> samples;
  samples.reserve(kPoints);
  for (int j = -kHalf; j <= kHalf; ++j) {
    Matrix s = a(t_mid + j * d);
    if (!s.allFinite()) throw std::invalid_argument("taylor_coeffs_midpoint: non-finite sample");
    samples.push_back(std::move(s));
  }
  Eigen::MatrixXd vander(kPoints, kPoints);
  for (int r = 0; r < kPoints; ++r) {
    double u = r - kHalf;
    double p = 1.0;
    for (int k = 0; k < kPoints; ++k) {
      vander(r, k) = p;
      p *= u;
    }
  }
  const auto lu = vander.partialPivLu();
  const Eigen::Index rows = samples[0].rows(), cols = samples[0].cols();
  std::vector<Matrix> coeff(static_cast<std::size_t>(kPoints), Matrix::Zero(rows, cols));
  Eigen::VectorXd rhs(kPoints), sol(kPoints);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      for (int j = 0; j < kPoints; ++j) rhs(j) = samples[static_cast<std::size_t>(j)](r, c);
      sol = lu.solve(rhs);
      for (int k = 0; k < kPoints; ++k) coeff[static_cast<std::size_t>(k)](r, c) = sol(k);
    }
  // coeff[k] = a_k d^k; q_{k+1} = a_k h^{k+1}
  std::vector<Matrix> q;
  q.reserve(static_cast<std::size_t>(count));
  double dk = 1.0, hk = h;
  for (int k = 0; k < count; ++k) {
    q.push_back(coeff[static_cast<std::size_t>(k)] * (hk / dk));
    dk *= d;
    hk *= h;
  }
  return q;
}

namespace detail {

inline Matrix eval_lyndon_word(const Word& w, const std::vector<Matrix>& q) {
  if (w.size() == 1) {
    std::size_t idx = static_cast<std::size_t>(w[0] - 1);
    if (idx >= q.size()) throw std::invalid_argument("omega_step: not enough Taylor data");
    return q[idx];
  }
  auto [u, v] = lyndon_factorization(w);
  Matrix mu = eval_lyndon_word(u, q), mv = eval_lyndon_word(v, q);
  return mu * mv - mv * mu;
}

}  // namespace detail

// The exact-rational commutator table behind omega_step: every Lyndon-word
// term of Omega_1..Omega_order with weight <= order, straight from
// classical_magnus_midpoint (never re-typed by hand).
inline std::vector<std::pair<Rational, Word>> midpoint_table(int order) {
  std::vector<std::pair<Rational, Word>> table;
  for (int k = 1; k <= order; ++k)
    for (const auto& [w, c] : classical_magnus_midpoint(k, order).terms())
      table.emplace_back(c, w);
  return table;
}

// Sum of the midpoint-table terms with the matrices q_i substituted for the
// letters, truncated at h-degree `order` (local error O(h^{order+1})).
inline Matrix omega_step(const std::vector<Matrix>& q, int order) {
  if (order != 2 && order != 4 && order != 6)
    throw std::invalid_argument("omega_step: order must be 2, 4 or 6");
  if (q.empty()) throw std::invalid_argument("omega_step: no Taylor data");
  const Eigen::Index dim = q[0].rows();
  for (const auto& m : q)
    if (m.rows() != dim || m.cols() != dim) throw std::invalid_argument("omega_step: dimension mismatch");
  Matrix omega = Matrix::Zero(dim, dim);
  for (const auto& [c, w] : midpoint_table(order))
    omega += c.to_double() * detail::eval_lyndon_word(w, q);
  return omega;
}

using TaylorSampler = std::function<std::vector<Matrix>(double t_mid, int count)>;  // exact a_0..a_{count-1}

struct IntegratorConfig {
  int order = 4;  // 2, 4 or 6
  int steps = 1;
  double t_begin = 0.0;
  double t_end = 1.0;
  std::function<Matrix(double)> a;
  std::optional<TaylorSampler> taylor;  // bypasses the finite-difference fit
};

// One-step Magnus integrator for Ydot = A(t) Y, Y(t_begin) = I: per step,
// Taylor data at the midpoint, Omega from the midpoint table, Y <- expm(Omega) Y.
// Returns the trajectory Y_0 = I, Y_1, ..., Y_steps.
inline std::vector<Matrix> integrate(const IntegratorConfig& config) {
  if (config.order != 2 && config.order != 4 && config.order != 6)
    throw std::invalid_argument("integrate: order must be 2, 4 or 6");
  if (config.steps < 1) throw std::invalid_argument("integrate: steps must be >= 1");
  if (!config.a) throw std::invalid_argument("integrate: missing A(t)");
  const int count = config.order - 1;  // q_1..q_{order-1} feed the table
  const double h = (config.t_end - config.t_begin) / config.steps;
  if (!(h > 0)) throw std::invalid_argument("integrate: empty time span");
  Matrix probe = config.a(config.t_begin);
  std::vector<Matrix> trajectory;
  trajectory.reserve(static_cast<std::size_t>(config.steps) + 1);
  Matrix y = Matrix::Identity(probe.rows(), probe.cols());
  trajectory.push_back(y);
  for (int step = 0; step < config.steps; ++step) {
    const double t_mid = config.t_begin + (step + 0.5) * h;
    std::vector<Matrix> q;
    if (config.taylor) {
      std::vector<Matrix> coeffs = (*config.taylor)(t_mid, count);
      double hk = h;
      for (const auto& c : coeffs) {
        q.push_back(c * hk);
        hk *= h;
      }
    } else {
      q = taylor_coeffs_midpoint(config.a, t_mid, count, h);
    }
    y = expm(omega_step(q, config.order)) * y;
    trajectory.push_back(y);
  }
  return trajectory;
}

namespace detail {

// polynomial with matrix coefficients, for the Lemma-1 check
using MatPoly = std::vector<Matrix>;

inline MatPoly mp_mul(const MatPoly& a, const MatPoly& b) {
  MatPoly r(a.size() + b.size() - 1, Matrix::Zero(a[0].rows(), a[0].cols()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

inline MatPoly mp_integral(const MatPoly& a) {  // integral from 0 to x
  MatPoly r(a.size() + 1, Matrix::Zero(a[0].rows(), a[0].cols()));
  for (std::size_t i = 0; i < a.size(); ++i) r[i + 1] = a[i] / static_cast<double>(i + 1);
  return r;
}

inline MatPoly mp_sub(MatPoly a, const MatPoly& b) {
  if (a.size() < b.size()) a.resize(b.size(), Matrix::Zero(a[0].rows(), a[0].cols()));
  for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  return a;
}

// (A > B)(x) = [ integral_0^x A, B(x) ], exact in the polynomial ring.
inline MatPoly mp_prelie(const MatPoly& a, const MatPoly& b) {
  MatPoly ia = mp_integral(a);
  return mp_sub(mp_mul(ia, b), mp_mul(b, ia));
}

inline Matrix mp_eval(const MatPoly& a, double x) {
  Matrix r = Matrix::Zero(a[0].rows(), a[0].cols());
  for (std::size_t i = a.size(); i-- > 0;) r = r * x + a[i];
  return r;
}

}  // namespace detail

// Draws random matrix-valued polynomials A, B, C and evaluates the pre-Lie
// associator symmetry (A>B)>C - A>(B>C) - (B>A)>C + B>(A>C) of the product
// (A > B)(x) = [ integral_0^x A, B(x) ] at random points, with exact
// polynomial integration.  Returns the largest residual entry; anything
// beyond round-off means the pre-Lie identity failed.
inline double lemma1_numeric_check(int samples, int degree, unsigned seed = 20240101) {
  if (samples < 1 || degree < 0) throw std::invalid_argument("lemma1_numeric_check: bad arguments");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  constexpr Eigen::Index dim = 3;
  auto random_poly = [&]() {
    detail::MatPoly p(static_cast<std::size_t>(degree) + 1, Matrix::Zero(dim, dim));
    for (auto& m : p)
      for (Eigen::Index r = 0; r < dim; ++r)
        for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = unif(rng);
    return p;
  };
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    auto a = random_poly(), b = random_poly(), c = random_poly();
    using detail::mp_prelie;
    using detail::mp_sub;
    auto assoc = mp_sub(mp_sub(mp_prelie(mp_prelie(a, b), c), mp_prelie(a, mp_prelie(b, c))),
                        mp_sub(mp_prelie(mp_prelie(b, a), c), mp_prelie(b, mp_prelie(a, c))));
    const double x = unif(rng);
    worst = std::max(worst, detail::mp_eval(assoc, x).cwiseAbs().maxCoeff());
  }
  return worst;
}

// Named test problems for the CLI and the convergence study.
struct TestProblem {
  std::string name;
  std::function<Matrix(double)> a;
  double t_begin = 0.0;
  double t_end = 1.0;
};

inline TestProblem test_problem(const std::string& name) {
  if (name == "constant") {
    Matrix c(2, 2);
    c << 0.3, 1.1, -0.4, -0.3;
    return {name, [c](double) { return c; }, 0.0, 1.0};
  }
  if (name == "rotation") {  // commuting family A(t) = w(t) J
    return {name,
            [](double t) {
              Matrix m(2, 2);
              double w = 1.0 + 0.5 * std::sin(t);
              m << 0.0, w, -w, 0.0;
              return m;
            },
            0.0, 1.0};
  }
  if (name == "noncommuting") {  // A(t) = [[t, 1], [0, -t]]
    return {name,
            [](double t) {
              Matrix m(2, 2);
              m << t, 1.0, 0.0, -t;
              return m;
            },
            0.0, 1.0};
  }
  throw std::invalid_argument("unknown test problem: " + name);
}

}  // namespace magnus
