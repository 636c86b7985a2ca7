#include <algorithm>
#include <array>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>
#include <fmt/format.h>

#include "rotcool/engine.hpp"
#include "rotcool/errors.hpp"

namespace rotcool {

namespace {

constexpr double kNegativeLimit = -1e-10;
constexpr Eigen::Index kDenseLimit = 3000;

double max_exit_rate(const SparseMatrix& G) {
  double m = 0.0;
  for (Eigen::Index k = 0; k < G.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(G, k); it; ++it) {
      if (it.row() == it.col()) m = std::max(m, std::abs(it.value()));
    }
  }
  return m;
}

void clip_negatives(Eigen::VectorXd& p) {
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0) {
      if (p[i] < kNegativeLimit) {
        throw NumericalError(fmt::format("propagation produced population {:.3g} at index {}", p[i], i));
      }
      p[i] = 0.0;
    }
  }
}

// exp(G t) p with exp(G t) = sum_k Poisson(k; L t) (I + G/L)^k.
class Uniformizer {
public:
  explicit Uniformizer(const SparseMatrix& G) : rate_(max_exit_rate(G)) {
    if (rate_ > 0.0) {
      SparseMatrix id(G.rows(), G.cols());
      id.setIdentity();
      P_ = id + G / rate_;
    }
  }

  Eigen::VectorXd advance(const Eigen::VectorXd& p, double t) const {
    if (rate_ == 0.0 || t == 0.0) return p;
    // Chunks of L dt <= 30 keep exp(-L dt) far from underflow.
    const auto chunks = static_cast<long>(std::ceil(rate_ * t / kChunk));
    const double lambda = rate_ * t / static_cast<double>(chunks);
    Eigen::VectorXd out = p;
    Eigen::VectorXd term(p.size());
    Eigen::VectorXd acc(p.size());
    for (long c = 0; c < chunks; ++c) {
      term = out;
      double w = std::exp(-lambda);
      acc = w * term;
      // Past k > lambda the Poisson tail beyond term k is below w r / (1 - r),
      // r = lambda / (k + 1).
      for (int k = 1;; ++k) {
        if (k > kMaxTerms) throw NumericalError("uniformization series did not converge");
        term = P_ * term;
        w *= lambda / k;
        acc += w * term;
        const double r = lambda / (k + 1.0);
        if (r < 1.0 && w * r / (1.0 - r) < kTruncation) break;
      }
      out = acc;
    }
    return out;
  }

private:
  static constexpr double kChunk = 30.0;
  static constexpr double kTruncation = 1e-15;
  static constexpr int kMaxTerms = 400;
  double rate_;
  SparseMatrix P_;
};

// Dormand-Prince 5(4) for the linear system dp/dt = G p.
Eigen::VectorXd dormand_prince(const SparseMatrix& G, const Eigen::VectorXd& p0, double t,
                               double h_max) {
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                          a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                          a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                          b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  static constexpr double e1 = b1 - 5179.0 / 57600.0, e3 = b3 - 7571.0 / 16695.0,
                          e4 = b4 - 393.0 / 640.0, e5 = b5 - (-92097.0 / 339200.0),
                          e6 = b6 - 187.0 / 2100.0, e7 = -1.0 / 40.0;
  constexpr double tol = 1e-13;

  Eigen::VectorXd p = p0;
  double done = 0.0;
  double h = h_max;
  Eigen::VectorXd k1 = G * p;
  while (done < t) {
    h = std::min({h, h_max, t - done});
    if (h < 1e-14 * t) throw NumericalError("explicit stepping: step size underflow");
    const Eigen::VectorXd k2 = G * (p + h * a21 * k1);
    const Eigen::VectorXd k3 = G * (p + h * (a31 * k1 + a32 * k2));
    const Eigen::VectorXd k4 = G * (p + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Eigen::VectorXd k5 = G * (p + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Eigen::VectorXd k6 =
        G * (p + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Eigen::VectorXd next = p + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Eigen::VectorXd k7 = G * next;
    const double err =
        (h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7)).lpNorm<Eigen::Infinity>();
    if (err <= tol) {
      p = next;
      k1 = k7;
      done += h;
    }
    const double factor = err > 0.0 ? 0.9 * std::pow(tol / err, 0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
  }
  return p;
}

void check_times(const PopulationState& p0, const std::vector<double>& times) {
  double prev = p0.t_s;
  for (const double t : times) {
    if (!std::isfinite(t) || t < prev) {
      throw ValidationError("output_times", "must be finite, ascending and >= the initial time");
    }
    prev = t;
  }
}

}  // namespace

std::vector<PopulationState> propagate(const SparseMatrix& G, const PopulationState& p0,
                                       const std::vector<double>& output_times_s,
                                       PropagationMethod method) {
  if (G.rows() != G.cols() || G.cols() != p0.p.size()) {
    throw ValidationError("generator", "dimension does not match the population");
  }
  check_times(p0, output_times_s);

  std::vector<PopulationState> out;
  out.reserve(output_times_s.size());
  PopulationState current = p0;

  switch (method) {
    case PropagationMethod::uniformization: {
      const Uniformizer u(G);
      for (const double t : output_times_s) {
        current.p = u.advance(current.p, t - current.t_s);
        clip_negatives(current.p);
        current.t_s = t;
        out.push_back(current);
      }
      break;
    }
    case PropagationMethod::explicit_stepping: {
      const double rate = max_exit_rate(G);
      for (const double t : output_times_s) {
        const double span = t - current.t_s;
        if (span > 0.0 && rate > 0.0) current.p = dormand_prince(G, current.p, span, 0.1 / rate);
        clip_negatives(current.p);
        current.t_s = t;
        out.push_back(current);
      }
      break;
    }
    case PropagationMethod::matrix_exponential: {
      if (G.rows() > kDenseLimit) {
        throw ValidationError("method", fmt::format("matrix_exponential supports N <= {}", kDenseLimit));
      }
      const Eigen::MatrixXd dense(G);
      for (const double t : output_times_s) {
        const double span = t - current.t_s;
        if (span > 0.0) {
          const Eigen::MatrixXd e = (dense * span).exp();
          current.p = e * current.p;
        }
        clip_negatives(current.p);
        current.t_s = t;
        out.push_back(current);
      }
      break;
    }
  }
  return out;
}

std::vector<PopulationState> propagate(const RateGenerator& gen, const PopulationState& p0,
                                       const std::vector<double>& output_times_s,
                                       PropagationMethod method) {
  return propagate(gen.G, p0, output_times_s, method);
}

}  // namespace rotcool
