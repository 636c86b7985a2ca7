#include <numeric>
#include <vector>

#include <Eigen/SparseLU>

#include "rotcool/engine.hpp"
#include "rotcool/errors.hpp"

namespace rotcool {

namespace {

class DisjointSets {
public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

private:
  std::vector<std::size_t> parent_;
};

}  // namespace

PopulationState steady_state(const SparseMatrix& G, const PopulationState& p0) {
  const Eigen::Index n = G.rows();
  if (G.cols() != n || p0.p.size() != n) {
    throw ValidationError("generator", "dimension does not match the population");
  }
  const auto un = static_cast<std::size_t>(n);
  DisjointSets sets(un);
  for (Eigen::Index k = 0; k < G.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(G, k); it; ++it) {
      if (it.row() != it.col() && it.value() != 0.0) {
        sets.unite(static_cast<std::size_t>(it.row()), static_cast<std::size_t>(it.col()));
      }
    }
  }

  // Members of each class in basis order.
  std::vector<std::vector<Eigen::Index>> classes;
  std::vector<std::ptrdiff_t> class_of_root(un, -1);
  for (std::size_t i = 0; i < un; ++i) {
    const std::size_t r = sets.find(i);
    if (class_of_root[r] < 0) {
      class_of_root[r] = static_cast<std::ptrdiff_t>(classes.size());
      classes.emplace_back();
    }
    classes[static_cast<std::size_t>(class_of_root[r])].push_back(static_cast<Eigen::Index>(i));
  }

  PopulationState out = p0;
  out.p.setZero();
  for (const auto& members : classes) {
    double mass = 0.0;
    for (const auto i : members) mass += p0.p[i];
    if (members.size() == 1) {
      out.p[members.front()] = mass;
      continue;
    }
    const auto m = static_cast<Eigen::Index>(members.size());
    std::vector<Eigen::Index> local(un, -1);
    for (Eigen::Index a = 0; a < m; ++a) local[static_cast<std::size_t>(members[static_cast<std::size_t>(a)])] = a;

    // Row 0 of the class block is replaced by the normalization sum(x) = 1.
    std::vector<Eigen::Triplet<double>> triplets;
    for (Eigen::Index a = 0; a < m; ++a) triplets.emplace_back(0, a, 1.0);
    for (const auto col : members) {
      for (SparseMatrix::InnerIterator it(G, col); it; ++it) {
        const Eigen::Index r = local[static_cast<std::size_t>(it.row())];
        if (r > 0) triplets.emplace_back(r, local[static_cast<std::size_t>(col)], it.value());
      }
    }
    SparseMatrix A(m, m);
    A.setFromTriplets(triplets.begin(), triplets.end());
    A.makeCompressed();
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw NumericalError("steady state: singular class generator");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    rhs[0] = 1.0;
    Eigen::VectorXd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !x.allFinite()) {
      throw NumericalError("steady state: solve failed");
    }
    for (Eigen::Index a = 0; a < m; ++a) {
      if (x[a] < 0.0) {
        if (x[a] < -1e-10) throw NumericalError("steady state: negative stationary population");
        x[a] = 0.0;
      }
    }
    x /= x.sum();
    for (Eigen::Index a = 0; a < m; ++a) out.p[members[static_cast<std::size_t>(a)]] = mass * x[a];
  }
  out.t_s = p0.t_s;
  return out;
}

}  // namespace rotcool
