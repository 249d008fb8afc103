#pragma once

// Independent oracles shared by the unit and acceptance tests. They only use the point/set
// containers from the library; every quantity is recomputed from scratch here.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

#include "isocap/capacity.hpp"
#include "isocap/lattice_function.hpp"

namespace oracle {

using isocap::Box;
using isocap::LatticeFunction;
using isocap::LatticePoint;
using isocap::LatticeSet;

/// Ordered-pair energy by walking every unit edge that touches the storage box.
inline double energy(const LatticeFunction& u, double p) {
  const Box b = u.box().grown(1);
  long double sum = 0;
  for (std::size_t k = 0; k < b.volume(); ++k) {
    const LatticePoint i = b.point(k);
    for (int a = 0; a < u.dim(); ++a) {
      LatticePoint j = i;
      j[a] += 1;
      sum += 2.0L * std::pow(static_cast<long double>(std::abs(u(i) - u(j))), static_cast<long double>(p));
    }
  }
  return static_cast<double>(sum);
}

inline LatticeSet random_connected(std::mt19937_64& rng, int d, long n) {
  std::vector<LatticePoint> pts{LatticePoint(d)};
  std::unordered_set<LatticePoint, isocap::LatticePointHash> seen(pts.begin(), pts.end());
  std::uniform_int_distribution<int> axis(0, d - 1), coin(0, 1);
  while (static_cast<long>(pts.size()) < n) {
    const LatticePoint base = pts[std::uniform_int_distribution<std::size_t>(0, pts.size() - 1)(rng)];
    LatticePoint q = base;
    q[axis(rng)] += coin(rng) ? 1 : -1;
    if (seen.insert(q).second) pts.push_back(q);
  }
  return LatticeSet(d, std::move(pts));
}

inline LatticeFunction random_function(std::mt19937_64& rng, int d, int max_extent = 5, double zero_fraction = 0.3) {
  std::uniform_int_distribution<int> lo_d(-2, 1), ext(1, max_extent - 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  LatticePoint lo(d), hi(d);
  for (int a = 0; a < d; ++a) {
    lo[a] = lo_d(rng);
    hi[a] = lo[a] + ext(rng);
  }
  LatticeFunction u(Box(lo, hi));
  for (double& v : u.values()) v = unif(rng) < zero_fraction ? 0.0 : unif(rng);
  return u;
}

struct DenseCapacity {
  double raw = 0.0;  // ordered-pair energy
  std::map<LatticePoint, double> u;
};

/// Harmonic extension on the open ball: nodes with every neighbour inside the ball are free
/// (unless in X), every other node is pinned at 0. Dense LDLT.
inline DenseCapacity dense_capacity(const LatticeSet& x, const LatticePoint& center, double radius) {
  const int d = x.dim();
  auto in_ball = [&](const LatticePoint& i) { return (i - center).norm2() < radius * radius; };
  auto interior = [&](const LatticePoint& i) {
    if (!in_ball(i)) return false;
    for (int a = 0; a < d; ++a)
      for (int s : {-1, 1}) {
        LatticePoint j = i;
        j[a] += s;
        if (!in_ball(j)) return false;
      }
    return true;
  };
  const int r = static_cast<int>(std::ceil(radius)) + 1;
  LatticePoint lo(d), hi(d);
  for (int a = 0; a < d; ++a) {
    lo[a] = center[a] - r;
    hi[a] = center[a] + r;
  }
  const Box box(lo, hi);
  std::map<LatticePoint, int> index;
  std::vector<LatticePoint> free;
  for (std::size_t k = 0; k < box.volume(); ++k) {
    const LatticePoint i = box.point(k);
    if (interior(i) && !x.contains(i)) {
      index[i] = static_cast<int>(free.size());
      free.push_back(i);
    }
  }
  const int m = static_cast<int>(free.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  for (int row = 0; row < m; ++row) {
    A(row, row) = 2.0 * d;
    for (int a = 0; a < d; ++a)
      for (int s : {-1, 1}) {
        LatticePoint j = free[static_cast<std::size_t>(row)];
        j[a] += s;
        if (auto it = index.find(j); it != index.end())
          A(row, it->second) -= 1.0;
        else if (x.contains(j))
          b(row) += 1.0;
      }
  }
  const Eigen::VectorXd sol = A.ldlt().solve(b);
  DenseCapacity out;
  for (const auto& p : x) out.u[p] = 1.0;
  for (int k = 0; k < m; ++k) out.u[free[static_cast<std::size_t>(k)]] = sol(k);
  auto val = [&](const LatticePoint& i) {
    auto it = out.u.find(i);
    return it == out.u.end() ? 0.0 : it->second;
  };
  // ordered pairs: both endpoints of every edge
  double e = 0;
  for (const auto& [i, ui] : out.u)
    for (int a = 0; a < d; ++a)
      for (int s : {-1, 1}) {
        LatticePoint j = i;
        j[a] += s;
        const double diff = ui - val(j);
        e += (out.u.count(j) ? 1.0 : 2.0) * diff * diff;
      }
  out.raw = e;
  return out;
}

struct DenseEigen {
  double lambda = 0.0;
  Eigen::VectorXd vec;  // ordered like x.points()
};

/// Smallest eigenpair of 2d I - A restricted to X.
inline DenseEigen dense_eigen(const LatticeSet& x) {
  const int n = static_cast<int>(x.size());
  const int d = x.dim();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    L(a, a) = 2.0 * d;
    for (int b = 0; b < n; ++b) {
      const LatticePoint diff = x.points()[static_cast<std::size_t>(a)] - x.points()[static_cast<std::size_t>(b)];
      if (diff.norm2() == 1) L(a, b) = -1.0;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
  DenseEigen out;
  out.lambda = es.eigenvalues()(0);
  out.vec = es.eigenvectors().col(0);
  return out;
}

}  // namespace oracle
