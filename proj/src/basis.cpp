#include "hdgmg/basis.hpp"

#include "hdgmg/linalg.hpp"

#include <cmath>
#include <numbers>

namespace hdgmg {

namespace {

// Legendre P_n and P_n' on [-1,1].
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int m = 2; m <= n; ++m) {
    double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

Quadrature1D gauss_legendre(int npoints) {
  if (npoints < 1) throw ValidationError("gauss_legendre: need at least one point");
  Quadrature1D q;
  q.points.resize(npoints);
  q.weights.resize(npoints);
  for (int i = 0; i < npoints; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (npoints + 0.5));
    double p = 0, dp = 1;
    for (int it = 0; it < 100; ++it) {
      legendre(npoints, x, p, dp);
      double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(npoints, x, p, dp);
    int j = npoints - 1 - i;
    q.points[j] = 0.5 * (x + 1.0);
    q.weights[j] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return q;
}

std::vector<double> lagrange_nodes(int k, NodeFamily family) {
  if (k < 1) throw ValidationError("lagrange_nodes: degree must be >= 1");
  std::vector<double> x(k + 1);
  if (family == NodeFamily::equispaced) {
    for (int i = 0; i <= k; ++i) x[i] = static_cast<double>(i) / k;
    return x;
  }
  // Interior Gauss-Lobatto nodes are the roots of P_k'.
  x[0] = 0.0;
  x[k] = 1.0;
  for (int i = 1; i < k; ++i) {
    double t = -std::cos(std::numbers::pi * i / k);
    for (int it = 0; it < 100; ++it) {
      double p, dp;
      legendre(k, t, p, dp);
      double d2p = (2.0 * t * dp - k * (k + 1.0) * p) / (1.0 - t * t);
      double dt = dp / d2p;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    x[i] = 0.5 * (t + 1.0);
  }
  return x;
}

LagrangeBasis1D::LagrangeBasis1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {}

double LagrangeBasis1D::value(int i, double x) const {
  double v = 1.0;
  for (int m = 0; m < size(); ++m)
    if (m != i) v *= (x - nodes_[m]) / (nodes_[i] - nodes_[m]);
  return v;
}

double LagrangeBasis1D::derivative(int i, double x) const {
  double d = 0.0;
  for (int l = 0; l < size(); ++l) {
    if (l == i) continue;
    double t = 1.0 / (nodes_[i] - nodes_[l]);
    for (int m = 0; m < size(); ++m)
      if (m != i && m != l) t *= (x - nodes_[m]) / (nodes_[i] - nodes_[m]);
    d += t;
  }
  return d;
}

std::vector<double> LagrangeBasis1D::values(double x) const {
  std::vector<double> v(size());
  for (int i = 0; i < size(); ++i) v[i] = value(i, x);
  return v;
}

std::vector<double> LagrangeBasis1D::derivatives(double x) const {
  std::vector<double> v(size());
  for (int i = 0; i < size(); ++i) v[i] = derivative(i, x);
  return v;
}

}  // namespace hdgmg
