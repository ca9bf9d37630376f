#pragma once

#include <vector>

namespace hdgmg {

enum class NodeFamily { equispaced, gauss_lobatto };

/// k+1 Lagrange nodes on [0,1], increasing.
std::vector<double> lagrange_nodes(int k, NodeFamily family);

struct Quadrature1D {
  std::vector<double> points;   // on [0,1]
  std::vector<double> weights;  // sum to 1
};

Quadrature1D gauss_legendre(int npoints);

class LagrangeBasis1D {
 public:
  explicit LagrangeBasis1D(std::vector<double> nodes);

  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }
  double value(int i, double x) const;
  double derivative(int i, double x) const;
  std::vector<double> values(double x) const;
  std::vector<double> derivatives(double x) const;

 private:
  std::vector<double> nodes_;
};

}  // namespace hdgmg
