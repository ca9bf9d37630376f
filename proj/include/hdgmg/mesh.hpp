#pragma once

#include <array>
#include <string>
#include <vector>

namespace hdgmg {

enum class BoundaryMode { dirichlet, periodic };
enum class Method { cg, edg, hdg };
enum class DofType : int { N = 0, X = 1, Y = 2, C = 3 };

inline constexpr std::array<DofType, 4> kDofTypes = {DofType::N, DofType::X, DofType::Y, DofType::C};

std::string to_string(Method m);
std::string to_string(DofType t);
Method parse_method(const std::string& s);

/// Offset of the subgrid in half-spacings: N (0,0), X (1,0), Y (0,1), C (1,1).
std::array<int, 2> subgrid_shift(DofType t);

struct MeshLevel {
  int cells_per_side = 0;
  double spacing = 0.0;
  BoundaryMode boundary = BoundaryMode::dirichlet;

  static MeshLevel make(int n, BoundaryMode mode);
  MeshLevel coarser() const;
  MeshLevel finer() const;
};

/// Fine to coarse.
std::vector<MeshLevel> build_hierarchy(int n_finest, int levels, BoundaryMode mode);

struct DofEntry {
  int index;
  DofType type;
  int slot;  // 0-based
  int k1, k2;
};

/// Global numbering: type groups N, X, Y, C; inside a group slot-major, then k1, then k2.
class DofMap {
 public:
  DofMap(const MeshLevel& level, Method method, int degree);

  const MeshLevel& level() const { return level_; }
  Method method() const { return method_; }
  int degree() const { return degree_; }
  int n() const { return level_.cells_per_side; }
  bool periodic() const { return level_.boundary == BoundaryMode::periodic; }

  int size() const { return size_; }
  int slots(DofType t) const { return r_[static_cast<int>(t)]; }
  int slots_per_cell() const { return r_[0] + r_[1] + r_[2] + r_[3]; }

  DofEntry entry(int index) const;
  std::vector<DofEntry> entries() const;

  /// -1 if the position is eliminated (boundary) or outside the domain. Wraps when periodic.
  int find(DofType t, int k1, int k2, int slot) const;

  /// Position in half-spacings (2*k1 + shift, 2*k2 + shift).
  std::array<int, 2> doubled_position(int index) const;

  /// Element-local numbering used by the element matrices. Entries are -1 for eliminated DOFs.
  /// HDG/EDG: 4 faces (bottom, top, left, right) x (k+1) face nodes.
  /// CG: (k+1)^2 volume nodes, index b*(k+1)+a.
  std::vector<int> element_dofs(int i, int j) const;
  int local_size() const;

 private:
  struct Range {
    int lo1, hi1, lo2, hi2;  // inclusive lattice ranges
    int count() const { return (hi1 - lo1 + 1) * (hi2 - lo2 + 1); }
  };

  MeshLevel level_;
  Method method_;
  int degree_;
  std::array<int, 4> r_{};
  std::array<Range, 4> range_{};
  std::array<int, 4> offset_{};
  std::array<int, 4> group_size_{};
  int size_ = 0;
};

}  // namespace hdgmg
