#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ergo {

/// Cylinder dimensions: h columns (one per logical qubit), c rows wrapping
/// around the cylinder. Both must be even and c > 2h.
struct Dims {
  int h = 0;
  int c = 0;

  void validate() const;
  /// Bricks needed to advance every column by a full wrap: g = (h+1)c/2.
  int bricks_per_wrap() const { return (h + 1) * c / 2; }
};

/// Position of the clock wave front: one row index per column.
struct ClockConfig {
  std::vector<int> front;

  bool operator==(const ClockConfig&) const = default;
  bool operator<(const ClockConfig& o) const { return front < o.front; }
};

/// Cyclic difference to - from mapped into {-1,0,+1}; nullopt otherwise.
std::optional<int> cyclic_step(int from, int to, int c);

/// Wall conditions: single front row per column (structural), adjacent
/// columns within one cyclic step, step direction fixed by the parity of
/// front row + column.
bool is_valid(const Dims& d, const ClockConfig& a);

enum class MoveKind { Full, HalfLeft, HalfRight };

/// One brick: a Full move advances columns (col, col+1) from `row`,
/// a Half move advances the single boundary column from odd `row`.
/// Half bricks carry amplitude 1/sqrt(2).
struct BrickMove {
  MoveKind kind;
  int row;
  int col;

  double weight() const;
  bool operator==(const BrickMove&) const = default;
};

std::vector<BrickMove> forward_moves(const Dims& d, const ClockConfig& a);
std::vector<BrickMove> backward_moves(const Dims& d, const ClockConfig& a);

/// Advances the front; throws if the move is not applicable or the result
/// leaves the wall space.
ClockConfig apply_move(const Dims& d, const ClockConfig& a, const BrickMove& m);
/// Removes the brick (inverse of apply_move).
ClockConfig apply_move_reverse(const Dims& d, const ClockConfig& a, const BrickMove& m);

ClockConfig flat_wall(const Dims& d);

/// Monotone staircase wall with exactly one applicable brick (a boundary
/// half brick): column k sits at row h - k.
ClockConfig staircase_config(const Dims& d);

/// All valid configurations in lexicographic front order, with the brick
/// grading obtained by breadth-first search from the flat wall. Construction
/// verifies that the move graph is connected and graded modulo g.
class Lattice {
 public:
  explicit Lattice(Dims d);

  const Dims& dims() const { return dims_; }
  int size() const { return static_cast<int>(configs_.size()); }
  int g() const { return dims_.bricks_per_wrap(); }
  const ClockConfig& config(int i) const { return configs_[i]; }
  int index_of(const ClockConfig& a) const;  // throws if not a valid config
  /// Bricks laid from the flat wall within one wrap, in [0, g).
  int brick_count(int i) const { return level_[i]; }

  int flat_index() const { return flat_; }
  int staircase_index() const;

  struct Edge {
    int target;
    BrickMove move;
  };
  const std::vector<Edge>& forward_edges(int i) const { return fwd_[i]; }
  const std::vector<Edge>& backward_edges(int i) const { return bwd_[i]; }

  /// One row per config: index, j_0..j_{h-1}, brick_count.
  std::string to_csv() const;

 private:
  Dims dims_;
  std::vector<ClockConfig> configs_;
  std::map<std::vector<int>, int> index_;
  std::vector<int> level_;
  std::vector<std::vector<Edge>> fwd_;
  std::vector<std::vector<Edge>> bwd_;
  int flat_ = -1;
};

}  // namespace ergo
