#include "ergo/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace ergo {

void Dims::validate() const {
  if (h < 2 || h % 2 != 0) throw std::invalid_argument("dims: h must be a positive even integer >= 2");
  if (c < 2 || c % 2 != 0) throw std::invalid_argument("dims: c must be a positive even integer");
  if (c <= 2 * h) throw std::invalid_argument("dims: c > 2h required");
}

std::optional<int> cyclic_step(int from, int to, int c) {
  int d = ((to - from) % c + c) % c;
  if (d == 0) return 0;
  if (d == 1) return 1;
  if (d == c - 1) return -1;
  return std::nullopt;
}

bool is_valid(const Dims& d, const ClockConfig& a) {
  if (static_cast<int>(a.front.size()) != d.h) return false;
  for (int j : a.front)
    if (j < 0 || j >= d.c) return false;
  for (int k = 0; k + 1 < d.h; ++k) {
    auto step = cyclic_step(a.front[k], a.front[k + 1], d.c);
    if (!step) return false;
    int ck = (a.front[k] + k) % 2;
    // ck == 0: the next column may not be ahead; ck == 1: may not be behind
    if (ck == 0 && *step > 0) return false;
    if (ck == 1 && *step < 0) return false;
  }
  return true;
}

double BrickMove::weight() const {
  return kind == MoveKind::Full ? 1.0 : 1.0 / std::sqrt(2.0);
}

namespace {

void require_valid(const Dims& d, const ClockConfig& a, const char* who) {
  if (!is_valid(d, a)) throw std::invalid_argument(std::string(who) + ": invalid clock configuration");
}

}  // namespace

std::vector<BrickMove> forward_moves(const Dims& d, const ClockConfig& a) {
  require_valid(d, a, "forward_moves");
  std::vector<BrickMove> out;
  for (int k = 0; k + 1 < d.h; ++k) {
    int j = a.front[k];
    if (a.front[k + 1] == j && (j + k) % 2 == 0) out.push_back({MoveKind::Full, j, k});
  }
  if (a.front[0] % 2 == 1) out.push_back({MoveKind::HalfLeft, a.front[0], 0});
  if (a.front[d.h - 1] % 2 == 1) out.push_back({MoveKind::HalfRight, a.front[d.h - 1], d.h - 1});
  return out;
}

std::vector<BrickMove> backward_moves(const Dims& d, const ClockConfig& a) {
  require_valid(d, a, "backward_moves");
  std::vector<BrickMove> out;
  for (int k = 0; k + 1 < d.h; ++k) {
    int j = a.front[k];
    // removable brick whose top row is the current front: base row j-1, (j-1+k) even
    if (a.front[k + 1] == j && (j + k) % 2 == 1) out.push_back({MoveKind::Full, (j - 1 + d.c) % d.c, k});
  }
  if (a.front[0] % 2 == 0) out.push_back({MoveKind::HalfLeft, (a.front[0] - 1 + d.c) % d.c, 0});
  if (a.front[d.h - 1] % 2 == 0)
    out.push_back({MoveKind::HalfRight, (a.front[d.h - 1] - 1 + d.c) % d.c, d.h - 1});
  return out;
}

ClockConfig apply_move(const Dims& d, const ClockConfig& a, const BrickMove& m) {
  auto moves = forward_moves(d, a);
  if (std::find(moves.begin(), moves.end(), m) == moves.end())
    throw std::invalid_argument("apply_move: move not applicable");
  ClockConfig b = a;
  if (m.kind == MoveKind::Full) {
    b.front[m.col] = (b.front[m.col] + 1) % d.c;
    b.front[m.col + 1] = (b.front[m.col + 1] + 1) % d.c;
  } else {
    b.front[m.col] = (b.front[m.col] + 1) % d.c;
  }
  if (!is_valid(d, b)) throw std::logic_error("apply_move: result left the wall space");
  return b;
}

ClockConfig apply_move_reverse(const Dims& d, const ClockConfig& a, const BrickMove& m) {
  auto moves = backward_moves(d, a);
  if (std::find(moves.begin(), moves.end(), m) == moves.end())
    throw std::invalid_argument("apply_move_reverse: move not removable");
  ClockConfig b = a;
  if (m.kind == MoveKind::Full) {
    b.front[m.col] = (b.front[m.col] - 1 + d.c) % d.c;
    b.front[m.col + 1] = (b.front[m.col + 1] - 1 + d.c) % d.c;
  } else {
    b.front[m.col] = (b.front[m.col] - 1 + d.c) % d.c;
  }
  if (!is_valid(d, b)) throw std::logic_error("apply_move_reverse: result left the wall space");
  return b;
}

ClockConfig flat_wall(const Dims& d) {
  d.validate();
  return ClockConfig{std::vector<int>(d.h, 0)};
}

ClockConfig staircase_config(const Dims& d) {
  d.validate();
  ClockConfig a;
  a.front.resize(d.h);
  for (int k = 0; k < d.h; ++k) a.front[k] = d.h - k;
  return a;
}

Lattice::Lattice(Dims d) : dims_(d) {
  dims_.validate();
  // depth-first extension column by column; only cyclic steps allowed by the
  // parity rule can continue a prefix
  std::vector<std::vector<int>> found;
  std::vector<int> prefix;
  prefix.reserve(d.h);
  auto extend = [&](auto&& self) -> void {
    if (static_cast<int>(prefix.size()) == d.h) {
      found.push_back(prefix);
      return;
    }
    int k = static_cast<int>(prefix.size()) - 1;
    int prev = prefix.back();
    int ck = (prev + k) % 2;
    for (int s = -1; s <= 1; ++s) {
      if (ck == 0 && s > 0) continue;
      if (ck == 1 && s < 0) continue;
      prefix.push_back(((prev + s) % d.c + d.c) % d.c);
      self(self);
      prefix.pop_back();
    }
  };
  for (int j0 = 0; j0 < d.c; ++j0) {
    prefix.assign(1, j0);
    extend(extend);
  }
  std::sort(found.begin(), found.end());
  configs_.reserve(found.size());
  for (auto& f : found) {
    index_.emplace(f, static_cast<int>(configs_.size()));
    configs_.push_back(ClockConfig{std::move(f)});
  }

  int n = size();
  fwd_.resize(n);
  bwd_.resize(n);
  for (int i = 0; i < n; ++i) {
    for (const auto& m : forward_moves(dims_, configs_[i])) {
      ClockConfig b = apply_move(dims_, configs_[i], m);
      auto it = index_.find(b.front);
      if (it == index_.end()) throw std::logic_error("lattice: forward move left the enumerated set");
      fwd_[i].push_back({it->second, m});
    }
    for (const auto& m : backward_moves(dims_, configs_[i])) {
      ClockConfig b = apply_move_reverse(dims_, configs_[i], m);
      auto it = index_.find(b.front);
      if (it == index_.end()) throw std::logic_error("lattice: backward move left the enumerated set");
      bwd_[i].push_back({it->second, m});
    }
  }

  flat_ = index_of(flat_wall(dims_));
  level_.assign(n, -1);
  level_[flat_] = 0;
  std::deque<int> queue{flat_};
  int gg = g();
  while (!queue.empty()) {
    int i = queue.front();
    queue.pop_front();
    for (const auto& e : fwd_[i]) {
      int lvl = (level_[i] + 1) % gg;
      if (level_[e.target] < 0) {
        level_[e.target] = lvl;
        queue.push_back(e.target);
      } else if (level_[e.target] != lvl) {
        throw std::logic_error("lattice: move graph is not graded modulo g");
      }
    }
  }
  for (int i = 0; i < n; ++i)
    if (level_[i] < 0) throw std::logic_error("lattice: move graph is not connected");
}

int Lattice::index_of(const ClockConfig& a) const {
  auto it = index_.find(a.front);
  if (it == index_.end()) throw std::invalid_argument("lattice: not a valid clock configuration");
  return it->second;
}

int Lattice::staircase_index() const { return index_of(staircase_config(dims_)); }

std::string Lattice::to_csv() const {
  std::ostringstream os;
  os << "index";
  for (int k = 0; k < dims_.h; ++k) os << ",j_" << k;
  os << ",brick_count\n";
  for (int i = 0; i < size(); ++i) {
    os << i;
    for (int j : configs_[i].front) os << ',' << j;
    os << ',' << level_[i] << '\n';
  }
  return os.str();
}

}  // namespace ergo
