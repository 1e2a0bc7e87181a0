#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "ergo/lattice.hpp"

using namespace ergo;

namespace {

// independent oracle: filter every column assignment by the wall conditions
std::vector<ClockConfig> brute_force_configs(const Dims& d) {
  std::vector<ClockConfig> out;
  std::vector<int> front(d.h, 0);
  long long total = 1;
  for (int k = 0; k < d.h; ++k) total *= d.c;
  for (long long idx = 0; idx < total; ++idx) {
    long long rest = idx;
    for (int k = 0; k < d.h; ++k) {
      front[k] = static_cast<int>(rest % d.c);
      rest /= d.c;
    }
    ClockConfig a{front};
    if (is_valid(d, a)) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int count_kind(const std::vector<BrickMove>& moves, MoveKind kind) {
  return static_cast<int>(std::count_if(moves.begin(), moves.end(),
                                        [&](const BrickMove& m) { return m.kind == kind; }));
}

}  // namespace

TEST_CASE("dimension validation") {
  CHECK_THROWS(Dims{3, 10}.validate());
  CHECK_THROWS(Dims{2, 7}.validate());
  CHECK_THROWS(Dims{2, 4}.validate());   // c > 2h
  CHECK_THROWS(Dims{4, 8}.validate());
  CHECK_NOTHROW(Dims{2, 6}.validate());
  CHECK_NOTHROW(Dims{4, 10}.validate());
  CHECK(Dims{2, 6}.bricks_per_wrap() == 9);
}

TEST_CASE("enumeration matches the brute-force oracle") {
  for (Dims d : {Dims{2, 6}, Dims{2, 8}, Dims{4, 10}}) {
    Lattice lat(d);
    auto oracle = brute_force_configs(d);
    REQUIRE(lat.size() == static_cast<int>(oracle.size()));
    for (int i = 0; i < lat.size(); ++i) CHECK(lat.config(i) == oracle[i]);
  }
}

TEST_CASE("frozen configuration counts") {
  CHECK(Lattice(Dims{2, 6}).size() == 12);
  CHECK(Lattice(Dims{2, 8}).size() == 16);
  CHECK(Lattice(Dims{4, 10}).size() == 80);  // regression value from the oracle
}

TEST_CASE("flat wall is enumerated and graded zero") {
  Lattice lat(Dims{2, 6});
  int i = lat.index_of(flat_wall(lat.dims()));
  CHECK(lat.brick_count(i) == 0);
}

TEST_CASE("flat wall moves") {
  Dims d{2, 6};
  ClockConfig flat = flat_wall(d);
  auto fwd = forward_moves(d, flat);
  REQUIRE(fwd.size() == 1);
  CHECK(fwd[0] == BrickMove{MoveKind::Full, 0, 0});

  // removing a brick from the flat wall peels one of the wrap-closing
  // boundary halves; the weighted counting identity still balances
  auto bwd = backward_moves(d, flat);
  REQUIRE(bwd.size() == 2);
  CHECK(count_kind(bwd, MoveKind::HalfLeft) == 1);
  CHECK(count_kind(bwd, MoveKind::HalfRight) == 1);
  CHECK(bwd[0].row == 5);
}

TEST_CASE("apply_move examples") {
  Dims d{2, 6};
  ClockConfig a = apply_move(d, flat_wall(d), {MoveKind::Full, 0, 0});
  CHECK(a == ClockConfig{{1, 1}});
  ClockConfig b = apply_move(d, a, {MoveKind::HalfLeft, 1, 0});
  CHECK(b == ClockConfig{{2, 1}});
  CHECK_THROWS(apply_move(d, b, {MoveKind::Full, 2, 0}));
}

TEST_CASE("closure and counting identity on all configurations") {
  for (Dims d : {Dims{2, 6}, Dims{2, 8}, Dims{4, 10}}) {
    Lattice lat(d);
    for (int i = 0; i < lat.size(); ++i) {
      const ClockConfig& a = lat.config(i);
      auto fwd = forward_moves(d, a);
      auto bwd = backward_moves(d, a);
      long long f2 = 0, b2 = 0;
      for (const auto& m : fwd) {
        CHECK_NOTHROW(lat.index_of(apply_move(d, a, m)));
        f2 += m.kind == MoveKind::Full ? 2 : 1;
      }
      for (const auto& m : bwd) {
        CHECK_NOTHROW(lat.index_of(apply_move_reverse(d, a, m)));
        b2 += m.kind == MoveKind::Full ? 2 : 1;
      }
      CHECK(f2 == b2);
    }
  }
}

TEST_CASE("grading: every move raises the brick count by one mod g") {
  for (Dims d : {Dims{2, 6}, Dims{4, 10}}) {
    Lattice lat(d);
    int g = lat.g();
    for (int i = 0; i < lat.size(); ++i)
      for (const auto& e : lat.forward_edges(i))
        CHECK(lat.brick_count(e.target) == (lat.brick_count(i) + 1) % g);
  }
}

TEST_CASE("a g-step walk from the flat wall returns to it") {
  Dims d{2, 6};
  Lattice lat(d);
  int cur = lat.flat_index();
  for (int s = 0; s < lat.g(); ++s) cur = lat.forward_edges(cur).front().target;
  CHECK(cur == lat.flat_index());
}

TEST_CASE("boundary pattern identity") {
  for (Dims d : {Dims{2, 6}, Dims{4, 10}}) {
    Lattice lat(d);
    for (int i = 0; i < lat.size(); ++i) {
      const ClockConfig& a = lat.config(i);
      std::vector<int> ck(d.h);
      for (int k = 0; k < d.h; ++k) ck[k] = (a.front[k] + k) % 2;
      int n10 = 0, n01 = 0;
      for (int k = 0; k + 1 < d.h; ++k) {
        if (ck[k] == 1 && ck[k + 1] == 0) ++n10;
        if (ck[k] == 0 && ck[k + 1] == 1) ++n01;
      }
      CHECK(std::abs(n10 - n01) <= 1);
      auto fwd = forward_moves(d, a);
      auto bwd = backward_moves(d, a);
      int fwd_half = count_kind(fwd, MoveKind::HalfLeft) + count_kind(fwd, MoveKind::HalfRight);
      int bwd_half = count_kind(bwd, MoveKind::HalfLeft) + count_kind(bwd, MoveKind::HalfRight);
      if (n10 == n01) {
        CHECK(fwd_half == 1);
        CHECK(bwd_half == 1);
      } else if (n10 == n01 + 1) {
        CHECK(fwd_half == 2);
        CHECK(bwd_half == 0);
      } else {
        CHECK(fwd_half == 0);
        CHECK(bwd_half == 2);
      }
    }
  }
}

TEST_CASE("staircase wall contract") {
  for (Dims d : {Dims{2, 6}, Dims{2, 20}, Dims{4, 10}}) {
    Lattice lat(d);
    ClockConfig a = staircase_config(d);
    CHECK_NOTHROW(lat.index_of(a));
    auto fwd = forward_moves(d, a);
    REQUIRE(fwd.size() == 1);
    CHECK(fwd[0].kind == MoveKind::HalfRight);
    CHECK(fwd[0].weight() == doctest::Approx(1.0 / std::sqrt(2.0)));
    ClockConfig ap = apply_move(d, a, fwd[0]);
    CHECK(backward_moves(d, ap).size() == 2);
  }
}

TEST_CASE("csv export shape") {
  Lattice lat(Dims{2, 6});
  std::string csv = lat.to_csv();
  CHECK(csv.rfind("index,j_0,j_1,brick_count\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);  // header + 12 rows
}

TEST_CASE("invalid configurations are rejected") {
  Dims d{2, 6};
  CHECK_THROWS(forward_moves(d, ClockConfig{{0, 3}}));
  CHECK_THROWS(backward_moves(d, ClockConfig{{0, 1}}));  // parity rule violated
  CHECK(!is_valid(d, ClockConfig{{0, 1}}));
  CHECK(is_valid(d, ClockConfig{{1, 1}}));
  CHECK(is_valid(d, ClockConfig{{5, 0}}));
  CHECK(is_valid(d, ClockConfig{{0, 5}}));
}
