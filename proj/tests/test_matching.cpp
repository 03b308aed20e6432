#include <cmath>
#include <doctest.h>
#include <map>

#include "cliquewalk/matching.hpp"

using namespace cliquewalk;

namespace {

matching::PlacementInstance instance(std::vector<std::vector<double>> rows) {
  matching::PlacementInstance inst;
  int r = static_cast<int>(rows.size());
  inst.b = Mat(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) inst.b.at(i, j) = rows[i][j];
  return inst;
}

double tv(const std::map<std::vector<int>, double>& a,
          const std::map<std::vector<int>, double>& b) {
  double d = 0.0;
  for (const auto& [k, p] : a) {
    auto it = b.find(k);
    d += std::fabs(p - (it == b.end() ? 0.0 : it->second));
  }
  for (const auto& [k, p] : b) {
    if (!a.count(k)) d += p;
  }
  return d / 2.0;
}

}  // namespace

TEST_SUITE("matching") {

TEST_CASE("single pairing") {
  auto inst = instance({{2.5}});
  Rng rng(1);
  for (int i = 0; i < 5; ++i) {
    auto a = matching::sample_matching(inst, rng);
    REQUIRE(a.size() == 1);
    CHECK(a[0] == 0);
  }
}

TEST_CASE("two-by-two frequencies match the weights") {
  auto inst = instance({{1, 2}, {3, 4}});
  auto dist = matching::matching_distribution(inst);
  CHECK(dist.at({0, 1}) == doctest::Approx(0.4));
  CHECK(dist.at({1, 0}) == doctest::Approx(0.6));

  Rng rng(2);
  int id_count = 0;
  const int kRuns = 100000;
  for (int i = 0; i < kRuns; ++i) {
    auto a = matching::sample_matching(inst, rng);
    if (a[0] == 0) ++id_count;
  }
  CHECK(static_cast<double>(id_count) / kRuns == doctest::Approx(0.4).epsilon(0.03));
}

TEST_CASE("distribution corner cases") {
  auto diag = instance({{1, 0, 0}, {0, 5, 0}, {0, 0, 2}});
  auto d = matching::matching_distribution(diag);
  REQUIRE(d.size() == 1);
  CHECK(d.at({0, 1, 2}) == doctest::Approx(1.0));

  auto ones = instance({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
  auto du = matching::matching_distribution(ones);
  REQUIRE(du.size() == 6);
  for (const auto& [k, p] : du) CHECK(p == doctest::Approx(1.0 / 6.0));
}

TEST_CASE("sampler agrees with enumeration on random instances") {
  Rng gen(3);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<std::vector<double>> rows(3, std::vector<double>(3));
    for (auto& row : rows)
      for (auto& x : row) x = 0.05 + gen.uniform();
    auto inst = instance(rows);
    auto exact = matching::matching_distribution(inst);

    std::map<std::vector<int>, double> freq;
    Rng rng(100 + trial);
    const int kRuns = 100000;
    for (int i = 0; i < kRuns; ++i) {
      ++freq[matching::sample_matching(inst, rng)];
    }
    for (auto& [k, v] : freq) v /= kRuns;
    CHECK(tv(exact, freq) <= 0.02);
  }
}

TEST_CASE("row and column scaling leave the distribution unchanged") {
  auto inst = instance({{1, 2, 3}, {2, 1, 4}, {3, 3, 1}});
  auto base = matching::matching_distribution(inst);

  auto scaled = inst;
  for (int j = 0; j < 3; ++j) scaled.b.at(1, j) *= 8.0;   // row by 8
  for (int i = 0; i < 3; ++i) scaled.b.at(i, 2) *= 0.25;  // column by 1/4
  auto after = matching::matching_distribution(scaled);
  for (const auto& [k, p] : base) {
    CHECK(after.at(k) == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("error paths") {
  auto zero_col = instance({{1, 0}, {2, 0}});
  Rng rng(4);
  CHECK_THROWS_AS(matching::sample_matching(zero_col, rng), matching::ZeroPermanent);
  CHECK_THROWS_WITH_AS(matching::sample_matching(zero_col, rng),
                       doctest::Contains("column 1"), matching::ZeroPermanent);

  matching::PlacementInstance big;
  big.b = Mat(13, 13);
  CHECK_THROWS_AS(matching::sample_matching(big, rng), matching::CapExceeded);

  matching::PlacementInstance nine;
  nine.b = Mat(9, 9);
  CHECK_THROWS_AS(matching::matching_distribution(nine), matching::TooLarge);
}

TEST_CASE("consistency at r = 4") {
  Rng gen(5);
  std::vector<std::vector<double>> rows(4, std::vector<double>(4));
  for (auto& row : rows)
    for (auto& x : row) x = 0.1 + gen.uniform();
  auto inst = instance(rows);
  auto exact = matching::matching_distribution(inst);
  std::map<std::vector<int>, double> freq;
  Rng rng(6);
  const int kRuns = 100000;
  for (int i = 0; i < kRuns; ++i) ++freq[matching::sample_matching(inst, rng)];
  for (auto& [k, v] : freq) v /= kRuns;
  CHECK(tv(exact, freq) <= 0.02);
}

}  // TEST_SUITE
