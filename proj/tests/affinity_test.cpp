#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "mca/affinity.hpp"

using namespace mca;

namespace {

// Independent oracle: probability that at least one of the independent
// events fires, by summing over all firing patterns.
double inclusion_oracle(const std::vector<double>& c) {
  const std::size_t n = c.size();
  double none = 0.0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    double p = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      p *= (mask >> k & 1U) ? c[k] : 1.0 - c[k];
    }
    if (mask == 0) {
      none = p;
    }
  }
  return 1.0 - none;
}

Detection det(int person, double x0) { return Detection{0, 0, person, {x0, 0, x0 + 100, 100}}; }

KeypointMatch km(double c) { return {Vec2::Zero(), Vec2::Zero(), c}; }

}  // namespace

TEST(M4, Examples) {
  EXPECT_DOUBLE_EQ(affinity_m4(std::vector<double>{}), 0.0);
  EXPECT_DOUBLE_EQ(affinity_m4(std::vector<double>{0.5, 0.5}), 0.75);
  EXPECT_NEAR(affinity_m4(std::vector<double>{0.9, 0.2, 0.1}), 1.0 - 0.1 * 0.8 * 0.9, 1e-15);
  EXPECT_DOUBLE_EQ(affinity_m4(std::vector<double>{0.3, 1.0}), 1.0);
}

TEST(M4, RejectsConfidenceOutsideUnitInterval) {
  EXPECT_THROW((void)affinity_m4(std::vector<double>{1.2}), std::invalid_argument);
  EXPECT_THROW((void)affinity_m4(std::vector<double>{std::nan("")}), std::invalid_argument);
}

TEST(M4, MatchesEnumerationOracleProperty) {
  gen::Rng rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    const auto c = gen::confidences(rng, gen::uniform_int(rng, 0, 10));
    EXPECT_NEAR(affinity_m4(c), inclusion_oracle(c), 1e-12);
  }
}

TEST(M4, PermutationInvariantProperty) {
  gen::Rng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    auto c = gen::confidences(rng, gen::uniform_int(rng, 1, 30));
    const double before = affinity_m4(c);
    std::shuffle(c.begin(), c.end(), rng);
    EXPECT_NEAR(affinity_m4(c), before, 1e-14);
  }
}

TEST(M4, BoundedAndMonotoneProperty) {
  gen::Rng rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    auto c = gen::confidences(rng, gen::uniform_int(rng, 1, 20));
    const double base = affinity_m4(c);
    EXPECT_GE(base, *std::max_element(c.begin(), c.end()) - 1e-15);
    EXPECT_LE(base, 1.0);
    // Adding evidence never lowers the value.
    c.push_back(gen::uniform(rng, 0, 1));
    EXPECT_GE(affinity_m4(c), base - 1e-15);
    // Raising one confidence never lowers the value.
    c[0] = std::min(1.0, c[0] + 0.1);
    EXPECT_GE(affinity_m4(c), base - 1e-15);
  }
}

TEST(M4, MatchOverloadAgrees) {
  const std::vector<KeypointMatch> ms{km(0.2), km(0.4)};
  EXPECT_DOUBLE_EQ(affinity_m4(ms), affinity_m4(std::vector<double>{0.2, 0.4}));
}

TEST(M5, MeanOfWindow) {
  const std::vector<FrameAffinity> w{{0, 0.9}, {5, 0.3}, {10, 0.6}};
  EXPECT_NEAR(affinity_m5(w), 0.6, 1e-15);
  EXPECT_THROW((void)affinity_m5(std::vector<FrameAffinity>{}), std::invalid_argument);
}

TEST(M5, WithinMinMaxProperty) {
  gen::Rng rng(44);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<FrameAffinity> w;
    const int n = gen::uniform_int(rng, 1, 8);
    for (int k = 0; k < n; ++k) {
      w.push_back({k, gen::uniform(rng, 0, 1)});
    }
    const auto [lo, hi] = std::minmax_element(
        w.begin(), w.end(), [](const auto& l, const auto& r) { return l.value < r.value; });
    const double v = affinity_m5(w);
    EXPECT_GE(v, lo->value - 1e-15);
    EXPECT_LE(v, hi->value + 1e-15);
  }
}

TEST(Metric, ParseAndPrint) {
  EXPECT_EQ(parse_metric("m5"), AffinityMetric::M5);
  EXPECT_EQ(parse_metric("M4"), AffinityMetric::M4);
  EXPECT_EQ(to_string(AffinityMetric::M5), "M5");
  EXPECT_THROW((void)parse_metric("M6"), std::invalid_argument);
}

TEST(Matrix, M4CellsAndZeros) {
  const std::vector<Detection> a{det(1, 0), det(2, 200)};
  const std::vector<Detection> b{det(5, 0), det(6, 200), det(7, 400)};
  GroupedMatches g;
  g[{0, 1}] = {km(0.5), km(0.5)};
  g[{1, 2}] = {km(0.1)};
  const auto A = build_affinity_m4(3, a, b, g);
  ASSERT_EQ(A.values.rows(), 2);
  ASSERT_EQ(A.values.cols(), 3);
  EXPECT_DOUBLE_EQ(A.values(0, 1), 0.75);
  EXPECT_DOUBLE_EQ(A.values(1, 2), 0.1);
  EXPECT_DOUBLE_EQ(A.values(0, 0), 0.0);
  EXPECT_EQ(A.row_person_ids, (std::vector<int>{1, 2}));
  EXPECT_EQ(A.col_person_ids, (std::vector<int>{5, 6, 7}));
  g[{2, 0}] = {km(0.1)};
  EXPECT_THROW((void)build_affinity_m4(3, a, b, g), std::out_of_range);
}

TEST(Matrix, EmptySides) {
  const auto A = build_affinity_m4(0, {}, {det(1, 0)}, {});
  EXPECT_EQ(A.values.rows(), 0);
  EXPECT_EQ(A.values.cols(), 1);
}

TEST(Builder, M5AveragesOverFramesWhereBothPresent) {
  AffinityBuilder builder(AffinityMetric::M5, 3);
  const std::vector<Detection> a{det(1, 0)};
  const std::vector<Detection> b{det(5, 0)};
  const std::vector<Detection> b2{det(6, 0)};
  GroupedMatches g;
  g[{0, 0}] = {km(0.9)};
  EXPECT_NEAR(builder.build(0, a, b, g).values(0, 0), 0.9, 1e-15);
  g[{0, 0}] = {km(0.3)};
  EXPECT_NEAR(builder.build(5, a, b, g).values(0, 0), 0.6, 1e-15);
  // Person 5 absent from camera B in frame 10: pair (1,5) keeps its history.
  (void)builder.build(10, a, b2, g);
  g[{0, 0}] = {km(0.0)};
  const auto A = builder.build(15, a, b, g);
  // Window holds frames 5, 10, 15; pair (1,5) present in 5 and 15.
  EXPECT_NEAR(A.values(0, 0), 0.15, 1e-15);
  EXPECT_EQ(A.metric, AffinityMetric::M5);
  EXPECT_EQ(builder.history(1, 5).size(), 2u);
  EXPECT_EQ(builder.history(1, 6).size(), 1u);
}

TEST(Builder, WindowOneEqualsM4Property) {
  gen::Rng rng(45);
  AffinityBuilder m5(AffinityMetric::M5, 1);
  AffinityBuilder m4(AffinityMetric::M4);
  const std::vector<Detection> a{det(1, 0), det(2, 200)};
  const std::vector<Detection> b{det(5, 0), det(6, 200)};
  for (int f = 0; f < 20; ++f) {
    GroupedMatches g;
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        g[{i, j}] = {km(gen::uniform(rng, 0, 1))};
      }
    }
    EXPECT_EQ(m5.build(f, a, b, g).values, m4.build(f, a, b, g).values);
  }
}

TEST(Builder, PresencePatternEnumeration) {
  // Camera B shows person 5 or person 9 in each of 4 frames; every pattern.
  for (unsigned pattern = 0; pattern < 16; ++pattern) {
    AffinityBuilder builder(AffinityMetric::M5, 3);
    const double values[4] = {0.8, 0.2, 0.5, 0.1};
    AffinityMatrix last;
    for (int f = 0; f < 4; ++f) {
      const bool five = (pattern >> f & 1U) != 0;
      GroupedMatches g;
      g[{0, 0}] = {km(values[f])};
      last = builder.build(f, {det(1, 0)}, {det(five ? 5 : 9, 0)}, g);
    }
    // The window holds frames 1..3; average where the final person was shown.
    const bool final_five = (pattern >> 3 & 1U) != 0;
    double sum = 0.0;
    int count = 0;
    for (int f = 1; f < 4; ++f) {
      if (((pattern >> f & 1U) != 0) == final_five) {
        sum += values[f];
        ++count;
      }
    }
    EXPECT_NEAR(last.values(0, 0), sum / count, 1e-15) << "pattern " << pattern;
  }
}

TEST(Builder, RejectsNonIncreasingFramesAndBadWindow) {
  AffinityBuilder builder(AffinityMetric::M5);
  (void)builder.build(5, {det(1, 0)}, {det(2, 0)}, {});
  EXPECT_THROW((void)builder.build(5, {det(1, 0)}, {det(2, 0)}, {}), std::invalid_argument);
  EXPECT_THROW(AffinityBuilder(AffinityMetric::M5, 0), std::invalid_argument);
}

TEST(Builder, EntriesWithinUnitIntervalProperty) {
  gen::Rng rng(46);
  for (const auto metric : {AffinityMetric::M4, AffinityMetric::M5}) {
    AffinityBuilder builder(metric, 3);
    for (int f = 0; f < 10; ++f) {
      std::vector<Detection> a;
      std::vector<Detection> b;
      const int na = gen::uniform_int(rng, 0, 4);
      const int nb = gen::uniform_int(rng, 0, 4);
      for (int k = 0; k < na; ++k) {
        a.push_back(det(gen::uniform_int(rng, 1, 6) + 10 * k, 0));
      }
      for (int k = 0; k < nb; ++k) {
        b.push_back(det(gen::uniform_int(rng, 1, 6) + 10 * k, 0));
      }
      GroupedMatches g;
      for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
          std::vector<KeypointMatch> ms;
          for (const double c : gen::confidences(rng, gen::uniform_int(rng, 0, 5))) {
            ms.push_back(km(c));
          }
          g[{i, j}] = ms;
        }
      }
      const auto A = builder.build(f, a, b, g);
      if (A.values.size() > 0) {
        EXPECT_GE(A.values.minCoeff(), 0.0);
        EXPECT_LE(A.values.maxCoeff(), 1.0);
      }
    }
  }
}

TEST(Matrix, DumpHasOneRowPerCell) {
  const auto A = build_affinity_m4(7, {det(1, 0)}, {det(5, 0), det(6, 0)}, {});
  std::ostringstream out;
  write_affinity(out, A);
  EXPECT_EQ(out.str(), "frame_id,row,col,person_a,person_b,affinity\n7,0,0,1,5,0\n7,0,1,1,6,0\n");
}
