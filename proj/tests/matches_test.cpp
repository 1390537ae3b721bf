#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "generators.hpp"
#include "mca/matches.hpp"
#include "temp_dir.hpp"

using namespace mca;

namespace {

MatchSet sample_set() {
  MatchSet ms;
  ms.frame_id = 35;
  ms.camera_a = 1;
  ms.camera_b = 4;
  ms.size_b = {640, 360};
  ms.matches = {{Vec2(10.5, 20.25), Vec2(30, 40), 0.9},
                {Vec2(0.1, 1e-3), Vec2(1279.9, 719.5), 0.0},
                {Vec2(1.0 / 3.0, 2.0 / 7.0), Vec2(5, 6), 1.0}};
  return ms;
}

Homography shift_x(double dx) {
  Homography h;
  h.H(0, 2) = dx;
  h.src_camera = 1;
  h.dst_camera = 2;
  return h;
}

Detection det(double x0, double y0, double x1, double y1, int person = 0) {
  return Detection{0, 0, person, {x0, y0, x1, y1}};
}

}  // namespace

TEST(MatchFormat, RoundTripIsExact) {
  const MatchSet ms = sample_set();
  std::ostringstream out;
  write_matches(out, ms);
  EXPECT_EQ(parse_matches(out.str()), ms);
}

TEST(MatchFormat, RoundTripProperty) {
  gen::Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    MatchSet ms;
    ms.frame_id = gen::uniform_int(rng, 0, 2000);
    ms.camera_a = gen::uniform_int(rng, 1, 3);
    ms.camera_b = gen::uniform_int(rng, 4, 7);
    const int n = gen::uniform_int(rng, 0, 40);
    for (int k = 0; k < n; ++k) {
      ms.matches.push_back({gen::point_in(rng, 1280, 720), gen::point_in(rng, 1280, 720),
                            gen::uniform(rng, 0, 1)});
    }
    std::ostringstream out;
    write_matches(out, ms);
    EXPECT_EQ(parse_matches(out.str()), ms);
  }
}

TEST(MatchFormat, FileRoundTrip) {
  testing_support::TempDir tmp;
  const auto path = tmp.path() / "m" / "00000035.txt";
  write_matches(path, sample_set());
  EXPECT_EQ(load_matches(path), sample_set());
  EXPECT_THROW((void)load_matches(tmp.path() / "none.txt"), ParseError);
}

TEST(MatchFormat, BlankLinesAndCrlfTolerated) {
  const std::string text =
      "MCAMATCH 1 frame_id=0 camera_a=1 camera_b=2 size_a=1280x720 size_b=1280x720\r\n"
      "\r\n1,2,3,4,0.5\r\n\n";
  const auto ms = parse_matches(text);
  ASSERT_EQ(ms.matches.size(), 1u);
  EXPECT_DOUBLE_EQ(ms.matches[0].confidence, 0.5);
}

TEST(MatchFormat, HeaderErrors) {
  EXPECT_THROW((void)parse_matches(""), ParseError);
  EXPECT_THROW((void)parse_matches("MATCHES 1 frame_id=0"), ParseError);
  EXPECT_THROW((void)parse_matches("MCAMATCH 2 frame_id=0 camera_a=1 camera_b=2 size_a=1x1 size_b=1x1"),
               ParseError);
  EXPECT_THROW((void)parse_matches("MCAMATCH 1 frame_id=0 camera_a=1 camera_b=2 size_a=1x1"),
               ParseError);
  EXPECT_THROW((void)parse_matches("MCAMATCH 1 frame_id=0 camera_a=1 camera_b=1 size_a=1x1 size_b=1x1"),
               ParseError);
  EXPECT_THROW(
      (void)parse_matches("MCAMATCH 1 frame_id=0 camera_a=1 camera_b=2 size_a=0x1 size_b=1x1"),
      ParseError);
}

TEST(MatchFormat, RecordErrorsCarryLineNumber) {
  const std::string header =
      "MCAMATCH 1 frame_id=0 camera_a=1 camera_b=2 size_a=1280x720 size_b=1280x720\n";
  auto row_of = [&](const std::string& body) -> std::size_t {
    try {
      (void)parse_matches(header + body);
    } catch (const ValidationError& e) {
      return e.row();
    }
    return 0;
  };
  EXPECT_EQ(row_of("1,2,3,4,0.5\n1,2,3,4\n"), 3u);
  EXPECT_EQ(row_of("1,2,3,4,0.5,9\n"), 2u);
  EXPECT_EQ(row_of("1,2,3,4,0.5\n\n1,2,3,4,1.5\n"), 4u);
  EXPECT_EQ(row_of("nan,2,3,4,0.5\n"), 2u);
  EXPECT_EQ(row_of("1,2,inf,4,0.5\n"), 2u);
  EXPECT_EQ(row_of("1,2,x,4,0.5\n"), 2u);
  EXPECT_EQ(row_of("1,2,3,4,-0.01\n"), 2u);
}

TEST(Filter, ThresholdInclusiveAndOrderPreserving) {
  const MatchSet ms = sample_set();
  const auto kept = filter_by_confidence(ms, 0.9);
  ASSERT_EQ(kept.matches.size(), 2u);
  EXPECT_EQ(kept.matches[0], ms.matches[0]);
  EXPECT_EQ(kept.matches[1], ms.matches[2]);
  EXPECT_EQ(filter_by_confidence(ms, 0.0).matches.size(), 3u);
  EXPECT_THROW((void)filter_by_confidence(ms, 1.1), std::invalid_argument);
}

TEST(Filter, MonotoneInThresholdProperty) {
  gen::Rng rng(22);
  MatchSet ms;
  for (int k = 0; k < 200; ++k) {
    ms.matches.push_back({Vec2::Zero(), Vec2::Zero(), gen::uniform(rng, 0, 1)});
  }
  std::size_t last = ms.matches.size();
  for (double t = 0.0; t <= 1.0; t += 0.05) {
    const auto n = filter_by_confidence(ms, t).matches.size();
    EXPECT_LE(n, last);
    last = n;
  }
}

TEST(OverlapMask, HalfOverlapOracle) {
  // Camera B sees the right half of A shifted left by 640 px.
  const ImageSize size{1280, 720};
  const OverlapMask mask(shift_x(-640.0), size, size);
  EXPECT_NEAR(signed_area(mask.region_a()), 640.0 * 720.0, 1e-6);
  EXPECT_NEAR(signed_area(mask.region_b()), 640.0 * 720.0, 1e-6);
  gen::Rng rng(23);
  for (int k = 0; k < 1000; ++k) {
    const Vec2 a = gen::point_in(rng, 1280, 720);
    const Vec2 b = gen::point_in(rng, 1280, 720);
    EXPECT_EQ(mask.contains_a(a), a.x() >= 640.0);
    EXPECT_EQ(mask.contains_b(b), b.x() <= 640.0);
    EXPECT_EQ(mask.keeps({a, b, 1.0}), a.x() >= 640.0 && b.x() <= 640.0);
  }
}

TEST(OverlapMask, IdentityKeepsEverythingInside) {
  const ImageSize size{1280, 720};
  MatchSet ms;
  ms.matches = {{Vec2(0, 0), Vec2(1280, 720), 0.5}, {Vec2(10, 10), Vec2(-1, 10), 0.5}};
  const auto kept = overlap_mask_filter(ms, Homography{}, size, size);
  ASSERT_EQ(kept.matches.size(), 1u);
  EXPECT_EQ(kept.matches[0], ms.matches[0]);
}

TEST(OverlapMask, DisjointViewsGiveEmptyRegions) {
  const ImageSize size{1280, 720};
  const OverlapMask mask(shift_x(5000.0), size, size);
  EXPECT_TRUE(mask.region_a().empty());
  EXPECT_TRUE(mask.region_b().empty());
  EXPECT_FALSE(mask.keeps({Vec2(100, 100), Vec2(100, 100), 1.0}));
}

TEST(OverlapMask, SingularHomographyThrows) {
  Homography h;
  h.H.setZero();
  h.H(0, 0) = 1.0;
  EXPECT_THROW(OverlapMask(h, {10, 10}, {10, 10}), MaskDegenerateError);
  EXPECT_THROW(OverlapMask(Homography{}, {0, 10}, {10, 10}), std::invalid_argument);
}

TEST(Grouping, OverlappingBoxesGetEveryCombination) {
  const std::vector<Detection> a{det(0, 0, 100, 100), det(50, 50, 150, 150), det(500, 500, 600, 600)};
  const std::vector<Detection> b{det(0, 0, 10, 10)};
  MatchSet ms;
  ms.matches = {{Vec2(75, 75), Vec2(5, 5), 0.7},      // in a0 and a1
                {Vec2(10, 10), Vec2(5, 5), 0.6},      // in a0 only
                {Vec2(100, 100), Vec2(10, 10), 0.5},  // closed boundaries of a0, a1, b0
                {Vec2(300, 300), Vec2(5, 5), 0.9},    // outside all A boxes
                {Vec2(550, 550), Vec2(50, 50), 0.9}}; // outside all B boxes
  const auto g = assign_to_detections(ms, a, b);
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g.at({0, 0}).size(), 3u);
  EXPECT_EQ(g.at({1, 0}).size(), 2u);
  EXPECT_FALSE(g.contains({2, 0}));
}

TEST(Grouping, MembershipMatchesBruteForceProperty) {
  gen::Rng rng(24);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Detection> a;
    std::vector<Detection> b;
    for (int k = 0; k < 4; ++k) {
      const Vec2 p = gen::point_in(rng, 1000, 600);
      a.push_back(det(p.x(), p.y(), p.x() + 200, p.y() + 100));
      const Vec2 q = gen::point_in(rng, 1000, 600);
      b.push_back(det(q.x(), q.y(), q.x() + 200, q.y() + 100));
    }
    MatchSet ms;
    for (int k = 0; k < 60; ++k) {
      ms.matches.push_back({gen::point_in(rng, 1280, 720), gen::point_in(rng, 1280, 720), 0.5});
    }
    const auto g = assign_to_detections(ms, a, b);
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) {
        std::size_t expected = 0;
        for (const auto& m : ms.matches) {
          expected += (a[i].bbox.contains(m.pt_a) && b[j].bbox.contains(m.pt_b)) ? 1 : 0;
        }
        const auto it = g.find({i, j});
        EXPECT_EQ(it == g.end() ? 0u : it->second.size(), expected);
      }
    }
  }
}
