#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "plumeig/errors.hpp"
#include "plumeig/plume_field.hpp"
#include "support/oracles.hpp"

using namespace plumeig;

namespace {

PlumeParams blob(double q = 1.0, double l = 1.0, double sigma = 1.0) {
  PlumeParams p;
  p.kind = PlumeKind::IsotropicBlob;
  p.strength = q;
  p.length_scale = l;
  p.noise_sigma = sigma;
  return p;
}

PlumeParams advected(double ux, double uy) {
  PlumeParams p;
  p.kind = PlumeKind::AdvectedPlume;
  p.wind_x = ux;
  p.wind_y = uy;
  p.sigma0 = 1.0;
  p.spread_rate = 0.2;
  return p;
}

}  // namespace

TEST(Concentration, BlobPeakAtSource) {
  const auto p = blob(0.7, 2.0);
  EXPECT_EQ(concentration({3.0, 4.0}, {3.0, 4.0}, p), 0.7);
}

TEST(Concentration, BlobUnitOffset) {
  EXPECT_NEAR(concentration({1.0, 0.0}, {0.0, 0.0}, blob()), 0.6065306597126334, 1e-15);
  EXPECT_NEAR(concentration({1.0, 0.0}, {0.0, 0.0}, blob()), oracle::blob(1.0, 0.0, 1.0, 1.0), 1e-15);
}

TEST(Concentration, AdvectedZeroUpwind) {
  const auto p = advected(1.0, 0.0);
  EXPECT_EQ(concentration({-1.0, 0.0}, {0.0, 0.0}, p), 0.0);
  EXPECT_EQ(concentration({0.0, 3.0}, {0.0, 0.0}, p), 0.0);
  EXPECT_GT(concentration({2.0, 0.0}, {0.0, 0.0}, p), 0.0);
}

TEST(Concentration, AdvectedClosedForm) {
  const auto p = advected(1.0, 0.0);
  // along = 5, cross = 1, sigma_y = 1 + 0.2 * 5 = 2
  EXPECT_NEAR(concentration({5.0, 1.0}, {0.0, 0.0}, p), 0.5 * std::exp(-1.0 / 8.0), 1e-15);
}

TEST(Concentration, AdvectedFollowsWindDirection) {
  const auto p = advected(0.0, 2.0);  // wind along +y
  EXPECT_EQ(concentration({0.0, -1.0}, {0.0, 0.0}, p), 0.0);
  EXPECT_NEAR(concentration({0.0, 5.0}, {0.0, 0.0}, p), 0.5, 1e-15);
  EXPECT_EQ(concentration({-5.0, 0.0}, {0.0, 0.0}, p), 0.0);
}

TEST(Concentration, TranslationInvariance) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (const auto& p : {blob(1.0, 3.0), advected(1.0, 0.5)}) {
    for (int k = 0; k < 500; ++k) {
      const Point loc{u(rng), u(rng)};
      const Point src{u(rng), u(rng)};
      const Point t{u(rng), u(rng)};
      // same arithmetic path: only the difference enters
      EXPECT_EQ(concentration_at_offset((loc + t) - (src + t), p), concentration_at_offset((loc + t) - (src + t), p));
      EXPECT_NEAR(concentration(loc + t, src + t, p), concentration(loc, src, p), 1e-12);
    }
  }
}

TEST(Concentration, BlobMaxOverFineGridIsStrength) {
  GridSpec g{0.0, 10.0, 0.0, 10.0, 101, 101, 5, 5};
  const auto p = blob(0.8, 1.5);
  const Point src = g.measurement_center(50 * 101 + 50);
  double best = 0.0;
  for (int c = 0; c < g.measurement_count(); ++c) best = std::max(best, concentration(g.measurement_center(c), src, p));
  EXPECT_NEAR(best, 0.8, 1e-12);
}

TEST(SnrArea, HugeNoiseGivesZero) {
  GridSpec g{0.0, 10.0, 0.0, 10.0, 20, 20, 20, 20};
  EXPECT_EQ(snr_area_fraction(blob(1.0, 1.0, 2.0), g, 1.0), 0.0);
}

TEST(SnrArea, BlobDiscMatchesAnalyticArea) {
  // f > sigma exactly inside r < l when sigma = exp(-1/2)
  GridSpec g{0.0, 20.0, 0.0, 20.0, 800, 800, 4, 4};
  const double l = 2.0;
  const double frac = snr_area_fraction(blob(1.0, l, std::exp(-0.5)), g, 1.0);
  const double analytic = std::numbers::pi * l * l / g.area();
  EXPECT_NEAR(frac / analytic, 1.0, 0.01);
}

TEST(Kernel, ClosedFormOffsets) {
  GridSpec g{0.0, 4.0, 0.0, 4.0, 4, 4, 4, 4};
  const auto k = squared_snr_kernel(blob(), g);
  EXPECT_DOUBLE_EQ(k.at(0, 0), 0.5);
  EXPECT_NEAR(k.at(1, 0), std::exp(-1.0) / 2.0, 1e-15);
  EXPECT_NEAR(k.at(0, -1), std::exp(-1.0) / 2.0, 1e-15);
}

TEST(Kernel, ZeroWhereConcentrationIsZero) {
  GridSpec g{0.0, 8.0, 0.0, 8.0, 8, 8, 8, 8};
  const auto k = squared_snr_kernel(advected(1.0, 0.0), g);
  for (int ny = k.y.min_offset; ny < k.y.min_offset + k.y.size; ++ny) {
    for (int nx = k.x.min_offset; nx <= 0; ++nx) EXPECT_EQ(k.at(nx, ny), 0.0);
  }
}

TEST(Kernel, ConsistentWithConcentrationOnEveryOffset) {
  // measurement grid twice as fine as the source grid, non-square world
  GridSpec g{-3.0, 5.0, 1.0, 7.0, 16, 12, 8, 6};
  for (const auto& p : {blob(0.9, 1.3, 0.4), advected(1.0, -0.7)}) {
    const auto k = squared_snr_kernel(p, g);
    EXPECT_EQ(k.x.measurement_stride, 1);
    EXPECT_EQ(k.x.source_stride, 2);
    for (int ny = k.y.min_offset; ny < k.y.min_offset + k.y.size; ++ny) {
      for (int nx = k.x.min_offset; nx < k.x.min_offset + k.x.size; ++nx) {
        const double f = concentration_at_offset({k.x.displacement(nx), k.y.displacement(ny)}, p);
        EXPECT_NEAR(k.at(nx, ny), f * f / (2.0 * p.noise_sigma * p.noise_sigma), 1e-15);
      }
    }
  }
}

TEST(Kernel, LatticeCoversEveryDisplacement) {
  GridSpec g{0.0, 6.0, 0.0, 6.0, 6, 12, 3, 4};
  const auto k = squared_snr_kernel(blob(), g);
  for (int c = 0; c < g.measurement_count(); ++c) {
    for (int s = 0; s < g.source_count(); ++s) {
      const Point d = g.measurement_center(c) - g.source_center(s);
      const double nx = d.x / k.x.step - k.x.shift;
      const double ny = d.y / k.y.step - k.y.shift;
      EXPECT_NEAR(nx, std::round(nx), 1e-9);
      EXPECT_NEAR(ny, std::round(ny), 1e-9);
      EXPECT_GE(std::lround(nx), k.x.min_offset);
      EXPECT_LT(std::lround(nx), k.x.min_offset + k.x.size);
      EXPECT_GE(std::lround(ny), k.y.min_offset);
      EXPECT_LT(std::lround(ny), k.y.min_offset + k.y.size);
    }
  }
}

TEST(Kernel, IncommensurateSpacingThrows) {
  GridSpec g{0.0, 1.0, 0.0, 1.0, 3, 3, 2, 2};
  EXPECT_THROW(squared_snr_kernel(blob(), g), KernelGridMismatch);
}

TEST(PlumeParams, Validation) {
  auto p = blob();
  p.noise_sigma = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = blob();
  p.length_scale = -1.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = advected(1.0, 0.0);
  p.sigma0 = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
}
