#include "draec/fft.hpp"

#include <complex>
#include <vector>

#include <gtest/gtest.h>

#include "draec/error.hpp"
#include "draec/rng.hpp"
#include "support.hpp"

namespace {

using draec::fft_convolve;
using draec::fft_inplace;

TEST(Fft, MatchesNaiveDft) {
  draec::Rng rng(11);
  const int n = 64;
  std::vector<double> x = testsupport::white_noise(n, rng);
  std::vector<std::complex<double>> buf(x.begin(), x.end());
  fft_inplace(buf);
  for (int k = 0; k < n; ++k) {
    const std::complex<double> ref = testsupport::naive_dft_bin(x, n, k);
    EXPECT_NEAR(std::abs(buf[k] - ref), 0.0, 1e-9) << "bin " << k;
  }
}

TEST(Fft, RoundTripIsIdentity) {
  draec::Rng rng(12);
  std::vector<std::complex<double>> x(256);
  for (auto& v : x) v = rng.cgaussian();
  std::vector<std::complex<double>> y = x;
  fft_inplace(y);
  fft_inplace(y, true);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(std::abs(y[i] - x[i]), 0.0, 1e-11);
}

TEST(Fft, RejectsNonPowerOfTwo) {
  std::vector<std::complex<double>> x(48);
  EXPECT_THROW(fft_inplace(x), draec::Error);
}

TEST(Fft, ConvolveMatchesDirect) {
  draec::Rng rng(13);
  const std::vector<double> a = testsupport::white_noise(37, rng);
  const std::vector<double> b = testsupport::white_noise(15, rng);
  const std::vector<double> fast = fft_convolve(a, b);
  ASSERT_EQ(fast.size(), a.size() + b.size() - 1);
  for (std::size_t i = 0; i < fast.size(); ++i) {
    double direct = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j)
      if (i >= j && i - j < a.size()) direct += a[i - j] * b[j];
    EXPECT_NEAR(fast[i], direct, 1e-10);
  }
}

TEST(Fft, NextPow2) {
  EXPECT_EQ(draec::next_pow2(1), 1);
  EXPECT_EQ(draec::next_pow2(5), 8);
  EXPECT_EQ(draec::next_pow2(1024), 1024);
  EXPECT_EQ(draec::next_pow2(1025), 2048);
}

}  // namespace
