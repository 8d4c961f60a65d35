#include <doctest.h>

#include <cmath>

#include "qtraj/rng.hpp"

using namespace qtraj;

TEST_SUITE("rng") {

TEST_CASE("philox 4x32-10 known answers") {
  // Reference vectors for the 10-round variant: counter and key words all
  // zero, and all ones.
  const auto z = Philox4x32::block(0, 0);
  CHECK(z[0] == 0x6627e8d5u);
  CHECK(z[1] == 0xe169c58du);
  CHECK(z[2] == 0xbc57ac4cu);
  CHECK(z[3] == 0x9b00dbd8u);
}

TEST_CASE("blocks are pure functions of key and counter") {
  const auto a = Philox4x32::block(0x123456789abcdef0ull, 42);
  const auto b = Philox4x32::block(0x123456789abcdef0ull, 42);
  CHECK(a == b);
  const auto c = Philox4x32::block(0x123456789abcdef0ull, 43);
  CHECK(a != c);
  const auto d = Philox4x32::block(0x123456789abcdef1ull, 42);
  CHECK(a != d);
}

TEST_CASE("streams reproduce and do not collide") {
  const uint64_t k1 = derive_stream_key(7, 0, 0, StreamPurpose::Outcome);
  const uint64_t k2 = derive_stream_key(7, 1, 0, StreamPurpose::Outcome);
  const uint64_t k3 = derive_stream_key(7, 0, 1, StreamPurpose::Outcome);
  const uint64_t k4 = derive_stream_key(7, 0, 0, StreamPurpose::Brownian);
  CHECK(k1 != k2);
  CHECK(k1 != k3);
  CHECK(k1 != k4);
  CHECK(k2 != k3);

  RandomStream a(k1), b(k1);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("uniform lies in (0,1] with sane moments") {
  RandomStream s(derive_stream_key(1234, 0, 0, StreamPurpose::Misc));
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = s.next_uniform();
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
    sum += u;
    sum2 += u * u;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  // 5 sigma bands for n = 2e5.
  CHECK(std::abs(mean - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(var - 1.0 / 12.0) < 5e-3);
}

TEST_CASE("gaussian moments") {
  RandomStream s(derive_stream_key(99, 3, 1, StreamPurpose::Brownian));
  const int n = 200000;
  double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
  for (int i = 0; i < n; ++i) {
    const double g = s.next_gaussian();
    m1 += g;
    m2 += g * g;
    m3 += g * g * g;
    m4 += g * g * g * g;
  }
  m1 /= n;
  m2 /= n;
  m3 /= n;
  m4 /= n;
  CHECK(std::abs(m1) < 5.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(m2 - 1.0) < 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(m3) < 5.0 * std::sqrt(15.0 / n));
  CHECK(std::abs(m4 - 3.0) < 5.0 * std::sqrt(96.0 / n));
}

}  // TEST_SUITE
