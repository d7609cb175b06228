#include <vector>

#include "doctest.h"
#include "ibandit/rng.hpp"

using namespace ibandit;

TEST_CASE("stream draws are pure functions of key and counter") {
  const StreamKey a(7);
  const StreamKey b(7);
  CHECK(a.bits(3, 11) == b.bits(3, 11));
  CHECK(a.bits(3, 11) != a.bits(4, 11));
  CHECK(a.bits(3, 11) != a.bits(3, 12));
  CHECK(a.derive("chance").value() != a.derive("p1").value());
  CHECK(a.derive("chance").value() == b.derive("chance").value());
  CHECK(StreamKey(7).value() != StreamKey(8).value());
}

TEST_CASE("uniform draws lie in [0, 1) and have the right mean") {
  CounterRng rng(StreamKey(1).derive("test"));
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // Standard error of the mean is about 0.0009.
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.005));
}

TEST_CASE("sample_index follows cumulative weights and skips zeros") {
  const std::vector<double> w{0.0, 1.0, 0.0, 3.0, 0.0};
  CHECK(sample_index(w, 0.0) == 1);
  CHECK(sample_index(w, 0.2499) == 1);
  CHECK(sample_index(w, 0.25) == 3);
  CHECK(sample_index(w, 0.999999) == 3);
  const std::vector<double> single{2.0};
  CHECK(sample_index(single, 0.7) == 0);
}
