#include <set>
#include <stdexcept>

#include "doctest.h"
#include "domd/parallel.hpp"
#include "domd/rng.hpp"

using namespace domd;

TEST_SUITE("rng") {
  TEST_CASE("same seed and index give the same stream") {
    RngStream a = derive_stream(42, 3), b = derive_stream(42, 3);
    for (int i = 0; i < 100; ++i) CHECK(a() == b());
  }

  TEST_CASE("distinct stream indices differ in their first 1000 outputs") {
    const std::size_t n = 6;
    auto streams = seed_streams(123, n);
    REQUIRE(streams.size() == n + 2);
    std::vector<std::vector<std::uint64_t>> outputs(streams.size());
    for (std::size_t k = 0; k < streams.size(); ++k)
      for (int i = 0; i < 1000; ++i) outputs[k].push_back(streams[k]());
    // No value from any stream shows up in another one.
    std::set<std::uint64_t> seen;
    std::size_t total = 0;
    for (const auto& out : outputs) {
      seen.insert(out.begin(), out.end());
      total += out.size();
    }
    CHECK(seen.size() == total);
  }

  TEST_CASE("seed 0 is legal and differs from seed 1") {
    RngStream a = derive_stream(0, 0), b = derive_stream(1, 0);
    int equal = 0;
    for (int i = 0; i < 1000; ++i) equal += a() == b();
    CHECK(equal == 0);
  }

  TEST_CASE("output j depends only on the counter") {
    RngStream a = derive_stream(9, 1);
    for (int i = 0; i < 10; ++i) a();
    RngStream b(a.key(), 10);
    CHECK(a() == b());
  }

  TEST_CASE("uniform lies in [0, 1) with a sane mean") {
    RngStream r = derive_stream(5, 0);
    double s = 0;
    for (int i = 0; i < 100000; ++i) {
      const double u = r.uniform();
      REQUIRE(u >= 0.0);
      REQUIRE(u < 1.0);
      s += u;
    }
    CHECK(s / 100000 == doctest::Approx(0.5).epsilon(0.01));
  }

  TEST_CASE("stream index helpers") {
    CHECK(topology_stream_index(5) == 5);
    CHECK(drift_stream_index(5) == 6);
  }

  TEST_CASE("parallel_for visits every index once for any thread count") {
    for (int threads : {0, 1, 2, 3, 8}) {
      std::vector<int> hits(37, 0);
      parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i] += 1; });
      for (int h : hits) CHECK(h == 1);
    }
  }

  TEST_CASE("parallel_for rethrows a body exception") {
    CHECK_THROWS(parallel_for(10, 3, [](std::size_t i) {
      if (i == 7) throw std::runtime_error("boom");
    }));
  }
}
