#include "domd/rng.hpp"

namespace domd {

namespace {
constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGamma;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::result_type RngStream::operator()() {
  // Two rounds of mixing so neighbouring keys do not produce shifted copies.
  return splitmix64(splitmix64(key_ + counter_++ * kGamma) ^ key_);
}

double RngStream::uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

RngStream derive_stream(std::uint64_t master_seed, std::uint64_t k) {
  const std::uint64_t key = splitmix64(splitmix64(master_seed) ^ splitmix64(~k));
  return RngStream(key);
}

std::vector<RngStream> seed_streams(std::uint64_t master_seed, std::size_t n) {
  std::vector<RngStream> streams;
  streams.reserve(n + 2);
  for (std::size_t k = 0; k < n + 2; ++k) streams.push_back(derive_stream(master_seed, k));
  return streams;
}

}  // namespace domd
