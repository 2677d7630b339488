#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace reserves::rng {

/// Philox4x32-10 counter-based generator. Every consumer owns an
/// independent stream keyed by (seed, stream ids); draws never touch shared
/// state, so parallel callers get identical numbers regardless of scheduling.
struct Philox4x32 {
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Block ctr{};
  Key key{};

  static Block encrypt(Block x, Key k);
  Block next() {
    Block out = encrypt(ctr, key);
    ++ctr[0];  // per-stream block counter; ids live in ctr[1..3]
    return out;
  }
};

/// Stream ids separating the independent substreams of one run.
enum class StreamTag : std::uint32_t {
  kInit = 1,
  kTransition = 2,
  kResample = 3,
  kSynthState = 4,
  kSynthNoise = 5,
  kSynthMarket = 6,
  kTest = 99,
};

/// One independent random stream. Satisfies UniformRandomBitGenerator.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint32_t a, std::uint32_t b, StreamTag tag) {
    eng_.key = {std::uint32_t(seed), std::uint32_t(seed >> 32)};
    eng_.ctr = {0, a, b, static_cast<std::uint32_t>(tag)};
  }

  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type(0); }
  result_type operator()();

  double uniform();  // open interval (0, 1)
  double normal();
  double gamma(double shape);  // unit scale
  double laplace(double scale);
  double cauchy(double scale);
  double exponential(double scale);

 private:
  Philox4x32 eng_;
  std::uint64_t buf_[2] = {0, 0};
  int avail_ = 0;
  double cached_normal_ = 0.0;
  bool have_normal_ = false;
};

/// Dirichlet draw by normalized unit-scale gamma variates; shapes below one
/// go through the boost-and-power transform inside Stream::gamma.
void dirichlet(Stream& rs, std::span<const double> shape, std::span<double> out);

}  // namespace reserves::rng
