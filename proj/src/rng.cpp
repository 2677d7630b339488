#include "reserves/rng.hpp"

#include <cmath>
#include <numbers>

#include "reserves/errors.hpp"

namespace reserves::rng {

namespace {

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  std::uint64_t p = std::uint64_t(a) * b;
  hi = std::uint32_t(p >> 32);
  lo = std::uint32_t(p);
}

inline Philox4x32::Block round_once(Philox4x32::Block x, Philox4x32::Key k) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(0xD2511F53u, x[0], hi0, lo0);
  mulhilo(0xCD9E8D57u, x[2], hi1, lo1);
  return {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

}  // namespace

Philox4x32::Block Philox4x32::encrypt(Block x, Key k) {
  for (int i = 0; i < 10; ++i) {
    if (i) {
      k[0] += 0x9E3779B9u;
      k[1] += 0xBB67AE85u;
    }
    x = round_once(x, k);
  }
  return x;
}

Stream::result_type Stream::operator()() {
  if (avail_ == 0) {
    auto b = eng_.next();
    buf_[0] = (std::uint64_t(b[1]) << 32) | b[0];
    buf_[1] = (std::uint64_t(b[3]) << 32) | b[2];
    avail_ = 2;
  }
  return buf_[--avail_];
}

double Stream::uniform() {
  // 53-bit mantissa, offset by half an ulp so the result is in (0, 1).
  return (double((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::normal() {
  if (have_normal_) {
    have_normal_ = false;
    return cached_normal_;
  }
  double u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * std::numbers::pi * u2;
  cached_normal_ = r * std::sin(a);
  have_normal_ = true;
  return r * std::cos(a);
}

double Stream::gamma(double shape) {
  if (!(shape > 0.0)) throw NumericError("gamma shape must be positive");
  if (shape < 1.0) {
    // Boost to shape + 1, then scale back by U^(1/shape).
    double u = uniform();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze.
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    double v = t * t * t;
    double u = uniform();
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Stream::laplace(double scale) {
  double s = uniform() - 0.5;
  double mag = -std::log(1.0 - 2.0 * std::abs(s));
  return s < 0.0 ? -scale * mag : scale * mag;
}

double Stream::cauchy(double scale) {
  return scale * std::tan(std::numbers::pi * (uniform() - 0.5));
}

double Stream::exponential(double scale) {
  return -scale * std::log(uniform());
}

void dirichlet(Stream& rs, std::span<const double> shape, std::span<double> out) {
  for (int attempt = 0; attempt < 16; ++attempt) {
    double total = 0.0;
    for (std::size_t i = 0; i < shape.size(); ++i) {
      out[i] = rs.gamma(shape[i]);
      total += out[i];
    }
    if (total > 0.0) {
      for (std::size_t i = 0; i < shape.size(); ++i) out[i] /= total;
      return;
    }
    // All gamma draws underflowed (possible only for tiny shapes); redraw.
  }
  throw NumericError("dirichlet draw underflowed repeatedly");
}

}  // namespace reserves::rng
