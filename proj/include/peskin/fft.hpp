#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace peskin::fft {

using Complex = std::complex<double>;

enum class Direction { forward, backward };

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// O(n^2) DFT, out[k] = sum_j in[j] exp(-+ 2 pi i j k / n).
inline std::vector<Complex> direct_transform(std::span<const Complex> in, Direction dir) {
  const std::size_t n = in.size();
  const double sign = dir == Direction::forward ? -1.0 : 1.0;
  std::vector<Complex> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    Complex acc{};
    for (std::size_t j = 0; j < n; ++j) {
      // Reduce j*k mod n first so the angle stays in [0, 2 pi).
      const double angle = sign * 2.0 * std::numbers::pi * double((j * k) % n) / double(n);
      acc += in[j] * Complex(std::cos(angle), std::sin(angle));
    }
    out[k] = acc;
  }
  return out;
}

namespace detail {

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int n, Direction dir) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, dir == Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<Complex> scratch(std::size_t(n) * 2);
    auto* in = reinterpret_cast<fftw_complex*>(scratch.data());
    auto* out = reinterpret_cast<fftw_complex*>(scratch.data() + n);
    // ESTIMATE keeps planning deterministic; UNALIGNED allows new-array execution.
    fftw_plan plan = fftw_plan_dft_1d(n, in, out, key.second, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr) throw std::runtime_error("fftw planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

}  // namespace detail

/// Unnormalized DFT. Uses FFTW for power-of-two sizes and the direct sum otherwise.
inline std::vector<Complex> transform(std::span<const Complex> in, Direction dir) {
  const std::size_t n = in.size();
  if (!is_power_of_two(n)) return direct_transform(in, dir);
  std::vector<Complex> src(in.begin(), in.end());
  std::vector<Complex> out(n);
  fftw_plan plan = detail::PlanCache::instance().get(int(n), dir);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(src.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace peskin::fft
