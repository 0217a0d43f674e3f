#include "groundpose/registration.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

namespace groundpose {

namespace {

constexpr double kMagnitudeFloor = 1e-12;
constexpr double kMinVariance = 1e-8;

template <typename T>
struct FftwFree {
  void operator()(T* p) const { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double[], FftwFree<double>>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree<fftw_complex>>;

RealBuffer alloc_real(std::size_t n) { return RealBuffer(fftw_alloc_real(n)); }
ComplexBuffer alloc_complex(std::size_t n) { return ComplexBuffer(fftw_alloc_complex(n)); }

// Plans are created once per size and only executed afterwards (new-array
// execution is thread-safe in FFTW, planning is not).
struct Transform {
  int n = 0;
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
  std::vector<double> window;  // separable periodic Hann, 1-D

  explicit Transform(int size) : n(size), window(static_cast<std::size_t>(size)) {
    const std::size_t real_n = static_cast<std::size_t>(n) * n;
    const std::size_t cplx_n = static_cast<std::size_t>(n) * (n / 2 + 1);
    auto r = alloc_real(real_n);
    auto c = alloc_complex(cplx_n);
    forward = fftw_plan_dft_r2c_2d(n, n, r.get(), c.get(), FFTW_ESTIMATE);
    inverse = fftw_plan_dft_c2r_2d(n, n, c.get(), r.get(), FFTW_ESTIMATE);
    for (int i = 0; i < n; ++i)
      window[static_cast<std::size_t>(i)] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  }
  Transform(const Transform&) = delete;
  Transform& operator=(const Transform&) = delete;
  ~Transform() {
    fftw_destroy_plan(forward);
    fftw_destroy_plan(inverse);
  }
};

const Transform& transform_for(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<Transform>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Transform>(n);
  return *slot;
}

void load_windowed(const ImageBuffer& patch, const Transform& t, double* out) {
  const double m = mean(patch.pixels());
  for (int y = 0; y < t.n; ++y) {
    const double wy = t.window[static_cast<std::size_t>(y)];
    auto row = patch.row(y);
    for (int x = 0; x < t.n; ++x)
      out[static_cast<std::size_t>(y) * t.n + x] = (row[static_cast<std::size_t>(x)] - m) * wy *
                                                   t.window[static_cast<std::size_t>(x)];
  }
}

double parabolic_offset(double left, double center, double right) {
  const double denom = left - 2.0 * center + right;
  if (!(denom < 0.0)) return 0.0;
  return std::clamp(0.5 * (left - right) / denom, -0.5, 0.5);
}

}  // namespace

bool is_pow2_patch_size(int size) { return size >= 32 && (size & (size - 1)) == 0; }

Displacement poc_register(const ImageBuffer& ref, const ImageBuffer& cur, const PocOptions& options) {
  if (ref.width() != ref.height() || cur.width() != cur.height() || ref.width() != cur.width())
    throw SizeMismatch("POC patches must be square and equally sized");
  if (!is_pow2_patch_size(ref.width()))
    throw SizeMismatch("POC patch size " + std::to_string(ref.width()) + " is not a power of two >= 32");
  if (variance(ref.pixels()) < kMinVariance || variance(cur.pixels()) < kMinVariance) throw DegeneratePatch();

  const Transform& t = transform_for(ref.width());
  const int n = t.n;
  const int half = n / 2 + 1;
  const std::size_t real_n = static_cast<std::size_t>(n) * n;
  const std::size_t cplx_n = static_cast<std::size_t>(n) * half;

  auto buf = alloc_real(real_n);
  auto spec_ref = alloc_complex(cplx_n);
  auto spec_cur = alloc_complex(cplx_n);

  load_windowed(ref, t, buf.get());
  fftw_execute_dft_r2c(t.forward, buf.get(), spec_ref.get());
  load_windowed(cur, t, buf.get());
  fftw_execute_dft_r2c(t.forward, buf.get(), spec_cur.get());

  // Normalized cross-power spectrum under a radial band-pass weight.
  const double lo = options.highpass * 0.5;
  const double hi = options.lowpass * 0.5;
  double weight_sum = 0.0;
  for (int ky = 0; ky < n; ++ky) {
    const double fy = static_cast<double>(ky < n / 2 ? ky : ky - n) / n;
    for (int kx = 0; kx < half; ++kx) {
      const double fx = static_cast<double>(kx) / n;
      const double r = std::sqrt(fx * fx + fy * fy);
      const std::size_t k = static_cast<std::size_t>(ky) * half + kx;
      fftw_complex& c = spec_cur[k];
      const fftw_complex& a = spec_ref[k];
      if (r > hi || r < lo) {
        c[0] = c[1] = 0.0;
        continue;
      }
      weight_sum += (kx == 0 || 2 * kx == n) ? 1.0 : 2.0;
      // cur * conj(ref)
      const double re = c[0] * a[0] + c[1] * a[1];
      const double im = c[1] * a[0] - c[0] * a[1];
      const double mag = std::max(std::hypot(re, im), kMagnitudeFloor);
      c[0] = re / mag;
      c[1] = im / mag;
    }
  }
  fftw_execute_dft_c2r(t.inverse, spec_cur.get(), buf.get());

  const double* surface = buf.get();
  std::size_t best = 0;
  for (std::size_t i = 1; i < real_n; ++i)
    if (surface[i] > surface[best]) best = i;
  const int px = static_cast<int>(best % static_cast<std::size_t>(n));
  const int py = static_cast<int>(best / static_cast<std::size_t>(n));
  auto at = [&](int x, int y) {
    x = (x + n) % n;
    y = (y + n) % n;
    return surface[static_cast<std::size_t>(y) * n + x];
  };
  const double peak = at(px, py);
  const double sub_x = parabolic_offset(at(px - 1, py), peak, at(px + 1, py));
  const double sub_y = parabolic_offset(at(px, py - 1), peak, at(px, py + 1));

  Displacement d;
  d.dx = (px < n / 2 ? px : px - n) + sub_x;
  d.dy = (py < n / 2 ? py : py - n) + sub_y;
  d.confidence = weight_sum > 0.0 ? std::clamp(peak / weight_sum, 0.0, 1.0) : 0.0;
  return d;
}

}  // namespace groundpose
