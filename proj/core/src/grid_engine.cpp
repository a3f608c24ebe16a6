#include "dynheat/grid_engine.hpp"

#include <algorithm>
#include <cmath>

#include "dynheat/errors.hpp"

namespace dynheat {

namespace {

// int_lo^hi G1(y, t) dy for lo < hi, evaluated with erfc on the far side of
// the origin so that tiny tail cells keep their relative accuracy.
double gauss_interval(double lo, double hi, double t) {
  const double c = 1.0 / std::sqrt(4.0 * t);
  if (lo >= 0.0) return 0.5 * (std::erfc(lo * c) - std::erfc(hi * c));
  if (hi <= 0.0) return 0.5 * (std::erfc(-hi * c) - std::erfc(-lo * c));
  return 0.5 * (std::erf(hi * c) - std::erf(lo * c));
}

double g1(double z, double t) { return std::exp(-z * z / (4.0 * t)) / std::sqrt(4.0 * M_PI * t); }

void check_time(double t, const char* where) {
  if (!(t >= kMinTime)) throw DomainError(std::string(where) + ": time must be >= 1e-12");
}

}  // namespace

double gauss_cell(double x, double a, double b, double t) {
  check_time(t, "gauss_cell");
  return gauss_interval(x - b, x - a, t);
}

double dirichlet_cell(double z, double a, double b, double t) {
  check_time(t, "dirichlet_cell");
  return gauss_interval(z - b, z - a, t) - gauss_interval(-z - b, -z - a, t);
}

double normal_cell(double z, double a, double b, double t) {
  check_time(t, "normal_cell");
  return (g1(z - a, t) + g1(z + a, t)) - (g1(z - b, t) + g1(z + b, t));
}

double poisson_cell(double x, double a, double b, double s) {
  if (!(s > 0.0)) throw DomainError("poisson_cell: s must be positive");
  return (std::atan((x - a) / s) - std::atan((x - b) / s)) / M_PI;
}

double dt_poisson_cell(double x, double a, double b, double s) {
  if (!(s > 0.0)) throw DomainError("dt_poisson_cell: s must be positive");
  const double u = x - a;
  const double v = x - b;
  return (-u / (s * s + u * u) + v / (s * s + v * v)) / M_PI;
}

PlaneEngine::PlaneEngine(CellAxis x, CellAxis z) : x_(x), z_(z) {
  if (x_.n < 2 || z_.n < 2) throw ConfigError("PlaneEngine: need at least 2 cells per axis");
  if (z_.lo != 0.0) throw ConfigError("PlaneEngine: height axis must start at 0");
}

void PlaneEngine::convolve_x(std::span<const double> kernel, std::span<const double> in,
                             double weight, std::span<double> out, std::size_t band) const {
  // kernel[d + nx - 1] couples output i to input j with d = i - j; every kernel
  // used here is even in d, so column j reads the kernel forwards
  const std::size_t n = x_.n;
  band = std::min(band, n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    const double c = weight * in[j];
    if (c == 0.0) continue;
    const std::size_t i0 = j > band ? j - band : 0;
    const std::size_t i1 = std::min(n, j + band + 1);
    const double* k = kernel.data() + (n - 1) - j;
    double* o = out.data();
    for (std::size_t i = i0; i < i1; ++i) o[i] += k[i] * c;
  }
}

void PlaneEngine::accumulate_heat(std::span<const double> data, double tau, double weight,
                                  std::span<double> values, std::span<double> normals) const {
  check_time(tau, "PlaneEngine::accumulate_heat");
  const std::size_t nx = x_.n;
  const std::size_t nz = z_.n;
  if (data.size() != nx * nz) throw ConfigError("accumulate_heat: data shape mismatch");
  const bool want_v = !values.empty();
  const bool want_d = !normals.empty();
  if ((want_v && values.size() != row_field_size()) ||
      (want_d && normals.size() != row_field_size()))
    throw ConfigError("accumulate_heat: output shape mismatch");

  // Gaussian cell weights below erfc(6.5) ~ 1e-20 are dropped
  const double reach = 13.0 * std::sqrt(tau);
  const auto band_x = static_cast<std::size_t>(std::ceil(reach / x_.h)) + 1;
  const auto band_z = static_cast<std::size_t>(std::ceil(reach / z_.h)) + 1;

  // tangential Toeplitz kernel
  std::vector<double> kx(2 * nx - 1);
  for (std::size_t m = 0; m < 2 * nx - 1; ++m) {
    const double d = static_cast<double>(m) - static_cast<double>(nx - 1);
    kx[m] = gauss_interval((d - 0.5) * x_.h, (d + 0.5) * x_.h, tau);
  }
  std::vector<double> smoothed(nx * nz, 0.0);
  for (std::size_t l = 0; l < nz; ++l) {
    const std::span<const double> row = data.subspan(l * nx, nx);
    if (std::all_of(row.begin(), row.end(), [](double v) { return v == 0.0; })) continue;
    convolve_x(kx, row, 1.0, std::span<double>(smoothed).subspan(l * nx, nx), band_x);
  }

  // normal direction: Toeplitz part in k - l, Hankel part in k + l
  const double hz = z_.h;
  std::vector<double> toeplitz(nz), hankel(2 * nz), g_half(2 * nz + 2), g_int(nz + 1);
  for (std::size_t d = 0; d < nz; ++d)
    toeplitz[d] = gauss_interval((static_cast<double>(d) - 0.5) * hz,
                                 (static_cast<double>(d) + 0.5) * hz, tau);
  for (std::size_t m = 0; m < 2 * nz; ++m)
    hankel[m] = gauss_interval((static_cast<double>(m) + 0.5) * hz,
                               (static_cast<double>(m) + 1.5) * hz, tau);
  for (std::size_t j = 0; j < g_half.size(); ++j)
    g_half[j] = g1((static_cast<double>(j) + 0.5) * hz, tau);
  for (std::size_t j = 0; j <= nz; ++j) g_int[j] = g1(static_cast<double>(j) * hz, tau);
  // G1 at the half-integer offset (d + 1/2) hz for any integer d
  auto gh = [&](std::ptrdiff_t d) {
    return g_half[static_cast<std::size_t>(d >= 0 ? d : -d - 1)];
  };

  for (std::size_t l = 0; l < nz; ++l) {
    const double* src = smoothed.data() + l * nx;
    if (std::all_of(src, src + nx, [](double v) { return v == 0.0; })) continue;
    if (want_d && l <= band_z) {
      // boundary row: 2 G1(l hz) - 2 G1((l + 1) hz)
      const double c = weight * 2.0 * (g_int[l] - g_int[l + 1]);
      double* dst = normals.data();
      for (std::size_t i = 0; i < nx; ++i) dst[i] += c * src[i];
    }
    const std::size_t k0 = l > band_z ? l - band_z : 0;
    const std::size_t k1 = std::min(nz, l + band_z + 1);
    for (std::size_t k = k0; k < k1; ++k) {
      const auto d = static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(l);
      const std::size_t m = k + l;
      if (want_v) {
        const double c =
            weight * (toeplitz[static_cast<std::size_t>(d >= 0 ? d : -d)] - hankel[m]);
        double* dst = values.data() + (k + 1) * nx;
        for (std::size_t i = 0; i < nx; ++i) dst[i] += c * src[i];
      }
      if (want_d) {
        const double c = weight * (gh(d) + g_half[m] - gh(d - 1) - g_half[m + 1]);
        double* dst = normals.data() + (k + 1) * nx;
        for (std::size_t i = 0; i < nx; ++i) dst[i] += c * src[i];
      }
    }
  }
}

void PlaneEngine::add_poisson_kernel(double s, double weight, std::span<double> kernel) const {
  if (!(s > 0.0)) throw DomainError("add_poisson_kernel: s must be positive");
  const std::size_t nx = x_.n;
  for (std::size_t m = 0; m < nx; ++m) {
    const double v = weight * poisson_cell(static_cast<double>(m) * x_.h, -0.5 * x_.h, 0.5 * x_.h, s);
    kernel[nx - 1 + m] += v;
    if (m > 0) kernel[nx - 1 - m] += v;
  }
}

void PlaneEngine::add_dt_poisson_kernel(double s, double weight, std::span<double> kernel) const {
  if (!(s > 0.0)) throw DomainError("add_dt_poisson_kernel: s must be positive");
  const std::size_t nx = x_.n;
  for (std::size_t m = 0; m < nx; ++m) {
    const double v =
        weight * dt_poisson_cell(static_cast<double>(m) * x_.h, -0.5 * x_.h, 0.5 * x_.h, s);
    kernel[nx - 1 + m] += v;
    if (m > 0) kernel[nx - 1 - m] += v;
  }
}

void PlaneEngine::accumulate_poisson(std::span<const double> psi, double s, double weight,
                                     std::span<double> out) const {
  std::vector<double> k(kernel_size(), 0.0);
  add_poisson_kernel(s, 1.0, k);
  convolve(k, psi, weight, out);
}

void PlaneEngine::accumulate_dt_poisson(std::span<const double> psi, double s, double weight,
                                        std::span<double> out) const {
  std::vector<double> k(kernel_size(), 0.0);
  add_dt_poisson_kernel(s, 1.0, k);
  convolve(k, psi, weight, out);
}

std::vector<double> PlaneEngine::sample(const InitialDatum& phi, int sub) const {
  if (sub < 1) throw ConfigError("PlaneEngine::sample: sub must be >= 1");
  std::vector<double> out(volume_size(), 0.0);
  if (phi.is_zero()) return out;
  HalfSpacePoint y(Tangential(1), 0.0);
  for (std::size_t k = 0; k < z_.n; ++k) {
    for (std::size_t i = 0; i < x_.n; ++i) {
      double acc = 0.0;
      for (int a = 0; a < sub; ++a) {
        y.height = z_.edge(k) + (a + 0.5) * z_.h / sub;
        for (int b = 0; b < sub; ++b) {
          y.tangential[0] = x_.edge(i) + (b + 0.5) * x_.h / sub;
          acc += phi(y);
        }
      }
      out[k * x_.n + i] = acc / (sub * sub);
    }
  }
  return out;
}

SampledField PlaneEngine::volume_field(std::span<const double> data, bool has_boundary_row) const {
  SampledField f{{x_}, z_, {}};
  const std::size_t offset = has_boundary_row ? x_.n : 0;
  f.values.assign(data.begin() + static_cast<std::ptrdiff_t>(offset),
                  data.begin() + static_cast<std::ptrdiff_t>(offset + volume_size()));
  return f;
}

SampledBoundaryField PlaneEngine::boundary_field(std::span<const double> row) const {
  SampledBoundaryField f{{x_}, {}};
  f.values.assign(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(x_.n));
  return f;
}

}  // namespace dynheat
