#include "dynheat/fd_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dynheat/errors.hpp"

namespace dynheat {

namespace {

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

struct Layout {
  int d;            // tangential dimension
  std::size_t n;    // nodes per tangential axis
  std::size_t rows;
  std::size_t stride;  // nodes per row

  explicit Layout(const FDGrid& g)
      : d(g.dimension - 1), n(g.tangential_nodes()), rows(g.height_nodes()), stride(ipow(n, d)) {}

  bool on_wall(std::size_t flat) const {
    for (int a = 0; a < d; ++a) {
      const std::size_t i = flat % n;
      if (i == 0 || i + 1 == n) return true;
      flat /= n;
    }
    return false;
  }
};

}  // namespace

void FDGrid::validate() const {
  if (dimension < 2 || dimension - 1 > static_cast<int>(kMaxTangential))
    throw ConfigError("FDGrid: unsupported dimension");
  if (!(dx > 0.0 && tangential_extent > 0.0 && height_extent > 0.0))
    throw ConfigError("FDGrid: extents and dx must be positive");
  if (tangential_nodes() < 3 || height_nodes() < 3) throw ConfigError("FDGrid: grid too small");
  if (dt < 0.0) throw ConfigError("FDGrid: dt must be nonnegative");
  if (step() > stability_limit() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "FDGrid: dt = " << step() << " exceeds the stability limit dx^2/(2N) = "
       << stability_limit();
    throw ConfigError(os.str());
  }
}

std::size_t FDGrid::tangential_nodes() const {
  return static_cast<std::size_t>(std::llround(2.0 * tangential_extent / dx)) + 1;
}

std::size_t FDGrid::height_nodes() const {
  return static_cast<std::size_t>(std::llround(height_extent / dx)) + 1;
}

FDState fd_initial_state(const InitialDatum& phi, const FDGrid& grid) {
  grid.validate();
  const Layout l(grid);
  FDState s;
  s.values.assign(l.rows * l.stride, 0.0);
  if (phi.is_zero()) return s;
  Tangential y(static_cast<std::size_t>(l.d));
  // row 0 stays zero and the far walls carry zero Dirichlet data
  for (std::size_t j = 1; j + 1 < l.rows; ++j) {
    for (std::size_t flat = 0; flat < l.stride; ++flat) {
      if (l.on_wall(flat)) continue;
      std::size_t rest = flat;
      for (int a = l.d; a-- > 0;) {
        y[static_cast<std::size_t>(a)] =
            -grid.tangential_extent + static_cast<double>(rest % l.n) * grid.dx;
        rest /= l.n;
      }
      const double v = phi(HalfSpacePoint(y, static_cast<double>(j) * grid.dx));
      if (!std::isfinite(v)) throw NumericError("fd_initial_state: non-finite datum sample");
      s.values[j * l.stride + flat] = v;
    }
  }
  return s;
}

FDState fd_step(const FDState& state, const FDGrid& grid, double dt) {
  grid.validate();
  if (!(dt > 0.0) || dt > grid.stability_limit() * (1.0 + 1e-12))
    throw ConfigError("fd_step: dt outside (0, dx^2/(2N)]");
  const Layout l(grid);
  if (state.values.size() != l.rows * l.stride) throw ConfigError("fd_step: state shape mismatch");
  const double mu = dt / (grid.dx * grid.dx);
  const double centre = 1.0 - 2.0 * grid.dimension * mu;
  FDState out;
  out.t = state.t + dt;
  out.values.assign(state.values.size(), 0.0);
  const double* u = state.values.data();
  double* o = out.values.data();

  std::vector<std::size_t> axis_stride(static_cast<std::size_t>(l.d));
  for (int a = 0; a < l.d; ++a) axis_stride[static_cast<std::size_t>(a)] = ipow(l.n, l.d - 1 - a);
  std::vector<char> wall(l.stride);
  for (std::size_t flat = 0; flat < l.stride; ++flat) wall[flat] = l.on_wall(flat) ? 1 : 0;

  for (std::size_t flat = 0; flat < l.stride; ++flat) {
    if (wall[flat]) continue;
    o[flat] = grid.dynamical_boundary ? u[flat] + dt * (u[l.stride + flat] - u[flat]) / grid.dx
                                      : u[flat];
  }
  for (std::size_t j = 1; j + 1 < l.rows; ++j) {
    const std::size_t base = j * l.stride;
    for (std::size_t flat = 0; flat < l.stride; ++flat) {
      if (wall[flat]) continue;
      const std::size_t i = base + flat;
      double nb = u[i - l.stride] + u[i + l.stride];
      for (std::size_t st : axis_stride) nb += u[i - st] + u[i + st];
      o[i] = centre * u[i] + mu * nb;
    }
  }
  return out;
}

FDState fd_step(const FDState& state, const FDGrid& grid) {
  return fd_step(state, grid, grid.step());
}

FieldTrajectory fd_solve(const InitialDatum& phi, const FDGrid& grid,
                         std::span<const double> times) {
  grid.validate();
  const Layout l(grid);
  FieldTrajectory traj;
  std::vector<CellAxis> tangential(static_cast<std::size_t>(l.d),
                                   CellAxis{-grid.tangential_extent + 0.5 * grid.dx, grid.dx, l.n - 2});
  const CellAxis height{0.5 * grid.dx, grid.dx, l.rows - 2};

  FDState state = fd_initial_state(phi, grid);
  for (double target : times) {
    if (!(target > state.t)) throw ConfigError("fd_solve: times must be positive and increasing");
    const auto steps = static_cast<long>(std::ceil((target - state.t) / grid.step() - 1e-9));
    const double dt = (target - state.t) / static_cast<double>(steps);
    for (long s = 0; s < steps; ++s) state = fd_step(state, grid, dt);
    state.t = target;

    SampledField f{tangential, height, {}};
    SampledBoundaryField b{tangential, {}};
    for (std::size_t flat = 0; flat < l.stride; ++flat) {
      if (l.on_wall(flat)) continue;
      b.values.push_back(state.values[flat]);
    }
    for (std::size_t j = 1; j + 1 < l.rows; ++j)
      for (std::size_t flat = 0; flat < l.stride; ++flat)
        if (!l.on_wall(flat)) f.values.push_back(state.values[j * l.stride + flat]);
    traj.times.push_back(target);
    traj.values.push_back(std::move(f));
    traj.trace.push_back(std::move(b));
  }
  traj.check();
  return traj;
}

double field_value_at(const SampledField& f, const HalfSpacePoint& x) {
  const std::size_t d = f.tangential.size();
  if (x.tangential.size() != d) throw DomainError("field_value_at: dimension mismatch");
  // per axis: lower index and weight
  std::vector<std::size_t> lo(d + 1);
  std::vector<double> wt(d + 1);
  auto bracket = [](const CellAxis& a, double c, std::size_t& i0, double& w) {
    const double s = (c - a.center(0)) / a.h;
    if (s < -1e-9 || s > static_cast<double>(a.n - 1) + 1e-9)
      throw DomainError("field_value_at: point outside the sampled range");
    const double fl = std::clamp(std::floor(s), 0.0, static_cast<double>(a.n > 1 ? a.n - 2 : 0));
    i0 = static_cast<std::size_t>(fl);
    w = a.n > 1 ? std::clamp(s - fl, 0.0, 1.0) : 0.0;
  };
  for (std::size_t a = 0; a < d; ++a) bracket(f.tangential[a], x.tangential[a], lo[a], wt[a]);
  bracket(f.height, x.height, lo[d], wt[d]);

  const std::size_t nt = f.tangential_count();
  double acc = 0.0;
  for (std::size_t corner = 0; corner < (std::size_t{1} << (d + 1)); ++corner) {
    double w = 1.0;
    std::size_t flat = 0;
    for (std::size_t a = 0; a < d; ++a) {
      const bool up = (corner >> a) & 1U;
      w *= up ? wt[a] : 1.0 - wt[a];
      flat = flat * f.tangential[a].n + lo[a] + (up ? 1 : 0);
    }
    const bool up = (corner >> d) & 1U;
    w *= up ? wt[d] : 1.0 - wt[d];
    if (w == 0.0) continue;
    acc += w * f.values[(lo[d] + (up ? 1 : 0)) * nt + flat];
  }
  return acc;
}

}  // namespace dynheat
