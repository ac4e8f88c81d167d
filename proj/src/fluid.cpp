#include "emberline/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "emberline/seeding.hpp"

namespace emberline::fluid {
namespace {

// Periodic bilinear sample of a staggered component whose lattice point
// (i, j) sits at (x = j + ox, y = i + oy).
double sample(const MacVelocity& vel, const std::vector<double>& f, double ox, double oy, double x, double y) {
  const double gx = x - ox;
  const double gy = y - oy;
  const double fx = std::floor(gx);
  const double fy = std::floor(gy);
  const int j0 = static_cast<int>(fx);
  const int i0 = static_cast<int>(fy);
  const double tx = gx - fx;
  const double ty = gy - fy;
  const double a = f[vel.idx(i0, j0)];
  const double b = f[vel.idx(i0, j0 + 1)];
  const double c = f[vel.idx(i0 + 1, j0)];
  const double d = f[vel.idx(i0 + 1, j0 + 1)];
  return (1.0 - ty) * ((1.0 - tx) * a + tx * b) + ty * ((1.0 - tx) * c + tx * d);
}

// y = -L x for the periodic 5-point Laplacian.
void apply_neg_laplacian(const MacVelocity& g, const std::vector<double>& x, std::vector<double>& y) {
  for (int i = 0; i < g.rows; ++i) {
    for (int j = 0; j < g.cols; ++j) {
      const double sum = x[g.idx(i, j + 1)] + x[g.idx(i, j - 1)] + x[g.idx(i + 1, j)] + x[g.idx(i - 1, j)];
      y[g.idx(i, j)] = 4.0 * x[g.idx(i, j)] - sum;
    }
  }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

void remove_mean(std::vector<double>& x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  for (double& v : x) v -= mean;
}

}  // namespace

std::vector<double> divergence(const MacVelocity& vel) {
  std::vector<double> div(vel.u.size(), 0.0);
  for (int i = 0; i < vel.rows; ++i) {
    for (int j = 0; j < vel.cols; ++j) {
      div[vel.idx(i, j)] =
          vel.u[vel.idx(i, j + 1)] - vel.u[vel.idx(i, j)] + vel.v[vel.idx(i + 1, j)] - vel.v[vel.idx(i, j)];
    }
  }
  return div;
}

double max_abs_divergence(const MacVelocity& vel) {
  double m = 0.0;
  for (double d : divergence(vel)) m = std::max(m, std::abs(d));
  return m;
}

double max_speed(const MacVelocity& vel) {
  double m = 0.0;
  for (int i = 0; i < vel.rows; ++i) {
    for (int j = 0; j < vel.cols; ++j) {
      const double east = 0.5 * (vel.u[vel.idx(i, j)] + vel.u[vel.idx(i, j + 1)]);
      const double south = 0.5 * (vel.v[vel.idx(i, j)] + vel.v[vel.idx(i + 1, j)]);
      m = std::max(m, std::hypot(east, south));
    }
  }
  return m;
}

ProjectionStats project(MacVelocity& vel, PressureSolver solver, int jacobi_iterations, double tolerance) {
  const std::size_t n = vel.u.size();
  std::vector<double> rhs = divergence(vel);
  remove_mean(rhs);
  std::vector<double> p(n, 0.0);
  ProjectionStats stats;

  if (solver == PressureSolver::jacobi) {
    std::vector<double> next(n, 0.0);
    for (int it = 0; it < jacobi_iterations; ++it) {
      for (int i = 0; i < vel.rows; ++i) {
        for (int j = 0; j < vel.cols; ++j) {
          const double sum = p[vel.idx(i, j + 1)] + p[vel.idx(i, j - 1)] + p[vel.idx(i + 1, j)] + p[vel.idx(i - 1, j)];
          next[vel.idx(i, j)] = 0.25 * (sum - rhs[vel.idx(i, j)]);
        }
      }
      p.swap(next);
    }
    stats.iterations = jacobi_iterations;
  } else {
    // Solve (-L) p = -rhs on the mean-free subspace.
    std::vector<double> r(n);
    for (std::size_t k = 0; k < n; ++k) r[k] = -rhs[k];
    std::vector<double> d = r;
    std::vector<double> ad(n, 0.0);
    const double b_norm = std::sqrt(dot(r, r));
    double rr = dot(r, r);
    const int cap = static_cast<int>(std::max<std::size_t>(n, 64));
    int it = 0;
    while (it < cap && b_norm > 0.0 && std::sqrt(rr) > tolerance * b_norm) {
      apply_neg_laplacian(vel, d, ad);
      const double dad = dot(d, ad);
      if (dad <= 0.0) break;
      const double alpha = rr / dad;
      for (std::size_t k = 0; k < n; ++k) {
        p[k] += alpha * d[k];
        r[k] -= alpha * ad[k];
      }
      const double rr_next = dot(r, r);
      const double beta = rr_next / rr;
      rr = rr_next;
      for (std::size_t k = 0; k < n; ++k) d[k] = r[k] + beta * d[k];
      ++it;
    }
    stats.iterations = it;
    stats.residual = b_norm > 0.0 ? std::sqrt(rr) / b_norm : 0.0;
  }

  for (int i = 0; i < vel.rows; ++i) {
    for (int j = 0; j < vel.cols; ++j) {
      const double pc = p[vel.idx(i, j)];
      vel.u[vel.idx(i, j)] -= pc - p[vel.idx(i, j - 1)];
      vel.v[vel.idx(i, j)] -= pc - p[vel.idx(i - 1, j)];
    }
  }
  return stats;
}

StableFluids::StableFluids(int rows, int cols, std::uint64_t seed, const FluidParams& params)
    : params_(params), vel_(rows, cols) {
  if (rows < 2 || cols < 2) throw std::invalid_argument("StableFluids: grid must be at least 2x2");
  if (!(params.viscosity > 0.0)) throw std::invalid_argument("StableFluids: viscosity must be positive");
  if (!(params.dt > 0.0)) throw std::invalid_argument("StableFluids: dt must be positive");
  if (params.base_speed < 0.0) throw std::invalid_argument("StableFluids: negative base speed");

  const double theta = params.base_direction * std::numbers::pi / 180.0;
  const double east = params.base_speed * std::sin(theta);
  const double south = -params.base_speed * std::cos(theta);
  std::fill(vel_.u.begin(), vel_.u.end(), east);
  std::fill(vel_.v.begin(), vel_.v.end(), south);

  std::mt19937_64 rng(derive_seed(seed, "vortices"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double extent = std::min(rows, cols);
  for (int k = 0; k < params.vortices; ++k) {
    Vortex v{};
    v.x = unit(rng) * cols;
    v.y = unit(rng) * rows;
    v.radius = (0.1 + 0.15 * unit(rng)) * extent;
    v.strength = unit(rng) < 0.5 ? -1.0 : 1.0;
    vortices_.push_back(v);
  }
}

void StableFluids::add_forcing() {
  if (params_.forcing == 0.0) return;
  const double rows = vel_.rows;
  const double cols = vel_.cols;
  // Gaussian stream function psi = s R exp(-d^2/R^2) / sqrt(2/e), whose peak
  // induced speed is s. u = d(psi)/dy, v = -d(psi)/dx.
  const double peak_norm = 1.0 / std::sqrt(2.0 / std::numbers::e);
  auto wrap = [](double d, double period) {
    d = std::fmod(d, period);
    if (d > 0.5 * period) d -= period;
    if (d < -0.5 * period) d += period;
    return d;
  };
  const double scale = params_.forcing * params_.dt;
  for (int i = 0; i < vel_.rows; ++i) {
    for (int j = 0; j < vel_.cols; ++j) {
      double fu = 0.0;
      double fv = 0.0;
      for (const Vortex& vx : vortices_) {
        const double r2 = vx.radius * vx.radius;
        {
          const double dx = wrap(j - vx.x, cols);
          const double dy = wrap(i + 0.5 - vx.y, rows);
          const double g = std::exp(-(dx * dx + dy * dy) / r2);
          fu += vx.strength * peak_norm * vx.radius * g * (-2.0 * dy / r2);
        }
        {
          const double dx = wrap(j + 0.5 - vx.x, cols);
          const double dy = wrap(i - vx.y, rows);
          const double g = std::exp(-(dx * dx + dy * dy) / r2);
          fv -= vx.strength * peak_norm * vx.radius * g * (-2.0 * dx / r2);
        }
      }
      vel_.u[vel_.idx(i, j)] += scale * fu;
      vel_.v[vel_.idx(i, j)] += scale * fv;
    }
  }
}

void StableFluids::advect() {
  const MacVelocity old = vel_;
  const double dt = params_.dt;
  for (int i = 0; i < vel_.rows; ++i) {
    for (int j = 0; j < vel_.cols; ++j) {
      {
        const double x = j;
        const double y = i + 0.5;
        const double ux = sample(old, old.u, 0.0, 0.5, x, y);
        const double vy = sample(old, old.v, 0.5, 0.0, x, y);
        vel_.u[vel_.idx(i, j)] = sample(old, old.u, 0.0, 0.5, x - dt * ux, y - dt * vy);
      }
      {
        const double x = j + 0.5;
        const double y = i;
        const double ux = sample(old, old.u, 0.0, 0.5, x, y);
        const double vy = sample(old, old.v, 0.5, 0.0, x, y);
        vel_.v[vel_.idx(i, j)] = sample(old, old.v, 0.5, 0.0, x - dt * ux, y - dt * vy);
      }
    }
  }
}

void StableFluids::diffuse() {
  const double a = params_.viscosity * params_.dt;
  for (std::vector<double>* field : {&vel_.u, &vel_.v}) {
    const std::vector<double> b = *field;
    std::vector<double> x = b;
    std::vector<double> next(b.size());
    for (int it = 0; it < params_.diffusion_iterations; ++it) {
      for (int i = 0; i < vel_.rows; ++i) {
        for (int j = 0; j < vel_.cols; ++j) {
          const double sum =
              x[vel_.idx(i, j + 1)] + x[vel_.idx(i, j - 1)] + x[vel_.idx(i + 1, j)] + x[vel_.idx(i - 1, j)];
          next[vel_.idx(i, j)] = (b[vel_.idx(i, j)] + a * sum) / (1.0 + 4.0 * a);
        }
      }
      x.swap(next);
    }
    *field = std::move(x);
  }
}

void StableFluids::step() {
  add_forcing();
  advect();
  diffuse();
  project(vel_, params_.solver, params_.pressure_iterations, params_.pressure_tolerance);
}

WindFrame StableFluids::frame() const {
  WindFrame out{Grid<float>(vel_.rows, vel_.cols, 0.0F), Grid<float>(vel_.rows, vel_.cols, 0.0F)};
  for (int i = 0; i < vel_.rows; ++i) {
    for (int j = 0; j < vel_.cols; ++j) {
      const double east = 0.5 * (vel_.u[vel_.idx(i, j)] + vel_.u[vel_.idx(i, j + 1)]);
      const double north = -0.5 * (vel_.v[vel_.idx(i, j)] + vel_.v[vel_.idx(i + 1, j)]);
      const double speed = std::hypot(east, north);
      out.speed(i, j) = static_cast<float>(speed);
      if (speed > 0.0) {
        auto dir = static_cast<float>(normalize_degrees(std::atan2(east, north) * 180.0 / std::numbers::pi));
        if (dir >= 360.0F) dir = 0.0F;
        out.direction(i, j) = dir;
      }
    }
  }
  return out;
}

}  // namespace emberline::fluid
