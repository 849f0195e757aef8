#include "unpred/bounded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "unpred/errors.hpp"
#include "unpred/linalg.hpp"
#include "unpred/sim.hpp"

namespace unpred {

double truncation_horizon(double K, double alpha, double M, double tol) {
  require(K >= 1.0 && alpha > 0.0 && M >= 0.0 && tol > 0.0, "bounded",
          "truncation horizon needs K >= 1, alpha > 0, M >= 0 and tol > 0");
  if (M == 0.0) return 0.0;
  return std::max(0.0, std::log(8.0 * M * K / (alpha * tol)) / alpha);
}

double tail_bound(double K, double alpha, double M, double T) {
  if (!std::isfinite(alpha)) return 0.0;
  return 2.0 * M * K * std::exp(-alpha * T) / alpha;
}

namespace {

struct Branch {
  std::size_t offset = 0;  // first y-component of the block
  std::size_t size = 0;
  const Matrix* block = nullptr;
  double alpha = 0.0;
  std::size_t horizon_cells = 0;  // truncation horizon in output cells
  std::size_t substeps = 1;       // integrator steps per output cell
  bool capped = false;
};

}  // namespace

BoundedSolution bounded_solution(const SpectralSplit& split, const VectorSignal& g, double t_lo, double t_hi,
                                 const BoundedOptions& options) {
  const std::size_t n = split.dimension();
  require(g.dimension() == n, "bounded", "forcing dimension must match the system dimension");
  require(t_hi >= t_lo, "bounded", "window must satisfy t_lo <= t_hi");
  require(options.tol > 0.0, "bounded", "tolerance must be positive");
  require(options.step > 0.0 && options.record_stride > 0, "bounded", "step and record stride must be positive");
  require(options.max_horizon > 0.0 && options.horizon_padding >= 0.0, "bounded",
          "horizon cap must be positive and padding non-negative");

  BoundedSolution sol(split, g);
  sol.dim_ = n;
  sol.t_lo_ = t_lo;
  sol.tol_ = options.tol;
  sol.spacing_ = options.step * static_cast<double>(options.record_stride);
  const double cell = sol.spacing_;
  sol.count_ = static_cast<std::size_t>(std::floor((t_hi - t_lo) / cell + 1e-9)) + 1;
  const std::size_t count = sol.count_;

  const double M = norm_2(split.Binv) * g.sup_bound();
  const double K = split.K();
  BoundedCertificate& cert = sol.cert_;
  cert.K = K;
  cert.alpha = split.alpha();
  cert.M = M;

  Branch minus{0, split.q, &split.Aminus, split.constants.alpha_minus};
  Branch plus{split.q, n - split.q, &split.Aplus, split.constants.alpha_plus};
  for (Branch* b : {&minus, &plus}) {
    if (b->size == 0) continue;
    double T = truncation_horizon(K, b->alpha, M, options.tol);
    if (T > options.max_horizon) {
      T = options.max_horizon;
      b->capped = true;
    }
    T += options.horizon_padding;
    b->horizon_cells = static_cast<std::size_t>(std::ceil(T / cell - 1e-9));
    const double rho = spectral_radius(*b->block);
    std::size_t sub = options.record_stride;
    while (cell / static_cast<double>(sub) * rho > 0.5) {
      sub *= 2;
      if (cell / static_cast<double>(sub) < 1e-9)
        throw NumericalError("bounded: stability guard needs an integrator step below 1e-9 (spectral radius " +
                             std::to_string(rho) + ")");
    }
    b->substeps = sub;
    const double Tq = static_cast<double>(b->horizon_cells) * cell;
    cert.tail_bound = std::max(cert.tail_bound, tail_bound(K, b->alpha, M, Tq));
    cert.horizon_capped = cert.horizon_capped || b->capped;
  }
  cert.T_minus = minus.size ? static_cast<double>(minus.horizon_cells) * cell : 0.0;
  cert.T_plus = plus.size ? static_cast<double>(plus.horizon_cells) * cell : 0.0;
  cert.h_minus = minus.size ? cell / static_cast<double>(minus.substeps) : 0.0;
  cert.h_plus = plus.size ? cell / static_cast<double>(plus.substeps) : 0.0;

  const double s_begin = t_lo - cert.T_minus;
  const double s_end = sol.time(count - 1) + cert.T_plus;
  if (!g.domain().covers(s_begin, s_end))
    throw DomainError("bounded: signal domain too short; forcing covers [" + std::to_string(g.domain().lo) + ", " +
                      std::to_string(g.domain().hi) + "] but the solver needs [" + std::to_string(s_begin) + ", " +
                      std::to_string(s_end) + "]");

  // y-coordinates, row-major per output point.
  std::vector<double> y(count * n, 0.0);
  const Matrix& binv = split.Binv;
  for (const Branch* b : {&minus, &plus}) {
    if (b->size == 0) continue;
    const std::size_t off = b->offset;
    const std::size_t sz = b->size;
    Vector gx(n), fy(n);
    auto forcing = [&](double t, std::span<double> out) {
      g.evaluate_unchecked(t, gx);
      for (std::size_t i = 0; i < sz; ++i) {
        double s = 0.0;
        const auto row = binv.row(off + i);
        for (std::size_t j = 0; j < n; ++j) s += row[j] * gx[j];
        out[i] = s;
      }
    };
    const Vector zero(sz, 0.0);
    const std::size_t cells = b->horizon_cells + count - 1;
    const std::size_t steps = cells * b->substeps;
    const double h = cell / static_cast<double>(b->substeps);
    const std::size_t skip = b->horizon_cells;
    if (b == &minus) {
      detail::rk4_run(*b->block, forcing, s_begin, zero, h, steps, b->substeps,
                      [&](std::size_t step, double, std::span<const double> x) {
                        const std::size_t c = step / b->substeps;
                        if (c < skip) return;
                        std::copy(x.begin(), x.end(), y.begin() + static_cast<std::ptrdiff_t>((c - skip) * n + off));
                      });
    } else {
      detail::rk4_run(*b->block, forcing, s_end, zero, -h, steps, b->substeps,
                      [&](std::size_t step, double, std::span<const double> x) {
                        const std::size_t c = step / b->substeps;
                        if (c < skip) return;
                        const std::size_t k = count - 1 - (c - skip);
                        std::copy(x.begin(), x.end(), y.begin() + static_cast<std::ptrdiff_t>(k * n + off));
                      });
    }
  }

  sol.values_.resize(count * n);
  for (std::size_t k = 0; k < count; ++k)
    multiply_into(split.B, {y.data() + k * n, n}, {sol.values_.data() + k * n, n});
  if (!std::all_of(sol.values_.begin(), sol.values_.end(), [](double v) { return std::isfinite(v); }))
    throw NumericalError("bounded: solution became non-finite");
  return sol;
}

void BoundedSolution::evaluate(double t, std::span<double> out) const {
  const double hi = t_hi();
  const double slack = 1e-9 * spacing_;
  if (!(t >= t_lo_ - slack && t <= hi + slack))
    throw DomainError("bounded: solution evaluated at t = " + std::to_string(t) + " outside its window [" +
                      std::to_string(t_lo_) + ", " + std::to_string(hi) + "]");
  const double u = (t - t_lo_) / spacing_;
  const double ku = std::round(u);
  if (std::abs(u - ku) <= 1e-9) {
    const auto k = static_cast<std::size_t>(std::clamp(ku, 0.0, static_cast<double>(count_ - 1)));
    const auto v = value(k);
    std::copy(v.begin(), v.end(), out.begin());
    return;
  }
  auto k = static_cast<std::size_t>(std::floor(u));
  if (k + 1 >= count_) k = count_ - 2;
  const double s = u - static_cast<double>(k);
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  Vector d0(dim_), d1(dim_), g0(dim_), g1(dim_);
  const auto x0 = value(k);
  const auto x1 = value(k + 1);
  g_.evaluate_unchecked(time(k), g0);
  g_.evaluate_unchecked(time(k + 1), g1);
  multiply_into(split_.A, x0, d0);
  multiply_into(split_.A, x1, d1);
  for (std::size_t i = 0; i < dim_; ++i) {
    d0[i] += g0[i];
    d1[i] += g1[i];
    out[i] = h00 * x0[i] + h10 * spacing_ * d0[i] + h01 * x1[i] + h11 * spacing_ * d1[i];
  }
}

Vector BoundedSolution::evaluate(double t) const {
  Vector v(dim_);
  evaluate(t, v);
  return v;
}

double BoundedSolution::envelope() const {
  const double km = cert_.K * cert_.M;
  double e = 0.0;
  if (split_.q > 0) e += km / split_.constants.alpha_minus;
  if (split_.q < dim_) e += km / split_.constants.alpha_plus;
  return norm_2(split_.B) * e;
}

ResidualReport residual_certificate(BoundedSolution& sol, double grid_step) {
  require(grid_step > 0.0, "bounded", "residual grid step must be positive");
  require(sol.t_hi() - sol.t_lo() >= 2.0 * grid_step, "bounded", "window too short for centered differences");
  const std::size_t n = sol.dimension();
  const auto kink = sol.forcing().kink_spacing();
  ResidualReport rep;
  Vector plus(n), minus(n), mid(n), gv(n), ax(n);
  const auto last = static_cast<std::size_t>(std::floor((sol.t_hi() - sol.t_lo()) / grid_step + 1e-9));
  for (std::size_t j = 1; j < last; ++j) {
    const double t = sol.t_lo() + static_cast<double>(j) * grid_step;
    if (kink) {
      const double lo = (t - grid_step * (1.0 - 1e-9)) / *kink;
      const double hi = (t + grid_step * (1.0 - 1e-9)) / *kink;
      if (std::floor(hi) >= std::ceil(lo)) {
        ++rep.skipped;
        continue;
      }
    }
    sol.evaluate(t + grid_step, plus);
    sol.evaluate(t - grid_step, minus);
    sol.evaluate(t, mid);
    sol.forcing().evaluate(t, gv);
    multiply_into(sol.split().A, mid, ax);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = (plus[i] - minus[i]) / (2.0 * grid_step) - ax[i] - gv[i];
      s += r * r;
    }
    rep.max_residual = std::max(rep.max_residual, std::sqrt(s));
    ++rep.points;
  }
  auto& cert = sol.certificate();
  cert.max_residual = rep.max_residual;
  cert.residual_points = rep.points;
  cert.residual_skipped = rep.skipped;
  return rep;
}

}  // namespace unpred
