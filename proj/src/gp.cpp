#include "sirdc/gp.hpp"

#include <algorithm>
#include <array>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "sirdc/error.hpp"

namespace sirdc {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPriorShape = 0.2;

Eigen::VectorXd to_vector(std::span<const double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) out[static_cast<Eigen::Index>(k)] = v[k];
  return out;
}

double time_span(std::span<const double> times) {
  const auto [lo, hi] = std::minmax_element(times.begin(), times.end());
  return std::max(*hi - *lo, 1.0);
}

double log_prior(double range, double nugget, double span, std::size_t n) {
  const double tau = span / range + nugget;
  return kPriorShape * std::log(tau) - (1.0 + kPriorShape) / static_cast<double>(n) * tau;
}

}  // namespace

double correlation_value(double l, double m, double b) {
  if (!(b > 0.0)) throw DataError("correlation range must be positive");
  return std::exp(-std::pow(std::abs(l - m) / b, kRoughness));
}

CorrelationFactor::CorrelationFactor(std::span<const double> times, double range, double nugget)
    : times_(times.begin(), times.end()), range_(range), nugget_(nugget) {
  if (times_.empty()) throw DataError("GP needs at least one training point");
  if (!(range > 0.0) || !(nugget >= 0.0)) throw DataError("GP hyperparameters out of range");
  const auto n = static_cast<Eigen::Index>(times_.size());
  Eigen::MatrixXd r(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    r(a, a) = 1.0 + nugget;
    for (Eigen::Index b = 0; b < a; ++b) {
      const double k = correlation_value(times_[static_cast<std::size_t>(a)], times_[static_cast<std::size_t>(b)], range);
      r(a, b) = k;
      r(b, a) = k;
    }
  }
  llt_.compute(r);
  if (llt_.info() != Eigen::Success) throw NumericalError("correlation matrix is not positive definite");
  const auto& l = llt_.matrixLLT();
  for (Eigen::Index a = 0; a < n; ++a)
    if (!(l(a, a) > 0.0) || !std::isfinite(l(a, a))) throw NumericalError("correlation matrix is not positive definite");
}

Eigen::VectorXd CorrelationFactor::solve(const Eigen::VectorXd& y) const { return llt_.solve(y); }

Eigen::MatrixXd CorrelationFactor::solve_columns(const Eigen::MatrixXd& y) const { return llt_.solve(y); }

Eigen::VectorXd CorrelationFactor::half_solve(const Eigen::VectorXd& y) const {
  return llt_.matrixL().solve(y);
}

Eigen::MatrixXd CorrelationFactor::half_solve(const Eigen::MatrixXd& y) const { return llt_.matrixL().solve(y); }

double CorrelationFactor::log_det() const {
  return 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
}

Eigen::VectorXd CorrelationFactor::cross(double t_star) const {
  Eigen::VectorXd r(static_cast<Eigen::Index>(times_.size()));
  for (std::size_t k = 0; k < times_.size(); ++k) r[static_cast<Eigen::Index>(k)] = correlation_value(t_star, times_[k], range_);
  return r;
}

GPModel::GPModel(std::span<const double> times, std::span<const double> residuals, std::span<const double> means,
                 double range, double nugget)
    : factor_(std::make_shared<CorrelationFactor>(times, range, nugget)),
      residuals_(residuals.begin(), residuals.end()),
      means_(means.begin(), means.end()) {
  if (residuals_.size() != times.size()) throw DataError("GP residuals and times differ in length");
  if (means_.empty()) means_.assign(times.size(), 0.0);
  if (means_.size() != times.size()) throw DataError("GP means and times differ in length");
  const Eigen::VectorXd y = to_vector(residuals_);
  weights_ = factor_->solve(y);
  sigma2_ = std::max(0.0, y.dot(weights_) / static_cast<double>(times.size()));
}

double PredictiveDistribution::quantile(double p) const {
  if (scale2 <= 0.0) return location;
  boost::math::students_t dist(dof);
  return location + boost::math::quantile(dist, p) * std::sqrt(scale2);
}

PredictiveDistribution predictive_distribution(const GPModel& model, double t_star, double f_star) {
  const Eigen::VectorXd r = model.factor().cross(t_star);
  const Eigen::VectorXd v = model.factor().half_solve(r);
  PredictiveDistribution out;
  out.location = f_star + r.dot(model.weights());
  out.scale2 = model.sigma2_hat() * (1.0 + model.nugget() - v.squaredNorm());
  out.dof = static_cast<double>(model.times().size());
  if (out.scale2 < -1e-10) throw NumericalError("negative predictive variance");
  if (out.scale2 < 0.0) out.scale2 = 0.0;
  return out;
}

double log_marginal_objective(std::span<const double> times, std::span<const double> residuals, double range,
                              double nugget) {
  if (times.size() != residuals.size()) throw DataError("GP residuals and times differ in length");
  try {
    const CorrelationFactor factor(times, range, nugget);
    const Eigen::VectorXd z = factor.half_solve(to_vector(residuals));
    const double quad = z.squaredNorm();
    if (!(quad > 0.0) || !std::isfinite(quad)) return kNegInf;
    const double n = static_cast<double>(times.size());
    return -0.5 * factor.log_det() - 0.5 * n * std::log(quad) +
           log_prior(range, nugget, time_span(times), times.size());
  } catch (const NumericalError&) {
    return kNegInf;
  }
}

namespace {

using Vec2 = std::array<double, 2>;

// Bounded BFGS on the negated objective in log coordinates. Central
// differences, clamped to the box; free-variable projection at active bounds.
Vec2 polish(const std::function<double(const Vec2&)>& neg, Vec2 x, const Vec2& lo, const Vec2& hi, double& fx) {
  constexpr double h = 1e-5;
  auto clamp = [&](Vec2 p) {
    for (int k = 0; k < 2; ++k) p[k] = std::clamp(p[k], lo[k], hi[k]);
    return p;
  };
  auto grad = [&](const Vec2& p) {
    Vec2 g{};
    for (int k = 0; k < 2; ++k) {
      Vec2 a = p, b = p;
      a[k] = std::min(p[k] + h, hi[k]);
      b[k] = std::max(p[k] - h, lo[k]);
      const double fa = neg(a), fb = neg(b);
      g[k] = (std::isfinite(fa) && std::isfinite(fb)) ? (fa - fb) / (a[k] - b[k]) : 0.0;
    }
    return g;
  };

  fx = neg(x);
  if (!std::isfinite(fx)) return x;
  double H[2][2] = {{1.0, 0.0}, {0.0, 1.0}};
  Vec2 g = grad(x);
  for (int it = 0; it < 100; ++it) {
    Vec2 d{-(H[0][0] * g[0] + H[0][1] * g[1]), -(H[1][0] * g[0] + H[1][1] * g[1])};
    for (int k = 0; k < 2; ++k) {
      const bool at_lo = x[k] <= lo[k] && d[k] < 0.0;
      const bool at_hi = x[k] >= hi[k] && d[k] > 0.0;
      if (at_lo || at_hi) d[k] = 0.0;
    }
    if (d[0] * g[0] + d[1] * g[1] >= 0.0) {
      d = {-g[0], -g[1]};
      for (int k = 0; k < 2; ++k)
        if ((x[k] <= lo[k] && d[k] < 0.0) || (x[k] >= hi[k] && d[k] > 0.0)) d[k] = 0.0;
      H[0][0] = H[1][1] = 1.0;
      H[0][1] = H[1][0] = 0.0;
    }
    if (std::hypot(d[0], d[1]) < 1e-12) break;

    double step = 1.0;
    Vec2 xn = x;
    double fn = fx;
    bool moved = false;
    for (int ls = 0; ls < 40; ++ls) {
      xn = clamp({x[0] + step * d[0], x[1] + step * d[1]});
      fn = neg(xn);
      const double decrease = g[0] * (xn[0] - x[0]) + g[1] * (xn[1] - x[1]);
      if (std::isfinite(fn) && fn <= fx + 1e-4 * decrease) {
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved || fn >= fx) break;

    const Vec2 gn = grad(xn);
    const Vec2 s{xn[0] - x[0], xn[1] - x[1]};
    const Vec2 y{gn[0] - g[0], gn[1] - g[1]};
    const double sy = s[0] * y[0] + s[1] * y[1];
    const double improvement = fx - fn;
    x = xn;
    fx = fn;
    g = gn;
    if (sy > 1e-12) {
      const double rho = 1.0 / sy;
      const double Hy[2] = {H[0][0] * y[0] + H[0][1] * y[1], H[1][0] * y[0] + H[1][1] * y[1]};
      const double yHy = y[0] * Hy[0] + y[1] * Hy[1];
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          H[a][b] += (1.0 + yHy * rho) * rho * s[a] * s[b] - rho * (Hy[a] * s[b] + s[a] * Hy[b]);
    }
    if (improvement < 1e-12 && std::hypot(s[0], s[1]) < 1e-9) break;
  }
  return x;
}

}  // namespace

GPModel fit_hyperparameters(std::span<const double> times, std::span<const double> residuals,
                            std::span<const double> means) {
  const std::size_t n = times.size();
  if (n < 3) throw DataError("GP hyperparameter fit needs at least three points");
  if (residuals.size() != n) throw DataError("GP residuals and times differ in length");

  if (std::all_of(residuals.begin(), residuals.end(), [](double v) { return v == 0.0; })) {
    return GPModel(times, residuals, means, time_span(times), 1.0);
  }

  const Vec2 lo{std::log(kRangeMin), std::log(kNuggetMin)};
  const Vec2 hi{std::log(kRangeMaxPerPoint * static_cast<double>(n)), std::log(kNuggetMax)};
  auto neg = [&](const Vec2& p) {
    const double v = log_marginal_objective(times, residuals, std::exp(p[0]), std::exp(p[1]));
    return std::isfinite(v) ? -v : std::numeric_limits<double>::infinity();
  };

  constexpr int kGrid = 12;
  struct Cell {
    double value;
    Vec2 x;
  };
  std::vector<Cell> cells;
  for (int a = 0; a < kGrid; ++a)
    for (int b = 0; b < kGrid; ++b) {
      const Vec2 x{lo[0] + (hi[0] - lo[0]) * a / (kGrid - 1), lo[1] + (hi[1] - lo[1]) * b / (kGrid - 1)};
      cells.push_back({neg(x), x});
    }
  std::stable_sort(cells.begin(), cells.end(), [](const Cell& p, const Cell& q) { return p.value < q.value; });
  if (!std::isfinite(cells.front().value)) throw NumericalError("GP fit failure: every candidate is singular");

  Vec2 best = cells.front().x;
  double best_value = cells.front().value;
  for (int s = 0; s < 5 && std::isfinite(cells[static_cast<std::size_t>(s)].value); ++s) {
    double fx = 0.0;
    const Vec2 x = polish(neg, cells[static_cast<std::size_t>(s)].x, lo, hi, fx);
    if (fx < best_value) {
      best_value = fx;
      best = x;
    }
  }
  return GPModel(times, residuals, means, std::exp(best[0]), std::exp(best[1]));
}

GPModel fit_constant_mean(std::span<const double> times, std::span<const double> values) {
  const std::size_t n = values.size();
  if (times.size() != n) throw DataError("GP values and times differ in length");
  auto residuals_for = [&](double mean) {
    std::vector<double> r(n);
    for (std::size_t k = 0; k < n; ++k) r[k] = values[k] - mean;
    return r;
  };
  double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  GPModel model = fit_hyperparameters(times, residuals_for(mean), std::vector<double>(n, mean));
  if (model.degenerate()) return model;

  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  const Eigen::VectorXd w = model.factor().solve(ones);
  mean = w.dot(to_vector(values)) / w.sum();
  return GPModel(times, residuals_for(mean), std::vector<double>(n, mean), model.range(), model.nugget());
}

HorizonPredictor::HorizonPredictor(std::shared_ptr<const CorrelationFactor> factor, std::span<const double> t_star)
    : HorizonPredictor(std::move(factor), t_star, Options{}) {}

HorizonPredictor::HorizonPredictor(std::shared_ptr<const CorrelationFactor> factor, std::span<const double> t_star,
                                   Options options)
    : factor_(std::move(factor)) {
  const auto n = static_cast<Eigen::Index>(factor_->size());
  const auto h = static_cast<Eigen::Index>(t_star.size());
  if (h == 0) throw DataError("empty prediction grid");
  Eigen::MatrixXd r(n, h);
  for (Eigen::Index j = 0; j < h; ++j) r.col(j) = factor_->cross(t_star[static_cast<std::size_t>(j)]);
  const Eigen::MatrixXd v = factor_->half_solve(r);
  cross_solved_ = factor_->solve_columns(r);

  Eigen::MatrixXd cov(h, h);
  for (Eigen::Index a = 0; a < h; ++a)
    for (Eigen::Index b = 0; b <= a; ++b) {
      double k = correlation_value(t_star[static_cast<std::size_t>(a)], t_star[static_cast<std::size_t>(b)],
                                   factor_->range());
      if (a == b && options.include_nugget) k += factor_->nugget();
      const double c = k - v.col(a).dot(v.col(b));
      cov(a, b) = c;
      cov(b, a) = c;
    }
  if (options.estimated_mean) {
    const Eigen::VectorXd ones_solved = factor_->solve(Eigen::VectorXd::Ones(n));
    const Eigen::VectorXd u = Eigen::VectorXd::Ones(h) - r.transpose() * ones_solved;
    cov += u * u.transpose() / ones_solved.sum();
  }
  scale_diag_ = cov.diagonal().cwiseMax(0.0);

  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    cov.diagonal().array() += 1e-8;
    llt.compute(cov);
    if (llt.info() != Eigen::Success) throw NumericalError("predictive covariance is not positive definite");
  }
  chol_ = llt.matrixL();
}

HorizonPredictor::Moments HorizonPredictor::moments(const Eigen::VectorXd& y, std::span<const double> f_star) const {
  if (static_cast<std::size_t>(y.size()) != factor_->size()) throw DataError("GP target length mismatch");
  if (f_star.size() != horizon()) throw DataError("GP mean length mismatch");
  Moments m;
  m.location = cross_solved_.transpose() * y;
  for (std::size_t k = 0; k < f_star.size(); ++k) m.location[static_cast<Eigen::Index>(k)] += f_star[k];
  m.sigma2 = std::max(0.0, y.dot(factor_->solve(y)) / static_cast<double>(factor_->size()));
  return m;
}

Eigen::VectorXd HorizonPredictor::draw(const Moments& m, std::mt19937_64& rng) const {
  if (m.sigma2 == 0.0) return m.location;
  std::normal_distribution<double> normal(0.0, 1.0);
  const double dof = static_cast<double>(factor_->size());
  std::chi_squared_distribution<double> chi2(dof);
  Eigen::VectorXd z(m.location.size());
  for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = normal(rng);
  const double w = chi2(rng);
  return m.location + std::sqrt(m.sigma2 * dof / w) * (chol_ * z);
}

Eigen::MatrixXd sample_paths(const GPModel& model, std::span<const double> t_star, std::span<const double> f_star,
                             int n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw DataError("n_samples must be positive");
  const HorizonPredictor predictor(model.shared_factor(), t_star);
  const auto moments = predictor.moments(to_vector(model.residuals()), f_star);
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd out(n_samples, static_cast<Eigen::Index>(t_star.size()));
  for (int s = 0; s < n_samples; ++s) out.row(s) = predictor.draw(moments, rng).transpose();
  return out;
}

}  // namespace sirdc
