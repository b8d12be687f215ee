#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

namespace sirdc {

/// Roughness of the power-exponential kernel; 2 (Gaussian) is avoided for conditioning.
inline constexpr double kRoughness = 1.9;

inline constexpr double kRangeMin = 0.1;
inline constexpr double kRangeMaxPerPoint = 1000.0;  ///< upper range bound is this times T
inline constexpr double kNuggetMin = 1e-8;
inline constexpr double kNuggetMax = 1000.0;

/// exp(-(|l - m| / b)^1.9)
double correlation_value(double l, double m, double b);

/// Cholesky factor of R + eta*I for fixed training times and hyperparameters.
class CorrelationFactor {
 public:
  /// Throws NumericalError if the matrix is not numerically positive definite.
  CorrelationFactor(std::span<const double> times, double range, double nugget);

  const std::vector<double>& times() const { return times_; }
  double range() const { return range_; }
  double nugget() const { return nugget_; }
  std::size_t size() const { return times_.size(); }

  Eigen::VectorXd solve(const Eigen::VectorXd& y) const;
  Eigen::MatrixXd solve_columns(const Eigen::MatrixXd& y) const;
  /// L^{-1} y
  Eigen::VectorXd half_solve(const Eigen::VectorXd& y) const;
  Eigen::MatrixXd half_solve(const Eigen::MatrixXd& y) const;
  double log_det() const;
  /// Cross-correlation vector r(t*) against the training times.
  Eigen::VectorXd cross(double t_star) const;

 private:
  std::vector<double> times_;
  double range_;
  double nugget_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// Fitted residual GP: targets are residuals y = D - F at the training times,
/// `means` the F series. Immutable once built.
class GPModel {
 public:
  GPModel(std::span<const double> times, std::span<const double> residuals, std::span<const double> means,
          double range, double nugget);

  double range() const { return factor_->range(); }
  double nugget() const { return factor_->nugget(); }
  double roughness() const { return kRoughness; }
  double sigma2_hat() const { return sigma2_; }
  const std::vector<double>& times() const { return factor_->times(); }
  const std::vector<double>& residuals() const { return residuals_; }
  const std::vector<double>& means() const { return means_; }
  const CorrelationFactor& factor() const { return *factor_; }
  std::shared_ptr<const CorrelationFactor> shared_factor() const { return factor_; }
  const Eigen::VectorXd& weights() const { return weights_; }  ///< (R + eta I)^{-1} y
  /// True when the residuals are identically zero (sigma2_hat == 0).
  bool degenerate() const { return sigma2_ == 0.0; }

 private:
  std::shared_ptr<const CorrelationFactor> factor_;
  std::vector<double> residuals_;
  std::vector<double> means_;
  Eigen::VectorXd weights_;
  double sigma2_ = 0.0;
};

/// Student-t predictive for one time point.
struct PredictiveDistribution {
  double location = 0.0;
  double scale2 = 0.0;
  double dof = 1.0;

  double quantile(double p) const;
  double lower95() const { return quantile(0.025); }
  double upper95() const { return quantile(0.975); }
};

/// location = f* + r^T R~^{-1} y, scale2 = sigma2_hat (1 + eta - r^T R~^{-1} r), dof = T.
PredictiveDistribution predictive_distribution(const GPModel& model, double t_star, double f_star);

/// Variance-marginalized log objective plus the robust log prior:
///   -1/2 log|R~| - T/2 log(y^T R~^{-1} y) + 0.2 log(tau) - 1.2/T * tau,
///   tau = (t_max - t_min)/b + eta.
/// Returns -infinity when the factorization fails or y^T R~^{-1} y == 0.
double log_marginal_objective(std::span<const double> times, std::span<const double> residuals, double range,
                              double nugget);

/// Posterior-mode (range, nugget) by a coarse log grid followed by bounded
/// quasi-Newton polishing from the five best cells. `means` defaults to zero.
/// Identically zero residuals give a degenerate model without optimization.
GPModel fit_hyperparameters(std::span<const double> times, std::span<const double> residuals,
                            std::span<const double> means = {});

/// Constant-mean GP on raw values; the mean is the generalized least squares
/// estimate under the fitted correlation (two passes).
GPModel fit_constant_mean(std::span<const double> times, std::span<const double> values);

/// Joint multivariate-t predictive over a set of future times. The
/// correlation part depends only on (times, range, nugget, t*), so one
/// predictor serves any target vector on the same grid.
class HorizonPredictor {
 public:
  struct Options {
    bool include_nugget = true;   ///< off: draws follow the latent process rather than new observations
    bool estimated_mean = false;  ///< add the variance of a GLS-estimated constant mean
  };
  HorizonPredictor(std::shared_ptr<const CorrelationFactor> factor, std::span<const double> t_star);
  HorizonPredictor(std::shared_ptr<const CorrelationFactor> factor, std::span<const double> t_star, Options options);

  struct Moments {
    Eigen::VectorXd location;
    double sigma2 = 0.0;
  };

  /// Location and profiled variance for residual targets y and means f*.
  Moments moments(const Eigen::VectorXd& y, std::span<const double> f_star) const;
  Eigen::VectorXd draw(const Moments& m, std::mt19937_64& rng) const;
  /// Diagonal of the predictive correlation (scale2 / sigma2).
  Eigen::VectorXd scale_factors() const { return scale_diag_; }
  std::size_t horizon() const { return static_cast<std::size_t>(scale_diag_.size()); }

 private:
  std::shared_ptr<const CorrelationFactor> factor_;
  Eigen::MatrixXd cross_solved_;  ///< R~^{-1} r(t*_j) columns
  Eigen::MatrixXd chol_;          ///< lower Cholesky factor of the predictive correlation
  Eigen::VectorXd scale_diag_;
};

/// n_samples joint draws (rows) over t_star; reproducible per seed.
Eigen::MatrixXd sample_paths(const GPModel& model, std::span<const double> t_star, std::span<const double> f_star,
                             int n_samples, std::uint64_t seed);

}  // namespace sirdc
