#pragma once

#include "mbsts/gibbs.hpp"
#include "mbsts/random.hpp"

#include <map>
#include <vector>

namespace mbsts {

struct ForecastResult {
  std::vector<MatrixXd> samples;         // one horizon x m path per retained draw
  MatrixXd mean;                         // horizon x m
  std::map<double, MatrixXd> quantiles;  // probability -> horizon x m

  int horizon() const { return static_cast<int>(mean.rows()); }
};

/// One posterior-predictive path per retained draw, rolled forward from that
/// draw's final state with fresh component and observation noise.
/// `x_future` holds the next `horizon` predictor rows for each series.
ForecastResult predict(const PosteriorDraws& draws, const ModelSpec& spec,
                       const std::vector<MatrixXd>& x_future, int horizon, Rng& rng);

/// Fills the mean and the central bands for each level in `levels`: level L
/// adds the (1 - L) / 2 and (1 + L) / 2 quantiles.
ForecastResult summarize(ForecastResult result, const std::vector<double>& levels);

/// Sample quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double p);

/// PE_t = sum_i |y_i - yhat_i|.
double one_step_error(const VectorXd& y_true, const VectorXd& forecast_mean);

}  // namespace mbsts
