#pragma once

#include "carets/common.hpp"

namespace carets {

// Zero-skill reference: repeats the latest observation at every step. Under
// the tie rule its trend prediction is always "upward", so its trend
// accuracy equals the upward-label rate of the data.
VectorXd persistence_forecast(double x_n, int horizon);

// y_hat(b, k) = x_n(b) for a whole batch.
MatrixXd persistence_forecast_batch(const VectorXd& x_n, int horizon);

}  // namespace carets
