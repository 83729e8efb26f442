#include "carets/baselines.hpp"

namespace carets {

VectorXd persistence_forecast(double x_n, int horizon) {
    if (horizon < 1) throw ConfigError("persistence_forecast: horizon must be >= 1");
    return VectorXd::Constant(horizon, x_n);
}

MatrixXd persistence_forecast_batch(const VectorXd& x_n, int horizon) {
    if (horizon < 1) throw ConfigError("persistence_forecast: horizon must be >= 1");
    return x_n.replicate(1, horizon);
}

}  // namespace carets
