// estimates.hpp -- common result carriers for statistical estimators.
#pragma once

#include <string>
#include <vector>

namespace rwre::stats {

// Point estimate with a 95% confidence interval.
struct EstimateWithCI {
    double point = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    int n_samples = 0;
    std::string method;

    bool contains(double v) const { return ci_low <= v && v <= ci_high; }
    bool overlaps(const EstimateWithCI& o) const {
        return ci_low <= o.ci_high && o.ci_low <= ci_high;
    }
};

// Log-log regression of a statistic against n.
struct ExponentFit {
    std::vector<std::pair<double, double>> points;  // (n, statistic), dropped points excluded
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double residual_norm = 0.0;
    int dropped = 0;  // grid points lost to empty estimates
};

// Least squares of log(y) on log(x); requires >= 4 surviving points.
ExponentFit fit_log_log(const std::vector<std::pair<double, double>>& points, int dropped);

}  // namespace rwre::stats
