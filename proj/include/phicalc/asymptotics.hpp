#pragma once

#include "phicalc/kernels.hpp"

#include <functional>
#include <string>
#include <vector>

namespace phicalc {

struct ApproachPath {
    std::string face;
    std::function<HeatEvalPoint(double sigma)> at;
    std::vector<double> sigmas;  // strictly decreasing
};

std::vector<double> geometric_grid(double s0 = 0.2, double r = 0.7, int n = 12);

// Paths into the faces of the heat space (td, fd, ff, tf, lf, rf), each inside a
// single chart with the remaining coordinates frozen away from other faces.
ApproachPath standard_path(const std::string& face, const ModelGeometry& g,
                           const std::vector<double>& sigmas = geometric_grid());

struct OrderFit {
    double slope = 0;
    double residual = 0;  // rms of the log-log regression
    int first = 0, last = 0;  // window [first, last)
    double drift = 0;         // slope spread over sliding windows
    double curvature = 0;     // quadratic coefficient in log-log
    std::string verdict;      // ok | infinite-order | low-confidence | possible log factor
    std::vector<double> sigmas, values;
};

OrderFit fit_values(const std::vector<double>& sigmas, const std::vector<double>& values, int window = 8);
OrderFit fit_face_order(const KernelEvaluator& K, const ApproachPath& path, int window = 8);

struct InfiniteOrderVerdict {
    bool pass = false;
    int failing_n = 0;  // first N that failed, 0 when passing
};

InfiniteOrderVerdict check_infinite_order(const std::vector<double>& sigmas, const std::vector<double>& values,
                                          int n_max, int window = 8);
InfiniteOrderVerdict check_infinite_order(const KernelEvaluator& K, const ApproachPath& path, int n_max,
                                          int window = 8);

// t (d_t + Delta_phi) K at a point, central differences with steps
// kappa x^2, kappa x, kappa, kappa t in x, y, z, t
double heat_residual(const KernelEvaluator& K, const HeatEvalPoint& p, double kappa = 1e-3);

struct ResidualOptions {
    double tau = 0.35;  // inside the time cutoff transition for eps = 1/4
    double S = 0.5, U = 0.3, dz = 0.4;
    double kappa = 1e-3;
    std::vector<double> sigmas = geometric_grid();
};

struct ResidualFit {
    OrderFit fit;
    bool resolved = true;  // refinement kappa/2 agrees on the innermost point
    double refinement_change = 0;
};

ResidualFit residual_order(const ModelGeometry& g, const KernelEvaluator& H0, const ResidualOptions& o = {});

}  // namespace phicalc
