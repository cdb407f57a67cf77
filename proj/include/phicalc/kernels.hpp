#pragma once

#include "phicalc/index.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace phicalc {

struct ModelGeometry {
    int b = 0;
    int f = 0;
    std::vector<double> circumferences;  // one per fiber circle
    int m() const { return 1 + b + f; }
    void validate() const;
};

// psi: 1 on [0, eps], 0 on [2 eps, inf), exp(-1/u) smoothstep in between
struct CutoffSpec {
    double eps = 0.25;
    double operator()(double u) const;
};

double smoothstep(double s);  // 0 for s<=0, 1 for s>=1

double euclid_heat(int n, double t, std::span<const double> v);
double euclid_heat_r2(int n, double t, double r2);
double torus_heat(double L, double t, double theta, double theta_p);
int torus_image_count(double L, double t);
double torus_tail_bound(double L, double t);  // relative bound on the dropped images
double wrap_periodic(double d, double L);     // representative in [-L/2, L/2)

double nfd_kernel(const ModelGeometry& g, double tau, double S, std::span<const double> U,
                  std::span<const double> z, std::span<const double> zp);
double ntd_kernel(const ModelGeometry& g, double tau, double Sc, std::span<const double> Uc,
                  std::span<const double> Zc);

enum class Chart { standard, ff, fd, td };
std::string to_string(Chart c);
Chart parse_chart(const std::string& s);

// Coordinates of a point of the heat space near the diagonal. Meaning of `a`,
// `u`, `z` depends on the chart:
//   standard: x, y, z      ff: s = x/x', y, z
//   fd: S = (x-x')/x'^2, U = (y-y')/x', z
//   td: S/tau, U/tau, (z-z')/tau
// The primed point (x', y', z') and tau = sqrt(t) are shared by all charts.
struct HeatEvalPoint {
    Chart chart = Chart::standard;
    double tau = 1;
    double xp = 1;
    double a = 1;
    std::vector<double> u, yp;  // length b
    std::vector<double> z, zp;  // length f
};

struct ChartError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

HeatEvalPoint convert_chart(const HeatEvalPoint& p, Chart target);

struct KernelEvaluator {
    std::string name;
    ModelGeometry geo;
    KernelOrder declared;
    std::function<double(const HeatEvalPoint&)> eval;
    double operator()(const HeatEvalPoint& p) const { return eval(p); }
};

// Euclidean R^m written in x = 1/r and gnomonic sphere coordinates y
// (eta = (y, 1)/|(y, 1)|); for m = 1 the point is r = 1/x.
KernelEvaluator exact_scattering_heat(int m);
double exact_scattering_heat(int m, double t, double x, std::span<const double> y, double xp,
                             std::span<const double> yp);
std::vector<double> sphere_point(std::span<const double> y);

KernelEvaluator nfd_evaluator(const ModelGeometry& g);
KernelEvaluator ntd_evaluator(const ModelGeometry& g);
KernelEvaluator initial_parametrix(const ModelGeometry& g, const CutoffSpec& cut = {});
// td branch only, the ablated parametrix
KernelEvaluator td_branch_parametrix(const ModelGeometry& g, const CutoffSpec& cut = {});

// fd normal operator 1/2 tau d_tau + tau^2 (Delta_{S,U} + Delta_F), Delta >= 0
using FdFunction = std::function<double(double tau, double S, std::span<const double> U, std::span<const double> z)>;
double fd_operator_apply(const ModelGeometry& g, const FdFunction& u, double tau, double S,
                         std::span<const double> U, std::span<const double> z, double h);

using SpatialFunction = std::function<double(double x, std::span<const double> y, std::span<const double> z)>;
struct Steps {
    double hx = 1e-4, hy = 1e-4, hz = 1e-4;
};
// (-x^4 dx^2 + x^2 Delta_B + Delta_F - (2-b) x^3 dx) u by central differences
double model_laplacian_apply(const ModelGeometry& g, const SpatialFunction& u, double x,
                             std::span<const double> y, std::span<const double> z, const Steps& h);

}  // namespace phicalc
