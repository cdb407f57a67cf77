#pragma once

#include "phicalc/index.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace phicalc {

// Kernel of a time-convolution operator on the line: K(t, p, p').
// Evaluators must accept t = 0 and return the limit value there.
struct TimeConvKernel {
    std::string name;
    std::optional<KernelOrder> declared;  // empty when no ledger applies
    double support_radius = 12;           // |p - p'| beyond this is treated as zero
    std::function<double(double t, double p, double pp)> eval;
    double operator()(double t, double p, double pp) const { return eval(t, p, pp); }
};

TimeConvKernel zero_kernel();
TimeConvKernel scaled_sum(double a, const TimeConvKernel& A, double b, const TimeConvKernel& B);

struct SpatialGrid {
    std::vector<double> nodes;    // offsets from the column point when recentered
    std::vector<double> weights;  // against dvol, positive
    double spacing = 0;           // > 0 for uniform grids (enables interpolation)
    bool recenter = true;         // shift by p' for each column
};

SpatialGrid uniform_grid(double half_width, double h);
SpatialGrid interval_grid(double a, double b, int n);  // Gauss-Legendre, fixed position

struct QuadratureSpec {
    double T = 1;
    int time_nodes = 24;  // Chebyshev-Lobatto nodes per level on [0, T]
    int gl_nodes = 24;    // Gauss-Legendre nodes on (0, t), u = t'/t
    SpatialGrid grid = uniform_grid(10, 0.025);
    // compose: Gauss-Kronrod panels in u = t'/t, graded toward both ends
    std::vector<double> time_breaks{0, 0.002, 0.01, 0.05, 0.2, 0.5, 0.8, 0.95, 0.99, 0.998, 1};
    double tolerance = 1e-10;  // compose: adaptive spatial tolerance
    double flag_above = 1e-6;  // compose: relative error estimate that flags a value
};

struct QuadValue {
    double value = 0;
    double error = 0;
    bool flagged = false;
};

// (A o B)(t,p,p') = int_0^t int A(t-s,p,q) B(s,q,p') dq ds, graded Gauss-Legendre
// panels in s and adaptive Gauss-Kronrod in q with breaks at p and p'
QuadValue compose_eval(const TimeConvKernel& A, const TimeConvKernel& B, const QuadratureSpec& q, double t, double p,
                       double pp);
TimeConvKernel compose(const TimeConvKernel& A, const TimeConvKernel& B, const QuadratureSpec& q = {});

// Tabulated iterates F_k = P^k (k = 1..L) for one column p'
class IterateColumn {
public:
    IterateColumn(TimeConvKernel P, int levels, double pp, const QuadratureSpec& q);
    int levels() const { return levels_; }
    double column() const { return pp_; }
    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& space() const { return space_; }
    double table(int k, int ti, int qj) const;
    // F_k(t, q_j) by barycentric interpolation in time
    void at_time(int k, double t, std::vector<double>& out) const;
    const std::vector<double>& grid_weights() const { return wspace_; }
    // F_k(t, q) with Lagrange interpolation in space (uniform grids only)
    double interpolate(int k, double t, double qv) const;
    double interp_space(const std::vector<double>& row, double qv) const;
    // F_k(t, p) by a direct final integral against P
    double evaluate(int k, double t, double p) const;
    double evaluate_with(int k, double t, double p, int gl_nodes) const;
    double sup_norm(int k) const;  // over the table
    // relative change of level k at t = T under doubled Gauss-Legendre nodes
    double refinement_change(int k) const;

private:
    TimeConvKernel P_;
    int levels_;
    double pp_;
    QuadratureSpec q_;
    std::vector<double> times_, bary_, space_, wspace_;
    std::vector<std::vector<double>> F_;  // F_[k-1][ti * nq + qj]
    void build();
};

struct VolterraError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// P^ell through the simplex recursion, memoizing one column per p'
TimeConvKernel volterra_iterate(const TimeConvKernel& P, int ell, const QuadratureSpec& q = {});

struct FactorialRow {
    int ell = 0;
    double sup = 0;
    double fitted_c = 0;  // ((ell-1)! sup_ell / sup_1)^{1/(ell-1)} / T, 0 for ell = 1
    double ratio = 0;     // sup_{ell+1} / sup_ell, 0 on the last row
};

struct FactorialReport {
    std::vector<FactorialRow> rows;
    std::vector<double> columns;  // sampled p'
    double T = 1;
    bool ratios_decreasing = false;
    bool c_nonincreasing = false;  // beyond ell = 2
    double exhaustion_radius = 0;
};

FactorialReport factorial_bound_check(const TimeConvKernel& P, int ell_max, const std::vector<double>& columns,
                                      const QuadratureSpec& q = {});

// Parametrix split as H0(t,p,q) = G(t, p-q) - E(t,p,q), with G the heat kernel
// of the line and E vanishing to infinite order at t = 0
struct SplitParametrix {
    TimeConvKernel whole;
    std::function<double(double t, double p, double q)> remainder;
};

struct NeumannTerm {
    int ell = 0;
    double sup = 0;  // sampled sup of H0 o P^ell at the requested points
};

struct NeumannResult {
    std::vector<std::vector<double>> partial;  // partial[L][i]: sum up to L at sample i
    std::vector<NeumannTerm> terms;
    bool diverged = false;
    std::string diagnostics;
};

struct SamplePoint {
    double t, p, pp;
};

// H0 + sum_{ell=1}^{L} (-1)^ell H0 o P^ell at sample points
NeumannResult neumann_sum(const SplitParametrix& H0, const TimeConvKernel& P, int L,
                          const std::vector<SamplePoint>& samples, const QuadratureSpec& q = {});

// The line model: cutoff radius delta sqrt(c^2 + r'^2) around the diagonal
struct DeskModel {
    double c = 2;
    double delta = 0.4;
    double lambda(double rp) const;
    double cutoff(double r, double rp) const;
    double G(double t, double d) const;
    double H0(double t, double r, double rp) const;
    double P(double t, double r, double rp) const;  // (d_t - d_r^2) H0
};

TimeConvKernel euclid_line_kernel();
SplitParametrix desk_parametrix(const DeskModel& m);
TimeConvKernel desk_error(const DeskModel& m);
TimeConvKernel constant_kernel(double v);

// t = 1/2, p' = 3, p across both cutoff transitions
std::vector<SamplePoint> default_neumann_samples();
// T = 1/2 is all the Neumann run needs; h = 0.025 keeps the floor near 1e-8
QuadratureSpec neumann_quadrature();

int worker_count();  // PHICALC_WORKERS, default hardware concurrency

}  // namespace phicalc
