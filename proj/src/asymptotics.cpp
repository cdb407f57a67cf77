#include "phicalc/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace phicalc {

std::vector<double> geometric_grid(double s0, double r, int n) {
    if (!(s0 > 0) || !(r > 0 && r < 1) || n < 4) throw std::invalid_argument("geometric grid: bad parameters");
    std::vector<double> s(n);
    for (int k = 0; k < n; ++k) s[k] = s0 * std::pow(r, k);
    return s;
}

ApproachPath standard_path(const std::string& face, const ModelGeometry& g, const std::vector<double>& sigmas) {
    HeatEvalPoint base;
    base.yp.assign(g.b, 0.1);
    base.zp.assign(g.f, 0.2);
    base.u = base.yp;
    base.z = base.zp;
    ApproachPath path{face, nullptr, sigmas};
    if (face == "td") {
        base.chart = Chart::td;
        base.xp = 0.5;
        base.a = 0.3;
        base.u.assign(g.b, 0.2);
        base.z.assign(g.f, 0.1);
        path.at = [base](double s) { auto p = base; p.tau = s; return p; };
    } else if (face == "fd") {
        base.chart = Chart::fd;
        base.tau = 0.5;
        base.a = 0.3;
        base.u.assign(g.b, 0.2);
        for (auto& z : base.z) z += 0.4;
        path.at = [base](double s) { auto p = base; p.xp = s; return p; };
    } else if (face == "ff") {
        // s = 0.8, t = 1: Gaussian decay dominates sigma^-8 over the whole fit window
        base.chart = Chart::ff;
        base.tau = 1;
        base.a = 0.8;
        path.at = [base](double s) { auto p = base; p.xp = s; return p; };
    } else if (face == "tf") {
        base.chart = Chart::standard;
        base.a = 0.6;
        base.xp = 0.4;
        for (auto& y : base.u) y += 0.1;
        for (auto& z : base.z) z += 0.3;
        path.at = [base](double s) { auto p = base; p.tau = s; return p; };
    } else if (face == "lf") {
        base.chart = Chart::standard;
        base.a = 0.5;
        base.tau = 0.5;
        path.at = [base](double s) { auto p = base; p.xp = s; return p; };
    } else if (face == "rf") {
        base.chart = Chart::standard;
        base.xp = 0.5;
        base.tau = 0.5;
        path.at = [base](double s) { auto p = base; p.a = s; return p; };
    } else {
        throw std::invalid_argument("unknown face '" + face + "' (td|fd|ff|tf|lf|rf)");
    }
    return path;
}

namespace {

double ols_slope(const std::vector<double>& X, const std::vector<double>& Y, double* rms) {
    double n = static_cast<double>(X.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < X.size(); ++i) { mx += X[i]; my += Y[i]; }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        sxx += (X[i] - mx) * (X[i] - mx);
        sxy += (X[i] - mx) * (Y[i] - my);
    }
    double b = sxy / sxx;
    if (rms) {
        double r = 0;
        for (std::size_t i = 0; i < X.size(); ++i) {
            double e = Y[i] - (my + b * (X[i] - mx));
            r += e * e;
        }
        *rms = std::sqrt(r / n);
    }
    return b;
}

double quad_coefficient(const std::vector<double>& X, const std::vector<double>& Y) {
    // normal equations for y = c0 + c1 x + c2 x^2, centered for conditioning
    double mx = 0;
    for (double x : X) mx += x;
    mx /= static_cast<double>(X.size());
    double s[5] = {0, 0, 0, 0, 0}, t[3] = {0, 0, 0};
    for (std::size_t i = 0; i < X.size(); ++i) {
        double x = X[i] - mx, p = 1;
        for (int k = 0; k < 5; ++k) { s[k] += p; if (k < 3) t[k] += p * Y[i]; p *= x; }
    }
    double A[3][3] = {{s[0], s[1], s[2]}, {s[1], s[2], s[3]}, {s[2], s[3], s[4]}};
    auto det3 = [](double M[3][3]) {
        return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
               M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
    };
    double D = det3(A);
    double B[3][3] = {{s[0], s[1], t[0]}, {s[1], s[2], t[1]}, {s[2], s[3], t[2]}};
    return det3(B) / D;
}

}  // namespace

OrderFit fit_values(const std::vector<double>& sigmas, const std::vector<double>& values, int window) {
    int n = static_cast<int>(sigmas.size());
    if (static_cast<int>(values.size()) != n) throw std::invalid_argument("fit: length mismatch");
    if (window < 4 || window > n) throw std::invalid_argument("fit: window must hold at least 4 points");
    OrderFit f;
    f.sigmas = sigmas;
    f.values = values;
    f.first = n - window;
    f.last = n;
    std::vector<double> X, Y;
    for (int k = f.first; k < f.last; ++k) {
        double v = std::abs(values[k]);
        if (!(v > 0) || !std::isfinite(v)) {
            f.verdict = "infinite-order";
            return f;
        }
        X.push_back(std::log(sigmas[k]));
        Y.push_back(std::log(v));
    }
    f.slope = ols_slope(X, Y, &f.residual);
    f.curvature = quad_coefficient(X, Y);

    // sliding windows of half the fit window over the whole grid
    int w = std::max(4, window / 2);
    double lo = 1e300, hi = -1e300;
    for (int s = 0; s + w <= n; s += std::max(1, w / 2)) {
        std::vector<double> x, y;
        bool ok = true;
        for (int k = s; k < s + w; ++k) {
            double v = std::abs(values[k]);
            if (!(v > 0)) { ok = false; break; }
            x.push_back(std::log(sigmas[k]));
            y.push_back(std::log(v));
        }
        if (!ok) continue;
        double b = ols_slope(x, y, nullptr);
        lo = std::min(lo, b);
        hi = std::max(hi, b);
    }
    f.drift = hi >= lo ? hi - lo : 0;

    bool up = true, down = true;
    for (std::size_t k = 1; k < Y.size(); ++k) {
        double d = Y[k] - Y[k - 1], tol = 1e-9 * (1 + std::abs(Y[k]));
        if (d > tol) down = false;
        if (d < -tol) up = false;
    }
    if (!(up || down) || f.residual > 0.05) f.verdict = "low-confidence";
    else if (f.drift > 0.02 && f.drift <= 0.15) f.verdict = "possible log factor";
    else f.verdict = "ok";
    return f;
}

OrderFit fit_face_order(const KernelEvaluator& K, const ApproachPath& path, int window) {
    std::vector<double> v;
    for (double s : path.sigmas) v.push_back(K(path.at(s)));
    return fit_values(path.sigmas, v, window);
}

InfiniteOrderVerdict check_infinite_order(const std::vector<double>& sigmas, const std::vector<double>& values,
                                          int n_max, int window) {
    int n = static_cast<int>(sigmas.size());
    if (window > n || window < 4) throw std::invalid_argument("infinite-order check: bad window");
    for (int N = 1; N <= n_max; ++N) {
        std::vector<double> w;
        for (int k = n - window; k < n; ++k) w.push_back(std::pow(sigmas[k], -N) * std::abs(values[k]));
        bool ok = true;
        for (std::size_t k = 1; k < w.size(); ++k)
            if (w[k] > w[k - 1]) ok = false;
        if (w.front() > 0 && !(w.back() < 1e-3 * w.front())) ok = false;
        if (w.front() == 0 && w.back() != 0) ok = false;
        if (!ok) return {false, N};
    }
    return {true, 0};
}

InfiniteOrderVerdict check_infinite_order(const KernelEvaluator& K, const ApproachPath& path, int n_max,
                                          int window) {
    std::vector<double> v;
    for (double s : path.sigmas) v.push_back(K(path.at(s)));
    return check_infinite_order(path.sigmas, v, n_max, window);
}

double heat_residual(const KernelEvaluator& K, const HeatEvalPoint& p0, double kappa) {
    HeatEvalPoint p = convert_chart(p0, Chart::standard);
    double t = p.tau * p.tau, x = p.a;
    auto eval = [&](double tt, double xx, std::span<const double> y, std::span<const double> z) {
        HeatEvalPoint q = p;
        q.tau = std::sqrt(tt);
        q.a = xx;
        q.u.assign(y.begin(), y.end());
        q.z.assign(z.begin(), z.end());
        return K(q);
    };
    double ht = kappa * t;
    double ut = (eval(t + ht, x, p.u, p.z) - eval(t - ht, x, p.u, p.z)) / (2 * ht);
    Steps h{kappa * x * x, kappa * x, kappa};
    SpatialFunction u = [&](double xx, std::span<const double> y, std::span<const double> z) {
        return eval(t, xx, y, z);
    };
    return t * (ut + model_laplacian_apply(K.geo, u, x, p.u, p.z, h));
}

ResidualFit residual_order(const ModelGeometry& g, const KernelEvaluator& H0, const ResidualOptions& o) {
    HeatEvalPoint base;
    base.chart = Chart::fd;
    base.tau = o.tau;
    base.a = o.S;
    base.yp.assign(g.b, 0.1);
    base.u.assign(g.b, o.U);
    base.zp.assign(g.f, 0.2);
    base.z.assign(g.f, 0.2 + o.dz);
    std::vector<double> vals;
    for (double s : o.sigmas) {
        HeatEvalPoint p = base;
        p.xp = s;
        vals.push_back(heat_residual(H0, p, o.kappa));
    }
    ResidualFit r;
    r.fit = fit_values(o.sigmas, vals);
    HeatEvalPoint inner = base;
    inner.xp = o.sigmas.back();
    double fine = heat_residual(H0, inner, o.kappa / 2);
    double coarse = vals.back();
    r.refinement_change = std::abs(fine - coarse) / std::max(std::abs(fine), 1e-300);
    r.resolved = r.refinement_change < 0.1;
    return r;
}

}  // namespace phicalc
