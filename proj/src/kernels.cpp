#include "phicalc/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace phicalc {

namespace {

constexpr double kPi = std::numbers::pi;

void need_positive(double t, const char* what) {
    if (!(t > 0)) throw std::domain_error(std::string(what) + " must be positive");
}

double dot_sq(std::span<const double> v) {
    double s = 0;
    for (double x : v) s += x * x;
    return s;
}

}  // namespace

void ModelGeometry::validate() const {
    if (b < 0 || f < 0) throw std::invalid_argument("geometry: negative dimension");
    if (static_cast<int>(circumferences.size()) != f)
        throw std::invalid_argument("geometry: need one circumference per fiber circle");
    for (double L : circumferences)
        if (!(L > 0)) throw std::invalid_argument("geometry: circumferences must be positive");
}

double smoothstep(double s) {
    if (s <= 0) return 0;
    if (s >= 1) return 1;
    double a = std::exp(-1.0 / s), b = std::exp(-1.0 / (1 - s));
    return a / (a + b);
}

double CutoffSpec::operator()(double u) const {
    if (u <= eps) return 1;
    if (u >= 2 * eps) return 0;
    return smoothstep(2 - u / eps);
}

double euclid_heat_r2(int n, double t, double r2) {
    need_positive(t, "time");
    return std::pow(4 * kPi * t, -0.5 * n) * std::exp(-r2 / (4 * t));
}

double euclid_heat(int n, double t, std::span<const double> v) {
    if (static_cast<int>(v.size()) != n) throw std::invalid_argument("euclid_heat: dimension mismatch");
    return euclid_heat_r2(n, t, dot_sq(v));
}

double wrap_periodic(double d, double L) {
    double r = std::fmod(d + 0.5 * L, L);
    if (r < 0) r += L;
    return r - 0.5 * L;
}

int torus_image_count(double L, double t) {
    // after wrapping, image k sits at distance >= (|k| - 1/2) L; 13 sqrt(t) keeps exp(-d^2/4t) < 1e-18
    return static_cast<int>(std::ceil(13 * std::sqrt(t) / L)) + 2;
}

double torus_tail_bound(double L, double t) {
    int K = torus_image_count(L, t);
    double d = (K + 0.5) * L;
    // two-sided Gaussian tail past distance d, relative to the peak value
    return 2 * std::exp(-d * d / (4 * t)) / (1 - std::exp(-d * L / (2 * t)));
}

double torus_heat(double L, double t, double theta, double theta_p) {
    need_positive(t, "time");
    need_positive(L, "circumference");
    double d = wrap_periodic(theta - theta_p, L);
    int K = torus_image_count(L, t);
    double s = 0;
    for (int k = -K; k <= K; ++k) {
        double e = d + k * L;
        s += std::exp(-e * e / (4 * t));
    }
    return s / std::sqrt(4 * kPi * t);
}

double nfd_kernel(const ModelGeometry& g, double tau, double S, std::span<const double> U,
                  std::span<const double> z, std::span<const double> zp) {
    need_positive(tau, "tau");
    if (static_cast<int>(U.size()) != g.b || static_cast<int>(z.size()) != g.f || z.size() != zp.size())
        throw std::invalid_argument("nfd_kernel: coordinate lengths do not match geometry");
    double t = tau * tau;
    double v = euclid_heat_r2(g.b + 1, t, S * S + dot_sq(U));
    for (int i = 0; i < g.f; ++i) v *= torus_heat(g.circumferences[i], t, z[i], zp[i]);
    return v;
}

double ntd_kernel(const ModelGeometry& g, double tau, double Sc, std::span<const double> Uc,
                  std::span<const double> Zc) {
    need_positive(tau, "tau");
    if (static_cast<int>(Uc.size()) != g.b || static_cast<int>(Zc.size()) != g.f)
        throw std::invalid_argument("ntd_kernel: coordinate lengths do not match geometry");
    double r2 = Sc * Sc + dot_sq(Uc) + dot_sq(Zc);
    return std::pow(tau, -g.m()) * euclid_heat_r2(g.m(), 1.0, r2);
}

std::string to_string(Chart c) {
    switch (c) {
        case Chart::standard: return "standard";
        case Chart::ff: return "ff";
        case Chart::fd: return "fd";
        case Chart::td: return "td";
    }
    return "?";
}

Chart parse_chart(const std::string& s) {
    if (s == "standard") return Chart::standard;
    if (s == "ff") return Chart::ff;
    if (s == "fd") return Chart::fd;
    if (s == "td") return Chart::td;
    throw std::invalid_argument("unknown chart '" + s + "'");
}

namespace {

HeatEvalPoint to_fd(const HeatEvalPoint& p) {
    HeatEvalPoint q = p;
    q.chart = Chart::fd;
    switch (p.chart) {
        case Chart::fd: return q;
        case Chart::standard:
            if (!(p.xp > 0)) throw ChartError("standard chart needs x' > 0");
            q.a = (p.a - p.xp) / (p.xp * p.xp);
            for (std::size_t i = 0; i < p.u.size(); ++i) q.u[i] = (p.u[i] - p.yp[i]) / p.xp;
            return q;
        case Chart::ff:
            if (!(p.xp > 0)) throw ChartError("ff chart cannot reach fd coordinates at x' = 0");
            q.a = (p.a - 1) / p.xp;
            for (std::size_t i = 0; i < p.u.size(); ++i) q.u[i] = (p.u[i] - p.yp[i]) / p.xp;
            return q;
        case Chart::td:
            q.a = p.tau * p.a;
            for (std::size_t i = 0; i < p.u.size(); ++i) q.u[i] = p.tau * p.u[i];
            for (std::size_t i = 0; i < p.z.size(); ++i) q.z[i] = p.zp[i] + p.tau * p.z[i];
            return q;
    }
    return q;
}

HeatEvalPoint from_fd(const HeatEvalPoint& q, Chart target) {
    HeatEvalPoint p = q;
    p.chart = target;
    switch (target) {
        case Chart::fd: return p;
        case Chart::standard:
            if (!(q.xp > 0)) throw ChartError("x' = 0 has no standard coordinates");
            p.a = q.xp + q.xp * q.xp * q.a;
            for (std::size_t i = 0; i < q.u.size(); ++i) p.u[i] = q.yp[i] + q.xp * q.u[i];
            return p;
        case Chart::ff:
            p.a = 1 + q.xp * q.a;
            for (std::size_t i = 0; i < q.u.size(); ++i) p.u[i] = q.yp[i] + q.xp * q.u[i];
            return p;
        case Chart::td:
            if (!(q.tau > 0)) throw ChartError("td chart needs tau > 0");
            p.a = q.a / q.tau;
            for (std::size_t i = 0; i < q.u.size(); ++i) p.u[i] = q.u[i] / q.tau;
            for (std::size_t i = 0; i < q.z.size(); ++i) p.z[i] = (q.z[i] - q.zp[i]) / q.tau;
            return p;
    }
    return p;
}

void check_point(const HeatEvalPoint& p) {
    if (p.u.size() != p.yp.size() || p.z.size() != p.zp.size())
        throw ChartError("point has inconsistent coordinate lengths");
    if (p.tau < 0 || p.xp < 0) throw ChartError("tau and x' must be nonnegative");
    if ((p.chart == Chart::standard || p.chart == Chart::ff) && p.a < 0) throw ChartError("x and s must be nonnegative");
}

}  // namespace

HeatEvalPoint convert_chart(const HeatEvalPoint& p, Chart target) {
    check_point(p);
    if (p.chart == target) return p;
    return from_fd(to_fd(p), target);
}

std::vector<double> sphere_point(std::span<const double> y) {
    double w = std::sqrt(1 + dot_sq(y));
    std::vector<double> eta(y.begin(), y.end());
    eta.push_back(1);
    for (double& e : eta) e /= w;
    return eta;
}

double exact_scattering_heat(int m, double t, double x, std::span<const double> y, double xp,
                             std::span<const double> yp) {
    need_positive(x, "x");
    need_positive(xp, "x'");
    if (static_cast<int>(y.size()) != m - 1 || y.size() != yp.size())
        throw std::invalid_argument("exact_scattering_heat: need m-1 sphere coordinates");
    auto eta = sphere_point(y), etap = sphere_point(yp);
    double r2 = 0;
    for (int i = 0; i < m; ++i) {
        double d = eta[i] / x - etap[i] / xp;
        r2 += d * d;
    }
    return euclid_heat_r2(m, t, r2);
}

namespace {

// |p - p'|^2 in fd coordinates; finite at x' = 0
double scattering_dist2_fd(const HeatEvalPoint& q) {
    double xp = q.xp, S = q.a;
    double g = 1 + xp * S;
    if (!(g > 0)) throw ChartError("point lies beyond x = 0");
    double radial = S / g;
    double r2 = radial * radial;
    if (q.u.empty()) return r2;
    double ang;
    if (xp > 0) {
        std::vector<double> y(q.yp);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += xp * q.u[i];
        auto eta = sphere_point(y), etap = sphere_point(q.yp);
        double d2 = 0;
        for (std::size_t i = 0; i < eta.size(); ++i) d2 += (eta[i] - etap[i]) * (eta[i] - etap[i]);
        ang = d2 / (xp * xp);
    } else {
        // derivative of the sphere map at y' applied to U
        double w2 = 1 + dot_sq(q.yp), w = std::sqrt(w2);
        double yu = 0;
        for (std::size_t i = 0; i < q.u.size(); ++i) yu += q.yp[i] * q.u[i];
        ang = 0;
        for (std::size_t i = 0; i < q.u.size(); ++i) {
            double d = q.u[i] / w - q.yp[i] * yu / (w2 * w);
            ang += d * d;
        }
        double dl = -yu / (w2 * w);
        ang += dl * dl;
    }
    return r2 + ang / g;
}

}  // namespace

KernelEvaluator exact_scattering_heat(int m) {
    if (m < 1) throw std::invalid_argument("dimension must be >= 1");
    ModelGeometry g{m - 1, 0, {}};
    KernelEvaluator k{"exact", g, KernelOrder{3, Rational(0), m}, nullptr};
    k.eval = [m](const HeatEvalPoint& p) {
        HeatEvalPoint q = convert_chart(p, Chart::fd);
        need_positive(q.tau, "tau");
        return euclid_heat_r2(m, q.tau * q.tau, scattering_dist2_fd(q));
    };
    return k;
}

KernelEvaluator nfd_evaluator(const ModelGeometry& g) {
    g.validate();
    KernelEvaluator k{"nfd", g, KernelOrder{3, Rational(0), g.m()}, nullptr};
    k.eval = [g](const HeatEvalPoint& p) {
        HeatEvalPoint q = convert_chart(p, Chart::fd);
        return nfd_kernel(g, q.tau, q.a, q.u, q.z, q.zp);
    };
    return k;
}

KernelEvaluator ntd_evaluator(const ModelGeometry& g) {
    g.validate();
    KernelEvaluator k{"ntd", g, KernelOrder{3, Rational(0), g.m()}, nullptr};
    k.eval = [g](const HeatEvalPoint& p) {
        HeatEvalPoint q = convert_chart(p, Chart::td);
        return ntd_kernel(g, q.tau, q.a, q.u, q.z);
    };
    return k;
}

namespace {

double td_term(const ModelGeometry& g, const CutoffSpec& cut, const HeatEvalPoint& q) {
    double pt = cut(q.tau);
    if (pt == 0) return 0;
    std::vector<double> Uc(q.u), Zc(q.z.size());
    for (double& v : Uc) v /= q.tau;
    for (std::size_t i = 0; i < Zc.size(); ++i)
        Zc[i] = wrap_periodic(q.z[i] - q.zp[i], g.circumferences[i]) / q.tau;
    return pt * ntd_kernel(g, q.tau, q.a / q.tau, Uc, Zc);
}

}  // namespace

KernelEvaluator initial_parametrix(const ModelGeometry& g, const CutoffSpec& cut) {
    g.validate();
    if (!(cut.eps > 0 && cut.eps < 0.5)) throw std::invalid_argument("cutoff eps must lie in (0, 1/2)");
    KernelEvaluator k{"H0", g, KernelOrder{3, Rational(0), g.m()}, nullptr};
    k.eval = [g, cut](const HeatEvalPoint& p) {
        HeatEvalPoint q = convert_chart(p, Chart::fd);
        need_positive(q.tau, "tau");
        double x = q.xp * (1 + q.xp * q.a);
        double px = cut(x);
        double v = 0;
        if (px > 0) v += px * nfd_kernel(g, q.tau, q.a, q.u, q.z, q.zp);
        if (px < 1) v += (1 - px) * td_term(g, cut, q);
        return v;
    };
    return k;
}

KernelEvaluator td_branch_parametrix(const ModelGeometry& g, const CutoffSpec& cut) {
    g.validate();
    KernelEvaluator k{"H0-td-only", g, KernelOrder{3, Rational(0), g.m()}, nullptr};
    k.eval = [g, cut](const HeatEvalPoint& p) {
        HeatEvalPoint q = convert_chart(p, Chart::fd);
        need_positive(q.tau, "tau");
        return td_term(g, cut, q);
    };
    return k;
}

double fd_operator_apply(const ModelGeometry& g, const FdFunction& u, double tau, double S,
                         std::span<const double> U, std::span<const double> z, double h) {
    std::vector<double> Uv(U.begin(), U.end()), zv(z.begin(), z.end());
    double u0 = u(tau, S, Uv, zv);
    double dtau = (u(tau + h, S, Uv, zv) - u(tau - h, S, Uv, zv)) / (2 * h);
    double lap = -(u(tau, S + h, Uv, zv) - 2 * u0 + u(tau, S - h, Uv, zv)) / (h * h);
    for (int i = 0; i < g.b; ++i) {
        auto up = Uv, um = Uv;
        up[i] += h;
        um[i] -= h;
        lap -= (u(tau, S, up, zv) - 2 * u0 + u(tau, S, um, zv)) / (h * h);
    }
    for (int i = 0; i < g.f; ++i) {
        auto zpl = zv, zmi = zv;
        zpl[i] += h;
        zmi[i] -= h;
        lap -= (u(tau, S, Uv, zpl) - 2 * u0 + u(tau, S, Uv, zmi)) / (h * h);
    }
    return 0.5 * tau * dtau + tau * tau * lap;
}

double model_laplacian_apply(const ModelGeometry& g, const SpatialFunction& u, double x,
                             std::span<const double> y, std::span<const double> z, const Steps& h) {
    if (!(x > 0) || x - h.hx <= 0) throw ChartError("model Laplacian needs x - hx > 0");
    if (static_cast<int>(y.size()) != g.b || static_cast<int>(z.size()) != g.f)
        throw std::invalid_argument("model Laplacian: coordinate lengths do not match geometry");
    std::vector<double> yv(y.begin(), y.end()), zv(z.begin(), z.end());
    double u0 = u(x, yv, zv);
    double up = u(x + h.hx, yv, zv), um = u(x - h.hx, yv, zv);
    double uxx = (up - 2 * u0 + um) / (h.hx * h.hx);
    double ux = (up - um) / (2 * h.hx);
    double lapB = 0, lapF = 0;
    for (int i = 0; i < g.b; ++i) {
        auto a = yv, c = yv;
        a[i] += h.hy;
        c[i] -= h.hy;
        lapB -= (u(x, a, zv) - 2 * u0 + u(x, c, zv)) / (h.hy * h.hy);
    }
    for (int i = 0; i < g.f; ++i) {
        auto a = zv, c = zv;
        a[i] += h.hz;
        c[i] -= h.hz;
        lapF -= (u(x, yv, a) - 2 * u0 + u(x, yv, c)) / (h.hz * h.hz);
    }
    double x2 = x * x;
    return -x2 * x2 * uxx + x2 * lapB + lapF - (2 - g.b) * x2 * x * ux;
}

}  // namespace phicalc
