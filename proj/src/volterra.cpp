#include "phicalc/volterra.hpp"

#include "phicalc/kernels.hpp"
#include "phicalc/simd.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace phicalc {

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Legendre nodes and weights on [0, 1]
struct Rule {
    std::vector<double> x, w;
};

Rule legendre(int n) {
    Rule r;
    for (int i = 1; i <= n; ++i) {
        double z = std::cos(kPi * (i - 0.25) / (n + 0.5)), dp = 1;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = z;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double pn = n == 1 ? z : p1, pm = n == 1 ? 1 : p0;
            dp = n * (z * pn - pm) / (z * z - 1);
            double dz = pn / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        r.x.push_back(0.5 * (1 - z));
        r.w.push_back(1.0 / ((1 - z * z) * dp * dp));
    }
    // ascending order
    std::reverse(r.x.begin(), r.x.end());
    std::reverse(r.w.begin(), r.w.end());
    return r;
}

const Rule& legendre_cached(int n) {
    static std::mutex mu;
    static std::map<int, Rule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, legendre(n)).first;
    return it->second;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
    int w = std::min(worker_count(), n);
    if (w <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int k = 0; k < w; ++k)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) fn(i);
        });
    for (auto& th : pool) th.join();
}

// smoothstep with its first two derivatives
void smoothstep_d(double s, double& v, double& d1, double& d2) {
    if (s <= 0 || s >= 1) {
        v = s <= 0 ? 0 : 1;
        d1 = d2 = 0;
        return;
    }
    double r = 1 - s;
    double a = std::exp(-1 / s), b = std::exp(-1 / r);
    double a1 = a / (s * s), b1 = -b / (r * r);
    double a2 = a * (1 / std::pow(s, 4) - 2 / std::pow(s, 3));
    double b2 = b * (1 / std::pow(r, 4) - 2 / std::pow(r, 3));
    double D = a + b, N = a1 * b - a * b1, N1 = a2 * b - a * b2;
    v = a / D;
    d1 = N / (D * D);
    d2 = (N1 * D - 2 * N * (a1 + b1)) / (D * D * D);
}

std::optional<KernelOrder> ledger_order(const std::optional<KernelOrder>& a, const std::optional<KernelOrder>& b) {
    if (!a || !b || b->ell || a->m != b->m) return std::nullopt;
    return composition_ledger(*a, *b).result;
}

double factorial(int n) {
    double f = 1;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

}  // namespace

int worker_count() {
    if (const char* e = std::getenv("PHICALC_WORKERS")) {
        int v = std::atoi(e);
        if (v >= 1) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

TimeConvKernel zero_kernel() {
    return {"zero", std::nullopt, 0, [](double, double, double) { return 0.0; }};
}

TimeConvKernel constant_kernel(double v) {
    return {"constant", std::nullopt, 1e300, [v](double, double, double) { return v; }};
}

TimeConvKernel scaled_sum(double a, const TimeConvKernel& A, double b, const TimeConvKernel& B) {
    std::optional<KernelOrder> d;
    if (A.declared && B.declared && A.declared->a == B.declared->a && A.declared->ell == B.declared->ell)
        d = A.declared;
    return {"(" + A.name + "+" + B.name + ")", d, std::max(A.support_radius, B.support_radius),
            [a, b, A, B](double t, double p, double pp) { return a * A(t, p, pp) + b * B(t, p, pp); }};
}

SpatialGrid uniform_grid(double half_width, double h) {
    if (!(h > 0) || !(half_width > h)) throw std::invalid_argument("uniform grid: bad width or spacing");
    int n = static_cast<int>(std::lround(half_width / h));
    SpatialGrid g;
    g.spacing = h;
    for (int i = -n; i <= n; ++i) {
        g.nodes.push_back(i * h);
        g.weights.push_back(std::abs(i) == n ? h / 2 : h);
    }
    return g;
}

SpatialGrid interval_grid(double a, double b, int n) {
    if (!(b > a) || n < 1) throw std::invalid_argument("interval grid: bad interval");
    const Rule& r = legendre_cached(n);
    SpatialGrid g;
    g.recenter = false;
    for (int i = 0; i < n; ++i) {
        g.nodes.push_back(a + (b - a) * r.x[i]);
        g.weights.push_back((b - a) * r.w[i]);
    }
    return g;
}

// ---------------------------------------------------------------- compose

QuadValue compose_eval(const TimeConvKernel& A, const TimeConvKernel& B, const QuadratureSpec& q, double t, double p,
                       double pp) {
    using boost::math::quadrature::gauss_kronrod;
    if (!(t > 0)) return {};
    double R = std::min(std::max(A.support_radius, B.support_radius), 1e3);
    double lo = std::min(p, pp), hi = std::max(p, pp);
    std::vector<double> brk{lo - R, lo};
    if (hi > lo) brk.push_back(hi);
    brk.push_back(hi + R);

    QuadValue out;
    double spatial_err = 0;
    auto time_integrand = [&](double u) {
        double s = t * u;
        double sum = 0;
        for (std::size_t k = 0; k + 1 < brk.size(); ++k) {
            double err = 0;
            sum += gauss_kronrod<double, 31>::integrate(
                [&](double x) { return A(t - s, p, x) * B(s, x, pp); }, brk[k], brk[k + 1], 12, q.tolerance, &err);
            spatial_err += t * err;
        }
        return t * sum;
    };
    double time_err = 0;
    for (std::size_t k = 0; k + 1 < q.time_breaks.size(); ++k) {
        double e = 0;
        out.value += gauss_kronrod<double, 15>::integrate(time_integrand, q.time_breaks[k], q.time_breaks[k + 1], 0,
                                                          0, &e);
        time_err += e;
    }
    // spatial estimates were accumulated at every Kronrod node; scale to a per-panel figure
    out.error = time_err + spatial_err / 15.0;
    out.flagged = out.error > q.flag_above * std::max(std::abs(out.value), 1e-300) && out.error > 1e-300;
    return out;
}

TimeConvKernel compose(const TimeConvKernel& A, const TimeConvKernel& B, const QuadratureSpec& q) {
    TimeConvKernel k;
    k.name = A.name + " o " + B.name;
    k.declared = ledger_order(A.declared, B.declared);
    k.support_radius = A.support_radius + B.support_radius;
    k.eval = [A, B, q](double t, double p, double pp) { return compose_eval(A, B, q, t, p, pp).value; };
    return k;
}

// ---------------------------------------------------------------- iterates

IterateColumn::IterateColumn(TimeConvKernel P, int levels, double pp, const QuadratureSpec& q)
    : P_(std::move(P)), levels_(levels), pp_(pp), q_(q) {
    if (levels < 1) throw std::invalid_argument("iterate: need at least one level");
    if (q.time_nodes < 3 || q.gl_nodes < 1) throw std::invalid_argument("iterate: too few time nodes");
    for (double w : q.grid.weights)
        if (!(w > 0)) throw std::invalid_argument("iterate: spatial weights must be positive");
    int n = q.time_nodes;
    for (int i = 0; i < n; ++i) {
        times_.push_back(q.T * 0.5 * (1 - std::cos(kPi * i / (n - 1))));
        double w = (i % 2 ? -1.0 : 1.0) * ((i == 0 || i == n - 1) ? 0.5 : 1.0);
        bary_.push_back(w);
    }
    for (double x : q.grid.nodes) space_.push_back(q.grid.recenter ? pp + x : x);
    wspace_ = q.grid.weights;
    build();
}

double IterateColumn::table(int k, int ti, int qj) const {
    return F_.at(k - 1).at(static_cast<std::size_t>(ti) * space_.size() + qj);
}

void IterateColumn::at_time(int k, double t, std::vector<double>& out) const {
    std::size_t nq = space_.size();
    out.assign(nq, 0.0);
    if (k == 1) {
        for (std::size_t j = 0; j < nq; ++j) out[j] = P_(t, space_[j], pp_);
        return;
    }
    const auto& F = F_[k - 1];
    for (std::size_t i = 0; i < times_.size(); ++i)
        if (t == times_[i]) {
            std::copy(F.begin() + i * nq, F.begin() + (i + 1) * nq, out.begin());
            return;
        }
    double den = 0;
    for (std::size_t i = 0; i < times_.size(); ++i) {
        double c = bary_[i] / (t - times_[i]);
        den += c;
        const double* row = F.data() + i * nq;
        for (std::size_t j = 0; j < nq; ++j) out[j] += c * row[j];
    }
    for (auto& v : out) v /= den;
}

double IterateColumn::interpolate(int k, double t, double qv) const {
    std::vector<double> row;
    at_time(k, t, row);
    return interp_space(row, qv);
}

double IterateColumn::interp_space(const std::vector<double>& row, double qv) const {
    double h = q_.grid.spacing;
    if (!(h > 0)) throw std::logic_error("spatial interpolation needs a uniform grid");
    double x = (qv - space_.front()) / h;
    int n = static_cast<int>(space_.size());
    if (x < 0 || x > n - 1) return 0;
    int i0 = std::clamp(static_cast<int>(std::floor(x)) - 3, 0, n - 8);
    double s = 0;
    for (int i = i0; i < i0 + 8; ++i) {
        double L = 1;
        for (int j = i0; j < i0 + 8; ++j)
            if (j != i) L *= (x - j) / (i - j);
        s += L * row[i];
    }
    return s;
}

double IterateColumn::evaluate_with(int k, double t, double p, int gl) const {
    if (k == 1) return P_(t, p, pp_);
    if (!(t > 0)) return 0;
    const Rule& r = legendre_cached(gl);
    std::size_t nq = space_.size();
    std::vector<double> prev, prow(nq);
    double sum = 0;
    for (std::size_t g = 0; g < r.x.size(); ++g) {
        double s = t * r.x[g];
        at_time(k - 1, s, prev);
        for (std::size_t l = 0; l < nq; ++l) prow[l] = P_(t - s, p, space_[l]);
        sum += r.w[g] * simd::weighted_dot(wspace_.data(), prow.data(), prev.data(), nq);
    }
    return t * sum;
}

double IterateColumn::evaluate(int k, double t, double p) const { return evaluate_with(k, t, p, q_.gl_nodes); }

void IterateColumn::build() {
    std::size_t nq = space_.size(), nt = times_.size();
    F_.assign(levels_, std::vector<double>(nt * nq, 0.0));
    for (std::size_t i = 0; i < nt; ++i)
        for (std::size_t j = 0; j < nq; ++j) F_[0][i * nq + j] = P_(times_[i], space_[j], pp_);
    for (int k = 2; k <= levels_; ++k) {
        // rows are independent; level k - 1 is complete and read-only here
        parallel_for(static_cast<int>(nt), [&](int i) {
            if (i == 0) return;
            for (std::size_t j = 0; j < nq; ++j) F_[k - 1][i * nq + j] = evaluate(k, times_[i], space_[j]);
        });
    }
}

double IterateColumn::sup_norm(int k) const {
    double s = 0;
    for (double v : F_.at(k - 1)) s = std::max(s, std::abs(v));
    return s;
}

double IterateColumn::refinement_change(int k) const {
    if (k < 2) return 0;
    double worst = 0, scale = sup_norm(k);
    if (scale == 0) return 0;
    std::size_t nq = space_.size();
    for (int m = 1; m <= 5; ++m) {
        std::size_t j = m * nq / 6;
        double a = evaluate_with(k, q_.T, space_[j], q_.gl_nodes);
        double b = evaluate_with(k, q_.T, space_[j], 2 * q_.gl_nodes);
        worst = std::max(worst, std::abs(a - b) / scale);
    }
    return worst;
}

TimeConvKernel volterra_iterate(const TimeConvKernel& P, int ell, const QuadratureSpec& q) {
    if (ell < 1) throw std::invalid_argument("volterra_iterate: ell must be >= 1");
    if (ell == 1) return P;
    struct Memo {
        std::mutex mu;
        std::map<double, std::shared_ptr<const IterateColumn>> cols;
    };
    auto memo = std::make_shared<Memo>();
    TimeConvKernel k;
    k.name = P.name + "^" + std::to_string(ell);
    k.declared = P.declared;
    for (int i = 1; i < ell && k.declared; ++i) k.declared = ledger_order(k.declared, P.declared);
    k.support_radius = ell * P.support_radius;
    k.eval = [P, ell, q, memo](double t, double p, double pp) {
        std::shared_ptr<const IterateColumn> col;
        {
            std::lock_guard<std::mutex> lock(memo->mu);
            auto it = memo->cols.find(pp);
            if (it != memo->cols.end()) col = it->second;
        }
        if (!col) {
            auto fresh = std::make_shared<const IterateColumn>(P, ell, pp, q);
            double ch = fresh->refinement_change(ell);
            if (ch > 1e-4) {
                std::ostringstream os;
                os << "simplex quadrature does not settle: relative change " << ch << " under doubled time nodes";
                throw VolterraError(os.str());
            }
            std::lock_guard<std::mutex> lock(memo->mu);
            col = memo->cols.emplace(pp, fresh).first->second;
        }
        return col->evaluate(ell, t, p);
    };
    return k;
}

FactorialReport factorial_bound_check(const TimeConvKernel& P, int ell_max, const std::vector<double>& columns,
                                      const QuadratureSpec& q) {
    if (ell_max < 2 || ell_max > 5) throw std::invalid_argument("factorial check: ell_max must be in [2, 5]");
    if (columns.empty()) throw std::invalid_argument("factorial check: no sample columns");
    FactorialReport rep;
    rep.columns = columns;
    rep.T = q.T;
    double lo = 1e300, hi = -1e300;
    std::vector<double> sup(ell_max + 1, 0.0);
    for (double pp : columns) {
        IterateColumn col(P, ell_max, pp, q);
        for (int l = 1; l <= ell_max; ++l) sup[l] = std::max(sup[l], col.sup_norm(l));
        lo = std::min(lo, col.space().front() - pp);
        hi = std::max(hi, col.space().back() - pp);
    }
    rep.exhaustion_radius = std::max(std::abs(lo), std::abs(hi));
    for (int l = 1; l <= ell_max; ++l) {
        FactorialRow r;
        r.ell = l;
        r.sup = sup[l];
        if (l > 1 && sup[1] > 0) r.fitted_c = std::pow(factorial(l - 1) * sup[l] / sup[1], 1.0 / (l - 1)) / q.T;
        if (l < ell_max && sup[l] > 0) r.ratio = sup[l + 1] / sup[l];
        rep.rows.push_back(r);
    }
    rep.ratios_decreasing = true;
    for (int l = 1; l + 1 < ell_max; ++l) {
        double a = rep.rows[l - 1].ratio, b = rep.rows[l].ratio;
        if (a > 0 ? !(b < a) : b != 0) rep.ratios_decreasing = false;
    }
    rep.c_nonincreasing = true;
    for (int l = 3; l <= ell_max; ++l)
        if (rep.rows[l - 1].fitted_c > rep.rows[l - 2].fitted_c * (1 + 1e-9)) rep.c_nonincreasing = false;
    return rep;
}

// ---------------------------------------------------------------- Neumann

namespace {

// H0 o P^ell at (t, p) for ell = 1..L, split into the free Gaussian part and the
// smooth remainder so that the diagonal singularity of H0 is integrated exactly
std::vector<double> neumann_terms(const SplitParametrix& H0, const IterateColumn& col, const QuadratureSpec& q,
                                  double t, double p) {
    int L = col.levels();
    std::vector<double> out(L, 0.0);
    if (!(t > 0)) return out;
    const Rule& r = legendre_cached(q.gl_nodes);
    const Rule& xi = legendre_cached(64);
    constexpr double X = 7;
    const auto& space = col.space();
    std::size_t nq = space.size();
    std::vector<double> row, erow(nq), grow(nq);
    double h = q.grid.spacing;
    if (!(h > 0)) throw std::invalid_argument("neumann_sum: needs a uniform spatial grid");
    // panels graded toward t' = t, where the free part is narrowest
    std::vector<double> nodes, weights;
    const double brk[] = {0, 0.5, 0.85, 0.97, 1};
    for (int b = 0; b < 4; ++b)
        for (std::size_t g = 0; g < r.x.size(); ++g) {
            nodes.push_back(brk[b] + (brk[b + 1] - brk[b]) * r.x[g]);
            weights.push_back((brk[b + 1] - brk[b]) * r.w[g]);
        }
    for (std::size_t g = 0; g < nodes.size(); ++g) {
        double s = t * nodes[g], tau = t - s;
        // a Gaussian spanning several cells is integrated on the grid directly;
        // narrower ones through q = p + 2 sqrt(tau) z and interpolation
        bool wide = std::sqrt(2 * tau) > 3 * h;
        for (std::size_t l = 0; l < nq; ++l) {
            erow[l] = H0.remainder(tau, p, space[l]);
            if (wide) grow[l] = std::exp(-(p - space[l]) * (p - space[l]) / (4 * tau)) / std::sqrt(4 * kPi * tau);
        }
        for (int k = 1; k <= L; ++k) {
            col.at_time(k, s, row);
            double free = 0;
            if (wide) {
                free = simd::weighted_dot(col.grid_weights().data(), grow.data(), row.data(), nq);
            } else {
                for (std::size_t m = 0; m < xi.x.size(); ++m) {
                    double z = X * (2 * xi.x[m] - 1);
                    double w = 2 * X * xi.w[m] * std::exp(-z * z) / std::sqrt(kPi);
                    free += w * col.interp_space(row, p + 2 * std::sqrt(tau) * z);
                }
            }
            double rem = simd::weighted_dot(col.grid_weights().data(), erow.data(), row.data(), nq);
            out[k - 1] += t * weights[g] * (free - rem);
        }
    }
    return out;
}

}  // namespace

NeumannResult neumann_sum(const SplitParametrix& H0, const TimeConvKernel& P, int L,
                          const std::vector<SamplePoint>& samples, const QuadratureSpec& q) {
    if (L < 0 || L > 4) throw std::invalid_argument("neumann_sum: L must be in [0, 4]");
    NeumannResult res;
    res.partial.assign(L + 1, std::vector<double>(samples.size(), 0.0));
    res.terms.resize(L);
    for (int l = 1; l <= L; ++l) res.terms[l - 1].ell = l;
    std::map<double, std::shared_ptr<IterateColumn>> cols;
    for (const auto& s : samples)
        if (L > 0 && !cols.count(s.pp)) cols[s.pp] = std::make_shared<IterateColumn>(P, L, s.pp, q);
    std::vector<std::vector<double>> terms(samples.size());
    parallel_for(static_cast<int>(samples.size()), [&](int i) {
        const auto& s = samples[i];
        if (L > 0) terms[i] = neumann_terms(H0, *cols.at(s.pp), q, s.t, s.p);
    });
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double acc = H0.whole(samples[i].t, samples[i].p, samples[i].pp);
        res.partial[0][i] = acc;
        for (int l = 1; l <= L; ++l) {
            double v = terms[i][l - 1];
            acc += (l % 2 ? -1.0 : 1.0) * v;
            res.partial[l][i] = acc;
            res.terms[l - 1].sup = std::max(res.terms[l - 1].sup, std::abs(v));
        }
    }
    std::ostringstream diag;
    for (int l = 2; l <= L; ++l) {
        double a = res.terms[l - 2].sup, b = res.terms[l - 1].sup;
        if (a > 0 && b >= a) {
            res.diverged = true;
            diag << "term " << l << " sup " << b << " >= term " << l - 1 << " sup " << a << "; ";
        }
    }
    res.diagnostics = diag.str();
    if (res.diverged) throw VolterraError("Neumann series does not contract: " + res.diagnostics);
    return res;
}

// ---------------------------------------------------------------- desk model

double DeskModel::lambda(double rp) const { return delta * std::sqrt(c * c + rp * rp); }

double DeskModel::G(double t, double d) const {
    if (!(t > 0)) return 0;
    return std::exp(-d * d / (4 * t)) / std::sqrt(4 * kPi * t);
}

double DeskModel::cutoff(double r, double rp) const { return smoothstep(2 - std::abs(r - rp) / lambda(rp)); }

double DeskModel::H0(double t, double r, double rp) const {
    double chi = cutoff(r, rp);
    return chi == 0 ? 0 : chi * G(t, r - rp);
}

double DeskModel::P(double t, double r, double rp) const {
    if (!(t > 0)) return 0;
    double lam = lambda(rp), d = std::abs(r - rp), u = d / lam;
    if (u <= 1 || u >= 2) return 0;
    double v, d1, d2;
    smoothstep_d(2 - u, v, d1, d2);
    // chi(u) = S(2 - u): chi' = -S', chi'' = S''
    double chi1 = -d1, chi2 = d2;
    return G(t, d) * (chi1 * d / (lam * t) - chi2 / (lam * lam));
}

std::vector<SamplePoint> default_neumann_samples() {
    std::vector<SamplePoint> s;
    for (double p : {0.6, 1.0, 1.4, 1.8, 2.6, 3.4, 4.2, 4.6, 5.0, 5.4}) s.push_back({0.5, p, 3});
    return s;
}

QuadratureSpec neumann_quadrature() {
    QuadratureSpec q;
    q.T = 0.5;
    q.gl_nodes = 16;
    q.grid = uniform_grid(9, 0.025);
    return q;
}

TimeConvKernel euclid_line_kernel() {
    return {"H", KernelOrder{3, Rational(0), 1}, 12, [](double t, double p, double pp) {
                return t > 0 ? euclid_heat_r2(1, t, (p - pp) * (p - pp)) : 0.0;
            }};
}

SplitParametrix desk_parametrix(const DeskModel& m) {
    SplitParametrix s;
    s.whole = {"H0", KernelOrder{3, Rational(0), 1}, 12, [m](double t, double p, double pp) { return m.H0(t, p, pp); }};
    s.remainder = [m](double t, double p, double pp) {
        double chi = m.cutoff(p, pp);
        return chi == 1 ? 0 : (1 - chi) * m.G(t, p - pp);
    };
    return s;
}

TimeConvKernel desk_error(const DeskModel& m) {
    return {"P", std::nullopt, 30, [m](double t, double p, double pp) { return m.P(t, p, pp); }};
}

}  // namespace phicalc
