#include "mcbern/bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "mcbern/error.hpp"

namespace mcbern {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void check_query(const BoundQuery& q) {
    if (q.n == 0) raise(Errc::InvalidArgument, "n must be positive");
    if (!(q.eps > 0.0)) raise(Errc::InvalidArgument, "eps must be positive, got " + num(q.eps));
    if (!(q.c > 0.0)) raise(Errc::InvalidArgument, "c must be positive, got " + num(q.c));
    if (!(q.sigma2 >= 0.0) || q.sigma2 > q.c * q.c * (1.0 + 1e-12))
        raise(Errc::InvalidArgument, "sigma2 must lie in [0, c^2], got " + num(q.sigma2));
}

double checked_gap(double gap, Variant variant) {
    if (variant == Variant::thm11 && gap < 0.0)
        raise(Errc::DomainError, "lambda must lie in [0, 1), got " + num(gap));
    if (variant == Variant::thm12 && gap < -1.0)
        raise(Errc::DomainError, "lambda_plus must lie in [-1, 1), got " + num(gap));
    const double lb = effective_gap(gap, variant);
    if (!(lb < 1.0)) raise(Errc::NoGap, "gap parameter " + num(gap) + " leaves no spectral gap");
    return lb;
}

BoundKind closed_kind(Variant v) { return v == Variant::thm11 ? BoundKind::thm11 : BoundKind::thm12; }

BoundValue from_exponent(std::size_t n, double exponent, BoundKind kind) {
    BoundValue b;
    b.exponent = exponent;
    b.probability_bound = std::exp(-static_cast<double>(n) * exponent);
    b.kind = kind;
    return b;
}

struct GoldenResult {
    double t = 0.0;
    double value = -kInf;
};

// Maximises a concave objective on [lo, hi] to a bracket of rel_tol·(hi - lo).
template <class F>
GoldenResult golden_max(F&& phi, double lo, double hi, double rel_tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    const double stop = rel_tol * (hi - lo);
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = phi(x1), f2 = phi(x2);
    GoldenResult best;
    auto note = [&](double x, double f) {
        if (f > best.value) best = {x, f};
    };
    note(x1, f1);
    note(x2, f2);
    for (int it = 0; it < 400 && (b - a) > stop; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = phi(x2);
            note(x2, f2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = phi(x1);
            note(x1, f1);
        }
    }
    return best;
}

}  // namespace

std::string_view to_string(Variant v) noexcept { return v == Variant::thm11 ? "thm11" : "thm12"; }

std::string_view to_string(ClassicalKind k) noexcept {
    switch (k) {
        case ClassicalKind::hoeffding: return "hoeffding";
        case ClassicalKind::bennett: return "bennett";
        case ClassicalKind::bernstein: return "bernstein";
    }
    return "unknown";
}

std::string_view to_string(BoundKind k) noexcept {
    switch (k) {
        case BoundKind::thm11: return "thm11";
        case BoundKind::thm12: return "thm12";
        case BoundKind::thm11_chernoff: return "thm11-chernoff";
        case BoundKind::thm12_chernoff: return "thm12-chernoff";
        case BoundKind::hoeffding: return "hoeffding";
        case BoundKind::bennett: return "bennett";
        case BoundKind::bernstein: return "bernstein";
    }
    return "unknown";
}

double effective_gap(double gap, Variant variant) {
    double lb = variant == Variant::thm12 ? std::max(gap, 0.0) : gap;
    if (lb < kLambdaZeroTol) lb = 0.0;
    return lb;
}

double expm1_minus_x(double x) {
    if (std::fabs(x) < 1e-2) {
        // Σ_{k>=2} x^k / k!
        double term = x * x / 2.0;
        double sum = 0.0;
        for (int k = 2; k <= 12; ++k) {
            sum += term;
            term *= x / static_cast<double>(k + 1);
        }
        return sum;
    }
    return std::expm1(x) - x;
}

double bennett_h(double u) {
    if (u <= -1.0) raise(Errc::DomainError, "h(u) needs u > -1");
    if (std::fabs(u) < 1e-2) {
        // Σ_{k>=2} (-1)^k u^k / (k(k-1))
        double power = u * u;
        double sum = 0.0;
        for (int k = 2; k <= 14; ++k) {
            const double term = power / static_cast<double>(k * (k - 1));
            sum += (k % 2 == 0) ? term : -term;
            power *= u;
        }
        return sum;
    }
    return (1.0 + u) * std::log1p(u) - u;
}

double conjugate_h2(double u) { return std::sqrt(1.0 + u) + u / 2.0 + 1.0; }

GComponents g_components(double t, double sigma2, double c, double lambda) {
    if (t < 0.0) raise(Errc::OutOfRange, "t must be nonnegative, got " + num(t));
    if (!(c > 0.0)) raise(Errc::InvalidArgument, "c must be positive");
    GComponents g;
    g.g1 = sigma2 / (c * c) * expm1_minus_x(t * c);
    if (lambda == 0.0 || t == 0.0) {
        g.g2 = 0.0;
    } else {
        const double denom = 1.0 - lambda - 5.0 * c * t;
        g.g2 = denom > 0.0 ? sigma2 * lambda * t * t / denom : kInf;
    }
    return g;
}

double mgf_bound(std::size_t n, double t, double sigma2, double c, double gap, Variant variant) {
    const double lb = checked_gap(gap, variant);
    if (!(c > 0.0)) raise(Errc::InvalidArgument, "c must be positive");
    const double pole = (1.0 - lb) / (5.0 * c);
    if (!(t >= 0.0) || !(t < pole))
        raise(Errc::OutOfRange, "t = " + num(t) + " outside [0, " + num(pole) + ")");
    const GComponents g = g_components(t, sigma2, c, lb);
    return std::exp(static_cast<double>(n) * (g.g1 + g.g2));
}

BoundValue tail_bound(const BoundQuery& q, Variant variant) {
    check_query(q);
    const double lb = checked_gap(q.gap, variant);
    const double a1 = (1.0 + lb) / (1.0 - lb);
    const double linear = lb == 0.0 ? q.c * q.eps / 3.0 : 5.0 * q.c * q.eps / (1.0 - lb);
    const double exponent = q.eps * q.eps / (2.0 * (a1 * q.sigma2 + linear));
    return from_exponent(q.n, exponent, closed_kind(variant));
}

BoundValue classical_bound(ClassicalKind kind, std::size_t n, double eps, double sigma2, double c) {
    check_query(BoundQuery{n, eps, sigma2, c, 0.0});
    double exponent = 0.0;
    BoundKind bk = BoundKind::bernstein;
    switch (kind) {
        case ClassicalKind::hoeffding:
            exponent = eps * eps / (2.0 * c * c);
            bk = BoundKind::hoeffding;
            break;
        case ClassicalKind::bennett:
            // σ² = 0 means the variables vanish a.s.; the exponent diverges.
            exponent = sigma2 == 0.0 ? kInf : sigma2 / (c * c) * bennett_h(c * eps / sigma2);
            bk = BoundKind::bennett;
            break;
        case ClassicalKind::bernstein:
            exponent = eps * eps / (2.0 * (sigma2 + c * eps / 3.0));
            bk = BoundKind::bernstein;
            break;
    }
    return from_exponent(n, exponent, bk);
}

Conjugates conjugate_closed_forms(double eps1, double eps2, double sigma2, double c,
                                  double lambda) {
    if (eps1 < 0.0 || eps2 < 0.0) raise(Errc::DomainError, "conjugates need eps >= 0");
    if (!(c > 0.0)) raise(Errc::InvalidArgument, "c must be positive");
    Conjugates out;
    if (eps1 == 0.0) {
        out.g1_star = 0.0;
    } else if (sigma2 == 0.0) {
        out.g1_star = kInf;
    } else {
        out.g1_star = sigma2 / (c * c) * bennett_h(c * eps1 / sigma2);
    }
    if (lambda > 0.0 && lambda < 1.0) {
        if (eps2 == 0.0) {
            out.g2_star = 0.0;
        } else if (sigma2 == 0.0) {
            out.g2_star = eps2 * (1.0 - lambda) / (5.0 * c);
        } else {
            const double u = 5.0 * c * eps2 / (lambda * sigma2);
            out.g2_star = (1.0 - lambda) * eps2 * eps2 / (2.0 * lambda * sigma2 * conjugate_h2(u));
        }
    }
    return out;
}

double fenchel_numeric(const std::function<double(double)>& g, double eps, double t_max) {
    if (!(t_max > 0.0)) raise(Errc::InvalidArgument, "t_max must be positive");
    auto phi = [&](double t) {
        const double gv = g(t);
        if (std::isnan(gv)) raise(Errc::NonConcaveDetected, "g(" + num(t) + ") is NaN");
        return t * eps - gv;
    };

    // Concavity screen on a uniform interior grid (finite values only).
    constexpr int kGrid = 17;
    std::array<double, kGrid> vals{};
    double scale = 0.0;
    for (int i = 0; i < kGrid; ++i) {
        vals[i] = phi(t_max * (i + 1) / (kGrid + 1));
        if (std::isfinite(vals[i])) scale = std::max(scale, std::fabs(vals[i]));
    }
    for (int i = 1; i + 1 < kGrid; ++i) {
        if (!std::isfinite(vals[i - 1]) || !std::isfinite(vals[i]) || !std::isfinite(vals[i + 1]))
            continue;
        const double second = vals[i - 1] - 2.0 * vals[i] + vals[i + 1];
        if (second > 1e-10 * scale + 1e-300)
            raise(Errc::NonConcaveDetected,
                  "objective is not concave near t = " + num(t_max * (i + 1) / (kGrid + 1)));
    }

    const GoldenResult r = golden_max(phi, 0.0, t_max, 1e-12);
    const double at_zero = -g(0.0);
    return std::max(r.value, at_zero);
}

double chernoff_exponent(double eps, double sigma2, double c, double lb) {
    if (sigma2 == 0.0) return lb == 0.0 ? kInf : eps * (1.0 - lb) / (5.0 * c);
    auto g = [&](double t) {
        const GComponents gc = g_components(t, sigma2, c, lb);
        return gc.g1 + gc.g2;
    };
    double t_max;
    if (lb > 0.0) {
        t_max = (1.0 - lb) / (5.0 * c);
    } else {
        // Expand until the objective turns down; concavity makes that a bracket.
        t_max = 1.0 / c;
        for (int k = 0; k < 200; ++k) {
            const double hi = t_max * eps - g(t_max);
            const double lo = 0.5 * t_max * eps - g(0.5 * t_max);
            if (hi < lo) break;
            t_max *= 2.0;
        }
    }
    return fenchel_numeric(g, eps, t_max);
}

BoundValue chernoff_optimize(const BoundQuery& q, Variant variant) {
    check_query(q);
    const double lb = checked_gap(q.gap, variant);
    const double exponent = chernoff_exponent(q.eps, q.sigma2, q.c, lb);
    return from_exponent(q.n, exponent,
                         variant == Variant::thm11 ? BoundKind::thm11_chernoff
                                                   : BoundKind::thm12_chernoff);
}

double infimal_convolution(double eps, double sigma2, double c, double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0))
        raise(Errc::DomainError, "infimal convolution needs 0 < lambda < 1");
    if (!(eps > 0.0)) raise(Errc::InvalidArgument, "eps must be positive");
    auto neg_total = [&](double eps1) {
        const double e1 = std::clamp(eps1, 0.0, eps);
        const Conjugates cj = conjugate_closed_forms(e1, eps - e1, sigma2, c, lambda);
        return -(cj.g1_star + *cj.g2_star);
    };
    const GoldenResult r = golden_max(neg_total, 0.0, eps, 1e-13);
    const double best = std::max({r.value, neg_total(0.0), neg_total(eps)});
    return -best;
}

double infimal_lower_bound(double eps, double sigma2, double c, double lambda) {
    if (!(lambda < 1.0)) raise(Errc::NoGap, "lambda must be below 1");
    return eps * eps / (2.0 * ((1.0 + lambda) / (1.0 - lambda) * sigma2 + 5.0 * c * eps / (1.0 - lambda)));
}

std::vector<ProxyRow> proxy_table(double sigma2, double c, double lambda, double lambda_plus) {
    if (!(lambda >= 0.0 && lambda < 1.0))
        raise(Errc::DomainError, "lambda must lie in [0, 1), got " + num(lambda));
    if (!(lambda_plus >= -1.0 && lambda_plus < 1.0))
        raise(Errc::DomainError, "lambda_plus must lie in [-1, 1), got " + num(lambda_plus));
    const double lp = std::max(lambda_plus, 0.0);
    const double c2 = c * c;
    const double ratio = (1.0 + lambda) / (1.0 - lambda);
    const double ratio_p = (1.0 + lp) / (1.0 - lp);

    const char* indep = "independent";
    const char* general = "general-state-space";
    const char* finite_rev = "finite-state-space, reversible";
    return {
        {1, "Hoeffding", "Hoeffding (1963)", indep, c2, ""},
        {1, "Hoeffding", "Fan et al. (2018)", general, ratio * c2, ""},
        {1, "Bernstein", "Bernstein (1946)", indep, sigma2, ""},
        {1, "Bennett", "Bennett (1962)", indep, sigma2, ""},
        {1, "Bernstein", "Paulin (2015), (3.22)", finite_rev, 4.0 / (1.0 - lambda * lambda) * sigma2,
         ""},
        {1, "Bernstein", "thm11", general, ratio * sigma2, ""},

        {2, "Hoeffding", "Hoeffding (1963)", indep, c2, ""},
        {2, "Hoeffding", "Leon and Perron (2004)", finite_rev, ratio_p * c2, ""},
        {2, "Hoeffding", "Miasojedow (2014)", general, ratio * c2, ""},
        {2, "Hoeffding", "Fan et al. (2018)", general, ratio_p * c2, ""},
        {2, "Bernstein", "Bernstein (1946)", indep, sigma2, ""},
        {2, "Bennett", "Bennett (1962)", indep, sigma2, ""},
        {2, "Chernoff", "Lezaud (1998a), (1)", finite_rev, 2.0 / (1.0 - lp) * sigma2, ""},
        {2, "Chernoff", "Lezaud (1998a), (13)", general, 4.0 / (1.0 - lambda) * sigma2, ""},
        {2, "Bernstein", "Paulin (2015), (3.20)", finite_rev, (ratio_p + 0.8) * sigma2,
         "asymptotic variance replaced by its reversible worst case"},
        {2, "Bernstein", "Paulin (2015), (3.21)", finite_rev, 2.0 / (1.0 - lp) * sigma2, ""},
        {2, "Bernstein", "thm12", general, ratio_p * sigma2, ""},
    };
}

}  // namespace mcbern
