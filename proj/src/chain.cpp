#include "mcbern/chain.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>

namespace mcbern {

namespace {

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void require_positive_support(const StationaryDist& pi) {
    for (std::size_t x = 0; x < pi.size(); ++x) {
        if (!(pi[x] >= kSupportFloor))
            raise(Errc::DegenerateSupport,
                  "pi(" + std::to_string(x) + ") = " + fmt_double(pi[x]) + " below 1e-14");
    }
}

std::uint64_t splitmix_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Distribution reached from a seeded positive start vector by repeatedly
// squaring the lazy kernel (I + P)/2; aperiodic by construction.
Vector power_stationary(const Matrix& p) {
    const std::size_t n = p.rows();
    Matrix m = (Matrix::identity(n) + p) * 0.5;
    for (int k = 0; k < 64; ++k) {
        Matrix sq = m * m;
        // Squaring amplifies row-sum rounding; keep the rows stochastic.
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += sq(i, j);
            for (std::size_t j = 0; j < n; ++j) sq(i, j) /= s;
        }
        const double change = max_abs_diff(sq, m);
        m = std::move(sq);
        if (change < 1e-15) break;
    }
    std::uint64_t state = 0x5EEDF00DULL;
    Vector start(n);
    double total = 0.0;
    for (auto& v : start) {
        v = 0.5 + static_cast<double>(splitmix_next(state) >> 11) * 0x1.0p-53;
        total += v;
    }
    for (auto& v : start) v /= total;
    return vecmat(start, m);
}

}  // namespace

FiniteChain validate_chain(const Matrix& matrix) {
    if (!matrix.square() || matrix.rows() == 0)
        raise(Errc::NotSquare, "transition matrix must be square and non-empty (got " +
                                   std::to_string(matrix.rows()) + "x" +
                                   std::to_string(matrix.cols()) + ")");
    const std::size_t n = matrix.rows();
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = matrix(i, j);
            if (!(v >= 0.0) || !std::isfinite(v))
                raise(Errc::NegativeEntry, "row " + std::to_string(i) + ", col " +
                                               std::to_string(j) + " = " + fmt_double(v));
            sum += v;
        }
        if (std::fabs(sum - 1.0) > kRowSumTol)
            raise(Errc::RowSumViolation,
                  "row " + std::to_string(i) + " sums to " + fmt_double(sum));
    }
    return FiniteChain(matrix);
}

FiniteChain validate_chain(const std::vector<std::vector<double>>& rows) {
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].size() != rows.size())
            raise(Errc::NotSquare, "row " + std::to_string(i) + " has " +
                                       std::to_string(rows[i].size()) + " entries, expected " +
                                       std::to_string(rows.size()));
    return validate_chain(Matrix::from_rows(rows));
}

StationaryDist stationary(const FiniteChain& chain) {
    const Matrix& p = chain.transition();
    const std::size_t n = p.rows();
    if (n == 1) return StationaryDist{{1.0}};

    Matrix a = p.transposed() - Matrix::identity(n);
    for (std::size_t j = 0; j < n; ++j) a(n - 1, j) = 1.0;
    Lu lu(a);
    if (lu.singular())
        raise(Errc::NonUniqueStationary, "eigenvalue 1 of P^T is not simple (reducible chain)");
    Vector rhs(n, 0.0);
    rhs[n - 1] = 1.0;
    Vector pi = lu.solve(rhs);

    // One step of iterative refinement on the bordered system.
    {
        Vector r = matvec(a, pi);
        for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
        const Vector d = lu.solve(r);
        for (std::size_t i = 0; i < n; ++i) pi[i] += d[i];
    }

    const Vector other = power_stationary(p);
    double gap = 0.0;
    for (std::size_t i = 0; i < n; ++i) gap = std::max(gap, std::fabs(other[i] - pi[i]));
    if (gap > kUniquenessTol)
        raise(Errc::NonUniqueStationary,
              "power iteration disagrees with the linear solve by " + fmt_double(gap));

    StationaryDist out{std::move(pi)};
    require_positive_support(out);

    const Vector moved = vecmat(out.pi, p);
    for (std::size_t i = 0; i < n; ++i) {
        if (std::fabs(moved[i] - out.pi[i]) > kStationaryResidualTol)
            raise(Errc::NonUniqueStationary, "stationary residual too large at state " +
                                                 std::to_string(i));
    }
    return out;
}

double expectation(const StationaryDist& pi, std::span<const double> values) {
    if (values.size() != pi.size())
        raise(Errc::InvalidArgument, "observable length does not match the state count");
    double s = 0.0;
    for (std::size_t x = 0; x < values.size(); ++x) s += pi[x] * values[x];
    return s;
}

Matrix stationary_projector(const StationaryDist& pi) {
    const std::size_t n = pi.size();
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = pi[j];
    return m;
}

Matrix adjoint(const FiniteChain& chain, const StationaryDist& pi) {
    require_positive_support(pi);
    const std::size_t n = chain.n_states();
    if (pi.size() != n) raise(Errc::InvalidArgument, "pi length does not match the chain");
    Matrix adj(n, n);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y) adj(x, y) = pi[y] * chain(y, x) / pi[x];
    return adj;
}

Matrix additive_reversiblization(const FiniteChain& chain, const StationaryDist& pi) {
    return (chain.transition() + adjoint(chain, pi)) * 0.5;
}

bool is_reversible(const Matrix& p, const StationaryDist& pi, double tol) {
    const std::size_t n = p.rows();
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x + 1; y < n; ++y)
            if (std::fabs(pi[x] * p(x, y) - pi[y] * p(y, x)) > tol) return false;
    return true;
}

bool is_reversible(const FiniteChain& chain, const StationaryDist& pi, double tol) {
    return is_reversible(chain.transition(), pi, tol);
}

Observable make_observable(std::span<const double> raw, const StationaryDist& pi,
                           std::optional<double> c) {
    const double mean = expectation(pi, raw);
    Observable f;
    f.values.resize(raw.size());
    double max_abs_value = 0.0;
    for (std::size_t x = 0; x < raw.size(); ++x) {
        f.values[x] = raw[x] - mean;
        max_abs_value = std::max(max_abs_value, std::fabs(f.values[x]));
    }
    if (c) {
        if (!(*c >= 0.0) || *c < max_abs_value * (1.0 - 1e-12))
            raise(Errc::BoundTooSmall, "bound " + fmt_double(*c) + " is below max|f - pi(f)| = " +
                                           fmt_double(max_abs_value));
        f.c = std::max(*c, max_abs_value);
    } else {
        f.c = max_abs_value;
    }
    double s2 = 0.0;
    for (std::size_t x = 0; x < raw.size(); ++x) s2 += pi[x] * f.values[x] * f.values[x];
    f.sigma2 = s2;
    return f;
}

}  // namespace mcbern
