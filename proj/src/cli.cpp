#include "mcbern/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "mcbern/bounds.hpp"
#include "mcbern/kato.hpp"
#include "mcbern/leonperron.hpp"
#include "mcbern/mc.hpp"
#include "mcbern/spectral.hpp"

namespace mcbern {

namespace {

std::string line_error(std::size_t line, const std::string& reason) {
    return "line " + std::to_string(line) + ": " + reason;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t j = i;
        while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
        if (j > i) out.emplace_back(text.substr(i, j - i));
        i = j;
    }
    return out;
}

double parse_number(const std::string& tok, std::size_t line) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (!tok.empty() && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v))
        raise(Errc::ParseError, line_error(line, "invalid number '" + tok + "'"));
    return v;
}

Vector parse_numbers(const std::vector<std::string>& toks, std::size_t line) {
    Vector out;
    for (std::size_t i = 1; i < toks.size(); ++i) out.push_back(parse_number(toks[i], line));
    return out;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
    void add(const std::string& key, double value) { rows.push_back({key, format_double(value)}); }
    void add(const std::string& key, const std::string& value) { rows.push_back({key, value}); }
};

struct Report {
    std::vector<std::string> preamble;
    Table table;
    int exit_code = kExitOk;
};

std::string render(const Report& r) {
    std::ostringstream os;
    for (const auto& line : r.preamble) os << line << '\n';
    const Table& t = r.table;
    std::vector<std::size_t> width(t.header.size(), 0);
    for (std::size_t j = 0; j < t.header.size(); ++j) width[j] = t.header[j].size();
    for (const auto& row : t.rows)
        for (std::size_t j = 0; j < row.size() && j < width.size(); ++j)
            width[j] = std::max(width[j], row[j].size());
    auto emit = [&](const std::vector<std::string>& row) {
        std::string line;
        for (std::size_t j = 0; j < row.size(); ++j) {
            line += row[j];
            if (j + 1 < row.size()) line += std::string(width[j] - row[j].size() + 2, ' ');
        }
        os << line << '\n';
    };
    emit(t.header);
    for (const auto& row : t.rows) emit(row);
    return os.str();
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + "\"";
}

std::string to_csv(const Table& t) {
    std::string out;
    auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) out += ',';
            out += csv_field(row[j]);
        }
        out += "\r\n";
    };
    emit(t.header);
    for (const auto& row : t.rows) emit(row);
    return out;
}

Table key_value_table() { return Table{{"quantity", "value"}, {}}; }

const std::string kNotAvailable = "n/a";

double bound_or_inf(const std::function<double()>& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        if (e.code() == Errc::OutOfRange || e.code() == Errc::NoGap)
            return std::numeric_limits<double>::infinity();
        throw;
    }
}

std::string pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

struct Options {
    std::string csv;
    unsigned threads = 0;

    std::string file;
    std::string variant = "thm11";
    std::size_t n = 0;
    double eps = 0.0;
    double t = 0.0;
    std::optional<double> sigma2;
    std::optional<double> c;
    std::optional<double> lambda;
    std::optional<double> lambda_plus;
    std::size_t trials = 100000;
    std::uint64_t seed = 1;
    std::size_t order = 6;
};

Report cmd_info(const Options& o) {
    const ParsedChain pc = load_chain_spec(o.file);
    const SpectralReport rep = analyze(pc.chain, pc.pi, &pc.f);
    Report r;
    r.table = key_value_table();
    r.table.add("states", std::to_string(pc.chain.n_states()));
    for (std::size_t x = 0; x < pc.pi.size(); ++x)
        r.table.add("pi[" + std::to_string(x) + "]", pc.pi[x]);
    r.table.add("lambda", rep.lambda);
    r.table.add("lambda_plus", rep.lambda_plus);
    r.table.add("reversible", rep.reversible ? "yes" : "no");
    r.table.add("sigma2", pc.f.sigma2);
    r.table.add("c", pc.f.c);
    if (rep.sigma2_asy)
        r.table.add("sigma2_asy", *rep.sigma2_asy);
    else
        r.table.add("sigma2_asy", kNotAvailable);
    return r;
}

Report cmd_bound(const Options& o) {
    double sigma2 = 0.0, c = 0.0, gap = 0.0;
    const bool markov = o.variant == "thm11" || o.variant == "thm12";
    const Variant variant = o.variant == "thm12" ? Variant::thm12 : Variant::thm11;
    if (!o.file.empty()) {
        const ParsedChain pc = load_chain_spec(o.file);
        sigma2 = pc.f.sigma2;
        c = pc.f.c;
        if (markov)
            gap = variant == Variant::thm11 ? l2_gap(pc.chain, pc.pi) : right_gap(pc.chain, pc.pi);
    } else {
        const bool needs_sigma2 = o.variant != "hoeffding";
        if ((needs_sigma2 && !o.sigma2) || !o.c)
            raise(Errc::InvalidArgument, needs_sigma2 ? "--sigma2 and --c are required without FILE"
                                                      : "--c is required without FILE");
        sigma2 = o.sigma2.value_or(0.0);
        c = *o.c;
        if (markov) {
            const auto& chosen = variant == Variant::thm11 ? o.lambda : o.lambda_plus;
            if (!chosen)
                raise(Errc::InvalidArgument, variant == Variant::thm11
                                                 ? "--lambda is required for thm11"
                                                 : "--lambda-plus is required for thm12");
            gap = *chosen;
        }
    }
    if (o.n == 0) raise(Errc::InvalidArgument, "--n must be positive");

    Report r;
    r.table = key_value_table();
    r.table.add("variant", o.variant);
    r.table.add("n", std::to_string(o.n));
    r.table.add("eps", o.eps);
    r.table.add("sigma2", sigma2);
    r.table.add("c", c);
    if (markov) {
        r.table.add(variant == Variant::thm11 ? "lambda" : "lambda_plus", gap);
        const BoundQuery q{o.n, o.eps, sigma2, c, gap};
        const BoundValue closed = tail_bound(q, variant);
        const BoundValue opt = chernoff_optimize(q, variant);
        r.table.add("probability_bound", closed.probability_bound);
        r.table.add("exponent", closed.exponent);
        r.table.add("chernoff_bound", opt.probability_bound);
        r.table.add("chernoff_exponent", opt.exponent);
    } else {
        ClassicalKind kind = ClassicalKind::bernstein;
        if (o.variant == "hoeffding") kind = ClassicalKind::hoeffding;
        if (o.variant == "bennett") kind = ClassicalKind::bennett;
        const BoundValue b = classical_bound(kind, o.n, o.eps, sigma2, c);
        r.table.add("probability_bound", b.probability_bound);
        r.table.add("exponent", b.exponent);
    }
    return r;
}

struct MgfComparison {
    double exact = 0.0;
    double thm11 = 0.0;
    double thm12 = 0.0;
    bool ok = true;
};

MgfComparison compare_mgf(const ParsedChain& pc, std::size_t n, double t) {
    MgfComparison m;
    const double lambda = l2_gap(pc.chain, pc.pi);
    const double lambda_plus = right_gap(pc.chain, pc.pi);
    m.exact = exact_mgf(pc.chain, pc.f, n, t);
    if (t < 0.0) raise(Errc::OutOfRange, "t must be nonnegative");
    m.thm11 = bound_or_inf([&] { return mgf_bound(n, t, pc.f.sigma2, pc.f.c, lambda, Variant::thm11); });
    m.thm12 = bound_or_inf(
        [&] { return mgf_bound(n, t, pc.f.sigma2, pc.f.c, lambda_plus, Variant::thm12); });
    const double slack = 1.0 + 1e-12;
    m.ok = m.exact <= m.thm11 * slack && m.exact <= m.thm12 * slack;
    return m;
}

void add_maybe_inf(Table& t, const std::string& key, double v) {
    if (std::isinf(v))
        t.add(key, kNotAvailable);
    else
        t.add(key, v);
}

Report cmd_mgf(const Options& o) {
    const ParsedChain pc = load_chain_spec(o.file);
    if (o.n == 0) raise(Errc::InvalidArgument, "--n must be positive");
    const MgfComparison m = compare_mgf(pc, o.n, o.t);
    Report r;
    r.table = key_value_table();
    r.table.add("n", std::to_string(o.n));
    r.table.add("t", o.t);
    r.table.add("exact_mgf", m.exact);
    add_maybe_inf(r.table, "thm11_envelope", m.thm11);
    add_maybe_inf(r.table, "thm12_envelope", m.thm12);
    r.table.add("verdict", pass_fail(m.ok));
    if (!m.ok) r.exit_code = kExitVerifyFail;
    return r;
}

Report cmd_verify(const Options& o, const std::string& what) {
    const ParsedChain pc = load_chain_spec(o.file);
    if (o.n == 0) raise(Errc::InvalidArgument, "--n must be positive");
    const TrialPlan plan{o.seed, o.trials, o.n};
    const PathSampler sampler = chain_sampler(pc.chain, pc.pi, pc.f, plan);
    const double lambda = l2_gap(pc.chain, pc.pi);
    const double lambda_plus = right_gap(pc.chain, pc.pi);

    Report r;
    r.table = key_value_table();
    r.table.add("check", what);
    r.table.add("n", std::to_string(o.n));
    r.table.add("trials", std::to_string(o.trials));
    r.table.add("seed", std::to_string(o.seed));
    bool ok = true;
    const double slack = 1.0 + 1e-12;

    if (what == "tail") {
        const BoundQuery q11{o.n, o.eps, pc.f.sigma2, pc.f.c, lambda};
        const BoundQuery q12{o.n, o.eps, pc.f.sigma2, pc.f.c, lambda_plus};
        const double b11 = tail_bound(q11, Variant::thm11).probability_bound;
        const double b12 = tail_bound(q12, Variant::thm12).probability_bound;
        const TailEstimate est = estimate_tail(sampler, o.eps, pc.f.c, plan, o.threads);
        r.table.add("eps", o.eps);
        try {
            const double exact = exact_tail(pc.chain, pc.f, o.n, o.eps);
            r.table.add("exact_tail", exact);
            ok = ok && exact <= b11 * slack && exact <= b12 * slack;
        } catch (const Error& e) {
            if (e.code() != Errc::TooLarge) throw;
            r.table.add("exact_tail", kNotAvailable);
        }
        r.table.add("successes", std::to_string(est.successes));
        r.table.add("estimate", est.point);
        r.table.add("cp99_low", est.cp_low);
        r.table.add("cp99_high", est.cp_high);
        r.table.add("thm11_bound", b11);
        r.table.add("thm12_bound", b12);
        ok = ok && est.dominated_by(b11) && est.dominated_by(b12);
    } else if (what == "mgf") {
        const MgfComparison m = compare_mgf(pc, o.n, o.t);
        r.table.add("t", o.t);
        r.table.add("exact_mgf", m.exact);
        r.table.add("estimate", estimate_mgf(sampler, o.t, plan, o.threads));
        add_maybe_inf(r.table, "thm11_envelope", m.thm11);
        add_maybe_inf(r.table, "thm12_envelope", m.thm12);
        ok = m.ok;
    } else {
        const double exact =
            finite_horizon_second_moment(pc.chain, pc.pi, pc.f, o.n, SecondMomentMethod::direct_sum) /
            static_cast<double>(o.n);
        const double proxy11 = (1.0 + lambda) / (1.0 - lambda) * pc.f.sigma2;
        const double lp = std::max(lambda_plus, 0.0);
        const double proxy12 = (1.0 + lp) / (1.0 - lp) * pc.f.sigma2;
        r.table.add("scaled_variance", scaled_variance(sampler, plan, o.threads));
        r.table.add("exact_variance", exact);
        r.table.add("sigma2_asy", asymptotic_variance(pc.chain, pc.pi, pc.f));
        r.table.add("thm11_proxy", proxy11);
        r.table.add("thm12_proxy", proxy12);
        ok = exact <= proxy11 * slack;
    }
    r.table.add("verdict", pass_fail(ok));
    if (!ok) r.exit_code = kExitVerifyFail;
    return r;
}

Report cmd_kato(const Options& o) {
    const ParsedChain pc = load_chain_spec(o.file);
    const KatoSeries ks = kato_coefficients(pc.chain, pc.f, o.order);
    const double lambda_plus = right_gap(pc.chain, pc.pi);
    Report r;
    r.preamble.push_back("t0_lower " + format_double(ks.t0_lower));
    r.table.header = {"n", "beta", "coefficient_bound"};
    for (std::size_t k = 0; k <= ks.order; ++k) {
        std::string bound = kNotAvailable;
        if (k >= 2 && lambda_plus >= 0.0) bound = format_double(coefficient_bound(pc.chain, pc.f, k));
        r.table.add({std::to_string(k), format_double(ks.coefficients[k]), bound});
    }
    return r;
}

Report cmd_compare(const Options& o) {
    if (!o.sigma2 || !o.c) raise(Errc::InvalidArgument, "--sigma2 and --c are required");
    if (!o.lambda && !o.lambda_plus)
        raise(Errc::InvalidArgument, "give --lambda and/or --lambda-plus");
    const double lambda_plus = o.lambda_plus ? *o.lambda_plus : *o.lambda;
    const double lambda = o.lambda ? *o.lambda : std::max(lambda_plus, 0.0);
    const auto rows = proxy_table(*o.sigma2, *o.c, lambda, lambda_plus);
    Report r;
    r.table.header = {"table", "type", "reference", "condition", "proxy", "note"};
    for (const auto& row : rows)
        r.table.add({std::to_string(row.table), row.type, row.reference, row.condition,
                     format_double(row.proxy), row.note});
    return r;
}

Report cmd_conjugate(const Options& o) {
    if (!o.sigma2 || !o.c || !o.lambda)
        raise(Errc::InvalidArgument, "--sigma2, --c and --lambda are required");
    const double s2 = *o.sigma2, c = *o.c, lambda = *o.lambda;
    const Conjugates cj = conjugate_closed_forms(o.eps, o.eps, s2, c, lambda);
    auto g1 = [&](double t) { return g_components(t, s2, c, 0.0).g1; };
    Report r;
    r.table = key_value_table();
    r.table.add("eps", o.eps);
    r.table.add("g1_star", cj.g1_star);
    r.table.add("g1_star_numeric", fenchel_numeric(g1, o.eps, std::max(1.0, 64.0 * o.eps / s2) / c));
    if (cj.g2_star) {
        r.table.add("g2_star", *cj.g2_star);
        auto g2 = [&](double t) { return g_components(t, s2, c, lambda).g2; };
        r.table.add("g2_star_numeric", fenchel_numeric(g2, o.eps, (1.0 - lambda) / (5.0 * c)));
        r.table.add("infimal_convolution", infimal_convolution(o.eps, s2, c, lambda));
        r.table.add("infimal_lower_bound", infimal_lower_bound(o.eps, s2, c, lambda));
    } else {
        r.table.add("g2_star", kNotAvailable);
    }
    r.table.add("chernoff_exponent", chernoff_exponent(o.eps, s2, c, effective_gap(lambda, Variant::thm11)));
    return r;
}

}  // namespace

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ChainSpec read_chain_spec(std::string_view text) {
    ChainSpec spec;
    std::optional<std::size_t> states;
    std::vector<std::size_t> row_lines;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const auto toks = tokenize(line);
        if (toks.empty()) {
            if (end == text.size()) break;
            continue;
        }
        const std::string& key = toks[0];
        if (key == "states") {
            if (states) raise(Errc::ParseError, line_error(line_no, "duplicate 'states'"));
            if (toks.size() != 2) raise(Errc::ParseError, line_error(line_no, "'states' takes one value"));
            const double v = parse_number(toks[1], line_no);
            if (v < 1.0 || v != std::floor(v) || v > 1e6)
                raise(Errc::ParseError, line_error(line_no, "state count must be a positive integer"));
            states = static_cast<std::size_t>(v);
        } else if (key == "row" || key == "f" || key == "pi") {
            if (!states) raise(Errc::ParseError, line_error(line_no, "'states' must come first"));
            Vector vals = parse_numbers(toks, line_no);
            if (vals.size() != *states)
                raise(Errc::ParseError, line_error(line_no, "'" + key + "' needs " + std::to_string(*states) +
                                                                " values, got " + std::to_string(vals.size())));
            if (key == "row") {
                if (spec.rows.size() == *states)
                    raise(Errc::ParseError, line_error(line_no, "more than " + std::to_string(*states) + " rows"));
                spec.rows.push_back(std::move(vals));
                row_lines.push_back(line_no);
            } else if (key == "f") {
                if (!spec.f.empty()) raise(Errc::ParseError, line_error(line_no, "duplicate 'f'"));
                spec.f = std::move(vals);
            } else {
                if (spec.pi) raise(Errc::ParseError, line_error(line_no, "duplicate 'pi'"));
                spec.pi = std::move(vals);
                spec.pi_line = line_no;
            }
        } else if (key == "c") {
            if (spec.c) raise(Errc::ParseError, line_error(line_no, "duplicate 'c'"));
            if (toks.size() != 2) raise(Errc::ParseError, line_error(line_no, "'c' takes one value"));
            spec.c = parse_number(toks[1], line_no);
        } else {
            raise(Errc::ParseError, line_error(line_no, "unknown keyword '" + key + "'"));
        }
        if (end == text.size()) break;
    }
    if (!states) raise(Errc::ParseError, "states required");
    if (spec.rows.size() != *states)
        raise(Errc::ParseError, "expected " + std::to_string(*states) + " rows, got " +
                                    std::to_string(spec.rows.size()));
    if (spec.f.empty()) raise(Errc::ParseError, "f required");

    // Report row-level validation failures against the file line.
    for (std::size_t i = 0; i < spec.rows.size(); ++i) {
        double sum = 0.0;
        for (double v : spec.rows[i]) {
            if (!(v >= 0.0))
                raise(Errc::ParseError, line_error(row_lines[i], "row " + std::to_string(i) +
                                                                     " has a negative entry"));
            sum += v;
        }
        if (std::fabs(sum - 1.0) > kRowSumTol)
            raise(Errc::ParseError, line_error(row_lines[i], "row " + std::to_string(i) + " sums to " +
                                                                 format_double(sum)));
    }
    return spec;
}

ParsedChain parse_chain_spec(std::string_view text) {
    ChainSpec spec = read_chain_spec(text);
    FiniteChain chain = validate_chain(spec.rows);
    StationaryDist pi = stationary(chain);
    if (spec.pi) {
        for (std::size_t x = 0; x < pi.size(); ++x)
            if (std::fabs((*spec.pi)[x] - pi[x]) > 1e-8)
                raise(Errc::ParseError,
                      line_error(spec.pi_line, "declared pi differs from the stationary distribution at state " +
                                                   std::to_string(x) + " (computed " + format_double(pi[x]) + ")"));
    }
    Observable f = make_observable(spec.f, pi, spec.c);
    return ParsedChain{std::move(spec), std::move(chain), std::move(pi), std::move(f)};
}

ParsedChain load_chain_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::InvalidArgument, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_chain_spec(ss.str());
}

std::string emit_chain_spec(const ChainSpec& spec) {
    std::string out = "states " + std::to_string(spec.rows.size()) + "\n";
    auto line = [&](const std::string& key, const Vector& vals) {
        out += key;
        for (double v : vals) out += " " + format_double(v);
        out += "\n";
    };
    for (const auto& row : spec.rows) line("row", row);
    line("f", spec.f);
    if (spec.c) out += "c " + format_double(*spec.c) + "\n";
    if (spec.pi) line("pi", *spec.pi);
    return out;
}

CommandResult run_command(const std::vector<std::string>& args) {
    CommandResult result;
    std::ostringstream out, err;
    Options o;

    CLI::App app{"Bernstein-type tail bounds for Markov chains", "mcbern"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--csv", o.csv, "Also write the result table as CSV to this path");
    app.add_option("--threads", o.threads, "Worker threads for simulation (0 = all cores)");

    auto* info = app.add_subcommand("info", "Stationary law, gap parameters and variances");
    info->add_option("FILE", o.file)->required();

    auto* bound = app.add_subcommand("bound", "Tail bound P(mean > eps)");
    bound->add_option("--variant", o.variant)
        ->check(CLI::IsMember({"thm11", "thm12", "bernstein", "bennett", "hoeffding"}));
    bound->add_option("--n", o.n)->required();
    bound->add_option("--eps", o.eps)->required();
    bound->add_option("--sigma2", o.sigma2);
    bound->add_option("--c", o.c);
    bound->add_option("--lambda", o.lambda);
    bound->add_option("--lambda-plus", o.lambda_plus);
    bound->add_option("FILE", o.file);

    auto* mgf = app.add_subcommand("mgf", "Exact MGF against the envelopes");
    mgf->add_option("FILE", o.file)->required();
    mgf->add_option("--n", o.n)->required();
    mgf->add_option("--t", o.t)->required();

    auto* verify = app.add_subcommand("verify", "Simulate and check a bound");
    verify->require_subcommand(1);
    std::vector<std::pair<std::string, CLI::App*>> checks;
    for (const char* name : {"tail", "mgf", "variance"}) {
        auto* sub = verify->add_subcommand(name, std::string("Check the ") + name);
        sub->add_option("FILE", o.file)->required();
        sub->add_option("--n", o.n)->required();
        if (std::string(name) == "tail") sub->add_option("--eps", o.eps)->required();
        if (std::string(name) == "mgf") sub->add_option("--t", o.t)->required();
        sub->add_option("--trials", o.trials);
        sub->add_option("--seed", o.seed);
        checks.emplace_back(name, sub);
    }

    auto* kato = app.add_subcommand("kato", "Eigencurve Taylor coefficients");
    kato->add_option("FILE", o.file)->required();
    kato->add_option("--order", o.order);

    auto* compare = app.add_subcommand("compare", "Variance proxies of the published inequalities");
    compare->add_option("--lambda", o.lambda);
    compare->add_option("--lambda-plus", o.lambda_plus);
    compare->add_option("--sigma2", o.sigma2)->required();
    compare->add_option("--c", o.c)->required();

    auto* conjugate = app.add_subcommand("conjugate", "Fenchel conjugates of the MGF envelope");
    conjugate->add_option("--eps", o.eps)->required();
    conjugate->add_option("--sigma2", o.sigma2)->required();
    conjugate->add_option("--c", o.c)->required();
    conjugate->add_option("--lambda", o.lambda)->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        result.exit_code = app.exit(e, out, err) == 0 ? kExitOk : kExitInput;
        result.out = out.str();
        result.err = err.str();
        return result;
    }

    try {
        Report report;
        if (info->parsed()) {
            report = cmd_info(o);
        } else if (bound->parsed()) {
            report = cmd_bound(o);
        } else if (mgf->parsed()) {
            report = cmd_mgf(o);
        } else if (verify->parsed()) {
            for (const auto& [name, sub] : checks)
                if (sub->parsed()) report = cmd_verify(o, name);
        } else if (kato->parsed()) {
            report = cmd_kato(o);
        } else if (compare->parsed()) {
            report = cmd_compare(o);
        } else {
            report = cmd_conjugate(o);
        }
        out << render(report);
        if (!o.csv.empty()) {
            std::ofstream csv(o.csv, std::ios::binary);
            if (!csv) raise(Errc::InvalidArgument, "cannot write '" + o.csv + "'");
            csv << to_csv(report.table);
        }
        result.exit_code = report.exit_code;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        result.exit_code = is_numerical(e.code()) ? kExitNumerical : kExitInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        result.exit_code = kExitInput;
    }
    result.out = out.str();
    result.err = err.str();
    return result;
}

}  // namespace mcbern
