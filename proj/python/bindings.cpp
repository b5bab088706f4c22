#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mcbern/bounds.hpp"
#include "mcbern/chain.hpp"
#include "mcbern/cli.hpp"
#include "mcbern/kato.hpp"
#include "mcbern/leonperron.hpp"
#include "mcbern/mc.hpp"
#include "mcbern/spectral.hpp"

namespace py = pybind11;
using namespace mcbern;

namespace {

struct PyChain {
    FiniteChain chain;
    StationaryDist pi;
    Observable f;

    PyChain(const std::vector<std::vector<double>>& rows, const std::vector<double>& values, std::optional<double> c)
        : chain(validate_chain(rows)), pi(stationary(chain)), f(make_observable(values, pi, c)) {}

    explicit PyChain(ParsedChain pc) : chain(std::move(pc.chain)), pi(std::move(pc.pi)), f(std::move(pc.f)) {}

    std::vector<std::vector<double>> rows() const {
        std::vector<std::vector<double>> out(chain.n_states(), std::vector<double>(chain.n_states()));
        for (std::size_t i = 0; i < chain.n_states(); ++i)
            for (std::size_t j = 0; j < chain.n_states(); ++j) out[i][j] = chain(i, j);
        return out;
    }
};

Variant parse_variant(const std::string& s) {
    if (s == "thm11") return Variant::thm11;
    if (s == "thm12") return Variant::thm12;
    raise(Errc::InvalidArgument, "variant must be 'thm11' or 'thm12', got '" + s + "'");
}

ClassicalKind parse_classical(const std::string& s) {
    if (s == "hoeffding") return ClassicalKind::hoeffding;
    if (s == "bennett") return ClassicalKind::bennett;
    if (s == "bernstein") return ClassicalKind::bernstein;
    raise(Errc::InvalidArgument, "kind must be hoeffding, bennett or bernstein, got '" + s + "'");
}

py::dict bound_dict(const BoundValue& v) {
    py::dict d;
    d["probability_bound"] = v.probability_bound;
    d["exponent"] = v.exponent;
    d["kind"] = std::string(to_string(v.kind));
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bernstein-type tail bounds for Markov chains";

    static py::exception<Error> error_type(m, "Error", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            const std::string code(to_string(e.code()));
            py::object inst = py::reinterpret_borrow<py::object>(error_type.ptr())(std::string(e.what()));
            inst.attr("code") = code;
            PyErr_SetObject(error_type.ptr(), inst.ptr());
        }
    });

    py::class_<PyChain>(m, "Chain")
        .def(py::init<const std::vector<std::vector<double>>&, const std::vector<double>&, std::optional<double>>(),
             py::arg("rows"), py::arg("f"), py::arg("c") = py::none())
        .def_static("from_spec", [](const std::string& text) { return PyChain(parse_chain_spec(text)); })
        .def_static("load", [](const std::string& path) { return PyChain(load_chain_spec(path)); })
        .def_property_readonly("n_states", [](const PyChain& c) { return c.chain.n_states(); })
        .def_property_readonly("rows", &PyChain::rows)
        .def_property_readonly("pi", [](const PyChain& c) { return c.pi.pi; })
        .def_property_readonly("f", [](const PyChain& c) { return c.f.values; })
        .def_property_readonly("c", [](const PyChain& c) { return c.f.c; })
        .def_property_readonly("sigma2", [](const PyChain& c) { return c.f.sigma2; })
        .def_property_readonly("spectral_gap_lambda", [](const PyChain& c) { return l2_gap(c.chain, c.pi); })
        .def_property_readonly("lambda_plus", [](const PyChain& c) { return right_gap(c.chain, c.pi); })
        .def_property_readonly("reversible", [](const PyChain& c) { return is_reversible(c.chain, c.pi); })
        .def("asymptotic_variance", [](const PyChain& c) { return asymptotic_variance(c.chain, c.pi, c.f); })
        .def("second_moment",
             [](const PyChain& c, std::size_t n, const std::string& method) {
                 return finite_horizon_second_moment(
                     c.chain, c.pi, c.f, n,
                     method == "closed_form" ? SecondMomentMethod::closed_form : SecondMomentMethod::direct_sum);
             },
             py::arg("n"), py::arg("method") = "direct_sum")
        .def("exact_mgf", [](const PyChain& c, std::size_t n, double t) { return exact_mgf(c.chain, c.f, n, t); },
             py::arg("n"), py::arg("t"))
        .def("exact_tail", [](const PyChain& c, std::size_t n, double eps) { return exact_tail(c.chain, c.f, n, eps); },
             py::arg("n"), py::arg("eps"))
        .def("eigencurve", [](const PyChain& c, double t) { return eigencurve(c.chain, c.f, t); }, py::arg("t"))
        .def("kato",
             [](const PyChain& c, std::size_t order) {
                 const KatoSeries ks = kato_coefficients(c.chain, c.f, order);
                 return py::make_tuple(ks.coefficients, ks.t0_lower);
             },
             py::arg("order"))
        .def("coefficient_bound", [](const PyChain& c, std::size_t n) { return coefficient_bound(c.chain, c.f, n); },
             py::arg("n"))
        .def("estimate_tail",
             [](const PyChain& c, std::size_t n, double eps, std::size_t trials, std::uint64_t seed, unsigned threads) {
                 const TrialPlan plan{seed, trials, n};
                 TailEstimate e;
                 {
                     py::gil_scoped_release release;
                     e = estimate_tail(chain_sampler(c.chain, c.pi, c.f, plan), eps, c.f.c, plan, threads);
                 }
                 py::dict d;
                 d["successes"] = e.successes;
                 d["trials"] = e.trials;
                 d["point"] = e.point;
                 d["cp_low"] = e.cp_low;
                 d["cp_high"] = e.cp_high;
                 return d;
             },
             py::arg("n"), py::arg("eps"), py::arg("trials") = 100000, py::arg("seed") = 1, py::arg("threads") = 0)
        .def("to_spec", [](const PyChain& c) {
            ChainSpec spec;
            spec.rows = c.rows();
            spec.f = c.f.values;
            spec.c = c.f.c;
            return emit_chain_spec(spec);
        });

    m.def("tail_bound",
          [](std::size_t n, double eps, double sigma2, double c, double gap, const std::string& variant) {
              return bound_dict(tail_bound(BoundQuery{n, eps, sigma2, c, gap}, parse_variant(variant)));
          },
          py::arg("n"), py::arg("eps"), py::arg("sigma2"), py::arg("c"), py::arg("gap"), py::arg("variant") = "thm11");
    m.def("chernoff_bound",
          [](std::size_t n, double eps, double sigma2, double c, double gap, const std::string& variant) {
              return bound_dict(chernoff_optimize(BoundQuery{n, eps, sigma2, c, gap}, parse_variant(variant)));
          },
          py::arg("n"), py::arg("eps"), py::arg("sigma2"), py::arg("c"), py::arg("gap"), py::arg("variant") = "thm11");
    m.def("classical_bound",
          [](const std::string& kind, std::size_t n, double eps, double sigma2, double c) {
              return bound_dict(classical_bound(parse_classical(kind), n, eps, sigma2, c));
          },
          py::arg("kind"), py::arg("n"), py::arg("eps"), py::arg("sigma2"), py::arg("c"));
    m.def("mgf_bound",
          [](std::size_t n, double t, double sigma2, double c, double gap, const std::string& variant) {
              return mgf_bound(n, t, sigma2, c, gap, parse_variant(variant));
          },
          py::arg("n"), py::arg("t"), py::arg("sigma2"), py::arg("c"), py::arg("gap"), py::arg("variant") = "thm11");
    m.def("conjugates",
          [](double eps1, double eps2, double sigma2, double c, double lambda) {
              const Conjugates cj = conjugate_closed_forms(eps1, eps2, sigma2, c, lambda);
              py::dict d;
              d["g1_star"] = cj.g1_star;
              d["g2_star"] = cj.g2_star ? py::cast(*cj.g2_star) : py::none();
              return d;
          },
          py::arg("eps1"), py::arg("eps2"), py::arg("sigma2"), py::arg("c"), py::arg("lam"));
    m.def("proxy_table",
          [](double sigma2, double c, double lambda, double lambda_plus) {
              py::list out;
              for (const ProxyRow& r : proxy_table(sigma2, c, lambda, lambda_plus)) {
                  py::dict d;
                  d["table"] = r.table;
                  d["type"] = r.type;
                  d["reference"] = r.reference;
                  d["condition"] = r.condition;
                  d["proxy"] = r.proxy;
                  d["note"] = r.note;
                  out.append(d);
              }
              return out;
          },
          py::arg("sigma2"), py::arg("c"), py::arg("lam"), py::arg("lambda_plus"));
    m.def("lp_perturbed_norm",
          [](double lambda, const std::vector<double>& values, const std::vector<double>& weights, double c, double t) {
              return lp_perturbed_norm(lambda, SimpleFunction{values, weights, c}, t);
          },
          py::arg("lam"), py::arg("values"), py::arg("weights"), py::arg("c"), py::arg("t"));
    m.def("combinatorial_weight",
          [](std::size_t n) {
              const Rational r = combinatorial_weight(n);
              return py::make_tuple(r.num, r.den);
          },
          py::arg("n"));
    m.def("lp_scaled_variance",
          [](double lambda, const std::vector<double>& values, const std::vector<double>& weights, std::size_t n,
             std::size_t trials, std::uint64_t seed, unsigned threads) {
              const SimpleFunction mu{values, weights, 0.0};
              const TrialPlan plan{seed, trials, n};
              py::gil_scoped_release release;
              return scaled_variance(lp_sampler(lambda, mu, plan), plan, threads);
          },
          py::arg("lam"), py::arg("values"), py::arg("weights"), py::arg("n"), py::arg("trials"), py::arg("seed") = 1,
          py::arg("threads") = 0);
    m.def("run_command",
          [](const std::vector<std::string>& args) {
              const CommandResult r = run_command(args);
              return py::make_tuple(r.exit_code, r.out, r.err);
          },
          py::arg("args"));
}
