#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "iwasawa/error.hpp"
#include "iwasawa/mahler.hpp"
#include "iwasawa/padic.hpp"
#include "iwasawa/parallel.hpp"
#include "iwasawa/report.hpp"

namespace py = pybind11;
using namespace iwasawa;

namespace {

py::object to_python(const ojson& j) { return py::module_::import("json").attr("loads")(j.dump()); }

ojson from_python(const py::object& o) { return ojson::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>()); }

// Input is a path or an already parsed document (dict).
py::object run(const std::string& command, const py::object& input, std::optional<u64> p, int level, int coeff_prec,
               u64 degree, int m_max, const std::string& regime, u64 seed, unsigned threads, long j_rank,
               std::size_t samples, std::size_t max_terms)
{
    RunConfig cfg;
    cfg.command = command;
    cfg.p = p;
    cfg.level = level;
    cfg.coeff_prec = coeff_prec;
    cfg.degree = degree;
    cfg.m_max = m_max;
    cfg.regime = parse_regime(regime);
    cfg.structured = true;
    cfg.seed = seed;
    cfg.threads = threads == 0 ? hardware_threads() : threads;
    cfg.j_rank = j_rank;
    cfg.samples = samples;
    cfg.max_terms = max_terms;
    ojson doc;
    if (py::isinstance<py::str>(input)) {
        cfg.input = input.cast<std::string>();
        doc = load_input(cfg.input);
    } else {
        doc = from_python(input);
    }
    Report r;
    {
        py::gil_scoped_release release;
        r = run_command(cfg, doc);
    }
    py::dict out = to_python(r.doc);
    out["exit_code"] = r.exit_code;
    return out;
}

} // namespace

PYBIND11_MODULE(iwasawa, m)
{
    m.doc() = "Finite stages (Z/p^N)[G/G^{p^n}] of Iwasawa algebras of uniform pro-p groups";

    auto base = py::register_exception<Error>(m, "IwasawaError", PyExc_RuntimeError);
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<PrecisionError>(m, "PrecisionError", base.ptr());
    py::register_exception<BudgetError>(m, "BudgetError", base.ptr());
    py::register_exception<InvariantViolation>(m, "InvariantViolation", base.ptr());

    m.def("vp", &vp, py::arg("k"), py::arg("p"));
    m.def("digit_sum", &digit_sum, py::arg("k"), py::arg("p"));
    m.def("factorial_val", &legendre_factorial_val, py::arg("k"), py::arg("p"), "v_p(k!)");
    m.def("binom_prime_power_val", &vp_binom_prime_power, py::arg("m"), py::arg("k"), py::arg("p"),
          "v_p(binom(p^m, k)) for 1 <= k < p^m");

    py::class_<PadicScalar>(m, "PadicScalar")
        .def(py::init<u64, int, i64>(), py::arg("p"), py::arg("prec"), py::arg("value"))
        .def_property_readonly("p", &PadicScalar::p)
        .def_property_readonly("prec", &PadicScalar::prec)
        .def_property_readonly("residue", &PadicScalar::residue)
        .def_property_readonly("val", &PadicScalar::val)
        .def("inverse", &PadicScalar::inverse)
        .def("with_prec", &PadicScalar::with_prec)
        .def("__neg__", [](const PadicScalar& a) { return -a; })
        .def("__add__", [](const PadicScalar& a, const PadicScalar& b) { return a + b; })
        .def("__sub__", [](const PadicScalar& a, const PadicScalar& b) { return a - b; })
        .def("__mul__", [](const PadicScalar& a, const PadicScalar& b) { return a * b; })
        .def("__eq__", [](const PadicScalar& a, const PadicScalar& b) { return a == b; })
        .def("__repr__", &PadicScalar::to_string);

    m.def("binom", &binom_padic, py::arg("beta"), py::arg("alpha"));
    m.def("idempotent_power", &idempotent_power, py::arg("beta"), py::arg("n"), py::arg("f") = 1);

    m.def(
        "mahler_coeffs",
        [](const py::function& f, u64 p, int N, u64 D) {
            Modulus mod(p, N);
            const py::int_ pN(mod.value());
            auto T = mahler_coeffs(
                [&](const Vec& beta) { return Vec{f(beta[0]).attr("__mod__")(pN).cast<u64>()}; }, 1, D, mod, 1);
            std::vector<u64> out;
            for (const auto& e : T.entries)
                out.push_back(e[0]);
            return out;
        },
        py::arg("f"), py::arg("p"), py::arg("N"), py::arg("D"),
        "Mahler coefficients m_0..m_D of f: Z_p -> Z/p^N");
    m.def(
        "mahler_reconstruct",
        [](const std::vector<i64>& coeffs, u64 p, int N, u64 x) {
            Modulus mod(p, N);
            u64 s = 0;
            for (u64 a = 0; a < coeffs.size() && a <= x; ++a)
                s = mod.add(s, mod.mul(mod.reduce(coeffs[a]), binom_mod(x, a, mod)));
            return s;
        },
        py::arg("coeffs"), py::arg("p"), py::arg("N"), py::arg("x"));

    m.def("run", &run, py::arg("command"), py::arg("input"), py::kw_only(), py::arg("p") = py::none(),
          py::arg("level") = 2, py::arg("coeff_prec") = 4, py::arg("degree") = 4, py::arg("m_max") = 3,
          py::arg("regime") = "char0", py::arg("seed") = 1, py::arg("threads") = 1, py::arg("j_rank") = 1,
          py::arg("samples") = 64, py::arg("max_terms") = 32,
          "Run ucs | mahler | control | growth and return the structured report");
}
