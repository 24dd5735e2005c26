#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "xvine/error.hpp"
#include "xvine/estimation.hpp"
#include "xvine/io.hpp"
#include "xvine/simulation.hpp"

namespace py = pybind11;
using namespace xvine;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Array& a) {
    if (a.ndim() != 2) throw py::value_error("expected a two-dimensional array");
    Matrix m(a.shape(0), a.shape(1));
    std::copy(a.data(), a.data() + a.size(), m.data.begin());
    return m;
}

Array to_array(const Matrix& m) {
    Array out({m.rows, m.cols});
    std::copy(m.data.begin(), m.data.end(), out.mutable_data());
    return out;
}

std::vector<double> to_point(const Array& x) {
    if (x.ndim() != 1) throw py::value_error("expected a one-dimensional point");
    return {x.data(), x.data() + x.size()};
}

TailFamily tail_family(const std::string& name, double theta) {
    TailKind k;
    if (!parse_tail_kind(name, k)) throw py::value_error("unknown tail family " + name);
    return {k, theta};
}

PairFamily pair_family(const std::string& name, double theta) {
    PairKind k;
    if (!parse_pair_kind(name, k)) throw py::value_error("unknown pair family " + name);
    return {k, theta};
}

}  // namespace

PYBIND11_MODULE(_xvine, m) {
    m.doc() = "X-vine models for multivariate extremes";

    py::register_exception<Error>(m, "XVineError", PyExc_ValueError);

    m.def("tail_chi", [](const std::string& f, double theta) { return tail_chi(tail_family(f, theta)); },
          py::arg("family"), py::arg("theta"));
    m.def("tail_density",
          [](const std::string& f, double theta, double x, double y) { return tail_density(tail_family(f, theta), x, y); },
          py::arg("family"), py::arg("theta"), py::arg("x"), py::arg("y"));
    m.def("pair_tau", [](const std::string& f, double theta) { return pair_tau(pair_family(f, theta)); },
          py::arg("family"), py::arg("theta"));

    py::class_<XVineSpec>(m, "Model")
        .def_static(
            "from_json", [](const std::string& text) { return model_from_json(parse_json(text)); }, py::arg("text"))
        .def("to_json", [](const XVineSpec& s) { return model_to_json(s).dump(2); })
        .def_property_readonly("dim", &XVineSpec::dim)
        .def_property_readonly("levels", &XVineSpec::levels)
        .def("density", [](const XVineSpec& s, const Array& x) { return s.density(to_point(x)); }, py::arg("x"))
        .def(
            "sample",
            [](const XVineSpec& s, std::size_t n, std::uint64_t seed, const std::string& scale, int threads) {
                if (scale == "inverted") return to_array(sample_inverted_pareto(s, n, seed, threads).z);
                if (scale == "pareto") return to_array(sample_pareto(s, n, seed, threads).z);
                throw py::value_error("scale must be 'pareto' or 'inverted'");
            },
            py::arg("n"), py::arg("seed") = 1, py::arg("scale") = "pareto", py::arg("threads") = 1)
        .def(
            "sample_conditional",
            [](const XVineSpec& s, int j, std::size_t n, std::uint64_t seed, int threads) {
                return to_array(sample_conditional(s, j, n, seed, threads));
            },
            py::arg("j"), py::arg("n"), py::arg("seed") = 1, py::arg("threads") = 1)
        .def(
            "chi",
            [](const XVineSpec& s, std::vector<int> nodes, std::size_t n_mc, std::uint64_t seed) {
                ChiEstimate c = model_chi(s, nodes, n_mc, seed, 1);
                return py::make_tuple(c.value, c.se);
            },
            py::arg("nodes"), py::arg("n_mc") = 100000, py::arg("seed") = 1);

    m.def(
        "fit",
        [](const Array& data, std::size_t k, const std::string& input, const std::string& trunc, int q, double psi0,
           int threads) {
            Matrix x = to_matrix(data);
            PseudoSample ps;
            if (input == "raw")
                ps = rank_transform(x, k);
            else if (input == "inverted")
                ps = from_inverted_pareto(x);
            else
                throw py::value_error("input must be 'raw' or 'inverted'");
            FitOptions o;
            o.psi0 = psi0;
            o.threads = threads;
            if (trunc == "mbic")
                o.trunc_mode = TruncationMode::Mbic;
            else if (trunc == "auto")
                o.trunc_mode = TruncationMode::Auto;
            else if (trunc == "fixed") {
                o.trunc_mode = TruncationMode::Fixed;
                o.trunc_q = q;
            } else
                throw py::value_error("trunc must be 'mbic', 'auto' or 'fixed'");
            return report_to_json(fit_pipeline(ps, o)).dump();
        },
        py::arg("data"), py::arg("k") = 0, py::arg("input") = "raw", py::arg("trunc") = "mbic", py::arg("q") = 0,
        py::arg("psi0") = 0.9, py::arg("threads") = 1);
}
