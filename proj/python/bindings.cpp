#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cstring>
#include <optional>
#include <string>

#include "tenfac/evaluation.hpp"
#include "tenfac/io.hpp"
#include "tenfac/rank.hpp"

namespace py = pybind11;
using namespace tenfac;

namespace {

// Arrays cross the boundary with shape (p_1, ..., p_K, T) in Fortran order,
// which is exactly the in-memory layout of a TensorSeries.
using FArray = py::array_t<double, py::array::f_style | py::array::forcecast>;

TensorSeries to_series(const FArray& a) {
    if (a.ndim() < 2) {
        throw std::domain_error("expected an array with a time axis and at least one mode");
    }
    Shape shape;
    for (py::ssize_t d = 0; d + 1 < a.ndim(); ++d) {
        shape.push_back(static_cast<Index>(a.shape(d)));
    }
    const Index T = static_cast<Index>(a.shape(a.ndim() - 1));
    TensorSeries x(shape, T);
    const auto n = static_cast<std::size_t>(shape_size(shape));
    for (Index t = 0; t < T; ++t) {
        std::memcpy(x[t].data().data(), a.data() + static_cast<std::size_t>(t) * n, n * sizeof(double));
    }
    return x;
}

FArray from_series(const TensorSeries& x) {
    std::vector<py::ssize_t> dims(x.shape().begin(), x.shape().end());
    dims.push_back(static_cast<py::ssize_t>(x.length()));
    FArray out(dims);
    const auto n = static_cast<std::size_t>(shape_size(x.shape()));
    for (Index t = 0; t < x.length(); ++t) {
        std::memcpy(out.mutable_data() + static_cast<std::size_t>(t) * n, x[t].data().data(), n * sizeof(double));
    }
    return out;
}

DenseTensor to_tensor(const FArray& a) {
    Shape shape;
    for (py::ssize_t d = 0; d < a.ndim(); ++d) {
        shape.push_back(static_cast<Index>(a.shape(d)));
    }
    return DenseTensor(shape, std::vector<double>(a.data(), a.data() + a.size()));
}

FArray from_tensor(const DenseTensor& x) {
    FArray out(std::vector<py::ssize_t>(x.shape().begin(), x.shape().end()));
    std::copy(x.data().begin(), x.data().end(), out.mutable_data());
    return out;
}

RankOptions rank_options(Index r_max, std::optional<double> c, const std::string& penalty, int sweeps,
                         bool update_from_projected) {
    RankOptions o;
    o.r_max = r_max;
    o.c = c;
    if (penalty == "mean") {
        o.penalty = PenaltyConstant::mean_eigenvalue;
    } else if (penalty == "sum") {
        o.penalty = PenaltyConstant::eigenvalue_sum;
    } else {
        throw std::domain_error("penalty must be 'mean' or 'sum'");
    }
    o.max_sweeps = sweeps;
    o.update_from_projected = update_from_projected;
    return o;
}

} // namespace

PYBIND11_MODULE(_tenfac, m) {
    m.doc() = "Native core of the tenfac package.";

    py::register_exception<ResourceError>(m, "ResourceError", PyExc_MemoryError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    m.def("unfold", [](const FArray& x, std::size_t k) { return mode_unfold(to_tensor(x), k); }, py::arg("x"),
          py::arg("mode"));
    m.def(
        "fold",
        [](const Matrix& u, std::size_t k, const Shape& shape) { return from_tensor(mode_fold(u, k, shape)); },
        py::arg("matrix"), py::arg("mode"), py::arg("shape"));
    m.def(
        "mode_product", [](const FArray& x, std::size_t k, const Matrix& a) { return from_tensor(mode_product(to_tensor(x), k, a)); },
        py::arg("x"), py::arg("mode"), py::arg("matrix"));
    m.def("loading_distance", &loading_distance, py::arg("a_hat"), py::arg("a"));

    m.def(
        "fit",
        [](const FArray& data, const Shape& ranks, const std::string& estimator, double tol, Index star_cap,
           bool center, bool scale) {
            const TensorSeries x = to_series(data);
            FitOptions o;
            o.estimator = EstimatorSpec::parse(estimator);
            o.tol = tol;
            o.star_cap = star_cap;
            o.center = center;
            o.scale = scale;
            TfmFit f;
            {
                py::gil_scoped_release release;
                f = fit(x, ranks, o);
            }
            py::dict out;
            out["loadings"] = f.loadings.loadings;
            out["eigenvalues"] = f.loadings.eigenvalues;
            out["factors"] = from_series(f.factors);
            out["common"] = from_series(estimate_common_components(f));
            out["estimator"] = f.estimator.tag();
            out["iterations"] = f.iterations_used;
            return out;
        },
        py::arg("data"), py::arg("ranks"), py::arg("estimator") = "pe", py::arg("tol") = 1e-6,
        py::arg("star_cap") = 4096, py::arg("center") = false, py::arg("scale") = false);

    m.def(
        "select_ranks",
        [](const FArray& data, const std::string& method, Index r_max, std::optional<double> c,
           const std::string& penalty, int sweeps, bool update_from_projected) {
            const TensorSeries x = to_series(data);
            const auto o = rank_options(r_max, c, penalty, sweeps, update_from_projected);
            RankEstimate r;
            {
                py::gil_scoped_release release;
                if (method == "pe-er") {
                    r = pe_er(x, o);
                } else if (method == "ie-er") {
                    r = ie_er(x, o);
                } else {
                    throw std::domain_error("method must be 'pe-er' or 'ie-er'");
                }
            }
            py::dict out;
            out["ranks"] = r.ranks;
            out["ratio_traces"] = r.ratio_traces;
            out["iterations"] = r.iterations;
            out["converged"] = r.converged;
            return out;
        },
        py::arg("data"), py::arg("method") = "pe-er", py::arg("r_max") = 8, py::arg("c") = std::nullopt,
        py::arg("penalty") = "mean", py::arg("sweeps") = 10, py::arg("update_from_projected") = false);

    m.def(
        "simulate",
        [](const Shape& dims, const Shape& ranks, Index T, double phi, double psi, std::uint64_t seed,
           std::uint64_t rep, double noise_scale) {
            DgpConfig c{dims, ranks, T, phi, psi, seed, rep, noise_scale};
            const auto d = generate(c);
            py::dict out;
            out["x"] = from_series(d.x);
            out["loadings"] = d.true_loadings.loadings;
            out["factors"] = from_series(d.true_factors);
            out["common"] = from_series(d.true_common);
            return out;
        },
        py::arg("dims"), py::arg("ranks"), py::arg("T"), py::arg("phi") = 0.1, py::arg("psi") = 0.1,
        py::arg("seed") = 0, py::arg("rep") = 0, py::arg("noise_scale") = 1.0);

    m.def("preset", [](const std::string& name) {
        const auto& p = preset(name);
        py::dict out;
        out["dims"] = p.dims;
        out["ranks"] = p.ranks;
        out["phi"] = p.phi;
        out["psi"] = p.psi;
        out["Ts"] = p.Ts;
        return out;
    });

    m.def(
        "rolling_validate",
        [](const FArray& data, const Shape& ranks, Index window, Index period, const std::string& estimator,
           double tol) {
            FitOptions o;
            o.estimator = EstimatorSpec::parse(estimator);
            o.tol = tol;
            py::list out;
            for (const auto& f : rolling_validate(to_series(data), ranks, window, period, o)) {
                py::dict d;
                d["fold"] = f.fold + 1;
                d["train"] = py::make_tuple(f.train_begin, f.train_end);
                d["test"] = py::make_tuple(f.test_begin, f.test_end);
                d["mse"] = f.mse;
                out.append(d);
            }
            return out;
        },
        py::arg("data"), py::arg("ranks"), py::arg("window"), py::arg("period"), py::arg("estimator") = "pe",
        py::arg("tol") = 1e-6);

    m.def(
        "benchmark",
        [](const std::string& setting, const std::vector<Index>& Ts, const std::vector<std::string>& estimators,
           Index reps, std::uint64_t seed, unsigned threads, Index r_max) {
            BenchmarkOptions o;
            o.setting = preset(setting);
            o.Ts = Ts;
            for (const auto& e : estimators) {
                o.estimators.push_back(EstimatorSpec::parse(e));
            }
            o.replications = reps;
            o.base_seed = seed;
            o.threads = threads;
            o.r_max = r_max;
            BenchmarkReport r;
            {
                py::gil_scoped_release release;
                r = run_benchmark(o);
            }
            return benchmark_csv(r);
        },
        py::arg("setting"), py::arg("Ts") = std::vector<Index>{}, py::arg("estimators") = std::vector<std::string>{"ie", "pe"},
        py::arg("reps") = 100, py::arg("seed") = 0, py::arg("threads") = 0, py::arg("r_max") = 0);

    m.def("read_tsr", [](const std::string& path) { return from_series(read_tsr(path)); }, py::arg("path"));
    m.def(
        "write_tsr", [](const FArray& data, const std::string& path) { write_tsr(to_series(data), path); },
        py::arg("data"), py::arg("path"));
}
