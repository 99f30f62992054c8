#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "markovgp/gaussian.hpp"
#include "markovgp/io.hpp"
#include "markovgp/oracle.hpp"
#include "markovgp/posterior.hpp"
#include "markovgp/process.hpp"
#include "markovgp/verify.hpp"

namespace py = pybind11;
using namespace markovgp;

namespace {

// Sequential grid helper; keeps Python-supplied kernels GIL-safe.
std::pair<Eigen::VectorXd, Eigen::VectorXd> posterior_grid(const ProcessModel& model,
                                                           const NodePosterior& nodes,
                                                           const Dataset& data,
                                                           const Eigen::VectorXd& queries) {
    Eigen::VectorXd means(queries.size()), variances(queries.size());
    for (Eigen::Index i = 0; i < queries.size(); ++i) {
        const PosteriorPoint pt = evaluate_posterior(model, nodes, data, queries(i));
        means(i) = pt.mean;
        variances(i) = pt.variance;
    }
    return {means, variances};
}

} // namespace

PYBIND11_MODULE(_markovgp, m) {
    m.doc() = "Exact posterior inference for Gauss-Markov processes";

    py::register_exception<DimensionMismatch>(m, "DimensionMismatchError", PyExc_ValueError);
    py::register_exception<InvalidParameter>(m, "InvalidParameterError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<NotPSD>(m, "NotPSDError", PyExc_ArithmeticError);
    py::register_exception<SingularConditioning>(m, "SingularConditioningError",
                                                 PyExc_ArithmeticError);
    py::register_exception<DegenerateBracket>(m, "DegenerateBracketError", PyExc_ArithmeticError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    py::class_<GaussianVector>(m, "GaussianVector")
        .def(py::init<Eigen::VectorXd, Eigen::MatrixXd>(), py::arg("mean"), py::arg("cov"))
        .def_property_readonly("mean", &GaussianVector::mean)
        .def_property_readonly("cov", &GaussianVector::cov)
        .def_property_readonly("dim", &GaussianVector::dim);

    py::class_<PartitionedGaussian>(m, "PartitionedGaussian")
        .def(py::init<std::vector<Eigen::Index>, std::vector<Eigen::Index>, GaussianVector>(),
             py::arg("block1"), py::arg("block2"), py::arg("joint"))
        .def_static("contiguous", &PartitionedGaussian::contiguous, py::arg("joint"),
                    py::arg("n1"));

    py::class_<Conditioned>(m, "Conditioned")
        .def_readonly("dist", &Conditioned::dist)
        .def_readonly("jitter", &Conditioned::jitter);

    m.def("condition", &condition, py::arg("partitioned"), py::arg("observed"),
          "Conditional distribution of block1 given block2 = observed.");
    m.def(
        "cholesky_psd",
        [](const Eigen::MatrixXd& matrix) {
            const CholeskyFactor f = cholesky_psd(matrix);
            return py::make_tuple(f.factor, f.jitter);
        },
        py::arg("matrix"), "PSD-tolerant Cholesky factor; returns (L, jitter).");
    m.def("sample", &sample, py::arg("gaussian"), py::arg("count"), py::arg("seed"),
          "Deterministic iid draws, one per row.");

    py::class_<ProcessModel>(m, "ProcessModel")
        .def(py::init<ProcessModel::MeanFn, ProcessModel::CovFn>(), py::arg("mean"),
             py::arg("cov"))
        .def(py::init<ProcessModel::MeanFn, ProcessModel::CovFn, ProcessModel::VarFn>(),
             py::arg("mean"), py::arg("cov"), py::arg("var"))
        .def("mean", &ProcessModel::mean, py::arg("x"))
        .def("cov", &ProcessModel::cov, py::arg("x"), py::arg("xp"))
        .def("var", &ProcessModel::var, py::arg("x"))
        .def("gram", &ProcessModel::gram, py::arg("xs"));

    py::class_<BrownianMotionModel>(m, "BrownianMotionModel")
        .def(py::init<double, double, double, double>(), py::arg("mu0"), py::arg("mu"),
             py::arg("sigma0"), py::arg("sigma"))
        .def_readonly("mu0", &BrownianMotionModel::mu0)
        .def_readonly("mu", &BrownianMotionModel::mu)
        .def_readonly("sigma0", &BrownianMotionModel::sigma0)
        .def_readonly("sigma", &BrownianMotionModel::sigma)
        .def("mean", &BrownianMotionModel::mean, py::arg("x"))
        .def("cov", &BrownianMotionModel::cov, py::arg("x"), py::arg("xp"))
        .def("var", &BrownianMotionModel::var, py::arg("x"))
        .def("process", &BrownianMotionModel::process);

    m.def("brownian", &brownian, py::arg("mu0"), py::arg("mu"), py::arg("sigma0"),
          py::arg("sigma"), "Brownian-motion process model.");
    m.def(
        "validate_markov",
        [](const ProcessModel& model, const std::vector<std::array<double, 3>>& triples) {
            return validate_markov(model, triples);
        },
        py::arg("model"), py::arg("triples"),
        "Check the Gauss-Markov covariance factorization on (x, x', x'') triples.");
    m.def("sample_paths", &sample_paths, py::arg("model"), py::arg("grid"), py::arg("count"),
          py::arg("seed"), "Exact joint draws of the process at the grid, one row per path.");

    py::class_<Dataset>(m, "Dataset")
        .def(py::init<Eigen::VectorXd, Eigen::VectorXd, Eigen::MatrixXd>(), py::arg("xs"),
             py::arg("ys"), py::arg("error_cov"))
        .def_static("noise_free", &Dataset::noise_free, py::arg("xs"), py::arg("ys"))
        .def_static("iid_noise", &Dataset::iid_noise, py::arg("xs"), py::arg("ys"),
                    py::arg("noise_var"))
        .def_static("per_point_noise", &Dataset::per_point_noise, py::arg("xs"), py::arg("ys"),
                    py::arg("noise_sd"))
        .def_property_readonly("xs", &Dataset::xs)
        .def_property_readonly("ys", &Dataset::ys)
        .def_property_readonly("error_cov", &Dataset::error_cov)
        .def("__len__", &Dataset::size);

    py::class_<NodePosterior>(m, "NodePosterior")
        .def_readonly("mean", &NodePosterior::mean)
        .def_readonly("cov", &NodePosterior::cov)
        .def_readonly("jitter_used", &NodePosterior::jitter_used);

    py::enum_<PointCase>(m, "PointCase")
        .value("BELOW_FIRST", PointCase::BelowFirst)
        .value("INTERIOR", PointCase::Interior)
        .value("ABOVE_LAST", PointCase::AboveLast)
        .value("AT_NODE", PointCase::AtNode);

    py::class_<PosteriorPoint>(m, "PosteriorPoint")
        .def_readonly("x", &PosteriorPoint::x)
        .def_readonly("mean", &PosteriorPoint::mean)
        .def_readonly("variance", &PosteriorPoint::variance)
        .def_readonly("case", &PosteriorPoint::kind)
        .def_readonly("index", &PosteriorPoint::index);

    py::class_<TwoPointWeight>(m, "TwoPointWeight")
        .def_readonly("w", &TwoPointWeight::w)
        .def_readonly("denom", &TwoPointWeight::denom);

    m.def("node_posterior", &node_posterior, py::arg("model"), py::arg("data"),
          "Joint Gaussian posterior of the sampled node values.");
    m.def("weight_two_point", &weight_two_point, py::arg("model"), py::arg("x"), py::arg("xp"),
          py::arg("xpp"));
    m.def("cond_var_one", &cond_var_one, py::arg("model"), py::arg("x"), py::arg("xp"));
    m.def("cond_var_two", &cond_var_two, py::arg("model"), py::arg("x"), py::arg("xp"),
          py::arg("xpp"));
    m.def("evaluate_posterior", &evaluate_posterior, py::arg("model"), py::arg("nodes"),
          py::arg("data"), py::arg("x"), "Pointwise posterior mean and variance of f(x).");
    m.def("evaluate_brownian_fast", &evaluate_brownian_fast, py::arg("model"), py::arg("nodes"),
          py::arg("data"), py::arg("x"));
    m.def("posterior_grid", &posterior_grid, py::arg("model"), py::arg("nodes"), py::arg("data"),
          py::arg("queries"), "Posterior means and variances over an array of query points.");
    m.def("bridge_moments", &bridge_moments, py::arg("mu1"), py::arg("mu2"), py::arg("s1"),
          py::arg("s2"), py::arg("rho"), py::arg("x1"), py::arg("x2"), py::arg("sigma"),
          py::arg("x"), "Mean and variance of a generalized Brownian bridge at x.");
    m.def(
        "confidence_band",
        [](const PosteriorPoint& pt, double level) { return confidence_band(pt, level); },
        py::arg("point"), py::arg("level"));
    m.def("normal_quantile", &normal_quantile, py::arg("p"));

    py::class_<PointMoments>(m, "PointMoments")
        .def_readonly("mean", &PointMoments::mean)
        .def_readonly("variance", &PointMoments::variance);

    py::class_<McMseResult>(m, "McMseResult")
        .def_readonly("mse", &McMseResult::mse)
        .def_readonly("std_error", &McMseResult::std_error)
        .def_readonly("trials", &McMseResult::trials);

    m.def(
        "dense_oracle",
        [](const ProcessModel& model, const Dataset& data, const std::vector<double>& queries) {
            return dense_oracle(model, data, queries);
        },
        py::arg("model"), py::arg("data"), py::arg("queries"),
        "Ground-truth moments by one dense joint conditioning.");
    m.def("mc_mse", &mc_mse, py::arg("model"), py::arg("xs"), py::arg("error_cov"), py::arg("x"),
          py::arg("trials"), py::arg("seed"),
          "Empirical MSE of the posterior mean over simulated datasets.");
    m.def(
        "noise_free_mse",
        [](double sigma, const std::vector<double>& xs, double x) {
            return noise_free_mse(sigma, xs, x);
        },
        py::arg("sigma"), py::arg("xs"), py::arg("x"));

    m.attr("__version__") = "0.1.0";
}
