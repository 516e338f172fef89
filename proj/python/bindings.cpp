#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "spca/errors.h"
#include "spca/matrix_io.h"
#include "spca/model_io.h"
#include "spca/pc_model.h"
#include "spca/spiked.h"

namespace py = pybind11;

namespace
{

spca::StandardizeMode mode_from(const std::string& mode) { return spca::parse_standardize_mode(mode); }

spca::RescaleOptions rescale_options(double tol, int max_iter, std::optional<double> gamma)
{
    spca::RescaleOptions options;
    options.tol = tol;
    options.max_iter = max_iter;
    options.gamma = gamma;
    return options;
}

}  // namespace

PYBIND11_MODULE(_spca, m)
{
    m.doc() = "Spiked-covariance PCA with shrinkage-adjusted prediction scores";

    // Translators run most-recent first, so register bases before subclasses.
    auto error = py::register_exception<spca::Error>(m, "Error");
    auto input_error = py::register_exception<spca::InputError>(m, "InputError", error);
    auto numerical = py::register_exception<spca::NumericalFailure>(m, "NumericalFailure", error);
    py::register_exception<spca::DimensionError>(m, "DimensionError", input_error);
    py::register_exception<spca::DomainError>(m, "DomainError", input_error);
    py::register_exception<spca::FormatError>(m, "FormatError", input_error);
    py::register_exception<spca::ParseError>(m, "ParseError", input_error);
    py::register_exception<spca::NotIdentifiable>(m, "NotIdentifiable", numerical);
    py::register_exception<spca::DegenerateVariable>(m, "DegenerateVariable", numerical);

    m.def("rho", &spca::rho, py::arg("lam"), py::arg("gamma"));
    m.def("rho_inverse", &spca::rho_inverse, py::arg("d"), py::arg("gamma"));
    m.def("eigenvector_angle", &spca::eigenvector_angle, py::arg("lam"), py::arg("gamma"));
    m.def("score_angle", &spca::score_angle, py::arg("lam"), py::arg("gamma"));
    m.def("shrinkage_factor", &spca::shrinkage_factor, py::arg("lam"), py::arg("gamma"));
    m.def("adjustment_factor", &spca::adjustment_factor, py::arg("d_hat"), py::arg("gamma"));
    m.def("phase_threshold", &spca::phase_threshold, py::arg("gamma"));
    m.def("spike_detection_edge", &spca::spike_detection_edge, py::arg("gamma"));
    m.def(
        "mp_edges", [](double gamma) { auto e = spca::mp_edges(gamma); return std::make_pair(e.a, e.b); },
        py::arg("gamma"));
    m.def("mp_integral", &spca::mp_integral, py::arg("f"), py::arg("gamma"),
          "Integral of f against the Marchenko-Pastur law (continuous part).");

    py::class_<spca::RescaledSpectrum>(m, "RescaledSpectrum")
        .def_readonly("d_hat", &spca::RescaledSpectrum::d_hat)
        .def_readonly("lambda_hat", &spca::RescaledSpectrum::lambda_hat)
        .def_readonly("r", &spca::RescaledSpectrum::r)
        .def_readonly("k", &spca::RescaledSpectrum::k)
        .def_readonly("tau", &spca::RescaledSpectrum::tau)
        .def_readonly("gamma", &spca::RescaledSpectrum::gamma)
        .def_readonly("iterations", &spca::RescaledSpectrum::iterations)
        .def_readonly("converged", &spca::RescaledSpectrum::converged)
        .def_readonly("used_bisection", &spca::RescaledSpectrum::used_bisection);

    m.def(
        "rescale_eigenvalues",
        [](const Eigen::VectorXd& d, Eigen::Index p, Eigen::Index n, double tol, int max_iter,
           std::optional<double> gamma) { return spca::rescale_eigenvalues(d, p, n, rescale_options(tol, max_iter, gamma)); },
        py::arg("d"), py::arg("p"), py::arg("n"), py::arg("tol") = 1e-10, py::arg("max_iter") = 500,
        py::arg("gamma") = py::none());

    m.def(
        "sample_eigenvalues", [](const Eigen::MatrixXd& x) { return spca::sample_eigenvalues(spca::DataMatrix(x)); },
        py::arg("x"));

    m.def(
        "standardize",
        [](const Eigen::MatrixXd& x, const std::string& mode)
        {
            auto [z, prep] = spca::standardize(spca::DataMatrix(x), mode_from(mode));
            return py::make_tuple(Eigen::MatrixXd(z.values()), prep.means, prep.scales);
        },
        py::arg("x"), py::arg("mode") = "center");

    py::class_<spca::ComponentEstimate>(m, "ComponentEstimate")
        .def_readonly("spike", &spca::ComponentEstimate::spike)
        .def_readonly("shrinkage", &spca::ComponentEstimate::shrinkage)
        .def_readonly("adjustment", &spca::ComponentEstimate::adjustment)
        .def_readonly("eigvec_angle", &spca::ComponentEstimate::eigvec_angle)
        .def_readonly("score_angle", &spca::ComponentEstimate::score_angle);

    py::class_<spca::FittedPcModel>(m, "FittedPcModel")
        .def_property_readonly("p", &spca::FittedPcModel::p)
        .def_property_readonly("n", &spca::FittedPcModel::n)
        .def_property_readonly("k", &spca::FittedPcModel::k)
        .def_property_readonly("gamma", &spca::FittedPcModel::gamma)
        .def_readonly("k_spikes", &spca::FittedPcModel::k_spikes)
        .def_readonly("spectrum", &spca::FittedPcModel::spectrum)
        .def_readonly("components", &spca::FittedPcModel::components)
        .def_property_readonly("mode", [](const spca::FittedPcModel& f) { return std::string(spca::to_string(f.prep.mode)); })
        .def_property_readonly("means", [](const spca::FittedPcModel& f) { return f.prep.means; })
        .def_property_readonly("scales", [](const spca::FittedPcModel& f) { return f.prep.scales; })
        .def_property_readonly("eigenvalues", [](const spca::FittedPcModel& f) { return f.eig.d; })
        .def_property_readonly("eigenvectors", [](const spca::FittedPcModel& f) { return f.eig.u; })
        .def("__repr__",
             [](const spca::FittedPcModel& f)
             {
                 return "<FittedPcModel p=" + std::to_string(f.p()) + " n=" + std::to_string(f.n()) +
                        " k=" + std::to_string(f.k()) + " k_spikes=" + std::to_string(f.k_spikes) + ">";
             });

    m.def(
        "fit",
        [](const Eigen::MatrixXd& x, const std::string& mode, std::optional<Eigen::Index> k, double tol, int max_iter)
        {
            spca::FitOptions options;
            options.mode = mode_from(mode);
            options.k = k;
            options.rescale = rescale_options(tol, max_iter, std::nullopt);
            return spca::fit(spca::DataMatrix(x), options);
        },
        py::arg("x"), py::arg("mode") = "center", py::arg("k") = py::none(), py::arg("tol") = 1e-10,
        py::arg("max_iter") = 500, "Fit on a p x n matrix whose columns are samples.");

    py::class_<spca::PredictionScores>(m, "PredictionScores")
        .def_readonly("naive", &spca::PredictionScores::naive)
        .def_readonly("adjusted", &spca::PredictionScores::adjusted)
        .def_readonly("identifiable", &spca::PredictionScores::identifiable);

    m.def(
        "predict", [](const spca::FittedPcModel& model, const Eigen::MatrixXd& x_new) { return spca::predict(model, x_new); },
        py::arg("model"), py::arg("x_new"));
    m.def(
        "training_scores",
        [](const spca::FittedPcModel& model, const Eigen::MatrixXd& x)
        { return spca::training_scores(model, spca::DataMatrix(x)); },
        py::arg("model"), py::arg("x"));

    py::class_<spca::JackknifeResult>(m, "JackknifeResult")
        .def_readonly("shrinkage", &spca::JackknifeResult::shrinkage)
        .def_readonly("used", &spca::JackknifeResult::used)
        .def_readonly("excluded", &spca::JackknifeResult::excluded);

    m.def(
        "jackknife_shrinkage",
        [](const Eigen::MatrixXd& x, Eigen::Index component, const std::string& mode)
        {
            py::gil_scoped_release release;
            return spca::jackknife_shrinkage(spca::DataMatrix(x), mode_from(mode), component);
        },
        py::arg("x"), py::arg("component") = 0, py::arg("mode") = "center");

    m.def(
        "save_model", [](const spca::FittedPcModel& model, const std::filesystem::path& path) { spca::write_model(path, model); },
        py::arg("model"), py::arg("path"));
    m.def(
        "load_model", [](const std::filesystem::path& path) { return spca::read_model(path); }, py::arg("path"));
}
