#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gpderiv/effective_dims.hpp"
#include "gpderiv/experiments.hpp"
#include "gpderiv/selection.hpp"

namespace py = pybind11;
using namespace gpderiv;

namespace {

FunctionSpace space_from_args(const std::string& kind, double param) {
  if (kind == "holder") return FunctionSpace::holder(param);
  if (kind == "analytic") return FunctionSpace::analytic(param);
  throw ContractError("space must be 'holder' or 'analytic'");
}

EigenSequence eigenseq_from_args(const std::string& decay, double param, double scale,
                                 const std::vector<double>& values) {
  if (decay == "polynomial") return EigenSequence::polynomial(param, scale);
  if (decay == "exponential") return EigenSequence::exponential(param, scale);
  if (decay == "explicit") return EigenSequence::explicit_values(values);
  throw ContractError("decay must be 'polynomial', 'exponential' or 'explicit'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact GP regression with derivative posteriors, empirical Bayes "
            "tuning, effective-dimension diagnostics and simulation studies.";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<CapabilityError>(m, "CapabilityError", PyExc_ValueError);
  py::register_exception<UnsupportedKernelError>(m, "UnsupportedKernelError", PyExc_TypeError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception<SelectionError>(m, "SelectionError", PyExc_RuntimeError);

  py::class_<Rng>(m, "Rng")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def_static("stream", &Rng::stream, py::arg("master_seed"), py::arg("index"))
      .def("uniform", &Rng::next_uniform)
      .def("normal", &Rng::next_normal);

  py::class_<EigenSequence>(m, "EigenSequence")
      .def(py::init([](const std::string& decay, double param, double scale,
                       const std::vector<double>& values) {
             return eigenseq_from_args(decay, param, scale, values);
           }),
           py::arg("decay"), py::arg("param") = 0.0, py::arg("scale") = 1.0,
           py::arg("values") = std::vector<double>{})
      .def("mu", &EigenSequence::mu, py::arg("i"))
      .def("__repr__", &EigenSequence::describe);

  py::class_<KernelSpec>(m, "KernelSpec")
      .def_static("matern", [](double nu) { return KernelSpec::matern(nu); }, py::arg("nu"))
      .def_static("squared_exponential", [] { return KernelSpec::squared_exponential(); })
      .def_static("sobolev2", &KernelSpec::sobolev2)
      .def_static(
          "spectral",
          [](const std::string& basis, const EigenSequence& eig, std::int64_t truncation) {
            return KernelSpec::spectral(parse_basis(basis), eig, truncation);
          },
          py::arg("basis"), py::arg("eigenvalues"), py::arg("truncation") = 2000)
      .def_property_readonly("max_deriv_order", &KernelSpec::max_deriv_order)
      .def_property_readonly("spectral_tail_bound", &KernelSpec::spectral_tail_bound)
      .def("__repr__", &KernelSpec::describe);

  m.def("eval", &eval, py::arg("kernel"), py::arg("x"), py::arg("xp"));
  m.def("eval_deriv", &eval_deriv, py::arg("kernel"), py::arg("jx"), py::arg("jxp"),
        py::arg("x"), py::arg("xp"));
  m.def("gram", &gram, py::arg("kernel"), py::arg("x"), py::arg("jx") = 0, py::arg("jxp") = 0);
  m.def("cross_gram", &cross_gram, py::arg("kernel"), py::arg("a"), py::arg("b"),
        py::arg("ja") = 0, py::arg("jb") = 0);
  m.def("equivalent_kernel", &equivalent_kernel, py::arg("kernel"), py::arg("lambda_"));

  py::class_<SeriesFunction>(m, "SeriesFunction")
      .def(py::init([](const std::string& basis, const Vector& coeffs) {
             return SeriesFunction{parse_basis(basis), coeffs};
           }),
           py::arg("basis"), py::arg("coeffs"))
      .def_property_readonly("coeffs", [](const SeriesFunction& f) { return f.coeffs; })
      .def_property_readonly("basis", [](const SeriesFunction& f) { return basis_name(f.basis); });

  m.def("series_eval", &series_eval, py::arg("f"), py::arg("k"), py::arg("x"));
  m.def("series_eval_grid", &series_eval_grid, py::arg("f"), py::arg("k"), py::arg("grid"));
  m.def("f_lambda", &f_lambda, py::arg("f0"), py::arg("eigenvalues"), py::arg("lambda_"));
  m.def(
      "space_norm",
      [](const SeriesFunction& f, const std::string& kind, double param) {
        return space_norm(f, space_from_args(kind, param));
      },
      py::arg("f"), py::arg("space"), py::arg("param"));

  py::class_<EffectiveDims>(m, "EffectiveDims")
      .def_readonly("lambda_", &EffectiveDims::lambda)
      .def_readonly("kappa_tilde_sq", &EffectiveDims::kappa_tilde_sq)
      .def_readonly("kappa_tilde_sq_bound", &EffectiveDims::kappa_tilde_sq_bound)
      .def_readonly("kappa_hat_01_sq", &EffectiveDims::kappa_hat_01_sq)
      .def_readonly("hat01_diverged", &EffectiveDims::hat01_diverged)
      .def_readonly("kappa_tilde_kk_sq", &EffectiveDims::kappa_tilde_kk_sq)
      .def_readonly("kappa_tilde_kk_bound", &EffectiveDims::kappa_tilde_kk_bound)
      .def_readonly("kappa_tilde_diverged", &EffectiveDims::kappa_tilde_diverged)
      .def_readonly("kappa_hat_k1_sq", &EffectiveDims::kappa_hat_k1_sq)
      .def_readonly("kappa_hat_diverged", &EffectiveDims::kappa_hat_diverged)
      .def_readonly("truncation", &EffectiveDims::truncation)
      .def_readonly("tail_bound", &EffectiveDims::tail_bound);

  m.def(
      "effective_dims",
      [](const EigenSequence& eig, const std::string& basis, double lambda,
         const std::set<int>& orders, int grid_size) {
        EffectiveDimsOptions opts;
        opts.grid_size = grid_size;
        return effective_dims(eig, parse_basis(basis), lambda, orders, opts);
      },
      py::arg("eigenvalues"), py::arg("basis"), py::arg("lambda_"),
      py::arg("orders") = std::set<int>{0}, py::arg("grid_size") = 1001);

  m.def("bound_constant", &bound_constant, py::arg("n"), py::arg("kappa_tilde"));

  py::class_<RateSchedule>(m, "RateSchedule")
      .def_readonly("lambda_n", &RateSchedule::lambda_n)
      .def_readonly("eps_n", &RateSchedule::eps_n)
      .def_readonly("derivative_guarantee", &RateSchedule::derivative_guarantee);

  m.def(
      "rate_schedule",
      [](const std::string& kind, double param, int k, int n) {
        return rate_schedule(space_from_args(kind, param), k, n);
      },
      py::arg("space"), py::arg("param"), py::arg("k"), py::arg("n"));

  py::class_<Dataset>(m, "Dataset")
      .def(py::init([](const Vector& x, const Vector& y) { return Dataset{x, y}; }),
           py::arg("x"), py::arg("y"))
      .def_property_readonly("x", [](const Dataset& d) { return d.x; })
      .def_property_readonly("y", [](const Dataset& d) { return d.y; });

  py::class_<FittedGP>(m, "FittedGP")
      .def_property_readonly("lambda_", &FittedGP::lambda)
      .def_property_readonly("sigma2", &FittedGP::sigma2)
      .def_property_readonly("weights", &FittedGP::weights)
      .def("posterior_mean", py::overload_cast<int, double>(&FittedGP::posterior_mean, py::const_),
           py::arg("k"), py::arg("x"))
      .def("posterior_mean_grid", &FittedGP::posterior_mean_grid, py::arg("k"), py::arg("grid"))
      .def("posterior_cov", &FittedGP::posterior_cov, py::arg("k"), py::arg("x"), py::arg("xp"))
      .def("posterior_cov_grid", &FittedGP::posterior_cov_grid, py::arg("k"), py::arg("grid"));

  m.def("fit", &fit, py::arg("kernel"), py::arg("data"), py::arg("lambda_"), py::arg("sigma2"));
  m.def("krr_check", &krr_check, py::arg("kernel"), py::arg("data"), py::arg("lambda_"),
        py::arg("grid"));
  m.def("variance_bias_discrepancy", &variance_bias_discrepancy, py::arg("kernel"),
        py::arg("data"), py::arg("lambda_"), py::arg("grid"));
  m.def("sample_paths", &sample_paths, py::arg("fit"), py::arg("k"), py::arg("grid"),
        py::arg("m"), py::arg("rng"));
  m.def(
      "credible_band",
      [](const FittedGP& gp, int k, const Vector& grid, double level, int count, Rng& rng) {
        const CredibleBand band = credible_band(gp, k, grid, level, count, rng);
        return py::make_tuple(band.center, band.radius);
      },
      py::arg("fit"), py::arg("k"), py::arg("grid"), py::arg("level"), py::arg("m"),
      py::arg("rng"));

  py::class_<ScoreEntry>(m, "ScoreEntry")
      .def_readonly("nu", &ScoreEntry::nu)
      .def_readonly("lambda_", &ScoreEntry::lambda)
      .def_readonly("score", &ScoreEntry::score);

  py::class_<SelectionResult>(m, "SelectionResult")
      .def_readonly("lambda_", &SelectionResult::lambda)
      .def_readonly("sigma2", &SelectionResult::sigma2)
      .def_readonly("nu", &SelectionResult::nu)
      .def_readonly("trace", &SelectionResult::trace)
      .def_readonly("warnings", &SelectionResult::warnings);

  m.def("log_marginal_likelihood", &log_marginal_likelihood, py::arg("kernel"), py::arg("data"),
        py::arg("lambda_"), py::arg("sigma2"));
  m.def("mmle_sigma2", &mmle_sigma2, py::arg("kernel"), py::arg("data"), py::arg("lambda_"));
  m.def("select_lambda", &select_lambda, py::arg("kernel"), py::arg("data"),
        py::arg("lambda_grid"));
  m.def("loocv_select", &loocv_select, py::arg("data"), py::arg("nu_candidates"),
        py::arg("lambda_grid"));
  m.def("default_lambda_grid", &default_lambda_grid);

  m.def("true_target", &true_target, py::arg("k"), py::arg("x"));
  m.def("simulate_dataset", &simulate_dataset, py::arg("n"), py::arg("sigma0_sq"),
        py::arg("rng"));
  m.def("rmse", &rmse, py::arg("estimate"), py::arg("truth"));
  m.def(
      "contraction_probe",
      [](const FittedGP& gp, int k, const Vector& grid, const Vector& truth,
         const std::string& norm, double radius, int m_draws, Rng& rng) {
        return contraction_probe(gp, k, grid, truth,
                                 norm == "linf" ? ProbeNorm::Linf : ProbeNorm::L2, radius,
                                 m_draws, rng);
      },
      py::arg("fit"), py::arg("k"), py::arg("grid"), py::arg("truth"), py::arg("norm"),
      py::arg("radius"), py::arg("m"), py::arg("rng"));

  py::class_<StudyCell>(m, "StudyCell")
      .def_readonly("method", &StudyCell::method)
      .def_readonly("n", &StudyCell::n)
      .def_readonly("order", &StudyCell::order)
      .def_readonly("mean_rmse", &StudyCell::mean_rmse)
      .def_readonly("median_rmse", &StudyCell::median_rmse)
      .def_readonly("se", &StudyCell::se)
      .def_readonly("reps", &StudyCell::reps)
      .def_readonly("failures", &StudyCell::failures);

  m.def(
      "replicate_study",
      [](const std::vector<int>& n_values, int replications,
         const std::vector<std::string>& methods, double sigma0_sq, std::uint64_t seed,
         const std::vector<int>& orders, int grid_points, int threads) {
        StudyConfig config;
        config.n_values = n_values;
        config.replications = replications;
        for (const auto& name : methods) config.methods.push_back(MethodSpec::parse(name));
        config.sigma0_sq = sigma0_sq;
        config.seed = seed;
        config.derivative_orders = orders;
        config.grid_points = grid_points;
        config.threads = threads;
        return replicate_study(config).cells;
      },
      py::arg("n_values"), py::arg("replications"), py::arg("methods"),
      py::arg("sigma0_sq") = 0.1, py::arg("seed") = 0,
      py::arg("orders") = std::vector<int>{0, 1}, py::arg("grid_points") = 100,
      py::arg("threads") = 0);

  m.def(
      "rate_study",
      [](const std::string& kind, double param, const std::vector<int>& orders,
         const std::vector<int>& n_values, int replications, double sigma0_sq,
         double kernel_scale, std::uint64_t seed, int threads) {
        RateStudyConfig config;
        config.space = space_from_args(kind, param);
        config.orders = orders;
        config.n_values = n_values;
        config.replications = replications;
        config.sigma0_sq = sigma0_sq;
        config.kernel_scale = kernel_scale;
        config.seed = seed;
        config.threads = threads;
        const RateStudyResult result = rate_study(config);
        py::dict out;
        for (const auto& c : result.curves) {
          py::dict entry;
          entry["slope"] = c.slope;
          entry["theory_slope"] = c.theory_slope;
          entry["medians"] = c.medians;
          out[py::int_(c.order)] = entry;
        }
        return out;
      },
      py::arg("space"), py::arg("param"), py::arg("orders"), py::arg("n_values"),
      py::arg("replications"), py::arg("sigma0_sq") = 0.1, py::arg("kernel_scale") = 10.0,
      py::arg("seed") = 0, py::arg("threads") = 0);
}
