#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "sirdc/calibration.hpp"
#include "sirdc/cli.hpp"
#include "sirdc/epi_metrics.hpp"
#include "sirdc/error.hpp"
#include "sirdc/evaluation.hpp"
#include "sirdc/forecast.hpp"
#include "sirdc/gp.hpp"
#include "sirdc/model.hpp"
#include "sirdc/synthetic.hpp"
#include "sirdc/transmission.hpp"

namespace py = pybind11;
using namespace sirdc;

namespace {

std::vector<std::string> date_strings(const std::vector<Date>& dates) {
  std::vector<std::string> out;
  out.reserve(dates.size());
  for (Date d : dates) out.push_back(format_date(d));
  return out;
}

std::vector<std::string> level_strings(const std::vector<RiskLevel>& levels) {
  std::vector<std::string> out;
  for (RiskLevel l : levels) out.emplace_back(to_string(l));
  return out;
}

}  // namespace

PYBIND11_MODULE(_sirdc, m) {
  m.doc() = "County-level SIRDC modelling and death forecasting";

  // Later registrations are tried first, so the base class goes in before its subclasses.
  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](double gamma, double theta, double delta, double population) {
             return ModelParams{gamma, theta, delta, population};
           }),
           py::arg("gamma") = 0.2, py::arg("theta") = 0.1, py::arg("delta") = 0.0066, py::arg("population") = 1.0)
      .def_readwrite("gamma", &ModelParams::gamma)
      .def_readwrite("theta", &ModelParams::theta)
      .def_readwrite("delta", &ModelParams::delta)
      .def_readwrite("population", &ModelParams::population)
      .def("validate", &ModelParams::validate);

  py::class_<CompartmentState>(m, "CompartmentState")
      .def(py::init([](double s, double i, double r, double d, double c, int day) {
             CompartmentState st;
             st.s = s, st.i = i, st.r = r, st.d = d, st.c = c, st.day = day;
             return st;
           }),
           py::arg("s"), py::arg("i"), py::arg("r") = 0.0, py::arg("d") = 0.0, py::arg("c") = 0.0,
           py::arg("day") = 1)
      .def_readwrite("s", &CompartmentState::s)
      .def_readwrite("i", &CompartmentState::i)
      .def_readwrite("r", &CompartmentState::r)
      .def_readwrite("d", &CompartmentState::d)
      .def_readwrite("c", &CompartmentState::c)
      .def_readwrite("day", &CompartmentState::day)
      .def("total", &CompartmentState::total);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("states", &Trajectory::states)
      .def_readonly("betas", &Trajectory::betas)
      .def("__len__", &Trajectory::size)
      .def_property_readonly("susceptible", &Trajectory::susceptible)
      .def_property_readonly("infectious", &Trajectory::infectious)
      .def_property_readonly("resolving", &Trajectory::resolving)
      .def_property_readonly("deceased", &Trajectory::deceased)
      .def_property_readonly("recovered", &Trajectory::recovered);

  m.def("forward_step", &forward_step, py::arg("state"), py::arg("beta"), py::arg("params"));
  m.def(
      "simulate_forward",
      [](const CompartmentState& initial, const std::vector<double>& betas, const ModelParams& params) {
        return simulate_forward(initial, betas, params);
      },
      py::arg("initial"), py::arg("betas"), py::arg("params"));
  m.def("rk4_reference", &rk4_reference, py::arg("initial"), py::arg("beta_fn"), py::arg("params"),
        py::arg("horizon"), py::arg("step") = 0.1);

  py::class_<BetaRecovery>(m, "BetaRecovery")
      .def_readonly("betas", &BetaRecovery::betas)
      .def_readonly("infectious", &BetaRecovery::infectious)
      .def_readonly("residuals", &BetaRecovery::residuals);
  m.def(
      "recover_beta_series",
      [](const std::vector<double>& s, double i1, const ModelParams& params) {
        return recover_beta_series(s, i1, params);
      },
      py::arg("susceptibles"), py::arg("i1"), py::arg("params"));

  py::class_<CountyData>(m, "CountyData")
      .def(py::init([](std::string region_id, std::string day_one, std::vector<double> confirmed,
                       std::vector<double> deaths, std::vector<double> positivity, double population) {
             CountyData d;
             d.region_id = std::move(region_id);
             d.day_one = parse_date(day_one);
             d.cumulative_confirmed = std::move(confirmed);
             d.cumulative_deaths = std::move(deaths);
             d.positivity = std::move(positivity);
             d.population = population;
             return d;
           }),
           py::arg("region_id"), py::arg("day_one"), py::arg("cumulative_confirmed"),
           py::arg("cumulative_deaths"), py::arg("positivity"), py::arg("population"))
      .def_readwrite("region_id", &CountyData::region_id)
      .def_property(
          "day_one", [](const CountyData& d) { return format_date(d.day_one); },
          [](CountyData& d, const std::string& s) { d.day_one = parse_date(s); })
      .def_readwrite("cumulative_confirmed", &CountyData::cumulative_confirmed)
      .def_readwrite("cumulative_deaths", &CountyData::cumulative_deaths)
      .def_readwrite("positivity", &CountyData::positivity)
      .def_readwrite("population", &CountyData::population)
      .def("__len__", &CountyData::size);

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("region_id", &FitResult::region_id)
      .def_readonly("alpha", &FitResult::alpha)
      .def_readonly("omega", &FitResult::omega)
      .def_readonly("i1", &FitResult::i1)
      .def_readonly("r1", &FitResult::r1)
      .def_readonly("upper_bound", &FitResult::upper_bound)
      .def_readonly("trajectory", &FitResult::trajectory)
      .def_readonly("loss_value", &FitResult::loss_value)
      .def_readonly("converged", &FitResult::converged)
      .def_readonly("iterations", &FitResult::iterations)
      .def_readonly("capped_days", &FitResult::capped_days)
      .def_readonly("diagnostic", &FitResult::diagnostic);

  py::class_<StateAlphaFit>(m, "StateAlphaFit")
      .def_readonly("alpha", &StateAlphaFit::alpha)
      .def_readonly("i1", &StateAlphaFit::i1)
      .def_readonly("r1", &StateAlphaFit::r1)
      .def_readonly("loss_value", &StateAlphaFit::loss_value)
      .def_readonly("grid_alphas", &StateAlphaFit::grid_alphas)
      .def_readonly("grid_losses", &StateAlphaFit::grid_losses)
      .def_readonly("converged", &StateAlphaFit::converged);

  m.def(
      "fit_county_initials",
      [](const CountyData& data, double alpha, const ModelParams& params, double start_i1, double start_r1) {
        FitOptions opts;
        opts.start_i1 = start_i1;
        opts.start_r1 = start_r1;
        py::gil_scoped_release release;
        return fit_county_initials(data, alpha, params, opts);
      },
      py::arg("data"), py::arg("alpha"), py::arg("params"), py::arg("start_i1") = 1000.0,
      py::arg("start_r1") = 1000.0);
  m.def(
      "fit_state_alpha",
      [](const CountyData& state, const ModelParams& params) {
        py::gil_scoped_release release;
        return fit_state_alpha(state, params);
      },
      py::arg("state"), py::arg("params"));

  py::class_<ForecastOptions>(m, "ForecastOptions")
      .def(py::init<>())
      .def_readwrite("horizon", &ForecastOptions::horizon)
      .def_readwrite("n_samples", &ForecastOptions::n_samples)
      .def_readwrite("seed", &ForecastOptions::seed)
      .def_readwrite("residual_gp", &ForecastOptions::residual_gp)
      .def_readwrite("sample_confirmed", &ForecastOptions::sample_confirmed)
      .def_readwrite("count_noise", &ForecastOptions::count_noise)
      .def_readwrite("beta_window", &ForecastOptions::beta_window)
      .def_readwrite("retain_samples", &ForecastOptions::retain_samples)
      .def_readwrite("jobs", &ForecastOptions::jobs);

  py::class_<ForecastResult>(m, "ForecastResult")
      .def_readonly("region_id", &ForecastResult::region_id)
      .def_readonly("horizon_days", &ForecastResult::horizon_days)
      .def_property_readonly("dates", [](const ForecastResult& f) { return date_strings(f.dates); })
      .def_readonly("mean_deaths", &ForecastResult::mean_deaths)
      .def_readonly("lower95", &ForecastResult::lower95)
      .def_readonly("upper95", &ForecastResult::upper95)
      .def_readonly("point_deaths", &ForecastResult::point_deaths)
      .def_readonly("n_samples", &ForecastResult::n_samples)
      .def_readonly("seed", &ForecastResult::seed)
      .def_readonly("dropped", &ForecastResult::dropped)
      .def_readonly("degraded", &ForecastResult::degraded)
      .def_readonly("death_samples", &ForecastResult::death_samples)
      .def_readonly("beta_samples", &ForecastResult::beta_samples);

  m.def(
      "ensemble_forecast",
      [](const FitResult& fit, const CountyData& data, const ModelParams& params, const ForecastOptions& options) {
        py::gil_scoped_release release;
        return ensemble_forecast(fit, data, params, options);
      },
      py::arg("fit"), py::arg("data"), py::arg("params"), py::arg("options") = ForecastOptions{});
  m.def(
      "extrapolate_transmission",
      [](const std::vector<double>& betas, int horizon, int n_samples, std::uint64_t seed) {
        return extrapolate_transmission(betas, horizon, n_samples, seed);
      },
      py::arg("betas"), py::arg("horizon"), py::arg("n_samples"), py::arg("seed") = 0);
  m.def("sample_seed", &sample_seed, py::arg("seed"), py::arg("index"));

  py::class_<PredictiveDistribution>(m, "PredictiveDistribution")
      .def_readonly("location", &PredictiveDistribution::location)
      .def_readonly("scale2", &PredictiveDistribution::scale2)
      .def_readonly("dof", &PredictiveDistribution::dof)
      .def("quantile", &PredictiveDistribution::quantile, py::arg("p"))
      .def_property_readonly("lower95", &PredictiveDistribution::lower95)
      .def_property_readonly("upper95", &PredictiveDistribution::upper95);

  py::class_<GPModel>(m, "GPModel")
      .def_property_readonly("range", &GPModel::range)
      .def_property_readonly("nugget", &GPModel::nugget)
      .def_property_readonly("roughness", &GPModel::roughness)
      .def_property_readonly("sigma2_hat", &GPModel::sigma2_hat)
      .def_property_readonly("times", &GPModel::times)
      .def_property_readonly("degenerate", &GPModel::degenerate)
      .def(
          "predict", [](const GPModel& g, double t, double f) { return predictive_distribution(g, t, f); },
          py::arg("t_star"), py::arg("f_star") = 0.0);

  m.def("correlation_value", &correlation_value, py::arg("l"), py::arg("m"), py::arg("b"));
  m.def(
      "log_marginal_objective",
      [](const std::vector<double>& t, const std::vector<double>& y, double range, double nugget) {
        return log_marginal_objective(t, y, range, nugget);
      },
      py::arg("times"), py::arg("residuals"), py::arg("range"), py::arg("nugget"));
  m.def(
      "fit_gp",
      [](const std::vector<double>& t, const std::vector<double>& y, const std::vector<double>& means) {
        return fit_hyperparameters(t, y, means);
      },
      py::arg("times"), py::arg("residuals"), py::arg("means") = std::vector<double>{});
  m.def(
      "fit_constant_mean_gp",
      [](const std::vector<double>& t, const std::vector<double>& y) { return fit_constant_mean(t, y); },
      py::arg("times"), py::arg("values"));

  py::class_<ReproductionNumbers>(m, "ReproductionNumbers")
      .def_readonly("r0", &ReproductionNumbers::r0)
      .def_readonly("reff", &ReproductionNumbers::reff);
  m.def("reproduction_numbers", &reproduction_numbers, py::arg("beta"), py::arg("s"), py::arg("params"));
  m.def("contraction_probability", &contraction_probability, py::arg("beta"), py::arg("i"), py::arg("n"));
  m.def(
      "classify_risk", [](double p) { return std::string(to_string(classify_risk(p))); }, py::arg("p"));

  py::class_<RiskSeries>(m, "RiskSeries")
      .def_readonly("poc", &RiskSeries::poc)
      .def_property_readonly("level", [](const RiskSeries& r) { return level_strings(r.level); })
      .def_readonly("r0", &RiskSeries::r0)
      .def_readonly("reff", &RiskSeries::reff)
      .def_readonly("infectious", &RiskSeries::infectious);
  m.def("risk_series", &risk_series, py::arg("trajectory"), py::arg("params"));

  py::class_<Counterfactual>(m, "Counterfactual")
      .def_readonly("gamma", &Counterfactual::gamma)
      .def_readonly("trajectory", &Counterfactual::trajectory)
      .def_readonly("risk", &Counterfactual::risk);
  m.def("scenario_counterfactual", &scenario_counterfactual, py::arg("fit"), py::arg("infectious_period"),
        py::arg("params"));

  py::class_<ForecastScores>(m, "ForecastScores")
      .def_readonly("rmse", &ForecastScores::rmse)
      .def_readonly("coverage95", &ForecastScores::coverage95)
      .def_readonly("mean_interval_length", &ForecastScores::mean_interval_length)
      .def_readonly("n_points", &ForecastScores::n_points);
  m.def(
      "forecast_scores",
      [](const std::vector<double>& prediction, const std::vector<double>& truth, const std::vector<double>& lower,
         const std::vector<double>& upper) {
        ScoredSeries s{"", prediction, lower, upper, truth};
        return forecast_scores(std::span<const ScoredSeries>(&s, 1));
      },
      py::arg("prediction"), py::arg("truth"), py::arg("lower95") = std::vector<double>{},
      py::arg("upper95") = std::vector<double>{});

  py::class_<CorrelationScores>(m, "CorrelationScores")
      .def_readonly("rho_pooled", &CorrelationScores::rho_pooled)
      .def_readonly("rho_county_weighted", &CorrelationScores::rho_county_weighted)
      .def_readonly("weights", &CorrelationScores::weights)
      .def_readonly("county_rho", &CorrelationScores::county_rho)
      .def_readonly("excluded", &CorrelationScores::excluded);
  m.def(
      "correlation_scores",
      [](const std::vector<std::vector<double>>& predictions, const std::vector<std::vector<double>>& truths,
         const std::vector<double>& populations) {
        if (predictions.size() != truths.size() || predictions.size() != populations.size())
          throw DataError("predictions, truths and populations must have equal length");
        std::vector<CorrelationInput> in;
        for (std::size_t k = 0; k < predictions.size(); ++k)
          in.push_back({std::to_string(k), predictions[k], truths[k], populations[k]});
        return correlation_scores(in);
      },
      py::arg("predictions"), py::arg("truths"), py::arg("populations"));

  m.def(
      "synthetic_counties",
      [](int count, int days, std::uint64_t seed, bool poisson_noise) {
        std::vector<CountyData> out;
        for (const SyntheticCounty& c : synthetic_counties(count, days, seed, poisson_noise))
          out.push_back(county_window(c.series, c.series.dates.front()));
        return out;
      },
      py::arg("count"), py::arg("days"), py::arg("seed"), py::arg("poisson_noise") = true,
      "Seeded synthetic counties as CountyData windows starting on their first day.");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs one CLI invocation in-process. Returns (exit_code, stdout, stderr).");
}
