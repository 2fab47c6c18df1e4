#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "boundselect/catalog.hpp"
#include "boundselect/ci.hpp"
#include "boundselect/error.hpp"
#include "boundselect/gauss.hpp"
#include "boundselect/io.hpp"
#include "boundselect/lpbounds.hpp"
#include "boundselect/select.hpp"
#include "boundselect/sim.hpp"

namespace py = pybind11;
using namespace boundselect;

namespace {

CiOptions make_options(double alpha1, double alpha2, double beta_frac, int draws,
                       std::uint64_t seed) {
  CiOptions o;
  o.alpha1 = alpha1;
  o.alpha2 = alpha2;
  o.beta_frac = beta_frac;
  o.draws = draws;
  o.seed = seed;
  return o;
}

std::vector<IvRecord> records(const std::vector<int>& y, const std::vector<int>& d,
                              const std::vector<int>& z) {
  if (y.size() != d.size() || y.size() != z.size()) {
    throw Error(ErrorCode::DimensionMismatch, "y, d and z must have equal length");
  }
  std::vector<IvRecord> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = {y[i], d[i], z[i]};
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Confidence intervals for selected interval-identified parameters";
  m.attr("__version__") = kToolVersion;

  static py::exception<Error> error_type(m, "BoundselectError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object args = py::make_tuple(e.code_name(), e.what());
      PyErr_SetObject(error_type.ptr(), args.ptr());
    }
  });

  py::class_<BoundsSpec>(m, "BoundsSpec")
      .def_readonly("num_options", &BoundsSpec::num_options)
      .def_readonly("dim_p", &BoundsSpec::dim_p)
      .def_property_readonly("num_lower", &BoundsSpec::num_lower)
      .def_property_readonly("num_upper", &BoundsSpec::num_upper)
      .def("L", &BoundsSpec::L, py::arg("d"), py::arg("p"))
      .def("U", &BoundsSpec::U, py::arg("d"), py::arg("p"))
      .def("validate", &BoundsSpec::validate, py::arg("allow_constant_pieces") = false)
      .def("to_json", [](const BoundsSpec& s) { return spec_to_json(s).dump(); })
      .def_static("from_json", [](const std::string& text) {
        return spec_from_json(parse_json(text, "spec"));
      });

  py::class_<ReducedForm>(m, "ReducedForm")
      .def(py::init([](long n, const Vec& p_hat, const Mat& sigma_hat) {
             ReducedForm rf{n, p_hat, sigma_hat};
             rf.validate();
             return rf;
           }),
           py::arg("n"), py::arg("p_hat"), py::arg("sigma_hat"))
      .def_readonly("n", &ReducedForm::n)
      .def_readonly("p_hat", &ReducedForm::p_hat)
      .def_readonly("sigma_hat", &ReducedForm::sigma_hat);

  m.def("catalog_spec", &catalog_spec, py::arg("name"));
  m.def("difference_family", &difference_family, py::arg("spec"), py::arg("treated"),
        py::arg("control"));
  m.def("lp_to_bounds_spec", [](const Mat& A, const Mat& B) {
        return lp_to_bounds_spec(LatentLp{A, B});
      }, py::arg("A"), py::arg("B"));

  m.def("estimate_reduced_form",
        [](const std::vector<int>& y, const std::vector<int>& d, const std::vector<int>& z,
           double smoothing, long min_stratum) {
          EstimatorOptions o;
          o.smoothing = smoothing;
          o.min_stratum = min_stratum;
          return estimate_reduced_form(records(y, d, z), o);
        },
        py::arg("y"), py::arg("d"), py::arg("z"), py::arg("smoothing") = 0.0,
        py::arg("min_stratum") = 5);

  m.def("estimate_bounds", [](const BoundsSpec& spec, const Vec& p) {
    const BoundEstimate e = estimate_bounds(spec, p);
    py::dict out;
    out["L_hat"] = e.L_hat;
    out["U_hat"] = e.U_hat;
    out["j_L"] = e.j_L;
    out["j_U"] = e.j_U;
    return out;
  }, py::arg("spec"), py::arg("p"));

  py::class_<Polyhedron>(m, "Polyhedron")
      .def_readonly("A", &Polyhedron::A)
      .def_readonly("c", &Polyhedron::c)
      .def_readonly("labels", &Polyhedron::labels)
      .def("contains", &Polyhedron::contains, py::arg("p"), py::arg("tol") = 0.0);

  py::class_<SelectionOutcome>(m, "Selection")
      .def_property_readonly("rule", [](const SelectionOutcome& s) { return rule_name(s.rule); })
      .def_readonly("d_hat", &SelectionOutcome::d_hat)
      .def_readonly("j_L", &SelectionOutcome::j_L)
      .def_readonly("j_U", &SelectionOutcome::j_U)
      .def_readonly("members", &SelectionOutcome::members)
      .def_readonly("poly_L", &SelectionOutcome::poly_L)
      .def_readonly("poly_U", &SelectionOutcome::poly_U)
      .def_readonly("cms_statistic", &SelectionOutcome::cms_statistic);

  m.def("rule_weighted", &rule_weighted, py::arg("spec"), py::arg("rf"), py::arg("w_L") = 1.0,
        py::arg("w_U") = 0.0);
  m.def("fixed_target", &fixed_target, py::arg("spec"), py::arg("rf"), py::arg("d"));
  m.def("rule_undominated", &rule_undominated, py::arg("spec"), py::arg("rf"));
  m.def("rule_cms",
        py::overload_cast<const BoundsSpec&, const BoundsSpec&, const ReducedForm&, int,
                          std::uint64_t>(&rule_cms),
        py::arg("family"), py::arg("inference"), py::arg("rf"), py::arg("m") = 100,
        py::arg("seed") = 1);

  py::class_<ConfidenceInterval>(m, "ConfidenceInterval")
      .def_property_readonly("kind", [](const ConfidenceInterval& c) { return ci_kind_name(c.kind); })
      .def_readonly("lower", &ConfidenceInterval::lower)
      .def_readonly("upper", &ConfidenceInterval::upper)
      .def_readonly("projection_contained", &ConfidenceInterval::projection_contained)
      .def_property_readonly("length", &ConfidenceInterval::length)
      .def("covers", &ConfidenceInterval::covers, py::arg("lo"), py::arg("hi"))
      .def("to_json", [](const ConfidenceInterval& c) { return interval_to_json(c).dump(); })
      .def("__repr__", [](const ConfidenceInterval& c) {
        return std::string("<ConfidenceInterval ") + ci_kind_name(c.kind) + " [" +
               std::to_string(c.lower) + ", " + std::to_string(c.upper) + "]>";
      });

  m.def("confidence_interval",
        [](const std::string& kind, const BoundsSpec& spec, const ReducedForm& rf,
           const SelectionOutcome& sel, double alpha1, double alpha2, double beta_frac,
           int draws, std::uint64_t seed) {
          return compute_ci(parse_ci_kind(kind), spec, rf, sel,
                            make_options(alpha1, alpha2, beta_frac, draws, seed));
        },
        py::arg("kind"), py::arg("spec"), py::arg("rf"), py::arg("selection"),
        py::arg("alpha1") = 0.025, py::arg("alpha2") = 0.025, py::arg("beta_frac") = 0.1,
        py::arg("draws") = 100000, py::arg("seed") = 20240611);

  m.def("norm_quantile", &norm_quantile, py::arg("p"));
  m.def("tn_cdf", [](double t, double mu, double sigma2, double lower, double upper) {
    return tn_cdf(t, {mu, sigma2, lower, upper});
  }, py::arg("t"), py::arg("mu"), py::arg("sigma2"), py::arg("lower"), py::arg("upper"));
  m.def("solve_location", [](double t, double target, double sigma2, double lower, double upper) {
    return solve_location(t, target, sigma2, lower, upper).mu;
  }, py::arg("t"), py::arg("target"), py::arg("sigma2"), py::arg("lower"), py::arg("upper"));
  m.def("max_gauss_quantile", &max_gauss_quantile, py::arg("cov"), py::arg("level"),
        py::arg("draws") = 100000, py::arg("seed") = 20240611);

  m.def("simulate",
        [](const std::string& config_json, int threads) {
          ExperimentReport rep;
          {
            py::gil_scoped_release release;
            rep = run_experiment(parse_experiment_config(config_json), threads);
          }
          py::dict out;
          out["csv"] = report_csv(rep);
          out["json"] = report_json(rep);
          out["dat"] = report_dat(rep);
          return out;
        },
        py::arg("config_json"), py::arg("threads") = 0);
}
