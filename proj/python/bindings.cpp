#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pentest/bench.hpp"
#include "pentest/curves.hpp"
#include "pentest/errors.hpp"
#include "pentest/feasibility.hpp"
#include "pentest/mechanisms.hpp"
#include "pentest/pensim.hpp"

namespace py = pybind11;
using namespace pentest;

namespace {

// Mechanisms are shared as pointers to const, which pybind11 cannot hold
// directly.
struct Mechanism {
  MechanismPtr ptr;
};

template <typename... Args>
auto wrap(MechanismPtr (*fn)(Args...)) {
  return [fn](Args... args) { return Mechanism{fn(std::forward<Args>(args)...)}; };
}

}  // namespace

PYBIND11_MODULE(_pentest, m) {
  m.doc() = "Pen testing, deferred-acceptance auctions and virtual pricing";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_NotImplementedError);
  py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_RuntimeError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);
  py::register_exception<SizeError>(m, "SizeError", PyExc_ValueError);
  py::register_exception<DegenerateInstanceError>(m, "DegenerateInstanceError", PyExc_ZeroDivisionError);

  py::class_<ValueDistribution>(m, "ValueDistribution")
      .def_static("exponential", &ValueDistribution::exponential, py::arg("mean"))
      .def_static("uniform", &ValueDistribution::uniform, py::arg("lo"), py::arg("hi"))
      .def_static("point_masses", &ValueDistribution::point_masses, py::arg("values"), py::arg("probabilities"))
      .def_static("piecewise_linear", &ValueDistribution::piecewise_linear, py::arg("quantiles"), py::arg("values"))
      .def_static("truncated_normal", &ValueDistribution::truncated_normal_approx, py::arg("mean"), py::arg("sd"),
                  py::arg("lo"), py::arg("hi"), py::arg("knots") = 200)
      .def_static("lognormal", &ValueDistribution::lognormal_approx, py::arg("mu"), py::arg("sigma"),
                  py::arg("knots") = 200, py::arg("top_mass") = 1e-6)
      .def("inverse_demand", &ValueDistribution::inverse_demand, py::arg("q"))
      .def("cdf", &ValueDistribution::cdf, py::arg("value"))
      .def("surplus_curve", &ValueDistribution::surplus_curve, py::arg("q"))
      .def("consumer_surplus_curve", &ValueDistribution::consumer_surplus_curve, py::arg("q"))
      .def(
          "sample",
          [](const ValueDistribution& d, std::uint64_t seed, int count) {
            Rng rng(seed);
            std::vector<double> out(static_cast<std::size_t>(count));
            for (auto& x : out) x = d.sample(rng);
            return out;
          },
          py::arg("seed"), py::arg("count") = 1)
      .def("__repr__", &ValueDistribution::describe);

  py::class_<Interval>(m, "Interval").def_readonly("lo", &Interval::lo).def_readonly("hi", &Interval::hi);

  py::class_<CurveBundle>(m, "CurveBundle")
      .def_readonly("grid", &CurveBundle::grid)
      .def_readonly("v", &CurveBundle::v)
      .def_readonly("V", &CurveBundle::V)
      .def_readonly("U", &CurveBundle::U)
      .def_readonly("u", &CurveBundle::u)
      .def_readonly("U_ironed", &CurveBundle::U_ironed)
      .def_readonly("u_ironed", &CurveBundle::u_ironed)
      .def_readonly("ironed_intervals", &CurveBundle::ironed_intervals)
      .def("ironed_value", &CurveBundle::ironed_value, py::arg("q"))
      .def("ironed_marginal", &CurveBundle::ironed_marginal, py::arg("q"));

  m.def("ironed_curves", &ironed_curves, py::arg("dist"), py::arg("resolution") = kDefaultGridResolution);
  m.def(
      "virtual_price",
      [](const CurveBundle& b, double vhat) {
        const auto vp = virtual_price(b, vhat);
        return py::make_tuple(vp.theta, vp.price);
      },
      py::arg("bundle"), py::arg("vhat"));

  py::class_<FeasibilityConstraint>(m, "FeasibilityConstraint")
      .def_static("k_of_n", &FeasibilityConstraint::k_of_n, py::arg("n"), py::arg("k"))
      .def_static("uniform_matroid", &FeasibilityConstraint::uniform_matroid, py::arg("n"), py::arg("rank"))
      .def_static("partition_matroid", &FeasibilityConstraint::partition_matroid, py::arg("block_of"),
                  py::arg("capacity"))
      .def_static("graphic_matroid", &FeasibilityConstraint::graphic_matroid, py::arg("vertices"), py::arg("edges"))
      .def_static("knapsack", &FeasibilityConstraint::knapsack, py::arg("sizes"), py::arg("capacity"))
      .def_static("explicit_family", &FeasibilityConstraint::explicit_family, py::arg("n"), py::arg("sets"),
                  py::arg("downward_closed"))
      .def_property_readonly("n", &FeasibilityConstraint::n)
      .def("is_feasible", &FeasibilityConstraint::is_feasible, py::arg("subset"))
      .def("find_circuit", &FeasibilityConstraint::find_circuit, py::arg("subset"))
      .def(
          "max_weight_feasible",
          [](const FeasibilityConstraint& c, const std::vector<double>& w) {
            const auto s = c.max_weight_feasible(w);
            return py::make_tuple(s.subset, s.total);
          },
          py::arg("weights"))
      .def("pad_to_maximal", &FeasibilityConstraint::pad_to_maximal, py::arg("subset"))
      .def("feasible_count", &FeasibilityConstraint::feasible_count)
      .def("__repr__", &FeasibilityConstraint::describe);

  py::class_<Mechanism>(m, "Mechanism")
      .def_property_readonly("name", [](const Mechanism& x) { return x.ptr->name(); })
      .def_property_readonly("n", [](const Mechanism& x) { return x.ptr->n(); })
      .def("__repr__", [](const Mechanism& x) { return "<Mechanism " + x.ptr->name() + ">"; });

  m.def("k_clock_da", wrap(static_cast<MechanismPtr (*)(const FeasibilityConstraint&)>(&k_clock_da)),
        py::arg("constraint"));
  m.def("matroid_da", wrap(&matroid_da), py::arg("matroid"));
  m.def("knapsack_da", wrap(&knapsack_da), py::arg("knapsack"), py::arg("dists"), py::arg("trials") = 10000,
        py::arg("seed") = 0);
  m.def("prophet_posted_price", wrap(&prophet_posted_price), py::arg("dists"));
  m.def("prophet_threshold", &prophet_threshold, py::arg("dists"));
  m.def("gsp_sequential",
        wrap(static_cast<MechanismPtr (*)(const FeasibilityConstraint&, const Distributions&)>(&gsp_sequential)),
        py::arg("k_of_n"), py::arg("dists"));
  m.def("water_filling", &water_filling, py::arg("dists"), py::arg("k"));
  m.def("ear_value", &ear_value, py::arg("qvec"), py::arg("dists"));
  m.def("iid_posted_price", wrap(&iid_posted_price), py::arg("bundle"), py::arg("n"));
  m.def(
      "virtual_transform",
      [](const Mechanism& base, Bundles bundles) {
        return Mechanism{virtual_transform(base.ptr, std::move(bundles))};
      },
      py::arg("base"), py::arg("bundles"));
  m.def("virtual_distribution", &virtual_distribution, py::arg("bundle"));
  m.def("buffered_quantile", &buffered_quantile, py::arg("q"), py::arg("eps"));

  m.def(
      "run_da",
      [](const Mechanism& mech, const std::vector<double>& values, std::uint64_t seed) {
        Rng rng(seed);
        const Outcome o = run_da(*mech.ptr, values, rng);
        py::dict d;
        d["winners"] = o.winners;
        d["payments"] = o.payments;
        d["surplus"] = o.surplus;
        d["consumer_surplus"] = o.consumer_surplus;
        return d;
      },
      py::arg("mechanism"), py::arg("values"), py::arg("seed") = 0);

  m.def(
      "run_pen_algorithm",
      [](const Mechanism& mech, const std::vector<double>& inks, const FeasibilityConstraint& c, std::uint64_t seed,
         bool pad) {
        Rng rng(seed);
        const PenRun r = run_pen_algorithm(*mech.ptr, inks, c, rng, pad);
        py::dict d;
        d["chosen"] = r.chosen;
        d["chosen_before_padding"] = r.chosen_before_padding;
        d["total_residual"] = r.total_residual;
        d["total_residual_before_padding"] = r.total_residual_before_padding;
        d["written"] = r.written;
        d["tests"] = r.test_log.size();
        return d;
      },
      py::arg("mechanism"), py::arg("inks"), py::arg("constraint"), py::arg("seed") = 0, py::arg("pad") = false);
  m.def("omniscient_value", &omniscient_value, py::arg("inks"), py::arg("constraint"));

  py::class_<RatioEstimate>(m, "RatioEstimate")
      .def_readonly("numerator_mean", &RatioEstimate::numerator_mean)
      .def_readonly("denominator_mean", &RatioEstimate::denominator_mean)
      .def_readonly("ratio", &RatioEstimate::ratio)
      .def_readonly("confidence_halfwidth", &RatioEstimate::confidence_halfwidth)
      .def_readonly("trials", &RatioEstimate::trials)
      .def_readonly("seed", &RatioEstimate::seed);
  m.def("measure_environment", &measure_environment, py::arg("environment"), py::arg("n"), py::arg("k"),
        py::arg("dists"), py::arg("trials"), py::arg("seed"), py::arg("jobs") = 1,
        py::arg("resolution") = kDefaultGridResolution);

  py::class_<BoundReport>(m, "BoundReport")
      .def_readonly("environment", &BoundReport::environment)
      .def_readonly("n", &BoundReport::n)
      .def_readonly("k", &BoundReport::k)
      .def_readonly("gamma", &BoundReport::gamma)
      .def_readonly("zeta_upper", &BoundReport::zeta_upper)
      .def_readonly("zeta_lower", &BoundReport::zeta_lower)
      .def_readonly("pi_upper", &BoundReport::pi_upper)
      .def_readonly("epsilon", &BoundReport::epsilon)
      .def_readonly("pi_source", &BoundReport::pi_source);
  m.def("table1_report", &table1_report, py::arg("environments"), py::arg("n"), py::arg("k") = 1);
  m.def("supported_environments", &supported_environments);

  m.def("harmonic", &harmonic, py::arg("n"));
  m.def("harmonic_lower_bound", &harmonic_lower_bound, py::arg("n"), py::arg("k"));
  m.def("zeta_upper_general", &zeta_upper_general, py::arg("n"), py::arg("eps"));
  m.def("zeta_upper_kid", &zeta_upper_kid, py::arg("n"), py::arg("k"), py::arg("eps"));
  m.def("zeta_kid_auto_eps", &zeta_kid_auto_eps, py::arg("n"), py::arg("k"));
  m.def("verify_c_convexity", &verify_c_convexity, py::arg("n"), py::arg("resolution") = 10000);
  m.def("verify_integral_identity", &verify_integral_identity, py::arg("n"), py::arg("a"),
        py::arg("points") = 100000);
  m.def(
      "verify_iid_worstcase",
      [](int n, double a, std::size_t grid) {
        const auto r = verify_iid_worstcase(n, a, grid);
        return py::make_tuple(r.surplus, r.consumer_surplus, r.ratio, r.bound);
      },
      py::arg("n"), py::arg("a"), py::arg("grid") = 10000);
}
