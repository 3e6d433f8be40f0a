#include "aptsp/algorithms.hpp"
#include "aptsp/bounds.hpp"
#include "aptsp/cli.hpp"
#include "aptsp/errors.hpp"
#include "aptsp/evaluation.hpp"
#include "aptsp/json_io.hpp"
#include "aptsp/lower_bounds.hpp"
#include "aptsp/tsp.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace aptsp;

namespace {

Instance make_instance(const std::vector<std::vector<double>>& matrix, std::vector<double> p, std::optional<int> depot,
                       std::vector<std::string> names) {
    const int n = static_cast<int>(matrix.size());
    std::vector<double> flat;
    for (const auto& row : matrix) {
        if (static_cast<int>(row.size()) != n) throw InvalidInput("matrix must be square");
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return Instance(n, std::move(flat), std::move(p), depot, std::move(names));
}

py::dict bound_dict(const BoundSolve& r) {
    py::dict d;
    d["primal_value"] = r.primal_value;
    d["dual_value"] = r.dual_value;
    d["ratio_bound"] = r.ratio_bound;
    d["primal_violation"] = r.primal_violation;
    d["dual_violation"] = r.dual_violation;
    d["rounds"] = r.rounds;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "a priori TSP algorithms, evaluators and LP bound certificates";

    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);
    py::register_exception<NumericalFailure>(m, "NumericalFailure", PyExc_ArithmeticError);

    py::class_<Instance>(m, "Instance")
        .def(py::init(&make_instance), py::arg("matrix"), py::arg("p"), py::arg("depot") = std::nullopt,
             py::arg("names") = std::vector<std::string>{})
        .def_static("from_json", [](const std::string& text) { return instance_from_json(Json::parse(text)); })
        .def("to_json", [](const Instance& i) { return instance_to_json(i).dump(); })
        .def_property_readonly("n", &Instance::size)
        .def_property_readonly("depot", &Instance::depot)
        .def_property_readonly("p", [](const Instance& i) { return std::vector<double>(i.probs().begin(), i.probs().end()); })
        .def("dist", &Instance::dist)
        .def("violations", [](const Instance& i, bool strict) {
            std::vector<std::string> out;
            for (const auto& v : validate_instance(i, strict ? MetricMode::strict : MetricMode::semi).violations)
                out.push_back(v.message);
            return out;
        }, py::arg("strict") = false);

    m.def("expected_cost", [](const Instance& inst, std::vector<int> order) {
        Tour t(std::move(order));
        t.check_permutation(inst.size());
        return expected_tour_cost_exact(inst, t);
    }, py::arg("instance"), py::arg("tour"));
    m.def("expected_cost_bruteforce", [](const Instance& inst, std::vector<int> order) {
        Tour t(std::move(order));
        t.check_permutation(inst.size());
        return expected_cost_bruteforce(inst, t);
    }, py::arg("instance"), py::arg("tour"));
    m.def("expected_cost_mc", [](const Instance& inst, std::vector<int> order, long long samples, std::uint64_t seed,
                                 int threads) {
        Tour t(std::move(order));
        t.check_permutation(inst.size());
        const auto r = expected_cost_monte_carlo(inst, t, samples, seed, threads);
        return py::make_tuple(r.value, r.stderr_value.value_or(0.0));
    }, py::arg("instance"), py::arg("tour"), py::arg("samples") = 100000, py::arg("seed") = 0, py::arg("threads") = 1);
    m.def("optimal_apriori_cost", [](const Instance& inst) { return brute_force_optimum(inst).cost; });
    m.def("tsp", [](const Instance& inst, std::vector<int> subset, const std::string& kind) {
        const TspResult r = solve_tsp(inst, subset, parse_tsp_kind(kind));
        return py::make_tuple(r.tour.order(), r.cost);
    }, py::arg("instance"), py::arg("subset"), py::arg("kind") = "exact");

    m.def("solve", [](const Instance& inst, const std::string& algo, double epsilon, const std::string& policy,
                      const std::string& tsp, std::uint64_t seed) {
        AprioriConfig cfg;
        cfg.algo = parse_algo_kind(algo);
        cfg.policy = SamplingPolicy::parse(policy);
        cfg.tsp = parse_tsp_kind(tsp);
        cfg.seed = seed;
        const AprioriResult r = solve_apriori(inst, epsilon, cfg);
        py::dict d;
        d["tour"] = r.tour.order();
        d["expected_cost"] = r.expected_cost;
        d["branch"] = r.trace.branch;
        d["estimator"] = r.trace.estimator;
        return d;
    }, py::arg("instance"), py::arg("algo") = "auto", py::arg("epsilon") = 0.5, py::arg("policy") = "power:0.663",
       py::arg("tsp") = "exact", py::arg("seed") = 0);

    m.def("sampling_bound", [](double alpha, double sigma, double beta, int n) {
        return bound_dict(solve_sampling_bound({alpha, sigma, beta, n}));
    }, py::arg("alpha") = 1.5, py::arg("sigma") = 0.663, py::arg("beta") = 0.05, py::arg("N") = 200);
    m.def("mrr_bound", [](double beta, int n, int a) {
        MrrLpConfig c;
        c.beta = beta;
        c.n_buckets = n;
        c.a = a;
        return bound_dict(solve_mrr_bound(c));
    }, py::arg("beta") = 0.05, py::arg("N") = 200, py::arg("a") = 9);
    m.def("verify_certificate", [](const std::string& text) -> py::object {
        const VerificationResult v = verify_certificate(certificate_from_json(Json::parse(text)));
        if (!v.feasible) throw InvalidInput("certificate infeasible at row " + v.violated_row);
        if (!v.bound) return py::none();
        return py::float_(round_up(*v.bound));
    }, py::arg("certificate_json"));

    m.def("lb_row", [](double alpha) {
        const GammaSigma g = optimize_gamma_sigma(alpha);
        return py::make_tuple(g.gamma, g.sigma, g.ratio);
    }, py::arg("alpha"));
    m.def("mrr_lb_ratio", [](std::int64_t n, std::int64_t mm) { return mrr_lb_ratio({n, mm}); }, py::arg("n"), py::arg("m"));

    m.def("run_cli", [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
            py::gil_scoped_release release;
            code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"));
}
