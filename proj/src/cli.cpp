#include "aptsp/cli.hpp"

#include "aptsp/algorithms.hpp"
#include "aptsp/bounds.hpp"
#include "aptsp/errors.hpp"
#include "aptsp/json_io.hpp"
#include "aptsp/lower_bounds.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <new>
#include <ostream>

namespace aptsp {

namespace {

struct SolveArgs {
    std::string instance, algo = "auto", depot_algo = "sampling", policy = "power:0.663", tsp = "exact", out;
    std::uint64_t seed = 0;
    double epsilon = 0.5;
    int n_max = 0;
};

struct EvalArgs {
    std::string instance, tour, method = "exact";
    long long samples = 100000;
    std::uint64_t seed = 0;
};

struct BoundArgs {
    std::string family = "sampling", export_path, export_dual, cert_out;
    double alpha = 1.5, sigma = 0.663, beta = 0.05;
    int n_buckets = 200, a = 9;
    bool solve = false;
};

struct CertifyArgs {
    std::string cert, solution, family = "sampling", cert_out;
    std::string alpha = "1.5", sigma = "0.663", beta = "0.05";
    int n_buckets = 200, a = 9;
    double safety = 0.0;
};

struct GenArgs {
    std::string family, out;
    double gamma = 1.0, p = 0.01;
    long long n = 500, m = 2;
};

struct LbArgs {
    std::vector<double> alpha;
    double gamma = 0.0;
    bool table = false;
    long long mrr_n = 0, mrr_m = 0;
};

DualCertificate scale_certificate(DualCertificate cert, double safety) {
    const Rational s = Rational(1) - exact_rational(safety);
    for (auto* m : {&cert.x2, &cert.v, &cert.w})
        for (auto& [k, q] : *m) q *= s;
    for (auto* m : {&cert.x1, &cert.z})
        for (auto& [k, q] : *m) q *= s;
    for (auto& [k, q] : cert.y1) q *= s * s;
    cert.y *= s * s;
    return cert;
}

int resolve_threads(int flag) {
    if (flag > 0) return flag;
    if (const char* env = std::getenv("APTSP_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1) throw InvalidInput("APTSP_THREADS must be a positive integer");
        return static_cast<int>(v);
    }
    return 1;
}

Instance load_instance(const std::string& path) {
    Instance inst = instance_from_json(read_json_file(path));
    const auto report = validate_instance(inst, MetricMode::semi);
    if (!report.ok()) {
        std::string msg = "invalid instance: " + report.violations.front().message;
        if (report.violations.size() > 1) msg += " (" + std::to_string(report.violations.size()) + " violations)";
        throw InvalidInput(msg);
    }
    return inst;
}

void emit(std::ostream& out, Json j, const std::string& path = {}) {
    Json doc;
    doc["schema"] = kSchema;
    for (auto& [k, v] : j.items())
        if (k != "schema") doc[k] = v;
    if (!path.empty()) write_json_file(path, doc);
    out << doc.dump(2) << '\n';
}

Json trace_to_json(const AlgorithmTrace& t) {
    Json j;
    j["branch"] = t.branch;
    j["total_probability"] = t.total_probability;
    j["threshold"] = t.threshold ? Json(*t.threshold) : Json(nullptr);
    j["master_size"] = t.master_size ? Json(*t.master_size) : Json(nullptr);
    if (t.chosen_depot) j["chosen_depot"] = *t.chosen_depot;
    if (t.subsets) j["subsets"] = *t.subsets;
    if (t.n_max) j["n_max"] = *t.n_max;
    j["estimator"] = t.estimator;
    return j;
}

int cmd_solve(const SolveArgs& a, std::ostream& out) {
    const Instance inst = load_instance(a.instance);
    AprioriConfig cfg;
    cfg.algo = parse_algo_kind(a.algo);
    cfg.depot_algorithm = parse_algo_kind(a.depot_algo);
    if (cfg.depot_algorithm != AlgoKind::sampling && cfg.depot_algorithm != AlgoKind::derand)
        throw InvalidInput("--depot-algo must be sampling or derand");
    cfg.policy = SamplingPolicy::parse(a.policy);
    cfg.tsp = parse_tsp_kind(a.tsp);
    cfg.seed = a.seed;
    if (a.n_max > 0) cfg.n_max = a.n_max;
    const AprioriResult r = solve_apriori(inst, a.epsilon, cfg);
    Json j;
    j["tour"] = tour_to_json(r.tour);
    j["exact_expected_cost"] = r.expected_cost;
    Json algo;
    algo["name"] = to_string(cfg.algo);
    if (cfg.algo == AlgoKind::automatic) algo["depot_algorithm"] = to_string(cfg.depot_algorithm);
    algo["policy"] = cfg.policy.to_string();
    algo["tsp"] = to_string(cfg.tsp);
    algo["seed"] = cfg.seed;
    algo["epsilon"] = a.epsilon;
    j["algorithm"] = std::move(algo);
    j["trace"] = trace_to_json(r.trace);
    emit(out, std::move(j), a.out);
    return kExitOk;
}

int cmd_eval(const EvalArgs& a, int threads, std::ostream& out) {
    const Instance inst = load_instance(a.instance);
    const Tour tour = tour_from_json(read_json_file(a.tour));
    tour.check_permutation(inst.size());
    ExpectedCostReport r;
    if (a.method == "exact") {
        r.value = expected_tour_cost_exact(inst, tour);
        r.method = EvalMethod::exact;
    } else if (a.method == "brute") {
        r.value = expected_cost_bruteforce(inst, tour);
        r.method = EvalMethod::brute_force;
    } else if (a.method == "mc") {
        r = expected_cost_monte_carlo(inst, tour, a.samples, a.seed, threads);
    } else {
        throw InvalidInput("unknown method '" + a.method + "' (exact | mc | brute)");
    }
    emit(out, report_to_json(r));
    return kExitOk;
}

Json sampling_config_json(const SamplingLpConfig& c) {
    return Json{{"alpha", c.alpha}, {"sigma", c.sigma}, {"beta", c.beta}, {"N", c.n_buckets}};
}

Json mrr_config_json(const MrrLpConfig& c) { return Json{{"beta", c.beta}, {"N", c.n_buckets}, {"a", c.a}}; }

void write_lp(const std::string& path, const std::function<void(LpBuilder&)>& emit_model) {
    std::ofstream f(path);
    if (!f) throw InvalidInput("cannot write " + path);
    LpTextWriter writer(f);
    emit_model(writer);
    writer.finish();
    if (!f) throw InvalidInput("write failed: " + path);
}

constexpr int kMaxExportBuckets = 5000;

int cmd_bound(const BoundArgs& a, std::ostream& out) {
    const bool sampling = a.family == "sampling";
    if (!sampling && a.family != "mrr") throw InvalidInput("--family must be sampling or mrr");
    SamplingLpConfig scfg{a.alpha, a.sigma, a.beta, a.n_buckets};
    MrrLpConfig mcfg;
    mcfg.beta = a.beta;
    mcfg.n_buckets = a.n_buckets;
    mcfg.a = a.a;
    if (sampling) scfg.validate();
    else mcfg.validate();
    const bool solve = a.solve || !a.cert_out.empty();
    if (!solve && a.export_path.empty() && a.export_dual.empty())
        throw InvalidInput("nothing to do: pass --solve, --export, --export-dual or --cert-out");

    Json j;
    j["family"] = a.family;
    j["config"] = sampling ? sampling_config_json(scfg) : mrr_config_json(mcfg);
    if (sampling) {
        const DeltaTerms d = compute_delta_terms(scfg);
        j["delta1"] = d.delta1;
        j["delta2"] = d.delta2;
    }
    if ((!a.export_path.empty() || !a.export_dual.empty()) && a.n_buckets > kMaxExportBuckets)
        throw BudgetExceeded("export limited to N <= " + std::to_string(kMaxExportBuckets));
    if (!a.export_path.empty()) {
        write_lp(a.export_path, [&](LpBuilder& b) { sampling ? emit_sampling_lp(scfg, b) : emit_mrr_lp(mcfg, b); });
        j["export"] = a.export_path;
    }
    if (!a.export_dual.empty()) {
        write_lp(a.export_dual, [&](LpBuilder& b) { sampling ? emit_sampling_dual(scfg, b) : emit_mrr_dual(mcfg, b); });
        j["export_dual"] = a.export_dual;
    }
    if (solve) {
        const BoundSolve r = sampling ? solve_sampling_bound(scfg) : solve_mrr_bound(mcfg);
        j["primal_value"] = r.primal_value;
        j["dual_value"] = r.dual_value;
        j["ratio_bound"] = r.ratio_bound;
        j["primal_violation"] = r.primal_violation;
        j["dual_violation"] = r.dual_violation;
        j["rounds"] = r.rounds;
        j["generated_rows"] = r.generated_rows;
        if (!a.cert_out.empty()) {
            const DualCertificate cert = sampling ? rationalize_sampling(scfg, r) : rationalize_mrr(mcfg, r);
            const VerificationResult v = verify_certificate(cert);
            write_json_file(a.cert_out, certificate_to_json(cert));
            j["certificate"] = a.cert_out;
            j["certified_bound"] = v.bound ? Json(round_up(*v.bound)) : Json(nullptr);
            if (!v.feasible) {
                j["violated_row"] = v.violated_row;
                j["margin"] = v.margin;
                emit(out, std::move(j));
                return kExitInfeasible;
            }
        }
    }
    emit(out, std::move(j));
    return kExitOk;
}

int cmd_certify(const CertifyArgs& a, std::ostream& out) {
    if (a.cert.empty() == a.solution.empty()) throw InvalidInput("pass exactly one of --cert or --solution");
    DualCertificate cert;
    if (!a.cert.empty()) {
        cert = certificate_from_json(read_json_file(a.cert));
    } else {
        const CertKind kind = parse_cert_kind(a.family);
        ExactParams params;
        params.beta = parse_rational(a.beta);
        params.n_buckets = a.n_buckets;
        if (kind == CertKind::sampling) {
            params.alpha = parse_rational(a.alpha);
            params.sigma = parse_rational(a.sigma);
        } else {
            params.a = a.a;
        }
        std::ifstream in(a.solution);
        if (!in) throw InvalidInput("cannot open " + a.solution);
        cert = certificate_from_solution(kind, params, in);
    }
    if (a.safety != 0.0) {
        if (!(a.safety > 0.0 && a.safety < 1.0)) throw InvalidInput("--safety must lie in (0, 1)");
        cert = scale_certificate(cert, a.safety);
    }
    if (!a.cert_out.empty()) write_json_file(a.cert_out, certificate_to_json(cert));
    const VerificationResult v = verify_certificate(cert);
    Json j;
    j["kind"] = to_string(cert.kind);
    j["feasible"] = v.feasible;
    if (!v.feasible) {
        j["violated_row"] = v.violated_row;
        j["margin"] = v.margin;
        j["message"] = v.message;
        emit(out, std::move(j));
        return kExitInfeasible;
    }
    if (v.bound) {
        j["bound"] = round_up(*v.bound);
        j["bound_exact"] = to_string(*v.bound);
    } else {
        j["bound"] = nullptr;
    }
    j["message"] = v.bound ? v.message : std::string("no finite bound");
    emit(out, std::move(j));
    return kExitOk;
}

int cmd_gen(const GenArgs& a, std::ostream& out) {
    Instance inst;
    if (a.family == "sampling-lb") {
        if (a.n > 20000) throw BudgetExceeded("n limited to 20000");
        inst = gen_sampling_lb_instance({a.gamma, a.p, static_cast<int>(a.n)});
    } else if (a.family == "mrr-lb") {
        inst = gen_mrr_lb_instance({a.n, a.m});
    } else {
        throw InvalidInput("--family must be sampling-lb or mrr-lb");
    }
    Json j = instance_to_json(inst);
    if (!a.out.empty()) write_json_file(a.out, j);
    out << j.dump(2) << '\n';
    return kExitOk;
}

Json lb_row(double alpha, double gamma) {
    Json row;
    row["alpha"] = alpha;
    if (gamma > 0.0) {
        if (!(gamma >= 1.0 && gamma <= 2.0)) throw InvalidInput("gamma must lie in [1, 2]");
        const double sigma = optimize_sigma(alpha, gamma);
        row["gamma"] = gamma;
        row["sigma"] = sigma;
        row["ratio"] = sampling_lb_ratio(alpha, gamma, sigma);
    } else {
        const GammaSigma g = optimize_gamma_sigma(alpha);
        row["gamma"] = g.gamma;
        row["sigma"] = g.sigma;
        row["ratio"] = g.ratio;
    }
    return row;
}

int cmd_lb(const LbArgs& a, std::ostream& out) {
    Json j;
    if (a.mrr_n > 0 || a.mrr_m > 0) {
        const MrrLbParams p{a.mrr_n, a.mrr_m};
        j["family"] = "mrr-lb";
        j["n"] = p.n;
        j["m"] = p.m;
        j["q"] = p.q();
        j["ratio"] = mrr_lb_ratio(p);
        emit(out, std::move(j));
        return kExitOk;
    }
    std::vector<double> alphas = a.alpha;
    if (a.table) alphas.insert(alphas.end(), {1.0, 4.0 / 3.0, 1.4999});
    if (alphas.empty()) throw InvalidInput("pass --alpha, --table or --mrr-n/--mrr-m");
    for (double al : alphas)
        if (!(al >= 1.0)) throw InvalidInput("alpha must be at least 1");
    if (alphas.size() == 1 && !a.table) {
        Json row = lb_row(alphas.front(), a.gamma);
        for (auto& [k, v] : row.items()) j[k] = v;
    } else {
        Json rows = Json::array();
        for (double al : alphas) rows.push_back(lb_row(al, a.gamma));
        j["rows"] = std::move(rows);
    }
    emit(out, std::move(j));
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"a priori TSP algorithms, evaluators and LP bound certificates", "aptsp"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (default: APTSP_THREADS or 1)");

    SolveArgs sa;
    auto* solve = app.add_subcommand("solve", "compute an a priori tour");
    solve->add_option("--instance", sa.instance, "instance JSON")->required();
    solve->add_option("--algo", sa.algo, "auto | sampling | derand | low-activity");
    solve->add_option("--depot-algo", sa.depot_algo, "inner algorithm of --algo auto: sampling | derand");
    solve->add_option("--policy", sa.policy, "identity | power:SIGMA | scaled:SIGMA");
    solve->add_option("--tsp", sa.tsp, "exact | christofides | double-tree");
    solve->add_option("--seed", sa.seed);
    solve->add_option("--epsilon", sa.epsilon);
    solve->add_option("--n-max", sa.n_max, "subset-size cap of the low-activity enumeration");
    solve->add_option("--out", sa.out, "also write the result JSON here");
    solve->add_option("--threads", threads);

    EvalArgs ea;
    auto* eval = app.add_subcommand("eval", "expected cost of a tour");
    eval->add_option("--instance", ea.instance)->required();
    eval->add_option("--tour", ea.tour)->required();
    eval->add_option("--method", ea.method, "exact | mc | brute");
    eval->add_option("--samples", ea.samples);
    eval->add_option("--seed", ea.seed);
    eval->add_option("--threads", threads);

    BoundArgs ba;
    auto* bound = app.add_subcommand("bound", "build, solve or export a bound LP");
    bound->add_option("--family", ba.family, "sampling | mrr");
    bound->add_option("--alpha", ba.alpha);
    bound->add_option("--sigma", ba.sigma);
    bound->add_option("--beta", ba.beta);
    bound->add_option("--N", ba.n_buckets);
    bound->add_option("--a", ba.a);
    bound->add_flag("--solve", ba.solve);
    bound->add_option("--export", ba.export_path, "write the primal LP (CPLEX LP format)");
    bound->add_option("--export-dual", ba.export_dual, "write the dual LP (CPLEX LP format)");
    bound->add_option("--cert-out", ba.cert_out, "solve and write the rationalized dual certificate");

    CertifyArgs ca;
    auto* certify = app.add_subcommand("certify", "verify a dual certificate exactly");
    certify->add_option("--cert", ca.cert, "certificate JSON");
    certify->add_option("--solution", ca.solution, "external solver solution of the exported dual (name value lines)");
    certify->add_option("--family", ca.family, "kind of --solution: sampling | mrr");
    certify->add_option("--alpha", ca.alpha);
    certify->add_option("--sigma", ca.sigma);
    certify->add_option("--beta", ca.beta);
    certify->add_option("--N", ca.n_buckets);
    certify->add_option("--a", ca.a);
    certify->add_option("--safety", ca.safety, "scale multipliers by 1-s (y by (1-s)^2) before checking");
    certify->add_option("--cert-out", ca.cert_out, "write the (scaled) certificate as JSON");

    GenArgs ga;
    auto* gen = app.add_subcommand("gen", "generate a lower-bound instance");
    gen->add_option("--family", ga.family, "sampling-lb | mrr-lb")->required();
    gen->add_option("--gamma", ga.gamma);
    gen->add_option("--p", ga.p);
    gen->add_option("--n", ga.n);
    gen->add_option("--m", ga.m);
    gen->add_option("--out", ga.out);

    LbArgs la;
    auto* lb = app.add_subcommand("lb", "lower-bound constants");
    lb->add_option("--alpha", la.alpha, "TSP guarantee (repeatable)");
    lb->add_option("--gamma", la.gamma, "fix gamma instead of maximizing over [1,2]");
    lb->add_flag("--table", la.table, "rows for alpha = 1, 4/3, 1.4999");
    lb->add_option("--mrr-n", la.mrr_n, "group count of the master-route-ratio family");
    lb->add_option("--mrr-m", la.mrr_m, "group size of the master-route-ratio family");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitInput;
    }

    try {
        if (*solve) return cmd_solve(sa, out);
        if (*eval) return cmd_eval(ea, resolve_threads(threads), out);
        if (*bound) return cmd_bound(ba, out);
        if (*certify) return cmd_certify(ca, out);
        if (*gen) return cmd_gen(ga, out);
        if (*lb) return cmd_lb(la, out);
    } catch (const std::bad_alloc&) {
        err << "error: out of memory\n";
        return kExitBudget;
    } catch (const BudgetExceeded& e) {
        err << "error: " << e.what() << '\n';
        return kExitBudget;
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitBudget;
    }
    return kExitInput;
}

}  // namespace aptsp
