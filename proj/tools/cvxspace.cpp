#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <tbb/global_control.h>

#include "cvxspace/report.hpp"

using namespace cvxspace;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0, kComputeError = 1, kUsageError = 2;

struct Usage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input files read by this run, with the provenance recorded in them.
json g_inputs = json::array();

/// Resolved options of the active subcommand chain, defaults included.
json config_echo(const CLI::App* app)
{
    json j = json::object();
    for (const CLI::App* a = app; a != nullptr; a = a->get_parent()) {
        for (const CLI::Option* o : a->get_options()) {
            if (o->get_lnames().empty() || o->get_lnames().front() == "help")
                continue;
            const std::string name = o->get_lnames().front();
            if (j.contains(name))
                continue;
            if (o->count() > 0) {
                const auto& res = o->results();
                j[name] = res.size() == 1 ? json(res.front()) : json(res);
            } else if (!o->get_default_str().empty()) {
                j[name] = o->get_default_str();
            }
        }
    }
    return j;
}

std::string command_path(const CLI::App* app)
{
    std::string s;
    for (const CLI::App* a = app; a != nullptr && a->get_parent() != nullptr; a = a->get_parent())
        s = a->get_name() + (s.empty() ? "" : " " + s);
    return s;
}

/// Wraps a result with version, command and config echo.
json artifact(const CLI::App* app, json result)
{
    return {{"cvxspace_version", CVXSPACE_VERSION},
            {"command", command_path(app)},
            {"config", config_echo(app)},
            {"provenance", {{"inputs", g_inputs}}},
            {"result", std::move(result)}};
}

void emit(const json& j, const std::string& out)
{
    const std::string text = j.dump(2);
    if (out.empty())
        std::cout << text << "\n";
    else
        write_text_file(out, text);
}

ConvexBody load_body(const std::string& path)
{
    ParsedBody p = parse_body_file_checked(path);
    g_inputs.push_back({{"file", path}, {"provenance", p.body.provenance()}, {"vertices", p.body.size()}});
    for (const std::string& w : p.warnings)
        std::cerr << "warning: " << w << "\n";
    return std::move(p.body);
}

FunctionalSpec functional_of(const std::string& s) { return FunctionalSpec::of(parse_functional_id(s)); }

std::vector<double> parse_list(const std::string& s)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        out.push_back(std::stod(tok));
    if (out.empty())
        throw Usage("empty list '" + s + "'");
    return out;
}

DensityOptions density_options(std::uint64_t seed, int budget)
{
    DensityOptions d;
    d.search.seed = seed;
    if (budget > 0)
        d.search.starts = std::max(1, budget / d.search.evaluations_per_start);
    return d;
}

DensityReport run_density(const std::string& f, const ConvexBody& k, const DensityOptions& d)
{
    if (f == "delta")
        return delta_lattice(k, d);
    if (f == "theta")
        return theta_lattice(k, d);
    if (f == "phi")
        return phi_lattice(k, d);
    throw Usage("unknown functional '" + f + "' (delta, theta or phi)");
}

std::vector<ConvexBody> load_family(const std::vector<std::string>& paths)
{
    std::vector<ConvexBody> out;
    for (const std::string& p : paths)
        out.push_back(place_in_normalized_space(load_body(p)).with_provenance(p));
    if (out.empty())
        out = detail::supderivative_bases(0);
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Lattice densities and metrics on planar convex bodies"};
    app.set_version_flag("--version", std::string(CVXSPACE_VERSION));
    app.set_config("--config", "", "Key-value config file; flags on the command line take precedence");
    app.require_subcommand(1);
    app.fallthrough();
    int threads = 0;
    std::string out;
    std::uint64_t seed = 0;
    app.add_option("--threads", threads, "Worker threads (0: all cores); results do not depend on it");
    app.add_option("--seed", seed, "Seed for every randomized step")->capture_default_str();
    app.add_option("--out", out, "Write the artifact here instead of stdout");

    std::function<void()> action;
    CLI::App* active = nullptr;
    auto bind = [&](CLI::App* sub, std::function<void()> fn) {
        sub->callback([&, sub, fn = std::move(fn)] {
            active = sub;
            action = fn;
        });
    };

    // body
    CLI::App* body = app.add_subcommand("body", "Generate, inspect or normalize bodies")->require_subcommand(1);
    std::string body_name = "unit_square", body_path;
    int resolution = 256;
    CLI::App* body_make = body->add_subcommand("make", "Named body: unit_square, unit_edge_hexagon, "
                                                       "unit_right_triangle, equilateral_triangle, stromquist_D, "
                                                       "smoothed_octagon, regular_octagon, disk, polygon<k>");
    body_make->add_option("--name", body_name)->required();
    body_make->add_option("--resolution", resolution)->capture_default_str();
    bind(body_make, [&] {
        const ConvexBody k = body_by_name(body_name, resolution);
        if (out.empty())
            std::cout << body_to_json_text(k) << "\n";
        else
            write_body_file(out, k);
    });
    CLI::App* body_show = body->add_subcommand("show", "Validate a body file and print its summary");
    body_show->add_option("--body", body_path)->required();
    bind(body_show, [&] {
        const ConvexBody k = load_body(body_path);
        const double inner = k.inradius_about(k.centroid()), outer = k.circumradius_about(k.centroid());
        emit(artifact(body_show, {{"vertices", k.size()},
                                  {"area", k.area()},
                                  {"symmetric", k.symmetric()},
                                  {"centroid", vec_to_json(k.centroid())},
                                  {"inradius_about_centroid", inner},
                                  {"circumradius_about_centroid", outer},
                                  {"in_normalized_space", in_normalized_space(k)},
                                  {"provenance", k.provenance()}}),
             out);
    });
    CLI::App* body_norm = body->add_subcommand("normalize", "John-normalize a body (unit disk <= K <= 2 disk)");
    body_norm->add_option("--body", body_path)->required();
    bind(body_norm, [&] {
        const ConvexBody k = john_normalize(load_body(body_path)).body;
        if (out.empty())
            std::cout << body_to_json_text(k) << "\n";
        else
            write_body_file(out, k);
    });

    // dist
    CLI::App* dist = app.add_subcommand("dist", "Hausdorff or Banach-Mazur distance between two bodies");
    std::string metric = "bm", path_a, path_b;
    int budget = 0;
    dist->add_option("--metric", metric, "hausdorff | bm")->capture_default_str();
    dist->add_option("--a", path_a)->required();
    dist->add_option("--b", path_b)->required();
    dist->add_option("--budget", budget, "Objective evaluations for the BM search (0: default)");
    bind(dist, [&] {
        const ConvexBody a = load_body(path_a), b = load_body(path_b);
        if (metric == "hausdorff") {
            emit(artifact(dist, to_json(hausdorff(a, b))), out);
            return;
        }
        if (metric != "bm")
            throw Usage("unknown metric '" + metric + "' (hausdorff or bm)");
        BmOptions o;
        o.seed = seed;
        if (budget > 0)
            o.budget = budget;
        emit(artifact(dist, to_json(bm_distance(a, b, o))), out);
    });

    // lattice
    CLI::App* lattice = app.add_subcommand("lattice", "Lattice optimization")->require_subcommand(1);
    CLI::App* lattice_opt = lattice->add_subcommand("opt", "Densest packing, thinnest covering or min rho'/rho");
    std::string objective = "pack";
    lattice_opt->add_option("--body", body_path)->required();
    lattice_opt->add_option("--objective", objective, "pack | cover | phi")->capture_default_str();
    lattice_opt->add_option("--budget", budget, "Total objective evaluations (0: default)");
    bind(lattice_opt, [&] {
        const ConvexBody k = load_body(body_path);
        const LatticeObjective o = objective == "pack"    ? LatticeObjective::densest_packing
                                   : objective == "cover" ? LatticeObjective::thinnest_covering
                                   : objective == "phi"   ? LatticeObjective::min_phi
                                                          : throw Usage("unknown objective '" + objective + "'");
        const DensityOptions d = density_options(seed, budget);
        const LatticeOptimum lo = optimize_lattice(k, o, d.search);
        json r = to_json(lo, o);
        r["certificate"]["is_packing"] = is_packing(k.translated(-k.centroid()), lo.lattice.scaled(1.0 - 1e-9));
        emit(artifact(lattice_opt, r), out);
    });

    // density
    CLI::App* density = app.add_subcommand("density", "Lattice packing/covering density or phi")->require_subcommand(0, 1);
    std::string functional = "delta", bodies_dir;
    density->add_option("--functional", functional, "delta | theta | phi")->capture_default_str();
    density->add_option("--body", body_path);
    density->add_option("--bodies", bodies_dir, "Directory of body files: CSV batch mode (use --out for the CSV)");
    density->add_option("--budget", budget, "Lattice-search evaluations (0: default)");
    CLI::App* density_suite = density->add_subcommand("suite", "Inequalities between delta, theta and phi");
    density_suite->add_option("--body", body_path)->required();
    bind(density_suite, [&] {
        InequalityOptions io;
        io.density = density_options(seed, budget);
        emit(artifact(density_suite, to_json(inequality_suite(load_body(body_path), io))), out);
    });
    density->callback([&] {
        if (active != nullptr)
            return;
        active = density;
        action = [&] {
            const DensityOptions d = density_options(seed, budget);
            if (!bodies_dir.empty()) {
                std::vector<fs::path> files;
                for (const auto& e : fs::directory_iterator(bodies_dir))
                    if (e.path().extension() == ".json")
                        files.push_back(e.path());
                std::sort(files.begin(), files.end());
                std::ostringstream csv;
                csv << "# cvxspace " << CVXSPACE_VERSION << " density --functional " << functional << " --seed " << seed
                    << "\nfile,functional,value,method,upper_bound,cross_check_gap,error\n";
                for (const fs::path& p : files) {
                    try {
                        const DensityReport r = run_density(functional, load_body(p.string()), d);
                        csv << p.filename().string() << ',' << functional << ',' << format_double(r.value) << ','
                            << to_string(r.method) << ',' << r.upper_bound << ',' << format_double(r.cross_check_gap)
                            << ",\n";
                    } catch (const Error& e) {
                        std::string msg = e.what();
                        std::replace(msg.begin(), msg.end(), ',', ';');
                        csv << p.filename().string() << ',' << functional << ",,,,," << msg << '\n';
                    }
                }
                if (out.empty())
                    std::cout << csv.str();
                else
                    write_text_file(out, csv.str());
                return;
            }
            if (body_path.empty())
                throw Usage("density needs --body or --bodies");
            emit(artifact(density, to_json(run_density(functional, load_body(body_path), d))), out);
        };
    });

    // analyze
    CLI::App* analyze = app.add_subcommand("analyze", "Supderivative, growth-bound and Lipschitz scans")->require_subcommand(1);
    std::string f_name = "delta", csv_path, bound_kind = "T3";
    double radius = 0.05, lc = 0.0, ld = 0.0;
    int samples = 16, pairs = 100;
    std::vector<std::string> family;
    auto common = [&](CLI::App* s) {
        s->add_option("--f", f_name, "delta | theta | phi | combo")->capture_default_str();
        s->add_option("--metric", metric, "hausdorff | bm")->capture_default_str();
        s->add_option("--csv", csv_path, "Per-sample CSV rows");
    };
    auto write_csv = [&](const std::vector<ScanReport>& reps) {
        if (csv_path.empty())
            return;
        std::ofstream os(csv_path);
        if (!os)
            throw Error(ErrorKind::schema, "cli", csv_path + ": cannot write file");
        os << "# cvxspace " << CVXSPACE_VERSION << " seed " << seed << "\n";
        for (std::size_t i = 0; i < reps.size(); ++i)
            write_scan_csv(os, reps[i], i == 0);
    };
    CLI::App* supd = analyze->add_subcommand("supd", "Supderivative estimate at a base body");
    common(supd);
    supd->add_option("--body", body_path, "Base body (default: the 128-gon)");
    supd->add_option("--radius", radius)->capture_default_str();
    supd->add_option("--samples", samples, "Samples per radius (r, r/2, r/4)")->capture_default_str();
    bind(supd, [&] {
        const ConvexBody base = place_in_normalized_space(body_path.empty() ? make_disk(128) : load_body(body_path));
        SupderivativeOptions o;
        o.radius = radius;
        o.samples = samples;
        o.seed = seed;
        const ScanReport r = supderivative_estimate(functional_of(f_name), base, parse_metric(metric), o);
        write_csv({r});
        emit(artifact(supd, to_json(r)), out);
    });
    CLI::App* bounds = analyze->add_subcommand("bounds", "Growth bounds on random pairs (T2 Hausdorff, T3 BM, T4 phi)");
    bounds->add_option("--kind", bound_kind, "T2 | T3 | T4")->capture_default_str();
    bounds->add_option("--pairs", pairs)->capture_default_str();
    bounds->add_option("--csv", csv_path, "Per-entry CSV rows");
    bind(bounds, [&] {
        const GrowthBound kind = parse_growth_bound(bound_kind);
        const std::vector<BoundCheck> checks = parallel_map<BoundCheck>(static_cast<std::size_t>(std::max(pairs, 0)),
                                                                        [&](std::size_t i) {
            std::mt19937_64 rng = task_rng(seed, i);
            std::uniform_real_distribution<double> u(0.0, 1.0);
            const bool sym = kind == GrowthBound::phi_exponential || i % 2 == 0;
            BoundCheckOptions bo;
            bo.seed = seed + i;
            if (kind == GrowthBound::hausdorff_power) {
                for (;;) {
                    const ConvexBody k0 = random_normalized_body(rng, sym, 16);
                    const ConvexBody k = bump_perturbation(k0, 0.02 + 0.2 * u(rng), 16, rng);
                    if (in_normalized_space(k))
                        return theorem_bound_check(kind, k, k0, bo);
                }
            }
            const ConvexBody k0 = random_normalized_body(rng, sym, 16);
            const ConstructivePair p = constructive_pair(k0, std::exp(0.02 + 0.48 * u(rng)), 6, true, rng);
            bo.witness_ratio = p.ratio;
            return theorem_bound_check(kind, p.k2, p.k1, bo);
        });
        std::size_t failures = 0;
        json rows = json::array();
        std::ostringstream csv;
        csv << "# cvxspace " << CVXSPACE_VERSION << " seed " << seed << "\npair,distance,functional,direction,lhs,rhs,pass\n";
        for (std::size_t i = 0; i < checks.size(); ++i) {
            failures += !checks[i].pass;
            rows.push_back(to_json(checks[i]));
            for (const BoundEntry& e : checks[i].entries)
                csv << i << ',' << format_double(checks[i].distance) << ',' << e.functional << ',' << e.direction << ','
                    << format_double(e.lhs) << ',' << format_double(e.rhs) << ',' << e.pass << '\n';
        }
        if (!csv_path.empty())
            write_text_file(csv_path, csv.str());
        emit(artifact(bounds, {{"bound", to_string(kind)}, {"pairs", checks.size()}, {"failures", failures},
                               {"pass", failures == 0}, {"checks", rows}}),
             out);
    });
    CLI::App* lip = analyze->add_subcommand("lipschitz", "|f(K1) - f(K2)| <= c dist on random pairs with dist <= d");
    common(lip);
    lip->add_option("--pairs", pairs)->capture_default_str();
    lip->add_option("--c", lc, "Constant (default: the explicit constant for f and metric)");
    lip->add_option("--d", ld, "Distance limit (default: the explicit one)");
    bind(lip, [&] {
        const FunctionalSpec f = functional_of(f_name);
        const MetricKind m = parse_metric(metric);
        const auto table = lipschitz_constants(f.id, m);
        if ((lc <= 0.0 || ld <= 0.0) && !table)
            throw Usage("no explicit constants for this functional and metric; pass --c and --d");
        LipschitzOptions o;
        o.seed = seed;
        const ScanReport r = lipschitz_scan(f, m, pairs, lc > 0.0 ? lc : table->c, ld > 0.0 ? ld : table->d, o);
        write_csv({r});
        emit(artifact(lip, to_json(r)), out);
    });
    CLI::App* smax = analyze->add_subcommand("smax", "Max supderivative over a family, with pairwise replay");
    common(smax);
    smax->add_option("--bodies", family, "Body files (default: ten standard bases)");
    smax->add_option("--radius", radius)->capture_default_str();
    smax->add_option("--samples", samples)->capture_default_str();
    bind(smax, [&] {
        SupderivativeOptions o;
        o.radius = radius;
        o.samples = samples;
        o.seed = seed;
        std::vector<ConvexBody> fam = load_family(family);
        const FunctionalSpec f = functional_of(f_name);
        if (f.needs_symmetric())
            std::erase_if(fam, [](const ConvexBody& k) { return !k.symmetric(); });
        const SmaxReport r = sup_derivative_max_scan(f, fam, parse_metric(metric), o);
        write_csv(r.per_body);
        emit(artifact(smax, to_json(r)), out);
    });

    // net
    CLI::App* net = app.add_subcommand("net", "Finite nets of K^{2*}")->require_subcommand(1);
    double beta = 0.5;
    std::string net_metric = "hstar", net_path, cache_path, betas = "0.5,0.35,0.25";
    std::size_t probes = 500, max_members = 5000;
    CLI::App* net_build = net->add_subcommand("build", "Build a beta-net");
    net_build->add_option("--beta", beta)->capture_default_str();
    net_build->add_option("--metric", net_metric, "hstar | bm")->capture_default_str();
    bind(net_build, [&] {
        if (out.empty())
            throw Usage("net build needs --out");
        const Net n = build_net(beta, parse_net_metric(net_metric), seed);
        write_net_file(out, n, {{"cvxspace_version", CVXSPACE_VERSION}, {"command", "net build"}, {"config", config_echo(net_build)}});
        std::cerr << n.size() << " members written to " << out << "\n";
    });
    CLI::App* net_cert = net->add_subcommand("certify", "Probe a freshly built beta-net");
    net_cert->add_option("--beta", beta)->capture_default_str();
    net_cert->add_option("--metric", net_metric, "hstar | bm")->capture_default_str();
    net_cert->add_option("--probes", probes)->capture_default_str();
    bind(net_cert, [&] {
        const Net n = build_net(beta, parse_net_metric(net_metric), seed);
        json r = to_json(certify_net(n, probes, seed));
        r["construction"] = construction_to_json(n.construction);
        r["chain"] = to_json(packing_covering_check(n.bodies, beta, 3000, seed));
        emit(artifact(net_cert, r), out);
    });
    CLI::App* net_sum = net->add_subcommand("sum", "Mean of a functional over the members of a net file");
    net_sum->add_option("--net", net_path)->required();
    net_sum->add_option("--f", f_name)->capture_default_str();
    net_sum->add_option("--cache", cache_path, "Per-member CSV cache");
    bind(net_sum, [&] {
        IntegralSumOptions o;
        o.cache_path = cache_path;
        emit(artifact(net_sum, to_json(integral_sum(read_net_file(net_path), functional_of(f_name), o))), out);
    });
    CLI::App* net_study = net->add_subcommand("study", "Integral sums over nets of decreasing beta (exploratory)");
    net_study->add_option("--f", f_name)->capture_default_str();
    net_study->add_option("--betas", betas)->capture_default_str();
    net_study->add_option("--metric", net_metric, "hstar | bm")->capture_default_str();
    net_study->add_option("--max-members", max_members, "Nets above this size are not evaluated (0: no limit)")
        ->capture_default_str();
    net_study->add_option("--cache", cache_path, "Per-member CSV cache");
    bind(net_study, [&] {
        ConvergenceOptions o;
        o.metric = parse_net_metric(net_metric);
        o.max_members = max_members;
        o.sum.cache_path = cache_path;
        emit(artifact(net_study, to_json(convergence_study(functional_of(f_name), parse_list(betas), seed, o))), out);
    });

    // verify
    CLI::App* verify = app.add_subcommand("verify", "Run the acceptance suite and print a pass/fail table");
    std::string suite = "paper";
    std::vector<int> only;
    verify->add_option("--suite", suite, "paper")->capture_default_str();
    verify->add_option("--only", only, "Criterion numbers to run (default: all)")->delimiter(',');
    bind(verify, [&] {
        if (suite != "paper")
            throw Usage("unknown suite '" + suite + "'");
        SuiteOptions so;
        if (seed != 0)
            so.seed = seed;
        so.only = std::set<int>(only.begin(), only.end());
        so.on_result = [](const CriterionResult& r) { std::cout << format_criterion(r) << std::flush; };
        const std::vector<CriterionResult> res = run_paper_suite(so);
        std::size_t passed = 0;
        json js = json::array();
        for (const CriterionResult& r : res) {
            passed += r.pass;
            js.push_back(to_json(r));
        }
        std::cout << passed << "/" << res.size() << " criteria passed\n";
        if (!out.empty())
            emit(artifact(verify, js), out);
        if (passed != res.size())
            throw Error(ErrorKind::inconsistent_oracles, "verify", std::to_string(res.size() - passed) + " criteria failed");
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsageError;
    }
    std::unique_ptr<tbb::global_control> limit;
    if (threads > 0)
        limit = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism,
                                                      static_cast<std::size_t>(threads));
    try {
        action();
        return kOk;
    } catch (const Usage& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsageError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        const bool usage = e.kind() == ErrorKind::invalid_parameter || e.kind() == ErrorKind::schema;
        return usage ? kUsageError : kComputeError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kComputeError;
    }
}
