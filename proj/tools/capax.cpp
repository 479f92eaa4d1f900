#include <capax/io.hpp>
#include <capax/oracle.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace capax;

namespace {

struct CommonOpts {
    std::string kernel_path;
    std::string shape_path;
    std::string matrix_path;
    std::string subset_path;
    std::string out_dir = ".";
    int resolution = 0;
    double tol = 1e-9;
    std::uint64_t seed = 7;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_geometry_or_matrix = true) {
    auto* kernel = cmd->add_option("--kernel", o.kernel_path, "kernel spec JSON");
    auto* shape = cmd->add_option("--shape", o.shape_path, "shape spec JSON (discretized to nodes)");
    auto* matrix =
        cmd->add_option("--matrix", o.matrix_path, "explicit Gram matrix JSON (entries array)");
    shape->excludes(matrix);
    matrix->excludes(kernel);
    cmd->add_option("--subset", o.subset_path, "subset spec JSON (default: all nodes)");
    cmd->add_option("--resolution", o.resolution,
                    "discretization resolution (overrides the shape file)");
    cmd->add_option("--tol", o.tol, "solver/check tolerance")->capture_default_str();
    cmd->add_option("--seed", o.seed, "seed for randomized checks")->capture_default_str();
    cmd->add_option("-o,--out", o.out_dir, "output directory")->capture_default_str();
    if (needs_geometry_or_matrix) {
        // a matrix kernel spec alone is also acceptable; validated at assembly time
    }
}

struct Problem {
    GramForm gram;
    NodeSet nodes;  // empty for pure matrix inputs
    bool has_nodes = false;
};

Matrix matrix_from_json(const nlohmann::json& j) {
    const nlohmann::json* rows = &j;
    if (j.is_object() && j.contains("entries")) rows = &j.at("entries");
    if (!rows->is_array() || rows->empty())
        throw std::invalid_argument("matrix file must hold a nonempty 2-D array");
    Matrix K(rows->size(), (*rows)[0].size());
    for (std::size_t i = 0; i < rows->size(); ++i) {
        Vector row = vector_from_json((*rows)[i], "matrix row");
        if (row.size() != K.cols()) throw std::invalid_argument("matrix rows have unequal lengths");
        K.row(static_cast<long>(i)) = row.transpose();
    }
    return K;
}

Problem assemble_problem(const CommonOpts& o) {
    Problem p;
    if (!o.matrix_path.empty()) {
        p.gram = gram_from_matrix(matrix_from_json(load_json(o.matrix_path)));
        return p;
    }
    if (o.kernel_path.empty())
        throw std::invalid_argument("need --kernel (with --shape for analytic kernels) or --matrix");
    Kernel kernel = parse_kernel(load_json(o.kernel_path));
    if (std::holds_alternative<MatrixKernel>(kernel)) {
        if (!o.shape_path.empty())
            throw std::invalid_argument("--shape does not apply to a matrix kernel");
        p.gram = gram_from_matrix(std::get<MatrixKernel>(kernel).entries);
        return p;
    }
    if (o.shape_path.empty())
        throw std::invalid_argument("analytic kernels need --shape to produce nodes");
    int file_res = 0;
    ShapeSpec shape = parse_shape(load_json(o.shape_path), file_res);
    int res = o.resolution > 0 ? o.resolution : file_res;
    if (res <= 0) res = shape.kind == ShapeSpec::Kind::sphere ? 400 : 9;
    p.nodes = discretize(shape, res);
    p.gram = assemble_gram(kernel, p.nodes);
    p.has_nodes = true;
    return p;
}

SubsetMask load_subset(const CommonOpts& o, int n) {
    if (o.subset_path.empty()) return SubsetMask::full(n);
    return parse_subset(load_json(o.subset_path), n);
}

void ensure_out(const std::string& dir) {
    if (!dir.empty() && dir != ".") fs::create_directories(dir);
}

int run_capacity(const CommonOpts& o, const std::string& formulation) {
    Problem p = assemble_problem(o);
    SubsetMask A = load_subset(o, p.gram.size());
    EquilibriumResult result;
    if (formulation == "primal")
        result = capacity_primal(p.gram, A, o.tol);
    else if (formulation == "dual")
        result = capacity_dual(p.gram, A, o.tol);
    else if (formulation == "obstacle")
        result = capacity_obstacle(p.gram, A, SubsetMask::full(p.gram.size()), o.tol);
    else {  // minmass
        SolveReport rep = capacity_min_mass(p.gram, A);
        if (rep.status == SolveStatus::skipped) {
            std::cerr << "min-mass formulation unavailable: maximum principles not certified for "
                         "this kernel (or the problem exceeds the dense LP size cap)\n";
            return 2;
        }
        result.capacity = rep.objective;
        result.robin = result.capacity > 0 ? 1.0 / result.capacity
                                           : std::numeric_limits<double>::infinity();
        result.gamma = DiscreteMeasure(rep.x, p.gram.node_set_id);
        double mass = result.gamma.mass();
        result.lambda = DiscreteMeasure(
            mass > 0 ? Vector(result.gamma.weights / mass) : result.gamma.weights,
            p.gram.node_set_id);
        result.xi = result.lambda;
        result.formulation = "minmass";
        result.report = rep;
    }
    ensure_out(o.out_dir);
    fs::path out(o.out_dir);
    write_equilibrium_json((out / "result.json").string(), p.gram, A, result);
    write_measure_csv((out / "weights.csv").string(), result.gamma.weights);
    std::cout << "capacity " << fmt17(result.capacity) << "\n";
    return result.report.status == SolveStatus::converged ? 0 : 2;
}

int run_balayage(const CommonOpts& o, const std::string& measure_path) {
    Problem p = assemble_problem(o);
    int n = p.gram.size();
    SubsetMask A = load_subset(o, n);
    DiscreteMeasure mu = read_measure_csv(measure_path, n);
    mu.node_set_id = p.gram.node_set_id;

    BalayageResult pr = sweep_projection(p.gram, mu, A);
    BalayageResult co = sweep_constrained(p.gram, mu, A);
    BalayageResult pe = sweep_potential_eq(p.gram, mu, A);
    double spread = std::max((pr.swept.weights - co.swept.weights).cwiseAbs().maxCoeff(),
                             (pr.swept.weights - pe.swept.weights).cwiseAbs().maxCoeff());
    CheckReport checks = verify_balayage(p.gram, mu, A, pr, o.tol, o.seed);

    nlohmann::json j;
    j["formulations"] = {balayage_result_json(pr, p.gram), balayage_result_json(co, p.gram),
                         balayage_result_json(pe, p.gram)};
    j["max_formulation_difference"] = spread;
    j["input_mass"] = mu.mass();
    j["verification"] = check_report_json(checks);
    ensure_out(o.out_dir);
    fs::path out(o.out_dir);
    std::ofstream(out / "balayage.json") << j.dump(2) << "\n";
    write_measure_csv((out / "swept.csv").string(), pr.swept.weights);
    std::cout << "swept mass " << fmt17(pr.swept.mass()) << "\n";
    bool ok = pr.report.status == SolveStatus::converged &&
              co.report.status == SolveStatus::converged &&
              pe.report.status == SolveStatus::converged;
    return ok ? 0 : 2;
}

int run_converge(const CommonOpts& o, int stages, const std::string& mode_name,
                 const std::string& strategy_name) {
    Problem p = assemble_problem(o);
    SubsetMask target = load_subset(o, p.gram.size());
    ExhaustionMode mode =
        mode_name == "decreasing" ? ExhaustionMode::decreasing : ExhaustionMode::increasing;
    ExhaustionStrategy strategy;
    if (strategy_name == "radial") {
        if (!p.has_nodes)
            throw std::invalid_argument("radial staging needs point geometry; use --strategy index");
        strategy = ExhaustionStrategy::radial;
    } else if (strategy_name == "index") {
        strategy = ExhaustionStrategy::index;
    } else {  // auto
        strategy = p.has_nodes ? ExhaustionStrategy::radial : ExhaustionStrategy::index;
    }
    NodeSet stub;
    if (!p.has_nodes) {
        stub.points = Matrix::Zero(p.gram.size(), 1);
        stub.dim = 1;
    }
    Exhaustion ex = build_exhaustion(p.has_nodes ? p.nodes : stub, target, stages, mode, strategy);
    ConvergenceReport rep = mode == ExhaustionMode::increasing
                                ? run_increasing(p.gram, ex, o.tol)
                                : run_decreasing(p.gram, ex.stages, o.tol);
    ensure_out(o.out_dir);
    fs::path out(o.out_dir);
    write_stage_csv((out / "stages.csv").string(), rep);
    nlohmann::json j;
    j["mode"] = mode_name;
    j["stages"] = stages;
    j["final_capacity"] = rep.rows.back().capacity;
    j["limit_capacity"] = rep.limit.capacity;
    j["checks"] = check_report_json(rep.checks);
    std::ofstream(out / "convergence.json") << j.dump(2) << "\n";
    std::cout << "final capacity " << fmt17(rep.rows.back().capacity) << "\n";
    return rep.checks.pass ? 0 : 2;
}

int run_verify(const CommonOpts& o, const std::string& suite, const std::string& measure_path) {
    Problem p = assemble_problem(o);
    int n = p.gram.size();
    SubsetMask A = load_subset(o, n);
    nlohmann::json j;
    j["suite"] = suite;
    bool pass = false;

    if (suite == "equilibrium") {
        CheckReport rep = verify_equilibrium_characterizations(p.gram, A, o.tol);
        j["report"] = check_report_json(rep);
        pass = rep.pass;
    } else if (suite == "balayage") {
        DiscreteMeasure mu = measure_path.empty()
                                 ? DiscreteMeasure(Vector::Constant(n, 1.0 / n), p.gram.node_set_id)
                                 : read_measure_csv(measure_path, n);
        mu.node_set_id = p.gram.node_set_id;
        BalayageResult swept = sweep_projection(p.gram, mu, A);
        CheckReport rep;
        rep.absorb(verify_balayage(p.gram, mu, A, swept, o.tol, o.seed), "sweep: ");
        rep.absorb(equilibrium_balayage_consistency(p.gram, A, SubsetMask::full(n), o.tol,
                                                    o.seed ^ 0x5ee7),
                   "consistency: ");
        j["report"] = check_report_json(rep);
        pass = rep.pass;
    } else if (suite == "convergence") {
        if (A.size() == 0) throw std::invalid_argument("convergence suite needs a nonempty subset");
        std::vector<SubsetMask> inc;
        int steps = std::min<int>(3, static_cast<int>(A.size()));
        for (int s = 1; s <= steps; ++s) {
            std::size_t count = (A.size() * static_cast<std::size_t>(s)) / steps;
            inc.emplace_back(std::vector<int>(A.indices.begin(),
                                              A.indices.begin() + static_cast<long>(count)));
        }
        Exhaustion ex;
        ex.stages = inc;
        ex.union_mask = A;
        ex.mode = ExhaustionMode::increasing;
        CheckReport rep;
        rep.absorb(run_increasing(p.gram, ex, o.tol).checks, "increasing: ");
        std::vector<SubsetMask> dec(inc.rbegin(), inc.rend());
        rep.absorb(run_decreasing(p.gram, dec, o.tol).checks, "decreasing: ");
        rep.absorb(energy_gap_check(p.gram, A, inc.front()), "gap: ");
        rep.absorb(potential_monotonicity_check(p.gram, A, inc.front(), o.tol), "monotonicity: ");
        j["report"] = check_report_json(rep);
        pass = rep.pass;
    } else if (suite == "principles") {
        PrincipleReport fr = check_frostman(p.gram, 200, std::min(o.tol, 1e-9),
                                            o.seed ^ 0xf005ba11u);
        PrincipleReport dom = check_domination(p.gram, 200, std::min(o.tol, 1e-9),
                                               o.seed ^ 0xd0131a7eu);
        j["frostman"] = principle_report_json(fr);
        j["domination"] = principle_report_json(dom);
        pass = fr.pass && dom.pass;
    } else {
        throw std::invalid_argument("unknown suite: " + suite);
    }
    j["pass"] = pass;
    ensure_out(o.out_dir);
    std::ofstream(fs::path(o.out_dir) / "verify.json") << j.dump(2) << "\n";
    std::cout << "suite " << suite << (pass ? " pass" : " fail") << "\n";
    return pass ? 0 : 2;
}

int run_calibrate(const CommonOpts& o, const std::string& cell_name, int cell_dim,
                  std::uint64_t samples) {
    if (o.kernel_path.empty()) throw std::invalid_argument("calibrate needs --kernel");
    Kernel kernel = parse_kernel(load_json(o.kernel_path));
    CellModel cell;
    cell.shape = cell_name == "disc" ? NodeSet::CellShape::disc : NodeSet::CellShape::cube;
    if (cell_dim > 0)
        cell.dim = cell_dim;
    else
        cell.dim = cell.shape == NodeSet::CellShape::disc ? 2 : std::max(1, kernel_space_dim(kernel));
    CalibrationResult r = self_energy_constant(kernel, cell, samples, o.seed);
    ensure_out(o.out_dir);
    std::ofstream out(fs::path(o.out_dir) / "calibration.json");
    out << "{\n";
    out << "  \"value\": " << fmt17(r.value) << ",\n";
    out << "  \"std_error\": " << fmt17(r.std_error) << ",\n";
    out << "  \"samples\": " << r.samples << "\n";
    out << "}\n";
    std::cout << "constant " << fmt17(r.value) << " +- " << fmt17(r.std_error) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"capax: discrete capacities, equilibrium measures, and balayage"};
    app.require_subcommand(1);

    CommonOpts cap_o, bal_o, con_o, ver_o, cal_o;
    std::string formulation = "dual";
    std::string measure_path, ver_measure_path;
    std::string mode = "increasing", strategy = "auto", suite;
    std::string cell_name = "cube";
    int stages = 3, cell_dim = 0;
    std::uint64_t samples = 400000;

    CLI::App* cap = app.add_subcommand("capacity", "capacity and equilibrium measure of a subset");
    add_common(cap, cap_o);
    cap->add_option("--formulation", formulation, "primal|dual|obstacle|minmass")
        ->check(CLI::IsMember({"primal", "dual", "obstacle", "minmass"}))
        ->capture_default_str();

    CLI::App* bal = app.add_subcommand("balayage", "sweep a measure onto a subset");
    bal_o.tol = 1e-7;
    add_common(bal, bal_o);
    bal->add_option("--measure", measure_path, "measure CSV (index,weight)")->required();

    CLI::App* con = app.add_subcommand("converge", "staged capacities along an exhaustion");
    con_o.tol = 1e-7;
    add_common(con, con_o);
    con->add_option("--stages", stages, "number of stages")
        ->check(CLI::Range(2, 1 << 20))
        ->capture_default_str();
    con->add_option("--mode", mode, "increasing|decreasing")
        ->check(CLI::IsMember({"increasing", "decreasing"}))
        ->capture_default_str();
    con->add_option("--strategy", strategy, "index|radial|auto")
        ->check(CLI::IsMember({"index", "radial", "auto"}))
        ->capture_default_str();

    CLI::App* ver = app.add_subcommand("verify", "run a property-check suite");
    ver_o.tol = 1e-7;
    add_common(ver, ver_o);
    ver->add_option("--suite", suite, "equilibrium|balayage|convergence|principles")
        ->check(CLI::IsMember({"equilibrium", "balayage", "convergence", "principles"}))
        ->required();
    ver->add_option("--measure", ver_measure_path, "measure CSV for the balayage suite");

    CLI::App* cal = app.add_subcommand("calibrate", "Monte Carlo cell self-energy constant");
    cal_o.seed = 0x5eedcafeull;
    add_common(cal, cal_o, false);
    cal->add_option("--cell", cell_name, "cube|disc")
        ->check(CLI::IsMember({"cube", "disc"}))
        ->capture_default_str();
    cal->add_option("--dim", cell_dim, "cell dimension (default: from kernel)");
    cal->add_option("--samples", samples, "Monte Carlo sample count")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (cap->parsed()) return run_capacity(cap_o, formulation);
        if (bal->parsed()) return run_balayage(bal_o, measure_path);
        if (con->parsed()) return run_converge(con_o, stages, mode, strategy);
        if (ver->parsed()) return run_verify(ver_o, suite, ver_measure_path);
        if (cal->parsed()) return run_calibrate(cal_o, cell_name, cell_dim, samples);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
