#include "amgmatch/hierarchy.hpp"
#include "amgmatch/krylov.hpp"
#include "amgmatch/mmio.hpp"
#include "amgmatch/partition.hpp"
#include "amgmatch/poisson.hpp"
#include "amgmatch/study.hpp"
#include "amgmatch/vcycle.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

namespace {

using namespace amgmatch;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNotConverged = 2;

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text << '\n';
}

void write_json(const std::string& path, const nlohmann::json& j) {
    write_text(path, j.dump(2));
}

PartitionScheme scheme_from_string(const std::string& s) {
    if (s == "contiguous") return PartitionScheme::contiguous;
    if (s == "sfc_morton") return PartitionScheme::sfc_morton;
    throw std::invalid_argument("unknown partition scheme: " + s);
}

struct SolveArgs {
    std::string matrix;
    std::string rhs;
    std::string prec = "none";
    double tol = 1e-3;
    int max_iters = 1000;
    int ranks = 1;
    std::string out;
};

int run_solve(const SolveArgs& args) {
    const CsrMatrix a = read_matrix_market_file(args.matrix);
    if (a.nrows != a.ncols) {
        std::cerr << "solve: matrix must be square\n";
        return kExitInputError;
    }
    Vector b = Vector::Ones(a.nrows);
    if (!args.rhs.empty()) {
        const CsrMatrix rb = read_matrix_market_file(args.rhs);
        if (rb.ncols != 1 || rb.nrows != a.nrows)
            throw std::invalid_argument("solve: rhs must be an n-by-1 matrix");
        b = to_dense(rb).col(0);
    }

    const PrecLabel label = prec_label_from_string(args.prec);
    const RankPartition part =
        make_partition(a.nrows, args.ranks, PartitionScheme::contiguous);
    const Vector x0 = Vector::Zero(a.nrows);

    std::pair<Vector, SolveReport> result;
    nlohmann::json hierarchy_info;
    if (label == PrecLabel::NONE)
        result = cg_solve(a, b, CgPreconditioner::none, args.tol,
                          args.max_iters, x0);
    else if (label == PrecLabel::JACOBI)
        result = cg_solve(a, b, CgPreconditioner::jacobi, args.tol,
                          args.max_iters, x0);
    else {
        const PreconditionerConfig config =
            PreconditionerConfig::from_label(label);
        const AmgHierarchy h = build_hierarchy(a, part, config);
        hierarchy_info = hierarchy_summary(h);
        const VCyclePreconditioner prec(h);
        result = fcg_solve(a, b, prec.as_prec(), args.tol, args.max_iters, x0);
    }

    nlohmann::json report = report_to_json(result.second);
    report["matrix"] = args.matrix;
    report["n"] = a.nrows;
    report["preconditioner"] = to_string(label);
    report["tol"] = args.tol;
    if (!hierarchy_info.is_null()) report["hierarchy"] = hierarchy_info;
    write_json(args.out, report);
    return result.second.converged ? kExitOk : kExitNotConverged;
}

struct BenchArgs {
    std::string mode = "strong";
    std::string problem = "poisson3d";
    std::vector<index_t> sizes;
    std::vector<int> ranks = {1};
    std::vector<std::string> precs = {"mlvsmatch3"};
    double tol = 1e-3;
    int max_iters = 1000;
    int steps = 20;
    std::uint64_t seed = 0;
    std::string scheme = "contiguous";
    std::string json_out;
    std::string csv_out;
};

int run_bench(const BenchArgs& args) {
    StudySpec spec;
    spec.mode = study_mode_from_string(args.mode);
    spec.problem = problem_from_string(args.problem);
    spec.sizes = args.sizes;
    spec.ranks = args.ranks;
    spec.tol = args.tol;
    spec.max_iters = args.max_iters;
    spec.time_steps = args.steps;
    spec.seed = args.seed;
    spec.scheme = scheme_from_string(args.scheme);
    if (const char* env = std::getenv("BENCH_SEED"))
        spec.seed = std::stoull(env);

    std::vector<PreconditionerConfig> configs;
    for (const std::string& p : args.precs)
        configs.push_back(
            PreconditionerConfig::from_label(prec_label_from_string(p)));

    const StudyReport report = run_study(spec, configs);
    write_json(args.json_out, study_to_json(report));
    if (!args.csv_out.empty()) write_text(args.csv_out, study_to_csv(report));
    return report.all_converged ? kExitOk : kExitNotConverged;
}

struct InfoArgs {
    std::string matrix;
    std::string problem = "poisson3d";
    index_t n = 0;
    std::string prec = "mlvsmatch3";
    int ranks = 1;
    std::string scheme = "contiguous";
    std::string out;
};

int run_info(const InfoArgs& args) {
    CsrMatrix a;
    RankPartition part;
    if (!args.matrix.empty()) {
        a = read_matrix_market_file(args.matrix);
        part = make_partition(a.nrows, args.ranks,
                              PartitionScheme::contiguous);
    } else {
        if (args.n < 2)
            throw std::invalid_argument(
                "hierarchy-info: provide --matrix or --n >= 2");
        const ProblemKind kind = problem_from_string(args.problem);
        const int dim = problem_dim(kind);
        a = gen_poisson(dim, args.n).a;
        part = make_partition(a.nrows, args.ranks,
                              scheme_from_string(args.scheme),
                              poisson_dims(dim, args.n));
    }
    const PreconditionerConfig config =
        PreconditionerConfig::from_label(prec_label_from_string(args.prec));
    const AmgHierarchy h = build_hierarchy(a, part, config);
    write_json(args.out, hierarchy_summary(h));
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse AMG solver and scaling benchmark harness"};
    app.require_subcommand(1);

    SolveArgs solve_args;
    CLI::App* solve = app.add_subcommand(
        "solve", "Solve a MatrixMarket system (rhs defaults to all-ones)");
    solve->add_option("--matrix", solve_args.matrix, "MatrixMarket file")
        ->required();
    solve->add_option("--rhs", solve_args.rhs,
                      "Right-hand side as an n-by-1 MatrixMarket file");
    solve->add_option("--prec", solve_args.prec,
                      "none|jacobi|mlvsmatch3|mlvsmatch4|mlvsbm");
    solve->add_option("--tol", solve_args.tol, "Relative residual tolerance");
    solve->add_option("--max-iters", solve_args.max_iters, "Iteration cap");
    solve->add_option("--ranks", solve_args.ranks, "Simulated rank count");
    solve->add_option("--out", solve_args.out, "Report path (default stdout)");

    BenchArgs bench_args;
    CLI::App* bench = app.add_subcommand(
        "bench", "Run a strong/weak scaling study on generated problems");
    bench->add_option("--mode", bench_args.mode, "strong|weak");
    bench->add_option("--problem", bench_args.problem,
                      "poisson1d|poisson2d|poisson3d");
    bench->add_option("--n", bench_args.sizes, "Points per side (repeatable)")
        ->required();
    bench->add_option("--ranks", bench_args.ranks,
                      "Simulated rank counts (repeatable)");
    bench->add_option("--prec", bench_args.precs,
                      "Preconditioner labels (repeatable)");
    bench->add_option("--tol", bench_args.tol, "Relative residual tolerance");
    bench->add_option("--max-iters", bench_args.max_iters, "Iteration cap");
    bench->add_option("--steps", bench_args.steps,
                      "Warm-started solves per cell");
    bench->add_option("--seed", bench_args.seed,
                      "Perturbation seed (env BENCH_SEED overrides)");
    bench->add_option("--scheme", bench_args.scheme,
                      "contiguous|sfc_morton row partitioning");
    bench->add_option("--json", bench_args.json_out,
                      "JSON report path (default stdout)");
    bench->add_option("--csv", bench_args.csv_out, "CSV report path");
    bench->set_config("--config", "",
                      "Config file with key=value lines (flags override)");

    InfoArgs info_args;
    CLI::App* info = app.add_subcommand(
        "hierarchy-info", "Build a hierarchy and dump its summary");
    info->add_option("--matrix", info_args.matrix, "MatrixMarket file");
    info->add_option("--problem", info_args.problem,
                     "poisson1d|poisson2d|poisson3d");
    info->add_option("--n", info_args.n, "Points per side");
    info->add_option("--prec", info_args.prec, "mlvsmatch3|mlvsmatch4|mlvsbm");
    info->add_option("--ranks", info_args.ranks, "Simulated rank count");
    info->add_option("--scheme", info_args.scheme, "contiguous|sfc_morton");
    info->add_option("--out", info_args.out, "Report path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInputError;
    }

    try {
        if (app.got_subcommand(solve)) return run_solve(solve_args);
        if (app.got_subcommand(bench)) return run_bench(bench_args);
        return run_info(info_args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInputError;
    }
}
