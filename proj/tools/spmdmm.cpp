// spmdmm: verify, benchmark and model the distributed matrix products.
//
// Machine-readable CSV goes to stdout (or --output); diagnostics to stderr.

#include "spmd/core/codec.hpp"
#include "spmd/core/context.hpp"
#include "spmd/costmodel/costmodel.hpp"
#include "spmd/errors.hpp"
#include "spmd/matmul/lazy_block.hpp"
#include "spmd/matmul/parallel.hpp"
#include "spmd/matmul/serial.hpp"
#include "spmd/transport/collectives.hpp"
#include "spmd/transport/inproc.hpp"
#include "spmd/transport/socket.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace spmd;

namespace {

constexpr double kVerifyTolerance = 1e-9;
constexpr int kInprocMaxQ = 4;
constexpr int kUsageError = 2;

struct RunConfig {
    std::string backend = "inproc";
    int q = 1;
    int n = 4;
    std::uint64_t seed = 42;
    std::optional<int> rank;
    std::string peers;
    std::string output;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void validate(const RunConfig& cfg)
{
    if (cfg.q < 1) {
        throw UsageError("--q must be at least 1");
    }
    if (cfg.n < 1 || cfg.n % cfg.q != 0) {
        throw UsageError("--n must be a positive multiple of --q (got n=" + std::to_string(cfg.n) +
                         ", q=" + std::to_string(cfg.q) + ")");
    }
    if (cfg.backend == "inproc") {
        if (cfg.q > kInprocMaxQ) {
            throw UsageError("inproc backend supports q <= " + std::to_string(kInprocMaxQ));
        }
        if (cfg.rank || !cfg.peers.empty()) {
            throw UsageError("--rank and --peers need --backend socket");
        }
    } else if (cfg.rank.has_value() != !cfg.peers.empty()) {
        throw UsageError("--rank and --peers go together");
    }
}

/// Writes to --output if given, else stdout.
void emit(const RunConfig& cfg, const std::string& text)
{
    if (cfg.output.empty()) {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream out(cfg.output);
    out << text;
    if (!out) {
        throw Error("cannot write " + cfg.output);
    }
}

/// Runs `program` on p = q^3 ranks of the configured backend and returns the
/// largest exit status.
int run_spmd(const RunConfig& cfg, const std::function<int(Endpoint&)>& program)
{
    const int p = cfg.q * cfg.q * cfg.q;
    if (cfg.backend == "inproc") {
        InProcWorld world(p);
        std::vector<int> codes(static_cast<std::size_t>(p), 0);
        world.run([&](Endpoint& ep) { codes[ep.rank().value] = program(ep); });
        return *std::max_element(codes.begin(), codes.end());
    }
    if (cfg.rank) {
        auto peers = read_peers_file(cfg.peers);
        if (static_cast<int>(peers.size()) != p) {
            throw UsageError("peers file lists " + std::to_string(peers.size()) + " ranks, q^3 = " +
                             std::to_string(p));
        }
        if (*cfg.rank < 0 || *cfg.rank >= p) {
            throw UsageError("--rank out of range");
        }
        SocketEndpoint ep(RankId(static_cast<std::uint32_t>(*cfg.rank)), std::move(peers));
        return program(ep);
    }
    const auto codes = launch_local(p, program);
    return *std::max_element(codes.begin(), codes.end());
}

using Algorithm = DistributedProduct (*)(Context&, std::uint64_t, int, int);

struct AlgoResult {
    std::string name;
    CommStats stats;   ///< world aggregate, excluding result assembly
    double seconds = 0;  ///< slowest rank
    std::optional<MatrixD> c;
};

/// Runs both parallel algorithms; the returned results are filled in on world rank 0 only.
std::vector<AlgoResult> run_algorithms(Endpoint& ep, const RunConfig& cfg)
{
    Context ctx(ep);
    std::vector<AlgoResult> results;
    for (const auto& [name, algorithm] :
         {std::pair<const char*, Algorithm>{"generic", &generic_parallel_multiply}, {"grid", &grid_parallel_multiply}}) {
        const CommStats before = ep.stats();
        const auto start = std::chrono::steady_clock::now();
        const auto product = algorithm(ctx, cfg.seed, cfg.n, cfg.q);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const CommStats d = ep.stats() - before;

        AlgoResult r{name, {}, 0, gather_result(ctx, product)};
        const auto mine = encode(std::pair<std::vector<std::uint64_t>, double>{
            {d.messages_sent, d.bytes_sent, d.rounds, d.collectives}, seconds});
        if (const auto all = gather(ctx.world(), 0, mine)) {
            std::vector<CommStats> per_rank;
            for (const auto& bytes : *all) {
                const auto [s, t] = decode<std::pair<std::vector<std::uint64_t>, double>>(bytes);
                per_rank.push_back({s.at(0), s.at(1), s.at(2), s.at(3)});
                r.seconds = std::max(r.seconds, t);
            }
            r.stats = aggregate(per_rank);
        }
        results.push_back(std::move(r));
    }
    return results;
}

int verify(const RunConfig& cfg)
{
    validate(cfg);
    const int p = cfg.q * cfg.q * cfg.q;
    return run_spmd(cfg, [&](Endpoint& ep) {
        auto results = run_algorithms(ep, cfg);
        if (ep.rank().value != 0) {
            return 0;
        }
        const MatrixD want = serial_multiply(generate_matrix(cfg.seed, MatrixId::a, cfg.n, cfg.q),
                                             generate_matrix(cfg.seed, MatrixId::b, cfg.n, cfg.q));
        std::ostringstream out;
        out << "algo,p,n,max_abs_error,messages,bytes,rounds\n";
        out.precision(6);
        bool ok = true;
        for (const auto& r : results) {
            const double err = max_abs_diff(r.c.value(), want);
            ok = ok && err <= kVerifyTolerance;
            out << r.name << ',' << p << ',' << cfg.n << ',' << err << ',' << r.stats.messages_sent << ','
                << r.stats.bytes_sent << ',' << r.stats.rounds << '\n';
            if (!(err <= kVerifyTolerance)) {
                std::cerr << r.name << ": max-abs error " << err << " exceeds " << kVerifyTolerance << '\n';
            }
        }
        emit(cfg, out.str());
        return ok ? 0 : 1;
    });
}

int bench(const RunConfig& cfg)
{
    validate(cfg);
    const int p = cfg.q * cfg.q * cfg.q;
    return run_spmd(cfg, [&](Endpoint& ep) {
        auto results = run_algorithms(ep, cfg);
        if (ep.rank().value != 0) {
            return 0;
        }
        const MatrixD a = generate_matrix(cfg.seed, MatrixId::a, cfg.n, cfg.q);
        const MatrixD b = generate_matrix(cfg.seed, MatrixId::b, cfg.n, cfg.q);
        const auto start = std::chrono::steady_clock::now();
        const MatrixD c = serial_multiply(a, b);
        const double serial_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        std::ostringstream out;
        out << "algo,p,n,seconds,messages,bytes,rounds\n";
        out << "serial,1," << cfg.n << ',' << serial_seconds << ",0,0,0\n";
        for (const auto& r : results) {
            out << r.name << ',' << p << ',' << cfg.n << ',' << r.seconds << ',' << r.stats.messages_sent << ','
                << r.stats.bytes_sent << ',' << r.stats.rounds << '\n';
        }
        emit(cfg, out.str());
        return c.size() == a.size() ? 0 : 1;
    });
}

struct ModelConfig {
    std::vector<long> p{1, 8, 27, 64};
    std::vector<double> n{8};
    double t_s = 1;
    double t_w = 1;
    double t_flop = 1;
    double iso_target = 0.8;
    std::string output;
};

int model(const ModelConfig& cfg)
{
    const cost::CostParams params{cfg.t_s, cfg.t_w, cfg.t_flop};
    params.validate();
    if (!(cfg.iso_target > 0 && cfg.iso_target < 1)) {
        throw UsageError("--iso-target must lie in (0, 1)");
    }

    std::ostringstream out;
    cost::write_csv_header(out);
    int status = 0;
    std::vector<long> cubes;
    for (cost::Model m : {cost::Model::generic, cost::Model::grid}) {
        for (long p : cfg.p) {
            for (double n : cfg.n) {
                try {
                    cost::write_csv_row(out, cost::to_string(m), cost::evaluate(m, params, n, p));
                } catch (const DomainError& e) {
                    out << cost::to_string(m) << ',' << p << ',' << n << ",,,,,\n";
                    std::cerr << cost::to_string(m) << " p=" << p << " n=" << n << ": " << e.what() << '\n';
                    status = 1;
                }
            }
        }
    }
    for (long p : cfg.p) {
        const bool cube = p >= 8 && [&] {
            try {
                return cost::cube_root(p) > 1;
            } catch (const DomainError&) {
                return false;
            }
        }();
        if (cube && std::find(cubes.begin(), cubes.end(), p) == cubes.end()) {
            cubes.push_back(p);
        }
    }
    std::sort(cubes.begin(), cubes.end());
    // Isoefficiency tables: c calibrated at the smallest p so that E = target there.
    if (!cubes.empty()) {
        for (cost::Model m : {cost::Model::generic, cost::Model::grid}) {
            for (cost::Growth g : {cost::Growth::isoefficiency, cost::Growth::linear}) {
                const std::string label = "iso-" + std::string(cost::to_string(m)) +
                                          (g == cost::Growth::linear ? "-linear" : "");
                const double c = cost::calibrate_constant(m, g, cubes.front(), cfg.iso_target, params);
                for (const auto& r : cost::iso_check(m, g, c, cubes, params)) {
                    cost::write_csv_row(out, label, r);
                }
            }
        }
    }
    RunConfig sink;
    sink.output = cfg.output;
    emit(sink, out.str());
    return status;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Distributed matrix multiplication on an SPMD runtime"};
    app.require_subcommand(1);

    RunConfig run;
    ModelConfig costs;
    const auto add_run_options = [&run](CLI::App* sub) {
        sub->add_option("--backend", run.backend, "Transport backend")->check(CLI::IsMember({"inproc", "socket"}));
        sub->add_option("--q", run.q, "Grid side; p = q^3 ranks");
        sub->add_option("--n", run.n, "Matrix side, a multiple of q");
        sub->add_option("--seed", run.seed, "Seed for the generated matrices");
        sub->add_option("--rank", run.rank, "This process's rank (socket backend, with --peers)");
        sub->add_option("--peers", run.peers, "File with one host:port per rank");
        sub->add_option("--output", run.output, "Write CSV here instead of stdout");
    };
    auto* verify_cmd = app.add_subcommand("verify", "Check both parallel products against the serial product");
    add_run_options(verify_cmd);
    auto* bench_cmd = app.add_subcommand("bench", "Time serial, generic and grid products");
    add_run_options(bench_cmd);

    auto* model_cmd = app.add_subcommand("model", "Evaluate the cost model");
    model_cmd->add_option("--p", costs.p, "Processor counts (perfect cubes)")->delimiter(',');
    model_cmd->add_option("--n", costs.n, "Matrix sides")->delimiter(',');
    model_cmd->add_option("--t-s", costs.t_s, "Message start-up time");
    model_cmd->add_option("--t-w", costs.t_w, "Per-word transfer time");
    model_cmd->add_option("--t-flop", costs.t_flop, "Time per multiply-add");
    model_cmd->add_option("--iso-target", costs.iso_target, "Efficiency at the smallest p for the iso tables");
    model_cmd->add_option("--output", costs.output, "Write CSV here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*verify_cmd) {
            return verify(run);
        }
        if (*bench_cmd) {
            return bench(run);
        }
        return model(costs);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
