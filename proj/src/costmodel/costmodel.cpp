#include "spmd/costmodel/costmodel.hpp"

#include "spmd/errors.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace spmd::cost {

void CostParams::validate() const
{
    if (t_s < 0 || t_w < 0 || t_flop < 0) {
        throw DomainError("cost parameters must be non-negative");
    }
}

double comm_cost(const CostParams& params, double m)
{
    params.validate();
    if (m < 0) {
        throw DomainError("message size must be non-negative");
    }
    return params.t_s + params.t_w * m;
}

CollectiveCosts collective_costs(const CostParams& params, long p, double m, const LambdaCost& t_lambda)
{
    if (p < 1) {
        throw DomainError("processor count must be at least 1");
    }
    const double per_message = comm_cost(params, m);
    const double log_p = std::log2(static_cast<double>(p));
    const double op = t_lambda ? t_lambda(m) : 0.0;
    return {
        per_message * log_p,
        log_p * (per_message + op),
        params.t_s * log_p + params.t_w * m * static_cast<double>(p - 1),
        per_message,
    };
}

long cube_root(long p)
{
    if (p < 1) {
        throw DomainError("processor count must be at least 1, got " + std::to_string(p));
    }
    const long q = std::lround(std::cbrt(static_cast<double>(p)));
    for (long c = std::max(1L, q - 1); c <= q + 1; ++c) {
        if (c * c * c == p) {
            return c;
        }
    }
    throw DomainError("p=" + std::to_string(p) + " is not a perfect cube");
}

std::string_view to_string(Model model)
{
    return model == Model::generic ? "generic" : "grid";
}

namespace {

void require_size(double n)
{
    if (!(n > 0)) {
        throw DomainError("matrix side must be positive");
    }
}

}  // namespace

double generic_tp(double n, long p)
{
    require_size(n);
    const auto q = static_cast<double>(cube_root(p));
    const double log_p = std::log2(static_cast<double>(p));
    const double pp = static_cast<double>(p);
    return 4.0 * q * q + n * n * n / pp + (log_p + (n * n / (q * q)) * log_p) / 3.0;
}

double generic_to(double n, long p)
{
    require_size(n);
    const auto q = static_cast<double>(cube_root(p));
    const double log_p = std::log2(static_cast<double>(p));
    const double pp = static_cast<double>(p);
    return 4.0 * pp * q * q + pp / 3.0 * (log_p + (n * n / (q * q)) * log_p);
}

double grid_tp(double n, long p)
{
    require_size(n);
    const auto q = static_cast<double>(cube_root(p));
    const double log_p = std::log2(static_cast<double>(p));
    return n * n * n / static_cast<double>(p) + log_p + (n * n / (q * q)) * log_p;
}

double parallel_time(Model model, const CostParams& params, double n, long p)
{
    params.validate();
    require_size(n);
    const auto q = static_cast<double>(cube_root(p));
    const double side = n / q;
    const double block_words = side * side;
    const double local_multiply = side * side * side * params.t_flop;
    const double per_message = params.t_s + params.t_w * block_words;
    if (model == Model::generic) {
        // zip, implicit conversion, mapD and reduceD each walk the q^2 loop
        return 4.0 * q * q * params.t_flop + local_multiply + std::log2(q) * per_message;
    }
    return local_multiply + std::log2(static_cast<double>(p)) * per_message;
}

double efficiency(double serial_time, double parallel_time, long p)
{
    if (!(parallel_time > 0) || p < 1) {
        throw DomainError("efficiency needs T_P > 0 and p >= 1");
    }
    return serial_time / (static_cast<double>(p) * parallel_time);
}

EfficiencyRecord evaluate(Model model, const CostParams& params, double n, long p)
{
    EfficiencyRecord r;
    r.model = model;
    r.p = p;
    r.n = n;
    r.parallel_time = parallel_time(model, params, n, p);
    r.serial_time = n * n * n * params.t_flop;
    r.cost = static_cast<double>(p) * r.parallel_time;
    r.overhead = r.cost - r.serial_time;
    r.efficiency = efficiency(r.serial_time, r.parallel_time, p);
    return r;
}

double growth_function(Model model, Growth growth, long p)
{
    const double pp = static_cast<double>(p);
    if (growth == Growth::linear) {
        return pp;
    }
    if (model == Model::generic) {
        return std::pow(pp, 5.0 / 3.0);
    }
    const double log_p = std::log2(pp);
    return pp * log_p * log_p * log_p;
}

double calibrate_constant(Model model, Growth growth, long p0, double target, const CostParams& params)
{
    if (!(target > 0 && target < 1)) {
        throw DomainError("target efficiency must lie in (0, 1)");
    }
    const double f = growth_function(model, growth, p0);
    if (!(f > 0)) {
        throw DomainError("growth function vanishes at p=" + std::to_string(p0));
    }
    auto efficiency_at = [&](double c) {
        return evaluate(model, params, std::cbrt(c * f), p0).efficiency;
    };
    double lo = 1e-12;
    double hi = 1e18;
    if (efficiency_at(hi) < target) {
        throw DomainError("target efficiency unreachable");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        (efficiency_at(mid) < target ? lo : hi) = mid;
    }
    return hi;
}

std::vector<EfficiencyRecord> iso_check(Model model, Growth growth, double c,
                                        std::span<const long> p_values, const CostParams& params)
{
    if (p_values.empty()) {
        throw DomainError("isoefficiency check over an empty processor range");
    }
    if (!(c > 0)) {
        throw DomainError("growth constant must be positive");
    }
    std::vector<EfficiencyRecord> out;
    out.reserve(p_values.size());
    for (long p : p_values) {
        const auto q = static_cast<double>(cube_root(p));
        const double ideal = std::cbrt(c * growth_function(model, growth, p));
        const double n = std::max(q, std::round(ideal / q) * q);
        out.push_back(evaluate(model, params, n, p));
    }
    return out;
}

double processor_time_ratio(Model model, double n, long p, const CostParams& params)
{
    const EfficiencyRecord r = evaluate(model, params, n, p);
    return r.cost / r.serial_time;
}

bool cost_optimal(Model model, double n, long p, double bound, const CostParams& params)
{
    return processor_time_ratio(model, n, p, params) <= bound;
}

void write_csv_header(std::ostream& out) { out << "model,p,n,T_S,T_P,cost,T_o,E\n"; }

void write_csv_row(std::ostream& out, std::string_view label, const EfficiencyRecord& r)
{
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%ld,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g", r.p, r.n, r.serial_time,
                  r.parallel_time, r.cost, r.overhead, r.efficiency);
    out << label << ',' << buf << '\n';
}

}  // namespace spmd::cost
