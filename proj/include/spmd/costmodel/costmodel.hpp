#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace spmd::cost {

/// Machine parameters in abstract time units. All-ones gives the normalized
/// units used by the closed-form runtimes below.
struct CostParams {
    double t_s = 1.0;     ///< message start-up time
    double t_w = 1.0;     ///< per-word transfer time
    double t_flop = 1.0;  ///< per multiply-add

    /// Throws DomainError if any parameter is negative.
    void validate() const;
};

/// Time to send one message of m words: t_s + t_w * m.
double comm_cost(const CostParams& params, double m);

/// Compute time of the reduction operator on an m-word element.
using LambdaCost = std::function<double(double m)>;

struct CollectiveCosts {
    double broadcast = 0;
    double reduce = 0;
    double all_to_all = 0;
    double shift = 0;
};

/// Recursive-doubling runtimes on p processors for m-word messages
/// (log base 2). An empty `t_lambda` costs the operator nothing.
CollectiveCosts collective_costs(const CostParams& params, long p, double m,
                                 const LambdaCost& t_lambda = {});

/// Integer cube root of p. Throws DomainError unless p >= 1 is a perfect cube.
long cube_root(long p);

enum class Model { generic, grid };

std::string_view to_string(Model model);

// Normalized closed forms, n x n matrices on p = q^3 processors.

/// 4 p^(2/3) + n^3/p + (log p + (n^2/p^(2/3)) log p) / 3
double generic_tp(double n, long p);

/// 4 p^(5/3) + (p/3) (log p + (n^2/p^(2/3)) log p), evaluated as written
/// (independently of generic_tp).
double generic_to(double n, long p);

/// n^3/p + log p + (n^2/p^(2/3)) log p
double grid_tp(double n, long p);

/// Parallel runtime under `params`. Generic:
/// 4 q^2 t_flop + (n/q)^3 t_flop + log q (t_s + t_w (n/q)^2);
/// grid: (n/q)^3 t_flop + log p (t_s + t_w (n/q)^2). Equal to the normalized
/// forms when every parameter is 1.
double parallel_time(Model model, const CostParams& params, double n, long p);

/// T_S / (p T_P). Throws DomainError unless T_P > 0 and p >= 1.
double efficiency(double serial_time, double parallel_time, long p);

struct EfficiencyRecord {
    Model model = Model::grid;
    long p = 1;
    double n = 0;
    double serial_time = 0;    ///< T_S = n^3 t_flop
    double parallel_time = 0;  ///< T_P
    double cost = 0;           ///< p T_P
    double overhead = 0;       ///< T_o = p T_P - T_S
    double efficiency = 0;     ///< T_S / (p T_P)
};

EfficiencyRecord evaluate(Model model, const CostParams& params, double n, long p);

/// How the problem size W = n^3 grows with p in an isoefficiency sweep.
enum class Growth {
    linear,         ///< W = c p
    isoefficiency,  ///< generic: W = c p^(5/3); grid: W = c p log^3 p
};

double growth_function(Model model, Growth growth, long p);

/// Constant c such that, with n = (c f(p0))^(1/3) unrounded, E(p0) = target.
double calibrate_constant(Model model, Growth growth, long p0, double target,
                          const CostParams& params = {});

/// For each p: W = c f(p), n = W^(1/3) rounded to the nearest positive
/// multiple of q = p^(1/3), then the efficiency record at (n, p).
std::vector<EfficiencyRecord> iso_check(Model model, Growth growth, double c,
                                        std::span<const long> p_values,
                                        const CostParams& params = {});

/// p T_P / T_S; 1 means no overhead.
double processor_time_ratio(Model model, double n, long p, const CostParams& params = {});

inline constexpr double kCostOptimalBound = 8.0;

/// Whether p T_P / T_S <= bound at (n, p).
bool cost_optimal(Model model, double n, long p, double bound = kCostOptimalBound,
                  const CostParams& params = {});

/// `model,p,n,T_S,T_P,cost,T_o,E`
void write_csv_header(std::ostream& out);

/// One row, numbers with 6 significant digits. `label` fills the model column.
void write_csv_row(std::ostream& out, std::string_view label, const EfficiencyRecord& record);

}  // namespace spmd::cost
