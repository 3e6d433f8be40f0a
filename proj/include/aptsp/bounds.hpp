#pragma once

#include "aptsp/lp.hpp"
#include "aptsp/rational.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace aptsp {

struct SamplingLpConfig {
    double alpha = 1.5;
    double sigma = 0.663;
    double beta = 0.05;
    int n_buckets = 200;

    /// Throws InvalidInput unless alpha >= 0, 0 < sigma < 1, beta > 0, N >= 1.
    void validate() const;
};

struct DeltaTerms {
    double delta1 = 0.0;
    double delta2 = 0.0;
};

/// Closed-form error terms; cross-checked against their defining series and
/// throws NumericalFailure if the two disagree by more than 1e-12 relative.
DeltaTerms compute_delta_terms(const SamplingLpConfig& cfg);
/// delta1 = 4 beta sum_{j>N} e^{-j sigma beta}, delta2 = (alpha + delta1/2) sum_{k>N} k e^{-(k-1) sigma beta},
/// summed in long double until the tail is negligible.
DeltaTerms delta_terms_series(const SamplingLpConfig& cfg);

/// sum_{k>n} k q^{k-1} = q^n (1 + n - q n) / (1 - q)^2 for 0 <= q < 1.
double geometric_tail_closed(int n, double q);

struct MrrLpConfig {
    double beta = 0.05;
    int n_buckets = 200;
    int a = 9;
    std::vector<int> h;  ///< offsets h_1..h_N stored at h[i-1]; empty means h_i = i mod a

    void validate() const;
    int offset(int i) const;
    /// Number of M_{j,i} variables for bucket i: ceil((h_i + i + 1) / a).
    int j_max(int i) const;
    int first_index(int j, int i) const { return (j - 1) * a - offset(i); }
    int second_index(int j, int i) const { return i - j * a + offset(i); }
};

// Model emitters. The same emitter feeds the in-memory model and the streaming
// LP writer, so exported files always match the models that are solved.
void emit_sampling_lp(const SamplingLpConfig& cfg, LpBuilder& out);
void emit_sampling_dual(const SamplingLpConfig& cfg, LpBuilder& out);
void emit_mrr_lp(const MrrLpConfig& cfg, LpBuilder& out);
void emit_mrr_dual(const MrrLpConfig& cfg, LpBuilder& out);

LpModel build_sampling_lp(const SamplingLpConfig& cfg);
LpModel build_sampling_dual(const SamplingLpConfig& cfg);
LpModel build_mrr_lp(const MrrLpConfig& cfg);
LpModel build_mrr_dual(const MrrLpConfig& cfg);

/// Variable names used in the models and in solution files.
std::string index_name(int i);  ///< "3", or "m3" for -3

/// 1 / value. Throws InvalidInput for value <= 0.
double bound_from_primal(double value);

/// Optimum of a bound LP together with complete primal and dual points.
struct BoundSolve {
    double primal_value = 0.0;
    double dual_value = 0.0;
    double ratio_bound = 0.0;           ///< 1 / primal_value
    std::vector<double> primal_point;   ///< in build_*_lp variable order
    std::vector<double> dual_point;     ///< in build_*_dual variable order
    double primal_violation = 0.0;      ///< max row violation on the full primal model
    double dual_violation = 0.0;        ///< max row violation on the full dual model
    int rounds = 0;
    int generated_rows = 0;
    long iterations = 0;
};

struct BoundSolveOptions {
    double feasibility_tolerance = 1e-11;
    int max_rounds = 5000;
    int max_new_rows_per_round = 400;
    int max_buckets = 600;  ///< larger N throws BudgetExceeded
    SimplexOptions simplex{};
};

/// Solves the Sampling-LP by row generation over its concave master constraint and lazy triangle rows.
BoundSolve solve_sampling_bound(const SamplingLpConfig& cfg, const BoundSolveOptions& opts = {});
/// Solves the Master-Route-Ratio-LP the same way, one concave constraint per bucket.
BoundSolve solve_mrr_bound(const MrrLpConfig& cfg, const BoundSolveOptions& opts = {});

/// Solves an emitted model directly with the dense simplex (small N only).
LpSolution solve_model_directly(const LpModel& model, const SimplexOptions& opts = {});

enum class CertKind { sampling, mrr };

const char* to_string(CertKind kind);
CertKind parse_cert_kind(const std::string& text);

/// Exact parameters the certificate is checked against.
struct ExactParams {
    Rational alpha, sigma, beta;
    int n_buckets = 0;
    int a = 0;
    std::vector<int> h;  ///< as in MrrLpConfig
};

ExactParams exact_params(const SamplingLpConfig& cfg);
ExactParams exact_params(const MrrLpConfig& cfg);

using PairKey = std::pair<int, int>;

/// Sparse dual solution in exact rationals. Sampling uses x2 (x_{i,j}), y, v, w
/// keyed (i,j); the master-route family uses x1, y1, z keyed by index and v, w keyed (j,i).
struct DualCertificate {
    CertKind kind = CertKind::sampling;
    ExactParams params;
    std::map<PairKey, Rational> x2, v, w;
    std::map<int, Rational> x1, y1, z;
    Rational y;
};

struct VerificationResult {
    bool feasible = false;
    std::optional<Rational> bound;  ///< empty when the certificate gives no finite bound
    std::string violated_row;
    double margin = 0.0;            ///< lhs - rhs of the violated row, rounded
    std::string message;
};

/// Checks every dual row exactly, with exponentials replaced by directed
/// enclosures (upper bounds on left-hand coefficients, lower bounds on right-hand sides).
/// Throws InvalidInput for malformed certificates (bad indices, negative multipliers).
VerificationResult verify_sampling_certificate(const DualCertificate& cert);
VerificationResult verify_mrr_certificate(const DualCertificate& cert);
VerificationResult verify_certificate(const DualCertificate& cert);

inline constexpr double kDefaultSafety = 1e-6;

/// Exact rational copy of a solved dual point with multipliers scaled by (1 - safety)
/// and the y part by (1 - safety)^2, leaving strict slack in every row.
DualCertificate rationalize_sampling(const SamplingLpConfig& cfg, const BoundSolve& solve, double safety = kDefaultSafety);
DualCertificate rationalize_mrr(const MrrLpConfig& cfg, const BoundSolve& solve, double safety = kDefaultSafety);

/// Reads "name value" lines (as written by external LP solvers for the exported
/// dual model) into a certificate. Unknown names and '#' comments are ignored.
DualCertificate certificate_from_solution(CertKind kind, const ExactParams& params, std::istream& in);

}  // namespace aptsp
