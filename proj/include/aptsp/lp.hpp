#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace aptsp {

enum class Sense { minimize, maximize };
enum class Relation { le, ge, eq };

struct LpTerm {
    int var = 0;
    double coef = 0.0;
};

/// Receives variables and rows in declaration order. Implemented by the
/// in-memory LpModel and by the streaming LP-format writer, so large models
/// can be exported without ever being materialised.
class LpBuilder {
public:
    virtual ~LpBuilder() = default;
    virtual void set_sense(Sense sense) = 0;
    /// Variables must all be declared before the first row.
    virtual int add_variable(const std::string& name, double objective, bool nonnegative = true) = 0;
    virtual int add_row(const std::string& name, std::span<const LpTerm> terms, Relation rel, double rhs) = 0;
};

/// Sparse LP: rows in compressed form, variables either nonnegative or free.
class LpModel final : public LpBuilder {
public:
    explicit LpModel(Sense sense = Sense::minimize) : sense_(sense) {}

    void set_sense(Sense sense) override { sense_ = sense; }
    int add_variable(const std::string& name, double objective, bool nonnegative = true) override;
    int add_row(const std::string& name, std::span<const LpTerm> terms, Relation rel, double rhs) override;

    Sense sense() const noexcept { return sense_; }
    int num_vars() const noexcept { return static_cast<int>(var_names_.size()); }
    int num_rows() const noexcept { return static_cast<int>(row_names_.size()); }
    std::size_t nonzeros() const noexcept { return terms_.size(); }

    const std::string& var_name(int j) const { return var_names_[j]; }
    double objective(int j) const { return objective_[j]; }
    bool nonnegative(int j) const { return nonneg_[j] != 0; }
    const std::string& row_name(int i) const { return row_names_[i]; }
    Relation relation(int i) const { return relations_[i]; }
    double rhs(int i) const { return rhs_[i]; }
    std::span<const LpTerm> row(int i) const;

    /// Index of a variable by name, or -1.
    int find_variable(const std::string& name) const;
    int find_row(const std::string& name) const;

    double objective_value(std::span<const double> x) const;
    /// Left-hand side of row i at x.
    double row_activity(int i, std::span<const double> x) const;

private:
    Sense sense_;
    std::vector<std::string> var_names_;
    std::vector<double> objective_;
    std::vector<char> nonneg_;
    std::vector<std::string> row_names_;
    std::vector<Relation> relations_;
    std::vector<double> rhs_;
    std::vector<std::size_t> row_start_{0};
    std::vector<LpTerm> terms_;
    mutable std::unordered_map<std::string, int> var_index_;
    mutable std::unordered_map<std::string, int> row_index_;
};

enum class LpStatus { optimal, infeasible, unbounded };

const char* to_string(LpStatus status);

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    double value = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> x;
    /// Shadow prices: derivative of the optimal objective with respect to each row's right-hand side.
    std::vector<double> row_duals;
    long iterations = 0;
};

struct SimplexOptions {
    std::size_t max_nonzeros = 200'000;
    std::size_t max_tableau_entries = 80'000'000;
    long max_iterations = 0;  ///< 0 selects a size-based default
    double tolerance = 1e-9;
    int degenerate_streak_for_bland = 50;
};

/// Dense two-phase primal simplex. Pricing is Dantzig's rule; after a streak
/// of degenerate pivots it falls back to Bland's rule until the objective moves.
/// Throws BudgetExceeded when the model exceeds the configured size limits and
/// NumericalFailure when the final point does not re-verify against the model.
LpSolution solve_lp(const LpModel& model, const SimplexOptions& options = {});

struct RowViolation {
    double max_violation = 0.0;
    int worst_row = -1;
};

/// Largest violation of any row (and of nonnegativity, reported as row -1) at x.
RowViolation primal_violation(const LpModel& model, std::span<const double> x);

/// Covering LP  min c^T x  s.t.  G x >= h,  x >= 0  with c >= 0, solved through
/// its packing dual so the slack basis is feasible from the start.
struct CoveringLp {
    std::vector<double> cost;
    std::vector<std::vector<LpTerm>> rows;
    std::vector<double> rhs;
};

struct CoveringSolution {
    double value = 0.0;
    std::vector<double> x;     ///< primal covering solution
    std::vector<double> duals; ///< one nonnegative multiplier per covering row
    long iterations = 0;
};

CoveringSolution solve_covering_lp(const CoveringLp& lp, const SimplexOptions& options = {});

/// Streaming CPLEX-LP writer. Output is byte-identical to export_lp() on the
/// equivalent in-memory model.
class LpTextWriter final : public LpBuilder {
public:
    explicit LpTextWriter(std::ostream& out, Sense sense = Sense::minimize);
    ~LpTextWriter() override;

    void set_sense(Sense sense) override;
    int add_variable(const std::string& name, double objective, bool nonnegative = true) override;
    int add_row(const std::string& name, std::span<const LpTerm> terms, Relation rel, double rhs) override;
    /// Writes the bounds section and the end marker. Called by the destructor if omitted.
    void finish();

private:
    void begin_objective();
    void begin_constraints();

    std::ostream& out_;
    Sense sense_;
    std::vector<std::string> names_;
    std::vector<std::string> free_vars_;
    int objective_terms_ = 0;
    bool objective_started_ = false;
    bool constraints_started_ = false;
    bool finished_ = false;
};

void export_lp(const LpModel& model, std::ostream& out);
void export_lp(const LpModel& model, const std::filesystem::path& path);

/// Reads the LP-format subset produced by export_lp (plus unlabeled rows and
/// coefficient-free terms). Throws InvalidInput on malformed text.
LpModel parse_lp(std::istream& in);

std::string format_number(double value);

}  // namespace aptsp
