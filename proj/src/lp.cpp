#include "aptsp/lp.hpp"

#include "aptsp/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace aptsp {

int LpModel::add_variable(const std::string& name, double objective, bool nonnegative) {
    if (!row_names_.empty()) throw std::logic_error("LpModel: variables must be declared before rows");
    var_names_.push_back(name);
    objective_.push_back(objective);
    nonneg_.push_back(nonnegative ? 1 : 0);
    var_index_.clear();
    return num_vars() - 1;
}

int LpModel::add_row(const std::string& name, std::span<const LpTerm> terms, Relation rel, double rhs) {
    for (const auto& t : terms)
        if (t.var < 0 || t.var >= num_vars()) throw InvalidInput("LP row '" + name + "' references an undeclared variable");
    row_names_.push_back(name);
    relations_.push_back(rel);
    rhs_.push_back(rhs);
    terms_.insert(terms_.end(), terms.begin(), terms.end());
    row_start_.push_back(terms_.size());
    row_index_.clear();
    return num_rows() - 1;
}

std::span<const LpTerm> LpModel::row(int i) const {
    return {terms_.data() + row_start_[i], row_start_[i + 1] - row_start_[i]};
}

int LpModel::find_variable(const std::string& name) const {
    if (var_index_.empty())
        for (int j = 0; j < num_vars(); ++j) var_index_.emplace(var_names_[j], j);
    auto it = var_index_.find(name);
    return it == var_index_.end() ? -1 : it->second;
}

int LpModel::find_row(const std::string& name) const {
    if (row_index_.empty())
        for (int i = 0; i < num_rows(); ++i) row_index_.emplace(row_names_[i], i);
    auto it = row_index_.find(name);
    return it == row_index_.end() ? -1 : it->second;
}

double LpModel::objective_value(std::span<const double> x) const {
    double s = 0.0;
    for (int j = 0; j < num_vars(); ++j) s += objective_[j] * x[j];
    return s;
}

double LpModel::row_activity(int i, std::span<const double> x) const {
    double s = 0.0;
    for (const auto& t : row(i)) s += t.coef * x[t.var];
    return s;
}

const char* to_string(LpStatus status) {
    switch (status) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
    }
    return "unknown";
}

RowViolation primal_violation(const LpModel& model, std::span<const double> x) {
    RowViolation out;
    for (int j = 0; j < model.num_vars(); ++j)
        if (model.nonnegative(j) && -x[j] > out.max_violation) {
            out.max_violation = -x[j];
            out.worst_row = -1;
        }
    for (int i = 0; i < model.num_rows(); ++i) {
        const double lhs = model.row_activity(i, x), b = model.rhs(i);
        double viol = 0.0;
        switch (model.relation(i)) {
            case Relation::le: viol = lhs - b; break;
            case Relation::ge: viol = b - lhs; break;
            case Relation::eq: viol = std::abs(lhs - b); break;
        }
        if (viol > out.max_violation) {
            out.max_violation = viol;
            out.worst_row = i;
        }
    }
    return out;
}

namespace {

// Dense tableau in standard form: rows 0..m-1 are constraints, row m holds
// reduced costs. Last column is the right-hand side.
class Tableau {
public:
    Tableau(int m, int cols) : m_(m), cols_(cols), width_(cols + 1), a_(static_cast<std::size_t>(m + 1) * (cols + 1), 0.0) {}

    double& at(int i, int j) { return a_[static_cast<std::size_t>(i) * width_ + j]; }
    double at(int i, int j) const { return a_[static_cast<std::size_t>(i) * width_ + j]; }
    double& rhs(int i) { return at(i, cols_); }
    double* row(int i) { return a_.data() + static_cast<std::size_t>(i) * width_; }

    void pivot(int r, int c) {
        double* pr = row(r);
        const double inv = 1.0 / pr[c];
        for (int j = 0; j < width_; ++j) pr[j] *= inv;
        pr[c] = 1.0;
        nz_.clear();
        for (int j = 0; j < width_; ++j)
            if (pr[j] != 0.0) nz_.push_back(j);
        for (int i = 0; i <= m_; ++i) {
            if (i == r) continue;
            double* pi = row(i);
            const double f = pi[c];
            if (f == 0.0) continue;
            for (int j : nz_) {
                double v = pi[j] - f * pr[j];
                if (std::abs(v) < 1e-14) v = 0.0;
                pi[j] = v;
            }
            pi[c] = 0.0;
        }
    }

    int m() const { return m_; }
    int cols() const { return cols_; }

private:
    int m_, cols_, width_;
    std::vector<double> a_;
    std::vector<int> nz_;
};

struct Standardized {
    int m = 0;
    int cols = 0;
    std::vector<int> plus_col, minus_col;  // per model variable
    std::vector<int> slack_col;            // +1 column per row or -1
    std::vector<int> art_col;              // artificial per row or -1
    std::vector<double> flip;              // +1 or -1 per row
    std::vector<char> is_artificial;       // per column
};

enum class PhaseResult { optimal, unbounded };

class Simplex {
public:
    Simplex(Tableau& t, std::vector<int>& basis, const std::vector<char>& barred, const SimplexOptions& opt,
            long& iterations, long max_iterations)
        : t_(t), basis_(basis), barred_(barred), opt_(opt), iterations_(iterations), max_iterations_(max_iterations) {}

    PhaseResult run() {
        const int m = t_.m(), n = t_.cols();
        int degenerate_streak = 0;
        bool bland = false;
        for (;;) {
            if (++iterations_ > max_iterations_) throw NumericalFailure("simplex iteration limit reached");
            double* z = t_.row(m);
            int enter = -1;
            double best = -opt_.tolerance;
            for (int j = 0; j < n; ++j) {
                if (barred_[j]) continue;
                if (z[j] < best) {
                    enter = j;
                    if (bland) break;
                    best = z[j];
                }
            }
            if (enter < 0) return PhaseResult::optimal;
            int leave = -1;
            double best_ratio = 0.0, best_piv = 0.0;
            for (int i = 0; i < m; ++i) {
                const double a = t_.at(i, enter);
                if (a <= 1e-11) continue;
                const double ratio = std::max(t_.at(i, n), 0.0) / a;
                bool take = false;
                if (leave < 0) take = true;
                else if (ratio < best_ratio - 1e-12 * (1.0 + best_ratio)) take = true;
                else if (ratio <= best_ratio + 1e-12 * (1.0 + best_ratio)) {
                    if (bland) take = basis_[i] < basis_[leave];
                    else take = a > best_piv;
                }
                if (take) {
                    leave = i;
                    best_ratio = ratio;
                    best_piv = a;
                }
            }
            if (leave < 0) return PhaseResult::unbounded;
            if (best_ratio <= 1e-12) {
                if (++degenerate_streak >= opt_.degenerate_streak_for_bland) bland = true;
            } else {
                degenerate_streak = 0;
                bland = false;
            }
            t_.pivot(leave, enter);
            basis_[leave] = enter;
        }
    }

private:
    Tableau& t_;
    std::vector<int>& basis_;
    const std::vector<char>& barred_;
    const SimplexOptions& opt_;
    long& iterations_;
    long max_iterations_;
};

void set_reduced_costs(Tableau& t, const std::vector<int>& basis, const std::vector<double>& cost) {
    const int m = t.m(), n = t.cols();
    double* z = t.row(m);
    for (int j = 0; j < n; ++j) z[j] = cost[j];
    z[n] = 0.0;
    for (int i = 0; i < m; ++i) {
        const double cb = cost[basis[i]];
        if (cb == 0.0) continue;
        const double* r = t.row(i);
        for (int j = 0; j <= n; ++j) z[j] -= cb * r[j];
    }
}

}  // namespace

LpSolution solve_lp(const LpModel& model, const SimplexOptions& options) {
    if (model.nonzeros() > options.max_nonzeros)
        throw BudgetExceeded("LP has " + std::to_string(model.nonzeros()) + " nonzeros, over the dense-simplex budget of " +
                             std::to_string(options.max_nonzeros));
    Standardized s;
    s.m = model.num_rows();
    const int nv = model.num_vars();
    s.plus_col.assign(nv, -1);
    s.minus_col.assign(nv, -1);
    int col = 0;
    for (int j = 0; j < nv; ++j) {
        s.plus_col[j] = col++;
        if (!model.nonnegative(j)) s.minus_col[j] = col++;
    }
    s.slack_col.assign(s.m, -1);
    s.art_col.assign(s.m, -1);
    s.flip.assign(s.m, 1.0);
    std::vector<int> surplus_col(s.m, -1);
    for (int i = 0; i < s.m; ++i) {
        Relation rel = model.relation(i);
        const double b = model.rhs(i);
        if ((rel == Relation::ge && b <= 0.0) || (rel == Relation::le && b < 0.0) || (rel == Relation::eq && b < 0.0)) {
            s.flip[i] = -1.0;
            if (rel == Relation::ge) rel = Relation::le;
            else if (rel == Relation::le) rel = Relation::ge;
        }
        if (rel == Relation::le) s.slack_col[i] = col++;
        else if (rel == Relation::ge) surplus_col[i] = col++;
    }
    for (int i = 0; i < s.m; ++i)
        if (s.slack_col[i] < 0) s.art_col[i] = col++;
    s.cols = col;
    const std::size_t entries = static_cast<std::size_t>(s.m + 1) * (s.cols + 1);
    if (entries > options.max_tableau_entries)
        throw BudgetExceeded("LP tableau of " + std::to_string(entries) + " entries exceeds the dense-simplex budget");

    Tableau t(s.m, s.cols);
    std::vector<int> basis(s.m);
    s.is_artificial.assign(s.cols, 0);
    for (int i = 0; i < s.m; ++i) {
        const double f = s.flip[i];
        for (const auto& term : model.row(i)) {
            t.at(i, s.plus_col[term.var]) += f * term.coef;
            if (s.minus_col[term.var] >= 0) t.at(i, s.minus_col[term.var]) -= f * term.coef;
        }
        t.rhs(i) = f * model.rhs(i);
        if (s.slack_col[i] >= 0) {
            t.at(i, s.slack_col[i]) = 1.0;
            basis[i] = s.slack_col[i];
        } else {
            if (surplus_col[i] >= 0) t.at(i, surplus_col[i]) = -1.0;
            t.at(i, s.art_col[i]) = 1.0;
            basis[i] = s.art_col[i];
            s.is_artificial[s.art_col[i]] = 1;
        }
    }

    long iterations = 0;
    const long max_iter = options.max_iterations > 0 ? options.max_iterations : 50L * (s.m + s.cols) + 10000;
    std::vector<char> barred(s.cols, 0);

    bool any_art = std::any_of(s.art_col.begin(), s.art_col.end(), [](int c) { return c >= 0; });
    double bscale = 1.0;
    for (int i = 0; i < s.m; ++i) bscale = std::max(bscale, std::abs(model.rhs(i)));
    if (any_art) {
        std::vector<double> phase1(s.cols, 0.0);
        for (int c = 0; c < s.cols; ++c)
            if (s.is_artificial[c]) phase1[c] = 1.0;
        set_reduced_costs(t, basis, phase1);
        Simplex(t, basis, barred, options, iterations, max_iter).run();
        const double infeas = -t.rhs(s.m);
        if (infeas > 1e-8 * bscale) {
            LpSolution out;
            out.status = LpStatus::infeasible;
            out.iterations = iterations;
            return out;
        }
        // drive zero-level artificials out of the basis where possible
        for (int i = 0; i < s.m; ++i) {
            if (!s.is_artificial[basis[i]]) continue;
            int best = -1;
            double mag = 1e-9;
            for (int c = 0; c < s.cols; ++c)
                if (!s.is_artificial[c] && std::abs(t.at(i, c)) > mag) {
                    mag = std::abs(t.at(i, c));
                    best = c;
                }
            if (best >= 0) {
                t.pivot(i, best);
                basis[i] = best;
            }
        }
        for (int c = 0; c < s.cols; ++c)
            if (s.is_artificial[c]) barred[c] = 1;
    }

    const double sign = model.sense() == Sense::maximize ? -1.0 : 1.0;
    std::vector<double> cost(s.cols, 0.0);
    for (int j = 0; j < nv; ++j) {
        cost[s.plus_col[j]] = sign * model.objective(j);
        if (s.minus_col[j] >= 0) cost[s.minus_col[j]] = -sign * model.objective(j);
    }
    set_reduced_costs(t, basis, cost);
    const PhaseResult res = Simplex(t, basis, barred, options, iterations, max_iter).run();

    LpSolution out;
    out.iterations = iterations;
    if (res == PhaseResult::unbounded) {
        out.status = LpStatus::unbounded;
        return out;
    }
    std::vector<double> colval(s.cols, 0.0);
    for (int i = 0; i < s.m; ++i) colval[basis[i]] = std::max(t.rhs(i), 0.0);
    out.x.assign(nv, 0.0);
    for (int j = 0; j < nv; ++j) {
        out.x[j] = colval[s.plus_col[j]];
        if (s.minus_col[j] >= 0) out.x[j] -= colval[s.minus_col[j]];
    }
    out.row_duals.assign(s.m, 0.0);
    for (int i = 0; i < s.m; ++i) {
        const int c = s.slack_col[i] >= 0 ? s.slack_col[i] : s.art_col[i];
        const double pi = -t.at(s.m, c);
        out.row_duals[i] = sign * s.flip[i] * pi;
    }
    out.value = model.objective_value(out.x);
    out.status = LpStatus::optimal;

    double xscale = 1.0;
    for (double v : out.x) xscale = std::max(xscale, std::abs(v));
    const auto viol = primal_violation(model, out.x);
    if (viol.max_violation > 1e-6 * std::max(bscale, xscale)) {
        std::ostringstream os;
        os << "simplex result violates row " << viol.worst_row << " by " << viol.max_violation;
        throw NumericalFailure(os.str());
    }
    return out;
}

CoveringSolution solve_covering_lp(const CoveringLp& lp, const SimplexOptions& options) {
    const int n = static_cast<int>(lp.cost.size());
    const int m = static_cast<int>(lp.rows.size());
    if (lp.rhs.size() != lp.rows.size()) throw InvalidInput("covering LP: rows and rhs differ in length");
    // packing dual: max h^T u  s.t.  G^T u <= c, u >= 0
    std::vector<std::vector<LpTerm>> cols(n);
    for (int i = 0; i < m; ++i)
        for (const auto& t : lp.rows[i]) cols.at(t.var).push_back({i, t.coef});
    LpModel dual(Sense::maximize);
    for (int i = 0; i < m; ++i) dual.add_variable("u" + std::to_string(i), lp.rhs[i]);
    for (int j = 0; j < n; ++j) dual.add_row("c" + std::to_string(j), cols[j], Relation::le, lp.cost[j]);
    const LpSolution sol = solve_lp(dual, options);
    if (sol.status == LpStatus::unbounded) throw InvalidInput("covering LP is infeasible");
    if (sol.status != LpStatus::optimal) throw NumericalFailure("covering LP dual reported infeasible");
    CoveringSolution out;
    out.value = sol.value;
    out.duals = sol.x;
    out.x.resize(n);
    for (int j = 0; j < n; ++j) out.x[j] = std::max(sol.row_duals[j], 0.0);
    out.iterations = sol.iterations;
    return out;
}

std::string format_number(double value) {
    if (value == 0.0) return "0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

namespace {

constexpr int kTermsPerLine = 6;

void write_terms(std::ostream& out, std::span<const LpTerm> terms, const std::vector<std::string>& names, int& count) {
    for (const auto& t : terms) {
        if (count > 0 && count % kTermsPerLine == 0) out << "\n  ";
        const bool neg = t.coef < 0.0 || (t.coef == 0.0 && std::signbit(t.coef));
        if (count == 0) out << (neg ? "- " : "");
        else out << (neg ? " - " : " + ");
        out << format_number(std::abs(t.coef)) << ' ' << names[t.var];
        ++count;
    }
}

const char* relation_text(Relation r) {
    switch (r) {
        case Relation::le: return "<=";
        case Relation::ge: return ">=";
        case Relation::eq: return "=";
    }
    return "=";
}

}  // namespace

LpTextWriter::LpTextWriter(std::ostream& out, Sense sense) : out_(out), sense_(sense) {}

LpTextWriter::~LpTextWriter() {
    try {
        finish();
    } catch (...) {
    }
}

void LpTextWriter::set_sense(Sense sense) {
    if (objective_started_) throw std::logic_error("LpTextWriter: sense fixed once output began");
    sense_ = sense;
}

void LpTextWriter::begin_objective() {
    if (objective_started_) return;
    objective_started_ = true;
    out_ << (sense_ == Sense::minimize ? "Minimize\n" : "Maximize\n") << " obj: ";
}

void LpTextWriter::begin_constraints() {
    if (constraints_started_) return;
    begin_objective();
    constraints_started_ = true;
    out_ << "\nSubject To\n";
}

int LpTextWriter::add_variable(const std::string& name, double objective, bool nonnegative) {
    if (constraints_started_) throw std::logic_error("LpTextWriter: variables must precede rows");
    begin_objective();
    names_.push_back(name);
    const LpTerm term{static_cast<int>(names_.size()) - 1, objective};
    write_terms(out_, std::span<const LpTerm>(&term, 1), names_, objective_terms_);
    if (!nonnegative) free_vars_.push_back(name);
    return term.var;
}

int LpTextWriter::add_row(const std::string& name, std::span<const LpTerm> terms, Relation rel, double rhs) {
    begin_constraints();
    out_ << ' ' << name << ": ";
    int count = 0;
    write_terms(out_, terms, names_, count);
    if (count == 0) out_ << "0 " << (names_.empty() ? std::string("x") : names_[0]);
    out_ << ' ' << relation_text(rel) << ' ' << format_number(rhs) << '\n';
    return 0;
}

void LpTextWriter::finish() {
    if (finished_) return;
    finished_ = true;
    begin_constraints();
    if (!free_vars_.empty()) {
        out_ << "Bounds\n";
        for (const auto& v : free_vars_) out_ << ' ' << v << " free\n";
    }
    out_ << "End\n";
    out_.flush();
}

void export_lp(const LpModel& model, std::ostream& out) {
    LpTextWriter w(out, model.sense());
    for (int j = 0; j < model.num_vars(); ++j) w.add_variable(model.var_name(j), model.objective(j), model.nonnegative(j));
    for (int i = 0; i < model.num_rows(); ++i) w.add_row(model.row_name(i), model.row(i), model.relation(i), model.rhs(i));
    w.finish();
}

void export_lp(const LpModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    export_lp(model, out);
    if (!out) throw Error("write to '" + path.string() + "' failed");
}

namespace {

std::vector<std::string> tokenize_lp(std::istream& in) {
    std::vector<std::string> tok;
    std::string line;
    while (std::getline(in, line)) {
        if (auto c = line.find('\\'); c != std::string::npos) line.erase(c);
        std::size_t i = 0;
        while (i < line.size()) {
            const char ch = line[i];
            if (std::isspace(static_cast<unsigned char>(ch))) {
                ++i;
            } else if (ch == '+' || ch == '-' || ch == ':') {
                tok.emplace_back(1, ch);
                ++i;
            } else if (ch == '<' || ch == '>' || ch == '=') {
                std::string op(1, ch);
                ++i;
                if (i < line.size() && line[i] == '=') {
                    op += '=';
                    ++i;
                }
                if (op == "=<") op = "<=";
                if (op == "=>") op = ">=";
                if (op == "<") op = "<=";
                if (op == ">") op = ">=";
                tok.push_back(op);
            } else {
                std::size_t j = i;
                while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) && line[j] != ':' &&
                       line[j] != '<' && line[j] != '>' && line[j] != '=' &&
                       !((line[j] == '+' || line[j] == '-') && j > i &&
                         !(std::tolower(static_cast<unsigned char>(line[j - 1])) == 'e' &&
                           std::isdigit(static_cast<unsigned char>(line[i])))))
                    ++j;
                tok.push_back(line.substr(i, j - i));
                i = j;
            }
        }
        tok.emplace_back("\n");
    }
    return tok;
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool is_number(const std::string& s, double& v) {
    if (s.empty()) return false;
    const char c = s[0];
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.')) return false;
    char* end = nullptr;
    v = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

}  // namespace

LpModel parse_lp(std::istream& in) {
    const auto tok = tokenize_lp(in);
    std::size_t pos = 0;
    auto skip_nl = [&] {
        while (pos < tok.size() && tok[pos] == "\n") ++pos;
    };
    auto fail = [&](const std::string& msg) -> void { throw InvalidInput("LP parse error: " + msg); };

    skip_nl();
    if (pos >= tok.size()) fail("empty input");
    const std::string head = lower(tok[pos]);
    Sense sense;
    if (head == "minimize" || head == "minimise" || head == "min") sense = Sense::minimize;
    else if (head == "maximize" || head == "maximise" || head == "max") sense = Sense::maximize;
    else {
        fail("expected objective sense, got '" + tok[pos] + "'");
        return LpModel{};
    }
    ++pos;

    struct RawRow {
        std::string name;
        std::vector<std::pair<std::string, double>> terms;
        Relation rel;
        double rhs;
    };
    std::vector<std::pair<std::string, double>> obj_terms;
    std::vector<RawRow> rows;
    std::vector<std::string> order;
    std::unordered_map<std::string, int> seen;
    std::vector<std::string> free_vars;
    auto note_var = [&](const std::string& v) {
        if (seen.emplace(v, static_cast<int>(order.size())).second) order.push_back(v);
    };

    auto is_section = [&](std::size_t p) {
        if (p >= tok.size()) return true;
        const std::string t = lower(tok[p]);
        if (t == "subject" || t == "st" || t == "s.t." || t == "such" || t == "bounds" || t == "end" || t == "general" ||
            t == "generals" || t == "binary" || t == "binaries")
            return true;
        return false;
    };

    // Reads "[name :] terms" and returns the terms; stops at a relation, section or (for objective) keyword.
    auto read_terms = [&](std::string& name, bool allow_rel) {
        std::vector<std::pair<std::string, double>> terms;
        skip_nl();
        if (pos + 1 < tok.size() && tok[pos + 1] == ":" && !is_section(pos)) {
            name = tok[pos];
            pos += 2;
        }
        double sign = 1.0;
        double coef = 1.0;
        bool have_coef = false;
        for (;;) {
            skip_nl();
            if (pos >= tok.size() || is_section(pos)) break;
            const std::string& t = tok[pos];
            if (allow_rel && (t == "<=" || t == ">=" || t == "=")) break;
            if (!allow_rel && pos + 1 < tok.size() && tok[pos + 1] == ":") break;
            if (t == "+") {
                ++pos;
                continue;
            }
            if (t == "-") {
                sign = -sign;
                ++pos;
                continue;
            }
            double v;
            if (is_number(t, v)) {
                coef = v;
                have_coef = true;
                ++pos;
                continue;
            }
            if (t == ":" || t == "<=" || t == ">=" || t == "=") fail("unexpected '" + t + "'");
            terms.emplace_back(t, sign * (have_coef ? coef : 1.0));
            note_var(t);
            sign = 1.0;
            coef = 1.0;
            have_coef = false;
            ++pos;
        }
        if (have_coef) fail("dangling constant in expression");
        return terms;
    };

    std::string obj_name;
    obj_terms = read_terms(obj_name, false);

    skip_nl();
    if (pos < tok.size()) {
        const std::string t = lower(tok[pos]);
        if (t == "subject") {
            ++pos;
            if (pos >= tok.size() || lower(tok[pos]) != "to") fail("expected 'Subject To'");
            ++pos;
        } else if (t == "such") {
            pos += 2;
        } else if (t == "st" || t == "s.t.") {
            ++pos;
        }
    }
    int unnamed = 0;
    for (;;) {
        skip_nl();
        if (pos >= tok.size() || is_section(pos)) break;
        RawRow r;
        r.terms = read_terms(r.name, true);
        if (r.name.empty()) r.name = "R" + std::to_string(++unnamed);
        skip_nl();
        if (pos >= tok.size()) fail("row '" + r.name + "' lacks a relation");
        const std::string& op = tok[pos];
        if (op == "<=") r.rel = Relation::le;
        else if (op == ">=") r.rel = Relation::ge;
        else if (op == "=") r.rel = Relation::eq;
        else fail("row '" + r.name + "' lacks a relation");
        ++pos;
        double sign = 1.0;
        while (pos < tok.size() && (tok[pos] == "-" || tok[pos] == "+")) {
            if (tok[pos] == "-") sign = -sign;
            ++pos;
        }
        double v;
        if (pos >= tok.size() || !is_number(tok[pos], v)) fail("row '" + r.name + "' has a non-numeric right-hand side");
        r.rhs = sign * v;
        ++pos;
        rows.push_back(std::move(r));
    }
    skip_nl();
    if (pos < tok.size() && lower(tok[pos]) == "bounds") {
        ++pos;
        for (;;) {
            skip_nl();
            if (pos >= tok.size() || is_section(pos)) break;
            // collect a line
            std::vector<std::string> line;
            while (pos < tok.size() && tok[pos] != "\n") line.push_back(tok[pos++]);
            if (line.size() == 2 && lower(line[1]) == "free") {
                note_var(line[0]);
                free_vars.push_back(line[0]);
            } else if (line.size() == 3 && line[1] == ">=" && line[2] == "0") {
                note_var(line[0]);
            } else {
                fail("unsupported bound line");
            }
        }
    }
    skip_nl();
    if (pos >= tok.size() || lower(tok[pos]) != "end") fail("missing 'End'");

    LpModel model(sense);
    std::unordered_map<std::string, double> obj;
    for (const auto& [v, c] : obj_terms) obj[v] += c;
    std::unordered_map<std::string, char> is_free;
    for (const auto& v : free_vars) is_free[v] = 1;
    for (const auto& v : order) model.add_variable(v, obj.count(v) ? obj[v] : 0.0, !is_free.count(v));
    for (const auto& r : rows) {
        std::vector<LpTerm> terms;
        terms.reserve(r.terms.size());
        for (const auto& [v, c] : r.terms) terms.push_back({seen.at(v), c});
        model.add_row(r.name, terms, r.rel, r.rhs);
    }
    return model;
}

}  // namespace aptsp
