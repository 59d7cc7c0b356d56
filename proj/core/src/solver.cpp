#include "depthalloc/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_map>

#include "depthalloc/errors.hpp"

namespace depthalloc {

namespace {

constexpr double kIntTol = 1e-6;    // integrality tolerance on alpha
constexpr double kCostTol = 1e-9;   // reduced-cost optimality tolerance
constexpr double kPivTol = 1e-9;    // ratio-test pivot tolerance
constexpr double kAmbigTol = 1e-7;  // alternative-optimum detection
constexpr double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

double value_tol(double v) { return 1e-7 * std::max(1.0, std::abs(v)); }

// Dense LU with partial pivoting for the k x k basic-alpha system
// (k = number of basic alpha columns, typically <= the budget).
struct DenseLu {
    int k = 0;
    std::vector<double> a;  // row-major, factored in place
    std::vector<int> piv;

    void factor(std::vector<double> m, int kk) {
        k = kk;
        a = std::move(m);
        piv.resize(k);
        for (int col = 0; col < k; ++col) {
            int p = col;
            for (int r = col + 1; r < k; ++r)
                if (std::abs(a[r * k + col]) > std::abs(a[p * k + col])) p = r;
            piv[col] = p;
            if (p != col)
                for (int c = 0; c < k; ++c)
                    std::swap(a[col * k + c], a[p * k + c]);
            const double d = a[col * k + col];
            if (std::abs(d) < 1e-12)
                throw SolverError("simplex: singular basis system");
            for (int r = col + 1; r < k; ++r) {
                const double f = a[r * k + col] / d;
                a[r * k + col] = f;
                for (int c = col + 1; c < k; ++c)
                    a[r * k + c] -= f * a[col * k + c];
            }
        }
    }

    // M x = b, in place.
    void solve(std::vector<double>& b) const {
        for (int i = 0; i < k; ++i)
            if (piv[i] != i) std::swap(b[i], b[piv[i]]);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < i; ++j) b[i] -= a[i * k + j] * b[j];
        for (int i = k - 1; i >= 0; --i) {
            for (int j = i + 1; j < k; ++j) b[i] -= a[i * k + j] * b[j];
            b[i] /= a[i * k + i];
        }
    }

    // M^T x = b, in place.
    void solve_t(std::vector<double>& b) const {
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < i; ++j) b[i] -= a[j * k + i] * b[j];
            b[i] /= a[i * k + i];
        }
        for (int i = k - 1; i >= 0; --i)
            for (int j = i + 1; j < k; ++j) b[i] -= a[j * k + i] * b[j];
        for (int i = k - 1; i >= 0; --i)
            if (piv[i] != i) std::swap(b[i], b[piv[i]]);
    }
};

// LP-relevant view of the condensed matrix: only rows with positive weight
// enter the program, and rows with identical patterns are merged (their b
// variables share the same feasible set, so summing their weights is an exact
// reformulation). Merging keeps the program small and non-degenerate even
// when the caller passes an uncondensed pixel matrix.
struct Instance {
    const CondensedMatrix* cm = nullptr;
    int n = 0;
    int J = 0;
    std::vector<int> lp_to_cm;  // LP row -> first matrix row with the pattern
    std::vector<int> cm_to_lp;  // matrix row -> LP row, or -1 if weightless
    std::vector<double> u;      // merged positive weights
    std::vector<std::vector<int>> sup;  // per alpha: LP row indices

    explicit Instance(const AllocationProblem& p) {
        if (!p.condensed) throw DomainError("solver: null condensed matrix");
        if (p.budget < 1) throw DomainError("solver: budget must be >= 1");
        if (!p.fixed.empty() &&
            static_cast<int>(p.fixed.size()) != p.condensed->n)
            throw DomainError("solver: fixed vector size mismatch");
        cm = p.condensed;
        n = cm->n;
        sup.resize(n);
        cm_to_lp.assign(cm->rows(), -1);
        struct Hash {
            size_t operator()(const Pattern& p) const {
                return static_cast<size_t>(p.hash());
            }
        };
        std::unordered_map<Pattern, int, Hash> seen;
        for (int j = 0; j < cm->rows(); ++j) {
            if (!(cm->u[j] > 0.0)) continue;
            auto [it, inserted] = seen.emplace(cm->patterns[j], J);
            if (inserted) {
                const int lp = J++;
                lp_to_cm.push_back(j);
                u.push_back(cm->u[j]);
                for (int i = 0; i < n; ++i)
                    if (cm->patterns[j].test(i)) sup[i].push_back(lp);
            } else {
                u[it->second] += cm->u[j];
            }
            cm_to_lp[j] = it->second;
        }
    }
};

std::vector<int> normalized_fixed(const AllocationProblem& p) {
    if (!p.fixed.empty()) return p.fixed;
    return std::vector<int>(p.condensed->n, -1);
}

// Greedy marginal-gain selection on the instance, honoring fixings. Returns
// ascending indices, size <= budget.
std::vector<int> greedy_indices(const Instance& inst, int budget,
                                const std::vector<int>& fixed) {
    std::vector<char> covered(inst.J, 0);
    std::vector<char> chosen(inst.n, 0);
    std::vector<int> out;
    auto pick = [&](int i) {
        chosen[i] = 1;
        out.push_back(i);
        for (int r : inst.sup[i]) covered[r] = 1;
    };
    for (int i = 0; i < inst.n; ++i)
        if (fixed[i] == 1) pick(i);
    while (static_cast<int>(out.size()) < budget) {
        int best = -1;
        double best_gain = 0.0;
        for (int i = 0; i < inst.n; ++i) {
            if (chosen[i] || fixed[i] == 0) continue;
            double g = 0.0;
            for (int r : inst.sup[i])
                if (!covered[r]) g += inst.u[r];
            if (g > best_gain + 1e-15) {
                best_gain = g;
                best = i;
            }
        }
        if (best < 0) break;
        pick(best);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Bounded-variable revised simplex specialized to the coverage LP:
//   max sum_j u_j b_j
//   s.t. b_j - sum_{i in P_j} alpha_i + s_j = 0          (row j)
//        sum_i alpha_i + s_T = T                          (budget row)
//        alpha, b in [0,1]; s, s_T >= 0.
// Every b/s/s_T column is a unit vector, so the basis splits into unit-owned
// rows plus a small dense system over the basic alpha columns.
class Simplex {
  public:
    Simplex(const Instance& inst, int budget, const std::vector<int>& fixed,
            const std::vector<int>& warm)
        : inst_(inst), T_(budget), fixed_(fixed) {
        n_ = inst.n;
        J_ = inst.J;
        m_ = J_ + 1;
        vb0_ = n_;
        vs0_ = n_ + J_;
        vst_ = n_ + 2 * J_;
        nvars_ = vst_ + 1;

        state_.assign(nvars_, 0);
        x_.assign(nvars_, 0.0);
        owner_.assign(m_, -1);
        pos_k_.assign(n_, -1);
        pos_f_.assign(m_, -1);

        std::vector<int> cnt(J_, 0);
        for (int i : warm) {
            state_[i] = 1;
            x_[i] = 1.0;
            for (int r : inst_.sup[i]) ++cnt[r];
        }
        for (int i = 0; i < n_; ++i)
            if (fixed_[i] == 1 && state_[i] != 1)
                throw SolverError("simplex: warm start violates fixings");
        for (int j = 0; j < J_; ++j) {
            if (cnt[j] > 0) {
                state_[vb0_ + j] = 1;
                x_[vb0_ + j] = 1.0;
                make_basic(vs0_ + j, j, cnt[j] - 1.0);
            } else {
                make_basic(vb0_ + j, j, 0.0);
            }
        }
        make_basic(vst_, m_ - 1,
                   static_cast<double>(budget) -
                       static_cast<double>(warm.size()));
    }

    void run(Clock::time_point deadline) {
        int stall = 0;
        bool bland = false;
        double last_obj = objective();
        const long long max_iter = 200000 + 200LL * (n_ + J_);
        for (;; ++iterations_) {
            if (iterations_ > max_iter)
                throw SolverError("simplex: iteration limit exceeded",
                                  objective(), kInf);
            if ((iterations_ & 63) == 0 && Clock::now() > deadline)
                throw SolverError("simplex: timeout", objective(), kInf);

            factor_basis();
            btran();
            const int e = price(bland);
            if (e < 0) break;  // optimal
            pivot(e, bland);

            const double obj = objective();
            if (obj > last_obj + 1e-12) {
                last_obj = obj;
                stall = 0;
                bland = false;
            } else if (++stall > 500) {
                bland = true;
            }
        }
    }

    double objective() const {
        double s = 0.0;
        for (int j = 0; j < J_; ++j) s += inst_.u[j] * x_[vb0_ + j];
        return s;
    }

    std::vector<double> alpha() const {
        return std::vector<double>(x_.begin(), x_.begin() + n_);
    }

    // Unscaled coverage per matrix row (merged rows share their b value).
    std::vector<double> beta() const {
        std::vector<double> b(inst_.cm->rows(), 0.0);
        for (int j = 0; j < inst_.cm->rows(); ++j) {
            const int lp = inst_.cm_to_lp[j];
            if (lp >= 0) b[j] = inst_.cm->u[j] * x_[vb0_ + lp];
        }
        return b;
    }

    // Reduced costs of the alpha columns at the final basis (0 for basic).
    std::vector<double> alpha_reduced_costs() {
        factor_basis();
        btran();
        std::vector<double> d(n_, 0.0);
        for (int i = 0; i < n_; ++i) {
            if (state_[i] == 2) continue;
            double acc = 0.0;
            for (int r : inst_.sup[i]) acc += y_[r];
            d[i] = acc - y_[m_ - 1];
        }
        return d;
    }

    int iterations() const { return iterations_; }

  private:
    void make_basic(int var, int row, double value) {
        state_[var] = 2;
        x_[var] = value;
        owner_[row] = var;
    }

    double upper(int var) const { return var < vs0_ ? 1.0 : kInf; }

    void factor_basis() {
        const int k = static_cast<int>(basic_alpha_.size());
        if (k == 0) return;
        std::vector<double> mat(static_cast<size_t>(k) * k, 0.0);
        for (int kk = 0; kk < k; ++kk) {
            const int i = basic_alpha_[kk];
            for (int r : inst_.sup[i]) {
                const int f = pos_f_[r];
                if (f >= 0) mat[static_cast<size_t>(f) * k + kk] = -1.0;
            }
            const int fb = pos_f_[m_ - 1];
            if (fb >= 0) mat[static_cast<size_t>(fb) * k + kk] = 1.0;
        }
        lu_.factor(std::move(mat), k);
    }

    void btran() {
        y_.assign(m_, 0.0);
        for (int r = 0; r < m_; ++r) {
            const int o = owner_[r];
            if (o >= vb0_ && o < vs0_) y_[r] = inst_.u[o - vb0_];
        }
        const int k = static_cast<int>(basic_alpha_.size());
        if (k == 0) return;
        std::vector<double> rhs(k, 0.0);
        for (int kk = 0; kk < k; ++kk) {
            const int i = basic_alpha_[kk];
            double s = 0.0;
            for (int r : inst_.sup[i])
                if (pos_f_[r] < 0) s += y_[r];
            if (pos_f_[m_ - 1] < 0) s -= y_[m_ - 1];
            rhs[kk] = s;
        }
        lu_.solve_t(rhs);
        for (int f = 0; f < static_cast<int>(free_rows_.size()); ++f)
            y_[free_rows_[f]] = rhs[f];
    }

    // Returns the entering variable id or -1 at optimality.
    int price(bool bland) const {
        const double y_t = y_[m_ - 1];
        int best = -1;
        double best_mag = kCostTol;
        auto consider = [&](int var, double d) {
            const bool improving = (state_[var] == 0 && d > kCostTol) ||
                                   (state_[var] == 1 && d < -kCostTol);
            if (!improving) return false;
            if (bland) {
                if (best < 0) best = var;
                return true;
            }
            if (std::abs(d) > best_mag) {
                best_mag = std::abs(d);
                best = var;
            }
            return false;
        };
        for (int i = 0; i < n_; ++i) {
            if (state_[i] == 2 || fixed_[i] != -1) continue;
            double acc = 0.0;
            for (int r : inst_.sup[i]) acc += y_[r];
            if (consider(i, acc - y_t)) return best;
        }
        if (bland) {
            // Strict ascending-variable-id scan: Bland's anti-cycling rule
            // needs one fixed total order for the entering choice.
            for (int j = 0; j < J_; ++j)
                if (state_[vb0_ + j] != 2 &&
                    consider(vb0_ + j, inst_.u[j] - y_[j]))
                    return best;
            for (int j = 0; j < J_; ++j)
                if (state_[vs0_ + j] != 2 && consider(vs0_ + j, -y_[j]))
                    return best;
        } else {
            for (int j = 0; j < J_; ++j) {
                if (state_[vb0_ + j] != 2 &&
                    consider(vb0_ + j, inst_.u[j] - y_[j]))
                    return best;
                if (state_[vs0_ + j] != 2 && consider(vs0_ + j, -y_[j]))
                    return best;
            }
        }
        if (state_[vst_] != 2) consider(vst_, -y_t);
        return best;
    }

    void pivot(int e, bool bland) {
        const int k = static_cast<int>(basic_alpha_.size());
        // FTRAN: w = B^{-1} a_e.
        std::vector<double> wr(m_, 0.0);
        if (e < n_) {
            for (int r : inst_.sup[e]) wr[r] = -1.0;
            wr[m_ - 1] = 1.0;
        } else if (e < vst_) {
            wr[(e - vb0_) % J_] = 1.0;
        } else {
            wr[m_ - 1] = 1.0;
        }
        std::vector<double> wk(k, 0.0);
        for (int f = 0; f < k; ++f) wk[f] = wr[free_rows_[f]];
        if (k > 0) lu_.solve(wk);
        for (int kk = 0; kk < k; ++kk) {
            const double v = wk[kk];
            if (v == 0.0) continue;
            for (int r : inst_.sup[basic_alpha_[kk]]) wr[r] += v;
            wr[m_ - 1] -= v;
        }

        // Ratio test: x_e = bound + sgn*t, basic x_o(t) = x_o - t*sgn*w_o.
        const double sgn = state_[e] == 0 ? 1.0 : -1.0;
        double t_star = upper(e);  // bound-flip range (lb = 0 everywhere)
        int leave = -1;
        double leave_delta = 0.0;
        auto consider = [&](int var, double w) {
            const double delta = sgn * w;
            double cand;
            if (delta > kPivTol) {
                cand = x_[var] / delta;
            } else if (delta < -kPivTol) {
                const double ub = upper(var);
                if (ub == kInf) return;
                cand = (ub - x_[var]) / (-delta);
            } else {
                return;
            }
            const bool tie = cand < t_star + 1e-12;
            // Dantzig phase prefers the numerically largest pivot among tied
            // blockers; Bland phase must take the lowest variable id to make
            // cycling impossible.
            const bool replace =
                cand < t_star - 1e-12 ||
                (tie && (bland ? (leave < 0 || var < leave)
                               : std::abs(delta) > std::abs(leave_delta)));
            if (replace) {
                t_star = std::min(cand, t_star);
                leave = var;
                leave_delta = delta;
            }
        };
        for (int kk = 0; kk < k; ++kk) consider(basic_alpha_[kk], wk[kk]);
        for (int r = 0; r < m_; ++r)
            if (owner_[r] >= 0) consider(owner_[r], wr[r]);

        if (t_star == kInf)
            throw SolverError("simplex: unbounded direction");
        t_star = std::max(t_star, 0.0);

        // Apply the step.
        x_[e] += sgn * t_star;
        for (int kk = 0; kk < k; ++kk)
            x_[basic_alpha_[kk]] -= t_star * sgn * wk[kk];
        for (int r = 0; r < m_; ++r)
            if (owner_[r] >= 0) x_[owner_[r]] -= t_star * sgn * wr[r];

        const double range_e = upper(e);
        if (leave < 0 || t_star >= range_e - 1e-12) {
            // Bound flip: the entering variable hits its opposite bound.
            state_[e] = state_[e] == 0 ? 1 : 0;
            x_[e] = state_[e] == 1 ? range_e : 0.0;
            return;
        }

        // Leaving variable exits to the bound it hit.
        if (leave_delta > 0) {
            state_[leave] = 0;
            x_[leave] = 0.0;
        } else {
            state_[leave] = 1;
            x_[leave] = upper(leave);
        }
        if (leave < n_) {
            remove_basic_alpha(leave);
        } else {
            const int rl = leave < vst_ ? (leave - vb0_) % J_ : m_ - 1;
            owner_[rl] = -1;
            pos_f_[rl] = static_cast<int>(free_rows_.size());
            free_rows_.push_back(rl);
        }
        state_[e] = 2;
        if (e < n_) {
            pos_k_[e] = static_cast<int>(basic_alpha_.size());
            basic_alpha_.push_back(e);
        } else {
            const int re = e < vst_ ? (e - vb0_) % J_ : m_ - 1;
            remove_free_row(re);
            owner_[re] = e;
        }
    }

    void remove_basic_alpha(int i) {
        const int p = pos_k_[i];
        const int last = basic_alpha_.back();
        basic_alpha_[p] = last;
        pos_k_[last] = p;
        basic_alpha_.pop_back();
        pos_k_[i] = -1;
    }

    void remove_free_row(int r) {
        const int p = pos_f_[r];
        const int last = free_rows_.back();
        free_rows_[p] = last;
        pos_f_[last] = p;
        free_rows_.pop_back();
        pos_f_[r] = -1;
    }

    const Instance& inst_;
    int T_;
    std::vector<int> fixed_;
    int n_ = 0, J_ = 0, m_ = 0;
    int vb0_ = 0, vs0_ = 0, vst_ = 0, nvars_ = 0;
    std::vector<int> state_;  // 0 lower, 1 upper, 2 basic
    std::vector<double> x_;
    std::vector<int> owner_;        // per row: unit basic var or -1
    std::vector<int> basic_alpha_;  // K
    std::vector<int> free_rows_;    // F, parallel to K's dense system rows
    std::vector<int> pos_k_, pos_f_;
    std::vector<double> y_;
    DenseLu lu_;
    int iterations_ = 0;
};

Clock::time_point make_deadline(long long timeout_ms) {
    if (timeout_ms <= 0) return Clock::time_point::max();
    return Clock::now() + std::chrono::milliseconds(timeout_ms);
}

LpSolution solve_lp_impl(const Instance& inst, int budget,
                         const std::vector<int>& fixed,
                         Clock::time_point deadline) {
    Simplex sx(inst, budget, fixed, greedy_indices(inst, budget, fixed));
    sx.run(deadline);
    LpSolution out;
    out.alpha_frac = sx.alpha();
    out.beta = sx.beta();
    out.objective = sx.objective();
    out.iterations = sx.iterations();
    out.alpha_reduced_cost = sx.alpha_reduced_costs();
    return out;
}

bool is_integral(const std::vector<double>& alpha) {
    for (double a : alpha)
        if (std::min(a, 1.0 - a) > kIntTol) return false;
    return true;
}

std::vector<int> round_indices(const std::vector<double>& alpha) {
    std::vector<int> idx;
    for (int i = 0; i < static_cast<int>(alpha.size()); ++i)
        if (alpha[i] > 0.5) idx.push_back(i);
    return idx;
}

double selection_value(const Instance& inst, const std::vector<int>& idx) {
    Pattern p;
    for (int i : idx) p.set(i);
    double s = 0.0;
    for (int j = 0; j < inst.J; ++j)
        if (inst.cm->patterns[inst.lp_to_cm[j]].intersects(p)) s += inst.u[j];
    return s;
}

struct CoreResult {
    std::vector<int> indices;
    double objective = 0.0;
    Certificate certificate = Certificate::kLpIntegral;
    bool ambiguous = false;  // alternative optima possible
    std::vector<int> lp_excluded;  // alphas provably 0 in every optimum
};

// Exact solve without the lex pass: LP, adopted if integral, else
// branch-and-bound with best-bound node order and most-fractional branching.
CoreResult solve_core(const Instance& inst, int budget,
                      const std::vector<int>& fixed,
                      Clock::time_point deadline) {
    CoreResult res;
    const LpSolution root = solve_lp_impl(inst, budget, fixed, deadline);
    if (is_integral(root.alpha_frac)) {
        res.indices = round_indices(root.alpha_frac);
        res.objective = root.objective;
        res.certificate = Certificate::kLpIntegral;
        for (int i = 0; i < inst.n; ++i) {
            if (fixed[i] != -1) continue;
            const bool in = root.alpha_frac[i] > 0.5;
            const double d = root.alpha_reduced_cost[i];
            if (!in && d < -kAmbigTol)
                res.lp_excluded.push_back(i);
            else if (std::abs(d) <= kAmbigTol)
                res.ambiguous = true;  // a zero-cost swap may exist
        }
        return res;
    }

    // Branch and bound.
    struct Node {
        double bound;
        std::vector<int> fixed;
        bool operator<(const Node& o) const { return bound < o.bound; }
    };
    std::priority_queue<Node> open;
    open.push({root.objective, fixed});

    std::vector<int> incumbent = greedy_indices(inst, budget, fixed);
    double inc_val = selection_value(inst, incumbent);
    double best_bound = root.objective;

    while (!open.empty()) {
        if (Clock::now() > deadline)
            throw SolverError("solve_mbp: timeout in branch-and-bound",
                              inc_val, open.top().bound - inc_val);
        Node node = open.top();
        open.pop();
        best_bound = node.bound;
        if (node.bound <= inc_val + value_tol(inc_val)) break;

        LpSolution lp;
        try {
            lp = solve_lp_impl(inst, budget, node.fixed, deadline);
        } catch (const SolverError&) {
            if (Clock::now() > deadline)
                throw SolverError("solve_mbp: timeout in branch-and-bound",
                                  inc_val, node.bound - inc_val);
            throw;
        }
        if (lp.objective <= inc_val + value_tol(inc_val)) continue;
        if (is_integral(lp.alpha_frac)) {
            std::vector<int> idx = round_indices(lp.alpha_frac);
            const double v = selection_value(inst, idx);
            if (v > inc_val + value_tol(inc_val) ||
                (std::abs(v - inc_val) <= value_tol(inc_val) &&
                 idx < incumbent)) {
                inc_val = std::max(v, inc_val);
                incumbent = std::move(idx);
            }
            continue;
        }
        // Most fractional branching.
        int bi = -1;
        double best_frac = kIntTol;
        for (int i = 0; i < inst.n; ++i) {
            const double f = std::min(lp.alpha_frac[i], 1.0 - lp.alpha_frac[i]);
            if (f > best_frac) {
                best_frac = f;
                bi = i;
            }
        }
        if (bi < 0) continue;
        int ones = 0;
        for (int i = 0; i < inst.n; ++i) ones += node.fixed[i] == 1;
        Node down = node;
        down.fixed[bi] = 0;
        down.bound = lp.objective;
        open.push(std::move(down));
        if (ones < budget) {
            Node up = node;
            up.fixed[bi] = 1;
            up.bound = lp.objective;
            open.push(std::move(up));
        }
    }

    res.indices = std::move(incumbent);
    res.objective = inc_val;
    res.certificate = Certificate::kBranchAndBound;
    res.ambiguous = true;  // B&B gives no uniqueness certificate
    return res;
}

double optimal_value(const Instance& inst, int budget,
                     const std::vector<int>& fixed,
                     Clock::time_point deadline) {
    return solve_core(inst, budget, fixed, deadline).objective;
}

// Constructive pass for the lexicographically smallest optimal index set:
// grow F by the smallest index whose forced inclusion still attains the
// optimal value; indices that fail can never appear in a lex-minimal optimum
// and are excluded for good.
std::vector<int> lex_smallest(const Instance& inst, int budget,
                              const std::vector<int>& fixed, double v_star,
                              const std::vector<int>& lp_excluded,
                              Clock::time_point deadline) {
    std::vector<int> work = fixed;
    for (int i : lp_excluded) work[i] = 0;
    std::vector<int> forced;
    for (int i = 0; i < inst.n; ++i)
        if (work[i] == 1) forced.push_back(i);

    const double tol = value_tol(v_star);
    while (static_cast<int>(forced.size()) < budget) {
        if (selection_value(inst, forced) >= v_star - tol) break;
        bool advanced = false;
        for (int i = 0; i < inst.n && !advanced; ++i) {
            if (work[i] != -1) continue;
            work[i] = 1;
            if (optimal_value(inst, budget, work, deadline) >= v_star - tol) {
                forced.push_back(i);
                advanced = true;
            } else {
                work[i] = 0;
            }
        }
        if (!advanced) break;  // tolerance slack: keep the incumbent as is
    }
    std::sort(forced.begin(), forced.end());
    return forced;
}

Selection finish_selection(const Instance& inst, double total,
                           std::vector<int> idx, Certificate cert) {
    std::sort(idx.begin(), idx.end());
    Selection s;
    s.indices = std::move(idx);
    s.alpha.assign(inst.n, 0);
    for (int i : s.indices) s.alpha[i] = 1;
    s.objective = selection_value(inst, s.indices);
    if (total > 0.0) s.coverage_error = 1.0 - s.objective / total;
    s.certificate = cert;
    return s;
}

double problem_total(const AllocationProblem& p) {
    return p.total_weight > 0.0 ? p.total_weight : p.condensed->total_weight();
}

}  // namespace

Pattern Selection::mask() const {
    Pattern p;
    for (int i : indices) p.set(i);
    return p;
}

LpSolution solve_lp(const AllocationProblem& problem) {
    const Instance inst(problem);
    return solve_lp_impl(inst, problem.budget, normalized_fixed(problem),
                         make_deadline(problem.timeout_ms));
}

Selection solve_mbp(const AllocationProblem& problem) {
    const Instance inst(problem);
    const std::vector<int> fixed = normalized_fixed(problem);
    const auto deadline = make_deadline(problem.timeout_ms);

    CoreResult core = solve_core(inst, problem.budget, fixed, deadline);
    std::vector<int> idx = core.indices;
    const bool run_lex =
        core.ambiguous &&
        (core.certificate == Certificate::kLpIntegral || inst.n <= 64);
    if (run_lex) {
        std::vector<int> lex =
            lex_smallest(inst, problem.budget, fixed, core.objective,
                         core.lp_excluded, deadline);
        if (selection_value(inst, lex) >=
            core.objective - value_tol(core.objective))
            idx = std::move(lex);
    }
    return finish_selection(inst, problem_total(problem), std::move(idx),
                            core.certificate);
}

Selection greedy_select(const AllocationProblem& problem) {
    const Instance inst(problem);
    std::vector<int> idx =
        greedy_indices(inst, problem.budget, normalized_fixed(problem));
    return finish_selection(inst, problem_total(problem), std::move(idx),
                            Certificate::kBaseline);
}

Selection equidistant_baseline(const KnollTrain& train, int budget,
                               EquidistantMode mode,
                               const AllocationProblem& problem) {
    if (budget < 1) throw DomainError("equidistant: budget must be >= 1");
    if (train.size() != problem.condensed->n)
        throw DomainError("equidistant: train does not match the problem");
    const Instance inst(problem);

    auto coord = [&](double diopter) {
        return mode == EquidistantMode::kDiopter ? diopter : 1.0 / diopter;
    };
    const double lo = std::min(coord(train.d_min), coord(train.d_max));
    const double hi = std::max(coord(train.d_min), coord(train.d_max));

    std::vector<int> idx;
    for (int t = 0; t < budget; ++t) {
        const double target =
            budget == 1 ? 0.5 * (lo + hi)
                        : lo + (hi - lo) * t / (budget - 1);
        // Nearest plane to the target; exact ties go to the higher index
        // (the farther plane in diopter mode).
        const double tie_eps = 1e-9 * (hi - lo);
        int best = 0;
        double best_dist = kInf;
        for (int i = 0; i < train.size(); ++i) {
            const double d = std::abs(coord(train.knolls[i].center) - target);
            if (d < best_dist - tie_eps ||
                (d < best_dist + tie_eps && i > best)) {
                best_dist = std::min(d, best_dist);
                best = i;
            }
        }
        if (std::find(idx.begin(), idx.end(), best) == idx.end())
            idx.push_back(best);
    }
    return finish_selection(inst, problem_total(problem), std::move(idx),
                            Certificate::kBaseline);
}

std::vector<Selection> sweep(const AllocationProblem& base,
                             const std::vector<int>& t_values) {
    std::vector<Selection> out;
    out.reserve(t_values.size());
    for (int t : t_values) {
        AllocationProblem p = base;
        p.budget = t;
        out.push_back(solve_mbp(p));
    }
    return out;
}

}  // namespace depthalloc
