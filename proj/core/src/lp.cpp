#include "dsfs/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/LU>

#include "dsfs/errors.hpp"

namespace dsfs::lp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarState : unsigned char { Basic, AtLower, AtUpper, FreeAtZero };

void validate(const Problem& p) {
  const int n = p.vars();
  if (n < 1) throw DimensionMismatch("lp: problem has no variables");
  if (p.lower.size() != n || p.upper.size() != n)
    throw DimensionMismatch("lp: bound vectors do not match variable count");
  const auto rows_ok = [n](const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                           const char* what) {
    if (a.rows() != b.size())
      throw DimensionMismatch(std::string("lp: ") + what +
                              " matrix rows != rhs size");
    if (a.rows() > 0 && a.cols() != n)
      throw DimensionMismatch(std::string("lp: ") + what +
                              " matrix cols != variable count");
  };
  rows_ok(p.ineq_a, p.ineq_b, "inequality");
  rows_ok(p.eq_a, p.eq_b, "equality");
  if (!p.objective.allFinite())
    throw InvalidConfig("lp: objective has non-finite entries");
  if (p.ineq_a.size() > 0 && !p.ineq_a.allFinite())
    throw InvalidConfig("lp: inequality matrix has non-finite entries");
  if (p.eq_a.size() > 0 && !p.eq_a.allFinite())
    throw InvalidConfig("lp: equality matrix has non-finite entries");
  if (p.ineq_b.size() > 0 && !p.ineq_b.allFinite())
    throw InvalidConfig("lp: inequality rhs has non-finite entries");
  if (p.eq_b.size() > 0 && !p.eq_b.allFinite())
    throw InvalidConfig("lp: equality rhs has non-finite entries");
  for (int i = 0; i < n; ++i) {
    const double lo = p.lower[i], up = p.upper[i];
    if (std::isnan(lo) || std::isnan(up))
      throw InvalidConfig("lp: NaN bound");
    if (lo == kInf || up == -kInf)
      throw InvalidConfig("lp: bound interval is empty by sentinel");
    if (lo > up) throw InvalidConfig("lp: lower bound exceeds upper bound");
  }
}

// Revised simplex over the standardized system
//   [ineq_a  I] [x; s] (+ artificials) = [ineq_b]
//   [eq_a    0]                          [eq_b]
// with x bounded as given, s >= 0, artificials >= 0. Variable indices:
// structural 0..n-1, slacks n..n+k-1, artificials nall..nall+m-1.
class Simplex {
 public:
  Simplex(const Problem& p, const Tolerances& t) : p_(p), t_(t) { build(); }

  Solution optimize();
  FeasibilityResult feasibility();

 private:
  enum class Step { Optimal, Unbounded };

  void build();
  Step iterate();
  void refactor();
  void recompute_basics();
  void direction(int j);  // w_ = binv * column(j)
  void pivot_out_artificials();
  double phase1_infeasibility() const;
  double rhs_scale() const { return 1.0 + (m_ ? rhs_.lpNorm<Eigen::Infinity>() : 0.0); }
  Eigen::VectorXd extract();
  void verify_or_throw(const Eigen::VectorXd& x) const;

  const Problem& p_;
  Tolerances t_;
  int n_ = 0;     // structural
  int k_ = 0;     // inequality rows / slacks
  int m_ = 0;     // total rows
  int nall_ = 0;  // structural + slack
  int ntot_ = 0;  // including artificials

  Eigen::MatrixXd A_;        // m_ x nall_
  Eigen::VectorXd rhs_;      // m_
  Eigen::VectorXd lo_, up_;  // ntot_
  Eigen::VectorXd cost_;     // ntot_, phase dependent
  Eigen::VectorXd art_sign_;
  Eigen::VectorXd x_;  // ntot_
  std::vector<int> basis_;
  std::vector<VarState> state_;
  Eigen::MatrixXd binv_;

  int phase_ = 1;
  int iterations_ = 0;
  long pivots_ = 0;
  static constexpr int kRefactorEvery = 64;

  Eigen::VectorXd y_, dreal_, w_, cb_, scratch_;
  Eigen::RowVectorXd prow_;
};

void Simplex::build() {
  n_ = p_.vars();
  k_ = static_cast<int>(p_.ineq_a.rows());
  const int me = static_cast<int>(p_.eq_a.rows());
  m_ = k_ + me;
  nall_ = n_ + k_;
  ntot_ = nall_ + m_;

  A_.setZero(m_, nall_);
  if (k_ > 0) {
    A_.topLeftCorner(k_, n_) = p_.ineq_a;
    A_.block(0, n_, k_, k_).setIdentity();
  }
  if (me > 0) A_.block(k_, 0, me, n_) = p_.eq_a;
  rhs_.resize(m_);
  if (k_ > 0) rhs_.head(k_) = p_.ineq_b;
  if (me > 0) rhs_.tail(me) = p_.eq_b;

  lo_.setZero(ntot_);
  up_.setConstant(ntot_, kInf);
  lo_.head(n_) = p_.lower;
  up_.head(n_) = p_.upper;
  // slacks and artificials keep [0, inf)

  // Nonbasic start: every variable rests on a finite bound, free ones at 0.
  x_.setZero(ntot_);
  state_.assign(ntot_, VarState::FreeAtZero);
  for (int j = 0; j < ntot_; ++j) {
    if (lo_[j] > -kInf) {
      state_[j] = VarState::AtLower;
      x_[j] = lo_[j];
    } else if (up_[j] < kInf) {
      state_[j] = VarState::AtUpper;
      x_[j] = up_[j];
    }
  }

  // Artificial basis soaking up the residual of the nonbasic point.
  Eigen::VectorXd r = rhs_;
  if (m_ > 0 && nall_ > 0) r.noalias() -= A_ * x_.head(nall_);
  art_sign_.resize(m_);
  basis_.resize(m_);
  binv_.setZero(m_, m_);
  for (int i = 0; i < m_; ++i) {
    art_sign_[i] = r[i] >= 0 ? 1.0 : -1.0;
    const int a = nall_ + i;
    basis_[i] = a;
    state_[a] = VarState::Basic;
    x_[a] = std::abs(r[i]);
    binv_(i, i) = art_sign_[i];
  }

  cost_.setZero(ntot_);
  cost_.tail(m_).setOnes();
  phase_ = 1;
}

void Simplex::direction(int j) {
  if (j < nall_) {
    w_.noalias() = binv_ * A_.col(j);
  } else {
    w_ = binv_.col(j - nall_) * art_sign_[j - nall_];
  }
}

void Simplex::refactor() {
  if (m_ == 0) return;
  Eigen::MatrixXd b(m_, m_);
  for (int i = 0; i < m_; ++i) {
    const int v = basis_[i];
    if (v < nall_) {
      b.col(i) = A_.col(v);
    } else {
      b.col(i).setZero();
      b(v - nall_, i) = art_sign_[v - nall_];
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
  if (!lu.isInvertible())
    throw NumericalFailure("lp: singular basis during refactorization");
  binv_ = lu.inverse();
}

void Simplex::recompute_basics() {
  if (m_ == 0) return;
  scratch_ = x_.head(nall_);
  for (int i = 0; i < m_; ++i) {
    if (basis_[i] < nall_) scratch_[basis_[i]] = 0.0;
  }
  Eigen::VectorXd r = rhs_;
  r.noalias() -= A_ * scratch_;
  Eigen::VectorXd xb = binv_ * r;
  for (int i = 0; i < m_; ++i) x_[basis_[i]] = xb[i];
}

Simplex::Step Simplex::iterate() {
  const int bland_after = 5 * (m_ + ntot_);
  const int max_iters =
      t_.max_iters > 0 ? t_.max_iters : 50 * (m_ + ntot_) + 10000;
  cb_.resize(m_);

  for (int it = 0;; ++it) {
    if (it >= max_iters)
      throw NumericalFailure("lp: simplex iteration limit reached");
    const bool bland = it >= bland_after;
    ++iterations_;

    for (int i = 0; i < m_; ++i) cb_[i] = cost_[basis_[i]];
    y_.noalias() = binv_.transpose() * cb_;
    dreal_ = cost_.head(nall_);
    if (m_ > 0) dreal_.noalias() -= A_.transpose() * y_;

    // Entering variable: Dantzig picks the worst reduced cost, Bland the
    // lowest eligible index.
    int enter = -1, dir = 0;
    double best = t_.opt_tol;
    for (int j = 0; j < ntot_; ++j) {
      const VarState st = state_[j];
      if (st == VarState::Basic) continue;
      if (lo_[j] == up_[j]) continue;  // fixed, includes pinned artificials
      const double d = j < nall_
                           ? dreal_[j]
                           : cost_[j] - y_[j - nall_] * art_sign_[j - nall_];
      double viol = 0.0;
      int dj = 0;
      if (st == VarState::AtLower) {
        if (d < -t_.opt_tol) viol = -d, dj = 1;
      } else if (st == VarState::AtUpper) {
        if (d > t_.opt_tol) viol = d, dj = -1;
      } else {  // FreeAtZero
        if (std::abs(d) > t_.opt_tol) viol = std::abs(d), dj = d < 0 ? 1 : -1;
      }
      if (dj == 0) continue;
      if (bland) {
        enter = j;
        dir = dj;
        break;
      }
      if (viol > best) {
        best = viol;
        enter = j;
        dir = dj;
      }
    }
    if (enter < 0) return Step::Optimal;

    direction(enter);

    // Ratio test. t measures how far the entering variable moves off its
    // bound; basic variable i changes by -t * dir * w_[i].
    const bool boxed = lo_[enter] > -kInf && up_[enter] < kInf;
    double t_best = boxed ? up_[enter] - lo_[enter] : kInf;
    int leave = -1;
    double leave_g = 0.0;
    constexpr double kTie = 1e-10;
    for (int i = 0; i < m_; ++i) {
      const int v = basis_[i];
      const double g = dir * w_[i];
      double ti;
      if (g > t_.pivot_tol) {
        if (lo_[v] == -kInf) continue;
        ti = (x_[v] - lo_[v]) / g;
      } else if (g < -t_.pivot_tol) {
        if (up_[v] == kInf) continue;
        ti = (x_[v] - up_[v]) / g;
      } else {
        continue;
      }
      if (ti < 0) ti = 0;
      if (ti < t_best - kTie) {
        t_best = ti;
        leave = i;
        leave_g = g;
      } else if (ti <= t_best + kTie && leave >= 0) {
        const bool better =
            bland ? basis_[i] < basis_[leave]
                  : (std::abs(g) > std::abs(leave_g) + 1e-12 ||
                     (std::abs(std::abs(g) - std::abs(leave_g)) <= 1e-12 &&
                      basis_[i] < basis_[leave]));
        if (better) {
          leave = i;
          leave_g = g;
        }
      }
    }

    if (leave < 0) {
      if (t_best == kInf) {
        if (phase_ == 1)
          throw NumericalFailure("lp: phase-one ray, basis lost feasibility");
        return Step::Unbounded;
      }
      // Bound flip: entering variable crosses to its opposite bound.
      const double t = t_best;
      for (int i = 0; i < m_; ++i) x_[basis_[i]] -= t * dir * w_[i];
      if (dir > 0) {
        x_[enter] = up_[enter];
        state_[enter] = VarState::AtUpper;
      } else {
        x_[enter] = lo_[enter];
        state_[enter] = VarState::AtLower;
      }
      continue;
    }

    const double t = t_best;
    x_[enter] += dir * t;
    for (int i = 0; i < m_; ++i) x_[basis_[i]] -= t * dir * w_[i];
    const int gone = basis_[leave];
    if (leave_g > 0) {
      x_[gone] = lo_[gone];
      state_[gone] = VarState::AtLower;
    } else {
      x_[gone] = up_[gone];
      state_[gone] = VarState::AtUpper;
    }
    basis_[leave] = enter;
    state_[enter] = VarState::Basic;

    // Product-form update of the explicit inverse.
    const double piv = w_[leave];
    binv_.row(leave) /= piv;
    scratch_ = w_;
    scratch_[leave] = 0.0;
    prow_ = binv_.row(leave);
    binv_.noalias() -= scratch_ * prow_;

    if (++pivots_ % kRefactorEvery == 0) {
      refactor();
      recompute_basics();
    }
  }
}

double Simplex::phase1_infeasibility() const {
  double s = 0.0;
  for (int j = nall_; j < ntot_; ++j) s += std::max(0.0, x_[j]);
  return s;
}

void Simplex::pivot_out_artificials() {
  for (int i = 0; i < m_; ++i) {
    const int v = basis_[i];
    if (v < nall_) continue;
    // Degenerate pivot onto any real column with workable weight in this row.
    Eigen::RowVectorXd row = binv_.row(i) * A_;
    int pick = -1;
    double best = t_.pivot_tol;
    for (int j = 0; j < nall_; ++j) {
      if (state_[j] == VarState::Basic) continue;
      if (lo_[j] == up_[j]) continue;
      const double a = std::abs(row[j]);
      if (a > best) {
        best = a;
        pick = j;
      }
    }
    if (pick >= 0) {
      direction(pick);
      basis_[i] = pick;
      state_[pick] = VarState::Basic;
      state_[v] = VarState::AtLower;
      x_[v] = 0.0;
      const double piv = w_[i];
      binv_.row(i) /= piv;
      scratch_ = w_;
      scratch_[i] = 0.0;
      prow_ = binv_.row(i);
      binv_.noalias() -= scratch_ * prow_;
      if (++pivots_ % kRefactorEvery == 0) {
        refactor();
        recompute_basics();
      }
    }
    // else: redundant row, the artificial stays basic at zero.
  }
  // No artificial may ever re-enter.
  for (int j = nall_; j < ntot_; ++j) {
    lo_[j] = 0.0;
    up_[j] = 0.0;
  }
}

Eigen::VectorXd Simplex::extract() {
  refactor();
  recompute_basics();
  Eigen::VectorXd x = x_.head(n_);
  verify_or_throw(x);
  // Snap roundoff-sized bound violations onto the bounds themselves.
  for (int i = 0; i < n_; ++i)
    x[i] = std::min(std::max(x[i], p_.lower[i]), p_.upper[i]);
  return x;
}

void Simplex::verify_or_throw(const Eigen::VectorXd& x) const {
  const double tol = t_.feas_tol * rhs_scale();
  double viol = 0.0;
  if (p_.ineq_a.rows() > 0) {
    Eigen::VectorXd r = p_.ineq_a * x - p_.ineq_b;
    viol = std::max(viol, r.maxCoeff());
  }
  if (p_.eq_a.rows() > 0) {
    Eigen::VectorXd r = p_.eq_a * x - p_.eq_b;
    viol = std::max(viol, r.lpNorm<Eigen::Infinity>());
  }
  for (int i = 0; i < n_; ++i) {
    if (p_.lower[i] > -kInf) viol = std::max(viol, p_.lower[i] - x[i]);
    if (p_.upper[i] < kInf) viol = std::max(viol, x[i] - p_.upper[i]);
  }
  if (!(viol <= tol))
    throw NumericalFailure("lp: solution failed the feasibility audit");
}

Solution Simplex::optimize() {
  Solution sol;
  if (iterate() == Step::Unbounded)
    throw NumericalFailure("lp: unbounded phase-one objective");
  if (phase1_infeasibility() > t_.feas_tol * rhs_scale()) {
    sol.status = Status::Infeasible;
    sol.iterations = iterations_;
    return sol;
  }
  pivot_out_artificials();

  phase_ = 2;
  cost_.setZero();
  cost_.head(n_) = p_.objective;
  if (iterate() == Step::Unbounded) {
    sol.status = Status::Unbounded;
    sol.iterations = iterations_;
    return sol;
  }
  sol.x = extract();
  sol.objective = p_.objective.dot(sol.x);
  sol.status = Status::Optimal;
  sol.iterations = iterations_;
  return sol;
}

FeasibilityResult Simplex::feasibility() {
  FeasibilityResult res;
  if (iterate() == Step::Unbounded)
    throw NumericalFailure("lp: unbounded phase-one objective");
  if (phase1_infeasibility() > t_.feas_tol * rhs_scale()) {
    res.feasible = false;
    return res;
  }
  res.feasible = true;
  res.witness = extract();
  return res;
}

}  // namespace

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal:
      return "optimal";
    case Status::Infeasible:
      return "infeasible";
    case Status::Unbounded:
      return "unbounded";
  }
  return "unknown";
}

Solution solve(const Problem& p, const Tolerances& t) {
  validate(p);
  Simplex s(p, t);
  return s.optimize();
}

FeasibilityResult solve_feasibility(const Problem& p, const Tolerances& t) {
  validate(p);
  Simplex s(p, t);
  return s.feasibility();
}

std::string dump_problem(const Problem& p) {
  std::ostringstream os;
  char buf[64];
  const auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  const auto put_row = [&](const auto& row) {
    for (int j = 0; j < row.size(); ++j) {
      if (j) os << ' ';
      put(row[j]);
    }
  };
  os << "minimize\n";
  put_row(p.objective);
  os << "\nsubject to <=\n";
  for (int i = 0; i < p.ineq_a.rows(); ++i) {
    put_row(p.ineq_a.row(i));
    os << " <= ";
    put(p.ineq_b[i]);
    os << '\n';
  }
  os << "subject to =\n";
  for (int i = 0; i < p.eq_a.rows(); ++i) {
    put_row(p.eq_a.row(i));
    os << " = ";
    put(p.eq_b[i]);
    os << '\n';
  }
  os << "bounds\n";
  for (int i = 0; i < p.vars(); ++i) {
    put(p.lower[i]);
    os << ' ';
    put(p.upper[i]);
    os << '\n';
  }
  return os.str();
}

}  // namespace dsfs::lp
