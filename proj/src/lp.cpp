#include "lp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace mpctune {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

void LpProblem::validate() const {
  const int n = num_vars();
  if (n < 1) throw InputError("LpProblem: no variables");
  if (!c.allFinite()) throw InputError("LpProblem: non-finite objective coefficients");
  if (a_eq.rows() != b_eq.size() || (a_eq.rows() > 0 && a_eq.cols() != n))
    throw InputError("LpProblem: equality block dimension mismatch");
  if (a_ub.rows() != b_ub.size() || (a_ub.rows() > 0 && a_ub.cols() != n))
    throw InputError("LpProblem: inequality block dimension mismatch");
  if (a_eq.size() > 0 && !a_eq.allFinite()) throw InputError("LpProblem: non-finite A_eq");
  if (a_ub.size() > 0 && !a_ub.allFinite()) throw InputError("LpProblem: non-finite A_ub");
  if (b_eq.size() > 0 && !b_eq.allFinite()) throw InputError("LpProblem: non-finite b_eq");
  if (b_ub.size() > 0 && !b_ub.allFinite()) throw InputError("LpProblem: non-finite b_ub");
  if (lb.size() != n || ub.size() != n) throw InputError("LpProblem: bound vector size mismatch");
  for (int j = 0; j < n; ++j) {
    if (std::isnan(lb(j)) || std::isnan(ub(j))) throw InputError("LpProblem: NaN bound");
    if (lb(j) > ub(j)) {
      std::ostringstream os;
      os << "LpProblem: lb > ub for variable " << (j < (int)var_names.size() ? var_names[j] : std::to_string(j));
      throw InputError(os.str());
    }
  }
  if (!var_names.empty() && (int)var_names.size() != n)
    throw InputError("LpProblem: var_names size mismatch");
}

int LpProblem::var_index(const std::string& name) const {
  for (size_t i = 0; i < var_names.size(); ++i) {
    if (var_names[i] == name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

enum class VarState : uint8_t { Basic, AtLower, AtUpper, Free, Fixed };

class Simplex {
 public:
  Simplex(const LpProblem& p, const SimplexOptions& opt) : p_(p), opt_(opt) {
    n_ = p.num_vars();
    m_eq_ = p.num_eq();
    m_ub_ = p.num_ub();
    m_ = m_eq_ + m_ub_;
    nc_ = n_ + m_ub_;  // structural + slack columns

    a_.setZero(m_, nc_);
    if (m_eq_ > 0) a_.topLeftCorner(m_eq_, n_) = p.a_eq;
    if (m_ub_ > 0) {
      a_.bottomLeftCorner(m_ub_, n_) = p.a_ub;
      a_.bottomRightCorner(m_ub_, m_ub_).setIdentity();
    }
    b_.resize(m_);
    if (m_eq_ > 0) b_.head(m_eq_) = p.b_eq;
    if (m_ub_ > 0) b_.tail(m_ub_) = p.b_ub;

    lo_.resize(nc_);
    hi_.resize(nc_);
    lo_.head(n_) = p.lb;
    hi_.head(n_) = p.ub;
    lo_.tail(m_ub_).setZero();
    hi_.tail(m_ub_).setConstant(kInf);

    cost_.setZero(nc_);
    cost_.head(n_) = p.c;
  }

  LpSolution run() {
    LpSolution sol;
    if (m_ == 0) return bound_only_solution();

    init_basis();

    // phase 1: minimize the sum of artificial variables
    if (!art_rows_.empty()) {
      const Status st = iterate(true);
      if (st != Status::OptimalPhase) throw NumericalError("simplex: phase 1 lost boundedness");
      refactor();
      compute_xb();
      double infeas = 0.0;
      for (int i = 0; i < m_; ++i) {
        if (is_artificial(basis_[i])) infeas += xb_(i);
      }
      const double scale = 1.0 + b_.cwiseAbs().maxCoeff();
      if (infeas > opt_.feas_tol * scale) {
        sol.status = LpStatus::Infeasible;
        sol.iterations = iters_;
        return sol;
      }
      purge_artificials();
    }

    // phase 2
    const Status st = iterate(false);
    refactor();
    compute_xb();
    if (st == Status::UnboundedPhase) {
      sol.status = LpStatus::Unbounded;
      sol.iterations = iters_;
      return sol;
    }

    sol.status = LpStatus::Optimal;
    sol.x.resize(n_);
    for (int j = 0; j < n_; ++j) sol.x(j) = current_value(j);
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) sol.x(basis_[i]) = xb_(i);
    }
    sol.objective = p_.c.dot(sol.x);
    sol.iterations = iters_;
    return sol;
  }

 private:
  enum class Status { OptimalPhase, UnboundedPhase };

  static constexpr double kPivTol = 1e-9;
  static constexpr double kDrivePivTol = 1e-7;

  bool is_artificial(int j) const { return j >= nc_; }

  double nonbasic_value(int j) const {
    switch (state_[j]) {
      case VarState::AtLower:
      case VarState::Fixed: return lo_(j);
      case VarState::AtUpper: return hi_(j);
      default: return 0.0;  // Free
    }
  }
  double current_value(int j) const { return nonbasic_value(j); }

  // Nonbasic initial point: each structural variable at its finite bound
  // nearest zero (free variables at 0), slacks at zero.
  void init_nonbasic_states() {
    state_.assign(nc_, VarState::AtLower);
    for (int j = 0; j < nc_; ++j) {
      const double lo = lo_(j), hi = hi_(j);
      if (lo == hi) {
        state_[j] = VarState::Fixed;
      } else if (std::isfinite(lo) && std::isfinite(hi)) {
        state_[j] = (std::abs(lo) <= std::abs(hi)) ? VarState::AtLower : VarState::AtUpper;
      } else if (std::isfinite(lo)) {
        state_[j] = VarState::AtLower;
      } else if (std::isfinite(hi)) {
        state_[j] = VarState::AtUpper;
      } else {
        state_[j] = VarState::Free;
      }
    }
  }

  void init_basis() {
    init_nonbasic_states();

    Eigen::VectorXd v(nc_);
    for (int j = 0; j < nc_; ++j) v(j) = nonbasic_value(j);
    Eigen::VectorXd resid = b_ - a_ * v;

    basis_.assign(m_, -1);
    art_rows_.clear();
    art_sign_.clear();

    for (int i = 0; i < m_; ++i) {
      const bool ub_row = i >= m_eq_;
      const int slack = ub_row ? n_ + (i - m_eq_) : -1;
      // the slack is currently nonbasic at 0, so the row residual including
      // the slack's coefficient is resid(i); a nonnegative residual lets the
      // slack itself serve as the basic variable
      if (ub_row && resid(i) >= 0.0) {
        basis_[i] = slack;
        state_[slack] = VarState::Basic;
      } else {
        const int art_id = nc_ + static_cast<int>(art_rows_.size());
        art_rows_.push_back(i);
        art_sign_.push_back(resid(i) >= 0.0 ? 1.0 : -1.0);
        basis_[i] = art_id;
      }
    }
    refactor();
    compute_xb();
  }

  Eigen::VectorXd column(int j) const {
    if (!is_artificial(j)) return a_.col(j);
    Eigen::VectorXd col = Eigen::VectorXd::Zero(m_);
    const int k = j - nc_;
    col(art_rows_[k]) = art_sign_[k];
    return col;
  }

  void refactor() {
    Eigen::MatrixXd bmat(m_, m_);
    for (int i = 0; i < m_; ++i) bmat.col(i) = column(basis_[i]);
    binv_ = Eigen::PartialPivLU<Eigen::MatrixXd>(bmat).inverse();
  }

  void compute_xb() {
    Eigen::VectorXd v(nc_);
    for (int j = 0; j < nc_; ++j) {
      v(j) = state_[j] == VarState::Basic ? 0.0 : nonbasic_value(j);
    }
    xb_ = binv_ * (b_ - a_ * v);
  }

  double phase_cost(int j, bool phase1) const {
    if (is_artificial(j)) return phase1 ? 1.0 : 0.0;
    return phase1 ? 0.0 : cost_(j);
  }

  double objective_now(bool phase1) const {
    double obj = 0.0;
    for (int i = 0; i < m_; ++i) obj += phase_cost(basis_[i], phase1) * xb_(i);
    for (int j = 0; j < nc_; ++j) {
      if (state_[j] != VarState::Basic) obj += phase_cost(j, phase1) * nonbasic_value(j);
    }
    return obj;
  }

  Status iterate(bool phase1) {
    const int cap = opt_.max_iterations > 0 ? opt_.max_iterations
                                            : std::max(200, 50 * (n_ + m_));
    // Bland's rule must kick in well before the cap, even on tiny problems
    const int bland_after = std::min(opt_.stall_limit, std::max(10, cap / 2));
    bool bland = false;
    int stall = 0;
    double last_obj = std::numeric_limits<double>::infinity();
    int since_refactor = 0;

    while (true) {
      if (iters_ >= cap) {
        throw NumericalError("simplex: iteration cap " + std::to_string(cap) + " exceeded");
      }
      ++iters_;
      if (++since_refactor >= opt_.refactor_every) {
        refactor();
        compute_xb();
        since_refactor = 0;
      }

      // pricing
      Eigen::VectorXd cb(m_);
      for (int i = 0; i < m_; ++i) cb(i) = phase_cost(basis_[i], phase1);
      const Eigen::VectorXd y = binv_.transpose() * cb;
      Eigen::VectorXd d = -(a_.transpose() * y);
      if (phase1) {
        // structural/slack phase-1 costs are all zero
      } else {
        d += cost_;
      }

      int q = -1;
      double q_score = 0.0;
      int q_dir = 0;
      for (int j = 0; j < nc_; ++j) {
        if (state_[j] == VarState::Basic || state_[j] == VarState::Fixed) continue;
        const double dj = d(j);
        int dir = 0;
        if (state_[j] == VarState::AtLower && dj < -opt_.opt_tol) dir = +1;
        else if (state_[j] == VarState::AtUpper && dj > opt_.opt_tol) dir = -1;
        else if (state_[j] == VarState::Free && std::abs(dj) > opt_.opt_tol) dir = dj < 0 ? +1 : -1;
        if (dir == 0) continue;
        if (bland) {
          q = j;
          q_dir = dir;
          break;
        }
        const double score = std::abs(dj);
        if (score > q_score) {
          q_score = score;
          q = j;
          q_dir = dir;
        }
      }
      if (q < 0) return Status::OptimalPhase;

      const Eigen::VectorXd w = binv_ * a_.col(q);

      // ratio test; own-range block is sentinel row -1
      double best_t = kInf;
      int block = -1;
      if (std::isfinite(lo_(q)) && std::isfinite(hi_(q))) best_t = hi_(q) - lo_(q);
      for (int i = 0; i < m_; ++i) {
        const double wi = q_dir * w(i);
        const int bj = basis_[i];
        double t;
        if (wi > kPivTol) {
          const double lo = is_artificial(bj) ? 0.0 : lo_(bj);
          if (!std::isfinite(lo)) continue;
          t = (xb_(i) - lo) / wi;
        } else if (wi < -kPivTol) {
          const double hi = is_artificial(bj) ? (art_locked_ ? 0.0 : kInf) : hi_(bj);
          if (!std::isfinite(hi)) continue;
          t = (xb_(i) - hi) / wi;
        } else {
          continue;
        }
        if (t < 0.0) t = 0.0;
        if (t < best_t - 1e-12 ||
            (t < best_t + 1e-12 && block >= 0 && basis_[i] < basis_[block])) {
          best_t = t;
          block = i;
        }
      }

      if (!std::isfinite(best_t)) {
        if (phase1) throw NumericalError("simplex: unbounded phase-1 subproblem");
        return Status::UnboundedPhase;
      }

      if (block < 0) {
        // bound flip on the entering variable
        xb_ -= (q_dir * best_t) * w;
        state_[q] = q_dir > 0 ? VarState::AtUpper : VarState::AtLower;
      } else {
        const int leaving = basis_[block];
        const double enter_val = nonbasic_value(q) + q_dir * best_t;
        xb_ -= (q_dir * best_t) * w;
        if (is_artificial(leaving)) {
          // artificials never re-enter
        } else if (q_dir * w(block) > 0.0) {
          state_[leaving] = lo_(leaving) == hi_(leaving) ? VarState::Fixed : VarState::AtLower;
        } else {
          state_[leaving] = lo_(leaving) == hi_(leaving) ? VarState::Fixed : VarState::AtUpper;
        }
        basis_[block] = q;
        state_[q] = VarState::Basic;
        xb_(block) = enter_val;
        eta_update(w, block);
      }

      // stall detection -> Bland's rule
      const double obj = objective_now(phase1);
      if (obj < last_obj - 1e-12 * (1.0 + std::abs(last_obj))) {
        stall = 0;
      } else if (++stall >= bland_after) {
        bland = true;
      }
      last_obj = obj;
    }
  }

  // product-form update of the explicit basis inverse after pivoting column q
  // into row `r` with FTRAN vector w
  void eta_update(const Eigen::VectorXd& w, int r) {
    const double piv = w(r);
    const Eigen::RowVectorXd row_r = binv_.row(r) / piv;
    Eigen::VectorXd wz = w;
    wz(r) = 0.0;
    binv_.noalias() -= wz * row_r;
    binv_.row(r) = row_r;
  }

  // swap zero-valued basic artificials for structural/slack columns, or mark
  // their rows redundant; afterwards artificials are locked at zero
  void purge_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[i])) continue;
      const Eigen::RowVectorXd row = binv_.row(i) * a_;
      int pick = -1;
      double pick_mag = kDrivePivTol;
      for (int j = 0; j < nc_; ++j) {
        if (state_[j] == VarState::Basic) continue;
        const double mag = std::abs(row(j));
        if (mag > pick_mag) {
          pick_mag = mag;
          pick = j;
        }
      }
      if (pick < 0) continue;  // redundant row; artificial stays basic at zero
      const Eigen::VectorXd w = binv_ * a_.col(pick);
      const double entering_val = nonbasic_value(pick);
      basis_[i] = pick;
      state_[pick] = VarState::Basic;
      xb_(i) = entering_val;
      eta_update(w, i);
    }
    art_locked_ = true;
  }

  LpSolution bound_only_solution() const {
    LpSolution sol;
    sol.x.resize(n_);
    for (int j = 0; j < n_; ++j) {
      const double cj = p_.c(j);
      double v;
      if (cj > 0.0) {
        v = p_.lb(j);
      } else if (cj < 0.0) {
        v = p_.ub(j);
      } else if (std::isfinite(p_.lb(j))) {
        v = p_.lb(j);
      } else if (std::isfinite(p_.ub(j))) {
        v = std::min(0.0, p_.ub(j));
      } else {
        v = 0.0;
      }
      if (!std::isfinite(v)) {
        sol.status = LpStatus::Unbounded;
        return sol;
      }
      sol.x(j) = v;
    }
    sol.status = LpStatus::Optimal;
    sol.objective = p_.c.dot(sol.x);
    return sol;
  }

  const LpProblem& p_;
  SimplexOptions opt_;
  int n_ = 0, m_eq_ = 0, m_ub_ = 0, m_ = 0, nc_ = 0;
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_, lo_, hi_, cost_;
  std::vector<int> basis_;
  std::vector<VarState> state_;
  std::vector<int> art_rows_;
  std::vector<double> art_sign_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd xb_;
  bool art_locked_ = false;
  int iters_ = 0;
};

}  // namespace

LpSolution solve(const LpProblem& p, const SimplexOptions& options) {
  p.validate();
  Simplex s(p, options);
  return s.run();
}

namespace {
void write_terms(std::ostream& os, const Eigen::VectorXd& coeffs,
                 const std::vector<std::string>& names) {
  bool first = true;
  for (int j = 0; j < coeffs.size(); ++j) {
    const double v = coeffs(j);
    if (v == 0.0) continue;
    if (first) {
      if (v < 0) os << "- ";
      first = false;
    } else {
      os << (v < 0 ? " - " : " + ");
    }
    os << std::abs(v) << " " << names[j];
  }
  if (first) os << "0 " << names[0];
}
}  // namespace

void write_lp_file(const LpProblem& p, std::ostream& os) {
  p.validate();
  std::vector<std::string> names = p.var_names;
  if (names.empty()) {
    for (int j = 0; j < p.num_vars(); ++j) names.push_back("x" + std::to_string(j));
  }
  for (auto& nm : names) {
    for (auto& ch : nm) {
      if (ch == '[' || ch == ']') ch = '_';
    }
  }
  os.precision(17);
  os << "\\ written by mpctune\nMinimize\n obj: ";
  write_terms(os, p.c, names);
  os << "\nSubject To\n";
  for (int i = 0; i < p.num_eq(); ++i) {
    const std::string rn = i < (int)p.row_names.size() ? p.row_names[i] : "eq" + std::to_string(i);
    os << " " << rn << ": ";
    write_terms(os, p.a_eq.row(i).transpose(), names);
    os << " = " << p.b_eq(i) << "\n";
  }
  for (int i = 0; i < p.num_ub(); ++i) {
    const size_t ri = p.num_eq() + i;
    const std::string rn = ri < p.row_names.size() ? p.row_names[ri] : "ub" + std::to_string(i);
    os << " " << rn << ": ";
    write_terms(os, p.a_ub.row(i).transpose(), names);
    os << " <= " << p.b_ub(i) << "\n";
  }
  os << "Bounds\n";
  for (int j = 0; j < p.num_vars(); ++j) {
    const double lo = p.lb(j), hi = p.ub(j);
    if (!std::isfinite(lo) && !std::isfinite(hi)) {
      os << " " << names[j] << " free\n";
    } else if (!std::isfinite(lo)) {
      os << " -inf <= " << names[j] << " <= " << hi << "\n";
    } else if (!std::isfinite(hi)) {
      os << " " << names[j] << " >= " << lo << "\n";
    } else {
      os << " " << lo << " <= " << names[j] << " <= " << hi << "\n";
    }
  }
  os << "End\n";
}

}  // namespace mpctune
