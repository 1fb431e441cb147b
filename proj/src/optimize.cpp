#include "shapeopt/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <future>
#include <limits>

#include "shapeopt/errors.hpp"

namespace shapeopt {

namespace {

struct ScaledLinear {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> A;
  Eigen::VectorXd rhs;
  std::vector<Relation> rel;
  int rows() const { return int(A.rows()); }
};

// Copy of the linear block with bounds appended as rows. Residuals stay in the
// caller's physical units.
ScaledLinear build_linear(const Problem& p) {
  ScaledLinear out;
  int nb = 0;
  if (p.lower.size() == p.n) nb += p.n;
  if (p.upper.size() == p.n) nb += p.n;
  const int nr = p.linear.rows() + nb;
  out.A.setZero(nr, p.n);
  out.rhs.setZero(nr);
  out.rel.assign(nr, Relation::LessEq);
  if (p.linear.rows() > 0) {
    out.A.topRows(p.linear.rows()) = p.linear.A;
    out.rhs.head(p.linear.rows()) = p.linear.rhs;
    for (int i = 0; i < p.linear.rows(); ++i) out.rel[i] = p.linear.rel[i];
  }
  int r = p.linear.rows();
  if (p.lower.size() == p.n)
    for (int i = 0; i < p.n; ++i, ++r) {
      out.A(r, i) = -1.0;
      out.rhs(r) = -p.lower(i);
    }
  if (p.upper.size() == p.n)
    for (int i = 0; i < p.n; ++i, ++r) {
      out.A(r, i) = 1.0;
      out.rhs(r) = p.upper(i);
    }
  return out;
}

struct Evaluation {
  double f = 0.0;      // objective, minimize sense
  double merit = 0.0;  // augmented merit
  double viol = 0.0;   // max violation (physical units / caller scales)
  Eigen::VectorXd grad;  // merit gradient, y-space
  // Gauss-Newton data for the inner Newton model
  std::vector<char> lin_active;              // per linear row
  std::vector<Eigen::VectorXd> nl_grads;     // y-space scaled gradients of active nonlinears
};

class Augmented {
 public:
  Augmented(const Problem& p, const SolveOptions& opts)
      : p_(p), opts_(opts), lin_(build_linear(p)) {
    for (int i = 0; i < lin_.rows(); ++i)
      (lin_.rel[i] == Relation::Equal ? eq_rows_ : ineq_rows_).push_back(i);
    lam_eq_.setZero(int(eq_rows_.size()) + int(p.eq.size()));
    lam_ineq_.setZero(int(ineq_rows_.size()) + int(p.ineq.size()));
    mu_ = 10.0;
    D_ = (p.diag_scale.size() == p.n) ? p.diag_scale : Eigen::VectorXd::Ones(p.n);
    Ay_ = lin_.A * D_.asDiagonal();  // rows in y-space
  }

  int n() const { return p_.n; }
  double mu() const { return mu_; }
  void grow_mu() { mu_ = std::min(mu_ * 4.0, 1e8); }
  double sense_sign() const { return p_.sense == Sense::Maximize ? -1.0 : 1.0; }

  Eigen::VectorXd to_x(const Eigen::VectorXd& y) const { return D_.cwiseProduct(y); }
  Eigen::VectorXd to_y(const Eigen::VectorXd& x) const { return x.cwiseQuotient(D_); }

  // `y` is the preconditioned iterate; residuals are evaluated at x = D y and
  // gradients returned in y-space.
  Evaluation eval(const Eigen::VectorXd& y, bool want_grad) {
    const Eigen::VectorXd x = to_x(y);
    Evaluation ev;
    ev.grad.setZero(p_.n);
    ev.lin_active.assign(lin_.rows(), 0);
    Eigen::VectorXd og(want_grad ? p_.n : 0);
    ev.f = sense_sign() * p_.objective(x, want_grad ? &og : nullptr);
    ev.merit = ev.f;
    if (want_grad) ev.grad = sense_sign() * D_.cwiseProduct(og);

    const Eigen::VectorXd lin_res = Ay_ * y - lin_.rhs;
    int ie = 0, ii = 0;
    Eigen::VectorXd cg(p_.n);
    for (int r : eq_rows_) {
      const double c = lin_res(r);
      const double lm = lam_eq_(ie) + mu_ * c;
      ev.merit += lam_eq_(ie) * c + 0.5 * mu_ * c * c;
      ev.viol = std::max(ev.viol, std::abs(c));
      if (want_grad) ev.grad += lm * Ay_.row(r).transpose();
      ev.lin_active[r] = 1;
      ++ie;
    }
    for (const auto& nc : p_.eq) {
      const double c = nc.f(x, want_grad ? &cg : nullptr) / nc.scale;
      const double lm = lam_eq_(ie) + mu_ * c;
      ev.merit += lam_eq_(ie) * c + 0.5 * mu_ * c * c;
      ev.viol = std::max(ev.viol, std::abs(c));
      if (want_grad) {
        Eigen::VectorXd gy = D_.cwiseProduct(cg) / nc.scale;
        ev.grad += lm * gy;
        ev.nl_grads.push_back(std::move(gy));
      }
      ++ie;
    }
    for (int r : ineq_rows_) {
      const double c = lin_res(r);
      const double t = std::max(0.0, lam_ineq_(ii) + mu_ * c);
      ev.merit += (t * t - lam_ineq_(ii) * lam_ineq_(ii)) / (2.0 * mu_);
      ev.viol = std::max(ev.viol, std::max(0.0, c));
      if (t > 0.0) {
        if (want_grad) ev.grad += t * Ay_.row(r).transpose();
        ev.lin_active[r] = 1;
      }
      ++ii;
    }
    for (const auto& nc : p_.ineq) {
      // value-only first: most inequality hinges are inactive and their
      // gradients are never needed
      const double c = nc.f(x, nullptr) / nc.scale;
      const double t = std::max(0.0, lam_ineq_(ii) + mu_ * c);
      ev.merit += (t * t - lam_ineq_(ii) * lam_ineq_(ii)) / (2.0 * mu_);
      ev.viol = std::max(ev.viol, std::max(0.0, c));
      if (t > 0.0 && want_grad) {
        nc.f(x, &cg);
        Eigen::VectorXd gy = D_.cwiseProduct(cg) / nc.scale;
        ev.grad += t * gy;
        ev.nl_grads.push_back(std::move(gy));
      }
      ++ii;
    }
    return ev;
  }

  // Gauss-Newton model Hessian of the merit at the last evaluation (y-space).
  // The linear-row block is maintained incrementally: between steps only a few
  // hinge constraints toggle, and a full reassembly over thousands of rows is
  // what dominates large solves.
  Eigen::MatrixXd model_hessian(const Eigen::VectorXd& y, const Evaluation& ev) {
    const bool rebuild = lin_hess_.size() == 0 || lin_hess_mu_ != mu_;
    if (rebuild) {
      lin_hess_ = Eigen::MatrixXd::Zero(p_.n, p_.n);
      int na = 0;
      for (char a : ev.lin_active) na += a;
      if (na > 0) {
        Eigen::MatrixXd act(na, p_.n);
        int r = 0;
        for (int i = 0; i < lin_.rows(); ++i)
          if (ev.lin_active[i]) act.row(r++) = Ay_.row(i);
        lin_hess_.selfadjointView<Eigen::Lower>().rankUpdate(act.transpose(), mu_);
      }
      lin_hess_mu_ = mu_;
      lin_hess_act_ = ev.lin_active;
    } else {
      for (size_t i = 0; i < ev.lin_active.size(); ++i) {
        if (ev.lin_active[i] == lin_hess_act_[i]) continue;
        const double w = ev.lin_active[i] ? mu_ : -mu_;
        lin_hess_.selfadjointView<Eigen::Lower>().rankUpdate(Ay_.row(i).transpose(), w);
      }
      lin_hess_act_ = ev.lin_active;
    }

    Eigen::MatrixXd H = lin_hess_;
    if (p_.objective_hessian) {
      Eigen::MatrixXd Hx(p_.n, p_.n);
      p_.objective_hessian(to_x(y), Hx);
      H += sense_sign() * D_.asDiagonal() * Hx * D_.asDiagonal();
    }
    for (const auto& g : ev.nl_grads) H.selfadjointView<Eigen::Lower>().rankUpdate(g, mu_);
    H.triangularView<Eigen::StrictlyUpper>() = H.transpose();
    return H;
  }

  double violation(const Eigen::VectorXd& y) const {
    const Eigen::VectorXd x = to_x(y);
    double v = 0.0;
    const Eigen::VectorXd lin_res = Ay_ * y - lin_.rhs;
    for (int r = 0; r < lin_.rows(); ++r)
      v = std::max(v, lin_.rel[r] == Relation::Equal ? std::abs(lin_res(r))
                                                     : std::max(0.0, lin_res(r)));
    for (const auto& nc : p_.eq) v = std::max(v, std::abs(nc.f(x, nullptr) / nc.scale));
    for (const auto& nc : p_.ineq) v = std::max(v, std::max(0.0, nc.f(x, nullptr) / nc.scale));
    return v;
  }

  void update_multipliers(const Eigen::VectorXd& y) {
    const Eigen::VectorXd x = to_x(y);
    const Eigen::VectorXd lin_res = Ay_ * y - lin_.rhs;
    int ie = 0, ii = 0;
    for (int r : eq_rows_) lam_eq_(ie++) += mu_ * lin_res(r);
    for (const auto& nc : p_.eq) lam_eq_(ie++) += mu_ * (nc.f(x, nullptr) / nc.scale);
    for (int r : ineq_rows_) {
      lam_ineq_(ii) = std::max(0.0, lam_ineq_(ii) + mu_ * lin_res(r));
      ++ii;
    }
    for (const auto& nc : p_.ineq) {
      lam_ineq_(ii) = std::max(0.0, lam_ineq_(ii) + mu_ * (nc.f(x, nullptr) / nc.scale));
      ++ii;
    }
  }

 private:
  const Problem& p_;
  const SolveOptions& opts_;
  ScaledLinear lin_;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> Ay_;
  std::vector<int> eq_rows_, ineq_rows_;
  Eigen::VectorXd lam_eq_, lam_ineq_;
  Eigen::VectorXd D_;
  double mu_ = 10.0;
  Eigen::MatrixXd lin_hess_;  // incremental linear-block Hessian
  std::vector<char> lin_hess_act_;
  double lin_hess_mu_ = -1.0;
};

struct LbfgsMemory {
  std::deque<Eigen::VectorXd> s, y;
  std::deque<double> rho;
  void clear() {
    s.clear();
    y.clear();
    rho.clear();
  }
  void push(const Eigen::VectorXd& si, const Eigen::VectorXd& yi) {
    const double sy = si.dot(yi);
    if (!(sy > 1e-14 * si.norm() * yi.norm())) return;
    s.push_back(si);
    y.push_back(yi);
    rho.push_back(1.0 / sy);
    if (s.size() > 20) {
      s.pop_front();
      y.pop_front();
      rho.pop_front();
    }
  }
  Eigen::VectorXd direction(const Eigen::VectorXd& g) const {
    Eigen::VectorXd q = -g;
    if (s.empty()) return q;
    const int m = int(s.size());
    std::vector<double> alpha(m);
    for (int i = m - 1; i >= 0; --i) {
      alpha[i] = rho[i] * s[i].dot(q);
      q -= alpha[i] * y[i];
    }
    q *= s.back().dot(y.back()) / y.back().squaredNorm();
    for (int i = 0; i < m; ++i) {
      const double beta = rho[i] * y[i].dot(q);
      q += (alpha[i] - beta) * s[i];
    }
    return q;
  }
};

}  // namespace

SolveResult solve(const Problem& p, const Eigen::VectorXd& x0, const SolveOptions& opts) {
  if (x0.size() != p.n) throw Error("solve: start dimension mismatch");
  Augmented al(p, opts);
  const bool use_newton = p.n <= 800;

  Eigen::VectorXd x = al.to_y(x0);  // preconditioned iterate
  Evaluation ev = al.eval(x, true);

  SolveResult res;
  res.history.reserve(std::min(opts.max_iter, 4096));

  // best-iterate tracking: feasible first, then objective
  const double feas_gate = std::max(opts.tol_feas, 1e-8);
  Eigen::VectorXd x_best = x;
  double f_best = ev.f, v_best = ev.viol;
  const auto consider = [&](const Eigen::VectorXd& xc, double fc, double vc) {
    const bool cf = vc <= feas_gate, bf = v_best <= feas_gate;
    if ((cf && !bf) || (cf && bf && fc < f_best) || (!cf && !bf && vc < v_best)) {
      x_best = xc;
      f_best = fc;
      v_best = vc;
    }
  };

  double omega = 1e-2;
  double viol_prev = std::numeric_limits<double>::infinity();
  double delta = 1e-8;  // Newton regularization
  Eigen::MatrixXd hess;
  int hess_age = -1;
  std::uint64_t hess_sig = 0;
  int stagnant = 0;
  int iter = 0;
  bool converged = false;
  bool fresh_multipliers = true;

  for (int outer = 0; outer < 80 && iter < opts.max_iter && !converged; ++outer) {
    LbfgsMemory mem;
    const int inner_cap = use_newton ? 80 : std::max(150, 2 * p.n + 100);
    int inner = 0;
    hess_age = -1;  // mu or multipliers changed; rebuild the model
    while (inner < inner_cap && iter < opts.max_iter) {
      if (ev.grad.lpNorm<Eigen::Infinity>() <= omega) break;

      const auto line_search = [&](const Eigen::VectorXd& d, double* step_out,
                                   Evaluation* trial_out, Eigen::VectorXd* xt_out) {
        const double slope = d.dot(ev.grad);
        if (!(slope < 0.0)) return false;
        double step = 1.0;
        const double noise =
            16.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(ev.merit));
        for (int ls = 0; ls < 40; ++ls) {
          Eigen::VectorXd xt = x + step * d;
          bool ok = true;
          Evaluation trial;
          try {
            trial = al.eval(xt, true);
          } catch (const Error&) {
            ok = false;  // trial outside the evaluable region; shrink
          }
          if (ok && std::isfinite(trial.merit) &&
              trial.merit <= ev.merit + 1e-4 * step * slope + noise) {
            *step_out = step;
            *trial_out = std::move(trial);
            *xt_out = std::move(xt);
            return true;
          }
          step *= 0.5;
        }
        return false;
      };

      double step = 0.0;
      Evaluation trial;
      Eigen::VectorXd xt;
      bool accepted = false;

      if (use_newton) {
        // Hessian assembly over the active rows dominates large solves; once
        // the active set settles, the model can be reused across steps
        std::uint64_t sig = 0x243f6a8885a308d3ULL + std::uint64_t(ev.nl_grads.size());
        for (size_t i = 0; i < ev.lin_active.size(); ++i)
          if (ev.lin_active[i]) sig = (sig ^ (i + 1)) * 0x9e3779b97f4a7c15ULL;
        const bool fresh = hess_age >= 0 && hess_age < 8 && sig == hess_sig;
        if (!fresh) {
          hess = al.model_hessian(x, ev);
          hess_sig = sig;
          hess_age = 0;
        } else {
          ++hess_age;
        }
        const double hscale = std::max(hess.diagonal().cwiseAbs().mean(), 1e-8);
        delta = std::max(delta, 1e-10 * hscale);
        const double trust = 0.5 * (1.0 + x.norm());
        // directions in the model's null space need a curvature floor, or the
        // solve amplifies them by 1/delta and every trial step overshoots
        const double delta_floor = ev.grad.norm() / (64.0 * trust);
        for (int reg = 0; reg < 14 && !accepted; ++reg) {
          Eigen::MatrixXd Hr = hess;
          Hr.diagonal().array() += std::max(delta, delta_floor);
          Eigen::LDLT<Eigen::MatrixXd> ldlt(Hr);
          if (ldlt.info() == Eigen::Success) {
            Eigen::VectorXd d = ldlt.solve(-ev.grad);
            const double dn = d.norm();
            if (dn > trust) d *= trust / dn;  // keep trial steps on scale
            if (d.dot(ev.grad) < 0.0 && line_search(d, &step, &trial, &xt)) {
              accepted = true;
              if (step == 1.0) delta = std::max(delta * 0.25, 1e-10 * hscale);
              break;
            }
          }
          delta = std::max(delta * 32.0, 1e-8 * hscale);
          if (reg == 1 && hess_age > 0) {  // maybe the stale model is the problem
            hess = al.model_hessian(x, ev);
            hess_age = 0;
          }
        }
      }
      if (!accepted) accepted = line_search(mem.direction(ev.grad), &step, &trial, &xt);
      if (!accepted) {
        mem.clear();
        const double gn = ev.grad.norm();
        if (gn > 0.0) {
          const double scale = std::min(1.0, (0.1 * (1.0 + x.norm())) / gn);
          accepted = line_search(-scale * ev.grad, &step, &trial, &xt);
        }
      }
      if (!accepted) break;
      if (trial.merit < -1e15) break;  // unbounded descent guard
      const double noise =
          16.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(ev.merit));
      if (ev.merit - trial.merit <= noise) {
        if (++stagnant >= 3) break;  // null steps: the merit stopped moving
      } else {
        stagnant = 0;
      }
      mem.push(xt - x, trial.grad - ev.grad);
      x = std::move(xt);
      ev = std::move(trial);
      ++iter;
      ++inner;
      res.history.push_back({al.sense_sign() * ev.f, ev.viol, ev.merit, fresh_multipliers});
      fresh_multipliers = false;
      consider(x, ev.f, ev.viol);
    }
    stagnant = 0;

    static const bool trace = std::getenv("SHAPEOPT_TRACE") != nullptr;
    if (trace)
      std::fprintf(stderr,
                   "[al] outer=%d iter=%d inner=%d mu=%.1e viol=%.3e gnorm=%.3e omega=%.1e "
                   "f=%.10f\n",
                   outer, iter, inner, al.mu(), ev.viol, ev.grad.lpNorm<Eigen::Infinity>(),
                   omega, al.sense_sign() * ev.f);

    const double viol = ev.viol;
    const double gnorm = ev.grad.lpNorm<Eigen::Infinity>();
    if (viol <= opts.tol_feas && gnorm <= opts.tol_grad * std::max(1.0, std::abs(ev.f))) {
      al.update_multipliers(x);
      converged = true;
      break;
    }
    al.update_multipliers(x);
    if (!(viol <= 0.5 * viol_prev) && viol > opts.tol_feas) al.grow_mu();
    viol_prev = viol;
    omega = std::max(omega * 0.3, opts.tol_grad);
    ev = al.eval(x, true);  // multipliers or mu changed
    fresh_multipliers = true;
  }

  // candidates: final iterate and best-seen; pick feasible-first
  double vx = al.violation(x);
  consider(x, ev.f, vx);

  res.x = al.to_x(x_best);
  res.feas_violation = al.violation(x_best);
  Eigen::VectorXd og(p.n);
  const double fraw = p.objective(res.x, &og);
  res.objective = fraw;
  const Evaluation fin = al.eval(x_best, true);
  res.kkt_residual =
      fin.grad.lpNorm<Eigen::Infinity>() / std::max(1.0, og.lpNorm<Eigen::Infinity>());
  res.iterations = iter;
  if (converged && res.feas_violation <= opts.tol_feas * 10)
    res.status = SolveStatus::Converged;
  else if (res.feas_violation > opts.infeasible_tol)
    res.status = SolveStatus::Infeasible;
  else
    res.status = SolveStatus::MaxIterations;

  if (opts.throw_on_failure) {
    if (res.status == SolveStatus::Infeasible) throw Infeasible("solve: infeasible result");
    if (res.status == SolveStatus::MaxIterations)
      throw MaxIterationsError("solve: budget exhausted");
  }
  return res;
}

SolveResult multistart(const Problem& p, const std::vector<Eigen::VectorXd>& starts,
                       const SolveOptions& opts) {
  if (starts.empty()) throw Error("multistart: at least one start expected");
  std::vector<std::future<SolveResult>> futs;
  futs.reserve(starts.size());
  for (const auto& s : starts)
    futs.push_back(std::async(std::launch::async, [&p, s, &opts] { return solve(p, s, opts); }));
  SolveResult best;
  bool have = false;
  for (auto& f : futs) {
    SolveResult r = f.get();
    if (!r.feasible(opts.infeasible_tol)) continue;
    const double sign = p.sense == Sense::Maximize ? -1.0 : 1.0;
    if (!have || sign * r.objective < sign * best.objective) {
      best = std::move(r);
      have = true;
    }
  }
  if (!have) throw AllInfeasible("multistart: every start ended infeasible");
  return best;
}

}  // namespace shapeopt
