// Copyright (c) 2026 The msvbx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <limits>

#include "msvbx/error.hpp"
#include "msvbx/vb.hpp"

namespace msvbx {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kFlush = 1e-300;

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

template <typename Row>
double log_sum_exp(const Row& v) {
  double m = kNegInf;
  for (Eigen::Index i = 0; i < v.size(); ++i) m = std::max(m, v[i]);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] != kNegInf) s += std::exp(v[i] - m);
  }
  return m + std::log(s);
}

void check_rows(const Eigen::MatrixXd& log_emissions, const HmmParams& params) {
  if (log_emissions.cols() != params.pi.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "emission columns do not match the state count");
  }
  if (!(params.p_loop > 0.0 && params.p_loop < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "P_loop must lie in (0,1)");
  }
  for (Eigen::Index t = 0; t < log_emissions.rows(); ++t) {
    bool finite = false;
    for (Eigen::Index s = 0; s < log_emissions.cols() && !finite; ++s) {
      finite = std::isfinite(log_emissions(t, s));
    }
    if (!finite) {
      throw Error(ErrorCode::kInfeasible, "chunk row " + std::to_string(t) + " has no allowed state");
    }
  }
}

void finish(ForwardBackwardResult& out, const Eigen::MatrixXd& la, const Eigen::MatrixXd& lb) {
  const Eigen::Index T = la.rows();
  if (out.log_evidence == kNegInf || !std::isfinite(out.log_evidence)) {
    throw Error(ErrorCode::kInfeasible, "no state sequence has non-zero probability");
  }
  out.gamma.resize(T, la.cols());
  for (Eigen::Index t = 0; t < T; ++t) {
    for (Eigen::Index s = 0; s < la.cols(); ++s) {
      const double lg = la(t, s) + lb(t, s) - out.log_evidence;
      const double g = lg == kNegInf ? 0.0 : std::exp(lg);
      out.gamma(t, s) = g < kFlush ? 0.0 : g;
    }
  }
}

}  // namespace

std::size_t HmmParams::retained_states() const {
  std::size_t n = 0;
  for (Eigen::Index s = 0; s < pi.size(); ++s) n += pi[s] > 0.0;
  return n;
}

HmmParams uniform_params(std::size_t num_states, double p_loop) {
  HmmParams p;
  p.pi = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(num_states),
                                   1.0 / static_cast<double>(num_states));
  p.p_loop = p_loop;
  return p;
}

ForwardBackwardResult forward_backward(const Eigen::MatrixXd& log_emissions,
                                       const HmmParams& params) {
  check_rows(log_emissions, params);
  const Eigen::Index T = log_emissions.rows();
  const Eigen::Index S = log_emissions.cols();
  ForwardBackwardResult out;
  out.entry_counts = Eigen::VectorXd::Zero(S);
  if (T == 0) return out;

  const double log_loop = std::log(params.p_loop);
  const double log_jump = std::log1p(-params.p_loop);
  Eigen::VectorXd log_pi(S);
  for (Eigen::Index s = 0; s < S; ++s) log_pi[s] = params.pi[s] > 0.0 ? std::log(params.pi[s]) : kNegInf;

  // S x T layout keeps each chunk's states contiguous. The transition is
  // P_loop*I plus the rank-one (1-P_loop)*1*pi^T, so each step needs one
  // log-sum-exp over the previous column instead of S of them. Columns of la
  // are normalized (log-sum-exp 0) and scale[t] holds the removed log mass, so
  // magnitudes stay O(1) however long the sequence is.
  const Eigen::MatrixXd em = log_emissions.transpose();
  Eigen::MatrixXd la(S, T);
  Eigen::VectorXd scale(T);
  for (Eigen::Index t = 0; t < T; ++t) {
    if (t == 0) {
      la.col(0) = log_pi + em.col(0);
    } else {
      for (Eigen::Index s = 0; s < S; ++s) {
        const double e = em(s, t);
        la(s, t) = e == kNegInf ? kNegInf : e + log_add(log_loop + la(s, t - 1), log_jump + log_pi[s]);
      }
    }
    scale[t] = log_sum_exp(la.col(t));
    if (!std::isfinite(scale[t])) {
      throw Error(ErrorCode::kInfeasible, "no state sequence has non-zero probability");
    }
    la.col(t).array() -= scale[t];
  }
  out.log_evidence = scale.sum();

  // lb columns are rescaled by arbitrary per-chunk constants; gamma rows are
  // normalized locally, which cancels them.
  Eigen::MatrixXd lb(S, T);
  lb.col(T - 1).setZero();
  Eigen::VectorXd next(S);
  for (Eigen::Index t = T - 2; t >= 0; --t) {
    next = em.col(t + 1) + lb.col(t + 1);
    const double jump = log_jump + log_sum_exp(log_pi + next);
    for (Eigen::Index s = 0; s < S; ++s) {
      lb(s, t) = next[s] == kNegInf ? jump : log_add(log_loop + next[s], jump);
    }
    lb.col(t).array() -= lb.col(t).maxCoeff();
  }

  out.gamma.resize(T, S);
  out.entry_counts = Eigen::VectorXd::Zero(S);
  Eigen::VectorXd joint(S);
  for (Eigen::Index t = 0; t < T; ++t) {
    joint = la.col(t) + lb.col(t);
    const double norm = log_sum_exp(joint);
    for (Eigen::Index s = 0; s < S; ++s) {
      const double g = joint[s] == kNegInf ? 0.0 : std::exp(joint[s] - norm);
      out.gamma(t, s) = g < kFlush ? 0.0 : g;
    }
    if (t == 0) {
      out.entry_counts = out.gamma.row(0).transpose();
      continue;
    }
    // Entering s at t: normalized alpha mass at t-1 (one) times the jump,
    // relative to the local posterior normalizer.
    const double base = log_jump - scale[t] - norm;
    for (Eigen::Index s = 0; s < S; ++s) {
      const double e = em(s, t);
      if (e == kNegInf || log_pi[s] == kNegInf) continue;
      out.entry_counts[s] += std::exp(base + log_pi[s] + e + lb(s, t));
    }
  }
  return out;
}

ForwardBackwardResult forward_backward_dense(const Eigen::MatrixXd& log_emissions,
                                             const HmmParams& params) {
  check_rows(log_emissions, params);
  const Eigen::Index T = log_emissions.rows();
  const Eigen::Index S = log_emissions.cols();
  ForwardBackwardResult out;
  out.entry_counts = Eigen::VectorXd::Zero(S);
  if (T == 0) return out;

  Eigen::MatrixXd log_trans(S, S);
  for (Eigen::Index from = 0; from < S; ++from) {
    for (Eigen::Index to = 0; to < S; ++to) {
      const double p = (1.0 - params.p_loop) * params.pi[to] + (from == to ? params.p_loop : 0.0);
      log_trans(from, to) = p > 0.0 ? std::log(p) : kNegInf;
    }
  }
  Eigen::VectorXd log_pi(S);
  for (Eigen::Index s = 0; s < S; ++s) log_pi[s] = params.pi[s] > 0.0 ? std::log(params.pi[s]) : kNegInf;

  Eigen::MatrixXd la(T, S);
  la.row(0) = (log_pi + log_emissions.row(0).transpose()).transpose();
  for (Eigen::Index t = 1; t < T; ++t) {
    for (Eigen::Index to = 0; to < S; ++to) {
      const Eigen::VectorXd v = la.row(t - 1).transpose() + log_trans.col(to);
      la(t, to) = log_emissions(t, to) + log_sum_exp(v);
    }
  }
  out.log_evidence = log_sum_exp(la.row(T - 1));

  Eigen::MatrixXd lb(T, S);
  lb.row(T - 1).setZero();
  for (Eigen::Index t = T - 2; t >= 0; --t) {
    const Eigen::VectorXd next = log_emissions.row(t + 1).transpose() + lb.row(t + 1).transpose();
    for (Eigen::Index from = 0; from < S; ++from) {
      const Eigen::VectorXd v = log_trans.row(from).transpose() + next;
      lb(t, from) = log_sum_exp(v);
    }
  }

  finish(out, la, lb);
  out.entry_counts = out.gamma.row(0).transpose();
  for (Eigen::Index t = 1; t < T; ++t) {
    const double prev = log_sum_exp(la.row(t - 1));
    for (Eigen::Index s = 0; s < S; ++s) {
      if (params.pi[s] <= 0.0) continue;
      out.entry_counts[s] += (1.0 - params.p_loop) * params.pi[s] *
                             std::exp(prev + log_emissions(t, s) + lb(t, s) - out.log_evidence);
    }
  }
  return out;
}

HmmParams update_pi(const Eigen::VectorXd& entry_counts, const HmmParams& previous, double eps) {
  if (entry_counts.size() != previous.pi.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "entry counts do not match the state count");
  }
  HmmParams out = previous;
  for (Eigen::Index s = 0; s < entry_counts.size(); ++s) {
    out.pi[s] = previous.pi[s] > 0.0 ? std::max(entry_counts[s], 0.0) : 0.0;
  }
  double total = out.pi.sum();
  if (!(total > 0.0)) throw Error(ErrorCode::kDegenerateModel, "all states dropped");
  out.pi /= total;
  for (Eigen::Index s = 0; s < out.pi.size(); ++s) {
    if (out.pi[s] < eps) out.pi[s] = 0.0;
  }
  total = out.pi.sum();
  if (!(total > 0.0)) throw Error(ErrorCode::kDegenerateModel, "all states dropped");
  out.pi /= total;
  return out;
}

}  // namespace msvbx
