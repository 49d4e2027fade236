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

#include <algorithm>
#include <cmath>
#include <numbers>

#include "msvbx/error.hpp"
#include "msvbx/vb.hpp"

namespace msvbx {

// Classic one-speaker-per-state VBx: states are speakers, the occupancy is a
// T' x S matrix over the chunks that carry an embedding, and every update is
// a dense matrix expression.
VbResult run_vbx(const StreamData& data, std::size_t num_speakers,
                 const Eigen::MatrixXd& init_gamma, const InferenceConfig& cfg,
                 bool record_history) {
  cfg.validate();
  if (data.max_active_count() > 1) {
    throw Error(ErrorCode::kInvalidArgument, "single-stream VBx needs at most one active stream per chunk");
  }
  const auto S = static_cast<Eigen::Index>(num_speakers);
  if (S == 0) throw Error(ErrorCode::kInvalidArgument, "VBx needs at least one speaker");
  if (init_gamma.rows() != static_cast<Eigen::Index>(data.num_chunks) || init_gamma.cols() != S) {
    throw Error(ErrorCode::kDimensionMismatch, "initial occupancy must be T x S");
  }

  std::vector<std::size_t> rows;
  for (std::size_t t = 0; t < data.num_chunks; ++t) {
    if (data.active_counts[t] == 1) rows.push_back(t);
  }
  const auto T = static_cast<Eigen::Index>(rows.size());
  const auto D = static_cast<Eigen::Index>(data.dim);
  Eigen::MatrixXd rho(T, D);
  Eigen::VectorXd G(T);
  Eigen::MatrixXd gamma(T, S);
  const double log2pi = std::log(2.0 * std::numbers::pi);
  for (Eigen::Index i = 0; i < T; ++i) {
    const auto r = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)] * data.max_streams);
    rho.row(i) = data.rho.row(r);
    G[i] = -0.5 * (data.x_sqnorm[r] + static_cast<double>(D) * log2pi);
    gamma.row(i) = init_gamma.row(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)]));
  }
  const Eigen::RowVectorXd phi = data.phi.transpose();
  const double ratio = cfg.fa / cfg.fb;

  VbResult result;
  VbTrace& trace = result.trace;
  trace.params = uniform_params(num_speakers, cfg.p_loop);
  Eigen::MatrixXd inv_l(S, D);
  Eigen::MatrixXd alpha(S, D);

  auto posteriors_from = [&](const Eigen::MatrixXd& occ) {
    const Eigen::VectorXd counts = occ.colwise().sum().transpose();
    inv_l = ((ratio * counts * phi).array() + 1.0).inverse().matrix();
    alpha = ratio * inv_l.cwiseProduct(occ.transpose() * rho);
  };
  auto store_posteriors = [&] {
    result.posteriors.resize(num_speakers);
    for (Eigen::Index g = 0; g < S; ++g) {
      result.posteriors[static_cast<std::size_t>(g)].alpha = alpha.row(g).transpose();
      result.posteriors[static_cast<std::size_t>(g)].precision =
          inv_l.row(g).transpose().array().inverse().matrix();
    }
  };

  posteriors_from(gamma);
  for (std::size_t it = 0; it < cfg.max_iters && T > 0; ++it) {
    if (it > 0) posteriors_from(gamma);
    Eigen::MatrixXd scores = rho * alpha.transpose();
    scores.rowwise() -= 0.5 * ((inv_l + alpha.cwiseAbs2()) * phi.transpose()).transpose();
    scores.colwise() += G;
    const Eigen::MatrixXd log_p = cfg.fa * scores;
    const ForwardBackwardResult fb = forward_backward_dense(log_p, trace.params);
    gamma = fb.gamma;
    if (record_history) {
      Eigen::MatrixXd full = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(data.num_chunks), S);
      for (Eigen::Index i = 0; i < T; ++i) full.row(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)])) = gamma.row(i);
      trace.gamma_history.push_back(std::move(full));
      trace.pi_history.push_back(trace.params.pi);
    }
    const double value = fb.log_evidence +
                         cfg.fb * 0.5 * (inv_l.array().log() - inv_l.array() - alpha.array().square() + 1.0).sum();
    trace.params = update_pi(fb.entry_counts, trace.params, cfg.pi_drop_eps);
    std::size_t retained = 0;
    for (Eigen::Index s = 0; s < S; ++s) retained += trace.params.pi[s] > 0.0;
    trace.iterations.push_back({value, retained, retained});
    if (it > 0 && std::abs(value - trace.iterations[it - 1].elbo) < cfg.elbo_rel_tol * std::abs(value)) {
      trace.converged = true;
      break;
    }
  }
  store_posteriors();

  trace.gamma = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(data.num_chunks), S);
  for (Eigen::Index i = 0; i < T; ++i) {
    trace.gamma.row(static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)])) = gamma.row(i);
  }
  result.labels.assign(data.num_chunks * data.max_streams, -1);
  std::vector<char> seen(num_speakers, 0);
  for (Eigen::Index i = 0; i < T; ++i) {
    Eigen::Index best = 0;
    gamma.row(i).maxCoeff(&best);
    result.labels[rows[static_cast<std::size_t>(i)] * data.max_streams] = static_cast<int>(best);
    seen[static_cast<std::size_t>(best)] = 1;
  }
  result.speaker_count = static_cast<std::size_t>(std::count(seen.begin(), seen.end(), 1));
  return result;
}

}  // namespace msvbx
