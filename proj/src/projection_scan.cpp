#include "fracproj/projection_scan.hpp"

#include "fracproj/errors.hpp"
#include "fracproj/parallel.hpp"
#include "fracproj/rng.hpp"
#include "fracproj/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace fracproj {

namespace {

constexpr const char* kModule = "entropy_proj";

std::string caveat_for(int q, double rho) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "raw estimate at q=%d, rho=%.6g; O(1/q) and O(1)/log(1/rho) corrections not subtracted",
                q, rho);
  return buf;
}

int factor_base(const MeasureSpec& s) {
  if (auto b = std::get_if<BernoulliDigits>(&s.kind)) return b->dim == 1 ? b->base : 0;
  if (auto m = std::get_if<MarkovDigits>(&s.kind)) return m->dim == 1 ? m->base : 0;
  return 0;
}

bool is_x2x3(const MeasureSpec& spec) {
  const auto* p = std::get_if<Product>(&spec.kind);
  return p && factor_base(*p->first) == 2 && factor_base(*p->second) == 3;
}

void check_config(const EstimatorConfig& cfg) {
  if (cfg.q < 1) throw ArgumentError(kModule, "q must be at least 1");
  if (cfg.n_scenery < 1 || cfg.n_samples < 1) throw ArgumentError(kModule, "N and n_samples must be positive");
}

ProjectionEstimate summarize(const std::vector<double>& per_sample, const std::vector<std::size_t>& used,
                             const EstimatorConfig& cfg, double rho, std::string method) {
  Accumulator acc;
  for (double v : per_sample) acc.add(v);
  std::size_t total_used = 0;
  for (auto u : used) total_used += u;
  ProjectionEstimate out;
  out.estimate = acc.mean();
  out.std_error = acc.std_error();
  out.q = cfg.q;
  out.rho = rho;
  out.n_scenery = total_used / used.size();
  out.n_samples = per_sample.size();
  out.method = std::move(method);
  out.caveat = caveat_for(cfg.q, rho);
  return out;
}

/// Chain average of e_q started from initial(sample index).
template <typename Initial>
ProjectionEstimate chain_estimate(Initial&& initial, const PartitionOperator& op, const Projection& proj,
                                  const EstimatorConfig& cfg, std::string method) {
  std::vector<double> per_sample(cfg.n_samples);
  parallel_for(cfg.n_samples, [&](std::size_t s) {
    const std::uint64_t seed = derive_seed(cfg.seed, s);
    ProjectionCache cache;
    Rng rng(derive_seed(seed, 1));
    CPState state = initial(seed);
    double sum = 0.0;
    for (std::size_t n = 0; n < cfg.n_scenery; ++n) {
      sum += state_e_q(state, proj, cfg.q, op, &cache);
      if (n + 1 < cfg.n_scenery) state = cp_step(state, op, rng).next;
    }
    per_sample[s] = sum / static_cast<double>(cfg.n_scenery);
  });
  return summarize(per_sample, std::vector<std::size_t>(cfg.n_samples, cfg.n_scenery), cfg, op.rho(), std::move(method));
}

ProjectionEstimate sampler_estimate(const MeasureSpec& spec, const Projection& proj, const EstimatorConfig& cfg,
                                    const PartitionOperator& op) {
  if (op.kind != PartitionOperator::Kind::BaseB)
    throw ArgumentError(kModule, "sampled measures use b-adic filtrations only");
  const int b = op.base;
  const Eigen::MatrixXd points = sample_points(spec, derive_seed(cfg.seed, 0xface), cfg.sampler_points, 12);
  const Eigen::Index d = points.rows();
  std::vector<double> per_sample(cfg.n_samples);
  std::vector<std::size_t> used(cfg.n_samples);
  parallel_for(cfg.n_samples, [&](std::size_t s) {
    Rng rng(derive_seed(cfg.seed, s));
    const Eigen::VectorXd x = points.col(static_cast<Eigen::Index>(rng.below(points.cols())));
    std::vector<Eigen::Index> inside(points.cols());
    for (Eigen::Index i = 0; i < points.cols(); ++i) inside[i] = i;
    double sum = 0.0;
    std::size_t n = 0;
    for (; n < cfg.n_scenery && inside.size() >= cfg.min_cell_points; ++n) {
      const double scale = std::pow(static_cast<double>(b), static_cast<double>(n));
      Eigen::MatrixXd local(d, static_cast<Eigen::Index>(inside.size()));
      if (n == 0) {
        for (std::size_t k = 0; k < inside.size(); ++k) local.col(k) = points.col(inside[k]);
      } else {
        const Eigen::VectorXd corner = (x * scale).array().floor().matrix();
        for (std::size_t k = 0; k < inside.size(); ++k) local.col(k) = points.col(inside[k]) * scale - corner;
      }
      sum += e_q(push_grid(local, proj, cfg.q, b), cfg.q, 1.0 / b);
      const double next = scale * b;
      const Eigen::VectorXd cell = (x * next).array().floor().matrix();
      std::erase_if(inside, [&](Eigen::Index i) {
        return ((points.col(i) * next).array().floor().matrix() - cell).cwiseAbs().maxCoeff() > 0.0;
      });
    }
    used[s] = n;
    per_sample[s] = sum / static_cast<double>(n);
  });
  auto out = summarize(per_sample, used, cfg, op.rho(), "sampler");
  if (out.n_scenery < cfg.n_scenery)
    out.caveat += "; sampler cells ran out of points after about " + std::to_string(out.n_scenery) + " levels";
  return out;
}

}  // namespace

PartitionOperator default_operator(const MeasureSpec& spec) {
  if (is_x2x3(spec)) return PartitionOperator::rw();
  if (has_exact_tree(spec)) return PartitionOperator::base_b(digit_coding(spec).base);
  return PartitionOperator::base_b(2);
}

ProjectionEstimate projection_dim_lower(const TreeMeasure<double>& tm, const Projection& proj,
                                        const EstimatorConfig& cfg) {
  check_config(cfg);
  const auto op = PartitionOperator::base_b(static_cast<int>(std::lround(1.0 / tm.rho())));
  const auto root = tree_state(tm);
  return chain_estimate([&](std::uint64_t) { return root; }, op, proj, cfg, "tree");
}

ProjectionEstimate projection_dim_lower(const MeasureSpec& spec, const Projection& proj, const EstimatorConfig& cfg,
                                        std::optional<PartitionOperator> op) {
  check_config(cfg);
  validate_spec(spec);
  const PartitionOperator chosen = op ? *op : default_operator(spec);
  if (chosen.kind == PartitionOperator::Kind::Rw) {
    if (!is_x2x3(spec))
      throw ArgumentError(kModule, "the Rw filtration needs a product of a base-2 and a base-3 digit measure");
    const auto& p = std::get<Product>(spec.kind);
    return chain_estimate([&](std::uint64_t seed) { return x2x3_initial(*p.first, *p.second, std::nullopt, seed); },
                          chosen, proj, cfg, "x2x3-chain");
  }
  if (has_exact_tree(spec) && digit_coding(spec).base == chosen.base)
    return projection_dim_lower(build_tree<double>(spec, kChainDepth), proj, cfg);
  return sampler_estimate(spec, proj, cfg, chosen);
}

void ScanResult::write_csv(std::ostream& os) const {
  os << "slope,estimate,stderr,q,N,n_samples,seed,flagged\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.6g,%d,%zu,%zu,%llu,%d\n", r.slope, r.result.estimate,
                  r.result.std_error, r.result.q, r.result.n_scenery, r.result.n_samples,
                  static_cast<unsigned long long>(seed), r.flagged ? 1 : 0);
    os << buf;
  }
}

ScanResult scan_slopes(const MeasureSpec& spec, const std::vector<double>& slopes, const EstimatorConfig& cfg,
                       double epsilon, std::optional<PartitionOperator> op) {
  if (slopes.empty()) throw ArgumentError(kModule, "empty slope grid");
  ScanResult out;
  out.epsilon = epsilon;
  out.seed = cfg.seed;
  out.rows.resize(slopes.size());
  for (std::size_t k = 0; k < slopes.size(); ++k) {
    EstimatorConfig c = cfg;
    c.seed = derive_seed(cfg.seed, k);
    out.rows[k].slope = slopes[k];
    out.rows[k].result = projection_dim_lower(spec, Projection::with_slope(slopes[k]), c, op);
  }
  out.max_estimate = -1.0;
  for (const auto& r : out.rows) out.max_estimate = std::max(out.max_estimate, r.result.estimate);
  for (auto& r : out.rows) r.flagged = r.result.estimate < out.max_estimate - epsilon;
  return out;
}

std::vector<double> symmetric_slope_grid(double lo, double hi, std::size_t per_side) {
  if (!(lo > 0.0 && hi >= lo) || per_side < 1) throw ArgumentError(kModule, "slope grid needs 0 < lo <= hi");
  std::vector<double> out;
  for (std::size_t i = 0; i < per_side; ++i) {
    const double s = per_side == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(per_side - 1);
    out.push_back(s);
    out.push_back(-s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace fracproj
