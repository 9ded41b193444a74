#pragma once

// EvidenceReport: the joint record of exact and asymptotic LR, exact and
// asymptotic p-value, and the maximal attainable LR for one experiment,
// plus JSON serialization helpers shared by the CLI.
//
// Conventions: exact_lr, approx_lr, lr_envelope and exact_p_two_sided always
// describe the uniform-vs-fair comparison (they are functions of n and k
// alone, with the envelope anchored at the fair-null u); u, approx_p and
// max_attainable_lr are standardized against the requested null p0. For
// p0 = 1/2 the two views coincide.
//
// JSON: flat snake_case keys, numbers as IEEE doubles, infinities encoded
// as the strings "inf" / "-inf".

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <json.hpp>

#include "evscale/asymptotics.hpp"
#include "evscale/exact.hpp"
#include "evscale/families.hpp"
#include "evscale/stopping.hpp"

namespace evscale {

using ordered_json = nlohmann::ordered_json;

struct EvidenceReport {
  std::int64_t n = 0;
  std::int64_t k = 0;
  double p0 = 0.5;
  double u = 0.0;
  double exact_lr = 0.0;
  double approx_lr = 0.0;
  ErrorEnvelope lr_envelope;
  double exact_p_two_sided = 0.0;
  ErrorEnvelope approx_p;
  double max_attainable_lr = 0.0;
};

inline EvidenceReport make_evidence_report(const Experiment& e, double p0) {
  EvidenceReport r;
  r.n = e.n;
  r.k = e.k;
  r.p0 = p0;
  r.u = standardize(e, p0).u;
  r.exact_lr = exact_lr_uniform_vs_fair(e);
  const double u_fair = standardize(e, 0.5).u;
  r.approx_lr = lr_approx(static_cast<double>(e.n), u_fair);
  if (std::fabs(u_fair) <= 0.5 * std::sqrt(static_cast<double>(e.n))) {
    r.lr_envelope = lr_envelope(e.n, u_fair);
  } else {
    // outside the proven regime: only the trivial bounds hold
    r.lr_envelope = ErrorEnvelope{r.approx_lr, 0.0,
                                  std::numeric_limits<double>::infinity(),
                                  BoundProvenance::none};
  }
  r.exact_p_two_sided = exact_p_value_fair(e, Sided::two);
  if (r.u != 0.0) {
    r.approx_p = p_approx(r.u);
  } else {
    // formula is singular at u = 0; the bounds degenerate to (0, inf)
    r.approx_p = ErrorEnvelope{std::numeric_limits<double>::infinity(), 0.0,
                               std::numeric_limits<double>::infinity(),
                               BoundProvenance::mills};
  }
  r.max_attainable_lr = std::exp(0.5 * r.u * r.u);
  return r;
}

inline std::string provenance_name(BoundProvenance p) {
  switch (p) {
    case BoundProvenance::e1e2: return "e1e2";
    case BoundProvenance::mills: return "mills";
    case BoundProvenance::truncation: return "truncation";
    case BoundProvenance::none: return "none";
  }
  return "none";
}

inline BoundProvenance provenance_from_name(const std::string& s) {
  if (s == "e1e2") return BoundProvenance::e1e2;
  if (s == "mills") return BoundProvenance::mills;
  if (s == "truncation") return BoundProvenance::truncation;
  if (s == "none") return BoundProvenance::none;
  throw domain_error("unknown bound provenance: " + s);
}

// Non-finite doubles cannot ride in JSON numbers; encode them as strings.
inline ordered_json json_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  return x;
}

inline double number_from_json(const ordered_json& j) {
  if (j.is_string()) {
    const std::string& s = j.get_ref<const std::string&>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw domain_error("not a number: " + s);
  }
  return j.get<double>();
}

inline ordered_json evidence_report_to_json(const EvidenceReport& r) {
  ordered_json j;
  j["n"] = r.n;
  j["k"] = r.k;
  j["p0"] = json_number(r.p0);
  j["u"] = json_number(r.u);
  j["exact_lr"] = json_number(r.exact_lr);
  j["approx_lr"] = json_number(r.approx_lr);
  j["lr_envelope_value"] = json_number(r.lr_envelope.value);
  j["lr_envelope_lower"] = json_number(r.lr_envelope.lower);
  j["lr_envelope_upper"] = json_number(r.lr_envelope.upper);
  j["lr_envelope_provenance"] = provenance_name(r.lr_envelope.provenance);
  j["exact_p_two_sided"] = json_number(r.exact_p_two_sided);
  j["approx_p_value"] = json_number(r.approx_p.value);
  j["approx_p_lower"] = json_number(r.approx_p.lower);
  j["approx_p_upper"] = json_number(r.approx_p.upper);
  j["approx_p_provenance"] = provenance_name(r.approx_p.provenance);
  j["max_attainable_lr"] = json_number(r.max_attainable_lr);
  return j;
}

inline EvidenceReport evidence_report_from_json(const ordered_json& j) {
  EvidenceReport r;
  r.n = j.at("n").get<std::int64_t>();
  r.k = j.at("k").get<std::int64_t>();
  r.p0 = number_from_json(j.at("p0"));
  r.u = number_from_json(j.at("u"));
  r.exact_lr = number_from_json(j.at("exact_lr"));
  r.approx_lr = number_from_json(j.at("approx_lr"));
  r.lr_envelope.value = number_from_json(j.at("lr_envelope_value"));
  r.lr_envelope.lower = number_from_json(j.at("lr_envelope_lower"));
  r.lr_envelope.upper = number_from_json(j.at("lr_envelope_upper"));
  r.lr_envelope.provenance =
      provenance_from_name(j.at("lr_envelope_provenance").get<std::string>());
  r.exact_p_two_sided = number_from_json(j.at("exact_p_two_sided"));
  r.approx_p.value = number_from_json(j.at("approx_p_value"));
  r.approx_p.lower = number_from_json(j.at("approx_p_lower"));
  r.approx_p.upper = number_from_json(j.at("approx_p_upper"));
  r.approx_p.provenance =
      provenance_from_name(j.at("approx_p_provenance").get<std::string>());
  r.max_attainable_lr = number_from_json(j.at("max_attainable_lr"));
  return r;
}

// Stopping-run JSON. Deliberately excludes the worker count: the result is
// bit-identical for any worker split, and the emitted bytes must be too.
// The analytic companions are included for side-by-side comparison.
inline ordered_json stopping_result_to_json(const StoppingResult& r) {
  ordered_json j;
  j["m"] = r.config.m;
  j["c"] = json_number(r.config.c);
  j["trials"] = r.config.trials;
  j["max_tosses"] = r.config.max_tosses;
  j["seed"] = r.config.seed;
  j["mean_inv_sqrt_n"] = json_number(r.mean_inv_sqrt_n);
  j["mean_inv_sqrt_n_se"] = json_number(r.mean_inv_sqrt_n_se);
  j["mean_lr"] = json_number(r.mean_lr);
  j["mean_lr_se"] = json_number(r.mean_lr_se);
  j["truncated_fraction"] = json_number(r.truncated_fraction);
  j["truncation_bias_bound"] = json_number(r.truncation_bias_bound);
  j["trials_truncated"] = r.trials_truncated;
  j["min_stopped_n"] = r.min_stopped_n;
  j["max_stopped_n"] = r.max_stopped_n;
  j["analytic_inv_sqrt_n"] = json_number(shepp_moment(r.config.m, -0.5,
                                                      r.config.c));
  j["expected_lr_simple"] = json_number(
      expected_lr_at_stopping(r.config.m, r.config.c));
  j["expected_lr_analytic"] = json_number(
      expected_lr_at_stopping_analytic(r.config.m, r.config.c));
  ordered_json hist = ordered_json::array();
  for (const auto& b : r.stopped_n_histogram) {
    ordered_json bucket;
    bucket["n_lo"] = b.lo;
    bucket["n_hi"] = b.hi;
    bucket["count"] = b.count;
    hist.push_back(bucket);
  }
  j["stopped_n_histogram"] = hist;
  return j;
}

} // namespace evscale
