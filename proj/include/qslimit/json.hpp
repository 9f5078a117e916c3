#pragma once

// JSON views of the library's results. Keys keep insertion order so output
// is stable for golden-file comparison; an infinite t_hi is written as null.

#include <cmath>
#include <optional>

#include <nlohmann/json.hpp>

#include "qslimit/cf_bounds.hpp"
#include "qslimit/density_solver.hpp"
#include "qslimit/envelope_integrals.hpp"
#include "qslimit/moments.hpp"
#include "qslimit/quicksort_sim.hpp"

namespace qslimit {

using Json = nlohmann::ordered_json;

inline const char* to_string(BoundForm f) {
  return f == BoundForm::pure_power ? "pure_power" : "power_log";
}

inline Json real_or_null(double v) {
  return std::isfinite(v) ? Json(v) : Json(nullptr);
}

inline Json to_json(const BoundChain& chain) {
  Json entries = Json::array();
  for (const auto& e : chain.entries()) {
    entries.push_back({{"p", e.p},
                       {"c", e.c},
                       {"ceiling", e.ceiling()},
                       {"provenance", to_string(e.provenance)},
                       {"form", "pure_power"},
                       {"valid_from", 0.0}});
  }
  return Json{{"entries", entries}};
}

inline Json to_json(const EnvelopePiece& pc) {
  return {{"t_lo", pc.t_lo},
          {"t_hi", real_or_null(pc.t_hi)},
          {"p", pc.bound.p},
          {"c", pc.bound.c},
          {"form", to_string(pc.bound.form)}};
}

inline Json to_json(const PiecewiseEnvelope& env) {
  Json pieces = Json::array();
  for (const auto& pc : env.pieces()) pieces.push_back(to_json(pc));
  return Json{{"pieces", pieces}};
}

inline Json to_json(const EnvelopeReport& r) {
  Json pieces = Json::array();
  for (const auto& [pc, v] : r.pieces) {
    Json j = to_json(pc);
    j["integral"] = v;
    pieces.push_back(j);
  }
  return {{"k", r.k},
          {"use_log", r.use_log},
          {"pieces", pieces},
          {"total", r.total},
          {"paper_ceiling", r.published_ceiling ? Json(*r.published_ceiling) : Json(nullptr)}};
}

inline Json to_json(const SimulationSummary& s) {
  return {{"n", s.n},
          {"samples", s.samples},
          {"seed", s.seed},
          {"mean", s.mean},
          {"variance", s.variance},
          {"exact_mean", exact_mean(s.n)},
          {"standardized_mean", s.std_mean},
          {"standardized_variance", s.std_variance},
          {"ks", s.ks ? Json(*s.ks) : Json(nullptr)},
          {"histogram", {{"edges", s.histogram.edges}, {"counts", s.histogram.counts}}}};
}

inline Json to_json(const MomentSequence& ms) {
  Json list = Json::array();
  for (std::size_t k = 0; k <= ms.order(); ++k) {
    const char* how = k == 0 ? "normalization" : k == 1 ? "centering" : "pumped";
    list.push_back({{"k", k},
                    {"value", ms[k]},
                    {"provenance", how},
                    {"quadrature_abs_tol", k < 2 ? Json(nullptr) : Json(ms.abs_tol())}});
  }
  return {{"K", ms.order()}, {"moments", list}};
}

inline Json to_json(const DensityIteration& it) {
  return {{"iterations", it.iterations},
          {"diff_history", it.diff_history},
          {"mean", it.f.mean()},
          {"variance", it.f.variance()},
          {"max_f", it.f.max_value()},
          {"min_f", it.f.min_value()},
          {"warning", it.warning ? Json(*it.warning) : Json(nullptr)}};
}

}  // namespace qslimit
