#include "mca/evaluation.hpp"

#include <set>

namespace mca {

EvalCounts score_frame(const Association& pred, const std::vector<Detection>& dets_a,
                       const std::vector<Detection>& dets_b) {
  std::set<int> in_a;
  for (const auto& d : dets_a) {
    in_a.insert(d.person_id);
  }
  std::set<int> covisible;
  for (const auto& d : dets_b) {
    if (in_a.contains(d.person_id)) {
      covisible.insert(d.person_id);
    }
  }

  EvalCounts c;
  std::set<int> covered;
  for (const auto& p : pred.pairs) {
    const int pa = dets_a.at(p.index_a).person_id;
    const int pb = dets_b.at(p.index_b).person_id;
    if (pa == pb) {
      ++c.tp;
      covered.insert(pa);
    } else {
      ++c.fp;
    }
  }
  for (const int id : covisible) {
    if (!covered.contains(id)) {
      ++c.fn;
    }
  }
  return c;
}

double f1_score(double precision, double recall) {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

Scores micro_f1(const EvalCounts& counts) {
  Scores s;
  const auto tp = static_cast<double>(counts.tp);
  if (counts.tp + counts.fp > 0) {
    s.precision = tp / static_cast<double>(counts.tp + counts.fp);
  }
  if (counts.tp + counts.fn > 0) {
    s.recall = tp / static_cast<double>(counts.tp + counts.fn);
  }
  s.f1 = f1_score(s.precision, s.recall);
  return s;
}

}  // namespace mca
