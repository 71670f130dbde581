#pragma once

#include <string>
#include <utility>
#include <vector>

namespace smalldiv {

using ParamList = std::vector<std::pair<std::string, double>>;

struct BoundReport {
  std::string quantity;
  double computed = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  bool verdict = false;
  ParamList params;
  std::string note;

  static BoundReport make(std::string quantity, double computed, double bound, ParamList params = {},
                          std::string note = {}) {
    BoundReport r;
    r.quantity = std::move(quantity);
    r.computed = computed;
    r.bound = bound;
    r.margin = bound - computed;
    r.verdict = r.margin >= 0.0;
    r.params = std::move(params);
    r.note = std::move(note);
    return r;
  }
};

}  // namespace smalldiv
