#pragma once

#include <string>

#include "smalldiv/contfrac.hpp"

namespace smalldiv {

// golden | surd:[pre;per] | quotients:[a1,...] | rational:P/Q
// | rule:omega-star(alpha=S/n^E,a1=N) | rule:exp-liouville(c=X,a1=N)
FrequencySpec parse_frequency(const std::string& text);

extern const char* const kFrequencyGrammar;

}  // namespace smalldiv
