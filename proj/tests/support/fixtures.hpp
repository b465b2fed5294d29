#pragma once

#include <string>

#include "lrbisim/cli.hpp"
#include "lrbisim/lrbisim.hpp"

namespace fixtures {

inline std::string path(const std::string& name) { return std::string(LRBISIM_FIXTURES) + "/" + name; }

inline std::string text(const std::string& name) { return lrbisim::cli::read_file(path(name)); }

inline lrbisim::Lts lts(const std::string& name) { return lrbisim::parse_lts(text(name)); }

inline lrbisim::MarkovProcess markov(const std::string& name) { return lrbisim::parse_markov(text(name)); }

inline lrbisim::Relation relation(const std::string& name, const lrbisim::StateSpace& l,
                                  const lrbisim::StateSpace& r) {
  return lrbisim::parse_relation(text(name), l, r);
}

} // namespace fixtures
