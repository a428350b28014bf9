#pragma once

#include "sra/core/model.hpp"

#include <string>

namespace sra {

// Concrete-syntax printers. Output re-parses to a structurally identical
// tree; parentheses are emitted only where precedence requires them.
std::string print(const ExprPtr& e);
std::string print(const StmtPtr& s);
std::string print_model(const Model& m);

} // namespace sra
