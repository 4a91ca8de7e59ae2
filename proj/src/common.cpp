#include "biglap/common.hpp"

namespace biglap {

std::string to_string(Bc bc) { return bc == Bc::kNormal ? "normal" : "tangential"; }

std::string to_string(LaplacianKind kind) {
  switch (kind) {
    case LaplacianKind::kBig:
      return "big";
    case LaplacianKind::kHodge:
      return "hodge";
    case LaplacianKind::kCombinatorial:
      return "combinatorial";
  }
  return "unknown";
}

Bc parse_bc(const std::string& text) {
  if (text == "normal" || text == "n") return Bc::kNormal;
  if (text == "tangential" || text == "t") return Bc::kTangential;
  throw ConfigError("unknown boundary condition '" + text + "'");
}

LaplacianKind parse_kind(const std::string& text) {
  if (text == "big") return LaplacianKind::kBig;
  if (text == "hodge") return LaplacianKind::kHodge;
  if (text == "combinatorial") return LaplacianKind::kCombinatorial;
  throw ConfigError("unknown laplacian kind '" + text + "'");
}

}  // namespace biglap
