#pragma once

#include <string>
#include <variant>

namespace asclab {

struct Classical {};
struct HighOrder {
  int order = 1;
};
struct HilbertScale {
  double a = 1.0;
  double p = 1.0;
  double s = 0.0;
};

using Method = std::variant<Classical, HighOrder, HilbertScale>;

inline std::string method_name(const Method& m) {
  struct V {
    std::string operator()(const Classical&) const { return "classical"; }
    std::string operator()(const HighOrder& h) const {
      return "high_order_" + std::to_string(h.order);
    }
    std::string operator()(const HilbertScale&) const { return "hilbert"; }
  };
  return std::visit(V{}, m);
}

}  // namespace asclab
