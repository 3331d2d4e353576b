#include "core/ufield.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace ellgrow {

std::vector<double> UField::sample(const AreaRule& rule) const {
  std::vector<double> out(rule.size());
  for (int i = 0; i < rule.size(); ++i) out[i] = value(rule.nodes[i]);
  return out;
}

std::vector<double> UField::sample_lap(const AreaRule& rule) const {
  std::vector<double> out(rule.size());
  for (int i = 0; i < rule.size(); ++i) out[i] = lap(rule.nodes[i]);
  return out;
}

UField u_const(double c) {
  return {"const", [c](Complex) { return c; }, [](Complex) { return Complex{0, 0}; },
          [](Complex) { return 0.0; }};
}

UField u_one_plus_re() {
  return {"re", [](Complex z) { return 1.0 + z.real(); },
          [](Complex) { return Complex{1, 0}; }, [](Complex) { return 0.0; }};
}

UField u_abs2() {
  return {"abs2", [](Complex z) { return std::norm(z); },
          [](Complex z) { return 2.0 * z; }, [](Complex) { return 4.0; }};
}

UField u_gaussian(double sigma, Complex center) {
  if (sigma <= 0) throw InputError("gaussian field needs sigma > 0");
  const double s2 = sigma * sigma;
  auto val = [center, s2](Complex z) { return std::exp(-std::norm(z - center) / (2.0 * s2)); };
  return {"gaussian", val,
          [center, s2, val](Complex z) { return -(z - center) / s2 * val(z); },
          [center, s2, val](Complex z) {
            const double q = std::norm(z - center) / s2;
            return val(z) * (q - 2.0) / s2;
          }};
}

UField ufield_from_name(const std::string& text) {
  const auto split = [](const std::string& s, char sep) {
    std::vector<std::string> parts;
    size_t start = 0;
    while (true) {
      const size_t p = s.find(sep, start);
      parts.push_back(s.substr(start, p - start));
      if (p == std::string::npos) break;
      start = p + 1;
    }
    return parts;
  };
  const std::vector<std::string> parts = split(text, ':');
  const std::string& head = parts[0];
  try {
    if (head == "const") {
      if (parts.size() != 2) throw InputError("const field wants const:<value>");
      return u_const(std::stod(parts[1]));
    }
    if (head == "re") return u_one_plus_re();
    if (head == "abs2") return u_abs2();
    if (head == "gaussian") {
      if (parts.size() != 3) throw InputError("gaussian field wants gaussian:<sigma>:<cx>,<cy>");
      const std::vector<std::string> c = split(parts[2], ',');
      if (c.size() != 2) throw InputError("gaussian center wants <cx>,<cy>");
      return u_gaussian(std::stod(parts[1]), {std::stod(c[0]), std::stod(c[1])});
    }
  } catch (const std::invalid_argument&) {
    throw InputError("unparsable number in field spec '" + text + "'");
  }
  throw InputError("unknown field '" + head + "' (known: const, re, abs2, gaussian)");
}

}  // namespace ellgrow
