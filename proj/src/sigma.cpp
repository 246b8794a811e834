#include "ewlab/sigma.hpp"

#include <cmath>
#include <stdexcept>

namespace ewlab {

double SigmaSpec::operator()(double u) const {
  switch (kind) {
    case Kind::Linear: return u;
    case Kind::Affine: return a + b * u;
    case Kind::Sine: return std::sin(u);
    case Kind::ShiftedSigmoid: return 1.0 / (1.0 + std::exp(-(u - shift)));
  }
  return u;
}

static void verify_lipschitz(const SigmaSpec& s) {
  // dense sampling on [-10, 10]; adjacent quotients must respect the
  // declared constant
  const int K = 4001;
  double prev_x = -10.0, prev_y = s(prev_x);
  for (int i = 1; i < K; ++i) {
    double x = -10.0 + 20.0 * i / (K - 1);
    double y = s(x);
    if (std::abs(y - prev_y) > s.lipschitz * std::abs(x - prev_x) * (1.0 + 1e-9))
      throw std::invalid_argument("SigmaSpec: sampled slope exceeds the declared Lipschitz constant");
    prev_x = x;
    prev_y = y;
  }
}

SigmaSpec SigmaSpec::linear() {
  SigmaSpec s;
  s.kind = Kind::Linear;
  s.lipschitz = 1.0;
  verify_lipschitz(s);
  return s;
}

SigmaSpec SigmaSpec::affine(double a, double b) {
  SigmaSpec s;
  s.kind = Kind::Affine;
  s.a = a;
  s.b = b;
  s.lipschitz = std::abs(b);
  verify_lipschitz(s);
  return s;
}

SigmaSpec SigmaSpec::sine() {
  SigmaSpec s;
  s.kind = Kind::Sine;
  s.lipschitz = 1.0;
  verify_lipschitz(s);
  return s;
}

SigmaSpec SigmaSpec::shifted_sigmoid(double shift) {
  SigmaSpec s;
  s.kind = Kind::ShiftedSigmoid;
  s.shift = shift;
  s.lipschitz = 0.25;
  verify_lipschitz(s);
  return s;
}

SigmaSpec SigmaSpec::parse(const std::string& text) {
  if (text == "linear") return linear();
  if (text == "sine") return sine();
  auto colon = text.find(':');
  std::string head = text.substr(0, colon);
  if (head == "affine") {
    if (colon == std::string::npos) throw std::invalid_argument("sigma affine needs parameters a,b");
    auto comma = text.find(',', colon);
    if (comma == std::string::npos) throw std::invalid_argument("sigma affine needs parameters a,b");
    return affine(std::stod(text.substr(colon + 1, comma - colon - 1)), std::stod(text.substr(comma + 1)));
  }
  if (head == "sigmoid") {
    double sh = colon == std::string::npos ? 0.0 : std::stod(text.substr(colon + 1));
    return shifted_sigmoid(sh);
  }
  throw std::invalid_argument("unknown sigma spec '" + text + "'");
}

std::string SigmaSpec::describe() const {
  switch (kind) {
    case Kind::Linear: return "linear";
    case Kind::Affine: return "affine:" + std::to_string(a) + "," + std::to_string(b);
    case Kind::Sine: return "sine";
    case Kind::ShiftedSigmoid: return "sigmoid:" + std::to_string(shift);
  }
  return "linear";
}

}  // namespace ewlab
