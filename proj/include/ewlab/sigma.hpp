#ifndef EWLAB_SIGMA_HPP
#define EWLAB_SIGMA_HPP

#include <string>

namespace ewlab {

// Global Lipschitz nonlinearity multiplying the noise.
struct SigmaSpec {
  enum class Kind { Linear, Affine, Sine, ShiftedSigmoid };
  Kind kind = Kind::Linear;
  double a = 0.0;  // affine offset
  double b = 1.0;  // affine slope
  double shift = 0.0;
  double lipschitz = 1.0;

  double operator()(double u) const;

  static SigmaSpec linear();
  static SigmaSpec affine(double a, double b);
  static SigmaSpec sine();
  static SigmaSpec shifted_sigmoid(double shift);
  static SigmaSpec parse(const std::string& text);  // "linear" | "affine:a,b" | "sine" | "sigmoid:shift"
  std::string describe() const;
};

}  // namespace ewlab

#endif
