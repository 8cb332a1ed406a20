#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cbfed {

/// One affine piece a*xi + b of a piecewise law.
struct LawPiece {
  double a = 0.0;
  double b = 0.0;
  double operator()(double xi) const noexcept { return a * xi + b; }
};

/// Hypothesis metadata declared with a law.
struct LawMetadata {
  std::string name;
  double C1 = 0.0;           ///< growth |theta| <= C1 + C2 |xi|
  double C2 = 0.0;
  double phi = 0.0;          ///< theta <= 0 below -phi, >= 0 above phi
  std::optional<double> K;   ///< one-sided Lipschitz defect
};

/// A scalar law theta(x, t, xi), locally bounded with one-sided limits.
///
/// Piecewise laws hold affine pieces: piece i covers [breaks[i-1], breaks[i])
/// (unbounded at both ends), so the law is right-continuous. Black-box laws
/// wrap an arbitrary function together with the points where it may jump.
class NonsmoothLaw {
 public:
  using Function = std::function<double(const std::array<double, 3>& x, double t, double xi)>;

  NonsmoothLaw();  ///< theta == 0

  static NonsmoothLaw piecewise(std::vector<double> breaks, std::vector<LawPiece> pieces,
                                LawMetadata meta);
  static NonsmoothLaw black_box(Function f, std::vector<double> breaks, LawMetadata meta,
                                bool autonomous = true);
  /// Affine law a*xi + b without breaks.
  static NonsmoothLaw affine(double a, double b, LawMetadata meta);

  double operator()(double xi) const { return eval({0.0, 0.0, 0.0}, 0.0, xi); }
  double eval(const std::array<double, 3>& x, double t, double xi) const;
  double left_limit(double xi) const;
  double right_limit(double xi) const;

  bool is_piecewise() const noexcept { return !function_; }
  bool autonomous() const noexcept { return autonomous_; }
  /// True for the identically zero law.
  bool is_zero() const noexcept;
  const std::vector<double>& breaks() const noexcept { return breaks_; }
  const std::vector<LawPiece>& pieces() const noexcept { return pieces_; }
  const LawMetadata& metadata() const noexcept { return meta_; }
  LawMetadata& metadata() noexcept { return meta_; }

  /// Index of the piece containing xi (piecewise laws only).
  std::size_t piece_index(double xi) const noexcept;

 private:
  std::vector<double> breaks_;
  std::vector<LawPiece> pieces_;
  Function function_;
  bool autonomous_ = true;
  LawMetadata meta_;
};

/// Number of samples per ball used for black-box envelopes.
inline constexpr int kBlackBoxEnvelopeSamples = 2049;

struct Envelope {
  double lower = 0.0;
  double upper = 0.0;
};

/// Essential inf/sup of theta over [xi - eps, xi + eps]. eps = 0 gives the
/// limits of the envelopes as eps -> 0+, i.e. the one-sided limits at xi.
Envelope envelopes(const NonsmoothLaw& law, double xi, double eps);

/// [lower theta(xi), upper theta(xi)], the filled-in graph at xi.
inline Envelope clarke_interval(const NonsmoothLaw& law, double xi) {
  return envelopes(law, xi, 0.0);
}

/// j(xi) = int_0^xi theta(s) ds.
double potential_j(const NonsmoothLaw& law, double xi);

/// j0(xi; v) = upper theta(xi) v for v >= 0, lower theta(xi) v otherwise.
double directional_j0(const NonsmoothLaw& law, double xi, double v);

struct SampleLattice {
  double half_width = 10.0;  ///< samples cover [-half_width, half_width]
  int count = 4001;
};

struct HypothesisReport {
  bool bounded = false;
  double sup_abs = 0.0;          ///< sup |theta| on the lattice
  bool growth = false;
  double growth_excess = 0.0;    ///< max(|theta| - C1 - C2 |xi|), <= 0 when passing
  bool sign_pattern = false;
  double sign_violation = 0.0;   ///< worst wrong-signed |theta| beyond +-phi
  double K_hat = 0.0;            ///< estimated one-sided Lipschitz defect
  std::optional<bool> K_ok;      ///< K_hat <= declared K, if K is declared
  bool all_pass() const noexcept {
    return bounded && growth && sign_pattern && K_ok.value_or(true);
  }
};

HypothesisReport verify_hypotheses(const NonsmoothLaw& law, const SampleLattice& lattice = {});

/// The six-piece zig-zag law with phi = 2, K = 1, C1 = 3, C2 = 0.
NonsmoothLaw zigzag_example();

/// Law lookup by name: "zigzag", "zero", "identity".
NonsmoothLaw builtin_law(const std::string& name);

/// JSON law file {name, breaks, pieces: [{type, a, b | value}], phi, K, C1, C2}.
NonsmoothLaw law_from_json(const std::string& text);
std::string law_to_json(const NonsmoothLaw& law);
NonsmoothLaw load_law(const std::filesystem::path& path);

}  // namespace cbfed
