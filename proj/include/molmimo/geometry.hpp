#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace molmimo {

/// Physical scenario of the symmetric 2x2 link plus the discrete-time framing.
///
/// Lengths are in micrometres, the diffusion coefficient in um^2/s and the
/// symbol duration in seconds. `d` is measured from a transmit point antenna
/// to the CENTER of its aligned receive sphere.
struct Geometry {
  double d = 20.0;
  double a = 11.0;
  double r = 5.0;
  double D = 100.0;
  double Ts = 0.6;
  int L = 3;

  /// Throws std::invalid_argument unless d > r > 0, a >= 0, D > 0, Ts > 0, L >= 0.
  void validate() const;

  /// Distance from a transmitter to the non-aligned receiver center.
  double cross_distance() const;
};

/// Fitted response-function coefficients. b1..b3 shape the aligned link,
/// b4..b6 the cross link. (1, 0.5, 0.5) reproduces the closed-form CDF.
struct FitParams {
  double b1 = 1.0, b2 = 0.5, b3 = 0.5;
  double b4 = 1.0, b5 = 0.5, b6 = 0.5;

  /// Scale factors positive, time exponents in (0, 1.5).
  void validate() const;

  static FitParams identity() { return {}; }
};

/// Channel coefficients h_{j,i}[l] for every (rx j, tx i) pair and lag
/// l = 0..L. Antenna indices are 1-based to match the file formats.
class TapSet {
 public:
  TapSet() = default;
  TapSet(int n_rx, int n_tx, int L);

  int n_rx() const { return n_rx_; }
  int n_tx() const { return n_tx_; }
  int L() const { return L_; }
  bool is_siso() const { return n_rx_ == 1 && n_tx_ == 1; }

  double& at(int rx, int tx, int lag);
  double at(int rx, int tx, int lag) const;

  /// Lags 0..L of one subchannel.
  std::vector<double> row(int rx, int tx) const;
  void set_row(int rx, int tx, const std::vector<double>& taps);

  /// Every tap in [0,1] and each subchannel row sums to at most 1.
  void validate() const;

 private:
  std::size_t index(int rx, int tx, int lag) const;

  int n_rx_ = 0;
  int n_tx_ = 0;
  int L_ = 0;
  std::vector<double> taps_;
};

}  // namespace molmimo
