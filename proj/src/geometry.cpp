#include "molmimo/geometry.hpp"

#include <cmath>
#include <string>

namespace molmimo {

void Geometry::validate() const {
  if (!(r > 0.0)) throw std::invalid_argument("geometry: r must be positive");
  if (!(d > r)) throw std::invalid_argument("geometry: d must exceed r");
  if (!(a >= 0.0)) throw std::invalid_argument("geometry: a must be non-negative");
  if (!(D > 0.0)) throw std::invalid_argument("geometry: D must be positive");
  if (!(Ts > 0.0)) throw std::invalid_argument("geometry: Ts must be positive");
  if (L < 0) throw std::invalid_argument("geometry: L must be non-negative");
}

double Geometry::cross_distance() const { return std::hypot(d, a); }

void FitParams::validate() const {
  if (!(b1 > 0.0) || !(b4 > 0.0))
    throw std::invalid_argument("fit params: scale factors b1, b4 must be positive");
  if (!(b3 > 0.0 && b3 < 1.5) || !(b6 > 0.0 && b6 < 1.5))
    throw std::invalid_argument("fit params: time exponents b3, b6 must lie in (0, 1.5)");
  if (!std::isfinite(b2) || !std::isfinite(b5))
    throw std::invalid_argument("fit params: diffusion exponents must be finite");
}

TapSet::TapSet(int n_rx, int n_tx, int L) : n_rx_(n_rx), n_tx_(n_tx), L_(L) {
  if (n_rx < 1 || n_rx > 2 || n_tx < 1 || n_tx > 2)
    throw std::invalid_argument("tap set: at most 2x2 antennas supported");
  if (L < 0) throw std::invalid_argument("tap set: L must be non-negative");
  taps_.assign(static_cast<std::size_t>(n_rx * n_tx * (L + 1)), 0.0);
}

std::size_t TapSet::index(int rx, int tx, int lag) const {
  if (rx < 1 || rx > n_rx_ || tx < 1 || tx > n_tx_ || lag < 0 || lag > L_)
    throw std::out_of_range("tap set: index (" + std::to_string(rx) + "," + std::to_string(tx) +
                            "," + std::to_string(lag) + ") out of range");
  return static_cast<std::size_t>(((rx - 1) * n_tx_ + (tx - 1)) * (L_ + 1) + lag);
}

double& TapSet::at(int rx, int tx, int lag) { return taps_[index(rx, tx, lag)]; }
double TapSet::at(int rx, int tx, int lag) const { return taps_[index(rx, tx, lag)]; }

std::vector<double> TapSet::row(int rx, int tx) const {
  std::vector<double> out(static_cast<std::size_t>(L_ + 1));
  for (int l = 0; l <= L_; ++l) out[static_cast<std::size_t>(l)] = at(rx, tx, l);
  return out;
}

void TapSet::set_row(int rx, int tx, const std::vector<double>& taps) {
  if (taps.size() != static_cast<std::size_t>(L_ + 1))
    throw std::invalid_argument("tap set: row length must be L+1");
  for (int l = 0; l <= L_; ++l) at(rx, tx, l) = taps[static_cast<std::size_t>(l)];
}

void TapSet::validate() const {
  for (int j = 1; j <= n_rx_; ++j) {
    for (int i = 1; i <= n_tx_; ++i) {
      double sum = 0.0;
      for (int l = 0; l <= L_; ++l) {
        const double h = at(j, i, l);
        if (!(h >= 0.0 && h <= 1.0))
          throw std::invalid_argument("tap set: probability outside [0,1]");
        sum += h;
      }
      if (sum > 1.0 + 1e-12) throw std::invalid_argument("tap set: row sum exceeds 1");
    }
  }
}

}  // namespace molmimo
