#pragma once
// Dense pmfs, entropies and mutual information, plus the joint input/output
// law of a two-sender finite-field multiple-access stage. These are the exact
// reference quantities the Monte Carlo side is checked against.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "threeway/errors.hpp"
#include "threeway/galois.hpp"

namespace threeway {

class Pmf {
 public:
  explicit Pmf(std::vector<double> p) : p_(std::move(p)) {
    require(!p_.empty(), Errc::empty_input, "empty pmf");
    double s = 0.0;
    for (double v : p_) {
      require(v >= 0.0, Errc::invalid_pmf, "negative pmf entry");
      s += v;
    }
    require(std::abs(s - 1.0) <= 1e-12, Errc::invalid_pmf,
            "pmf sums to " + std::to_string(s) + ", expected 1");
  }

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  const std::vector<double>& values() const { return p_; }

 private:
  std::vector<double> p_;
};

// Entropy in bits, with the 0 log 0 = 0 convention.
inline double entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log2(v);
  return h;
}

inline double entropy(const Pmf& p) { return entropy(p.values()); }

// Dense joint pmf over a small number of finite axes, row-major with the last
// axis fastest. Axis labels are carried along for self-describing results.
class JointPmf {
 public:
  JointPmf(std::vector<std::size_t> dims, std::vector<std::string> labels, std::vector<double> data)
      : dims_(std::move(dims)), labels_(std::move(labels)), data_(std::move(data)) {
    require(!dims_.empty(), Errc::empty_input, "joint pmf needs at least one axis");
    require(labels_.size() == dims_.size(), Errc::length_mismatch, "one label per axis required");
    std::size_t cells = 1;
    for (std::size_t d : dims_) {
      require(d >= 1, Errc::out_of_range, "axis of size zero");
      cells *= d;
    }
    require(data_.size() == cells, Errc::length_mismatch, "data size does not match axis sizes");
    double s = 0.0;
    for (double v : data_) {
      require(v >= 0.0, Errc::invalid_pmf, "negative joint pmf entry");
      s += v;
    }
    require(std::abs(s - 1.0) <= 1e-10, Errc::invalid_pmf,
            "joint pmf sums to " + std::to_string(s) + ", expected 1");
    strides_.assign(dims_.size(), 1);
    for (std::size_t a = dims_.size(); a-- > 1;) strides_[a - 1] = strides_[a] * dims_[a];
  }

  std::size_t rank() const { return dims_.size(); }
  const std::vector<std::size_t>& dims() const { return dims_; }
  const std::string& label(std::size_t axis) const { return labels_.at(axis); }
  const std::vector<double>& data() const { return data_; }

  double at(const std::vector<std::size_t>& idx) const {
    require(idx.size() == dims_.size(), Errc::length_mismatch, "index rank mismatch");
    std::size_t off = 0;
    for (std::size_t a = 0; a < idx.size(); ++a) {
      require(idx[a] < dims_[a], Errc::out_of_range, "index out of range");
      off += idx[a] * strides_[a];
    }
    return data_[off];
  }

  // Marginal probability vector over the given axes (order as given).
  std::vector<double> marginal(const std::vector<std::size_t>& axes) const {
    check_axes(axes);
    std::size_t cells = 1;
    for (std::size_t a : axes) cells *= dims_[a];
    std::vector<double> out(cells, 0.0);
    for (std::size_t lin = 0; lin < data_.size(); ++lin) {
      std::size_t off = 0;
      for (std::size_t a : axes) off = off * dims_[a] + (lin / strides_[a]) % dims_[a];
      out[off] += data_[lin];
    }
    return out;
  }

  // Entropy of the marginal over a set of axes; empty set has entropy 0.
  double entropy_of(const std::vector<std::size_t>& axes) const {
    if (axes.empty()) return 0.0;
    return entropy(marginal(axes));
  }

  // I(A; B | C) in bits via H(AC) + H(BC) - H(ABC) - H(C).
  double mutual_information(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b,
                            const std::vector<std::size_t>& cond = {}) const {
    check_axes(a);
    check_axes(b);
    check_axes(cond);
    require(!a.empty() && !b.empty(), Errc::empty_input, "mutual information needs non-empty axis groups");
    auto overlap = [](const std::vector<std::size_t>& u, const std::vector<std::size_t>& v) {
      for (std::size_t x : u)
        for (std::size_t y : v)
          if (x == y) return true;
      return false;
    };
    require(!overlap(a, b) && !overlap(a, cond) && !overlap(b, cond), Errc::axis_overlap,
            "axis groups must be disjoint");
    auto join = [](std::vector<std::size_t> u, const std::vector<std::size_t>& v) {
      u.insert(u.end(), v.begin(), v.end());
      return u;
    };
    return entropy_of(join(a, cond)) + entropy_of(join(b, cond)) - entropy_of(join(join(a, b), cond)) -
           entropy_of(cond);
  }

 private:
  void check_axes(const std::vector<std::size_t>& axes) const {
    for (std::size_t i = 0; i < axes.size(); ++i) {
      require(axes[i] < dims_.size(), Errc::out_of_range, "axis index out of range");
      for (std::size_t j = i + 1; j < axes.size(); ++j)
        require(axes[i] != axes[j], Errc::axis_overlap, "repeated axis in group");
    }
  }

  std::vector<std::size_t> dims_;
  std::vector<std::string> labels_;
  std::vector<double> data_;
  std::vector<std::size_t> strides_;
};

// Joint law of (X_i, X_j, Y) for one receiver of the finite-field channel
// under independent uniform inputs: Y = g_i X_i + g_j X_j + Z over GF(q).
inline JointPmf ff_mac_joint(const Field& f, felem g_i, felem g_j, const Pmf& noise) {
  require(g_i != 0 && g_j != 0, Errc::zero_gain, "channel gains must be nonzero");
  f.check(g_i);
  f.check(g_j);
  require(noise.size() == f.q(), Errc::alphabet_mismatch, "noise pmf alphabet must match field order");
  const std::size_t q = f.q();
  std::vector<double> data(q * q * q);
  const double w = 1.0 / static_cast<double>(q * q);
  std::size_t off = 0;
  for (std::size_t xi = 0; xi < q; ++xi) {
    for (std::size_t xj = 0; xj < q; ++xj) {
      const felem s = f.add(f.mul(g_i, static_cast<felem>(xi)), f.mul(g_j, static_cast<felem>(xj)));
      for (std::size_t y = 0; y < q; ++y) data[off++] = w * noise[f.sub(static_cast<felem>(y), s)];
    }
  }
  return JointPmf({q, q, q}, {"Xi", "Xj", "Y"}, std::move(data));
}

}  // namespace threeway
