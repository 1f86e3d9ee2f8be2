#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace scot {

enum class CivContext { Adv, Sub, Pub };

std::string_view to_string(CivContext ctx);

/// Cluster Index Vector: one bit per cluster, indexed right to left from 0.
///
/// Adv context marks the publisher's host cluster plus its target secondary
/// clusters. Sub context is the copy kept by a secondary broker (sender bit and
/// local bit). Pub context rides on a dynamically routed publication and never
/// has the owner bit set.
class Civ {
 public:
  static constexpr int kMaxWidth = 64;

  /// Adv context starts with the owner bit set; Sub and Pub start cleared.
  static Civ make(int width, CivContext context, int owner_cluster);

  Civ with_bit(int j) const;
  Civ without_bit(int j) const;

  bool test(int j) const;
  bool none() const { return bits_ == 0; }
  int width() const { return width_; }
  CivContext context() const { return context_; }
  int owner_cluster() const { return owner_; }
  std::uint64_t bits() const { return bits_; }

  /// Set bits other than the owner's, ascending.
  std::vector<int> target_clusters() const;

  /// Bit string with the highest index leftmost, e.g. "0101".
  std::string to_string() const;

  bool operator==(const Civ&) const = default;

 private:
  Civ(int width, CivContext context, int owner) : width_(width), context_(context), owner_(owner) {}
  void check_index(int j) const;

  std::uint64_t bits_ = 0;
  int width_ = 0;
  CivContext context_ = CivContext::Adv;
  int owner_ = 0;
};

}  // namespace scot
