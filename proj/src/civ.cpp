#include "scot/civ.hpp"

#include "scot/error.hpp"

namespace scot {

std::string_view to_string(CivContext ctx) {
  switch (ctx) {
    case CivContext::Adv: return "adv";
    case CivContext::Sub: return "sub";
    case CivContext::Pub: return "pub";
  }
  return "?";
}

Civ Civ::make(int width, CivContext context, int owner_cluster) {
  if (width < 1 || width > kMaxWidth) {
    throw Error(ErrorCode::IndexOutOfRange, "CIV width " + std::to_string(width));
  }
  if (owner_cluster < 0 || owner_cluster >= width) {
    throw Error(ErrorCode::IndexOutOfRange,
                "owner " + std::to_string(owner_cluster) + " outside width " + std::to_string(width));
  }
  Civ civ(width, context, owner_cluster);
  if (context == CivContext::Adv) civ.bits_ = std::uint64_t{1} << owner_cluster;
  return civ;
}

void Civ::check_index(int j) const {
  if (j < 0 || j >= width_) {
    throw Error(ErrorCode::IndexOutOfRange, "bit " + std::to_string(j) + " outside width " + std::to_string(width_));
  }
}

Civ Civ::with_bit(int j) const {
  check_index(j);
  if (context_ == CivContext::Pub && j == owner_) {
    throw Error(ErrorCode::OwnerBitViolation, "publication context cannot set owner bit " + std::to_string(j));
  }
  Civ out = *this;
  out.bits_ |= std::uint64_t{1} << j;
  return out;
}

Civ Civ::without_bit(int j) const {
  check_index(j);
  Civ out = *this;
  out.bits_ &= ~(std::uint64_t{1} << j);
  return out;
}

bool Civ::test(int j) const {
  check_index(j);
  return (bits_ >> j) & 1U;
}

std::vector<int> Civ::target_clusters() const {
  std::vector<int> out;
  for (int j = 0; j < width_; ++j) {
    if (j != owner_ && ((bits_ >> j) & 1U)) out.push_back(j);
  }
  return out;
}

std::string Civ::to_string() const {
  std::string out;
  out.reserve(width_);
  for (int j = width_ - 1; j >= 0; --j) out.push_back(((bits_ >> j) & 1U) ? '1' : '0');
  return out;
}

}  // namespace scot
