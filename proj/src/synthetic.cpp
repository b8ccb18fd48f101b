#include "hroa/synthetic.hpp"

#include <random>

namespace hroa {
namespace {

u128 random_word(std::mt19937_64 &rng, int w) {
  return ((u128{rng()} << 64) | rng()) & low_mask(w);
}

} // namespace

Workload scattered_workload(std::size_t prefixes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Vrp> vrps;
  vrps.reserve(prefixes + 16);
  for (std::uint32_t asn = 64512; vrps.size() < prefixes; ++asn) {
    // v4: /24s under /20s, v6: /48s under /44s.
    const int clusters = 1 + static_cast<int>(rng() % 3);
    for (int k = 0; k < clusters && vrps.size() < prefixes; ++k) {
      const u128 base = random_word(rng, 32) & ~low_mask(12);
      for (unsigned i = 0; i < 16; ++i)
        if (rng() % 2)
          vrps.push_back(Vrp{asn, AddressBlock(Prefix(Family::v4, base | (u128{i} << 8), 24))});
    }
    if (asn % 5 == 0) {
      const u128 base = (u128{0x20010DB8} << 96) | (random_word(rng, 96) & ~low_mask(84));
      for (unsigned i = 0; i < 16; ++i)
        if (rng() % 2)
          vrps.push_back(Vrp{asn, AddressBlock(Prefix(Family::v6, base | (u128{i} << 80), 48))});
    }
  }
  vrps.resize(prefixes);
  return Workload::from_vrps(vrps, "synthetic:scattered");
}

Workload mixed_workload(std::size_t rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Vrp> vrps;
  vrps.reserve(rows + 64);
  for (std::uint32_t asn = 64512; vrps.size() < rows; ++asn) {
    const Family f = asn % 4 == 0 ? Family::v6 : Family::v4;
    const int w = width(f);
    const int root_len = f == Family::v4 ? 8 + static_cast<int>(rng() % 12)
                                         : 20 + static_cast<int>(rng() % 20);
    const Prefix root(f, random_word(rng, w), root_len, HostBits::lenient);
    const std::size_t n = 2 + rng() % 24;
    for (std::size_t i = 0; i < n; ++i) {
      const int len = root_len + static_cast<int>(rng() % 7);
      const u128 bits = root.bits() | (random_word(rng, w) & low_mask(w - root_len));
      const Prefix p(f, bits, len, HostBits::lenient);
      const int dl = rng() % 8 == 0 ? static_cast<int>(rng() % 5) : 0;
      vrps.push_back(Vrp{asn, AddressBlock(p, std::min(w, len + dl))});
    }
  }
  vrps.resize(rows);
  return Workload::from_vrps(vrps, "synthetic:mixed");
}

} // namespace hroa
