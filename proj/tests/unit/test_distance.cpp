#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "unicon/constellation.hpp"
#include "unicon/distance.hpp"

using namespace unicon;
using namespace unicon::testfx;

namespace {

bool angles_match(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > 1e-12) return false;
  }
  return true;
}

bool contains_angles(const std::vector<CriticalDifference>& set, const std::vector<double>& want) {
  return std::any_of(set.begin(), set.end(),
                     [&](const CriticalDifference& cd) { return angles_match(cd.angles, want); });
}

}  // namespace

TEST_CASE("amplitude_pair_distance pinned values") {
  const std::vector<double> ua{2.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0};
  const std::vector<double> ub{0.5, 0.5, std::sqrt(2.0) / 2.0};
  CHECK(amplitude_pair_distance(ua, ua) == 0.0);
  const double ip = 2.0 / 3.0 + std::sqrt(2.0) / 6.0;
  CHECK(amplitude_pair_distance(ua, ub) ==
        doctest::Approx(std::sqrt(1.0 - ip * ip)).epsilon(1e-14));
  CHECK(amplitude_pair_distance(ua, ub) == doctest::Approx(0.43096).epsilon(1e-4));
  CHECK(amplitude_pair_distance({1, 0, 0}, {0, 1, 0}) == 1.0);
  CHECK_THROWS_AS(amplitude_pair_distance({1, 0}, {1, 0, 0}), std::invalid_argument);
}

TEST_CASE("amplitude pairs align phases: min over PSK pairs equals the amplitude distance") {
  rng::Stream rs(21, 0, 0);
  const BitAllocation alloc = make_alloc(3, 1, {0, 1, 2});
  for (int trial = 0; trial < 10; ++trial) {
    const auto ua = random_unit_amplitude(rs, 3);
    const auto ub = random_unit_amplitude(rs, 3);
    Codebook cba, cbb;
    cba.alloc = cbb.alloc = make_alloc(3, 0, {0, 1, 2});
    cba.amplitudes.rows = {ua};
    cbb.amplitudes.rows = {ub};
    double best = 2.0;
    std::vector<int> ia(3, 0), ib(3, 0);
    for (int p1 = 0; p1 < 2; ++p1) {
      for (int p2 = 0; p2 < 4; ++p2) {
        for (int q1 = 0; q1 < 2; ++q1) {
          for (int q2 = 0; q2 < 4; ++q2) {
            ia = {0, p1, p2};
            ib = {0, q1, q2};
            best = std::min(best, chordal_distance(signal_from_indices(cba, 0, ia),
                                                   signal_from_indices(cbb, 0, ib)));
          }
        }
      }
    }
    CHECK(best == doctest::Approx(amplitude_pair_distance(ua, ub)).epsilon(1e-10));
  }
}

TEST_CASE("critical_phase_differences enumerates the reduced subsets") {
  const auto set1 = critical_phase_differences(make_alloc(3, 0, {0, 2, 3}));
  CHECK(set1.size() == 3);  // the level-3 element duplicates the symbol-2 one
  CHECK(contains_angles(set1, {0.0, M_PI / 2.0, 0.0}));
  CHECK(contains_angles(set1, {0.0, 0.0, M_PI / 4.0}));
  CHECK(contains_angles(set1, {0.0, M_PI / 2.0, M_PI / 2.0}));

  const auto set2 = critical_phase_differences(make_alloc(2, 0, {0, 1}));
  CHECK(set2.size() == 1);
  CHECK(contains_angles(set2, {0.0, M_PI}));

  const auto set3 = critical_phase_differences(make_alloc(3, 0, {0, 2, 2}));
  CHECK(set3.size() == 3);
  CHECK(contains_angles(set3, {0.0, M_PI / 2.0, 0.0}));
  CHECK(contains_angles(set3, {0.0, 0.0, M_PI / 2.0}));
  CHECK(contains_angles(set3, {0.0, M_PI / 2.0, M_PI / 2.0}));

  CHECK_THROWS_AS(critical_phase_differences(make_alloc(2, 1, {0, 0})), EmptyPhaseError);
}

TEST_CASE("critical difference angles are valid PSK members in [0, 2pi)") {
  for (const auto& lphi :
       {std::vector<int>{0, 1, 2, 3}, std::vector<int>{0, 0, 2, 2}, std::vector<int>{0, 3}}) {
    const BitAllocation alloc = make_alloc(static_cast<int>(lphi.size()), 0, lphi);
    for (const auto& cd : critical_phase_differences(alloc)) {
      REQUIRE(cd.angles.size() == lphi.size());
      for (std::size_t i = 0; i < cd.angles.size(); ++i) {
        CHECK(cd.angles[i] >= 0.0);
        CHECK(cd.angles[i] < 2.0 * M_PI);
        // the angle must be a grid point of that symbol's PSK set
        const double step = 2.0 * M_PI / static_cast<double>(1u << lphi[i]);
        const double ratio = cd.angles[i] / step;
        CHECK(std::abs(ratio - std::round(ratio)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("critical differences bound the minimum: size <= |K| + |L|") {
  rng::Stream rs(23, 0, 0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> lphi{0};
    for (int k = 1; k < 4; ++k) {
      lphi.push_back(std::min<int>(3, lphi.back() + static_cast<int>(rs.next() % 3)));
    }
    const BitAllocation alloc = make_alloc(4, 0, lphi);
    if (alloc.modulated_symbols().empty()) continue;
    const auto set = critical_phase_differences(alloc);
    CHECK(set.size() <=
          alloc.modulated_symbols().size() + alloc.modulation_levels().size());
  }
}

TEST_CASE("phase_mcd_closed_form pinned values") {
  CHECK(phase_mcd_closed_form({2.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0}, make_alloc(3, 0, {0, 2, 2})) ==
        doctest::Approx(4.0 / 9.0).epsilon(1e-14));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(phase_mcd_closed_form({r, r}, make_alloc(2, 0, {0, 1})) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(phase_mcd_closed_form({1.0, 0.0, 0.0}, make_alloc(3, 0, {0, 1, 3})) == 0.0);
  // second fixture row: the symbol-1 and level-2 terms tie at sqrt(3/8)
  CHECK(phase_mcd_closed_form({0.5, 0.5, std::sqrt(2.0) / 2.0}, make_alloc(3, 0, {0, 2, 2})) ==
        doctest::Approx(std::sqrt(0.375)).epsilon(1e-14));
  CHECK_THROWS_AS(phase_mcd_closed_form({1.0, 0.0}, make_alloc(2, 0, {0, 0})), EmptyPhaseError);
}

TEST_CASE("phase_mcd_bruteforce pinned values and guard") {
  rng::Stream rs(31, 0, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto u = random_unit_amplitude(rs, 2);
    const double want = std::sqrt(1.0 - std::pow(u[0] * u[0] - u[1] * u[1], 2.0));
    CHECK(phase_mcd_bruteforce(u, make_alloc(2, 0, {0, 1})) ==
          doctest::Approx(want).epsilon(1e-12));
  }
  CHECK(phase_mcd_bruteforce({1.0, 0.0}, make_alloc(2, 0, {0, 3})) == 0.0);
  CHECK_THROWS_AS(phase_mcd_bruteforce({0.5, 0.5, 0.5, 0.5}, make_alloc(4, 0, {0, 6, 6, 6})),
                  CapacityError);
}

TEST_CASE("closed form equals brute force across random amplitudes") {
  rng::Stream rs(33, 0, 0);
  const std::vector<std::vector<int>> allocs = {
      {0, 1},    {0, 3},        {0, 1, 1},  {0, 1, 2},    {0, 2, 2},   {0, 2, 3},
      {0, 3, 3}, {0, 1, 2, 3},  {0, 2, 2, 2}, {0, 1, 1, 2}, {0, 0, 2, 3}, {0, 3, 3, 3}};
  for (const auto& lphi : allocs) {
    const BitAllocation alloc = make_alloc(static_cast<int>(lphi.size()), 0, lphi);
    for (int trial = 0; trial < 40; ++trial) {
      const auto u = random_unit_amplitude(rs, alloc.block_len);
      const double closed = phase_mcd_closed_form(u, alloc);
      const double brute = phase_mcd_bruteforce(u, alloc);
      CHECK(std::abs(closed - brute) <= 1e-10);
    }
  }
}

TEST_CASE("closed form also equals the minimum over the critical subset") {
  rng::Stream rs(35, 0, 0);
  const BitAllocation alloc = make_alloc(4, 0, {0, 1, 2, 3});
  for (int trial = 0; trial < 20; ++trial) {
    const auto u = random_unit_amplitude(rs, 4);
    double best = 2.0;
    for (const auto& cd : critical_phase_differences(alloc)) {
      cplx acc{0.0, 0.0};
      for (int i = 0; i < 4; ++i) {
        acc += u[i] * u[i] * cplx{std::cos(cd.angles[i]), std::sin(cd.angles[i])};
      }
      best = std::min(best, std::sqrt(std::max(0.0, 1.0 - std::norm(acc))));
    }
    CHECK(best == doctest::Approx(phase_mcd_closed_form(u, alloc)).epsilon(1e-12));
  }
}

TEST_CASE("phase_mcd_closed_form is invariant to joint symbol permutations") {
  rng::Stream rs(37, 0, 0);
  const std::vector<int> lphi{0, 1, 2, 2};
  const BitAllocation alloc = make_alloc(4, 0, lphi);
  for (int trial = 0; trial < 10; ++trial) {
    const auto u = random_unit_amplitude(rs, 4);
    const double base = phase_mcd_closed_form(u, alloc);
    std::vector<int> perm{2, 0, 3, 1};
    std::vector<double> pu(4);
    std::vector<int> pl(4);
    for (int i = 0; i < 4; ++i) {
      pu[i] = u[perm[i]];
      pl[i] = lphi[perm[i]];
    }
    CHECK(phase_mcd_closed_form(pu, make_alloc(4, 0, pl)) ==
          doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("mcd_decomposed pinned values") {
  const Codebook cb = two_row_codebook();
  const McdBreakdown bd = mcd_decomposed_breakdown(cb);
  CHECK(bd.mcd == doctest::Approx(0.43096).epsilon(1e-4));
  CHECK(bd.from_amplitude_pair);

  Codebook single = cb;
  single.alloc.amp_bits = 0;
  single.amplitudes.rows = {cb.amplitudes.rows[0]};
  CHECK(mcd_decomposed(single) ==
        doctest::Approx(phase_mcd_closed_form(single.amplitudes.rows[0], single.alloc))
            .epsilon(1e-14));

  Codebook dup = cb;
  dup.amplitudes.rows[1] = dup.amplitudes.rows[0];
  CHECK(mcd_decomposed(dup) == 0.0);
}

TEST_CASE("mcd_decomposed equals brute force on random codebooks") {
  const std::vector<BitAllocation> allocs = {
      make_alloc(2, 1, {0, 2}), make_alloc(3, 2, {0, 1, 2}), make_alloc(4, 1, {0, 1, 1, 2}),
      make_alloc(3, 0, {0, 3, 3}), make_alloc(5, 2, {0, 0, 1, 1, 2})};
  std::uint64_t seed = 100;
  for (const auto& alloc : allocs) {
    for (int rep = 0; rep < 4; ++rep) {
      const Codebook cb = random_codebook(seed++, alloc);
      CHECK(std::abs(mcd_decomposed(cb) - mcd_bruteforce(cb)) <= 1e-10);
    }
  }
}

TEST_CASE("mcd_upper_bound pinned values") {
  // K=3: the amplitude factor is sqrt(2) * 2^(-l_u/2)
  CHECK(mcd_upper_bound(make_alloc(3, 1, {0, 2, 2})) ==
        doctest::Approx(std::sin(M_PI / 4.0)).epsilon(1e-14));
  CHECK(mcd_upper_bound(make_alloc(3, 0, {0, 2, 2})) ==
        doctest::Approx(std::sin(M_PI / 4.0)).epsilon(1e-14));
  CHECK(mcd_upper_bound(make_alloc(3, 0, {0, 0, 1})) == doctest::Approx(1.0).epsilon(1e-14));
  // pure amplitude at one bit: the packing factor alone
  CHECK(mcd_upper_bound(make_alloc(3, 1, {0, 0, 0})) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mcd_upper_bound(make_alloc(4, 0, {0, 0, 0, 2})) ==
        doctest::Approx(std::sin(M_PI / 4.0)).epsilon(1e-14));
}
