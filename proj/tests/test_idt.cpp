#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "saw/idt.hpp"

using namespace saw;

namespace {

IdtDesign sezawa_design(int pairs = 40, double aperture = 123e-6,
                        double k2 = 0.0427) {
  IdtDesign d;
  d.pairs = pairs;
  d.aperture = aperture;
  d.pitch = 0.8e-6;  // lambda = 1.6 um
  d.static_capacitance_per_pair_per_length = default_cs_alscn_sic();
  d.mode = {6480.0, k2};
  return d;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1.0);
  return v;
}

}  // namespace

TEST_CASE("conductance peaks at f0 with zero radiation susceptance") {
  const IdtDesign d = sezawa_design();
  const double f0 = d.center_frequency();
  CHECK_THAT(f0, Catch::Matchers::WithinRel(6480.0 / 1.6e-6, 1e-12));
  // Grid passing exactly through f0.
  auto grid = linspace(f0 * (1.0 - 4.0 / d.pairs), f0 * (1.0 + 4.0 / d.pairs),
                       2 * 1600 + 1);
  const AdmittanceSpectrum sp = synthesize_admittance(d, grid);
  const size_t i0 = grid.size() / 2;
  REQUIRE_THAT(grid[i0], Catch::Matchers::WithinRel(f0, 1e-12));
  const double cs_w = d.static_capacitance_per_pair_per_length * d.aperture;
  const double G0_expect = 8.0 * d.mode.k2 * f0 * cs_w * d.pairs * d.pairs;
  CHECK_THAT(sp.conductance[i0], Catch::Matchers::WithinRel(G0_expect, 1e-12));
  // G(f0) is the global maximum.
  for (double g : sp.conductance) CHECK(g <= sp.conductance[i0] * (1.0 + 1e-15));
  // At resonance the radiation susceptance vanishes, leaving only 2 pi f C_T.
  CHECK_THAT(sp.susceptance[i0],
             Catch::Matchers::WithinRel(2.0 * M_PI * f0 * sp.static_capacitance,
                                        1e-12));
}

TEST_CASE("conductance nulls at f0 (1 +/- 1/N)") {
  const IdtDesign d = sezawa_design();
  const double f0 = d.center_frequency();
  const double G0 = 8.0 * d.mode.k2 * f0 *
                    d.static_capacitance_per_pair_per_length * d.aperture *
                    d.pairs * d.pairs;
  const std::vector<double> grid = {
      f0 * (1.0 - 3.5 / d.pairs), f0 * (1.0 - 1.0 / d.pairs), f0,
      f0 * (1.0 + 1.0 / d.pairs), f0 * (1.0 + 3.5 / d.pairs)};
  const AdmittanceSpectrum sp = synthesize_admittance(d, grid);
  CHECK(sp.conductance[1] < 1e-12 * G0);
  CHECK(sp.conductance[3] < 1e-12 * G0);
}

TEST_CASE("static capacitance equals N Cs W and G is never negative") {
  const IdtDesign d = sezawa_design(27, 80e-6);
  const double f0 = d.center_frequency();
  auto grid = linspace(f0 * 0.7, f0 * 1.3, 4001);
  const AdmittanceSpectrum sp = synthesize_admittance(d, grid);
  CHECK_THAT(sp.static_capacitance,
             Catch::Matchers::WithinRel(
                 27.0 * d.static_capacitance_per_pair_per_length * 80e-6, 1e-12));
  for (double g : sp.conductance) CHECK(g >= 0.0);
}

TEST_CASE("admittance integral recovers the design k2 within 2%") {
  // Independent numerical-integration oracle:
  // k2 = (pi/4) (1/(omega0^2 C_T)) integral of G d(omega), truncated to
  // f0 +/- 10 f0/N (truncation alone costs about 1%).
  for (double k2 : {0.002, 0.0427, 0.0608}) {
    const IdtDesign d = sezawa_design(40, 123e-6, k2);
    const double f0 = d.center_frequency();
    auto grid = linspace(f0 * (1.0 - 10.0 / d.pairs),
                         f0 * (1.0 + 10.0 / d.pairs), 20001);
    const AdmittanceSpectrum sp = synthesize_admittance(d, grid);
    double integral = 0.0;  // trapezoid in omega
    for (size_t i = 0; i + 1 < grid.size(); ++i)
      integral += 0.5 * (sp.conductance[i] + sp.conductance[i + 1]) * 2.0 *
                  M_PI * (grid[i + 1] - grid[i]);
    const double w0 = 2.0 * M_PI * f0;
    const double k2_back =
        (M_PI / 4.0) * integral / (w0 * w0 * sp.static_capacitance);
    INFO("k2 = " << k2);
    CHECK_THAT(k2_back, Catch::Matchers::WithinRel(k2, 0.02));
  }
}

TEST_CASE("conductance integral is stable under grid refinement") {
  const IdtDesign d = sezawa_design();
  const double f0 = d.center_frequency();
  auto integrate = [&](int pts_per_lobe) {
    // Main lobe width is 2 f0/N; sidebands out to +/- 5 f0/N.
    const int n = pts_per_lobe * 10 + 1;
    auto grid = linspace(f0 * (1.0 - 5.0 / d.pairs),
                         f0 * (1.0 + 5.0 / d.pairs), n);
    const AdmittanceSpectrum sp = synthesize_admittance(d, grid);
    double s = 0.0;
    for (size_t i = 0; i + 1 < grid.size(); ++i)
      s += 0.5 * (sp.conductance[i] + sp.conductance[i + 1]) *
           (grid[i + 1] - grid[i]);
    return s;
  };
  const double coarse = integrate(20);
  const double fine = integrate(160);
  CHECK_THAT(coarse, Catch::Matchers::WithinRel(fine, 5e-3));
}

TEST_CASE("synthesize_admittance validates its inputs") {
  const IdtDesign d = sezawa_design();
  const double f0 = d.center_frequency();
  // Too-narrow grid names the required span.
  try {
    synthesize_admittance(d, linspace(f0 * 0.99, f0 * 1.01, 100));
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("3 f0/N") != std::string::npos);
  }
  CHECK_THROWS_AS(synthesize_admittance(d, {f0, f0 * 0.9, f0 * 1.2}),
                  DomainError);
  IdtDesign bad = d;
  bad.pairs = 0;
  CHECK_THROWS_AS(synthesize_admittance(bad, linspace(f0 * 0.7, f0 * 1.3, 10)),
                  DomainError);
  bad = d;
  bad.mode.k2 = 0.0;
  CHECK_THROWS_AS(synthesize_admittance(bad, linspace(f0 * 0.7, f0 * 1.3, 10)),
                  DomainError);
}

TEST_CASE("S11 conversions: matched, short, and algebra cases") {
  CHECK(std::abs(impedance_s11(Complex(50.0, 0.0), 50.0)) == 0.0);
  CHECK_THAT(impedance_s11(Complex(0.0, 0.0), 50.0).real(),
             Catch::Matchers::WithinAbs(-1.0, 1e-15));
  CHECK_THAT(impedance_s11(Complex(150.0, 0.0), 50.0).real(),
             Catch::Matchers::WithinAbs(0.5, 1e-15));
}

TEST_CASE("S11 and impedance conversions compose to the identity") {
  for (Complex z : {Complex(12.0, -40.0), Complex(80.0, 15.0),
                    Complex(0.3, 0.01), Complex(420.0, -310.0)}) {
    const Complex back = s11_to_impedance(impedance_s11(z, 50.0), 50.0);
    CHECK_THAT(std::abs(back - z), Catch::Matchers::WithinAbs(0.0, 1e-9));
  }
}

TEST_CASE("S11 inversion rejects non-passive and singular points") {
  CHECK_THROWS_AS(s11_to_impedance(Complex(1.0, 0.0), 50.0), DomainError);
  CHECK_THROWS_AS(s11_to_impedance(Complex(0.0, 1.2), 50.0), DomainError);
  CHECK_THROWS_AS(impedance_s11(Complex(50.0, 0.0), -1.0), DomainError);
}

TEST_CASE("match_design finds a near-50-ohm Sezawa transducer") {
  MatchBounds b;
  b.pairs_min = 10;
  b.pairs_max = 60;
  b.aperture_min = 50e-6;
  b.aperture_max = 200e-6;
  b.aperture_steps = 151;
  const MatchResult r =
      match_design(50.0, {6480.0, 0.06}, default_cs_alscn_sic(), 1.6e-6, b);
  CHECK(r.status == "ok");
  const Complex Z =
      1.0 / admittance_at(r.design, r.design.center_frequency());
  CHECK(std::abs(Z) > 50.0 * 0.75);
  CHECK(std::abs(Z) < 50.0 * 1.25);
  CHECK(r.design.pairs >= 10);
  CHECK(r.design.pairs <= 60);
}

TEST_CASE("doubling Cs halves the matched aperture at fixed N") {
  // Y(f0) depends on Cs and W only through the product Cs*W, so the optimal
  // aperture scales inversely with Cs up to grid resolution.
  MatchBounds b;
  b.pairs_min = 30;
  b.pairs_max = 30;
  b.aperture_min = 20e-6;
  b.aperture_max = 240e-6;
  b.aperture_steps = 441;  // 0.5 um steps
  const double cs = default_cs_alscn_sic();
  const MatchResult r1 = match_design(50.0, {6480.0, 0.06}, cs, 1.6e-6, b);
  const MatchResult r2 = match_design(50.0, {6480.0, 0.06}, 2.0 * cs, 1.6e-6, b);
  const double step = (240e-6 - 20e-6) / 440;
  CHECK(std::abs(r1.design.aperture - 2.0 * r2.design.aperture) <= 2.0 * step);
}

TEST_CASE("single-design bounds return that design") {
  MatchBounds b;
  b.pairs_min = 40;
  b.pairs_max = 40;
  b.aperture_min = 123e-6;
  b.aperture_max = 123e-6;
  const MatchResult r =
      match_design(50.0, {6480.0, 0.0427}, default_cs_alscn_sic(), 1.6e-6, b);
  CHECK(r.design.pairs == 40);
  CHECK(r.design.aperture == 123e-6);
  const Complex Z = 1.0 / admittance_at(r.design, r.design.center_frequency());
  CHECK_THAT(r.residual, Catch::Matchers::WithinRel(std::abs(Z - 50.0), 1e-12));
}

TEST_CASE("hopeless bounds surface a warning status") {
  MatchBounds b;
  b.pairs_min = 1;
  b.pairs_max = 1;
  b.aperture_min = 1e-6;
  b.aperture_max = 2e-6;
  b.aperture_steps = 3;
  const MatchResult r =
      match_design(50.0, {6480.0, 0.001}, default_cs_alscn_sic(), 1.6e-6, b);
  CHECK(r.status.find("warning") != std::string::npos);
}

TEST_CASE("matched design shows a reflection dip of at least 10 dB") {
  MatchBounds b;
  b.pairs_min = 10;
  b.pairs_max = 60;
  b.aperture_min = 50e-6;
  b.aperture_max = 200e-6;
  b.aperture_steps = 151;
  const MatchResult r =
      match_design(50.0, {6480.0, 0.06}, default_cs_alscn_sic(), 1.6e-6, b);
  const double f0 = r.design.center_frequency();
  const double s11_on = std::abs(impedance_s11(1.0 / admittance_at(r.design, f0), 50.0));
  const double s11_off = std::abs(impedance_s11(
      1.0 / admittance_at(r.design, f0 * (1.0 + 3.0 / r.design.pairs)), 50.0));
  CHECK(20.0 * std::log10(s11_off / s11_on) >= 10.0);
}

TEST_CASE("match_design validates bounds") {
  CHECK_THROWS_AS(match_design(50.0, {6480.0, 0.06}, 1e-10, 1.6e-6,
                               MatchBounds{5, 4, 1e-6, 2e-6, 3}),
                  DomainError);
  CHECK_THROWS_AS(match_design(50.0, {6480.0, 0.06}, 1e-10, 1.6e-6,
                               MatchBounds{1, 2, -1e-6, 2e-6, 3}),
                  DomainError);
  CHECK_THROWS_AS(match_design(-50.0, {6480.0, 0.06}, 1e-10, 1.6e-6,
                               MatchBounds{1, 2, 1e-6, 2e-6, 3}),
                  DomainError);
}
