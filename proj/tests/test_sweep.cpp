#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "support.hpp"

using namespace optomech;

namespace {

std::string csv_of(const SweepTable& t) { return render(t, OutputFormat::csv); }

SweepSpec small_grid() {
  SweepSpec s = preset("fig3d", {11, 7});
  return s;
}

}  // namespace

TEST(Axis, ParsesAndSpaces) {
  const Axis a = parse_axis("delta:0:1.5:4");
  EXPECT_EQ(a.parameter, SweepParameter::delta);
  EXPECT_EQ(a.count, 4u);
  EXPECT_EQ(a.values(), (std::vector<double>{0.0, 0.5, 1.0, 1.5}));
  EXPECT_EQ(parse_axis("theta:1:2:1").values(), std::vector<double>{1.0});
  for (const char* bad : {"delta:0:1", "omega:0:1:3", "delta:0:x:3", "delta:0:1:0", "delta:0:1:2.5"}) {
    EXPECT_THROW(parse_axis(bad), Error) << bad;
  }
}

TEST(RunPoint, EntangledAtReferencePoint) {
  const auto r = run_point(entanglement_base());
  ASSERT_TRUE(r.error.empty()) << r.error;
  ASSERT_TRUE(r.stable.value());
  EXPECT_GT(*r.e_n, 0.0);
  EXPECT_LT(*r.nu_minus, 0.5);
  EXPECT_GE(*r.nu_tilde_min, 0.5 - 1e-9);
  EXPECT_LE(*r.lyapunov_residual, lyapunov_residual_limit);
}

TEST(RunPoint, UndrivenCavityLeavesThermalMechanics) {
  SystemConfig c = entanglement_base();
  c.power_mw = 0.0;
  const auto r = run_point(c);
  ASSERT_TRUE(r.error.empty()) << r.error;
  const double n_m = thermal_occupancy(c.temperature_mk * 1e-3, angular_from_hz(c.omega_m_hz));
  EXPECT_EQ(*r.e_n, 0.0);
  EXPECT_NEAR(*r.s_q, -10.0 * std::log10(2 * n_m + 1), 1e-9);
  EXPECT_EQ(*r.photon_number, 0.0);
}

TEST(RunPoint, SubVacuumSteadyStateIsRejected) {
  // Strong stiffening with feedback: Ω_m ≈ 64 ω_m pushes σ_q σ_p below 1/4.
  SystemConfig c = squeezing_base();
  c.r_b = 0.8;
  c.theta_rad = 0.0;
  c.g2_over_g1 = -1e-3;
  c.delta_over_omega_m = 0.1;
  const auto r = run_point(c);
  ASSERT_TRUE(r.stable.value());
  EXPECT_EQ(r.error_kind, ErrorKind::invalid_covariance);
  EXPECT_LT(*r.nu_tilde_min, 0.5);
  EXPECT_FALSE(r.s_q.has_value());
  EXPECT_FALSE(r.e_n.has_value());
}

TEST(RunPoint, UnstablePointCarriesNoMeasures) {
  SystemConfig c = entanglement_base();
  c.delta_over_omega_m = 0.3;
  const auto r = run_point(c);
  ASSERT_TRUE(r.stable.has_value());
  EXPECT_FALSE(*r.stable);
  EXPECT_FALSE(r.e_n.has_value());
  EXPECT_FALSE(r.s_q.has_value());
  EXPECT_TRUE(r.error.empty());
}

TEST(RunPoint, InvalidParametersAreRecorded) {
  SystemConfig c = entanglement_base();
  c.r_b = 1.5;
  const auto r = run_point(c);
  EXPECT_EQ(r.error_kind, ErrorKind::invalid_parameter);
  EXPECT_FALSE(r.error.empty());
}

TEST(Sweep, SinglePointMatchesRunPoint) {
  SweepSpec s;
  s.axis1 = Axis{SweepParameter::delta, 0.45, 0.45, 1};
  const auto table = run_sweep(s);
  ASSERT_EQ(table.rows.size(), 1u);
  SystemConfig c = entanglement_base();
  c.delta_over_omega_m = 0.45;
  const auto direct = run_point(c);
  EXPECT_EQ(table.rows[0].e_n, direct.e_n);
  EXPECT_EQ(table.rows[0].s_q, direct.s_q);
  EXPECT_EQ(table.rows[0].axis_values, std::vector<double>{0.45});
}

TEST(Sweep, RowMajorOrder) {
  const auto table = run_sweep(small_grid());
  ASSERT_EQ(table.rows.size(), 49u);
  EXPECT_EQ(table.axis_names, (std::vector<std::string>{"g2_over_g1", "r_b"}));
  for (std::size_t i = 0; i < 7; ++i) {
    for (std::size_t j = 0; j < 7; ++j) {
      const auto& row = table.rows[i * 7 + j];
      EXPECT_DOUBLE_EQ(row.axis_values[0], 1e-4 * static_cast<double>(i) / 6.0);
      EXPECT_DOUBLE_EQ(row.axis_values[1], 0.95 * static_cast<double>(j) / 6.0);
    }
  }
}

TEST(Sweep, DeterministicAcrossRunsAndWorkers) {
  const auto spec = small_grid();
  const std::string a = csv_of(run_sweep(spec, 1));
  EXPECT_EQ(a, csv_of(run_sweep(spec, 1)));
  EXPECT_EQ(a, csv_of(run_sweep(spec, 3)));
  EXPECT_EQ(a, csv_of(run_sweep(spec, 8)));
}

TEST(Sweep, MeasuresOnlyOnStableRows) {
  auto spec = preset("fig3a", {61, 11});
  const auto table = run_sweep(spec);
  std::size_t stable = 0;
  for (const auto& r : table.rows) {
    ASSERT_TRUE(r.error.empty()) << r.error;
    ASSERT_TRUE(r.stable.has_value());
    EXPECT_EQ(*r.stable, r.e_n.has_value());
    if (*r.stable) ++stable;
  }
  EXPECT_GT(stable, 0u);
  EXPECT_LT(stable, table.rows.size());
}

TEST(Sweep, PeriodicInTheta) {
  for (const char* id : {"fig3e", "fig4d"}) {
    const auto table = run_sweep(preset(id, {11, 9}));
    for (std::size_t i = 0; i < 9; ++i) {
      const auto& first = table.rows[i * 9];
      const auto& last = table.rows[i * 9 + 8];
      ASSERT_EQ(first.stable, last.stable) << id;
      EXPECT_NEAR(*first.eta, *last.eta, 1e-9);
      if (first.e_n && last.e_n) {
        EXPECT_NEAR(*first.e_n, *last.e_n, 1e-9);
        EXPECT_NEAR(*first.s_q, *last.s_q, 1e-9);
      }
    }
  }
}

TEST(Presets, AllIdsResolve) {
  for (auto id : preset_ids) {
    const auto s = preset(id, {5, 3});
    EXPECT_NO_THROW(validate(s)) << id;
    EXPECT_GT(s.size(), 0u);
  }
  EXPECT_THROW(preset("fig5a"), Error);
}

TEST(Presets, BaseParameters) {
  const auto b = preset("fig3b");
  EXPECT_EQ(b.base.r_b, 0.2);
  EXPECT_DOUBLE_EQ(b.base.theta_rad, 1.5 * constants::pi);
  EXPECT_EQ(preset("fig4a").base.r_b, 0.0);
  EXPECT_EQ(preset("fig4a").base.kappa1_hz, 2.25e6);
  EXPECT_EQ(preset("fig4b").base.r_b, 0.8);
  EXPECT_EQ(preset("fig2b").options.outputs, OutputLevel::eta_only);
}

TEST(Presets, DecayRatioMapHasMinimumAtZeroPhase) {
  const auto table = run_sweep(preset("fig2b", {5, 13}));
  const std::string csv = csv_of(table);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "r_b,theta,eta,stable,e_n,s_q,s_p,nu_minus,nu_tilde_min,sigma_q,sigma_p,omega_eff_over_omega_m,"
            "photon_number,delta_bar_over_omega_m,margin_over_omega_m,lyapunov_residual,branch_count,error_kind,error");
  for (std::size_t i = 1; i < 13; ++i) {
    double lo = 1e300;
    std::size_t arg = 0;
    for (std::size_t j = 0; j < 13; ++j) {
      const double eta = *table.rows[i * 13 + j].eta;
      EXPECT_FALSE(table.rows[i * 13 + j].e_n.has_value());
      if (eta < lo) {
        lo = eta;
        arg = j;
      }
    }
    EXPECT_TRUE(arg == 0 || arg == 12);
  }
}

TEST(Emission, EmptyTableIsHeaderOnly) {
  SweepTable t;
  t.axis_names = {"delta"};
  const std::string csv = csv_of(t);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1);
  EXPECT_EQ(render(t, OutputFormat::json), "[]\n");
}

TEST(Emission, QuotesAwkwardCells) {
  SweepTable t;
  t.axis_names = {"delta"};
  ResultRecord r;
  r.axis_values = {0.5};
  r.error = "bad, \"quoted\" value";
  t.rows.push_back(r);
  const std::string csv = csv_of(t);
  EXPECT_NE(csv.find("\"bad, \"\"quoted\"\" value\""), std::string::npos);
}

TEST(Emission, DoublesRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-17}) EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST(Emission, JsonRecords) {
  SweepSpec s;
  s.axis1 = Axis{SweepParameter::delta, 0.6, 0.7, 2};
  const auto j = json::parse(render(run_sweep(s), OutputFormat::json));
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[0]["delta"].get<double>(), 0.6);
  EXPECT_TRUE(j[0]["stable"].get<bool>());
  EXPECT_GT(j[1]["e_n"].get<double>(), 0.0);
  EXPECT_TRUE(j[0]["error_kind"].is_null());
}

TEST(Emission, UnwritablePathIsIoError) {
  try {
    emit(SweepTable{}, OutputFormat::csv, "/nonexistent/dir/out.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::io);
  }
}
