#include <doctest.h>

#include <cmath>
#include <set>

#include "solarfc/errors.hpp"
#include "solarfc/features.hpp"
#include "solarfc/rng.hpp"
#include "test_util.hpp"

using namespace solarfc;

namespace {

constexpr EpochMinute kBase = 21096000;  // 2010-02-03T00:00Z, arbitrary

// Gapless feature series with the given per-minute Kt values; every other
// column gets a distinct non-constant but finite value.
std::vector<FeatureRecord> make_series(const std::vector<double>& kt,
                                       const std::vector<bool>* valid = nullptr,
                                       EpochMinute base = kBase) {
  std::vector<FeatureRecord> out(kt.size());
  for (size_t i = 0; i < kt.size(); ++i) {
    FeatureRecord& fr = out[i];
    fr.timestamp = base + EpochMinute(i);
    for (int c = 0; c < kFieldCount; ++c) {
      fr.x[c] = double(c) + 0.01 * double(i % 97) + 0.001 * double((i * 7 + c * 13) % 31);
    }
    fr.x[kGhiClearIndex] = 400.0 + 100.0 * std::sin(0.001 * double(i));
    fr.x[kKtIndex] = kt[i];
    fr.valid = valid ? (*valid)[i] : true;
    if (!fr.valid) fr.x[kKtIndex] = std::nan("");
  }
  return out;
}

RadiationRecord minute_record(EpochMinute t, double value_scale = 1.0) {
  RadiationRecord r;
  r.timestamp = t;
  for (int f = 0; f < kFieldCount; ++f) r.values[size_t(f)] = value_scale * double(f + 1);
  return r;
}

}  // namespace

TEST_CASE("compute_kt") {
  FeatureConstants k;
  CHECK(*compute_kt(500.0, 500.0, k) == doctest::Approx(1.0));
  CHECK(*compute_kt(0.0, 800.0, k) == doctest::Approx(0.0));
  CHECK(*compute_kt(400.0, 800.0, k) == doctest::Approx(0.5));
  CHECK(!compute_kt(100.0, 5.0, k));              // below ghi_floor
  CHECK(*compute_kt(5000.0, 100.0, k) == k.kt_max);  // clipped
}

TEST_CASE("average_kt of a constant is the constant") {
  auto series = make_series(std::vector<double>(120, 0.7));
  auto avg = average_kt(series, kBase + 119);
  REQUIRE(avg);
  CHECK(*avg == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("average_kt of a symmetric ramp is 0.5") {
  std::vector<double> kt(60);
  for (int i = 0; i < 60; ++i) kt[size_t(i)] = double(i) / 59.0;
  auto series = make_series(kt);
  auto avg = average_kt(series, kBase + 59);
  REQUIRE(avg);
  CHECK(*avg == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("average_kt matches a naive summation oracle") {
  Rng rng(42);
  std::vector<double> kt(400);
  for (auto& v : kt) v = rng.uniform(0.0, 1.3);
  auto series = make_series(kt);
  for (EpochMinute f_h : {kBase + 59, kBase + 200, kBase + 399}) {
    double naive = 0.0;
    for (EpochMinute s = f_h - 59; s <= f_h; ++s) naive += kt[size_t(s - kBase)];
    naive /= 60.0;
    auto avg = average_kt(series, f_h);
    REQUIRE(avg);
    CHECK(std::abs(*avg - naive) < 1e-12);
  }
}

TEST_CASE("average_kt rejects windows with any missing minute") {
  std::vector<double> kt(80, 0.5);
  std::vector<bool> valid(80, true);
  valid[30] = false;
  auto series = make_series(kt, &valid);
  CHECK(!average_kt(series, kBase + 59));   // minute 30 inside the window
  CHECK(!average_kt(series, kBase + 20));   // window starts before the series
  CHECK(!average_kt(series, kBase + 200));  // beyond the series
}

TEST_CASE("impute fills a single missing minute by linear interpolation") {
  std::vector<RadiationRecord> records;
  records.push_back(minute_record(kBase));
  records.push_back(minute_record(kBase + 2));
  records[0].values[0] = 10.0;
  records[1].values[0] = 12.0;
  auto filled = impute(records, FeatureConstants{}, {});
  REQUIRE(filled.size() == 3);
  CHECK(filled[1].values[0] == doctest::Approx(11.0));
  CHECK(filled[1].qc[0] == 1);  // interpolation provenance
}

TEST_CASE("impute fills long gaps with the mean and flags them") {
  FeatureConstants k;
  std::vector<RadiationRecord> records;
  const int temp = field_index("temp_air");
  records.push_back(minute_record(kBase));
  records.push_back(minute_record(kBase + 1));
  records.push_back(minute_record(kBase + 180 + 2));  // 3-hour hole
  records.push_back(minute_record(kBase + 180 + 3));
  records[0].values[size_t(temp)] = 10.0;
  records[1].values[size_t(temp)] = 20.0;
  records[2].values[size_t(temp)] = 30.0;
  records[3].values[size_t(temp)] = 40.0;
  auto filled = impute(records, k, {});
  const double mean = (10.0 + 20.0 + 30.0 + 40.0) / 4.0;
  for (size_t i = 2; i < filled.size() - 2; ++i) {
    CHECK(filled[i].values[size_t(temp)] == doctest::Approx(mean));
    CHECK(filled[i].qc[size_t(temp)] == 2);  // mean-fill provenance
  }
}

TEST_CASE("a fully-absent feature is an unusable-feature error") {
  std::vector<RadiationRecord> records;
  for (int i = 0; i < 5; ++i) {
    auto r = minute_record(kBase + i);
    r.values[size_t(field_index("uvb"))] = std::nan("");
    records.push_back(r);
  }
  try {
    impute(records, FeatureConstants{}, {});
    FAIL("expected an unusable-feature error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("uvb") != std::string::npos);
  }
}

TEST_CASE("impute resamples 3-minute cadence onto the minute grid") {
  std::vector<RadiationRecord> records;
  for (int i = 0; i <= 4; ++i) {
    auto r = minute_record(kBase + 3 * i);
    r.values[0] = double(3 * i);
    records.push_back(r);
  }
  auto filled = impute(records, FeatureConstants{}, {});
  REQUIRE(filled.size() == 13);
  for (size_t i = 0; i < filled.size(); ++i) {
    CHECK(filled[i].values[0] == doctest::Approx(double(i)));
  }
}

TEST_CASE("build_windows boundary counts") {
  FeatureConstants k;
  k.seq_len = 60;
  const std::vector<int> horizons{1, 2, 3, 4};

  auto exact = make_series(std::vector<double>(size_t(k.seq_len + 240), 0.6));
  CHECK(build_windows(exact, k, horizons).size() == 1);

  auto shorter = make_series(std::vector<double>(size_t(k.seq_len - 1), 0.6));
  CHECK(build_windows(shorter, k, horizons).empty());

  // Gapless N-minute series: count = N - seq_len - 60*max_h + 1.
  auto longer = make_series(std::vector<double>(800, 0.6));
  CHECK(build_windows(longer, k, horizons).size() == 800 - 60 - 240 + 1);
}

TEST_CASE("build_windows equals a brute-force enumeration oracle on a gappy fixture") {
  FeatureConstants k;
  k.seq_len = 30;
  const std::vector<int> horizons{1, 2, 3, 4};
  Rng rng(77);
  const int n = 5000;
  std::vector<double> kt(n);
  std::vector<bool> valid(n);
  for (int i = 0; i < n; ++i) {
    kt[size_t(i)] = rng.uniform(0.0, 1.2);
    valid[size_t(i)] = rng.uniform() > 0.02;
  }
  auto series = make_series(kt, &valid);
  auto samples = build_windows(series, k, horizons);

  // Independent enumeration: every anchor, completeness tested directly.
  std::vector<std::ptrdiff_t> expected_anchors;
  for (std::ptrdiff_t a = 0; a < n; ++a) {
    if (a < k.seq_len - 1 || a + 240 >= n) continue;
    bool ok = true;
    for (std::ptrdiff_t t = a - k.seq_len + 1; t <= a && ok; ++t) ok = valid[size_t(t)];
    for (int h : horizons) {
      for (std::ptrdiff_t t = a + 60 * h - 59; t <= a + 60 * h && ok; ++t) ok = valid[size_t(t)];
    }
    if (ok) expected_anchors.push_back(a);
  }
  REQUIRE(samples.size() == expected_anchors.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    CHECK(samples[i].anchor_time == kBase + expected_anchors[i]);
    // Eq.-6 equivalence: targets equal the naive mean, recomputed here.
    for (size_t hi = 0; hi < horizons.size(); ++hi) {
      std::ptrdiff_t end = expected_anchors[i] + 60 * horizons[hi];
      double naive = 0.0;
      for (std::ptrdiff_t t = end - 59; t <= end; ++t) naive += kt[size_t(t)];
      naive /= 60.0;
      CHECK(std::abs(samples[i].targets(int(hi)) - naive) < 1e-12);
    }
  }
}

TEST_CASE("window samples carry anchor Kt and horizon clear-sky means") {
  FeatureConstants k;
  k.seq_len = 10;
  auto series = make_series(std::vector<double>(400, 0.8));
  auto samples = build_windows(series, k, {1, 2});
  REQUIRE(!samples.empty());
  const auto& s = samples.front();
  std::ptrdiff_t anchor = s.anchor_time - kBase;
  CHECK(s.anchor_kt == series[size_t(anchor)].x[kKtIndex]);
  double cs = 0.0;
  for (std::ptrdiff_t t = anchor + 1; t <= anchor + 60; ++t) cs += series[size_t(t)].x[kGhiClearIndex];
  CHECK(s.clearsky_at_horizons(0) == doctest::Approx(cs / 60.0).epsilon(1e-12));
}

TEST_CASE("normalization: train columns go to zero mean unit variance") {
  FeatureConstants k;
  k.seq_len = 8;
  Rng rng(5);
  std::vector<double> kt(1200);
  for (auto& v : kt) v = rng.uniform(0.1, 1.2);
  auto series = make_series(kt);
  auto samples = build_windows(series, k, {1, 2});
  REQUIRE(samples.size() > 100);
  NormStats stats = fit_norm_stats(samples, 1e-8);
  auto normalized = samples;
  normalize_samples(normalized, stats);

  Vector mean = Vector::Zero(kInputDim), var = Vector::Zero(kInputDim);
  std::size_t rows = 0;
  for (const auto& s : normalized) {
    mean += s.inputs.colwise().sum().transpose();
    rows += size_t(s.inputs.rows());
  }
  mean /= double(rows);
  for (const auto& s : normalized) {
    var += s.inputs.array().square().colwise().sum().matrix().transpose();
  }
  var = var / double(rows) - mean.cwiseAbs2();
  CHECK(mean.cwiseAbs().maxCoeff() < 1e-10);
  CHECK((var.cwiseSqrt() - Vector::Ones(kInputDim)).cwiseAbs().maxCoeff() < 1e-10);

  for (const auto& s : normalized) {
    CHECK(s.inputs.allFinite());
    CHECK(s.targets.allFinite());
  }
}

TEST_CASE("denormalize inverts normalize within 1e-12") {
  FeatureConstants k;
  k.seq_len = 8;
  Rng rng(6);
  std::vector<double> kt(800);
  for (auto& v : kt) v = rng.uniform(0.1, 1.2);
  auto samples = build_windows(make_series(kt), k, {1});
  NormStats stats = fit_norm_stats(samples, 1e-8);
  auto normalized = samples;
  normalize_samples(normalized, stats);
  for (size_t i = 0; i < samples.size(); ++i) {
    double back = denormalize_target(normalized[i].targets(0), stats, 0);
    CHECK(back == doctest::Approx(samples[i].targets(0)).epsilon(1e-12));
  }
}

TEST_CASE("a constant feature column is a degenerate-feature error") {
  FeatureConstants k;
  k.seq_len = 5;
  std::vector<double> kt(500, 0.5);
  auto series = make_series(kt);
  for (auto& fr : series) fr.x[3] = 42.0;  // freeze one measured column
  auto samples = build_windows(series, k, {1});
  CHECK_THROWS_AS(fit_norm_stats(samples, 1e-8), Error);
}

TEST_CASE("split_by_year partitions by anchor year and rejects bad configs") {
  FeatureConstants k;
  k.seq_len = 8;
  Rng rng(8);
  auto year_block = [&](int year) {
    std::vector<double> kt(600);
    for (auto& v : kt) v = rng.uniform(0.1, 1.2);
    return build_windows(make_series(kt, nullptr, to_epoch_minute(CivilTime{year, 6, 1, 0, 0})), k,
                         {1});
  };
  auto b2010 = year_block(2010);
  auto b2011 = year_block(2011);
  auto b2009 = year_block(2009);
  std::vector<WindowedSample> all;
  for (auto* b : {&b2010, &b2011, &b2009}) all.insert(all.end(), b->begin(), b->end());

  auto split = split_by_year(all, {2010, 2011}, {2009}, k);
  CHECK(split.train.size() == b2010.size() + b2011.size());
  CHECK(split.test.size() == b2009.size());
  for (const auto& s : split.train) {
    int y = year_of(s.anchor_time);
    CHECK((y == 2010 || y == 2011));
  }
  for (const auto& s : split.test) CHECK(year_of(s.anchor_time) == 2009);

  CHECK_THROWS_AS(split_by_year(all, {2010}, {2010}, k), Error);
  CHECK_THROWS_AS(split_by_year(b2009, {2010, 2011}, {2009}, k), Error);  // empty train
}

TEST_CASE("normalization stats come from the train split only") {
  FeatureConstants k;
  k.seq_len = 8;
  Rng rng(9);
  // Different Kt regimes in train vs test years.
  std::vector<double> kt_train(600), kt_test(600);
  for (auto& v : kt_train) v = rng.uniform(0.1, 0.5);
  for (auto& v : kt_test) v = rng.uniform(0.7, 1.2);
  auto train_w =
      build_windows(make_series(kt_train, nullptr, to_epoch_minute(CivilTime{2010, 6, 1, 0, 0})),
                    k, {1});
  auto test_w =
      build_windows(make_series(kt_test, nullptr, to_epoch_minute(CivilTime{2009, 6, 1, 0, 0})),
                    k, {1});
  std::vector<WindowedSample> all;
  all.insert(all.end(), train_w.begin(), train_w.end());
  all.insert(all.end(), test_w.begin(), test_w.end());
  auto split = split_by_year(all, {2010}, {2009}, k);

  NormStats train_stats = fit_norm_stats(train_w, k.std_floor);
  CHECK(split.norm.target_mean(0) == doctest::Approx(train_stats.target_mean(0)).epsilon(1e-12));
  NormStats test_stats = fit_norm_stats(test_w, k.std_floor);
  CHECK(std::abs(split.norm.target_mean(0) - test_stats.target_mean(0)) > 0.05);
}

TEST_CASE("dataset file round-trips") {
  FeatureConstants k;
  k.seq_len = 8;
  Rng rng(10);
  std::vector<double> kt_a(600), kt_b(600);
  for (auto& v : kt_a) v = rng.uniform(0.1, 1.2);
  for (auto& v : kt_b) v = rng.uniform(0.1, 1.2);
  auto wa = build_windows(make_series(kt_a, nullptr, to_epoch_minute(CivilTime{2010, 6, 1, 0, 0})),
                          k, {1, 2});
  auto wb = build_windows(make_series(kt_b, nullptr, to_epoch_minute(CivilTime{2009, 6, 1, 0, 0})),
                          k, {1, 2});
  std::vector<WindowedSample> all;
  all.insert(all.end(), wa.begin(), wa.end());
  all.insert(all.end(), wb.begin(), wb.end());
  auto split = split_by_year(all, {2010}, {2009}, k);
  split.horizons = {1, 2};
  split.site_id = "test_site";

  auto dir = testutil::scratch_dir("dataset");
  save_dataset(dir + "/d.sfds", split);
  auto loaded = load_dataset(dir + "/d.sfds");
  CHECK(loaded.site_id == split.site_id);
  CHECK(loaded.horizons == split.horizons);
  CHECK(loaded.train.size() == split.train.size());
  CHECK(loaded.test.size() == split.test.size());
  CHECK(loaded.norm.feature_mean == split.norm.feature_mean);
  CHECK(loaded.norm.target_std == split.norm.target_std);
  for (size_t i = 0; i < split.train.size(); ++i) {
    CHECK(loaded.train[i].inputs == split.train[i].inputs);
    CHECK(loaded.train[i].targets == split.train[i].targets);
    CHECK(loaded.train[i].anchor_time == split.train[i].anchor_time);
    CHECK(loaded.train[i].anchor_kt == split.train[i].anchor_kt);
  }
}

TEST_CASE("synthetic generator is deterministic and physically sane") {
  auto site = testutil::boulder();
  EpochMinute start = to_epoch_minute(CivilTime{2010, 5, 1, 0, 0});
  auto a = generate_synthetic(site, start, 2, 42);
  auto b = generate_synthetic(site, start, 2, 42);
  REQUIRE(a.size() == b.size());
  REQUIRE(a.size() == 2 * 1440);
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].same_observations(b[i]));

  auto c = generate_synthetic(site, start, 2, 43);
  bool any_diff = false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (!a[i].same_observations(c[i])) any_diff = true;
  }
  CHECK(any_diff);

  for (const auto& r : a) {
    for (int f = 0; f < kFieldCount; ++f) CHECK(std::isfinite(r.values[size_t(f)]));
    CHECK(r.values[size_t(field_index("dw_solar"))] >= 0.0);
    CHECK(r.values[size_t(field_index("rh"))] <= 100.0);
  }
}
