#include "solarfc/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "solarfc/errors.hpp"
#include "solarfc/training.hpp"

namespace solarfc {

namespace {

std::vector<int> all_columns(std::size_t n) {
  std::vector<int> cols(n);
  std::iota(cols.begin(), cols.end(), 0);
  return cols;
}

std::string fmt(double v, const char* spec = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

}  // namespace

EvalReport score_predictions(const Matrix& kt_predictions,
                             const std::vector<WindowedSample>& test, const NormStats& stats,
                             const std::vector<int>& horizons,
                             const std::vector<int>& columns, std::string label) {
  if (test.empty()) throw config_error("cannot evaluate on an empty test set");
  const std::vector<int> cols = columns.empty() ? all_columns(horizons.size()) : columns;
  if (kt_predictions.rows() != Eigen::Index(test.size()) ||
      kt_predictions.cols() != Eigen::Index(cols.size())) {
    throw config_error("prediction matrix shape does not match test set");
  }

  EvalReport report;
  report.label = std::move(label);
  report.sample_count = test.size();
  for (int c : cols) report.horizons.push_back(horizons[size_t(c)]);
  report.rmse_norm.assign(cols.size(), 0.0);
  report.rmse_kt.assign(cols.size(), 0.0);
  report.rmse_wm2.assign(cols.size(), 0.0);

  for (std::size_t i = 0; i < test.size(); ++i) {
    const WindowedSample& s = test[i];
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const int c = cols[j];
      const double target_kt = denormalize_target(s.targets(c), stats, c);
      const double r_kt = kt_predictions(Eigen::Index(i), Eigen::Index(j)) - target_kt;
      const double r_norm = r_kt / stats.target_std(c);
      const double r_wm2 = r_kt * s.clearsky_at_horizons(c);
      report.rmse_norm[j] += r_norm * r_norm;
      report.rmse_kt[j] += r_kt * r_kt;
      report.rmse_wm2[j] += r_wm2 * r_wm2;
    }
  }
  const double inv_n = 1.0 / double(test.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    report.rmse_norm[j] = std::sqrt(report.rmse_norm[j] * inv_n);
    report.rmse_kt[j] = std::sqrt(report.rmse_kt[j] * inv_n);
    report.rmse_wm2[j] = std::sqrt(report.rmse_wm2[j] * inv_n);
  }
  auto mean = [](const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
  };
  report.mean_rmse_norm = mean(report.rmse_norm);
  report.mean_rmse_kt = mean(report.rmse_kt);
  report.mean_rmse_wm2 = mean(report.rmse_wm2);
  return report;
}

EvalReport evaluate(const RnnParams& params, const std::vector<WindowedSample>& test,
                    const NormStats& stats, const std::vector<int>& horizons,
                    const std::vector<int>& columns, double kt_max) {
  if (test.empty()) throw config_error("cannot evaluate on an empty test set");
  const std::vector<int> cols = columns.empty() ? all_columns(horizons.size()) : columns;

  Matrix preds(test.size(), cols.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    Vector cs(cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) cs(Eigen::Index(j)) =
        test[i].clearsky_at_horizons(cols[j]);
    auto p = predict(params, test[i].inputs, stats, cs, cols, kt_max);
    for (std::size_t j = 0; j < cols.size(); ++j) preds(Eigen::Index(i), Eigen::Index(j)) = p[j].kt;
  }
  return score_predictions(preds, test, stats, horizons, cols, "rnn");
}

EvalReport persistence_baseline(const std::vector<WindowedSample>& test, const NormStats& stats,
                                const std::vector<int>& horizons,
                                const std::vector<int>& columns) {
  if (test.empty()) throw config_error("cannot evaluate on an empty test set");
  const std::vector<int> cols = columns.empty() ? all_columns(horizons.size()) : columns;
  Matrix preds(test.size(), cols.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      preds(Eigen::Index(i), Eigen::Index(j)) = test[i].anchor_kt;
    }
  }
  return score_predictions(preds, test, stats, horizons, cols, "persistence");
}

namespace {

void check_consistent(const std::vector<EvalReport>& reports,
                      const std::vector<EvalReport>& baselines) {
  if (reports.empty()) throw config_error("no evaluation reports to render");
  if (!baselines.empty() && baselines.size() != reports.size()) {
    throw config_error("baseline count does not match report count");
  }
  for (const auto& r : reports) {
    if (r.horizons != reports.front().horizons) {
      throw config_error("mixed horizon sets across reports");
    }
  }
  for (const auto& b : baselines) {
    if (b.horizons != reports.front().horizons) {
      throw config_error("baseline horizon set does not match reports");
    }
  }
}

}  // namespace

std::string render_tables(const std::vector<EvalReport>& reports,
                          const std::vector<EvalReport>& baselines) {
  check_consistent(reports, baselines);
  const auto& horizons = reports.front().horizons;

  std::ostringstream t;
  t << "RMSE (Kt units)\n";
  auto cell = [](const std::string& s) {
    std::string c = s;
    c.resize(std::max<std::size_t>(c.size(), 18), ' ');
    return c;
  };
  t << cell("F.H.");
  for (std::size_t i = 0; i < reports.size(); ++i) {
    t << cell(reports[i].site_id + "/" + reports[i].label);
    if (!baselines.empty()) t << cell(baselines[i].site_id + "/" + baselines[i].label);
  }
  t << '\n';
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    t << cell(std::to_string(horizons[h]) + "-hour");
    for (std::size_t i = 0; i < reports.size(); ++i) {
      t << cell(fmt(reports[i].rmse_kt[h], "%.4f"));
      if (!baselines.empty()) t << cell(fmt(baselines[i].rmse_kt[h], "%.4f"));
    }
    t << '\n';
  }
  t << cell("Mean RMSE");
  for (std::size_t i = 0; i < reports.size(); ++i) {
    t << cell(fmt(reports[i].mean_rmse_kt, "%.4f"));
    if (!baselines.empty()) t << cell(fmt(baselines[i].mean_rmse_kt, "%.4f"));
  }
  t << '\n';
  return t.str();
}

std::string render_tables_csv(const std::vector<EvalReport>& reports,
                              const std::vector<EvalReport>& baselines) {
  check_consistent(reports, baselines);
  std::ostringstream out;
  out << "site,label,horizon_hours,rmse_norm,rmse_kt,rmse_wm2,sample_count\n";
  auto emit = [&out](const EvalReport& r) {
    for (std::size_t h = 0; h < r.horizons.size(); ++h) {
      out << r.site_id << ',' << r.label << ',' << r.horizons[h] << ',' << fmt(r.rmse_norm[h])
          << ',' << fmt(r.rmse_kt[h]) << ',' << fmt(r.rmse_wm2[h]) << ',' << r.sample_count
          << '\n';
    }
    out << r.site_id << ',' << r.label << ",mean," << fmt(r.mean_rmse_norm) << ','
        << fmt(r.mean_rmse_kt) << ',' << fmt(r.mean_rmse_wm2) << ',' << r.sample_count << '\n';
  };
  for (std::size_t i = 0; i < reports.size(); ++i) {
    emit(reports[i]);
    if (!baselines.empty()) emit(baselines[i]);
  }
  return out.str();
}

}  // namespace solarfc
