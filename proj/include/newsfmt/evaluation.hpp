#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "newsfmt/error.hpp"
#include "newsfmt/geometry.hpp"

namespace newsfmt {

/// Intersection over union of two rectangles.
inline double jaccard(const Band& a, const Band& b) {
  require(a.area() > 0 && b.area() > 0, "jaccard: zero-area rectangle");
  const auto inter = intersectionArea(a, b);
  return static_cast<double>(inter) / static_cast<double>(a.area() + b.area() - inter);
}

/// Frame-level score: sum over result bands of the best ground-truth Jaccard,
/// divided by the number of ground-truth bands. Not symmetric; can exceed 1
/// when many result bands match well.
inline double netJaccard(const std::vector<Band>& result, const std::vector<Band>& truth) {
  require(!truth.empty(), "netJaccard: empty ground truth");
  require(!result.empty(), "netJaccard: empty result");
  double sum = 0.0;
  for (const Band& r : result) {
    double best = 0.0;
    for (const Band& t : truth) best = std::max(best, jaccard(r, t));
    sum += best;
  }
  return sum / static_cast<double>(truth.size());
}

namespace detail {

/// Minimum-cost assignment (Hungarian method, O(n^2 m)) for an n x m cost
/// matrix with n <= m. Returns the column assigned to each row.
inline std::vector<int> minCostAssignment(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const int m = n == 0 ? 0 : static_cast<int>(cost[0].size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<int> match(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (match[j] != 0) assignment[match[j] - 1] = j - 1;
  }
  return assignment;
}

}  // namespace detail

/// Symmetric alternative to netJaccard (not the published score): total
/// Jaccard of an optimal one-to-one matching between result and truth bands,
/// divided by max(n_result, n_truth). Penalizes both over- and
/// under-segmentation and never exceeds 1.
inline double matchedJaccard(const std::vector<Band>& result, const std::vector<Band>& truth) {
  require(!truth.empty() && !result.empty(), "matchedJaccard: empty band list");
  const bool transpose = result.size() > truth.size();
  const auto& rows = transpose ? truth : result;
  const auto& cols = transpose ? result : truth;
  std::vector<std::vector<double>> cost(rows.size(), std::vector<double>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) cost[i][j] = -jaccard(rows[i], cols[j]);
  }
  const auto assignment = detail::minCostAssignment(cost);
  double sum = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) sum -= cost[i][static_cast<std::size_t>(assignment[i])];
  return sum / static_cast<double>(std::max(result.size(), truth.size()));
}

struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  [[nodiscard]] std::int64_t total() const noexcept { return tp + fp + tn + fn; }
  /// The same predictions scored with the other class as positive.
  [[nodiscard]] ConfusionCounts swapped() const noexcept { return {tn, fn, tp, fp}; }

  ConfusionCounts& operator+=(const ConfusionCounts& o) noexcept {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
  }
  friend constexpr bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// A measure is empty when its denominator is zero.
struct ClassifierMeasures {
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> fMeasure;
  std::optional<double> balancedAccuracy;
};

inline ClassifierMeasures classifierMeasures(const ConfusionCounts& c) {
  ClassifierMeasures m;
  const auto ratio = [](std::int64_t num, std::int64_t den) -> std::optional<double> {
    if (den <= 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  if (m.precision && m.recall && (*m.precision + *m.recall) > 0.0)
    m.fMeasure = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
  const auto specificity = ratio(c.tn, c.tn + c.fp);
  if (m.recall && specificity) m.balancedAccuracy = 0.5 * *m.recall + 0.5 * *specificity;
  return m;
}

struct FrameScore {
  std::string frame;
  double netJaccard = 0.0;
  double matchedJaccard = 0.0;
  std::size_t resultBands = 0;
  std::size_t truthBands = 0;
};

struct ClassMeasures {
  std::string positiveClass;
  ClassifierMeasures measures;
};

struct EvaluationReport {
  std::vector<FrameScore> frames;
  std::vector<ClassMeasures> classifier;

  [[nodiscard]] double meanNetJaccard() const {
    if (frames.empty()) return 0.0;
    double s = 0.0;
    for (const auto& f : frames) s += f.netJaccard;
    return s / static_cast<double>(frames.size());
  }
  [[nodiscard]] double meanMatchedJaccard() const {
    if (frames.empty()) return 0.0;
    double s = 0.0;
    for (const auto& f : frames) s += f.matchedJaccard;
    return s / static_cast<double>(frames.size());
  }

  void addFrame(std::string name, const std::vector<Band>& result, const std::vector<Band>& truth) {
    frames.push_back({std::move(name), netJaccard(result, truth), matchedJaccard(result, truth),
                      result.size(), truth.size()});
  }

  /// Adds measures with each class of a two-class problem taken as positive.
  void addClassifier(const ConfusionCounts& counts, const std::string& positive,
                     const std::string& negative) {
    classifier.push_back({positive, classifierMeasures(counts)});
    classifier.push_back({negative, classifierMeasures(counts.swapped())});
  }

  [[nodiscard]] nlohmann::json toJson() const {
    using nlohmann::json;
    const auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json j;
    j["frames"] = json::array();
    for (const auto& f : frames) {
      j["frames"].push_back({{"frame", f.frame},
                             {"net_jaccard", f.netJaccard},
                             {"matched_jaccard", f.matchedJaccard},
                             {"result_bands", f.resultBands},
                             {"truth_bands", f.truthBands}});
    }
    j["mean_net_jaccard"] = meanNetJaccard();
    j["mean_matched_jaccard"] = meanMatchedJaccard();
    j["classifier"] = json::array();
    for (const auto& c : classifier) {
      j["classifier"].push_back({{"class", c.positiveClass},
                                 {"precision", opt(c.measures.precision)},
                                 {"recall", opt(c.measures.recall)},
                                 {"f_measure", opt(c.measures.fMeasure)},
                                 {"balanced_accuracy", opt(c.measures.balancedAccuracy)}});
    }
    return j;
  }

  [[nodiscard]] std::string toTable() const {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4);
    if (!frames.empty()) {
      os << std::left << std::setw(28) << "frame" << std::right << std::setw(12) << "net_jaccard"
         << std::setw(16) << "matched_jaccard" << std::setw(8) << "bands" << std::setw(8) << "truth"
         << '\n';
      for (const auto& f : frames) {
        os << std::left << std::setw(28) << f.frame << std::right << std::setw(12) << f.netJaccard
           << std::setw(16) << f.matchedJaccard << std::setw(8) << f.resultBands << std::setw(8)
           << f.truthBands << '\n';
      }
      os << std::left << std::setw(28) << "mean" << std::right << std::setw(12) << meanNetJaccard()
         << std::setw(16) << meanMatchedJaccard() << '\n';
    }
    const auto fmt = [](const std::optional<double>& v) {
      if (!v) return std::string("undefined");
      std::ostringstream s;
      s << std::fixed << std::setprecision(4) << *v;
      return s.str();
    };
    for (const auto& c : classifier) {
      os << c.positiveClass << ": precision " << fmt(c.measures.precision) << ", recall "
         << fmt(c.measures.recall) << ", f-measure " << fmt(c.measures.fMeasure)
         << ", balanced accuracy " << fmt(c.measures.balancedAccuracy) << '\n';
    }
    return os.str();
  }
};

}  // namespace newsfmt
