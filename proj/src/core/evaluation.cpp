#include "core/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"

namespace mba {

namespace {

// Two-sided 95% critical values of Student's t (0.975 quantile), dof 1..200.
constexpr double kTCritical975[200] = {
    12.7062047364321, 4.30265272969614, 3.18244630528426, 2.7764451051978, 2.57058183563631,
    2.44691185114497, 2.36462425159278, 2.30600413520417, 2.2621571628541, 2.22813885196494,
    2.20098516008295, 2.17881282966342, 2.16036865646101, 2.14478668791693, 2.13144954555932,
    2.11990529922101, 2.10981557783318, 2.10092204024096, 2.09302405440826, 2.08596344726584,
    2.07961384472766, 2.07387306790401, 2.06865761041904, 2.06389856162802, 2.05953855275329,
    2.05552943864287, 2.05183051648028, 2.04840714179524, 2.0452296421327, 2.04227245630124,
    2.03951344639641, 2.0369333434601, 2.03451529744934, 2.03224450931772, 2.03010792825034,
    2.02809400098045, 2.02619246302911, 2.02439416391197, 2.02269092003676, 2.02107539030627,
    2.01954097044138, 2.01808170281844, 2.01669219922782, 2.01536757444376, 2.01410338888085,
    2.01289559891943, 2.01174051372977, 2.01063475762423, 2.00957523712924, 2.00855911210076,
    2.00758377031584, 2.00664680506169, 2.00574599531787, 2.00487928818806, 2.00404478328915,
    2.00324071884787, 2.00246545929101, 2.00171748414524, 2.00099537808827, 2.00029782201426,
    1.99962358499494, 1.99897151703338, 1.99834054252074, 1.99772965431769, 1.997137908392,
    1.99656441895231, 1.9960083540253, 1.99546893142984, 1.99494541510724, 1.99443711177119,
    1.99394336784563, 1.99346356666187, 1.99299712588985, 1.99254349518093, 1.99210215400224,
    1.99167260964466, 1.99125439538838, 1.99084706881169, 1.99045021023013, 1.99006342125445,
    1.9896863234569, 1.98931855713657, 1.98895978017516, 1.98860966697571, 1.98826790747722,
    1.98793420623902, 1.98760828158907, 1.98728986483117, 1.98697869950628, 1.98667454070377,
    1.98637715441862, 1.98608631695113, 1.98580181434582, 1.9855234418666, 1.98525100350919,
    1.98498431153102, 1.98472318602712, 1.98446745442669, 1.98421695150868, 1.98397151844963,
    1.98373100288528, 1.98349525849594, 1.98326414470971, 1.98303752642299, 1.98281527373715,
    1.98259726171029, 1.98238337012302, 1.98217348325745, 1.98196748968847, 1.98176528208651,
    1.98156675703107, 1.9813718148344, 1.98118035937458, 1.98099229793751, 1.9808075410672,
    1.98062600242394, 1.98044759864973, 1.98027224924071, 1.98009987642601, 1.97993040505278,
    1.97976376247693, 1.97959987845933, 1.97943868506709, 1.97928011657968, 1.97912410939962,
    1.97897060196739, 1.97881953468052, 1.97867084981636, 1.97852449145861, 1.97838040542715,
    1.97823853921126, 1.97809884190572, 1.97796126415, 1.97782575807005, 1.9776922772228,
    1.97756077654308, 1.97743121229289, 1.97730354201292, 1.97717772447612, 1.97705371964339,
    1.97693148862102, 1.97681099362009, 1.97669219791747, 1.97657506581854, 1.97645956262142,
    1.9763456545827, 1.97623330888459, 1.97612249360336, 1.97601317767915, 1.97590533088691,
    1.97579892380855, 1.97569392780619, 1.97559031499646, 1.97548805822583, 1.97538713104688,
    1.97528750769547, 1.97518916306887, 1.9750920727046, 1.97499621276023, 1.97490155999377,
    1.97480809174498, 1.97471578591719, 1.97462462095996, 1.97453457585227, 1.97444563008636,
    1.97435776365219, 1.97427095702238, 1.97418519113782, 1.97410044739363, 1.97401670762578,
    1.97393395409807, 1.97385216948961, 1.97377133688277, 1.97369143975146, 1.9736124619499,
    1.97353438770174, 1.97345720158956, 1.9733808885447, 1.97330543383747, 1.97323082306765,
    1.97315704215537, 1.97308407733222, 1.97301191513268, 1.97294054238587, 1.9728699462075,
    1.97280011399213, 1.97273103340569, 1.97266269237817, 1.97259507909662, 1.97252818199834,
    1.97246198976431, 1.97239649131276, 1.972331675793, 1.97226753257946, 1.97220405126583,
    1.9721412216595, 1.97207903377602, 1.9720174778339, 1.97195654424939, 1.97189622363161,
};

}  // namespace

double t_critical_975(std::size_t dof) {
  if (dof == 0) fail(ErrorKind::InvalidArgument, "t critical value requires dof >= 1");
  if (dof <= 200) return kTCritical975[dof - 1];
  return 1.959963984540054;  // normal approximation
}

namespace {

void check_scores(const std::vector<double>& pos, const std::vector<double>& neg) {
  if (pos.empty() || neg.empty())
    fail(ErrorKind::InvalidArgument, "AUC requires nonempty positive and negative score lists");
  for (double s : pos)
    if (std::isnan(s)) fail(ErrorKind::InvalidArgument, "NaN positive score");
  for (double s : neg)
    if (std::isnan(s)) fail(ErrorKind::InvalidArgument, "NaN negative score");
}

// (score, is_positive) sorted ascending; iterate tie groups once.
std::vector<std::pair<double, bool>> pooled_sorted(const std::vector<double>& pos,
                                                   const std::vector<double>& neg) {
  std::vector<std::pair<double, bool>> all;
  all.reserve(pos.size() + neg.size());
  for (double s : pos) all.emplace_back(s, true);
  for (double s : neg) all.emplace_back(s, false);
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return all;
}

}  // namespace

AucReport auc(const std::vector<double>& scores_pos, const std::vector<double>& scores_neg) {
  check_scores(scores_pos, scores_neg);
  auto all = pooled_sorted(scores_pos, scores_neg);

  std::uint64_t wins = 0;  // pairs with s+ > s-
  std::uint64_t ties = 0;  // pairs with s+ = s-
  std::uint64_t negatives_below = 0;
  std::size_t k = 0;
  while (k < all.size()) {
    std::size_t end = k;
    std::uint64_t group_pos = 0, group_neg = 0;
    while (end < all.size() && all[end].first == all[k].first) {
      (all[end].second ? group_pos : group_neg)++;
      ++end;
    }
    wins += group_pos * negatives_below;
    ties += group_pos * group_neg;
    negatives_below += group_neg;
    k = end;
  }

  const double total =
      static_cast<double>(scores_pos.size()) * static_cast<double>(scores_neg.size());
  AucReport report;
  report.n_pos = scores_pos.size();
  report.n_neg = scores_neg.size();
  report.auc = (static_cast<double>(wins) + 0.5 * static_cast<double>(ties)) / total;
  report.tie_mass = static_cast<double>(ties) / total;
  return report;
}

RocCurve roc_curve(const std::vector<double>& scores_pos, const std::vector<double>& scores_neg) {
  check_scores(scores_pos, scores_neg);
  auto all = pooled_sorted(scores_pos, scores_neg);

  RocCurve curve;
  curve.points.emplace_back(0.0, 0.0);
  const double np = static_cast<double>(scores_pos.size());
  const double nn = static_cast<double>(scores_neg.size());

  // Sweep thresholds from the highest score down; each distinct score adds one
  // point, with tied positives and negatives moving the point diagonally.
  std::uint64_t tp = 0, fp = 0;
  std::size_t k = all.size();
  while (k > 0) {
    std::size_t begin = k;
    const double v = all[k - 1].first;
    while (begin > 0 && all[begin - 1].first == v) --begin;
    for (std::size_t i = begin; i < k; ++i) (all[i].second ? tp : fp)++;
    curve.points.emplace_back(static_cast<double>(fp) / nn, static_cast<double>(tp) / np);
    k = begin;
  }
  return curve;
}

double RocCurve::area() const {
  double area = 0.0;
  for (std::size_t k = 1; k < points.size(); ++k) {
    const auto& [x0, y0] = points[k - 1];
    const auto& [x1, y1] = points[k];
    area += (x1 - x0) * 0.5 * (y0 + y1);
  }
  return area;
}

TTestResult paired_ttest(const std::vector<double>& runs_a, const std::vector<double>& runs_b) {
  if (runs_a.size() != runs_b.size())
    fail(ErrorKind::InvalidArgument, "paired t-test requires equal-length run lists");
  const std::size_t n = runs_a.size();
  if (n < 2) fail(ErrorKind::InvalidArgument, "paired t-test requires at least 2 runs");

  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += runs_a[i] - runs_b[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dev = (runs_a[i] - runs_b[i]) - mean;
    ss += dev * dev;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  TTestResult result;
  result.dof = n - 1;
  if (sd == 0.0) {
    if (mean == 0.0) {
      result.t_stat = 0.0;
      result.significant_95 = false;
      result.direction = TTestResult::Direction::Tie;
    } else {
      result.t_stat = mean > 0.0 ? std::numeric_limits<double>::infinity()
                                 : -std::numeric_limits<double>::infinity();
      result.infinite_t = true;
      result.significant_95 = true;
      result.direction =
          mean > 0.0 ? TTestResult::Direction::Better : TTestResult::Direction::Worse;
    }
    return result;
  }

  result.t_stat = mean / (sd / std::sqrt(static_cast<double>(n)));
  result.significant_95 = std::abs(result.t_stat) > t_critical_975(result.dof);
  if (!result.significant_95)
    result.direction = TTestResult::Direction::Tie;
  else
    result.direction =
        mean > 0.0 ? TTestResult::Direction::Better : TTestResult::Direction::Worse;
  return result;
}

std::pair<std::vector<double>, std::vector<double>> score(const RankerModel& model,
                                                          const LabeledDataset& ds) {
  if (model.dim() < ds.d)
    fail(ErrorKind::Dimension, "model dimension " + std::to_string(model.dim()) +
                                   " below dataset dimension " + std::to_string(ds.d));
  std::vector<double> pos, neg;
  pos.reserve(ds.num_pos());
  neg.reserve(ds.num_neg());
  for (const auto& x : ds.positives) pos.push_back(x.dot(model.w));
  for (const auto& x : ds.negatives) neg.push_back(x.dot(model.w));
  return {std::move(pos), std::move(neg)};
}

}  // namespace mba
