// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>

#include "camwsol/analysis.hpp"
#include "camwsol/dictionary.hpp"
#include "camwsol/error.hpp"
#include "camwsol/pca.hpp"
#include "camwsol/scoring.hpp"
#include "synthetic_dataset.hpp"

using namespace camwsol;
using testsupport::Rng;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// ---------------------------------------------------------------- CAM

struct CamInstance {
  FeatureMapStack f;
  ClassifierWeights w;
  std::size_t cls;
};

std::vector<CamInstance> cam_instances() {
  Rng rng(101);
  std::vector<CamInstance> out;
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = testsupport::pick(rng, 1, 32), h = testsupport::pick(rng, 1, 16), w = testsupport::pick(rng, 1, 16);
    const std::size_t classes = testsupport::pick(rng, 1, 5);
    out.push_back({testsupport::random_stack(rng, n, h, w, -2.0, 20.0),
                   ClassifierWeights(n, classes, testsupport::uniform(rng, n * classes, -0.5, 0.5)),
                   testsupport::pick(rng, 0, classes - 1)});
  }
  return out;
}

// CAM of the selected channels, or zeros when the filter selects none.
Heatmap cam_or_zero(const CamInstance& in, const WeightFilter& filter) {
  bool any = false;
  for (std::size_t n = 0; n < in.f.channels(); ++n) any |= filter.selects(in.w.at(n, in.cls));
  if (!any) return {in.f.height(), in.f.width(), std::vector<double>(in.f.plane_size(), 0.0), false};
  return cam(in.f, in.w, in.cls, filter);
}

Outcome cam_decomposition() {
  const auto instances = cam_instances();
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (const auto& in : instances) {
    const Heatmap all = cam(in.f, in.w, in.cls);
    const Heatmap pos = cam_or_zero(in, WeightFilter::positive_only());
    const Heatmap neg = cam_or_zero(in, WeightFilter::negative_only());
    for (std::size_t p = 0; p < all.values.size(); ++p) {
      worst = std::max(worst, std::abs(pos.values[p] + neg.values[p] - all.values[p]));
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst <= 1e-6 && secs < 1.0, "max |diff| " + fmt(worst) + ", " + fmt(secs) + " s"};
}

Outcome gap_logit_commutation() {
  double worst = 0.0;
  for (const auto& in : cam_instances()) {
    const Heatmap all = cam(in.f, in.w, in.cls);
    double mean = 0.0;
    for (double v : all.values) mean += v;
    mean /= static_cast<double>(all.values.size());
    double logit = 0.0, scale = 0.0;
    for (std::size_t n = 0; n < in.f.channels(); ++n) {
      double g = 0.0;
      for (std::size_t i = 0; i < in.f.height(); ++i)
        for (std::size_t j = 0; j < in.f.width(); ++j) g += in.f.at(n, i, j);
      g /= static_cast<double>(in.f.plane_size());
      logit += in.w.at(n, in.cls) * g;
      scale += std::abs(in.w.at(n, in.cls) * g);
    }
    worst = std::max(worst, std::abs(mean - logit) / std::max(scale, std::numeric_limits<double>::min()));
  }
  return {worst <= 1e-6, "max relative error " + fmt(worst)};
}

// ------------------------------------------------------------ scoring

// Largest 4-connected component (first in raster order on ties), its
// tight box, IoU against gt by pixel painting.
double oracle_largest_iou(const Heatmap& raw, double tau, const Box& gt) {
  double lo = raw.values[0], hi = raw.values[0];
  for (double v : raw.values) lo = std::min(lo, v), hi = std::max(hi, v);
  BinaryMap b{raw.height, raw.width, std::vector<std::uint8_t>(raw.values.size(), 0), tau};
  if (hi > lo) {
    for (std::size_t p = 0; p < raw.values.size(); ++p) b.bits[p] = (raw.values[p] - lo) / (hi - lo) >= tau;
  }
  const auto parts = testsupport::flood_fill_partition(b);
  const std::vector<std::size_t>* best = nullptr;
  for (const auto& part : parts) {
    if (!best || part.size() > best->size() || (part.size() == best->size() && part.front() < best->front())) best = &part;
  }
  if (!best) return 0.0;
  Box box{std::numeric_limits<std::int64_t>::max(), std::numeric_limits<std::int64_t>::max(), 0, 0};
  for (std::size_t p : *best) {
    const auto y = static_cast<std::int64_t>(p / raw.width), x = static_cast<std::int64_t>(p % raw.width);
    box = {std::min(box.x_min, x), std::min(box.y_min, y), std::max(box.x_max, x + 1), std::max(box.y_max, y + 1)};
  }
  return testsupport::pixel_iou(box, gt);
}

Outcome protocol_sanity() {
  Rng rng(303);
  std::vector<Heatmap> raw;
  std::vector<Box> gts;
  for (int k = 0; k < 50; ++k) {
    const auto x0 = static_cast<std::int64_t>(testsupport::pick(rng, 0, 16)), y0 = static_cast<std::int64_t>(testsupport::pick(rng, 0, 16));
    const Box gt{x0, y0, x0 + static_cast<std::int64_t>(testsupport::pick(rng, 4, 14)), y0 + static_cast<std::int64_t>(testsupport::pick(rng, 4, 14))};
    gts.push_back(gt);
    raw.push_back(testsupport::indicator(32, 32, gt));
  }
  auto samples_of = [&] {
    std::vector<EvalSample> s;
    for (std::size_t k = 0; k < raw.size(); ++k) s.push_back({"i" + std::to_string(k), normalize(raw[k]), {32, 32}, {gts[k]}});
    return s;
  };
  const auto perfect = samples_of();
  const double v1 = max_boxacc(perfect, {}, Variant::V1).max_boxacc;
  const double v2 = max_boxacc(perfect, {}, Variant::V2).max_boxacc;

  for (std::size_t k = 0; k < 10; ++k) raw[k].values = testsupport::uniform(rng, 32 * 32, 0.0, 1.0);
  const double corrupted = max_boxacc(samples_of(), {}, Variant::V1).max_boxacc;
  std::size_t oracle_hits = 0;
  for (double tau : uniform_tau_grid(101)) {
    std::size_t hits = 0;
    for (std::size_t k = 0; k < raw.size(); ++k) hits += oracle_largest_iou(raw[k], tau, gts[k]) >= 0.5;
    oracle_hits = std::max(oracle_hits, hits);
  }
  const double oracle = static_cast<double>(oracle_hits) / 50.0;
  return {v1 == 1.0 && v2 == 1.0 && corrupted == oracle,
          "perfect V1 " + fmt(v1) + " V2 " + fmt(v2) + "; corrupted V1 " + std::to_string(oracle_hits) + "/50, oracle " +
              fmt(oracle)};
}

Outcome affine_invariance() {
  Rng rng(404);
  const SweepConfig cfg;
  std::size_t compared = 0;
  bool same = true;
  for (int set = 0; set < 20; ++set) {
    std::vector<Heatmap> raw;
    std::vector<Box> gts;
    for (int k = 0; k < 8; ++k) {
      Heatmap h{12, 12, testsupport::uniform(rng, 144, 0.0, 0.4), false};
      const std::size_t x0 = testsupport::pick(rng, 0, 7), y0 = testsupport::pick(rng, 0, 7);
      for (std::size_t y = y0; y < y0 + 5; ++y)
        for (std::size_t x = x0; x < x0 + 5; ++x) h.values[y * 12 + x] += testsupport::uniform(rng, 1, 0.2, 1.0)[0];
      raw.push_back(h);
      const auto bx = static_cast<std::int64_t>(x0 * 4), by = static_cast<std::int64_t>(y0 * 4);
      gts.push_back({bx, by, bx + 20 - static_cast<std::int64_t>(testsupport::pick(rng, 0, 6)), by + 20});
    }
    auto curves = [&](double alpha, double beta) {
      std::vector<EvalSample> s;
      for (std::size_t k = 0; k < raw.size(); ++k) {
        Heatmap t = raw[k];
        for (double& v : t.values) v = alpha * v + beta;
        s.push_back({"h" + std::to_string(k), normalize(t), {48, 48}, {gts[k]}});
      }
      return std::pair{max_boxacc(s, cfg, Variant::V1).boxacc_curve, max_boxacc(s, cfg, Variant::V2).boxacc_curve};
    };
    const auto base = curves(1.0, 0.0);
    for (double alpha : {0.5, 3.0}) {
      for (double beta : {-1.0, 2.0}) {
        same = same && curves(alpha, beta) == base;
        ++compared;
      }
    }
  }
  return {same, std::to_string(compared) + " transformed sets, V1 and V2 curves compared at every tau"};
}

// ---------------------------------------------------- components, PCA

Outcome components_vs_flood_fill() {
  Rng rng(505);
  std::size_t mismatches = 0;
  for (int k = 0; k < 1000; ++k) {
    const BinaryMap b = testsupport::random_binary(rng, 16, 16, testsupport::uniform(rng, 1, 0.1, 0.9)[0]);
    std::set<std::vector<std::size_t>> got;
    for (const auto& c : connected_components(b)) got.insert(c.pixels);
    mismatches += got != testsupport::flood_fill_partition(b);
  }
  return {mismatches == 0, std::to_string(mismatches) + " of 1000 partitions differ"};
}

Outcome pca_properties() {
  Rng rng(606);
  double worst_rank1 = 1.0;
  for (int k = 0; k < 50; ++k) {
    const std::size_t n = testsupport::pick(rng, 2, 40), h = testsupport::pick(rng, 2, 12), w = testsupport::pick(rng, 2, 12);
    const auto a = testsupport::uniform(rng, n, -2.0, 2.0), s = testsupport::uniform(rng, h * w, 0.0, 5.0);
    const auto offset = testsupport::uniform(rng, n, -3.0, 3.0);
    std::vector<double> v(n * h * w);
    for (std::size_t c = 0; c < n; ++c)
      for (std::size_t p = 0; p < h * w; ++p) v[c * h * w + p] = a[c] * s[p] + offset[c];
    const double r = pca_pc1(FeatureMapStack(n, h, w, v)).contribution_rates.front();
    worst_rank1 = std::min(worst_rank1, r);
    if (r > 1.0) return {false, "rank-1 rate above 1"};
  }

  double worst_recon = 0.0;
  for (int k = 0; k < 50; ++k) {
    const FeatureMapStack f = testsupport::random_stack(rng, 8, 6, 6);
    const PcaBasis basis = pca_basis(f);
    for (std::size_t p = 0; p < 36; ++p) {
      std::vector<double> x(8), rec(8, 0.0);
      for (std::size_t c = 0; c < 8; ++c) x[c] = f.at(c, p / 6, p % 6) - basis.means[c];
      for (const auto& axis : basis.components) {
        double score = 0.0;
        for (std::size_t c = 0; c < 8; ++c) score += axis[c] * x[c];
        for (std::size_t c = 0; c < 8; ++c) rec[c] += score * axis[c];
      }
      for (std::size_t c = 0; c < 8; ++c) worst_recon = std::max(worst_recon, std::abs(rec[c] - x[c]));
    }
  }

  std::size_t sign_mismatch = 0, checked = 0;
  for (int k = 0; k < 60; ++k) {
    const std::size_t n = testsupport::pick(rng, 2, 64), h = testsupport::pick(rng, 3, 14), w = testsupport::pick(rng, 3, 14);
    const FeatureMapStack f = testsupport::random_stack(rng, n, h, w);
    const auto shift = testsupport::uniform(rng, n, -5.0, 5.0);
    std::vector<double> neg(f.values().begin(), f.values().end()), shifted = neg;
    for (std::size_t i = 0; i < neg.size(); ++i) {
      neg[i] = -neg[i];
      shifted[i] = neg[i] + shift[i / (h * w)];
    }
    const auto base = pc1_localize(f).binary_map.bits;
    sign_mismatch += pc1_localize(FeatureMapStack(n, h, w, neg)).binary_map.bits != base;
    sign_mismatch += pc1_localize(FeatureMapStack(n, h, w, shifted)).binary_map.bits != base;
    checked += 2;
  }
  const bool ok = worst_rank1 >= 1.0 - 1e-6 && worst_recon <= 1e-5 && sign_mismatch == 0;
  return {ok, "min rank-1 rate " + fmt(worst_rank1) + ", reconstruction " + fmt(worst_recon) + ", sign flips " +
                  std::to_string(sign_mismatch) + "/" + std::to_string(checked)};
}

Outcome pc1_edge_rule() {
  std::size_t brute = 0;
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t j = 0; j < 12; ++j) brute += i == 0 || j == 0 || i == 11 || j == 11;

  // Centered blob rows 4..7, columns 3..8, carried by every channel with a
  // channel-specific gain and offset.
  Rng rng(707);
  const std::size_t n = 16;
  std::vector<double> v(n * 144);
  for (std::size_t c = 0; c < n; ++c) {
    const double gain = testsupport::uniform(rng, 1, 0.5, 3.0)[0] * (c % 3 ? 1.0 : -1.0);
    const double offset = testsupport::uniform(rng, 1, -4.0, 4.0)[0];
    for (std::size_t i = 0; i < 12; ++i)
      for (std::size_t j = 0; j < 12; ++j) {
        const bool blob = i >= 4 && i < 8 && j >= 3 && j < 9;
        v[c * 144 + i * 12 + j] = offset + (blob ? gain : 0.0) + testsupport::uniform(rng, 1, -0.01, 0.01)[0];
      }
  }
  const Pc1Localization loc = pc1_localize(FeatureMapStack(n, 12, 12, v));
  const auto comps = connected_components(loc.binary_map);
  const bool blob_ok = comps.size() == 1 && comps[0].box == Box{3, 4, 9, 8} && comps[0].pixel_count == 24;
  const bool ok = edge_pixel_count(12, 12) == 44 && brute == 44 && blob_ok;
  return {ok, "edge pixels " + std::to_string(edge_pixel_count(12, 12)) + ", blob box " +
                  (comps.empty() ? std::string("none")
                                 : std::to_string(comps[0].box.x_min) + "," + std::to_string(comps[0].box.y_min) + "," +
                                       std::to_string(comps[0].box.x_max) + "," + std::to_string(comps[0].box.y_max))};
}

// ---------------------------------------------------------------- ERF

Outcome erf_properties() {
  bool delta_ok = true;
  for (auto [h, w] : std::vector<std::pair<std::size_t, std::size_t>>{{7, 7}, {12, 12}, {31, 17}, {224, 224}}) {
    std::vector<double> m(h * w, 0.0);
    m[(h / 2) * w + w / 2] = 1.0;
    delta_ok = delta_ok && erf_curve({{h, w}, DType::F64, m}).auc == 1.0 / static_cast<double>(h * w);
  }

  // Uniform map: the qualifying square is the smallest odd side s with
  // s*s >= t*H*W, counted directly.
  bool uniform_ok = true;
  for (std::size_t side : {5u, 9u, 15u}) {
    const ErfCurve c = erf_curve({{side, side}, DType::F64, std::vector<double>(side * side, 2.0)});
    for (std::size_t k = 0; k < c.thresholds.size(); ++k) {
      std::size_t s = 1;
      while (static_cast<double>(s * s) < c.thresholds[k] * static_cast<double>(side * side)) ++s;
      const double expected = static_cast<double>(s * s) / static_cast<double>(side * side);
      uniform_ok = uniform_ok && c.area_ratios[k] == expected;
    }
  }

  Rng rng(808);
  bool monotone = true;
  for (int k = 0; k < 100; ++k) {
    const std::size_t h = testsupport::pick(rng, 1, 20), w = testsupport::pick(rng, 1, 20);
    auto m = testsupport::uniform(rng, h * w, 0.0, 1.0);
    for (ErfRegion region : {ErfRegion::CenteredSquare, ErfRegion::TopPixels}) {
      const ErfCurve c = erf_curve({{h, w}, DType::F64, m}, default_erf_thresholds(), region);
      for (std::size_t t = 1; t < c.area_ratios.size(); ++t) monotone = monotone && c.area_ratios[t] >= c.area_ratios[t - 1];
    }
  }
  return {delta_ok && uniform_ok && monotone, std::string("delta ") + (delta_ok ? "exact" : "off") + ", uniform " +
                                                  (uniform_ok ? "exact" : "off") + ", monotone " +
                                                  (monotone ? "yes" : "no")};
}

// --------------------------------------------------------- dictionary

Outcome omp_complexity() {
  Rng rng(909);
  const std::size_t dim = 36;
  std::vector<std::vector<double>> atoms;
  for (int k = 0; k < 20; ++k) atoms.push_back(testsupport::uniform(rng, dim, -1.0, 1.0));
  auto synth = [&](std::size_t count) {
    std::vector<std::vector<double>> maps;
    for (std::size_t m = 0; m < count; ++m) {
      auto x = testsupport::uniform(rng, dim, -0.02, 0.02);
      for (int s = 0; s < 3; ++s) {
        const auto& a = atoms[testsupport::pick(rng, 0, atoms.size() - 1)];
        const double c = testsupport::uniform(rng, 1, 0.5, 2.0)[0];
        for (std::size_t i = 0; i < dim; ++i) x[i] += c * a[i];
      }
      maps.push_back(std::move(x));
    }
    return maps;
  };
  const auto test = synth(30);
  auto with_tests = test;
  for (int k = 0; k < 10; ++k) with_tests.push_back(testsupport::uniform(rng, dim, -1.0, 1.0));
  const double contained = reconstruction_mse(Dictionary(with_tests), test, 5);

  const auto train = synth(100);
  const std::size_t counts[] = {2, 4, 8, 16, 32};
  const ComplexityCurve curve = dictionary_complexity(train, test, counts, {});
  bool nonincreasing = true;
  std::string errs;
  for (std::size_t k = 0; k < curve.reconstruction_errors.size(); ++k) {
    if (k) nonincreasing = nonincreasing && curve.reconstruction_errors[k] <= curve.reconstruction_errors[k - 1];
    errs += (k ? " " : "") + fmt(curve.reconstruction_errors[k]);
  }
  return {contained <= 1e-8 && nonincreasing, "contained MSE " + fmt(contained) + "; K=2..32: " + errs};
}

// ------------------------------------------------------------ formats

Outcome formats() {
  const fs::path dir = testsupport::scratch_dir("acceptance_formats");
  Rng rng(1010);
  std::size_t mismatches = 0;
  for (int k = 0; k < 1000; ++k) {
    Tensor t;
    t.dtype = k % 2 ? DType::F32 : DType::F64;
    const std::size_t rank = testsupport::pick(rng, 1, 4);
    std::size_t count = 1;
    for (std::size_t r = 0; r < rank; ++r) {
      t.shape.push_back(testsupport::pick(rng, 1, 6));
      count *= t.shape.back();
    }
    const bool f32 = t.dtype == DType::F32;
    const double specials[] = {0.0, -0.0, f32 ? 1e-40 : 1e-310, f32 ? -3e38 : -1e300, 1.0 / 3.0, 7.0};
    for (std::size_t i = 0; i < count; ++i) {
      const double v = i % 7 == 0 ? specials[testsupport::pick(rng, 0, 5)]
                                  : std::ldexp(testsupport::uniform(rng, 1, -1.0, 1.0)[0], static_cast<int>(testsupport::pick(rng, 0, 80)) - 40);
      t.data.push_back(f32 ? static_cast<double>(static_cast<float>(v)) : v);
    }
    const fs::path p = dir / ("t" + std::to_string(k) + ".npy");
    write_tensor(p, t);
    mismatches += !bit_equal(load_tensor(p), t);
  }

  auto code_of = [](const fs::path& p) -> std::string {
    try {
      load_tensor(p);
    } catch (const Error& e) {
      return std::string(to_string(e.code()));
    }
    return "accepted";
  };
  auto put = [](const fs::path& p, const std::vector<std::byte>& bytes) {
    testsupport::write_text(p, std::string(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  };
  const std::string dict = "{'descr': '<f8', 'fortran_order': False, 'shape': (2, 2), }";
  put(dir / "bad_magic.npy", testsupport::raw_npy(dict, testsupport::f64_payload({1, 2, 3, 4}), "\x93NUMPZ"));
  put(dir / "short.npy", testsupport::raw_npy(dict, testsupport::f64_payload({1, 2, 3})));
  put(dir / "nan.npy", testsupport::raw_npy(dict, testsupport::f64_payload({1, std::nan(""), 3, 4})));
  const std::string bad_magic = code_of(dir / "bad_magic.npy"), short_payload = code_of(dir / "short.npy"),
                    nan = code_of(dir / "nan.npy");
  const bool ok = mismatches == 0 && bad_magic == "BadMagic" && short_payload == "HeaderShapeMismatch" &&
                  nan == "NonFiniteData";
  return {ok, std::to_string(mismatches) + "/1000 round-trip mismatches; bad magic -> " + bad_magic +
                  ", short payload -> " + short_payload + ", NaN -> " + nan};
}

// -------------------------------------------------------- determinism

int run(const std::string& args) {
  const std::string cmd = std::string(CAMWSOL_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
  const fs::path dir = testsupport::scratch_dir("acceptance_determinism");
  const auto ds = testsupport::write_synthetic_dataset(dir / "data", 1111, {10, 30, 10, 16, 12, 4, true});
  std::vector<fs::path> runs;
  int failures = 0;
  for (const char* threads : {"1", "8", "1", "8"}) {
    const fs::path out = dir / ("run" + std::to_string(runs.size()));
    const std::string common = "--manifest " + ds.manifest.string() + " --threads " + threads;
    failures += run(common + " --out " + (out / "cam").string() + " cam") != 0;
    failures += run(common + " --out " + (out / "v1").string() + " score --heatmaps " + (out / "cam").string()) != 0;
    failures += run(common + " --out " + (out / "v2").string() + " score --variant v2 --heatmaps " + (out / "cam").string()) != 0;
    runs.push_back(out);
  }
  std::vector<fs::path> files{"cam/index.json", "v1/report.json", "v1/curve.csv", "v2/report.json", "v2/curve.csv"};
  for (const auto& id : ds.test) files.push_back("cam/" + id + ".cam.npy");
  std::size_t differing = 0;
  for (const auto& f : files) {
    const std::string ref = testsupport::read_text(runs[0] / f);
    for (std::size_t r = 1; r < runs.size(); ++r) differing += ref.empty() || testsupport::read_text(runs[r] / f) != ref;
  }
  return {failures == 0 && differing == 0, std::to_string(files.size()) + " files x 4 runs, " +
                                               std::to_string(differing) + " differ, " + std::to_string(failures) +
                                               " command failures"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"CAM decomposition identity", cam_decomposition},
      {"GAP/logit commutation", gap_logit_commutation},
      {"protocol sanity", protocol_sanity},
      {"affine invariance", affine_invariance},
      {"connected components vs flood fill", components_vs_flood_fill},
      {"PCA rates, reconstruction, sign invariance", pca_properties},
      {"PC1 edge rule", pc1_edge_rule},
      {"ERF", erf_properties},
      {"OMP complexity", omp_complexity},
      {"formats", formats},
      {"end-to-end determinism", determinism},
  };
  int failed = 0;
  const auto suite_start = std::chrono::steady_clock::now();
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2zu %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                o.detail.c_str(), secs);
    failed += !o.pass;
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - suite_start).count();
  std::printf("%zu/%zu criteria passed in %.1f s\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size(), total);
  return failed ? 1 : 0;
}
