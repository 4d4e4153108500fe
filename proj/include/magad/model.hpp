#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "magad/core.hpp"
#include "magad/graph.hpp"

namespace magad {

struct TrainConfig {
  double alpha = 1.0;  // node-classification loss weight
  double beta = 1.0;   // anomaly-detection loss weight
  double phi = 1.0;    // predictor weight in the hybrid score
  double learning_rate = 0.01;
  int hidden_dim = 64;
  int encoder_layers = 1;
  int max_epochs = 300;
  int patience = 20;

  void validate() const {
    if (alpha <= 0 || beta <= 0 || phi <= 0)
      throw std::runtime_error("train: alpha, beta, phi must be positive");
    if (learning_rate <= 0) throw std::runtime_error("train: learning rate must be positive");
    if (hidden_dim < 1) throw std::runtime_error("train: hidden_dim must be >= 1");
    if (encoder_layers < 1) throw std::runtime_error("train: encoder_layers must be >= 1");
    if (max_epochs < 1) throw std::runtime_error("train: max_epochs must be >= 1");
    if (patience < 1) throw std::runtime_error("train: patience must be >= 1");
  }
};

/// All trainable parameters plus Adam moments. The encoder is a stack of
/// graph-convolution layers with rectifier activations; the classifier is one
/// more graph convolution with a row softmax; the predictor is a linear map
/// through a sigmoid.
struct ModelState {
  std::vector<Matrix> encoder_weights;  // layer 0: attr_dim x hidden, then hidden x hidden
  Matrix classifier_weight;             // hidden x C
  Vec predictor_weight;                 // hidden
  double predictor_bias = 0.0;

  std::vector<Matrix> m_encoder, v_encoder;
  Matrix m_classifier, v_classifier;
  Vec m_predictor, v_predictor;
  double m_bias = 0.0, v_bias = 0.0;
  long step_count = 0;

  int hidden_dim() const { return static_cast<int>(encoder_weights.back().cols); }
  int num_classes() const { return static_cast<int>(classifier_weight.cols); }

  void check_finite(const std::string& context) const {
    auto scan = [&](const std::vector<double>& xs) {
      for (double v : xs)
        if (!std::isfinite(v))
          throw std::runtime_error(context + ": non-finite parameter value");
    };
    for (const auto& w : encoder_weights) scan(w.data);
    scan(classifier_weight.data);
    scan(predictor_weight);
    if (!std::isfinite(predictor_bias))
      throw std::runtime_error(context + ": non-finite parameter value");
  }
};

namespace detail {

inline Matrix glorot_matrix(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  Matrix w(fan_in, fan_out);
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : w.data) v = (2.0 * rng.uniform() - 1.0) * limit;
  return w;
}

}  // namespace detail

inline ModelState init_model(int attr_dim, int hidden_dim, int num_classes,
                             int encoder_layers, Rng& rng) {
  if (attr_dim < 1 || hidden_dim < 1 || num_classes < 1 || encoder_layers < 1)
    throw std::invalid_argument("init_model: dimensions must be positive");
  ModelState s;
  int in_dim = attr_dim;
  for (int l = 0; l < encoder_layers; ++l) {
    s.encoder_weights.push_back(detail::glorot_matrix(
        static_cast<std::size_t>(in_dim), static_cast<std::size_t>(hidden_dim), rng));
    in_dim = hidden_dim;
  }
  s.classifier_weight = detail::glorot_matrix(static_cast<std::size_t>(hidden_dim),
                                              static_cast<std::size_t>(num_classes), rng);
  s.predictor_weight.resize(static_cast<std::size_t>(hidden_dim));
  const double limit = std::sqrt(6.0 / static_cast<double>(hidden_dim + 1));
  for (double& v : s.predictor_weight) v = (2.0 * rng.uniform() - 1.0) * limit;
  s.predictor_bias = 0.0;

  for (const auto& w : s.encoder_weights) {
    s.m_encoder.emplace_back(w.rows, w.cols, 0.0);
    s.v_encoder.emplace_back(w.rows, w.cols, 0.0);
  }
  s.m_classifier = Matrix(s.classifier_weight.rows, s.classifier_weight.cols, 0.0);
  s.v_classifier = Matrix(s.classifier_weight.rows, s.classifier_weight.cols, 0.0);
  s.m_predictor.assign(s.predictor_weight.size(), 0.0);
  s.v_predictor.assign(s.predictor_weight.size(), 0.0);
  return s;
}

/// Everything the backward pass needs from one forward evaluation.
struct ForwardCache {
  std::vector<Matrix> layer_in;   // propagated input of each encoder layer
  std::vector<Matrix> pre_act;    // pre-activation of each encoder layer
  Matrix embeddings;              // H, final encoder output
  Matrix cls_in;                  // propagated H feeding the classifier
  Matrix logits;
  Matrix probs;                   // Z, row-stochastic
  Vec pre_sigmoid;                // a
  Vec anomaly;                    // p = sigmoid(a)
};

inline void softmax_rows(const Matrix& logits, Matrix& probs) {
  probs.rows = logits.rows;
  probs.cols = logits.cols;
  probs.data.resize(logits.data.size());
  for (std::size_t i = 0; i < logits.rows; ++i) {
    const double* in = logits.row(i);
    double* out = probs.row(i);
    double mx = in[0];
    for (std::size_t j = 1; j < logits.cols; ++j) mx = std::max(mx, in[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < logits.cols; ++j) {
      out[j] = std::exp(in[j] - mx);
      sum += out[j];
    }
    for (std::size_t j = 0; j < logits.cols; ++j) out[j] /= sum;
  }
}

inline ForwardCache model_forward(const NormalizedAdjacency& gn, const Matrix& features,
                                  const ModelState& s) {
  ForwardCache f;
  const Matrix* h = &features;
  Matrix current;
  for (const auto& w : s.encoder_weights) {
    f.layer_in.push_back(spmm(gn.matrix, *h));
    Matrix pre = matmul(f.layer_in.back(), w);
    f.pre_act.push_back(pre);
    for (double& v : pre.data) v = v > 0.0 ? v : 0.0;
    current = std::move(pre);
    h = &current;
  }
  f.embeddings = std::move(current);

  f.cls_in = spmm(gn.matrix, f.embeddings);
  f.logits = matmul(f.cls_in, s.classifier_weight);
  softmax_rows(f.logits, f.probs);

  const std::size_t n = f.embeddings.rows;
  const std::size_t hdim = f.embeddings.cols;
  f.pre_sigmoid.resize(n);
  f.anomaly.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = f.embeddings.row(i);
    double acc = s.predictor_bias;
    for (std::size_t k = 0; k < hdim; ++k) acc += row[k] * s.predictor_weight[k];
    f.pre_sigmoid[i] = acc;
    f.anomaly[i] = 1.0 / (1.0 + std::exp(-acc));
  }
  return f;
}

inline Matrix encoder_forward(const NormalizedAdjacency& gn, const Matrix& features,
                              const ModelState& s) {
  return model_forward(gn, features, s).embeddings;
}

inline Matrix classify(const NormalizedAdjacency& gn, const Matrix& embeddings,
                       const ModelState& s) {
  Matrix probs;
  softmax_rows(matmul(spmm(gn.matrix, embeddings), s.classifier_weight), probs);
  return probs;
}

inline Vec entropy_scores(const Matrix& probs) {
  Vec e(probs.rows, 0.0);
  for (std::size_t i = 0; i < probs.rows; ++i) {
    const double* row = probs.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < probs.cols; ++j) acc -= xlogx(row[j]);
    e[i] = acc;
  }
  return e;
}

inline Vec predict_anomaly(const Matrix& embeddings, const ModelState& s) {
  Vec p(embeddings.rows);
  for (std::size_t i = 0; i < embeddings.rows; ++i) {
    const double* row = embeddings.row(i);
    double acc = s.predictor_bias;
    for (std::size_t k = 0; k < embeddings.cols; ++k)
      acc += row[k] * s.predictor_weight[k];
    p[i] = 1.0 / (1.0 + std::exp(-acc));
  }
  return p;
}

/// s = znorm(e) + phi * znorm(p); statistics taken over the supplied vectors.
inline Vec hybrid_score(const Vec& entropy, const Vec& anomaly, double phi) {
  if (entropy.size() != anomaly.size())
    throw std::invalid_argument("hybrid_score: length mismatch");
  Vec ze = znorm(entropy);
  const Vec zp = znorm(anomaly);
  for (std::size_t i = 0; i < ze.size(); ++i) ze[i] += phi * zp[i];
  return ze;
}

/// Per-node scores derived from one forward pass. The confidence fields and
/// the informativeness column are filled by the selection step; the hybrid
/// score uses z-statistics over all nodes.
struct ScoreBundle {
  Matrix probs;         // Z
  Matrix embeddings;    // H
  Vec entropy;          // e
  Vec anomaly;          // p
  Vec conf_classifier;  // c_N = znorm(e)
  Vec conf_predictor;   // c_A = znorm(p)
  Vec conf_difference;  // d = |c_A - c_N|
  Vec hybrid;           // s = znorm(e) + phi znorm(p)
  Vec informativeness;
};

inline ScoreBundle compute_scores(const NormalizedAdjacency& gn, const Matrix& features,
                                  const ModelState& s, double phi) {
  ForwardCache f = model_forward(gn, features, s);
  ScoreBundle b;
  b.probs = std::move(f.probs);
  b.embeddings = std::move(f.embeddings);
  b.entropy = entropy_scores(b.probs);
  b.anomaly = std::move(f.anomaly);
  b.hybrid = hybrid_score(b.entropy, b.anomaly, phi);
  return b;
}

// ---------------------------------------------------------------------------
// Losses
// ---------------------------------------------------------------------------

constexpr double kLogFloor = 1e-300;

inline double loss_nc(const Matrix& probs, const std::vector<int>& class_labels,
                      const std::vector<int>& labeled_ids) {
  if (labeled_ids.empty()) throw std::runtime_error("loss_nc: empty labeled set");
  double acc = 0.0;
  for (int i : labeled_ids) {
    const int y = class_labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= static_cast<int>(probs.cols))
      throw std::runtime_error("loss_nc: node " + std::to_string(i) +
                               " lacks a valid class label");
    acc -= std::log(std::max(probs(static_cast<std::size_t>(i), static_cast<std::size_t>(y)),
                             kLogFloor));
  }
  return acc / static_cast<double>(labeled_ids.size());
}

/// Anomaly-to-normal ratio used to weight positives; zero when the labeled
/// set has no anomalies yet.
inline double anomaly_weight(const std::vector<std::int8_t>& ad_labels,
                             const std::vector<int>& labeled_ids) {
  long pos = 0, neg = 0;
  for (int i : labeled_ids) {
    const std::int8_t y = ad_labels[static_cast<std::size_t>(i)];
    if (y == 1) ++pos;
    else if (y == 0) ++neg;
    else throw std::runtime_error("loss_ad: node " + std::to_string(i) + " is unlabeled");
  }
  if (pos == 0) return 0.0;
  if (neg == 0) throw std::runtime_error("loss_ad: labeled set has no normal nodes");
  return static_cast<double>(pos) / static_cast<double>(neg);
}

inline double loss_ad(const Vec& anomaly, const std::vector<std::int8_t>& ad_labels,
                      const std::vector<int>& labeled_ids) {
  if (labeled_ids.empty()) throw std::runtime_error("loss_ad: empty labeled set");
  const double gamma = anomaly_weight(ad_labels, labeled_ids);
  double acc = 0.0;
  for (int i : labeled_ids) {
    const double p = anomaly[static_cast<std::size_t>(i)];
    if (ad_labels[static_cast<std::size_t>(i)] == 1)
      acc += gamma * std::log(std::max(p, kLogFloor));
    else
      acc += std::log(std::max(1.0 - p, kLogFloor));
  }
  return -acc / static_cast<double>(labeled_ids.size());
}

/// Mean classification entropy over labeled normals minus mean entropy over
/// labeled anomalies; an empty side contributes zero.
inline double loss_un(const Matrix& probs, const std::vector<int>& normal_ids,
                      const std::vector<int>& anomaly_ids) {
  auto mean_entropy = [&](const std::vector<int>& ids) {
    if (ids.empty()) return 0.0;
    double acc = 0.0;
    for (int i : ids) {
      const double* row = probs.row(static_cast<std::size_t>(i));
      for (std::size_t j = 0; j < probs.cols; ++j) acc -= xlogx(row[j]);
    }
    return acc / static_cast<double>(ids.size());
  };
  return mean_entropy(normal_ids) - mean_entropy(anomaly_ids);
}

struct LossParts {
  double nc = 0.0;
  double ad = 0.0;
  double un = 0.0;
  double gamma = 0.0;
};

inline double total_loss(const LossParts& parts, double alpha, double beta) {
  return alpha * parts.nc + beta * parts.ad + parts.un;
}

/// Label subsets feeding the three loss terms.
struct Supervision {
  std::vector<int> class_labeled;  // fixed pre-labeled classification nodes
  std::vector<int> ad_labeled;     // everything with an anomaly label
  std::vector<int> normal_ids;     // labeled normals
  std::vector<int> anomaly_ids;    // labeled anomalies
};

struct LossReport {
  LossParts parts;
  double total = 0.0;
};

inline LossReport compute_losses(const ForwardCache& f, const std::vector<int>& class_labels,
                                 const std::vector<std::int8_t>& ad_labels,
                                 const Supervision& sup, const TrainConfig& cfg,
                                 bool use_uncertainty_loss) {
  LossReport r;
  r.parts.nc = loss_nc(f.probs, class_labels, sup.class_labeled);
  r.parts.ad = loss_ad(f.anomaly, ad_labels, sup.ad_labeled);
  r.parts.gamma = anomaly_weight(ad_labels, sup.ad_labeled);
  r.parts.un = use_uncertainty_loss ? loss_un(f.probs, sup.normal_ids, sup.anomaly_ids) : 0.0;
  r.total = total_loss(r.parts, cfg.alpha, cfg.beta);
  return r;
}

// ---------------------------------------------------------------------------
// Backward pass and optimizer
// ---------------------------------------------------------------------------

struct Gradients {
  std::vector<Matrix> encoder;
  Matrix classifier;
  Vec predictor;
  double bias = 0.0;
};

inline Gradients backward(const NormalizedAdjacency& gn, const ForwardCache& f,
                          const ModelState& s, const std::vector<int>& class_labels,
                          const std::vector<std::int8_t>& ad_labels, const Supervision& sup,
                          const TrainConfig& cfg, bool use_uncertainty_loss) {
  const std::size_t n = f.probs.rows;
  const std::size_t C = f.probs.cols;
  const std::size_t h = f.embeddings.cols;

  // d total / d logits
  Matrix dlogits(n, C, 0.0);
  {
    const double w = cfg.alpha / static_cast<double>(sup.class_labeled.size());
    for (int i : sup.class_labeled) {
      const int y = class_labels[static_cast<std::size_t>(i)];
      const double* z = f.probs.row(static_cast<std::size_t>(i));
      double* d = dlogits.row(static_cast<std::size_t>(i));
      for (std::size_t k = 0; k < C; ++k) d[k] += w * (z[k] - (static_cast<int>(k) == y));
    }
  }
  if (use_uncertainty_loss) {
    // d entropy / d logit_k = -z_k (ln z_k + e)
    auto add_entropy_grad = [&](const std::vector<int>& ids, double coef) {
      if (ids.empty()) return;
      const double c = coef / static_cast<double>(ids.size());
      for (int i : ids) {
        const double* z = f.probs.row(static_cast<std::size_t>(i));
        double e = 0.0;
        for (std::size_t k = 0; k < C; ++k) e -= xlogx(z[k]);
        double* d = dlogits.row(static_cast<std::size_t>(i));
        for (std::size_t k = 0; k < C; ++k) {
          if (z[k] > 0.0) d[k] += c * (-z[k] * (std::log(z[k]) + e));
        }
      }
    };
    add_entropy_grad(sup.normal_ids, 1.0);
    add_entropy_grad(sup.anomaly_ids, -1.0);
  }

  // d total / d pre_sigmoid
  Vec da(n, 0.0);
  {
    const double gamma = anomaly_weight(ad_labels, sup.ad_labeled);
    const double w = cfg.beta / static_cast<double>(sup.ad_labeled.size());
    for (int i : sup.ad_labeled) {
      const double p = f.anomaly[static_cast<std::size_t>(i)];
      if (ad_labels[static_cast<std::size_t>(i)] == 1)
        da[static_cast<std::size_t>(i)] += -w * gamma * (1.0 - p);
      else
        da[static_cast<std::size_t>(i)] += w * p;
    }
  }

  Gradients g;
  g.classifier = transpose_matmul(f.cls_in, dlogits);
  Matrix dcls_in = matmul_transposed_b(dlogits, s.classifier_weight);
  Matrix dh = spmm(gn.matrix, dcls_in);  // symmetric propagation

  g.predictor.assign(h, 0.0);
  g.bias = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = da[i];
    if (d == 0.0) continue;
    g.bias += d;
    const double* hr = f.embeddings.row(i);
    double* dhr = dh.row(i);
    for (std::size_t k = 0; k < h; ++k) {
      g.predictor[k] += d * hr[k];
      dhr[k] += d * s.predictor_weight[k];
    }
  }

  const int layers = static_cast<int>(s.encoder_weights.size());
  g.encoder.resize(static_cast<std::size_t>(layers));
  Matrix dcur = std::move(dh);
  for (int l = layers - 1; l >= 0; --l) {
    const Matrix& pre = f.pre_act[static_cast<std::size_t>(l)];
    for (std::size_t i = 0; i < dcur.data.size(); ++i)
      if (pre.data[i] <= 0.0) dcur.data[i] = 0.0;
    g.encoder[static_cast<std::size_t>(l)] =
        transpose_matmul(f.layer_in[static_cast<std::size_t>(l)], dcur);
    if (l > 0) {
      Matrix dprev = matmul_transposed_b(dcur, s.encoder_weights[static_cast<std::size_t>(l)]);
      dcur = spmm(gn.matrix, dprev);
    }
  }
  return g;
}

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

namespace detail {

inline void adam_update(double* theta, double* m, double* v, const double* grad,
                        std::size_t count, double lr, double bc1, double bc2) {
  for (std::size_t i = 0; i < count; ++i) {
    m[i] = kAdamBeta1 * m[i] + (1.0 - kAdamBeta1) * grad[i];
    v[i] = kAdamBeta2 * v[i] + (1.0 - kAdamBeta2) * grad[i] * grad[i];
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    theta[i] -= lr * mhat / (std::sqrt(vhat) + kAdamEps);
  }
}

}  // namespace detail

inline void adam_step(ModelState& s, const Gradients& g, double lr) {
  ++s.step_count;
  const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(s.step_count));
  const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(s.step_count));
  for (std::size_t l = 0; l < s.encoder_weights.size(); ++l) {
    detail::adam_update(s.encoder_weights[l].data.data(), s.m_encoder[l].data.data(),
                        s.v_encoder[l].data.data(), g.encoder[l].data.data(),
                        s.encoder_weights[l].data.size(), lr, bc1, bc2);
  }
  detail::adam_update(s.classifier_weight.data.data(), s.m_classifier.data.data(),
                      s.v_classifier.data.data(), g.classifier.data.data(),
                      s.classifier_weight.data.size(), lr, bc1, bc2);
  detail::adam_update(s.predictor_weight.data(), s.m_predictor.data(), s.v_predictor.data(),
                      g.predictor.data(), s.predictor_weight.size(), lr, bc1, bc2);
  detail::adam_update(&s.predictor_bias, &s.m_bias, &s.v_bias, &g.bias, 1, lr, bc1, bc2);
}

/// One full training step: forward, losses, analytic gradients, Adam update.
/// Throws if any gradient or parameter turns non-finite.
inline LossReport backward_and_step(ModelState& s, const NormalizedAdjacency& gn,
                                    const Matrix& features,
                                    const std::vector<int>& class_labels,
                                    const std::vector<std::int8_t>& ad_labels,
                                    const Supervision& sup, const TrainConfig& cfg,
                                    bool use_uncertainty_loss = true) {
  const ForwardCache f = model_forward(gn, features, s);
  const LossReport report =
      compute_losses(f, class_labels, ad_labels, sup, cfg, use_uncertainty_loss);
  if (!std::isfinite(report.total))
    throw std::runtime_error("train step " + std::to_string(s.step_count + 1) +
                             ": non-finite loss");
  const Gradients g =
      backward(gn, f, s, class_labels, ad_labels, sup, cfg, use_uncertainty_loss);
  auto scan = [&](const std::vector<double>& xs) {
    for (double v : xs)
      if (!std::isfinite(v))
        throw std::runtime_error("train step " + std::to_string(s.step_count + 1) +
                                 ": non-finite gradient");
  };
  for (const auto& m : g.encoder) scan(m.data);
  scan(g.classifier.data);
  scan(g.predictor);
  if (!std::isfinite(g.bias))
    throw std::runtime_error("train step " + std::to_string(s.step_count + 1) +
                             ": non-finite gradient");
  adam_step(s, g, cfg.learning_rate);
  s.check_finite("train step " + std::to_string(s.step_count));
  return report;
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

inline nlohmann::json matrix_to_json(const Matrix& m) {
  return {{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

inline Matrix matrix_from_json(const nlohmann::json& j) {
  Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  m.data = j.at("data").get<std::vector<double>>();
  if (m.data.size() != m.rows * m.cols)
    throw std::runtime_error("checkpoint: matrix payload size mismatch");
  return m;
}

inline void save_checkpoint(const ModelState& s, const std::string& path) {
  nlohmann::json j;
  j["version"] = 1;
  j["step_count"] = s.step_count;
  for (std::size_t l = 0; l < s.encoder_weights.size(); ++l) {
    j["encoder"].push_back(matrix_to_json(s.encoder_weights[l]));
    j["m_encoder"].push_back(matrix_to_json(s.m_encoder[l]));
    j["v_encoder"].push_back(matrix_to_json(s.v_encoder[l]));
  }
  j["classifier"] = matrix_to_json(s.classifier_weight);
  j["m_classifier"] = matrix_to_json(s.m_classifier);
  j["v_classifier"] = matrix_to_json(s.v_classifier);
  j["predictor_w"] = s.predictor_weight;
  j["m_predictor"] = s.m_predictor;
  j["v_predictor"] = s.v_predictor;
  j["predictor_b"] = s.predictor_bias;
  j["m_bias"] = s.m_bias;
  j["v_bias"] = s.v_bias;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path);
  out << j.dump() << "\n";
}

inline ModelState load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  nlohmann::json j;
  in >> j;
  if (j.at("version").get<int>() != 1)
    throw std::runtime_error("checkpoint: unsupported version");
  ModelState s;
  s.step_count = j.at("step_count").get<long>();
  for (const auto& m : j.at("encoder")) s.encoder_weights.push_back(matrix_from_json(m));
  for (const auto& m : j.at("m_encoder")) s.m_encoder.push_back(matrix_from_json(m));
  for (const auto& m : j.at("v_encoder")) s.v_encoder.push_back(matrix_from_json(m));
  s.classifier_weight = matrix_from_json(j.at("classifier"));
  s.m_classifier = matrix_from_json(j.at("m_classifier"));
  s.v_classifier = matrix_from_json(j.at("v_classifier"));
  s.predictor_weight = j.at("predictor_w").get<Vec>();
  s.m_predictor = j.at("m_predictor").get<Vec>();
  s.v_predictor = j.at("v_predictor").get<Vec>();
  s.predictor_bias = j.at("predictor_b").get<double>();
  s.m_bias = j.at("m_bias").get<double>();
  s.v_bias = j.at("v_bias").get<double>();
  s.check_finite("checkpoint load");
  return s;
}

}  // namespace magad
