#include "ahdd/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace ahdd {

void TrainingConfig::validate() const {
  require(lambda_sim >= 0.0 && lambda_dis >= 0.0, "config: lambda weights must be >= 0");
  require(learning_rate >= 0.0, "config: learning_rate must be >= 0");
  require(epochs >= 1, "config: epochs must be >= 1");
  require(batch_size >= 1, "config: batch_size must be >= 1");
  require(threshold > 0.0 && threshold < 1.0, "config: threshold must be in (0,1)");
  require(emb_dim >= 1 && hidden_dim >= 1, "config: dimensions must be positive");
  require(max_length >= 1, "config: max_length must be >= 1");
}

ModelConfig TrainingConfig::model_config() const {
  ModelConfig mc;
  mc.emb_dim = emb_dim;
  mc.hidden_dim = hidden_dim;
  mc.encoder = encoder;
  mc.conv_kernel_width = conv_kernel_width;
  mc.desc_aware_attention = !no_desc_attention;
  mc.desc_aware_output = !no_desc_output;
  mc.seed = seed;
  return mc;
}

ForwardOptions TrainingConfig::forward_options() const {
  ForwardOptions fo;
  fo.lambda_sim = lambda_sim;
  fo.lambda_dis = lambda_dis;
  fo.assoc_distill = !no_assoc_distill;
  fo.sibling_distill = !no_sibling_distill;
  return fo;
}

double bce(const std::vector<double>& probs, const std::vector<char>& targets) {
  require(probs.size() == targets.size(), "bce: length mismatch");
  double loss = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    double p = std::clamp(probs[i], 1e-7, 1.0 - 1e-7);
    loss -= targets[i] ? std::log(p) : std::log(1.0 - p);
  }
  return loss;
}

double micro_f1_on(const Model& model, const std::vector<Document>& docs, double threshold) {
  long tp = 0, fp = 0, fn = 0;
  for (const auto& doc : docs) {
    auto probs = model.predict_probabilities(doc);
    auto gold = doc.label_vector(model.hierarchy());
    for (int i = 0; i < model.num_labels(); ++i) {
      bool pred = probs[i] > threshold;
      if (pred && gold[i]) ++tp;
      else if (pred) ++fp;
      else if (gold[i]) ++fn;
    }
  }
  double denom = 2.0 * tp + fp + fn;
  return denom == 0.0 ? 0.0 : 2.0 * tp / denom;
}

TrainResult train(Model& model, const std::vector<Document>& train_docs,
                  const std::vector<Document>& dev_docs, const TrainingConfig& config) {
  config.validate();
  require(!train_docs.empty(), "train: empty training split");
  const ForwardOptions opts = config.forward_options();

  TrainResult result;
  std::mt19937_64 shuffle_rng(config.seed ^ 0x5851f42d4c957f2dULL);
  std::vector<size_t> order(train_docs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<Matrix> best_params;
  double best_f1 = -1.0;
  int best_epoch = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    EpochLog log;
    log.epoch = epoch;
    size_t cursor = 0;
    int batch_index = 0;
    while (cursor < order.size()) {
      size_t batch_end = std::min(cursor + config.batch_size, order.size());
      const double inv = 1.0 / static_cast<double>(batch_end - cursor);
      model.params().zero_grad();
      for (; cursor < batch_end; ++cursor) {
        const Document& doc = train_docs[order[cursor]];
        Tape tape(&model.params());
        auto fwd = model.forward(tape, doc, opts);
        if (!std::isfinite(fwd.losses.total))
          fail("training diverged: non-finite loss at epoch " + std::to_string(epoch) +
               ", batch " + std::to_string(batch_index) + ", document '" + doc.doc_id + "'");
        tape.backward(fwd.total);
        log.bce_doc += fwd.losses.bce_doc;
        log.bce_assoc += fwd.losses.bce_assoc;
        log.l_sim += fwd.losses.l_sim;
        log.l_dis += fwd.losses.l_dis;
        log.total += fwd.losses.total;
      }
      model.params().scale_grads(inv);
      model.params().adam_step(config.learning_rate);
      if (!model.params().all_finite())
        fail("training diverged: non-finite parameters after epoch " + std::to_string(epoch) +
             ", batch " + std::to_string(batch_index));
      ++batch_index;
    }
    const double n = static_cast<double>(train_docs.size());
    log.bce_doc /= n;
    log.bce_assoc /= n;
    log.l_sim /= n;
    log.l_dis /= n;
    log.total /= n;

    model.refresh_inference_cache();
    try {
      log.dev_micro_f1 = dev_docs.empty() ? 0.0 : micro_f1_on(model, dev_docs, config.threshold);
    } catch (const Error& e) {
      fail("training diverged: epoch " + std::to_string(epoch) +
           " dev evaluation failed (" + e.what() + ")");
    }
    result.epochs.push_back(log);

    if (log.dev_micro_f1 > best_f1) {
      best_f1 = log.dev_micro_f1;
      best_epoch = epoch;
      best_params.clear();
      for (int p = 0; p < model.params().count(); ++p)
        best_params.push_back(model.params().value(p));
    }
  }

  for (int p = 0; p < model.params().count(); ++p) model.params().value(p) = best_params[p];
  model.refresh_inference_cache();
  result.best_epoch = best_epoch;
  result.best_dev_micro_f1 = best_f1;
  return result;
}

std::string loss_log_tsv(const std::vector<EpochLog>& logs) {
  std::ostringstream out;
  out << "epoch\tbce_doc\tbce_assoc\tl_sim\tl_dis\ttotal\tdev_micro_f1\n";
  out.precision(10);
  for (const auto& log : logs) {
    out << log.epoch << '\t' << log.bce_doc << '\t' << log.bce_assoc << '\t' << log.l_sim
        << '\t' << log.l_dis << '\t' << log.total << '\t' << log.dev_micro_f1 << '\n';
  }
  return out.str();
}

}  // namespace ahdd
