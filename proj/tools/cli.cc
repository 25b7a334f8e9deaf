// Copyright 2026 The tokpipe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <fmt/format.h>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "tokpipe/binarize.h"
#include "tokpipe/bpe.h"
#include "tokpipe/corpus.h"
#include "tokpipe/error.h"
#include "tokpipe/eval.h"
#include "tokpipe/pretrain.h"
#include "tokpipe/version.h"

namespace tokpipe::cli {

namespace {

using json = nlohmann::ordered_json;

// Every flag of every stage. Values come from defaults, then an optional
// --config file, then the command line.
struct PipelineConfig {
  bool json = false;
  unsigned threads = 1;
  bool lossy = false;
  std::uint64_t seed = 0;
  std::string out;

  std::string corpus;
  std::uint64_t sample_bytes = 0;

  std::string split_input;
  double fraction = 0.9;
  std::string train_out;
  std::string valid_out;

  std::size_t vocab_size = 52000;
  std::vector<std::string> special_tokens = bpe::default_special_tokens();
  std::string vocab_dir;
  bool emit_tokens = false;
  bool special_passthrough = false;

  std::string dataset_a;
  std::string dataset_b;

  pretrain::ScheduleConfig schedule;
  std::uint64_t stride = 1000;
  pretrain::BatchPlan plan;
  std::uint64_t corpus_tokens = 0;
  std::size_t seq_len = 512;
  pretrain::MaskingConfig masking;

  std::string gold;
  std::string pred;
  bool germeval = false;
  bool level_average = false;
  std::vector<std::string> classes;
  bool exclude_absent = false;
  std::string runs_csv;
};

struct Io {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

unsigned default_threads() {
  if (const char* env = std::getenv("TOKPIPE_THREADS")) {
    unsigned n = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec == std::errc() && ptr == s.data() + s.size() && n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Utf8Policy policy(const PipelineConfig& c) {
  return c.lossy ? Utf8Policy::kLossy : Utf8Policy::kStrict;
}

std::string shortest(double value) { return fmt::format("{}", value); }

json score_json(const eval::PrfScore& s) {
  return json{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1},
              {"tp", s.tp},               {"fp", s.fp},         {"fn", s.fn}};
}

std::string score_line(const std::string& name, const eval::PrfScore& s) {
  return fmt::format("{:<8} precision {:.4f}  recall {:.4f}  f1 {:.4f}  tp {} fp {} fn {}\n", name,
                     s.precision, s.recall, s.f1, s.tp, s.fp, s.fn);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  return out;
}

void emit(const Io& io, const json& doc) { io.out << doc.dump(2) << '\n'; }

// ---------------------------------------------------------------- corpus

void cmd_stats(const PipelineConfig& c, const Io& io) {
  const CorpusStats s = corpus_stats_file(c.corpus, policy(c), c.threads);
  if (c.json) {
    emit(io, {{"documents", s.documents}, {"words", s.words}, {"bytes", s.bytes}});
  } else {
    io.out << fmt::format("documents {}\nwords     {}\nbytes     {}\n", s.documents, s.words, s.bytes);
  }
}

void cmd_sample(const PipelineConfig& c, const Io& io) {
  auto out = open_out(c.out);
  const SampleResult r = sample_documents_file(
      c.corpus, c.sample_bytes, c.seed,
      [&](const Document& d) { out << d.text << '\n'; }, policy(c));
  out.flush();
  if (!out) throw IoError(c.out, "write failed");
  if (c.json) {
    emit(io, {{"documents", r.documents},
              {"bytes", r.bytes},
              {"budget", c.sample_bytes},
              {"seed", c.seed},
              {"budget_exceeds_corpus", r.budget_exceeds_corpus}});
  } else {
    io.out << fmt::format("sampled {} documents, {} bytes (budget {}, seed {})\n", r.documents,
                          r.bytes, c.sample_bytes, c.seed);
  }
}

void cmd_split(const PipelineConfig& c, const Io& io) {
  std::vector<std::string> items;
  {
    std::ifstream file;
    std::istream* in = &io.in;
    if (!c.split_input.empty() && c.split_input != "-") {
      file.open(c.split_input, std::ios::binary);
      if (!file) throw IoError(c.split_input, "cannot open for reading");
      in = &file;
    }
    std::string line;
    while (std::getline(*in, line)) {
      strip_carriage_return(line);
      items.push_back(line);
    }
  }
  const auto [train, valid] = split_train_validation(items, SplitSpec{c.fraction, c.seed});
  if (!c.train_out.empty()) {
    auto out = open_out(c.train_out);
    for (const auto& s : train) out << s << '\n';
  }
  if (!c.valid_out.empty()) {
    auto out = open_out(c.valid_out);
    for (const auto& s : valid) out << s << '\n';
  }
  if (c.json) {
    json doc{{"train_size", train.size()}, {"validation_size", valid.size()}};
    if (c.train_out.empty() || c.valid_out.empty()) {
      doc["train"] = train;
      doc["validation"] = valid;
    }
    emit(io, doc);
  } else {
    io.out << fmt::format("train {}\nvalidation {}\n", train.size(), valid.size());
  }
}

// ---------------------------------------------------------------- bpe

void cmd_train_bpe(const PipelineConfig& c, const Io& io) {
  bpe::TrainOptions options;
  options.special_tokens = c.special_tokens;
  options.num_merges = bpe::merges_for_vocab_size(c.vocab_size, c.special_tokens.size());
  options.threads = c.threads;
  auto corpus = load_corpus(c.corpus, policy(c));
  const bpe::Vocabulary vocab = bpe::train_vocab(corpus, options);
  bpe::save_vocab(vocab, c.out);
  if (c.json) {
    emit(io, {{"vocab_size", vocab.size()},
              {"merges", vocab.merges().size()},
              {"requested_merges", options.num_merges},
              {"fingerprint", fmt::format("{:016x}", bpe::fingerprint(vocab))},
              {"out", c.out}});
  } else {
    io.out << fmt::format("learned {} of {} merges; {} tokens written to {}\n",
                          vocab.merges().size(), options.num_merges, vocab.size(), c.out);
  }
}

void cmd_encode(const PipelineConfig& c, const Io& io) {
  const bpe::Vocabulary vocab = bpe::load_vocab(c.vocab_dir);
  json all = json::array();
  std::string line;
  std::vector<bpe::TokenId> ids;
  while (std::getline(io.in, line)) {
    strip_carriage_return(line);
    ids.clear();
    bpe::encode_append(vocab, line, ids);
    if (c.json) {
      if (c.emit_tokens) {
        json row = json::array();
        for (auto id : ids) row.push_back(vocab.token(id));
        all.push_back(std::move(row));
      } else {
        all.push_back(ids);
      }
      continue;
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i > 0) io.out << ' ';
      if (c.emit_tokens) {
        io.out << vocab.token(ids[i]);
      } else {
        io.out << ids[i];
      }
    }
    io.out << '\n';
  }
  if (c.json) emit(io, all);
}

void cmd_decode(const PipelineConfig& c, const Io& io) {
  const bpe::Vocabulary vocab = bpe::load_vocab(c.vocab_dir);
  const bpe::DecodeOptions options{c.special_passthrough};
  json all = json::array();
  std::string line;
  std::size_t line_no = 0;
  std::vector<bpe::TokenId> ids;
  while (std::getline(io.in, line)) {
    ++line_no;
    strip_carriage_return(line);
    ids.clear();
    std::istringstream fields(line);
    std::string field;
    while (fields >> field) {
      bpe::TokenId id = 0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), id);
      if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw ParseError("<stdin>", line_no, "'" + field + "' is not a token id");
      }
      ids.push_back(id);
    }
    std::string text;
    try {
      text = bpe::decode(vocab, ids, options);
    } catch (const InvalidArgument& e) {
      throw ParseError("<stdin>", line_no, e.what());
    }
    if (c.json) {
      all.push_back(std::move(text));
    } else {
      io.out << text << '\n';
    }
  }
  if (c.json) io.out << all.dump(2, ' ', false, json::error_handler_t::replace) << '\n';
}

// ---------------------------------------------------------------- binarize

void cmd_binarize(const PipelineConfig& c, const Io& io) {
  const bpe::Vocabulary vocab = bpe::load_vocab(c.vocab_dir);
  auto corpus = load_corpus(c.corpus, policy(c));
  const BinarizeSummary s = binarize(corpus, vocab, c.out, c.threads);
  if (c.json) {
    emit(io, {{"documents", s.documents},
              {"tokens", s.header.token_count},
              {"payload_bytes", s.header.payload_bytes()},
              {"fingerprint", fmt::format("{:016x}", s.header.fingerprint)},
              {"out", c.out}});
  } else {
    io.out << fmt::format("{} documents, {} tokens, {} payload bytes -> {}\n", s.documents,
                          s.header.token_count, s.header.payload_bytes(), c.out);
  }
}

void cmd_compare_size(const PipelineConfig& c, const Io& io) {
  const SizeReport r = size_report(std::filesystem::path(c.dataset_a), std::filesystem::path(c.dataset_b));
  if (c.json) {
    emit(io, {{"a_payload_bytes", r.a_bytes},
              {"b_payload_bytes", r.b_bytes},
              {"ratio", r.ratio},
              {"reduction", r.reduction}});
  } else {
    io.out << fmt::format("a {} bytes, b {} bytes\nratio {:.4f}, reduction {:.2f}%\n", r.a_bytes,
                          r.b_bytes, r.ratio, 100.0 * r.reduction);
  }
}

void cmd_fertility(const PipelineConfig& c, const Io& io) {
  const bpe::Vocabulary vocab = bpe::load_vocab(c.vocab_dir);
  auto corpus = load_corpus(c.corpus, policy(c));
  const FertilityReport r = fertility(corpus, vocab);
  if (c.json) {
    json doc{{"documents", r.documents}, {"tokens", r.tokens}, {"words", r.words}, {"bytes", r.bytes}};
    doc["tokens_per_word"] = r.tokens_per_word ? json(*r.tokens_per_word) : json(nullptr);
    doc["tokens_per_byte"] = r.tokens_per_byte ? json(*r.tokens_per_byte) : json(nullptr);
    emit(io, doc);
  } else {
    auto opt = [](const std::optional<double>& v) {
      return v ? fmt::format("{:.4f}", *v) : std::string("n/a");
    };
    io.out << fmt::format("tokens {}  words {}  bytes {}\ntokens/word {}  tokens/byte {}\n", r.tokens,
                          r.words, r.bytes, opt(r.tokens_per_word), opt(r.tokens_per_byte));
  }
}

// ---------------------------------------------------------------- pretrain

void cmd_lr_curve(const PipelineConfig& c, const Io& io) {
  const auto& s = c.schedule;
  s.validate();
  if (c.stride == 0) throw InvalidArgument("stride must be positive");
  std::vector<std::uint64_t> steps;
  for (std::uint64_t step = 0; step <= s.total_steps; step += c.stride) steps.push_back(step);
  steps.push_back(s.warmup_steps);
  steps.push_back(s.total_steps);
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());

  if (c.json) {
    json doc = json::array();
    for (auto step : steps) doc.push_back({{"step", step}, {"lr", pretrain::learning_rate(step, s)}});
    emit(io, doc);
    return;
  }
  io.out << "step,lr\n";
  for (auto step : steps) io.out << step << ',' << shortest(pretrain::learning_rate(step, s)) << '\n';
}

void cmd_budget(const PipelineConfig& c, const Io& io) {
  const auto b = pretrain::training_budget(
      c.plan, c.corpus_tokens > 0 ? std::optional<std::uint64_t>(c.corpus_tokens) : std::nullopt);
  if (c.json) {
    json doc{{"tokens_per_step", b.tokens_per_step}, {"total_tokens", b.total_tokens}};
    doc["epochs"] = b.epochs ? json(*b.epochs) : json(nullptr);
    emit(io, doc);
  } else {
    io.out << fmt::format("tokens/step {}\ntotal tokens {}\n", b.tokens_per_step, b.total_tokens);
    if (b.epochs) io.out << fmt::format("epochs {:.4f}\n", *b.epochs);
  }
}

void cmd_make_examples(const PipelineConfig& c, const Io& io) {
  const bpe::Vocabulary vocab = bpe::load_vocab(c.vocab_dir);
  pretrain::MaskingConfig masking = c.masking;
  masking.seed = c.seed;
  const bool to_stdout = c.out.empty() || c.out == "-";
  pretrain::ExamplesSummary s;
  if (to_stdout) {
    s = pretrain::write_masked_examples(c.dataset_a, vocab, c.seq_len, masking, io.out);
  } else {
    auto out = open_out(c.out);
    s = pretrain::write_masked_examples(c.dataset_a, vocab, c.seq_len, masking, out);
  }
  // With the stream on stdout the summary goes to stderr.
  std::ostream& report = to_stdout ? io.err : io.out;
  if (c.json) {
    report << json{{"examples", s.examples}, {"positions", s.positions}, {"corrupted", s.corrupted}}.dump(2)
           << '\n';
  } else {
    report << fmt::format("{} examples, {} of {} positions corrupted\n", s.examples, s.corrupted,
                          s.positions);
  }
}

// ---------------------------------------------------------------- eval

void cmd_eval_ner(const PipelineConfig& c, const Io& io) {
  if (c.germeval) {
    const auto gold = eval::parse_germeval(std::filesystem::path(c.gold));
    const auto pred = eval::parse_germeval(std::filesystem::path(c.pred));
    const eval::GermEvalReport r = eval::germeval_report(gold.sentences, pred.sentences);
    if (c.json) {
      emit(io, {{"metric", c.level_average ? "germeval-level-average" : "germeval-pooled"},
                {"f1", c.level_average ? r.level_average_f1 : r.pooled.f1},
                {"pooled", score_json(r.pooled)},
                {"outer", score_json(r.outer)},
                {"inner", score_json(r.inner)},
                {"level_average_f1", r.level_average_f1},
                {"repairs", {{"gold", gold.repairs}, {"pred", pred.repairs}}}});
    } else {
      io.out << score_line("pooled", r.pooled) << score_line("outer", r.outer)
             << score_line("inner", r.inner)
             << fmt::format("level-average f1 {:.4f}\n", r.level_average_f1)
             << fmt::format("BIO repairs: gold {}, pred {}\n", gold.repairs, pred.repairs);
    }
    return;
  }
  const auto gold = eval::parse_conll(std::filesystem::path(c.gold));
  const auto pred = eval::parse_conll(std::filesystem::path(c.pred));
  const eval::PrfScore s = eval::ner_f1(gold.sentences, pred.sentences);
  if (c.json) {
    json doc = score_json(s);
    doc["repairs"] = {{"gold", gold.repairs}, {"pred", pred.repairs}};
    emit(io, doc);
  } else {
    io.out << score_line("spans", s)
           << fmt::format("BIO repairs: gold {}, pred {}\n", gold.repairs, pred.repairs);
  }
}

void cmd_eval_clf(const PipelineConfig& c, const Io& io) {
  const auto gold = eval::read_labels(c.gold);
  const auto pred = eval::read_labels(c.pred);
  const auto r = eval::mean_class_f1(gold, pred, c.classes, c.exclude_absent);
  if (c.json) {
    json classes = json::array();
    for (const auto& cs : r.classes) {
      json entry = score_json(cs.score);
      entry["label"] = cs.label;
      entry["present"] = cs.present;
      classes.push_back(std::move(entry));
    }
    emit(io, {{"mean_f1", r.mean_f1}, {"classes", classes}});
  } else {
    for (const auto& cs : r.classes) io.out << score_line(cs.label, cs.score);
    io.out << fmt::format("mean f1 {:.4f}\n", r.mean_f1);
  }
}

void cmd_select_run(const PipelineConfig& c, const Io& io) {
  std::ifstream in(c.runs_csv);
  if (!in) throw IoError(c.runs_csv, "cannot open for reading");
  const auto runs = eval::parse_runs_csv(in, c.runs_csv);
  const eval::RunRecord& best = eval::select_best_run(runs);
  if (c.json) {
    emit(io, {{"run_id", best.run_id},
              {"validation", best.validation_score},
              {"test", best.test_score},
              {"runs", runs.size()}});
  } else {
    io.out << fmt::format("best of {} runs: run {} (validation {:.4f})\nreported test score {:.4f}\n",
                          runs.size(), best.run_id, best.validation_score, best.test_score);
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  PipelineConfig c;
  c.threads = default_threads();
  const Io io{in, out, err};

  CLI::App app{"Corpus, byte-level BPE, binarization, pre-training data and evaluation tools",
               "tokpipe"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "Flat key=value file; sections name subcommands");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_flag("--json", c.json, "Machine-readable JSON on stdout");
  app.add_option("--threads", c.threads, "Worker threads (default: $TOKPIPE_THREADS or all cores)")
      ->check(CLI::PositiveNumber);
  app.add_flag("--lossy", c.lossy, "Replace invalid UTF-8 with U+FFFD instead of failing");

  std::function<void(const PipelineConfig&, const Io&)> handler;
  auto command = [&](const char* name, const char* help, auto fn) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->callback([&handler, fn] { handler = fn; });
    return sub;
  };

  auto* stats = command("stats", "Document, word and byte counts", cmd_stats);
  stats->add_option("corpus", c.corpus, "Corpus, one document per line")->required();

  auto* sample = command("sample", "Random whole-document sample up to a byte budget", cmd_sample);
  sample->add_option("corpus", c.corpus)->required();
  sample->add_option("--bytes", c.sample_bytes, "Byte budget")->required()->check(CLI::PositiveNumber);
  sample->add_option("--seed", c.seed);
  sample->add_option("--out", c.out)->required();

  auto* split = command("split", "Seeded train/validation split of lines", cmd_split);
  split->add_option("input", c.split_input, "Input lines (default: stdin)");
  split->add_option("--fraction", c.fraction, "Training fraction")->check(CLI::Range(0.0, 1.0));
  split->add_option("--seed", c.seed);
  split->add_option("--train-out", c.train_out);
  split->add_option("--valid-out", c.valid_out);

  auto* train = command("train-bpe", "Train a byte-level BPE vocabulary", cmd_train_bpe);
  train->add_option("corpus", c.corpus)->required();
  train->add_option("--vocab-size", c.vocab_size, "Total tokens including bytes and specials");
  train->add_option("--special", c.special_tokens, "Special tokens: begin end pad unk mask");
  train->add_option("--out", c.out, "Output directory")->required();

  auto* encode = command("encode", "Encode stdin lines to token ids", cmd_encode);
  encode->add_option("vocab", c.vocab_dir)->required();
  auto* ids_flag = encode->add_flag("--ids", "Emit token ids (default)");
  encode->add_flag("--tokens", c.emit_tokens, "Emit token strings")->excludes(ids_flag);

  auto* decode = command("decode", "Decode stdin lines of token ids", cmd_decode);
  decode->add_option("vocab", c.vocab_dir)->required();
  decode->add_flag("--special-passthrough", c.special_passthrough, "Render special tokens");

  auto* bin = command("binarize", "Write a binary token dataset", cmd_binarize);
  bin->add_option("corpus", c.corpus)->required();
  bin->add_option("--vocab", c.vocab_dir)->required();
  bin->add_option("--out", c.out)->required();

  auto* cmp = command("compare-size", "Payload size ratio a/b of two datasets", cmd_compare_size);
  cmp->add_option("a", c.dataset_a)->required();
  cmp->add_option("b", c.dataset_b)->required();

  auto* fert = command("fertility", "Tokens per word and per byte", cmd_fertility);
  fert->add_option("corpus", c.corpus)->required();
  fert->add_option("--vocab", c.vocab_dir)->required();

  auto* lr = command("lr-curve", "Warmup + polynomial decay learning-rate curve", cmd_lr_curve);
  lr->add_option("--warmup", c.schedule.warmup_steps);
  lr->add_option("--total", c.schedule.total_steps);
  lr->add_option("--peak", c.schedule.peak_lr);
  lr->add_option("--power", c.schedule.decay_power);
  lr->add_option("--end", c.schedule.end_lr);
  lr->add_option("--stride", c.stride, "Step spacing of the emitted points");

  auto* budget = command("budget", "Token and step accounting of a batch plan", cmd_budget);
  budget->add_option("--batch", c.plan.sequences_per_batch, "Sequences per update");
  budget->add_option("--seq-len", c.plan.sequence_length);
  budget->add_option("--steps", c.plan.total_steps);
  budget->add_option("--corpus-tokens", c.corpus_tokens, "Corpus size in tokens, for epochs");

  auto* mk = command("make-examples", "Masked-LM examples from a binary dataset", cmd_make_examples);
  mk->add_option("dataset", c.dataset_a)->required();
  mk->add_option("--vocab", c.vocab_dir)->required();
  mk->add_option("--seq-len", c.seq_len);
  mk->add_option("--seed", c.seed);
  mk->add_option("--mask-rate", c.masking.mask_rate);
  mk->add_option("--out", c.out, "Output file (default: stdout)");

  auto* ner = command("eval-ner", "Span F1 for CoNLL or GermEval files", cmd_eval_ner);
  ner->add_option("--gold", c.gold)->required();
  ner->add_option("--pred", c.pred)->required();
  ner->add_flag("--germeval", c.germeval, "Two-level GermEval 2014 TSV input");
  ner->add_flag("--level-average", c.level_average, "Headline f1 as the mean of level f1s");

  auto* clf = command("eval-clf", "Mean per-class F1", cmd_eval_clf);
  clf->add_option("--gold", c.gold)->required();
  clf->add_option("--pred", c.pred)->required();
  clf->add_option("--classes", c.classes)->required()->delimiter(',');
  clf->add_flag("--exclude-absent", c.exclude_absent, "Leave unseen classes out of the mean");

  auto* sel = command("select-run", "Best run by validation score", cmd_select_run);
  sel->add_option("runs", c.runs_csv, "CSV of run_id,val,test")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    handler(c, io);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace tokpipe::cli
